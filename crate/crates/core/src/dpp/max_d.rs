//! Maximize the criterion accumulated by a fixed horizon.
//!
//! `u(D, t)` is the optimal future gain from state `(D, t)` when the
//! covariates are updated immediately:
//!
//! ```text
//! u(D, t) = max_{t' in (t + Cs, T]} { u(D', t') + (D' - D) },  D' = D + h(D) (t' - t - Cs)
//! u(D, t) = 0 for t in [T - Cs, T]
//! ```
//!
//! solved backward in `t` on a D grid, with `D'` rounded to the nearest grid
//! point before the table lookup.

use rayon::prelude::*;

use super::grid::{DGrid, GridSpacing};
use crate::accumulation::AccumulationModel;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 2000;
const NO_UPDATE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxDConfig {
    /// Horizon `T` in measurement units.
    pub horizon: u32,
    /// Update cost `Cs`; zero is allowed for continuum comparisons.
    pub update_cost: u32,
    pub d0: f64,
    pub d_min: f64,
    pub d_max: f64,
    pub n_d: usize,
    pub spacing: GridSpacing,
}

impl MaxDConfig {
    /// Default grid: [`DEFAULT_GRID_POINTS`] geometric points on
    /// `[d0, d0 + h* T]`, the range reachable from `d0`.
    pub fn new(horizon: u32, update_cost: u32, d0: f64, model: &AccumulationModel) -> Self {
        MaxDConfig {
            horizon,
            update_cost,
            d0,
            d_min: d0,
            d_max: d0 + model.h_star * f64::from(horizon),
            n_d: DEFAULT_GRID_POINTS,
            spacing: GridSpacing::Geometric,
        }
    }

    pub fn with_grid_points(mut self, n_d: usize) -> Self {
        self.n_d = n_d;
        self
    }

    pub fn with_bounds(mut self, d_min: f64, d_max: f64) -> Self {
        self.d_min = d_min;
        self.d_max = d_max;
        self
    }

    pub fn with_spacing(mut self, spacing: GridSpacing) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn validate(&self, model: &AccumulationModel) -> Result<()> {
        if self.horizon == 0 || self.update_cost >= self.horizon {
            return Err(invalid(format!(
                "need 0 <= Cs < T, got Cs = {}, T = {}",
                self.update_cost, self.horizon
            )));
        }
        if self.horizon == u32::MAX {
            return Err(invalid("horizon too large"));
        }
        if !(self.d_min > 0.0 && self.d_min <= self.d0 && self.d0 <= self.d_max) {
            return Err(invalid(format!(
                "need 0 < d_min <= D0 <= d_max, got {} <= {} <= {}",
                self.d_min, self.d0, self.d_max
            )));
        }
        if self.n_d < 2 {
            return Err(invalid(format!("n_d must be at least 2, got {}", self.n_d)));
        }
        let required = self.d0 + model.h_star * f64::from(self.horizon);
        if self.d_max < required {
            return Err(Error::GridTooSmall { d_max: self.d_max, required });
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<DGrid> {
        DGrid::new(self.d_min, self.d_max, self.n_d, self.spacing)
    }
}

/// Value function and policy of the max-D program.
#[derive(Debug, Clone)]
pub struct ValueTableMaxD {
    config: MaxDConfig,
    model: AccumulationModel,
    grid: DGrid,
    // Row-major by D index, `horizon + 1` columns.
    u: Vec<f64>,
    policy: Vec<u32>,
}

impl ValueTableMaxD {
    pub fn config(&self) -> &MaxDConfig {
        &self.config
    }

    pub fn model(&self) -> &AccumulationModel {
        &self.model
    }

    pub fn grid(&self) -> &DGrid {
        &self.grid
    }

    fn width(&self) -> usize {
        self.config.horizon as usize + 1
    }

    /// `u(D_i, t)`.
    pub fn value(&self, d_index: usize, t: u32) -> f64 {
        self.u[d_index * self.width() + t as usize]
    }

    /// Optimal next update time from `(D_i, t)`; `None` in the terminal band.
    pub fn next_update(&self, d_index: usize, t: u32) -> Option<u32> {
        let p = self.policy[d_index * self.width() + t as usize];
        (p != NO_UPDATE).then_some(p)
    }

    /// `u` at the grid point nearest `d`.
    pub fn value_at(&self, d: f64, t: u32) -> f64 {
        self.value(self.grid.nearest(d), t)
    }

    /// Gain of a stage with `productive` measurements started from grid point `i`.
    #[inline]
    pub(crate) fn stage_gain(&self, d_index: usize, productive: u32) -> f64 {
        self.model.h_unchecked(self.grid.value(d_index)) * f64::from(productive)
    }
}

/// Fills `u` backward from `t = T - Cs - 1` to `t = 0`.
///
/// Ties between update times resolve to the earliest.
pub fn solve_max_d(config: &MaxDConfig, model: &AccumulationModel) -> Result<ValueTableMaxD> {
    config.validate(model)?;
    let grid = config.grid()?;
    let n = grid.len();
    let horizon = config.horizon as usize;
    let cost = config.update_cost as usize;
    let width = horizon + 1;
    let h: Vec<f64> = grid.points().iter().map(|&d| model.h_unchecked(d)).collect();
    let mut u = vec![0.0; n * width];
    let mut policy = vec![NO_UPDATE; n * width];

    for t in (0..horizon - cost).rev() {
        let column: Vec<(f64, u32)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let d = grid.value(i);
                let hd = h[i];
                let mids = grid.midpoints();
                let mut k = i;
                let mut best = f64::NEG_INFINITY;
                let mut best_t = NO_UPDATE;
                for t_next in t + cost + 1..=horizon {
                    let productive = (t_next - t - cost) as f64;
                    let d_next = d + hd * productive;
                    // D' grows with t', so the nearest index only moves up.
                    while k < mids.len() && mids[k] <= d_next {
                        k += 1;
                    }
                    let candidate = u[k * width + t_next] + hd * productive;
                    if candidate > best {
                        best = candidate;
                        best_t = t_next as u32;
                    }
                }
                (best, best_t)
            })
            .collect();
        for (i, (value, t_next)) in column.into_iter().enumerate() {
            u[i * width + t] = value;
            policy[i * width + t] = t_next;
        }
    }

    Ok(ValueTableMaxD { config: config.clone(), model: *model, grid, u, policy })
}
