//! Minimize the time needed to reach a target criterion.
//!
//! ```text
//! v(D) = min_{dt > Cs} { v(D + (dt - Cs) h(D)) + dt },   v(D) = 0 for D >= D_final
//! ```
//!
//! `v` does not depend on the elapsed time. Since `D' > D` for every
//! admissible stage, the grid is swept from the top down.

use super::grid::{DGrid, GridSpacing};
use super::max_d::DEFAULT_GRID_POINTS;
use crate::accumulation::AccumulationModel;
use crate::error::{invalid, Error, Result};

/// Largest stage length the solver will scan from one grid point.
pub const MAX_STAGE_SCAN: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MinTimeConfig {
    pub d_final: f64,
    /// Update cost `Cs`; zero is allowed for continuum comparisons.
    pub update_cost: u32,
    pub d0: f64,
    pub d_min: f64,
    pub n_d: usize,
    pub spacing: GridSpacing,
}

impl MinTimeConfig {
    /// Default grid: [`DEFAULT_GRID_POINTS`] geometric points on `[d0, d_final]`.
    pub fn new(d0: f64, d_final: f64, update_cost: u32) -> Self {
        MinTimeConfig {
            d_final,
            update_cost,
            d0,
            d_min: d0,
            n_d: DEFAULT_GRID_POINTS,
            spacing: GridSpacing::Geometric,
        }
    }

    pub fn with_grid_points(mut self, n_d: usize) -> Self {
        self.n_d = n_d;
        self
    }

    pub fn with_d_min(mut self, d_min: f64) -> Self {
        self.d_min = d_min;
        self
    }

    pub fn with_spacing(mut self, spacing: GridSpacing) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_min > 0.0 && self.d_min <= self.d0 && self.d0 < self.d_final && self.d_final.is_finite()) {
            return Err(invalid(format!(
                "need 0 < d_min <= D0 < D_final, got {} <= {} < {}",
                self.d_min, self.d0, self.d_final
            )));
        }
        if self.n_d < 2 {
            return Err(invalid(format!("n_d must be at least 2, got {}", self.n_d)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<DGrid> {
        DGrid::new(self.d_min, self.d_final, self.n_d, self.spacing)
    }
}

/// Value function and stage-length policy of the min-time program.
#[derive(Debug, Clone)]
pub struct MinTimeTable {
    config: MinTimeConfig,
    model: AccumulationModel,
    grid: DGrid,
    v: Vec<u64>,
    policy: Vec<Option<u64>>,
}

impl MinTimeTable {
    pub fn config(&self) -> &MinTimeConfig {
        &self.config
    }

    pub fn model(&self) -> &AccumulationModel {
        &self.model
    }

    pub fn grid(&self) -> &DGrid {
        &self.grid
    }

    /// `v(D_i)`.
    pub fn value(&self, d_index: usize) -> u64 {
        self.v[d_index]
    }

    pub fn values(&self) -> &[u64] {
        &self.v
    }

    /// Optimal stage length `dt` from `D_i`; `None` once the target is reached.
    pub fn stage_length(&self, d_index: usize) -> Option<u64> {
        self.policy[d_index]
    }

    pub fn is_target(&self, d_index: usize) -> bool {
        self.grid.value(d_index) >= self.config.d_final
    }

    /// Grid index after a stage of length `dt` from `D_i`.
    ///
    /// A stage that rounds back onto `D_i` or below is promoted to the next
    /// grid point, so every stage strictly advances.
    pub fn successor(&self, d_index: usize, dt: u64) -> usize {
        let d = self.grid.value(d_index);
        let d_next = d + self.model.h_unchecked(d) * (dt - u64::from(self.config.update_cost)) as f64;
        self.grid.nearest(d_next).max(d_index + 1)
    }
}

/// Longest stage worth scanning: one stage that reaches `d_final` outright.
pub(crate) fn stage_cap(model: &AccumulationModel, d: f64, d_final: f64, update_cost: u32) -> Result<u64> {
    let single = ((d_final - d) / model.h_unchecked(d)).ceil();
    if !(single <= MAX_STAGE_SCAN as f64) {
        return Err(Error::SearchTooLarge { size: single, cap: MAX_STAGE_SCAN as f64 });
    }
    Ok(u64::from(update_cost) + (single as u64).max(1))
}

/// Descending sweep over the grid. Ties resolve to the shortest stage.
pub fn solve_min_time(config: &MinTimeConfig, model: &AccumulationModel) -> Result<MinTimeTable> {
    config.validate()?;
    let grid = config.grid()?;
    let n = grid.len();
    let cost = u64::from(config.update_cost);
    let mut v = vec![0u64; n];
    let mut policy = vec![None; n];
    let mids = grid.midpoints();

    for i in (0..n).rev() {
        let d = grid.value(i);
        if d >= config.d_final {
            continue;
        }
        let hd = model.h_unchecked(d);
        let cap = stage_cap(model, d, config.d_final, config.update_cost)?;
        let mut k = i;
        let mut best = u64::MAX;
        let mut best_dt = 0;
        for dt in cost + 1..=cap {
            let d_next = d + hd * (dt - cost) as f64;
            while k < mids.len() && mids[k] <= d_next {
                k += 1;
            }
            let candidate = v[k.max(i + 1)] + dt;
            if candidate < best {
                best = candidate;
                best_dt = dt;
            }
        }
        v[i] = best;
        policy[i] = Some(best_dt);
    }

    Ok(MinTimeTable { config: config.clone(), model: *model, grid, v, policy })
}
