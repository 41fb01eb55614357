//! Exhaustive search over update schedules on a fixed grid.
//!
//! Both searches enumerate every admissible sequence without memoization
//! and share the solvers' rounding rule and summation order, so on small
//! instances their optima must agree with the tables bit for bit.

use super::grid::DGrid;
use super::min_time::stage_cap;
use crate::accumulation::AccumulationModel;
use crate::error::{invalid, Error, Result};

/// Largest horizon accepted by [`brute_force_max_d`].
pub const MAX_BRUTE_HORIZON: u32 = 60;
/// Node budget for one exhaustive search.
pub const DEFAULT_NODE_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult<V> {
    pub value: V,
    pub update_times: Vec<u64>,
    /// Search-tree nodes visited while computing `value`.
    pub nodes: u64,
}

struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            return Err(Error::SearchTooLarge { size: self.used as f64, cap: self.cap as f64 });
        }
        Ok(())
    }
}

struct MaxDSearch<'a> {
    grid: &'a DGrid,
    h: Vec<f64>,
    horizon: u32,
    cost: u32,
}

impl MaxDSearch<'_> {
    fn next_state(&self, i: usize, t: u32, t_next: u32) -> (usize, f64) {
        let productive = f64::from(t_next - t - self.cost);
        let gain = self.h[i] * productive;
        (self.grid.nearest(self.grid.value(i) + gain), gain)
    }

    fn best(&self, i: usize, t: u32, budget: &mut Budget) -> Result<(f64, Option<u32>)> {
        budget.tick()?;
        if t + self.cost >= self.horizon {
            return Ok((0.0, None));
        }
        let mut best = f64::NEG_INFINITY;
        let mut arg = None;
        for t_next in t + self.cost + 1..=self.horizon {
            let (k, gain) = self.next_state(i, t, t_next);
            let candidate = self.best(k, t_next, budget)?.0 + gain;
            if candidate > best {
                best = candidate;
                arg = Some(t_next);
            }
        }
        Ok((best, arg))
    }
}

/// Best accumulated gain from `(d0, 0)` over all update sequences.
pub fn brute_force_max_d(
    horizon: u32,
    update_cost: u32,
    d0: f64,
    grid: &DGrid,
    model: &AccumulationModel,
    node_cap: u64,
) -> Result<BruteForceResult<f64>> {
    if horizon > MAX_BRUTE_HORIZON || update_cost >= horizon {
        return Err(invalid(format!("need Cs < T <= {MAX_BRUTE_HORIZON}, got Cs = {update_cost}, T = {horizon}")));
    }
    let search = MaxDSearch {
        grid,
        h: grid.points().iter().map(|&d| model.h_unchecked(d)).collect(),
        horizon,
        cost: update_cost,
    };
    let mut budget = Budget { used: 0, cap: node_cap };
    let mut i = grid.nearest(d0);
    let (value, mut next) = search.best(i, 0, &mut budget)?;
    let nodes = budget.used;

    let mut update_times = Vec::new();
    let mut t = 0;
    while let Some(t_next) = next {
        update_times.push(u64::from(t));
        i = search.next_state(i, t, t_next).0;
        t = t_next;
        next = search.best(i, t, &mut Budget { used: 0, cap: u64::MAX })?.1;
    }
    Ok(BruteForceResult { value, update_times, nodes })
}

struct MinTimeSearch<'a> {
    grid: &'a DGrid,
    model: &'a AccumulationModel,
    d_final: f64,
    cost: u32,
}

impl MinTimeSearch<'_> {
    fn successor(&self, i: usize, dt: u64) -> usize {
        let d = self.grid.value(i);
        let d_next = d + self.model.h_unchecked(d) * (dt - u64::from(self.cost)) as f64;
        self.grid.nearest(d_next).max(i + 1)
    }

    fn best(&self, i: usize, budget: &mut Budget) -> Result<(u64, Option<u64>)> {
        budget.tick()?;
        let d = self.grid.value(i);
        if d >= self.d_final {
            return Ok((0, None));
        }
        let cap = stage_cap(self.model, d, self.d_final, self.cost)?;
        let mut best = u64::MAX;
        let mut arg = None;
        for dt in u64::from(self.cost) + 1..=cap {
            let candidate = self.best(self.successor(i, dt), budget)?.0 + dt;
            if candidate < best {
                best = candidate;
                arg = Some(dt);
            }
        }
        Ok((best, arg))
    }
}

/// Least time to reach `d_final` from `d0` over all stage-length sequences.
///
/// `grid` must end at `d_final`, as the min-time solver's grid does.
pub fn brute_force_min_time(
    d_final: f64,
    update_cost: u32,
    d0: f64,
    grid: &DGrid,
    model: &AccumulationModel,
    node_cap: u64,
) -> Result<BruteForceResult<u64>> {
    if grid.d_max() < d_final {
        return Err(invalid(format!("grid ends at {} below D_final = {d_final}", grid.d_max())));
    }
    let search = MinTimeSearch { grid, model, d_final, cost: update_cost };
    if d0 >= d_final {
        return Ok(BruteForceResult { value: 0, update_times: Vec::new(), nodes: 0 });
    }
    let mut budget = Budget { used: 0, cap: node_cap };
    let mut i = grid.nearest(d0);
    let (value, mut next) = search.best(i, &mut budget)?;
    let nodes = budget.used;

    let mut update_times = Vec::new();
    let mut time = 0;
    while let Some(dt) = next {
        update_times.push(time);
        time += dt;
        i = search.successor(i, dt);
        next = search.best(i, &mut Budget { used: 0, cap: u64::MAX })?.1;
    }
    Ok(BruteForceResult { value, update_times, nodes })
}
