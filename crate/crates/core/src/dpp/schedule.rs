use super::max_d::ValueTableMaxD;
use super::min_time::MinTimeTable;
use crate::accumulation::AccumulationModel;
use crate::error::{invalid, Result};

/// Update times read off a solved policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Strictly increasing, starting at 0 unless empty.
    pub update_times: Vec<u64>,
    /// Grid value of the model D at each update.
    pub predicted_d: Vec<f64>,
    /// Horizon for max-D schedules, total time for min-time schedules.
    pub end_time: u64,
    /// Model D at `end_time` along the grid path.
    pub final_d: f64,
    /// Sum of stage lengths; min-time schedules only.
    pub total_cost: Option<u64>,
    pub update_cost: u32,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.update_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.update_times.is_empty()
    }

    /// Stage lengths including the update cost; the last one runs to `end_time`.
    pub fn stage_lengths(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.update_times.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(&last) = self.update_times.last() {
            out.push(self.end_time - last);
        }
        out
    }
}

/// Follows the max-D policy from the grid point nearest `d0` at `t = 0`.
pub fn extract_schedule_max_d(table: &ValueTableMaxD, d0: f64) -> Result<Schedule> {
    let grid = table.grid();
    if !(d0 >= grid.d_min() && d0 <= grid.d_max()) {
        return Err(invalid(format!("D0 = {d0} lies outside the grid [{}, {}]", grid.d_min(), grid.d_max())));
    }
    let config = table.config();
    let cost = config.update_cost;
    let mut i = grid.nearest(d0);
    let mut t = 0u32;
    let mut update_times = Vec::new();
    let mut predicted_d = Vec::new();
    let mut final_d = grid.value(i);
    while let Some(t_next) = table.next_update(i, t) {
        update_times.push(u64::from(t));
        predicted_d.push(grid.value(i));
        final_d = grid.value(i) + table.stage_gain(i, t_next - t - cost);
        i = grid.nearest(final_d);
        t = t_next;
    }
    Ok(Schedule {
        update_times,
        predicted_d,
        end_time: u64::from(config.horizon),
        final_d,
        total_cost: None,
        update_cost: cost,
    })
}

/// Follows the min-time policy from the grid point nearest `d0`.
///
/// Returns an empty schedule with zero cost once `d0` has reached the target.
pub fn extract_schedule_min_time(table: &MinTimeTable, d0: f64) -> Result<Schedule> {
    let config = table.config();
    let grid = table.grid();
    let empty = |d: f64| Schedule {
        update_times: Vec::new(),
        predicted_d: Vec::new(),
        end_time: 0,
        final_d: d,
        total_cost: Some(0),
        update_cost: config.update_cost,
    };
    if d0 >= config.d_final {
        return Ok(empty(d0));
    }
    if !(d0 >= grid.d_min()) {
        return Err(invalid(format!("D0 = {d0} lies below the grid minimum {}", grid.d_min())));
    }
    let mut i = grid.nearest(d0);
    let mut time = 0u64;
    let mut schedule = empty(grid.value(i));
    while let Some(dt) = table.stage_length(i) {
        schedule.update_times.push(time);
        schedule.predicted_d.push(grid.value(i));
        time += dt;
        i = table.successor(i, dt);
    }
    schedule.end_time = time;
    schedule.final_d = grid.value(i);
    schedule.total_cost = Some(time);
    Ok(schedule)
}

/// D gained by following `update_times` up to `horizon` under the exact
/// (unrounded) dynamics, starting from `d0`.
pub fn accumulated_gain(
    model: &AccumulationModel,
    d0: f64,
    update_times: &[u64],
    horizon: u64,
    update_cost: u32,
) -> Result<f64> {
    if update_times.windows(2).any(|w| w[1] <= w[0] + u64::from(update_cost))
        || update_times.last().is_some_and(|&t| t + u64::from(update_cost) > horizon)
    {
        return Err(invalid("update times must be separated by more than Cs and fit in the horizon"));
    }
    let mut d = d0;
    for (k, &t) in update_times.iter().enumerate() {
        let end = update_times.get(k + 1).copied().unwrap_or(horizon);
        d += model.h(d)? * (end - t - u64::from(update_cost)) as f64;
    }
    Ok(d - d0)
}
