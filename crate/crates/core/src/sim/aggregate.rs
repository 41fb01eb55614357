use super::Trajectory;
use crate::stats::{median, quantile};

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub stage: usize,
    /// Median clock at the end of the stage.
    pub cumulative_time: f64,
    pub median_d: f64,
    pub q25_d: f64,
    pub q75_d: f64,
    /// Trajectories that reached this stage.
    pub count: usize,
}

/// Per-stage median and quartiles of the observed D.
pub fn aggregate(trajectories: &[Trajectory]) -> Vec<SummaryRow> {
    let depth = trajectories.iter().map(|t| t.stages.len()).max().unwrap_or(0);
    (0..depth)
        .map(|stage| {
            let present: Vec<_> = trajectories.iter().filter_map(|t| t.stages.get(stage)).collect();
            let times: Vec<f64> = present.iter().map(|s| s.cumulative_time as f64).collect();
            let ds: Vec<f64> = present.iter().map(|s| s.observed_d).collect();
            SummaryRow {
                stage,
                cumulative_time: median(&times).unwrap_or(f64::NAN),
                median_d: median(&ds).unwrap_or(f64::NAN),
                q25_d: quantile(&ds, 0.25).unwrap_or(f64::NAN),
                q75_d: quantile(&ds, 0.75).unwrap_or(f64::NAN),
                count: present.len(),
            }
        })
        .collect()
}
