use std::io::Write;

use csv::Writer;

use super::{SummaryRow, Trajectory};
use crate::error::Result;

/// Columns `replication,stage,start_time,n_measurements,x1,x2,a_hat,b_hat,observed_d,cumulative_time`.
///
/// `a_hat` and `b_hat` are empty for stages whose refit failed.
pub fn write_trajectories<W: Write>(trajectories: &[Trajectory], out: W) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record([
        "replication",
        "stage",
        "start_time",
        "n_measurements",
        "x1",
        "x2",
        "a_hat",
        "b_hat",
        "observed_d",
        "cumulative_time",
    ])?;
    for t in trajectories {
        for (k, s) in t.stages.iter().enumerate() {
            let (a, b) = s.mle_after.map(|p| (p.a.to_string(), p.b.to_string())).unwrap_or_default();
            w.write_record([
                t.replication_id.to_string(),
                k.to_string(),
                s.start_time.to_string(),
                s.n_measurements.to_string(),
                s.covariates.0.to_string(),
                s.covariates.1.to_string(),
                a,
                b,
                s.observed_d.to_string(),
                s.cumulative_time.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `cumulative_time,median_d,q25_d,q75_d,policy`.
pub fn write_summary<W: Write>(rows: &[SummaryRow], policy: &str, out: W) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["cumulative_time", "median_d", "q25_d", "q75_d", "policy"])?;
    for r in rows {
        w.write_record([
            r.cumulative_time.to_string(),
            r.median_d.to_string(),
            r.q25_d.to_string(),
            r.q75_d.to_string(),
            policy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
