//! CSV output for value tables and schedules.

use std::io::Write;

use csv::Writer;

use super::max_d::ValueTableMaxD;
use super::min_time::MinTimeTable;
use super::schedule::Schedule;
use crate::error::Result;

/// Columns `d_index,d,t,u,t_next`; `t_next` is empty in the terminal band.
pub fn write_max_d_table<W: Write>(table: &ValueTableMaxD, out: W) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["d_index", "d", "t", "u", "t_next"])?;
    for i in 0..table.grid().len() {
        let d = table.grid().value(i).to_string();
        for t in 0..=table.config().horizon {
            let next = table.next_update(i, t).map(|n| n.to_string()).unwrap_or_default();
            w.write_record([&i.to_string(), &d, &t.to_string(), &table.value(i, t).to_string(), &next])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `d_index,d,v,dt`; `dt` is empty at target points.
pub fn write_min_time_table<W: Write>(table: &MinTimeTable, out: W) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["d_index", "d", "v", "dt"])?;
    for i in 0..table.grid().len() {
        let dt = table.stage_length(i).map(|n| n.to_string()).unwrap_or_default();
        w.write_record([i.to_string(), table.grid().value(i).to_string(), table.value(i).to_string(), dt])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `update,time,predicted_d,stage_length`.
pub fn write_schedule<W: Write>(schedule: &Schedule, out: W) -> Result<()> {
    let mut w = Writer::from_writer(out);
    w.write_record(["update", "time", "predicted_d", "stage_length"])?;
    let lengths = schedule.stage_lengths();
    for (k, (&t, &d)) in schedule.update_times.iter().zip(&schedule.predicted_d).enumerate() {
        w.write_record([k.to_string(), t.to_string(), d.to_string(), lengths[k].to_string()])?;
    }
    w.flush()?;
    Ok(())
}
