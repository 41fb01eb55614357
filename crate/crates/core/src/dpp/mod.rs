//! Grid solvers for the two update-scheduling programs.
//!
//! D values that land above the top of a grid are rounded to its last point.

mod brute;
mod grid;
mod io;
mod max_d;
mod min_time;
mod schedule;

pub use brute::{brute_force_max_d, brute_force_min_time, BruteForceResult, DEFAULT_NODE_CAP, MAX_BRUTE_HORIZON};
pub use grid::{DGrid, GridSpacing};
pub use io::{write_max_d_table, write_min_time_table, write_schedule};
pub use max_d::{solve_max_d, MaxDConfig, ValueTableMaxD, DEFAULT_GRID_POINTS};
pub use min_time::{solve_min_time, MinTimeConfig, MinTimeTable, MAX_STAGE_SCAN};
pub use schedule::{accumulated_gain, extract_schedule_max_d, extract_schedule_min_time, Schedule};
