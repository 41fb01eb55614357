//! Cost-efficient batch-sequential D-optimal designs for binary-response
//! experiments with a complementary log-log link.
//!
//! Each update of the covariates costs a fixed amount of time `Cs`, measured
//! in units of single measurements. Given a model `h(D)` of how the D-criterion
//! grows per measurement, two dynamic programs pick the update times:
//!
//! * [`dpp::solve_max_d`] maximizes the D accumulated by a fixed horizon `T`;
//! * [`dpp::solve_min_time`] minimizes the time needed to reach a target D.
//!
//! The [`cloglog`] module holds the statistical model (likelihood, Fisher
//! information, the two-point locally D-optimal design, maximum likelihood),
//! [`accumulation`] the `h(D)` model and its continuous-time limits, and
//! [`sim`] a Monte-Carlo harness that runs the whole sequential experiment.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accumulation;
pub mod bench;
pub mod cloglog;
pub mod dpp;
mod error;
pub mod rng;
pub mod sim;
pub mod stats;

pub use accumulation::AccumulationModel;
pub use cloglog::{InformationMatrix, ModelParams, Observation, TwoPointDesign};
pub use error::{Error, Result};
