//! Experiment harness, data files and command-line front end for the
//! allocation solver in `roboalloc-core`.

pub mod dataset;
pub mod formats;
pub mod harness;
pub mod instances;
