//! File formats, instance generators, a threaded executor and the `cflr`
//! command line on top of [`cflr_core`].

pub mod bench;
pub mod check;
pub mod cli;
pub mod exec;
pub mod instances;
pub mod io;
pub mod report;

pub use cflr_core as core;
