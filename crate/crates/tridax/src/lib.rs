//! File formats, timed drivers, configuration and the command line for
//! [`tridax_core`].

pub mod calibration;
pub mod cli;
pub mod config;
pub mod generate;
pub mod io;
pub mod reference;
pub mod report;
pub mod run;
pub mod selftest;

pub use tridax_core as core;
