//! Experiment drivers, timing and CSV/JSON reporting for the `bmh` CLI.

pub mod experiments;
pub mod report;
pub mod sketches;
pub mod timing;
