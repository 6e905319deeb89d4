//! Reporting shared by the `prbatl` binary and its tests.

pub mod report;
