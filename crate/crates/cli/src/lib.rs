//! File formats, reports and the `fdgame` command line.

pub mod app;
pub mod format;
pub mod report;

pub use app::run;
