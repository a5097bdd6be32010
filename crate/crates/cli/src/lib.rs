//! Library surface behind the `pcnls` binary: configuration parsing,
//! the preset catalog, experiment runners, and artifact writing.

pub mod config;
pub mod experiments;
pub mod output;
pub mod parallel;
pub mod presets;
