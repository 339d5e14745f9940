//! Scenario-driven checks over the `critvol` core library.

pub mod commands;
pub mod config;
pub mod directions;
pub mod report;
