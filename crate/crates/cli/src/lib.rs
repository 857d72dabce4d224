//! Harness around the core simulation crate: level generation batches,
//! agent batteries, fitness reports, and SVG chart rendering. The
//! `wayfarer` binary is a thin wrapper over [`commands`].

pub mod commands;
pub mod config;
pub mod experiment;
pub mod report;
pub mod svg;
