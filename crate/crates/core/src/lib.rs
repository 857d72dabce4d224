//! Wayfarer: procedural tile levels, exploratory agents, and exploration
//! scoring, all headless and deterministic.
//!
//! The pipeline has three stages:
//!
//! 1. [`wfcgen`] assembles 7x7 tile grids with wave function collapse from a
//!    35-tile set under one of two weight presets.
//! 2. [`world`] turns a grid into a walkable level (heightfield, objects,
//!    nav grid) and [`agent`] runs motivation-driven explorers through it,
//!    producing trace logs.
//! 3. [`eval`] scores each trace (coverage, entropy, inspection, novelty,
//!    motivation) and folds the per-configuration scores into a single
//!    gated fitness value per level.
//!
//! Everything downstream of a seed is reproducible: the same seed yields
//! byte-identical traces and reports on any platform.

pub mod agent;
pub mod eval;
pub mod geom;
pub mod metrics;
pub mod perception;
pub mod rng;
pub mod wfcgen;
pub mod world;
