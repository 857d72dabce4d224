//! Harness configuration file.
//!
//! TOML with one section per knob group; every key is optional and
//! defaults to the built-in value, so an empty file (or no file) runs the
//! standard setup:
//!
//! ```toml
//! [view]
//! view_distance = 115.0
//! fov_deg = 90.0
//!
//! [agent]
//! decision_time = 1.0
//! move_distance = 50.0
//! speed = 10.0
//! sim_duration = 180.0
//!
//! [novelty]
//! rate = 0.03
//! max = 0.1
//! penalty = 0.1
//!
//! [eval]
//! entropy_regions = 49
//!
//! [fitness]
//! single_weight = 0.1
//! all_weight = 0.5
//! ```

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use wayfarer_core::agent::AgentParams;
use wayfarer_core::eval::{EvalParams, FitnessParams, NoveltyParams};
use wayfarer_core::perception::ViewParams;

/// The `[agent]` section: locomotion and scheduling. The view lives in
/// its own section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentSection {
    pub decision_time: f64,
    pub move_distance: f64,
    pub speed: f64,
    pub sim_duration: f64,
}

impl Default for AgentSection {
    fn default() -> Self {
        let p = AgentParams::default();
        Self {
            decision_time: p.decision_time,
            move_distance: p.move_distance,
            speed: p.speed,
            sim_duration: p.sim_duration,
        }
    }
}

/// The `[eval]` section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSection {
    pub entropy_regions: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            entropy_regions: EvalParams::default().entropy_regions,
        }
    }
}

/// Everything the evaluate and report commands can be tuned with.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub view: ViewParams,
    pub agent: AgentSection,
    pub novelty: NoveltyParams,
    pub eval: EvalSection,
    pub fitness: FitnessParams,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn agent_params(&self) -> AgentParams {
        AgentParams {
            view: self.view,
            decision_time: self.agent.decision_time,
            move_distance: self.agent.move_distance,
            speed: self.agent.speed,
            sim_duration: self.agent.sim_duration,
        }
    }

    pub fn eval_params(&self) -> EvalParams {
        EvalParams {
            novelty: self.novelty,
            entropy_regions: self.eval.entropy_regions,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default_setup() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.agent_params(), AgentParams::default());
        assert_eq!(cfg.eval_params(), EvalParams::default());
        assert_eq!(cfg.fitness, FitnessParams::default());
    }

    #[test]
    fn sections_override_independently() {
        let cfg: RunConfig = toml::from_str(
            "[agent]\nsim_duration = 30.0\n\n[view]\nfov_deg = 120.0\n\n[novelty]\nrate = 0.05\n",
        )
        .unwrap();
        assert_eq!(cfg.agent.sim_duration, 30.0);
        assert_eq!(cfg.agent.speed, AgentSection::default().speed);
        assert_eq!(cfg.view.fov_deg, 120.0);
        assert_eq!(cfg.eval_params().novelty.rate, 0.05);
    }

    #[test]
    fn doc_comment_example_parses_to_defaults() {
        // Keep the module example in sync with the real defaults.
        let example = "
[view]
view_distance = 115.0
fov_deg = 90.0

[agent]
decision_time = 1.0
move_distance = 50.0
speed = 10.0
sim_duration = 180.0

[novelty]
rate = 0.03
max = 0.1
penalty = 0.1

[eval]
entropy_regions = 49

[fitness]
single_weight = 0.1
all_weight = 0.5
";
        let cfg: RunConfig = toml::from_str(example).unwrap();
        assert_eq!(cfg, RunConfig::default());
    }
}
