//! JSON experiment configuration: schema, parsing, and validation.
//!
//! The config is a single JSON document with a `model` section, per-channel
//! initial conditions, and optional run settings. Unknown keys are rejected.
//! Fading is given either explicitly as `{"p": .., "r": ..}` or as a memory
//! parameter `{"delta": ..}`, which expands symmetrically to
//! `p = (1+delta)/2`, `r = (1-delta)/2`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use specsched::{
    Belief, ChannelState, FadingParams, ModelConfig, ObservationMode, OccupancyParams,
    OccupancyState, PolicyKind, SystemState,
};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub initial_channels: Vec<ChannelInit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub channels: usize,
    pub minislots: u32,
    pub beta: f64,
    pub horizon: u32,
    pub fading: FadingSection,
    pub occupancy: OccupancySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FadingSection {
    Explicit(ExplicitFading),
    Delta(DeltaFading),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitFading {
    pub p: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaFading {
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccupancySection {
    pub u: u32,
    pub c_idle: f64,
    pub c_busy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelInit {
    pub phase: PhaseChoice,
    pub age: u64,
    pub belief: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PhaseChoice {
    Idle,
    Busy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolicyChoice {
    Optimal,
    Greedy,
    Random,
}

impl PolicyChoice {
    pub fn kind(self) -> PolicyKind {
        match self {
            PolicyChoice::Optimal => PolicyKind::Optimal,
            PolicyChoice::Greedy => PolicyKind::Greedy,
            PolicyChoice::Random => PolicyKind::Randomized,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyChoice::Optimal => "optimal",
            PolicyChoice::Greedy => "greedy",
            PolicyChoice::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Original,
    Genie,
}

impl ModeChoice {
    pub fn mode(self) -> ObservationMode {
        match self {
            ModeChoice::Original => ObservationMode::Original,
            ModeChoice::Genie => ObservationMode::Genie,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeChoice::Original => "original",
            ModeChoice::Genie => "genie",
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Validates every field and constructs the model and initial state.
    pub fn build(&self) -> Result<(ModelConfig, SystemState), CliError> {
        let fading = match &self.model.fading {
            FadingSection::Explicit(f) => FadingParams::new(f.p, f.r)
                .map_err(|e| CliError::Config(format!("model.fading: {e}")))?,
            FadingSection::Delta(d) => FadingParams::from_delta(d.delta).map_err(|_| {
                CliError::Config(format!(
                    "model.fading.delta: {} must lie in [0, 1) so that 0 < r <= p < 1",
                    d.delta
                ))
            })?,
        };
        let occupancy =
            OccupancyParams::new(self.model.occupancy.u, self.model.occupancy.c_idle, self.model.occupancy.c_busy)
                .map_err(|e| CliError::Config(format!("model.occupancy: {e}")))?;
        let model = ModelConfig::new(
            self.model.channels,
            self.model.minislots,
            self.model.beta,
            self.model.horizon,
            fading,
            occupancy,
        )
        .map_err(|e| CliError::Config(format!("model: {e}")))?;

        if self.initial_channels.len() != model.n_channels {
            return Err(CliError::Config(format!(
                "initial_channels: expected {} entries to match model.channels, got {}",
                model.n_channels,
                self.initial_channels.len()
            )));
        }
        let channels = self
            .initial_channels
            .iter()
            .enumerate()
            .map(|(i, ch)| {
                if !(ch.belief.is_finite() && 0.0 < ch.belief && ch.belief < 1.0) {
                    return Err(CliError::Config(format!(
                        "initial_channels[{i}].belief: {} must lie strictly inside (0, 1)",
                        ch.belief
                    )));
                }
                let belief = Belief::anchor(ch.belief)
                    .map_err(|e| CliError::Config(format!("initial_channels[{i}].belief: {e}")))?;
                let occupancy = match ch.phase {
                    PhaseChoice::Idle => OccupancyState::idle(ch.age),
                    PhaseChoice::Busy => OccupancyState::busy(ch.age),
                };
                Ok(ChannelState { occupancy, belief })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let initial = SystemState::new(channels, model.horizon)
            .map_err(|e| CliError::Config(format!("initial_channels: {e}")))?;
        Ok((model, initial))
    }
}
