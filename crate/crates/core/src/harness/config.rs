//! Experiment configuration, read from TOML.
//!
//! ```toml
//! scenario = "capacity_vs_shortcuts"
//! schemes = ["WithoutSW", "RS+Random", "NSC+Random", "NSC+CA"]
//! seeds = 20
//!
//! [network]
//! channel_availability = 0.8
//!
//! [model]
//! factor_policy = "min"
//! ```
//!
//! Every field has a default; see the README for the full schema.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::capacity::{CapacityParams, FactorPolicy};
use crate::error::{Error, Result};
use crate::topology::DeploymentParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    LatencyVsShortcuts,
    AplVsShortcuts,
    CapacityVsSensing,
    CapacityVsShortcuts,
    CapacityVsAvailability,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::LatencyVsShortcuts,
        Scenario::AplVsShortcuts,
        Scenario::CapacityVsSensing,
        Scenario::CapacityVsShortcuts,
        Scenario::CapacityVsAvailability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::LatencyVsShortcuts => "latency_vs_shortcuts",
            Scenario::AplVsShortcuts => "apl_vs_shortcuts",
            Scenario::CapacityVsSensing => "capacity_vs_sensing",
            Scenario::CapacityVsShortcuts => "capacity_vs_shortcuts",
            Scenario::CapacityVsAvailability => "capacity_vs_availability",
        }
    }

    /// Name of the swept quantity.
    pub fn axis(self) -> &'static str {
        match self {
            Scenario::CapacityVsSensing => "sensing_ms",
            Scenario::CapacityVsAvailability => "availability",
            _ => "shortcuts",
        }
    }

    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            Scenario::CapacityVsSensing => (1..=10).map(|i| 2.0 * i as f64).collect(),
            Scenario::CapacityVsAvailability => (2..=10).map(|i| i as f64 / 10.0).collect(),
            _ => (0..=10).map(|i| 5.0 * i as f64).collect(),
        }
    }

    /// Shortcut budget when shortcuts are not the swept quantity.
    pub fn default_shortcuts(self) -> usize {
        match self {
            Scenario::CapacityVsSensing => 10,
            _ => 30,
        }
    }

    pub fn needs_dissemination(self) -> bool {
        self == Scenario::LatencyVsShortcuts
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s}")))
    }
}

/// A shortcut method paired with a channel-assignment policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "WithoutSW")]
    WithoutSw,
    #[serde(rename = "RS+Random")]
    RsRandom,
    #[serde(rename = "NSC+Random")]
    NscRandom,
    #[serde(rename = "NSC+CA")]
    NscCa,
    #[serde(rename = "WIDE")]
    Wide,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::WithoutSw,
        Scheme::RsRandom,
        Scheme::NscRandom,
        Scheme::NscCa,
        Scheme::Wide,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::WithoutSw => "WithoutSW",
            Scheme::RsRandom => "RS+Random",
            Scheme::NscRandom => "NSC+Random",
            Scheme::NscCa => "NSC+CA",
            Scheme::Wide => "WIDE",
        }
    }

    /// Shortcut builder used, or `none`.
    pub fn plan_name(self) -> &'static str {
        match self {
            Scheme::WithoutSw => "none",
            Scheme::RsRandom => "RS",
            Scheme::NscRandom | Scheme::NscCa => "NSC",
            Scheme::Wide => "WIDE",
        }
    }

    /// Channel assignment used: `random` or `ca` (slack-ordered).
    pub fn assignment_name(self) -> &'static str {
        match self {
            Scheme::WithoutSw | Scheme::RsRandom | Scheme::NscRandom => "random",
            Scheme::NscCa | Scheme::Wide => "ca",
        }
    }

    /// File-name friendly form.
    pub fn slug(self) -> &'static str {
        match self {
            Scheme::WithoutSw => "without_sw",
            Scheme::RsRandom => "rs_random",
            Scheme::NscRandom => "nsc_random",
            Scheme::NscCa => "nsc_ca",
            Scheme::Wide => "wide",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown scheme {s}")))
    }
}

/// The standard simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    pub channels: usize,
    pub radios: usize,
    pub pus: usize,
    pub sus: usize,
    pub pu_range_m: f64,
    pub su_range_m: f64,
    pub area_m: f64,
    pub t0_mbps: f64,
    pub mean_degree: f64,
    pub clustering: f64,
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub alpha_deg: f64,
    pub p_d: f64,
    pub p_f: f64,
    pub p_h0: f64,
    pub slot_ms: f64,
    pub sensing_ms: f64,
    pub packet_bytes: usize,
    pub channel_availability: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            channels: 12,
            radios: 4,
            pus: 12,
            sus: 100,
            pu_range_m: 100.0,
            su_range_m: 50.0,
            area_m: 1000.0,
            t0_mbps: 2.0,
            mean_degree: 4.0,
            clustering: 0.4,
            lambda_p: 0.2,
            lambda_s: 0.5,
            alpha_deg: 30.0,
            p_d: 0.9,
            p_f: 0.2,
            p_h0: 0.5,
            slot_ms: 100.0,
            sensing_ms: 10.0,
            packet_bytes: 512,
            channel_availability: 0.8,
        }
    }
}

/// Knobs that are not part of the standard parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Shortcut budget for scenarios that do not sweep it.
    pub shortcuts: Option<usize>,
    pub gamma: f64,
    pub beta: f64,
    /// `min` or `scaling-ratio[:<base channels>]`.
    pub factor_policy: String,
    /// Per-channel data rate `W` in Mbps.
    pub data_rate_mbps: f64,
    /// SU queue capacity `K`; defaults to `max(sus, channels)`.
    pub k_capacity: Option<usize>,
    /// Destination SU of the search region; defaults to the SU nearest the
    /// area center. Also the flooding source.
    pub destination: Option<usize>,
    pub max_slots: u32,
    pub dissemination: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            shortcuts: None,
            gamma: 0.5,
            beta: 0.5,
            factor_policy: "min".into(),
            data_rate_mbps: 2.0,
            k_capacity: None,
            destination: None,
            max_slots: 10_000,
            dissemination: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_seeds")]
    pub seeds: u32,
    #[serde(default)]
    pub seed_offset: u64,
    /// Values of the scenario's axis; defaults to the scenario axis.
    #[serde(default)]
    pub sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub network: NetworkParams,
    #[serde(default)]
    pub model: ModelParams,
}

fn all_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

fn default_seeds() -> u32 {
    20
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        ExperimentConfig {
            scenario,
            schemes: all_schemes(),
            seeds: default_seeds(),
            seed_offset: 0,
            sweep: None,
            network: NetworkParams::default(),
            model: ModelParams::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Sweep values, falling back to the scenario's default axis.
    pub fn sweep_values(&self) -> Vec<f64> {
        self.sweep
            .clone()
            .unwrap_or_else(|| self.scenario.default_sweep())
    }

    pub fn shortcut_budget(&self) -> usize {
        self.model
            .shortcuts
            .unwrap_or_else(|| self.scenario.default_shortcuts())
    }

    pub fn factor_policy(&self) -> Result<FactorPolicy> {
        self.model
            .factor_policy
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))
    }

    /// Fills every defaulted field in, so that two configs describing the
    /// same experiment serialize identically.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.sweep = Some(self.sweep_values());
        c.model.shortcuts = Some(self.shortcut_budget());
        c.model.k_capacity = Some(self.k_capacity());
        c
    }

    pub fn k_capacity(&self) -> usize {
        self.model
            .k_capacity
            .unwrap_or(self.network.sus.max(self.network.channels))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 over the canonical serialization of the resolved config.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.resolved().to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let t = &self.network;
        if self.seeds == 0 {
            return bad("seeds must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required".into());
        }
        let mut seen = self.schemes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.schemes.len() {
            return bad("schemes must not repeat".into());
        }
        let sweep = self.sweep_values();
        if sweep.is_empty() {
            return bad("sweep must not be empty".into());
        }
        for &x in &sweep {
            let ok = match self.scenario {
                Scenario::CapacityVsSensing => (0.0..=t.slot_ms).contains(&x),
                Scenario::CapacityVsAvailability => (0.0..=1.0).contains(&x),
                _ => x >= 0.0 && x.fract() == 0.0,
            };
            if !ok {
                return bad(format!("sweep value {x} is invalid for {}", self.scenario));
            }
        }
        if self.scenario.needs_dissemination() && !self.model.dissemination {
            return bad(format!("{} requires dissemination", self.scenario));
        }
        if t.sus < 2 || t.channels == 0 || t.radios == 0 {
            return bad("need at least two SUs, one channel and one radio".into());
        }
        let shortcuts_used = self.scenario == Scenario::LatencyVsShortcuts
            || self.schemes.iter().any(|s| *s != Scheme::WithoutSw);
        if shortcuts_used && t.radios < 2 {
            return bad("shortcut schemes need at least two radios per SU".into());
        }
        if !(t.area_m > 0.0 && t.su_range_m > 0.0 && t.pu_range_m > 0.0) {
            return bad("area and ranges must be positive".into());
        }
        if !(t.mean_degree > 0.0) || !(0.0..=1.0).contains(&t.clustering) {
            return bad("mean degree must be positive and clustering a probability".into());
        }
        if !(0.0..=1.0).contains(&t.channel_availability) {
            return bad("channel availability must lie in [0, 1]".into());
        }
        if !(t.alpha_deg > 0.0 && t.alpha_deg < 180.0) {
            return bad("alpha must lie in (0, 180)".into());
        }
        if t.lambda_p < 0.0 || t.lambda_s < 0.0 || t.lambda_p >= 1.0 {
            return bad("arrival rates must be non-negative and lambda_p below 1".into());
        }
        if t.packet_bytes == 0 || !(self.model.data_rate_mbps > 0.0) {
            return bad("packet size and data rate must be positive".into());
        }
        if self.model.max_slots == 0 {
            return bad("max_slots must be at least 1".into());
        }
        if self.k_capacity() < t.channels {
            return bad("k_capacity must be at least the channel count".into());
        }
        if let Some(d) = self.model.destination {
            if d >= t.sus {
                return bad(format!("destination {d} is not an SU"));
            }
        }
        self.factor_policy()?;
        self.capacity_params(t.sensing_ms)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        crate::capacity::ConsumptionParams::new(self.model.gamma, self.model.beta)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn deployment(&self, availability: f64) -> DeploymentParams {
        let t = &self.network;
        DeploymentParams {
            m_su: t.sus,
            n_pu: t.pus,
            area: (t.area_m, t.area_m),
            su_range: t.su_range_m,
            pu_range: t.pu_range_m,
            radios: t.radios,
            n_channels: t.channels,
            channel_availability: availability,
            target_mean_degree: Some(t.mean_degree),
        }
    }

    /// Capacity parameters at sensing time `sensing_ms`, with `F` left at
    /// 1 until the policy is applied.
    pub fn capacity_params(&self, sensing_ms: f64) -> CapacityParams {
        let t = &self.network;
        CapacityParams {
            t0: t.t0_mbps,
            tau: sensing_ms / 1000.0,
            t_slot: t.slot_ms / 1000.0,
            p_f: t.p_f,
            p_d: t.p_d,
            p_h0: t.p_h0,
            p_h1: None,
            factor_f: 1.0,
            m: t.sus,
        }
    }
}
