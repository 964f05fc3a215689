//! Capacity of the secondary network.
//!
//! A transmission between neighbors `A` and `B` silences both endpoints'
//! links and part of the links among their neighbors. Averaging that
//! consumption over a network with mean degree `k`, clustering `C(G)` and
//! mean connectivity `p_avg` gives the number of nodes `k_0` a transmission
//! consumes, the per-node capacity `T' = T_0 / k_0`, and finally
//!
//! ```text
//! Capa   = M · T' · F · (1 - τ/T_s) · [(1 - P_f) P(H0) + (1 - P_d) P(H1)]
//! Capa_e = Capa / L(G)
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Partial-consumption ratios for links among the endpoints' neighbors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsumptionParams {
    pub gamma: f64,
    pub beta: f64,
}

impl Default for ConsumptionParams {
    fn default() -> Self {
        ConsumptionParams {
            gamma: 0.5,
            beta: 0.5,
        }
    }
}

impl ConsumptionParams {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        let p = ConsumptionParams { gamma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_prob("gamma", self.gamma)?;
        check_prob("beta", self.beta)
    }
}

/// Sensing, detection and scale parameters. Rates are in Mbps and times in
/// seconds, but only ratios of like quantities enter the result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityParams {
    /// Per-node available capacity `T_0`.
    pub t0: f64,
    /// Sensing time `τ`.
    pub tau: f64,
    /// Slot length `T_s`.
    pub t_slot: f64,
    pub p_f: f64,
    pub p_d: f64,
    pub p_h0: f64,
    /// Derived as `1 - p_h0` when absent.
    pub p_h1: Option<f64>,
    pub factor_f: f64,
    /// Number of SUs `M`.
    pub m: usize,
}

impl Default for CapacityParams {
    fn default() -> Self {
        CapacityParams {
            t0: 2.0,
            tau: 0.010,
            t_slot: 0.100,
            p_f: 0.2,
            p_d: 0.9,
            p_h0: 0.5,
            p_h1: None,
            factor_f: 4.0,
            m: 100,
        }
    }
}

impl CapacityParams {
    pub fn p_h1(&self) -> f64 {
        self.p_h1.unwrap_or(1.0 - self.p_h0)
    }

    pub fn validate(&self) -> Result<()> {
        check_prob("p_f", self.p_f)?;
        check_prob("p_d", self.p_d)?;
        check_prob("p_h0", self.p_h0)?;
        check_prob("p_h1", self.p_h1())?;
        if (self.p_h0 + self.p_h1() - 1.0).abs() > 1e-12 {
            return Err(Error::param("p_h0 + p_h1 must equal 1"));
        }
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::param(format!("t0 {} must be positive", self.t0)));
        }
        if !(self.t_slot > 0.0 && self.t_slot.is_finite()) {
            return Err(Error::param(format!(
                "slot length {} must be positive",
                self.t_slot
            )));
        }
        if !(self.tau >= 0.0 && self.tau <= self.t_slot) {
            return Err(Error::param(format!(
                "sensing time {} must lie in [0, {}]",
                self.tau, self.t_slot
            )));
        }
        if !(self.factor_f > 0.0 && self.factor_f.is_finite()) {
            return Err(Error::param(format!(
                "factor F {} must be positive",
                self.factor_f
            )));
        }
        Ok(())
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} = {p} is not a probability")))
    }
}

/// Links consumed by one `A - B` transmission.
///
/// `f = 2k_A + 2k_B - 2 + β C_B k_B (k_B - 1)(1 - 1/k_B) + γ C_A k_A (k_A - 1)(1 - 1/k_A)`
pub fn consumed_links(
    k_a: f64,
    k_b: f64,
    c_a: f64,
    c_b: f64,
    cp: &ConsumptionParams,
) -> Result<f64> {
    cp.validate()?;
    if !(k_a >= 1.0 && k_b >= 1.0) {
        return Err(Error::param("degrees must be at least 1"));
    }
    check_prob("clustering", c_a)?;
    check_prob("clustering", c_b)?;
    let partial = |c: f64, k: f64| c * k * (k - 1.0) * (1.0 - 1.0 / k);
    Ok(2.0 * k_a + 2.0 * k_b - 2.0 + cp.beta * partial(c_b, k_b) + cp.gamma * partial(c_a, k_a))
}

/// Mean number of nodes consumed per transmission:
/// `k_0 = p_avg [(4 - 2/k) + C(G)(k - 1)(1 - 1/k)]`.
pub fn consumed_nodes_avg(k: f64, c_g: f64, p_avg: f64) -> Result<f64> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::param(format!("mean degree {k} must be at least 1")));
    }
    check_prob("clustering", c_g)?;
    check_prob("p_avg", p_avg)?;
    Ok(p_avg * ((4.0 - 2.0 / k) + c_g * (k - 1.0) * (1.0 - 1.0 / k)))
}

/// `T' = T_0 / k_0`.
pub fn effective_per_node_capacity(t0: f64, k: f64, c_g: f64, p_avg: f64) -> Result<f64> {
    let k0 = consumed_nodes_avg(k, c_g, p_avg)?;
    if k0 <= 0.0 {
        return Err(Error::param(
            "no nodes consumed (p_avg = 0); per-node capacity undefined",
        ));
    }
    Ok(t0 / k0)
}

/// Fraction of a slot that carries SU data after sensing and detection
/// errors.
pub fn sensing_factor(p: &CapacityParams) -> Result<f64> {
    p.validate()?;
    let usable = 1.0 - p.tau / p.t_slot;
    Ok(usable * ((1.0 - p.p_f) * p.p_h0 + (1.0 - p.p_d) * p.p_h1()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    pub m: usize,
    pub k: f64,
    pub c_g: f64,
    pub l_g: f64,
    pub p_avg: f64,
    pub factor_f: f64,
    pub tau: f64,
    pub t_slot: f64,
    pub p_f: f64,
    pub p_d: f64,
    pub p_h0: f64,
    /// Links consumed by a transmission between two average nodes.
    pub consumed_links_f: f64,
    pub consumed_nodes_k0: f64,
    pub t_prime: f64,
    pub capa: f64,
    pub capa_e: f64,
    /// `M T_0 / (k_0 L(G))`, reported for reference only.
    pub throughput_ratio: f64,
}

impl CapacityReport {
    pub const CSV_HEADER: &'static str =
        "m,k,cg,lg,pavg,f_factor,tau,ts,pf,pd,ph0,t_prime,capa,capa_e";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.m,
            self.k,
            self.c_g,
            self.l_g,
            self.p_avg,
            self.factor_f,
            self.tau,
            self.t_slot,
            self.p_f,
            self.p_d,
            self.p_h0,
            self.t_prime,
            self.capa,
            self.capa_e
        )
    }
}

/// Network and effective capacity for measured (or nominal) graph metrics.
pub fn network_capacity(
    p: &CapacityParams,
    k: f64,
    c_g: f64,
    l_g: f64,
    p_avg: f64,
) -> Result<CapacityReport> {
    let sf = sensing_factor(p)?;
    if !(l_g >= 1.0 && l_g.is_finite()) {
        return Err(Error::param(format!(
            "average path length {l_g} must be at least 1"
        )));
    }
    let k0 = consumed_nodes_avg(k, c_g, p_avg)?;
    let t_prime = effective_per_node_capacity(p.t0, k, c_g, p_avg)?;
    let cp = ConsumptionParams::default();
    let capa = p.m as f64 * t_prime * p.factor_f * sf;
    Ok(CapacityReport {
        m: p.m,
        k,
        c_g,
        l_g,
        p_avg,
        factor_f: p.factor_f,
        tau: p.tau,
        t_slot: p.t_slot,
        p_f: p.p_f,
        p_d: p.p_d,
        p_h0: p.p_h0,
        consumed_links_f: consumed_links(k, k, c_g, c_g, &cp)?,
        consumed_nodes_k0: k0,
        t_prime,
        capa,
        capa_e: capa / l_g,
        throughput_ratio: p.m as f64 * p.t0 / (k0 * l_g),
    })
}

/// How the multi-radio enhancement factor `F` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactorPolicy {
    /// `F = min(R, N)`: parallel transmissions are bounded by both radios
    /// and channels.
    #[default]
    MinRadiosChannels,
    /// `F = sqrt(R · N_base / N)`: ratio of the multi-channel scaling bound
    /// to a baseline with `N_base` channels.
    ScalingRatio { base_channels: usize },
}

impl fmt::Display for FactorPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorPolicy::MinRadiosChannels => f.write_str("min"),
            FactorPolicy::ScalingRatio { base_channels: 1 } => f.write_str("scaling-ratio"),
            FactorPolicy::ScalingRatio { base_channels } => {
                write!(f, "scaling-ratio:{base_channels}")
            }
        }
    }
}

impl FromStr for FactorPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(FactorPolicy::MinRadiosChannels),
            "scaling-ratio" => Ok(FactorPolicy::ScalingRatio { base_channels: 1 }),
            _ => {
                let base = s
                    .strip_prefix("scaling-ratio:")
                    .and_then(|b| b.parse().ok())
                    .filter(|&b: &usize| b >= 1)
                    .ok_or_else(|| Error::param(format!("unknown factor policy {s}")))?;
                Ok(FactorPolicy::ScalingRatio {
                    base_channels: base,
                })
            }
        }
    }
}

pub fn mrmc_factor(radios: usize, channels: usize, policy: FactorPolicy) -> Result<f64> {
    if radios == 0 || channels == 0 {
        return Err(Error::param("radios and channels must be at least 1"));
    }
    Ok(match policy {
        FactorPolicy::MinRadiosChannels => radios.min(channels) as f64,
        FactorPolicy::ScalingRatio { base_channels } => {
            ((radios * base_channels) as f64 / channels as f64).sqrt()
        }
    })
}
