//! Slot-based flooding over an assigned multi-radio network.
//!
//! In every slot each informed SU transmits once per data radio, to the
//! lowest-id uninformed neighbor that has the radio's channel tuned. A
//! transmission fails when the PU of that channel is active in the slot;
//! PU activity is drawn independently per slot and channel. Shortcut
//! originators additionally carry one shortcut transmission per slot on
//! their reserved radio, in either direction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::{realized_shortcuts, Assignment, ChannelTiming};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::shortcuts::ShortcutPlan;
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub source: usize,
    /// Slot length in seconds; only used to convert latencies.
    pub slot_length: f64,
    pub max_slots: u32,
    /// Per-channel probability that the PU is active in a slot.
    pub pu_busy_prob: Vec<f64>,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self, t: &Topology) -> Result<()> {
        if self.source >= t.su_count() {
            return Err(Error::param(format!("source {} is not an SU", self.source)));
        }
        if self.max_slots == 0 {
            return Err(Error::param("max_slots must be at least 1"));
        }
        if self.pu_busy_prob.len() != t.n_channels {
            return Err(Error::param("one busy probability per channel is required"));
        }
        if self.pu_busy_prob.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::param("busy probabilities must lie in [0, 1]"));
        }
        if !(self.slot_length > 0.0) {
            return Err(Error::param("slot length must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Slot by which every SU reachable from the source was informed;
    /// `None` if `max_slots` ran out first.
    pub latency_slots: Option<u32>,
    /// Informed SUs over all SUs.
    pub covered_fraction: f64,
    /// SUs reachable from the source over usable links, source included.
    pub reachable: usize,
    pub first_arrival: Vec<Option<u32>>,
}

impl SimResult {
    pub const CSV_HEADER: &'static str = "scenario,seed,shortcuts,latency,covered_fraction";

    pub fn to_csv_row(&self, scenario: &str, seed: u64, shortcuts: usize) -> String {
        let latency = self
            .latency_slots
            .map_or_else(|| "NA".to_string(), |l| l.to_string());
        format!(
            "{scenario},{seed},{shortcuts},{latency},{}",
            self.covered_fraction
        )
    }

    pub fn latency_seconds(&self, slot_length: f64) -> Option<f64> {
        self.latency_slots.map(|l| f64::from(l) * slot_length)
    }
}

/// Links a transmission can ever succeed on: shared data channel (or the
/// shortcut channel) whose PU is not always active.
fn feasible_graph(
    t: &Topology,
    a: &Assignment,
    shortcuts: &[(usize, usize, usize)],
    busy: &[f64],
) -> Graph {
    let g = t.su_graph();
    let mut out = Graph::new(g.node_count());
    for (u, v) in g.edges() {
        let ok = a
            .get(u)
            .data_channels()
            .any(|c| busy[c] < 1.0 && a.get(v).has_data_channel(c));
        if ok {
            out.add_edge(u, v);
        }
    }
    for &(h, x, c) in shortcuts {
        if busy[c] < 1.0 {
            out.add_edge(h, x);
        }
    }
    out
}

pub fn run_dissemination(
    t: &Topology,
    plan: &ShortcutPlan,
    a: &Assignment,
    timings: &[ChannelTiming],
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate(t)?;
    let n = t.su_count();
    if a.nodes.len() != n {
        return Err(Error::param("assignment does not cover every SU"));
    }
    let g = t.su_graph();
    let shortcuts = realized_shortcuts(t, a, timings, plan);
    let reachable = feasible_graph(t, a, &shortcuts, &cfg.pu_busy_prob)
        .bfs(cfg.source)
        .iter()
        .filter(|d| d.is_some())
        .count();

    // Shortcut links grouped by originator, partners ascending.
    let mut by_hub: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(h, x, c) in &shortcuts {
        by_hub[h].push((x, c));
    }
    for l in &mut by_hub {
        l.sort_unstable();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut arrival: Vec<Option<u32>> = vec![None; n];
    arrival[cfg.source] = Some(0);
    let mut informed = 1;
    let mut busy = vec![false; t.n_channels];
    let mut latency = (informed == reachable).then_some(0);

    let mut slot = 0;
    while latency.is_none() && slot < cfg.max_slots {
        slot += 1;
        for (b, &p) in busy.iter_mut().zip(&cfg.pu_busy_prob) {
            *b = rng.random::<f64>() < p;
        }
        let before = |arr: &[Option<u32>], u: usize| arr[u].is_some_and(|s| s < slot);

        for u in 0..n {
            if !before(&arrival, u) {
                continue;
            }
            for c in a.get(u).data_channels() {
                if busy[c] {
                    continue;
                }
                let target = g
                    .neighbors(u)
                    .iter()
                    .copied()
                    .find(|&v| arrival[v].is_none() && a.get(v).has_data_channel(c));
                if let Some(v) = target {
                    arrival[v] = Some(slot);
                    informed += 1;
                }
            }
        }

        for h in 0..n {
            let links = &by_hub[h];
            if links.is_empty() {
                continue;
            }
            if before(&arrival, h) {
                let target = links
                    .iter()
                    .find(|&&(x, c)| arrival[x].is_none() && !busy[c]);
                if let Some(&(x, _)) = target {
                    arrival[x] = Some(slot);
                    informed += 1;
                }
            } else if arrival[h].is_none()
                && links.iter().any(|&(x, c)| before(&arrival, x) && !busy[c])
            {
                arrival[h] = Some(slot);
                informed += 1;
            }
        }

        if informed >= reachable {
            latency = Some(slot);
        }
    }

    Ok(SimResult {
        latency_slots: latency,
        covered_fraction: informed as f64 / n as f64,
        reachable,
        first_arrival: arrival,
    })
}

/// `latency(with) / latency(without)`.
pub fn latency_ratio(with_plan: &SimResult, without_plan: &SimResult) -> Result<f64> {
    match (with_plan.latency_slots, without_plan.latency_slots) {
        (Some(0), Some(0)) => Ok(1.0),
        (Some(w), Some(o)) if o > 0 => Ok(f64::from(w) / f64::from(o)),
        (Some(_), Some(_)) => Err(Error::Incomparable(
            "baseline latency is zero but the other is not".into(),
        )),
        _ => Err(Error::Incomparable("a latency is undefined".into())),
    }
}
