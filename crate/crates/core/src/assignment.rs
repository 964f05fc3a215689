//! Radio-to-channel assignment.
//!
//! [`assign_channels`] ranks a node's candidate channels by slack
//! `Δ = T_v - T_r` (available time minus transmission time), drops channels
//! with negative slack and tunes radios to the smallest-slack channels
//! first. Shortcut originators reserve one radio for their shortcut before
//! the data radios are filled. [`assign_random`] is the uniform baseline.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::shortcuts::ShortcutPlan;
use crate::sop::QueueParams;
use crate::topology::Topology;

/// Available time, transmission time and slack of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTiming {
    pub channel: usize,
    /// `f64::INFINITY` for a channel without PU traffic.
    pub t_v: f64,
    pub t_r: f64,
    pub delta: f64,
}

impl ChannelTiming {
    pub fn new(channel: usize, t_v: f64, t_r: f64) -> Result<Self> {
        if !(t_r > 0.0 && t_r.is_finite()) || t_v.is_nan() || t_v < 0.0 {
            return Err(Error::param(format!("invalid timing t_v={t_v} t_r={t_r}")));
        }
        Ok(ChannelTiming {
            channel,
            t_v,
            t_r,
            delta: t_v - t_r,
        })
    }
}

/// `T_v = 1 / λ_p` (mean PU inter-arrival time), `T_r = packet_bits / w`.
pub fn estimate_timing(
    channel: usize,
    q: &QueueParams,
    packet_bits: f64,
    w: f64,
) -> Result<ChannelTiming> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::param(format!("data rate {w} must be positive")));
    }
    if !(packet_bits > 0.0 && packet_bits.is_finite()) {
        return Err(Error::param(format!(
            "packet size {packet_bits} must be positive"
        )));
    }
    let t_v = if q.lambda_p > 0.0 {
        1.0 / q.lambda_p
    } else {
        f64::INFINITY
    };
    ChannelTiming::new(channel, t_v, packet_bits / w)
}

/// Timing for every channel of a model, indexed by channel.
pub fn estimate_timings(
    channels: &[QueueParams],
    packet_bits: f64,
    w: f64,
) -> Result<Vec<ChannelTiming>> {
    channels
        .iter()
        .enumerate()
        .map(|(k, q)| estimate_timing(k, q, packet_bits, w))
        .collect()
}

/// Radios of one node and the channels they are tuned to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeAssignment {
    pub radios: usize,
    /// `(radio, channel)` in radio order; unassigned radios are absent.
    pub slots: Vec<(usize, usize)>,
    /// Radio reserved for the node's shortcuts, if any.
    pub shortcut_radio: Option<usize>,
}

impl NodeAssignment {
    pub fn unassigned(radios: usize) -> Self {
        NodeAssignment {
            radios,
            slots: Vec::new(),
            shortcut_radio: None,
        }
    }

    /// Channels on data radios, in radio order.
    pub fn data_channels(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots
            .iter()
            .filter(move |&&(r, _)| Some(r) != self.shortcut_radio)
            .map(|&(_, c)| c)
    }

    pub fn shortcut_channel(&self) -> Option<usize> {
        let r = self.shortcut_radio?;
        self.slots.iter().find(|&&(x, _)| x == r).map(|&(_, c)| c)
    }

    pub fn channels(&self) -> BTreeSet<usize> {
        self.slots.iter().map(|&(_, c)| c).collect()
    }

    pub fn has_data_channel(&self, c: usize) -> bool {
        self.data_channels().any(|x| x == c)
    }

    pub fn unassigned_radios(&self) -> usize {
        self.radios - self.slots.len()
    }
}

/// Per-SU assignments, indexed by SU id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub nodes: Vec<NodeAssignment>,
}

impl Assignment {
    pub fn get(&self, node: usize) -> &NodeAssignment {
        &self.nodes[node]
    }

    /// Lowest-index data channel tuned at both endpoints.
    pub fn shared_data_channel(&self, u: usize, v: usize) -> Option<usize> {
        let cu: BTreeSet<usize> = self.nodes[u].data_channels().collect();
        self.nodes[v]
            .data_channels()
            .filter(|c| cu.contains(c))
            .min()
    }

    /// One `a <node> <radio>:<channel> ... r=<R> [sc=<radio>]` line per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, n) in self.nodes.iter().enumerate() {
            let _ = write!(out, "a {id}");
            for &(r, c) in &n.slots {
                let _ = write!(out, " {r}:{c}");
            }
            let _ = write!(out, " r={}", n.radios);
            if let Some(r) = n.shortcut_radio {
                let _ = write!(out, " sc={r}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lno = i + 1;
            let mut f = line.split_whitespace();
            match f.next() {
                None => continue,
                Some(t) if t.starts_with('#') => continue,
                Some("a") => {}
                Some(t) => return Err(Error::parse(lno, format!("unexpected token `{t}`"))),
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::parse(lno, format!("invalid number `{s}`")))
            };
            let id = num(f
                .next()
                .ok_or_else(|| Error::parse(lno, "missing node id"))?)?;
            if id != nodes.len() {
                return Err(Error::parse(
                    lno,
                    format!("expected node {}, found {id}", nodes.len()),
                ));
            }
            let mut n = NodeAssignment::default();
            let mut radios = None;
            for tok in f {
                if let Some(v) = tok.strip_prefix("r=") {
                    radios = Some(num(v)?);
                } else if let Some(v) = tok.strip_prefix("sc=") {
                    n.shortcut_radio = Some(num(v)?);
                } else {
                    let (r, c) = tok.split_once(':').ok_or_else(|| {
                        Error::parse(lno, format!("expected radio:channel, got `{tok}`"))
                    })?;
                    n.slots.push((num(r)?, num(c)?));
                }
            }
            n.radios = radios.ok_or_else(|| Error::parse(lno, "missing r=<radios>"))?;
            if n.slots.len() > n.radios || n.slots.iter().any(|&(r, _)| r >= n.radios) {
                return Err(Error::parse(lno, "more channels than radios"));
            }
            nodes.push(n);
        }
        Ok(Assignment { nodes })
    }
}

/// Inputs describing one node for the per-node assignment routines.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    pub available: &'a BTreeSet<usize>,
    pub neighbor_sets: &'a [&'a BTreeSet<usize>],
    pub radios: usize,
    /// Available set of the node's first shortcut partner, when the node
    /// originates shortcuts.
    pub shortcut_peer: Option<&'a BTreeSet<usize>>,
}

impl NodeView<'_> {
    /// `Avai ∩ (∪ AvaiN)`.
    fn temp(&self) -> Vec<usize> {
        self.available
            .iter()
            .copied()
            .filter(|c| self.neighbor_sets.iter().any(|s| s.contains(c)))
            .collect()
    }

    fn check(&self) -> Result<()> {
        if self.shortcut_peer.is_some() && self.radios < 2 {
            return Err(Error::param(
                "a shortcut originator needs at least two radios",
            ));
        }
        Ok(())
    }
}

fn usable(timings: &[ChannelTiming], c: usize) -> bool {
    timings.get(c).is_some_and(|t| t.delta >= 0.0)
}

fn by_slack(timings: &[ChannelTiming], cs: &mut [usize]) {
    cs.sort_by(|&a, &b| {
        timings[a]
            .delta
            .total_cmp(&timings[b].delta)
            .then(a.cmp(&b))
    });
}

/// Slack-ordered assignment of one node.
///
/// `Temp = Avai ∩ AvaiN` sorted by `Δ` ascending (ties by channel index),
/// negative-slack channels dropped. A shortcut originator first tunes its
/// last radio to the smallest-slack channel it shares with its partner;
/// the remaining radios then take `Temp` in order. Stops when radios or
/// channels run out.
pub fn assign_channels(view: &NodeView<'_>, timings: &[ChannelTiming]) -> Result<NodeAssignment> {
    view.check()?;
    let mut out = NodeAssignment::unassigned(view.radios);
    let mut free = view.radios;
    let mut reserved = None;
    if let Some(peer) = view.shortcut_peer {
        let mut common: Vec<usize> = view
            .available
            .intersection(peer)
            .copied()
            .filter(|&c| usable(timings, c))
            .collect();
        by_slack(timings, &mut common);
        if let Some(&c) = common.first() {
            free -= 1;
            reserved = Some(c);
        }
    }
    let mut temp: Vec<usize> = view
        .temp()
        .into_iter()
        .filter(|&c| usable(timings, c) && Some(c) != reserved)
        .collect();
    by_slack(timings, &mut temp);
    for (radio, c) in temp.into_iter().take(free).enumerate() {
        out.slots.push((radio, c));
    }
    if let Some(c) = reserved {
        let radio = view.radios - 1;
        out.slots.push((radio, c));
        out.shortcut_radio = Some(radio);
    }
    Ok(out)
}

/// Uniform baseline: distinct channels drawn from `Avai ∩ AvaiN` in random
/// order. A shortcut originator's reserved radio takes the first drawn
/// channel its partner also has.
pub fn assign_random(view: &NodeView<'_>, seed: u64, stream: u64) -> Result<NodeAssignment> {
    view.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut temp = view.temp();
    temp.shuffle(&mut rng);
    let mut out = NodeAssignment::unassigned(view.radios);
    let mut free = view.radios;
    let reserved = view
        .shortcut_peer
        .and_then(|peer| temp.iter().copied().find(|c| peer.contains(c)));
    if reserved.is_some() {
        free -= 1;
    }
    let data = temp
        .iter()
        .copied()
        .filter(|&c| Some(c) != reserved)
        .take(free);
    for (radio, c) in data.enumerate() {
        out.slots.push((radio, c));
    }
    if let Some(c) = reserved {
        let radio = view.radios - 1;
        out.slots.push((radio, c));
        out.shortcut_radio = Some(radio);
    }
    Ok(out)
}

/// Which per-node routine a network-wide assignment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Slack-ordered assignment.
    Slack,
    /// Uniform random assignment with the given seed.
    Random(u64),
}

fn first_partner(t: &Topology, plan: Option<&ShortcutPlan>, node: usize) -> Option<usize> {
    let plan = plan?;
    let mut partners = plan
        .shortcuts
        .iter()
        .filter(|&&(h, _)| h == node)
        .map(|&(_, p)| p);
    // Reserve for the first partner that shares a channel at all.
    let first = partners.clone().next();
    partners
        .find(|&p| !t.common_channels(node, p).is_empty())
        .or(first)
}

fn assign_node(
    t: &Topology,
    node: usize,
    timings: &[ChannelTiming],
    plan: Option<&ShortcutPlan>,
    policy: Policy,
) -> Result<NodeAssignment> {
    let g = t.su_graph();
    let sets: Vec<&BTreeSet<usize>> = g.neighbors(node).iter().map(|&v| t.available(v)).collect();
    let peer = first_partner(t, plan, node);
    let view = NodeView {
        available: t.available(node),
        neighbor_sets: &sets,
        radios: t.node(node).radios,
        shortcut_peer: peer.map(|p| t.available(p)),
    };
    match policy {
        Policy::Slack => assign_channels(&view, timings),
        Policy::Random(seed) => assign_random(&view, seed, node as u64),
    }
}

/// Assigns every SU in id order. Shortcut originators in `plan` reserve a
/// radio.
pub fn assign_network(
    t: &Topology,
    timings: &[ChannelTiming],
    plan: Option<&ShortcutPlan>,
    policy: Policy,
) -> Result<Assignment> {
    if timings.len() != t.n_channels {
        return Err(Error::param("one timing per channel is required"));
    }
    let nodes = (0..t.su_count())
        .map(|i| assign_node(t, i, timings, plan, policy))
        .collect::<Result<_>>()?;
    Ok(Assignment { nodes })
}

/// Reruns the assignment for `affected` nodes only, against the updated
/// availability in `t`. Every other entry is copied unchanged.
pub fn reassign_on_pu_arrival(
    a: &Assignment,
    t: &Topology,
    affected: &[usize],
    timings: &[ChannelTiming],
    plan: Option<&ShortcutPlan>,
    policy: Policy,
) -> Result<Assignment> {
    let mut out = a.clone();
    for &node in affected {
        if node >= out.nodes.len() {
            return Err(Error::param(format!("node {node} is not assigned")));
        }
        out.nodes[node] = assign_node(t, node, timings, plan, policy)?;
    }
    Ok(out)
}

/// Smallest-slack non-negative channel available at both shortcut endpoints.
pub fn shortcut_link_channel(
    t: &Topology,
    timings: &[ChannelTiming],
    u: usize,
    v: usize,
) -> Option<usize> {
    let mut common: Vec<usize> = t
        .common_channels(u, v)
        .into_iter()
        .filter(|&c| usable(timings, c))
        .collect();
    by_slack(timings, &mut common);
    common.first().copied()
}

/// Shortcuts of `plan` that can carry data: the originator holds a reserved
/// radio and both endpoints share a usable channel. Returns
/// `(hub, target, channel)`.
pub fn realized_shortcuts(
    t: &Topology,
    a: &Assignment,
    timings: &[ChannelTiming],
    plan: &ShortcutPlan,
) -> Vec<(usize, usize, usize)> {
    plan.edges()
        .filter(|&(h, _)| a.get(h).shortcut_radio.is_some())
        .filter_map(|(h, x)| shortcut_link_channel(t, timings, h, x).map(|c| (h, x, c)))
        .collect()
}

/// SU links whose endpoints share a tuned data channel plus the realized
/// shortcuts: the graph traffic can actually use.
pub fn realized_graph(
    t: &Topology,
    a: &Assignment,
    timings: &[ChannelTiming],
    plan: Option<&ShortcutPlan>,
) -> Graph {
    let g = t.su_graph();
    let mut out = Graph::from_edges(
        g.node_count(),
        g.edges()
            .filter(|&(u, v)| a.shared_data_channel(u, v).is_some()),
    );
    if let Some(plan) = plan {
        for (h, x, _) in realized_shortcuts(t, a, timings, plan) {
            out.add_edge(h, x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(cs: &[usize]) -> BTreeSet<usize> {
        cs.iter().copied().collect()
    }

    fn timings(deltas: &[f64]) -> Vec<ChannelTiming> {
        deltas
            .iter()
            .enumerate()
            .map(|(k, &d)| ChannelTiming::new(k, d + 1.0, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn timing_examples() {
        let idle = QueueParams::pu_only(0.0, 1.0);
        let t = estimate_timing(0, &idle, 4096.0, 2e6).unwrap();
        assert!(t.t_v.is_infinite() && t.delta > 0.0);

        let q = QueueParams::pu_only(0.2, 0.4);
        let t = estimate_timing(3, &q, 512.0 * 8.0, 2e6).unwrap();
        assert!((t.t_v - 5.0).abs() < 1e-12);
        assert!((t.t_r - 4096.0 / 2e6).abs() < 1e-15);
        assert_eq!(t.delta, t.t_v - t.t_r);
        assert!(t.delta > 0.0);

        let t = estimate_timing(0, &q, 1e9, 1.0).unwrap();
        assert!(t.delta < 0.0);
        assert!(estimate_timing(0, &q, 1.0, 0.0).is_err());
    }

    #[test]
    fn empty_temp_leaves_radios_unassigned() {
        let avai = set(&[0, 1]);
        let n = set(&[2]);
        let view = NodeView {
            available: &avai,
            neighbor_sets: &[&n],
            radios: 3,
            shortcut_peer: None,
        };
        let a = assign_channels(&view, &timings(&[1.0, 1.0, 1.0])).unwrap();
        assert!(a.slots.is_empty());
        assert_eq!(a.unassigned_radios(), 3);
        assert!(assign_random(&view, 1, 0).unwrap().slots.is_empty());
    }

    #[test]
    fn slack_trace() {
        let avai = set(&[0, 1, 2]);
        let view = |r| NodeView {
            available: &avai,
            neighbor_sets: &[],
            radios: r,
            shortcut_peer: None,
        };
        let tm = timings(&[8.0, 1.0, -1.0]);
        let nb = set(&[0, 1, 2]);
        let sets = [&nb];
        let one = NodeView {
            neighbor_sets: &sets,
            ..view(1)
        };
        assert_eq!(assign_channels(&one, &tm).unwrap().slots, vec![(0, 1)]);
        let two = NodeView {
            neighbor_sets: &sets,
            ..view(2)
        };
        assert_eq!(
            assign_channels(&two, &tm).unwrap().slots,
            vec![(0, 1), (1, 0)]
        );
        let three = NodeView {
            neighbor_sets: &sets,
            ..view(3)
        };
        // The negative-slack channel is never used.
        assert_eq!(
            assign_channels(&three, &tm).unwrap().slots,
            vec![(0, 1), (1, 0)]
        );
    }

    #[test]
    fn hub_reserves_shortcut_radio() {
        let avai = set(&[0, 1, 2, 3]);
        let nb = set(&[0, 1, 2, 3]);
        let peer = set(&[2, 3]);
        let sets = [&nb];
        let view = NodeView {
            available: &avai,
            neighbor_sets: &sets,
            radios: 3,
            shortcut_peer: Some(&peer),
        };
        let a = assign_channels(&view, &timings(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(a.slots, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(a.shortcut_radio, Some(2));
        assert_eq!(a.shortcut_channel(), Some(2));
        assert_eq!(a.data_channels().collect::<Vec<_>>(), vec![0, 1]);

        let single = NodeView { radios: 1, ..view };
        assert!(assign_channels(&single, &timings(&[1.0; 4])).is_err());
    }

    #[test]
    fn random_examples() {
        let avai = set(&[0, 1, 2, 3]);
        let nb = set(&[2]);
        let sets = [&nb];
        let view = NodeView {
            available: &avai,
            neighbor_sets: &sets,
            radios: 2,
            shortcut_peer: None,
        };
        assert_eq!(assign_random(&view, 5, 0).unwrap().slots, vec![(0, 2)]);

        let wide = set(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let sets = [&wide];
        let view = NodeView {
            available: &wide,
            neighbor_sets: &sets,
            radios: 3,
            shortcut_peer: None,
        };
        let a = assign_random(&view, 5, 7).unwrap();
        assert_eq!(a, assign_random(&view, 5, 7).unwrap());
        assert_eq!(a.channels().len(), 3);
    }

    #[test]
    fn text_round_trip() {
        let a = Assignment {
            nodes: vec![
                NodeAssignment {
                    radios: 4,
                    slots: vec![(0, 0), (1, 3), (3, 5)],
                    shortcut_radio: Some(3),
                },
                NodeAssignment::unassigned(2),
            ],
        };
        let text = a.to_text();
        assert_eq!(text, "a 0 0:0 1:3 3:5 r=4 sc=3\na 1 r=2\n");
        assert_eq!(Assignment::from_text(&text).unwrap(), a);
        assert!(Assignment::from_text("a 0 0:1\n").is_err());
        assert!(Assignment::from_text("a 0 5:1 r=2\n").is_err());
        assert!(Assignment::from_text("a 1 r=2\n").is_err());
    }
}
