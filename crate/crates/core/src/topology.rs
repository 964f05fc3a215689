//! Random geometric deployments of PUs and SUs.
//!
//! SUs `0..m_su` come first, PUs follow. Only SUs take part in the graph;
//! each PU owns one licensed channel and otherwise acts through the channel
//! occupancy probabilities of [`crate::sop`].

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::shortcuts::ShortcutPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Primary,
    Secondary,
}

impl NodeKind {
    fn tag(self) -> &'static str {
        match self {
            NodeKind::Primary => "PU",
            NodeKind::Secondary => "SU",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub kind: NodeKind,
    pub tx_range: f64,
    pub radios: usize,
    pub available_channels: BTreeSet<usize>,
}

impl Node {
    pub fn distance(&self, other: &Node) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Inputs of [`generate_topology`]. Defaults follow the standard experiment:
/// 100 SUs, 12 PUs, 1000 m square, 50 m / 100 m ranges, 4 radios,
/// 12 channels at availability 0.8, densified to mean degree 4.
#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentParams {
    pub m_su: usize,
    pub n_pu: usize,
    pub area: (f64, f64),
    pub su_range: f64,
    pub pu_range: f64,
    pub radios: usize,
    pub n_channels: usize,
    pub channel_availability: f64,
    /// Rescale the area after placement so the SU graph reaches this mean
    /// degree. `None` keeps the raw geometry.
    pub target_mean_degree: Option<f64>,
}

impl Default for DeploymentParams {
    fn default() -> Self {
        DeploymentParams {
            m_su: 100,
            n_pu: 12,
            area: (1000.0, 1000.0),
            su_range: 50.0,
            pu_range: 100.0,
            radios: 4,
            n_channels: 12,
            channel_availability: 0.8,
            target_mean_degree: Some(4.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub nodes: Vec<Node>,
    su_graph: Graph,
    pub area: (f64, f64),
    pub n_channels: usize,
    pub seed: u64,
}

/// Places nodes uniformly at random and connects SUs within range.
///
/// Node positions are drawn before channel sets, and channel membership is a
/// per-(node, channel) uniform draw, so the same seed at a higher
/// availability yields a superset of every channel set.
pub fn generate_topology(p: &DeploymentParams, seed: u64) -> Result<Topology> {
    if p.m_su == 0 {
        return Err(Error::param("at least one SU is required"));
    }
    if !(p.area.0 > 0.0 && p.area.1 > 0.0) {
        return Err(Error::param("deployment area must be positive"));
    }
    if !(p.su_range > 0.0 && p.pu_range > 0.0) {
        return Err(Error::param("transmission ranges must be positive"));
    }
    if p.radios == 0 || p.n_channels == 0 {
        return Err(Error::param("radios and channels must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p.channel_availability) {
        return Err(Error::param("channel availability must lie in [0, 1]"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = p.area;
    let mut nodes = Vec::with_capacity(p.m_su + p.n_pu);
    for id in 0..p.m_su + p.n_pu {
        let kind = if id < p.m_su {
            NodeKind::Secondary
        } else {
            NodeKind::Primary
        };
        let (tx_range, radios) = match kind {
            NodeKind::Secondary => (p.su_range, p.radios),
            NodeKind::Primary => (p.pu_range, 1),
        };
        nodes.push(Node {
            id,
            x: rng.random::<f64>() * w,
            y: rng.random::<f64>() * h,
            kind,
            tx_range,
            radios,
            available_channels: BTreeSet::new(),
        });
    }
    for node in nodes.iter_mut().take(p.m_su) {
        for ch in 0..p.n_channels {
            if rng.random::<f64>() < p.channel_availability {
                node.available_channels.insert(ch);
            }
        }
    }
    for (i, node) in nodes.iter_mut().skip(p.m_su).enumerate() {
        node.available_channels.insert(i % p.n_channels);
    }

    let mut area = p.area;
    if let Some(target) = p.target_mean_degree {
        if let Some(scale) = densify_scale(&nodes[..p.m_su], p.su_range, target)? {
            for n in &mut nodes {
                n.x *= scale;
                n.y *= scale;
            }
            area = (w * scale, h * scale);
        }
    }

    let mut su_graph = Graph::new(p.m_su);
    for i in 0..p.m_su {
        for j in i + 1..p.m_su {
            if within_range(&nodes[i], &nodes[j], p.su_range) {
                su_graph.add_edge(i, j);
            }
        }
    }

    Ok(Topology {
        nodes,
        su_graph,
        area,
        n_channels: p.n_channels,
        seed,
    })
}

fn within_range(a: &Node, b: &Node, range: f64) -> bool {
    a.distance(b) <= range * (1.0 + 1e-9)
}

/// Scale factor that puts exactly `round(target * m / 2)` SU pairs within
/// range, or `None` when there is nothing to scale.
fn densify_scale(sus: &[Node], range: f64, target: f64) -> Result<Option<f64>> {
    if !(target > 0.0) {
        return Err(Error::param("target mean degree must be positive"));
    }
    let m = sus.len();
    if m < 2 {
        return Ok(None);
    }
    let mut dists = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            dists.push(sus[i].distance(&sus[j]));
        }
    }
    dists.sort_by(f64::total_cmp);
    let wanted = ((target * m as f64 / 2.0).round() as usize).clamp(1, dists.len());
    let threshold = dists[wanted - 1];
    if threshold <= 0.0 {
        return Ok(None);
    }
    Ok(Some(range / threshold))
}

impl Topology {
    /// Builds a topology from explicit parts; SU adjacency is taken as given.
    pub fn from_parts(
        nodes: Vec<Node>,
        su_edges: &[(usize, usize)],
        area: (f64, f64),
        n_channels: usize,
        seed: u64,
    ) -> Result<Self> {
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::param(format!("node at index {i} has id {}", n.id)));
            }
            if n.available_channels.iter().any(|&c| c >= n_channels) {
                return Err(Error::param(format!("node {i} lists an unknown channel")));
            }
        }
        let m = nodes
            .iter()
            .take_while(|n| n.kind == NodeKind::Secondary)
            .count();
        if nodes[m..].iter().any(|n| n.kind == NodeKind::Secondary) {
            return Err(Error::param("SUs must precede PUs"));
        }
        let mut su_graph = Graph::new(m);
        for &(u, v) in su_edges {
            if u >= m || v >= m || u == v {
                return Err(Error::param(format!("edge {u}-{v} is not between two SUs")));
            }
            su_graph.add_edge(u, v);
        }
        Ok(Topology {
            nodes,
            su_graph,
            area,
            n_channels,
            seed,
        })
    }

    pub fn su_count(&self) -> usize {
        self.su_graph.node_count()
    }

    pub fn su_graph(&self) -> &Graph {
        &self.su_graph
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn available(&self, id: usize) -> &BTreeSet<usize> {
        &self.nodes[id].available_channels
    }

    pub fn common_channels(&self, i: usize, j: usize) -> BTreeSet<usize> {
        self.available(i)
            .intersection(self.available(j))
            .copied()
            .collect()
    }

    /// The SU closest to the centre of the deployment area (lowest id on ties).
    pub fn center_su(&self) -> Option<usize> {
        let (cx, cy) = (self.area.0 / 2.0, self.area.1 / 2.0);
        (0..self.su_count()).min_by(|&a, &b| {
            let da = (self.nodes[a].x - cx).hypot(self.nodes[a].y - cy);
            let db = (self.nodes[b].x - cx).hypot(self.nodes[b].y - cy);
            da.total_cmp(&db).then(a.cmp(&b))
        })
    }

    /// Replaces the available-channel sets of the given SUs.
    pub fn with_availability<I>(&self, updates: I) -> Result<Topology>
    where
        I: IntoIterator<Item = (usize, BTreeSet<usize>)>,
    {
        let mut t = self.clone();
        for (id, set) in updates {
            if id >= t.su_count() || set.iter().any(|&c| c >= t.n_channels) {
                return Err(Error::param(format!(
                    "bad availability update for node {id}"
                )));
            }
            t.nodes[id].available_channels = set;
        }
        Ok(t)
    }

    /// Plain-text graph file: a `nodes <M> channels <N>` header, one
    /// `id x y kind radios ch:<list>` line per node, one `e u v` line per SU
    /// edge, and a trailing `#` line with area, ranges and seed.
    pub fn to_graph_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "nodes {} channels {}",
            self.nodes.len(),
            self.n_channels
        );
        for n in &self.nodes {
            let chans: Vec<String> = n.available_channels.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                out,
                "{} {} {} {} {} ch:{}",
                n.id,
                n.x,
                n.y,
                n.kind.tag(),
                n.radios,
                chans.join(",")
            );
        }
        for (u, v) in self.su_graph.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        let range_of = |kind| {
            self.nodes
                .iter()
                .find(|n| n.kind == kind)
                .map_or(0.0, |n| n.tx_range)
        };
        let _ = writeln!(
            out,
            "# area {} {} su_range {} pu_range {} seed {}",
            self.area.0,
            self.area.1,
            range_of(NodeKind::Secondary),
            range_of(NodeKind::Primary),
            self.seed
        );
        out
    }

    pub fn from_graph_text(text: &str) -> Result<Topology> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (lno, header) = lines
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| Error::parse(1, "empty graph file"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (total, n_channels) = match h.as_slice() {
            ["nodes", m, "channels", n] => {
                (parse_num::<usize>(lno, m)?, parse_num::<usize>(lno, n)?)
            }
            _ => return Err(Error::parse(lno, "expected `nodes <M> channels <N>`")),
        };

        let mut nodes = Vec::with_capacity(total);
        let mut edges = Vec::new();
        let mut area = None;
        let mut su_range = 0.0;
        let mut pu_range = 0.0;
        let mut seed = 0;
        for (lno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["#", "area", w, hgt, "su_range", sr, "pu_range", pr, "seed", s] => {
                    area = Some((parse_num(lno, w)?, parse_num(lno, hgt)?));
                    su_range = parse_num(lno, sr)?;
                    pu_range = parse_num(lno, pr)?;
                    seed = parse_num(lno, s)?;
                }
                ["#", ..] => {}
                ["e", u, v] => edges.push((parse_num(lno, u)?, parse_num(lno, v)?)),
                [id, x, y, kind, radios, chans] => {
                    let kind = match *kind {
                        "SU" => NodeKind::Secondary,
                        "PU" => NodeKind::Primary,
                        other => {
                            return Err(Error::parse(lno, format!("unknown node kind {other}")))
                        }
                    };
                    let list = chans
                        .strip_prefix("ch:")
                        .ok_or_else(|| Error::parse(lno, "channel list must start with `ch:`"))?;
                    let mut available_channels = BTreeSet::new();
                    for c in list.split(',').filter(|c| !c.is_empty()) {
                        available_channels.insert(parse_num(lno, c)?);
                    }
                    nodes.push(Node {
                        id: parse_num(lno, id)?,
                        x: parse_num(lno, x)?,
                        y: parse_num(lno, y)?,
                        kind,
                        tx_range: 0.0,
                        radios: parse_num(lno, radios)?,
                        available_channels,
                    });
                }
                _ => return Err(Error::parse(lno, format!("unrecognised line `{line}`"))),
            }
        }
        if nodes.len() != total {
            return Err(Error::parse(
                1,
                format!("header announces {total} nodes, found {}", nodes.len()),
            ));
        }
        for n in &mut nodes {
            n.tx_range = match n.kind {
                NodeKind::Secondary => su_range,
                NodeKind::Primary => pu_range,
            };
        }
        let area = area.unwrap_or_else(|| {
            let w = nodes.iter().map(|n| n.x).fold(0.0, f64::max);
            let h = nodes.iter().map(|n| n.y).fold(0.0, f64::max);
            (w, h)
        });
        Topology::from_parts(nodes, &edges, area, n_channels, seed)
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid number `{s}`")))
}

/// Degree, clustering and path-length summary of the SU graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyMetrics {
    pub mean_degree: f64,
    pub clustering: f64,
    /// `None` when no SU pair is connected.
    pub avg_path_length: Option<f64>,
    pub per_node_degree: Vec<usize>,
    pub per_node_clustering: Vec<f64>,
}

pub fn topology_metrics(t: &Topology) -> TopologyMetrics {
    let g = t.su_graph();
    let (clustering, per_node_clustering) = clustering_coefficient(t);
    TopologyMetrics {
        mean_degree: g.mean_degree(),
        clustering,
        avg_path_length: g.path_lengths().ok().map(|p| p.mean_hops),
        per_node_degree: (0..g.node_count()).map(|u| g.degree(u)).collect(),
        per_node_clustering,
    }
}

/// Mean and per-node clustering coefficient of the SU graph.
pub fn clustering_coefficient(t: &Topology) -> (f64, Vec<f64>) {
    let per_node = t.su_graph().clustering();
    let mean = if per_node.is_empty() {
        0.0
    } else {
        per_node.iter().sum::<f64>() / per_node.len() as f64
    };
    (mean, per_node)
}

/// Mean hop distance over connected ordered SU pairs, shortcuts counting as
/// one hop.
pub fn average_path_length(t: &Topology, shortcuts: Option<&ShortcutPlan>) -> Result<f64> {
    let g = match shortcuts {
        Some(plan) => t.su_graph().with_edges(plan.edges()),
        None => t.su_graph().clone(),
    };
    Ok(g.path_lengths()?.mean_hops)
}

/// `L(with shortcuts) / L(without)`.
pub fn path_length_ratio(t: &Topology, plan: &ShortcutPlan) -> Result<f64> {
    Ok(average_path_length(t, Some(plan))? / average_path_length(t, None)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DeploymentParams {
        DeploymentParams {
            m_su: 30,
            n_pu: 3,
            area: (200.0, 200.0),
            target_mean_degree: None,
            ..DeploymentParams::default()
        }
    }

    #[test]
    fn single_su_has_no_edges() {
        let p = DeploymentParams {
            m_su: 1,
            ..DeploymentParams::default()
        };
        let t = generate_topology(&p, 3).unwrap();
        assert_eq!(t.su_graph().edge_count(), 0);
        assert_eq!(t.nodes.len(), 13);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_topology(&DeploymentParams::default(), 42).unwrap();
        let b = generate_topology(&DeploymentParams::default(), 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_graph_text(), b.to_graph_text());
        let c = generate_topology(&DeploymentParams::default(), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_area_rejected() {
        let p = DeploymentParams {
            area: (0.0, 100.0),
            ..DeploymentParams::default()
        };
        assert!(generate_topology(&p, 1).is_err());
    }

    #[test]
    fn edges_respect_range() {
        let t = generate_topology(&small(), 8).unwrap();
        for i in 0..t.su_count() {
            for j in i + 1..t.su_count() {
                let close = t.node(i).distance(t.node(j)) <= 50.0;
                assert_eq!(close, t.su_graph().has_edge(i, j));
            }
        }
    }

    #[test]
    fn densified_degree_hits_target() {
        for seed in 0..10 {
            let t = generate_topology(&DeploymentParams::default(), seed).unwrap();
            let k = t.su_graph().mean_degree();
            assert!((k - 4.0).abs() <= 0.4, "seed {seed}: mean degree {k}");
            for n in &t.nodes {
                assert!(n.x >= 0.0 && n.x <= t.area.0 && n.y >= 0.0 && n.y <= t.area.1);
            }
        }
    }

    #[test]
    fn raw_degree_matches_expectation() {
        // Expected mean degree m * pi * r^2 / A ~ 0.785, boundary effects
        // lower it slightly.
        let p = DeploymentParams {
            target_mean_degree: None,
            ..DeploymentParams::default()
        };
        let mean: f64 = (0..100)
            .map(|s| generate_topology(&p, s).unwrap().su_graph().mean_degree())
            .sum::<f64>()
            / 100.0;
        let expected = 100.0 * std::f64::consts::PI * 50.0 * 50.0 / 1.0e6;
        assert!(mean > expected / 2.0 && mean < expected * 2.0, "{mean}");
    }

    #[test]
    fn availability_sets_are_nested_across_levels() {
        let lo = DeploymentParams {
            channel_availability: 0.3,
            ..DeploymentParams::default()
        };
        let hi = DeploymentParams {
            channel_availability: 0.9,
            ..DeploymentParams::default()
        };
        let a = generate_topology(&lo, 5).unwrap();
        let b = generate_topology(&hi, 5).unwrap();
        for i in 0..a.su_count() {
            assert!(a.available(i).is_subset(b.available(i)));
        }
        assert_eq!(a.su_graph(), b.su_graph());
    }

    #[test]
    fn graph_text_round_trip() {
        let t = generate_topology(&DeploymentParams::default(), 17).unwrap();
        let text = t.to_graph_text();
        assert!(text.starts_with("nodes 112 channels 12\n"));
        let back = Topology::from_graph_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_graph_text(), text);
    }

    #[test]
    fn graph_text_errors() {
        assert!(Topology::from_graph_text("").is_err());
        assert!(Topology::from_graph_text("nodes 1 channels 2\n0 1 1 XU 4 ch:0\n").is_err());
        assert!(Topology::from_graph_text("nodes 2 channels 2\n0 1 1 SU 4 ch:0\n").is_err());
        assert!(Topology::from_graph_text("nodes 1 channels 2\n0 1 1 SU 4 ch:5\n").is_err());
        let ok = Topology::from_graph_text(
            "nodes 2 channels 2\n0 1 1 SU 4 ch:0,1\n1 2 2 SU 4 ch:\ne 0 1\n",
        )
        .unwrap();
        assert!(ok.su_graph().has_edge(0, 1));
        assert!(ok.available(1).is_empty());
    }

    #[test]
    fn center_su_is_nearest() {
        let t = generate_topology(&DeploymentParams::default(), 2).unwrap();
        let c = t.center_su().unwrap();
        let d = |i: usize| (t.node(i).x - t.area.0 / 2.0).hypot(t.node(i).y - t.area.1 / 2.0);
        assert!((0..t.su_count()).all(|i| d(c) <= d(i)));
    }
}
