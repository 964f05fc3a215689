//! Small-world shortcut creation.
//!
//! Hubs are SUs whose degree is a local maximum. Each hub looks for
//! shortcut candidates inside an angular region pointing at a destination
//! node `D`, ranks them by connectivity ratio and runs a create-shortcut /
//! ack / nack handshake. Two baselines share the plan type: uniformly random
//! pairs (`RS`) and a wide half-plane search ranked by degree (`WIDE`).
//!
//! Hubs are served round-robin in `(degree desc, id asc)` order until the
//! shortcut budget is spent, so a plan for a smaller budget is always a
//! prefix of the plan for a larger one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sop::link_connectivity;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Nsc,
    Rs,
    Wide,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Nsc => "NSC",
            Method::Rs => "RS",
            Method::Wide => "WIDE",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NSC" => Ok(Method::Nsc),
            "RS" => Ok(Method::Rs),
            "WIDE" => Ok(Method::Wide),
            other => Err(Error::param(format!("unknown shortcut method {other}"))),
        }
    }
}

/// Search-region geometry: bisectrix angle in degrees and destination SU.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    pub alpha_deg: f64,
    pub destination: usize,
}

impl GeometryParams {
    pub fn new(alpha_deg: f64, destination: usize) -> Result<Self> {
        if !(alpha_deg > 0.0 && alpha_deg < 180.0) {
            return Err(Error::param(format!(
                "alpha {alpha_deg} must lie in (0, 180)"
            )));
        }
        Ok(GeometryParams {
            alpha_deg,
            destination,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MessageCounts {
    pub hello: u64,
    pub create: u64,
    pub ack: u64,
    pub nack: u64,
    pub force: u64,
}

impl MessageCounts {
    pub fn total(&self) -> u64 {
        self.hello + self.create + self.ack + self.nack + self.force
    }
}

/// Shortcuts as `(hub, target)` pairs in creation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortcutPlan {
    pub shortcuts: Vec<(usize, usize)>,
    pub method: Method,
    pub messages: MessageCounts,
}

impl ShortcutPlan {
    pub fn empty(method: Method) -> Self {
        ShortcutPlan {
            shortcuts: Vec::new(),
            method,
            messages: MessageCounts::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.shortcuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shortcuts.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.shortcuts.iter().copied()
    }

    /// Accepting endpoints in creation order.
    pub fn targets(&self) -> impl Iterator<Item = usize> + '_ {
        self.shortcuts.iter().map(|&(_, t)| t)
    }

    /// Each originating node with its shortcut partners.
    pub fn hubs(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(h, t) in &self.shortcuts {
            out.entry(h).or_default().push(t);
        }
        out
    }

    /// `s u v method` lines, then the `msgs ...` trailer.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# method {}", self.method);
        for &(u, v) in &self.shortcuts {
            let _ = writeln!(out, "s {u} {v} {}", self.method);
        }
        let m = &self.messages;
        let _ = writeln!(
            out,
            "msgs hello={} create={} ack={} nack={} force={}",
            m.hello, m.create, m.ack, m.nack, m.force
        );
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut method = None;
        let mut shortcuts = Vec::new();
        let mut messages = None;
        for (i, line) in text.lines().enumerate() {
            let lno = i + 1;
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                [] => {}
                ["#", "method", m] => method = Some(m.parse()?),
                ["#", ..] => {}
                ["s", u, v, m] => {
                    let m: Method = m.parse()?;
                    if method.is_some_and(|x| x != m) {
                        return Err(Error::parse(lno, "mixed methods in one plan"));
                    }
                    method = Some(m);
                    let num = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| Error::parse(lno, format!("invalid node id `{s}`")))
                    };
                    shortcuts.push((num(u)?, num(v)?));
                }
                ["msgs", rest @ ..] => {
                    let mut c = MessageCounts::default();
                    for kv in rest {
                        let (k, v) = kv.split_once('=').ok_or_else(|| {
                            Error::parse(lno, format!("expected key=value, got `{kv}`"))
                        })?;
                        let v: u64 = v
                            .parse()
                            .map_err(|_| Error::parse(lno, format!("invalid count `{v}`")))?;
                        match k {
                            "hello" => c.hello = v,
                            "create" => c.create = v,
                            "ack" => c.ack = v,
                            "nack" => c.nack = v,
                            "force" => c.force = v,
                            other => {
                                return Err(Error::parse(lno, format!("unknown counter {other}")))
                            }
                        }
                    }
                    messages = Some(c);
                }
                _ => return Err(Error::parse(lno, format!("unrecognised line `{line}`"))),
            }
        }
        Ok(ShortcutPlan {
            shortcuts,
            method: method.ok_or_else(|| Error::parse(1, "plan has no method"))?,
            messages: messages.ok_or_else(|| Error::parse(1, "missing msgs trailer"))?,
        })
    }
}

/// Pairwise connectivity ratio over the channels two SUs have in common.
#[derive(Debug, Clone, PartialEq)]
pub struct PairConnectivity {
    n: usize,
    values: Vec<f64>,
}

impl PairConnectivity {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(if i == j { 1.0 } else { f(i, j) });
            }
        }
        PairConnectivity { n, values }
    }

    /// `p_ij = 1 - prod_{k in A_i ∩ A_j} (1 - p_k)` from per-channel link
    /// probabilities `p_k`.
    pub fn from_channel_probs(t: &Topology, per_channel: &[f64]) -> Result<Self> {
        if per_channel.len() != t.n_channels {
            return Err(Error::param("one probability per channel is required"));
        }
        let n = t.su_count();
        let mut values = vec![1.0; n * n];
        let mut scratch = Vec::with_capacity(per_channel.len());
        for i in 0..n {
            for j in i + 1..n {
                scratch.clear();
                scratch.extend(
                    t.available(i)
                        .intersection(t.available(j))
                        .map(|&k| per_channel[k]),
                );
                let p = link_connectivity(&scratch)?;
                values[i * n + j] = p;
                values[j * n + i] = p;
            }
        }
        Ok(PairConnectivity { n, values })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Hub-eligible SUs sorted by `(degree desc, id asc)`, at most `max_hubs`.
///
/// A node qualifies when it has at least one neighbor, no neighbor has a
/// larger degree, its available-channel set is non-empty, and it has at
/// least two radios (one is reserved for the shortcut).
pub fn select_hubs(t: &Topology, max_hubs: usize) -> Vec<usize> {
    let g = t.su_graph();
    let mut hubs: Vec<usize> = (0..g.node_count())
        .filter(|&u| {
            let d = g.degree(u);
            d > 0
                && g.neighbors(u).iter().all(|&v| g.degree(v) <= d)
                && !t.available(u).is_empty()
                && t.node(u).radios >= 2
        })
        .collect();
    hubs.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    hubs.truncate(max_hubs);
    hubs
}

type Point = (f64, f64);

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

fn dot(a: Point, b: Point) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn cross(a: Point, b: Point) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// True when `j` lies in hub `i`'s search region towards `d`: both the angle
/// at `i` between `i->d` and `i->j` and the angle at `d` between `d->i` and
/// `d->j` have tangent below `tan(alpha / 2)`, and `j` projects strictly
/// between `i` and `d`. Points coincident with `i` or `d` are excluded.
pub fn in_search_region(i: Point, d: Point, j: Point, alpha_deg: f64) -> bool {
    let axis = sub(d, i);
    let len2 = dot(axis, axis);
    if len2 == 0.0 || j == i || j == d {
        return false;
    }
    let ij = sub(j, i);
    let along = dot(axis, ij);
    if along <= 0.0 || along >= len2 {
        return false;
    }
    let limit = (alpha_deg.to_radians() / 2.0).tan();
    let tan1 = cross(axis, ij).abs() / along;
    let di = sub(i, d);
    let dj = sub(j, d);
    let tan2 = cross(di, dj).abs() / dot(di, dj);
    tan1 < limit && tan2 < limit
}

/// The wide baseline region: the open half-plane at `i` facing `d`.
pub fn in_wide_region(i: Point, d: Point, j: Point) -> bool {
    let axis = sub(d, i);
    if dot(axis, axis) == 0.0 || j == i || j == d {
        return false;
    }
    dot(axis, sub(j, i)) > 0.0
}

fn position(t: &Topology, id: usize) -> Point {
    let n = t.node(id);
    (n.x, n.y)
}

fn region_members(
    t: &Topology,
    hub: usize,
    g: &GeometryParams,
    inside: impl Fn(Point, Point, Point) -> bool,
) -> Vec<usize> {
    let graph = t.su_graph();
    if g.destination >= t.su_count() || hub == g.destination {
        return Vec::new();
    }
    let (hp, dp) = (position(t, hub), position(t, g.destination));
    (0..t.su_count())
        .filter(|&j| j != hub && !graph.has_edge(hub, j))
        .filter(|&j| inside(hp, dp, position(t, j)))
        .collect()
}

/// Candidates of `hub` in preference order: connectivity ratio desc, then
/// degree desc, then id asc. Nodes with zero connectivity are excluded.
pub fn nsc_candidates(
    t: &Topology,
    hub: usize,
    g: &GeometryParams,
    conn: &PairConnectivity,
) -> Vec<usize> {
    let graph = t.su_graph();
    let mut c: Vec<usize> =
        region_members(t, hub, g, |i, d, j| in_search_region(i, d, j, g.alpha_deg))
            .into_iter()
            .filter(|&j| conn.get(hub, j) > 0.0)
            .collect();
    c.sort_by(|&a, &b| {
        conn.get(hub, b)
            .total_cmp(&conn.get(hub, a))
            .then(graph.degree(b).cmp(&graph.degree(a)))
            .then(a.cmp(&b))
    });
    c
}

/// Candidates of the wide baseline: degree desc, then id asc.
pub fn wide_candidates(t: &Topology, hub: usize, g: &GeometryParams) -> Vec<usize> {
    let graph = t.su_graph();
    let mut c = region_members(t, hub, g, in_wide_region);
    c.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));
    c
}

/// Best shortcut candidate for `hub`, if its region holds any.
pub fn select_shortcut_candidate(
    t: &Topology,
    hub: usize,
    g: &GeometryParams,
    conn: &PairConnectivity,
) -> Option<usize> {
    nsc_candidates(t, hub, g, conn).first().copied()
}

fn pair_key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

struct Handshake<'a> {
    t: &'a Topology,
    rng: ChaCha8Rng,
    plan: ShortcutPlan,
    budget: usize,
    accepted: BTreeSet<usize>,
    pairs: BTreeSet<(usize, usize)>,
    /// Extra hello per created shortcut (wide search).
    search_overhead: bool,
}

impl Handshake<'_> {
    fn full(&self) -> bool {
        self.plan.len() >= self.budget
    }

    fn usable(&self, hub: usize, c: usize) -> bool {
        !self.pairs.contains(&pair_key(hub, c))
    }

    fn create(&mut self, hub: usize, target: usize) {
        self.accepted.insert(target);
        self.pairs.insert(pair_key(hub, target));
        self.plan.shortcuts.push((hub, target));
        if self.search_overhead {
            self.plan.messages.hello += 1;
        }
    }

    /// Proposes down the candidate list from `cursor`. Returns true on ack.
    fn propose(&mut self, hub: usize, candidates: &[usize], cursor: &mut usize) -> bool {
        while *cursor < candidates.len() {
            let c = candidates[*cursor];
            *cursor += 1;
            if !self.usable(hub, c) {
                continue;
            }
            self.plan.messages.create += 1;
            if self.accepted.contains(&c) {
                self.plan.messages.nack += 1;
            } else {
                self.plan.messages.ack += 1;
                self.create(hub, c);
                return true;
            }
        }
        false
    }

    /// After every candidate has nacked, pick a random SU two hops away with
    /// a non-empty channel set and send it force-create-shortcut.
    fn force(&mut self, hub: usize) -> bool {
        let g = self.t.su_graph();
        let mut pool = BTreeSet::new();
        for &n in g.neighbors(hub) {
            for &m in g.neighbors(n) {
                if m != hub
                    && !g.has_edge(hub, m)
                    && !self.accepted.contains(&m)
                    && self.usable(hub, m)
                    && !self.t.available(m).is_empty()
                {
                    pool.insert(m);
                }
            }
        }
        let pool: Vec<usize> = pool.into_iter().collect();
        match pool.choose(&mut self.rng) {
            Some(&m) => {
                self.plan.messages.force += 1;
                self.create(hub, m);
                true
            }
            None => false,
        }
    }
}

fn run_handshake(
    t: &Topology,
    method: Method,
    budget: usize,
    seed: u64,
    candidates_for: impl Fn(usize) -> Vec<usize>,
) -> ShortcutPlan {
    let mut hs = Handshake {
        t,
        rng: ChaCha8Rng::seed_from_u64(seed),
        plan: ShortcutPlan::empty(method),
        budget,
        accepted: BTreeSet::new(),
        pairs: BTreeSet::new(),
        search_overhead: method == Method::Wide,
    };
    if budget == 0 {
        return hs.plan;
    }
    let hubs = select_hubs(t, usize::MAX);
    let mut lists: Vec<Option<Vec<usize>>> = vec![None; hubs.len()];
    let mut cursors = vec![0usize; hubs.len()];
    let mut exhausted = vec![false; hubs.len()];

    loop {
        let mut progress = false;
        for (slot, &hub) in hubs.iter().enumerate() {
            if hs.full() {
                return hs.plan;
            }
            if exhausted[slot] {
                continue;
            }
            // Neighbor discovery hellos travel on the control radio and are
            // not counted; only the wide search's extra round is.
            if lists[slot].is_none() {
                lists[slot] = Some(candidates_for(hub));
            }
            let list = lists[slot].as_deref().unwrap_or_default();
            let tried_before = cursors[slot];
            if hs.propose(hub, list, &mut cursors[slot]) {
                progress = true;
                continue;
            }
            exhausted[slot] = true;
            // Only a hub that was turned down by its last candidates forces.
            let nacked = cursors[slot] > tried_before;
            if nacked && hs.force(hub) {
                progress = true;
            }
        }
        if !progress {
            return hs.plan;
        }
    }
}

/// Connectivity-ratio shortcut creation inside the angular search region.
pub fn build_plan_nsc(
    t: &Topology,
    g: &GeometryParams,
    conn: &PairConnectivity,
    shortcut_budget: usize,
    seed: u64,
) -> ShortcutPlan {
    run_handshake(t, Method::Nsc, shortcut_budget, seed, |hub| {
        nsc_candidates(t, hub, g, conn)
    })
}

/// Wide-region baseline: half-plane search, candidates ranked by degree,
/// one extra search message per created shortcut.
pub fn build_plan_wide(
    t: &Topology,
    g: &GeometryParams,
    shortcut_budget: usize,
    seed: u64,
) -> ShortcutPlan {
    run_handshake(t, Method::Wide, shortcut_budget, seed, |hub| {
        wide_candidates(t, hub, g)
    })
}

/// Random baseline: a uniformly random SU linked to a uniformly random
/// non-neighbor that has not accepted a shortcut yet.
pub fn build_plan_rs(t: &Topology, shortcut_budget: usize, seed: u64) -> ShortcutPlan {
    let mut plan = ShortcutPlan::empty(Method::Rs);
    let n = t.su_count();
    if shortcut_budget == 0 || n < 2 {
        return plan;
    }
    let g = t.su_graph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    let max_attempts = 64 * shortcut_budget + 1024;
    let mut attempts = 0;
    while plan.len() < shortcut_budget && attempts < max_attempts {
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v || g.has_edge(u, v) || accepted.contains(&v) || pairs.contains(&pair_key(u, v)) {
            continue;
        }
        plan.messages.create += 1;
        plan.messages.ack += 1;
        accepted.insert(v);
        pairs.insert(pair_key(u, v));
        plan.shortcuts.push((u, v));
    }
    plan
}
