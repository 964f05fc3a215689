//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

// `!(x > 0.0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_clustering, channels, oracle_path_lengths, random_graph, small_topology};
use crn_core::assignment::{assign_network, ChannelTiming, Policy};
use crn_core::capacity::{
    consumed_links, consumed_nodes_avg, network_capacity, sensing_factor, CapacityParams,
    ConsumptionParams,
};
use crn_core::graph::Graph;
use crn_core::harness::{
    emit_outputs, run_experiment, ExperimentConfig, ExperimentResult, Scenario, Scheme,
};
use crn_core::shortcuts::{
    build_plan_nsc, build_plan_rs, build_plan_wide, in_search_region, in_wide_region,
    GeometryParams,
};
use crn_core::sop::des::des_oracle;
use crn_core::sop::{
    link_channel_avail_prob, link_connectivity, pu_idle_prob, su_distribution, QueueParams,
};
use crn_core::topology::{average_path_length, clustering_coefficient, Node, NodeKind, Topology};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: ok_detail,
        }
    } else {
        Outcome {
            pass: false,
            detail: failures.join("; "),
        }
    }
}

fn exact(name: &str, got: f64, want: f64, fails: &mut Vec<String>) {
    if (got - want).abs() > 1e-9 {
        fails.push(format!("{name} = {got}, expected {want}"));
    }
}

// 1. Closed-form spot checks to 1e-9.
fn closed_forms() -> Outcome {
    let mut f = Vec::new();
    exact(
        "pu_idle_prob(0.2, 0.4)",
        pu_idle_prob(&QueueParams::pu_only(0.2, 0.4)).unwrap(),
        2.0 / 3.0,
        &mut f,
    );
    let cp = ConsumptionParams::default();
    exact(
        "consumed_links",
        consumed_links(4.0, 4.0, 0.4, 0.4, &cp).unwrap(),
        17.6,
        &mut f,
    );
    exact(
        "consumed_nodes_avg",
        consumed_nodes_avg(4.0, 0.4, 1.0).unwrap(),
        4.4,
        &mut f,
    );
    let p = CapacityParams::default();
    exact("sensing_factor", sensing_factor(&p).unwrap(), 0.405, &mut f);
    let r = network_capacity(&p, 4.0, 0.4, 4.0, 0.5).unwrap();
    // T' = 2 / 2.2; Capa = 100 * T' * 4 * 0.405.
    let capa = 100.0 * (2.0 / 2.2) * 4.0 * 0.405;
    exact("Capa", r.capa, capa, &mut f);
    exact("Capa_e", r.capa_e, capa / 4.0, &mut f);
    if (r.capa - 147.27).abs() > 0.005 || (r.capa_e - 36.82).abs() > 0.005 {
        f.push(format!(
            "Capa {} / Capa_e {} not 147.27 / 36.82",
            r.capa, r.capa_e
        ));
    }
    outcome(
        f,
        format!("Capa = {:.2} Mbps, Capa_e = {:.2} Mbps", r.capa, r.capa_e),
    )
}

// 2. Event-driven queue against the closed forms, ±0.02.
fn queueing_oracle() -> Outcome {
    let mut f = Vec::new();
    let mut worst: f64 = 0.0;
    for rho in [0.2, 0.5, 0.8] {
        let q = QueueParams::pu_only(rho * 0.5, 0.5);
        let sim = des_oracle(&q, 1_000_000, 101).unwrap().pu_idle_fraction;
        let err = (sim - pu_idle_prob(&q).unwrap()).abs();
        worst = worst.max(err);
        if err > 0.02 {
            f.push(format!("PU idle at rho_p {rho}: off by {err:.4}"));
        }
    }
    for (n, k, lambda) in [(1, 1, 0.5), (2, 4, 1.0), (3, 6, 2.0)] {
        let q = QueueParams::new(0.0, 1.0, lambda, 1.0, n, k).unwrap();
        let sim = des_oracle(&q, 1_000_000, 202).unwrap().su_occupancy;
        for (h, (a, b)) in su_distribution(&q).unwrap().iter().zip(&sim).enumerate() {
            let err = (a - b).abs();
            worst = worst.max(err);
            if err > 0.02 {
                f.push(format!(
                    "(N,K)=({n},{k}) state {h}: closed {a:.4} vs simulated {b:.4}"
                ));
            }
        }
    }
    outcome(f, format!("max deviation {worst:.4}"))
}

fn as_topology(g: &Graph) -> Topology {
    let nodes = (0..g.node_count())
        .map(|id| Node {
            id,
            x: id as f64,
            y: 0.0,
            kind: NodeKind::Secondary,
            tx_range: 1.0,
            radios: 2,
            available_channels: BTreeSet::from([0]),
        })
        .collect();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    Topology::from_parts(nodes, &edges, (1.0, 1.0), 1, 0).unwrap()
}

// 3. Graph metrics against brute force on 200 random graphs.
fn graph_oracle() -> Outcome {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut compared = 0;
    for i in 0..200 {
        let n = rng.random_range(2..=50);
        let p = rng.random_range(0.02..0.4);
        let g = random_graph(n, p, rng.random());
        let t = as_topology(&g);
        let (mean_c, per) = clustering_coefficient(&t);
        let brute = brute_clustering(&g);
        if per != brute || mean_c != brute.iter().sum::<f64>() / n as f64 {
            f.push(format!("graph {i}: clustering differs"));
        }
        match (average_path_length(&t, None), oracle_path_lengths(&g)) {
            (Ok(a), Some((b, _))) => {
                compared += 1;
                if a != b {
                    f.push(format!("graph {i}: path length {a} vs {b}"));
                }
            }
            (Err(_), None) => {}
            _ => f.push(format!("graph {i}: path length defined on one side only")),
        }
    }
    outcome(f, format!("200 graphs, {compared} with connected pairs"))
}

fn rows(r: &ExperimentResult, scheme: Scheme) -> Vec<(f64, &crn_core::harness::SummaryRow)> {
    r.rows
        .iter()
        .filter(|x| x.scheme == scheme)
        .map(|x| (x.x, x))
        .collect()
}

fn experiment(
    scenario: Scenario,
    schemes: &[Scheme],
    seeds: u32,
    sweep: Option<Vec<f64>>,
) -> ExperimentResult {
    let mut cfg = ExperimentConfig::new(scenario);
    cfg.schemes = schemes.to_vec();
    cfg.seeds = seeds;
    cfg.sweep = sweep;
    run_experiment(&cfg).expect("experiment runs")
}

const SHORTCUT_SCHEMES: [Scheme; 4] = [
    Scheme::RsRandom,
    Scheme::NscRandom,
    Scheme::NscCa,
    Scheme::Wide,
];

// 4. L(N)/L(0) nonincreasing, with little gain beyond 30 shortcuts.
fn apl_trend() -> Outcome {
    let r = experiment(Scenario::AplVsShortcuts, &SHORTCUT_SCHEMES, 20, None);
    let mut f = Vec::new();
    let mut notes = Vec::new();
    for s in SHORTCUT_SCHEMES {
        let pts = rows(&r, s);
        for w in pts.windows(2) {
            if w[1].1.apl_ratio.0 > w[0].1.apl_ratio.0 {
                f.push(format!(
                    "{}: ratio rises {} -> {} at {} shortcuts",
                    s.name(),
                    w[0].1.apl_ratio.0,
                    w[1].1.apl_ratio.0,
                    w[1].0
                ));
            }
        }
        let at = |x: f64| pts.iter().find(|p| p.0 == x).unwrap().1.apl_ratio.0;
        let (r0, r30, r50) = (at(0.0), at(30.0), at(50.0));
        let share = (r30 - r50) / (r0 - r30);
        if !(share < 0.3) {
            f.push(format!(
                "{}: 30->50 drop is {:.0}% of the 0->30 drop",
                s.name(),
                100.0 * share
            ));
        }
        notes.push(format!("{} {:.3}@30 {:.3}@50", s.name(), r30, r50));
    }
    outcome(f, notes.join(", "))
}

// 5. NSC latency below the wide baseline, at least 10% better at 30.
fn latency_trend() -> Outcome {
    let schemes = [Scheme::NscCa, Scheme::Wide];
    let sweep = vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0];
    let r = experiment(Scenario::LatencyVsShortcuts, &schemes, 20, Some(sweep));
    let nsc = rows(&r, Scheme::NscCa);
    let wide = rows(&r, Scheme::Wide);
    let mut f = Vec::new();
    let mut notes = Vec::new();
    for ((x, a), (_, b)) in nsc.iter().zip(&wide) {
        if *x < 10.0 {
            continue;
        }
        let (la, lb) = (a.latency.0, b.latency.0);
        notes.push(format!("{x}: {la:.2} vs {lb:.2}"));
        if !(la < lb) {
            f.push(format!(
                "at {x} shortcuts NSC {la:.2} >= WIDE {lb:.2} slots"
            ));
        }
        if *x == 30.0 {
            let gain = 1.0 - la / lb;
            if !(gain >= 0.10) {
                f.push(format!("improvement at 30 is {:.1}%", 100.0 * gain));
            }
        }
    }
    if f.is_empty() {
        outcome(f, format!("NSC vs WIDE slots: {}", notes.join(", ")))
    } else {
        outcome(f, String::new())
    }
}

const CHAIN: [Scheme; 4] = [
    Scheme::NscCa,
    Scheme::NscRandom,
    Scheme::RsRandom,
    Scheme::WithoutSw,
];

fn ordering(r: &ExperimentResult, label: &str, f: &mut Vec<String>) {
    for pair in CHAIN.windows(2) {
        let hi = rows(r, pair[0]);
        let lo = rows(r, pair[1]);
        let bad: Vec<String> = hi
            .iter()
            .zip(&lo)
            .filter(|((_, a), (_, b))| a.capa_e.0 < b.capa_e.0)
            .map(|((x, a), (_, b))| format!("{x} ({:.0} < {:.0})", a.capa_e.0, b.capa_e.0))
            .collect();
        if !bad.is_empty() {
            f.push(format!(
                "{label}: {} < {} at {}",
                pair[0].name(),
                pair[1].name(),
                bad.join(" ")
            ));
        }
    }
}

// 6. Capacity ordering across the three sweeps, sensing and availability trends.
fn capacity_orderings() -> Outcome {
    let mut f = Vec::new();

    let shortcuts = experiment(Scenario::CapacityVsShortcuts, &CHAIN, 20, None);
    ordering(&shortcuts, "shortcuts", &mut f);

    let mut taus = Scenario::CapacityVsSensing.default_sweep();
    taus.push(100.0);
    let sensing = experiment(Scenario::CapacityVsSensing, &CHAIN, 20, Some(taus));
    ordering(&sensing, "sensing", &mut f);
    for s in CHAIN {
        let pts = rows(&sensing, s);
        if pts.windows(2).any(|w| !(w[1].1.capa.0 < w[0].1.capa.0)) {
            f.push(format!(
                "{}: capacity not strictly decreasing in tau",
                s.name()
            ));
        }
        let last = pts.last().unwrap().1;
        if last.capa.0 != 0.0 || last.capa_e.0 != 0.0 {
            f.push(format!(
                "{}: capacity {} at tau = T_s",
                s.name(),
                last.capa.0
            ));
        }
    }

    // Above 0.8 the curve is flat to within a standard error, so the
    // availability sweep averages 200 seeds.
    let avail = experiment(Scenario::CapacityVsAvailability, &CHAIN, 200, None);
    ordering(&avail, "availability", &mut f);
    let ca = rows(&avail, Scheme::NscCa);
    for w in ca.windows(2) {
        if w[1].1.capa_e.0 < w[0].1.capa_e.0 {
            f.push(format!(
                "NSC+CA capacity falls from {:.1} to {:.1} between availability {} and {}",
                w[0].1.capa_e.0, w[1].1.capa_e.0, w[0].0, w[1].0
            ));
        }
    }
    outcome(
        f,
        "orderings hold at every sweep point; tau and availability trends hold".into(),
    )
}

fn snapshot(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

// 7. Identical configs give byte-identical outputs.
fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut f = Vec::new();
    let mut files = 0;
    for scenario in [
        Scenario::LatencyVsShortcuts,
        Scenario::CapacityVsAvailability,
    ] {
        let mut cfg = ExperimentConfig::new(scenario);
        cfg.seeds = 4;
        let mut snaps = Vec::new();
        for run in 0..2 {
            let dir = tmp.path().join(format!("{}_{run}", scenario.name()));
            let r = run_experiment(&cfg).unwrap();
            emit_outputs(&r, &dir).unwrap();
            snaps.push(snapshot(&dir));
        }
        files += snaps[0].len();
        if snaps[0] != snaps[1] {
            f.push(format!("{} outputs differ between runs", scenario.name()));
        }
    }
    outcome(f, format!("{files} files compared"))
}

// 8. Core invariants on fixed random fixtures. The full generative suites
// live in the *_props test targets.
fn invariants() -> Outcome {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.random_range(1..8);
        let mu_s = rng.random_range(0.1..2.0);
        let q = QueueParams::new(
            rng.random_range(0.0..0.9),
            1.0,
            rng.random_range(0.0..0.95) * n as f64 * mu_s,
            mu_s,
            n,
            n + rng.random_range(0..20),
        )
        .unwrap();
        let d = su_distribution(&q).unwrap();
        if (d.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            f.push("occupancy distribution not normalised".into());
        }
        let probs: Vec<f64> = (0..=n)
            .map(|h| link_channel_avail_prob(&q, h, n).unwrap())
            .collect();
        if probs.iter().chain(&d).any(|p| !(0.0..=1.0).contains(p))
            || !(0.0..=1.0).contains(&link_connectivity(&probs).unwrap())
        {
            f.push("probability out of bounds".into());
        }
    }
    for i in 0..100 {
        let g = random_graph(rng.random_range(3..40), 0.1, rng.random());
        let (u, v) = (0, g.node_count() - 1);
        if let Ok(before) = g.path_lengths() {
            if g.with_edges([(u, v)])
                .path_lengths()
                .unwrap()
                .harmonic_hops()
                > before.harmonic_hops()
            {
                f.push(format!("graph {i}: edge addition lengthened paths"));
            }
        }
    }
    for seed in 0..40 {
        let t = small_topology(seed);
        let ch = channels(&t, seed);
        let d = t.center_su().unwrap();
        let geo = GeometryParams::new(30.0, d).unwrap();
        let nsc = build_plan_nsc(&t, &geo, &ch.conn, 15, seed);
        let wide = build_plan_wide(&t, &geo, 15, seed);
        for p in [&nsc, &wide, &build_plan_rs(&t, 15, seed)] {
            let targets: Vec<usize> = p.targets().collect();
            if targets.iter().collect::<BTreeSet<_>>().len() != targets.len() {
                f.push(format!("seed {seed}: {} target acked twice", p.method));
            }
        }
        if nsc.messages.total() > wide.messages.total() {
            f.push(format!("seed {seed}: NSC sent more messages than WIDE"));
        }
        let pos = |i: usize| (t.node(i).x, t.node(i).y);
        for j in 0..t.su_count() {
            for h in 0..t.su_count() {
                if in_search_region(pos(h), pos(d), pos(j), 30.0)
                    && !in_wide_region(pos(h), pos(d), pos(j))
                {
                    f.push(format!("seed {seed}: region of {h} escapes the half-plane"));
                }
            }
        }
        let tm: Vec<ChannelTiming> = (0..t.n_channels)
            .map(|k| ChannelTiming::new(k, rng.random_range(0.0..4.0), 1.0).unwrap())
            .collect();
        let a = assign_network(&t, &tm, Some(&nsc), Policy::Slack).unwrap();
        if a.nodes
            .iter()
            .flat_map(|n| &n.slots)
            .any(|&(_, c)| tm[c].delta < 0.0)
        {
            f.push(format!("seed {seed}: negative-slack channel assigned"));
        }
    }
    for _ in 0..200 {
        let l = rng.random_range(1.0..30.0);
        let r = network_capacity(
            &CapacityParams::default(),
            rng.random_range(1.0..10.0),
            0.4,
            l,
            rng.random_range(0.05..1.0),
        )
        .unwrap();
        if (r.capa_e * r.l_g - r.capa).abs() > 1e-9 * r.capa {
            f.push("Capa_e * L(G) != Capa".into());
        }
    }
    f.dedup();
    outcome(
        f,
        "bounds, normalisation, edge monotonicity, single ack, region nesting, slack, Capa_e*L"
            .into(),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "closed-form spot checks",
            Duration::from_secs(1),
            closed_forms,
        ),
        (
            "queueing oracle equivalence",
            Duration::from_secs(30),
            queueing_oracle,
        ),
        (
            "graph metric oracle equivalence",
            Duration::from_secs(10),
            graph_oracle,
        ),
        ("path length trend", Duration::from_secs(120), apl_trend),
        (
            "dissemination latency trend",
            Duration::from_secs(120),
            latency_trend,
        ),
        (
            "capacity orderings",
            Duration::from_secs(300),
            capacity_orderings,
        ),
        ("determinism", Duration::from_secs(300), determinism),
        ("property invariants", Duration::from_secs(60), invariants),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let took = start.elapsed();
        if took > *limit {
            o.pass = false;
            o.detail = format!(
                "{} (runtime {:.1}s over {}s limit)",
                o.detail,
                took.as_secs_f64(),
                limit.as_secs()
            );
        }
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} [{:.1}s] {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
