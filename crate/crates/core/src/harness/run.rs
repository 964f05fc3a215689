use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Scenario, Scheme};
use crate::assignment::{
    assign_network, estimate_timings, realized_graph, realized_shortcuts, ChannelTiming, Policy,
};
use crate::capacity::{mrmc_factor, network_capacity, CapacityParams, CapacityReport};
use crate::dissemination::{run_dissemination, SimConfig, SimResult};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::shortcuts::{
    build_plan_nsc, build_plan_rs, build_plan_wide, GeometryParams, PairConnectivity, ShortcutPlan,
};
use crate::sop::{mean_connectivity, pu_idle_prob, ChannelModel, ConnectivityMatrix};
use crate::topology::{generate_topology, Topology};

/// Everything measured for one (sweep value, scheme, seed) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub x: f64,
    pub scheme: Scheme,
    pub seed: u64,
    pub shortcuts: usize,
    pub realized: usize,
    pub messages: u64,
    /// Mean degree and clustering of the geometric SU graph.
    pub k: f64,
    pub c_g: f64,
    /// Harmonic path length of the routing graph (assigned links plus
    /// realized shortcuts); the `L(G)` used for capacity.
    pub l_g: f64,
    pub p_avg: f64,
    /// Harmonic path length of the SU graph with realized shortcuts,
    /// relative to the SU graph alone.
    pub apl_ratio: f64,
    /// Same ratio with disconnected pairs excluded instead.
    pub apl_connected_ratio: f64,
    pub capacity: CapacityReport,
    /// Capacity with the nominal mean degree and clustering.
    pub capa_e_analytic: f64,
    pub sim: Option<SimResult>,
}

/// Per-seed world shared by every scheme at one sweep value.
struct World {
    topology: Topology,
    timings: Vec<ChannelTiming>,
    busy: Vec<f64>,
    conn: PairConnectivity,
    p_avg: f64,
    base_apl: crate::graph::PathLengths,
    destination: usize,
}

fn world(cfg: &ExperimentConfig, availability: f64, seed: u64) -> Result<World> {
    let t2 = &cfg.network;
    let topology = generate_topology(&cfg.deployment(availability), seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c4a1_0000_0000);
    let w = cfg.model.data_rate_mbps * 1e6;
    let model = ChannelModel::random(
        t2.channels,
        t2.lambda_p,
        t2.lambda_s,
        cfg.k_capacity(),
        w,
        &mut rng,
    )?;
    let timings = estimate_timings(&model.channels, (t2.packet_bytes * 8) as f64, w)?;
    let link_probs = model.channel_link_probs()?;
    let busy = model
        .channels
        .iter()
        .map(|q| pu_idle_prob(q).map(|p| 1.0 - p))
        .collect::<Result<Vec<_>>>()?;
    let conn = PairConnectivity::from_channel_probs(&topology, &link_probs)?;
    let p_avg = mean_connectivity(&ConnectivityMatrix::uniform(t2.sus, &link_probs))?;
    let base_apl = topology.su_graph().path_lengths()?;
    let destination = match cfg.model.destination {
        Some(d) => d,
        None => topology
            .center_su()
            .ok_or_else(|| Error::Config("no SU to use as destination".into()))?,
    };
    Ok(World {
        topology,
        timings,
        busy,
        conn,
        p_avg,
        base_apl,
        destination,
    })
}

fn plan_for(
    cfg: &ExperimentConfig,
    w: &World,
    scheme: Scheme,
    budget: usize,
    seed: u64,
) -> Result<ShortcutPlan> {
    let geo = GeometryParams::new(cfg.network.alpha_deg, w.destination)?;
    let t = &w.topology;
    Ok(match scheme {
        Scheme::WithoutSw => build_plan_rs(t, 0, seed),
        Scheme::RsRandom => build_plan_rs(t, budget, seed),
        Scheme::NscRandom | Scheme::NscCa => build_plan_nsc(t, &geo, &w.conn, budget, seed),
        Scheme::Wide => build_plan_wide(t, &geo, budget, seed),
    })
}

fn policy_for(scheme: Scheme, seed: u64) -> Policy {
    match scheme.assignment_name() {
        "random" => Policy::Random(seed ^ 0x0a55_1a4e),
        _ => Policy::Slack,
    }
}

fn harmonic(g: &Graph) -> f64 {
    g.path_lengths()
        .map_or(f64::INFINITY, |p| p.harmonic_hops())
}

fn cell(
    cfg: &ExperimentConfig,
    w: &World,
    x: f64,
    scheme: Scheme,
    seed: u64,
) -> Result<CellResult> {
    let t = &w.topology;
    let t2 = &cfg.network;
    let budget = match cfg.scenario {
        Scenario::CapacityVsSensing | Scenario::CapacityVsAvailability => cfg.shortcut_budget(),
        _ => x as usize,
    };
    let sensing_ms = match cfg.scenario {
        Scenario::CapacityVsSensing => x,
        _ => t2.sensing_ms,
    };
    let plan = plan_for(cfg, w, scheme, budget, seed)?;
    let policy = policy_for(scheme, seed);
    let assignment = assign_network(t, &w.timings, Some(&plan), policy)?;
    let realized = realized_shortcuts(t, &assignment, &w.timings, &plan);

    let su = t.su_graph();
    let with_sc = su.with_edges(realized.iter().map(|&(h, v, _)| (h, v)));
    let apl = with_sc.path_lengths()?;
    let routing = realized_graph(t, &assignment, &w.timings, Some(&plan));
    let l_g = harmonic(&routing);

    let k = su.mean_degree();
    let c_g = su.mean_clustering();
    let factor = mrmc_factor(t2.radios, t2.channels, cfg.factor_policy()?)?;
    let cap = CapacityParams {
        factor_f: factor,
        ..cfg.capacity_params(sensing_ms)
    };
    let capacity = network_capacity(&cap, k.max(1.0), c_g, l_g.max(1.0), w.p_avg)?;
    let analytic = network_capacity(
        &cap,
        t2.mean_degree.max(1.0),
        t2.clustering,
        l_g.max(1.0),
        w.p_avg,
    )?;

    let sim = if cfg.model.dissemination && cfg.scenario.needs_dissemination() {
        let sc = SimConfig {
            source: w.destination,
            slot_length: t2.slot_ms / 1000.0,
            max_slots: cfg.model.max_slots,
            pu_busy_prob: w.busy.clone(),
            seed: seed ^ 0xd155_0000,
        };
        Some(run_dissemination(t, &plan, &assignment, &w.timings, &sc)?)
    } else {
        None
    };

    Ok(CellResult {
        x,
        scheme,
        seed,
        shortcuts: plan.len(),
        realized: realized.len(),
        messages: plan.messages.total(),
        k,
        c_g,
        l_g,
        p_avg: w.p_avg,
        apl_ratio: apl.harmonic_hops() / w.base_apl.harmonic_hops(),
        apl_connected_ratio: apl.mean_hops / w.base_apl.mean_hops,
        capacity,
        capa_e_analytic: analytic.capa_e,
        sim,
    })
}

/// Runs every (sweep value, scheme, seed) cell. Cells are computed in
/// parallel and returned ordered by sweep index, seed, then scheme order of
/// the configuration, so the result does not depend on scheduling.
pub fn run_cells(cfg: &ExperimentConfig) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    let sweep = cfg.sweep_values();
    let seeds: Vec<u64> = (0..u64::from(cfg.seeds))
        .map(|s| cfg.seed_offset + s)
        .collect();
    let work: Vec<(f64, u64)> = sweep
        .iter()
        .flat_map(|&x| seeds.iter().map(move |&s| (x, s)))
        .collect();
    let chunks: Vec<Result<Vec<CellResult>>> = work
        .par_iter()
        .map(|&(x, seed)| {
            let availability = match cfg.scenario {
                Scenario::CapacityVsAvailability => x,
                _ => cfg.network.channel_availability,
            };
            let w = world(cfg, availability, seed)?;
            cfg.schemes
                .iter()
                .map(|&s| cell(cfg, &w, x, s, seed))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(work.len() * cfg.schemes.len());
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One aggregated row per (sweep value, scheme).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: Scenario,
    pub scheme: Scheme,
    pub x: f64,
    pub seeds: usize,
    pub shortcuts: f64,
    pub realized: f64,
    pub messages: f64,
    pub k: f64,
    pub c_g: f64,
    pub l_g: f64,
    pub p_avg: f64,
    pub apl_ratio: (f64, f64),
    pub apl_connected_ratio: f64,
    /// Mean over seeds with a defined latency, and how many had one.
    pub latency: (f64, f64),
    pub latency_runs: usize,
    pub covered: f64,
    pub capa: (f64, f64),
    pub capa_e: (f64, f64),
    pub capa_e_analytic: f64,
}

impl SummaryRow {
    pub const CSV_HEADER: &'static str =
        "scenario,scheme,plan,assignment,x,seeds,shortcuts,realized,messages,\
k,cg,lg,pavg,apl_ratio,apl_ratio_sd,apl_connected_ratio,latency,latency_sd,latency_runs,covered,\
capa,capa_sd,capa_e,capa_e_sd,capa_e_analytic";

    pub fn to_csv_row(&self) -> String {
        let f = |v: f64| {
            if v.is_nan() {
                "NA".to_string()
            } else {
                format!("{v:.6}")
            }
        };
        [
            self.scenario.name().to_string(),
            self.scheme.name().to_string(),
            self.scheme.plan_name().to_string(),
            self.scheme.assignment_name().to_string(),
            format!("{}", self.x),
            self.seeds.to_string(),
            f(self.shortcuts),
            f(self.realized),
            f(self.messages),
            f(self.k),
            f(self.c_g),
            f(self.l_g),
            f(self.p_avg),
            f(self.apl_ratio.0),
            f(self.apl_ratio.1),
            f(self.apl_connected_ratio),
            f(self.latency.0),
            f(self.latency.1),
            self.latency_runs.to_string(),
            f(self.covered),
            f(self.capa.0),
            f(self.capa.1),
            f(self.capa_e.0),
            f(self.capa_e.1),
            f(self.capa_e_analytic),
        ]
        .join(",")
    }
}

/// Aggregates cells over seeds, in sweep order then configured scheme order.
pub fn summarize(cfg: &ExperimentConfig, cells: &[CellResult]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for x in cfg.sweep_values() {
        for &scheme in &cfg.schemes {
            let group: Vec<&CellResult> = cells
                .iter()
                .filter(|c| c.x == x && c.scheme == scheme)
                .collect();
            if group.is_empty() {
                continue;
            }
            let col = |f: &dyn Fn(&CellResult) -> f64| -> Vec<f64> {
                group.iter().map(|c| f(c)).collect()
            };
            let m = |f: &dyn Fn(&CellResult) -> f64| mean_sd(&col(f)).0;
            let lat: Vec<f64> = group
                .iter()
                .filter_map(|c| c.sim.as_ref()?.latency_slots.map(f64::from))
                .collect();
            let covered: Vec<f64> = group
                .iter()
                .filter_map(|c| c.sim.as_ref().map(|s| s.covered_fraction))
                .collect();
            rows.push(SummaryRow {
                scenario: cfg.scenario,
                scheme,
                x,
                seeds: group.len(),
                shortcuts: m(&|c| c.shortcuts as f64),
                realized: m(&|c| c.realized as f64),
                messages: m(&|c| c.messages as f64),
                k: m(&|c| c.k),
                c_g: m(&|c| c.c_g),
                l_g: m(&|c| c.l_g),
                p_avg: m(&|c| c.p_avg),
                apl_ratio: mean_sd(&col(&|c| c.apl_ratio)),
                apl_connected_ratio: m(&|c| c.apl_connected_ratio),
                latency: mean_sd(&lat),
                latency_runs: lat.len(),
                covered: mean_sd(&covered).0,
                capa: mean_sd(&col(&|c| c.capacity.capa)),
                capa_e: mean_sd(&col(&|c| c.capacity.capa_e)),
                capa_e_analytic: m(&|c| c.capa_e_analytic),
            });
        }
    }
    rows
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub cells: Vec<CellResult>,
    pub rows: Vec<SummaryRow>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let cells = run_cells(cfg)?;
    let rows = summarize(cfg, &cells);
    Ok(ExperimentResult {
        config: cfg.clone(),
        cells,
        rows,
    })
}
