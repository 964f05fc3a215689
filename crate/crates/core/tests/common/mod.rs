#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crn_core::assignment::{estimate_timings, ChannelTiming};
use crn_core::graph::Graph;
use crn_core::shortcuts::PairConnectivity;
use crn_core::sop::{pu_idle_prob, ChannelModel};
use crn_core::topology::{generate_topology, DeploymentParams, Topology};

/// A 30-SU deployment with 4 channels, small enough for exhaustive checks.
pub fn small_params() -> DeploymentParams {
    DeploymentParams {
        m_su: 30,
        n_pu: 4,
        area: (200.0, 200.0),
        su_range: 40.0,
        pu_range: 60.0,
        radios: 3,
        n_channels: 4,
        channel_availability: 0.6,
        target_mean_degree: Some(3.0),
    }
}

pub fn small_topology(seed: u64) -> Topology {
    generate_topology(&small_params(), seed).expect("valid deployment")
}

/// Channel side of a deployment: timings, per-channel link probabilities,
/// PU busy probabilities and the pairwise connectivity matrix.
pub struct Channels {
    pub timings: Vec<ChannelTiming>,
    pub link_probs: Vec<f64>,
    pub busy: Vec<f64>,
    pub conn: PairConnectivity,
}

pub fn channels(t: &Topology, seed: u64) -> Channels {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = ChannelModel::random(t.n_channels, 0.2, 1.0, 100, 2e6, &mut rng).unwrap();
    let timings = estimate_timings(&model.channels, 8192.0, 2e6).unwrap();
    let link_probs = model.channel_link_probs().unwrap();
    let busy = model
        .channels
        .iter()
        .map(|q| 1.0 - pu_idle_prob(q).unwrap())
        .collect();
    let conn = PairConnectivity::from_channel_probs(t, &link_probs).unwrap();
    Channels {
        timings,
        link_probs,
        busy,
        conn,
    }
}

/// Erdős–Rényi graph on `n` nodes with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Adjacency-matrix clustering: for each node, count linked neighbor pairs
/// by scanning the full matrix.
pub fn brute_clustering(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| g.has_edge(u, v)).collect())
        .collect();
    (0..n)
        .map(|u| {
            let nb: Vec<usize> = (0..n).filter(|&v| adj[u][v]).collect();
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0;
            for &a in &nb {
                for &b in &nb {
                    if a < b && adj[a][b] {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

/// Floyd–Warshall distances; `None` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = Some(0);
        for &v in g.neighbors(u) {
            row[v] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Mean over connected ordered pairs, and harmonic mean over all ordered
/// pairs, from Floyd–Warshall.
pub fn oracle_path_lengths(g: &Graph) -> Option<(f64, f64)> {
    let d = floyd_warshall(g);
    let n = g.node_count();
    let (mut sum, mut count, mut inv) = (0u64, 0u64, 0.0);
    for (i, row) in d.iter().enumerate() {
        for (j, &dij) in row.iter().enumerate() {
            if i != j {
                if let Some(x) = dij {
                    sum += u64::from(x);
                    count += 1;
                    inv += 1.0 / f64::from(x);
                }
            }
        }
    }
    (count > 0).then(|| (sum as f64 / count as f64, (n * (n - 1)) as f64 / inv))
}

pub fn small_params_with(availability: f64) -> DeploymentParams {
    DeploymentParams {
        channel_availability: availability,
        ..small_params()
    }
}
