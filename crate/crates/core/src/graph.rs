//! Undirected simple graphs over SU indices and the metrics the capacity
//! model consumes.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Adjacency-list graph with sorted, duplicate-free neighbor lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(nodes: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn from_edges<I>(nodes: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(nodes);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Inserts `u - v`. Returns false for self loops and existing edges.
    ///
    /// Panics if either endpoint is out of range.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(
            u < self.adj.len() && v < self.adj.len(),
            "edge endpoint out of range"
        );
        if u == v {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                true
            }
        }
    }

    pub fn with_edges<I>(&self, extra: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = self.clone();
        for (u, v) in extra {
            g.add_edge(u, v);
        }
        g
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|n| n.binary_search(&v).is_ok())
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, n)| n.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.adj.len() as f64
    }

    /// Hop distances from `src`; `None` for unreachable nodes.
    pub fn bfs(&self, src: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.adj.len()];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Local clustering of `u`: closed neighbor pairs over `k(k-1)/2`, zero
    /// when the degree is below two.
    pub fn local_clustering(&self, u: usize) -> f64 {
        let n = &self.adj[u];
        let k = n.len();
        if k < 2 {
            return 0.0;
        }
        let mut closed = 0usize;
        for (a, &x) in n.iter().enumerate() {
            for &y in &n[a + 1..] {
                if self.has_edge(x, y) {
                    closed += 1;
                }
            }
        }
        closed as f64 / (k * (k - 1) / 2) as f64
    }

    pub fn clustering(&self) -> Vec<f64> {
        (0..self.adj.len())
            .map(|u| self.local_clustering(u))
            .collect()
    }

    /// Mean of the local clustering coefficients over all nodes.
    pub fn mean_clustering(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        self.clustering().iter().sum::<f64>() / self.adj.len() as f64
    }

    /// All-pairs BFS summary. Disconnected pairs are excluded from the mean
    /// hop count and contribute zero to the efficiency.
    pub fn path_lengths(&self) -> Result<PathLengths> {
        let n = self.adj.len();
        let mut hops = 0u64;
        let mut connected = 0u64;
        let mut inverse = 0.0;
        for src in 0..n {
            for d in self.bfs(src).into_iter().flatten() {
                if d > 0 {
                    hops += u64::from(d);
                    connected += 1;
                    inverse += 1.0 / f64::from(d);
                }
            }
        }
        if connected == 0 {
            return Err(Error::NoConnectedPairs);
        }
        let total = (n * (n - 1)) as u64;
        Ok(PathLengths {
            mean_hops: hops as f64 / connected as f64,
            connected_pairs: connected,
            total_pairs: total,
            efficiency: inverse / total as f64,
        })
    }
}

/// Path-length summary over ordered node pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLengths {
    /// Mean BFS distance over ordered connected pairs.
    pub mean_hops: f64,
    pub connected_pairs: u64,
    pub total_pairs: u64,
    /// Mean of `1 / d` over all ordered pairs, with `1 / inf = 0`.
    pub efficiency: f64,
}

impl PathLengths {
    /// Harmonic mean distance over all ordered pairs (`1 / efficiency`).
    /// Equals `mean_hops` when every pair is at the same distance and never
    /// increases when an edge is added, connected or not.
    pub fn harmonic_hops(&self) -> f64 {
        1.0 / self.efficiency
    }

    pub fn connected_fraction(&self) -> f64 {
        self.connected_pairs as f64 / self.total_pairs as f64
    }
}
