//! Spectrum-opportunity probabilities.
//!
//! Each licensed channel carries two customer classes. PU traffic holds the
//! channel as a two-state loss system (idle/busy), SU traffic is an M/M/N/K
//! queue over the N channels, and a PU arrival preempts an SU which later
//! resumes its remaining transmission. The functions here give the
//! closed-form stationary quantities of that model and compose them into the
//! per-channel link probability and the pairwise connectivity ratio.
//!
//! Factorial terms are evaluated in log-space so that channel counts up to 64
//! do not overflow.

pub mod des;

use rand::Rng;

use crate::error::{Error, Result};

/// Arrival and service rates of the two traffic classes on a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    /// PU arrival rate.
    pub lambda_p: f64,
    /// PU service rate.
    pub mu_p: f64,
    /// SU arrival rate.
    pub lambda_s: f64,
    /// SU service rate.
    pub mu_s: f64,
    /// Number of channels acting as servers of the SU queue.
    pub n_servers: usize,
    /// SU system capacity (in service plus waiting).
    pub k_capacity: usize,
}

impl QueueParams {
    pub fn new(
        lambda_p: f64,
        mu_p: f64,
        lambda_s: f64,
        mu_s: f64,
        n_servers: usize,
        k_capacity: usize,
    ) -> Result<Self> {
        let q = QueueParams {
            lambda_p,
            mu_p,
            lambda_s,
            mu_s,
            n_servers,
            k_capacity,
        };
        q.validate()?;
        Ok(q)
    }

    /// A single channel with PU traffic only.
    pub fn pu_only(lambda_p: f64, mu_p: f64) -> Self {
        QueueParams {
            lambda_p,
            mu_p,
            lambda_s: 0.0,
            mu_s: 1.0,
            n_servers: 1,
            k_capacity: 1,
        }
    }

    pub fn rho_p(&self) -> f64 {
        self.lambda_p / self.mu_p
    }

    pub fn rho_s(&self) -> f64 {
        self.lambda_s / (self.n_servers as f64 * self.mu_s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda_p, self.mu_p, self.lambda_s, self.mu_s]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("queue rates must be finite"));
        }
        if self.lambda_p < 0.0 || self.lambda_s < 0.0 {
            return Err(Error::param("arrival rates must be non-negative"));
        }
        if self.mu_p <= 0.0 || self.mu_s <= 0.0 {
            return Err(Error::param("service rates must be positive"));
        }
        if self.n_servers == 0 {
            return Err(Error::param("n_servers must be at least 1"));
        }
        if self.k_capacity < self.n_servers {
            return Err(Error::param(format!(
                "k_capacity {} is below n_servers {}",
                self.k_capacity, self.n_servers
            )));
        }
        if self.rho_p() >= 1.0 {
            return Err(Error::param(format!(
                "PU load rho_p = {} must be below 1",
                self.rho_p()
            )));
        }
        if self.rho_s() >= 1.0 {
            return Err(Error::param(format!(
                "SU load rho_s = {} must be below 1",
                self.rho_s()
            )));
        }
        Ok(())
    }
}

/// Per-channel traffic description of the whole licensed band.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub channels: Vec<QueueParams>,
    /// Fixed data rate of every channel.
    pub data_rate_w: f64,
}

impl ChannelModel {
    pub fn new(channels: Vec<QueueParams>, data_rate_w: f64) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::param("channel model needs at least one channel"));
        }
        if !(data_rate_w > 0.0 && data_rate_w.is_finite()) {
            return Err(Error::param("data rate must be positive"));
        }
        for q in &channels {
            q.validate()?;
        }
        Ok(ChannelModel {
            channels,
            data_rate_w,
        })
    }

    /// Draws per-channel service rates uniformly from (0, 1], redrawing any
    /// value that would make the PU or SU queue unstable.
    pub fn random<R: Rng + ?Sized>(
        n_channels: usize,
        lambda_p: f64,
        lambda_s: f64,
        k_capacity: usize,
        data_rate_w: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if n_channels == 0 {
            return Err(Error::param("channel model needs at least one channel"));
        }
        if lambda_p >= 1.0 || lambda_s >= n_channels as f64 {
            return Err(Error::param(
                "arrival rates leave no stable service rate in (0, 1]",
            ));
        }
        let mut channels = Vec::with_capacity(n_channels);
        for _ in 0..n_channels {
            let mu_p = draw_above(rng, lambda_p);
            let mu_s = draw_above(rng, lambda_s / n_channels as f64);
            channels.push(QueueParams::new(
                lambda_p,
                mu_p,
                lambda_s,
                mu_s,
                n_channels,
                k_capacity.max(n_channels),
            )?);
        }
        ChannelModel::new(channels, data_rate_w)
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Probability that the PU of each channel is idle.
    pub fn pu_idle_probs(&self) -> Result<Vec<f64>> {
        self.channels.iter().map(pu_idle_prob).collect()
    }

    /// Per-channel link probability, evaluated at the expected number of
    /// concurrently active SU channels.
    pub fn channel_link_probs(&self) -> Result<Vec<f64>> {
        let n = self.n_channels();
        self.channels
            .iter()
            .map(|q| link_channel_avail_prob(q, expected_active_channels(q)?, n))
            .collect()
    }
}

fn draw_above<R: Rng + ?Sized>(rng: &mut R, floor: f64) -> f64 {
    loop {
        // (0, 1]
        let v = 1.0 - rng.random::<f64>();
        if v > floor {
            return v;
        }
    }
}

/// Probability that the PU does not occupy the channel, `1 / (1 + rho_p)`.
pub fn pu_idle_prob(q: &QueueParams) -> Result<f64> {
    q.validate()?;
    Ok(1.0 / (1.0 + q.rho_p()))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// Log of the unnormalised stationary weight of state `i`.
fn ln_state_weight(i: usize, n: usize, rho: f64, ln_fact: &[f64]) -> f64 {
    if i == 0 {
        return 0.0;
    }
    let nf = n as f64;
    if i < n {
        i as f64 * (nf * rho).ln() - ln_fact[i]
    } else {
        nf * nf.ln() + i as f64 * rho.ln() - ln_fact[n]
    }
}

/// Probability that no SU occupies any channel, from the normalising
/// condition of the M/M/N/K stationary distribution.
pub fn su_all_idle_prob(q: &QueueParams) -> Result<f64> {
    q.validate()?;
    if q.lambda_s == 0.0 {
        return Ok(1.0);
    }
    let n = q.n_servers;
    let k = q.k_capacity;
    let rho = q.rho_s();
    let ln_fact = ln_factorials(n);
    let offered = n as f64 * rho;
    let head: f64 = (0..n)
        .map(|i| (i as f64 * offered.ln() - ln_fact[i]).exp())
        .sum();
    let tail_scale = (n as f64 * offered.ln() - ln_fact[n]).exp();
    let geometric = (1.0 - rho.powi((k - n + 1) as i32)) / (1.0 - rho);
    Ok(1.0 / (head + tail_scale * geometric))
}

/// Stationary probability of `h` SUs in the system (equivalently `h`
/// channels occupied by SUs while `h` stays within the server count).
pub fn su_occupancy_dist(q: &QueueParams, h: usize) -> Result<f64> {
    q.validate()?;
    if h > q.k_capacity {
        return Err(Error::param(format!(
            "occupancy {h} exceeds system capacity {}",
            q.k_capacity
        )));
    }
    let p0 = su_all_idle_prob(q)?;
    if h == 0 {
        return Ok(p0);
    }
    if q.lambda_s == 0.0 {
        return Ok(0.0);
    }
    let ln_fact = ln_factorials(q.n_servers.max(h));
    Ok((ln_state_weight(h, q.n_servers, q.rho_s(), &ln_fact) + p0.ln()).exp())
}

/// The full SU occupancy distribution over `0..=k_capacity`.
pub fn su_distribution(q: &QueueParams) -> Result<Vec<f64>> {
    (0..=q.k_capacity)
        .map(|h| su_occupancy_dist(q, h))
        .collect()
}

/// Expected number of channels busy with SU traffic, `E[min(h, N)]`,
/// rounded to the nearest integer.
pub fn expected_active_channels(q: &QueueParams) -> Result<usize> {
    let dist = su_distribution(q)?;
    let mean: f64 = dist
        .iter()
        .enumerate()
        .map(|(h, p)| h.min(q.n_servers) as f64 * p)
        .sum();
    Ok(mean.round() as usize)
}

/// Composes the PU-idle factor with the conditional SU occupancy term:
/// `p_p0 * (h / n_total) * p_sh`.
pub fn compose_link_prob(p_idle: f64, p_sh: f64, h: usize, n_total: usize) -> f64 {
    p_idle * (h as f64 / n_total as f64) * p_sh
}

/// Probability associated with one channel of a link when `h` channels are
/// occupied by SUs. `h = 0` yields 0.
pub fn link_channel_avail_prob(q: &QueueParams, h: usize, n_total: usize) -> Result<f64> {
    if n_total == 0 {
        return Err(Error::param("channel count must be at least 1"));
    }
    if h > n_total {
        return Err(Error::param(format!(
            "{h} occupied channels exceeds the {n_total} available"
        )));
    }
    let p_idle = pu_idle_prob(q)?;
    let p_sh = su_occupancy_dist(q, h)?;
    Ok(compose_link_prob(p_idle, p_sh, h, n_total))
}

/// Connectivity ratio of a node pair: `1 - prod(1 - p_k)`.
pub fn link_connectivity(per_channel: &[f64]) -> Result<f64> {
    let mut miss = 1.0;
    for &p in per_channel {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!(
                "channel probability {p} outside [0, 1]"
            )));
        }
        miss *= 1.0 - p;
    }
    Ok(1.0 - miss)
}

/// Dense `M x M x N` table of per-channel link probabilities `p_ij^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix {
    nodes: usize,
    channels: usize,
    values: Vec<f64>,
}

impl ConnectivityMatrix {
    /// All off-diagonal entries zero, diagonal entries one.
    pub fn new(nodes: usize, channels: usize) -> Self {
        let mut m = ConnectivityMatrix {
            nodes,
            channels,
            values: vec![0.0; nodes * nodes * channels],
        };
        for i in 0..nodes {
            for k in 0..channels {
                m.values[(i * nodes + i) * channels + k] = 1.0;
            }
        }
        m
    }

    /// Every ordered pair `i != j` shares the same per-channel values.
    pub fn uniform(nodes: usize, per_channel: &[f64]) -> Self {
        let channels = per_channel.len();
        let mut m = ConnectivityMatrix::new(nodes, channels);
        for i in 0..nodes {
            for j in 0..nodes {
                if i != j {
                    let base = (i * nodes + j) * channels;
                    m.values[base..base + channels].copy_from_slice(per_channel);
                }
            }
        }
        m
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.nodes + j) * self.channels + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!(
                "channel probability {p} outside [0, 1]"
            )));
        }
        if i >= self.nodes || j >= self.nodes || k >= self.channels {
            return Err(Error::param("connectivity index out of range"));
        }
        self.values[(i * self.nodes + j) * self.channels + k] = p;
        Ok(())
    }

    pub fn pair(&self, i: usize, j: usize) -> &[f64] {
        let base = (i * self.nodes + j) * self.channels;
        &self.values[base..base + self.channels]
    }

    /// Connectivity ratio of the ordered pair.
    pub fn pair_connectivity(&self, i: usize, j: usize) -> f64 {
        let miss: f64 = self.pair(i, j).iter().map(|p| 1.0 - p).product();
        1.0 - miss
    }
}

/// Mean of `p_ij^k` over ordered pairs `i != j` and all channels.
pub fn mean_connectivity(matrix: &ConnectivityMatrix) -> Result<f64> {
    let m = matrix.nodes();
    let n = matrix.channels();
    if m < 2 {
        return Err(Error::param("mean connectivity needs at least two nodes"));
    }
    if n == 0 {
        return Err(Error::param("mean connectivity needs at least one channel"));
    }
    // Accumulate deviations from the first entry so a constant matrix
    // returns its value without rounding drift.
    let shift = matrix.get(0, 1, 0);
    let mut dev = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                dev += matrix.pair(i, j).iter().map(|p| p - shift).sum::<f64>();
            }
        }
    }
    Ok(shift + dev / (n as f64 * m as f64 * (m - 1) as f64))
}
