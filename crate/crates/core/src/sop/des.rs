//! Discrete-event simulation of the preemptive-resume priority queue.
//!
//! `n_servers` channels each carry one PU (a two-state loss system: PU
//! arrivals while the PU is busy are lost). SUs share the channels as an
//! M/M/N/K queue. A PU arrival on a channel serving an SU interrupts it; the
//! SU keeps its residual service time and goes back to the head of the SU
//! queue, resuming as soon as any channel is free of both PU and SU.
//!
//! Used as an independent oracle for the closed forms in [`crate::sop`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::QueueParams;
use crate::error::{Error, Result};

/// Time-averaged state occupancy observed by [`des_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesOutcome {
    /// Long-run fraction of time a channel's PU is idle, averaged over channels.
    pub pu_idle_fraction: f64,
    /// Long-run fraction of time with `h` SUs in the system, `h = 0..=K`.
    pub su_occupancy: Vec<f64>,
    pub events: u64,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    PuArrival(usize),
    PuDeparture(usize),
    SuArrival,
    SuCompletion { channel: usize, generation: u64 },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: Kind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Min-heap on (time, seq).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Channel {
    pu_busy: bool,
    /// Completion time of the SU in service, with its generation tag.
    su: Option<(f64, u64)>,
}

struct Sim {
    rng: ChaCha8Rng,
    heap: BinaryHeap<Event>,
    seq: u64,
    now: f64,
    channels: Vec<Channel>,
    /// Waiting SUs; `Some(residual)` for interrupted ones.
    waiting: VecDeque<Option<f64>>,
    in_system: usize,
    generation: u64,
    pu_service: Exp<f64>,
    su_service: Exp<f64>,
}

impl Sim {
    fn schedule(&mut self, delay: f64, kind: Kind) {
        self.seq += 1;
        self.heap.push(Event {
            time: self.now + delay,
            seq: self.seq,
            kind,
        });
    }

    fn dispatch(&mut self) {
        while !self.waiting.is_empty() {
            let Some(ch) = self
                .channels
                .iter()
                .position(|c| !c.pu_busy && c.su.is_none())
            else {
                return;
            };
            let residual = self.waiting.pop_front().flatten();
            let service = match residual {
                Some(r) => r,
                None => self.su_service.sample(&mut self.rng),
            };
            self.generation += 1;
            let generation = self.generation;
            self.channels[ch].su = Some((self.now + service, generation));
            self.schedule(
                service,
                Kind::SuCompletion {
                    channel: ch,
                    generation,
                },
            );
        }
    }
}

/// Runs the two-priority queue for `horizon` processed events.
///
/// Deterministic for a given `seed`.
pub fn des_oracle(q: &QueueParams, horizon: u64, seed: u64) -> Result<DesOutcome> {
    q.validate()?;
    if horizon == 0 {
        return Err(Error::param("horizon must be at least one event"));
    }
    let n = q.n_servers;
    let exp = |rate: f64| Exp::new(rate).map_err(|e| Error::param(e.to_string()));
    let pu_arrival = if q.lambda_p > 0.0 {
        Some(exp(q.lambda_p)?)
    } else {
        None
    };
    let su_arrival = if q.lambda_s > 0.0 {
        Some(exp(q.lambda_s)?)
    } else {
        None
    };

    let mut sim = Sim {
        rng: ChaCha8Rng::seed_from_u64(seed),
        heap: BinaryHeap::new(),
        seq: 0,
        now: 0.0,
        channels: vec![Channel::default(); n],
        waiting: VecDeque::new(),
        in_system: 0,
        generation: 0,
        pu_service: exp(q.mu_p)?,
        su_service: exp(q.mu_s)?,
    };

    if let Some(d) = pu_arrival {
        for ch in 0..n {
            let t = d.sample(&mut sim.rng);
            sim.schedule(t, Kind::PuArrival(ch));
        }
    }
    if let Some(d) = su_arrival {
        let t = d.sample(&mut sim.rng);
        sim.schedule(t, Kind::SuArrival);
    }

    let mut pu_idle_time = 0.0;
    let mut occupancy = vec![0.0; q.k_capacity + 1];
    let mut events = 0u64;

    if sim.heap.is_empty() {
        // No traffic at all: the empty state persists.
        occupancy[0] = 1.0;
        return Ok(DesOutcome {
            pu_idle_fraction: 1.0,
            su_occupancy: occupancy,
            events: 0,
            elapsed: 0.0,
        });
    }

    while events < horizon {
        let Some(ev) = sim.heap.pop() else { break };
        if let Kind::SuCompletion {
            channel,
            generation,
        } = ev.kind
        {
            if sim.channels[channel].su.map(|(_, g)| g) != Some(generation) {
                continue;
            }
        }

        let dt = ev.time - sim.now;
        let idle = sim.channels.iter().filter(|c| !c.pu_busy).count();
        pu_idle_time += dt * idle as f64 / n as f64;
        occupancy[sim.in_system] += dt;
        sim.now = ev.time;
        events += 1;

        match ev.kind {
            Kind::PuArrival(ch) => {
                if !sim.channels[ch].pu_busy {
                    sim.channels[ch].pu_busy = true;
                    if let Some((done, _)) = sim.channels[ch].su.take() {
                        sim.waiting.push_front(Some(done - sim.now));
                    }
                    let service = sim.pu_service.sample(&mut sim.rng);
                    sim.schedule(service, Kind::PuDeparture(ch));
                }
                if let Some(d) = pu_arrival {
                    let t = d.sample(&mut sim.rng);
                    sim.schedule(t, Kind::PuArrival(ch));
                }
            }
            Kind::PuDeparture(ch) => {
                sim.channels[ch].pu_busy = false;
                sim.dispatch();
            }
            Kind::SuArrival => {
                if sim.in_system < q.k_capacity {
                    sim.in_system += 1;
                    sim.waiting.push_back(None);
                    sim.dispatch();
                }
                if let Some(d) = su_arrival {
                    let t = d.sample(&mut sim.rng);
                    sim.schedule(t, Kind::SuArrival);
                }
            }
            Kind::SuCompletion { channel, .. } => {
                sim.channels[channel].su = None;
                sim.in_system -= 1;
                sim.dispatch();
            }
        }
    }

    let elapsed = sim.now;
    if elapsed <= 0.0 {
        return Err(Error::param("simulation did not advance"));
    }
    for v in &mut occupancy {
        *v /= elapsed;
    }
    Ok(DesOutcome {
        pu_idle_fraction: pu_idle_time / elapsed,
        su_occupancy: occupancy,
        events,
        elapsed,
    })
}
