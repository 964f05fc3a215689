//! Per-channel spectrum-opportunity quantities and a check against the
//! event-driven queue.
//!
//! ```text
//! cargo run --example queueing
//! ```

use crn_core::sop::des::des_oracle;
use crn_core::sop::{
    expected_active_channels, link_channel_avail_prob, link_connectivity, pu_idle_prob,
    su_distribution, QueueParams,
};

fn main() -> crn_core::Result<()> {
    // Three channels, SU queue holds up to six.
    let q = QueueParams::new(0.2, 0.6, 1.0, 1.0, 3, 6)?;
    println!("rho_p = {:.3}, rho_s = {:.3}", q.rho_p(), q.rho_s());
    println!("PU idle probability: {:.4}", pu_idle_prob(&q)?);

    let dist = su_distribution(&q)?;
    let h = expected_active_channels(&q)?;
    println!("SU occupancy distribution: {dist:.4?}");
    println!("expected active SU channels h = {h}");

    let per_channel = link_channel_avail_prob(&q, h, q.n_servers)?;
    println!("per-channel link probability: {per_channel:.4}");
    let conn = link_connectivity(&[per_channel; 3])?;
    println!("connectivity over 3 common channels: {conn:.4}");

    // The SU distribution is the plain M/M/N/K solution, so compare it with
    // a run that has no PU traffic; PU idleness is checked separately.
    let su_only = QueueParams { lambda_p: 0.0, ..q };
    let sim = des_oracle(&su_only, 1_000_000, 7)?;
    println!("\nstate  closed-form  simulated");
    for (h, (a, b)) in dist.iter().zip(&sim.su_occupancy).enumerate() {
        println!("{h:>5}  {a:>11.4}  {b:>9.4}");
    }
    let pu = des_oracle(&QueueParams::pu_only(q.lambda_p, q.mu_p), 1_000_000, 7)?;
    println!(
        "PU idle: closed-form {:.4}, simulated {:.4}",
        pu_idle_prob(&q)?,
        pu.pu_idle_fraction
    );
    Ok(())
}
