//! Slot-based flooding from the centre SU with and without shortcuts.

use crn_core::assignment::{assign_network, estimate_timings, Policy};
use crn_core::dissemination::{latency_ratio, run_dissemination, SimConfig};
use crn_core::shortcuts::{build_plan_nsc, GeometryParams, Method, PairConnectivity, ShortcutPlan};
use crn_core::sop::{pu_idle_prob, ChannelModel};
use crn_core::topology::{generate_topology, DeploymentParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> crn_core::Result<()> {
    let t = generate_topology(&DeploymentParams::default(), 11)?;
    let model = ChannelModel::random(12, 0.2, 1.0, 100, 2e6, &mut ChaCha8Rng::seed_from_u64(11))?;
    let timings = estimate_timings(&model.channels, 8.0 * 1024.0, 2e6)?;
    let busy: Vec<f64> = model
        .channels
        .iter()
        .map(|q| pu_idle_prob(q).map(|p| 1.0 - p))
        .collect::<crn_core::Result<_>>()?;
    let conn = PairConnectivity::from_channel_probs(&t, &model.channel_link_probs()?)?;
    let dest = t.center_su().expect("deployment has SUs");

    let cfg = SimConfig {
        source: dest,
        slot_length: 0.1,
        max_slots: 10_000,
        pu_busy_prob: busy,
        seed: 5,
    };
    let none = ShortcutPlan::empty(Method::Nsc);
    let plan = build_plan_nsc(&t, &GeometryParams::new(30.0, dest)?, &conn, 30, 5);

    let mut results = Vec::new();
    for (name, p) in [("no shortcuts", &none), ("NSC", &plan)] {
        let a = assign_network(&t, &timings, Some(p), Policy::Slack)?;
        let r = run_dissemination(&t, p, &a, &timings, &cfg)?;
        println!(
            "{name:<13} shortcuts {:>2}  reachable {:>3}  latency {:?} slots ({:?} s)  covered {:.2}",
            p.len(),
            r.reachable,
            r.latency_slots,
            r.latency_seconds(cfg.slot_length),
            r.covered_fraction
        );
        results.push(r);
    }
    match latency_ratio(&results[1], &results[0]) {
        Ok(ratio) => println!("latency ratio: {ratio:.3}"),
        Err(e) => println!("latency ratio undefined: {e}"),
    }
    Ok(())
}
