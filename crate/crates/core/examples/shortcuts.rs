//! Build shortcut plans with the three creation methods on one deployment
//! and compare their path-length reduction and signalling cost.

use crn_core::shortcuts::{
    build_plan_nsc, build_plan_rs, build_plan_wide, select_hubs, GeometryParams, PairConnectivity,
    ShortcutPlan,
};
use crn_core::sop::ChannelModel;
use crn_core::topology::{generate_topology, DeploymentParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> crn_core::Result<()> {
    let t = generate_topology(&DeploymentParams::default(), 3)?;
    let model = ChannelModel::random(12, 0.2, 1.0, 100, 2e6, &mut ChaCha8Rng::seed_from_u64(3))?;
    let conn = PairConnectivity::from_channel_probs(&t, &model.channel_link_probs()?)?;
    let dest = t.center_su().expect("deployment has SUs");
    let geo = GeometryParams::new(30.0, dest)?;

    println!(
        "destination {dest}, {} hubs",
        select_hubs(&t, usize::MAX).len()
    );
    let base = t.su_graph().path_lengths()?.harmonic_hops();
    let plans = [
        build_plan_nsc(&t, &geo, &conn, 20, 1),
        build_plan_wide(&t, &geo, 20, 1),
        build_plan_rs(&t, 20, 1),
    ];
    println!("method  shortcuts  messages  L(N)/L(0)");
    for plan in &plans {
        let l = t
            .su_graph()
            .with_edges(plan.edges())
            .path_lengths()?
            .harmonic_hops();
        println!(
            "{:<6}  {:>9}  {:>8}  {:>9.3}",
            plan.method.to_string(),
            plan.len(),
            plan.messages.total(),
            l / base
        );
    }

    let text = plans[0].to_text();
    assert_eq!(ShortcutPlan::from_text(&text)?, plans[0]);
    println!("\nNSC plan file:\n{text}");
    Ok(())
}
