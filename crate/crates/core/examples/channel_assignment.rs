//! Slack-ordered and random channel assignment for a small hand-built
//! network, plus reassignment after a PU claims a channel.

use std::collections::BTreeSet;

use crn_core::assignment::{
    assign_network, realized_graph, reassign_on_pu_arrival, ChannelTiming, Policy,
};
use crn_core::shortcuts::{Method, ShortcutPlan};
use crn_core::topology::{Node, NodeKind, Topology};

fn su(id: usize, x: f64, channels: &[usize]) -> Node {
    Node {
        id,
        x,
        y: 0.0,
        kind: NodeKind::Secondary,
        tx_range: 50.0,
        radios: 2,
        available_channels: channels.iter().copied().collect(),
    }
}

fn main() -> crn_core::Result<()> {
    let nodes = vec![
        su(0, 0.0, &[0, 1, 2]),
        su(1, 40.0, &[0, 1, 3]),
        su(2, 80.0, &[1, 2, 3]),
        su(3, 120.0, &[2, 3]),
    ];
    let t = Topology::from_parts(nodes, &[(0, 1), (1, 2), (2, 3)], (200.0, 10.0), 4, 0)?;
    // Channel 3 has PU arrivals too frequent to fit a packet (negative slack).
    let timings = vec![
        ChannelTiming::new(0, 8.0, 1.0)?,
        ChannelTiming::new(1, 2.0, 1.0)?,
        ChannelTiming::new(2, 5.0, 1.0)?,
        ChannelTiming::new(3, 0.5, 1.0)?,
    ];
    let mut plan = ShortcutPlan::empty(Method::Nsc);
    plan.shortcuts.push((0, 3));

    let ca = assign_network(&t, &timings, Some(&plan), Policy::Slack)?;
    let rnd = assign_network(&t, &timings, Some(&plan), Policy::Random(9))?;
    println!("slack-ordered:\n{}", ca.to_text());
    println!("random:\n{}", rnd.to_text());
    for (name, a) in [("slack", &ca), ("random", &rnd)] {
        let g = realized_graph(&t, a, &timings, Some(&plan));
        println!("{name}: usable links {:?}", g.edges().collect::<Vec<_>>());
    }

    // A PU arrives on channel 1 near node 1.
    let updated = t.with_availability([(1, BTreeSet::from([0, 3]))])?;
    let after = reassign_on_pu_arrival(&ca, &updated, &[1], &timings, Some(&plan), Policy::Slack)?;
    println!(
        "\nafter PU arrival on channel 1 at node 1:\n{}",
        after.to_text()
    );
    Ok(())
}
