//! Generate a deployment, measure it and round-trip the graph file.

use crn_core::topology::{generate_topology, topology_metrics, DeploymentParams, Topology};

fn main() -> crn_core::Result<()> {
    let params = DeploymentParams::default();
    let t = generate_topology(&params, 42)?;
    let m = topology_metrics(&t);
    let pl = t.su_graph().path_lengths()?;

    println!(
        "SUs: {}, area: {:.0} x {:.0} m",
        t.su_count(),
        t.area.0,
        t.area.1
    );
    println!("mean degree: {:.3}", m.mean_degree);
    println!("clustering:  {:.3}", m.clustering);
    println!(
        "path length: {:.3} hops over connected pairs ({:.0}% of pairs), {:.3} harmonic",
        pl.mean_hops,
        100.0 * pl.connected_fraction(),
        pl.harmonic_hops()
    );
    println!("centre SU: {:?}", t.center_su());

    let text = t.to_graph_text();
    let back = Topology::from_graph_text(&text)?;
    assert_eq!(back, t);
    println!("\ngraph file ({} lines), first five:", text.lines().count());
    for line in text.lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
