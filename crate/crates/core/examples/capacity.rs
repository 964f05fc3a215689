//! Capacity of the secondary network from graph metrics, and how it moves
//! with sensing time and path length.

use crn_core::capacity::{
    consumed_links, consumed_nodes_avg, mrmc_factor, network_capacity, sensing_factor,
    CapacityParams, CapacityReport, ConsumptionParams, FactorPolicy,
};

fn main() -> crn_core::Result<()> {
    let p = CapacityParams::default();
    let f = consumed_links(4.0, 4.0, 0.4, 0.4, &ConsumptionParams::default())?;
    println!("links consumed per transmission: {f:.3}");
    println!(
        "nodes consumed (p_avg = 1):       {:.3}",
        consumed_nodes_avg(4.0, 0.4, 1.0)?
    );
    println!(
        "sensing factor:                  {:.4}",
        sensing_factor(&p)?
    );
    println!(
        "F: min policy {}, scaling-ratio policy {:.3}",
        mrmc_factor(4, 12, FactorPolicy::MinRadiosChannels)?,
        mrmc_factor(4, 12, "scaling-ratio".parse()?)?
    );

    println!("\n{}", CapacityReport::CSV_HEADER);
    let r = network_capacity(&p, 4.0, 0.4, 4.0, 0.5)?;
    println!("{}", r.to_csv_row());

    println!("\ntau (ms)  Capa (Mbps)");
    for ms in [0, 10, 20, 50, 100] {
        let q = CapacityParams {
            tau: f64::from(ms) / 1000.0,
            ..p
        };
        println!(
            "{ms:>8}  {:>11.2}",
            network_capacity(&q, 4.0, 0.4, 4.0, 0.5)?.capa
        );
    }

    println!("\nL(G)  Capa_e (Mbps)");
    for l in [2.0, 4.0, 8.0, 16.0] {
        println!(
            "{l:>4}  {:>13.2}",
            network_capacity(&p, 4.0, 0.4, l, 0.5)?.capa_e
        );
    }
    Ok(())
}
