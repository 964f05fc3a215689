use proptest::prelude::*;

use crn_core::capacity::{
    consumed_links, consumed_nodes_avg, network_capacity, sensing_factor, CapacityParams,
    ConsumptionParams,
};

fn params() -> impl Strategy<Value = CapacityParams> {
    (
        0.1..100.0f64,
        0.0..0.1f64,
        0.0..1.0f64,
        0.0..1.0f64,
        0.05..0.95f64,
        0.5..16.0f64,
        1usize..500,
    )
        .prop_map(|(t0, tau, p_f, p_d, p_h0, f, m)| CapacityParams {
            t0,
            tau,
            t_slot: 0.1,
            p_f,
            p_d,
            p_h0,
            p_h1: None,
            factor_f: f,
            m,
        })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn capacity_is_linear_in_m_and_t0(p in params(), k in 1.0..12.0f64, c in 0.0..=1.0f64, l in 1.0..20.0f64, pa in 0.01..=1.0f64) {
        let base = network_capacity(&p, k, c, l, pa).unwrap().capa;
        let t0x2 = network_capacity(&CapacityParams { t0: 2.0 * p.t0, ..p }, k, c, l, pa).unwrap().capa;
        prop_assert!(close(t0x2, 2.0 * base));
        let mx3 = network_capacity(&CapacityParams { m: 3 * p.m, ..p }, k, c, l, pa).unwrap().capa;
        prop_assert!(close(mx3, 3.0 * base));
    }

    #[test]
    fn capacity_strictly_decreases_in_sensing_time(p in params(), a in 0.0..0.1f64, b in 0.0..0.1f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let sf = (1.0 - p.p_f) * p.p_h0 + (1.0 - p.p_d) * (1.0 - p.p_h0);
        prop_assume!(sf > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let at = |tau| network_capacity(&CapacityParams { tau, ..p }, 4.0, 0.4, 4.0, 0.5).unwrap().capa;
        prop_assert!(at(lo) > at(hi));
        prop_assert_eq!(at(p.t_slot), 0.0);
    }

    #[test]
    fn capacity_strictly_decreases_in_pavg(p in params(), a in 0.01..=1.0f64, b in 0.01..=1.0f64) {
        prop_assume!((a - b).abs() > 1e-9 && sensing_factor(&p).unwrap() > 0.0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let at = |pa| network_capacity(&p, 4.0, 0.4, 4.0, pa).unwrap().capa;
        prop_assert!(at(lo) > at(hi));
    }

    #[test]
    fn node_consumption_is_link_consumption_over_degree(k in 1.0..20.0f64, c in 0.0..=1.0f64) {
        let f = consumed_links(k, k, c, c, &ConsumptionParams::default()).unwrap();
        let k0 = consumed_nodes_avg(k, c, 1.0).unwrap();
        prop_assert!((k0 * k - f).abs() <= 1e-12 * f.max(1.0), "k0*k = {} vs f = {}", k0 * k, f);
    }

    #[test]
    fn effective_capacity_times_path_length_is_capacity(p in params(), k in 1.0..12.0f64, c in 0.0..=1.0f64, l in 1.0..50.0f64, pa in 0.01..=1.0f64) {
        let r = network_capacity(&p, k, c, l, pa).unwrap();
        prop_assert!(close(r.capa_e * r.l_g, r.capa));
        prop_assert!(r.capa >= 0.0);
    }

    #[test]
    fn sensing_factor_is_a_fraction(p in params()) {
        let s = sensing_factor(&p).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
    }
}

#[test]
fn out_of_domain_inputs_are_rejected() {
    let p = CapacityParams::default();
    assert!(network_capacity(&p, 4.0, 0.4, 0.5, 0.5).is_err());
    assert!(network_capacity(&p, 4.0, 0.4, 4.0, 0.0).is_err());
    assert!(network_capacity(&CapacityParams { tau: 0.2, ..p }, 4.0, 0.4, 4.0, 0.5).is_err());
    assert!(consumed_links(0.5, 4.0, 0.4, 0.4, &ConsumptionParams::default()).is_err());
    assert!(ConsumptionParams::new(1.5, 0.5).is_err());
}
