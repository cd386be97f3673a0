use lpp_core::busemann::{build_coupled_pair, sandwich_violation, CoupledPair};
use lpp_core::geodesics::forest_from_field;
use lpp_core::stationary::{induced_boundary, stationary_passage};
use lpp_core::stats::{exponential_cdf, ks_critical_value, ks_distance};
use lpp_core::{Coord, Rect, RngStream};

fn pair(seed: u64, n: f64, r: f64) -> CoupledPair<f64> {
    build_coupled_pair(RngStream::new(seed, 0), (0.5, 0.5), n, r).unwrap()
}

#[test]
fn increments_are_ordered_on_every_edge() {
    for seed in 0..10 {
        let p = pair(seed, 300.0, 1.5);
        for x in p.field_lo.rect().iter() {
            if let (Some(lo), Some(hi)) = (p.incr_lo.across1(x), p.incr_hi.across1(x)) {
                assert!(hi >= lo, "row edge at {x}");
            }
            if let (Some(lo), Some(hi)) = (p.incr_lo.across2(x), p.incr_hi.across2(x)) {
                assert!(lo >= hi, "column edge at {x}");
            }
        }
    }
}

#[test]
fn dominant_row_has_the_stationary_marginal() {
    let p = pair(3, 8000.0, 1.0);
    let crit = ks_critical_value(p.boundary_hi.along1.len(), 0.01);
    assert!(ks_distance(&p.boundary_hi.along1, |x| exponential_cdf(x, 1.0 - p.rho_hi)) < crit);
    assert!(ks_distance(&p.boundary_lo.along1, |x| exponential_cdf(x, 1.0 - p.rho_lo)) < crit);
    assert!(ks_distance(&p.boundary_lo.along2, |x| exponential_cdf(x, p.rho_lo)) < crit);
}

#[test]
fn recursion_increments_match_induced_boundary() {
    let p = pair(5, 400.0, 1.0);
    for m in [10.0, 40.0, 120.0] {
        let c = p.box_corner(m).unwrap();
        let v = c + Coord::new(1, 1);
        let ib = induced_boundary(&p.field_lo, v).unwrap();
        for (k, val) in ib.along1.iter().enumerate() {
            let x = v - Coord::new(k as i64 + 1, 0);
            assert!((p.incr_lo.across1(x).unwrap() - val).abs() < 1e-9);
        }
        for (k, val) in ib.along2.iter().enumerate() {
            let x = v - Coord::new(0, k as i64 + 1);
            assert!((p.incr_lo.across2(x).unwrap() - val).abs() < 1e-9);
        }
    }
}

#[test]
fn corner_exits_decide_the_whole_box() {
    for seed in 0..40 {
        let p = pair(seed, 120.0, 1.0);
        let m = 30.0;
        let c = p.box_corner(m).unwrap();
        let boxr = Rect::new(Coord::ORIGIN, c).unwrap();
        let sup_lo = boxr.iter().map(|x| p.field_lo.exit_point(x).unwrap()).max().unwrap();
        let inf_hi = boxr.iter().map(|x| p.field_hi.exit_point(x).unwrap()).min().unwrap();
        assert_eq!(p.event_a(m).unwrap(), sup_lo < 0 && inf_hi > 0);
    }
}

#[test]
fn inflated_column_forces_event_a_false() {
    let mut p = pair(1, 200.0, 2.0);
    for v in p.boundary_hi.along2.iter_mut() {
        *v *= 1e3;
    }
    p.field_hi = stationary_passage(&p.bulk, &p.boundary_hi).unwrap();
    assert!(p.field_hi.exit_point(Coord::new(p.box_corner(20.0).unwrap().x, 0)).unwrap() < 0);
    assert!(!p.event_a(20.0).unwrap());
}

#[test]
fn distant_densities_almost_always_satisfy_event_a() {
    let hits = (0..30)
        .filter(|s| build_coupled_pair::<f64>(RngStream::new(*s, 1), (0.5, 0.5), 64.0, 1.6).unwrap().event_a(4.0).unwrap())
        .count();
    assert!(hits >= 28, "{hits}");
}

#[test]
fn agreement_pins_down_point_to_point_geodesics() {
    let mut stabilized = 0;
    for seed in 0..60 {
        let p = pair(seed, 400.0, 0.8);
        let m = 20.0;
        let ptp = p.point_to_point().unwrap();
        if p.event_a(m).unwrap() {
            assert!(sandwich_violation(&p, &ptp, m).unwrap() < 1e-9);
        }
        if p.stabilized(m).unwrap() {
            stabilized += 1;
            let boxr = Rect::new(Coord::ORIGIN, p.box_corner(m).unwrap()).unwrap();
            let f_ptp = forest_from_field(&ptp);
            let f_lo = forest_from_field(&p.field_lo);
            let f_hi = forest_from_field(&p.field_hi);
            assert!(f_lo.agrees_on(&f_hi, boxr).unwrap());
            assert!(f_ptp.agrees_on(&f_lo, boxr).unwrap());
        }
    }
    assert!(stabilized > 0);
}
