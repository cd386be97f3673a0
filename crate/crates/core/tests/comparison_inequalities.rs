mod common;

use common::{exp_draws, random_field};
use lpp_core::lpp::lpp_passage;
use lpp_core::stationary::{induced_boundary, stationary_passage, BoundaryWeights};
use lpp_core::{Coord, Orientation, PassageField, Rect, RngStream, WeightField};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn from(wf: &WeightField<f64>, o: Coord) -> PassageField<f64> {
    lpp_passage(wf, o, Orientation::Forward).unwrap()
}

fn stationary_instance(seed: u64, w: usize, h: usize) -> (WeightField<f64>, BoundaryWeights<f64>) {
    let mut rng = RngStream::new(seed, 77).rng();
    let rho = 0.1 + 0.8 * rng.uniform();
    let raw = random_field(seed, w, h);
    let bulk = WeightField::new(Rect::with_size(Coord::new(1, 1), w, h).unwrap(), raw.values().to_vec()).unwrap();
    let b = BoundaryWeights::new(
        Coord::ORIGIN,
        Orientation::Forward,
        exp_draws(&mut rng, 1.0 - rho, w),
        exp_draws(&mut rng, rho, h),
    )
    .unwrap();
    (bulk, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn crossing_inequalities(seed in 0u64..1_000_000, w in 2usize..12, h in 2usize..12) {
        let wf = random_field(seed, w, h);
        let g0 = from(&wf, Coord::ORIGIN);
        let g1 = from(&wf, Coord::E1);
        let g2 = from(&wf, Coord::E2);
        for x in wf.rect().iter().filter(|x| x.x >= 1 && x.y >= 1) {
            let up = x + Coord::E2;
            if wf.rect().contains(up) {
                let (a, b, c) = (g1.at(up) - g1.at(x), g0.at(up) - g0.at(x), g2.at(up) - g2.at(x));
                prop_assert!(a <= b + TOL && b <= c + TOL, "vertical chain at {}", x);
            }
            let right = x + Coord::E1;
            if wf.rect().contains(right) {
                let (a, b, c) = (g2.at(right) - g2.at(x), g0.at(right) - g0.at(x), g1.at(right) - g1.at(x));
                prop_assert!(a <= b + TOL && b <= c + TOL, "horizontal chain at {}", x);
            }
        }
    }

    #[test]
    fn axis_perturbation_is_monotone(seed in 0u64..1_000_000, w in 2usize..12, h in 2usize..12) {
        let wf = random_field(seed, w, h);
        let mut rng = RngStream::new(seed, 5).rng();
        let mut tilted = wf.clone();
        for c in wf.rect().iter() {
            if c.y == 0 && c.x > 0 {
                tilted.set(c, wf.at(c) * rng.uniform()).unwrap();
            } else if c.x == 0 && c.y > 0 {
                tilted.set(c, wf.at(c) + 2.0 * rng.uniform()).unwrap();
            }
        }
        let g = from(&wf, Coord::ORIGIN);
        let gt = from(&tilted, Coord::ORIGIN);
        for y in wf.rect().iter() {
            if y.x > 0 {
                prop_assert!(g.at(y) - g.at(y - Coord::E1) >= gt.at(y) - gt.at(y - Coord::E1) - TOL);
            }
            if y.y > 0 {
                prop_assert!(g.at(y) - g.at(y - Coord::E2) <= gt.at(y) - gt.at(y - Coord::E2) + TOL);
            }
        }
    }

    #[test]
    fn induced_field_decomposes_passage(seed in 0u64..1_000_000, w in 2usize..10, h in 2usize..10, vx in 0i64..9, vy in 0i64..9) {
        let (bulk, b) = stationary_instance(seed, w, h);
        let g = stationary_passage(&bulk, &b).unwrap();
        let v = Coord::new(vx.min(w as i64 - 1), vy.min(h as i64 - 1));
        let ib = induced_boundary(&g, v).unwrap();
        let sub = bulk.restrict(Rect::new(v + Coord::new(1, 1), bulk.rect().hi()).unwrap()).unwrap();
        let gi = stationary_passage(&sub, &ib).unwrap();
        for y in gi.rect().iter() {
            prop_assert!((g.at(y) - (g.at(v) + gi.at(y))).abs() < TOL);
        }
    }

    #[test]
    fn exit_points_shift_along_both_axes(seed in 0u64..1_000_000, w in 3usize..10, h in 3usize..10, k in 1i64..8, axis1 in any::<bool>()) {
        let (bulk, b) = stationary_instance(seed, w, h);
        let g = stationary_passage(&bulk, &b).unwrap();
        let limit = if axis1 { w } else { h } as i64;
        let k = k.min(limit - 1);
        let v = if axis1 { Coord::new(k, 0) } else { Coord::new(0, k) };
        let ib = induced_boundary(&g, v).unwrap();
        let sub = bulk.restrict(Rect::new(v + Coord::new(1, 1), bulk.rect().hi()).unwrap()).unwrap();
        let gi = stationary_passage(&sub, &ib).unwrap();
        for p in sub.rect().iter() {
            let z = g.exit_point(p).unwrap();
            let zi = gi.exit_point(p).unwrap();
            if axis1 {
                prop_assert_eq!(z > k, zi > 0);
                if zi > 0 {
                    prop_assert_eq!(z, k + zi);
                }
            } else {
                prop_assert_eq!(z < -k, zi < 0);
                if zi < 0 {
                    prop_assert_eq!(z, zi - k);
                }
            }
        }
    }
}
