mod common;

use common::{brute_force, exp_draws, random_field};
use lpp_core::lpp::{lpp_passage, passage_value};
use lpp_core::stationary::{stationary_passage, BoundaryWeights};
use lpp_core::{Coord, Orientation, Rect, RngStream, WeightField};
use proptest::prelude::*;

fn signed_exit(path: &[Coord], corner: Coord) -> i64 {
    let rel: Vec<Coord> = path.iter().map(|c| *c - corner).collect();
    if rel[1].y == 0 {
        rel.iter().take_while(|c| c.y == 0).count() as i64 - 1
    } else {
        -(rel.iter().take_while(|c| c.x == 0).count() as i64 - 1)
    }
}

#[test]
fn forward_values_and_geodesics_match_enumeration() {
    for seed in 0..300u64 {
        let (w, h) = (1 + (seed % 6) as usize, 1 + (seed / 6 % 6) as usize);
        let wf = random_field(seed, w, h);
        let g = lpp_passage(&wf, Coord::ORIGIN, Orientation::Forward).unwrap();
        for y in wf.rect().iter() {
            let (best, path) = brute_force(|c| wf.at(c), Coord::ORIGIN, y);
            assert!((g.at(y) - best).abs() < 1e-9);
            assert_eq!(g.geodesic(y).unwrap(), path);
        }
    }
}

#[test]
fn reversed_values_match_enumeration_of_reflected_paths() {
    for seed in 0..100u64 {
        let wf = random_field(seed, 5, 4);
        let o = wf.rect().hi();
        let g = lpp_passage(&wf, o, Orientation::Reversed).unwrap();
        for y in wf.rect().iter() {
            let (best, mut path) = brute_force(|c| wf.at(c), y, o);
            assert!((g.at(y) - best).abs() < 1e-9);
            path.reverse();
            assert_eq!(g.geodesic(y).unwrap(), path);
        }
    }
}

fn folded_forward<'a>(bulk: &'a WeightField<f64>, b: &'a BoundaryWeights<f64>) -> impl Fn(Coord) -> f64 + 'a {
    move |c: Coord| {
        let r = c - b.corner;
        match (r.x, r.y) {
            (0, 0) => 0.0,
            (k, 0) => b.along1[k as usize - 1],
            (0, l) => b.along2[l as usize - 1],
            _ => bulk.at(c),
        }
    }
}

#[test]
fn stationary_values_and_exit_points_match_enumeration() {
    for seed in 0..200u64 {
        let mut rng = RngStream::new(seed, 1).rng();
        let rho = 0.2 + 0.6 * rng.uniform();
        let bulk = random_field(seed + 10_000, 4, 5);
        let bulk = WeightField::new(Rect::with_size(Coord::new(1, 1), 4, 5).unwrap(), bulk.values().to_vec()).unwrap();
        let b = BoundaryWeights::new(
            Coord::ORIGIN,
            Orientation::Forward,
            exp_draws(&mut rng, 1.0 - rho, 4),
            exp_draws(&mut rng, rho, 5),
        )
        .unwrap();
        let g = stationary_passage(&bulk, &b).unwrap();
        let w = folded_forward(&bulk, &b);
        for y in g.rect().iter().filter(|y| *y != Coord::ORIGIN) {
            let (best, path) = brute_force(&w, Coord::ORIGIN, y);
            assert!((g.at(y) - best).abs() < 1e-9);
            assert_eq!(g.exit_point(y).unwrap(), signed_exit(&path, Coord::ORIGIN));
        }
    }
}

#[test]
fn reversed_stationary_exit_points_match_enumeration() {
    for seed in 0..200u64 {
        let mut rng = RngStream::new(seed, 2).rng();
        let rho = 0.2 + 0.6 * rng.uniform();
        let bulk = random_field(seed + 20_000, 5, 3);
        let corner = Coord::new(5, 3);
        let b = BoundaryWeights::new(
            corner,
            Orientation::Reversed,
            exp_draws(&mut rng, 1.0 - rho, 5),
            exp_draws(&mut rng, rho, 3),
        )
        .unwrap();
        let g = stationary_passage(&bulk, &b).unwrap();
        // Reflect through the corner so down-left paths become up-right ones.
        let reflect = |c: Coord| corner - c;
        let w = |c: Coord| {
            let p = corner - c;
            match (c.x, c.y) {
                (0, 0) => 0.0,
                (k, 0) => b.along1[k as usize - 1],
                (0, l) => b.along2[l as usize - 1],
                _ => bulk.at(p),
            }
        };
        for y in g.rect().iter().filter(|y| *y != corner) {
            let (best, path) = brute_force(w, Coord::ORIGIN, reflect(y));
            assert!((g.at(y) - best).abs() < 1e-9);
            assert_eq!(g.exit_point(y).unwrap(), signed_exit(&path, Coord::ORIGIN));
        }
    }
}

proptest! {
    #[test]
    fn recursion_holds_at_every_interior_point(seed in 0u64..10_000, w in 2usize..20, h in 2usize..20) {
        let wf = random_field(seed, w, h);
        let g = lpp_passage(&wf, Coord::ORIGIN, Orientation::Forward).unwrap();
        for y in wf.rect().iter().filter(|c| c.x > 0 && c.y > 0) {
            let expect = wf.at(y) + g.at(y - Coord::E1).max(g.at(y - Coord::E2));
            prop_assert_eq!(g.at(y), expect);
        }
    }

    #[test]
    fn passage_is_superadditive_through_any_point(seed in 0u64..10_000, vx in 0i64..8, vy in 0i64..8) {
        let wf = random_field(seed, 8, 8);
        let o = Coord::ORIGIN;
        let y = wf.rect().hi();
        let v = Coord::new(vx, vy);
        let total = passage_value(&wf, o, y).unwrap();
        let split = passage_value(&wf, o, v).unwrap() + passage_value(&wf, v, y).unwrap() - wf.at(v);
        prop_assert!(total >= split - 1e-9);
    }

    #[test]
    fn geodesic_weight_equals_passage_value(seed in 0u64..10_000, w in 1usize..15, h in 1usize..15) {
        let wf = random_field(seed, w, h);
        let g = lpp_passage(&wf, Coord::ORIGIN, Orientation::Forward).unwrap();
        let y = wf.rect().hi();
        let path = g.geodesic(y).unwrap();
        prop_assert_eq!(path.len(), w + h - 1);
        let s: f64 = path.iter().map(|c| wf.at(*c)).sum();
        prop_assert!((s - g.at(y)).abs() < 1e-9);
    }
}
