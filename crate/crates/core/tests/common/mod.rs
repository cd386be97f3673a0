//! Reference implementations used as test oracles. Nothing here shares code
//! with the DP kernel.

#![allow(dead_code)]

use lpp_core::{Coord, Rect, RngStream, WeightField};

/// Every up-right path from `o` to `y`, by depth-first enumeration.
pub fn up_right_paths(o: Coord, y: Coord) -> Vec<Vec<Coord>> {
    fn go(c: Coord, y: Coord, cur: &mut Vec<Coord>, out: &mut Vec<Vec<Coord>>) {
        cur.push(c);
        if c == y {
            out.push(cur.clone());
        } else {
            if c.x < y.x {
                go(Coord::new(c.x + 1, c.y), y, cur, out);
            }
            if c.y < y.y {
                go(Coord::new(c.x, c.y + 1), y, cur, out);
            }
        }
        cur.pop();
    }
    let mut out = Vec::new();
    if o.x <= y.x && o.y <= y.y {
        go(o, y, &mut Vec::new(), &mut out);
    }
    out
}

/// Maximal path weight from `o` to `y` and the maximizing path, by enumeration.
pub fn brute_force(w: impl Fn(Coord) -> f64, o: Coord, y: Coord) -> (f64, Vec<Coord>) {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for p in up_right_paths(o, y) {
        let s: f64 = p.iter().map(|c| w(*c)).sum();
        if s > best.0 {
            best = (s, p);
        }
    }
    best
}

/// Exp(1) weights from a plain sequential generator, independent of the
/// library's counter-based cell streams.
pub fn random_field(seed: u64, width: usize, height: usize) -> WeightField<f64> {
    let mut rng = RngStream::new(seed, 0xfeed).rng();
    let rect = Rect::with_size(Coord::ORIGIN, width, height).unwrap();
    let values = (0..rect.len()).map(|_| -rng.uniform().ln()).collect();
    WeightField::new(rect, values).unwrap()
}

pub fn exp_draws(rng: &mut lpp_core::StreamRng, rate: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| -rng.uniform().ln() / rate).collect()
}
