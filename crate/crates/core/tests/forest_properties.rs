mod common;

use std::collections::{BTreeMap, HashSet};

use lpp_core::geodesics::{coalescence_point, forest_from_field, GeodesicForest};
use lpp_core::lpp::lpp_passage;
use lpp_core::{Coord, Orientation, Rect};
use proptest::prelude::*;

fn forest(seed: u64, w: usize, h: usize) -> GeodesicForest {
    let field = common::random_field(seed, w, h);
    let target = field.rect().hi();
    forest_from_field(&lpp_passage(&field, target, Orientation::Reversed).unwrap())
}

/// Highest point of the path in each column.
fn column_tops(path: &[Coord]) -> BTreeMap<i64, i64> {
    let mut tops = BTreeMap::new();
    for c in path {
        let e = tops.entry(c.x).or_insert(c.y);
        *e = (*e).max(c.y);
    }
    tops
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn paths_from_ordered_sources_never_cross(seed in any::<u64>(), w in 2usize..30, h in 2usize..30, a in 0i64..30, b in 0i64..30) {
        let f = forest(seed, w, h);
        let (lo, hi) = (a.min(b) % h as i64, a.max(b) % h as i64);
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let p_lo = column_tops(&f.path_from(Coord::new(0, lo)).unwrap());
        let p_hi = column_tops(&f.path_from(Coord::new(0, hi)).unwrap());
        for (x, y) in &p_lo {
            prop_assert!(*y <= p_hi[x]);
        }
    }

    #[test]
    fn coalescence_point_is_the_first_shared_point(seed in any::<u64>(), w in 2usize..25, h in 2usize..25, q1 in (0i64..25, 0i64..25), q2 in (0i64..25, 0i64..25)) {
        let f = forest(seed, w, h);
        let rect = Rect::with_size(Coord::ORIGIN, w, h).unwrap();
        let q1 = Coord::new(q1.0 % w as i64, q1.1 % h as i64);
        let q2 = Coord::new(q2.0 % w as i64, q2.1 % h as i64);
        prop_assert!(rect.contains(q1) && rect.contains(q2));
        let pc = coalescence_point(&f, q1, q2).unwrap();
        prop_assert_eq!(pc, coalescence_point(&f, q2, q1).unwrap());
        let path1 = f.path_from(q1).unwrap();
        let on2: HashSet<Coord> = f.path_from(q2).unwrap().into_iter().collect();
        let first = path1.iter().position(|c| on2.contains(c)).unwrap();
        prop_assert_eq!(path1[first], pc);
        prop_assert!(path1[first..].iter().all(|c| on2.contains(c)));
    }
}

#[test]
fn identical_sources_coalesce_immediately() {
    let f = forest(3, 6, 6);
    assert_eq!(coalescence_point(&f, Coord::new(2, 1), Coord::new(2, 1)).unwrap(), Coord::new(2, 1));
}
