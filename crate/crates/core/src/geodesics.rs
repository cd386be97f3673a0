//! Geodesic forests, coalescence points and the observables built on them:
//! stabilization of point-to-point trees, coalescence tails and transversal
//! fluctuations.

use crate::error::{invalid, LppError, Result};
use crate::lattice::{Coord, LazyWeights, Rect, RngStream, WeightRows};
use crate::lpp::{sweep, FrameRows, Orientation, PassageField, PlainFrame};
use crate::lpp::BitGrid;
use crate::scalar::Scalar;
use crate::stationary::{density_for_direction, sample_stationary_boundary, BoundaryWeights, StationaryFrame};

/// First steps of the geodesics from every point of `region` to `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicForest {
    target: Coord,
    orientation: Orientation,
    region: Rect,
    dirs: BitGrid,
}

impl GeodesicForest {
    pub fn target(&self) -> Coord {
        self.target
    }

    pub fn region(&self) -> Rect {
        self.region
    }

    /// Whether the first step from `c` runs along axis 1.
    pub fn steps_along_axis1(&self, c: Coord) -> Result<bool> {
        Ok(self.dirs.get(self.region.checked_index(c)?))
    }

    /// Next point on the geodesic from `c` toward the target.
    pub fn next(&self, c: Coord) -> Result<Option<Coord>> {
        if c == self.target {
            return Ok(None);
        }
        let along1 = self.steps_along_axis1(c)?;
        Ok(Some(if along1 {
            c - self.orientation.step1()
        } else {
            c - self.orientation.step2()
        }))
    }

    /// Geodesic from `q` until it reaches the target or leaves the region.
    pub fn path_from(&self, q: Coord) -> Result<Vec<Coord>> {
        self.region.checked_index(q)?;
        let mut path = vec![q];
        let mut c = q;
        while c != self.target && self.region.contains(c) {
            c = self.next(c)?.expect("not at target");
            path.push(c);
        }
        Ok(path)
    }

    /// Whether the two forests send every point of `sub`, except its corner
    /// nearest the target, in the same first direction.
    pub fn agrees_on(&self, other: &GeodesicForest, sub: Rect) -> Result<bool> {
        if !self.region.contains_rect(&sub) || !other.region.contains_rect(&sub) {
            return Err(invalid("sub", format!("{sub} is not covered by both forests")));
        }
        let skip = match self.orientation {
            Orientation::Forward => sub.lo(),
            Orientation::Reversed => sub.hi(),
        };
        for c in sub.iter() {
            if c != skip && self.dirs.get(self.region.index(c)) != other.dirs.get(other.region.index(c)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Forest read off a full passage field; the target is the field origin.
pub fn forest_from_field<T: Scalar>(field: &PassageField<T>) -> GeodesicForest {
    let region = field.rect();
    let mut dirs = BitGrid::new(region.len());
    for (i, c) in region.iter().enumerate() {
        if c != field.origin() && field.dir_bit(c) {
            dirs.set(i, true);
        }
    }
    GeodesicForest {
        target: field.origin(),
        orientation: field.orientation(),
        region,
        dirs,
    }
}

/// Streams a DP frame, keeping backpointers only inside `region`.
pub(crate) fn forest_from_frame<T: Scalar, F: FrameRows<T> + ?Sized>(frame: &F, region: Rect) -> Result<GeodesicForest> {
    let rect = frame.rect();
    if !rect.contains_rect(&region) {
        return Err(invalid("region", format!("{region} is not inside the field {rect}")));
    }
    let o = frame.orientation();
    let origin = frame.origin();
    let (fi0, fj0) = o.to_frame(origin, region.lo());
    let (fi1, fj1) = o.to_frame(origin, region.hi());
    let (jlo, jhi) = (fj0.min(fj1) as usize, fj0.max(fj1) as usize);
    let (ilo, ihi) = (fi0.min(fi1) as usize, fi0.max(fi1) as usize);
    let mut dirs = BitGrid::new(region.len());
    sweep(frame, jhi + 1, |j, _, d| {
        if j < jlo {
            return;
        }
        for i in ilo..=ihi {
            if d[i] == 1 {
                let c = o.from_frame(origin, i as i64, j as i64);
                dirs.set(region.index(c), true);
            }
        }
    });
    Ok(GeodesicForest {
        target: origin,
        orientation: o,
        region,
        dirs,
    })
}

/// Forest of geodesics into `target` over the weights lying down-left of it,
/// restricted to `region`.
pub fn point_to_point_forest<T: Scalar, W: WeightRows<T>>(weights: &W, target: Coord, region: Rect) -> Result<GeodesicForest> {
    let frame = PlainFrame::new(weights, target, Orientation::Reversed)?;
    forest_from_frame::<T, _>(&frame, region)
}

/// Forest of geodesics into the corner of a stationary field, restricted to `region`.
pub fn stationary_forest<T: Scalar, W: WeightRows<T>>(
    bulk: &W,
    boundary: &BoundaryWeights<T>,
    region: Rect,
) -> Result<GeodesicForest> {
    let frame = StationaryFrame::new(bulk, boundary)?;
    forest_from_frame(&frame, region)
}

/// Minimal common point of the geodesics from `q1` and `q2` to the target.
pub fn coalescence_point(forest: &GeodesicForest, q1: Coord, q2: Coord) -> Result<Coord> {
    let t = forest.target();
    let (mut a, mut b) = (q1, q2);
    loop {
        if a == b {
            return Ok(a);
        }
        let step = |c: Coord| -> Result<Coord> {
            forest.next(c)?.ok_or_else(|| LppError::Internal("geodesic ended before meeting".into()))
        };
        if a.l1_dist(t) >= b.l1_dist(t) {
            a = step(a)?;
        } else {
            b = step(b)?;
        }
    }
}

fn scaled(xi: (f64, f64), n: f64) -> Coord {
    Coord::new((xi.0 * n).round() as i64, (xi.1 * n).round() as i64)
}

fn check_direction(xi: (f64, f64)) -> Result<()> {
    density_for_direction(xi).map(|_| ())
}

/// One replica of the stabilization experiment.
///
/// The point-to-point forest into `xi N` is compared with the forest of a
/// stationary field at the characteristic density of `xi`, anchored just
/// beyond `anchor * xi N`, on the boxes `[0, xi M]` for each `M` in `ms`.
/// Both fields share bulk weights, and all boxes come from the same pair of
/// forests, so the outcome is monotone in `M`.
pub fn stabilization_replica<T: Scalar>(
    stream: RngStream,
    xi: (f64, f64),
    n: f64,
    ms: &[f64],
    anchor: f64,
) -> Result<Vec<bool>> {
    check_direction(xi)?;
    let rho = density_for_direction(xi)?;
    if anchor < 1.0 {
        return Err(invalid("anchor", format!("{anchor} must be at least 1")));
    }
    let target = scaled(xi, n);
    let far = scaled(xi, anchor * n);
    let far = Coord::new(far.x.max(target.x), far.y.max(target.y));
    let m_max = ms.iter().cloned().fold(0.0f64, f64::max);
    if ms.is_empty() || ms.iter().any(|m| !(*m >= 0.0) || *m > n) {
        return Err(invalid("M", format!("box scales {ms:?} must lie in [0, {n}]")));
    }
    let region = Rect::new(Coord::ORIGIN, scaled(xi, m_max))?;
    let lazy = LazyWeights::new(stream.substream(0), Rect::new(Coord::ORIGIN, target)?);
    let ptp = point_to_point_forest::<T, _>(&lazy, target, region)?;
    let bulk = lazy.with_rect(Rect::new(Coord::ORIGIN, far)?);
    let corner = far + Coord::new(1, 1);
    let boundary = sample_stationary_boundary::<T>(
        stream.substream(1),
        rho,
        corner,
        Orientation::Reversed,
        far.x as usize + 1,
        far.y as usize + 1,
    )?;
    let stat = stationary_forest(&bulk, &boundary, region)?;
    ms.iter()
        .map(|m| ptp.agrees_on(&stat, Rect::new(Coord::ORIGIN, scaled(xi, *m))?))
        .collect()
}

/// Coalescence points of the geodesics from the origin and from each of
/// `sources` to `xi N`, all read off one point-to-point forest.
pub fn coalescence_points<T: Scalar>(stream: RngStream, xi: (f64, f64), n: f64, sources: &[Coord]) -> Result<Vec<Coord>> {
    check_direction(xi)?;
    let target = scaled(xi, n);
    let region = Rect::new(Coord::ORIGIN, target)?;
    if let Some(q) = sources.iter().find(|q| !region.contains(**q)) {
        return Err(LppError::OutOfRange { point: q.to_string(), region: format!("{region:?}") });
    }
    let lazy = LazyWeights::new(stream, region);
    let forest = point_to_point_forest::<T, _>(&lazy, target, region)?;
    sources.iter().map(|q| coalescence_point(&forest, Coord::ORIGIN, *q)).collect()
}

/// Upper source `(0, ceil(k^{2/3}))` of the coalescence-tail experiment.
pub fn tail_source(k: f64) -> Coord {
    Coord::new(0, k.powf(2.0 / 3.0).ceil() as i64)
}

/// Upper source `(0, a N^{2/3})` of the macroscopic coalescence experiment.
pub fn macro_source(a: f64, n: f64) -> Result<Coord> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid("a", format!("{a} must be positive")));
    }
    Ok(Coord::new(0, (a * n.powf(2.0 / 3.0)).round() as i64))
}

/// Distances of the coalescence point from the target and from the upper source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacroCoalescence {
    pub from_target: i64,
    pub from_source: i64,
}

impl MacroCoalescence {
    pub fn new(xi: (f64, f64), n: f64, source: Coord, pc: Coord) -> Self {
        MacroCoalescence {
            from_target: scaled(xi, n).l1_dist(pc),
            from_source: source.l1_dist(pc),
        }
    }
}

/// One replica of the transversal-fluctuation experiment: for each `l`, the
/// l1 distance between the point reached after `2l` steps of the geodesic
/// from the origin to `xi N` and the point `2l xi`.
pub fn transversal_replica<T: Scalar>(stream: RngStream, xi: (f64, f64), n: f64, ls: &[usize]) -> Result<Vec<f64>> {
    check_direction(xi)?;
    let target = scaled(xi, n);
    let l_max = ls.iter().cloned().max().unwrap_or(0);
    if ls.is_empty() || 2 * l_max as i64 > target.l1_norm() {
        return Err(invalid("l", format!("steps {ls:?} exceed the geodesic length {}", target.l1_norm())));
    }
    let full = Rect::new(Coord::ORIGIN, target)?;
    let lazy = LazyWeights::new(stream, full);
    let reach = Coord::new((2 * l_max as i64).min(target.x), (2 * l_max as i64).min(target.y));
    let forest = point_to_point_forest::<T, _>(&lazy, target, Rect::new(Coord::ORIGIN, reach)?)?;
    let path = forest.path_from(Coord::ORIGIN)?;
    let (s1, s2) = (xi.0 / (xi.0 + xi.1), xi.1 / (xi.0 + xi.1));
    ls.iter()
        .map(|l| {
            let p = path.get(2 * l).ok_or_else(|| LppError::Internal("geodesic left the stored region early".into()))?;
            let t = 2.0 * *l as f64;
            Ok((p.x as f64 - t * s1).abs() + (p.y as f64 - t * s2).abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{sample_weight_field, WeightField};
    use crate::lpp::lpp_passage;

    #[test]
    fn streamed_forest_matches_full_field() {
        let rect = Rect::with_size(Coord::ORIGIN, 12, 9).unwrap();
        let wf: WeightField<f64> = sample_weight_field(RngStream::new(4, 4), rect);
        let full = forest_from_field(&lpp_passage(&wf, rect.hi(), Orientation::Reversed).unwrap());
        let region = Rect::new(Coord::new(1, 2), Coord::new(6, 5)).unwrap();
        let part = point_to_point_forest::<f64, _>(&wf, rect.hi(), region).unwrap();
        for c in region.iter() {
            assert_eq!(part.steps_along_axis1(c).unwrap(), full.steps_along_axis1(c).unwrap());
        }
        assert!(part.steps_along_axis1(Coord::ORIGIN).is_err());
    }

    #[test]
    fn coalescence_of_identical_sources_is_the_source() {
        let rect = Rect::with_size(Coord::ORIGIN, 6, 6).unwrap();
        let wf: WeightField<f64> = sample_weight_field(RngStream::new(1, 2), rect);
        let f = forest_from_field(&lpp_passage(&wf, rect.hi(), Orientation::Reversed).unwrap());
        assert_eq!(coalescence_point(&f, Coord::new(1, 1), Coord::new(1, 1)).unwrap(), Coord::new(1, 1));
    }

    #[test]
    fn coalescence_point_is_first_common_point() {
        let rect = Rect::with_size(Coord::ORIGIN, 10, 10).unwrap();
        for seed in 0..30 {
            let wf: WeightField<f64> = sample_weight_field(RngStream::new(seed, 0), rect);
            let f = forest_from_field(&lpp_passage(&wf, rect.hi(), Orientation::Reversed).unwrap());
            let (q1, q2) = (Coord::ORIGIN, Coord::new(0, 3));
            let pc = coalescence_point(&f, q1, q2).unwrap();
            let p1 = f.path_from(q1).unwrap();
            let p2 = f.path_from(q2).unwrap();
            let first = p1.iter().find(|c| p2.contains(c)).unwrap();
            assert_eq!(*first, pc);
        }
    }

    #[test]
    fn stabilization_is_monotone_in_box_size() {
        for seed in 0..5 {
            let out = stabilization_replica::<f64>(RngStream::new(seed, 9), (0.5, 0.5), 60.0, &[2.0, 6.0, 12.0, 24.0], 2.0).unwrap();
            for w in out.windows(2) {
                assert!(w[0] || !w[1], "{out:?}");
            }
        }
        assert!(stabilization_replica::<f64>(RngStream::new(0, 0), (0.5, 0.5), 20.0, &[30.0], 2.0).is_err());
    }
}
