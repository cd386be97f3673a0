//! Stationary last-passage fields at density `rho`, exit points and induced
//! boundaries.
//!
//! A stationary field has a corner with value 0, i.i.d. Exp(1-rho) weights on
//! the axis-1 boundary ray, i.i.d. Exp(rho) weights on the axis-2 ray and
//! i.i.d. Exp(1) bulk weights. Boundary weight `k` (1-based) sits at
//! `corner + k * step`, where `step` points away from the corner.

use crate::error::{invalid, Result};
use crate::lattice::{exp_from_uniform, Coord, Rect, RngStream, WeightRows};
use crate::lpp::{fill_oriented, FrameRows, Orientation, PassageField};
use crate::scalar::Scalar;

/// Density whose characteristic direction is `xi`; `xi` need not be normalized.
pub fn density_for_direction(xi: (f64, f64)) -> Result<f64> {
    let (a, b) = xi;
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(invalid("xi", format!("({a}, {b}) must have positive finite entries")));
    }
    Ok(b.sqrt() / (a.sqrt() + b.sqrt()))
}

/// Characteristic direction of density `rho`, normalized to the unit simplex.
pub fn direction_for_density(rho: f64) -> Result<(f64, f64)> {
    check_density(rho)?;
    let a = (1.0 - rho) * (1.0 - rho);
    let b = rho * rho;
    Ok((a / (a + b), b / (a + b)))
}

pub(crate) fn check_density(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(invalid("rho", format!("{rho} is not in (0, 1)")))
    }
}

/// Weights on the two boundary rays of a stationary field.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryWeights<T> {
    pub corner: Coord,
    pub orientation: Orientation,
    /// `along1[k-1]` sits at `corner + k * step1`.
    pub along1: Vec<T>,
    /// `along2[k-1]` sits at `corner + k * step2`.
    pub along2: Vec<T>,
}

impl<T: Scalar> BoundaryWeights<T> {
    pub fn new(corner: Coord, orientation: Orientation, along1: Vec<T>, along2: Vec<T>) -> Result<Self> {
        if along1.is_empty() || along2.is_empty() {
            return Err(invalid("boundary", "both rays need at least one weight"));
        }
        if let Some(bad) = along1.iter().chain(&along2).find(|v| !(v.is_finite() && **v >= T::zero())) {
            return Err(invalid("boundary", format!("weight {bad} is not finite and non-negative")));
        }
        Ok(BoundaryWeights {
            corner,
            orientation,
            along1,
            along2,
        })
    }

    /// The bulk rectangle this boundary frames when the rays have their
    /// current lengths.
    pub fn bulk_rect(&self) -> Result<Rect> {
        let o = self.orientation;
        let near = self.corner + o.step1() + o.step2();
        let far = o.from_frame(self.corner, self.along1.len() as i64, self.along2.len() as i64);
        o.span(near, far)
    }
}

/// Samples Exp(1-rho) and Exp(rho) rays of lengths `n1` and `n2`.
pub fn sample_stationary_boundary<T: Scalar>(
    stream: RngStream,
    rho: f64,
    corner: Coord,
    orientation: Orientation,
    n1: usize,
    n2: usize,
) -> Result<BoundaryWeights<T>> {
    check_density(rho)?;
    let mut r1 = stream.substream(1).rng();
    let mut r2 = stream.substream(2).rng();
    let rate1 = T::of(1.0 - rho);
    let rate2 = T::of(rho);
    let along1 = (0..n1).map(|_| exp_from_uniform(r1.uniform(), rate1)).collect();
    let along2 = (0..n2).map(|_| exp_from_uniform(r2.uniform(), rate2)).collect();
    BoundaryWeights::new(corner, orientation, along1, along2)
}

pub(crate) struct StationaryFrame<'a, T, W> {
    bulk: &'a W,
    boundary: &'a BoundaryWeights<T>,
    rect: Rect,
}

impl<'a, T: Scalar, W: WeightRows<T>> StationaryFrame<'a, T, W> {
    pub fn new(bulk: &'a W, boundary: &'a BoundaryWeights<T>) -> Result<Self> {
        let o = boundary.orientation;
        let br = bulk.rect();
        let near = match o {
            Orientation::Forward => br.lo(),
            Orientation::Reversed => br.hi(),
        };
        if near != boundary.corner + o.step1() + o.step2() {
            return Err(invalid(
                "boundary",
                format!("corner {} is not diagonal to the bulk corner {near}", boundary.corner),
            ));
        }
        if boundary.along1.len() < br.width() || boundary.along2.len() < br.height() {
            return Err(invalid(
                "boundary",
                format!(
                    "rays of length ({}, {}) are shorter than the bulk {}x{}",
                    boundary.along1.len(),
                    boundary.along2.len(),
                    br.width(),
                    br.height()
                ),
            ));
        }
        let far = match o {
            Orientation::Forward => br.hi(),
            Orientation::Reversed => br.lo(),
        };
        Ok(StationaryFrame {
            bulk,
            boundary,
            rect: o.span(boundary.corner, far)?,
        })
    }
}

impl<'a, T: Scalar, W: WeightRows<T>> FrameRows<T> for StationaryFrame<'a, T, W> {
    fn rect(&self) -> Rect {
        self.rect
    }

    fn origin(&self) -> Coord {
        self.boundary.corner
    }

    fn orientation(&self) -> Orientation {
        self.boundary.orientation
    }

    fn fill(&self, j: usize, out: &mut [T]) {
        if j == 0 {
            let n = out.len() - 1;
            out[0] = T::zero();
            out[1..].copy_from_slice(&self.boundary.along1[..n]);
        } else {
            out[0] = self.boundary.along2[j - 1];
            let o = self.boundary.orientation;
            let near = self.boundary.corner + o.step1() + o.step2();
            fill_oriented(self.bulk, o, near, j as i64 - 1, &mut out[1..]);
        }
    }
}

/// Passage values from the boundary corner over `corner + boundary + bulk`.
pub fn stationary_passage<T: Scalar, W: WeightRows<T>>(
    bulk: &W,
    boundary: &BoundaryWeights<T>,
) -> Result<PassageField<T>> {
    let frame = StationaryFrame::new(bulk, boundary)?;
    Ok(PassageField::build(&frame, true))
}

/// Boundary increments of `field` seen from `v`:
/// `along1[k-1] = G(v + k step1) - G(v + (k-1) step1)` and likewise on axis 2,
/// out to the far edges of the field.
pub fn induced_boundary<T: Scalar>(field: &PassageField<T>, v: Coord) -> Result<BoundaryWeights<T>> {
    let rect = field.rect();
    rect.checked_index(v)?;
    let o = field.orientation();
    let (i0, j0) = o.to_frame(field.origin(), v);
    let (w, h) = (rect.width() as i64, rect.height() as i64);
    if i0 + 1 >= w || j0 + 1 >= h {
        return Err(invalid("v", format!("{v} lies on the far edge of {rect}; nothing to induce")));
    }
    let along1 = (i0 + 1..w)
        .map(|i| field.at(o.from_frame(field.origin(), i, j0)) - field.at(o.from_frame(field.origin(), i - 1, j0)))
        .collect();
    let along2 = (j0 + 1..h)
        .map(|j| field.at(o.from_frame(field.origin(), i0, j)) - field.at(o.from_frame(field.origin(), i0, j - 1)))
        .collect();
    Ok(BoundaryWeights {
        corner: v,
        orientation: o,
        along1,
        along2,
    })
}

/// Passage increments of a stationary field, computed with the local
/// max-plus recursion instead of differences of passage values.
///
/// For a point `x` off the corner, `across1(x) = G(x) - G(x - step1)` and
/// `across2(x) = G(x) - G(x - step2)`. On a reversed field these are the
/// Busemann increments `B(x, x+e1)` and `B(x, x+e2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementField<T> {
    rect: Rect,
    corner: Coord,
    orientation: Orientation,
    across1: Vec<T>,
    across2: Vec<T>,
}

impl<T: Scalar> IncrementField<T> {
    pub fn rect(&self) -> Rect {
        self.rect
    }

    /// Increment across the axis-1 edge into `x`; `None` on the axis-2 ray.
    pub fn across1(&self, x: Coord) -> Option<T> {
        let (i, _) = self.orientation.to_frame(self.corner, x);
        if i == 0 || !self.rect.contains(x) {
            return None;
        }
        Some(self.across1[self.rect.index(x)])
    }

    pub fn across2(&self, x: Coord) -> Option<T> {
        let (_, j) = self.orientation.to_frame(self.corner, x);
        if j == 0 || !self.rect.contains(x) {
            return None;
        }
        Some(self.across2[self.rect.index(x)])
    }
}

pub fn increment_field<T: Scalar, W: WeightRows<T>>(
    bulk: &W,
    boundary: &BoundaryWeights<T>,
) -> Result<IncrementField<T>> {
    let frame = StationaryFrame::new(bulk, boundary)?;
    let rect = frame.rect;
    let (w, h) = (rect.width(), rect.height());
    let o = boundary.orientation;
    let corner = boundary.corner;
    let nan = T::nan();
    let mut across1 = vec![nan; w * h];
    let mut across2 = vec![nan; w * h];
    let mut row = vec![T::zero(); w];
    let mut below1 = vec![nan; w];
    for j in 0..h {
        frame.fill(j, &mut row);
        if j == 0 {
            below1[1..].copy_from_slice(&row[1..]);
            for i in 1..w {
                across1[rect.index(o.from_frame(corner, i as i64, 0))] = row[i];
            }
            continue;
        }
        let mut left2 = row[0];
        across2[rect.index(o.from_frame(corner, 0, j as i64))] = left2;
        for i in 1..w {
            let d = below1[i] - left2;
            let zero = T::zero();
            let a1 = row[i] + if d > zero { d } else { zero };
            let a2 = row[i] + if d < zero { -d } else { zero };
            let idx = rect.index(o.from_frame(corner, i as i64, j as i64));
            across1[idx] = a1;
            across2[idx] = a2;
            below1[i] = a1;
            left2 = a2;
        }
    }
    Ok(IncrementField {
        rect,
        corner,
        orientation: o,
        across1,
        across2,
    })
}
