//! Coupled stationary fields at two nearby densities and the events that pin
//! down the local geometry of point-to-point geodesics.
//!
//! Both fields are reversed and share the bulk `[0, xi N]`. Their boundary
//! rays run along the row above and the column right of the bulk, and on
//! each ray the two densities are coupled through one stationary queue, so
//! the higher density dominates on the row and the lower on the column.

use crate::error::{invalid, Result};
use crate::lattice::{exp_from_uniform, sample_weight_field, Coord, Rect, RngStream, WeightField};
use crate::lpp::{lpp_passage, Orientation, PassageField};
use crate::queueing::sample_nu;
use crate::scalar::Scalar;
use crate::stationary::{check_density, density_for_direction, increment_field, stationary_passage, BoundaryWeights, IncrementField};

/// Two reversed stationary fields over the same bulk.
#[derive(Debug, Clone)]
pub struct CoupledPair<T> {
    pub xi: (f64, f64),
    pub n: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub bulk: WeightField<T>,
    pub boundary_lo: BoundaryWeights<T>,
    pub boundary_hi: BoundaryWeights<T>,
    pub field_lo: PassageField<T>,
    pub field_hi: PassageField<T>,
    pub incr_lo: IncrementField<T>,
    pub incr_hi: IncrementField<T>,
}

/// Offsets `rho -/+ r N^{-1/3}` around the characteristic density of `xi`.
pub fn coupled_densities(xi: (f64, f64), n: f64, r: f64) -> Result<(f64, f64)> {
    let rho = density_for_direction(xi)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("{r} must be non-negative")));
    }
    if !(n >= 1.0) {
        return Err(invalid("N", format!("{n} must be at least 1")));
    }
    let delta = r * n.powf(-1.0 / 3.0);
    let (lo, hi) = (rho - delta, rho + delta);
    check_density(lo)?;
    check_density(hi)?;
    Ok((lo, hi))
}

fn scaled(xi: (f64, f64), n: f64) -> Coord {
    Coord::new((xi.0 * n).round() as i64, (xi.1 * n).round() as i64)
}

/// Coupled ray of length `len`: `(dominant, dominated)` with the dominated
/// entries i.i.d. Exp(`slow`) and the dominant ones i.i.d. Exp(`fast`),
/// `fast < slow`. Index 0 of the result is the weight next to the corner.
fn coupled_ray<T: Scalar>(stream: RngStream, fast: f64, slow: f64, len: usize) -> Result<(Vec<T>, Vec<T>)> {
    if fast == slow {
        let mut rng = stream.rng();
        let v: Vec<T> = (0..len).map(|_| exp_from_uniform(rng.uniform(), T::of(slow))).collect();
        return Ok((v.clone(), v));
    }
    let mut nu = sample_nu::<T>(stream, fast, slow, len)?;
    // Queue time increases with the coordinate; ray index 0 sits at the corner.
    nu.d.reverse();
    nu.s.reverse();
    Ok((nu.d, nu.s))
}

/// Builds the coupled pair at densities `rho -/+ r N^{-1/3}` on the bulk `[0, xi N]`.
pub fn build_coupled_pair<T: Scalar>(stream: RngStream, xi: (f64, f64), n: f64, r: f64) -> Result<CoupledPair<T>> {
    let (rho_lo, rho_hi) = coupled_densities(xi, n, r)?;
    let far = scaled(xi, n);
    let rect = Rect::new(Coord::ORIGIN, far)?;
    let bulk: WeightField<T> = sample_weight_field(stream.substream(0), rect);
    let corner = far + Coord::new(1, 1);
    let (n1, n2) = (rect.width(), rect.height());
    // Row pairs: (I_hi, I_lo) with I_hi ~ Exp(1 - rho_hi) dominating.
    let (row_hi, row_lo) = coupled_ray::<T>(stream.substream(1), 1.0 - rho_hi, 1.0 - rho_lo, n1)?;
    // Column pairs: (J_lo, J_hi) with J_lo ~ Exp(rho_lo) dominating.
    let (col_lo, col_hi) = coupled_ray::<T>(stream.substream(2), rho_lo, rho_hi, n2)?;
    let boundary_lo = BoundaryWeights::new(corner, Orientation::Reversed, row_lo, col_lo)?;
    let boundary_hi = BoundaryWeights::new(corner, Orientation::Reversed, row_hi, col_hi)?;
    let field_lo = stationary_passage(&bulk, &boundary_lo)?;
    let field_hi = stationary_passage(&bulk, &boundary_hi)?;
    let incr_lo = increment_field(&bulk, &boundary_lo)?;
    let incr_hi = increment_field(&bulk, &boundary_hi)?;
    Ok(CoupledPair {
        xi,
        n,
        rho_lo,
        rho_hi,
        bulk,
        boundary_lo,
        boundary_hi,
        field_lo,
        field_hi,
        incr_lo,
        incr_hi,
    })
}

impl<T: Scalar> CoupledPair<T> {
    /// Upper corner of the small box `[0, xi M]`.
    pub fn box_corner(&self, m: f64) -> Result<Coord> {
        if !(m >= 0.0 && m <= self.n) {
            return Err(invalid("M", format!("{m} must lie in [0, {}]", self.n)));
        }
        Ok(scaled(self.xi, m))
    }

    /// Every geodesic from the small box exits the lower-density field through
    /// its column and the higher-density field through its row. By geodesic
    /// ordering it suffices to look at the two extreme corners of the box.
    pub fn event_a(&self, m: f64) -> Result<bool> {
        let c = self.box_corner(m)?;
        let lo_exit = self.field_lo.exit_point(Coord::new(0, c.y))?;
        let hi_exit = self.field_hi.exit_point(Coord::new(c.x, 0))?;
        Ok(lo_exit < 0 && hi_exit > 0)
    }

    /// The two fields have identical increments on the edges along the row
    /// above and the column right of the small box.
    pub fn event_c(&self, m: f64) -> Result<bool> {
        let c = self.box_corner(m)?;
        let above = (0..=c.x).all(|x| {
            let p = Coord::new(x, c.y + 1);
            self.incr_lo.across1(p) == self.incr_hi.across1(p)
        });
        let right = (0..=c.y).all(|y| {
            let p = Coord::new(c.x + 1, y);
            self.incr_lo.across2(p) == self.incr_hi.across2(p)
        });
        Ok(above && right)
    }

    pub fn stabilized(&self, m: f64) -> Result<bool> {
        Ok(self.event_a(m)? && self.event_c(m)?)
    }

    /// Point-to-point field into `xi N` over the shared bulk.
    pub fn point_to_point(&self) -> Result<PassageField<T>> {
        lpp_passage(&self.bulk, self.bulk.rect().hi(), Orientation::Reversed)
    }
}

/// Largest violation of the increment sandwich on the small box: on every
/// edge `(x, x+e)` of `[0, xi M]`, the point-to-point increment
/// `G(x) - G(x+e)` must lie between the two Busemann increments.
pub fn sandwich_violation<T: Scalar>(pair: &CoupledPair<T>, ptp: &PassageField<T>, m: f64) -> Result<f64> {
    let c = pair.box_corner(m)?;
    let mut worst = 0.0f64;
    for x in Rect::new(Coord::ORIGIN, c)?.iter() {
        for (e, lower, upper) in [
            (Coord::E1, pair.incr_lo.across1(x), pair.incr_hi.across1(x)),
            (Coord::E2, pair.incr_hi.across2(x), pair.incr_lo.across2(x)),
        ] {
            let (Some(lower), Some(upper)) = (lower, upper) else { continue };
            if !ptp.rect().contains(x + e) {
                continue;
            }
            let g = (ptp.at(x) - ptp.at(x + e)).to_f64_lossy();
            worst = worst.max(lower.to_f64_lossy() - g).max(g - upper.to_f64_lossy());
        }
    }
    Ok(worst)
}

/// How the density offset `r` is chosen for a small-box scale `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusRule {
    /// The same `r` for every box.
    Fixed(f64),
    /// `r = (xi_1 M)^{-1/8} N^{1/12}`.
    Balanced,
}

impl RadiusRule {
    pub fn radius(&self, xi: (f64, f64), n: f64, m: f64) -> f64 {
        match *self {
            RadiusRule::Fixed(r) => r,
            RadiusRule::Balanced => {
                let s = xi.0 / (xi.0 + xi.1);
                (s * m).max(1.0).powf(-1.0 / 8.0) * n.powf(1.0 / 12.0)
            }
        }
    }
}

/// Outcome of one coupled pair at one box scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agreement {
    pub event_a: bool,
    pub event_c: bool,
}

impl Agreement {
    pub fn stabilized(&self) -> bool {
        self.event_a && self.event_c
    }
}

/// One replica of the local-agreement experiment for box scales
/// `M = c N^{2/3}`. A fixed radius reuses one coupled pair for every `c`.
pub fn local_agreement_replica<T: Scalar>(
    stream: RngStream,
    xi: (f64, f64),
    n: f64,
    cs: &[f64],
    rule: RadiusRule,
) -> Result<Vec<Agreement>> {
    let ms: Vec<f64> = cs.iter().map(|c| c * n.powf(2.0 / 3.0)).collect();
    let outcome = |pair: &CoupledPair<T>, m: f64| -> Result<Agreement> {
        Ok(Agreement {
            event_a: pair.event_a(m)?,
            event_c: pair.event_c(m)?,
        })
    };
    match rule {
        RadiusRule::Fixed(r) => {
            let pair = build_coupled_pair::<T>(stream, xi, n, r)?;
            ms.iter().map(|m| outcome(&pair, *m)).collect()
        }
        RadiusRule::Balanced => ms
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let pair = build_coupled_pair::<T>(stream.substream(i as u64), xi, n, rule.radius(xi, n, *m))?;
                outcome(&pair, *m)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_straddle_characteristic_density() {
        let (lo, hi) = coupled_densities((0.5, 0.5), 1000.0, 1.0).unwrap();
        assert!((lo - 0.4).abs() < 1e-12 && (hi - 0.6).abs() < 1e-12);
        assert!(coupled_densities((0.5, 0.5), 8.0, 2.0).is_err());
        assert!(coupled_densities((0.5, 0.5), 8.0, -1.0).is_err());
    }

    #[test]
    fn zero_radius_collapses_the_pair() {
        let p = build_coupled_pair::<f64>(RngStream::new(1, 1), (0.5, 0.5), 40.0, 0.0).unwrap();
        assert_eq!(p.field_lo.values(), p.field_hi.values());
        assert!(p.event_c(10.0).unwrap());
    }

    #[test]
    fn boundary_dominance_by_construction() {
        let p = build_coupled_pair::<f64>(RngStream::new(2, 2), (0.5, 0.5), 200.0, 1.0).unwrap();
        for (hi, lo) in p.boundary_hi.along1.iter().zip(&p.boundary_lo.along1) {
            assert!(hi >= lo);
        }
        for (hi, lo) in p.boundary_hi.along2.iter().zip(&p.boundary_lo.along2) {
            assert!(lo >= hi);
        }
    }

    #[test]
    fn box_scale_outside_bulk_is_rejected() {
        let p = build_coupled_pair::<f64>(RngStream::new(2, 2), (0.5, 0.5), 30.0, 1.0).unwrap();
        assert!(p.event_a(31.0).is_err());
        assert!(p.event_c(-1.0).is_err());
    }

    #[test]
    fn balanced_radius() {
        let r = RadiusRule::Balanced.radius((0.5, 0.5), 4096.0, 512.0);
        assert!((r - 256f64.powf(-0.125) * 4096f64.powf(1.0 / 12.0)).abs() < 1e-12);
    }
}
