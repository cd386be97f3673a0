//! Fluctuation exponents: mean and variance of the corner passage value,
//! Gaussianity of the local profile along the anti-diagonal, and transversal
//! wandering of the geodesic.

use lpp_core::geodesics::transversal_replica;
use lpp_core::lpp::{lpp_passage, passage_value};
use lpp_core::stationary::{sample_stationary_boundary, stationary_passage};
use lpp_core::stats::{ks_critical_value, ks_distance, normal_cdf, quantile, variance};
use lpp_core::{Coord, LazyWeights, Orientation, Rect, RngStream};

use super::{cell_stream, collect, count, fp, ip, mean_se, scaled, tag};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{Check, EstimateRow, SlopeFit, Table};

/// Variance per anti-diagonal step of the density-1/2 stationary profile:
/// a difference of two independent Exp(1/2) increments.
const STEP_VARIANCE: f64 = 8.0;

struct CornerSample {
    value: f64,
    /// `G(N+w, N-w) - G(N, N)` for each window `w`.
    profile: Vec<f64>,
    /// The same increment in a density-1/2 stationary field.
    stationary: Vec<f64>,
}

/// Passage value over the `n x n` square and anti-diagonal profiles of the
/// given half-widths.
fn corner_replica(stream: RngStream, n: i64, windows: &[i64]) -> lpp_core::Result<CornerSample> {
    let corner = Coord::new(n - 1, n - 1);
    let w_max = windows.iter().cloned().max().unwrap_or(0);
    let lazy = LazyWeights::new(stream.substream(0), Rect::new(Coord::ORIGIN, Coord::new(n - 1 + w_max, n - 1))?);
    let (value, profile) = if windows.is_empty() {
        (passage_value::<f64, _>(&lazy, Coord::ORIGIN, corner)?, vec![])
    } else {
        let field = lpp_passage::<f64, _>(&lazy, Coord::ORIGIN, Orientation::Forward)?;
        let g = field.at(corner);
        let profile = windows.iter().map(|w| field.at(corner + Coord::new(*w, -*w)) - g).collect();
        (g, profile)
    };
    let stationary = windows
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let s = stream.substream(1 + i as u64);
            let bulk = LazyWeights::new(s.substream(0), Rect::new(Coord::ORIGIN, Coord::new(w, w))?);
            let boundary = sample_stationary_boundary::<f64>(s.substream(1), 0.5, Coord::new(-1, -1), Orientation::Forward, w as usize + 1, w as usize + 1)?;
            let field = stationary_passage(&bulk, &boundary)?;
            Ok(field.at(Coord::new(w, 0)) - field.at(Coord::new(0, w)))
        })
        .collect::<lpp_core::Result<Vec<f64>>>()?;
    Ok(CornerSample { value, profile, stationary })
}

pub(super) fn run(cfg: &ExperimentConfig, runner: &Runner, base: RngStream) -> Result<Table> {
    let mut table = Table::new(cfg.experiment.name(), cfg.canonical(), &["n", "c", "window", "l", "r"]);
    let thresholds = cfg.r_values()?.to_vec();
    let gauss = |x: f64| normal_cdf(x, 0.0, 1.0);
    for &n in &cfg.n {
        let side = n.round() as i64;
        let mut cs = vec![];
        let mut windows = vec![];
        for &c in &cfg.c {
            let w = (c * n.powf(2.0 / 3.0)).round() as i64;
            if w >= 1 && w < side {
                cs.push(c);
                windows.push(w);
            } else {
                let reason = format!("window {w} must lie in [1, {})", side);
                table.rows.push(EstimateRow::failed("profile-ks", vec![fp("n", n), fp("c", c), ip("window", w)], reason));
            }
        }
        let results = runner.replicate(cell_stream(base, &[0, tag(n)]), cfg.reps, |s| corner_replica(s, side, &windows));
        let samples = match collect(results) {
            Ok(s) => s,
            Err(e) => {
                table.rows.push(EstimateRow::failed("variance", vec![fp("n", n)], e));
                continue;
            }
        };
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let reps = values.len();
        if reps < 2 {
            table.rows.push(EstimateRow::failed("variance", vec![fp("n", n)], "fewer than two replicas"));
            continue;
        }
        let (mean, se) = mean_se(&values);
        table.rows.push(EstimateRow::statistic("mean-over-n", vec![fp("n", n)], reps, mean / n, se / n));
        let var = variance(&values);
        table.rows.push(EstimateRow::statistic("variance", vec![fp("n", n)], reps, var, var * (2.0 / (reps as f64 - 1.0)).sqrt()));
        for (i, (&c, &w)) in cs.iter().zip(&windows).enumerate() {
            let scale = (STEP_VARIANCE * w as f64).sqrt();
            let params = vec![fp("n", n), fp("c", c), ip("window", w)];
            let ptp: Vec<f64> = samples.iter().map(|s| s.profile[i] / scale).collect();
            let stat: Vec<f64> = samples.iter().map(|s| s.stationary[i] / scale).collect();
            table.rows.push(EstimateRow::statistic("profile-ks", params.clone(), reps, ks_distance(&ptp, gauss), f64::NAN));
            table.rows.push(EstimateRow::statistic("profile-ks-stationary", params, reps, ks_distance(&stat, gauss), f64::NAN));
        }
    }
    if !cfg.c.is_empty() && cfg.reps > 0 {
        table.checks.push(Check {
            name: "profile-ks-critical".into(),
            value: ks_critical_value(cfg.reps, 0.01),
            note: "1% critical KS distance against N(0,1) after scaling by sqrt(8w)".into(),
        });
    }
    table.fits = SlopeFit::fits(&table.rows, "variance", "n", &[], 2.0 / 3.0);
    transversal(cfg, runner, base, &thresholds, &mut table);
    Ok(table)
}

/// Wandering of the geodesic from the origin to `xi N` after `2l` steps,
/// on the scale `l^{2/3}`, at the largest `N` of the grid.
fn transversal(cfg: &ExperimentConfig, runner: &Runner, base: RngStream, thresholds: &[f64], table: &mut Table) {
    let Some(n) = cfg.n.iter().cloned().reduce(f64::max) else { return };
    let length = scaled(cfg.xi, n).l1_norm();
    let mut ls = vec![];
    for &l in &cfg.l {
        if (l as f64) <= n / 4.0 && 2 * l as i64 <= length {
            ls.push(l);
        } else {
            let reason = format!("l={l} exceeds N/4 or half the geodesic length {length}");
            table.rows.push(EstimateRow::failed("transversal-q50", vec![fp("n", n), ip("l", l as i64)], reason));
        }
    }
    if ls.is_empty() {
        return;
    }
    let results = runner.replicate(cell_stream(base, &[1, tag(n)]), cfg.reps, |s| transversal_replica::<f64>(s, cfg.xi, n, &ls));
    let devs = match collect(results) {
        Ok(d) => d,
        Err(e) => {
            table.rows.push(EstimateRow::failed("transversal-q50", vec![fp("n", n)], e));
            return;
        }
    };
    if devs.is_empty() {
        return;
    }
    let mut medians = vec![];
    let mut upper = vec![];
    for (i, &l) in ls.iter().enumerate() {
        let mut scaled_dev: Vec<f64> = devs.iter().map(|d| d[i] / (l as f64).powf(2.0 / 3.0)).collect();
        scaled_dev.sort_by(f64::total_cmp);
        let params = vec![fp("n", n), ip("l", l as i64)];
        let (q50, q90) = (quantile(&scaled_dev, 0.5), quantile(&scaled_dev, 0.9));
        medians.push(q50);
        upper.push(q90);
        table.rows.push(EstimateRow::statistic("transversal-q50", params.clone(), devs.len(), q50, f64::NAN));
        table.rows.push(EstimateRow::statistic("transversal-q90", params.clone(), devs.len(), q90, f64::NAN));
        for &r in thresholds {
            let flags: Vec<bool> = scaled_dev.iter().map(|d| *d > r).collect();
            let mut p = params.clone();
            p.push(fp("r", r));
            table.rows.push(EstimateRow::frequency("transversal-tail", p, count(&flags)));
        }
    }
    for (name, qs) in [("collapse-spread-q50", &medians), ("collapse-spread-q90", &upper)] {
        let hi = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = qs.iter().cloned().fold(f64::INFINITY, f64::min);
        table.checks.push(Check {
            name: name.into(),
            value: hi / lo - 1.0,
            note: "relative spread of the scaled quantile across l".into(),
        });
    }
    table.fits.extend(SlopeFit::fits(&table.rows, "transversal-tail", "r", &["n", "l"], -3.0));
}
