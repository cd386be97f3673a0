//! Where the geodesics from the origin and from a second source on the
//! vertical axis merge on their way to `xi N`: the microscopic tail of the
//! merge point and its macroscopic distance from either end.

use lpp_core::geodesics::{coalescence_points, macro_source, tail_source, MacroCoalescence};
use lpp_core::{Coord, RngStream};

use super::{cell_stream, collect, count, fp, scaled, tag};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{group_key, Check, EstimateRow, SlopeFit, Table};

/// A source together with the rows it feeds.
enum Source {
    Tail { k: f64, at: Coord },
    Macro { a: f64, at: Coord },
}

pub(super) fn run(cfg: &ExperimentConfig, runner: &Runner, base: RngStream) -> Result<Table> {
    let mut table = Table::new(cfg.experiment.name(), cfg.canonical(), &["n", "k", "R", "a", "alpha"]);
    for &n in &cfg.n {
        let height = scaled(cfg.xi, n).y;
        let mut sources = vec![];
        for &k in &cfg.k {
            let at = tail_source(k);
            if k > 0.0 && at.y <= height {
                sources.push(Source::Tail { k, at });
            } else {
                for &big_r in &cfg.big_r {
                    let reason = format!("source {at} is outside the box of height {height}");
                    table.rows.push(EstimateRow::failed("tail", vec![fp("n", n), fp("k", k), fp("R", big_r)], reason));
                }
            }
        }
        for &a in &cfg.a {
            match macro_source(a, n) {
                Ok(at) if at.y <= height => sources.push(Source::Macro { a, at }),
                other => {
                    let reason = match other {
                        Err(e) => e.to_string(),
                        Ok(at) => format!("source {at} is outside the box of height {height}"),
                    };
                    for &alpha in &cfg.alpha {
                        let params = vec![fp("n", n), fp("a", a), fp("alpha", alpha)];
                        table.rows.push(EstimateRow::failed("near-target", params, &reason));
                    }
                }
            }
        }
        if sources.is_empty() {
            continue;
        }
        let coords: Vec<Coord> = sources
            .iter()
            .map(|s| match s {
                Source::Tail { at, .. } | Source::Macro { at, .. } => *at,
            })
            .collect();
        let results = runner.replicate(cell_stream(base, &[tag(n)]), cfg.reps, |s| coalescence_points::<f64>(s, cfg.xi, n, &coords));
        let points = match collect(results) {
            Ok(p) => p,
            Err(e) => {
                table.rows.push(EstimateRow::failed("tail", vec![fp("n", n)], e));
                continue;
            }
        };
        for (i, source) in sources.iter().enumerate() {
            match source {
                Source::Tail { k, .. } => {
                    let norms: Vec<i64> = points.iter().map(|p| p[i].l1_norm()).collect();
                    for &big_r in &cfg.big_r {
                        let flags: Vec<bool> = norms.iter().map(|d| *d as f64 > big_r * k).collect();
                        let params = vec![fp("n", n), fp("k", *k), fp("R", big_r)];
                        table.rows.push(EstimateRow::frequency("tail", params, count(&flags)));
                    }
                }
                Source::Macro { a, at } => {
                    let dists: Vec<MacroCoalescence> = points.iter().map(|p| MacroCoalescence::new(cfg.xi, n, *at, p[i])).collect();
                    for &alpha in &cfg.alpha {
                        let params = vec![fp("n", n), fp("a", *a), fp("alpha", alpha)];
                        let near_target: Vec<bool> = dists.iter().map(|d| d.from_target as f64 <= alpha * n).collect();
                        let near_source: Vec<bool> = dists.iter().map(|d| d.from_source as f64 <= alpha * n).collect();
                        table.rows.push(EstimateRow::frequency("near-target", params.clone(), count(&near_target)));
                        table.rows.push(EstimateRow::frequency("near-source", params, count(&near_source)));
                    }
                }
            }
        }
    }
    let mut fits = SlopeFit::fits(&table.rows, "tail", "R", &["n", "k"], -2.0 / 3.0);
    fits.extend(SlopeFit::fits(&table.rows, "near-target", "alpha", &["n", "a"], 2.0 / 9.0));
    fits.extend(SlopeFit::fits(&table.rows, "near-source", "alpha", &["n", "a"], 2.0));
    for fit in fits.iter().filter(|f| f.family == "near-target") {
        let constant = table
            .rows_of("near-target")
            .filter(|r| r.error.is_none() && group_key(r, &["n", "a"]) == fit.at)
            .filter_map(|r| Some(r.estimate / r.param("alpha")?.powf(2.0 / 9.0)))
            .fold(0.0f64, f64::max);
        table.checks.push(Check {
            name: format!("near-target-constant[{}]", fit.at),
            value: constant,
            note: "smallest C with C*alpha^(2/9) above every near-target estimate".into(),
        });
    }
    table.fits = fits;
    Ok(table)
}
