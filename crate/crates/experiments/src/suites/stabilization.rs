//! Disagreement between the point-to-point geodesic tree into `xi N` and the
//! tree of a stationary field anchored beyond it, on boxes `[0, xi M]`.

use lpp_core::geodesics::stabilization_replica;
use lpp_core::{LppError, RngStream};

use super::{cell_stream, collect, count, fp, tag};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{group_key, Check, EstimateRow, SlopeFit, Table};

const GROUP: [&str; 2] = ["n", "anchor"];

pub(super) fn run(cfg: &ExperimentConfig, runner: &Runner, base: RngStream) -> Result<Table> {
    let mut table = Table::new(cfg.experiment.name(), cfg.canonical(), &["n", "anchor", "m"]);
    for &n in &cfg.n {
        let params = |m: f64| vec![fp("n", n), fp("anchor", cfg.anchor), fp("m", m)];
        let mut ms = vec![];
        for &m in &cfg.m {
            if m >= 0.0 && m <= n {
                ms.push(m);
            } else {
                let e = LppError::InvalidParameter {
                    name: "M",
                    reason: format!("{m} must lie in [0, {n}]"),
                };
                table.rows.push(EstimateRow::failed("disagreement", params(m), e));
            }
        }
        if ms.is_empty() {
            continue;
        }
        let stream = cell_stream(base, &[tag(n), tag(cfg.anchor)]);
        let results = runner.replicate(stream, cfg.reps, |s| stabilization_replica::<f64>(s, cfg.xi, n, &ms, cfg.anchor));
        match collect(results) {
            Ok(agree) => {
                for (i, &m) in ms.iter().enumerate() {
                    let flags: Vec<bool> = agree.iter().map(|a| !a[i]).collect();
                    table.rows.push(EstimateRow::frequency("disagreement", params(m), count(&flags)));
                }
            }
            Err(e) => {
                for &m in &ms {
                    table.rows.push(EstimateRow::failed("disagreement", params(m), &e));
                }
            }
        }
    }
    table.fits = SlopeFit::fits(&table.rows, "disagreement", "m", &GROUP, 3.0 / 8.0);
    let mut checks = vec![];
    for fit in &table.fits {
        let constant = table
            .rows_of("disagreement")
            .filter(|r| r.error.is_none() && group_key(r, &GROUP) == fit.at)
            .filter_map(|r| Some(r.estimate / (r.param("n")?.powf(-0.25) * r.param("m")?.powf(3.0 / 8.0))))
            .fold(0.0f64, f64::max);
        checks.push(Check {
            name: format!("bound-constant[{}]", fit.at),
            value: constant,
            note: "smallest C with C*N^(-1/4)*M^(3/8) above every disagreement estimate".into(),
        });
    }
    table.checks = checks;
    Ok(table)
}
