//! Monte Carlo frequency of an idle period among the first `m` customers of
//! a stationary queue in heavy traffic, against the analytic upper bounds.

use lpp_core::queueing::{heavy_traffic_bound, lindley_evolve, optimal_empty_queue_bound, sample_stationary_window};
use lpp_core::RngStream;

use super::{cell_stream, collect, count, fp, tag};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{Check, EstimateRow, Table};

/// Whether the queue has idled by customer `m`, for each `m`.
fn idle_replica(stream: RngStream, beta: f64, alpha: f64, ms: &[usize]) -> lpp_core::Result<Vec<bool>> {
    let len = ms.iter().cloned().max().unwrap_or(0);
    let window = sample_stationary_window::<f64>(stream, beta, alpha, len)?;
    let e = lindley_evolve(&window)?.e;
    let mut first_idle = len + 1;
    if let Some(i) = e.iter().position(|x| *x > 0.0) {
        first_idle = i + 1;
    }
    Ok(ms.iter().map(|m| first_idle <= *m).collect())
}

pub(super) fn run(cfg: &ExperimentConfig, runner: &Runner, base: RngStream) -> Result<Table> {
    let mut table = Table::new(cfg.experiment.name(), cfg.canonical(), &["rho", "n", "r", "beta", "alpha", "m", "theta"]);
    let rho = cfg.rho.unwrap_or(0.5);
    let mut worst_excess = f64::NEG_INFINITY;
    for &n in &cfg.n {
        for &r in cfg.r_values()? {
            let delta = r * n.powf(-1.0 / 3.0);
            let (beta, alpha) = (rho - delta, rho + delta);
            let params = |m: f64| vec![fp("rho", rho), fp("n", n), fp("r", r), fp("beta", beta), fp("alpha", alpha), fp("m", m)];
            let mut ms = vec![];
            for &m in &cfg.m {
                let bound = if m >= 1.0 && m.fract() == 0.0 {
                    optimal_empty_queue_bound(beta, alpha, m as u32)
                } else {
                    Err(lpp_core::LppError::InvalidParameter {
                        name: "m",
                        reason: format!("{m} is not a positive integer"),
                    })
                };
                match bound {
                    Ok(_) => ms.push(m as usize),
                    Err(e) => table.rows.push(EstimateRow::failed("idle-frequency", params(m), e)),
                }
            }
            if ms.is_empty() {
                continue;
            }
            let results = runner.replicate(cell_stream(base, &[tag(n), tag(r)]), cfg.reps, |s| idle_replica(s, beta, alpha, &ms));
            let flags = match collect(results) {
                Ok(f) => f,
                Err(e) => {
                    table.rows.push(EstimateRow::failed("idle-frequency", params(f64::NAN), e));
                    continue;
                }
            };
            for (i, &m) in ms.iter().enumerate() {
                let mf = m as f64;
                let idle: Vec<bool> = flags.iter().map(|f| f[i]).collect();
                let row = EstimateRow::frequency("idle-frequency", params(mf), count(&idle));
                let (optimal, theta) = optimal_empty_queue_bound(beta, alpha, m as u32)?;
                let mut p = params(mf);
                p.push(fp("theta", theta));
                if row.reps > 0 {
                    worst_excess = worst_excess.max(row.estimate - 2.0 * row.stderr - optimal);
                }
                table.rows.push(row);
                table.rows.push(EstimateRow::statistic("bound-optimal", p, 0, optimal, f64::NAN));
                // The proof's choice theta = m^{-1/2}, when it is admissible.
                let theta = mf.powf(-0.5);
                let mut p = params(mf);
                p.push(fp("theta", theta));
                match heavy_traffic_bound(rho, r, n, m as u32, theta) {
                    Ok(b) => table.rows.push(EstimateRow::statistic("bound-heavy-traffic", p, 0, b, f64::NAN)),
                    Err(e) => table.rows.push(EstimateRow::failed("bound-heavy-traffic", p, e)),
                }
            }
        }
    }
    if worst_excess.is_finite() {
        table.checks.push(Check {
            name: "max-excess-over-bound".into(),
            value: worst_excess,
            note: "max over the grid of (estimate - 2 stderr - optimal bound); nonpositive means every bound holds".into(),
        });
    }
    Ok(table)
}
