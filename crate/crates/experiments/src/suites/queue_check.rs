//! Burke-type checks on stationary M/M/1 windows: departures and dual
//! services are exponential, the waiting time stays stationary, and the
//! running-minimum idle formula matches the summed idle times.

use lpp_core::queueing::{cumulative_idle, lindley_evolve, sample_stationary_window};
use lpp_core::stats::{exponential_cdf, ks_critical_value, ks_distance, ks_distance_with};
use lpp_core::RngStream;

use super::{cell_stream, collect, count, fp, mean_se, tag};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{Check, EstimateRow, Table};

struct WindowReport {
    departure_ks: f64,
    dual_ks: f64,
    last_wait: f64,
    idle_residual: f64,
}

fn window_replica(stream: RngStream, lambda: f64, rho: f64, n: usize) -> lpp_core::Result<WindowReport> {
    let window = sample_stationary_window::<f64>(stream.substream(0), lambda, rho, n)?;
    let out = lindley_evolve(&window)?;
    // A random stretch k..=l for the idle formula.
    let mut rng = stream.substream(1).rng();
    let k = 1 + rng.below(n as u64) as usize;
    let l = k + rng.below((n - k + 1) as u64) as usize;
    let direct: f64 = out.e[k - 1..l].iter().sum();
    let idle_residual = (cumulative_idle(&window, k, l)? - direct).abs();
    Ok(WindowReport {
        departure_ks: ks_distance(&out.d, |x| exponential_cdf(x, lambda)),
        dual_ks: ks_distance(&out.s_dual, |x| exponential_cdf(x, rho)),
        last_wait: *out.w.last().unwrap_or(&window.w0),
        idle_residual,
    })
}

pub(super) fn run(cfg: &ExperimentConfig, runner: &Runner, base: RngStream) -> Result<Table> {
    let mut table = Table::new(cfg.experiment.name(), cfg.canonical(), &["lambda", "rho", "n"]);
    let (lambda, rho) = (cfg.lambda, cfg.rho.unwrap_or(0.6));
    for &n in &cfg.n {
        let params = vec![fp("lambda", lambda), fp("rho", rho), fp("n", n)];
        let len = n.round() as usize;
        let results = runner.replicate(cell_stream(base, &[tag(n)]), cfg.reps, |s| window_replica(s, lambda, rho, len));
        let reports = match collect(results) {
            Ok(r) if !r.is_empty() => r,
            Ok(_) => continue,
            Err(e) => {
                table.rows.push(EstimateRow::failed("departure-ks", params, e));
                continue;
            }
        };
        let reps = reports.len();
        let critical = ks_critical_value(len, 0.01);
        for (family, get) in [
            ("departure-ks", (|r: &WindowReport| r.departure_ks) as fn(&WindowReport) -> f64),
            ("dual-service-ks", |r: &WindowReport| r.dual_ks),
        ] {
            let ds: Vec<f64> = reports.iter().map(get).collect();
            let (m, se) = mean_se(&ds);
            table.rows.push(EstimateRow::statistic(family, params.clone(), reps, m, se));
            let rejects: Vec<bool> = ds.iter().map(|d| *d > critical).collect();
            table.rows.push(EstimateRow::frequency(&format!("{family}-reject"), params.clone(), count(&rejects)));
        }
        // Stationary waiting time: atom 1 - lambda/rho at 0, then Exp(rho - lambda).
        let busy = lambda / rho;
        let waits: Vec<f64> = reports.iter().map(|r| r.last_wait).collect();
        let cdf = |x: f64| if x < 0.0 { 0.0 } else { 1.0 - busy + busy * exponential_cdf(x, rho - lambda) };
        let left = |x: f64| if x <= 0.0 { 0.0 } else { cdf(x) };
        table.rows.push(EstimateRow::statistic("waiting-ks", params.clone(), reps, ks_distance_with(&waits, cdf, left), f64::NAN));
        let worst = reports.iter().map(|r| r.idle_residual).fold(0.0f64, f64::max);
        table.rows.push(EstimateRow::statistic("idle-identity-residual", params, reps, worst, f64::NAN));
        table.checks.push(Check {
            name: format!("ks-critical-window[n={n}]"),
            value: critical,
            note: "1% critical KS distance for one window; a -reject row near 0.01 is the expected rate".into(),
        });
        table.checks.push(Check {
            name: format!("ks-critical-waiting[n={n}]"),
            value: ks_critical_value(reps, 0.01),
            note: "1% critical KS distance for the waiting-ks row (asymptotic; the law has an atom at 0)".into(),
        });
    }
    Ok(table)
}
