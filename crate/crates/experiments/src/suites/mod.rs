//! One module per experiment family. Each turns a resolved configuration
//! into a [`Table`]; grid points that cannot be run become error rows and
//! the rest of the grid still runs.

mod bound_check;
mod coalescence;
mod exponents;
mod local_stationarity;
mod queue_check;
mod simulate;
mod stabilization;

use std::path::Path;
use std::time::Duration;

use lpp_core::montecarlo::experiment_stream;
use lpp_core::stats::Binomial;
use lpp_core::{Coord, RngStream};

use crate::config::{ExperimentConfig, ExperimentKind, OutputFormat};
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{Table, Value};

/// Runs `cfg` on a worker pool built from its `jobs` and budget settings.
pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    let runner = Runner::new(cfg.jobs, cfg.budget_seconds.map(Duration::from_secs))?;
    run_with(cfg, &runner)
}

pub fn run_with(cfg: &ExperimentConfig, runner: &Runner) -> Result<Table> {
    let base = experiment_stream(cfg.seed, cfg.experiment.name());
    let mut table = match cfg.experiment {
        ExperimentKind::Simulate => simulate::run(cfg, runner, base),
        ExperimentKind::LocalStationarity => local_stationarity::run(cfg, runner, base),
        ExperimentKind::Stabilization => stabilization::run(cfg, runner, base),
        ExperimentKind::Coalescence => coalescence::run(cfg, runner, base),
        ExperimentKind::Exponents => exponents::run(cfg, runner, base),
        ExperimentKind::QueueCheck => queue_check::run(cfg, runner, base),
        ExperimentKind::BoundCheck => bound_check::run(cfg, runner, base),
    }?;
    table.truncated = runner.truncated();
    Ok(table)
}

/// Writes the table to `path` in `format`.
pub fn write_table(table: &Table, format: OutputFormat, path: &Path) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json()? + "\n",
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn fp(name: &str, x: f64) -> (String, Value) {
    (name.to_string(), Value::Float(x))
}

fn ip(name: &str, x: i64) -> (String, Value) {
    (name.to_string(), Value::Int(x))
}

fn tp(name: &str, s: &str) -> (String, Value) {
    (name.to_string(), Value::Text(s.to_string()))
}

fn count<'a>(flags: impl IntoIterator<Item = &'a bool>) -> Binomial {
    Binomial::from_flags(flags)
}

/// `xi * n` rounded to the lattice.
fn scaled(xi: (f64, f64), n: f64) -> Coord {
    Coord::new((xi.0 * n).round() as i64, (xi.1 * n).round() as i64)
}

/// Distinct substream per grid cell, independent of which other cells exist.
fn cell_stream(base: RngStream, tags: &[u64]) -> RngStream {
    tags.iter().fold(base, |s, t| s.substream(*t))
}

/// Bit pattern of a grid value, used as a substream tag.
fn tag(x: f64) -> u64 {
    x.to_bits()
}

/// Splits replica results into successes and the first error, if any.
fn collect<R>(results: Vec<lpp_core::Result<R>>) -> std::result::Result<Vec<R>, lpp_core::LppError> {
    results.into_iter().collect()
}

/// Mean and standard error of the mean.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m = lpp_core::stats::mean(xs);
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    (m, (lpp_core::stats::variance(xs) / xs.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::resolve(&RawConfig::parse(text).unwrap()).unwrap()
    }

    fn small(kind: &str) -> ExperimentConfig {
        let extra = match kind {
            "simulate" => "n = 20,40\nrho = 0.5",
            "local-stationarity" => "n = 200\nc = 0.05,0.2",
            "stabilization" => "n = 100\nm = 1,4",
            "coalescence" => "n = 200\nR = 1,2\nalpha = 0.1,0.5",
            "exponents" => "n = 50,100\nl = 5,10\nc = 0.2",
            "queue-check" => "n = 500",
            "bound-check" => "n = 500\nm = 32,64",
            _ => unreachable!(),
        };
        config(&format!("experiment = {kind}\nreps = 20\nseed = 3\n{extra}"))
    }

    #[test]
    fn every_experiment_runs_and_reruns_identically() {
        for kind in ExperimentKind::ALL {
            let cfg = small(kind.name());
            let a = run(&cfg).unwrap();
            assert!(!a.rows.is_empty(), "{kind}");
            assert!(a.rows.iter().all(|r| r.error.is_none()), "{kind}: {:?}", a.rows);
            let b = run(&ExperimentConfig { jobs: 2, ..cfg.clone() }).unwrap();
            assert_eq!(a.to_csv(), b.to_csv(), "{kind}");
            assert!(a.to_json().is_ok());
        }
    }

    #[test]
    fn empty_grid_gives_empty_table() {
        let t = run(&config("experiment = local-stationarity\nc =\nreps = 5")).unwrap();
        assert!(t.rows.is_empty() && t.fits.is_empty());
    }

    #[test]
    fn infeasible_grid_points_become_error_rows() {
        // r = 3 at N = 8 pushes the upper density past 1.
        let t = run(&config("experiment = local-stationarity\nn = 8,2000\nr = 3\nc = 0.1\nreps = 4")).unwrap();
        let failed: Vec<_> = t.rows.iter().filter(|r| r.error.is_some()).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].param("n"), Some(8.0));
        assert!(t.rows.iter().any(|r| r.error.is_none() && r.param("n") == Some(2000.0)));
        let t = run(&config("experiment = stabilization\nn = 50\nm = 4,60\nreps = 4")).unwrap();
        assert_eq!(t.rows.iter().filter(|r| r.error.is_some()).count(), 1);
    }

    #[test]
    fn fixed_radius_failures_nest_in_the_box_scale() {
        let t = run(&config("experiment = local-stationarity\nn = 300\nr = 0.5\nc = 0.05,0.1,0.3\nreps = 30")).unwrap();
        let counts: Vec<u64> = t.rows_of("failure").map(|r| r.count.unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }

    #[test]
    fn grid_cells_do_not_depend_on_their_neighbours() {
        let one = run(&config("experiment = simulate\nn = 30\nreps = 3")).unwrap();
        let two = run(&config("experiment = simulate\nn = 10,30\nreps = 3")).unwrap();
        let pick = |t: &Table| t.rows.iter().find(|r| r.param("n") == Some(30.0)).unwrap().estimate;
        assert_eq!(pick(&one), pick(&two));
    }

    #[test]
    fn stationary_mean_matches_closed_form() {
        // E G = m/(1-rho) + n/rho over an (m+1) x (n+1) stationary frame.
        let t = run(&config("experiment = simulate\nn = 40\nrho = 0.3\nreps = 400")).unwrap();
        let r = t.rows_of("stationary-passage").next().unwrap();
        let exact = 21.0 / 0.7 + 21.0 / 0.3;
        assert!((r.estimate - exact).abs() < 4.0 * r.stderr, "{} vs {exact}", r.estimate);
    }

    #[test]
    fn budget_truncation_is_flagged() {
        let cfg = config("experiment = simulate\nn = 20\nreps = 50\nbudget-seconds = 0");
        let t = run(&cfg).unwrap();
        assert!(t.truncated);
        assert!(t.to_csv().contains("# truncated"));
    }
}
