//! Plain sampling of passage values to `xi N`, optionally also in the
//! stationary model of a given density with its exit side.

use lpp_core::lpp::passage_value;
use lpp_core::stationary::{sample_stationary_boundary, stationary_passage};
use lpp_core::{Coord, LazyWeights, Orientation, Rect, RngStream};

use super::{cell_stream, collect, count, fp, mean_se, scaled, tag};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{EstimateRow, Table};

struct Sample {
    value: f64,
    stationary: Option<(f64, i64)>,
}

fn replica(stream: RngStream, target: Coord, rho: Option<f64>) -> lpp_core::Result<Sample> {
    let bulk = LazyWeights::new(stream.substream(0), Rect::new(Coord::ORIGIN, target)?);
    let value = passage_value::<f64, _>(&bulk, Coord::ORIGIN, target)?;
    let stationary = match rho {
        None => None,
        Some(rho) => {
            let (w, h) = (target.x as usize + 1, target.y as usize + 1);
            let boundary = sample_stationary_boundary::<f64>(stream.substream(1), rho, Coord::new(-1, -1), Orientation::Forward, w, h)?;
            let field = stationary_passage(&bulk, &boundary)?;
            Some((field.at(target), field.exit_point(target)?))
        }
    };
    Ok(Sample { value, stationary })
}

pub(super) fn run(cfg: &ExperimentConfig, runner: &Runner, base: RngStream) -> Result<Table> {
    let mut table = Table::new(cfg.experiment.name(), cfg.canonical(), &["n", "rho"]);
    let rho_label = cfg.rho.unwrap_or(f64::NAN);
    for &n in &cfg.n {
        let params = vec![fp("n", n), fp("rho", rho_label)];
        let target = scaled(cfg.xi, n);
        let results = runner.replicate(cell_stream(base, &[tag(n)]), cfg.reps, |s| replica(s, target, cfg.rho));
        let samples = match collect(results) {
            Ok(s) if !s.is_empty() => s,
            Ok(_) => continue,
            Err(e) => {
                table.rows.push(EstimateRow::failed("passage", params, e));
                continue;
            }
        };
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let (m, se) = mean_se(&values);
        table.rows.push(EstimateRow::statistic("passage", params.clone(), values.len(), m, se));
        let stat: Vec<(f64, i64)> = samples.iter().filter_map(|s| s.stationary).collect();
        if !stat.is_empty() {
            let values: Vec<f64> = stat.iter().map(|s| s.0).collect();
            let (m, se) = mean_se(&values);
            table.rows.push(EstimateRow::statistic("stationary-passage", params.clone(), values.len(), m, se));
            let along1: Vec<bool> = stat.iter().map(|s| s.1 > 0).collect();
            table.rows.push(EstimateRow::frequency("exit-along-axis1", params.clone(), count(&along1)));
        }
    }
    Ok(table)
}
