//! Coupling failure of local increments near the origin of a reversed
//! field into `xi N`, for box scales `M = c N^{2/3}`.

use lpp_core::busemann::{coupled_densities, local_agreement_replica, RadiusRule};
use lpp_core::montecarlo::name_tag;
use lpp_core::stationary::direction_for_density;
use lpp_core::{LppError, RngStream};

use super::{cell_stream, collect, count, fp, tag, tp};
use crate::config::{ExperimentConfig, Radius};
use crate::error::Result;
use crate::runner::Runner;
use crate::table::{group_key, Check, EstimateRow, SlopeFit, Table};

const FAMILIES: [&str; 3] = ["failure", "failure-a", "failure-c"];
const GROUP: [&str; 2] = ["n", "radius"];

pub(super) fn run(cfg: &ExperimentConfig, runner: &Runner, base: RngStream) -> Result<Table> {
    let mut table = Table::new(cfg.experiment.name(), cfg.canonical(), &["n", "radius", "c", "m", "r"]);
    let rho = cfg.rho.unwrap_or(0.5);
    let rules: Vec<RadiusRule> = match &cfg.r {
        Radius::Balanced => vec![RadiusRule::Balanced],
        Radius::Values(v) => v.iter().map(|r| RadiusRule::Fixed(*r)).collect(),
    };
    for &n in &cfg.n {
        for rule in &rules {
            let label = match rule {
                RadiusRule::Balanced => "balanced".to_string(),
                RadiusRule::Fixed(r) => r.to_string(),
            };
            let m_of = |c: f64| c * n.powf(2.0 / 3.0);
            let params = |c: f64, r: f64| vec![fp("n", n), tp("radius", &label), fp("c", c), fp("m", m_of(c)), fp("r", r)];
            let xi = match direction_for_density(rho) {
                Ok(xi) => xi,
                Err(e) => {
                    for &c in &cfg.c {
                        table.rows.push(EstimateRow::failed("failure", params(c, f64::NAN), &e));
                    }
                    continue;
                }
            };
            let radius = |c: f64| rule.radius(xi, n, m_of(c));
            let feasible = |c: f64| -> lpp_core::Result<()> {
                if !(c >= 0.0 && m_of(c) <= n) {
                    return Err(LppError::InvalidParameter {
                        name: "c",
                        reason: format!("box scale {} is outside [0, {n}]", m_of(c)),
                    });
                }
                coupled_densities(xi, n, radius(c)).map(|_| ())
            };
            let mut cs = vec![];
            for &c in &cfg.c {
                match feasible(c) {
                    Ok(()) => cs.push(c),
                    Err(e) => table.rows.push(EstimateRow::failed("failure", params(c, radius(c)), e)),
                }
            }
            if cs.is_empty() {
                continue;
            }
            let stream = cell_stream(base, &[tag(n), name_tag(&label)]);
            let results = runner.replicate(stream, cfg.reps, |s| local_agreement_replica::<f64>(s, xi, n, &cs, *rule));
            match collect(results) {
                Ok(outcomes) => {
                    for (i, &c) in cs.iter().enumerate() {
                        let flags: [Vec<bool>; 3] = [
                            outcomes.iter().map(|o| !o[i].stabilized()).collect(),
                            outcomes.iter().map(|o| !o[i].event_a).collect(),
                            outcomes.iter().map(|o| !o[i].event_c).collect(),
                        ];
                        for (family, f) in FAMILIES.iter().zip(&flags) {
                            table.rows.push(EstimateRow::frequency(family, params(c, radius(c)), count(f)));
                        }
                    }
                }
                Err(e) => {
                    for &c in &cs {
                        table.rows.push(EstimateRow::failed("failure", params(c, radius(c)), &e));
                    }
                }
            }
        }
    }
    table.fits = SlopeFit::fits(&table.rows, "failure", "c", &GROUP, 3.0 / 8.0);
    let mut checks = vec![];
    for fit in &table.fits {
        let constant = table
            .rows_of("failure")
            .filter(|r| r.error.is_none() && group_key(r, &GROUP) == fit.at)
            .filter_map(|r| Some(r.estimate / r.param("c")?.powf(3.0 / 8.0)))
            .fold(0.0f64, f64::max);
        checks.push(Check {
            name: format!("bound-constant[{}]", fit.at),
            value: constant,
            note: "smallest C with C*c^(3/8) above every failure estimate".into(),
        });
    }
    table.checks = checks;
    Ok(table)
}
