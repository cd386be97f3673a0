//! Result tables and their CSV/JSON forms.
//!
//! CSV layout: a `# resolved-config:` line, the column header, one line per
//! row, then `# fit:` and `# check:` summary lines. Floats are written with
//! 17 significant digits so reruns can be compared byte for byte.

use std::fmt::Write as _;

use lpp_core::stats::{loglog_fit, Binomial, Z95};
use serde::Serialize;

/// A parameter or count cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => float(*x),
            Value::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            Value::Text(_) => None,
        }
    }
}

/// 17 significant digits, or the empty string for NaN.
fn float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

/// One estimate at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    /// Which quantity the row estimates, e.g. `failure` or `tail`.
    pub family: String,
    pub params: Vec<(String, Value)>,
    /// Success count for frequency estimates.
    pub count: Option<u64>,
    pub reps: usize,
    pub estimate: f64,
    /// `sqrt(p(1-p)/n)` for frequencies, NaN when not applicable.
    pub stderr: f64,
    /// 95% interval: Wilson score for frequencies, with the exact upper
    /// limit `1 - 0.025^(1/n)` for zero counts.
    pub ci: (f64, f64),
    /// Set when the grid point is infeasible; the other fields are then NaN.
    pub error: Option<String>,
}

impl EstimateRow {
    pub fn frequency(family: &str, params: Vec<(String, Value)>, b: Binomial) -> Self {
        let ci = if b.successes == 0 {
            (0.0, b.zero_count_upper(0.05))
        } else {
            b.wilson(Z95)
        };
        EstimateRow {
            family: family.to_string(),
            params,
            count: Some(b.successes),
            reps: b.trials as usize,
            estimate: b.p_hat(),
            stderr: b.stderr(),
            ci,
            error: None,
        }
    }

    /// A plain statistic without a count, e.g. a mean or a KS distance.
    pub fn statistic(family: &str, params: Vec<(String, Value)>, reps: usize, estimate: f64, stderr: f64) -> Self {
        let ci = if stderr.is_nan() {
            (f64::NAN, f64::NAN)
        } else {
            (estimate - Z95 * stderr, estimate + Z95 * stderr)
        };
        EstimateRow {
            family: family.to_string(),
            params,
            count: None,
            reps,
            estimate,
            stderr,
            ci,
            error: None,
        }
    }

    pub fn failed(family: &str, params: Vec<(String, Value)>, error: impl ToString) -> Self {
        EstimateRow {
            family: family.to_string(),
            params,
            count: None,
            reps: 0,
            estimate: f64::NAN,
            stderr: f64::NAN,
            ci: (f64::NAN, f64::NAN),
            error: Some(error.to_string()),
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).and_then(|(_, v)| v.as_f64())
    }
}

/// Least-squares slope of `ln(estimate)` against `ln(x)` over one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub family: String,
    /// Parameter used as the abscissa.
    pub x: String,
    /// Values of the parameters held fixed while `x` varies, e.g. `n=2000`.
    pub at: String,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// Abscissae of the points used.
    pub grid: Vec<f64>,
    /// Abscissae dropped because the estimate was zero or missing.
    pub excluded: Vec<f64>,
    /// Exponent the slope is compared against.
    pub reference: f64,
    pub error: Option<String>,
}

impl SlopeFit {
    /// One fit per distinct value of the `group` parameters among the rows
    /// of `family`, in order of first appearance.
    pub fn fits(rows: &[EstimateRow], family: &str, x: &str, group: &[&str], reference: f64) -> Vec<SlopeFit> {
        let mut keys: Vec<String> = vec![];
        for r in rows.iter().filter(|r| r.family == family) {
            let key = group_key(r, group);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys.into_iter()
            .map(|at| {
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| r.family == family && r.error.is_none() && group_key(r, group) == at)
                    .filter_map(|r| r.param(x).map(|xv| (xv, r.estimate)))
                    .collect();
                SlopeFit::from_points(family, x, at, &pts, reference)
            })
            .collect()
    }

    fn from_points(family: &str, x: &str, at: String, pts: &[(f64, f64)], reference: f64) -> Self {
        let usable = |y: f64| y > 0.0 && y.is_finite();
        let grid: Vec<f64> = pts.iter().filter(|p| usable(p.1)).map(|p| p.0).collect();
        let excluded: Vec<f64> = pts.iter().filter(|p| !usable(p.1)).map(|p| p.0).collect();
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (slope, intercept, residual, error) = match loglog_fit(&xs, &ys) {
            Ok(f) => (f.slope, f.intercept, f.residual, None),
            Err(e) => (f64::NAN, f64::NAN, f64::NAN, Some(e.to_string())),
        };
        SlopeFit {
            family: family.to_string(),
            x: x.to_string(),
            at,
            slope,
            intercept,
            residual,
            grid,
            excluded,
            reference,
            error,
        }
    }
}

/// `name=value` pairs of the `group` parameters, joined by spaces.
pub fn group_key(row: &EstimateRow, group: &[&str]) -> String {
    group
        .iter()
        .filter_map(|g| row.params.iter().find(|(k, _)| k == g))
        .map(|(k, v)| format!("{k}={}", v.csv()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A derived quantity reported next to the fits, e.g. the constant of a
/// dominating power curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub experiment: String,
    pub resolved_config: String,
    /// Parameter columns, in order.
    pub columns: Vec<String>,
    pub rows: Vec<EstimateRow>,
    pub fits: Vec<SlopeFit>,
    pub checks: Vec<Check>,
    /// The wall-time budget ran out and rows hold fewer replicas than asked.
    pub truncated: bool,
}

impl Table {
    pub fn new(experiment: &str, resolved_config: String, columns: &[&str]) -> Self {
        Table {
            experiment: experiment.to_string(),
            resolved_config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
            fits: vec![],
            checks: vec![],
            truncated: false,
        }
    }

    pub fn rows_of<'a>(&'a self, family: &'a str) -> impl Iterator<Item = &'a EstimateRow> + 'a {
        self.rows.iter().filter(move |r| r.family == family)
    }

    pub fn fit_of(&self, family: &str) -> Option<&SlopeFit> {
        self.fits.iter().find(|f| f.family == family)
    }

    pub fn check(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# resolved-config: {}", self.resolved_config).unwrap();
        let mut header = vec!["family".to_string()];
        header.extend(self.columns.iter().cloned());
        header.extend(["count", "reps", "estimate", "stderr", "ci_lo", "ci_hi", "error"].map(String::from));
        writeln!(out, "{}", header.join(",")).unwrap();
        for row in &self.rows {
            let mut cells = vec![row.family.clone()];
            for col in &self.columns {
                let cell = row.params.iter().find(|(k, _)| k == col).map(|(_, v)| v.csv()).unwrap_or_default();
                cells.push(cell);
            }
            cells.push(row.count.map(|c| c.to_string()).unwrap_or_default());
            cells.push(row.reps.to_string());
            cells.extend([row.estimate, row.stderr, row.ci.0, row.ci.1].map(float));
            cells.push(row.error.as_deref().map(csv_text).unwrap_or_default());
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        for f in &self.fits {
            let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("|");
            write!(
                out,
                "# fit: family={} x={} at=[{}] slope={} intercept={} residual={} reference={} grid={} excluded={}",
                f.family,
                f.x,
                f.at,
                float(f.slope),
                float(f.intercept),
                float(f.residual),
                f.reference,
                list(&f.grid),
                list(&f.excluded)
            )
            .unwrap();
            if let Some(e) = &f.error {
                write!(out, " error={}", csv_text(e)).unwrap();
            }
            out.push('\n');
        }
        for c in &self.checks {
            writeln!(out, "# check: {}={} {}", c.name, float(c.value), c.note).unwrap();
        }
        if self.truncated {
            writeln!(out, "# truncated: wall-time budget exhausted; rows hold partial replica counts").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Keeps free text inside one CSV cell.
fn csv_text(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str, x: f64) -> (String, Value) {
        (name.to_string(), Value::Float(x))
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", "experiment=demo; seed=1".into(), &["c"]);
        t.rows.push(EstimateRow::frequency("failure", vec![p("c", 0.1)], Binomial::new(3, 10)));
        t.rows.push(EstimateRow::failed("failure", vec![p("c", 0.9)], "rho, too large"));
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# resolved-config: experiment=demo; seed=1");
        assert_eq!(lines[1], "family,c,count,reps,estimate,stderr,ci_lo,ci_hi,error");
        assert!(lines[2].starts_with("failure,1.0000000000000001e-1,3,10,2.9999999999999999e-1,"));
        assert!(lines[3].ends_with(",0,,,,,rho; too large"));
    }

    #[test]
    fn zero_counts_get_an_upper_limit() {
        let r = EstimateRow::frequency("tail", vec![], Binomial::new(0, 100));
        assert_eq!(r.ci.0, 0.0);
        assert!((r.ci.1 - (1.0 - 0.025f64.powf(0.01))).abs() < 1e-15);
    }

    #[test]
    fn fits_exclude_zero_rows() {
        let rows: Vec<EstimateRow> = [(1.0, 4), (2.0, 8), (4.0, 16), (8.0, 0)]
            .iter()
            .map(|(x, k)| EstimateRow::frequency("f", vec![p("c", *x), p("n", 5.0)], Binomial::new(*k, 100)))
            .collect();
        let fits = SlopeFit::fits(&rows, "f", "c", &["n"], 1.0);
        assert_eq!(fits.len(), 1);
        let f = &fits[0];
        assert_eq!(f.at, "n=5.0000000000000000e0");
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert_eq!(f.excluded, vec![8.0]);
        assert_eq!(f.grid.len(), 3);
        let single = SlopeFit::fits(&rows[..1], "f", "c", &["n"], 1.0);
        assert!(single[0].error.is_some() && single[0].slope.is_nan());
    }

    #[test]
    fn wilson_coverage_is_calibrated() {
        // Synthetic Bernoulli streams with known p.
        let mut rng = lpp_core::RngStream::new(11, 0).rng();
        for p in [0.05, 0.3, 0.5] {
            let covered = (0..1000)
                .filter(|_| {
                    let k = (0..400).filter(|_| rng.uniform() < p).count() as u64;
                    let r = EstimateRow::frequency("f", vec![], Binomial::new(k, 400));
                    r.ci.0 <= p && p <= r.ci.1
                })
                .count();
            assert!((930..=970).contains(&covered), "p={p}: {covered}");
        }
    }
}
