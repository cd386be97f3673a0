//! Small statistics toolkit: moments, binomial intervals, Kolmogorov-Smirnov
//! distances and least-squares log-log fits.

use crate::error::{invalid, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Success count out of a number of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Binomial {
    pub successes: u64,
    pub trials: u64,
}

impl Binomial {
    pub fn new(successes: u64, trials: u64) -> Self {
        Binomial { successes, trials }
    }

    pub fn from_flags<'a>(flags: impl IntoIterator<Item = &'a bool>) -> Self {
        let mut b = Binomial::default();
        for f in flags {
            b.trials += 1;
            b.successes += u64::from(*f);
        }
        b
    }

    pub fn p_hat(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.successes as f64 / self.trials as f64
    }

    pub fn stderr(&self) -> f64 {
        let p = self.p_hat();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Wilson score interval at normal quantile `z`.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        let n = self.trials as f64;
        let p = self.p_hat();
        let z2 = z * z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }

    /// Exact upper confidence limit for zero successes at two-sided level
    /// `1 - alpha`: `1 - (alpha/2)^(1/n)`.
    pub fn zero_count_upper(&self, alpha: f64) -> f64 {
        1.0 - (alpha / 2.0).powf(1.0 / self.trials as f64)
    }
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        let s: f64 = (1..=20)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * c).exp()
            })
            .sum();
        return 1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

fn stephens_scale(n: usize) -> f64 {
    let rn = (n as f64).sqrt();
    rn + 0.12 + 0.11 / rn
}

/// Asymptotic p-value of a one-sample KS distance `d` over `n` points.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    kolmogorov_sf(stephens_scale(n) * d)
}

/// KS distance at which the one-sample test rejects at level `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.1, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / stephens_scale(n)
}

/// Sup distance between the empirical CDF of `samples` and a CDF that may
/// have atoms: `cdf(x) = F(x)`, `cdf_left(x) = F(x-)`.
pub fn ks_distance_with(samples: &[f64], cdf: impl Fn(f64) -> f64, cdf_left: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let below = i as f64 / n;
        let through = j as f64 / n;
        d = d.max((below - cdf_left(v)).abs()).max((through - cdf(v)).abs());
        i = j;
    }
    d
}

pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    ks_distance_with(samples, &cdf, &cdf)
}

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * libm::erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
}

pub fn exponential_cdf(x: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -libm::expm1(-rate * x)
    }
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
    /// Points dropped because `y` was zero or not finite.
    pub excluded: usize,
}

pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(invalid("points", "x and y lengths differ"));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(invalid("points", format!("{} usable points; a slope needs two", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("points", "all x values coincide"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(LogLogFit {
        slope,
        intercept,
        residual,
        points: pts.len(),
        excluded: xs.len() - pts.len(),
    })
}
