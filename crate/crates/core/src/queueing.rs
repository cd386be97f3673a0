//! Single-server FIFO queues in discrete time: Lindley recursion, departure
//! and dual-service operators, stationary initial states and the
//! empty-queue bound.
//!
//! Customers are numbered `0..=n`. Customer 0 is the state carried in from
//! the past (waiting time `w0`, service `s0`); arrays hold customers `1..=n`
//! and `a[j-1]` is the inter-arrival time between customers `j-1` and `j`.

use crate::error::{invalid, Result};
use crate::lattice::{check_rate, exp_from_uniform, RngStream, StreamRng};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct QueueWindow<T> {
    /// Inter-arrival times `a_1..a_n`.
    pub a: Vec<T>,
    /// Service times `s_1..s_n`.
    pub s: Vec<T>,
    /// Service time of customer 0.
    pub s0: T,
    /// Waiting time of customer 0.
    pub w0: T,
}

/// Per-customer outputs for customers `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueOutputs<T> {
    /// Waiting times.
    pub w: Vec<T>,
    /// Idle time of the server just before each customer arrives.
    pub e: Vec<T>,
    /// Inter-departure times `d_j = e_j + s_j`.
    pub d: Vec<T>,
    /// Sojourn times `t_j = w_j + s_j`.
    pub t: Vec<T>,
    /// Dual services `a_j ∧ t_{j-1}`.
    pub s_dual: Vec<T>,
}

impl<T: Scalar> QueueWindow<T> {
    pub fn new(a: Vec<T>, s: Vec<T>, s0: T, w0: T) -> Result<Self> {
        if a.len() != s.len() {
            return Err(invalid("window", format!("{} arrivals but {} services", a.len(), s.len())));
        }
        if !(w0.is_finite() && w0 >= T::zero()) {
            return Err(invalid("w0", format!("{w0} is not a non-negative waiting time")));
        }
        if let Some(bad) = a.iter().chain(&s).chain([&s0]).find(|v| !(v.is_finite() && **v >= T::zero())) {
            return Err(invalid("window", format!("time {bad} is not finite and non-negative")));
        }
        Ok(QueueWindow { a, s, s0, w0 })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Sojourn time of customer 0.
    pub fn t0(&self) -> T {
        self.w0 + self.s0
    }
}

/// Runs the queue forward from customer 0's sojourn time `t0`.
pub fn queue_operators<T: Scalar>(a: &[T], s: &[T], t0: T) -> Result<QueueOutputs<T>> {
    if a.len() != s.len() {
        return Err(invalid("window", format!("{} arrivals but {} services", a.len(), s.len())));
    }
    let n = a.len();
    let mut out = QueueOutputs {
        w: Vec::with_capacity(n),
        e: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        t: Vec::with_capacity(n),
        s_dual: Vec::with_capacity(n),
    };
    let zero = T::zero();
    let mut t_prev = t0;
    for j in 0..n {
        let gap = t_prev - a[j];
        let (w, e) = if gap > zero { (gap, zero) } else { (zero, -gap) };
        let t = w + s[j];
        out.w.push(w);
        out.e.push(e);
        out.d.push(e + s[j]);
        out.t.push(t);
        out.s_dual.push(if a[j] < t_prev { a[j] } else { t_prev });
        t_prev = t;
    }
    Ok(out)
}

pub fn lindley_evolve<T: Scalar>(window: &QueueWindow<T>) -> Result<QueueOutputs<T>> {
    queue_operators(&window.a, &window.s, window.t0())
}

/// Departure operator `D(a, s)` started from sojourn time `t0`.
pub fn departures<T: Scalar>(a: &[T], s: &[T], t0: T) -> Result<Vec<T>> {
    Ok(queue_operators(a, s, t0)?.d)
}

/// Dual-service operator `R(a, s)` started from sojourn time `t0`.
pub fn dual_services<T: Scalar>(a: &[T], s: &[T], t0: T) -> Result<Vec<T>> {
    Ok(queue_operators(a, s, t0)?.s_dual)
}

/// Total idle time of customers `k..=l` (1-based) from the running-minimum
/// formula `(min_{k<=i<=l} w_{k-1} + sum_{j=k}^{i} (s_{j-1} - a_j))^-`.
pub fn cumulative_idle<T: Scalar>(window: &QueueWindow<T>, k: usize, l: usize) -> Result<T> {
    let n = window.len();
    if k == 0 || k > l || l > n {
        return Err(invalid("k..l", format!("{k}..={l} is not a window inside 1..={n}")));
    }
    let zero = T::zero();
    let mut w = window.w0;
    for j in 1..k {
        let gap = w + service(window, j - 1) - window.a[j - 1];
        w = if gap > zero { gap } else { zero };
    }
    let mut partial = w;
    let mut low = T::infinity();
    for i in k..=l {
        partial = partial + service(window, i - 1) - window.a[i - 1];
        if partial < low {
            low = partial;
        }
    }
    Ok(if low < zero { -low } else { zero })
}

fn service<T: Scalar>(window: &QueueWindow<T>, j: usize) -> T {
    if j == 0 {
        window.s0
    } else {
        window.s[j - 1]
    }
}

fn check_stable(lambda: f64, rho: f64) -> Result<()> {
    check_rate(lambda)?;
    check_rate(rho)?;
    if lambda < rho {
        Ok(())
    } else {
        Err(invalid("lambda", format!("arrival rate {lambda} must be below service rate {rho}")))
    }
}

/// Stationary waiting time of an M/M/1 queue: 0 with probability
/// `1 - lambda/rho`, otherwise Exp(rho - lambda).
pub fn sample_stationary_w0<T: Scalar>(rng: &mut StreamRng, lambda: f64, rho: f64) -> Result<T> {
    check_stable(lambda, rho)?;
    let busy = rng.uniform() < lambda / rho;
    let tail = exp_from_uniform(rng.uniform(), rho - lambda);
    Ok(T::of(if busy { tail } else { 0.0 }))
}

/// Stationary window with Exp(lambda) arrivals and Exp(rho) services.
pub fn sample_stationary_window<T: Scalar>(
    stream: RngStream,
    lambda: f64,
    rho: f64,
    n: usize,
) -> Result<QueueWindow<T>> {
    check_stable(lambda, rho)?;
    let mut ra = stream.substream(1).rng();
    let mut rs = stream.substream(2).rng();
    let mut r0 = stream.substream(3).rng();
    let (lam, mu) = (T::of(lambda), T::of(rho));
    let a = (0..n).map(|_| exp_from_uniform(ra.uniform(), lam)).collect();
    let s = (0..n).map(|_| exp_from_uniform(rs.uniform(), mu)).collect();
    let w0 = sample_stationary_w0(&mut r0, lambda, rho)?;
    let s0 = exp_from_uniform(r0.uniform(), mu);
    QueueWindow::new(a, s, s0, w0)
}

/// A window of the stationary pair law `(D(a, s), s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuSample<T> {
    pub d: Vec<T>,
    pub s: Vec<T>,
}

pub fn sample_nu<T: Scalar>(stream: RngStream, lambda: f64, rho: f64, n: usize) -> Result<NuSample<T>> {
    let window = sample_stationary_window(stream, lambda, rho, n)?;
    let out = lindley_evolve(&window)?;
    Ok(NuSample { d: out.d, s: window.s })
}

/// Burn-in length used when a queue composite cannot be started in its
/// stationary state.
pub fn burn_in_length(rate_gap: f64) -> Result<usize> {
    if !(rate_gap.is_finite() && rate_gap > 0.0) {
        return Err(invalid("rate_gap", format!("{rate_gap} must be positive")));
    }
    Ok((40.0 / rate_gap).ceil() as usize)
}

/// Outcome of comparing `D(D(b, a), s)` with `D(D(b, R(a, s)), D(a, s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterchangeReport {
    pub burn_in: usize,
    pub compared: usize,
    pub max_residual: f64,
    /// Index of the first compared entry whose residual exceeds the tolerance.
    pub first_violation: Option<usize>,
}

impl InterchangeReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks the queue interchange identity on the entries after `burn_in`.
/// All queues start empty, so early entries are transient.
pub fn interchange_check<T: Scalar>(b: &[T], a: &[T], s: &[T], burn_in: usize, tol: f64) -> Result<InterchangeReport> {
    if a.len() != b.len() || s.len() != b.len() {
        return Err(invalid("sequences", "b, a and s must have equal length"));
    }
    if burn_in >= b.len() {
        return Err(invalid("burn_in", format!("{burn_in} leaves nothing of a window of {}", b.len())));
    }
    let zero = T::zero();
    let lhs = departures(&departures(b, a, zero)?, s, zero)?;
    let ops = queue_operators(a, s, zero)?;
    let rhs = departures(&departures(b, &ops.s_dual, zero)?, &ops.d, zero)?;
    let mut max_residual = 0.0f64;
    let mut first_violation = None;
    for j in burn_in..b.len() {
        let r = (lhs[j] - rhs[j]).abs().to_f64_lossy();
        if r > max_residual {
            max_residual = r;
        }
        if r > tol && first_violation.is_none() {
            first_violation = Some(j);
        }
    }
    Ok(InterchangeReport {
        burn_in,
        compared: b.len() - burn_in,
        max_residual,
        first_violation,
    })
}

/// Sample from the two-class fixed point: `(b1, D(b2, b1))` with
/// `b1 ~ Exp(alpha1)`, `b2 ~ Exp(alpha2)` i.i.d. and `alpha2 < alpha1`,
/// started in its exact stationary state.
pub fn two_class_fixed_point<T: Scalar>(
    stream: RngStream,
    alpha1: f64,
    alpha2: f64,
    n: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    check_stable(alpha2, alpha1)?;
    let window = sample_stationary_window::<T>(stream, alpha2, alpha1, n)?;
    let out = lindley_evolve(&window)?;
    Ok((window.s, out.d))
}

/// Upper bound on the probability that an Exp(beta)/Exp(alpha) queue started
/// in stationarity idles at least once among its first `m` customers:
/// `1 - b/a + [a/(a+θ) · b/(b-θ)]^m · (b(a-b)/a)/(a-b+θ)`.
pub fn empty_queue_bound(beta: f64, alpha: f64, m: u32, theta: f64) -> Result<f64> {
    check_stable(beta, alpha)?;
    if m == 0 {
        return Err(invalid("m", "at least one customer is needed"));
    }
    if !(theta > 0.0 && theta < beta) {
        return Err(invalid("theta", format!("{theta} must lie in (0, {beta})")));
    }
    let ratio = alpha / (alpha + theta) * beta / (beta - theta);
    let tail = beta * (alpha - beta) / alpha / (alpha - beta + theta);
    Ok(1.0 - beta / alpha + ratio.powi(m as i32) * tail)
}

/// [`empty_queue_bound`] with `beta = rho - r N^{-1/3}` and
/// `alpha = rho + r N^{-1/3}`, written in heavy-traffic form.
pub fn heavy_traffic_bound(rho: f64, r: f64, n: f64, m: u32, theta: f64) -> Result<f64> {
    let delta = r * n.powf(-1.0 / 3.0);
    let (beta, alpha) = (rho - delta, rho + delta);
    check_stable(beta, alpha)?;
    if m == 0 {
        return Err(invalid("m", "at least one customer is needed"));
    }
    if !(theta > 0.0 && theta < beta) {
        return Err(invalid("theta", format!("{theta} must lie in (0, {beta})")));
    }
    let first = 2.0 * delta / (rho + delta);
    let growth = 1.0 + (2.0 * delta * theta + theta * theta) / (rho * rho - (delta * delta + 2.0 * delta * theta + theta * theta));
    let damping = 1.0 / (1.0 + theta * n.powf(1.0 / 3.0) / (2.0 * r));
    Ok(first + (rho - delta) / (rho + delta) * growth.powi(m as i32) * damping)
}

/// Minimizes [`empty_queue_bound`] over `theta` and returns `(bound, theta)`.
pub fn optimal_empty_queue_bound(beta: f64, alpha: f64, m: u32) -> Result<(f64, f64)> {
    check_stable(beta, alpha)?;
    let f = |t: f64| empty_queue_bound(beta, alpha, m, t);
    let grid = 400;
    let mut best = (f64::INFINITY, 0.0);
    for k in 1..grid {
        let t = beta * k as f64 / grid as f64;
        let v = f(t)?;
        if v < best.0 {
            best = (v, t);
        }
    }
    let (mut lo, mut hi) = ((best.1 - beta / grid as f64).max(beta * 1e-9), (best.1 + beta / grid as f64).min(beta * (1.0 - 1e-9)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1)? < f(x2)? {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = f(t)?;
    Ok(if v < best.0 { (v, t) } else { best })
}

/// Whether a stationary Exp(beta)/Exp(alpha) queue idles before one of
/// customers `1..=m`.
pub fn idles_within<T: Scalar>(stream: RngStream, beta: f64, alpha: f64, m: usize) -> Result<bool> {
    let window = sample_stationary_window::<T>(stream, beta, alpha, m)?;
    let out = lindley_evolve(&window)?;
    Ok(out.e.iter().any(|e| *e > T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(a: &[f64], s: &[f64], s0: f64, w0: f64) -> QueueWindow<f64> {
        QueueWindow::new(a.to_vec(), s.to_vec(), s0, w0).unwrap()
    }

    #[test]
    fn always_idle_queue() {
        let win = window(&[2.0; 5], &[1.0; 5], 1.0, 0.0);
        let out = lindley_evolve(&win).unwrap();
        assert_eq!(out.w, vec![0.0; 5]);
        assert_eq!(out.e, vec![1.0; 5]);
        assert_eq!(out.d, vec![2.0; 5]);
        assert_eq!(cumulative_idle(&win, 1, 5).unwrap(), 5.0);
    }

    #[test]
    fn always_busy_queue_grows() {
        let win = window(&[1.0; 4], &[2.0; 4], 2.0, 0.0);
        let out = lindley_evolve(&win).unwrap();
        assert_eq!(out.w, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(out.e, vec![0.0; 4]);
        assert_eq!(out.d, vec![2.0; 4]);
    }

    #[test]
    fn single_customer() {
        let win = window(&[3.0], &[1.0], 1.0, 5.0);
        let out = lindley_evolve(&win).unwrap();
        assert_eq!((out.w[0], out.e[0]), (3.0, 0.0));
        assert_eq!(out.s_dual[0], 3.0);
    }

    #[test]
    fn mismatched_lengths_and_negative_state_rejected() {
        assert!(QueueWindow::new(vec![1.0f64; 3], vec![1.0; 2], 1.0, 0.0).is_err());
        assert!(QueueWindow::new(vec![1.0f64; 2], vec![1.0; 2], 1.0, -1.0).is_err());
        let win = window(&[1.0; 3], &[1.0; 3], 1.0, 0.0);
        assert!(cumulative_idle(&win, 0, 2).is_err());
        assert!(cumulative_idle(&win, 2, 4).is_err());
    }

    #[test]
    fn unstable_rates_rejected() {
        let mut rng = RngStream::new(1, 1).rng();
        assert!(sample_stationary_w0::<f64>(&mut rng, 0.5, 0.5).is_err());
        assert!(sample_nu::<f64>(RngStream::new(1, 1), 0.6, 0.5, 3).is_err());
        assert!(empty_queue_bound(0.4, 0.5, 3, 0.4).is_err());
        assert!(empty_queue_bound(0.4, 0.5, 3, 0.0).is_err());
    }

    #[test]
    fn empty_queue_bound_limits() {
        // Large theta powers blow up; the bound only helps for moderate m.
        let (b, _) = optimal_empty_queue_bound(0.45, 0.55, 1).unwrap();
        assert!(b <= 1.0 + 1e-12);
        let v = empty_queue_bound(0.45, 0.55, 10, 0.01).unwrap();
        assert!(v > 1.0 - 0.45 / 0.55);
    }

    #[test]
    fn heavy_traffic_form_matches_general_bound() {
        for (rho, r, n, m, theta) in [(0.5, 1.0, 1000.0, 20, 0.01), (0.3, 2.0, 8000.0, 5, 0.05), (0.7, 0.5, 500.0, 40, 0.003)] {
            let delta = r * f64::powf(n, -1.0 / 3.0);
            let general = empty_queue_bound(rho - delta, rho + delta, m, theta).unwrap();
            let heavy = heavy_traffic_bound(rho, r, n, m, theta).unwrap();
            assert!((general - heavy).abs() < 1e-12, "{general} vs {heavy}");
            let first = 2.0 * delta / (rho + delta);
            assert!((1.0 - (rho - delta) / (rho + delta) - first).abs() < 1e-15);
        }
    }

    #[test]
    fn stationary_sojourn_is_exponential_in_mean() {
        // t0 = w0 + s0 ~ Exp(rho - lambda) in equilibrium.
        let (lambda, rho) = (0.3, 0.5);
        let n = 20000;
        let mut total = 0.0;
        for i in 0..n {
            let w = sample_stationary_window::<f64>(RngStream::new(8, i), lambda, rho, 0).unwrap();
            total += w.t0();
        }
        let mean = total / n as f64;
        assert!((mean - 1.0 / (rho - lambda)).abs() < 4.0 * 5.0 / (n as f64).sqrt());
    }

    #[test]
    fn interchange_identity_deterministic_example() {
        let stream = RngStream::new(3, 1);
        let n = 3000;
        let mut r = stream.rng();
        let b: Vec<f64> = (0..n).map(|_| exp_from_uniform(r.uniform(), 0.2)).collect();
        let a: Vec<f64> = (0..n).map(|_| exp_from_uniform(r.uniform(), 0.4)).collect();
        let s: Vec<f64> = (0..n).map(|_| exp_from_uniform(r.uniform(), 0.8)).collect();
        let rep = interchange_check(&b, &a, &s, burn_in_length(0.2).unwrap(), 1e-9).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }
}
