//! Truncation-error bounds, stability-gap diagnostics and empirical error /
//! convergence-order measurement.

use crate::error::{Error, Result};
use crate::schemes::Trajectory;
use crate::special::gamma;

/// Which exponent the Caputo remainder bound uses in its (n+1)^α + n^? term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundVariant {
    /// n^α, the exponent the proof concludes with.
    #[default]
    ProofExponent,
    /// n², the exponent in the printed statement.
    PrintedExponent,
}

/// Remainder bound for the Caputo two-step scheme:
/// h^{3+α}·M·((n+1)^α + n^α)/(12·Γ(α+1)), proof-exponent form.
pub fn caputo_remainder_bound(
    alpha: crate::operators::FractionalOrder,
    h: f64,
    n: usize,
    big_m: f64,
) -> Result<f64> {
    caputo_remainder_bound_in(BoundVariant::ProofExponent, alpha, h, n, big_m)
}

/// Caputo remainder bound with an explicit exponent-variant choice.
pub fn caputo_remainder_bound_in(
    variant: BoundVariant,
    alpha: crate::operators::FractionalOrder,
    h: f64,
    n: usize,
    big_m: f64,
) -> Result<f64> {
    if big_m < 0.0 {
        return Err(Error::Domain(format!("M must be nonnegative, got {big_m}")));
    }
    let a = alpha.value();
    let nf = n as f64;
    let tail = match variant {
        BoundVariant::ProofExponent => (nf + 1.0).powf(a) + nf.powf(a),
        BoundVariant::PrintedExponent => (nf + 1.0).powf(a) + nf * nf,
    };
    Ok(h.powf(3.0 + a) * big_m * tail / (12.0 * gamma(a + 1.0)?))
}

/// CF remainder bound (α/norm)·(n+1)!·h^{n+1}·M. Grows factorially in n;
/// diagnostic only, guarded against overflow for n > 20.
pub fn cf_remainder_bound(
    alpha: crate::operators::FractionalOrder,
    h: f64,
    n: usize,
    big_m: f64,
    norm: f64,
) -> Result<f64> {
    if n > 20 {
        return Err(Error::Overflow(format!(
            "cf_remainder_bound factorial guard: n = {n} > 20"
        )));
    }
    if big_m < 0.0 {
        return Err(Error::Domain(format!("M must be nonnegative, got {big_m}")));
    }
    if norm <= 0.0 {
        return Err(Error::Domain(format!("norm must be positive, got {norm}")));
    }
    let mut fac = 1.0f64;
    for k in 2..=(n + 1) {
        fac *= k as f64;
    }
    Ok(alpha.value() / norm * fac * h.powi(n as i32 + 1) * big_m)
}

/// Successive right-hand-side gaps ‖f_n − f_{n−1}‖_∞ along a trajectory,
/// the quantity the stability theorems key on.
pub fn stability_gap<F>(trajectory: &Trajectory, rhs: F) -> Vec<(usize, f64)>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if trajectory.len() < 2 {
        return Vec::new();
    }
    let dim = trajectory[0].1.len();
    let mut prev = vec![0.0; dim];
    let mut cur = vec![0.0; dim];
    rhs(trajectory[0].0, &trajectory[0].1, &mut prev);
    let mut out = Vec::with_capacity(trajectory.len() - 1);
    for (n, (t, y)) in trajectory.iter().enumerate().skip(1) {
        rhs(*t, y, &mut cur);
        let gap = cur
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        out.push((n, gap));
        std::mem::swap(&mut prev, &mut cur);
    }
    out
}

/// Max over trajectory nodes of the max-norm difference from `exact(t)`.
pub fn max_error<E>(trajectory: &Trajectory, exact: E) -> f64
where
    E: Fn(f64) -> Vec<f64>,
{
    trajectory
        .iter()
        .map(|(t, y)| {
            let e = exact(*t);
            y.iter()
                .zip(e.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        })
        .fold(0.0f64, f64::max)
}

/// Experimental orders of convergence: log(e_i/e_{i+1}) / log(h_i/h_{i+1}).
pub fn observed_order(errors_by_h: &[(f64, f64)]) -> Result<Vec<f64>> {
    if errors_by_h.len() < 2 {
        return Err(Error::Domain(
            "observed_order needs at least two (h, error) entries".into(),
        ));
    }
    for w in errors_by_h.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::Domain("h values must be strictly decreasing".into()));
        }
    }
    if errors_by_h.iter().any(|&(_, e)| e <= 0.0) {
        return Err(Error::Domain("errors must be positive".into()));
    }
    Ok(errors_by_h
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect())
}

/// Empirical error summary for a run or a refinement study.
#[derive(Debug, Clone, Default)]
pub struct ErrorReport {
    /// Max-norm error against the exact/reference solution.
    pub max_error: f64,
    /// (h, error) pairs, h strictly decreasing, for ladder studies.
    pub errors_by_h: Vec<(f64, f64)>,
    /// Successive observed orders (len = errors_by_h.len() − 1).
    pub observed_orders: Vec<f64>,
    /// (n, theoretical bound) pairs from the remainder bounds.
    pub bound_values: Vec<(usize, f64)>,
}

impl ErrorReport {
    /// Builds a ladder report, filling in the observed orders.
    pub fn from_ladder(errors_by_h: Vec<(f64, f64)>) -> Result<Self> {
        let observed_orders = observed_order(&errors_by_h)?;
        let max_error = errors_by_h.iter().map(|&(_, e)| e).fold(0.0f64, f64::max);
        Ok(Self {
            max_error,
            errors_by_h,
            observed_orders,
            bound_values: Vec::new(),
        })
    }
}
