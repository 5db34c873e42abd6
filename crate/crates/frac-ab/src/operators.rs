//! Fractional derivative and integral operators: closed forms for power
//! functions and kernel-weighted quadrature for everything else. These supply
//! the reference values used when constructing forcings and validating the
//! stepping schemes.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{gamma, mittag_leffler};

/// Validated fractional order α ∈ (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidOrder(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

/// Which nonlocal kernel drives an operator or scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    /// Power-law kernel (t−τ)^{α−1}.
    Caputo,
    /// Exponential kernel exp(−α(t−τ)/(1−α)).
    CaputoFabrizio,
    /// Mittag-Leffler kernel E_α(−α(t−τ)^α/(1−α)).
    AtanganaBaleanuCaputo,
}

/// Caputo derivative of t^k: Γ(k+1)/Γ(k+1−α) · t^{k−α}.
pub fn caputo_derivative_power(k: f64, alpha: FractionalOrder, t: f64) -> Result<f64> {
    let a = alpha.value();
    if k < a {
        return Err(Error::Domain(format!(
            "caputo_derivative_power requires k >= alpha (k={k}, alpha={a})"
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma(k + 1.0)? / gamma(k + 1.0 - a)? * t.powf(k - a))
}

/// Riemann-Liouville integral of t^k: Γ(k+1)/Γ(k+1+α) · t^{k+α}.
pub fn rl_integral_power(k: f64, alpha: FractionalOrder, t: f64) -> Result<f64> {
    let a = alpha.value();
    if k < 0.0 {
        return Err(Error::Domain(format!("rl_integral_power requires k >= 0, got {k}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma(k + 1.0)? / gamma(k + 1.0 + a)? * t.powf(k + a))
}

/// Node budget for the adaptive kernel quadrature (panels of 16 nodes).
const MAX_PANELS: usize = 1 << 16;

/// ∫_0^t K(t−τ) g(τ) dτ with the kernel selected by `kind`, to absolute
/// accuracy `tol`.
///
/// The power and Mittag-Leffler kernels are integrated in the substituted
/// variable w = (t−τ)^α, which removes the endpoint singularity; panels are
/// graded toward the τ = t end in all cases.
pub fn kernel_weighted_integral<G: Fn(f64) -> f64>(
    g: G,
    alpha: FractionalOrder,
    kind: DerivativeKind,
    t: f64,
    tol: f64,
) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = alpha.value();
    match kind {
        DerivativeKind::Caputo => {
            // ∫_0^t (t−τ)^{α−1} g(τ) dτ = (1/α) ∫_0^{t^α} g(t − w^{1/α}) dw
            let inv_a = 1.0 / a;
            let len = t.powf(a);
            let mut f = |w: f64| g((t - w.powf(inv_a)).max(0.0));
            let v = quadrature::graded_adaptive(&mut f, len, 3.0, tol * a, MAX_PANELS)
                .ok_or_else(|| nonconv(t, tol))?;
            Ok(v / a)
        }
        DerivativeKind::CaputoFabrizio => {
            if alpha.is_one() {
                return Err(Error::Domain(
                    "exponential kernel integral requires alpha < 1".into(),
                ));
            }
            let rate = a / (1.0 - a);
            // ∫_0^t e^{−a/(1−α)·u} g(t−u) du, graded toward u = 0.
            let mut f = |u: f64| (-rate * u).exp() * g(t - u);
            quadrature::graded_adaptive(&mut f, t, 2.0, tol, MAX_PANELS)
                .ok_or_else(|| nonconv(t, tol))
        }
        DerivativeKind::AtanganaBaleanuCaputo => {
            if alpha.is_one() {
                return Err(Error::Domain(
                    "Mittag-Leffler kernel integral requires alpha < 1".into(),
                ));
            }
            let lam = a / (1.0 - a);
            let inv_a = 1.0 / a;
            let len = t.powf(a);
            // Substituted form: (1/α) ∫_0^{t^α} E_α(−λw) g(t − w^{1/α}) w^{1/α−1} dw
            let mut bad = None;
            let mut f = |w: f64| {
                let kernel = match mittag_leffler(alpha, -lam * w) {
                    Ok(v) => v,
                    Err(e) => {
                        bad = Some(e);
                        0.0
                    }
                };
                kernel * g((t - w.powf(inv_a)).max(0.0)) * w.powf(inv_a - 1.0)
            };
            let v = quadrature::graded_adaptive(&mut f, len, 3.0, tol * a, MAX_PANELS)
                .ok_or_else(|| nonconv(t, tol))?;
            if let Some(e) = bad {
                return Err(e);
            }
            Ok(v / a)
        }
    }
}

fn nonconv(t: f64, tol: f64) -> Error {
    Error::NonConvergence(format!(
        "kernel quadrature did not reach tol {tol:.1e} within the node budget (t={t})"
    ))
}

/// Finite sum of monomials c · t^k describing the time part of a manufactured
/// solution; exponents must satisfy k ≥ 1.
pub type MonomialSum = [(f64, f64)];

/// Fractional derivative (of the `kind` flavor) of Σ c_i t^{k_i} at time t.
///
/// Caputo uses the closed form per monomial; CF and ABC apply their kernel to
/// the term-wise classical derivative via quadrature (tolerance 1e-10).
/// At α = 1 all kinds collapse to the classical derivative.
pub fn fractional_derivative_of_exact_solution(
    kind: DerivativeKind,
    alpha: FractionalOrder,
    monomials: &MonomialSum,
    t: f64,
    norm: f64,
) -> Result<f64> {
    if monomials.is_empty() || t == 0.0 {
        return Ok(0.0);
    }
    for &(_, k) in monomials {
        if k < 1.0 {
            return Err(Error::Domain(format!(
                "monomial exponents must be >= 1, got {k}"
            )));
        }
    }
    let a = alpha.value();
    if alpha.is_one() {
        // Classical derivative, quadrature-free.
        return Ok(monomials
            .iter()
            .map(|&(c, k)| c * k * t.powf(k - 1.0))
            .sum());
    }
    match kind {
        DerivativeKind::Caputo => {
            let mut acc = 0.0;
            for &(c, k) in monomials {
                acc += c * caputo_derivative_power(k, alpha, t)?;
            }
            Ok(acc)
        }
        DerivativeKind::CaputoFabrizio | DerivativeKind::AtanganaBaleanuCaputo => {
            // powf(0, 0) = 1 covers the k = 1 monomial at τ = 0.
            let g = |tau: f64| -> f64 {
                monomials
                    .iter()
                    .map(|&(c, k)| c * k * tau.powf(k - 1.0))
                    .sum()
            };
            let integral = kernel_weighted_integral(g, alpha, kind, t, 1e-10)?;
            Ok(norm / (1.0 - a) * integral)
        }
    }
}
