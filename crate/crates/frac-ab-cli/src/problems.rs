//! Built-in scalar test problems so experiment runs need no user code.

use frac_ab::operators::{rl_integral_power, DerivativeKind, FractionalOrder};
use frac_ab::special::{gamma, mittag_leffler};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedProblem {
    /// rhs = −y, y0 = 1. Caputo exact solution E_α(−t^α).
    ExpDecay,
    /// rhs = Γ(4)/Γ(4−α)·t^{3−α}, y0 = 0. Caputo exact solution t³.
    PowerCaputo,
    /// rhs = t, y0 = 0. CF exact solution (1−α)/M·t + α/M·t²/2.
    CfLinear,
    /// rhs = t², y0 = 0. ABC exact solution (1−α)/B·t² + α/B·Γ(3)/Γ(3+α)·t^{2+α}.
    AbcPower,
    /// rhs = y(1−y), y0 = 0.5. No closed form.
    Logistic,
}

impl NamedProblem {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "expdecay" => Self::ExpDecay,
            "power-caputo" => Self::PowerCaputo,
            "cf-linear" => Self::CfLinear,
            "abc-power" => Self::AbcPower,
            "logistic" => Self::Logistic,
            _ => return None,
        })
    }

    pub fn names() -> &'static str {
        "expdecay, power-caputo, cf-linear, abc-power, logistic"
    }

    pub fn y0(&self) -> f64 {
        match self {
            Self::ExpDecay => 1.0,
            Self::Logistic => 0.5,
            _ => 0.0,
        }
    }

    /// Time/state right-hand side; α enters the power-caputo forcing.
    pub fn rhs(&self, alpha: FractionalOrder) -> Box<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync> {
        match self {
            Self::ExpDecay => Box::new(|_t, y, out| out[0] = -y[0]),
            Self::PowerCaputo => {
                let a = alpha.value();
                let c = gamma(4.0).unwrap() / gamma(4.0 - a).unwrap();
                Box::new(move |t, _y, out| out[0] = c * t.powf(3.0 - a))
            }
            Self::CfLinear => Box::new(|t, _y, out| out[0] = t),
            Self::AbcPower => Box::new(|t, _y, out| out[0] = t * t),
            Self::Logistic => Box::new(|_t, y, out| out[0] = y[0] * (1.0 - y[0])),
        }
    }

    /// Closed-form solution of the kind-matched integral equation, when one
    /// exists for this (problem, kind) pair.
    pub fn exact(
        &self,
        kind: DerivativeKind,
        alpha: FractionalOrder,
        norm: f64,
    ) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        let a = alpha.value();
        match (self, kind) {
            (Self::ExpDecay, DerivativeKind::Caputo) => {
                Some(Box::new(move |t| {
                    if t == 0.0 {
                        1.0
                    } else {
                        mittag_leffler(alpha, -t.powf(a)).unwrap_or(f64::NAN)
                    }
                }))
            }
            (Self::PowerCaputo, DerivativeKind::Caputo) => Some(Box::new(|t| t.powi(3))),
            (Self::CfLinear, DerivativeKind::CaputoFabrizio) => {
                Some(Box::new(move |t| (1.0 - a) / norm * t + a / norm * t * t / 2.0))
            }
            (Self::AbcPower, DerivativeKind::AtanganaBaleanuCaputo) => {
                // (1−α)/B·t² + α/(B·Γ(α))·∫(t−s)^{α−1}s² ds
                let tail = move |t: f64| {
                    a / norm * rl_integral_power(2.0, alpha, t).unwrap_or(f64::NAN)
                };
                Some(Box::new(move |t| (1.0 - a) / norm * t * t + tail(t)))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for n in ["expdecay", "power-caputo", "cf-linear", "abc-power", "logistic"] {
            assert!(NamedProblem::parse(n).is_some());
        }
        assert!(NamedProblem::parse("nope").is_none());
    }

    #[test]
    fn cf_linear_exact_value() {
        let p = NamedProblem::CfLinear;
        let e = p
            .exact(
                DerivativeKind::CaputoFabrizio,
                FractionalOrder::new(0.5).unwrap(),
                1.0,
            )
            .unwrap();
        assert!((e(1.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn abc_power_exact_value() {
        let p = NamedProblem::AbcPower;
        let e = p
            .exact(
                DerivativeKind::AtanganaBaleanuCaputo,
                FractionalOrder::new(0.5).unwrap(),
                1.0,
            )
            .unwrap();
        assert!((e(1.0) - 0.80090111122547001971).abs() < 1e-13);
    }
}
