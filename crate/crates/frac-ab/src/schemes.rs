//! Two-step Adams-Bashforth stepping for the three fractional kernels.
//!
//! Each scheme advances y_{n+1} = y_n + c_curr·f_n + c_prev·f_{n−1} with
//! per-kernel weights that collapse to the classical AB2 pair (3h/2, −h/2)
//! at α = 1. The Caputo/ABC weights follow the rederived forms (the printed
//! ones fail the α = 1 limit); the printed variants remain available behind
//! [`WeightFormula::PaperLiteral`] for side-by-side comparison.

use crate::error::{Error, Result};
use crate::operators::{DerivativeKind, FractionalOrder};
use crate::special::gamma;

/// Coefficients multiplying f_n and f_{n−1} in the two-step update; the sign
/// of `c_prev` is already folded in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWeights {
    pub c_curr: f64,
    pub c_prev: f64,
}

/// Which algebraic form of the weights to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightFormula {
    /// Weights retraced from the derivation; reduce to classical AB2 at α = 1.
    #[default]
    Rederived,
    /// Weights exactly as printed (known sign/exponent typos kept).
    PaperLiteral,
}

/// Γ(α)-free Caputo bracket pair (B_n, C_n): c_curr = B_n/Γ(α),
/// c_prev = −C_n/Γ(α). Shared with the ABC weights.
///
/// Evaluated in a cancellation-free arrangement (power differences via
/// expm1/ln_1p) so the α → 1 and h → 0 regimes stay accurate.
pub fn caputo_brackets(alpha: FractionalOrder, h: f64, n: usize) -> (f64, f64) {
    let a = alpha.value();
    if alpha.is_one() {
        return (1.5 * h, 0.5 * h);
    }
    let nf = n as f64;
    let tn = nf * h;
    let tn1 = (nf + 1.0) * h;
    let log_ratio = (1.0 / nf).ln_1p();
    // t_{n+1}^p − t_n^p = t_n^p · expm1(p·ln(t_{n+1}/t_n))
    let d_a = tn.powf(a) * (a * log_ratio).exp_m1();
    let d_a1 = tn.powf(a + 1.0) * ((a + 1.0) * log_ratio).exp_m1();
    let b = (tn1.powf(a) + d_a) / a - d_a1 / (h * (a + 1.0));
    let c = tn1.powf(a) / a - d_a1 / (h * (a + 1.0));
    (b, c)
}

/// Two-step weights for the Caputo kernel at step n ≥ 1.
pub fn caputo_weights(alpha: FractionalOrder, h: f64, n: usize) -> Result<StepWeights> {
    caputo_weights_in(WeightFormula::Rederived, alpha, h, n)
}

/// Caputo weights with an explicit formula choice.
pub fn caputo_weights_in(
    formula: WeightFormula,
    alpha: FractionalOrder,
    h: f64,
    n: usize,
) -> Result<StepWeights> {
    check_step(h, n)?;
    let a = alpha.value();
    match formula {
        WeightFormula::Rederived => {
            let (b, c) = caputo_brackets(alpha, h, n);
            let ga = gamma(a)?;
            Ok(StepWeights {
                c_curr: b / ga,
                c_prev: -c / ga,
            })
        }
        WeightFormula::PaperLiteral => {
            // As printed: f_n bracket {2h/α t_{n+1}^α − t_{n+1}^{α+1}/(α+1)
            //   + h/α t_n^α − t_n^{α+1}/α}, f_{n−1} bracket {h/α t_{n+1}^α
            //   − t_{n+1}^{α+1}/(α+1) + t_n^α/(α+1)}, both entering with "+".
            let ga = gamma(a)?;
            let nf = n as f64;
            let tn = nf * h;
            let tn1 = (nf + 1.0) * h;
            let b = (2.0 * h / a) * tn1.powf(a) - tn1.powf(a + 1.0) / (a + 1.0)
                + (h / a) * tn.powf(a)
                - tn.powf(a + 1.0) / a;
            let c = (h / a) * tn1.powf(a) - tn1.powf(a + 1.0) / (a + 1.0)
                + tn.powf(a) / (a + 1.0);
            Ok(StepWeights {
                c_curr: b / (h * ga),
                c_prev: c / (h * ga),
            })
        }
    }
}

/// Two-step weights for the Caputo-Fabrizio kernel (n-independent).
pub fn cf_weights(alpha: FractionalOrder, h: f64, norm: f64) -> Result<StepWeights> {
    cf_weights_in(WeightFormula::Rederived, alpha, h, norm)
}

/// CF weights with an explicit formula choice (the printed form carries "+"
/// on the f_{n−1} term).
pub fn cf_weights_in(
    formula: WeightFormula,
    alpha: FractionalOrder,
    h: f64,
    norm: f64,
) -> Result<StepWeights> {
    if h <= 0.0 {
        return Err(Error::Domain(format!("h must be positive, got {h}")));
    }
    if norm <= 0.0 {
        return Err(Error::Domain(format!("norm must be positive, got {norm}")));
    }
    let a = alpha.value();
    let local = (1.0 - a) / norm;
    let c_curr = local + 3.0 * a * h / (2.0 * norm);
    let prev_mag = local + a * h / (2.0 * norm);
    Ok(StepWeights {
        c_curr,
        c_prev: match formula {
            WeightFormula::Rederived => -prev_mag,
            WeightFormula::PaperLiteral => prev_mag,
        },
    })
}

/// Two-step weights for the Atangana-Baleanu (Caputo sense) kernel at step n ≥ 1.
pub fn abc_weights(alpha: FractionalOrder, h: f64, n: usize, norm: f64) -> Result<StepWeights> {
    check_step(h, n)?;
    if norm <= 0.0 {
        return Err(Error::Domain(format!("norm must be positive, got {norm}")));
    }
    let a = alpha.value();
    let (b, c) = caputo_brackets(alpha, h, n);
    let ga = gamma(a)?;
    let local = (1.0 - a) / norm;
    Ok(StepWeights {
        c_curr: local + a * b / (norm * ga),
        c_prev: -(local + a * c / (norm * ga)),
    })
}

fn check_step(h: f64, n: usize) -> Result<()> {
    if h <= 0.0 {
        return Err(Error::Domain(format!("h must be positive, got {h}")));
    }
    if n == 0 {
        return Err(Error::Domain(
            "two-step weights need n >= 1 (the interpolant uses f_{n-1})".into(),
        ));
    }
    Ok(())
}

/// Kind-dispatched weights at step n.
pub fn weights_for(
    kind: DerivativeKind,
    formula: WeightFormula,
    alpha: FractionalOrder,
    h: f64,
    n: usize,
    norm: f64,
) -> Result<StepWeights> {
    match kind {
        DerivativeKind::Caputo => caputo_weights_in(formula, alpha, h, n),
        DerivativeKind::CaputoFabrizio => cf_weights_in(formula, alpha, h, norm),
        DerivativeKind::AtanganaBaleanuCaputo => abc_weights(alpha, h, n, norm),
    }
}

/// An initial-value problem y' (fractional) = rhs(t, y), y(0) = y0.
///
/// The right-hand side writes into the output slice so stepping allocates
/// nothing per step.
pub struct Problem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub rhs: F,
    pub y0: Vec<f64>,
}

impl<F> Problem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(y0: Vec<f64>, rhs: F) -> Self {
        Self { rhs, y0 }
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }
}

/// Minimal two-step solver memory: no history beyond (f_n, f_{n−1}).
#[derive(Debug, Clone)]
pub struct StepperState {
    pub n: usize,
    pub t: f64,
    pub y: Vec<f64>,
    pub f: Vec<f64>,
    pub f_prev: Vec<f64>,
}

/// How y_1 is produced for the two-step schemes.
#[derive(Debug, Clone)]
pub enum BootstrapMode {
    /// One fractional rectangle (Euler) step with the kernel's one-step weight.
    FractionalEuler,
    /// Externally supplied y_1 (manufactured-solution runs).
    ExactSeed(Vec<f64>),
}

/// One-step rectangle weight of the kernel's integral form, used by the
/// fractional Euler bootstrap.
pub fn bootstrap_weight(
    kind: DerivativeKind,
    alpha: FractionalOrder,
    h: f64,
    norm: f64,
) -> Result<f64> {
    let a = alpha.value();
    Ok(match kind {
        DerivativeKind::Caputo => h.powf(a) / gamma(a + 1.0)?,
        DerivativeKind::CaputoFabrizio => (1.0 - a) / norm + a * h / norm,
        DerivativeKind::AtanganaBaleanuCaputo => {
            (1.0 - a) / norm + a * h.powf(a) / (norm * gamma(a + 1.0)?)
        }
    })
}

/// Produces the state after the seed step: n = 1, with f_1 and f_0 in place.
pub fn bootstrap<F>(
    problem: &Problem<F>,
    alpha: FractionalOrder,
    kind: DerivativeKind,
    h: f64,
    mode: &BootstrapMode,
    norm: f64,
) -> Result<StepperState>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if h <= 0.0 {
        return Err(Error::Domain(format!("h must be positive, got {h}")));
    }
    let dim = problem.dimension();
    let mut f0 = vec![0.0; dim];
    (problem.rhs)(0.0, &problem.y0, &mut f0);
    let y1 = match mode {
        BootstrapMode::FractionalEuler => {
            let w = bootstrap_weight(kind, alpha, h, norm)?;
            problem
                .y0
                .iter()
                .zip(f0.iter())
                .map(|(y, f)| y + w * f)
                .collect()
        }
        BootstrapMode::ExactSeed(seed) => {
            if seed.len() != dim {
                return Err(Error::Domain(format!(
                    "exact seed has dimension {}, problem has {}",
                    seed.len(),
                    dim
                )));
            }
            seed.clone()
        }
    };
    let mut f1 = vec![0.0; dim];
    (problem.rhs)(h, &y1, &mut f1);
    Ok(StepperState {
        n: 1,
        t: h,
        y: y1,
        f: f1,
        f_prev: f0,
    })
}

/// Advances the state by one step of the kind-matched two-step scheme.
pub fn step<F>(
    mut state: StepperState,
    problem: &Problem<F>,
    alpha: FractionalOrder,
    kind: DerivativeKind,
    h: f64,
    norm: f64,
) -> Result<StepperState>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let w = weights_for(kind, WeightFormula::Rederived, alpha, h, state.n, norm)?;
    advance(&mut state, problem, h, w);
    Ok(state)
}

// Shared update body: y += c_curr f + c_prev f_prev, then rotate f buffers.
fn advance<F>(state: &mut StepperState, problem: &Problem<F>, h: f64, w: StepWeights)
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    for i in 0..state.y.len() {
        state.y[i] += w.c_curr * state.f[i] + w.c_prev * state.f_prev[i];
    }
    state.n += 1;
    state.t = state.n as f64 * h;
    std::mem::swap(&mut state.f, &mut state.f_prev);
    (problem.rhs)(state.t, &state.y, &mut state.f);
}

/// A computed trajectory: (t_k, y_k) pairs including the initial state.
pub type Trajectory = Vec<(f64, Vec<f64>)>;

/// Integrates to T = floor(T/h)·h, invoking `observe` at every node from t = 0
/// on. Memory use is O(dimension) regardless of step count.
#[allow(clippy::too_many_arguments)]
pub fn integrate_with<F, O>(
    problem: &Problem<F>,
    alpha: FractionalOrder,
    kind: DerivativeKind,
    h: f64,
    t_final: f64,
    norm: f64,
    boot: &BootstrapMode,
    formula: WeightFormula,
    mut observe: O,
) -> Result<()>
where
    F: Fn(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
{
    if t_final < 2.0 * h {
        return Err(Error::Domain(format!(
            "integration window T = {t_final} must be at least 2h = {}",
            2.0 * h
        )));
    }
    // floor(T/h) steps; the epsilon absorbs representation error when h divides T.
    let steps = (t_final / h + 1e-9).floor() as usize;
    observe(0.0, &problem.y0);
    let mut state = bootstrap(problem, alpha, kind, h, boot, norm)?;
    observe(state.t, &state.y);
    // CF weights are n-independent; compute once.
    let cf_cached = if kind == DerivativeKind::CaputoFabrizio {
        Some(cf_weights_in(formula, alpha, h, norm)?)
    } else {
        None
    };
    while state.n < steps {
        let w = match cf_cached {
            Some(w) => w,
            None => weights_for(kind, formula, alpha, h, state.n, norm)?,
        };
        advance(&mut state, problem, h, w);
        observe(state.t, &state.y);
    }
    Ok(())
}

/// Integrates and collects the full trajectory.
pub fn integrate<F>(
    problem: &Problem<F>,
    alpha: FractionalOrder,
    kind: DerivativeKind,
    h: f64,
    t_final: f64,
    norm: f64,
    boot: &BootstrapMode,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let mut out = Trajectory::with_capacity((t_final / h).round() as usize + 1);
    integrate_with(
        problem,
        alpha,
        kind,
        h,
        t_final,
        norm,
        boot,
        WeightFormula::Rederived,
        |t, y| out.push((t, y.to_vec())),
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fo(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    const ALL_KINDS: [DerivativeKind; 3] = [
        DerivativeKind::Caputo,
        DerivativeKind::CaputoFabrizio,
        DerivativeKind::AtanganaBaleanuCaputo,
    ];

    #[test]
    fn ab2_limit_all_kinds() {
        for kind in ALL_KINDS {
            for &h in &[0.1, 0.01] {
                for n in [1usize, 7, 50, 100] {
                    let w = weights_for(kind, WeightFormula::Rederived, fo(1.0), h, n, 1.0)
                        .unwrap();
                    assert!(
                        ((w.c_curr - 1.5 * h) / (1.5 * h)).abs() < 1e-12,
                        "{kind:?} h={h} n={n}"
                    );
                    assert!(((w.c_prev + 0.5 * h) / (0.5 * h)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn caputo_weights_pinned() {
        // α = 0.5, h = 0.1, n = 1; 40-digit pins.
        let (b, c) = caputo_brackets(fo(0.5), 0.1, 1);
        assert!((b - 0.77093256664410392715).abs() < 1e-15);
        assert!((c - 0.50896090767786391499).abs() < 1e-15);
        let w = caputo_weights(fo(0.5), 0.1, 1).unwrap();
        assert!((w.c_curr - 0.43495212371833986426).abs() < 1e-15);
        assert!((w.c_prev + 0.28715044254486207752).abs() < 1e-15);
    }

    #[test]
    fn caputo_weights_vanish_with_h() {
        for k in 1..=6 {
            let h = 10f64.powi(-k);
            let w = caputo_weights(fo(0.5), h, 3).unwrap();
            assert!(w.c_curr.abs() < 4.0 * h.sqrt());
            assert!(w.c_prev.abs() < 4.0 * h.sqrt());
        }
    }

    #[test]
    fn cf_weights_examples() {
        let w = cf_weights(fo(1.0), 0.1, 1.0).unwrap();
        assert!((w.c_curr - 0.15).abs() < 1e-15 && (w.c_prev + 0.05).abs() < 1e-15);
        let w = cf_weights(fo(0.5), 0.1, 1.0).unwrap();
        assert!((w.c_curr - 0.575).abs() < 1e-15 && (w.c_prev + 0.525).abs() < 1e-15);
        // α → 0 relaxation limit (1, −1): probe just above the open boundary.
        let w = cf_weights(fo(1e-12), 0.1, 1.0).unwrap();
        assert!((w.c_curr - 1.0).abs() < 1e-10 && (w.c_prev + 1.0).abs() < 1e-10);
    }

    #[test]
    fn cf_literal_flips_sign() {
        let r = cf_weights_in(WeightFormula::Rederived, fo(0.5), 0.1, 1.0).unwrap();
        let l = cf_weights_in(WeightFormula::PaperLiteral, fo(0.5), 0.1, 1.0).unwrap();
        assert_eq!(r.c_curr, l.c_curr);
        assert_eq!(r.c_prev, -l.c_prev);
        // The printed form fails the AB2 limit.
        let l1 = cf_weights_in(WeightFormula::PaperLiteral, fo(1.0), 0.1, 1.0).unwrap();
        assert!((l1.c_prev - 0.05).abs() < 1e-15);
    }

    #[test]
    fn abc_weights_compose_brackets() {
        // α = 1, norm = 1 reduces to the Caputo weights.
        let w = abc_weights(fo(1.0), 0.1, 3, 1.0).unwrap();
        assert!((w.c_curr - 0.15).abs() < 1e-15 && (w.c_prev + 0.05).abs() < 1e-15);
        // Pinned composition at α = 0.5, h = 0.1, n = 1, B = GammaBlend(0.5).
        let w = abc_weights(fo(0.5), 0.1, 1, 0.78209479177387814347).unwrap();
        assert!((w.c_curr - 0.91737736832622842193).abs() < 1e-14);
        assert!((w.c_prev + 0.82288646854779676725).abs() < 1e-14);
        // α → 0+: weights → (1, −1) with norm 1.
        let w = abc_weights(fo(1e-12), 0.1, 1, 1.0).unwrap();
        assert!((w.c_curr - 1.0).abs() < 1e-9 && (w.c_prev + 1.0).abs() < 1e-9);
    }

    #[test]
    fn weight_sign_consistency() {
        // c_prev < 0 < c_curr for CF and ABC whenever the local term dominates.
        for &a in &[0.1, 0.35, 0.6, 0.9] {
            for n in [1usize, 5, 40] {
                let w = cf_weights(fo(a), 0.01, 1.0).unwrap();
                assert!(w.c_prev < 0.0 && w.c_curr > 0.0);
                let w = abc_weights(fo(a), 0.01, n, 1.0).unwrap();
                assert!(w.c_prev < 0.0 && w.c_curr > 0.0, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn rejects_step_zero() {
        assert!(caputo_weights(fo(0.5), 0.1, 0).is_err());
        assert!(abc_weights(fo(0.5), 0.1, 0, 1.0).is_err());
        assert!(cf_weights(fo(0.5), -0.1, 1.0).is_err());
    }

    #[test]
    fn bootstrap_examples() {
        // rhs ≡ 0 keeps y at y0.
        let p = Problem::new(vec![3.25], |_, _, out: &mut [f64]| out[0] = 0.0);
        for kind in ALL_KINDS {
            let s = bootstrap(&p, fo(0.5), kind, 0.1, &BootstrapMode::FractionalEuler, 1.0)
                .unwrap();
            assert_eq!(s.y[0], 3.25);
            assert_eq!(s.n, 1);
        }
        // Caputo, α = 1, rhs ≡ 1 is classical Euler.
        let p = Problem::new(vec![0.0], |_, _, out: &mut [f64]| out[0] = 1.0);
        let s = bootstrap(&p, fo(1.0), DerivativeKind::Caputo, 0.1, &BootstrapMode::FractionalEuler, 1.0)
            .unwrap();
        assert!((s.y[0] - 0.1).abs() < 1e-16);
        // Caputo, α = 0.5: rectangle equals the exact integral for constant f.
        let s = bootstrap(&p, fo(0.5), DerivativeKind::Caputo, 0.1, &BootstrapMode::FractionalEuler, 1.0)
            .unwrap();
        assert!((s.y[0] - 0.35682482323055422291).abs() < 1e-15);
    }

    #[test]
    fn step_zero_rhs_fixed_point() {
        let p = Problem::new(vec![1.0, -2.0], |_, _, out: &mut [f64]| out.fill(0.0));
        for kind in ALL_KINDS {
            let s = bootstrap(&p, fo(0.4), kind, 0.05, &BootstrapMode::FractionalEuler, 1.0)
                .unwrap();
            let s = step(s, &p, fo(0.4), kind, 0.05, 1.0).unwrap();
            assert_eq!(s.y, vec![1.0, -2.0]);
            assert_eq!(s.n, 2);
        }
    }

    #[test]
    fn integrate_constant_trajectory() {
        let p = Problem::new(vec![2.0], |_, _, out: &mut [f64]| out[0] = 0.0);
        let tr = integrate(
            &p,
            fo(0.7),
            DerivativeKind::Caputo,
            0.1,
            1.0,
            1.0,
            &BootstrapMode::FractionalEuler,
        )
        .unwrap();
        assert_eq!(tr.len(), 11);
        assert!(tr.iter().all(|(_, y)| y[0] == 2.0));
    }

    #[test]
    fn integrate_constant_rhs_caputo_exact() {
        // Constant f: the Caputo scheme telescopes to the exact t^α/Γ(α+1).
        let p = Problem::new(vec![0.0], |_, _, out: &mut [f64]| out[0] = 1.0);
        let a = 0.6;
        let tr = integrate(
            &p,
            fo(a),
            DerivativeKind::Caputo,
            0.01,
            1.0,
            1.0,
            &BootstrapMode::FractionalEuler,
        )
        .unwrap();
        let g = gamma(a + 1.0).unwrap();
        for (t, y) in tr.iter() {
            let exact = t.powf(a) / g;
            assert!((y[0] - exact).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn alpha_one_kinds_coincide() {
        // All three kernels produce pairwise identical trajectories at α = 1.
        let mk = || Problem::new(vec![1.0], |t: f64, y: &[f64], out: &mut [f64]| {
            out[0] = -y[0] + (0.5 * t).sin()
        });
        let p = mk();
        let base = integrate(&p, fo(1.0), DerivativeKind::Caputo, 0.01, 1.0, 1.0, &BootstrapMode::FractionalEuler).unwrap();
        for kind in [DerivativeKind::CaputoFabrizio, DerivativeKind::AtanganaBaleanuCaputo] {
            let tr = integrate(&p, fo(1.0), kind, 0.01, 1.0, 1.0, &BootstrapMode::FractionalEuler).unwrap();
            for ((_, a), (_, b)) in base.iter().zip(tr.iter()) {
                assert!((a[0] - b[0]).abs() <= 1e-12 * a[0].abs().max(1.0));
            }
        }
    }

    #[test]
    fn update_linear_in_rhs() {
        // Trajectory of a·g1 + b·g2 equals a·(run g1) + b·(run g2), time-only rhs.
        let g1 = |t: f64| (3.0 * t).cos();
        let g2 = |t: f64| t * t;
        let (a, b) = (1.75, -0.4);
        let run = |f: Box<dyn Fn(f64) -> f64>| {
            let p = Problem::new(vec![0.0], move |t: f64, _: &[f64], out: &mut [f64]| {
                out[0] = f(t)
            });
            integrate(&p, fo(0.5), DerivativeKind::AtanganaBaleanuCaputo, 0.05, 1.0, 1.0, &BootstrapMode::FractionalEuler).unwrap()
        };
        let t1 = run(Box::new(g1));
        let t2 = run(Box::new(g2));
        let tc = run(Box::new(move |t| a * g1(t) + b * g2(t)));
        for i in 0..tc.len() {
            let want = a * t1[i].1[0] + b * t2[i].1[0];
            assert!((tc[i].1[0] - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn integrate_rejects_short_window() {
        let p = Problem::new(vec![0.0], |_, _, out: &mut [f64]| out[0] = 1.0);
        assert!(integrate(&p, fo(0.5), DerivativeKind::Caputo, 0.3, 0.5, 1.0, &BootstrapMode::FractionalEuler).is_err());
    }
}
