//! Full-memory reference solvers for each kernel's Volterra integral form,
//! plus the classical AB2 integrator. These are the ground-truth oracles the
//! two-step schemes are measured against: product-trapezoidal history
//! quadrature (kernel moments integrated exactly, rhs interpolated linearly)
//! on a grid `substeps` times finer than the scheme's, with one optional
//! Richardson level on top.

use crate::error::{Error, Result};
use crate::operators::FractionalOrder;
use crate::schemes::{Problem, Trajectory};
use crate::special::gamma;

/// Accuracy knobs for the reference solvers.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceConfig {
    /// Fine-grid refinement factor relative to the scheme step h.
    pub substeps: usize,
    /// Fixed-point tolerance for the implicit per-node resolution.
    pub tol: f64,
    /// Combine runs at `substeps` and `2·substeps` by Richardson
    /// extrapolation. Off reproduces the plain product-trapezoid rule.
    pub richardson: bool,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            substeps: 32,
            tol: 1e-12,
            richardson: true,
        }
    }
}

impl ReferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.substeps == 0 {
            return Err(Error::Domain("substeps must be >= 1".into()));
        }
        if self.tol <= 0.0 {
            return Err(Error::Domain("tol must be positive".into()));
        }
        Ok(())
    }
}

const FP_DAMPING: f64 = 0.5;
const FP_MAX_ITER: usize = 200;

// Damped fixed-point update for the implicit node equation
//   y = base + w_local·f(t, y);  eval writes f(t, y) into a scratch buffer.
fn resolve_node<F>(
    rhs: &F,
    t: f64,
    base: &[f64],
    w_local: f64,
    y: &mut Vec<f64>,
    scratch: &mut Vec<f64>,
    tol: f64,
) -> Result<()>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    for _ in 0..FP_MAX_ITER {
        rhs(t, y, scratch);
        let mut delta = 0.0f64;
        for i in 0..y.len() {
            let target = base[i] + w_local * scratch[i];
            let next = FP_DAMPING * y[i] + (1.0 - FP_DAMPING) * target;
            delta = delta.max((next - y[i]).abs());
            y[i] = next;
        }
        if delta <= tol {
            return Ok(());
        }
    }
    rhs(t, y, scratch);
    let mut residual = 0.0f64;
    for i in 0..y.len() {
        residual = residual.max((base[i] + w_local * scratch[i] - y[i]).abs());
    }
    if residual <= tol * 10.0 {
        return Ok(());
    }
    Err(Error::FixedPoint { t, residual })
}

// Plain product-trapezoid solve of
//   y(t) = y0 + local·f(t, y(t)) + scale·∫_0^t (t−s)^{α−1} f(s, y(s)) ds
// on the fine grid; covers all three kernels:
//   caputo: local = 0,            scale = 1/Γ(α)
//   cf:     local = (1−α)/M, α→   scale = α/M with kernel ≡ 1 (α_k = 1)
//   abc:    local = (1−α)/B,      scale = α/(B·Γ(α))
// `alpha_kernel` is the kernel exponent (1 for the CF flat kernel).
fn volterra_product_trapezoid<F>(
    problem: &Problem<F>,
    alpha_kernel: f64,
    local: f64,
    scale: f64,
    h: f64,
    t_final: f64,
    substeps: usize,
    tol: f64,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let hf = h / substeps as f64;
    let total = (t_final / hf + 1e-9).floor() as usize;
    let dim = problem.dimension();
    let a = alpha_kernel;

    // Per-cell kernel moments relative to the evaluation point t_m:
    // for cell j (s ∈ [t_j, t_{j+1}], gap k = m−j−1):
    //   I1(k) = ∫ σ^{α−1}(σ−A) dσ,  I2(k) = ∫ σ^{α−1}(B−σ) dσ,
    //   A = k·hf, B = (k+1)·hf   (weights of f_j and f_{j+1}, divided by hf).
    // Power differences are precomputed stably, independent of m.
    let mut d_pa = vec![0.0; total]; // ((k+1)hf)^α − (k·hf)^α
    let mut d_pa1 = vec![0.0; total];
    for k in 0..total {
        if k == 0 {
            d_pa[0] = hf.powf(a);
            d_pa1[0] = hf.powf(a + 1.0);
        } else {
            let kk = k as f64;
            let lr = (1.0 / kk).ln_1p();
            let base = kk * hf;
            d_pa[k] = base.powf(a) * (a * lr).exp_m1();
            d_pa1[k] = base.powf(a + 1.0) * ((a + 1.0) * lr).exp_m1();
        }
    }

    let mut ys: Vec<Vec<f64>> = Vec::with_capacity(total + 1);
    let mut fs: Vec<Vec<f64>> = Vec::with_capacity(total + 1);
    ys.push(problem.y0.clone());
    let mut f0 = vec![0.0; dim];
    (problem.rhs)(0.0, &problem.y0, &mut f0);
    fs.push(f0);

    let mut base = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    for m in 1..=total {
        base.copy_from_slice(&problem.y0);
        // History: cells j = 0..m−1; the f_m part of the last cell is implicit.
        for j in 0..m {
            let k = m - j - 1;
            let a_edge = k as f64 * hf;
            let b_edge = (k + 1) as f64 * hf;
            let i1 = d_pa1[k] / (a + 1.0) - a_edge * d_pa[k] / a;
            let i2 = b_edge * d_pa[k] / a - d_pa1[k] / (a + 1.0);
            let (w_j, w_j1) = (scale * i1 / hf, scale * i2 / hf);
            let fj = &fs[j];
            for i in 0..dim {
                base[i] += w_j * fj[i];
            }
            if j + 1 < m {
                let fj1 = &fs[j + 1];
                for i in 0..dim {
                    base[i] += w_j1 * fj1[i];
                }
            }
        }
        let w_last = scale * (b_edge_last(hf, a)) / hf + local;
        let t = m as f64 * hf;
        let mut y = ys[m - 1].clone();
        resolve_node(&problem.rhs, t, &base, w_last, &mut y, &mut scratch, tol)?;
        (problem.rhs)(t, &y, &mut scratch);
        fs.push(scratch.clone());
        ys.push(y);
    }

    Ok((0..=total / substeps)
        .map(|k| {
            let m = k * substeps;
            (m as f64 * hf, ys[m].clone())
        })
        .collect())
}

// I2 moment of the cell adjacent to the evaluation point (k = 0):
// ∫_0^{hf} σ^{α−1}(hf−σ) dσ = hf^{α+1}·(1/α − 1/(α+1)).
fn b_edge_last(hf: f64, a: f64) -> f64 {
    hf.powf(a + 1.0) * (1.0 / a - 1.0 / (a + 1.0))
}

fn richardson_combine(coarse: &Trajectory, fine: &Trajectory) -> Trajectory {
    coarse
        .iter()
        .zip(fine.iter())
        .map(|((t, yc), (_, yf))| {
            let y = yc
                .iter()
                .zip(yf.iter())
                .map(|(c, f)| (4.0 * f - c) / 3.0)
                .collect();
            (*t, y)
        })
        .collect()
}

fn run_kernel_reference<F>(
    problem: &Problem<F>,
    alpha_kernel: f64,
    local: f64,
    scale: f64,
    h: f64,
    t_final: f64,
    cfg: &ReferenceConfig,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    cfg.validate()?;
    let plain = volterra_product_trapezoid(
        problem,
        alpha_kernel,
        local,
        scale,
        h,
        t_final,
        cfg.substeps,
        cfg.tol,
    )?;
    if !cfg.richardson {
        return Ok(plain);
    }
    let fine = volterra_product_trapezoid(
        problem,
        alpha_kernel,
        local,
        scale,
        h,
        t_final,
        cfg.substeps * 2,
        cfg.tol,
    )?;
    Ok(richardson_combine(&plain, &fine))
}

/// Reference solution of the Caputo Volterra form
/// y(t) = y0 + (1/Γ(α)) ∫_0^t (t−s)^{α−1} f(s, y(s)) ds.
pub fn caputo_reference<F>(
    problem: &Problem<F>,
    alpha: FractionalOrder,
    h: f64,
    t_final: f64,
    cfg: &ReferenceConfig,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let a = alpha.value();
    run_kernel_reference(problem, a, 0.0, 1.0 / gamma(a)?, h, t_final, cfg)
}

/// Reference solution of the CF integral form
/// y(t) = y0 + (1−α)/M · f(t, y(t)) + (α/M) ∫_0^t f(s, y(s)) ds,
/// with the local term evaluated at the current time.
pub fn cf_reference<F>(
    problem: &Problem<F>,
    alpha: FractionalOrder,
    h: f64,
    t_final: f64,
    norm: f64,
    cfg: &ReferenceConfig,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let a = alpha.value();
    // Flat kernel = power kernel with exponent 1.
    run_kernel_reference(problem, 1.0, (1.0 - a) / norm, a / norm, h, t_final, cfg)
}

/// Reference solution of the ABC integral form
/// y(t) = y0 + (1−α)/B · f(t, y(t)) + α/(B·Γ(α)) ∫_0^t (t−s)^{α−1} f ds.
pub fn abc_reference<F>(
    problem: &Problem<F>,
    alpha: FractionalOrder,
    h: f64,
    t_final: f64,
    norm: f64,
    cfg: &ReferenceConfig,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let a = alpha.value();
    run_kernel_reference(
        problem,
        a,
        (1.0 - a) / norm,
        a / (norm * gamma(a)?),
        h,
        t_final,
        cfg,
    )
}

/// Classical two-step Adams-Bashforth with one Euler bootstrap step.
pub fn classical_ab2<F>(problem: &Problem<F>, h: f64, t_final: f64) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if t_final < 2.0 * h {
        return Err(Error::Domain(format!(
            "integration window T = {t_final} must be at least 2h = {}",
            2.0 * h
        )));
    }
    let steps = (t_final / h + 1e-9).floor() as usize;
    let dim = problem.dimension();
    let mut out = Trajectory::with_capacity(steps + 1);
    out.push((0.0, problem.y0.clone()));
    let mut f_prev = vec![0.0; dim];
    (problem.rhs)(0.0, &problem.y0, &mut f_prev);
    let mut y: Vec<f64> = problem
        .y0
        .iter()
        .zip(f_prev.iter())
        .map(|(y, f)| y + h * f)
        .collect();
    out.push((h, y.clone()));
    let mut f = vec![0.0; dim];
    (problem.rhs)(h, &y, &mut f);
    for n in 1..steps {
        for i in 0..dim {
            y[i] += h * (3.0 * f[i] - f_prev[i]) / 2.0;
        }
        let t = (n + 1) as f64 * h;
        out.push((t, y.clone()));
        std::mem::swap(&mut f, &mut f_prev);
        (problem.rhs)(t, &y, &mut f);
    }
    Ok(out)
}
