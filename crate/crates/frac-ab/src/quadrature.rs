//! Composite Gauss-Legendre quadrature with graded panels.
//!
//! Internal machinery backing `kernel_weighted_integral` and the spectral
//! Mittag-Leffler integral. Panels are graded toward a singular endpoint and
//! the panel count doubles until two successive estimates agree to the
//! requested tolerance.

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
pub(crate) const GL16: [(f64, f64); 16] = [
    (-9.89400934991649939e-01, 2.71524594117540374e-02),
    (-9.44575023073232600e-01, 6.22535239386477063e-02),
    (-8.65631202387831755e-01, 9.51585116824925914e-02),
    (-7.55404408355002999e-01, 1.24628971255534030e-01),
    (-6.17876244402643771e-01, 1.49595988816576764e-01),
    (-4.58016777657227370e-01, 1.69156519395002619e-01),
    (-2.81603550779258915e-01, 1.82603415044923612e-01),
    (-9.50125098376374544e-02, 1.89450610455068585e-01),
    (9.50125098376374544e-02, 1.89450610455068585e-01),
    (2.81603550779258915e-01, 1.82603415044923612e-01),
    (4.58016777657227370e-01, 1.69156519395002619e-01),
    (6.17876244402643771e-01, 1.49595988816576764e-01),
    (7.55404408355002999e-01, 1.24628971255534030e-01),
    (8.65631202387831755e-01, 9.51585116824925914e-02),
    (9.44575023073232600e-01, 6.22535239386477063e-02),
    (9.89400934991649939e-01, 2.71524594117540374e-02),
];

/// Single 16-point panel over [a, b].
pub(crate) fn gauss16<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in GL16.iter() {
        acc += w * f(mid + half * x);
    }
    half * acc
}

/// Composite rule over [0, len] with panels graded toward both endpoints
/// (integrands here can be singular at either end: the kernel at one, the
/// integrand's own power behavior at the other). Edge layout: half the
/// panels cluster at 0, the mirrored half at len.
pub(crate) fn graded_composite<F: FnMut(f64) -> f64>(
    f: &mut F,
    len: f64,
    panels: usize,
    grading: f64,
) -> f64 {
    let half = len * 0.5;
    let p2 = panels.max(2) / 2;
    let mut total = 0.0;
    let mut prev_edge = 0.0;
    for i in 1..=p2 {
        let edge = half * (i as f64 / p2 as f64).powf(grading);
        total += gauss16(f, prev_edge, edge);
        prev_edge = edge;
    }
    for i in (0..p2).rev() {
        let edge = len - half * (i as f64 / p2 as f64).powf(grading);
        total += gauss16(f, prev_edge, edge);
        prev_edge = edge;
    }
    total
}

/// Doubles the graded panel count until two estimates agree within `tol`.
///
/// Returns `None` when the node budget is exhausted before convergence.
pub(crate) fn graded_adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    len: f64,
    grading: f64,
    tol: f64,
    max_panels: usize,
) -> Option<f64> {
    if len <= 0.0 {
        return Some(0.0);
    }
    let mut panels = 8;
    let mut prev = graded_composite(f, len, panels, grading);
    while panels < max_panels {
        panels *= 2;
        let cur = graded_composite(f, len, panels, grading);
        if (cur - prev).abs() <= tol.max(f64::EPSILON * cur.abs()) {
            return Some(cur);
        }
        prev = cur;
    }
    None
}

/// Adaptive refinement on a fixed panel list (used by the spectral
/// Mittag-Leffler integral where the panel layout encodes spike locations).
pub(crate) fn refine_panels<F: FnMut(f64) -> f64>(f: &mut F, edges: &[f64], tol: f64) -> f64 {
    let mut total = 0.0;
    for win in edges.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b - a <= 0.0 {
            continue;
        }
        let mut prev = gauss16(f, a, b);
        let mut sub = 2usize;
        loop {
            let mut cur = 0.0;
            let h = (b - a) / sub as f64;
            for j in 0..sub {
                cur += gauss16(f, a + j as f64 * h, a + (j + 1) as f64 * h);
            }
            if (cur - prev).abs() <= tol || sub >= 128 {
                prev = cur;
                break;
            }
            prev = cur;
            sub *= 2;
        }
        total += prev;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let mut f = |x: f64| 3.0 * x * x;
        assert!((gauss16(&mut f, 0.0, 2.0) - 8.0).abs() < 1e-13);
    }

    #[test]
    fn graded_handles_weak_singularity() {
        // int_0^1 x^{-1/2} dx = 2, integrated in the substituted variable is
        // trivial; here we check the raw graded rule on a mildly singular
        // derivative profile x^{3/2}.
        let mut f = |x: f64| 2.5 * x.powf(1.5);
        let v = graded_adaptive(&mut f, 1.0, 3.0, 1e-12, 1 << 14).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }
}
