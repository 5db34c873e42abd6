//! Resolved run specifications and their execution. Every command produces
//! one deterministic CSV document.

use crate::csvout::{Cell, CsvDoc};
use crate::problems::NamedProblem;
use frac_ab::analysis::{caputo_remainder_bound_in, observed_order, BoundVariant};
use frac_ab::fisher::{
    exact_solution, solve_fisher, FisherConfig, ForcingMode, SeedMode,
};
use frac_ab::operators::{DerivativeKind, FractionalOrder};
use frac_ab::reference::{
    abc_reference, caputo_reference, cf_reference, ReferenceConfig,
};
use frac_ab::schemes::{caputo_weights_in, integrate, BootstrapMode, Problem, WeightFormula};
use frac_ab::special::{normalization, NormalizationVariant};
use frac_ab::{Error, Result};

pub fn parse_kind(s: &str) -> Result<DerivativeKind> {
    match s {
        "caputo" => Ok(DerivativeKind::Caputo),
        "cf" => Ok(DerivativeKind::CaputoFabrizio),
        "abc" => Ok(DerivativeKind::AtanganaBaleanuCaputo),
        other => Err(Error::Domain(format!(
            "unknown kind {other:?} (expected caputo|cf|abc)"
        ))),
    }
}

pub fn parse_forcing(s: &str) -> Result<ForcingMode> {
    match s {
        "literal" => Ok(ForcingMode::PaperLiteral),
        "consistent" => Ok(ForcingMode::ConsistentManufactured),
        other => Err(Error::Domain(format!(
            "unknown forcing {other:?} (expected literal|consistent)"
        ))),
    }
}

pub fn parse_norm(s: &str) -> Result<NormalizationVariant> {
    match s {
        "unit" => Ok(NormalizationVariant::Unit),
        "gammablend" => Ok(NormalizationVariant::GammaBlend),
        other => Err(Error::Domain(format!(
            "unknown norm {other:?} (expected unit|gammablend)"
        ))),
    }
}

pub fn parse_seed(s: &str) -> Result<SeedMode> {
    match s {
        "euler" => Ok(SeedMode::FractionalEuler),
        "exact" => Ok(SeedMode::Exact),
        other => Err(Error::Domain(format!(
            "unknown seed {other:?} (expected euler|exact)"
        ))),
    }
}

/// Default normalization variant per kernel.
pub fn default_norm(kind: DerivativeKind) -> NormalizationVariant {
    match kind {
        DerivativeKind::AtanganaBaleanuCaputo => NormalizationVariant::GammaBlend,
        _ => NormalizationVariant::Unit,
    }
}

// ---------------------------------------------------------------------------
// solve-ode
// ---------------------------------------------------------------------------

pub struct OdeSpec {
    pub kind: DerivativeKind,
    pub alpha: FractionalOrder,
    pub problem: NamedProblem,
    pub h: f64,
    pub t_final: f64,
    pub norm_variant: NormalizationVariant,
    pub seed: SeedMode,
    pub formula: WeightFormula,
}

pub fn run_solve_ode(spec: &OdeSpec) -> Result<CsvDoc> {
    let norm = normalization(spec.alpha.value(), spec.norm_variant)?;
    let rhs = spec.problem.rhs(spec.alpha);
    let problem = Problem::new(vec![spec.problem.y0()], move |t, y, out: &mut [f64]| {
        rhs(t, y, out)
    });
    let exact = spec.problem.exact(spec.kind, spec.alpha, norm);
    let boot = match spec.seed {
        SeedMode::FractionalEuler => BootstrapMode::FractionalEuler,
        SeedMode::Exact => match &exact {
            Some(e) => BootstrapMode::ExactSeed(vec![e(spec.h)]),
            None => {
                return Err(Error::Domain(
                    "exact seeding requires a problem/kind pair with a closed form".into(),
                ))
            }
        },
    };
    let mut traj = Vec::new();
    frac_ab::schemes::integrate_with(
        &problem,
        spec.alpha,
        spec.kind,
        spec.h,
        spec.t_final,
        norm,
        &boot,
        spec.formula,
        |t, y| traj.push((t, y[0])),
    )?;
    let mut doc = if exact.is_some() {
        CsvDoc::new(vec!["t", "y", "exact", "abs_error"])
    } else {
        CsvDoc::new(vec!["t", "y"])
    };
    for (t, y) in traj {
        match &exact {
            Some(e) => {
                let ex = e(t);
                doc.push(vec![
                    Cell::Num(t),
                    Cell::Num(y),
                    Cell::Num(ex),
                    Cell::Num((y - ex).abs()),
                ]);
            }
            None => doc.push(vec![Cell::Num(t), Cell::Num(y)]),
        }
    }
    Ok(doc)
}

// ---------------------------------------------------------------------------
// solve-fisher
// ---------------------------------------------------------------------------

pub fn run_solve_fisher(cfg: &FisherConfig) -> Result<CsvDoc> {
    eprintln!(
        "# classical explicit dt ceiling dx^2/(2 delta) = {:.6e} (configured dt = {:.6e})",
        cfg.classical_dt_ceiling(),
        cfg.dt
    );
    let (traj, report) = solve_fisher(cfg)?;
    let dx = cfg.dx();
    let mut doc = CsvDoc::new(vec!["t", "x", "u_computed", "u_exact", "abs_error"]);
    for (t, field) in traj.iter() {
        for (i, u) in field.iter().enumerate() {
            let x = i as f64 * dx;
            let ex = exact_solution(x, *t, cfg.tau);
            doc.push(vec![
                Cell::Num(*t),
                Cell::Num(x),
                Cell::Num(*u),
                Cell::Num(ex),
                Cell::Num((u - ex).abs()),
            ]);
        }
    }
    eprintln!("# max_error = {:.6e}", report.max_error);
    Ok(doc)
}

// ---------------------------------------------------------------------------
// table1 / table2
// ---------------------------------------------------------------------------

pub const TABLE1_LADDER: [(f64, f64); 4] = [
    (0.25, 0.5),
    (0.0625, 0.25),
    (0.015625, 0.125),
    (0.00390625, 0.0625),
];
pub const TABLE1_PAPER: [(f64, f64, f64); 4] = [
    (6.6656e-06, 4.6187e-06, 1.4782e-06),
    (1.0653e-06, 7.1804e-07, 2.2827e-07),
    (3.3161e-07, 2.1293e-07, 6.6861e-08),
    (1.3995e-07, 8.3324e-08, 2.5625e-08),
];
pub const TABLE2_ALPHAS: [f64; 4] = [0.21, 0.43, 0.65, 0.89];
pub const TABLE2_PAPER: [(f64, f64, f64); 4] = [
    (6.7827e-06, 4.3656e-07, 9.8489e-08),
    (1.0663e-05, 1.0118e-06, 2.2731e-07),
    (7.8794e-06, 1.0197e-06, 2.2784e-07),
    (2.9779e-06, 4.1988e-07, 8.9765e-08),
];

const ALL_KINDS: [DerivativeKind; 3] = [
    DerivativeKind::Caputo,
    DerivativeKind::CaputoFabrizio,
    DerivativeKind::AtanganaBaleanuCaputo,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKinds {
    All,
    One(DerivativeKind),
}

pub struct TableSpec {
    pub kinds: TableKinds,
    pub n_override: Option<usize>,
    pub forcing: ForcingMode,
    pub seed: SeedMode,
    pub formula: WeightFormula,
    pub norm_override: Option<NormalizationVariant>,
}

fn paper_column(kind: DerivativeKind, row: (f64, f64, f64)) -> f64 {
    match kind {
        DerivativeKind::Caputo => row.0,
        DerivativeKind::CaputoFabrizio => row.1,
        DerivativeKind::AtanganaBaleanuCaputo => row.2,
    }
}

/// Final-time max nodal error of one Fisher cell; `inf` when the run blows up.
pub fn fisher_cell_error(cfg: &FisherConfig) -> Result<f64> {
    match solve_fisher(cfg) {
        Ok((traj, _)) => {
            let (t, field) = traj.last().expect("nonempty trajectory");
            let dx = cfg.dx();
            Ok(field
                .iter()
                .enumerate()
                .map(|(i, u)| (u - exact_solution(i as f64 * dx, *t, cfg.tau)).abs())
                .fold(0.0f64, f64::max))
        }
        Err(Error::Instability { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn table_cell_config(
    spec: &TableSpec,
    kind: DerivativeKind,
    alpha: f64,
    delta: f64,
    dt: f64,
    dx: f64,
    t_final: f64,
) -> Result<FisherConfig> {
    let n = spec.n_override.unwrap_or_else(|| (1.0 / dx).round() as usize);
    Ok(FisherConfig {
        delta,
        tau: 1.0,
        alpha: FractionalOrder::new(alpha)?,
        length: 1.0,
        n,
        dt,
        t_final,
        kind,
        forcing_mode: spec.forcing,
        norm_variant: spec.norm_override.unwrap_or_else(|| default_norm(kind)),
        seed_mode: spec.seed,
        weight_formula: spec.formula,
    })
}

pub fn run_table1(spec: &TableSpec) -> Result<CsvDoc> {
    let kinds: Vec<DerivativeKind> = match spec.kinds {
        TableKinds::All => ALL_KINDS.to_vec(),
        TableKinds::One(k) => vec![k],
    };
    let mut header = vec!["dt".to_string(), "dx".to_string(), "n".to_string()];
    for k in &kinds {
        header.push(kind_name(*k).to_string());
    }
    for k in &kinds {
        header.push(format!("paper_{}", kind_name(*k)));
    }
    let mut doc = CsvDoc::new(header);
    for (row_idx, &(dt, dx)) in TABLE1_LADDER.iter().enumerate() {
        let mut row = Vec::new();
        row.push(Cell::Num(dt));
        let n = spec.n_override.unwrap_or_else(|| (1.0 / dx).round() as usize);
        row.push(Cell::Num(1.0 / n as f64));
        row.push(Cell::Int(n as i64));
        for &k in &kinds {
            let cfg = table_cell_config(spec, k, 0.35, 10.0, dt, dx, 0.5)?;
            row.push(Cell::Num(fisher_cell_error(&cfg)?));
        }
        for &k in &kinds {
            row.push(Cell::Num(paper_column(k, TABLE1_PAPER[row_idx])));
        }
        doc.push(row);
    }
    Ok(doc)
}

pub fn run_table2(spec: &TableSpec) -> Result<CsvDoc> {
    let kinds: Vec<DerivativeKind> = match spec.kinds {
        TableKinds::All => ALL_KINDS.to_vec(),
        TableKinds::One(k) => vec![k],
    };
    let mut header = vec!["alpha".to_string()];
    for k in &kinds {
        header.push(kind_name(*k).to_string());
    }
    for k in &kinds {
        header.push(format!("paper_{}", kind_name(*k)));
    }
    let mut doc = CsvDoc::new(header);
    for (row_idx, &alpha) in TABLE2_ALPHAS.iter().enumerate() {
        let mut row = vec![Cell::Num(alpha)];
        for &k in &kinds {
            let cfg = table_cell_config(spec, k, alpha, 1.0, 0.05, 0.25, 1.0)?;
            row.push(Cell::Num(fisher_cell_error(&cfg)?));
        }
        for &k in &kinds {
            row.push(Cell::Num(paper_column(k, TABLE2_PAPER[row_idx])));
        }
        doc.push(row);
    }
    Ok(doc)
}

pub fn kind_name(kind: DerivativeKind) -> &'static str {
    match kind {
        DerivativeKind::Caputo => "caputo",
        DerivativeKind::CaputoFabrizio => "cf",
        DerivativeKind::AtanganaBaleanuCaputo => "abc",
    }
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

pub struct ConvergenceSpec {
    pub kind: DerivativeKind,
    pub alpha: FractionalOrder,
    pub problem: NamedProblem,
    pub h0: f64,
    pub levels: usize,
    pub t_final: f64,
    pub norm_variant: NormalizationVariant,
    pub seed: Option<SeedMode>,
    pub formula: WeightFormula,
}

pub fn run_convergence(spec: &ConvergenceSpec) -> Result<CsvDoc> {
    let norm = normalization(spec.alpha.value(), spec.norm_variant)?;
    let exact = spec.problem.exact(spec.kind, spec.alpha, norm);
    // Default seeding: exact when a closed form exists, fractional Euler
    // otherwise.
    let seed = spec.seed.unwrap_or(if exact.is_some() {
        SeedMode::Exact
    } else {
        SeedMode::FractionalEuler
    });
    let mut data: Vec<(f64, f64)> = Vec::new();
    for level in 0..spec.levels {
        let h = spec.h0 / (1 << level) as f64;
        let rhs = spec.problem.rhs(spec.alpha);
        let problem = Problem::new(vec![spec.problem.y0()], move |t, y, out: &mut [f64]| {
            rhs(t, y, out)
        });
        let boot = match seed {
            SeedMode::FractionalEuler => BootstrapMode::FractionalEuler,
            SeedMode::Exact => match &exact {
                Some(e) => BootstrapMode::ExactSeed(vec![e(h)]),
                None => {
                    return Err(Error::Domain(
                        "exact seeding requires a closed-form solution".into(),
                    ))
                }
            },
        };
        let traj = integrate(
            &problem,
            spec.alpha,
            spec.kind,
            h,
            spec.t_final,
            norm,
            &boot,
        )?;
        let err = match &exact {
            Some(e) => traj
                .iter()
                .map(|(t, y)| (y[0] - e(*t)).abs())
                .fold(0.0f64, f64::max),
            None => {
                let cfg = ReferenceConfig::default();
                let rf = match spec.kind {
                    DerivativeKind::Caputo => {
                        caputo_reference(&problem, spec.alpha, h, spec.t_final, &cfg)?
                    }
                    DerivativeKind::CaputoFabrizio => {
                        cf_reference(&problem, spec.alpha, h, spec.t_final, norm, &cfg)?
                    }
                    DerivativeKind::AtanganaBaleanuCaputo => {
                        abc_reference(&problem, spec.alpha, h, spec.t_final, norm, &cfg)?
                    }
                };
                traj.iter()
                    .zip(rf.iter())
                    .map(|((_, a), (_, b))| (a[0] - b[0]).abs())
                    .fold(0.0f64, f64::max)
            }
        };
        data.push((h, err));
    }
    let orders = if data.iter().all(|&(_, e)| e > 0.0) {
        observed_order(&data)?
    } else {
        Vec::new()
    };
    let mut doc = CsvDoc::new(vec!["h", "error", "eoc"]);
    for (i, &(h, e)) in data.iter().enumerate() {
        let eoc = if i == 0 || orders.is_empty() {
            Cell::Text(String::new())
        } else {
            Cell::Num(orders[i - 1])
        };
        doc.push(vec![Cell::Num(h), Cell::Num(e), eoc]);
    }
    Ok(doc)
}

// ---------------------------------------------------------------------------
// bound-check
// ---------------------------------------------------------------------------

pub struct BoundCheckSpec {
    pub alpha: FractionalOrder,
    pub h: f64,
    pub n_max: usize,
    pub big_m: f64,
    pub formula: WeightFormula,
}

/// Per-step defects of the Caputo scheme on rhs = sin(t) against the
/// full-memory reference, next to both remainder-bound variants.
pub fn run_bound_check(spec: &BoundCheckSpec) -> Result<CsvDoc> {
    let defects = caputo_sin_defects(spec.alpha, spec.h, spec.n_max, spec.formula)?;
    let mut doc = CsvDoc::new(vec![
        "n",
        "t",
        "defect",
        "bound_proof",
        "bound_printed",
        "violates_proof",
        "violates_printed",
    ]);
    for (n, t, defect) in defects {
        let bp = caputo_remainder_bound_in(BoundVariant::ProofExponent, spec.alpha, spec.h, n, spec.big_m)?;
        let bl = caputo_remainder_bound_in(BoundVariant::PrintedExponent, spec.alpha, spec.h, n, spec.big_m)?;
        doc.push(vec![
            Cell::Int(n as i64),
            Cell::Num(t),
            Cell::Num(defect),
            Cell::Num(bp),
            Cell::Num(bl),
            Cell::Int(i64::from(defect > bp)),
            Cell::Int(i64::from(defect > bl)),
        ]);
    }
    Ok(doc)
}

/// (n, t_n, defect) triples: defect = |y_ref(t_{n+1}) − y_ref(t_n)
/// − c_curr·sin(t_n) − c_prev·sin(t_{n−1})| on the sin right-hand side.
pub fn caputo_sin_defects(
    alpha: FractionalOrder,
    h: f64,
    n_max: usize,
    formula: WeightFormula,
) -> Result<Vec<(usize, f64, f64)>> {
    let problem = Problem::new(vec![0.0], |t: f64, _: &[f64], out: &mut [f64]| {
        out[0] = t.sin()
    });
    let cfg = ReferenceConfig {
        substeps: 128,
        tol: 1e-13,
        richardson: true,
    };
    let t_final = (n_max + 1) as f64 * h;
    let yref = caputo_reference(&problem, alpha, h, t_final, &cfg)?;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let w = caputo_weights_in(formula, alpha, h, n)?;
        let t_n = n as f64 * h;
        let predicted = yref[n].1[0] + w.c_curr * t_n.sin() + w.c_prev * ((n - 1) as f64 * h).sin();
        out.push((n, t_n, (yref[n + 1].1[0] - predicted).abs()));
    }
    Ok(out)
}
