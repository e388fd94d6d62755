//! Acceptance checks over the built-in models.

use crate::asymptotics::{
    approx_identity_defect, asymptotic_distances, classify, dilated_nu, nu_infty, nu_marched, nu_measure, tau_measure,
    NuInftyOptions, NuInftyRoute, RegimeOptions, Verdict,
};
use crate::eigen::{c_continued, c_function, phi_at_points};
use crate::error::Result;
use crate::kernel::{kernel_density, kernel_density_with, translate_function, HyperbolicGrid, KernelMethod, KernelOptions};
use crate::measure::{fourier_stieltjes, tv_distance, GridMeasure};
use crate::model::SturmLiouvilleModel;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Criterion numbers in report order.
pub const CRITERIA: [u32; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

/// Check names accepted as tolerance override keys.
pub const CHECK_NAMES: [&str; 24] = [
    "naimark-kernel-mass",
    "naimark-kernel-k2",
    "marched-l1",
    "marched-order",
    "naimark-phi1",
    "phi-i-rho-constant",
    "tau-hat-closed-form",
    "tau-hat-numeric",
    "kernel-center-rate",
    "bk-invariance-rate",
    "bk-invariance-marched",
    "nu-infty-routes",
    "nu-infty-ft1",
    "nu-infty-ft-min",
    "c-function-modulus",
    "nu-infty-vs-c",
    "sweep-mass",
    "sweep-positivity",
    "sweep-support",
    "translation-continuity",
    "approx-identity-decreasing",
    "approx-identity-defect",
    "dilated-second-moment",
    "classifier-verdict",
];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Base lattice step for unit-scale supports.
    pub h: f64,
    /// Tolerance overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub sweep_draws: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            h: 1e-3,
            tolerances: BTreeMap::new(),
            sweep_draws: 200,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    /// `|measured - expected| ≤ tol`
    Near,
    /// `|measured - expected| ≤ tol·|expected|`
    Relative,
    /// `measured ≤ tol`
    AtMost,
    /// `measured ≥ tol`
    AtLeast,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub criterion: String,
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub provenance: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    naimark_nu_infty: OnceLock<std::result::Result<GridMeasure, String>>,
}

impl Ctx<'_> {
    fn tol(&self, name: &str, default: f64) -> f64 {
        self.cfg.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Lattice step for supports of size tens.
    fn wide_h(&self) -> f64 {
        5.0 * self.cfg.h
    }

    fn nu_infty(&self) -> std::result::Result<GridMeasure, String> {
        self.naimark_nu_infty
            .get_or_init(|| {
                let o = NuInftyOptions {
                    h: self.cfg.h,
                    ..NuInftyOptions::default()
                };
                nu_infty(&SturmLiouvilleModel::naimark(), NuInftyRoute::Neumann, o)
                    .map(|r| r.measure)
                    .map_err(|e| e.to_string())
            })
            .clone()
    }
}

struct Check<'a> {
    id: &'a str,
    name: &'a str,
    rule: Rule,
    expected: f64,
    tol: f64,
    provenance: &'a str,
}

fn record(c: Check, measured: Result<f64>) -> CheckResult {
    let (measured, note) = match measured {
        Ok(v) => (v, None),
        Err(e) => (f64::NAN, Some(e.to_string())),
    };
    let pass = match c.rule {
        Rule::Near => (measured - c.expected).abs() <= c.tol,
        Rule::Relative => (measured - c.expected).abs() <= c.tol * c.expected.abs(),
        Rule::AtMost => measured <= c.tol,
        Rule::AtLeast => measured >= c.tol,
    };
    CheckResult {
        criterion: c.id.to_string(),
        name: c.name.to_string(),
        measured,
        expected: c.expected,
        tolerance: c.tol,
        provenance: c.provenance.to_string(),
        pass,
        note,
    }
}

fn with_note(mut r: CheckResult, note: String) -> CheckResult {
    if r.note.is_none() {
        r.note = Some(note);
    }
    r
}

/// Runs every criterion; results are ordered by criterion.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckResult> {
    run_selected(cfg, &CRITERIA)
}

pub fn run_selected(cfg: &VerifyConfig, which: &[u32]) -> Vec<CheckResult> {
    let ctx = Ctx {
        cfg,
        naimark_nu_infty: OnceLock::new(),
    };
    which.par_iter().map(|&c| run_criterion(&ctx, c)).collect::<Vec<_>>().into_iter().flatten().collect()
}

/// One pass/fail per criterion number, from the individual checks.
pub fn summarize(results: &[CheckResult]) -> Vec<(u32, bool)> {
    let mut out: BTreeMap<u32, bool> = BTreeMap::new();
    for r in results {
        let n: u32 = r.criterion.trim_end_matches(|c: char| c.is_ascii_alphabetic()).parse().unwrap_or(0);
        let e = out.entry(n).or_insert(true);
        *e &= r.pass;
    }
    out.into_iter().collect()
}

fn run_criterion(ctx: &Ctx, c: u32) -> Vec<CheckResult> {
    match c {
        1 => c1(ctx),
        2 => c2(ctx),
        3 => c3(ctx),
        4 => c4(ctx),
        5 => c5(ctx),
        6 => c6(ctx),
        7 => c7(ctx),
        8 => c8(ctx),
        9 => c9(ctx),
        10 => c10(ctx),
        11 => c11(ctx),
        12 => c12(ctx),
        _ => Vec::new(),
    }
}

fn c1(ctx: &Ctx) -> Vec<CheckResult> {
    let n = SturmLiouvilleModel::naimark();
    let k = kernel_density(&n, 1.0, 2.0, ctx.cfg.h);
    let mass = k.as_ref().map(|k| k.mass()).map_err(Clone::clone);
    let k2 = k.map(|k| k.density_at(2.0));
    vec![
        record(
            Check {
                id: "1a",
                name: "naimark-kernel-mass",
                rule: Rule::Near,
                expected: 1.0,
                tol: ctx.tol("naimark-kernel-mass", 1e-10),
                provenance: "closed-form kernel",
            },
            mass,
        ),
        record(
            Check {
                id: "1b",
                name: "naimark-kernel-k2",
                rule: Rule::Near,
                expected: 1.0 / (2.0 * 1f64.sinh()),
                tol: ctx.tol("naimark-kernel-k2", 1e-6),
                provenance: "closed-form kernel",
            },
            k2,
        ),
    ]
}

fn marched_l1(h: f64) -> Result<f64> {
    let n = SturmLiouvilleModel::naimark();
    let opts = KernelOptions {
        h,
        method: Some(KernelMethod::Marched),
        refinement_check: false,
    };
    let m = kernel_density_with(&n, 1.0, 2.0, opts)?;
    let c = kernel_density(&n, 1.0, 2.0, h)?;
    Ok(tv_distance(&m.measure, &c.measure))
}

fn c2(ctx: &Ctx) -> Vec<CheckResult> {
    let h = ctx.cfg.h;
    let (a, b) = rayon::join(|| marched_l1(h), || marched_l1(0.5 * h));
    let order = match (&a, &b) {
        (Ok(a), Ok(b)) => Ok((a / b).log2()),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    vec![
        record(
            Check {
                id: "2a",
                name: "marched-l1",
                rule: Rule::AtMost,
                expected: 0.0,
                tol: ctx.tol("marched-l1", 5e-3),
                provenance: "closed-form kernel",
            },
            a,
        ),
        record(
            Check {
                id: "2b",
                name: "marched-order",
                rule: Rule::AtLeast,
                expected: 1.0,
                tol: ctx.tol("marched-order", 1.0),
                provenance: "step halving",
            },
            order,
        ),
    ]
}

fn sup_deviation_from_one(model: &SturmLiouvilleModel) -> Result<f64> {
    let xs: Vec<f64> = (1..=1000).map(|k| k as f64 * 1e-2).collect();
    let lambda = Complex64::new(0.0, model.rho());
    let v = phi_at_points(model, lambda, &xs, Default::default())?;
    Ok(v.iter().map(|z| (z.0 - 1.0).norm()).fold(0.0, f64::max))
}

fn c3(ctx: &Ctx) -> Vec<CheckResult> {
    let n = SturmLiouvilleModel::naimark();
    let phi = phi_at_points(&n, Complex64::new(1.0, 0.0), &[1.0], Default::default()).map(|v| v[0].0.re);
    let mut out = vec![record(
        Check {
            id: "3a",
            name: "naimark-phi1",
            rule: Rule::Near,
            expected: 1f64.sin() / 1f64.sinh(),
            tol: ctx.tol("naimark-phi1", 1e-6),
            provenance: "closed-form eigenfunction",
        },
        phi,
    )];
    let models = [
        ("3b", SturmLiouvilleModel::naimark()),
        ("3c", SturmLiouvilleModel::bessel_kingman(2.0).unwrap()),
        ("3d", SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap()),
    ];
    for (id, m) in models {
        let r = record(
            Check {
                id,
                name: "phi-i-rho-constant",
                rule: Rule::AtMost,
                expected: 0.0,
                tol: ctx.tol("phi-i-rho-constant", 1e-8),
                provenance: "eigenvalue zero",
            },
            sup_deviation_from_one(&m),
        );
        out.push(with_note(r, m.name().to_string()));
    }
    out
}

fn c4(ctx: &Ctx) -> Vec<CheckResult> {
    let h = ctx.cfg.h;
    let n = SturmLiouvilleModel::naimark();
    let closed = tau_measure(&n, 1.0, h).map(|t| {
        let z = fourier_stieltjes(&t, Complex64::new(1.0, 0.0));
        (z - Complex64::new(1f64.sin() / 1f64.sinh(), 0.0)).norm()
    });
    let j = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
    let numeric = (|| -> Result<f64> {
        let nu = nu_marched(&j, 1.0, h)?;
        let tau = crate::measure::exp_weight(&nu, j.rho());
        let z = fourier_stieltjes(&tau, Complex64::new(1.0, 0.0));
        let phi = phi_at_points(&j, Complex64::new(1.0, 0.0), &[1.0], Default::default())?[0].0;
        Ok((z - phi).norm())
    })();
    vec![
        record(
            Check {
                id: "4a",
                name: "tau-hat-closed-form",
                rule: Rule::AtMost,
                expected: 0.0,
                tol: ctx.tol("tau-hat-closed-form", 1e-6),
                provenance: "closed-form routes",
            },
            closed,
        ),
        record(
            Check {
                id: "4b",
                name: "tau-hat-numeric",
                rule: Rule::AtMost,
                expected: 0.0,
                tol: ctx.tol("tau-hat-numeric", 1e-2),
                provenance: "marched nu vs ODE",
            },
            numeric,
        ),
    ]
}

fn c5(ctx: &Ctx) -> Vec<CheckResult> {
    let n = SturmLiouvilleModel::naimark();
    let opts = RegimeOptions {
        kernel_h: ctx.cfg.h,
        ..RegimeOptions::default()
    };
    let ys = [3.0, 5.0];
    let rep = asymptotic_distances(&n, 1.0, &ys, opts);
    let shape = (1f64.cosh() - 1.0) / 1f64.sinh();
    ys.iter()
        .enumerate()
        .map(|(k, &y)| {
            let v = rep.as_ref().map_err(Clone::clone).and_then(|r| {
                r.d_center[k].ok_or_else(|| crate::Error::Regime("no kernel distance".into()))
            });
            let r = record(
                Check {
                    id: if k == 0 { "5a" } else { "5b" },
                    name: "kernel-center-rate",
                    rule: Rule::Relative,
                    expected: (-y).exp() * shape,
                    tol: ctx.tol("kernel-center-rate", 0.1),
                    provenance: "stated rate formula",
                },
                v,
            );
            with_note(r, format!("y = {y}; exact TV (cosh 1 - 1)/sinh 1 · e^-y/sinh y = {:.6e}", shape * (-y).exp() / y.sinh()))
        })
        .collect()
}

fn c6(ctx: &Ctx) -> Vec<CheckResult> {
    let h = ctx.wide_h();
    let bk = SturmLiouvilleModel::bessel_kingman(2.0).unwrap();
    let mut out = Vec::new();
    for (k, y) in [10.0, 50.0].into_iter().enumerate() {
        let closed = nu_measure(&bk, y, h).map(|m| tv_distance(&m.shift(1.0), &m));
        let marched = nu_marched(&bk, y, h).map(|m| tv_distance(&m.shift(1.0), &m));
        let diff = match (&closed, &marched) {
            (Ok(a), Ok(b)) => Ok((a - b).abs()),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        };
        out.push(with_note(
            record(
                Check {
                    id: ["6a", "6b"][k],
                    name: "bk-invariance-rate",
                    rule: Rule::Relative,
                    expected: 1.0 / y,
                    tol: ctx.tol("bk-invariance-rate", 0.05),
                    provenance: "closed-form nu",
                },
                closed,
            ),
            format!("y = {y}"),
        ));
        out.push(with_note(
            record(
                Check {
                    id: ["6c", "6d"][k],
                    name: "bk-invariance-marched",
                    rule: Rule::AtMost,
                    expected: 0.0,
                    tol: ctx.tol("bk-invariance-marched", 1e-2),
                    provenance: "marched vs closed-form nu",
                },
                diff,
            ),
            format!("y = {y}"),
        ));
    }
    out
}

fn c7(ctx: &Ctx) -> Vec<CheckResult> {
    let n = SturmLiouvilleModel::naimark();
    let o = NuInftyOptions {
        h: ctx.cfg.h,
        ..NuInftyOptions::default()
    };
    let limit = nu_infty(&n, NuInftyRoute::Limit, o);
    let neu = ctx.nu_infty();
    let err = |e: String| crate::Error::Consistency(e);
    let routes = match (&limit, &neu) {
        (Ok(a), Ok(b)) => Ok(tv_distance(&a.measure, b)),
        (Err(e), _) => Err(e.clone()),
        (_, Err(e)) => Err(err(e.clone())),
    };
    let at1 = neu.clone().map_err(err).map(|m| {
        (fourier_stieltjes(&m, Complex64::new(1.0, 0.0)) - Complex64::new(0.5, 0.5)).norm()
    });
    let ft_min = neu.clone().map_err(err).map(|m| {
        (0..=80)
            .map(|k| fourier_stieltjes(&m, Complex64::new(-4.0 + 0.1 * k as f64, 0.0)).norm())
            .fold(f64::INFINITY, f64::min)
    });
    vec![
        record(
            Check {
                id: "7a",
                name: "nu-infty-routes",
                rule: Rule::AtMost,
                expected: 0.0,
                tol: ctx.tol("nu-infty-routes", 2e-3),
                provenance: "limit vs Neumann route",
            },
            routes,
        ),
        record(
            Check {
                id: "7b",
                name: "nu-infty-ft1",
                rule: Rule::AtMost,
                expected: 0.0,
                tol: ctx.tol("nu-infty-ft1", 1e-3),
                provenance: "closed form 1/(1 - i lambda)",
            },
            at1,
        ),
        record(
            Check {
                id: "7c",
                name: "nu-infty-ft-min",
                rule: Rule::AtLeast,
                expected: 1.0 / 17f64.sqrt(),
                tol: ctx.tol("nu-infty-ft-min", 0.2),
                provenance: "closed form 1/(1 - i lambda)",
            },
            ft_min,
        ),
    ]
}

fn c8(ctx: &Ctx) -> Vec<CheckResult> {
    let n = SturmLiouvilleModel::naimark();
    let mut out = vec![record(
        Check {
            id: "8a",
            name: "c-function-modulus",
            rule: Rule::Near,
            expected: 1.0,
            tol: ctx.tol("c-function-modulus", 1e-3),
            provenance: "closed-form c-function",
        },
        c_function(&n, 1.0, None).map(|c| c.c_plus.norm()),
    )];
    let neu = ctx.nu_infty();
    for (k, lam) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let v = neu.clone().map_err(crate::Error::Consistency).and_then(|m| {
            let (c, _) = c_continued(&n, lam)?;
            Ok((fourier_stieltjes(&m, Complex64::new(lam, 0.0)) - c).norm())
        });
        out.push(with_note(
            record(
                Check {
                    id: ["8b", "8c", "8d"][k],
                    name: "nu-infty-vs-c",
                    rule: Rule::AtMost,
                    expected: 0.0,
                    tol: ctx.tol("nu-infty-vs-c", 1e-3),
                    provenance: "Neumann nu vs ODE c-function",
                },
                v,
            ),
            format!("lambda = {lam}"),
        ));
    }
    out
}

struct SweepStats {
    mass_err: f64,
    min_density: f64,
    support_excess: f64,
}

fn c9(ctx: &Ctx) -> Vec<CheckResult> {
    let h = ctx.cfg.h;
    let models = [
        SturmLiouvilleModel::naimark(),
        SturmLiouvilleModel::bessel_kingman(1.0).unwrap(),
        SturmLiouvilleModel::bessel_kingman(2.0).unwrap(),
        SturmLiouvilleModel::bessel_kingman(3.0).unwrap(),
        SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap(),
        SturmLiouvilleModel::jacobi(0.5, 0.5).unwrap(),
        SturmLiouvilleModel::bounded_demo(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let draws: Vec<(usize, f64, f64)> = (0..ctx.cfg.sweep_draws)
        .map(|_| (rng.gen_range(0..models.len()), rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0)))
        .collect();
    let stats: Result<Vec<SweepStats>> = draws
        .par_iter()
        .map(|&(k, x, y)| {
            let opts = KernelOptions {
                h,
                method: if models[k].is_closed_form_kernel() { None } else { Some(KernelMethod::Marched) },
                refinement_check: false,
            };
            let kern = kernel_density_with(&models[k], x, y, opts)?;
            let m = &kern.measure;
            let (lo, hi) = m.support().unwrap_or(((x - y).abs(), x + y));
            let step = m.step();
            Ok(SweepStats {
                mass_err: (m.mass() - 1.0).abs(),
                min_density: m.min_density(),
                support_excess: ((x - y).abs() - lo).max(hi - (x + y)).max(0.0) / step,
            })
        })
        .collect();
    let pick = |f: fn(&[SweepStats]) -> f64| stats.as_ref().map(|s| f(s)).map_err(Clone::clone);
    let note = format!("{} draws, seed {}", ctx.cfg.sweep_draws, ctx.cfg.seed);
    vec![
        with_note(
            record(
                Check {
                    id: "9a",
                    name: "sweep-mass",
                    rule: Rule::AtMost,
                    expected: 0.0,
                    tol: ctx.tol("sweep-mass", 1e-4),
                    provenance: "probability kernel",
                },
                pick(|s| s.iter().map(|v| v.mass_err).fold(0.0, f64::max)),
            ),
            note.clone(),
        ),
        with_note(
            record(
                Check {
                    id: "9b",
                    name: "sweep-positivity",
                    rule: Rule::AtLeast,
                    expected: 0.0,
                    tol: -ctx.tol("sweep-positivity", 1e-8),
                    provenance: "probability kernel",
                },
                pick(|s| s.iter().map(|v| v.min_density).fold(f64::INFINITY, f64::min)),
            ),
            note.clone(),
        ),
        with_note(
            record(
                Check {
                    id: "9c",
                    name: "sweep-support",
                    rule: Rule::AtMost,
                    expected: 0.0,
                    tol: ctx.tol("sweep-support", 1.0),
                    provenance: "support [|x-y|, x+y], in grid cells",
                },
                pick(|s| s.iter().map(|v| v.support_excess).fold(0.0, f64::max)),
            ),
            note,
        ),
    ]
}

fn c10(ctx: &Ctx) -> Vec<CheckResult> {
    let h = ctx.cfg.h;
    let n = SturmLiouvilleModel::naimark();
    let f = |x: f64| if (1.0..=2.0).contains(&x) { 1.0 } else { 0.0 };
    let v = translate_function(&n, f, 1e-2, HyperbolicGrid::new(3.2, h)).map(|t| {
        let mut worst: f64 = 0.0;
        for k in 0..t.values.len() {
            let x = t.x(k);
            if !(0.1..=3.0).contains(&x) || (x - 1.0).abs() < 0.1 || (x - 2.0).abs() < 0.1 {
                continue;
            }
            worst = worst.max((t.values[k] - f(x)).abs());
        }
        worst
    });
    vec![record(
        Check {
            id: "10",
            name: "translation-continuity",
            rule: Rule::AtMost,
            expected: 0.0,
            tol: ctx.tol("translation-continuity", 1e-2),
            provenance: "T_y f -> f as y -> 0",
        },
        v,
    )]
}

fn c11(ctx: &Ctx) -> Vec<CheckResult> {
    let h = ctx.wide_h();
    let n = SturmLiouvilleModel::naimark();
    let ns = [25u32, 50, 100, 200];
    let defects: Result<Vec<f64>> = ns.par_iter().map(|&k| approx_identity_defect(&n, 1.0, k, h)).collect();
    let note = defects
        .as_ref()
        .map(|d| format!("defects {:?} for n = {:?}", d, ns))
        .unwrap_or_default();
    let monotone = defects
        .as_ref()
        .map(|d| if d.windows(2).all(|w| w[1] < w[0]) { 1.0 } else { 0.0 })
        .map_err(Clone::clone);
    vec![
        with_note(
            record(
                Check {
                    id: "11a",
                    name: "approx-identity-decreasing",
                    rule: Rule::Near,
                    expected: 1.0,
                    tol: 0.0,
                    provenance: "approximate identity",
                },
                monotone,
            ),
            note,
        ),
        record(
            Check {
                id: "11b",
                name: "approx-identity-defect",
                rule: Rule::AtMost,
                expected: 0.0,
                tol: ctx.tol("approx-identity-defect", 0.1),
                provenance: "approximate identity",
            },
            defects.map(|d| d[3]),
        ),
    ]
}

fn c12(ctx: &Ctx) -> Vec<CheckResult> {
    let bd = SturmLiouvilleModel::bounded_demo();
    let mut out = vec![with_note(
        record(
            Check {
                id: "12a",
                name: "dilated-second-moment",
                rule: Rule::Near,
                expected: 1.0,
                tol: ctx.tol("dilated-second-moment", 0.05),
                provenance: "dilated limit (delta_-1 + delta_1)/2",
            },
            dilated_nu(&bd, 50.0, |t| t * t, ctx.wide_h()),
        ),
        "x = 50".into(),
    )];
    let cases = [
        ("12b", SturmLiouvilleModel::naimark(), Verdict::NuInfinityRegime),
        ("12c", SturmLiouvilleModel::bessel_kingman(2.0).unwrap(), Verdict::InvarianceRegime),
        ("12d", SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap(), Verdict::NuInfinityRegime),
        ("12e", bd, Verdict::BoundedARegime),
    ];
    let verdicts: Vec<_> = cases.par_iter().map(|(_, m, _)| classify(m, RegimeOptions::default())).collect();
    for ((id, m, want), got) in cases.iter().zip(verdicts) {
        let note = match &got {
            Ok(r) => format!("{}: {} (want {})", m.name(), r.verdict.as_str(), want.as_str()),
            Err(_) => format!("{}: want {}", m.name(), want.as_str()),
        };
        let v = got.map(|r| if r.verdict == *want { 1.0 } else { 0.0 });
        out.push(with_note(
            record(
                Check {
                    id,
                    name: "classifier-verdict",
                    rule: Rule::Near,
                    expected: 1.0,
                    tol: 0.0,
                    provenance: "growth class of A",
                },
                v,
            ),
            note,
        ));
    }
    out
}

/// JSON array of the checks.
pub fn to_json(results: &[CheckResult]) -> String {
    serde_json::to_string_pretty(results).unwrap_or_else(|_| "[]".into())
}

/// CSV with the same fields as the JSON report.
pub fn to_csv(results: &[CheckResult]) -> String {
    let mut s = String::from("criterion,name,measured,expected,tolerance,provenance,pass\n");
    for r in results {
        s.push_str(&format!(
            "{},{},{:.10e},{:.10e},{:.3e},\"{}\",{}\n",
            r.criterion, r.name, r.measured, r.expected, r.tolerance, r.provenance, r.pass
        ));
    }
    s
}
