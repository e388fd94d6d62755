mod report;

use clap::{Parser, Subcommand};
use hyperconv_core::asymptotics::{
    asymptotic_distances, classify, closed_form_nu, default_y_values, nu_infty, nu_marched, NuInftyOptions,
    NuInftyRoute, RegimeOptions, RegimeReport,
};
use hyperconv_core::eigen::{c_function, phi_lambda};
use hyperconv_core::expr::Expr;
use hyperconv_core::kernel::{kernel_density_with, translate_function, HyperbolicGrid, KernelMethod, KernelOptions};
use hyperconv_core::measure::{tv_distance, GridMeasure};
use hyperconv_core::model::{validate_model, ValidationGrid};
use hyperconv_core::verify::{self, VerifyConfig, CHECK_NAMES};
use hyperconv_core::{Error, SturmLiouvilleModel};
use num_complex::Complex64;
use report::{num, opt, Format, Report};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

/// Kernels, translations, eigenfunctions and asymptotic measures of
/// Sturm-Liouville hypergroups.
///
/// Numeric defaults depend on the command and are listed with each flag.
/// Every effective value is echoed in the output header.
#[derive(Parser, Debug)]
#[command(name = "hyperconv", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Builtin alias (naimark, bessel-kingman:<a0>, jacobi:<a>,<b>,
    /// bounded-demo) or path to a model file.
    #[arg(long, global = true)]
    model: Option<String>,

    /// First point [kernel: 1, distances: 1].
    #[arg(long, global = true)]
    x: Option<f64>,

    /// Second point or translation distance [kernel: 2, translate: 1, nu: 2].
    #[arg(long, global = true)]
    y: Option<f64>,

    /// Spectral parameter; cfun takes a comma list [eigen: 1, cfun: 0.5,1,2,4].
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<f64>,

    /// Lattice step [kernel, nu, nu-infty, verify: 1e-3; translate, eigen, distances, classify: 1e-2].
    #[arg(long, global = true)]
    h: Option<f64>,

    /// Largest y of the distance sweep, in unit steps from 1 [distances: model default].
    #[arg(long, global = true)]
    ymax: Option<f64>,

    /// Output directory; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Tolerance override `name=value` (repeatable).
    #[arg(long, global = true)]
    tol: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Model checks.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Density of δ_x ⋆ δ_y.
    Kernel {
        /// closed-form, marched, transmutation or both-with-diff [closed form when available].
        #[arg(long)]
        method: Option<String>,
    },
    /// Generalized translate T_y f on a grid.
    Translate {
        /// Test function of x.
        #[arg(long, default_value = "exp(-x^2)")]
        f: String,
        /// Right end of the x grid [y + 10].
        #[arg(long)]
        xmax: Option<f64>,
    },
    /// Eigenfunction φ_λ on [0, xmax].
    Eigen {
        /// Imaginary part of λ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_im: f64,
        #[arg(long, default_value_t = 10.0)]
        xmax: f64,
    },
    /// c-function table.
    Cfun,
    /// Asymptotic measure ν_y.
    Nu {
        /// closed-form or marched [closed form when available].
        #[arg(long)]
        method: Option<String>,
    },
    /// Limit measure ν_∞.
    NuInfty {
        /// limit or neumann.
        #[arg(long, default_value = "neumann")]
        route: String,
    },
    /// Asymptotic distance curves at x.
    Distances,
    /// Regime verdict from the distance curves at x = 1.
    Classify,
    /// Acceptance suite.
    Verify {
        /// Comma list of criterion numbers [all].
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ModelAction {
    /// Invariants and growth class.
    Validate,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Regime(String),
    Verification(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Regime(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("output: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Input(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn parse_tols(raw: &[String]) -> Result<BTreeMap<String, f64>, Failure> {
    let mut out = BTreeMap::new();
    for t in raw {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("--tol expects name=value, got '{t}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("--tol {k}: '{v}' is not a number")))?;
        out.insert(k.trim().to_string(), positive("tol", v)?);
    }
    Ok(out)
}

fn reject_unknown_tols(tols: &BTreeMap<String, f64>, known: &[&str]) -> Result<(), Failure> {
    match tols.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(Failure::Input(format!(
            "unknown tolerance '{k}'; accepted: {}",
            if known.is_empty() { "none".to_string() } else { known.join(", ") }
        ))),
        None => Ok(()),
    }
}

struct Ctx {
    cli: Cli,
    tols: BTreeMap<String, f64>,
}

impl Ctx {
    /// Resolves and validates `--model`.
    fn model(&self) -> Result<SturmLiouvilleModel, Failure> {
        let spec = self
            .cli
            .model
            .as_deref()
            .ok_or_else(|| Failure::Input("--model is required".into()))?;
        let m = SturmLiouvilleModel::resolve(spec)?;
        let v = validate_model(&m, ValidationGrid::default());
        if !v.passed {
            return Err(Failure::Input(format!("{m} fails validation: {}", v.failures.join("; "))));
        }
        Ok(m)
    }

    fn h(&self, default: f64) -> Result<f64, Failure> {
        positive("h", self.cli.h.unwrap_or(default))
    }

    fn base(&self, command: &'static str, model: &SturmLiouvilleModel) -> Report {
        let mut r = Report::new(command);
        r.config.push(("model", Value::String(model.to_string())));
        r
    }

    fn emit(&self, r: &Report) -> Outcome {
        r.emit(self.cli.format, self.cli.out.as_deref())?;
        Ok(())
    }
}

fn measure_rows(r: &mut Report, m: &GridMeasure) {
    r.summary.push(("mass", num(m.mass())));
    if let Some((lo, hi)) = m.support() {
        r.summary.push(("support_lo", num(lo)));
        r.summary.push(("support_hi", num(hi)));
    }
    let atoms: Vec<String> = m.atoms().iter().map(|(p, w)| format!("{p:.16e}:{w:.16e}")).collect();
    r.summary.push(("atoms", Value::String(atoms.join(" "))));
    r.columns = vec!["t", "density"];
    r.rows = m.nodes().zip(m.density()).map(|((t, _), d)| vec![num(t), num(*d)]).collect();
}

fn cmd_model_validate(ctx: &Ctx) -> Outcome {
    let spec = ctx
        .cli
        .model
        .as_deref()
        .ok_or_else(|| Failure::Input("--model is required".into()))?;
    let m = SturmLiouvilleModel::resolve(spec)?;
    let grid = ValidationGrid::default();
    let v = validate_model(&m, grid);
    let mut r = ctx.base("model-validate", &m);
    r.config.push(("x_min", num(grid.x_min)));
    r.config.push(("x_max", num(grid.x_max)));
    r.config.push(("points", Value::from(grid.points)));
    r.summary.push(("passed", Value::Bool(v.passed)));
    r.summary.push(("alpha0", num(v.alpha0)));
    r.summary.push(("rho", num(v.rho)));
    r.summary.push(("growth", Value::String(v.growth.as_str().into())));
    r.summary.push(("normalization_limit", opt(v.normalization_limit)));
    r.summary.push(("a_bounded", Value::Bool(v.a_bounded)));
    r.summary.push(("failures", Value::String(v.failures.join("; "))));
    r.columns = vec!["x", "log_a", "log_deriv"];
    let ratio = (grid.x_max / grid.x_min).powf(1.0 / (grid.points - 1) as f64);
    r.rows = (0..grid.points)
        .map(|i| {
            let x = grid.x_min * ratio.powi(i as i32);
            vec![num(x), num(m.log_a(x)), num(m.log_deriv(x))]
        })
        .collect();
    ctx.emit(&r)?;
    if v.passed {
        Ok(())
    } else {
        Err(Failure::Input(format!("{m} fails validation: {}", v.failures.join("; "))))
    }
}

fn cmd_kernel(ctx: &Ctx, method: Option<&str>) -> Outcome {
    let m = ctx.model()?;
    let x = ctx.cli.x.unwrap_or(1.0);
    let y = ctx.cli.y.unwrap_or(2.0);
    let h = ctx.h(1e-3)?;
    let one = |method: Option<KernelMethod>| {
        kernel_density_with(
            &m,
            x,
            y,
            KernelOptions {
                h,
                method,
                refinement_check: false,
            },
        )
    };
    let mut r = ctx.base("kernel", &m);
    r.config.push(("x", num(x)));
    r.config.push(("y", num(y)));
    r.config.push(("h", num(h)));
    if method == Some("both-with-diff") {
        let reference = if m.is_closed_form_kernel() {
            KernelMethod::ClosedForm
        } else {
            KernelMethod::Transmutation
        };
        let a = one(Some(reference))?;
        let b = one(Some(KernelMethod::Marched))?;
        r.config.push(("method", Value::String(format!("{}+marched", reference.as_str()))));
        r.summary.push(("mass_reference", num(a.mass())));
        r.summary.push(("mass_marched", num(b.mass())));
        r.summary.push(("tv_difference", num(tv_distance(&a.measure, &b.measure))));
        r.columns = vec!["t", "k_reference", "k_marched", "diff"];
        r.rows = a
            .measure
            .nodes()
            .map(|(t, _)| {
                let (ka, kb) = (a.density_at(t), b.density_at(t));
                vec![num(t), num(ka), num(kb), num(kb - ka)]
            })
            .collect();
    } else {
        let k = one(method.map(KernelMethod::parse).transpose()?)?;
        r.config.push(("method", Value::String(k.method.as_str().into())));
        r.summary.push(("mass", num(k.mass())));
        r.summary.push(("support_lo", num(k.support.0)));
        r.summary.push(("support_hi", num(k.support.1)));
        r.columns = vec!["t", "k"];
        r.rows = k.measure.nodes().map(|(t, _)| vec![num(t), num(k.density_at(t))]).collect();
    }
    ctx.emit(&r)
}

fn cmd_translate(ctx: &Ctx, f: &str, xmax: Option<f64>) -> Outcome {
    let m = ctx.model()?;
    let y = positive("y", ctx.cli.y.unwrap_or(1.0))?;
    let h = ctx.h(1e-2)?;
    let x_max = xmax.unwrap_or(y + 10.0);
    let e = Expr::parse(f)?;
    let t = translate_function(&m, |x| e.eval(x), y, HyperbolicGrid::new(x_max, h))?;
    let mut r = ctx.base("translate", &m);
    r.config.push(("f", Value::String(f.into())));
    r.config.push(("y", num(y)));
    r.config.push(("h", num(h)));
    r.config.push(("xmax", num(x_max)));
    r.summary.push(("h_y", num(t.h_y)));
    r.columns = vec!["x", "value"];
    r.rows = t.values.iter().enumerate().map(|(k, v)| vec![num(t.x(k)), num(*v)]).collect();
    ctx.emit(&r)
}

fn cmd_eigen(ctx: &Ctx, lambda_im: f64, xmax: f64) -> Outcome {
    let m = ctx.model()?;
    let re = match ctx.cli.lambda.as_slice() {
        [] => 1.0,
        [l] => *l,
        _ => return Err(Failure::Input("eigen takes a single --lambda".into())),
    };
    let h = ctx.h(1e-2)?;
    let lambda = Complex64::new(re, lambda_im);
    let s = phi_lambda(&m, lambda, positive("xmax", xmax)?, h)?;
    let mut r = ctx.base("eigen", &m);
    r.config.push(("lambda_re", num(re)));
    r.config.push(("lambda_im", num(lambda_im)));
    r.config.push(("xmax", num(xmax)));
    r.config.push(("h", num(h)));
    r.columns = vec!["x", "re_phi", "im_phi"];
    r.rows = s.phi.iter().enumerate().map(|(k, p)| vec![num(s.x(k)), num(p.re), num(p.im)]).collect();
    ctx.emit(&r)
}

fn cmd_cfun(ctx: &Ctx) -> Outcome {
    let m = ctx.model()?;
    let lambdas = if ctx.cli.lambda.is_empty() {
        vec![0.5, 1.0, 2.0, 4.0]
    } else {
        ctx.cli.lambda.clone()
    };
    let rows = lambdas
        .iter()
        .map(|&l| c_function(&m, l, None))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = ctx.base("cfun", &m);
    r.config.push((
        "lambda",
        Value::String(lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")),
    ));
    r.columns = vec!["lambda", "re_c", "im_c", "residual"];
    r.rows = rows
        .iter()
        .map(|c| vec![num(c.lambda), num(c.c_plus.re), num(c.c_plus.im), num(c.residual)])
        .collect();
    ctx.emit(&r)
}

fn cmd_nu(ctx: &Ctx, method: Option<&str>) -> Outcome {
    let m = ctx.model()?;
    let y = positive("y", ctx.cli.y.unwrap_or(2.0))?;
    let h = ctx.h(1e-3)?;
    let (label, nu) = match method {
        None => match closed_form_nu(&m, y, h) {
            Some(nu) => ("closed-form", nu),
            None => ("marched", nu_marched(&m, y, h)?),
        },
        Some("closed-form") => (
            "closed-form",
            closed_form_nu(&m, y, h).ok_or_else(|| Failure::Input(format!("{m} has no closed-form ν_y")))?,
        ),
        Some("marched") => ("marched", nu_marched(&m, y, h)?),
        Some(other) => return Err(Failure::Input(format!("unknown ν method '{other}'"))),
    };
    let mut r = ctx.base("nu", &m);
    r.config.push(("y", num(y)));
    r.config.push(("h", num(h)));
    r.config.push(("method", Value::String(label.into())));
    measure_rows(&mut r, &nu);
    ctx.emit(&r)
}

const NU_INFTY_TOLS: [&str; 3] = ["cauchy", "weight-eps", "series"];

fn nu_infty_options(ctx: &Ctx, h: f64) -> NuInftyOptions {
    let d = NuInftyOptions::default();
    NuInftyOptions {
        h,
        cauchy_tol: *ctx.tols.get("cauchy").unwrap_or(&d.cauchy_tol),
        weight_eps: *ctx.tols.get("weight-eps").unwrap_or(&d.weight_eps),
        series_tol: *ctx.tols.get("series").unwrap_or(&d.series_tol),
        ..d
    }
}

fn cmd_nu_infty(ctx: &Ctx, route: &str) -> Outcome {
    reject_unknown_tols(&ctx.tols, &NU_INFTY_TOLS)?;
    let m = ctx.model()?;
    let route = match route {
        "limit" => NuInftyRoute::Limit,
        "neumann" => NuInftyRoute::Neumann,
        other => return Err(Failure::Input(format!("unknown route '{other}'"))),
    };
    let h = ctx.h(1e-3)?;
    let opts = nu_infty_options(ctx, h);
    let n = nu_infty(&m, route, opts)?;
    let mut r = ctx.base("nu-infty", &m);
    r.config.push(("route", Value::String(route.as_str().into())));
    r.config.push(("h", num(h)));
    r.config.push(("cauchy", num(opts.cauchy_tol)));
    r.config.push(("weight-eps", num(opts.weight_eps)));
    r.config.push(("series", num(opts.series_tol)));
    let (pk, dk) = match route {
        NuInftyRoute::Limit => ("y_used", "cauchy_increment"),
        NuInftyRoute::Neumann => ("truncation", "cropped_tv"),
    };
    r.summary.push((pk, num(n.parameter)));
    r.summary.push((dk, num(n.diagnostic)));
    measure_rows(&mut r, &n.measure);
    ctx.emit(&r)
}

fn regime_report(r: &mut Report, rep: &RegimeReport, opts: &RegimeOptions) {
    r.config.push(("x", num(rep.x)));
    r.config.push(("h", num(opts.h)));
    r.config.push(("kernel_h", num(opts.kernel_h)));
    r.config.push(("nu_infty_h", num(opts.nu_infty.h)));
    r.summary.push(("rho", num(rep.rho)));
    r.summary.push(("growth", Value::String(rep.growth.as_str().into())));
    r.summary.push(("a_bounded", Value::Bool(rep.a_bounded)));
    r.summary.push(("ft_min", opt(rep.ft_min)));
    r.summary.push(("verdict", Value::String(rep.verdict.as_str().into())));
    r.columns = vec!["y", "d_inv", "d_shift", "d_center", "d_limit", "weakstar", "dilated_t2"];
    r.rows = (0..rep.y_values.len())
        .map(|k| {
            vec![
                num(rep.y_values[k]),
                num(rep.d_inv[k]),
                num(rep.d_shift[k]),
                opt(rep.d_center[k]),
                opt(rep.d_limit[k]),
                num(rep.weakstar[k]),
                opt(rep.dilated_second_moment[k]),
            ]
        })
        .collect();
}

fn regime_options(ctx: &Ctx) -> Result<RegimeOptions, Failure> {
    let d = RegimeOptions::default();
    Ok(RegimeOptions { h: ctx.h(d.h)?, ..d })
}

fn cmd_distances(ctx: &Ctx) -> Outcome {
    let m = ctx.model()?;
    let x = positive("x", ctx.cli.x.unwrap_or(1.0))?;
    let ys = match ctx.cli.ymax {
        Some(ymax) => {
            let n = positive("ymax", ymax)?.floor() as usize;
            if n < 2 {
                return Err(Failure::Input("--ymax must be at least 2".into()));
            }
            (1..=n).map(|k| k as f64).collect()
        }
        None => default_y_values(&m),
    };
    let opts = regime_options(ctx)?;
    let rep = asymptotic_distances(&m, x, &ys, opts)?;
    let mut r = ctx.base("distances", &m);
    regime_report(&mut r, &rep, &opts);
    ctx.emit(&r)
}

fn cmd_classify(ctx: &Ctx) -> Outcome {
    let m = ctx.model()?;
    let opts = regime_options(ctx)?;
    let rep = classify(&m, opts)?;
    let mut r = ctx.base("classify", &m);
    regime_report(&mut r, &rep, &opts);
    ctx.emit(&r)
}

fn cmd_verify(ctx: &Ctx, criteria: &[u32], draws: usize, seed: u64) -> Outcome {
    reject_unknown_tols(&ctx.tols, &CHECK_NAMES)?;
    if let Some(c) = criteria.iter().find(|c| !verify::CRITERIA.contains(c)) {
        return Err(Failure::Input(format!("no criterion {c}")));
    }
    let cfg = VerifyConfig {
        h: ctx.h(1e-3)?,
        tolerances: ctx.tols.clone(),
        sweep_draws: draws,
        seed,
    };
    let which: Vec<u32> = if criteria.is_empty() {
        verify::CRITERIA.to_vec()
    } else {
        criteria.to_vec()
    };
    let results = verify::run_selected(&cfg, &which);
    let mut r = Report::new("verify");
    r.config.push(("h", num(cfg.h)));
    r.config.push(("draws", Value::from(draws)));
    r.config.push(("seed", Value::from(seed)));
    r.config.push((
        "criteria",
        Value::String(which.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")),
    ));
    for (k, v) in &cfg.tolerances {
        r.config.push(("tol", Value::String(format!("{k}={v}"))));
    }
    let summary = verify::summarize(&results);
    for (n, pass) in &summary {
        eprintln!("criterion {n}: {}", if *pass { "PASS" } else { "FAIL" });
    }
    r.summary.push(("passed", Value::from(summary.iter().filter(|s| s.1).count())));
    r.summary.push(("failed", Value::from(summary.iter().filter(|s| !s.1).count())));
    r.columns = vec![
        "criterion",
        "name",
        "measured",
        "expected",
        "tolerance",
        "provenance",
        "pass",
        "note",
    ];
    r.rows = results
        .iter()
        .map(|c| {
            vec![
                Value::String(c.criterion.clone()),
                Value::String(c.name.clone()),
                num(c.measured),
                num(c.expected),
                num(c.tolerance),
                Value::String(c.provenance.clone()),
                Value::Bool(c.pass),
                c.note.clone().map_or(Value::Null, Value::String),
            ]
        })
        .collect();
    ctx.emit(&r)?;
    let failed: Vec<String> = results
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} {}", c.criterion, c.name))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

fn run(cli: Cli) -> Outcome {
    let tols = parse_tols(&cli.tol)?;
    let ctx = Ctx { cli, tols };
    match &ctx.cli.cmd {
        Cmd::Verify { .. } | Cmd::NuInfty { .. } => {}
        _ => reject_unknown_tols(&ctx.tols, &[])?,
    }
    match &ctx.cli.cmd {
        Cmd::Model {
            action: ModelAction::Validate,
        } => cmd_model_validate(&ctx),
        Cmd::Kernel { method } => cmd_kernel(&ctx, method.as_deref()),
        Cmd::Translate { f, xmax } => cmd_translate(&ctx, f, *xmax),
        Cmd::Eigen { lambda_im, xmax } => cmd_eigen(&ctx, *lambda_im, *xmax),
        Cmd::Cfun => cmd_cfun(&ctx),
        Cmd::Nu { method } => cmd_nu(&ctx, method.as_deref()),
        Cmd::NuInfty { route } => cmd_nu_infty(&ctx, route),
        Cmd::Distances => cmd_distances(&ctx),
        Cmd::Classify => cmd_classify(&ctx),
        Cmd::Verify { criteria, draws, seed } => cmd_verify(&ctx, criteria, *draws, *seed),
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HYPERCONV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("HYPERCONV_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Regime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(failed)) => {
            eprintln!("verification failed: {}", failed.join(", "));
            ExitCode::from(3)
        }
    }
}
