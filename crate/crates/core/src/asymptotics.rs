//! Asymptotic measures `ν_y`, their limit `ν_∞`, and regime diagnostics.
//!
//! `ν_y` is computed from the Volterra recursion
//!
//! `2A(y)ν_y = e^{-2ρy} ∫₀^y G₊'(η) δ_{η-y} ⋆ ν_η dη + e^{2ρy} ∫₀^y G₋'(η) δ_{y-η} ⋆ ν_η dη`
//!
//! with `G±(η) = A(η)e^{±2ρη}`. The `η` integrals use product integration
//! against piecewise-linear hats, so the masses telescope and every `ν_y`
//! has mass exactly 1.

use crate::error::{Error, Result};
use crate::kernel::{convolve_h, kernel_density};
use crate::measure::{exp_weight, fourier_stieltjes, neumann_inverse, pair, tv_distance, GridMeasure};
use crate::model::{validate_model, Family, GrowthClass, SturmLiouvilleModel, ValidationGrid};
use crate::quad::adaptive_simpson;
use num_complex::Complex64;
use statrs::function::beta::beta_reg;
use std::fmt::Write as _;

/// Number of initial steps taken from the Bessel-Kingman closed form.
pub const STARTUP_STEPS: usize = 10;
const RENORMALIZE_DRIFT: f64 = 1e-6;
const MAX_DRIFT: f64 = 1e-3;

/// Closed-form `ν_y` (Naimark and Bessel-Kingman) as exact cell masses on
/// the lattice `k·h`.
pub fn closed_form_nu(model: &SturmLiouvilleModel, y: f64, h: f64) -> Option<GridMeasure> {
    match model.family() {
        Family::Naimark => Some(naimark_nu(y, h)),
        Family::BesselKingman { alpha0 } => Some(bk_nu(*alpha0, y, h)),
        _ => None,
    }
}

fn naimark_nu(y: f64, h: f64) -> GridMeasure {
    let d = 1.0 - (-2.0 * y).exp();
    GridMeasure::from_cdf(|t| (t - y).exp() / d, -y, y, h)
}

/// `ν_y` for Bessel-Kingman: `(1 + t/y)/2 ~ Beta(α₀/2, α₀/2)`.
fn bk_nu(alpha0: f64, y: f64, h: f64) -> GridMeasure {
    let a = 0.5 * alpha0;
    GridMeasure::from_cdf(|t| beta_reg(a, a, (0.5 * (1.0 + t / y)).clamp(0.0, 1.0)), -y, y, h)
}

/// Step-by-step solver of the recursion on the lattice `y_N = N·h`.
///
/// The state after `advance` is `ν_N` with nodal masses `current()[i + N]`
/// at `t = i·h`, `i = -N..=N`.
pub struct NuMarcher {
    model: SturmLiouvilleModel,
    h: f64,
    n_max: usize,
    rho: f64,
    closed_form: bool,
    /// `ln A` reference, keeps `G±` in range.
    log_ref: f64,
    /// Cell integrals `∫_{η_m}^{η_{m+1}} G±`.
    i_plus: Vec<f64>,
    i_minus: Vec<f64>,
    /// Diagonal accumulators: `p_plus[i + m]`, `p_minus[i - m + 2 n_max]`.
    p_plus: Vec<f64>,
    p_minus: Vec<f64>,
    n: usize,
    nu: Vec<f64>,
    max_drift: f64,
    startup: usize,
}

impl NuMarcher {
    /// Prepares a march up to `y = n_max·h`. With `closed_form` set, families
    /// that have a closed form use it for every `ν_N` instead of the recursion.
    pub fn new(model: &SturmLiouvilleModel, h: f64, n_max: usize, closed_form: bool) -> Result<Self> {
        if !(h > 0.0) || n_max == 0 {
            return Err(Error::Domain(format!("need h > 0 and at least one step, got h = {h}, n = {n_max}")));
        }
        let rho = model.rho();
        let y_max = n_max as f64 * h;
        if 2.0 * rho * y_max > 600.0 {
            return Err(Error::Range(format!(
                "e^{{2ρy}} overflows the recursion weights at y = {y_max} (ρ = {rho})"
            )));
        }
        let log_ref = model.log_a(y_max);
        let g = |eta: f64, sign: f64| -> f64 {
            if eta <= 0.0 {
                0.0
            } else {
                (model.log_a(eta) - log_ref + sign * 2.0 * rho * eta).exp()
            }
        };
        let cell = |m: usize, sign: f64| -> Result<f64> {
            let (a, b) = (m as f64 * h, (m + 1) as f64 * h);
            let scale = g(b, sign).max(g(a, sign)) * h;
            adaptive_simpson(|e| g(e, sign), a, b, (1e-13 * scale).max(1e-300))
        };
        let mut i_plus = Vec::with_capacity(n_max);
        let mut i_minus = Vec::with_capacity(n_max);
        for m in 0..n_max {
            i_plus.push(cell(m, 1.0)?);
            i_minus.push(if rho == 0.0 { i_plus[m] } else { cell(m, -1.0)? });
        }
        Ok(NuMarcher {
            closed_form: closed_form && closed_form_nu(model, h, h).is_some(),
            model: model.clone(),
            h,
            n_max,
            rho,
            log_ref,
            i_plus,
            i_minus,
            p_plus: vec![0.0; 2 * n_max + 1],
            p_minus: vec![0.0; 2 * n_max + 1],
            n: 0,
            nu: vec![1.0],
            max_drift: 0.0,
            startup: STARTUP_STEPS,
        })
    }

    /// Overrides the number of closed-form startup steps.
    pub fn with_startup(mut self, steps: usize) -> Self {
        self.startup = steps;
        self
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn y(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn current(&self) -> &[f64] {
        &self.nu
    }

    /// Largest `|mass - 1|` seen so far.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    pub fn current_measure(&self) -> GridMeasure {
        if self.n == 0 {
            return GridMeasure::atom(0.0, 1.0, self.h);
        }
        GridMeasure::from_nodal_masses(-(self.n as i64), self.h, &self.nu)
    }

    fn scaled_a(&self, y: f64) -> f64 {
        (self.model.log_a(y) - self.log_ref).exp()
    }

    fn weight(&self, m: usize, sign: f64) -> f64 {
        let i = if sign > 0.0 { &self.i_plus } else { &self.i_minus };
        if m == 0 {
            i[0] / self.h
        } else {
            (i[m] - i[m - 1]) / self.h
        }
    }

    fn half_weight(&self, n: usize, sign: f64) -> f64 {
        let i = if sign > 0.0 { &self.i_plus } else { &self.i_minus };
        let y = n as f64 * self.h;
        self.scaled_a(y) * (sign * 2.0 * self.rho * y).exp() - i[n - 1] / self.h
    }

    fn closed_masses(&self, n: usize) -> Vec<f64> {
        let y = n as f64 * self.h;
        let m = match closed_form_nu(&self.model, y, self.h) {
            Some(m) if self.closed_form => m,
            _ => bk_nu(self.model.alpha0(), y, self.h),
        };
        // Nodes -n..=n, padding trimmed.
        let first = (m.origin() / self.h).round() as i64;
        let mut out = vec![0.0; 2 * n + 1];
        for (k, v) in m.nodal_masses().into_iter().enumerate() {
            let idx = first + k as i64 + n as i64;
            if idx >= 0 && (idx as usize) < out.len() {
                out[idx as usize] += v;
            }
        }
        out
    }

    /// Moves from `ν_N` to `ν_{N+1}`.
    pub fn advance(&mut self) -> Result<()> {
        if self.n >= self.n_max {
            return Err(Error::Domain("march already reached its end".into()));
        }
        let n = self.n;
        let (wp, wm) = (self.weight(n, 1.0), self.weight(n, -1.0));
        let off = 2 * self.n_max;
        // Within the hat around η_n the shift moves a point at relative
        // position u of supp ν_η by 2u(η - η_n) in the `+` term and by
        // 2(1-u)(η - η_n) in the `-` term; that motion is spread onto the lattice.
        let last_p = self.p_plus.len() as i64 - 1;
        for (k, &v) in self.nu.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let i = k as i64 - n as i64;
            let u = if n == 0 { 0.5 } else { (i + n as i64) as f64 / (2 * n) as f64 };
            let (sp, sm) = if n == 0 { ([0.0, 0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0, 0.0]) } else { (spread(2.0 * u), spread(2.0 * (1.0 - u))) };
            let jp = i + n as i64;
            let jm = i - n as i64 + off as i64;
            for d in 0..5 {
                let o = d as i64 - 2;
                if sp[d] != 0.0 {
                    self.p_plus[(jp + o).clamp(0, last_p) as usize] += wp * v * sp[d];
                }
                if sm[d] != 0.0 {
                    self.p_minus[(jm + o).clamp(0, last_p) as usize] += wm * v * sm[d];
                }
            }
        }
        let n = n + 1;
        self.n = n;
        if self.closed_form || n <= self.startup {
            self.nu = self.closed_masses(n);
        } else {
            let y = n as f64 * self.h;
            let ep = (-2.0 * self.rho * y).exp();
            let em = (2.0 * self.rho * y).exp();
            let denom = 2.0 * self.scaled_a(y) - ep * self.half_weight(n, 1.0) - em * self.half_weight(n, -1.0);
            if !(denom > 0.0) {
                return Err(Error::Recursion(format!("recursion denominator {denom} is not positive at y = {y}")));
            }
            let mut nu = vec![0.0; 2 * n + 1];
            for (k, slot) in nu.iter_mut().enumerate() {
                let i = k as i64 - n as i64;
                let p = self.p_plus[(i + n as i64) as usize];
                let q = self.p_minus[(i - n as i64 + off as i64) as usize];
                *slot = (ep * p + em * q) / denom;
            }
            self.nu = nu;
        }
        let drift = (self.nu.iter().sum::<f64>() - 1.0).abs();
        self.max_drift = self.max_drift.max(drift);
        Ok(())
    }

    /// `∫₀^{y_N} G₋'(η) δ_{-η} ⋆ ν_η dη` in units of the scaled `A`, as nodal
    /// masses at `t = -2N..=0` (times `h`).
    pub fn minus_integral(&self) -> GridMeasure {
        let n = self.n;
        let off = 2 * self.n_max;
        let mut out: Vec<f64> = (0..=2 * n).map(|k| self.p_minus[off - 2 * n + k]).collect();
        if n > 0 {
            let c = self.half_weight(n, -1.0);
            // δ_{-N} ⋆ ν_N occupies -2N..=0.
            for (k, &v) in self.nu.iter().enumerate() {
                out[k] += c * v;
            }
        }
        GridMeasure::from_nodal_masses(-2 * n as i64, self.h, &out)
    }

    /// `lim A(η)e^{-2ρη}` in the same scaled units.
    fn scaled_limit(&self, limit: f64) -> f64 {
        limit * (-self.log_ref).exp()
    }
}

const SPREAD_TABLE: usize = 256;

/// Lattice weights at offsets -2..=2 of a displacement `c·s`, where `s` has
/// the triangular density on `[-1, 1]`, split linearly between nodes.
fn spread(c: f64) -> [f64; 5] {
    static TABLE: std::sync::OnceLock<Vec<[f64; 5]>> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=SPREAD_TABLE)
            .map(|k| {
                let c = 2.0 * k as f64 / SPREAD_TABLE as f64;
                let q = 4000;
                let mut w = [0.0; 5];
                for j in 0..q {
                    let s = -1.0 + (j as f64 + 0.5) * 2.0 / q as f64;
                    let p = (1.0 - s.abs()) * 2.0 / q as f64;
                    let d = c * s;
                    let f = d.floor();
                    let frac = d - f;
                    let idx = f as i64 + 2;
                    w[idx as usize] += p * (1.0 - frac);
                    if frac > 0.0 {
                        w[idx as usize + 1] += p * frac;
                    }
                }
                w
            })
            .collect()
    });
    let x = (c.clamp(0.0, 2.0) / 2.0) * SPREAD_TABLE as f64;
    let k = (x.floor() as usize).min(SPREAD_TABLE - 1);
    let f = x - k as f64;
    let mut out = [0.0; 5];
    for d in 0..5 {
        out[d] = table[k][d] * (1.0 - f) + table[k + 1][d] * f;
    }
    out
}

fn check_drift(mut m: GridMeasure, y: f64) -> Result<GridMeasure> {
    let mass = m.mass();
    let drift = (mass - 1.0).abs();
    if drift > MAX_DRIFT {
        return Err(Error::Recursion(format!("ν_y at y = {y} has mass {mass} (drift {drift:.3e})")));
    }
    if drift > RENORMALIZE_DRIFT {
        log::warn!("ν_y at y = {y}: mass drift {drift:.3e}, renormalized");
        m = m.scale(1.0 / mass);
    }
    Ok(m)
}

/// `ν_y` on the lattice of step `h`: closed form when available, the
/// recursion otherwise.
pub fn nu_measure(model: &SturmLiouvilleModel, y: f64, h: f64) -> Result<GridMeasure> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("ν_y needs y > 0, got {y}")));
    }
    if let Some(m) = closed_form_nu(model, y, h) {
        return Ok(m);
    }
    nu_marched(model, y, h)
}

/// `ν_y` by the recursion regardless of closed forms. The step is adjusted to
/// `y/round(y/h)`.
pub fn nu_marched(model: &SturmLiouvilleModel, y: f64, h: f64) -> Result<GridMeasure> {
    let n = (y / h).round().max(1.0) as usize;
    let he = y / n as f64;
    let mut m = NuMarcher::new(model, he, n, false)?;
    while m.index() < n {
        m.advance()?;
    }
    check_drift(m.current_measure(), y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuMethod {
    ClosedForm,
    Marched,
}

/// `ν_y` at several `y`, built in one pass.
#[derive(Debug, Clone)]
pub struct NuFamily {
    pub model: String,
    pub h: f64,
    pub method: NuMethod,
    pub ys: Vec<f64>,
    pub measures: Vec<GridMeasure>,
}

/// `ν_y` for every `y` in `ys` (rounded to the lattice `k·h`).
pub fn nu_family(model: &SturmLiouvilleModel, ys: &[f64], h: f64, method: NuMethod) -> Result<NuFamily> {
    let mut order: Vec<usize> = (0..ys.len()).collect();
    order.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
    let steps: Vec<usize> = ys.iter().map(|y| (y / h).round().max(1.0) as usize).collect();
    let mut measures = vec![GridMeasure::zero(h); ys.len()];
    let closed = method == NuMethod::ClosedForm && closed_form_nu(model, h, h).is_some();
    if closed {
        for (k, &n) in steps.iter().enumerate() {
            measures[k] = closed_form_nu(model, n as f64 * h, h).unwrap();
        }
    } else if let Some(&n_max) = steps.iter().max() {
        let mut m = NuMarcher::new(model, h, n_max, false)?;
        for &k in &order {
            while m.index() < steps[k] {
                m.advance()?;
            }
            measures[k] = check_drift(m.current_measure(), m.y())?;
        }
    }
    Ok(NuFamily {
        model: model.name().to_string(),
        h,
        method: if closed { NuMethod::ClosedForm } else { NuMethod::Marched },
        ys: steps.iter().map(|&n| n as f64 * h).collect(),
        measures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuInftyRoute {
    Limit,
    Neumann,
}

impl NuInftyRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            NuInftyRoute::Limit => "limit",
            NuInftyRoute::Neumann => "neumann",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NuInftyOptions {
    pub h: f64,
    /// Limit route: `y` doubles from `y_first` until the Cauchy increment
    /// drops below `cauchy_tol` or `y_max` is reached.
    pub y_first: f64,
    pub y_max: f64,
    pub cauchy_tol: f64,
    /// Neumann route: truncation of the weight integral.
    pub weight_eps: f64,
    pub series_tol: f64,
    /// Neumann route: left end of the retained window.
    pub window_left: f64,
    /// Use closed-form `ν_η` when the model has one.
    pub closed_form: bool,
}

impl Default for NuInftyOptions {
    fn default() -> Self {
        NuInftyOptions {
            h: 1e-3,
            y_first: 1.0,
            y_max: 16.0,
            cauchy_tol: 1e-3,
            weight_eps: 1e-6,
            series_tol: 1e-10,
            window_left: -40.0,
            closed_form: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NuInfty {
    pub route: NuInftyRoute,
    pub measure: GridMeasure,
    /// Limit route: `y` used and the last Cauchy increment.
    /// Neumann route: truncation point `η` and the TV lost to cropping.
    pub parameter: f64,
    pub diagnostic: f64,
}

/// Checks the hypothesis class and returns `lim A(y)e^{-2ρy}`.
pub fn normalization_limit(model: &SturmLiouvilleModel) -> Result<f64> {
    if model.rho() <= 0.0 {
        return Err(Error::Regime(format!("ν_∞ needs ρ > 0; {model} has ρ = {}", model.rho())));
    }
    let r = validate_model(model, ValidationGrid::default());
    match (r.growth, r.normalization_limit) {
        (GrowthClass::ExponentialNormalizable, Some(l)) if l > 0.0 && l.is_finite() => Ok(l),
        _ => Err(Error::Regime(format!(
            "{model} is not exponential-normalizable (class {})",
            r.growth.as_str()
        ))),
    }
}

pub fn nu_infty(model: &SturmLiouvilleModel, route: NuInftyRoute, opts: NuInftyOptions) -> Result<NuInfty> {
    let limit = normalization_limit(model)?;
    match route {
        NuInftyRoute::Limit => nu_infty_limit(model, opts),
        NuInftyRoute::Neumann => nu_infty_neumann(model, limit, opts),
    }
}

fn centered(model: &SturmLiouvilleModel, y: f64, opts: &NuInftyOptions) -> Result<GridMeasure> {
    let nu = if opts.closed_form {
        nu_measure(model, y, opts.h)?
    } else {
        nu_marched(model, y, opts.h)?
    };
    Ok(nu.shift(-y))
}

fn nu_infty_limit(model: &SturmLiouvilleModel, opts: NuInftyOptions) -> Result<NuInfty> {
    let mut y = opts.y_first;
    let mut prev = centered(model, y, &opts)?;
    let mut inc = f64::INFINITY;
    while y * 2.0 <= opts.y_max + 1e-12 {
        y *= 2.0;
        let cur = centered(model, y, &opts)?;
        inc = tv_distance(&cur, &prev);
        prev = cur;
        if inc < opts.cauchy_tol {
            break;
        }
    }
    if !(inc < opts.cauchy_tol) {
        log::warn!("ν_∞ limit route: Cauchy increment {inc:.3e} at y = {y} is above {:.1e}", opts.cauchy_tol);
    }
    Ok(NuInfty {
        route: NuInftyRoute::Limit,
        measure: prev,
        parameter: y,
        diagnostic: inc,
    })
}

fn nu_infty_neumann(model: &SturmLiouvilleModel, limit: f64, opts: NuInftyOptions) -> Result<NuInfty> {
    let rho = model.rho();
    let h = opts.h;
    // Truncation where A(η)e^{-2ρη} reaches (1 - ε) of its limit.
    let target_level = (1.0 - opts.weight_eps) * limit;
    let mut eta = h;
    while (model.log_normalized_a(eta)).exp() < target_level {
        eta += h;
        if eta > 200.0 {
            return Err(Error::NonConvergence("weight integral does not reach its truncation level".into()));
        }
    }
    let n_cut = (eta / h).round() as usize;
    let mut m = NuMarcher::new(model, h, n_cut, opts.closed_form)?;
    while m.index() < n_cut {
        m.advance()?;
    }
    let target = m.minus_integral().scale(0.5 / m.scaled_limit(limit));
    // u₂ = 2ρe^{2ρη} on η ≤ 0, cut where e^{2ρη} < 1e-12.
    let left = -(1e12f64).ln() / (2.0 * rho);
    let u2 = GridMeasure::from_cdf(|e| (2.0 * rho * e).exp(), left, 0.0, h);
    let (measure, info) = neumann_inverse(&u2, &target, opts.series_tol, Some((opts.window_left, 0.0)))?;
    Ok(NuInfty {
        route: NuInftyRoute::Neumann,
        measure,
        parameter: n_cut as f64 * h,
        diagnostic: info.cropped,
    })
}

/// Both routes and their TV distance; fails if they disagree beyond `tol`.
pub fn nu_infty_consistent(
    model: &SturmLiouvilleModel,
    opts: NuInftyOptions,
    tol: f64,
) -> Result<(NuInfty, NuInfty, f64)> {
    let a = nu_infty(model, NuInftyRoute::Limit, opts)?;
    let b = nu_infty(model, NuInftyRoute::Neumann, opts)?;
    let d = tv_distance(&a.measure, &b.measure);
    if d > tol {
        return Err(Error::Consistency(format!("ν_∞ routes differ by {d:.3e} (tolerance {tol:e})")));
    }
    Ok((a, b, d))
}

/// Default weak* test function: `1_{[-½,½]}` with linear ramps of width `h`.
pub fn default_f_test(h: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| ((0.5 + 0.5 * h - t.abs()) / h).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    InvarianceRegime,
    NuInfinityRegime,
    BoundedARegime,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::InvarianceRegime => "invariance-regime",
            Verdict::NuInfinityRegime => "nu-infinity-regime",
            Verdict::BoundedARegime => "bounded-A-regime",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegimeOptions {
    pub h: f64,
    /// Lattice step for the kernel recentering distances.
    pub kernel_h: f64,
    pub lambda_grid: (f64, f64, f64),
    pub nu_infty: NuInftyOptions,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        RegimeOptions {
            h: 1e-2,
            kernel_h: 1e-3,
            lambda_grid: (-4.0, 4.0, 0.1),
            nu_infty: NuInftyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RegimeReport {
    pub model: String,
    pub rho: f64,
    pub growth: GrowthClass,
    pub a_bounded: bool,
    pub x: f64,
    pub h: f64,
    pub y_values: Vec<f64>,
    /// `‖δ_x ⋆_ℝ ν_y - ν_y‖`.
    pub d_inv: Vec<f64>,
    /// `‖ν_{y+x} - ν_y‖`.
    pub d_shift: Vec<f64>,
    /// `‖δ_{-y} ⋆_ℝ (δ_x ⋆ δ_y) - ν_x‖` (closed-form kernels only).
    pub d_center: Vec<Option<f64>>,
    /// `‖δ_{-y} ⋆_ℝ ν_y - ν_∞‖` (exponential-normalizable models only).
    pub d_limit: Vec<Option<f64>>,
    /// `⟨ν_y, f_test⟩`.
    pub weakstar: Vec<f64>,
    /// `⟨ν'_y, t²⟩` (bounded A only).
    pub dilated_second_moment: Vec<Option<f64>>,
    pub ft_min: Option<f64>,
    pub verdict: Verdict,
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Decays by a factor 4 over the sweep; flat stretches at the
/// discretization floor are allowed.
fn converging(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[1] <= 1.1 * w[0]) && v[v.len() - 1] <= 0.25 * v[0]
}

pub fn asymptotic_distances(
    model: &SturmLiouvilleModel,
    x: f64,
    y_values: &[f64],
    opts: RegimeOptions,
) -> Result<RegimeReport> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    if y_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("y values must be increasing".into()));
    }
    let h = opts.h;
    let v = validate_model(model, ValidationGrid::default());
    let mut all: Vec<f64> = y_values.to_vec();
    all.extend(y_values.iter().map(|y| y + x));
    let fam = nu_family(model, &all, h, NuMethod::ClosedForm)?;
    let n = y_values.len();
    let nu = &fam.measures[..n];
    let nu_shift = &fam.measures[n..];

    let d_inv: Vec<f64> = nu.iter().map(|m| tv_distance(&m.shift(x), m)).collect();
    let d_shift: Vec<f64> = nu.iter().zip(nu_shift).map(|(a, b)| tv_distance(b, a)).collect();

    let d_center: Vec<Option<f64>> = if model.is_closed_form_kernel() {
        let nu_x = nu_measure(model, x, opts.kernel_h)?;
        y_values
            .iter()
            .map(|&y| {
                let k = kernel_density(model, x, y, opts.kernel_h).ok()?;
                Some(tv_distance(&k.measure.shift(-y), &nu_x))
            })
            .collect()
    } else {
        vec![None; n]
    };

    let f_test = default_f_test(h);
    let weakstar: Vec<f64> = nu.iter().map(|m| pair(m, &f_test)).collect();

    let mut ft_min = None;
    let mut d_limit = vec![None; n];
    if v.growth == GrowthClass::ExponentialNormalizable && model.rho() > 0.0 {
        let mut o = opts.nu_infty;
        o.h = h;
        let inf = nu_infty(model, NuInftyRoute::Neumann, o)?;
        for (k, m) in nu.iter().enumerate() {
            d_limit[k] = Some(tv_distance(&m.shift(-fam.ys[k]), &inf.measure));
        }
        let (lo, hi, step) = opts.lambda_grid;
        let count = ((hi - lo) / step).round() as usize;
        ft_min = Some(
            (0..=count)
                .map(|i| fourier_stieltjes(&inf.measure, Complex64::new(lo + i as f64 * step, 0.0)).norm())
                .fold(f64::INFINITY, f64::min),
        );
    }

    let dilated_second_moment: Vec<Option<f64>> = if v.a_bounded {
        nu.iter()
            .zip(&fam.ys)
            .map(|(m, &y)| Some(pair(m, |t| (t / y) * (t / y))))
            .collect()
    } else {
        vec![None; n]
    };

    let verdict = if v.growth == GrowthClass::ExponentialNormalizable {
        let dl: Vec<f64> = d_limit.iter().flatten().copied().collect();
        if converging(&dl) && ft_min.is_some_and(|f| f > 0.0) {
            Verdict::NuInfinityRegime
        } else {
            Verdict::Inconclusive
        }
    } else if model.rho() == 0.0 && !v.a_bounded {
        if decreasing(&d_inv) && decreasing(&d_shift) {
            Verdict::InvarianceRegime
        } else {
            Verdict::Inconclusive
        }
    } else if model.rho() == 0.0 && v.a_bounded {
        let mom: Vec<f64> = dilated_second_moment.iter().flatten().copied().collect();
        let odd_ok = nu.iter().all(|m| pair(m, |t| t).abs() < 1e-6 * fam.ys.last().copied().unwrap_or(1.0));
        if mom.windows(2).all(|w| w[1] > w[0]) && odd_ok {
            Verdict::BoundedARegime
        } else {
            Verdict::Inconclusive
        }
    } else {
        Verdict::Inconclusive
    };

    Ok(RegimeReport {
        model: model.name().to_string(),
        rho: model.rho(),
        growth: v.growth,
        a_bounded: v.a_bounded,
        x,
        h,
        y_values: fam.ys[..n].to_vec(),
        d_inv,
        d_shift,
        d_center,
        d_limit,
        weakstar,
        dilated_second_moment,
        ft_min,
        verdict,
    })
}

/// Default `y` sweep per growth class.
pub fn default_y_values(model: &SturmLiouvilleModel) -> Vec<f64> {
    let v = validate_model(model, ValidationGrid::default());
    match (v.growth, v.a_bounded) {
        (GrowthClass::ExponentialNormalizable, _) => vec![2.0, 4.0, 6.0, 8.0],
        (_, true) => vec![5.0, 10.0, 20.0, 50.0],
        _ => vec![10.0, 20.0, 40.0, 80.0],
    }
}

/// Regime report at `x = 1` over the default sweep.
pub fn classify(model: &SturmLiouvilleModel, opts: RegimeOptions) -> Result<RegimeReport> {
    asymptotic_distances(model, 1.0, &default_y_values(model), opts)
}

impl RegimeReport {
    /// Key/value header followed by a CSV block of the curves.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model = {}", self.model);
        let _ = writeln!(s, "rho = {}", self.rho);
        let _ = writeln!(s, "growth = {}", self.growth.as_str());
        let _ = writeln!(s, "a_bounded = {}", self.a_bounded);
        let _ = writeln!(s, "x = {}", self.x);
        let _ = writeln!(s, "h = {}", self.h);
        match self.ft_min {
            Some(f) => {
                let _ = writeln!(s, "ft_min = {f:.16e}");
            }
            None => s.push_str("ft_min = none\n"),
        }
        let _ = writeln!(s, "verdict = {}", self.verdict.as_str());
        s.push_str("\n[curves]\ny,d_inv,d_shift,d_center,d_limit,weakstar,dilated_t2\n");
        let opt = |v: Option<f64>| v.map_or_else(|| "".to_string(), |x| format!("{x:.16e}"));
        for k in 0..self.y_values.len() {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{},{},{:.16e},{}",
                self.y_values[k],
                self.d_inv[k],
                self.d_shift[k],
                opt(self.d_center[k]),
                opt(self.d_limit[k]),
                self.weakstar[k],
                opt(self.dilated_second_moment[k])
            );
        }
        s
    }
}

/// `⟨ν'_x, f⟩ = ∫ f(t/x) dν_x(t)` for bounded `A`.
pub fn dilated_nu<F: Fn(f64) -> f64>(model: &SturmLiouvilleModel, x: f64, f: F, h: f64) -> Result<f64> {
    let v = validate_model(model, ValidationGrid::default());
    if model.rho() != 0.0 || !v.a_bounded {
        return Err(Error::Regime(format!("dilated ν_x needs ρ = 0 and bounded A; {model} does not qualify")));
    }
    let nu = nu_measure(model, x, h)?;
    Ok(pair(&nu, |t| f(t / x)))
}

/// `Sμ = ∫ ν_x dμ(x)` for `μ` on `[h, ∞)`.
pub fn s_map(model: &SturmLiouvilleModel, mu: &GridMeasure, h: f64) -> Result<GridMeasure> {
    let mut pts: Vec<(f64, f64)> = mu.atoms().to_vec();
    pts.extend(mu.nodes().filter(|p| p.1 != 0.0));
    if let Some(&(p, _)) = pts.iter().find(|p| p.0 < h * (1.0 - 1e-9)) {
        return Err(Error::Resolution(format!("S needs μ supported in [h, ∞); found mass at {p}")));
    }
    let mut out = GridMeasure::zero(h);
    if pts.is_empty() {
        return Ok(out);
    }
    if closed_form_nu(model, h, h).is_some() {
        for (x, m) in pts {
            out = out.add(&nu_measure(model, x, h)?.scale(m));
        }
        return Ok(out);
    }
    // One march; off-lattice points split linearly between neighbouring steps.
    let mut weights: Vec<(usize, f64)> = Vec::new();
    for (x, m) in pts {
        let s = x / h;
        let k = s.floor() as usize;
        let f = s - k as f64;
        if f < 1e-9 {
            weights.push((k, m));
        } else {
            weights.push((k, m * (1.0 - f)));
            weights.push((k + 1, m * f));
        }
    }
    weights.sort_by_key(|w| w.0);
    let n_max = weights.last().unwrap().0;
    let mut march = NuMarcher::new(model, h, n_max, false)?;
    for (k, m) in weights {
        while march.index() < k {
            march.advance()?;
        }
        out = out.add(&march.current_measure().scale(m));
    }
    Ok(out)
}

/// `(Tf)(x) = ⟨ν_x, f⟩`.
pub fn t_map<F: Fn(f64) -> f64>(model: &SturmLiouvilleModel, f: F, x: f64, h: f64) -> Result<f64> {
    Ok(pair(&nu_measure(model, x, h)?, f))
}

/// `‖δ_x ⋆ v_n - v_n‖` with `v_n = (1/n)·1_{[0,n]}`.
pub fn approx_identity_defect(model: &SturmLiouvilleModel, x: f64, n: u32, h: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let len = n as f64;
    let v = GridMeasure::from_cdf(|t| t / len, 0.0, len, h);
    let c = convolve_h(model, &GridMeasure::atom(x, 1.0, h), &v, h)?;
    Ok(tv_distance(&c, &v))
}

/// `τ_x = e^{-ρt}ν_x`, whose transform is `φ_λ(x)`.
pub fn tau_measure(model: &SturmLiouvilleModel, x: f64, h: f64) -> Result<GridMeasure> {
    Ok(exp_weight(&nu_measure(model, x, h)?, model.rho()))
}
