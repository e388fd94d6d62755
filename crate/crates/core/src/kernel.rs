//! Translation kernels `δ_x ⋆ δ_y`, generalized translations `T_y f` and the
//! hypergroup convolution of measures.
//!
//! General models are handled by marching the Cauchy problem
//! `u_yy + (A'(y)/A(y)) u_y = u_xx + (A'(x)/A(x)) u_x` with a conservative
//! finite-volume discretization in `x`:
//!
//! `L u_i = [A_{i+½}(u_{i+1} - u_i) - A_{i-½}(u_i - u_{i-1})] / (h V_i)`,
//! `V_i = A(x_i) h`, and the axis cell `V_0 = A(h/2)(h/2)/(1+α₀)`.
//!
//! The `V`-weighted sum of `u` is invariant under the march, so kernel
//! masses are exact up to rounding.

use crate::error::{Error, Result};
use crate::measure::GridMeasure;
use crate::model::{transmutation, Family, SturmLiouvilleModel};
use crate::quad::cumulative;
use rayon::prelude::*;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMethod {
    ClosedForm,
    Marched,
    /// Marching of the transmuted problem, rescaled by `B(t)/(B(x)B(y))`.
    Transmutation,
}

impl KernelMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelMethod::ClosedForm => "closed-form",
            KernelMethod::Marched => "marched",
            KernelMethod::Transmutation => "transmutation",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "closed-form" => Ok(KernelMethod::ClosedForm),
            "marched" => Ok(KernelMethod::Marched),
            "transmutation" => Ok(KernelMethod::Transmutation),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown kernel method '{s}'"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KernelOptions {
    pub h: f64,
    /// `None` picks the closed form when the model has one.
    pub method: Option<KernelMethod>,
    /// Also compute the kernel at `h/2` and report the TV difference.
    pub refinement_check: bool,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            h: 1e-3,
            method: None,
            refinement_check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Refinement {
    pub h: f64,
    pub h_half: f64,
    pub tv_difference: f64,
}

/// Density of `δ_x ⋆ δ_y`, stored as nodal masses on a lattice.
#[derive(Debug, Clone)]
pub struct TranslationKernel {
    pub x: f64,
    pub y: f64,
    pub support: (f64, f64),
    pub method: KernelMethod,
    pub measure: GridMeasure,
    pub refinement: Option<Refinement>,
}

fn naimark_density(x: f64, y: f64, t: f64) -> f64 {
    if t < (x - y).abs() || t > x + y {
        0.0
    } else {
        t.sinh() / (2.0 * x.sinh() * y.sinh())
    }
}

impl TranslationKernel {
    /// Kernel value at `t`: the exact formula for closed-form kernels, the
    /// piecewise-linear lattice density otherwise.
    pub fn density_at(&self, t: f64) -> f64 {
        match self.method {
            KernelMethod::ClosedForm => naimark_density(self.x, self.y, t),
            _ => self.measure.density_at(t),
        }
    }

    pub fn mass(&self) -> f64 {
        self.measure.mass()
    }

    /// CSV `t,k` over the lattice nodes.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,k\n");
        let h = self.measure.step();
        for (t, m) in self.measure.nodes() {
            let v = match self.method {
                KernelMethod::ClosedForm => naimark_density(self.x, self.y, t),
                _ => m / h,
            };
            let _ = writeln!(s, "{:.16e},{:.16e}", t, v);
        }
        s
    }
}

/// Exact cell masses of the Naimark kernel on the lattice `k·h`.
fn naimark_measure(x: f64, y: f64, h: f64) -> GridMeasure {
    let c = 2.0 * x.sinh() * y.sinh();
    GridMeasure::from_cdf(|t| t.cosh() / c, (x - y).abs(), x + y, h)
}

pub fn kernel_density(model: &SturmLiouvilleModel, x: f64, y: f64, h: f64) -> Result<TranslationKernel> {
    kernel_density_with(
        model,
        x,
        y,
        KernelOptions {
            h,
            ..KernelOptions::default()
        },
    )
}

pub fn kernel_density_with(
    model: &SturmLiouvilleModel,
    x: f64,
    y: f64,
    opts: KernelOptions,
) -> Result<TranslationKernel> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("kernel needs x, y > 0, got ({x}, {y})")));
    }
    if !(opts.h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {}", opts.h)));
    }
    let closed = model.is_closed_form_kernel();
    let method = match opts.method {
        Some(KernelMethod::ClosedForm) if !closed => {
            return Err(Error::Domain(format!("{model} has no closed-form kernel")))
        }
        Some(m) => m,
        None if closed => KernelMethod::ClosedForm,
        None => KernelMethod::Marched,
    };
    let build = |h: f64| -> Result<GridMeasure> {
        match method {
            KernelMethod::ClosedForm => Ok(naimark_measure(x, y, h)),
            KernelMethod::Marched => Ok(marched_kernel(model, x, y, h)?.fold_into((x - y).abs(), x + y, 0.5 * h)),
            KernelMethod::Transmutation => Ok(transmuted_kernel(model, x, y, h)?.fold_into((x - y).abs(), x + y, 0.5 * h)),
        }
    };
    let measure = build(opts.h)?;
    let refinement = if opts.refinement_check {
        let fine = build(0.5 * opts.h)?;
        Some(Refinement {
            h: opts.h,
            h_half: 0.5 * opts.h,
            tv_difference: crate::measure::tv_distance(&measure, &fine),
        })
    } else {
        None
    };
    Ok(TranslationKernel {
        x,
        y,
        support: ((x - y).abs(), x + y),
        method,
        measure,
        refinement,
    })
}

/// Finite-volume lattice on the global nodes `lo..lo+n` of step `h`.
struct Lattice {
    h: f64,
    lo: usize,
    /// Cell volumes, relative to `A(x_ref)`.
    v: Vec<f64>,
    /// `A` at the interfaces `i + ½`, relative to `A(x_ref)`.
    ah: Vec<f64>,
}

impl Lattice {
    fn new(model: &SturmLiouvilleModel, h: f64, lo: usize, n: usize) -> Self {
        let x_ref = (lo + n / 2) as f64 * h;
        let lref = model.log_a(x_ref.max(h));
        let v = (0..n)
            .map(|i| {
                let g = lo + i;
                if g == 0 {
                    (model.log_a(0.5 * h) - lref).exp() * 0.5 * h / (1.0 + model.alpha0())
                } else {
                    (model.log_a(g as f64 * h) - lref).exp() * h
                }
            })
            .collect();
        let ah = (0..n.saturating_sub(1))
            .map(|i| (model.log_a((lo + i) as f64 * h + 0.5 * h) - lref).exp())
            .collect();
        Lattice { h, lo, v, ah }
    }

    fn x(&self, i: usize) -> f64 {
        (self.lo + i) as f64 * self.h
    }

    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let inv_h = 1.0 / self.h;
        for i in 0..n {
            let right = if i + 1 < n { self.ah[i] * (u[i + 1] - u[i]) } else { 0.0 };
            let left = if i > 0 { self.ah[i - 1] * (u[i] - u[i - 1]) } else { 0.0 };
            out[i] = (right - left) * inv_h / self.v[i];
        }
    }

    /// Gershgorin bound on the spectral radius of `L`.
    fn spectral_bound(&self) -> f64 {
        let n = self.v.len();
        (0..n)
            .map(|i| {
                let r = if i + 1 < n { self.ah[i] } else { 0.0 };
                let l = if i > 0 { self.ah[i - 1] } else { 0.0 };
                2.0 * (r + l) / (self.h * self.v[i])
            })
            .fold(0.0, f64::max)
    }
}

/// Zeroth-order term added to `L` in the transmuted march: `(q(y) - q(x_i)) w`.
struct Potential<'a> {
    q_y: &'a dyn Fn(f64) -> f64,
    q_x: Vec<f64>,
}

/// Marches `u_yy + (A'(y)/A(y)) u_y = L u (+ potential)` for `steps` steps of
/// size `k` from `u(·,0) = u0`, `u_y(·,0) = 0`.
fn march(
    lat: &Lattice,
    y_model: &SturmLiouvilleModel,
    u0: Vec<f64>,
    k: f64,
    steps: usize,
    potential: Option<&Potential<'_>>,
) -> Vec<f64> {
    let n = u0.len();
    let mut lu = vec![0.0; n];
    let apply = |u: &[f64], y: f64, out: &mut [f64]| {
        lat.apply(u, out);
        if let Some(p) = potential {
            let qy = (p.q_y)(y);
            for i in 0..n {
                out[i] += (qy - p.q_x[i]) * u[i];
            }
        }
    };
    apply(&u0, 0.0, &mut lu);
    let c0 = k * k / (2.0 * (1.0 + y_model.alpha0()));
    let mut prev = u0;
    let mut cur: Vec<f64> = prev.iter().zip(&lu).map(|(u, l)| u + c0 * l).collect();
    let mut next = vec![0.0; n];
    for step in 1..steps {
        let y = step as f64 * k;
        let lp = y_model.log_a(y + 0.5 * k);
        let am = (y_model.log_a(y - 0.5 * k) - lp).exp();
        let a0 = (y_model.log_a(y) - lp).exp() * k * k;
        apply(&cur, y, &mut lu);
        for i in 0..n {
            next[i] = cur[i] + am * (cur[i] - prev[i]) + a0 * lu[i];
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Initial nodal masses of a normalized hat with weights (¼, ½, ¼) at
/// `p - 1, p, p + 1` (in units of the step), split linearly onto nodes.
/// Returns `(first global node, masses)`.
fn hat_masses(p: f64) -> (usize, [f64; 4]) {
    let j = p.floor();
    let f = p - j;
    let j = j as usize;
    (
        j - 1,
        [
            0.25 * (1.0 - f),
            0.25 * f + 0.5 * (1.0 - f),
            0.5 * f + 0.25 * (1.0 - f),
            0.25 * f,
        ],
    )
}

/// Marching geometry: march in the smaller variable with `k = h_x`.
struct Geometry {
    x_large: f64,
    steps: usize,
    he: f64,
    lo: usize,
    n: usize,
    hat_first: usize,
    hat: [f64; 4],
}

fn geometry(x: f64, y: f64, h: f64) -> Result<Geometry> {
    let (x_large, y_small) = (x.max(y), x.min(y));
    let steps = (y_small / h).round() as usize;
    if steps < 1 {
        return Err(Error::Resolution(format!(
            "step {h} is too coarse for a kernel with min(x, y) = {y_small}"
        )));
    }
    let he = y_small / steps as f64;
    let p = x_large / he;
    let (hat_first, hat) = hat_masses(p);
    let lo = (hat_first as i64 - steps as i64 - 2).max(0) as usize;
    let hi = hat_first + 3 + steps + 2;
    Ok(Geometry {
        x_large,
        steps,
        he,
        lo,
        n: hi - lo + 1,
        hat_first,
        hat,
    })
}

fn marched_kernel(model: &SturmLiouvilleModel, x: f64, y: f64, h: f64) -> Result<GridMeasure> {
    let g = geometry(x, y, h)?;
    let lat = Lattice::new(model, g.he, g.lo, g.n);
    let mut u0 = vec![0.0; g.n];
    for (i, m) in g.hat.iter().enumerate() {
        let idx = g.hat_first + i - g.lo;
        u0[idx] = m / lat.v[idx];
    }
    let u = march(&lat, model, u0, g.he, g.steps, None);
    let masses: Vec<f64> = u.iter().zip(&lat.v).map(|(u, v)| u * v).collect();
    debug_assert!(g.x_large > 0.0);
    Ok(GridMeasure::from_nodal_masses(g.lo as i64, g.he, &masses))
}

/// Cross-check route: `w = B(x)B(y)u` solves the Bessel-Kingman problem
/// with potential `q(y) - q(x)`.
fn transmuted_kernel(model: &SturmLiouvilleModel, x: f64, y: f64, h: f64) -> Result<GridMeasure> {
    let g = geometry(x, y, h)?;
    let td = transmutation(model)?;
    let bk = SturmLiouvilleModel::bessel_kingman(model.alpha0())?;
    let lat_bk = Lattice::new(&bk, g.he, g.lo, g.n);
    let lat = Lattice::new(model, g.he, g.lo, g.n);

    // B at the lattice nodes by accumulated quadrature of β.
    let b_nodes: Vec<f64> = if matches!(model.family(), Family::BesselKingman { .. }) {
        vec![1.0; g.n]
    } else {
        let top = g.lo + g.n - 1;
        let cum = cumulative(|t| model.beta(t), 0.0, g.he, top, 1e-10)?;
        (0..g.n).map(|i| (0.5 * cum[g.lo + i]).exp()).collect()
    };
    let b_y = td.b(g.steps as f64 * g.he)?;

    let mut w0 = vec![0.0; g.n];
    for (i, m) in g.hat.iter().enumerate() {
        let idx = g.hat_first + i - g.lo;
        w0[idx] = m / lat.v[idx] * b_nodes[idx];
    }
    let q_x: Vec<f64> = (0..g.n).map(|i| td.q(lat.x(i))).collect();
    let q_y = |s: f64| td.q(s);
    let pot = Potential { q_y: &q_y, q_x };
    let w = march(&lat_bk, &bk, w0, g.he, g.steps, Some(&pot));
    let masses: Vec<f64> = (0..g.n)
        .map(|i| w[i] / (b_nodes[i] * b_y) * lat.v[i])
        .collect();
    Ok(GridMeasure::from_nodal_masses(g.lo as i64, g.he, &masses))
}

/// Sampling of a translation run.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicGrid {
    pub x_max: f64,
    pub h_x: f64,
    /// Requested `y` step; defaults to `0.8·h_x` and is reduced further if
    /// the axis cell requires it.
    pub h_y: Option<f64>,
}

impl HyperbolicGrid {
    pub fn new(x_max: f64, h_x: f64) -> Self {
        HyperbolicGrid { x_max, h_x, h_y: None }
    }
}

/// `T_y f` sampled at `x = k·h_x` for `x ≤ x_max - y`.
#[derive(Debug, Clone)]
pub struct TranslatedFunction {
    pub y: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub values: Vec<f64>,
}

impl TranslatedFunction {
    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.h_x
    }

    /// Linear interpolation.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.values.len();
        let s = (x / self.h_x).clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n.saturating_sub(2));
        if n < 2 {
            return self.values[0];
        }
        let f = s - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{:.16e},{:.16e}", self.x(k), v);
        }
        s
    }
}

pub fn translate_function<F: Fn(f64) -> f64>(
    model: &SturmLiouvilleModel,
    f: F,
    y: f64,
    grid: HyperbolicGrid,
) -> Result<TranslatedFunction> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("translation needs y > 0, got {y}")));
    }
    let h = grid.h_x;
    if !(h > 0.0) {
        return Err(Error::Domain(format!("h_x must be positive, got {h}")));
    }
    let requested = grid.h_y.unwrap_or(0.8 * h);
    if requested > h {
        return Err(Error::Stability(format!("h_y = {requested} exceeds h_x = {h}")));
    }
    if !(grid.x_max > y) {
        return Err(Error::Window(format!(
            "x_max = {} must exceed y = {y} (propagation speed 1)",
            grid.x_max
        )));
    }
    let n = (grid.x_max / h).round() as usize + 1;
    let lat = Lattice::new(model, h, 0, n);
    let k_stable = 0.95 * 2.0 / lat.spectral_bound().sqrt();
    let k_max = requested.min(k_stable);
    let steps = (y / k_max).ceil().max(1.0) as usize;
    let k = y / steps as f64;
    let u0: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("f is not finite on the sampling window".into()));
    }
    let u = march(&lat, model, u0, k, steps, None);
    let valid = (((grid.x_max - y) / h) + 1e-9).floor() as usize + 1;
    Ok(TranslatedFunction {
        y,
        h_x: h,
        h_y: k,
        values: u[..valid.min(n)].to_vec(),
    })
}

/// Point masses of a measure on `[0, ∞)`: `(mass at 0, positive points)`.
fn split_points(mu: &GridMeasure, h: f64) -> Result<(f64, Vec<(f64, f64)>)> {
    let mut zero = 0.0;
    let mut pts = Vec::new();
    let eps = 1e-9 * mu.step().min(h);
    let mut push = |p: f64, m: f64| -> Result<()> {
        if m == 0.0 {
            return Ok(());
        }
        if p < -eps {
            return Err(Error::Domain(format!("hypergroup measures live on [0, ∞); found mass at {p}")));
        }
        if p.abs() <= eps {
            zero += m;
        } else if p < h {
            log::warn!("mass at {p} is below the kernel resolution {h}; moved to {h}");
            pts.push((h, m));
        } else {
            pts.push((p, m));
        }
        Ok(())
    };
    for &(p, m) in mu.atoms() {
        push(p, m)?;
    }
    for (t, m) in mu.nodes() {
        push(t, m)?;
    }
    Ok((zero, pts))
}

/// The measure with its mass at 0 removed.
fn without_origin(mu: &GridMeasure, h: f64) -> Result<GridMeasure> {
    let (zero, _) = split_points(mu, h)?;
    if zero == 0.0 {
        return Ok(mu.clone());
    }
    let eps = 1e-9 * mu.step().min(h);
    let atoms: Vec<(f64, f64)> = mu.atoms().iter().copied().filter(|a| a.0.abs() > eps).collect();
    let masses: Vec<f64> = mu
        .nodes()
        .map(|(t, m)| if t.abs() <= eps { 0.0 } else { m })
        .collect();
    let mut out = GridMeasure::from_nodal_masses_at(mu.origin(), mu.step(), &masses);
    if mu.density().is_empty() {
        out = GridMeasure::zero(mu.step());
    }
    Ok(out.add(&GridMeasure::new(atoms, 0.0, mu.step(), vec![])?))
}

/// Hypergroup convolution `μ ⋆ ν` with kernels on the lattice `k·h`.
pub fn convolve_h(model: &SturmLiouvilleModel, mu: &GridMeasure, nu: &GridMeasure, h: f64) -> Result<GridMeasure> {
    let (z_mu, p_mu) = split_points(mu, h)?;
    let (z_nu, p_nu) = split_points(nu, h)?;
    let mut result = GridMeasure::atom(0.0, z_mu * z_nu, h);
    if z_mu != 0.0 {
        result = result.add(&without_origin(nu, h)?.scale(z_mu));
    }
    if z_nu != 0.0 {
        result = result.add(&without_origin(mu, h)?.scale(z_nu));
    }
    if p_mu.is_empty() || p_nu.is_empty() {
        return Ok(result);
    }
    let max_mu = p_mu.iter().map(|p| p.0).fold(0.0, f64::max);
    let max_nu = p_nu.iter().map(|p| p.0).fold(0.0, f64::max);
    let len = ((max_mu + max_nu) / h).ceil() as usize + 4;
    let pairs: Vec<((f64, f64), (f64, f64))> = p_mu
        .iter()
        .flat_map(|&a| p_nu.iter().map(move |&b| (a, b)))
        .collect();
    let opts = KernelOptions {
        h,
        ..KernelOptions::default()
    };
    let acc = pairs
        .par_iter()
        .try_fold(
            || vec![0.0; len],
            |mut acc, &((x, m), (y, w))| -> Result<Vec<f64>> {
                let k = kernel_density_with(model, x, y, opts)?;
                let meas = if k.measure.step() == h {
                    k.measure
                } else {
                    k.measure.resample(0.0, h)
                };
                let first = (meas.origin() / h).round() as i64;
                for (i, km) in meas.nodal_masses().into_iter().enumerate() {
                    if km != 0.0 {
                        let idx = first + i as i64;
                        if idx < 0 || idx as usize >= len {
                            return Err(Error::Window("kernel mass outside the result window".into()));
                        }
                        acc[idx as usize] += m * w * km;
                    }
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0.0; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    Ok(result.add(&GridMeasure::from_nodal_masses(0, h, &acc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{pair, tv_distance};
    use approx::assert_abs_diff_eq;

    #[test]
    fn naimark_closed_form_examples() {
        let m = SturmLiouvilleModel::naimark();
        let k = kernel_density(&m, 1.0, 2.0, 1e-3).unwrap();
        assert_eq!(k.method, KernelMethod::ClosedForm);
        let oracle = 2f64.sinh() / (2.0 * 1f64.sinh() * 2f64.sinh());
        assert_abs_diff_eq!(k.density_at(2.0), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(k.density_at(2.0), 0.425459, epsilon = 1e-6);
        assert_abs_diff_eq!(k.mass(), 1.0, epsilon = 1e-10);
        assert_eq!(k.density_at(0.99), 0.0);
        assert_eq!(k.density_at(3.01), 0.0);
        let (lo, hi) = k.measure.support().unwrap();
        assert!(lo >= 1.0 - 1e-9 && hi <= 3.0 + 1e-9);
    }

    #[test]
    fn marched_naimark_close_to_closed_form() {
        let m = SturmLiouvilleModel::naimark();
        let opts = |meth| KernelOptions {
            h: 2e-3,
            method: Some(meth),
            refinement_check: false,
        };
        let exact = kernel_density_with(&m, 1.0, 2.0, opts(KernelMethod::ClosedForm)).unwrap();
        let k = kernel_density_with(&m, 1.0, 2.0, opts(KernelMethod::Marched)).unwrap();
        assert_abs_diff_eq!(k.mass(), 1.0, epsilon = 1e-12);
        assert!(k.measure.min_density() >= -1e-12);
        let d = tv_distance(&k.measure, &exact.measure);
        assert!(d < 5e-3, "L1 = {d}");
    }

    #[test]
    fn transmutation_route_agrees() {
        let m = SturmLiouvilleModel::naimark();
        let opts = |meth| KernelOptions {
            h: 2e-3,
            method: Some(meth),
            refinement_check: false,
        };
        let exact = kernel_density_with(&m, 1.0, 2.0, opts(KernelMethod::ClosedForm)).unwrap();
        let k = kernel_density_with(&m, 1.0, 2.0, opts(KernelMethod::Transmutation)).unwrap();
        let d = tv_distance(&k.measure, &exact.measure);
        assert!(d < 2e-2, "L1 = {d}");
    }

    #[test]
    fn marched_kernel_is_symmetric_and_supported() {
        let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
        let a = kernel_density(&m, 1.0, 2.0, 2e-3).unwrap();
        let b = kernel_density(&m, 2.0, 1.0, 2e-3).unwrap();
        assert!(tv_distance(&a.measure, &b.measure) < 1e-12);
        let (lo, hi) = a.measure.support().unwrap();
        assert!(lo >= 1.0 - 2e-3 - 1e-9 && hi <= 3.0 + 2e-3 + 1e-9, "{lo} {hi}");
    }

    #[test]
    fn off_lattice_kernel_keeps_mass() {
        let m = SturmLiouvilleModel::bessel_kingman(1.5).unwrap();
        let k = kernel_density(&m, 0.7371, 1.2345, 1e-3).unwrap();
        assert_abs_diff_eq!(k.mass(), 1.0, epsilon = 1e-10);
        assert!(k.measure.min_density() >= -1e-8);
    }

    #[test]
    fn resolution_error() {
        let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
        assert!(matches!(kernel_density(&m, 1.0, 1e-4, 1e-3), Err(Error::Resolution(_))));
        assert!(matches!(kernel_density(&m, 0.0, 1.0, 1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn translate_constant_and_exponential() {
        let m = SturmLiouvilleModel::naimark();
        let g = HyperbolicGrid::new(4.0, 1e-3);
        let one = translate_function(&m, |_| 1.0, 1.0, g).unwrap();
        assert!(one.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let t = translate_function(&m, |t: f64| (-t).exp(), 1.0, g).unwrap();
        // ∫₀² sinh(t) e^{-t} dt / (2 sinh² 1)
        let oracle = (1.0 + (-4f64).exp() / 4.0 - 0.25) / (2.0 * 1f64.sinh().powi(2));
        assert_abs_diff_eq!(t.value_at(1.0), oracle, epsilon = 1e-5);
        assert_abs_diff_eq!(t.value_at(1.0), 0.273181, epsilon = 1e-5);
    }

    #[test]
    fn translate_errors() {
        let m = SturmLiouvilleModel::naimark();
        let g = HyperbolicGrid {
            x_max: 4.0,
            h_x: 1e-3,
            h_y: Some(2e-3),
        };
        assert!(matches!(translate_function(&m, |_| 1.0, 1.0, g), Err(Error::Stability(_))));
        let g = HyperbolicGrid::new(1.0, 1e-3);
        assert!(matches!(translate_function(&m, |_| 1.0, 2.0, g), Err(Error::Window(_))));
    }

    #[test]
    fn convolve_h_examples() {
        let m = SturmLiouvilleModel::naimark();
        let h = 1e-3;
        let nu = GridMeasure::new(vec![(1.5, 0.3), (0.5, 0.7)], 0.0, h, vec![]).unwrap();
        let r = convolve_h(&m, &GridMeasure::dirac(0.0), &nu, h).unwrap();
        assert_eq!(r.atoms(), nu.atoms());
        let r = convolve_h(&m, &GridMeasure::dirac(1.0), &GridMeasure::dirac(1.0), h).unwrap();
        assert_abs_diff_eq!(r.mass(), 1.0, epsilon = 1e-10);
        let f = |t: f64| (-t * t).exp();
        let oracle = crate::quad::adaptive_simpson(|t| f(t) * t.sinh() / (2.0 * 1f64.sinh().powi(2)), 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(pair(&r, f), oracle, epsilon = 1e-6);
        let mu = GridMeasure::new(vec![(1.2, 0.4), (0.3, 0.6)], 0.0, h, vec![]).unwrap();
        let ab = convolve_h(&m, &mu, &nu, h).unwrap();
        let ba = convolve_h(&m, &nu, &mu, h).unwrap();
        assert!(tv_distance(&ab, &ba) < 1e-12);
        assert_abs_diff_eq!(ab.mass(), 1.0, epsilon = 1e-10);
    }
}
