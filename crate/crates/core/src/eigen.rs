//! Eigenfunctions `φ_λ` of `L f = -f'' - (A'/A) f'` and the c-function.

use crate::error::{Error, Result};
use crate::model::{validate_model, GrowthClass, SturmLiouvilleModel, ValidationGrid};
use num_complex::Complex64;
use std::fmt::Write as _;

const RANGE_LIMIT: f64 = 1e300;

/// Integration settings for [`phi_lambda_with`].
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// End of the series startup interval.
    pub x_start: f64,
    pub rtol: f64,
    /// Absolute tolerance, scaled by `e^{-ρx}` so that decaying solutions
    /// keep their relative accuracy.
    pub atol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            x_start: 1e-2,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub lambda: Complex64,
    pub x_max: f64,
    pub grid_step: f64,
    pub phi: Vec<Complex64>,
    pub phi_prime: Vec<Complex64>,
}

impl EigenSolution {
    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.grid_step
    }

    /// Cubic Hermite interpolation between grid points.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let n = self.phi.len();
        let s = (x / self.grid_step).clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n.saturating_sub(2));
        if n < 2 {
            return self.phi[0];
        }
        let u = s - k as f64;
        let h = self.grid_step;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        self.phi[k] * h00 + self.phi_prime[k] * (h10 * h) + self.phi[k + 1] * h01 + self.phi_prime[k + 1] * (h11 * h)
    }

    /// CSV `x,re_phi,im_phi`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re_phi,im_phi\n");
        for (k, p) in self.phi.iter().enumerate() {
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", self.x(k), p.re, p.im);
        }
        s
    }
}

/// Frobenius expansion `1 + c₂x² + c₄x⁴` and its derivative.
fn frobenius(model: &SturmLiouvilleModel, mu: Complex64, x: f64) -> (Complex64, Complex64) {
    let a0 = model.alpha0();
    let b1 = model.beta_slope_at_zero();
    let c2 = -mu / (2.0 * (1.0 + a0));
    let c4 = -c2 * (2.0 * b1 + mu) / (4.0 * (3.0 + a0));
    let x2 = x * x;
    (
        Complex64::new(1.0, 0.0) + c2 * x2 + c4 * x2 * x2,
        c2 * (2.0 * x) + c4 * (4.0 * x2 * x),
    )
}

type State = [Complex64; 2];

fn rhs(model: &SturmLiouvilleModel, mu: Complex64, x: f64, y: &State) -> State {
    [y[1], -y[1] * model.log_deriv(x) - mu * y[0]]
}

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (c * h);
        out[1] += k[1] * (c * h);
    }
    out
}

/// Dormand-Prince 5(4) from `x0` to `x1` with adaptive steps.
struct Stepper<'a> {
    model: &'a SturmLiouvilleModel,
    mu: Complex64,
    opts: EigenOptions,
    h: f64,
}

impl Stepper<'_> {
    fn advance(&mut self, mut x: f64, x1: f64, mut y: State) -> Result<State> {
        const C2: f64 = 1.0 / 5.0;
        const C3: f64 = 3.0 / 10.0;
        const C4: f64 = 4.0 / 5.0;
        const C5: f64 = 8.0 / 9.0;
        const A21: f64 = 1.0 / 5.0;
        const A31: f64 = 3.0 / 40.0;
        const A32: f64 = 9.0 / 40.0;
        const A41: f64 = 44.0 / 45.0;
        const A42: f64 = -56.0 / 15.0;
        const A43: f64 = 32.0 / 9.0;
        const A51: f64 = 19372.0 / 6561.0;
        const A52: f64 = -25360.0 / 2187.0;
        const A53: f64 = 64448.0 / 6561.0;
        const A54: f64 = -212.0 / 729.0;
        const A61: f64 = 9017.0 / 3168.0;
        const A62: f64 = -355.0 / 33.0;
        const A63: f64 = 46732.0 / 5247.0;
        const A64: f64 = 49.0 / 176.0;
        const A65: f64 = -5103.0 / 18656.0;
        const B1: f64 = 35.0 / 384.0;
        const B3: f64 = 500.0 / 1113.0;
        const B4: f64 = 125.0 / 192.0;
        const B5: f64 = -2187.0 / 6784.0;
        const B6: f64 = 11.0 / 84.0;
        const E1: f64 = 71.0 / 57600.0;
        const E3: f64 = -71.0 / 16695.0;
        const E4: f64 = 71.0 / 1920.0;
        const E5: f64 = -17253.0 / 339200.0;
        const E6: f64 = 22.0 / 525.0;
        const E7: f64 = -1.0 / 40.0;

        let f = |x: f64, y: &State| rhs(self.model, self.mu, x, y);
        let mut k1 = f(x, &y);
        let mut guard = 0usize;
        while x < x1 {
            guard += 1;
            if guard > 50_000_000 {
                return Err(Error::NonConvergence("eigenfunction integrator step budget exhausted".into()));
            }
            let last = x + self.h >= x1;
            let h = if last { x1 - x } else { self.h };
            let k2 = f(x + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(x + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(x + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(x + C5 * h, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
            let k6 = f(
                x + h,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let k7 = f(x + h, &y_new);
            let zero: State = [Complex64::new(0.0, 0.0); 2];
            let err = axpy(
                &zero,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                h,
            );
            let env = (-self.model.rho() * (x + h)).exp();
            let mut norm: f64 = 0.0;
            for i in 0..2 {
                let scale = self.opts.atol * env + self.opts.rtol * y[i].norm().max(y_new[i].norm());
                norm = norm.max(err[i].norm() / scale);
            }
            if !norm.is_finite() {
                if y_new.iter().any(|v| !v.norm().is_finite()) {
                    return Err(Error::Range(format!("φ overflowed near x = {x}")));
                }
                self.h *= 0.1;
                continue;
            }
            if norm <= 1.0 {
                x = if last { x1 } else { x + h };
                y = y_new;
                k1 = k7;
                if y[0].norm() > RANGE_LIMIT {
                    return Err(Error::Range(format!("|φ| exceeds {RANGE_LIMIT:e} at x = {x}")));
                }
            }
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if !(last && norm <= 1.0) {
                self.h = h * factor;
            }
            if self.h < 1e-14 * x.max(1.0) {
                return Err(Error::NonConvergence(format!("step size underflow at x = {x}")));
            }
        }
        Ok(y)
    }
}

/// `φ_λ` and `φ'_λ` at ascending points `xs ≥ 0`.
pub fn phi_at_points(
    model: &SturmLiouvilleModel,
    lambda: Complex64,
    xs: &[f64],
    opts: EigenOptions,
) -> Result<Vec<(Complex64, Complex64)>> {
    let rho = model.rho();
    let mu = lambda * lambda + rho * rho;
    let mut out = Vec::with_capacity(xs.len());
    let mut stepper = Stepper {
        model,
        mu,
        opts,
        h: opts.x_start * 0.1,
    };
    let mut state: Option<(f64, State)> = None;
    for &x in xs {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("φ_λ needs x ≥ 0, got {x}")));
        }
        if x <= opts.x_start {
            out.push(frobenius(model, mu, x));
            continue;
        }
        let (x0, y0) = match state {
            Some(s) => s,
            None => {
                let (p, dp) = frobenius(model, mu, opts.x_start);
                (opts.x_start, [p, dp])
            }
        };
        if x < x0 {
            return Err(Error::Domain("evaluation points must be ascending".into()));
        }
        let y = stepper.advance(x0, x, y0)?;
        out.push((y[0], y[1]));
        state = Some((x, y));
    }
    Ok(out)
}

pub fn phi_lambda(model: &SturmLiouvilleModel, lambda: Complex64, x_max: f64, h: f64) -> Result<EigenSolution> {
    phi_lambda_with(model, lambda, x_max, h, EigenOptions::default())
}

pub fn phi_lambda_with(
    model: &SturmLiouvilleModel,
    lambda: Complex64,
    x_max: f64,
    h: f64,
    opts: EigenOptions,
) -> Result<EigenSolution> {
    if !(x_max > 0.0 && h > 0.0) || !x_max.is_finite() {
        return Err(Error::Domain(format!("need x_max > 0 and h > 0, got {x_max}, {h}")));
    }
    let n = (x_max / h).round().max(1.0) as usize;
    let xs: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let vals = phi_at_points(model, lambda, &xs, opts)?;
    let (phi, phi_prime) = vals.into_iter().unzip();
    Ok(EigenSolution {
        lambda,
        x_max: n as f64 * h,
        grid_step: h,
        phi,
        phi_prime,
    })
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CEstimate {
    pub lambda: f64,
    #[serde(serialize_with = "ser_complex")]
    pub c_plus: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub c_minus: Complex64,
    pub residual: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// CSV `lambda,re_c,im_c,residual`.
pub fn c_table_csv(rows: &[CEstimate]) -> String {
    let mut s = String::from("lambda,re_c,im_c,residual\n");
    for r in rows {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", r.lambda, r.c_plus.re, r.c_plus.im, r.residual);
    }
    s
}

/// Tolerance on the fit residual.
pub const C_RESIDUAL_TOL: f64 = 1e-4;
const C_VALIDATION_X: f64 = 35.0;
const C_FIT_X: f64 = 30.0;

fn require_c_regime(model: &SturmLiouvilleModel) -> Result<()> {
    if model.rho() <= 0.0 {
        return Err(Error::Regime(format!(
            "c-function extraction needs ρ > 0; {model} has ρ = {}",
            model.rho()
        )));
    }
    let report = validate_model(model, ValidationGrid::default());
    if report.growth != GrowthClass::ExponentialNormalizable {
        return Err(Error::Regime(format!(
            "{model} is not exponential-normalizable (class {})",
            report.growth.as_str()
        )));
    }
    Ok(())
}

/// Default fit points `(30, 30 + π/(4λ))`.
pub fn default_x_fit(lambda: f64) -> (f64, f64) {
    (C_FIT_X, C_FIT_X + std::f64::consts::PI / (4.0 * lambda.abs()))
}

/// Fits `e^{ρx}φ_λ(x) = c(λ)e^{iλx} + c(-λ)e^{-iλx}` at two points and
/// checks the fit at `x = 35`.
pub fn c_function(model: &SturmLiouvilleModel, lambda: f64, x_fit: Option<(f64, f64)>) -> Result<CEstimate> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("c-function needs real λ ≠ 0, got {lambda}")));
    }
    require_c_regime(model)?;
    let (x1, x2) = x_fit.unwrap_or_else(|| default_x_fit(lambda));
    let (x1, x2) = (x1.min(x2), x1.max(x2));
    let s = (lambda * (x2 - x1)).sin();
    if s.abs() < 0.1 {
        return Err(Error::Conditioning(format!(
            "fit points {x1}, {x2} are nearly a multiple of π/λ apart (|sin(λΔ)| = {:.3e})",
            s.abs()
        )));
    }
    let rho = model.rho();
    let mut pts = vec![x1, x2, C_VALIDATION_X];
    pts.sort_by(f64::total_cmp);
    let vals = phi_at_points(model, Complex64::new(lambda, 0.0), &pts, EigenOptions::default())?;
    let psi = |x: f64| {
        let k = pts.iter().position(|&p| p == x).unwrap();
        vals[k].0 * (rho * x).exp()
    };
    let i = Complex64::new(0.0, 1.0);
    let e = |x: f64, sign: f64| (i * (sign * lambda * x)).exp();
    // [e^{iλx1} e^{-iλx1}; e^{iλx2} e^{-iλx2}] [c+; c-] = [ψ1; ψ2]
    let (a, b, c, d) = (e(x1, 1.0), e(x1, -1.0), e(x2, 1.0), e(x2, -1.0));
    let det = a * d - b * c;
    let (p1, p2) = (psi(x1), psi(x2));
    let c_plus = (p1 * d - b * p2) / det;
    let c_minus = (a * p2 - c * p1) / det;
    let xv = C_VALIDATION_X;
    let residual = (psi(xv) - (c_plus * e(xv, 1.0) + c_minus * e(xv, -1.0))).norm();
    if residual > C_RESIDUAL_TOL {
        return Err(Error::NonAsymptotic(format!(
            "c-function fit residual {residual:.3e} at x = {xv} exceeds {C_RESIDUAL_TOL:e}"
        )));
    }
    Ok(CEstimate {
        lambda,
        c_plus,
        c_minus,
        residual,
    })
}

/// `c(-λ - iρ)` for real λ, read off as `e^{iλx}φ_{-λ-iρ}(x)` at `x = 30`.
/// The returned residual is the change of that quantity between 30 and 35.
pub fn c_continued(model: &SturmLiouvilleModel, lambda: f64) -> Result<(Complex64, f64)> {
    require_c_regime(model)?;
    let rho = model.rho();
    let z = Complex64::new(-lambda, -rho);
    let vals = phi_at_points(model, z, &[C_FIT_X, C_VALIDATION_X], EigenOptions::default())?;
    let i = Complex64::new(0.0, 1.0);
    let at = |k: usize, x: f64| vals[k].0 * (i * lambda * x).exp();
    let v = at(0, C_FIT_X);
    let residual = (at(1, C_VALIDATION_X) - v).norm();
    if residual > C_RESIDUAL_TOL {
        return Err(Error::NonAsymptotic(format!(
            "continued c-function has not settled: change {residual:.3e} between x = 30 and 35"
        )));
    }
    Ok((v, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn naimark_closed_form() {
        let m = SturmLiouvilleModel::naimark();
        // sin(x)/sinh(x) solves φ'' + 2coth(x)φ' + 2φ = 0; residual by differences.
        let f = |x: f64| x.sin() / x.sinh();
        for x in [0.5, 1.0, 3.0] {
            let d = 1e-4;
            let f2 = (f(x + d) - 2.0 * f(x) + f(x - d)) / (d * d);
            let f1 = (f(x + d) - f(x - d)) / (2.0 * d);
            assert!((f2 + 2.0 / x.tanh() * f1 + 2.0 * f(x)).abs() < 1e-6);
        }
        let s = phi_lambda(&m, c(1.0, 0.0), 2.0, 0.01).unwrap();
        assert_abs_diff_eq!(s.phi[100].re, f(1.0), epsilon = 1e-9);
        assert_abs_diff_eq!(s.phi[100].re, 0.716023, epsilon = 1e-6);
        assert!(s.phi.iter().all(|p| p.im == 0.0));
        assert_eq!(s.phi[0], c(1.0, 0.0));
        assert_eq!(s.phi_prime[0], c(0.0, 0.0));
    }

    #[test]
    fn constant_at_i_rho() {
        for m in [
            SturmLiouvilleModel::naimark(),
            SturmLiouvilleModel::bessel_kingman(2.0).unwrap(),
            SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap(),
        ] {
            let s = phi_lambda(&m, c(0.0, m.rho()), 10.0, 0.05).unwrap();
            let sup = s.phi.iter().map(|p| (p - 1.0).norm()).fold(0.0, f64::max);
            assert!(sup < 1e-8, "{m}: {sup}");
        }
    }

    #[test]
    fn bessel_kingman_matches_bessel_function() {
        // α₀ = 2: φ_λ(x) = sin(λx)/(λx).
        let m = SturmLiouvilleModel::bessel_kingman(2.0).unwrap();
        let s = phi_lambda(&m, c(2.0, 0.0), 5.0, 0.1).unwrap();
        for k in [1usize, 10, 37, 50] {
            let x = s.x(k);
            assert_abs_diff_eq!(s.phi[k].re, (2.0 * x).sin() / (2.0 * x), epsilon = 1e-8);
        }
    }

    #[test]
    fn decay_and_monotone_phi0() {
        let m = SturmLiouvilleModel::naimark();
        let v = phi_at_points(&m, c(1.0, 0.0), &[1.0, 30.0], EigenOptions::default()).unwrap();
        assert!(v[1].0.norm() < 1e-6 * v[0].0.norm());
        let s = phi_lambda(&m, c(0.0, 0.0), 20.0, 0.05).unwrap();
        for w in s.phi.windows(2) {
            assert!(w[1].re <= w[0].re);
        }
    }

    #[test]
    fn startup_consistency() {
        let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
        let o = EigenOptions::default();
        let a = phi_at_points(&m, c(1.3, 0.0), &[5.0], o).unwrap()[0].0;
        let b = phi_at_points(&m, c(1.3, 0.0), &[5.0], EigenOptions { x_start: 5e-3, ..o }).unwrap()[0].0;
        assert!((a - b).norm() < 1e-8 * a.norm());
    }

    #[test]
    fn range_error() {
        let m = SturmLiouvilleModel::naimark();
        let r = phi_lambda(&m, c(0.0, 40.0), 30.0, 0.1);
        assert!(matches!(r, Err(Error::Range(_))));
    }

    #[test]
    fn c_function_naimark() {
        let m = SturmLiouvilleModel::naimark();
        let e = c_function(&m, 1.0, None).unwrap();
        assert_abs_diff_eq!(e.c_plus.re, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(e.c_plus.im, -1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(e.c_minus.im, 1.0, epsilon = 1e-6);
        assert!(e.residual < 1e-4);
        let (v, _) = c_continued(&m, 1.0).unwrap();
        assert_abs_diff_eq!(v.re, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(v.im, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn c_function_errors() {
        let bk = SturmLiouvilleModel::bessel_kingman(2.0).unwrap();
        assert!(matches!(c_function(&bk, 1.0, None), Err(Error::Regime(_))));
        let m = SturmLiouvilleModel::naimark();
        let r = c_function(&m, 1.0, Some((30.0, 30.0 + std::f64::consts::PI)));
        assert!(matches!(r, Err(Error::Conditioning(_))));
        assert!(c_function(&m, 0.0, None).is_err());
    }

    #[test]
    fn jacobi_c_function_is_conjugate_symmetric() {
        let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
        let e = c_function(&m, 0.7, None).unwrap();
        assert!((e.c_minus - e.c_plus.conj()).norm() < 1e-9);
    }
}
