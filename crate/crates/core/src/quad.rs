//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_LEVEL: u32 = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut budget = 2_000_000usize;
    let v = recurse(&f, a, b, fa, fm, fb, whole, tol, 0, &mut budget);
    if !v.is_finite() {
        return Err(Error::NonConvergence(format!(
            "adaptive Simpson on [{a}, {b}] produced a non-finite value"
        )));
    }
    if budget == 0 {
        return Err(Error::NonConvergence(format!(
            "adaptive Simpson on [{a}, {b}] exhausted its evaluation budget (tol {tol:e})"
        )));
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    level: u32,
    budget: &mut usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if *budget == 0 {
        return left + right;
    }
    *budget -= 1;
    if level >= MAX_LEVEL || delta.abs() <= 15.0 * tol || !delta.is_finite() {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, level + 1, budget)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, level + 1, budget)
}

/// Cumulative integrals `I[k] = ∫_{x0}^{x0 + k h} f` for `k = 0..=n`.
pub fn cumulative<F: Fn(f64) -> f64>(f: F, x0: f64, h: f64, n: usize, tol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    let cell_tol = tol / (n.max(1) as f64);
    for k in 0..n {
        let a = x0 + k as f64 * h;
        acc += adaptive_simpson(&f, a, a + h, cell_tol)?;
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|x| x.exp(), -1.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0 * 1f64.sinh()).abs() < 1e-11);
    }

    #[test]
    fn handles_integrable_endpoint_singularity() {
        let v = adaptive_simpson(|x: f64| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0, 1.0, 1e-8)
            .unwrap();
        assert!((v - 2.0).abs() < 1e-4);
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let c = cumulative(|x| 3.0 * x * x, 0.0, 0.1, 10, 1e-12).unwrap();
        for (k, v) in c.iter().enumerate() {
            let x = 0.1 * k as f64;
            assert!((v - x.powi(3)).abs() < 1e-12);
        }
    }
}
