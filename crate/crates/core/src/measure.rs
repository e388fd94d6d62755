//! Signed measures on ℝ: finitely many atoms plus a density sampled on a
//! uniform lattice.
//!
//! The density is piecewise linear between lattice nodes. Every operation
//! works with nodal masses `h·w_k·d_k` (trapezoid weights, ½ at the two end
//! nodes), so that the mass seen by `mass`, `pair`, `tv_norm` and the
//! Fourier transform is the trapezoid integral of the density.
//! Measures produced by this module pad the density with zero end nodes,
//! making the end weights irrelevant.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::fmt::Write as _;

/// Default lattice step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default bound on the length of a density window produced by an operation.
pub const DEFAULT_MAX_EXTENT: f64 = 1e4;
/// Relative tolerance deciding whether two lattices are aligned.
const ALIGN_TOL: f64 = 1e-9;
/// Products of lengths beyond this use FFT convolution.
const DIRECT_CONV_LIMIT: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    atoms: Vec<(f64, f64)>,
    origin: f64,
    step: f64,
    density: Vec<f64>,
}

/// Step of the common lattice: the finer of the steps that carry a density.
fn common_step(a: &GridMeasure, b: &GridMeasure) -> f64 {
    match (a.density.is_empty(), b.density.is_empty()) {
        (false, false) => a.step.min(b.step),
        (false, true) => a.step,
        (true, false) => b.step,
        (true, true) => a.step.min(b.step),
    }
}

/// Index range of the nonzero entries.
fn nonzero_range(v: &[f64]) -> Option<(usize, usize)> {
    let lo = v.iter().position(|&x| x != 0.0)?;
    let hi = v.iter().rposition(|&x| x != 0.0)?;
    Some((lo, hi))
}

fn same_position(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn normalize_atoms(mut atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    atoms.retain(|&(_, m)| m != 0.0);
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (p, m) in atoms {
        match out.last_mut() {
            Some(last) if same_position(last.0, p) => last.1 += m,
            _ => out.push((p, m)),
        }
    }
    out.retain(|&(_, m)| m != 0.0);
    out
}

impl GridMeasure {
    /// Builds a measure from atoms and density samples at `origin + k·step`.
    /// Atoms at coinciding positions are merged.
    pub fn new(atoms: Vec<(f64, f64)>, origin: f64, step: f64, density: Vec<f64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Domain(format!("grid step must be positive, got {step}")));
        }
        if !origin.is_finite() {
            return Err(Error::Domain("grid origin must be finite".into()));
        }
        if atoms.iter().any(|(p, m)| !p.is_finite() || !m.is_finite()) {
            return Err(Error::Domain("atoms must have finite position and mass".into()));
        }
        if density.iter().any(|d| !d.is_finite()) {
            return Err(Error::Domain("density samples must be finite".into()));
        }
        Ok(GridMeasure {
            atoms: normalize_atoms(atoms),
            origin,
            step,
            density,
        })
    }

    /// The zero measure on a lattice with the given step.
    pub fn zero(step: f64) -> Self {
        GridMeasure {
            atoms: Vec::new(),
            origin: 0.0,
            step,
            density: Vec::new(),
        }
    }

    pub fn dirac(position: f64) -> Self {
        Self::atom(position, 1.0, DEFAULT_STEP)
    }

    pub fn atom(position: f64, mass: f64, step: f64) -> Self {
        GridMeasure {
            atoms: normalize_atoms(vec![(position, mass)]),
            origin: 0.0,
            step,
            density: Vec::new(),
        }
    }

    /// Measure with nodal masses `masses[k]` at `(first_index + k)·step`.
    pub fn from_nodal_masses(first_index: i64, step: f64, masses: &[f64]) -> Self {
        Self::from_nodal_masses_at(first_index as f64 * step, step, masses)
    }

    /// Measure with nodal masses at `origin + k·step`, padded by zero nodes.
    pub fn from_nodal_masses_at(origin: f64, step: f64, masses: &[f64]) -> Self {
        if masses.is_empty() {
            return Self::zero(step);
        }
        let mut density = Vec::with_capacity(masses.len() + 2);
        density.push(0.0);
        density.extend(masses.iter().map(|m| m / step));
        density.push(0.0);
        GridMeasure {
            atoms: Vec::new(),
            origin: origin - step,
            step,
            density,
        }
    }

    /// Density measure on `[a, b]` whose nodal masses are the exact masses of
    /// the dual cells `[t - h/2, t + h/2] ∩ [a, b]`, given a primitive `cdf`.
    /// The lattice is `k·step`.
    pub fn from_cdf<F: Fn(f64) -> f64>(cdf: F, a: f64, b: f64, step: f64) -> Self {
        let i_lo = (a / step).round() as i64;
        let i_hi = (b / step).round() as i64;
        let masses: Vec<f64> = (i_lo..=i_hi)
            .map(|i| {
                let t = i as f64 * step;
                let lo = (t - 0.5 * step).max(a);
                let hi = (t + 0.5 * step).min(b);
                if hi > lo {
                    cdf(hi) - cdf(lo)
                } else {
                    0.0
                }
            })
            .collect();
        Self::from_nodal_masses(i_lo, step, &masses)
    }

    /// Samples a density function at the lattice nodes `k·step` covering `[a, b]`.
    pub fn from_density_fn<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, step: f64) -> Self {
        let i_lo = (a / step).ceil() as i64;
        let i_hi = (b / step).floor() as i64;
        let density: Vec<f64> = (i_lo..=i_hi).map(|i| f(i as f64 * step)).collect();
        GridMeasure {
            atoms: Vec::new(),
            origin: i_lo as f64 * step,
            step,
            density,
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn node(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.step
    }

    /// Position and nodal mass of every lattice node.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let masses = self.nodal_masses();
        masses.into_iter().enumerate().map(move |(k, m)| (self.node(k), m))
    }

    pub fn nodal_masses(&self) -> Vec<f64> {
        let n = self.density.len();
        let h = self.step;
        self.density
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let w = if n > 1 && (k == 0 || k + 1 == n) { 0.5 } else { 1.0 };
                h * w * d
            })
            .collect()
    }

    /// Smallest interval containing the atoms and the density window.
    pub fn window(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if !self.density.is_empty() {
            lo = self.origin;
            hi = self.node(self.density.len() - 1);
        }
        for &(p, _) in &self.atoms {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Interval spanned by nonzero atoms and nonzero nodal masses.
    pub fn support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (t, m) in self.nodes() {
            if m != 0.0 {
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        for &(p, _) in &self.atoms {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.nodal_masses().iter().sum::<f64>()
    }

    pub fn tv_norm(&self) -> f64 {
        self.atoms.iter().map(|a| a.1.abs()).sum::<f64>()
            + self.nodal_masses().iter().map(|m| m.abs()).sum::<f64>()
    }

    /// Minimum density sample (0 for an empty density).
    pub fn min_density(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::min)
    }

    /// Piecewise-linear density value at `t` (0 outside the window).
    pub fn density_at(&self, t: f64) -> f64 {
        let n = self.density.len();
        if n == 0 {
            return 0.0;
        }
        let s = (t - self.origin) / self.step;
        if s < -1e-9 || s > (n - 1) as f64 + 1e-9 {
            return 0.0;
        }
        let s = s.clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n.saturating_sub(2));
        if n == 1 {
            return self.density[0];
        }
        let frac = s - k as f64;
        self.density[k] * (1.0 - frac) + self.density[k + 1] * frac
    }

    pub fn scale(&self, c: f64) -> Self {
        GridMeasure {
            atoms: normalize_atoms(self.atoms.iter().map(|&(p, m)| (p, c * m)).collect()),
            origin: self.origin,
            step: self.step,
            density: self.density.iter().map(|d| c * d).collect(),
        }
    }

    /// Whether `other`'s lattice nodes coincide with this lattice.
    fn aligned_with(&self, origin: f64, step: f64) -> bool {
        if (step - self.step).abs() > ALIGN_TOL * self.step {
            return false;
        }
        let off = (origin - self.origin) / self.step;
        (off - off.round()).abs() < ALIGN_TOL * off.abs().max(1.0)
    }

    /// Redistributes the density onto the lattice `origin + k·step` by
    /// integrating its piecewise-linear interpolant over the new dual cells.
    /// Atoms are untouched; mass is conserved.
    pub fn resample(&self, origin: f64, step: f64) -> Self {
        if self.aligned_with(origin, step) || self.density.is_empty() {
            let mut m = self.clone();
            if !self.density.is_empty() {
                // Snap the origin onto the requested lattice.
                let off = ((self.origin - origin) / step).round();
                m.origin = origin + off * step;
                m.step = step;
            }
            return m;
        }
        let canon = self.canonical();
        let n = canon.density.len();
        let h = canon.step;
        let d = &canon.density;
        // Cumulative trapezoid integral at the old nodes.
        let mut cum = vec![0.0; n];
        for k in 1..n {
            cum[k] = cum[k - 1] + 0.5 * h * (d[k - 1] + d[k]);
        }
        let prim = |t: f64| -> f64 {
            let s = (t - canon.origin) / h;
            if s <= 0.0 {
                return 0.0;
            }
            if s >= (n - 1) as f64 {
                return cum[n - 1];
            }
            let k = s.floor() as usize;
            let u = s - k as f64;
            cum[k] + h * (u * d[k] + 0.5 * u * u * (d[k + 1] - d[k]))
        };
        let lo = canon.origin;
        let hi = canon.node(n - 1);
        let j_lo = ((lo - origin) / step).floor() as i64 - 1;
        let j_hi = ((hi - origin) / step).ceil() as i64 + 1;
        let masses: Vec<f64> = (j_lo..=j_hi)
            .map(|j| {
                let t = origin + j as f64 * step;
                prim(t + 0.5 * step) - prim(t - 0.5 * step)
            })
            .collect();
        let mut out = Self::from_nodal_masses_at(origin + j_lo as f64 * step, step, &masses);
        out.atoms = self.atoms.clone();
        out
    }

    /// Same measure with zero end nodes and density `nodal mass / h`.
    fn canonical(&self) -> Self {
        let padded = self.density.len() >= 2
            && self.density[0] == 0.0
            && *self.density.last().unwrap() == 0.0;
        if padded || self.density.is_empty() {
            return self.clone();
        }
        let mut m = Self::from_nodal_masses_at(self.origin, self.step, &self.nodal_masses());
        m.atoms = self.atoms.clone();
        m
    }

    /// Translation by `a`: `δ_a ⋆_ℝ μ`.
    pub fn shift(&self, a: f64) -> Self {
        let mut m = self.clone();
        m.atoms = self.atoms.iter().map(|&(p, w)| (p + a, w)).collect();
        if self.density.is_empty() {
            return m;
        }
        m.origin = self.origin + a;
        let k = (m.origin / self.step).round();
        if (m.origin / self.step - k).abs() < ALIGN_TOL * k.abs().max(1.0) {
            m.origin = k * self.step;
            m
        } else {
            // Keep lattices of the form k·h so later operations stay aligned.
            let atoms = m.atoms.clone();
            m.atoms.clear();
            let mut r = m.resample(0.0, self.step);
            r.atoms = atoms;
            r
        }
    }

    /// Restriction to `[lo, hi]`; returns the cropped measure and the lost TV.
    pub fn crop(&self, lo: f64, hi: f64) -> (Self, f64) {
        let mut lost = 0.0;
        let mut atoms = Vec::new();
        for &(p, m) in &self.atoms {
            if p >= lo && p <= hi {
                atoms.push((p, m));
            } else {
                lost += m.abs();
            }
        }
        let masses = self.nodal_masses();
        let mut kept = Vec::new();
        let mut first: Option<usize> = None;
        for (k, &m) in masses.iter().enumerate() {
            let t = self.node(k);
            if t >= lo - 1e-6 * self.step && t <= hi + 1e-6 * self.step {
                first.get_or_insert(k);
                kept.push(m);
            } else {
                lost += m.abs();
            }
        }
        let mut out = match first {
            Some(k) => Self::from_nodal_masses_at(self.node(k), self.step, &kept),
            None => Self::zero(self.step),
        };
        out.atoms = atoms;
        (out, lost)
    }

    /// Moves the mass of nodes farther than `slack` outside `[lo, hi]` onto
    /// the nearest remaining node. Atoms are kept as they are.
    pub fn fold_into(&self, lo: f64, hi: f64, slack: f64) -> Self {
        let masses = self.nodal_masses();
        let n = masses.len();
        if n == 0 {
            return self.clone();
        }
        let s = slack + 1e-9 * self.step;
        let inside = |k: usize| self.node(k) + s >= lo && self.node(k) - s <= hi;
        let (Some(a), Some(b)) = ((0..n).find(|&k| inside(k)), (0..n).rev().find(|&k| inside(k))) else {
            return self.clone();
        };
        let mut kept = masses[a..=b].to_vec();
        kept[0] += masses[..a].iter().sum::<f64>();
        let last = kept.len() - 1;
        kept[last] += masses[b + 1..].iter().sum::<f64>();
        let mut out = Self::from_nodal_masses_at(self.node(a), self.step, &kept);
        out.atoms = self.atoms.clone();
        out
    }

    /// Linear combination `a·self + b·other` on the finer common lattice.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let step = common_step(self, other);
        let (x, y) = if self.density.is_empty() && other.density.is_empty() {
            (self.clone(), other.clone())
        } else {
            let origin = if !self.density.is_empty() && (self.step <= other.step || other.density.is_empty()) {
                self.origin
            } else if !other.density.is_empty() {
                other.origin
            } else {
                self.origin
            };
            (self.resample(origin, step), other.resample(origin, step))
        };
        let mut atoms: Vec<(f64, f64)> = x.atoms.iter().map(|&(p, m)| (p, a * m)).collect();
        atoms.extend(y.atoms.iter().map(|&(p, m)| (p, b * m)));
        if x.density.is_empty() && y.density.is_empty() {
            let mut z = Self::zero(step);
            z.atoms = normalize_atoms(atoms);
            return z;
        }
        let (mx, my) = (x.nodal_masses(), y.nodal_masses());
        let base = if x.density.is_empty() { y.origin } else { x.origin };
        let idx = |o: f64| ((o - base) / step).round() as i64;
        let (ix, iy) = (idx(x.origin), idx(y.origin));
        let lo = if x.density.is_empty() { iy } else if y.density.is_empty() { ix } else { ix.min(iy) };
        let hi = [
            (!x.density.is_empty()).then(|| ix + mx.len() as i64),
            (!y.density.is_empty()).then(|| iy + my.len() as i64),
        ]
        .into_iter()
        .flatten()
        .max()
        .unwrap();
        let mut out = vec![0.0; (hi - lo) as usize];
        for (k, m) in mx.iter().enumerate() {
            out[(ix - lo) as usize + k] += a * m;
        }
        for (k, m) in my.iter().enumerate() {
            out[(iy - lo) as usize + k] += b * m;
        }
        let mut z = Self::from_nodal_masses_at(base + lo as f64 * step, step, &out);
        z.atoms = normalize_atoms(atoms);
        z
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(1.0, other, -1.0)
    }

    /// CSV text: optional `# grid` and `# atom` comments, then `t,density`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# grid {:.16e} {:.16e}", self.origin, self.step);
        for &(p, m) in &self.atoms {
            let _ = writeln!(s, "# atom {:.16e} {:.16e}", p, m);
        }
        s.push_str("t,density\n");
        for (k, d) in self.density.iter().enumerate() {
            let _ = writeln!(s, "{:.16e},{:.16e}", self.node(k), d);
        }
        s
    }

    /// Parses the format written by [`GridMeasure::to_csv`]. Without a
    /// `# grid` line, origin and step are inferred from the rows, which must
    /// be evenly spaced.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut grid: Option<(f64, f64)> = None;
        let mut rows: Vec<(usize, f64, f64)> = Vec::new();
        let mut header_seen = false;
        let num = |s: &str, line: usize| -> Result<f64> {
            let v: f64 = s.trim().parse().map_err(|_| Error::Parse {
                line,
                msg: format!("expected a number, got '{}'", s.trim()),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse {
                    line,
                    msg: "non-finite number".into(),
                })
            }
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            if let Some(c) = l.strip_prefix('#') {
                let parts: Vec<&str> = c.split_whitespace().collect();
                match parts.first().copied() {
                    Some("atom") if parts.len() == 3 => {
                        atoms.push((num(parts[1], line)?, num(parts[2], line)?));
                    }
                    Some("grid") if parts.len() == 3 => {
                        grid = Some((num(parts[1], line)?, num(parts[2], line)?));
                    }
                    Some("atom") | Some("grid") => {
                        return Err(Error::Parse {
                            line,
                            msg: "expected '# atom <pos> <mass>' or '# grid <origin> <step>'".into(),
                        })
                    }
                    _ => {}
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = l.split(',').map(str::trim).collect();
                if cols != ["t", "density"] {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected header 't,density', got '{l}'"),
                    });
                }
                header_seen = true;
                continue;
            }
            let (a, b) = l.split_once(',').ok_or_else(|| Error::Parse {
                line,
                msg: "expected two comma-separated columns".into(),
            })?;
            if b.contains(',') {
                return Err(Error::Parse {
                    line,
                    msg: "expected two comma-separated columns".into(),
                });
            }
            rows.push((line, num(a, line)?, num(b, line)?));
        }
        if !header_seen {
            return Err(Error::Parse {
                line: 0,
                msg: "missing 't,density' header".into(),
            });
        }
        let (origin, step) = match grid {
            Some((o, h)) => {
                if !(h > 0.0) {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("grid step must be positive, got {h}"),
                    });
                }
                (o, h)
            }
            None if rows.len() >= 2 => (rows[0].1, (rows[rows.len() - 1].1 - rows[0].1) / (rows.len() - 1) as f64),
            None if rows.len() == 1 => (rows[0].1, DEFAULT_STEP),
            None => (0.0, DEFAULT_STEP),
        };
        if !(step > 0.0) {
            return Err(Error::Parse {
                line: rows.first().map_or(0, |r| r.0),
                msg: "rows must be strictly increasing in t".into(),
            });
        }
        for (k, &(line, t, _)) in rows.iter().enumerate() {
            let expect = origin + k as f64 * step;
            if (t - expect).abs() > 1e-6 * step {
                return Err(Error::Parse {
                    line,
                    msg: format!("row t = {t} is off the lattice (expected {expect})"),
                });
            }
        }
        let density = rows.into_iter().map(|r| r.2).collect();
        Self::new(atoms, origin, step, density).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }
}

/// Linear convolution of two sequences.
pub fn linear_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a.len() + b.len() - 1;
    if a.len().saturating_mul(b.len()) <= DIRECT_CONV_LIMIT {
        let mut out = vec![0.0; n];
        for (i, x) in a.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = n.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fa.resize(size, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fb.resize(size, Complex64::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..n].iter().map(|z| z.re * scale).collect()
}

/// `μ ⋆_ℝ ν` with the default maximum extent.
pub fn convolve_r(mu: &GridMeasure, nu: &GridMeasure) -> Result<GridMeasure> {
    convolve_r_limited(mu, nu, DEFAULT_MAX_EXTENT)
}

/// `μ ⋆_ℝ ν`; fails if the density window would exceed `max_extent`.
pub fn convolve_r_limited(mu: &GridMeasure, nu: &GridMeasure, max_extent: f64) -> Result<GridMeasure> {
    let step = common_step(mu, nu);
    if let (Some(a), Some(b)) = (mu.window(), nu.window()) {
        let extent = (a.1 - a.0) + (b.1 - b.0);
        if extent > max_extent {
            return Err(Error::Window(format!(
                "convolution window of length {extent} exceeds the maximum {max_extent}"
            )));
        }
    }
    let mut result = GridMeasure::zero(step);

    // Atom × atom.
    let mut atoms = Vec::new();
    for &(p, m) in &mu.atoms {
        for &(q, w) in &nu.atoms {
            atoms.push((p + q, m * w));
        }
    }
    result.atoms = normalize_atoms(atoms);

    // Atom × density, both ways.
    let mut pieces: Vec<GridMeasure> = Vec::new();
    for (atoms, dens) in [(&mu.atoms, nu), (&nu.atoms, mu)] {
        if dens.density.is_empty() {
            continue;
        }
        let mut base = dens.clone();
        base.atoms.clear();
        for &(p, m) in atoms.iter() {
            pieces.push(base.shift(p).scale(m));
        }
    }

    // Density × density.
    if !mu.density.is_empty() && !nu.density.is_empty() {
        let mut a = mu.clone();
        a.atoms.clear();
        let mut b = nu.clone();
        b.atoms.clear();
        // Put both on a lattice k·step so the sum of nodes is again a node.
        let a = a.resample(0.0, step);
        let b = b.resample(0.0, step);
        let ia = (a.origin / step).round() as i64;
        let ib = (b.origin / step).round() as i64;
        let (ma, mb) = (a.nodal_masses(), b.nodal_masses());
        if let (Some((a0, a1)), Some((b0, b1))) = (nonzero_range(&ma), nonzero_range(&mb)) {
            let m = linear_convolve(&ma[a0..=a1], &mb[b0..=b1]);
            pieces.push(GridMeasure::from_nodal_masses(ia + ib + (a0 + b0) as i64, step, &m));
        }
    }

    for p in pieces {
        result = result.add(&p);
    }
    Ok(result)
}

/// `‖μ - ν‖`.
pub fn tv_distance(mu: &GridMeasure, nu: &GridMeasure) -> f64 {
    mu.sub(nu).tv_norm()
}

/// `⟨μ, f⟩`.
pub fn pair<F: Fn(f64) -> f64>(mu: &GridMeasure, f: F) -> f64 {
    let atoms: f64 = mu.atoms.iter().map(|&(p, m)| f(p) * m).sum();
    atoms + mu.nodes().map(|(t, m)| if m != 0.0 { f(t) * m } else { 0.0 }).sum::<f64>()
}

/// `∫ e^{-iλt} dμ(t)`; complex λ is allowed.
pub fn fourier_stieltjes(mu: &GridMeasure, lambda: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let e = |t: f64| (-i * lambda * t).exp();
    let atoms: Complex64 = mu.atoms.iter().map(|&(p, m)| e(p) * m).sum();
    atoms + mu
        .nodes()
        .filter(|(_, m)| *m != 0.0)
        .map(|(t, m)| e(t) * m)
        .sum::<Complex64>()
}

/// Multiplies the measure by `e^{-ρt}`.
pub fn exp_weight(mu: &GridMeasure, rho: f64) -> GridMeasure {
    if rho == 0.0 {
        return mu.clone();
    }
    let mut m = mu.clone();
    for a in m.atoms.iter_mut() {
        a.1 *= (-rho * a.0).exp();
    }
    for (k, d) in m.density.iter_mut().enumerate() {
        *d *= (-rho * (mu.origin + k as f64 * mu.step)).exp();
    }
    m
}

/// Diagnostics of a Neumann series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct NeumannInfo {
    pub terms: usize,
    pub tail_bound: f64,
    /// Total variation discarded by cropping to the window.
    pub cropped: f64,
}

/// `(δ_0 - u/2)^{-1} ⋆_ℝ target` by the geometric series, stopping when
/// `(‖u‖/2)^{k+1}/(1 - ‖u‖/2)·‖target‖ < tol`. Partial sums are cropped to
/// `window` when one is given.
pub fn neumann_inverse(
    u: &GridMeasure,
    target: &GridMeasure,
    tol: f64,
    window: Option<(f64, f64)>,
) -> Result<(GridMeasure, NeumannInfo)> {
    let q = 0.5 * u.tv_norm();
    if q >= 1.0 {
        return Err(Error::NotInvertible(format!(
            "‖u‖ = {} is not below 2; δ_0 - u/2 is not invertible by a Neumann series",
            2.0 * q
        )));
    }
    let half = u.scale(0.5);
    let tnorm = target.tv_norm();
    let crop = |m: GridMeasure| -> (GridMeasure, f64) {
        match window {
            Some((lo, hi)) => m.crop(lo, hi),
            None => (m, 0.0),
        }
    };
    let (mut term, mut cropped) = crop(target.clone());
    let mut acc = term.clone();
    let mut k = 0usize;
    let tail = |k: usize| {
        if q == 0.0 {
            0.0
        } else {
            q.powi(k as i32 + 1) / (1.0 - q) * tnorm
        }
    };
    while tail(k) >= tol {
        if k >= 100_000 {
            return Err(Error::NonConvergence("Neumann series did not reach tolerance".into()));
        }
        let next = convolve_r(&term, &half)?;
        let (next, lost) = crop(next);
        cropped += lost;
        acc = acc.add(&next);
        term = next;
        k += 1;
    }
    Ok((
        acc,
        NeumannInfo {
            terms: k + 1,
            tail_bound: tail(k),
            cropped,
        },
    ))
}
