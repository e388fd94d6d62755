//! Sturm-Liouville models `(A, α₀, ρ)` and their transmutation data.
//!
//! A model is determined by the function `A` entering the operator
//! `L f = -f'' - (A'/A) f'`. Everything downstream only needs the
//! logarithmic derivative `A'/A`, its regular part `β(x) = A'/A - α₀/x`
//! and, for the Volterra recursion and normalizations, `A` itself up to a
//! constant factor.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quad::adaptive_simpson;
use std::fmt;
use std::path::Path;

/// Default threshold below which `A'/A` is evaluated as `α₀/x + β(x)`.
pub const DEFAULT_X_REGULAR: f64 = 1e-3;
/// Relative step for central differences of custom models.
const FD_REL_STEP: f64 = 1e-4;
const LOG_FD_STEP: f64 = 1e-3;
/// Sample point (and half of it) used to extrapolate ρ for custom models.
const RHO_PROBE_X: f64 = 40.0;
const RHO_STABILITY_TOL: f64 = 1e-2;
const RHO_SNAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    BesselKingman { alpha0: f64 },
    Naimark,
    Jacobi { alpha: f64, beta: f64 },
    Custom { expr: Expr, source: String },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::BesselKingman { .. } => "bessel-kingman",
            Family::Naimark => "naimark",
            Family::Jacobi { .. } => "jacobi",
            Family::Custom { .. } => "custom",
        }
    }
}

/// An immutable hypergroup model.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmLiouvilleModel {
    family: Family,
    name: String,
    alpha0: f64,
    rho: f64,
    x_regular: f64,
    /// Constant factor multiplying `A`. Only `A` and `A'` see it.
    scale: f64,
    /// Custom models: `β(x_regular) / x_regular`, the slope of β at 0.
    beta_slope0: f64,
}

impl fmt::Display for SturmLiouvilleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl SturmLiouvilleModel {
    pub fn naimark() -> Self {
        Self::build(Family::Naimark, "naimark".into(), DEFAULT_X_REGULAR, 1.0, None)
            .expect("naimark model is valid")
    }

    pub fn bessel_kingman(alpha0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(Error::InvalidModel(format!("bessel-kingman needs α₀ > 0, got {alpha0}")));
        }
        Self::build(
            Family::BesselKingman { alpha0 },
            format!("bessel-kingman:{alpha0}"),
            DEFAULT_X_REGULAR,
            1.0,
            None,
        )
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || !(alpha >= beta && beta >= -0.5 && alpha > -0.5) {
            return Err(Error::InvalidModel(format!(
                "jacobi needs α ≥ β ≥ -1/2 and α > -1/2, got ({alpha}, {beta})"
            )));
        }
        Self::build(
            Family::Jacobi { alpha, beta },
            format!("jacobi:{alpha},{beta}"),
            DEFAULT_X_REGULAR,
            1.0,
            None,
        )
    }

    /// A custom model from an expression for `A(x)`. When `alpha0` is not
    /// given it is estimated from `x A'(x)/A(x)` near 0.
    pub fn custom(source: &str, alpha0: Option<f64>, x_regular: f64) -> Result<Self> {
        let expr = Expr::parse(source)?;
        Self::build(
            Family::Custom {
                expr,
                source: source.trim().to_string(),
            },
            format!("custom:{}", source.trim()),
            x_regular,
            1.0,
            alpha0,
        )
    }

    /// `A(x) = (x/(1+x))²`: bounded, ρ = 0.
    pub fn bounded_demo() -> Self {
        let mut m = Self::custom("(x/(1+x))^2", Some(2.0), DEFAULT_X_REGULAR).expect("valid");
        m.name = "bounded-demo".into();
        m
    }

    /// Resolves a builtin alias: `naimark`, `bessel-kingman:<α₀>`,
    /// `jacobi:<α>,<β>`, `bounded-demo`.
    pub fn from_alias(alias: &str) -> Result<Self> {
        let alias = alias.trim();
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: format!("model alias '{alias}': {msg}"),
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        if alias == "naimark" {
            return Ok(Self::naimark());
        }
        if alias == "bounded-demo" {
            return Ok(Self::bounded_demo());
        }
        if let Some(rest) = alias.strip_prefix("bessel-kingman:") {
            return Self::bessel_kingman(num(rest)?);
        }
        if let Some(rest) = alias.strip_prefix("jacobi:") {
            let (a, b) = rest.split_once(',').ok_or_else(|| bad("expected jacobi:<alpha>,<beta>"))?;
            return Self::jacobi(num(a)?, num(b)?);
        }
        Err(bad("unknown alias"))
    }

    /// Parses a model specification (`key = value` lines, `#` comments).
    ///
    /// Keys: `family`, `alpha0`, `alpha`, `beta`, `a` (custom expression),
    /// `x_regular`, `scale`, `name`.
    pub fn from_spec_str(text: &str) -> Result<Self> {
        let mut family: Option<String> = None;
        let mut alpha0 = None;
        let mut alpha = None;
        let mut beta = None;
        let mut a_expr: Option<String> = None;
        let mut x_regular = DEFAULT_X_REGULAR;
        let mut scale = 1.0;
        let mut name: Option<String> = None;
        let mut family_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            let number = || -> Result<f64> {
                let v: f64 = value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("'{key}' expects a number, got '{value}'"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("'{key}' must be finite"),
                    });
                }
                Ok(v)
            };
            match key.as_str() {
                "family" => {
                    family = Some(value.to_ascii_lowercase());
                    family_line = line_no;
                }
                "alpha0" => alpha0 = Some(number()?),
                "alpha" => alpha = Some(number()?),
                "beta" => beta = Some(number()?),
                "x_regular" => x_regular = number()?,
                "scale" => scale = number()?,
                "a" => a_expr = Some(value.to_string()),
                "name" => name = Some(value.to_string()),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unknown key '{key}'"),
                    })
                }
            }
        }

        let family = family.ok_or(Error::Parse {
            line: 0,
            msg: "missing 'family'".into(),
        })?;
        let missing = |k: &str| Error::Parse {
            line: family_line,
            msg: format!("family '{family}' requires '{k}'"),
        };
        if !(x_regular > 0.0 && x_regular < 1.0) {
            return Err(Error::InvalidModel(format!("x_regular must lie in (0, 1), got {x_regular}")));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidModel(format!("scale must be positive, got {scale}")));
        }
        let mut model = match family.as_str() {
            "naimark" => Self::naimark(),
            "bessel-kingman" | "bessel_kingman" | "bk" => {
                Self::bessel_kingman(alpha0.ok_or_else(|| missing("alpha0"))?)?
            }
            "jacobi" => Self::jacobi(
                alpha.ok_or_else(|| missing("alpha"))?,
                beta.ok_or_else(|| missing("beta"))?,
            )?,
            "custom" => {
                let src = a_expr.ok_or_else(|| missing("a"))?;
                let expr = Expr::parse(&src).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Parse {
                        line: family_line,
                        msg: format!("in 'a': {msg}"),
                    },
                    other => other,
                })?;
                Self::build(
                    Family::Custom {
                        expr,
                        source: src.clone(),
                    },
                    format!("custom:{src}"),
                    x_regular,
                    1.0,
                    alpha0,
                )?
            }
            other => {
                return Err(Error::Parse {
                    line: family_line,
                    msg: format!("unknown family '{other}'"),
                })
            }
        };
        model.x_regular = x_regular;
        if let Family::Custom { .. } = model.family {
            model.beta_slope0 = model.custom_beta_direct(x_regular) / x_regular;
        }
        model.scale = scale;
        if let Some(n) = name {
            model.name = n;
        }
        Ok(model)
    }

    pub fn from_spec_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Domain(format!("cannot read model file {}: {e}", path.display())))?;
        Self::from_spec_str(&text)
    }

    /// Alias if the string names a builtin, otherwise a model file path.
    pub fn resolve(spec: &str) -> Result<Self> {
        match Self::from_alias(spec) {
            Ok(m) => Ok(m),
            Err(alias_err) => {
                let p = Path::new(spec);
                if p.exists() {
                    Self::from_spec_file(p)
                } else {
                    Err(alias_err)
                }
            }
        }
    }

    fn build(
        family: Family,
        name: String,
        x_regular: f64,
        scale: f64,
        alpha0_hint: Option<f64>,
    ) -> Result<Self> {
        let alpha0 = match &family {
            Family::BesselKingman { alpha0 } => *alpha0,
            Family::Naimark => 2.0,
            Family::Jacobi { alpha, .. } => 2.0 * alpha + 1.0,
            Family::Custom { .. } => f64::NAN,
        };
        let mut m = SturmLiouvilleModel {
            family,
            name,
            alpha0,
            rho: 0.0,
            x_regular,
            scale,
            beta_slope0: 0.0,
        };
        if let Family::Custom { .. } = m.family {
            let a0 = match alpha0_hint {
                Some(v) => v,
                None => {
                    let x = 1e-4;
                    x * m.custom_a_prime(x) / m.custom_a(x)
                }
            };
            if !(a0 > 0.0 && a0.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "custom A must behave like x^α₀ with α₀ > 0 near 0 (estimated α₀ = {a0})"
                )));
            }
            m.alpha0 = a0;
            m.beta_slope0 = m.custom_beta_direct(x_regular) / x_regular;
        }
        m.rho = m.compute_rho()?;
        Ok(m)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// Index ρ = ½ lim A'/A.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn x_regular(&self) -> f64 {
        self.x_regular
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The same model with `A` replaced by `c·A`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut m = self.clone();
        m.scale *= c;
        m
    }

    pub fn is_closed_form_kernel(&self) -> bool {
        matches!(self.family, Family::Naimark)
    }

    fn custom_expr(&self) -> &Expr {
        match &self.family {
            Family::Custom { expr, .. } => expr,
            _ => unreachable!("custom_expr on a builtin family"),
        }
    }

    fn custom_a(&self, x: f64) -> f64 {
        self.custom_expr().eval(x)
    }

    /// Five-point difference of `ln A`. Its third derivative stays bounded
    /// under exponential growth, unlike that of `A`.
    fn custom_log_deriv(&self, x: f64) -> f64 {
        let d = LOG_FD_STEP * x.min(1.0);
        let g = |t: f64| self.custom_a(t).ln();
        (g(x - 2.0 * d) - 8.0 * g(x - d) + 8.0 * g(x + d) - g(x + 2.0 * d)) / (12.0 * d)
    }

    fn custom_a_prime(&self, x: f64) -> f64 {
        self.custom_a(x) * self.custom_log_deriv(x)
    }

    fn custom_beta_direct(&self, x: f64) -> f64 {
        self.custom_log_deriv(x) - self.alpha0 / x
    }

    /// `A(x)` including the scale factor.
    pub fn a(&self, x: f64) -> f64 {
        match &self.family {
            Family::BesselKingman { alpha0 } => self.scale * x.powf(*alpha0),
            Family::Naimark => self.scale * x.sinh().powi(2),
            Family::Jacobi { .. } => self.log_a(x).exp(),
            Family::Custom { .. } => self.scale * self.custom_a(x),
        }
    }

    /// `ln A(x)`, stable for large `x`.
    pub fn log_a(&self, x: f64) -> f64 {
        let ls = self.scale.ln();
        match &self.family {
            Family::BesselKingman { alpha0 } => ls + alpha0 * x.ln(),
            Family::Naimark => ls + 2.0 * ln_sinh(x),
            Family::Jacobi { alpha, beta } => {
                ls + (2.0 * alpha + 1.0) * (std::f64::consts::LN_2 + ln_sinh(x))
                    + (2.0 * beta + 1.0) * (std::f64::consts::LN_2 + ln_cosh(x))
            }
            Family::Custom { .. } => ls + self.custom_a(x).ln(),
        }
    }

    /// `A'(x)` including the scale factor.
    pub fn a_prime(&self, x: f64) -> f64 {
        match &self.family {
            Family::BesselKingman { alpha0 } => self.scale * alpha0 * x.powf(alpha0 - 1.0),
            Family::Naimark => self.scale * (2.0 * x).sinh(),
            Family::Jacobi { .. } => self.a(x) * self.log_deriv(x),
            Family::Custom { .. } => self.scale * self.custom_a_prime(x),
        }
    }

    /// `A'(x)/A(x)` for `x > 0` without argument checking.
    pub fn log_deriv(&self, x: f64) -> f64 {
        if x < self.x_regular {
            return self.alpha0 / x + self.beta(x);
        }
        match &self.family {
            Family::BesselKingman { alpha0 } => alpha0 / x,
            Family::Naimark => 2.0 / x.tanh(),
            Family::Jacobi { alpha, beta } => {
                (2.0 * alpha + 1.0) / x.tanh() + (2.0 * beta + 1.0) * x.tanh()
            }
            Family::Custom { .. } => self.custom_log_deriv(x),
        }
    }

    /// `β(x) = A'/A - α₀/x`, bounded near 0.
    pub fn beta(&self, x: f64) -> f64 {
        match &self.family {
            Family::BesselKingman { .. } => 0.0,
            Family::Naimark => 2.0 * coth_minus_inv(x),
            Family::Jacobi { alpha, beta } => {
                (2.0 * alpha + 1.0) * coth_minus_inv(x) + (2.0 * beta + 1.0) * x.tanh()
            }
            Family::Custom { .. } => {
                if x < self.x_regular {
                    self.beta_slope0 * x
                } else {
                    self.custom_beta_direct(x)
                }
            }
        }
    }

    /// `β'(x)`; closed form for builtin families, central differences otherwise.
    pub fn beta_prime(&self, x: f64) -> f64 {
        match &self.family {
            Family::BesselKingman { .. } => 0.0,
            Family::Naimark => 2.0 * inv_sq_minus_csch_sq(x),
            Family::Jacobi { alpha, beta } => {
                (2.0 * alpha + 1.0) * inv_sq_minus_csch_sq(x)
                    + (2.0 * beta + 1.0) / x.cosh().powi(2)
            }
            Family::Custom { .. } => {
                if x < 2.0 * self.x_regular {
                    self.beta_slope0
                } else {
                    let d = FD_REL_STEP * x;
                    (self.beta(x + d) - self.beta(x - d)) / (2.0 * d)
                }
            }
        }
    }

    /// `β'(0)`, the coefficient of `x` in the odd expansion of β.
    pub fn beta_slope_at_zero(&self) -> f64 {
        match &self.family {
            Family::BesselKingman { .. } => 0.0,
            Family::Naimark => 2.0 / 3.0,
            Family::Jacobi { alpha, beta } => (2.0 * alpha + 1.0) / 3.0 + (2.0 * beta + 1.0),
            Family::Custom { .. } => self.beta_slope0,
        }
    }

    fn compute_rho(&self) -> Result<f64> {
        Ok(match &self.family {
            Family::BesselKingman { .. } => 0.0,
            Family::Naimark => 1.0,
            Family::Jacobi { alpha, beta } => alpha + beta + 1.0,
            Family::Custom { .. } => {
                let half = |x: f64| 0.5 * self.log_deriv(x);
                // Extrapolate assuming ½A'/A ≈ ρ + c/x, check against a coarser pair.
                let x1 = RHO_PROBE_X;
                let fine = 2.0 * half(x1) - half(x1 / 2.0);
                let coarse = 2.0 * half(x1 / 2.0) - half(x1 / 4.0);
                if !(fine.is_finite() && coarse.is_finite()) || (fine - coarse).abs() > RHO_STABILITY_TOL {
                    return Err(Error::NonConvergence(format!(
                        "½A'/A has not stabilized by x = {x1}: extrapolations {fine} and {coarse}"
                    )));
                }
                if fine < RHO_SNAP {
                    0.0
                } else {
                    fine
                }
            }
        })
    }

    /// `ln(A(x) e^{-2ρx})`.
    pub fn log_normalized_a(&self, x: f64) -> f64 {
        self.log_a(x) - 2.0 * self.rho * x
    }
}

fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

fn ln_cosh(x: f64) -> f64 {
    x.abs() - std::f64::consts::LN_2 + (-2.0 * x.abs()).exp().ln_1p()
}

/// `coth x - 1/x`.
pub(crate) fn coth_minus_inv(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * (1.0 / 3.0 - x2 / 45.0 + 2.0 * x2 * x2 / 945.0)
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

/// `1/x² - 1/sinh²x`.
pub(crate) fn inv_sq_minus_csch_sq(x: f64) -> f64 {
    if x.abs() < 5e-2 {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 15.0 + 2.0 * x2 * x2 / 189.0
    } else {
        1.0 / (x * x) - 1.0 / x.sinh().powi(2)
    }
}

/// `A'(x)/A(x)` with argument checking.
pub fn eval_log_deriv(model: &SturmLiouvilleModel, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("A'/A needs x > 0, got {x}")));
    }
    Ok(model.log_deriv(x))
}

pub fn index_rho(model: &SturmLiouvilleModel) -> f64 {
    model.rho()
}

/// Transmutation data `β, B, q, β_∞, B_∞, q_∞` of a model.
#[derive(Debug, Clone)]
pub struct TransmutationData {
    model: SturmLiouvilleModel,
}

const B_QUAD_TOL: f64 = 1e-10;

impl TransmutationData {
    pub fn model(&self) -> &SturmLiouvilleModel {
        &self.model
    }

    pub fn beta(&self, x: f64) -> f64 {
        self.model.beta(x)
    }

    /// `B(x) = exp(½ ∫₀ˣ β)`.
    pub fn b(&self, x: f64) -> Result<f64> {
        if matches!(self.model.family, Family::BesselKingman { .. }) {
            return Ok(1.0);
        }
        let i = adaptive_simpson(|t| self.model.beta(t), 0.0, x, B_QUAD_TOL)?;
        Ok((0.5 * i).exp())
    }

    /// `q(x) = β'/2 + β²/4 + β α₀/(2x)`.
    pub fn q(&self, x: f64) -> f64 {
        let m = &self.model;
        let b = m.beta(x);
        let b_over_x = if x > 0.0 { b / x } else { m.beta_slope_at_zero() };
        0.5 * m.beta_prime(x) + 0.25 * b * b + 0.5 * m.alpha0 * b_over_x
    }

    /// `β_∞(x) = A'/A - 2ρ`.
    pub fn beta_inf(&self, x: f64) -> f64 {
        self.model.log_deriv(x) - 2.0 * self.model.rho
    }

    /// `B_∞(x) = exp(½ ∫₁ˣ β_∞)`.
    pub fn b_inf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("B_∞ needs x > 0, got {x}")));
        }
        // ∫₁ˣ A'/A = ln A(x) - ln A(1) exactly; only the 2ρ part is trivial.
        let log_part = self.model.log_a(x) - self.model.log_a(1.0);
        Ok((0.5 * (log_part - 2.0 * self.model.rho * (x - 1.0))).exp())
    }

    /// `q_∞(x) = β_∞'/2 + β_∞²/4 + β_∞ ρ`.
    pub fn q_inf(&self, x: f64) -> f64 {
        let m = &self.model;
        let bi = self.beta_inf(x);
        let bi_prime = -m.alpha0 / (x * x) + m.beta_prime(x);
        0.5 * bi_prime + 0.25 * bi * bi + bi * m.rho
    }
}

pub fn transmutation(model: &SturmLiouvilleModel) -> Result<TransmutationData> {
    let t = TransmutationData { model: model.clone() };
    // Surface quadrature trouble at construction time.
    let b1 = t.b(1.0)?;
    if !(b1.is_finite() && b1 > 0.0) {
        return Err(Error::NonConvergence(format!("B(1) = {b1} is not a positive number")));
    }
    Ok(t)
}

/// Sampling used by [`validate_model`].
#[derive(Debug, Clone, Copy)]
pub struct ValidationGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        ValidationGrid {
            x_min: 1e-6,
            x_max: 40.0,
            points: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    SubExponential,
    ExponentialNormalizable,
    ExponentialOther,
}

impl GrowthClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthClass::SubExponential => "sub-exponential",
            GrowthClass::ExponentialNormalizable => "exponential-normalizable",
            GrowthClass::ExponentialOther => "exponential-other",
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub passed: bool,
    pub failures: Vec<String>,
    pub alpha0: f64,
    pub rho: f64,
    pub growth: GrowthClass,
    /// `lim A(y) e^{-2ρy}` when the class is exponential-normalizable.
    pub normalization_limit: Option<f64>,
    pub a_bounded: bool,
}

/// Checks the model invariants on a geometric grid and classifies growth.
pub fn validate_model(model: &SturmLiouvilleModel, grid: ValidationGrid) -> ValidationReport {
    let mut failures = Vec::new();
    let n = grid.points.max(2);
    let ratio = (grid.x_max / grid.x_min).powf(1.0 / (n - 1) as f64);
    let xs: Vec<f64> = (0..n).map(|i| grid.x_min * ratio.powi(i as i32)).collect();

    let mut prev_ld = f64::INFINITY;
    for &x in &xs {
        let la = model.log_a(x);
        let ld = model.log_deriv(x);
        if !la.is_finite() {
            failures.push(format!("A({x:.3e}) is not positive"));
            break;
        }
        if !(ld >= 0.0) {
            failures.push(format!("A'({x:.3e}) < 0"));
            break;
        }
        if ld > prev_ld * (1.0 + 1e-7) + 1e-12 {
            failures.push(format!("A'/A increases near x = {x:.3e}"));
            break;
        }
        prev_ld = ld;
    }

    // A(x)/x^α₀ should settle to a positive constant as x → 0.
    let lr = |x: f64| model.log_a(x) - model.alpha0 * x.ln();
    let (r1, r2) = (lr(1e-4), lr(1e-5));
    if !(r1.is_finite() && r2.is_finite()) || (r1 - r2).abs() > 1e-3 {
        failures.push(format!(
            "A(x)/x^α₀ does not stabilize at 0 (log ratios {r1:.6} vs {r2:.6})"
        ));
    }

    // ρ against the extrapolated tail of ½A'/A.
    let half = |x: f64| 0.5 * model.log_deriv(x);
    let tail = (2.0 * half(grid.x_max) - half(grid.x_max / 2.0)).max(0.0);
    if (tail - model.rho).abs() > RHO_STABILITY_TOL {
        failures.push(format!(
            "ρ = {} disagrees with extrapolated ½A'/A = {tail:.6} at x = {}",
            model.rho, grid.x_max
        ));
    }

    let (growth, normalization_limit) = if model.rho == 0.0 {
        (GrowthClass::SubExponential, None)
    } else {
        let l20 = model.log_normalized_a(20.0);
        let l40 = model.log_normalized_a(40.0);
        if (l40 - l20).abs() < 1e-3 && l40.is_finite() {
            (GrowthClass::ExponentialNormalizable, Some(l40.exp()))
        } else {
            (GrowthClass::ExponentialOther, None)
        }
    };
    let a_bounded = model.rho == 0.0 && (model.log_a(1000.0) - model.log_a(100.0)) < 0.1;

    ValidationReport {
        model: model.name.clone(),
        passed: failures.is_empty(),
        failures,
        alpha0: model.alpha0,
        rho: model.rho,
        growth,
        normalization_limit,
        a_bounded,
    }
}
