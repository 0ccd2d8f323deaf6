//! One-dimensional losses ℓ, their derivatives and assumption certificates.
//!
//! Every loss is convex, even and 1-Lipschitz. The decay of the ratio
//! r(s) = ℓ′(s)/s away from zero is summarised by an exponent β and a
//! constant c: r(s) ≤ 1 − c|s|^β near the origin.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LossKind {
    /// ½ℓ_logi(−2s) + ½ℓ_logi(2s), with ℓ′ = tanh.
    RescaledSymLogistic,
    /// √(1 + s²).
    Sqrt,
    /// Quadratic on [−1, 1], linear outside.
    Huber,
    /// Polynomial-decay loss with the given exponent β > 1.
    HigherOrder(f64),
    /// ½ℓ_logi(s) + ½ℓ_logi(−s), curvature 1/4 at the origin.
    SymLogistic,
}

// Fast evaluation of |s|^β for the exponents used in sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Power {
    Int(i32),
    IntAndHalf(i32),
    Real(f64),
}

impl Power {
    fn new(beta: f64) -> Self {
        if beta.fract() == 0.0 && beta <= 64.0 {
            Power::Int(beta as i32)
        } else if (beta - 0.5).fract() == 0.0 && beta <= 64.0 {
            Power::IntAndHalf(beta.floor() as i32)
        } else {
            Power::Real(beta)
        }
    }

    #[inline]
    fn eval(self, a: f64) -> f64 {
        match self {
            Power::Int(k) => a.powi(k),
            Power::IntAndHalf(k) => a.powi(k) * a.sqrt(),
            Power::Real(b) => a.powf(b),
        }
    }
}

/// A loss together with its declared assumption constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LossSpec {
    pub kind: LossKind,
    /// Declared decay exponent β; `f64::INFINITY` for Huber.
    pub beta: f64,
    /// Declared constant c in r(s) ≤ 1 − c|s|^β for |s| ≤ c.
    pub c_lower: f64,
    /// Declared constant C in r(s) ≥ 1 − C|s|^β, when one is known.
    pub c_upper: Option<f64>,
    pub second_deriv_at_zero: f64,
    // HigherOrder only: c_β, r_β and the cached power.
    c_beta: f64,
    r_beta: f64,
    power: Power,
}

impl LossSpec {
    pub fn rescaled_sym_logistic() -> Self {
        Self::plain(LossKind::RescaledSymLogistic, 2.0, 0.25, Some(1.0 / 3.0), 1.0)
    }

    pub fn sqrt() -> Self {
        Self::plain(LossKind::Sqrt, 2.0, 0.4, Some(0.5), 1.0)
    }

    pub fn huber() -> Self {
        Self::plain(LossKind::Huber, f64::INFINITY, 1.0, None, 1.0)
    }

    /// Stated against the curvature-normalised ratio r(s)/ℓ″(0), which for
    /// this loss is tanh(s/2)/(s/2).
    pub fn sym_logistic() -> Self {
        Self::plain(LossKind::SymLogistic, 2.0, 1.0 / 16.0, Some(1.0 / 12.0), 0.25)
    }

    pub fn higher_order(beta: f64) -> Result<Self> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::InvalidInput(format!("higher-order loss needs a finite beta > 1, got {beta}")));
        }
        let c_beta = (beta / (beta + 1.0)).powf(beta) / (beta + 1.0);
        let r_beta = (beta + 1.0) / beta;
        Ok(Self {
            kind: LossKind::HigherOrder(beta),
            beta,
            c_lower: c_beta.min(r_beta),
            c_upper: Some(c_beta),
            second_deriv_at_zero: 1.0,
            c_beta,
            r_beta,
            power: Power::new(beta),
        })
    }

    fn plain(kind: LossKind, beta: f64, c_lower: f64, c_upper: Option<f64>, curv: f64) -> Self {
        Self {
            kind,
            beta,
            c_lower,
            c_upper,
            second_deriv_at_zero: curv,
            c_beta: 0.0,
            r_beta: f64::INFINITY,
            power: Power::Int(2),
        }
    }

    /// `(c_β, r_β)` of a higher-order loss.
    pub fn higher_order_constants(&self) -> Option<(f64, f64)> {
        match self.kind {
            LossKind::HigherOrder(_) => Some((self.c_beta, self.r_beta)),
            _ => None,
        }
    }

    /// Name accepted by [`LossSpec::from_str`].
    pub fn name(&self) -> String {
        match self.kind {
            LossKind::RescaledSymLogistic => "rsym-logistic".into(),
            LossKind::Sqrt => "sqrt".into(),
            LossKind::Huber => "huber".into(),
            LossKind::HigherOrder(b) => format!("higher-order:{b}"),
            LossKind::SymLogistic => "sym-logistic".into(),
        }
    }

    /// Scale below which |s| counts as "landed" for phase tagging.
    pub fn landing_scale(&self) -> f64 {
        self.c_lower
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn parse_number(text: &str) -> Option<f64> {
    match text.split_once('/') {
        Some((num, den)) => Some(num.trim().parse::<f64>().ok()? / den.trim().parse::<f64>().ok()?),
        None => text.trim().parse().ok(),
    }
}

impl FromStr for LossSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rsym-logistic" => Ok(Self::rescaled_sym_logistic()),
            "sqrt" => Ok(Self::sqrt()),
            "huber" => Ok(Self::huber()),
            "sym-logistic" => Ok(Self::sym_logistic()),
            other => match other.strip_prefix("higher-order:") {
                Some(beta) => match parse_number(beta) {
                    Some(b) => Self::higher_order(b),
                    None => Err(Error::InvalidInput(format!("bad exponent in loss name {other:?}"))),
                },
                None => Err(Error::InvalidInput(format!("unknown loss {other:?}"))),
            },
        }
    }
}

impl TryFrom<String> for LossSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LossSpec> for String {
    fn from(l: LossSpec) -> String {
        l.name()
    }
}

/// ℓ(s).
pub fn loss_value(spec: &LossSpec, s: f64) -> f64 {
    let a = s.abs();
    match spec.kind {
        // log(1 + e^{2a}) = 2a + log1p(e^{-2a}), averaged with its mirror.
        LossKind::RescaledSymLogistic => a + (-2.0 * a).exp().ln_1p(),
        LossKind::Sqrt => s.hypot(1.0),
        LossKind::Huber => {
            if a <= 1.0 {
                0.5 * s * s
            } else {
                a - 0.5
            }
        }
        LossKind::HigherOrder(beta) => {
            let inner = |a: f64| 0.5 * a * a - spec.c_beta * a * a * spec.power.eval(a) / (beta + 2.0);
            if a < spec.r_beta {
                inner(a)
            } else {
                inner(spec.r_beta) + (a - spec.r_beta)
            }
        }
        LossKind::SymLogistic => 0.5 * a + (-a).exp().ln_1p(),
    }
}

/// ℓ′(s).
#[inline]
pub fn loss_deriv(spec: &LossSpec, s: f64) -> f64 {
    match spec.kind {
        LossKind::RescaledSymLogistic => s.tanh(),
        LossKind::Sqrt => s / s.hypot(1.0),
        LossKind::Huber => s.clamp(-1.0, 1.0),
        LossKind::HigherOrder(_) => {
            let a = s.abs();
            if a < spec.r_beta {
                s * (1.0 - spec.c_beta * spec.power.eval(a))
            } else {
                s.signum()
            }
        }
        LossKind::SymLogistic => 0.5 * (0.5 * s).tanh(),
    }
}

/// ℓ″(s). Huber is not twice differentiable at |s| = 1.
pub fn loss_second_deriv(spec: &LossSpec, s: f64) -> Result<f64> {
    let a = s.abs();
    Ok(match spec.kind {
        LossKind::RescaledSymLogistic => {
            let t = s.tanh();
            1.0 - t * t
        }
        LossKind::Sqrt => {
            let h = s.hypot(1.0);
            1.0 / (h * h * h)
        }
        LossKind::Huber => {
            if a == 1.0 {
                return Err(Error::NotDifferentiable(s));
            }
            if a < 1.0 {
                1.0
            } else {
                0.0
            }
        }
        LossKind::HigherOrder(beta) => {
            if a < spec.r_beta {
                1.0 - (beta + 1.0) * spec.c_beta * spec.power.eval(a)
            } else {
                0.0
            }
        }
        LossKind::SymLogistic => {
            let t = (0.5 * s).tanh();
            0.25 * (1.0 - t * t)
        }
    })
}

/// r(s) = ℓ′(s)/s, extended by continuity with ℓ″(0) at the origin.
#[inline]
pub fn ratio_r(spec: &LossSpec, s: f64) -> f64 {
    if s == 0.0 {
        return spec.second_deriv_at_zero;
    }
    let a = s.abs();
    match spec.kind {
        LossKind::Sqrt => 1.0 / s.hypot(1.0),
        LossKind::Huber => {
            if a <= 1.0 {
                1.0
            } else {
                1.0 / a
            }
        }
        LossKind::HigherOrder(_) => {
            if a < spec.r_beta {
                1.0 - spec.c_beta * spec.power.eval(a)
            } else {
                1.0 / a
            }
        }
        _ => loss_deriv(spec, s) / s,
    }
}

/// Worst margins found by [`certify_assumptions`]; all are non-negative
/// when the report is returned.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub loss: String,
    pub points: usize,
    /// min over the grid of min(1, |s|) − |ℓ′(s)|.
    pub lipschitz_margin: f64,
    /// min over the grid of the upper-bound slack on r(s).
    pub upper_margin: f64,
    /// min over the grid of the lower-bound slack, when C is declared.
    pub lower_margin: Option<f64>,
}

// Rounding slack for comparisons that are exact in real arithmetic.
const CERT_SLACK: f64 = 4.0 * f64::EPSILON;

/// Check the declared assumption constants pointwise on `grid`.
///
/// The ratio bounds are applied to r(s)/ℓ″(0), so curvature-1/4 losses are
/// held to the same normalised statement.
pub fn certify_assumptions(spec: &LossSpec, grid: &[f64]) -> Result<CertReport> {
    if grid.is_empty() || grid.iter().any(|&s| !(s > 0.0 && s <= 10.0)) {
        return Err(Error::InvalidInput("certification grid must lie in (0, 10]".into()));
    }
    let mut report = CertReport {
        loss: spec.name(),
        points: grid.len(),
        lipschitz_margin: f64::INFINITY,
        upper_margin: f64::INFINITY,
        lower_margin: spec.c_upper.map(|_| f64::INFINITY),
    };
    for &s in grid {
        let lip = 1.0_f64.min(s) - loss_deriv(spec, s).abs();
        if lip < -CERT_SLACK {
            return Err(Error::CertificationFailed { s, clause: "|l'(s)| <= min(1, |s|)".into() });
        }
        report.lipschitz_margin = report.lipschitz_margin.min(lip);

        let r = ratio_r(spec, s) / spec.second_deriv_at_zero;
        let upper =
            if spec.beta.is_infinite() || s > spec.c_lower { 1.0 } else { 1.0 - spec.c_lower * s.powf(spec.beta) };
        if upper - r < -CERT_SLACK {
            return Err(Error::CertificationFailed {
                s,
                clause: format!("r(s) <= 1 - {}|s|^{}", spec.c_lower, spec.beta),
            });
        }
        report.upper_margin = report.upper_margin.min(upper - r);

        if let Some(big_c) = spec.c_upper {
            let lower = 1.0 - big_c * s.powf(spec.beta);
            if r - lower < -CERT_SLACK {
                return Err(Error::CertificationFailed { s, clause: format!("r(s) >= 1 - {big_c}|s|^{}", spec.beta) });
            }
            report.lower_margin = report.lower_margin.map(|m| m.min(r - lower));
        }
    }
    Ok(report)
}
