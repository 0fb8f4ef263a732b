//! Parameter sets, admissibility and exponent arithmetic.

use crate::specialfn::gamma;
use crate::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt;

/// A real number or +∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    /// Parses a decimal number or the case-insensitive word `inf`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(ExtReal::Infinite);
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(ExtReal::Finite(v)),
            _ => Err(format!("expected a finite number or \"inf\", got {s:?}")),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal::Finite(v)),
            Raw::Str(s) => ExtReal::parse(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// The sign of `q - (p - 1)`, which decides the support of the extremal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    CompactSupport,
    Critical,
    Positive,
}

/// The tuple `(d, p, q, m)`; `m` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub d: u32,
    pub p: f64,
    pub q: f64,
    pub m: ExtReal,
}

impl ParamSet {
    pub fn new(d: u32, p: f64, q: f64, m: f64) -> Self {
        ParamSet { d, p, q, m: ExtReal::Finite(m) }
    }

    pub fn infinite(d: u32, p: f64, q: f64) -> Self {
        ParamSet { d, p, q, m: ExtReal::Infinite }
    }

    pub fn dim(&self) -> f64 {
        self.d as f64
    }

    /// Exact comparison of `q` against `p - 1`.
    pub fn regime(&self) -> Regime {
        let pm1 = self.p - 1.0;
        if self.q < pm1 {
            Regime::CompactSupport
        } else if self.q == pm1 {
            Regime::Critical
        } else {
            Regime::Positive
        }
    }

    pub fn m_finite(&self) -> Option<f64> {
        self.m.finite()
    }

    /// σ = ((p-1)d + p)/(d - p) when p < d, otherwise ∞.
    pub fn sigma(&self) -> ExtReal {
        let d = self.dim();
        if self.p < d {
            ExtReal::Finite(((self.p - 1.0) * d + self.p) / (d - self.p))
        } else {
            ExtReal::Infinite
        }
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, p={}, q={}, m={})", self.d, self.p, self.q, self.m)
    }
}

/// Exponents and dimensional constants derived from an admissible [`ParamSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub theta: f64,
    pub sigma: ExtReal,
    /// Finite m only.
    pub gamma: Option<f64>,
    /// d = 1 and finite m only.
    pub ell: Option<f64>,
    /// Finite m only.
    pub eta1: Option<f64>,
    pub eta2: f64,
    pub s_d: f64,
    pub omega_d: f64,
}

/// Volume of the unit ball in ℝ^d.
pub fn omega(d: u32) -> f64 {
    let d = d as f64;
    PI.powf(d / 2.0) / gamma(d / 2.0 + 1.0)
}

/// Surface area of the unit sphere in ℝ^d.
pub fn surface(d: u32) -> f64 {
    d as f64 * omega(d)
}

fn reject(msg: &str) -> Error {
    Error::Admissibility(msg.to_string())
}

/// Checks the parameter ranges and computes every derived exponent.
pub fn validate(params: &ParamSet) -> Result<Exponents> {
    let ParamSet { d, p, q, m } = *params;
    if d == 0 {
        return Err(reject("d ≥ 1 required"));
    }
    if !p.is_finite() || !(p > 1.0) {
        return Err(reject("p ≤ 1"));
    }
    if !q.is_finite() || !(q >= 0.0) {
        return Err(reject("q < 0"));
    }
    let df = d as f64;
    let sigma = params.sigma();
    let eta2 = (p - 1.0) * (q + 1.0) + p;
    let s_d = surface(d);
    let omega_d = omega(d);
    match m {
        ExtReal::Infinite => {
            if !(p > df) {
                return Err(reject("p ≤ d with m=∞"));
            }
            let theta = p * df / (p * df + (q + 1.0) * (p - df));
            Ok(Exponents { theta, sigma, gamma: None, ell: None, eta1: None, eta2, s_d, omega_d })
        }
        ExtReal::Finite(m) => {
            if !m.is_finite() {
                return Err(reject("m must be finite or inf"));
            }
            if !(p > 2.0 * df / (df + 2.0)) {
                return Err(reject("p ≤ 2d/(d+2)"));
            }
            if let ExtReal::Finite(s) = sigma {
                if !(q < s - 1.0) {
                    return Err(reject("q ≥ σ−1"));
                }
            }
            if !(m > q) {
                return Err(reject("m ≤ q"));
            }
            if let ExtReal::Finite(s) = sigma {
                if !(m < s) {
                    return Err(reject("m ≥ σ"));
                }
            }
            let theta = p * df * (m - q) / ((m + 1.0) * (df * (p - q - 1.0) + p * (q + 1.0)));
            let gamma = (p * (m + 1.0) * (q + 1.0) + (p / 2.0 - 1.0) * df * (m + q) - df * q * m + (p - 1.0) * df)
                / (df * (m - q));
            let eta1 = (p - 1.0) * (m + 1.0) + p;
            let ell = (d == 1).then(|| (m - q) / ((m + 1.0) * eta2));
            Ok(Exponents { theta, sigma, gamma: Some(gamma), ell, eta1: Some(eta1), eta2, s_d, omega_d })
        }
    }
}

/// θ from the alternative denominator dp + (p-d)(q+1); finite m only.
pub fn theta_alternative(params: &ParamSet) -> Option<f64> {
    let m = params.m_finite()?;
    let (d, p, q) = (params.dim(), params.p, params.q);
    Some(p * d * (m - q) / ((m + 1.0) * (d * p + (p - d) * (q + 1.0))))
}

/// Peak value α_c = ((m+1)/(q+1))^{1/(m-q)} of the extremal profile.
pub fn alpha_peak(params: &ParamSet) -> Result<f64> {
    validate(params)?;
    let m = params.m_finite().ok_or_else(|| Error::Precondition("alpha_peak needs finite m".into()))?;
    let q = params.q;
    Ok(((m + 1.0) / (q + 1.0)).powf(1.0 / (m - q)))
}
