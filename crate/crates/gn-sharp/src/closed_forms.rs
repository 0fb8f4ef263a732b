//! Closed-form extremal profiles and best constants.

use crate::params::{self, validate, Exponents, ExtReal, ParamSet, Regime};
use crate::solver::{self, BestConstantResult, Method, ShootingConfig, TailModel};
use crate::specialfn::{beta_complete, beta_incomplete_upper, beta_inverse_xz, gamma, ln_gamma};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Asymptotic law of an infinite-support profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Decay {
    Algebraic { rate: f64 },
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    Finite { radius: f64 },
    Infinite { decay: Decay },
}

impl Support {
    pub fn radius(&self) -> Option<f64> {
        match self {
            Support::Finite { radius } => Some(*radius),
            Support::Infinite { .. } => None,
        }
    }
}

/// Scalar coefficients of a closed-form family; absent entries are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProfileCoefficients {
    pub bar_c: Option<f64>,
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub r: Option<f64>,
    pub alpha_exp: Option<f64>,
}

/// Closed-form families with the constants needed to evaluate them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// d = 1, finite m, q < p-1: incomplete-Beta inverse with touchdown at `radius`.
    OneDCompact { alpha_c: f64, bar_c: f64, radius: f64, a: f64, b: f64, mq: f64 },
    /// d = 1, finite m, q ≥ p-1: positive on [0, ∞); `b ≤ 0`.
    OneDPositive { alpha_c: f64, bar_c: f64, a: f64, b: f64, mq: f64 },
    /// d = 1, m = ∞, q = p-1: e^{-rate·r}.
    InfExponential { rate: f64 },
    /// d = 1, m = ∞, q < p-1: (1 - r/R)₊^power.
    InfCompact { radius: f64, power: f64 },
    /// d = 1, m = ∞, q > p-1: (1 + coef·r)^{-power}.
    InfAlgebraic { coef: f64, power: f64 },
    /// m = ∞, q = 0, p > d.
    LinftyQ0 { dim: f64, radius: f64, a: f64, b: f64, scale: f64 },
    /// K (R^{p'} - r^{p'})₊^α with p' = p/(p-1).
    Barenblatt { k: f64, radius: f64, alpha: f64, pp: f64 },
    /// K (L + r^{p'})^{-α}.
    Positive { k: f64, l: f64, alpha: f64, pp: f64 },
}

impl ClosedForm {
    pub fn tag(&self) -> &'static str {
        match self {
            ClosedForm::OneDCompact { .. } => "one_d_compact",
            ClosedForm::OneDPositive { .. } => "one_d_positive",
            ClosedForm::InfExponential { .. } => "one_d_inf_exponential",
            ClosedForm::InfCompact { .. } => "one_d_inf_compact",
            ClosedForm::InfAlgebraic { .. } => "one_d_inf_algebraic",
            ClosedForm::LinftyQ0 { .. } => "linfty_q0",
            ClosedForm::Barenblatt { .. } => "barenblatt",
            ClosedForm::Positive { .. } => "positive",
        }
    }

    pub fn coefficients(&self) -> ProfileCoefficients {
        let mut c = ProfileCoefficients::default();
        match *self {
            ClosedForm::OneDCompact { bar_c, radius, .. } => {
                c.bar_c = Some(bar_c);
                c.r = Some(radius);
            }
            ClosedForm::OneDPositive { bar_c, .. } => c.bar_c = Some(bar_c),
            ClosedForm::InfExponential { .. } => {}
            ClosedForm::InfCompact { radius, power } => {
                c.r = Some(radius);
                c.alpha_exp = Some(power);
            }
            ClosedForm::InfAlgebraic { power, .. } => c.alpha_exp = Some(power),
            ClosedForm::LinftyQ0 { radius, .. } => c.r = Some(radius),
            ClosedForm::Barenblatt { k, radius, alpha, .. } => {
                c.k = Some(k);
                c.r = Some(radius);
                c.alpha_exp = Some(alpha);
            }
            ClosedForm::Positive { k, l, alpha, .. } => {
                c.k = Some(k);
                c.l = Some(l);
                c.alpha_exp = Some(alpha);
            }
        }
        c
    }

    /// Value and derivative at radius `r ≥ 0`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        match *self {
            ClosedForm::OneDCompact { alpha_c, bar_c, radius, a, b, mq } => {
                if r >= radius {
                    return (0.0, 0.0);
                }
                let total = beta_complete(a, b).unwrap_or(f64::NAN);
                let y = (bar_c * (radius - r)).min(total);
                let (v, z) = beta_inverse_xz(y, a, b).unwrap_or((f64::NAN, f64::NAN));
                if v <= 0.0 {
                    return (0.0, 0.0);
                }
                let u = alpha_c * v.powf(1.0 / mq);
                let du = -u * bar_c * v.powf(-a) * z.powf(1.0 - b) / mq;
                (u, du)
            }
            ClosedForm::OneDPositive { alpha_c, bar_c, a, b, mq } => {
                let (x, z) = beta_inverse_xz(bar_c * r, a, b).unwrap_or((f64::NAN, f64::NAN));
                if z <= 0.0 {
                    return (0.0, 0.0);
                }
                let u = alpha_c * z.powf(1.0 / mq);
                let du = -u * bar_c * x.powf(1.0 - a) * z.powf(-b) / mq;
                (u, du)
            }
            ClosedForm::InfExponential { rate } => {
                let u = (-rate * r).exp();
                (u, -rate * u)
            }
            ClosedForm::InfCompact { radius, power } => {
                if r >= radius {
                    return (0.0, 0.0);
                }
                let s = 1.0 - r / radius;
                (s.powf(power), -power / radius * s.powf(power - 1.0))
            }
            ClosedForm::InfAlgebraic { coef, power } => {
                let s = 1.0 + coef * r;
                (s.powf(-power), -power * coef * s.powf(-power - 1.0))
            }
            ClosedForm::LinftyQ0 { dim, radius, a, b, scale } => {
                if r >= radius {
                    return (0.0, 0.0);
                }
                let u = if r == 0.0 {
                    scale * beta_complete(b, a).unwrap_or(f64::NAN)
                } else {
                    scale * beta_incomplete_upper((r / radius).powf(dim), b, a)
                };
                let p = b / (b - 1.0);
                let du = if r == 0.0 && dim > 1.0 {
                    f64::NEG_INFINITY
                } else {
                    // (R^d - r^d)/(d r^{d-1}) without cancellation near R
                    let s = -(dim * (r / radius).ln()).exp_m1();
                    -(radius.powf(dim) * s / (dim * r.powf(dim - 1.0))).powf(1.0 / (p - 1.0))
                };
                (u, du)
            }
            ClosedForm::Barenblatt { k, radius, alpha, pp } => {
                let g = radius.powf(pp) - r.powf(pp);
                if g <= 0.0 {
                    return (0.0, 0.0);
                }
                let u = k * g.powf(alpha);
                let du = -k * alpha * pp * g.powf(alpha - 1.0) * r.powf(pp - 1.0);
                (u, du)
            }
            ClosedForm::Positive { k, l, alpha, pp } => {
                let g = l + r.powf(pp);
                let u = k * g.powf(-alpha);
                let du = -k * alpha * pp * g.powf(-alpha - 1.0) * r.powf(pp - 1.0);
                (u, du)
            }
        }
    }
}

/// Sampled profile on strictly increasing nodes, with cubic Hermite
/// interpolation of both u and the flux w = r^{d-1}|u'|^{p-2}u'.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridProfile {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub du: Vec<f64>,
    pub dw: Vec<f64>,
    /// Flux w(0+) when the profile carries a point mass at the origin.
    pub origin_flux: Option<f64>,
    /// Decay law fitted at the last node, used beyond it.
    pub tail: Option<Decay>,
    /// Shift σ of an algebraic tail u_e((r+σ)/(r_e+σ))^{-rate}.
    #[serde(default)]
    pub tail_shift: f64,
    /// Prefactor exponent β of an exponential tail r^{-β}e^{-rate r}.
    #[serde(default)]
    pub tail_power: f64,
}

impl GridProfile {
    fn locate(&self, r: f64) -> usize {
        match self.r.binary_search_by(|x| x.partial_cmp(&r).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.r.len() - 2),
        }
    }

    fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1
    }

    /// Interpolated (u, w) at an interior point.
    pub fn interp(&self, r: f64) -> (f64, f64) {
        let i = self.locate(r);
        let (x0, x1) = (self.r[i], self.r[i + 1]);
        let u = Self::hermite(x0, x1, self.u[i], self.u[i + 1], self.du[i], self.du[i + 1], r);
        let w = Self::hermite(x0, x1, self.w[i], self.w[i + 1], self.dw[i], self.dw[i + 1], r);
        (u, w)
    }

    pub fn r_end(&self) -> f64 {
        *self.r.last().unwrap_or(&0.0)
    }

    /// Keeps every other node (plus the last), for error estimation.
    pub fn coarsened(&self) -> GridProfile {
        let n = self.r.len();
        let mut idx: Vec<usize> = (0..n).step_by(2).collect();
        if *idx.last().unwrap() != n - 1 {
            idx.push(n - 1);
        }
        let pick = |v: &Vec<f64>| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        GridProfile {
            r: pick(&self.r),
            u: pick(&self.u),
            w: pick(&self.w),
            du: pick(&self.du),
            dw: pick(&self.dw),
            origin_flux: self.origin_flux,
            tail: self.tail,
            tail_shift: self.tail_shift,
            tail_power: self.tail_power,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileRepr {
    ClosedForm(ClosedForm),
    Grid(GridProfile),
}

/// A radial extremal profile u(r) with its support, peak and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub repr: ProfileRepr,
    pub support: Support,
    pub peak: f64,
    pub params: ParamSet,
}

impl RadialProfile {
    fn closed(cf: ClosedForm, support: Support, params: ParamSet) -> Self {
        let peak = cf.eval(0.0).0;
        RadialProfile { repr: ProfileRepr::ClosedForm(cf), support, peak, params }
    }

    pub fn family_tag(&self) -> &'static str {
        match &self.repr {
            ProfileRepr::ClosedForm(cf) => cf.tag(),
            ProfileRepr::Grid(_) => "grid",
        }
    }

    pub fn coefficients(&self) -> ProfileCoefficients {
        match &self.repr {
            ProfileRepr::ClosedForm(cf) => cf.coefficients(),
            ProfileRepr::Grid(_) => ProfileCoefficients { r: self.support.radius(), ..Default::default() },
        }
    }

    /// u(r).
    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// u'(r).
    pub fn derivative(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    /// w(r) = r^{d-1}|u'|^{p-2}u'.
    pub fn flux(&self, r: f64) -> f64 {
        if let ProfileRepr::Grid(g) = &self.repr {
            let r = r.abs();
            if r > g.r[0] && r < g.r_end() {
                return g.interp(r).1;
            }
        }
        let du = self.derivative(r);
        let p = self.params.p;
        r.abs().powi(self.params.d as i32 - 1) * du.signum() * du.abs().powf(p - 1.0)
    }

    /// (u(r), u'(r)).
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        match &self.repr {
            ProfileRepr::ClosedForm(cf) => cf.eval(r),
            ProfileRepr::Grid(g) => self.eval_grid(g, r),
        }
    }

    fn slope_from_flux(&self, r: f64, w: f64) -> f64 {
        let d = self.params.d;
        let base = if d == 1 { w.abs() } else { w.abs() / r.powi(d as i32 - 1) };
        if w == 0.0 {
            0.0
        } else {
            w.signum() * base.powf(1.0 / (self.params.p - 1.0))
        }
    }

    fn eval_grid(&self, g: &GridProfile, r: f64) -> (f64, f64) {
        let r0 = g.r[0];
        let n = g.r.len();
        if r <= r0 {
            return match g.origin_flux {
                Some(w0) if r0 > 0.0 => {
                    let (p, d) = (self.params.p, self.params.dim());
                    let kappa = (p - d) / (p - 1.0);
                    let c = w0.abs().powf(1.0 / (p - 1.0));
                    let u = g.u[0] + c * (r0.powf(kappa) - r.powf(kappa)) / kappa;
                    (u, -c * r.powf(kappa - 1.0))
                }
                _ if r0 > 0.0 && g.du[0] != 0.0 => {
                    // regular origin: u ≈ u(0) - c r^{p'}
                    let pp = self.params.p / (self.params.p - 1.0);
                    let c = g.du[0].abs() / (pp * r0.powf(pp - 1.0));
                    let u = g.u[0] + c * (r0.powf(pp) - r.powf(pp));
                    (u, -c * pp * r.powf(pp - 1.0))
                }
                _ => (g.u[0], g.du[0]),
            };
        }
        let re = g.r[n - 1];
        if r >= re {
            let decay = match self.support {
                Support::Finite { .. } => return (0.0, 0.0),
                Support::Infinite { decay } => g.tail.unwrap_or(decay),
            };
            let tail = TailModel { r_e: re, u_e: g.u[n - 1], decay, shift: g.tail_shift, power: g.tail_power };
            return tail.eval(r);
        }
        let (u, w) = g.interp(r);
        (u.max(0.0), self.slope_from_flux(r, w))
    }

    /// Right end of the region where the profile is represented explicitly:
    /// the support radius, or the last grid node for infinite grids.
    pub fn explicit_end(&self) -> Option<f64> {
        match (&self.support, &self.repr) {
            (Support::Finite { radius }, ProfileRepr::Grid(g)) => Some(radius.max(g.r_end())),
            (Support::Finite { radius }, _) => Some(*radius),
            (Support::Infinite { .. }, ProfileRepr::Grid(g)) => Some(g.r_end()),
            _ => None,
        }
    }
}

fn finite_m(params: &ParamSet, what: &str) -> Result<f64> {
    params.m_finite().ok_or_else(|| Error::Precondition(format!("{what} needs finite m")))
}

fn require_d1(params: &ParamSet, what: &str) -> Result<()> {
    if params.d != 1 {
        return Err(Error::Precondition(format!("{what} is only available for d = 1")));
    }
    Ok(())
}

/// Parameter-family test with relative tolerance 1e-12.
fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// True when m = (q+1)(p-1)/p and q < p-1.
pub fn is_barenblatt_family(params: &ParamSet) -> bool {
    match params.m_finite() {
        Some(m) => params.q < params.p - 1.0 && same(m, (params.q + 1.0) * (params.p - 1.0) / params.p),
        None => false,
    }
}

/// True when m = (p(q-1)+1)/(p-1) and q > p-1.
pub fn is_positive_family(params: &ParamSet) -> bool {
    match params.m_finite() {
        Some(m) => params.q > params.p - 1.0 && same(m, (params.p * (params.q - 1.0) + 1.0) / (params.p - 1.0)),
        None => false,
    }
}

/// 1-D extremal profile for finite m.
pub fn profile_1d_finite_m(params: &ParamSet) -> Result<RadialProfile> {
    validate(params)?;
    require_d1(params, "profile_1d_finite_m")?;
    let m = finite_m(params, "profile_1d_finite_m")?;
    let (p, q) = (params.p, params.q);
    let mq = m - q;
    let alpha_c = params::alpha_peak(params)?;
    let bar_c = (p / (p - 1.0)).powf(1.0 / p)
        * mq
        * (m + 1.0).powf((1.0 + q - p) / (p * mq))
        * (q + 1.0).powf((p - m - 1.0) / (p * mq));
    match params.regime() {
        Regime::CompactSupport => {
            let a = (p - 1.0 - q) / (p * mq);
            let b = 1.0 - 1.0 / p;
            let radius = ((p - 1.0) / p).powf(1.0 / p)
                * (m + 1.0).powf((p - q - 1.0) / (p * mq))
                * (q + 1.0).powf(1.0 / p - (p - q - 1.0) / (p * mq))
                / mq
                * beta_complete(b, a)?;
            let cf = ClosedForm::OneDCompact { alpha_c, bar_c, radius, a, b, mq };
            Ok(RadialProfile::closed(cf, Support::Finite { radius }, *params))
        }
        regime => {
            let a = 1.0 - 1.0 / p;
            let b = (p - 1.0 - q) / (p * mq);
            let decay = if regime == Regime::Critical {
                Decay::Exponential { rate: (p - 1.0).powf(-1.0 / p) }
            } else {
                Decay::Algebraic { rate: p / (q + 1.0 - p) }
            };
            let cf = ClosedForm::OneDPositive { alpha_c, bar_c, a, b, mq };
            Ok(RadialProfile::closed(cf, Support::Infinite { decay }, *params))
        }
    }
}

/// 1-D extremal profile for m = ∞.
pub fn profile_1d_m_infinity(params: &ParamSet) -> Result<RadialProfile> {
    validate(params)?;
    require_d1(params, "profile_1d_m_infinity")?;
    if !params.m.is_infinite() {
        return Err(Error::Precondition("profile_1d_m_infinity needs m = ∞".into()));
    }
    let (p, q) = (params.p, params.q);
    let (cf, support) = match params.regime() {
        Regime::Critical => {
            let rate = (p - 1.0).powf(-1.0 / p);
            (ClosedForm::InfExponential { rate }, Support::Infinite { decay: Decay::Exponential { rate } })
        }
        Regime::CompactSupport => {
            let radius = (p - 1.0).powf(1.0 / p) * (q + 1.0).powf(1.0 / p) / (p.powf(1.0 / p - 1.0) * (p - q - 1.0));
            let power = p / (p - q - 1.0);
            (ClosedForm::InfCompact { radius, power }, Support::Finite { radius })
        }
        Regime::Positive => {
            let coef = p.powf(1.0 / p - 1.0) * (q + 1.0 - p) / ((p - 1.0).powf(1.0 / p) * (q + 1.0).powf(1.0 / p));
            let power = p / (q + 1.0 - p);
            (ClosedForm::InfAlgebraic { coef, power }, Support::Infinite { decay: Decay::Algebraic { rate: power } })
        }
    };
    Ok(RadialProfile::closed(cf, support, *params))
}

/// m = ∞, q = 0 profile in any dimension d < p.
pub fn linfty_profile_q0(params: &ParamSet) -> Result<RadialProfile> {
    validate(params)?;
    if !params.m.is_infinite() || params.q != 0.0 {
        return Err(Error::Precondition("linfty_profile_q0 needs m = ∞ and q = 0".into()));
    }
    let (p, d) = (params.p, params.dim());
    let a = (p - d) / (d * (p - 1.0));
    let b = p / (p - 1.0);
    let radius = d * beta_complete(a, b)?.powf(-(p - 1.0) / p);
    let scale = (radius / d).powf(p / (p - 1.0));
    let cf = ClosedForm::LinftyQ0 { dim: d, radius, a, b, scale };
    Ok(RadialProfile::closed(cf, Support::Finite { radius }, *params))
}

fn family_mismatch(what: &str, params: &ParamSet) -> Error {
    Error::FamilyMismatch(format!("{params} is not in the {what} family"))
}

/// Barenblatt-type compact profile for m = (q+1)(p-1)/p.
pub fn barenblatt_profile(params: &ParamSet) -> Result<RadialProfile> {
    let ex = validate(params)?;
    if !is_barenblatt_family(params) {
        return Err(family_mismatch("Barenblatt", params));
    }
    let (p, d) = (params.p, params.dim());
    let m = finite_m(params, "barenblatt_profile")?;
    let theta = ex.theta;
    let alpha = (p - 1.0) / (p - m - 1.0);
    let radius = m.powf(-(p - 1.0) / p) * d / ((m + 1.0) * theta);
    let k = (d / ((m + 1.0) * theta)).powf(1.0 / (m - p + 1.0)) * (p / (p - m - 1.0)).powf((p - 1.0) / (m - p + 1.0));
    let cf = ClosedForm::Barenblatt { k, radius, alpha, pp: p / (p - 1.0) };
    Ok(RadialProfile::closed(cf, Support::Finite { radius }, *params))
}

/// Positive algebraically decaying profile for m = (p(q-1)+1)/(p-1).
pub fn positive_profile(params: &ParamSet) -> Result<RadialProfile> {
    validate(params)?;
    if !is_positive_family(params) {
        return Err(family_mismatch("positive", params));
    }
    let (p, q, d) = (params.p, params.q, params.dim());
    let alpha = (p - 1.0) / (q + 1.0 - p);
    let crit = p * (alpha + 1.0) - d;
    if crit == 0.0 {
        return Err(Error::SobolevCritical);
    }
    if crit < 0.0 {
        return Err(Error::Precondition("p(α+1) - d must be positive".into()));
    }
    let base = (p * q - d * (q + 1.0 - p)) / (q + 1.0 - p);
    let k = base.powf(1.0 / (q + 1.0 - p)) * (p / (q + 1.0 - p)).powf((p - 1.0) / (q + 1.0 - p));
    let l = base.powf(p / (p - 1.0)) / q;
    let cf = ClosedForm::Positive { k, l, alpha, pp: p / (p - 1.0) };
    let decay = Decay::Algebraic { rate: p / (q + 1.0 - p) };
    Ok(RadialProfile::closed(cf, Support::Infinite { decay }, *params))
}

/// C = θ^{-θ/p}(1-θ)^{θ/p - 1/(m+1)} M_c^{-θ/d}; the 1/(m+1) term drops for m = ∞.
pub fn constant_from_mass(params: &ParamSet, ex: &Exponents, mc: f64) -> f64 {
    let (p, d, th) = (params.p, params.dim(), ex.theta);
    let inv_m1 = params.m_finite().map_or(0.0, |m| 1.0 / (m + 1.0));
    th.powf(-th / p) * (1.0 - th).powf(th / p - inv_m1) * mc.powf(-th / d)
}

/// β = p(γ-p/2)^{E-1}(γ+p/2)^{-E} M_c^{p/d} with E = (γ+p/2)/(m+1); finite m.
pub fn beta_from_mass(params: &ParamSet, ex: &Exponents, mc: f64) -> Option<f64> {
    let m = params.m_finite()?;
    let g = ex.gamma?;
    let (p, d) = (params.p, params.dim());
    let e = (g + p / 2.0) / (m + 1.0);
    let ln_beta = p.ln() + (e - 1.0) * (g - p / 2.0).ln() - e * (g + p / 2.0).ln() + p / d * mc.ln();
    Some(ln_beta.exp())
}

fn closed_result(params: &ParamSet, ex: &Exponents, mc: f64, c: f64) -> BestConstantResult {
    BestConstantResult {
        theta: ex.theta,
        m_c: mc,
        c,
        beta: beta_from_mass(params, ex, mc),
        method: Method::ClosedForm,
        err_estimate: 0.0,
    }
}

/// Closed-form best constant for d = 1.
pub fn closed_constant_1d(params: &ParamSet) -> Result<BestConstantResult> {
    let ex = validate(params)?;
    require_d1(params, "closed_constant_1d")?;
    let mc = closed_mc(params)?;
    let p = params.p;
    let q = params.q;
    match params.m {
        ExtReal::Finite(m) => {
            let mq = m - q;
            let eta1 = ex.eta1.expect("finite m");
            let eta2 = ex.eta2;
            let ell = ex.ell.expect("d = 1");
            let bb = beta_complete(eta2 / (p * mq), (2.0 * p - 1.0) / p)?;
            // Logs keep η^{η/(m-q)} finite when m - q is small.
            let ln_beta = p * 2f64.ln() + (1.0 - p) * (p - 1.0).ln() + eta1 / mq * eta1.ln()
                - (2.0 * p - 1.0) * mq.ln()
                - eta2 / mq * eta2.ln()
                + p * bb.ln();
            let beta = ln_beta.exp();
            let c = (-ell * ln_beta).exp();
            Ok(BestConstantResult { beta: Some(beta), ..closed_result(params, &ex, mc, c) })
        }
        ExtReal::Infinite => {
            let s = p + (p - 1.0) * (q + 1.0);
            let c = (s / (2.0 * p)).powf(p / s);
            Ok(BestConstantResult { beta: None, ..closed_result(params, &ex, mc, c) })
        }
    }
}

fn ln_gamma_ratio(num: f64, den1: f64, den2: f64) -> Result<f64> {
    Ok(ln_gamma(num)? - ln_gamma(den1)? - ln_gamma(den2)?)
}

/// Best constant of the two classical closed-form families.
pub fn dpd_constant(params: &ParamSet) -> Result<BestConstantResult> {
    let ex = validate(params)?;
    let (p, q, d) = (params.p, params.q, params.dim());
    let th = ex.theta;
    let inv_sd = gamma(d / 2.0 + 1.0) / (d * PI.powf(d / 2.0));
    let c = if is_barenblatt_family(params) {
        let m = finite_m(params, "dpd_constant")?;
        let eta = d * p - (m + 1.0) * (d - p);
        let s = p * m / (p - m - 1.0);
        let lg = ln_gamma_ratio(s + d * (p - 1.0) / p + 1.0, 1.0 + s, d * (p - 1.0) / p)?;
        ((p - m - 1.0) / p).powf(th)
            * (p * (m + 1.0) / (d * (p - m - 1.0))).powf(th / p)
            * (p * (m + 1.0) / eta).powf((1.0 - th) / (q + 1.0) - th / d)
            * (p / (p - 1.0)).powf(th / d)
            * inv_sd.powf(th / d)
            * (lg * th / d).exp()
    } else if is_positive_family(params) {
        let m = finite_m(params, "dpd_constant")?;
        let eta = d * p - (d - p) * (q + 1.0);
        let s = (q + 1.0) * (p - 1.0) / (q + 1.0 - p);
        let lg = ln_gamma_ratio(s, s - d * (p - 1.0) / p, d * (p - 1.0) / p)?;
        ((q + 1.0 - p) / p).powf(th)
            * (p * (q + 1.0) / (d * (q + 1.0 - p))).powf(th / p)
            * (eta / (p * (q + 1.0))).powf(1.0 / (m + 1.0))
            * (p / (p - 1.0)).powf(th / d)
            * inv_sd.powf(th / d)
            * (lg * th / d).exp()
    } else {
        return Err(family_mismatch("Barenblatt or positive", params));
    };
    let mc = closed_mc(params)?;
    Ok(closed_result(params, &ex, mc, c))
}

/// Closed-form mass M_c = ∫ u_c^{q+1} dx.
pub fn closed_mc(params: &ParamSet) -> Result<f64> {
    let ex = validate(params)?;
    let (p, q, d) = (params.p, params.q, params.dim());
    if params.d == 1 {
        return match params.m {
            ExtReal::Finite(m) => {
                let mq = m - q;
                let alpha_c = params::alpha_peak(params)?;
                let bar_c = (p / (p - 1.0)).powf(1.0 / p)
                    * mq
                    * (m + 1.0).powf((1.0 + q - p) / (p * mq))
                    * (q + 1.0).powf((p - m - 1.0) / (p * mq));
                Ok(2.0 * alpha_c.powf(q + 1.0) * beta_complete(ex.eta2 / (p * mq), 1.0 - 1.0 / p)? / bar_c)
            }
            ExtReal::Infinite => Ok(2.0 * (p - 1.0).powf(1.0 / p) * (q + 1.0).powf(1.0 / p)
                / (p.powf(1.0 / p - 1.0) * (p + (p - 1.0) * (q + 1.0)))),
        };
    }
    if is_barenblatt_family(params) {
        let prof = barenblatt_profile(params)?;
        if let ProfileRepr::ClosedForm(ClosedForm::Barenblatt { k, radius, alpha, .. }) = prof.repr {
            let m = finite_m(params, "closed_mc")?;
            let expo = d + m * p * p / ((p - 1.0) * (p - m - 1.0));
            return Ok(d * ex.omega_d * k.powf(q + 1.0) * radius.powf(expo) * (p - 1.0) / p
                * beta_complete(d * (p - 1.0) / p, alpha * (q + 1.0) + 1.0)?);
        }
    }
    if is_positive_family(params) {
        let prof = positive_profile(params)?;
        if let ProfileRepr::ClosedForm(ClosedForm::Positive { k, l, alpha, .. }) = prof.repr {
            let dp = d * (p - 1.0) / p;
            return Ok(d * ex.omega_d * k.powf(q + 1.0) * l.powf(dp - alpha * (q + 1.0)) * (p - 1.0) / p
                * beta_complete(alpha * (q + 1.0) - dp, dp)?);
        }
    }
    Err(family_mismatch("closed-form mass", params))
}

/// Point mass a = 2(p/((q+1)(p-1)))^{(p-1)/p} of the d = 1, m = ∞ problem.
pub fn delta_mass_1d(params: &ParamSet) -> Result<f64> {
    validate(params)?;
    require_d1(params, "delta_mass_1d")?;
    if !params.m.is_infinite() {
        return Err(Error::Precondition("delta_mass_1d needs m = ∞".into()));
    }
    let (p, q) = (params.p, params.q);
    Ok(2.0 * (p / ((q + 1.0) * (p - 1.0))).powf((p - 1.0) / p))
}

/// Best constant for q = 0, m = 1 from the first touchdown radius R.
pub fn nash_constant(params: &ParamSet, config: &ShootingConfig) -> Result<BestConstantResult> {
    let ex = validate(params)?;
    if params.q != 0.0 || params.m != ExtReal::Finite(1.0) {
        return Err(Error::Precondition("nash_constant needs q = 0 and m = 1".into()));
    }
    let (radius, method, err) = if params.d == 1 {
        let prof = profile_1d_finite_m(params)?;
        (prof.support.radius().expect("compact"), Method::ClosedForm, 0.0)
    } else {
        let prof = solver::shoot_finite_m(params, config)?;
        let r = prof
            .support
            .radius()
            .ok_or_else(|| Error::NonConvergence("shooting did not produce a touchdown radius".into()))?;
        (r, Method::ShootQuad, config.bisection_tol.max(1e-12) * r)
    };
    let (p, d) = (params.p, params.dim());
    let th = p * d / (2.0 * (p * d + p - d));
    let c = th.powf(-th / p) * (1.0 - th).powf(th / p - 0.5) * radius.powf(-th) * ex.omega_d.powf(-th / d);
    let mc = ex.omega_d * radius.powi(params.d as i32);
    Ok(BestConstantResult {
        theta: ex.theta,
        m_c: mc,
        c,
        beta: beta_from_mass(params, &ex, mc),
        method,
        err_estimate: err * th * c / radius,
    })
}

/// Sharp Sobolev constant for 1 < p < d.
pub fn sobolev_constant(d: u32, p: f64) -> Result<f64> {
    let df = d as f64;
    if !(p > 1.0 && p < df) {
        return Err(Error::Precondition(format!("sobolev_constant needs 1 < p < d, got p = {p}, d = {d}")));
    }
    let lg = ln_gamma(1.0 + df / 2.0)? + ln_gamma(df)? - ln_gamma(df / p)? - ln_gamma(1.0 + df - df / p)?;
    Ok(PI.powf(-0.5) * df.powf(-1.0 / p) * ((p - 1.0) / (df - p)).powf(1.0 - 1.0 / p) * (lg / df).exp())
}
