//! Independent checks: the inequality on random test functions, energy and
//! Pohozaev-type identities, decay laws, the scaling reduction, the Strauss
//! bound, m → ∞ limits and the Nash eigenvalue link.

use crate::closed_forms::{
    closed_constant_1d, nash_constant, profile_1d_finite_m, profile_1d_m_infinity, Decay, ProfileRepr, RadialProfile,
    Support,
};
use crate::params::{self, validate, ExtReal, ParamSet, Regime};
use crate::quad;
use crate::solver::{gradient_norm_p, radial_norm, Radial, ShootingConfig, TailModel};
use crate::specialfn::gamma;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A·v(λ r) for a radial `v`.
pub struct Scaled<'a, R: Radial + ?Sized> {
    pub inner: &'a R,
    pub amplitude: f64,
    pub lambda: f64,
}

impl<R: Radial + ?Sized> Radial for Scaled<'_, R> {
    fn dim(&self) -> u32 {
        self.inner.dim()
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        let (u, du) = self.inner.eval(self.lambda * r);
        (self.amplitude * u, self.amplitude * self.lambda * du)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().into_iter().map(|b| b / self.lambda).collect()
    }

    fn tail(&self) -> Option<TailModel> {
        self.inner.tail().map(|t| TailModel {
            r_e: t.r_e / self.lambda,
            u_e: self.amplitude * t.u_e,
            shift: t.shift / self.lambda,
            power: t.power,
            decay: match t.decay {
                Decay::Algebraic { rate } => Decay::Algebraic { rate },
                Decay::Exponential { rate } => Decay::Exponential { rate: rate * self.lambda },
            },
        })
    }

    fn singular_origin(&self) -> Option<(f64, f64, f64)> {
        self.inner.singular_origin().map(|(r0, c, k)| (r0 / self.lambda, self.amplitude * c * self.lambda.powf(k), k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleFamily {
    Gaussian,
    CompactPoly,
    Tent,
    /// Cycles through the three shapes above.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BumpKind {
    /// A e^{-(r/w)²}
    Gaussian,
    /// A (1 - (r/w)²)₊^k
    CompactPoly { k: u32 },
    /// A (1 - r/w)₊
    Tent,
}

/// Randomized radial test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub d: u32,
    pub kind: BumpKind,
    pub amplitude: f64,
    pub width: f64,
}

impl Radial for Bump {
    fn dim(&self) -> u32 {
        self.d
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        let (a, w) = (self.amplitude, self.width);
        let x = r / w;
        match self.kind {
            BumpKind::Gaussian => {
                let u = a * (-x * x).exp();
                (u, -2.0 * x / w * u)
            }
            BumpKind::CompactPoly { k } => {
                if x >= 1.0 {
                    return (0.0, 0.0);
                }
                let s = 1.0 - x * x;
                let k = k as i32;
                (a * s.powi(k), -a * k as f64 * s.powi(k - 1) * 2.0 * x / w)
            }
            BumpKind::Tent => {
                if x >= 1.0 {
                    (0.0, 0.0)
                } else {
                    (a * (1.0 - x), -a / w)
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let end = match self.kind {
            BumpKind::Gaussian => 9.0 * self.width,
            _ => self.width,
        };
        (0..=16).map(|i| end * i as f64 / 16.0).collect()
    }

    fn tail(&self) -> Option<TailModel> {
        None
    }
}

/// The three norms entering the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// ‖u‖_{m+1}, or the sup norm for m = ∞.
    pub lhs: f64,
    pub q_norm: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSample {
    pub descriptor: Bump,
    pub norms: Norms,
    pub ratio: f64,
    pub slack: f64,
}

/// Sup over a grid refined geometrically towards the origin.
fn sup_norm<R: Radial + ?Sized>(u: &R) -> f64 {
    let b = u.breakpoints();
    let end = *b.last().unwrap_or(&1.0);
    let mut best = u.eval(0.0).0;
    for k in 0..60 {
        best = best.max(u.eval(end * 0.75f64.powi(k)).0);
    }
    for &x in &b {
        best = best.max(u.eval(x).0);
    }
    best
}

pub fn norms<R: Radial + ?Sized>(u: &R, params: &ParamSet) -> Result<Norms> {
    let (p, q) = (params.p, params.q);
    let lhs = match params.m {
        ExtReal::Finite(m) => radial_norm(u, m + 1.0)?.value.powf(1.0 / (m + 1.0)),
        ExtReal::Infinite => sup_norm(u),
    };
    Ok(Norms {
        lhs,
        q_norm: radial_norm(u, q + 1.0)?.value.powf(1.0 / (q + 1.0)),
        grad_norm: gradient_norm_p(u, p)?.value.powf(1.0 / p),
    })
}

/// ‖u‖_{m+1} / (‖u‖_{q+1}^{1-θ} ‖∇u‖_p^θ).
pub fn ratio<R: Radial + ?Sized>(u: &R, params: &ParamSet) -> Result<(Norms, f64)> {
    let ex = validate(params)?;
    let n = norms(u, params)?;
    let th = ex.theta;
    Ok((n, n.lhs / (n.q_norm.powf(1.0 - th) * n.grad_norm.powf(th))))
}

fn random_bump(rng: &mut ChaCha8Rng, d: u32, family: SampleFamily, i: usize) -> Bump {
    let amplitude = 10f64.powf(rng.gen_range(-1.0..1.0));
    let width = 10f64.powf(rng.gen_range(-0.7..0.7));
    let shape = match family {
        SampleFamily::Gaussian => 0,
        SampleFamily::CompactPoly => 1,
        SampleFamily::Tent => 2,
        SampleFamily::Mixed => i % 3,
    };
    let kind = match shape {
        0 => BumpKind::Gaussian,
        1 => BumpKind::CompactPoly { k: rng.gen_range(2..=4) },
        _ => BumpKind::Tent,
    };
    Bump { d, kind, amplitude, width }
}

/// Evaluates the inequality on `n` seeded random bumps.
pub fn check_inequality(
    family: SampleFamily,
    n: usize,
    params: &ParamSet,
    c: f64,
    seed: u64,
) -> Result<Vec<VerificationSample>> {
    validate(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let b = random_bump(&mut rng, params.d, family, i);
            let (norms, ratio) = ratio(&b, params)?;
            Ok(VerificationSample { descriptor: b, norms, ratio, slack: c - ratio })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub h_samples: Vec<(f64, f64)>,
    /// max |H(r) - H(r₀)|; meaningful as a conservation check in d = 1.
    pub h_variation: f64,
    /// max over sample intervals of |H(r₂) - H(r₁) + ∫(d-1)/r |u'|^p dr|.
    pub dissipation_residual: f64,
    pub f_value: Option<f64>,
    pub g_value: Option<f64>,
    /// (p-1)/p · S_d R^d |u'(R)|^p for touchdown profiles, else 0.
    pub contact_term: f64,
    /// ‖∇u‖_p^p, the natural scale of the functionals.
    pub scale: f64,
}

fn h_value(prof: &RadialProfile, r: f64) -> f64 {
    let (u, du) = prof.eval(r);
    let (p, q) = (prof.params.p, prof.params.q);
    let top = prof.params.m_finite().map_or(0.0, |m| u.max(0.0).powf(m + 1.0) / (m + 1.0));
    (p - 1.0) / p * du.abs().powf(p) + top - u.max(0.0).powf(q + 1.0) / (q + 1.0)
}

/// Right end of the sampled range for diagnostics.
fn sample_end(prof: &RadialProfile) -> f64 {
    match (prof.support, prof.explicit_end()) {
        (Support::Finite { radius }, _) => radius,
        (_, Some(e)) => e,
        _ => {
            let floor = 1e-8 * prof.peak;
            let mut r = 1.0;
            while prof.value(r) > floor && r < 1e8 {
                r *= 2.0;
            }
            r
        }
    }
}

pub fn energy_report(prof: &RadialProfile) -> Result<EnergyReport> {
    let params = prof.params;
    let ex = validate(&params)?;
    let (p, q, d) = (params.p, params.q, params.dim());
    let end = sample_end(prof);
    let start = match prof.singular_origin() {
        Some((r0, _, _)) => r0,
        None => 0.0,
    };
    let n = 64;
    let rs: Vec<f64> = (1..n).map(|i| start + (end - start) * i as f64 / n as f64).collect();
    let h_samples: Vec<(f64, f64)> = rs.iter().map(|&r| (r, h_value(prof, r))).collect();
    let h0 = h_samples[0].1;
    let h_variation = h_samples.iter().map(|s| (s.1 - h0).abs()).fold(0.0, f64::max);
    let mut dissipation_residual: f64 = 0.0;
    for w in h_samples.windows(2) {
        let (r1, h1) = w[0];
        let (r2, h2) = w[1];
        let loss = if params.d == 1 {
            0.0
        } else {
            quad::integrate(|r: f64| (d - 1.0) / r * prof.derivative(r).abs().powf(p), r1, r2, 1e-300, 1e-12, 200).value
        };
        dissipation_residual = dissipation_residual.max((h2 - h1 + loss).abs());
    }
    let grad = gradient_norm_p(prof, p)?.value;
    let qmass = radial_norm(prof, q + 1.0)?.value;
    let (f_value, g_value) = match params.m {
        ExtReal::Finite(m) => {
            let mmass = radial_norm(prof, m + 1.0)?.value;
            let f = (d * (p - 1.0) + p) / p * grad - d * m / (m + 1.0) * mmass + d * q / (q + 1.0) * qmass;
            (Some(f), None)
        }
        ExtReal::Infinite => (None, Some((p - d) / p * grad - d / (q + 1.0) * qmass)),
    };
    let contact_term = match prof.support {
        Support::Finite { radius } => {
            let slope = prof.derivative(radius * (1.0 - 1e-12));
            (p - 1.0) / p * ex.s_d * radius.powf(d) * slope.abs().powf(p)
        }
        Support::Infinite { .. } => 0.0,
    };
    Ok(EnergyReport { h_samples, h_variation, dissipation_residual, f_value, g_value, contact_term, scale: grad })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DecayKind {
    Algebraic,
    Exponential,
    /// Finite-m critical case: only an exponential upper envelope is checked.
    ExponentialEnvelope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub kind: DecayKind,
    /// Fitted rate, or for envelopes the largest log-excess over the bound.
    pub fitted: f64,
    pub expected: f64,
    pub rel_err: f64,
    pub r_range: (f64, f64),
    /// For envelopes: the threshold r_* used, and whether it came from the
    /// stated formula (`true`) or the u < 1 fallback.
    pub r_star: Option<(f64, bool)>,
    pub passed: bool,
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Radii spanning the last decade of the represented profile, without the
/// final 5 % of them.
fn last_decade(prof: &RadialProfile) -> Result<Vec<f64>> {
    let end = sample_end(prof);
    let rs: Vec<f64> = match &prof.repr {
        ProfileRepr::Grid(g) => g.r.iter().copied().filter(|&r| r >= end / 10.0 && r > 0.0).collect(),
        ProfileRepr::ClosedForm(_) => (0..=200).map(|i| end / 10.0 * 10f64.powf(i as f64 / 200.0)).collect(),
    };
    let keep = rs.len() - rs.len() / 20;
    let rs: Vec<f64> = rs[..keep].iter().copied().filter(|&r| prof.value(r) > 0.0).collect();
    if rs.len() < 8 {
        return Err(Error::InsufficientTail(format!("{} usable radii in the last decade", rs.len())));
    }
    Ok(rs)
}

pub fn decay_check(prof: &RadialProfile) -> Result<DecayReport> {
    let params = prof.params;
    let (p, q) = (params.p, params.q);
    if let Support::Finite { .. } = prof.support {
        return Err(Error::InsufficientTail("profile has compact support".into()));
    }
    let rs = last_decade(prof)?;
    let r_range = (rs[0], rs[rs.len() - 1]);
    let logs: Vec<f64> = rs.iter().map(|&r| prof.value(r).ln()).collect();
    match (params.regime(), params.m) {
        (Regime::Positive, _) => {
            let lr: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
            let fitted = -least_squares_slope(&lr, &logs);
            let expected = p / (q + 1.0 - p);
            let rel_err = (fitted - expected).abs() / expected;
            Ok(DecayReport {
                kind: DecayKind::Algebraic,
                fitted,
                expected,
                rel_err,
                r_range,
                r_star: None,
                passed: rel_err <= 0.05,
            })
        }
        (Regime::Critical, ExtReal::Infinite) => {
            let fitted = -least_squares_slope(&rs, &logs);
            let expected = (p - 1.0).powf(-1.0 / p);
            let rel_err = (fitted - expected).abs() / expected;
            Ok(DecayReport {
                kind: DecayKind::Exponential,
                fitted,
                expected,
                rel_err,
                r_range,
                r_star: None,
                passed: rel_err <= 0.05,
            })
        }
        (Regime::Critical, ExtReal::Finite(m)) => {
            let c = (p / (p - 1.0)).powf(1.0 / p) * (1.0 / p - 1.0 / (m + 1.0)).powf(1.0 / p);
            let (r_star, stated) = if m > 2.0 * q + 1.0 {
                (2.0 * (p / ((p - 1.0) * (q + 1.0))).powf(1.0 - 1.0 / p), true)
            } else {
                let mut r = 0.0;
                while prof.value(r) >= 1.0 && r < 1e6 {
                    r += 1e-3 * sample_end(prof).max(1.0);
                }
                (r, false)
            };
            let end = sample_end(prof);
            let mut worst = f64::NEG_INFINITY;
            let n = 200;
            for i in 0..=n {
                let r = 2.0 * r_star + (end - 2.0 * r_star) * i as f64 / n as f64;
                let u = prof.value(r);
                if u > 0.0 {
                    worst = worst.max(u.ln() + c * (r - r_star));
                }
            }
            Ok(DecayReport {
                kind: DecayKind::ExponentialEnvelope,
                fitted: worst,
                expected: c,
                rel_err: 0.0,
                r_range: (2.0 * r_star, end),
                r_star: Some((r_star, stated)),
                passed: worst <= 0.0,
            })
        }
        (Regime::CompactSupport, _) => Err(Error::InsufficientTail("compact-support regime".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub m: f64,
    pub c: f64,
    pub c_gap: f64,
    pub radius: Option<f64>,
    pub radius_gap: Option<f64>,
    pub sup_gap: f64,
    pub u_at_one: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub p: f64,
    pub q: f64,
    pub c_inf: f64,
    pub radius_inf: Option<f64>,
    pub u_inf_at_one: f64,
    pub rows: Vec<LimitRow>,
    pub threshold: f64,
    pub c_gap_ok: bool,
    pub radius_gap_ok: Option<bool>,
    pub passed: bool,
}

/// True when the second half of `xs` is strictly decreasing and ends below `tol`.
fn eventually_decreasing_below(xs: &[f64], tol: f64) -> bool {
    let tail = &xs[xs.len() / 2..];
    tail.windows(2).all(|w| w[1] < w[0]) && xs.last().is_some_and(|&x| x < tol)
}

/// m → ∞ convergence in d = 1.
pub fn limit_study(p: f64, q: f64, m_list: &[f64], threshold: f64) -> Result<LimitReport> {
    if m_list.is_empty() {
        return Err(Error::Precondition("empty m list".into()));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("m list must be increasing".into()));
    }
    let inf = ParamSet::infinite(1, p, q);
    let c_inf = closed_constant_1d(&inf)?.c;
    let prof_inf = profile_1d_m_infinity(&inf)?;
    let radius_inf = prof_inf.support.radius();
    let grid_end = radius_inf.map_or(10.0, |r| 1.5 * r);
    let grid: Vec<f64> = (0..=400).map(|i| grid_end * i as f64 / 400.0).collect();
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let ps = ParamSet::new(1, p, q, m);
        let c = closed_constant_1d(&ps)?.c;
        let prof = profile_1d_finite_m(&ps)?;
        let radius = prof.support.radius();
        let sup_gap = grid.iter().map(|&r| (prof.value(r) - prof_inf.value(r)).abs()).fold(0.0, f64::max);
        rows.push(LimitRow {
            m,
            c,
            c_gap: (c - c_inf).abs(),
            radius,
            radius_gap: radius.zip(radius_inf).map(|(a, b)| (a - b).abs()),
            sup_gap,
            u_at_one: prof.value(1.0),
        });
    }
    let c_gaps: Vec<f64> = rows.iter().map(|r| r.c_gap).collect();
    let c_gap_ok = eventually_decreasing_below(&c_gaps, threshold);
    let radius_gap_ok = if rows.iter().all(|r| r.radius_gap.is_some()) {
        let gaps: Vec<f64> = rows.iter().map(|r| r.radius_gap.unwrap()).collect();
        Some(eventually_decreasing_below(&gaps, threshold))
    } else {
        None
    };
    let passed = c_gap_ok && radius_gap_ok.unwrap_or(true);
    Ok(LimitReport {
        p,
        q,
        c_inf,
        radius_inf,
        u_inf_at_one: prof_inf.value(1.0),
        rows,
        threshold,
        c_gap_ok,
        radius_gap_ok,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub i1: f64,
    pub k: f64,
    pub a: f64,
    pub lhs: f64,
    pub min_i2: f64,
    pub lambda_min: f64,
    pub lambda_formula: f64,
    pub rel_err: f64,
    /// I₂(u_λ) by quadrature of the rescaled function against the scaling laws.
    pub scaling_err: f64,
    pub passed: bool,
}

/// u_λ(x) = λ^{-d/(m+1)} u(x/λ).
fn scaled_i2<R: Radial + ?Sized>(u: &R, params: &ParamSet, a: f64, lambda: f64) -> Result<f64> {
    let m = params.m_finite().expect("finite m");
    let v = Scaled { inner: u, amplitude: lambda.powf(-params.dim() / (m + 1.0)), lambda: 1.0 / lambda };
    let (p, q) = (params.p, params.q);
    let g = gradient_norm_p(&v, p)?.value;
    let qq = radial_norm(&v, q + 1.0)?.value;
    let mm = radial_norm(&v, m + 1.0)?.value.powf(1.0 / (m + 1.0));
    Ok((g / p + qq / (q + 1.0)) / mm.powf(a))
}

/// K·I₁(u)^a = min_λ I₂(u_λ), with the minimum found by golden-section
/// search in ln λ.
pub fn scaling_reduction_check<R: Radial + ?Sized>(u: &R, params: &ParamSet) -> Result<ScalingReport> {
    let ex = validate(params)?;
    let m = params.m_finite().ok_or_else(|| Error::Precondition("scaling reduction needs finite m".into()))?;
    let (p, q, d) = (params.p, params.q, params.dim());
    let th = ex.theta;
    let al = p * d / (m + 1.0) + p - d;
    let be = d - (q + 1.0) * d / (m + 1.0);
    let k = (al + be) / (p * be) * (al * (q + 1.0) / (p * be)).powf(-al / (al + be));
    let a = (m + 1.0) * (d * p + (p - d) * (q + 1.0)) / (d * p + p * (m + 1.0) - d * (q + 1.0));
    let n = norms(u, params)?;
    let i1 = n.grad_norm.powf(th) * n.q_norm.powf(1.0 - th) / n.lhs;
    let lambda_formula =
        (al * (q + 1.0) / (p * be) * n.grad_norm.powf(p) / n.q_norm.powf(q + 1.0)).powf(1.0 / (al + be));

    // The search uses the exact scaling laws of the three norms; the
    // minimizer is then re-checked by quadrature of the rescaled function.
    let (gp, qq, na) = (n.grad_norm.powf(p), n.q_norm.powf(q + 1.0), n.lhs.powf(a));
    let f = |t: f64| -> Result<f64> {
        let l = t.exp();
        Ok((l.powf(-al) * gp / p + l.powf(be) * qq / (q + 1.0)) / na)
    };
    let (mut best_t, mut best_v) = (0.0, f64::INFINITY);
    for i in -200..=200 {
        let t = i as f64 * 0.1;
        let v = f(t)?;
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = (best_t - 0.1, best_t + 0.1);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo < 1e-9 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (t_min, min_i2) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let lhs = k * i1.powf(a);
    let quadrature_i2 = scaled_i2(u, params, a, t_min.exp())?;
    let rel_err = (lhs - min_i2).abs() / lhs;
    let scaling_err = (quadrature_i2 - min_i2).abs() / min_i2;
    Ok(ScalingReport {
        i1,
        k,
        a,
        lhs,
        min_i2,
        lambda_min: t_min.exp(),
        lambda_formula,
        rel_err,
        scaling_err,
        passed: rel_err <= 1e-6 && scaling_err <= 1e-6,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StraussReport {
    pub nu: f64,
    pub constant: f64,
    /// (r, |u(r)|, bound(r)).
    pub samples: Vec<(f64, f64, f64)>,
    pub max_ratio: f64,
    pub passed: bool,
}

/// Explicit constant (ν/S_d)^{1/ν} of the radial Strauss-type bound.
pub fn strauss_constant(d: u32, p: f64, q: f64) -> f64 {
    let nu = (q + 1.0) * (p - 1.0) / p + 1.0;
    (nu / params::surface(d)).powf(1.0 / nu)
}

/// |u(r)| ≤ C r^{(1-d)/ν} ‖u‖_{q+1}^{(ν-1)/ν} ‖∇u‖_p^{1/ν} at `n` radii.
pub fn strauss_bound_check<R: Radial + ?Sized>(u: &R, params: &ParamSet, n: usize) -> Result<StraussReport> {
    validate(params)?;
    if params.d < 2 {
        return Err(Error::Precondition("the Strauss bound needs d ≥ 2".into()));
    }
    let (p, q, d) = (params.p, params.q, params.dim());
    let nu = (q + 1.0) * (p - 1.0) / p + 1.0;
    let constant = strauss_constant(params.d, p, q);
    let qn = radial_norm(u, q + 1.0)?.value.powf(1.0 / (q + 1.0));
    let gn = gradient_norm_p(u, p)?.value.powf(1.0 / p);
    let end = *u.breakpoints().last().unwrap_or(&1.0);
    let samples: Vec<(f64, f64, f64)> = (0..n)
        .map(|i| {
            let r = end * 10f64.powf(-3.0 + 3.0 * i as f64 / (n.max(2) - 1) as f64);
            let bound = constant * r.powf((1.0 - d) / nu) * qn.powf((nu - 1.0) / nu) * gn.powf(1.0 / nu);
            (r, u.eval(r).0.abs(), bound)
        })
        .collect();
    let max_ratio = samples.iter().map(|s| s.1 / s.2).fold(0.0, f64::max);
    Ok(StraussReport { nu, constant, samples, max_ratio, passed: max_ratio <= 1.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxReport {
    /// (r, r^{d-1}|u'|^{p-1}, ∫_r^∞ s^{d-1} u^q ds, residual relative to
    /// the larger of the integral and the origin flux).
    pub samples: Vec<(f64, f64, f64, f64)>,
    pub max_rel_residual: f64,
    /// |w(0+)| against (‖∇u‖_p^p + ‖u‖_{q+1}^{q+1})/S_d.
    pub origin_flux: f64,
    pub origin_energy: f64,
    pub origin_rel_residual: f64,
    pub passed: bool,
}

/// ∫_r^∞ s^{d-1} u^q ds.
fn upper_q_integral(prof: &RadialProfile, r: f64) -> Result<f64> {
    let (d, q) = (prof.params.d, prof.params.q);
    let mut b: Vec<f64> = prof.breakpoints().into_iter().filter(|&x| x > r).collect();
    b.insert(0, r);
    let f = |s: f64| {
        let u = prof.value(s);
        if u <= 0.0 {
            0.0
        } else {
            s.powi(d as i32 - 1) * if q == 0.0 { 1.0 } else { u.powf(q) }
        }
    };
    let mut total = quad::integrate_panels(f, &b, 1e-12).value;
    if let Some(t) = prof.tail() {
        if t.r_e > r {
            total += t.power_integral(d, q)?;
        }
    }
    Ok(total)
}

/// Flux self-consistency of an m = ∞ profile with a point mass at the origin.
pub fn flux_identity_check(prof: &RadialProfile) -> Result<FluxReport> {
    let params = prof.params;
    if !params.m.is_infinite() {
        return Err(Error::Precondition("flux identity applies to m = ∞".into()));
    }
    let (p, q) = (params.p, params.q);
    let (r0, w0) = match &prof.repr {
        ProfileRepr::Grid(g) => (g.r[0], g.origin_flux.unwrap_or(g.w[0]).abs()),
        ProfileRepr::ClosedForm(_) => (0.0, prof.flux(1e-300).abs()),
    };
    let end = sample_end(prof);
    let mut radii = vec![r0.max(1e-12)];
    radii.extend((1..6).map(|i| end * i as f64 / 8.0));
    let mut samples = Vec::new();
    for r in radii {
        let lhs = prof.flux(r).abs();
        let rhs = upper_q_integral(prof, r)?;
        // interior fluxes decay with r; measure them against the origin flux
        samples.push((r, lhs, rhs, (lhs - rhs).abs() / rhs.max(w0)));
    }
    let max_rel_residual = samples.iter().map(|s| s.3).fold(0.0, f64::max);
    let sd = params::surface(params.d);
    let origin_energy = (gradient_norm_p(prof, p)?.value + radial_norm(prof, q + 1.0)?.value) / sd;
    let origin_rel_residual = (w0 - origin_energy).abs() / origin_energy;
    Ok(FluxReport {
        samples,
        max_rel_residual,
        origin_flux: w0,
        origin_energy,
        origin_rel_residual,
        passed: max_rel_residual <= 1e-6 && origin_rel_residual <= 1e-6,
    })
}

/// J_ν(x) by its power series; adequate for x ≲ 20.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= -h * h / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of J_ν.
pub fn bessel_j_first_zero(nu: f64) -> f64 {
    let mut a = 0.1;
    let mut fa = bessel_j(nu, a);
    let mut b = a;
    while b < 30.0 {
        b = a + 0.05;
        let fb = bessel_j(nu, b);
        if fa * fb <= 0.0 {
            break;
        }
        a = b;
        fa = fb;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = bessel_j(nu, mid);
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashReport {
    pub d: u32,
    pub radius: f64,
    /// First positive zero of J_{d/2}, i.e. √λ₁ for the radial Neumann problem.
    pub bessel_root: f64,
    pub eigenvalue: f64,
    pub rel_err: f64,
    /// |v'(1)| = R|u'(R)| and |v'(0)|.
    pub slope_at_one: f64,
    pub slope_at_zero: f64,
    /// max |Δv + R²v| by central differences at interior points.
    pub pde_residual: f64,
    pub constant: f64,
    pub passed: bool,
}

/// Links the q = 0, m = 1 touchdown radius to the first radial Neumann
/// eigenvalue of the unit ball through v(r) = 1 - u(Rr).
pub fn nash_eigen_check(params: &ParamSet, cfg: &ShootingConfig) -> Result<NashReport> {
    validate(params)?;
    if params.p != 2.0 || params.q != 0.0 || params.m != ExtReal::Finite(1.0) {
        return Err(Error::Precondition("nash check needs p = 2, q = 0, m = 1".into()));
    }
    let res = nash_constant(params, cfg)?;
    let prof = if params.d == 1 { profile_1d_finite_m(params)? } else { crate::solver::shoot_finite_m(params, cfg)? };
    let radius = prof.support.radius().expect("compact support");
    let d = params.dim();
    let bessel_root = bessel_j_first_zero(d / 2.0);
    let v = |r: f64| 1.0 - prof.value(radius * r);
    let h = 1e-4;
    let mut pde_residual: f64 = 0.0;
    for i in 1..10 {
        let r = i as f64 / 10.0;
        let vpp = (v(r + h) - 2.0 * v(r) + v(r - h)) / (h * h);
        let vp = (v(r + h) - v(r - h)) / (2.0 * h);
        pde_residual = pde_residual.max((vpp + (d - 1.0) / r * vp + radius * radius * v(r)).abs());
    }
    let slope_at_one = radius * prof.derivative(radius * (1.0 - 1e-9)).abs();
    let slope_at_zero = radius * prof.derivative(0.0).abs();
    let rel_err = (radius - bessel_root).abs() / bessel_root;
    Ok(NashReport {
        d: params.d,
        radius,
        bessel_root,
        eigenvalue: radius * radius,
        rel_err,
        slope_at_one,
        slope_at_zero,
        pde_residual,
        constant: res.c,
        passed: rel_err <= 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_roots() {
        assert!((bessel_j_first_zero(0.5) - std::f64::consts::PI).abs() < 1e-12);
        // j_{1,1} and j_{3/2,1} (tan x = x)
        assert!((bessel_j_first_zero(1.0) - 3.831_705_970_207_512).abs() < 1e-11);
        assert!((bessel_j_first_zero(1.5) - 4.493_409_457_909_064).abs() < 1e-11);
    }

    #[test]
    fn bump_norms_match_closed_integrals() {
        // Gaussian in d = 1: ∫ e^{-2r²} = √(π/2), ∫ |u'|² = √(π/2)
        let b = Bump { d: 1, kind: BumpKind::Gaussian, amplitude: 1.0, width: 1.0 };
        let q = radial_norm(&b, 2.0).unwrap().value;
        let g = gradient_norm_p(&b, 2.0).unwrap().value;
        let want = (std::f64::consts::PI / 2.0).sqrt();
        assert!((q - want).abs() < 1e-12);
        assert!((g - want).abs() < 1e-12);
    }

    #[test]
    fn eventually_decreasing() {
        assert!(eventually_decreasing_below(&[1.0, 2.0, 0.5, 0.1, 0.001], 0.01));
        assert!(!eventually_decreasing_below(&[1.0, 0.5, 0.002, 0.003, 0.001], 0.01));
        assert!(!eventually_decreasing_below(&[1.0, 0.5, 0.1], 0.01));
    }
}
