//! Numerical extremal profiles: shooting on the peak value for finite m, an
//! exterior scheme with a point mass at the origin for m = ∞, and radial
//! norm quadrature.

use crate::closed_forms::{
    beta_from_mass, constant_from_mass, Decay, GridProfile, ProfileRepr, RadialProfile, Support,
};
use crate::ode::{self, Node, OdeOptions, Stop};
use crate::params::{self, validate, ExtReal, ParamSet, Regime};
use crate::quad::{self, Integral};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    /// Relative ODE tolerance.
    pub rtol: f64,
    /// Absolute ODE tolerance, relative to the peak value.
    pub atol: f64,
    /// Relative width at which bisection stops.
    pub bisection_tol: f64,
    pub max_bisections: usize,
    /// Geometric bracket expansions before giving up.
    pub max_expansions: usize,
    pub r_max: f64,
    pub max_steps: usize,
    /// Explicit shooting bracket; disables expansion.
    pub bracket: Option<(f64, f64)>,
    pub quad_rel_tol: f64,
    /// First inner radius of the exterior scheme.
    pub r0: Option<f64>,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            rtol: 1e-12,
            atol: 1e-15,
            bisection_tol: 1e-12,
            max_bisections: 200,
            max_expansions: 60,
            r_max: 1e6,
            max_steps: 400_000,
            bracket: None,
            quad_rel_tol: 1e-12,
            r0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    ShootQuad,
    ExteriorQuad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestConstantResult {
    pub theta: f64,
    pub m_c: f64,
    pub c: f64,
    /// Finite m only.
    pub beta: Option<f64>,
    pub method: Method,
    pub err_estimate: f64,
}

/// Analytic continuation beyond `r_e`: u_e((r+shift)/(r_e+shift))^{-rate}
/// for algebraic decay, u_e(r/r_e)^{-power}e^{-rate(r-r_e)} for exponential
/// decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub r_e: f64,
    pub u_e: f64,
    pub decay: Decay,
    /// Algebraic only; zero gives a pure power law.
    pub shift: f64,
    /// Exponential only.
    pub power: f64,
}

/// Exponent β of the prefactor in u ~ A r^{-β}e^{-κr} for critical tails.
pub fn exponential_prefactor(params: &ParamSet) -> f64 {
    (params.dim() - 1.0) / (params.p * (params.p - 1.0))
}

/// ∫_{r_e}^∞ f over panels of width 4/k, where f decays like e^{-kr}.
fn exp_tail_quad<F: Fn(f64) -> f64>(f: F, r_e: f64, k: f64) -> f64 {
    let breaks: Vec<f64> = (0..=12).map(|j| r_e + 4.0 * j as f64 / k).collect();
    quad::integrate_panels(f, &breaks, 1e-13).value
}

/// ∫_{r_e}^∞ r^{d-1} ((r+σ)/(r_e+σ))^{-k} dr for k > d, expanding r^{d-1}
/// in powers of r + σ.
fn shifted_power_moment(d: u32, r_e: f64, sigma: f64, k: f64) -> f64 {
    let n = d as i32 - 1;
    let base = r_e + sigma;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=n {
        if j > 0 {
            binom *= (n - j + 1) as f64 / j as f64;
        }
        sum += binom * (-sigma).powi(n - j) * base.powi(j + 1) / (k - j as f64 - 1.0);
    }
    sum
}

impl TailModel {
    /// Tail through (r_e, u_e, u'_e) with the given asymptotic law. Algebraic
    /// tails keep the asymptotic rate and absorb the slope into the shift;
    /// exponential tails keep the prefactor `power` and fit the rate.
    pub fn fit(r_e: f64, u_e: f64, du_e: f64, law: Decay, power: f64) -> TailModel {
        match law {
            Decay::Algebraic { rate } => {
                let shift = rate * u_e / du_e.abs() - r_e;
                if du_e < 0.0 && r_e + shift > 0.0 {
                    TailModel { r_e, u_e, decay: law, shift, power: 0.0 }
                } else {
                    let rate = -r_e * du_e / u_e;
                    TailModel { r_e, u_e, decay: Decay::Algebraic { rate }, shift: 0.0, power: 0.0 }
                }
            }
            Decay::Exponential { .. } => {
                let rate = -du_e / u_e - power / r_e;
                if rate > 0.0 {
                    TailModel { r_e, u_e, decay: Decay::Exponential { rate }, shift: 0.0, power }
                } else {
                    let rate = -du_e / u_e;
                    TailModel { r_e, u_e, decay: Decay::Exponential { rate }, shift: 0.0, power: 0.0 }
                }
            }
        }
    }

    /// (u(r), u'(r)) for r ≥ r_e.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self.decay {
            Decay::Algebraic { rate } => {
                let u = self.u_e * ((r + self.shift) / (self.r_e + self.shift)).powf(-rate);
                (u, -rate * u / (r + self.shift))
            }
            Decay::Exponential { rate } => {
                let u = self.u_e * (r / self.r_e).powf(-self.power) * (-rate * (r - self.r_e)).exp();
                (u, -(rate + self.power / r) * u)
            }
        }
    }

    /// ∫_{r_e}^∞ r^{d-1} u^s dr.
    pub fn power_integral(&self, d: u32, s: f64) -> Result<f64> {
        let df = d as f64;
        match self.decay {
            Decay::Algebraic { rate } => {
                if !(rate * s > df) {
                    return Err(Error::NonIntegrable(format!(
                        "tail r^(-{rate}) raised to {s} is not integrable in dimension {d}"
                    )));
                }
                Ok(self.u_e.powf(s) * shifted_power_moment(d, self.r_e, self.shift, rate * s))
            }
            Decay::Exponential { rate } => {
                Ok(exp_tail_quad(|r| r.powf(df - 1.0) * self.eval(r).0.powf(s), self.r_e, rate * s))
            }
        }
    }

    /// ∫_{r_e}^∞ r^{d-1} |u'|^p dr.
    pub fn gradient_integral(&self, d: u32, p: f64) -> Result<f64> {
        let df = d as f64;
        match self.decay {
            Decay::Algebraic { rate } => {
                let e = (rate + 1.0) * p;
                if !(e > df) {
                    return Err(Error::NonIntegrable("gradient tail is not integrable".into()));
                }
                let slope = rate * self.u_e / (self.r_e + self.shift);
                Ok(slope.powf(p) * shifted_power_moment(d, self.r_e, self.shift, e))
            }
            Decay::Exponential { rate } => {
                Ok(exp_tail_quad(|r| r.powf(df - 1.0) * self.eval(r).1.abs().powf(p), self.r_e, rate * p))
            }
        }
    }
}

/// A radial function that can be integrated over ℝ^d.
pub trait Radial {
    fn dim(&self) -> u32;
    /// (u(r), u'(r)).
    fn eval(&self, r: f64) -> (f64, f64);
    /// Increasing panel ends covering the explicit part, starting at 0.
    fn breakpoints(&self) -> Vec<f64>;
    /// Continuation beyond the last breakpoint; `None` means u vanishes there.
    fn tail(&self) -> Option<TailModel>;
    /// (r₀, c, κ) when u' = -c r^{κ-1} on (0, r₀).
    fn singular_origin(&self) -> Option<(f64, f64, f64)> {
        None
    }
}

fn geometric_down(scale: f64, k: i32) -> Vec<f64> {
    (1..=k).rev().map(|j| scale * 0.5f64.powi(j)).collect()
}

impl RadialProfile {
    fn local_tail(&self, r_e: f64, law: Decay) -> TailModel {
        let (u_e, du) = self.eval(r_e);
        TailModel::fit(r_e, u_e, du, law, exponential_prefactor(&self.params))
    }

    fn closed_infinite_end(&self) -> f64 {
        let floor = 1e-10 * self.peak;
        let mut r = 1.0;
        for _ in 0..80 {
            if self.value(r) < floor {
                break;
            }
            r *= 2.0;
        }
        r
    }
}

impl Radial for RadialProfile {
    fn dim(&self) -> u32 {
        self.params.d
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        RadialProfile::eval(self, r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        match (&self.repr, self.support) {
            (ProfileRepr::Grid(g), _) => {
                let mut b = Vec::with_capacity(g.r.len() + 1);
                if g.r[0] > 0.0 {
                    b.push(0.0);
                }
                b.extend_from_slice(&g.r);
                b
            }
            (ProfileRepr::ClosedForm(_), Support::Finite { radius }) => {
                let mut b = vec![0.0];
                b.extend(geometric_down(radius, 40));
                b.extend((2..=30).map(|k| radius * (1.0 - 0.5f64.powi(k))));
                b.push(radius);
                b
            }
            (ProfileRepr::ClosedForm(_), Support::Infinite { .. }) => {
                let end = self.closed_infinite_end();
                let mut b = vec![0.0];
                b.extend(geometric_down(1.0, 40));
                let mut r = 1.0;
                while r <= end {
                    b.push(r);
                    r *= 2.0;
                }
                b
            }
        }
    }

    fn tail(&self) -> Option<TailModel> {
        let decay = match self.support {
            Support::Finite { .. } => return None,
            Support::Infinite { decay } => decay,
        };
        match &self.repr {
            ProfileRepr::Grid(g) => {
                let n = g.r.len() - 1;
                Some(TailModel {
                    r_e: g.r[n],
                    u_e: g.u[n],
                    decay: g.tail.unwrap_or(decay),
                    shift: g.tail_shift,
                    power: g.tail_power,
                })
            }
            ProfileRepr::ClosedForm(_) => Some(self.local_tail(self.closed_infinite_end(), decay)),
        }
    }

    fn singular_origin(&self) -> Option<(f64, f64, f64)> {
        match &self.repr {
            ProfileRepr::Grid(GridProfile { r, origin_flux: Some(w0), .. }) if r[0] > 0.0 => {
                let (p, d) = (self.params.p, self.params.dim());
                Some((r[0], w0.abs().powf(1.0 / (p - 1.0)), (p - d) / (p - 1.0)))
            }
            _ => None,
        }
    }
}

const DEFAULT_REL_TOL: f64 = 1e-12;

fn integrate_radial<R: Radial + ?Sized>(
    prof: &R,
    integrand: impl Fn(f64) -> f64,
    skip_origin: bool,
    rel_tol: f64,
) -> Integral {
    let b = prof.breakpoints();
    let start = match (skip_origin, prof.singular_origin()) {
        (true, Some((r0, _, _))) => b.iter().position(|&x| x >= r0).unwrap_or(0),
        _ => 0,
    };
    quad::integrate_panels(integrand, &b[start..], rel_tol)
}

/// S_d ∫ r^{d-1} u^s dr = ‖u‖_s^s over ℝ^d.
pub fn radial_norm<R: Radial + ?Sized>(prof: &R, s: f64) -> Result<Integral> {
    radial_norm_tol(prof, s, DEFAULT_REL_TOL)
}

pub fn radial_norm_tol<R: Radial + ?Sized>(prof: &R, s: f64, rel_tol: f64) -> Result<Integral> {
    let d = prof.dim();
    let dm1 = d as i32 - 1;
    let f = |r: f64| {
        let u = prof.eval(r).0;
        if u <= 0.0 {
            0.0
        } else {
            r.powi(dm1) * u.powf(s)
        }
    };
    let mut sum = integrate_radial(prof, f, false, rel_tol);
    if let Some(t) = prof.tail() {
        sum.value += t.power_integral(d, s)?;
    }
    let sd = params::surface(d);
    Ok(Integral { value: sd * sum.value, err: sd * sum.err })
}

/// ‖∇u‖_p^p over ℝ^d.
pub fn gradient_norm_p<R: Radial + ?Sized>(prof: &R, p: f64) -> Result<Integral> {
    gradient_norm_p_tol(prof, p, DEFAULT_REL_TOL)
}

pub fn gradient_norm_p_tol<R: Radial + ?Sized>(prof: &R, p: f64, rel_tol: f64) -> Result<Integral> {
    let d = prof.dim();
    let dm1 = d as i32 - 1;
    let f = |r: f64| r.powi(dm1) * prof.eval(r).1.abs().powf(p);
    let mut sum = integrate_radial(prof, f, true, rel_tol);
    if let Some((r0, c, kappa)) = prof.singular_origin() {
        sum.value += c.powf(p) * r0.powf(kappa) / kappa;
    }
    if let Some(t) = prof.tail() {
        sum.value += t.gradient_integral(d, p)?;
    }
    let sd = params::surface(d);
    Ok(Integral { value: sd * sum.value, err: sd * sum.err })
}

/// (u, w) system: u' = sgn(w)(|w|/r^{d-1})^{1/(p-1)}, w' = r^{d-1}(u₊^q - u₊^m).
#[derive(Debug, Clone, Copy)]
struct System {
    d: i32,
    p: f64,
    q: f64,
    m: Option<f64>,
}

/// u₊^e, except that u^0 = 1 on both sides of zero: shots stop at the first
/// zero anyway, and a jump in the right-hand side there defeats event location.
fn upow(u: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if u <= 0.0 {
        0.0
    } else {
        u.powf(e)
    }
}

impl System {
    fn new(params: &ParamSet) -> Self {
        System { d: params.d as i32, p: params.p, q: params.q, m: params.m_finite() }
    }

    fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        let rd = if self.d == 1 { 1.0 } else { r.powi(self.d - 1) };
        let w = y[1];
        let du = if w == 0.0 { 0.0 } else { w.signum() * (w.abs() / rd).powf(1.0 / (self.p - 1.0)) };
        let src = upow(y[0], self.q) - self.m.map_or(0.0, |m| upow(y[0], m));
        [du, rd * src]
    }

    fn node(&self, r: f64, y: [f64; 2]) -> Node<2> {
        Node { r, y, dy: self.rhs(r, &y) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    /// u reaches zero while still decreasing: initial data too large.
    Over,
    /// u turns back up before reaching zero: initial data too small.
    Under,
    /// Followed the decaying solution to the end of the range.
    Track,
}

#[derive(Debug, Clone)]
struct Shot {
    param: f64,
    nodes: Vec<Node<2>>,
    outcome: Outcome,
}

fn fire(sys: &System, start: Node<2>, peak: f64, regime: Regime, cfg: &ShootingConfig) -> Shot {
    let opts = OdeOptions {
        rtol: cfg.rtol,
        atol: cfg.atol * peak,
        h_init: start.r * 1e-2,
        h_max: f64::INFINITY,
        h_rel: 0.05,
        max_steps: cfg.max_steps,
    };
    // A turning point is classified by the sign of u there, so a shallow dip
    // below zero that the u-event misses still counts as an overshoot.
    let over = |y: &[f64; 2]| if y[1] < 0.0 { y[0] } else { 1.0 };
    let turn = |y: &[f64; 2]| -y[1];
    let floor = 1e-13 * peak;
    let infinite = regime != Regime::CompactSupport;
    let done = |n: &Node<2>| infinite && n.y[0] > 0.0 && n.y[0] < floor;
    let f = |r: f64, y: &[f64; 2]| sys.rhs(r, y);
    let (nodes, stop) = ode::integrate(&f, start, cfg.r_max, &opts, &[&over, &turn], &done);
    let u_last = nodes.last().map_or(0.0, |n| n.y[0]);
    let outcome = match stop {
        Stop::Event(0) => Outcome::Over,
        Stop::Event(_) if u_last <= 0.0 => Outcome::Over,
        Stop::Event(_) => Outcome::Under,
        Stop::Done | Stop::End | Stop::Failed => Outcome::Track,
    };
    Shot { param: 0.0, nodes, outcome }
}

/// Bisects on the shooting parameter until the Under/Over pair is
/// `bisection_tol`-close. A tracking shot ends the search and is returned twice.
fn bisect<F: Fn(f64) -> Shot>(
    shoot: F,
    mut lo: f64,
    mut hi: f64,
    expand: bool,
    cfg: &ShootingConfig,
) -> Result<(Shot, Shot)> {
    let tag = |x: f64| {
        let mut s = shoot(x);
        s.param = x;
        s
    };
    let mut a = tag(lo);
    let mut b = tag(hi);
    let mut tries = 0;
    while a.outcome == b.outcome && a.outcome != Outcome::Track {
        if !expand || tries >= cfg.max_expansions {
            return Err(Error::Bracket(format!("[{lo:e}, {hi:e}] gives {:?} at both ends", a.outcome)));
        }
        tries += 1;
        if a.outcome == Outcome::Under {
            lo = hi;
            hi *= 2.0;
            a = b;
            b = tag(hi);
        } else {
            hi = lo;
            lo *= 0.5;
            b = a;
            a = tag(lo);
        }
    }
    for s in [&a, &b] {
        if s.outcome == Outcome::Track {
            return Ok((s.clone(), s.clone()));
        }
    }
    let (mut under, mut over) = if a.outcome == Outcome::Under { (a, b) } else { (b, a) };
    for _ in 0..cfg.max_bisections {
        debug_assert!(under.outcome == Outcome::Under && over.outcome == Outcome::Over);
        if (under.param - over.param).abs() <= cfg.bisection_tol * under.param.abs().max(over.param.abs()) {
            return Ok((under, over));
        }
        let mid = tag(0.5 * (under.param + over.param));
        match mid.outcome {
            Outcome::Track => return Ok((mid.clone(), mid)),
            Outcome::Under => under = mid,
            Outcome::Over => over = mid,
        }
    }
    Err(Error::NonConvergence(format!("bisection did not reach relative width {:e}", cfg.bisection_tol)))
}

fn grid_from(nodes: &[Node<2>], origin_flux: Option<f64>) -> GridProfile {
    GridProfile {
        r: nodes.iter().map(|n| n.r).collect(),
        u: nodes.iter().map(|n| n.y[0].max(0.0)).collect(),
        w: nodes.iter().map(|n| n.y[1]).collect(),
        du: nodes.iter().map(|n| n.dy[0]).collect(),
        dw: nodes.iter().map(|n| n.dy[1]).collect(),
        origin_flux,
        tail: None,
        tail_shift: 0.0,
        tail_power: 0.0,
    }
}

fn theoretical_decay(params: &ParamSet) -> Decay {
    let (p, q) = (params.p, params.q);
    if params.regime() == Regime::Critical {
        Decay::Exponential { rate: (p - 1.0).powf(-1.0 / p) }
    } else {
        Decay::Algebraic { rate: p / (q + 1.0 - p) }
    }
}

/// Profile from a converged Under/Over pair.
fn assemble(
    sys: &System,
    params: &ParamSet,
    under: &Shot,
    over: &Shot,
    peak: f64,
    origin_flux: Option<f64>,
) -> Result<RadialProfile> {
    if params.regime() == Regime::CompactSupport {
        let shot = if over.outcome == Outcome::Over { over } else { under };
        let grid = grid_from(&shot.nodes, origin_flux);
        let radius = grid.r_end();
        return Ok(RadialProfile {
            repr: ProfileRepr::Grid(grid),
            support: Support::Finite { radius },
            peak,
            params: *params,
        });
    }
    let gl = grid_from(&under.nodes, origin_flux);
    let gh = grid_from(&over.nodes, origin_flux);
    let end = gl.r_end().min(gh.r_end());
    let same = under.outcome == Outcome::Track;
    let mut kept: Vec<Node<2>> = Vec::new();
    for n in &under.nodes {
        if n.r >= end && !same {
            break;
        }
        let (u, w) = if same || n.r <= gh.r[0] {
            (n.y[0], n.y[1])
        } else {
            let (uh, wh) = gh.interp(n.r);
            if (uh - n.y[0]).abs() > 1e-9 * peak || (uh - n.y[0]).abs() > 1e-3 * n.y[0] {
                break;
            }
            (0.5 * (uh + n.y[0]), 0.5 * (wh + n.y[1]))
        };
        if u <= 0.0 {
            break;
        }
        kept.push(sys.node(n.r, [u, w]));
    }
    if kept.len() < 4 {
        return Err(Error::InsufficientTail(format!("only {} trusted nodes", kept.len())));
    }
    let mut grid = grid_from(&kept, origin_flux);
    let last = kept[kept.len() - 1];
    let (u_e, du_e) = (last.y[0], last.dy[0]);
    let decay = theoretical_decay(params);
    let fit = TailModel::fit(last.r, u_e, du_e, decay, exponential_prefactor(params));
    match fit.decay {
        Decay::Algebraic { rate } => {
            if !(rate > 0.0) {
                return Err(Error::InsufficientTail(format!("fitted algebraic rate {rate}")));
            }
            if !(rate * (params.q + 1.0) > params.dim()) {
                return Err(Error::NonIntegrable(format!("fitted tail r^(-{rate}) does not have finite (q+1)-mass")));
            }
        }
        Decay::Exponential { rate } => {
            if !(rate > 0.0) {
                return Err(Error::InsufficientTail(format!("fitted exponential rate {rate}")));
            }
        }
    }
    let fitted = fit.decay;
    grid.tail_shift = fit.shift;
    grid.tail_power = fit.power;
    grid.tail = Some(fitted);
    Ok(RadialProfile { repr: ProfileRepr::Grid(grid), support: Support::Infinite { decay }, peak, params: *params })
}

/// Multiples of the last trusted v used as extra interpolation knots.
const TOUCHDOWN_LEVELS: [f64; 3] = [1.5, 2.0, 3.0];

/// Touchdown radius from the nodes where both shots still agree. Near R,
/// u ~ c(R - r)^{p/(p-1-q)}, so v = u^{(p-1-q)/p} is nearly linear in r and
/// r(v) is extrapolated to v = 0 through four nodes.
fn touchdown_radius(params: &ParamSet, under: &Shot, over: &Shot) -> Option<f64> {
    let expo = (params.p - 1.0 - params.q) / params.p;
    let gh = grid_from(&over.nodes, None);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for n in &under.nodes {
        if n.r <= gh.r[0] {
            continue;
        }
        if n.r >= gh.r_end() {
            break;
        }
        let (uh, _) = gh.interp(n.r);
        let u = 0.5 * (uh + n.y[0]);
        if !(u > 0.0) || (uh - n.y[0]).abs() > 1e-6 * u {
            break;
        }
        pts.push((n.r, u.powf(expo)));
    }
    let &(r_last, v_last) = pts.last()?;
    let pick = |level: f64| pts.iter().rev().find(|pt| pt.1 >= level).copied();
    let mut knots = vec![(r_last, v_last)];
    for k in TOUCHDOWN_LEVELS {
        knots.push(pick(k * v_last)?);
    }
    if knots.windows(2).any(|w| !(w[1].1 > w[0].1)) {
        return None;
    }
    // Lagrange form of r(v) at v = 0
    let mut radius = 0.0;
    for (i, &(ri, vi)) in knots.iter().enumerate() {
        let mut l = 1.0;
        for (j, &(_, vj)) in knots.iter().enumerate() {
            if i != j {
                l *= vj / (vj - vi);
            }
        }
        radius += ri * l;
    }
    (radius.is_finite() && radius > r_last).then_some(radius)
}

/// Series start u ≈ α - c r^{p'}, w ≈ (α^q - α^m) r^d/d at a radius where the
/// next-order correction is below the absolute tolerance.
fn series_start(sys: &System, alpha: f64, atol: f64) -> Node<2> {
    let (p, q, d) = (sys.p, sys.q, sys.d as f64);
    let m = sys.m.expect("finite m");
    let g = alpha.powf(m) - upow(alpha, q);
    let dg = m * alpha.powf(m - 1.0) - if q == 0.0 { 0.0 } else { q * alpha.powf(q - 1.0) };
    let pp = p / (p - 1.0);
    let c = (p - 1.0) / p * (g.abs() / d).powf(1.0 / (p - 1.0));
    let mut r: f64 = 1e-4;
    while r > 1e-12 {
        let du = c * r.powf(pp);
        if du * dg.abs() * du / (g.abs() * (p - 1.0)) < atol {
            break;
        }
        r *= 0.5;
    }
    let u = alpha - g.signum() * c * r.powf(pp);
    let w = -g * r.powf(d) / d;
    sys.node(r, [u, w])
}

/// Extremal profile for finite m by shooting on the peak value.
pub fn shoot_finite_m(params: &ParamSet, cfg: &ShootingConfig) -> Result<RadialProfile> {
    validate(params)?;
    if params.m.is_infinite() {
        return Err(Error::Precondition("shoot_finite_m needs finite m".into()));
    }
    let sys = System::new(params);
    let regime = params.regime();
    let alpha_c = params::alpha_peak(params)?;
    let shoot = |a: f64| fire(&sys, series_start(&sys, a, cfg.atol * a), a, regime, cfg);
    let (under, over) = if params.d == 1 {
        // α_c is exact in one dimension; shadows at ±1e-12 bound the drift.
        let mut lo = shoot(alpha_c * (1.0 - 1e-12));
        let mut hi = shoot(alpha_c * (1.0 + 1e-12));
        lo.param = alpha_c * (1.0 - 1e-12);
        hi.param = alpha_c * (1.0 + 1e-12);
        if lo.outcome == Outcome::Over && hi.outcome != Outcome::Over {
            std::mem::swap(&mut lo, &mut hi);
        }
        (lo, hi)
    } else {
        let (lo, hi, expand) = match cfg.bracket {
            Some((a, b)) => (a, b, false),
            None => (alpha_c, 10.0 * alpha_c, true),
        };
        bisect(shoot, lo, hi, expand, cfg)?
    };
    let peak = 0.5 * (under.param + over.param);
    let mut prof = assemble(&sys, params, &under, &over, peak, None)?;
    if regime == Regime::CompactSupport && params.q > 0.0 {
        if let Some(radius) = touchdown_radius(params, &under, &over) {
            prof.support = Support::Finite { radius };
        }
    }
    if params.q == 0.0 && regime == Regime::CompactSupport {
        // w(R) = 0 gives R^d/d = ∫ r^{d-1} u^m, insensitive to the touchdown drift.
        let m = params.m_finite().expect("finite m");
        let mass = radial_norm_tol(&prof, m, cfg.quad_rel_tol)?.value;
        let radius = (mass / params::omega(params.d)).powf(1.0 / params.dim());
        prof.support = Support::Finite { radius };
    }
    Ok(prof)
}

/// One level of the exterior scheme and everything extrapolated across levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorSolution {
    pub profile: RadialProfile,
    /// |w(0+)|, the strength of the origin point mass divided by S_d.
    pub origin_flux: f64,
    pub m_c: f64,
    pub r0_levels: [f64; 3],
    pub m_c_levels: [f64; 3],
    /// Estimated contraction ratio; `None` when levels agree to noise.
    pub ratio: Option<f64>,
}

fn exterior_level(params: &ParamSet, r0: f64, cfg: &ShootingConfig) -> Result<(RadialProfile, f64)> {
    let sys = System::new(params);
    let (p, d, q) = (params.p, params.dim(), params.q);
    let kappa = (p - d) / (p - 1.0);
    let regime = params.regime();
    let start = |s: f64| {
        let c = s.powf(1.0 / (p - 1.0));
        let u0 = 1.0 - c * r0.powf(kappa) / kappa;
        sys.node(r0, [u0, -s + r0.powf(d) / d])
    };
    let shoot = |s: f64| fire(&sys, start(s), 1.0, regime, cfg);
    let (lo, hi, expand) = match cfg.bracket {
        Some((a, b)) => (a, b, false),
        None => (0.5, 2.0, true),
    };
    let (under, over) = bisect(shoot, lo, hi, expand, cfg)?;
    let s = 0.5 * (under.param + over.param);
    let mut prof = assemble(&sys, params, &under, &over, 1.0, Some(-s))?;
    if q == 0.0 && regime == Regime::CompactSupport {
        prof.support = Support::Finite { radius: (d * s).powf(1.0 / d) };
    }
    Ok((prof, s))
}

/// Extremal profile for m = ∞ on three inner radii r₀, r₀/2, r₀/4, with
/// Richardson extrapolation at an empirically estimated ratio.
pub fn exterior_solve(params: &ParamSet, cfg: &ShootingConfig) -> Result<ExteriorSolution> {
    validate(params)?;
    if !params.m.is_infinite() {
        return Err(Error::Precondition("exterior scheme needs m = ∞".into()));
    }
    let (p, d) = (params.p, params.dim());
    let kappa = (p - d) / (p - 1.0);
    let r0 = cfg.r0.unwrap_or_else(|| 10f64.powf(-6.0 / kappa).clamp(1e-12, 1e-4));
    let radii = [r0, r0 / 2.0, r0 / 4.0];
    let mut levels = Vec::with_capacity(3);
    for &r in &radii {
        let (prof, s) = exterior_level(params, r, cfg)?;
        let mc = radial_norm_tol(&prof, params.q + 1.0, cfg.quad_rel_tol)?.value;
        levels.push((prof, s, mc));
    }
    let nodes = match &levels[2].0.repr {
        ProfileRepr::Grid(g) => g.r.clone(),
        ProfileRepr::ClosedForm(_) => unreachable!(),
    };
    let sup = |a: &RadialProfile, b: &RadialProfile| {
        nodes.iter().filter(|&&r| b.value(r) > 1e-3).map(|&r| (a.value(r) - b.value(r)).abs()).fold(0.0, f64::max)
    };
    let d1 = sup(&levels[0].0, &levels[1].0);
    let d2 = sup(&levels[1].0, &levels[2].0);
    let m_c_levels = [levels[0].2, levels[1].2, levels[2].2];
    let noise = 1e-7;
    let (profile, s, mc) = levels.pop().expect("three levels");
    if d1 <= noise && d2 <= noise {
        return Ok(ExteriorSolution { profile, origin_flux: s, m_c: mc, r0_levels: radii, m_c_levels, ratio: None });
    }
    let rho = d1 / d2.max(f64::MIN_POSITIVE);
    if !(rho > 1.05) {
        return Err(Error::ExtrapolationDivergence(format!("level differences {d1:e}, {d2:e}")));
    }
    let (prev, s_prev, mc_prev) = &levels[1];
    let ext = |x3: f64, x2: f64| x3 - (x2 - x3) / (rho - 1.0);
    let sys = System::new(params);
    let s_star = ext(s, *s_prev);
    let mut grid = match profile.repr {
        ProfileRepr::Grid(g) => g,
        ProfileRepr::ClosedForm(_) => unreachable!(),
    };
    for i in 0..grid.r.len() {
        let r = grid.r[i];
        let u = ext(grid.u[i], prev.value(r)).max(0.0);
        let w = ext(grid.w[i], prev.flux(r));
        let n = sys.node(r, [u, w]);
        grid.u[i] = u;
        grid.w[i] = w;
        grid.du[i] = n.dy[0];
        grid.dw[i] = n.dy[1];
    }
    grid.origin_flux = Some(-s_star);
    let support = match (profile.support, prev.support) {
        (Support::Finite { radius: r3 }, Support::Finite { radius: r2 }) => Support::Finite { radius: ext(r3, r2) },
        (s, _) => s,
    };
    let profile = RadialProfile { repr: ProfileRepr::Grid(grid), support, peak: 1.0, params: *params };
    Ok(ExteriorSolution {
        profile,
        origin_flux: s_star,
        m_c: ext(mc, *mc_prev),
        r0_levels: radii,
        m_c_levels,
        ratio: Some(rho),
    })
}

/// Extremal profile for m = ∞ (any d < p).
pub fn shoot_infinite_m(params: &ParamSet, cfg: &ShootingConfig) -> Result<RadialProfile> {
    Ok(exterior_solve(params, cfg)?.profile)
}

/// |tail(fitted decay) - tail(asymptotic decay)| for ∫u^s, scaled by S_d.
fn tail_spread(prof: &RadialProfile, s: f64) -> f64 {
    let (fitted, asym) = match (prof.tail(), prof.support) {
        (Some(t), Support::Infinite { decay }) => (t, TailModel { decay, shift: 0.0, ..t }),
        _ => return 0.0,
    };
    let d = prof.params.d;
    match (fitted.power_integral(d, s), asym.power_integral(d, s)) {
        (Ok(a), Ok(b)) => params::surface(d) * (a - b).abs(),
        _ => 0.0,
    }
}

fn coarse_copy(prof: &RadialProfile) -> RadialProfile {
    match &prof.repr {
        ProfileRepr::Grid(g) => RadialProfile { repr: ProfileRepr::Grid(g.coarsened()), ..prof.clone() },
        ProfileRepr::ClosedForm(_) => prof.clone(),
    }
}

/// Best constant computed from a numerical profile.
pub fn best_constant_numeric(params: &ParamSet, cfg: &ShootingConfig) -> Result<BestConstantResult> {
    let ex = validate(params)?;
    let s = params.q + 1.0;
    let (mc, err_m, method) = match params.m {
        ExtReal::Finite(_) => {
            let prof = shoot_finite_m(params, cfg)?;
            let full = radial_norm_tol(&prof, s, cfg.quad_rel_tol)?;
            let half = radial_norm_tol(&coarse_copy(&prof), s, cfg.quad_rel_tol)?;
            let err = (full.value - half.value).abs() + full.err + tail_spread(&prof, s);
            (full.value, err, Method::ShootQuad)
        }
        ExtReal::Infinite => {
            let sol = exterior_solve(params, cfg)?;
            let half = radial_norm_tol(&coarse_copy(&sol.profile), s, cfg.quad_rel_tol)?;
            let spread = (sol.m_c - sol.m_c_levels[2]).abs();
            let err = (sol.m_c - half.value).abs().max(spread) + tail_spread(&sol.profile, s);
            (sol.m_c, err, Method::ExteriorQuad)
        }
    };
    let c = constant_from_mass(params, &ex, mc);
    Ok(BestConstantResult {
        theta: ex.theta,
        m_c: mc,
        c,
        beta: beta_from_mass(params, &ex, mc),
        method,
        err_estimate: c * ex.theta / params.dim() * err_m / mc,
    })
}

/// Closed form where one exists, otherwise the numerical solver.
pub fn best_constant(params: &ParamSet, cfg: &ShootingConfig) -> Result<BestConstantResult> {
    validate(params)?;
    if params.d == 1 {
        return crate::closed_forms::closed_constant_1d(params);
    }
    match crate::closed_forms::dpd_constant(params) {
        Ok(r) => Ok(r),
        Err(Error::FamilyMismatch(_)) => best_constant_numeric(params, cfg),
        Err(e) => Err(e),
    }
}

/// Closed-form profile where one exists, otherwise the numerical solver.
pub fn extremal_profile(params: &ParamSet, cfg: &ShootingConfig) -> Result<RadialProfile> {
    validate(params)?;
    let cf = if params.d == 1 {
        Some(match params.m {
            ExtReal::Finite(_) => crate::closed_forms::profile_1d_finite_m(params)?,
            ExtReal::Infinite => crate::closed_forms::profile_1d_m_infinity(params)?,
        })
    } else if params.m.is_infinite() && params.q == 0.0 {
        Some(crate::closed_forms::linfty_profile_q0(params)?)
    } else if crate::closed_forms::is_barenblatt_family(params) {
        Some(crate::closed_forms::barenblatt_profile(params)?)
    } else if crate::closed_forms::is_positive_family(params) {
        Some(crate::closed_forms::positive_profile(params)?)
    } else {
        None
    };
    match cf {
        Some(p) => Ok(p),
        None if params.m.is_infinite() => shoot_infinite_m(params, cfg),
        None => shoot_finite_m(params, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_tail_integrals() {
        let plain = TailModel { r_e: 2.0, u_e: 1.0, decay: Decay::Exponential { rate: 1.0 }, shift: 0.0, power: 0.0 };
        // ∫_2^∞ r e^{-(r-2)} dr = 3, ∫_2^∞ r e^{-2(r-2)} dr = 5/4
        assert!((plain.power_integral(2, 1.0).unwrap() - 3.0).abs() < 1e-13);
        assert!((plain.gradient_integral(2, 2.0).unwrap() - 1.25).abs() < 1e-13);
        let pref = TailModel { power: 1.0, ..plain };
        assert!((pref.power_integral(2, 1.0).unwrap() - 2.0).abs() < 1e-13);
        let (u, du) = pref.eval(4.0);
        assert!((u - 0.5 * (-2f64).exp()).abs() < 1e-16);
        assert!((du + 1.25 * u).abs() < 1e-16);
    }

    #[test]
    fn algebraic_tail_rejects_slow_decay() {
        let t = TailModel { r_e: 1.0, u_e: 1.0, decay: Decay::Algebraic { rate: 1.0 }, shift: 0.0, power: 0.0 };
        assert!(matches!(t.power_integral(2, 2.0), Err(Error::NonIntegrable(_))));
        assert!((t.power_integral(2, 3.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_shooting_matches_cosine_profile() {
        let params = ParamSet::new(1, 2.0, 0.0, 1.0);
        let prof = shoot_finite_m(&params, &ShootingConfig::default()).unwrap();
        let r = prof.support.radius().unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-8, "R = {r}");
        for &x in &[0.3, 1.0, 2.5] {
            assert!((prof.value(x) - 1.0 - x.cos()).abs() < 1e-9);
        }
    }
}
