//! One PASS/FAIL line per acceptance criterion. Tolerances are pinned below.
//! Failing criteria are reported, not hidden; the process exit status stays
//! zero so the rest of the suite still runs.

use gn_sharp::closed_forms::*;
use gn_sharp::params::validate;
use gn_sharp::solver::{best_constant_numeric, extremal_profile, radial_norm, shoot_finite_m, shoot_infinite_m};
use gn_sharp::specialfn::{beta_complete, beta_incomplete, beta_incomplete_inverse};
use gn_sharp::verify::{
    check_inequality, energy_report, flux_identity_check, limit_study, nash_eigen_check, ratio, SampleFamily,
};
use gn_sharp::{ParamSet, Result, ShootingConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

const GOLDEN_TOL: f64 = 1e-12;
const NUMERIC_TOL: f64 = 1e-6;
const NUMERIC_BUDGET: Duration = Duration::from_secs(60);
const PROFILE_TOL: f64 = 1e-6;
const EXP_PROFILE_TOL: f64 = 1e-8;
const SUP_PROFILE_TOL: f64 = 1e-6;
const FLUX_TOL: f64 = 1e-6;
const FIRST_INTEGRAL_TOL: f64 = 1e-8;
const ENERGY_TOL: f64 = 1e-6;
const BETA_TOL: f64 = 1e-12;
const EQUIV_TOL_1D: f64 = 1e-10;
const EQUIV_TOL_ND: f64 = 1e-8;
const SLACK_TOL: f64 = 1e-8;
const EXTREMAL_TOL: f64 = 1e-6;
const LIMIT_THRESHOLD: f64 = 1e-2;
const LIMIT_M: [f64; 6] = [3.0, 5.0, 9.0, 17.0, 33.0, 65.0];
const NASH_1D_TOL: f64 = 1e-12;
const NASH_TOL: f64 = 1e-6;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn golden() -> Result<Outcome> {
    let cases = [
        (ParamSet::new(1, 2.0, 0.0, 3.0), (4.0 * PI * PI / 9.0).powf(-0.25)),
        (ParamSet::new(1, 2.0, 1.0, 5.0), (PI * PI / 4.0).powf(-1.0 / 6.0)),
        (ParamSet::new(1, 2.0, 0.0, 1.0), (16.0 * PI * PI / 27.0).powf(-1.0 / 6.0)),
    ];
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for (ps, want) in cases {
        worst = worst.max(rel(closed_constant_1d(&ps)?.c, want));
    }
    worst = worst.max(rel(dpd_constant(&ParamSet::new(2, 2.0, 3.0, 5.0))?.c, PI.powf(-1.0 / 6.0)));
    Ok(outcome(worst <= GOLDEN_TOL, format!("max rel err {worst:.2e} (tol {GOLDEN_TOL:.0e}), {:?}", t.elapsed())))
}

fn numeric_vs_closed(cfg: &ShootingConfig) -> Result<Outcome> {
    let one_d = [
        ParamSet::new(1, 2.0, 0.0, 3.0),
        ParamSet::new(1, 3.0, 1.0, 2.5),
        ParamSet::new(1, 2.0, 1.0, 5.0),
        ParamSet::new(1, 3.0, 2.0, 4.0),
        ParamSet::new(1, 2.0, 2.0, 4.0),
        ParamSet::new(1, 2.5, 2.0, 3.5),
    ];
    let families = [
        ParamSet::new(2, 2.0, 1.0 / 3.0, 2.0 / 3.0),
        ParamSet::new(2, 2.0, 3.0, 5.0),
        ParamSet::new(3, 2.0, 1.0 / 3.0, 2.0 / 3.0),
        ParamSet::new(3, 2.0, 2.0, 3.0),
    ];
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for ps in one_d {
        worst = worst.max(rel(best_constant_numeric(&ps, cfg)?.c, closed_constant_1d(&ps)?.c));
    }
    for ps in families {
        worst = worst.max(rel(best_constant_numeric(&ps, cfg)?.c, dpd_constant(&ps)?.c));
    }
    let elapsed = t.elapsed();
    Ok(outcome(
        worst <= NUMERIC_TOL && elapsed < NUMERIC_BUDGET,
        format!("10 sets, max rel err {worst:.2e} (tol {NUMERIC_TOL:.0e}), {elapsed:?} (budget {NUMERIC_BUDGET:?})"),
    ))
}

fn profiles(cfg: &ShootingConfig) -> Result<Outcome> {
    let ps = ParamSet::new(2, 2.0, 3.0, 5.0);
    let prof = shoot_finite_m(&ps, cfg)?;
    let rational = (0..=1000)
        .map(|i| {
            let r = 0.01 * i as f64;
            (prof.value(r) - 3f64.sqrt() / (1.0 + 3.0 * r * r).sqrt()).abs()
        })
        .fold(0.0, f64::max);
    let ps = ParamSet::new(3, 2.0, 1.0 / 3.0, 2.0 / 3.0);
    let num = shoot_finite_m(&ps, cfg)?;
    let exact = barenblatt_profile(&ps)?;
    let radius = exact.support.radius().expect("compact");
    let barenblatt = (0..=1000)
        .map(|i| {
            let r = radius * i as f64 / 1000.0;
            (num.value(r) - exact.value(r)).abs()
        })
        .fold(0.0, f64::max);
    Ok(outcome(
        rational <= PROFILE_TOL && barenblatt <= PROFILE_TOL,
        format!("rational sup err {rational:.2e}, d=3 Barenblatt sup err {barenblatt:.2e} (tol {PROFILE_TOL:.0e})"),
    ))
}

fn infinite_m(cfg: &ShootingConfig) -> Result<Outcome> {
    let prof = shoot_infinite_m(&ParamSet::infinite(1, 2.0, 1.0), cfg)?;
    let exp_err = (0..=2000)
        .map(|i| {
            let r = 0.01 * i as f64;
            (prof.value(r) - (-r).exp()).abs()
        })
        .fold(0.0, f64::max);
    let ps = ParamSet::infinite(2, 3.0, 0.0);
    let num = shoot_infinite_m(&ps, cfg)?;
    let exact = linfty_profile_q0(&ps)?;
    let radius = exact.support.radius().expect("compact");
    let sup_err = (0..=1000)
        .map(|i| {
            let r = 1.2 * radius * i as f64 / 1000.0;
            (num.value(r) - exact.value(r)).abs()
        })
        .fold(0.0, f64::max);
    let mut flux: f64 = 0.0;
    for ps in [
        ParamSet::infinite(1, 2.0, 1.0),
        ParamSet::infinite(2, 3.0, 0.0),
        ParamSet::infinite(2, 3.0, 1.0),
        ParamSet::infinite(2, 4.0, 3.0),
    ] {
        let rep = flux_identity_check(&shoot_infinite_m(&ps, cfg)?)?;
        flux = flux.max(rep.max_rel_residual).max(rep.origin_rel_residual);
    }
    Ok(outcome(
        exp_err <= EXP_PROFILE_TOL && sup_err <= SUP_PROFILE_TOL && flux <= FLUX_TOL,
        format!(
            "e^-r err {exp_err:.2e} (tol {EXP_PROFILE_TOL:.0e}), d=2 p=3 q=0 err {sup_err:.2e} (tol {SUP_PROFILE_TOL:.0e}), flux residual {flux:.2e} (tol {FLUX_TOL:.0e})"
        ),
    ))
}

fn identities(cfg: &ShootingConfig) -> Result<Outcome> {
    let mut h: f64 = 0.0;
    for ps in [ParamSet::new(1, 2.0, 0.0, 3.0), ParamSet::new(1, 3.0, 2.5, 4.0), ParamSet::new(1, 1.5, 0.2, 2.0)] {
        h = h.max(energy_report(&profile_1d_finite_m(&ps)?)?.h_variation);
    }
    let mut energy: f64 = 0.0;
    for ps in [
        ParamSet::new(2, 2.0, 1.0 / 3.0, 2.0 / 3.0),
        ParamSet::new(3, 2.0, 2.0, 3.0),
        ParamSet::new(2, 2.0, 0.5, 3.0),
        ParamSet::infinite(2, 3.0, 0.0),
        ParamSet::infinite(1, 2.0, 1.0),
    ] {
        let rep = energy_report(&extremal_profile(&ps, cfg)?)?;
        let v = rep.f_value.or(rep.g_value).expect("one functional");
        energy = energy.max(v.abs() / rep.scale);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut beta: f64 = 0.0;
    for _ in 0..2000 {
        let (x, a, b) = (rng.gen_range(0.0..1.0), rng.gen_range(0.2..6.0), rng.gen_range(0.2..6.0));
        let full = beta_complete(a, b)?;
        let refl = (beta_incomplete(1.0 - x, a, b)? - (full - beta_incomplete(x, b, a)?)).abs() / full;
        let y = beta_incomplete(x, a, b)?;
        let back = beta_incomplete_inverse(y, a, b)?;
        let round = (beta_incomplete(back, a, b)? - y).abs() / y.max(f64::MIN_POSITIVE);
        beta = beta.max(refl).max(round.min((back - x).abs()));
    }
    let mut eq1: f64 = 0.0;
    for (p, q, m) in [(2.0, 0.0, 3.0), (2.0, 1.0, 5.0), (3.0, 2.5, 4.0), (1.5, 0.2, 2.0), (2.0, 2.0, 3.0)] {
        let ps = ParamSet::new(1, p, q, m);
        let ex = validate(&ps)?;
        let c = closed_constant_1d(&ps)?.c;
        eq1 = eq1.max(rel(constant_from_mass(&ps, &ex, closed_mc(&ps)?), c));
    }
    for ps in [ParamSet::new(1, 2.0, 0.5, 0.75), ParamSet::new(1, 2.0, 3.0, 5.0), ParamSet::new(1, 3.0, 3.0, 3.5)] {
        eq1 = eq1.max(rel(dpd_constant(&ps)?.c, closed_constant_1d(&ps)?.c));
    }
    let mut eqn: f64 = 0.0;
    for ps in [
        ParamSet::new(2, 2.0, 1.0 / 3.0, 2.0 / 3.0),
        ParamSet::new(3, 2.0, 1.0 / 3.0, 2.0 / 3.0),
        ParamSet::new(2, 2.0, 3.0, 5.0),
        ParamSet::new(3, 2.0, 2.0, 3.0),
    ] {
        let ex = validate(&ps)?;
        let r = dpd_constant(&ps)?;
        let mass = radial_norm(&extremal_profile(&ps, cfg)?, ps.q + 1.0)?.value;
        eqn = eqn.max(rel(mass, r.m_c)).max(rel(constant_from_mass(&ps, &ex, mass), r.c));
    }
    let ok = h <= FIRST_INTEGRAL_TOL
        && energy <= ENERGY_TOL
        && beta <= BETA_TOL
        && eq1 <= EQUIV_TOL_1D
        && eqn <= EQUIV_TOL_ND;
    Ok(outcome(
        ok,
        format!(
            "H {h:.2e} (tol {FIRST_INTEGRAL_TOL:.0e}), F/G {energy:.2e} (tol {ENERGY_TOL:.0e}), Beta {beta:.2e} (tol {BETA_TOL:.0e}), constants d=1 {eq1:.2e} (tol {EQUIV_TOL_1D:.0e}), d=2,3 {eqn:.2e} (tol {EQUIV_TOL_ND:.0e})"
        ),
    ))
}

fn inequality(cfg: &ShootingConfig) -> Result<Outcome> {
    let sets = [
        ParamSet::new(1, 2.0, 0.0, 3.0),
        ParamSet::new(1, 2.0, 1.0, 5.0),
        ParamSet::new(1, 2.0, 2.0, 4.0),
        ParamSet::new(2, 2.0, 0.5, 3.0),
        ParamSet::infinite(1, 2.0, 1.0),
    ];
    let (mut slack, mut attain, mut n): (f64, f64, usize) = (f64::INFINITY, 0.0, 0);
    for (i, ps) in sets.iter().enumerate() {
        let c = gn_sharp::solver::best_constant(ps, cfg)?.c;
        for s in check_inequality(SampleFamily::Mixed, 100, ps, c, 100 + i as u64)? {
            slack = slack.min(s.slack / c);
            n += 1;
        }
        attain = attain.max(rel(ratio(&extremal_profile(ps, cfg)?, ps)?.1, c));
    }
    Ok(outcome(
        slack >= -SLACK_TOL && attain <= EXTREMAL_TOL,
        format!("{n} samples, min slack/C {slack:.2e} (floor -{SLACK_TOL:.0e}), extremal ratio err {attain:.2e} (tol {EXTREMAL_TOL:.0e})"),
    ))
}

fn limit() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, q) in [(2.0, 0.0), (2.0, 1.0), (3.0, 1.0)] {
        let rep = limit_study(p, q, &LIMIT_M, LIMIT_THRESHOLD)?;
        ok &= rep.passed;
        let last = rep.rows.last().expect("rows");
        let r = last.radius_gap.map(|g| format!(", R gap {g:.3}")).unwrap_or_default();
        parts.push(format!("({p},{q}) C gap {:.3}{r}", last.c_gap));
    }
    Ok(outcome(ok, format!("at m=65: {} (threshold {LIMIT_THRESHOLD:.0e})", parts.join("; "))))
}

fn nash(cfg: &ShootingConfig) -> Result<Outcome> {
    let one = nash_eigen_check(&ParamSet::new(1, 2.0, 0.0, 1.0), cfg)?;
    let two = nash_eigen_check(&ParamSet::new(2, 2.0, 0.0, 1.0), cfg)?;
    let e1 = rel(one.radius, PI);
    Ok(outcome(
        e1 <= NASH_1D_TOL && two.rel_err <= NASH_TOL,
        format!(
            "d=1 |R-π|/π {e1:.2e} (tol {NASH_1D_TOL:.0e}), d=2 vs j_(1,1) {:.2e} (tol {NASH_TOL:.0e})",
            two.rel_err
        ),
    ))
}

fn main() {
    let cfg = ShootingConfig::default();
    let criteria: [(&str, Box<dyn Fn() -> Result<Outcome>>); 8] = [
        ("golden constants", Box::new(golden)),
        ("numeric vs closed constants", Box::new(|| numeric_vs_closed(&cfg))),
        ("profile reproduction", Box::new(|| profiles(&cfg))),
        ("m = inf pipeline", Box::new(|| infinite_m(&cfg))),
        ("identity suite", Box::new(|| identities(&cfg))),
        ("inequality on random samples", Box::new(|| inequality(&cfg))),
        ("m -> inf limit study", Box::new(limit)),
        ("Nash eigenvalue link", Box::new(|| nash(&cfg))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!("{} {}. {name}: {detail}", if passed { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
}
