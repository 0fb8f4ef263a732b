//! Property tests for the algebraic and analytic invariants.

use gn_sharp::closed_forms::*;
use gn_sharp::params::{self, alpha_peak, theta_alternative, validate};
use gn_sharp::solver::{gradient_norm_p, radial_norm};
use gn_sharp::specialfn::*;
use gn_sharp::verify::{ratio, Scaled};
use gn_sharp::{ExtReal, ParamSet};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Admissible finite-m parameter sets built from unit fractions.
fn finite_params() -> impl Strategy<Value = ParamSet> {
    (1u32..=4, 0.01f64..0.99, 0.0f64..0.99, 0.01f64..0.99).prop_map(|(d, tp, tq, tm)| {
        let df = d as f64;
        let p_lo = (2.0 * df / (df + 2.0)).max(1.0);
        let p = p_lo + 0.05 + tp * 4.0;
        let sigma = if p < df { ((p - 1.0) * df + p) / (df - p) } else { f64::INFINITY };
        let q = tq * (sigma - 1.0).min(5.0);
        let m = q + tm * (sigma.min(q + 8.0) - q);
        ParamSet::new(d, p, q, m)
    })
}

fn one_d_params() -> impl Strategy<Value = ParamSet> {
    (1.2f64..5.0, 0.0f64..4.0, 0.05f64..6.0).prop_map(|(p, q, dm)| ParamSet::new(1, p, q, q + dm))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn theta_denominators_agree(ps in finite_params()) {
        let ex = validate(&ps).unwrap();
        let alt = theta_alternative(&ps).unwrap();
        prop_assert!(rel(ex.theta, alt) <= 1e-14, "{} vs {}", ex.theta, alt);
        prop_assert!(ex.theta > 0.0 && ex.theta < 1.0);
    }

    #[test]
    fn theta_matches_the_gamma_form(ps in finite_params()) {
        let ex = validate(&ps).unwrap();
        let g = ex.gamma.unwrap();
        prop_assert!(rel(ex.theta, ps.p / (g + ps.p / 2.0)) <= 1e-13);
    }
}

proptest! {
    #[test]
    fn gamma_identities_in_one_dimension(ps in one_d_params()) {
        let ex = validate(&ps).unwrap();
        let (p, q, m) = (ps.p, ps.q, ps.m_finite().unwrap());
        let g = ex.gamma.unwrap();
        prop_assert!(rel(g + p / 2.0, (m + 1.0) * ex.eta2 / (m - q)) <= 1e-13);
        prop_assert!(rel(g - p / 2.0, (q + 1.0) * ex.eta1.unwrap() / (m - q)) <= 1e-13);
    }

    #[test]
    fn barenblatt_exponent_relation(d in 1u32..=4, p in 1.3f64..5.0, tq in 0.0f64..0.95) {
        let q = tq * (p - 1.0);
        let ps = ParamSet::new(d, p, q, (q + 1.0) * (p - 1.0) / p);
        prop_assume!(validate(&ps).is_ok());
        let th = validate(&ps).unwrap().theta;
        let m = ps.m_finite().unwrap();
        let df = d as f64;
        prop_assert!((th / p - 1.0 / (m + 1.0) - (th / df - (1.0 - th) / (q + 1.0))).abs() <= 1e-13);
    }

    #[test]
    fn peak_solves_the_turning_condition(ps in one_d_params()) {
        let (q, m) = (ps.q, ps.m_finite().unwrap());
        let a = alpha_peak(&ps).unwrap();
        prop_assert!(a > 1.0);
        prop_assert!(rel(a.powf(m + 1.0) / (m + 1.0), a.powf(q + 1.0) / (q + 1.0)) <= 1e-13);
    }

    #[test]
    fn gamma_recurrence(x in 0.01f64..170.0) {
        prop_assert!(rel(gamma(x + 1.0), x * gamma(x)) <= 1e-13);
    }

    #[test]
    fn exp_ln_gamma_matches_gamma(x in 1e-3f64..=170.0) {
        prop_assert!(rel(ln_gamma(x).unwrap().exp(), gamma(x)) <= 1e-13);
    }

    #[test]
    fn incomplete_beta_reflection(x in 0.0f64..=1.0, a in 0.2f64..6.0, b in 0.2f64..6.0) {
        let full = beta_complete(a, b).unwrap();
        let lhs = beta_incomplete(1.0 - x, a, b).unwrap();
        let rhs = full - beta_incomplete(x, b, a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * full, "{lhs} vs {rhs}");
    }

    #[test]
    fn incomplete_beta_derivative(x in 0.05f64..0.95, a in 0.3f64..5.0, b in -0.8f64..5.0) {
        let h = 1e-5;
        let fd = (beta_incomplete(x + h, a, b).unwrap() - beta_incomplete(x - h, a, b).unwrap()) / (2.0 * h);
        let exact = x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0);
        prop_assert!(rel(fd, exact) <= 1e-6, "{fd} vs {exact}");
    }

    #[test]
    fn incomplete_beta_is_increasing(x1 in 0.0f64..1.0, dx in 1e-6f64..1.0, a in 0.2f64..6.0, b in 0.2f64..6.0) {
        let x2 = (x1 + dx).min(1.0);
        prop_assume!(x2 > x1);
        prop_assert!(beta_incomplete(x2, a, b).unwrap() > beta_incomplete(x1, a, b).unwrap());
    }

    #[test]
    fn incomplete_beta_inverse_roundtrip(x in 0.0f64..=1.0, a in 0.2f64..6.0, b in 0.2f64..6.0) {
        let y = beta_incomplete(x, a, b).unwrap();
        let back = beta_incomplete_inverse(y, a, b).unwrap();
        let y2 = beta_incomplete(back, a, b).unwrap();
        prop_assert!((y2 - y).abs() <= 1e-12 * y.max(1e-300) || (back - x).abs() <= 1e-12);
    }

    #[test]
    fn incomplete_beta_inverse_unbounded_branch(y in 0.0f64..20.0, a in 0.3f64..4.0, b in -0.9f64..0.0) {
        let x = beta_incomplete_inverse(y, a, b).unwrap();
        prop_assert!((0.0..1.0).contains(&x));
        // Near x = 1 one ulp of x moves B by ulp/(1-x)^{1-b}.
        let slope = x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0);
        let tol = 1e-12 * y.max(1e-300) + 4.0 * f64::EPSILON * slope;
        prop_assert!((beta_incomplete(x, a, b).unwrap() - y).abs() <= tol);
    }
}

#[test]
fn surface_is_dimension_times_volume() {
    for d in 1..=10 {
        assert!(rel(params::surface(d), d as f64 * params::omega(d)) <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_dimensional_mass_gives_the_closed_constant(ps in one_d_params()) {
        let ex = validate(&ps).unwrap();
        let mc = closed_mc(&ps).unwrap();
        let c = closed_constant_1d(&ps).unwrap().c;
        prop_assert!(rel(constant_from_mass(&ps, &ex, mc), c) <= 1e-10);
    }

    #[test]
    fn family_constants_agree_with_the_one_dimensional_formula(p in 1.3f64..5.0, t in 0.0f64..0.95, positive in any::<bool>()) {
        let ps = if positive {
            let q = p - 1.0 + 0.05 + 3.0 * t;
            ParamSet::new(1, p, q, (p * (q - 1.0) + 1.0) / (p - 1.0))
        } else {
            let q = t * (p - 1.0);
            ParamSet::new(1, p, q, (q + 1.0) * (p - 1.0) / p)
        };
        prop_assume!(validate(&ps).is_ok());
        let a = dpd_constant(&ps).unwrap().c;
        let b = closed_constant_1d(&ps).unwrap().c;
        prop_assert!(rel(a, b) <= 1e-10, "{a} vs {b}");
    }

    #[test]
    fn family_masses_give_family_constants(d in 2u32..=3, p in 1.5f64..4.0, t in 0.0f64..0.9, positive in any::<bool>()) {
        let ps = if positive {
            let q = p - 1.0 + 0.1 + 2.0 * t;
            ParamSet::new(d, p, q, (p * (q - 1.0) + 1.0) / (p - 1.0))
        } else {
            let q = t * (p - 1.0);
            ParamSet::new(d, p, q, (q + 1.0) * (p - 1.0) / p)
        };
        prop_assume!(validate(&ps).is_ok());
        let r = match dpd_constant(&ps) {
            Ok(r) => r,
            Err(gn_sharp::Error::SobolevCritical) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let ex = validate(&ps).unwrap();
        prop_assert!(rel(constant_from_mass(&ps, &ex, r.m_c), r.c) <= 1e-8);
        let prof = extremal(&ps);
        let mass = radial_norm(&prof, ps.q + 1.0).unwrap().value;
        prop_assert!(rel(mass, r.m_c) <= 1e-8, "{mass} vs {}", r.m_c);
    }

    #[test]
    fn compact_profile_matches_the_reflected_formula(p in 1.3f64..5.0, tq in 0.0f64..0.95, dm in 0.05f64..6.0, t in 0.0f64..1.0) {
        let q = tq * (p - 1.0);
        let ps = ParamSet::new(1, p, q, q + dm);
        let prof = profile_1d_finite_m(&ps).unwrap();
        let ProfileRepr::ClosedForm(ClosedForm::OneDCompact { alpha_c, bar_c, radius, a, b, mq }) = prof.repr else {
            return Err(TestCaseError::fail("expected a touchdown profile"));
        };
        let reflected = ClosedForm::OneDPositive { alpha_c, bar_c, a: b, b: a, mq };
        let r = t * radius;
        let (u1, u2) = (prof.value(r), reflected.eval(r).0);
        prop_assert!((u1 - u2).abs() <= 1e-10 * alpha_c, "r = {r}: {u1} vs {u2}");
    }

    #[test]
    fn family_exponent_algebra(p in 1.2f64..6.0, t in 0.0f64..0.95) {
        // Barenblatt
        let q = t * (p - 1.0);
        let m = (q + 1.0) * (p - 1.0) / p;
        let a = (p - 1.0) / (p - m - 1.0);
        prop_assert!(rel((a - 1.0) * (p - 1.0) / a, m) <= 1e-14 || ((a - 1.0) * (p - 1.0) / a - m).abs() <= 1e-14);
        prop_assert!((((a - 1.0) * (p - 1.0) - 1.0) / a - q).abs() <= 1e-13);
        // positive family
        let q = p - 1.0 + 0.01 + 4.0 * t;
        let m = (p * (q - 1.0) + 1.0) / (p - 1.0);
        let a = (p - 1.0) / (q + 1.0 - p);
        prop_assert!(rel((a + 1.0) * (p - 1.0), a * q) <= 1e-13);
        prop_assert!(rel((a + 1.0) * (p - 1.0) + 1.0, a * m) <= 1e-13);
    }

    #[test]
    fn equality_family_is_scale_invariant(ps in one_d_params(), amp in 0.05f64..20.0, lambda in 0.1f64..10.0) {
        let prof = profile_1d_finite_m(&ps).unwrap();
        let base = ratio(&prof, &ps).unwrap().1;
        let scaled = Scaled { inner: &prof, amplitude: amp, lambda };
        let r = ratio(&scaled, &ps).unwrap().1;
        prop_assert!(rel(r, base) <= 1e-9, "{r} vs {base}");
    }

    #[test]
    fn extremal_slack_is_tiny(ps in one_d_params()) {
        let c = closed_constant_1d(&ps).unwrap().c;
        let r = ratio(&profile_1d_finite_m(&ps).unwrap(), &ps).unwrap().1;
        let slack = c - r;
        prop_assert!(slack >= -1e-8 * c && slack <= 1e-6 * c, "slack {slack}");
    }

    #[test]
    fn sup_norm_profiles_satisfy_the_g_identity(p in 1.2f64..5.0, q in 0.0f64..4.0) {
        let ps = ParamSet::infinite(1, p, q);
        let prof = profile_1d_m_infinity(&ps).unwrap();
        let g = gradient_norm_p(&prof, p).unwrap().value;
        let m = radial_norm(&prof, q + 1.0).unwrap().value;
        prop_assert!(rel(g, p / ((q + 1.0) * (p - 1.0)) * m) <= 1e-6);
    }
}

fn extremal(ps: &ParamSet) -> gn_sharp::RadialProfile {
    gn_sharp::solver::extremal_profile(ps, &Default::default()).unwrap()
}

#[test]
fn infinite_m_is_a_separate_branch() {
    let ps = ParamSet::infinite(1, 2.0, 1.0);
    let ex = validate(&ps).unwrap();
    assert_eq!(ex.gamma, None);
    assert_eq!(ps.m, ExtReal::Infinite);
    assert!((ex.theta - 0.5).abs() < 1e-15);
}
