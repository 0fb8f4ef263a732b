//! Frozen reference values computed independently at 30 digits: masses from
//! the one-dimensional first integral (reduced to a Beta integral by
//! v = (u/α)^{m-q}, and checked by direct quadrature), family coefficients by
//! root-finding on the radial equation residual, and Bessel zeros.

#![allow(clippy::excessive_precision, clippy::approx_constant)]

use gn_sharp::closed_forms::*;
use gn_sharp::params::alpha_peak;
use gn_sharp::solver::{radial_norm, Radial};
use gn_sharp::specialfn::*;
use gn_sharp::verify::bessel_j_first_zero;
use gn_sharp::ParamSet;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(rel(got, want) <= tol, "{what}: got {got:e}, want {want:e}, rel {:e}", rel(got, want));
}

#[test]
fn gamma_reference_values() {
    close(gamma(5.5), 52.342_777_784_553_520_181, 1e-14, "Γ(5.5)");
    close(gamma(0.1), 9.513_507_698_668_731_836_3, 1e-14, "Γ(0.1)");
    close(gamma(19.5), 27_724_322_986_333_718.178, 1e-13, "Γ(19.5)");
    close(ln_gamma(100.3).unwrap(), 360.514_705_729_058_131_24, 1e-15, "lnΓ(100.3)");
}

#[test]
fn incomplete_beta_reference_values() {
    let cases = [
        (0.3, 2.5, 0.7, 0.021_223_821_468_789_691_790_903),
        (0.9, 0.5, 3.2, 1.029_937_635_318_151_733_388_877),
        (0.5, 1.5, -0.5, 0.429_203_673_205_103_380_768_678),
        (0.99, 3.0, 0.25, 1.584_578_970_065_983_317_168_293),
    ];
    for (x, a, b, want) in cases {
        close(beta_incomplete(x, a, b).unwrap(), want, 1e-12, &format!("B({x}; {a}, {b})"));
    }
}

/// (p, q, m, α_c, M_c, C) in one dimension.
const ONE_D: [(f64, f64, f64, f64, f64, f64); 6] = [
    (2.0, 0.0, 3.0, 1.587_401_051_968_199_5, 2.961_921_958_772_244_2, 0.690_988_298_942_670_96),
    (3.0, 1.0, 4.0, 1.357_208_808_297_453_3, 2.722_832_528_770_585_7, 0.898_354_254_813_725_18),
    (2.0, 1.0, 3.0, 1.414_213_562_373_095_0, 4.0, 0.871_685_542_871_735_68),
    (2.0, 2.0, 4.0, 1.290_994_448_735_805_6, 4.054_222_016_315_428_8, 0.945_130_291_632_976_53),
    (1.5, 1.0, 3.0, 1.414_213_562_373_095_0, 4.432_230_210_078_271_2, 0.828_579_442_821_587_20),
    (2.0, 0.5, 2.0, 1.587_401_051_968_199_5, 4.721_688_594_139_075_1, 0.818_386_916_286_184_25),
];

#[test]
fn one_dimensional_finite_m_constants() {
    for (p, q, m, alpha, mc, c) in ONE_D {
        let ps = ParamSet::new(1, p, q, m);
        close(alpha_peak(&ps).unwrap(), alpha, 1e-14, &format!("α_c {ps}"));
        close(closed_mc(&ps).unwrap(), mc, 1e-12, &format!("M_c {ps}"));
        close(closed_constant_1d(&ps).unwrap().c, c, 1e-12, &format!("C {ps}"));
    }
}

#[test]
fn one_dimensional_profiles_carry_the_reference_mass() {
    for (p, q, m, _, mc, _) in ONE_D {
        let ps = ParamSet::new(1, p, q, m);
        let prof = profile_1d_finite_m(&ps).unwrap();
        close(radial_norm(&prof, q + 1.0).unwrap().value, mc, 1e-9, &format!("∫u^(q+1) {ps}"));
    }
}

#[test]
fn one_dimensional_infinite_m_constants() {
    let cases = [
        (2.0, 0.0, 0.942_809_041_582_063_37, 0.825_481_812_223_656_67),
        (2.0, 1.0, 1.0, 1.0),
        (3.0, 1.0, 0.943_407_785_398_464_77, 1.068_295_702_343_634_7),
        (2.0, 2.0, 0.979_795_897_113_271_24, 1.093_362_073_943_278_1),
        (3.0, 0.0, 1.048_296_557_683_558_6, 0.896_378_130_777_141_77),
    ];
    for (p, q, mc, c) in cases {
        let ps = ParamSet::infinite(1, p, q);
        close(closed_mc(&ps).unwrap(), mc, 1e-13, &format!("M_c {ps}"));
        close(closed_constant_1d(&ps).unwrap().c, c, 1e-13, &format!("C {ps}"));
        let prof = profile_1d_m_infinity(&ps).unwrap();
        close(radial_norm(&prof, q + 1.0).unwrap().value, mc, 1e-10, &format!("∫u^(q+1) {ps}"));
    }
}

#[test]
fn barenblatt_member_in_three_dimensions() {
    let ps = ParamSet::new(3, 2.0, 1.0 / 3.0, 2.0 / 3.0);
    let prof = barenblatt_profile(&ps).unwrap();
    let co = prof.coefficients();
    close(co.k.unwrap(), 1.349_746_247_705_431_4e-5, 1e-10, "K");
    close(co.r.unwrap(), 8.573_214_099_741_123_3, 1e-12, "R");
    close(prof.peak, 5.359_375, 1e-12, "u(0)");
    close(closed_mc(&ps).unwrap(), 2_743.467_363_067_511_8, 1e-10, "M_c");
    close(dpd_constant(&ps).unwrap().c, 0.694_995_877_758_982_76, 1e-10, "C");
}

#[test]
fn positive_members() {
    let ps = ParamSet::new(3, 2.0, 2.0, 3.0);
    let prof = positive_profile(&ps).unwrap();
    let co = prof.coefficients();
    close(co.k.unwrap(), 2.0, 1e-13, "K");
    close(co.l.unwrap(), 0.5, 1e-13, "L");
    close(closed_mc(&ps).unwrap(), 55.830_913_597_111_036, 1e-10, "M_c");
    close(dpd_constant(&ps).unwrap().c, 0.608_291_446_720_795_27, 1e-10, "C");

    let ps = ParamSet::new(2, 2.0, 3.0, 5.0);
    close(closed_mc(&ps).unwrap(), 3.0 * PI, 1e-12, "M_c = 3π");
    close(dpd_constant(&ps).unwrap().c, 0.826_307_487_110_758_11, 1e-12, "C");
}

#[test]
fn sup_norm_family_without_q() {
    let cases = [
        (2, 3.0, 0.868_245_799_875_980_99, 0.953_638_318_983_411_72),
        (1, 2.0, std::f64::consts::SQRT_2, 0.825_481_812_223_656_67),
        (3, 4.0, 0.597_769_660_808_912_85, 1.284_028_086_396_960_5),
    ];
    for (d, p, radius, c) in cases {
        let ps = ParamSet::infinite(d, p, 0.0);
        let prof = linfty_profile_q0(&ps).unwrap();
        close(prof.support.radius().unwrap(), radius, 1e-12, &format!("R {ps}"));
        let (u, _) = prof.eval(0.0);
        close(u, 1.0, 1e-14, "u(0)");
        let ratio = gn_sharp::verify::ratio(&prof, &ps).unwrap().1;
        close(ratio, c, 1e-9, &format!("ratio {ps}"));
        assert!(prof.breakpoints().last().is_some());
    }
}

#[test]
fn bessel_zeros() {
    close(bessel_j_first_zero(1.0), 3.831_705_970_207_512_3, 1e-13, "j_1");
    close(bessel_j_first_zero(1.5), 4.493_409_457_909_064_2, 1e-13, "j_3/2");
    close(bessel_j_first_zero(0.5), PI, 1e-14, "j_1/2");
}
