use std::f64::consts::PI;

use proptest::prelude::*;

use hardy_core::constants::{tau_theorem2, tau_theorem_main, HardyConstants};
use hardy_core::quadrature::gauss_legendre_on;
use hardy_core::rearrangement::{equimeasurability_deviation, hardy_littlewood_check, rearranged_weight, HomogeneousWeight};
use hardy_core::spectral::{lowest_eigenvalue, GegenbauerBasis};
use hardy_core::sphere::surface_area;
use hardy_core::verifier::{dirichlet_energy, hardy_gap, Angular, GapMode, Radial, TrialFunction};
use hardy_core::weights::{full_compensation_exponent, lp_norm, WeightSpec};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn weight() -> impl Strategy<Value = WeightSpec> {
    prop_oneof![
        (0.05..5.0f64).prop_map(|c| WeightSpec::constant(c).unwrap()),
        (0.05..5.0f64, 0.2..3.0f64).prop_map(|(a, t)| WeightSpec::cap(a, t).unwrap()),
        (0.05..3.0f64, 0.0..0.3f64).prop_map(|(a, b)| WeightSpec::polar_power(a, b).unwrap()),
        prop::collection::vec(0.0..4.0f64, 3..7).prop_map(|v| {
            let n = v.len();
            let angles = (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect();
            WeightSpec::tabulated(angles, v).unwrap()
        }),
    ]
}

/// `∫|∇u|²` by tensor Gauss–Legendre in (r, θ) with a centred difference in θ.
fn energy_by_quadrature(radial: Radial, l: usize, d: usize, r_max: f64) -> f64 {
    let basis = GegenbauerBasis::new(d, l).unwrap();
    let mut row = Vec::new();
    let mut mode = |t: f64| {
        basis.eval(t, &mut row);
        row[l]
    };
    let (rs, rw) = gauss_legendre_on(400, 0.0, r_max).unwrap();
    let (ts, tw) = gauss_legendre_on(200, 0.0, PI).unwrap();
    let latitude = surface_area(d - 1).unwrap();
    let h = 1e-5;
    let mut angular = (0.0, 0.0);
    for (&t, &w) in ts.iter().zip(&tw) {
        let jac = latitude * t.sin().powi(d as i32 - 2) * w;
        let y = mode(t);
        let dy = (mode(t + h) - mode(t - h)) / (2.0 * h);
        angular.0 += jac * y * y;
        angular.1 += jac * dy * dy;
    }
    let mut total = 0.0;
    for (&r, &w) in rs.iter().zip(&rw) {
        let (f, df) = radial.eval(r, d);
        total += w * r.powi(d as i32 - 1) * (df * df * angular.0 + f * f / (r * r) * angular.1);
    }
    total
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn lp_norm_is_homogeneous(phi in weight(), c in 0.1..10.0f64, p in 1.2..6.0f64, d in 3usize..7) {
        let base = lp_norm(&phi, p, d).unwrap();
        let scaled = lp_norm(&phi.scaled(c).unwrap(), p, d).unwrap();
        prop_assert!((scaled - c * base).abs() <= 1e-11 * c * base);
    }

    #[test]
    fn constant_weight_norm(c in 0.01..100.0f64, p in 1.01..20.0f64, d in 3usize..9) {
        let norm = lp_norm(&WeightSpec::constant(c).unwrap(), p, d).unwrap();
        let expected = c * surface_area(d).unwrap().powf(1.0 / p);
        prop_assert!((norm - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn partial_compensation_meets_main_at_its_end(phi in weight(), d in 3usize..9) {
        let p = full_compensation_exponent(d);
        let norm = lp_norm(&phi, p, d).unwrap();
        let (nu0, tau2) = tau_theorem2(d, p, norm).unwrap();
        let tau1 = tau_theorem_main(d, p, norm).unwrap();
        prop_assert!((nu0 - 1.0).abs() <= 1e-14);
        prop_assert!((tau2 - tau1).abs() <= 1e-13 * tau1);
    }

    #[test]
    fn rearrangement_scales_linearly(phi in weight(), c in 0.1..10.0f64, kappa in 0.2..1.0f64, d in 3usize..6) {
        let base = rearranged_weight(&HomogeneousWeight::new(phi.clone(), kappa, d).unwrap()).unwrap();
        let scaled = rearranged_weight(&HomogeneousWeight::new(phi.scaled(c).unwrap(), kappa, d).unwrap()).unwrap();
        prop_assert!((scaled.coefficient - c * base.coefficient).abs() <= 1e-11 * c * base.coefficient);
    }

    #[test]
    fn rearrangement_is_equimeasurable(phi in weight(), kappa in 0.2..1.0f64, d in 3usize..6) {
        let w = HomogeneousWeight::new(phi, kappa, d).unwrap();
        prop_assert!(equimeasurability_deviation(&w, &[0.1, 1.0, 10.0]).unwrap() <= 1e-8);
    }

    #[test]
    fn rearranged_pairing_dominates(
        samples in prop::collection::vec((0.0..5.0f64, 0.0..5.0f64, 0.01..2.0f64), 1..50)
    ) {
        let f: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let g: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let m: Vec<f64> = samples.iter().map(|s| s.2).collect();
        let r = hardy_littlewood_check(&f, &g, &m).unwrap();
        prop_assert!(r.holds);
        let same = hardy_littlewood_check(&f, &f, &m).unwrap();
        prop_assert!(same.gap.abs() <= 1e-12 * same.rhs.max(1.0));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn ritz_values_decrease_with_degree(phi in weight(), d in 3usize..6) {
        let rule = phi.adapted_rule(d, 256).unwrap();
        let coarse = lowest_eigenvalue(&phi, d, 8, &rule).unwrap().lambda1;
        let fine = lowest_eigenvalue(&phi, d, 32, &rule).unwrap().lambda1;
        prop_assert!(fine <= coarse + 1e-10 * coarse.abs().max(1.0));
    }

    #[test]
    fn eigenvalue_is_monotone_in_the_weight(a in 0.1..4.0f64, extra in 0.0..4.0f64, theta in 0.3..2.8f64, d in 3usize..6) {
        let small = WeightSpec::cap(a, theta).unwrap();
        let large = WeightSpec::cap(a + extra, theta).unwrap();
        let rule = small.adapted_rule(d, 256).unwrap();
        let l_small = lowest_eigenvalue(&small, d, 32, &rule).unwrap().lambda1;
        let l_large = lowest_eigenvalue(&large, d, 32, &rule).unwrap().lambda1;
        prop_assert!(l_large <= l_small + 1e-10);
        prop_assert!(l_small < 0.0 && l_small >= -a);
    }

    #[test]
    fn energy_separates(sigma in 0.3..3.0f64, l in 0usize..5, d in 3usize..6) {
        let u = TrialFunction::new(Radial::gaussian(sigma).unwrap(), Angular::BasisMode { l });
        let closed = dirichlet_energy(&u, d).unwrap();
        let numeric = energy_by_quadrature(u.radial, l, d, 14.0 * sigma);
        prop_assert!((closed - numeric).abs() <= 1e-8 * closed, "{closed} vs {numeric}");
    }

    #[test]
    fn main_gap_is_nonnegative(
        phi in weight(),
        d in 3usize..6,
        extra in 0.0..3.0f64,
        radial in prop_oneof![
            (0.2..5.0f64).prop_map(|s| Radial::gaussian(s).unwrap()),
            (0.005..0.5f64).prop_map(|e| Radial::power_cutoff(e).unwrap()),
            (0.1..1.0f64, 1.5..4.0f64).prop_map(|(a, b)| Radial::compact_bump(a, b).unwrap()),
        ],
        l in 0usize..4,
    ) {
        let p = full_compensation_exponent(d) + extra;
        let c = HardyConstants::main(&phi, d, p).unwrap();
        let angular = if l == 0 { Angular::Constant } else { Angular::BasisMode { l } };
        let r = hardy_gap(&TrialFunction::new(radial, angular), &phi, d, p, GapMode::Main, &c).unwrap();
        prop_assert!(r.holds, "gap {} for lhs {}", r.gap, r.lhs);
    }
}
