use crate::bcf::{bcf_reduce, exp_gauge};
use crate::closed_form::{uncoupled_spectrum, weber_residual};
use crate::fock::oracle_spectrum;
use crate::heun::{che_params, KBranch};
use crate::model::{composed_operator, DEFAULT_REGIME_TOL};
use crate::rootfind::{scan_and_refine, GFunctionSample, RootScanConfig};
use crate::series::bch_coefficients;
use crate::{classify_regime, ode_residual, ode_to_recurrence, series_eval, ModelParams, Poly, PolyOde, Regime};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (0.0..1.0f64, -0.5..0.5f64, -0.6..0.6f64, -0.3..0.3f64).prop_map(|(d, e, g, l)| ModelParams::new(1.0, d, e, g, l).unwrap())
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-2.0..2.0f64, 1..=max_deg + 1).prop_map(Poly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_spectrum_is_flip_symmetric(p in params()) {
        let a = oracle_spectrum(&p, 60, 8).unwrap().eigenvalues;
        let b = oracle_spectrum(&p.flipped(), 60, 8).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn oracle_levels_decrease_with_cutoff(p in params()) {
        let runs: Vec<Vec<f64>> = [20, 30, 40].iter().map(|&n| oracle_spectrum(&p, n, 6).unwrap().eigenvalues).collect();
        for w in runs.windows(2) {
            for (hi, lo) in w[0].iter().zip(&w[1]) {
                prop_assert!(*lo <= hi + 1e-12, "{lo} > {hi}");
            }
        }
    }

    #[test]
    fn regime_classification_is_deterministic(p in params(), zero in 0usize..4) {
        let p = match zero {
            0 => p.with_delta(0.0),
            1 => p.with_lambda(0.0),
            2 => p.with_g(0.0),
            _ => p,
        };
        let r = classify_regime(&p, DEFAULT_REGIME_TOL);
        prop_assert_eq!(r, classify_regime(&p, DEFAULT_REGIME_TOL));
        let expected = if p.delta() == 0.0 {
            Regime::Uncoupled
        } else if p.lambda() == 0.0 {
            Regime::Asymmetric
        } else if p.g() == 0.0 {
            Regime::TwoPhoton
        } else {
            Regime::General
        };
        prop_assert_eq!(r, expected);
    }

    #[test]
    fn closed_form_branches_swap_under_flip(p in params()) {
        let p = p.with_delta(0.0);
        let (plus, minus) = uncoupled_spectrum(&p, 6).unwrap();
        let (fplus, fminus) = uncoupled_spectrum(&p.flipped(), 6).unwrap();
        prop_assert_eq!(&minus.levels, &fplus.levels);
        prop_assert_eq!(&plus.levels, &fminus.levels);
    }

    #[test]
    fn composed_operator_is_quadratic_in_energy(p in params(), e1 in -2.0..2.0f64, e2 in -2.0..2.0f64) {
        // Coefficients are at most quadratic in E, so the second difference is E-independent.
        let at = |e: f64| composed_operator(&p, e);
        let (a, b, c) = (at(e1), at(e1 + 1.0), at(e1 + 2.0));
        let (x, y, z) = (at(e2), at(e2 + 1.0), at(e2 + 2.0));
        for k in 0..5 {
            let d1 = &(&a[k] - &b[k].scale(2.0)) + &c[k];
            let d2 = &(&x[k] - &y[k].scale(2.0)) + &z[k];
            let diff = &d1 - &d2;
            prop_assert!(diff.max_abs_coeff() <= 1e-9 * d1.max_abs_coeff().max(1.0));
        }
    }

    #[test]
    fn division_reconstructs_dividend(a in poly(6), b in poly(3)) {
        prop_assume!(b.degree().is_some() && b.coeffs().last().unwrap().abs() > 0.1);
        let (q, r) = a.div_rem(&b);
        let back = &(&q * &b) + &r;
        prop_assert!((&back - &a).max_abs_coeff() <= 1e-8 * a.max_abs_coeff().max(1.0));
        if let (Some(dr), Some(db)) = (r.degree(), b.degree()) {
            prop_assert!(dr < db);
        }
    }

    #[test]
    fn series_solves_random_second_order_equations(p0 in poly(2), p1 in poly(2), c in 0.5..2.0f64, t in -1.0..1.0f64) {
        // Leading polynomial z − root with the root kept away from the origin.
        let p2 = Poly::new(vec![c, 1.0]);
        let ode = PolyOde::new(vec![p0, p1, p2], 0.0).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap();
        let x = 0.2 * ode.convergence_radius() * t;
        let (_, _, sol) = series_eval(&rec, x, 2000, 1e-14).unwrap();
        prop_assert!(ode_residual(&ode, &sol, x) < 1e-10);
    }

    #[test]
    fn heun_gauge_exponent_solves_its_quadratic(p in params(), e in -1.0..3.0f64, plus in any::<bool>()) {
        let p = p.with_lambda(0.0).with_g(p.g().abs().max(0.05));
        let branch = if plus { KBranch::Plus } else { KBranch::Minus };
        let c = che_params(&p, e, branch).unwrap();
        prop_assert!(c.quadratic_residual().abs() <= 1e-12 * c.k.abs().max(1.0).powi(2));
    }

    #[test]
    fn bcf_gauge_removes_the_quadratic_growth(e in -1.0..3.0f64, d in 0.1..1.0f64, g in 0.02..0.3f64, l in 0.005..0.1f64) {
        let p = ModelParams::new(1.0, d, 0.0, g, l).unwrap();
        let b = bcf_reduce(&p, e).unwrap();
        if let Some(ks) = b.gauge_exponents() {
            for k in ks {
                let coeffs = exp_gauge(&b.ode(0.0), k);
                let lead = coeffs.polys()[0].coeff(2);
                prop_assert!(lead.abs() <= 1e-10 * (k * k).max(1.0));
            }
        }
    }

    #[test]
    fn weber_pair_solves_its_equation(a1 in -3.0..3.0f64, z in -3.0..3.0f64) {
        prop_assert!(weber_residual(a1, z).unwrap() < 1e-9);
    }

    #[test]
    fn bch_odd_coefficients_vanish_without_odd_terms(alpha in -5.0..5.0f64, gamma in -3.0..3.0f64) {
        let a = bch_coefficients(alpha, 0.0, gamma, 0.0, 40);
        prop_assert!(a.iter().skip(1).step_by(2).all(|x| *x == 0.0));
    }

    #[test]
    fn halving_the_grid_keeps_every_root(k in 1.0..8.0f64, phase in 0.0..3.0f64) {
        let f = |e: f64| GFunctionSample::plain(e, (k * e + phase).sin());
        let coarse = scan_and_refine(f, &RootScanConfig::new(0.0, 4.0, 0.1));
        let fine = scan_and_refine(f, &RootScanConfig::new(0.0, 4.0, 0.05));
        for r in &coarse.roots {
            prop_assert!(fine.roots.iter().any(|s| (s - r).abs() <= 1e-9));
        }
    }
}
