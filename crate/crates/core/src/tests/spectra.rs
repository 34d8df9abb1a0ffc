use crate::bcf::{bcf_spectrum, bcf_spectrum_at, g_function_bcf, judd_candidates};
use crate::closed_form::uncoupled_spectrum;
use crate::fock::{oracle_spectrum, oracle_window};
use crate::heun::{g_function_heun, heun_poles, heun_spectrum, heun_spectrum_with, HeunScan, KBranch};
use crate::spectrum::BranchAgreement;
use crate::ModelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn asymmetric() -> ModelParams {
    ModelParams::new(1.0, 0.4, 0.15, 0.6, 0.0).unwrap()
}

fn nearest(xs: &[f64], x: f64) -> f64 {
    xs.iter().map(|r| (r - x).abs()).fold(f64::INFINITY, f64::min)
}

/// Every element of `a` has a partner in `b` within `tol`, and vice versa.
fn matched(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().all(|&x| nearest(b, x) <= tol) && b.iter().all(|&x| nearest(a, x) <= tol)
}

#[test]
fn g_vanishes_at_oracle_levels() {
    let p = asymmetric();
    let ground = oracle_spectrum(&p, 100, 1).unwrap().eigenvalues[0];
    let s = g_function_heun(&p, ground, 0.5, KBranch::Minus).unwrap();
    assert!(!s.flags.any());
    assert!(s.value.abs() < 1e-6, "{}", s.value);
}

#[test]
fn g_keeps_its_sign_between_levels() {
    let p = asymmetric();
    let ev = oracle_window(&p, 100, -1.0, 4.0).unwrap();
    let poles = heun_poles(&p, -1.0, 4.0);
    for w in ev.windows(2) {
        let (lo, hi) = (w[0] + 1e-3, w[1] - 1e-3);
        if poles.iter().any(|&q| q > lo && q < hi) {
            continue;
        }
        let signs: Vec<f64> =
            (0..5).map(|i| g_function_heun(&p, lo + (hi - lo) * i as f64 / 4.0, 0.5, KBranch::Minus).unwrap().value.signum()).collect();
        assert!(signs.iter().all(|&s| s == signs[0]), "{w:?}: {signs:?}");
    }
}

#[test]
fn gluing_point_changes_values_not_signs() {
    let p = asymmetric();
    for e in [-0.9, -0.3, 0.2, 1.1, 2.6] {
        let a = g_function_heun(&p, e, 0.4, KBranch::Minus).unwrap().value;
        let b = g_function_heun(&p, e, 0.6, KBranch::Minus).unwrap().value;
        assert_eq!(a.signum(), b.signum(), "E = {e}");
    }
}

#[test]
fn heun_matches_oracle_at_reference_parameters() {
    let p = asymmetric();
    let r = heun_spectrum(&p, -1.0, 4.0, 0.05).unwrap();
    let ev = oracle_window(&p, 100, -1.0, 4.0).unwrap();
    assert!(r.levels.len() >= 5);
    assert!(matched(&r.eigenvalues(), &ev, 1e-6));
    assert!(r.levels.iter().all(|l| l.agreement == Some(BranchAgreement::Both)));
}

#[test]
fn heun_zero_set_is_gluing_point_independent() {
    let p = asymmetric();
    let roots: Vec<Vec<f64>> = [0.35, 0.5, 0.65]
        .iter()
        .map(|&z| heun_spectrum_with(&p, -1.0, 4.0, 0.05, &HeunScan { zeta_star: z, ..HeunScan::default() }).unwrap().eigenvalues())
        .collect();
    for a in &roots {
        for b in &roots {
            assert_eq!(a.len(), b.len());
            assert!(matched(a, b, 1e-8));
        }
    }
}

#[test]
fn heun_is_exact_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let p = ModelParams::new(1.0, rng.gen_range(0.05..1.0), rng.gen_range(-0.5..0.5), rng.gen_range(0.1..1.0), 0.0).unwrap();
        let r = heun_spectrum(&p, -1.5, 3.0, 0.05).unwrap();
        let inner: Vec<f64> =
            oracle_window(&p, 100, -1.5, 3.0).unwrap().into_iter().filter(|e| *e > -1.5 + 1e-6 && *e < 3.0 - 1e-6).collect();
        let judd = &r.judd;
        let regular: Vec<f64> = inner.into_iter().filter(|e| nearest(judd, *e) > 1e-6).collect();
        assert!(matched(&r.eigenvalues(), &regular, 1e-6), "{p:?}\n{:?}\n{regular:?}", r.eigenvalues());
    }
}

#[test]
fn heun_reproduces_closed_form_without_tunnelling() {
    let p = ModelParams::new(1.0, 0.0, 0.13, 0.45, 0.0).unwrap();
    let (a, b) = uncoupled_spectrum(&p, 8).unwrap();
    let exact: Vec<f64> = a.levels.iter().chain(&b.levels).copied().filter(|e| *e > -1.0 && *e < 3.0).collect();
    let r = heun_spectrum(&p, -1.0, 3.0, 0.05).unwrap();
    let found: Vec<f64> = r.eigenvalues().into_iter().chain(r.judd.iter().copied()).collect();
    for e in &exact {
        assert!(nearest(&found, *e) < 1e-8, "{e}: {found:?}");
    }
}

#[test]
fn k_branches_agree() {
    let r = heun_spectrum_with(&asymmetric(), -1.0, 4.0, 0.05, &HeunScan { primary: KBranch::Plus, ..HeunScan::default() }).unwrap();
    let a = &r.report.as_ref().unwrap().roots;
    let b = &r.secondary_report.as_ref().unwrap().roots;
    assert!(matched(a, b, 1e-8));
}

fn max_low_error(p: &ModelParams) -> f64 {
    let ev = oracle_spectrum(p, 120, 4).unwrap().eigenvalues;
    let roots = bcf_spectrum(p, -1.0, 3.0, 0.05).unwrap().eigenvalues();
    ev.iter().map(|e| nearest(&roots, *e)).fold(0.0, f64::max)
}

#[test]
fn bcf_at_reference_parameters() {
    let p = ModelParams::new(1.0, 0.3, 0.0, 0.05, 0.02).unwrap();
    let g = g_function_bcf(&p, 0.0, 0.5).unwrap();
    assert!(!g.flags.any());
    assert!(max_low_error(&p) <= 5e-3);
}

#[test]
fn bcf_error_is_second_order() {
    for (d, e, g, l) in [(0.3, 0.0, 0.05, 0.02), (0.5, 0.1, 0.04, 0.03), (0.2, -0.1, 0.06, 0.015)] {
        let p = ModelParams::new(1.0, d, e, g, l).unwrap();
        let ratio = max_low_error(&p) / max_low_error(&ModelParams::new(1.0, d, e, g / 2.0, l / 2.0).unwrap());
        assert!((2.5..=8.0).contains(&ratio), "({d}, {e}, {g}, {l}): {ratio}");
    }
}

#[test]
fn bcf_zero_set_is_gluing_point_independent() {
    let p = ModelParams::new(1.0, 0.3, 0.0, 0.05, 0.02).unwrap();
    let a = bcf_spectrum_at(&p, -1.0, 3.0, 0.05, 0.4).unwrap().eigenvalues();
    let b = bcf_spectrum_at(&p, -1.0, 3.0, 0.05, 0.6).unwrap().eigenvalues();
    assert!(matched(&a, &b, 1e-8));
}

#[test]
fn bcf_tends_to_heun() {
    let h = heun_spectrum(&ModelParams::new(1.0, 0.4, 0.15, 0.05, 0.0).unwrap(), -1.0, 4.0, 0.05).unwrap();
    let b = bcf_spectrum(&ModelParams::new(1.0, 0.4, 0.15, 0.05, 1e-6).unwrap(), -1.0, 4.0, 0.05).unwrap();
    assert!(matched(&h.eigenvalues(), &b.eigenvalues(), 1e-5));
}

#[test]
fn bcf_approaches_closed_form_without_tunnelling() {
    let mut last = f64::INFINITY;
    for s in [1.0, 0.5, 0.25] {
        let p = ModelParams::new(1.0, 0.0, 0.1, 0.08 * s, 0.04 * s).unwrap();
        let (a, b) = uncoupled_spectrum(&p, 3).unwrap();
        let found: Vec<f64> = {
            let r = bcf_spectrum(&p, -1.0, 2.0, 0.05).unwrap();
            r.eigenvalues().into_iter().chain(r.judd.iter().copied()).collect()
        };
        let err = a.levels.iter().chain(&b.levels).filter(|e| **e < 2.0).map(|e| nearest(&found, *e)).fold(0.0, f64::max);
        assert!(err < last, "{s}: {err} vs {last}");
        last = err;
    }
}

#[test]
fn judd_points_are_not_regular_roots() {
    let p = ModelParams::new(1.0, 0.6, 0.0, 0.4, 0.0).unwrap();
    let cands = judd_candidates(&p, (-1.0, 3.0), 10);
    assert!(!cands.is_empty());
    let ev = oracle_window(&p, 100, -1.0, 3.0).unwrap();
    for c in &cands {
        assert!(c.residual_tail <= 1e-10);
        assert!(nearest(&ev, c.energy) < 1e-9, "{c:?}");
    }
    for r in [heun_spectrum(&p, -1.0, 3.0, 0.05).unwrap(), bcf_spectrum(&p.with_lambda(1e-9), -1.0, 3.0, 0.05).unwrap()] {
        for c in &cands {
            assert!(nearest(&r.eigenvalues(), c.energy) > 1e-7);
        }
    }
}
