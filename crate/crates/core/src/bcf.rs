//! General model at small `g` and `λ`: the bi-confluent Fuchsian reduction, its four-term
//! local series about `ζ = 0` and `ζ = 1`, Judd-point detection and the full fourth-order series.
//!
//! Dropping the `λ²` and `λg` monomials of the composed operator leaves
//! `(z² − q²)φ″ = (A₁ + A₂z + A₃z² + A₄z³)φ′ + (B₁ + B₂z + B₃z²)φ`, which the map
//! `ζ = z/2q + 1/2` turns into
//! `φ″ = (α₁ζ + α₂ + β₁/(ζ−1) + β₂/ζ)φ′ + (γ₁ + γ₂/(ζ−1) + γ₃/ζ)φ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heun::DEFAULT_ZETA_STAR;
use crate::model::{operator_compose, ModelParams, Ode4Coeffs, DEFAULT_REGIME_TOL};
use crate::poly::Poly;
use crate::rootfind::{scan_and_refine, GFunctionSample, RootScanConfig, SampleFlags};
use crate::series::{ode_to_recurrence, series_coefficients, PolyOde, RecurrenceSpec, SeriesSolution};
use crate::spectrum::{
    add_exceptional_levels, check_gluing_point, passes_resonance, with_margin_flag, wronskian_sample, Level, Method, SpectrumResult,
};

/// Singular points closer than this are treated as merged.
pub const DEGENERATE_Q: f64 = 1e-10;
/// Relative size under which a coefficient counts as zero in the truncation test.
pub const TRUNCATION_TOL: f64 = 1e-10;
/// Consecutive vanishing coefficients required by the truncation test.
pub const TRUNCATION_RUN: usize = 3;
/// Roots this close to a Judd candidate are attributed to it.
pub const JUDD_EXCLUSION: f64 = 1e-7;

/// The tabulated reduction, kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrintedBcfTables {
    /// NaN when the tabulated `q²` is negative.
    pub q: f64,
    pub a: [f64; 4],
    pub b: [f64; 3],
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcfParams {
    pub q: f64,
    pub a: [f64; 4],
    pub b: [f64; 3],
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub mu: f64,
    pub nu: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub kappa: f64,
    pub printed: PrintedBcfTables,
}

impl BcfParams {
    /// `ζ(ζ−1)φ″ − [α₁ζ²(ζ−1) + α₂ζ(ζ−1) + β₁ζ + β₂(ζ−1)]φ′ − [γ₁ζ(ζ−1) + γ₂ζ + γ₃(ζ−1)]φ = 0`.
    pub fn ode(&self, zeta0: f64) -> PolyOde {
        bcf_ode([self.alpha1, self.alpha2, self.beta1, self.beta2, self.gamma1, self.gamma2, self.gamma3], zeta0)
    }

    /// The same equation in `z`, multiplied through: `(z² − q²)φ″ − (A₁ + … + A₄z³)φ′ − (B₁ + B₂z + B₃z²)φ = 0`.
    pub fn z_ode(&self, z0: f64) -> PolyOde {
        let q = self.q;
        PolyOde::new(
            vec![Poly::new(self.b.to_vec()).scale(-1.0), Poly::new(self.a.to_vec()).scale(-1.0), Poly::new(vec![-q * q, 0.0, 1.0])],
            z0,
        )
        .expect("leading coefficient is z² − q²")
    }

    pub fn recurrence_at_zero(&self) -> Result<RecurrenceSpec> {
        Ok(ode_to_recurrence(&self.ode(0.0))?.with_label("bi-confluent Fuchsian, four-term about ζ = 0"))
    }

    pub fn recurrence_at_one(&self) -> Result<RecurrenceSpec> {
        Ok(ode_to_recurrence(&self.ode(1.0))?.with_label("bi-confluent Fuchsian, four-term about ζ = 1"))
    }

    /// Roots of `k² = α₂k + γ₁`, the exponents of `φ = e^{kζ}w` that remove `γ₁` when `α₁ = 0`.
    pub fn gauge_exponents(&self) -> Option<[f64; 2]> {
        let disc = self.alpha2 * self.alpha2 + 4.0 * self.gamma1;
        (disc >= 0.0).then(|| {
            let s = disc.sqrt();
            [(self.alpha2 + s) / 2.0, (self.alpha2 - s) / 2.0]
        })
    }
}

/// The bi-confluent equation for `[α₁, α₂, β₁, β₂, γ₁, γ₂, γ₃]`, multiplied by `ζ(ζ−1)`.
pub fn bcf_ode(c: [f64; 7], zeta0: f64) -> PolyOde {
    let [a1, a2, b1, b2, g1, g2, g3] = c;
    PolyOde::new(
        vec![Poly::new(vec![g3, g1 - g2 - g3, -g1]), Poly::new(vec![b2, a2 - b1 - b2, a1 - a2, -a1]), Poly::new(vec![0.0, -1.0, 1.0])],
        zeta0,
    )
    .expect("leading coefficient is ζ(ζ−1)")
}

/// Equation satisfied by `w = e^{−kζ}φ` when `φ` solves the second-order `ode`.
pub fn exp_gauge(ode: &PolyOde, k: f64) -> PolyOde {
    let [p0, p1, p2] = [&ode.polys()[0], &ode.polys()[1], &ode.polys()[2]];
    PolyOde::new(vec![&(p0 + &p1.scale(k)) + &p2.scale(k * k), p1 + &p2.scale(2.0 * k), p2.clone()], ode.z0())
        .expect("leading coefficient is unchanged")
}

fn printed_tables(p: &ModelParams, energy: f64) -> PrintedBcfTables {
    let (w, d, e, g, l) = (p.omega(), p.delta(), p.epsilon(), p.g(), p.lambda());
    let q2 = (g * g + l * (e + energy)) / (w * w) + 2.0 * l / w;
    let q = if q2 >= 0.0 { q2.sqrt() } else { f64::NAN };
    let a = [g * (e + energy) / (w * w) + g / w, g * g / (w * w) + (e + energy) / w - 1.0, g / w, l / w];
    let b =
        [(g * g + e * e - energy * energy - d * d) / (w * w), 2.0 * e * g / (w * w) - g / w, (g * g + 2.0 * e * l) / (w * w) - 2.0 * l / w];
    PrintedBcfTables {
        q,
        a,
        b,
        beta_plus: 0.5 * ((a[3] + a[2]) * q2 + a[1] + a[0]),
        beta_minus: 0.5 * ((a[3] - a[2]) * q2 + a[1] - a[0]),
        alpha1: 2.0 * q * a[3],
        alpha2: 2.0 * q * a[2] - 2.0 * q2 * a[3],
    }
}

/// `q² = (g² + 2λ(ω + ε))/ω²` of the reduced equation.
pub fn singularity_q2(p: &ModelParams) -> f64 {
    let w = p.omega();
    (p.g() * p.g() + 2.0 * p.lambda() * (w + p.epsilon())) / (w * w)
}

/// Reduced-equation parameters at trial energy `E`.
pub fn bcf_reduce(p: &ModelParams, energy: f64) -> Result<BcfParams> {
    let (w, d, e, g, l) = (p.omega(), p.delta(), p.epsilon(), p.g(), p.lambda());
    let q2 = singularity_q2(p);
    if q2 < 0.0 {
        return Err(Error::ComplexSingularity(q2));
    }
    let q = q2.sqrt();
    if q < DEGENERATE_Q {
        return Err(Error::DegenerateQ(q));
    }
    let w2 = w * w;
    let a = [g / w + 2.0 * g * e / w2, 2.0 * g * g / w2 - 1.0 + 2.0 * energy / w, 0.0, 0.0];
    let b = [(g * g + e * e - energy * energy + d * d) / w2, (2.0 * e * g - w * g) / w2, (g * g + 2.0 * l * e - 2.0 * l * w) / w2];
    let beta_plus = 0.5 * (a[1] + a[3] * q2 + (a[0] + a[2] * q2) / q);
    let beta_minus = 0.5 * (a[1] + a[3] * q2 - (a[0] + a[2] * q2) / q);
    let gamma_plus = 0.5 * (b[1] + (b[0] + b[2] * q2) / q);
    let gamma_minus = 0.5 * (b[1] - (b[0] + b[2] * q2) / q);
    let alpha1 = 4.0 * q2 * a[3];
    let alpha2 = 2.0 * q * a[2] - 2.0 * q2 * a[3];
    let (beta1, beta2) = (beta_plus, beta_minus);
    let (gamma1, gamma2, gamma3) = (4.0 * q2 * b[2], 2.0 * q * gamma_plus, 2.0 * q * gamma_minus);
    Ok(BcfParams {
        q,
        a,
        b,
        beta_plus,
        beta_minus,
        gamma_plus,
        gamma_minus,
        alpha1,
        alpha2,
        beta1,
        beta2,
        gamma1,
        gamma2,
        gamma3,
        mu: beta1 + beta2 - alpha2,
        nu: alpha2 - alpha1,
        gamma: gamma2 + gamma3 - gamma1,
        delta: alpha1 + alpha2 + beta1 + beta2,
        eta: 2.0 * alpha1 + alpha2,
        kappa: gamma1 + gamma2 + gamma3,
        printed: printed_tables(p, energy),
    })
}

fn reduction_error_flags(e: &Error) -> SampleFlags {
    SampleFlags {
        complex_singularity: matches!(e, Error::ComplexSingularity(_) | Error::DegenerateQ(_)),
        series_non_converged: !matches!(e, Error::ComplexSingularity(_) | Error::DegenerateQ(_)),
        ..SampleFlags::default()
    }
}

/// Wronskian of the four-term local series about `ζ = 0` and `ζ = 1`, evaluated at `ζ*`.
pub fn g_function_bcf(p: &ModelParams, energy: f64, zeta_star: f64) -> Result<GFunctionSample> {
    check_gluing_point(zeta_star)?;
    let c = bcf_reduce(p, energy)?;
    Ok(with_margin_flag(wronskian_sample(energy, c.recurrence_at_zero(), c.recurrence_at_one(), zeta_star), zeta_star))
}

/// Energy at which `β₂ = n` (`side = 0`) or `β₁ = n` (`side = 1`); both are affine in `E`.
fn pole_energy(p: &ModelParams, side: usize, n: usize) -> Option<f64> {
    let (w, g, e) = (p.omega(), p.g(), p.epsilon());
    let q2 = singularity_q2(p);
    if q2 <= 0.0 {
        return None;
    }
    let q = q2.sqrt();
    if q < DEGENERATE_Q {
        return None;
    }
    // β± = ½(2g²/ω² − 1 + 2E/ω ± A₁/q)
    let a1q = (g / w + 2.0 * g * e / (w * w)) / q;
    let sign = if side == 0 { -1.0 } else { 1.0 };
    Some(w / 2.0 * (2.0 * n as f64 - 2.0 * g * g / (w * w) + 1.0 - sign * a1q))
}

/// Energies in `(e_min, e_max)` where a local recurrence has a vanishing leading weight.
pub fn bcf_poles(p: &ModelParams, e_min: f64, e_max: f64) -> Vec<f64> {
    let mut poles = Vec::new();
    for side in 0..2 {
        for n in 0.. {
            match pole_energy(p, side, n) {
                Some(e) if e < e_max => {
                    if e > e_min {
                        poles.push(e);
                    }
                }
                _ => break,
            }
        }
    }
    poles.sort_by(f64::total_cmp);
    poles.dedup();
    poles
}

/// A resonance energy at which some gauged local series truncates to a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuddCandidate {
    pub energy: f64,
    /// Resonant index `n` of `β₂ = n` or `β₁ = n`.
    pub n: usize,
    /// Expansion point, `0` or `1`.
    pub expansion_point: f64,
    /// Gauge exponent `k` of `φ = e^{kζ}w`.
    pub gauge: f64,
    /// Degree of the truncated polynomial.
    pub degree: usize,
    /// Largest coefficient beyond the degree, relative to the largest coefficient.
    pub residual_tail: f64,
}

/// Extra coefficients generated past the resonant index when testing truncation.
const TRUNCATION_LOOKAHEAD: usize = 12;

/// First index starting a run of small coefficients that persists to the end.
fn truncation_degree(sol: &SeriesSolution) -> Option<(usize, f64)> {
    let c = &sol.coeffs;
    let max = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if max == 0.0 || !max.is_finite() {
        return None;
    }
    let start = (0..c.len()).find(|&i| c[i..].iter().all(|x| x.abs() <= TRUNCATION_TOL * max))?;
    (c.len() - start >= TRUNCATION_RUN).then(|| (start, c[start..].iter().fold(0.0_f64, |m, x| m.max(x.abs())) / max))
}

/// Resonance energies in `e_range` with `n ≤ n_max` that pass the polynomial-truncation test.
pub fn judd_candidates(p: &ModelParams, e_range: (f64, f64), n_max: usize) -> Vec<JuddCandidate> {
    let mut out: Vec<JuddCandidate> = Vec::new();
    for side in 0..2 {
        for n in 0..=n_max {
            let Some(energy) = pole_energy(p, side, n) else { break };
            if energy < e_range.0 || energy > e_range.1 {
                continue;
            }
            let Ok(c) = bcf_reduce(p, energy) else { continue };
            let mut gauges = vec![0.0];
            if c.alpha1.abs() <= DEFAULT_REGIME_TOL {
                gauges.extend(c.gauge_exponents().into_iter().flatten());
            }
            let best = [0.0, 1.0]
                .into_iter()
                .flat_map(|z0| gauges.iter().map(move |&k| (z0, k)))
                .filter_map(|(z0, k)| {
                    let rec = ode_to_recurrence(&exp_gauge(&c.ode(z0), k)).ok()?;
                    let sol = series_coefficients(&rec, n + TRUNCATION_LOOKAHEAD).ok()?;
                    truncation_degree(&sol).map(|(degree, tail)| JuddCandidate {
                        energy,
                        n,
                        expansion_point: z0,
                        gauge: k,
                        degree,
                        residual_tail: tail,
                    })
                })
                .min_by(|a, b| a.residual_tail.total_cmp(&b.residual_tail));
            if let Some(cand) = best {
                if !out.iter().any(|o| (o.energy - cand.energy).abs() <= JUDD_EXCLUSION) {
                    out.push(cand);
                }
            }
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out
}

/// Roots of the reduced determinant in `[e_min, e_max]`.
pub fn bcf_spectrum(p: &ModelParams, e_min: f64, e_max: f64, grid_step: f64) -> Result<SpectrumResult> {
    bcf_spectrum_at(p, e_min, e_max, grid_step, DEFAULT_ZETA_STAR)
}

pub fn bcf_spectrum_at(p: &ModelParams, e_min: f64, e_max: f64, grid_step: f64, zeta_star: f64) -> Result<SpectrumResult> {
    check_gluing_point(zeta_star)?;
    let poles = bcf_poles(p, e_min, e_max);
    let cfg = RootScanConfig::new(e_min, e_max, grid_step).with_poles(poles.clone());
    let mut report = scan_and_refine(
        |e| match g_function_bcf(p, e, zeta_star) {
            Ok(s) => s,
            Err(err) => GFunctionSample::flagged(e, reduction_error_flags(&err)),
        },
        &cfg,
    );
    let judd: Vec<f64> =
        if e_max > e_min { judd_candidates(p, (e_min, e_max), 60).into_iter().map(|c| c.energy).collect() } else { Vec::new() };
    report.roots.retain(|r| !judd.iter().any(|j| (j - r).abs() <= JUDD_EXCLUSION * j.abs().max(1.0)));
    let mut levels: Vec<Level> = report.roots.iter().map(|&e| Level::new(e)).collect();
    add_exceptional_levels(&mut levels, &poles, &judd, |e| {
        bcf_reduce(p, e).map(|c| passes_resonance(c.recurrence_at_zero()) || passes_resonance(c.recurrence_at_one())).unwrap_or(false)
    });
    Ok(SpectrumResult { method: Method::Bcf, levels, report: Some(report), secondary_report: None, judd })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SeriesCase {
    General,
    TwoPhoton,
}

/// Power series of the fourth-order equation about `z = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullSeriesCoeffs {
    pub case: SeriesCase,
    /// Composed coefficient table.
    pub table: Ode4Coeffs,
    /// Tabulated coefficient table.
    pub printed_table: Ode4Coeffs,
    /// `a₀..a_N` in units of `exp(scale_log)`; `a₀ = 1`, `a₁ = a₂ = a₃ = 0`.
    pub coeffs: Vec<f64>,
    pub scale_log: f64,
}

impl FullSeriesCoeffs {
    pub fn ode(&self) -> PolyOde {
        self.table.to_ode(0.0)
    }

    /// The series as a solution object for evaluation and residual checks.
    pub fn solution(&self) -> SeriesSolution {
        SeriesSolution {
            z0: 0.0,
            coeffs: self.coeffs.clone(),
            scale_log: self.scale_log,
            tail: f64::NAN,
            provenance: "fourth-order composed equation".into(),
            resonances: Vec::new(),
            min_lead_ratio: 1.0,
        }
    }
}

/// Recurrence of the fourth-order equation about `z = 0`; nine terms in general, five at `g = 0`.
pub fn full_recurrence(p: &ModelParams, energy: f64) -> Result<RecurrenceSpec> {
    let comp = operator_compose(p, energy)?;
    let mut rec = ode_to_recurrence(&comp.composed.to_ode(0.0))?.with_radius(f64::INFINITY);
    rec.initial = vec![1.0, 0.0, 0.0, 0.0];
    Ok(rec)
}

pub fn full_series(p: &ModelParams, energy: f64, case: SeriesCase, n: usize) -> Result<FullSeriesCoeffs> {
    if case == SeriesCase::TwoPhoton && p.g().abs() > DEFAULT_REGIME_TOL * p.omega() {
        return Err(Error::GNotZero(p.g()));
    }
    let comp = operator_compose(p, energy)?;
    let sol = series_coefficients(&full_recurrence(p, energy)?, n + 1)?;
    Ok(FullSeriesCoeffs { case, table: comp.composed, printed_table: comp.printed, coeffs: sol.coeffs, scale_log: sol.scale_log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heun::{che_params, KBranch};
    use crate::model::composed_operator;
    use crate::series::{ode_residual, series_eval};

    fn accept3() -> ModelParams {
        ModelParams::new(1.0, 0.3, 0.0, 0.05, 0.02).unwrap()
    }

    #[test]
    fn q_of_reference_example() {
        let p = ModelParams::new(1.0, 0.2, 0.0, 0.1, 0.05).unwrap();
        let c = bcf_reduce(&p, 0.0).unwrap();
        assert!((c.q - 0.11f64.sqrt()).abs() < 1e-15);
        assert!((c.printed.q - 0.11f64.sqrt()).abs() < 1e-15);
        assert!((c.q - 0.3316625).abs() < 1e-7);
    }

    #[test]
    fn defining_combinations() {
        let c = bcf_reduce(&accept3(), 0.37).unwrap();
        assert!((c.mu - (c.beta1 + c.beta2 - c.alpha2)).abs() < 1e-14);
        assert!((c.nu - (c.alpha2 - c.alpha1)).abs() < 1e-14);
        assert!((c.gamma - (c.gamma2 + c.gamma3 - c.gamma1)).abs() < 1e-14);
        assert!((c.delta - (c.alpha1 + c.alpha2 + c.beta1 + c.beta2)).abs() < 1e-14);
        assert!((c.eta - (2.0 * c.alpha1 + c.alpha2)).abs() < 1e-14);
        assert!((c.kappa - (c.gamma1 + c.gamma2 + c.gamma3)).abs() < 1e-14);
        assert!(c.q > 0.0);
    }

    /// Drops every monomial carrying `λ²` or `λg`: `P(g, 0)` plus the odd-in-`λ` part of `P(0, λ)`.
    fn truncated_operator(p: &ModelParams, e: f64) -> [Poly; 3] {
        let l0 = composed_operator(&p.with_lambda(0.0), e);
        let g0 = composed_operator(&p.with_g(0.0), e);
        let neg = composed_operator(&p.with_g(0.0).with_lambda(-p.lambda()), e);
        let keep = |k: usize| &l0[k] + &(&g0[k] - &neg[k]).scale(0.5);
        [keep(0), keep(1), keep(2)]
    }

    #[test]
    fn reduced_equation_is_truncated_composition() {
        let p = ModelParams::new(1.0, 0.3, 0.2, 0.07, 0.03).unwrap();
        let e = 0.45;
        let c = bcf_reduce(&p, e).unwrap();
        let [t0, t1, t2] = truncated_operator(&p, e);
        let z = c.z_ode(0.0);
        // the truncation is a multiple of (z² − q²)φ″ − …; fix the factor on φ″
        let s = z.polys()[2].coeff(2) / t2.coeff(2);
        for (a, b) in [(&t0, &z.polys()[0]), (&t1, &z.polys()[1]), (&t2, &z.polys()[2])] {
            for i in 0..4 {
                assert!((a.coeff(i) * s - b.coeff(i)).abs() < 1e-12, "{} vs {}", a.coeff(i) * s, b.coeff(i));
            }
        }
    }

    #[test]
    fn zeta_map_of_z_equation() {
        let c = bcf_reduce(&accept3(), 0.2).unwrap();
        let zo = c.z_ode(0.0);
        let zeta = c.ode(0.0);
        let q = c.q;
        // (z² − q²) = 4q²ζ(ζ−1); d/dz = (1/2q) d/dζ
        let m2 = zo.polys()[2].compose_affine(2.0 * q, -q);
        let m1 = zo.polys()[1].compose_affine(2.0 * q, -q).scale(2.0 * q);
        let m0 = zo.polys()[0].compose_affine(2.0 * q, -q).scale(4.0 * q * q);
        let s = 1.0 / (4.0 * q * q);
        for (a, b) in [(&m0, &zeta.polys()[0]), (&m1, &zeta.polys()[1]), (&m2, &zeta.polys()[2])] {
            for i in 0..4 {
                assert!((a.coeff(i) * s - b.coeff(i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_zero_reduces_to_confluent_heun() {
        let p = ModelParams::new(1.0, 0.4, 0.15, 0.6, 0.0).unwrap();
        let e = 0.3;
        let c = bcf_reduce(&p, e).unwrap();
        assert!((c.q - 0.6).abs() < 1e-15);
        assert_eq!(c.alpha1, 0.0);
        assert!((c.gamma1 - 4.0 * 0.6f64.powi(4)).abs() < 1e-14);
        let [kp, km] = c.gauge_exponents().unwrap();
        let h = che_params(&p, e, KBranch::Minus).unwrap();
        assert!((km - h.k).abs() < 1e-13 && (kp + h.k).abs() < 1e-13);
        let gauged = ode_to_recurrence(&exp_gauge(&c.ode(0.0), km)).unwrap();
        let heun = h.recurrence_at_zero().unwrap();
        assert_eq!(gauged.span(), 2, "a_(n−2) weight must vanish");
        for s in 0..=2 {
            for m in 0..6 {
                let (a, b) = (gauged.weight(s, m), heun.weight(s, m));
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "w{s}({m}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn errors() {
        let p = ModelParams::new(1.0, 0.3, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(bcf_reduce(&p, 0.0), Err(Error::DegenerateQ(_))));
        let p = ModelParams::new(1.0, 0.3, -1.5, 0.0, 0.2).unwrap();
        assert!(matches!(bcf_reduce(&p, 0.0), Err(Error::ComplexSingularity(_))));
        assert!(g_function_bcf(&accept3(), 0.0, 0.0).is_err());
    }

    #[test]
    fn local_series_residuals() {
        let c = bcf_reduce(&accept3(), 0.61).unwrap();
        for (z0, x) in [(0.0, 0.15), (1.0, 0.85)] {
            let ode = c.ode(z0);
            let rec = ode_to_recurrence(&ode).unwrap();
            assert_eq!(rec.span(), 3);
            let (_, _, sol) = series_eval(&rec, x, 2000, 1e-16).unwrap();
            assert!(ode_residual(&ode, &sol, x) < 1e-10);
        }
    }

    #[test]
    fn poles_match_leading_weights() {
        let p = accept3();
        for e in bcf_poles(&p, -1.0, 3.0) {
            let c = bcf_reduce(&p, e).unwrap();
            let near = |b: f64| (b - b.round()).abs() < 1e-9 && b.round() >= 0.0;
            assert!(near(c.beta1) || near(c.beta2), "{e}: {} {}", c.beta1, c.beta2);
        }
    }

    #[test]
    fn judd_point_of_asymmetric_model() {
        // ε = 0, g = 0.4, Δ = 0.6: E = ω(1 − q²) = 0.84 is exceptional
        let p = ModelParams::new(1.0, 0.6, 0.0, 0.4, 0.0).unwrap();
        let c = judd_candidates(&p, (0.0, 2.0), 10);
        assert!(c.iter().any(|c| (c.energy - 0.84).abs() < 1e-12), "{c:?}");
        let generic = ModelParams::new(1.0, 0.4123, 0.1577, 0.6071, 0.0).unwrap();
        assert!(judd_candidates(&generic, (-1.0, 4.0), 20).is_empty());
    }

    #[test]
    fn full_series_is_entire_and_solves_the_equation() {
        let p = ModelParams::new(1.0, 0.3, 0.1, 0.2, 0.15).unwrap();
        let f = full_series(&p, 0.4, SeriesCase::General, 400).unwrap();
        assert_eq!(f.coeffs.len(), 401);
        assert_eq!(&f.coeffs[..4], &[1.0, 0.0, 0.0, 0.0]);
        let sol = f.solution();
        assert!(ode_residual(&f.ode(), &sol, 0.1) < 1e-10);
        let last = f.coeffs[400].abs() * 2f64.powi(400);
        let first = sol.value(2.0).mantissa.abs().max(1e-300);
        assert!(last / first < 1e-12);
        assert_eq!(full_recurrence(&p, 0.4).unwrap().span(), 8);
        let g0 = p.with_g(0.0);
        let five = full_recurrence(&g0, 0.4).unwrap();
        let nonzero: Vec<usize> = (0..=five.span()).filter(|&s| !five.weights[s].is_zero()).collect();
        assert_eq!(nonzero, vec![0, 2, 4, 6, 8]);
        assert!(full_series(&g0, 0.4, SeriesCase::TwoPhoton, 10).is_ok());
        assert!(matches!(full_series(&p, 0.4, SeriesCase::TwoPhoton, 10), Err(Error::GNotZero(_))));
        assert_eq!(full_series(&p.with_lambda(0.0), 0.4, SeriesCase::General, 10), Err(Error::LambdaZero));
    }
}
