//! Asymmetric Rabi model (`λ = 0`): reduction to the confluent Heun equation
//! `w″ + (α + (β+1)/ζ + γ/(ζ−1))w′ + (μ/ζ + ν/(ζ−1))w = 0` and its Wronskian determinant.
//!
//! For `λ = 0` the composed operator is second order,
//! `(g² − ω²z²)φ″ + P₁φ′ + P₀φ = 0`. With `q = g/ω`, `ζ = (ωz + g)/(2g)` and
//! `φ = e^{kζ}w`, `k² + α₁k + β₁ = 0`, it takes the confluent Heun form.

use serde::{Deserialize, Serialize};

use crate::bcf::judd_candidates;
use crate::error::{Error, Result};
use crate::model::{composed_operator, ModelParams, DEFAULT_REGIME_TOL};
use crate::poly::Poly;
use crate::rootfind::{scan_and_refine, GFunctionSample, RootReport, RootScanConfig};
use crate::series::{ode_to_recurrence, PolyOde, RecurrenceSpec};
use crate::spectrum::{
    add_exceptional_levels, check_gluing_point, passes_resonance, with_margin_flag, wronskian_sample, BranchAgreement, Level, Method,
    SpectrumResult,
};

/// Default gluing point of the two local series.
pub const DEFAULT_ZETA_STAR: f64 = 0.5;
/// Two roots from different gauges are the same level within this distance.
pub const BRANCH_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KBranch {
    Plus,
    #[default]
    Minus,
}

impl KBranch {
    pub fn other(self) -> Self {
        match self {
            KBranch::Plus => KBranch::Minus,
            KBranch::Minus => KBranch::Plus,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            KBranch::Plus => 1.0,
            KBranch::Minus => -1.0,
        }
    }
}

/// The tabulated partial-fraction and exponent lists, kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrintedCheTables {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub alphas: [f64; 3],
    pub betas: [f64; 3],
    pub k_plus: f64,
    pub k_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheParams {
    pub q: f64,
    /// `A₁..A₃` of `φ″ + (A₁ + A₂/(z−q) + A₃/(z+q))φ′ + (B₁ + B₂/(z−q) + B₃/(z+q))φ = 0`.
    pub a: [f64; 3],
    pub b: [f64; 3],
    /// `α₁..α₃` of the same equation in `ζ`, with `α₂` on `1/(ζ−1)` and `α₃` on `1/ζ`.
    pub alphas: [f64; 3],
    pub betas: [f64; 3],
    pub k: f64,
    pub k_branch: KBranch,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub nu: f64,
    pub printed: PrintedCheTables,
}

impl CheParams {
    /// `k² + α₁k + β₁`
    pub fn quadratic_residual(&self) -> f64 {
        self.k * self.k + self.alphas[0] * self.k + self.betas[0]
    }

    /// `ζ(ζ−1)w″ + [αζ(ζ−1) + (β+1)(ζ−1) + γζ]w′ + [μ(ζ−1) + νζ]w = 0` about `ζ₀`.
    pub fn ode(&self, zeta0: f64) -> PolyOde {
        che_ode(self.alpha, self.beta, self.gamma, self.mu, self.nu, zeta0)
    }

    /// The ungauged equation for `φ` in `ζ`, multiplied by `ζ(ζ−1)`.
    pub fn phi_ode(&self, zeta0: f64) -> PolyOde {
        let [a1, a2, a3] = self.alphas;
        let [b1, b2, b3] = self.betas;
        let zz = Poly::new(vec![0.0, -1.0, 1.0]);
        PolyOde::new(
            vec![
                &(&zz.scale(b1) + &Poly::monomial(b2, 1)) + &Poly::linear(-b3, b3),
                &(&zz.scale(a1) + &Poly::monomial(a2, 1)) + &Poly::linear(-a3, a3),
                zz,
            ],
            zeta0,
        )
        .expect("leading coefficient is ζ(ζ−1)")
    }

    pub fn recurrence_at_zero(&self) -> Result<RecurrenceSpec> {
        Ok(ode_to_recurrence(&self.ode(0.0))?.with_label("confluent Heun, three-term about ζ = 0"))
    }

    pub fn recurrence_at_one(&self) -> Result<RecurrenceSpec> {
        Ok(ode_to_recurrence(&self.ode(1.0))?.with_label("confluent Heun, three-term about ζ = 1"))
    }
}

/// Confluent Heun equation in polynomial form for arbitrary parameters.
pub fn che_ode(alpha: f64, beta: f64, gamma: f64, mu: f64, nu: f64, zeta0: f64) -> PolyOde {
    PolyOde::new(
        vec![
            Poly::linear(-mu, mu + nu),
            Poly::new(vec![-(beta + 1.0), -alpha + beta + 1.0 + gamma, alpha]),
            Poly::new(vec![0.0, -1.0, 1.0]),
        ],
        zeta0,
    )
    .expect("leading coefficient is ζ(ζ−1)")
}

fn require_asymmetric(p: &ModelParams) -> Result<()> {
    if p.lambda().abs() > DEFAULT_REGIME_TOL * p.omega() {
        return Err(Error::LambdaNotZero(p.lambda()));
    }
    if p.g().abs() <= DEFAULT_REGIME_TOL * p.omega() {
        return Err(Error::GZero);
    }
    Ok(())
}

fn printed_tables(p: &ModelParams, energy: f64) -> PrintedCheTables {
    let (w, d, e, g) = (p.omega(), p.delta(), p.epsilon(), p.g());
    let q = g / w;
    let s = e * e - energy * energy + d * d;
    let a = [-q, -q * q - (e + energy) / w, 1.0];
    let b = [-q * q, -q.powi(3) / 2.0 - e * q / w - s / (2.0 * w * g), q.powi(3) / 2.0 - e * q / w + s / (2.0 * w * g) + q];
    let q2 = q * q;
    PrintedCheTables {
        a,
        b,
        alphas: [-2.0 * q2, a[1], 1.0],
        betas: [-4.0 * q2 * q2, -q2 * q2 - 2.0 * e * q2 / w - s / (w * w), q2 * q2 - 2.0 * e * q2 / w + s / (w * w) + 2.0 * q2],
        k_plus: (1.0 + 5f64.sqrt()) * q2,
        k_minus: (1.0 - 5f64.sqrt()) * q2,
    }
}

/// Confluent Heun parameters at trial energy `E` for the chosen exponent root.
pub fn che_params(p: &ModelParams, energy: f64, k_branch: KBranch) -> Result<CheParams> {
    require_asymmetric(p)?;
    let (w, d, e, g) = (p.omega(), p.delta(), p.epsilon(), p.g());
    let q = g / w;
    let q2 = q * q;
    let s = e * e - energy * energy + d * d;
    let a = [0.0, -(e + energy) / w - q2, 1.0 + (e - energy) / w - q2];
    let b = [-q2, -q2 * q / 2.0 - e * q / w - s / (2.0 * w * g), q2 * q / 2.0 - e * q / w + s / (2.0 * w * g) + q];
    let alphas = [2.0 * q * a[0], a[1], a[2]];
    let betas = [4.0 * q2 * b[0], 2.0 * q * b[1], 2.0 * q * b[2]];
    // k² + α₁k + β₁ = 0
    let disc = (alphas[0] * alphas[0] - 4.0 * betas[0]).max(0.0).sqrt();
    let k = (-alphas[0] + k_branch.sign() * disc) / 2.0;
    Ok(CheParams {
        q,
        a,
        b,
        alphas,
        betas,
        k,
        k_branch,
        alpha: alphas[0] + 2.0 * k,
        beta: alphas[2] - 1.0,
        gamma: alphas[1],
        mu: k * alphas[2] + betas[2],
        nu: k * alphas[1] + betas[1],
        printed: printed_tables(p, energy),
    })
}

/// Composed `λ = 0` operator `[P₀, P₁, P₂]` in `z`.
pub fn asymmetric_operator(p: &ModelParams, energy: f64) -> [Poly; 3] {
    let ops = composed_operator(&p.with_lambda(0.0), energy);
    [ops[0].clone(), ops[1].clone(), ops[2].clone()]
}

/// Wronskian of the local series about `ζ = 0` and `ζ = 1`, evaluated at `ζ*`.
pub fn g_function_heun(p: &ModelParams, energy: f64, zeta_star: f64, k_branch: KBranch) -> Result<GFunctionSample> {
    check_gluing_point(zeta_star)?;
    let c = che_params(p, energy, k_branch)?;
    Ok(with_margin_flag(wronskian_sample(energy, c.recurrence_at_zero(), c.recurrence_at_one(), zeta_star), zeta_star))
}

/// Energies in `(e_min, e_max)` where a local recurrence has a vanishing leading weight.
pub fn heun_poles(p: &ModelParams, e_min: f64, e_max: f64) -> Vec<f64> {
    let (w, e) = (p.omega(), p.epsilon());
    let q2 = (p.g() / w).powi(2);
    let mut poles = Vec::new();
    // ζ = 1: γ = −j, j ≥ 0; ζ = 0: β = −j, j ≥ 1
    let mut j = 0usize;
    loop {
        let at_one = w * (j as f64 - q2) - e;
        let at_zero = e + w * (j as f64 - q2);
        if at_one > e_max && at_zero > e_max {
            break;
        }
        for (pole, ok) in [(at_one, true), (at_zero, j >= 1)] {
            if ok && pole > e_min && pole < e_max {
                poles.push(pole);
            }
        }
        j += 1;
    }
    poles.sort_by(f64::total_cmp);
    poles.dedup();
    poles
}

/// Scan settings beyond the energy window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunScan {
    pub zeta_star: f64,
    pub primary: KBranch,
    pub refine_tol: f64,
}

impl Default for HeunScan {
    fn default() -> Self {
        HeunScan { zeta_star: DEFAULT_ZETA_STAR, primary: KBranch::default(), refine_tol: 1e-10 }
    }
}

fn scan_branch(p: &ModelParams, cfg: &RootScanConfig, zeta_star: f64, branch: KBranch) -> RootReport {
    scan_and_refine(|e| g_function_heun(p, e, zeta_star, branch).unwrap_or_else(|_| GFunctionSample::flagged(e, Default::default())), cfg)
}

/// Merges the root lists of two gauges, tagging each level by where it was found.
pub(crate) fn merge_branches(primary: &[f64], secondary: &[f64], tol: f64) -> Vec<Level> {
    let mut levels: Vec<Level> = primary
        .iter()
        .map(|&e| {
            let both = secondary.iter().any(|s| (s - e).abs() <= tol);
            Level { agreement: Some(if both { BranchAgreement::Both } else { BranchAgreement::PrimaryOnly }), ..Level::new(e) }
        })
        .collect();
    for &s in secondary {
        if !primary.iter().any(|e| (s - e).abs() <= tol) {
            levels.push(Level { agreement: Some(BranchAgreement::SecondaryOnly), ..Level::new(s) });
        }
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    levels
}

/// Roots of the determinant in `[e_min, e_max]`, computed in both gauges.
pub fn heun_spectrum(p: &ModelParams, e_min: f64, e_max: f64, grid_step: f64) -> Result<SpectrumResult> {
    heun_spectrum_with(p, e_min, e_max, grid_step, &HeunScan::default())
}

pub fn heun_spectrum_with(p: &ModelParams, e_min: f64, e_max: f64, grid_step: f64, opts: &HeunScan) -> Result<SpectrumResult> {
    require_asymmetric(p)?;
    check_gluing_point(opts.zeta_star)?;
    let poles = heun_poles(p, e_min, e_max);
    let mut cfg = RootScanConfig::new(e_min, e_max, grid_step).with_poles(poles.clone());
    cfg.refine_tol = opts.refine_tol;
    let first = scan_branch(p, &cfg, opts.zeta_star, opts.primary);
    let second = scan_branch(p, &cfg, opts.zeta_star, opts.primary.other());
    let judd: Vec<f64> =
        if e_max > e_min { judd_candidates(p, (e_min, e_max), 40).into_iter().map(|c| c.energy).collect() } else { Vec::new() };
    let mut levels = merge_branches(&first.roots, &second.roots, BRANCH_AGREEMENT_TOL);
    levels.retain(|l| !judd.iter().any(|j| (j - l.energy).abs() <= 1e-7 * j.abs().max(1.0)));
    add_exceptional_levels(&mut levels, &poles, &judd, |e| {
        che_params(p, e, opts.primary)
            .map(|c| passes_resonance(c.recurrence_at_zero()) || passes_resonance(c.recurrence_at_one()))
            .unwrap_or(false)
    });
    Ok(SpectrumResult { method: Method::Heun, levels, report: Some(first), secondary_report: Some(second), judd })
}
