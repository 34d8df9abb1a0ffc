//! Spectrum containers shared by every solver route.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootfind::{GFunctionSample, RootReport, SampleFlags};
use crate::series::{series_coefficients, series_eval, RecurrenceSpec, DEFAULT_MAX_TERMS, DEFAULT_TAIL_TOL};

/// Leading-weight ratio under which a sample is flagged as near a resonance.
pub const NEAR_RESONANCE_RATIO: f64 = 1e-11;
/// Minimum distance of the gluing point from either regular singularity.
pub const SINGULAR_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Closed,
    Heun,
    Bcf,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Closed => "closed",
            Method::Heun => "heun",
            Method::Bcf => "bcf",
        }
    }
}

/// Which gauge exponents produced a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchAgreement {
    Both,
    PrimaryOnly,
    SecondaryOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub error_vs_oracle: Option<f64>,
    pub agreement: Option<BranchAgreement>,
    /// Free-form tags such as the closed-form branch.
    pub tag: String,
}

impl Level {
    pub fn new(energy: f64) -> Self {
        Level { energy, error_vs_oracle: None, agreement: None, tag: String::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub method: Method,
    pub levels: Vec<Level>,
    /// Root-scan metadata of the primary determinant.
    pub report: Option<RootReport>,
    /// Root-scan metadata of the cross-check determinant, when one is run.
    pub secondary_report: Option<RootReport>,
    /// Energies where a local series truncates to a polynomial.
    pub judd: Vec<f64>,
}

impl SpectrumResult {
    pub fn new(method: Method, energies: Vec<f64>) -> Self {
        SpectrumResult {
            method,
            levels: energies.into_iter().map(Level::new).collect(),
            report: None,
            secondary_report: None,
            judd: Vec::new(),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// Records the distance of every level to the nearest reference value.
    pub fn compare_with(&mut self, reference: &[f64]) {
        for l in &mut self.levels {
            l.error_vs_oracle = reference.iter().map(|r| (r - l.energy).abs()).min_by(f64::total_cmp);
        }
    }

    pub fn max_error(&self) -> Option<f64> {
        self.levels.iter().filter_map(|l| l.error_vs_oracle).max_by(f64::total_cmp)
    }
}

fn flags_for(err: &Error) -> SampleFlags {
    let mut f = SampleFlags::default();
    match err {
        Error::ResonantIndex { .. } | Error::GammaResonance(_) => f.near_resonance = true,
        Error::EvalPointOutOfDisk { .. } => f.near_singular_eval_point = true,
        Error::ComplexSingularity(_) | Error::DegenerateQ(_) => f.complex_singularity = true,
        _ => f.series_non_converged = true,
    }
    f
}

/// Wronskian `w₀w₁′ − w₁w₀′` of two local series at `x`, divided by
/// `max(|w₀|, |w₀′|) · max(|w₁|, |w₁′|)`.
pub fn wronskian_sample(energy: f64, left: Result<RecurrenceSpec>, right: Result<RecurrenceSpec>, x: f64) -> GFunctionSample {
    let eval = |r: Result<RecurrenceSpec>| r.and_then(|rec| series_eval(&rec, x, DEFAULT_MAX_TERMS, DEFAULT_TAIL_TOL));
    let (l, r) = match (eval(left), eval(right)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(e), _) | (_, Err(e)) => return GFunctionSample::flagged(energy, flags_for(&e)),
    };
    let (v0, d0, s0) = l;
    let (v1, d1, s1) = r;
    let n0 = v0.mantissa.abs().max(d0.mantissa.abs());
    let n1 = v1.mantissa.abs().max(d1.mantissa.abs());
    let mut flags = SampleFlags::default();
    if s0.min_lead_ratio < NEAR_RESONANCE_RATIO || s1.min_lead_ratio < NEAR_RESONANCE_RATIO {
        flags.near_resonance = true;
    }
    if n0 == 0.0 || n1 == 0.0 || !n0.is_finite() || !n1.is_finite() {
        flags.series_non_converged = true;
        return GFunctionSample::flagged(energy, flags);
    }
    let value = (v0.mantissa / n0) * (d1.mantissa / n1) - (v1.mantissa / n1) * (d0.mantissa / n0);
    GFunctionSample { energy, value, scale_log: v0.scale_log + v1.scale_log + n0.ln() + n1.ln(), flags }
}

/// Rejects gluing points outside the common disk of the two local series.
pub fn check_gluing_point(zeta_star: f64) -> Result<()> {
    if zeta_star > 0.0 && zeta_star < 1.0 {
        Ok(())
    } else {
        Err(Error::EvalPointOutOfDisk { x: zeta_star, z0: if zeta_star <= 0.0 { 1.0 } else { 0.0 }, radius: 1.0 })
    }
}

/// Marks samples whose gluing point sits too close to a singularity.
pub fn with_margin_flag(mut s: GFunctionSample, zeta_star: f64) -> GFunctionSample {
    if zeta_star.min(1.0 - zeta_star) < SINGULAR_MARGIN {
        s.flags.near_singular_eval_point = true;
    }
    s
}

/// Terms generated when probing a pole energy for a compatible resonance.
const RESONANCE_PROBE_TERMS: usize = 128;

/// True when the local series passes a resonance without obstruction.
pub fn passes_resonance(rec: Result<RecurrenceSpec>) -> bool {
    rec.and_then(|r| series_coefficients(&r, RESONANCE_PROBE_TERMS)).map(|s| !s.resonances.is_empty()).unwrap_or(false)
}

/// Adds pole energies at which a local series is free of obstruction, so that the solution regular at one end is regular at the other.
pub fn add_exceptional_levels(levels: &mut Vec<Level>, poles: &[f64], judd: &[f64], exceptional: impl Fn(f64) -> bool) {
    let close = |x: f64, e: f64| (x - e).abs() <= 1e-7 * e.abs().max(1.0);
    for &e in poles {
        if judd.iter().any(|&j| close(j, e)) || levels.iter().any(|l| close(l.energy, e)) || !exceptional(e) {
            continue;
        }
        levels.push(Level { tag: "exceptional".into(), ..Level::new(e) });
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
}
