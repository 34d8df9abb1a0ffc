//! Grid scan, sign-change bracketing and bisection for spectral determinants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Environment variable capping the worker count of grid scans (`0` = automatic).
pub const THREADS_ENV: &str = "RABI_SPECTRA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SampleFlags {
    pub series_non_converged: bool,
    pub near_resonance: bool,
    pub near_singular_eval_point: bool,
    pub complex_singularity: bool,
}

impl SampleFlags {
    pub fn any(&self) -> bool {
        self.series_non_converged || self.near_resonance || self.near_singular_eval_point || self.complex_singularity
    }

    pub fn reason(&self) -> Option<ExclusionReason> {
        if self.complex_singularity {
            Some(ExclusionReason::ComplexSingularity)
        } else if self.near_resonance {
            Some(ExclusionReason::Resonance)
        } else if self.series_non_converged || self.near_singular_eval_point {
            Some(ExclusionReason::NonConverged)
        } else {
            None
        }
    }

    /// Compact `|`-separated names, empty when clear.
    pub fn label(&self) -> String {
        let mut v = Vec::new();
        if self.series_non_converged {
            v.push("non-converged");
        }
        if self.near_resonance {
            v.push("resonance");
        }
        if self.near_singular_eval_point {
            v.push("singular-eval-point");
        }
        if self.complex_singularity {
            v.push("complex-singularity");
        }
        v.join("|")
    }
}

/// One evaluation of a spectral determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFunctionSample {
    pub energy: f64,
    /// Determinant divided by the magnitudes of the series it is built from.
    pub value: f64,
    /// `ln` of the positive factor removed: the raw determinant is `value · exp(scale_log)`.
    pub scale_log: f64,
    pub flags: SampleFlags,
}

impl GFunctionSample {
    pub fn plain(energy: f64, value: f64) -> Self {
        GFunctionSample { energy, value, scale_log: 0.0, flags: SampleFlags::default() }
    }

    pub fn flagged(energy: f64, flags: SampleFlags) -> Self {
        GFunctionSample { energy, value: f64::NAN, scale_log: 0.0, flags }
    }

    pub fn usable(&self) -> bool {
        !self.flags.any() && self.value.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootScanConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub grid_step: f64,
    pub refine_tol: f64,
    pub max_bisect: usize,
    /// Known analytic poles; the grid is split just either side of each.
    pub poles: Vec<f64>,
}

impl RootScanConfig {
    pub fn new(e_min: f64, e_max: f64, grid_step: f64) -> Self {
        RootScanConfig { e_min, e_max, grid_step, refine_tol: 1e-10, max_bisect: 200, poles: Vec::new() }
    }

    pub fn with_poles(mut self, poles: Vec<f64>) -> Self {
        self.poles = poles;
        self
    }

    /// Half-width of the interval excluded around a pole at `p`.
    pub fn pole_halfwidth(p: f64) -> f64 {
        1e-9 * p.abs().max(1.0)
    }

    /// Gridpoints: the uniform grid plus `p ± δ` for every pole inside the window.
    pub fn grid(&self) -> Vec<f64> {
        if !(self.e_max > self.e_min && self.grid_step > 0.0) {
            return Vec::new();
        }
        let n = ((self.e_max - self.e_min) / self.grid_step).ceil() as usize;
        let mut pts: Vec<f64> = (0..=n).map(|i| (self.e_min + i as f64 * self.grid_step).min(self.e_max)).collect();
        for &p in &self.poles {
            if p > self.e_min && p < self.e_max {
                let d = Self::pole_halfwidth(p);
                pts.retain(|x| (x - p).abs() > d);
                pts.push(p - d);
                pts.push(p + d);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExclusionReason {
    Pole,
    Resonance,
    ComplexSingularity,
    NonConverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedInterval {
    pub lo: f64,
    pub hi: f64,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootReport {
    pub roots: Vec<f64>,
    /// Final bisection bracket of each root.
    pub brackets: Vec<Bracket>,
    pub excluded: Vec<ExcludedInterval>,
    /// Sign changes across an excluded interval, not bisected.
    pub suspects: Vec<Bracket>,
    /// Brackets that bisection showed to enclose a pole rather than a zero.
    pub rejected: Vec<Bracket>,
    pub evaluations: usize,
}

/// Worker count requested through [`THREADS_ENV`], `None` for automatic.
pub fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0)
}

/// Evaluates `f` at every point, in parallel, preserving order.
pub fn evaluate_grid<F>(xs: &[f64], f: &F) -> Vec<GFunctionSample>
where
    F: Fn(f64) -> GFunctionSample + Sync,
{
    let run = || xs.par_iter().map(|&x| f(x)).collect::<Vec<_>>();
    match configured_threads() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => xs.iter().map(|&x| f(x)).collect(),
        },
        None => run(),
    }
}

fn sign_change(a: f64, b: f64) -> bool {
    a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0)
}

/// Scans the grid, bisects every clean sign change and reports what it excluded.
pub fn scan_and_refine<F>(f: F, cfg: &RootScanConfig) -> RootReport
where
    F: Fn(f64) -> GFunctionSample + Sync,
{
    let xs = cfg.grid();
    let samples = evaluate_grid(&xs, &f);
    refine_samples(&f, cfg, &samples)
}

/// Bracketing and refinement on precomputed grid samples.
pub fn refine_samples<F>(f: &F, cfg: &RootScanConfig, samples: &[GFunctionSample]) -> RootReport
where
    F: Fn(f64) -> GFunctionSample,
{
    let mut report = RootReport { evaluations: samples.len(), ..Default::default() };
    let pole_gap = |a: f64, b: f64| {
        cfg.poles.iter().any(|&p| {
            let d = RootScanConfig::pole_halfwidth(p);
            a <= p - d && b >= p + d && p > cfg.e_min && p < cfg.e_max
        })
    };
    for &p in &cfg.poles {
        if p > cfg.e_min && p < cfg.e_max {
            let d = RootScanConfig::pole_halfwidth(p);
            report.excluded.push(ExcludedInterval { lo: p - d, hi: p + d, reason: ExclusionReason::Pole });
        }
    }
    // contiguous runs of unusable samples
    let mut i = 0;
    while i < samples.len() {
        if samples[i].usable() {
            i += 1;
            continue;
        }
        let start = i;
        while i < samples.len() && !samples[i].usable() {
            i += 1;
        }
        let reason = samples[start].flags.reason().unwrap_or(ExclusionReason::NonConverged);
        report.excluded.push(ExcludedInterval { lo: samples[start].energy, hi: samples[i - 1].energy, reason });
    }
    let usable: Vec<&GFunctionSample> = samples.iter().filter(|s| s.usable()).collect();
    let positions: Vec<usize> = samples.iter().enumerate().filter(|(_, s)| s.usable()).map(|(k, _)| k).collect();
    for w in 0..usable.len().saturating_sub(1) {
        let (a, b) = (usable[w], usable[w + 1]);
        if !sign_change(a.value, b.value) {
            continue;
        }
        let bracket = Bracket { lo: a.energy, hi: b.energy, f_lo: a.value, f_hi: b.value };
        let skipped_flagged = positions[w + 1] > positions[w] + 1;
        if skipped_flagged || pole_gap(a.energy, b.energy) {
            report.suspects.push(bracket);
            continue;
        }
        match bisect(f, bracket, cfg) {
            Refined::Root(r, fin) => {
                report.roots.push(r);
                report.brackets.push(fin);
            }
            Refined::Pole(fin) => report.rejected.push(fin),
            Refined::Lost(fin) => report.suspects.push(fin),
        }
    }
    // sorted, separated by more than the tolerance
    let mut pairs: Vec<(f64, Bracket)> = report.roots.iter().copied().zip(report.brackets.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.dedup_by(|x, y| (x.0 - y.0).abs() <= cfg.refine_tol);
    report.roots = pairs.iter().map(|p| p.0).collect();
    report.brackets = pairs.iter().map(|p| p.1).collect();
    report.excluded.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    report
}

enum Refined {
    Root(f64, Bracket),
    Pole(Bracket),
    Lost(Bracket),
}

fn bisect<F>(f: &F, start: Bracket, cfg: &RootScanConfig) -> Refined
where
    F: Fn(f64) -> GFunctionSample,
{
    let mut b = start;
    for _ in 0..cfg.max_bisect {
        if b.f_lo == 0.0 {
            return Refined::Root(b.lo, Bracket { hi: b.lo, ..b });
        }
        if b.f_hi == 0.0 {
            return Refined::Root(b.hi, Bracket { lo: b.hi, ..b });
        }
        if b.hi - b.lo <= cfg.refine_tol {
            break;
        }
        let mid = 0.5 * (b.lo + b.hi);
        if mid <= b.lo || mid >= b.hi {
            break;
        }
        let s = f(mid);
        if !s.usable() {
            return Refined::Lost(b);
        }
        if sign_change(b.f_lo, s.value) {
            b.hi = mid;
            b.f_hi = s.value;
        } else {
            b.lo = mid;
            b.f_lo = s.value;
        }
    }
    // a zero shrinks |f| towards the crossing, a pole inflates it
    let end = b.f_lo.abs().min(b.f_hi.abs());
    let start_max = start.f_lo.abs().max(start.f_hi.abs());
    if end > start_max {
        Refined::Pole(b)
    } else {
        Refined::Root(0.5 * (b.lo + b.hi), b)
    }
}
