//! Exact spectrum of the uncoupled case `Δ = 0`: two shifted, squeezed oscillators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, DEFAULT_REGIME_TOL};
use crate::series::kummer_1f1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `σz = +1`
    Plus,
    /// `σz = −1`
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSpectrum {
    pub branch: Branch,
    pub levels: Vec<f64>,
    /// `√(ω² − 4λ²)(n + ½)` per level.
    pub oscillator: Vec<f64>,
    /// `−g²/(ω ± 2λ)`
    pub displacement: f64,
    /// `−ω/2 ± ε`
    pub offset: f64,
}

fn require_uncoupled(p: &ModelParams) -> Result<()> {
    if p.delta().abs() > DEFAULT_REGIME_TOL * p.omega() {
        Err(Error::DeltaNotZero(p.delta()))
    } else {
        Ok(())
    }
}

fn branch_spectrum(p: &ModelParams, branch: Branch, n_max: usize) -> BranchSpectrum {
    let s = branch.sign();
    let w = p.squeezed_frequency();
    let displacement = -p.g() * p.g() / (p.omega() + s * 2.0 * p.lambda());
    let offset = -p.omega() / 2.0 + s * p.epsilon();
    let oscillator: Vec<f64> = (0..=n_max).map(|n| w * (n as f64 + 0.5)).collect();
    BranchSpectrum { branch, levels: oscillator.iter().map(|o| o + displacement + offset).collect(), oscillator, displacement, offset }
}

/// Both branches for `n = 0..=n_max`.
pub fn uncoupled_spectrum(p: &ModelParams, n_max: usize) -> Result<(BranchSpectrum, BranchSpectrum)> {
    require_uncoupled(p)?;
    Ok((branch_spectrum(p, Branch::Plus, n_max), branch_spectrum(p, Branch::Minus, n_max)))
}

/// The lowest `count` levels of both branches merged in ascending order.
pub fn uncoupled_levels(p: &ModelParams, count: usize) -> Result<Vec<f64>> {
    let (a, b) = uncoupled_spectrum(p, count)?;
    let mut all: Vec<f64> = a.levels.into_iter().chain(b.levels).collect();
    all.sort_by(f64::total_cmp);
    all.truncate(count);
    Ok(all)
}

/// Affine map `ζ₁ = stretch · (z + shift)` and the Weber parameter `a₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeberParams {
    pub branch: Branch,
    /// `(ω²/λ² − 4)^{1/4}`
    pub stretch: f64,
    /// `g/(ω + 2λ)`, evaluated on the branch's parameters.
    pub shift: f64,
    pub a1: f64,
    /// `sign(λ)·a₁ − ½`; a nonnegative integer exactly on the branch levels.
    pub level_index: f64,
}

impl WeberParams {
    pub fn zeta(&self, z: f64) -> f64 {
        self.stretch * (z + self.shift)
    }

    pub fn z(&self, zeta: f64) -> f64 {
        zeta / self.stretch - self.shift
    }
}

/// Weber reduction of the `branch` equation; the minus branch uses `(ε, g, λ) → −(ε, g, λ)`.
pub fn weber_params(p: &ModelParams, energy: f64, branch: Branch) -> Result<WeberParams> {
    require_uncoupled(p)?;
    if p.lambda() == 0.0 {
        return Err(Error::LambdaZero);
    }
    let q = match branch {
        Branch::Plus => *p,
        Branch::Minus => p.flipped(),
    };
    let (w, e, g, l) = (q.omega(), q.epsilon(), q.g(), q.lambda());
    let r = w * w / (l * l) - 4.0;
    let a1 = (energy + g * g / (w + 2.0 * l) + w / 2.0 - e) / (l * r.sqrt());
    Ok(WeberParams { branch, stretch: r.powf(0.25), shift: g / (w + 2.0 * l), a1, level_index: l.signum() * a1 - 0.5 })
}

/// Even and odd solutions of `u″ = (ζ²/4 + a)u`.
pub fn weber_solutions(a1: f64, zeta: f64) -> Result<(f64, f64)> {
    let g = (-zeta * zeta / 4.0).exp();
    let x = zeta * zeta / 2.0;
    let ue = g * kummer_1f1(a1 / 2.0 + 0.25, 0.5, x)?;
    let uo = zeta * g * kummer_1f1(a1 / 2.0 + 0.75, 1.5, x)?;
    Ok((ue, uo))
}

/// `(u, u′, u″)` for the even and odd solutions, from `d/dx ₁F₁(a; b; x) = (a/b) ₁F₁(a+1; b+1; x)`.
pub fn weber_derivatives(a1: f64, zeta: f64) -> Result<[[f64; 3]; 2]> {
    let g = (-zeta * zeta / 4.0).exp();
    let x = zeta * zeta / 2.0;
    let z2 = zeta * zeta;
    let kummer3 = |a: f64, b: f64| -> Result<[f64; 3]> {
        Ok([
            kummer_1f1(a, b, x)?,
            a / b * kummer_1f1(a + 1.0, b + 1.0, x)?,
            a * (a + 1.0) / (b * (b + 1.0)) * kummer_1f1(a + 2.0, b + 2.0, x)?,
        ])
    };
    let [m, mx, mxx] = kummer3(a1 / 2.0 + 0.25, 0.5)?;
    let even = [g * m, g * zeta * (mx - m / 2.0), g * ((z2 / 4.0 - 0.5) * m + (1.0 - z2) * mx + z2 * mxx)];
    let [m, mx, mxx] = kummer3(a1 / 2.0 + 0.75, 1.5)?;
    let (h, h1, h2) = (zeta * g, g * (1.0 - z2 / 2.0), g * (zeta * z2 / 4.0 - 1.5 * zeta));
    let odd = [h * m, h1 * m + h * zeta * mx, h2 * m + 2.0 * h1 * zeta * mx + h * (mx + z2 * mxx)];
    Ok([even, odd])
}

/// `|u″ − (ζ²/4 + a₁)u| / max(1, |u|)` for both solutions.
pub fn weber_residual(a1: f64, zeta: f64) -> Result<f64> {
    let d = weber_derivatives(a1, zeta)?;
    let k = zeta * zeta / 4.0 + a1;
    Ok(d.iter().map(|u| (u[2] - k * u[0]).abs() / u[0].abs().max(1.0)).fold(0.0, f64::max))
}
