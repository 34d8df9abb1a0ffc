//! Physical parameters, regime classification and the fourth-order equation
//! obeyed by the first spinor component in the holomorphic representation.
//!
//! With `D = λ d² + c₁ d + c₂` and `D̄ = λ d² + c̄₁ d + c̄₂`, where
//! `c₁ = g + ωz`, `c₂ = ε − E + gz + λz²`, `c̄₁ = g − ωz`, `c̄₂ = ε + E + gz + λz²`,
//! the component `φ₁` is annihilated by `D̄·D + Δ²`. The product is formed here
//! by Leibniz expansion rather than copied from a closed-form table, and the
//! tabulated closed forms are kept alongside for comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::series::PolyOde;

/// Default regime-classification tolerance, in units of `ω`.
pub const DEFAULT_REGIME_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega: f64,
    delta: f64,
    epsilon: f64,
    g: f64,
    lambda: f64,
}

impl ModelParams {
    /// Validates `(ω, Δ, ε, g, λ)`.
    pub fn new(omega: f64, delta: f64, epsilon: f64, g: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("omega", omega), ("delta", delta), ("epsilon", epsilon), ("g", g), ("lambda", lambda)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if omega <= 0.0 {
            return Err(Error::NonPositiveOmega(omega));
        }
        if 2.0 * lambda.abs() >= omega {
            return Err(Error::SqueezeTooStrong { two_lambda: 2.0 * lambda.abs(), omega });
        }
        Ok(ModelParams { omega, delta, epsilon, g, lambda })
    }

    /// Skips validation. Only meant for probing the unstable regime `|2λ| ≥ ω`.
    pub fn new_unchecked(omega: f64, delta: f64, epsilon: f64, g: f64, lambda: f64) -> Self {
        ModelParams { omega, delta, epsilon, g, lambda }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The map `(ε, g, λ) → (−ε, −g, −λ)` exchanging the two spinor equations.
    pub fn flipped(&self) -> Self {
        ModelParams { epsilon: -self.epsilon, g: -self.g, lambda: -self.lambda, ..*self }
    }

    pub fn with_g(&self, g: f64) -> Self {
        ModelParams { g, ..*self }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        ModelParams { lambda, ..*self }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        ModelParams { delta, ..*self }
    }

    /// `√(ω² − 4λ²)`, the squeezed oscillator frequency.
    pub fn squeezed_frequency(&self) -> f64 {
        (self.omega * self.omega - 4.0 * self.lambda * self.lambda).sqrt()
    }
}

/// Free-function form of [`ModelParams::new`].
pub fn validate_params(omega: f64, delta: f64, epsilon: f64, g: f64, lambda: f64) -> Result<ModelParams> {
    ModelParams::new(omega, delta, epsilon, g, lambda)
}

/// Parameters divided by `λ`, so that the squeezing coupling becomes one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedParams {
    pub omega_bar: f64,
    pub delta_bar: f64,
    pub epsilon_bar: f64,
    pub g_bar: f64,
    pub e_bar: f64,
    pub lambda: f64,
}

impl NormalizedParams {
    pub fn new(p: &ModelParams, energy: f64) -> Result<Self> {
        let l = p.lambda();
        if l == 0.0 {
            return Err(Error::LambdaZero);
        }
        Ok(NormalizedParams {
            omega_bar: p.omega() / l,
            delta_bar: p.delta() / l,
            epsilon_bar: p.epsilon() / l,
            g_bar: p.g() / l,
            e_bar: energy / l,
            lambda: l,
        })
    }

    /// Inverse map, returning the dimensional parameters and the energy.
    pub fn denormalize(&self) -> (ModelParams, f64) {
        let l = self.lambda;
        (ModelParams::new_unchecked(self.omega_bar * l, self.delta_bar * l, self.epsilon_bar * l, self.g_bar * l, l), self.e_bar * l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `Δ = 0`: the spinor components decouple.
    Uncoupled,
    /// `λ = 0`: asymmetric Rabi model.
    Asymmetric,
    /// `g = 0`: two-photon Rabi model.
    TwoPhoton,
    General,
}

/// Classifies by which couplings vanish; `tol` is relative to `ω`.
pub fn classify_regime(p: &ModelParams, tol: f64) -> Regime {
    let t = tol * p.omega();
    if p.delta().abs() <= t {
        Regime::Uncoupled
    } else if p.lambda().abs() <= t {
        Regime::Asymmetric
    } else if p.g().abs() <= t {
        Regime::TwoPhoton
    } else {
        Regime::General
    }
}

/// A second-order differential operator `d2(z) ∂² + d1(z) ∂ + d0(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator2 {
    pub d2: Poly,
    pub d1: Poly,
    pub d0: Poly,
}

impl Operator2 {
    fn parts(&self) -> [&Poly; 3] {
        [&self.d0, &self.d1, &self.d2]
    }
}

/// `D = λ∂² + (g + ωz)∂ + (ε − E + gz + λz²)`.
pub fn operator_d(p: &ModelParams, energy: f64) -> Operator2 {
    Operator2 {
        d2: Poly::constant(p.lambda()),
        d1: Poly::linear(p.g(), p.omega()),
        d0: Poly::new(vec![p.epsilon() - energy, p.g(), p.lambda()]),
    }
}

/// `D̄ = λ∂² + (g − ωz)∂ + (ε + E + gz + λz²)`.
pub fn operator_d_bar(p: &ModelParams, energy: f64) -> Operator2 {
    Operator2 {
        d2: Poly::constant(p.lambda()),
        d1: Poly::linear(p.g(), -p.omega()),
        d0: Poly::new(vec![p.epsilon() + energy, p.g(), p.lambda()]),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Product `outer ∘ inner` of two differential operators given by their
/// coefficient polynomials (index = derivative order).
pub fn compose_operators(outer: &[&Poly], inner: &[&Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); outer.len() + inner.len() - 1];
    for (i, o) in outer.iter().enumerate() {
        for (j, n) in inner.iter().enumerate() {
            // o ∂^i (n ∂^j) = o Σ_k C(i,k) n^{(i-k)} ∂^{j+k}
            let mut dn = (*n).clone();
            let mut derivs = vec![dn.clone()];
            for _ in 0..i {
                dn = dn.derivative();
                derivs.push(dn.clone());
            }
            for k in 0..=i {
                let term = (*o * &derivs[i - k]).scale(binomial(i, k));
                out[j + k] = &out[j + k] + &term;
            }
        }
    }
    out
}

/// Polynomial coefficients `P₀..P₄` of `D̄·D + Δ²`, index = derivative order.
pub fn composed_operator(p: &ModelParams, energy: f64) -> [Poly; 5] {
    let outer = operator_d_bar(p, energy);
    let inner = operator_d(p, energy);
    let mut c = compose_operators(&outer.parts(), &inner.parts());
    c[0] = &c[0] + &Poly::constant(p.delta() * p.delta());
    [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone(), c[4].clone()]
}

/// Fourth-order equation normalised by `λ²`:
/// `φ⁗ + A₁φ‴ + (B₁ + B₂z + B₃z²)φ″ + (C₁ + … + C₄z³)φ′ + (D₁ + … + D₄z³ + z⁴)φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ode4Coeffs {
    pub a1: f64,
    pub b: [f64; 3],
    pub c: [f64; 4],
    pub d: [f64; 4],
    /// Coefficient of `z⁴φ`; one whenever the normalisation is consistent.
    pub d_quartic: f64,
}

impl Ode4Coeffs {
    /// Coefficient polynomials, index = derivative order.
    pub fn polys(&self) -> [Poly; 5] {
        [
            Poly::new(vec![self.d[0], self.d[1], self.d[2], self.d[3], self.d_quartic]),
            Poly::new(self.c.to_vec()),
            Poly::new(self.b.to_vec()),
            Poly::constant(self.a1),
            Poly::constant(1.0),
        ]
    }

    pub fn to_ode(&self, z0: f64) -> PolyOde {
        PolyOde::new(self.polys().to_vec(), z0).expect("leading coefficient is one")
    }

    /// `(name, value)` pairs in table order.
    pub fn named(&self) -> [(&'static str, f64); 13] {
        [
            ("A1", self.a1),
            ("B1", self.b[0]),
            ("B2", self.b[1]),
            ("B3", self.b[2]),
            ("C1", self.c[0]),
            ("C2", self.c[1]),
            ("C3", self.c[2]),
            ("C4", self.c[3]),
            ("D1", self.d[0]),
            ("D2", self.d[1]),
            ("D3", self.d[2]),
            ("D4", self.d[3]),
            ("z4", self.d_quartic),
        ]
    }

    fn from_operator(ops: &[Poly; 5], lambda: f64) -> Ode4Coeffs {
        let s = 1.0 / (lambda * lambda);
        let c = |k: usize, i: usize| ops[k].coeff(i) * s;
        Ode4Coeffs {
            a1: c(3, 0),
            b: [c(2, 0), c(2, 1), c(2, 2)],
            c: [c(1, 0), c(1, 1), c(1, 2), c(1, 3)],
            d: [c(0, 0), c(0, 1), c(0, 2), c(0, 3)],
            d_quartic: c(0, 4),
        }
    }
}

/// The closed-form coefficient list as tabulated for the general case.
pub fn printed_general_table(p: &ModelParams, energy: f64) -> Ode4Coeffs {
    let (w, dl, e, g, l) = (p.omega(), p.delta(), p.epsilon(), p.g(), p.lambda());
    let l2 = l * l;
    Ode4Coeffs {
        a1: 2.0 * g / l,
        b: [g * g / l2 + (2.0 * w + e + energy) / l, g / l, 1.0 - w * w / l2],
        c: [g * (w + e + energy) / l2, (-w * w + w * (e + energy) + g * g) / l2, w * g / l2 + g / l, w / l],
        d: [
            2.0 + (g * g + e * e - energy * energy - dl * dl) / l2,
            g * (2.0 * e - w) / l2 + 2.0 * g / l,
            g * g / l2 + 2.0 * (e - w) / l,
            2.0 * g / l,
        ],
        d_quartic: 1.0,
    }
}

/// The tabulated `g = 0` list `(A₁, A₂, B₁, B₂, C₁, C₂)` of
/// `φ⁗ + (A₁ + A₂z²)φ″ + (B₁z + B₂z³)φ′ + (C₁ + C₂z² + z⁴)φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl TwoPhotonCoeffs {
    pub fn printed(p: &ModelParams, energy: f64) -> Self {
        let (w, dl, e, l) = (p.omega(), p.delta(), p.epsilon(), p.lambda());
        let l2 = l * l;
        TwoPhotonCoeffs {
            a1: (2.0 * w + e + energy) / l,
            a2: 1.0 - w * w / l2,
            b1: (w * (e + energy) - w * w) / l2,
            b2: w / l,
            c1: (e * e - energy * energy - dl * dl) / l2 + 2.0,
            c2: 2.0 * (e - w) / l2,
        }
    }

    /// Reads the `g = 0` entries off a general table.
    pub fn from_general(c: &Ode4Coeffs) -> Self {
        TwoPhotonCoeffs { a1: c.b[0], a2: c.b[2], b1: c.c[1], b2: c.c[3], c1: c.d[0], c2: c.d[2] }
    }

    pub fn to_general(&self) -> Ode4Coeffs {
        Ode4Coeffs { a1: 0.0, b: [self.a1, 0.0, self.a2], c: [0.0, self.b1, 0.0, self.b2], d: [self.c1, 0.0, self.c2, 0.0], d_quartic: 1.0 }
    }

    pub fn named(&self) -> [(&'static str, f64); 6] {
        [("A1", self.a1), ("A2", self.a2), ("B1", self.b1), ("B2", self.b2), ("C1", self.c1), ("C2", self.c2)]
    }
}

/// One disagreement between a tabulated coefficient and its composed value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffMismatch {
    pub table: &'static str,
    pub name: &'static str,
    pub printed: f64,
    pub composed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Composition {
    /// Authoritative coefficients from operator composition.
    pub composed: Ode4Coeffs,
    pub printed: Ode4Coeffs,
    /// Present when `g = 0`.
    pub printed_two_photon: Option<TwoPhotonCoeffs>,
    pub mismatches: Vec<CoeffMismatch>,
}

/// Relative agreement threshold for the mismatch report.
pub const COEFF_MATCH_TOL: f64 = 1e-12;

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= COEFF_MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Builds the fourth-order coefficient table by composition and compares it
/// with the tabulated closed forms.
pub fn operator_compose(p: &ModelParams, energy: f64) -> Result<Composition> {
    if p.lambda() == 0.0 {
        return Err(Error::LambdaZero);
    }
    let composed = Ode4Coeffs::from_operator(&composed_operator(p, energy), p.lambda());
    let printed = printed_general_table(p, energy);
    let mut mismatches: Vec<CoeffMismatch> = composed
        .named()
        .iter()
        .zip(printed.named().iter())
        .filter(|((_, c), (_, t))| !same(*c, *t))
        .map(|((name, c), (_, t))| CoeffMismatch { table: "general", name, printed: *t, composed: *c })
        .collect();
    let printed_two_photon = if p.g() == 0.0 {
        let tp = TwoPhotonCoeffs::printed(p, energy);
        let from = TwoPhotonCoeffs::from_general(&composed);
        mismatches.extend(
            from.named().iter().zip(tp.named().iter()).filter(|((_, c), (_, t))| !same(*c, *t)).map(|((name, c), (_, t))| CoeffMismatch {
                table: "two-photon",
                name,
                printed: *t,
                composed: *c,
            }),
        );
        Some(tp)
    } else {
        None
    };
    Ok(Composition { composed, printed, printed_two_photon, mismatches })
}
