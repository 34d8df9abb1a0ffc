//! Second canonical form of the coupled system in `λ`-normalised variables, its approximate
//! second-order reduction `u″ + p₁u′ + q₁u = 0` with `p₁ = c₃/c₂`, `q₁ = c₄/c₂`, the normal form
//! obtained by removing `u′`, and the `g = 0` biconfluent Heun reduction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NormalizedParams, COEFF_MATCH_TOL};
use crate::poly::Poly;
use crate::series::PolyOde;

/// Agreement threshold for the printed-versus-derived comparisons of this module.
pub const MATCH_TOL: f64 = COEFF_MATCH_TOL;

/// A tabulated value that disagrees with its derivation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaMismatch {
    pub table: &'static str,
    pub name: String,
    pub printed: f64,
    pub derived: f64,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

fn compare(table: &'static str, pairs: &[(&str, f64, f64)]) -> Vec<FormulaMismatch> {
    pairs
        .iter()
        .filter(|(_, p, d)| !same(*p, *d))
        .map(|&(name, printed, derived)| FormulaMismatch { table, name: name.to_string(), printed, derived })
        .collect()
}

fn compare_polys(table: &'static str, stem: &str, printed: &Poly, derived: &Poly) -> Vec<FormulaMismatch> {
    let n = printed.coeffs().len().max(derived.coeffs().len());
    let names: Vec<String> = (0..n).map(|k| format!("{stem}[z^{k}]")).collect();
    let pairs: Vec<(&str, f64, f64)> = (0..n).map(|k| (names[k].as_str(), printed.coeff(k), derived.coeff(k))).collect();
    compare(table, &pairs)
}

/// `p₁ = α₁z + α₂ + β₁/(z−q) + β₂/(z+q)`, `q₁ = γ₁z² + γ₂z + γ₃ + δ₁/(z−q) + δ₂/(z+q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialFractions {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl PartialFractions {
    pub fn p1(&self, q: f64, z: f64) -> f64 {
        self.alpha1 * z + self.alpha2 + self.beta1 / (z - q) + self.beta2 / (z + q)
    }

    pub fn q1(&self, q: f64, z: f64) -> f64 {
        (self.gamma1 * z + self.gamma2) * z + self.gamma3 + self.delta1 / (z - q) + self.delta2 / (z + q)
    }

    fn named(&self) -> [(&'static str, f64); 9] {
        [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalCoeffs {
    pub np: NormalizedParams,
    /// `q = ḡ/ω̄`
    pub q: f64,
    /// Approximate `c₂`, `c₃`, `c₄` defining the reduced equation.
    pub c2: Poly,
    pub c3: Poly,
    pub c4: Poly,
    /// Partial fractions of `c₃/c₂` and `c₄/c₂` by polynomial division.
    pub fractions: PartialFractions,
    pub printed_fractions: PartialFractions,
    /// Largest `|p₁ − c₃/c₂|`, `|q₁ − c₄/c₂|` over the test points.
    pub reconstruction_error: f64,
    pub mismatches: Vec<FormulaMismatch>,
}

impl CanonicalCoeffs {
    /// `c₂u″ + c₃u′ + c₄u = 0` about `z0`.
    pub fn ode(&self, z0: f64) -> PolyOde {
        PolyOde::new(vec![self.c4.clone(), self.c3.clone(), self.c2.clone()], z0).expect("c₂ is nonzero")
    }
}

fn k_shift(np: &NormalizedParams) -> f64 {
    np.epsilon_bar - np.omega_bar / 2.0 - np.g_bar * np.g_bar / 4.0
}

/// `Q₁`, `Q₂` of `u₁″ + Q₁u₁ + Δ₁u₂ = 0`, `u₂″ + Q₂u₂ + Δ₂u₁ = 0`.
pub fn coupled_potentials(np: &NormalizedParams) -> (Poly, Poly) {
    let (w, e, g, en) = (np.omega_bar, np.epsilon_bar, np.g_bar, np.e_bar);
    let z2 = -(w * w - 4.0) / 4.0;
    (
        Poly::new(vec![e - w / 2.0 - g * g / 4.0 - en, -0.5 * g * (w - 2.0), z2]),
        Poly::new(vec![e + w / 2.0 - g * g / 4.0 + en, 0.5 * g * (w + 2.0), z2]),
    )
}

/// `c₂..c₄` of the fourth-order equation built from `Q₁`, `Q₂` as stated.
pub fn exact_cn(np: &NormalizedParams) -> [Poly; 3] {
    let (q1, q2) = coupled_potentials(np);
    let w = np.omega_bar;
    let z = Poly::monomial(1.0, 1);
    let osc = &q2 + &Poly::new(vec![-w, 0.0, w * w]);
    let c2 = &q1 + &osc;
    let c3 = &q1.derivative().scale(2.0) - &(&z * &q1).scale(2.0 * w);
    let c4 = &(&(&q1.derivative().derivative() - &(&z * &q1.derivative()).scale(2.0 * w)) + &(&osc * &q1))
        + &Poly::constant(-np.delta_bar * np.delta_bar);
    [c2, c3, c4]
}

/// The tabulated explicit `c₂..c₄`.
pub fn printed_explicit_cn(np: &NormalizedParams) -> [Poly; 3] {
    let (w, e, g, en, d) = (np.omega_bar, np.epsilon_bar, np.g_bar, np.e_bar, np.delta_bar);
    let k = k_shift(np);
    let w2 = w * w;
    [
        Poly::new(vec![2.0 * e - w - g * g / 2.0, 2.0 * g, 0.5 * (w2 + 4.0)]),
        Poly::new(vec![
            -g * (w - 2.0),
            -(w2 - 4.0) - 2.0 * w * e + w2 + w * g * g / 2.0 + 2.0 * w * en,
            g * w * (w - 2.0),
            0.5 * w * (w2 - 4.0),
        ]),
        Poly::new(vec![
            -0.5 * (w2 - 4.0) + k * k - en * en - d * d,
            g * (w2 - (3.0 + en) * w + 2.0 * e - g * g / 2.0),
            (w - g * g / 4.0) * (w2 - 4.0) + 0.5 * k * (w2 / 4.0 + 1.0) - en * w2,
            -0.5 * g * (w - 2.0) * (w2 + w + 2.0),
            -(3.0 * w2 + 4.0) * (w2 - 4.0) / 16.0,
        ]),
    ]
}

/// The approximate `c₂..c₄` that define the reduced second-order equation.
pub fn approximate_cn(np: &NormalizedParams) -> [Poly; 3] {
    let (w, e, g, en, d) = (np.omega_bar, np.epsilon_bar, np.g_bar, np.e_bar, np.delta_bar);
    let k = k_shift(np);
    let w2 = w * w;
    [
        Poly::new(vec![-g * g / 2.0, 0.0, w2 / 2.0]),
        Poly::new(vec![-w * g, w * (2.0 * en - 2.0 * e + g * g / 2.0), g * w * (w - 2.0), 0.5 * w2 * w]),
        Poly::new(vec![
            -0.5 * w2 + k * k - en * en - d * d,
            g * (w2 - (3.0 + en) * w + 2.0 * e - g * g / 2.0),
            w2 * w + (k / 8.0 - (g * g / 4.0 + en)) * w2 + 7.0 / 8.0 * g * g,
            -0.5 * g * w2 * (w - 1.0),
            -w2 * (3.0 * w2 - 8.0) / 16.0,
        ]),
    ]
}

fn printed_fractions(np: &NormalizedParams) -> PartialFractions {
    let (w, e, g, en, d) = (np.omega_bar, np.epsilon_bar, np.g_bar, np.e_bar, np.delta_bar);
    let k = k_shift(np);
    let (gw, g3w3) = (g / w, (g / w).powi(3));
    let common = -w * w / 2.0 + k * k - en * en - d * d;
    PartialFractions {
        alpha1: w,
        alpha2: 2.0 * g * (1.0 - 2.0 / w),
        beta1: 2.0 / w * (en - e + g * g * (1.0 - 1.0 / w)) - 1.0,
        beta2: 2.0 / w * (en - e + g * g / w) + 1.0,
        gamma1: 1.0 - 3.0 * w * w / 8.0,
        gamma2: -g * (w - 1.0),
        gamma3: 11.0 / 4.0 * g * g / (w * w) + 15.0 / 8.0 * w - 2.0 * en + e / 4.0 - 15.0 / 16.0 * g * g,
        delta1: gw * (31.0 / 16.0 * w + e / 8.0 - 3.0 - 2.0 * en + 2.0 * e / w) + g3w3 * (13.0 / 32.0 * w * w + 11.0 / 8.0) + common,
        delta2: gw * (w / 16.0 - e / 8.0 + 3.0 + 2.0 * en - 2.0 * e / w) - g3w3 * (w * w / 32.0 + 11.0 / 8.0) - common,
    }
}

/// Residues at `±q` and polynomial parts of `c₃/c₂` and `c₄/c₂`.
fn divide(c2: &Poly, c3: &Poly, c4: &Poly, q: f64) -> PartialFractions {
    let dc2 = c2.derivative();
    let (pa, ra) = c3.div_rem(c2);
    let (pb, rb) = c4.div_rem(c2);
    PartialFractions {
        alpha1: pa.coeff(1),
        alpha2: pa.coeff(0),
        beta1: ra.eval(q) / dc2.eval(q),
        beta2: ra.eval(-q) / dc2.eval(-q),
        gamma1: pb.coeff(2),
        gamma2: pb.coeff(1),
        gamma3: pb.coeff(0),
        delta1: rb.eval(q) / dc2.eval(q),
        delta2: rb.eval(-q) / dc2.eval(-q),
    }
}

/// Points at which the partial fractions are checked against the rational functions.
pub const RECONSTRUCTION_POINTS: [f64; 5] = [-1.7, -0.45, 0.3, 0.85, 2.2];

fn g_is_zero(np: &NormalizedParams) -> bool {
    np.g_bar.abs() <= 1e-12 * np.omega_bar.abs()
}

pub fn canonical_coeffs(np: &NormalizedParams) -> Result<CanonicalCoeffs> {
    if g_is_zero(np) {
        return Err(Error::GZero);
    }
    let q = np.g_bar / np.omega_bar;
    let [c2, c3, c4] = approximate_cn(np);
    let fractions = divide(&c2, &c3, &c4, q);
    let printed = printed_fractions(np);
    let reconstruction_error = RECONSTRUCTION_POINTS
        .iter()
        .filter(|z| (z.abs() - q.abs()).abs() > 1e-3)
        .map(|&z| {
            let c = c2.eval(z);
            (fractions.p1(q, z) - c3.eval(z) / c).abs().max((fractions.q1(q, z) - c4.eval(z) / c).abs())
        })
        .fold(0.0, f64::max);
    let pairs: Vec<(&str, f64, f64)> = printed.named().iter().zip(fractions.named()).map(|(&(n, p), (_, d))| (n, p, d)).collect();
    let mut mismatches = compare("partial fractions", &pairs);
    let exact = exact_cn(np);
    for ((stem, p), d) in ["c2", "c3", "c4"].iter().zip(printed_explicit_cn(np)).zip(&exact) {
        mismatches.extend(compare_polys("explicit c_n", stem, &p, d));
    }
    Ok(CanonicalCoeffs { np: *np, q, c2, c3, c4, fractions, printed_fractions: printed, reconstruction_error, mismatches })
}

/// `U″ = −(λ₁z² + λ₂z + λ₃ + μ₁/(z−q) + μ₂/(z+q) + ν₁/(z−q)² + ν₂/(z+q)²)U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormCoeffs {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub nu1: f64,
    pub nu2: f64,
}

impl NormalFormCoeffs {
    /// The bracketed potential at `z`.
    pub fn potential(&self, q: f64, z: f64) -> f64 {
        let (a, b) = (z - q, z + q);
        (self.lambda1 * z + self.lambda2) * z + self.lambda3 + self.mu1 / a + self.mu2 / b + self.nu1 / (a * a) + self.nu2 / (b * b)
    }

    fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("nu1", self.nu1),
            ("nu2", self.nu2),
        ]
    }
}

fn nu(b: f64) -> f64 {
    b / 2.0 * (1.0 - b / 2.0)
}

/// Normal-form coefficients from `q₁ − p₁²/4 − p₁′/2`.
pub fn normal_form_coeffs(cc: &CanonicalCoeffs) -> NormalFormCoeffs {
    let f = &cc.fractions;
    let q = cc.q;
    NormalFormCoeffs {
        lambda1: f.gamma1 - f.alpha1 * f.alpha1 / 4.0,
        lambda2: f.gamma2 - 0.5 * f.alpha1 * f.alpha2,
        lambda3: f.gamma3 - f.alpha1 / 2.0 * (1.0 + f.beta1 + f.beta2) - f.alpha2 * f.alpha2 / 4.0,
        mu1: f.delta1 - 0.5 * (q * f.alpha1 + f.alpha2 + f.beta2 / (2.0 * q)) * f.beta1,
        mu2: f.delta2 + 0.5 * (q * f.alpha1 - f.alpha2 + f.beta1 / (2.0 * q)) * f.beta2,
        nu1: nu(f.beta1),
        nu2: nu(f.beta2),
    }
}

/// The tabulated normal-form formulas applied to the same partial fractions.
pub fn printed_normal_form_coeffs(cc: &CanonicalCoeffs) -> NormalFormCoeffs {
    let f = &cc.fractions;
    let q = cc.q;
    let wg = cc.np.omega_bar / (4.0 * cc.np.g_bar);
    NormalFormCoeffs {
        lambda1: f.gamma1 - f.alpha1 / 4.0,
        lambda2: f.gamma2 - 0.5 * f.alpha1 * f.alpha2,
        lambda3: f.gamma3 - f.alpha1 / 2.0 * (1.0 + f.beta1 + f.beta2) - f.alpha2 * f.alpha2 / 4.0,
        mu1: f.delta1 - 0.5 * (q * f.alpha1 + f.alpha2 + wg * f.beta2) * f.beta1,
        mu2: f.delta2 + 0.5 * (q * f.alpha1 - f.alpha2 + wg * f.beta1) * f.beta2,
        nu1: nu(f.beta1),
        nu2: nu(f.beta2),
    }
}

pub fn normal_form_mismatches(cc: &CanonicalCoeffs) -> Vec<FormulaMismatch> {
    let pairs: Vec<(&str, f64, f64)> =
        printed_normal_form_coeffs(cc).named().iter().zip(normal_form_coeffs(cc).named()).map(|(&(n, p), (_, d))| (n, p, d)).collect();
    compare("normal form", &pairs)
}

/// `U = u·|z−q|^{β₁/2}|z+q|^{β₂/2}·exp(α₁z²/4 + α₂z/2)` and its first two derivatives,
/// given `u, u′, u″` at `z`.
pub fn to_normal_form(f: &PartialFractions, q: f64, z: f64, u: [f64; 3]) -> [f64; 3] {
    let h =
        ((f.beta1 / 2.0) * (z - q).abs().ln() + (f.beta2 / 2.0) * (z + q).abs().ln() + f.alpha1 * z * z / 4.0 + f.alpha2 * z / 2.0).exp();
    let s1 = f.p1(q, z) / 2.0;
    let s2 = (f.alpha1 - f.beta1 / (z - q).powi(2) - f.beta2 / (z + q).powi(2)) / 2.0;
    [h * u[0], h * (u[1] + s1 * u[0]), h * (u[2] + 2.0 * s1 * u[1] + (s2 + s1 * s1) * u[0])]
}

/// Biconfluent Heun data of the `g = 0` reduction
/// `U″ + (λ₁z² + λ₂z + λ₃ + μ/z + ν/z²)U = 0` under `ξ = cz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BchParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub mu: f64,
    pub nu: f64,
    /// `c = e^{−iπ/4}(4λ₁)^{1/4}` of `ξ = cz`.
    pub xi_scale: Complex64,
    pub derived: BchDerived,
}

/// The same reduction carried out from the approximate `c₂..c₄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BchDerived {
    pub lambda1: f64,
    pub lambda3: f64,
    pub nu: f64,
    /// Root of `c⁴ = −4λ₁` with argument in `(−π/2, 0]`.
    pub xi_scale: Complex64,
    /// Root of `γ² + 2γ + 4ν = 0` nearest the tabulated `γ`.
    pub gamma: Complex64,
    /// `λ₃/c² + (γ − 1)/2`.
    pub alpha: Complex64,
}

fn xi_scale(lambda1: f64) -> Complex64 {
    Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4) * Complex64::new(4.0 * lambda1, 0.0).powf(0.25)
}

pub fn bch_params_g0(np: &NormalizedParams) -> Result<BchParams> {
    if !g_is_zero(np) {
        return Err(Error::GNotZero(np.g_bar * np.lambda));
    }
    let (w, e, en) = (np.omega_bar, np.epsilon_bar, np.e_bar);
    let x = 2.0 / w * (en - e);
    let lambda1 = (1.0 + w / 2.0) * (1.0 - 3.0 * w / 4.0);
    let gamma = -2.0 * x;
    let alpha = -2.0 * (1.0 / w + 2.0) * en + (9.0 / 4.0 + 2.0 / w) * e + 11.0 / 8.0 * w - 0.5;

    // c₂ = ω̄²z²/2, so p₁ = ω̄z + B/z and q₁ = 2c₄/ω̄z²
    let [_, c3, c4] = approximate_cn(np);
    let s = 2.0 / (w * w);
    let b = c3.coeff(1) * s;
    let d_lambda1 = c4.coeff(4) * s - w * w / 4.0;
    let d_lambda3 = c4.coeff(2) * s - w * b / 2.0 - w / 2.0;
    let d_nu = c4.coeff(0) * s + b / 2.0 - b * b / 4.0;
    let c = xi_scale(d_lambda1);
    let disc = Complex64::new(1.0 - 4.0 * d_nu, 0.0).sqrt();
    let roots = [-1.0 + disc, -1.0 - disc];
    let d_gamma = if (roots[0] - gamma).norm() <= (roots[1] - gamma).norm() { roots[0] } else { roots[1] };
    Ok(BchParams {
        alpha,
        beta: 0.0,
        gamma,
        delta: 0.0,
        lambda1,
        lambda2: 0.0,
        lambda3: 11.0 / 8.0 * w - 4.0 * en + 9.0 * e / 4.0,
        mu: 0.0,
        nu: x * (1.0 - x),
        xi_scale: xi_scale(lambda1),
        derived: BchDerived {
            lambda1: d_lambda1,
            lambda3: d_lambda3,
            nu: d_nu,
            xi_scale: c,
            gamma: d_gamma,
            alpha: d_lambda3 / (c * c) + (d_gamma - 1.0) / 2.0,
        },
    })
}

pub fn bch_mismatches(b: &BchParams) -> Vec<FormulaMismatch> {
    let d = &b.derived;
    let mut pairs = vec![
        ("lambda1", b.lambda1, d.lambda1),
        ("lambda3", b.lambda3, d.lambda3),
        ("nu", b.nu, d.nu),
        ("gamma", b.gamma, d.gamma.re),
        ("alpha", b.alpha, d.alpha.re),
    ];
    pairs.push(("gamma (imaginary part)", 0.0, d.gamma.im));
    pairs.push(("alpha (imaginary part)", 0.0, d.alpha.im));
    compare("biconfluent Heun, g = 0", &pairs)
}

/// `ζ²/4 + δζ/2 − (1 + 2α − γ)/2 + δ²/4 + (γδ + 2β)/2ζ + γ(2 + γ)/4ζ²`.
pub fn bch_second_normal_form_potential(alpha: f64, beta: f64, gamma: f64, delta: f64, zeta: f64) -> f64 {
    zeta * zeta / 4.0 + delta * zeta / 2.0 - (1.0 + 2.0 * alpha - gamma) / 2.0
        + delta * delta / 4.0
        + (gamma * delta + 2.0 * beta) / (2.0 * zeta)
        + gamma * (2.0 + gamma) / (4.0 * zeta * zeta)
}

/// `U = V·ζ^{−γ/2}·exp(−δζ/2 − ζ²/4)` and its first two derivatives, given `V, V′, V″` at `ζ > 0`.
pub fn from_first_normal_form(gamma: f64, delta: f64, zeta: f64, v: [f64; 3]) -> [f64; 3] {
    let h = (-(gamma / 2.0) * zeta.ln() - delta * zeta / 2.0 - zeta * zeta / 4.0).exp();
    let s1 = -(gamma / (2.0 * zeta) + delta / 2.0 + zeta / 2.0);
    let s2 = gamma / (2.0 * zeta * zeta) - 0.5;
    [h * v[0], h * (v[1] + s1 * v[0]), h * (v[2] + 2.0 * s1 * v[1] + (s2 + s1 * s1) * v[0])]
}
