//! Local power-series solutions of linear ODEs with polynomial coefficients.
//!
//! An equation `Σ_k p_k(z) u^{(k)} = 0` expanded about `z₀` as
//! `u = Σ a_m (z − z₀)^m` yields a finite recurrence
//! `Σ_{s=0}^{span} w_s(m) a_{m−s} = 0` whose weights are polynomials in `m`.

mod special;

pub use special::{bch_coefficients, bch_first_normal_form_ode, bch_series, kummer_1f1};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Default relative tail tolerance for series summation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
/// Default cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 2000;
/// Relative size below which a leading weight, or a compatibility numerator, counts as zero.
pub const RESONANCE_TOL: f64 = 1e-12;
/// Rolling-window magnitude that triggers a downward rescale.
const RESCALE_THRESHOLD: f64 = 1e100;
/// Terms between rescale checks.
const RESCALE_PERIOD: usize = 50;
/// Relative size below which shifted coefficients are treated as cancellation noise.
const CHOP_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyOde {
    polys: Vec<Poly>,
    z0: f64,
}

impl PolyOde {
    /// `polys[k]` multiplies the `k`-th derivative.
    pub fn new(polys: Vec<Poly>, z0: f64) -> Result<Self> {
        if polys.len() < 2 {
            return Err(Error::InvalidOde("order must be at least one"));
        }
        if polys.last().is_some_and(Poly::is_zero) {
            return Err(Error::InvalidOde("leading coefficient vanishes identically"));
        }
        if !z0.is_finite() || polys.iter().any(|p| p.coeffs().iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidOde("non-finite coefficient"));
        }
        Ok(PolyOde { polys, z0 })
    }

    pub fn order(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn at(&self, z0: f64) -> PolyOde {
        PolyOde { polys: self.polys.clone(), z0 }
    }

    /// Finite singular points: complex roots of the leading coefficient.
    pub fn singular_points(&self) -> Vec<num_complex::Complex64> {
        self.polys[self.order()].complex_roots()
    }

    /// Distance from `z₀` to the nearest other finite singular point.
    pub fn convergence_radius(&self) -> f64 {
        let near = 1e-10 * (1.0 + self.z0.abs());
        self.singular_points().iter().map(|r| (r - self.z0).norm()).filter(|&d| d > near).fold(f64::INFINITY, f64::min)
    }

    /// `Σ_k p_k(x) d_k` for given derivative values `d_k`.
    pub fn apply(&self, x: f64, derivs: &[f64]) -> f64 {
        self.polys.iter().zip(derivs).map(|(p, d)| p.eval(x) * d).sum()
    }
}

/// Linear recurrence `Σ_{s=0}^{span} w_s(m) a_{m−s} = 0` for `m ≥ free`, with
/// `a_0..a_{free−1}` given and negative indices zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSpec {
    pub label: String,
    pub z0: f64,
    /// `weights[s]` is `w_s` as a polynomial in the newest index `m`.
    pub weights: Vec<Poly>,
    pub initial: Vec<f64>,
    /// Radius of the disk in which the series is summed.
    pub radius: f64,
}

impl RecurrenceSpec {
    pub fn new(label: impl Into<String>, z0: f64, weights: Vec<Poly>, initial: Vec<f64>, radius: f64) -> Self {
        RecurrenceSpec { label: label.into(), z0, weights, initial, radius }
    }

    /// Number of back-terms.
    pub fn span(&self) -> usize {
        self.weights.len() - 1
    }

    /// Number of leading coefficients fixed by initial data.
    pub fn free(&self) -> usize {
        self.initial.len()
    }

    pub fn weight(&self, s: usize, m: usize) -> f64 {
        self.weights[s].eval(m as f64)
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Self {
        assert_eq!(initial.len(), self.initial.len(), "initial data length is fixed by the ODE");
        self.initial = initial;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Validity radius for summation, cleared for recurrences known to be entire.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }
}

/// Falling factorial `(m − s)(m − s − 1)⋯(m − s − k + 1)` as a polynomial in `m`.
fn falling(s: usize, k: usize) -> Poly {
    (0..k).fold(Poly::constant(1.0), |acc, i| &acc * &Poly::linear(-((s + i) as f64), 1.0))
}

/// Substitutes `Σ a_m (z − z₀)^m` into the ODE and collects powers.
pub fn ode_to_recurrence(ode: &PolyOde) -> Result<RecurrenceSpec> {
    let n = ode.order();
    let shifted: Vec<Poly> = ode.polys.iter().map(|p| p.shift(ode.z0).chop(CHOP_TOL)).collect();
    let lead_vanish = shifted[n].vanishing_order(0.0, 0.0).expect("leading coefficient is nonzero");
    // term c t^j ∂^k shifts the index by d = k − j; the leading derivative must dominate
    let d_max = n as isize - lead_vanish as isize;
    let mut d_min = d_max;
    for (k, p) in shifted.iter().enumerate() {
        for (j, &c) in p.coeffs().iter().enumerate() {
            if c != 0.0 {
                let d = k as isize - j as isize;
                if d > d_max {
                    return Err(Error::IrregularPoint(ode.z0));
                }
                d_min = d_min.min(d);
            }
        }
    }
    if d_max < 1 {
        return Err(Error::IrregularPoint(ode.z0));
    }
    let span = (d_max - d_min) as usize;
    let mut weights = vec![Poly::zero(); span + 1];
    for (k, p) in shifted.iter().enumerate() {
        for (j, &c) in p.coeffs().iter().enumerate() {
            if c != 0.0 {
                let s = (d_max - (k as isize - j as isize)) as usize;
                weights[s] = &weights[s] + &falling(s, k).scale(c);
            }
        }
    }
    let free = d_max as usize;
    let mut initial = vec![0.0; free];
    initial[0] = 1.0;
    Ok(RecurrenceSpec {
        label: format!("{}-term recurrence about z0 = {}", span + 1, ode.z0),
        z0: ode.z0,
        weights,
        initial,
        radius: ode.convergence_radius(),
    })
}

/// A value `mantissa · exp(scale_log)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub mantissa: f64,
    pub scale_log: f64,
}

impl Scaled {
    pub fn value(&self) -> f64 {
        self.mantissa * self.scale_log.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSolution {
    pub z0: f64,
    /// Coefficient mantissas; the true coefficients are `coeffs[m] · exp(scale_log)`.
    pub coeffs: Vec<f64>,
    pub scale_log: f64,
    /// Largest relative tail term over the final window.
    pub tail: f64,
    pub provenance: String,
    /// Indices where the recurrence was continued through a compatible resonance.
    pub resonances: Vec<usize>,
    /// Smallest `|w_0(m)| / max_s |w_s(m)|` met while generating.
    pub min_lead_ratio: f64,
}

impl SeriesSolution {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Mantissas of `s^{(k)}(x)` for `k = 0..=order`, sharing `scale_log`.
    pub fn derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        let t = x - self.z0;
        let mut out = vec![0.0; order + 1];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for m in (k..self.coeffs.len()).rev() {
                let ff = (0..k).fold(1.0, |a, i| a * (m - i) as f64);
                acc = acc * t + ff * self.coeffs[m];
            }
            *o = acc;
        }
        out
    }

    pub fn value(&self, x: f64) -> Scaled {
        Scaled { mantissa: self.derivatives(x, 0)[0], scale_log: self.scale_log }
    }
}

/// Step state shared by the generators below.
struct Generator<'a> {
    rec: &'a RecurrenceSpec,
    coeffs: Vec<f64>,
    resonances: Vec<usize>,
    min_lead_ratio: f64,
}

impl<'a> Generator<'a> {
    fn new(rec: &'a RecurrenceSpec) -> Self {
        Generator { rec, coeffs: Vec::new(), resonances: Vec::new(), min_lead_ratio: f64::INFINITY }
    }

    /// Appends the next coefficient.
    fn step(&mut self) -> Result<f64> {
        let m = self.coeffs.len();
        let a = if m < self.rec.free() {
            self.rec.initial[m]
        } else {
            let lead = self.rec.weight(0, m);
            let mut num = 0.0;
            let mut mag = 0.0;
            let mut wmax = lead.abs();
            for s in 1..=self.rec.span().min(m) {
                let w = self.rec.weight(s, m);
                wmax = wmax.max(w.abs());
                let term = w * self.coeffs[m - s];
                num -= term;
                mag += term.abs();
            }
            let ratio = if wmax > 0.0 { lead.abs() / wmax } else { 0.0 };
            self.min_lead_ratio = self.min_lead_ratio.min(ratio);
            if ratio <= RESONANCE_TOL {
                if num.abs() <= RESONANCE_TOL * mag || mag == 0.0 {
                    self.resonances.push(m);
                    0.0
                } else {
                    return Err(Error::ResonantIndex { index: m, residual: num.abs() / mag });
                }
            } else {
                num / lead
            }
        };
        self.coeffs.push(a);
        Ok(a)
    }

    /// Rescales when the recent window has grown too large; returns the factor applied.
    fn maybe_rescale(&mut self) -> f64 {
        let m = self.coeffs.len();
        if m == 0 || !m.is_multiple_of(RESCALE_PERIOD) {
            return 1.0;
        }
        let w = self.rec.span() + 1;
        let wmax = self.coeffs[m.saturating_sub(w)..].iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        if wmax > RESCALE_THRESHOLD {
            let f = 1.0 / wmax;
            self.coeffs.iter_mut().for_each(|c| *c *= f);
            f
        } else {
            1.0
        }
    }

    fn finish(self, scale_log: f64, tail: f64) -> SeriesSolution {
        SeriesSolution {
            z0: self.rec.z0,
            coeffs: self.coeffs,
            scale_log,
            tail,
            provenance: self.rec.label.clone(),
            resonances: self.resonances,
            min_lead_ratio: self.min_lead_ratio,
        }
    }
}

/// Generates exactly `count` coefficients.
pub fn series_coefficients(rec: &RecurrenceSpec, count: usize) -> Result<SeriesSolution> {
    let mut g = Generator::new(rec);
    let mut scale_log = 0.0;
    for _ in 0..count {
        g.step()?;
        scale_log -= g.maybe_rescale().ln();
    }
    Ok(g.finish(scale_log, f64::NAN))
}

/// Sums the series and its first derivative at `x`.
pub fn series_eval(rec: &RecurrenceSpec, x: f64, max_terms: usize, tail_tol: f64) -> Result<(Scaled, Scaled, SeriesSolution)> {
    let t = x - rec.z0;
    if t.abs() >= rec.radius {
        return Err(Error::EvalPointOutOfDisk { x, z0: rec.z0, radius: rec.radius });
    }
    let mut g = Generator::new(rec);
    let mut scale_log = 0.0;
    let (mut s, mut ds) = (0.0, 0.0);
    let window = rec.span() + 1;
    let min_terms = (2 * window).max(rec.free() + 1);
    let mut tails: Vec<f64> = Vec::with_capacity(max_terms.min(4096));
    let mut tpow = 1.0; // t^m
    let mut tpow_m1 = 0.0; // t^(m-1)
    let tail;
    loop {
        let m = g.coeffs.len();
        let a = g.step()?;
        s += a * tpow;
        ds += m as f64 * a * tpow_m1;
        tails.push((a * tpow).abs() * (1.0 + m as f64));
        tpow_m1 = tpow;
        tpow *= t;
        let f = g.maybe_rescale();
        if f != 1.0 {
            s *= f;
            ds *= f;
            tails.iter_mut().for_each(|x| *x *= f);
            scale_log -= f.ln();
        }
        let n = g.coeffs.len();
        if t == 0.0 && n >= 2 {
            tail = 0.0;
            break;
        }
        if n >= min_terms {
            let reference = s.abs() + t.abs() * ds.abs();
            let recent = tails[n - window..].iter().fold(0.0_f64, |a, &b| a.max(b));
            if recent <= tail_tol * reference {
                tail = if reference > 0.0 { recent / reference } else { 0.0 };
                break;
            }
            if n >= max_terms {
                return Err(Error::NonConverged { terms: n, tail: if reference > 0.0 { recent / reference } else { f64::INFINITY } });
            }
        }
    }
    let sol = g.finish(scale_log, tail);
    Ok((Scaled { mantissa: s, scale_log }, Scaled { mantissa: ds, scale_log }, sol))
}

/// `|Σ_k p_k(x) s^{(k)}(x)| / max(1, |s(x)|)` for the truncated series `s`.
pub fn ode_residual(ode: &PolyOde, sol: &SeriesSolution, x: f64) -> f64 {
    let d = sol.derivatives(x, ode.order());
    let num = ode.apply(x, &d).abs();
    // both sides carry exp(scale_log); the floor of one is rescaled accordingly
    let floor = (-sol.scale_log).exp();
    num / d[0].abs().max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_ode() -> PolyOde {
        // u'' = u
        PolyOde::new(vec![Poly::constant(-1.0), Poly::zero(), Poly::constant(1.0)], 0.0).unwrap()
    }

    #[test]
    fn exponential_recurrence() {
        let rec = ode_to_recurrence(&exp_ode()).unwrap();
        assert_eq!(rec.span(), 2);
        assert_eq!(rec.free(), 2);
        // (m)(m-1) a_m - a_{m-2} = 0
        for m in 2..8 {
            assert_eq!(rec.weight(0, m), (m * (m - 1)) as f64);
            assert_eq!(rec.weight(1, m), 0.0);
            assert_eq!(rec.weight(2, m), -1.0);
        }
        let rec = rec.with_initial(vec![1.0, 1.0]);
        let (v, d, _) = series_eval(&rec, 1.0, DEFAULT_MAX_TERMS, DEFAULT_TAIL_TOL).unwrap();
        assert!((v.value() - std::f64::consts::E).abs() < 1e-14);
        assert!((d.value() - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn value_at_expansion_point() {
        let rec = ode_to_recurrence(&exp_ode().at(0.3)).unwrap().with_initial(vec![0.7, -0.2]);
        let (v, d, _) = series_eval(&rec, 0.3, 100, 1e-14).unwrap();
        assert_eq!(v.value(), 0.7);
        assert_eq!(d.value(), -0.2);
    }

    #[test]
    fn irregular_point_detected() {
        // z^2 u'' + u = 0 has an irregular singularity at 0
        let ode = PolyOde::new(vec![Poly::constant(1.0), Poly::zero(), Poly::monomial(1.0, 2)], 0.0).unwrap();
        assert_eq!(ode_to_recurrence(&ode), Err(Error::IrregularPoint(0.0)));
        // z u'' + u' + u = 0 is regular singular
        let bessel = PolyOde::new(vec![Poly::constant(1.0), Poly::constant(1.0), Poly::monomial(1.0, 1)], 0.0).unwrap();
        let rec = ode_to_recurrence(&bessel).unwrap();
        assert_eq!(rec.free(), 1);
        // m^2 a_m + a_{m-1} = 0
        assert_eq!(rec.weight(0, 3), 9.0);
        assert_eq!(rec.weight(1, 3), 1.0);
    }

    #[test]
    fn out_of_disk_rejected() {
        // (1 - z^2) u'' - 2 z u' + 2 u = 0 (Legendre, l = 1)
        let ode = PolyOde::new(vec![Poly::constant(2.0), Poly::linear(0.0, -2.0), Poly::new(vec![1.0, 0.0, -1.0])], 0.0).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap();
        assert!((rec.radius - 1.0).abs() < 1e-14);
        assert!(matches!(series_eval(&rec, 1.2, 100, 1e-14), Err(Error::EvalPointOutOfDisk { .. })));
    }

    #[test]
    fn resonance_passed_when_compatible() {
        // Legendre l = 1 admits the polynomial z; a_0 = 0 start keeps it compatible
        let ode = PolyOde::new(vec![Poly::constant(2.0), Poly::linear(0.0, -2.0), Poly::new(vec![1.0, 0.0, -1.0])], 0.0).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap().with_initial(vec![0.0, 1.0]);
        let (v, _, sol) = series_eval(&rec, 0.5, 200, 1e-14).unwrap();
        assert!((v.value() - 0.5).abs() < 1e-15);
        assert!(sol.coeffs[2..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn incompatible_resonance_is_an_error() {
        // z u'' - u' = 0 at 0: indicial roots 0 and 2, a_1 forced nonzero path
        // z u'' - u' + u = 0: m(m-2) a_m + a_{m-1} = 0, resonant at m = 2 with a_1 = 1
        let ode = PolyOde::new(vec![Poly::constant(1.0), Poly::constant(-1.0), Poly::monomial(1.0, 1)], 0.0).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap();
        assert!(matches!(series_coefficients(&rec, 5), Err(Error::ResonantIndex { index: 2, .. })));
    }

    #[test]
    fn residual_detects_corruption() {
        let ode = PolyOde::new(vec![Poly::linear(0.3, -1.0), Poly::new(vec![0.5, 0.2]), Poly::new(vec![1.0, 0.0, 0.4])], 0.1).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap().with_initial(vec![1.0, 0.5]);
        let (_, _, mut sol) = series_eval(&rec, 0.3, 500, 1e-15).unwrap();
        assert!(ode_residual(&ode, &sol, 0.3) < 1e-12);
        sol.coeffs[3] += 1e-3;
        assert!(ode_residual(&ode, &sol, 0.3) > 1e-5);
    }

    #[test]
    fn rescaling_preserves_values() {
        // u' = 300 u: coefficients 300^m/m! peak near 1e130 and force rescales
        let ode = PolyOde::new(vec![Poly::constant(-300.0), Poly::constant(1.0)], 0.0).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap();
        let (v, _, sol) = series_eval(&rec, 0.3, DEFAULT_MAX_TERMS, 1e-15).unwrap();
        assert!(sol.scale_log > 0.0);
        assert!(((v.value() - 90f64.exp()) / 90f64.exp()).abs() < 1e-12);
        let small = series_coefficients(&rec, 40).unwrap();
        assert_eq!(small.scale_log, 0.0);
        for m in 0..40 {
            let exact = (m as f64 * 300f64.ln() - (1..=m).map(|k| (k as f64).ln()).sum::<f64>()).exp();
            assert!((small.coeffs[m] - exact).abs() <= 1e-12 * exact);
        }
        let big = series_coefficients(&rec, 400).unwrap();
        assert!(big.scale_log > 0.0);
        let m = 300;
        let exact_log = m as f64 * 300f64.ln() - (1..=m).map(|k| (k as f64).ln()).sum::<f64>();
        assert!(((big.coeffs[m].ln() + big.scale_log) - exact_log).abs() < 1e-9);
    }

    #[test]
    fn non_convergence_reported() {
        let rec = ode_to_recurrence(&exp_ode()).unwrap();
        assert!(matches!(series_eval(&rec, 3.0, 10, 1e-14), Err(Error::NonConverged { .. })));
    }
}
