//! Dense real polynomials in one variable, coefficients stored in ascending order.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `a + b x`
    pub fn linear(a: f64, b: f64) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(a t + b)` as a polynomial in `t`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Poly {
        let lin = Poly::linear(b, a);
        let mut out = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Poly::constant(c);
        }
        out
    }

    /// `p(t + z0)` as a polynomial in `t`.
    pub fn shift(&self, z0: f64) -> Poly {
        self.compose_affine(1.0, z0)
    }

    /// Polynomial long division, returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![0.0; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * dc;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// All complex roots, by closed form up to degree two and Durand-Kerner iteration beyond.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let lead = self.coeffs[deg];
        match deg {
            0 => Vec::new(),
            1 => vec![Complex64::new(-self.coeffs[0] / lead, 0.0)],
            2 => {
                let (a, b, c) = (lead, self.coeffs[1], self.coeffs[0]);
                let disc = Complex64::new(b * b - 4.0 * a * c, 0.0).sqrt();
                // avoid cancellation in the larger-magnitude root
                let s = if b >= 0.0 { -b - disc } else { -b + disc };
                if s == Complex64::new(0.0, 0.0) {
                    return vec![Complex64::new(0.0, 0.0); 2];
                }
                vec![s / (2.0 * a), (2.0 * c) / s]
            }
            _ => {
                let monic: Vec<f64> = self.coeffs.iter().map(|c| c / lead).collect();
                let radius = 1.0 + monic[..deg].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
                let seed = Complex64::new(0.4, 0.9);
                let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32) * radius * 0.5).collect();
                let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
                for _ in 0..500 {
                    let mut change = 0.0_f64;
                    for i in 0..deg {
                        let mut den = Complex64::new(1.0, 0.0);
                        for j in 0..deg {
                            if i != j {
                                den *= roots[i] - roots[j];
                            }
                        }
                        let step = eval(roots[i]) / den;
                        roots[i] -= step;
                        change = change.max(step.norm());
                    }
                    if change <= 1e-15 * radius {
                        break;
                    }
                }
                roots
            }
        }
    }

    /// Zeroes coefficients below `rel_tol` times the largest one.
    pub fn chop(&self, rel_tol: f64) -> Poly {
        let cut = rel_tol * self.max_abs_coeff();
        Poly::new(self.coeffs.iter().map(|&c| if c.abs() <= cut { 0.0 } else { c }).collect())
    }

    /// Order of vanishing at `x = z0`, `None` for the zero polynomial.
    pub fn vanishing_order(&self, z0: f64, tol: f64) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let shifted = self.shift(z0);
        let scale = shifted.max_abs_coeff().max(f64::MIN_POSITIVE);
        shifted.coeffs.iter().position(|c| c.abs() > tol * scale)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

/// Numerically compares two polynomials coefficient by coefficient.
pub fn approx_eq(a: &Poly, b: &Poly, rel_tol: f64) -> bool {
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(1.0);
    let n = a.coeffs.len().max(b.coeffs.len());
    (0..n).all(|k| (a.coeff(k) - b.coeff(k)).abs() <= rel_tol * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Poly::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative(), Poly::new(vec![-2.0, 6.0]));
        assert_eq!(Poly::new(vec![0.0, 0.0]), Poly::zero());
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Poly::new(vec![0.5, -1.0, 0.25, 2.0]);
        let s = p.shift(0.7);
        for t in [-1.3, 0.0, 0.4, 2.2] {
            assert!((s.eval(t) - p.eval(t + 0.7)).abs() < 1e-12);
        }
        let c = p.compose_affine(2.0, -0.5);
        assert!((c.eval(0.3) - p.eval(0.1)).abs() < 1e-12);
    }

    #[test]
    fn division_reconstructs_dividend() {
        let num = Poly::new(vec![3.0, 1.0, -4.0, 0.5, 2.0]);
        let den = Poly::new(vec![-0.36, 0.0, 1.0]);
        let (q, r) = num.div_rem(&den);
        assert!(r.degree().unwrap_or(0) < 2);
        let back = &(&q * &den) + &r;
        assert!(approx_eq(&back, &num, 1e-14));
    }

    #[test]
    fn roots_of_low_and_high_degree() {
        let quad = Poly::new(vec![-0.25, 0.0, 1.0]);
        let mut r: Vec<f64> = quad.complex_roots().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 0.5).abs() < 1e-15 && (r[1] - 0.5).abs() < 1e-15);
        // (x^2 + 1)(x - 2)(x + 3)
        let p = &(&Poly::new(vec![1.0, 0.0, 1.0]) * &Poly::linear(-2.0, 1.0)) * &Poly::linear(3.0, 1.0);
        let roots = p.complex_roots();
        assert_eq!(roots.len(), 4);
        for expected in [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0), Complex64::new(-3.0, 0.0)] {
            assert!(roots.iter().any(|z| (z - expected).norm() < 1e-10), "{expected}");
        }
    }

    #[test]
    fn vanishing_order_counts_roots() {
        // (x - 1)^2 (x + 2)
        let p = &(&Poly::linear(-1.0, 1.0) * &Poly::linear(-1.0, 1.0)) * &Poly::linear(2.0, 1.0);
        assert_eq!(p.vanishing_order(1.0, 1e-12), Some(2));
        assert_eq!(p.vanishing_order(-2.0, 1e-12), Some(1));
        assert_eq!(p.vanishing_order(0.0, 1e-12), Some(0));
    }
}
