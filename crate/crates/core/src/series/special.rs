//! Kummer's confluent hypergeometric function and the biconfluent Heun series.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::series::PolyOde;

const KUMMER_TAIL_TOL: f64 = 1e-14;
const KUMMER_MAX_TERMS: usize = 20_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `₁F₁(a; b; x) = Σ (a)⁽ⁿ⁾/(b)⁽ⁿ⁾ xⁿ/n!`.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::PoleInB(b));
    }
    if x < 0.0 && !is_nonpositive_integer(a) {
        // Kummer's transformation keeps every term positive-leaning for x < 0
        return Ok(x.exp() * kummer_sum(b - a, b, -x)?);
    }
    kummer_sum(a, b, x)
}

fn kummer_sum(a: f64, b: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..KUMMER_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * x / (nf + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // terms decrease monotonically once n exceeds |x| and |a|
        if term.abs() <= KUMMER_TAIL_TOL * sum.abs() && nf > x.abs() + a.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConverged { terms: KUMMER_MAX_TERMS, tail: (term / sum).abs() })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma == gamma.round() {
        Err(Error::GammaResonance(gamma))
    } else {
        Ok(())
    }
}

/// Coefficients `A₀..A_{count−1}` of `A_{n+2} = (δ(n+1)+β)A_{n+1} − (n+1)(n−γ)(α−n)A_n`,
/// `A₀ = 1`, `A₁ = β`.
pub fn bch_coefficients(alpha: f64, beta: f64, gamma: f64, delta: f64, count: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(count);
    for n in 0..count {
        let v = match n {
            0 => 1.0,
            1 => beta,
            _ => {
                let k = (n - 2) as f64;
                (delta * (k + 1.0) + beta) * a[n - 1] - (k + 1.0) * (k - gamma) * (alpha - k) * a[n - 2]
            }
        };
        a.push(v);
    }
    a
}

/// `Σ A_n / (−γ)⁽ⁿ⁾ · ζⁿ/n!`, summed through the normalised coefficients
/// `c_n = A_n/((−γ)⁽ⁿ⁾ n!)` obeying
/// `(n+1)(n−γ) c_{n+1} = (δn+β) c_n − (α−n+1) c_{n−1}`.
pub fn bch_series(alpha: f64, beta: f64, gamma: f64, delta: f64, zeta: f64, max_terms: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut sum = 1.0;
    let mut zp = 1.0;
    let mut quiet = 0;
    for n in 0..max_terms {
        let nf = n as f64;
        let next = ((delta * nf + beta) * cur - (alpha - nf + 1.0) * prev) / ((nf + 1.0) * (nf - gamma));
        zp *= zeta;
        let term = next * zp;
        sum += term;
        prev = cur;
        cur = next;
        if term.abs() <= 1e-16 * sum.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConverged { terms: max_terms, tail: (cur * zp / sum).abs() })
}

/// `ζV″ − (γ + δζ + ζ²)V′ + (αζ − β)V = 0`, expanded about `ζ₀`.
pub fn bch_first_normal_form_ode(alpha: f64, beta: f64, gamma: f64, delta: f64, zeta0: f64) -> PolyOde {
    PolyOde::new(vec![Poly::linear(-beta, alpha), Poly::new(vec![-gamma, -delta, -1.0]), Poly::monomial(1.0, 1)], zeta0)
        .expect("leading coefficient is ζ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{ode_residual, ode_to_recurrence, series_eval};

    #[test]
    fn kummer_values() {
        assert_eq!(kummer_1f1(0.3, 1.7, 0.0).unwrap(), 1.0);
        assert!((kummer_1f1(0.8, 0.8, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-14);
        // term-by-term: Σ 1/(n+1)! = e − 1
        let direct: f64 = (0..30).map(|n| 1.0 / (1..=n + 1).fold(1.0, |a, k| a * k as f64)).sum();
        assert!((kummer_1f1(1.0, 2.0, 1.0).unwrap() - direct).abs() < 1e-15);
        assert!((direct - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert_eq!(kummer_1f1(0.5, -2.0, 1.0), Err(Error::PoleInB(-2.0)));
    }

    #[test]
    fn kummer_polynomial_and_negative_argument() {
        // ₁F₁(−2; b; x) = 1 − 2x/b + x²/(b(b+1))
        let (b, x) = (1.5, -3.2);
        let expected = 1.0 - 2.0 * x / b + x * x / (b * (b + 1.0));
        assert!((kummer_1f1(-2.0, b, x).unwrap() - expected).abs() < 1e-14);
        // ₁F₁(1; 2; x) = (eˣ − 1)/x
        let x = -7.0;
        assert!((kummer_1f1(1.0, 2.0, x).unwrap() - (x.exp() - 1.0) / x).abs() < 1e-15);
    }

    #[test]
    fn bch_at_origin_and_second_coefficient() {
        assert_eq!(bch_series(0.4, 0.2, -0.3, 0.1, 0.0, 100).unwrap(), 1.0);
        let (al, be, ga, de) = (0.7, -0.3, 0.45, 1.2);
        let a = bch_coefficients(al, be, ga, de, 3);
        assert!((a[2] - ((de + be) * be + ga * al)).abs() < 1e-15);
        assert_eq!(bch_series(0.4, 0.2, 2.0, 0.1, 0.5, 100), Err(Error::GammaResonance(2.0)));
    }

    #[test]
    fn bch_odd_coefficients_vanish_without_beta_delta() {
        let a = bch_coefficients(1.3, 0.0, -0.7, 0.0, 20);
        assert!(a.iter().skip(1).step_by(2).all(|&c| c == 0.0));
        assert!(a.iter().step_by(2).all(|&c| c != 0.0));
    }

    #[test]
    fn bch_matches_generic_engine() {
        let (al, be, ga, de) = (0.9, 0.35, -0.6, 0.4);
        let ode = bch_first_normal_form_ode(al, be, ga, de, 0.0);
        let rec = ode_to_recurrence(&ode).unwrap();
        let (v, _, sol) = series_eval(&rec, 0.8, 2000, 1e-15).unwrap();
        let direct = bch_series(al, be, ga, de, 0.8, 2000).unwrap();
        assert!((v.value() - direct).abs() < 1e-13 * direct.abs().max(1.0));
        assert!(ode_residual(&ode, &sol, 0.8) < 1e-12);
        // printed coefficients divided by (−γ)⁽ⁿ⁾ n! are the engine's coefficients
        let a = bch_coefficients(al, be, ga, de, 12);
        let mut norm = 1.0;
        for (n, an) in a.iter().enumerate() {
            if n > 0 {
                norm *= (-ga + (n - 1) as f64) * n as f64;
            }
            assert!((an / norm - sol.coeffs[n]).abs() < 1e-13 * (an / norm).abs().max(1e-300));
        }
    }
}
