//! Truncated spin ⊗ Fock diagonalisation used as ground truth.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Default photon-number cutoff.
pub const DEFAULT_CUTOFF: usize = 120;
/// Cutoff decrement used for the convergence deltas.
pub const CONVERGENCE_STEP: usize = 20;

/// Hamiltonian on `|n, s⟩`, `n = 0..=N`, stored at index `2n + s` with `s = 0`
/// the `σz = +1` state.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian {
    pub cutoff: usize,
    pub matrix: DMatrix<f64>,
}

impl TruncatedHamiltonian {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }
}

fn cutoff(n: i64) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::NegativeCutoff(n))
}

/// Builds `[[ωa†a + Δ, V], [V, ωa†a − Δ]]` with `V = ε + g(a + a†) + λ(a² + a†²)`.
pub fn build_hamiltonian(p: &ModelParams, n: i64) -> Result<TruncatedHamiltonian> {
    let n = cutoff(n)?;
    let dim = 2 * (n + 1);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let idx = |k: usize, s: usize| 2 * k + s;
    let mut set = |i: usize, j: usize, v: f64| {
        h[(i, j)] = v;
        h[(j, i)] = v;
    };
    for k in 0..=n {
        let kf = k as f64;
        set(idx(k, 0), idx(k, 0), p.omega() * kf + p.delta());
        set(idx(k, 1), idx(k, 1), p.omega() * kf - p.delta());
        set(idx(k, 0), idx(k, 1), p.epsilon());
        if k < n {
            let v = p.g() * (kf + 1.0).sqrt();
            set(idx(k + 1, 0), idx(k, 1), v);
            set(idx(k + 1, 1), idx(k, 0), v);
        }
        if k + 2 <= n {
            let v = p.lambda() * ((kf + 1.0) * (kf + 2.0)).sqrt();
            set(idx(k + 2, 0), idx(k, 1), v);
            set(idx(k + 2, 1), idx(k, 0), v);
        }
    }
    Ok(TruncatedHamiltonian { cutoff: n, matrix: h })
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(h: &TruncatedHamiltonian) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(h.matrix.clone(), f64::EPSILON, 100_000).ok_or(Error::NonConvergedEigensolver)?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergedEigensolver);
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub eigenvalues: Vec<f64>,
    pub cutoff: usize,
    /// Cutoff of the comparison run.
    pub reference_cutoff: usize,
    /// `|E_k(N) − E_k(N_ref)|` for the levels both runs contain.
    pub deltas: Vec<f64>,
}

impl OracleResult {
    pub fn max_delta(&self) -> f64 {
        self.deltas.iter().fold(0.0, |m: f64, d| m.max(*d))
    }
}

/// Lowest `k` levels at cutoff `n`, with deltas against cutoff `n − 20`.
pub fn oracle_spectrum(p: &ModelParams, n: i64, k: usize) -> Result<OracleResult> {
    let nc = cutoff(n)?;
    oracle_spectrum_against(p, nc, k, nc.saturating_sub(CONVERGENCE_STEP))
}

/// Lowest `k` levels at cutoff `n`, with deltas against an arbitrary reference cutoff.
pub fn oracle_spectrum_against(p: &ModelParams, n: usize, k: usize, reference: usize) -> Result<OracleResult> {
    let dim = 2 * (n + 1);
    if k > dim {
        return Err(Error::TooManyLevels { requested: k, dimension: dim });
    }
    let all = eigenvalues(&build_hamiltonian(p, n as i64)?)?;
    let refs = eigenvalues(&build_hamiltonian(p, reference as i64)?)?;
    let eigenvalues: Vec<f64> = all[..k].to_vec();
    let deltas = eigenvalues.iter().zip(&refs).map(|(a, b)| (a - b).abs()).collect();
    Ok(OracleResult { eigenvalues, cutoff: n, reference_cutoff: reference, deltas })
}

/// Oracle eigenvalues inside `[lo, hi]`.
pub fn oracle_window(p: &ModelParams, n: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    Ok(eigenvalues(&build_hamiltonian(p, n as i64)?)?.into_iter().filter(|e| *e >= lo && *e <= hi).collect())
}
