//! Spectral solvers for the quantum Rabi model with bias and two-photon squeezing,
//! `H = Δσz + εσx + ωa†a + gσx(a + a†) + λσx(a² + a†²)`.

pub mod audit;
pub mod bcf;
pub mod canonical;
pub mod closed_form;
pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod heun;
pub mod model;
pub mod poly;
pub mod rootfind;
pub mod series;
pub mod spectrum;

#[cfg(test)]
mod tests;

pub use error::{Error, Result};
pub use model::{classify_regime, validate_params, ModelParams, NormalizedParams, Ode4Coeffs, Regime};
pub use poly::Poly;
pub use rootfind::{GFunctionSample, RootReport, RootScanConfig};
pub use series::{ode_residual, ode_to_recurrence, series_eval, PolyOde, RecurrenceSpec, SeriesSolution};
pub use spectrum::{Level, Method, SpectrumResult};
