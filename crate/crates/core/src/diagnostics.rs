//! ODE residual checks of every local series the solvers build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bcf::bcf_reduce;
use crate::canonical::bch_params_g0;
use crate::closed_form::{weber_derivatives, weber_params, Branch};
use crate::error::Result;
use crate::heun::{che_params, KBranch};
use crate::model::{operator_compose, ModelParams, NormalizedParams};
use crate::poly::Poly;
use crate::series::{
    bch_first_normal_form_ode, ode_residual, ode_to_recurrence, series_eval, PolyOde, DEFAULT_MAX_TERMS, DEFAULT_TAIL_TOL,
};

/// Largest acceptable residual.
pub const RESIDUAL_THRESHOLD: f64 = 1e-10;

/// Fraction of the convergence radius at which residuals are sampled.
pub const RADIUS_FRACTION: f64 = 0.2;

/// Sampling reach for series with no finite singularity besides the expansion point.
pub const ENTIRE_REACH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    ConfluentHeunAtZero,
    ConfluentHeunAtOne,
    BiconfluentAtZero,
    BiconfluentAtOne,
    NineTerm,
    FiveTerm,
    BiconfluentHeunFirstNormalForm,
    Weber,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 8] = [
        SeriesKind::ConfluentHeunAtZero,
        SeriesKind::ConfluentHeunAtOne,
        SeriesKind::BiconfluentAtZero,
        SeriesKind::BiconfluentAtOne,
        SeriesKind::NineTerm,
        SeriesKind::FiveTerm,
        SeriesKind::BiconfluentHeunFirstNormalForm,
        SeriesKind::Weber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::ConfluentHeunAtZero => "confluent Heun about 0",
            SeriesKind::ConfluentHeunAtOne => "confluent Heun about 1",
            SeriesKind::BiconfluentAtZero => "bi-confluent Fuchsian about 0",
            SeriesKind::BiconfluentAtOne => "bi-confluent Fuchsian about 1",
            SeriesKind::NineTerm => "fourth-order nine-term about 0",
            SeriesKind::FiveTerm => "two-photon five-term about 0",
            SeriesKind::BiconfluentHeunFirstNormalForm => "biconfluent Heun first normal form",
            SeriesKind::Weber => "Weber pair via Kummer",
        }
    }
}

/// One residual sample; `params` are the parameters actually used by the series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub kind: SeriesKind,
    pub params: ModelParams,
    pub energy: f64,
    pub x: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub kind: SeriesKind,
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

fn corrupted(ode: &PolyOde, corruption: f64) -> PolyOde {
    if corruption == 0.0 {
        return ode.clone();
    }
    let mut polys = ode.polys().to_vec();
    polys[0] = &polys[0] + &Poly::constant(corruption);
    PolyOde::new(polys, ode.z0()).expect("leading coefficient is unchanged")
}

fn series_point(ode: &PolyOde, t: f64, corruption: f64) -> Result<(f64, f64)> {
    let r = ode.convergence_radius();
    let reach = if r.is_finite() { RADIUS_FRACTION * r } else { ENTIRE_REACH };
    let x = ode.z0() + reach * t;
    let rec = ode_to_recurrence(ode)?;
    let (_, _, sol) = series_eval(&rec, x, DEFAULT_MAX_TERMS, DEFAULT_TAIL_TOL)?;
    Ok((x, ode_residual(&corrupted(ode, corruption), &sol, x)))
}

/// Residual of the `kind` series for parameters projected onto its regime, at offset `t ∈ [−1, 1]`
/// of the sampling reach; `corruption` is added to the zeroth-order coefficient when checking.
pub fn series_residual(kind: SeriesKind, p: &ModelParams, energy: f64, t: f64, corruption: f64) -> Result<ResidualPoint> {
    let (params, x, residual) = match kind {
        SeriesKind::ConfluentHeunAtZero | SeriesKind::ConfluentHeunAtOne => {
            let q = p.with_lambda(0.0);
            let z0 = if kind == SeriesKind::ConfluentHeunAtZero { 0.0 } else { 1.0 };
            let (x, r) = series_point(&che_params(&q, energy, KBranch::default())?.ode(z0), t, corruption)?;
            (q, x, r)
        }
        SeriesKind::BiconfluentAtZero | SeriesKind::BiconfluentAtOne => {
            let z0 = if kind == SeriesKind::BiconfluentAtZero { 0.0 } else { 1.0 };
            let (x, r) = series_point(&bcf_reduce(p, energy)?.ode(z0), t, corruption)?;
            (*p, x, r)
        }
        SeriesKind::NineTerm | SeriesKind::FiveTerm => {
            let q = if kind == SeriesKind::FiveTerm { p.with_g(0.0) } else { *p };
            let (x, r) = series_point(&operator_compose(&q, energy)?.composed.to_ode(0.0), t, corruption)?;
            (q, x, r)
        }
        SeriesKind::BiconfluentHeunFirstNormalForm => {
            let q = p.with_g(0.0);
            let b = bch_params_g0(&NormalizedParams::new(&q, energy)?)?;
            let ode = bch_first_normal_form_ode(b.alpha, b.beta, b.gamma, b.delta, 0.0);
            let (x, r) = series_point(&ode, t, corruption)?;
            (q, x, r)
        }
        SeriesKind::Weber => {
            let q = p.with_delta(0.0);
            let a1 = weber_params(&q, energy, Branch::Plus)?.a1;
            let zeta = 2.0 * ENTIRE_REACH * t;
            let k = zeta * zeta / 4.0 + a1 + corruption;
            let r = weber_derivatives(a1, zeta)?.iter().map(|u| (u[2] - k * u[0]).abs() / u[0].abs().max(1.0)).fold(0.0, f64::max);
            (q, zeta, r)
        }
    };
    Ok(ResidualPoint { kind, params, energy, x, residual })
}

/// A random parameter set, trial energy and sampling offset.
pub fn random_draw(rng: &mut impl Rng) -> (ModelParams, f64, f64) {
    let p = ModelParams::new(1.0, rng.gen_range(0.1..1.0), rng.gen_range(-0.3..0.3), rng.gen_range(0.05..0.6), rng.gen_range(0.02..0.3))
        .expect("draw ranges are valid");
    (p, rng.gen_range(-1.0..3.0), rng.gen_range(-1.0..1.0))
}

/// Maximum residual of every series kind over `draws` seeded random draws.
pub fn residual_suite(seed: u64, draws: usize, corruption: f64) -> Result<Vec<ResidualSummary>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<_> = (0..draws).map(|_| random_draw(&mut rng)).collect();
    SeriesKind::ALL
        .iter()
        .map(|&kind| {
            let mut worst: f64 = 0.0;
            for (p, e, t) in &samples {
                worst = worst.max(series_residual(kind, p, *e, *t, corruption)?.residual);
            }
            Ok(ResidualSummary {
                kind,
                name: kind.name(),
                samples: draws,
                max_residual: worst,
                threshold: RESIDUAL_THRESHOLD,
                passed: worst < RESIDUAL_THRESHOLD,
            })
        })
        .collect()
}
