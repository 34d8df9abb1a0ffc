//! The three subcommands, each producing a table and an exit status.

use rabi_core::audit::{audit_all, AUDIT_TOL};
use rabi_core::bcf::{bcf_poles, bcf_spectrum_at, g_function_bcf};
use rabi_core::canonical::{bch_mismatches, bch_params_g0, canonical_coeffs, normal_form_mismatches, FormulaMismatch, MATCH_TOL};
use rabi_core::closed_form::{uncoupled_spectrum, Branch};
use rabi_core::diagnostics::{residual_suite, series_residual, SeriesKind, RESIDUAL_THRESHOLD};
use rabi_core::fock::{oracle_spectrum_against, oracle_window, CONVERGENCE_STEP};
use rabi_core::heun::{che_params, g_function_heun, heun_poles, heun_spectrum_with, HeunScan};
use rabi_core::model::{operator_compose, CoeffMismatch, COEFF_MATCH_TOL};
use rabi_core::rootfind::{evaluate_grid, GFunctionSample};
use rabi_core::spectrum::{BranchAgreement, Level};
use rabi_core::{Error, Method, NormalizedParams, RootScanConfig, SpectrumResult};

use crate::config::{is_validation, CliError, MethodArg, RunConfig};
use crate::output::{format_float, Cell, Table};

/// Seed of the random draws in the diagnostic residual suite.
pub const SUITE_SEED: u64 = 2024;
pub const SUITE_DRAWS: usize = 20;
/// Perturbation injected by `--self-test`.
pub const SELF_TEST_CORRUPTION: f64 = 1e-3;
/// Reference for the oracle convergence deltas.
pub const ORACLE_DELTA_TOL: f64 = 1e-8;
pub const ORACLE_LEVELS: usize = 10;

pub struct Report {
    pub table: Table,
    pub exit_code: u8,
}

fn common_meta(t: &mut Table, command: &str, cfg: &RunConfig) {
    let p = &cfg.params;
    t.meta("command", Cell::text(command));
    t.meta("method", Cell::text(cfg.method.name()));
    t.meta("requested_method", Cell::text(format!("{:?}", cfg.requested).to_lowercase()));
    for (k, v) in [("omega", p.omega()), ("delta", p.delta()), ("eps", p.epsilon()), ("g", p.g()), ("lambda", p.lambda())] {
        t.meta(k, Cell::Float(v));
    }
    t.meta("emin", Cell::Float(cfg.e_min));
    t.meta("emax", Cell::Float(cfg.e_max));
    t.meta("grid", Cell::Float(cfg.grid));
    t.meta("zeta_star", Cell::Float(cfg.zeta_star));
    t.meta("k_branch", Cell::text(format!("{:?}", cfg.k_branch).to_lowercase()));
    t.meta("nmax", Cell::Int(cfg.nmax as i64));
    t.meta("fock_cutoff", Cell::Int(cfg.fock_cutoff as i64));
}

fn heun_scan(cfg: &RunConfig) -> HeunScan {
    HeunScan { zeta_star: cfg.zeta_star, primary: cfg.k_branch, ..HeunScan::default() }
}

fn level_flags(l: &Level) -> String {
    let mut parts: Vec<&str> = Vec::new();
    match l.agreement {
        Some(BranchAgreement::Both) => parts.push("both-branches"),
        Some(BranchAgreement::PrimaryOnly) => parts.push("primary-only"),
        Some(BranchAgreement::SecondaryOnly) => parts.push("secondary-only"),
        None => {}
    }
    if !l.tag.is_empty() {
        parts.push(&l.tag);
    }
    parts.join("|")
}

fn closed_levels(cfg: &RunConfig) -> Result<Vec<Level>, CliError> {
    let (plus, minus) = uncoupled_spectrum(&cfg.params, cfg.nmax)?;
    let mut levels: Vec<Level> = [plus, minus]
        .iter()
        .flat_map(|b| {
            let name = if b.branch == Branch::Plus { "plus" } else { "minus" };
            b.levels.iter().enumerate().map(move |(n, &e)| Level { tag: format!("branch={name} n={n}"), ..Level::new(e) })
        })
        .collect();
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(levels)
}

fn root_spectrum(cfg: &RunConfig) -> Result<SpectrumResult, CliError> {
    let p = &cfg.params;
    Ok(match cfg.method {
        Method::Heun => heun_spectrum_with(p, cfg.e_min, cfg.e_max, cfg.grid, &heun_scan(cfg))?,
        Method::Bcf => bcf_spectrum_at(p, cfg.e_min, cfg.e_max, cfg.grid, cfg.zeta_star)?,
        Method::Oracle | Method::Closed => unreachable!("handled by the caller"),
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = &cfg.params;
    let mut t = Table::new(if cfg.compare_oracle {
        vec!["index", "energy", "method", "error_vs_oracle", "flags"]
    } else {
        vec!["index", "energy", "method", "flags"]
    });
    common_meta(&mut t, "spectrum", cfg);
    let levels = match cfg.method {
        Method::Oracle => oracle_window(p, cfg.fock_cutoff, cfg.e_min, cfg.e_max)?.into_iter().map(Level::new).collect(),
        Method::Closed => closed_levels(cfg)?,
        Method::Heun | Method::Bcf => {
            let r = root_spectrum(cfg)?;
            if let Some(rep) = &r.report {
                t.meta("excluded_intervals", Cell::Int(rep.excluded.len() as i64));
                t.meta("suspect_brackets", Cell::Int(rep.suspects.len() as i64));
                t.meta("evaluations", Cell::Int(rep.evaluations as i64));
            }
            t.meta("judd_candidates", Cell::Int(r.judd.len() as i64));
            let mut all = r.levels;
            all.extend(r.judd.iter().map(|&e| Level { tag: "judd".into(), ..Level::new(e) }));
            all.sort_by(|a, b| a.energy.total_cmp(&b.energy));
            all
        }
    };
    let reference = if cfg.compare_oracle {
        let (lo, hi) = levels.iter().fold((cfg.e_min, cfg.e_max), |(lo, hi), l| (lo.min(l.energy), hi.max(l.energy)));
        let n = if cfg.method == Method::Oracle { cfg.fock_cutoff + CONVERGENCE_STEP * 2 } else { cfg.fock_cutoff };
        t.meta("oracle_cutoff", Cell::Int(n as i64));
        Some(oracle_window(p, n, lo - 1.0, hi + 1.0)?)
    } else {
        None
    };
    for (i, l) in levels.iter().enumerate() {
        let mut row = vec![Cell::Int(i as i64), Cell::Float(l.energy), Cell::text(cfg.method.name())];
        if let Some(r) = &reference {
            row.push(Cell::opt(r.iter().map(|x| (x - l.energy).abs()).min_by(f64::total_cmp)));
        }
        row.push(Cell::text(level_flags(l)));
        t.push(row);
    }
    Ok(Report { table: t, exit_code: 0 })
}

pub fn gscan(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.params;
    let method = match (cfg.requested, cfg.method) {
        (MethodArg::Auto, Method::Closed) => {
            if p.lambda() == 0.0 {
                Method::Heun
            } else {
                Method::Bcf
            }
        }
        (_, m @ (Method::Heun | Method::Bcf)) => m,
        (_, m) => return Err(CliError::Invalid(format!("gscan needs a determinant; method {} has none", m.name()))),
    };
    let cfg = RunConfig { method, ..cfg.clone() };
    let mut t = Table::new(vec!["index", "energy", "scaled_g", "scale_log", "flags"]);
    common_meta(&mut t, "gscan", &cfg);
    let (poles, samples): (Vec<f64>, Vec<GFunctionSample>) = match method {
        Method::Heun => {
            che_params(&p, cfg.e_min, cfg.k_branch)?;
            let poles = heun_poles(&p, cfg.e_min, cfg.e_max);
            let grid = RootScanConfig::new(cfg.e_min, cfg.e_max, cfg.grid).with_poles(poles.clone()).grid();
            let f = |e: f64| {
                g_function_heun(&p, e, cfg.zeta_star, cfg.k_branch).unwrap_or_else(|_| GFunctionSample::flagged(e, Default::default()))
            };
            (poles, evaluate_grid(&grid, &f))
        }
        _ => {
            let poles = bcf_poles(&p, cfg.e_min, cfg.e_max);
            let grid = RootScanConfig::new(cfg.e_min, cfg.e_max, cfg.grid).with_poles(poles.clone()).grid();
            let f = |e: f64| match g_function_bcf(&p, e, cfg.zeta_star) {
                Ok(s) => s,
                Err(_) => {
                    let mut s = GFunctionSample::flagged(e, Default::default());
                    s.flags.complex_singularity = true;
                    s
                }
            };
            (poles, evaluate_grid(&grid, &f))
        }
    };
    t.meta("poles", Cell::text(poles.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(" ")));
    for (i, s) in samples.iter().enumerate() {
        let usable = s.usable();
        t.push(vec![
            Cell::Int(i as i64),
            Cell::Float(s.energy),
            if usable { Cell::Float(s.value) } else { Cell::Empty },
            if usable { Cell::Float(s.scale_log) } else { Cell::Empty },
            Cell::text(s.flags.label()),
        ]);
    }
    Ok(Report { table: t, exit_code: 0 })
}

fn diag_row(t: &mut Table, section: &str, name: &str, detail: String, value: Cell, threshold: Cell, passed: bool) {
    t.push(vec![Cell::text(section), Cell::text(name), Cell::text(detail), value, threshold, Cell::Bool(passed)]);
}

fn skipped(t: &mut Table, section: &str, name: &str, why: &Error) {
    diag_row(t, section, name, format!("skipped: {why}"), Cell::Empty, Cell::Empty, true);
}

fn composition_rows(t: &mut Table, scope: &str, mismatches: &[CoeffMismatch]) {
    for m in mismatches {
        diag_row(
            t,
            "composition",
            &format!("{scope}{}/{}", m.table, m.name),
            format!("printed {} composed {}", format_float(m.printed), format_float(m.composed)),
            Cell::Float(m.composed - m.printed),
            Cell::Float(COEFF_MATCH_TOL),
            false,
        );
    }
}

fn formula_rows(t: &mut Table, mismatches: &[FormulaMismatch]) {
    for m in mismatches {
        diag_row(
            t,
            "canonical",
            &format!("{}/{}", m.table, m.name),
            format!("printed {} derived {}", format_float(m.printed), format_float(m.derived)),
            Cell::Float(m.derived - m.printed),
            Cell::Float(MATCH_TOL),
            false,
        );
    }
}

pub fn diagnose(cfg: &RunConfig, self_test: bool) -> Result<Report, CliError> {
    let p = cfg.params;
    let energy = 0.5 * (cfg.e_min + cfg.e_max);
    let corruption = if self_test { SELF_TEST_CORRUPTION } else { 0.0 };
    let mut t = Table::new(vec!["section", "name", "detail", "value", "threshold", "passed"]);
    common_meta(&mut t, "diagnose", cfg);
    t.meta("energy", Cell::Float(energy));
    t.meta("self_test", Cell::Bool(self_test));

    for e in audit_all()? {
        let detail = if e.printed_matches {
            "tabulated weights match".to_string()
        } else {
            format!("tabulated weights differ at back-shifts {:?}", e.mismatched_shifts)
        };
        let detail = format!("{detail}; closed-form derivation {}", if e.derived_matches { "matches" } else { "differs" });
        diag_row(&mut t, "audit", e.name, detail, Cell::Float(e.max_discrepancy), Cell::Float(AUDIT_TOL), e.printed_matches);
    }

    for (scope, q) in [("", p), ("g=0 ", p.with_g(0.0))] {
        match operator_compose(&q, energy) {
            Ok(c) => composition_rows(&mut t, scope, &c.mismatches),
            Err(e) if is_validation(&e) => skipped(&mut t, "composition", "coefficient tables", &e),
            Err(e) => return Err(e.into()),
        }
    }

    match NormalizedParams::new(&p, energy).and_then(|np| canonical_coeffs(&np)) {
        Ok(cc) => {
            formula_rows(&mut t, &cc.mismatches);
            formula_rows(&mut t, &normal_form_mismatches(&cc));
            diag_row(
                &mut t,
                "canonical",
                "partial-fraction reconstruction",
                "largest deviation at the test points".into(),
                Cell::Float(cc.reconstruction_error),
                Cell::Float(1e-10),
                cc.reconstruction_error <= 1e-10,
            );
        }
        Err(e) if is_validation(&e) => skipped(&mut t, "canonical", "canonical form", &e),
        Err(e) => return Err(e.into()),
    }
    match NormalizedParams::new(&p.with_g(0.0), energy).and_then(|np| bch_params_g0(&np)) {
        Ok(b) => formula_rows(&mut t, &bch_mismatches(&b)),
        Err(e) if is_validation(&e) => skipped(&mut t, "canonical", "biconfluent Heun reduction", &e),
        Err(e) => return Err(e.into()),
    }

    let mut residual_failed = false;
    for kind in SeriesKind::ALL {
        for offset in [-1.0, 1.0] {
            match series_residual(kind, &p, energy, offset, corruption) {
                Ok(r) => {
                    let ok = r.residual < RESIDUAL_THRESHOLD;
                    residual_failed |= !ok;
                    diag_row(
                        &mut t,
                        "residual",
                        kind.name(),
                        format!("x = {}", format_float(r.x)),
                        Cell::Float(r.residual),
                        Cell::Float(RESIDUAL_THRESHOLD),
                        ok,
                    );
                }
                Err(e) if is_validation(&e) => skipped(&mut t, "residual", kind.name(), &e),
                Err(e) => {
                    residual_failed = true;
                    diag_row(&mut t, "residual", kind.name(), format!("failed: {e}"), Cell::Empty, Cell::Float(RESIDUAL_THRESHOLD), false);
                }
            }
        }
    }
    for s in residual_suite(SUITE_SEED, SUITE_DRAWS, corruption)? {
        residual_failed |= !s.passed;
        diag_row(
            &mut t,
            "residual-suite",
            s.name,
            format!("worst of {} random draws", s.samples),
            Cell::Float(s.max_residual),
            Cell::Float(s.threshold),
            s.passed,
        );
    }

    let reference = cfg.fock_cutoff + 2 * CONVERGENCE_STEP;
    let oracle = oracle_spectrum_against(&p, cfg.fock_cutoff, ORACLE_LEVELS, reference)?;
    for (k, (e, d)) in oracle.eigenvalues.iter().zip(&oracle.deltas).enumerate() {
        diag_row(
            &mut t,
            "oracle",
            &format!("E_{k}"),
            format!("E = {} at cutoff {}, reference cutoff {reference}", format_float(*e), cfg.fock_cutoff),
            Cell::Float(*d),
            Cell::Float(ORACLE_DELTA_TOL),
            *d <= ORACLE_DELTA_TOL,
        );
    }
    t.meta("residuals_passed", Cell::Bool(!residual_failed));
    Ok(Report { table: t, exit_code: if residual_failed { 3 } else { 0 } })
}
