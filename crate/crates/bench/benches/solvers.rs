use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rabi_core::bcf::{bcf_spectrum, g_function_bcf};
use rabi_core::fock::oracle_spectrum;
use rabi_core::heun::{g_function_heun, heun_spectrum, KBranch};
use rabi_core::model::operator_compose;
use rabi_core::{ode_to_recurrence, series_eval, ModelParams};

fn asymmetric() -> ModelParams {
    ModelParams::new(1.0, 0.4, 0.15, 0.6, 0.0).unwrap()
}

fn general() -> ModelParams {
    ModelParams::new(1.0, 0.3, 0.0, 0.05, 0.02).unwrap()
}

fn determinants(c: &mut Criterion) {
    c.bench_function("g_function_heun", |b| b.iter(|| g_function_heun(&asymmetric(), black_box(0.3), 0.5, KBranch::Minus)));
    c.bench_function("g_function_bcf", |b| b.iter(|| g_function_bcf(&general(), black_box(0.3), 0.5)));
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectra");
    g.sample_size(10);
    g.bench_function("heun_spectrum", |b| b.iter(|| heun_spectrum(&asymmetric(), -1.0, 4.0, 0.05)));
    g.bench_function("bcf_spectrum", |b| b.iter(|| bcf_spectrum(&general(), -1.0, 3.0, 0.05)));
    g.bench_function("oracle_n120", |b| b.iter(|| oracle_spectrum(&asymmetric(), 120, 10)));
    g.finish();
}

fn series(c: &mut Criterion) {
    let p = ModelParams::new(1.0, 0.3, 0.1, 0.2, 0.1).unwrap();
    let rec = ode_to_recurrence(&operator_compose(&p, 0.4).unwrap().composed.to_ode(0.0)).unwrap();
    c.bench_function("nine_term_series", |b| b.iter(|| series_eval(&rec, black_box(0.5), 2000, 1e-14)));
}

criterion_group!(benches, determinants, spectra, series);
criterion_main!(benches);
