use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qutrit_core::anneal::{apply_step, AnnealSchedule};
use qutrit_core::clustering::{
    build_initial_hamiltonian, build_target_hamiltonian, ddi_constants, initial_state, ClusteringInstance,
};
use qutrit_core::compiler::{compile_program, SpinSystemConfig};
use qutrit_core::sequencer::build_program;
use qutrit_core::simulator::Simulator;
use qutrit_core::tensor::expm_hermitian;

fn expm(c: &mut Criterion) {
    let h0 = build_initial_hamiltonian(6.5, 5).unwrap();
    c.bench_function("expm_243", |b| b.iter(|| expm_hermitian(black_box(&h0), 0.013).unwrap()));
}

fn ideal_step(c: &mut Criterion) {
    let inst = ClusteringInstance::example();
    let hf = build_target_hamiltonian(&inst);
    let s = AnnealSchedule::new(201, 0.05252, 6.5).unwrap();
    let psi = initial_state(5);
    c.bench_function("ideal_step", |b| {
        b.iter(|| {
            let mut state = psi.clone();
            apply_step(&mut state, black_box(100), &s, &hf).unwrap();
            state
        })
    });
}

fn pulse_step(c: &mut Criterion) {
    let inst = ClusteringInstance::example();
    let cfg = SpinSystemConfig::default();
    let s = AnnealSchedule::new(11, 0.05252, 6.5).unwrap();
    let ddi = ddi_constants(&inst, 1e-6).unwrap();
    let program = build_program(&inst, &s, &ddi).unwrap();
    let pulses = compile_program(&program, &cfg, &s, 1e-6, "bench").unwrap();
    let step = &pulses.steps[5];
    let mut sim = Simulator::new(cfg, ddi).unwrap();
    let psi = initial_state(5);
    // Warm the unitary cache so the loop measures application only.
    let mut warm = psi.clone();
    for e in &step.events {
        sim.apply_event(&mut warm, e).unwrap();
    }
    let mut group = c.benchmark_group("pulse");
    group.sample_size(10);
    group.bench_function("pulse_step_cached", |b| {
        b.iter(|| {
            let mut state = psi.clone();
            for e in &step.events {
                sim.apply_event(&mut state, e).unwrap();
            }
            state
        })
    });
    group.finish();
}

criterion_group!(benches, expm, ideal_step, pulse_step);
criterion_main!(benches);
