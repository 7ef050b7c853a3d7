//! Physical evolution of the register through a compiled pulse program.
//!
//! Each pulse is simulated in its own rotating frame; free intervals use the
//! full static Hamiltonian. Diagonal energies are split into a part that is
//! an integer multiple of the divisor `D` and a dipolar remainder, so the
//! phases of commensurate intervals are evaluated exactly.

use std::f64::consts::TAU;
use std::sync::Arc;

use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::DdiConstants;
use crate::compiler::{PulseEvent, PulseKind, PulseProgram, SpinSystemConfig};
use crate::error::{Error, Result};
use crate::spin::spin1_matrices;
use crate::tensor::{
    c64, dimension, expm_hermitian, level_of, projections, CacheKey, CacheStats, DenseHermitian, Op3,
    QutritState, Unitary, UnitaryCache,
};

/// Adds `op` acting on `site` to a dense matrix.
fn add_site_operator(mat: &mut Mat<c64>, op: &Op3, site: usize, sites: usize) {
    let stride = dimension(sites - site);
    for k in 0..dimension(sites) {
        let a = (k / stride) % 3;
        let base = k - a * stride;
        for (b, row) in op.iter().enumerate() {
            let v = row[a];
            if v != c64::new(0.0, 0.0) {
                mat[(base + b * stride, k)] += v;
            }
        }
    }
}

/// `h (S^x cos φ - S^y sin φ)` for one spin.
fn drive_operator(amplitude: f64, phase: f64) -> Op3 {
    let (sx, sy, _) = spin1_matrices();
    let (s, c) = phase.sin_cos();
    let mut op = [[c64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            op[i][j] = (sx[i][j] * c - sy[i][j] * s) * amplitude;
        }
    }
    op
}

/// Per-site diagonal energies `[m = 1, 0, -1]` summed into the register.
fn site_sum_diagonal(sites: usize, per_site: impl Fn(usize) -> [f64; 3]) -> Vec<f64> {
    let tables: Vec<[f64; 3]> = (1..=sites).map(per_site).collect();
    (0..dimension(sites))
        .map(|k| {
            projections(k, sites)
                .iter()
                .zip(&tables)
                .map(|(&m, t)| t[level_of(m)])
                .sum()
        })
        .collect()
}

/// Zeeman and quadrupole energies of each basis state.
fn lattice_energies(config: &SpinSystemConfig, sites: usize) -> Vec<f64> {
    site_sum_diagonal(sites, |j| {
        let (w, q) = (config.larmor[j - 1], config.quadrupole[j - 1]);
        [-w + q, -2.0 * q, w + q]
    })
}

/// `H₅ = -Σ ω_j S_j^z + Σ Q_j (3(S_j^z)² - 2) + Σ J_ij S_i^z S_j^z`.
pub fn free_hamiltonian(config: &SpinSystemConfig, ddi: &DdiConstants) -> DenseHermitian {
    let lattice = lattice_energies(config, ddi.sites());
    let dd = ddi.hamiltonian_diagonal();
    let diag: Vec<f64> = lattice.iter().zip(&dd).map(|(a, b)| a + b).collect();
    DenseHermitian::from_diagonal(&diag)
}

/// Rotating-frame Hamiltonian of a single-tone pulse; the drive reaches
/// every spin.
pub fn pulse_hamiltonian(event: &PulseEvent, config: &SpinSystemConfig, ddi: &DdiConstants) -> Result<DenseHermitian> {
    let [w_rf] = event.frequencies[..] else {
        return Err(Error::InvalidSpinConfig("single-tone pulse needs exactly one frequency".into()));
    };
    let sites = ddi.sites();
    let mut diag = site_sum_diagonal(sites, |j| {
        let (w, q) = (config.larmor[j - 1], config.quadrupole[j - 1]);
        let d = w - w_rf;
        [-d + q, -2.0 * q, d + q]
    });
    for (e, dd) in diag.iter_mut().zip(ddi.hamiltonian_diagonal()) {
        *e += dd;
    }
    Ok(with_global_drive(&diag, sites, event))
}

/// Generalized rotating-frame Hamiltonian of a two-tone pulse at frequencies
/// `(ω₁, ω₂)`, resonant with both transitions of the driven spin.
pub fn two_tone_hamiltonian(event: &PulseEvent, config: &SpinSystemConfig, ddi: &DdiConstants) -> Result<DenseHermitian> {
    let [w1, w2] = event.frequencies[..] else {
        return Err(Error::InvalidSpinConfig("two-tone pulse needs exactly two frequencies".into()));
    };
    let sites = ddi.sites();
    let mut diag = site_sum_diagonal(sites, |j| {
        let (w, q) = (config.larmor[j - 1], config.quadrupole[j - 1]);
        [-(w - w1) + q, -2.0 * q, -(-w + w2) + q]
    });
    for (e, dd) in diag.iter_mut().zip(ddi.hamiltonian_diagonal()) {
        *e += dd;
    }
    Ok(with_global_drive(&diag, sites, event))
}

fn with_global_drive(diag: &[f64], sites: usize, event: &PulseEvent) -> DenseHermitian {
    let n = diag.len();
    let mut mat = Mat::<c64>::from_fn(n, n, |i, j| if i == j { c64::new(diag[i], 0.0) } else { c64::new(0.0, 0.0) });
    if event.amplitude != 0.0 {
        let op = drive_operator(event.amplitude, event.phase);
        for site in 1..=sites {
            add_site_operator(&mut mat, &op, site, sites);
        }
    }
    DenseHermitian::from_matrix_unchecked(mat)
}

/// `exp(-i t H)` of a single- or two-tone event.
fn build_pulse(event: &PulseEvent, config: &SpinSystemConfig, ddi: &DdiConstants) -> Result<Unitary> {
    let h = match event.kind {
        PulseKind::SingleTone => pulse_hamiltonian(event, config, ddi)?,
        PulseKind::TwoTone => two_tone_hamiltonian(event, config, ddi)?,
        PulseKind::Free => {
            return Err(Error::InvalidSpinConfig("free intervals have no drive Hamiltonian".into()))
        }
    };
    expm_hermitian(&h, event.duration)
}

/// Where the run stopped and what it saw along the way.
#[derive(Debug, Clone, Serialize)]
pub struct StepSnapshot {
    pub index: usize,
    pub fidelity: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Stop after this many program steps.
    pub max_steps: Option<usize>,
    /// Record the target probability after every step.
    pub snapshot_target: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: QutritState,
    pub steps_run: usize,
    pub truncated: bool,
    pub events_applied: usize,
    pub norm_drift: f64,
    pub cache: CacheStats,
    pub snapshots: Vec<StepSnapshot>,
}

/// Evolves states under compiled pulse programs for one spin system.
pub struct Simulator {
    config: SpinSystemConfig,
    ddi: DdiConstants,
    /// Zeeman and quadrupole energies in units of `D`.
    lattice_units: Vec<f64>,
    dipolar: Vec<f64>,
    cache: UnitaryCache,
}

impl Simulator {
    pub fn new(config: SpinSystemConfig, ddi: DdiConstants) -> Result<Self> {
        config.validate()?;
        if ddi.sites() > config.sites() {
            return Err(Error::InvalidSpinConfig(format!(
                "{} active spins but only {} configured",
                ddi.sites(),
                config.sites()
            )));
        }
        let lattice_units = lattice_energies(&config, ddi.sites())
            .into_iter()
            .map(|e| e / config.divisor)
            .collect();
        let dipolar = ddi.hamiltonian_diagonal();
        Ok(Self {
            config,
            ddi,
            lattice_units,
            dipolar,
            cache: UnitaryCache::new(),
        })
    }

    /// Rebuilds every cache hit and fails on any mismatch.
    pub fn with_cache_verification(mut self, verify: bool) -> Self {
        self.cache = UnitaryCache::with_verification(verify);
        self
    }

    pub fn config(&self) -> &SpinSystemConfig {
        &self.config
    }

    pub fn sites(&self) -> usize {
        self.ddi.sites()
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.cache.stats()
    }

    /// Phases of `exp(-i t H₅)` for an interval of `cycles` units of `2π/D`.
    pub fn free_phases(&self, cycles: u64) -> Vec<f64> {
        let t = self.config.duration_of(cycles);
        self.lattice_units
            .iter()
            .zip(&self.dipolar)
            .map(|(&units, &dd)| TAU * (units * cycles as f64).rem_euclid(1.0) + dd * t)
            .collect()
    }

    fn cache_key(event: &PulseEvent) -> CacheKey {
        let tag = match event.kind {
            PulseKind::SingleTone => "single",
            PulseKind::TwoTone => "two-tone",
            PulseKind::Free => "free",
        };
        let mut params = event.frequencies.clone();
        params.extend([event.amplitude, event.duration, event.phase]);
        CacheKey::new(tag, &params)
    }

    /// The unitary of a pulse event, cached on its physical parameters.
    pub fn pulse_unitary(&mut self, event: &PulseEvent) -> Result<Arc<Unitary>> {
        if event.kind == PulseKind::Free {
            return Ok(Arc::new(Unitary::from_phases(&self.free_phases(event.cycles))));
        }
        let (config, ddi) = (&self.config, &self.ddi);
        self.cache
            .get_or_build(Self::cache_key(event), || build_pulse(event, config, ddi))
    }

    /// Builds the missing unitaries of `events` in parallel.
    fn prefetch(&mut self, events: &[PulseEvent]) -> Result<()> {
        let mut pending: Vec<(CacheKey, &PulseEvent)> = Vec::new();
        for e in events.iter().filter(|e| e.kind != PulseKind::Free) {
            let key = Self::cache_key(e);
            if !self.cache.contains(&key) && !pending.iter().any(|(k, _)| *k == key) {
                pending.push((key, e));
            }
        }
        let (config, ddi) = (&self.config, &self.ddi);
        let built = pending
            .into_par_iter()
            .map(|(key, e)| Ok((key, build_pulse(e, config, ddi)?)))
            .collect::<Result<Vec<_>>>()?;
        for (key, u) in built {
            self.cache.prefetch(key, u);
        }
        Ok(())
    }

    pub fn apply_event(&mut self, state: &mut QutritState, event: &PulseEvent) -> Result<()> {
        if event.kind == PulseKind::Free {
            return state.apply_phases(&self.free_phases(event.cycles));
        }
        let u = self.pulse_unitary(event)?;
        state.apply_unitary(&u)
    }

    /// Applies the program's events in order, step by step.
    pub fn run(&mut self, initial: &QutritState, program: &PulseProgram, options: RunOptions) -> Result<RunOutcome> {
        if initial.dim() != dimension(self.sites()) {
            return Err(Error::DimensionMismatch {
                expected: dimension(self.sites()),
                actual: initial.dim(),
            });
        }
        let mut state = initial.clone();
        let limit = options.max_steps.unwrap_or(usize::MAX).min(program.steps.len());
        let mut events_applied = 0;
        let mut norm_drift = 0.0f64;
        let mut snapshots = Vec::new();
        for step in &program.steps[..limit] {
            self.prefetch(&step.events)?;
            for event in &step.events {
                self.apply_event(&mut state, event)?;
                events_applied += 1;
            }
            // Parameters that did not recur within the step are dropped.
            self.cache.advance_generation(1);
            let norm = state.norm();
            norm_drift = norm_drift.max((norm - 1.0).abs());
            if let Some(target) = options.snapshot_target {
                snapshots.push(StepSnapshot {
                    index: step.index,
                    fidelity: state.amplitudes()[target].norm_sqr(),
                    norm,
                });
            }
        }
        Ok(RunOutcome {
            state,
            steps_run: limit,
            truncated: limit < program.steps.len(),
            events_applied,
            norm_drift,
            cache: self.cache.stats(),
            snapshots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{ddi_constants, ClusteringInstance};
    use crate::compiler::{compile_rotation, compile_two_tone};
    use crate::spin::{SelectiveRotation, Transition};
    use crate::tensor::basis_index;
    use std::f64::consts::PI;

    fn setup(epsilon: f64) -> Simulator {
        let ddi = ddi_constants(&ClusteringInstance::example(), epsilon).unwrap();
        Simulator::new(SpinSystemConfig::default(), ddi).unwrap()
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let ddi = ddi_constants(&ClusteringInstance::example(), 1e-6).unwrap();
        let h = free_hamiltonian(&SpinSystemConfig::default(), &ddi);
        assert_eq!(h.off_diagonal_max(), 0.0);
        let zero = basis_index(&[0; 5]);
        assert_eq!(h.matrix()[(zero, zero)].re, -170000.0);
    }

    #[test]
    fn resonance_of_single_tone_frame() {
        let c = SpinSystemConfig::default();
        let ddi = ddi_constants(&ClusteringInstance::example(), 0.0).unwrap();
        let event = PulseEvent {
            kind: PulseKind::SingleTone,
            frequencies: vec![c.transition_frequency(1, Transition::Upper).unwrap()],
            amplitude: 0.0,
            duration: 1.0,
            phase: 0.0,
            cycles: 0,
        };
        let h = pulse_hamiltonian(&event, &c, &ddi).unwrap();
        let e = |m: i8| h.matrix()[(basis_index(&[m, 0, 0, 0, 0]), basis_index(&[m, 0, 0, 0, 0]))].re;
        assert_eq!(e(1) - e(0), 0.0);
        assert_eq!(e(0) - e(-1), -6.0 * 15000.0);
        assert_eq!(h.off_diagonal_max(), 0.0);
    }

    #[test]
    fn two_tone_frame_flattens_driven_site() {
        let c = SpinSystemConfig::default();
        let ddi = ddi_constants(&ClusteringInstance::example(), 0.0).unwrap();
        let event = compile_two_tone(3, 0.1, &c).unwrap().unwrap();
        let h = two_tone_hamiltonian(&event, &c, &ddi).unwrap();
        let e = |m: i8| h.matrix()[(basis_index(&[0, 0, m, 0, 0]), basis_index(&[0, 0, m, 0, 0]))].re;
        assert_eq!(e(1), e(0));
        assert_eq!(e(0), e(-1));
    }

    #[test]
    fn commensurate_free_interval_is_trivial() {
        let sim = setup(0.0);
        let phases = sim.free_phases(4158 * 7);
        assert!(phases.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn free_phases_match_direct_exponent() {
        let sim = setup(1e-6);
        let h = free_hamiltonian(sim.config(), &sim.ddi);
        let cycles = 3;
        let t = sim.config().duration_of(cycles);
        let direct = Unitary::from_phases(&h.matrix().diagonal().column_vector().iter().map(|e| e.re * t).collect::<Vec<_>>());
        let split = Unitary::from_phases(&sim.free_phases(cycles));
        assert!(direct.distance(&split) < 1e-9);
    }

    #[test]
    fn pulse_then_inverse_restores_state() {
        let mut sim = setup(1e-6);
        let c = SpinSystemConfig::default();
        let fwd = compile_rotation(&SelectiveRotation::y(PI, 2, Transition::Lower), &c).unwrap().unwrap();
        let back = compile_rotation(&SelectiveRotation::y(-PI, 2, Transition::Lower), &c).unwrap().unwrap();
        let psi = crate::clustering::initial_state(5);
        let mut state = psi.clone();
        sim.apply_event(&mut state, &fwd).unwrap();
        sim.apply_event(&mut state, &back).unwrap();
        // Off-resonant transitions see the same detuning with a flipped drive,
        // so the round trip is exact only to second order in h / gap.
        let overlap = state.inner(&psi).norm();
        assert!(overlap > 1.0 - 1e-7, "overlap {overlap}");
    }

    #[test]
    fn empty_program_leaves_state() {
        let mut sim = setup(1e-6);
        let program = PulseProgram::parse("# divisor = 100\n").unwrap();
        let psi = crate::clustering::initial_state(5);
        let out = sim.run(&psi, &program, RunOptions::default()).unwrap();
        assert_eq!(out.state, psi);
        assert!(!out.truncated);
    }
}
