//! Discrete-time adiabatic evolution with symmetric operator splitting.

use serde::{Deserialize, Serialize};

use crate::clustering::{build_target_hamiltonian, initial_state, ClusteringInstance, DiagonalHamiltonian};
use crate::error::{Error, Result};
use crate::spin::spin1_matrices;
use crate::tensor::{c64, expm_hermitian, op3_identity, DenseHermitian, Op3, QutritState, Unitary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    /// Number of steps; step indices run 0..=steps.
    pub steps: usize,
    pub dt: f64,
    /// Transverse field strength.
    pub h: f64,
}

impl AnnealSchedule {
    pub fn new(steps: usize, dt: f64, h: f64) -> Result<Self> {
        let s = Self { steps, dt, h };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidSchedule("step count must be at least 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidSchedule(format!("step duration must be > 0, got {}", self.dt)));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidSchedule(format!("transverse field must be > 0, got {}", self.h)));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }

    fn check_step(&self, l: usize) -> Result<()> {
        if l > self.steps {
            return Err(Error::InvalidSchedule(format!(
                "step {l} outside 0..={}",
                self.steps
            )));
        }
        Ok(())
    }

    /// `Δt_l = (l/N) Δt`, the weight of the target Hamiltonian at step `l`.
    pub fn target_time(&self, l: usize) -> f64 {
        self.dt * l as f64 / self.steps as f64
    }

    /// `(Δt - Δt_l) / 2`, the duration of each transverse half-step.
    pub fn half_time(&self, l: usize) -> f64 {
        0.5 * (self.dt - self.target_time(l))
    }

    /// `Ω₂ = (1 - l/N) h Δt / 2`.
    pub fn half_angle(&self, l: usize) -> f64 {
        self.h * self.half_time(l)
    }
}

/// `exp(-iθ S^x)` for one spin, in closed form.
pub fn sx_rotation(theta: f64) -> Op3 {
    let (sx, _, _) = spin1_matrices();
    let (s, c) = theta.sin_cos();
    let mut out = op3_identity();
    for i in 0..3 {
        for j in 0..3 {
            let sx2: c64 = (0..3).map(|k| sx[i][k] * sx[k][j]).sum();
            out[i][j] += sx[i][j] * c64::new(0.0, -s) + sx2 * (c - 1.0);
        }
    }
    out
}

/// The full matrix of step `l`: half H_0, then H_f, then half H_0.
pub fn step_unitary(
    l: usize,
    schedule: &AnnealSchedule,
    h0: &DenseHermitian,
    hf: &DiagonalHamiltonian,
) -> Result<Unitary> {
    schedule.check_step(l)?;
    if h0.dim() != hf.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            actual: hf.dim(),
        });
    }
    let half = expm_hermitian(h0, schedule.half_time(l))?;
    let mut u = half.clone();
    u.apply_phases(&hf.phases(schedule.target_time(l)));
    Ok(half.then_after(&u))
}

/// Applies step `l` to `state` without forming any 3^n × 3^n matrix.
pub fn apply_step(
    state: &mut QutritState,
    l: usize,
    schedule: &AnnealSchedule,
    hf: &DiagonalHamiltonian,
) -> Result<()> {
    schedule.check_step(l)?;
    // exp(-i τ (-h Σ S^x)) factorizes over sites.
    let drive = sx_rotation(-schedule.half_angle(l));
    let sites = state.sites();
    for site in 1..=sites {
        state.apply_site_op(&drive, site)?;
    }
    state.apply_phases(&hf.phases(schedule.target_time(l)))?;
    for site in 1..=sites {
        state.apply_site_op(&drive, site)?;
    }
    Ok(())
}

/// Evolves the transverse-field ground state through steps `0..=N`.
pub fn anneal(schedule: &AnnealSchedule, instance: &ClusteringInstance) -> Result<QutritState> {
    schedule.validate()?;
    let hf = build_target_hamiltonian(instance);
    anneal_with(schedule, &hf, instance.sites())
}

/// As [`anneal`], for an already built target diagonal.
pub fn anneal_with(schedule: &AnnealSchedule, hf: &DiagonalHamiltonian, sites: usize) -> Result<QutritState> {
    let mut state = initial_state(sites);
    if hf.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            actual: hf.dim(),
        });
    }
    for l in 0..=schedule.steps {
        apply_step(&mut state, l, schedule, hf)?;
    }
    Ok(state)
}

/// `|<target|ψ>|²`.
pub fn fidelity(state: &QutritState, target: usize) -> Result<f64> {
    state
        .amplitudes()
        .get(target)
        .map(|a| a.norm_sqr())
        .ok_or(Error::DimensionMismatch {
            expected: state.dim(),
            actual: target,
        })
}

/// Measurement probabilities in the computational basis.
pub fn outcome_distribution(state: &QutritState) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}
