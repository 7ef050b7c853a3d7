//! Gate-level expansion of each annealing step.
//!
//! Every instruction list here is in time order. The target Hamiltonian is
//! split into a constant, field terms per site and pair terms; pair terms use
//! free evolution under the dipolar coupling with refocusing inversions on
//! the spectator spins.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::anneal::{sx_rotation, AnnealSchedule};
use crate::clustering::{ClusteringInstance, DdiConstants, TargetTerms};
use crate::error::{Error, Result};
use crate::spin::{composite_z, inversion_pair, rotation_matrix, SelectiveRotation, Transition};
use crate::tensor::{c64, dimension, QutritState, Unitary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Instruction {
    Rotation(SelectiveRotation),
    /// Ideal effect `exp(-i angle S^x)` on one site, driven on both
    /// transitions at once. The angle carries the sign of the rotation.
    TwoToneDrive { site: usize, angle: f64 },
    /// Free evolution under the dipolar coupling for `duration`.
    FreeEvolution { duration: f64 },
    /// Multiplies the state by `exp(-i θ)`.
    GlobalPhase(f64),
}

impl Instruction {
    pub fn is_pulse(&self) -> bool {
        matches!(self, Instruction::Rotation(_) | Instruction::TwoToneDrive { .. })
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Rotation(r) => write!(
                f,
                "ROT {} {:.16e} {} {}",
                r.axis, r.angle, r.site, r.transition
            ),
            Instruction::TwoToneDrive { site, angle } => write!(f, "DRIVE {site} {angle:.16e}"),
            Instruction::FreeEvolution { duration } => write!(f, "FREE {duration:.16e}"),
            Instruction::GlobalPhase(theta) => write!(f, "PHASE {theta:.16e}"),
        }
    }
}

fn rotations(seq: impl IntoIterator<Item = SelectiveRotation>) -> impl Iterator<Item = Instruction> {
    seq.into_iter().map(Instruction::Rotation)
}

/// `exp(-iΩ S^z)` as two composite z rotations.
pub fn expand_linear_term(site: usize, omega: f64) -> Vec<Instruction> {
    rotations(composite_z(2.0 * omega, site, Transition::Upper))
        .chain(rotations(composite_z(2.0 * omega, site, Transition::Lower)))
        .collect()
}

/// `exp(-i3φ (S^z)²)` as two composite z rotations and a global phase.
pub fn expand_quadratic_term(site: usize, phi: f64) -> Vec<Instruction> {
    rotations(composite_z(2.0 * phi, site, Transition::Upper))
        .chain(rotations(composite_z(-2.0 * phi, site, Transition::Lower)))
        .chain([Instruction::GlobalPhase(2.0 * phi)])
        .collect()
}

/// Largest number of spectator spins the eight-interval pattern can decouple.
pub const MAX_SPECTATORS: usize = 7;

/// Walsh codes for the spectators, fastest first.
const WALSH_CODES: [usize; MAX_SPECTATORS] = [1, 2, 4, 3, 5, 6, 7];

/// Whether spectator `rank` is inverted during interval `t` (0..8).
fn inverted(rank: usize, t: usize) -> bool {
    let code = WALSH_CODES[rank];
    let parity = (t & code).count_ones() % 2 == 1;
    // Only the slower single-bit patterns start inverted; the choice keeps
    // the fastest spin toggling inside the others.
    if rank > 0 && code.is_power_of_two() {
        !parity
    } else {
        parity
    }
}

fn check_pair(a: usize, b: usize, sites: usize) -> Result<()> {
    if a == b || a == 0 || b == 0 || a > sites || b > sites {
        return Err(Error::InactivePair(a, b));
    }
    Ok(())
}

/// Eight free intervals of length `interval` with inversions on every spin
/// outside the pair `(a, b)`, leaving `exp(-i 8 interval J_ab S_a S_b)`.
pub fn refocusing_block(a: usize, b: usize, interval: f64, sites: usize) -> Result<Vec<Instruction>> {
    check_pair(a, b, sites)?;
    if !(interval.is_finite() && interval > 0.0) {
        return Err(Error::InvalidSchedule(format!(
            "free-evolution interval must be positive, got {interval}"
        )));
    }
    let spectators: Vec<usize> = (1..=sites).filter(|&k| k != a && k != b).collect();
    if spectators.len() > MAX_SPECTATORS {
        return Err(Error::InvalidInstance(format!(
            "refocusing supports at most {} active spins",
            MAX_SPECTATORS + 2
        )));
    }
    let mut state = vec![false; spectators.len()];
    let mut out = Vec::new();
    let mut move_to = |want: &dyn Fn(usize) -> bool, out: &mut Vec<Instruction>| {
        for (rank, &k) in spectators.iter().enumerate() {
            if state[rank] && !want(rank) {
                out.extend(rotations(inversion_pair(k).1));
                state[rank] = false;
            }
        }
        for (rank, &k) in spectators.iter().enumerate().rev() {
            if !state[rank] && want(rank) {
                out.extend(rotations(inversion_pair(k).0));
                state[rank] = true;
            }
        }
    };
    for t in 0..8 {
        move_to(&|rank| inverted(rank, t), &mut out);
        out.push(Instruction::FreeEvolution { duration: interval });
    }
    move_to(&|_| false, &mut out);
    Ok(out)
}

/// Interval that makes eight refocused periods accumulate `Δt_l R_ij / 3`.
fn pair_interval(i: usize, j: usize, dt_l: f64, r: f64, ddi: &DdiConstants) -> Result<f64> {
    let jij = ddi.coupling(i, j);
    if jij == 0.0 {
        return Err(Error::InvalidSpinConfig(format!(
            "pair ({i}, {j}) has zero dipolar coupling"
        )));
    }
    Ok(dt_l * r / (24.0 * jij))
}

/// `exp(-i3Δt_l R_ij (S_i^z)²(S_j^z)²)` as a sandwich of z blocks,
/// π inversions and four refocused `exp(-iΔt_l R_ij S_i^z S_j^z / 3)` factors.
pub fn expand_pair_term(
    i: usize,
    j: usize,
    dt_l: f64,
    r: f64,
    ddi: &DdiConstants,
) -> Result<Vec<Instruction>> {
    let sites = ddi.sites();
    check_pair(i, j, sites)?;
    let zz = refocusing_block(i, j, pair_interval(i, j, dt_l, r, ddi)?, sites)?;
    let w = 4.0 * dt_l * r / 3.0;
    use Transition::{Lower, Upper};

    enum Op {
        Z(usize, f64, Transition),
        Y(usize, f64, Transition),
        Phase(f64),
        Coupling,
    }
    // Operator order, leftmost acts last.
    let sandwich = [
        Op::Z(i, w, Upper),
        Op::Z(i, -w, Lower),
        Op::Phase(w),
        Op::Y(j, -PI, Lower),
        Op::Z(j, w, Upper),
        Op::Z(j, w, Lower),
        Op::Y(i, -PI, Lower),
        Op::Coupling,
        Op::Y(i, -PI, Upper),
        Op::Coupling,
        Op::Y(i, PI, Upper),
        Op::Y(i, PI, Lower),
        Op::Y(j, -PI, Upper),
        Op::Z(j, w, Upper),
        Op::Z(j, w, Lower),
        Op::Y(i, -PI, Lower),
        Op::Coupling,
        Op::Y(i, -PI, Upper),
        Op::Coupling,
        Op::Y(i, PI, Upper),
        Op::Y(i, PI, Lower),
        Op::Y(j, PI, Upper),
        Op::Y(j, PI, Lower),
    ];
    let mut out = Vec::new();
    for op in sandwich.iter().rev() {
        match *op {
            Op::Z(site, angle, t) => out.extend(rotations(composite_z(angle, site, t))),
            Op::Y(site, angle, t) => out.push(Instruction::Rotation(SelectiveRotation::y(angle, site, t))),
            Op::Phase(theta) => out.push(Instruction::GlobalPhase(theta)),
            Op::Coupling => out.extend_from_slice(&zz),
        }
    }
    Ok(out)
}

/// `exp(-iΔt_l R_ij S_i^z S_j^z)` as one refocusing block of triple length.
pub fn expand_coupling_term(
    i: usize,
    j: usize,
    dt_l: f64,
    r: f64,
    ddi: &DdiConstants,
) -> Result<Vec<Instruction>> {
    let sites = ddi.sites();
    check_pair(i, j, sites)?;
    refocusing_block(i, j, 3.0 * pair_interval(i, j, dt_l, r, ddi)?, sites)
}

/// One transverse half-step: a two-tone drive per site, none at `l = N`.
pub fn expand_h0_half(l: usize, schedule: &AnnealSchedule, sites: usize) -> Vec<Instruction> {
    let omega2 = schedule.half_angle(l);
    if omega2 == 0.0 {
        return Vec::new();
    }
    // H_0 = -h Σ S^x, so the half-step rotates by -Ω₂.
    (1..=sites)
        .map(|site| Instruction::TwoToneDrive { site, angle: -omega2 })
        .collect()
}

/// `exp(-iΔt_l H_f)` with the constant offset kept as a global phase.
pub fn expand_target_step(
    terms: &TargetTerms,
    dt_l: f64,
    ddi: &DdiConstants,
) -> Result<Vec<Instruction>> {
    let mut out = Vec::new();
    if dt_l == 0.0 {
        return Ok(out);
    }
    for (k, (&lin, &quad)) in terms.linear.iter().zip(&terms.quadratic).enumerate() {
        out.extend(expand_linear_term(k + 1, dt_l * lin));
        out.extend(expand_quadratic_term(k + 1, dt_l * quad / 3.0));
    }
    for &(i, j, r) in &terms.pairs {
        out.extend(expand_coupling_term(i, j, dt_l, r, ddi)?);
        out.extend(expand_pair_term(i, j, dt_l, r, ddi)?);
    }
    out.push(Instruction::GlobalPhase(dt_l * terms.constant));
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramStats {
    pub rotations: usize,
    pub drives: usize,
    pub free_intervals: usize,
    pub phases: usize,
}

impl ProgramStats {
    pub fn of(instructions: &[Instruction]) -> Self {
        let mut s = Self::default();
        for instr in instructions {
            match instr {
                Instruction::Rotation(_) => s.rotations += 1,
                Instruction::TwoToneDrive { .. } => s.drives += 1,
                Instruction::FreeEvolution { .. } => s.free_intervals += 1,
                Instruction::GlobalPhase(_) => s.phases += 1,
            }
        }
        s
    }

    pub fn pulses(&self) -> usize {
        self.rotations + self.drives
    }
}

impl std::ops::AddAssign for ProgramStats {
    fn add_assign(&mut self, o: Self) {
        self.rotations += o.rotations;
        self.drives += o.drives;
        self.free_intervals += o.free_intervals;
        self.phases += o.phases;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramStep {
    pub index: usize,
    pub instructions: Vec<Instruction>,
}

impl ProgramStep {
    pub fn stats(&self) -> ProgramStats {
        ProgramStats::of(&self.instructions)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub sites: usize,
    pub steps: Vec<ProgramStep>,
}

impl Program {
    pub fn stats(&self) -> ProgramStats {
        let mut total = ProgramStats::default();
        for step in &self.steps {
            total += step.stats();
        }
        total
    }

    pub fn len(&self) -> usize {
        self.steps.iter().map(|s| s.instructions.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn instructions(&self) -> impl Iterator<Item = &Instruction> {
        self.steps.iter().flat_map(|s| s.instructions.iter())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "SITES {}", self.sites);
        for step in &self.steps {
            let _ = writeln!(out, "STEP {}", step.index);
            for instr in &step.instructions {
                let _ = writeln!(out, "{instr}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut program = Program::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: n + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
            let int = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad integer `{s}`")));
            let instr = match fields[..] {
                ["SITES", s] => {
                    program.sites = int(s)?;
                    continue;
                }
                ["STEP", l] => {
                    program.steps.push(ProgramStep {
                        index: int(l)?,
                        instructions: Vec::new(),
                    });
                    continue;
                }
                ["ROT", axis, angle, site, transition] => Instruction::Rotation(SelectiveRotation::new(
                    axis.parse().map_err(|e: Error| err(e.to_string()))?,
                    num(angle)?,
                    int(site)?,
                    transition.parse().map_err(|e: Error| err(e.to_string()))?,
                )),
                ["DRIVE", site, angle] => Instruction::TwoToneDrive {
                    site: int(site)?,
                    angle: num(angle)?,
                },
                ["FREE", d] => Instruction::FreeEvolution { duration: num(d)? },
                ["PHASE", theta] => Instruction::GlobalPhase(num(theta)?),
                _ => return Err(err(format!("unrecognized instruction `{line}`"))),
            };
            match program.steps.last_mut() {
                Some(step) => step.instructions.push(instr),
                None => return Err(err("instruction before the first STEP".into())),
            }
        }
        Ok(program)
    }
}

/// Instructions for step `l`: half drive, target factors, half drive.
pub fn build_step(
    l: usize,
    schedule: &AnnealSchedule,
    terms: &TargetTerms,
    ddi: &DdiConstants,
) -> Result<ProgramStep> {
    let sites = ddi.sites();
    let half = expand_h0_half(l, schedule, sites);
    let mut instructions = half.clone();
    instructions.extend(expand_target_step(terms, schedule.target_time(l), ddi)?);
    instructions.extend(half);
    Ok(ProgramStep { index: l, instructions })
}

/// The whole anneal, steps `0..=N`.
pub fn build_program(
    instance: &ClusteringInstance,
    schedule: &AnnealSchedule,
    ddi: &DdiConstants,
) -> Result<Program> {
    schedule.validate()?;
    if ddi.sites() != instance.sites() {
        return Err(Error::DimensionMismatch {
            expected: instance.sites(),
            actual: ddi.sites(),
        });
    }
    let terms = TargetTerms::new(instance);
    let steps = (0..=schedule.steps)
        .map(|l| build_step(l, schedule, &terms, ddi))
        .collect::<Result<_>>()?;
    Ok(Program {
        sites: instance.sites(),
        steps,
    })
}

/// Ideal semantics of the instructions, with free evolution under
/// `Σ J_ij S_i^z S_j^z`.
pub struct IdealEvaluator {
    sites: usize,
    ddi_diagonal: Vec<f64>,
}

impl IdealEvaluator {
    pub fn new(ddi: &DdiConstants) -> Self {
        Self {
            sites: ddi.sites(),
            ddi_diagonal: ddi.hamiltonian_diagonal(),
        }
    }

    fn free_phases(&self, duration: f64) -> Vec<f64> {
        self.ddi_diagonal.iter().map(|e| e * duration).collect()
    }

    /// Time-ordered product of the instructions as a matrix.
    pub fn matrix(&self, instructions: &[Instruction]) -> Result<Unitary> {
        let mut u = Unitary::identity(dimension(self.sites));
        for instr in instructions {
            match instr {
                Instruction::Rotation(r) => u.apply_site_op(&rotation_matrix(r)?, r.site, self.sites)?,
                Instruction::TwoToneDrive { site, angle } => {
                    u.apply_site_op(&sx_rotation(*angle), *site, self.sites)?
                }
                Instruction::FreeEvolution { duration } => u.apply_phases(&self.free_phases(*duration)),
                Instruction::GlobalPhase(theta) => u.scale(c64::cis(-theta)),
            }
        }
        Ok(u)
    }

    /// Applies the instructions to a state in order.
    pub fn apply(&self, state: &mut QutritState, instructions: &[Instruction]) -> Result<()> {
        for instr in instructions {
            match instr {
                Instruction::Rotation(r) => state.apply_site_op(&rotation_matrix(r)?, r.site)?,
                Instruction::TwoToneDrive { site, angle } => {
                    state.apply_site_op(&sx_rotation(*angle), *site)?
                }
                Instruction::FreeEvolution { duration } => state.apply_phases(&self.free_phases(*duration))?,
                Instruction::GlobalPhase(theta) => state.scale(c64::cis(-theta)),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{build_initial_hamiltonian, build_target_hamiltonian, ddi_constants};
    use crate::spin::Axis;
    use crate::tensor::Unitary;

    fn single_site(ops: &[Instruction]) -> Unitary {
        let ddi = ddi_constants(
            &ClusteringInstance::new(
                vec![crate::clustering::Point::new(0., 0.), crate::clustering::Point::new(1., 0.)],
                0,
                3,
            )
            .unwrap(),
            1e-6,
        )
        .unwrap();
        IdealEvaluator::new(&ddi).matrix(ops).unwrap()
    }

    #[test]
    fn linear_term_is_sz_exponential() {
        let omega = 0.37;
        let u = single_site(&expand_linear_term(1, omega));
        let expected = Unitary::from_phases(&[omega, 0.0, -omega]);
        assert!(u.distance(&expected) < 1e-14);
        let full = single_site(&expand_linear_term(1, 2.0 * PI));
        assert!(full.distance_up_to_phase(&Unitary::identity(3)) < 1e-13);
    }

    #[test]
    fn quadratic_term_is_sz2_exponential() {
        let phi = -0.81;
        let u = single_site(&expand_quadratic_term(1, phi));
        let expected = Unitary::from_phases(&[3.0 * phi, 0.0, 3.0 * phi]);
        assert!(u.distance(&expected) < 1e-14);
        assert!(single_site(&expand_quadratic_term(1, 0.0)).distance(&Unitary::identity(3)) < 1e-15);
    }

    #[test]
    fn no_physical_z_rotations() {
        let inst = ClusteringInstance::example();
        let ddi = ddi_constants(&inst, 1e-6).unwrap();
        let s = AnnealSchedule::new(3, 0.05, 6.5).unwrap();
        let p = build_program(&inst, &s, &ddi).unwrap();
        for instr in p.instructions() {
            if let Instruction::Rotation(r) = instr {
                assert_ne!(r.axis, Axis::Z);
                assert!(r.site >= 1 && r.site <= 5);
            }
        }
    }

    #[test]
    fn pair_term_uses_only_pi_y_rotations_outside_z_blocks() {
        let inst = ClusteringInstance::example();
        let ddi = ddi_constants(&inst, 1e-6).unwrap();
        let seq = expand_pair_term(2, 4, 0.01, inst.site_distance(2, 4), &ddi).unwrap();
        for instr in &seq {
            if let Instruction::Rotation(r) = instr {
                if r.axis == Axis::Y {
                    let a = r.angle.abs();
                    assert!(a == PI || a == PI / 2.0);
                }
            }
        }
        assert!(expand_pair_term(2, 2, 0.01, 1.0, &ddi).is_err());
        assert!(expand_pair_term(1, 6, 0.01, 1.0, &ddi).is_err());
    }

    #[test]
    fn refocusing_follows_walsh_pattern() {
        // Target (4, 5); spectators 1, 2, 3 play P1, P2, P3.
        let block = refocusing_block(4, 5, 1.0, 5).unwrap();
        let mut tokens = Vec::new();
        let mut k = 0;
        while k < block.len() {
            match block[k] {
                Instruction::FreeEvolution { .. } => {
                    tokens.push("e".to_string());
                    k += 1;
                }
                Instruction::Rotation(r) => {
                    let inv = if r.angle < 0.0 { "'" } else { "" };
                    tokens.push(format!("P{}{inv}", r.site));
                    k += 3;
                }
                _ => unreachable!(),
            }
        }
        let expected = "P3 P2 e P1 e P1' P2' e P1 e P1' P3' P2 e P1 e P1' P2' e P1 e P1'";
        assert_eq!(tokens.join(" "), expected);
    }

    #[test]
    fn refocusing_isolates_each_pair() {
        let inst = ClusteringInstance::example();
        let ddi = ddi_constants(&inst, 1e-3).unwrap();
        let eval = IdealEvaluator::new(&ddi);
        let dt = 17.0;
        for (a, b, jab) in ddi.pairs() {
            let u = eval.matrix(&refocusing_block(a, b, dt, 5).unwrap()).unwrap();
            let phases: Vec<f64> = (0..243)
                .map(|k| {
                    let m = crate::tensor::projections(k, 5);
                    8.0 * dt * jab * (m[a - 1] * m[b - 1]) as f64
                })
                .collect();
            assert!(u.distance_up_to_phase(&Unitary::from_phases(&phases)) < 1e-12);
        }
    }

    #[test]
    fn pair_term_matches_exact_exponential() {
        let inst = ClusteringInstance::example();
        let ddi = ddi_constants(&inst, 1e-6).unwrap();
        let eval = IdealEvaluator::new(&ddi);
        let (i, j, dt_l) = (1, 3, 0.031);
        let r = inst.site_distance(i, j);
        let u = eval.matrix(&expand_pair_term(i, j, dt_l, r, &ddi).unwrap()).unwrap();
        let phases: Vec<f64> = (0..243)
            .map(|k| {
                let m = crate::tensor::projections(k, 5);
                let (a, b) = (m[i - 1] as f64, m[j - 1] as f64);
                3.0 * dt_l * r * a * a * b * b
            })
            .collect();
        // The sequence is exact including its global phase.
        assert!(u.distance(&Unitary::from_phases(&phases)) < 1e-10);
    }

    #[test]
    fn drives_follow_schedule() {
        let s = AnnealSchedule::new(10, 0.2, 3.0).unwrap();
        assert!(expand_h0_half(10, &s, 5).is_empty());
        let first = expand_h0_half(0, &s, 5);
        assert_eq!(first.len(), 5);
        assert!(matches!(first[0], Instruction::TwoToneDrive { site: 1, angle } if (angle + 0.3).abs() < 1e-15));
    }

    #[test]
    fn step_equivalence_small() {
        let inst = ClusteringInstance::new(
            vec![
                crate::clustering::Point::new(0., 0.),
                crate::clustering::Point::new(1., 2.),
                crate::clustering::Point::new(-3., 1.),
                crate::clustering::Point::new(2., -2.),
            ],
            0,
            3,
        )
        .unwrap();
        let ddi = ddi_constants(&inst, 1e-6).unwrap();
        let s = AnnealSchedule::new(4, 0.3, 2.0).unwrap();
        let h0 = build_initial_hamiltonian(s.h, 3).unwrap();
        let hf = build_target_hamiltonian(&inst);
        let program = build_program(&inst, &s, &ddi).unwrap();
        let eval = IdealEvaluator::new(&ddi);
        for step in &program.steps {
            let u = eval.matrix(&step.instructions).unwrap();
            let exact = crate::anneal::step_unitary(step.index, &s, &h0, &hf).unwrap();
            assert!(u.distance(&exact) < 1e-10, "step {}", step.index);
        }
    }

    #[test]
    fn per_step_stats_are_constant() {
        let inst = ClusteringInstance::example();
        let ddi = ddi_constants(&inst, 1e-6).unwrap();
        let s = AnnealSchedule::new(6, 0.05, 6.5).unwrap();
        let p = build_program(&inst, &s, &ddi).unwrap();
        let inner: Vec<_> = p.steps[1..6].iter().map(|s| s.stats()).collect();
        assert!(inner.windows(2).all(|w| w[0] == w[1]));
        let total = p.stats();
        assert_eq!(total.pulses(), p.instructions().filter(|i| i.is_pulse()).count());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let inst = ClusteringInstance::example();
        let ddi = ddi_constants(&inst, 1e-6).unwrap();
        let s = AnnealSchedule::new(2, 0.05252, 6.5).unwrap();
        let p = build_program(&inst, &s, &ddi).unwrap();
        let back = Program::parse(&p.to_text()).unwrap();
        assert_eq!(back, p);
        assert!(Program::parse("ROT x 1 1 12\n").is_err());
        assert!(Program::parse("STEP 0\nROT x 1 1 13\n").is_err());
    }
}
