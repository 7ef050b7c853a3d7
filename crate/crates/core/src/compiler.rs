//! Mapping of gate-level instructions onto rectangular RF pulses.
//!
//! Durations are integer multiples of `2π/D`, where `D` divides every Larmor
//! frequency and quadrupole constant, so rotating-frame phases wind by whole
//! turns over every event.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::anneal::AnnealSchedule;
use crate::error::{Error, Result};
use crate::sequencer::{Instruction, Program};
use crate::spin::{Axis, SelectiveRotation, Transition};

/// Pulse-count multipliers `C_j` for each rotation family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseTables {
    /// y rotations by ±π, per site.
    pub y_pi: Vec<u32>,
    /// y rotations by ±π/2, per site.
    pub y_half_pi: Vec<u32>,
    /// x rotations of arbitrary angle, per site.
    pub x: Vec<u32>,
    /// Two-tone drives, shared by every site.
    pub two_tone: u32,
}

impl Default for PulseTables {
    fn default() -> Self {
        Self {
            y_pi: vec![69, 69, 69, 67, 67],
            y_half_pi: vec![70, 79, 68, 70, 59],
            x: vec![112, 80, 68, 1, 1],
            two_tone: 1,
        }
    }
}

/// How a two-tone amplitude maps onto the rotation angle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoToneConvention {
    /// `Ω₂ = t h`.
    #[default]
    Linear,
    /// `Ω₂ = √2 t h`, as for single-tone pulses.
    Sqrt2,
}

impl TwoToneConvention {
    fn factor(self) -> f64 {
        match self {
            TwoToneConvention::Linear => 1.0,
            TwoToneConvention::Sqrt2 => SQRT_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSystemConfig {
    pub larmor: Vec<f64>,
    pub quadrupole: Vec<f64>,
    pub divisor: f64,
    #[serde(default)]
    pub tables: PulseTables,
    #[serde(default)]
    pub two_tone_convention: TwoToneConvention,
}

impl Default for SpinSystemConfig {
    fn default() -> Self {
        Self {
            larmor: vec![3000.0, 2500.0, 2800.0, 3200.0, 3800.0],
            quadrupole: vec![15000.0, 10000.0, 12000.0, 18000.0, 30000.0],
            divisor: 100.0,
            tables: PulseTables::default(),
            two_tone_convention: TwoToneConvention::Linear,
        }
    }
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0)
}

impl SpinSystemConfig {
    pub fn sites(&self) -> usize {
        self.larmor.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sites();
        let bad = |msg: String| Err(Error::InvalidSpinConfig(msg));
        if self.quadrupole.len() != n {
            return bad(format!("{n} Larmor frequencies but {} quadrupole constants", self.quadrupole.len()));
        }
        for (name, table) in [
            ("y_pi", &self.tables.y_pi),
            ("y_half_pi", &self.tables.y_half_pi),
            ("x", &self.tables.x),
        ] {
            if table.len() != n {
                return bad(format!("table {name} has {} entries for {n} spins", table.len()));
            }
            if table.contains(&0) {
                return bad(format!("table {name} contains a non-positive multiplier"));
            }
        }
        if self.tables.two_tone == 0 {
            return bad("two-tone multiplier must be positive".into());
        }
        if !(self.divisor.is_finite() && self.divisor > 0.0) {
            return bad(format!("divisor must be positive, got {}", self.divisor));
        }
        for (j, v) in self.larmor.iter().chain(&self.quadrupole).enumerate() {
            if !is_integer(v / self.divisor) {
                return bad(format!(
                    "constant {v} (entry {}) is not a multiple of the divisor {}",
                    j % n + 1,
                    self.divisor
                ));
            }
        }
        let freqs = self.transition_frequencies();
        for (a, fa) in freqs.iter().enumerate() {
            if freqs[a + 1..].iter().any(|fb| fb == fa) {
                return bad(format!("transition frequency {fa} is shared by two transitions"));
            }
        }
        Ok(())
    }

    /// `ω^{1↔2} = ω_j - 3Q_j`, `ω^{2↔3} = ω_j + 3Q_j`.
    pub fn transition_frequency(&self, site: usize, transition: Transition) -> Result<f64> {
        if site == 0 || site > self.sites() {
            return Err(Error::SiteOutOfRange {
                site,
                sites: self.sites(),
            });
        }
        let (w, q) = (self.larmor[site - 1], self.quadrupole[site - 1]);
        Ok(match transition {
            Transition::Upper => w - 3.0 * q,
            Transition::Lower => w + 3.0 * q,
        })
    }

    pub fn transition_frequencies(&self) -> Vec<f64> {
        (1..=self.sites())
            .flat_map(|s| Transition::BOTH.map(|t| self.transition_frequency(s, t).unwrap_or(f64::NAN)))
            .collect()
    }

    /// Smallest separation between two transition frequencies.
    pub fn min_frequency_gap(&self) -> f64 {
        let mut f = self.transition_frequencies();
        f.sort_by(f64::total_cmp);
        f.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Amplitude bound below which pulses stay frequency selective.
    pub fn selectivity_cap(&self) -> f64 {
        1e-3 * self.min_frequency_gap()
    }

    /// `2π C / D`.
    pub fn duration_of(&self, cycles: u64) -> f64 {
        TAU * cycles as f64 / self.divisor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseKind {
    SingleTone,
    TwoTone,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseEvent {
    pub kind: PulseKind,
    /// Carrier frequencies: one, two, or none for free evolution.
    pub frequencies: Vec<f64>,
    pub amplitude: f64,
    pub duration: f64,
    pub phase: f64,
    /// Duration in units of `2π/D`.
    pub cycles: u64,
}

impl PulseEvent {
    pub fn free(cycles: u64, config: &SpinSystemConfig) -> Self {
        Self {
            kind: PulseKind::Free,
            frequencies: Vec::new(),
            amplitude: 0.0,
            duration: config.duration_of(cycles),
            phase: 0.0,
            cycles,
        }
    }

    fn to_line(&self) -> String {
        match self.kind {
            PulseKind::Free => format!("FREE {:.16e}", self.duration),
            _ => {
                let mut s = String::from("PULSE");
                for f in &self.frequencies {
                    let _ = write!(s, " {f:.16e}");
                }
                let _ = write!(s, " {:.16e} {:.16e} {:.16e}", self.amplitude, self.duration, self.phase);
                s
            }
        }
    }
}

/// Drive phase for a rotation about `axis` with the given sign.
fn phase_for(axis: Axis, negative: bool) -> Result<f64> {
    Ok(match (axis, negative) {
        (Axis::X, false) => 0.0,
        (Axis::X, true) => PI,
        (Axis::Y, false) => 3.0 * FRAC_PI_2,
        (Axis::Y, true) => FRAC_PI_2,
        (Axis::Z, _) => {
            return Err(Error::InvalidRotation(
                "z rotations must be expanded before compilation".into(),
            ))
        }
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

/// One rectangular single-tone pulse; `None` for a zero angle.
pub fn compile_rotation(r: &SelectiveRotation, config: &SpinSystemConfig) -> Result<Option<PulseEvent>> {
    r.validate()?;
    if r.angle == 0.0 {
        return Ok(None);
    }
    let frequency = config.transition_frequency(r.site, r.transition)?;
    let magnitude = r.angle.abs();
    let table = match r.axis {
        Axis::X => &config.tables.x,
        Axis::Y if close(magnitude, PI) => &config.tables.y_pi,
        Axis::Y if close(magnitude, FRAC_PI_2) => &config.tables.y_half_pi,
        Axis::Y => {
            return Err(Error::InvalidRotation(format!(
                "no pulse table for a y rotation by {}",
                r.angle
            )))
        }
        Axis::Z => &config.tables.x,
    };
    let phase = phase_for(r.axis, r.angle < 0.0)?;
    let cycles = u64::from(table[r.site - 1]);
    let duration = config.duration_of(cycles);
    Ok(Some(PulseEvent {
        kind: PulseKind::SingleTone,
        frequencies: vec![frequency],
        amplitude: magnitude / (SQRT_2 * duration),
        duration,
        phase,
        cycles,
    }))
}

/// Simultaneous drive of both transitions of `site`; `None` for a zero angle.
pub fn compile_two_tone(site: usize, angle: f64, config: &SpinSystemConfig) -> Result<Option<PulseEvent>> {
    if !angle.is_finite() {
        return Err(Error::InvalidRotation(format!("non-finite drive angle on site {site}")));
    }
    if angle == 0.0 {
        return Ok(None);
    }
    let cycles = u64::from(config.tables.two_tone);
    let duration = config.duration_of(cycles);
    let factor = config.two_tone_convention.factor();
    let amplitude = angle.abs() / (factor * duration);
    let limit = factor * duration * config.selectivity_cap();
    if amplitude > config.selectivity_cap() {
        return Err(Error::TwoToneOverdrive {
            omega2: angle.abs(),
            limit,
        });
    }
    Ok(Some(PulseEvent {
        kind: PulseKind::TwoTone,
        frequencies: vec![
            config.transition_frequency(site, Transition::Upper)?,
            config.transition_frequency(site, Transition::Lower)?,
        ],
        amplitude,
        duration,
        phase: if angle < 0.0 { PI } else { 0.0 },
        cycles,
    }))
}

/// `C₀`, the nearest integer to `Δt D / (2π N ε)`.
pub fn free_base_cycles(schedule: &AnnealSchedule, epsilon: f64, config: &SpinSystemConfig) -> Result<u64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidSpinConfig(format!(
            "free-evolution timing needs a positive DDI scale, got {epsilon}"
        )));
    }
    let c0 = (schedule.dt * config.divisor / (TAU * schedule.steps as f64 * epsilon)).round();
    if c0 < 1.0 {
        return Err(Error::InvalidSpinConfig(format!(
            "free-evolution base multiplier rounds to zero (DDI scale {epsilon} too large)"
        )));
    }
    Ok(c0 as u64)
}

/// Commensurate free interval standing in for `duration` at step `l`.
///
/// The ideal interval is an integer multiple `k` of `Δt_l / ε`; it becomes
/// `2π C₀ l k / D`.
pub fn compile_free(
    duration: f64,
    l: usize,
    schedule: &AnnealSchedule,
    epsilon: f64,
    config: &SpinSystemConfig,
) -> Result<PulseEvent> {
    let c0 = free_base_cycles(schedule, epsilon, config)?;
    if l == 0 {
        return Ok(PulseEvent::free(0, config));
    }
    let base = schedule.target_time(l) / epsilon;
    let k = (duration / base).round();
    if k < 1.0 || (duration - k * base).abs() > 1e-9 * duration {
        return Err(Error::InvalidSchedule(format!(
            "free interval {duration} is not a multiple of the step-{l} base {base}"
        )));
    }
    Ok(PulseEvent::free(c0 * l as u64 * k as u64, config))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseHeader {
    pub config_hash: String,
    pub steps: usize,
    pub dt: f64,
    pub h: f64,
    pub epsilon: f64,
    pub divisor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseStep {
    pub index: usize,
    pub events: Vec<PulseEvent>,
    /// Sum of the global phases dropped from the step.
    pub global_phase: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseStats {
    pub single_tone: usize,
    pub two_tone: usize,
    pub free: usize,
}

impl PulseStats {
    pub fn pulses(&self) -> usize {
        self.single_tone + self.two_tone
    }
}

impl PulseStep {
    pub fn stats(&self) -> PulseStats {
        let mut s = PulseStats::default();
        for e in &self.events {
            match e.kind {
                PulseKind::SingleTone => s.single_tone += 1,
                PulseKind::TwoTone => s.two_tone += 1,
                PulseKind::Free => s.free += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseProgram {
    pub header: PulseHeader,
    pub steps: Vec<PulseStep>,
}

impl PulseProgram {
    pub fn stats(&self) -> PulseStats {
        let mut total = PulseStats::default();
        for s in &self.steps {
            let st = s.stats();
            total.single_tone += st.single_tone;
            total.two_tone += st.two_tone;
            total.free += st.free;
        }
        total
    }

    pub fn events(&self) -> impl Iterator<Item = &PulseEvent> {
        self.steps.iter().flat_map(|s| s.events.iter())
    }

    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        let _ = writeln!(out, "# config_hash = {}", h.config_hash);
        let _ = writeln!(out, "# version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# steps = {}", h.steps);
        let _ = writeln!(out, "# dt = {:.16e}", h.dt);
        let _ = writeln!(out, "# h = {:.16e}", h.h);
        let _ = writeln!(out, "# epsilon = {:.16e}", h.epsilon);
        let _ = writeln!(out, "# divisor = {:.16e}", h.divisor);
        for step in &self.steps {
            let _ = writeln!(out, "STEP {}", step.index);
            for e in &step.events {
                let _ = writeln!(out, "{}", e.to_line());
            }
            let _ = writeln!(out, "PHASE {:.16e}", step.global_phase);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = PulseHeader {
            config_hash: String::new(),
            steps: 0,
            dt: 0.0,
            h: 0.0,
            epsilon: 0.0,
            divisor: 0.0,
        };
        let mut steps: Vec<PulseStep> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: n + 1,
                message,
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
            if let Some(rest) = line.strip_prefix('#') {
                let Some((key, value)) = rest.split_once('=') else {
                    continue;
                };
                let value = value.trim();
                match key.trim() {
                    "config_hash" => header.config_hash = value.to_string(),
                    "steps" => header.steps = value.parse().map_err(|_| err(format!("bad step count `{value}`")))?,
                    "dt" => header.dt = num(value)?,
                    "h" => header.h = num(value)?,
                    "epsilon" => header.epsilon = num(value)?,
                    "divisor" => header.divisor = num(value)?,
                    _ => {}
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if let ["STEP", l] = fields[..] {
                steps.push(PulseStep {
                    index: l.parse().map_err(|_| err(format!("bad step index `{l}`")))?,
                    events: Vec::new(),
                    global_phase: 0.0,
                });
                continue;
            }
            if !(header.divisor.is_finite() && header.divisor > 0.0) {
                return Err(err("divisor header must precede events".into()));
            }
            let cycles_of = |d: f64| (d * header.divisor / TAU).round() as u64;
            let Some(step) = steps.last_mut() else {
                return Err(err("event before the first STEP".into()));
            };
            let event = match fields[..] {
                ["PHASE", theta] => {
                    step.global_phase = num(theta)?;
                    continue;
                }
                ["FREE", d] => {
                    let d = num(d)?;
                    PulseEvent {
                        kind: PulseKind::Free,
                        frequencies: Vec::new(),
                        amplitude: 0.0,
                        duration: d,
                        phase: 0.0,
                        cycles: cycles_of(d),
                    }
                }
                ["PULSE", ref rest @ ..] if rest.len() == 4 || rest.len() == 5 => {
                    let values = rest.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
                    let nf = values.len() - 3;
                    let duration = values[nf + 1];
                    PulseEvent {
                        kind: if nf == 1 { PulseKind::SingleTone } else { PulseKind::TwoTone },
                        frequencies: values[..nf].to_vec(),
                        amplitude: values[nf],
                        duration,
                        phase: values[nf + 2],
                        cycles: cycles_of(duration),
                    }
                }
                _ => return Err(err(format!("unrecognized event `{line}`"))),
            };
            step.events.push(event);
        }
        Ok(Self { header, steps })
    }
}

/// Compiles a gate program instruction by instruction, in order.
pub fn compile_program(
    program: &Program,
    config: &SpinSystemConfig,
    schedule: &AnnealSchedule,
    epsilon: f64,
    config_hash: &str,
) -> Result<PulseProgram> {
    config.validate()?;
    if program.sites > config.sites() {
        return Err(Error::InvalidSpinConfig(format!(
            "program uses {} spins but the spin system has {}",
            program.sites,
            config.sites()
        )));
    }
    let mut index = 0usize;
    let mut steps = Vec::with_capacity(program.steps.len());
    for step in &program.steps {
        let mut events = Vec::with_capacity(step.instructions.len());
        let mut global_phase = 0.0;
        for instr in &step.instructions {
            let wrap = |e: Error| Error::Compile {
                index,
                reason: e.to_string(),
            };
            let event = match instr {
                Instruction::Rotation(r) => compile_rotation(r, config).map_err(wrap)?,
                Instruction::TwoToneDrive { site, angle } => compile_two_tone(*site, *angle, config).map_err(wrap)?,
                Instruction::FreeEvolution { duration } => {
                    Some(compile_free(*duration, step.index, schedule, epsilon, config).map_err(wrap)?)
                }
                Instruction::GlobalPhase(theta) => {
                    global_phase += theta;
                    None
                }
            };
            events.extend(event);
            index += 1;
        }
        steps.push(PulseStep {
            index: step.index,
            events,
            global_phase,
        });
    }
    Ok(PulseProgram {
        header: PulseHeader {
            config_hash: config_hash.to_string(),
            steps: schedule.steps,
            dt: schedule.dt,
            h: schedule.h,
            epsilon,
            divisor: config.divisor,
        },
        steps,
    })
}

/// Largest compiled amplitudes relative to the selectivity cap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectivityReport {
    pub cap: f64,
    /// Over fixed-angle y pulses and two-tone drives.
    pub max_fixed_ratio: f64,
    /// Over arbitrary-angle x pulses.
    pub max_x_ratio: f64,
    /// x pulses above the cap.
    pub x_violations: usize,
}

pub fn selectivity_report(program: &PulseProgram, config: &SpinSystemConfig) -> SelectivityReport {
    let cap = config.selectivity_cap();
    let mut report = SelectivityReport {
        cap,
        ..Default::default()
    };
    for e in program.events() {
        let ratio = e.amplitude / cap;
        let is_x = e.kind == PulseKind::SingleTone && (e.phase == 0.0 || e.phase == PI);
        if is_x {
            report.max_x_ratio = report.max_x_ratio.max(ratio);
            if ratio > 1.0 {
                report.x_violations += 1;
            }
        } else {
            report.max_fixed_ratio = report.max_fixed_ratio.max(ratio);
        }
    }
    report
}
