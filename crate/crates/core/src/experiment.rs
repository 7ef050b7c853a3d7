//! Experiment configuration, run modes, sweeps and on-disk artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anneal::{anneal_with, outcome_distribution, step_unitary, AnnealSchedule};
use crate::clustering::{
    brute_force_min, build_initial_hamiltonian, build_target_hamiltonian, ddi_constants, initial_state,
    preferred_minimizer, weight, ClusterAssignment, ClusteringInstance, Point,
};
use crate::compiler::{compile_program, selectivity_report, PulseProgram, PulseStats, SelectivityReport, SpinSystemConfig};
use crate::error::{Error, Result};
use crate::sequencer::{build_program, IdealEvaluator, ProgramStats};
use crate::simulator::{RunOptions, Simulator, StepSnapshot};
use crate::tensor::{self, CacheStats, QutritState};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Oracle,
    Ideal,
    IrVerify,
    Compile,
    Pulse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Dt,
    H,
    Steps,
    Epsilon,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    /// Instance file; the built-in six-point example when absent.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub steps: usize,
    pub dt: f64,
    pub h: f64,
    pub epsilon: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            steps: 201,
            dt: 0.05252,
            h: 6.5,
            epsilon: 1e-6,
        }
    }
}

impl ScheduleSection {
    pub fn schedule(&self) -> Result<AnnealSchedule> {
        AnnealSchedule::new(self.steps, self.dt, self.h)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    /// Projections of the active spins; chosen among the minimizers when absent.
    pub projections: Option<Vec<i8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Mode run at each grid point: `ideal` or `pulse`.
    #[serde(default = "default_sweep_mode")]
    pub mode: Mode,
}

fn default_sweep_mode() -> Mode {
    Mode::Ideal
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// Wall time in reports; zero when off, which keeps outputs reproducible.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Number of most probable outcomes listed in run reports.
    #[serde(default = "default_top_k")]
    pub top_k: usize,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_top_k() -> usize {
    5
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            record_timing: false,
            max_steps: None,
            workers: None,
            top_k: default_top_k(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default)]
    pub instance: InstanceSection,
    #[serde(default)]
    pub spins: SpinSystemConfig,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub target: TargetSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Ideal,
            instance: InstanceSection::default(),
            spins: SpinSystemConfig::default(),
            schedule: ScheduleSection::default(),
            target: TargetSection::default(),
            sweep: None,
            output: OutputSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| text[s].trim().to_string())
                .unwrap_or_default();
            Error::config(field, e.message())
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; a relative instance path resolves against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&text)?;
        if let Some(p) = &config.instance.path {
            if p.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.instance.path = Some(base.join(p));
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.schedule;
        if s.steps == 0 {
            return Err(Error::config("schedule.steps", "must be at least 1"));
        }
        if !(s.dt.is_finite() && s.dt > 0.0) {
            return Err(Error::config("schedule.dt", "must be finite and positive"));
        }
        if !(s.h.is_finite() && s.h > 0.0) {
            return Err(Error::config("schedule.h", "must be finite and positive"));
        }
        if !(s.epsilon.is_finite() && s.epsilon >= 0.0) {
            return Err(Error::config("schedule.epsilon", "must be finite and non-negative"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::config("sweep.values", "grid is empty"));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("sweep.values", "grid contains a non-finite value"));
            }
            if sweep.axis == SweepAxis::Steps && sweep.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
                return Err(Error::config("sweep.values", "step counts must be positive integers"));
            }
            if !matches!(sweep.mode, Mode::Ideal | Mode::Pulse) {
                return Err(Error::config("sweep.mode", "must be `ideal` or `pulse`"));
            }
        }
        if self.output.workers == Some(0) {
            return Err(Error::config("output.workers", "must be at least 1"));
        }
        if self.output.max_steps == Some(0) {
            return Err(Error::config("output.max_steps", "must be at least 1"));
        }
        self.spins
            .validate()
            .map_err(|e| Error::config("spins", e.to_string()))
    }

    pub fn instance(&self) -> Result<ClusteringInstance> {
        match &self.instance.path {
            Some(p) => ClusteringInstance::load(p),
            None => Ok(ClusteringInstance::example()),
        }
    }

    /// SHA-256 over everything that determines results (not output paths,
    /// worker count or timing).
    pub fn hash(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Hashed<'a> {
            mode: Mode,
            instance: ClusteringInstance,
            spins: &'a SpinSystemConfig,
            schedule: &'a ScheduleSection,
            target: &'a TargetSection,
            sweep: &'a Option<SweepSection>,
            max_steps: Option<usize>,
        }
        let canonical = serde_json::to_string(&Hashed {
            mode: self.mode,
            instance: self.instance()?,
            spins: &self.spins,
            schedule: &self.schedule,
            target: &self.target,
            sweep: &self.sweep,
            max_steps: self.output.max_steps,
        })?;
        Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
    }
}

/// Provenance stamped into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub config_hash: String,
    pub version: String,
}

/// Basis state with its projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisOutcome {
    pub index: usize,
    pub projections: Vec<i8>,
    pub probability: f64,
}

/// Final-state summary shared by ideal and pulse reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub target: BasisOutcome,
    /// The target with labels 0 and -1 exchanged.
    pub swap: BasisOutcome,
    pub top: Vec<BasisOutcome>,
    pub norm_drift: f64,
}

fn outcome(index: usize, sites: usize, probability: f64) -> BasisOutcome {
    BasisOutcome {
        index,
        projections: tensor::projections(index, sites),
        probability,
    }
}

pub fn summarize(state: &QutritState, target: &ClusterAssignment, top_k: usize, norm_drift: f64) -> StateSummary {
    let sites = state.sites();
    let dist = outcome_distribution(state);
    let mut order: Vec<usize> = (0..dist.len()).collect();
    // Stable sort keeps index order among equal probabilities.
    order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
    let swap = target.swapped().basis_index();
    StateSummary {
        target: outcome(target.basis_index(), sites, dist[target.basis_index()]),
        swap: outcome(swap, sites, dist[swap]),
        top: order.iter().take(top_k).map(|&k| outcome(k, sites, dist[k])).collect(),
        norm_drift,
    }
}

/// Minimizer set and the weight of every assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub stamp: Stamp,
    pub minimum_weight: f64,
    pub minimizers: Vec<OracleMinimizer>,
    pub preferred: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMinimizer {
    pub projections: Vec<i8>,
    pub index: usize,
    /// Point lists of the clusters labelled 1, 0 and -1.
    pub clusters: Vec<Vec<Point>>,
}

/// Points grouped by label (1, 0, -1), the pinned point included.
pub fn partition(assignment: &ClusterAssignment, instance: &ClusteringInstance) -> Vec<Vec<Point>> {
    let labels = assignment.full(instance.excluded());
    [1i8, 0, -1]
        .iter()
        .map(|&m| {
            labels
                .iter()
                .zip(instance.points())
                .filter(|(&l, _)| l == m)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

/// Weight and target energy of one assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRow {
    pub index: usize,
    pub projections: String,
    pub weight: f64,
    pub energy: f64,
}

pub fn run_oracle(instance: &ClusteringInstance, stamp: &Stamp) -> Result<(OracleReport, Vec<WeightRow>)> {
    let minimizers = brute_force_min(instance)?;
    let preferred = preferred_minimizer(instance, &minimizers)
        .ok_or_else(|| Error::InvalidInstance("no minimizer found".into()))?;
    let hf = build_target_hamiltonian(instance);
    let sites = instance.sites();
    let rows = (0..tensor::dimension(sites))
        .map(|k| {
            let a = ClusterAssignment::from_basis_index(k, sites);
            WeightRow {
                index: k,
                projections: a.active().iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "),
                weight: weight(&a, instance),
                energy: hf.diag()[k],
            }
        })
        .collect();
    let report = OracleReport {
        stamp: stamp.clone(),
        minimum_weight: weight(&minimizers[0], instance),
        minimizers: minimizers
            .iter()
            .map(|a| OracleMinimizer {
                projections: a.active().to_vec(),
                index: a.basis_index(),
                clusters: partition(a, instance),
            })
            .collect(),
        preferred: preferred.active().to_vec(),
    };
    Ok((report, rows))
}

/// Result of an ideal or pulse-level anneal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub stamp: Stamp,
    pub mode: Mode,
    pub schedule: ScheduleSection,
    pub steps_run: usize,
    pub truncated: bool,
    pub summary: StateSummary,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseDiagnostics {
    pub events_applied: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub cache_hit_ratio: f64,
    pub pulses: PulseStats,
    pub selectivity: SelectivityReport,
    pub snapshots: Vec<StepSnapshotRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSnapshotRecord {
    pub step: usize,
    pub fidelity: f64,
    pub norm: f64,
}

impl From<&StepSnapshot> for StepSnapshotRecord {
    fn from(s: &StepSnapshot) -> Self {
        Self {
            step: s.index,
            fidelity: s.fidelity,
            norm: s.norm,
        }
    }
}

/// Everything a run needs, resolved once from the config.
pub struct Resolved {
    pub config: ExperimentConfig,
    pub instance: ClusteringInstance,
    pub target: ClusterAssignment,
    pub stamp: Stamp,
}

impl Resolved {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let instance = config.instance()?;
        let target = match &config.target.projections {
            Some(p) => {
                if p.len() != instance.sites() {
                    return Err(Error::config(
                        "target.projections",
                        format!("expected {} entries, got {}", instance.sites(), p.len()),
                    ));
                }
                ClusterAssignment::new(p.clone()).map_err(|e| Error::config("target.projections", e.to_string()))?
            }
            None => {
                let mins = brute_force_min(&instance)?;
                preferred_minimizer(&instance, &mins)
                    .ok_or_else(|| Error::InvalidInstance("no minimizer found".into()))?
            }
        };
        if instance.sites() > config.spins.sites() {
            return Err(Error::config(
                "spins",
                format!("{} active spins but {} configured", instance.sites(), config.spins.sites()),
            ));
        }
        let stamp = Stamp {
            config_hash: config.hash()?,
            version: VERSION.to_string(),
        };
        Ok(Self {
            config,
            instance,
            target,
            stamp,
        })
    }

    fn timer(&self) -> impl Fn(Instant) -> f64 + '_ {
        move |start: Instant| {
            if self.config.output.record_timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            }
        }
    }

    /// Ideal anneal, optionally cut short after `max_steps` steps.
    pub fn run_ideal(&self, schedule: &ScheduleSection) -> Result<RunReport> {
        let start = Instant::now();
        let s = schedule.schedule()?;
        let hf = build_target_hamiltonian(&self.instance);
        let sites = self.instance.sites();
        let total = s.steps + 1;
        let limit = self.config.output.max_steps.unwrap_or(total).min(total);
        let state = if limit == total {
            anneal_with(&s, &hf, sites)?
        } else {
            let mut state = initial_state(sites);
            for l in 0..limit {
                crate::anneal::apply_step(&mut state, l, &s, &hf)?;
            }
            state
        };
        let drift = (state.norm() - 1.0).abs();
        Ok(RunReport {
            stamp: self.stamp.clone(),
            mode: Mode::Ideal,
            schedule: *schedule,
            steps_run: limit,
            truncated: limit < total,
            summary: summarize(&state, &self.target, self.config.output.top_k, drift),
            wall_time_s: self.timer()(start),
            pulse: None,
        })
    }

    /// Gate program and its compiled pulses.
    pub fn compile(&self, schedule: &ScheduleSection) -> Result<CompileArtifacts> {
        let s = schedule.schedule()?;
        let ddi = ddi_constants(&self.instance, schedule.epsilon)?;
        let program = build_program(&self.instance, &s, &ddi)?;
        let pulses = compile_program(&program, &self.config.spins, &s, schedule.epsilon, &self.stamp.config_hash)?;
        let step_stats = program.steps.get(1).map(|st| st.stats()).unwrap_or_default();
        let report = CompileReport {
            stamp: self.stamp.clone(),
            schedule: *schedule,
            instructions: program.stats(),
            per_step_instructions: step_stats,
            pulses: pulses.stats(),
            per_step_pulses: pulses.steps.get(1).map(|st| st.stats()).unwrap_or_default(),
            selectivity: selectivity_report(&pulses, &self.config.spins),
        };
        Ok(CompileArtifacts {
            program_text: format!("# config_hash = {}\n# version = {VERSION}\n{}", self.stamp.config_hash, program.to_text()),
            pulses,
            report,
        })
    }

    /// Pulse-level anneal through the compiled program.
    pub fn run_pulse(&self, schedule: &ScheduleSection) -> Result<RunReport> {
        let start = Instant::now();
        let artifacts = self.compile(schedule)?;
        let ddi = ddi_constants(&self.instance, schedule.epsilon)?;
        let mut sim = Simulator::new(self.config.spins.clone(), ddi)?;
        let outcome = sim.run(
            &initial_state(self.instance.sites()),
            &artifacts.pulses,
            RunOptions {
                max_steps: self.config.output.max_steps,
                snapshot_target: Some(self.target.basis_index()),
            },
        )?;
        let cache: CacheStats = outcome.cache;
        Ok(RunReport {
            stamp: self.stamp.clone(),
            mode: Mode::Pulse,
            schedule: *schedule,
            steps_run: outcome.steps_run,
            truncated: outcome.truncated,
            summary: summarize(&outcome.state, &self.target, self.config.output.top_k, outcome.norm_drift),
            wall_time_s: self.timer()(start),
            pulse: Some(PulseDiagnostics {
                events_applied: outcome.events_applied,
                cache_hits: cache.hits,
                cache_misses: cache.misses,
                cache_hit_ratio: cache.hit_ratio(),
                pulses: artifacts.report.pulses,
                selectivity: artifacts.report.selectivity,
                snapshots: outcome.snapshots.iter().map(Into::into).collect(),
            }),
        })
    }

    /// Distance between each gate-level step and the exact step operator.
    pub fn ir_verify(&self, schedule: &ScheduleSection) -> Result<Vec<IrVerifyRow>> {
        let s = schedule.schedule()?;
        let ddi = ddi_constants(&self.instance, schedule.epsilon)?;
        let program = build_program(&self.instance, &s, &ddi)?;
        let h0 = build_initial_hamiltonian(s.h, self.instance.sites())?;
        let hf = build_target_hamiltonian(&self.instance);
        let eval = IdealEvaluator::new(&ddi);
        let limit = self.config.output.max_steps.unwrap_or(usize::MAX);
        program
            .steps
            .iter()
            .take(limit)
            .map(|step| {
                let gate = eval.matrix(&step.instructions)?;
                let exact = step_unitary(step.index, &s, &h0, &hf)?;
                Ok(IrVerifyRow {
                    step: step.index,
                    distance: gate.distance(&exact),
                    distance_up_to_phase: gate.distance_up_to_phase(&exact),
                    pulses: step.stats().pulses(),
                    free_intervals: step.stats().free_intervals,
                })
            })
            .collect()
    }

    fn run_point(&self, mode: Mode, schedule: &ScheduleSection) -> Result<RunReport> {
        match mode {
            Mode::Pulse => self.run_pulse(schedule),
            _ => self.run_ideal(schedule),
        }
    }

    /// Runs every grid point, reusing checkpoints from `checkpoint_dir`.
    pub fn sweep(&self, checkpoint_dir: Option<&Path>) -> Result<Vec<SweepRow>> {
        let sweep = self
            .config
            .sweep
            .as_ref()
            .ok_or_else(|| Error::config("sweep", "missing sweep section"))?;
        if let Some(dir) = checkpoint_dir {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let run = |(i, &value): (usize, &f64)| -> Result<SweepRow> {
            let checkpoint = checkpoint_dir.map(|d| d.join(format!("point-{i:04}.json")));
            if let Some(path) = &checkpoint {
                if let Some(row) = read_checkpoint(path, &self.stamp)? {
                    return Ok(row);
                }
            }
            let mut schedule = self.config.schedule;
            match sweep.axis {
                SweepAxis::Dt => schedule.dt = value,
                SweepAxis::H => schedule.h = value,
                SweepAxis::Steps => schedule.steps = value as usize,
                SweepAxis::Epsilon => schedule.epsilon = value,
            }
            let report = self.run_point(sweep.mode, &schedule)?;
            let row = SweepRow {
                index: i,
                value,
                fidelity: report.summary.target.probability,
                second_probability: report.summary.swap.probability,
                norm_drift: report.summary.norm_drift,
                wall_time_s: report.wall_time_s,
            };
            if let Some(path) = &checkpoint {
                write_checkpoint(path, &self.stamp, &row)?;
            }
            Ok(row)
        };
        let grid: Vec<(usize, &f64)> = sweep.values.iter().enumerate().collect();
        let workers = self.config.output.workers.unwrap_or_else(rayon::current_num_threads);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config("output.workers", e.to_string()))?;
        // Collecting an indexed parallel iterator keeps grid order.
        pool.install(|| grid.into_par_iter().map(run).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub stamp: Stamp,
    pub schedule: ScheduleSection,
    pub instructions: ProgramStats,
    pub per_step_instructions: ProgramStats,
    pub pulses: PulseStats,
    pub per_step_pulses: PulseStats,
    pub selectivity: SelectivityReport,
}

pub struct CompileArtifacts {
    pub program_text: String,
    pub pulses: PulseProgram,
    pub report: CompileReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrVerifyRow {
    pub step: usize,
    pub distance: f64,
    pub distance_up_to_phase: f64,
    pub pulses: usize,
    pub free_intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(skip)]
    pub index: usize,
    pub value: f64,
    pub fidelity: f64,
    pub second_probability: f64,
    pub norm_drift: f64,
    pub wall_time_s: f64,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    stamp: Stamp,
    index: usize,
    row: SweepRow,
}

fn read_checkpoint(path: &Path, stamp: &Stamp) -> Result<Option<SweepRow>> {
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(None);
    };
    // Stale or unreadable checkpoints are recomputed.
    match serde_json::from_str::<Checkpoint>(&text) {
        Ok(c) if c.stamp == *stamp => Ok(Some(SweepRow { index: c.index, ..c.row })),
        _ => Ok(None),
    }
}

fn write_checkpoint(path: &Path, stamp: &Stamp, row: &SweepRow) -> Result<()> {
    let c = Checkpoint {
        stamp: stamp.clone(),
        index: row.index,
        row: row.clone(),
    };
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string_pretty(&c)?).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// `{:.16e}`, the fixed float format of every artifact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_header(stamp: &Stamp) -> String {
    format!("# config_hash = {}\n# version = {}\n", stamp.config_hash, stamp.version)
}

/// CSV text with a provenance comment header.
pub fn to_csv<R, F>(stamp: &Stamp, header: &[&str], rows: &[R], fields: F) -> Result<String>
where
    F: Fn(&R) -> Vec<String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(fields(r))?;
    }
    let body = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(csv_header(stamp) + &String::from_utf8(body).expect("csv output is UTF-8"))
}

pub fn sweep_csv(stamp: &Stamp, axis: SweepAxis, rows: &[SweepRow]) -> Result<String> {
    let axis = match axis {
        SweepAxis::Dt => "dt",
        SweepAxis::H => "h",
        SweepAxis::Steps => "steps",
        SweepAxis::Epsilon => "epsilon",
    };
    to_csv(
        stamp,
        &[axis, "fidelity", "second_probability", "norm_drift", "wall_time_s"],
        rows,
        |r| {
            vec![
                fmt_f64(r.value),
                fmt_f64(r.fidelity),
                fmt_f64(r.second_probability),
                fmt_f64(r.norm_drift),
                fmt_f64(r.wall_time_s),
            ]
        },
    )
}

/// Reads a sweep CSV back, skipping the comment header.
pub fn read_sweep_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse {
                    line: rec.position().map_or(0, |p| p.line() as usize),
                    message: format!("bad column {i}"),
                })
        };
        out.push((parse(0)?, parse(1)?));
    }
    Ok(out)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Runs the configured mode and writes its artifacts under `out`.
pub fn run(config: ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let resolved = Resolved::new(config)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let stamp = &resolved.stamp;
    let schedule = resolved.config.schedule;
    let mut written = Vec::new();
    match resolved.config.mode {
        Mode::Oracle => {
            let (report, rows) = run_oracle(&resolved.instance, stamp)?;
            written.push(write(out, "oracle.json", &json(&report)?)?);
            let csv = to_csv(stamp, &["index", "projections", "weight", "energy"], &rows, |r| {
                vec![r.index.to_string(), r.projections.clone(), fmt_f64(r.weight), fmt_f64(r.energy)]
            })?;
            written.push(write(out, "weights.csv", &csv)?);
        }
        Mode::Ideal => {
            written.push(write(out, "ideal.json", &json(&resolved.run_ideal(&schedule)?)?)?);
        }
        Mode::IrVerify => {
            let rows = resolved.ir_verify(&schedule)?;
            let csv = to_csv(
                stamp,
                &["step", "distance", "distance_up_to_phase", "pulses", "free_intervals"],
                &rows,
                |r| {
                    vec![
                        r.step.to_string(),
                        fmt_f64(r.distance),
                        fmt_f64(r.distance_up_to_phase),
                        r.pulses.to_string(),
                        r.free_intervals.to_string(),
                    ]
                },
            )?;
            written.push(write(out, "ir_verify.csv", &csv)?);
        }
        Mode::Compile => {
            let a = resolved.compile(&schedule)?;
            written.push(write(out, "program.txt", &a.program_text)?);
            written.push(write(out, "pulses.txt", &a.pulses.to_text())?);
            written.push(write(out, "compile.json", &json(&a.report)?)?);
        }
        Mode::Pulse => {
            let report = resolved.run_pulse(&schedule)?;
            written.push(write(out, "pulse.json", &json(&report)?)?);
        }
    }
    Ok(written)
}

/// Runs the configured sweep and writes `sweep.csv` under `out`.
pub fn run_sweep(config: ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let resolved = Resolved::new(config)?;
    let axis = resolved
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "missing sweep section"))?
        .axis;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let rows = resolved.sweep(Some(&out.join("checkpoints")))?;
    write(out, "sweep.csv", &sweep_csv(&resolved.stamp, axis, &rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips_through_toml() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::parse("mode = \"oracle\"\n").unwrap();
        assert_eq!(c.mode, Mode::Oracle);
        assert_eq!(c.schedule, ScheduleSection::default());
        assert_eq!(c.spins, SpinSystemConfig::default());
    }

    #[test]
    fn invalid_fields_are_named() {
        let err = ExperimentConfig::parse("mode = \"ideal\"\n[schedule]\nsteps = 0\ndt = 0.1\nh = 1\nepsilon = 0\n")
            .unwrap_err();
        assert!(err.to_string().contains("schedule.steps"));
        let err = ExperimentConfig::parse("mode = \"ideal\"\n[sweep]\naxis = \"h\"\nvalues = []\n").unwrap_err();
        assert!(err.to_string().contains("sweep.values"));
        assert!(ExperimentConfig::parse("mode = \"annealing\"\n").is_err());
        assert!(ExperimentConfig::parse("mode = \"ideal\"\ncolour = 1\n").is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output.dir = "elsewhere".into();
        b.output.workers = Some(3);
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.schedule.h = 6.0;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn default_target_is_preferred_minimizer() {
        let r = Resolved::new(ExperimentConfig::default()).unwrap();
        assert_eq!(r.target.active(), &[-1, 0, -1, 1, -1]);
        let mut c = ExperimentConfig::default();
        c.target.projections = Some(vec![0, -1, 0, 1, 0]);
        assert_eq!(Resolved::new(c).unwrap().target.basis_index(), 145);
    }

    #[test]
    fn partition_groups_points() {
        let inst = ClusteringInstance::example();
        let a = ClusterAssignment::new(vec![-1, 0, -1, 1, -1]).unwrap();
        let groups = partition(&a, &inst);
        assert_eq!(groups[0], vec![Point::new(4., -2.), Point::new(-2., -6.)]);
        assert_eq!(groups[1], vec![Point::new(6., -9.)]);
        assert_eq!(groups[2].len(), 3);
    }

    #[test]
    fn sweep_csv_round_trip() {
        let stamp = Stamp {
            config_hash: "h".into(),
            version: VERSION.into(),
        };
        let rows = vec![SweepRow {
            index: 0,
            value: 0.1,
            fidelity: 0.25,
            second_probability: 0.0,
            norm_drift: 0.0,
            wall_time_s: 0.0,
        }];
        let text = sweep_csv(&stamp, SweepAxis::H, &rows).unwrap();
        assert!(text.starts_with("# config_hash = h\n"));
        assert_eq!(read_sweep_csv(&text).unwrap(), vec![(0.1, 0.25)]);
    }
}
