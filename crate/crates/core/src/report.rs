//! Bond-length scans, per-cell records and the derived tables and curves.
//!
//! A scan walks the grid in ascending order and, at each bond length, solves
//! the requested states in VQD order, ground first. Every `(r, state)` cell
//! yields one [`RunRecord`], handed to the sink as soon as it exists.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_h2_ansatz_with, AnsatzOptions, BlockKind};
use crate::chem::{H2Problem, Level, StateLabel};
use crate::error::{Error, Result};
use crate::objective::{Evaluation, Objective, VqdContext, DEFAULT_CONSTRAINT_WEIGHT, DEFAULT_DEFLATION_WEIGHT};
use crate::optim::{gmig_vqe, ordinary_vqe, GaConfig, GaSummary, GmigConfig, GmigOutcome, LsConfig, LsMethod, Selector, Termination};
use crate::pauli::inner_product_sq;

pub const SCHEMA_VERSION: u32 = 1;
/// Log errors of exactly converged cells are clamped here.
pub const LOG_ERROR_FLOOR: f64 = -16.0;
/// Overlap with an earlier state above which a cell is flagged.
pub const OVERLAP_FLAG: f64 = 1e-4;
const GRID_DECIMALS: i32 = 12;

/// `max(log10|a − b|, −16)`.
pub fn log_error(calc: f64, exact: f64) -> f64 {
    (calc - exact).abs().log10().max(LOG_ERROR_FLOOR)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "ordinary-vqe", alias = "ordinary")]
    Ordinary,
    #[serde(rename = "gmig")]
    Gmig,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Ordinary => "ordinary-vqe",
            Mode::Gmig => "gmig",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" | "ordinary-vqe" => Ok(Mode::Ordinary),
            "gmig" => Ok(Mode::Gmig),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    /// Rank candidates against the exact level.
    #[default]
    Benchmark,
    /// Rank candidates by F alone.
    Production,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub states: Vec<StateLabel>,
    pub mode: Mode,
    pub ls: LsMethod,
    /// Overrides the mode's default iteration budget.
    pub ls_max_iterations: Option<usize>,
    pub seed: u64,
    pub deflation_weight: f64,
    pub constraint_weight: f64,
    pub selector: SelectorKind,
    pub ansatz: AnsatzOptions,
    pub ga: GaConfig,
    pub freeze_pinned_in_ls: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            r_min: 0.1,
            r_max: 2.5,
            r_step: 0.1,
            states: StateLabel::ALL.to_vec(),
            mode: Mode::Gmig,
            ls: LsMethod::Newton,
            ls_max_iterations: None,
            seed: 0,
            deflation_weight: DEFAULT_DEFLATION_WEIGHT,
            constraint_weight: DEFAULT_CONSTRAINT_WEIGHT,
            selector: SelectorKind::Benchmark,
            ansatz: AnsatzOptions::default(),
            ga: GaConfig::default(),
            freeze_pinned_in_ls: false,
        }
    }
}

impl ScanConfig {
    /// Bond lengths `r_min, r_min + step, …` up to `r_max` inclusive, rounded
    /// to 12 decimals so that `0.1 + 0.2` lands on `0.3`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let scale = 10f64.powi(GRID_DECIMALS);
        let count = ((self.r_max - self.r_min) / self.r_step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|k| ((self.r_min + k as f64 * self.r_step) * scale).round() / scale)
            .collect())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_max.is_finite() && self.r_step.is_finite()) {
            return Err(Error::Input("grid bounds must be finite".into()));
        }
        if self.r_min <= 0.0 || self.r_max < self.r_min || self.r_step <= 0.0 {
            return Err(Error::Input(format!(
                "need 0 < r_min ≤ r_max and r_step > 0, got {}..{} step {}",
                self.r_min, self.r_max, self.r_step
            )));
        }
        if self.states.is_empty() {
            return Err(Error::Input("no states requested".into()));
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.index() != i {
                return Err(Error::Input(format!(
                    "states must follow VQD order starting at ground; got {:?}",
                    self.states.iter().map(|s| s.as_str()).collect::<Vec<_>>()
                )));
            }
        }
        if !(self.deflation_weight.is_finite() && self.deflation_weight >= 0.0) {
            return Err(Error::Input("deflation weight must be finite and nonnegative".into()));
        }
        if !(self.constraint_weight.is_finite() && self.constraint_weight >= 0.0) {
            return Err(Error::Input("constraint weight must be finite and nonnegative".into()));
        }
        if self.ls_max_iterations == Some(0) {
            return Err(Error::Input("ls_max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn ls_config(&self) -> LsConfig {
        let mut cfg = match self.mode {
            Mode::Gmig => LsConfig::gmig(self.ls),
            Mode::Ordinary => LsConfig::ordinary(self.ls),
        };
        if let Some(n) = self.ls_max_iterations {
            cfg.max_iterations = n;
        }
        cfg
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// RNG stream for one cell. Derived from the bond length in micro-ångström
/// so a cell reproduces regardless of the grid around it.
pub fn cell_stream(r: f64, state: StateLabel) -> u64 {
    ((r * 1e6).round() as u64) << 4 | state.index() as u64
}

pub fn cell_rng(seed: u64, r: f64, state: StateLabel) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell_stream(r, state));
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub index: usize,
    /// Rank of the starting individual in the final GA population.
    pub rank: usize,
    pub f_ga_end: f64,
    pub f_ls_end: f64,
    pub log_error_ga_end: Option<f64>,
    pub log_error_ls_end: Option<f64>,
    pub termination: Option<Termination>,
    pub padded: bool,
    pub discarded: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub r: f64,
    pub state: StateLabel,
    pub mode: Mode,
    pub ls_method: LsMethod,
    pub status: CellStatus,
    pub error: Option<String>,
    pub e_calc: Option<f64>,
    pub e_ref: Option<f64>,
    pub log_error: Option<f64>,
    pub evaluation: Option<Evaluation>,
    pub theta: Vec<f64>,
    /// `|⟨ψ|ψ_j⟩|²` against each earlier state at this bond length.
    pub overlaps: Vec<f64>,
    pub candidates: Vec<CandidateRow>,
    pub ga: Option<GaSummary>,
    pub evaluations: u64,
    pub wall_seconds: f64,
    pub seed: u64,
    pub stream: u64,
    pub flags: Vec<String>,
    pub config: ScanConfig,
}

impl RunRecord {
    fn failed(r: f64, state: StateLabel, config: &ScanConfig, e_ref: Option<f64>, reason: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            r,
            state,
            mode: config.mode,
            ls_method: config.ls,
            status: CellStatus::Failed,
            error: Some(reason),
            e_calc: None,
            e_ref,
            log_error: None,
            evaluation: None,
            theta: Vec::new(),
            overlaps: Vec::new(),
            candidates: Vec::new(),
            ga: None,
            evaluations: 0,
            wall_seconds: 0.0,
            seed: config.seed,
            stream: cell_stream(r, state),
            flags: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }
}

/// Solves one state given the states already found at this bond length.
fn solve_cell(
    problem: &H2Problem,
    level: &Level,
    state: StateLabel,
    context: &mut VqdContext,
    pinned: &mut [Option<f64>],
    config: &ScanConfig,
) -> Result<RunRecord> {
    let start = Instant::now();
    let spec = build_h2_ansatz_with(&problem.hamiltonian, &config.ansatz)?;
    let reference = problem.reference_state();
    let h = &problem.hamiltonian.pauli_sum;
    let selector = match config.selector {
        SelectorKind::Benchmark => Selector::Benchmark { reference: level.energy },
        SelectorKind::Production => Selector::Production,
    };
    let r = problem.bond_length;
    let stream = cell_stream(r, state);

    let (outcome, evaluation, psi) = {
        let objective = Objective::new(&spec, h, &reference, context);
        let f = |theta: &[f64]| objective.value(theta);
        let outcome: GmigOutcome = match config.mode {
            Mode::Gmig => {
                let gmig = GmigConfig {
                    ga: config.ga.clone(),
                    ls: config.ls_config(),
                    freeze_pinned_in_ls: config.freeze_pinned_in_ls,
                };
                let free = vec![None; spec.num_parameters()];
                let pins = if state.index() == 0 { &free[..] } else { &pinned[..] };
                let mut rng = cell_rng(config.seed, r, state);
                gmig_vqe(&f, &spec.bounds(), pins, &gmig, &selector, &mut rng)?
            }
            Mode::Ordinary => {
                let theta0 = vec![0.0; spec.num_parameters()];
                ordinary_vqe(&f, &theta0, &config.ls_config(), &selector)?
            }
        };
        let theta = &outcome.best().theta;
        let evaluation = objective.evaluate(theta)?;
        let psi = objective.state(theta)?;
        (outcome, evaluation, psi)
    };

    let overlaps = context
        .found_states
        .iter()
        .map(|s| inner_product_sq(&psi, &s.state))
        .collect::<Result<Vec<_>>>()?;
    let mut flags = Vec::new();
    if outcome.padded {
        flags.push("candidates_padded".to_string());
    }
    if overlaps.iter().any(|&o| o > OVERLAP_FLAG) {
        flags.push("overlap_above_threshold".to_string());
    }
    if state.index() > 0 {
        let ground = problem.targets()?[0].energy;
        if config.deflation_weight <= level.energy - ground {
            flags.push("deflation_weight_below_gap".to_string());
        }
    }
    if let Some(ga) = &outcome.ga {
        if !ga.converged {
            flags.push("ga_generation_cap".to_string());
        }
    }

    let winner = outcome.best().theta.clone();
    if state.index() == 0 {
        for k in spec.indices_of(BlockKind::Hamiltonian) {
            pinned[k] = Some(winner[k]);
        }
    }
    context.push(psi, evaluation.energy);

    let e_ref = level.energy;
    let candidates = outcome
        .candidates
        .iter()
        .enumerate()
        .map(|(index, c)| CandidateRow {
            index,
            rank: c.rank,
            f_ga_end: c.f_start,
            f_ls_end: c.f,
            log_error_ga_end: c.f_start.is_finite().then(|| log_error(c.f_start, e_ref)),
            log_error_ls_end: c.f.is_finite().then(|| log_error(c.f, e_ref)),
            termination: c.termination,
            padded: c.padded,
            discarded: c.discarded.clone(),
        })
        .collect();

    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        r,
        state,
        mode: config.mode,
        ls_method: config.ls,
        status: CellStatus::Ok,
        error: None,
        e_calc: Some(evaluation.energy),
        e_ref: Some(e_ref),
        log_error: Some(log_error(evaluation.energy, e_ref)),
        evaluation: Some(evaluation),
        theta: winner,
        overlaps,
        candidates,
        ga: outcome.ga.clone(),
        evaluations: outcome.evaluations(),
        wall_seconds: start.elapsed().as_secs_f64(),
        seed: config.seed,
        stream,
        flags,
        config: config.clone(),
    })
}

/// Solves the configured states at one bond length. A failed state fails
/// every later state at the same bond length.
pub fn run_bond_length(r: f64, config: &ScanConfig, sink: &mut dyn FnMut(RunRecord) -> Result<()>) -> Result<()> {
    let setup = H2Problem::new(r).and_then(|p| {
        let targets = p.targets()?;
        Ok((p, targets))
    });
    let (problem, targets) = match setup {
        Ok(v) => v,
        Err(e) => {
            for &state in &config.states {
                sink(RunRecord::failed(r, state, config, None, format!("setup: {e}")))?;
            }
            return Ok(());
        }
    };
    let nq = problem.hamiltonian.qubit_count;
    let mut context = VqdContext::with_particle_number(nq, problem.integrals.n_electrons)
        .with_deflation_weight(config.deflation_weight);
    for c in &mut context.constraints {
        c.weight = config.constraint_weight;
    }
    let mut pinned = vec![None; build_h2_ansatz_with(&problem.hamiltonian, &config.ansatz)?.num_parameters()];
    let mut blocked: Option<String> = None;
    for &state in &config.states {
        let level = &targets[state.index()];
        if let Some(reason) = &blocked {
            sink(RunRecord::failed(r, state, config, Some(level.energy), reason.clone()))?;
            continue;
        }
        match solve_cell(&problem, level, state, &mut context, &mut pinned, config) {
            Ok(rec) => sink(rec)?,
            Err(e) => {
                blocked = Some(format!("earlier state {} failed", state.as_str()));
                sink(RunRecord::failed(r, state, config, Some(level.energy), e.to_string()))?;
            }
        }
    }
    Ok(())
}

/// Runs the whole grid. Records reach `sink` in (r, state) order.
pub fn run_scan(config: &ScanConfig, sink: &mut dyn FnMut(RunRecord) -> Result<()>) -> Result<()> {
    for r in config.grid()? {
        run_bond_length(r, config, sink)?;
    }
    Ok(())
}

/// Runs the grid, appending each record to a JSON-lines file as it arrives,
/// and returns the records.
pub fn run_scan_to_file(config: &ScanConfig, path: &Path) -> Result<Vec<RunRecord>> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut records = Vec::new();
    run_scan(config, &mut |rec| {
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
        out.flush()?;
        records.push(rec);
        Ok(())
    })?;
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RunRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), n + 1)))?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "{}:{}: schema version {} (expected {SCHEMA_VERSION})",
                path.display(),
                n + 1,
                rec.schema_version
            )));
        }
        records.push(rec);
    }
    Ok(records)
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryCell {
    pub mode: Mode,
    pub ls_method: LsMethod,
    pub state: StateLabel,
    /// `None` when no successful record exists for the cell.
    pub mean_log_error: Option<f64>,
    pub count: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub cells: Vec<SummaryCell>,
    /// Total wall time per (mode, method).
    pub wall_seconds: Vec<(Mode, LsMethod, f64)>,
}

/// Mean log error per (mode, method, state) and total wall time per
/// (mode, method). Cells without a successful record stay empty.
pub fn summarize(records: &[RunRecord]) -> Summary {
    // Per state: successful log errors and the failed-cell count.
    type StateCells = BTreeMap<StateLabel, (Vec<f64>, usize)>;
    let mut groups: BTreeMap<(Mode, LsMethod), StateCells> = BTreeMap::new();
    let mut wall: BTreeMap<(Mode, LsMethod), f64> = BTreeMap::new();
    for rec in records {
        let key = (rec.mode, rec.ls_method);
        let cell = groups.entry(key).or_default().entry(rec.state).or_default();
        match rec.log_error {
            Some(le) if rec.is_ok() => cell.0.push(le),
            _ => cell.1 += 1,
        }
        *wall.entry(key).or_default() += rec.wall_seconds;
    }
    let mut cells = Vec::new();
    for (&(mode, ls_method), states) in &groups {
        for state in StateLabel::ALL {
            let (values, failed) = states.get(&state).cloned().unwrap_or_default();
            cells.push(SummaryCell {
                mode,
                ls_method,
                state,
                mean_log_error: (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64),
                count: values.len(),
                failed,
            });
        }
    }
    Summary {
        cells,
        wall_seconds: wall.into_iter().map(|((m, l), w)| (m, l, w)).collect(),
    }
}

impl Summary {
    fn rows(&self) -> Vec<((Mode, LsMethod), Vec<&SummaryCell>)> {
        let mut rows: BTreeMap<(Mode, LsMethod), Vec<&SummaryCell>> = BTreeMap::new();
        for c in &self.cells {
            rows.entry((c.mode, c.ls_method)).or_default().push(c);
        }
        rows.into_iter().collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["mode".to_string(), "method".to_string()];
        for s in StateLabel::ALL {
            header.push(s.as_str().to_string());
        }
        header.push("wall_seconds".into());
        w.write_record(&header)?;
        for ((mode, ls), cells) in self.rows() {
            let mut row = vec![mode.as_str().to_string(), ls.as_str().to_string()];
            for c in cells {
                row.push(c.mean_log_error.map_or_else(|| "missing".to_string(), fmt_num));
            }
            let wall = self
                .wall_seconds
                .iter()
                .find(|(m, l, _)| *m == mode && *l == ls)
                .map_or(0.0, |t| t.2);
            row.push(fmt_num(wall));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Plain-text table, one row per (mode, method).
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<14}{:<13}", "mode", "method");
        for s in StateLabel::ALL {
            let _ = write!(out, "{:>11}", s.as_str());
        }
        let _ = writeln!(out, "{:>12}", "wall [s]");
        for ((mode, ls), cells) in self.rows() {
            let _ = write!(out, "{:<14}{:<13}", mode.as_str(), ls.as_str());
            for c in cells {
                match c.mean_log_error {
                    Some(v) => {
                        let _ = write!(out, "{v:>11.4}");
                    }
                    None => {
                        let _ = write!(out, "{:>11}", "missing");
                    }
                }
            }
            let wall = self
                .wall_seconds
                .iter()
                .find(|(m, l, _)| *m == mode && *l == ls)
                .map_or(0.0, |t| t.2);
            let _ = writeln!(out, "{wall:>12.2}");
        }
        out
    }
}

/// Records of one (mode, method) group keyed by bond length, in grid order.
fn by_r<'a>(records: &[&'a RunRecord]) -> Vec<(f64, BTreeMap<StateLabel, &'a RunRecord>)> {
    let mut rows: Vec<(f64, BTreeMap<StateLabel, &RunRecord>)> = Vec::new();
    for rec in records {
        match rows.iter_mut().find(|(r, _)| *r == rec.r) {
            Some((_, m)) => {
                m.insert(rec.state, rec);
            }
            None => rows.push((rec.r, BTreeMap::from([(rec.state, *rec)]))),
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows
}

/// Paths written by [`emit_curves`].
#[derive(Clone, Debug, PartialEq)]
pub struct CurveFiles {
    pub energies: std::path::PathBuf,
    pub log_errors: std::path::PathBuf,
    pub candidates: std::path::PathBuf,
}

/// Writes energy, log-error and candidate CSVs for one (mode, method) group
/// into `dir`, with file names suffixed by the group.
pub fn emit_curves(records: &[RunRecord], mode: Mode, ls: LsMethod, dir: &Path) -> Result<CurveFiles> {
    let group: Vec<&RunRecord> = records.iter().filter(|r| r.mode == mode && r.ls_method == ls).collect();
    let rows = by_r(&group);
    let tag = format!("{}_{}", mode.as_str(), ls.as_str());
    let files = CurveFiles {
        energies: dir.join(format!("energies_{tag}.csv")),
        log_errors: dir.join(format!("log_errors_{tag}.csv")),
        candidates: dir.join(format!("candidates_{tag}.csv")),
    };

    let mut w = csv::Writer::from_path(&files.energies)?;
    let mut header = vec!["r".to_string()];
    for s in StateLabel::ALL {
        header.push(s.as_str().to_string());
        header.push(format!("{}(e)", s.as_str()));
    }
    w.write_record(&header)?;
    for (r, states) in &rows {
        let mut row = vec![fmt_num(*r)];
        for s in StateLabel::ALL {
            let rec = states.get(&s);
            row.push(fmt_opt(rec.and_then(|x| x.e_calc)));
            row.push(fmt_opt(rec.and_then(|x| x.e_ref)));
        }
        w.write_record(&row)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(&files.log_errors)?;
    let mut header = vec!["r".to_string()];
    header.extend(StateLabel::ALL.iter().map(|s| s.as_str().to_string()));
    w.write_record(&header)?;
    for (r, states) in &rows {
        let mut row = vec![fmt_num(*r)];
        for s in StateLabel::ALL {
            row.push(fmt_opt(states.get(&s).and_then(|x| x.log_error)));
        }
        w.write_record(&row)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(&files.candidates)?;
    w.write_record(["r", "state", "candidate", "log_error_ga_end", "log_error_ls_end"])?;
    for (r, states) in &rows {
        for (s, rec) in states {
            for c in &rec.candidates {
                w.write_record([
                    fmt_num(*r),
                    s.as_str().to_string(),
                    c.index.to_string(),
                    fmt_opt(c.log_error_ga_end),
                    fmt_opt(c.log_error_ls_end),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(files)
}

/// Distinct (mode, method) pairs present in `records`.
pub fn groups(records: &[RunRecord]) -> Vec<(Mode, LsMethod)> {
    let mut g: Vec<(Mode, LsMethod)> = records.iter().map(|r| (r.mode, r.ls_method)).collect();
    g.sort();
    g.dedup();
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_25_points() {
        let g = ScanConfig::default().grid().unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[24], 2.5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn states_must_be_vqd_prefix() {
        let mut cfg = ScanConfig {
            states: vec![StateLabel::Ground, StateLabel::Singlet],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.states = vec![StateLabel::Triplet];
        assert!(cfg.validate().is_err());
        cfg.states = vec![StateLabel::Ground, StateLabel::Triplet];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn bad_grid_rejected() {
        let cfg = ScanConfig {
            r_step: 0.0,
            ..Default::default()
        };
        assert!(cfg.grid().is_err());
        let cfg = ScanConfig {
            r_min: 2.0,
            r_max: 1.0,
            ..Default::default()
        };
        assert!(cfg.grid().is_err());
    }

    #[test]
    fn log_error_is_floored() {
        assert_eq!(log_error(-1.0, -1.0), LOG_ERROR_FLOOR);
        assert!((log_error(1e-6, 0.0) + 6.0).abs() < 1e-12);
    }

    #[test]
    fn config_json_round_trip_and_unknown_fields() {
        let cfg = ScanConfig {
            mode: Mode::Ordinary,
            ls: LsMethod::NelderMead,
            ..Default::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ScanConfig::from_json(&text).unwrap(), cfg);
        assert!(ScanConfig::from_json(r#"{"r_min": 0.5, "bogus": 1}"#).is_err());
        let partial = ScanConfig::from_json(r#"{"mode": "ordinary", "ls": "bfgs"}"#).unwrap();
        assert_eq!(partial.mode, Mode::Ordinary);
        assert_eq!(partial.r_max, 2.5);
    }

    #[test]
    fn streams_distinguish_cells() {
        let a = cell_stream(0.7, StateLabel::Ground);
        assert_ne!(a, cell_stream(0.7, StateLabel::Triplet));
        assert_ne!(a, cell_stream(0.8, StateLabel::Ground));
        assert_eq!(a, cell_stream(0.1 * 7.0, StateLabel::Ground));
    }

    #[test]
    fn single_record_summary() {
        let mut rec = RunRecord::failed(0.7, StateLabel::Ground, &ScanConfig::default(), Some(-1.0), String::new());
        rec.status = CellStatus::Ok;
        rec.error = None;
        rec.log_error = Some(-6.0);
        let s = summarize(&[rec]);
        let ground = s.cells.iter().find(|c| c.state == StateLabel::Ground).unwrap();
        assert_eq!(ground.mean_log_error, Some(-6.0));
        let triplet = s.cells.iter().find(|c| c.state == StateLabel::Triplet).unwrap();
        assert_eq!(triplet.mean_log_error, None);
        assert!(s.to_table().contains("missing"));
    }
}
