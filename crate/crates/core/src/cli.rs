//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
//! invariant violation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convexroof::{
    analytic_mixed_tangle, decomposition, equal_weight_family, optimize_roof_with, spectral_family, Intermediates,
    RoofObjective, RoofOptions,
};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_mixed, concurrence_pure, monogamy_residual, tangle_of_vector, three_tangle_acin, three_tangle_pure,
};
use crate::qmat::{Qubit, Register, RANK_TOL};
use crate::states::{AcinParams, DensityMatrix, LoadedState, PureState, StateFile};
use crate::unruh::{particle_sector_closed_form, particle_sector_state, reduced_state, RindlerParams, UnruhModeParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "unruh-tangle",
    version,
    about = "Entanglement degradation under the single-mode Unruh channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the state's JSON description.
    State(StateArgs),
    /// Apply the channel to one party and print the reduced density matrix.
    Channel(ChannelArgs),
    /// Evaluate an entanglement measure, optionally after acceleration.
    Measure(MeasureArgs),
    /// Tabulate the mixed three-tangle over a grid of angles as CSV.
    Sweep(SweepArgs),
    /// Run a seeded verification battery.
    Verify(VerifyArgs),
}

/// Exactly one way of naming the input state.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceChoice {
    /// ghz, w or bell00.
    #[arg(long)]
    pub named: Option<String>,
    /// Canonical weights `l0,l1,l2,l3,l4`.
    #[arg(long, value_name = "L0,L1,L2,L3,L4")]
    pub acin: Option<String>,
    /// JSON state file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Haar-random pure state from this seed.
    #[arg(long)]
    pub random_seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[command(flatten)]
    pub choice: SourceChoice,
    #[arg(long, default_value_t = 0.0, requires = "acin", allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 3, requires = "random_seed")]
    pub qubits: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    /// Statistical angle in radians, within [0, π/4].
    #[arg(long, conflicts_with = "accel")]
    pub r: Option<f64>,
    /// Proper acceleration; r follows from cos r = (1 + exp(−2πωc/a))^(−1/2).
    #[arg(long)]
    pub accel: Option<f64>,
    #[arg(long, default_value_t = 1.0, requires = "accel")]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0, requires = "accel")]
    pub c: f64,
}

impl AngleArgs {
    fn resolve(&self) -> Result<Option<RindlerParams>> {
        match (self.r, self.accel) {
            (Some(r), None) => RindlerParams::from_angle(r).map(Some),
            (None, Some(a)) => RindlerParams::from_acceleration(a, self.omega, self.c).map(Some),
            (None, None) => Ok(None),
            (Some(_), Some(_)) => Err(Error::InvalidParams("give either --r or --accel, not both".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub party: Qubit,
    #[command(flatten)]
    pub angle: AngleArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Concurrence,
    ThreeTangle,
    Monogamy,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Accelerated party; requires an angle.
    #[arg(long)]
    pub party: Option<Qubit>,
    #[command(flatten)]
    pub angle: AngleArgs,
    /// Optimizer starts for mixed three-tangle and monogamy.
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub party: Qubit,
    #[arg(long, default_value_t = 0.0, conflicts_with_all = ["accel_start", "accel_stop"])]
    pub r_start: f64,
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub r_stop: f64,
    #[arg(long, default_value_t = 9)]
    pub steps: usize,
    /// Log-spaced acceleration grid instead of an angle grid.
    #[arg(long, requires = "accel_stop")]
    pub accel_start: Option<f64>,
    #[arg(long, requires = "accel_start")]
    pub accel_stop: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the optimizer; its columns are left empty.
    #[arg(long)]
    pub no_optimize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Theorem1,
    Theorem2,
    Identities,
    Sector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Analytic,
    Spectral,
    Optimizer,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Defaults to 200, 100 (20 on the optimizer route), 1000 and 50 for the four suites.
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Only used by theorem2.
    #[arg(long, value_enum, default_value_t = Route::Analytic)]
    pub route: Route,
    #[arg(long)]
    pub json: bool,
}

/// Parse `args` (including the program name) and run, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout().lock();
    match execute(&cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvariantViolation(_) => EXIT_INVARIANT,
        _ => EXIT_USAGE,
    }
}

pub fn execute(cmd: &Command, out: &mut impl std::io::Write) -> Result<i32> {
    let text = match cmd {
        Command::State(a) => cmd_state(a)?,
        Command::Channel(a) => cmd_channel(a)?,
        Command::Measure(a) => cmd_measure(a)?,
        Command::Sweep(a) => {
            let csv = cmd_sweep(a)?;
            if let Some(path) = &a.out {
                std::fs::write(path, &csv).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                String::new()
            } else {
                csv
            }
        }
        Command::Verify(a) => {
            let report = cmd_verify(a)?;
            let text = if a.json {
                serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
            } else {
                report.render()
            };
            write_out(out, &text);
            return Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED });
        }
    };
    write_out(out, &text);
    Ok(EXIT_OK)
}

fn write_out(out: &mut impl std::io::Write, text: &str) {
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn load(source: &SourceArgs) -> Result<LoadedState> {
    if let Some(name) = &source.choice.named {
        return Ok(LoadedState::Raw(PureState::named(name)?));
    }
    if let Some(spec) = &source.choice.acin {
        let parts: Vec<f64> = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("--acin {s:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let lambda: [f64; 5] = parts
            .try_into()
            .map_err(|v: Vec<f64>| Error::Parse(format!("--acin needs 5 weights, got {}", v.len())))?;
        return Ok(LoadedState::Acin(AcinParams::new(lambda, source.phi)?));
    }
    if let Some(path) = &source.choice.file {
        return StateFile::read(path)?.load();
    }
    if let Some(seed) = source.choice.random_seed {
        let register = Register::parties(source.qubits)?;
        return Ok(LoadedState::Raw(PureState::random(register, seed)));
    }
    Err(Error::InvalidParams("no state source given".into()))
}

fn cmd_state(a: &StateArgs) -> Result<String> {
    let loaded = load(&a.source)?;
    let file = match &loaded {
        LoadedState::Raw(psi) => {
            if a.source.choice.file.is_some() && (psi.normalization() - 1.0).abs() > 1e-15 {
                eprintln!("normalized input by 1/{}", psi.normalization());
            }
            StateFile::from_state(psi)
        }
        LoadedState::Acin(p) => StateFile::from_acin(p),
    };
    Ok(file.to_json() + "\n")
}

#[derive(Serialize)]
struct ChannelReport {
    register: Vec<String>,
    r: f64,
    /// Row-major `[re, im]` pairs.
    matrix: Vec<Vec<[f64; 2]>>,
    eigenvalues: Vec<f64>,
}

fn cmd_channel(a: &ChannelArgs) -> Result<String> {
    let psi = load(&a.source)?.pure();
    let r = a
        .angle
        .resolve()?
        .ok_or_else(|| Error::InvalidParams("channel needs --r or --accel".into()))?;
    let rho = reduced_state(&psi, a.party, &r)?;
    let m = rho.matrix();
    let report = ChannelReport {
        register: rho.register().labels().iter().map(|q| q.to_string()).collect(),
        r: r.r(),
        matrix: (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect(),
        eigenvalues: rho.eigen().values,
    };
    Ok(serde_json::to_string_pretty(&report).expect("reports serialize") + "\n")
}

#[derive(Debug, Serialize)]
pub struct MeasureReport {
    pub kind: KindArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub party: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Pure-state value, or the value of the unaccelerated input.
    pub initial: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimized: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_gap: Option<f64>,
}

impl MeasureReport {
    fn render(&self) -> String {
        let mut s = String::new();
        let kind = match self.kind {
            KindArg::Concurrence => "concurrence",
            KindArg::ThreeTangle => "three-tangle",
            KindArg::Monogamy => "monogamy",
        };
        let _ = writeln!(s, "kind: {kind}");
        if let (Some(p), Some(r)) = (&self.party, self.r) {
            let _ = writeln!(s, "party: {p}");
            let _ = writeln!(s, "r: {r}");
            let _ = writeln!(s, "initial: {}", self.initial);
        }
        if let Some(v) = self.value {
            let _ = writeln!(s, "value: {v}");
        }
        if let Some(p) = &self.provenance {
            let _ = writeln!(s, "provenance: {p}");
        }
        for (name, v) in [("analytic", self.analytic), ("optimized", self.optimized)] {
            if let Some(v) = v {
                let _ = writeln!(s, "{name}: {v}");
            }
        }
        if let Some(g) = self.abs_gap {
            let _ = writeln!(s, "abs_gap: {g:e}");
        }
        s
    }
}

/// Evaluate a measure as the `measure` subcommand does.
pub fn measure(a: &MeasureArgs) -> Result<MeasureReport> {
    let loaded = load(&a.source)?;
    let psi = loaded.pure();
    let angle = a.angle.resolve()?;
    let accelerated = match (a.party, angle) {
        (Some(p), Some(r)) => Some((p, r)),
        (None, None) => None,
        _ => {
            return Err(Error::InvalidParams(
                "--party and an angle must be given together".into(),
            ))
        }
    };
    let roof_opts = |objective| RoofOptions {
        starts: a.starts,
        seed: a.seed,
        objective,
        ..RoofOptions::default()
    };
    let mut report = MeasureReport {
        kind: a.kind,
        party: None,
        r: None,
        initial: 0.0,
        value: None,
        provenance: None,
        analytic: None,
        optimized: None,
        abs_gap: None,
    };
    let focus = a.party.unwrap_or(Qubit::A);
    report.initial = match a.kind {
        KindArg::Concurrence => concurrence_pure(&psi)?.value,
        KindArg::ThreeTangle => three_tangle_pure(&psi)?.value,
        KindArg::Monogamy => monogamy_residual(&psi, focus)?,
    };
    let Some((party, r)) = accelerated else {
        report.value = Some(report.initial);
        report.provenance = Some("analytic".into());
        return Ok(report);
    };
    report.party = Some(party.to_string());
    report.r = Some(r.r());
    let rho = reduced_state(&psi, party, &r)?;
    match a.kind {
        KindArg::Concurrence => {
            let c = concurrence_mixed(&rho)?;
            report.value = Some(c.value);
            report.provenance = Some(c.provenance.to_string());
        }
        KindArg::ThreeTangle | KindArg::Monogamy => {
            let (analytic, objective) = if a.kind == KindArg::ThreeTangle {
                let v = match &loaded {
                    LoadedState::Acin(p) => analytic_mixed_tangle(p, &r, party)?.value,
                    LoadedState::Raw(_) => spectral_family(&psi, party, &r)?.average_tangle(),
                };
                (v, RoofObjective::Hyperdeterminant)
            } else {
                let v = spectral_family(&psi, party, &r)?.average_monogamy_residual()?;
                (v, RoofObjective::MonogamyResidual(Qubit::I))
            };
            let optimized = optimize_roof_with(&rho, 2, &roof_opts(objective))?.average_tangle;
            report.analytic = Some(analytic);
            report.optimized = Some(optimized);
            report.abs_gap = Some((analytic - optimized).abs());
        }
    }
    Ok(report)
}

fn cmd_measure(a: &MeasureArgs) -> Result<String> {
    let report = measure(a)?;
    Ok(if a.json {
        serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
    } else {
        report.render()
    })
}

/// Grid of angles for a sweep, ascending.
pub fn sweep_grid(a: &SweepArgs) -> Result<Vec<RindlerParams>> {
    if a.steps < 2 {
        return Err(Error::InvalidParams(format!(
            "--steps must be at least 2, got {}",
            a.steps
        )));
    }
    let n = a.steps - 1;
    let mut grid = match (a.accel_start, a.accel_stop) {
        (Some(lo), Some(hi)) => {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::InvalidParams(format!(
                    "acceleration grid needs 0 < start < stop, got {lo}..{hi}"
                )));
            }
            let (l0, l1) = (lo.ln(), hi.ln());
            (0..=n)
                .map(|i| {
                    let a_i = if i == n {
                        hi
                    } else {
                        (l0 + (l1 - l0) * i as f64 / n as f64).exp()
                    };
                    RindlerParams::from_acceleration(a_i, a.omega, a.c)
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => {
            if a.r_stop < a.r_start {
                return Err(Error::InvalidParams(format!(
                    "--r-stop {} is below --r-start {}",
                    a.r_stop, a.r_start
                )));
            }
            (0..=n)
                .map(|i| {
                    let r = if i == n {
                        a.r_stop
                    } else {
                        a.r_start + (a.r_stop - a.r_start) * i as f64 / n as f64
                    };
                    RindlerParams::from_angle(r)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    grid.sort_by(|x, y| x.r().total_cmp(&y.r()));
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub cos2r: f64,
    pub tangle_initial: f64,
    pub tangle_analytic: f64,
    pub tangle_optimized: Option<f64>,
}

impl SweepRow {
    pub fn abs_gap(&self) -> Option<f64> {
        self.tangle_optimized.map(|o| (o - self.tangle_analytic).abs())
    }
}

pub const SWEEP_HEADER: &str = "r,cos2r,tangle_initial,tangle_analytic,tangle_optimized,abs_gap";

/// Rows of the `sweep` subcommand, ascending in `r`.
pub fn sweep(a: &SweepArgs) -> Result<Vec<SweepRow>> {
    let loaded = load(&a.source)?;
    let psi = loaded.pure();
    let tangle_initial = match &loaded {
        LoadedState::Acin(p) => three_tangle_acin(p).value,
        LoadedState::Raw(_) => three_tangle_pure(&psi)?.value,
    };
    let grid = sweep_grid(a)?;
    let opts = RoofOptions {
        starts: a.starts,
        seed: a.seed,
        ..RoofOptions::default()
    };
    grid.par_iter()
        .map(|r| {
            let tangle_analytic = match &loaded {
                LoadedState::Acin(p) => analytic_mixed_tangle(p, r, a.party)?.value,
                LoadedState::Raw(_) => spectral_family(&psi, a.party, r)?.average_tangle(),
            };
            let tangle_optimized = if a.no_optimize {
                None
            } else {
                let rho = reduced_state(&psi, a.party, r)?;
                Some(optimize_roof_with(&rho, 2, &opts)?.average_tangle)
            };
            Ok(SweepRow {
                r: r.r(),
                cos2r: r.r().cos().powi(2),
                tangle_initial,
                tangle_analytic,
                tangle_optimized,
            })
        })
        .collect()
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for row in rows {
        let opt = row.tangle_optimized.map(fmt17).unwrap_or_default();
        let gap = row.abs_gap().map(fmt17).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt17(row.r),
            fmt17(row.cos2r),
            fmt17(row.tangle_initial),
            fmt17(row.tangle_analytic),
            opt,
            gap
        );
    }
    s
}

fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    Ok(sweep_csv(&sweep(a)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub case: usize,
    pub party: String,
    pub r: f64,
    pub expected: f64,
    pub got: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    pub cases: usize,
    pub tolerance: f64,
    pub max_abs_error: f64,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let route = self.route.map(|r| format!(" ({})", r.name())).unwrap_or_default();
        let _ = writeln!(
            s,
            "{}{route}: {} cases, max_abs_error {:e}, tolerance {:e}: {}",
            self.suite.name(),
            self.cases,
            self.max_abs_error,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for f in &self.failures {
            let _ = writeln!(
                s,
                "  failure: seed={} case={} party={} r={} expected={} got={}",
                f.seed, f.case, f.party, f.r, f.expected, f.got
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Identities => "identities",
            Suite::Sector => "sector",
        }
    }
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Analytic => "analytic",
            Route::Spectral => "spectral",
            Route::Optimizer => "optimizer",
        }
    }
}

/// Outcome of one verification case.
struct CaseResult {
    party: Qubit,
    r: f64,
    expected: f64,
    got: f64,
    note: Option<String>,
}

impl CaseResult {
    fn error(&self) -> f64 {
        let e = (self.got - self.expected).abs();
        if e.is_finite() {
            e
        } else {
            f64::INFINITY
        }
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

fn random_angle(rng: &mut ChaCha8Rng) -> RindlerParams {
    RindlerParams::from_angle(rng.random_range(0.0..=FRAC_PI_4)).expect("angle in range")
}

fn random_party(rng: &mut ChaCha8Rng, parties: &[Qubit]) -> Qubit {
    parties[rng.random_range(0..parties.len())]
}

pub fn suite_tolerance(suite: Suite, route: Route) -> f64 {
    match (suite, route) {
        (Suite::Theorem1, _) => 1e-9,
        (Suite::Theorem2, Route::Analytic) => 1e-9,
        (Suite::Theorem2, Route::Spectral) => 1e-8,
        (Suite::Theorem2, Route::Optimizer) => 1e-4,
        (Suite::Identities, _) => 1e-10,
        (Suite::Sector, _) => 1e-12,
    }
}

fn default_cases(suite: Suite, route: Route) -> usize {
    match (suite, route) {
        (Suite::Theorem1, _) => 200,
        (Suite::Theorem2, Route::Optimizer) => 20,
        (Suite::Theorem2, _) => 100,
        (Suite::Identities, _) => 1000,
        (Suite::Sector, _) => 50,
    }
}

/// Run a verification battery. Cases are independent and evaluated in
/// parallel; each uses its own ChaCha8 stream of `seed`.
pub fn verify(suite: Suite, route: Route, cases: usize, seed: u64) -> Result<VerifyReport> {
    if cases == 0 {
        return Err(Error::InvalidParams("--cases must be at least 1".into()));
    }
    let tolerance = suite_tolerance(suite, route);
    let results: Vec<CaseResult> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = case_rng(seed, case);
            match suite {
                Suite::Theorem1 => bipartite_case(&mut rng),
                Suite::Theorem2 => tripartite_case(&mut rng, route, seed ^ case as u64),
                Suite::Identities => identities_case(&mut rng),
                Suite::Sector => sector_case(&mut rng),
            }
        })
        .collect::<Result<_>>()?;

    let mut max_abs_error: f64 = 0.0;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (case, res) in results.iter().enumerate() {
        let err = res.error();
        max_abs_error = max_abs_error.max(err);
        // NaN counts as a failure
        if err.partial_cmp(&tolerance) != Some(std::cmp::Ordering::Less) {
            failures.push(Failure {
                seed,
                case,
                party: res.party.to_string(),
                r: res.r,
                expected: res.expected,
                got: res.got,
            });
        }
        if let Some(n) = &res.note {
            notes.push(format!("case {case}: {n}"));
        }
    }
    if suite == Suite::Sector {
        let low = results.iter().filter(|r| r.note.is_some()).count();
        notes.insert(
            0,
            format!("rank(particle sector) = 4 in {} of {cases} cases", cases - low),
        );
    }
    Ok(VerifyReport {
        suite,
        route: (suite == Suite::Theorem2).then_some(route),
        cases,
        tolerance,
        max_abs_error,
        failures,
        notes,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<VerifyReport> {
    let cases = a.cases.unwrap_or_else(|| default_cases(a.suite, a.route));
    verify(a.suite, a.route, cases, a.seed)
}

fn bipartite_case(rng: &mut ChaCha8Rng) -> Result<CaseResult> {
    let psi = PureState::random_with(Register::ab(), rng);
    let party = random_party(rng, &[Qubit::A, Qubit::B]);
    let r = random_angle(rng);
    let expected = concurrence_pure(&psi)?.value * r.r().cos();
    let got = concurrence_mixed(&reduced_state(&psi, party, &r)?)?.value;
    Ok(CaseResult {
        party,
        r: r.r(),
        expected,
        got,
        note: None,
    })
}

fn tripartite_case(rng: &mut ChaCha8Rng, route: Route, roof_seed: u64) -> Result<CaseResult> {
    let abc = [Qubit::A, Qubit::B, Qubit::C];
    match route {
        Route::Analytic => {
            let p = AcinParams::random(rng);
            let party = random_party(rng, &abc);
            let r = random_angle(rng);
            let expected = three_tangle_acin(&p).value * r.r().cos().powi(2);
            let got = match decomposition(&p, &r, party) {
                Ok(d) => {
                    // evaluate the family members directly rather than through the bracket
                    let (f1, f2) = equal_weight_family(&d, FRAC_PI_2);
                    let direct = 0.5 * (tangle_of_vector(f1.amplitudes()) + tangle_of_vector(f2.amplitudes()));
                    let bracket = d.roof_bracket(FRAC_PI_2) * d.tangle_scale;
                    // report whichever of the two evaluations is further off
                    if (bracket - expected).abs() > (direct - expected).abs() {
                        bracket
                    } else {
                        direct
                    }
                }
                Err(Error::Degenerate(_)) => analytic_mixed_tangle(&p, &r, party)?.value,
                Err(e) => return Err(e),
            };
            Ok(CaseResult {
                party,
                r: r.r(),
                expected,
                got,
                note: None,
            })
        }
        Route::Spectral => {
            let psi = PureState::random_with(Register::abc(), rng);
            let party = random_party(rng, &abc);
            let r = random_angle(rng);
            let expected = three_tangle_pure(&psi)?.value * r.r().cos().powi(2);
            let got = spectral_family(&psi, party, &r)?.average_tangle();
            Ok(CaseResult {
                party,
                r: r.r(),
                expected,
                got,
                note: None,
            })
        }
        Route::Optimizer => {
            let p = AcinParams::random(rng);
            let party = random_party(rng, &abc);
            let r = random_angle(rng);
            let expected = analytic_mixed_tangle(&p, &r, party)?.value;
            let rho = reduced_state(&PureState::from_acin(&p), party, &r)?;
            let opts = RoofOptions {
                seed: roof_seed,
                ..RoofOptions::default()
            };
            let got = optimize_roof_with(&rho, 2, &opts)?.average_tangle;
            Ok(CaseResult {
                party,
                r: r.r(),
                expected,
                got,
                note: None,
            })
        }
    }
}

/// Largest violation among the decomposition identities; expected value 0.
fn identities_case(rng: &mut ChaCha8Rng) -> Result<CaseResult> {
    let p = AcinParams::random(rng);
    let party = random_party(rng, &[Qubit::A, Qubit::B, Qubit::C]);
    let r = random_angle(rng);
    let d = match decomposition(&p, &r, party) {
        Ok(d) => d,
        Err(Error::Degenerate(msg)) => {
            return Ok(CaseResult {
                party,
                r: r.r(),
                expected: 0.0,
                got: 0.0,
                note: Some(format!("skipped degenerate draw: {msg}")),
            })
        }
        Err(e) => return Err(e),
    };
    let mut worst: f64 = d.state_plus.overlap(&d.state_minus).norm();

    let rho = reduced_state(&PureState::from_acin(&p), party, &r)?;
    let back = DensityMatrix::mixture(&[d.p, 1.0 - d.p], &[d.state_plus.clone(), d.state_minus.clone()])?;
    worst = worst.max(back.matrix().max_abs_diff(rho.matrix()));

    worst = worst.max((d.roof_bracket(FRAC_PI_2) - 1.0).abs());
    if let Intermediates::Bob { x, y, z, .. } = d.intermediates {
        worst = worst.max(((x - y).powi(2) + z * z - 1.0).abs());
    }

    let (cp, cm) = d.closed_form_tangles();
    worst = worst.max((cp - tangle_of_vector(d.state_plus.amplitudes())).abs());
    worst = worst.max((cm - tangle_of_vector(d.state_minus.amplitudes())).abs());

    Ok(CaseResult {
        party,
        r: r.r(),
        expected: 0.0,
        got: worst,
        note: None,
    })
}

/// Entrywise agreement of the particle-sector routes. Rank deficiency is
/// reported in the note, never failed.
fn sector_case(rng: &mut ChaCha8Rng) -> Result<CaseResult> {
    let p = AcinParams::random(rng);
    let r = random_angle(rng);
    let q_r: f64 = rng.random_range(0.0..1.0);

    let single_mode_limit = particle_sector_state(&p, &UnruhModeParams::real(1.0, r.r())?)?;
    let single = reduced_state(&PureState::from_acin(&p), Qubit::C, &r)?;
    let mut worst = single_mode_limit.matrix().max_abs_diff(single.matrix());

    let params = UnruhModeParams::real(q_r, r.r())?;
    let constructive = particle_sector_state(&p, &params)?;
    let template = particle_sector_closed_form(&p, &params);
    worst = worst.max(constructive.matrix().max_abs_diff(template.matrix()));

    let rank = constructive
        .eigen()
        .values
        .iter()
        .filter(|v| v.abs() > RANK_TOL)
        .count();
    let note = (rank != 4).then(|| format!("rank {rank} at q_R = {q_r}, r = {}", r.r()));
    Ok(CaseResult {
        party: Qubit::C,
        r: r.r(),
        expected: 0.0,
        got: worst,
        note,
    })
}
