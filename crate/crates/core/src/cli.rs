//! Scenario files and the batch pipelines behind the `switchlab` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    find_threshold, scan_d0, sweep_outcomes, threshold_bracket, SweepOptions, SweepParameter, ThresholdOptions,
};
use crate::dynamics::{
    initial_state, integrate_to_steady, simulate, InitialData, SimOptions, SteadyOptions, System,
};
use crate::error::{Error, Result};
use crate::mesh::{Grid, GridSpec};
use crate::model::{ModelParams, SystemKind};
use crate::output::{num, svg_plot, Series, Table};
use crate::roots::ThresholdName;
use crate::spectral::{principal_eigen_with, EigenProblem, EigenResult, SolverOptions};
use crate::verify::{reference_scenario, render_report, run_criterion, BatteryConfig, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Eigen,
    Steady,
    Simulate,
    Threshold {
        name: ThresholdName,
    },
    Sweep {
        parameter: SweepParameter,
        values: Vec<f64>,
    },
    /// Empty `criteria` runs all thirteen.
    Verify {
        #[serde(default)]
        criteria: Vec<u8>,
    },
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Eigen => "eigen",
            Task::Steady => "steady",
            Task::Simulate => "simulate",
            Task::Threshold { .. } => "threshold",
            Task::Sweep { .. } => "sweep",
            Task::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    pub tol: f64,
    pub t_max: f64,
    pub scan_points: usize,
    pub sample_interval: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.01,
            tol: 1e-9,
            t_max: 2000.0,
            scan_points: 64,
            sample_interval: 1.0,
        }
    }
}

fn default_grid() -> GridSpec {
    GridSpec { a: 0.0, b: 1.0, n: 401 }
}

fn default_system() -> SystemKind {
    SystemKind::Submodel
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default = "reference_scenario")]
    pub params: ModelParams,
    #[serde(default = "default_system")]
    pub system: SystemKind,
    pub task: Task,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub initial: Option<InitialData>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(task: Task) -> Self {
        ScenarioConfig {
            grid: default_grid(),
            params: reference_scenario(),
            system: default_system(),
            task,
            solver: SolverConfig::default(),
            initial: None,
            output: default_output(),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<Grid> {
        let s = &self.solver;
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("solver.{what} must be positive, got {v}")))
            }
        };
        positive(s.dt, "dt")?;
        positive(s.tol, "tol")?;
        positive(s.t_max, "t_max")?;
        positive(s.sample_interval, "sample_interval")?;
        if s.scan_points < 2 {
            return Err(Error::Config("solver.scan_points must be at least 2".into()));
        }
        let grid = self.grid.build()?;
        self.params.fields(&grid)?;
        match &self.task {
            Task::Sweep { values, .. } => {
                if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                    return Err(Error::Config("sweep values must be a non-empty list of positive numbers".into()));
                }
            }
            Task::Verify { criteria } => {
                if let Some(k) = criteria.iter().find(|k| !(1..=13).contains(*k)) {
                    return Err(Error::Config(format!("no criterion {k}")));
                }
            }
            Task::Eigen if self.system == SystemKind::ThreeComponent => {
                return Err(Error::Config("eigen task needs a one- or two-component system".into()));
            }
            _ => {}
        }
        Ok(grid)
    }

    fn steady(&self) -> SteadyOptions {
        SteadyOptions {
            dt: self.solver.dt,
            tol: self.solver.tol,
            t_max: self.solver.t_max,
            ..Default::default()
        }
    }

    fn sim(&self) -> SimOptions {
        SimOptions {
            dt: self.solver.dt,
            t_max: self.solver.t_max,
            sample_interval: self.solver.sample_interval,
            ..Default::default()
        }
    }

    fn thresholds(&self) -> ThresholdOptions {
        ThresholdOptions {
            steady: SteadyOptions {
                tol: self.solver.tol.min(1e-10),
                ..self.steady()
            },
            scan_points: self.solver.scan_points,
            ..Default::default()
        }
    }

    fn battery(&self) -> BatteryConfig {
        BatteryConfig {
            grid: self.grid,
            params: self.params.clone(),
            seed: self.seed,
            scan_points: self.solver.scan_points,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub csv: Vec<PathBuf>,
    pub svg: Vec<PathBuf>,
    pub report: PathBuf,
    pub exit_code: i32,
}

/// Everything a task produces before it is written to disk.
#[derive(Default)]
struct Outputs {
    tables: Vec<Table>,
    plots: Vec<(String, String)>,
    report: String,
    failed: bool,
}

fn precondition(e: &Error) -> &'static str {
    match e {
        Error::Config(_) | Error::Json(_) | Error::DimensionMismatch { .. } => "configuration is well formed",
        Error::Io(_) => "output directory is writable",
        Error::Hypothesis(_) => "model hypothesis on m, alpha and beta",
        Error::Cooperativity(_) => "off-diagonal coupling is non-negative",
        Error::NotConverged { .. } | Error::EmptyWindow(_) => "solver converges within its budget",
        Error::Overshoot { .. } => "time step keeps the state non-negative",
        Error::SingularPivot { .. } => "shifted operator is nonsingular",
        Error::NoSignChange { .. } | Error::TooManyRoots { .. } => "threshold curve changes sign in its bracket",
        Error::Invariant(_) => "numerical invariant holds",
    }
}

/// Runs the configured task and writes its outputs. Failures are written
/// to the report and reflected in the exit code.
pub fn run_scenario(config: &ScenarioConfig) -> RunArtifacts {
    let dir = config.output.clone();
    let report = dir.join("report.txt");
    let mut artifacts = RunArtifacts {
        csv: Vec::new(),
        svg: Vec::new(),
        report: report.clone(),
        exit_code: 0,
    };
    let mut text = format!("task: {}\nsystem: {:?}\ngrid: n = {} on [{}, {}]\nseed: {}\n\n", config.task.as_str(), config.system, config.grid.n, config.grid.a, config.grid.b, config.seed);
    let result = config.validate().and_then(|grid| execute(config, &grid)).and_then(|out| {
        fs::create_dir_all(&dir)?;
        for t in &out.tables {
            artifacts.csv.push(t.write(&dir)?);
        }
        for (name, svg) in &out.plots {
            let path = dir.join(name);
            fs::write(&path, svg)?;
            artifacts.svg.push(path);
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            text.push_str(&out.report);
            if out.failed {
                artifacts.exit_code = 1;
            }
        }
        Err(e) => {
            let _ = writeln!(text, "error: {e}\nviolated precondition: {}", precondition(&e));
            artifacts.exit_code = e.exit_code();
        }
    }
    let _ = writeln!(text, "\nexit status: {}", artifacts.exit_code);
    if fs::create_dir_all(&dir).and_then(|_| fs::write(&report, &text)).is_err() && artifacts.exit_code == 0 {
        artifacts.exit_code = 2;
    }
    artifacts
}

/// The full battery at the configured resolution; exit code 1 if any check fails.
pub fn verify_suite(config: &ScenarioConfig) -> RunArtifacts {
    let mut c = config.clone();
    if !matches!(c.task, Task::Verify { .. }) {
        c.task = Task::Verify { criteria: Vec::new() };
    }
    run_scenario(&c)
}

fn execute(config: &ScenarioConfig, grid: &Grid) -> Result<Outputs> {
    match &config.task {
        Task::Eigen => eigen_task(config, grid),
        Task::Steady => steady_task(config, grid),
        Task::Simulate => simulate_task(config, grid),
        Task::Threshold { name } => threshold_task(config, grid, *name),
        Task::Sweep { parameter, values } => sweep_task(config, grid, *parameter, values),
        Task::Verify { criteria } => verify_task(config, criteria),
    }
}

fn eigen_problem(config: &ScenarioConfig, grid: &Grid) -> Result<EigenProblem> {
    let p = &config.params;
    match config.system {
        SystemKind::Logistic => {
            let f = p.fields(grid)?;
            Ok(EigenProblem::scalar(grid, p.d1, f.m))
        }
        _ => EigenProblem::switching(p, grid),
    }
}

fn profile_table(file: &str, grid: &Grid, comps: &[crate::mesh::Field]) -> Table {
    let mut header = vec!["x".to_string()];
    header.extend((0..comps.len()).map(|k| format!("comp{k}")));
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(file, &h);
    for i in 0..grid.len() {
        let mut row = vec![num(grid.nodes()[i])];
        row.extend(comps.iter().map(|c| num(c[i])));
        t.push(row);
    }
    t
}

fn profile_plot(title: &str, grid: &Grid, comps: &[crate::mesh::Field]) -> String {
    let series: Vec<Series> = comps
        .iter()
        .enumerate()
        .map(|(k, c)| Series::new(format!("comp{k}"), grid.nodes().iter().copied().zip(c.iter().copied()).collect()))
        .collect();
    svg_plot(title, "x", "value", &series, false)
}

fn eigen_task(config: &ScenarioConfig, grid: &Grid) -> Result<Outputs> {
    let problem = eigen_problem(config, grid)?;
    let opts = SolverOptions {
        tol: config.solver.tol.min(1e-12),
        ..Default::default()
    };
    let e: EigenResult = principal_eigen_with(&problem, opts, None)?;
    let mut t = Table::new("eigen.csv", &["lambda", "residual", "iterations"]);
    t.push(vec![num(e.lambda), num(e.residual), e.iterations.to_string()]);
    let mut out = Outputs {
        report: format!(
            "principal eigenvalue {:.12e}\nresidual {:.3e}\niterations {}\nbracket [{:.12e}, {:.12e}]\n",
            e.lambda, e.residual, e.iterations, e.bracket.0, e.bracket.1
        ),
        ..Default::default()
    };
    out.tables.push(t);
    out.tables.push(profile_table("eigenfunction.csv", grid, &e.eigenfunctions));
    out.plots.push(("eigenfunction.svg".into(), profile_plot("principal eigenfunction", grid, &e.eigenfunctions)));
    Ok(out)
}

fn default_initial(config: &ScenarioConfig, k: usize) -> InitialData {
    config.initial.clone().unwrap_or(InitialData::Constant { values: vec![0.2; k] })
}

fn start(config: &ScenarioConfig, grid: &Grid, system: &System) -> Result<crate::dynamics::State> {
    let k = system.components();
    let data = default_initial(config, k);
    let eigen = match data {
        InitialData::Eigenfunction { .. } => Some(principal_eigen_with(&eigen_problem(config, grid)?, SolverOptions::default(), None)?),
        _ => None,
    };
    initial_state(&data, grid, k, eigen.as_ref(), config.seed)
}

fn steady_task(config: &ScenarioConfig, grid: &Grid) -> Result<Outputs> {
    let mut sys = System::new(config.system, &config.params, grid)?;
    let init = start(config, grid, &sys)?;
    let r = integrate_to_steady(&mut sys, &init, &config.steady())?;
    let mut out = Outputs::default();
    let masses = r.state.masses(grid)?;
    out.report = format!(
        "converged: {}\nresidual {:.3e} after {} steps (t = {})\nmasses {}\n",
        r.converged,
        r.residual,
        r.steps,
        r.state.t,
        masses.iter().map(|m| format!("{m:.10e}")).collect::<Vec<_>>().join(", ")
    );
    out.failed = !r.converged;
    out.tables.push(profile_table("steady.csv", grid, &r.state.components));
    out.plots.push(("steady.svg".into(), profile_plot("steady state", grid, &r.state.components)));
    Ok(out)
}

fn simulate_task(config: &ScenarioConfig, grid: &Grid) -> Result<Outputs> {
    let mut sys = System::new(config.system, &config.params, grid)?;
    let init = start(config, grid, &sys)?;
    let (end, log) = simulate(&mut sys, &init, &config.sim())?;
    let k = sys.components();
    let mut t = Table::new("trajectory.csv", &["t", "comp", "min", "max", "mass"]);
    for (i, time) in log.sample_times.iter().enumerate() {
        for c in 0..k {
            t.push(vec![num(*time), c.to_string(), num(log.min[i][c]), num(log.max[i][c]), num(log.mass[i][c])]);
        }
    }
    let series: Vec<Series> = (0..k)
        .map(|c| Series::new(format!("mass comp{c}"), log.sample_times.iter().copied().zip(log.mass.iter().map(|m| m[c])).collect()))
        .collect();
    let mut out = Outputs {
        report: format!(
            "final time {}\nfinal masses {}\n",
            end.t,
            end.masses(grid)?.iter().map(|m| format!("{m:.10e}")).collect::<Vec<_>>().join(", ")
        ),
        ..Default::default()
    };
    out.tables.push(t);
    out.tables.push(profile_table("final_state.csv", grid, &end.components));
    out.plots.push(("trajectory.svg".into(), svg_plot("component masses", "t", "mass", &series, false)));
    Ok(out)
}

fn threshold_task(config: &ScenarioConfig, grid: &Grid, name: ThresholdName) -> Result<Outputs> {
    let opts = config.thresholds();
    let roots = if name == ThresholdName::D0 {
        let bracket = threshold_bracket(name, &config.params, &opts)?;
        let r = scan_d0(&config.params, grid, bracket, &opts)?;
        if r.is_empty() {
            return Err(Error::NoSignChange {
                name: name.as_str().into(),
                lo: bracket.0,
                hi: bracket.1,
                f_lo: f64::NAN,
                f_hi: f64::NAN,
            });
        }
        r
    } else {
        vec![find_threshold(name, &config.params, grid, &opts)?]
    };
    let mut t = Table::new("threshold.csv", &["name", "lo", "hi", "root", "residual"]);
    let mut out = Outputs::default();
    for r in &roots {
        t.push(vec![r.name.as_str().into(), num(r.bracket.0), num(r.bracket.1), num(r.root), num(r.residual)]);
        let _ = writeln!(out.report, "{} = {:.12e} in [{}, {}], residual {:.3e}", r.name.as_str(), r.root, r.bracket.0, r.bracket.1, r.residual);
    }
    out.tables.push(t);
    Ok(out)
}

fn sweep_task(config: &ScenarioConfig, grid: &Grid, parameter: SweepParameter, values: &[f64]) -> Result<Outputs> {
    let opts = SweepOptions {
        sim: SimOptions {
            steady_tol: Some(config.solver.tol),
            sample_interval: config.solver.sample_interval.max(config.solver.dt),
            ..config.sim()
        },
        steady: SteadyOptions {
            tol: config.solver.tol.min(1e-10),
            ..config.steady()
        },
        initial: default_initial(config, 3),
        seed: config.seed,
        ..Default::default()
    };
    let r = sweep_outcomes(&config.params, grid, parameter, values, &opts)?;
    let mut t = Table::new("sweep.csv", &["value", "lambda_uv0", "lambda_00w", "outcome", "floor_u", "floor_v", "floor_w"]);
    let mut out = Outputs::default();
    for p in &r.points {
        let floor = |k: usize| p.floors.get(k).copied().unwrap_or(f64::NAN);
        t.push(vec![num(p.value), num(p.lambda_uv0), num(p.lambda_00w), p.outcome.as_str().into(), num(floor(0)), num(floor(1)), num(floor(2))]);
        let _ = write!(out.report, "{} = {:.6e}: {}", parameter.as_str(), p.value, p.outcome.as_str());
        if let Some(e) = &p.error {
            let _ = write!(out.report, " (error: {e})");
            out.failed = true;
        }
        out.report.push('\n');
    }
    let _ = writeln!(out.report, "empirical C1 {:?}, C2 {:?}", r.empirical_c1, r.empirical_c2);
    let lam = |f: fn(&crate::analysis::SweepPoint) -> f64| r.points.iter().map(|p| (p.value, f(p))).collect::<Vec<_>>();
    let series = [Series::new("lambda at (u*, v*, 0)", lam(|p| p.lambda_uv0)), Series::new("lambda at (0, 0, w*)", lam(|p| p.lambda_00w))];
    out.tables.push(t);
    out.plots.push(("sweep.svg".into(), svg_plot("semi-trivial stability", parameter.as_str(), "eigenvalue", &series, true)));
    Ok(out)
}

fn verify_task(config: &ScenarioConfig, criteria: &[u8]) -> Result<Outputs> {
    use rayon::prelude::*;
    let battery = config.battery();
    let ks: Vec<u8> = if criteria.is_empty() { (1..=13).collect() } else { criteria.to_vec() };
    let sections: Vec<_> = ks.par_iter().map(|&k| run_criterion(k, &battery)).collect();
    let mut out = Outputs {
        report: render_report(&sections),
        failed: sections.iter().any(|s| s.status() == Status::Fail),
        ..Default::default()
    };
    for s in sections {
        out.tables.extend(s.tables);
        out.plots.extend(s.plots);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = ScenarioConfig::from_json(r#"{"task": {"kind": "threshold", "name": "d_c"}}"#).unwrap();
        assert_eq!(c.task, Task::Threshold { name: ThresholdName::DC });
        assert_eq!(c.grid.n, 401);
        assert_eq!(c.params, reference_scenario());
    }

    #[test]
    fn unknown_field_is_rejected() {
        let e = ScenarioConfig::from_json(r#"{"task": {"kind": "eigen"}, "grdi": {}}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn bad_solver_is_a_validation_error() {
        let mut c = ScenarioConfig::new(Task::Eigen);
        c.solver.dt = -1.0;
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
    }
}
