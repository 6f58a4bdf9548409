//! Stability of equilibria, threshold root-finding and competition outcome sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    initial_state, logistic_steady, simulate, submodel_steady, InitialData, SimOptions, State,
    SteadyOptions, SteadyResult, System, TrajectoryLog,
};
use crate::error::{Error, Result};
use crate::mesh::{Field, Grid};
use crate::model::{check_hypothesis_h, CoefficientSpec, ModelParams, SystemKind};
use crate::roots::{bisect, scan_roots, Curve, ThresholdName, ThresholdResult};
use crate::spectral::{
    principal_eigen, rightmost_dense, scalar_lambda, EigenProblem, EigenResult, MuFamily,
};

/// Eigenvalues within this distance of zero are classified as marginal.
pub const MARGINAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equilibrium {
    Trivial,
    /// `(u*, v*, 0)`
    SwitchingOnly,
    /// `(0, 0, w*)`
    SingleOnly,
    /// Positive steady state of the two-species system.
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    LinearlyStable,
    LinearlyUnstable,
    Marginal,
}

impl Classification {
    pub fn of(lambda: f64) -> Self {
        if lambda.abs() <= MARGINAL {
            Classification::Marginal
        } else if lambda < 0.0 {
            Classification::LinearlyStable
        } else {
            Classification::LinearlyUnstable
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub equilibrium: Equilibrium,
    pub principal_eigenvalue: f64,
    pub classification: Classification,
}

impl StabilityReport {
    fn new(equilibrium: Equilibrium, lambda: f64) -> Self {
        StabilityReport {
            equilibrium,
            principal_eigenvalue: lambda,
            classification: Classification::of(lambda),
        }
    }
}

/// Principal eigenvalue `lambda2` of the switching pair linearized at `(0, 0, w*)`.
pub fn lambda2(params: &ModelParams, grid: &Grid, w_star: &Field) -> Result<EigenResult> {
    let f = params.fields(grid)?;
    let potential = f.m.zip_map(w_star, |m, w| m - w);
    principal_eigen(&EigenProblem::switching_with_potential(
        grid,
        (params.d1, params.d2),
        &f.alpha,
        &f.beta,
        &potential,
    ))
}

/// `m - u* - v*`
pub fn invader_potential(params: &ModelParams, grid: &Grid, uv: &State) -> Result<Field> {
    let f = params.fields(grid)?;
    let (u, v) = (&uv.components[0], &uv.components[1]);
    Ok(Field::new((0..grid.len()).map(|i| f.m[i] - u[i] - v[i]).collect()))
}

/// Linearization of the two-species system at a positive steady state `(U, V)`.
/// Off-diagonal terms may be negative, so this is not a Perron problem.
pub fn positive_state_linearization(params: &ModelParams, grid: &Grid, kind: SystemKind, uv: &State) -> Result<EigenProblem> {
    let f = params.fields(grid)?;
    let (b, c) = kind.interaction(params);
    let (u, v) = (&uv.components[0], &uv.components[1]);
    let n = grid.len();
    let build = |g: &dyn Fn(usize) -> f64| Field::new((0..n).map(g).collect());
    Ok(EigenProblem::pair(
        grid,
        (params.d1, params.d2),
        build(&|i| f.m[i] - 2.0 * u[i] - b * v[i] - f.alpha[i]),
        build(&|i| f.beta[i] - b * u[i]),
        build(&|i| f.alpha[i] - c * v[i]),
        build(&|i| f.m[i] - c * u[i] - 2.0 * v[i] - f.beta[i]),
    ))
}

/// Linearized stability of an equilibrium, reduced to the eigenproblem that decides it.
pub fn linearized_stability(
    kind: SystemKind,
    params: &ModelParams,
    grid: &Grid,
    equilibrium: &SteadyResult,
    which: Equilibrium,
) -> Result<StabilityReport> {
    if which != Equilibrium::Trivial && !equilibrium.converged {
        return Err(Error::NotConverged {
            what: "equilibrium",
            iterations: equilibrium.steps,
            last_change: equilibrium.residual,
        });
    }
    let comps = &equilibrium.state.components;
    if comps.len() != kind.components() {
        return Err(Error::DimensionMismatch {
            expected: kind.components(),
            found: comps.len(),
        });
    }
    let lambda = match which {
        Equilibrium::Trivial => match kind {
            SystemKind::Logistic => {
                let m = crate::model::sample_coefficient(&params.m, grid)?;
                scalar_lambda(grid, params.d3, &m)?
            }
            SystemKind::Submodel | SystemKind::TwoSpeciesGeneral => {
                principal_eigen(&EigenProblem::switching(params, grid)?)?.lambda
            }
            SystemKind::ThreeComponent => {
                let f = params.fields(grid)?;
                let l0 = principal_eigen(&EigenProblem::switching(params, grid)?)?.lambda;
                l0.max(scalar_lambda(grid, params.d3, &f.m)?)
            }
        },
        Equilibrium::SwitchingOnly => {
            if kind != SystemKind::ThreeComponent {
                return Err(Error::Config("(u*, v*, 0) is an equilibrium of the three-component system".into()));
            }
            check_hypothesis_h(params, grid)?;
            let uv = State::new(0.0, comps[..2].to_vec());
            scalar_lambda(grid, params.d3, &invader_potential(params, grid, &uv)?)?
        }
        Equilibrium::SingleOnly => {
            let w = match kind {
                SystemKind::ThreeComponent => &comps[2],
                SystemKind::Logistic => &comps[0],
                _ => return Err(Error::Config("(0, 0, w*) needs a w component".into())),
            };
            check_hypothesis_h(params, grid)?;
            lambda2(params, grid, w)?.lambda
        }
        Equilibrium::Positive => {
            if kind.components() != 2 {
                return Err(Error::Config("positive-state linearization is for two-species kinds".into()));
            }
            let p = positive_state_linearization(params, grid, kind, &equilibrium.state)?;
            rightmost_dense(&p.assemble())?
        }
    };
    Ok(StabilityReport::new(which, lambda))
}

/// Controls shared by threshold computations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdOptions {
    pub steady: SteadyOptions,
    /// Lattice size for sign-change scans.
    pub scan_points: usize,
    /// Stop bisection once `|lambda| <= ftol`.
    pub ftol: f64,
    /// Search interval for `mu_star` / `mu_zero`.
    pub mu_bracket: (f64, f64),
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            steady: SteadyOptions {
                tol: 1e-10,
                ..SteadyOptions::default()
            },
            scan_points: 64,
            ftol: 1e-9,
            mu_bracket: (1e-3, 1e3),
        }
    }
}

fn require_constant_rates(params: &ModelParams) -> Result<(f64, f64)> {
    params
        .constant_rates()
        .ok_or_else(|| Error::Config("this threshold needs spatially constant alpha and beta".into()))
}

/// `(u*, v*)` of the switching pair, started from half its cooperative rectangle.
pub fn switching_equilibrium(params: &ModelParams, grid: &Grid, opts: &SteadyOptions) -> Result<SteadyResult> {
    let f = params.fields(grid)?;
    let start = initial_state(
        &InitialData::Constant {
            values: vec![0.5 * f.beta.max(), 0.5 * f.alpha.max()],
        },
        grid,
        2,
        None,
        0,
    )?;
    let res = submodel_steady(params, grid, &start, opts)?;
    if !res.converged {
        return Err(Error::NotConverged {
            what: "switching steady state",
            iterations: res.steps,
            last_change: res.residual,
        });
    }
    Ok(res)
}

/// `w*` of the logistic equation with diffusion `d`.
pub fn single_equilibrium(params: &ModelParams, grid: &Grid, d: f64, opts: &SteadyOptions) -> Result<SteadyResult> {
    let m = crate::model::sample_coefficient(&params.m, grid)?;
    let res = logistic_steady(grid, d, &m, opts)?;
    if !res.converged {
        return Err(Error::NotConverged {
            what: "logistic steady state",
            iterations: res.steps,
            last_change: res.residual,
        });
    }
    Ok(res)
}

/// `lambda2` as a function of `beta` (or `alpha`) with `w*` held fixed.
pub struct RateCurve<'a> {
    pub params: &'a ModelParams,
    pub grid: &'a Grid,
    pub w_star: &'a Field,
    pub wrt: Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rate {
    Alpha,
    Beta,
}

impl Rate {
    pub fn set(self, params: &ModelParams, value: f64) -> ModelParams {
        let mut p = params.clone();
        match self {
            Rate::Alpha => p.alpha = CoefficientSpec::constant(value),
            Rate::Beta => p.beta = CoefficientSpec::constant(value),
        }
        p
    }
}

impl Curve for RateCurve<'_> {
    fn eval(&self, value: f64) -> Result<f64> {
        Ok(lambda2(&self.wrt.set(self.params, value), self.grid, self.w_star)?.lambda)
    }
}

/// `lambda2(d3)` with `w*` recomputed for every `d3`.
pub struct SingleDiffusionCurve<'a> {
    pub params: &'a ModelParams,
    pub grid: &'a Grid,
    pub steady: SteadyOptions,
}

impl Curve for SingleDiffusionCurve<'_> {
    fn eval(&self, d3: f64) -> Result<f64> {
        let w = single_equilibrium(self.params, self.grid, d3, &self.steady)?;
        Ok(lambda2(self.params, self.grid, &w.state.components[0])?.lambda)
    }
}

fn bisect_checked<C: Curve + ?Sized>(
    curve: &C,
    name: ThresholdName,
    bracket: (f64, f64),
    expect: (i8, i8),
    ftol: f64,
) -> Result<ThresholdResult> {
    let (f_lo, f_hi) = (curve.eval(bracket.0)?, curve.eval(bracket.1)?);
    let s = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
    if s(f_lo) != expect.0 || s(f_hi) != expect.1 {
        return Err(Error::NoSignChange {
            name: format!("{} (expected endpoint signs {:?})", name.as_str(), expect),
            lo: bracket.0,
            hi: bracket.1,
            f_lo,
            f_hi,
        });
    }
    let mut r = bisect(curve, name, bracket, (f_lo, f_hi), ftol)?;
    r.bracket = bracket;
    Ok(r)
}

/// Interval in which the threshold is known to lie, for the given parameters.
pub fn threshold_bracket(name: ThresholdName, params: &ModelParams, opts: &ThresholdOptions) -> Result<(f64, f64)> {
    match name {
        ThresholdName::DC | ThresholdName::D0 => {
            require_constant_rates(params)?;
            Ok((params.d1, params.weighted_diffusion().expect("constant rates")))
        }
        ThresholdName::BetaC => {
            let (alpha, _) = require_constant_rates(params)?;
            check_middle_diffusion(params)?;
            Ok((0.0, (params.d2 - params.d3) * alpha / (params.d3 - params.d1)))
        }
        ThresholdName::AlphaC => {
            let (_, beta) = require_constant_rates(params)?;
            check_middle_diffusion(params)?;
            Ok(((params.d3 - params.d1) * beta / (params.d2 - params.d3), f64::INFINITY))
        }
        ThresholdName::MuStar | ThresholdName::MuZero => Ok(opts.mu_bracket),
    }
}

fn check_middle_diffusion(params: &ModelParams) -> Result<()> {
    if !(params.d1 < params.d3 && params.d3 < params.d2) {
        return Err(Error::Config(format!(
            "switching-rate thresholds need d1 < d3 < d2, got d1 = {}, d3 = {}, d2 = {}",
            params.d1, params.d3, params.d2
        )));
    }
    Ok(())
}

fn check_rate_size(params: &ModelParams, grid: &Grid, rate: Rate) -> Result<()> {
    let f = params.fields(grid)?;
    let (bound, label) = match rate {
        Rate::Beta => (f.alpha.min(), "alpha"),
        Rate::Alpha => (f.beta.min(), "beta"),
    };
    if f.m.max() > bound {
        return Err(Error::Hypothesis(format!("need max m <= {label}, got max m = {}", f.m.max())));
    }
    Ok(())
}

/// Locates a named threshold inside its proved bracket, after checking the
/// endpoint signs.
pub fn find_threshold(name: ThresholdName, params: &ModelParams, grid: &Grid, opts: &ThresholdOptions) -> Result<ThresholdResult> {
    let bracket = threshold_bracket(name, params, opts)?;
    match name {
        ThresholdName::DC => {
            check_hypothesis_h(params, grid)?;
            let uv = switching_equilibrium(params, grid, &opts.steady)?;
            let potential = invader_potential(params, grid, &uv.state)?;
            let curve = |d: f64| scalar_lambda(grid, d, &potential);
            bisect_checked(&curve, name, bracket, (1, -1), opts.ftol)
        }
        ThresholdName::D0 => {
            check_hypothesis_h(params, grid)?;
            let curve = SingleDiffusionCurve {
                params,
                grid,
                steady: opts.steady,
            };
            bisect_checked(&curve, name, bracket, (-1, 1), opts.ftol)
        }
        ThresholdName::BetaC | ThresholdName::AlphaC => {
            check_hypothesis_h(params, grid)?;
            let wrt = if name == ThresholdName::BetaC { Rate::Beta } else { Rate::Alpha };
            check_rate_size(params, grid, wrt)?;
            let w = single_equilibrium(params, grid, params.d3, &opts.steady)?;
            let curve = RateCurve {
                params,
                grid,
                w_star: &w.state.components[0],
                wrt,
            };
            let (lo, hi, expect) = match wrt {
                // the pair decouples at beta = 0, so the scan starts just inside
                Rate::Beta => (bracket.1 * 1e-6, bracket.1, (-1, 1)),
                Rate::Alpha => {
                    let lo = bracket.0.max(1e-12);
                    let mut hi = 2.0 * lo;
                    let mut doublings = 0;
                    while curve.eval(hi)? >= 0.0 {
                        hi *= 2.0;
                        doublings += 1;
                        if doublings > 60 {
                            return Err(Error::NoSignChange {
                                name: name.as_str().into(),
                                lo,
                                hi,
                                f_lo: curve.eval(lo)?,
                                f_hi: curve.eval(hi)?,
                            });
                        }
                    }
                    (lo, hi, (1, -1))
                }
            };
            let mut r = bisect_checked(&curve, name, (lo, hi), expect, opts.ftol)?;
            r.bracket = bracket;
            Ok(r)
        }
        ThresholdName::MuStar => {
            let m = crate::model::sample_coefficient(&params.m, grid)?;
            let curve = |mu: f64| scalar_lambda(grid, 1.0, &m.map(|v| mu * v));
            single_root(scan_roots(&curve, name, bracket, opts.scan_points, 1, opts.ftol)?, name, bracket)
        }
        ThresholdName::MuZero => {
            let family = MuFamily::switching(params, grid)?;
            single_root(scan_roots(&family, name, bracket, opts.scan_points, 1, opts.ftol)?, name, bracket)
        }
    }
}

fn single_root(mut roots: Vec<ThresholdResult>, name: ThresholdName, bracket: (f64, f64)) -> Result<ThresholdResult> {
    match roots.pop() {
        Some(r) => Ok(r),
        None => Err(Error::NoSignChange {
            name: name.as_str().into(),
            lo: bracket.0,
            hi: bracket.1,
            f_lo: f64::NAN,
            f_hi: f64::NAN,
        }),
    }
}

/// Every sign change of `lambda2(d3)` on a log lattice over `bracket`.
pub fn scan_d0(params: &ModelParams, grid: &Grid, bracket: (f64, f64), opts: &ThresholdOptions) -> Result<Vec<ThresholdResult>> {
    check_hypothesis_h(params, grid)?;
    let curve = SingleDiffusionCurve {
        params,
        grid,
        steady: opts.steady,
    };
    scan_roots(&curve, ThresholdName::D0, bracket, opts.scan_points, opts.scan_points, opts.ftol)
}

/// Closed-form derivative of `lambda2` with respect to a constant switching rate.
pub fn lambda2_sensitivity(params: &ModelParams, grid: &Grid, wrt: Rate, opts: &SteadyOptions) -> Result<f64> {
    let (alpha, beta) = require_constant_rates(params)?;
    let w = single_equilibrium(params, grid, params.d3, opts)?;
    let e = lambda2(params, grid, &w.state.components[0])?;
    lambda2_sensitivity_from(grid, alpha, beta, &e, wrt)
}

/// The derivative quotient evaluated on a computed eigenpair `(phi1, phi2)`.
pub fn lambda2_sensitivity_from(grid: &Grid, alpha: f64, beta: f64, e: &EigenResult, wrt: Rate) -> Result<f64> {
    let (p1, p2) = (e.component(0), e.component(1));
    let int = |f: &dyn Fn(usize) -> f64| crate::mesh::integrate(grid, &(0..grid.len()).map(f).collect::<Vec<_>>());
    let denom = int(&|i| alpha * p1[i] * p1[i] + beta * p2[i] * p2[i])?;
    let num = match wrt {
        Rate::Beta => int(&|i| alpha * p1[i] * p2[i] - beta * p2[i] * p2[i])?,
        Rate::Alpha => int(&|i| beta * p1[i] * p2[i] - alpha * p1[i] * p1[i])?,
    };
    Ok(num / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    D3,
    Beta,
    Alpha,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::D3 => "d3",
            SweepParameter::Beta => "beta",
            SweepParameter::Alpha => "alpha",
        }
    }

    pub fn apply(self, params: &ModelParams, value: f64) -> ModelParams {
        match self {
            SweepParameter::D3 => params.clone().with_d3(value),
            SweepParameter::Beta => Rate::Beta.set(params, value),
            SweepParameter::Alpha => Rate::Alpha.set(params, value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    WWins,
    UvWins,
    Undetermined,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::WWins => "w_wins",
            Outcome::UvWins => "uv_wins",
            Outcome::Undetermined => "undetermined",
        }
    }
}

/// Mass below which a population counts as extinct.
pub const EXTINCT: f64 = 1e-6;
/// Mass above which a population counts as present.
pub const PERSISTENT: f64 = 1e-4;

pub fn classify_outcome(masses: &[f64]) -> Outcome {
    let (u, v, w) = (masses[0], masses[1], masses[2]);
    if u < EXTINCT && v < EXTINCT && w > PERSISTENT {
        Outcome::WWins
    } else if w < EXTINCT && u > PERSISTENT && v > PERSISTENT {
        Outcome::UvWins
    } else {
        Outcome::Undetermined
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepOptions {
    pub sim: SimOptions,
    pub steady: SteadyOptions,
    pub initial: InitialData,
    pub seed: u64,
    pub transient_fraction: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            sim: SimOptions {
                sample_interval: 5.0,
                steady_tol: Some(1e-9),
                ..SimOptions::default()
            },
            steady: SteadyOptions::default(),
            initial: InitialData::Constant {
                values: vec![0.2, 0.2, 0.2],
            },
            seed: 0,
            transient_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Invasion eigenvalue of `w` at `(u*, v*, 0)`.
    pub lambda_uv0: f64,
    /// `lambda2` at `(0, 0, w*)`.
    pub lambda_00w: f64,
    pub outcome: Outcome,
    pub floors: Vec<f64>,
    pub final_mass: Vec<f64>,
    pub final_max: Vec<f64>,
    pub t_end: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
    /// Outcome expected for small parameter values.
    pub low_outcome: Outcome,
    /// Largest swept value at or below which every outcome is `low_outcome`.
    pub empirical_c1: Option<f64>,
    /// Smallest swept value at or above which every outcome is the opposite one.
    pub empirical_c2: Option<f64>,
}

/// Per-component minimum over the post-transient window.
pub fn component_floors(log: &TrajectoryLog, transient_fraction: f64) -> Result<Vec<f64>> {
    if log.is_empty() {
        return Err(Error::EmptyWindow("trajectory has no samples".into()));
    }
    let t0 = log.sample_times[0];
    let t1 = *log.sample_times.last().expect("nonempty");
    let start = t0 + transient_fraction.clamp(0.0, 1.0) * (t1 - t0);
    let k = log.min[0].len();
    let mut floors = vec![f64::INFINITY; k];
    for (t, mins) in log.sample_times.iter().zip(&log.min) {
        if *t >= start {
            for (f, v) in floors.iter_mut().zip(mins) {
                *f = f.min(*v);
            }
        }
    }
    Ok(floors)
}

fn sweep_point(params: &ModelParams, grid: &Grid, opts: &SweepOptions, value: f64) -> Result<SweepPoint> {
    let uv = switching_equilibrium(params, grid, &opts.steady)?;
    let lambda_uv0 = scalar_lambda(grid, params.d3, &invader_potential(params, grid, &uv.state)?)?;
    let w = single_equilibrium(params, grid, params.d3, &opts.steady)?;
    let lambda_00w = lambda2(params, grid, &w.state.components[0])?.lambda;

    let mut sys = System::new(SystemKind::ThreeComponent, params, grid)?;
    let start = initial_state(&opts.initial, grid, 3, None, opts.seed)?;
    let (end, log) = simulate(&mut sys, &start, &opts.sim)?;
    let final_mass = end.masses(grid)?;
    Ok(SweepPoint {
        value,
        lambda_uv0,
        lambda_00w,
        outcome: classify_outcome(&final_mass),
        floors: component_floors(&log, opts.transient_fraction)?,
        final_max: end.components.iter().map(Field::max).collect(),
        final_mass,
        t_end: end.t,
        error: None,
    })
}

/// Simulates the three-component system across parameter values and records both
/// semi-trivial stability eigenvalues alongside the observed winner.
pub fn sweep_outcomes(
    params: &ModelParams,
    grid: &Grid,
    parameter: SweepParameter,
    values: &[f64],
    opts: &SweepOptions,
) -> Result<SweepReport> {
    check_hypothesis_h(params, grid)?;
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Config("sweep values must be positive".into()));
    }
    if parameter != SweepParameter::D3 {
        check_middle_diffusion(params)?;
        let rate = if parameter == SweepParameter::Beta { Rate::Beta } else { Rate::Alpha };
        check_rate_size(params, grid, rate)?;
    }
    let mut points: Vec<SweepPoint> = values
        .par_iter()
        .map(|&value| {
            let p = parameter.apply(params, value);
            sweep_point(&p, grid, opts, value).unwrap_or_else(|e| SweepPoint {
                value,
                lambda_uv0: f64::NAN,
                lambda_00w: f64::NAN,
                outcome: Outcome::Undetermined,
                floors: vec![],
                final_mass: vec![],
                final_max: vec![],
                t_end: f64::NAN,
                error: Some(e.to_string()),
            })
        })
        .collect();
    points.sort_by(|a, b| a.value.total_cmp(&b.value));

    let (low, high) = match parameter {
        SweepParameter::D3 | SweepParameter::Beta => (Outcome::WWins, Outcome::UvWins),
        SweepParameter::Alpha => (Outcome::UvWins, Outcome::WWins),
    };
    let empirical_c1 = points
        .iter()
        .take_while(|p| p.outcome == low)
        .last()
        .map(|p| p.value);
    let empirical_c2 = points
        .iter()
        .rev()
        .take_while(|p| p.outcome == high)
        .last()
        .map(|p| p.value);
    Ok(SweepReport {
        parameter,
        points,
        low_outcome: low,
        empirical_c1,
        empirical_c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_grid;

    fn scenario_s() -> ModelParams {
        ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0))
    }

    #[test]
    fn classification_margin() {
        assert_eq!(Classification::of(1e-9), Classification::Marginal);
        assert_eq!(Classification::of(-1e-3), Classification::LinearlyStable);
        assert_eq!(Classification::of(2e-8), Classification::LinearlyUnstable);
    }

    #[test]
    fn outcome_rules() {
        assert_eq!(classify_outcome(&[1e-8, 1e-8, 0.3]), Outcome::WWins);
        assert_eq!(classify_outcome(&[0.2, 0.1, 1e-9]), Outcome::UvWins);
        assert_eq!(classify_outcome(&[0.2, 0.1, 1e-5]), Outcome::Undetermined);
    }

    #[test]
    fn beta_threshold_needs_middle_diffusion() {
        let g = build_grid(0.0, 1.0, 41).unwrap();
        let p = scenario_s().with_d3(1.5);
        assert!(matches!(
            find_threshold(ThresholdName::BetaC, &p, &g, &ThresholdOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn d_c_in_bracket_on_coarse_grid() {
        let g = build_grid(0.0, 1.0, 81).unwrap();
        let r = find_threshold(ThresholdName::DC, &scenario_s(), &g, &ThresholdOptions::default()).unwrap();
        assert!(r.root > 0.1 && r.root < 0.55, "{}", r.root);
        assert!(r.residual <= 1e-8);
        assert_eq!((r.sign_left, r.sign_right), (1, -1));
    }

    #[test]
    fn sensitivity_matches_difference_quotient() {
        let g = build_grid(0.0, 1.0, 81).unwrap();
        let p = scenario_s().with_d3(0.4);
        let opts = SteadyOptions {
            tol: 1e-10,
            ..Default::default()
        };
        let w = single_equilibrium(&p, &g, 0.4, &opts).unwrap();
        let h = 1e-4;
        for rate in [Rate::Alpha, Rate::Beta] {
            let exact = lambda2_sensitivity(&p, &g, rate, &opts).unwrap();
            let curve = RateCurve {
                params: &p,
                grid: &g,
                w_star: &w.state.components[0],
                wrt: rate,
            };
            let fd = (curve.eval(1.0 + h).unwrap() - curve.eval(1.0 - h).unwrap()) / (2.0 * h);
            assert!((exact - fd).abs() < 1e-6, "{rate:?}: {exact} vs {fd}");
        }
    }
}
