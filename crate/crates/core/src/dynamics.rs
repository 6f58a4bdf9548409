//! Time integration: implicit diffusion, explicit reaction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::mesh::{assemble_neumann_laplacian, integrate, DiscreteOperator, Field, Grid};
use crate::model::{
    check_hypothesis_h, reaction_at, sample_coefficient, CoefficientFields, ModelParams, SystemKind,
};
use crate::spectral::EigenResult;

/// Values below this after the explicit half-step are treated as rounding.
const NEGATIVE_SLACK: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub components: Vec<Field>,
}

impl State {
    pub fn new(t: f64, components: Vec<Field>) -> Self {
        State { t, components }
    }

    pub fn zeros(grid: &Grid, k: usize) -> Self {
        State::new(0.0, vec![grid.zeros(); k])
    }

    /// Largest sup-norm distance over components.
    pub fn distance(&self, other: &State) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn masses(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.components.iter().map(|f| integrate(grid, f)).collect()
    }
}

/// A reaction-diffusion system on a grid, with cached implicit-diffusion factors.
#[derive(Debug, Clone)]
pub struct System {
    kind: SystemKind,
    interaction: (f64, f64),
    diffusions: Vec<f64>,
    fields: CoefficientFields,
    grid: Grid,
    laplacian: DiscreteOperator,
    factors: Vec<Option<(f64, BandedLu)>>,
}

impl System {
    pub fn new(kind: SystemKind, params: &ModelParams, grid: &Grid) -> Result<Self> {
        let fields = match kind {
            SystemKind::Logistic => {
                params.validate()?;
                let m = sample_coefficient(&params.m, grid)?;
                CoefficientFields {
                    alpha: grid.zeros(),
                    beta: grid.zeros(),
                    m,
                }
            }
            _ => params.fields(grid)?,
        };
        Ok(Self::from_parts(kind, kind.interaction(params), kind.diffusions(params), fields, grid))
    }

    /// Logistic equation `d w'' + w (m - w)` for an already sampled `m`.
    pub fn logistic(grid: &Grid, d: f64, m: &Field) -> Self {
        let fields = CoefficientFields {
            alpha: grid.zeros(),
            beta: grid.zeros(),
            m: m.clone(),
        };
        Self::from_parts(SystemKind::Logistic, (1.0, 1.0), vec![d], fields, grid)
    }

    pub fn from_parts(
        kind: SystemKind,
        interaction: (f64, f64),
        diffusions: Vec<f64>,
        fields: CoefficientFields,
        grid: &Grid,
    ) -> Self {
        let k = diffusions.len();
        System {
            kind,
            interaction,
            diffusions,
            fields,
            grid: grid.clone(),
            laplacian: assemble_neumann_laplacian(grid),
            factors: vec![None; k],
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn fields(&self) -> &CoefficientFields {
        &self.fields
    }

    pub fn diffusions(&self) -> &[f64] {
        &self.diffusions
    }

    pub fn interaction(&self) -> (f64, f64) {
        self.interaction
    }

    pub fn components(&self) -> usize {
        self.diffusions.len()
    }

    fn check_state(&self, comps: &[Field]) -> Result<()> {
        if comps.len() != self.components() {
            return Err(Error::DimensionMismatch {
                expected: self.components(),
                found: comps.len(),
            });
        }
        for f in comps {
            self.grid.check(f)?;
        }
        Ok(())
    }

    fn reaction_into(&self, comps: &[Field], out: &mut [Field]) {
        let k = self.components();
        let mut x = [0.0; 3];
        let mut f = [0.0; 3];
        for i in 0..self.grid.len() {
            for c in 0..k {
                x[c] = comps[c][i];
            }
            reaction_at(
                self.kind,
                self.interaction,
                self.fields.alpha[i],
                self.fields.beta[i],
                self.fields.m[i],
                &x[..k],
                &mut f[..k],
            );
            for c in 0..k {
                out[c][i] = f[c];
            }
        }
    }

    /// Reaction terms only.
    pub fn reaction(&self, comps: &[Field]) -> Result<Vec<Field>> {
        self.check_state(comps)?;
        let mut out = vec![self.grid.zeros(); self.components()];
        self.reaction_into(comps, &mut out);
        Ok(out)
    }

    /// Full right-hand side `d_k L x_k + f_k(x)`.
    pub fn rhs(&self, comps: &[Field]) -> Result<Vec<Field>> {
        let mut out = self.reaction(comps)?;
        let mut lap = vec![0.0; self.grid.len()];
        for (c, d) in self.diffusions.iter().enumerate() {
            self.laplacian.apply_into(&comps[c], &mut lap);
            for (o, l) in out[c].iter_mut().zip(&lap) {
                *o += d * l;
            }
        }
        Ok(out)
    }

    /// Sup-norm of the right-hand side.
    pub fn residual(&self, comps: &[Field]) -> Result<f64> {
        Ok(self.rhs(comps)?.iter().map(Field::sup_norm).fold(0.0, f64::max))
    }

    fn factor(&mut self, c: usize, dt: f64) -> Result<&BandedLu> {
        let fresh = !matches!(&self.factors[c], Some((cached, _)) if *cached == dt);
        if fresh {
            let n = self.grid.len();
            let d = self.diffusions[c];
            let mut a = BandedMatrix::zeros(n, 1, 1);
            for i in 0..n {
                for j in i.saturating_sub(1)..=(i + 1).min(n - 1) {
                    let id = if i == j { 1.0 } else { 0.0 };
                    a.set(i, j, id - dt * d * self.laplacian.entry(i, j));
                }
            }
            self.factors[c] = Some((dt, a.factor()?));
        }
        Ok(&self.factors[c].as_ref().expect("factor cached").1)
    }

    /// One backward-Euler diffusion / forward-Euler reaction step.
    pub fn step(&mut self, state: &State, dt: f64) -> Result<State> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        self.check_state(&state.components)?;
        let mut next = vec![self.grid.zeros(); self.components()];
        self.reaction_into(&state.components, &mut next);
        for (c, out) in next.iter_mut().enumerate() {
            for (node, (o, x)) in out.iter_mut().zip(state.components[c].iter()).enumerate() {
                let v = x + dt * *o;
                if v < -NEGATIVE_SLACK {
                    return Err(Error::Overshoot {
                        t: state.t,
                        component: c,
                        node,
                        value: v,
                    });
                }
                // flushing subnormals keeps long extinction runs fast
                *o = if v < f64::MIN_POSITIVE { 0.0 } else { v };
            }
        }
        for (c, out) in next.iter_mut().enumerate() {
            self.factor(c, dt)?.solve_in_place(out);
        }
        Ok(State::new(state.t + dt, next))
    }

    /// Step with automatic halving on overshoot. Returns the state and the step used.
    fn step_adaptive(&mut self, state: &State, dt: f64, halvings: u32) -> Result<(State, f64)> {
        let mut h = dt;
        let mut left = halvings;
        loop {
            match self.step(state, h) {
                Ok(s) => return Ok((s, h)),
                Err(Error::Overshoot { .. }) if left > 0 => {
                    h *= 0.5;
                    left -= 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// One IMEX step for the given system kind.
pub fn step_imex(kind: SystemKind, params: &ModelParams, grid: &Grid, state: &State, dt: f64) -> Result<State> {
    System::new(kind, params, grid)?.step(state, dt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteadyOptions {
    pub dt: f64,
    pub tol: f64,
    pub t_max: f64,
    /// Steps between residual evaluations.
    pub check_every: usize,
    pub max_halvings: u32,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        SteadyOptions {
            dt: 0.01,
            tol: 1e-9,
            t_max: 2000.0,
            check_every: 10,
            max_halvings: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyResult {
    pub state: State,
    pub residual: f64,
    pub converged: bool,
    pub steps: usize,
}

/// Steps until the right-hand side residual drops to `opts.tol` or `t_max` is reached.
pub fn integrate_to_steady(system: &mut System, initial: &State, opts: &SteadyOptions) -> Result<SteadyResult> {
    let mut state = initial.clone();
    let mut dt = opts.dt;
    let mut steps = 0;
    let mut residual = system.residual(&state.components)?;
    while residual > opts.tol && state.t < opts.t_max {
        let (next, used) = system.step_adaptive(&state, dt, opts.max_halvings)?;
        // keep the reduced step once halving was needed
        dt = used;
        state = next;
        steps += 1;
        if steps % opts.check_every.max(1) == 0 || state.t >= opts.t_max {
            residual = system.residual(&state.components)?;
        }
    }
    Ok(SteadyResult {
        state,
        residual,
        converged: residual <= opts.tol,
        steps,
    })
}

/// Steady state of the switching pair. Under hypothesis (H) the result must lie in
/// `[0, max beta] x [0, max alpha]`.
pub fn submodel_steady(params: &ModelParams, grid: &Grid, initial: &State, opts: &SteadyOptions) -> Result<SteadyResult> {
    let mut sys = System::new(SystemKind::Submodel, params, grid)?;
    let res = integrate_to_steady(&mut sys, initial, opts)?;
    if check_hypothesis_h(params, grid).is_ok() {
        let (amax, bmax) = (sys.fields.alpha.max(), sys.fields.beta.max());
        let (u, v) = (&res.state.components[0], &res.state.components[1]);
        if u.max() > bmax || v.max() > amax {
            return Err(Error::Invariant(format!(
                "steady state leaves [0, {bmax}] x [0, {amax}]: max u = {}, max v = {}",
                u.max(),
                v.max()
            )));
        }
    }
    Ok(res)
}

/// Positive steady state `w*` of `d w'' + w (m - w) = 0`.
pub fn logistic_steady(grid: &Grid, d: f64, m: &Field, opts: &SteadyOptions) -> Result<SteadyResult> {
    let mut sys = System::logistic(grid, d, m);
    let start = State::new(0.0, vec![grid.constant(m.max().max(1e-3))]);
    integrate_to_steady(&mut sys, &start, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    pub dt: f64,
    pub t_max: f64,
    /// Time between logged samples.
    pub sample_interval: f64,
    pub keep_snapshots: bool,
    /// Stop early once the residual drops below this value.
    pub steady_tol: Option<f64>,
    pub max_halvings: u32,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            dt: 0.01,
            t_max: 2000.0,
            sample_interval: 1.0,
            keep_snapshots: false,
            steady_tol: None,
            max_halvings: 4,
        }
    }
}

/// Per-sample summaries of a trajectory; indices are `[sample][component]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub sample_times: Vec<f64>,
    pub min: Vec<Vec<f64>>,
    pub max: Vec<Vec<f64>>,
    pub mass: Vec<Vec<f64>>,
    pub snapshots: Vec<Vec<Field>>,
    pub lyapunov: Option<Vec<f64>>,
}

impl TrajectoryLog {
    fn record(&mut self, grid: &Grid, state: &State, keep: bool) -> Result<()> {
        self.sample_times.push(state.t);
        self.min.push(state.components.iter().map(|f| f.min()).collect());
        self.max.push(state.components.iter().map(|f| f.max()).collect());
        self.mass.push(state.masses(grid)?);
        if keep {
            self.snapshots.push(state.components.clone());
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }

    /// Masses at the last sample.
    pub fn final_mass(&self) -> Option<&[f64]> {
        self.mass.last().map(Vec::as_slice)
    }
}

/// Integrates to `t_max` (or to steady state), logging at fixed intervals.
pub fn simulate(system: &mut System, initial: &State, opts: &SimOptions) -> Result<(State, TrajectoryLog)> {
    if !(opts.sample_interval > 0.0) {
        return Err(Error::Config("sample interval must be positive".into()));
    }
    let grid = system.grid.clone();
    let mut log = TrajectoryLog::default();
    let mut state = initial.clone();
    log.record(&grid, &state, opts.keep_snapshots)?;
    let mut next_sample = state.t + opts.sample_interval;
    let mut dt = opts.dt;
    let eps = 1e-9 * opts.dt;
    while state.t < opts.t_max - eps {
        let h = dt.min(next_sample - state.t).min(opts.t_max - state.t);
        let (next, used) = system.step_adaptive(&state, h, opts.max_halvings)?;
        if used < h {
            dt = used;
        }
        state = next;
        if state.t >= next_sample - eps {
            state.t = next_sample.min(opts.t_max).max(state.t);
            log.record(&grid, &state, opts.keep_snapshots)?;
            next_sample += opts.sample_interval;
            if let Some(tol) = opts.steady_tol {
                if system.residual(&state.components)? <= tol {
                    break;
                }
            }
        }
    }
    if log.sample_times.last() != Some(&state.t) {
        log.record(&grid, &state, opts.keep_snapshots)?;
    }
    Ok((state, log))
}

/// `L = int (psi1 u + psi2 v)` at every logged snapshot.
pub fn monitor_lyapunov(log: &TrajectoryLog, adjoint: &EigenResult, grid: &Grid) -> Result<Vec<f64>> {
    if log.snapshots.len() != log.len() {
        return Err(Error::Config("trajectory was logged without snapshots".into()));
    }
    let k = adjoint.eigenfunctions.len();
    log.snapshots
        .iter()
        .map(|comps| {
            if comps.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: comps.len(),
                });
            }
            let mut s = 0.0;
            for (f, psi) in comps.iter().zip(&adjoint.eigenfunctions) {
                if psi.len() != f.len() {
                    return Err(Error::DimensionMismatch {
                        expected: psi.len(),
                        found: f.len(),
                    });
                }
                s += integrate(grid, &f.zip_map(psi, |a, b| a * b))?;
            }
            Ok(s)
        })
        .collect()
}

/// `-int [psi1 u (u + b v) + psi2 v (c u + v)]`, the rate of change of the
/// Lyapunov functional when the principal eigenvalue vanishes.
pub fn lyapunov_dissipation(comps: &[Field], adjoint: &EigenResult, (b, c): (f64, f64), grid: &Grid) -> Result<f64> {
    if comps.len() != 2 || adjoint.eigenfunctions.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: comps.len(),
        });
    }
    let (u, v) = (&comps[0], &comps[1]);
    let (p1, p2) = (adjoint.component(0), adjoint.component(1));
    let integrand: Vec<f64> = (0..grid.len())
        .map(|i| p1[i] * u[i] * (u[i] + b * v[i]) + p2[i] * v[i] * (c * u[i] + v[i]))
        .collect();
    Ok(-integrate(grid, &integrand)?)
}

/// Smallest spatial minimum over all components after the transient.
pub fn persistence_floor(log: &TrajectoryLog, transient_fraction: f64) -> Result<f64> {
    if log.is_empty() {
        return Err(Error::EmptyWindow("trajectory has no samples".into()));
    }
    let t0 = log.sample_times[0];
    let t1 = *log.sample_times.last().expect("nonempty");
    let start = t0 + transient_fraction.clamp(0.0, 1.0) * (t1 - t0);
    let floor = log
        .sample_times
        .iter()
        .zip(&log.min)
        .filter(|(t, _)| **t >= start)
        .flat_map(|(_, mins)| mins.iter().copied())
        .fold(f64::INFINITY, f64::min);
    if floor.is_infinite() {
        return Err(Error::EmptyWindow(format!("no samples after t = {start}")));
    }
    Ok(floor)
}

/// Initial data library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// Spatially constant, one value per component.
    Constant { values: Vec<f64> },
    /// Multiple of a positive eigenfunction.
    Eigenfunction { scale: f64 },
    /// Independent uniform nodal values in `[lower_k, upper_k]`.
    Random { lower: Vec<f64>, upper: Vec<f64> },
}

pub fn initial_state(
    data: &InitialData,
    grid: &Grid,
    components: usize,
    eigen: Option<&EigenResult>,
    seed: u64,
) -> Result<State> {
    let per_component = |v: &Vec<f64>| -> Result<()> {
        if v.len() != components {
            return Err(Error::DimensionMismatch {
                expected: components,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::Config("initial data must be nonnegative".into()));
        }
        Ok(())
    };
    let comps = match data {
        InitialData::Constant { values } => {
            per_component(values)?;
            values.iter().map(|&v| grid.constant(v)).collect()
        }
        InitialData::Eigenfunction { scale } => {
            let e = eigen.ok_or_else(|| Error::Config("eigenfunction initial data needs an eigenpair".into()))?;
            if e.eigenfunctions.len() != components {
                return Err(Error::DimensionMismatch {
                    expected: components,
                    found: e.eigenfunctions.len(),
                });
            }
            if !(*scale >= 0.0) {
                return Err(Error::Config("scale must be nonnegative".into()));
            }
            e.eigenfunctions.iter().map(|f| f.map(|v| scale * v)).collect()
        }
        InitialData::Random { lower, upper } => {
            per_component(lower)?;
            per_component(upper)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            lower
                .iter()
                .zip(upper)
                .map(|(&lo, &hi)| {
                    if hi < lo {
                        return Err(Error::Config(format!("empty range [{lo}, {hi}]")));
                    }
                    Ok(Field::new(
                        (0..grid.len())
                            .map(|_| if hi > lo { rng.gen_range(lo..hi) } else { lo })
                            .collect(),
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(State::new(0.0, comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_grid;
    use crate::model::{CoefficientSpec, Rectangle};

    fn scenario_s() -> ModelParams {
        ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0))
    }

    #[test]
    fn zero_is_fixed() {
        let g = build_grid(0.0, 1.0, 21).unwrap();
        for kind in [SystemKind::Logistic, SystemKind::Submodel, SystemKind::ThreeComponent] {
            let s = State::zeros(&g, kind.components());
            let next = step_imex(kind, &scenario_s(), &g, &s, 0.01).unwrap();
            assert!(next.components.iter().all(|f| f.sup_norm() == 0.0));
        }
    }

    #[test]
    fn logistic_constant_step() {
        let g = build_grid(0.0, 1.0, 11).unwrap();
        let p = ModelParams::switching(1.0, 1.0, 1.0, 1.0, CoefficientSpec::constant(1.0));
        let s = State::new(0.0, vec![g.constant(0.5)]);
        let next = step_imex(SystemKind::Logistic, &p, &g, &s, 0.01).unwrap();
        for v in next.components[0].iter() {
            assert!((v - 0.5025).abs() < 1e-14, "{v}");
        }
    }

    #[test]
    fn logistic_constant_equilibrium() {
        let g = build_grid(0.0, 1.0, 51).unwrap();
        let r = logistic_steady(&g, 0.3, &g.constant(0.8), &SteadyOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.state.components[0].iter().all(|v| (v - 0.8).abs() < 1e-8));
    }

    #[test]
    fn overshoot_is_reported() {
        let g = build_grid(0.0, 1.0, 11).unwrap();
        let p = ModelParams::switching(1.0, 1.0, 1.0, 1.0, CoefficientSpec::constant(1.0));
        let s = State::new(0.0, vec![g.constant(50.0)]);
        assert!(matches!(
            step_imex(SystemKind::Logistic, &p, &g, &s, 1.0),
            Err(Error::Overshoot { .. })
        ));
    }

    #[test]
    fn cooperative_rectangle_is_kept() {
        let g = build_grid(0.0, 1.0, 41).unwrap();
        let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0));
        let rect = Rectangle::new((0.0, 0.0), (1.0, 1.0)).unwrap();
        let mut sys = System::new(SystemKind::Submodel, &p, &g).unwrap();
        let mut s = initial_state(
            &InitialData::Random {
                lower: vec![0.0, 0.0],
                upper: vec![1.0, 1.0],
            },
            &g,
            2,
            None,
            3,
        )
        .unwrap();
        for _ in 0..200 {
            s = sys.step(&s, 0.01).unwrap();
            for i in 0..g.len() {
                assert!(rect.contains(s.components[0][i], s.components[1][i], 0.0));
            }
        }
    }

    #[test]
    fn floor_window() {
        let log = TrajectoryLog {
            sample_times: vec![0.0, 1.0, 2.0, 3.0],
            min: vec![vec![0.0], vec![0.1], vec![0.3], vec![0.2]],
            ..Default::default()
        };
        assert_eq!(persistence_floor(&log, 0.5).unwrap(), 0.2);
        assert!(persistence_floor(&TrajectoryLog::default(), 0.5).is_err());
    }

    #[test]
    fn zero_trajectory_has_zero_lyapunov() {
        let g = build_grid(0.0, 1.0, 21).unwrap();
        let p = scenario_s();
        let mut sys = System::new(SystemKind::Submodel, &p, &g).unwrap();
        let opts = SimOptions {
            t_max: 1.0,
            sample_interval: 0.25,
            keep_snapshots: true,
            ..Default::default()
        };
        let (_, log) = simulate(&mut sys, &State::zeros(&g, 2), &opts).unwrap();
        assert_eq!(log.len(), 5);
        let adj = crate::spectral::adjoint_principal_eigen(&crate::spectral::EigenProblem::switching(&p, &g).unwrap()).unwrap();
        assert!(monitor_lyapunov(&log, &adj, &g).unwrap().iter().all(|v| *v == 0.0));
    }
}
