//! Model parameters, coefficient profiles, reaction terms and regime classification.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{integrate, Field, Grid};

/// Spatial profile of a coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    /// `mean + amplitude * cos(frequency * pi * (x - a) / (b - a))`
    CosineProfile {
        mean: f64,
        amplitude: f64,
        frequency: f64,
    },
    Samples {
        values: Vec<f64>,
    },
}

impl CoefficientSpec {
    pub fn constant(value: f64) -> Self {
        CoefficientSpec::Constant { value }
    }

    pub fn cosine(mean: f64, amplitude: f64, frequency: f64) -> Self {
        CoefficientSpec::CosineProfile {
            mean,
            amplitude,
            frequency,
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self {
            CoefficientSpec::Constant { value } => Some(value),
            CoefficientSpec::CosineProfile {
                mean, amplitude, ..
            } if amplitude == 0.0 => Some(mean),
            _ => None,
        }
    }

    /// Same profile multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            CoefficientSpec::Constant { value } => CoefficientSpec::Constant {
                value: value * factor,
            },
            CoefficientSpec::CosineProfile {
                mean,
                amplitude,
                frequency,
            } => CoefficientSpec::CosineProfile {
                mean: mean * factor,
                amplitude: amplitude * factor,
                frequency: *frequency,
            },
            CoefficientSpec::Samples { values } => CoefficientSpec::Samples {
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }
}

pub fn sample_coefficient(spec: &CoefficientSpec, grid: &Grid) -> Result<Field> {
    match spec {
        CoefficientSpec::Constant { value } => Ok(grid.constant(*value)),
        CoefficientSpec::CosineProfile {
            mean,
            amplitude,
            frequency,
        } => {
            let (a, len) = (grid.a(), grid.measure());
            Ok(grid.field_from(|x| mean + amplitude * (frequency * PI * (x - a) / len).cos()))
        }
        CoefficientSpec::Samples { values } => {
            if values.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    found: values.len(),
                });
            }
            Ok(Field::new(values.clone()))
        }
    }
}

/// Diffusion rates, interaction coefficients and the three coefficient profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    #[serde(default = "default_d3")]
    pub d3: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub alpha: CoefficientSpec,
    pub beta: CoefficientSpec,
    pub m: CoefficientSpec,
}

fn one() -> f64 {
    1.0
}

fn default_d3() -> f64 {
    1.0
}

impl ModelParams {
    /// Constant switching rates with the given `m` profile; `b = c = 1`, `d3 = d1`.
    pub fn switching(d1: f64, d2: f64, alpha: f64, beta: f64, m: CoefficientSpec) -> Self {
        ModelParams {
            d1,
            d2,
            d3: d1,
            b: 1.0,
            c: 1.0,
            alpha: CoefficientSpec::constant(alpha),
            beta: CoefficientSpec::constant(beta),
            m,
        }
    }

    pub fn with_d3(mut self, d3: f64) -> Self {
        self.d3 = d3;
        self
    }

    pub fn with_interaction(mut self, b: f64, c: f64) -> Self {
        self.b = b;
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite();
        if !(self.d1 > 0.0 && ok(self.d1) && self.d2 >= self.d1 && ok(self.d2)) {
            return Err(Error::Config(format!(
                "diffusion rates must satisfy 0 < d1 <= d2, got d1 = {}, d2 = {}",
                self.d1, self.d2
            )));
        }
        if !(self.d3 > 0.0 && ok(self.d3)) {
            return Err(Error::Config(format!("d3 must be positive, got {}", self.d3)));
        }
        if !(self.b >= 0.0 && self.c >= 0.0 && ok(self.b) && ok(self.c)) {
            return Err(Error::Config(format!(
                "interaction coefficients must be nonnegative, got b = {}, c = {}",
                self.b, self.c
            )));
        }
        Ok(())
    }

    /// Samples the coefficient profiles and checks their sign conditions.
    pub fn fields(&self, grid: &Grid) -> Result<CoefficientFields> {
        self.validate()?;
        let alpha = sample_coefficient(&self.alpha, grid)?;
        let beta = sample_coefficient(&self.beta, grid)?;
        let m = sample_coefficient(&self.m, grid)?;
        for (name, f) in [("alpha", &alpha), ("beta", &beta)] {
            if f.min() < 0.0 {
                return Err(Error::Config(format!("{name} must be nonnegative")));
            }
            if !(f.max() > 0.0) {
                return Err(Error::Config(format!("{name} must be positive somewhere")));
            }
        }
        if !(m.max() > 0.0) {
            return Err(Error::Config("m must be positive somewhere".into()));
        }
        Ok(CoefficientFields { alpha, beta, m })
    }

    /// `(alpha, beta)` when both switching rates are spatially constant.
    pub fn constant_rates(&self) -> Option<(f64, f64)> {
        Some((self.alpha.as_constant()?, self.beta.as_constant()?))
    }

    /// The switching-weighted mean diffusion `(beta d1 + alpha d2) / (alpha + beta)`.
    pub fn weighted_diffusion(&self) -> Option<f64> {
        let (a, b) = self.constant_rates()?;
        Some((b * self.d1 + a * self.d2) / (a + b))
    }
}

/// Coefficient profiles sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFields {
    pub alpha: Field,
    pub beta: Field,
    pub m: Field,
}

/// Which reaction-diffusion system is being integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// Two switching subpopulations with free cross-interaction `b`, `c`.
    TwoSpeciesGeneral,
    /// Two switching subpopulations sharing one density (`b = c = 1`).
    Submodel,
    /// Single diffusive logistic population.
    Logistic,
    /// The switching pair competing with a single-rate diffuser.
    ThreeComponent,
}

impl SystemKind {
    pub fn components(self) -> usize {
        match self {
            SystemKind::TwoSpeciesGeneral | SystemKind::Submodel => 2,
            SystemKind::Logistic => 1,
            SystemKind::ThreeComponent => 3,
        }
    }

    /// Diffusion rate of each component.
    pub fn diffusions(self, p: &ModelParams) -> Vec<f64> {
        match self {
            SystemKind::TwoSpeciesGeneral | SystemKind::Submodel => vec![p.d1, p.d2],
            SystemKind::Logistic => vec![p.d3],
            SystemKind::ThreeComponent => vec![p.d1, p.d2, p.d3],
        }
    }

    /// Cross-interaction coefficients in effect for this kind.
    pub fn interaction(self, p: &ModelParams) -> (f64, f64) {
        match self {
            SystemKind::TwoSpeciesGeneral => (p.b, p.c),
            _ => (1.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::TwoSpeciesGeneral => "two_species_general",
            SystemKind::Submodel => "submodel",
            SystemKind::Logistic => "logistic",
            SystemKind::ThreeComponent => "three_component",
        }
    }
}

/// Non-diffusive right-hand side at one node, written into `out`.
///
/// `b` and `c` are the effective interaction coefficients for `kind`
/// (see [`SystemKind::interaction`]).
#[inline]
pub(crate) fn reaction_at(
    kind: SystemKind,
    (b, c): (f64, f64),
    alpha: f64,
    beta: f64,
    m: f64,
    x: &[f64],
    out: &mut [f64],
) {
    match kind {
        SystemKind::TwoSpeciesGeneral | SystemKind::Submodel => {
            let (u, v) = (x[0], x[1]);
            out[0] = (m - alpha - u) * u + (beta - b * u) * v;
            out[1] = (m - beta - v) * v + (alpha - c * v) * u;
        }
        SystemKind::Logistic => {
            out[0] = x[0] * (m - x[0]);
        }
        SystemKind::ThreeComponent => {
            let (u, v, w) = (x[0], x[1], x[2]);
            let free = m - u - v - w;
            out[0] = -alpha * u + beta * v + u * free;
            out[1] = alpha * u - beta * v + v * free;
            out[2] = w * free;
        }
    }
}

pub fn reaction_terms(
    kind: SystemKind,
    params: &ModelParams,
    fields: &CoefficientFields,
    state_values: &[f64],
    node: usize,
) -> Result<Vec<f64>> {
    let k = kind.components();
    if state_values.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: state_values.len(),
        });
    }
    if node >= fields.m.len() {
        return Err(Error::Config(format!("node {node} outside grid")));
    }
    let mut out = vec![0.0; k];
    reaction_at(
        kind,
        kind.interaction(params),
        fields.alpha[node],
        fields.beta[node],
        fields.m[node],
        state_values,
        &mut out,
    );
    Ok(out)
}

/// Closed rectangle `[lower.0, upper.0] x [lower.1, upper.1]` in the `(u, v)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub lower: (f64, f64),
    pub upper: (f64, f64),
}

impl Rectangle {
    pub fn new(lower: (f64, f64), upper: (f64, f64)) -> Result<Self> {
        let r = Rectangle { lower, upper };
        if !(lower.0 >= 0.0 && lower.1 >= 0.0 && lower.0 < upper.0 && lower.1 < upper.1) {
            return Err(Error::Invariant(format!("degenerate rectangle {r:?}")));
        }
        Ok(r)
    }

    pub fn contains(&self, u: f64, v: f64, slack: f64) -> bool {
        u >= self.lower.0 - slack
            && u <= self.upper.0 + slack
            && v >= self.lower.1 - slack
            && v <= self.upper.1 + slack
    }
}

/// Extremes of the coefficient profiles over the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub m_min: f64,
    pub m_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl Extremes {
    pub fn of(fields: &CoefficientFields) -> Self {
        Extremes {
            m_min: fields.m.min(),
            m_max: fields.m.max(),
            alpha_min: fields.alpha.min(),
            alpha_max: fields.alpha.max(),
            beta_min: fields.beta.min(),
            beta_max: fields.beta.max(),
        }
    }
}

/// Outcome of the competitive/cooperative regime tests.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    /// `min(alpha_min / alpha_max, beta_min / beta_max)`
    pub k: f64,
    /// `max(beta_max / beta_min, alpha_max / alpha_min)`; infinite if a rate vanishes somewhere.
    pub k1: f64,
    /// Larger root of `(b x - c)(c x - b) = 1`.
    pub k0: f64,
    pub in_s1: bool,
    pub in_s2: bool,
    /// Eventually attracting region where the pair is competitive.
    pub competitive_rectangle: Option<Rectangle>,
    /// Eventually attracting region where the pair is cooperative.
    pub cooperative_rectangle: Option<Rectangle>,
}

/// Larger root of `bc x^2 - (b^2 + c^2) x + (bc - 1) = 0`.
pub fn k0_root(b: f64, c: f64) -> f64 {
    let qa = b * c;
    let qb = -(b * b + c * c);
    let qc = b * c - 1.0;
    let disc = (b * b - c * c).powi(2) + 4.0 * b * c;
    // stable form of the larger root
    let q = -0.5 * (qb - disc.sqrt());
    let r1 = q / qa;
    let r2 = qc / q;
    r1.max(r2)
}

pub fn classify_regime(params: &ModelParams, grid: &Grid) -> Result<RegimeReport> {
    let fields = params.fields(grid)?;
    let (b, c) = (params.b, params.c);
    if !(b > 0.0 && c > 0.0) {
        return Err(Error::Config("regime tests need b, c > 0".into()));
    }
    let e = Extremes::of(&fields);
    if !(e.m_min > 0.0) {
        return Err(Error::Hypothesis(format!(
            "competitive-regime test requires min m > 0, got {}",
            e.m_min
        )));
    }
    let k = (e.alpha_min / e.alpha_max).min(e.beta_min / e.beta_max);
    let k1 = if e.alpha_min > 0.0 && e.beta_min > 0.0 {
        (e.beta_max / e.beta_min).max(e.alpha_max / e.alpha_min)
    } else {
        f64::INFINITY
    };
    let k0 = k0_root(b, c);

    let (x, y) = (e.beta_max, e.alpha_max);
    let in_s1 = e.alpha_min > 0.0
        && e.beta_min > 0.0
        && k > (1.0 - e.m_min / (b * e.m_max)).max(1.0 - e.m_min / (c * e.m_max))
        && e.m_min + b * (k - 1.0) * e.m_max - y - x / b > 0.0
        && e.m_min + c * (k - 1.0) * e.m_max - x - y / c > 0.0;

    let (x2, y2) = (e.beta_min / b, e.alpha_min / c);
    let in_s2 = k1 < 1.0 + k0
        && x2 > 0.0
        && y2 > 0.0
        && e.m_max - x2 + (b * (k1 - 1.0) - c) * y2 < 0.0
        && e.m_max - y2 + (c * (k1 - 1.0) - b) * x2 < 0.0;

    let competitive_rectangle = if in_s1 {
        Some(Rectangle::new(
            (e.beta_max / b, e.alpha_max / c),
            (e.m_max, e.m_max),
        )?)
    } else {
        None
    };
    let cooperative_rectangle = if in_s2 {
        Some(Rectangle::new((0.0, 0.0), (x2, y2))?)
    } else {
        None
    };
    Ok(RegimeReport {
        k,
        k1,
        k0,
        in_s1,
        in_s2,
        competitive_rectangle,
        cooperative_rectangle,
    })
}

/// True when `g1(x, B1, v) < 0` on `v in [0, B2]` and `g2(x, u, B2) < 0` on `u in [0, B1]`
/// at every node. Both are affine in the free variable, so endpoints suffice.
fn bounds_repel(fields: &CoefficientFields, b: f64, c: f64, b1: f64, b2: f64) -> bool {
    (0..fields.m.len()).all(|i| {
        let (m, al, be) = (fields.m[i], fields.alpha[i], fields.beta[i]);
        let g1 = |v: f64| (m - al - b1) * b1 + (be - b * b1) * v;
        let g2 = |u: f64| (m - be - b2) * b2 + (al - c * b2) * u;
        g1(0.0) < 0.0 && g1(b2) < 0.0 && g2(0.0) < 0.0 && g2(b1) < 0.0
    })
}

/// Attracting invariant rectangle for the two-species system.
///
/// In the competitive regime this is the rectangle with corners
/// `(beta_max/b, alpha_max/c)` and `(m_max, m_max)`. Otherwise the upper corner is the
/// smallest point of a geometric lattice (ratio 2^(-1/16)) below the starting bound
/// `m_max + (alpha_max + beta_max) / min(b, c, 1)` whose faces repel, and the lower
/// corner is the origin.
pub fn invariant_rectangle(params: &ModelParams, grid: &Grid) -> Result<Rectangle> {
    let fields = params.fields(grid)?;
    let e = Extremes::of(&fields);
    let (b, c) = (params.b, params.c);

    if b > 0.0 && c > 0.0 && e.m_min > 0.0 {
        let report = classify_regime(params, grid)?;
        if let Some(r) = report.competitive_rectangle {
            return Ok(r);
        }
    }

    let scale = b.min(c).min(1.0);
    if !(scale > 0.0) {
        return Err(Error::Config("upper-bound search needs b, c > 0".into()));
    }
    let mut bound = e.m_max + (e.alpha_max + e.beta_max) / scale;
    let mut tries = 0;
    while !bounds_repel(&fields, b, c, bound, bound) {
        bound *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::Invariant("no finite repelling bound found".into()));
        }
    }
    let ratio = 2f64.powf(-1.0 / 16.0);
    let (mut b1, mut b2) = (bound, bound);
    loop {
        let mut moved = false;
        if bounds_repel(&fields, b, c, b1 * ratio, b2) {
            b1 *= ratio;
            moved = true;
        }
        if bounds_repel(&fields, b, c, b1, b2 * ratio) {
            b2 *= ratio;
            moved = true;
        }
        if !moved {
            break;
        }
    }
    Rectangle::new((0.0, 0.0), (b1, b2))
}

/// Checks the standing assumption for the three-component system: `m` non-constant,
/// `int m >= 0` and `0 < max m < alpha + beta` at every node.
pub fn check_hypothesis_h(params: &ModelParams, grid: &Grid) -> Result<()> {
    let fields = params.fields(grid)?;
    let (lo, hi) = (fields.m.min(), fields.m.max());
    if hi - lo <= 1e-12 * (1.0 + hi.abs()) {
        return Err(Error::Hypothesis("m must be non-constant".into()));
    }
    let total = integrate(grid, &fields.m)?;
    if total < 0.0 {
        return Err(Error::Hypothesis(format!("integral of m is negative ({total})")));
    }
    let rate_floor = fields
        .alpha
        .iter()
        .zip(fields.beta.iter())
        .map(|(a, b)| a + b)
        .fold(f64::INFINITY, f64::min);
    if !(hi > 0.0 && hi < rate_floor) {
        return Err(Error::Hypothesis(format!(
            "need 0 < max m < alpha + beta, got max m = {hi}, min(alpha + beta) = {rate_floor}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_grid;

    fn unit(n: usize) -> Grid {
        build_grid(0.0, 1.0, n).unwrap()
    }

    fn constant_params(m: f64, alpha: f64, beta: f64, b: f64, c: f64) -> ModelParams {
        ModelParams::switching(0.1, 1.0, alpha, beta, CoefficientSpec::constant(m)).with_interaction(b, c)
    }

    #[test]
    fn sampling_examples() {
        let g = unit(11);
        let f = sample_coefficient(&CoefficientSpec::constant(2.0), &g).unwrap();
        assert!(f.iter().all(|&v| v == 2.0));
        let f = sample_coefficient(&CoefficientSpec::cosine(1.0, 0.5, 1.0), &g).unwrap();
        for (x, v) in g.nodes().iter().zip(f.iter()) {
            assert!((v - (1.0 + 0.5 * (PI * x).cos())).abs() < 1e-15);
        }
        let g = unit(201);
        let f = sample_coefficient(&CoefficientSpec::cosine(0.0, 1.0, 2.0), &g).unwrap();
        assert!(integrate(&g, &f).unwrap().abs() < 1e-10);
        let bad = CoefficientSpec::Samples { values: vec![1.0; 5] };
        assert!(matches!(
            sample_coefficient(&bad, &g),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reaction_examples() {
        let g = unit(5);
        let p = constant_params(1.0, 0.2, 0.2, 1.0, 1.0);
        let f = p.fields(&g).unwrap();
        let r = reaction_terms(SystemKind::TwoSpeciesGeneral, &p, &f, &[0.0, 0.0], 2).unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
        // (1 - 0.2 - 0.5) 0.5 + (0.2 - 0.5) 0.5 = 0.15 - 0.15
        let r = reaction_terms(SystemKind::TwoSpeciesGeneral, &p, &f, &[0.5, 0.5], 2).unwrap();
        assert!(r[0].abs() < 1e-15);
        let r = reaction_terms(SystemKind::Logistic, &p, &f, &[1.0], 0).unwrap();
        assert_eq!(r, vec![0.0]);
        for kind in [
            SystemKind::TwoSpeciesGeneral,
            SystemKind::Submodel,
            SystemKind::Logistic,
            SystemKind::ThreeComponent,
        ] {
            let zero = vec![0.0; kind.components()];
            let r = reaction_terms(kind, &p, &f, &zero, 1).unwrap();
            assert!(r.iter().all(|&v| v == 0.0), "{kind:?}");
        }
        assert!(matches!(
            reaction_terms(SystemKind::ThreeComponent, &p, &f, &[0.1, 0.2], 1),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn three_component_terms() {
        let g = unit(5);
        let p = constant_params(0.9, 0.3, 0.7, 1.0, 1.0);
        let f = p.fields(&g).unwrap();
        let r = reaction_terms(SystemKind::ThreeComponent, &p, &f, &[0.1, 0.2, 0.3], 0).unwrap();
        let free = 0.9 - 0.6;
        assert!((r[0] - (-0.3 * 0.1 + 0.7 * 0.2 + 0.1 * free)).abs() < 1e-15);
        assert!((r[1] - (0.3 * 0.1 - 0.7 * 0.2 + 0.2 * free)).abs() < 1e-15);
        assert!((r[2] - 0.3 * free).abs() < 1e-15);
    }

    #[test]
    fn k0_for_unit_interaction_is_two() {
        assert!((k0_root(1.0, 1.0) - 2.0).abs() < 1e-14);
        let g = unit(11);
        let r = classify_regime(&constant_params(1.0, 0.3, 0.3, 1.0, 1.0), &g).unwrap();
        assert_eq!(r.k, 1.0);
        assert_eq!(r.k1, 1.0);
        assert!(r.k1 < 1.0 + r.k0);
    }

    #[test]
    fn competitive_regime_example() {
        let g = unit(21);
        let p = constant_params(1.0, 0.05, 0.05, 0.5, 0.5);
        let r = classify_regime(&p, &g).unwrap();
        assert!(r.in_s1);
        let rect = r.competitive_rectangle.unwrap();
        assert!((rect.lower.0 - 0.1).abs() < 1e-15 && (rect.lower.1 - 0.1).abs() < 1e-15);
        assert_eq!(rect.upper, (1.0, 1.0));
        let inv = invariant_rectangle(&p, &g).unwrap();
        assert_eq!(inv, rect);
    }

    #[test]
    fn cooperative_regime_example() {
        let g = unit(21);
        let p = constant_params(1.0, 2.0, 2.0, 1.0, 1.0);
        let r = classify_regime(&p, &g).unwrap();
        assert!(r.in_s2);
        assert!(!r.in_s1);
        assert_eq!(r.cooperative_rectangle.unwrap().upper, (2.0, 2.0));
    }

    #[test]
    fn s1_test_needs_positive_m() {
        let g = unit(21);
        let mut p = constant_params(1.0, 0.05, 0.05, 0.5, 0.5);
        p.m = CoefficientSpec::cosine(0.1, 1.0, 1.0);
        assert!(matches!(classify_regime(&p, &g), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn vanishing_beta_upper_bound() {
        // with beta = 0 the u-face only needs B1 > m_max - alpha_min
        let g = unit(21);
        let mut p = constant_params(1.0, 0.3, 0.3, 1.0, 1.0);
        p.beta = CoefficientSpec::Samples {
            values: (0..21).map(|i| if i == 10 { 0.2 } else { 0.0 }).collect(),
        };
        let r = invariant_rectangle(&p, &g).unwrap();
        assert!(r.upper.0 >= 1.0 - 0.3);
        assert!(bounds_repel(&p.fields(&g).unwrap(), 1.0, 1.0, r.upper.0, r.upper.1));
    }

    #[test]
    fn hypothesis_h_checks() {
        let g = unit(101);
        let s = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0));
        assert!(check_hypothesis_h(&s, &g).is_ok());
        let flat = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::constant(0.4));
        assert!(matches!(check_hypothesis_h(&flat, &g), Err(Error::Hypothesis(_))));
        let big = ModelParams::switching(0.1, 1.0, 0.2, 0.2, CoefficientSpec::cosine(0.4, 0.3, 1.0));
        assert!(matches!(check_hypothesis_h(&big, &g), Err(Error::Hypothesis(_))));
        let neg = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(-0.1, 0.3, 1.0));
        assert!(matches!(check_hypothesis_h(&neg, &g), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn invalid_params_rejected() {
        let g = unit(11);
        let mut p = constant_params(1.0, 0.3, 0.3, 1.0, 1.0);
        p.d2 = 0.05;
        assert!(matches!(p.fields(&g), Err(Error::Config(_))));
        let mut p = constant_params(1.0, 0.3, 0.3, 1.0, 1.0);
        p.alpha = CoefficientSpec::constant(0.0);
        assert!(matches!(p.fields(&g), Err(Error::Config(_))));
    }
}
