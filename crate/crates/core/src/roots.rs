//! Sign-change scanning and bisection on scalar eigenvalue curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scalar function of one parameter, typically a principal eigenvalue.
pub trait Curve {
    fn eval(&self, p: f64) -> Result<f64>;
}

impl<F> Curve for F
where
    F: Fn(f64) -> Result<f64>,
{
    fn eval(&self, p: f64) -> Result<f64> {
        self(p)
    }
}

/// Named thresholds located by root finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdName {
    /// Root of the scalar curve `mu -> lambda(1, mu m)`; `lambda(d, m)` changes sign at `d = 1/mu_star`.
    MuStar,
    /// Root of the coupled curve `mu -> lambda(mu)` with `mu` multiplying `m`.
    MuZero,
    /// Diffusion rate `d3` at which `(u*, v*, 0)` changes stability.
    DC,
    /// Diffusion rate `d3` at which `(0, 0, w*)` changes stability.
    #[serde(alias = "d_0")]
    D0,
    /// Switching rate `beta` at which `(0, 0, w*)` changes stability.
    BetaC,
    /// Switching rate `alpha` at which `(0, 0, w*)` changes stability.
    AlphaC,
}

impl ThresholdName {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdName::MuStar => "mu_star",
            ThresholdName::MuZero => "mu_zero",
            ThresholdName::DC => "d_c",
            ThresholdName::D0 => "d_0",
            ThresholdName::BetaC => "beta_c",
            ThresholdName::AlphaC => "alpha_c",
        }
    }
}

impl std::str::FromStr for ThresholdName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mu_star" => ThresholdName::MuStar,
            "mu_zero" => ThresholdName::MuZero,
            "d_c" => ThresholdName::DC,
            "d_0" => ThresholdName::D0,
            "beta_c" => ThresholdName::BetaC,
            "alpha_c" => ThresholdName::AlphaC,
            other => return Err(Error::Config(format!("unknown threshold {other:?}"))),
        })
    }
}

/// A located root with the bracket it was refined in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub name: ThresholdName,
    pub bracket: (f64, f64),
    pub root: f64,
    /// `|f(root)|`
    pub residual: f64,
    pub sign_left: i8,
    pub sign_right: i8,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on `[lo, hi]` given the endpoint values. Stops when `|f| <= ftol` or the
/// interval can no longer be split.
pub fn bisect<C: Curve + ?Sized>(
    curve: &C,
    name: ThresholdName,
    (mut lo, mut hi): (f64, f64),
    (mut f_lo, f_hi): (f64, f64),
    ftol: f64,
) -> Result<ThresholdResult> {
    let bracket = (lo, hi);
    if sign(f_lo) * sign(f_hi) > 0 {
        return Err(Error::NoSignChange {
            name: name.as_str().into(),
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    let (sign_left, sign_right) = (sign(f_lo), sign(f_hi));
    if f_lo == 0.0 {
        return Ok(ThresholdResult { name, bracket, root: lo, residual: 0.0, sign_left, sign_right });
    }
    if f_hi == 0.0 {
        return Ok(ThresholdResult { name, bracket, root: hi, residual: 0.0, sign_left, sign_right });
    }
    let mut best = (f64::INFINITY, 0.5 * (lo + hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = curve.eval(mid)?;
        if f_mid.abs() < best.0 {
            best = (f_mid.abs(), mid);
        }
        if f_mid.abs() <= ftol {
            break;
        }
        if sign(f_mid) == sign(f_lo) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        name,
        bracket,
        root: best.1,
        residual: best.0,
        sign_left,
        sign_right,
    })
}

/// `points` log-spaced values covering `[lo, hi]`, endpoints included.
pub fn log_lattice(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[points - 1] = hi;
    out
}

/// Curve values on a lattice; handy for plotting and sign-change counts.
pub fn sample_curve<C: Curve + Sync + ?Sized>(curve: &C, lattice: &[f64]) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    lattice.par_iter().map(|&p| curve.eval(p)).collect()
}

/// Number of strict sign changes between consecutive samples.
pub fn count_sign_changes(values: &[f64]) -> usize {
    values
        .windows(2)
        .filter(|w| sign(w[0]) * sign(w[1]) < 0 || (sign(w[0]) != 0 && sign(w[1]) == 0))
        .count()
}

/// Scans a log-spaced lattice over `[lo, hi]`, then bisects every sign change.
pub fn scan_roots<C: Curve + Sync + ?Sized>(
    curve: &C,
    name: ThresholdName,
    (lo, hi): (f64, f64),
    points: usize,
    max_roots: usize,
    ftol: f64,
) -> Result<Vec<ThresholdResult>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!("scan bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let lattice = log_lattice(lo, hi, points.max(2));
    let values = sample_curve(curve, &lattice)?;
    let mut roots = Vec::new();
    for i in 0..lattice.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if sign(fa) * sign(fb) < 0 || (fb == 0.0 && fa != 0.0) {
            if roots.len() == max_roots {
                return Err(Error::TooManyRoots { max: max_roots, lo, hi });
            }
            roots.push(bisect(curve, name, (lattice[i], lattice[i + 1]), (fa, fb), ftol)?);
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let f = |x: f64| -> Result<f64> { Ok(x * x - 2.0) };
        let r = bisect(&f, ThresholdName::MuStar, (1.0, 2.0), (-1.0, 2.0), 1e-12).unwrap();
        assert!((r.root - 2f64.sqrt()).abs() < 1e-11);
        assert_eq!((r.sign_left, r.sign_right), (-1, 1));
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn scan_reports_every_root() {
        let f = |x: f64| -> Result<f64> { Ok((x - 0.5) * (x - 3.0) * (x - 20.0)) };
        let roots = scan_roots(&f, ThresholdName::MuZero, (0.1, 100.0), 64, 5, 1e-10).unwrap();
        let got: Vec<f64> = roots.iter().map(|r| r.root).collect();
        assert_eq!(got.len(), 3);
        for (g, e) in got.iter().zip([0.5, 3.0, 20.0]) {
            assert!((g - e).abs() < 1e-9, "{g} vs {e}");
        }
        assert!(matches!(
            scan_roots(&f, ThresholdName::MuZero, (0.1, 100.0), 64, 2, 1e-10),
            Err(Error::TooManyRoots { max: 2, .. })
        ));
    }

    #[test]
    fn no_sign_change_is_empty() {
        let f = |x: f64| -> Result<f64> { Ok(1.0 + x) };
        let roots = scan_roots(&f, ThresholdName::MuStar, (0.01, 10.0), 16, 3, 1e-9).unwrap();
        assert!(roots.is_empty());
        assert!(bisect(&f, ThresholdName::MuStar, (1.0, 2.0), (2.0, 3.0), 1e-9).is_err());
    }

    #[test]
    fn lattice_is_log_spaced() {
        let l = log_lattice(0.01, 100.0, 5);
        for (g, e) in l.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((g / e - 1.0).abs() < 1e-12);
        }
        assert_eq!(count_sign_changes(&[1.0, -1.0, -2.0, 3.0]), 2);
    }
}
