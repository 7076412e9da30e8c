//! Sampling families of copulas with asymmetry `m` whose measure values run
//! from `g(m)` to `h(m)`, showing that the whole range is attained.
//!
//! For `ρ` and `τ` both extremes are attained at `U`, so mixtures
//! `t·lower^U + (1 − t)·upper^U` suffice. For `φ`, `γ` and `β` the minimum
//! sits at `T` and the maximum needs `R`; the family first mixes the bounds
//! at `T`, then moves the upper bound from `T` to `R` along the edge `a = m`.
//! Every member has asymmetry exactly `m`.

use rayon::prelude::*;

use crate::asymmetry::{mu_infinity, AsymmetryResult};
use crate::bounds::BoundParams;
use crate::concordance::{measure, ConcordanceValue, EvalMode, MeasureKind};
use crate::copula::Copula;
use crate::regions::curves::range_of;
use crate::regions::triangle::{TriangleDomain, Vertex};
use crate::{Error, Result};

/// Grid order for the `μ∞` of each sample.
pub const SWEEP_MU_GRID: usize = 512;

/// Checkerboard order of the oracle value of each sample.
pub const SWEEP_ORACLE_GRID: usize = 256;

/// Slack on range membership and endpoint matches of exact values.
pub const SWEEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    /// `t·lower + (1 − t)·upper` at a fixed point.
    Mixture(Vertex),
    /// `upper^{(m, b)}_m` with `b` moving from `1 − m` to `2m`.
    EdgeTR,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSample {
    pub leg: Leg,
    /// Mixture weight or position along the edge, in `[0, 1]`.
    pub s: f64,
    /// Exact value (closed form or segment quadrature).
    pub kappa: ConcordanceValue,
    /// Checkerboard oracle value.
    pub oracle: ConcordanceValue,
    pub mu: AsymmetryResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: MeasureKind,
    pub m: f64,
    pub steps: usize,
    pub range: (f64, f64),
    pub samples: Vec<SweepSample>,
}

impl SweepResult {
    /// Every exact sample value lies in `[g(m), h(m)]`.
    pub fn inside_range(&self) -> bool {
        let (g, h) = self.range;
        self.samples
            .iter()
            .all(|s| s.kappa.value >= g - SWEEP_TOL && s.kappa.value <= h + SWEEP_TOL)
    }

    /// Largest distance of a sample's `μ∞` from `m`.
    pub fn max_mu_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.mu.value - self.m).abs())
            .fold(0.0, f64::max)
    }

    /// Largest excess of `|exact − oracle|` over the oracle's error bound.
    pub fn oracle_excess(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.kappa.value - s.oracle.value).abs() - s.oracle.error_bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest gap between consecutive sorted sample values, including the
    /// distances to both ends of the range.
    pub fn max_gap(&self) -> f64 {
        let (g, h) = self.range;
        let mut values: Vec<f64> = self.samples.iter().map(|s| s.kappa.value).collect();
        values.sort_by(f64::total_cmp);
        let mut gap = (values[0] - g)
            .abs()
            .max((h - values[values.len() - 1]).abs());
        for pair in values.windows(2) {
            gap = gap.max(pair[1] - pair[0]);
        }
        gap
    }

    /// Gap allowance `2 (h − g) / steps`.
    pub fn gap_allowance(&self) -> f64 {
        2.0 * (self.range.1 - self.range.0) / self.steps as f64
    }

    /// Exact values at the two extremes of the family.
    pub fn endpoints(&self) -> (f64, f64) {
        let values = self.samples.iter().map(|s| s.kappa.value);
        (
            values.clone().fold(f64::INFINITY, f64::min),
            values.fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Oracle values at the samples attaining the exact extremes.
    pub fn oracle_endpoints(&self) -> (ConcordanceValue, ConcordanceValue) {
        let by = |better: fn(f64, f64) -> bool| {
            self.samples
                .iter()
                .reduce(|x, y| {
                    if better(y.kappa.value, x.kappa.value) {
                        y
                    } else {
                        x
                    }
                })
                .expect("sweep has samples")
                .oracle
        };
        (by(|a, b| a < b), by(|a, b| a > b))
    }

    pub fn passed(&self) -> bool {
        let (g, h) = self.range;
        let (lo, hi) = self.endpoints();
        self.inside_range()
            && self.max_mu_error() <= 2.0 / SWEEP_MU_GRID as f64
            && self.oracle_excess() <= 0.0
            && self.max_gap() <= self.gap_allowance() + SWEEP_TOL
            && (lo - g).abs() <= SWEEP_TOL
            && (hi - h).abs() <= SWEEP_TOL
    }
}

/// The measure in closed form when available, otherwise by quadrature.
fn exact_measure(kind: MeasureKind, c: &Copula) -> Result<ConcordanceValue> {
    match measure(kind, c, EvalMode::ClosedForm) {
        Err(Error::UnsupportedMode { .. }) => measure(kind, c, EvalMode::SegmentQuadrature),
        other => other,
    }
}

fn family(kind: MeasureKind, m: f64, steps: usize) -> Result<Vec<(Leg, f64, Copula)>> {
    let domain = TriangleDomain::new(m)?;
    let uses_u = m == 0.0 || matches!(kind, MeasureKind::Rho | MeasureKind::Tau);
    let anchor = if uses_u { Vertex::U } else { Vertex::T };
    let p = domain.vertex(anchor);
    let params = BoundParams::new(p.a, p.b, m)?;
    let (lower, upper) = (Copula::lower(params), Copula::upper(params));

    let mut members = Vec::with_capacity(2 * steps + 2);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        members.push((Leg::Mixture(anchor), t, Copula::convex(t, &lower, &upper)?));
    }
    if !uses_u {
        let (b0, b1) = (1.0 - m, 2.0 * m);
        for k in 1..=steps {
            let s = k as f64 / steps as f64;
            let b = if k == steps { b1 } else { b0 + s * (b1 - b0) };
            members.push((Leg::EdgeTR, s, Copula::upper(BoundParams::new(m, b, m)?)));
        }
    }
    Ok(members)
}

/// Samples the family for `kind` at asymmetry `m` with `steps` steps per
/// leg, evaluating each member exactly, by the checkerboard oracle, and its
/// asymmetry `μ∞`.
pub fn attainability_sweep(kind: MeasureKind, m: f64, steps: usize) -> Result<SweepResult> {
    if steps < 2 {
        return Err(Error::GridTooSmall { n: steps, min: 2 });
    }
    let range = range_of(kind, m)?;
    let m = TriangleDomain::new(m)?.m();
    let samples = family(kind, m, steps)?
        .into_par_iter()
        .map(|(leg, s, c)| -> Result<SweepSample> {
            Ok(SweepSample {
                leg,
                s,
                kappa: exact_measure(kind, &c)?,
                oracle: measure(kind, &c, EvalMode::Checkerboard(SWEEP_ORACLE_GRID))?,
                mu: mu_infinity(&c, SWEEP_MU_GRID)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        kind,
        m,
        steps,
        range,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_quarter() {
        let r = attainability_sweep(MeasureKind::Tau, 0.25, 10).unwrap();
        assert!(
            r.passed(),
            "{:?}",
            (r.endpoints(), r.max_gap(), r.max_mu_error())
        );
        let (lo, hi) = r.endpoints();
        assert!((lo + 0.75).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rho_symmetric_case_spans_everything() {
        let r = attainability_sweep(MeasureKind::Rho, 0.0, 10).unwrap();
        assert!(r.passed());
        assert_eq!(r.range, (-1.0, 1.0));
    }

    #[test]
    fn gamma_two_legs() {
        let r = attainability_sweep(MeasureKind::Gamma, 0.1, 8).unwrap();
        assert!(
            r.passed(),
            "{:?}",
            (r.endpoints(), r.max_gap(), r.oracle_excess())
        );
        assert!(r.samples.iter().any(|s| s.leg == Leg::EdgeTR));
    }
}
