//! Grid scans of the bound measures over `Δ_m` and the locations where their
//! extrema are attained.

use rayon::prelude::*;

use crate::bounds::BoundParams;
use crate::concordance::{measure, EvalMode, MeasureKind};
use crate::copula::Copula;
use crate::regions::kappa::{kappa_on_lower, kappa_on_upper};
use crate::regions::triangle::{Location, TriangleDomain, TrianglePoint, Vertex};
use crate::{Error, Result};

/// Values within this distance of the optimum count as optimal.
pub const OPTIMUM_TOL: f64 = 1e-10;

/// Smallest accepted scan order.
pub const MIN_SCAN_GRID: usize = 32;

/// Where the minimum of `κ(lower)` and the maximum of `κ(upper)` over `Δ_m`
/// are attained for every `m ∈ (0, 1/3)`.
pub fn declared_locations(kind: MeasureKind) -> (Location, Location) {
    use Location::{Point, Segment};
    use Vertex::{R, T, U};
    match kind {
        MeasureKind::Rho | MeasureKind::Tau => (Segment(U, T), Segment(R, U)),
        MeasureKind::Phi => (Point(T), Segment(R, U)),
        MeasureKind::Gamma | MeasureKind::Beta => (Point(T), Point(R)),
    }
}

/// The optimum of one bound over the grid and its comparison with the
/// declared location.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub declared: Location,
    /// Grid points whose value is within [`OPTIMUM_TOL`] of the optimum.
    pub attained_at: Vec<TrianglePoint>,
    /// Number of optimal grid points off the declared location.
    pub elsewhere: usize,
    /// The declared location attains the optimum (every grid point of a
    /// declared segment does).
    pub declared_attains: bool,
    /// Optimal points lie on the declared location, up to one grid cell.
    pub exclusive: bool,
}

impl Extremum {
    pub fn passed(&self) -> bool {
        self.declared_attains
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub kind: MeasureKind,
    pub m: f64,
    pub n: usize,
    pub min: Extremum,
    pub max: Extremum,
}

impl ScanResult {
    pub fn passed(&self) -> bool {
        self.min.passed() && self.max.passed()
    }
}

fn extremum(
    domain: &TriangleDomain,
    n: usize,
    points: &[TrianglePoint],
    values: &[f64],
    declared: Location,
    minimise: bool,
) -> Extremum {
    let sign = if minimise { 1.0 } else { -1.0 };
    let best = values
        .iter()
        .map(|v| sign * v)
        .fold(f64::INFINITY, f64::min);
    let value = sign * best;
    let is_optimal = |v: f64| (v - value).abs() <= OPTIMUM_TOL;
    let on_location = |p: TrianglePoint| domain.distance(p, declared) <= 1e-12;
    let near_location =
        |p: TrianglePoint| domain.distance(p, declared) <= domain.cell_size(n) + 1e-12;

    let attained_at: Vec<TrianglePoint> = points
        .iter()
        .zip(values)
        .filter(|(_, v)| is_optimal(**v))
        .map(|(p, _)| *p)
        .collect();
    let elsewhere = attained_at.iter().filter(|p| !on_location(**p)).count();
    let exclusive = attained_at.iter().all(|p| near_location(*p));
    let declared_attains = match declared {
        Location::Point(v) => {
            let target = domain.vertex(v);
            points
                .iter()
                .zip(values)
                .any(|(p, v)| *p == target && is_optimal(*v))
        }
        Location::Segment(..) => points
            .iter()
            .zip(values)
            .filter(|(p, _)| on_location(**p))
            .all(|(_, v)| is_optimal(*v)),
    };
    Extremum {
        value,
        declared,
        attained_at,
        elsewhere,
        declared_attains,
        exclusive,
    }
}

/// Evaluates `κ(lower)` and `κ(upper)` on the order-`n` barycentric grid of
/// `Δ_m` and locates their extrema.
pub fn extremal_scan(kind: MeasureKind, m: f64, n: usize) -> Result<ScanResult> {
    let domain = TriangleDomain::new(m)?;
    let m = domain.m();
    if m <= 0.0 || m >= 1.0 / 3.0 {
        return Err(Error::DegenerateTriangle(m));
    }
    if n < MIN_SCAN_GRID {
        return Err(Error::GridTooSmall {
            n,
            min: MIN_SCAN_GRID,
        });
    }
    let points = domain.grid(n);
    let values: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| -> Result<(f64, f64)> {
            Ok((
                kappa_on_lower(kind, p.a, p.b, m)?,
                kappa_on_upper(kind, p.a, p.b, m)?,
            ))
        })
        .collect::<Result<_>>()?;
    let (lower, upper): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
    let (declared_min, declared_max) = declared_locations(kind);
    Ok(ScanResult {
        kind,
        m,
        n,
        min: extremum(&domain, n, &points, &lower, declared_min, true),
        max: extremum(&domain, n, &points, &upper, declared_max, false),
    })
}

/// Comparison of `max_{Δ_m} κ(upper)` with `−min κ(lower)` over the image of
/// `Δ_m` under `(a, b) ↦ (1 − b, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCheck {
    pub max_upper: f64,
    pub min_reflected_lower: f64,
    pub error: f64,
}

/// Valid for measures that change sign under a reflection, i.e. all but
/// Spearman's footrule. The reflected lower bounds are evaluated with the
/// general closed forms since their parameters leave the triangle.
pub fn reflection_identity(kind: MeasureKind, m: f64, n: usize) -> Result<ReflectionCheck> {
    let domain = TriangleDomain::new(m)?;
    let points = domain.grid(n);
    let pairs: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| -> Result<(f64, f64)> {
            let upper = kappa_on_upper(kind, p.a, p.b, domain.m())?;
            let params = BoundParams::new(1.0 - p.b, p.a, domain.m())?;
            let lower = measure(kind, &Copula::lower(params), EvalMode::ClosedForm)?.value;
            Ok((upper, lower))
        })
        .collect::<Result<_>>()?;
    let max_upper = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_reflected_lower = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(ReflectionCheck {
        max_upper,
        min_reflected_lower,
        error: (max_upper + min_reflected_lower).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_segments() {
        let r = extremal_scan(MeasureKind::Rho, 0.2, 64).unwrap();
        assert!(r.passed());
        assert!(r.min.exclusive && r.max.exclusive);
        assert_eq!(r.min.declared.to_string(), "segment UT");
        assert_eq!(r.max.declared.to_string(), "segment RU");
    }

    #[test]
    fn tau_minimum_value() {
        let r = extremal_scan(MeasureKind::Tau, 0.1, 64).unwrap();
        assert!(r.passed());
        assert!((r.min.value + 0.96).abs() < 1e-14);
    }

    #[test]
    fn beta_vertices() {
        let r = extremal_scan(MeasureKind::Beta, 0.2, 64).unwrap();
        assert!(r.passed());
        // lower(1/2, 1/2) vanishes wherever b ≥ m + 1/2, not only at T
        assert!(r.min.elsewhere > 0);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(matches!(
            extremal_scan(MeasureKind::Tau, 0.0, 64),
            Err(Error::DegenerateTriangle(_))
        ));
        assert!(extremal_scan(MeasureKind::Tau, 0.2, 8).is_err());
    }

    #[test]
    fn reflection_identity_holds() {
        for kind in [
            MeasureKind::Rho,
            MeasureKind::Tau,
            MeasureKind::Gamma,
            MeasureKind::Beta,
        ] {
            for m in [0.1, 0.2] {
                let r = reflection_identity(kind, m, 48).unwrap();
                assert!(r.error < 1e-12, "{kind} m={m}: {r:?}");
            }
        }
    }
}
