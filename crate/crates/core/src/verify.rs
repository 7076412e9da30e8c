//! Seeded verification suites over the whole library. Each suite returns
//! named checks; checks with the same name are merged keeping the worst
//! error, and reports list them sorted by name.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{check_ordering, verify_relations, BoundParams, Which};
use crate::concordance::closed::{
    select_case, Case, CaseVars, Partner, LOWER_M_CASES, UPPER_W_CASES,
};
use crate::concordance::properties::{verify_prop43, verify_q_properties, PropertyCheck};
use crate::concordance::{
    q_bound_checkerboard, q_closed_lower, q_closed_upper, q_segments_bound, MeasureKind,
};
use crate::copula::{grid_nodes, validate_copula, Copula};
use crate::regions::curves::{inverse_pieces, max_asymmetry_given, range_of, RangeCurve};
use crate::regions::extremal::{declared_locations, extremal_scan, reflection_identity};
use crate::regions::kappa::{kappa_on_lower, kappa_on_upper, GAMMA_UPPER_PATH, Q_M_LOWER_TRIANGLE};
use crate::regions::triangle::{Location, TriangleDomain, Vertex};
use crate::sampling;
use crate::{Error, Result};

/// Verification suites selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Copula,
    QProps,
    Prop41,
    Prop42,
    Prop43,
    Relations,
    Regions,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Copula => "copula",
            Suite::QProps => "q-props",
            Suite::Prop41 => "prop41",
            Suite::Prop42 => "prop42",
            Suite::Prop43 => "prop43",
            Suite::Relations => "relations",
            Suite::Regions => "regions",
            Suite::All => "all",
        }
    }

    const PARTS: [Suite; 7] = [
        Suite::Copula,
        Suite::QProps,
        Suite::Prop41,
        Suite::Prop42,
        Suite::Prop43,
        Suite::Relations,
        Suite::Regions,
    ];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::PARTS
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument {
                name: "suite",
                value: s.into(),
                reason:
                    "expected copula, q-props, prop41, prop42, prop43, relations, regions or all"
                        .into(),
            })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<PropertyCheck>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::passed)
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {} (n = {}, seed = {})",
            self.suite, self.n, self.seed
        )?;
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "[{status}] {}: max error {:.3e} (tolerance {:.1e})",
                c.name, c.error, c.tolerance
            )?;
        }
        write!(f, "{} checks, {} failed", self.checks.len(), self.failed())
    }
}

/// Merges checks by name, keeping the largest error, sorted by name.
pub fn merge(checks: impl IntoIterator<Item = PropertyCheck>) -> Vec<PropertyCheck> {
    let mut map: BTreeMap<String, PropertyCheck> = BTreeMap::new();
    for c in checks {
        map.entry(c.name.clone())
            .and_modify(|e| {
                // a NaN error must not be hidden by the merge
                if c.error.is_nan() || c.error > e.error {
                    e.error = c.error;
                }
                e.tolerance = e.tolerance.min(c.tolerance);
            })
            .or_insert(c);
    }
    map.into_values().collect()
}

pub fn run_suite(suite: Suite, n: usize, seed: u64) -> Result<SuiteReport> {
    let parts: Vec<Suite> = match suite {
        Suite::All => Suite::PARTS.to_vec(),
        one => vec![one],
    };
    let mut checks = Vec::new();
    for part in parts {
        checks.extend(match part {
            Suite::Copula => copula_suite(n, seed)?,
            Suite::QProps => q_props_suite(n, seed)?,
            Suite::Prop41 => oracle_suite(Which::Lower, n, seed)?,
            Suite::Prop42 => oracle_suite(Which::Upper, n, seed)?,
            Suite::Prop43 => prop43_suite(seed)?,
            Suite::Relations => relations_suite(seed)?,
            Suite::Regions => regions_suite()?,
            Suite::All => unreachable!(),
        });
    }
    Ok(SuiteReport {
        suite,
        n,
        seed,
        checks: merge(checks),
    })
}

fn max_diff(x: &Copula, y: &Copula, points: usize) -> f64 {
    let xs = grid_nodes(points);
    let mut worst: f64 = 0.0;
    for &u in &xs {
        for &v in &xs {
            worst = worst.max((x.eval(u, v) - y.eval(u, v)).abs());
        }
    }
    worst
}

/// Copula axioms for reference copulas, bounds, their transforms and
/// mixtures; involutions; survival as a composition; checkerboard
/// convergence.
pub fn copula_suite(n: usize, seed: u64) -> Result<Vec<PropertyCheck>> {
    let grid = n.clamp(2, 201);
    let mut handles: Vec<(&'static str, Copula)> = vec![
        ("reference", Copula::w()),
        ("reference", Copula::pi()),
        ("reference", Copula::m()),
    ];
    for p in sampling::triples(10, seed) {
        let (lo, up) = (Copula::lower(p), Copula::upper(p));
        handles.push(("transforms", lo.transpose()));
        handles.push(("transforms", up.sigma1()));
        handles.push(("transforms", lo.sigma2()));
        handles.push(("transforms", up.survival()));
        handles.push(("mixtures", Copula::convex(0.3, &lo, &up)?));
        handles.push(("bounds", lo));
        handles.push(("bounds", up));
    }
    let mut checks: Vec<PropertyCheck> = handles
        .par_iter()
        .map(|(group, c)| -> Result<PropertyCheck> {
            let report = validate_copula(c, grid)?;
            Ok(PropertyCheck::new(
                format!("copula axioms {group}"),
                report.max_violation(),
                crate::copula::VALIDATION_TOL,
            ))
        })
        .collect::<Result<_>>()?;

    for p in sampling::triples(5, seed.wrapping_add(1)) {
        let c = Copula::lower(p);
        let involutions = max_diff(&c.transpose().transpose(), &c, 101)
            .max(max_diff(&c.sigma1().sigma1(), &c, 101))
            .max(max_diff(&c.sigma2().sigma2(), &c, 101));
        checks.push(PropertyCheck::new("copula involutions", involutions, 1e-14));
        let survival = max_diff(&c.survival(), &c.sigma1().sigma2(), 101).max(max_diff(
            &c.survival(),
            &c.sigma2().sigma1(),
            101,
        ));
        checks.push(PropertyCheck::new(
            "copula survival composition",
            survival,
            1e-14,
        ));
        for order in [16, 64] {
            let board = Copula::checkerboard(c.to_checkerboard(order)?);
            checks.push(PropertyCheck::new(
                format!("checkerboard convergence n={order}"),
                max_diff(&board, &c, 101),
                1.0 / order as f64,
            ));
        }
    }
    Ok(checks)
}

/// Symmetry properties of `Q` on ten seeded pairs.
pub fn q_props_suite(n: usize, seed: u64) -> Result<Vec<PropertyCheck>> {
    let pairs = q_property_pairs(seed)?;
    let reports: Vec<Vec<PropertyCheck>> = pairs
        .par_iter()
        .map(|(x, y)| Ok(verify_q_properties(x, y, n)?.checks))
        .collect::<Result<_>>()?;
    Ok(reports
        .into_iter()
        .flatten()
        .map(|mut c| {
            c.name = format!("q-props {}", c.name);
            c
        })
        .collect())
}

/// Ten seeded pairs of handles mixing bounds, transforms, mixtures and
/// reference copulas.
pub fn q_property_pairs(seed: u64) -> Result<Vec<(Copula, Copula)>> {
    let ps = sampling::triples(10, seed.wrapping_add(2));
    let references = [Copula::w(), Copula::pi(), Copula::m()];
    ps.iter()
        .enumerate()
        .map(|(k, p)| {
            let (lo, up) = (Copula::lower(*p), Copula::upper(*p));
            Ok(match k % 4 {
                0 => (lo, references[k % 3].clone()),
                1 => (up.transpose(), lo),
                2 => (
                    Copula::convex(0.4, &lo, &up)?,
                    references[(k + 1) % 3].clone(),
                ),
                _ => (lo.sigma1(), up.survival()),
            })
        })
        .collect()
}

/// Closed forms against segment quadrature (1e-8) and the checkerboard
/// oracle (`8/n`) for 30 triples covering every branch.
pub fn oracle_suite(which: Which, n: usize, seed: u64) -> Result<Vec<PropertyCheck>> {
    let label = match which {
        Which::Lower => "prop41",
        Which::Upper => "prop42",
    };
    let triples = sampling::covering_triples(30, seed);
    let checks: Vec<Vec<PropertyCheck>> = triples
        .par_iter()
        .map(|p| -> Result<Vec<PropertyCheck>> {
            let mut out = Vec::new();
            for d in [Partner::W, Partner::Pi, Partner::M, Partner::SelfCopula] {
                let closed = match which {
                    Which::Lower => q_closed_lower(d, *p),
                    Which::Upper => q_closed_upper(d, *p),
                }
                .value;
                let segments = q_segments_bound(d, *p, which).value;
                let oracle = q_bound_checkerboard(d, *p, which, n)?;
                let name = d.to_string();
                out.push(PropertyCheck::new(
                    format!("{label} Q({name}) closed vs segments"),
                    (closed - segments).abs(),
                    1e-8,
                ));
                out.push(PropertyCheck::new(
                    format!("{label} Q({name}) closed vs checkerboard"),
                    (closed - oracle.value).abs(),
                    oracle.error_bound,
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(checks.into_iter().flatten().collect())
}

/// The six identity families at ten seeded triples for each reference
/// copula.
pub fn prop43_suite(seed: u64) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();
    for p in sampling::triples(10, seed.wrapping_add(3)) {
        for d in [Partner::W, Partner::Pi, Partner::M] {
            checks.extend(verify_prop43(p, d)?.checks.into_iter().map(|mut c| {
                // merge across partners for identities that do not involve D
                c.name = format!("prop43 {}", c.name);
                c
            }));
        }
    }
    Ok(checks)
}

/// Transpose/reflection relations of the bounds and the ordering of every
/// copula with asymmetry `c` at `(a, b)` between them.
pub fn relations_suite(seed: u64) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();
    for p in sampling::triples(10, seed.wrapping_add(4)) {
        for c in verify_relations(p, 101)?.checks {
            checks.push(PropertyCheck::new(
                format!("relations {}", c.name),
                c.max_error,
                if c.name == "d2-d1" {
                    4.0 * f64::EPSILON
                } else {
                    crate::bounds::RELATION_TOL
                },
            ));
        }
    }
    for p in sampling::attaining_triples(10, seed.wrapping_add(5)) {
        checks.extend(ordering_checks(p, 101)?);
    }
    Ok(checks)
}

/// Ordering of both bounds and five mixtures between the bounds.
pub fn ordering_checks(p: BoundParams, n: usize) -> Result<Vec<PropertyCheck>> {
    let (lo, up) = (Copula::lower(p), Copula::upper(p));
    let mut out = Vec::new();
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mix = Copula::convex(t, &lo, &up)?;
        let report = check_ordering(&mix, p, n)?;
        let error = if report.passed() {
            report.max_violation
        } else {
            f64::INFINITY
        };
        out.push(PropertyCheck::new(
            "ordering between bounds",
            error,
            crate::bounds::ORDERING_TOL,
        ));
    }
    Ok(out)
}

/// Largest mismatch of adjacent branches of a piecewise table on the
/// switching points found by bisection between pairs of sampled triples.
pub fn table_continuity(
    cases: &[Case],
    vars: fn(&BoundParams) -> CaseVars,
    samples: &[BoundParams],
) -> f64 {
    let select = |p: &BoundParams| select_case(cases, vars(p));
    let lerp = |x: &BoundParams, y: &BoundParams, s: f64| {
        BoundParams::new(
            x.a() + s * (y.a() - x.a()),
            x.b() + s * (y.b() - x.b()),
            x.c() + s * (y.c() - x.c()),
        )
        .expect("admissible parameters form a convex set")
    };
    let mut worst: f64 = 0.0;
    for pair in samples.windows(2) {
        let (x, y) = (&pair[0], &pair[1]);
        let (mut lo, mut hi) = (0.0, 1.0);
        let (first, last) = (select(x), select(y));
        if first == last {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if select(&lerp(x, y, mid)) == first {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (left, right) = (lerp(x, y, lo), lerp(x, y, hi));
        let (i, j) = (select(&left), select(&right));
        let at = vars(&right);
        worst = worst.max(((cases[i].value)(at) - (cases[j].value)(at)).abs());
    }
    worst
}

/// Lower-bound variables of `Q(M, lower)`.
pub fn lower_vars(p: &BoundParams) -> CaseVars {
    CaseVars {
        a: p.a(),
        b: p.b(),
        d: p.d1(),
    }
}

/// Upper-bound variables of `Q(W, upper)`.
pub fn upper_vars(p: &BoundParams) -> CaseVars {
    CaseVars {
        a: p.a(),
        b: p.b(),
        d: p.d2(),
    }
}

/// Mismatch of adjacent branches at explicit breakpoints `b` of a table in
/// `(m, b)`; `breaks[k]` separates branch `k` from branch `k + 1`.
pub fn breakpoint_continuity(cases: &[Case], m: f64, breaks: &[f64]) -> f64 {
    breaks
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let x = CaseVars { a: 0.0, b, d: m };
            ((cases[k].value)(x) - (cases[k + 1].value)(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Mismatch of adjacent polynomial pieces of all range curves.
pub fn curve_continuity(kind: MeasureKind) -> f64 {
    let curve = RangeCurve::of(kind);
    let mut worst: f64 = 0.0;
    for pieces in [&curve.lower_pieces, &curve.upper_pieces] {
        for pair in pieces.windows(2) {
            let m = pair[0].end.value();
            worst = worst.max((pair[0].eval(m) - pair[1].eval(m)).abs());
        }
    }
    worst
}

/// Mismatch of adjacent branches of the inverse at every breakpoint.
pub fn inverse_continuity(kind: MeasureKind) -> f64 {
    inverse_pieces(kind)
        .windows(2)
        .map(|pair| {
            let x = pair[0].end.value();
            ((pair[0].value)(x) - (pair[1].value)(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Continuity of every piecewise formula.
pub fn continuity_checks(seed: u64) -> Vec<PropertyCheck> {
    let samples = sampling::triples(400, seed.wrapping_add(6));
    let mut checks = vec![
        PropertyCheck::new(
            "continuity Q(M, lower) table",
            table_continuity(&LOWER_M_CASES, lower_vars, &samples),
            1e-12,
        ),
        PropertyCheck::new(
            "continuity Q(W, upper) table",
            table_continuity(&UPPER_W_CASES, upper_vars, &samples),
            1e-12,
        ),
    ];
    for k in 1..=99 {
        let m = k as f64 / 300.0;
        checks.push(PropertyCheck::new(
            "continuity Q(M, lower) on triangle",
            breakpoint_continuity(&Q_M_LOWER_TRIANGLE, m, &[m + 0.5, 0.5 * (1.0 + m)]),
            1e-12,
        ));
        checks.push(PropertyCheck::new(
            "continuity gamma upper path",
            breakpoint_continuity(
                &GAMMA_UPPER_PATH,
                m,
                &[0.5 - m, 0.5 - 0.5 * m, 0.5, 0.5 * (1.0 + m)],
            ),
            1e-12,
        ));
    }
    for kind in MeasureKind::ALL {
        checks.push(PropertyCheck::new(
            format!("continuity range curve {kind}"),
            curve_continuity(kind),
            1e-12,
        ));
        checks.push(PropertyCheck::new(
            format!("continuity inverse {kind}"),
            inverse_continuity(kind),
            1e-12,
        ));
    }
    checks
}

/// Value of a bound measure at a declared extremal location: the vertex, or
/// both endpoints of the edge (which must agree).
pub fn value_at_location(
    kind: MeasureKind,
    m: f64,
    location: Location,
    which: Which,
) -> Result<Vec<f64>> {
    let domain = TriangleDomain::new(m)?;
    let vertices: Vec<Vertex> = match location {
        Location::Point(v) => vec![v],
        Location::Segment(x, y) => vec![x, y],
    };
    vertices
        .into_iter()
        .map(|v| {
            let p = domain.vertex(v);
            match which {
                Which::Lower => kappa_on_lower(kind, p.a, p.b, m),
                Which::Upper => kappa_on_upper(kind, p.a, p.b, m),
            }
        })
        .collect()
}

/// Largest mismatch between `range_of` and the bound measures at the
/// declared extremal locations, for `count` uniform values of `m`.
pub fn consistency_error(kind: MeasureKind, count: usize) -> Result<f64> {
    let (min_at, max_at) = declared_locations(kind);
    let mut worst: f64 = 0.0;
    for k in 1..=count {
        let m = k as f64 / (3 * count) as f64;
        let (g, h) = range_of(kind, m)?;
        for v in value_at_location(kind, m, min_at, Which::Lower)? {
            worst = worst.max((v - g).abs());
        }
        for v in value_at_location(kind, m, max_at, Which::Upper)? {
            worst = worst.max((v - h).abs());
        }
    }
    Ok(worst)
}

/// Whether a curve piece containing `m` is constant.
fn flat_at(pieces: &[crate::regions::curves::Piece], m: f64) -> bool {
    let piece = pieces
        .iter()
        .find(|p| p.end.ge(m))
        .unwrap_or(&pieces[pieces.len() - 1]);
    piece.coeffs[1..].iter().all(|c| *c == 0.0)
}

/// Largest deviation of the inverse from `m` at `g(m)` and `h(m)` on strictly
/// monotone pieces, and the largest shortfall below `m` on flat pieces.
pub fn inverse_error(kind: MeasureKind, count: usize) -> Result<(f64, f64)> {
    let curve = RangeCurve::of(kind);
    let (mut monotone, mut shortfall): (f64, f64) = (0.0, 0.0);
    for k in 0..count {
        let m = k as f64 / (3 * (count - 1)) as f64;
        for (pieces, kappa) in [
            (&curve.lower_pieces, curve.lower(m)),
            (&curve.upper_pieces, curve.upper(m)),
        ] {
            let mu = max_asymmetry_given(kind, kappa)?;
            if flat_at(pieces, m) {
                shortfall = shortfall.max(m - mu);
            } else {
                monotone = monotone.max((mu - m).abs());
            }
        }
    }
    Ok((monotone, shortfall))
}

/// Endpoints, agreement of ranges with bound measures, inverses, scans, reflection
/// identity, nesting and continuity.
pub fn regions_suite() -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();
    let third = 1.0 / 3.0;
    let endpoints = [
        (MeasureKind::Rho, (-5.0 / 9.0, -third)),
        (MeasureKind::Tau, (-5.0 / 9.0, 1.0 / 9.0)),
        (MeasureKind::Phi, (-third, -third)),
        (MeasureKind::Gamma, (-4.0 / 9.0, -third)),
        (MeasureKind::Beta, (-third, -third)),
    ];
    for (kind, (lo, hi)) in endpoints {
        let (g, h) = range_of(kind, third)?;
        checks.push(PropertyCheck::new(
            format!("regions endpoints {kind} m=1/3"),
            (g - lo).abs().max((h - hi).abs()),
            1e-14,
        ));
        let (g, h) = range_of(kind, 0.0)?;
        let (lo, hi) = kind.global_range();
        checks.push(PropertyCheck::new(
            format!("regions endpoints {kind} m=0"),
            (g - lo).abs().max((h - hi).abs()),
            1e-14,
        ));
        checks.push(PropertyCheck::new(
            format!("regions consistency {kind}"),
            consistency_error(kind, 50)?,
            1e-14,
        ));
        let (monotone, shortfall) = inverse_error(kind, 100)?;
        checks.push(PropertyCheck::new(
            format!("regions inverse {kind}"),
            monotone,
            1e-10,
        ));
        checks.push(PropertyCheck::new(
            format!("regions inverse dominates {kind}"),
            shortfall.max(0.0),
            1e-12,
        ));
        for m in [0.1, 0.2, 0.3] {
            let scan = extremal_scan(kind, m, 64)?;
            checks.push(PropertyCheck::new(
                format!("regions scan {kind}"),
                if scan.passed() { 0.0 } else { 1.0 },
                0.0,
            ));
        }
        if kind != MeasureKind::Phi {
            for m in [0.1, 0.2] {
                checks.push(PropertyCheck::new(
                    format!("regions reflection identity {kind}"),
                    reflection_identity(kind, m, 64)?.error,
                    1e-12,
                ));
            }
        }
        let mut nesting: f64 = 0.0;
        let mut previous = range_of(kind, 0.0)?;
        for k in 1..=100 {
            let current = range_of(kind, k as f64 / 300.0)?;
            nesting = nesting
                .max(previous.0 - current.0)
                .max(current.1 - previous.1);
            previous = current;
        }
        checks.push(PropertyCheck::new(
            format!("regions nesting {kind}"),
            nesting.max(0.0),
            1e-15,
        ));
    }
    let plateaus = [
        (MeasureKind::Rho, -5.0 / 9.0, -third),
        (MeasureKind::Tau, -5.0 / 9.0, 1.0 / 9.0),
        (MeasureKind::Gamma, -4.0 / 9.0, -third),
    ];
    for (kind, lo, hi) in plateaus {
        let mut worst: f64 = 0.0;
        for k in 0..=100 {
            let kappa = lo + (hi - lo) * k as f64 / 100.0;
            worst = worst.max((max_asymmetry_given(kind, kappa)? - third).abs());
        }
        checks.push(PropertyCheck::new(
            format!("regions inverse plateau {kind}"),
            worst,
            1e-15,
        ));
    }
    checks.extend(continuity_checks(0));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_worst_and_sorts() {
        let merged = merge([
            PropertyCheck::new("b", 1.0, 2.0),
            PropertyCheck::new("a", 0.5, 1.0),
            PropertyCheck::new("b", 3.0, 2.0),
        ]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].name, "a");
        assert_eq!(merged[1].error, 3.0);
        assert!(!merged[1].passed());
    }

    #[test]
    fn merge_propagates_nan() {
        let merged = merge([
            PropertyCheck::new("x", 0.0, 1.0),
            PropertyCheck::new("x", f64::NAN, 1.0),
        ]);
        assert!(!merged[0].passed());
    }

    #[test]
    fn relations_and_regions_pass() {
        assert!(run_suite(Suite::Relations, 64, 42).unwrap().passed());
        let report = run_suite(Suite::Regions, 64, 42).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::PARTS.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }
}
