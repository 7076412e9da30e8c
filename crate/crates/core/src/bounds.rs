//! Local Fréchet–Hoeffding bounds: the smallest and largest copulas whose
//! asymmetry `C(a, b) − C(b, a)` at a fixed point equals `c`, their singular
//! supports and the relations between them.

use std::io;

use crate::asymmetry::{asymmetry_at, d_star};
use crate::copula::{grid_nodes, m, w, Copula, CopulaKind, UnitPoint};
use crate::{Error, Result};

/// Tolerance on `c` above the admissibility limit that is treated as round-off.
pub const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// Pointwise tolerance used by [`check_ordering`].
pub const ORDERING_TOL: f64 = 1e-12;

/// Tolerance on the asymmetry precondition of [`check_ordering`].
pub const ASYMMETRY_TOL: f64 = 1e-9;

/// Pointwise tolerance of the copula identities in [`verify_relations`].
pub const RELATION_TOL: f64 = 1e-13;

/// Which of the two local bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    Lower,
    Upper,
}

/// Parameters `(a, b, c)` of a local bound together with the derived levels
/// `d1 = W(a, b) + c` and `d2 = M(a, b) − c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    a: f64,
    b: f64,
    c: f64,
    d1: f64,
    d2: f64,
    attains_eq3: bool,
}

impl BoundParams {
    /// Builds admissible parameters: `a, b ∈ (0, 1)` and
    /// `0 ≤ c ≤ min{a, b, 1 − a, 1 − b}`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, x) in [("a", a), ("b", b)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::Inadmissible(format!(
                    "{name} = {x} must lie strictly between 0 and 1"
                )));
            }
        }
        if c.is_nan() || c < 0.0 {
            return Err(Error::Inadmissible(format!("c = {c} must be non-negative")));
        }
        let limit = a.min(b).min(1.0 - a).min(1.0 - b);
        if c > limit + ADMISSIBILITY_SLACK {
            return Err(Error::Inadmissible(format!(
                "c = {c} exceeds min{{a, b, 1-a, 1-b}} = {limit}"
            )));
        }
        let c = c.min(limit);
        let attains_eq3 = c <= d_star(UnitPoint { u: a, v: b }) + ADMISSIBILITY_SLACK;
        Ok(Self {
            a,
            b,
            c,
            d1: w(a, b) + c,
            d2: m(a, b) - c,
            attains_eq3,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    /// Whether `c ≤ d*(a, b)`, i.e. the bounds really have asymmetry `c` at
    /// `(a, b)`. Above that level they are still copulas but the prescribed
    /// asymmetry is not reached.
    pub fn attains_eq3(&self) -> bool {
        self.attains_eq3
    }

    /// Same `c` at the point `(b, a)`.
    pub fn swapped(&self) -> Result<Self> {
        Self::new(self.b, self.a, self.c)
    }

    /// `max{W, min{d1, u − a + d1, v − b + d1, u + v − a − b + d1}}`.
    pub fn lower_value(&self, u: f64, v: f64) -> f64 {
        let d1 = self.d1;
        let inner = d1
            .min(u - self.a + d1)
            .min(v - self.b + d1)
            .min(u + v - self.a - self.b + d1);
        w(u, v).max(inner)
    }

    /// `min{M, max{d2, u − b + d2, v − a + d2, u + v − a − b + d2}}`.
    pub fn upper_value(&self, u: f64, v: f64) -> f64 {
        let d2 = self.d2;
        let inner = d2
            .max(u - self.b + d2)
            .max(v - self.a + d2)
            .max(u + v - self.a - self.b + d2);
        m(u, v).min(inner)
    }

    pub fn value(&self, which: Which, u: f64, v: f64) -> f64 {
        match which {
            Which::Lower => self.lower_value(u, v),
            Which::Upper => self.upper_value(u, v),
        }
    }
}

/// The lower local bound copula.
pub fn lower_bound(params: BoundParams) -> Copula {
    Copula::lower(params)
}

/// The upper local bound copula.
pub fn upper_bound(params: BoundParams) -> Copula {
    Copula::upper(params)
}

pub fn bound(params: BoundParams, which: Which) -> Copula {
    match which {
        Which::Lower => Copula::lower(params),
        Which::Upper => Copula::upper(params),
    }
}

/// A piece of a singular support: the graph of `u ↦ alpha + beta·u` over
/// `[u_start, u_end]`, carrying mass `u_end − u_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub u_start: f64,
    pub u_end: f64,
    pub alpha: f64,
    /// Slope, `+1` or `−1`.
    pub beta: f64,
}

impl Segment {
    pub fn map(&self, u: f64) -> f64 {
        self.alpha + self.beta * u
    }

    pub fn mass(&self) -> f64 {
        self.u_end - self.u_start
    }

    /// Length of `{s ∈ [u_start, min(u_end, u)] : map(s) ≤ v}`.
    fn mass_below(&self, u: f64, v: f64) -> f64 {
        let hi = self.u_end.min(u);
        let (lo, hi) = if self.beta > 0.0 {
            (self.u_start, hi.min(v - self.alpha))
        } else {
            (self.u_start.max(self.alpha - v), hi)
        };
        (hi - lo).max(0.0)
    }

    fn transpose(&self) -> Self {
        let (y0, y1) = (self.map(self.u_start), self.map(self.u_end));
        Self {
            u_start: y0.min(y1),
            u_end: y0.max(y1),
            alpha: -self.alpha * self.beta,
            beta: self.beta,
        }
    }

    fn sigma1(&self) -> Self {
        Self {
            u_start: 1.0 - self.u_end,
            u_end: 1.0 - self.u_start,
            alpha: self.alpha + self.beta,
            beta: -self.beta,
        }
    }

    fn sigma2(&self) -> Self {
        Self {
            u_start: self.u_start,
            u_end: self.u_end,
            alpha: 1.0 - self.alpha,
            beta: -self.beta,
        }
    }
}

/// Support of a copula whose mass lies on finitely many segments of slope ±1,
/// ordered by `u_start`. Zero-length segments are kept so that the segment
/// count of a family does not depend on its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSupport {
    pub segments: Vec<Segment>,
}

impl SegmentSupport {
    pub fn total_mass(&self) -> f64 {
        self.segments.iter().map(Segment::mass).sum()
    }

    /// Breakpoints `u_start` of every segment followed by the final `u_end`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut points: Vec<f64> = self.segments.iter().map(|s| s.u_start).collect();
        if let Some(last) = self.segments.last() {
            points.push(last.u_end);
        }
        points
    }

    /// Mass in `[0, u] × [0, v]`, i.e. the copula induced by the support.
    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        self.segments.iter().map(|s| s.mass_below(u, v)).sum()
    }

    fn mapped(&self, f: impl Fn(&Segment) -> Segment) -> Self {
        let mut segments: Vec<Segment> = self.segments.iter().map(f).collect();
        segments.sort_by(|x, y| x.u_start.total_cmp(&y.u_start));
        Self { segments }
    }

    /// Support of the transposed copula.
    pub fn transpose(&self) -> Self {
        self.mapped(Segment::transpose)
    }

    /// Support of `C^σ1`.
    pub fn sigma1(&self) -> Self {
        self.mapped(Segment::sigma1)
    }

    /// Support of `C^σ2`.
    pub fn sigma2(&self) -> Self {
        self.mapped(Segment::sigma2)
    }

    pub fn survival(&self) -> Self {
        self.sigma1().sigma2()
    }

    /// Support of the copula if every building block is singular on
    /// segments; `None` for `Π`, checkerboards and mixtures.
    pub fn of_copula(c: &Copula) -> Option<Self> {
        Some(match c.kind() {
            CopulaKind::W => Self::single(1.0, -1.0),
            CopulaKind::M => Self::single(0.0, 1.0),
            CopulaKind::Lower(p) => support_of(*p, Which::Lower),
            CopulaKind::Upper(p) => support_of(*p, Which::Upper),
            CopulaKind::Transpose(inner) => Self::of_copula(inner)?.transpose(),
            CopulaKind::Sigma1(inner) => Self::of_copula(inner)?.sigma1(),
            CopulaKind::Sigma2(inner) => Self::of_copula(inner)?.sigma2(),
            CopulaKind::Survival(inner) => Self::of_copula(inner)?.survival(),
            CopulaKind::Pi | CopulaKind::Convex { .. } | CopulaKind::Checkerboard(_) => {
                return None
            }
        })
    }

    fn single(alpha: f64, beta: f64) -> Self {
        Self {
            segments: vec![Segment {
                u_start: 0.0,
                u_end: 1.0,
                alpha,
                beta,
            }],
        }
    }

    /// Writes `u_start,u_end,alpha,beta` rows after a header line.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["u_start", "u_end", "alpha", "beta"])?;
        for s in &self.segments {
            writer
                .write_record([s.u_start, s.u_end, s.alpha, s.beta].map(|x| format!("{x:.16e}")))?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// The four-segment support of a local bound.
pub fn support_of(params: BoundParams, which: Which) -> SegmentSupport {
    let BoundParams { a, b, d1, d2, .. } = params;
    let seg = |u_start, u_end, alpha, beta| Segment {
        u_start,
        u_end,
        alpha,
        beta,
    };
    let segments = match which {
        Which::Lower => vec![
            seg(0.0, a - d1, 1.0, -1.0),
            seg(a - d1, a, a + b - d1, -1.0),
            seg(a, 1.0 - b + d1, 1.0 + d1, -1.0),
            seg(1.0 - b + d1, 1.0, 1.0, -1.0),
        ],
        Which::Upper => vec![
            seg(0.0, d2, 0.0, 1.0),
            seg(d2, b, a - d2, 1.0),
            seg(b, a + b - d2, d2 - b, 1.0),
            seg(a + b - d2, 1.0, 0.0, 1.0),
        ],
    };
    SegmentSupport { segments }
}

/// Why the asymmetry precondition of [`check_ordering`] failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precondition {
    Satisfied,
    /// `c > d*(a, b)`: no copula has asymmetry `c` at `(a, b)`.
    NotAttainable,
    /// The candidate's asymmetry at `(a, b)` differs from `c`.
    AsymmetryMismatch {
        found: f64,
    },
}

/// Outcome of [`check_ordering`]. The raw pointwise comparison is always
/// carried out, so it is reported even when the precondition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingReport {
    pub precondition: Precondition,
    /// Largest amount by which `lower − C` or `C − upper` is positive.
    pub max_violation: f64,
    pub ordering_holds: bool,
}

impl OrderingReport {
    pub fn passed(&self) -> bool {
        self.precondition == Precondition::Satisfied && self.ordering_holds
    }
}

/// Checks `lower ≤ C ≤ upper` on the `n × n` grid for a copula that has
/// asymmetry `c` at `(a, b)`.
pub fn check_ordering(c: &Copula, params: BoundParams, n: usize) -> Result<OrderingReport> {
    if n < 2 {
        return Err(Error::GridTooSmall { n, min: 2 });
    }
    let precondition = if !params.attains_eq3() {
        Precondition::NotAttainable
    } else {
        let found = asymmetry_at(c, params.a(), params.b());
        if (found - params.c()).abs() <= ASYMMETRY_TOL {
            Precondition::Satisfied
        } else {
            Precondition::AsymmetryMismatch { found }
        }
    };
    let xs = grid_nodes(n);
    let mut max_violation: f64 = 0.0;
    for &u in &xs {
        for &v in &xs {
            let value = c.eval(u, v);
            max_violation = max_violation
                .max(params.lower_value(u, v) - value)
                .max(value - params.upper_value(u, v));
        }
    }
    Ok(OrderingReport {
        precondition,
        max_violation,
        ordering_holds: max_violation <= ORDERING_TOL,
    })
}

/// One identity checked by [`verify_relations`].
#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub name: &'static str,
    pub max_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn max_grid_error(x: &Copula, y: &Copula, xs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &u in xs {
        for &v in xs {
            worst = worst.max((x.eval(u, v) - y.eval(u, v)).abs());
        }
    }
    worst
}

/// Checks the transpose and reflection identities linking the bounds at
/// `(a, b)`, `(b, a)`, `(1 − b, a)` and `(b, 1 − a)`, plus the matching
/// scalar relation between `d2` and `d1`.
///
/// The reflection identities are
/// `upper(a, b) = σ1(lower(1 − b, a)) = σ2(lower(b, 1 − a))`.
pub fn verify_relations(params: BoundParams, n: usize) -> Result<RelationReport> {
    if n < 2 {
        return Err(Error::GridTooSmall { n, min: 2 });
    }
    let (a, b, c) = (params.a(), params.b(), params.c());
    let swapped = BoundParams::new(b, a, c)?;
    let left = BoundParams::new(1.0 - b, a, c)?;
    let right = BoundParams::new(b, 1.0 - a, c)?;
    let xs = grid_nodes(n);
    let upper = Copula::upper(params);

    let grid_check = |name, x: &Copula, y: &Copula| {
        let max_error = max_grid_error(x, y, &xs);
        RelationCheck {
            name,
            max_error,
            passed: max_error <= RELATION_TOL,
        }
    };
    let d_error = (params.d2() - (a - left.d1()))
        .abs()
        .max((params.d2() - (b - right.d1())).abs());

    Ok(RelationReport {
        checks: vec![
            grid_check(
                "upper-transpose",
                &upper,
                &Copula::upper(swapped).transpose(),
            ),
            grid_check(
                "lower-transpose",
                &Copula::lower(params),
                &Copula::lower(swapped).transpose(),
            ),
            grid_check("upper-sigma1", &upper, &Copula::lower(left).sigma1()),
            grid_check("upper-sigma2", &upper, &Copula::lower(right).sigma2()),
            RelationCheck {
                name: "d2-d1",
                max_error: d_error,
                passed: d_error <= 4.0 * f64::EPSILON,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::validate_copula;
    use approx::assert_abs_diff_eq;

    fn p046() -> BoundParams {
        BoundParams::new(0.4, 0.6, 0.1).unwrap()
    }

    #[test]
    fn derived_levels() {
        let p = p046();
        assert_abs_diff_eq!(p.d1(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(p.d2(), 0.3, epsilon = 1e-15);
        assert!(p.attains_eq3());
        // c = 0.25 is admissible at (0.3, 0.5) but exceeds |b − a| = 0.2
        let q = BoundParams::new(0.3, 0.5, 0.25).unwrap();
        assert!(!q.attains_eq3());
    }

    #[test]
    fn rejects_inadmissible() {
        assert!(BoundParams::new(0.4, 0.6, 0.5).is_err());
        assert!(BoundParams::new(0.0, 0.6, 0.0).is_err());
        assert!(BoundParams::new(0.4, 1.0, 0.0).is_err());
        assert!(BoundParams::new(0.4, 0.6, -0.01).is_err());
        assert!(BoundParams::new(f64::NAN, 0.6, 0.1).is_err());
        // round-off above the limit is clamped
        let p = BoundParams::new(0.2, 0.8, 0.2 + 1e-14).unwrap();
        assert_eq!(p.c(), 0.2_f64.min(1.0 - 0.8));
    }

    #[test]
    fn lower_examples() {
        let p = p046();
        assert_abs_diff_eq!(p.lower_value(0.4, 0.6), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(p.lower_value(0.6, 0.4), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.lower_value(0.5, 0.55), 0.05, epsilon = 1e-15);
        let zero = BoundParams::new(0.3, 0.5, 0.0).unwrap();
        for &u in &grid_nodes(51) {
            for &v in &grid_nodes(51) {
                assert_abs_diff_eq!(zero.lower_value(u, v), w(u, v), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn upper_examples() {
        let p = p046();
        assert_abs_diff_eq!(p.upper_value(0.4, 0.6), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p.upper_value(0.6, 0.4), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p.upper_value(0.5, 0.5), 0.4, epsilon = 1e-15);
        let zero = BoundParams::new(0.45, 0.45, 0.0).unwrap();
        for &u in &grid_nodes(51) {
            for &v in &grid_nodes(51) {
                assert_abs_diff_eq!(zero.upper_value(u, v), m(u, v), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bounds_are_copulas() {
        let p = p046();
        assert!(validate_copula(&lower_bound(p), 201).unwrap().passed());
        assert!(validate_copula(&upper_bound(p), 201).unwrap().passed());
    }

    #[test]
    fn support_breakpoints() {
        let p = p046();
        let lower = support_of(p, Which::Lower);
        let upper = support_of(p, Which::Upper);
        for (got, want) in lower.breakpoints().iter().zip([0.0, 0.3, 0.4, 0.5, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        for (got, want) in upper.breakpoints().iter().zip([0.0, 0.3, 0.6, 0.7, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(lower.total_mass(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(upper.total_mass(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn support_reproduces_evaluator() {
        let p = p046();
        for which in [Which::Lower, Which::Upper] {
            let s = support_of(p, which);
            for &u in &grid_nodes(61) {
                for &v in &grid_nodes(61) {
                    assert_abs_diff_eq!(s.cdf(u, v), p.value(which, u, v), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn transformed_supports_reproduce_evaluators() {
        let base = Copula::lower(BoundParams::new(0.25, 0.7, 0.2).unwrap());
        for c in [
            base.transpose(),
            base.sigma1(),
            base.sigma2(),
            base.survival(),
            base.sigma1().transpose(),
            Copula::w().transpose(),
            Copula::m().sigma2(),
        ] {
            let s = SegmentSupport::of_copula(&c).unwrap();
            assert_abs_diff_eq!(s.total_mass(), 1.0, epsilon = 1e-14);
            for &u in &grid_nodes(41) {
                for &v in &grid_nodes(41) {
                    assert_abs_diff_eq!(s.cdf(u, v), c.eval(u, v), epsilon = 1e-12);
                }
            }
        }
        assert!(SegmentSupport::of_copula(&Copula::pi()).is_none());
    }

    #[test]
    fn ordering_example_with_pi() {
        let report = check_ordering(&Copula::pi(), p046(), 201).unwrap();
        assert!(report.ordering_holds);
        assert!(matches!(
            report.precondition,
            Precondition::AsymmetryMismatch { found } if found == 0.0
        ));
        assert!(!report.passed());
        let report = check_ordering(&Copula::m(), p046(), 51).unwrap();
        assert!(matches!(
            report.precondition,
            Precondition::AsymmetryMismatch { .. }
        ));
    }

    #[test]
    fn ordering_of_mixtures() {
        let p = p046();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mix = Copula::convex(t, &lower_bound(p), &upper_bound(p)).unwrap();
            assert!(check_ordering(&mix, p, 201).unwrap().passed(), "t = {t}");
        }
    }

    #[test]
    fn relations_hold() {
        for (a, b, c) in [
            (0.4, 0.6, 0.1),
            (0.3, 0.5, 0.2),
            (0.35, 0.35, 0.1),
            (0.7, 0.2, 0.15),
        ] {
            let report = verify_relations(BoundParams::new(a, b, c).unwrap(), 101).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn d_relation_arithmetic() {
        let p = BoundParams::new(0.3, 0.5, 0.2).unwrap();
        let left = BoundParams::new(0.5, 0.3, 0.2).unwrap();
        assert_abs_diff_eq!(p.d2(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(0.3 - left.d1(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_point_upper_is_symmetric() {
        let p = BoundParams::new(0.35, 0.35, 0.0).unwrap();
        let up = upper_bound(p);
        assert!(max_grid_error(&up, &up.transpose(), &grid_nodes(51)) < 1e-15);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        support_of(p046(), Which::Upper)
            .write_csv(&mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "u_start,u_end,alpha,beta");
        assert_eq!(lines.len(), 5);
    }
}
