//! Copula handles, the reference copulas `W`, `Π`, `M`, the dihedral
//! transforms and convex mixtures.
//!
//! A [`Copula`] is an immutable, cheaply clonable handle. Every variant has a
//! closed-form evaluator; transforms wrap their inner handle instead of
//! materialising a grid, so composition is exact.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bounds::BoundParams;
use crate::checkerboard::CheckerboardCopula;
use crate::{Error, Result};

/// Round-off band accepted (and clamped) when building a [`UnitPoint`].
pub const UNIT_CLAMP: f64 = 1e-12;

/// Maximum violation tolerated by [`validate_copula`].
pub const VALIDATION_TOL: f64 = 1e-9;

/// A point of the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    pub u: f64,
    pub v: f64,
}

impl UnitPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        let clamp = |x: f64| {
            if (-UNIT_CLAMP..=1.0 + UNIT_CLAMP).contains(&x) {
                Some(x.clamp(0.0, 1.0))
            } else {
                None
            }
        };
        match (clamp(u), clamp(v)) {
            (Some(u), Some(v)) => Ok(Self { u, v }),
            _ => Err(Error::OutsideUnitSquare { u, v }),
        }
    }

    pub fn transposed(self) -> Self {
        Self {
            u: self.v,
            v: self.u,
        }
    }
}

/// `W(u, v) = max{0, u + v − 1}`.
pub fn eval_w(p: UnitPoint) -> f64 {
    w(p.u, p.v)
}

/// `M(u, v) = min{u, v}`.
pub fn eval_m(p: UnitPoint) -> f64 {
    m(p.u, p.v)
}

/// `Π(u, v) = u·v`.
pub fn eval_pi(p: UnitPoint) -> f64 {
    p.u * p.v
}

#[inline]
pub(crate) fn w(u: f64, v: f64) -> f64 {
    (u + v - 1.0).max(0.0)
}

#[inline]
pub(crate) fn m(u: f64, v: f64) -> f64 {
    u.min(v)
}

/// What a [`Copula`] handle is made of.
#[derive(Debug)]
pub enum CopulaKind {
    W,
    Pi,
    M,
    Lower(BoundParams),
    Upper(BoundParams),
    Transpose(Copula),
    Sigma1(Copula),
    Sigma2(Copula),
    Survival(Copula),
    Convex { t: f64, left: Copula, right: Copula },
    Checkerboard(CheckerboardCopula),
}

/// A pointwise-evaluable bivariate copula.
#[derive(Clone)]
pub struct Copula(Arc<CopulaKind>);

impl Copula {
    fn wrap(kind: CopulaKind) -> Self {
        Self(Arc::new(kind))
    }

    pub fn w() -> Self {
        Self::wrap(CopulaKind::W)
    }

    pub fn pi() -> Self {
        Self::wrap(CopulaKind::Pi)
    }

    pub fn m() -> Self {
        Self::wrap(CopulaKind::M)
    }

    /// The lower local bound for the given parameters.
    pub fn lower(params: BoundParams) -> Self {
        Self::wrap(CopulaKind::Lower(params))
    }

    /// The upper local bound for the given parameters.
    pub fn upper(params: BoundParams) -> Self {
        Self::wrap(CopulaKind::Upper(params))
    }

    pub fn checkerboard(grid: CheckerboardCopula) -> Self {
        Self::wrap(CopulaKind::Checkerboard(grid))
    }

    /// `Cᵗ(u, v) = C(v, u)`.
    pub fn transpose(&self) -> Self {
        Self::wrap(CopulaKind::Transpose(self.clone()))
    }

    /// `C^σ1(u, v) = v − C(1 − u, v)`.
    pub fn sigma1(&self) -> Self {
        Self::wrap(CopulaKind::Sigma1(self.clone()))
    }

    /// `C^σ2(u, v) = u − C(u, 1 − v)`.
    pub fn sigma2(&self) -> Self {
        Self::wrap(CopulaKind::Sigma2(self.clone()))
    }

    /// The survival copula `u + v − 1 + C(1 − u, 1 − v)`, i.e. σ2 ∘ σ1.
    pub fn survival(&self) -> Self {
        Self::wrap(CopulaKind::Survival(self.clone()))
    }

    /// `t·left + (1 − t)·right`.
    pub fn convex(t: f64, left: &Copula, right: &Copula) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::WeightOutOfRange(t));
        }
        Ok(Self::wrap(CopulaKind::Convex {
            t,
            left: left.clone(),
            right: right.clone(),
        }))
    }

    pub fn kind(&self) -> &CopulaKind {
        &self.0
    }

    /// Evaluates the copula. Arguments are assumed to lie in the unit square.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match &*self.0 {
            CopulaKind::W => w(u, v),
            CopulaKind::Pi => u * v,
            CopulaKind::M => m(u, v),
            CopulaKind::Lower(p) => p.lower_value(u, v),
            CopulaKind::Upper(p) => p.upper_value(u, v),
            CopulaKind::Transpose(c) => c.eval(v, u),
            CopulaKind::Sigma1(c) => v - c.eval(1.0 - u, v),
            CopulaKind::Sigma2(c) => u - c.eval(u, 1.0 - v),
            CopulaKind::Survival(c) => u + v - 1.0 + c.eval(1.0 - u, 1.0 - v),
            CopulaKind::Convex { t, left, right } => {
                t * left.eval(u, v) + (1.0 - t) * right.eval(u, v)
            }
            CopulaKind::Checkerboard(g) => g.eval(u, v),
        }
    }

    pub fn eval_point(&self, p: UnitPoint) -> f64 {
        self.eval(p.u, p.v)
    }

    /// Discretises the copula on an `n × n` checkerboard.
    pub fn to_checkerboard(&self, n: usize) -> Result<CheckerboardCopula> {
        crate::checkerboard::to_checkerboard(self, n)
    }
}

impl fmt::Debug for Copula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Copula({self})")
    }
}

impl fmt::Display for Copula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            CopulaKind::W => f.write_str("W"),
            CopulaKind::Pi => f.write_str("Pi"),
            CopulaKind::M => f.write_str("M"),
            CopulaKind::Lower(p) => write!(f, "lower({}, {}, {})", p.a(), p.b(), p.c()),
            CopulaKind::Upper(p) => write!(f, "upper({}, {}, {})", p.a(), p.b(), p.c()),
            CopulaKind::Transpose(c) => write!(f, "transpose({c})"),
            CopulaKind::Sigma1(c) => write!(f, "sigma1({c})"),
            CopulaKind::Sigma2(c) => write!(f, "sigma2({c})"),
            CopulaKind::Survival(c) => write!(f, "survival({c})"),
            CopulaKind::Convex { t, left, right } => write!(f, "{t}*{left} + {}*{right}", 1.0 - t),
            CopulaKind::Checkerboard(g) => write!(f, "checkerboard(n = {})", g.order()),
        }
    }
}

/// `transpose(C)` as a free function.
pub fn transpose(c: &Copula) -> Copula {
    c.transpose()
}

pub fn reflect_sigma1(c: &Copula) -> Copula {
    c.sigma1()
}

pub fn reflect_sigma2(c: &Copula) -> Copula {
    c.sigma2()
}

pub fn survival(c: &Copula) -> Copula {
    c.survival()
}

pub fn convex_combination(t: f64, a: &Copula, b: &Copula) -> Result<Copula> {
    Copula::convex(t, a, b)
}

/// Maximum violations of the copula axioms found on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub n: usize,
    /// `max |C(u, 0)|, |C(0, v)|`.
    pub groundedness: f64,
    /// `max |C(u, 1) − u|, |C(1, v) − v|`.
    pub margins: f64,
    /// Largest negative rectangle volume, as a positive number.
    pub two_increasing: f64,
    /// Largest excess of `|ΔC|` over the step between neighbouring nodes.
    pub lipschitz: f64,
    /// Largest excursion outside `W ≤ C ≤ M`.
    pub frechet: f64,
}

impl ValidationReport {
    pub fn max_violation(&self) -> f64 {
        self.groundedness
            .max(self.margins)
            .max(self.two_increasing)
            .max(self.lipschitz)
            .max(self.frechet)
    }

    pub fn passed(&self) -> bool {
        self.max_violation() <= VALIDATION_TOL
    }
}

/// Grid nodes `i / (n − 1)`, `i = 0..n`, with both ends exact.
pub(crate) fn grid_nodes(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

/// Checks groundedness, uniform margins, 2-increasingness and the
/// 1-Lipschitz property on the `n × n` grid `{i / (n − 1)}²`.
pub fn validate_copula(c: &Copula, n: usize) -> Result<ValidationReport> {
    if n < 2 {
        return Err(Error::GridTooSmall { n, min: 2 });
    }
    let xs = grid_nodes(n);
    let values: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&u| xs.iter().map(|&v| c.eval(u, v)).collect())
        .collect();

    let mut report = ValidationReport {
        n,
        groundedness: 0.0,
        margins: 0.0,
        two_increasing: 0.0,
        lipschitz: 0.0,
        frechet: 0.0,
    };
    let last = n - 1;
    for i in 0..n {
        report.groundedness = report
            .groundedness
            .max(values[i][0].abs())
            .max(values[0][i].abs());
        report.margins = report
            .margins
            .max((values[i][last] - xs[i]).abs())
            .max((values[last][i] - xs[i]).abs());
    }
    let step = 1.0 / last as f64;
    for i in 0..n {
        for j in 0..n {
            let value = values[i][j];
            let (u, v) = (xs[i], xs[j]);
            report.frechet = report.frechet.max(w(u, v) - value).max(value - m(u, v));
            if i + 1 < n {
                let du = (values[i + 1][j] - value).abs() - step;
                report.lipschitz = report.lipschitz.max(du);
            }
            if j + 1 < n {
                let dv = (values[i][j + 1] - value).abs() - step;
                report.lipschitz = report.lipschitz.max(dv);
            }
            if i + 1 < n && j + 1 < n {
                let volume = values[i + 1][j + 1] - values[i + 1][j] - values[i][j + 1] + value;
                report.two_increasing = report.two_increasing.max(-volume);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lower_046() -> Copula {
        Copula::lower(BoundParams::new(0.4, 0.6, 0.1).unwrap())
    }

    fn max_grid_diff(a: &Copula, b: &Copula, n: usize) -> f64 {
        let xs = grid_nodes(n);
        let mut worst: f64 = 0.0;
        for &u in &xs {
            for &v in &xs {
                worst = worst.max((a.eval(u, v) - b.eval(u, v)).abs());
            }
        }
        worst
    }

    #[test]
    fn reference_copulas() {
        let p = |u, v| UnitPoint::new(u, v).unwrap();
        assert_eq!(eval_w(p(0.5, 0.5)), 0.0);
        assert_abs_diff_eq!(eval_w(p(0.8, 0.7)), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_w(p(1.0, 0.37)), 0.37, epsilon = 1e-15);
        assert_eq!(eval_m(p(0.3, 0.9)), 0.3);
        assert_eq!(eval_m(p(0.42, 1.0)), 0.42);
        assert_eq!(eval_m(p(0.0, 0.7)), 0.0);
        assert_eq!(eval_pi(p(0.5, 0.5)), 0.25);
        assert_eq!(eval_pi(p(1.0, 0.7)), 0.7);
        assert_eq!(eval_pi(p(0.2, 0.0)), 0.0);
    }

    #[test]
    fn unit_point_clamps_round_off_only() {
        let p = UnitPoint::new(-1e-13, 1.0 + 1e-13).unwrap();
        assert_eq!((p.u, p.v), (0.0, 1.0));
        assert!(UnitPoint::new(-1e-6, 0.5).is_err());
        assert!(UnitPoint::new(0.5, 1.1).is_err());
    }

    #[test]
    fn transpose_examples() {
        let m = Copula::m();
        assert_eq!(m.transpose().eval(0.2, 0.7), m.eval(0.2, 0.7));
        assert_abs_diff_eq!(lower_046().transpose().eval(0.6, 0.4), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(
            Copula::pi().transpose().eval(0.3, 0.8),
            0.24,
            epsilon = 1e-15
        );
    }

    #[test]
    fn reflections_map_m_and_w() {
        let (w, m, pi) = (Copula::w(), Copula::m(), Copula::pi());
        assert!(max_grid_diff(&m.sigma1(), &w, 101) < 1e-15);
        assert!(max_grid_diff(&m.sigma2(), &w, 101) < 1e-15);
        assert!(max_grid_diff(&w.sigma1(), &m, 101) < 1e-15);
        assert!(max_grid_diff(&pi.sigma1(), &pi, 101) < 1e-15);
        assert!(max_grid_diff(&pi.sigma2(), &pi, 101) < 1e-15);
        let l = lower_046();
        assert!(max_grid_diff(&l.sigma2().sigma2(), &l, 101) < 1e-14);
    }

    #[test]
    fn survival_fixes_reference_copulas() {
        for c in [Copula::w(), Copula::pi(), Copula::m()] {
            assert!(max_grid_diff(&c.survival(), &c, 101) < 1e-14, "{c}");
        }
    }

    #[test]
    fn survival_is_both_reflections() {
        let l = lower_046();
        assert!(max_grid_diff(&l.survival(), &l.sigma1().sigma2(), 101) < 1e-14);
        assert!(max_grid_diff(&l.survival(), &l.sigma2().sigma1(), 101) < 1e-14);
    }

    #[test]
    fn convex_combination_endpoints() {
        let (w, m) = (Copula::w(), Copula::m());
        let l = lower_046();
        assert!(max_grid_diff(&Copula::convex(1.0, &l, &m).unwrap(), &l, 51) == 0.0);
        assert!(max_grid_diff(&Copula::convex(0.0, &l, &m).unwrap(), &m, 51) == 0.0);
        assert_eq!(Copula::convex(0.5, &w, &m).unwrap().eval(0.5, 0.5), 0.25);
        assert!(matches!(
            Copula::convex(1.5, &w, &m),
            Err(Error::WeightOutOfRange(_))
        ));
        assert!(Copula::convex(-0.1, &w, &m).is_err());
    }

    #[test]
    fn validation_passes_for_genuine_copulas() {
        assert!(validate_copula(&Copula::m(), 101).unwrap().passed());
        assert!(validate_copula(&lower_046(), 201).unwrap().passed());
        let up = Copula::upper(BoundParams::new(0.4, 0.6, 0.1).unwrap());
        assert!(validate_copula(&up.survival(), 101).unwrap().passed());
        let mix = Copula::convex(0.3, &lower_046(), &up).unwrap();
        assert!(validate_copula(&mix.sigma1(), 101).unwrap().passed());
    }

    #[test]
    fn validation_flags_negative_cell() {
        let n = 4;
        let mut mass = vec![1.0 / 16.0; n * n];
        // shift 0.1 around a 2×2 block: margins survive, two cells go negative
        mass[0] -= 0.1;
        mass[1] += 0.1;
        mass[n] += 0.1;
        mass[n + 1] -= 0.1;
        let bad = CheckerboardCopula::from_masses_unchecked(n, mass);
        let report = validate_copula(&Copula::checkerboard(bad), 41).unwrap();
        assert!(!report.passed());
        // each 1/40 grid cell inside the bad block carries -0.0375/100
        assert!(report.two_increasing > 3e-4);
        assert!(report.margins < 1e-12);
    }

    #[test]
    fn validation_rejects_tiny_grid() {
        assert!(matches!(
            validate_copula(&Copula::m(), 1),
            Err(Error::GridTooSmall { .. })
        ));
    }
}
