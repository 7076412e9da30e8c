//! The concordance function `Q(C1, C2) = 4 ∫ C2 dC1 − 1` and the measures
//! of concordance built from it.
//!
//! `Q` is available in three independent evaluation modes:
//!
//! * closed form, from the piecewise polynomial expressions for the local
//!   bounds (see [`closed`]);
//! * segment quadrature, integrating along the singular support of one
//!   argument;
//! * a checkerboard oracle that discretises the first argument.

pub mod closed;
pub mod properties;

use std::fmt;
use std::str::FromStr;

use crate::bounds::{support_of, BoundParams, SegmentSupport, Which};
use crate::checkerboard::CheckerboardCopula;
use crate::copula::{Copula, CopulaKind};
use crate::quadrature::{integrate, DEFAULT_TOL};
use crate::{Error, Result};

pub use closed::{q_closed, q_lower, q_upper, Partner};

/// Error constant of the checkerboard oracle: `|Q_n − Q| ≤ CHECKERBOARD_ERROR / n`.
///
/// Evaluating a 1-Lipschitz integrand at a cell centre instead of averaging it
/// over the cell moves it by at most one cell width per unit mass in the sum
/// of both coordinates, and `Q` multiplies the integral by four.
pub const CHECKERBOARD_ERROR: f64 = 8.0;

/// The five measures of concordance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    /// Spearman's rho, `3 Q(C, Π)`.
    Rho,
    /// Kendall's tau, `Q(C, C)`.
    Tau,
    /// Spearman's footrule, `(3 Q(C, M) − 1) / 2`.
    Phi,
    /// Gini's gamma, `Q(C, M) + Q(C, W)`.
    Gamma,
    /// Blomqvist's beta, `4 C(1/2, 1/2) − 1`.
    Beta,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 5] = [
        MeasureKind::Rho,
        MeasureKind::Tau,
        MeasureKind::Phi,
        MeasureKind::Gamma,
        MeasureKind::Beta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Rho => "rho",
            MeasureKind::Tau => "tau",
            MeasureKind::Phi => "phi",
            MeasureKind::Gamma => "gamma",
            MeasureKind::Beta => "beta",
        }
    }

    /// Range of the measure over all copulas.
    pub fn global_range(self) -> (f64, f64) {
        match self {
            MeasureKind::Phi => (-0.5, 1.0),
            _ => (-1.0, 1.0),
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument {
                name: "measure",
                value: s.into(),
                reason: "expected one of rho, tau, phi, gamma, beta".into(),
            })
    }
}

/// How `Q` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    ClosedForm,
    SegmentQuadrature,
    /// Checkerboard oracle of the given order.
    Checkerboard(usize),
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalMode::ClosedForm => f.write_str("closed"),
            EvalMode::SegmentQuadrature => f.write_str("segments"),
            EvalMode::Checkerboard(n) => write!(f, "checkerboard({n})"),
        }
    }
}

/// A value of `Q` or of a measure with its evaluation mode and a bound on
/// the absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcordanceValue {
    pub value: f64,
    pub mode: EvalMode,
    pub error_bound: f64,
}

impl ConcordanceValue {
    fn closed(value: f64) -> Self {
        Self {
            value,
            mode: EvalMode::ClosedForm,
            error_bound: 0.0,
        }
    }

    fn scaled(self, factor: f64, offset: f64) -> Self {
        Self {
            value: factor * self.value + offset,
            mode: self.mode,
            error_bound: factor.abs() * self.error_bound,
        }
    }

    fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            mode: self.mode,
            error_bound: self.error_bound + other.error_bound,
        }
    }
}

/// `4 Σ mass(i, j) · C2(cell centre) − 1`.
pub fn q_checkerboard(c1: &CheckerboardCopula, c2: &Copula) -> ConcordanceValue {
    let n = c1.order();
    ConcordanceValue {
        value: 4.0 * c1.integrate(|u, v| c2.eval(u, v)) - 1.0,
        mode: EvalMode::Checkerboard(n),
        error_bound: CHECKERBOARD_ERROR / n as f64,
    }
}

/// `4 Σ_segments ∫ D(u, α + βu) du − 1`, each line integral by adaptive
/// Simpson to absolute tolerance `1e-10`.
pub fn q_segments(d: &Copula, support: &SegmentSupport) -> ConcordanceValue {
    let mut sum = 0.0;
    let mut tolerance = 0.0;
    for s in &support.segments {
        if s.u_end <= s.u_start {
            continue;
        }
        let part = integrate(
            |u| d.eval(u, s.map(u).clamp(0.0, 1.0)),
            s.u_start,
            s.u_end,
            DEFAULT_TOL,
        );
        sum += part.value;
        tolerance += DEFAULT_TOL;
    }
    ConcordanceValue {
        value: 4.0 * sum - 1.0,
        mode: EvalMode::SegmentQuadrature,
        error_bound: 4.0 * tolerance,
    }
}

fn partner_copula(d: Partner, own: &Copula) -> Copula {
    match d {
        Partner::W => Copula::w(),
        Partner::Pi => Copula::pi(),
        Partner::M => Copula::m(),
        Partner::SelfCopula => own.clone(),
    }
}

/// `Q(D, lower(a, b, c))` in closed form.
pub fn q_closed_lower(d: Partner, params: BoundParams) -> ConcordanceValue {
    ConcordanceValue::closed(q_lower(d, &params))
}

/// `Q(D, upper(a, b, c))` in closed form.
pub fn q_closed_upper(d: Partner, params: BoundParams) -> ConcordanceValue {
    ConcordanceValue::closed(q_upper(d, &params))
}

/// `Q(D, bound)` by quadrature along the bound's support.
pub fn q_segments_bound(d: Partner, params: BoundParams, which: Which) -> ConcordanceValue {
    let own = crate::bounds::bound(params, which);
    q_segments(&partner_copula(d, &own), &support_of(params, which))
}

/// `Q(D, bound)` by the checkerboard oracle of the bound.
pub fn q_bound_checkerboard(
    d: Partner,
    params: BoundParams,
    which: Which,
    n: usize,
) -> Result<ConcordanceValue> {
    let own = crate::bounds::bound(params, which);
    Ok(q_checkerboard(
        &own.to_checkerboard(n)?,
        &partner_copula(d, &own),
    ))
}

/// Splits a handle into weighted non-mixture parts, pushing transforms
/// through convex combinations (they act linearly on the measure).
fn linear_parts(c: &Copula) -> Vec<(f64, Copula)> {
    let map = |inner: &Copula, f: fn(&Copula) -> Copula| -> Vec<(f64, Copula)> {
        linear_parts(inner)
            .into_iter()
            .map(|(w, x)| (w, f(&x)))
            .collect()
    };
    match c.kind() {
        CopulaKind::Convex { t, left, right } => {
            let mut parts: Vec<_> = linear_parts(left)
                .into_iter()
                .map(|(w, x)| (t * w, x))
                .collect();
            parts.extend(
                linear_parts(right)
                    .into_iter()
                    .map(|(w, x)| ((1.0 - t) * w, x)),
            );
            parts
        }
        CopulaKind::Transpose(inner) => map(inner, Copula::transpose),
        CopulaKind::Sigma1(inner) => map(inner, Copula::sigma1),
        CopulaKind::Sigma2(inner) => map(inner, Copula::sigma2),
        CopulaKind::Survival(inner) => map(inner, Copula::survival),
        _ => vec![(1.0, c.clone())],
    }
}

fn is_product(c: &Copula) -> bool {
    match c.kind() {
        CopulaKind::Pi => true,
        CopulaKind::Transpose(x)
        | CopulaKind::Sigma1(x)
        | CopulaKind::Sigma2(x)
        | CopulaKind::Survival(x) => is_product(x),
        _ => false,
    }
}

fn q_segments_pair(x: &Copula, y: &Copula) -> Option<ConcordanceValue> {
    if let Some(s) = SegmentSupport::of_copula(x) {
        return Some(q_segments(y, &s));
    }
    if let Some(s) = SegmentSupport::of_copula(y) {
        return Some(q_segments(x, &s));
    }
    (is_product(x) && is_product(y)).then_some(ConcordanceValue {
        value: 0.0,
        mode: EvalMode::SegmentQuadrature,
        error_bound: 0.0,
    })
}

/// `Q(C1, C2)` by segment quadrature, splitting mixtures bilinearly.
pub fn q_segments_general(c1: &Copula, c2: &Copula) -> Option<ConcordanceValue> {
    let mut total = ConcordanceValue {
        value: 0.0,
        mode: EvalMode::SegmentQuadrature,
        error_bound: 0.0,
    };
    for (wx, x) in linear_parts(c1) {
        for (wy, y) in linear_parts(c2) {
            if wx == 0.0 || wy == 0.0 {
                continue;
            }
            // each part integrates to 4I − 1; recombine the integrals
            let part = q_segments_pair(&x, &y)?;
            total.value += wx * wy * (part.value + 1.0);
            total.error_bound += wx * wy * part.error_bound;
        }
    }
    total.value -= 1.0;
    Some(total)
}

/// Evaluates `Q(C, ·)` for a fixed first argument in one mode, discretising
/// `C` at most once.
struct QEvaluator<'a> {
    c: &'a Copula,
    mode: EvalMode,
    grid: Option<CheckerboardCopula>,
}

impl<'a> QEvaluator<'a> {
    fn new(c: &'a Copula, mode: EvalMode) -> Result<Self> {
        let grid = match mode {
            EvalMode::Checkerboard(n) => Some(c.to_checkerboard(n)?),
            _ => None,
        };
        Ok(Self { c, mode, grid })
    }

    fn q(&self, other: &Copula) -> Result<ConcordanceValue> {
        let unsupported = |mode| Error::UnsupportedMode {
            mode,
            what: format!("Q({}, {other})", self.c),
        };
        match self.mode {
            EvalMode::ClosedForm => q_closed(self.c, other)
                .map(ConcordanceValue::closed)
                .ok_or_else(|| unsupported("closed")),
            EvalMode::SegmentQuadrature => {
                q_segments_general(self.c, other).ok_or_else(|| unsupported("segments"))
            }
            EvalMode::Checkerboard(_) => Ok(q_checkerboard(
                self.grid
                    .as_ref()
                    .expect("grid built for checkerboard mode"),
                other,
            )),
        }
    }
}

/// `Q(C1, C2)` in the requested mode.
pub fn q(c1: &Copula, c2: &Copula, mode: EvalMode) -> Result<ConcordanceValue> {
    QEvaluator::new(c1, mode)?.q(c2)
}

/// The measure `kind` of `c`. Blomqvist's beta is a point evaluation and is
/// exact in every mode.
pub fn measure(kind: MeasureKind, c: &Copula, mode: EvalMode) -> Result<ConcordanceValue> {
    if kind == MeasureKind::Beta {
        return Ok(ConcordanceValue {
            value: 4.0 * c.eval(0.5, 0.5) - 1.0,
            mode,
            error_bound: 0.0,
        });
    }
    let eval = QEvaluator::new(c, mode)?;
    Ok(match kind {
        MeasureKind::Rho => eval.q(&Copula::pi())?.scaled(3.0, 0.0),
        MeasureKind::Tau => eval.q(c)?,
        MeasureKind::Phi => eval.q(&Copula::m())?.scaled(1.5, -0.5),
        MeasureKind::Gamma => eval.q(&Copula::m())?.plus(eval.q(&Copula::w())?),
        MeasureKind::Beta => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p046() -> BoundParams {
        BoundParams::new(0.4, 0.6, 0.1).unwrap()
    }

    #[test]
    fn segment_examples() {
        let p = p046();
        let v = q_segments(&Copula::w(), &support_of(p, Which::Lower));
        assert_abs_diff_eq!(v.value, -0.96, epsilon = 1e-10);
        let v = q_segments(&Copula::pi(), &support_of(p, Which::Upper));
        assert_abs_diff_eq!(v.value, 1.0 / 3.0 - 0.024, epsilon = 1e-10);
        // c = 0 at a symmetric point collapses the upper support to the diagonal
        let diag = BoundParams::new(0.5, 0.5, 0.0).unwrap();
        let v = q_segments(&Copula::m(), &support_of(diag, Which::Upper));
        assert_abs_diff_eq!(v.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn checkerboard_examples() {
        let n = 256;
        let m = Copula::m().to_checkerboard(n).unwrap();
        let w = Copula::w().to_checkerboard(n).unwrap();
        let bound = CHECKERBOARD_ERROR / n as f64;
        assert!((q_checkerboard(&m, &Copula::m()).value - 1.0).abs() <= bound);
        assert!((q_checkerboard(&w, &Copula::w()).value + 1.0).abs() <= bound);
        assert!((q_checkerboard(&m, &Copula::pi()).value - 1.0 / 3.0).abs() <= bound);
    }

    #[test]
    fn measures_of_reference_copulas() {
        let mode = EvalMode::ClosedForm;
        for kind in MeasureKind::ALL {
            assert_abs_diff_eq!(
                measure(kind, &Copula::m(), mode).unwrap().value,
                1.0,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                measure(kind, &Copula::pi(), mode).unwrap().value,
                0.0,
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(
            measure(MeasureKind::Phi, &Copula::w(), mode).unwrap().value,
            -0.5
        );
        assert_abs_diff_eq!(
            measure(MeasureKind::Rho, &Copula::w(), mode).unwrap().value,
            -1.0
        );
    }

    #[test]
    fn modes_agree_on_transformed_mixture() {
        let p = BoundParams::new(0.3, 0.6, 0.2).unwrap();
        let mix = Copula::convex(0.3, &Copula::lower(p), &Copula::upper(p).transpose())
            .unwrap()
            .sigma1();
        for kind in [MeasureKind::Rho, MeasureKind::Phi, MeasureKind::Gamma] {
            let exact = measure(kind, &mix, EvalMode::ClosedForm).unwrap().value;
            let seg = measure(kind, &mix, EvalMode::SegmentQuadrature).unwrap();
            let grid = measure(kind, &mix, EvalMode::Checkerboard(256)).unwrap();
            assert!((exact - seg.value).abs() <= 1e-8, "{kind}");
            assert!((exact - grid.value).abs() <= grid.error_bound, "{kind}");
        }
        // tau of a mixture needs the cross term, which only quadrature has
        assert!(matches!(
            measure(MeasureKind::Tau, &mix, EvalMode::ClosedForm),
            Err(Error::UnsupportedMode { .. })
        ));
        let seg = measure(MeasureKind::Tau, &mix, EvalMode::SegmentQuadrature).unwrap();
        let grid = measure(MeasureKind::Tau, &mix, EvalMode::Checkerboard(256)).unwrap();
        assert!((seg.value - grid.value).abs() <= grid.error_bound);
    }

    #[test]
    fn beta_is_exact_everywhere() {
        let up = Copula::upper(p046());
        for mode in [
            EvalMode::ClosedForm,
            EvalMode::SegmentQuadrature,
            EvalMode::Checkerboard(16),
        ] {
            let v = measure(MeasureKind::Beta, &up, mode).unwrap();
            assert_abs_diff_eq!(v.value, 0.6, epsilon = 1e-15);
            assert_eq!(v.error_bound, 0.0);
        }
    }

    #[test]
    fn tau_checkerboard_converges_for_m() {
        let n = 128;
        let v = measure(MeasureKind::Tau, &Copula::m(), EvalMode::Checkerboard(n)).unwrap();
        assert!((v.value - 1.0).abs() <= 4.0 / n as f64);
    }

    #[test]
    fn parse_kind() {
        assert_eq!("Gamma".parse::<MeasureKind>().unwrap(), MeasureKind::Gamma);
        assert!("kappa".parse::<MeasureKind>().is_err());
    }
}
