//! Closed forms of `Q(D, C)` for the local bound copulas and the algebra that
//! extends them to transformed handles and mixtures.

use crate::bounds::{BoundParams, Which};
use crate::copula::{Copula, CopulaKind};

/// Tolerance used when selecting a branch of a piecewise formula.
pub const CASE_EPS: f64 = 1e-12;

/// The second argument of a closed-form `Q` against a bound copula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Partner {
    W,
    Pi,
    M,
    /// The bound copula itself, `Q(C, C)`.
    SelfCopula,
}

impl std::fmt::Display for Partner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Partner::W => "W",
            Partner::Pi => "Pi",
            Partner::M => "M",
            Partner::SelfCopula => "self",
        })
    }
}

/// Variables of a piecewise case: `d` is `d1` for the lower bound and `d2`
/// for the upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseVars {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// One branch of a piecewise formula.
pub struct Case {
    pub label: &'static str,
    pub applies: fn(CaseVars, f64) -> bool,
    pub value: fn(CaseVars) -> f64,
}

fn within(lo: f64, x: f64, hi: f64, eps: f64) -> bool {
    lo <= x + eps && x <= hi + eps
}

/// `Q(M, lower)`, nine branches in the variables `(a, b, d1)`.
pub static LOWER_M_CASES: [Case; 9] = [
    Case {
        label: "b >= d + 1/2",
        applies: |x, e| x.b + e >= x.d + 0.5,
        value: |_| 0.0,
    },
    Case {
        label: "(1+d)/2 <= b <= d + 1/2, a <= b - d",
        applies: |x, e| within(0.5 * (1.0 + x.d), x.b, x.d + 0.5, e) && x.a <= x.b - x.d + e,
        value: |x| (2.0 * x.d + 1.0 - 2.0 * x.b).powi(2),
    },
    Case {
        label: "(1+d)/2 <= b <= d + 1/2, a >= b - d",
        applies: |x, e| within(0.5 * (1.0 + x.d), x.b, x.d + 0.5, e) && x.a + e >= x.b - x.d,
        value: |x| (x.a + x.b - 1.0 - x.d) * (3.0 * x.b - 3.0 * x.d - x.a - 1.0),
    },
    Case {
        label: "b <= (1+d)/2, a <= b - d",
        applies: |x, e| x.b <= 0.5 * (1.0 + x.d) + e && x.a <= x.b - x.d + e,
        value: |x| x.d * (2.0 + 3.0 * x.d - 4.0 * x.b),
    },
    Case {
        label: "d >= max(2a - 1, 2b - 1, |a - b|)",
        applies: |x, e| {
            let floor = (2.0 * x.a - 1.0)
                .max(2.0 * x.b - 1.0)
                .max((x.a - x.b).abs());
            x.d + e >= floor
        },
        value: |x| 2.0 * x.d * (1.0 + x.d - x.a - x.b) - (x.a - x.b).powi(2),
    },
    Case {
        label: "a <= (1+d)/2, b <= a - d",
        applies: |x, e| x.a <= 0.5 * (1.0 + x.d) + e && x.b <= x.a - x.d + e,
        value: |x| x.d * (2.0 + 3.0 * x.d - 4.0 * x.a),
    },
    Case {
        label: "(1+d)/2 <= a <= d + 1/2, b >= a - d",
        applies: |x, e| within(0.5 * (1.0 + x.d), x.a, x.d + 0.5, e) && x.b + e >= x.a - x.d,
        value: |x| (x.a + x.b - 1.0 - x.d) * (3.0 * x.a - 3.0 * x.d - x.b - 1.0),
    },
    Case {
        label: "(1+d)/2 <= a <= d + 1/2, b <= a - d",
        applies: |x, e| within(0.5 * (1.0 + x.d), x.a, x.d + 0.5, e) && x.b <= x.a - x.d + e,
        value: |x| (2.0 * x.d + 1.0 - 2.0 * x.a).powi(2),
    },
    Case {
        label: "a >= d + 1/2",
        applies: |x, e| x.a + e >= x.d + 0.5,
        value: |_| 0.0,
    },
];

/// `Q(W, upper)`, nine branches in the variables `(a, b, d2)`.
pub static UPPER_W_CASES: [Case; 9] = [
    Case {
        label: "a + b - 1/2 <= d",
        applies: |x, e| x.a + x.b - 0.5 <= x.d + e,
        value: |_| 0.0,
    },
    Case {
        label: "max(2a + b - 1, a + 2b - 1) <= d <= a + b - 1/2",
        applies: |x, e| {
            let lo = (2.0 * x.a + x.b - 1.0).max(x.a + 2.0 * x.b - 1.0);
            within(lo, x.d, x.a + x.b - 0.5, e)
        },
        value: |x| -(2.0 * x.a + 2.0 * x.b - 2.0 * x.d - 1.0).powi(2),
    },
    Case {
        label: "a + 2b - 1 <= d <= 2a + b - 1",
        applies: |x, e| within(x.a + 2.0 * x.b - 1.0, x.d, 2.0 * x.a + x.b - 1.0, e),
        value: |x| -(4.0 * x.a + 3.0 * x.b - 3.0 * x.d - 2.0) * (x.b - x.d),
    },
    Case {
        label: "2a + b - 1 <= d <= a + 2b - 1",
        applies: |x, e| within(2.0 * x.a + x.b - 1.0, x.d, x.a + 2.0 * x.b - 1.0, e),
        value: |x| -(3.0 * x.a + 4.0 * x.b - 3.0 * x.d - 2.0) * (x.a - x.d),
    },
    Case {
        label: "d <= min(1 - a, 1 - b, 2a + b - 1, a + 2b - 1)",
        applies: |x, e| {
            let hi = (1.0 - x.a)
                .min(1.0 - x.b)
                .min(2.0 * x.a + x.b - 1.0)
                .min(x.a + 2.0 * x.b - 1.0);
            x.d <= hi + e
        },
        value: |x| (x.a - 1.0).powi(2) + (x.b - 1.0).powi(2) + 2.0 * x.d * (x.a + x.b - x.d) - 1.0,
    },
    Case {
        label: "1 - b <= d <= 1 - a",
        applies: |x, e| within(1.0 - x.b, x.d, 1.0 - x.a, e),
        value: |x| (x.a - x.d) * (x.a + 3.0 * x.d - 2.0),
    },
    Case {
        label: "1 - a <= d <= 1 - b",
        applies: |x, e| within(1.0 - x.a, x.d, 1.0 - x.b, e),
        value: |x| (x.b - x.d) * (x.b + 3.0 * x.d - 2.0),
    },
    Case {
        label: "max(1 - a, 1 - b) <= d <= 1/2",
        applies: |x, e| within((1.0 - x.a).max(1.0 - x.b), x.d, 0.5, e),
        value: |x| -(1.0 - 2.0 * x.d).powi(2),
    },
    Case {
        label: "d >= 1/2",
        applies: |x, e| x.d + e >= 0.5,
        value: |_| 0.0,
    },
];

/// Index of the first branch that applies. All admissible parameters are
/// covered; the wider second pass only absorbs round-off far above the
/// selection tolerance.
pub fn select_case(cases: &[Case], vars: CaseVars) -> usize {
    [CASE_EPS, 1e-9]
        .iter()
        .find_map(|&eps| cases.iter().position(|case| (case.applies)(vars, eps)))
        .unwrap_or_else(|| panic!("no branch applies at {vars:?}"))
}

pub fn eval_cases(cases: &[Case], vars: CaseVars) -> f64 {
    (cases[select_case(cases, vars)].value)(vars)
}

/// `Q(D, lower(a, b, c))`.
pub fn q_lower(partner: Partner, p: &BoundParams) -> f64 {
    let (a, b, d1) = (p.a(), p.b(), p.d1());
    let s = 1.0 - a - b + d1;
    match partner {
        Partner::W | Partner::SelfCopula => 4.0 * d1 * s - 1.0,
        Partner::Pi => 2.0 * d1 * s * (s + d1) - 1.0 / 3.0,
        Partner::M => eval_cases(&LOWER_M_CASES, CaseVars { a, b, d: d1 }),
    }
}

/// `Q(D, upper(a, b, c))`.
pub fn q_upper(partner: Partner, p: &BoundParams) -> f64 {
    let (a, b, d2) = (p.a(), p.b(), p.d2());
    match partner {
        Partner::W => eval_cases(&UPPER_W_CASES, CaseVars { a, b, d: d2 }),
        Partner::Pi => 1.0 / 3.0 - 2.0 * (a + b - 2.0 * d2) * (a - d2) * (b - d2),
        Partner::M | Partner::SelfCopula => 1.0 - 4.0 * (a - d2) * (b - d2),
    }
}

pub fn q_bound(partner: Partner, p: &BoundParams, which: Which) -> f64 {
    match which {
        Which::Lower => q_lower(partner, p),
        Which::Upper => q_upper(partner, p),
    }
}

/// Building block of the closed-form algebra. The local bounds are closed
/// under transposition and both reflections, and `W`, `Π`, `M` are permuted
/// among themselves, so every transformed handle reduces to a mixture of
/// these atoms. Checkerboards keep their transform wrapper.
#[derive(Debug, Clone)]
pub(crate) enum Atom {
    W,
    Pi,
    M,
    Bound(BoundParams, Which),
    Opaque(Copula),
}

impl Atom {
    fn reference(&self) -> Option<Partner> {
        match self {
            Atom::W => Some(Partner::W),
            Atom::Pi => Some(Partner::Pi),
            Atom::M => Some(Partner::M),
            _ => None,
        }
    }

    fn transpose(self) -> Self {
        match self {
            Atom::Bound(p, which) => {
                Atom::Bound(p.swapped().expect("swap keeps admissibility"), which)
            }
            Atom::Opaque(c) => Atom::Opaque(c.transpose()),
            other => other,
        }
    }

    /// Uses `σ1(lower(p, q)) = upper(q, 1 − p)` and
    /// `σ1(upper(a, b)) = lower(1 − b, a)`.
    fn sigma1(self) -> Self {
        match self {
            Atom::W => Atom::M,
            Atom::M => Atom::W,
            Atom::Pi => Atom::Pi,
            Atom::Bound(p, Which::Lower) => Atom::Bound(
                BoundParams::new(p.b(), 1.0 - p.a(), p.c())
                    .expect("reflection keeps admissibility"),
                Which::Upper,
            ),
            Atom::Bound(p, Which::Upper) => Atom::Bound(
                BoundParams::new(1.0 - p.b(), p.a(), p.c())
                    .expect("reflection keeps admissibility"),
                Which::Lower,
            ),
            Atom::Opaque(c) => Atom::Opaque(c.sigma1()),
        }
    }

    /// Uses `σ2(lower(p, q)) = upper(1 − q, p)` and
    /// `σ2(upper(a, b)) = lower(b, 1 − a)`.
    fn sigma2(self) -> Self {
        match self {
            Atom::W => Atom::M,
            Atom::M => Atom::W,
            Atom::Pi => Atom::Pi,
            Atom::Bound(p, Which::Lower) => Atom::Bound(
                BoundParams::new(1.0 - p.b(), p.a(), p.c())
                    .expect("reflection keeps admissibility"),
                Which::Upper,
            ),
            Atom::Bound(p, Which::Upper) => Atom::Bound(
                BoundParams::new(p.b(), 1.0 - p.a(), p.c())
                    .expect("reflection keeps admissibility"),
                Which::Lower,
            ),
            Atom::Opaque(c) => Atom::Opaque(c.sigma2()),
        }
    }
}

/// Expands a handle into a weighted sum of atoms.
pub(crate) fn expand(c: &Copula) -> Vec<(f64, Atom)> {
    let map = |inner: &Copula, f: fn(Atom) -> Atom| -> Vec<(f64, Atom)> {
        expand(inner).into_iter().map(|(w, a)| (w, f(a))).collect()
    };
    match c.kind() {
        CopulaKind::W => vec![(1.0, Atom::W)],
        CopulaKind::Pi => vec![(1.0, Atom::Pi)],
        CopulaKind::M => vec![(1.0, Atom::M)],
        CopulaKind::Lower(p) => vec![(1.0, Atom::Bound(*p, Which::Lower))],
        CopulaKind::Upper(p) => vec![(1.0, Atom::Bound(*p, Which::Upper))],
        CopulaKind::Transpose(inner) => map(inner, Atom::transpose),
        CopulaKind::Sigma1(inner) => map(inner, Atom::sigma1),
        CopulaKind::Sigma2(inner) => map(inner, Atom::sigma2),
        CopulaKind::Survival(inner) => map(inner, |a| a.sigma1().sigma2()),
        CopulaKind::Convex { t, left, right } => {
            let mut parts: Vec<(f64, Atom)> =
                expand(left).into_iter().map(|(w, a)| (t * w, a)).collect();
            parts.extend(expand(right).into_iter().map(|(w, a)| ((1.0 - t) * w, a)));
            parts
        }
        CopulaKind::Checkerboard(_) => vec![(1.0, Atom::Opaque(c.clone()))],
    }
}

fn reference_table(x: Partner, y: Partner) -> f64 {
    use Partner::*;
    match (x, y) {
        (W, W) => -1.0,
        (M, M) => 1.0,
        (Pi, Pi) => 0.0,
        (W, M) | (M, W) => 0.0,
        (W, Pi) | (Pi, W) => -1.0 / 3.0,
        (M, Pi) | (Pi, M) => 1.0 / 3.0,
        _ => unreachable!("only reference copulas reach the table"),
    }
}

fn same_bound(p: &BoundParams, q: &BoundParams) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-15;
    close(p.a(), q.a()) && close(p.b(), q.b()) && close(p.c(), q.c())
}

fn q_atoms(x: &Atom, y: &Atom) -> Option<f64> {
    match (x, y) {
        (Atom::Bound(p, wp), Atom::Bound(q, wq)) => {
            (wp == wq && same_bound(p, q)).then(|| q_bound(Partner::SelfCopula, p, *wp))
        }
        (Atom::Bound(p, which), other) | (other, Atom::Bound(p, which)) => {
            Some(q_bound(other.reference()?, p, *which))
        }
        _ => Some(reference_table(x.reference()?, y.reference()?)),
    }
}

/// `Q(C1, C2)` from closed forms, or `None` when some pair of building
/// blocks has no closed form (distinct bound copulas, checkerboards).
pub fn q_closed(c1: &Copula, c2: &Copula) -> Option<f64> {
    let (xs, ys) = (expand(c1), expand(c2));
    let mut total = 0.0;
    for (wx, x) in &xs {
        for (wy, y) in &ys {
            if *wx == 0.0 || *wy == 0.0 {
                continue;
            }
            total += wx * wy * q_atoms(x, y)?;
        }
    }
    // Q is bilinear in the measures, and each expansion has total weight one
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_values() {
        let p = BoundParams::new(0.4, 0.6, 0.1).unwrap();
        assert_abs_diff_eq!(q_lower(Partner::W, &p), -0.96, epsilon = 1e-15);
        assert_abs_diff_eq!(q_upper(Partner::M, &p), 0.88, epsilon = 1e-15);
        assert_abs_diff_eq!(q_upper(Partner::Pi, &p), 1.0 / 3.0 - 0.024, epsilon = 1e-15);
        let m = 1.0 / 3.0;
        let t = BoundParams::new(m, 1.0 - m, m).unwrap();
        assert_abs_diff_eq!(
            q_lower(Partner::SelfCopula, &t),
            -5.0 / 9.0,
            epsilon = 1e-14
        );
        let r = BoundParams::new(0.25, 0.5, 0.25).unwrap();
        assert_abs_diff_eq!(q_upper(Partner::SelfCopula, &r), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn first_and_last_branches_vanish() {
        // b >= d1 + 1/2 with d1 = 0.1
        let p = BoundParams::new(0.2, 0.65, 0.1).unwrap();
        assert_eq!(
            select_case(
                &LOWER_M_CASES,
                CaseVars {
                    a: 0.2,
                    b: 0.65,
                    d: p.d1()
                }
            ),
            0
        );
        assert_eq!(q_lower(Partner::M, &p), 0.0);
        // a + b − 1/2 <= d2
        let q = BoundParams::new(0.3, 0.3, 0.05).unwrap();
        assert_eq!(q_upper(Partner::W, &q), 0.0);
    }

    #[test]
    fn reference_pairs() {
        let (w, pi, m) = (Copula::w(), Copula::pi(), Copula::m());
        assert_eq!(q_closed(&m, &m), Some(1.0));
        assert_eq!(q_closed(&w, &w), Some(-1.0));
        assert_eq!(q_closed(&m, &pi), Some(1.0 / 3.0));
        assert_eq!(q_closed(&m.sigma1(), &m), Some(0.0));
    }

    #[test]
    fn transformed_bounds_reduce() {
        let p = BoundParams::new(0.3, 0.55, 0.15).unwrap();
        let lower = Copula::lower(p);
        let pi = Copula::pi();
        let direct = q_lower(Partner::Pi, &p);
        assert_abs_diff_eq!(
            q_closed(&lower.transpose(), &pi).unwrap(),
            direct,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            q_closed(&lower.survival(), &pi).unwrap(),
            direct,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            q_closed(&lower.sigma1(), &pi).unwrap(),
            -direct,
            epsilon = 1e-14
        );
        let tau = q_lower(Partner::SelfCopula, &p);
        let s = lower.sigma2();
        assert_abs_diff_eq!(q_closed(&s, &s).unwrap(), -tau, epsilon = 1e-14);
    }

    #[test]
    fn mixtures_need_cross_terms() {
        let p = BoundParams::new(0.3, 0.55, 0.15).unwrap();
        let mix = Copula::convex(0.5, &Copula::lower(p), &Copula::upper(p)).unwrap();
        assert!(q_closed(&mix, &Copula::pi()).is_some());
        assert!(q_closed(&mix, &mix).is_none());
    }
}
