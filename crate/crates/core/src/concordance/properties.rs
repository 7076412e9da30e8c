//! Numerical checks of the symmetry properties of `Q` and of the identities
//! linking `Q` against the local bounds at transformed parameters.

use crate::bounds::{support_of, BoundParams, Which};
use crate::checkerboard::CheckerboardCopula;
use crate::concordance::closed::{q_bound, Partner};
use crate::concordance::{q_checkerboard, q_segments, CHECKERBOARD_ERROR};
use crate::copula::Copula;
use crate::Result;

/// Tolerance of closed-form identities.
pub const CLOSED_TOL: f64 = 1e-13;

/// Tolerance of identities evaluated by segment quadrature.
pub const SEGMENT_TOL: f64 = 1e-8;

/// A single named numerical check.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl PropertyCheck {
    pub fn new(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            error,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::passed)
    }

    pub fn max_error(&self) -> f64 {
        self.checks.iter().map(|c| c.error).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn extend(&mut self, other: PropertyReport) {
        self.checks.extend(other.checks);
    }
}

/// `∫ C2 dC1` on the checkerboard of `C1`.
fn integral(c1: &CheckerboardCopula, c2: &Copula) -> f64 {
    c1.integrate(|u, v| c2.eval(u, v))
}

/// Checks symmetry of `Q`, invariance under survival, the sign change under
/// either reflection, and `∫ C2 dC1^σ + ∫ C2^σ dC1 = 1/2`, all on order-`n`
/// checkerboards with tolerance `8/n`.
pub fn verify_q_properties(c1: &Copula, c2: &Copula, n: usize) -> Result<PropertyReport> {
    let tol = CHECKERBOARD_ERROR / n as f64;
    let grid = |c: &Copula| c.to_checkerboard(n);
    let (g1, g2) = (grid(c1)?, grid(c2)?);
    let q12 = q_checkerboard(&g1, c2).value;
    let q21 = q_checkerboard(&g2, c1).value;

    let (h1, h2) = (c1.survival(), c2.survival());
    let q_hat = q_checkerboard(&grid(&h1)?, &h2).value;

    let mut checks = vec![
        PropertyCheck::new("Q1 symmetry", (q12 - q21).abs(), tol),
        PropertyCheck::new("Q3 survival", (q_hat - q12).abs(), tol),
    ];
    for (label, s1, s2) in [
        ("sigma1", c1.sigma1(), c2.sigma1()),
        ("sigma2", c1.sigma2(), c2.sigma2()),
    ] {
        let reflected = grid(&s1)?;
        let q_ref = q_checkerboard(&reflected, &s2).value;
        checks.push(PropertyCheck::new(
            format!("Q4 {label}"),
            (q_ref + q12).abs(),
            tol,
        ));
        let half = integral(&reflected, c2) + integral(&g1, &s2);
        checks.push(PropertyCheck::new(
            format!("reflection integrals {label}"),
            (half - 0.5).abs(),
            tol,
        ));
    }
    Ok(PropertyReport { checks })
}

fn params(a: f64, b: f64, c: f64) -> Result<BoundParams> {
    BoundParams::new(a, b, c)
}

fn reference(d: Partner) -> Copula {
    match d {
        Partner::W => Copula::w(),
        Partner::Pi => Copula::pi(),
        Partner::M => Copula::m(),
        Partner::SelfCopula => panic!("a reference copula is required"),
    }
}

/// `D^σ1` for a reference copula.
fn reflected(d: Partner) -> Partner {
    match d {
        Partner::W => Partner::M,
        Partner::M => Partner::W,
        other => other,
    }
}

/// `Q(D, bound)` by quadrature; `None` means the bound itself.
fn q_seg(d: Option<Partner>, p: BoundParams, which: Which) -> f64 {
    let own = crate::bounds::bound(p, which);
    let partner = d.map(reference).unwrap_or(own);
    q_segments(&partner, &support_of(p, which)).value
}

/// Checks the six families of identities relating `Q(D, bound)` and
/// `Q(bound, bound)` at `(a, b)` to the values at `(b, a)`,
/// `(1 − a, 1 − b)` and `(b, 1 − a)`; each in closed form and by quadrature.
pub fn verify_prop43(p: BoundParams, d: Partner) -> Result<PropertyReport> {
    let (a, b, c) = (p.a(), p.b(), p.c());
    let swapped = params(b, a, c)?;
    let mirrored = params(1.0 - a, 1.0 - b, c)?;
    let rotated = params(b, 1.0 - a, c)?;
    let dn = d.to_string();
    let ds = reflected(d);
    let (lo, up) = (Which::Lower, Which::Upper);

    // (name, closed lhs, closed rhs, segment lhs, segment rhs), rhs already signed
    type Row = (String, f64, f64, f64, f64);
    let mut rows: Vec<Row> = Vec::new();
    for (tag, q) in [("swap", swapped), ("mirror", mirrored)] {
        for which in [lo, up] {
            rows.push((
                format!("{tag} Q({dn}, {which:?})"),
                q_bound(d, &p, which),
                q_bound(d, &q, which),
                q_seg(Some(d), p, which),
                q_seg(Some(d), q, which),
            ));
            rows.push((
                format!("{tag} Q({which:?}, {which:?})"),
                q_bound(Partner::SelfCopula, &p, which),
                q_bound(Partner::SelfCopula, &q, which),
                q_seg(None, p, which),
                q_seg(None, q, which),
            ));
        }
    }
    for (which, other) in [(lo, up), (up, lo)] {
        rows.push((
            format!("reflect Q({dn}, {which:?})"),
            q_bound(d, &p, which),
            -q_bound(ds, &rotated, other),
            q_seg(Some(d), p, which),
            -q_seg(Some(ds), rotated, other),
        ));
        rows.push((
            format!("reflect Q({which:?}, {which:?})"),
            q_bound(Partner::SelfCopula, &p, which),
            -q_bound(Partner::SelfCopula, &rotated, other),
            q_seg(None, p, which),
            -q_seg(None, rotated, other),
        ));
    }

    let mut checks = Vec::with_capacity(2 * rows.len());
    for (name, cl, cr, sl, sr) in rows {
        checks.push(PropertyCheck::new(
            format!("{name} closed"),
            (cl - cr).abs(),
            CLOSED_TOL,
        ));
        checks.push(PropertyCheck::new(
            format!("{name} segments"),
            (sl - sr).abs(),
            SEGMENT_TOL,
        ));
        checks.push(PropertyCheck::new(
            format!("{name} oracle"),
            (cl - sl).abs(),
            SEGMENT_TOL,
        ));
    }
    Ok(PropertyReport { checks })
}
