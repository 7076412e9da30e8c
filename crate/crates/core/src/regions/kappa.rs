//! Measures of the local bounds with `c = m` at points of `Δ_m`.
//!
//! On the triangle `W(a, b) = 0` and `M(a, b) = a`, so `d1 = m` and
//! `d2 = a − m`, and the general closed forms collapse to the short
//! expressions below.

use crate::concordance::closed::Case;
use crate::concordance::MeasureKind;
use crate::regions::triangle::TriangleDomain;
use crate::Result;

/// `Q(M, lower)` on `Δ_m`; only `b` and `m` matter there.
pub fn q_m_lower(m: f64, b: f64) -> f64 {
    if b >= m + 0.5 {
        0.0
    } else if b >= 0.5 * (1.0 + m) {
        (2.0 * m + 1.0 - 2.0 * b).powi(2)
    } else {
        m * (2.0 + 3.0 * m - 4.0 * b)
    }
}

/// `Q(W, upper)` on `Δ_m`.
pub fn q_w_upper(m: f64, a: f64, b: f64) -> f64 {
    if b <= 0.5 - m {
        0.0
    } else if b <= 0.5 - 0.5 * m {
        -(2.0 * b + 2.0 * m - 1.0).powi(2)
    } else if b <= 1.0 - a - m {
        -m * (4.0 * b + 3.0 * m - 2.0)
    } else {
        (a - 1.0).powi(2) + (b - 1.0).powi(2) + 2.0 * (a - m) * (b + m) - 1.0
    }
}

/// `lower(1/2, 1/2)` for `a ≤ b` and `c = m`.
pub fn lower_at_half(m: f64, a: f64, b: f64) -> f64 {
    if (a <= 0.5 && b <= 0.5) || (a >= 0.5 && b >= 0.5) {
        m
    } else if a + b >= 1.0 {
        (m + a - 0.5).max(0.0)
    } else {
        (m - b + 0.5).max(0.0)
    }
}

/// `upper(1/2, 1/2)` for `a ≤ b` and `c = m`.
pub fn upper_at_half(m: f64, a: f64, b: f64) -> f64 {
    if a - m <= 0.5 && 0.5 <= a {
        a - m
    } else if a <= 0.5 && 0.5 <= b {
        0.5 - m
    } else if b <= 0.5 && 0.5 <= b + m {
        1.0 - b - m
    } else {
        0.5
    }
}

/// `κ(lower^{(a, b)}_m)` for `(a, b) ∈ Δ_m`.
pub fn kappa_on_lower(kind: MeasureKind, a: f64, b: f64, m: f64) -> Result<f64> {
    TriangleDomain::new(m)?.require(a, b)?;
    let s = 1.0 - a - b + m;
    Ok(match kind {
        MeasureKind::Rho => 6.0 * m * s * (s + m) - 1.0,
        MeasureKind::Tau => 4.0 * m * s - 1.0,
        MeasureKind::Phi => 0.5 * (3.0 * q_m_lower(m, b) - 1.0),
        MeasureKind::Gamma => q_m_lower(m, b) + 4.0 * m * s - 1.0,
        MeasureKind::Beta => 4.0 * lower_at_half(m, a, b) - 1.0,
    })
}

/// `κ(upper^{(a, b)}_m)` for `(a, b) ∈ Δ_m`.
pub fn kappa_on_upper(kind: MeasureKind, a: f64, b: f64, m: f64) -> Result<f64> {
    TriangleDomain::new(m)?.require(a, b)?;
    let e = b - a + m;
    Ok(match kind {
        MeasureKind::Rho => 1.0 - 6.0 * m * (e + m) * e,
        MeasureKind::Tau => 1.0 - 4.0 * m * e,
        MeasureKind::Phi => 1.0 - 6.0 * m * e,
        MeasureKind::Gamma => 1.0 - 4.0 * m * e + q_w_upper(m, a, b),
        MeasureKind::Beta => 4.0 * upper_at_half(m, a, b) - 1.0,
    })
}

/// Variables of the boundary path below: `d` carries `m`.
fn path(m: f64, b: f64) -> crate::concordance::closed::CaseVars {
    crate::concordance::closed::CaseVars { a: 0.0, b, d: m }
}

/// `γ(upper^{(a, b)}_m)` along the boundary path `R → U → T`, parametrised
/// by `b`: on `RU` (`a = b − m`) for `b ≤ (1 + m)/2`, then on `UT`
/// (`a = 1 − b`). The branches meet at `b = 1/2 − m`, `1/2 − m/2`, `1/2`
/// and `(1 + m)/2`.
pub static GAMMA_UPPER_PATH: [Case; 5] = [
    Case {
        label: "b <= 1/2 - m",
        applies: |x, e| x.b <= 0.5 - x.d + e,
        value: |x| 1.0 - 8.0 * x.d * x.d,
    },
    Case {
        label: "b <= 1/2 - m/2",
        applies: |x, e| x.b <= 0.5 - 0.5 * x.d + e,
        value: |x| 1.0 - 8.0 * x.d * x.d - (2.0 * x.b + 2.0 * x.d - 1.0).powi(2),
    },
    Case {
        label: "b <= 1/2",
        applies: |x, e| x.b <= 0.5 + e,
        value: |x| 1.0 - 8.0 * x.d * x.d - x.d * (4.0 * x.b + 3.0 * x.d - 2.0),
    },
    Case {
        label: "b <= (1 + m)/2",
        applies: |x, e| x.b <= 0.5 * (1.0 + x.d) + e,
        value: |x| 1.0 - 8.0 * x.d * x.d + (2.0 * x.b + x.d - 1.0) * (2.0 * x.b - 3.0 * x.d - 1.0),
    },
    Case {
        label: "b >= (1 + m)/2",
        applies: |_, _| true,
        value: |x| 1.0 - 6.0 * x.d * (2.0 * x.b + x.d - 1.0),
    },
];

/// Branches of `Q(M, lower)` on `Δ_m` as a function of `b`, in the same
/// representation as [`GAMMA_UPPER_PATH`].
pub static Q_M_LOWER_TRIANGLE: [Case; 3] = [
    Case {
        label: "b >= m + 1/2",
        applies: |x, e| x.b + e >= x.d + 0.5,
        value: |_| 0.0,
    },
    Case {
        label: "(1 + m)/2 <= b <= m + 1/2",
        applies: |x, e| x.b + e >= 0.5 * (1.0 + x.d),
        value: |x| (2.0 * x.d + 1.0 - 2.0 * x.b).powi(2),
    },
    Case {
        label: "b <= (1 + m)/2",
        applies: |_, _| true,
        value: |x| x.d * (2.0 + 3.0 * x.d - 4.0 * x.b),
    },
];

/// Evaluates [`GAMMA_UPPER_PATH`] at `b`.
pub fn gamma_upper_on_path(m: f64, b: f64) -> f64 {
    crate::concordance::closed::eval_cases(&GAMMA_UPPER_PATH, path(m, b))
}
