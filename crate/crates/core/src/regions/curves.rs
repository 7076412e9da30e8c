//! Bounds `g(m) ≤ κ(C) ≤ h(m)` on each measure of concordance over copulas
//! with asymmetry `μ∞(C) = m`, and their inverses.

use std::io;

use crate::concordance::MeasureKind;
use crate::regions::triangle::{check_m, MAX_ASYMMETRY};
use crate::{Error, Result};

/// An exact rational breakpoint `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub const fn new(num: i64, den: i64) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `x ≤ num/den`, decided as `x·den ≤ num` so that the float nearest to
    /// the breakpoint lands on the expected side.
    pub fn ge(self, x: f64) -> bool {
        x * self.den as f64 <= self.num as f64
    }
}

const fn q(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// A polynomial `c0 + c1·m + c2·m² + c3·m³` valid for `m ≤ end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub end: Rational,
    pub coeffs: [f64; 4],
}

impl Piece {
    pub fn eval(&self, m: f64) -> f64 {
        let [c0, c1, c2, c3] = self.coeffs;
        c0 + m * (c1 + m * (c2 + m * c3))
    }
}

const fn piece(end: Rational, coeffs: [f64; 4]) -> Piece {
    Piece { end, coeffs }
}

const THIRD: Rational = q(1, 3);

/// Piecewise polynomial lower and upper boundaries of the attainable region
/// of one measure. Pieces are ordered and the last one ends at `1/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeCurve {
    pub kind: MeasureKind,
    pub lower_pieces: Vec<Piece>,
    pub upper_pieces: Vec<Piece>,
}

fn eval_pieces(pieces: &[Piece], m: f64) -> f64 {
    pieces
        .iter()
        .find(|p| p.end.ge(m))
        .unwrap_or(&pieces[pieces.len() - 1])
        .eval(m)
}

impl RangeCurve {
    pub fn of(kind: MeasureKind) -> Self {
        let (lower, upper): (Vec<Piece>, Vec<Piece>) = match kind {
            MeasureKind::Rho => (
                vec![piece(THIRD, [-1.0, 0.0, 0.0, 12.0])],
                vec![piece(THIRD, [1.0, 0.0, 0.0, -36.0])],
            ),
            MeasureKind::Tau => (
                vec![piece(THIRD, [-1.0, 0.0, 4.0, 0.0])],
                vec![piece(THIRD, [1.0, 0.0, -8.0, 0.0])],
            ),
            MeasureKind::Phi => (
                vec![
                    piece(q(1, 4), [-0.5, 0.0, 0.0, 0.0]),
                    piece(THIRD, [1.0, -12.0, 24.0, 0.0]),
                ],
                vec![piece(THIRD, [1.0, 0.0, -12.0, 0.0])],
            ),
            MeasureKind::Gamma => (
                vec![
                    piece(q(1, 4), [-1.0, 0.0, 4.0, 0.0]),
                    piece(THIRD, [0.0, -8.0, 20.0, 0.0]),
                ],
                vec![
                    piece(q(1, 6), [1.0, 0.0, -8.0, 0.0]),
                    piece(q(1, 5), [0.0, 12.0, -44.0, 0.0]),
                    piece(q(1, 4), [1.0, 2.0, -19.0, 0.0]),
                    piece(THIRD, [2.0, -6.0, -3.0, 0.0]),
                ],
            ),
            MeasureKind::Beta => (
                vec![
                    piece(q(1, 4), [-1.0, 0.0, 0.0, 0.0]),
                    piece(THIRD, [-3.0, 8.0, 0.0, 0.0]),
                ],
                vec![
                    piece(q(1, 6), [1.0, 0.0, 0.0, 0.0]),
                    piece(q(1, 4), [3.0, -12.0, 0.0, 0.0]),
                    piece(THIRD, [1.0, -4.0, 0.0, 0.0]),
                ],
            ),
        };
        Self {
            kind,
            lower_pieces: lower,
            upper_pieces: upper,
        }
    }

    pub fn lower(&self, m: f64) -> f64 {
        eval_pieces(&self.lower_pieces, m)
    }

    pub fn upper(&self, m: f64) -> f64 {
        eval_pieces(&self.upper_pieces, m)
    }

    /// Writes `m,lower,upper` at `resolution + 1` uniform values of `m` in
    /// `[0, 1/3]`.
    pub fn write_csv<W: io::Write>(&self, resolution: usize, out: W) -> Result<()> {
        let resolution = resolution.max(1);
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["m", "lower", "upper"])?;
        for k in 0..=resolution {
            let m = if k == resolution {
                MAX_ASYMMETRY
            } else {
                MAX_ASYMMETRY * k as f64 / resolution as f64
            };
            writer.write_record([m, self.lower(m), self.upper(m)].map(|x| format!("{x:.16e}")))?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// `(g(m), h(m))`: the range of `kind` over copulas with `μ∞ = m`.
pub fn range_of(kind: MeasureKind, m: f64) -> Result<(f64, f64)> {
    let m = check_m(m)?;
    let curve = RangeCurve::of(kind);
    Ok((curve.lower(m), curve.upper(m)))
}

/// One branch of an inverse: valid for `κ ≤ end`.
pub struct InversePiece {
    pub end: Rational,
    pub value: fn(f64) -> f64,
}

const fn inv(end: Rational, value: fn(f64) -> f64) -> InversePiece {
    InversePiece { end, value }
}

fn third(_: f64) -> f64 {
    1.0 / 3.0
}

/// The branches of the largest asymmetry compatible with a measure value.
pub fn inverse_pieces(kind: MeasureKind) -> &'static [InversePiece] {
    static RHO: [InversePiece; 3] = [
        inv(q(-5, 9), |r| ((1.0 + r) / 12.0).cbrt()),
        inv(q(-1, 3), third),
        inv(q(1, 1), |r| ((1.0 - r) / 36.0).cbrt()),
    ];
    static TAU: [InversePiece; 3] = [
        inv(q(-5, 9), |t| ((1.0 + t) / 4.0).sqrt()),
        inv(q(1, 9), third),
        inv(q(1, 1), |t| ((1.0 - t) / 8.0).sqrt()),
    ];
    static PHI: [InversePiece; 2] = [
        inv(q(-1, 3), |p| (3.0 + (3.0 + 6.0 * p).max(0.0).sqrt()) / 12.0),
        inv(q(1, 1), |p| ((1.0 - p) / 12.0).sqrt()),
    ];
    static GAMMA: [InversePiece; 7] = [
        inv(q(-3, 4), |g| (g + 1.0).sqrt() / 2.0),
        inv(q(-4, 9), |g| ((5.0 * g + 4.0).max(0.0).sqrt() + 2.0) / 10.0),
        inv(q(-1, 3), third),
        inv(q(5, 16), |g| ((15.0 - 3.0 * g).sqrt() - 3.0) / 3.0),
        inv(q(16, 25), |g| ((20.0 - 19.0 * g).sqrt() + 1.0) / 19.0),
        inv(q(7, 9), |g| ((9.0 - 11.0 * g).sqrt() + 3.0) / 22.0),
        inv(q(1, 1), |g| (2.0 - 2.0 * g).max(0.0).sqrt() / 4.0),
    ];
    static BETA: [InversePiece; 3] = [
        inv(q(-1, 3), |b| (3.0 + b) / 8.0),
        inv(q(0, 1), |b| (1.0 - b) / 4.0),
        inv(q(1, 1), |b| (3.0 - b) / 12.0),
    ];
    match kind {
        MeasureKind::Rho => &RHO,
        MeasureKind::Tau => &TAU,
        MeasureKind::Phi => &PHI,
        MeasureKind::Gamma => &GAMMA,
        MeasureKind::Beta => &BETA,
    }
}

/// The largest `μ∞(C)` over copulas with `κ(C) = kappa`. The bound is
/// attained.
pub fn max_asymmetry_given(kind: MeasureKind, kappa: f64) -> Result<f64> {
    let (lo, hi) = kind.global_range();
    if !(lo - 1e-12..=hi + 1e-12).contains(&kappa) {
        return Err(Error::MeasureOutOfRange {
            kind: kind.name(),
            value: kappa,
            lo,
            hi,
        });
    }
    let kappa = kappa.clamp(lo, hi);
    let pieces = inverse_pieces(kind);
    let branch = pieces
        .iter()
        .find(|p| p.end.ge(kappa))
        .unwrap_or(&pieces[pieces.len() - 1]);
    Ok((branch.value)(kappa))
}

/// Writes `kappa,mu_max` at `resolution + 1` uniform values over the
/// measure's global range.
pub fn write_inverse_csv<W: io::Write>(kind: MeasureKind, resolution: usize, out: W) -> Result<()> {
    let resolution = resolution.max(1);
    let (lo, hi) = kind.global_range();
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["kappa", "mu_max"])?;
    for k in 0..=resolution {
        let kappa = if k == resolution {
            hi
        } else {
            lo + (hi - lo) * k as f64 / resolution as f64
        };
        let mu = max_asymmetry_given(kind, kappa)?;
        writer.write_record([kappa, mu].map(|x| format!("{x:.16e}")))?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn endpoints_at_one_third() {
        let m = 1.0 / 3.0;
        let cases = [
            (MeasureKind::Rho, -5.0 / 9.0, -1.0 / 3.0),
            (MeasureKind::Tau, -5.0 / 9.0, 1.0 / 9.0),
            (MeasureKind::Phi, -1.0 / 3.0, -1.0 / 3.0),
            (MeasureKind::Gamma, -4.0 / 9.0, -1.0 / 3.0),
            (MeasureKind::Beta, -1.0 / 3.0, -1.0 / 3.0),
        ];
        for (kind, lo, hi) in cases {
            let (g, h) = range_of(kind, m).unwrap();
            assert_abs_diff_eq!(g, lo, epsilon = 1e-14);
            assert_abs_diff_eq!(h, hi, epsilon = 1e-14);
        }
    }

    #[test]
    fn interior_examples() {
        let (g, h) = range_of(MeasureKind::Gamma, 0.18).unwrap();
        assert_abs_diff_eq!(g, -0.8704, epsilon = 1e-14);
        assert_abs_diff_eq!(h, 0.7344, epsilon = 1e-14);
        let (g, h) = range_of(MeasureKind::Phi, 0.3).unwrap();
        assert_abs_diff_eq!(g, -0.44, epsilon = 1e-14);
        assert_abs_diff_eq!(h, -0.08, epsilon = 1e-14);
        assert_eq!(range_of(MeasureKind::Tau, 0.0).unwrap(), (-1.0, 1.0));
        assert!(range_of(MeasureKind::Tau, 0.34).is_err());
        assert!(range_of(MeasureKind::Tau, -0.01).is_err());
    }

    #[test]
    fn inverse_examples() {
        let at = |k, x| max_asymmetry_given(k, x).unwrap();
        assert_abs_diff_eq!(at(MeasureKind::Rho, -0.5), 1.0 / 3.0);
        assert_abs_diff_eq!(at(MeasureKind::Rho, 1.0), 0.0);
        assert_abs_diff_eq!(at(MeasureKind::Beta, 0.0), 0.25);
        assert_abs_diff_eq!(at(MeasureKind::Tau, 1.0), 0.0);
        assert_abs_diff_eq!(at(MeasureKind::Gamma, -0.75), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(at(MeasureKind::Gamma, 0.64), 0.2, epsilon = 1e-15);
        assert!(max_asymmetry_given(MeasureKind::Phi, -0.6).is_err());
        assert!(max_asymmetry_given(MeasureKind::Rho, 1.5).is_err());
    }

    #[test]
    fn csv_curve_has_requested_rows() {
        let mut buf = Vec::new();
        RangeCurve::of(MeasureKind::Gamma)
            .write_csv(333, &mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("m,lower,upper"));
        assert_eq!(text.lines().count(), 335);
    }
}
