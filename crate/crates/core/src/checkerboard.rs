//! Checkerboard copulas: piecewise-uniform mass on an `n × n` grid.
//!
//! They serve as the brute-force substrate for integrals against arbitrary
//! copulas. Cell masses are obtained from a cumulative function by
//! inclusion–exclusion, which is exact for singular piecewise-linear copulas.

use std::io;

use rayon::prelude::*;

use crate::copula::Copula;
use crate::{Error, Result};

/// Tolerance on row/column sums and on negative round-off in cell masses.
pub const MASS_TOL: f64 = 1e-10;

/// An `n × n` checkerboard copula; `mass[i * n + j]` is the mass of the cell
/// `[i/n, (i+1)/n] × [j/n, (j+1)/n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckerboardCopula {
    n: usize,
    mass: Vec<f64>,
    /// Cumulative sums at the `(n + 1)²` grid nodes.
    cumulative: Vec<f64>,
}

impl CheckerboardCopula {
    /// Validates non-negativity and uniform margins.
    pub fn new(n: usize, mass: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::GridTooSmall { n, min: 1 });
        }
        if mass.len() != n * n {
            return Err(Error::InvalidCheckerboard(format!(
                "expected {} masses, got {}",
                n * n,
                mass.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let value = mass[i * n + j];
                if value.is_nan() || value < 0.0 {
                    return Err(Error::NegativeMass { i, j, mass: value });
                }
            }
        }
        let grid = Self::from_masses_unchecked(n, mass);
        let target = 1.0 / n as f64;
        let (rows, cols) = (grid.row_sums(), grid.col_sums());
        for (k, (r, c)) in rows.iter().zip(&cols).enumerate() {
            if (r - target).abs() > MASS_TOL || (c - target).abs() > MASS_TOL {
                return Err(Error::InvalidCheckerboard(format!(
                    "margin {k}: row sum {r}, column sum {c}, expected {target}"
                )));
            }
        }
        Ok(grid)
    }

    /// Skips all validation. Used to build deliberately broken grids.
    pub fn from_masses_unchecked(n: usize, mass: Vec<f64>) -> Self {
        let side = n + 1;
        let mut cumulative = vec![0.0; side * side];
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += mass[i * n + j];
                cumulative[(i + 1) * side + j + 1] = cumulative[i * side + j + 1] + row;
            }
        }
        Self {
            n,
            mass,
            cumulative,
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.n + j]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.mass
            .chunks(self.n)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.mass(i, j)).sum())
            .collect()
    }

    /// The induced copula: bilinear interpolation of the node cumulatives.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let n = self.n;
        let scale = n as f64;
        let (x, y) = (u.clamp(0.0, 1.0) * scale, v.clamp(0.0, 1.0) * scale);
        let i = (x.floor() as usize).min(n - 1);
        let j = (y.floor() as usize).min(n - 1);
        let (fx, fy) = (x - i as f64, y - j as f64);
        let side = n + 1;
        let at = |p: usize, q: usize| self.cumulative[p * side + q];
        let bottom = at(i, j) * (1.0 - fx) + at(i + 1, j) * fx;
        let top = at(i, j + 1) * (1.0 - fx) + at(i + 1, j + 1) * fx;
        bottom * (1.0 - fy) + top * fy
    }

    /// `Σ mass(i, j) · f(cell centre)`. Rows are summed in parallel and then
    /// combined in order, so the result does not depend on thread count.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let n = self.n;
        let h = 1.0 / n as f64;
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let u = (i as f64 + 0.5) * h;
                (0..n)
                    .map(|j| {
                        let cell = self.mass[i * n + j];
                        if cell == 0.0 {
                            0.0
                        } else {
                            cell * f(u, (j as f64 + 0.5) * h)
                        }
                    })
                    .sum()
            })
            .collect();
        rows.iter().sum()
    }

    /// Writes `n` on the first line, then one line of masses per `u`-cell.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(out);
        writer.write_record([self.n.to_string()])?;
        for row in self.mass.chunks(self.n) {
            writer.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut records = reader.records();
        let header = records
            .next()
            .ok_or_else(|| Error::InvalidCheckerboard("empty input".into()))??;
        let n: usize = header
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::InvalidCheckerboard("first line must hold n".into()))?;
        let mut mass = Vec::with_capacity(n * n);
        for record in records {
            let record = record?;
            if record.len() != n {
                return Err(Error::InvalidCheckerboard(format!(
                    "row has {} entries, expected {n}",
                    record.len()
                )));
            }
            for field in record.iter() {
                let x: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidCheckerboard(format!("not a number: {field:?}")))?;
                mass.push(x);
            }
        }
        Self::new(n, mass)
    }
}

/// Discretises `c` on an `n × n` grid. Cell masses are the `c`-volumes of
/// the cells; round-off negatives down to `−1e-10` are set to zero, anything
/// below is reported as a 2-increasingness violation.
pub fn to_checkerboard(c: &Copula, n: usize) -> Result<CheckerboardCopula> {
    if n < 2 {
        return Err(Error::GridTooSmall { n, min: 2 });
    }
    let h = 1.0 / n as f64;
    let node = |k: usize| if k == n { 1.0 } else { k as f64 * h };
    let values: Vec<Vec<f64>> = (0..=n)
        .into_par_iter()
        .map(|i| (0..=n).map(|j| c.eval(node(i), node(j))).collect())
        .collect();
    let mut mass = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let volume = values[i + 1][j + 1] - values[i + 1][j] - values[i][j + 1] + values[i][j];
            if volume < -MASS_TOL {
                return Err(Error::NegativeMass { i, j, mass: volume });
            }
            mass[i * n + j] = volume.max(0.0);
        }
    }
    CheckerboardCopula::new(n, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{support_of, BoundParams, Which};
    use crate::copula::grid_nodes;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_is_uniform() {
        let n = 16;
        let g = to_checkerboard(&Copula::pi(), n).unwrap();
        for &x in g.masses() {
            assert_abs_diff_eq!(x, 1.0 / (n * n) as f64, epsilon = 1e-15);
        }
    }

    #[test]
    fn upper_frechet_is_diagonal() {
        let n = 12;
        let g = to_checkerboard(&Copula::m(), n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 / n as f64 } else { 0.0 };
                assert_abs_diff_eq!(g.mass(i, j), want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn lower_bound_mass_sits_on_support() {
        let p = BoundParams::new(0.4, 0.6, 0.1).unwrap();
        let g = to_checkerboard(&Copula::lower(p), 10).unwrap();
        let total: f64 = g.masses().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        // every charged cell is crossed by a support segment
        let support = support_of(p, Which::Lower);
        for i in 0..10 {
            for j in 0..10 {
                if g.mass(i, j) > 1e-12 {
                    let (u0, u1) = (i as f64 / 10.0, (i + 1) as f64 / 10.0);
                    let (v0, v1) = (j as f64 / 10.0, (j + 1) as f64 / 10.0);
                    let hit = support.segments.iter().any(|s| {
                        let lo = s.u_start.max(u0);
                        let hi = s.u_end.min(u1);
                        lo < hi && {
                            let (y0, y1) = (s.map(lo), s.map(hi));
                            y0.min(y1) <= v1 && y0.max(y1) >= v0
                        }
                    });
                    assert!(hit, "cell ({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn cumulative_converges() {
        let p = BoundParams::new(0.3, 0.55, 0.2).unwrap();
        for c in [Copula::lower(p), Copula::upper(p).sigma1(), Copula::pi()] {
            for n in [16, 64, 256] {
                let g = to_checkerboard(&c, n).unwrap();
                let mut worst: f64 = 0.0;
                for &u in &grid_nodes(101) {
                    for &v in &grid_nodes(101) {
                        worst = worst.max((g.eval(u, v) - c.eval(u, v)).abs());
                    }
                }
                assert!(worst <= 1.0 / n as f64, "{c} n = {n}: {worst}");
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let g =
            to_checkerboard(&Copula::lower(BoundParams::new(0.4, 0.6, 0.1).unwrap()), 8).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next(), Some("8"));
        assert_eq!(text.lines().count(), 9);
        let back = CheckerboardCopula::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.masses(), g.masses());
    }

    #[test]
    fn rejects_bad_margins_and_negative_cells() {
        assert!(matches!(
            CheckerboardCopula::new(2, vec![0.5, 0.0, 0.0, 0.4]),
            Err(Error::InvalidCheckerboard(_))
        ));
        assert!(matches!(
            CheckerboardCopula::new(2, vec![0.6, -0.1, -0.1, 0.6]),
            Err(Error::NegativeMass { .. })
        ));
    }
}
