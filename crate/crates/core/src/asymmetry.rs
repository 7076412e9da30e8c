//! Pointwise asymmetry, the maximal asymmetry function `d*` and the
//! asymmetry measure `μ∞(C) = max |C(u, v) − C(v, u)|`.
//!
//! `μ∞` is reported unnormalised, so its range is `[0, 1/3]`.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::copula::{Copula, UnitPoint};
use crate::{Error, Result};

/// Grid order used when callers have no preference.
pub const DEFAULT_MU_GRID: usize = 512;

/// Smallest accepted grid order for [`mu_infinity`].
pub const MIN_MU_GRID: usize = 8;

/// `d*(u, v) = min{u, v, 1 − u, 1 − v, |v − u|}`, the largest value of
/// `|C(u, v) − C(v, u)|` over all copulas.
pub fn d_star(p: UnitPoint) -> f64 {
    let UnitPoint { u, v } = p;
    u.min(v).min(1.0 - u).min(1.0 - v).min((v - u).abs())
}

/// Signed asymmetry `C(a, b) − C(b, a)`.
pub fn asymmetry_at(c: &Copula, a: f64, b: f64) -> f64 {
    c.eval(a, b) - c.eval(b, a)
}

/// Result of the certified grid maximisation behind [`mu_infinity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryResult {
    pub value: f64,
    /// Point with `u ≤ v` where `value` was found.
    pub argmax: UnitPoint,
    /// Half the grid step. Since `|C(u, v) − C(v, u)|` is 1-Lipschitz in
    /// each coordinate, the true maximum is at most `value + 2·radius`.
    pub certified_radius: f64,
}

impl AsymmetryResult {
    pub fn upper_bound(&self) -> f64 {
        self.value + 2.0 * self.certified_radius
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    u: f64,
    v: f64,
}

impl Candidate {
    /// Larger value wins; ties go to the lexicographically smaller point.
    fn better(self, other: Self) -> Self {
        match self.value.total_cmp(&other.value) {
            Ordering::Greater => self,
            Ordering::Less => other,
            Ordering::Equal => {
                if (self.u, self.v) <= (other.u, other.v) {
                    self
                } else {
                    other
                }
            }
        }
    }
}

fn candidate(c: &Copula, u: f64, v: f64) -> Candidate {
    Candidate {
        value: asymmetry_at(c, u, v).abs(),
        u,
        v,
    }
}

/// Maximises `|C(u, v) − C(v, u)|` over the grid `{i/n}` restricted to
/// `u < v`, then refines once on the half-step grid around the best node.
pub fn mu_infinity(c: &Copula, n: usize) -> Result<AsymmetryResult> {
    if n < MIN_MU_GRID {
        return Err(Error::GridTooSmall {
            n,
            min: MIN_MU_GRID,
        });
    }
    let step = 1.0 / n as f64;
    let start = Candidate {
        value: 0.0,
        u: 0.0,
        v: 0.0,
    };
    let coarse = (0..=n)
        .into_par_iter()
        .map(|i| {
            let u = i as f64 * step;
            ((i + 1)..=n)
                .map(|j| candidate(c, u, j as f64 * step))
                .fold(start, Candidate::better)
        })
        .reduce(|| start, Candidate::better);

    let half = 0.5 * step;
    let mut best = coarse;
    for du in -2..=2 {
        for dv in -2..=2 {
            let u = coarse.u + du as f64 * half;
            let v = coarse.v + dv as f64 * half;
            if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v) && u <= v {
                best = best.better(candidate(c, u, v));
            }
        }
    }
    Ok(AsymmetryResult {
        value: best.value,
        argmax: UnitPoint {
            u: best.u,
            v: best.v,
        },
        certified_radius: half,
    })
}
