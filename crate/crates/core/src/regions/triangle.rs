//! The parameter triangle `Δ_m` with vertices `R(m, 2m)`,
//! `U((1 − m)/2, (1 + m)/2)` and `T(m, 1 − m)`.

use std::fmt;

use crate::{Error, Result};

/// Slack on the inequalities defining `Δ_m`.
pub const TRIANGLE_TOL: f64 = 1e-12;

/// Largest asymmetry a copula can have.
pub const MAX_ASYMMETRY: f64 = 1.0 / 3.0;

/// Accepts `m ∈ [0, 1/3]`, clamping round-off at the ends.
pub(crate) fn check_m(m: f64) -> Result<f64> {
    if (-1e-12..=MAX_ASYMMETRY + 1e-12).contains(&m) {
        Ok(m.clamp(0.0, MAX_ASYMMETRY))
    } else {
        Err(Error::AsymmetryOutOfRange(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    R,
    U,
    T,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Vertex::R => "R",
            Vertex::U => "U",
            Vertex::T => "T",
        })
    }
}

/// A vertex or an edge of `Δ_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Point(Vertex),
    Segment(Vertex, Vertex),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Point(v) => write!(f, "point {v}"),
            Location::Segment(x, y) => write!(f, "segment {x}{y}"),
        }
    }
}

/// A point `(a, b)` of the triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrianglePoint {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleDomain {
    m: f64,
}

impl TriangleDomain {
    pub fn new(m: f64) -> Result<Self> {
        Ok(Self { m: check_m(m)? })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn vertex(&self, v: Vertex) -> TrianglePoint {
        let m = self.m;
        match v {
            Vertex::R => TrianglePoint { a: m, b: 2.0 * m },
            Vertex::U => TrianglePoint {
                a: 0.5 * (1.0 - m),
                b: 0.5 * (1.0 + m),
            },
            Vertex::T => TrianglePoint { a: m, b: 1.0 - m },
        }
    }

    /// `a ≥ m`, `b − a ≥ m`, `a + b ≤ 1`, each up to [`TRIANGLE_TOL`].
    pub fn contains(&self, a: f64, b: f64) -> bool {
        let m = self.m;
        a >= m - TRIANGLE_TOL && b - a >= m - TRIANGLE_TOL && a + b <= 1.0 + TRIANGLE_TOL
    }

    pub(crate) fn require(&self, a: f64, b: f64) -> Result<()> {
        if self.contains(a, b) {
            Ok(())
        } else {
            Err(Error::OutsideTriangle { a, b, m: self.m })
        }
    }

    /// Barycentric grid `(i·R + j·U + k·T)/n`, `i + j + k = n`. Vertices and
    /// edge points are produced from the exact vertex coordinates.
    pub fn grid(&self, n: usize) -> Vec<TrianglePoint> {
        let [r, u, t] = [Vertex::R, Vertex::U, Vertex::T].map(|v| self.vertex(v));
        let scale = n as f64;
        let mut points = Vec::with_capacity((n + 1) * (n + 2) / 2);
        for i in 0..=n {
            for j in 0..=(n - i) {
                let k = n - i - j;
                let point = if i == n {
                    r
                } else if j == n {
                    u
                } else if k == n {
                    t
                } else {
                    let (wi, wj, wk) = (i as f64 / scale, j as f64 / scale, k as f64 / scale);
                    TrianglePoint {
                        a: wi * r.a + wj * u.a + wk * t.a,
                        b: wi * r.b + wj * u.b + wk * t.b,
                    }
                };
                points.push(point);
            }
        }
        points
    }

    /// Distance from `p` to a vertex or edge.
    pub fn distance(&self, p: TrianglePoint, location: Location) -> f64 {
        match location {
            Location::Point(v) => {
                let q = self.vertex(v);
                (p.a - q.a).hypot(p.b - q.b)
            }
            Location::Segment(x, y) => {
                let (x, y) = (self.vertex(x), self.vertex(y));
                let (dx, dy) = (y.a - x.a, y.b - x.b);
                let len2 = dx * dx + dy * dy;
                let s = if len2 == 0.0 {
                    0.0
                } else {
                    (((p.a - x.a) * dx + (p.b - x.b) * dy) / len2).clamp(0.0, 1.0)
                };
                (p.a - x.a - s * dx).hypot(p.b - x.b - s * dy)
            }
        }
    }

    /// Longest edge divided by `n`: the spacing of the order-`n` grid.
    pub fn cell_size(&self, n: usize) -> f64 {
        let [r, u, t] = [Vertex::R, Vertex::U, Vertex::T].map(|v| self.vertex(v));
        let edge = |p: TrianglePoint, q: TrianglePoint| (p.a - q.a).hypot(p.b - q.b);
        edge(r, u).max(edge(u, t)).max(edge(t, r)) / n as f64
    }
}
