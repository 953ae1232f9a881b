//! Plane and projective-line geometry for 2x2 real matrices.
//!
//! Directions in P¹ are stored as angles in `[0, π)`. Arcs are measured
//! counterclockwise, so the distance from `a` to `b` is `(b - a) mod π`.

use std::f64::consts::PI;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{CocycleError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit representative of the direction `theta`.
    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Projective coordinate of the line spanned by `self`.
    pub fn proj_angle(self) -> f64 {
        wrap_pi(self.y.atan2(self.x))
    }
}

/// Real 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from(r: [[f64; 2]; 2]) -> Self {
        Mat2::new(r[0][0], r[0][1], r[1][0], r[1][1])
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        m.rows()
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn diag(p: f64, q: f64) -> Self {
        Self::new(p, 0.0, 0.0, q)
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// Matrix with prescribed eigen-directions and eigenvalues, `Q diag(l1, l2) Q⁻¹`
    /// where the columns of `Q` are the unit vectors at `theta1` and `theta2`.
    pub fn from_eigen(theta1: f64, l1: f64, theta2: f64, l2: f64) -> Result<Self> {
        let u = Vec2::from_angle(theta1);
        let v = Vec2::from_angle(theta2);
        let q = Mat2::new(u.x, v.x, u.y, v.y);
        let qi = q.inverse()?;
        Ok(q * Mat2::diag(l1, l2) * qi)
    }

    pub fn rows(self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn transpose(self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }

    pub fn inverse(self) -> Result<Self> {
        let det = self.det();
        if det.abs() <= 1e-300 || !det.is_finite() {
            return Err(CocycleError::Domain("singular matrix has no inverse".into()));
        }
        Ok(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    /// Largest absolute entry, used to renormalise long products.
    pub fn max_abs(self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Reduce an angle to `[0, π)`.
pub fn wrap_pi(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Counterclockwise distance from `from` to `to` on P¹, in `[0, π)`.
pub fn ccw_dist(from: f64, to: f64) -> f64 {
    wrap_pi(to - from)
}

/// Singular values `(σ₁, σ₂)` with `σ₁ ≥ σ₂ ≥ 0`.
pub fn singular_values(m: Mat2) -> (f64, f64) {
    // σ₁ comes from the stable half-sum formula, σ₂ from |det| / σ₁.
    let p = m.a + m.d;
    let q = m.a - m.d;
    let r = m.b + m.c;
    let s = m.b - m.c;
    let s1 = 0.5 * (p.hypot(s) + q.hypot(r));
    if s1 == 0.0 {
        return (0.0, 0.0);
    }
    (s1, m.det().abs() / s1)
}

pub fn op_norm(m: Mat2) -> f64 {
    singular_values(m).0
}

/// Smallest singular value, `min |Mv|` over unit `v`.
pub fn mininorm(m: Mat2) -> Result<f64> {
    if m.det().abs() <= 1e-300 {
        return Err(CocycleError::Domain("mininorm of a singular matrix".into()));
    }
    Ok(singular_values(m).1)
}

pub fn hs_norm(m: Mat2) -> f64 {
    (m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d).sqrt()
}

/// Top singular pair: `m u = σ₁ v` with unit `u` (input) and `v` (output).
pub fn top_singular(m: Mat2) -> (f64, Vec2, Vec2) {
    let mtm = m.transpose() * m;
    let phi = 0.5 * (2.0 * mtm.b).atan2(mtm.a - mtm.d);
    let u = Vec2::from_angle(phi);
    let mu = m.apply(u);
    let s = mu.norm();
    if s == 0.0 {
        return (0.0, u, u);
    }
    (s, u, Vec2::new(mu.x / s, mu.y / s))
}

/// Action of `m` on P¹ in angle coordinates.
pub fn proj_act(m: Mat2, theta: f64) -> f64 {
    m.apply(Vec2::from_angle(theta)).proj_angle()
}

/// Unoriented angle between two directions, in `[0, π/2]`.
pub fn angle(theta: f64, phi: f64) -> f64 {
    let d = ccw_dist(theta, phi);
    d.min(PI - d)
}

/// `log(|Bv| / |v|)`.
pub fn log_gain(m: Mat2, v: Vec2) -> f64 {
    (m.apply(v).norm() / v.norm()).ln()
}

/// Derivative of the projective action of `b` at `v`: `|det b| (|bv|/|v|)⁻²`.
pub fn fiber_log_derivative(b: Mat2, v: Vec2) -> f64 {
    let g = b.apply(v).norm() / v.norm();
    b.det().abs() / (g * g)
}

/// Spectral radius from trace and determinant.
pub fn spectral_radius(m: Mat2) -> f64 {
    let t = m.trace();
    let det = m.det();
    let disc = t * t - 4.0 * det;
    if disc < 0.0 {
        return det.abs().sqrt();
    }
    // The root sharing the sign of the trace has the larger modulus.
    0.5 * (t.abs() + disc.sqrt())
}

/// Eigen-data of a matrix whose eigenvalues are real with distinct moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealEigen {
    /// Eigenvalue of larger modulus and its direction (attracting on P¹).
    pub lambda_hi: f64,
    pub dir_hi: f64,
    /// Eigenvalue of smaller modulus and its direction (repelling on P¹).
    pub lambda_lo: f64,
    pub dir_lo: f64,
}

pub fn real_eigen(m: Mat2) -> Option<RealEigen> {
    let t = m.trace();
    let det = m.det();
    let disc = t * t - 4.0 * det;
    if !(disc > 0.0) {
        return None;
    }
    let r = disc.sqrt();
    let hi = if t >= 0.0 { 0.5 * (t + r) } else { 0.5 * (t - r) };
    if hi == 0.0 {
        return None;
    }
    let lo = det / hi;
    if !(hi.abs() > lo.abs() * (1.0 + 1e-14)) {
        return None;
    }
    Some(RealEigen {
        lambda_hi: hi,
        dir_hi: eigvec(m, hi).proj_angle(),
        lambda_lo: lo,
        dir_lo: eigvec(m, lo).proj_angle(),
    })
}

fn eigvec(m: Mat2, l: f64) -> Vec2 {
    let v1 = Vec2::new(m.b, l - m.a);
    let v2 = Vec2::new(l - m.d, m.c);
    if v1.norm() >= v2.norm() {
        v1
    } else {
        v2
    }
}

/// Cross-ratio `[x₁, y₁; x₂, y₂] = (x₁×x₂)/(x₁×y₂) · (y₁×y₂)/(y₁×x₂)`.
///
/// Returns `+∞` when a denominator vanishes (below `1e-12` on unit
/// representatives); fails when three of the points coincide.
pub fn cross_ratio(x1: Vec2, y1: Vec2, x2: Vec2, y2: Vec2) -> Result<f64> {
    let pts = [x1, y1, x2, y2];
    if pts.iter().any(|p| !(p.norm() > 0.0)) {
        return Err(CocycleError::Degenerate("zero vector is not a point of P¹".into()));
    }
    let u: Vec<Vec2> = pts.iter().map(|p| p.normalized()).collect();
    let same = |i: usize, j: usize| u[i].cross(u[j]).abs() < 1e-12;
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        if same(i, j) && same(j, k) {
            return Err(CocycleError::Degenerate("three coincident points".into()));
        }
    }
    let den1 = u[0].cross(u[3]);
    let den2 = u[1].cross(u[2]);
    if den1.abs() < 1e-12 || den2.abs() < 1e-12 {
        return Ok(f64::INFINITY);
    }
    Ok((u[0].cross(u[2]) / den1) * (u[1].cross(u[3]) / den2))
}

/// Relative position of two geodesics `x₂→x₁` and `y₂→y₁` in the disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Configuration {
    Antiparallel,
    Coparallel,
    Crossing,
    Degenerate,
}

pub fn classify_configuration(cr: f64) -> Configuration {
    if !cr.is_finite() || cr == 0.0 || cr == 1.0 || cr.is_nan() {
        Configuration::Degenerate
    } else if cr < 0.0 {
        Configuration::Antiparallel
    } else if cr < 1.0 {
        Configuration::Coparallel
    } else {
        Configuration::Crossing
    }
}
