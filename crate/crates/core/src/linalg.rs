//! Fixed-size linear algebra over E⁵ and Minkowski E⁵₁.
//!
//! Timelike directions occupy the leading coordinates: the Lorentzian metric
//! is `diag(-1, 1, 1, 1, 1)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet;

pub type Vec5 = [f64; 5];
pub type Mat3 = [[f64; 3]; 3];

/// The flat ambient space together with the sign of the space form inside it.
///
/// `Sphere` is S⁴(1) ⊂ E⁵ (index 0, c = +1); `Hyperbolic` is H⁴(-1) ⊂ E⁵₁
/// (index 1, c = -1). The two-variant enum makes the index/curvature pairing
/// impossible to get wrong.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Sphere,
    Hyperbolic,
}

impl Ambient {
    /// Number of negative metric directions.
    pub fn index(self) -> usize {
        match self {
            Ambient::Sphere => 0,
            Ambient::Hyperbolic => 1,
        }
    }

    /// Sectional curvature of the space form.
    pub fn c(self) -> f64 {
        match self {
            Ambient::Sphere => 1.0,
            Ambient::Hyperbolic => -1.0,
        }
    }

    /// Diagonal entry `g_kk` of the ambient metric.
    pub fn eta(self, k: usize) -> f64 {
        if k < self.index() {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("metric is not positive definite (Cholesky pivot {pivot:e})")]
    NonPositiveDefiniteMetric { pivot: f64 },
}

/// Ring operations shared by `f64` and [`Jet`], so the same code computes
/// values and Taylor expansions.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// A constant with the same shape as `self`.
    fn lift(&self, v: f64) -> Self;
    fn value(&self) -> f64;
}

impl Scalar for f64 {
    fn lift(&self, v: f64) -> f64 {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
}

impl Scalar for Jet {
    fn lift(&self, v: f64) -> Jet {
        Jet::lift(self, v)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
}

/// Symmetric 3×3 matrix stored as its upper triangle
/// `[m00, m01, m02, m11, m12, m22]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMat3(pub [f64; 6]);

impl SymMat3 {
    pub fn from_full(m: &Mat3) -> Self {
        SymMat3([m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]])
    }

    pub fn diag(d: [f64; 3]) -> Self {
        SymMat3([d[0], 0.0, 0.0, d[1], 0.0, d[2]])
    }

    pub fn identity() -> Self {
        Self::diag([1.0; 3])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let k = match (i, j) {
            (0, 0) => 0,
            (0, 1) => 1,
            (0, 2) => 2,
            (1, 1) => 3,
            (1, 2) => 4,
            _ => 5,
        };
        self.0[k]
    }

    pub fn to_full(&self) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let m = self.to_full();
        mat_vec(&m, v)
    }

    pub fn quad(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        dot3(u, &self.apply(v))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let m = self.to_full();
        m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Signature inner product.
pub fn inner(u: &Vec5, v: &Vec5, amb: Ambient) -> f64 {
    inner_g(u, v, amb)
}

pub fn inner_g<T: Scalar>(u: &[T; 5], v: &[T; 5], amb: Ambient) -> T {
    let mut acc = u[0] * v[0];
    if amb.index() == 1 {
        acc = -acc;
    }
    for k in 1..5 {
        acc = acc + u[k] * v[k];
    }
    acc
}

fn det3_g<T: Scalar>(m: [[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn det4_g<T: Scalar>(m: [[T; 4]; 4]) -> T {
    let minor = |col: usize| -> T {
        let mut sub = [[m[1][0]; 3]; 3];
        for r in 0..3 {
            let mut c2 = 0;
            for c in 0..4 {
                if c == col {
                    continue;
                }
                sub[r][c2] = m[r + 1][c];
                c2 += 1;
            }
        }
        det3_g(sub)
    };
    m[0][0] * minor(0) - m[0][1] * minor(1) + m[0][2] * minor(2) - m[0][3] * minor(3)
}

/// Determinant of the 5×5 matrix with rows `rows`.
pub fn det5(rows: &[Vec5; 5]) -> f64 {
    let mut acc = 0.0;
    for k in 0..5 {
        let mut sub = [[0.0; 4]; 4];
        for r in 0..4 {
            let mut c2 = 0;
            for c in 0..5 {
                if c == k {
                    continue;
                }
                sub[r][c2] = rows[r + 1][c];
                c2 += 1;
            }
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * rows[0][k] * det4_g(sub);
    }
    acc
}

/// Generalized cross product: the unique `w` with `<w, u> = det[u; v1; v2; v3; v4]`
/// for every `u`. Zero when the inputs are linearly dependent.
pub fn cross4(v: &[Vec5; 4], amb: Ambient) -> Vec5 {
    cross4_g(v, amb)
}

pub fn cross4_g<T: Scalar>(v: &[[T; 5]; 4], amb: Ambient) -> [T; 5] {
    let mut out = [v[0][0]; 5];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut sub = [[v[0][0]; 4]; 4];
        for r in 0..4 {
            let mut c2 = 0;
            for c in 0..5 {
                if c == k {
                    continue;
                }
                sub[r][c2] = v[r][c];
                c2 += 1;
            }
        }
        let cof = det4_g(sub);
        // covariant cofactor, then raise the index
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 } * amb.eta(k);
        *slot = if sign > 0.0 { cof } else { -cof };
    }
    out
}

pub fn dot3(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

pub fn cross3(u: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

pub fn mat_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [dot3(&m[0], v), dot3(&m[1], v), dot3(&m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn det3(m: &Mat3) -> f64 {
    det3_g(*m)
}

/// Inverse via the adjugate; `None` for a singular matrix.
pub fn inverse3(m: &Mat3) -> Option<Mat3> {
    let d = det3(m);
    if !d.is_finite() || d.abs() < 1e-300 {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, e) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[a][c] * m[b][e] - m[a][e] * m[b][c]) / d;
        }
    }
    Some(inv)
}

fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = norm3(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Eigen-decomposition of the pencil `b v = k g v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen3 {
    /// Eigenvalues in descending order.
    pub values: [f64; 3],
    /// `vectors[i]` is a g-orthonormal eigenvector for `values[i]`.
    pub vectors: [[f64; 3]; 3],
}

fn cholesky3(g: &Mat3) -> Result<Mat3, LinalgError> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut sum = g[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(LinalgError::NonPositiveDefiniteMetric { pivot: sum });
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

fn lower_inverse(l: &Mat3) -> Mat3 {
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        inv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut sum = 0.0;
            for k in j..i {
                sum -= l[i][k] * inv[k][j];
            }
            inv[i][j] = sum / l[i][i];
        }
    }
    inv
}

/// Eigenvalues of a symmetric 3×3 matrix in descending order, by the
/// trigonometric closed form followed by one Newton step per root on the
/// characteristic polynomial.
pub fn symmetric_eigenvalues(c: &Mat3) -> [f64; 3] {
    let q = (c[0][0] + c[1][1] + c[2][2]) / 3.0;
    let p1 = c[0][1] * c[0][1] + c[0][2] * c[0][2] + c[1][2] * c[1][2];
    let p2 = (c[0][0] - q).powi(2) + (c[1][1] - q).powi(2) + (c[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let scale = c.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if p <= 1e-15 * scale || p == 0.0 {
        return [q; 3];
    }
    let mut bm = *c;
    for (i, row) in bm.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i == j {
                *v -= q;
            }
            *v /= p;
        }
    }
    let r = (det3(&bm) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + two_pi_3).cos();
    let l2 = 3.0 * q - l1 - l3;
    let mut vals = [l1, l2, l3];

    let tr = 3.0 * q;
    let m2 = c[0][0] * c[1][1] + c[0][0] * c[2][2] + c[1][1] * c[2][2]
        - c[0][1] * c[0][1]
        - c[0][2] * c[0][2]
        - c[1][2] * c[1][2];
    let det = det3(c);
    for v in vals.iter_mut() {
        let x = *v;
        let f = -x * x * x + tr * x * x - m2 * x + det;
        let df = -3.0 * x * x + 2.0 * tr * x - m2;
        // skip near-double roots where the step is ill-conditioned
        if df.abs() > 1e-8 * (1.0 + scale * scale) {
            let step = f / df;
            if step.abs() < 1e-6 * (1.0 + scale) {
                *v = x - step;
            }
        }
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

fn null_vector(c: &Mat3, lambda: f64) -> [f64; 3] {
    let mut m = *c;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let cands = [
        cross3(&m[0], &m[1]),
        cross3(&m[1], &m[2]),
        cross3(&m[2], &m[0]),
    ];
    let best = cands
        .iter()
        .max_by(|a, b| norm3(a).partial_cmp(&norm3(b)).unwrap())
        .copied()
        .unwrap();
    normalize3(best)
}

/// Any unit vector orthogonal to `v`.
fn orthogonal_unit(v: &[f64; 3]) -> [f64; 3] {
    let axis = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        [1.0, 0.0, 0.0]
    } else if v[1].abs() <= v[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    normalize3(cross3(v, &axis))
}

/// Orthonormal eigenpairs of a symmetric matrix, seeded by approximate
/// eigenvalues. The most isolated root fixes one eigenvector; the remaining
/// pair is resolved by an exact 2×2 rotation inside its orthogonal
/// complement, which stays accurate for clustered roots where the
/// characteristic-polynomial values lose half their digits.
fn symmetric_eigenpairs(c: &Mat3, approx: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let gap = |i: usize| -> f64 {
        (0..3)
            .filter(|&j| j != i)
            .map(|j| (approx[i] - approx[j]).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let iso = (0..3)
        .max_by(|&a, &b| gap(a).partial_cmp(&gap(b)).unwrap())
        .unwrap();
    let scale = approx.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let v = if gap(iso) > 1e-12 * scale {
        null_vector(c, approx[iso])
    } else {
        [1.0, 0.0, 0.0]
    };
    let p = orthogonal_unit(&v);
    let q = cross3(&v, &p);
    let cp = mat_vec(c, &p);
    let cq = mat_vec(c, &q);
    let (a, b, d) = (dot3(&p, &cp), dot3(&p, &cq), dot3(&q, &cq));
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b);
    let theta = 0.5 * b.atan2(half);
    let (cs, sn) = (theta.cos(), theta.sin());
    let w1 = [
        cs * p[0] + sn * q[0],
        cs * p[1] + sn * q[1],
        cs * p[2] + sn * q[2],
    ];
    let w2 = cross3(&v, &w1);
    let lv = dot3(&v, &mat_vec(c, &v));
    let mut pairs = [(lv, v), (mean + r, w1), (mean - r, w2)];
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    (
        [pairs[0].0, pairs[1].0, pairs[2].0],
        [pairs[0].1, pairs[1].1, pairs[2].1],
    )
}

/// Solves the generalized symmetric eigenproblem `b v = k g v` for positive
/// definite `g` via Cholesky reduction `g = L Lᵀ`.
pub fn generalized_eig3(g: &SymMat3, b: &SymMat3) -> Result<Eigen3, LinalgError> {
    let l = cholesky3(&g.to_full())?;
    let linv = lower_inverse(&l);
    let c = mat_mul(&mat_mul(&linv, &b.to_full()), &transpose(&linv));
    // symmetrize against roundoff
    let mut cs = c;
    for i in 0..3 {
        for j in 0..3 {
            cs[i][j] = 0.5 * (c[i][j] + c[j][i]);
        }
    }
    let approx = symmetric_eigenvalues(&cs);
    let (values, ys) = symmetric_eigenpairs(&cs, &approx);
    let lt_inv = transpose(&linv);
    let vectors = [
        mat_vec(&lt_inv, &ys[0]),
        mat_vec(&lt_inv, &ys[1]),
        mat_vec(&lt_inv, &ys[2]),
    ];
    Ok(Eigen3 { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: usize) -> Vec5 {
        let mut v = [0.0; 5];
        v[k] = 1.0;
        v
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&e(0), &e(0), Ambient::Hyperbolic), -1.0);
        assert_eq!(inner(&e(1), &e(1), Ambient::Hyperbolic), 1.0);
        assert_eq!(
            inner(
                &[1.0, 1.0, 0.0, 0.0, 0.0],
                &[1.0, -1.0, 0.0, 0.0, 0.0],
                Ambient::Hyperbolic
            ),
            -2.0
        );
        assert_eq!(inner(&e(0), &e(0), Ambient::Sphere), 1.0);
    }

    #[test]
    fn cross4_examples() {
        let basis = [e(1), e(2), e(3), e(4)];
        assert_eq!(cross4(&basis, Ambient::Sphere), e(0));
        assert_eq!(
            cross4(&basis, Ambient::Hyperbolic),
            [-1.0, 0.0, 0.0, 0.0, 0.0]
        );
        let dep = [e(1), e(1), e(3), e(4)];
        for amb in [Ambient::Sphere, Ambient::Hyperbolic] {
            assert!(cross4(&dep, amb).iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn cross4_defining_identity() {
        let v = [
            [0.3, -1.2, 0.5, 2.0, 0.1],
            [1.1, 0.4, -0.7, 0.2, 0.9],
            [-0.6, 0.8, 1.3, -0.4, 0.5],
            [0.2, 0.1, 0.3, 1.7, -1.0],
        ];
        let u = [0.7, -0.3, 0.9, 0.05, 1.4];
        for amb in [Ambient::Sphere, Ambient::Hyperbolic] {
            let w = cross4(&v, amb);
            let d = det5(&[u, v[0], v[1], v[2], v[3]]);
            assert!((inner(&w, &u, amb) - d).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_identity_metric() {
        let r = generalized_eig3(&SymMat3::identity(), &SymMat3::diag([2.0, 1.0, 0.0])).unwrap();
        for (k, want) in r.values.iter().zip([2.0, 1.0, 0.0]) {
            assert!((k - want).abs() < 1e-14);
        }
        for (i, v) in r.vectors.iter().enumerate() {
            assert!((v[i].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eig_pencil_identity() {
        let g = SymMat3::diag([4.0, 1.0, 1.0]);
        let r = generalized_eig3(&g, &g).unwrap();
        for k in r.values {
            assert!((k - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eig_family3_point() {
        let g = SymMat3::diag([0.25, 4.0, 4.0]);
        let b = SymMat3::diag([0.0, -2.0, 0.0]);
        let r = generalized_eig3(&g, &b).unwrap();
        assert!(
            r.values[0].abs() < 1e-14 && r.values[1].abs() < 1e-14,
            "{:?}",
            r.values
        );
        assert!((r.values[2] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_indefinite() {
        let g = SymMat3::diag([1.0, -1.0, 1.0]);
        assert!(matches!(
            generalized_eig3(&g, &SymMat3::identity()),
            Err(LinalgError::NonPositiveDefiniteMetric { .. })
        ));
    }
}
