//! Pointwise extrinsic geometry of a chart: fundamental forms, shape
//! operator, principal curvatures and the residuals of the structure
//! equations.

pub mod frame;
pub mod intrinsic;
pub mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charts::{Chart, ChartError, FlatSurface, Point3};
use crate::jet::{Jet, JetError};
use crate::linalg::{
    cross4_g, generalized_eig3, inner_g, mat_vec, Ambient, Eigen3, LinalgError, Mat3, SymMat3, Vec5,
};
use intrinsic::{christoffel_values, JetMat, MetricJets};

pub use frame::{
    connection_forms, gauss_relation_along_e1, transverse_derivative_check, ConnectionForms,
    FrameSource, GaussAlongE1,
};
pub use report::{sweep, GridSpec, ResidualReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("coordinate tangents are dependent at {point:?}")]
    DegenerateTangents { point: Vec<f64> },
    #[error("normal vector is not spacelike (square norm {norm2:e})")]
    NormalNullVector { norm2: f64 },
    #[error("mean curvature gradient vanishes (|grad H| = {grad:e}); curvatures are unordered")]
    UnorderedCurvatures { grad: f64 },
    #[error("principal curvatures repeat (gap {gap:e}); the principal frame is not unique")]
    RepeatedCurvature { gap: f64 },
}

/// Numerical thresholds shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Below this `|∇H|` the curvatures are reported unordered.
    pub grad: f64,
    /// Curvature gap below which the principal frame is treated as repeated.
    pub repeated: f64,
    /// Step of the central differences applied to frames and curvatures.
    pub fd_step: f64,
    /// Step of the outer difference along `e₁` in the Gauss relation check.
    pub outer_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            grad: 1e-8,
            repeated: 1e-6,
            fd_step: 1e-5,
            outer_step: 1e-3,
        }
    }
}

/// Deliberate perturbation of one entry of the second fundamental form,
/// `b_ij += amount · (1 + (v - v₀))` where `v` is chart coordinate
/// `slope_axis`. Only used as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    pub entry: (usize, usize),
    pub amount: f64,
    pub slope_axis: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Engine {
    pub tol: Tolerances,
    pub corruption: Option<Corruption>,
}

/// Jets of everything the checks need at one chart point.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: Point3,
    pub ambient: Ambient,
    /// Chart coordinates, at the evaluation order.
    pub x: [Jet; 5],
    /// First partials, one order lower.
    pub dx: [[Jet; 5]; 3],
    pub metric: MetricJets,
    /// Unit normal, one order lower than `x`.
    pub normal: [Jet; 5],
    /// Second fundamental form, two orders lower than `x`.
    pub b: JetMat,
}

fn zero_mat(j: &Jet) -> JetMat {
    [[j.lift(0.0); 3]; 3]
}

impl LocalGeometry {
    pub fn new(
        chart: &Chart,
        p: &Point3,
        order: usize,
        corruption: Option<&Corruption>,
        checked: bool,
    ) -> Result<Self, ShapeError> {
        assert!((2..=3).contains(&order));
        let x = if checked {
            chart.eval(p, order)?
        } else {
            chart.eval_unchecked(p, order)?
        };
        let dx = [0, 1, 2].map(|i| x.map(|c| c.derivative(i)));
        let mut g = zero_mat(&dx[0][0]);
        for i in 0..3 {
            for j in i..3 {
                g[i][j] = inner_g(&dx[i], &dx[j], chart.ambient);
                g[j][i] = g[i][j];
            }
        }
        let metric = MetricJets::new(3, [0, 1, 2], g);
        let gv = g.map(|r| r.map(|j| j.value()));
        let det = metric.det().value();
        let diag = gv[0][0].abs() * gv[1][1].abs() * gv[2][2].abs();
        if !(det > 1e-14 * diag) || diag == 0.0 {
            return Err(ShapeError::DegenerateTangents { point: p.to_vec() });
        }
        let xt = x.map(|c| c.truncate(order - 1));
        let w = cross4_g(&[dx[0], dx[1], dx[2], xt], chart.ambient);
        let w2 = inner_g(&w, &w, chart.ambient);
        if w2.value() <= 0.0 {
            return Err(ShapeError::NormalNullVector { norm2: w2.value() });
        }
        let scale = w2.sqrt()?.recip()? * chart.normal_sign;
        let normal = w.map(|c| c * scale);
        let nt = normal.map(|c| c.truncate(order - 2));
        let mut b = zero_mat(&nt[0]);
        for i in 0..3 {
            for j in i..3 {
                let ddx = dx[i].map(|c| c.derivative(j));
                b[i][j] = inner_g(&ddx, &nt, chart.ambient);
                b[j][i] = b[i][j];
            }
        }
        if let Some(c) = corruption {
            let (i, j) = c.entry;
            let v = Jet::variable(p[c.slope_axis], c.slope_axis, 3, order - 2);
            let bump = (v - p[c.slope_axis] + 1.0) * c.amount;
            b[i][j] = b[i][j] + bump;
            if i != j {
                b[j][i] = b[j][i] + bump;
            }
        }
        Ok(LocalGeometry {
            point: *p,
            ambient: chart.ambient,
            x,
            dx,
            metric,
            normal,
            b,
        })
    }

    pub fn order(&self) -> usize {
        self.x[0].order()
    }

    pub fn g_values(&self) -> Mat3 {
        self.metric.g.map(|r| r.map(|j| j.value()))
    }

    pub fn b_values(&self) -> Mat3 {
        self.b.map(|r| r.map(|j| j.value()))
    }

    /// Shape operator `S = g⁻¹ b` as jets of the same order as `b`.
    pub fn shape_operator(&self) -> Result<JetMat, ShapeError> {
        let ord = self.b[0][0].order();
        let ginv = self.metric.inverse()?.map(|r| r.map(|j| j.truncate(ord)));
        let mut s = zero_mat(&self.b[0][0]);
        for a in 0..3 {
            for c in 0..3 {
                let mut acc = s[a][c];
                for m in 0..3 {
                    acc = acc + ginv[a][m] * self.b[m][c];
                }
                s[a][c] = acc;
            }
        }
        Ok(s)
    }

    /// Numeric generalized eigen-decomposition of `(g, b)`.
    pub fn eigen(&self) -> Result<Eigen3, ShapeError> {
        Ok(generalized_eig3(
            &SymMat3::from_full(&self.g_values()),
            &SymMat3::from_full(&self.b_values()),
        )?)
    }
}

/// Pointwise package of extrinsic data.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeData {
    pub point: Point3,
    pub ambient: Ambient,
    pub x: Vec5,
    pub tangents: [Vec5; 3],
    pub normal: Vec5,
    pub g: SymMat3,
    pub g_inv: SymMat3,
    pub b: SymMat3,
    /// `s_op[a][c]` is `S^a_c`.
    pub s_op: Mat3,
    /// Principal curvatures in semantic order when `ordered`.
    pub k: [f64; 3],
    /// `frame[i]` holds the coordinate components of `e_{i+1}`.
    pub frame: [[f64; 3]; 3],
    pub h: f64,
    /// Partials of `H` along the chart coordinates.
    pub dh: [f64; 3],
    /// Coordinate components of `∇H = g⁻¹ dH`.
    pub grad_h: [f64; 3],
    pub grad_norm: f64,
    pub ordered: bool,
}

fn g_dot(g: &Mat3, u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let gv = mat_vec(g, v);
    u[0] * gv[0] + u[1] * gv[1] + u[2] * gv[2]
}

fn axpy(a: f64, x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

fn scale3(a: f64, x: &[f64; 3]) -> [f64; 3] {
    [a * x[0], a * x[1], a * x[2]]
}

fn g_normalize(g: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    scale3(1.0 / g_dot(g, v, v).sqrt(), v)
}

/// Makes the largest component of `v` positive.
fn canonical_sign(v: [f64; 3]) -> [f64; 3] {
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
        .unwrap();
    if big < 0.0 {
        scale3(-1.0, &v)
    } else {
        v
    }
}

/// Semantic labeling of the principal frame: `e₁` is the principal
/// direction along `∇H` (rotated inside a repeated eigenspace towards the
/// projection of `∇H`), oriented with `e₁(H) > 0`; `e₂`, `e₃` follow in
/// descending curvature. Without a usable gradient the numeric order is
/// kept and the result is flagged unordered.
fn label_frame(
    eig: &Eigen3,
    g: &Mat3,
    b: &Mat3,
    dh: &[f64; 3],
    grad_norm: f64,
    tol: &Tolerances,
) -> ([f64; 3], [[f64; 3]; 3], bool) {
    let v = eig.vectors;
    if grad_norm.is_nan() || grad_norm <= tol.grad {
        return (eig.values, v.map(canonical_sign), false);
    }
    let align = |i: usize| (v[i][0] * dh[0] + v[i][1] * dh[1] + v[i][2] * dh[2]).abs();
    let i1 = (0..3)
        .max_by(|&a, &b| align(a).partial_cmp(&align(b)).unwrap())
        .unwrap();
    let kscale = 1.0 + eig.values.iter().fold(0.0f64, |a, k| a.max(k.abs()));
    let cluster: Vec<usize> = (0..3)
        .filter(|&j| (eig.values[j] - eig.values[i1]).abs() < tol.repeated * kscale)
        .collect();
    let mut e1 = [0.0; 3];
    for &m in &cluster {
        let c = v[m][0] * dh[0] + v[m][1] * dh[1] + v[m][2] * dh[2];
        e1 = axpy(c, &v[m], &e1);
    }
    let e1 = g_normalize(g, &e1);
    let mut rest: Vec<[f64; 3]> = Vec::new();
    for &m in &cluster {
        let mut w = axpy(-g_dot(g, &v[m], &e1), &e1, &v[m]);
        for r in &rest {
            w = axpy(-g_dot(g, &w, r), r, &w);
        }
        if g_dot(g, &w, &w) > 0.25 {
            rest.push(g_normalize(g, &w));
        }
    }
    rest.truncate(cluster.len() - 1);
    for j in 0..3 {
        if !cluster.contains(&j) {
            rest.push(v[j]);
        }
    }
    let rayleigh = |e: &[f64; 3]| g_dot(b, e, e);
    let mut others: Vec<(f64, [f64; 3])> = rest.iter().map(|e| (rayleigh(e), *e)).collect();
    others.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let e1h = e1[0] * dh[0] + e1[1] * dh[1] + e1[2] * dh[2];
    let e1 = if e1h < 0.0 { scale3(-1.0, &e1) } else { e1 };
    (
        [rayleigh(&e1), others[0].0, others[1].0],
        [e1, canonical_sign(others[0].1), canonical_sign(others[1].1)],
        true,
    )
}

impl Engine {
    pub fn new(tol: Tolerances) -> Self {
        Engine {
            tol,
            corruption: None,
        }
    }

    pub fn with_corruption(mut self, c: Corruption) -> Self {
        self.corruption = Some(c);
        self
    }

    pub fn local(
        &self,
        chart: &Chart,
        p: &Point3,
        order: usize,
    ) -> Result<LocalGeometry, ShapeError> {
        LocalGeometry::new(chart, p, order, self.corruption.as_ref(), true)
    }

    pub(crate) fn local_unchecked(
        &self,
        chart: &Chart,
        p: &Point3,
        order: usize,
    ) -> Result<LocalGeometry, ShapeError> {
        LocalGeometry::new(chart, p, order, self.corruption.as_ref(), false)
    }

    /// Full extrinsic data at `p`, including `∇H` from third-order jets.
    pub fn shape_data(&self, chart: &Chart, p: &Point3) -> Result<ShapeData, ShapeError> {
        let geo = self.local(chart, p, 3)?;
        self.shape_from_local(&geo)
    }

    pub(crate) fn shape_data_unchecked(
        &self,
        chart: &Chart,
        p: &Point3,
    ) -> Result<ShapeData, ShapeError> {
        let geo = self.local_unchecked(chart, p, 3)?;
        self.shape_from_local(&geo)
    }

    pub fn shape_from_local(&self, geo: &LocalGeometry) -> Result<ShapeData, ShapeError> {
        let s_jet = geo.shape_operator()?;
        let h_jet = (s_jet[0][0] + s_jet[1][1] + s_jet[2][2]) * (1.0 / 3.0);
        let g = geo.g_values();
        let b = geo.b_values();
        let g_inv = geo.metric.inverse()?.map(|r| r.map(|j| j.value()));
        let dh = if geo.order() >= 3 {
            h_jet.gradient()
        } else {
            [f64::NAN; 3]
        };
        let grad_h = mat_vec(&g_inv, &dh);
        let grad_norm = (grad_h[0] * dh[0] + grad_h[1] * dh[1] + grad_h[2] * dh[2])
            .max(0.0)
            .sqrt();
        let eig = geo.eigen()?;
        let (k, frame, ordered) = label_frame(&eig, &g, &b, &dh, grad_norm, &self.tol);
        Ok(ShapeData {
            point: geo.point,
            ambient: geo.ambient,
            x: geo.x.map(|j| j.value()),
            tangents: geo.dx.map(|d| d.map(|j| j.value())),
            normal: geo.normal.map(|j| j.value()),
            g: SymMat3::from_full(&g),
            g_inv: SymMat3::from_full(&g_inv),
            b: SymMat3::from_full(&b),
            s_op: s_jet.map(|r| r.map(|j| j.value())),
            k,
            frame,
            h: h_jet.value(),
            dh,
            grad_h,
            grad_norm,
            ordered,
        })
    }

    /// `∇H` (coordinate components) and its length.
    pub fn mean_curvature_gradient(
        &self,
        chart: &Chart,
        p: &Point3,
    ) -> Result<([f64; 3], f64), ShapeError> {
        let sd = self.shape_data(chart, p)?;
        Ok((sd.grad_h, sd.grad_norm))
    }

    /// `|S(∇H) + (3H/2)∇H|_g` and its normalized form.
    pub fn biconservative_residual(
        &self,
        chart: &Chart,
        p: &Point3,
    ) -> Result<(f64, f64), ShapeError> {
        Ok(self.shape_data(chart, p)?.biconservative_residual())
    }

    pub fn trace_rule_residual(&self, chart: &Chart, p: &Point3) -> Result<f64, ShapeError> {
        self.shape_data(chart, p)?.trace_rule_residual()
    }

    /// `max |(∇̄_i b)_jk - (∇̄_j b)_ik|` over all index triples.
    pub fn codazzi_residual(&self, chart: &Chart, p: &Point3) -> Result<f64, ShapeError> {
        let geo = self.local(chart, p, 3)?;
        let gam = christoffel_values(&geo.metric.christoffel()?);
        let bv = geo.b_values();
        let db = |i: usize, j: usize, k: usize| geo.b[j][k].gradient()[i];
        let cov = |i: usize, j: usize, k: usize| {
            let mut r = db(i, j, k);
            for m in 0..3 {
                r -= gam[m][i][j] * bv[m][k] + gam[m][i][k] * bv[j][m];
            }
            r
        };
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    worst = worst.max((cov(i, j, k) - cov(j, i, k)).abs());
                }
            }
        }
        Ok(worst)
    }

    /// `max |R_ijkw - c(g_jk g_iw - g_ik g_jw) - (b_jk b_iw - b_ik b_jw)|`,
    /// with the intrinsic tensor computed from the metric jets alone.
    pub fn gauss_residual(&self, chart: &Chart, p: &Point3) -> Result<f64, ShapeError> {
        let geo = self.local(chart, p, 3)?;
        let r = geo.metric.riemann()?;
        let g = geo.g_values();
        let b = geo.b_values();
        let c = chart.ambient.c();
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for w in 0..3 {
                        let model = c * (g[j][k] * g[i][w] - g[i][k] * g[j][w]) + b[j][k] * b[i][w]
                            - b[i][k] * b[j][w];
                        worst = worst.max((r[i][j][k][w] - model).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Sectional curvature of the coordinate plane `(i, j)`.
    pub fn sectional_curvature(
        &self,
        chart: &Chart,
        p: &Point3,
        i: usize,
        j: usize,
    ) -> Result<f64, ShapeError> {
        let geo = self.local(chart, p, 3)?;
        let r = geo.metric.riemann()?;
        let g = geo.g_values();
        Ok(r[i][j][j][i] / (g[i][i] * g[j][j] - g[i][j] * g[i][j]))
    }
}

impl ShapeData {
    pub fn g_full(&self) -> Mat3 {
        self.g.to_full()
    }

    pub fn g_norm(&self, v: &[f64; 3]) -> f64 {
        g_dot(&self.g_full(), v, v).max(0.0).sqrt()
    }

    /// Length of the shape operator, `sqrt(Σ k_i²)`.
    pub fn s_norm(&self) -> f64 {
        self.k.iter().map(|k| k * k).sum::<f64>().sqrt()
    }

    /// Returns `(|S(∇H) + (3H/2)∇H|_g, same / ((1 + |S|)(1 + |∇H|)))`.
    pub fn biconservative_residual(&self) -> (f64, f64) {
        let sg = mat_vec(&self.s_op, &self.grad_h);
        let v = axpy(1.5 * self.h, &self.grad_h, &sg);
        let r = self.g_norm(&v);
        (r, r / ((1.0 + self.s_norm()) * (1.0 + self.grad_norm)))
    }

    /// `|3k₁ + k₂ + k₃|`; needs ordered curvatures.
    pub fn trace_rule_residual(&self) -> Result<f64, ShapeError> {
        if !self.ordered {
            return Err(ShapeError::UnorderedCurvatures {
                grad: self.grad_norm,
            });
        }
        Ok((3.0 * self.k[0] + self.k[1] + self.k[2]).abs())
    }

    /// `e_i(H)` for the labeled frame.
    pub fn frame_derivative_of_h(&self, i: usize) -> f64 {
        let e = &self.frame[i];
        e[0] * self.dh[0] + e[1] * self.dh[1] + e[2] * self.dh[2]
    }

    /// `‖S - λ Id‖` (Frobenius) in a g-orthonormal basis.
    pub fn distance_to_multiple_of_identity(&self, lambda: f64) -> f64 {
        self.k
            .iter()
            .map(|k| (k - lambda).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `max |(gS)_ij - (gS)_ji|`.
    pub fn self_adjointness_defect(&self) -> f64 {
        let g = self.g_full();
        let mut gs = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                gs[i][j] = (0..3).map(|m| g[i][m] * self.s_op[m][j]).sum();
            }
        }
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((gs[i][j] - gs[j][i]).abs());
            }
        }
        worst
    }

    /// `max(|<N,N> - 1|, |<N,x>|, |<N, x_i>|)`.
    pub fn normal_defect(&self) -> f64 {
        let ip = |u: &Vec5, v: &Vec5| crate::linalg::inner(u, v, self.ambient);
        let mut d = (ip(&self.normal, &self.normal) - 1.0)
            .abs()
            .max(ip(&self.normal, &self.x).abs());
        for t in &self.tangents {
            d = d.max(ip(&self.normal, t).abs());
        }
        d
    }

    /// The same data for the opposite normal orientation.
    pub fn flipped(&self) -> ShapeData {
        let mut s = self.clone();
        s.normal = s.normal.map(|v| -v);
        s.b = SymMat3(s.b.0.map(|v| -v));
        s.s_op = s.s_op.map(|r| r.map(|v| -v));
        s.k = s.k.map(|v| -v);
        s.h = -s.h;
        s.dh = s.dh.map(|v| -v);
        s.grad_h = s.grad_h.map(|v| -v);
        if s.ordered {
            s.frame[0] = scale3(-1.0, &s.frame[0]);
            // descending order of the remaining pair reverses
            s.k.swap(1, 2);
            s.frame.swap(1, 2);
        }
        s
    }
}

/// Induced metric jets of the `s = const` slice `(t, u) -> x(s, t, u)`.
fn slice_metric(chart: &Chart, s0: f64, t: f64, u: f64) -> Result<MetricJets, ShapeError> {
    let x = chart.eval(&[s0, t, u], 3)?;
    let dt = x.map(|c| c.derivative(1));
    let du = x.map(|c| c.derivative(2));
    let gtt = inner_g(&dt, &dt, chart.ambient);
    let gtu = inner_g(&dt, &du, chart.ambient);
    let guu = inner_g(&du, &du, chart.ambient);
    let z = gtt.lift(0.0);
    Ok(MetricJets::new(
        2,
        [1, 2, 0],
        [[gtt, gtu, z], [gtu, guu, z], [z, z, z]],
    ))
}

/// Gaussian curvature of the slice `s = s0` at `(t, u)`.
pub fn slice_gaussian_curvature(chart: &Chart, s0: f64, t: f64, u: f64) -> Result<f64, ShapeError> {
    Ok(slice_metric(chart, s0, t, u)?.gaussian_curvature()?)
}

/// Gaussian curvature of a flat-surface chart at `(t, u)`.
pub fn flat_gaussian_curvature(surf: &FlatSurface, t: f64, u: f64) -> Result<f64, ShapeError> {
    let x = surf.eval(t, u, 3);
    let amb = surf.ambient();
    let dt = x.map(|c| c.derivative(0));
    let du = x.map(|c| c.derivative(1));
    let gtt = inner_g(&dt, &dt, amb);
    let gtu = inner_g(&dt, &du, amb);
    let guu = inner_g(&du, &du, amb);
    let z = gtt.lift(0.0);
    let m = MetricJets::new(2, [0, 1, 2], [[gtt, gtu, z], [gtu, guu, z], [z, z, z]]);
    Ok(m.gaussian_curvature()?)
}

/// Max `|K|` over a `(t, u)` grid of the slice `s = s0`.
pub fn slice_flatness(
    chart: &Chart,
    s0: f64,
    nt: usize,
    nu: usize,
) -> Result<(f64, [f64; 2]), ShapeError> {
    let d = &chart.domain;
    let mut worst = (0.0f64, [f64::NAN; 2]);
    for i in 0..nt {
        for j in 0..nu {
            let t = d.lo[1] + (i as f64 + 0.5) / nt as f64 * (d.hi[1] - d.lo[1]);
            let u = d.lo[2] + (j as f64 + 0.5) / nu as f64 * (d.hi[2] - d.lo[2]);
            let k = slice_gaussian_curvature(chart, s0, t, u)?;
            if k.abs() >= worst.0 {
                worst = (k.abs(), [t, u]);
            }
        }
    }
    Ok(worst)
}

/// Max `|K|` of a flat surface over `[t0,t1]×[u0,u1]`.
pub fn flat_surface_flatness(
    surf: &FlatSurface,
    t_range: (f64, f64),
    u_range: (f64, f64),
    nt: usize,
    nu: usize,
) -> Result<f64, ShapeError> {
    let mut worst = 0.0f64;
    for i in 0..nt {
        for j in 0..nu {
            let t = t_range.0 + (i as f64 + 0.5) / nt as f64 * (t_range.1 - t_range.0);
            let u = u_range.0 + (j as f64 + 0.5) / nu as f64 * (u_range.1 - u_range.0);
            worst = worst.max(flat_gaussian_curvature(surf, t, u)?.abs());
        }
    }
    Ok(worst)
}

/// Convenience wrappers using default tolerances.
pub fn shape_data(chart: &Chart, p: &Point3) -> Result<ShapeData, ShapeError> {
    Engine::default().shape_data(chart, p)
}

pub fn biconservative_residual(chart: &Chart, p: &Point3) -> Result<(f64, f64), ShapeError> {
    Engine::default().biconservative_residual(chart, p)
}

pub fn trace_rule_residual(chart: &Chart, p: &Point3) -> Result<f64, ShapeError> {
    Engine::default().trace_rule_residual(chart, p)
}

pub fn codazzi_residual(chart: &Chart, p: &Point3) -> Result<f64, ShapeError> {
    Engine::default().codazzi_residual(chart, p)
}

pub fn gauss_residual(chart: &Chart, p: &Point3) -> Result<f64, ShapeError> {
    Engine::default().gauss_residual(chart, p)
}

pub fn mean_curvature_gradient(chart: &Chart, p: &Point3) -> Result<([f64; 3], f64), ShapeError> {
    Engine::default().mean_curvature_gradient(chart, p)
}
