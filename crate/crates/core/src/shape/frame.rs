//! Frame-dependent checks: connection forms, transverse derivatives of the
//! principal curvatures and the Gauss relation along `e₁`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::intrinsic::{christoffel_values, Tensor3};
use super::{g_dot, Engine, ShapeError};
use crate::charts::{Chart, Point3};
use crate::linalg::{inner, mat_vec, Mat3, Vec5};

/// Ambient vector fields `X_i(x)` tangent to the hypersurface.
pub type AmbientFrameFn = dyn Fn(&Vec5) -> [Vec5; 3] + Send + Sync;

/// Where the orthonormal frame `e₁, e₂, e₃` comes from.
#[derive(Clone)]
pub enum FrameSource {
    /// Semantically labeled principal directions.
    Principal,
    /// An explicit orthonormal frame of ambient vector fields.
    Ambient(Arc<AmbientFrameFn>),
}

impl fmt::Debug for FrameSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameSource::Principal => f.write_str("Principal"),
            FrameSource::Ambient(_) => f.write_str("Ambient(..)"),
        }
    }
}

/// The left-invariant orthonormal frame of the unit 3-sphere in the first
/// four coordinates.
pub fn s3_left_invariant_frame() -> FrameSource {
    FrameSource::Ambient(Arc::new(|x: &Vec5| {
        [
            [-x[1], x[0], -x[3], x[2], 0.0],
            [-x[2], x[3], x[0], -x[1], 0.0],
            [-x[3], -x[2], x[1], x[0], 0.0],
        ]
    }))
}

#[derive(Clone, Copy, Debug)]
struct Frame {
    e: [[f64; 3]; 3],
    k: [f64; 3],
    g: Mat3,
}

/// `ω[i][j][l] = ω_ij(e_l) = <∇_{e_l} e_i, e_j>` together with the frame data
/// it was computed in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionForms {
    pub omega: [[[f64; 3]; 3]; 3],
    pub k: [f64; 3],
    pub frame: [[f64; 3]; 3],
}

impl ConnectionForms {
    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.omega[i][j][l]
    }
}

/// Result of the Gauss relation check along `e₁` for one index `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussAlongE1 {
    pub a: usize,
    /// `e₁(ω_{1A}(e_A))`.
    pub lhs: f64,
    /// `-2c - k₁k_A - ω_{1A}(e_A)²`.
    pub rhs_two_c: f64,
    /// `-c - k₁k_A - ω_{1A}(e_A)²`.
    pub rhs_one_c: f64,
    pub omega: f64,
}

impl GaussAlongE1 {
    pub fn dev_two_c(&self) -> f64 {
        (self.lhs - self.rhs_two_c).abs()
    }
    pub fn dev_one_c(&self) -> f64 {
        (self.lhs - self.rhs_one_c).abs()
    }
}

fn min_gap(k: &[f64; 3]) -> f64 {
    (k[0] - k[1])
        .abs()
        .min((k[0] - k[2]).abs())
        .min((k[1] - k[2]).abs())
}

fn offset(p: &Point3, dir: &[f64; 3], h: f64) -> Point3 {
    [p[0] + h * dir[0], p[1] + h * dir[1], p[2] + h * dir[2]]
}

fn axis(b: usize) -> [f64; 3] {
    let mut d = [0.0; 3];
    d[b] = 1.0;
    d
}

/// Central difference with one Richardson step: `(4 D(h/2) - D(h)) / 3`.
fn richardson<F, const N: usize>(f: F, h: f64) -> Result<[f64; N], ShapeError>
where
    F: Fn(f64) -> Result<[f64; N], ShapeError>,
{
    let d = |h: f64| -> Result<[f64; N], ShapeError> {
        let a = f(h)?;
        let b = f(-h)?;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = (a[i] - b[i]) / (2.0 * h);
        }
        Ok(out)
    };
    let full = d(h)?;
    let half = d(0.5 * h)?;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = (4.0 * half[i] - full[i]) / 3.0;
    }
    Ok(out)
}

struct FrameField<'a> {
    engine: &'a Engine,
    chart: &'a Chart,
    source: &'a FrameSource,
}

impl FrameField<'_> {
    /// Frame at a base point, with its labeling fixed. With `pair_ok` a
    /// repeated `k₂ = k₃` is accepted as long as `k₁` stays isolated.
    fn base(&self, p: &Point3, checked: bool, pair_ok: bool) -> Result<Frame, ShapeError> {
        match self.source {
            FrameSource::Principal => {
                let sd = if checked {
                    self.engine.shape_data(self.chart, p)?
                } else {
                    self.engine.shape_data_unchecked(self.chart, p)?
                };
                if !sd.ordered {
                    return Err(ShapeError::UnorderedCurvatures { grad: sd.grad_norm });
                }
                let gap = if pair_ok {
                    (sd.k[0] - sd.k[1]).abs().min((sd.k[0] - sd.k[2]).abs())
                } else {
                    min_gap(&sd.k)
                };
                if gap < self.engine.tol.repeated {
                    return Err(ShapeError::RepeatedCurvature { gap });
                }
                Ok(Frame {
                    e: sd.frame,
                    k: sd.k,
                    g: sd.g_full(),
                })
            }
            FrameSource::Ambient(f) => self.ambient_frame(f.as_ref(), p),
        }
    }

    fn ambient_frame(&self, f: &AmbientFrameFn, p: &Point3) -> Result<Frame, ShapeError> {
        let geo = self.engine.local_unchecked(self.chart, p, 2)?;
        let g = geo.g_values();
        let ginv = geo.metric.inverse()?.map(|r| r.map(|j| j.value()));
        let b = geo.b_values();
        let x = geo.x.map(|j| j.value());
        let tang = geo.dx.map(|d| d.map(|j| j.value()));
        let fields = f(&x);
        let mut e = [[0.0; 3]; 3];
        let mut k = [0.0; 3];
        for i in 0..3 {
            let cov = [0, 1, 2].map(|a| inner(&fields[i], &tang[a], self.chart.ambient));
            e[i] = mat_vec(&ginv, &cov);
            k[i] = g_dot(&b, &e[i], &e[i]);
        }
        Ok(Frame { e, k, g })
    }

    /// Frame at a nearby point, matched to `base` by alignment and sign.
    fn near(&self, q: &Point3, base: &Frame) -> Result<Frame, ShapeError> {
        match self.source {
            FrameSource::Ambient(f) => self.ambient_frame(f.as_ref(), q),
            FrameSource::Principal => {
                let geo = self.engine.local_unchecked(self.chart, q, 2)?;
                let eig = geo.eigen()?;
                let mut used = [false; 3];
                let mut e = [[0.0; 3]; 3];
                let mut k = [0.0; 3];
                for i in 0..3 {
                    let (best, dot) = (0..3)
                        .filter(|j| !used[*j])
                        .map(|j| (j, g_dot(&base.g, &base.e[i], &eig.vectors[j])))
                        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                        .unwrap();
                    used[best] = true;
                    let s = dot.signum();
                    e[i] = eig.vectors[best].map(|v| s * v);
                    k[i] = eig.values[best];
                }
                Ok(Frame {
                    e,
                    k,
                    g: geo.g_values(),
                })
            }
        }
    }
}

fn flatten(e: &[[f64; 3]; 3]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for a in 0..3 {
            out[3 * i + a] = e[i][a];
        }
    }
    out
}

fn christoffel_at(engine: &Engine, chart: &Chart, p: &Point3) -> Result<Tensor3, ShapeError> {
    let geo = engine.local_unchecked(chart, p, 2)?;
    Ok(christoffel_values(&geo.metric.christoffel()?))
}

fn connection_forms_impl(
    field: &FrameField<'_>,
    p: &Point3,
    checked: bool,
) -> Result<ConnectionForms, ShapeError> {
    let base = field.base(p, checked, false)?;
    let gam = christoffel_at(field.engine, field.chart, p)?;
    let h = field.engine.tol.fd_step;
    // de[b][i][a] = ∂_b E_i^a
    let mut de = [[[0.0; 3]; 3]; 3];
    for (bax, slot) in de.iter_mut().enumerate() {
        let d = richardson(
            |hh| {
                let q = offset(p, &axis(bax), hh);
                Ok(flatten(&field.near(&q, &base)?.e))
            },
            h,
        )?;
        for i in 0..3 {
            for a in 0..3 {
                slot[i][a] = d[3 * i + a];
            }
        }
    }
    let e = &base.e;
    let mut omega = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            // coordinate components of ∇_{e_l} e_i
            let mut nab = [0.0; 3];
            for (a, na) in nab.iter_mut().enumerate() {
                let mut acc = 0.0;
                for bb in 0..3 {
                    acc += e[l][bb] * de[bb][i][a];
                    for c in 0..3 {
                        acc += e[l][bb] * e[i][c] * gam[a][bb][c];
                    }
                }
                *na = acc;
            }
            for j in 0..3 {
                omega[i][j][l] = g_dot(&base.g, &nab, &e[j]);
            }
        }
    }
    Ok(ConnectionForms {
        omega,
        k: base.k,
        frame: base.e,
    })
}

/// Connection forms of the chosen frame at `p`. The frame is differentiated
/// by central differences with one Richardson step.
pub fn connection_forms(
    engine: &Engine,
    chart: &Chart,
    p: &Point3,
    source: &FrameSource,
) -> Result<ConnectionForms, ShapeError> {
    if !chart.domain.contains(p) {
        return Err(crate::charts::ChartError::OutOfDomain { point: p.to_vec() }.into());
    }
    let field = FrameField {
        engine,
        chart,
        source,
    };
    connection_forms_impl(&field, p, true)
}

/// `e_A(k_i)` for `A = 2, 3` (rows) and `i = 1, 2, 3` (columns). A double
/// `k₂ = k₃` is allowed: any orthonormal pair spanning its eigenspace is used.
pub fn transverse_derivative_check(
    engine: &Engine,
    chart: &Chart,
    p: &Point3,
) -> Result<[[f64; 3]; 2], ShapeError> {
    let field = FrameField {
        engine,
        chart,
        source: &FrameSource::Principal,
    };
    let base = field.base(p, true, true)?;
    let h = engine.tol.fd_step;
    let mut out = [[0.0; 3]; 2];
    for (row, a) in [1usize, 2].iter().enumerate() {
        let dir = base.e[*a];
        out[row] = richardson(|hh| Ok(field.near(&offset(p, &dir, hh), &base)?.k), h)?;
    }
    Ok(out)
}

/// Evaluates `e₁(ω_{1A}(e_A))` by an outer central difference along `e₁`
/// and reports it against both candidate right-hand sides. `a` is the
/// 1-based frame index (2 or 3).
pub fn gauss_relation_along_e1(
    engine: &Engine,
    chart: &Chart,
    p: &Point3,
    a: usize,
    source: &FrameSource,
) -> Result<GaussAlongE1, ShapeError> {
    assert!(a == 2 || a == 3, "frame index must be 2 or 3");
    let ai = a - 1;
    let field = FrameField {
        engine,
        chart,
        source,
    };
    let here = connection_forms_impl(&field, p, true)?;
    let e1 = here.frame[0];
    let omega_at = |q: &Point3| -> Result<[f64; 1], ShapeError> {
        let cf = connection_forms_impl(&field, q, false)?;
        Ok([cf.omega[0][ai][ai]])
    };
    let lhs = richardson(|hh| omega_at(&offset(p, &e1, hh)), engine.tol.outer_step)?[0];
    let w = here.omega[0][ai][ai];
    let c = chart.ambient.c();
    let kk = here.k[0] * here.k[ai];
    Ok(GaussAlongE1 {
        a,
        lhs,
        rhs_two_c: -2.0 * c - kk - w * w,
        rhs_one_c: -c - kk - w * w,
        omega: w,
    })
}
