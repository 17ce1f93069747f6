//! Christoffel symbols and the Riemann tensor of a metric given as jets.
//!
//! With chart jets of order 3 the metric is known to order 2, so the
//! Christoffel symbols come out to order 1 and the curvature tensor is exact
//! (no finite differencing).

use crate::jet::{Jet, JetError};

pub type Tensor3 = [[[f64; 3]; 3]; 3];
pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];
pub type JetMat = [[Jet; 3]; 3];

/// A metric `g[a][b]` on `dim ≤ 3` coordinates; coordinate `a` is jet
/// variable `vars[a]`.
#[derive(Clone, Copy, Debug)]
pub struct MetricJets {
    pub dim: usize,
    pub vars: [usize; 3],
    pub g: JetMat,
}

impl MetricJets {
    pub fn new(dim: usize, vars: [usize; 3], g: JetMat) -> Self {
        MetricJets { dim, vars, g }
    }

    pub fn det(&self) -> Jet {
        let g = &self.g;
        match self.dim {
            1 => g[0][0],
            2 => g[0][0] * g[1][1] - g[0][1] * g[1][0],
            _ => {
                g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
                    - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                    + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
            }
        }
    }

    /// Inverse metric by the adjugate formula.
    pub fn inverse(&self) -> Result<JetMat, JetError> {
        let g = &self.g;
        let inv_det = self.det().recip()?;
        let mut out = [[g[0][0].lift(0.0); 3]; 3];
        match self.dim {
            1 => out[0][0] = inv_det,
            2 => {
                out[0][0] = g[1][1] * inv_det;
                out[1][1] = g[0][0] * inv_det;
                out[0][1] = -g[0][1] * inv_det;
                out[1][0] = out[0][1];
            }
            _ => {
                for (i, row) in out.iter_mut().enumerate() {
                    for (j, slot) in row.iter_mut().enumerate() {
                        let (a, b) = ((j + 1) % 3, (j + 2) % 3);
                        let (c, d) = ((i + 1) % 3, (i + 2) % 3);
                        *slot = (g[a][c] * g[b][d] - g[a][d] * g[b][c]) * inv_det;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Partial derivative of the metric along coordinate `a`.
    fn dg(&self, a: usize) -> JetMat {
        let v = self.vars[a];
        self.g.map(|row| row.map(|j| j.derivative(v)))
    }

    /// `Γ[l][i][j]`, one order lower than the metric.
    pub fn christoffel(&self) -> Result<[JetMat; 3], JetError> {
        let n = self.dim;
        let ord = self.g[0][0].order();
        let ginv = self.inverse()?.map(|r| r.map(|j| j.truncate(ord - 1)));
        let dg = [0, 1, 2].map(|a| if a < n { self.dg(a) } else { self.dg(0) });
        let zero = ginv[0][0].lift(0.0);
        let mut gam = [[[zero; 3]; 3]; 3];
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = zero;
                    for m in 0..n {
                        let t = dg[i][j][m] + dg[j][i][m] - dg[m][i][j];
                        acc = acc + ginv[l][m] * t;
                    }
                    gam[l][i][j] = acc * 0.5;
                    gam[l][j][i] = gam[l][i][j];
                }
            }
        }
        Ok(gam)
    }

    /// `R[i][j][k][w] = <R(∂i, ∂j) ∂k, ∂w>` with
    /// `R(X, Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]`. Needs a metric of order ≥ 2.
    pub fn riemann(&self) -> Result<Tensor4, JetError> {
        let n = self.dim;
        let gam = self.christoffel()?;
        let gv = |l: usize, i: usize, j: usize| gam[l][i][j].value();
        let dgam = |a: usize, l: usize, i: usize, j: usize| gam[l][i][j].gradient()[self.vars[a]];
        let mut up = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut r = dgam(i, l, j, k) - dgam(j, l, i, k);
                        for m in 0..n {
                            r += gv(l, i, m) * gv(m, j, k) - gv(l, j, m) * gv(m, i, k);
                        }
                        up[i][j][k][l] = r;
                    }
                }
            }
        }
        let mut out = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for w in 0..n {
                        out[i][j][k][w] =
                            (0..n).map(|l| self.g[w][l].value() * up[i][j][k][l]).sum();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Gaussian curvature of a 2-dimensional metric.
    pub fn gaussian_curvature(&self) -> Result<f64, JetError> {
        debug_assert_eq!(self.dim, 2);
        let r = self.riemann()?;
        Ok(r[0][1][1][0] / self.det().value())
    }
}

pub fn christoffel_values(gam: &[JetMat; 3]) -> Tensor3 {
    gam.map(|m| m.map(|r| r.map(|j| j.value())))
}
