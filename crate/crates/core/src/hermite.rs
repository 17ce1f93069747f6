//! Piecewise two-point Hermite interpolation.
//!
//! Each knot carries the value and the first `levels - 1` derivatives of a
//! vector-valued function; between knots the interpolant is the unique
//! polynomial of degree `2 levels - 1` matching all of them at both ends
//! (cubic for values and slopes, quintic with second derivatives, septic
//! with third derivatives).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HermiteError {
    #[error("knots must be strictly increasing (violated at index {0})")]
    NonMonotone(usize),
    #[error("need at least two knots")]
    TooFewKnots,
    #[error("expected {expected} numbers per knot, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("s = {s} outside [{lo}, {hi}]")]
    OutOfRange { s: f64, lo: f64, hi: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hermite {
    dim: usize,
    levels: usize,
    knots: Vec<f64>,
    /// `data[knot][level * dim + component]`
    data: Vec<Vec<f64>>,
}

fn falling(k: usize, j: usize) -> f64 {
    if j > k {
        return 0.0;
    }
    ((k - j + 1)..=k).map(|i| i as f64).product()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Hermite {
    pub fn new(
        dim: usize,
        levels: usize,
        knots: Vec<f64>,
        data: Vec<Vec<f64>>,
    ) -> Result<Self, HermiteError> {
        assert!((1..=4).contains(&levels) && dim > 0);
        if knots.len() < 2 {
            return Err(HermiteError::TooFewKnots);
        }
        for i in 1..knots.len() {
            if !(knots[i] > knots[i - 1]) {
                return Err(HermiteError::NonMonotone(i));
            }
        }
        for row in &data {
            if row.len() != dim * levels {
                return Err(HermiteError::Shape {
                    expected: dim * levels,
                    got: row.len(),
                });
            }
        }
        if data.len() != knots.len() {
            return Err(HermiteError::Shape {
                expected: knots.len(),
                got: data.len(),
            });
        }
        Ok(Hermite {
            dim,
            levels,
            knots,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn span(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    fn interval(&self, s: f64) -> Result<usize, HermiteError> {
        let (lo, hi) = self.span();
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(HermiteError::OutOfRange { s, lo, hi });
        }
        let i = self.knots.partition_point(|k| *k <= s);
        Ok(i.clamp(1, self.knots.len() - 1) - 1)
    }

    /// `out[c][d]` is the `d`-th derivative (d ≤ 3) of component `c` at `s`.
    pub fn eval(&self, s: f64) -> Result<Vec<[f64; 4]>, HermiteError> {
        let i = self.interval(s)?;
        let (s0, s1) = (self.knots[i], self.knots[i + 1]);
        let h = s1 - s0;
        let tau = (s - s0) / h;
        let l = self.levels;
        let deg = 2 * l - 1;

        // Matrix of the end conditions on the unknown high coefficients.
        let mut m = [[0.0; 4]; 4];
        for (j, row) in m.iter_mut().enumerate().take(l) {
            for (r, v) in row.iter_mut().enumerate().take(l) {
                *v = falling(l + r, j);
            }
        }
        let mut out = Vec::with_capacity(self.dim);
        for c in 0..self.dim {
            let f0 = |j: usize| self.data[i][j * self.dim + c];
            let f1 = |j: usize| self.data[i + 1][j * self.dim + c];
            let mut coef = [0.0; 8];
            for (j, cj) in coef.iter_mut().enumerate().take(l) {
                *cj = h.powi(j as i32) * f0(j) / factorial(j);
            }
            let mut rhs = [0.0; 4];
            for (j, rj) in rhs.iter_mut().enumerate().take(l) {
                let known: f64 = (j..l).map(|k| coef[k] * falling(k, j)).sum();
                *rj = h.powi(j as i32) * f1(j) - known;
            }
            let high = solve_small(m, rhs, l);
            coef[l..(l + l)].copy_from_slice(&high[..l]);
            let mut res = [0.0; 4];
            for (d, rd) in res.iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in (d..=deg).rev() {
                    acc = acc * tau + coef[k] * falling(k, d);
                }
                *rd = acc / h.powi(d as i32);
            }
            out.push(res);
        }
        Ok(out)
    }
}

/// Gaussian elimination with partial pivoting on the leading `n × n` block.
fn solve_small(mut a: [[f64; 4]; 4], mut b: [f64; 4], n: usize) -> [f64; 4] {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in (r + 1)..n {
            acc -= a[r][k] * x[k];
        }
        x[r] = acc / a[r][r];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[f64], s: f64, d: usize) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k < d {
                    0.0
                } else {
                    c * falling(k, d) * s.powi((k - d) as i32)
                }
            })
            .sum()
    }

    #[test]
    fn reproduces_polynomials_of_full_degree() {
        let p = [0.3, -1.0, 0.5, 2.0, -0.7, 0.25, 0.1, -0.05];
        for levels in 1..=4 {
            let deg = 2 * levels - 1;
            let c = &p[..=deg];
            let knots = vec![0.0, 0.4, 1.1];
            let data = knots
                .iter()
                .map(|&s| (0..levels).map(|d| poly(c, s, d)).collect())
                .collect();
            let herm = Hermite::new(1, levels, knots, data).unwrap();
            for s in [0.05, 0.33, 0.7, 1.05] {
                let v = herm.eval(s).unwrap()[0];
                for d in 0..4 {
                    let want = poly(c, s, d);
                    assert!(
                        (v[d] - want).abs() < 1e-11,
                        "levels {levels} d {d}: {} vs {want}",
                        v[d]
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Hermite::new(1, 2, vec![0.0, 0.0], vec![vec![0.0, 0.0]; 2]).unwrap_err(),
            HermiteError::NonMonotone(1)
        );
        let h = Hermite::new(1, 1, vec![0.0, 1.0], vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(h.eval(2.0).is_err());
    }
}
