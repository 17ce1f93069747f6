//! Grid sweeps and their summary records.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ShapeError;
use crate::charts::{ParamBox, Point3};

/// A cell-centred `Ns × Nt × Nu` grid over a parameter box. Cell centres
/// keep every sample strictly inside the box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub counts: [usize; 3],
    pub domain: ParamBox,
}

impl GridSpec {
    pub fn new(counts: [usize; 3], domain: ParamBox) -> Self {
        GridSpec { counts, domain }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_value(&self, k: usize, i: usize) -> f64 {
        let d = &self.domain;
        d.lo[k] + (i as f64 + 0.5) / self.counts[k] as f64 * (d.hi[k] - d.lo[k])
    }

    /// Points in row-major order with `s` outermost.
    pub fn points(&self) -> Vec<Point3> {
        let [ns, nt, nu] = self.counts;
        let mut out = Vec::with_capacity(self.len());
        for i in 0..ns {
            for j in 0..nt {
                for k in 0..nu {
                    out.push([
                        self.axis_value(0, i),
                        self.axis_value(1, j),
                        self.axis_value(2, k),
                    ]);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub grid: GridSpec,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub worst_point: Option<Point3>,
    pub tolerance: f64,
    pub pass: bool,
    pub evaluated: usize,
    /// Points where the check was undefined (degenerate frame, etc.).
    pub skipped: usize,
    pub first_error: Option<String>,
}

/// Evaluates `f` at every grid point in parallel and summarizes. The check
/// passes when at least one point was evaluated and every evaluated
/// residual is within `tolerance`.
pub fn sweep<F>(check: &str, grid: &GridSpec, tolerance: f64, f: F) -> ResidualReport
where
    F: Fn(&Point3) -> Result<f64, ShapeError> + Sync,
{
    let pts = grid.points();
    let results: Vec<(Point3, Result<f64, ShapeError>)> =
        pts.par_iter().map(|p| (*p, f(p))).collect();
    summarize(check, grid, tolerance, results)
}

pub fn summarize<E: std::fmt::Display>(
    check: &str,
    grid: &GridSpec,
    tolerance: f64,
    results: Vec<(Point3, Result<f64, E>)>,
) -> ResidualReport {
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut worst = None;
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut first_error = None;
    let mut nan = false;
    for (p, r) in results {
        match r {
            Ok(v) => {
                evaluated += 1;
                if !v.is_finite() {
                    nan = true;
                    worst = Some(p);
                    continue;
                }
                sum += v;
                if worst.is_none() || v > max {
                    max = v;
                    worst = Some(p);
                }
            }
            Err(e) => {
                skipped += 1;
                if first_error.is_none() {
                    first_error = Some(e.to_string());
                }
            }
        }
    }
    if nan {
        max = f64::NAN;
    }
    ResidualReport {
        check: check.to_string(),
        grid: *grid,
        max_residual: max,
        mean_residual: if evaluated > 0 {
            sum / evaluated as f64
        } else {
            f64::NAN
        },
        worst_point: worst,
        tolerance,
        pass: evaluated > 0 && !nan && max <= tolerance,
        evaluated,
        skipped,
        first_error,
    }
}
