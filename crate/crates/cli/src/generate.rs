//! Point-cloud and mesh export.

use std::io::Write;

use anyhow::{bail, Result};
use bicons_core::shape::GridSpec;

use crate::sampling::{inclusive_points, linspace};
use crate::target::Target;

/// `s,t,u,x1,..,x5` on the inclusive grid, `s` outermost.
pub fn write_csv<W: Write>(target: &Target, grid: &GridSpec, mut w: W) -> Result<usize> {
    writeln!(w, "s,t,u,x1,x2,x3,x4,x5")?;
    let pts = inclusive_points(grid);
    for p in &pts {
        let x = target.point(p)?;
        writeln!(
            w,
            "{},{},{},{:e},{:e},{:e},{:e},{:e}",
            p[0], p[1], p[2], x[0], x[1], x[2], x[3], x[4]
        )?;
    }
    Ok(pts.len())
}

/// One quad patch over `(t, u)` per `s` level. Vertex positions are the
/// ambient coordinates listed in `axes` (zero-based).
pub fn write_obj<W: Write>(
    target: &Target,
    grid: &GridSpec,
    axes: [usize; 3],
    mut w: W,
) -> Result<usize> {
    if axes.iter().any(|&a| a > 4) {
        bail!("projection axes must be in 1..=5");
    }
    let [_, nt, nu] = grid.counts;
    if nt < 2 || nu < 2 {
        bail!("an OBJ patch needs at least 2 samples along t and u");
    }
    let (ts, us) = (linspace(grid, 1), linspace(grid, 2));
    writeln!(
        w,
        "# bicons mesh: {} patch(es) of {nt}x{nu} vertices, axes x{} x{} x{}",
        grid.counts[0],
        axes[0] + 1,
        axes[1] + 1,
        axes[2] + 1
    )?;
    let mut base = 1usize;
    for (k, s) in linspace(grid, 0).into_iter().enumerate() {
        writeln!(w, "o slice_{k}\n# s = {s}")?;
        for &t in &ts {
            for &u in &us {
                let x = target.point(&[s, t, u])?;
                writeln!(w, "v {} {} {}", x[axes[0]], x[axes[1]], x[axes[2]])?;
            }
        }
        let id = |i: usize, j: usize| base + i * nu + j;
        for i in 0..nt - 1 {
            for j in 0..nu - 1 {
                writeln!(
                    w,
                    "f {} {} {} {}",
                    id(i, j),
                    id(i + 1, j),
                    id(i + 1, j + 1),
                    id(i, j + 1)
                )?;
            }
        }
        base += nt * nu;
    }
    Ok(base - 1)
}
