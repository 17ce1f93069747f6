//! `--grid` / `--range` parsing and grid resolution against a domain.

use anyhow::{anyhow, bail, Context, Result};
use bicons_core::charts::{ParamBox, Point3};
use bicons_core::shape::GridSpec;

pub const AXES: [&str; 3] = ["s", "t", "u"];

/// `NsxNtxNu`, or `NtxNu` for the 2-parameter flat surfaces.
pub fn parse_grid(s: &str) -> Result<[usize; 3]> {
    let parts: Vec<usize> = s
        .split(['x', 'X'])
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("grid {s:?} is not of the form NsxNtxNu"))?;
    match parts[..] {
        [nt, nu] => Ok([1, nt, nu]),
        [ns, nt, nu] => Ok([ns, nt, nu]),
        _ => bail!("grid {s:?} is not of the form NsxNtxNu"),
    }
}

fn axis_index(name: &str) -> Result<usize> {
    AXES.iter()
        .position(|a| *a == name)
        .ok_or_else(|| anyhow!("unknown axis {name:?} (s, t or u)"))
}

/// `axis:lo:hi`.
pub fn parse_range(s: &str) -> Result<(usize, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [axis, lo, hi] = parts[..] else {
        bail!("range {s:?} is not of the form axis:lo:hi");
    };
    let lo: f64 = lo.trim().parse().with_context(|| format!("range {s:?}"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("range {s:?}"))?;
    Ok((axis_index(axis.trim())?, lo, hi))
}

pub fn parse_range_pair(axis: &str, lo: f64, hi: f64) -> Result<(usize, f64, f64)> {
    Ok((axis_index(axis)?, lo, hi))
}

/// Applies the ranges to `domain` and validates the counts. An axis whose
/// range has zero width is inactive and takes a single sample; every active
/// axis needs at least two.
pub fn resolve_grid(
    domain: ParamBox,
    counts: [usize; 3],
    ranges: &[(usize, f64, f64)],
) -> Result<GridSpec> {
    let mut b = domain;
    for &(k, lo, hi) in ranges {
        if !(lo <= hi) {
            bail!("range for {} has lo > hi ({lo} > {hi})", AXES[k]);
        }
        let slack = 1e-12 * (1.0 + domain.lo[k].abs().max(domain.hi[k].abs()));
        if lo < domain.lo[k] - slack || hi > domain.hi[k] + slack {
            bail!(
                "range {}:{lo}:{hi} leaves the chart domain [{}, {}]",
                AXES[k],
                domain.lo[k],
                domain.hi[k]
            );
        }
        b = b.with_axis(k, lo, hi);
    }
    let mut counts = counts;
    for k in 0..3 {
        let active = b.hi[k] > b.lo[k];
        if active && counts[k] < 2 {
            bail!(
                "grid needs at least 2 samples along active axis {}",
                AXES[k]
            );
        }
        if !active {
            counts[k] = 1;
        }
    }
    Ok(GridSpec::new(counts, b))
}

/// Inclusive samples along axis `k` (the midpoint of an inactive axis).
pub fn linspace(grid: &GridSpec, k: usize) -> Vec<f64> {
    let (lo, hi, n) = (grid.domain.lo[k], grid.domain.hi[k], grid.counts[k]);
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Inclusive grid points, row-major with `s` outermost.
pub fn inclusive_points(grid: &GridSpec) -> Vec<Point3> {
    let (s, t, u) = (linspace(grid, 0), linspace(grid, 1), linspace(grid, 2));
    let mut out = Vec::with_capacity(grid.len());
    for &a in &s {
        for &b in &t {
            for &c in &u {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Comma-separated list of numbers of a fixed length.
pub fn parse_numbers<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("{what} {s:?} is not a list of numbers"))?;
    v.try_into()
        .map_err(|v: Vec<f64>| anyhow!("{what} needs {N} numbers, got {}", v.len()))
}
