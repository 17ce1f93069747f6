//! The `verify` suite: one residual report per requested check.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use bicons_core::charts::{Chart, FlatSurface, Point3};
use bicons_core::linalg::Ambient;
use bicons_core::profile::{frenet, predicted_frenet, ChartCurve};
use bicons_core::shape::{
    connection_forms, flat_gaussian_curvature, gauss_relation_along_e1, report::summarize,
    slice_gaussian_curvature, sweep, transverse_derivative_check, Engine, FrameSource, GridSpec,
    ResidualReport, ShapeError, Tolerances,
};

use crate::sampling::{parse_range_pair, resolve_grid};
use crate::target::{build_target, Params, Target};

pub const CHECKS: &[&str] = &[
    "membership",
    "biconservative",
    "trace_rule",
    "codazzi",
    "gauss",
    "connection_forms",
    "transverse",
    "slice_flatness",
    "frenet",
    "gauss36",
];

const CHART_DEFAULT: &[&str] = &[
    "membership",
    "biconservative",
    "trace_rule",
    "codazzi",
    "gauss",
];
const FLAT_DEFAULT: &[&str] = &["membership", "slice_flatness"];
const FLAT_ONLY: &[&str] = &["membership", "slice_flatness"];

/// `ω_ij(e_l)` components expected to vanish, zero-based `(i, j, l)`.
const OMEGA: [(usize, usize, usize); 7] = [
    (0, 1, 0),
    (0, 2, 0),
    (0, 1, 2),
    (0, 2, 1),
    (1, 2, 0),
    (1, 2, 1),
    (1, 2, 2),
];

fn default_tolerance(name: &str) -> Option<f64> {
    Some(match name {
        "membership" => 1e-10,
        "biconservative" | "trace_rule" | "transverse" => 1e-6,
        "codazzi" => 1e-9,
        "gauss" | "connection_forms" | "frenet_kappa" => 1e-5,
        "slice_flatness" => 1e-8,
        "frenet_tau" => 1e-4,
        _ => return None,
    })
}

/// Contents of `--config`. Command-line flags override its fields.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "schema_one")]
    pub schema: u32,
    pub family: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    /// Profile CSV; relative paths are taken from the config file's folder.
    pub profile: Option<PathBuf>,
    /// `[Ns, Nt, Nu]`.
    pub grid: Option<[usize; 3]>,
    #[serde(default)]
    pub ranges: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Option<Vec<String>>,
}

fn schema_one() -> u32 {
    1
}

impl VerifyConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: VerifyConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if cfg.schema != 1 {
            bail!("config schema {} is not supported (expected 1)", cfg.schema);
        }
        if let Some(p) = &cfg.profile {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.profile = Some(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }

    pub fn params(&self) -> Params {
        self.params
            .iter()
            .map(|(k, v)| {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), s)
            })
            .collect()
    }
}

/// Fully resolved verification request.
pub struct VerifyPlan {
    pub family: String,
    pub params: Params,
    pub profile: Option<PathBuf>,
    pub counts: Option<[usize; 3]>,
    pub ranges: Vec<(usize, f64, f64)>,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Option<Vec<String>>,
}

impl VerifyPlan {
    pub fn from_config(cfg: &VerifyConfig) -> Result<Self> {
        let ranges = cfg
            .ranges
            .iter()
            .map(|(axis, [lo, hi])| parse_range_pair(axis, *lo, *hi))
            .collect::<Result<_>>()?;
        Ok(VerifyPlan {
            family: cfg.family.clone().unwrap_or_default(),
            params: cfg.params(),
            profile: cfg.profile.clone(),
            counts: cfg.grid,
            ranges,
            tolerances: cfg.tolerances.clone(),
            checks: cfg.checks.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussAlongE1Summary {
    pub index: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub max_lhs: f64,
    /// Largest `|lhs - (-2c - k₁k_A - ω²)|`.
    pub max_dev_two_c: f64,
    /// Largest `|lhs - (-c - k₁k_A - ω²)|`.
    pub max_dev_one_c: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub command: &'static str,
    pub family: String,
    pub params: Params,
    pub ambient: Ambient,
    pub grid: GridSpec,
    pub engine: Tolerances,
    pub reports: Vec<ResidualReport>,
    /// Informational only; never affects `pass`.
    pub gauss36: Option<Vec<GaussAlongE1Summary>>,
    pub pass: bool,
}

fn engine_with(tols: &BTreeMap<String, f64>) -> Result<(Engine, BTreeMap<String, f64>)> {
    let mut t = Tolerances::default();
    let mut checks = BTreeMap::new();
    for (name, &v) in tols {
        match name.as_str() {
            "grad" => t.grad = v,
            "repeated" => t.repeated = v,
            "fd_step" => t.fd_step = v,
            "outer_step" => t.outer_step = v,
            n if default_tolerance(n).is_some() => {
                checks.insert(n.to_string(), v);
            }
            "frenet" => {
                checks.insert("frenet_kappa".into(), v);
                checks.insert("frenet_tau".into(), v);
            }
            n => bail!("unknown tolerance {n:?}"),
        }
    }
    Ok((Engine::new(t), checks))
}

pub fn run_verify(plan: &VerifyPlan) -> Result<VerifyReport> {
    if plan.family.is_empty() {
        bail!("no family given (--family or \"family\" in the config)");
    }
    let target = build_target(&plan.family, &plan.params, plan.profile.as_deref())?;
    let flat = matches!(target, Target::Flat(_));
    let counts = plan
        .counts
        .unwrap_or(if flat { [1, 30, 30] } else { [6, 5, 5] });
    let grid = resolve_grid(target.domain(), counts, &plan.ranges)?;

    let checks: Vec<String> = match &plan.checks {
        Some(c) if !c.is_empty() => c.clone(),
        _ => (if flat { FLAT_DEFAULT } else { CHART_DEFAULT })
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    for c in &checks {
        if !CHECKS.contains(&c.as_str()) {
            bail!("unknown check {c:?}; available: {}", CHECKS.join(", "));
        }
        if flat && !FLAT_ONLY.contains(&c.as_str()) {
            bail!("check {c:?} needs a 3-parameter chart; flat surfaces support membership and slice_flatness");
        }
    }
    let (engine, overrides) = engine_with(&plan.tolerances)?;
    let tol = |name: &str| {
        overrides
            .get(name)
            .copied()
            .or_else(|| default_tolerance(name))
            .unwrap()
    };

    let mut reports = Vec::new();
    let mut gauss36 = None;
    for check in &checks {
        match (&target, check.as_str()) {
            (_, "membership") => reports.push(sweep(check, &grid, tol(check), |p| {
                Ok(target.membership_defect(p)?)
            })),
            (Target::Flat(f), "slice_flatness") => {
                reports.push(sweep(check, &grid, tol(check), |p| flat_k(f, p)))
            }
            (Target::Chart(c), _) => {
                if check == "gauss36" {
                    gauss36 = Some(gauss36_summary(&engine, c, &grid));
                } else {
                    reports.extend(chart_check(&engine, c, &grid, check, &tol));
                }
            }
            (Target::Flat(_), _) => unreachable!(),
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(VerifyReport {
        schema: 1,
        command: "verify",
        family: plan.family.clone(),
        params: plan.params.clone(),
        ambient: target.ambient(),
        grid,
        engine: engine.tol,
        reports,
        gauss36,
        pass,
    })
}

fn flat_k(f: &FlatSurface, p: &Point3) -> Result<f64, ShapeError> {
    Ok(flat_gaussian_curvature(f, p[1], p[2])?.abs())
}

fn chart_check(
    engine: &Engine,
    chart: &Chart,
    grid: &GridSpec,
    check: &str,
    tol: &dyn Fn(&str) -> f64,
) -> Vec<ResidualReport> {
    let one = |f: &(dyn Fn(&Point3) -> Result<f64, ShapeError> + Sync)| {
        vec![sweep(check, grid, tol(check), f)]
    };
    match check {
        "biconservative" => one(&|p| Ok(engine.biconservative_residual(chart, p)?.0)),
        "trace_rule" => one(&|p| engine.trace_rule_residual(chart, p)),
        "codazzi" => one(&|p| engine.codazzi_residual(chart, p)),
        "gauss" => one(&|p| engine.gauss_residual(chart, p)),
        "slice_flatness" => one(&|p| Ok(slice_gaussian_curvature(chart, p[0], p[1], p[2])?.abs())),
        "connection_forms" => one(&|p| {
            let cf = connection_forms(engine, chart, p, &FrameSource::Principal)?;
            Ok(OMEGA
                .iter()
                .map(|&(i, j, l)| cf.get(i, j, l).abs())
                .fold(0.0, f64::max))
        }),
        "transverse" => one(&|p| {
            let d = transverse_derivative_check(engine, chart, p)?;
            Ok(d.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max))
        }),
        "frenet" => frenet_reports(engine, chart, grid, tol),
        _ => unreachable!("checked above"),
    }
}

/// `|κ - κ_pred|` and `||τ| - τ_pred|` along the `s`-lines through the grid.
/// On H⁴ a wrong causal character of the normal counts as an infinite
/// curvature deviation.
fn frenet_reports(
    engine: &Engine,
    chart: &Chart,
    grid: &GridSpec,
    tol: &dyn Fn(&str) -> f64,
) -> Vec<ResidualReport> {
    let results: Vec<(Point3, Result<(f64, f64), String>)> = grid
        .points()
        .par_iter()
        .map(|p| {
            let r = (|| {
                let f = frenet(
                    &ChartCurve {
                        chart,
                        t0: p[1],
                        u0: p[2],
                    },
                    p[0],
                )
                .map_err(|e| e.to_string())?;
                let sd = engine.shape_data(chart, p).map_err(|e| e.to_string())?;
                let (k, t) = predicted_frenet(chart.ambient, sd.h, sd.frame_derivative_of_h(0));
                let mut dk = (f.kappa - k).abs();
                if chart.ambient == Ambient::Hyperbolic
                    && f.eps_n != (9.0 * sd.h * sd.h - 4.0).signum()
                {
                    dk = f64::INFINITY;
                }
                Ok((dk, (f.tau.abs() - t).abs()))
            })();
            (*p, r)
        })
        .collect();
    let split = |pick: fn(&(f64, f64)) -> f64| {
        results
            .iter()
            .map(|(p, r)| (*p, r.as_ref().map(pick).map_err(Clone::clone)))
            .collect::<Vec<_>>()
    };
    vec![
        summarize("frenet_kappa", grid, tol("frenet_kappa"), split(|r| r.0)),
        summarize("frenet_tau", grid, tol("frenet_tau"), split(|r| r.1)),
    ]
}

fn gauss36_summary(engine: &Engine, chart: &Chart, grid: &GridSpec) -> Vec<GaussAlongE1Summary> {
    [2usize, 3]
        .iter()
        .map(|&a| {
            let res: Vec<_> = grid
                .points()
                .par_iter()
                .map(|p| gauss_relation_along_e1(engine, chart, p, a, &FrameSource::Principal))
                .collect();
            let mut s = GaussAlongE1Summary {
                index: a,
                evaluated: 0,
                skipped: 0,
                max_lhs: 0.0,
                max_dev_two_c: 0.0,
                max_dev_one_c: 0.0,
            };
            for r in res {
                match r {
                    Ok(g) => {
                        s.evaluated += 1;
                        s.max_lhs = s.max_lhs.max(g.lhs.abs());
                        s.max_dev_two_c = s.max_dev_two_c.max(g.dev_two_c());
                        s.max_dev_one_c = s.max_dev_one_c.max(g.dev_one_c());
                    }
                    Err(_) => s.skipped += 1,
                }
            }
            s
        })
        .collect()
}
