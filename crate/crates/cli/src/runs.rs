//! `profile`, `ode` and `frenet`: thin wrappers with JSON run summaries.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use bicons_core::charts::{FamilyKind, Surface2};
use bicons_core::linalg::Ambient;
use bicons_core::ode::{integrate_a, residual, Termination, Which};
use bicons_core::presets;
use bicons_core::profile::{
    close_biconservative_profile, frenet, integrate_prescribed_curvature, predicted_frenet,
    ChartCurve, FnLaw, ProfileCurve, V3,
};
use bicons_core::shape::Engine;

use crate::sampling::parse_numbers;
use crate::target::{build_target, rotational_kind, surface_of, Params, Target};

pub enum Kappa {
    Constant(f64),
    Closure(FamilyKind),
}

pub fn parse_kappa(s: &str) -> Result<Kappa> {
    match s.split_once(':') {
        Some(("const", k)) => Ok(Kappa::Constant(
            k.trim()
                .parse()
                .with_context(|| format!("curvature {k:?}"))?,
        )),
        Some(("closure", fam)) => rotational_kind(fam.trim())
            .map(Kappa::Closure)
            .ok_or_else(|| anyhow!("closure needs s4, h4-family1 or h4-family2, got {fam:?}")),
        _ => bail!("--kappa must be const:K or closure:FAMILY"),
    }
}

/// Length after which a constant-curvature curve closes up, if it does.
pub fn constant_period(surface: Surface2, k: f64) -> Option<f64> {
    let q = surface.c() + k * k;
    (q > 0.0).then(|| 2.0 * std::f64::consts::PI / q.sqrt())
}

#[derive(Serialize)]
pub struct ProfileSummary {
    pub schema: u32,
    pub command: &'static str,
    pub surface: Surface2,
    pub kappa: String,
    pub span: [f64; 2],
    pub samples: usize,
    pub termination: Termination,
    pub max_drift: f64,
    pub closing_gap: f64,
    pub start: V3,
    pub end: V3,
    pub out: Option<PathBuf>,
}

pub struct ProfileArgs<'a> {
    pub surface: Option<&'a str>,
    pub kappa: &'a str,
    pub init: Option<&'a str>,
    pub span: Option<&'a str>,
    pub step: f64,
    pub out: Option<&'a Path>,
}

pub fn run_profile(a: &ProfileArgs) -> Result<(ProfileSummary, ProfileCurve)> {
    let kappa = parse_kappa(a.kappa)?;
    let surface = match (&kappa, a.surface) {
        (Kappa::Closure(f), s) => {
            let fs = f.profile_surface().unwrap();
            if let Some(s) = s {
                if surface_of(s)? != fs {
                    bail!("closure:{f:?} lives on {fs:?}, not {s}");
                }
            }
            fs
        }
        (Kappa::Constant(_), Some(s)) => surface_of(s)?,
        (Kappa::Constant(_), None) => bail!("--surface is required with const curvature"),
    };
    let init = match a.init {
        Some(s) => {
            let v: [f64; 6] = parse_numbers(s, "--init")?;
            ([v[0], v[1], v[2]], [v[3], v[4], v[5]])
        }
        None => match &kappa {
            Kappa::Closure(f) => presets::closure_init(*f).unwrap(),
            Kappa::Constant(_) => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        },
    };
    let span = match a.span {
        None => match &kappa {
            Kappa::Closure(_) => presets::CLOSURE_SPAN,
            Kappa::Constant(k) => (
                0.0,
                constant_period(surface, *k).ok_or_else(|| {
                    anyhow!("a curve of curvature {k} on {surface:?} does not close; give --span")
                })?,
            ),
        },
        Some(s) => {
            let (lo, hi) = s
                .split_once(',')
                .ok_or_else(|| anyhow!("--span must be lo,hi"))?;
            let lo: f64 = lo.trim().parse().context("--span")?;
            let hi = match (hi.trim(), &kappa) {
                ("period", Kappa::Constant(k)) => {
                    lo + constant_period(surface, *k)
                        .ok_or_else(|| anyhow!("curvature {k} on {surface:?} has no period"))?
                }
                (h, _) => h.parse().context("--span")?,
            };
            (lo, hi)
        }
    };
    if !(span.1 > span.0) {
        bail!("--span must have lo < hi");
    }
    let curve = match &kappa {
        Kappa::Constant(k) => {
            integrate_prescribed_curvature(&FnLaw::constant(surface, *k), init, span, a.step)?
        }
        Kappa::Closure(f) => close_biconservative_profile(*f, init, span, a.step)?,
    };
    if let Some(p) = a.out {
        curve.save_csv(p)?;
    }
    let (first, last) = (
        curve.samples.first().unwrap(),
        curve.samples.last().unwrap(),
    );
    let summary = ProfileSummary {
        schema: 1,
        command: "profile",
        surface,
        kappa: a.kappa.to_string(),
        span: [first.s, last.s],
        samples: curve.samples.len(),
        termination: curve.termination.clone(),
        max_drift: curve.max_drift,
        closing_gap: curve.closing_gap(),
        start: first.y,
        end: last.y,
        out: a.out.map(Path::to_path_buf),
    };
    Ok((summary, curve))
}

#[derive(Serialize)]
pub struct OdeSummary {
    pub schema: u32,
    pub command: &'static str,
    pub which: Which,
    pub init: [f64; 3],
    pub requested_span: [f64; 2],
    pub span: [f64; 2],
    pub samples: usize,
    pub termination: Termination,
    pub termination_backward: Option<Termination>,
    /// Largest `|residual|` of the ODE over the stored samples.
    pub max_residual: f64,
    pub out: Option<PathBuf>,
}

pub struct OdeArgs<'a> {
    pub which: u8,
    pub init: Option<&'a str>,
    pub span: Option<&'a str>,
    pub tol: Option<f64>,
    pub out: Option<&'a Path>,
}

pub fn run_ode(a: &OdeArgs) -> Result<OdeSummary> {
    let which = match a.which {
        1 => Which::Ode1,
        2 => Which::Ode2,
        w => bail!("--which must be 1 or 2, got {w}"),
    };
    let (dinit, dspan) = match which {
        Which::Ode1 => (presets::ODE1_INIT, presets::ODE1_SPAN),
        Which::Ode2 => (presets::ODE2_INIT, presets::ODE2_SPAN),
    };
    let init = match a.init {
        Some(s) => {
            let v: [f64; 3] = parse_numbers(s, "--init")?;
            (v[0], v[1], v[2])
        }
        None => dinit,
    };
    let span = match a.span {
        Some(s) => {
            let v: [f64; 2] = parse_numbers(s, "--span")?;
            (v[0], v[1])
        }
        None => dspan,
    };
    let mut opts = presets::preset_ode_options();
    if let Some(t) = a.tol {
        if !(t > 0.0) {
            bail!("--tol must be positive");
        }
        opts.tol = t;
    }
    let sol = integrate_a(which, init, span, &opts)?;
    if let Some(p) = a.out {
        sol.save_csv(p)?;
    }
    let max_residual = sol
        .samples
        .iter()
        .map(|r| residual(which, r[0], r[1], r[2], r[3]).abs())
        .fold(0.0, f64::max);
    let (lo, hi) = sol.span();
    Ok(OdeSummary {
        schema: 1,
        command: "ode",
        which,
        init: [init.0, init.1, init.2],
        requested_span: [span.0, span.1],
        span: [lo, hi],
        samples: sol.samples.len(),
        termination: sol.termination.clone(),
        termination_backward: sol.termination_backward.clone(),
        max_residual,
        out: a.out.map(Path::to_path_buf),
    })
}

#[derive(Serialize)]
pub struct Predicted {
    pub kappa: f64,
    /// Torsion magnitude; its sign depends on the binormal orientation.
    pub tau_abs: f64,
}

#[derive(Serialize)]
pub struct FrenetSummary {
    pub schema: u32,
    pub command: &'static str,
    pub family: String,
    pub ambient: Ambient,
    pub point: [f64; 3],
    pub kappa: f64,
    pub tau: f64,
    pub eps_n: f64,
    pub eps_b: f64,
    pub h: f64,
    pub e1_h: f64,
    pub predicted: Predicted,
    pub kappa_deviation: f64,
    pub tau_deviation: f64,
    /// On H⁴: whether the causal character of the normal is `sign(9H² - 4)`.
    pub branch_ok: bool,
}

pub fn run_frenet(
    family: &str,
    params: &Params,
    profile: Option<&Path>,
    at: Option<f64>,
    t: f64,
    u: f64,
) -> Result<FrenetSummary> {
    let chart = match build_target(family, params, profile)? {
        Target::Chart(c) => c,
        Target::Flat(_) => bail!("frenet needs a 3-parameter chart, not a flat surface"),
    };
    let s = at.unwrap_or(chart.domain.center()[0]);
    let p = [s, t, u];
    if !chart.domain.contains(&p) {
        bail!(
            "point {p:?} is outside the chart domain {:?}..{:?}",
            chart.domain.lo,
            chart.domain.hi
        );
    }
    let f = frenet(
        &ChartCurve {
            chart: &chart,
            t0: t,
            u0: u,
        },
        s,
    )?;
    let sd = Engine::default().shape_data(&chart, &p)?;
    let e1h = sd.frame_derivative_of_h(0);
    let (k, tau) = predicted_frenet(chart.ambient, sd.h, e1h);
    let branch_ok =
        chart.ambient == Ambient::Sphere || f.eps_n == (9.0 * sd.h * sd.h - 4.0).signum();
    Ok(FrenetSummary {
        schema: 1,
        command: "frenet",
        family: family.to_string(),
        ambient: chart.ambient,
        point: p,
        kappa: f.kappa,
        tau: f.tau,
        eps_n: f.eps_n,
        eps_b: f.eps_b,
        h: sd.h,
        e1_h: e1h,
        predicted: Predicted {
            kappa: k,
            tau_abs: tau,
        },
        kappa_deviation: (f.kappa - k).abs(),
        tau_deviation: (f.tau.abs() - tau).abs(),
        branch_ok,
    })
}
