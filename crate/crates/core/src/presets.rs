//! Ready-made constructions: biconservative rotational families from the
//! closure, family 3 / family 4 charts from ODE solutions, the `A(s) = s`
//! negative control and the round-sphere controls.

use std::sync::Arc;

use thiserror::Error;

use crate::charts::{
    build_chart, Chart, ChartError, FamilyKind, FamilySpec, ParamBox, Polynomial, Surface2,
};
use crate::ode::{integrate_a, OdeError, OdeSolution, Rkf45Options, Which};
use crate::profile::{close_biconservative_profile, ProfileCurve, ProfileError, V3};
use crate::shape::Corruption;

#[derive(Debug, Error)]
pub enum PresetError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("unknown preset {0:?}")]
    Unknown(String),
}

/// Unit tangent at `y` obtained by projecting `v`.
pub fn unit_tangent(surface: Surface2, y: &V3, v: &V3) -> V3 {
    let k = surface.c() * surface.inner(y, v);
    let w = [v[0] - k * y[0], v[1] - k * y[1], v[2] - k * y[2]];
    let n = surface.inner(&w, &w).sqrt();
    w.map(|x| x / n)
}

/// Point of the profile surface with last two coordinates `(p, q)`.
pub fn surface_point(surface: Surface2, p: f64, q: f64) -> V3 {
    let r = 1.0 - surface.c() * (p * p + q * q);
    [r.sqrt(), p, q]
}

/// Initial data used by the closure presets. Regular over `s ∈ [0, 1]`.
pub fn closure_init(family: FamilyKind) -> Option<(V3, V3)> {
    let surface = family.profile_surface()?;
    let y = surface_point(surface, 0.7, 0.5);
    let dir = match family {
        FamilyKind::H4Family2 => [0.0, 1.0, 0.0],
        _ => [0.0, 0.0, 1.0],
    };
    Some((y, unit_tangent(surface, &y, &dir)))
}

pub const CLOSURE_SPAN: (f64, f64) = (0.0, 1.0);
pub const CLOSURE_STEP: f64 = 1e-2;

pub fn closure_profile(family: FamilyKind) -> Result<ProfileCurve, PresetError> {
    let init = closure_init(family).ok_or(ProfileError::NotRotational(family))?;
    Ok(close_biconservative_profile(
        family,
        init,
        CLOSURE_SPAN,
        CLOSURE_STEP,
    )?)
}

/// Rotational chart over a profile, keeping `s` slightly inside its span.
pub fn rotational_chart(family: FamilyKind, profile: ProfileCurve) -> Result<Chart, PresetError> {
    let (lo, hi) = profile.span();
    let margin = 0.05 * (hi - lo);
    let dom = ParamBox::new(
        [lo + margin, -std::f64::consts::PI + 0.1, -1.0],
        [hi - margin, std::f64::consts::PI - 0.1, 1.0],
    );
    Ok(build_chart(
        &FamilySpec::Rotational {
            kind: family,
            profile: Arc::new(profile),
        },
        Some(dom),
    )?)
}

pub fn closure_chart(family: FamilyKind) -> Result<Chart, PresetError> {
    rotational_chart(family, closure_profile(family)?)
}

pub const ODE1_INIT: (f64, f64, f64) = (1.0, 1.0, 0.0);
pub const ODE1_SPAN: (f64, f64) = (1.0, 2.5);
pub const ODE2_INIT: (f64, f64, f64) = (1.0, 1.0, 0.5);
pub const ODE2_SPAN: (f64, f64) = (1.0, 2.0);

pub fn ode_solution(which: Which) -> Result<OdeSolution, PresetError> {
    let (init, span) = match which {
        Which::Ode1 => (ODE1_INIT, ODE1_SPAN),
        Which::Ode2 => (ODE2_INIT, ODE2_SPAN),
    };
    Ok(integrate_a(which, init, span, &preset_ode_options())?)
}

/// Integration options for the ODE presets. The tolerance is tighter than
/// the default because checks on these charts read `A'''` from the dense
/// output, where knot errors are amplified by about `h⁻³`.
pub fn preset_ode_options() -> Rkf45Options {
    Rkf45Options {
        tol: 1e-12,
        ..Rkf45Options::default()
    }
}

fn s_domain(lo: f64, hi: f64) -> ParamBox {
    ParamBox::new(
        [lo, -std::f64::consts::PI + 0.1, -1.0],
        [hi, std::f64::consts::PI - 0.1, 1.0],
    )
}

/// Family 3 (`a = 1`) or family 4 (`a = 1`) over an ODE solution.
pub fn ode_chart(sol: OdeSolution) -> Result<Chart, PresetError> {
    let (lo, hi) = sol.span();
    let margin = 0.02 * (hi - lo);
    let dom = s_domain(lo + margin, hi - margin);
    let which = sol.which;
    let profile = Arc::new(sol);
    let spec = match which {
        Which::Ode1 => FamilySpec::H4Family3 { a: 1.0, profile },
        Which::Ode2 => FamilySpec::H4Family4 { a: 1.0, profile },
    };
    Ok(build_chart(&spec, Some(dom))?)
}

/// Family 3 with `a = 1` and `A(s) = s` on `s ∈ [1.5, 2.5]`. It solves
/// neither classification ODE and is not biconservative.
pub fn family3_a_equals_s() -> Result<Chart, PresetError> {
    Ok(build_chart(
        &FamilySpec::H4Family3 {
            a: 1.0,
            profile: Arc::new(Polynomial::identity()),
        },
        Some(s_domain(1.5, 2.5)),
    )?)
}

/// Family 4 with `a = 1` and `A(s) = s`, an exact ODE-2 solution.
pub fn family4_a_equals_s() -> Result<Chart, PresetError> {
    Ok(build_chart(
        &FamilySpec::H4Family4 {
            a: 1.0,
            profile: Arc::new(Polynomial::identity()),
        },
        Some(s_domain(1.5, 2.5)),
    )?)
}

/// A perturbation of `b₁₂` used as a Codazzi negative control.
pub fn corrupted_b() -> Corruption {
    Corruption {
        entry: (0, 1),
        amount: 1e-3,
        slope_axis: 0,
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "equator",
    "small-sphere",
    "s4-closure",
    "h4-family1-closure",
    "h4-family2-closure",
    "family3-ode1",
    "family4-ode2",
    "family3-a-equals-s",
    "family4-a-equals-s",
];

pub fn by_name(name: &str) -> Result<Chart, PresetError> {
    match name {
        "equator" => Ok(build_chart(&FamilySpec::EquatorS3, None)?),
        "small-sphere" => Ok(build_chart(
            &FamilySpec::SmallSphereS3 { height: 0.6 },
            None,
        )?),
        "s4-closure" => closure_chart(FamilyKind::S4Rotational),
        "h4-family1-closure" => closure_chart(FamilyKind::H4Family1),
        "h4-family2-closure" => closure_chart(FamilyKind::H4Family2),
        "family3-ode1" => ode_chart(ode_solution(Which::Ode1)?),
        "family4-ode2" => ode_chart(ode_solution(Which::Ode2)?),
        "family3-a-equals-s" | "a=s" => family3_a_equals_s(),
        "family4-a-equals-s" => family4_a_equals_s(),
        other => Err(PresetError::Unknown(other.to_string())),
    }
}
