//! Turning `--family` / `--params` / `--profile` into something to sample.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use bicons_core::charts::{
    build_chart, build_flat_surface, Chart, ChartError, FamilyKind, FamilySpec, FlatKind,
    FlatSurface, ParamBox, Polynomial, ScalarProfile, Surface2,
};
use bicons_core::linalg::{inner, Ambient, Vec5};
use bicons_core::ode::{OdeSolution, Which};
use bicons_core::presets;
use bicons_core::profile::ProfileCurve;

pub type Params = BTreeMap<String, String>;

pub fn parse_params(s: Option<&str>) -> Result<Params> {
    let mut out = Params::new();
    let Some(s) = s else { return Ok(out) };
    for item in s.split(',').filter(|i| !i.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter {item:?} is not of the form key=value"))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn num(params: &Params, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) => v
            .parse()
            .with_context(|| format!("parameter {key} = {v:?} is not a number")),
        None => default.ok_or_else(|| anyhow!("missing parameter {key}")),
    }
}

/// A 3-parameter hypersurface chart or one of the flat 2-parameter surfaces.
pub enum Target {
    Chart(Chart),
    Flat(FlatSurface),
}

impl Target {
    pub fn ambient(&self) -> Ambient {
        match self {
            Target::Chart(c) => c.ambient,
            Target::Flat(f) => f.ambient(),
        }
    }

    /// Parameter box; flat surfaces use `t, u` and a degenerate `s` axis.
    /// Angular parameters cover a full turn.
    pub fn domain(&self) -> ParamBox {
        use std::f64::consts::PI;
        match self {
            Target::Chart(c) => c.domain,
            Target::Flat(f) => {
                let (t, u) = match f.kind {
                    FlatKind::TorusS4 | FlatKind::BH1 => (PI, PI),
                    FlatKind::BH2 | FlatKind::BH3 => (PI, 1.0),
                    FlatKind::BH4 => (1.0, 1.0),
                };
                ParamBox::new([0.0, -t, -u], [0.0, t, u])
            }
        }
    }

    pub fn point(&self, p: &[f64; 3]) -> Result<Vec5, ChartError> {
        Ok(match self {
            Target::Chart(c) => c.point(p)?,
            Target::Flat(f) => f.point(p[1], p[2]),
        })
    }

    pub fn membership_defect(&self, p: &[f64; 3]) -> Result<f64, ChartError> {
        let x = self.point(p)?;
        let amb = self.ambient();
        Ok((inner(&x, &x, amb) - amb.c()).abs())
    }
}

fn flat_kind(name: &str) -> Option<FlatKind> {
    Some(match name {
        "torus" | "flat-torus" => FlatKind::TorusS4,
        "bh1" => FlatKind::BH1,
        "bh2" => FlatKind::BH2,
        "bh3" => FlatKind::BH3,
        "bh4" => FlatKind::BH4,
        _ => return None,
    })
}

pub fn rotational_kind(name: &str) -> Option<FamilyKind> {
    Some(match name {
        "s4" | "s4-rotational" => FamilyKind::S4Rotational,
        "h4-family1" => FamilyKind::H4Family1,
        "h4-family2" => FamilyKind::H4Family2,
        _ => return None,
    })
}

fn scalar_profile(
    params: &Params,
    default: Which,
    file: Option<&Path>,
) -> Result<Arc<dyn ScalarProfile>> {
    if let Some(path) = file {
        let sol = OdeSolution::load_csv(default, path)
            .with_context(|| format!("reading profile {}", path.display()))?;
        return Ok(Arc::new(sol));
    }
    match params.get("profile").map(String::as_str) {
        None => Ok(Arc::new(presets::ode_solution(default)?)),
        Some("identity") | Some("s") => Ok(Arc::new(Polynomial::identity())),
        Some("ode1") => Ok(Arc::new(presets::ode_solution(Which::Ode1)?)),
        Some("ode2") => Ok(Arc::new(presets::ode_solution(Which::Ode2)?)),
        Some(other) => bail!("unknown profile {other:?} (identity, ode1, ode2 or --profile FILE)"),
    }
}

/// Profile curve for a rotational family: from a CSV file, or the closure
/// preset.
pub fn curve_profile(kind: FamilyKind, file: Option<&Path>) -> Result<ProfileCurve> {
    let surface = kind.profile_surface().expect("rotational family");
    match file {
        Some(path) => ProfileCurve::load_csv(surface, path)
            .with_context(|| format!("reading profile {}", path.display())),
        None => Ok(presets::closure_profile(kind)?),
    }
}

pub fn build_target(family: &str, params: &Params, profile: Option<&Path>) -> Result<Target> {
    if let Some(kind) = flat_kind(family) {
        let a = num(params, "a", Some(2.0))?;
        let b = num(params, "b", Some(2.0))?;
        let c = params
            .get("c")
            .map(|_| num(params, "c", None))
            .transpose()?;
        return Ok(Target::Flat(build_flat_surface(kind, a, b, c)?));
    }
    if let Some(kind) = rotational_kind(family) {
        let curve = curve_profile(kind, profile)?;
        return Ok(Target::Chart(presets::rotational_chart(kind, curve)?));
    }
    let chart = match family {
        "equator" => build_chart(&FamilySpec::EquatorS3, None)?,
        "small-sphere" => build_chart(
            &FamilySpec::SmallSphereS3 {
                height: num(params, "height", Some(0.6))?,
            },
            None,
        )?,
        "family3" | "family4" => {
            let a = num(params, "a", Some(1.0))?;
            let default = if family == "family3" { Which::Ode1 } else { Which::Ode2 };
            let prof = scalar_profile(params, default, profile)?;
            let dom = prof.span().map(|(lo, hi)| {
                let m = 0.02 * (hi - lo);
                ParamBox::new(
                    [lo + m, -std::f64::consts::PI + 0.1, -1.0],
                    [hi - m, std::f64::consts::PI - 0.1, 1.0],
                )
            });
            let dom = dom.unwrap_or(ParamBox::new(
                [1.5, -std::f64::consts::PI + 0.1, -1.0],
                [2.5, std::f64::consts::PI - 0.1, 1.0],
            ));
            let spec = if family == "family3" {
                FamilySpec::H4Family3 { a, profile: prof }
            } else {
                FamilySpec::H4Family4 { a, profile: prof }
            };
            build_chart(&spec, Some(dom))?
        }
        "cmc" => build_chart(
            &FamilySpec::CmcFamily3 {
                a: num(params, "a", Some(0.7))?,
                c: num(params, "c", Some(1.3))?,
                radius: Arc::new(Polynomial::new(vec![
                    num(params, "r0", Some(0.5))?,
                    num(params, "r1", Some(0.8))?,
                ])),
            },
            None,
        )?,
        "random" => {
            let ambient = match params.get("ambient").map(String::as_str) {
                None | Some("s4") | Some("sphere") => Ambient::Sphere,
                Some("h4") | Some("hyperbolic") => Ambient::Hyperbolic,
                Some(o) => bail!("unknown ambient {o:?}"),
            };
            let seed = num(params, "seed", Some(0.0))? as u64;
            build_chart(&FamilySpec::RandomAnalytic { ambient, seed }, None)?
        }
        other => presets::by_name(other).map_err(|e| {
            anyhow!("{e}; families: equator, small-sphere, torus, bh1..bh4, s4, h4-family1, h4-family2, family3, family4, cmc, random, or a preset ({})", presets::NAMES.join(", "))
        })?,
    };
    Ok(Target::Chart(chart))
}

/// Profile surface named on the command line.
pub fn surface_of(name: &str) -> Result<Surface2> {
    match name {
        "s2" => Ok(Surface2::S2),
        "h2" => Ok(Surface2::H2),
        o => bail!("unknown surface {o:?} (s2 or h2)"),
    }
}
