//! Curves: the Frenet apparatus in E⁵ / E⁵₁, integration of curves with
//! prescribed geodesic curvature on S² and H², and the closure that turns a
//! profile curve into a biconservative rotational hypersurface.

use std::fmt;
use std::io;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charts::{
    build_chart, Chart, ChartError, CurveProfile, FamilyKind, FamilySpec, ParamBox, Surface2,
    TaylorProfile,
};
use crate::hermite::{Hermite, HermiteError};
use crate::jet::Jet;
use crate::linalg::{inner, inner_g, Ambient, Vec5};
use crate::ode::{integrate_rkf45, Halt, Rkf45Options, Termination};
use crate::shape::{Engine, LocalGeometry, ShapeError};

pub type V3 = [f64; 3];

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("initial data is off the surface or not unit-speed tangent (defect {defect:e})")]
    InitOffSurface { defect: f64 },
    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },
    #[error("principal curvature k1 = {k1} collides with {other} at the initial point")]
    CurvatureCollision { k1: f64, other: f64 },
    #[error("mean curvature gradient vanishes at the initial point (H' = {dh:e})")]
    GradientVanishes { dh: f64 },
    #[error("|k1| = 1 at the initial point: the Frenet normal is null")]
    NullNormal,
    #[error("family {0:?} has no profile curve")]
    NotRotational(FamilyKind),
    #[error("curvature evaluation failed: {0}")]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Hermite(#[from] HermiteError),
    #[error("no samples produced: {0:?}")]
    Empty(Termination),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed csv: {0}")]
    Format(String),
}

/// Geodesic curvature as a function along the curve.
pub trait CurvatureLaw: Send + Sync {
    fn surface(&self) -> Surface2;
    /// `κ_g` at the state `(s, y, y')`.
    fn kappa(&self, s: f64, y: &V3, dy: &V3) -> Result<f64, Halt>;
    /// `dκ_g/ds` along the solution, given also `y''`.
    fn kappa_rate(&self, s: f64, y: &V3, dy: &V3, ddy: &V3) -> Result<f64, Halt>;
    /// Inspects an accepted state; may stop the run.
    fn check(&self, _s: f64, _y: &V3, _dy: &V3) -> Result<(), Halt> {
        Ok(())
    }
}

/// `κ_g(s)` given by a closure returning the value and its derivative.
pub struct FnLaw {
    pub surface: Surface2,
    pub f: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
}

impl FnLaw {
    pub fn constant(surface: Surface2, k: f64) -> Self {
        FnLaw {
            surface,
            f: Arc::new(move |_| (k, 0.0)),
        }
    }
}

impl CurvatureLaw for FnLaw {
    fn surface(&self) -> Surface2 {
        self.surface
    }
    fn kappa(&self, s: f64, _y: &V3, _dy: &V3) -> Result<f64, Halt> {
        Ok((self.f)(s).0)
    }
    fn kappa_rate(&self, s: f64, _y: &V3, _dy: &V3, _ddy: &V3) -> Result<f64, Halt> {
        Ok((self.f)(s).1)
    }
}

fn add(a: &V3, b: &V3, k: f64) -> V3 {
    [a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]]
}

fn scale(a: &V3, k: f64) -> V3 {
    [k * a[0], k * a[1], k * a[2]]
}

/// `y'' = -c y + κ_g J(y, y')`.
fn acceleration(surf: Surface2, y: &V3, dy: &V3, kappa: f64) -> V3 {
    add(&scale(y, -surf.c()), &surf.cross(y, dy), kappa)
}

/// `y''' = -c y' + κ_g' J(y, y') + κ_g J(y, y'')`.
fn jerk(surf: Surface2, y: &V3, dy: &V3, ddy: &V3, kappa: f64, rate: f64) -> V3 {
    let a = add(&scale(dy, -surf.c()), &surf.cross(y, dy), rate);
    add(&a, &surf.cross(y, ddy), kappa)
}

/// One stored sample of a profile curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub s: f64,
    pub y: V3,
    pub dy: V3,
    pub ddy: V3,
    pub dddy: V3,
}

/// Arc-length sampled curve on S² or H² with Hermite dense output.
#[derive(Clone)]
pub struct ProfileCurve {
    pub surface: Surface2,
    pub samples: Vec<CurveSample>,
    pub termination: Termination,
    /// Largest relative constraint defect seen before each projection.
    pub max_drift: f64,
    interp: Hermite,
}

impl fmt::Debug for ProfileCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileCurve")
            .field("surface", &self.surface)
            .field("samples", &self.samples.len())
            .field("span", &self.interp.span())
            .field("termination", &self.termination)
            .finish()
    }
}

impl ProfileCurve {
    /// `levels` is 2 when only `(y, y')` are known and 4 when all four
    /// derivative levels are.
    pub fn from_samples(
        surface: Surface2,
        samples: Vec<CurveSample>,
        levels: usize,
        termination: Termination,
        max_drift: f64,
    ) -> Result<Self, ProfileError> {
        let knots = samples.iter().map(|r| r.s).collect();
        let data = samples
            .iter()
            .map(|r| {
                let mut v = Vec::with_capacity(12);
                for part in [&r.y, &r.dy, &r.ddy, &r.dddy].iter().take(levels) {
                    v.extend_from_slice(&part[..]);
                }
                v
            })
            .collect();
        let interp = Hermite::new(3, levels, knots, data)?;
        Ok(ProfileCurve {
            surface,
            samples,
            termination,
            max_drift,
            interp,
        })
    }

    pub fn span(&self) -> (f64, f64) {
        self.interp.span()
    }

    pub fn eval(&self, s: f64) -> Result<[V3; 4], HermiteError> {
        let v = self.interp.eval(s)?;
        let mut out = [[0.0; 3]; 4];
        for (c, d) in v.iter().enumerate() {
            for k in 0..4 {
                out[k][c] = d[k];
            }
        }
        Ok(out)
    }

    /// `|y(s1) - y(s0)|` in coordinates, between the curve's end points.
    pub fn closing_gap(&self) -> f64 {
        let a = self.samples.first().unwrap().y;
        let b = self.samples.last().unwrap().y;
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), ProfileError> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["s".to_string()];
        for pre in ["y", "dy", "ddy", "dddy"] {
            for i in 1..=3 {
                header.push(format!("{pre}{i}"));
            }
        }
        wr.write_record(&header)?;
        for r in &self.samples {
            let mut row = vec![r.s];
            for part in [r.y, r.dy, r.ddy, r.dddy] {
                row.extend_from_slice(&part);
            }
            wr.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), ProfileError> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads `s, y1..y3, dy1..dy3` (cubic dense output) or the full
    /// thirteen-column form written by [`ProfileCurve::write_csv`].
    pub fn read_csv<R: io::Read>(surface: Surface2, r: R) -> Result<Self, ProfileError> {
        let mut rd = csv::Reader::from_reader(r);
        let mut samples = Vec::new();
        let mut width = None;
        for rec in rd.records() {
            let rec = rec?;
            let v: Vec<f64> = rec
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| ProfileError::Format(e.to_string()))?;
            if v.len() != 7 && v.len() != 13 {
                return Err(ProfileError::Format(format!(
                    "expected 7 or 13 columns, got {}",
                    v.len()
                )));
            }
            if *width.get_or_insert(v.len()) != v.len() {
                return Err(ProfileError::Format("ragged rows".into()));
            }
            let part = |k: usize| -> V3 {
                if 1 + 3 * k + 2 < v.len() {
                    [v[1 + 3 * k], v[2 + 3 * k], v[3 + 3 * k]]
                } else {
                    [0.0; 3]
                }
            };
            samples.push(CurveSample {
                s: v[0],
                y: part(0),
                dy: part(1),
                ddy: part(2),
                dddy: part(3),
            });
        }
        let levels = if width == Some(13) { 4 } else { 2 };
        Self::from_samples(surface, samples, levels, Termination::SpanComplete, 0.0)
    }

    pub fn load_csv(surface: Surface2, path: &Path) -> Result<Self, ProfileError> {
        Self::read_csv(surface, std::fs::File::open(path)?)
    }
}

impl CurveProfile for ProfileCurve {
    fn surface(&self) -> Surface2 {
        self.surface
    }
    fn derivs(&self, s: f64) -> Result<[[f64; 3]; 4], ChartError> {
        self.eval(s).map_err(|e| ChartError::Profile(e.to_string()))
    }
    fn span(&self) -> Option<(f64, f64)> {
        Some(ProfileCurve::span(self))
    }
}

/// Constraint defect scaled by the Euclidean sizes of `y` and `y'`, so that
/// on H² it measures drift rather than the cancellation in `<y, y>` at
/// large `|y|`. On S² it is the plain defect.
pub fn constraint_defect(surf: Surface2, y: &V3, dy: &V3) -> f64 {
    let e2 = |v: &V3| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let (ny, nd) = (e2(y), e2(dy));
    ((surf.inner(y, y) - surf.c()).abs() / ny)
        .max((surf.inner(dy, dy) - 1.0).abs() / nd)
        .max(surf.inner(y, dy).abs() / (ny * nd).sqrt())
}

/// Projects `(y, y')` back to a unit-speed tangent pair on the surface.
fn project(surf: Surface2, y: &mut V3, dy: &mut V3) {
    let q = surf.c() * surf.inner(y, y);
    *y = scale(y, 1.0 / q.sqrt());
    if surf == Surface2::H2 && y[0] < 0.0 {
        *y = scale(y, -1.0);
    }
    let along = surf.c() * surf.inner(y, dy);
    *dy = add(dy, y, -along);
    let n = surf.inner(dy, dy).sqrt();
    *dy = scale(dy, 1.0 / n);
}

/// Integrates `y'' = -c y + κ_g J(y, y')` from `span.0` to `span.1` with
/// RKF45, projecting back onto the constraint after every accepted step.
/// `step` caps the step size (and hence the dense-output spacing).
pub fn integrate_prescribed_curvature(
    law: &dyn CurvatureLaw,
    init: (V3, V3),
    span: (f64, f64),
    step: f64,
) -> Result<ProfileCurve, ProfileError> {
    let surf = law.surface();
    let (y0, dy0) = init;
    let defect = constraint_defect(surf, &y0, &dy0);
    if defect > 1e-9 || (surf == Surface2::H2 && y0[0] <= 0.0) {
        return Err(ProfileError::InitOffSurface { defect });
    }
    let opts = Rkf45Options {
        tol: 1e-10,
        h_init: step.min(1e-3),
        h_min: 1e-12,
        h_max: step,
    };
    let rhs = |s: f64, st: &[f64; 6]| -> Result<[f64; 6], Halt> {
        let y = [st[0], st[1], st[2]];
        let dy = [st[3], st[4], st[5]];
        let k = law.kappa(s, &y, &dy)?;
        let a = acceleration(surf, &y, &dy, k);
        Ok([dy[0], dy[1], dy[2], a[0], a[1], a[2]])
    };
    let mut samples = Vec::new();
    let mut drift = 0.0f64;
    let mut state0 = [0.0; 6];
    state0[..3].copy_from_slice(&y0);
    state0[3..].copy_from_slice(&dy0);
    let term = integrate_rkf45(&rhs, span.0, state0, span.1, &opts, |s, st| {
        let mut y = [st[0], st[1], st[2]];
        let mut dy = [st[3], st[4], st[5]];
        drift = drift.max(constraint_defect(surf, &y, &dy));
        project(surf, &mut y, &mut dy);
        st[..3].copy_from_slice(&y);
        st[3..].copy_from_slice(&dy);
        law.check(s, &y, &dy)?;
        let k = law.kappa(s, &y, &dy)?;
        let ddy = acceleration(surf, &y, &dy, k);
        let rate = law.kappa_rate(s, &y, &dy, &ddy)?;
        let dddy = jerk(surf, &y, &dy, &ddy, k, rate);
        samples.push(CurveSample {
            s,
            y,
            dy,
            ddy,
            dddy,
        });
        Ok(())
    });
    if let Termination::StepUnderflow { s } = term {
        if samples.len() < 2 {
            return Err(ProfileError::StepUnderflow { s });
        }
    }
    if samples.len() < 2 {
        return Err(ProfileError::Empty(term));
    }
    ProfileCurve::from_samples(surf, samples, 4, term, drift)
}

/// Curvature data of the rotational chart induced by a profile 1-jet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureState {
    /// `σ = <J(y, y'), N>`, relating geodesic and normal curvature.
    pub sigma: f64,
    /// Principal curvatures along the two rotation orbits.
    pub k_t: f64,
    pub k_u: f64,
    /// `k₁ = -(k_t + k_u)/3`.
    pub k1: f64,
    /// `d(k_t + k_u)/ds`, present when `y''` was supplied.
    pub rate: Option<f64>,
}

impl ClosureState {
    pub fn kappa_g(&self) -> f64 {
        self.sigma * self.k1
    }

    /// `H = (k₁ + k_t + k_u)/3 = -2k₁/3`.
    pub fn h(&self) -> f64 {
        (self.k1 + self.k_t + self.k_u) / 3.0
    }

    /// `dH/ds = (2/9) d(k_t + k_u)/ds`.
    pub fn dh(&self) -> Option<f64> {
        self.rate.map(|r| 2.0 * r / 9.0)
    }
}

/// The biconservative closure law for a rotational family.
pub struct ClosureLaw {
    pub family: FamilyKind,
    surface: Surface2,
    slots: [usize; 3],
    engine: Engine,
    /// Collision / null-normal threshold.
    pub event_tol: f64,
    /// `|H'|` below which the gradient is taken to vanish.
    pub grad_tol: f64,
    last_dh: std::sync::Mutex<Option<f64>>,
}

fn halt(s: f64, what: impl Into<String>) -> Halt {
    Halt(Termination::Event {
        s,
        what: what.into(),
    })
}

impl ClosureLaw {
    pub fn new(family: FamilyKind) -> Result<Self, ProfileError> {
        let (surface, slots) = match (family.profile_surface(), family.profile_slots()) {
            (Some(s), Some(sl)) => (s, sl),
            _ => return Err(ProfileError::NotRotational(family)),
        };
        Ok(ClosureLaw {
            family,
            surface,
            slots,
            engine: Engine::default(),
            event_tol: 1e-6,
            grad_tol: 1e-10,
            last_dh: std::sync::Mutex::new(None),
        })
    }

    fn ambient(&self) -> Ambient {
        match self.surface {
            Surface2::S2 => Ambient::Sphere,
            Surface2::H2 => Ambient::Hyperbolic,
        }
    }

    /// Principal curvatures of the rotational chart whose profile has the
    /// given Taylor data at `s = 0`, read from the shape operator at
    /// `(0, 0, 0)`. Passing `y''` also yields the rate along the profile.
    pub fn state(&self, y: &V3, dy: &V3, ddy: Option<&V3>) -> Result<ClosureState, ShapeError> {
        let data = [*y, *dy, ddy.copied().unwrap_or([0.0; 3]), [0.0; 3]];
        let profile = TaylorProfile {
            surface: self.surface,
            s0: 0.0,
            data,
        };
        let chart: Chart = build_chart(
            &FamilySpec::Rotational {
                kind: self.family,
                profile: Arc::new(profile),
            },
            Some(ParamBox::new([-0.1; 3], [0.1; 3])),
        )?;
        let order = if ddy.is_some() { 3 } else { 2 };
        let geo = LocalGeometry::new(&chart, &[0.0; 3], order, None, true)?;
        let s = geo.shape_operator()?;
        let k_t = s[1][1].value();
        let k_u = s[2][2].value();
        let rate = ddy.map(|_| s[1][1].gradient()[0] + s[2][2].gradient()[0]);
        let j = self.surface.cross(y, dy);
        let mut jv: Vec5 = [0.0; 5];
        for (c, slot) in self.slots.iter().enumerate() {
            jv[*slot] = j[c];
        }
        let n: Vec5 = geo.normal.map(|c| c.value());
        let sigma = inner(&jv, &n, self.ambient()).signum();
        let _ = self.engine;
        Ok(ClosureState {
            sigma,
            k_t,
            k_u,
            k1: -(k_t + k_u) / 3.0,
            rate,
        })
    }

    /// Classifies a state against the error strata; `None` when regular.
    pub fn event(&self, st: &ClosureState) -> Option<String> {
        let tol = self.event_tol;
        if (st.k1 - st.k_t).abs() < tol || (st.k1 - st.k_u).abs() < tol {
            return Some(format!(
                "curvature collision: k1 = {}, k_t = {}, k_u = {}",
                st.k1, st.k_t, st.k_u
            ));
        }
        if self.surface == Surface2::H2 && (st.k1 * st.k1 - 1.0).abs() < tol {
            return Some(format!("null normal: k1 = {}", st.k1));
        }
        if let Some(dh) = st.dh() {
            if dh.abs() < self.grad_tol {
                return Some(format!("gradient vanishes: H' = {dh:e}"));
            }
        }
        None
    }
}

impl CurvatureLaw for ClosureLaw {
    fn surface(&self) -> Surface2 {
        self.surface
    }

    fn kappa(&self, s: f64, y: &V3, dy: &V3) -> Result<f64, Halt> {
        let st = self
            .state(y, dy, None)
            .map_err(|e| halt(s, e.to_string()))?;
        Ok(st.kappa_g())
    }

    fn kappa_rate(&self, s: f64, y: &V3, dy: &V3, ddy: &V3) -> Result<f64, Halt> {
        let st = self
            .state(y, dy, Some(ddy))
            .map_err(|e| halt(s, e.to_string()))?;
        Ok(st.sigma * -st.rate.unwrap() / 3.0)
    }

    fn check(&self, s: f64, y: &V3, dy: &V3) -> Result<(), Halt> {
        let st0 = self
            .state(y, dy, None)
            .map_err(|e| halt(s, e.to_string()))?;
        let ddy = acceleration(self.surface, y, dy, st0.kappa_g());
        let st = self
            .state(y, dy, Some(&ddy))
            .map_err(|e| halt(s, e.to_string()))?;
        if let Some(what) = self.event(&st) {
            return Err(halt(s, what));
        }
        let dh = st.dh().unwrap();
        let mut last = self.last_dh.lock().unwrap();
        if let Some(prev) = *last {
            if prev.signum() != dh.signum() {
                return Err(halt(
                    s,
                    format!("gradient vanishes: H' changed sign at s = {s}"),
                ));
            }
        }
        *last = Some(dh);
        Ok(())
    }
}

/// Integrates the biconservative profile of a rotational family: the
/// geodesic curvature is chosen at every step so that `k₁ = -(k_t + k_u)/3`,
/// which is the trace rule `3k₁ + k₂ + k₃ = 0`. Stops early (recording the
/// reason) if the run reaches a curvature collision, a null normal or a
/// critical point of `H`; the same conditions at the initial point are
/// errors.
pub fn close_biconservative_profile(
    family: FamilyKind,
    init: (V3, V3),
    span: (f64, f64),
    step: f64,
) -> Result<ProfileCurve, ProfileError> {
    let law = ClosureLaw::new(family)?;
    let (y0, dy0) = init;
    let st0 = law.state(&y0, &dy0, None)?;
    let ddy0 = acceleration(law.surface, &y0, &dy0, st0.kappa_g());
    let st = law.state(&y0, &dy0, Some(&ddy0))?;
    let tol = law.event_tol;
    for other in [st.k_t, st.k_u] {
        if (st.k1 - other).abs() < tol {
            return Err(ProfileError::CurvatureCollision { k1: st.k1, other });
        }
    }
    if law.surface == Surface2::H2 && (st.k1 * st.k1 - 1.0).abs() < tol {
        return Err(ProfileError::NullNormal);
    }
    let dh = st.dh().unwrap();
    if dh.abs() < law.grad_tol {
        return Err(ProfileError::GradientVanishes { dh });
    }
    integrate_prescribed_curvature(&law, init, span, step)
}

/// A curve in E⁵ / E⁵₁ known through derivatives at any parameter (any speed).
pub trait CurveJet {
    fn ambient(&self) -> Ambient;
    /// `[γ, γ', γ'', γ''']` at `s`.
    fn derivs(&self, s: f64) -> Result<[Vec5; 4], ChartError>;
}

/// The coordinate line `s -> x(s, t0, u0)` of a chart.
pub struct ChartCurve<'a> {
    pub chart: &'a Chart,
    pub t0: f64,
    pub u0: f64,
}

impl CurveJet for ChartCurve<'_> {
    fn ambient(&self) -> Ambient {
        self.chart.ambient
    }

    fn derivs(&self, s: f64) -> Result<[Vec5; 4], ChartError> {
        let x = self.chart.eval(&[s, self.t0, self.u0], 3)?;
        let mut out = [[0.0; 5]; 4];
        for (k, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = x[c].extract(&[k, 0, 0]).expect("order 3 jet");
            }
        }
        Ok(out)
    }
}

/// An analytic curve given by a closure.
pub struct FnCurve<F: Fn(f64) -> [Vec5; 4]> {
    pub ambient: Ambient,
    pub f: F,
}

impl<F: Fn(f64) -> [Vec5; 4]> CurveJet for FnCurve<F> {
    fn ambient(&self) -> Ambient {
        self.ambient
    }
    fn derivs(&self, s: f64) -> Result<[Vec5; 4], ChartError> {
        Ok((self.f)(s))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrenetError {
    #[error("curvature vanishes; Frenet frame undefined")]
    DegenerateFrenet,
    #[error("Frenet normal is a null vector")]
    NullNormal,
    #[error("tangent is not spacelike")]
    NonSpacelikeTangent,
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    pub kappa: f64,
    /// `<n', b>` in arc length; its sign depends on the orientation of `b`.
    pub tau: f64,
    pub t: Vec5,
    pub n: Vec5,
    /// Zero when the curve is planar at this point.
    pub b: Vec5,
    /// Causal character `<n, n>` of the normal (±1).
    pub eps_n: f64,
    /// Causal character of the binormal (±1, or 0 when undefined).
    pub eps_b: f64,
}

/// Frenet apparatus at parameter `s` of a regular curve of any speed; the
/// derivatives are converted to arc length with jets.
pub fn frenet(curve: &dyn CurveJet, s: f64) -> Result<FrenetData, FrenetError> {
    let amb = curve.ambient();
    let d = curve.derivs(s)?;
    let y: [Jet; 5] = std::array::from_fn(|c| {
        Jet::variable(s, 0, 1, 3).compose([d[0][c], d[1][c], d[2][c], d[3][c]])
    });
    let dy = y.map(|j| j.derivative(0));
    let speed2 = inner_g(&dy, &dy, amb);
    if speed2.value() <= 0.0 {
        return Err(FrenetError::NonSpacelikeTangent);
    }
    let inv_speed = speed2
        .sqrt()
        .and_then(|v| v.recip())
        .map_err(|_| FrenetError::NonSpacelikeTangent)?;
    let t_jet = dy.map(|j| j * inv_speed);
    let a_jet = t_jet.map(|j| j.derivative(0) * inv_speed.truncate(1));
    let j_jet = a_jet.map(|j| j.derivative(0) * inv_speed.truncate(0));
    let t = t_jet.map(|j| j.value());
    let acc = a_jet.map(|j| j.value());
    let jerk = j_jet.map(|j| j.value());
    let ip = |u: &Vec5, v: &Vec5| inner(u, v, amb);
    let sub = |u: &Vec5, v: &Vec5, k: f64| -> Vec5 { std::array::from_fn(|i| u[i] - k * v[i]) };

    let a = sub(&acc, &t, ip(&acc, &t) / ip(&t, &t));
    let a2 = ip(&a, &a);
    let euclid = |v: &Vec5| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a_size = euclid(&a);
    if a_size < 1e-10 {
        return Err(FrenetError::DegenerateFrenet);
    }
    if a2.abs() < 1e-10 * a_size * a_size {
        return Err(FrenetError::NullNormal);
    }
    let kappa = a2.abs().sqrt();
    let n: Vec5 = a.map(|v| v / kappa);
    let eps_n = a2.signum();
    let r = sub(&jerk, &t, ip(&jerk, &t) / ip(&t, &t));
    let r = sub(&r, &n, ip(&r, &n) / ip(&n, &n));
    let r2 = ip(&r, &r);
    let r_size = euclid(&r);
    let (b, eps_b, tau) = if r_size < 1e-9 * (1.0 + euclid(&jerk)) {
        ([0.0; 5], 0.0, 0.0)
    } else {
        if r2.abs() < 1e-10 * r_size * r_size {
            return Err(FrenetError::NullNormal);
        }
        let b: Vec5 = r.map(|v| v / r2.abs().sqrt());
        let tau = ip(&jerk, &b) / kappa;
        (b, r2.signum(), tau)
    };
    Ok(FrenetData {
        kappa,
        tau,
        t,
        n,
        b,
        eps_n,
        eps_b,
    })
}

/// Curvature and torsion predicted for an `e₁`-integral curve of a
/// biconservative hypersurface from `H` and `e₁(H)` (torsion as a magnitude).
pub fn predicted_frenet(ambient: Ambient, h: f64, e1h: f64) -> (f64, f64) {
    match ambient {
        Ambient::Sphere => {
            let q = 4.0 + 9.0 * h * h;
            ((1.0 + 2.25 * h * h).sqrt(), 6.0 * e1h.abs() / q)
        }
        Ambient::Hyperbolic => {
            let q = (9.0 * h * h - 4.0).abs();
            (0.5 * q.sqrt(), 6.0 * e1h.abs() / q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_and_helix() {
        let circle = FnCurve {
            ambient: Ambient::Sphere,
            f: |s: f64| {
                let (sn, cs) = s.sin_cos();
                [
                    [cs, sn, 0.0, 0.0, 0.0],
                    [-sn, cs, 0.0, 0.0, 0.0],
                    [-cs, -sn, 0.0, 0.0, 0.0],
                    [sn, -cs, 0.0, 0.0, 0.0],
                ]
            },
        };
        let f = frenet(&circle, 0.3).unwrap();
        assert!((f.kappa - 1.0).abs() < 1e-14 && f.tau.abs() < 1e-14);

        let a = 0.5f64.sqrt();
        let helix = FnCurve {
            ambient: Ambient::Sphere,
            f: move |s: f64| {
                let (sn, cs) = s.sin_cos();
                [
                    [a * cs, a * sn, a * s, 0.0, 0.0],
                    [-a * sn, a * cs, a, 0.0, 0.0],
                    [-a * cs, -a * sn, 0.0, 0.0, 0.0],
                    [a * sn, -a * cs, 0.0, 0.0, 0.0],
                ]
            },
        };
        let f = frenet(&helix, 1.1).unwrap();
        assert!((f.kappa - a).abs() < 1e-14, "{}", f.kappa);
        assert!((f.tau.abs() - a).abs() < 1e-14, "{}", f.tau);
    }

    #[test]
    fn frenet_is_speed_invariant() {
        // circle of radius 2 traversed at speed 6
        let c = FnCurve {
            ambient: Ambient::Sphere,
            f: |s: f64| {
                let (sn, cs) = (3.0 * s).sin_cos();
                [
                    [2.0 * cs, 2.0 * sn, 0.0, 0.0, 0.0],
                    [-6.0 * sn, 6.0 * cs, 0.0, 0.0, 0.0],
                    [-18.0 * cs, -18.0 * sn, 0.0, 0.0, 0.0],
                    [54.0 * sn, -54.0 * cs, 0.0, 0.0, 0.0],
                ]
            },
        };
        let f = frenet(&c, 0.2).unwrap();
        assert!((f.kappa - 0.5).abs() < 1e-14);
    }

    #[test]
    fn straight_line_is_degenerate() {
        let l = FnCurve {
            ambient: Ambient::Sphere,
            f: |s: f64| {
                [
                    [s, 0.0, 0.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0, 0.0, 0.0],
                    [0.0; 5],
                    [0.0; 5],
                ]
            },
        };
        assert_eq!(frenet(&l, 0.0).unwrap_err(), FrenetError::DegenerateFrenet);
    }

    #[test]
    fn init_off_surface() {
        let law = FnLaw::constant(Surface2::S2, 0.0);
        let r = integrate_prescribed_curvature(
            &law,
            ([1.0, 0.1, 0.0], [0.0, 1.0, 0.0]),
            (0.0, 1.0),
            1e-2,
        );
        assert!(matches!(r, Err(ProfileError::InitOffSurface { .. })));
    }
}
