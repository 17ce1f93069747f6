//! Hypersurface charts `x(s, t, u)` into S⁴ ⊂ E⁵ and H⁴ ⊂ E⁵₁, plus the flat
//! 2-parameter surfaces that appear as their level sets.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{Jet, JetError};
use crate::linalg::{cross4_g, inner, Ambient, Vec5};

pub type Point3 = [f64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("domain touches a singular locus: {0}")]
    SingularDomain(String),
    #[error("point {point:?} is outside the chart domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("profile cannot be evaluated: {0}")]
    Profile(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Axis-aligned parameter box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub lo: Point3,
    pub hi: Point3,
}

impl ParamBox {
    pub fn new(lo: Point3, hi: Point3) -> Self {
        ParamBox { lo, hi }
    }

    pub fn center(&self) -> Point3 {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
            0.5 * (self.lo[2] + self.hi[2]),
        ]
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|k| {
            let slack = 1e-12 * (1.0 + self.lo[k].abs().max(self.hi[k].abs()));
            p[k] >= self.lo[k] - slack && p[k] <= self.hi[k] + slack
        })
    }

    /// Same box with axis `k` replaced by `[lo, hi]`.
    pub fn with_axis(mut self, k: usize, lo: f64, hi: f64) -> Self {
        self.lo[k] = lo;
        self.hi[k] = hi;
        self
    }

    /// Shrinks every side towards the centre by the given fraction.
    pub fn shrink(&self, frac: f64) -> Self {
        let mut b = *self;
        for k in 0..3 {
            let w = self.hi[k] - self.lo[k];
            b.lo[k] += frac * w;
            b.hi[k] -= frac * w;
        }
        b
    }
}

/// Target surface of a profile curve: S²(1) ⊂ E³ or H²(-1) ⊂ E³₁.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface2 {
    S2,
    H2,
}

impl Surface2 {
    pub fn c(self) -> f64 {
        match self {
            Surface2::S2 => 1.0,
            Surface2::H2 => -1.0,
        }
    }

    pub fn inner(self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        let first = u[0] * v[0];
        let rest = u[1] * v[1] + u[2] * v[2];
        match self {
            Surface2::S2 => first + rest,
            Surface2::H2 => rest - first,
        }
    }

    /// The cross product of E³, or its Lorentzian counterpart `J(u × v)`
    /// with `J = diag(-1, 1, 1)`.
    pub fn cross(self, u: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
        let w = crate::linalg::cross3(u, v);
        match self {
            Surface2::S2 => w,
            Surface2::H2 => [-w[0], w[1], w[2]],
        }
    }
}

/// A scalar function of `s` with three derivatives, such as the `A(s)` of
/// families 3 and 4.
pub trait ScalarProfile: Send + Sync + fmt::Debug {
    /// `[f, f', f'', f''']` at `s`.
    fn derivs(&self, s: f64) -> Result<[f64; 4], ChartError>;
    /// Interval on which the profile is defined; `None` means everywhere.
    fn span(&self) -> Option<(f64, f64)> {
        None
    }
}

/// A curve `s -> y(s)` in S² or H² with three derivatives.
pub trait CurveProfile: Send + Sync + fmt::Debug {
    fn surface(&self) -> Surface2;
    /// `[y, y', y'', y''']` at `s`.
    fn derivs(&self, s: f64) -> Result<[[f64; 3]; 4], ChartError>;
    fn span(&self) -> Option<(f64, f64)> {
        None
    }
}

/// `A(s) = Σ coeffs[k] s^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    /// The identity profile `A(s) = s`.
    pub fn identity() -> Self {
        Polynomial {
            coeffs: vec![0.0, 1.0],
        }
    }

    pub fn eval_derivs(&self, s: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, c) in self.coeffs.iter().enumerate() {
            let mut fall = 1.0;
            for (d, slot) in out.iter_mut().enumerate() {
                if d > k {
                    break;
                }
                *slot += c * fall * s.powi((k - d) as i32);
                fall *= (k - d) as f64;
            }
        }
        out
    }
}

impl ScalarProfile for Polynomial {
    fn derivs(&self, s: f64) -> Result<[f64; 4], ChartError> {
        Ok(self.eval_derivs(s))
    }
}

/// A curve known only through its Taylor data at one parameter. Used to build
/// a chart that is exact to third order at `s0`; it does not stay on the
/// target surface away from `s0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorProfile {
    pub surface: Surface2,
    pub s0: f64,
    pub data: [[f64; 3]; 4],
}

impl CurveProfile for TaylorProfile {
    fn surface(&self) -> Surface2 {
        self.surface
    }

    fn derivs(&self, s: f64) -> Result<[[f64; 3]; 4], ChartError> {
        let h = s - self.s0;
        let d = &self.data;
        let mut out = [[0.0; 3]; 4];
        for i in 0..3 {
            out[0][i] = d[0][i] + h * (d[1][i] + h * (d[2][i] / 2.0 + h * d[3][i] / 6.0));
            out[1][i] = d[1][i] + h * (d[2][i] + h * d[3][i] / 2.0);
            out[2][i] = d[2][i] + h * d[3][i];
            out[3][i] = d[3][i];
        }
        Ok(out)
    }
}

/// Unit-speed circle on S² at polar angle `theta` from the first axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatitudeCircle {
    pub theta: f64,
}

impl CurveProfile for LatitudeCircle {
    fn surface(&self) -> Surface2 {
        Surface2::S2
    }

    fn derivs(&self, s: f64) -> Result<[[f64; 3]; 4], ChartError> {
        let (st, ct) = self.theta.sin_cos();
        let w = 1.0 / st;
        let (sn, cs) = (s * w).sin_cos();
        Ok([
            [ct, st * cs, st * sn],
            [0.0, -sn, cs],
            [0.0, -w * cs, -w * sn],
            [0.0, w * w * sn, -w * w * cs],
        ])
    }
}

/// Maps parameter jets `(s, t, u)` to the five ambient coordinate jets.
pub trait ChartMap: Send + Sync {
    fn eval(&self, v: &[Jet; 3]) -> Result<[Jet; 5], ChartError>;
}

impl<F> ChartMap for F
where
    F: Fn(&[Jet; 3]) -> Result<[Jet; 5], ChartError> + Send + Sync,
{
    fn eval(&self, v: &[Jet; 3]) -> Result<[Jet; 5], ChartError> {
        self(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    EquatorS3,
    SmallSphereS3,
    S4Rotational,
    H4Family1,
    H4Family2,
    H4Family3,
    H4Family4,
    /// Family-3 chart with the first profile function constant.
    CmcFamily3,
    RandomAnalytic,
    Custom,
}

impl FamilyKind {
    /// Ambient coordinates spanned by the profile curve at `t = u = 0`.
    pub fn profile_slots(self) -> Option<[usize; 3]> {
        match self {
            FamilyKind::S4Rotational | FamilyKind::H4Family1 => Some([0, 1, 3]),
            FamilyKind::H4Family2 => Some([0, 2, 4]),
            _ => None,
        }
    }

    pub fn profile_surface(self) -> Option<Surface2> {
        match self {
            FamilyKind::S4Rotational => Some(Surface2::S2),
            FamilyKind::H4Family1 | FamilyKind::H4Family2 => Some(Surface2::H2),
            _ => None,
        }
    }
}

/// Construction recipe for every chart family.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    EquatorS3,
    /// The slice `x₁ = height` of S⁴, a round 3-sphere.
    SmallSphereS3 {
        height: f64,
    },
    Rotational {
        kind: FamilyKind,
        profile: Arc<dyn CurveProfile>,
    },
    H4Family3 {
        a: f64,
        profile: Arc<dyn ScalarProfile>,
    },
    H4Family4 {
        a: f64,
        profile: Arc<dyn ScalarProfile>,
    },
    /// Family 3 with constant first profile function `c`; `radius` plays the
    /// role of the remaining free function.
    CmcFamily3 {
        a: f64,
        c: f64,
        radius: Arc<dyn ScalarProfile>,
    },
    RandomAnalytic {
        ambient: Ambient,
        seed: u64,
    },
}

/// An immutable hypersurface chart.
#[derive(Clone)]
pub struct Chart {
    pub kind: FamilyKind,
    pub ambient: Ambient,
    pub domain: ParamBox,
    map: Arc<dyn ChartMap>,
    /// ±1 fixing the orientation of the unit normal over the whole chart.
    pub normal_sign: f64,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("kind", &self.kind)
            .field("ambient", &self.ambient)
            .field("domain", &self.domain)
            .field("normal_sign", &self.normal_sign)
            .finish()
    }
}

/// Jets of the three coordinate functions at `p`.
pub fn param_jets(p: &Point3, order: usize) -> [Jet; 3] {
    [
        Jet::variable(p[0], 0, 3, order),
        Jet::variable(p[1], 1, 3, order),
        Jet::variable(p[2], 2, 3, order),
    ]
}

impl Chart {
    /// Wraps an arbitrary map. The normal orientation is fixed at the domain
    /// centre: the first nonzero component of the unnormalized normal is
    /// made positive.
    pub fn custom(
        kind: FamilyKind,
        ambient: Ambient,
        domain: ParamBox,
        map: Arc<dyn ChartMap>,
    ) -> Result<Chart, ChartError> {
        let mut chart = Chart {
            kind,
            ambient,
            domain,
            map,
            normal_sign: 1.0,
        };
        chart.normal_sign = chart.anchor_sign()?;
        Ok(chart)
    }

    fn anchor_sign(&self) -> Result<f64, ChartError> {
        let x = self.eval(&self.domain.center(), 1)?;
        let w = raw_normal(&x, self.ambient);
        let scale = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            return Err(ChartError::SingularDomain(
                "coordinate tangents are dependent at the domain centre".into(),
            ));
        }
        let first = w.iter().find(|v| v.abs() > 1e-12 * scale).unwrap();
        Ok(first.signum())
    }

    /// Ambient coordinate jets at `p`, to the given order.
    pub fn eval(&self, p: &Point3, order: usize) -> Result<[Jet; 5], ChartError> {
        if !self.domain.contains(p) || p.iter().any(|v| !v.is_finite()) {
            return Err(ChartError::OutOfDomain { point: p.to_vec() });
        }
        self.map.eval(&param_jets(p, order))
    }

    /// Evaluation without the domain check, for finite-difference stencils
    /// that step just past the boundary.
    pub fn eval_unchecked(&self, p: &Point3, order: usize) -> Result<[Jet; 5], ChartError> {
        self.map.eval(&param_jets(p, order))
    }

    pub fn point(&self, p: &Point3) -> Result<Vec5, ChartError> {
        let x = self.eval(p, 0)?;
        Ok(x.map(|j| j.value()))
    }

    /// `|<x, x> - c|` at `p`.
    pub fn membership_defect(&self, p: &Point3) -> Result<f64, ChartError> {
        let x = self.point(p)?;
        Ok((inner(&x, &x, self.ambient) - self.ambient.c()).abs())
    }

    /// The same chart with the opposite normal orientation.
    pub fn flipped(&self) -> Chart {
        let mut c = self.clone();
        c.normal_sign = -c.normal_sign;
        c
    }

    pub fn with_domain(&self, domain: ParamBox) -> Chart {
        let mut c = self.clone();
        c.domain = domain;
        c
    }
}

/// Unnormalized normal `cross4(x_s, x_t, x_u, x)` from first-order jets.
pub fn raw_normal(x: &[Jet; 5], amb: Ambient) -> Vec5 {
    let d = |k: usize| -> Vec5 { x.map(|j| j.gradient()[k]) };
    let v = [d(0), d(1), d(2), x.map(|j| j.value())];
    cross4_g(&v, amb)
}

fn check_profile_span(span: Option<(f64, f64)>, lo: f64, hi: f64) -> Result<(), ChartError> {
    if let Some((a, b)) = span {
        let slack = 1e-9 * (1.0 + a.abs().max(b.abs()));
        if lo < a - slack || hi > b + slack {
            return Err(ChartError::Profile(format!(
                "profile defined on [{a}, {b}] but the chart needs [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

fn compose_scalar(p: &dyn ScalarProfile, s: &Jet) -> Result<Jet, ChartError> {
    Ok(s.compose(p.derivs(s.value())?))
}

fn compose_curve(p: &dyn CurveProfile, s: &Jet) -> Result<[Jet; 3], ChartError> {
    let d = p.derivs(s.value())?;
    Ok([0, 1, 2].map(|i| s.compose([d[0][i], d[1][i], d[2][i], d[3][i]])))
}

fn default_domain(kind: FamilyKind) -> ParamBox {
    match kind {
        FamilyKind::EquatorS3 | FamilyKind::SmallSphereS3 => {
            ParamBox::new([0.4, 0.4, -2.5], [2.7, 2.7, 2.5])
        }
        FamilyKind::RandomAnalytic => ParamBox::new([-0.25; 3], [0.25; 3]),
        _ => ParamBox::new([0.5, -PI, -1.0], [1.5, PI, 1.0]),
    }
}

/// Builds a chart for `spec` on `domain` (or a family default when `None`).
pub fn build_chart(spec: &FamilySpec, domain: Option<ParamBox>) -> Result<Chart, ChartError> {
    match spec {
        FamilySpec::EquatorS3 => {
            let dom = domain.unwrap_or(default_domain(FamilyKind::EquatorS3));
            let map = |v: &[Jet; 3]| -> Result<[Jet; 5], ChartError> {
                let [s, t, u] = v;
                let zero = s.lift(0.0);
                Ok([
                    s.cos(),
                    s.sin() * t.cos(),
                    s.sin() * t.sin() * u.cos(),
                    s.sin() * t.sin() * u.sin(),
                    zero,
                ])
            };
            Chart::custom(FamilyKind::EquatorS3, Ambient::Sphere, dom, Arc::new(map))
        }
        FamilySpec::SmallSphereS3 { height } => {
            let h = *height;
            if !(h.abs() < 1.0) {
                return Err(ChartError::ConstraintViolation(format!(
                    "slice height {h} must lie in (-1, 1)"
                )));
            }
            let r = (1.0 - h * h).sqrt();
            let dom = domain.unwrap_or(default_domain(FamilyKind::SmallSphereS3));
            let map = move |v: &[Jet; 3]| -> Result<[Jet; 5], ChartError> {
                let [s, t, u] = v;
                Ok([
                    s.lift(h),
                    s.cos() * r,
                    s.sin() * t.cos() * r,
                    s.sin() * t.sin() * u.cos() * r,
                    s.sin() * t.sin() * u.sin() * r,
                ])
            };
            Chart::custom(
                FamilyKind::SmallSphereS3,
                Ambient::Sphere,
                dom,
                Arc::new(map),
            )
        }
        FamilySpec::Rotational { kind, profile } => {
            build_rotational(*kind, profile.clone(), domain)
        }
        FamilySpec::H4Family3 { a, profile } => build_family3(*a, profile.clone(), domain),
        FamilySpec::H4Family4 { a, profile } => build_family4(*a, profile.clone(), domain),
        FamilySpec::CmcFamily3 { a, c, radius } => build_cmc(*a, *c, radius.clone(), domain),
        FamilySpec::RandomAnalytic { ambient, seed } => random_analytic(*ambient, *seed, domain),
    }
}

fn build_rotational(
    kind: FamilyKind,
    profile: Arc<dyn CurveProfile>,
    domain: Option<ParamBox>,
) -> Result<Chart, ChartError> {
    let (ambient, want) = match kind {
        FamilyKind::S4Rotational => (Ambient::Sphere, Surface2::S2),
        FamilyKind::H4Family1 | FamilyKind::H4Family2 => (Ambient::Hyperbolic, Surface2::H2),
        other => {
            return Err(ChartError::ConstraintViolation(format!(
                "{other:?} is not a rotational family"
            )))
        }
    };
    if profile.surface() != want {
        return Err(ChartError::ConstraintViolation(format!(
            "{kind:?} needs a profile on {want:?}"
        )));
    }
    let dom = match domain {
        Some(d) => d,
        None => {
            let (a, b) = profile.span().unwrap_or((0.0, 1.0));
            default_domain(kind).with_axis(0, a, b)
        }
    };
    check_profile_span(profile.span(), dom.lo[0], dom.hi[0])?;
    let hyperbolic_block = kind == FamilyKind::H4Family2;
    let map = move |v: &[Jet; 3]| -> Result<[Jet; 5], ChartError> {
        let [s, t, u] = v;
        let a = compose_curve(profile.as_ref(), s)?;
        if hyperbolic_block {
            Ok([
                a[0] * u.cosh(),
                a[0] * u.sinh(),
                a[1] * t.cos(),
                a[1] * t.sin(),
                a[2],
            ])
        } else {
            Ok([
                a[0],
                a[1] * t.cos(),
                a[1] * t.sin(),
                a[2] * u.cos(),
                a[2] * u.sin(),
            ])
        }
    };
    Chart::custom(kind, ambient, dom, Arc::new(map))
}

fn require_nonzero_a(a: f64) -> Result<(), ChartError> {
    if a == 0.0 || !a.is_finite() {
        return Err(ChartError::ConstraintViolation(format!(
            "constant a = {a} must be nonzero"
        )));
    }
    Ok(())
}

fn require_s_span(dom: &ParamBox) -> Result<(), ChartError> {
    if dom.lo[0] <= 0.0 && dom.hi[0] >= 0.0 {
        return Err(ChartError::SingularDomain(format!(
            "s-span [{}, {}] contains s = 0",
            dom.lo[0], dom.hi[0]
        )));
    }
    Ok(())
}

/// Rejects an s-span on which the profile has a zero.
fn require_nonvanishing(p: &dyn ScalarProfile, lo: f64, hi: f64) -> Result<(), ChartError> {
    let n = 400;
    let mut sign = 0.0;
    for i in 0..=n {
        let s = lo + (hi - lo) * i as f64 / n as f64;
        let a = p.derivs(s)?[0];
        if a == 0.0 || (sign != 0.0 && a.signum() != sign) {
            return Err(ChartError::SingularDomain(format!(
                "A vanishes near s = {s}"
            )));
        }
        sign = a.signum();
    }
    Ok(())
}

fn build_family3(
    a: f64,
    profile: Arc<dyn ScalarProfile>,
    domain: Option<ParamBox>,
) -> Result<Chart, ChartError> {
    require_nonzero_a(a)?;
    let dom = domain.unwrap_or_else(|| match profile.span() {
        Some((lo, hi)) => default_domain(FamilyKind::H4Family3).with_axis(0, lo, hi),
        None => default_domain(FamilyKind::H4Family3),
    });
    require_s_span(&dom)?;
    check_profile_span(profile.span(), dom.lo[0], dom.hi[0])?;
    require_nonvanishing(profile.as_ref(), dom.lo[0], dom.hi[0])?;
    let map = move |v: &[Jet; 3]| -> Result<[Jet; 5], ChartError> {
        let [s, t, u] = v;
        let am = compose_scalar(profile.as_ref(), s)?;
        let inv_s = s.recip()?;
        let common = (am * am + 1.0) * inv_s * a + *s * *u * *u * a;
        let q = *s * (0.25 / a);
        Ok([common + q, *s * *u, am * t.cos(), am * t.sin(), common - q])
    };
    Chart::custom(
        FamilyKind::H4Family3,
        Ambient::Hyperbolic,
        dom,
        Arc::new(map),
    )
}

fn build_family4(
    a: f64,
    profile: Arc<dyn ScalarProfile>,
    domain: Option<ParamBox>,
) -> Result<Chart, ChartError> {
    require_nonzero_a(a)?;
    let dom = domain.unwrap_or_else(|| match profile.span() {
        Some((lo, hi)) => default_domain(FamilyKind::H4Family4).with_axis(0, lo, hi),
        None => default_domain(FamilyKind::H4Family4),
    });
    require_s_span(&dom)?;
    check_profile_span(profile.span(), dom.lo[0], dom.hi[0])?;
    let map = move |v: &[Jet; 3]| -> Result<[Jet; 5], ChartError> {
        let [s, t, u] = v;
        let am = compose_scalar(profile.as_ref(), s)?;
        let inv_s = s.recip()?;
        let common = (am * am + 1.0) * inv_s * a + *s * (*t * *t + *u * *u) * a;
        let q = *s * (0.25 / a);
        Ok([common + q, *s * *t, *s * *u, am, common - q])
    };
    Chart::custom(
        FamilyKind::H4Family4,
        Ambient::Hyperbolic,
        dom,
        Arc::new(map),
    )
}

fn build_cmc(
    a: f64,
    c: f64,
    radius: Arc<dyn ScalarProfile>,
    domain: Option<ParamBox>,
) -> Result<Chart, ChartError> {
    require_nonzero_a(a)?;
    if c == 0.0 || !c.is_finite() {
        return Err(ChartError::ConstraintViolation(format!(
            "constant c = {c} must be nonzero"
        )));
    }
    let dom = domain.unwrap_or(default_domain(FamilyKind::CmcFamily3));
    check_profile_span(radius.span(), dom.lo[0], dom.hi[0])?;
    require_nonvanishing(radius.as_ref(), dom.lo[0], dom.hi[0])?;
    let map = move |v: &[Jet; 3]| -> Result<[Jet; 5], ChartError> {
        let [s, t, u] = v;
        let r = compose_scalar(radius.as_ref(), s)?;
        let common = r * r * (a / c) + (*u * *u * c + 1.0 / c) * a;
        let q = c / (4.0 * a);
        Ok([common + q, *u * c, r * t.cos(), r * t.sin(), common - q])
    };
    Chart::custom(
        FamilyKind::CmcFamily3,
        Ambient::Hyperbolic,
        dom,
        Arc::new(map),
    )
}

/// Coefficients of a seeded analytic map `f = base + L p + Σ amp sin(ω·p + φ)`
/// projected onto the space form.
#[derive(Clone, Debug)]
struct RandomMap {
    ambient: Ambient,
    base: Vec5,
    linear: [[f64; 3]; 5],
    amp: Vec5,
    freq: [[f64; 3]; 5],
    phase: Vec5,
}

impl RandomMap {
    fn new(ambient: Ambient, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut base = [0.0; 5];
        let mut linear = [[0.0; 3]; 5];
        let mut amp = [0.0; 5];
        let mut freq = [[0.0; 3]; 5];
        let mut phase = [0.0; 5];
        for k in 0..5 {
            base[k] = rng.gen_range(-0.5..0.5);
            for j in 0..3 {
                linear[k][j] = rng.gen_range(-1.0..1.0);
                freq[k][j] = rng.gen_range(-2.0..2.0);
            }
            amp[k] = rng.gen_range(-0.3..0.3);
            phase[k] = rng.gen_range(0.0..2.0 * PI);
        }
        match ambient {
            Ambient::Sphere => base[0] += 1.5,
            Ambient::Hyperbolic => base[0] = 3.0 + rng.gen_range(0.0..0.5),
        }
        RandomMap {
            ambient,
            base,
            linear,
            amp,
            freq,
            phase,
        }
    }

    fn eval(&self, v: &[Jet; 3]) -> Result<[Jet; 5], ChartError> {
        let mut f = [v[0]; 5];
        for k in 0..5 {
            let mut lin = v[0].lift(self.base[k]);
            let mut arg = v[0].lift(self.phase[k]);
            for j in 0..3 {
                lin = lin + v[j] * self.linear[k][j];
                arg = arg + v[j] * self.freq[k][j];
            }
            f[k] = lin + arg.sin() * self.amp[k];
        }
        let q = crate::linalg::inner_g(&f, &f, self.ambient);
        let norm = match self.ambient {
            Ambient::Sphere => q.sqrt()?,
            Ambient::Hyperbolic => (-q).sqrt()?,
        };
        let inv = norm.recip()?;
        Ok(f.map(|c| c * inv))
    }
}

/// A seeded random analytic chart on `[-0.25, 0.25]³` (by default).
pub fn random_analytic(
    ambient: Ambient,
    seed: u64,
    domain: Option<ParamBox>,
) -> Result<Chart, ChartError> {
    let dom = domain.unwrap_or(default_domain(FamilyKind::RandomAnalytic));
    let m = RandomMap::new(ambient, seed);
    let map = move |v: &[Jet; 3]| m.eval(v);
    Chart::custom(FamilyKind::RandomAnalytic, ambient, dom, Arc::new(map))
}

/// The flat surfaces `Θ(t, u)` arising as level sets `s = const`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlatKind {
    TorusS4,
    BH1,
    BH2,
    BH3,
    BH4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatSurface {
    pub kind: FlatKind,
    pub a: f64,
    pub b: f64,
    /// Forced by the constraint for the torus and BH1/BH2; unused for BH3;
    /// the constant fourth coordinate for BH4.
    pub c: f64,
}

/// Builds a flat surface. For the torus, BH1 and BH2 the constant `c` is
/// solved from the constraint (positive root) unless given, in which case it
/// is checked.
pub fn build_flat_surface(
    kind: FlatKind,
    a: f64,
    b: f64,
    c: Option<f64>,
) -> Result<FlatSurface, ChartError> {
    if a == 0.0 || b == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(ChartError::ConstraintViolation(
            "a and b must be nonzero".into(),
        ));
    }
    let ia2 = 1.0 / (a * a);
    let ib2 = 1.0 / (b * b);
    let c2 = match kind {
        FlatKind::TorusS4 => 1.0 - ia2 - ib2,
        FlatKind::BH1 => 1.0 + ia2 + ib2,
        FlatKind::BH2 => ia2 - ib2 - 1.0,
        FlatKind::BH3 => 0.0,
        FlatKind::BH4 => -0.25 * ia2 + b / a - 1.0,
    };
    if c2 < 0.0 {
        return Err(ChartError::ConstraintViolation(format!(
            "{kind:?} with a = {a}, b = {b} needs a negative square ({c2})"
        )));
    }
    let forced = c2.sqrt();
    let c = match (kind, c) {
        (FlatKind::BH3, _) => 0.0,
        (FlatKind::BH4, _) => forced,
        (_, Some(given)) => {
            if (given * given - c2).abs() > 1e-10 * (1.0 + c2) {
                return Err(ChartError::ConstraintViolation(format!(
                    "{kind:?}: c = {given} does not satisfy the constraint (c² should be {c2})"
                )));
            }
            given
        }
        (_, None) => forced,
    };
    Ok(FlatSurface { kind, a, b, c })
}

impl FlatSurface {
    pub fn ambient(&self) -> Ambient {
        match self.kind {
            FlatKind::TorusS4 => Ambient::Sphere,
            _ => Ambient::Hyperbolic,
        }
    }

    /// Coordinate jets at `(t, u)`; jets have two variables.
    pub fn eval(&self, t: f64, u: f64, order: usize) -> [Jet; 5] {
        let tj = Jet::variable(t, 0, 2, order);
        let uj = Jet::variable(u, 1, 2, order);
        self.eval_jets(&tj, &uj)
    }

    pub fn eval_jets(&self, t: &Jet, u: &Jet) -> [Jet; 5] {
        let (a, b, c) = (self.a, self.b, self.c);
        match self.kind {
            FlatKind::TorusS4 | FlatKind::BH1 => [
                t.lift(c),
                t.cos() * (1.0 / a),
                t.sin() * (1.0 / a),
                u.cos() * (1.0 / b),
                u.sin() * (1.0 / b),
            ],
            FlatKind::BH2 => [
                u.cosh() * (1.0 / a),
                u.sinh() * (1.0 / a),
                t.cos() * (1.0 / b),
                t.sin() * (1.0 / b),
                t.lift(c),
            ],
            FlatKind::BH3 => {
                let common = *u * *u * a + (a / (b * b) + a);
                let q = 1.0 / (4.0 * a);
                [
                    common + q,
                    *u,
                    t.cos() * (1.0 / b),
                    t.sin() * (1.0 / b),
                    common - q,
                ]
            }
            FlatKind::BH4 => {
                let r2 = *t * *t + *u * *u;
                [
                    r2 * a + b,
                    *t,
                    *u,
                    t.lift(c),
                    r2 * a + (b - 1.0 / (2.0 * a)),
                ]
            }
        }
    }

    pub fn point(&self, t: f64, u: f64) -> Vec5 {
        self.eval(t, u, 0).map(|j| j.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_constant_and_point() {
        let f = build_flat_surface(FlatKind::TorusS4, 2.0, 2.0, None).unwrap();
        assert!((f.c - 0.5f64.sqrt()).abs() < 1e-15);
        let p = f.point(0.0, 0.0);
        let want = [0.5f64.sqrt(), 0.5, 0.0, 0.5, 0.0];
        for k in 0..5 {
            assert!((p[k] - want[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn bh1_constant() {
        let f = build_flat_surface(FlatKind::BH1, 2.0, 2.0, None).unwrap();
        assert!((f.c - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bh3_and_bh4_points() {
        let f = build_flat_surface(FlatKind::BH3, 1.0, 1.0, None).unwrap();
        assert_eq!(f.point(0.0, 0.0), [2.25, 0.0, 1.0, 0.0, 1.75]);
        let g = build_flat_surface(FlatKind::BH4, 0.5, 1.0, None).unwrap();
        assert_eq!(g.c, 0.0);
        assert_eq!(g.point(0.0, 0.0), [1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn flat_constraints_rejected() {
        assert!(matches!(
            build_flat_surface(FlatKind::TorusS4, 1.0, 1.0, None),
            Err(ChartError::ConstraintViolation(_))
        ));
        assert!(matches!(
            build_flat_surface(FlatKind::BH1, 2.0, 2.0, Some(1.0)),
            Err(ChartError::ConstraintViolation(_))
        ));
        assert!(build_flat_surface(FlatKind::BH4, 1.0, 1.0, None).is_err());
    }

    #[test]
    fn family3_point_at_identity_profile() {
        let ch = build_chart(
            &FamilySpec::H4Family3 {
                a: 1.0,
                profile: Arc::new(Polynomial::identity()),
            },
            Some(ParamBox::new([1.0, -1.0, -1.0], [3.0, 1.0, 1.0])),
        )
        .unwrap();
        let x = ch.point(&[2.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, [3.0, 0.0, 2.0, 0.0, 2.0]);
        assert!(ch.membership_defect(&[2.0, 0.0, 0.0]).unwrap() < 1e-12);
    }

    #[test]
    fn family3_rejects_zero_crossing() {
        let spec = FamilySpec::H4Family3 {
            a: 1.0,
            profile: Arc::new(Polynomial::identity()),
        };
        let err = build_chart(
            &spec,
            Some(ParamBox::new([-1.0, 0.0, 0.0], [1.0, 1.0, 1.0])),
        );
        assert!(matches!(err, Err(ChartError::SingularDomain(_))));
        let spec = FamilySpec::H4Family3 {
            a: 1.0,
            profile: Arc::new(Polynomial::new(vec![-1.5, 1.0])),
        };
        let err = build_chart(&spec, Some(ParamBox::new([1.0, 0.0, 0.0], [2.0, 1.0, 1.0])));
        assert!(matches!(err, Err(ChartError::SingularDomain(_))));
    }

    #[test]
    fn family4_fourth_coordinate() {
        let ch = build_chart(
            &FamilySpec::H4Family4 {
                a: 0.5,
                profile: Arc::new(Polynomial::new(vec![0.0])),
            },
            None,
        )
        .unwrap();
        assert_eq!(ch.point(&[1.0, 0.3, -0.2]).unwrap()[3], 0.0);
    }

    #[test]
    fn out_of_domain() {
        let ch = build_chart(&FamilySpec::EquatorS3, None).unwrap();
        assert!(matches!(
            ch.eval(&[10.0, 1.0, 1.0], 1),
            Err(ChartError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn latitude_circle_is_unit_speed_on_sphere() {
        let c = LatitudeCircle { theta: 0.7 };
        let d = c.derivs(0.4).unwrap();
        assert!((Surface2::S2.inner(&d[0], &d[0]) - 1.0).abs() < 1e-15);
        assert!((Surface2::S2.inner(&d[1], &d[1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.eval_derivs(1.0), [10.0, 20.0, 30.0, 24.0]);
    }
}
