//! Explicit Runge–Kutta integrators and the two second-order ODEs for the
//! profile function `A(s)` of families 3 and 4.

use std::io;
use std::ops::Div;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charts::{ChartError, ScalarProfile};
use crate::hermite::{Hermite, HermiteError};
use crate::jet::Jet;
use crate::linalg::Scalar;

/// Why an integration stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    SpanComplete,
    LeadingCoeffVanishing {
        s: f64,
    },
    StepUnderflow {
        s: f64,
    },
    /// Stopped by a caller-supplied event.
    Event {
        s: f64,
        what: String,
    },
}

/// Request from a right-hand side or step hook to stop integrating.
#[derive(Clone, Debug, PartialEq)]
pub struct Halt(pub Termination);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rkf45Options {
    /// Local error tolerance (mixed absolute/relative).
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for Rkf45Options {
    fn default() -> Self {
        Rkf45Options {
            tol: 1e-10,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1e-2,
        }
    }
}

fn lin<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One classical RK4 step.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N], Halt>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N], Halt>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &lin(y, &[(0.5, &k1)], h))?;
    let k3 = f(t + 0.5 * h, &lin(y, &[(0.5, &k2)], h))?;
    let k4 = f(t + h, &lin(y, &[(1.0, &k3)], h))?;
    Ok(lin(
        y,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
        h,
    ))
}

/// One Runge–Kutta–Fehlberg 4(5) step: returns the fifth-order solution and
/// the difference to the embedded fourth-order one.
pub fn rkf45_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N]), Halt>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N], Halt>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + h / 4.0, &lin(y, &[(1.0 / 4.0, &k1)], h))?;
    let k3 = f(
        t + 3.0 * h / 8.0,
        &lin(y, &[(3.0 / 32.0, &k1), (9.0 / 32.0, &k2)], h),
    )?;
    let k4 = f(
        t + 12.0 * h / 13.0,
        &lin(
            y,
            &[
                (1932.0 / 2197.0, &k1),
                (-7200.0 / 2197.0, &k2),
                (7296.0 / 2197.0, &k3),
            ],
            h,
        ),
    )?;
    let k5 = f(
        t + h,
        &lin(
            y,
            &[
                (439.0 / 216.0, &k1),
                (-8.0, &k2),
                (3680.0 / 513.0, &k3),
                (-845.0 / 4104.0, &k4),
            ],
            h,
        ),
    )?;
    let k6 = f(
        t + h / 2.0,
        &lin(
            y,
            &[
                (-8.0 / 27.0, &k1),
                (2.0, &k2),
                (-3544.0 / 2565.0, &k3),
                (1859.0 / 4104.0, &k4),
                (-11.0 / 40.0, &k5),
            ],
            h,
        ),
    )?;
    let y5 = lin(
        y,
        &[
            (16.0 / 135.0, &k1),
            (6656.0 / 12825.0, &k3),
            (28561.0 / 56430.0, &k4),
            (-9.0 / 50.0, &k5),
            (2.0 / 55.0, &k6),
        ],
        h,
    );
    let y4 = lin(
        y,
        &[
            (25.0 / 216.0, &k1),
            (1408.0 / 2565.0, &k3),
            (2197.0 / 4104.0, &k4),
            (-1.0 / 5.0, &k5),
        ],
        h,
    );
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = y5[i] - y4[i];
    }
    Ok((y5, err))
}

/// Fixed-step RK4 from `t0` to `t1` in `n` steps.
pub fn rk4_fixed<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    n: usize,
) -> Result<[f64; N], Halt>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N], Halt>,
{
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = rk4_step(f, t0 + i as f64 * h, &y, h)?;
    }
    Ok(y)
}

/// Fixed-step Fehlberg (fifth-order solution) from `t0` to `t1` in `n` steps.
pub fn rkf45_fixed<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    n: usize,
) -> Result<[f64; N], Halt>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N], Halt>,
{
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = rkf45_step(f, t0 + i as f64 * h, &y, h)?.0;
    }
    Ok(y)
}

/// Adaptive RKF45 from `t0` towards `t1` (either direction). `accept` sees
/// every accepted state, may project it back onto a constraint, and may
/// stop the run.
pub fn integrate_rkf45<const N: usize, F, G>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &Rkf45Options,
    mut accept: G,
) -> Termination
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N], Halt>,
    G: FnMut(f64, &mut [f64; N]) -> Result<(), Halt>,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(opts.h_max).min((t1 - t0).abs());
    if let Err(Halt(r)) = accept(t, &mut y) {
        return r;
    }
    while dir * (t1 - t) > 1e-14 * (1.0 + t1.abs()) {
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let (y5, err) = match rkf45_step(f, t, &y, dir * step) {
            Ok(v) => v,
            Err(Halt(r)) => {
                if step <= opts.h_min {
                    return r;
                }
                // the halt may come from a trial stage past the event; retry shorter
                h = (0.25 * step).max(opts.h_min);
                continue;
            }
        };
        let mut e = 0.0f64;
        for i in 0..N {
            let scale = opts.tol * (1.0 + y[i].abs().max(y5[i].abs()));
            e = e.max(err[i].abs() / scale);
        }
        if e <= 1.0 {
            let next = if last { t1 } else { t + dir * step };
            if next == t {
                return Termination::StepUnderflow { s: t };
            }
            t = next;
            y = y5;
            if let Err(Halt(r)) = accept(t, &mut y) {
                return r;
            }
        }
        let factor = if e == 0.0 {
            5.0
        } else {
            (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (step * factor).min(opts.h_max);
        if e > 1.0 && step <= opts.h_min {
            return Termination::StepUnderflow { s: t };
        }
    }
    Termination::SpanComplete
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Ode1,
    Ode2,
}

/// Leading coefficient and remaining terms of either ODE, written once for
/// floats and jets.
fn ode_terms<T: Scalar>(which: Which, s: T, a: T, da: T) -> (T, T) {
    let c = |v: f64| s.lift(v);
    let s2 = s * s;
    let s3 = s2 * s;
    let da2 = da * da;
    let da3 = da2 * da;
    match which {
        Which::Ode1 => {
            let a2 = a * a;
            let lead = c(3.0) * s2 * a;
            let rest = c(5.0) * s3 * a * da3
                + (c(-15.0) * s2 * a2 - s2) * da2
                + (c(15.0) * s * a2 * a + c(7.0) * s * a) * da
                - c(5.0) * a2 * a2
                - c(6.0) * a2
                - c(1.0);
            (lead, rest)
        }
        Which::Ode2 => {
            let lead = c(3.0) * s2;
            let rest = c(5.0) * s3 * da3 - c(15.0) * s2 * a * da2
                + (c(15.0) * s * a * a + c(5.0) * s) * da
                - c(5.0) * a * a * a
                - c(5.0) * a;
            (lead, rest)
        }
    }
}

/// `3s²AA'' + 5s³AA'³ + (-15s²A² - s²)A'² + (15sA³ + 7sA)A' - 5A⁴ - 6A² - 1`.
pub fn ode1_residual(s: f64, a: f64, da: f64, dda: f64) -> f64 {
    let (lead, rest) = ode_terms(Which::Ode1, s, a, da);
    lead * dda + rest
}

/// `3s²A'' + 5s³A'³ - 15s²AA'² + (15sA² + 5s)A' - 5A³ - 5A`.
pub fn ode2_residual(s: f64, a: f64, da: f64, dda: f64) -> f64 {
    let (lead, rest) = ode_terms(Which::Ode2, s, a, da);
    lead * dda + rest
}

pub fn residual(which: Which, s: f64, a: f64, da: f64, dda: f64) -> f64 {
    match which {
        Which::Ode1 => ode1_residual(s, a, da, dda),
        Which::Ode2 => ode2_residual(s, a, da, dda),
    }
}

/// Guard on `|lead|` below which integration stops.
pub const LEAD_GUARD: f64 = 1e-8;

/// `A''` solved from the ODE, or a halt on the leading-coefficient zero set.
pub fn second_derivative(which: Which, s: f64, a: f64, da: f64) -> Result<f64, Halt> {
    let (lead, rest) = ode_terms(which, s, a, da);
    if lead.abs() < LEAD_GUARD || !lead.is_finite() {
        return Err(Halt(Termination::LeadingCoeffVanishing { s }));
    }
    Ok(-rest / lead)
}

/// `A'''` along a solution, by differentiating the right-hand side with a
/// first-order jet in `s`.
pub fn third_derivative(which: Which, s: f64, a: f64, da: f64, dda: f64) -> f64 {
    let sj = Jet::variable(s, 0, 1, 1);
    let aj = sj.lift(a) + (sj - s) * da;
    let daj = sj.lift(da) + (sj - s) * dda;
    let (lead, rest) = ode_terms(which, sj, aj, daj);
    let f = -rest.div(lead);
    f.gradient()[0]
}

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("singular initial data: {0}")]
    SingularInit(String),
    #[error("invalid span [{lo}, {hi}] for s0 = {s0}")]
    InvalidSpan { lo: f64, hi: f64, s0: f64 },
    #[error("solution stopped at s = {0} before producing two samples")]
    Empty(f64),
    #[error(transparent)]
    Hermite(#[from] HermiteError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed csv: {0}")]
    Format(String),
}

/// Sampled solution `A(s)` with Hermite dense output.
#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub which: Which,
    /// `(s, A, A', A'', A''')`.
    pub samples: Vec<[f64; 5]>,
    pub termination: Termination,
    /// Termination of the backward leg when the span extends below `s0`.
    pub termination_backward: Option<Termination>,
    interp: Hermite,
}

impl OdeSolution {
    pub fn from_samples(
        which: Which,
        samples: Vec<[f64; 5]>,
        levels: usize,
        termination: Termination,
    ) -> Result<Self, OdeError> {
        let knots = samples.iter().map(|r| r[0]).collect();
        let data = samples
            .iter()
            .map(|r| r[1..(1 + levels)].to_vec())
            .collect();
        let interp = Hermite::new(1, levels, knots, data)?;
        Ok(OdeSolution {
            which,
            samples,
            termination,
            termination_backward: None,
            interp,
        })
    }

    pub fn span(&self) -> (f64, f64) {
        self.interp.span()
    }

    /// `[A, A', A'', A''']` at `s`.
    pub fn eval(&self, s: f64) -> Result<[f64; 4], HermiteError> {
        Ok(self.interp.eval(s)?[0])
    }

    /// ODE residual of the interpolant at `s`, using its own second derivative.
    pub fn residual_at(&self, s: f64) -> Result<f64, HermiteError> {
        let d = self.eval(s)?;
        Ok(residual(self.which, s, d[0], d[1], d[2]))
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), OdeError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["s", "A", "dA", "ddA", "dddA"])?;
        for r in &self.samples {
            wr.write_record(r.iter().map(|v| format!("{v:.17e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), OdeError> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads `s,A,dA` (cubic dense output) or `s,A,dA,ddA,dddA` (septic).
    pub fn read_csv<R: io::Read>(which: Which, r: R) -> Result<Self, OdeError> {
        let mut rd = csv::Reader::from_reader(r);
        let mut samples = Vec::new();
        let mut width = None;
        for rec in rd.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| OdeError::Format(e.to_string()))?;
            if vals.len() != 3 && vals.len() != 5 {
                return Err(OdeError::Format(format!(
                    "expected 3 or 5 columns, got {}",
                    vals.len()
                )));
            }
            if *width.get_or_insert(vals.len()) != vals.len() {
                return Err(OdeError::Format("ragged rows".into()));
            }
            let mut row = [0.0; 5];
            row[..vals.len()].copy_from_slice(&vals);
            samples.push(row);
        }
        let levels = if width == Some(5) { 4 } else { 2 };
        Self::from_samples(which, samples, levels, Termination::SpanComplete)
    }

    pub fn load_csv(which: Which, path: &Path) -> Result<Self, OdeError> {
        Self::read_csv(which, std::fs::File::open(path)?)
    }
}

impl ScalarProfile for OdeSolution {
    fn derivs(&self, s: f64) -> Result<[f64; 4], ChartError> {
        self.eval(s).map_err(|e| ChartError::Profile(e.to_string()))
    }
    fn span(&self) -> Option<(f64, f64)> {
        Some(OdeSolution::span(self))
    }
}

fn sample(which: Which, s: f64, y: &[f64; 2]) -> Result<[f64; 5], Halt> {
    let dda = second_derivative(which, s, y[0], y[1])?;
    Ok([
        s,
        y[0],
        y[1],
        dda,
        third_derivative(which, s, y[0], y[1], dda),
    ])
}

fn leg(
    which: Which,
    s0: f64,
    y0: [f64; 2],
    s1: f64,
    opts: &Rkf45Options,
) -> (Vec<[f64; 5]>, Termination) {
    let f = |s: f64, y: &[f64; 2]| -> Result<[f64; 2], Halt> {
        Ok([y[1], second_derivative(which, s, y[0], y[1])?])
    };
    let mut out = Vec::new();
    let term = integrate_rkf45(&f, s0, y0, s1, opts, |s, y| {
        out.push(sample(which, s, y)?);
        Ok(())
    });
    (out, term)
}

/// Integrates `A'' = -rest / lead` from `(s0, A0, A0')` over `span`, which
/// must contain `s0`. Samples from both legs are merged in increasing `s`.
pub fn integrate_a(
    which: Which,
    init: (f64, f64, f64),
    span: (f64, f64),
    opts: &Rkf45Options,
) -> Result<OdeSolution, OdeError> {
    let (s0, a0, da0) = init;
    if s0 == 0.0 {
        return Err(OdeError::SingularInit("s0 = 0".into()));
    }
    if which == Which::Ode1 && a0 == 0.0 {
        return Err(OdeError::SingularInit("A0 = 0".into()));
    }
    if second_derivative(which, s0, a0, da0).is_err() {
        return Err(OdeError::SingularInit(format!(
            "leading coefficient vanishes at s0 = {s0}"
        )));
    }
    let (lo, hi) = span;
    if !(lo <= s0 && s0 <= hi) || lo == hi {
        return Err(OdeError::InvalidSpan { lo, hi, s0 });
    }
    let (fwd, tf) = leg(which, s0, [a0, da0], hi, opts);
    let mut samples = Vec::new();
    let mut tb = None;
    if lo < s0 {
        let (mut back, t) = leg(which, s0, [a0, da0], lo, opts);
        tb = Some(t);
        back.reverse();
        back.pop();
        samples.extend(back);
    }
    samples.extend(fwd);
    if samples.len() < 2 {
        return Err(OdeError::Empty(s0));
    }
    let mut sol = OdeSolution::from_samples(which, samples, 4, tf)?;
    sol.termination_backward = tb;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_examples() {
        assert_eq!(ode1_residual(1.5, 1.5, 1.0, 0.0), -1.0);
        assert_eq!(ode1_residual(1.0, 1.0, 0.0, 0.0), -12.0);
        assert_eq!(ode1_residual(1.0, 1.0, 1.0, 4.0), 11.0);
        assert_eq!(ode2_residual(2.5, 2.5, 1.0, 0.0), 0.0);
        assert_eq!(ode2_residual(1.0, 0.0, 1.0, 0.0), 10.0);
        assert_eq!(ode2_residual(1.0, 1.0, 0.0, 1.0), -7.0);
    }

    #[test]
    fn singular_init() {
        let o = Rkf45Options::default();
        assert!(matches!(
            integrate_a(Which::Ode1, (0.0, 1.0, 0.0), (0.0, 1.0), &o),
            Err(OdeError::SingularInit(_))
        ));
        assert!(matches!(
            integrate_a(Which::Ode1, (1.0, 0.0, 0.0), (1.0, 2.0), &o),
            Err(OdeError::SingularInit(_))
        ));
    }

    #[test]
    fn third_derivative_matches_difference() {
        let (s, a, da) = (1.3, 0.9, 0.2);
        let dda = second_derivative(Which::Ode1, s, a, da).unwrap();
        let jet = third_derivative(Which::Ode1, s, a, da, dda);
        let h = 1e-5;
        let f = |t: f64| {
            let ap = a + da * (t - s) + 0.5 * dda * (t - s).powi(2);
            let dap = da + dda * (t - s);
            second_derivative(Which::Ode1, t, ap, dap).unwrap()
        };
        let fd = (f(s + h) - f(s - h)) / (2.0 * h);
        assert!((jet - fd).abs() < 1e-6 * (1.0 + jet.abs()), "{jet} {fd}");
    }
}
