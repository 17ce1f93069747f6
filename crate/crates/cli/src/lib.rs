//! Command-line front end for the biconservative hypersurface engine.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on a
//! configuration or construction error.

pub mod generate;
pub mod runs;
pub mod sampling;
pub mod target;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sampling::{parse_grid, parse_numbers, parse_range, resolve_grid};
use target::{build_target, parse_params, Target};
use verify::{run_verify, VerifyConfig, VerifyPlan};

#[derive(Debug, Parser)]
#[command(
    name = "bicons",
    version,
    about = "Build and check biconservative hypersurfaces in S⁴ and H⁴"
)]
pub struct Cli {
    /// Worker threads for grid sweeps (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run residual checks on a sampled grid and write a JSON report.
    Verify(VerifyArgs),
    /// Export chart points as CSV or an OBJ quad mesh.
    Generate(GenerateArgs),
    /// Integrate a profile curve of prescribed geodesic curvature.
    Profile(ProfileArgs),
    /// Integrate one of the classification ODEs for A(s).
    Ode(OdeArgs),
    /// Frenet data of an s-line against the predicted values.
    Frenet(FrenetArgs),
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Family or preset name.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameters, `k=v,...`.
    #[arg(long)]
    pub params: Option<String>,
    /// Profile CSV (curve for s4/h4-family*, A(s) for family3/family4).
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Obj,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON config; flags given alongside it take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub target: TargetArgs,
    /// `NsxNtxNu` (or `NtxNu` for flat surfaces).
    #[arg(long)]
    pub grid: Option<String>,
    /// `axis:lo:hi`; repeatable.
    #[arg(long)]
    pub range: Vec<String>,
    /// Comma-separated checks.
    #[arg(long)]
    pub checks: Option<String>,
    /// `name=value[,name=value]`; repeatable.
    #[arg(long)]
    pub tol: Vec<String>,
    /// Report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub range: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Ambient coordinates (1-based) used as OBJ vertex positions.
    #[arg(long, default_value = "2,3,4")]
    pub axes: String,
    /// Output path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// s2 or h2; implied by closure laws.
    #[arg(long)]
    pub surface: Option<String>,
    /// `const:K` or `closure:s4|h4-family1|h4-family2`.
    #[arg(long)]
    pub kappa: String,
    /// `y1,y2,y3,v1,v2,v3`.
    #[arg(long)]
    pub init: Option<String>,
    /// `lo,hi`; `hi` may be `period` for constant curvature.
    #[arg(long)]
    pub span: Option<String>,
    /// Largest step, which is also the sample spacing bound.
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
    /// Curve CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OdeArgs {
    #[arg(long)]
    pub which: u8,
    /// `s0,A0,A0'`.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub span: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Solution CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FrenetArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Curve parameter `s` (default: middle of the chart).
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub u: f64,
}

/// Whether the command's checks all passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = open_out(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit_json(value, None)
}

pub fn run(cli: Cli) -> Result<Outcome> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker pool")?;
    }
    match cli.command {
        Command::Verify(a) => verify_cmd(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Profile(a) => {
            let (summary, _) = runs::run_profile(&runs::ProfileArgs {
                surface: a.surface.as_deref(),
                kappa: &a.kappa,
                init: a.init.as_deref(),
                span: a.span.as_deref(),
                step: a.step,
                out: a.out.as_deref(),
            })?;
            print_json(&summary)?;
            Ok(Outcome::Pass)
        }
        Command::Ode(a) => {
            let summary = runs::run_ode(&runs::OdeArgs {
                which: a.which,
                init: a.init.as_deref(),
                span: a.span.as_deref(),
                tol: a.tol,
                out: a.out.as_deref(),
            })?;
            print_json(&summary)?;
            Ok(Outcome::Pass)
        }
        Command::Frenet(a) => {
            let Some(family) = a.target.family.as_deref() else {
                bail!("--family is required");
            };
            let params = parse_params(a.target.params.as_deref())?;
            let summary =
                runs::run_frenet(family, &params, a.target.profile.as_deref(), a.at, a.t, a.u)?;
            print_json(&summary)?;
            Ok(Outcome::Pass)
        }
    }
}

fn verify_cmd(a: VerifyArgs) -> Result<Outcome> {
    if a.format != Format::Json {
        bail!("verify reports are JSON only");
    }
    let cfg = match &a.config {
        Some(p) => VerifyConfig::load(p)?,
        None => VerifyConfig::default(),
    };
    let mut plan = VerifyPlan::from_config(&cfg)?;
    if let Some(f) = a.target.family {
        plan.family = f;
    }
    plan.params
        .extend(parse_params(a.target.params.as_deref())?);
    if let Some(p) = a.target.profile {
        plan.profile = Some(p);
    }
    if let Some(g) = &a.grid {
        plan.counts = Some(parse_grid(g)?);
    }
    for r in &a.range {
        let r = parse_range(r)?;
        plan.ranges.retain(|x| x.0 != r.0);
        plan.ranges.push(r);
    }
    if let Some(c) = &a.checks {
        plan.checks = Some(
            c.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        );
    }
    for t in &a.tol {
        for (k, v) in parse_params(Some(t))? {
            let v: f64 = v
                .parse()
                .with_context(|| format!("tolerance {k} = {v:?}"))?;
            plan.tolerances.insert(k, v);
        }
    }
    let report = run_verify(&plan)?;
    for r in &report.reports {
        eprintln!(
            "{:<16} {}  max {:.3e}  tol {:.1e}  ({} evaluated, {} skipped)",
            r.check,
            if r.pass { "PASS" } else { "FAIL" },
            r.max_residual,
            r.tolerance,
            r.evaluated,
            r.skipped
        );
    }
    emit_json(&report, a.out.as_deref())?;
    Ok(if report.pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn generate_cmd(a: GenerateArgs) -> Result<Outcome> {
    let Some(family) = a.target.family.as_deref() else {
        bail!("--family is required");
    };
    let params = parse_params(a.target.params.as_deref())?;
    let target = build_target(family, &params, a.target.profile.as_deref())?;
    let counts = match &a.grid {
        Some(g) => parse_grid(g)?,
        None if matches!(target, Target::Flat(_)) => [1, 32, 32],
        None => [4, 16, 16],
    };
    let ranges = a
        .range
        .iter()
        .map(|r| parse_range(r))
        .collect::<Result<Vec<_>>>()?;
    let grid = resolve_grid(target.domain(), counts, &ranges)?;
    let mut w = open_out(a.out.as_deref())?;
    match a.format {
        Format::Csv => {
            generate::write_csv(&target, &grid, &mut w)?;
        }
        Format::Obj => {
            let ax: [f64; 3] = parse_numbers(&a.axes, "--axes")?;
            let axes = ax.map(|v| (v as usize).wrapping_sub(1));
            generate::write_obj(&target, &grid, axes, &mut w)?;
        }
        Format::Json => bail!("generate writes csv or obj"),
    }
    w.flush()?;
    Ok(Outcome::Pass)
}
