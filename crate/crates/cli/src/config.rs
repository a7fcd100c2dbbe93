//! JSON configuration merged with command-line flags (flags win).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use photonsphere::{PipelineOptions, ProfileSpec, RadialProfile, TrappingOptions};
use serde::{Deserialize, Serialize};

use crate::exit::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Schwarzschild,
    Neck,
    #[value(name = "interior_fluid")]
    InteriorFluid,
    Star,
    Tabulated,
}

#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// Metric family.
    #[arg(long, global = true, value_enum)]
    pub metric: Option<MetricKind>,
    /// Mass parameter (neck mass μ for `neck`).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long = "r-min", global = true)]
    pub r_min: Option<f64>,
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output directory for JSON and CSV reports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON profile file (`{"kind": ...}`).
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    /// Star surface radius `R_b`, or the radius to audit.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub metric: Option<ProfileSpec>,
    pub profile: Option<PathBuf>,
    pub mass: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub radius: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub pipeline: Option<PipelineOptions>,
    pub trapping: Option<TrappingOptions>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    PhotonSearch,
    Audit,
    Glue,
    Pipeline,
    Star,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::PhotonSearch => "photon-search",
            Command::Audit => "audit",
            Command::Glue => "glue",
            Command::Pipeline => "pipeline",
            Command::Star => "star",
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            Command::Verify => 1e-12,
            Command::Audit | Command::Star => photonsphere::audit::AUDIT_TOL,
            Command::Glue | Command::Pipeline => PipelineOptions::default().match_tol,
            Command::PhotonSearch => photonsphere::geodesic::ROOT_TOL,
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Command::Verify | Command::Pipeline => 512,
            Command::Audit | Command::Star => 256,
            Command::Glue => 10_000,
            Command::PhotonSearch => photonsphere::geodesic::SCAN_POINTS,
        }
    }
}

/// Fully resolved inputs; recorded in every emitted report.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub command: &'static str,
    pub metric: ProfileSpec,
    pub samples: usize,
    pub tol: f64,
    pub radii: Vec<f64>,
    pub pipeline: PipelineOptions,
    pub trapping: TrappingOptions,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn scale(mass: f64) -> f64 {
    mass.abs().max(1.0)
}

fn default_r_lo(cmd: Command, mass: f64) -> f64 {
    match cmd {
        Command::Glue | Command::Pipeline if mass > 0.0 => 3.0 * mass,
        Command::Glue | Command::Pipeline => 3.0,
        _ if mass > 0.0 => 2.1 * mass,
        _ => 0.5 * scale(mass),
    }
}

fn spec_from_flags(kind: MetricKind, cmd: Command, mass: f64, args: &Merged) -> Result<ProfileSpec, CliError> {
    let r_hi = args.r_max.unwrap_or(100.0 * scale(mass));
    Ok(match kind {
        MetricKind::Schwarzschild => {
            ProfileSpec::Schwarzschild { mass, r_lo: args.r_min.unwrap_or(default_r_lo(cmd, mass)), r_hi }
        }
        MetricKind::Neck => ProfileSpec::Neck { mu: mass },
        MetricKind::InteriorFluid => ProfileSpec::InteriorFluid { mass, radius: args.radius.unwrap_or(2.5 * mass) },
        MetricKind::Star => ProfileSpec::Star { mass, radius: args.radius.unwrap_or(2.5 * mass), r_hi },
        MetricKind::Tabulated => return Err(CliError::config("--metric tabulated needs --profile <file>")),
    })
}

/// Applies flag overrides to a spec taken from a file.
fn override_spec(spec: ProfileSpec, args: &Merged) -> ProfileSpec {
    match spec {
        ProfileSpec::Schwarzschild { mass, r_lo, r_hi } => ProfileSpec::Schwarzschild {
            mass: args.mass.unwrap_or(mass),
            r_lo: args.r_min.unwrap_or(r_lo),
            r_hi: args.r_max.unwrap_or(r_hi),
        },
        ProfileSpec::Neck { mu } => ProfileSpec::Neck { mu: args.mass.unwrap_or(mu) },
        ProfileSpec::InteriorFluid { mass, radius } => {
            ProfileSpec::InteriorFluid { mass: args.mass.unwrap_or(mass), radius: args.radius.unwrap_or(radius) }
        }
        ProfileSpec::Star { mass, radius, r_hi } => ProfileSpec::Star {
            mass: args.mass.unwrap_or(mass),
            radius: args.radius.unwrap_or(radius),
            r_hi: args.r_max.unwrap_or(r_hi),
        },
        tab @ ProfileSpec::Tabulated { .. } => tab,
    }
}

/// Flag values layered over file values.
struct Merged {
    mass: Option<f64>,
    r_min: Option<f64>,
    r_max: Option<f64>,
    radius: Option<f64>,
}

pub fn resolve(cmd: Command, args: &CommonArgs) -> Result<(Settings, RadialProfile), CliError> {
    let file: FileConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => FileConfig::default(),
    };
    let merged = Merged {
        mass: args.mass.or(file.mass),
        r_min: args.r_min.or(file.r_min),
        r_max: args.r_max.or(file.r_max),
        radius: args.radius.or(file.radius),
    };
    let out = args.out.clone().or(file.out.clone());
    let profile_path = args.profile.clone().or(file.profile.clone());

    if let Some(out) = &out {
        for input in [&args.config, &profile_path].into_iter().flatten() {
            if out == input {
                return Err(CliError::config(format!("output path {} is also an input", out.display())));
            }
        }
    }

    let mass = merged.mass.unwrap_or(1.0);
    let spec = if let Some(path) = &profile_path {
        override_spec(read_json(path)?, &merged)
    } else if let Some(kind) = args.metric {
        spec_from_flags(kind, cmd, mass, &merged)?
    } else if let Some(spec) = file.metric.clone() {
        override_spec(spec, &merged)
    } else {
        let kind = if cmd == Command::Star { MetricKind::Star } else { MetricKind::Schwarzschild };
        spec_from_flags(kind, cmd, mass, &merged)?
    };

    let tol = args.tol.or(file.tol).unwrap_or(cmd.default_tol());
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::config(format!("tolerance must be positive, got {tol}")));
    }
    let samples = args.samples.or(file.samples).unwrap_or(cmd.default_samples());
    if samples < 2 {
        return Err(CliError::config(format!("need at least 2 samples, got {samples}")));
    }

    let mut pipeline = file.pipeline.clone().unwrap_or_default();
    if matches!(cmd, Command::Glue | Command::Pipeline) {
        if args.tol.is_some() || file.tol.is_some() {
            pipeline.match_tol = tol;
        }
        if cmd == Command::Pipeline && (args.samples.is_some() || file.samples.is_some()) {
            pipeline.samples = samples;
        }
        if cmd == Command::Glue && (args.samples.is_some() || file.samples.is_some()) {
            pipeline.psi_samples = samples;
        }
    }
    for (name, v) in [
        ("match_tol", pipeline.match_tol),
        ("flat_tol", pipeline.flat_tol),
        ("mass_tol", pipeline.mass_tol),
        ("scalar_tol", pipeline.scalar_tol),
    ] {
        if !(v > 0.0) {
            return Err(CliError::config(format!("pipeline.{name} must be positive, got {v}")));
        }
    }
    let monotone = |s: &[f64], inc: bool| s.windows(2).all(|w| if inc { w[0] < w[1] } else { w[0] > w[1] });
    if !monotone(&pipeline.adm_schedule, true) || !monotone(&pipeline.compactification_schedule, false) {
        return Err(CliError::config("pipeline schedules must be strictly monotone"));
    }
    let trapping = file.trapping.unwrap_or_default();
    if !(trapping.window > 0.0 && trapping.tolerance > 0.0 && trapping.integrator_tol > 0.0) {
        return Err(CliError::config("trapping window and tolerances must be positive"));
    }

    let profile = spec.build()?;
    let radii = match (args.radius, &file.radii) {
        (Some(r), _) if cmd == Command::Audit => vec![r],
        (_, Some(rs)) => rs.clone(),
        _ => Vec::new(),
    };
    let settings = Settings { command: cmd.name(), metric: spec, samples, tol, radii, pipeline, trapping, out };
    Ok((settings, profile))
}
