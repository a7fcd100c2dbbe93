//! One function per subcommand. Each returns an [`Outcome`]; emission is shared.

use std::fs;
use std::io::Write;
use std::path::Path;

use photonsphere::audit::{component_mass, monotonicity_scan, write_audit_csv, ComponentMass, MonotonicityScan};
use photonsphere::geodesic::{trapping_batch, TrappingReport};
use photonsphere::pipeline::{
    double, glue_neck_with, harmonicity_check, match_all, psi_bound_check, ChartSummary, GlueOptions,
    HarmonicityReport, MatchReport, PsiBoundReport,
};
use photonsphere::{
    audit_sphere, photon_sphere_search, run_pipeline, star_scenario, vacuum_scan, IdentityReport, ProfileSpec,
    RadialProfile, Verdict,
};
use serde::Serialize;

use crate::config::Settings;
use crate::exit::{CliError, Status};

/// Result of a command that ran to completion.
pub struct Outcome {
    pub status: Status,
    pub report: serde_json::Value,
    pub csv: Vec<u8>,
    /// Extra data series written as `<cmd>_<suffix>.csv`.
    pub extra_csv: Vec<(&'static str, Vec<u8>)>,
    pub lines: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing CSV to memory");
    buf
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()
    })
}

pub fn verify(settings: &Settings, profile: &RadialProfile) -> Result<Outcome, CliError> {
    let scan = vacuum_scan(profile, settings.samples)?;
    let ok = scan.max_residual <= settings.tol;
    let mut lines =
        vec![format!("max static-vacuum residual {:e} over {} samples", scan.max_residual, settings.samples)];
    if !ok {
        lines.push(format!(
            "worst sample: r = {}, {} = {:e} exceeds tol {:e}",
            scan.worst_r, scan.worst_field, scan.max_residual, settings.tol
        ));
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        max_residual: f64,
        worst_r: f64,
        worst_field: &'a str,
        max_interpolation_bound: Option<f64>,
        within_tolerance: bool,
    }
    let summary = Summary {
        max_residual: scan.max_residual,
        worst_r: scan.worst_r,
        worst_field: scan.worst_field,
        max_interpolation_bound: scan.interpolation_bounds.iter().copied().reduce(f64::max),
        within_tolerance: ok,
    };
    Ok(Outcome {
        status: if ok { Status::Success } else { Status::VerificationFailure },
        report: to_value(&summary),
        csv: csv_bytes(|b| scan.write_csv(b)),
        extra_csv: Vec::new(),
        lines,
    })
}

pub fn photon_search(settings: &Settings, profile: &RadialProfile) -> Result<Outcome, CliError> {
    let radii = photon_sphere_search(profile);
    let trapping: Vec<TrappingReport> =
        trapping_batch(profile, &radii, &settings.trapping).into_iter().collect::<Result<_, _>>()?;
    #[derive(Serialize)]
    struct Report {
        radii: Vec<f64>,
        trapping: Vec<TrappingReport>,
    }
    let lines = radii.iter().map(|r| format!("{r:.10}")).collect();
    let csv = csv_rows(
        &["r", "impact_parameter", "verdict", "max_radial_deviation"],
        trapping.iter().map(|t| {
            vec![
                t.r0.to_string(),
                t.impact_parameter.to_string(),
                to_value(&t.verdict).as_str().unwrap_or_default().to_string(),
                t.max_radial_deviation.to_string(),
            ]
        }),
    );
    Ok(Outcome {
        status: Status::Success,
        report: to_value(&Report { radii, trapping }),
        csv,
        extra_csv: Vec::new(),
        lines,
    })
}

pub fn audit(settings: &Settings, profile: &RadialProfile) -> Result<Outcome, CliError> {
    let radii = if settings.radii.is_empty() { photon_sphere_search(profile) } else { settings.radii.clone() };
    if radii.is_empty() {
        return Err(CliError {
            status: Status::Refused,
            message: "no radius given and no photon sphere found in the domain".into(),
        });
    }
    let reports: Vec<IdentityReport> = radii.iter().map(|&r| audit_sphere(profile, r)).collect::<Result<_, _>>()?;
    let masses: Vec<ComponentMass> = radii.iter().map(|&r| component_mass(profile, r)).collect::<Result<_, _>>()?;
    let hi = profile.domain().hi;
    let flows: Vec<MonotonicityScan> = radii
        .iter()
        .filter(|&&r| r < hi)
        .map(|&r| monotonicity_scan(profile, r, hi, settings.samples))
        .collect::<Result<_, _>>()?;

    let mut lines = Vec::new();
    let mut ok = true;
    for rep in &reports {
        let (name, value) = rep.worst_residual();
        let pass = rep.require_within(settings.tol).is_ok();
        ok &= pass;
        lines.push(format!(
            "r = {}: {} (worst {name} = {value:e}, mass_from_H = {})",
            rep.r0,
            if pass { "photon sphere" } else { "not a photon sphere" },
            rep.mass_from_h
        ));
    }
    for f in &flows {
        ok &= f.upward_violations == 0;
        lines.push(format!("H/N upward violations from r = {}: {}", f.samples[0].r, f.upward_violations));
    }
    #[derive(Serialize)]
    struct Report<'a> {
        audits: &'a [IdentityReport],
        component_mass: &'a [ComponentMass],
        monotonicity: Vec<(f64, usize, f64)>,
        all_pass: bool,
    }
    let report = Report {
        audits: &reports,
        component_mass: &masses,
        monotonicity: flows.iter().map(|f| (f.samples[0].r, f.upward_violations, f.max_upward_violation)).collect(),
        all_pass: ok,
    };
    let extra_csv = flows.first().map(|f| ("flow", csv_bytes(|b| f.write_csv(b)))).into_iter().collect();
    Ok(Outcome {
        status: if ok { Status::Success } else { Status::VerificationFailure },
        report: to_value(&report),
        csv: csv_bytes(|b| write_audit_csv(&reports, b)),
        extra_csv,
        lines,
    })
}

pub fn glue(settings: &Settings, profile: &RadialProfile) -> Result<Outcome, CliError> {
    let opts = &settings.pipeline;
    let glue_opts = GlueOptions {
        audit_tol: if opts.relaxed_gates { None } else { Some(opts.match_tol) },
        mu_override: opts.mu_override,
        psi_scale_factor: opts.psi_scale_factor,
    };
    let glued = glue_neck_with(profile, profile.domain().lo, &glue_opts)?;
    let doubled = double(&glued)?;
    let matches = match_all(&doubled)?;
    let psi_bound = psi_bound_check(&doubled, opts.psi_samples)?;
    if !opts.relaxed_gates {
        psi_bound.require()?;
    }
    let harmonicity = harmonicity_check(&doubled, opts.samples)?;
    let max_jump = matches.iter().fold(0.0_f64, |a, m| a.max(m.max_jump()));
    let ok = max_jump <= opts.match_tol && psi_bound.ok;

    #[derive(Serialize)]
    struct Report<'a> {
        audit: &'a IdentityReport,
        charts: Vec<ChartSummary>,
        match_reports: &'a [MatchReport],
        max_match_jump: f64,
        psi_bound: &'a PsiBoundReport,
        harmonicity: &'a HarmonicityReport,
    }
    let report = Report {
        audit: &glued.photon_sphere,
        charts: doubled.chart_summaries(),
        match_reports: &matches,
        max_match_jump: max_jump,
        psi_bound: &psi_bound,
        harmonicity: &harmonicity,
    };
    let csv = csv_rows(
        &["surface", "field", "jump"],
        matches.iter().flat_map(|m| {
            m.jumps
                .named()
                .into_iter()
                .map(move |(name, v)| vec![m.surface.to_string(), name.to_string(), v.to_string()])
        }),
    );
    let lines = vec![
        format!("max matching jump {max_jump:e} over {} surfaces", matches.len()),
        format!("max |psi| = {} at chart {}, r = {}", psi_bound.max_abs_psi, psi_bound.at_chart, psi_bound.at_r),
        format!("max |laplacian psi| = {:e}", harmonicity.max_laplacian),
    ];
    Ok(Outcome {
        status: if ok { Status::Success } else { Status::VerificationFailure },
        report: to_value(&report),
        csv,
        extra_csv: Vec::new(),
        lines,
    })
}

pub fn pipeline(settings: &Settings, profile: &RadialProfile) -> Result<Outcome, CliError> {
    let report = run_pipeline(profile, &settings.pipeline)?;
    let mut lines = vec![
        format!("verdict: {}", to_value(&report.verdict).as_str().unwrap_or_default()),
        format!("max matching jump {:e}", report.max_match_jump),
        format!(
            "max |R_hat| {:e}, max curvature of g_hat {:e}",
            report.conformal_scalar_max, report.flatness_max_curvature
        ),
        format!(
            "ADM mass: exterior {} ± {:e}, conformal end {} ± {:e}",
            report.adm_exterior.mass,
            report.adm_exterior.error_bar,
            report.adm_conformal_end.mass,
            report.adm_conformal_end.error_bar
        ),
    ];
    if let Some(rec) = report.reconstructed {
        lines.push(format!("reconstructed: m = {}, r_photon = {}, H = {}", rec.mass, rec.r_photon, rec.spacetime_h));
    }
    let status =
        if report.verdict == Verdict::SchwarzschildRigid { Status::Success } else { Status::VerificationFailure };
    Ok(Outcome {
        status,
        report: to_value(&report),
        csv: csv_bytes(|b| report.write_samples_csv(b)),
        extra_csv: Vec::new(),
        lines,
    })
}

pub fn star(settings: &Settings) -> Result<Outcome, CliError> {
    let ProfileSpec::Star { mass, radius, r_hi } = settings.metric else {
        return Err(CliError::config("star needs --metric star (mass, radius, r_hi)"));
    };
    let report = star_scenario(mass, radius, r_hi)?;
    let mut lines = vec![format!("Buchdahl ratio 2m/R_b = {}", report.buchdahl_ratio)];
    lines.extend(report.photon_sphere_radii.iter().map(|r| format!("photon sphere {r:.10}")));
    lines.push(report.verdict.clone());
    let failed = report.very_compact && !report.hypothesis_met;
    Ok(Outcome {
        status: if failed { Status::VerificationFailure } else { Status::Success },
        csv: csv_bytes(|b| write_audit_csv(&report.audits, b)),
        report: to_value(&report),
        extra_csv: Vec::new(),
        lines,
    })
}

#[derive(Serialize)]
struct Envelope<'a> {
    settings: &'a Settings,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorRecord<'a>>,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    exit_code: i32,
    message: &'a str,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

fn envelope_json(env: &Envelope) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(env).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

/// Writes `<dir>/<cmd>.json`, `<dir>/<cmd>.csv` and any extra series.
pub fn emit(settings: &Settings, outcome: &Outcome) -> Result<(), CliError> {
    let Some(dir) = &settings.out else { return Ok(()) };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let env = Envelope { settings, report: Some(&outcome.report), error: None };
    write_file(&dir.join(format!("{}.json", settings.command)), &envelope_json(&env))?;
    write_file(&dir.join(format!("{}.csv", settings.command)), &outcome.csv)?;
    for (suffix, bytes) in &outcome.extra_csv {
        write_file(&dir.join(format!("{}_{suffix}.csv", settings.command)), bytes)?;
    }
    Ok(())
}

/// Records a refusal or failure in `<dir>/<cmd>.json` when an output directory is set.
pub fn emit_error(settings: &Settings, err: &CliError) -> Result<(), CliError> {
    let Some(dir) = &settings.out else { return Ok(()) };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let env = Envelope {
        settings,
        report: None,
        error: Some(ErrorRecord { exit_code: err.status as i32, message: &err.message }),
    };
    write_file(&dir.join(format!("{}.json", settings.command)), &envelope_json(&env))
}
