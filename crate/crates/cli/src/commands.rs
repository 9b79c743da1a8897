use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use sarx::eval::{
    compute_metrics, relabel, run_realizations, write_summary_csv, ExperimentRow, ExperimentSetup,
    RealizationSummary, SystemSource,
};
use sarx::identify::{
    run, write_bound_trace_csv, write_records_csv, BoundJson, BoundMode, Identifier,
};
use sarx::model::{simulate, NoiseModel, Trajectory};
use sarx::theory::{
    constants_from_correlation, correlation_matrix_order3, local_success_probability,
    partial_bound_curves, CurveInputs, LocalRadius, SpectralConstants, SuccessProbability,
    TheoryInputs,
};

use crate::config::RunConfig;
use crate::error::CliError;

/// Flags shared by every subcommand.
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl Overrides {
    fn seed(&self, config: &RunConfig) -> u64 {
        self.seed.unwrap_or(config.experiment.base_seed)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let file = File::create(&path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn simulate_cmd(config: &RunConfig, flags: &Overrides) -> Result<(), CliError> {
    let seed = flags.seed(config);
    let system = config.build_system(seed)?;
    let horizon = config.experiment.horizon;
    let traj = simulate(
        &system,
        &config.switching(),
        &config.noise_model(),
        config.input.std,
        horizon,
        seed,
    )?;
    let dir = config.output_dir(flags.output.as_deref());
    let mut out = create(&dir, "trajectory.csv")?;
    traj.write_csv(&mut out)?;
    out.flush()?;

    let max_abs = traj.y.iter().fold(0.0f64, |a, y| a.max(y.abs()));
    let mut counts = vec![0usize; system.m()];
    for &s in &traj.modes {
        counts[s] += 1;
    }
    println!("seed {seed}: {horizon} steps, max |y| = {max_abs:.4e}, steps per mode {counts:?}");
    println!("wrote {}", dir.join("trajectory.csv").display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct IdentifySummary {
    seed: u64,
    horizon: usize,
    m: usize,
    bound_mode: &'static str,
    /// True when the error bound is disabled and assignment is by residual alone.
    baseline: bool,
    fe: f64,
    cer: f64,
    mismatches: usize,
    skipped: usize,
    relabel: Vec<usize>,
    estimates: Vec<Vec<f64>>,
    bounds: Vec<BoundJson>,
}

pub fn identify_cmd(
    config: &RunConfig,
    flags: &Overrides,
    trajectory: Option<&Path>,
) -> Result<(), CliError> {
    let seed = flags.seed(config);
    let system = config.build_system(seed)?;
    let noise = config.noise_model();
    let traj = match trajectory {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
            Trajectory::read_csv(BufReader::new(file))
                .map_err(|e| CliError::from(e).context("trajectory"))?
        }
        None => simulate(
            &system,
            &config.switching(),
            &noise,
            config.input.std,
            config.experiment.horizon,
            seed,
        )?,
    };
    if let Some(t) = traj.modes.iter().position(|&s| s >= system.m()) {
        return Err(CliError::Validation(format!(
            "trajectory: mode {} at step {t} is outside the configured {} subsystems",
            traj.modes[t],
            system.m()
        )));
    }
    let id_config = config.identifier(&noise, seed)?;
    let mut id = Identifier::new(id_config.clone())?;
    let out = run(&mut id, &traj, Some(&system))?;
    let truth = system.params();
    let h = relabel(&out.estimates, &truth)?;
    let metrics = compute_metrics(&out.records, &h, &out.estimates, &truth)?;

    let dir = config.output_dir(flags.output.as_deref());
    let mut records = create(&dir, "records.csv")?;
    write_records_csv(&out.records, id_config.m, &mut records)?;
    records.flush()?;
    let baseline = matches!(id_config.bound_mode, BoundMode::Disabled);
    if config.output.trace && !baseline {
        let mut trace = create(&dir, "bound_trace.csv")?;
        write_bound_trace_csv(&out.records, &mut trace)?;
        trace.flush()?;
    }
    let summary = IdentifySummary {
        seed,
        horizon: traj.len(),
        m: id_config.m,
        bound_mode: id_config.bound_mode.label(),
        baseline,
        fe: metrics.fe,
        cer: metrics.cer,
        mismatches: metrics.mismatches,
        skipped: metrics.skipped,
        relabel: metrics.relabel.clone(),
        estimates: out
            .estimates
            .iter()
            .map(|w| w.iter().copied().collect())
            .collect(),
        bounds: out.bounds.iter().map(|&b| b.into()).collect(),
    };
    write_json(&dir, "summary.json", &summary)?;
    println!(
        "{} steps, {} bounds: FE = {:.4e}, CER = {:.2}% ({} mismatches, {} skipped)",
        summary.horizon,
        summary.bound_mode,
        metrics.fe,
        100.0 * metrics.cer,
        metrics.mismatches,
        metrics.skipped
    );
    println!("wrote {}", dir.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct CellReport {
    row: ExperimentRow,
    realizations: Vec<RealizationSummary>,
}

pub fn experiment_cmd(config: &RunConfig, flags: &Overrides) -> Result<(), CliError> {
    let seed = flags.seed(config);
    let patterns = config
        .experiment
        .patterns
        .clone()
        .unwrap_or_else(|| vec![config.switching()]);
    let noises: Vec<NoiseModel> = match &config.experiment.noise_levels {
        Some(levels) => levels
            .iter()
            .map(|&std| NoiseModel::TruncatedGaussian {
                std,
                bound: 3.0 * std,
            })
            .collect(),
        None => vec![config.noise_model()],
    };
    let systems = match config.system.poles {
        Some(p) => SystemSource::RandomPoles { m: p.m, c1: p.c1 },
        None => SystemSource::Fixed {
            system: config.build_system(seed)?,
        },
    };

    let mut cells = Vec::new();
    for pattern in &patterns {
        for noise in &noises {
            let setup = ExperimentSetup {
                pattern: pattern.clone(),
                noise: *noise,
                input_std: config.input.std,
                realizations: config.experiment.realizations,
                horizon: config.experiment.horizon,
                identifier: config.identifier(noise, seed)?,
                systems: systems.clone(),
            };
            let report = run_realizations(&setup, seed)?;
            let r = &report.row;
            println!(
                "{}/{:e}: FE {:.4e} vs {:.4e}, CER {:.2}% vs {:.2}%, {} failed",
                r.setup,
                r.noise,
                r.fe_ours,
                r.fe_base,
                100.0 * r.cer_ours,
                100.0 * r.cer_base,
                r.failed
            );
            cells.push(CellReport {
                row: report.row,
                realizations: report.realizations,
            });
        }
    }

    let dir = config.output_dir(flags.output.as_deref());
    let rows: Vec<ExperimentRow> = cells.iter().map(|c| c.row.clone()).collect();
    let mut out = create(&dir, "summary.csv")?;
    write_summary_csv(&rows, &mut out)?;
    out.flush()?;
    write_json(&dir, "realizations.json", &cells)?;
    println!("wrote {}", dir.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct LocalReport {
    radius: LocalRadius,
    success: SuccessProbability,
}

#[derive(Debug, Serialize)]
struct TheoryReport {
    lambda_min: f64,
    lambda_max: f64,
    correlation: Option<Vec<Vec<f64>>>,
    constants: SpectralConstants,
    lower_asymptote: f64,
    upper_asymptote: f64,
    local: Option<LocalReport>,
    warnings: Vec<String>,
}

pub fn theory_cmd(config: &RunConfig, flags: &Overrides) -> Result<(), CliError> {
    let th = config.theory.as_ref().ok_or_else(|| {
        CliError::Validation("theory: section is required for this command".into())
    })?;
    let orders = config.orders()?;
    let window_r = config.identifier.window_r.unwrap_or(3);

    let (lambda_min, lambda_max, correlation) = match (th.lambda_min, th.lambda_max) {
        (Some(lo), Some(hi)) => (lo, hi, None),
        (None, None) => {
            let first = config
                .system
                .subsystems
                .as_ref()
                .and_then(|s| s.first())
                .filter(|_| orders.na == 2 && orders.nc == 1)
                .ok_or_else(|| {
                    CliError::Validation(
                        "theory: lambda_min/lambda_max are required unless the system lists an order (2, 1) subsystem"
                            .into(),
                    )
                })?;
            let corr = correlation_matrix_order3(
                first[0],
                first[1],
                first[2],
                config.input.std,
                th.sigma_n,
            )?;
            let rows = corr
                .r
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect();
            (corr.lambda_min(), corr.lambda_max(), Some(rows))
        }
        _ => {
            return Err(CliError::Validation(
                "theory: give both lambda_min and lambda_max or neither".into(),
            ))
        }
    };
    let constants = constants_from_correlation(lambda_min, lambda_max, orders.n(), window_r)
        .map_err(|e| CliError::from(e).context("theory"))?;
    let curves = partial_bound_curves(
        &constants,
        &CurveInputs {
            sigma_n: th.sigma_n,
            s_min: th.s_min,
            eps0_sq: th.eps0_sq,
            phi_max: th.phi_max,
            forgetting: config.identifier.forgetting,
        },
        th.steps,
    )
    .map_err(|e| CliError::from(e).context("theory"))?;

    let inputs = TheoryInputs {
        sigma_n: th.sigma_n,
        s_min: th.s_min.unwrap_or(f64::INFINITY),
        s_max: th.s_max,
        phi_max: th.phi_max,
        psi: th.psi.unwrap_or(0.0),
        n_max: th
            .n_max
            .or(config.identifier.noise_bound)
            .or_else(|| config.noise_model().bound())
            .unwrap_or(0.0),
        eps0: th.eps0_sq.sqrt(),
        nu: config.identifier.nu.unwrap_or(1e-4),
        m: config.m(),
    };
    inputs
        .validate()
        .map_err(|e| CliError::from(e).context("theory"))?;
    let local = th.psi.map(|_| {
        let radius = inputs.radius();
        LocalReport {
            radius,
            success: local_success_probability(
                inputs.m,
                window_r,
                inputs.eps0,
                th.s_min,
                radius.value,
            ),
        }
    });
    let warnings = inputs
        .snr_ratio_warning(constants.kappa_max)
        .into_iter()
        .collect();

    let report = TheoryReport {
        lambda_min,
        lambda_max,
        correlation,
        constants,
        lower_asymptote: curves.lower_asymptote,
        upper_asymptote: curves.upper_asymptote,
        local,
        warnings,
    };
    let dir = config.output_dir(flags.output.as_deref());
    write_json(&dir, "theory.json", &report)?;
    let mut out = create(&dir, "curve.csv")?;
    writeln!(out, "r,lower,upper")?;
    for ((r, lo), hi) in curves.r.iter().zip(&curves.lower).zip(&curves.upper) {
        writeln!(out, "{r},{lo:.16e},{hi:.16e}")?;
    }
    out.flush()?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "λ = [{lambda_min:.4}, {lambda_max:.4}], κ_max² = {:.4}, asymptotes [{:.4e}, {:.4e}]",
        constants.kappa_max * constants.kappa_max,
        curves.lower_asymptote,
        curves.upper_asymptote
    );
    println!("wrote {}", dir.display());
    Ok(())
}
