//! The four experiment commands. Each computes everything first and writes
//! its files at the end.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dirloc::crlb::{bound_curve, sensitivity_sweep, waveform_draws, SweepParam};
use dirloc::estimators::search::beampattern_surface;
use dirloc::estimators::{CostEvaluator, CostKind, LocalizerRegistry};
use dirloc::geometry::PatternKind;
use dirloc::metrics::{half_power_regions, half_power_uncertainty, normalized};
use dirloc::montecarlo::{run_monte_carlo, SweepResult, SweepSpec};
use dirloc::seeds::trial_seed;
use dirloc::signal::synthesize_observation;

use crate::experiment::{Experiment, Overrides};
use crate::output::{deg, num, opt, Table};

fn prepare_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

fn sweep(exp: &Experiment) -> Result<SweepResult> {
    let cfg = &exp.config;
    let scenario = cfg.scenario()?;
    let space = cfg.search_space()?;
    let registry = LocalizerRegistry::with_defaults(cfg.estimator_settings()?);
    let methods = registry.resolve(&cfg.experiment.methods)?;
    let spec = SweepSpec {
        snr_db: cfg.experiment.snr_db.clone(),
        trials: cfg.experiment.trials,
        base_seed: cfg.experiment.seed,
        trim_fraction: cfg.experiment.trim_fraction,
    };
    log::info!(
        "{}: {} trials x {} SNR values x {} methods",
        cfg.name,
        spec.trials,
        spec.snr_db.len(),
        methods.len()
    );
    Ok(run_monte_carlo(&scenario, &methods, &space, &spec)?)
}

fn sweep_tables(exp: &Experiment, result: &SweepResult) -> (Table, Table) {
    let header = exp.header();
    let mut summary = Table::new(
        &header,
        &[
            "method",
            "snr_db",
            "trimmed_mean_error_m",
            "mean_uncertainty_m2",
            "mean_iterations",
            "n_trials",
            "n_failures",
        ],
    );
    for r in &result.summary {
        summary.push(vec![
            r.method.clone(),
            num(r.snr_db),
            num(r.trimmed_mean_error_m),
            num(r.mean_uncertainty_m2),
            opt(r.mean_iterations),
            r.trials.to_string(),
            r.failures.to_string(),
        ]);
    }

    let mut trials = Table::new(
        &header,
        &[
            "snr_db",
            "trial",
            "seed",
            "method",
            "x_hat_m",
            "y_hat_m",
            "phi_hat_deg",
            "beta_hat_deg",
            "distance_error_m",
            "iterations",
            "converged",
            "uncertainty_m2",
            "half_power_regions",
            "error",
        ],
    );
    for rec in &result.records {
        let lead = vec![
            num(rec.snr_db),
            rec.trial.to_string(),
            rec.seed.to_string(),
            rec.method.clone(),
        ];
        let rest = match &rec.outcome {
            Ok(o) => vec![
                num(o.position.x),
                num(o.position.y),
                o.psi.map(|p| deg(p.phi())).unwrap_or_default(),
                o.psi.map(|p| deg(p.beta())).unwrap_or_default(),
                num(o.distance_error),
                opt(o.iterations),
                o.converged.to_string(),
                opt(o.uncertainty_m2),
                opt(o.regions),
                String::new(),
            ],
            Err(e) => {
                let mut v = vec![String::new(); 9];
                v.push(e.clone());
                v
            }
        };
        trials.push(lead.into_iter().chain(rest).collect());
    }
    (summary, trials)
}

pub fn simulate(config: &str, overrides: &Overrides, out: &Path) -> Result<Vec<PathBuf>> {
    let exp = Experiment::load(config, overrides)?;
    let result = sweep(&exp)?;
    let (summary, trials) = sweep_tables(&exp, &result);
    prepare_dir(out)?;
    Ok(vec![summary.write(out, "sweep.csv")?, trials.write(out, "trials.csv")?])
}

/// Single SNR for the one-trial commands; 0 dB unless given on the
/// command line.
fn single_snr(exp: &Experiment) -> Result<f64> {
    match exp.snr_override.as_deref() {
        None => Ok(0.0),
        Some([snr]) => Ok(*snr),
        Some(_) => bail!("this command takes exactly one --snr value"),
    }
}

pub fn heatmap(config: &str, overrides: &Overrides, out: &Path) -> Result<Vec<PathBuf>> {
    let exp = Experiment::load(config, overrides)?;
    let cfg = &exp.config;
    let snr = single_snr(&exp)?;
    let scenario = cfg.scenario()?;
    let space = cfg.search_space()?;
    let registry = LocalizerRegistry::with_defaults(cfg.estimator_settings()?);
    let methods = registry.resolve(&cfg.experiment.methods)?;
    let seed = trial_seed(exp.seed(), 0, snr);
    let obs = synthesize_observation(&scenario, snr, seed)?.without_truth();

    let header = exp.header();
    let mut summary = Table::new(
        &header,
        &[
            "method",
            "snr_db",
            "x_hat_m",
            "y_hat_m",
            "distance_error_m",
            "uncertainty_m2",
            "half_power_regions",
            "truth_in_half_power",
        ],
    );
    let mut tables = Vec::new();
    for m in methods {
        let res = m.localize(&scenario.sensors, &obs, &space)?;
        let q = normalized(&res.surface)?;
        let grid = &space.positions;
        let mut table = Table::new(&header, &["x_m", "y_m", "q_norm"]);
        for (i, v) in q.iter().enumerate() {
            let p = grid.node(i);
            table.push(vec![num(p.x), num(p.y), num(*v)]);
        }
        let truth_inside = grid
            .nearest_index(&scenario.emitter.position)
            .map(|i| q[i] > 0.5)
            .unwrap_or(false);
        summary.push(vec![
            m.name().to_string(),
            num(snr),
            num(res.position.x),
            num(res.position.y),
            num(res.position.distance_to(&scenario.emitter.position)),
            num(half_power_uncertainty(&res.surface)?),
            half_power_regions(&res.surface)?.to_string(),
            truth_inside.to_string(),
        ]);
        tables.push((format!("heatmap_{}.csv", m.name()), table));
    }

    prepare_dir(out)?;
    let mut written = Vec::new();
    for (file, table) in tables {
        written.push(table.write(out, &file)?);
    }
    written.push(summary.write(out, "heatmap_summary.csv")?);
    Ok(written)
}

pub fn crlb(config: &str, overrides: &Overrides, out: &Path) -> Result<Vec<PathBuf>> {
    let exp = Experiment::load(config, overrides)?;
    let cfg = &exp.config;
    let scenario = cfg.scenario()?;
    let waveforms = waveform_draws(&scenario, cfg.crlb.waveform_draws, exp.seed())?;
    let header = exp.header();

    let mut curve = Table::new(
        &header,
        &["snr_db", "sigma_p_m", "flagged", "max_condition_number"],
    );
    for (snr, b) in bound_curve(&scenario, &cfg.crlb.snr_db, &waveforms)? {
        curve.push(vec![
            num(snr),
            num(b.sigma_p),
            b.flagged.to_string(),
            num(b.max_condition_number),
        ]);
    }

    let mut sweeps = Vec::new();
    for (param, range, file) in [
        (SweepParam::Phi, &cfg.crlb.phi_sweep, "sensitivity_phi.csv"),
        (SweepParam::Beta, &cfg.crlb.beta_sweep, "sensitivity_beta.csv"),
    ] {
        let values: Vec<f64> = range.values_deg()?.into_iter().map(f64::to_radians).collect();
        let rows = sensitivity_sweep(&scenario, param, &values, cfg.crlb.sensitivity_snr_db, &waveforms)?;
        let mut table = Table::new(&header, &["param_deg", "sigma_p_m", "flagged"]);
        for (v, b) in rows {
            table.push(vec![deg(v), num(b.sigma_p), b.flagged.to_string()]);
        }
        sweeps.push((file, table));
    }

    prepare_dir(out)?;
    let mut written = vec![curve.write(out, "crlb.csv")?];
    for (file, table) in sweeps {
        written.push(table.write(out, file)?);
    }
    Ok(written)
}

/// Truth pattern of the mismatch study.
pub const MISMATCH_PATTERN: PatternKind = PatternKind::UlaElements {
    count: 4,
    spacing_wavelengths: 0.5,
};

pub fn mismatch(config: &str, overrides: &Overrides, out: &Path) -> Result<Vec<PathBuf>> {
    let mut exp = Experiment::load(config, overrides)?;
    exp.config.emitter.pattern = MISMATCH_PATTERN;
    if !exp.config.name.ends_with("_mismatch") {
        exp.config.name.push_str("_mismatch");
    }
    let result = sweep(&exp)?;
    let (summary, trials) = sweep_tables(&exp, &result);

    // beampattern cost at the true position, first trial of the first SNR
    let cfg = &exp.config;
    let scenario = cfg.scenario()?;
    let space = cfg.search_space()?;
    let settings = cfg.estimator_settings()?;
    let snr = cfg.experiment.snr_db[0];
    let obs = synthesize_observation(&scenario, snr, trial_seed(exp.seed(), 0, snr))?.without_truth();
    let eval = CostEvaluator::new(&scenario.sensors, &obs, CostKind::Mvdr, settings.loading)?;
    let surface = beampattern_surface(&eval, &scenario.emitter.position, &space.beampatterns)?;
    let q = normalized(&surface)?;
    let mut pattern = Table::new(&exp.header(), &["phi_deg", "beta_deg", "q_norm"]);
    for (i, v) in q.iter().enumerate() {
        let psi = space.beampatterns.params(i);
        pattern.push(vec![deg(psi.phi()), deg(psi.beta()), num(*v)]);
    }

    prepare_dir(out)?;
    Ok(vec![
        summary.write(out, "sweep.csv")?,
        trials.write(out, "trials.csv")?,
        pattern.write(out, "beampattern_surface.csv")?,
    ])
}
