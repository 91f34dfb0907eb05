//! Monte Carlo trial engine.
//!
//! Trial `i` at a given SNR draws one observation from
//! `trial_seed(base_seed, i, snr)`; every method sees that same observation
//! (paired design). Trials run in parallel and are reported in
//! (snr, trial, method) order regardless of scheduling.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{Localizer, SearchSpace};
use crate::geometry::{BeampatternParams, Position};
use crate::metrics::{half_power_regions, half_power_uncertainty, trimmed_mean_error};
use crate::scenario::Scenario;
use crate::seeds::trial_seed;
use crate::signal::synthesize_observation;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub trim_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub position: Position,
    pub psi: Option<BeampatternParams>,
    pub distance_error: f64,
    pub iterations: Option<usize>,
    pub converged: bool,
    /// `None` when the final surface is flat.
    pub uncertainty_m2: Option<f64>,
    pub regions: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub snr_db: f64,
    pub method: String,
    /// A failing method is recorded here instead of aborting the sweep.
    pub outcome: std::result::Result<TrialOutcome, String>,
}

/// Aggregate for one (method, SNR) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub snr_db: f64,
    pub trimmed_mean_error_m: f64,
    pub mean_uncertainty_m2: f64,
    pub mean_iterations: Option<f64>,
    /// Successful trials that entered the aggregate.
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub summary: Vec<SummaryRow>,
    pub records: Vec<TrialRecord>,
}

impl SweepResult {
    pub fn row(&self, method: &str, snr_db: f64) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.method == method && r.snr_db == snr_db)
    }

    pub fn records_for<'a>(
        &'a self,
        method: &'a str,
        snr_db: f64,
    ) -> impl Iterator<Item = &'a TrialRecord> + 'a {
        self.records
            .iter()
            .filter(move |r| r.method == method && r.snr_db == snr_db)
    }
}

fn run_method(
    method: &dyn Localizer,
    scenario: &Scenario,
    obs: &crate::signal::ObservationSet,
    space: &SearchSpace,
) -> Result<TrialOutcome> {
    let out = method.localize(&scenario.sensors, obs, space)?;
    let uncertainty = half_power_uncertainty(&out.surface).ok();
    let regions = half_power_regions(&out.surface).ok();
    Ok(TrialOutcome {
        position: out.position,
        psi: out.psi,
        distance_error: out.position.distance_to(&scenario.emitter.position),
        iterations: out.iterations,
        converged: out.converged,
        uncertainty_m2: uncertainty,
        regions,
    })
}

pub fn run_monte_carlo(
    scenario: &Scenario,
    methods: &[&dyn Localizer],
    space: &SearchSpace,
    spec: &SweepSpec,
) -> Result<SweepResult> {
    if spec.trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if methods.is_empty() {
        return Err(Error::Empty("method list"));
    }
    if spec.snr_db.is_empty() {
        return Err(Error::Empty("SNR list"));
    }

    let jobs: Vec<(f64, usize)> = spec
        .snr_db
        .iter()
        .flat_map(|&snr| (0..spec.trials).map(move |i| (snr, i)))
        .collect();

    let per_job: Vec<Result<Vec<TrialRecord>>> = jobs
        .par_iter()
        .map(|&(snr, trial)| {
            let seed = trial_seed(spec.base_seed, trial, snr);
            let obs = synthesize_observation(scenario, snr, seed)?.without_truth();
            Ok(methods
                .iter()
                .map(|m| TrialRecord {
                    trial,
                    seed,
                    snr_db: snr,
                    method: m.name().to_string(),
                    outcome: run_method(*m, scenario, &obs, space).map_err(|e| e.to_string()),
                })
                .collect())
        })
        .collect();

    let mut records = Vec::with_capacity(jobs.len() * methods.len());
    for job in per_job {
        records.extend(job?);
    }

    let mut summary = Vec::new();
    for m in methods {
        for &snr in &spec.snr_db {
            summary.push(summarize(&records, m.name(), snr, spec.trim_fraction)?);
        }
    }
    Ok(SweepResult { summary, records })
}

fn summarize(records: &[TrialRecord], method: &str, snr_db: f64, trim: f64) -> Result<SummaryRow> {
    let cell: Vec<&TrialRecord> = records
        .iter()
        .filter(|r| r.method == method && r.snr_db == snr_db)
        .collect();
    let ok: Vec<&TrialOutcome> = cell.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let failures = cell.len() - ok.len();
    if ok.is_empty() {
        log::warn!("{method} failed in every trial at {snr_db} dB");
        return Ok(SummaryRow {
            method: method.to_string(),
            snr_db,
            trimmed_mean_error_m: f64::NAN,
            mean_uncertainty_m2: f64::NAN,
            mean_iterations: None,
            trials: 0,
            failures,
        });
    }

    let errors: Vec<f64> = ok.iter().map(|o| o.distance_error).collect();
    let uncertainties: Vec<f64> = ok.iter().filter_map(|o| o.uncertainty_m2).collect();
    let iterations: Vec<f64> = ok.iter().filter_map(|o| o.iterations.map(|i| i as f64)).collect();
    Ok(SummaryRow {
        method: method.to_string(),
        snr_db,
        trimmed_mean_error_m: trimmed_mean_error(&errors, trim)?,
        mean_uncertainty_m2: mean(&uncertainties),
        mean_iterations: (!iterations.is_empty()).then(|| mean(&iterations)),
        trials: ok.len(),
        failures,
    })
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}
