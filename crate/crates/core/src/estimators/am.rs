//! Alternating maximization over position and beampattern.
//!
//! The position is first estimated under a wide initial beampattern; each
//! iteration then re-fits the beampattern at the current position and the
//! position under the new beampattern, until the position moves by no more
//! than `epsilon`.
//!
//! A single wide start can settle next to the most strongly illuminated
//! receiver, where a narrow beam aimed at that receiver explains most of the
//! received energy. [`multi_start_maximization`] therefore runs the same
//! procedure from several initial orientations and keeps the run with the
//! highest final objective.

use super::cost::{CostEvaluator, GainModel};
use super::grid::{CostSurface, SearchSpace};
use super::search::{beampattern_surface, position_surface};
use crate::error::{Error, Result};
use crate::geometry::{BeampatternParams, Position};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmSettings {
    pub psi0: BeampatternParams,
    /// Position-change threshold in meters.
    pub epsilon: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub position: Position,
    pub psi: BeampatternParams,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after the initial search and after every half-step.
    pub objective_trace: Vec<f64>,
    /// Position surface of the final half-step.
    pub surface: CostSurface,
}

pub fn alternating_maximization(
    eval: &CostEvaluator<'_>,
    space: &SearchSpace,
    settings: &AmSettings,
) -> Result<EstimateResult> {
    if settings.max_iters == 0 {
        return Err(Error::Config("max_iters must be at least 1".into()));
    }
    if !(settings.epsilon >= 0.0) {
        return Err(Error::Config("epsilon must be non-negative".into()));
    }
    if !space.beampatterns.contains(&settings.psi0) {
        // an off-grid start could make the first beampattern step decrease
        return Err(Error::Config(
            "initial beampattern must be a node of the beampattern grid".into(),
        ));
    }

    let grid = &space.positions;
    let mut surface = position_surface(eval, &GainModel::Generalized(settings.psi0), grid)?;
    let mut position = grid.node(surface.argmax);
    let mut psi = settings.psi0;
    let mut trace = vec![surface.max()];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < settings.max_iters {
        let previous = position;

        let psi_surface = beampattern_surface(eval, &position, &space.beampatterns)?;
        psi = space.beampatterns.params(psi_surface.argmax);
        trace.push(psi_surface.max());

        surface = position_surface(eval, &GainModel::Generalized(psi), grid)?;
        position = grid.node(surface.argmax);
        trace.push(surface.max());

        iterations += 1;
        if position.distance_to(&previous) <= settings.epsilon {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!("alternating maximization stopped after {iterations} iterations without converging");
    }

    Ok(EstimateResult {
        position,
        psi,
        iterations,
        converged,
        objective_trace: trace,
        surface,
    })
}

/// Runs [`alternating_maximization`] from every start in `starts` and keeps
/// the highest final objective; ties go to the earliest start.
pub fn multi_start_maximization(
    eval: &CostEvaluator<'_>,
    space: &SearchSpace,
    starts: &[BeampatternParams],
    epsilon: f64,
    max_iters: usize,
) -> Result<EstimateResult> {
    let mut best: Option<EstimateResult> = None;
    for &psi0 in starts {
        let run = alternating_maximization(eval, space, &AmSettings { psi0, epsilon, max_iters })?;
        let better = match &best {
            None => true,
            Some(b) => final_objective(&run) > final_objective(b),
        };
        if better {
            best = Some(run);
        }
    }
    best.ok_or(Error::Empty("initial beampattern list"))
}

fn final_objective(res: &EstimateResult) -> f64 {
    *res.objective_trace.last().expect("trace holds the initial search")
}

/// True when every step of `trace` is non-decreasing within `rel_slack`.
pub fn is_non_decreasing(trace: &[f64], rel_slack: f64) -> bool {
    trace
        .windows(2)
        .all(|w| w[1] >= w[0] - rel_slack * w[0].abs().max(w[1].abs()))
}
