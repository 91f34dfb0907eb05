//! Exhaustive grid searches. Node evaluation runs in parallel; the reduction
//! is sequential with lowest-index tie breaking, so results do not depend on
//! scheduling.

use rayon::prelude::*;

use super::cost::{CostEvaluator, CostKind, GainModel, Loading};
use super::grid::{BeampatternGrid, CostSurface, PositionGrid};
use crate::error::{Error, Result};
use crate::geometry::{BeampatternParams, Position};
use crate::scenario::SensorModel;
use crate::signal::ObservationSet;

/// Evaluates `node_cost` at every grid node. Receiver-coincident nodes are
/// left as NaN; any other error aborts the search.
pub fn evaluate_positions<F>(grid: &PositionGrid, node_cost: F) -> Result<CostSurface>
where
    F: Fn(&Position) -> Result<f64> + Sync,
{
    if grid.is_empty() {
        return Err(Error::Empty("position grid"));
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| match node_cost(&grid.node(i)) {
            Ok(v) => Ok(v),
            Err(Error::DegenerateGeometry { .. }) => Ok(f64::NAN),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<f64>>>()?;
    CostSurface::new(grid.columns(), grid.rows(), values, grid.cell_area())
}

pub fn position_surface(
    eval: &CostEvaluator<'_>,
    gains: &GainModel,
    grid: &PositionGrid,
) -> Result<CostSurface> {
    evaluate_positions(grid, |p| eval.cost_with(p, gains))
}

/// Beampattern surface at a fixed position: rows are beamwidths, columns
/// orientations.
pub fn beampattern_surface(
    eval: &CostEvaluator<'_>,
    p: &Position,
    grid: &BeampatternGrid,
) -> Result<CostSurface> {
    if grid.is_empty() {
        return Err(Error::Empty("beampattern grid"));
    }
    let proj = eval.project(p)?;
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let psi = grid.params(i);
            eval.evaluate(&proj, &proj.relative_gamma(&GainModel::Generalized(psi)))
        })
        .collect();
    let phi_step = if grid.phi_values.len() > 1 {
        (grid.phi_values[1] - grid.phi_values[0]).abs()
    } else {
        1.0
    };
    let beta_step = if grid.beta_values.len() > 1 {
        (grid.beta_values[1] - grid.beta_values[0]).abs()
    } else {
        1.0
    };
    CostSurface::new(
        grid.phi_values.len(),
        grid.beta_values.len(),
        values,
        phi_step * beta_step,
    )
}

/// Position estimate with the beampattern held at `psi`.
pub fn grid_search_position(
    model: &SensorModel,
    obs: &ObservationSet,
    psi: &BeampatternParams,
    grid: &PositionGrid,
    kind: CostKind,
    loading: Loading,
) -> Result<(Position, CostSurface)> {
    let eval = CostEvaluator::new(model, obs, kind, loading)?;
    let surface = position_surface(&eval, &GainModel::Generalized(*psi), grid)?;
    Ok((grid.node(surface.argmax), surface))
}

/// Beampattern estimate with the position held at `p`.
pub fn grid_search_beampattern(
    model: &SensorModel,
    obs: &ObservationSet,
    p: &Position,
    grid: &BeampatternGrid,
    kind: CostKind,
    loading: Loading,
) -> Result<(BeampatternParams, CostSurface)> {
    let eval = CostEvaluator::new(model, obs, kind, loading)?;
    let surface = beampattern_surface(&eval, p, grid)?;
    Ok((grid.params(surface.argmax), surface))
}
