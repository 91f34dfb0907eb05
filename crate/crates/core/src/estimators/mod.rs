//! Direct position determination estimators.

pub mod am;
pub mod baselines;
pub mod cost;
pub mod grid;
pub mod registry;
pub mod search;

pub use am::{alternating_maximization, multi_start_maximization, AmSettings, EstimateResult};
pub use baselines::{baseline_aoa_tdoa, baseline_mvdr_omni};
pub use cost::{cost_matched, cost_mvdr, CostEvaluator, CostKind, GainModel, Loading};
pub use grid::{BeampatternGrid, CostSurface, PositionGrid, SearchSpace};
pub use registry::{EstimatorSettings, Localizer, LocalizerRegistry, MethodOutput};
pub use search::{grid_search_beampattern, grid_search_position};
