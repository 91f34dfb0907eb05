//! Localization methods behind one trait, looked up by name.

use super::am::multi_start_maximization;
use super::baselines::{baseline_aoa_tdoa, baseline_mvdr_omni};
use super::cost::{CostEvaluator, CostKind, Loading};
use super::grid::{CostSurface, SearchSpace};
use crate::error::{Error, Result};
use crate::geometry::{BeampatternParams, Position};
use crate::scenario::SensorModel;
use crate::signal::ObservationSet;

pub const PROPOSED: &str = "proposed";
pub const PROPOSED_MATCHED: &str = "proposed-matched";
pub const MVDR_OMNI: &str = "mvdr";
pub const AOA_TDOA: &str = "aoa-tdoa";

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutput {
    pub position: Position,
    pub psi: Option<BeampatternParams>,
    pub iterations: Option<usize>,
    pub converged: bool,
    /// Final position surface, used for the uncertainty metric and heatmaps.
    pub surface: CostSurface,
}

pub trait Localizer: Send + Sync {
    fn name(&self) -> &str;

    fn localize(
        &self,
        model: &SensorModel,
        obs: &ObservationSet,
        space: &SearchSpace,
    ) -> Result<MethodOutput>;
}

/// Settings shared by the built-in methods.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSettings {
    pub loading: Loading,
    /// Initial beampatterns; alternating maximization runs from each.
    pub starts: Vec<BeampatternParams>,
    /// `None` means one position-grid cell.
    pub epsilon: Option<f64>,
    pub max_iters: usize,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            loading: Loading::default(),
            starts: wide_starts(&DEFAULT_START_ORIENTATIONS_DEG, 90.0).expect("valid default"),
            epsilon: None,
            max_iters: 20,
        }
    }
}

/// Orientations of the default wide initial beampatterns, in degrees.
pub const DEFAULT_START_ORIENTATIONS_DEG: [f64; 8] = [0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0];

pub fn wide_starts(orientations_deg: &[f64], beta_deg: f64) -> Result<Vec<BeampatternParams>> {
    orientations_deg
        .iter()
        .map(|&phi| BeampatternParams::from_degrees(phi, beta_deg))
        .collect()
}

/// Joint position and beampattern estimation by alternating maximization.
pub struct JointBeampattern {
    name: &'static str,
    kind: CostKind,
    settings: EstimatorSettings,
}

impl JointBeampattern {
    pub fn new(name: &'static str, kind: CostKind, settings: EstimatorSettings) -> Self {
        Self {
            name,
            kind,
            settings,
        }
    }
}

impl Localizer for JointBeampattern {
    fn name(&self) -> &str {
        self.name
    }

    fn localize(
        &self,
        model: &SensorModel,
        obs: &ObservationSet,
        space: &SearchSpace,
    ) -> Result<MethodOutput> {
        let eval = CostEvaluator::new(model, obs, self.kind, self.settings.loading)?;
        let res = multi_start_maximization(
            &eval,
            space,
            &self.settings.starts,
            self.settings.epsilon.unwrap_or(space.positions.resolution),
            self.settings.max_iters,
        )?;
        Ok(MethodOutput {
            position: res.position,
            psi: Some(res.psi),
            iterations: Some(res.iterations),
            converged: res.converged,
            surface: res.surface,
        })
    }
}

pub struct OmniMvdr {
    loading: Loading,
}

impl OmniMvdr {
    pub fn new(loading: Loading) -> Self {
        Self { loading }
    }
}

impl Localizer for OmniMvdr {
    fn name(&self) -> &str {
        MVDR_OMNI
    }

    fn localize(
        &self,
        model: &SensorModel,
        obs: &ObservationSet,
        space: &SearchSpace,
    ) -> Result<MethodOutput> {
        let surface = baseline_mvdr_omni(model, obs, &space.positions, self.loading)?;
        Ok(MethodOutput {
            position: space.positions.node(surface.argmax),
            psi: None,
            iterations: None,
            converged: true,
            surface,
        })
    }
}

pub struct AoaTdoa;

impl Localizer for AoaTdoa {
    fn name(&self) -> &str {
        AOA_TDOA
    }

    fn localize(
        &self,
        model: &SensorModel,
        obs: &ObservationSet,
        space: &SearchSpace,
    ) -> Result<MethodOutput> {
        let surface = baseline_aoa_tdoa(model, obs, &space.positions)?;
        Ok(MethodOutput {
            position: space.positions.node(surface.argmax),
            psi: None,
            iterations: None,
            converged: true,
            surface,
        })
    }
}

/// Name-keyed collection of localizers, kept in registration order.
#[derive(Default)]
pub struct LocalizerRegistry {
    entries: Vec<Box<dyn Localizer>>,
}

impl LocalizerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_defaults(settings: EstimatorSettings) -> Self {
        let mut reg = Self::new();
        for entry in [
            Box::new(JointBeampattern::new(PROPOSED, CostKind::Mvdr, settings.clone())) as Box<dyn Localizer>,
            Box::new(OmniMvdr::new(settings.loading)),
            Box::new(AoaTdoa),
            Box::new(JointBeampattern::new(PROPOSED_MATCHED, CostKind::Matched, settings)),
        ] {
            reg.register(entry).expect("built-in names are unique");
        }
        reg
    }

    pub fn register(&mut self, localizer: Box<dyn Localizer>) -> Result<()> {
        if self.get(localizer.name()).is_some() {
            return Err(Error::Config(format!(
                "method `{}` is already registered",
                localizer.name()
            )));
        }
        self.entries.push(localizer);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Localizer> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<&dyn Localizer>> {
        names
            .iter()
            .map(|n| {
                self.get(n.as_ref()).ok_or_else(|| {
                    Error::Config(format!(
                        "unknown method `{}` (available: {})",
                        n.as_ref(),
                        self.names().join(", ")
                    ))
                })
            })
            .collect()
    }
}
