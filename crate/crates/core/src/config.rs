//! JSON experiment configuration. Angles are degrees here and are converted
//! to radians exactly once, when the internal types are built.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::registry::{wide_starts, DEFAULT_START_ORIENTATIONS_DEG};
use crate::estimators::{BeampatternGrid, EstimatorSettings, Loading, PositionGrid, SearchSpace};
use crate::geometry::{
    BeampatternParams, EmitterTruth, PatternKind, Position, PropagationConstants, ReceiverArray,
    SPEED_OF_LIGHT,
};
use crate::scenario::{Scenario, SensorModel, SignalConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub receivers: Vec<ReceiverConfig>,
    #[serde(default)]
    pub array: ArrayConfig,
    #[serde(default = "default_wavelength")]
    pub wavelength_m: f64,
    pub emitter: EmitterConfig,
    #[serde(default)]
    pub signal: SignalSettings,
    #[serde(default = "default_channel_std")]
    pub channel_std: f64,
    #[serde(default)]
    pub noise_free: bool,
    pub search: SearchConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub experiment: MonteCarloConfig,
    #[serde(default)]
    pub crlb: CrlbConfig,
}

fn default_wavelength() -> f64 {
    1.0
}

fn default_channel_std() -> f64 {
    0.1
}

fn default_kappa() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverConfig {
    pub x_m: f64,
    pub y_m: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub elements: usize,
    pub spacing_wavelengths: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            elements: 4,
            spacing_wavelengths: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    pub x_m: f64,
    pub y_m: f64,
    pub phi_deg: f64,
    pub beta_deg: f64,
    #[serde(default = "default_pattern")]
    pub pattern: PatternKind,
}

fn default_pattern() -> PatternKind {
    PatternKind::Generalized
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSettings {
    pub samples: usize,
    pub sample_rate_hz: f64,
}

impl Default for SignalSettings {
    fn default() -> Self {
        Self {
            samples: 32,
            sample_rate_hz: 200e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub center_x_m: f64,
    pub center_y_m: f64,
    pub extent_m: f64,
    pub resolution_m: f64,
    #[serde(default = "default_phi_step")]
    pub phi_step_deg: f64,
    #[serde(default = "default_betas")]
    pub beta_deg: Vec<f64>,
}

fn default_phi_step() -> f64 {
    1.0
}

fn default_betas() -> Vec<f64> {
    (1..=9).map(|i| 10.0 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Diagonal loading as a fraction of `trace(R_k) / (M L)`.
    pub loading_factor: f64,
    /// Orientations of the initial beampatterns; one alternating
    /// maximization runs from each.
    pub psi0_phi_deg: Vec<f64>,
    pub psi0_beta_deg: f64,
    /// Defaults to one grid cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_m: Option<f64>,
    pub max_iters: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            loading_factor: 1e-3,
            psi0_phi_deg: DEFAULT_START_ORIENTATIONS_DEG.to_vec(),
            psi0_beta_deg: 90.0,
            epsilon_m: None,
            max_iters: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub trim_fraction: f64,
    pub methods: Vec<String>,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            snr_db: (-15..=0).map(f64::from).collect(),
            trials: 250,
            seed: 1,
            trim_fraction: 0.05,
            methods: vec!["proposed".into(), "mvdr".into(), "aoa-tdoa".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
}

impl SweepRange {
    pub fn values_deg(&self) -> Result<Vec<f64>> {
        if !(self.step_deg > 0.0) || self.stop_deg < self.start_deg {
            return Err(Error::Config(format!("invalid sweep range {self:?}")));
        }
        let n = ((self.stop_deg - self.start_deg) / self.step_deg + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start_deg + i as f64 * self.step_deg).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrlbConfig {
    pub snr_db: Vec<f64>,
    /// SNR at which the sensitivity sweeps fix the noise level.
    pub sensitivity_snr_db: f64,
    pub waveform_draws: usize,
    pub phi_sweep: SweepRange,
    pub beta_sweep: SweepRange,
}

impl Default for CrlbConfig {
    fn default() -> Self {
        Self {
            snr_db: (-15..=0).map(f64::from).collect(),
            sensitivity_snr_db: 0.0,
            waveform_draws: 8,
            phi_sweep: SweepRange {
                start_deg: -40.0,
                stop_deg: 20.0,
                step_deg: 1.0,
            },
            beta_sweep: SweepRange {
                start_deg: 10.0,
                stop_deg: 60.0,
                step_deg: 2.0,
            },
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario()?;
        self.search_space()?;
        self.estimator_settings()?;
        let mc = &self.experiment;
        if mc.trials == 0 {
            return Err(Error::Config("experiment.trials must be at least 1".into()));
        }
        if !(0.0..0.5).contains(&mc.trim_fraction) {
            return Err(Error::Config("experiment.trim_fraction must be in [0, 0.5)".into()));
        }
        if mc.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("experiment.snr_db values must be finite".into()));
        }
        if self.crlb.waveform_draws == 0 {
            return Err(Error::Config("crlb.waveform_draws must be at least 1".into()));
        }
        self.crlb.phi_sweep.values_deg()?;
        self.crlb.beta_sweep.values_deg()?;
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let a = &self.array;
        let receivers = self
            .receivers
            .iter()
            .map(|r| {
                ReceiverArray::new(
                    Position::new(r.x_m, r.y_m),
                    a.elements,
                    a.spacing_wavelengths * self.wavelength_m,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let constants = PropagationConstants {
            kappa: self.receivers.iter().map(|r| r.kappa).collect(),
            speed_of_light: SPEED_OF_LIGHT,
        };
        let sig = &self.signal;
        if !(sig.sample_rate_hz > 0.0) {
            return Err(Error::Config("signal.sample_rate_hz must be positive".into()));
        }
        let signal = SignalConfig::new(sig.samples, 1.0 / sig.sample_rate_hz)?;
        let sensors = SensorModel::new(receivers, constants, self.wavelength_m, signal)?;
        let e = &self.emitter;
        if let PatternKind::UlaElements { count, .. } = e.pattern {
            if count < 2 {
                return Err(Error::Config("ULA truth pattern needs at least 2 elements".into()));
            }
        }
        let emitter = EmitterTruth {
            position: Position::new(e.x_m, e.y_m),
            psi: BeampatternParams::from_degrees(e.phi_deg, e.beta_deg)?,
            pattern: e.pattern,
            transmit_power: 1.0,
            peak_gain: 1.0,
            wavelength: self.wavelength_m,
        };
        if !(self.channel_std >= 0.0) {
            return Err(Error::Config("channel_std must be non-negative".into()));
        }
        Ok(Scenario {
            name: self.name.clone(),
            sensors,
            emitter,
            channel_std: self.channel_std,
            noise_free: self.noise_free,
        })
    }

    pub fn search_space(&self) -> Result<SearchSpace> {
        let s = &self.search;
        Ok(SearchSpace {
            positions: PositionGrid::centered(
                Position::new(s.center_x_m, s.center_y_m),
                s.extent_m,
                s.resolution_m,
            )?,
            beampatterns: BeampatternGrid::from_degrees(s.phi_step_deg, &s.beta_deg)?,
        })
    }

    pub fn estimator_settings(&self) -> Result<EstimatorSettings> {
        let e = &self.estimator;
        if !(e.loading_factor > 0.0) {
            return Err(Error::Config("estimator.loading_factor must be positive".into()));
        }
        if e.max_iters == 0 {
            return Err(Error::Config("estimator.max_iters must be at least 1".into()));
        }
        if let Some(eps) = e.epsilon_m {
            if !(eps >= 0.0) {
                return Err(Error::Config("estimator.epsilon_m must be non-negative".into()));
            }
        }
        if e.psi0_phi_deg.is_empty() {
            return Err(Error::Config("estimator.psi0_phi_deg must not be empty".into()));
        }
        Ok(EstimatorSettings {
            loading: Loading::TraceRelative(e.loading_factor),
            starts: wide_starts(&e.psi0_phi_deg, e.psi0_beta_deg)?,
            epsilon: e.epsilon_m,
            max_iters: e.max_iters,
        })
    }
}
