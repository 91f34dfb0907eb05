//! Experiment description in internal units (meters, seconds, radians).

use crate::error::{Error, Result};
use crate::geometry::{EmitterTruth, Position, PropagationConstants, ReceiverArray};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalConfig {
    pub samples: usize,
    pub sampling_period: f64,
}

impl SignalConfig {
    pub fn new(samples: usize, sampling_period: f64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if !(sampling_period > 0.0) {
            return Err(Error::Config("sampling period must be positive".into()));
        }
        Ok(Self {
            samples,
            sampling_period,
        })
    }

    /// Angular frequency of zero-based bin `k`: `2 pi k / (N T)`.
    pub fn omega(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / (self.samples as f64 * self.sampling_period)
    }
}

/// Everything an estimator is allowed to know: the receiver layout and the
/// known system constants. Never carries emitter truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel {
    pub receivers: Vec<ReceiverArray>,
    pub constants: PropagationConstants,
    pub wavelength: f64,
    pub signal: SignalConfig,
}

impl SensorModel {
    pub fn new(
        receivers: Vec<ReceiverArray>,
        constants: PropagationConstants,
        wavelength: f64,
        signal: SignalConfig,
    ) -> Result<Self> {
        if receivers.is_empty() {
            return Err(Error::Config("at least one receiver is required".into()));
        }
        let m = receivers[0].element_count;
        if receivers.iter().any(|r| r.element_count != m) {
            return Err(Error::Config(
                "all receivers must have the same element count".into(),
            ));
        }
        if constants.kappa.len() != receivers.len() {
            return Err(Error::Config(format!(
                "{} kappa values for {} receivers",
                constants.kappa.len(),
                receivers.len()
            )));
        }
        if constants.kappa.iter().any(|k| !(*k > 0.0)) {
            return Err(Error::Config("kappa must be positive".into()));
        }
        if !(wavelength > 0.0) {
            return Err(Error::Config("wavelength must be positive".into()));
        }
        Ok(Self {
            receivers,
            constants,
            wavelength,
            signal,
        })
    }

    pub fn receiver_count(&self) -> usize {
        self.receivers.len()
    }

    pub fn element_count(&self) -> usize {
        self.receivers[0].element_count
    }

    /// Length `M * L` of one stacked frequency-bin snapshot.
    pub fn snapshot_len(&self) -> usize {
        self.element_count() * self.receiver_count()
    }

    pub fn spacing_wavelengths(&self, l: usize) -> f64 {
        self.receivers[l].element_spacing / self.wavelength
    }

    pub fn receiver_positions(&self) -> impl Iterator<Item = &Position> {
        self.receivers.iter().map(|r| &r.position)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub sensors: SensorModel,
    pub emitter: EmitterTruth,
    /// Standard deviation of the complex channel draw `b_l ~ CN(1, std^2)`.
    pub channel_std: f64,
    pub noise_free: bool,
}

impl Scenario {
    /// True (pattern-aware) directional attenuation at every receiver.
    pub fn true_attenuations(&self) -> Result<Vec<f64>> {
        self.sensors
            .receivers
            .iter()
            .zip(&self.sensors.constants.kappa)
            .map(|(rx, kappa)| {
                let r = self.emitter.position.distance_to(&rx.position);
                let g = self.emitter.gain_towards(&rx.position)?;
                Ok(kappa / r * g)
            })
            .collect()
    }
}
