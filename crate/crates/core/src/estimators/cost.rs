//! Position/beampattern cost functions.
//!
//! Both costs only see the composite steering vector through
//! `a_k / ||gamma||`. For a candidate position the per-receiver beamformer
//! outputs `w_{k,l} = exp(+j w_k tau_l) a_l^H r_{k,l}` do not depend on the
//! beampattern, so
//!
//! ```text
//! x_k = |a_k^H r_k|^2 / ||gamma||^2 = |sum_l gamma_l w_{k,l}|^2 / ||gamma||^2
//! matched = sum_k x_k
//! mvdr    = sum_k delta_k / (M - x_k / (delta_k + ||r_k||^2))
//! ```
//!
//! The MVDR form is the exact inverse of the loaded rank-one covariance
//! `r_k r_k^H + delta_k I` (Sherman-Morrison) with `||a_k||^2 = M ||gamma||^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{propagation_delay, receive_angle, steering_from_angle, BeampatternParams, Position};
use crate::scenario::SensorModel;
use crate::signal::ObservationSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    Matched,
    Mvdr,
}

/// Diagonal loading added to each single-snapshot covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loading {
    Absolute(f64),
    /// `factor * trace(R_k) / (M L)`.
    TraceRelative(f64),
}

impl Default for Loading {
    fn default() -> Self {
        Loading::TraceRelative(1e-3)
    }
}

impl Loading {
    pub fn delta(&self, trace: f64, dim: usize) -> f64 {
        match *self {
            Loading::Absolute(d) => d,
            Loading::TraceRelative(f) => f * trace / dim as f64,
        }
    }
}

/// Amplitude model the estimator assumes for the emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainModel {
    Generalized(BeampatternParams),
    /// `g = 1`: path loss only.
    Omnidirectional,
}

/// Beamformer outputs at one candidate position.
#[derive(Debug, Clone)]
pub struct Projection {
    /// `w[k * L + l]`.
    pub outputs: Vec<Complex64>,
    /// `ln(kappa_l / |p - u_l|)`.
    pub log_path_gain: Vec<f64>,
    pub transmit_angle: Vec<f64>,
}

impl Projection {
    /// `gamma / max(gamma)`, computed in the log domain so narrow beams
    /// cannot underflow every receiver at once.
    pub fn relative_gamma(&self, gains: &GainModel) -> Vec<f64> {
        let logs: Vec<f64> = match gains {
            GainModel::Omnidirectional => self.log_path_gain.clone(),
            GainModel::Generalized(psi) => {
                let alpha = psi.alpha();
                self.log_path_gain
                    .iter()
                    .zip(&self.transmit_angle)
                    .map(|(lp, t)| lp + alpha * ((t - psi.phi()).cos() - 1.0))
                    .collect()
            }
        };
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        logs.iter().map(|v| (v - top).exp()).collect()
    }
}

pub struct CostEvaluator<'a> {
    model: &'a SensorModel,
    obs: &'a ObservationSet,
    kind: CostKind,
    power: Vec<f64>,
    delta: Vec<f64>,
}

impl<'a> CostEvaluator<'a> {
    pub fn new(
        model: &'a SensorModel,
        obs: &'a ObservationSet,
        kind: CostKind,
        loading: Loading,
    ) -> Result<Self> {
        if obs.bins() != model.signal.samples {
            return Err(Error::Config(format!(
                "observation has {} bins, sensor model expects {}",
                obs.bins(),
                model.signal.samples
            )));
        }
        let dim = model.snapshot_len();
        if obs.snapshots.iter().any(|s| s.len() != dim) {
            return Err(Error::Config(format!("snapshots must have length {dim}")));
        }
        let power: Vec<f64> = (0..obs.bins()).map(|k| obs.bin_power(k)).collect();
        let delta: Vec<f64> = power.iter().map(|p| loading.delta(*p, dim)).collect();
        if kind == CostKind::Mvdr {
            if let Some(k) = delta.iter().position(|d| !(*d > 0.0)) {
                return Err(Error::Numerical(format!(
                    "loaded covariance of bin {k} is not invertible (delta = {})",
                    delta[k]
                )));
            }
        }
        Ok(Self {
            model,
            obs,
            kind,
            power,
            delta,
        })
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn model(&self) -> &SensorModel {
        self.model
    }

    pub fn project(&self, p: &Position) -> Result<Projection> {
        let model = self.model;
        let l_count = model.receiver_count();
        let n = self.obs.bins();
        let mut outputs = vec![Complex64::new(0.0, 0.0); n * l_count];
        let mut log_path_gain = Vec::with_capacity(l_count);
        let mut transmit_angle = Vec::with_capacity(l_count);
        let step = model.signal.omega(1);
        let mut offset = 0;
        for (l, rx) in model.receivers.iter().enumerate() {
            let theta_r = receive_angle(p, &rx.position)?;
            let range = p.distance_to(&rx.position);
            let tau = propagation_delay(p, &rx.position, model.constants.speed_of_light);
            let steer = steering_from_angle(theta_r, rx.element_count, model.spacing_wavelengths(l));
            let m = steer.len();
            let rotate = Complex64::from_polar(1.0, step * tau);
            let mut phase = Complex64::new(1.0, 0.0);
            for k in 0..n {
                let block = &self.obs.snapshots[k][offset..offset + m];
                let z: Complex64 = steer.iter().zip(block).map(|(a, r)| a.conj() * r).sum();
                outputs[k * l_count + l] = z * phase;
                phase *= rotate;
            }
            offset += m;
            log_path_gain.push((model.constants.kappa[l] / range).ln());
            // theta_t = theta_r + pi
            transmit_angle.push((rx.position.y - p.y).atan2(rx.position.x - p.x));
        }
        Ok(Projection {
            outputs,
            log_path_gain,
            transmit_angle,
        })
    }

    /// Cost for a projection and a (possibly unnormalized) gamma.
    pub fn evaluate(&self, proj: &Projection, gamma: &[f64]) -> f64 {
        let l_count = gamma.len();
        let norm2: f64 = gamma.iter().map(|g| g * g).sum();
        let m = self.model.element_count() as f64;
        let mut total = 0.0;
        for k in 0..self.obs.bins() {
            let row = &proj.outputs[k * l_count..(k + 1) * l_count];
            let s: Complex64 = row.iter().zip(gamma).map(|(w, g)| w * *g).sum();
            let x = s.norm_sqr() / norm2;
            total += match self.kind {
                CostKind::Matched => x,
                CostKind::Mvdr => {
                    let d = self.delta[k];
                    d / (m - x / (d + self.power[k]))
                }
            };
        }
        total
    }

    pub fn cost_with(&self, p: &Position, gains: &GainModel) -> Result<f64> {
        let proj = self.project(p)?;
        Ok(self.evaluate(&proj, &proj.relative_gamma(gains)))
    }

    pub fn cost(&self, p: &Position, psi: &BeampatternParams) -> Result<f64> {
        self.cost_with(p, &GainModel::Generalized(*psi))
    }
}

/// Matched (unknown-signal, unit-channel) cost at one candidate.
pub fn cost_matched(
    model: &SensorModel,
    obs: &ObservationSet,
    p: &Position,
    psi: &BeampatternParams,
) -> Result<f64> {
    CostEvaluator::new(model, obs, CostKind::Matched, Loading::Absolute(0.0))?.cost(p, psi)
}

/// MVDR-enhanced cost at one candidate.
pub fn cost_mvdr(
    model: &SensorModel,
    obs: &ObservationSet,
    p: &Position,
    psi: &BeampatternParams,
    loading: Loading,
) -> Result<f64> {
    CostEvaluator::new(model, obs, CostKind::Mvdr, loading)?.cost(p, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::signal::{composite_steering, sample_covariance, synthesize_observation};
    use nalgebra::{DMatrix, DVector};

    /// Direct matrix evaluation of both costs; independent of the projection path.
    fn oracle(
        model: &SensorModel,
        obs: &ObservationSet,
        p: &Position,
        psi: &BeampatternParams,
        delta: Option<f64>,
    ) -> (f64, f64) {
        let dim = model.snapshot_len();
        let mut matched = 0.0;
        let mut mvdr = 0.0;
        for k in 0..obs.bins() {
            let cs = composite_steering(model, p, psi, k).unwrap();
            let a = DVector::from_vec(cs.a.clone()) / Complex64::new(cs.gamma_norm(), 0.0);
            let r = sample_covariance(obs, k);
            matched += (a.adjoint() * &r * &a)[(0, 0)].re;
            let d = delta.unwrap_or(1e-3 * obs.bin_power(k) / dim as f64);
            let loaded = r + DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(d, 0.0);
            let inv = loaded.try_inverse().unwrap();
            mvdr += 1.0 / (a.adjoint() * inv * &a)[(0, 0)].re;
        }
        (matched, mvdr)
    }

    #[test]
    fn closed_forms_match_matrix_oracle() {
        let s = presets::scenario("comms").unwrap();
        let obs = synthesize_observation(&s, -3.0, 17).unwrap();
        let candidates = [
            (Position::new(600.0, 600.0), BeampatternParams::from_degrees(-10.0, 30.0).unwrap()),
            (Position::new(-1300.0, 250.0), BeampatternParams::from_degrees(120.0, 70.0).unwrap()),
            (Position::new(2000.0, -1900.0), BeampatternParams::from_degrees(-170.0, 10.0).unwrap()),
        ];
        for (p, psi) in candidates {
            let (m_ref, v_ref) = oracle(&s.sensors, &obs, &p, &psi, None);
            let m = cost_matched(&s.sensors, &obs, &p, &psi).unwrap();
            let v = cost_mvdr(&s.sensors, &obs, &p, &psi, Loading::default()).unwrap();
            assert!((m - m_ref).abs() <= 1e-9 * m_ref, "{m} vs {m_ref}");
            assert!((v - v_ref).abs() <= 1e-7 * v_ref, "{v} vs {v_ref}");
        }
    }

    #[test]
    fn mvdr_of_zero_data_is_n_delta_over_m() {
        let s = presets::scenario("comms").unwrap();
        let mut obs = synthesize_observation(&s, 0.0, 1).unwrap();
        for snap in obs.snapshots.iter_mut() {
            snap.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        }
        let delta = 0.25;
        let v = cost_mvdr(
            &s.sensors,
            &obs,
            &Position::new(100.0, -700.0),
            &BeampatternParams::from_degrees(45.0, 60.0).unwrap(),
            Loading::Absolute(delta),
        )
        .unwrap();
        assert!((v - 32.0 * delta / 4.0).abs() < 1e-12);
        assert!(cost_mvdr(
            &s.sensors,
            &obs,
            &Position::new(100.0, -700.0),
            &BeampatternParams::from_degrees(45.0, 60.0).unwrap(),
            Loading::default(),
        )
        .is_err());
    }

    #[test]
    fn single_sensor_matched_cost_is_position_independent() {
        let mut s = presets::scenario("comms").unwrap();
        s.sensors.receivers.truncate(1);
        s.sensors.receivers[0].element_count = 1;
        s.sensors.constants.kappa.truncate(1);
        let obs = synthesize_observation(&s, 0.0, 3).unwrap();
        let total: f64 = (0..obs.bins()).map(|k| obs.bin_power(k)).sum();
        let psi = BeampatternParams::from_degrees(10.0, 40.0).unwrap();
        for ix in -3..=3 {
            for iy in -3..=3 {
                let p = Position::new(ix as f64 * 700.0 + 13.0, iy as f64 * 600.0 + 7.0);
                let c = cost_matched(&s.sensors, &obs, &p, &psi).unwrap();
                assert!((c - total).abs() <= 1e-10 * total);
            }
        }
    }

    #[test]
    fn common_kappa_scale_cancels() {
        let s = presets::scenario("radar").unwrap();
        let obs = synthesize_observation(&s, -5.0, 4).unwrap();
        let mut scaled = s.sensors.clone();
        scaled.constants.kappa.iter_mut().for_each(|k| *k *= 10.0);
        let psi = BeampatternParams::from_degrees(-60.0, 40.0).unwrap();
        let p = Position::new(-3500.0, 3100.0);
        for kind in [CostKind::Matched, CostKind::Mvdr] {
            let a = CostEvaluator::new(&s.sensors, &obs, kind, Loading::default()).unwrap();
            let b = CostEvaluator::new(&scaled, &obs, kind, Loading::default()).unwrap();
            let (ca, cb) = (a.cost(&p, &psi).unwrap(), b.cost(&p, &psi).unwrap());
            assert!((ca - cb).abs() <= 1e-10 * ca);
        }
    }

    #[test]
    fn coincident_candidate_is_rejected() {
        let s = presets::scenario("comms").unwrap();
        let obs = synthesize_observation(&s, 0.0, 3).unwrap();
        let psi = BeampatternParams::from_degrees(0.0, 30.0).unwrap();
        assert!(matches!(
            cost_matched(&s.sensors, &obs, &Position::new(2500.0, 2500.0), &psi),
            Err(Error::DegenerateGeometry { .. })
        ));
    }
}
