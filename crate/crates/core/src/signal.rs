//! Frequency-domain observation model.
//!
//! Bin `k` of the stacked snapshot is `r_k = c_k(p, psi) s_k + n_k` with
//! `c_k = diag(a_k) (I_L kron 1_M) b`. Block `l` of the composite steering
//! vector `a_k` is `d_l exp(-j w_k tau_l) a_l(p)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{
    directional_attenuation, propagation_delay, receive_angle, steering_from_angle,
    BeampatternParams, EmitterTruth, Position,
};
use crate::scenario::{Scenario, SensorModel};
use crate::seeds::SeedStreams;

/// Mean power `E|s_k|^2` of the synthetic waveform coefficients.
pub const WAVEFORM_POWER: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSteering {
    /// Stacked `M * L` vector, receiver-major.
    pub a: Vec<Complex64>,
    /// Directional attenuation `d_l` per receiver.
    pub gamma: Vec<f64>,
}

impl CompositeSteering {
    pub fn gamma_norm(&self) -> f64 {
        self.gamma.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

/// Stacks `d_l exp(-j w_k tau_l) a_l(p)` for given per-receiver attenuations.
pub fn stack_blocks(
    model: &SensorModel,
    p: &Position,
    attenuations: &[f64],
    k: usize,
) -> Result<Vec<Complex64>> {
    let omega = model.signal.omega(k);
    let mut out = Vec::with_capacity(model.snapshot_len());
    for (l, rx) in model.receivers.iter().enumerate() {
        let theta_r = receive_angle(p, &rx.position)?;
        let tau = propagation_delay(p, &rx.position, model.constants.speed_of_light);
        let phase = Complex64::from_polar(attenuations[l], -omega * tau);
        out.extend(
            steering_from_angle(theta_r, rx.element_count, model.spacing_wavelengths(l))
                .into_iter()
                .map(|e| e * phase),
        );
    }
    Ok(out)
}

/// Composite steering vector of the generalized-pattern model at bin `k`
/// (zero-based).
pub fn composite_steering(
    model: &SensorModel,
    p: &Position,
    psi: &BeampatternParams,
    k: usize,
) -> Result<CompositeSteering> {
    let gamma = model
        .receivers
        .iter()
        .zip(&model.constants.kappa)
        .map(|(rx, kappa)| directional_attenuation(p, psi, &rx.position, *kappa))
        .collect::<Result<Vec<_>>>()?;
    let a = stack_blocks(model, p, &gamma, k)?;
    Ok(CompositeSteering { a, gamma })
}

/// One realization of the received data.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    /// `snapshots[k]` is the stacked `M * L` vector of bin `k`.
    pub snapshots: Vec<Vec<Complex64>>,
    pub noise_sigma: f64,
    pub waveform: Vec<Complex64>,
    pub channel: Vec<Complex64>,
    /// Present only for simulated data; estimators never read it.
    pub truth: Option<EmitterTruth>,
}

impl ObservationSet {
    pub fn bins(&self) -> usize {
        self.snapshots.len()
    }

    pub fn without_truth(&self) -> ObservationSet {
        ObservationSet {
            truth: None,
            ..self.clone()
        }
    }

    /// `||r_k||^2`, which is also `trace(R_k)`.
    pub fn bin_power(&self, k: usize) -> f64 {
        self.snapshots[k].iter().map(|z| z.norm_sqr()).sum()
    }
}

fn complex_normal<R: Rng>(rng: &mut R, std: f64) -> Complex64 {
    let scale = std / std::f64::consts::SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Noise standard deviation that puts the strongest receiver at `snr_db`
/// per element and per bin, assuming nominal unit channel gain.
pub fn calibrate_noise_sigma(scenario: &Scenario, snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::Config(format!("SNR must be finite, got {snr_db}")));
    }
    let strongest = scenario
        .true_attenuations()?
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok(strongest * WAVEFORM_POWER.sqrt() / 10f64.powf(snr_db / 20.0))
}

/// Index of the receiver with the largest true attenuation.
pub fn strongest_receiver(scenario: &Scenario) -> Result<usize> {
    let d = scenario.true_attenuations()?;
    Ok(d
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, v)| if *v > best.1 { (i, *v) } else { best })
        .0)
}

/// Channel vector `c_k = diag(a_k) H b` under the true emitter pattern.
pub fn true_channel_vector(
    scenario: &Scenario,
    attenuations: &[f64],
    channel: &[Complex64],
    k: usize,
) -> Result<Vec<Complex64>> {
    let model = &scenario.sensors;
    let m = model.element_count();
    let mut c = stack_blocks(model, &scenario.emitter.position, attenuations, k)?;
    for (i, z) in c.iter_mut().enumerate() {
        *z *= channel[i / m];
    }
    Ok(c)
}

pub fn synthesize_observation(scenario: &Scenario, snr_db: f64, seed: u64) -> Result<ObservationSet> {
    let sigma = if scenario.noise_free {
        if !snr_db.is_finite() {
            return Err(Error::Config(format!("SNR must be finite, got {snr_db}")));
        }
        0.0
    } else {
        calibrate_noise_sigma(scenario, snr_db)?
    };
    synthesize_with_sigma(scenario, sigma, &SeedStreams::from_seed(seed))
}

/// Synthesis with an explicit noise level and seed streams.
pub fn synthesize_with_sigma(
    scenario: &Scenario,
    noise_sigma: f64,
    streams: &SeedStreams,
) -> Result<ObservationSet> {
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::Config(format!("invalid noise sigma {noise_sigma}")));
    }
    let model = &scenario.sensors;
    let n = model.signal.samples;
    let len = model.snapshot_len();

    let mut rng = streams.waveform_rng();
    let waveform: Vec<Complex64> = (0..n)
        .map(|_| complex_normal(&mut rng, WAVEFORM_POWER.sqrt()))
        .collect();

    let mut rng = streams.channel_rng();
    let channel: Vec<Complex64> = (0..model.receiver_count())
        .map(|_| Complex64::new(1.0, 0.0) + complex_normal(&mut rng, scenario.channel_std))
        .collect();

    let attenuations = scenario.true_attenuations()?;
    let mut rng = streams.noise_rng();
    let mut snapshots = Vec::with_capacity(n);
    for (k, s) in waveform.iter().enumerate() {
        let c = true_channel_vector(scenario, &attenuations, &channel, k)?;
        let mut r: Vec<Complex64> = c.into_iter().map(|z| z * s).collect();
        if noise_sigma > 0.0 {
            for z in r.iter_mut() {
                *z += complex_normal(&mut rng, noise_sigma);
            }
        }
        debug_assert_eq!(r.len(), len);
        snapshots.push(r);
    }

    Ok(ObservationSet {
        snapshots,
        noise_sigma,
        waveform,
        channel,
        truth: Some(scenario.emitter),
    })
}

/// Single-snapshot covariance `R_k = r_k r_k^H`.
pub fn sample_covariance(obs: &ObservationSet, k: usize) -> DMatrix<Complex64> {
    let r = &obs.snapshots[k];
    DMatrix::from_fn(r.len(), r.len(), |i, j| r[i] * r[j].conj())
}
