//! Planar geometry and antenna models.
//!
//! Angles are radians throughout; orientations are normalized to (-pi, pi].
//! The emitter beampattern is the two-parameter main-lobe model
//! `g = exp(alpha(beta) * (cos(theta_t - phi) - 1))`, whose half-power
//! points sit exactly at `phi +/- beta / 2`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Separation below which an emitter and a receiver are treated as coincident.
const COINCIDENCE_TOLERANCE_M: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Position {
        Position::new(self.x + dx, self.y + dy)
    }

    /// Rotates about the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> Position {
        let (s, c) = angle.sin_cos();
        Position::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Emitter orientation `phi` and half-power beamwidth `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeampatternParams {
    phi: f64,
    beta: f64,
}

impl BeampatternParams {
    pub fn new(phi: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < PI) || !phi.is_finite() {
            return Err(Error::BeamwidthDomain(beta));
        }
        Ok(Self {
            phi: normalize_angle(phi),
            beta,
        })
    }

    pub fn from_degrees(phi_deg: f64, beta_deg: f64) -> Result<Self> {
        Self::new(phi_deg.to_radians(), beta_deg.to_radians())
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Shape parameter of the main-lobe model for this beamwidth.
    pub fn alpha(&self) -> f64 {
        // beta is validated at construction
        alpha_unchecked(self.beta)
    }
}

fn alpha_unchecked(beta: f64) -> f64 {
    -(LN_2 / 2.0) / ((beta / 2.0).cos() - 1.0)
}

/// `alpha(beta) = -(ln 2 / 2) / (cos(beta/2) - 1)`.
pub fn alpha_of_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < PI) {
        return Err(Error::BeamwidthDomain(beta));
    }
    Ok(alpha_unchecked(beta))
}

/// `d alpha / d beta`, used by the Fisher information.
pub fn dalpha_dbeta(beta: f64) -> f64 {
    let c = (beta / 2.0).cos() - 1.0;
    -(LN_2 / 4.0) * (beta / 2.0).sin() / (c * c)
}

/// A receiving station: a uniform linear array along the x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverArray {
    pub position: Position,
    pub element_count: usize,
    /// Element spacing in meters.
    pub element_spacing: f64,
    pub element_gain: f64,
    pub loss: f64,
}

impl ReceiverArray {
    pub fn new(position: Position, element_count: usize, element_spacing: f64) -> Result<Self> {
        if element_count == 0 {
            return Err(Error::Config("receiver needs at least one element".into()));
        }
        if !(element_spacing > 0.0) {
            return Err(Error::Config(format!(
                "element spacing must be positive, got {element_spacing}"
            )));
        }
        Ok(Self {
            position,
            element_count,
            element_spacing,
            element_gain: 1.0,
            loss: 1.0,
        })
    }
}

/// Shape of the true emitter pattern used when synthesizing signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternKind {
    Generalized,
    /// Uniform linear array of `count` elements at `spacing_wavelengths`.
    UlaElements { count: usize, spacing_wavelengths: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterTruth {
    pub position: Position,
    pub psi: BeampatternParams,
    pub pattern: PatternKind,
    pub transmit_power: f64,
    pub peak_gain: f64,
    pub wavelength: f64,
}

impl EmitterTruth {
    /// Amplitude gain the true emitter radiates towards `receiver`.
    pub fn gain_towards(&self, receiver: &Position) -> Result<f64> {
        match self.pattern {
            PatternKind::Generalized => beampattern_gain(&self.position, &self.psi, receiver),
            PatternKind::UlaElements {
                count,
                spacing_wavelengths,
            } => {
                let theta = transmit_angle(&self.position, receiver)?;
                ula_truth_gain(theta - self.psi.phi(), count, spacing_wavelengths)
            }
        }
    }
}

/// Position-independent link constants `kappa_l` per receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConstants {
    pub kappa: Vec<f64>,
    pub speed_of_light: f64,
}

impl PropagationConstants {
    pub fn uniform(kappa: f64, receivers: usize) -> Self {
        Self {
            kappa: vec![kappa; receivers],
            speed_of_light: SPEED_OF_LIGHT,
        }
    }

    /// `kappa_l = sqrt(P_T G_0 G_R lambda^2 / ((4 pi)^2 L_l))`.
    pub fn from_link_budget(emitter: &EmitterTruth, receivers: &[ReceiverArray]) -> Self {
        let kappa = receivers
            .iter()
            .map(|r| {
                let num = emitter.transmit_power
                    * emitter.peak_gain
                    * r.element_gain
                    * emitter.wavelength
                    * emitter.wavelength;
                (num / ((4.0 * PI).powi(2) * r.loss)).sqrt()
            })
            .collect();
        Self {
            kappa,
            speed_of_light: SPEED_OF_LIGHT,
        }
    }
}

fn check_separation(p: &Position, u: &Position) -> Result<f64> {
    let r = p.distance_to(u);
    if r < COINCIDENCE_TOLERANCE_M {
        return Err(Error::DegenerateGeometry { x: p.x, y: p.y });
    }
    Ok(r)
}

/// Angle from the emitter at `p` towards the receiver at `u`.
pub fn transmit_angle(p: &Position, u: &Position) -> Result<f64> {
    check_separation(p, u)?;
    Ok((u.y - p.y).atan2(u.x - p.x))
}

/// Angle from the receiver at `u` towards the emitter at `p`.
pub fn receive_angle(p: &Position, u: &Position) -> Result<f64> {
    check_separation(p, u)?;
    Ok((p.y - u.y).atan2(p.x - u.x))
}

pub fn propagation_delay(p: &Position, u: &Position, speed_of_light: f64) -> f64 {
    p.distance_to(u) / speed_of_light
}

/// Main-lobe amplitude gain for a given transmit angle.
pub fn gain_at_angle(theta_t: f64, psi: &BeampatternParams) -> f64 {
    (psi.alpha() * ((theta_t - psi.phi()).cos() - 1.0)).exp()
}

pub fn beampattern_gain(p: &Position, psi: &BeampatternParams, u: &Position) -> Result<f64> {
    Ok(gain_at_angle(transmit_angle(p, u)?, psi))
}

/// Normalized array-factor magnitude of a broadside ULA with `count`
/// elements, `angle_off_boresight` measured from the array normal.
pub fn ula_truth_gain(angle_off_boresight: f64, count: usize, spacing_wavelengths: f64) -> Result<f64> {
    if count < 2 {
        return Err(Error::Config(format!(
            "ULA truth pattern needs at least 2 elements, got {count}"
        )));
    }
    let half_phase = PI * spacing_wavelengths * angle_off_boresight.sin();
    let den = count as f64 * half_phase.sin();
    if den.abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok(((count as f64 * half_phase).sin() / den).abs().min(1.0))
}

/// `d_l = kappa_l / |p - u_l| * g_l(p, psi)`.
pub fn directional_attenuation(
    p: &Position,
    psi: &BeampatternParams,
    u: &Position,
    kappa: f64,
) -> Result<f64> {
    let r = check_separation(p, u)?;
    Ok(kappa / r * beampattern_gain(p, psi, u)?)
}

/// Steering vector for a receive angle; element m is
/// `exp(-j 2 pi m (spacing/lambda) cos(theta_r))`, m = 0..count.
pub fn steering_from_angle(theta_r: f64, count: usize, spacing_wavelengths: f64) -> Vec<Complex64> {
    let step = -2.0 * PI * spacing_wavelengths * theta_r.cos();
    (0..count)
        .map(|m| Complex64::from_polar(1.0, step * m as f64))
        .collect()
}

pub fn steering_vector(
    p: &Position,
    u: &Position,
    count: usize,
    spacing: f64,
    wavelength: f64,
) -> Result<Vec<Complex64>> {
    if count == 0 || !(spacing > 0.0) || !(wavelength > 0.0) {
        return Err(Error::Config(
            "steering vector needs count >= 1, spacing > 0 and wavelength > 0".into(),
        ));
    }
    let theta_r = receive_angle(p, u)?;
    Ok(steering_from_angle(theta_r, count, spacing / wavelength))
}
