//! Fisher information and the position Cramér-Rao bound.
//!
//! Unknowns are stacked in the real vector
//! `zeta = [x, y, phi, beta, Re b_1..L, Im b_1..L, Re s_1..N, Im s_1..N]`.
//! With `mu_k = c_k s_k` and circular Gaussian noise of variance `sigma^2`,
//! `J = (2 / sigma^2) Re sum_k D_k^H D_k` where `D_k = d mu_k / d zeta`.
//!
//! The nuisance block is always singular. The product `b_l s_k` is invariant
//! to `b -> b q`, `s -> s / q` for any complex `q` (two real directions), and
//! a free complex `b_l` absorbs any change of the real amplitude `d_l`, so
//! the `phi` and `beta` columns lie in the span of the channel columns (two
//! more). The block is inverted with an equilibrated pseudo-inverse; its null
//! space is orthogonal to the position columns, so the Schur complement is
//! unaffected.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    dalpha_dbeta, gain_at_angle, propagation_delay, receive_angle, steering_from_angle,
    transmit_angle, BeampatternParams, Position,
};
use crate::scenario::{Scenario, SensorModel};
use crate::seeds::{splitmix64, SeedStreams};
use crate::signal::{calibrate_noise_sigma, composite_steering, synthesize_with_sigma};

/// Null-space dimension of the nuisance block: the channel/waveform scaling
/// ambiguity plus the two beampattern parameters.
pub const NUISANCE_NULL_DIMENSIONS: usize = 4;

/// Relative eigenvalue threshold of the nuisance pseudo-inverse.
const PINV_TOLERANCE: f64 = 1e-10;

/// Nuisance condition number above which a report is flagged.
const CONDITION_LIMIT: f64 = 1e12;

/// Index map of the real parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamLayout {
    pub receivers: usize,
    pub bins: usize,
}

impl ParamLayout {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const PHI: usize = 2;
    pub const BETA: usize = 3;

    pub fn len(&self) -> usize {
        4 + 2 * self.receivers + 2 * self.bins
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn re_b(&self, l: usize) -> usize {
        4 + l
    }

    pub fn im_b(&self, l: usize) -> usize {
        4 + self.receivers + l
    }

    pub fn re_s(&self, k: usize) -> usize {
        4 + 2 * self.receivers + k
    }

    pub fn im_s(&self, k: usize) -> usize {
        4 + 2 * self.receivers + self.bins + k
    }
}

/// A point in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    pub position: Position,
    pub psi: BeampatternParams,
    pub channel: Vec<Complex64>,
    pub waveform: Vec<Complex64>,
}

impl ParamPoint {
    pub fn layout(&self) -> ParamLayout {
        ParamLayout {
            receivers: self.channel.len(),
            bins: self.waveform.len(),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.position.x, self.position.y, self.psi.phi(), self.psi.beta()];
        v.extend(self.channel.iter().map(|b| b.re));
        v.extend(self.channel.iter().map(|b| b.im));
        v.extend(self.waveform.iter().map(|s| s.re));
        v.extend(self.waveform.iter().map(|s| s.im));
        v
    }

    pub fn from_vec(layout: ParamLayout, zeta: &[f64]) -> Result<Self> {
        if zeta.len() != layout.len() {
            return Err(Error::Config(format!(
                "parameter vector has {} entries, layout needs {}",
                zeta.len(),
                layout.len()
            )));
        }
        let (l, n) = (layout.receivers, layout.bins);
        Ok(Self {
            position: Position::new(zeta[ParamLayout::X], zeta[ParamLayout::Y]),
            psi: BeampatternParams::new(zeta[ParamLayout::PHI], zeta[ParamLayout::BETA])?,
            channel: (0..l)
                .map(|i| Complex64::new(zeta[layout.re_b(i)], zeta[layout.im_b(i)]))
                .collect(),
            waveform: (0..n)
                .map(|k| Complex64::new(zeta[layout.re_s(k)], zeta[layout.im_s(k)]))
                .collect(),
        })
    }
}

fn check_dims(model: &SensorModel, point: &ParamPoint) -> Result<()> {
    if point.channel.len() != model.receiver_count() || point.waveform.len() != model.signal.samples {
        return Err(Error::Config(format!(
            "parameter point has {} channels and {} bins, model has {} and {}",
            point.channel.len(),
            point.waveform.len(),
            model.receiver_count(),
            model.signal.samples
        )));
    }
    Ok(())
}

/// Noise-free mean `mu_k = c_k s_k` of every bin.
pub fn mean_signal(model: &SensorModel, point: &ParamPoint) -> Result<Vec<Vec<Complex64>>> {
    check_dims(model, point)?;
    let m = model.element_count();
    (0..model.signal.samples)
        .map(|k| {
            let a = composite_steering(model, &point.position, &point.psi, k)?.a;
            Ok(a.iter()
                .enumerate()
                .map(|(i, z)| z * point.channel[i / m] * point.waveform[k])
                .collect())
        })
        .collect()
}

/// Per-receiver geometric quantities shared by all bins.
struct ReceiverTerms {
    /// `d_l`.
    atten: f64,
    /// `d d_l / d(x, y)`, `d d_l / d phi`, `d d_l / d beta`.
    datten_dp: [f64; 2],
    datten_dphi: f64,
    datten_dbeta: f64,
    tau: f64,
    dtau_dp: [f64; 2],
    steering: Vec<Complex64>,
    /// `d a_m / d(x, y)`.
    dsteer_dp: Vec<[Complex64; 2]>,
}

fn receiver_terms(model: &SensorModel, point: &ParamPoint, l: usize) -> Result<ReceiverTerms> {
    let rx = &model.receivers[l];
    let (p, u) = (&point.position, &rx.position);
    let psi = &point.psi;
    let theta_t = transmit_angle(p, u)?;
    let theta_r = receive_angle(p, u)?;
    let (dx, dy) = (p.x - u.x, p.y - u.y);
    let r = dx.hypot(dy);
    let r2 = r * r;
    let kappa = model.constants.kappa[l];

    let g = gain_at_angle(theta_t, psi);
    let off = theta_t - psi.phi();
    let alpha = psi.alpha();
    // transmit angle points from p to u
    let dtheta_t = [-dy / r2, dx / r2];
    let dg_dtheta = -alpha * off.sin() * g;
    let dinv_r = [-dx / (r2 * r), -dy / (r2 * r)];
    let datten_dp = [
        kappa * (dinv_r[0] * g + dg_dtheta * dtheta_t[0] / r),
        kappa * (dinv_r[1] * g + dg_dtheta * dtheta_t[1] / r),
    ];
    let datten_dphi = kappa / r * alpha * off.sin() * g;
    let datten_dbeta = kappa / r * (off.cos() - 1.0) * g * dalpha_dbeta(psi.beta());

    let c = model.constants.speed_of_light;
    let tau = propagation_delay(p, u, c);
    let dtau_dp = [dx / (r * c), dy / (r * c)];

    let spacing = model.spacing_wavelengths(l);
    let steering = steering_from_angle(theta_r, rx.element_count, spacing);
    let dtheta_r = [-dy / r2, dx / r2];
    let dsteer_dp = steering
        .iter()
        .enumerate()
        .map(|(m, a)| {
            // d/dtheta of exp(-j 2 pi m s cos theta)
            let factor = Complex64::new(0.0, 2.0 * std::f64::consts::PI * m as f64 * spacing * theta_r.sin());
            let d = a * factor;
            [d * dtheta_r[0], d * dtheta_r[1]]
        })
        .collect();

    Ok(ReceiverTerms {
        atten: kappa / r * g,
        datten_dp,
        datten_dphi,
        datten_dbeta,
        tau,
        dtau_dp,
        steering,
        dsteer_dp,
    })
}

/// Jacobians `d mu_k / d zeta` for every bin, each `M L x len(zeta)`.
pub fn mean_derivatives(model: &SensorModel, point: &ParamPoint) -> Result<Vec<DMatrix<Complex64>>> {
    check_dims(model, point)?;
    let layout = point.layout();
    let m = model.element_count();
    let terms = (0..model.receiver_count())
        .map(|l| receiver_terms(model, point, l))
        .collect::<Result<Vec<_>>>()?;
    let j = Complex64::new(0.0, 1.0);

    Ok((0..model.signal.samples)
        .map(|k| {
            let omega = model.signal.omega(k);
            let s = point.waveform[k];
            let mut d = DMatrix::zeros(model.snapshot_len(), layout.len());
            for (l, t) in terms.iter().enumerate() {
                let b = point.channel[l];
                let e = Complex64::from_polar(1.0, -omega * t.tau);
                for mi in 0..m {
                    let row = l * m + mi;
                    let a = t.steering[mi];
                    // c = d_l e a_m
                    let c = e * a * t.atten;
                    for (col, axis) in [(ParamLayout::X, 0), (ParamLayout::Y, 1)] {
                        let dc = e * a * t.datten_dp[axis]
                            + c * (-j * omega * t.dtau_dp[axis])
                            + e * t.dsteer_dp[mi][axis] * t.atten;
                        d[(row, col)] = b * s * dc;
                    }
                    d[(row, ParamLayout::PHI)] = b * s * e * a * t.datten_dphi;
                    d[(row, ParamLayout::BETA)] = b * s * e * a * t.datten_dbeta;
                    d[(row, layout.re_b(l))] = c * s;
                    d[(row, layout.im_b(l))] = j * c * s;
                    d[(row, layout.re_s(k))] = c * b;
                    d[(row, layout.im_s(k))] = j * c * b;
                }
            }
            d
        })
        .collect())
}

/// `J = (2 / sigma^2) Re sum_k D_k^H D_k`.
pub fn fisher_matrix(model: &SensorModel, point: &ParamPoint, noise_sigma: f64) -> Result<DMatrix<f64>> {
    if !(noise_sigma > 0.0) || !noise_sigma.is_finite() {
        return Err(Error::Config(format!(
            "noise sigma must be positive and finite, got {noise_sigma}"
        )));
    }
    let n = point.layout().len();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for dk in mean_derivatives(model, point)? {
        acc += dk.adjoint() * &dk;
    }
    let scale = 2.0 / (noise_sigma * noise_sigma);
    let mut fim = acc.map(|z| z.re * scale);
    // exact symmetry despite summation order
    for i in 0..n {
        for k in 0..i {
            let v = 0.5 * (fim[(i, k)] + fim[(k, i)]);
            fim[(i, k)] = v;
            fim[(k, i)] = v;
        }
    }
    Ok(fim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrlbReport {
    pub fim: DMatrix<f64>,
    pub crlb_pos: Matrix2<f64>,
    /// `sqrt(trace(crlb_pos))`, meters.
    pub sigma_p: f64,
    /// Eigenvalues of the equilibrated nuisance block treated as zero.
    pub rank_deficiency: usize,
    /// Ratio of the largest to the smallest retained nuisance eigenvalue.
    pub condition_number: f64,
}

impl CrlbReport {
    /// Pseudo-inverse dropped other than the expected null directions, or
    /// the retained part is badly conditioned.
    pub fn flagged(&self) -> bool {
        self.rank_deficiency != NUISANCE_NULL_DIMENSIONS || self.condition_number > CONDITION_LIMIT
    }
}

/// Position bound from a full Fisher matrix whose first two rows are `x, y`.
pub fn position_crlb(fim: &DMatrix<f64>) -> Result<CrlbReport> {
    let n = fim.nrows();
    if n < 2 || fim.ncols() != n {
        return Err(Error::Config("Fisher matrix must be square with at least 2 rows".into()));
    }
    let jpp = fim.view((0, 0), (2, 2)).into_owned();
    let (schur, rank_deficiency, condition_number) = if n == 2 {
        (jpp, 0, 1.0)
    } else {
        let jpe = fim.view((0, 2), (2, n - 2)).into_owned();
        let jee = fim.view((2, 2), (n - 2, n - 2)).into_owned();
        let (pinv, deficiency, cond) = equilibrated_pinv(&jee)?;
        (jpp - &jpe * pinv * jpe.transpose(), deficiency, cond)
    };
    let schur = Matrix2::new(schur[(0, 0)], schur[(0, 1)], schur[(1, 0)], schur[(1, 1)]);
    let crlb_pos = schur
        .try_inverse()
        .ok_or_else(|| Error::Numerical("position Schur complement is singular".into()))?;
    let trace = crlb_pos.trace();
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(Error::Numerical(format!("position bound trace is {trace}")));
    }
    if rank_deficiency != NUISANCE_NULL_DIMENSIONS && n > 2 {
        log::warn!("nuisance Fisher block dropped {rank_deficiency} directions");
    }
    Ok(CrlbReport {
        fim: fim.clone(),
        crlb_pos,
        sigma_p: trace.sqrt(),
        rank_deficiency,
        condition_number,
    })
}

/// Pseudo-inverse of a symmetric PSD matrix after unit-diagonal scaling.
fn equilibrated_pinv(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, usize, f64)> {
    let n = a.nrows();
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let d = a[(i, i)];
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * scale[i] * scale[j]);
    let eig = SymmetricEigen::new(scaled);
    let top = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    if !(top > 0.0) {
        return Err(Error::Numerical("nuisance Fisher block is zero".into()));
    }
    let cutoff = top * PINV_TOLERANCE;
    let mut inv_diag = vec![0.0; n];
    let mut dropped = 0;
    let mut smallest = top;
    for (i, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev > cutoff {
            inv_diag[i] = 1.0 / ev;
            smallest = smallest.min(ev);
        } else {
            dropped += 1;
        }
    }
    let v = &eig.eigenvectors;
    let core = v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(inv_diag)) * v.transpose();
    let pinv = DMatrix::from_fn(n, n, |i, j| core[(i, j)] * scale[i] * scale[j]);
    Ok((pinv, dropped, top / smallest))
}

/// Parameter point at the scenario truth with unit channel and `waveform`.
pub fn nominal_point(scenario: &Scenario, waveform: Vec<Complex64>) -> ParamPoint {
    ParamPoint {
        position: scenario.emitter.position,
        psi: scenario.emitter.psi,
        channel: vec![Complex64::new(1.0, 0.0); scenario.sensors.receiver_count()],
        waveform,
    }
}

/// Seed of the `draw`-th bound waveform.
fn draw_seed(base_seed: u64, draw: usize) -> u64 {
    splitmix64(splitmix64(base_seed ^ 0xC71B_0000_0000_0000) ^ draw as u64)
}

/// Waveforms drawn the same way as in observation synthesis.
pub fn waveform_draws(scenario: &Scenario, draws: usize, base_seed: u64) -> Result<Vec<Vec<Complex64>>> {
    if draws == 0 {
        return Err(Error::Config("at least one waveform draw is required".into()));
    }
    (0..draws)
        .map(|i| {
            let streams = SeedStreams::from_seed(draw_seed(base_seed, i));
            Ok(synthesize_with_sigma(scenario, 0.0, &streams)?.waveform)
        })
        .collect()
}

/// Bound averaged over waveform realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSummary {
    pub sigma_p: f64,
    pub flagged: bool,
    pub max_condition_number: f64,
}

/// Mean `sigma_p` over `waveforms` at the scenario truth.
pub fn average_bound(scenario: &Scenario, waveforms: &[Vec<Complex64>], noise_sigma: f64) -> Result<BoundSummary> {
    if waveforms.is_empty() {
        return Err(Error::Empty("waveform list"));
    }
    let mut sum = 0.0;
    let mut flagged = false;
    let mut cond: f64 = 0.0;
    for w in waveforms {
        let point = nominal_point(scenario, w.clone());
        let report = position_crlb(&fisher_matrix(&scenario.sensors, &point, noise_sigma)?)?;
        sum += report.sigma_p;
        flagged |= report.flagged();
        cond = cond.max(report.condition_number);
    }
    Ok(BoundSummary {
        sigma_p: sum / waveforms.len() as f64,
        flagged,
        max_condition_number: cond,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Phi,
    Beta,
}

/// `sigma_p` as the true orientation or beamwidth takes each of `values`
/// (radians). Every perturbed scenario is evaluated at `snr_db` under the
/// usual calibration, so the noise level follows the strongest receiver.
pub fn sensitivity_sweep(
    scenario: &Scenario,
    vary: SweepParam,
    values: &[f64],
    snr_db: f64,
    waveforms: &[Vec<Complex64>],
) -> Result<Vec<(f64, BoundSummary)>> {
    values
        .par_iter()
        .map(|&v| {
            let mut s = scenario.clone();
            let psi = s.emitter.psi;
            s.emitter.psi = match vary {
                SweepParam::Phi => BeampatternParams::new(v, psi.beta())?,
                SweepParam::Beta => BeampatternParams::new(psi.phi(), v)?,
            };
            let sigma = calibrate_noise_sigma(&s, snr_db)?;
            Ok((v, average_bound(&s, waveforms, sigma)?))
        })
        .collect()
}

/// Bound at each SNR of `snr_db`.
pub fn bound_curve(
    scenario: &Scenario,
    snr_db: &[f64],
    waveforms: &[Vec<Complex64>],
) -> Result<Vec<(f64, BoundSummary)>> {
    snr_db
        .iter()
        .map(|&snr| {
            let sigma = calibrate_noise_sigma(scenario, snr)?;
            Ok((snr, average_bound(scenario, waveforms, sigma)?))
        })
        .collect()
}
