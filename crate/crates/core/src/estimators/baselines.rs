//! Reference methods that ignore emitter directivity.
//!
//! `aoa_tdoa` is a phase-only direct position determination: unit amplitudes,
//! an unknown complex gain per receiver and an unknown waveform. With
//! `w_{k,l} = exp(+j w_k tau_l) a_l^H r_{k,l}` and `w_k = [w_{k,1} .. w_{k,L}]`,
//! maximizing over the receiver gains gives
//!
//! ```text
//! cost(p) = lambda_max( sum_k w_k w_k^H )
//! ```
//!
//! Cross-receiver terms keep the delay (TDOA) information; the steering
//! vectors carry the bearing (AOA) information. A common phase rotation of any
//! receiver's block is absorbed by that receiver's unknown gain.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::cost::{CostEvaluator, CostKind, GainModel, Loading};
use super::grid::{CostSurface, PositionGrid};
use super::search::{evaluate_positions, position_surface};
use crate::error::Result;
use crate::scenario::SensorModel;
use crate::signal::ObservationSet;

pub fn baseline_aoa_tdoa(
    model: &SensorModel,
    obs: &ObservationSet,
    grid: &PositionGrid,
) -> Result<CostSurface> {
    // loading is irrelevant for the projection
    let eval = CostEvaluator::new(model, obs, CostKind::Matched, Loading::Absolute(0.0))?;
    let l_count = model.receiver_count();
    evaluate_positions(grid, |p| {
        let proj = eval.project(p)?;
        let mut gram = DMatrix::<Complex64>::zeros(l_count, l_count);
        for row in proj.outputs.chunks(l_count) {
            for i in 0..l_count {
                for j in 0..l_count {
                    gram[(i, j)] += row[i] * row[j].conj();
                }
            }
        }
        Ok(gram
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max))
    })
}

/// MVDR cost with path loss only (`g = 1` at every receiver).
pub fn baseline_mvdr_omni(
    model: &SensorModel,
    obs: &ObservationSet,
    grid: &PositionGrid,
    loading: Loading,
) -> Result<CostSurface> {
    let eval = CostEvaluator::new(model, obs, CostKind::Mvdr, loading)?;
    position_surface(&eval, &GainModel::Omnidirectional, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BeampatternParams, PatternKind, Position};
    use crate::presets;
    use crate::signal::synthesize_observation;

    fn omni_like_scenario() -> crate::scenario::Scenario {
        let mut s = presets::scenario("comms").unwrap();
        s.noise_free = true;
        s.channel_std = 0.0;
        // a single ULA element radiates equally in every direction
        s.emitter.pattern = PatternKind::UlaElements {
            count: 2,
            spacing_wavelengths: 0.0,
        };
        s
    }

    fn grid() -> PositionGrid {
        PositionGrid::centered(Position::new(0.0, 0.0), 6000.0, 100.0).unwrap()
    }

    #[test]
    fn noise_free_omnidirectional_recovery() {
        let s = omni_like_scenario();
        assert_eq!(s.emitter.gain_towards(&Position::new(2500.0, 2500.0)).unwrap(), 1.0);
        let obs = synthesize_observation(&s, 0.0, 6).unwrap();
        let g = grid();
        let a = baseline_aoa_tdoa(&s.sensors, &obs, &g).unwrap();
        assert_eq!(g.node(a.argmax), s.emitter.position);
        let m = baseline_mvdr_omni(&s.sensors, &obs, &g, Loading::default()).unwrap();
        assert_eq!(g.node(m.argmax), s.emitter.position);
    }

    #[test]
    fn aoa_tdoa_ignores_per_receiver_phase() {
        let s = presets::scenario("comms").unwrap();
        let obs = synthesize_observation(&s, 0.0, 6).unwrap();
        let mut rotated = obs.clone();
        let turns = [0.3, -1.1, 2.0, 0.7];
        for snap in rotated.snapshots.iter_mut() {
            for (i, z) in snap.iter_mut().enumerate() {
                *z *= Complex64::from_polar(1.0, turns[i / 4]);
            }
        }
        let g = PositionGrid::centered(Position::new(0.0, 0.0), 3000.0, 250.0).unwrap();
        let a = baseline_aoa_tdoa(&s.sensors, &obs, &g).unwrap();
        let b = baseline_aoa_tdoa(&s.sensors, &rotated, &g).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-9 * x.abs());
        }
    }

    #[test]
    fn omni_mvdr_uses_path_loss_only() {
        let s = presets::scenario("comms").unwrap();
        let obs = synthesize_observation(&s, -4.0, 2).unwrap();
        let g = PositionGrid::centered(Position::new(0.0, 0.0), 2000.0, 500.0).unwrap();
        let surface = baseline_mvdr_omni(&s.sensors, &obs, &g, Loading::default()).unwrap();
        let eval = CostEvaluator::new(&s.sensors, &obs, CostKind::Mvdr, Loading::default()).unwrap();
        for i in 0..g.len() {
            let p = g.node(i);
            let proj = eval.project(&p).unwrap();
            let gamma: Vec<f64> = s
                .sensors
                .receivers
                .iter()
                .map(|rx| 1.0 / p.distance_to(&rx.position))
                .collect();
            let direct = eval.evaluate(&proj, &gamma);
            assert!((surface.values[i] - direct).abs() <= 1e-12 * direct);
        }
        // a generalized pattern never reduces to the flat one
        let wide = BeampatternParams::from_degrees(0.0, 90.0).unwrap();
        let p = g.node(3);
        assert_ne!(
            eval.cost(&p, &wide).unwrap(),
            eval.cost_with(&p, &GainModel::Omnidirectional).unwrap()
        );
    }
}
