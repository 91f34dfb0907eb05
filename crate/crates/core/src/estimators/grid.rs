use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{BeampatternParams, Position};

/// Rectangular position grid, enumerated row-major from `(x_min, y_min)`:
/// linear index `iy * columns + ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: f64,
}

fn steps(span: f64, resolution: f64) -> usize {
    ((span / resolution) + 1e-9).floor() as usize + 1
}

impl PositionGrid {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) {
            return Err(Error::Config(format!(
                "grid resolution must be positive, got {resolution}"
            )));
        }
        if !(x_max >= x_min && y_max >= y_min) {
            return Err(Error::Config("grid bounds are inverted".into()));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            resolution,
        })
    }

    /// Square window of side `extent` centered on `center`.
    pub fn centered(center: Position, extent: f64, resolution: f64) -> Result<Self> {
        let h = extent / 2.0;
        Self::new(center.x - h, center.x + h, center.y - h, center.y + h, resolution)
    }

    pub fn single(p: Position) -> Self {
        Self {
            x_min: p.x,
            x_max: p.x,
            y_min: p.y,
            y_max: p.y,
            resolution: 1.0,
        }
    }

    pub fn columns(&self) -> usize {
        steps(self.x_max - self.x_min, self.resolution)
    }

    pub fn rows(&self) -> usize {
        steps(self.y_max - self.y_min, self.resolution)
    }

    pub fn len(&self) -> usize {
        self.columns() * self.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, index: usize) -> Position {
        let cols = self.columns();
        let (ix, iy) = (index % cols, index / cols);
        Position::new(
            self.x_min + ix as f64 * self.resolution,
            self.y_min + iy as f64 * self.resolution,
        )
    }

    pub fn cell_area(&self) -> f64 {
        self.resolution * self.resolution
    }

    /// Index of the node closest to `p`, if `p` lies within the window.
    pub fn nearest_index(&self, p: &Position) -> Option<usize> {
        let fx = ((p.x - self.x_min) / self.resolution).round();
        let fy = ((p.y - self.y_min) / self.resolution).round();
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        (ix < self.columns() && iy < self.rows()).then(|| iy * self.columns() + ix)
    }
}

/// Orientation/beamwidth candidates; the beampattern surface is laid out
/// with beamwidth as the row and orientation as the column.
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternGrid {
    pub phi_values: Vec<f64>,
    pub beta_values: Vec<f64>,
}

impl BeampatternGrid {
    /// Orientations `-180 + step, ..., 180` degrees and the listed beamwidths.
    pub fn from_degrees(phi_step_deg: f64, beta_deg: &[f64]) -> Result<Self> {
        if !(phi_step_deg > 0.0 && phi_step_deg <= 360.0) {
            return Err(Error::Config(format!(
                "orientation step must be in (0, 360] degrees, got {phi_step_deg}"
            )));
        }
        let count = (360.0 / phi_step_deg + 1e-9).floor() as usize;
        let phi_values = (1..=count)
            .map(|i| (180.0 - (count - i) as f64 * phi_step_deg).to_radians())
            .collect();
        let beta_values = beta_deg.iter().map(|b| b.to_radians()).collect();
        Self::new(phi_values, beta_values)
    }

    pub fn new(phi_values: Vec<f64>, beta_values: Vec<f64>) -> Result<Self> {
        if phi_values.is_empty() || beta_values.is_empty() {
            return Err(Error::Empty("beampattern grid"));
        }
        for b in &beta_values {
            if !(*b > 0.0 && *b < PI) {
                return Err(Error::BeamwidthDomain(*b));
            }
        }
        Ok(Self {
            phi_values,
            beta_values,
        })
    }

    /// 1 degree orientation steps, beamwidths 10..=90 degrees in 10 degree steps.
    pub fn standard() -> Self {
        let betas: Vec<f64> = (1..=9).map(|i| 10.0 * i as f64).collect();
        Self::from_degrees(1.0, &betas).expect("static grid is valid")
    }

    pub fn single(psi: BeampatternParams) -> Self {
        Self {
            phi_values: vec![psi.phi()],
            beta_values: vec![psi.beta()],
        }
    }

    pub fn len(&self) -> usize {
        self.phi_values.len() * self.beta_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn params(&self, index: usize) -> BeampatternParams {
        let n = self.phi_values.len();
        BeampatternParams::new(self.phi_values[index % n], self.beta_values[index / n])
            .expect("grid values validated at construction")
    }

    pub fn contains(&self, psi: &BeampatternParams) -> bool {
        const TOL: f64 = 1e-9;
        self.phi_values
            .iter()
            .any(|p| crate::geometry::normalize_angle(p - psi.phi()).abs() < TOL)
            && self.beta_values.iter().any(|b| (b - psi.beta()).abs() < TOL)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub positions: PositionGrid,
    pub beampatterns: BeampatternGrid,
}

/// Sampled cost over a grid. Nodes that cannot be evaluated (receiver
/// coincident) hold NaN and are ignored by every reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSurface {
    pub columns: usize,
    pub rows: usize,
    pub values: Vec<f64>,
    pub argmax: usize,
    pub cell_area: f64,
}

impl CostSurface {
    pub fn new(columns: usize, rows: usize, values: Vec<f64>, cell_area: f64) -> Result<Self> {
        if values.len() != columns * rows {
            return Err(Error::Config(format!(
                "surface shape {columns}x{rows} does not match {} values",
                values.len()
            )));
        }
        let argmax = argmax_lowest_index(&values).ok_or(Error::Empty("cost surface"))?;
        Ok(Self {
            columns,
            rows,
            values,
            argmax,
            cell_area,
        })
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax]
    }

    pub fn min(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| !v.is_nan()).count()
    }
}

/// First index attaining the maximum, skipping NaN.
pub fn argmax_lowest_index(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if *v <= b => {}
            _ => best = Some((i, *v)),
        }
    }
    best.map(|(i, _)| i)
}
