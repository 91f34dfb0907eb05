//! Evaluation metrics: trimmed mean distance error and the
//! contrast-expanded half-power uncertainty of a cost surface.

use crate::error::{Error, Result};
use crate::estimators::CostSurface;

/// Number of values dropped from each end: `floor(trim_fraction * n)`.
pub fn trim_count(n: usize, trim_fraction: f64) -> usize {
    (trim_fraction * n as f64).floor() as usize
}

/// Mean after sorting and dropping `floor(trim_fraction * n)` values from
/// each end.
pub fn trimmed_mean_error(errors: &[f64], trim_fraction: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::Empty("error list"));
    }
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::Config(format!(
            "trim fraction must lie in [0, 0.5), got {trim_fraction}"
        )));
    }
    if errors.iter().any(|e| e.is_nan()) {
        return Err(Error::Numerical("NaN distance error".into()));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let drop = trim_count(sorted.len(), trim_fraction);
    let kept = &sorted[drop..sorted.len() - drop];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// Min-max normalized surface values; excluded (NaN) nodes stay NaN.
pub fn normalized(surface: &CostSurface) -> Result<Vec<f64>> {
    let (lo, hi) = (surface.min(), surface.max());
    if !(hi > lo) {
        return Err(Error::DegenerateSurface);
    }
    let span = hi - lo;
    Ok(surface.values.iter().map(|v| (v - lo) / span).collect())
}

/// Nodes whose normalized value exceeds one half.
pub fn half_power_mask(surface: &CostSurface) -> Result<Vec<bool>> {
    Ok(normalized(surface)?.into_iter().map(|q| q > 0.5).collect())
}

/// Area in square meters of the cells above the half-power level.
pub fn half_power_uncertainty(surface: &CostSurface) -> Result<f64> {
    let count = half_power_mask(surface)?.into_iter().filter(|&m| m).count();
    Ok(count as f64 * surface.cell_area)
}

/// Number of 8-connected components of the half-power region.
pub fn half_power_regions(surface: &CostSurface) -> Result<usize> {
    let mask = half_power_mask(surface)?;
    let (cols, rows) = (surface.columns, surface.rows);
    let mut seen = vec![false; mask.len()];
    let mut regions = 0;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        regions += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (cx, cy) = ((i % cols) as isize, (i / cols) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if nx < 0 || ny < 0 || nx >= cols as isize || ny >= rows as isize {
                        continue;
                    }
                    let j = ny as usize * cols + nx as usize;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    Ok(regions)
}
