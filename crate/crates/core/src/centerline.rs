//! Centerline of a single connected region.
//!
//! Distance map, then a unit-cost wave from the deepest voxel to find one
//! end of the region, then a second wave from that end whose cost is
//! `(d_max / d)^exponent` so it races along the middle. The voxel reached
//! last by the second wave is the other end; descending the second wave's
//! arrival times from there yields the centerline.

use crate::distance::euclidean_distance_map;
use crate::eikonal::{argmax_field, descend, fast_march, ArrivalField, Path};
use crate::error::{Error, Result};
use crate::grid::{connected_components, BinaryMask, Connectivity, ScalarField};

pub const DEFAULT_EXPONENT: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterlineConfig {
    /// Power applied to the normalized distance map in the second wave.
    pub exponent: f64,
}

impl Default for CenterlineConfig {
    fn default() -> Self {
        Self {
            exponent: DEFAULT_EXPONENT,
        }
    }
}

/// Centerline together with the intermediate fields that produced it.
#[derive(Debug, Clone)]
pub struct Centerline {
    /// Runs from the far end (last reached by the second wave) to the
    /// second wave's source.
    pub path: Path,
    pub distance: ScalarField,
    pub first_wave: ArrivalField,
    pub second_wave: ArrivalField,
}

pub fn extract_centerline(mask: &BinaryMask) -> Result<(Path, ArrivalField)> {
    let c = extract_centerline_with(mask, &CenterlineConfig::default())?;
    Ok((c.path, c.second_wave))
}

pub fn extract_centerline_with(mask: &BinaryMask, config: &CenterlineConfig) -> Result<Centerline> {
    if !(config.exponent.is_finite() && config.exponent >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exponent must be finite and non-negative, got {}",
            config.exponent
        )));
    }
    if mask.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let (_, components) = connected_components(mask, Connectivity::Four);
    if components != 1 {
        return Err(Error::NotConnected { components });
    }

    let distance = euclidean_distance_map(mask)?;
    let deepest = argmax_field(&distance)?;
    let d_max = distance.get(deepest);

    let unit = ScalarField::filled(mask.dims(), 1.0);
    let first_wave = fast_march(&unit, mask, deepest)?;
    let end_a = argmax_field(first_wave.field())?;

    let exponent = config.exponent;
    let cost = distance.map(|d| {
        if d > 0.0 {
            (d_max / d).powf(exponent)
        } else {
            1.0
        }
    });
    let second_wave = fast_march(&cost, mask, end_a)?;
    let end_b = argmax_field(second_wave.field())?;
    let path = descend(&second_wave, end_b)?;

    Ok(Centerline {
        path,
        distance,
        first_wave,
        second_wave,
    })
}
