//! Rate regions: amplification–masking tradeoff slices, double-amplification
//! regions, and their intersection.

pub mod aa;
pub mod am;
pub mod star;

pub use aa::{aa_cloud, aa_region, aa_vector, AaCloud, AaVector, Provenance};
pub use am::{
    am_coordinates, am_curve, am_curve_detailed, am_feasible, list_exponent, ma_curve,
    rm_min_masking, AmCoordinates, TradeoffCurve,
};
pub use star::{slice_to_region, star_region, Orientation, RegionBundle, StarConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-encoder message rates in bits per source symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub rx: f64,
    pub ry: f64,
}

impl RatePair {
    pub fn new(rx: f64, ry: f64) -> Result<Self> {
        if !(rx.is_finite() && ry.is_finite() && rx >= 0.0 && ry >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "rates must be finite and non-negative, got ({rx}, {ry})"
            )));
        }
        Ok(Self { rx, ry })
    }

    /// Swap the two encoders' budgets (used by role-swapped regions).
    pub fn swapped(self) -> Self {
        Self { rx: self.ry, ry: self.rx }
    }
}
