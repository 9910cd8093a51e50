use serde::{Deserialize, Serialize};

use super::Position;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Length runs along the x axis.
    Horizontal,
    /// Length runs along the y axis.
    Vertical,
}

/// Axis-aligned rectangular obstacle with a safety margin.
///
/// Collision checks use the enlarged rectangle, as a closed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Position,
    pub length: f64,
    pub width: f64,
    pub orientation: Orientation,
    pub enlarged_length: f64,
    pub enlarged_width: f64,
}

impl Obstacle {
    /// Half extents `(x, y)` of the enlarged rectangle.
    pub fn half_extents(&self) -> (f64, f64) {
        self.extents(self.enlarged_length, self.enlarged_width)
    }

    /// Half extents of the physical (not enlarged) rectangle.
    pub fn nominal_half_extents(&self) -> (f64, f64) {
        self.extents(self.length, self.width)
    }

    fn extents(&self, length: f64, width: f64) -> (f64, f64) {
        match self.orientation {
            Orientation::Horizontal => (0.5 * length, 0.5 * width),
            Orientation::Vertical => (0.5 * width, 0.5 * length),
        }
    }

    pub fn contains(&self, p: Position) -> bool {
        let (hx, hy) = self.half_extents();
        (p.x - self.center.x).abs() <= hx && (p.y - self.center.y).abs() <= hy
    }

    /// Whether the enlarged rectangle meets the box `[lo, hi]`.
    pub fn intersects_box(&self, lo: Position, hi: Position) -> bool {
        let (hx, hy) = self.half_extents();
        self.center.x - hx <= hi.x
            && self.center.x + hx >= lo.x
            && self.center.y - hy <= hi.y
            && self.center.y + hy >= lo.y
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.width > 0.0) {
            return Err(Error::config("obstacle dimensions must be positive"));
        }
        if self.enlarged_length < self.length || self.enlarged_width < self.width {
            return Err(Error::config("enlarged obstacle dimensions must not be smaller than nominal"));
        }
        Ok(())
    }
}
