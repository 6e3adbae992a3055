use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// The two equatorial measurement settings shared by every party.
///
/// Setting `j` measures `cos(alpha_j) Z + sin(alpha_j) X`. Angles are stored
/// wrapped into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPair {
    pub alpha0: f64,
    pub alpha1: f64,
}

impl MeasurementPair {
    pub fn new(alpha0: f64, alpha1: f64) -> Result<Self> {
        if !alpha0.is_finite() || !alpha1.is_finite() {
            return Err(Error::domain(format!(
                "measurement angles must be finite, got ({alpha0}, {alpha1})"
            )));
        }
        Ok(MeasurementPair {
            alpha0: wrap_angle(alpha0),
            alpha1: wrap_angle(alpha1),
        })
    }

    /// Builds the pair from the projector half-angles: the `+1` outcome of
    /// setting `j` projects onto `cos(theta_j)|0> + sin(theta_j)|1>`.
    pub fn from_half_angles(theta0: f64, theta1: f64) -> Result<Self> {
        Self::new(2.0 * theta0, 2.0 * theta1)
    }

    /// Projector half-angles `(alpha0 / 2, alpha1 / 2)`.
    pub fn half_angles(&self) -> (f64, f64) {
        (0.5 * self.alpha0, 0.5 * self.alpha1)
    }

    pub fn get(&self, setting: usize) -> f64 {
        match setting {
            0 => self.alpha0,
            _ => self.alpha1,
        }
    }
}

impl fmt::Display for MeasurementPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(alpha0 = {:.12}, alpha1 = {:.12})",
            self.alpha0, self.alpha1
        )
    }
}
