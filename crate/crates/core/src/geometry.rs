//! Positions, dipole orientations and complex field vectors.
//!
//! Lengths are in nanometers throughout the crate.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex 3-vector, used for mode and QNM field samples.
pub type CVec3 = [Complex64; 3];

pub const ZERO_CVEC3: CVec3 = [Complex64::new(0.0, 0.0); 3];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const ORIGIN: Position = Position {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "position ({x}, {y}, {z}) has a non-finite component"
            )));
        }
        Ok(Position { x, y, z })
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (*self - *other).norm()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, u: &Orientation) -> f64 {
        self.x * u.ux + self.y * u.uy + self.z * u.uz
    }

    pub fn midpoint(&self, other: &Position) -> Position {
        Position {
            x: 0.5 * (self.x + other.x),
            y: 0.5 * (self.y + other.y),
            z: 0.5 * (self.z + other.z),
        }
    }

    pub(crate) fn component(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl Add for Position {
    type Output = Position;
    fn add(self, rhs: Position) -> Position {
        Position {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            z: self.z + rhs.z,
        }
    }
}

impl Sub for Position {
    type Output = Position;
    fn sub(self, rhs: Position) -> Position {
        Position {
            x: self.x - rhs.x,
            y: self.y - rhs.y,
            z: self.z - rhs.z,
        }
    }
}

impl Mul<f64> for Orientation {
    type Output = Position;
    /// Displacement of length `s` along this orientation.
    fn mul(self, s: f64) -> Position {
        Position {
            x: self.ux * s,
            y: self.uy * s,
            z: self.uz * s,
        }
    }
}

/// Unit vector giving a transition-dipole orientation or a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    ux: f64,
    uy: f64,
    uz: f64,
}

impl Orientation {
    pub const X: Orientation = Orientation {
        ux: 1.0,
        uy: 0.0,
        uz: 0.0,
    };
    pub const Y: Orientation = Orientation {
        ux: 0.0,
        uy: 1.0,
        uz: 0.0,
    };
    pub const Z: Orientation = Orientation {
        ux: 0.0,
        uy: 0.0,
        uz: 1.0,
    };

    /// Normalizes `(ux, uy, uz)`; fails for zero or non-finite input.
    pub fn new(ux: f64, uy: f64, uz: f64) -> Result<Self> {
        let norm = (ux * ux + uy * uy + uz * uz).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "orientation ({ux}, {uy}, {uz}) cannot be normalized"
            )));
        }
        Ok(Orientation {
            ux: ux / norm,
            uy: uy / norm,
            uz: uz / norm,
        })
    }

    pub fn ux(&self) -> f64 {
        self.ux
    }

    pub fn uy(&self) -> f64 {
        self.uy
    }

    pub fn uz(&self) -> f64 {
        self.uz
    }

    pub fn components(&self) -> [f64; 3] {
        [self.ux, self.uy, self.uz]
    }

    pub fn dot(&self, other: &Orientation) -> f64 {
        self.ux * other.ux + self.uy * other.uy + self.uz * other.uz
    }

    /// `û · e` for a complex field vector (no conjugation).
    pub fn project(&self, e: &CVec3) -> Complex64 {
        e[0] * self.ux + e[1] * self.uy + e[2] * self.uz
    }

    pub fn scale(&self, amplitude: Complex64) -> CVec3 {
        [
            amplitude * self.ux,
            amplitude * self.uy,
            amplitude * self.uz,
        ]
    }
}

/// A position together with a dipole orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedPoint {
    pub position: Position,
    pub orientation: Orientation,
}

impl PolarizedPoint {
    pub fn new(position: Position, orientation: Orientation) -> Self {
        PolarizedPoint {
            position,
            orientation,
        }
    }

    /// Projection of a field model onto this dipole.
    pub fn project(&self, e: &CVec3) -> Complex64 {
        self.orientation.project(e)
    }
}
