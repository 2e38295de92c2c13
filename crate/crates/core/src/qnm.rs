//! Two-QNM Green's function for coupled cavities.
//!
//! ```text
//! û_a·G(r_a, r_b)·û_b ≈ (1/2k) Σ_m (û_a·Ẽ_m(r_a)) (û_b·Ẽ_m(r_b)) / (ω̃_m − k)
//! ω̃_m = k_m − iγ_m/2
//! ```
//!
//! Unlike the lossy-mode expansion this is not restricted to high Q, and
//! complex QNM fields turn each resonance into a Fano lineshape (see
//! [`crate::fano`]). Fields are used as supplied; no normalization
//! integral is evaluated.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::VectorFieldModel;
use crate::geometry::PolarizedPoint;
use crate::spectral::Wavenumber;

#[derive(Debug, Clone, PartialEq)]
pub struct Qnm {
    field: VectorFieldModel,
    k_m: Wavenumber,
    gamma: f64,
}

impl Qnm {
    pub fn new(field: VectorFieldModel, k_m: Wavenumber, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "QNM damping rate must be positive and finite, got {gamma}"
            )));
        }
        Ok(Qnm { field, k_m, gamma })
    }

    /// From a complex eigenfrequency `ω̃` (in wavenumber units) with `Im ω̃ < 0`.
    pub fn from_complex_frequency(field: VectorFieldModel, omega: Complex64) -> Result<Self> {
        Qnm::new(field, Wavenumber::new(omega.re)?, -2.0 * omega.im)
    }

    pub fn field(&self) -> &VectorFieldModel {
        &self.field
    }

    pub fn resonance(&self) -> Wavenumber {
        self.k_m
    }

    pub fn damping(&self) -> f64 {
        self.gamma
    }

    pub fn quality(&self) -> f64 {
        self.k_m.get() / self.gamma
    }

    pub fn complex_frequency(&self) -> Complex64 {
        Complex64::new(self.k_m.get(), -0.5 * self.gamma)
    }

    pub fn projected(&self, p: &PolarizedPoint) -> Result<Complex64> {
        Ok(p.project(&self.field.field_at(p.position)?))
    }
}

#[inline]
pub(crate) fn qnm_green_term(
    k_m: f64,
    gamma: f64,
    ea: Complex64,
    eb: Complex64,
    k: f64,
) -> Complex64 {
    let pole = Complex64::new(k_m - k, -0.5 * gamma);
    ea * eb / pole / (2.0 * k)
}

#[inline]
pub(crate) fn qnm_cdos_term(k_m: f64, gamma: f64, ea: Complex64, eb: Complex64, k: f64) -> f64 {
    2.0 * k / PI * qnm_green_term(k_m, gamma, ea, eb, k).im
}

#[derive(Debug, Clone, PartialEq)]
pub struct QnmPair {
    modes: [Qnm; 2],
}

impl QnmPair {
    pub fn new(a: Qnm, b: Qnm) -> Self {
        QnmPair { modes: [a, b] }
    }

    pub fn modes(&self) -> &[Qnm; 2] {
        &self.modes
    }

    pub fn green_projected(
        &self,
        a: &PolarizedPoint,
        b: &PolarizedPoint,
        k: Wavenumber,
    ) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            total += qnm_green_term(
                m.k_m.get(),
                m.gamma,
                m.projected(a)?,
                m.projected(b)?,
                k.get(),
            );
        }
        Ok(total)
    }

    pub fn cdos(&self, a: &PolarizedPoint, b: &PolarizedPoint, k: Wavenumber) -> Result<f64> {
        let mut total = 0.0;
        for m in &self.modes {
            total += qnm_cdos_term(
                m.k_m.get(),
                m.gamma,
                m.projected(a)?,
                m.projected(b)?,
                k.get(),
            );
        }
        Ok(total)
    }
}

pub fn green_qnm_projected(
    pair: &QnmPair,
    a: &PolarizedPoint,
    b: &PolarizedPoint,
    k: Wavenumber,
) -> Result<Complex64> {
    pair.green_projected(a, b, k)
}

pub fn cdos_qnm(
    pair: &QnmPair,
    a: &PolarizedPoint,
    b: &PolarizedPoint,
    k: Wavenumber,
) -> Result<f64> {
    pair.cdos(a, b, k)
}
