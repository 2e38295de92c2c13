//! Frequency variable, sampled spectra and the free-space LDOS reference.
//!
//! Frequencies are carried as vacuum wavenumbers `k = 2π/λ` in nm⁻¹ with
//! `c = 1`, so `ω` and `k` are interchangeable.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "wavenumber must be positive and finite, got {k}"
            )));
        }
        Ok(Wavenumber(k))
    }

    pub fn from_wavelength(lambda_nm: f64) -> Result<Self> {
        wavelength_to_k(lambda_nm)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Vacuum wavelength in nm.
    pub fn wavelength(self) -> f64 {
        2.0 * PI / self.0
    }
}

pub fn wavelength_to_k(lambda_nm: f64) -> Result<Wavenumber> {
    if !(lambda_nm.is_finite() && lambda_nm > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "wavelength must be positive and finite, got {lambda_nm}"
        )));
    }
    Ok(Wavenumber(2.0 * PI / lambda_nm))
}

/// Projected LDOS of a homogeneous medium of index `n`: `n k² / (3π²)`.
pub fn free_space_ldos(k: Wavenumber, n: f64) -> Result<f64> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "refractive index must be >= 1, got {n}"
        )));
    }
    let k = k.get();
    Ok(n * k * k / (3.0 * PI * PI))
}

/// Values sampled on a strictly ascending wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    k_values: Vec<Wavenumber>,
    samples: Vec<T>,
}

impl<T> Spectrum<T> {
    pub fn new(k_values: Vec<Wavenumber>, samples: Vec<T>) -> Result<Self> {
        if k_values.len() != samples.len() {
            return Err(Error::DimensionMismatch {
                expected: k_values.len(),
                found: samples.len(),
            });
        }
        check_ascending(&k_values)?;
        Ok(Spectrum { k_values, samples })
    }

    pub fn k_values(&self) -> &[Wavenumber] {
        &self.k_values
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Wavenumber, &T)> {
        self.k_values.iter().copied().zip(self.samples.iter())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Spectrum<U> {
        Spectrum {
            k_values: self.k_values.clone(),
            samples: self.samples.iter().map(f).collect(),
        }
    }
}

pub(crate) fn check_ascending(k_values: &[Wavenumber]) -> Result<()> {
    if let Some(i) = k_values.windows(2).position(|w| w[1].get() <= w[0].get()) {
        return Err(Error::InvalidArgument(format!(
            "grid is not strictly ascending at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// `n` equally spaced wavenumbers spanning `[k_min, k_max]`.
pub fn linear_k_grid(k_min: f64, k_max: f64, n: usize) -> Result<Vec<Wavenumber>> {
    if n < 2 || k_max.partial_cmp(&k_min) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument(format!(
            "need k_max > k_min and at least two points, got [{k_min}, {k_max}] x {n}"
        )));
    }
    let step = (k_max - k_min) / (n - 1) as f64;
    (0..n)
        .map(|i| Wavenumber::new(k_min + step * i as f64))
        .collect()
}
