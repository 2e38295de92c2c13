//! Green's model built from a discrete set of lossy eigenmodes.
//!
//! Each mode contributes a Lorentzian to the CDOS,
//!
//! ```text
//! ρ_ab(k) = Σ_m (γ_m/2π) Re[(û_a·e_m(r_a)) (û_b·e_m*(r_b))] / ((k − k_m)² + γ_m²/4)
//! ```
//!
//! which is the high-Q limit of a quasinormal-mode expansion.
//!
//! Mode fields carry whatever normalization the caller chose. Ratios of
//! rates computed with a single mode do not depend on it; for several
//! modes the relative amplitudes must be consistent, and adding a
//! radiative background makes the absolute scale matter too.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{AnalyticSurrogateParams, VectorFieldModel};
use crate::geometry::PolarizedPoint;
use crate::spectral::Wavenumber;

/// Modes with `γ > k_m / LOW_Q_RATIO` are flagged as outside the high-Q regime.
pub const LOW_Q_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LossyMode {
    field: VectorFieldModel,
    k_m: Wavenumber,
    gamma: f64,
}

impl LossyMode {
    pub fn new(field: VectorFieldModel, k_m: Wavenumber, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mode damping rate must be positive and finite, got {gamma}"
            )));
        }
        Ok(LossyMode { field, k_m, gamma })
    }

    /// Mode with damping `k_m / quality`.
    pub fn with_quality(field: VectorFieldModel, k_m: Wavenumber, quality: f64) -> Result<Self> {
        if !(quality.is_finite() && quality > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quality factor must be positive, got {quality}"
            )));
        }
        LossyMode::new(field, k_m, k_m.get() / quality)
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

    pub fn is_low_q(&self) -> bool {
        self.gamma > self.k_m.get() / LOW_Q_RATIO
    }

    pub fn projected(&self, p: &PolarizedPoint) -> Result<Complex64> {
        Ok(p.project(&self.field.field_at(p.position)?))
    }
}

/// One mode's CDOS term from the projected fields at the two points.
#[inline]
pub(crate) fn lossy_term(k_m: f64, gamma: f64, ea: Complex64, eb: Complex64, k: f64) -> f64 {
    let dk = k - k_m;
    let overlap = ea.re * eb.re + ea.im * eb.im; // Re[ea · conj(eb)]
    gamma / (2.0 * PI) * overlap / (dk * dk + 0.25 * gamma * gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    modes: Vec<LossyMode>,
}

impl ModeSet {
    pub fn new(modes: Vec<LossyMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument(
                "a mode set needs at least one mode".into(),
            ));
        }
        Ok(ModeSet { modes })
    }

    pub fn single(mode: LossyMode) -> Self {
        ModeSet { modes: vec![mode] }
    }

    pub fn modes(&self) -> &[LossyMode] {
        &self.modes
    }

    pub fn cdos(&self, a: &PolarizedPoint, b: &PolarizedPoint, k: Wavenumber) -> Result<f64> {
        let mut total = 0.0;
        for m in &self.modes {
            let ea = m.projected(a)?;
            let eb = m.projected(b)?;
            total += lossy_term(m.k_m.get(), m.gamma, ea, eb, k.get());
        }
        Ok(total)
    }
}

/// CDOS of a mode set between two polarized points.
pub fn cdos_modal(
    ms: &ModeSet,
    a: &PolarizedPoint,
    b: &PolarizedPoint,
    k: Wavenumber,
) -> Result<f64> {
    ms.cdos(a, b, k)
}

/// Surrogate L3 cavity mode with resonance `k_m` and damping `gamma`.
pub fn surrogate_l3(
    params: AnalyticSurrogateParams,
    k_m: Wavenumber,
    gamma: f64,
) -> Result<LossyMode> {
    LossyMode::new(VectorFieldModel::surrogate(params)?, k_m, gamma)
}

/// The default surrogate: λ_m = 1270 nm, Q = 2000.
pub fn default_surrogate_l3() -> LossyMode {
    let k_m = Wavenumber::from_wavelength(1270.0).expect("positive wavelength");
    surrogate_l3(AnalyticSurrogateParams::default(), k_m, k_m.get() / 2000.0)
        .expect("default parameters are valid")
}
