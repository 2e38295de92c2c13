//! Imaginary part of the dyadic Green's function of a homogeneous medium.
//!
//! For a medium of index `n` the vacuum expression is used with `k → n k`.
//! With `κ = n k`, `R = |r_a − r_b|` and `x = κ R`,
//!
//! ```text
//! Im[û_a·G·û_b] = κ/(4π) · [A(x) (û_a·û_b) + B(x) (û_a·R̂)(û_b·R̂)]
//! A(x) =  sin x/x +   cos x/x² −   sin x/x³
//! B(x) = −sin x/x − 3 cos x/x² + 3 sin x/x³
//! ```
//!
//! Both factors lose all precision to cancellation as `x → 0`, so below
//! [`SERIES_THRESHOLD`] they are summed from their power series instead.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::PolarizedPoint;
use crate::spectral::Wavenumber;

/// Arguments `x = κR` below this value use the power series.
///
/// The direct form of `B` has a relative error of roughly `45 ε / x⁵`, so
/// the switch must sit near `x ≈ 1` for both branches to agree to 1e-10.
pub const SERIES_THRESHOLD: f64 = 1.0;

const SERIES_TERMS: usize = 14;

// A(x) = Σ (−1)ⁿ 4(n+1)² x²ⁿ / (2n+3)!
// B(x) = Σ (−1)ⁿ⁺¹ 4n(n+1) x²ⁿ / (2n+3)!
const fn series_coefficients() -> ([f64; SERIES_TERMS], [f64; SERIES_TERMS]) {
    let mut a = [0.0; SERIES_TERMS];
    let mut b = [0.0; SERIES_TERMS];
    // (2n+3)! starting from 3! = 6
    let mut factorial = 6.0;
    let mut n = 0;
    while n < SERIES_TERMS {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        a[n] = sign * 4.0 * (nf + 1.0) * (nf + 1.0) / factorial;
        b[n] = -sign * 4.0 * nf * (nf + 1.0) / factorial;
        factorial *= (2.0 * nf + 4.0) * (2.0 * nf + 5.0);
        n += 1;
    }
    (a, b)
}

const COEFFS: ([f64; SERIES_TERMS], [f64; SERIES_TERMS]) = series_coefficients();

fn horner(coeffs: &[f64], x2: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x2 + c)
}

/// `(A(x), B(x))` from the power series. Accurate for `x ≲ 2`.
pub fn dyadic_factors_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    (horner(&COEFFS.0, x2), horner(&COEFFS.1, x2))
}

/// `(A(x), B(x))` from the closed form. Inaccurate for small `x`.
pub fn dyadic_factors_direct(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let x2 = x * x;
    let x3 = x2 * x;
    let a = s / x + c / x2 - s / x3;
    let b = -s / x - 3.0 * c / x2 + 3.0 * s / x3;
    (a, b)
}

pub fn dyadic_factors(x: f64) -> (f64, f64) {
    if x < SERIES_THRESHOLD {
        dyadic_factors_series(x)
    } else {
        dyadic_factors_direct(x)
    }
}

/// Homogeneous, lossless medium of refractive index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousGreens {
    n: f64,
}

impl HomogeneousGreens {
    pub const VACUUM: HomogeneousGreens = HomogeneousGreens { n: 1.0 };

    pub fn new(n: f64) -> Result<Self> {
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "refractive index must be >= 1, got {n}"
            )));
        }
        Ok(HomogeneousGreens { n })
    }

    pub fn index(&self) -> f64 {
        self.n
    }

    /// `Im[û_a · G(r_a, r_b) · û_b]`.
    pub fn im_g_projected(&self, a: &PolarizedPoint, b: &PolarizedPoint, k: Wavenumber) -> f64 {
        let kappa = self.n * k.get();
        let prefactor = kappa / (4.0 * PI);
        let uab = a.orientation.dot(&b.orientation);
        let sep = a.position - b.position;
        let r = sep.norm();
        if r == 0.0 {
            return prefactor * (2.0 / 3.0) * uab;
        }
        let (fa, fb) = dyadic_factors(kappa * r);
        let ca = sep.dot(&a.orientation) / r;
        let cb = sep.dot(&b.orientation) / r;
        prefactor * (fa * uab + fb * (ca * cb))
    }

    /// Projected CDOS, `(2k/π) Im[û_a·G·û_b]`; equals the LDOS when `a == b`.
    pub fn cdos(&self, a: &PolarizedPoint, b: &PolarizedPoint, k: Wavenumber) -> f64 {
        2.0 * k.get() / PI * self.im_g_projected(a, b, k)
    }
}
