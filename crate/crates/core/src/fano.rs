//! Fano lineshapes and the decomposition of two-QNM spectra into them.
//!
//! A single QNM term of the CDOS between points 1 and 2 is
//! `(1/π) Im[P/(ω̃ − k)]` with `P = (û₁·Ẽ(r₁))(û₂·Ẽ(r₂)) = |P| e^{iΦ}`,
//! `Φ = φ₁ + φ₂`. Writing `q = tan(Φ/2)` gives `(q²−1)/(q²+1) = −cos Φ` and
//! `2q/(q²+1) = sin Φ`, so the term equals `K·F(k_m, γ, q, k)` exactly with
//! `K = −2|P|/(πγ)`. For a single point this is `q = tan φ`.
//!
//! The arithmetic-mean convention `q₁₂ = (tan φ₁ + tan φ₂)/2` coincides
//! with the half-angle one only when `φ₁ = φ₂`; [`compare_q_conventions`]
//! reports how far it is off otherwise.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::PolarizedPoint;
use crate::qnm::{Qnm, QnmPair};
use crate::spectral::Wavenumber;

/// Tangents closer than this to a pole are treated as infinite.
pub const INFINITE_Q_COS: f64 = 1e-12;

/// Projected fields below this magnitude have no defined phase.
pub const PHASE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FanoQ {
    Finite(f64),
    /// `|q| → ∞`: the profile reduces to a unit-peak Lorentzian.
    Infinite,
}

impl FanoQ {
    /// `tan(angle)`, or `Infinite` near the poles.
    pub fn from_angle(angle: f64) -> Self {
        if angle.cos().abs() < INFINITE_Q_COS {
            FanoQ::Infinite
        } else {
            FanoQ::Finite(angle.tan())
        }
    }

    pub fn profile(&self, k_m: f64, gamma: f64, k: f64) -> f64 {
        match *self {
            FanoQ::Finite(q) => fano_profile(k_m, gamma, q, k),
            FanoQ::Infinite => lorentzian_peak(k_m, gamma, k),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            FanoQ::Finite(q) => Some(q),
            FanoQ::Infinite => None,
        }
    }
}

impl fmt::Display for FanoQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanoQ::Finite(q) => write!(f, "{q:.6}"),
            FanoQ::Infinite => f.write_str("inf"),
        }
    }
}

/// `(γ/2)/(q²+1) · [(q²−1)γ/2 + 2q(k−k_m)] / ((k−k_m)² + γ²/4)`.
///
/// A non-finite `q` evaluates the `|q| → ∞` limit.
pub fn fano_profile(k_m: f64, gamma: f64, q: f64, k: f64) -> f64 {
    debug_assert!(gamma > 0.0);
    if !q.is_finite() {
        return lorentzian_peak(k_m, gamma, k);
    }
    let dk = k - k_m;
    let hg = 0.5 * gamma;
    let q2 = q * q;
    hg / (q2 + 1.0) * ((q2 - 1.0) * hg + 2.0 * q * dk) / (dk * dk + hg * hg)
}

/// `(γ²/4) / ((k−k_m)² + γ²/4)`.
pub fn lorentzian_peak(k_m: f64, gamma: f64, k: f64) -> f64 {
    let dk = k - k_m;
    let hg2 = 0.25 * gamma * gamma;
    hg2 / (dk * dk + hg2)
}

/// `arg(û·Ẽ(r))` in `(−π, π]`.
pub fn qnm_phase(qnm: &Qnm, p: &PolarizedPoint) -> Result<f64> {
    let e = qnm.projected(p)?;
    let magnitude = e.norm();
    if magnitude < PHASE_FLOOR {
        return Err(Error::UndefinedPhase { magnitude });
    }
    let phase = e.arg();
    // atan2 can return −π for a negative real part with a −0.0 imaginary part
    Ok(if phase == -PI { PI } else { phase })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoQParams {
    pub q1: FanoQ,
    pub q2: FanoQ,
    /// `(tan φ₁ + tan φ₂)/2`
    pub q12_mean: FanoQ,
    /// `tan((φ₁ + φ₂)/2)`
    pub q12_half_angle: FanoQ,
}

pub fn fano_q_params(phi1: f64, phi2: f64) -> FanoQParams {
    let q1 = FanoQ::from_angle(phi1);
    let q2 = FanoQ::from_angle(phi2);
    let q12_mean = match (q1, q2) {
        (FanoQ::Finite(a), FanoQ::Finite(b)) => FanoQ::Finite(0.5 * (a + b)),
        _ => FanoQ::Infinite,
    };
    FanoQParams {
        q1,
        q2,
        q12_mean,
        q12_half_angle: FanoQ::from_angle(0.5 * (phi1 + phi2)),
    }
}

/// One resonance's contribution `coefficient · F(k_m, γ, q, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoTerm {
    /// Index of the QNM in its pair (0 for `a`, 1 for `b`).
    pub mode: usize,
    pub k_m: f64,
    pub gamma: f64,
    pub phase_a: f64,
    pub phase_b: f64,
    pub q: FanoQ,
    pub coefficient: f64,
}

impl FanoTerm {
    pub fn evaluate(&self, k: f64) -> f64 {
        self.coefficient * self.q.profile(self.k_m, self.gamma, k)
    }

    /// Same term with the arithmetic-mean `q₁₂` in place of the half-angle one.
    pub fn evaluate_mean_q(&self, k: f64) -> f64 {
        let q = fano_q_params(self.phase_a, self.phase_b).q12_mean;
        self.coefficient * q.profile(self.k_m, self.gamma, k)
    }

    pub fn label(&self) -> char {
        (b'a' + self.mode as u8) as char
    }
}

/// Splits `cdos_qnm(pair, a, b, ·)` into one Fano term per QNM.
///
/// Modes whose field vanishes at either point contribute nothing and are
/// left out.
pub fn fano_decompose_cdos(
    pair: &QnmPair,
    a: &PolarizedPoint,
    b: &PolarizedPoint,
) -> Result<Vec<FanoTerm>> {
    let mut terms = Vec::with_capacity(2);
    let mut weakest = f64::INFINITY;
    for (mode, qnm) in pair.modes().iter().enumerate() {
        let ea = qnm.projected(a)?;
        let eb = qnm.projected(b)?;
        let weaker = ea.norm().min(eb.norm());
        if weaker < PHASE_FLOOR {
            weakest = weakest.min(weaker);
            continue;
        }
        let phase_a = qnm_phase(qnm, a)?;
        let phase_b = qnm_phase(qnm, b)?;
        let gamma = qnm.damping();
        terms.push(FanoTerm {
            mode,
            k_m: qnm.resonance().get(),
            gamma,
            phase_a,
            phase_b,
            q: FanoQ::from_angle(0.5 * (phase_a + phase_b)),
            coefficient: -2.0 * ea.norm() * eb.norm() / (PI * gamma),
        });
    }
    if terms.is_empty() {
        return Err(Error::UndefinedPhase { magnitude: weakest });
    }
    Ok(terms)
}

pub fn reconstruct(terms: &[FanoTerm], k: Wavenumber) -> f64 {
    terms.iter().map(|t| t.evaluate(k.get())).sum()
}

/// Half-angle vs arithmetic-mean `q₁₂` against the direct two-QNM CDOS.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoComparison {
    pub terms: Vec<FanoTerm>,
    /// Largest `|reconstruction − direct|` over the grid, relative to `max |direct|`.
    pub half_angle_deviation: f64,
    pub mean_q_deviation: f64,
    /// Every retained mode has identical phases at the two points.
    pub phases_equal: bool,
}

impl fmt::Display for FanoComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            let p = fano_q_params(t.phase_a, t.phase_b);
            writeln!(
                f,
                "mode {}: phi_a={:+.6} phi_b={:+.6} q_half={} q_mean={} K={:.6e}",
                t.label(),
                t.phase_a,
                t.phase_b,
                p.q12_half_angle,
                p.q12_mean,
                t.coefficient
            )?;
        }
        write!(
            f,
            "half-angle max rel. deviation {:.3e}; arithmetic-mean max rel. deviation {:.3e}; equal phases: {}",
            self.half_angle_deviation, self.mean_q_deviation, self.phases_equal
        )
    }
}

pub fn compare_q_conventions(
    pair: &QnmPair,
    a: &PolarizedPoint,
    b: &PolarizedPoint,
    k_grid: &[Wavenumber],
) -> Result<FanoComparison> {
    let terms = fano_decompose_cdos(pair, a, b)?;
    let direct = k_grid
        .iter()
        .map(|&k| pair.cdos(a, b, k))
        .collect::<Result<Vec<_>>>()?;
    let scale = direct.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let deviation = |eval: &dyn Fn(&FanoTerm, f64) -> f64| {
        k_grid
            .iter()
            .zip(&direct)
            .map(|(k, d)| {
                let r: f64 = terms.iter().map(|t| eval(t, k.get())).sum();
                (r - d).abs()
            })
            .fold(0.0_f64, f64::max)
            / scale
    };
    let half_angle_deviation = deviation(&|t, k| t.evaluate(k));
    let mean_q_deviation = deviation(&|t, k| t.evaluate_mean_q(k));
    let phases_equal = terms.iter().all(|t| t.phase_a == t.phase_b);
    Ok(FanoComparison {
        terms,
        half_angle_deviation,
        mean_q_deviation,
        phases_equal,
    })
}
