//! Normalized decay rates of extended sources.
//!
//! For weights `w_i` on polarized points `P_i`,
//!
//! ```text
//! Γ/Γ₀ = Σ_ij w_i* w_j ρ_env(P_i, P_j, k) / Σ_ij w_i* w_j ρ_ref(P_i, P_j, k)
//! ```
//!
//! Both double sums run over the symmetric real CDOS kernel in a fixed
//! sequential order (upper triangle, doubled), so a given input always
//! yields the same bits whether sweeps run serially or on many threads.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::VectorFieldModel;
use crate::freespace::HomogeneousGreens;
use crate::geometry::{Orientation, PolarizedPoint, Position};
use crate::modal::{lossy_term, ModeSet};
use crate::qnm::{qnm_cdos_term, QnmPair};
use crate::sources::{line_source, ElementCount, ExtendedSource};
use crate::spectral::{check_ascending, Spectrum, Wavenumber};

/// Smallest accepted magnitude of the reference double sum.
pub const MIN_DENOMINATOR: f64 = 1e-300;

/// An electromagnetic environment, as seen through its CDOS.
///
/// Structured models (`Modal`, `Qnm`) hold only their resonant part; wrap
/// them with [`GreensModel::with_background`] to add the radiative LDOS of
/// a homogeneous host, without which the LDOS vanishes off resonance.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum GreensModel {
    Homogeneous(HomogeneousGreens),
    Modal(ModeSet),
    Qnm(QnmPair),
    Background {
        background: HomogeneousGreens,
        structured: Box<GreensModel>,
    },
}

impl GreensModel {
    pub fn homogeneous(n: f64) -> Result<Self> {
        Ok(GreensModel::Homogeneous(HomogeneousGreens::new(n)?))
    }

    pub fn vacuum() -> Self {
        GreensModel::Homogeneous(HomogeneousGreens::VACUUM)
    }

    pub fn with_background(background: HomogeneousGreens, structured: GreensModel) -> Self {
        GreensModel::Background {
            background,
            structured: Box::new(structured),
        }
    }

    pub fn cdos(&self, a: &PolarizedPoint, b: &PolarizedPoint, k: Wavenumber) -> Result<f64> {
        match self {
            GreensModel::Homogeneous(h) => Ok(h.cdos(a, b, k)),
            GreensModel::Modal(ms) => ms.cdos(a, b, k),
            GreensModel::Qnm(pair) => pair.cdos(a, b, k),
            GreensModel::Background {
                background,
                structured,
            } => Ok(background.cdos(a, b, k) + structured.cdos(a, b, k)?),
        }
    }

    /// Evaluates every mode field at `points` once, for repeated CDOS queries.
    pub fn bind(&self, points: &[PolarizedPoint]) -> Result<BoundKernel> {
        Ok(BoundKernel {
            points: points.to_vec(),
            term: self.bind_term(points)?,
        })
    }

    fn bind_term(&self, points: &[PolarizedPoint]) -> Result<BoundTerm> {
        let project = |field: &VectorFieldModel| -> Result<Vec<Complex64>> {
            points
                .iter()
                .map(|p| Ok(p.project(&field.field_at(p.position)?)))
                .collect()
        };
        Ok(match self {
            GreensModel::Homogeneous(h) => BoundTerm::Homogeneous(*h),
            GreensModel::Modal(ms) => BoundTerm::Lossy(
                ms.modes()
                    .iter()
                    .map(|m| {
                        Ok(BoundMode {
                            k_m: m.resonance().get(),
                            gamma: m.damping(),
                            projected: project(m.field())?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            GreensModel::Qnm(pair) => BoundTerm::Qnm(
                pair.modes()
                    .iter()
                    .map(|m| {
                        Ok(BoundMode {
                            k_m: m.resonance().get(),
                            gamma: m.damping(),
                            projected: project(m.field())?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            GreensModel::Background {
                background,
                structured,
            } => BoundTerm::Background(*background, Box::new(structured.bind_term(points)?)),
        })
    }

    /// `(field, k_m, γ)` for every mode in the model.
    fn modes(&self) -> Vec<(&VectorFieldModel, f64, f64)> {
        match self {
            GreensModel::Homogeneous(_) => Vec::new(),
            GreensModel::Modal(ms) => ms
                .modes()
                .iter()
                .map(|m| (m.field(), m.resonance().get(), m.damping()))
                .collect(),
            GreensModel::Qnm(pair) => pair
                .modes()
                .iter()
                .map(|m| (m.field(), m.resonance().get(), m.damping()))
                .collect(),
            GreensModel::Background { structured, .. } => structured.modes(),
        }
    }
}

#[derive(Debug, Clone)]
struct BoundMode {
    k_m: f64,
    gamma: f64,
    projected: Vec<Complex64>,
}

#[derive(Debug, Clone)]
enum BoundTerm {
    Homogeneous(HomogeneousGreens),
    Lossy(Vec<BoundMode>),
    Qnm(Vec<BoundMode>),
    Background(HomogeneousGreens, Box<BoundTerm>),
}

/// A [`GreensModel`] with its mode fields evaluated on a fixed point list.
#[derive(Debug, Clone)]
pub struct BoundKernel {
    points: Vec<PolarizedPoint>,
    term: BoundTerm,
}

impl BoundKernel {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CDOS between bound points `i` and `j`; identical to [`GreensModel::cdos`].
    pub fn cdos(&self, i: usize, j: usize, k: Wavenumber) -> f64 {
        self.term_cdos(&self.term, i, j, k)
    }

    fn term_cdos(&self, term: &BoundTerm, i: usize, j: usize, k: Wavenumber) -> f64 {
        match term {
            BoundTerm::Homogeneous(h) => h.cdos(&self.points[i], &self.points[j], k),
            BoundTerm::Lossy(modes) => {
                let mut total = 0.0;
                for m in modes {
                    total += lossy_term(m.k_m, m.gamma, m.projected[i], m.projected[j], k.get());
                }
                total
            }
            BoundTerm::Qnm(modes) => {
                let mut total = 0.0;
                for m in modes {
                    total += qnm_cdos_term(m.k_m, m.gamma, m.projected[i], m.projected[j], k.get());
                }
                total
            }
            BoundTerm::Background(h, rest) => {
                h.cdos(&self.points[i], &self.points[j], k) + self.term_cdos(rest, i, j, k)
            }
        }
    }

    /// `Σ_ij w_i* w_j ρ_ij`, summed over the upper triangle in index order.
    pub fn hermitian_sum(&self, weights: &[Complex64], k: Wavenumber) -> f64 {
        debug_assert_eq!(weights.len(), self.len());
        let mut acc = 0.0;
        for i in 0..weights.len() {
            acc += weights[i].norm_sqr() * self.cdos(i, i, k);
            for j in i + 1..weights.len() {
                let cross = (weights[i].conj() * weights[j]).re;
                acc += 2.0 * cross * self.cdos(i, j, k);
            }
        }
        acc
    }

    /// `Σ_i |w_i|² ρ_ii`
    pub fn diagonal_sum(&self, weights: &[Complex64], k: Wavenumber) -> f64 {
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w.norm_sqr() * self.cdos(i, i, k);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Γ/Γ₀
    pub gamma_ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub k: Wavenumber,
}

/// A source bound to an environment and a reference environment.
#[derive(Debug, Clone)]
pub struct PreparedSource {
    weights: Vec<Complex64>,
    env: BoundKernel,
    reference: BoundKernel,
}

impl PreparedSource {
    pub fn new(src: &ExtendedSource, env: &GreensModel, ref_env: &GreensModel) -> Result<Self> {
        let points = src.points();
        Ok(PreparedSource {
            weights: src.weights(),
            env: env.bind(&points)?,
            reference: ref_env.bind(&points)?,
        })
    }

    pub fn rate(&self, k: Wavenumber) -> Result<RateResult> {
        let numerator = self.env.hermitian_sum(&self.weights, k);
        let denominator = self.reference.hermitian_sum(&self.weights, k);
        if !(denominator > 0.0 && denominator.abs() >= MIN_DENOMINATOR) {
            return Err(Error::DegenerateReference { denominator });
        }
        Ok(RateResult {
            gamma_ratio: numerator / denominator,
            numerator,
            denominator,
            k,
        })
    }
}

pub fn decay_rate(
    src: &ExtendedSource,
    env: &GreensModel,
    ref_env: &GreensModel,
    k: Wavenumber,
) -> Result<RateResult> {
    PreparedSource::new(src, env, ref_env)?.rate(k)
}

/// `(p²/2)[ρ_aa + ρ_bb + 2ρ_ab cos φ]`, the coherent double sum of
/// [`crate::sources::pair_source`] written out.
pub fn two_dipole_rate(
    a: &PolarizedPoint,
    b: &PolarizedPoint,
    amplitude: f64,
    phase: f64,
    env: &GreensModel,
    k: Wavenumber,
) -> Result<f64> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pair amplitude must be positive, got {amplitude}"
        )));
    }
    let rho_aa = env.cdos(a, a, k)?;
    let rho_bb = env.cdos(b, b, k)?;
    let rho_ab = env.cdos(a, b, k)?;
    Ok(0.5 * amplitude * amplitude * (rho_aa + rho_bb + 2.0 * rho_ab * phase.cos()))
}

/// Coherent over incoherent emission, `β = Σ_ij w_i* w_j ρ_ij / Σ_i |w_i|² ρ_ii`.
///
/// `β > 1` is superradiant, `β < 1` subradiant.
pub fn coherence_classification(
    src: &ExtendedSource,
    env: &GreensModel,
    k: Wavenumber,
) -> Result<f64> {
    let kernel = env.bind(&src.points())?;
    let weights = src.weights();
    let incoherent = kernel.diagonal_sum(&weights, k);
    if incoherent.is_nan() || incoherent.abs() < MIN_DENOMINATOR {
        return Err(Error::DegenerateSource(format!(
            "incoherent (diagonal) sum is {incoherent:e}"
        )));
    }
    Ok(kernel.hermitian_sum(&weights, k) / incoherent)
}

fn collect_indexed<T: Send>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::at_point(i, e)))
        .collect()
}

/// [`decay_rate`] on every grid point. Points are evaluated in parallel
/// on the current rayon pool.
pub fn sweep_spectrum(
    src: &ExtendedSource,
    env: &GreensModel,
    ref_env: &GreensModel,
    k_grid: &[Wavenumber],
) -> Result<Spectrum<RateResult>> {
    check_ascending(k_grid)?;
    let prepared = PreparedSource::new(src, env, ref_env)?;
    let results: Vec<Result<RateResult>> = k_grid.par_iter().map(|&k| prepared.rate(k)).collect();
    Spectrum::new(k_grid.to_vec(), collect_indexed(results)?)
}

/// Geometry of the line sources in a length sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGeometry {
    pub center: Position,
    pub axis: Orientation,
    pub polarization: Orientation,
    pub count: ElementCount,
    pub amplitude: f64,
}

impl LineGeometry {
    pub fn source(&self, length: f64) -> Result<ExtendedSource> {
        line_source(
            self.center,
            self.axis,
            self.polarization,
            length,
            self.count.count_for(length),
            self.amplitude,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthCurve {
    pub lengths: Vec<f64>,
    pub rates: Vec<RateResult>,
    /// Field of the dominant mode at the line's `+axis` end, with the
    /// phase at the center removed; `None` when the environment has no modes.
    pub extremity_field: Vec<Option<f64>>,
}

impl LengthCurve {
    pub fn gamma_ratios(&self) -> Vec<f64> {
        self.rates.iter().map(|r| r.gamma_ratio).collect()
    }
}

/// Field of the mode with the largest LDOS at `center` (at `k`), sampled at
/// `end` and referenced to the phase at `center`.
pub fn dominant_mode_extremity(
    env: &GreensModel,
    center: &PolarizedPoint,
    end: &PolarizedPoint,
    k: Wavenumber,
) -> Result<Option<f64>> {
    let mut best: Option<(f64, Complex64, &VectorFieldModel)> = None;
    for (field, k_m, gamma) in env.modes() {
        let ec = center.project(&field.field_at(center.position)?);
        let weight = lossy_term(k_m, gamma, ec, ec, k.get());
        if best.as_ref().is_none_or(|(w, _, _)| weight > *w) {
            best = Some((weight, ec, field));
        }
    }
    let Some((_, ec, field)) = best else {
        return Ok(None);
    };
    let ee = end.project(&field.field_at(end.position)?);
    let norm = ec.norm();
    Ok(Some(if norm > 0.0 {
        (ee * ec.conj()).re / norm
    } else {
        ee.re
    }))
}

/// Decay rate of centered line sources versus their length at fixed `k`.
pub fn sweep_length(
    geometry: &LineGeometry,
    lengths: &[f64],
    env: &GreensModel,
    ref_env: &GreensModel,
    k: Wavenumber,
) -> Result<LengthCurve> {
    if let Some(i) = lengths.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "length at index {i} is not a non-negative number"
        )));
    }
    if let Some(i) = lengths.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "length grid is not strictly ascending at index {}",
            i + 1
        )));
    }
    let center = PolarizedPoint::new(geometry.center, geometry.polarization);
    let results: Vec<Result<(RateResult, Option<f64>)>> = lengths
        .par_iter()
        .map(|&d| {
            let src = geometry.source(d)?;
            let rate = decay_rate(&src, env, ref_env, k)?;
            let end = PolarizedPoint::new(
                geometry.center + geometry.axis * (0.5 * d),
                geometry.polarization,
            );
            Ok((rate, dominant_mode_extremity(env, &center, &end, k)?))
        })
        .collect();
    let (rates, extremity_field) = collect_indexed(results)?.into_iter().unzip();
    Ok(LengthCurve {
        lengths: lengths.to_vec(),
        rates,
        extremity_field,
    })
}
