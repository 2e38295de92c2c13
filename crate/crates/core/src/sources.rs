//! Coherent extended sources as weighted lists of elementary dipoles.
//!
//! An `N`-element cluster carries weights `p/√N`, so `Σ|w|² = p²`
//! regardless of `N`. The reference point labels the source and never
//! enters a rate.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Orientation, PolarizedPoint, Position};
use crate::spectral::Wavenumber;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleElement {
    pub point: PolarizedPoint,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSource {
    elements: Vec<DipoleElement>,
    reference: Position,
}

impl ExtendedSource {
    pub fn new(elements: Vec<DipoleElement>, reference: Position) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument(
                "a source needs at least one element".into(),
            ));
        }
        if elements
            .iter()
            .any(|e| !(e.weight.re.is_finite() && e.weight.im.is_finite()))
        {
            return Err(Error::InvalidArgument(
                "element weights must be finite".into(),
            ));
        }
        if elements.iter().all(|e| e.weight.norm_sqr() == 0.0) {
            return Err(Error::InvalidArgument(
                "all element weights are zero".into(),
            ));
        }
        Ok(ExtendedSource {
            elements,
            reference,
        })
    }

    pub fn elements(&self) -> &[DipoleElement] {
        &self.elements
    }

    pub fn reference(&self) -> Position {
        self.reference
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn points(&self) -> Vec<PolarizedPoint> {
        self.elements.iter().map(|e| e.point).collect()
    }

    pub fn weights(&self) -> Vec<Complex64> {
        self.elements.iter().map(|e| e.weight).collect()
    }

    /// `Σ |w_i|²`
    pub fn total_power(&self) -> f64 {
        self.elements.iter().map(|e| e.weight.norm_sqr()).sum()
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        let elements = self
            .elements
            .iter()
            .map(|e| DipoleElement {
                point: e.point,
                weight: e.weight * factor,
            })
            .collect();
        ExtendedSource::new(elements, self.reference)
    }
}

pub fn point_source(p: PolarizedPoint, amplitude: Complex64) -> Result<ExtendedSource> {
    if amplitude.norm_sqr() == 0.0 {
        return Err(Error::InvalidArgument(
            "point source amplitude must be nonzero".into(),
        ));
    }
    ExtendedSource::new(
        vec![DipoleElement {
            point: p,
            weight: amplitude,
        }],
        p.position,
    )
}

/// Two coherent dipoles with weights `p/√2` and `(p/√2) e^{iφ}`.
pub fn pair_source(
    a: PolarizedPoint,
    b: PolarizedPoint,
    amplitude: f64,
    phase: f64,
) -> Result<ExtendedSource> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pair amplitude must be positive, got {amplitude}"
        )));
    }
    let w = amplitude * FRAC_1_SQRT_2;
    ExtendedSource::new(
        vec![
            DipoleElement {
                point: a,
                weight: Complex64::new(w, 0.0),
            },
            DipoleElement {
                point: b,
                weight: Complex64::from_polar(w, phase),
            },
        ],
        a.position.midpoint(&b.position),
    )
}

/// `count` in-phase dipoles evenly spaced over a segment of `length` nm
/// centered on `center` and directed along `axis`.
///
/// With `count == 1` or `length == 0` the result is a single dipole of
/// amplitude `p` at the center.
pub fn line_source(
    center: Position,
    axis: Orientation,
    polarization: Orientation,
    length: f64,
    count: usize,
    amplitude: f64,
) -> Result<ExtendedSource> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "line source needs at least one element".into(),
        ));
    }
    if !(length.is_finite() && length >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "line length must be non-negative, got {length}"
        )));
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "line amplitude must be positive, got {amplitude}"
        )));
    }
    if count == 1 || length == 0.0 {
        return point_source(
            PolarizedPoint::new(center, polarization),
            Complex64::new(amplitude, 0.0),
        );
    }
    let weight = Complex64::new(amplitude / (count as f64).sqrt(), 0.0);
    let step = length / (count - 1) as f64;
    let elements = (0..count)
        .map(|i| DipoleElement {
            point: PolarizedPoint::new(
                center + axis * (-0.5 * length + step * i as f64),
                polarization,
            ),
            weight,
        })
        .collect();
    ExtendedSource::new(elements, center)
}

/// How many elements a line source of a given length gets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementCount {
    Fixed(usize),
    /// Fewest elements whose spacing does not exceed this many nm.
    MaxSpacing(f64),
}

impl ElementCount {
    /// Spacing of at most λ/(20 n).
    pub fn per_wavelength(k: Wavenumber, n: f64) -> Self {
        ElementCount::MaxSpacing(k.wavelength() / (20.0 * n))
    }

    pub fn count_for(&self, length: f64) -> usize {
        match *self {
            ElementCount::Fixed(n) => n,
            ElementCount::MaxSpacing(s) => {
                if length <= 0.0 {
                    1
                } else {
                    ((length / s).ceil() as usize).max(1) + 1
                }
            }
        }
    }
}

/// Regular grid of cell centers used to discretize a dipole density.
///
/// The cell measure is the product of the spacings along axes with more
/// than one cell, so a single row samples a line density and a single
/// layer samples an areal density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    /// Center of the first cell.
    pub origin: Position,
    pub spacing: [f64; 3],
    pub counts: [usize; 3],
}

impl SamplingGrid {
    pub fn validate(&self) -> Result<()> {
        if self.counts.contains(&0) {
            return Err(Error::InvalidArgument(
                "sampling grid has an empty axis".into(),
            ));
        }
        for axis in 0..3 {
            let h = self.spacing[axis];
            if self.counts[axis] > 1 && !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "sampling grid spacing must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    pub fn cell_measure(&self) -> f64 {
        (0..3)
            .filter(|&a| self.counts[a] > 1)
            .map(|a| self.spacing[a])
            .product()
    }

    pub fn cell_centers(&self) -> impl Iterator<Item = Position> + '_ {
        let [nx, ny, nz] = self.counts;
        (0..nz).flat_map(move |iz| {
            (0..ny).flat_map(move |iy| {
                (0..nx).map(move |ix| Position {
                    x: self.origin.x + ix as f64 * self.spacing[0],
                    y: self.origin.y + iy as f64 * self.spacing[1],
                    z: self.origin.z + iz as f64 * self.spacing[2],
                })
            })
        })
    }
}

/// Discretizes a dipole density `η(r)` with local orientation `û(r)`.
///
/// Each cell gets weight `η(r)·ΔV`; cells with zero weight are dropped.
pub fn sampled_source(
    density: impl Fn(Position) -> Complex64,
    polarization: impl Fn(Position) -> Orientation,
    grid: &SamplingGrid,
    reference: Position,
) -> Result<ExtendedSource> {
    grid.validate()?;
    let dv = grid.cell_measure();
    let elements: Vec<DipoleElement> = grid
        .cell_centers()
        .filter_map(|r| {
            let w = density(r) * dv;
            (w.norm_sqr() != 0.0).then(|| DipoleElement {
                point: PolarizedPoint::new(r, polarization(r)),
                weight: w,
            })
        })
        .collect();
    if elements.is_empty() {
        return Err(Error::InvalidArgument(
            "dipole density is zero on every cell".into(),
        ));
    }
    ExtendedSource::new(elements, reference)
}
