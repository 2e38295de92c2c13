//! Spontaneous-emission rate modification of point and extended coherent
//! dipole sources in structured photonic environments.
//!
//! Every environment is described through its cross density of states
//! (CDOS) `ρ(P_a, P_b, k) = (2k/π) Im[û_a·G(r_a, r_b, k)·û_b]`, which for
//! `P_a = P_b` is the local density of states. A coherent source made of
//! elementary dipoles with complex weights `w_i` then decays at a rate
//! proportional to `Σ_ij w_i* w_j ρ_ij`; only ratios to a reference
//! environment are computed, so no physical constants appear.
//!
//! Units: lengths in nm, frequencies as vacuum wavenumbers `k = 2π/λ` in
//! nm⁻¹ (`c = 1`).
//!
//! Environments:
//! - [`HomogeneousGreens`]: analytic homogeneous medium.
//! - [`ModeSet`]: high-Q lossy modes (Lorentzian CDOS).
//! - [`QnmPair`]: two quasinormal modes (Fano CDOS), with the exact
//!   decomposition in [`fano`].

pub mod engine;
pub mod error;
pub mod fano;
pub mod field;
pub mod freespace;
pub mod geometry;
pub mod modal;
pub mod qnm;
pub mod sources;
pub mod spectral;

pub use engine::{
    coherence_classification, decay_rate, dominant_mode_extremity, sweep_length, sweep_spectrum,
    two_dipole_rate, BoundKernel, GreensModel, LengthCurve, LineGeometry, PreparedSource,
    RateResult,
};
pub use error::{Error, Result};
pub use fano::{
    compare_q_conventions, fano_decompose_cdos, fano_profile, fano_q_params, lorentzian_peak,
    qnm_phase, reconstruct, FanoComparison, FanoQ, FanoQParams, FanoTerm,
};
pub use field::{load_grid_field, AnalyticSurrogateParams, GridField, VectorFieldModel};
pub use freespace::HomogeneousGreens;
pub use geometry::{CVec3, Orientation, PolarizedPoint, Position};
pub use modal::{cdos_modal, default_surrogate_l3, surrogate_l3, LossyMode, ModeSet};
pub use num_complex::Complex64;
pub use qnm::{cdos_qnm, green_qnm_projected, Qnm, QnmPair};
pub use sources::{
    line_source, pair_source, point_source, sampled_source, DipoleElement, ElementCount,
    ExtendedSource, SamplingGrid,
};
pub use spectral::{free_space_ldos, linear_k_grid, wavelength_to_k, Spectrum, Wavenumber};
