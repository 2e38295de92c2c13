//! Scenario configuration files.
//!
//! A scenario is a TOML document with `environment`, `reference`, `source`
//! and `sweep` tables plus an optional `output` table. Keys follow the
//! argument names of the corresponding `cdos-core` constructors.

use std::fs;
use std::path::{Path, PathBuf};

use cdos_core::{
    load_grid_field, pair_source, point_source, AnalyticSurrogateParams, Complex64, ElementCount,
    ExtendedSource, GreensModel, HomogeneousGreens, LineGeometry, LossyMode, ModeSet, Orientation,
    PolarizedPoint, Position, Qnm, QnmPair, VectorFieldModel, Wavenumber,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub environment: ModelConfig,
    pub reference: ModelConfig,
    pub source: SourceConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Homogeneous {
        n: f64,
    },
    Modal {
        modes: Vec<ModeConfig>,
        background_n: Option<f64>,
    },
    Qnm {
        modes: Vec<ModeConfig>,
        background_n: Option<f64>,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub lambda_nm: Option<f64>,
    pub k_m: Option<f64>,
    pub quality: Option<f64>,
    pub gamma: Option<f64>,
    pub field: FieldConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Surrogate {
        sign_change_half_width: Option<f64>,
        sigma_x: Option<f64>,
        sigma_y: Option<f64>,
        polarization: Option<[f64; 3]>,
        /// `[re, im]`
        amplitude: Option<[f64; 2]>,
        center: Option<[f64; 3]>,
    },
    Grid {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub position: [f64; 3],
    pub polarization: [f64; 3],
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Point {
        position: [f64; 3],
        polarization: [f64; 3],
        amplitude: Option<[f64; 2]>,
    },
    Pair {
        a: PointConfig,
        b: PointConfig,
        amplitude: f64,
        phase: f64,
    },
    Line {
        center: [f64; 3],
        axis: [f64; 3],
        polarization: [f64; 3],
        /// Ignored by length sweeps, required otherwise.
        length: Option<f64>,
        count: Option<usize>,
        max_spacing_nm: Option<f64>,
        amplitude: Option<f64>,
    },
}

/// What the swept rate is divided by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// The same source in the reference environment.
    #[default]
    SameSource,
    /// A single dipole of the source amplitude at the source reference point.
    PointDipole,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepConfig {
    Spectrum {
        lambda_min_nm: Option<f64>,
        lambda_max_nm: Option<f64>,
        k_min: Option<f64>,
        k_max: Option<f64>,
        points: usize,
        #[serde(default)]
        normalization: Normalization,
    },
    Length {
        lambda_nm: Option<f64>,
        k: Option<f64>,
        d_min_nm: f64,
        d_max_nm: f64,
        points: usize,
        #[serde(default)]
        normalization: Normalization,
    },
}

/// A validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub environment: GreensModel,
    pub reference: GreensModel,
    pub sweep: Sweep,
    pub normalization: Normalization,
    pub output: OutputConfig,
}

#[derive(Debug, Clone)]
pub enum Sweep {
    Spectrum {
        source: ExtendedSource,
        k_grid: Vec<Wavenumber>,
    },
    Length {
        geometry: LineGeometry,
        lengths: Vec<f64>,
        k: Wavenumber,
    },
}

impl Sweep {
    /// Amplitude and position of the single dipole used by [`Normalization::PointDipole`].
    pub fn point_reference(&self) -> (f64, PolarizedPoint) {
        match self {
            Sweep::Spectrum { source, .. } => {
                let p = source.total_power().sqrt();
                let orientation = source.elements()[0].point.orientation;
                (p, PolarizedPoint::new(source.reference(), orientation))
            }
            Sweep::Length { geometry, .. } => (
                geometry.amplitude,
                PolarizedPoint::new(geometry.center, geometry.polarization),
            ),
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    /// Reads and parses a config file, returning its raw bytes as well.
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), ConfigError> {
        let bytes = fs::read(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|e| ConfigError::Syntax(format!("config is not UTF-8: {e}")))?;
        Ok((Self::parse(&text)?, bytes))
    }

    /// Validates every field and builds the core objects. Relative grid
    /// paths are resolved against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Scenario, ConfigError> {
        if self.scenario.is_empty()
            || !self
                .scenario
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return Err(invalid("scenario", "use letters, digits, '-', '_' or '.'"));
        }
        let environment = build_model(&self.environment, "environment", base_dir)?;
        let reference = build_model(&self.reference, "reference", base_dir)?;
        let (sweep, normalization) = match &self.sweep {
            SweepConfig::Spectrum {
                lambda_min_nm,
                lambda_max_nm,
                k_min,
                k_max,
                points,
                normalization,
            } => {
                let (lo, hi) = match (lambda_min_nm, lambda_max_nm, k_min, k_max) {
                    (Some(l0), Some(l1), None, None) => {
                        let k_hi =
                            wavenumber(2.0 * std::f64::consts::PI / l0, "sweep.lambda_min_nm")?;
                        let k_lo =
                            wavenumber(2.0 * std::f64::consts::PI / l1, "sweep.lambda_max_nm")?;
                        (k_lo, k_hi)
                    }
                    (None, None, Some(k0), Some(k1)) => (
                        wavenumber(*k0, "sweep.k_min")?,
                        wavenumber(*k1, "sweep.k_max")?,
                    ),
                    _ => {
                        return Err(invalid(
                            "sweep",
                            "give either lambda_min_nm and lambda_max_nm, or k_min and k_max",
                        ))
                    }
                };
                let k_grid = cdos_core::linear_k_grid(lo.get(), hi.get(), *points)
                    .map_err(|e| invalid("sweep.points", e))?;
                let source = build_source(&self.source, Some(lo), &reference)?;
                (Sweep::Spectrum { source, k_grid }, *normalization)
            }
            SweepConfig::Length {
                lambda_nm,
                k,
                d_min_nm,
                d_max_nm,
                points,
                normalization,
            } => {
                let k = match (lambda_nm, k) {
                    (Some(l), None) => {
                        wavenumber(2.0 * std::f64::consts::PI / l, "sweep.lambda_nm")?
                    }
                    (None, Some(k)) => wavenumber(*k, "sweep.k")?,
                    _ => return Err(invalid("sweep", "give exactly one of lambda_nm and k")),
                };
                if !(d_min_nm.is_finite() && *d_min_nm >= 0.0) {
                    return Err(invalid("sweep.d_min_nm", "must be a non-negative length"));
                }
                if !(d_max_nm.is_finite() && d_max_nm > d_min_nm) {
                    return Err(invalid("sweep.d_max_nm", "must exceed d_min_nm"));
                }
                if *points < 2 {
                    return Err(invalid("sweep.points", "need at least two lengths"));
                }
                let step = (d_max_nm - d_min_nm) / (*points - 1) as f64;
                let lengths = (0..*points)
                    .map(|i| {
                        if i + 1 == *points {
                            *d_max_nm
                        } else {
                            d_min_nm + step * i as f64
                        }
                    })
                    .collect();
                let geometry = build_line_geometry(&self.source, k, &reference)?;
                (
                    Sweep::Length {
                        geometry,
                        lengths,
                        k,
                    },
                    *normalization,
                )
            }
        };
        Ok(Scenario {
            name: self.scenario.clone(),
            environment,
            reference,
            sweep,
            normalization,
            output: self.output.clone(),
        })
    }
}

fn wavenumber(k: f64, field: &str) -> Result<Wavenumber, ConfigError> {
    Wavenumber::new(k).map_err(|e| invalid(field, e))
}

fn orientation(v: [f64; 3], field: &str) -> Result<Orientation, ConfigError> {
    Orientation::new(v[0], v[1], v[2]).map_err(|e| invalid(field, e))
}

fn position(v: [f64; 3], field: &str) -> Result<Position, ConfigError> {
    Position::new(v[0], v[1], v[2]).map_err(|e| invalid(field, e))
}

fn build_model(
    cfg: &ModelConfig,
    field: &str,
    base_dir: &Path,
) -> Result<GreensModel, ConfigError> {
    match cfg {
        ModelConfig::Homogeneous { n } => {
            GreensModel::homogeneous(*n).map_err(|e| invalid(format!("{field}.n"), e))
        }
        ModelConfig::Modal {
            modes,
            background_n,
        } => {
            if modes.is_empty() {
                return Err(invalid(format!("{field}.modes"), "need at least one mode"));
            }
            let built = modes
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let f = format!("{field}.modes[{i}]");
                    let (k_m, gamma) = resonance(m, &f)?;
                    let fm = build_field(&m.field, &format!("{f}.field"), base_dir)?;
                    LossyMode::new(fm, k_m, gamma).map_err(|e| invalid(&f, e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let set = ModeSet::new(built).map_err(|e| invalid(format!("{field}.modes"), e))?;
            with_background(GreensModel::Modal(set), *background_n, field)
        }
        ModelConfig::Qnm {
            modes,
            background_n,
        } => {
            if modes.len() != 2 {
                return Err(invalid(
                    format!("{field}.modes"),
                    format!("need exactly two QNMs, got {}", modes.len()),
                ));
            }
            let mut built = Vec::with_capacity(2);
            for (i, m) in modes.iter().enumerate() {
                let f = format!("{field}.modes[{i}]");
                let (k_m, gamma) = resonance(m, &f)?;
                let fm = build_field(&m.field, &format!("{f}.field"), base_dir)?;
                built.push(Qnm::new(fm, k_m, gamma).map_err(|e| invalid(&f, e))?);
            }
            let b = built.pop().expect("two modes");
            let a = built.pop().expect("two modes");
            with_background(GreensModel::Qnm(QnmPair::new(a, b)), *background_n, field)
        }
    }
}

fn with_background(
    model: GreensModel,
    n: Option<f64>,
    field: &str,
) -> Result<GreensModel, ConfigError> {
    match n {
        None => Ok(model),
        Some(n) => {
            let bg = HomogeneousGreens::new(n)
                .map_err(|e| invalid(format!("{field}.background_n"), e))?;
            Ok(GreensModel::with_background(bg, model))
        }
    }
}

fn resonance(m: &ModeConfig, field: &str) -> Result<(Wavenumber, f64), ConfigError> {
    let k_m = match (m.lambda_nm, m.k_m) {
        (Some(l), None) => {
            Wavenumber::from_wavelength(l).map_err(|e| invalid(format!("{field}.lambda_nm"), e))?
        }
        (None, Some(k)) => wavenumber(k, &format!("{field}.k_m"))?,
        _ => return Err(invalid(field, "give exactly one of lambda_nm and k_m")),
    };
    let gamma = match (m.quality, m.gamma) {
        (Some(q), None) => {
            if !(q.is_finite() && q > 0.0) {
                return Err(invalid(
                    format!("{field}.quality"),
                    format!("must be positive, got {q}"),
                ));
            }
            k_m.get() / q
        }
        (None, Some(g)) => g,
        _ => return Err(invalid(field, "give exactly one of quality and gamma")),
    };
    Ok((k_m, gamma))
}

fn build_field(
    cfg: &FieldConfig,
    field: &str,
    base_dir: &Path,
) -> Result<VectorFieldModel, ConfigError> {
    match cfg {
        FieldConfig::Surrogate {
            sign_change_half_width,
            sigma_x,
            sigma_y,
            polarization,
            amplitude,
            center,
        } => {
            let d = AnalyticSurrogateParams::default();
            let params = AnalyticSurrogateParams {
                sign_change_half_width: sign_change_half_width.unwrap_or(d.sign_change_half_width),
                sigma_x: sigma_x.unwrap_or(d.sigma_x),
                sigma_y: sigma_y.unwrap_or(d.sigma_y),
                polarization: match polarization {
                    Some(v) => orientation(*v, &format!("{field}.polarization"))?,
                    None => d.polarization,
                },
                amplitude: amplitude.map_or(d.amplitude, |[re, im]| Complex64::new(re, im)),
                center: match center {
                    Some(v) => position(*v, &format!("{field}.center"))?,
                    None => d.center,
                },
            };
            VectorFieldModel::surrogate(params).map_err(|e| invalid(field, e))
        }
        FieldConfig::Grid { path } => {
            let full = if path.is_absolute() {
                path.clone()
            } else {
                base_dir.join(path)
            };
            if !full.is_file() {
                return Err(invalid(
                    format!("{field}.path"),
                    format!("grid file not found: {}", full.display()),
                ));
            }
            load_grid_field(&full)
                .map_err(|e| invalid(format!("{field}.path"), format!("{}: {e}", full.display())))
        }
    }
}

/// Default element spacing is λ/(20 n) at the shortest swept wavelength,
/// with `n` the reference index (1 for structured references).
fn default_count(k: Wavenumber, reference: &GreensModel) -> ElementCount {
    let n = match reference {
        GreensModel::Homogeneous(h) => h.index(),
        _ => 1.0,
    };
    ElementCount::per_wavelength(k, n)
}

fn element_count(
    count: Option<usize>,
    max_spacing_nm: Option<f64>,
    k: Wavenumber,
    reference: &GreensModel,
) -> Result<ElementCount, ConfigError> {
    match (count, max_spacing_nm) {
        (Some(_), Some(_)) => Err(invalid(
            "source",
            "give at most one of count and max_spacing_nm",
        )),
        (Some(0), None) => Err(invalid("source.count", "must be at least 1")),
        (Some(n), None) => Ok(ElementCount::Fixed(n)),
        (None, Some(s)) if !(s.is_finite() && s > 0.0) => Err(invalid(
            "source.max_spacing_nm",
            format!("must be positive, got {s}"),
        )),
        (None, Some(s)) => Ok(ElementCount::MaxSpacing(s)),
        (None, None) => Ok(default_count(k, reference)),
    }
}

fn build_source(
    cfg: &SourceConfig,
    k_min: Option<Wavenumber>,
    reference: &GreensModel,
) -> Result<ExtendedSource, ConfigError> {
    match cfg {
        SourceConfig::Point {
            position: p,
            polarization,
            amplitude,
        } => {
            let point = PolarizedPoint::new(
                position(*p, "source.position")?,
                orientation(*polarization, "source.polarization")?,
            );
            let [re, im] = amplitude.unwrap_or([1.0, 0.0]);
            point_source(point, Complex64::new(re, im)).map_err(|e| invalid("source.amplitude", e))
        }
        SourceConfig::Pair {
            a,
            b,
            amplitude,
            phase,
        } => {
            let pa = PolarizedPoint::new(
                position(a.position, "source.a.position")?,
                orientation(a.polarization, "source.a.polarization")?,
            );
            let pb = PolarizedPoint::new(
                position(b.position, "source.b.position")?,
                orientation(b.polarization, "source.b.polarization")?,
            );
            if !phase.is_finite() {
                return Err(invalid("source.phase", "must be finite"));
            }
            pair_source(pa, pb, *amplitude, *phase).map_err(|e| invalid("source.amplitude", e))
        }
        SourceConfig::Line {
            length,
            count,
            max_spacing_nm,
            ..
        } => {
            let Some(d) = length else {
                return Err(invalid(
                    "source.length",
                    "required unless the sweep is over length",
                ));
            };
            let k = k_min.expect("spectrum sweeps supply a wavenumber");
            let geometry =
                line_geometry(cfg, element_count(*count, *max_spacing_nm, k, reference)?)?;
            if !(d.is_finite() && *d >= 0.0) {
                return Err(invalid(
                    "source.length",
                    format!("must be non-negative, got {d}"),
                ));
            }
            geometry.source(*d).map_err(|e| invalid("source", e))
        }
    }
}

fn line_geometry(cfg: &SourceConfig, count: ElementCount) -> Result<LineGeometry, ConfigError> {
    let SourceConfig::Line {
        center,
        axis,
        polarization,
        amplitude,
        ..
    } = cfg
    else {
        unreachable!("called for line sources only");
    };
    let amplitude = amplitude.unwrap_or(1.0);
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(invalid(
            "source.amplitude",
            format!("must be positive, got {amplitude}"),
        ));
    }
    Ok(LineGeometry {
        center: position(*center, "source.center")?,
        axis: orientation(*axis, "source.axis")?,
        polarization: orientation(*polarization, "source.polarization")?,
        count,
        amplitude,
    })
}

fn build_line_geometry(
    cfg: &SourceConfig,
    k: Wavenumber,
    reference: &GreensModel,
) -> Result<LineGeometry, ConfigError> {
    match cfg {
        SourceConfig::Line {
            count,
            max_spacing_nm,
            length,
            ..
        } => {
            if length.is_some() {
                return Err(invalid(
                    "source.length",
                    "a length sweep sets the length; remove this key",
                ));
            }
            line_geometry(cfg, element_count(*count, *max_spacing_nm, k, reference)?)
        }
        _ => Err(invalid("source.kind", "length sweeps need a line source")),
    }
}
