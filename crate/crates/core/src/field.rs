//! Mode field models: an analytic L3-like surrogate and grid-sampled maps.
//!
//! Grid files are plain text:
//!
//! ```text
//! dims nx ny [nz]
//! origin x y [z]
//! spacing dx dy [dz]
//! components 3
//! <re ex> <im ex> <re ey> <im ey> <re ez> <im ez>    (nx·ny·nz lines, x fastest)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CVec3, Orientation, Position, ZERO_CVEC3};

/// Parameters of the surrogate L3 cavity mode
///
/// `amplitude · cos(π x′/(2 x₀)) · exp(−x′²/(2σx²) − y′²/(2σy²))` along
/// `polarization`, with `(x′, y′) = r − center`. The field changes sign
/// at `|x′| = x₀`; `z` is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSurrogateParams {
    pub sign_change_half_width: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub polarization: Orientation,
    pub amplitude: Complex64,
    pub center: Position,
}

impl Default for AnalyticSurrogateParams {
    /// Sign change at 160 nm, y-polarized. The amplitude corresponds to a
    /// mode volume of about 0.7 (λ/n)³ at λ = 1270 nm, n = 3.48.
    fn default() -> Self {
        AnalyticSurrogateParams {
            sign_change_half_width: 160.0,
            sigma_x: 400.0,
            sigma_y: 120.0,
            polarization: Orientation::Y,
            amplitude: Complex64::new(5e-5, 0.0),
            center: Position::ORIGIN,
        }
    }
}

impl AnalyticSurrogateParams {
    pub fn validate(&self) -> Result<()> {
        let widths = [
            ("sign_change_half_width", self.sign_change_half_width),
            ("sigma_x", self.sigma_x),
            ("sigma_y", self.sigma_y),
        ];
        for (name, v) in widths {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.amplitude.re.is_finite() && self.amplitude.im.is_finite()) {
            return Err(Error::InvalidArgument("amplitude must be finite".into()));
        }
        Position::new(self.center.x, self.center.y, self.center.z)?;
        Ok(())
    }

    fn scalar_at(&self, r: Position) -> f64 {
        let x = r.x - self.center.x;
        let y = r.y - self.center.y;
        let lobe = (PI * x / (2.0 * self.sign_change_half_width)).cos();
        let envelope = (-x * x / (2.0 * self.sigma_x * self.sigma_x)
            - y * y / (2.0 * self.sigma_y * self.sigma_y))
            .exp();
        lobe * envelope
    }
}

/// Complex vector field sampled on a regular 2D or 3D grid.
///
/// A 2D grid lies in a plane of constant `z` and ignores the `z`
/// coordinate of queries.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    dims: [usize; 3],
    planar: bool,
    origin: [f64; 3],
    spacing: [f64; 3],
    samples: Vec<CVec3>,
}

// Queries this many cells past an edge still count as inside.
const EDGE_TOLERANCE: f64 = 1e-9;

impl GridField {
    /// `dims`, `origin` and `spacing` must all have length 2 or all length 3.
    pub fn new(
        dims: &[usize],
        origin: &[f64],
        spacing: &[f64],
        samples: Vec<CVec3>,
    ) -> Result<Self> {
        let rank = dims.len();
        if !(rank == 2 || rank == 3) || origin.len() != rank || spacing.len() != rank {
            return Err(Error::InvalidArgument(format!(
                "grid needs 2 or 3 matching dims/origin/spacing entries, got {}/{}/{}",
                dims.len(),
                origin.len(),
                spacing.len()
            )));
        }
        if let Some(&n) = dims.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!(
                "each grid axis needs at least 2 nodes, got {n}"
            )));
        }
        if let Some(&h) = spacing.iter().find(|&&h| !(h.is_finite() && h > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidArgument("grid origin must be finite".into()));
        }
        let expected: usize = dims.iter().product();
        if samples.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: samples.len(),
            });
        }
        if samples
            .iter()
            .flatten()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidArgument("grid sample is not finite".into()));
        }
        let mut d = [1usize; 3];
        let mut o = [0.0; 3];
        let mut h = [1.0; 3];
        d[..rank].copy_from_slice(dims);
        o[..rank].copy_from_slice(origin);
        h[..rank].copy_from_slice(spacing);
        Ok(GridField {
            dims: d,
            planar: rank == 2,
            origin: o,
            spacing: h,
            samples,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(
        dims: &[usize],
        origin: &[f64],
        spacing: &[f64],
        f: impl Fn(Position) -> CVec3,
    ) -> Result<Self> {
        let rank = dims.len();
        let get = |v: &[f64], i: usize| if i < v.len() { v[i] } else { 0.0 };
        let nz = if rank == 3 { dims[2] } else { 1 };
        let (nx, ny) = (
            dims.first().copied().unwrap_or(0),
            dims.get(1).copied().unwrap_or(0),
        );
        let mut samples = Vec::with_capacity(nx * ny * nz);
        for iz in 0..nz {
            for iy in 0..ny {
                for ix in 0..nx {
                    let r = Position {
                        x: get(origin, 0) + ix as f64 * get(spacing, 0),
                        y: get(origin, 1) + iy as f64 * get(spacing, 1),
                        z: get(origin, 2) + iz as f64 * get(spacing, 2),
                    };
                    samples.push(f(r));
                }
            }
        }
        GridField::new(dims, origin, spacing, samples)
    }

    pub fn rank(&self) -> usize {
        if self.planar {
            2
        } else {
            3
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims[..self.rank()]
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.rank()]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.rank()]
    }

    pub fn samples(&self) -> &[CVec3] {
        &self.samples
    }

    pub fn node(&self, ix: usize, iy: usize, iz: usize) -> &CVec3 {
        &self.samples[ix + self.dims[0] * (iy + self.dims[1] * iz)]
    }

    pub fn node_position(&self, ix: usize, iy: usize, iz: usize) -> Position {
        let idx = [ix, iy, iz];
        let c = |a: usize| self.origin[a] + idx[a] as f64 * self.spacing[a];
        Position {
            x: c(0),
            y: c(1),
            z: if self.planar { 0.0 } else { c(2) },
        }
    }

    /// Multilinear interpolation; fails outside the grid.
    pub fn interpolate(&self, r: Position) -> Result<CVec3> {
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for axis in 0..self.rank() {
            let n = self.dims[axis];
            let t = (r.component(axis) - self.origin[axis]) / self.spacing[axis];
            let last = (n - 1) as f64;
            if !(t >= -EDGE_TOLERANCE && t <= last + EDGE_TOLERANCE) {
                return Err(Error::out_of_domain(r));
            }
            let mut t = t.clamp(0.0, last);
            let nearest = t.round();
            if (t - nearest).abs() < EDGE_TOLERANCE {
                t = nearest;
            }
            let i0 = (t.floor() as usize).min(n - 2);
            base[axis] = i0;
            frac[axis] = t - i0 as f64;
        }

        let corners = if self.planar { 4 } else { 8 };
        let mut out = ZERO_CVEC3;
        for corner in 0..corners {
            let mut weight = 1.0;
            let mut idx = [0usize; 3];
            for axis in 0..self.rank() {
                let upper = (corner >> axis) & 1 == 1;
                idx[axis] = base[axis] + upper as usize;
                weight *= if upper { frac[axis] } else { 1.0 - frac[axis] };
            }
            if weight == 0.0 {
                continue;
            }
            let s = self.node(idx[0], idx[1], idx[2]);
            for c in 0..3 {
                out[c] += s[c] * weight;
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join_usize = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let join_f64 = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "dims {}", join_usize(self.dims())).unwrap();
        writeln!(out, "origin {}", join_f64(self.origin())).unwrap();
        writeln!(out, "spacing {}", join_f64(self.spacing())).unwrap();
        writeln!(out, "components 3").unwrap();
        for s in &self.samples {
            writeln!(
                out,
                "{:?} {:?} {:?} {:?} {:?} {:?}",
                s[0].re, s[0].im, s[1].re, s[1].im, s[2].re, s[2].im
            )
            .unwrap();
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_grid_text(text)
    }
}

/// Reads a grid field file; see the module docs for the format.
pub fn load_grid_field(path: impl AsRef<Path>) -> Result<VectorFieldModel> {
    let text = fs::read_to_string(path)?;
    Ok(VectorFieldModel::Grid(GridField::parse(&text)?))
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - line.as_ptr() as usize + 1, tok))
}

fn parse_f64(tok: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_error(line, column, format!("expected a number, found `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_error(
            line,
            column,
            format!("non-finite value `{tok}`"),
        ));
    }
    Ok(v)
}

fn parse_grid_text(text: &str) -> Result<GridField> {
    let mut dims: Option<Vec<usize>> = None;
    let mut origin: Option<Vec<f64>> = None;
    let mut spacing: Option<Vec<f64>> = None;
    let mut components: Option<usize> = None;
    let mut samples: Vec<CVec3> = Vec::new();
    let mut header_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = tokens(line);
        let (col0, first) = toks.next().expect("non-empty line has a token");
        let header_done =
            dims.is_some() && origin.is_some() && spacing.is_some() && components.is_some();

        if !header_done {
            header_line = lineno;
            let rest: Vec<(usize, &str)> = toks.collect();
            match first {
                "dims" => {
                    let v = rest
                        .iter()
                        .map(|&(c, t)| {
                            t.parse::<usize>().map_err(|_| {
                                parse_error(
                                    lineno,
                                    c,
                                    format!("expected a node count, found `{t}`"),
                                )
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if !(v.len() == 2 || v.len() == 3) {
                        return Err(parse_error(lineno, col0, "dims takes 2 or 3 values"));
                    }
                    dims = Some(v);
                }
                "origin" | "spacing" => {
                    let v = rest
                        .iter()
                        .map(|&(c, t)| parse_f64(t, lineno, c))
                        .collect::<Result<Vec<_>>>()?;
                    if !(v.len() == 2 || v.len() == 3) {
                        return Err(parse_error(
                            lineno,
                            col0,
                            format!("{first} takes 2 or 3 values"),
                        ));
                    }
                    if first == "origin" {
                        origin = Some(v);
                    } else {
                        spacing = Some(v);
                    }
                }
                "components" => match rest.as_slice() {
                    [(_, "3")] => components = Some(3),
                    _ => {
                        return Err(parse_error(
                            lineno,
                            col0,
                            "only `components 3` is supported",
                        ))
                    }
                },
                other => {
                    return Err(parse_error(
                        lineno,
                        col0,
                        format!("unexpected `{other}` before the header is complete"),
                    ))
                }
            }
            continue;
        }

        let mut vals = [0.0; 6];
        let mut count = 0;
        for (c, t) in std::iter::once((col0, first)).chain(toks) {
            if count == 6 {
                return Err(parse_error(
                    lineno,
                    c,
                    "more than six values on a sample line",
                ));
            }
            vals[count] = parse_f64(t, lineno, c)?;
            count += 1;
        }
        if count != 6 {
            return Err(parse_error(
                lineno,
                1,
                format!("expected six values, found {count}"),
            ));
        }
        samples.push([
            Complex64::new(vals[0], vals[1]),
            Complex64::new(vals[2], vals[3]),
            Complex64::new(vals[4], vals[5]),
        ]);
    }

    let (Some(dims), Some(origin), Some(spacing), Some(_)) = (dims, origin, spacing, components)
    else {
        return Err(parse_error(header_line.max(1), 1, "incomplete header"));
    };
    if origin.len() != dims.len() || spacing.len() != dims.len() {
        return Err(parse_error(
            header_line,
            1,
            "dims, origin and spacing disagree in rank",
        ));
    }
    let expected: usize = dims.iter().product();
    if samples.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: samples.len(),
        });
    }
    GridField::new(&dims, &origin, &spacing, samples)
}

/// A mode field `e_m(r)`.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorFieldModel {
    Surrogate(AnalyticSurrogateParams),
    Grid(GridField),
}

impl VectorFieldModel {
    pub fn surrogate(params: AnalyticSurrogateParams) -> Result<Self> {
        params.validate()?;
        Ok(VectorFieldModel::Surrogate(params))
    }

    pub fn field_at(&self, r: Position) -> Result<CVec3> {
        match self {
            VectorFieldModel::Surrogate(p) => {
                Ok(p.polarization.scale(p.amplitude * p.scalar_at(r)))
            }
            VectorFieldModel::Grid(g) => g.interpolate(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn surrogate_peak_and_sign_change() {
        let p = AnalyticSurrogateParams::default();
        let m = VectorFieldModel::surrogate(p).unwrap();
        let e0 = m.field_at(Position::ORIGIN).unwrap();
        assert_eq!(e0, Orientation::Y.scale(p.amplitude));
        let e1 = m
            .field_at(Position {
                x: 160.0,
                y: 0.0,
                z: 0.0,
            })
            .unwrap();
        assert!(e1.iter().all(|v| v.norm() < 1e-20));
        let e2 = m
            .field_at(Position {
                x: 320.0,
                y: 0.0,
                z: 50.0,
            })
            .unwrap();
        assert!(e2[1].re < 0.0 && e0[1].re > 0.0);
    }

    #[test]
    fn surrogate_rejects_bad_widths() {
        let p = AnalyticSurrogateParams {
            sigma_x: 0.0,
            ..Default::default()
        };
        assert!(VectorFieldModel::surrogate(p).is_err());
    }

    #[test]
    fn grid_node_values_are_exact() {
        let g = GridField::from_fn(&[5, 4], &[-150.0, -30.0], &[75.0, 20.0], |r| {
            [c(r.x.sin(), r.y), c(0.1 * r.x, -r.y.cos()), c(1.0, 2.0)]
        })
        .unwrap();
        for iy in 0..4 {
            for ix in 0..5 {
                let v = g.interpolate(g.node_position(ix, iy, 0)).unwrap();
                assert_eq!(&v, g.node(ix, iy, 0));
            }
        }
    }

    #[test]
    fn bilinear_cell_center_is_corner_average() {
        let samples = vec![
            [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)],
            [c(3.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(5.0, 0.0), c(4.0, 0.0), c(0.0, -2.0)],
            [c(7.0, -1.0), c(0.0, 3.0), c(2.0, 2.0)],
        ];
        let g = GridField::new(&[2, 2], &[0.0, 0.0], &[10.0, 10.0], samples).unwrap();
        let v = g
            .interpolate(Position {
                x: 5.0,
                y: 5.0,
                z: 99.0,
            })
            .unwrap();
        // hand-computed: mean of the four corners per component
        assert_eq!(v[0], c(4.0, 0.0));
        assert_eq!(v[1], c(1.0, 1.0));
        assert_eq!(v[2], c(1.0, 0.0));
    }

    #[test]
    fn trilinear_reproduces_affine_field() {
        let f = |r: Position| {
            [
                c(2.0 * r.x - r.y + 0.5 * r.z, 1.0),
                c(r.z, r.x),
                c(-r.y, 3.0),
            ]
        };
        let g = GridField::from_fn(&[3, 4, 3], &[0.0, 0.0, 0.0], &[1.0, 2.0, 0.5], f).unwrap();
        let r = Position {
            x: 1.3,
            y: 4.7,
            z: 0.9,
        };
        let v = g.interpolate(r).unwrap();
        let e = f(r);
        for k in 0..3 {
            assert!((v[k] - e[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_out_of_bounds() {
        let g = GridField::from_fn(&[2, 2], &[0.0, 0.0], &[1.0, 1.0], |_| ZERO_CVEC3).unwrap();
        assert!(matches!(
            g.interpolate(Position {
                x: 1.5,
                y: 0.5,
                z: 0.0
            }),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(g
            .interpolate(Position {
                x: -0.01,
                y: 0.5,
                z: 0.0
            })
            .is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GridField::new(&[1, 2], &[0.0, 0.0], &[1.0, 1.0], vec![ZERO_CVEC3; 2]).is_err());
        assert!(GridField::new(&[2, 2], &[0.0, 0.0], &[0.0, 1.0], vec![ZERO_CVEC3; 4]).is_err());
        assert!(matches!(
            GridField::new(&[2, 2], &[0.0, 0.0], &[1.0, 1.0], vec![ZERO_CVEC3; 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn nan_sample_is_located() {
        let text = "dims 2 2\norigin 0 0\nspacing 1 1\ncomponents 3\n\
                    0 0 0 0 0 0\n0 0 0 0 0 0\n0 0 NaN 0 0 0\n0 0 0 0 0 0\n";
        match GridField::parse(text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 7);
                assert_eq!(column, 5);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn short_file_is_dimension_mismatch() {
        let text = "dims 2 2\norigin 0 0\nspacing 1 1\ncomponents 3\n0 0 0 0 0 0\n";
        assert!(matches!(
            GridField::parse(text),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 1
            })
        ));
    }

    #[test]
    fn malformed_headers() {
        assert!(GridField::parse("dims 2\n").is_err());
        assert!(GridField::parse("dims 2 2\norigin 0 0 0\nspacing 1 1\ncomponents 3\n").is_err());
        assert!(GridField::parse("dims 2 2\norigin 0 0\nspacing 1 1\ncomponents 2\n").is_err());
        assert!(GridField::parse("0 0 0 0 0 0\n").is_err());
    }
}
