#![allow(dead_code)]

use std::f64::consts::PI;

use cdos_core::{Complex64, GridField, Orientation, PolarizedPoint, Position, VectorFieldModel};
use rand::Rng;

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `Im[û_a·G·û_b]` of a homogeneous medium from its plane-wave
/// representation `(κ/16π²) ∫ dΩ (I − ŝŝ) cos(κ ŝ·R)`.
pub fn im_g_angular(n: f64, k: f64, a: &PolarizedPoint, b: &PolarizedPoint) -> f64 {
    let kappa = n * k;
    let (mu, w) = gauss_legendre(96);
    let n_phi = 128;
    let r = [
        a.position.x - b.position.x,
        a.position.y - b.position.y,
        a.position.z - b.position.z,
    ];
    let ua = a.orientation.components();
    let ub = b.orientation.components();
    let uab: f64 = (0..3).map(|i| ua[i] * ub[i]).sum();
    let mut total = 0.0;
    for (m, wm) in mu.iter().zip(&w) {
        let st = (1.0 - m * m).sqrt();
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let s = [st * phi.cos(), st * phi.sin(), *m];
            let sa: f64 = (0..3).map(|i| s[i] * ua[i]).sum();
            let sb: f64 = (0..3).map(|i| s[i] * ub[i]).sum();
            let sr: f64 = (0..3).map(|i| s[i] * r[i]).sum();
            total += wm * (uab - sa * sb) * (kappa * sr).cos();
        }
    }
    total * (2.0 * PI / n_phi as f64) * kappa / (16.0 * PI * PI)
}

pub fn random_orientation(rng: &mut impl Rng) -> Orientation {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2 = v.iter().map(|x| x * x).sum::<f64>();
        if n2 > 1e-3 && n2 <= 1.0 {
            return Orientation::new(v[0], v[1], v[2]).unwrap();
        }
    }
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// 2×2 planar grid with random complex samples; its nodes sit at
/// (0,0), (100,0), (0,100), (100,100).
pub fn random_grid_field(rng: &mut impl Rng, scale: f64) -> VectorFieldModel {
    let samples = (0..4)
        .map(|_| {
            [
                random_complex(rng, scale),
                random_complex(rng, scale),
                random_complex(rng, scale),
            ]
        })
        .collect();
    VectorFieldModel::Grid(GridField::new(&[2, 2], &[0.0, 0.0], &[100.0, 100.0], samples).unwrap())
}

pub fn node_point(rng: &mut impl Rng, node: usize) -> PolarizedPoint {
    let x = if node & 1 == 1 { 100.0 } else { 0.0 };
    let y = if node & 2 == 2 { 100.0 } else { 0.0 };
    PolarizedPoint::new(Position { x, y, z: 0.0 }, random_orientation(rng))
}
