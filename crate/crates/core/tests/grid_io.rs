mod common;

use cdos_core::{
    cdos_modal, default_surrogate_l3, load_grid_field, AnalyticSurrogateParams, Complex64, Error,
    GridField, LossyMode, ModeSet, Orientation, PolarizedPoint, Position, VectorFieldModel,
};
use common::random_complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_grid(rng: &mut impl Rng, dims: &[usize]) -> GridField {
    let origin: Vec<f64> = dims.iter().map(|_| rng.gen_range(-500.0..0.0)).collect();
    let spacing: Vec<f64> = dims.iter().map(|_| rng.gen_range(1.0..40.0)).collect();
    let count: usize = dims.iter().product();
    let samples = (0..count)
        .map(|_| {
            [
                random_complex(rng, 1e-3),
                random_complex(rng, 1e-3),
                random_complex(rng, 1e-3),
            ]
        })
        .collect();
    GridField::new(dims, &origin, &spacing, samples).unwrap()
}

fn interior_point(rng: &mut impl Rng, g: &GridField) -> Position {
    let mut c = [0.0; 3];
    for (axis, slot) in c.iter_mut().enumerate().take(g.rank()) {
        let span = g.spacing()[axis] * (g.dims()[axis] - 1) as f64;
        *slot = g.origin()[axis] + rng.gen_range(0.0..span);
    }
    Position {
        x: c[0],
        y: c[1],
        z: c[2],
    }
}

#[test]
fn save_and_load_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dir = tempfile::tempdir().unwrap();
    for (i, dims) in [vec![8, 8], vec![5, 4, 3]].into_iter().enumerate() {
        let grid = random_grid(&mut rng, &dims);
        let path = dir.path().join(format!("field{i}.txt"));
        grid.save(&path).unwrap();
        let VectorFieldModel::Grid(loaded) = load_grid_field(&path).unwrap() else {
            panic!("expected a grid model");
        };
        assert_eq!(loaded, grid);
        for _ in 0..100 {
            let r = interior_point(&mut rng, &grid);
            assert_eq!(loaded.interpolate(r).unwrap(), grid.interpolate(r).unwrap());
        }
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        load_grid_field(dir.path().join("absent.txt")),
        Err(Error::Io(_))
    ));
}

#[test]
fn fine_grid_reproduces_surrogate_cdos() {
    let mode = default_surrogate_l3();
    let VectorFieldModel::Surrogate(params) = mode.field().clone() else {
        panic!("default mode is a surrogate");
    };
    let grid = GridField::from_fn(&[241, 121], &[-1200.0, -600.0], &[10.0, 10.0], |r| {
        params
            .polarization
            .scale(Complex64::new(surrogate_value(&params, r), 0.0))
    })
    .unwrap();
    // bilinear error ~ h²/8 · curvature per field
    let sampled = LossyMode::new(
        VectorFieldModel::Grid(grid),
        mode.resonance(),
        mode.damping(),
    )
    .unwrap();
    let (exact, approx) = (ModeSet::single(mode.clone()), ModeSet::single(sampled));
    let origin = PolarizedPoint::new(Position::ORIGIN, Orientation::Y);
    let peak = cdos_modal(&exact, &origin, &origin, mode.resonance()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let pt = |rng: &mut ChaCha8Rng| {
            PolarizedPoint::new(
                Position {
                    x: rng.gen_range(-500.0..500.0),
                    y: rng.gen_range(-200.0..200.0),
                    z: 0.0,
                },
                Orientation::Y,
            )
        };
        let (a, b) = (pt(&mut rng), pt(&mut rng));
        let e = cdos_modal(&exact, &a, &b, mode.resonance()).unwrap();
        let g = cdos_modal(&approx, &a, &b, mode.resonance()).unwrap();
        let scale = peak;
        assert!((e - g).abs() < 5e-3 * scale, "{e} vs {g}");
    }
}

/// The surrogate profile written out independently of the library.
fn surrogate_value(p: &AnalyticSurrogateParams, r: Position) -> f64 {
    let x = r.x - p.center.x;
    let y = r.y - p.center.y;
    p.amplitude.re
        * (std::f64::consts::PI * x / (2.0 * p.sign_change_half_width)).cos()
        * (-x * x / (2.0 * p.sigma_x * p.sigma_x) - y * y / (2.0 * p.sigma_y * p.sigma_y)).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn text_round_trip_is_lossless(seed in any::<u64>(), nx in 2usize..6, ny in 2usize..6, nz in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = if nz == 1 { vec![nx, ny] } else { vec![nx, ny, nz] };
        let grid = random_grid(&mut rng, &dims);
        prop_assert_eq!(GridField::parse(&grid.to_text()).unwrap(), grid);
    }
}
