mod common;

use std::f64::consts::PI;

use cdos_core::{
    coherence_classification, decay_rate, default_surrogate_l3, line_source, linear_k_grid,
    pair_source, point_source, sampled_source, surrogate_l3, sweep_length, sweep_spectrum,
    two_dipole_rate, AnalyticSurrogateParams, Complex64, ElementCount, ExtendedSource, GreensModel,
    HomogeneousGreens, LineGeometry, LossyMode, ModeSet, Orientation, PolarizedPoint, Position,
    Qnm, QnmPair, SamplingGrid, Wavenumber,
};
use common::{node_point, random_complex, random_grid_field};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn y_at(x: f64) -> PolarizedPoint {
    PolarizedPoint::new(Position { x, y: 0.0, z: 0.0 }, Orientation::Y)
}

fn cavity() -> GreensModel {
    GreensModel::with_background(
        HomogeneousGreens::new(3.48).unwrap(),
        GreensModel::Modal(ModeSet::single(default_surrogate_l3())),
    )
}

fn reference() -> GreensModel {
    GreensModel::homogeneous(3.48).unwrap()
}

fn k_res() -> Wavenumber {
    default_surrogate_l3().resonance()
}

/// Random environment of each kind, all with fields defined on the 2×2 test grid.
fn random_env(rng: &mut impl Rng, kind: usize) -> GreensModel {
    let k0 = k_res().get();
    match kind {
        0 => GreensModel::homogeneous(rng.gen_range(1.0..3.6)).unwrap(),
        1 => GreensModel::Modal(
            ModeSet::new(
                (0..2)
                    .map(|_| {
                        LossyMode::with_quality(
                            random_grid_field(rng, 1e-4),
                            Wavenumber::new(k0 * rng.gen_range(0.99..1.01)).unwrap(),
                            rng.gen_range(50.0..3000.0),
                        )
                        .unwrap()
                    })
                    .collect(),
            )
            .unwrap(),
        ),
        2 => GreensModel::Qnm(QnmPair::new(
            Qnm::new(random_grid_field(rng, 1e-4), k_res(), k0 / 300.0).unwrap(),
            Qnm::new(random_grid_field(rng, 1e-4), k_res(), k0 / 2000.0).unwrap(),
        )),
        _ => {
            GreensModel::with_background(HomogeneousGreens::new(3.48).unwrap(), random_env(rng, 1))
        }
    }
}

fn random_source(rng: &mut impl Rng) -> ExtendedSource {
    let n = rng.gen_range(1..6);
    let elements = (0..n)
        .map(|_| cdos_core::DipoleElement {
            point: {
                let i = rng.gen_range(0..4);
                node_point(rng, i)
            },
            weight: random_complex(rng, 1.0),
        })
        .collect();
    ExtendedSource::new(elements, Position::ORIGIN).unwrap()
}

#[test]
fn point_dipole_reduces_to_ldos_ratio() {
    let env = cavity();
    let reference = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let p = y_at(rng.gen_range(-400.0..400.0));
        let k = Wavenumber::new(k_res().get() * rng.gen_range(0.995..1.005)).unwrap();
        let src = point_source(p, random_complex(&mut rng, 2.0)).unwrap();
        let got = decay_rate(&src, &env, &reference, k).unwrap().gamma_ratio;
        let expected = env.cdos(&p, &p, k).unwrap() / reference.cdos(&p, &p, k).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-12);
    }
}

#[test]
fn hermitian_form_is_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for kind in 0..4 {
        let env = random_env(&mut rng, kind);
        let src = random_source(&mut rng);
        let k = k_res();
        let mut full = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for ei in src.elements() {
            for ej in src.elements() {
                let term =
                    ei.weight.conj() * ej.weight * env.cdos(&ei.point, &ej.point, k).unwrap();
                full += term;
                magnitude += term.norm();
            }
        }
        assert!(full.im.abs() <= 1e-12 * magnitude);
        let num = decay_rate(&src, &env, &GreensModel::vacuum(), k)
            .unwrap()
            .numerator;
        assert!((num - full.re).abs() <= 1e-12 * magnitude);
    }
}

#[test]
fn pair_doubling_spectrum() {
    // flat envelope so the two points carry exactly opposite fields
    let params = AnalyticSurrogateParams {
        sigma_x: 1e12,
        sigma_y: 1e12,
        ..AnalyticSurrogateParams::default()
    };
    let k_m = k_res();
    let mode = surrogate_l3(params, k_m, k_m.get() / 2000.0).unwrap();
    let env = GreensModel::Modal(ModeSet::single(mode));
    let reference = reference();
    let (a, b) = (y_at(0.0), y_at(2.0 * params.sign_change_half_width));
    let grid = linear_k_grid(k_m.get() * 0.998, k_m.get() * 1.002, 101).unwrap();
    let pair = sweep_spectrum(
        &pair_source(a, b, 1.0, PI).unwrap(),
        &env,
        &reference,
        &grid,
    )
    .unwrap();
    let single = sweep_spectrum(
        &point_source(a, Complex64::new(1.0, 0.0)).unwrap(),
        &env,
        &reference,
        &grid,
    )
    .unwrap();
    for (p, s) in pair.samples().iter().zip(single.samples()) {
        assert!(((p.numerator - 2.0 * s.numerator) / s.numerator).abs() < 1e-9);
    }
    let silent = pair_source(a, b, 1.0, 0.0).unwrap();
    assert!(
        decay_rate(&silent, &env, &reference, k_m)
            .unwrap()
            .numerator
            .abs()
            < 1e-12
    );
    assert!(coherence_classification(&silent, &env, k_m).unwrap().abs() < 1e-12);
    let bright = pair_source(a, b, 1.0, PI).unwrap();
    assert!((coherence_classification(&bright, &env, k_m).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn single_mode_spectrum_has_the_mode_quality() {
    let mode = default_surrogate_l3();
    let k_m = mode.resonance().get();
    let gamma = mode.damping();
    let env = GreensModel::Modal(ModeSet::single(mode.clone()));
    let src = point_source(y_at(0.0), Complex64::new(1.0, 0.0)).unwrap();
    let grid = linear_k_grid(k_m - 5.0 * gamma, k_m + 5.0 * gamma, 2001).unwrap();
    let spec = sweep_spectrum(&src, &env, &reference(), &grid).unwrap();
    let values: Vec<f64> = spec.samples().iter().map(|r| r.gamma_ratio).collect();
    let ks: Vec<f64> = grid.iter().map(|k| k.get()).collect();
    let (imax, &peak) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let half = 0.5 * peak;
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> f64 {
        for i in range {
            let (v0, v1) = (values[i], values[i + 1]);
            if (v0 - half) * (v1 - half) <= 0.0 {
                return ks[i] + (half - v0) / (v1 - v0) * (ks[i + 1] - ks[i]);
            }
        }
        panic!("no half-maximum crossing");
    };
    let lo = crossing(&mut (0..imax).rev());
    let hi = crossing(&mut (imax..values.len() - 1));
    let q = ks[imax] / (hi - lo);
    assert!((q / mode.quality() - 1.0).abs() < 0.01, "fitted Q {q}");
}

#[test]
fn parallel_sweeps_are_bitwise_serial() {
    let env = cavity();
    let reference = reference();
    let src = line_source(
        Position::ORIGIN,
        Orientation::X,
        Orientation::Y,
        400.0,
        41,
        1.0,
    )
    .unwrap();
    let k = k_res().get();
    let grid = linear_k_grid(0.998 * k, 1.002 * k, 64).unwrap();
    let geometry = LineGeometry {
        center: Position::ORIGIN,
        axis: Orientation::X,
        polarization: Orientation::Y,
        count: ElementCount::per_wavelength(k_res(), 3.48),
        amplitude: 1.0,
    };
    let lengths: Vec<f64> = (0..40).map(|i| 20.0 * i as f64).collect();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            (
                sweep_spectrum(&src, &env, &reference, &grid).unwrap(),
                sweep_length(&geometry, &lengths, &env, &reference, k_res()).unwrap(),
            )
        })
    };
    let (s1, l1) = run(1);
    let (s8, l8) = run(8);
    let bits = |v: &[cdos_core::RateResult]| {
        v.iter()
            .map(|r| r.gamma_ratio.to_bits())
            .collect::<Vec<_>>()
    };
    assert_eq!(bits(s1.samples()), bits(s8.samples()));
    assert_eq!(bits(&l1.rates), bits(&l8.rates));
    assert_eq!(l1.extremity_field, l8.extremity_field);
}

fn cavity_line_rate(d: f64, count: usize) -> f64 {
    let src = line_source(
        Position::ORIGIN,
        Orientation::X,
        Orientation::Y,
        d,
        count,
        1.0,
    )
    .unwrap();
    decay_rate(&src, &cavity(), &reference(), k_res())
        .unwrap()
        .gamma_ratio
}

#[test]
fn doubling_elements_converges() {
    // 20 samples per wavelength in the medium
    let spacing = k_res().wavelength() / (20.0 * 3.48);
    let mut worst = (0.0, 0.0_f64);
    for d in [100.0, 300.0, 640.0, 1000.0] {
        let n = (d / spacing).ceil() as usize + 1;
        let (coarse, fine) = (cavity_line_rate(d, n), cavity_line_rate(d, 2 * n));
        let change = ((fine - coarse) / fine).abs();
        if change > worst.1 {
            worst = (d, change);
        }
    }
    assert!(
        worst.1 < 1e-3,
        "doubling N changed the rate by {:.3e} at d = {} nm",
        worst.1,
        worst.0
    );
}

#[test]
fn line_rule_converges_at_first_order() {
    for d in [100.0, 300.0, 1000.0] {
        let r: Vec<f64> = [40, 80, 160, 320]
            .iter()
            .map(|&n| cavity_line_rate(d, n))
            .collect();
        for w in r.windows(3) {
            let ratio = (w[1] - w[0]) / (w[2] - w[1]);
            assert!(
                (ratio - 2.0).abs() < 0.2,
                "d={d}: successive change ratio {ratio}"
            );
        }
    }
}

#[test]
fn sampled_density_matches_line_source() {
    let env = cavity();
    let reference = reference();
    let k = k_res();
    let (d, n) = (300.0, 1001);
    let line = line_source(Position::ORIGIN, Orientation::X, Orientation::Y, d, n, 1.0).unwrap();
    let h = d / n as f64;
    let grid = SamplingGrid {
        origin: Position {
            x: -0.5 * d + 0.5 * h,
            y: 0.0,
            z: 0.0,
        },
        spacing: [h, 0.0, 0.0],
        counts: [n, 1, 1],
    };
    let sampled = sampled_source(
        |_| Complex64::new(1.0, 0.0),
        |_| Orientation::Y,
        &grid,
        Position::ORIGIN,
    )
    .unwrap();
    let a = decay_rate(&line, &env, &reference, k).unwrap().gamma_ratio;
    let b = decay_rate(&sampled, &env, &reference, k)
        .unwrap()
        .gamma_ratio;
    assert!(((a - b) / a).abs() < 1e-3, "{a} vs {b}");
}

/// Transverse dyadic factor written with sines and cosines.
fn transverse_factor(x: f64) -> f64 {
    if x < 1e-2 {
        return 2.0 / 3.0 - 2.0 * x * x / 15.0 + x.powi(4) / 140.0;
    }
    x.sin() / x + x.cos() / (x * x) - x.sin() / x.powi(3)
}

#[test]
fn homogeneous_line_numerator_matches_brute_force() {
    let n = 3.48;
    let k = Wavenumber::from_wavelength(1270.0).unwrap();
    let kappa = n * k.get();
    let env = GreensModel::homogeneous(n).unwrap();
    let geometry = LineGeometry {
        center: Position::ORIGIN,
        axis: Orientation::X,
        polarization: Orientation::Y,
        count: ElementCount::MaxSpacing(2.5),
        amplitude: 1.0,
    };
    let lengths: Vec<f64> = (0..=80).map(|i| 5.0 * i as f64).collect();
    let curve = sweep_length(&geometry, &lengths, &env, &env, k).unwrap();
    let mut oracle = Vec::new();
    for &d in &lengths {
        let count = geometry.count.count_for(d);
        let xs: Vec<f64> = if count == 1 {
            vec![0.0]
        } else {
            (0..count)
                .map(|i| -0.5 * d + d * i as f64 / (count - 1) as f64)
                .collect()
        };
        let w2 = 1.0 / xs.len() as f64;
        let total: f64 = xs
            .iter()
            .flat_map(|a| {
                xs.iter()
                    .map(move |b| transverse_factor(kappa * (a - b).abs()))
            })
            .sum();
        oracle.push(w2 * total * (2.0 * k.get() / PI) * kappa / (4.0 * PI));
    }
    for (r, o) in curve.rates.iter().zip(&oracle) {
        assert!(((r.numerator - o) / o).abs() < 1e-10);
    }
    assert_eq!(curve.rates[0].gamma_ratio, 1.0);
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0
    };
    let engine: Vec<f64> = curve.rates.iter().map(|r| r.numerator).collect();
    assert_eq!(argmax(&engine), argmax(&oracle));
    // interior maximum, well past the first few elements
    let d_peak = lengths[argmax(&engine)];
    assert!(d_peak > 200.0 && d_peak < 320.0, "peak at {d_peak}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amplitude_scaling_leaves_ratio(seed in any::<u64>(), kind in 0usize..4, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = random_env(&mut rng, kind);
        let src = random_source(&mut rng);
        let reference = GreensModel::homogeneous(1.5).unwrap();
        let k = k_res();
        let base = decay_rate(&src, &env, &reference, k);
        prop_assume!(base.is_ok());
        let base = base.unwrap().gamma_ratio;
        let scaled = decay_rate(&src.scaled(Complex64::new(re, im)).unwrap(), &env, &reference, k).unwrap().gamma_ratio;
        prop_assert!((scaled - base).abs() <= 1e-12 * base.abs().max(1.0));
    }

    #[test]
    fn two_dipole_rate_is_cosine_exact(seed in any::<u64>(), kind in 0usize..4, phi in -PI..PI, p in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = random_env(&mut rng, kind);
        let a = { let i = rng.gen_range(0..4); node_point(&mut rng, i) };
        let b = { let i = rng.gen_range(0..4); node_point(&mut rng, i) };
        let k = k_res();
        let rate = |phase: f64| two_dipole_rate(&a, &b, p, phase, &env, k).unwrap();
        let (raa, rbb, rab) = (env.cdos(&a, &a, k).unwrap(), env.cdos(&b, &b, k).unwrap(), env.cdos(&a, &b, k).unwrap());
        let scale = p * p * (raa.abs() + rbb.abs() + 2.0 * rab.abs());
        prop_assert!((rate(phi) + rate(phi + PI) - p * p * (raa + rbb)).abs() <= 1e-12 * scale);
        prop_assert!((rate(phi) - rate(PI - phi) - 2.0 * p * p * rab * phi.cos()).abs() <= 1e-12 * scale);
        let num = decay_rate(&pair_source(a, b, p, phi).unwrap(), &env, &GreensModel::vacuum(), k);
        if let Ok(num) = num {
            prop_assert!((num.numerator - rate(phi)).abs() <= 1e-12 * scale);
        }
    }
}
