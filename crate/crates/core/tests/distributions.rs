use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use qthp::distributions::{
    bessel_i, sample_torus, sample_vm, torus_vm_density, vm_density, vm_normalization, vmf_density,
    SphereDirection, TrembleSpec,
};
use qthp::quantum::{Dims, StrategyParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KAPPAS: [f64; 5] = [0.0, 0.5, 1.0, 5.0, 25.0];
// mpmath: besseli(1, k) / besseli(0, k)
const RATIO_5: f64 = 0.893_383_137_044_085_2;
const RATIO_25: f64 = 0.979_791_453_490_515_9;

fn center(dims: Dims) -> StrategyParams {
    StrategyParams::from_coords(dims, [0.4, 2.0, 5.5])
}

/// Trapezoid over the full d-torus, straight from the density function.
fn torus_mass(spec: &TrembleSpec, n: usize) -> f64 {
    let d = spec.dims().count();
    let h = TAU / n as f64;
    let total = n.pow(d as u32);
    let mut sum = 0.0;
    for idx in 0..total {
        let mut raw = [0.0; 3];
        let mut rest = idx;
        for (k, r) in raw.iter_mut().enumerate().take(d) {
            let start = if k == 0 { -PI } else { 0.0 };
            *r = start + h * (rest % n) as f64;
            rest /= n;
        }
        sum += torus_vm_density(&StrategyParams::from_coords(spec.dims(), raw), spec).unwrap();
    }
    sum * h.powi(d as i32)
}

#[test]
fn torus_density_normalized() {
    for dims in Dims::ALL {
        let n = if dims == Dims::Three { 96 } else { 256 };
        for kappa in KAPPAS {
            let spec = TrembleSpec::new(center(dims), kappa).unwrap();
            let mass = torus_mass(&spec, n);
            assert!((mass - 1.0).abs() < 1e-8, "d={dims} kappa={kappa}: {mass}");
        }
    }
}

#[test]
fn circle_normalization_constant() {
    for kappa in [0.0, 0.5, 1.0, 5.0, 25.0, 100.0] {
        let c2 = vm_normalization(kappa).unwrap();
        let n = 4096;
        let h = TAU / n as f64;
        let mass: f64 = (0..n)
            .map(|k| c2 * (kappa * (-PI + h * k as f64 - 0.3).cos()).exp() * h)
            .sum();
        assert!((mass - 1.0).abs() < 1e-9, "kappa={kappa}: {mass}");
    }
    let i0_1 = 1.266_065_877_752_008_4;
    assert!((vm_normalization(1.0).unwrap() - 1.0 / (TAU * i0_1)).abs() < 1e-15);
}

#[test]
fn mode_at_center() {
    let spec = TrembleSpec::new(center(Dims::Two), 3.0).unwrap();
    let n = 128;
    let h = TAU / n as f64;
    let (mut best, mut best_at) = (f64::NEG_INFINITY, [0.0; 2]);
    for i in 0..n {
        for j in 0..n {
            let p = [-PI + h * i as f64, h * j as f64];
            let v =
                torus_vm_density(&StrategyParams::from_coords(Dims::Two, [p[0], p[1], 0.0]), &spec).unwrap();
            if v > best {
                best = v;
                best_at = p;
            }
        }
    }
    let c = spec.center().coords();
    assert!((best_at[0] - c[0]).abs() <= h && (best_at[1] - c[1]).abs() <= h);
    assert!(torus_vm_density(spec.center(), &spec).unwrap() >= best);
}

#[test]
fn concentrated_mass_near_center() {
    // 1-D mass within 0.5 rad by fine trapezoid; the product over three axes
    let kappa = 200.0;
    let n = 200_000;
    let h = 1.0 / n as f64;
    let inner: f64 = (0..=n)
        .map(|k| {
            let x = -0.5 + h * k as f64;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            w * vm_density(x, 0.0, kappa).unwrap() * h
        })
        .sum();
    assert!(inner >= 1.0 - 1e-6, "{inner}");
    assert!(inner.powi(3) >= 1.0 - 1e-6);
}

proptest! {
    #[test]
    fn density_even_about_center(
        dt in -3.0f64..3.0, da in -3.0f64..3.0, db in -3.0f64..3.0, kappa in 0.0f64..30.0
    ) {
        let spec = TrembleSpec::new(center(Dims::Three), kappa).unwrap();
        let c = spec.center().coords();
        let plus = StrategyParams::from_coords(Dims::Three, [c[0] + dt, c[1] + da, c[2] + db]);
        let minus = StrategyParams::from_coords(Dims::Three, [c[0] - dt, c[1] - da, c[2] - db]);
        let (p, m) = (torus_vm_density(&plus, &spec).unwrap(), torus_vm_density(&minus, &spec).unwrap());
        prop_assert!((p - m).abs() <= 1e-12 * p.max(m));
    }

    #[test]
    fn vmf_on_circle_is_von_mises(phi in -PI..PI, phi0 in -PI..PI, kappa in 0.0f64..50.0) {
        let x = SphereDirection::new(vec![phi.cos(), phi.sin()]).unwrap();
        let x0 = SphereDirection::new(vec![phi0.cos(), phi0.sin()]).unwrap();
        let a = vmf_density(&x, &x0, kappa, 2).unwrap();
        let b = vm_density(phi, phi0, kappa).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }
}

#[test]
fn vmf_two_sphere_integrates_to_one() {
    // Simpson in u = cos(polar), periodic trapezoid in azimuth
    let x0 = SphereDirection::new(vec![0.3, -0.5, 0.8]).unwrap();
    for kappa in [0.0, 1.0, 5.0] {
        let (nu, nphi) = (2000, 128);
        let hu = 2.0 / nu as f64;
        let hphi = TAU / nphi as f64;
        let mut total = 0.0;
        for i in 0..=nu {
            let u: f64 = -1.0 + hu * i as f64;
            let s = (1.0 - u * u).max(0.0).sqrt();
            let w = if i == 0 || i == nu {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let ring: f64 = (0..nphi)
                .map(|j| {
                    let phi = hphi * j as f64;
                    let x = SphereDirection::new(vec![s * phi.cos(), s * phi.sin(), u]).unwrap();
                    vmf_density(&x, &x0, kappa, 3).unwrap()
                })
                .sum::<f64>()
                * hphi;
            total += w * ring;
        }
        total *= hu / 3.0;
        assert!((total - 1.0).abs() < 1e-8, "kappa={kappa}: {total}");
    }
}

#[test]
fn bessel_ratio_matches_reference() {
    for (kappa, want) in [(5.0, RATIO_5), (25.0, RATIO_25)] {
        let r = bessel_i(1.0, kappa).unwrap() / bessel_i(0.0, kappa).unwrap();
        assert!((r - want).abs() < 1e-12);
    }
}

#[test]
fn uniform_sampler_passes_ks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| sample_vm(&mut rng, 0.7, 0.0)).collect();
    assert!(xs.iter().all(|x| (-PI..PI).contains(x)));
    xs.sort_by(f64::total_cmp);
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = (x + PI) / TAU;
            (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
        })
        .fold(0.0, f64::max);
    // asymptotic critical value at significance 0.01
    let critical = 1.6276 / (n as f64).sqrt();
    assert!(d < critical, "D = {d}, critical {critical}");
}

fn circular_moments(xs: &[f64]) -> (f64, f64) {
    let (s, c) = xs.iter().fold((0.0, 0.0), |(s, c), x| (s + x.sin(), c + x.cos()));
    let n = xs.len() as f64;
    (s.atan2(c), (s * s + c * c).sqrt() / n)
}

#[test]
fn sampler_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let xs: Vec<f64> = (0..100_000).map(|_| sample_vm(&mut rng, 1.0, 5.0)).collect();
    let (mean, r) = circular_moments(&xs);
    assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
    assert!((r - RATIO_5).abs() < 0.01, "R {r}");
}

#[test]
fn torus_sampler_concentrates() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spec = TrembleSpec::new(center(Dims::Three), 25.0).unwrap();
    let draws: Vec<[f64; 3]> = (0..20_000)
        .map(|_| sample_torus(&mut rng, &spec).coords())
        .collect();
    let c = spec.center().coords();
    for k in 0..3 {
        let xs: Vec<f64> = draws.iter().map(|p| p[k]).collect();
        let (mean, r) = circular_moments(&xs);
        let std = (-2.0 * r.ln()).sqrt();
        assert!(std < 0.25, "axis {k}: std {std}");
        let off = (mean - c[k] + PI).rem_euclid(TAU) - PI;
        assert!(off.abs() < 0.02);
        assert!((r - RATIO_25).abs() < 0.01);
    }
    let one = TrembleSpec::new(center(Dims::One), 1.0).unwrap();
    for _ in 0..1000 {
        let p = sample_torus(&mut rng, &one);
        assert_eq!((p.alpha(), p.beta()), (0.0, 0.0));
    }
}

fn bin_probability(lo: f64, hi: f64, center: f64, kappa: f64) -> f64 {
    let n = 400;
    let h = (hi - lo) / n as f64;
    (0..=n)
        .map(|k| {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            w * vm_density(lo + h * k as f64, center, kappa).unwrap()
        })
        .sum::<f64>()
        * h
}

#[test]
fn torus_histogram_matches_density() {
    let kappa = 1.0;
    let spec = TrembleSpec::new(center(Dims::Two), kappa).unwrap();
    let c = spec.center().coords();
    let bins = 16;
    let width = TAU / bins as f64;
    let n = 1_000_000;
    let mut counts = vec![0u64; bins * bins];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..n {
        let p = sample_torus(&mut rng, &spec);
        let i = (((p.theta() + PI) / width) as usize).min(bins - 1);
        let j = ((p.alpha() / width) as usize).min(bins - 1);
        counts[i * bins + j] += 1;
    }
    let theta_p: Vec<f64> = (0..bins)
        .map(|i| bin_probability(-PI + width * i as f64, -PI + width * (i + 1) as f64, c[0], kappa))
        .collect();
    let alpha_p: Vec<f64> = (0..bins)
        .map(|j| bin_probability(width * j as f64, width * (j + 1) as f64, c[1], kappa))
        .collect();
    for i in 0..bins {
        for j in 0..bins {
            let p = theta_p[i] * alpha_p[j];
            let expected = n as f64 * p;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            let got = counts[i * bins + j] as f64;
            assert!(
                (got - expected).abs() <= 3.0 * sigma,
                "bin ({i},{j}): {got} vs {expected}"
            );
        }
    }
}
