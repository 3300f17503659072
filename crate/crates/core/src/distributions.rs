//! Tremble distributions.
//!
//! A trembled strategy is a von Mises distribution in every active torus
//! coordinate, with the product density
//! `c2(kappa)^d exp(kappa * sum_k cos(x_k - x0_k))` under the flat measure.
//! The general von Mises–Fisher density on `S^{p-1}` is provided alongside.
//!
//! Densities are evaluated through the exponentially scaled Bessel function
//! `e^{-x} I_nu(x)`, so `exp(kappa (cos - 1)) / (2 pi I0e(kappa))` never
//! overflows for large concentrations.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{Dims, StrategyParams};

/// Below this argument the power series is used, above it the asymptotic
/// expansion (when the order is small enough for it to converge).
pub const BESSEL_SERIES_LIMIT: f64 = 15.0;

const SERIES_MAX_TERMS: usize = 500;

/// `ln Gamma(z)` for `z > 0` a multiple of 1/2.
fn ln_gamma_half_integer(z: f64) -> f64 {
    debug_assert!(z > 0.0 && (2.0 * z).fract() == 0.0);
    let mut z = z;
    let mut acc = 0.0;
    while z > 1.0 {
        z -= 1.0;
        acc += z.ln();
    }
    // z is now 1 or 1/2
    if z == 1.0 {
        acc
    } else {
        acc + 0.5 * PI.ln()
    }
}

fn check_order(nu: f64) -> Result<()> {
    if !nu.is_finite() || nu < 0.0 || (2.0 * nu).fract() != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Bessel order must be a nonnegative multiple of 1/2, got {nu}"
        )));
    }
    Ok(())
}

/// Exponentially scaled modified Bessel function `e^{-x} I_nu(x)`.
///
/// `nu` must be a nonnegative integer or half-integer and `x >= 0`.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Bessel argument must be finite and nonnegative, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x >= BESSEL_SERIES_LIMIT && x >= nu * nu {
        Ok(scaled_asymptotic(nu, x))
    } else {
        Ok(scaled_series(nu, x))
    }
}

/// Modified Bessel function of the first kind `I_nu(x)`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    let scaled = bessel_i_scaled(nu, x)?;
    let v = scaled * x.exp();
    if !v.is_finite() {
        return Err(Error::Overflow(x));
    }
    Ok(v)
}

// sum_k (x/2)^{2k+nu} / (k! Gamma(k+nu+1)) * e^{-x}, terms built in log space
fn scaled_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let ln_q = 2.0 * half.ln();
    let mut ln_term = nu * half.ln() - ln_gamma_half_integer(nu + 1.0) - x;
    let mut sum = 0.0;
    for k in 0..SERIES_MAX_TERMS {
        let term = ln_term.exp();
        sum += term;
        if term <= sum * 1e-17 && (k as f64) > half {
            break;
        }
        let kf = (k + 1) as f64;
        ln_term += ln_q - kf.ln() - (kf + nu).ln();
    }
    sum
}

// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k
fn scaled_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..SERIES_MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    sum / (TAU * x).sqrt()
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::InvalidKappa(kappa));
    }
    Ok(())
}

/// `c2 = 1 / (2 pi I0(kappa))`, the von Mises normalization on the circle.
pub fn vm_normalization(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return Ok(1.0 / TAU);
    }
    Ok((-kappa).exp() / (TAU * bessel_i_scaled(0.0, kappa)?))
}

/// Von Mises density at `angle` for mean direction `center`.
pub fn vm_density(angle: f64, center: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(vm_factor(angle - center, kappa, scaled_normalizer(kappa)))
}

// 1 / (2 pi I0e(kappa)); the uniform density when kappa = 0
fn scaled_normalizer(kappa: f64) -> f64 {
    if kappa == 0.0 {
        1.0 / TAU
    } else {
        // check_kappa has run, so the scaled Bessel value is well defined
        1.0 / (TAU * bessel_i_scaled(0.0, kappa).unwrap_or(f64::NAN))
    }
}

#[inline]
fn vm_factor(offset: f64, kappa: f64, norm: f64) -> f64 {
    if kappa == 0.0 {
        norm
    } else {
        norm * (kappa * (offset.cos() - 1.0)).exp()
    }
}

/// A tremble: product von Mises distribution centred on a pure strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrembleSpec {
    center: StrategyParams,
    kappa: f64,
}

impl TrembleSpec {
    pub fn new(center: StrategyParams, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(TrembleSpec { center, kappa })
    }

    pub fn center(&self) -> &StrategyParams {
        &self.center
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dims(&self) -> Dims {
        self.center.dims()
    }

    /// Per-axis density factors for the given coordinate offsets from the
    /// centre: one factor per active dimension.
    pub(crate) fn axis_weights(&self) -> AxisDensity {
        AxisDensity {
            kappa: self.kappa,
            norm: scaled_normalizer(self.kappa),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AxisDensity {
    kappa: f64,
    norm: f64,
}

impl AxisDensity {
    pub(crate) fn at(&self, offset: f64) -> f64 {
        vm_factor(offset, self.kappa, self.norm)
    }
}

/// Product von Mises density on the `d`-torus, `d = spec.dims()`.
pub fn torus_vm_density(point: &StrategyParams, spec: &TrembleSpec) -> Result<f64> {
    if point.dims() != spec.dims() {
        return Err(Error::DimensionMismatch {
            expected: spec.dims().count(),
            actual: point.dims().count(),
        });
    }
    let axis = spec.axis_weights();
    Ok(point
        .active()
        .iter()
        .zip(spec.center().active())
        .map(|(x, x0)| axis.at(x - x0))
        .product())
}

/// Unit vector in `p` real dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereDirection(Vec<f64>);

impl SphereDirection {
    /// Normalizes `coords`; fails on zero or non-finite input.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidArgument(
                "direction must be a finite nonzero vector".into(),
            ));
        }
        Ok(SphereDirection(coords.into_iter().map(|x| x / norm).collect()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &SphereDirection) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// Von Mises–Fisher density `c_p(kappa) exp(kappa x . x0)` on `S^{p-1}` with
/// respect to surface measure, where
/// `c_p = kappa^{p/2-1} / ((2 pi)^{p/2} I_{p/2-1}(kappa))`.
///
/// At `kappa = 0` the uniform density `Gamma(p/2) / (2 pi^{p/2})` is returned.
pub fn vmf_density(x: &SphereDirection, x0: &SphereDirection, kappa: f64, p: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "sphere dimension p must be >= 2, got {p}"
        )));
    }
    for d in [x, x0] {
        if d.dim() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: d.dim(),
            });
        }
    }
    check_kappa(kappa)?;
    let half_p = 0.5 * p as f64;
    if kappa == 0.0 {
        return Ok((ln_gamma_half_integer(half_p) - (2.0 * PI.powf(half_p)).ln()).exp());
    }
    let nu = half_p - 1.0;
    let ln_c = nu * kappa.ln() - half_p * TAU.ln() - bessel_i_scaled(nu, kappa)?.ln();
    Ok((ln_c + kappa * (x.dot(x0) - 1.0)).exp())
}

/// One von Mises draw in `[-pi, pi)` (Best–Fisher rejection sampler).
pub fn sample_vm<R: Rng + ?Sized>(rng: &mut R, theta0: f64, kappa: f64) -> f64 {
    if kappa < 1e-8 {
        return PI * (2.0 * rng.gen::<f64>() - 1.0);
    }
    let s = if kappa < 1e-5 {
        1.0 / kappa + kappa
    } else {
        let r = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
        let rho = (r - (2.0 * r).sqrt()) / (2.0 * kappa);
        (1.0 + rho * rho) / (2.0 * rho)
    };
    let w = loop {
        let z = (PI * rng.gen::<f64>()).cos();
        let w = (1.0 + s * z) / (s + z);
        let y = kappa * (s - w);
        let v: f64 = rng.gen();
        if y * (2.0 - y) - v >= 0.0 || (y / v).ln() + 1.0 - y >= 0.0 {
            break w;
        }
    };
    let mut angle = w.clamp(-1.0, 1.0).acos();
    if rng.gen::<f64>() < 0.5 {
        angle = -angle;
    }
    let wrapped = (angle + theta0 + PI).rem_euclid(TAU) - PI;
    if wrapped >= PI {
        -PI
    } else {
        wrapped
    }
}

/// Independent von Mises draws in each active coordinate of the tremble.
pub fn sample_torus<R: Rng + ?Sized>(rng: &mut R, spec: &TrembleSpec) -> StrategyParams {
    let center = spec.center().coords();
    let mut raw = [0.0; 3];
    for (k, slot) in raw.iter_mut().enumerate().take(spec.dims().count()) {
        *slot = sample_vm(rng, center[k], spec.kappa());
    }
    StrategyParams::from_coords(spec.dims(), raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // (nu, x, I_nu(x), e^{-x} I_nu(x)) from a 30-digit arbitrary precision evaluation
    #[allow(clippy::excessive_precision)]
    const REFERENCE: &[(f64, f64, f64, f64)] = &[
        (0.0, 1.0, 1.2660658777520083356, 0.4657596075936404365),
        (1.0, 5.0, 24.335642142450527199, 0.16397226694454235693),
        (0.0, 5.0, 27.239871823604446895, 0.18354081260932835307),
        (0.0, 14.9, 308375.57868743919987, 0.10425387282429125373),
        (0.0, 15.0, 339649.37329791387952, 0.10389953144882272143),
        (0.0, 15.1, 374103.41119040898511, 0.10354878120576968607),
        (1.0, 20.0, 42454973.385127770181, 0.087506222183288665356),
        (0.0, 25.0, 5774560606.4663103158, 0.080196773547436708422),
        (2.0, 30.0, 730436828561.38035642, 0.068351524442327456949),
        (0.5, 3.0, 4.6148229034076009479, 0.22975850339753860951),
        (1.5, 40.0, 14476512910296415.316, 0.061501355224241401176),
        (0.0, 100.0, 1.0737517071310738235e42, 0.039944379299096682648),
        (3.0, 7.0, 85.175486842843862844, 0.077669990359315295817),
    ];

    #[test]
    fn bessel_matches_reference_values() {
        for &(nu, x, want, want_scaled) in REFERENCE {
            let got = bessel_i(nu, x).unwrap();
            assert!(
                ((got - want) / want).abs() <= 1e-10,
                "I_{nu}({x}) = {got}, want {want}"
            );
            let got = bessel_i_scaled(nu, x).unwrap();
            assert!(((got - want_scaled) / want_scaled).abs() <= 1e-10);
        }
    }

    #[test]
    fn bessel_at_zero() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bessel_oracle_power_series() {
        // independent direct sum of (x/2)^{2k} / (k!)^2
        let x: f64 = 1.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= (x / 2.0).powi(2) / (k as f64).powi(2);
            sum += term;
        }
        assert!((bessel_i(0.0, x).unwrap() - sum).abs() / sum < 1e-14);
        assert!((sum - 1.2660658777520).abs() < 1e-12);
    }

    #[test]
    fn half_integer_order_closed_form() {
        // I_{1/2}(x) = sqrt(2 / (pi x)) sinh x
        for x in [0.3, 2.0, 14.0, 16.0, 50.0] {
            let want = (2.0 / (PI * x)).sqrt() * x.sinh();
            let got = bessel_i(0.5, x).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn bessel_continuity_at_switch() {
        for nu in [0.0, 1.0, 2.0] {
            let below = bessel_i_scaled(nu, BESSEL_SERIES_LIMIT - 1e-9).unwrap();
            let above = bessel_i_scaled(nu, BESSEL_SERIES_LIMIT).unwrap();
            assert!(((below - above) / above).abs() < 1e-9);
        }
    }

    #[test]
    fn bessel_errors() {
        assert!(matches!(bessel_i(0.0, 800.0), Err(Error::Overflow(_))));
        assert!(bessel_i_scaled(0.0, 800.0).unwrap() > 0.0);
        assert!(bessel_i(0.3, 1.0).is_err());
        assert!(bessel_i(0.0, -1.0).is_err());
    }

    #[test]
    fn normalization_constant() {
        assert!((vm_normalization(0.0).unwrap() - 1.0 / TAU).abs() < 1e-16);
        let want = 1.0 / (TAU * 1.266_065_877_752_008_4);
        assert!((vm_normalization(1.0).unwrap() - want).abs() / want < 1e-12);
        assert!(vm_normalization(-1.0).is_err());
    }

    #[test]
    fn density_at_mode_three_dims() {
        let center = StrategyParams::from_coords(Dims::Three, [0.4, 1.0, 2.0]);
        let spec = TrembleSpec::new(center, 5.0).unwrap();
        let c2 = vm_normalization(5.0).unwrap();
        let want = c2.powi(3) * 15f64.exp();
        let got = torus_vm_density(&center, &spec).unwrap();
        assert!((got - want).abs() / want < 1e-12);
    }

    #[test]
    fn uniform_limit_and_mismatch() {
        let spec = TrembleSpec::new(StrategyParams::defect(Dims::One), 0.0).unwrap();
        let p = StrategyParams::from_coords(Dims::One, [1.234, 0.0, 0.0]);
        assert_eq!(torus_vm_density(&p, &spec).unwrap(), 1.0 / TAU);
        let p2 = StrategyParams::cooperate(Dims::Two);
        assert!(matches!(
            torus_vm_density(&p2, &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vmf_circle_reduces_to_von_mises() {
        let x0 = SphereDirection::new(vec![1.0f64.cos(), 1.0f64.sin()]).unwrap();
        for t in [0.0, 0.5, 2.0, -3.0] {
            let x = SphereDirection::new(vec![f64::cos(t), f64::sin(t)]).unwrap();
            let a = vmf_density(&x, &x0, 2.5, 2).unwrap();
            let b = vm_density(t, 1.0, 2.5).unwrap();
            assert!((a - b).abs() / b < 1e-12);
        }
    }

    #[test]
    fn vmf_uniform_limit_on_two_sphere() {
        let x = SphereDirection::new(vec![0.0, 0.0, 1.0]).unwrap();
        let x0 = SphereDirection::new(vec![1.0, 0.0, 0.0]).unwrap();
        let at_zero = vmf_density(&x, &x0, 0.0, 3).unwrap();
        assert!((at_zero - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let near_zero = vmf_density(&x, &x0, 1e-7, 3).unwrap();
        assert!((near_zero - at_zero).abs() < 1e-8);
        assert!(vmf_density(&x, &x0, 1.0, 4).is_err());
    }

    #[test]
    fn sampler_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kappa in [0.0, 1e-6, 0.5, 5.0, 200.0] {
            for _ in 0..2000 {
                let x = sample_vm(&mut rng, 3.0, kappa);
                assert!((-PI..PI).contains(&x));
            }
        }
    }

    #[test]
    fn torus_sampler_respects_inactive_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = TrembleSpec::new(StrategyParams::defect(Dims::One), 1.0).unwrap();
        for _ in 0..500 {
            let s = sample_torus(&mut rng, &spec);
            assert_eq!(s.alpha(), 0.0);
            assert_eq!(s.beta(), 0.0);
            assert_eq!(s.dims(), Dims::One);
        }
    }
}
