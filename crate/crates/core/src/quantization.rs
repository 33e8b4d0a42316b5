//! ADC quantization, modeled two ways.
//!
//! The *additive quantization noise model* (AQNM) replaces the quantizer with
//! a linear scaling `alpha_i = 1 - beta_i` plus independent Gaussian noise of
//! variance `alpha_i beta_i sigma_i^2`, where `beta_i = (pi sqrt(3) / 2) *
//! 2^(-2 b_i)` is the normalized distortion of a scalar MMSE quantizer at
//! high rate. The optimizer works entirely in this model.
//!
//! The link simulator can instead run an *actual* scalar MMSE (Lloyd-Max)
//! quantizer designed for the standard normal density, one codebook per bit
//! depth, applied to the real and imaginary parts separately.
//!
//! A 0-bit ADC is switched off: its output is exactly zero and its distortion
//! is the full branch power `sigma^2` (the high-rate formula would exceed
//! `sigma^2` below one bit, which is unphysical).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::beamspace::RfSnrProfile;
use crate::{CVector, Error, Result};

/// Which quantizer the link simulator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerMode {
    /// Linear gain plus Gaussian noise with the analytic covariance.
    Aqnm,
    /// Per-sample Lloyd-Max codebook quantization.
    Codebook,
}

/// `pi * sqrt(3) / 2`, the coefficient of the high-rate MSQE formula.
pub fn high_rate_coeff() -> f64 {
    PI * 3.0_f64.sqrt() / 2.0
}

/// Normalized distortion `beta` of a `b`-bit scalar MMSE quantizer.
///
/// `beta = 1` at `b = 0` (switched off, all signal power lost) and
/// `(pi sqrt(3) / 2) * 2^(-2b)` for `b >= 1`.
pub fn beta(bits: u32) -> f64 {
    if bits == 0 {
        1.0
    } else {
        high_rate_coeff() * 0.25_f64.powi(bits as i32)
    }
}

/// Mean square quantization error of a branch with power `sigma_sq`
/// quantized at `bits` bits per real component.
pub fn msqe(bits: u32, sigma_sq: f64) -> f64 {
    beta(bits) * sigma_sq
}

/// Per-branch AQNM gains: `alpha_i = 1 - beta_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AqnmParams {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl AqnmParams {
    /// Gains from the analytic `beta` formula.
    pub fn from_bits(bits: &[u32]) -> Self {
        let beta: Vec<f64> = bits.iter().map(|&b| beta(b)).collect();
        let alpha = beta.iter().map(|b| 1.0 - b).collect();
        Self { alpha, beta }
    }

    /// Gains from the actual codebook distortions, for consistency with
    /// codebook-mode link simulation. A 0-bit branch keeps `beta = 1`.
    pub fn from_codebooks(bits: &[u32], bank: &CodebookBank) -> Result<Self> {
        let mut beta = Vec::with_capacity(bits.len());
        for &b in bits {
            if b == 0 {
                beta.push(1.0);
            } else {
                beta.push(bank.get(b)?.distortion);
            }
        }
        let alpha = beta.iter().map(|b| 1.0 - b).collect();
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// A scalar MMSE quantizer for the standard normal density.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerCodebook {
    pub bits: u32,
    /// `2^bits - 1` sorted cell boundaries.
    pub thresholds: Vec<f64>,
    /// `2^bits` sorted reconstruction levels.
    pub levels: Vec<f64>,
    /// `E[(X - Q(X))^2]` for `X ~ N(0, 1)`, in closed form over the cells.
    pub distortion: f64,
}

impl QuantizerCodebook {
    /// Nearest-level quantization of a unit-variance sample.
    pub fn quantize(&self, x: f64) -> f64 {
        let idx = self.thresholds.partition_point(|&t| t < x);
        self.levels[idx]
    }
}

fn normal_pdf(x: f64) -> f64 {
    if x.is_finite() {
        (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
    } else {
        0.0
    }
}

fn normal_cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x == f64::INFINITY {
        1.0
    } else {
        0.5 * erfc(-x / 2.0_f64.sqrt())
    }
}

fn x_pdf(x: f64) -> f64 {
    if x.is_finite() {
        x * normal_pdf(x)
    } else {
        0.0
    }
}

fn cell_bounds(thresholds: &[f64], k: usize) -> (f64, f64) {
    let lo = if k == 0 { f64::NEG_INFINITY } else { thresholds[k - 1] };
    let hi = if k == thresholds.len() { f64::INFINITY } else { thresholds[k] };
    (lo, hi)
}

fn midpoints(levels: &[f64]) -> Vec<f64> {
    levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Closed-form `E[(X - Q(X))^2]` for the given levels, per-cell Gaussian
/// integrals.
fn codebook_distortion(levels: &[f64], thresholds: &[f64]) -> f64 {
    let mut total = 0.0;
    for (k, &c) in levels.iter().enumerate() {
        let (lo, hi) = cell_bounds(thresholds, k);
        let i0 = normal_cdf(hi) - normal_cdf(lo);
        let i1 = normal_pdf(lo) - normal_pdf(hi);
        let i2 = (normal_cdf(hi) - x_pdf(hi)) - (normal_cdf(lo) - x_pdf(lo));
        total += i2 - 2.0 * c * i1 + c * c * i0;
    }
    total
}

/// Designs the `bits`-bit MMSE quantizer for the standard normal by Lloyd
/// iteration: thresholds are level midpoints, levels are cell centroids,
/// repeated until the largest level movement drops below `tol`.
///
/// Levels start at the quantiles of the asymptotically optimal point density
/// (a normal with variance 3), which keeps the iteration count manageable at
/// high bit depths. If `max_iter` is exhausted first, the error carries the
/// last iterate.
pub fn lloyd_max_codebook(bits: u32, tol: f64, max_iter: usize) -> Result<QuantizerCodebook> {
    if bits == 0 {
        return Err(Error::InvalidParameter("Lloyd-Max needs bits >= 1".into()));
    }
    if bits > 16 {
        return Err(Error::InvalidParameter(format!("codebook for {bits} bits is unsupported (max 16)")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let count = 1usize << bits;
    let standard = Normal::standard();
    let mut levels: Vec<f64> = (0..count)
        .map(|k| 3.0_f64.sqrt() * standard.inverse_cdf((k as f64 + 0.5) / count as f64))
        .collect();

    let mut last_change = f64::INFINITY;
    for _ in 0..max_iter {
        let thresholds = midpoints(&levels);
        let mut change = 0.0_f64;
        for k in 0..count {
            let (lo, hi) = cell_bounds(&thresholds, k);
            let mass = normal_cdf(hi) - normal_cdf(lo);
            if mass > 0.0 {
                let centroid = (normal_pdf(lo) - normal_pdf(hi)) / mass;
                change = change.max((centroid - levels[k]).abs());
                levels[k] = centroid;
            }
        }
        last_change = change;
        if change < tol {
            let thresholds = midpoints(&levels);
            let distortion = codebook_distortion(&levels, &thresholds);
            return Ok(QuantizerCodebook { bits, thresholds, levels, distortion });
        }
    }

    let thresholds = midpoints(&levels);
    let distortion = codebook_distortion(&levels, &thresholds);
    Err(Error::LloydMaxNoConvergence {
        tol,
        max_iter,
        last_change,
        last_iterate: Box::new(QuantizerCodebook { bits, thresholds, levels, distortion }),
    })
}

/// Lazily built, shareable set of Lloyd-Max codebooks up to `max_bits`.
pub struct CodebookBank {
    max_bits: u32,
    tol: f64,
    max_iter: usize,
    cells: Mutex<HashMap<u32, Arc<QuantizerCodebook>>>,
}

impl CodebookBank {
    pub fn new(max_bits: u32, tol: f64, max_iter: usize) -> Result<Self> {
        if max_bits == 0 || max_bits > 16 {
            return Err(Error::InvalidParameter(format!("bank max_bits {max_bits} outside 1..=16")));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
        Ok(Self { max_bits, tol, max_iter, cells: Mutex::new(HashMap::new()) })
    }

    /// Bank with a tolerance good enough for link simulation. Distortion is
    /// stationary at the Lloyd fixed point, so a 1e-6 level tolerance leaves
    /// distortion errors around 1e-12.
    pub fn with_defaults(max_bits: u32) -> Result<Self> {
        Self::new(max_bits, 1e-6, 100_000)
    }

    pub fn max_bits(&self) -> u32 {
        self.max_bits
    }

    pub fn get(&self, bits: u32) -> Result<Arc<QuantizerCodebook>> {
        if bits == 0 || bits > self.max_bits {
            return Err(Error::MissingCodebook(bits));
        }
        let mut cells = self.cells.lock().expect("codebook bank poisoned");
        if let Some(cb) = cells.get(&bits) {
            return Ok(cb.clone());
        }
        let cb = Arc::new(lloyd_max_codebook(bits, self.tol, self.max_iter)?);
        cells.insert(bits, cb.clone());
        Ok(cb)
    }
}

impl std::fmt::Debug for CodebookBank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CodebookBank")
            .field("max_bits", &self.max_bits)
            .field("tol", &self.tol)
            .finish()
    }
}

/// Quantizes each branch with its allocated codebook.
///
/// Real and imaginary parts are scaled by the per-component deviation
/// `sqrt(sigma_i^2 / 2)` (one ADC per component), quantized with the
/// unit-variance codebook, and rescaled. 0-bit branches output zero.
pub fn quantize_codebook(
    y: &CVector,
    bits: &[u32],
    sigma_sq: &[f64],
    bank: &CodebookBank,
) -> Result<CVector> {
    if y.len() != bits.len() || y.len() != sigma_sq.len() {
        return Err(Error::DimensionMismatch(format!(
            "signal {} vs bits {} vs sigma {}",
            y.len(),
            bits.len(),
            sigma_sq.len()
        )));
    }
    let mut out = CVector::zeros(y.len());
    for i in 0..y.len() {
        if bits[i] == 0 {
            continue;
        }
        if !(sigma_sq[i] > 0.0 && sigma_sq[i].is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "branch {i} has non-positive power {}",
                sigma_sq[i]
            )));
        }
        let cb = bank.get(bits[i])?;
        let s = (sigma_sq[i] / 2.0).sqrt();
        out[i] = Complex64::new(
            cb.quantize(y[i].re / s) * s,
            cb.quantize(y[i].im / s) * s,
        );
    }
    Ok(out)
}

/// Applies the AQNM: `alpha_i * y_i` plus independent complex Gaussian noise
/// of variance `alpha_i beta_i sigma_i^2` per branch. 0-bit branches output
/// zero. Two normal draws are consumed per branch regardless of the bit
/// depth, so the rng stream layout is allocation-independent.
pub fn quantize_aqnm<R: Rng + ?Sized>(
    y: &CVector,
    bits: &[u32],
    profile: &RfSnrProfile,
    rng: &mut R,
) -> Result<CVector> {
    if y.len() != bits.len() || y.len() != profile.len() {
        return Err(Error::DimensionMismatch(format!(
            "signal {} vs bits {} vs profile {}",
            y.len(),
            bits.len(),
            profile.len()
        )));
    }
    let mut out = CVector::zeros(y.len());
    for i in 0..y.len() {
        let b = beta(bits[i]);
        let a = 1.0 - b;
        let s = (a * b * profile.sigma_sq()[i] / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        out[i] = y[i] * a + Complex64::new(s * re, s * im);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent check of a codebook's distortion: per-cell Simpson
    /// quadrature of `(x - Q(x))^2 phi(x)` with finite tail cutoffs.
    fn quadrature_distortion(cb: &QuantizerCodebook) -> f64 {
        let simpson = |c: f64, lo: f64, hi: f64| -> f64 {
            let steps = 400;
            let h = (hi - lo) / steps as f64;
            let f = |x: f64| (x - c) * (x - c) * normal_pdf(x);
            let mut sum = f(lo) + f(hi);
            for s in 1..steps {
                let x = lo + s as f64 * h;
                sum += f(x) * if s % 2 == 1 { 4.0 } else { 2.0 };
            }
            sum * h / 3.0
        };
        let mut total = 0.0;
        for (k, &c) in cb.levels.iter().enumerate() {
            let (lo, hi) = cell_bounds(&cb.thresholds, k);
            total += simpson(c, lo.max(-12.0), hi.min(12.0));
        }
        total
    }

    #[test]
    fn beta_matches_the_high_rate_formula() {
        assert!((beta(1) - 0.6801747615878316).abs() < 1e-14);
        assert!((beta(2) - 0.1700436903969579).abs() < 1e-14);
        assert_eq!(beta(0), 1.0);
        for b in 1..10 {
            let ratio = beta(b + 1) / beta(b);
            assert!((ratio - 0.25).abs() < 1e-14, "beta ratio at b={b} is {ratio}");
        }
    }

    #[test]
    fn msqe_conventions() {
        assert!((msqe(1, 1.0) - 0.6801747615878316).abs() < 1e-12);
        assert_eq!(msqe(0, 3.5), 3.5);
        // linear in sigma^2, quarters per extra bit
        assert!((msqe(3, 2.0) - 2.0 * msqe(3, 1.0)).abs() < 1e-15);
        assert!((msqe(4, 1.0) - msqe(3, 1.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn one_bit_codebook_is_the_closed_form() {
        let cb = lloyd_max_codebook(1, 1e-12, 1000).unwrap();
        let level = (2.0 / PI).sqrt();
        assert!((cb.levels[0] + level).abs() < 1e-10, "levels {:?}", cb.levels);
        assert!((cb.levels[1] - level).abs() < 1e-10);
        assert!((cb.distortion - (1.0 - 2.0 / PI)).abs() < 1e-10);
    }

    #[test]
    fn two_bit_codebook_distortion() {
        let cb = lloyd_max_codebook(2, 1e-12, 10_000).unwrap();
        assert!(
            (cb.distortion - 0.117482).abs() < 1e-4,
            "distortion {}",
            cb.distortion
        );
        let quad = quadrature_distortion(&cb);
        assert!(
            (cb.distortion - quad).abs() < 1e-6,
            "closed form {} vs quadrature {}",
            cb.distortion,
            quad
        );
        // classic 4-level values for the standard normal
        assert!((cb.levels[2] - 0.45278).abs() < 1e-4);
        assert!((cb.levels[3] - 1.51042).abs() < 1e-4);
    }

    #[test]
    fn levels_are_antisymmetric() {
        for bits in [1, 2, 3, 4] {
            let cb = lloyd_max_codebook(bits, 1e-11, 50_000).unwrap();
            let count = cb.levels.len();
            for k in 0..count {
                let mirrored = -cb.levels[count - 1 - k];
                assert!(
                    (cb.levels[k] - mirrored).abs() < 1e-9,
                    "b={bits} level {k}: {} vs {}",
                    cb.levels[k],
                    mirrored
                );
            }
        }
    }

    #[test]
    fn exhausted_iterations_carry_the_last_iterate() {
        let err = lloyd_max_codebook(4, 1e-15, 2).unwrap_err();
        match err {
            Error::LloydMaxNoConvergence { last_iterate, last_change, .. } => {
                assert_eq!(last_iterate.levels.len(), 16);
                assert!(last_change > 1e-15);
                assert!(last_iterate.distortion > 0.0 && last_iterate.distortion < 1.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(lloyd_max_codebook(0, 1e-6, 10).is_err());
        assert!(lloyd_max_codebook(17, 1e-6, 10).is_err());
        assert!(lloyd_max_codebook(3, 0.0, 10).is_err());
    }

    #[test]
    fn distortion_approaches_the_high_rate_formula_from_below() {
        // Documents the AQNM approximation quality. The measured relative
        // gaps (high-rate minus Lloyd-Max, over high-rate) shrink with b:
        // about 18.7% at b=3, 10.6% at b=4, 5.7% at b=5.
        let expected_gaps = [(3, 0.18732), (4, 0.10602), (5, 0.05731)];
        let mut previous = f64::INFINITY;
        for (bits, expected) in expected_gaps {
            let cb = lloyd_max_codebook(bits, 1e-10, 100_000).unwrap();
            let hr = high_rate_coeff() * 0.25_f64.powi(bits as i32);
            let gap = (hr - cb.distortion) / hr;
            assert!(
                (gap - expected).abs() < 1e-3,
                "b={bits} gap {gap} vs recorded {expected}"
            );
            assert!(gap < previous, "gap must shrink with b");
            previous = gap;
        }
        assert!(previous <= 0.10, "b=5 gap {previous} should be within 10%");
    }

    #[test]
    fn inactive_branch_outputs_zero() {
        let bank = CodebookBank::with_defaults(4).unwrap();
        let y = CVector::from_vec(vec![Complex64::new(1.0, -2.0), Complex64::new(0.3, 0.1)]);
        let out = quantize_codebook(&y, &[0, 2], &[4.0, 4.0], &bank).unwrap();
        assert_eq!(out[0], Complex64::new(0.0, 0.0));
        assert!(out[1].norm() > 0.0);
    }

    #[test]
    fn high_rate_codebook_is_nearly_transparent() {
        // 12-bit quantization of components in +-4 sigma keeps the relative
        // error per component under 1e-2, except vanishingly small inputs
        // where relative error is meaningless; the grid stays above 0.1
        // component deviations.
        let cb = lloyd_max_codebook(12, 5e-3, 5_000).unwrap();
        let bank = CodebookBank::new(12, 5e-3, 5_000).unwrap();
        let sigma_sq = 2.0;
        let s = (sigma_sq / 2.0_f64).sqrt();
        let mut worst = 0.0_f64;
        let mut grid = Vec::new();
        let mut v = 0.1;
        while v <= 4.0 {
            grid.push(v * s);
            grid.push(-v * s);
            v += 0.05;
        }
        for &re in &grid {
            for &im in [grid[0], grid[grid.len() / 2], grid[grid.len() - 1]].iter() {
                let y = CVector::from_vec(vec![Complex64::new(re, im)]);
                let out = quantize_codebook(&y, &[12], &[sigma_sq], &bank).unwrap();
                let rel_re = ((out[0].re - re) / re).abs();
                let rel_im = ((out[0].im - im) / im).abs();
                worst = worst.max(rel_re).max(rel_im);
            }
        }
        assert!(worst <= 1e-2, "worst per-component relative error {worst}");
        assert!(cb.distortion < 1e-6);
    }

    #[test]
    fn monte_carlo_msqe_matches_codebook_distortion() {
        let cb = lloyd_max_codebook(3, 1e-10, 50_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let x: f64 = StandardNormal.sample(&mut rng);
            let q = cb.quantize(x);
            acc += (x - q) * (x - q);
        }
        let empirical = acc / draws as f64;
        let rel = (empirical - cb.distortion).abs() / cb.distortion;
        assert!(rel <= 0.05, "empirical {empirical} vs analytic {}", cb.distortion);
    }

    #[test]
    fn aqnm_noise_variance_matches_the_model() {
        let profile = RfSnrProfile::new(vec![0.5, 3.0, 9.0, 0.0], 1.0).unwrap();
        let bits = [1u32, 2, 3, 0];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut acc = [0.0f64; 4];
        for _ in 0..draws {
            let y = CVector::from_fn(4, |i, _| {
                let s = (profile.sigma_sq()[i] / 2.0).sqrt();
                Complex64::new(
                    s * crate::standard_normal(&mut rng),
                    s * crate::standard_normal(&mut rng),
                )
            });
            let out = quantize_aqnm(&y, &bits, &profile, &mut rng).unwrap();
            for i in 0..4 {
                let a = 1.0 - beta(bits[i]);
                let noise = out[i] - y[i] * a;
                acc[i] += noise.norm_sqr();
            }
        }
        for i in 0..4 {
            let var = acc[i] / draws as f64;
            let expect = (1.0 - beta(bits[i])) * beta(bits[i]) * profile.sigma_sq()[i];
            if bits[i] == 0 {
                assert_eq!(var, 0.0, "inactive branch must be exactly zero");
            } else {
                let rel = (var - expect).abs() / expect;
                assert!(rel <= 0.05, "branch {i}: empirical {var} vs model {expect}");
            }
        }
    }

    #[test]
    fn aqnm_limits_to_identity_at_many_bits() {
        let profile = RfSnrProfile::new(vec![4.0, 4.0], 1.0).unwrap();
        let y = CVector::from_vec(vec![Complex64::new(1.2, -0.7), Complex64::new(-0.4, 2.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let out = quantize_aqnm(&y, &[15, 15], &profile, &mut rng).unwrap();
        for i in 0..2 {
            let rel = (out[i] - y[i]).norm() / y[i].norm();
            assert!(rel <= 1e-3, "branch {i} relative deviation {rel}");
        }
    }

    #[test]
    fn aqnm_is_mean_preserving_up_to_alpha() {
        let profile = RfSnrProfile::new(vec![2.0], 1.0).unwrap();
        let y = CVector::from_vec(vec![Complex64::new(0.9, -0.3)]);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let draws = 50_000;
        let mut mean = Complex64::new(0.0, 0.0);
        for _ in 0..draws {
            mean += quantize_aqnm(&y, &[2], &profile, &mut rng).unwrap()[0];
        }
        mean /= Complex64::new(draws as f64, 0.0);
        let a = 1.0 - beta(2);
        let expect = y[0] * a;
        // three standard errors of the per-component mean
        let var = a * beta(2) * profile.sigma_sq()[0] / 2.0;
        let tol = 3.0 * (var / draws as f64).sqrt();
        assert!((mean.re - expect.re).abs() <= tol, "re {} vs {}", mean.re, expect.re);
        assert!((mean.im - expect.im).abs() <= tol, "im {} vs {}", mean.im, expect.im);
    }

    #[test]
    fn aqnm_params_from_both_routes() {
        let bank = CodebookBank::with_defaults(4).unwrap();
        let analytic = AqnmParams::from_bits(&[0, 1, 3]);
        let measured = AqnmParams::from_codebooks(&[0, 1, 3], &bank).unwrap();
        for i in 0..3 {
            assert_eq!(analytic.alpha()[i] + analytic.beta()[i], 1.0);
            assert_eq!(measured.alpha()[i] + measured.beta()[i], 1.0);
        }
        assert_eq!(measured.beta()[0], 1.0);
        // codebook distortion sits below the high-rate formula
        assert!(measured.beta()[1] < analytic.beta()[1]);
    }

    #[test]
    fn missing_codebook_is_an_error() {
        let bank = CodebookBank::with_defaults(2).unwrap();
        let y = CVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
        let err = quantize_codebook(&y, &[5], &[1.0], &bank).unwrap_err();
        assert!(matches!(err, Error::MissingCodebook(5)));
    }

    #[test]
    fn codebook_quantization_is_deterministic() {
        let bank = CodebookBank::with_defaults(6).unwrap();
        let y = CVector::from_vec(vec![Complex64::new(0.33, -1.9), Complex64::new(-2.4, 0.05)]);
        let a = quantize_codebook(&y, &[3, 6], &[1.5, 2.5], &bank).unwrap();
        let b = quantize_codebook(&y, &[3, 6], &[1.5, 2.5], &bank).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn codebook_quantizer_is_odd(x in -6.0f64..6.0, bits in 1u32..6) {
            let cb = lloyd_max_codebook(bits, 1e-10, 50_000).unwrap();
            let q = cb.quantize(x);
            let q_neg = cb.quantize(-x);
            prop_assert!((q + q_neg).abs() <= 1e-9 * q.abs().max(1.0));
        }
    }
}
