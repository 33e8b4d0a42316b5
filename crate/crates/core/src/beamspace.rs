//! Beamspace projection through the unitary DFT beamforming matrix.
//!
//! The analog beamformer is the full `N x N` DFT steering matrix `A` whose
//! column `i` is the array response at grid spatial frequency `i / N`.
//! Projecting a received vector (or a channel matrix) means multiplying by
//! `A^H`; since `A` is unitary the projected thermal noise stays white.

use crate::channel::steering;
use crate::{CMatrix, Error, Result};

/// The DFT beamforming matrix for an `N`-antenna array.
#[derive(Debug, Clone, PartialEq)]
pub struct DftMatrix {
    n: usize,
    matrix: CMatrix,
}

impl DftMatrix {
    /// Entry `(k, i)` is `exp(-j 2 pi (i / N) k) / sqrt(N)`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "DFT matrix needs n >= 1");
        let mut matrix = CMatrix::zeros(n, n);
        for i in 0..n {
            matrix.set_column(i, &steering(n, i as f64 / n as f64));
        }
        Self { n, matrix }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Applies `A^H` to a vector or matrix with `N` rows.
    pub fn project(&self, input: &CMatrix) -> Result<CMatrix> {
        if input.nrows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "cannot project {} rows through a {0}x{0} beamformer",
                input.nrows()
            )));
        }
        Ok(self.matrix.ad_mul(input))
    }
}

/// Per-branch second-order statistics of the beamspace signal.
///
/// Branch `i` of `y = G x + n` is approximately complex Gaussian with
/// variance `sigma_i^2 = ||G_{i,:}||^2 + N0`, and its RF-side SNR is
/// `||G_{i,:}||^2 / N0`. These feed both the quantizer scaling and the bit
/// allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RfSnrProfile {
    snr_rf: Vec<f64>,
    sigma_sq: Vec<f64>,
    noise_power: f64,
}

impl RfSnrProfile {
    /// Builds a profile from per-branch SNRs and the noise power.
    pub fn new(snr_rf: Vec<f64>, noise_power: f64) -> Result<Self> {
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(Error::InvalidNoisePower(noise_power));
        }
        if snr_rf.is_empty() {
            return Err(Error::InvalidProfile);
        }
        if snr_rf.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidProfile);
        }
        let sigma_sq = snr_rf.iter().map(|s| noise_power * (1.0 + s)).collect();
        Ok(Self { snr_rf, sigma_sq, noise_power })
    }

    pub fn len(&self) -> usize {
        self.snr_rf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr_rf.is_empty()
    }

    pub fn snr_rf(&self) -> &[f64] {
        &self.snr_rf
    }

    /// `sigma_i^2 = N0 (1 + SNR_i)`, the total per-branch signal power.
    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }
}

/// Per-branch statistics of the beamspace channel `G` under noise power `N0`.
pub fn rf_snr_profile(g: &CMatrix, noise_power: f64) -> Result<RfSnrProfile> {
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(Error::InvalidNoisePower(noise_power));
    }
    let snr = (0..g.nrows())
        .map(|i| g.row(i).norm_squared() / noise_power)
        .collect();
    RfSnrProfile::new(snr, noise_power)
}
