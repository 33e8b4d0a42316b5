//! One uplink transmission trial.
//!
//! QPSK symbols pass through the beamspace channel, pick up white noise,
//! get quantized per the configured mode, and are zero-forcing equalized on
//! the AQNM effective channel `W_alpha G` restricted to the active branches.
//! The trial metric is EVM, `100 ||x - x_hat|| / ||x||`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::allocation::{allocate_bits, BitAllocation, PowerModel};
use crate::beamspace::rf_snr_profile;
use crate::channel::ChannelRealization;
use crate::quantization::{
    quantize_aqnm, quantize_codebook, AqnmParams, CodebookBank, QuantizerMode,
};
use crate::{CMatrix, CVector, Error, Result};

/// Receiver scheme under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Unquantized reference receiver.
    Full,
    /// Every ADC pair runs at `b_bar` bits.
    Uniform(u32),
    /// Bit allocation under the `N * P(b_bar)` power budget.
    Ba(u32),
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Full => "full",
            Scheme::Uniform(_) => "uniform",
            Scheme::Ba(_) => "ba",
        }
    }

    /// Budget bits, if the scheme has any.
    pub fn b_bar(&self) -> Option<u32> {
        match self {
            Scheme::Full => None,
            Scheme::Uniform(b) | Scheme::Ba(b) => Some(*b),
        }
    }
}

/// Transmitted and decoded symbols of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub symbols: CVector,
    pub decoded: CVector,
}

impl SymbolFrame {
    /// EVM of the decoded symbols against the transmitted ones.
    pub fn evm_pct(&self) -> Result<f64> {
        evm(&self.symbols, &self.decoded)
    }
}

/// Outcome of one trial for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// EVM in percent; NaN when the trial was infeasible.
    pub evm_pct: f64,
    pub n_active: usize,
    /// ADC power drawn, watts (zero for the unquantized reference).
    pub total_power: f64,
    /// False when fewer active branches than users were left.
    pub feasible: bool,
}

/// Everything a trial needs besides the channel and the scheme.
#[derive(Debug)]
pub struct TrialContext<'a> {
    pub noise_power: f64,
    pub mode: QuantizerMode,
    pub power: PowerModel,
    pub bank: &'a CodebookBank,
}

/// I.i.d. uniform QPSK symbols with unit energy.
pub fn draw_symbols<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CVector {
    CVector::from_fn(m, |_, _| {
        let re = if rng.random::<bool>() { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
        let im = if rng.random::<bool>() { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
        Complex64::new(re, im)
    })
}

/// EVM in percent: `100 ||x - x_hat|| / ||x||`.
pub fn evm(x: &CVector, x_hat: &CVector) -> Result<f64> {
    if x.len() != x_hat.len() {
        return Err(Error::DimensionMismatch(format!(
            "reference {} vs decoded {}",
            x.len(),
            x_hat.len()
        )));
    }
    let reference = x.norm();
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(100.0 * (x - x_hat).norm() / reference)
}

/// Least squares via QR with a rank check on the triangular factor.
fn least_squares(a: &CMatrix, rhs: &CVector) -> Result<CVector> {
    let users = a.ncols();
    let qr = a.clone().qr();
    let r = qr.r();
    let mut max_diag = 0.0_f64;
    let mut min_diag = f64::INFINITY;
    for i in 0..users {
        let d = r[(i, i)].norm();
        max_diag = max_diag.max(d);
        min_diag = min_diag.min(d);
    }
    if !(max_diag > 0.0) || min_diag <= max_diag * 1e-12 {
        return Err(Error::RankDeficient { active: a.nrows(), users });
    }
    let projected = qr.q().ad_mul(&CMatrix::from_columns(std::slice::from_ref(rhs)));
    let solved = r
        .solve_upper_triangular(&projected)
        .ok_or(Error::RankDeficient { active: a.nrows(), users })?;
    Ok(solved.column(0).into_owned())
}

/// Zero-forcing equalization on the active branches.
///
/// Rows with `b_i = 0` carry a known constant zero and are dropped; the
/// remaining rows of `W_alpha G` form the effective channel whose
/// least-squares solution decodes the symbols.
pub fn zf_equalize(
    g: &CMatrix,
    bits: &[u32],
    aqnm: &AqnmParams,
    y_q: &CVector,
) -> Result<CVector> {
    let (n, m) = (g.nrows(), g.ncols());
    if bits.len() != n || aqnm.len() != n || y_q.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "channel has {n} branches, got bits {}, aqnm {}, signal {}",
            bits.len(),
            aqnm.len(),
            y_q.len()
        )));
    }
    let active: Vec<usize> = (0..n).filter(|&i| bits[i] >= 1).collect();
    if active.len() < m {
        return Err(Error::RankDeficient { active: active.len(), users: m });
    }
    let mut effective = CMatrix::zeros(active.len(), m);
    let mut rhs = CVector::zeros(active.len());
    for (row, &i) in active.iter().enumerate() {
        let alpha = aqnm.alpha()[i];
        for c in 0..m {
            effective[(row, c)] = g[(i, c)] * alpha;
        }
        rhs[row] = y_q[i];
    }
    least_squares(&effective, &rhs)
}

/// Runs one trial of the given scheme on a fixed channel.
///
/// Symbols and beamspace noise are drawn first, so trials that share an rng
/// seed see identical `x` and noise across schemes. A rank-deficient
/// equalization marks the trial infeasible instead of failing the run.
pub fn run_trial<R: Rng + ?Sized>(
    ctx: &TrialContext<'_>,
    channel: &ChannelRealization,
    scheme: Scheme,
    rng: &mut R,
) -> Result<TrialResult> {
    let g = &channel.beamspace_matrix;
    let (n, m) = (g.nrows(), g.ncols());
    let profile = rf_snr_profile(g, ctx.noise_power)?;

    let x = draw_symbols(m, rng);
    let comp = (ctx.noise_power / 2.0).sqrt();
    let noise = CVector::from_fn(n, |_, _| {
        Complex64::new(
            comp * crate::standard_normal(rng),
            comp * crate::standard_normal(rng),
        )
    });
    let y = g * &x + noise;

    let (allocation, y_q, aqnm) = match scheme {
        Scheme::Full => {
            // No quantizer in the path; equalize the raw observation.
            return match least_squares(g, &y) {
                Ok(decoded) => {
                    let frame = SymbolFrame { symbols: x, decoded };
                    Ok(TrialResult {
                        evm_pct: frame.evm_pct()?,
                        n_active: n,
                        total_power: 0.0,
                        feasible: true,
                    })
                }
                Err(Error::RankDeficient { .. }) => Ok(TrialResult {
                    evm_pct: f64::NAN,
                    n_active: n,
                    total_power: 0.0,
                    feasible: false,
                }),
                Err(e) => Err(e),
            };
        }
        Scheme::Uniform(b_bar) => {
            let allocation = BitAllocation::uniform(n, b_bar, &ctx.power)?;
            let (y_q, aqnm) = quantize_for_mode(ctx, &y, &allocation, &profile, rng)?;
            (allocation, y_q, aqnm)
        }
        Scheme::Ba(b_bar) => {
            let allocation = allocate_bits(&profile, &ctx.power, b_bar)?;
            let (y_q, aqnm) = quantize_for_mode(ctx, &y, &allocation, &profile, rng)?;
            (allocation, y_q, aqnm)
        }
    };

    match zf_equalize(g, &allocation.bits, &aqnm, &y_q) {
        Ok(decoded) => {
            let frame = SymbolFrame { symbols: x, decoded };
            Ok(TrialResult {
                evm_pct: frame.evm_pct()?,
                n_active: allocation.n_active(),
                total_power: allocation.total_power,
                feasible: true,
            })
        }
        Err(Error::RankDeficient { .. }) => Ok(TrialResult {
            evm_pct: f64::NAN,
            n_active: allocation.n_active(),
            total_power: allocation.total_power,
            feasible: false,
        }),
        Err(e) => Err(e),
    }
}

fn quantize_for_mode<R: Rng + ?Sized>(
    ctx: &TrialContext<'_>,
    y: &CVector,
    allocation: &BitAllocation,
    profile: &crate::beamspace::RfSnrProfile,
    rng: &mut R,
) -> Result<(CVector, AqnmParams)> {
    match ctx.mode {
        QuantizerMode::Codebook => {
            let y_q = quantize_codebook(y, &allocation.bits, profile.sigma_sq(), ctx.bank)?;
            // Equalize against the codebook's actual gains for consistency.
            let aqnm = AqnmParams::from_codebooks(&allocation.bits, ctx.bank)?;
            Ok((y_q, aqnm))
        }
        QuantizerMode::Aqnm => {
            let y_q = quantize_aqnm(y, &allocation.bits, profile, rng)?;
            Ok((y_q, AqnmParams::from_bits(&allocation.bits)))
        }
    }
}
