//! Power-constrained ADC bit allocation.
//!
//! With per-branch signal powers `v_i = sigma_i^2` and the exponential ADC
//! power model `P(b) = c W 2^b`, minimizing the total high-rate MSQE
//! `sum_i v_i 2^(-2 b_i)` subject to `sum_i 2^(b_i) <= N 2^(b_bar)` over real
//! bit vectors has the closed-form optimum
//!
//! ```text
//! b_hat_i = b_bar - log2( (1/N) * sum_j ((1 + SNR_j) / (1 + SNR_i))^(1/3) )
//! ```
//!
//! which always meets the budget with equality. [`allocate_bits`] maps the
//! real solution to non-negative integers: ceil first, then walk back the
//! branches with the cheapest MSQE-per-watt trade-off until the budget holds
//! again. Two independent oracles keep the closed form honest: a bisection
//! solver on the Lagrange multiplier ([`solve_relaxed_numerical`]) and an
//! exhaustive integer search ([`brute_force_allocation`]).

use crate::beamspace::RfSnrProfile;
use crate::quantization::msqe;
use crate::{Error, Result};

/// Tolerance for deciding that a relaxed bit value is an integer.
const INTEGER_TOL: f64 = 1e-9;

/// ADC power model `P(b) = c W 2^b` for `b >= 1`, zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    /// Energy per conversion step, joules.
    conversion_energy: f64,
    /// Sampling rate, hertz.
    sampling_rate: f64,
}

impl PowerModel {
    pub fn new(conversion_energy: f64, sampling_rate: f64) -> Result<Self> {
        if !(conversion_energy > 0.0 && conversion_energy.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "conversion energy must be positive, got {conversion_energy}"
            )));
        }
        if !(sampling_rate > 0.0 && sampling_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sampling rate must be positive, got {sampling_rate}"
            )));
        }
        Ok(Self { conversion_energy, sampling_rate })
    }

    pub fn conversion_energy(&self) -> f64 {
        self.conversion_energy
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    /// `c * W` in watts, the power of a hypothetical 0-bit conversion step.
    pub fn unit_power(&self) -> f64 {
        self.conversion_energy * self.sampling_rate
    }
}

/// Power drawn by one ADC pair at `bits` bits; switched-off ADCs (b <= 0)
/// draw nothing.
pub fn adc_power(model: &PowerModel, bits: i64) -> f64 {
    if bits >= 1 {
        model.unit_power() * (bits as f64).exp2()
    } else {
        0.0
    }
}

/// Total budget of `n` uniform `b_bar`-bit ADC pairs: `N c W 2^(b_bar)`.
pub fn power_budget(model: &PowerModel, n: usize, b_bar: u32) -> Result<f64> {
    if b_bar < 1 {
        return Err(Error::InvalidBudgetBits(b_bar));
    }
    Ok(n as f64 * model.unit_power() * (b_bar as f64).exp2())
}

/// Real-valued optimum of the relaxed MSQE minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedAllocation {
    /// Optimal real bits per branch; may be negative.
    pub b_hat: Vec<f64>,
    /// Active Lagrange multiplier of the power constraint.
    pub mu1: f64,
    /// Budget spent by the relaxed solution, `sum_i 2^(b_hat_i)`, in units of
    /// `c * W` (multiply by [`PowerModel::unit_power`] for watts). Equals
    /// `N 2^(b_bar)` whenever the solver met the budget with equality.
    pub budget_used: f64,
}

fn validated_powers(profile: &RfSnrProfile) -> Result<&[f64]> {
    let v = profile.sigma_sq();
    if v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::InvalidProfile);
    }
    Ok(v)
}

/// Closed-form solution of the relaxed problem.
///
/// The allocated bits grow logarithmically with `(1 + SNR_i)^(1/3)` and the
/// budget constraint is met with equality by construction.
pub fn solve_relaxed(profile: &RfSnrProfile, b_bar: u32) -> Result<RelaxedAllocation> {
    if b_bar < 1 {
        return Err(Error::InvalidBudgetBits(b_bar));
    }
    let v = validated_powers(profile)?;
    let n = v.len() as f64;
    let cbrt_sum: f64 = v.iter().map(|x| x.cbrt()).sum();
    let b_hat: Vec<f64> = v
        .iter()
        .map(|x| b_bar as f64 - (cbrt_sum / (n * x.cbrt())).log2())
        .collect();
    // mu1 = { xbar^(1/2) / N * sum_j (2 v_j)^(1/3) }^3 with xbar = 2^(-2 b_bar)
    let mu1 = {
        let base = (-(b_bar as f64)).exp2() / n * 2.0_f64.cbrt() * cbrt_sum;
        base * base * base
    };
    let budget_used = b_hat.iter().map(|b| b.exp2()).sum();
    Ok(RelaxedAllocation { b_hat, mu1, budget_used })
}

/// Maximum relative residual of the KKT system at the given allocation.
///
/// Checks stationarity `v_i = (1/2) x_i^(-3/2) mu1` with `x_i = 2^(-2
/// b_hat_i)`, primal feasibility of the budget, complementary slackness, and
/// `mu1 >= 0`; all residuals are normalized by the scale of their own
/// equation.
pub fn kkt_verify(relaxed: &RelaxedAllocation, profile: &RfSnrProfile, b_bar: u32) -> f64 {
    let v = profile.sigma_sq();
    let n = v.len() as f64;
    let budget = n * (b_bar as f64).exp2(); // N * xbar^(-1/2)
    let mut residual = 0.0_f64;

    for (b_hat, &vi) in relaxed.b_hat.iter().zip(v) {
        // x^(-3/2) = 2^(3 b_hat)
        let stationarity = vi - 0.5 * (3.0 * b_hat).exp2() * relaxed.mu1;
        residual = residual.max((stationarity / vi).abs());
    }

    let spent: f64 = relaxed.b_hat.iter().map(|b| b.exp2()).sum();
    let h1 = spent - budget;
    residual = residual.max(h1.max(0.0) / budget); // primal feasibility
    residual = residual.max(h1.abs() / budget); // complementary slackness (mu1 > 0)
    if relaxed.mu1 < 0.0 {
        residual = residual.max(1.0);
    }
    residual
}

/// Solves the relaxed problem without the closed form: bisection on the
/// Lagrange multiplier, using only the stationarity relation
/// `x_i = (mu / (2 v_i))^(2/3)` and the budget equality.
pub fn solve_relaxed_numerical(
    profile: &RfSnrProfile,
    b_bar: u32,
    tol: f64,
) -> Result<RelaxedAllocation> {
    if b_bar < 1 {
        return Err(Error::InvalidBudgetBits(b_bar));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let v = validated_powers(profile)?;
    let n = v.len() as f64;
    let target = n * (b_bar as f64).exp2();
    // spent(mu) = sum_i (2 v_i / mu)^(1/3) is strictly decreasing in mu.
    let spent = |mu: f64| -> f64 { v.iter().map(|&x| (2.0 * x / mu).cbrt()).sum() };

    let mut hi = v.iter().cloned().fold(f64::MIN, f64::max) * 2.0;
    // At mu = 2 v_max every term is <= 1, so spent <= N < target.
    let mut lo = hi;
    let mut guard = 0;
    while spent(lo) <= target {
        lo *= 0.5;
        guard += 1;
        if guard > 4000 || lo == 0.0 {
            return Err(Error::BracketFailure);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spent(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= f64::EPSILON * hi {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let residual = (spent(mu) - target).abs() / target;
    if residual > tol {
        return Err(Error::BracketFailure);
    }
    let b_hat: Vec<f64> = v.iter().map(|&x| (2.0 * x / mu).log2() / 3.0).collect();
    let budget_used = b_hat.iter().map(|b| b.exp2()).sum();
    Ok(RelaxedAllocation { b_hat, mu1: mu, budget_used })
}

/// MSQE increase per unit power saved when a non-integer `b_hat > 0` is
/// floored instead of ceiled.
pub fn tradeoff_rel(b_hat: f64, sigma_sq: f64) -> Result<f64> {
    if !(b_hat > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "trade-off needs b_hat > 0, got {b_hat}"
        )));
    }
    if (b_hat - b_hat.round()).abs() <= INTEGER_TOL {
        return Err(Error::IntegerTradeoffPoint(b_hat));
    }
    let floor = b_hat.floor();
    let numerator = (-2.0 * floor).exp2() - (-2.0 * b_hat).exp2();
    let denominator = b_hat.exp2() - floor.exp2();
    Ok(sigma_sq * numerator / denominator)
}

/// Non-negative integer bits per ADC pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BitAllocation {
    pub bits: Vec<u32>,
    /// Actual power drawn, watts.
    pub total_power: f64,
    /// Number of switched-off ADC pairs.
    pub n_inactive: usize,
}

impl BitAllocation {
    /// Wraps an explicit bit vector, computing its power and inactive count.
    pub fn from_bits(bits: Vec<u32>, model: &PowerModel) -> Self {
        let total_power = bits.iter().map(|&b| adc_power(model, b as i64)).sum();
        let n_inactive = bits.iter().filter(|&&b| b == 0).count();
        Self { bits, total_power, n_inactive }
    }

    /// The uniform `b_bar`-bit baseline, which spends the budget exactly.
    pub fn uniform(n: usize, b_bar: u32, model: &PowerModel) -> Result<Self> {
        if b_bar < 1 {
            return Err(Error::InvalidBudgetBits(b_bar));
        }
        Ok(Self::from_bits(vec![b_bar; n], model))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn n_active(&self) -> usize {
        self.bits.len() - self.n_inactive
    }
}

/// Total MSQE of an integer allocation under the 0-bit convention
/// (`D = sigma^2` for switched-off branches).
pub fn total_msqe(allocation: &BitAllocation, profile: &RfSnrProfile) -> f64 {
    assert_eq!(
        allocation.bits.len(),
        profile.len(),
        "allocation and profile lengths differ"
    );
    allocation
        .bits
        .iter()
        .zip(profile.sigma_sq())
        .map(|(&b, &s)| msqe(b, s))
        .sum()
}

/// Near-optimal integer bit allocation under the `N 2^(b_bar)` power budget.
///
/// Computes the relaxed optimum, ceils it into non-negative integers, then
/// while the total power exceeds the budget repeatedly decrements the branch
/// with the smallest relative trade-off (ties to the lowest index). Each
/// branch is decremented at most once; integer relaxed bits and switched-off
/// branches are never touched.
pub fn allocate_bits(
    profile: &RfSnrProfile,
    model: &PowerModel,
    b_bar: u32,
) -> Result<BitAllocation> {
    let relaxed = solve_relaxed(profile, b_bar)?;
    let budget = power_budget(model, profile.len(), b_bar)?;
    let sigma_sq = profile.sigma_sq();

    // accumulation order can differ from the budget product by an ulp, so
    // "over budget" means over by more than a relative epsilon
    let over = |total: f64| total > budget * (1.0 + 1e-12);

    let mut bits = Vec::with_capacity(relaxed.b_hat.len());
    let mut reducible = Vec::new();
    let mut total = 0.0;
    for (i, &b_hat) in relaxed.b_hat.iter().enumerate() {
        let is_integer = (b_hat - b_hat.round()).abs() <= INTEGER_TOL;
        let mapped = if is_integer { b_hat.round() } else { b_hat.ceil() };
        let b = mapped.max(0.0) as u32;
        bits.push(b);
        if b >= 1 {
            total += adc_power(model, b as i64);
            if !is_integer {
                reducible.push(i);
            }
        }
    }

    if over(total) {
        let tradeoffs: Vec<f64> = reducible
            .iter()
            .map(|&i| tradeoff_rel(relaxed.b_hat[i], sigma_sq[i]))
            .collect::<Result<_>>()?;
        let mut in_set = vec![true; reducible.len()];
        let mut remaining = reducible.len();
        while over(total) {
            if remaining == 0 {
                return Err(Error::BudgetUnreachable);
            }
            let mut best: Option<usize> = None;
            for (k, &alive) in in_set.iter().enumerate() {
                if alive && best.is_none_or(|b| tradeoffs[k] < tradeoffs[b]) {
                    best = Some(k);
                }
            }
            let k = best.expect("non-empty reducible set");
            let i = reducible[k];
            total -= adc_power(model, bits[i] as i64);
            bits[i] -= 1;
            total += adc_power(model, bits[i] as i64);
            in_set[k] = false;
            remaining -= 1;
        }
    }

    let allocation = BitAllocation::from_bits(bits, model);
    debug_assert!(allocation.total_power <= budget * (1.0 + 1e-12));
    Ok(allocation)
}

/// Exhaustive search over `{0..=b_max}^N` for the minimum-MSQE feasible
/// allocation; ties break to the lexicographically smallest bit vector.
///
/// Only intended as an optimality oracle for small instances; errors out if
/// `(b_max + 1)^N` exceeds `search_cap`.
pub fn brute_force_allocation(
    profile: &RfSnrProfile,
    model: &PowerModel,
    b_bar: u32,
    b_max: u32,
    search_cap: u128,
) -> Result<BitAllocation> {
    let n = profile.len();
    let v = validated_powers(profile)?;
    let budget = power_budget(model, n, b_bar)?;
    let size = (b_max as u128 + 1)
        .checked_pow(n as u32)
        .ok_or(Error::SearchSpaceTooLarge { size: u128::MAX, cap: search_cap })?;
    if size > search_cap {
        return Err(Error::SearchSpaceTooLarge { size, cap: search_cap });
    }

    let mut candidate = vec![0u32; n];
    let mut best: Option<(f64, Vec<u32>)> = None;
    loop {
        let power: f64 = candidate.iter().map(|&b| adc_power(model, b as i64)).sum();
        // same budget tolerance as the integer mapping, so budget-tight
        // allocations are feasible for both
        if power <= budget * (1.0 + 1e-12) {
            let distortion: f64 = candidate
                .iter()
                .zip(v)
                .map(|(&b, &s)| msqe(b, s))
                .sum();
            if best.as_ref().is_none_or(|(d, _)| distortion < *d) {
                best = Some((distortion, candidate.clone()));
            }
        }
        // lexicographic odometer, most significant digit first
        let mut pos = n;
        loop {
            if pos == 0 {
                let (_, bits) = best.expect("the all-zero allocation is always feasible");
                return Ok(BitAllocation::from_bits(bits, model));
            }
            pos -= 1;
            if candidate[pos] < b_max {
                candidate[pos] += 1;
                for later in candidate.iter_mut().skip(pos + 1) {
                    *later = 0;
                }
                break;
            }
        }
    }
}
