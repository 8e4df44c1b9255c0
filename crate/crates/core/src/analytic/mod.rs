//! Closed-form outage and capacity expressions.
//!
//! Notation: `gamma` is the squared-gain threshold below which a link (or an
//! MRC gain sum) cannot carry the per-sub-block rate, `epsilon` the outage
//! target and `snr` the linear `P/N`. Low-SNR results hold as `gamma -> 0`;
//! each of them reports its operating `gamma` so callers can flag points
//! where the expansion is no longer trustworthy.

pub mod hypoexp;

use std::f64::consts::LN_2;

use crate::channel::{ChannelVariances, VarianceTriplet};
use crate::{Error, Result};

pub use hypoexp::{sum_exp_cdf, sum_two_exp_cdf, sum_two_exp_sf};

/// Operating thresholds at or above this are flagged as outside the
/// low-SNR regime.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

/// `(2^(phases R) - 1) / snr`: gain threshold for carrying rate `rate` over a
/// block split into `phases` equal sub-blocks.
pub fn gamma_threshold(rate: f64, snr: f64, phases: u32) -> f64 {
    (phases as f64 * rate * LN_2).exp_m1() / snr
}

/// Inverse of [`gamma_threshold`] in the rate.
pub fn rate_from_threshold(gamma: f64, snr: f64, phases: u32) -> f64 {
    (gamma * snr).ln_1p() / (phases as f64 * LN_2)
}

/// `lim p_out / gamma^2` for incremental relaying,
/// `(2 s_rd + s_sr) / (2 s_sd s_sr s_rd)`.
pub fn outage_constant_ir(v: VarianceTriplet) -> f64 {
    (2.0 * v.rd() + v.sr()) / (2.0 * v.sd() * v.sr() * v.rd())
}

/// `lim p_out / gamma^2` for the cut-set bound,
/// `(s_rd + s_sr) / (2 s_sd s_sr s_rd)`.
pub fn outage_constant_csb(v: VarianceTriplet) -> f64 {
    (v.rd() + v.sr()) / (2.0 * v.sd() * v.sr() * v.rd())
}

/// Direct-link outage `Pr(|h_sd|^2 < gamma)`.
pub fn direct_outage(gamma: f64, sigma2_sd: f64) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    -(-gamma / sigma2_sd).exp_m1()
}

/// Exact incremental-relaying outage at threshold `gamma`:
/// `Pr(A) Pr(B) + Pr(B^c) Pr(C)` with exponential link gains.
pub fn exact_outage_ir(gamma: f64, v: VarianceTriplet) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    let p_a = direct_outage(gamma, v.sd());
    let p_b = direct_outage(gamma, v.sr());
    let relay_decodes = (-gamma / v.sr()).exp();
    let p = p_a * p_b + relay_decodes * sum_two_exp_cdf(v.sd(), v.rd(), gamma);
    if p <= 0.5 {
        return p;
    }
    // near saturation the success probability carries the precision
    let success =
        relay_decodes * sum_two_exp_sf(v.sd(), v.rd(), gamma) + p_b * (-gamma / v.sd()).exp();
    (1.0 - success).clamp(0.0, 1.0)
}

/// Exact single-relay cut-set outage `Pr(min(BC, MAC) < gamma)`.
///
/// `min(g_sd + g_sr, g_sd + g_rd) = g_sd + min(g_sr, g_rd)` and the minimum of
/// two independent exponentials is exponential with mean
/// `s_sr s_rd / (s_sr + s_rd)`.
pub fn exact_outage_csb(gamma: f64, v: VarianceTriplet) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    let min_mean = v.sr() * v.rd() / (v.sr() + v.rd());
    sum_two_exp_cdf(v.sd(), min_mean, gamma)
}

/// Cut-set outage `Pr(BC-cut < gamma) + Pr(BC-cut >= gamma) Pr(MAC-cut < gamma)`,
/// evaluated as if the two cuts were independent.
///
/// Both cuts share `|h_sd|^2`, so this product form only matches
/// `Pr(min(BC, MAC) < gamma)` at leading order in `gamma`.
pub fn product_outage_csb(gamma: f64, v: VarianceTriplet) -> f64 {
    let bc = sum_two_exp_cdf(v.sd(), v.sr(), gamma);
    let mac = sum_two_exp_cdf(v.sd(), v.rd(), gamma);
    bc + (1.0 - bc) * mac
}

/// A rate produced by a low-SNR formula together with the threshold it
/// operates at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRate {
    /// Bits per channel use.
    pub rate: f64,
    /// Operating squared-gain threshold.
    pub gamma: f64,
}

impl AsymptoticRate {
    pub fn valid(&self) -> bool {
        self.valid_below(DEFAULT_VALIDITY_THRESHOLD)
    }

    pub fn valid_below(&self, threshold: f64) -> bool {
        self.gamma < threshold
    }
}

fn check_point(snr: f64, epsilon: f64) -> Result<()> {
    if !(snr.is_finite() && snr > 0.0) {
        return Err(Error::param("snr", snr, "must be finite and positive"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", epsilon, "must lie in (0, 1)"));
    }
    Ok(())
}

/// Threshold at which `constant * gamma^order = epsilon`.
fn operating_gamma(epsilon: f64, constant: f64, order: u32) -> f64 {
    (epsilon / constant).powf(1.0 / order as f64)
}

/// Low-SNR ε-outage capacity of DF relaying with repetition coding,
/// `(1/2) log2(1 + snr sqrt(epsilon / c_IR))`.
pub fn epsilon_capacity_base(snr: f64, epsilon: f64, v: VarianceTriplet) -> Result<AsymptoticRate> {
    check_point(snr, epsilon)?;
    let gamma = operating_gamma(epsilon, outage_constant_ir(v), 2);
    Ok(AsymptoticRate {
        rate: rate_from_threshold(gamma, snr, 2),
        gamma,
    })
}

/// How the mean number of sub-blocks `E(N)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseCountModel {
    /// `E(N) = 1 + epsilon`.
    #[default]
    Target,
    /// `E(N) = 1 + Pr(A)` with `Pr(A)` evaluated at the operating threshold.
    Exact,
}

/// Mean number of sub-blocks per message at the given operating threshold.
pub fn expected_phases(model: PhaseCountModel, epsilon: f64, gamma: f64, sigma2_sd: f64) -> f64 {
    match model {
        PhaseCountModel::Target => 1.0 + epsilon,
        PhaseCountModel::Exact => 1.0 + direct_outage(gamma, sigma2_sd),
    }
}

/// ε-outage capacity of incremental relaying, `2 C_eps / E(N)`.
pub fn epsilon_capacity_ir(
    snr: f64,
    epsilon: f64,
    v: VarianceTriplet,
    model: PhaseCountModel,
) -> Result<AsymptoticRate> {
    let base = epsilon_capacity_base(snr, epsilon, v)?;
    let phases = expected_phases(model, epsilon, base.gamma, v.sd());
    Ok(AsymptoticRate {
        rate: 2.0 * base.rate / phases,
        gamma: base.gamma,
    })
}

/// Lower bound on the cut-set ε-outage capacity obtained with
/// `E(N) <= 1 + epsilon`:
/// `log2(1 + snr sqrt(epsilon / c_CSB)) / (1 + epsilon)`.
pub fn csb_capacity_bound(snr: f64, epsilon: f64, v: VarianceTriplet) -> Result<AsymptoticRate> {
    check_point(snr, epsilon)?;
    let gamma = operating_gamma(epsilon, outage_constant_csb(v), 2);
    Ok(AsymptoticRate {
        rate: (gamma * snr).ln_1p() / LN_2 / (1.0 + epsilon),
        gamma,
    })
}

/// Upper bound on the IR / cut-set capacity ratio as `gamma -> 0`,
/// `sqrt((s_rd + s_sr) / (2 s_rd + s_sr))`. Always in `[1/sqrt 2, 1]`.
pub fn delta_upper(v: VarianceTriplet) -> f64 {
    ((v.rd() + v.sr()) / (2.0 * v.rd() + v.sr())).sqrt()
}

/// [`delta_upper`] for a collinear relay, written in `(d_sr / d_rd)^alpha`.
pub fn delta_upper_collinear(d_sr: f64, alpha: f64) -> f64 {
    let q = (d_sr / (1.0 - d_sr)).powf(alpha);
    ((q + 1.0) / (2.0 * q + 1.0)).sqrt()
}

/// The same ratio at finite SNR, taking both formulas at `E(N) = 1 + epsilon`
/// and without linearising the logarithm.
pub fn delta_finite(snr: f64, epsilon: f64, v: VarianceTriplet) -> Result<f64> {
    let ir = epsilon_capacity_ir(snr, epsilon, v, PhaseCountModel::Target)?;
    let csb = csb_capacity_bound(snr, epsilon, v)?;
    Ok(ir.rate / csb.rate)
}

/// Placement objective `2 d^alpha + (1 - d)^alpha`; the collinear IR capacity
/// is decreasing in it.
pub fn psi(d_sr: f64, alpha: f64) -> f64 {
    2.0 * d_sr.powf(alpha) + (1.0 - d_sr).powf(alpha)
}

/// `(base + delta)^alpha - base^alpha` without cancellation.
fn pow_increment(base: f64, delta: f64, alpha: f64) -> f64 {
    base.powf(alpha) * (alpha * (delta / base).ln_1p()).exp_m1()
}

/// `psi(a) - psi(b)` for `a, b` in `(0, 1)`, computed from increments so its
/// sign stays correct for points about `1e-15` apart. Plain subtraction of
/// [`psi`] values cannot resolve points closer than about `1e-8` near the
/// minimum.
pub fn psi_difference(a: f64, b: f64, alpha: f64) -> f64 {
    let delta = a - b;
    2.0 * pow_increment(b, delta, alpha) + pow_increment(1.0 - b, -delta, alpha)
}

/// Relay position on the source-destination line that maximises the IR
/// ε-outage capacity, `1 / (1 + 2^(1/(alpha-1)))`.
pub fn optimal_relay_distance(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::param(
            "alpha",
            alpha,
            "path-loss exponent must exceed 1",
        ));
    }
    Ok(1.0 / (1.0 + 2f64.powf(1.0 / (alpha - 1.0))))
}

/// `lim F(x) / x^(K+1)` for the CDF `F` of a sum of `K+1` independent
/// exponentials with the given means: `1 / ((K+1)! prod mean_k)`.
pub fn lemma1_constant(means: &[f64]) -> f64 {
    let n = means.len();
    1.0 / (factorial(n) * means.iter().product::<f64>())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Which side of the true quantity a K-relay expression bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundDirection {
    Upper,
    Lower,
}

/// Lower-bound outage constant of K-relay incremental relaying under the
/// all-relays-decode-or-none simplification:
/// `((K+1)! P_rd + P_sr) / ((K+1)! s_sd P_rd P_sr)`, `P_x` the product of
/// the per-relay variances.
pub fn k_relay_outage_constant_ir(v: &ChannelVariances) -> f64 {
    let f = factorial(v.relays() + 1);
    let p_rd: f64 = v.rd().iter().product();
    let p_sr: f64 = v.sr().iter().product();
    (f * p_rd + p_sr) / (f * v.sd() * p_sr * p_rd)
}

/// Upper-bound outage constant of the K-relay BC/MAC cut-set expression,
/// `(P_rd + P_sr) / ((K+1)! s_sd P_rd P_sr)`.
pub fn k_relay_outage_constant_csb(v: &ChannelVariances) -> f64 {
    let f = factorial(v.relays() + 1);
    let p_rd: f64 = v.rd().iter().product();
    let p_sr: f64 = v.sr().iter().product();
    (p_rd + p_sr) / (f * v.sd() * p_sr * p_rd)
}

/// `E_K(N) = 1 + sum_k Pr(C_k)` where `C_k` is the event that the source and
/// the first `k-1` relays together leave the destination below `gamma`.
pub fn k_relay_expected_phases(gamma: f64, v: &ChannelVariances) -> f64 {
    let mut means = Vec::with_capacity(v.relays());
    means.push(v.sd());
    let mut phases = 1.0;
    for k in 0..v.relays() {
        phases += sum_exp_cdf(&means, gamma);
        means.push(v.rd()[k]);
    }
    phases
}

/// Probability of the K-relay bounding event: either the direct link fails
/// and no relay decodes, or every relay decodes and the full MRC sum is still
/// below `gamma`.
pub fn k_relay_bound_outage(gamma: f64, v: &ChannelVariances) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    let none_decode: f64 = v.sr().iter().map(|&s| direct_outage(gamma, s)).product();
    let all_decode: f64 = v.sr().iter().map(|&s| (-gamma / s).exp()).product();
    let mut means = Vec::with_capacity(v.relays() + 1);
    means.push(v.sd());
    means.extend_from_slice(v.rd());
    (direct_outage(gamma, v.sd()) * none_decode + all_decode * sum_exp_cdf(&means, gamma)).min(1.0)
}

/// A rate bound with its direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBound {
    pub rate: AsymptoticRate,
    pub direction: BoundDirection,
}

/// K-relay ε-outage capacity bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KRelayCapacities {
    /// Incremental relaying, from the lower bound on its outage.
    pub ir: RateBound,
    /// Cut-set bound restricted to the BC and MAC cuts.
    pub csb: RateBound,
    /// `E_K(N)` used for the IR rate.
    pub expected_phases: f64,
}

pub fn k_relay_capacities(
    snr: f64,
    epsilon: f64,
    v: &ChannelVariances,
) -> Result<KRelayCapacities> {
    check_point(snr, epsilon)?;
    let k = v.relays();
    let order = k as u32 + 1;
    let log_rate = |gamma: f64| (gamma * snr).ln_1p() / LN_2;

    let gamma_ir = operating_gamma(epsilon, k_relay_outage_constant_ir(v), order);
    let phases = k_relay_expected_phases(gamma_ir, v);
    let gamma_csb = operating_gamma(epsilon, k_relay_outage_constant_csb(v), order);

    Ok(KRelayCapacities {
        ir: RateBound {
            rate: AsymptoticRate {
                rate: log_rate(gamma_ir) / phases,
                gamma: gamma_ir,
            },
            direction: BoundDirection::Upper,
        },
        csb: RateBound {
            rate: AsymptoticRate {
                rate: log_rate(gamma_csb) / (1.0 + k as f64 * epsilon),
                gamma: gamma_csb,
            },
            direction: BoundDirection::Lower,
        },
        expected_phases: phases,
    })
}
