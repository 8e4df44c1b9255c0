//! Trial-level Monte Carlo of incremental relaying and the cut-set bound.
//!
//! One trial is one fading block. The protocol with `K` relays splits the
//! block into `K+1` sub-blocks at rate `(K+1) R`:
//!
//! 1. the source transmits; the destination ACKs if `g_sd >= gamma`;
//! 2. on NACK, relay `k` (if it decoded, `g_sr_k >= gamma`) repeats the
//!    codeword and the destination MRC-combines everything received so far.
//!
//! For `K = 1` this is the two-phase scheme with events
//! `A = {g_sd < gamma}`, `B = {g_sr < gamma}`, `C = {g_sd + g_rd < gamma}`
//! and system outage `A B + A B^c C`.
//!
//! Trials are grouped in blocks of [`TRIALS_PER_BLOCK`]; each block owns its
//! random stream and produces integer tallies that are merged in block
//! order, so estimates do not depend on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::gamma_threshold;
use crate::channel::{
    sample_fading_into, ChannelVariances, FadingSample, RandomStream, TRIALS_PER_BLOCK,
};
use crate::stats::{mean_interval, wilson_interval, Z_95};
use crate::{Error, Result};

/// Expected hit count below which the Wilson interval is flagged.
pub const MIN_RELIABLE_HITS: f64 = 100.0;

/// Result of one single-relay block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Direct link in outage.
    pub event_a: bool,
    /// Source-relay link in outage.
    pub event_b: bool,
    /// MRC sum of direct and relay links in outage.
    pub event_c: bool,
    pub outage: bool,
    /// Sub-blocks occupied by this message.
    pub phases_used: u32,
    /// Bits per channel use over the occupied sub-blocks, 0 on outage.
    pub delivered_rate: f64,
}

/// Two-phase incremental relaying for one block at threshold `gamma`, where
/// `rate` is the end-to-end rate `R`.
#[inline]
pub fn simulate_ir_trial(sample: &FadingSample, gamma: f64, rate: f64) -> TrialOutcome {
    let g_sr = sample.g_sr[0];
    let g_rd = sample.g_rd[0];
    let event_a = sample.g_sd < gamma;
    let event_b = g_sr < gamma;
    let event_c = sample.g_sd + g_rd < gamma;
    debug_assert!(!event_c || event_a, "C must imply A");
    let outage = event_a && (event_b || event_c);
    let phases_used = if event_a { 2 } else { 1 };
    let delivered_rate = match (event_a, outage) {
        (_, true) => 0.0,
        (false, false) => 2.0 * rate,
        (true, false) => rate,
    };
    TrialOutcome {
        event_a,
        event_b,
        event_c,
        outage,
        phases_used,
        delivered_rate,
    }
}

/// Min-cut outage: `min(g_sd + sum g_sr, g_sd + sum g_rd) < gamma`.
#[inline]
pub fn simulate_csb_trial(sample: &FadingSample, gamma: f64) -> bool {
    let bc = sample.g_sd + sample.g_sr.iter().sum::<f64>();
    let mac = sample.g_sd + sample.g_rd.iter().sum::<f64>();
    bc.min(mac) < gamma
}

/// Result of one K-relay block. Bit `k` of a mask refers to relay `k+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KRelayOutcome {
    pub relays: u32,
    /// Bit `k` set when `C_{k+1}` occurred: the source and relays `1..=k`
    /// together leave the destination below threshold, so relay `k+1` is
    /// called on.
    pub shortfall_mask: u32,
    /// Bit `k` set when relay `k+1` decoded the source.
    pub decoded_mask: u32,
    /// Source plus every relay's MRC contribution still below threshold.
    pub combined_shortfall: bool,
    /// Protocol outage: the source and all relays that decoded are not
    /// enough.
    pub outage: bool,
    /// Outage event of the all-relays-decode-or-none simplification:
    /// `A and no relay decodes`, or `every relay decodes and the full MRC sum
    /// falls short`.
    pub bound_outage: bool,
    /// `1 + #{k : C_k}`.
    pub phases_used: u32,
    pub delivered_rate: f64,
}

impl KRelayOutcome {
    pub fn shortfall(&self, k: usize) -> bool {
        self.shortfall_mask >> k & 1 == 1
    }

    pub fn decoded(&self, k: usize) -> bool {
        self.decoded_mask >> k & 1 == 1
    }

    /// The single-relay view, for `K = 1`.
    pub fn as_single(&self) -> Option<TrialOutcome> {
        (self.relays == 1).then(|| TrialOutcome {
            event_a: self.shortfall(0),
            event_b: !self.decoded(0),
            event_c: self.combined_shortfall,
            outage: self.outage,
            phases_used: self.phases_used,
            delivered_rate: self.delivered_rate,
        })
    }
}

/// Successive K-relay incremental relaying at threshold `gamma`
/// (`(2^((K+1)R) - 1) / snr`), end-to-end rate `rate`.
#[inline]
pub fn simulate_k_relay_trial(sample: &FadingSample, gamma: f64, rate: f64) -> KRelayOutcome {
    let relays = sample.g_sr.len();
    let mut shortfall_mask = 0u32;
    let mut decoded_mask = 0u32;
    let mut all_sum = sample.g_sd;
    let mut decoded_sum = sample.g_sd;
    for k in 0..relays {
        if all_sum < gamma {
            shortfall_mask |= 1 << k;
        }
        let g_rd = sample.g_rd[k];
        all_sum += g_rd;
        if sample.g_sr[k] >= gamma {
            decoded_mask |= 1 << k;
            decoded_sum += g_rd;
        }
    }
    let all_decoded = decoded_mask.count_ones() as usize == relays;
    let combined_shortfall = all_sum < gamma;
    let direct_outage = sample.g_sd < gamma;
    let outage = decoded_sum < gamma;
    let bound_outage = (direct_outage && decoded_mask == 0) || (all_decoded && combined_shortfall);
    let phases_used = 1 + shortfall_mask.count_ones();
    let delivered_rate = if outage {
        0.0
    } else {
        (relays + 1) as f64 * rate / phases_used as f64
    };
    KRelayOutcome {
        relays: relays as u32,
        shortfall_mask,
        decoded_mask,
        combined_shortfall,
        outage,
        bound_outage,
        phases_used,
        delivered_rate,
    }
}

/// Which outage event a Monte Carlo run counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Incremental relaying (successive relays for `K > 1`).
    Ir,
    /// BC/MAC min-cut.
    Csb,
    /// The all-relays-decode-or-none bounding event.
    Bound,
}

/// What to simulate.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    variances: ChannelVariances,
    gamma: f64,
    rate: f64,
    protocol: Protocol,
}

impl McConfig {
    /// Threshold from an end-to-end rate and linear SNR.
    pub fn from_rate(
        variances: ChannelVariances,
        rate: f64,
        snr: f64,
        protocol: Protocol,
    ) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::param(
                "rate",
                rate,
                "must be finite and non-negative",
            ));
        }
        if !(snr.is_finite() && snr > 0.0) {
            return Err(Error::param("snr", snr, "must be finite and positive"));
        }
        let phases = variances.relays() as u32 + 1;
        let gamma = gamma_threshold(rate, snr, phases);
        Ok(Self {
            variances,
            gamma,
            rate,
            protocol,
        })
    }

    /// Threshold given directly; the rate is the one it corresponds to at
    /// unit SNR.
    pub fn from_threshold(
        variances: ChannelVariances,
        gamma: f64,
        protocol: Protocol,
    ) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::param(
                "gamma",
                gamma,
                "must be finite and non-negative",
            ));
        }
        let phases = variances.relays() as u32 + 1;
        let rate = crate::analytic::rate_from_threshold(gamma, 1.0, phases);
        Ok(Self {
            variances,
            gamma,
            rate,
            protocol,
        })
    }

    pub fn variances(&self) -> &ChannelVariances {
        &self.variances
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }
}

/// Trial budget, seed and parallelism of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
    /// Dedicated worker count; `None` runs on the ambient rayon pool.
    pub workers: Option<usize>,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    /// Same run with `factor` times as many trials.
    pub fn scaled(self, factor: u64) -> Self {
        Self {
            trials: self.trials.saturating_mul(factor),
            ..self
        }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials", 0.0, "need at least one trial"));
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers", 0.0, "need at least one worker"));
        }
        Ok(())
    }

    /// Runs `block` on every block index and merges results in index order.
    fn run_blocks<T, F>(&self, block: F) -> Result<T>
    where
        T: Send + Default + std::ops::AddAssign,
        F: Fn(u64, u64) -> T + Sync + Send,
    {
        self.check()?;
        let blocks = self.trials.div_ceil(TRIALS_PER_BLOCK);
        let trials = self.trials;
        let work = || {
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let n = TRIALS_PER_BLOCK.min(trials - b * TRIALS_PER_BLOCK);
                    block(b, n)
                })
                .collect::<Vec<T>>()
        };
        let parts = match self.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?
                .install(work),
            None => work(),
        };
        let mut total = T::default();
        for p in parts {
            total += p;
        }
        Ok(total)
    }
}

/// Warnings attached to an estimate rather than raised as errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimateWarning {
    /// Fewer than [`MIN_RELIABLE_HITS`] hits; the interval is unreliable.
    FewHits { hits: u64 },
}

/// Monte Carlo probability estimate with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub hits: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub warning: Option<EstimateWarning>,
}

impl OutageEstimate {
    fn from_counts(hits: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, trials, Z_95);
        let warning = (hits as f64) < MIN_RELIABLE_HITS;
        Self {
            p_hat: hits as f64 / trials as f64,
            hits,
            trials,
            ci_low,
            ci_high,
            seed,
            warning: warning.then_some(EstimateWarning::FewHits { hits }),
        }
    }

    /// Wilson interval at an arbitrary normal quantile.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.hits, self.trials, z)
    }
}

/// Monte Carlo estimate of a mean with a 95% normal interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Everything one pass over the trials yields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub outage: OutageEstimate,
    pub expected_phases: MeanEstimate,
    /// Long-run bits per channel use: successful bits over occupied
    /// sub-blocks, `(K+1) R Pr(success) / E(N)`.
    pub throughput: MeanEstimate,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    outages: u64,
    phases: u64,
    phases_sq: u64,
    /// phases summed over successful trials only
    success_phases: u64,
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Self) {
        self.trials += o.trials;
        self.outages += o.outages;
        self.phases += o.phases;
        self.phases_sq += o.phases_sq;
        self.success_phases += o.success_phases;
    }
}

fn tally_block(config: &McConfig, seed: u64, block: u64, n: u64) -> Tally {
    let v = &config.variances;
    let gamma = config.gamma;
    let mut stream = RandomStream::new(seed, block);
    let mut sample = FadingSample::default();
    let mut t = Tally {
        trials: n,
        ..Tally::default()
    };
    let single = v.relays() == 1;
    for _ in 0..n {
        sample_fading_into(v, &mut stream, &mut sample);
        let (outage, phases) = if single {
            let o = simulate_ir_trial(&sample, gamma, config.rate);
            let counted = match config.protocol {
                Protocol::Ir | Protocol::Bound => o.outage,
                Protocol::Csb => simulate_csb_trial(&sample, gamma),
            };
            (counted, o.phases_used as u64)
        } else {
            let o = simulate_k_relay_trial(&sample, gamma, config.rate);
            let counted = match config.protocol {
                Protocol::Ir => o.outage,
                Protocol::Bound => o.bound_outage,
                Protocol::Csb => simulate_csb_trial(&sample, gamma),
            };
            (counted, o.phases_used as u64)
        };
        t.outages += outage as u64;
        t.phases += phases;
        t.phases_sq += phases * phases;
        if !outage {
            t.success_phases += phases;
        }
    }
    t
}

/// Runs the protocol once and reports outage, mean phases and throughput.
///
/// Phases and throughput always follow the incremental-relaying protocol;
/// `config.protocol` selects only which outage event is counted. For
/// `K = 1` the bounding event coincides with the protocol outage.
pub fn simulate(config: &McConfig, mc: MonteCarlo) -> Result<SimulationSummary> {
    let t = mc.run_blocks(|b, n| tally_block(config, mc.seed, b, n))?;
    let n = t.trials as f64;
    let k1 = (config.variances.relays() + 1) as f64;

    let (mean, lo, hi) = mean_interval(t.phases as f64, t.phases_sq as f64, t.trials, Z_95);
    let expected_phases = MeanEstimate {
        mean,
        ci_low: lo.max(1.0),
        ci_high: hi.min(k1),
        trials: t.trials,
        seed: mc.seed,
    };

    // Ratio estimator X/Y with X = bits per trial, Y = phases per trial;
    // delta-method variance Var(X - rY) / (n Y^2).
    let bits = k1 * config.rate;
    let successes = (t.trials - t.outages) as f64;
    let x_mean = bits * successes / n;
    let y_mean = t.phases as f64 / n;
    let r = x_mean / y_mean;
    let var_x = bits * bits * successes / n - x_mean * x_mean;
    let var_y = t.phases_sq as f64 / n - y_mean * y_mean;
    let cov = bits * t.success_phases as f64 / n - x_mean * y_mean;
    let var_r = ((var_x + r * r * var_y - 2.0 * r * cov) / (n * y_mean * y_mean)).max(0.0);
    let half = Z_95 * var_r.sqrt();
    let throughput = MeanEstimate {
        mean: r,
        ci_low: (r - half).max(0.0),
        ci_high: r + half,
        trials: t.trials,
        seed: mc.seed,
    };

    Ok(SimulationSummary {
        outage: OutageEstimate::from_counts(t.outages, t.trials, mc.seed),
        expected_phases,
        throughput,
    })
}

pub fn estimate_outage(config: &McConfig, mc: MonteCarlo) -> Result<OutageEstimate> {
    Ok(simulate(config, mc)?.outage)
}

pub fn estimate_expected_phases(config: &McConfig, mc: MonteCarlo) -> Result<MeanEstimate> {
    Ok(simulate(config, mc)?.expected_phases)
}

pub fn estimate_throughput(config: &McConfig, mc: MonteCarlo) -> Result<MeanEstimate> {
    Ok(simulate(config, mc)?.throughput)
}

/// Monte Carlo `Pr(sum_k X_k < x)` for independent exponentials with the
/// given means.
pub fn estimate_sum_cdf(means: &[f64], x: f64, mc: MonteCarlo) -> Result<OutageEstimate> {
    if means.is_empty() || means.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::InvalidVariances(
            "need at least one finite positive mean".into(),
        ));
    }
    let hits = mc.run_blocks(|b, n| {
        let mut stream = RandomStream::new(mc.seed, b);
        let mut hits = 0u64;
        for _ in 0..n {
            let s: f64 = means.iter().map(|m| m * stream.exp1()).sum();
            hits += (s < x) as u64;
        }
        hits
    })?;
    Ok(OutageEstimate::from_counts(hits, mc.trials, mc.seed))
}
