//! Network geometry, path-loss variances and Rayleigh block fading.
//!
//! Every link gain `h_i` is circularly-symmetric complex Gaussian, so the
//! squared magnitude `|h_i|^2` is exponential with mean `sigma_i^2`. Only the
//! squared magnitudes enter the outage events (coherent MRC), so phases are
//! never drawn.
//!
//! Randomness is organised in fixed blocks of [`TRIALS_PER_BLOCK`] trials.
//! Block `b` owns ChaCha stream `b` under a key derived from the seed, which
//! makes every trial's sample a pure function of `(seed, trial index)` no
//! matter how blocks are distributed over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::{Error, Result};

/// Number of consecutive trials sharing one random stream.
pub const TRIALS_PER_BLOCK: u64 = 1 << 14;

/// Largest relay count handled anywhere in the crate (sums of at most 16
/// exponentials).
pub const MAX_RELAYS: usize = 15;

/// Node placement: source-destination, source-relay and relay-destination
/// distances plus the path-loss exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGeometry {
    d_sd: f64,
    d_sr: Vec<f64>,
    d_rd: Vec<f64>,
    alpha: f64,
}

impl NetworkGeometry {
    /// Single relay on the straight line between source and destination,
    /// distances normalised to `d_sd = 1`.
    pub fn collinear(d_sr: f64, alpha: f64) -> Result<Self> {
        if !(d_sr > 0.0 && d_sr < 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "collinear relay needs 0 < d_sr < 1, got {d_sr}"
            )));
        }
        Self::new(1.0, vec![d_sr], vec![1.0 - d_sr], alpha)
    }

    /// Arbitrary placement of `K = d_sr.len()` relays.
    pub fn new(d_sd: f64, d_sr: Vec<f64>, d_rd: Vec<f64>, alpha: f64) -> Result<Self> {
        if d_sr.is_empty() || d_sr.len() != d_rd.len() {
            return Err(Error::InvalidGeometry(format!(
                "need matching non-empty relay distance lists, got {} source-relay and {} relay-destination",
                d_sr.len(),
                d_rd.len()
            )));
        }
        if d_sr.len() > MAX_RELAYS {
            return Err(Error::InvalidGeometry(format!(
                "at most {MAX_RELAYS} relays supported, got {}",
                d_sr.len()
            )));
        }
        let all = std::iter::once(&d_sd).chain(&d_sr).chain(&d_rd);
        for &d in all {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "distances must be finite and strictly positive, got {d}"
                )));
            }
        }
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "path-loss exponent must exceed 1, got {alpha}"
            )));
        }
        Ok(Self {
            d_sd,
            d_sr,
            d_rd,
            alpha,
        })
    }

    pub fn d_sd(&self) -> f64 {
        self.d_sd
    }

    pub fn d_sr(&self) -> &[f64] {
        &self.d_sr
    }

    pub fn d_rd(&self) -> &[f64] {
        &self.d_rd
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn relays(&self) -> usize {
        self.d_sr.len()
    }

    /// Same geometry with every distance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.d_sd * factor,
            self.d_sr.iter().map(|d| d * factor).collect(),
            self.d_rd.iter().map(|d| d * factor).collect(),
            self.alpha,
        )
    }
}

/// Mean squared channel magnitudes of one source, `K` relays and one
/// destination.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVariances {
    sd: f64,
    sr: Vec<f64>,
    rd: Vec<f64>,
}

fn check_variance(v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidVariances(format!(
            "variances must be finite and strictly positive, got {v}"
        )))
    }
}

impl ChannelVariances {
    pub fn new(sd: f64, sr: Vec<f64>, rd: Vec<f64>) -> Result<Self> {
        if sr.is_empty() || sr.len() != rd.len() {
            return Err(Error::InvalidVariances(format!(
                "need matching non-empty relay variance lists, got {} and {}",
                sr.len(),
                rd.len()
            )));
        }
        if sr.len() > MAX_RELAYS {
            return Err(Error::InvalidVariances(format!(
                "at most {MAX_RELAYS} relays supported, got {}",
                sr.len()
            )));
        }
        check_variance(sd)?;
        for &v in sr.iter().chain(&rd) {
            check_variance(v)?;
        }
        Ok(Self { sd, sr, rd })
    }

    pub fn single(sd: f64, sr: f64, rd: f64) -> Result<Self> {
        Self::new(sd, vec![sr], vec![rd])
    }

    /// `relays` identical relays with the given link variances.
    pub fn uniform(sd: f64, sr: f64, rd: f64, relays: usize) -> Result<Self> {
        Self::new(sd, vec![sr; relays], vec![rd; relays])
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn sr(&self) -> &[f64] {
        &self.sr
    }

    pub fn rd(&self) -> &[f64] {
        &self.rd
    }

    pub fn relays(&self) -> usize {
        self.sr.len()
    }

    /// The single-relay view, if this network has exactly one relay.
    pub fn triplet(&self) -> Result<VarianceTriplet> {
        if self.relays() != 1 {
            return Err(Error::InvalidVariances(format!(
                "single-relay formula applied to {} relays",
                self.relays()
            )));
        }
        Ok(VarianceTriplet {
            sd: self.sd,
            sr: self.sr[0],
            rd: self.rd[0],
        })
    }
}

/// Variances of the three links of the single-relay network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceTriplet {
    sd: f64,
    sr: f64,
    rd: f64,
}

impl VarianceTriplet {
    pub fn new(sd: f64, sr: f64, rd: f64) -> Result<Self> {
        check_variance(sd)?;
        check_variance(sr)?;
        check_variance(rd)?;
        Ok(Self { sd, sr, rd })
    }

    pub fn unit() -> Self {
        Self {
            sd: 1.0,
            sr: 1.0,
            rd: 1.0,
        }
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn sr(&self) -> f64 {
        self.sr
    }

    pub fn rd(&self) -> f64 {
        self.rd
    }
}

impl From<VarianceTriplet> for ChannelVariances {
    fn from(t: VarianceTriplet) -> Self {
        Self {
            sd: t.sd,
            sr: vec![t.sr],
            rd: vec![t.rd],
        }
    }
}

/// Path-loss model: `sigma_i^2 = d_i^-alpha`.
pub fn variances_from_geometry(geometry: &NetworkGeometry) -> Result<ChannelVariances> {
    let alpha = geometry.alpha();
    let map = |d: f64| -> Result<f64> {
        let v = d.powf(-alpha);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidVariances(format!(
                "distance {d} with alpha {alpha} gives non-representable variance {v}"
            )))
        }
    };
    ChannelVariances::new(
        map(geometry.d_sd())?,
        geometry
            .d_sr()
            .iter()
            .map(|&d| map(d))
            .collect::<Result<_>>()?,
        geometry
            .d_rd()
            .iter()
            .map(|&d| map(d))
            .collect::<Result<_>>()?,
    )
}

/// Squared channel magnitudes `|h_i|^2` of one fading block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FadingSample {
    pub g_sd: f64,
    pub g_sr: Vec<f64>,
    pub g_rd: Vec<f64>,
}

impl FadingSample {
    pub fn single(g_sd: f64, g_sr: f64, g_rd: f64) -> Self {
        Self {
            g_sd,
            g_sr: vec![g_sr],
            g_rd: vec![g_rd],
        }
    }
}

/// Deterministic random stream for one block of trials.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Stream owning the block that contains `trial`.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        Self::new(seed, trial / TRIALS_PER_BLOCK)
    }

    /// Unit-mean exponential variate.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        Exp1.sample(&mut self.0)
    }
}

/// Draws one block-fading realisation.
pub fn sample_fading(variances: &ChannelVariances, stream: &mut RandomStream) -> FadingSample {
    let mut sample = FadingSample::default();
    sample_fading_into(variances, stream, &mut sample);
    sample
}

/// Allocation-free variant of [`sample_fading`]; draw order is `sd`, then
/// `(sr_k, rd_k)` for each relay.
#[inline]
pub fn sample_fading_into(
    variances: &ChannelVariances,
    stream: &mut RandomStream,
    out: &mut FadingSample,
) {
    out.g_sd = variances.sd * stream.exp1();
    out.g_sr.clear();
    out.g_rd.clear();
    for (&sr, &rd) in variances.sr.iter().zip(&variances.rd) {
        out.g_sr.push(sr * stream.exp1());
        out.g_rd.push(rd * stream.exp1());
    }
}

/// The sample the simulator uses for trial `trial` under `seed`.
///
/// Replays the trial's block from its start, so this is only meant for
/// spot checks.
pub fn trial_sample(variances: &ChannelVariances, seed: u64, trial: u64) -> FadingSample {
    let mut stream = RandomStream::for_trial(seed, trial);
    let mut sample = FadingSample::default();
    for _ in 0..=(trial % TRIALS_PER_BLOCK) {
        sample_fading_into(variances, &mut stream, &mut sample);
    }
    sample
}
