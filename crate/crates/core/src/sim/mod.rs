//! Monte Carlo versions of the random-coding constructions at desk scale.
//!
//! Every trial draws its randomness from a stream derived from
//! `(seed, trial)`, so results do not depend on the thread schedule.

mod slepian_wolf;
mod theorem2;
mod typical;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use slepian_wolf::simulate_slepianwolf_separation;
pub use theorem2::simulate_theorem2_scheme;
pub use typical::{is_strongly_typical, TypicalityParams};

/// Largest `n * rate` accepted for any codebook, in bits.
pub const MAX_CODEBOOK_BITS: f64 = 24.0;

/// Upper limit on decoder candidates enumerated per receiver and trial.
pub const CANDIDATE_CAP: usize = 1 << 20;

/// Whether codebooks are redrawn every trial or drawn once per seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookMode {
    #[default]
    FreshPerTrial,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodingRule {
    #[default]
    Typicality,
    /// Maximum likelihood with uniform tie breaking. Separation pipeline only.
    MaximumLikelihood,
}

/// How the separation pipeline realizes its random binning and channel code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinningMode {
    /// Exact type counting over all competitors; scales to large `n`.
    #[default]
    Counting,
    /// Every sequence binned and every codeword drawn; small `n` only.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub delta: f64,
    /// Codebook rates in bits per symbol.
    pub rates: [f64; 2],
    pub trials: usize,
    pub seed: u64,
    pub codebook: CodebookMode,
    pub decoding: DecodingRule,
    pub binning: BinningMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 16,
            delta: 0.05,
            rates: [0.0, 0.0],
            trials: 100,
            seed: 0,
            codebook: CodebookMode::FreshPerTrial,
            decoding: DecodingRule::Typicality,
            binning: BinningMode::Counting,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<TypicalityParams> {
        let p = TypicalityParams::new(self.n, self.delta)?;
        if self.trials == 0 {
            return Err(Error::Configuration("at least one trial is required".into()));
        }
        if self.rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Configuration("rates must be finite and nonnegative".into()));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    /// Trials whose source sequence was not typical.
    pub atypical_sources: [u64; 2],
    /// Typical source sequences that found no jointly typical inner codeword.
    pub encoder_fallbacks: [u64; 2],
    /// Decoder saw candidates with different first components.
    pub ambiguities: [u64; 2],
    pub no_candidate: [u64; 2],
    pub channel_errors: u64,
    /// Rate below `I(U_k;W_k|Q)`.
    pub rate_warning: [bool; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub errors: [u64; 2],
    /// Trials in which at least one source was decoded wrongly.
    pub joint_errors: u64,
    pub p_err: f64,
    /// Normal-approximation 95% half-width.
    pub ci_halfwidth: f64,
    pub diagnostics: Diagnostics,
}

impl SimResult {
    fn from_counts(trials: u64, errors: [u64; 2], joint_errors: u64, diagnostics: Diagnostics) -> Self {
        let p = joint_errors as f64 / trials as f64;
        let ci_halfwidth = 1.96 * (p * (1.0 - p) / trials as f64).sqrt();
        Self { trials, errors, joint_errors, p_err: p, ci_halfwidth, diagnostics }
    }
}

/// Codebook size `ceil(2^(n r))`, as a count that may exceed memory.
fn codebook_size(n: usize, rate: f64) -> f64 {
    (2f64.powf(n as f64 * rate) - 1e-9).ceil().max(1.0)
}

/// Codebook size for a codebook that will be materialized.
fn codebook_len(n: usize, rate: f64) -> Result<usize> {
    if n as f64 * rate > MAX_CODEBOOK_BITS + 1e-12 {
        return Err(Error::Size { cells: codebook_size(n, rate) as u128, cap: 1 << MAX_CODEBOOK_BITS as u32 });
    }
    Ok(codebook_size(n, rate) as usize)
}

fn sample<R: Rng + ?Sized>(p: &[f64], r: &mut R) -> usize {
    let mut t: f64 = r.random::<f64>() * p.iter().sum::<f64>();
    for (i, &x) in p.iter().enumerate() {
        if t < x {
            return i;
        }
        t -= x;
    }
    // Rounding left a sliver of mass: fall back to the last positive entry.
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

fn check_alphabet(size: usize, what: &str) -> Result<()> {
    if size > 256 {
        return Err(Error::Configuration(format!("{what} has {size} letters; the simulator stores letters as bytes")));
    }
    Ok(())
}
