//! BER versus Eb/N0 sweeps with per-user statistics.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ml::MlDecoder;
use super::mpa::{MpaConfig, MpaDecoder};
use super::{complex_gaussian, noise_variance, Channel, ChannelSample};
use crate::codebook::{CodebookSet, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::rng;

const BER_STREAM: u64 = 0x0042_4552;

/// Trials simulated between two checks of the stop rule. Fixed, so the
/// stopping point does not depend on the number of workers.
const ROUND_TRIALS: u64 = 4096;
const CHUNK_TRIALS: usize = 128;

pub const EB_DEFINITION: &str = "Eb = 1/log2(M) (average superimposed energy J per transmission \
                                 carries J*log2(M) bits); sigma2 = 1/(log2(M) * 10^(EbN0_dB/10)) \
                                 per complex dimension";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Labeling {
    /// Codeword `m` carries the bits of `m ^ (m >> 1)`.
    #[default]
    Gray,
    Natural,
}

impl Labeling {
    pub fn label(self, m: usize) -> usize {
        match self {
            Labeling::Gray => m ^ (m >> 1),
            Labeling::Natural => m,
        }
    }

    /// Codeword index carrying `bits`.
    pub fn symbol(self, bits: usize) -> usize {
        match self {
            Labeling::Gray => {
                let mut m = bits;
                let mut shift = bits >> 1;
                while shift != 0 {
                    m ^= shift;
                    shift >>= 1;
                }
                m
            }
            Labeling::Natural => bits,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    #[default]
    Mpa,
    Ml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopRule {
    /// Stop a point once this many bit errors are counted.
    pub min_errors: u64,
    /// Hard cap on bits per point.
    pub max_bits: u64,
    /// Require `min_errors` for every user rather than in total.
    pub per_user: bool,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_errors: 200,
            max_bits: 100_000_000,
            per_user: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub channel: Channel,
    pub decoder: Decoder,
    pub mpa: MpaConfig,
    pub ebn0_db: Vec<f64>,
    pub stop: StopRule,
    pub labeling: Labeling,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            channel: Channel::Awgn,
            decoder: Decoder::Mpa,
            mpa: MpaConfig::default(),
            ebn0_db: (0..=12).step_by(2).map(f64::from).collect(),
            stop: StopRule::default(),
            labeling: Labeling::Gray,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return Err(Error::Config("Eb/N0 grid is empty".into()));
        }
        if let Some(bad) = self.ebn0_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("Eb/N0 value {bad} is not finite")));
        }
        if self.stop.min_errors < 1 || self.stop.max_bits < 1 {
            return Err(Error::Config("min_errors and max_bits must be >= 1".into()));
        }
        self.mpa.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserStats {
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub sigma2: f64,
    pub trials: u64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub per_user: Vec<UserStats>,
}

impl BerPoint {
    pub fn user_ber(&self, user: usize) -> f64 {
        self.per_user[user].ber
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
    pub channel: Channel,
    pub decoder: Decoder,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mpa: Option<MpaConfig>,
    pub labeling: Labeling,
    pub stop: StopRule,
    pub seed: u64,
    pub eb_definition: String,
}

impl BerCurve {
    /// `ebn0_db,bits,errors,ber,user1_ber,…,userJ_ber`
    pub fn to_csv(&self) -> String {
        let users = self.points.first().map_or(0, |p| p.per_user.len());
        let mut out = String::from("ebn0_db,bits,errors,ber");
        for j in 1..=users {
            let _ = write!(out, ",user{j}_ber");
        }
        out.push('\n');
        for p in &self.points {
            let _ = write!(out, "{},{},{},{}", p.ebn0_db, p.bits_sent, p.bit_errors, p.ber);
            for u in &p.per_user {
                let _ = write!(out, ",{}", u.ber);
            }
            out.push('\n');
        }
        out
    }
}

enum Engine {
    Mpa(MpaDecoder, MpaConfig),
    Ml(MlDecoder),
}

impl Engine {
    fn decode(&self, y: &[Complex64], h: &[Complex64], sigma2: f64) -> Result<Vec<usize>> {
        match self {
            Engine::Mpa(d, cfg) => Ok(d.decode(y, h, sigma2, cfg)?.decisions),
            Engine::Ml(d) => Ok(d.decode(y, h)),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Counts {
    trials: u64,
    errors: Vec<u64>,
}

impl Counts {
    fn merge(mut self, other: Counts) -> Counts {
        if self.errors.is_empty() {
            return other;
        }
        self.trials += other.trials;
        for (a, b) in self.errors.iter_mut().zip(&other.errors) {
            *a += b;
        }
        self
    }
}

struct Trial<'a> {
    set: &'a CodebookSet,
    engine: &'a Engine,
    channel: Channel,
    labeling: Labeling,
    sigma2: f64,
    seed: u64,
    point: u64,
}

impl Trial<'_> {
    fn run(&self, trial: u64, errors: &mut [u64]) -> Result<()> {
        let dims = self.set.dims();
        let mut rng = rng::stream(self.seed, &[BER_STREAM, self.point, trial]);
        let labels: Vec<usize> = (0..dims.users).map(|_| rng.random_range(0..dims.order)).collect();
        let symbols: Vec<usize> = labels.iter().map(|&b| self.labeling.symbol(b)).collect();
        let ch = ChannelSample::draw(self.channel, dims.resources, self.sigma2, &mut rng);
        let noise = complex_gaussian(dims.resources, self.sigma2, &mut rng);
        let y = super::transmit(self.set, &symbols, &ch, &noise)?;
        let decided = self.engine.decode(&y, &ch.h, self.sigma2)?;
        for (j, (&m, &sent)) in decided.iter().zip(&labels).enumerate() {
            errors[j] += (self.labeling.label(m) ^ sent).count_ones() as u64;
        }
        Ok(())
    }
}

pub fn ber_sweep(set: &CodebookSet, cfg: &SweepConfig) -> Result<BerCurve> {
    ber_sweep_with(set, cfg, Execution::default())
}

/// Simulate every grid point until the stop rule fires. Trial `t` of point
/// `p` uses its own stream keyed on `(seed, p, t)`, and the stop rule is
/// checked after fixed-size rounds, so the curve is independent of `exec`.
pub fn ber_sweep_with(set: &CodebookSet, cfg: &SweepConfig, exec: Execution) -> Result<BerCurve> {
    cfg.validate()?;
    let dims = set.dims();
    let bits_per_user = dims.bits_per_user() as u64;
    let bits_per_trial = bits_per_user * dims.users as u64;
    let engine = match cfg.decoder {
        Decoder::Mpa => Engine::Mpa(MpaDecoder::new(set), cfg.mpa),
        Decoder::Ml => Engine::Ml(MlDecoder::new(set, DEFAULT_ENUMERATION_CAP)?),
    };
    let mut points = Vec::with_capacity(cfg.ebn0_db.len());
    for (p, &ebn0) in cfg.ebn0_db.iter().enumerate() {
        let sigma2 = noise_variance(ebn0, dims.order);
        let trial = Trial {
            set,
            engine: &engine,
            channel: cfg.channel,
            labeling: cfg.labeling,
            sigma2,
            seed: cfg.seed,
            point: p as u64,
        };
        let mut total = Counts {
            trials: 0,
            errors: vec![0; dims.users],
        };
        loop {
            let enough = if cfg.stop.per_user {
                total.errors.iter().all(|&e| e >= cfg.stop.min_errors)
            } else {
                total.errors.iter().sum::<u64>() >= cfg.stop.min_errors
            };
            let sent = total.trials * bits_per_trial;
            if enough || sent >= cfg.stop.max_bits {
                break;
            }
            let remaining = (cfg.stop.max_bits - sent).div_ceil(bits_per_trial);
            let round = ROUND_TRIALS.min(remaining);
            let start = total.trials;
            let counts = exec::map_reduce_chunks(
                exec,
                round as usize,
                CHUNK_TRIALS,
                || Ok(Counts::default()),
                |range| -> Result<Counts> {
                    let mut errors = vec![0; dims.users];
                    let n = range.len() as u64;
                    for t in range {
                        trial.run(start + t as u64, &mut errors)?;
                    }
                    Ok(Counts { trials: n, errors })
                },
                |a: Result<Counts>, b: Result<Counts>| Ok(a?.merge(b?)),
            )?;
            total = total.merge(counts);
        }
        let user_bits = total.trials * bits_per_user;
        let per_user: Vec<UserStats> = total
            .errors
            .iter()
            .map(|&e| UserStats {
                bits: user_bits,
                errors: e,
                ber: ratio(e, user_bits),
            })
            .collect();
        let bits_sent = user_bits * dims.users as u64;
        let bit_errors = total.errors.iter().sum();
        points.push(BerPoint {
            ebn0_db: ebn0,
            sigma2,
            trials: total.trials,
            bits_sent,
            bit_errors,
            ber: ratio(bit_errors, bits_sent),
            per_user,
        });
    }
    Ok(BerCurve {
        points,
        channel: cfg.channel,
        decoder: cfg.decoder,
        mpa: (cfg.decoder == Decoder::Mpa).then_some(cfg.mpa),
        labeling: cfg.labeling,
        stop: cfg.stop,
        seed: cfg.seed,
        eb_definition: EB_DEFINITION.to_string(),
    })
}

fn ratio(errors: u64, bits: u64) -> f64 {
    if bits == 0 {
        0.0
    } else {
        errors as f64 / bits as f64
    }
}
