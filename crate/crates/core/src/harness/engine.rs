//! Monte Carlo BER estimation.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ChannelConfig, CodebookConfig, NvSource, ReceiverKind, ScenarioConfig, ShapingKind};
use crate::channel::{
    build_covariance, transmit_awgn_into, transmit_simo_into, ChannelSampler, FadingCovariance, ReceivedSignal,
    ResourceGrid, SimoScratch,
};
use crate::codec::{load_codebook, Codebook, PowerShaping, ShapingScheme};
use crate::prior::{bit, CodewordPrior, MarkovPrior, MessageSampler};
use crate::receiver::{
    estimate_nv, AwgnReceiver, BitDecision, BitDecoder, ChannelEstimator, CoherentReceiver, CorrelatorReceiver,
    DecoderScratch, FadingLoglik, FadingScratch, LowComplexityReceiver, NoncoherentReceiver,
};
use crate::rng::{stream, SimRng};
use crate::{Error, Result};

/// 95% two-sided normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Error and exposure counters for one SNR point. Addition is commutative,
/// so the reduction order over workers does not matter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub ack_errors: u64,
    pub ack_bits: u64,
    pub nack_errors: u64,
    pub nack_bits: u64,
    pub trials: u64,
}

impl Counts {
    pub fn merge(mut self, o: Counts) -> Counts {
        self.ack_errors += o.ack_errors;
        self.ack_bits += o.ack_bits;
        self.nack_errors += o.nack_errors;
        self.nack_bits += o.nack_bits;
        self.trials += o.trials;
        self
    }

    /// Per-bit accounting of one trial.
    pub fn record(&mut self, sent: usize, decided: &[u8]) {
        let k = decided.len();
        for (i, &d) in decided.iter().enumerate() {
            if bit(sent, i, k) == 1 {
                self.ack_bits += 1;
                self.ack_errors += u64::from(d == 0);
            } else {
                self.nack_bits += 1;
                self.nack_errors += u64::from(d == 1);
            }
        }
        self.trials += 1;
    }
}

/// BER estimate with a normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub ber: f64,
    /// 95% half-width.
    pub ci: f64,
    /// No bits of this class were sent; the estimate is uninformative.
    pub zero_exposure: bool,
}

impl RateEstimate {
    pub fn new(errors: u64, exposure: u64) -> Self {
        if exposure == 0 {
            return Self {
                ber: 0.5,
                ci: 0.5,
                zero_exposure: true,
            };
        }
        let p = errors as f64 / exposure as f64;
        Self {
            ber: p,
            ci: Z95 * (p * (1.0 - p) / exposure as f64).sqrt(),
            zero_exposure: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub counts: Counts,
}

impl BerPoint {
    pub fn ack(&self) -> RateEstimate {
        RateEstimate::new(self.counts.ack_errors, self.counts.ack_bits)
    }

    pub fn nack(&self) -> RateEstimate {
        RateEstimate::new(self.counts.nack_errors, self.counts.nack_bits)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BerCurve {
    pub name: String,
    pub points: Vec<BerPoint>,
}

/// One simulated transmission and decision.
pub trait TrialRunner: Sync {
    type Scratch: Default + Send;

    fn k(&self) -> usize;

    /// Draws a message, transmits and decodes it. Returns the sent index;
    /// the decision is left in `decided`.
    fn run_trial(&self, rng: &mut SimRng, scratch: &mut Self::Scratch, decided: &mut BitDecision) -> usize;
}

/// Stopping rule for one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub min_errors: u64,
    pub max_trials: u64,
    pub fixed_trials: Option<u64>,
    pub chunk_trials: u64,
}

impl From<super::config::BudgetConfig> for Budget {
    fn from(b: super::config::BudgetConfig) -> Self {
        Self {
            min_errors: b.min_errors,
            max_trials: b.max_trials,
            fixed_trials: b.fixed_trials,
            chunk_trials: b.chunk_trials,
        }
    }
}

/// Chunks in round `r`: 1, 2, 4, ... up to 64. The schedule is fixed, so
/// totals depend only on the seed.
fn round_chunks(r: u32) -> u64 {
    1u64 << r.min(6)
}

fn run_chunk<T: TrialRunner>(runner: &T, seed: u64, label: u64, chunk: u64, trials: u64) -> Counts {
    let mut rng = stream(seed, label, chunk);
    let mut scratch = T::Scratch::default();
    let mut decided = BitDecision::default();
    let mut counts = Counts::default();
    for _ in 0..trials {
        let sent = runner.run_trial(&mut rng, &mut scratch, &mut decided);
        counts.record(sent, &decided.bits);
    }
    counts
}

/// Runs trials in chunks until both classes have `min_errors` errors or
/// the trial cap is reached. Chunk `c` always uses stream `(seed, label, c)`.
pub fn estimate_counts<T: TrialRunner>(runner: &T, budget: &Budget, seed: u64, label: u64) -> Counts {
    let chunk = budget.chunk_trials.max(1);
    let cap = budget.fixed_trials.unwrap_or(budget.max_trials);
    let mut total = Counts::default();
    let mut next_chunk = 0u64;
    let mut round = 0;
    loop {
        let done = total.trials;
        if done >= cap {
            break;
        }
        if budget.fixed_trials.is_none()
            && total.ack_errors.min(total.nack_errors) >= budget.min_errors
        {
            break;
        }
        let remaining = cap - done;
        let n_chunks = round_chunks(round).min(remaining.div_ceil(chunk));
        let sizes: Vec<(u64, u64)> = (0..n_chunks)
            .map(|i| {
                let before = i * chunk;
                (next_chunk + i, chunk.min(remaining - before))
            })
            .collect();
        let counts = sizes
            .par_iter()
            .map(|&(c, t)| run_chunk(runner, seed, label, c, t))
            .reduce(Counts::default, Counts::merge);
        total = total.merge(counts);
        next_chunk += n_chunks;
        round += 1;
    }
    total
}

/// Everything a scenario needs that does not depend on the SNR.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub prior: MarkovPrior,
    pub pi: CodewordPrior,
    pub codebook: Codebook,
    pub shaping: PowerShaping,
    pub decoder: BitDecoder,
    sampler: MessageSampler,
    fading: Option<FadingSetup>,
}

struct FadingSetup {
    n_r: usize,
    epsilon: f64,
    n_pilot: usize,
    channel: ChannelSampler,
    /// Covariance assumed by the receiver.
    model: FadingCovariance,
}

fn uncoded_codebook(k: usize) -> Result<Codebook> {
    let rows: Vec<Vec<f64>> = (0..1usize << k)
        .map(|m| (0..k).flat_map(|i| [if bit(m, i, k) == 1 { 1.0 } else { -1.0 }, 0.0]).collect())
        .collect();
    Codebook::from_real_rows(k, 2 * k, 1, false, &rows)
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let pc = config.prior;
        let prior = MarkovPrior::new(pc.p, pc.rho, pc.k)?;
        let pi = prior.codeword_prior();
        let codebook = match &config.codebook {
            CodebookConfig::Nr { n } => Codebook::nr_baseline(pc.k, *n)?,
            CodebookConfig::File { path } => load_codebook(config.base_dir.join(path))?,
            CodebookConfig::Uncoded => uncoded_codebook(pc.k)?,
        };
        if codebook.k() != pc.k {
            return Err(Error::Config(format!("codebook has k = {} but the prior has k = {}", codebook.k(), pc.k)));
        }
        let scheme = match &config.shaping.scheme {
            ShapingKind::Uniform => ShapingScheme::Uniform,
            ShapingKind::Entropy { floor } => ShapingScheme::Entropy { floor: *floor },
            ShapingKind::Arithmetic { family, floor } => ShapingScheme::Arithmetic {
                family: family
                    .iter()
                    .map(|f| MarkovPrior::new(f.p, f.rho, f.k).map(|p| p.codeword_prior()))
                    .collect::<Result<_>>()?,
                floor: *floor,
            },
            ShapingKind::Step { delta_db } => ShapingScheme::Step { delta_db: *delta_db },
            ShapingKind::Learnt => ShapingScheme::Explicit(
                codebook
                    .learnt_alpha()
                    .ok_or_else(|| Error::Config("learnt shaping needs a codebook file with alpha".into()))?
                    .to_vec(),
            ),
            ShapingKind::Explicit { alpha } => ShapingScheme::Explicit(alpha.clone()),
        };
        let shaping = PowerShaping::new(&scheme, &pi, config.shaping.pilot_mode)?;
        let decoder = BitDecoder::new(&config.decoder.resolved()?, &prior)?;
        let fading = match &config.channel {
            ChannelConfig::Awgn => None,
            ChannelConfig::Fading {
                n_r,
                subcarrier_spacing_khz,
                epsilon,
                ..
            } => {
                let grid = ResourceGrid::pucch_f2();
                let scs = subcarrier_spacing_khz * 1e3;
                let pdp = config.channel.pdp(&config.base_dir)?.expect("fading channel has a profile");
                let truth = build_covariance(&pdp, scs, &grid)?;
                if codebook.len_symbols() != truth.n_data() {
                    return Err(Error::Config(format!(
                        "codeword length {} does not fill the {} data REs",
                        codebook.len_symbols(),
                        truth.n_data()
                    )));
                }
                Some(FadingSetup {
                    n_r: *n_r,
                    epsilon: *epsilon,
                    n_pilot: truth.n_pilot(),
                    channel: ChannelSampler::new(&truth)?,
                    model: config.chest.model_covariance(&truth, &grid, scs)?,
                })
            }
        };
        Ok(Self {
            sampler: MessageSampler::new(&pi)?,
            config,
            prior,
            pi,
            codebook,
            shaping,
            decoder,
            fading,
        })
    }

    pub fn k(&self) -> usize {
        self.prior.k()
    }

    /// Simulates one SNR point. `label` keys the random streams.
    pub fn estimate_ber(&self, snr_db: f64, label: u64) -> Result<BerPoint> {
        let budget = Budget::from(self.config.budget);
        let seed = self.config.seed;
        let counts = match &self.fading {
            None => estimate_counts(&AwgnPoint::new(self, snr_db)?, &budget, seed, label),
            Some(f) => estimate_counts(&FadingPoint::new(self, f, snr_db)?, &budget, seed, label),
        };
        Ok(BerPoint { snr_db, counts })
    }

    /// Ascending sweep; with `early_stop`, ends at the first point where
    /// both targets are met.
    pub fn run_sweep(&self) -> Result<BerCurve> {
        let t = self.config.targets;
        let mut curve = BerCurve {
            name: self.config.name.clone(),
            points: Vec::new(),
        };
        for (i, snr) in self.config.sweep.points()?.into_iter().enumerate() {
            let point = self.estimate_ber(snr, i as u64)?;
            curve.points.push(point);
            if self.config.sweep.early_stop && point.ack().ber <= t.ber_ack && point.nack().ber <= t.ber_nack {
                break;
            }
        }
        Ok(curve)
    }
}

fn snr_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

struct AwgnPoint<'a> {
    scenario: &'a Scenario,
    receiver: AwgnReceiver,
    g: f64,
}

impl<'a> AwgnPoint<'a> {
    fn new(scenario: &'a Scenario, snr_db: f64) -> Result<Self> {
        let g = snr_linear(snr_db).sqrt();
        Ok(Self {
            receiver: AwgnReceiver::new(&scenario.codebook, scenario.shaping.alphas(), g, 1.0)?,
            scenario,
            g,
        })
    }
}

#[derive(Default)]
struct AwgnScratch {
    y: Vec<Complex64>,
    loglik: Vec<f64>,
    decoder: DecoderScratch,
}

impl TrialRunner for AwgnPoint<'_> {
    type Scratch = AwgnScratch;

    fn k(&self) -> usize {
        self.scenario.k()
    }

    fn run_trial(&self, rng: &mut SimRng, s: &mut AwgnScratch, decided: &mut BitDecision) -> usize {
        let sc = self.scenario;
        let m = sc.sampler.sample(rng);
        transmit_awgn_into(sc.codebook.codeword(m), sc.shaping.alpha(m), self.g, 1.0, rng, &mut s.y);
        s.loglik.resize(self.receiver.num_hypotheses(), 0.0);
        self.receiver.loglik_into(&s.y, &mut s.loglik);
        sc.decoder.decode_into(&s.loglik, 1, &mut s.decoder, decided);
        m
    }
}

enum FadingDecision {
    Likelihood(Box<dyn FadingLoglik>),
    Correlator(CorrelatorReceiver),
}

struct FadingPoint<'a> {
    scenario: &'a Scenario,
    setup: &'a FadingSetup,
    decision: FadingDecision,
    /// For NV estimation, at the largest hypothesized pilot power.
    estimator: ChannelEstimator,
    g: f64,
    nv_source: NvSource,
    /// Known pilot symbols; the estimate already carries the pilot amplitude.
    pilots: Vec<Complex64>,
}

impl<'a> FadingPoint<'a> {
    fn new(scenario: &'a Scenario, setup: &'a FadingSetup, snr_db: f64) -> Result<Self> {
        let rc = scenario.config.receiver;
        let snr = snr_linear(snr_db);
        let snr_rx = rc.nominal_snr_db.map(snr_linear).unwrap_or(snr);
        let (cb, ps, model) = (&scenario.codebook, &scenario.shaping, &setup.model);
        let estimator = ChannelEstimator::new(model, snr_rx, ps.max_pilot_power())?;
        let decision = match rc.kind {
            ReceiverKind::Noncoherent => FadingDecision::Likelihood(Box::new(NoncoherentReceiver::new(cb, ps, model, snr_rx)?)),
            ReceiverKind::Coherent => {
                FadingDecision::Likelihood(Box::new(CoherentReceiver::new(cb, ps, model, snr_rx, rc.include_pilot_term)?))
            }
            ReceiverKind::LowComplexity => {
                FadingDecision::Likelihood(Box::new(LowComplexityReceiver::new(cb, ps, estimator.clone(), snr_rx)?))
            }
            ReceiverKind::Correlator => FadingDecision::Correlator(CorrelatorReceiver::new(estimator.clone())),
        };
        Ok(Self {
            scenario,
            setup,
            decision,
            estimator,
            g: snr.sqrt(),
            nv_source: rc.nv,
            pilots: vec![Complex64::from(1.0); setup.n_pilot],
        })
    }

    fn nv(&self, y: &ReceivedSignal, hp: &mut Vec<Complex64>, hd: &mut Vec<Complex64>) -> f64 {
        match self.nv_source {
            NvSource::Genie => y.nv,
            NvSource::Estimated => {
                let n_r = y.n_r();
                let mut total = 0.0;
                for l in 0..n_r {
                    self.estimator.estimate_into(y.pilots(l), hp, hd);
                    total += estimate_nv(&[y.pilots(l)], &[hp], &self.pilots);
                }
                (total / n_r as f64).max(f64::MIN_POSITIVE)
            }
        }
    }
}

struct FadingTrialScratch {
    y: ReceivedSignal,
    simo: SimoScratch,
    fading: FadingScratch,
    loglik: Vec<f64>,
    decoder: DecoderScratch,
    hp: Vec<Complex64>,
    hd: Vec<Complex64>,
}

impl Default for FadingTrialScratch {
    fn default() -> Self {
        Self {
            y: ReceivedSignal::empty(1, 0),
            simo: SimoScratch::default(),
            fading: FadingScratch::default(),
            loglik: Vec::new(),
            decoder: DecoderScratch::default(),
            hp: Vec::new(),
            hd: Vec::new(),
        }
    }
}

impl TrialRunner for FadingPoint<'_> {
    type Scratch = FadingTrialScratch;

    fn k(&self) -> usize {
        self.scenario.k()
    }

    fn run_trial(&self, rng: &mut SimRng, s: &mut FadingTrialScratch, decided: &mut BitDecision) -> usize {
        let sc = self.scenario;
        let st = self.setup;
        let m = sc.sampler.sample(rng);
        let hyp = sc.shaping.hypothesis(sc.codebook.codeword(m), m);
        transmit_simo_into(&hyp, st.n_pilot, &st.channel, st.n_r, self.g, 1.0, st.epsilon, rng, &mut s.simo, &mut s.y);
        match &self.decision {
            FadingDecision::Correlator(c) => {
                let best = c.decode(&sc.codebook, &s.y, &mut s.fading);
                let k = sc.k();
                decided.bits.clear();
                decided.llr.clear();
                decided.bits.extend((0..k).map(|i| bit(best, i, k)));
            }
            FadingDecision::Likelihood(rx) => {
                let nv = self.nv(&s.y, &mut s.hp, &mut s.hd);
                s.loglik.resize(st.n_r * rx.num_hypotheses(), 0.0);
                rx.loglik_into(&s.y, nv, &mut s.fading, &mut s.loglik);
                sc.decoder.decode_into(&s.loglik, st.n_r, &mut s.decoder, decided);
            }
        }
        m
    }
}
