//! JSON scenario configuration with dotted-key overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::PowerDelayProfile;
use crate::codec::PilotMode;
use crate::receiver::{uep_ratio_from_targets, ChestConfig, DecoderConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub p: f64,
    #[serde(default)]
    pub rho: f64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodebookConfig {
    /// NR short-block code with QPSK mapping.
    Nr {
        #[serde(default = "default_n")]
        n: usize,
    },
    /// Codebook file; relative paths resolve against the config file.
    File { path: PathBuf },
    /// One BPSK symbol per bit, ACK on `+1`.
    Uncoded,
}

fn default_n() -> usize {
    32
}

impl Default for CodebookConfig {
    fn default() -> Self {
        CodebookConfig::Nr { n: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum ShapingKind {
    Uniform,
    Entropy {
        #[serde(default = "yes")]
        floor: bool,
    },
    /// Entropy shaping against the mean of a prior family.
    Arithmetic {
        family: Vec<PriorConfig>,
        #[serde(default = "yes")]
        floor: bool,
    },
    Step {
        delta_db: f64,
    },
    /// Powers exported with a learnt-PS codebook file.
    Learnt,
    Explicit {
        alpha: Vec<f64>,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapingConfig {
    #[serde(flatten)]
    pub scheme: ShapingKind,
    #[serde(default)]
    pub pilot_mode: PilotMode,
}

impl Default for ShapingConfig {
    fn default() -> Self {
        Self {
            scheme: ShapingKind::Uniform,
            pilot_mode: PilotMode::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelConfig {
    Awgn,
    /// SIMO block fading on the PUCCH Format 2 grid.
    Fading {
        /// `tdl_c_300ns`, `flat` or a path to a `delay_ns power` table.
        #[serde(default = "default_pdp")]
        pdp: String,
        #[serde(default = "default_n_r")]
        n_r: usize,
        #[serde(default = "default_scs")]
        subcarrier_spacing_khz: f64,
        /// Receiver-side scaling of signal and noise.
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
}

fn default_pdp() -> String {
    "tdl_c_300ns".into()
}
fn default_n_r() -> usize {
    4
}
fn default_scs() -> f64 {
    30.0
}
fn default_epsilon() -> f64 {
    1.0
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig::Awgn
    }
}

impl ChannelConfig {
    pub fn pdp(&self, base: &Path) -> Result<Option<PowerDelayProfile>> {
        match self {
            ChannelConfig::Awgn => Ok(None),
            ChannelConfig::Fading { pdp, .. } => Ok(Some(match pdp.as_str() {
                "tdl_c_300ns" => PowerDelayProfile::tdl_c_300ns(),
                "flat" => PowerDelayProfile::flat(),
                path => PowerDelayProfile::from_file(base.join(path))?,
            })),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    /// Exact Gaussian likelihood of pilots and data.
    #[default]
    Noncoherent,
    /// LMMSE channel estimate plus conditional likelihood; same numbers as
    /// the noncoherent receiver when the pilot term is included.
    Coherent,
    LowComplexity,
    /// Prior-agnostic correlator on the estimated channel.
    Correlator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NvSource {
    /// From the pilot residual after channel estimation.
    #[default]
    Estimated,
    Genie,
}

/// Fading receiver settings; ignored on AWGN, where the receiver knows the
/// gain and noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverConfig {
    pub kind: ReceiverKind,
    /// Plug-in SNR of the receiver; `null` uses the true SNR.
    pub nominal_snr_db: Option<f64>,
    pub nv: NvSource,
    pub include_pilot_term: bool,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            kind: ReceiverKind::Noncoherent,
            nominal_snr_db: Some(0.0),
            nv: NvSource::Estimated,
            include_pilot_term: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderSection {
    #[serde(flatten)]
    pub config: DecoderConfig,
    /// `[ber_ack, ber_nack]`; when set, the ratio is `ber_nack / ber_ack`.
    #[serde(default)]
    pub targets: Option<[f64; 2]>,
}

impl Default for DecoderSection {
    fn default() -> Self {
        Self {
            config: DecoderConfig::default(),
            targets: None,
        }
    }
}

impl DecoderSection {
    pub fn resolved(&self) -> Result<DecoderConfig> {
        let mut cfg = self.config.clone();
        if let Some([ack, nack]) = self.targets {
            cfg.uep_ratio = uep_ratio_from_targets(ack, nack)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
    /// Stop after the first point meeting both targets.
    pub early_stop: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start_db: -4.0,
            stop_db: 6.0,
            step_db: 0.5,
            early_stop: true,
        }
    }
}

impl SweepConfig {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step_db > 0.0 && self.stop_db >= self.start_db && self.start_db.is_finite() && self.stop_db.is_finite()) {
            return Err(Error::Config("sweep needs start_db <= stop_db and step_db > 0".into()));
        }
        let count = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        // integer multiples avoid accumulated rounding in the dB grid
        Ok((0..count).map(|i| round_db(self.start_db + i as f64 * self.step_db)).collect())
    }
}

fn round_db(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    /// Both classes need at least this many bit errors.
    pub min_errors: u64,
    pub max_trials: u64,
    /// Run exactly this many trials instead of the adaptive rule.
    pub fixed_trials: Option<u64>,
    pub chunk_trials: u64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            min_errors: 200,
            max_trials: 10_000_000,
            fixed_trials: None,
            chunk_trials: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Targets {
    pub ber_ack: f64,
    pub ber_nack: f64,
}

impl Default for Targets {
    fn default() -> Self {
        Self {
            ber_ack: 1e-2,
            ber_nack: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub prior: PriorConfig,
    #[serde(default)]
    pub codebook: CodebookConfig,
    #[serde(default)]
    pub shaping: ShapingConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub receiver: ReceiverConfig,
    #[serde(default)]
    pub decoder: DecoderSection,
    #[serde(default)]
    pub chest: ChestConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub targets: Targets,
    /// Directory for relative paths inside the config.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_name() -> String {
    "scenario".into()
}
fn default_seed() -> u64 {
    1
}

impl ScenarioConfig {
    pub fn new(prior: PriorConfig) -> Self {
        Self {
            name: default_name(),
            prior,
            codebook: CodebookConfig::default(),
            shaping: ShapingConfig::default(),
            channel: ChannelConfig::default(),
            receiver: ReceiverConfig::default(),
            decoder: DecoderSection::default(),
            chest: ChestConfig::default(),
            sweep: SweepConfig::default(),
            budget: BudgetConfig::default(),
            seed: default_seed(),
            targets: Targets::default(),
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.targets;
        if !(t.ber_ack > 0.0 && t.ber_nack > 0.0 && t.ber_ack < 1.0 && t.ber_nack < 1.0) {
            return Err(Error::Config("targets must lie in (0, 1)".into()));
        }
        self.sweep.points()?;
        if self.budget.chunk_trials == 0 || self.budget.max_trials == 0 || self.budget.fixed_trials == Some(0) {
            return Err(Error::Config("trial budget must be positive".into()));
        }
        self.decoder.resolved()?;
        self.chest.validate()?;
        if let ChannelConfig::Fading { n_r, epsilon, subcarrier_spacing_khz, .. } = &self.channel {
            if *n_r == 0 || !(*epsilon > 0.0) || !(*subcarrier_spacing_khz > 0.0) {
                return Err(Error::Config("fading channel needs n_r >= 1 and positive epsilon and spacing".into()));
            }
        }
        Ok(())
    }

    /// Applies `key=value` where `key` is a dotted path into the config and
    /// `value` is JSON (bare words are taken as strings). The path must
    /// already exist once defaults are filled in, which catches typos.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(self)?;
        let mut slot = &mut doc;
        for part in key.split('.') {
            slot = match slot {
                Value::Object(map) => map
                    .get_mut(part)
                    .ok_or_else(|| Error::Config(format!("unknown config key `{key}`")))?,
                Value::Array(items) => {
                    let idx: usize = part.parse().map_err(|_| Error::Config(format!("`{part}` in `{key}` is not an index")))?;
                    items.get_mut(idx).ok_or_else(|| Error::Config(format!("index {idx} out of range in `{key}`")))?
                }
                _ => return Err(Error::Config(format!("`{key}` descends into a scalar"))),
            };
        }
        *slot = value;
        let mut out: Self = serde_json::from_value(doc).map_err(|e| Error::Config(format!("override `{assignment}`: {e}")))?;
        out.base_dir = self.base_dir.clone();
        out.validate()?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::receiver::DecoderMode;

    const EXAMPLE: &str = r#"{
        "name": "uep",
        "prior": {"p": 0.9, "rho": 0.0, "k": 11},
        "shaping": {"scheme": "entropy"},
        "decoder": {"mode": "bitwise_uep", "targets": [0.01, 0.001]},
        "sweep": {"start_db": -2, "stop_db": 0, "step_db": 0.5}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ScenarioConfig::from_json(EXAMPLE, "inline").unwrap();
        assert_eq!(cfg.shaping.scheme, ShapingKind::Entropy { floor: true });
        assert_eq!(cfg.codebook, CodebookConfig::Nr { n: 32 });
        assert!((cfg.decoder.resolved().unwrap().uep_ratio - 0.1).abs() < 1e-15);
        assert_eq!(cfg.sweep.points().unwrap(), vec![-2.0, -1.5, -1.0, -0.5, 0.0]);
    }

    #[test]
    fn errors_carry_positions() {
        let bad = EXAMPLE.replace("\"k\": 11", "\"k\": 11, \"q\": 1");
        let err = ScenarioConfig::from_json(&bad, "cfg.json").unwrap_err().to_string();
        assert!(err.contains("cfg.json:3:"), "{err}");
    }

    #[test]
    fn overrides() {
        let cfg = ScenarioConfig::from_json(EXAMPLE, "inline").unwrap();
        let o = cfg.with_override("decoder.mode=codeword_ml").unwrap();
        assert_eq!(o.decoder.config.mode, DecoderMode::CodewordMl);
        let o = cfg.with_override("prior.rho=0.5").unwrap().with_override("sweep.step_db=0.25").unwrap();
        assert_eq!((o.prior.rho, o.sweep.step_db), (0.5, 0.25));
        let o = cfg.with_override("decoder.glrt_rho_grid.1=0.2").unwrap();
        assert_eq!(o.decoder.config.glrt_rho_grid[1], 0.2);
        assert!(cfg.with_override("prior.rhoo=0.5").is_err());
        assert!(cfg.with_override("sweep.step_db=-1").is_err());
        assert!(cfg.with_override("novalue").is_err());
    }

    #[test]
    fn round_trips() {
        let cfg = ScenarioConfig::from_json(EXAMPLE, "inline").unwrap();
        assert_eq!(ScenarioConfig::from_json(&cfg.to_json().unwrap(), "again").unwrap(), cfg);
    }
}
