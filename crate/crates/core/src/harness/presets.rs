//! Reproduction suite: named bundles of scenarios.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{
    ChannelConfig, CodebookConfig, PriorConfig, ReceiverKind, ScenarioConfig, ShapingConfig, ShapingKind, SweepConfig,
};
use super::engine::{BerCurve, Scenario};
use super::plot::{plot_ber, plot_snr_th};
use super::report::{save_curve, CsvRow};
use super::snr_th::{find_snr_th, SnrThResult};
use crate::codec::PilotMode;
use crate::receiver::DecoderMode;
use crate::{Error, Result};

pub const PRESETS: [&str; 6] = ["awgn_fig4", "awgn_rho_sweep", "fading_chain", "dmrs_shaping", "glrt", "beta_sweep"];

#[derive(Debug, Clone, Default)]
pub struct PresetOptions {
    /// Learned codebook for the extra curve of `awgn_fig4`.
    pub codebook: Option<PathBuf>,
    /// Smaller error budget for a fast look.
    pub quick: bool,
}

/// One curve of a preset; `series` and `x` group curves for the
/// threshold-versus-parameter plot.
#[derive(Debug, Clone)]
pub struct PresetCurve {
    pub config: ScenarioConfig,
    pub series: String,
    pub x: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub curves: Vec<PresetCurve>,
    pub x_desc: Option<String>,
}

fn base(name: &str, k: usize, rho: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(PriorConfig { p: 0.9, rho, k });
    c.name = name.to_string();
    c
}

fn with_mode(mut c: ScenarioConfig, mode: DecoderMode) -> ScenarioConfig {
    c.decoder.config.mode = mode;
    c
}

fn shaped(mut c: ScenarioConfig, scheme: ShapingKind) -> ScenarioConfig {
    c.shaping.scheme = scheme;
    c
}

fn fading(mut c: ScenarioConfig, kind: ReceiverKind) -> ScenarioConfig {
    c.channel = ChannelConfig::Fading {
        pdp: "tdl_c_300ns".into(),
        n_r: 4,
        subcarrier_spacing_khz: 30.0,
        epsilon: 1.0,
    };
    c.receiver.kind = kind;
    c.sweep = SweepConfig {
        start_db: -9.0,
        stop_db: 4.0,
        step_db: 0.5,
        early_stop: true,
    };
    c
}

fn single(c: ScenarioConfig) -> PresetCurve {
    PresetCurve {
        series: c.name.clone(),
        config: c,
        x: None,
    }
}

const STEP_3DB: ShapingKind = ShapingKind::Step { delta_db: 3.0 };

fn step_shaped_dmrs(mut c: ScenarioConfig) -> ScenarioConfig {
    c.shaping = ShapingConfig {
        scheme: STEP_3DB,
        pilot_mode: PilotMode::Shaped,
    };
    c
}

pub fn preset(name: &str, opts: &PresetOptions) -> Result<Preset> {
    use DecoderMode::*;
    let entropy = ShapingKind::Entropy { floor: true };
    let mut x_desc = None;
    let curves: Vec<PresetCurve> = match name {
        "awgn_fig4" => {
            let mut v = vec![
                with_mode(base("nr_ml", 11, 0.0), CodewordMl),
                with_mode(base("nr_map", 11, 0.0), BitwiseMap),
                shaped(with_mode(base("nr_entropy_map", 11, 0.0), BitwiseMap), entropy.clone()),
                shaped(with_mode(base("nr_entropy_uep", 11, 0.0), BitwiseUep), entropy.clone()),
            ];
            if let Some(path) = &opts.codebook {
                let mut c = shaped(with_mode(base("learned_entropy_uep", 11, 0.0), BitwiseUep), entropy);
                c.codebook = CodebookConfig::File { path: path.clone() };
                v.push(c);
            }
            v.into_iter().map(single).collect()
        }
        "awgn_rho_sweep" => {
            x_desc = Some("rho".to_string());
            let mut v = Vec::new();
            for rho in [0.0, 0.3, 0.5, 0.7, 0.9] {
                for (series, mode, scheme) in [
                    ("nr_ml", CodewordMl, ShapingKind::Uniform),
                    ("nr_uep", BitwiseUep, ShapingKind::Uniform),
                    ("nr_entropy_uep", BitwiseUep, entropy.clone()),
                ] {
                    let c = shaped(with_mode(base(&format!("{series}_rho{rho}"), 11, rho), mode), scheme);
                    v.push(PresetCurve {
                        config: c,
                        series: series.to_string(),
                        x: Some(rho),
                    });
                }
            }
            v
        }
        "fading_chain" => {
            let mut corr = fading(with_mode(base("correlator_ml", 4, 0.0), CodewordMl), ReceiverKind::Correlator);
            corr.sweep.start_db = -6.0;
            vec![
                corr,
                fading(with_mode(base("noncoherent_ml", 4, 0.0), CodewordMl), ReceiverKind::Noncoherent),
                fading(with_mode(base("noncoherent_uep", 4, 0.0), BitwiseUep), ReceiverKind::Noncoherent),
                step_shaped_dmrs(fading(with_mode(base("noncoherent_uep_step3", 4, 0.0), BitwiseUep), ReceiverKind::Noncoherent)),
                step_shaped_dmrs(fading(with_mode(base("coherent_uep_step3", 4, 0.0), BitwiseUep), ReceiverKind::Coherent)),
                step_shaped_dmrs(fading(with_mode(base("lc_uep_step3", 4, 0.0), BitwiseUep), ReceiverKind::LowComplexity)),
            ]
            .into_iter()
            .map(single)
            .collect()
        }
        "dmrs_shaping" => [PilotMode::Constant, PilotMode::Shaped]
            .into_iter()
            .map(|mode| {
                let label = if mode == PilotMode::Constant { "constant" } else { "shaped" };
                let mut c = fading(with_mode(base(&format!("step3_{label}_dmrs"), 4, 0.0), BitwiseUep), ReceiverKind::Noncoherent);
                c.shaping = ShapingConfig {
                    scheme: STEP_3DB,
                    pilot_mode: mode,
                };
                single(c)
            })
            .collect(),
        "glrt" => [("step5p5_uep", BitwiseUep), ("step5p5_mlm_glrt", MlmGlrt)]
            .into_iter()
            .map(|(n, mode)| single(shaped(with_mode(base(n, 11, 0.0), mode), ShapingKind::Step { delta_db: 5.5 })))
            .collect(),
        "beta_sweep" => [0.1, 0.3, 1.0]
            .into_iter()
            .map(|ratio| {
                let mut c = shaped(with_mode(base(&format!("entropy_uep_ratio{ratio}"), 11, 0.0), BitwiseUep), entropy.clone());
                c.decoder.config.uep_ratio = ratio;
                c.sweep.early_stop = false;
                c.sweep.start_db = -3.0;
                c.sweep.stop_db = 1.0;
                single(c)
            })
            .collect(),
        other => {
            return Err(Error::Config(format!("unknown preset `{other}`; available: {}", PRESETS.join(", "))));
        }
    };
    let curves = curves
        .into_iter()
        .map(|mut pc| {
            if opts.quick {
                pc.config.budget.min_errors = 50;
                pc.config.budget.max_trials = 200_000;
            }
            pc
        })
        .collect();
    Ok(Preset {
        name: name.to_string(),
        curves,
        x_desc,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSummary {
    pub name: String,
    pub series: String,
    pub x: Option<f64>,
    pub csv: String,
    pub snr_th: Option<SnrThResult>,
    pub error: Option<String>,
}

fn rows_of(curve: &BerCurve) -> Vec<CsvRow> {
    curve
        .points
        .iter()
        .map(|p| {
            let (a, n) = (p.ack(), p.nack());
            CsvRow {
                snr_db: p.snr_db,
                ber_ack: a.ber,
                ber_ack_ci: a.ci,
                ber_nack: n.ber,
                ber_nack_ci: n.ci,
                ack_bits: p.counts.ack_bits,
                nack_bits: p.counts.nack_bits,
                trials: p.counts.trials,
            }
        })
        .collect()
}

/// Runs every curve, writing `<curve>.csv`, `summary.json` and SVG plots
/// into `out_dir`.
pub fn run_preset(preset: &Preset, out_dir: &Path, mut progress: impl FnMut(&CurveSummary)) -> Result<Vec<CurveSummary>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut summaries = Vec::new();
    let mut plotted = Vec::new();
    for pc in &preset.curves {
        let scenario = Scenario::new(pc.config.clone())?;
        let curve = scenario.run_sweep()?;
        let csv = format!("{}.csv", pc.config.name);
        save_curve(&curve, out_dir.join(&csv))?;
        let th = find_snr_th(&curve, &pc.config.targets, scenario.shaping.max_alpha());
        let summary = CurveSummary {
            name: pc.config.name.clone(),
            series: pc.series.clone(),
            x: pc.x,
            csv,
            snr_th: th.as_ref().ok().copied(),
            error: th.err().map(|e| e.to_string()),
        };
        progress(&summary);
        summaries.push(summary);
        plotted.push((pc.config.name.clone(), rows_of(&curve)));
    }
    let json = serde_json::to_string_pretty(&summaries)?;
    let path = out_dir.join("summary.json");
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    if preset.x_desc.is_none() {
        plot_ber(&plotted, out_dir.join(format!("{}_ber.svg", preset.name)))?;
    }
    if let Some(x_desc) = &preset.x_desc {
        let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for s in &summaries {
            let (Some(x), Some(th)) = (s.x, s.snr_th) else { continue };
            match series.iter_mut().find(|(n, _)| *n == s.series) {
                Some((_, pts)) => pts.push((x, th.snr_th)),
                None => series.push((s.series.clone(), vec![(x, th.snr_th)])),
            }
        }
        if !series.is_empty() {
            plot_snr_th(&series, x_desc, out_dir.join(format!("{}_snr_th.svg", preset.name)))?;
        }
    }
    Ok(summaries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for name in PRESETS {
            let p = preset(name, &PresetOptions::default()).unwrap();
            assert!(!p.curves.is_empty(), "{name}");
            for c in &p.curves {
                c.config.validate().unwrap();
            }
        }
        assert!(preset("nope", &PresetOptions::default()).is_err());
    }

    #[test]
    fn fig4_has_optional_learned_curve() {
        let four = preset("awgn_fig4", &PresetOptions::default()).unwrap();
        assert_eq!(four.curves.len(), 4);
        let opts = PresetOptions {
            codebook: Some("cb.json".into()),
            quick: true,
        };
        assert_eq!(preset("awgn_fig4", &opts).unwrap().curves.len(), 5);
    }
}
