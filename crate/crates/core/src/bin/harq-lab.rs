//! Command-line front end for scenario runs and the reproduction suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harq_jscc::harness::plot::plot_ber;
use harq_jscc::harness::{find_snr_th, load_rows, preset, run_preset, save_curve, PresetOptions, Scenario, ScenarioConfig};
use harq_jscc::Result;

#[derive(Parser)]
#[command(name = "harq-lab", version, about = "HARQ-ACK link-level simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the SNR sweep of a JSON scenario.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write an SVG plot.
        #[arg(long)]
        plot: bool,
    },
    /// Like `run`, with `key=value` overrides applied to the config.
    Sweep {
        config: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        plot: bool,
    },
    /// Run a named reproduction preset.
    Reproduce {
        preset: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Learned codebook file for the optional curve.
        #[arg(long)]
        codebook: Option<PathBuf>,
        /// Reduced error budget.
        #[arg(long)]
        quick: bool,
    },
    /// Plot a curve CSV as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_config(cfg: ScenarioConfig, out: &Path, plot: bool) -> Result<()> {
    let scenario = Scenario::new(cfg)?;
    let curve = scenario.run_sweep()?;
    std::fs::create_dir_all(out).map_err(|e| harq_jscc::Error::Config(format!("{}: {e}", out.display())))?;
    let csv = out.join(format!("{}.csv", scenario.config.name));
    save_curve(&curve, &csv)?;
    println!("wrote {}", csv.display());
    match find_snr_th(&curve, &scenario.config.targets, scenario.shaping.max_alpha()) {
        Ok(th) => println!(
            "SNR_th {:.2} dB (ACK {:.2}, NACK {:.2}), P_max {:.2} dB",
            th.snr_th, th.snr_ack, th.snr_nack, th.p_max
        ),
        Err(e) => println!("no threshold: {e}"),
    }
    if plot {
        plot_csv(&csv, None)?;
    }
    Ok(())
}

fn plot_csv(csv: &Path, out: Option<PathBuf>) -> Result<()> {
    let rows = load_rows(csv)?;
    let out = out.unwrap_or_else(|| csv.with_extension("svg"));
    let label = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    plot_ber(&[(label, rows)], &out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, plot } => ScenarioConfig::load(&config).and_then(|c| run_config(c, &out, plot)),
        Command::Sweep {
            config,
            overrides,
            out,
            plot,
        } => ScenarioConfig::load(&config)
            .and_then(|c| overrides.iter().try_fold(c, |c, o| c.with_override(o)))
            .and_then(|c| run_config(c, &out, plot)),
        Command::Reproduce {
            preset: name,
            out,
            codebook,
            quick,
        } => preset(&name, &PresetOptions { codebook, quick }).and_then(|p| {
            let dir = out.join(&p.name);
            run_preset(&p, &dir, |s| match (&s.snr_th, &s.error) {
                (Some(th), _) => println!("{:<28} SNR_th {:>6.2} dB  P_max {:>6.2} dB", s.name, th.snr_th, th.p_max),
                (None, Some(e)) => println!("{:<28} {e}", s.name),
                _ => {}
            })
            .map(|_| println!("results in {}", dir.display()))
        }),
        Command::Plot { csv, out } => plot_csv(&csv, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
