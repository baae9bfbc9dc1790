use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand, ValueEnum};
use log::error;
use nightdehaze::pipeline::{PipelineConfig, VariantRegistry};
use nightdehaze_cli::*;

#[derive(Parser, Debug)]
#[command(name = "nightdehaze", version, about = "Nighttime image dehazing and evaluation")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dehaze one image or every PNG/PPM in a directory.
    Dehaze {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Write intermediates and the decomposition trace under `<out>/debug/`.
        #[arg(long)]
        debug_dump: bool,
        #[arg(long, default_value = "full")]
        variant: String,
    },
    /// Run the full model and all ablations, with a comparison CSV.
    Ablate {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Directory of clean references matched by file stem.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Add synthetic haze to clean images.
    Synth {
        clean: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TMode::Radial)]
        t_mode: TMode,
        /// Transmittance for `--t-mode constant`.
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 0.5)]
        beta_min: f64,
        #[arg(long, default_value_t = 1.5)]
        beta_max: f64,
        #[arg(long, value_enum, default_value_t = AMode::Bump)]
        a_mode: AMode,
        /// Airlight for `--a-mode constant`: one gray level or `r,g,b`.
        #[arg(long, default_value = "0.8")]
        a: String,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Score (output, reference) pairs listed in a JSON manifest.
    Metrics {
        manifest: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// JSON list of `{x, y, width, height}` rectangles for CIEDE2000.
        #[arg(long)]
        regions: Option<PathBuf>,
    },
    /// Write procedural clean night scenes.
    GenScenes {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List registered pipeline variants.
    Variants,
    /// Print the default configuration as TOML.
    DefaultConfig,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TMode {
    Constant,
    Radial,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AMode {
    Constant,
    Bump,
}

fn parse_color(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [v] => Ok([*v; 3]),
        [r, g, b] => Ok([*r, *g, *b]),
        _ => Err(format!("expected 1 or 3 values, got {}", parts.len())),
    }
}

fn config_or_exit(path: Option<&std::path::Path>) -> PipelineConfig {
    load_config(path).unwrap_or_else(|e| {
        error!("{e}");
        exit(ExitStatus::ConfigError.code())
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitStatus> {
    let status = match cli.command {
        Command::Dehaze {
            input,
            out,
            config,
            threads,
            debug_dump,
            variant,
        } => {
            let cfg = config_or_exit(config.as_deref());
            let opts = DehazeOptions {
                variant,
                threads,
                debug_dump,
            };
            cmd_dehaze(&input, &out, &cfg, &opts)?.1
        }
        Command::Ablate {
            input,
            out,
            config,
            reference,
            threads,
        } => {
            let cfg = config_or_exit(config.as_deref());
            cmd_ablate(&input, &out, &cfg, reference.as_deref(), threads)?.1
        }
        Command::Synth {
            clean,
            out,
            seed,
            t_mode,
            t,
            beta_min,
            beta_max,
            a_mode,
            a,
            threads,
        } => {
            let transmittance = match t_mode {
                TMode::Constant => TransmittanceSpec::Constant { t },
                TMode::Radial => TransmittanceSpec::Radial { beta_min, beta_max },
            };
            let airlight = match a_mode {
                AMode::Bump => AirlightSpec::Bump,
                AMode::Constant => match parse_color(&a) {
                    Ok(color) => AirlightSpec::Constant { color },
                    Err(e) => {
                        error!("--a: {e}");
                        return Ok(ExitStatus::ConfigError);
                    }
                },
            };
            let spec = HazeSpec { transmittance, airlight };
            cmd_synth(&clean, &out, &spec, seed, threads)?.1
        }
        Command::Metrics { manifest, out, regions } => cmd_metrics(&manifest, &out, regions.as_deref())?.1,
        Command::GenScenes {
            out,
            count,
            width,
            height,
            seed,
        } => {
            for p in cmd_gen_scenes(&out, count, width, height, seed)? {
                println!("{}", p.display());
            }
            ExitStatus::Success
        }
        Command::Variants => {
            for v in VariantRegistry::builtin().iter() {
                println!("{}\t{}", v.name(), v.label());
            }
            ExitStatus::Success
        }
        Command::DefaultConfig => {
            print!("{}", PipelineConfig::default().to_toml_string());
            ExitStatus::Success
        }
    };
    Ok(status)
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(status) => exit(status.code()),
        Err(e) => {
            error!("{e:#}");
            exit(ExitStatus::Partial.code())
        }
    }
}
