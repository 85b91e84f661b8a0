use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maxreg_cli::config::KernelKind;
use maxreg_cli::{
    exit_code, report_json, run, timestamp_now, write_outputs, ExperimentConfig, Kind, Report,
    RunConfig, ValidationError, EXIT_VALIDATION,
};

#[derive(Parser)]
#[command(
    name = "maxreg",
    version,
    about = "Kernel, operator and maximal-regularity experiments"
)]
struct Cli {
    /// TOML experiment configuration (required by `run`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path. A path with an extension receives the table of a single
    /// subcommand (JSON artifact for `.json` where one exists); any other path
    /// is a directory for report.json and one CSV per experiment.
    #[arg(long, visible_alias = "report", global = true)]
    out: Option<PathBuf>,
    /// Seed for random test fields.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel values.
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Kernels against spectral oracles.
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Estimate-record sup-ratio sweeps.
    Estimate {
        #[command(subcommand)]
        action: EstimateAction,
    },
    /// Maximal-regularity sweeps.
    Regularity {
        #[command(subcommand)]
        action: RegularityAction,
    },
    /// Chart transference checks.
    Transfer {
        #[command(subcommand)]
        action: TransferAction,
    },
    /// Critical-radius coverings.
    Covering {
        #[command(subcommand)]
        action: CoveringAction,
    },
    /// Every experiment of the configuration file.
    Run,
}

#[derive(Args)]
struct SettingArgs {
    /// classical, hermite, bessel or laguerre.
    #[arg(long, default_value = "hermite")]
    setting: String,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum KernelAction {
    Eval {
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long, value_enum, default_value = "poisson")]
        kernel: KernelArg,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KernelArg {
    Heat,
    Poisson,
}

#[derive(Subcommand)]
enum OracleAction {
    Compare {
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long)]
        tolerance: Option<f64>,
        /// `t_min,t_max`.
        #[arg(long, value_parser = parse_range)]
        t_range: Option<[f64; 2]>,
    },
}

#[derive(Subcommand)]
enum EstimateAction {
    Sweep {
        #[arg(long)]
        record: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Subcommand)]
enum RegularityAction {
    Sweep {
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        random_fields: Option<usize>,
        /// Also compare horizons 4 and 8.
        #[arg(long)]
        horizon: bool,
    },
}

#[derive(Subcommand)]
enum TransferAction {
    Check {
        /// Delta_alpha, O_half, L_alpha_shifted, L_alpha_ell, L_alpha_psi or L_alpha_cal.
        #[arg(long)]
        entry: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        h0: Option<f64>,
    },
}

#[derive(Subcommand)]
enum CoveringAction {
    Build {
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        dilation: Option<f64>,
        #[arg(long)]
        spacing: Option<f64>,
    },
}

fn parse_range(text: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.trim().parse().map_err(|e| format!("{e}"))?,
            b.trim().parse().map_err(|e| format!("{e}"))?,
        ]),
        _ => Err("expected t_min,t_max".into()),
    }
}

fn single(kind: Kind) -> ExperimentConfig {
    ExperimentConfig {
        kind: Some(kind),
        ..Default::default()
    }
}

/// The one-experiment configuration of a subcommand.
fn experiment(command: Command) -> Option<ExperimentConfig> {
    Some(match command {
        Command::Run => return None,
        Command::Kernel {
            action:
                KernelAction::Eval {
                    setting,
                    kernel,
                    t,
                    x,
                    y,
                },
        } => ExperimentConfig {
            setting: Some(setting.setting),
            alpha: setting.alpha,
            kernel: Some(match kernel {
                KernelArg::Heat => KernelKind::Heat,
                KernelArg::Poisson => KernelKind::Poisson,
            }),
            points: Some(vec![[t, x, y]]),
            ..single(Kind::KernelEval)
        },
        Command::Oracle {
            action:
                OracleAction::Compare {
                    setting,
                    tolerance,
                    t_range,
                },
        } => ExperimentConfig {
            setting: Some(setting.setting),
            alpha: setting.alpha,
            tolerance,
            t_range,
            ..single(Kind::OracleCompare)
        },
        Command::Estimate {
            action:
                EstimateAction::Sweep {
                    record,
                    alpha,
                    levels,
                    x_max,
                    t_max,
                    h0,
                    tolerance,
                },
        } => ExperimentConfig {
            record: Some(record),
            alpha,
            levels,
            x_max,
            t_final: t_max,
            h0,
            tolerance,
            ..single(Kind::EstimateSweep)
        },
        Command::Regularity {
            action:
                RegularityAction::Sweep {
                    setting,
                    levels,
                    x_max,
                    t_final,
                    h0,
                    random_fields,
                    horizon,
                },
        } => ExperimentConfig {
            setting: Some(setting.setting),
            alpha: setting.alpha,
            levels,
            x_max,
            t_final,
            h0,
            random_fields,
            horizon: Some(horizon),
            ..single(Kind::RegularitySweep)
        },
        Command::Transfer {
            action:
                TransferAction::Check {
                    entry,
                    alpha,
                    levels,
                    h0,
                },
        } => ExperimentConfig {
            entry: Some(entry),
            alpha,
            levels,
            h0,
            ..single(Kind::TransferCheck)
        },
        Command::Covering {
            action:
                CoveringAction::Build {
                    window,
                    dilation,
                    spacing,
                },
        } => ExperimentConfig {
            window,
            dilation,
            spacing,
            ..single(Kind::CoveringBuild)
        },
    })
}

fn load(path: &Option<PathBuf>) -> Result<RunConfig, ValidationError> {
    let Some(p) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(p).map_err(|e| ValidationError {
        field: "config".into(),
        message: format!("{}: {e}", p.display()),
    })?;
    RunConfig::parse(&text)
}

fn print_summary(report: &Report) {
    for o in &report.experiments {
        if let Some(e) = &o.error {
            eprintln!("[{}] {}: {e}", o.index, o.kind.label());
        }
        for c in &o.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            eprintln!(
                "[{}] {} {verdict} {} = {:e} {} {:e}",
                o.index,
                o.kind.label(),
                c.name,
                c.value,
                c.relation,
                c.tolerance
            );
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let single = match experiment(cli.command) {
        None if cli.config.is_none() => {
            eprintln!("invalid config: `run` needs --config");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
        None => false,
        Some(e) => {
            config.experiments = vec![e];
            true
        }
    };
    if let Some(t) = cli.threads {
        config.threads = Some(t);
    }
    if let Err(e) = config.validate() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_VALIDATION as u8);
    }
    if let Some(t) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("thread pool: {e}");
        }
    }
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let mut report = run(&config, seed);
    report.timestamp = Some(timestamp_now());
    print_summary(&report);
    let out = cli.out.or_else(|| config.out.as_ref().map(PathBuf::from));
    if let Err(e) = write(&report, single, out.as_deref()) {
        eprintln!("writing output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(exit_code(&report) as u8)
}

fn write(report: &Report, single: bool, out: Option<&Path>) -> std::io::Result<()> {
    let Some(path) = out else {
        if single {
            print!("{}", report.experiments[0].table.to_csv());
        } else {
            print!("{}", report_json(report));
        }
        return Ok(());
    };
    match path.extension() {
        Some(ext) if single => {
            let o = &report.experiments[0];
            let text = match &o.artifact {
                Some(a) if ext == "json" => {
                    serde_json::to_string_pretty(a).expect("artifact serializes") + "\n"
                }
                _ => o.table.to_csv(),
            };
            std::fs::write(path, text)
        }
        _ => write_outputs(report, path),
    }
}
