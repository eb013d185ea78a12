mod commands;
mod config;
mod fail;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ProfileName, ScenarioConfig, SweepParameter};
use fail::Failure;
use output::RunOutput;

#[derive(Parser)]
#[command(name = "central-spin", version, about = "Central spin dynamics with a spin coherent bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Closed-form polarization and reduced density matrix.
    Homogeneous,
    /// Exact diagonalization with a coupling profile.
    Inhomogeneous,
    /// Finite-N dynamics against the Jaynes–Cummings limit.
    Jc,
    /// Closed form against exact diagonalization (uniform couplings).
    Compare,
    /// Detected and predicted revival times.
    Revivals,
    /// Fidelity with equatorial states over time and phase.
    FidelityScan,
    /// Repeat a run over bath sizes, α or θ.
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Homogeneous => "homogeneous",
            Command::Inhomogeneous => "inhomogeneous",
            Command::Jc => "jc",
            Command::Compare => "compare",
            Command::Revivals => "revivals",
            Command::FidelityScan => "fidelity-scan",
            Command::Sweep => "sweep",
        }
    }
}

/// Flags take precedence over the scenario file.
#[derive(Args)]
struct Overrides {
    /// TOML scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest bath handled by exact diagonalization.
    #[arg(long, global = true)]
    ed_cap: Option<usize>,
    /// Bath size N.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Central spin field B.
    #[arg(long, global = true, allow_negative_numbers = true)]
    field: Option<f64>,
    /// Transverse coupling A.
    #[arg(long, global = true, allow_negative_numbers = true)]
    coupling: Option<f64>,
    /// Longitudinal coupling Δ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    longitudinal: Option<f64>,
    /// Coherent bath angle θ in radians.
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    t_start: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true, value_enum)]
    profile: Option<ProfileName>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, value_enum)]
    sweep: Option<SweepParameter>,
    /// Comma-separated sweep values.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    values: Option<Vec<f64>>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        fn set<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        set(&mut cfg.run.out, &self.out);
        if self.threads.is_some() {
            cfg.run.threads = self.threads;
        }
        set(&mut cfg.run.ed_cap, &self.ed_cap);
        set(&mut cfg.model.n, &self.n);
        set(&mut cfg.model.field, &self.field);
        set(&mut cfg.model.coupling, &self.coupling);
        set(&mut cfg.model.longitudinal, &self.longitudinal);
        set(&mut cfg.model.theta, &self.theta);
        set(&mut cfg.time.start, &self.t_start);
        set(&mut cfg.time.end, &self.t_end);
        if self.points.is_some() {
            cfg.time.points = self.points;
        }
        set(&mut cfg.profile.kind, &self.profile);
        set(&mut cfg.profile.alpha, &self.alpha);
        set(&mut cfg.sweep.parameter, &self.sweep);
        set(&mut cfg.sweep.values, &self.values);
    }
}

fn run(cli: Cli) -> Result<PathBuf, Failure> {
    let mut cfg = match &cli.common.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    cli.common.apply(&mut cfg);
    cfg.validate()?;

    if let Some(n) = cfg.run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Other(format!("thread pool: {e}")))?;
    }

    let mut out = RunOutput::new(&cfg.run.out)?;
    let result = match cli.command {
        Command::Homogeneous => commands::homogeneous(&cfg, &mut out),
        Command::Inhomogeneous => commands::inhomogeneous(&cfg, &mut out),
        Command::Jc => commands::jc(&cfg, &mut out),
        Command::Compare => commands::compare(&cfg, &mut out),
        Command::Revivals => commands::revivals(&cfg, &mut out),
        Command::FidelityScan => commands::fidelity_scan(&cfg, &mut out),
        Command::Sweep => commands::sweep(&cfg, &mut out),
    };
    // the manifest is written for failed checks too, so partial output is traceable
    let manifest = out.finish(cli.command.name(), &cfg)?;
    result.map(|()| manifest)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(manifest) => {
            eprintln!("wrote {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("central-spin: {e}");
            e.exit_code()
        }
    }
}
