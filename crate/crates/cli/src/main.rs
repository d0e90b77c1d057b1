use std::path::PathBuf;
use std::process::ExitCode;

use biphoton_cli::commands;
use biphoton_cli::config::{Overrides, RunConfig};
use biphoton_cli::verify;
use biphoton_cli::Result;
use biphoton_core::interferometers::Provenance;
use biphoton_core::tomography::AnchorPolicy;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Coincidence simulation and spectral tomography of photon pairs.
///
/// Thread count follows RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "biphoton", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one scan file per arm phase.
    Simulate(RunArgs),
    /// Reconstruct f₊/f₋ from a φ = 0 and a φ = π/2 scan file.
    Reconstruct {
        /// Scan files; the φ = 0 and φ = π/2 scans are picked from these.
        #[arg(required = true, num_args = 2..)]
        scans: Vec<PathBuf>,
        /// Config of the source, for fidelities against the truth.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: the first scan's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "max-modulus")]
        anchor: AnchorArg,
    },
    /// Simulate, reconstruct and write plot data.
    Pipeline(RunArgs),
    /// Print the oracle-versus-closed-form agreement table.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Evaluate closed forms with the opposite arm-phase sign.
        #[arg(long)]
        flip_phase: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    provenance: Option<ProvenanceArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProvenanceArg {
    Oracle,
    ClosedExact,
    ClosedFar,
}

impl From<ProvenanceArg> for Provenance {
    fn from(p: ProvenanceArg) -> Self {
        match p {
            ProvenanceArg::Oracle => Provenance::Oracle,
            ProvenanceArg::ClosedExact => Provenance::ClosedExact,
            ProvenanceArg::ClosedFar => Provenance::ClosedFar,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AnchorArg {
    Origin,
    MaxModulus,
}

impl From<AnchorArg> for AnchorPolicy {
    fn from(a: AnchorArg) -> Self {
        match a {
            AnchorArg::Origin => AnchorPolicy::Origin,
            AnchorArg::MaxModulus => AnchorPolicy::MaxModulus,
        }
    }
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    let mut config = RunConfig::load(&args.config)?;
    config.apply(&Overrides { out: args.out.clone(), seed: args.seed, provenance: args.provenance.map(Into::into) });
    Ok(config)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => {
            for (path, _) in commands::simulate(&load(&args)?)? {
                println!("{}", path.display());
            }
        }
        Command::Pipeline(args) => {
            let out = commands::pipeline(&load(&args)?)?;
            for path in out.scans.iter().chain(&out.written) {
                println!("{}", path.display());
            }
            for e in &out.report.entries {
                let fid = e.fidelity.map_or("-".to_string(), |f| format!("{f:.10}"));
                println!("{:?} via {:?}: fidelity {fid}, anchor {:+.3}", e.target, e.method, e.anchor.offset);
            }
        }
        Command::Reconstruct { scans, config, out, anchor } => {
            let truth = config.as_deref().map(RunConfig::load).transpose()?;
            let out = out.unwrap_or_else(|| scans[0].parent().map(PathBuf::from).unwrap_or_default());
            let report = commands::reconstruct(&scans, truth.as_ref(), &out, anchor.into())?;
            for e in &report.entries {
                let fid = e.fidelity.map_or("-".to_string(), |f| format!("{f:.10}"));
                println!("{:?} via {:?}: fidelity {fid}", e.target, e.method);
            }
        }
        Command::Verify { config, flip_phase } => {
            let config = config.as_deref().map(RunConfig::load).transpose()?;
            let table = verify::run(config.as_ref(), &verify::Options { flip_phase })?;
            print!("{table}");
            if !table.passed() {
                eprintln!("verify: closed forms disagree with the oracle");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
