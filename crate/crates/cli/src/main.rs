use std::path::PathBuf;

use clap::{Parser, Subcommand};
use swipt_cli::errors::CliError;
use swipt_cli::spec::{ExperimentKind, ExperimentSpec};
use swipt_cli::{runner, selftest};

#[derive(Parser)]
#[command(
    name = "expcli",
    version,
    about = "Runs declarative rate/energy experiment specs and writes CSV plus gnuplot scripts"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a spec file and write its CSV and plot script.
    Run {
        spec_file: PathBuf,
        /// Override the spec's mc.base_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to $EXPCLI_OUT_DIR, then ".".
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Parse and validate a spec file without running it.
    Validate { spec_file: PathBuf },
    /// List the experiment kinds and what each sweeps.
    ListKinds,
    /// Run the built-in analytic-vs-Monte-Carlo regression grid.
    Selftest {
        /// Worker threads for the estimators; results do not depend on it.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output directory; defaults to $EXPCLI_OUT_DIR, then ".".
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn out_dir_of(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("EXPCLI_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_spec(path: &PathBuf) -> Result<(ExperimentSpec, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    let text = String::from_utf8_lossy(&bytes);
    let spec = ExperimentSpec::from_toml_str(&text)?;
    Ok((spec, bytes))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run { spec_file, seed, out_dir } => {
            let (mut spec, bytes) = load_spec(&spec_file)?;
            if let Some(s) = seed {
                spec.mc.base_seed = s;
            }
            let out = runner::run_experiment(&spec, &bytes, &out_dir_of(out_dir))?;
            println!("{}: wrote {} rows to {}", spec.name, out.rows, out.csv_path.display());
            println!("plot script: {}", out.plot_path.display());
            println!("wall time: {:.3} s", out.wall_secs);
            match out.max_mc_z {
                Some(z) => println!("max |analytic - montecarlo| / stderr: {z:.3}"),
                None => println!("max |analytic - montecarlo| / stderr: n/a (single engine)"),
            }
            Ok(())
        }
        Cmd::Validate { spec_file } => {
            let (spec, _) = load_spec(&spec_file)?;
            spec.plan()?;
            println!(
                "ok: {} ({}), {} sweep points on {}, engines [{}]",
                spec.name,
                spec.kind.name(),
                spec.sweep.points,
                spec.sweep.axis,
                spec.engines.iter().map(|e| e.tag()).collect::<Vec<_>>().join(", ")
            );
            Ok(())
        }
        Cmd::ListKinds => {
            for kind in ExperimentKind::ALL {
                println!("{:<24} {}", kind.name(), kind.blurb());
            }
            Ok(())
        }
        Cmd::Selftest { workers, out_dir } => {
            let out = selftest::run(&out_dir_of(out_dir), workers)?;
            println!(
                "selftest: {} cases, max |z| = {:.3}, csv at {}",
                out.cases,
                out.max_abs_z,
                out.csv_path.display()
            );
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
