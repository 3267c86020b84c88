use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gibbsmps::experiment::{emit_plotdata, run_measure, run_oracle, run_prepare, run_verify, ExperimentConfig, RunSummary};

#[derive(Parser)]
#[command(name = "gibbsmps", version, about = "Variational Gibbs-state preparation on MPS purifications")]
struct Cli {
    /// Worker threads for restarts, sampling and bootstrap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for optimizer, sampling and Monte Carlo, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> gibbsmps::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::read_file(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.override_seed(seed);
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the ansatz at every β and write prep.jsonl.
    Prepare(Common),
    /// Sample prepared states and write measure.jsonl.
    Measure(Common),
    /// Compute reference values and write oracle.jsonl.
    Oracle(Common),
    /// Write plot CSVs from measure and oracle results.
    Plotdata {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in self-checks and write verify.txt.
    Verify {
        #[arg(long, default_value = "verify_out")]
        out: PathBuf,
    },
}

fn report(stage: &str, s: &RunSummary) -> ExitCode {
    println!("{stage}: {} computed, {} already present", s.computed.len(), s.skipped.len());
    if s.is_success() {
        return ExitCode::SUCCESS;
    }
    for (beta, e) in &s.failed {
        eprintln!("{stage} failed at beta = {beta}: {e}");
    }
    ExitCode::from(2)
}

fn run(cli: Cli) -> gibbsmps::Result<ExitCode> {
    Ok(match cli.command {
        Command::Prepare(c) => report("prepare", &run_prepare(&c.load()?)?),
        Command::Measure(c) => report("measure", &run_measure(&c.load()?)?),
        Command::Oracle(c) => report("oracle", &run_oracle(&c.load()?)?),
        Command::Plotdata { config, out } => {
            let dir = match (out, config) {
                (Some(o), _) => o,
                (None, Some(c)) => ExperimentConfig::read_file(&c)?.output_dir,
                (None, None) => {
                    eprintln!("plotdata needs --out or --config");
                    return Ok(ExitCode::from(2));
                }
            };
            for p in emit_plotdata(&dir)? {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Command::Verify { out } => {
            std::fs::create_dir_all(&out)?;
            let r = run_verify(&out.join("work"));
            let text = r.to_text();
            std::fs::write(out.join("verify.txt"), &text)?;
            print!("{text}");
            if r.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
