use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mvop::cli_reports::{run, schema, RunConfig};
use mvop::Error;

#[derive(Parser)]
#[command(name = "mvop", about = "Build matrix orthogonal polynomial sequences and check their identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a JSON config
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report path; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv_dir: Option<PathBuf>,
        #[arg(long = "nmax")]
        n_max: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the JSON schema of the config
    Schema,
}

fn threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("MVOP_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| Error::Config(format!("MVOP_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Error::Config("MVOP_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&schema()).expect("plain data"));
            ExitCode::SUCCESS
        }
        Command::Run { config, out, csv_dir, n_max, tol } => {
            let result = threads().and_then(|_| {
                let mut cfg = RunConfig::load(&config)?;
                cfg.out = out.or(cfg.out);
                cfg.csv_dir = csv_dir.or(cfg.csv_dir);
                cfg.n_max = n_max.unwrap_or(cfg.n_max);
                cfg.tol = tol.unwrap_or(cfg.tol);
                let report = run(&cfg)?;
                if cfg.out.is_none() {
                    println!("{}", report.to_json());
                }
                Ok(report)
            });
            match result {
                Ok(report) => {
                    for c in &report.checks {
                        let worst = c.worst_residual.map_or("-".to_string(), |w| format!("{w:.3e}"));
                        let status = if c.pass { "pass" } else { "FAIL" };
                        eprintln!("{:<11} {status}  worst {worst}{}", c.check.name(),
                            c.error.as_ref().map_or(String::new(), |e| format!("  ({e})")));
                    }
                    if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
