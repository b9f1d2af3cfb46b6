use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use pqsum::cotype::{comparison_chain_report, cotype_estimate};
use pqsum::{pi_estimate, AscentConfig, CotypeParams, EmbeddedNorm, Exponent, MatrixOperator, NormEstimate, SummingParams, VariableKind};
use pqsum_cli::output::write_csv;
use pqsum_cli::{run_experiment, run_suite, ExperimentConfig};

#[derive(Parser)]
#[command(name = "pqsum", version, about = "Few-vector (p,q)-summing norms, cotype constants and growth-rate experiments")]
struct Cli {
    /// Seed for every randomized routine.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k-vector (p,q)-summing norm of a matrix, or its operator norm without --p.
    Norm {
        /// Matrix JSON: {"rows", "cols", "entries", "domain", "codomain"}.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, requires = "q")]
        p: Option<Exponent>,
        #[arg(long, requires = "p")]
        q: Option<Exponent>,
        /// Vector budget (default: number of columns).
        #[arg(long)]
        k: Option<usize>,
        /// Include the maximizing family or vector.
        #[arg(long)]
        witness: bool,
        /// Random ascent starts.
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Run a growth-rate experiment from a JSON or TOML config and emit CSV.
    Experiment { config: PathBuf },
    /// Run a verification suite: kwapien, tomczak, jameson, quotient, maurey,
    /// cotype, subgradient, invariants or all.
    Verify {
        suite: String,
        /// Number of random cases (suite default if omitted).
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Cotype-q constant of k vectors in E = (R^n, ‖A·‖_v).
    Cotype {
        /// Embedding JSON: {"embed": <matrix>}.
        #[arg(long)]
        embed: PathBuf,
        #[arg(long)]
        q: Exponent,
        /// Number of vectors (default: dim E).
        #[arg(long)]
        k: Option<usize>,
        /// Gaussian instead of Rademacher averages.
        #[arg(long)]
        gaussian: bool,
        /// Monte-Carlo samples where averages are sampled.
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        /// Also report the Rademacher/Gaussian comparison chain (q > 2).
        #[arg(long)]
        chain: bool,
    },
}

/// Bad input (exit 2) versus a failed hard check (exit 1).
enum Failure {
    Input(anyhow::Error),
    Hard(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<pqsum::Error> for Failure {
    fn from(e: pqsum::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn estimate_json(mut est: NormEstimate<f64>, witness: bool) -> String {
    if !witness {
        est.witness = None;
    }
    serde_json::to_string_pretty(&est).expect("estimate serializes") + "\n"
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global().context("configuring the thread pool")?;
    }
    let cfg = AscentConfig::default().with_seed(cli.seed);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Norm { matrix, p, q, k, witness, starts } => {
            let op = MatrixOperator::<f64>::from_json(&read(&matrix)?).with_context(|| format!("parsing {}", matrix.display()))?;
            let cfg = match starts {
                Some(s) => cfg.with_starts(s),
                None => cfg,
            };
            let est = match (p, q) {
                (Some(p), Some(q)) => {
                    if q > p {
                        return Err(Failure::Input(anyhow!("need q <= p, got p={p}, q={q}")));
                    }
                    let prm = SummingParams::new(p, q, k.unwrap_or(op.cols().max(1)))?;
                    pi_estimate(&op, prm, &cfg)?
                }
                _ => op.operator_norm_with(&cfg),
            };
            emit(out, &estimate_json(est, witness))?;
        }
        Command::Experiment { config } => {
            let exp = ExperimentConfig::load(&config)?;
            let table = run_experiment(&exp)?;
            let target = out.map(Path::to_path_buf).or_else(|| exp.output.clone());
            match target {
                Some(p) => {
                    let file = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    write_csv(std::io::BufWriter::new(file), &exp, &table.seeds, &table)?;
                }
                None => write_csv(std::io::stdout().lock(), &exp, &table.seeds, &table)?,
            }
        }
        Command::Verify { suite, cases } => {
            let reports = run_suite(&suite, cli.seed, cases, &cfg)?;
            let text: String = reports.iter().map(|r| r.to_string()).collect();
            emit(out, &text)?;
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(Failure::Hard(format!("hard checks failed in: {}", failed.join(", "))));
            }
        }
        Command::Cotype { embed, q, k, gaussian, samples, chain } => {
            let space = EmbeddedNorm::<f64>::from_json(&read(&embed)?).with_context(|| format!("parsing {}", embed.display()))?;
            let k = k.unwrap_or(space.dim());
            let kind = if gaussian { VariableKind::Gaussian } else { VariableKind::Rademacher };
            let prm = CotypeParams::new(q, k, kind)?.with_samples(samples);
            let mut text = estimate_json(cotype_estimate(&space, prm, &cfg)?, false);
            let mut hard_fail = Vec::new();
            if chain {
                if q <= Exponent::TWO {
                    return Err(Failure::Input(anyhow!("the comparison chain needs q > 2, got {q}")));
                }
                for r in comparison_chain_report(&space, q, k, samples, &cfg)? {
                    if !r.holds && r.context.get("hard").is_some_and(|h| h == "true") {
                        hard_fail.push(r.name.clone());
                    }
                    text.push_str(&r.to_json());
                    text.push('\n');
                }
            }
            emit(out, &text)?;
            if !hard_fail.is_empty() {
                return Err(Failure::Hard(format!("hard checks failed: {}", hard_fail.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Hard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
