mod commands;
mod config;
mod error;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pfmm::scalar::parse_rational;
use pfmm::Rational;

use commands::{Outcome, VerifyMode};
use config::{Mode, ModelConfig, ModelKind, QuiverConfig};
use error::CliError;
use output::Format;

/// Pfaffian evaluation of β=1 and β=4 eigenvalue integrals and their quiver chains.
#[derive(Parser)]
#[command(name = "pfmm", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON model configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Scalar arithmetic [default: exact].
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Gauss-Legendre nodes per continuous measure [default: 64].
    #[arg(long, global = true)]
    quadrature: Option<usize>,
    /// Truncation of the dual series for inverse averages [default: basis size + 16].
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Monte Carlo seed [default: 1].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count [default: 1000000].
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "none")]
    verify: VerifyMode,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for quadrature and sampling.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Add wall-clock time to the output.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Partition function of a single model, chain or D-type quiver.
    Partition(ModelArgs),
    /// Average of a product of characteristic polynomials or their inverses.
    Charpoly {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated points, e.g. "0,1" or "1/2,3".
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long)]
        inverse: bool,
    },
    /// Partition function of a chain.
    Chain(ModelArgs),
    /// Cartan data, quiver diagram, dual and folding.
    QuiverInfo {
        #[arg(long = "type")]
        kind: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        /// Comma-separated node sizes.
        #[arg(long)]
        ranks: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
}

fn parse_list<T>(s: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| f(t.trim()).ok_or_else(|| CliError::Config(format!("at `{what}`: cannot parse {t:?}"))))
        .collect()
}

fn load(global: &Global, default: ModelKind) -> Result<ModelConfig, CliError> {
    let mut cfg = match &global.config {
        Some(p) => ModelConfig::load(p)?,
        None => ModelConfig::bare(default),
    };
    if global.mode.is_some() {
        cfg.mode = global.mode;
    }
    cfg.quadrature = global.quadrature.or(cfg.quadrature);
    cfg.cutoff = global.cutoff.or(cfg.cutoff);
    cfg.seed = global.seed.or(cfg.seed);
    cfg.samples = global.samples.or(cfg.samples);
    Ok(cfg)
}

fn apply_model_args(cfg: &mut ModelConfig, args: &ModelArgs) {
    if let Some(m) = &args.model {
        cfg.model = m.clone();
    }
    cfg.n = args.n.or(cfg.n);
    cfg.l = args.l.or(cfg.l);
}

fn run(cli: &Cli) -> Result<(Value, Option<String>), CliError> {
    let g = &cli.global;
    let outcome = |o: Outcome| (o.doc, o.failure);
    Ok(match &cli.command {
        Command::Partition(args) => {
            let mut cfg = load(g, ModelKind::Beta1)?;
            apply_model_args(&mut cfg, args);
            outcome(commands::partition(&cfg, g.verify)?)
        }
        Command::Chain(args) => {
            let mut cfg = load(g, ModelKind::Chain)?;
            apply_model_args(&mut cfg, args);
            outcome(commands::chain(&cfg, g.verify)?)
        }
        Command::Charpoly { model, z, inverse } => {
            let mut cfg = load(g, ModelKind::Beta1)?;
            apply_model_args(&mut cfg, model);
            let z: Vec<Rational> = match z {
                Some(s) => parse_list(s, "z", |t| parse_rational(t).ok())?,
                None => cfg.z.iter().flatten().map(|r| r.0.clone()).collect(),
            };
            let inverse = *inverse || cfg.inverse.unwrap_or(false);
            outcome(commands::charpoly(&cfg, &z, inverse, g.verify)?)
        }
        Command::QuiverInfo { kind, rank, ranks } => {
            let mut cfg = load(g, ModelKind::QuiverInfo)?;
            let ranks = ranks.as_deref().map(|s| parse_list(s, "ranks", |t| t.parse().ok())).transpose()?;
            let base = cfg.quiver.take();
            let kind = kind.clone().or_else(|| base.as_ref().map(|q| q.kind.clone()));
            let rank = rank.or(base.as_ref().map(|q| q.rank)).or(ranks.as_ref().map(Vec::len));
            let (Some(kind), Some(rank)) = (kind, rank) else {
                return Err(CliError::Config("quiver-info needs --type and --rank (or a `quiver` config)".into()));
            };
            let ranks = ranks.or_else(|| base.and_then(|q| q.ranks));
            cfg.quiver = Some(QuiverConfig { kind, rank, ranks });
            (commands::quiver_info(&cfg)?, None)
        }
        Command::Verify { suite } => {
            let cfg = load(g, ModelKind::Beta1)?;
            let checks = verify::run(*suite, verify::McSettings { samples: cfg.samples(), seed: cfg.seed() });
            let failed: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.suite, c.name)).collect();
            let doc = json!({
                "command": "verify",
                "suite": suite.name(),
                "checks": checks,
                "passed": checks.len() - failed.len(),
                "failed": failed.len(),
            });
            let failure = (!failed.is_empty()).then(|| failed.join("; "));
            (doc, failure)
        }
    })
}

fn render(cli: &Cli, doc: &Value) -> String {
    if cli.global.format == Format::Csv {
        if let (Command::QuiverInfo { .. }, Some(c)) = (&cli.command, doc.get("cartan")) {
            let named: Vec<(&str, &Value)> = ["c", "d", "b", "b_bar"].iter().filter_map(|k| c.get(*k).map(|v| (*k, v))).collect();
            return output::matrices_csv(&named);
        }
    }
    output::render(doc, cli.global.format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let (mut doc, failure) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cli.global.timing {
        doc["elapsed_seconds"] = json!(start.elapsed().as_secs_f64());
    }
    let text = render(&cli, &doc);
    match &cli.global.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    match failure {
        Some(f) => {
            eprintln!("verification failed: {f}");
            ExitCode::from(4)
        }
        None => ExitCode::SUCCESS,
    }
}
