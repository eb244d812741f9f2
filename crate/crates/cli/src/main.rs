use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kloodist::cache::resolve_cache_dir;
use kloodist::report::{Cell, Report, Table};
use kloodist::verify::{Kind, Verifier, VerifyOptions};
use kloodist::{CliError, ExperimentConfig, Format, Outcome, RunOptions, Runner};

#[derive(Parser)]
#[command(name = "kloodist", version, about = "Kloosterman angle distributions over F_q(T)")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Angle-table cache; overrides KLOODIST_CACHE and the config.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output directory (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write one angle table per (a, d).
    Angles,
    /// Compare angles with the Sato-Tate measure.
    Dist,
    /// Angles by residue class.
    Ap,
    /// Angles in short intervals.
    Short,
    /// Joint angles of several parameters.
    Joint,
    /// Exact place counts.
    Census,
    /// Run the acceptance battery.
    Verify {
        /// Include the degree-8 equidistribution run (slow).
        #[arg(long)]
        deep: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    if let Cmd::Verify { deep, only, seed } = &cli.cmd {
        return verify(&cli, *deep, only, *seed);
    }
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let config = ExperimentConfig::load(path)?;
    let exp = config.validate()?;
    let env = std::env::var("KLOODIST_CACHE").ok();
    let opts = RunOptions {
        workers: cli.workers,
        cache_dir: resolve_cache_dir(cli.cache_dir.as_deref(), env.as_deref(), config.cache_dir.as_deref()),
        out: cli.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        format: cli.format,
    };
    let runner = Runner::new(exp, opts)?;
    let outcome: Outcome = match cli.cmd {
        Cmd::Angles => runner.angles()?,
        Cmd::Dist => runner.dist()?,
        Cmd::Ap => runner.ap()?,
        Cmd::Short => runner.short()?,
        Cmd::Joint => runner.joint()?,
        Cmd::Census => runner.census()?,
        Cmd::Verify { .. } => unreachable!(),
    };
    for f in &outcome.files {
        println!("{}", f.display());
    }
    Ok(outcome.failures)
}

fn verify(cli: &Cli, deep: bool, only: &[u8], seed: u64) -> Result<Vec<String>, CliError> {
    let mut opts = VerifyOptions { deep, seed, ..VerifyOptions::default() };
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Config("workers must be >= 1".into()));
        }
        opts.workers = w;
    }
    let mut v = Verifier::new(opts)?;
    let ids: Vec<u8> = if only.is_empty() { kloodist::verify::CRITERIA.collect() } else { only.to_vec() };
    let mut report = Report::new("verify");
    let mut table = Table::new("criteria", &["id", "kind", "pass", "detail"]);
    let mut failures = Vec::new();
    for id in ids {
        let r = v.run(id);
        println!("{r}");
        let kind = if r.kind == Kind::Hard { "hard" } else { "reported" };
        table.push(vec![Cell::Int(i128::from(r.id)), kind.into(), r.pass.into(), r.detail.clone().into()]);
        if r.kind == Kind::Hard && !r.pass {
            failures.push(format!("criterion {}", r.id));
        }
    }
    report.tables.push(table);
    if let Some(out) = &cli.out {
        let meta = serde_json::json!({ "deep": deep, "seed": seed }).to_string();
        report.write(out, cli.format.unwrap_or_default(), &meta)?;
    }
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in &failures {
                eprintln!("FAILED {f}");
            }
            eprintln!("error: {}", CliError::HardFailure(failures.len()));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
