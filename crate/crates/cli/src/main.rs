use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use ceerlab::ceer::{
    load_jsonl, partition_lines, product, pullback, to_jsonl, uniform_join, verify_reduction,
    CeerTable, ReductionFn, Stage,
};
use ceerlab::priority::{parse_log, verify_log};
use ceerlab::scenario::{Overrides, Scenario};
use clap::{Parser, Subcommand};

/// Ceers, graded algebras and finite-injury constructions at desk scale.
#[derive(Parser)]
#[command(name = "ceerlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, write its log and print a summary.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long)]
        maxdeg: Option<usize>,
        #[arg(long)]
        base: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        /// Rational "a/b".
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        modulus: Option<u32>,
        #[arg(long)]
        unit_exponent: Option<usize>,
        /// Log file; defaults to the scenario name with a .jsonl extension
        /// in the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one invariant suite over a log.
    Verify { log: PathBuf, suite: String },
    /// Query a ceer dump.
    Probe {
        dump: PathBuf,
        #[command(subcommand)]
        query: Probe,
    },
}

#[derive(Subcommand)]
enum Probe {
    /// Whether A and B are related by the stage.
    Related {
        a: usize,
        b: usize,
        #[arg(long)]
        stage: Option<Stage>,
    },
    /// Classes below the bound, one JSON array per line.
    Classes {
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        stage: Option<Stage>,
    },
    /// Product with another dump, as a dump.
    Product {
        other: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// Uniform join of this dump with further columns, as a dump.
    Join {
        columns: Vec<PathBuf>,
        #[arg(long)]
        bound: usize,
    },
    /// Pullback of this dump along a map, as a dump.
    Pullback {
        /// identity, const:C, scale:K, or a comma-separated value list.
        #[arg(long)]
        map: String,
        #[arg(long)]
        bound: usize,
    },
    /// Check a map as a reduction from this dump to a target.
    VerifyReduction {
        #[arg(long)]
        map: String,
        /// Target dump; defaults to the source.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        bound: usize,
        #[arg(long)]
        stage: Option<Stage>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_dump(path: &Path) -> Result<CeerTable> {
    load_jsonl(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn parse_map(spec: &str, bound: usize) -> Result<ReductionFn> {
    Ok(match spec.split_once(':') {
        None if spec == "identity" => ReductionFn::identity(bound),
        Some(("const", c)) => {
            let c: usize = c.parse().context("const value")?;
            ReductionFn::from_fn(bound, |_| c)
        }
        Some(("scale", k)) => {
            let k: usize = k.parse().context("scale factor")?;
            ReductionFn::from_fn(bound, |n| k * n)
        }
        _ => {
            let values: Vec<usize> = spec
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<Result<_, _>>()
                .with_context(|| format!("map {spec:?}"))?;
            let mut f = ReductionFn::new(bound);
            for (n, v) in values.into_iter().enumerate() {
                f.define(n, v, 0)?;
            }
            f
        }
    })
}

fn run(scenario: &Path, overrides: Overrides, out: Option<PathBuf>) -> Result<ExitCode> {
    let text = read(scenario)?;
    let s = Scenario::load(&text, &overrides).with_context(|| format!("{}", scenario.display()))?;
    let run = s.run()?;
    let out = out.unwrap_or_else(|| {
        let stem = scenario.file_stem().unwrap_or_default();
        PathBuf::from(stem).with_extension("jsonl")
    });
    fs::write(&out, run.log_jsonl()).with_context(|| format!("writing {}", out.display()))?;
    print!("{}", s.summary(&run));
    println!("log: {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(log: &Path, suite: &str) -> Result<ExitCode> {
    let records = parse_log(&read(log)?).map_err(anyhow::Error::msg)?;
    let report = verify_log(&records, suite).map_err(anyhow::Error::msg)?;
    print!("{report}");
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn probe(dump: &Path, query: Probe) -> Result<ExitCode> {
    let table = load_dump(dump)?;
    let last = table.last_stage();
    match query {
        Probe::Related { a, b, stage } => {
            println!("{}", table.related(a, b, stage.unwrap_or(last))?);
        }
        Probe::Classes { bound, stage } => {
            for line in partition_lines(&table, stage.unwrap_or(last), bound.unwrap_or(table.bound())) {
                println!("{line}");
            }
        }
        Probe::Product { other, bound } => {
            print!("{}", to_jsonl(&product(&table, &load_dump(&other)?, bound)?));
        }
        Probe::Join { columns, bound } => {
            let mut all = vec![table];
            for c in &columns {
                all.push(load_dump(c)?);
            }
            print!("{}", to_jsonl(&uniform_join(&all, bound)?));
        }
        Probe::Pullback { map, bound } => {
            let f = parse_map(&map, bound)?;
            print!("{}", to_jsonl(&pullback(&f, &table)?));
        }
        Probe::VerifyReduction { map, target, bound, stage } => {
            let f = parse_map(&map, bound)?;
            let target = match target {
                Some(t) => load_dump(&t)?,
                None => table.clone(),
            };
            let report = verify_reduction(&f, &table, &target, bound, stage.unwrap_or(last))?;
            let text = report.to_string();
            println!("{}", text.trim_end());
            if !report.positive_violations.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, stages, maxdeg, base, levels, epsilon, modulus, unit_exponent, out } => {
            let overrides = Overrides { stages, maxdeg, base, levels, epsilon, modulus, unit_exponent };
            run(&scenario, overrides, out)
        }
        Command::Verify { log, suite } => verify(&log, &suite),
        Command::Probe { dump, query } => probe(&dump, query),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
