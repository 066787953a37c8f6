use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use gapstring::artifact::{Answer, Artifact, ArtifactKind, Mode, Query};
use gapstring::bench::{run_bench, BenchSpec};
use gapstring::gen::{random_collection, random_query, random_text, rng};
use gapstring::persist::{BuildOptions, Index};
use gapstring::ssi::{BackendConfig, BackendKind};
use gapstring::stats::QueryStats;
use gapstring::verify::verify;
use gapstring::{Error, ErrorClass};

/// Exit codes: 0 ok, 1 I/O, 2 malformed input, 3 guard or memory budget,
/// 4 verification failure or digest mismatch.
#[derive(Parser)]
#[command(name = "gapstring", version, about = "Gapped string and set intersection indexes")]
struct Cli {
    /// Seed for hashing, generators and verification.
    #[arg(long, global = true, default_value_t = BackendConfig::default().seed)]
    seed: u64,
    /// Shifted-set-intersection backend: linear, full or small-universe.
    #[arg(long, global = true, default_value = "linear")]
    backend: String,
    /// Size-class exponent for the small-universe backend.
    #[arg(long, global = true, default_value_t = 0.5)]
    delta: f64,
    /// Print instrumentation counters after every query result.
    #[arg(long, global = true)]
    count_queries: bool,
    /// Byte budget for tabulated backends.
    #[arg(long, global = true, default_value_t = BackendConfig::default().mem_budget)]
    mem_budget: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index from a set file or a text file and persist it.
    Build {
        /// ssi, gapped-set, gapped-string, jumbled or smallest-shift.
        #[arg(long)]
        kind: ArtifactKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer every line of a query file.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value = "report")]
        mode: Mode,
        /// Print the covering plan of each gapped-set query as comments.
        #[arg(long)]
        plan: bool,
    },
    /// Compare the index against brute-force oracles on random queries.
    Verify {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Run a benchmark spec and print one JSON record per line.
    Bench {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Generate seeded instances and queries.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Random set file.
    Sets {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        u: i64,
    },
    /// Random lowercase text.
    Text {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        sigma: u8,
    },
    /// Random query lines for an existing index.
    Queries {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        count: usize,
    },
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Io => 1,
        ErrorClass::Format => 2,
        ErrorClass::Guard => 3,
        ErrorClass::Verification => 4,
    }
}

fn read(path: &PathBuf) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {}", path.display(), e))))
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn counters_line(st: &QueryStats) -> String {
    format!("# {}\n", st)
}

/// Result block for one query line, or the error it raised.
fn answer_line(artifact: &Artifact, line: &str, lineno: usize, mode: Mode, plan: bool, counters: bool) -> Result<String, Error> {
    let q = artifact.parse_query(line, lineno)?;
    let mut out = String::new();
    if let (true, Artifact::GappedSet(g), Query::Gapped { alpha, beta, .. }) = (plan, artifact, &q) {
        if let Some(p) = g.plan(*alpha, *beta)? {
            for l in p.to_string().lines() {
                out.push_str(&format!("# {}\n", l));
            }
        }
    }
    let mut st = QueryStats::default();
    let ans: Answer = artifact.execute(&q, mode, &mut st)?;
    out.push_str(&ans.to_string());
    if counters {
        out.push_str(&counters_line(&st));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let backend = BackendKind::parse(&cli.backend, cli.delta)?;
    let config = BackendConfig { seed: cli.seed, mem_budget: cli.mem_budget };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Cmd::Build { kind, input, out: path } => {
            let opts = BuildOptions { backend, config, instrumented: cli.count_queries };
            let idx = Index::build(kind, read(&input)?, opts)?;
            idx.save(&path)?;
            writeln!(out, "{}", json(idx.manifest()))?;
            Ok(0)
        }
        Cmd::Query { index, queries, mode, plan } => {
            let idx = Index::load(&index)?;
            let counters = cli.count_queries || idx.manifest().instrumented;
            let text = String::from_utf8(read(&queries)?).map_err(|_| Error::Format("query file is not UTF-8".into()))?;
            let lines: Vec<(usize, &str)> =
                text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(n, l)| (n + 1, l)).collect();
            let results: Vec<Result<String, Error>> = lines
                .par_iter()
                .map(|&(n, l)| answer_line(idx.artifact(), l, n, mode, plan, counters))
                .collect();
            let mut worst = 0;
            for (k, r) in results.into_iter().enumerate() {
                if k > 0 {
                    writeln!(out)?;
                }
                match r {
                    Ok(block) => out.write_all(block.as_bytes())?,
                    Err(e) => {
                        eprintln!("error: {}", e);
                        writeln!(out, "ERROR {}", e)?;
                        worst = worst.max(exit_code(e.class()));
                    }
                }
            }
            Ok(worst)
        }
        Cmd::Verify { index, trials } => {
            let idx = Index::load(&index)?;
            let report = verify(idx.artifact(), trials, cli.seed)?;
            writeln!(out, "{}", json(&report))?;
            match &report.counterexample {
                None => Ok(0),
                Some(c) => {
                    eprintln!("counterexample: {}", c);
                    Ok(exit_code(ErrorClass::Verification))
                }
            }
        }
        Cmd::Bench { spec } => {
            let raw = read(&spec)?;
            let spec: BenchSpec = if raw.iter().all(u8::is_ascii_whitespace) {
                BenchSpec::default()
            } else {
                serde_json::from_slice(&raw).map_err(|e| Error::Format(format!("bench spec: {}", e)))?
            };
            for rec in run_bench(&spec, cli.seed, &config)? {
                writeln!(out, "{}", json(&rec))?;
            }
            Ok(0)
        }
        Cmd::Gen { what } => {
            let mut r = rng(cli.seed);
            match what {
                GenCmd::Sets { k, max_size, u } => out.write_all(random_collection(&mut r, k, max_size, u)?.to_text().as_bytes())?,
                GenCmd::Text { n, sigma } => out.write_all(&random_text(&mut r, n, sigma))?,
                GenCmd::Queries { index, count } => {
                    let idx = Index::load(&index)?;
                    for _ in 0..count {
                        writeln!(out, "{}", random_query(&mut r, idx.artifact()))?;
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(e.class()))
        }
    }
}
