//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data or format.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{arity_tradeoff, build_and_bench, BenchReport, Workload};
use crate::builder::{build, verify};
use crate::corpus;
use crate::error::Error;
use crate::excess::{BpString, NodeHandle};
use crate::format::{deserialize, serialize, stats};
use crate::graph::{BlockGraph, BuildConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "blockgraph", version, about = "Compressed block graphs over repetitive strings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct BuildFlags {
    #[arg(long, default_value_t = 4)]
    arity: usize,
    #[arg(long = "leaf-len")]
    leaf_len: Option<usize>,
    #[arg(long = "affix-len")]
    affix_len: Option<usize>,
    /// Symbols to support rank/select for, e.g. `--track ab`.
    #[arg(long)]
    track: Option<String>,
    #[arg(long)]
    excess: bool,
    #[arg(long = "no-skip")]
    no_skip: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BuildFlags {
    fn config(&self) -> BuildConfig {
        BuildConfig {
            arity: self.arity,
            leaf_block_len: self.leaf_len,
            affix_len: self.affix_len,
            rank_symbols: self.track.as_ref().map(|s| s.as_bytes().to_vec()),
            enable_excess: self.excess,
            hash_seed: self.seed,
            level_skip: !self.no_skip,
            ..BuildConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    Fibonacci,
    Power,
    BpTree,
    BpRepeated,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a graph file from a text file.
    Build {
        input: PathBuf,
        #[command(flatten)]
        flags: BuildFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print S[i..i+m-1] (1-based).
    Extract { graph: PathBuf, i: usize, m: usize },
    /// Occurrences of a symbol in S[1..i].
    Rank { graph: PathBuf, symbol: String, i: usize },
    /// Position of the j-th occurrence of a symbol.
    Select { graph: PathBuf, symbol: String, j: u64 },
    /// Lowest common ancestor of two nodes given by their `(` positions.
    Lca { graph: PathBuf, u: usize, v: usize },
    /// Leftmost position of minimum excess in [i, k].
    RmqExcess { graph: PathBuf, i: usize, k: usize },
    /// Space accounting as key=value lines.
    Stats { graph: PathBuf },
    /// Check a graph file, and optionally compare it against a text.
    Verify { graph: PathBuf, text: Option<PathBuf> },
    /// Throughput and size against a plain array.
    Bench {
        input: PathBuf,
        #[command(flatten)]
        flags: BuildFlags,
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        /// Emit CSV instead of key=value.
        #[arg(long)]
        csv: bool,
        /// Also print the arity trade-off table over {2,4,8,16}.
        #[arg(long)]
        tradeoff: bool,
        /// Omit timing fields so output is reproducible.
        #[arg(long = "no-timing")]
        no_timing: bool,
    },
    /// Generate a corpus.
    Gen {
        kind: GenKind,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        sigma: usize,
        /// Base string for `power`.
        #[arg(long, default_value = "ab")]
        base: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        nodes: usize,
        #[arg(long, default_value_t = 2)]
        copies: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::ModulusBits(_) | Error::Corpus(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_err(path, e))
}

fn load(path: &Path) -> Result<BlockGraph, Failure> {
    Ok(deserialize(&read(path)?)?)
}

fn symbol(s: &str) -> Result<u8, Failure> {
    match s.as_bytes() {
        [c] => Ok(*c),
        _ => Err(Failure::Usage(format!("symbol must be a single byte, got {s:?}"))),
    }
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> Result<(), Failure> {
    out.write_all(bytes).map_err(|e| Failure::Data(e.to_string()))
}

fn strip_timing(text: &str) -> String {
    text.lines()
        .filter(|l| !(l.starts_with("build_ms=") || l.contains("_qps=")))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Build { input, flags, out: path } => {
            let text = read(&input)?;
            let g = build(&text, &flags.config())?;
            fs::write(&path, serialize(&g)).map_err(|e| io_err(&path, e))?;
            let s = stats(&g);
            emit(out, format!("n={}\nlevels={}\nz={}\ntotal_bytes={}\nbuild_attempts={}\n", s.n, s.levels, s.z, s.total_bytes, s.build_attempts).as_bytes())
        }
        Command::Extract { graph, i, m } => {
            let g = load(&graph)?;
            let mut bytes = g.extract(i, m)?;
            bytes.push(b'\n');
            emit(out, &bytes)
        }
        Command::Rank { graph, symbol: s, i } => {
            let g = load(&graph)?;
            emit(out, format!("{}\n", g.rank(symbol(&s)?, i)?).as_bytes())
        }
        Command::Select { graph, symbol: s, j } => {
            let g = load(&graph)?;
            emit(out, format!("{}\n", g.select(symbol(&s)?, j)?).as_bytes())
        }
        Command::Lca { graph, u, v } => {
            let bp = BpString::from_graph(load(&graph)?)?;
            emit(out, format!("{}\n", bp.lca(NodeHandle(u), NodeHandle(v))?.0).as_bytes())
        }
        Command::RmqExcess { graph, i, k } => {
            let bp = BpString::from_graph(load(&graph)?)?;
            emit(out, format!("{}\n", bp.min_excess_pos(i, k)?).as_bytes())
        }
        Command::Stats { graph } => emit(out, stats(&load(&graph)?).to_key_value().as_bytes()),
        Command::Verify { graph, text } => {
            let g = load(&graph)?;
            if let Some(path) = text {
                if !verify(&g, &read(&path)?) {
                    return Err(Failure::Data("graph does not match text".into()));
                }
            }
            emit(out, b"ok\n")
        }
        Command::Bench { input, flags, queries, csv, tradeoff, no_timing } => {
            let text = read(&input)?;
            let config = flags.config();
            let report = build_and_bench(&text, &config, &Workload { queries, seed: flags.seed })?;
            let mut body = if csv {
                format!("{}\n{}", BenchReport::CSV_HEADER, report.to_csv_rows())
            } else {
                report.to_key_value()
            };
            if no_timing && !csv {
                body = strip_timing(&body);
            }
            if tradeoff {
                body += "arity,levels,blocks,bytes\n";
                for row in arity_tradeoff(&text, &config, &[2, 4, 8, 16])? {
                    body += &format!("{},{},{},{}\n", row.arity, row.levels, row.blocks, row.bytes);
                }
            }
            emit(out, body.as_bytes())
        }
        Command::Gen { kind, n, sigma, base, k, nodes, copies, seed, out: path } => {
            let kind = match kind {
                GenKind::Random => corpus::CorpusKind::Random { sigma, n, seed },
                GenKind::Fibonacci => corpus::CorpusKind::Fibonacci { n },
                GenKind::Power => corpus::CorpusKind::Power { base: base.into_bytes(), k },
                GenKind::BpTree => corpus::CorpusKind::BpRandomTree { nodes, seed },
                GenKind::BpRepeated => corpus::CorpusKind::BpRepeatedTree { nodes, copies, seed },
            };
            let text = corpus::generate(&kind)?;
            match path {
                Some(p) => fs::write(&p, &text).map_err(|e| io_err(&p, e)),
                None => emit(out, &text),
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DATA
        }
    }
}
