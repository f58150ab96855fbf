//! Command-line front end: build, verify, simulate, audit, draw and search schemes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rspir::search::{search_schemes_from, SearchCursor, SearchError, SearchOutcome, SearchSpace};
use rspir::sim::{parse_messages, random_messages};
use rspir::verify::audit_rate;
use rspir::{
    build_scheme, derive_decode_table, export_bipartite_dot, parse_scheme, run_protocol,
    serialize_scheme, verify, Field, Scheme, SchemeVariant,
};

#[derive(Parser)]
#[command(
    name = "rspir",
    version,
    about = "Two-database random symmetric PIR schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named construction and print its scheme file.
    Build {
        /// rotation, rotation-messages, pairwise or k4
        variant: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Field degree: symbols live in GF(2^m).
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively verify a scheme file; exit 0 iff every check passes.
    Verify { scheme: PathBuf },
    /// Simulate the protocol and print the transcript.
    Run {
        scheme: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        /// One line per message with L·blocks symbols; random messages if omitted.
        #[arg(long)]
        messages_file: Option<PathBuf>,
    },
    /// Report download cost, rate and finite-block rate.
    Rate {
        scheme: PathBuf,
        #[arg(long, default_value_t = 1)]
        blocks: u64,
    },
    /// Export the answer-pair graph in DOT format.
    Graph {
        scheme: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate every passing linear scheme in a small space.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Answer-set sizes; default to K.
        #[arg(long)]
        m1: Option<usize>,
        #[arg(long)]
        m2: Option<usize>,
        /// Cursor printed by an earlier run that ran out of budget.
        #[arg(long)]
        resume: Option<SearchCursor>,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Scheme, String> {
    parse_scheme(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn field(m: u32) -> Result<Field, String> {
    Field::new(m).map_err(|e| e.to_string())
}

fn print_schemes(schemes: &[Scheme]) {
    for (i, s) in schemes.iter().enumerate() {
        println!("# scheme {} of {}", i + 1, schemes.len());
        print!("{}", serialize_scheme(s));
        println!();
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Build { variant, k, m, out } => {
            let v =
                SchemeVariant::from_name(&variant).ok_or(format!("unknown variant {variant}"))?;
            let s = build_scheme(v, k, field(m)?).map_err(|e| e.to_string())?;
            emit(&serialize_scheme(&s), out.as_deref())?;
            Ok(true)
        }
        Command::Verify { scheme } => {
            let s = load(&scheme)?;
            let report = verify(&s).map_err(|e| e.to_string())?;
            print!("{}", report.to_text());
            Ok(report.passed())
        }
        Command::Run {
            scheme,
            seed,
            blocks,
            messages_file,
        } => {
            let s = load(&scheme)?;
            let table = derive_decode_table(&s).map_err(|e| e.to_string())?;
            let messages = match messages_file {
                Some(p) => parse_messages(&read(&p)?, s.field)
                    .map_err(|e| format!("{}: {e}", p.display()))?,
                None => random_messages(&s, seed, blocks),
            };
            let t = run_protocol(&s, &table, &messages, seed, blocks).map_err(|e| e.to_string())?;
            print!("{}", t.to_text());
            Ok(true)
        }
        Command::Rate { scheme, blocks } => {
            let s = load(&scheme)?;
            let r = audit_rate(&s);
            println!("download_cost {}", r.download_cost);
            println!("rate {}", r.rate);
            match (r.capacity, r.gap) {
                (Some(c), Some(g)) => println!("capacity {c} gap {g} {}", r.status.as_str()),
                _ => println!("capacity open"),
            }
            println!("index_bits {}", r.index_bits);
            println!("finite_rate {} blocks {}", r.finite_rate(blocks), blocks);
            Ok(true)
        }
        Command::Graph { scheme, out } => {
            let s = load(&scheme)?;
            let table = derive_decode_table(&s).map_err(|e| e.to_string())?;
            emit(&export_bipartite_dot(&s, &table), out.as_deref())?;
            Ok(true)
        }
        Command::Search {
            k,
            l,
            r,
            m,
            max_len,
            budget,
            m1,
            m2,
            resume,
        } => {
            let mut space = SearchSpace::square(k, l, r, field(m)?, max_len);
            space.m1 = m1.unwrap_or(k);
            space.m2 = m2.unwrap_or(k);
            match search_schemes_from(&space, budget, resume.as_ref()) {
                Ok(SearchOutcome::ExhaustedWithNone { nodes }) => {
                    println!("exhausted-with-none nodes {nodes}");
                    Ok(true)
                }
                Ok(SearchOutcome::Found { schemes, nodes }) => {
                    print_schemes(&schemes);
                    println!("found {} nodes {nodes}", schemes.len());
                    Ok(true)
                }
                Err(SearchError::BudgetExceeded {
                    budget,
                    found,
                    cursor,
                }) => {
                    print_schemes(&found);
                    Err(format!(
                        "budget of {budget} nodes exceeded after {} schemes; resume with --resume {cursor}",
                        found.len()
                    ))
                }
                Err(e) => Err(e.to_string()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
