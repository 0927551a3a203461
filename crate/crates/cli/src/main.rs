//! `rankkit`: run rankability/compressibility checks, constructions and
//! decision procedures from the command line.
//!
//! Reports go to stdout as JSON; a one-line summary goes to stderr.
//! Exit status: 0 pass/accept, 1 refuted/reject, 2 inconclusive, 3 usage
//! error or violated premise.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "rankkit", version, about = "Ranking and compression of sets of binary strings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Limits {
    /// Step budget per evaluation.
    #[arg(long, env = "RANKKIT_BUDGET", default_value_t = 100_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Check every string up to this length.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=24))]
    pub max_len: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a function ranks a set.
    VerifyRank {
        #[command(flatten)]
        target: FnOnSet,
    },
    /// Check that a function compresses a set.
    VerifyCompress {
        #[command(flatten)]
        target: FnOnSet,
        /// How many of the first strings of Σ* must be hit.
        #[arg(long, default_value_t = 0)]
        cover_count: u64,
    },
    /// Check a one-query truth-table reduction from --set to --target.
    Verify1tt {
        /// The query map.
        #[arg(long = "fn")]
        fn_ref: String,
        #[arg(long, value_enum, default_value_t = TableArg::Identity)]
        table: TableArg,
        #[arg(long)]
        set: String,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        limits: Limits,
        #[arg(long)]
        recheck: bool,
    },
    /// Build a construction on a set and run the checks it promises.
    Construct {
        #[arg(long, value_enum)]
        tag: Tag,
        #[arg(long, default_value = "finite{eps}")]
        set: String,
        #[command(flatten)]
        limits: Limits,
        /// Cover target for compression checks; 0 picks a default.
        #[arg(long, default_value_t = 0)]
        cover_count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        recheck: bool,
    },
    /// Decide membership of --x with one of the ranker-based procedures.
    Decide {
        #[arg(long = "proc", value_enum)]
        procedure: Procedure,
        #[arg(long)]
        set: String,
        #[arg(long)]
        x: String,
        #[arg(long, env = "RANKKIT_BUDGET", default_value_t = 100_000,
              value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
    /// Build a set that none of the first --count machines compresses.
    Diagonalize {
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        /// Step budget per stage.
        #[arg(long, env = "RANKKIT_BUDGET", default_value_t = 10_000,
              value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        /// Strings scanned per stage.
        #[arg(long, default_value_t = 1_000, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Back-and-forth isomorphism between cylinder(S) and its graph set.
    Isomorphism {
        #[arg(long)]
        set: String,
        /// Strings to match on each side.
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, env = "RANKKIT_BUDGET", default_value_t = 100_000,
              value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FnOnSet {
    /// identity, constant-eps, thm103, thm123, prop106, brute-rank, or a
    /// program file.
    #[arg(long = "fn")]
    pub fn_ref: String,
    #[arg(long)]
    pub set: String,
    #[command(flatten)]
    pub limits: Limits,
    /// Re-run a refuting witness and report whether it still refutes.
    #[arg(long)]
    pub recheck: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum TableArg {
    Identity,
    Negation,
    ConstantTrue,
    ConstantFalse,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Thm103,
    Thm123,
    Prop106,
    Beta1,
    Retrace,
    Separator,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Procedure {
    /// Enumerator plus ranker.
    Thm25,
    /// Complement enumerator, infinite-subset enumerator and ranker.
    Thm167,
    /// Dovetailed ranker that rejects non-members.
    VariantA,
}

/// A program file is anything that exists on disk.
pub fn program_path(fn_ref: &str) -> Option<PathBuf> {
    let p = PathBuf::from(fn_ref);
    p.is_file().then_some(p)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run::execute(&cli.command) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.json).expect("report serializes"));
            eprintln!("{}", out.summary);
            ExitCode::from(out.status as u8)
        }
        Err(e) => {
            println!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
