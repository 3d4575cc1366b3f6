//! `graphreg` command-line tool: generate instances, build and verify
//! regularity partitions, run induced removal and report on the results.
//!
//! Every run prints one JSON summary on stdout with `schema: 1`. Exit status
//! is 0 on success, 1 on bad input or domain errors, 2 when a verification
//! fails, 3 when a randomized step runs out of attempts and 64 on usage
//! errors.

mod common;
mod ctx;
mod gen;
mod partition;
mod removal;
mod report;
mod tools;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use graphreg::Error;
use serde::Serialize;
use serde_json::json;

use ctx::{Ctx, Outcome, UsageError};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "graphreg", version, about = "Regularity partitions of dense graphs")]
struct Cli {
    /// Root of every random stream used by the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Main output file of the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the run manifest here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Generate graphs and lower-bound instances.
    #[command(subcommand)]
    Gen(gen::Gen),
    /// Build partitions and edit sets.
    #[command(subcommand)]
    Partition(partition::Partition),
    /// Check claims about existing files.
    #[command(subcommand)]
    Verify(verify::Verify),
    /// Induced removal.
    #[command(subcommand)]
    Removal(removal::Removal),
    /// Numeric helpers and sampled diagnostics.
    #[command(subcommand)]
    Tools(tools::Tools),
    /// Tables for external plotting.
    #[command(subcommand)]
    Report(report::Report),
}

impl Command {
    fn name(&self) -> String {
        let (group, sub) = match self {
            Command::Gen(c) => ("gen", c.name()),
            Command::Partition(c) => ("partition", c.name()),
            Command::Verify(c) => ("verify", c.name()),
            Command::Removal(c) => ("removal", c.name()),
            Command::Tools(c) => ("tools", c.name()),
            Command::Report(c) => ("report", c.name()),
        };
        format!("{group} {sub}")
    }

    fn run(&self, ctx: &mut Ctx) -> Result<Outcome> {
        match self {
            Command::Gen(c) => gen::run(c, ctx),
            Command::Partition(c) => partition::run(c, ctx),
            Command::Verify(c) => verify::run(c, ctx),
            Command::Removal(c) => removal::run(c, ctx),
            Command::Tools(c) => tools::run(c, ctx),
            Command::Report(c) => report::run(c, ctx),
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 64;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Verification(_)) => 2,
        Some(Error::RetryExhausted { .. }) => 3,
        _ => 1,
    }
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    if e.downcast_ref::<UsageError>().is_some() {
        return "usage";
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Domain(_)) => "domain",
        Some(Error::Refused(_)) => "refused",
        Some(Error::Verification(_)) => "verification",
        Some(Error::RetryExhausted { .. }) => "retry-exhausted",
        Some(Error::Parse { .. }) => "parse",
        None => "io",
    }
}

fn print_json(v: &serde_json::Value) {
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, v);
    let _ = writeln!(out);
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("graphreg: {e}");
            return ExitCode::from(1);
        }
    }
    let name = cli.command.name();
    let params = serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null);
    let mut ctx = Ctx::new(cli.seed, cli.out.clone());
    let res = cli.command.run(&mut ctx);

    let (body, code) = match res {
        Ok(o) => {
            let manifest = ctx.manifest(argv, cli.threads, params);
            if let Some(path) = &cli.manifest {
                let text = serde_json::to_string_pretty(&manifest).unwrap_or_default() + "\n";
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("graphreg: writing {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            if let Some(text) = o.csv {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            let code = if o.passed { 0 } else { 2 };
            (
                json!({ "schema": SCHEMA, "command": name, "ok": o.passed, "result": o.result, "manifest": manifest }),
                code,
            )
        }
        Err(e) => {
            eprintln!("graphreg: {e:#}");
            let manifest = ctx.manifest(argv, cli.threads, params);
            let err = json!({ "kind": error_kind(&e), "message": format!("{e:#}") });
            (
                json!({ "schema": SCHEMA, "command": name, "ok": false, "error": err, "manifest": manifest }),
                exit_code(&e),
            )
        }
    };
    print_json(&body);
    ExitCode::from(code)
}
