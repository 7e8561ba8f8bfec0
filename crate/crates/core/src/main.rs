use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use diffweil::cli::{parse_taskfile, run, RunOptions};
use diffweil::kernels::{BoundTable, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "diffweil", version, about = "Exact differential algebra and differential Weil descent")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute the tasks of a task file
    Run {
        file: String,
        #[arg(long)]
        json: bool,
        /// Omit timing fields so output is byte-stable
        #[arg(long)]
        stable: bool,
        #[arg(long = "order-bound", value_name = "S")]
        order_bound: Option<u32>,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long = "check-certificates")]
        check_certificates: bool,
    },
    /// Print C^n_{r,m}
    Bounds {
        n: u64,
        r: u64,
        m: u64,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Syntax-check a task file
    Parse {
        file: String,
        /// Print the canonical form of the file
        #[arg(long)]
        canonical: bool,
    },
}

fn read(path: &str) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {}", path, e);
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run { file, json, stable, order_bound, budget, check_certificates } => {
            let src = match read(&file) {
                Ok(s) => s,
                Err(c) => return c,
            };
            let tf = match parse_taskfile(&src) {
                Ok(tf) => tf,
                Err(d) => {
                    eprintln!("{}:{}", file, d);
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { stable, order_bound, budget, check_certificates };
            let report = run(&tf, &opts);
            if json {
                print!("{}", report.to_json(stable));
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Cmd::Bounds { n, r, m, budget } => match BoundTable::new(budget).c(n, r, m) {
            Ok(c) => {
                println!("{}", c);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}", e);
                ExitCode::from(1)
            }
        },
        Cmd::Parse { file, canonical } => {
            let src = match read(&file) {
                Ok(s) => s,
                Err(c) => return c,
            };
            match parse_taskfile(&src) {
                Ok(tf) => {
                    if canonical {
                        print!("{}", tf.to_source());
                    } else {
                        println!("ok: {} declarations, {} tasks", tf.decls.len(), tf.tasks.len());
                    }
                    ExitCode::SUCCESS
                }
                Err(d) => {
                    eprintln!("{}:{}", file, d);
                    ExitCode::from(2)
                }
            }
        }
    }
}
