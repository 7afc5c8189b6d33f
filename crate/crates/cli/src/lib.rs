//! Command-line front end: argument parsing, dispatch, and report output.

use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

pub mod commands;
pub mod io;
pub mod report;
pub mod selftest;

use io::CliError;
use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "moonshine", version, about = "Exact checks on replicable functions and equivariant Hecke operators")]
pub struct Cli {
    /// Truncate every input series to exponents at most this bound.
    #[arg(long, global = true)]
    pub precision: Option<i64>,
    /// `classify` only considers root-of-unity orders dividing this bound.
    #[arg(long, global = true)]
    pub conductor_bound: Option<u64>,
    /// Seed for generated families and the property suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report as JSON to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn pair2(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `g,h`")?;
    Ok((a.trim().parse().map_err(|_| "bad g")?, b.trim().parse().map_err(|_| "bad h")?))
}

fn triple(s: &str) -> Result<(i64, i64, i64), String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| "expected `k,l,m`")?;
    match v.as_slice() {
        [k, l, m] => Ok((*k, *l, *m)),
        _ => Err("expected `k,l,m`".into()),
    }
}

fn window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `P,Q`")?;
    Ok((a.trim().parse().map_err(|_| "bad P")?, b.trim().parse().map_err(|_| "bad Q")?))
}

fn keyed(s: &str) -> Result<(u64, PathBuf), String> {
    let (t, p) = s.split_once(':').ok_or("expected `t:file`")?;
    Ok((t.parse().map_err(|_| "bad replicate index")?, PathBuf::from(p)))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Faber polynomial Φ_n of a normalized series.
    Faber {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Table of H_{m,n} for m, n up to the order.
    Bivarial {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Replicates f^(t) for t up to the bound.
    Replicates {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 30)]
        max_index: u64,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Replicability on a box, optionally complete replicability.
    CheckReplicable {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: u64,
        #[arg(long)]
        complete: bool,
        #[arg(long, default_value_t = 4)]
        t: u64,
    },
    /// Extends replicates t = 1, 2, 4, ... given by their first coefficients.
    Extend7 {
        #[arg(long, num_args = 1.., value_parser = keyed, required = true)]
        inputs: Vec<(u64, PathBuf)>,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// n·T_n f at one pair.
    Hecke {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = pair2, default_value = "0,0")]
        pair: (usize, usize),
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Composition law of the Hecke operators.
    HeckeComposeCheck {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_parser = pair2)]
        pair: Option<(usize, usize)>,
        /// Window of the seeded random family used without --family.
        #[arg(long, default_value_t = 12)]
        top: i64,
    },
    /// Weak Hecke-monicity at one pair.
    MonicCheck {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_parser = pair2, default_value = "0,0")]
        pair: (usize, usize),
        #[arg(long)]
        n_max: u64,
    },
    /// Equivariant modular equation of prime order p.
    ModularEq {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_parser = pair2, default_value = "0,0")]
        pair: (usize, usize),
        #[arg(long)]
        p: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Trigonometric type and leading-term behaviour.
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// N with g^N = h^N = 1.
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        g_order: u64,
    },
    /// Conjugacy classes of commuting pairs and their SL2(Z)-orbits.
    Orbits {
        #[arg(long)]
        group: PathBuf,
    },
    /// Orbifold partition function Z(g^k, g^l h^m).
    OrbifoldZ {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Twisted denominator identity through p-degree P and q^Q.
    DenominatorCheck {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = window)]
        window: (i64, i64),
        #[arg(long, value_delimiter = ',')]
        powers: Vec<u64>,
    },
    /// Weak Hecke-monicity of the orbifold partition functions.
    FrickeSuite {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        n_max: u64,
        #[arg(long, value_parser = triple, default_value = "1,0,1")]
        pair: (i64, i64, i64),
    },
    /// Runs the acceptance criteria.
    Selftest,
}

/// Everything a run produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut report = RunReport::new(args.iter().skip(1).cloned().collect());
    let start = Instant::now();
    let result = commands::dispatch(&cli, &mut report);
    report.time("total", start.elapsed());
    let mut stderr = String::new();
    let code = match result {
        Ok(()) => report.exit_code(),
        Err(e) => {
            stderr.push_str(&format!("{e}\n"));
            2
        }
    };
    for (what, d) in &report.timings {
        stderr.push_str(&format!("time {what}: {:.3}s\n", d.as_secs_f64()));
    }
    if code != 2 {
        if let Some(path) = &cli.report {
            if let Err(e) = io::write_output(path, &report.to_json()) {
                stderr.push_str(&format!("{e}\n"));
                return Outcome {
                    code: 2,
                    stdout: report.human(),
                    stderr,
                };
            }
        }
    }
    Outcome {
        code,
        stdout: report.human(),
        stderr,
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
