use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use morse_knots::{chorddiag, m1};
use morse_knots::pipeline::{self, PipelineError, RunConfig, DEFAULT_PRIMES};
use morse_knots::rewriter::DEFAULT_FUEL;

#[derive(Parser)]
#[command(name = "morse", version, about = "Vassiliev invariants of Morse knots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of the invariant space modulo each prime.
    Quotient {
        #[arg(long, default_value_t = 6)]
        degree: u8,
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_PRIMES.to_vec())]
        primes: Vec<u64>,
        /// Add the reversal relations after the standard families.
        #[arg(long)]
        reversal: bool,
        /// Checkpoint directory; an existing checkpoint is resumed.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Rewrite steps allowed per monomial.
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long)]
        dump_relations: Option<PathBuf>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        strands: u8,
    },
    /// Dense corank over all monomials (degree at most 3).
    Oracle {
        #[arg(long)]
        degree: u8,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        reversal: bool,
    },
    /// Morse knots with one maximum.
    M1 {
        #[command(subcommand)]
        op: M1Op,
    },
    /// Chord diagrams of Morse knots.
    Chord {
        #[command(subcommand)]
        op: ChordOp,
    },
}

#[derive(Subcommand)]
enum ChordOp {
    /// Dimension of the Morse diagram space on 2N+1 strands.
    Dim {
        #[arg(long)]
        maxima: usize,
        #[arg(long)]
        chords: usize,
    },
    /// Dimension of the stable diagram space.
    StableDim {
        #[arg(long)]
        chords: usize,
    },
    /// Whether the forgetful map is onto in the given degree.
    Surjective {
        #[arg(long)]
        maxima: usize,
        #[arg(long)]
        chords: usize,
    },
    /// A Morse diagram whose image is the given chord diagram ("1-3,2-4").
    Present {
        #[arg(long)]
        chords: String,
        #[arg(long)]
        maxima: usize,
    },
    /// Move chord ends until each of the first 2N strands has one end.
    Arrange {
        /// Chords bottom to top, e.g. "2-3".
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        maxima: Option<usize>,
    },
}

#[derive(Subcommand)]
enum M1Op {
    Normalize { word: String },
    Mirror { word: String },
    Equal { left: String, right: String },
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn pipeline_fail(e: PipelineError) -> ExitCode {
    let code = e.exit_code() as u8;
    fail(e, code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Quotient {
            degree,
            primes,
            reversal,
            checkpoint,
            threads,
            fuel,
            dump_relations,
            report,
            strands,
        } => {
            let cfg = RunConfig {
                strands,
                cutoff: degree,
                primes,
                reversal,
                checkpoint,
                threads,
                fuel,
                dump_relations,
                ..RunConfig::default()
            };
            let result = match pipeline::run_quotient(&cfg) {
                Ok(r) => r,
                Err(e) => return pipeline_fail(e),
            };
            let json = result.to_json();
            match report {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json + "\n") {
                        return fail(e, 1);
                    }
                    for p in &result.primes {
                        println!("p={} corank={}", p.rank.prime, p.rank.corank);
                    }
                }
                None => println!("{json}"),
            }
            ExitCode::SUCCESS
        }
        Command::Oracle {
            degree,
            prime,
            reversal,
        } => match pipeline::run_oracle_with(degree, prime, reversal) {
            Ok(r) => {
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => pipeline_fail(e),
        },
        Command::M1 { op } => {
            let parse = |s: &str| m1::parse_and_normalize(s);
            let out = match op {
                M1Op::Normalize { word } => parse(&word).map(|w| w.to_string()),
                M1Op::Mirror { word } => parse(&word).map(|w| m1::mirror(&w).to_string()),
                M1Op::Equal { left, right } => {
                    parse(&left).and_then(|l| parse(&right).map(|r| m1::equal(&l, &r).to_string()))
                }
            };
            match out {
                Ok(s) => {
                    println!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e, 3),
            }
        }
        Command::Chord { op } => match chord(op) {
            Ok(s) => {
                println!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e, 3),
        },
    }
}

fn chord(op: ChordOp) -> Result<String, chorddiag::ChordError> {
    Ok(match op {
        ChordOp::Dim { maxima, chords } => json(&chorddiag::relation_matrix(maxima, chords)?.dim()),
        ChordOp::StableDim { chords } => json(&chorddiag::stable_dim(chords)?),
        ChordOp::Surjective { maxima, chords } => json(&chorddiag::check_surjectivity(maxima, chords)?),
        ChordOp::Present { chords, maxima } => {
            let d = chorddiag::parse_stable(&chords)?;
            chorddiag::present_on_strands(&d, maxima)?.to_string()
        }
        ChordOp::Arrange { diagram, maxima } => {
            let d = chorddiag::MorseChordDiagram::parse(&diagram, maxima)?;
            let r = chorddiag::arrange(&d)?;
            let mut lines: Vec<String> = r
                .trace
                .iter()
                .map(|m| format!("move chord {} from strand {} to {} (sign {})", m.position + 1, m.from_strand, m.to_strand, m.sign))
                .collect();
            lines.push(format!("result {} sign {}", r.diagram, r.sign));
            lines.join("\n")
        }
    })
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializes")
}
