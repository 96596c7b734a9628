//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (bad input, failed
//! reconstruction, deck mismatch), 3 refused by a size guard.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use jigsaw_recon::feasibility::feasibility_mc;
use jigsaw_recon::format::{decode_deck, decode_jigsaw, decode_map, encode_deck, encode_jigsaw};
use jigsaw_recon::jigsaw::{Jigsaw, JigsawParams};
use jigsaw_recon::oracle::{deck_preimages, exact_recon_fraction, find_swap_certificates, zero_statement_bound};
use jigsaw_recon::reconstruct::{reconstruct, verify, DEFAULT_BUDGET};
use jigsaw_recon::sweep::{sweep, write_csv, SweepSpec};
use jigsaw_recon::window::default_k;

#[derive(Parser)]
#[command(name = "jigsaw", version, about = "Random edge-coloured jigsaws: generation, reconstruction and oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a uniformly random (n, q)-jigsaw.
    Gen {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        q: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the deck of a jigsaw.
    Deck {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reconstruct a jigsaw from a deck.
    Reconstruct {
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Window radius; defaults to max(1, ceil(ln n)).
        #[arg(long)]
        k: Option<u32>,
        /// Node budget per window search.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the JSON report (default: stderr).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check that a jigsaw has the given deck.
    Verify {
        #[arg(long)]
        jigsaw: PathBuf,
        #[arg(long)]
        deck: PathBuf,
    },
    /// Enumerate every jigsaw with the given deck.
    Oracle {
        #[arg(long)]
        deck: PathBuf,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        /// Allow n above the enumeration guard.
        #[arg(long)]
        force: bool,
    },
    /// Exact fraction of reconstructible (n, q)-jigsaws.
    Fraction {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        q: u32,
        #[arg(long)]
        force: bool,
    },
    /// log2 of the counting upper bound on the reconstruction probability.
    Bound {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        q: u32,
    },
    /// List domino swap certificates of a jigsaw.
    Certify {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo feasibility of a placement map against q^-gamma.
    GammaMc {
        #[arg(long)]
        map: PathBuf,
        #[arg(short)]
        q: u32,
        /// Grid side; defaults to the smallest grid holding the image.
        #[arg(short)]
        n: Option<u32>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a TOML sweep and write CSV rows.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Fill the ms column with wall-clock times.
        #[arg(long)]
        timing: bool,
    },
}

enum Failure {
    Data(String),
    Guard(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen { n, q, seed, output } => {
            let j = Jigsaw::generate(JigsawParams::new(n, q)?, seed);
            write_output(output.as_deref(), &encode_jigsaw(&j))
        }
        Command::Deck { input, output } => {
            let j = decode_jigsaw(&read_input(input.as_deref())?)?;
            write_output(output.as_deref(), &encode_deck(&j.deck()))
        }
        Command::Reconstruct {
            input,
            k,
            budget,
            output,
            report,
        } => {
            let deck = decode_deck(&read_input(input.as_deref())?)?;
            let k = k.unwrap_or_else(|| default_k(deck.params().n()));
            let r = reconstruct(&deck, k, budget);
            let record = r.to_json() + "\n";
            match &report {
                Some(p) => fs::write(p, &record).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?,
                None => eprint!("{record}"),
            }
            match r.jigsaw() {
                Some(j) => write_output(output.as_deref(), &encode_jigsaw(j)),
                None => Err(Failure::Data(format!("reconstruction failed: {}", r.reason().unwrap()))),
            }
        }
        Command::Verify { jigsaw, deck } => {
            let j = decode_jigsaw(&read_input(Some(&jigsaw))?)?;
            let d = decode_deck(&read_input(Some(&deck))?)?;
            if verify(&j, &d) {
                println!("ok");
                Ok(())
            } else {
                println!("mismatch");
                Err(Failure::Data("jigsaw does not have this deck".into()))
            }
        }
        Command::Oracle { deck, cap, force } => {
            let d = decode_deck(&read_input(Some(&deck))?)?;
            let r = deck_preimages(&d, cap, force).map_err(|e| Failure::Guard(e.to_string()))?;
            let unique = r.preimages.len() == 1 && !r.truncated;
            println!(
                "preimages={} truncated={} reconstructible={unique}",
                r.preimages.len(),
                r.truncated
            );
            Ok(())
        }
        Command::Fraction { n, q, force } => {
            let r = exact_recon_fraction(JigsawParams::new(n, q)?, force).map_err(|e| Failure::Guard(e.to_string()))?;
            println!("{r} = {} ({:.6})", r.reduced(), r.as_f64());
            Ok(())
        }
        Command::Bound { n, q } => {
            let b = zero_statement_bound(JigsawParams::new(n, q)?);
            match b.exact {
                Some(r) => println!("log2={:.6} exact={r} clamped={}", b.log2, b.clamped),
                None => println!("log2={:.6} clamped={}", b.log2, b.clamped),
            }
            Ok(())
        }
        Command::Certify { input, output } => {
            let j = decode_jigsaw(&read_input(input.as_deref())?)?;
            let text: String = find_swap_certificates(&j).iter().map(|c| format!("{c}\n")).collect();
            write_output(output.as_deref(), &text)
        }
        Command::GammaMc {
            map,
            q,
            n,
            trials,
            seed,
        } => {
            let f = decode_map(&read_input(Some(&map))?)?;
            let n = match n {
                Some(n) => n,
                None => f
                    .min_grid_side()
                    .ok_or_else(|| Failure::Data("map images must have positive coordinates".into()))?,
            };
            let est = feasibility_mc(&f, JigsawParams::new(n, q)?, trials, seed)?;
            println!(
                "gamma={} exact={:.6e} empirical={:.6e} std_err={:.3e} z={:.3} trials={} successes={}",
                est.gamma, est.exact, est.empirical, est.std_err, est.z, est.trials, est.successes
            );
            Ok(())
        }
        Command::Sweep {
            spec,
            output,
            jobs,
            timing,
        } => {
            let mut s = SweepSpec::from_toml(&read_input(Some(&spec))?)?;
            s.record_time |= timing;
            let rows = sweep(&s, jobs)?;
            let mut csv = Vec::new();
            write_csv(&rows, &mut csv)?;
            write_output(output.as_deref(), &String::from_utf8(csv)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(m)) => {
            eprintln!("refused: {m}");
            ExitCode::from(3)
        }
    }
}
