use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rbmtls::experiment::{self, ExperimentConfig, NoiseCase};
use rbmtls::{io, solve, Error, Method, MtlsProblem, SolveOptions};

const EXIT_FAILURE: u8 = 1;
const EXIT_NON_UNIQUE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "rbmtls",
    version,
    about = "Mixed LS-TLS solvers over reduced biquaternions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the randomized solver comparison and write results.csv plus one SVG per case.
    Experiment {
        /// Noise cases to run (1: A_b and B noisy, 2: all of A and B, 3: B only).
        #[arg(long = "case", value_delimiter = ',', default_value = "1,2,3", value_parser = parse_case)]
        cases: Vec<NoiseCase>,
        #[arg(long, value_delimiter = ',', default_value = "90,110,130,150")]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        n1: usize,
        #[arg(long, default_value_t = 35)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Solve the system stored in an rbq problem file (A followed by B).
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "mtls")]
        method: Method,
        /// Number of exactly known leading columns (mtls only).
        #[arg(long, default_value_t = 0)]
        n1: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_case(s: &str) -> Result<NoiseCase, String> {
    s.parse::<u8>()
        .ok()
        .and_then(NoiseCase::from_number)
        .ok_or_else(|| format!("case must be 1, 2 or 3, got `{s}`"))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonUnique { .. } => EXIT_NON_UNIQUE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_FAILURE,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Experiment {
            cases,
            m_list,
            n,
            n1,
            d,
            trials,
            noise,
            seed,
            out,
        } => {
            let mut rows = Vec::new();
            for case in cases {
                let cfg = ExperimentConfig {
                    m_values: m_list.clone(),
                    n,
                    n1,
                    d,
                    trials,
                    noise_scale: noise,
                    case,
                    seed,
                };
                let table = experiment::run_experiment(&cfg)?;
                for r in &table {
                    eprintln!(
                        "case {} m {:>4}: eps1 {:.6e} eps2 {:.6e} eps3 {:.6e} skipped {}",
                        case.number(),
                        r.m,
                        r.eps1,
                        r.eps2,
                        r.eps3,
                        r.skipped
                    );
                }
                rows.extend(table);
            }
            for path in experiment::emit_outputs(&rows, &out)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Solve {
            input,
            method,
            n1,
            out,
        } => {
            let (a, b) = io::read_problem_file(&input)?;
            let n1 = match method {
                Method::Mtls => n1,
                Method::Tls => 0,
                Method::Ls => a.ncols(),
            };
            let problem = MtlsProblem::new(a, b, n1)?;
            let solution = solve::solve(&problem, method, &SolveOptions::default())?;
            let mut buf = Vec::new();
            io::write_real_csv(&mut buf, &solution.x)?;
            std::fs::write(&out, buf)?;
            let r = &solution.diagnostics;
            eprintln!(
                "{method}: correction norm {:e}, sigma_n2 {:e}, sigma_n2+1 {:e}, min sv(V22) {:e}",
                solution.correction_norm, r.sigma_n2, r.sigma_n2_plus_1, r.v22_min_singular
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
