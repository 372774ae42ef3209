use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num::complex::Complex64;

use podles_core::harness::{run_sweep, run_verify, write_csv, SweepConfig};
use podles_core::podles::{berezin_table, generators_podles, BerezinFixture};
use podles_core::qmetric::{dq_upper, lipnorm, mk_lower, MkConfig, TruncationConfig};
use podles_core::{AlgebraElement, Error, QParam};

const MAX_BEREZIN_N: u32 = 64;

#[derive(Parser)]
#[command(
    name = "podles",
    version,
    about = "Quantum SU(2), the Podles sphere and fuzzy sphere distance bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run all verification suites and print a JSON report.
    Verify(GridArgs),
    /// Print the Berezin coefficients B(N, m) as CSV and write a JSON fixture.
    Berezin {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the distance bounds on a (q, N) grid and write a CSV table.
    Sweep(GridArgs),
    /// Lip-norm estimate of a Podles element.
    Lipnorm {
        #[arg(long)]
        q: f64,
        /// One of A, B, Bstar, or a path to an element in JSON form.
        #[arg(long, default_value = "A")]
        element: String,
        #[arg(long, default_value_t = 24)]
        max_degree: u32,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Monge–Kantorovich lower bound next to the upper bound.
    Mk {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        q: f64,
    },
}

#[derive(Args)]
struct GridArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// Comma-separated degrees.
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<u32>>,
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

impl GridArgs {
    fn resolve(&self) -> Result<SweepConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::from_path(path)?,
            None => SweepConfig::default(),
        };
        if let Some(q) = &self.q {
            cfg.q_grid = q.clone();
        }
        if let Some(n) = &self.n {
            cfg.n_grid = n.clone();
        }
        if let Some(m) = self.max_degree {
            cfg.truncation.max_degree = m;
        }
        if let Some(t) = self.tol {
            cfg.truncation.stop_tol = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if self.jobs.is_some() {
            cfg.jobs = self.jobs;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Usage(Error),
    Check(String),
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::from(e).into()),
        _ => Ok(()),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => Failure::Check(e.to_string()),
            other => Failure::Usage(other),
        }
    }
}

fn element(spec: &str, p: &QParam) -> Result<AlgebraElement, Error> {
    let (a, b, bs) = generators_podles::<Complex64>(p);
    Ok(match spec {
        "A" => a,
        "B" => b,
        "Bstar" => bs,
        path => {
            let x = AlgebraElement::from_json(&fs::read_to_string(path)?)?;
            if !x.param().same_as(p) {
                return Err(Error::ParameterMismatch);
            }
            x
        }
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify(args) => {
            let cfg = args.resolve()?;
            let report = run_verify(&cfg)?;
            let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
            emit(&format!("{text}\n"))?;
            if let Some(dir) = &args.out {
                fs::create_dir_all(dir).map_err(Error::from)?;
                fs::write(dir.join("verify.json"), &text).map_err(Error::from)?;
            }
            let failed: u32 = report.iter().map(|o| o.failed).sum();
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} checks failed")));
            }
        }
        Command::Berezin { n, q, out } => {
            if n > MAX_BEREZIN_N {
                return Err(Failure::Usage(Error::DegreeTooLarge {
                    requested: n,
                    max: MAX_BEREZIN_N,
                }));
            }
            let p = QParam::new(q)?;
            let table = berezin_table(n, &p);
            let mut csv = String::from("m,B\n");
            for (m, b) in table.values.iter().enumerate() {
                csv.push_str(&format!("{m},{b:e}\n"));
            }
            emit(&csv)?;
            let fixture = BerezinFixture {
                q,
                n,
                b: table.values.clone(),
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("out"));
            fs::create_dir_all(&dir).map_err(Error::from)?;
            let path = dir.join(format!("berezin_N{n}_q{q}.json"));
            fs::write(&path, serde_json::to_string_pretty(&fixture).map_err(Error::from)?).map_err(Error::from)?;
            if table.values.iter().any(|b| !(*b > 0.0 && *b <= 1.0 + 1e-12)) {
                return Err(Failure::Check("coefficient outside (0, 1]".into()));
            }
        }
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            let reports = run_sweep(&cfg)?;
            let path = cfg.output_dir.join("sweep.csv");
            write_csv(&reports, &path)?;
            emit(&fs::read_to_string(&path).map_err(Error::from)?)?;
            let bad = reports.iter().filter(|r| r.dq_lower > r.dq_upper + 1e-8).count();
            if bad > 0 {
                return Err(Failure::Check(format!("{bad} rows with dq_lower > dq_upper")));
            }
        }
        Command::Lipnorm {
            q,
            element: spec,
            max_degree,
            tol,
        } => {
            let p = QParam::new(q)?;
            let x = element(&spec, &p)?;
            let cfg = TruncationConfig {
                max_degree,
                stop_tol: tol,
                ..Default::default()
            };
            if q > 0.95 {
                eprintln!("warning: norm estimates converge slowly for q > 0.95");
            }
            let est = lipnorm(&x, &cfg)?;
            emit(&(serde_json::to_string_pretty(&est).map_err(Error::from)? + "\n"))?;
        }
        Command::Mk { n, q } => {
            let p = QParam::new(q)?;
            let res = mk_lower(n, &p, &MkConfig::default());
            let upper = dq_upper(n, &p);
            let json = serde_json::json!({
                "q": q,
                "N": n,
                "dq_lower": res.value,
                "dq_upper": upper,
                "converged": res.converged,
                "start_values": res.start_values,
            });
            emit(&(serde_json::to_string_pretty(&json).map_err(Error::from)? + "\n"))?;
            if res.value > upper + 1e-8 {
                return Err(Failure::Check("lower bound exceeds upper bound".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
