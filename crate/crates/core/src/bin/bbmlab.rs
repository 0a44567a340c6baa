use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bbmlab::bbm::kappa;
use bbmlab::experiment::{self, ExperimentConfig, Override};
use bbmlab::mollifiers::{bump_family, fractional_family};
use bbmlab::oracle::{self, DenseKernel};
use bbmlab::spaces::axioms;
use bbmlab::TestFunction;

#[derive(Parser)]
#[command(name = "bbmlab", version, about = "Nonlocal approximation experiments for function-space Sobolev norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML key-value or JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config stride.
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one convergence study and write report.json, series.csv, plot.svg.
    Run(RunArgs),
    /// Run the Cartesian product of `key.path=v1|v2` overrides.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Maximum number of runs in flight.
        #[arg(long, env = "BBMLAB_JOBS", default_value_t = 1)]
        jobs: usize,
        overrides: Vec<String>,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Axiom audits of every norm engine, reductions to Lebesgue and RDATI
    /// family checks.
    CheckSpaces {
        /// Random cases per engine and axiom.
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the outcomes as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Monte Carlo `∫ |ω_1|^p dσ` over the unit sphere next to the closed form.
    Sphere {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dense 1-D double sum of the nonlocal functional.
    Dense {
        /// Test function as JSON, e.g. '{"kind":"linear","v":[1.0]}'.
        #[arg(long)]
        function: String,
        /// Kernel as JSON, e.g. '{"kind":"bump","nu":0.1}'.
        #[arg(long)]
        kernel: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 1e-2)]
        resolution: f64,
    },
    /// Decreasing rearrangement straight from the distribution function.
    Rearrangement {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
        /// Cell weights; all ones when omitted.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
    },
}

fn load(args: &RunArgs) -> bbmlab::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(stride) = args.stride {
        cfg.stride = stride;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_json(value: &impl serde::Serialize) -> bbmlab::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn dispatch(cli: Cli) -> bbmlab::Result<i32> {
    match cli.command {
        Command::Run(args) => {
            let cfg = load(&args)?;
            let outcome = experiment::run(&cfg, &args.out)?;
            if let Some(m) = &outcome.mismatch {
                eprintln!("error: {m}");
            }
            println!("{}", outcome.report_path.display());
            Ok(outcome.exit_code)
        }
        Command::Sweep { run, jobs, overrides } => {
            let cfg = load(&run)?;
            let overrides: Vec<Override> = overrides.iter().map(|o| o.parse()).collect::<bbmlab::Result<_>>()?;
            let rows = experiment::sweep(&cfg, &overrides, &run.out, jobs)?;
            for r in &rows {
                let status = if r.error.is_empty() { r.verdict.clone() } else { r.error.clone() };
                println!("{} [{}] {}", r.run, r.overrides, status);
            }
            Ok(experiment::sweep_exit_code(&rows))
        }
        Command::Oracle { which } => {
            match which {
                OracleCommand::Sphere { p, n, samples, seed } => {
                    let mc = oracle::mc_sphere_moment(p, n, samples, seed)?;
                    let exact = kappa(p, n);
                    print_json(&serde_json::json!({
                        "p": p, "n": n, "samples": samples, "monte_carlo": mc,
                        "closed_form": exact, "relative_error": (mc - exact).abs() / exact,
                    }))?;
                }
                OracleCommand::Dense { function, kernel, p, q, a, b, resolution } => {
                    let f: TestFunction = serde_json::from_str(&function)?;
                    let k: DenseKernel = serde_json::from_str(&kernel)?;
                    let v = oracle::dense_1d_functional(&f, p, k, q, (a, b), resolution)?;
                    print_json(&serde_json::json!({ "value": v }))?;
                }
                OracleCommand::Rearrangement { values, weights } => {
                    let weights = if weights.is_empty() { vec![1.0; values.len()] } else { weights };
                    print_json(&oracle::rearrangement_oracle(&values, &weights)?)?;
                }
            }
            Ok(0)
        }
        Command::CheckSpaces { cases, seed, out } => {
            let outcomes = axioms::audit_all(cases, seed)?;
            let reductions = axioms::reduction_audit(cases, seed)?;
            let mut ok = true;
            for o in &outcomes {
                ok &= o.passed();
                println!(
                    "{:<6} {:<44} {:<12} {}/{} worst excess {:.3e}",
                    if o.passed() { "PASS" } else { "FAIL" },
                    o.engine,
                    format!("{:?}", o.axiom).to_lowercase(),
                    o.cases - o.failures,
                    o.cases,
                    o.worst_excess
                );
            }
            for r in &reductions {
                let pass = r.worst_defect < 1e-8;
                ok &= pass;
                println!("{:<6} reduction {:<34} worst defect {:.3e}", if pass { "PASS" } else { "FAIL" }, r.engine, r.worst_defect);
            }
            let nus: Vec<f64> = (0..20).map(|k| 10f64.powf(-3.0 + 2.9 * k as f64 / 19.0) * 0.999).collect();
            let families = [
                ("bump(n=2)", bump_family(2)),
                ("fractional(p=2, n=2)", fractional_family(2.0, 2f64.sqrt() * 2.0, 2)?),
            ];
            let mut family_report = Vec::new();
            for (name, fam) in families {
                let worst = nus
                    .iter()
                    .filter(|&&nu| fam.check_nu(nu).is_ok())
                    .map(|&nu| fam.normalization_defect(nu))
                    .collect::<bbmlab::Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                let violations = fam.monotonicity_violations(1000, seed);
                let pass = worst < 1e-8 && violations == 0;
                ok &= pass;
                println!(
                    "{:<6} family {:<37} normalization defect {:.3e}, monotonicity violations {}",
                    if pass { "PASS" } else { "FAIL" },
                    name,
                    worst,
                    violations
                );
                family_report.push(serde_json::json!({ "family": name, "normalization_defect": worst, "monotonicity_violations": violations }));
            }
            if let Some(path) = out {
                let doc = serde_json::json!({ "axioms": outcomes, "reductions": reductions, "families": family_report });
                std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
