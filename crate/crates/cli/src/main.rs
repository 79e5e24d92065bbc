//! `maxent`: estimate maximum-entropy distributions from JSON problem files.
//!
//! Exit codes: 0 success, 2 infeasible or boundary target, 3 size guard,
//! 4 parse or validation error, 5 no convergence.

mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use log::{info, warn, LevelFilter};
use maxent_core::maxent::{
    estimate_with, residuals, sample_sums, toric_ideal, toric_membership, EstimateOptions, ToricSpec,
};
use maxent_core::numbaseline::newton_dual;
use maxent_core::numkernel::format_rational;
use maxent_core::{Distribution, Error, Method, Solution};
use serde_json::{json, Value};

use crate::io::{float, parse_distribution, parse_problem, problem_to_value, solution_to_value, ProblemFile, Verification};

#[derive(Debug, Parser)]
#[command(name = "maxent", version, about = "Maximum-entropy estimation via polynomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the distribution and write a solution file.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// direct, dual, sample-dual, min-i-div, kc, newton or gis
        #[arg(long, default_value = "direct")]
        method: String,
        /// Bound on every constraint residual.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the solution here; without it the solution goes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also run the Newton baseline and report the sup-norm gap.
        #[arg(long)]
        verify: bool,
        /// Sturm-certify every KC step.
        #[arg(long)]
        certify: bool,
    },
    /// Generators of the toric ideal of the feature matrix.
    ToricIdeal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Residuals of a distribution and its toric-model membership.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        distribution: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Log-domain tolerance of the membership test.
        #[arg(long, default_value_t = 1e-10)]
        toric_tol: f64,
    },
    /// Sufficient statistics of the sample: sums, means, size.
    SampleSums {
        #[arg(long)]
        input: PathBuf,
    },
}

fn init_logging() {
    let level = match std::env::var("MAXENT_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        Ok("trace") => LevelFilter::Trace,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_target(false)
        .init();
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible(_) | Error::Boundary(_) | Error::NoPositiveSolution) => 2,
        Some(Error::SizeGuard { .. }) => 3,
        Some(Error::Convergence { .. }) => 5,
        _ => 4,
    }
}

fn emit(value: &Value, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(file: &ProblemFile, solution: &Solution, verification: Option<&Verification>) {
    println!("method    {}", solution.method);
    for (j, p) in solution.distribution.probs().iter().enumerate() {
        let label = file
            .names
            .as_ref()
            .map_or_else(|| (j + 1).to_string(), |n| n[j].clone());
        println!("  {label:>8}  {p:.6}");
    }
    println!("entropy   {:.6}", solution.entropy());
    println!("residual  {:.6e}", solution.max_residual());
    match verification {
        Some(Verification::Gap(g)) => println!("verify    newton gap {g:.6e}"),
        Some(Verification::Failed(msg)) => println!("verify    newton failed: {msg}"),
        None => {}
    }
}

fn estimate_cmd(
    input: &Path,
    method: &str,
    tol: f64,
    output: Option<&Path>,
    verify: bool,
    certify: bool,
) -> Result<()> {
    let file = parse_problem(input)?;
    let method: Method = method.parse()?;
    let opts = EstimateOptions {
        tol,
        certify,
        ..EstimateOptions::default()
    };
    let solution = estimate_with(&file.problem, method, &opts)?;
    info!(
        "{method}: entropy {:.6}, max residual {:.3e}",
        solution.entropy(),
        solution.max_residual()
    );
    let verification = verify.then(|| match newton_dual(&file.problem, 1e-12) {
        Ok((reference, _)) => Verification::Gap(solution.distribution.linf_distance(&reference.distribution)),
        Err(e) => {
            warn!("verification run failed: {e}");
            Verification::Failed(e.to_string())
        }
    });
    let mut value = solution_to_value(&solution, &file.problem, verification.as_ref());
    value["problem"] = problem_to_value(&file);
    emit(&value, output)?;
    if output.is_some() {
        report(&file, &solution, verification.as_ref());
    }
    Ok(())
}

fn toric_cmd(input: &Path, output: Option<&Path>) -> Result<()> {
    let file = parse_problem(input)?;
    let p = &file.problem;
    let spec = ToricSpec::new(p.features().to_vec(), p.prior_or_uniform())?;
    let names: Vec<String> = (1..=p.m()).map(|j| format!("x{j}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let generators: Vec<String> = toric_ideal(&spec)?
        .iter()
        .map(|g| g.display_with(&refs).to_string())
        .collect();
    emit(&json!({"variables": names, "generators": generators}), output)
}

fn check_cmd(input: &Path, distribution: &Path, tol: f64, toric_tol: f64) -> Result<()> {
    let file = parse_problem(input)?;
    let p = &file.problem;
    let dist = Distribution::new(parse_distribution(distribution)?)?;
    let mut out = serde_json::Map::new();
    if p.targets().is_some() || p.samples().is_some() {
        let r = residuals(&dist, p)?;
        let worst = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        out.insert("residuals".into(), Value::Array(r.iter().map(|&x| float(x)).collect()));
        out.insert("max_residual".into(), float(worst));
        out.insert("constraints_satisfied".into(), Value::from(worst <= tol));
    }
    let spec = ToricSpec::new(p.features().to_vec(), p.prior_or_uniform())?;
    match toric_membership(&dist, &spec, toric_tol) {
        Ok(m) => {
            out.insert("toric_member".into(), Value::from(m.member));
            out.insert("max_deviation".into(), float(m.max_deviation));
            out.insert("witness".into(), json!(m.witness));
        }
        Err(e) => {
            out.insert("toric_member".into(), Value::from(false));
            out.insert("note".into(), Value::from(e.to_string()));
        }
    }
    emit(&Value::Object(out), None)
}

fn sample_sums_cmd(input: &Path) -> Result<()> {
    let file = parse_problem(input)?;
    let p = &file.problem;
    let samples = p
        .samples()
        .ok_or_else(|| Error::InvalidArgument("$.samples: the problem has no samples".into()))?;
    let sums = sample_sums(samples, p.features())?;
    let means: Vec<String> = sums.t_bar.iter().map(format_rational).collect();
    emit(&json!({"n": sums.n, "sigma": sums.sigma, "t_bar": means}), None)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate {
            input,
            method,
            tol,
            output,
            verify,
            certify,
        } => estimate_cmd(&input, &method, tol, output.as_deref(), verify, certify),
        Command::ToricIdeal { input, output } => toric_cmd(&input, output.as_deref()),
        Command::Check {
            input,
            distribution,
            tol,
            toric_tol,
        } => check_cmd(&input, &distribution, tol, toric_tol),
        Command::SampleSums { input } => sample_sums_cmd(&input),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let code = |e: Error| exit_code(&anyhow::Error::from(e));
        assert_eq!(code(Error::Infeasible("x".into())), 2);
        assert_eq!(code(Error::Boundary("x".into())), 2);
        assert_eq!(
            code(Error::SizeGuard {
                what: "degree",
                observed: 70,
                limit: 64
            }),
            3
        );
        assert_eq!(code(Error::Integrality("x".into())), 4);
        assert_eq!(
            code(Error::Convergence {
                iterations: 1,
                residual: 1.0,
                last: vec![]
            }),
            5
        );
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 4);
    }
}
