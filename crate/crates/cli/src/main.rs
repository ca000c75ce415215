use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use charvol::cohomology::{h1_basis_rose, random_good_rep, relative_tangent_basis, SurfaceKind};
use charvol::mat::standard_frame;
use charvol::torsion::rose_volume_eval;
use charvol::trace::{coordinate_volume, goldman_bracket, symplectic_eval, FormKey, Genericity, SymplecticKey, MARGIN};
use charvol::verify::{run_scenario, scenarios, Report, RunOptions, DEFAULT_SEED};
use charvol::{Error, Representation, SurfaceConfig, C64};

#[derive(Parser)]
#[command(name = "charvol", version, about = "Volume and symplectic forms on SL(N,C) character varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (or all of them) and report pass/fail.
    Verify(VerifyArgs),
    /// Draw a seeded representation meeting the surface's genericity margins.
    Sample(SampleArgs),
    /// Evaluate a registered coordinate form at a representation.
    Eval(EvalArgs),
    /// List registered scenarios.
    List,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    scenario: Option<String>,
    /// Run every registered scenario.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Override the tolerance of every check.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Target group, e.g. sl2 or sl3.
    #[arg(long, default_value = "sl2")]
    group: String,
    #[arg(long)]
    rank: Option<usize>,
    /// S03, S11, S04, S03_SL3, S04_SL3 or rose:K.
    #[arg(long)]
    surface: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// f2_sl2, fk_sl2:K, f3_sl2, f2_sl3, fk_sl3:K, s11_sl2, s04_sl2 or s03rel_sl3.
    #[arg(long)]
    form: String,
    /// Representation JSON file, or - for stdin.
    #[arg(long)]
    rep: PathBuf,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_group(s: &str) -> Result<usize, Failure> {
    let lower = s.to_ascii_lowercase();
    lower
        .strip_prefix("sl")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Failure::Usage(format!("group must look like sl2 or sl3, got {s}")))
}

fn pair(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let opts = RunOptions {
        trials: args.trials,
        seed: args.seed,
        tolerance: args.tol,
        threads: args.threads,
    };
    let names: Vec<String> = match args.scenario {
        Some(name) => vec![name],
        None => scenarios().iter().map(|s| s.name.to_string()).collect(),
    };
    let mut reports: Vec<Report> = Vec::with_capacity(names.len());
    for name in &names {
        let report = run_scenario(name, &opts)?;
        let s = &report.summary;
        let sign = match (s.sign, s.sign_constant) {
            (Some([re, im]), Some(true)) => format!(" sign={re}{:+}i", im),
            (_, Some(false)) => " sign=varies".to_string(),
            _ => String::new(),
        };
        println!(
            "{} {}: {}/{} checks over {} trials, max residual {:.3e}{}",
            if s.pass { "PASS" } else { "FAIL" },
            s.scenario,
            s.passed,
            s.checks,
            s.trials,
            s.max_residual,
            sign
        );
        for r in report.records.iter().filter(|r| !r.pass).take(5) {
            eprintln!(
                "  trial {} ({}): {}",
                r.trial,
                r.check,
                r.reason.as_deref().unwrap_or("failed")
            );
        }
        reports.push(report);
    }
    if let Some(path) = &args.out {
        let text = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        }
        .map_err(|e| Failure::Usage(e.to_string()))?;
        write_or_print(Some(path), &text)?;
    }
    if reports.iter().all(|r| r.summary.pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn sample(args: SampleArgs) -> Result<(), Failure> {
    let n = parse_group(&args.group)?;
    let cfg = match (&args.surface, args.rank) {
        (Some(name), rank) => {
            let cfg = SurfaceConfig::from_name(name)?;
            if let Some(k) = rank {
                if k != cfg.rank {
                    return Err(Failure::Usage(format!("surface {name} has rank {}, not {k}", cfg.rank)));
                }
            }
            cfg
        }
        (None, Some(k)) => SurfaceConfig::rose(k),
        (None, None) => return Err(Failure::Usage("give --rank or --surface".into())),
    };
    let gens = match cfg.kind {
        SurfaceKind::S11 => vec![Genericity::S11Chart],
        SurfaceKind::S04 => vec![Genericity::S04Chart],
        SurfaceKind::S03Sl3 | SurfaceKind::S04Sl3 if n == 3 => vec![Genericity::Sl3Commutator(1, 2)],
        _ => vec![],
    };
    let rho = random_good_rep(n, &cfg, &gens, MARGIN, args.seed)?;
    let text = serde_json::to_string_pretty(&rho).map_err(|e| Failure::Usage(e.to_string()))?;
    write_or_print(args.out.as_ref(), &text)
}

fn read_rep(path: &PathBuf) -> Result<Representation, Failure> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Usage(e.to_string()))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn eval(args: EvalArgs) -> Result<(), Failure> {
    let rho = read_rep(&args.rep)?;
    let report = if let Ok(key) = SymplecticKey::parse(&args.form) {
        let rel = relative_tangent_basis(&rho, &key.surface())?;
        if rel.len() != 2 {
            return Err(Failure::Usage(format!("relative tangent space has dimension {}", rel.len())));
        }
        let omega = symplectic_eval(&rho, key, &rel.classes[0], &rel.classes[1], MARGIN)?;
        json!({
            "form": key.name(),
            "bracket": pair(goldman_bracket(&rho, key)?),
            "prefactor": pair(key.closed_form_prefactor(&rho)?),
            "omega": pair(omega),
        })
    } else {
        let key = FormKey::parse(&args.form)?;
        let h = h1_basis_rose(&rho)?;
        let v = coordinate_volume(&rho, key, &h.classes, MARGIN)?;
        let rose = rose_volume_eval(&rho, &h.classes, &standard_frame(rho.n())?)?;
        json!({
            "form": key.name(),
            "prefactor": pair(v.prefactor),
            "determinant": pair(v.determinant),
            "value": pair(v.value),
            "rose_volume": pair(rose),
            "ratio": pair(rose / v.value),
        })
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))?);
    Ok(())
}

fn list() {
    for s in scenarios() {
        println!("{:<20} {:>4} trials  tol {:<8e} {}", s.name, s.default_trials, s.tolerance, s.description);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a),
        Command::Eval(a) => eval(a),
        Command::List => {
            list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
