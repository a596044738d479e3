use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paoi_core::bounds::{
    evaluate, kingman_bound, paoi_from_system_bound, Method, UncertaintyParams,
};
use paoi_core::calibration::{fit_theta, Scenario};
use paoi_core::simulator::{ReplicationSummary, SystemParams};

use paoi::config::{read_json, CalibrationGrid, SimulateConfig, SweepConfig, DEFAULT_N};
use paoi::dataset::{save_dataset, write_theta, ThetaDocument};
use paoi::number::format_sig;
use paoi::parallel::{build_dataset_par, replicate_par};
use paoi::report::{load_report, render_summary, save_report};
use paoi::sweep::run_sweep;
use paoi::{Error, Result};

/// Worst-case peak age-of-information bounds, simulation and calibration.
#[derive(Parser)]
#[command(name = "paoi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replicated simulation and print its summary as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Evaluate one bound and print it as a CSV row.
    Bound {
        #[arg(long)]
        method: Method,
        /// Per-source arrival rate.
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long)]
        gamma_a: Option<f64>,
        #[arg(long)]
        gamma_s: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        /// Interarrival variance (kingman only).
        #[arg(long)]
        var_a: Option<f64>,
        /// Service variance (kingman only).
        #[arg(long)]
        var_s: Option<f64>,
    },
    /// Simulate a grid, fit the variability coefficients and write them as JSON.
    Calibrate {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the fitted dataset as CSV.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a load sweep and write the comparison report as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Print the per-method error percents of a sweep report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Simulate {
            config,
            seed,
            n,
            replications,
        } => {
            let mut cfg: SimulateConfig = read_json(&config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.n = n.unwrap_or(cfg.n);
            cfg.replications = replications.unwrap_or(cfg.replications);
            let rc = cfg.replication_config()?;
            let summary = replicate_par(&rc)?;
            if summary.unstable {
                eprintln!("warning: offered load is >= 1; means have not converged");
            }
            print!("{}", simulate_csv(&cfg, &summary));
            Ok(0)
        }
        Command::Bound {
            method,
            lambda,
            mu,
            alpha,
            gamma_a,
            gamma_s,
            n,
            var_a,
            var_s,
        } => {
            let (bound, unc) = if method == Method::Kingman {
                let (Some(va), Some(vs)) = (var_a, var_s) else {
                    return Err(Error::Validation(
                        "kingman needs --var-a and --var-s".into(),
                    ));
                };
                (kingman_bound(lambda, mu, va, vs)?, None)
            } else {
                let (Some(ga), Some(gs)) = (gamma_a, gamma_s) else {
                    return Err(Error::Validation(format!(
                        "{method} needs --gamma-a and --gamma-s"
                    )));
                };
                let unc = UncertaintyParams::new(alpha, ga, gs)?;
                let sys = SystemParams::new(lambda, mu, n, method.sources())?;
                (evaluate(method, &sys, &unc)?, Some(unc))
            };
            let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_default();
            println!(
                "{},{},{},{},{},{},{},{},{}",
                method.name(),
                format_sig(lambda),
                format_sig(mu),
                opt(unc.map(|u| u.alpha())),
                opt(unc.map(|u| u.gamma_a())),
                opt(unc.map(|u| u.gamma_s())),
                bound.n.map(|n| n.to_string()).unwrap_or_default(),
                format_sig(bound.value),
                format_sig(paoi_from_system_bound(&bound, lambda)),
            );
            Ok(0)
        }
        Command::Calibrate {
            scenario,
            grid,
            out,
            dataset,
            seed,
        } => {
            let mut g: CalibrationGrid = read_json(&grid)?;
            g.seed = seed.unwrap_or(g.seed);
            let points = g.points(scenario)?;
            let (data, failures) = build_dataset_par(&points, scenario, &g.settings());
            for (i, e) in &failures {
                eprintln!("warning: grid point {i} skipped: {e}");
            }
            if let Some(path) = &dataset {
                save_dataset(&data, path)?;
            }
            let coefficients = fit_theta(&data, scenario)?;
            let doc = ThetaDocument {
                coefficients,
                provenance: format!(
                    "least squares over {} of {} grid points; n {}, {} replications, warmup {}, seed {}",
                    data.len(),
                    points.len(),
                    g.n,
                    g.replications,
                    g.warmup,
                    g.seed
                ),
            };
            write_theta(&doc, &out)?;
            println!(
                "{},{},{},{}",
                scenario.name(),
                format_sig(coefficients.theta0),
                format_sig(coefficients.theta1),
                format_sig(coefficients.theta2)
            );
            Ok(0)
        }
        Command::Sweep {
            config,
            out,
            seed,
            n,
            replications,
        } => {
            let mut cfg = SweepConfig::load(&config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.n = n.unwrap_or(cfg.n);
            cfg.replications = replications.unwrap_or(cfg.replications);
            let report = run_sweep(&cfg)?;
            for issue in &report.issues {
                let method = issue.method.map_or("simulation", |m| m.name());
                eprintln!(
                    "warning: lambda {}: {method}: {}",
                    format_sig(issue.lambda),
                    issue.message
                );
            }
            if !report.extrapolated.is_empty() {
                let ls: Vec<String> = report.extrapolated.iter().map(|l| format_sig(*l)).collect();
                eprintln!(
                    "note: mapped gamma_s is negative (regression extrapolating) at lambda {}",
                    ls.join(", ")
                );
            }
            save_report(&report, &out)?;
            print!("{}", render_summary(&report));
            if report.failed() {
                eprintln!("error: every grid point failed");
                return Ok(2);
            }
            Ok(0)
        }
        Command::Report { input } => {
            print!("{}", render_summary(&load_report(&input)?));
            Ok(0)
        }
    }
}

fn simulate_csv(cfg: &SimulateConfig, s: &ReplicationSummary) -> String {
    let [p1, p2] = s.mean_paoi_by_source.unwrap_or([s.mean_paoi, f64::NAN]);
    let fields = [
        cfg.scenario.name().to_string(),
        format_sig(cfg.arrival.rate()),
        format_sig(cfg.service.rate()),
        cfg.n.to_string(),
        s.replications.to_string(),
        format_sig(s.warmup),
        format_sig(s.mean_paoi),
        format_sig(s.ci95_paoi),
        format_sig(s.mean_system_time),
        format_sig(s.ci95_system_time),
        format_sig(p1),
        format_sig(p2),
        s.unstable.to_string(),
    ];
    format!(
        "scenario,lambda,mu,n,replications,warmup,mean_paoi,ci95_paoi,mean_system_time,\
         ci95_system_time,mean_paoi_source1,mean_paoi_source2,unstable\n{}\n",
        fields.join(",")
    )
}
