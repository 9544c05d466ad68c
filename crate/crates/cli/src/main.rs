use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rocsurf::baseline::{empirical_tcf, empirical_vus};
use rocsurf::dist::chain_rng;
use rocsurf::gibbs::{run_chains, summarize};
use rocsurf::io::{
    format_report_text, parse_chain_config_toml, parse_dataset_csv, parse_scenario_toml, summary_json,
    write_report_csv, write_surface_csv, write_trace_csv,
};
use rocsurf::rank::compute_ranks;
use rocsurf::simulate::run_study;
use rocsurf::trinormal::{surface_grid, vus};
use rocsurf::{ChainConfig, Error, PosteriorDraws, SurfaceParams};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  invalid input: unreadable or malformed file, bad flag or configuration
  3  data semantics: a class has no verified subject, or the estimator
     needs fully verified data
  4  runtime failure of the sampler or while writing output

Every flag marked [env: ...] can also be set through that variable.";

#[derive(Parser)]
#[command(name = "rocsurf", version, about = "Three-class ROC surfaces and VUS from ranks", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the trinormal rank-likelihood model to a `measurement,label` CSV.
    Fit(FitArgs),
    /// Print the VUS of surface parameters (a, b, c, d).
    Vus(VusArgs),
    /// Run a replicated simulation study from a scenario file.
    Simulate(SimulateArgs),
    /// Empirical VUS (and optionally TCFs) of a fully verified CSV.
    Empirical(EmpiricalArgs),
}

#[derive(Args)]
struct ChainFlags {
    /// Total iterations, burn-in included.
    #[arg(long, env = "ROCSURF_ITERATIONS")]
    iterations: Option<usize>,
    #[arg(long, env = "ROCSURF_BURNIN")]
    burnin: Option<usize>,
    #[arg(long, env = "ROCSURF_THIN")]
    thin: Option<usize>,
    #[arg(long, env = "ROCSURF_SEED")]
    seed: Option<u64>,
    /// Dirichlet prior weight on class 0.
    #[arg(long, env = "ROCSURF_ALPHA0")]
    alpha0: Option<f64>,
    #[arg(long, env = "ROCSURF_ALPHA1")]
    alpha1: Option<f64>,
    #[arg(long, env = "ROCSURF_ALPHA2")]
    alpha2: Option<f64>,
}

impl ChainFlags {
    fn apply(&self, cfg: &mut ChainConfig) {
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = self.burnin {
            cfg.burn_in = v;
        }
        if let Some(v) = self.thin {
            cfg.thin = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        for (k, a) in [self.alpha0, self.alpha1, self.alpha2].into_iter().enumerate() {
            if let Some(a) = a {
                cfg.dirichlet_alpha[k] = a;
            }
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with header `measurement,label`; label 3 marks unverified.
    data: PathBuf,
    /// Output directory for summary.json, trace.csv and surface.csv.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
    /// TOML file with sampler settings; flags override it.
    #[arg(long, env = "ROCSURF_CONFIG")]
    config: Option<PathBuf>,
    #[command(flatten)]
    chain: ChainFlags,
    /// Side length of the exported surface grid.
    #[arg(long, env = "ROCSURF_GRID_N", default_value_t = 50)]
    grid_n: usize,
    /// Independent chains; their kept draws are pooled.
    #[arg(long, env = "ROCSURF_CHAINS", default_value_t = 1)]
    chains: usize,
    /// Skip the per-draw Youden index.
    #[arg(long)]
    no_youden: bool,
}

#[derive(Args)]
struct VusArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, allow_negative_numbers = true)]
    d: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario TOML file.
    scenario: PathBuf,
    /// Output directory for report.csv and report.txt.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    chain: ChainFlags,
    /// Override the scenario's replicate count.
    #[arg(long, env = "ROCSURF_REPLICATES")]
    replicates: Option<usize>,
}

#[derive(Args)]
struct EmpiricalArgs {
    data: PathBuf,
    #[arg(long, allow_negative_numbers = true, requires = "c2")]
    c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "c1")]
    c2: Option<f64>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    fn runtime(e: impl std::fmt::Display) -> Self {
        Failure { code: 4, message: e.to_string() }
    }
}

/// Exit code of a library error raised while reading or validating input.
fn input_failure(e: Error) -> Failure {
    let code = match e {
        Error::InsufficientData(_) => 3,
        _ => 2,
    };
    Failure { code, message: e.to_string() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn cmd_fit(args: &FitArgs) -> Result<(), Failure> {
    let text = read(&args.data)?;
    let data = parse_dataset_csv(&text).map_err(|e| match e {
        Error::Parse { .. } => Failure::input(format!("{}: {e}", args.data.display())),
        e => input_failure(e),
    })?;
    data.check_classes_observed().map_err(input_failure)?;

    let mut cfg = match &args.config {
        Some(p) => parse_chain_config_toml(&read(p)?).map_err(Failure::input)?,
        None => ChainConfig::default(),
    };
    args.chain.apply(&mut cfg);
    cfg.compute_youden = !args.no_youden;
    cfg.keep_burn_in = true;
    cfg.validate().map_err(Failure::input)?;
    if args.chains == 0 {
        return Err(Failure::input("--chains must be at least 1"));
    }
    if args.grid_n == 0 {
        return Err(Failure::input("--grid-n must be at least 1"));
    }

    // Tie-breaking gets its own stream so it never shifts the chains.
    let rd = compute_ranks(&data, &mut chain_rng(cfg.seed, u64::MAX)).map_err(input_failure)?;
    if rd.n_tied > 0 {
        eprintln!(
            "warning: {} measurements are tied; ties were broken at random (seed {})",
            rd.n_tied, cfg.seed
        );
    }

    let chains = run_chains(&rd, &cfg, args.chains).map_err(Failure::runtime)?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::runtime(format!("{}: {e}", args.out.display())))?;
    if chains.len() == 1 {
        write_trace_csv(create(&args.out.join("trace.csv"))?, &chains[0]).map_err(Failure::runtime)?;
    } else {
        for (i, c) in chains.iter().enumerate() {
            write_trace_csv(create(&args.out.join(format!("trace_{i}.csv")))?, c).map_err(Failure::runtime)?;
        }
    }

    let pooled = PosteriorDraws::concat(chains);
    let summary = summarize(&pooled).map_err(Failure::runtime)?;
    let json = summary_json(&summary, pooled.n_unverified, rd.n_tied, cfg.seed).map_err(Failure::runtime)?;
    fs::write(args.out.join("summary.json"), json + "\n").map_err(Failure::runtime)?;

    let grid = surface_grid(&summary.surface_mean(), args.grid_n).map_err(Failure::runtime)?;
    write_surface_csv(create(&args.out.join("surface.csv"))?, &grid).map_err(Failure::runtime)?;

    println!(
        "VUS {:.6} (95% CI {:.6} to {:.6}) from {} draws",
        summary.vus.mean, summary.vus.ci_lower, summary.vus.ci_upper, summary.n_draws
    );
    Ok(())
}

fn cmd_vus(args: &VusArgs) -> Result<(), Failure> {
    let sp = SurfaceParams::new(args.a, args.b, args.c, args.d).map_err(Failure::input)?;
    println!("{:.6}", vus(&sp));
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let text = read(&args.scenario)?;
    let (mut sc, mut cfg) = parse_scenario_toml(&text).map_err(Failure::input)?;
    args.chain.apply(&mut cfg);
    if let Some(seed) = args.chain.seed {
        sc.seed = seed;
    }
    if let Some(r) = args.replicates {
        sc.replicates = r;
    }
    sc.validate().map_err(Failure::input)?;
    cfg.validate().map_err(Failure::input)?;

    let report = run_study(&sc, &cfg).map_err(Failure::runtime)?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::runtime(format!("{}: {e}", args.out.display())))?;
    write_report_csv(create(&args.out.join("report.csv"))?, &report).map_err(Failure::runtime)?;
    let text = format_report_text(&report);
    fs::write(args.out.join("report.txt"), &text).map_err(Failure::runtime)?;
    print!("{text}");
    Ok(())
}

fn cmd_empirical(args: &EmpiricalArgs) -> Result<(), Failure> {
    let data = parse_dataset_csv(&read(&args.data)?).map_err(input_failure)?;
    if data.n_unverified() > 0 {
        return Err(Failure {
            code: 3,
            message: format!(
                "{} subjects are unverified (label 3); the empirical estimator needs full verification",
                data.n_unverified()
            ),
        });
    }
    data.check_classes_observed().map_err(input_failure)?;
    let (x, y, z) = (data.class_values(0), data.class_values(1), data.class_values(2));
    let v = empirical_vus(&x, &y, &z).map_err(Failure::runtime)?;
    println!("{v:.6}");
    if let (Some(c1), Some(c2)) = (args.c1, args.c2) {
        let t = empirical_tcf(&x, &y, &z, c1, c2).map_err(Failure::input)?;
        println!("tcf1 {:.6}\ntcf2 {:.6}\ntcf3 {:.6}", t.tcf1, t.tcf2, t.tcf3);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Vus(a) => cmd_vus(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Empirical(a) => cmd_empirical(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
