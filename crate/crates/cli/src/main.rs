//! Command-line surface for the online broadcast range-assignment toolkit:
//! instance generation, strategy simulation, offline oracles, closed-form
//! bounds, LP export, and batch sweeps.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 invariant
//! violation, 3 instance over a solver size limit.

mod lp;
mod sweep;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use rangecast::bounds::{
    alpha_star, f_star_upper, gen_1d_nn_lb, gen_1d_universal, gen_2d_nn_lb, gen_random,
    gen_recursive_squares, universal_constants, Family,
};
use rangecast::oracle::{approx_5alpha, solve_optimal};
use rangecast::strategies::{verify_dual_feasibility, Simulation, StepAction};
use rangecast::{
    cost_alpha, simulate, Alpha, ArrivalInstance, Error, Space, StrategyConfig, StrategyKind,
};

#[derive(Parser)]
#[command(
    name = "rangecast",
    version,
    about = "Online broadcast range assignment: strategies, oracles, bounds, and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file from a named generator
    Generate {
        #[command(subcommand)]
        generator: Generator,
    },
    /// Run one strategy over an instance and emit a CSV trace plus summary
    Simulate {
        /// Instance file (JSON)
        instance: PathBuf,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Distance-power gradient
        #[arg(long)]
        alpha: f64,
        /// Expansion factor for knn
        #[arg(long, default_value_t = 2.0)]
        k: f64,
        /// Expansion factor for the dual strategy
        #[arg(long, default_value_t = 4.0)]
        gamma: f64,
        /// Write the CSV trace here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance offline, exactly or with the approximation
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Run the dual-based approximation instead of the exact solver
        #[arg(long)]
        approx: bool,
    },
    /// Print closed-form constants and bounds
    Bounds {
        /// Distance-power gradient
        #[arg(long)]
        alpha: Option<f64>,
        /// Print the charge upper bound for the given alpha
        #[arg(long)]
        fstar: bool,
        /// Print the minimizing exponent of the charge bound and its value
        #[arg(long = "alpha-star")]
        alpha_star: bool,
        /// Optimizer tolerance
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Write the covering LP in LP text format
    ExportLp {
        instance: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = FormArg::Primal)]
        form: FormArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch experiment from a JSON spec file
    Sweep {
        /// Experiment spec (JSON)
        spec: PathBuf,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// Four-point line sequence with nearest-neighbor ratio (1-delta)^a + 1
    #[command(name = "nn-lb-1d")]
    NnLb1d {
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 19-point plane construction forcing nearest-neighbor near ratio 7.6
    #[command(name = "nn-lb-2d")]
    NnLb2d {
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adversary family on the line (three points, optionally mirrored)
    #[command(name = "universal-1d")]
    Universal1d {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long, value_enum, default_value_t = BranchArg::F2)]
        branch: BranchArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nested subsquare centers with constant per-round quadratic charge
    RecursiveSquares {
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded uniform instance in the chosen space
    Random {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Nn,
    Ci,
    Knn,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Line,
    Plane,
    Metric,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Line => Space::Line,
            SpaceArg::Plane => Space::Plane,
            SpaceArg::Metric => Space::Metric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    F1,
    F2,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormArg {
    Primal,
    Dual,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 }; // help/version exit cleanly
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code(&err));
        }
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::TooLarge { .. }) => 3,
        Some(Error::InvariantViolation(_)) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { generator } => cmd_generate(generator),
        Command::Simulate {
            instance,
            strategy,
            alpha,
            k,
            gamma,
            out,
        } => cmd_simulate(&instance, strategy, alpha, k, gamma, out.as_deref()),
        Command::Oracle {
            instance,
            alpha,
            approx,
        } => cmd_oracle(&instance, alpha, approx),
        Command::Bounds {
            alpha,
            fstar,
            alpha_star: want_alpha_star,
            tol,
        } => cmd_bounds(alpha, fstar, want_alpha_star, tol),
        Command::ExportLp {
            instance,
            alpha,
            form,
            out,
        } => cmd_export_lp(&instance, alpha, form, out.as_deref()),
        Command::Sweep { spec } => cmd_sweep(&spec),
    }
}

fn load_instance(path: &std::path::Path) -> anyhow::Result<ArrivalInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(ArrivalInstance::from_json_str(&text)?)
}

fn emit_instance(inst: &ArrivalInstance, out: Option<PathBuf>) -> anyhow::Result<()> {
    let text = inst.to_json_string();
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_generate(generator: Generator) -> anyhow::Result<()> {
    match generator {
        Generator::NnLb1d { delta, x, out } => emit_instance(&gen_1d_nn_lb(delta, x)?, out),
        Generator::NnLb2d { epsilon, out } => emit_instance(&gen_2d_nn_lb(epsilon)?, out),
        Generator::Universal1d {
            alpha,
            x,
            branch,
            out,
        } => {
            let family = match branch {
                BranchArg::F1 => Family::F1,
                BranchArg::F2 => Family::F2,
            };
            emit_instance(&gen_1d_universal(Alpha::new(alpha)?, x, family)?, out)
        }
        Generator::RecursiveSquares { rounds, out } => {
            emit_instance(&gen_recursive_squares(rounds)?, out)
        }
        Generator::Random {
            space,
            n,
            seed,
            out,
        } => emit_instance(&gen_random(space.into(), n, seed)?, out),
    }
}

fn build_config(
    strategy: StrategyArg,
    alpha: f64,
    k: f64,
    gamma: f64,
) -> anyhow::Result<StrategyConfig> {
    let alpha = Alpha::new(alpha)?;
    let kind = match strategy {
        StrategyArg::Nn => StrategyKind::NearestNeighbor,
        StrategyArg::Ci => StrategyKind::CheapestIncrease,
        StrategyArg::Knn => StrategyKind::KNearestNeighbor { factor: k },
        StrategyArg::Dual => StrategyKind::DualOnline { gamma },
    };
    Ok(StrategyConfig::new(kind, alpha)?)
}

fn trace_csv(sim: &Simulation) -> String {
    let mut csv = String::from("j,action,center,old_range,new_range,cost_delta,y_j\n");
    for step in &sim.steps {
        let y = step
            .dual
            .as_ref()
            .map(|d| d.y_value.to_string())
            .unwrap_or_default();
        match step.action {
            StepAction::Covered => {
                csv.push_str(&format!("{},covered,,,,{},{y}\n", step.arrival, step.cost_delta));
            }
            StepAction::Raised {
                center,
                old_range,
                new_range,
            } => {
                csv.push_str(&format!(
                    "{},raised,{center},{old_range},{new_range},{},{y}\n",
                    step.arrival, step.cost_delta
                ));
            }
        }
    }
    csv
}

fn cmd_simulate(
    path: &std::path::Path,
    strategy: StrategyArg,
    alpha: f64,
    k: f64,
    gamma: f64,
    out: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let inst = load_instance(path)?;
    let config = build_config(strategy, alpha, k, gamma)?;
    let sim = simulate(&inst, &config);
    sim.trace.validate(&inst, config.alpha)?;
    if let Some(dual) = &sim.dual {
        let y = dual.values();
        for arrived in 1..=y.len() {
            verify_dual_feasibility(&inst, config.alpha, &y[..arrived])?;
        }
    }

    let csv = trace_csv(&sim);
    match out {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    eprintln!("total_cost={}", sim.total_cost());
    if let Some(dual) = &sim.dual {
        eprintln!("sum_y={}", dual.total());
    }
    Ok(())
}

fn cmd_oracle(path: &std::path::Path, alpha: f64, approx: bool) -> anyhow::Result<()> {
    let inst = load_instance(path)?;
    let alpha = Alpha::new(alpha)?;
    if !approx {
        let res = solve_optimal(&inst, alpha)?;
        println!("optimal_cost={}", res.cost);
        println!("states_expanded={}", res.states_expanded);
        let ranges: Vec<String> = res.assignment.ranges().iter().map(f64::to_string).collect();
        println!("ranges={}", ranges.join(" "));
    } else {
        let (ranges, cert) = approx_5alpha(&inst, alpha)?;
        let cost = cost_alpha(&ranges, alpha);
        let factor = 5.0f64.powf(alpha.get());
        println!("approx_cost={cost}");
        println!("sum_y={}", cert.dual_total);
        println!("factor={factor}");
        println!("bound={}", factor * cert.dual_total);
        println!("clusters={}", cert.clusters.len());
        let feasible = (1..inst.len()).all(|j| {
            (0..j).any(|i| rangecast::instance::within_range(inst.dist(i, j), ranges.get(i)))
        });
        let within_bound = cost <= factor * cert.dual_total * (1.0 + 1e-9) + 1e-12;
        println!("certificate_ok={}", feasible && within_bound);
        if !(feasible && within_bound) {
            return Err(Error::InvariantViolation(
                "approximation certificate failed".into(),
            )
            .into());
        }
    }
    Ok(())
}

fn cmd_bounds(alpha: Option<f64>, fstar: bool, want_alpha_star: bool, tol: f64) -> anyhow::Result<()> {
    if want_alpha_star {
        let (arg, val) = alpha_star(tol)?;
        println!("alpha_star={arg}");
        println!("minimum={val}");
        return Ok(());
    }
    let raw = alpha.ok_or_else(|| Error::InvalidParameter("--alpha is required".into()))?;
    let alpha = Alpha::new(raw)?;
    if fstar {
        println!("f_star={}", f_star_upper(alpha)?);
        return Ok(());
    }
    let uc = universal_constants(alpha, tol)?;
    println!("alpha={}", uc.alpha);
    println!("c_alpha={}", uc.c_alpha);
    println!("delta_alpha={}", uc.delta_alpha);
    println!("evaluations={}", uc.evaluations);
    Ok(())
}

fn cmd_export_lp(
    path: &std::path::Path,
    alpha: f64,
    form: FormArg,
    out: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let inst = load_instance(path)?;
    let alpha = Alpha::new(alpha)?;
    let text = lp::write_lp(
        &inst,
        alpha,
        match form {
            FormArg::Primal => lp::LpForm::Primal,
            FormArg::Dual => lp::LpForm::Dual,
        },
    );
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_sweep(spec_path: &std::path::Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", spec_path.display()))?;
    let spec: sweep::ExperimentSpec = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("bad experiment spec: {e}")))?;
    let csv = sweep::run_sweep(&spec)?;
    match &spec.out {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
