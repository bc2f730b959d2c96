use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use optk::experiment::{
    iteration_count_experiment, objective_trace_experiment, success_rate_experiment, IterationRow,
    SuccessRow,
};
use optk::io::{csv_string, read_matrix, read_vector, write_csv, write_vector, CsvRow};
use optk::solvers::relative_error;
use optk::theory::BoundTable;
use optk::{
    solve, AlgorithmId, ExperimentConfig, MatrixScaling, ProblemInstance, QSpec, SolverConfig,
};

#[derive(Parser)]
#[command(
    name = "optk",
    version,
    about = "Partial-gradient optimal k-thresholding solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the RIP recovery thresholds for the given q/k ratios.
    Bounds(BoundsArgs),
    /// Solve one sparse recovery problem read from files.
    Solve(SolveArgs),
    /// Run a seeded synthetic experiment and emit CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Values of ceil(q/k); each must be at least 2.
    #[arg(long = "q-over-k", num_args = 1.., required = true)]
    q_over_k: Vec<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix file: header `m n`, then m rows of n numbers.
    #[arg(long)]
    matrix: PathBuf,
    /// Measurement vector file: header `m`, then m numbers.
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    k: usize,
    /// Partial-gradient width; defaults to min(2k, n).
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value = "PGROTP", value_parser = parse_algo)]
    algo: AlgorithmId,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Planted solution; enables the recovery stopping test and error report.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Where to write the final iterate (vector file format).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Trace,
    Iters,
    Success,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    experiment: Experiment,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// `start:stop:step` (stop included when aligned), or a comma list.
    #[arg(long, value_parser = parse_grid)]
    k_grid: Option<Grid>,
    /// Comma list of q values: `k`, `2k`, `n` or integers.
    #[arg(long, value_delimiter = ',', default_value = "2k", value_parser = parse_q)]
    q_list: Vec<QSpec>,
    #[arg(long, value_delimiter = ',', value_parser = parse_algo)]
    algos: Option<Vec<AlgorithmId>>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "inv_sqrt_m", value_parser = parse_scaling)]
    scaling: MatrixScaling,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Iteration budget of the trace experiment.
    #[arg(long, default_value_t = 70)]
    trace_iters: usize,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; CSV goes to stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_algo(s: &str) -> Result<AlgorithmId, String> {
    s.parse().map_err(|e: optk::Error| e.to_string())
}

fn parse_q(s: &str) -> Result<QSpec, String> {
    s.parse().map_err(|e: optk::Error| e.to_string())
}

fn parse_scaling(s: &str) -> Result<MatrixScaling, String> {
    s.parse().map_err(|e: optk::Error| e.to_string())
}

#[derive(Clone)]
struct Grid(Vec<usize>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid grid value '{t}'"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step == 0 || start > stop {
                return Err(format!(
                    "grid '{s}' needs start <= stop and a positive step"
                ));
            }
            Ok(Grid((start..=stop).step_by(step).collect()))
        }
        [_] => s.split(',').map(num).collect::<Result<_, _>>().map(Grid),
        _ => Err(format!(
            "grid '{s}' must be start:stop:step or a comma list"
        )),
    }
}

fn emit<R: CsvRow>(rows: &[R], path: Option<&PathBuf>) -> optk::Result<()> {
    match path {
        Some(p) => write_csv(rows, p),
        None => {
            print!("{}", csv_string(rows));
            Ok(())
        }
    }
}

fn bounds(args: &BoundsArgs) -> optk::Result<()> {
    let table = BoundTable::for_ratios(&args.q_over_k)?;
    println!(
        "{:>5}  {:>10}  {:>13}  {:>10}  {:>14}  {:>10}",
        "ratio", "pgot_root", "pgot_explicit", "pgrot_root", "pgrot_explicit", "pgrotp"
    );
    for r in &table.rows {
        println!(
            "{:>5}  {:>10.6}  {:>13.6}  {:>10.6}  {:>14.6}  {:>10.6}",
            r.ratio, r.pgot_root, r.pgot_explicit, r.pgrot_root, r.pgrot_explicit, r.pgrotp
        );
    }
    if let Some(path) = &args.csv {
        write_csv(&table.rows, path)?;
    }
    Ok(())
}

fn solve_cmd(args: &SolveArgs) -> optk::Result<()> {
    let a = read_matrix(&args.matrix)?;
    let y = read_vector(&args.y)?;
    let q = args.q.unwrap_or_else(|| (2 * args.k).min(a.cols()));
    let mut problem = ProblemInstance::with_q(a, y, args.k, q)?.stepsize(args.lambda)?;
    let truth = args.truth.as_deref().map(read_vector).transpose()?;
    if let Some(t) = &truth {
        problem = problem.planted(t.clone())?;
    }
    let mut cfg = SolverConfig::default();
    if let Some(it) = args.max_iters {
        cfg.max_iterations = it;
    }
    let report = solve(args.algo, &problem, &cfg)?;
    println!("algorithm: {}", args.algo);
    println!("termination: {}", report.termination);
    println!("iterations: {}", report.iterations);
    println!("objective: {:e}", report.final_objective());
    if let Some(t) = &truth {
        println!("relative_error: {:e}", relative_error(&report.final_x, t));
    }
    if !report.rot_unconverged.is_empty() {
        println!(
            "warning: relaxed subproblem hit its iteration cap at iterations {:?}",
            report.rot_unconverged
        );
    }
    if let Some(out) = &args.out {
        write_vector(out, &report.final_x)?;
    }
    Ok(())
}

fn bench(args: &BenchArgs) -> optk::Result<()> {
    let mut cfg = ExperimentConfig::new(args.m, args.n, args.seed);
    if let Some(grid) = &args.k_grid {
        cfg.k_grid = grid.0.clone();
    }
    cfg.q_list = args.q_list.clone();
    cfg.algorithms = match (&args.algos, args.experiment) {
        (Some(a), _) => a.clone(),
        (None, Experiment::Success) => vec![AlgorithmId::Pgrotp, AlgorithmId::Sp, AlgorithmId::Omp],
        (None, _) => vec![AlgorithmId::Pgrotp],
    };
    cfg.trials = args.trials;
    cfg.sigma = args.sigma;
    cfg.scaling = args.scaling;
    cfg.trace_iterations = args.trace_iters;
    cfg.threads = args.threads;
    if let Some(it) = args.max_iters {
        cfg.solver.max_iterations = it;
    }
    let csv = args.csv.as_ref();
    match args.experiment {
        Experiment::Trace => emit(&objective_trace_experiment(&cfg)?, csv),
        Experiment::Iters => {
            let rows: Vec<IterationRow> = iteration_count_experiment(&cfg)?
                .iter()
                .map(Into::into)
                .collect();
            emit(&rows, csv)
        }
        Experiment::Success => {
            let rows: Vec<SuccessRow> = success_rate_experiment(&cfg)?
                .iter()
                .map(Into::into)
                .collect();
            emit(&rows, csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = std::panic::catch_unwind(|| match &cli.command {
        Command::Bounds(a) => bounds(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench(a),
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(_) => ExitCode::from(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let grid = |s| parse_grid(s).unwrap().0;
        assert_eq!(grid("2:10:4"), vec![2, 6, 10]);
        assert_eq!(grid("2:11:4"), vec![2, 6, 10]);
        assert_eq!(grid("2:40:2").len(), 20);
        assert_eq!(grid("3,5,8"), vec![3, 5, 8]);
        assert_eq!(grid("7"), vec![7]);
        assert!(parse_grid("5:1:1").is_err());
        assert!(parse_grid("1:5:0").is_err());
        assert!(parse_grid("1:5").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
