//! `tcomplete`: file-based front end to the completion library.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
//! `TCOMPLETE_THREADS` (or `--threads`) sets the slice-level worker count.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tcomplete::experiment::{run_sweep_csv, ExperimentSpec, Method, SolverConfig};
use tcomplete::inpaint::{image_config, inpaint, Sampling};
use tcomplete::io::{load_png, read_t3b, save_png, write_t3b};
use tcomplete::parallel::{self, THREADS_ENV};
use tcomplete::{
    psnr, random_tubal_mask, relative_error, solve_admm, synth_low_tubal_rank, tccur, tubal_rank,
    AdmmConfig, BUpdate, Error, IcurcConfig, StopRule, TubalMask,
};

#[derive(Parser)]
#[command(
    name = "tcomplete",
    version,
    about = "Low-tubal-rank tensor completion"
)]
struct Cli {
    /// Worker threads for per-slice work; overrides TCOMPLETE_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random low-tubal-rank tensor, optionally with a mask and its observations.
    Synth(SynthArgs),
    /// Complete a partially observed T3B tensor.
    Complete(CompleteArgs),
    /// Drop pixels from an RGB PNG and fill them back in.
    Inpaint(InpaintArgs),
    /// Run a synthetic sweep from a JSON spec, appending rows to a CSV file.
    Bench(BenchArgs),
    /// Describe a T3B tensor, PNG image or mask file.
    Info(InfoArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, num_args = 3, value_names = ["N1", "N2", "N3"], required = true)]
    dims: Vec<usize>,
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also draw a tubal mask with this sampling ratio.
    #[arg(long, requires = "mask_out")]
    ratio: Option<f64>,
    #[arg(long, default_value_t = 0)]
    mask_seed: u64,
    #[arg(long, requires = "ratio")]
    mask_out: Option<PathBuf>,
    /// Write the observed tensor P_Ω(X) here.
    #[arg(long, requires = "ratio")]
    observed_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Tnn,
    Tl12,
    Tccur,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Tnn => Method::Tnn,
            MethodArg::Tl12 => Method::Tl12,
            MethodArg::Tccur => Method::Tccur,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StopArg {
    RelativeChange,
    ObservedResidual,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "tl12")]
    method: MethodArg,
    /// ADMM weighting parameter.
    #[arg(long)]
    rho: Option<f64>,
    /// ADMM stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Regularizer weight; the prox threshold is lambda / rho.
    #[arg(long)]
    lambda: Option<f64>,
    /// Grow rho by 5% per iteration, up to 100.
    #[arg(long)]
    rho_growth: bool,
    /// Update the multiplier with the previous X iterate.
    #[arg(long)]
    literal_b_update: bool,
    #[arg(long, value_enum)]
    stop: Option<StopArg>,
    /// TCCUR target rank.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    core_rows: Option<usize>,
    #[arg(long)]
    core_cols: Option<usize>,
    /// TCCUR stopping tolerance.
    #[arg(long)]
    eps: Option<f64>,
    /// Seed for random masks and TCCUR index draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn apply(&self, base: SolverConfig) -> SolverConfig {
        let mut admm = base.admm;
        admm.rho = self.rho.unwrap_or(admm.rho);
        admm.tol = self.tol.unwrap_or(admm.tol);
        admm.max_iters = self.max_iters.unwrap_or(admm.max_iters);
        admm.lambda_weight = self.lambda.unwrap_or(admm.lambda_weight);
        admm.rho_growth |= self.rho_growth;
        if self.literal_b_update {
            admm.b_update = BUpdate::Literal;
        }
        if let Some(s) = self.stop {
            admm.stop = match s {
                StopArg::RelativeChange => StopRule::RelativeChange,
                StopArg::ObservedResidual => StopRule::ObservedResidual,
            };
        }
        if let Some(reg) = Method::from(self.method).regularizer() {
            admm.regularizer = reg;
        }
        let mut cur = base.cur;
        cur.eps = self.eps.unwrap_or(cur.eps);
        cur.max_iters = self.max_iters.unwrap_or(cur.max_iters);
        cur.row_count = self.core_rows.unwrap_or(cur.row_count);
        cur.col_count = self.core_cols.unwrap_or(cur.col_count);
        cur.seed = self.seed;
        SolverConfig { admm, cur }
    }

    /// Solver settings for `n1 x n2` slices with every default filled in.
    /// Without a `base`, TCCUR needs `--rank`.
    fn resolve(&self, n1: usize, n2: usize, base: Option<SolverConfig>) -> CliResult<SolverConfig> {
        let base = match (base, self.rank) {
            (Some(mut b), Some(r)) => {
                b.cur.rank = r;
                b.cur.row_count = b.cur.row_count.max(r).min(n1);
                b.cur.col_count = b.cur.col_count.max(r).min(n2);
                b
            }
            (Some(b), None) => b,
            (None, Some(r)) => SolverConfig {
                admm: AdmmConfig::default(),
                cur: IcurcConfig::new(r, n1, n2),
            },
            (None, None) if matches!(self.method, MethodArg::Tccur) => {
                return Err(usage("--method tccur needs --rank"));
            }
            (None, None) => SolverConfig {
                admm: AdmmConfig::default(),
                cur: IcurcConfig::new(1, n1, n2),
            },
        };
        Ok(self.apply(base))
    }
}

#[derive(Args)]
struct MaskArgs {
    /// Mask file (header `n1 n2`, then 1-based `i j` pairs).
    #[arg(long, conflicts_with = "ratio")]
    mask: Option<PathBuf>,
    /// Draw a mask with this sampling ratio from `--seed`.
    #[arg(long)]
    ratio: Option<f64>,
}

#[derive(Args)]
struct CompleteArgs {
    /// Tensor to complete; entries outside the mask are ignored.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    mask: MaskArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
    /// Ground truth for RE/PSNR reporting and the history's `re` column.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Convergence CSV (`iter,rel_change,re` for ADMM, `slice,iter,e` for TCCUR).
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct InpaintArgs {
    #[arg(long)]
    image: PathBuf,
    #[command(flatten)]
    mask: MaskArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
    /// Also save the masked input image.
    #[arg(long)]
    masked_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Result CSV; existing rows are kept and their cells skipped.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InfoArgs {
    path: PathBuf,
}

enum Failure {
    Usage(String),
    Data(Error),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else {
            Failure::Data(e)
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn usage(msg: impl Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn check_input(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!(
            "input file {} does not exist",
            path.display()
        )))
    }
}

fn check_output(path: &Path) -> CliResult {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn print_config(command: &str, value: serde_json::Value) {
    let full = json!({ "command": command, "threads": parallel::threads(), "config": value });
    println!("resolved config: {full}");
}

fn load_mask(args: &MaskArgs, n1: usize, n2: usize, seed: u64) -> CliResult<TubalMask> {
    match (&args.mask, args.ratio) {
        (Some(path), _) => {
            let m = TubalMask::read(path)?;
            if m.dims() != (n1, n2) {
                return Err(Failure::Data(Error::DimensionMismatch(format!(
                    "mask is {}x{}, data is {n1}x{n2}",
                    m.dims().0,
                    m.dims().1
                ))));
            }
            Ok(m)
        }
        (None, Some(r)) => Ok(random_tubal_mask(n1, n2, r, seed)?),
        (None, None) => Err(usage("one of --mask or --ratio is required")),
    }
}

fn check_mask_args(args: &MaskArgs) -> CliResult {
    match (&args.mask, args.ratio) {
        (Some(p), _) => check_input(p),
        (None, Some(r)) if r > 0.0 && r <= 1.0 => Ok(()),
        (None, Some(r)) => Err(usage(format!("--ratio must lie in (0, 1], got {r}"))),
        (None, None) => Err(usage("one of --mask or --ratio is required")),
    }
}

fn validate_solver(method: Method, cfg: &SolverConfig, n1: usize, n2: usize) -> CliResult {
    let checked = match method {
        Method::Tccur => cfg.cur.validate(n1, n2),
        _ => cfg.admm.validate(),
    };
    checked.map_err(usage)
}

fn solver_json(method: Method, cfg: &SolverConfig) -> serde_json::Value {
    match method {
        Method::Tccur => json!({ "method": method, "tccur": cfg.cur }),
        _ => json!({ "method": method, "admm": cfg.admm }),
    }
}

fn synth(a: &SynthArgs) -> CliResult {
    let [n1, n2, n3] = [a.dims[0], a.dims[1], a.dims[2]];
    for p in [Some(&a.out), a.mask_out.as_ref(), a.observed_out.as_ref()]
        .into_iter()
        .flatten()
    {
        check_output(p)?;
    }
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(usage("--dims must be positive"));
    }
    if a.rank == 0 || a.rank > n1.min(n2) {
        return Err(usage(format!("--rank must lie in 1..={}", n1.min(n2))));
    }
    if let Some(r) = a.ratio {
        if !(r > 0.0 && r <= 1.0) {
            return Err(usage(format!("--ratio must lie in (0, 1], got {r}")));
        }
    }
    print_config(
        "synth",
        json!({ "dims": [n1, n2, n3], "rank": a.rank, "seed": a.seed, "ratio": a.ratio,
                "mask_seed": a.mask_seed, "out": a.out, "mask_out": a.mask_out, "observed_out": a.observed_out }),
    );
    let x = synth_low_tubal_rank(n1, n2, n3, a.rank, a.seed)?;
    write_t3b(&x, &a.out)?;
    if let (Some(r), Some(mpath)) = (a.ratio, &a.mask_out) {
        let mask = random_tubal_mask(n1, n2, r, a.mask_seed)?;
        mask.write(mpath)?;
        if let Some(opath) = &a.observed_out {
            write_t3b(&tcomplete::project(&x, &mask)?, opath)?;
        }
        println!("mask: {} of {} tubes observed", mask.count(), n1 * n2);
    }
    println!("wrote {}x{}x{} tensor, tubal rank {}", n1, n2, n3, a.rank);
    Ok(())
}

fn complete(a: &CompleteArgs) -> CliResult {
    check_input(&a.input)?;
    check_mask_args(&a.mask)?;
    if let Some(t) = &a.truth {
        check_input(t)?;
    }
    check_output(&a.out)?;
    if let Some(h) = &a.history {
        check_output(h)?;
    }
    let x = read_t3b(&a.input)?;
    let (n1, n2, _) = x.dims();
    let method = Method::from(a.solver.method);
    let cfg = a.solver.resolve(n1, n2, None)?;
    validate_solver(method, &cfg, n1, n2)?;
    let truth = match &a.truth {
        Some(p) => {
            let t = read_t3b(p)?;
            if t.dims() != x.dims() {
                return Err(Failure::Data(Error::DimensionMismatch(format!(
                    "truth is {:?}, input is {:?}",
                    t.dims(),
                    x.dims()
                ))));
            }
            Some(t)
        }
        None => None,
    };
    let mask = load_mask(&a.mask, n1, n2, a.solver.seed)?;
    print_config(
        "complete",
        json!({ "input": a.input, "dims": x.dims(), "observed_tubes": mask.count(),
                "sampling_ratio": mask.sampling_ratio(), "solver": solver_json(method, &cfg) }),
    );
    let y = tcomplete::project(&x, &mask)?;

    let start = std::time::Instant::now();
    let (estimate, iters, converged, history) = match method.regularizer() {
        Some(_) => {
            let (est, st) = solve_admm(&y, &mask, &cfg.admm, truth.as_ref())?;
            (est, st.iter, st.converged, st.history_csv())
        }
        None => {
            let res = tccur(&y, &mask, &cfg.cur)?;
            let (csv, iters, converged) = (
                res.convergence_csv(),
                res.max_iters(),
                res.converged.iter().all(|&c| c),
            );
            (res.estimate, iters, converged, csv)
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    write_t3b(&estimate, &a.out)?;
    if let Some(h) = &a.history {
        std::fs::write(h, history).map_err(Error::from)?;
    }
    println!("method {method}: {iters} iterations, converged {converged}, {elapsed:.3} s");
    if let Some(t) = &truth {
        println!(
            "RE {:.6e}  PSNR {:.4} dB",
            relative_error(&estimate, t)?,
            psnr(&estimate, t)?
        );
    }
    Ok(())
}

fn inpaint_cmd(a: &InpaintArgs) -> CliResult {
    check_input(&a.image)?;
    check_mask_args(&a.mask)?;
    check_output(&a.out)?;
    if let Some(m) = &a.masked_out {
        check_output(m)?;
    }
    let img = load_png(&a.image)?;
    let (rows, cols, _) = img.dims();
    let method = Method::from(a.solver.method);
    let cfg = a
        .solver
        .resolve(rows, cols, Some(image_config(rows, cols)))?;
    validate_solver(method, &cfg, rows, cols)?;
    let mask = load_mask(&a.mask, rows, cols, a.solver.seed)?;
    print_config(
        "inpaint",
        json!({ "image": a.image, "size": [rows, cols], "observed_pixels": mask.count(),
                "sampling_ratio": mask.sampling_ratio(), "solver": solver_json(method, &cfg) }),
    );
    let out = inpaint(&img, &Sampling::Mask(mask.clone()), method, &cfg)?;
    save_png(&out.image, &a.out)?;
    if let Some(m) = &a.masked_out {
        save_png(&tcomplete::project(&img, &mask)?, m)?;
    }
    let r = &out.row;
    println!(
        "method {method}: PSNR {:.4} dB  RE {:.6e}  {:.3} s  {} iterations",
        r.psnr.unwrap_or(f64::NAN),
        r.re.unwrap_or(f64::NAN),
        r.time_s,
        r.iters
    );
    Ok(())
}

fn bench(a: &BenchArgs) -> CliResult {
    check_input(&a.spec)?;
    check_output(&a.out)?;
    let spec = ExperimentSpec::read(&a.spec).map_err(|e| match e {
        Error::Io(_) => Failure::Data(e),
        other => usage(other),
    })?;
    print_config("bench", json!({ "spec": spec, "out": a.out }));
    let rows = run_sweep_csv(&spec, &a.out)?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    println!(
        "{} new rows ({} failed), {} cells in spec, results in {}",
        rows.len(),
        failed,
        spec.cell_count(),
        a.out.display()
    );
    Ok(())
}

fn info(a: &InfoArgs) -> CliResult {
    check_input(&a.path)?;
    print_config("info", json!({ "path": a.path }));
    let ext = a
        .path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("png") => {
            let t = load_png(&a.path)?;
            let (h, w, _) = t.dims();
            println!("RGB image {w}x{h} (tensor {h}x{w}x3)");
            describe(&t)?;
        }
        Some("txt") | Some("mask") => {
            let m = TubalMask::read(&a.path)?;
            let (n1, n2) = m.dims();
            println!(
                "tubal mask {n1}x{n2}: {} observed, ratio {:.4}",
                m.count(),
                m.sampling_ratio()
            );
        }
        _ => {
            let t = read_t3b(&a.path)?;
            let (n1, n2, n3) = t.dims();
            println!("T3B tensor {n1}x{n2}x{n3}");
            describe(&t)?;
        }
    }
    Ok(())
}

fn describe(t: &tcomplete::Tensor3) -> CliResult {
    let (multi, tubal) = tubal_rank(t, tcomplete::talgebra::DEFAULT_RANK_TOL)?;
    println!(
        "frobenius norm {:.6e}, max |x| {:.6e}",
        t.frobenius_norm(),
        t.max_abs()
    );
    println!("tubal rank {tubal} (multi rank {:?})", multi.0);
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Complete(a) => complete(a),
        Command::Inpaint(a) => inpaint_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Info(a) => info(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        parallel::set_threads(n);
    } else if let Ok(v) = std::env::var(THREADS_ENV) {
        if parallel::parse_threads(&v).is_none() {
            eprintln!("error: {THREADS_ENV} must be a positive integer, got `{v}`");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(4)
        }
    }
}
