use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use hfklift::ak::{analyze_level, AkReport};
use hfklift::batch::run_batch;
use hfklift::lift::{self, LiftProblem, DEFAULT_MAX_KERNEL_DIM};
use hfklift::model::{load_complex, load_inputs, load_lifted, FullComplex, QuotientComplex};
use hfklift::spliff::{decide, DecideOptions, SideReport, Status};
use hfklift::Error;

/// Lift knot Floer quotient complexes to CFK^∞ and decide property SpliFf.
#[derive(Parser)]
#[command(name = "hfklift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a complex or lifted complex file: exit 0 if valid, 1 on
    /// violations, 2 if unreadable.
    Verify { path: PathBuf },
    /// Solve for the diagonal arrows and write the lifted complex(es).
    Lift(LiftArgs),
    /// Print A_k^+ data for one complex as JSON.
    Ak(AkArgs),
    /// Decide SpliFf for a knot and its mirror: exit 0 both pass, 1 fails, 3 unknown.
    Spliff {
        path: PathBuf,
        #[command(flatten)]
        caps: Caps,
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Decide every complex under a directory, manifest or bundle.
    Batch(BatchArgs),
}

#[derive(Args)]
struct Caps {
    #[arg(long, default_value_t = DEFAULT_MAX_KERNEL_DIM)]
    max_kernel_dim: usize,
    /// Truncation height for the fallback model (default: smallest admissible).
    #[arg(long = "fallback-N", value_name = "N")]
    fallback_n: Option<i64>,
    /// Never sample lifts: a kernel above the cap always gives Unknown.
    #[arg(long)]
    strict_cap: bool,
    /// Run the homology check even where the HFK shortcut applies.
    #[arg(long)]
    verify: bool,
}

impl Caps {
    fn options(&self) -> DecideOptions {
        DecideOptions {
            max_kernel_dim: self.max_kernel_dim,
            fallback_n: self.fallback_n,
            verify: self.verify,
            any_lift_max_crossings: if self.strict_cap { None } else { DecideOptions::default().any_lift_max_crossings },
        }
    }
}

#[derive(Args)]
struct LiftArgs {
    path: PathBuf,
    /// Enumerate every lift (required above thickness one).
    #[arg(long)]
    all_lifts: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_KERNEL_DIM)]
    max_kernel_dim: usize,
    /// Output directory (default: next to the input).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AkArgs {
    path: PathBuf,
    /// Levels to compute (default: 0..=g).
    #[arg(short = 'k', long = "k", value_name = "K")]
    levels: Vec<i64>,
    /// Work with the mirror (dual) complex.
    #[arg(long)]
    mirror: bool,
    /// Lift index to use above thickness one.
    #[arg(long, default_value_t = 0)]
    lift_index: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_KERNEL_DIM)]
    max_kernel_dim: usize,
    #[arg(long = "fallback-N", value_name = "N")]
    fallback_n: Option<i64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BatchArgs {
    path: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    caps: Caps,
    /// Report file; with no --format both `.csv` and `.json` are written
    /// next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HFKLIFT_LOG", "warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify { path } => cmd_verify(&path),
        Command::Lift(a) => cmd_lift(&a),
        Command::Ak(a) => cmd_ak(&a),
        Command::Spliff { path, caps, json } => cmd_spliff(&path, &caps, json),
        Command::Batch(a) => cmd_batch(&a),
    };
    ExitCode::from(code)
}

fn load(path: &Path) -> Result<QuotientComplex, u8> {
    load_complex(path).map_err(|e| {
        eprintln!("error: {e}");
        2
    })
}

fn fail(e: Error) -> u8 {
    eprintln!("error: {e}");
    match e {
        Error::Io { .. } | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn cmd_verify(path: &Path) -> u8 {
    let file = match load_lifted(path) {
        Ok(f) => f,
        Err(e) => return fail(e).max(2),
    };
    let qc = file.quotient();
    let violations = qc.validate();
    for v in &violations {
        println!("violation: {v}");
    }
    if !violations.is_empty() {
        return 1;
    }
    if file.diagonals.is_some() {
        let issues = match file.full_complex() {
            Ok(fc) => fc.check().iter().map(ToString::to_string).collect(),
            Err(e) => vec![e.to_string()],
        };
        for i in &issues {
            println!("violation: {i}");
        }
        if !issues.is_empty() {
            return 1;
        }
    }
    let s = qc.derived_stats().expect("valid complexes have generators");
    println!(
        "{}: valid, {} generators, thickness {}, rho {}, g {}",
        qc.name,
        qc.len(),
        s.thickness,
        s.rho,
        s.genus_bound
    );
    0
}

fn write_lift(fc: &FullComplex, input: &Path, out: Option<&Path>, suffix: &str) -> Result<PathBuf, Error> {
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
    let stem = input.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = stem.strip_suffix(".json").unwrap_or(&stem);
    fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let path = dir.join(format!("{stem}.{suffix}.json"));
    fs::write(&path, fc.to_file().to_json()).map_err(|source| Error::Io { path: path.clone(), source })?;
    Ok(path)
}

fn cmd_lift(a: &LiftArgs) -> u8 {
    let qc = match load(&a.path) {
        Ok(qc) => qc,
        Err(c) => return c,
    };
    let run = || -> Result<(), Error> {
        let stats = qc.derived_stats()?;
        if stats.thickness > 1 && !a.all_lifts {
            return Err(Error::ThicknessTooLarge(stats.thickness));
        }
        let problem = LiftProblem::new(&qc)?;
        let sol = problem.solve()?;
        println!("placeholders: {}", problem.placeholders.len());
        println!("kernel dimension: {}", sol.kernel_dim());
        if !a.all_lifts {
            let fc = lift::lift(&qc)?;
            let path = write_lift(&fc, &a.path, a.out.as_deref(), "lifted")?;
            println!("diagonals: {}", fc.diagonals().len());
            println!("wrote {}", path.display());
            return Ok(());
        }
        let mut n = 0;
        for l in problem.enumerate(&sol, a.max_kernel_dim)? {
            let path = write_lift(&l.complex, &a.path, a.out.as_deref(), &format!("lift{}", l.index))?;
            println!("lift {}: diagonals: {}, wrote {}", l.index, l.complex.diagonals().len(), path.display());
            n += 1;
        }
        println!("lifts: {n}");
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err(e) => fail(e),
    }
}

fn cmd_ak(a: &AkArgs) -> u8 {
    let qc = match load(&a.path) {
        Ok(qc) => qc,
        Err(c) => return c,
    };
    let qc = if a.mirror { qc.mirror() } else { qc };
    let run = || -> Result<Vec<AkReport>, Error> {
        let stats = qc.derived_stats()?;
        let problem = LiftProblem::new(&qc)?;
        let sol = problem.solve()?;
        let fc = if stats.thickness <= 1 {
            lift::lift(&qc)?
        } else {
            problem
                .enumerate(&sol, a.max_kernel_dim)?
                .find(|l| l.index >= a.lift_index)
                .ok_or(Error::NoLift)?
                .complex
        };
        let levels = if a.levels.is_empty() { (0..=stats.genus_bound.max(0)).collect() } else { a.levels.clone() };
        levels.into_iter().map(|k| analyze_level(&fc, k, a.fallback_n)).collect()
    };
    match run() {
        Ok(reports) => {
            println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
            0
        }
        Err(e) => fail(e),
    }
}

fn describe_side(r: &SideReport) -> String {
    format!("{} (thickness {}, rho {}): {:?}", r.name, r.thickness, r.rho, r.outcome)
}

fn status_code(s: &Status) -> u8 {
    match s {
        Status::SpliffBoth => 0,
        Status::FailsKnot { .. } | Status::FailsMirror { .. } => 1,
        Status::Unknown { .. } => 3,
    }
}

fn cmd_spliff(path: &Path, caps: &Caps, json: bool) -> u8 {
    let qc = match load(path) {
        Ok(qc) => qc,
        Err(c) => return c,
    };
    let v = match decide(&qc, &caps.options()) {
        Ok(v) => v,
        Err(e @ (Error::Io { .. } | Error::Parse { .. })) => return fail(e),
        Err(e) => {
            println!("{}: Unknown({e})", qc.name);
            return 3;
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&v).expect("verdict serializes"));
        return status_code(&v.status);
    }
    println!("{}: {}", v.name, v.status);
    if let Some((k, (d1, d2))) = v.status.failing() {
        let parity = if d1.rem_euclid(2) == 0 { "even" } else { "odd" };
        println!("witness: {parity} gradings {d1} and {d2} at k={k}");
    }
    for side in [&v.knot, &v.mirror].into_iter().flatten() {
        println!("  {}", describe_side(side));
    }
    if let Some(d) = v.kernel_dim {
        println!("kernel dimension: {d}");
    }
    if let Some(a) = v.per_lift_agreement {
        println!("lifts agree: {a}");
    }
    println!("trace: {}", v.method_trace_string());
    status_code(&v.status)
}

fn write_out(path: &Path, body: &[u8]) -> Result<(), Error> {
    fs::write(path, body).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn cmd_batch(a: &BatchArgs) -> u8 {
    let inputs = match load_inputs(&a.path) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)).max(1);
    info!("{} inputs on {jobs} workers", inputs.len());
    let report = match run_batch(inputs, jobs, &a.caps.options()) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let csv = || {
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map(|()| buf)
    };
    let result = match (&a.out, a.format) {
        (None, fmt) => {
            match fmt.unwrap_or(Format::Csv) {
                Format::Csv => csv().map(|b| print!("{}", String::from_utf8_lossy(&b))),
                Format::Json => {
                    println!("{}", report.to_json());
                    Ok(())
                }
            }
            .map(|()| eprint!("{}", report.summary()))
        }
        (Some(out), Some(Format::Csv)) => csv().and_then(|b| write_out(out, &b)),
        (Some(out), Some(Format::Json)) => write_out(out, report.to_json().as_bytes()),
        (Some(out), None) => csv()
            .and_then(|b| write_out(&out.with_extension("csv"), &b))
            .and_then(|()| write_out(&out.with_extension("json"), report.to_json().as_bytes())),
    };
    if let Err(e) = result {
        return fail(e);
    }
    if a.out.is_some() {
        print!("{}", report.summary());
        println!("wall time: {:.2}s on {jobs} workers", report.meta.wall_seconds);
    }
    0
}
