//! Command-line front end. [`run`] parses arguments, dispatches to a
//! subcommand and returns the process exit code.
//!
//! Exit codes: `0` separable (conclusive) or CSS, `1` entangled or not CSS,
//! `2` inconclusive, `64` malformed input or bad usage, `65` input that
//! parses but fails validation, `66` unreadable file, `70` internal error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::families::random_bipartite_state_with;
use crate::fano::{fano_decompose, sm_measure};
use crate::geometry::css_report;
use crate::json;
use crate::report::{fmt_f64, input_digest, sample_csv, AnalysisReport, SampleRow, StageTimings};
use crate::separability::{
    invariant_polytope, is_product_with, p_pure_polytope, ppt_min_eigenvalue, segment_scan_with,
    werner_separable_decomposition, ScanVerdict, SegmentScanReport, DEFAULT_SEGMENT_POINTS,
};
use crate::tolerance::Tolerances;

pub const EXIT_SEPARABLE: i32 = 0;
pub const EXIT_ENTANGLED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_VALIDATION: i32 = 65;
pub const EXIT_IO: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Parser)]
#[command(name = "sepscope", version, about = "Bipartite separability analysis of density matrices")]
struct Cli {
    /// Override a named tolerance, e.g. `hull=1e-8` (repeatable).
    #[arg(long = "tol-override", value_name = "KEY=VALUE", global = true)]
    tol_override: Vec<String>,

    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,

    /// Seed for all randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Reproducibility mode: commands that draw random numbers require --seed.
    #[arg(long, global = true)]
    ci: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SM measure, product test, PPT and segment scan of a bipartite state.
    Analyze {
        file: PathBuf,
        #[arg(long = "segment-points", default_value_t = DEFAULT_SEGMENT_POINTS)]
        segment_points: usize,
    },
    /// Fano decomposition (Bloch vectors, correlation matrix, tensor M).
    Fano { file: PathBuf },
    /// Checks whether a polytope is invariant under Λ∘τ.
    CssCheck { file: PathBuf },
    /// PPT scan along the segment from Ω(ρ) to ρ.
    SegmentScan {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEGMENT_POINTS)]
        points: usize,
    },
    /// Per-state metrics for random states from the Hilbert–Schmidt ensemble.
    Sample(SampleArgs),
    /// Invariant polytope from a separable decomposition.
    PolytopeBuild {
        /// Decomposition JSON; omit when using --werner.
        file: Option<PathBuf>,
        /// Require pure factors (P_pure).
        #[arg(long)]
        pure: bool,
        /// Use the built-in decomposition of the Werner state with this p ≤ 1/3.
        #[arg(long, value_name = "P", conflicts_with = "file")]
        werner: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, num_args = 2, value_names = ["N", "K"], required = true)]
    dims: Vec<usize>,
    #[arg(long)]
    count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code_for(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_INTERNAL, message: format!("write failed: {e}") }
    }
}

/// Exit code for a library error.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::BadParameter(_) | Error::BadCount(_) => EXIT_USAGE,
        _ => EXIT_VALIDATION,
    }
}

struct Context {
    tol: Tolerances,
    format: Format,
    seed: Option<u64>,
    ci: bool,
}

/// Runs the CLI with `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SEPARABLE };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            log::debug!("exit {}: {}", f.code, f.message);
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut tol = Tolerances::default();
    for spec in &cli.tol_override {
        tol.apply_override(spec)?;
    }
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let ctx = Context { tol, format, seed: cli.seed, ci: cli.ci };
    match cli.command {
        Command::Analyze { file, segment_points } => cmd_analyze(&ctx, &file, segment_points, out),
        Command::Fano { file } => cmd_fano(&ctx, &file, out),
        Command::CssCheck { file } => cmd_css_check(&ctx, &file, out),
        Command::SegmentScan { file, points } => cmd_segment_scan(&ctx, &file, points, out),
        Command::Sample(args) => cmd_sample(&ctx, &args, out, err),
        Command::PolytopeBuild { file, pure, werner } => cmd_polytope_build(&ctx, file.as_deref(), pure, werner, out),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure { code: EXIT_IO, message: format!("cannot read {}: {e}", path.display()) })
}

fn utf8(bytes: &[u8]) -> Result<&str, Failure> {
    std::str::from_utf8(bytes).map_err(|e| Error::Parse(format!("input is not UTF-8: {e}")).into())
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn verdict_exit(verdict: ScanVerdict, conclusive: bool) -> i32 {
    match (verdict, conclusive) {
        (ScanVerdict::EntangledDetected, _) => EXIT_ENTANGLED,
        (ScanVerdict::NoViolationFound, true) => EXIT_SEPARABLE,
        (ScanVerdict::NoViolationFound, false) => EXIT_INCONCLUSIVE,
    }
}

fn verdict_name(v: ScanVerdict) -> &'static str {
    match v {
        ScanVerdict::EntangledDetected => "EntangledDetected",
        ScanVerdict::NoViolationFound => "NoViolationFound",
    }
}

fn cmd_analyze(ctx: &Context, path: &Path, points: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let t = Instant::now();
    let bytes = read_input(path)?;
    let rho = json::parse_state_with(utf8(&bytes)?, &ctx.tol)?;
    let dims = rho.require_factor_dims()?;
    let mut timings = StageTimings { parse: elapsed_ms(t), ..Default::default() };

    let t = Instant::now();
    let sm = sm_measure(&rho)?;
    timings.sm_measure = elapsed_ms(t);
    let t = Instant::now();
    let product = is_product_with(&rho, ctx.tol.product)?;
    timings.is_product = elapsed_ms(t);
    let t = Instant::now();
    let ppt = ppt_min_eigenvalue(&rho)?;
    timings.ppt = elapsed_ms(t);
    let t = Instant::now();
    let scan = segment_scan_with(&rho, points, &ctx.tol)?;
    timings.segment = elapsed_ms(t);

    let report = AnalysisReport {
        input_digest: input_digest(&bytes),
        dims,
        sm_measure: sm,
        is_product: product,
        ppt_min_eigenvalue: ppt,
        segment_verdict: scan.verdict,
        conclusive: scan.conclusive,
        segment_points: points,
        timings_ms: timings,
    };
    let text = match ctx.format {
        Format::Json => json_line(&report),
        Format::Csv => report.to_csv(),
        Format::Text => format!(
            "dims: {}x{}\nsm_measure: {}\nis_product: {}\nppt_min_eigenvalue: {}\nsegment_verdict: {}\nconclusive: {}\n",
            dims.0,
            dims.1,
            fmt_f64(report.sm_measure),
            report.is_product,
            fmt_f64(report.ppt_min_eigenvalue),
            verdict_name(report.segment_verdict),
            report.conclusive
        ),
    };
    out.write_all(text.as_bytes())?;
    Ok(verdict_exit(report.segment_verdict, report.conclusive))
}

fn cmd_fano(ctx: &Context, path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    if ctx.format == Format::Csv {
        return Err(Error::BadParameter("fano output is JSON only".into()).into());
    }
    let bytes = read_input(path)?;
    let rho = json::parse_state_with(utf8(&bytes)?, &ctx.tol)?;
    let f = fano_decompose(&rho)?;
    out.write_all(json::fano_to_json(&f).as_bytes())?;
    out.write_all(b"\n")?;
    Ok(0)
}

fn cmd_css_check(ctx: &Context, path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let bytes = read_input(path)?;
    let p = json::parse_polytope_with(utf8(&bytes)?, &ctx.tol)?;
    let report = css_report(&p, &ctx.tol);
    let text = match ctx.format {
        Format::Json => json_line(&report),
        Format::Csv => format!(
            "is_css,max_residual,vertex_count,pruned_vertex_count,image_vertex_count\n{},{},{},{},{}\n",
            report.is_css,
            fmt_f64(report.max_residual),
            report.vertex_count,
            report.pruned_vertex_count,
            report.image_vertex_count
        ),
        Format::Text => format!(
            "is_css: {}\nmax_residual: {}\nvertices: {} ({} after pruning)\nimage vertices: {}\n",
            report.is_css,
            fmt_f64(report.max_residual),
            report.vertex_count,
            report.pruned_vertex_count,
            report.image_vertex_count
        ),
    };
    out.write_all(text.as_bytes())?;
    Ok(if report.is_css { EXIT_SEPARABLE } else { EXIT_ENTANGLED })
}

fn cmd_segment_scan(ctx: &Context, path: &Path, points: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let bytes = read_input(path)?;
    let rho = json::parse_state_with(utf8(&bytes)?, &ctx.tol)?;
    let scan: SegmentScanReport = segment_scan_with(&rho, points, &ctx.tol)?;
    let text = match ctx.format {
        Format::Json => json_line(&scan),
        Format::Csv => scan.to_csv(),
        Format::Text => {
            let min = scan.min_pt_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            format!(
                "points: {}\nmin_pt_eigenvalue: {}\nverdict: {}\nconclusive: {}\n",
                scan.n_points,
                fmt_f64(min),
                verdict_name(scan.verdict),
                scan.conclusive
            )
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(verdict_exit(scan.verdict, scan.conclusive))
}

fn resolve_seed(ctx: &Context, err: &mut dyn Write) -> Result<u64, Failure> {
    match (ctx.seed, ctx.ci) {
        (Some(s), _) => Ok(s),
        (None, true) => Err(Error::BadParameter("--ci requires an explicit --seed".into()).into()),
        (None, false) => {
            let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
            let seed = nanos as u64;
            writeln!(err, "seed: {seed}")?;
            Ok(seed)
        }
    }
}

/// Metrics for `count` random states; row `i` uses its own ChaCha8 stream so
/// output does not depend on scheduling.
pub fn sample_rows(dims: (usize, usize), count: usize, seed: u64, tol: &Tolerances) -> Vec<SampleRow> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let rho = random_bipartite_state_with(dims, &mut rng);
            let sm = sm_measure(&rho).expect("sampled states carry factor dims");
            let ppt = ppt_min_eigenvalue(&rho).expect("sampled states carry factor dims");
            SampleRow { index, sm_measure: sm, ppt_min_eigenvalue: ppt, ppt: ppt >= -tol.psd }
        })
        .collect()
}

fn cmd_sample(ctx: &Context, args: &SampleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let (n, k) = (args.dims[0], args.dims[1]);
    if n < 2 || k < 2 {
        return Err(Error::BadParameter(format!("factor dims must be at least 2, got {n} {k}")).into());
    }
    if args.count == 0 {
        return Err(Error::BadParameter("--count must be at least 1".into()).into());
    }
    let seed = resolve_seed(ctx, err)?;
    let rows = sample_rows((n, k), args.count, seed, &ctx.tol);
    let text = match ctx.format {
        Format::Json => json_line(&rows),
        Format::Csv | Format::Text => sample_csv(&rows),
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}

fn cmd_polytope_build(
    ctx: &Context,
    path: Option<&Path>,
    pure: bool,
    werner: Option<f64>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if ctx.format == Format::Csv {
        return Err(Error::BadParameter("polytope output is JSON only".into()).into());
    }
    let dec = match (path, werner) {
        (_, Some(p)) => werner_separable_decomposition(p)?,
        (Some(path), None) => {
            let bytes = read_input(path)?;
            json::parse_decomposition_with(utf8(&bytes)?, &ctx.tol)?
        }
        (None, None) => return Err(Error::BadParameter("give a decomposition file or --werner".into()).into()),
    };
    let polytope = if pure { p_pure_polytope(&dec)? } else { invariant_polytope(&dec)? };
    out.write_all(json::polytope_to_json(&polytope).as_bytes())?;
    out.write_all(b"\n")?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("sepscope").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_usage_errors() {
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["analyze"]).0, EXIT_USAGE);
    }

    #[test]
    fn missing_file_is_io_error() {
        let (code, _, err) = run_args(&["analyze", "/nonexistent/state.json"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn sample_validation() {
        assert_eq!(run_args(&["sample", "--dims", "2", "2", "--count", "0", "--seed", "1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--ci", "sample", "--dims", "2", "2", "--count", "3"]).0, EXIT_USAGE);
        let (code, out, _) = run_args(&["sample", "--dims", "2", "2", "--count", "3", "--seed", "9"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
        assert!(out.starts_with("index,sm_measure,ppt_min_eigenvalue,ppt_flag\n0,"));
    }

    #[test]
    fn sample_is_order_independent() {
        let tol = Tolerances::default();
        let all = sample_rows((2, 2), 8, 3, &tol);
        let few = sample_rows((2, 2), 3, 3, &tol);
        assert_eq!(&all[..3], &few[..]);
    }

    #[test]
    fn bad_tolerance_override() {
        assert_eq!(run_args(&["--tol-override", "nope=1", "sample", "--dims", "2", "2", "--count", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn werner_polytope_build() {
        let (code, out, _) = run_args(&["polytope-build", "--werner", "0.25"]);
        assert_eq!(code, 0);
        let p = json::parse_polytope(&out).unwrap();
        assert!(crate::geometry::is_css(&p));
        assert_eq!(run_args(&["polytope-build", "--werner", "0.5"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["polytope-build"]).0, EXIT_USAGE);
    }
}
