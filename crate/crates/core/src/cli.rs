//! The `asdet` command line.
//!
//! Exit codes: `0` success, `1` a check (`reduce-check`, `roots-check`)
//! failed or output could not be written, `2` invalid input or usage, `3`
//! degenerate configuration, `4` a probe found a putative violation of
//! `|D| >= 1`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use crate::det::{eval_d, eval_ds, DetReport};
use crate::error::Error;
use crate::geom::{random_config, random_symp_config, Config, SymplecticConfig};
use crate::probe::{
    minimize_abs, minimize_probe, reduction_sweep, sample_probe, AnyConfig, Kind, ProbeReport, REDUCTION_TOL,
    TOL_VIOLATION,
};
use crate::roots::verify_fold;

/// Environment variable that overrides `--seed` when set.
pub const SEED_ENV: &str = "AS_DET_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

/// Number of log-spaced histogram bins in plot output.
pub const HIST_BINS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "asdet", version, about = "Normalized spinor determinants of point configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate D for a configuration file or a random configuration.
    Eval(EvalArgs),
    /// Evaluate D_S for a symplectic configuration file or a random one.
    EvalSymp(EvalSympArgs),
    /// Sample random configurations and report the smallest |D| or |D_S|.
    Probe(ProbeArgs),
    /// Simplex descent on |D| or |D_S| from a given or random start.
    Minimize(MinimizeArgs),
    /// Check D_S(x) = D(ghat(x)) on random symplectic configurations.
    ReduceCheck(ReduceArgs),
    /// Check that pulling back the U(2m) roots along g gives the Sp(m) roots.
    RootsCheck(RootsArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Write to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["config", "n"])))]
struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Number of points of a random configuration.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["config", "m"])))]
struct EvalSympArgs {
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Number of unsigned points of a random symplectic configuration.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("size").required(true).args(["n", "m"])))]
struct ProbeArgs {
    /// Probe |D| on n-point configurations.
    #[arg(long)]
    n: Option<usize>,
    /// Probe |D_S| on m-point symplectic configurations.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Violation tolerance: records with |D| < 1 - tol are flagged.
    #[arg(long, default_value_t = TOL_VIOLATION)]
    tol: f64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Emit sorted values and a histogram for plotting instead of records.
    #[arg(long)]
    plot: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("start").required(true).args(["config", "n", "m"])))]
struct MinimizeArgs {
    /// Start configuration ({"points": ...} or {"sym_points": ...}).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Number of random restarts (ignored with --config).
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Objective evaluations per descent.
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = TOL_VIOLATION)]
    tol: f64,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum allowed relative discrepancy.
    #[arg(long, default_value_t = REDUCTION_TOL)]
    tol: f64,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct RootsArgs {
    #[arg(long)]
    m: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Degenerate(String),
    Check(String),
    Io(io::Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Degenerate(_) => EXIT_DEGENERATE,
            Failure::Check(_) | Failure::Io(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(m) | Failure::Degenerate(m) | Failure::Check(m) => f.write_str(m),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Degenerate { .. } => Failure::Degenerate(e.to_string()),
            Error::InvalidInput(_) => Failure::Invalid(e.to_string()),
            Error::Internal(_) => Failure::Check(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parse `argv` (including the program name), run the command and return
/// the process exit code. Results go to `stdout` unless `--out` is given.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "asdet: {f}");
            f.code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run_with(argv, &mut out, &mut err)
}

fn resolve_seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Invalid(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))),
        Err(_) => Ok(flag),
    }
}

fn check_at_least(name: &str, value: usize, min: usize) -> CliResult<()> {
    if value < min {
        return Err(Failure::Invalid(format!("--{name} must be at least {min}, got {value}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> CliResult<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Invalid(format!("--tol must be positive, got {tol}")));
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        // constructor errors surface through serde as custom messages
        let msg = e.to_string();
        if msg.starts_with("degenerate configuration") {
            Failure::Degenerate(msg)
        } else {
            Failure::Invalid(format!("{}: {msg}", path.display()))
        }
    })
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            check_at_least("threads", k, 1)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Failure::Check(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn emit(output: &OutputArgs, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write, bool) -> io::Result<()>) -> CliResult<()> {
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w, output.csv)?;
            w.flush()?;
        }
        None => {
            body(stdout, output.csv)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

fn det_report_out(output: &OutputArgs, stdout: &mut dyn Write, r: &DetReport) -> CliResult<()> {
    emit(output, stdout, |w, csv| {
        if csv {
            let p = r.value.phase();
            writeln!(w, "abs,log_abs,phase_re,phase_im,cond_hint")?;
            writeln!(w, "{:?},{:?},{:?},{:?},{:?}", r.abs, r.log_abs(), p.re, p.im, r.cond_hint)
        } else {
            write_json(w, r)
        }
    })
}

fn probe_report_out(output: &OutputArgs, stdout: &mut dyn Write, report: &ProbeReport) -> CliResult<()> {
    emit(output, stdout, |w, csv| if csv { report.write_csv(w) } else { write_json(w, report) })
}

/// Exit code for a finished probe, with a note describing the worst record
/// when it is a putative violation.
fn violation_code(report: &ProbeReport) -> (i32, Option<String>) {
    if report.violations == 0 {
        return (EXIT_OK, None);
    }
    let r = &report.min_record;
    let note = format!(
        "putative violation: {} of {} records below 1 - {:e}; minimum |D| = {:?} (kind {}, size {}, seed {})",
        report.violations, report.samples, report.tol_violation, r.abs_value, r.kind, r.size, r.seed
    );
    (EXIT_VIOLATION, Some(note))
}

fn finish_probe(report: &ProbeReport, stderr: &mut dyn Write) -> i32 {
    let (code, note) = violation_code(report);
    if let Some(note) = note {
        let _ = writeln!(stderr, "asdet: {note}");
    }
    code
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Eval(a) => {
            let cfg: Config = match (&a.config, a.n) {
                (Some(path), _) => read_json(path)?,
                (None, Some(n)) => {
                    check_at_least("n", n, 2)?;
                    random_config(n, resolve_seed(a.seed)?)?
                }
                (None, None) => unreachable!("clap enforces a source"),
            };
            det_report_out(&a.output, stdout, &eval_d(&cfg)?)?;
            Ok(EXIT_OK)
        }
        Command::EvalSymp(a) => {
            let sc: SymplecticConfig = match (&a.config, a.m) {
                (Some(path), _) => read_json(path)?,
                (None, Some(m)) => {
                    check_at_least("m", m, 1)?;
                    random_symp_config(m, resolve_seed(a.seed)?)?
                }
                (None, None) => unreachable!("clap enforces a source"),
            };
            det_report_out(&a.output, stdout, &eval_ds(&sc)?)?;
            Ok(EXIT_OK)
        }
        Command::Probe(a) => {
            let (kind, size) = kind_and_size(a.n, a.m)?;
            check_at_least("samples", a.samples, 1)?;
            check_tol(a.tol)?;
            let seed = resolve_seed(a.seed)?;
            let report = with_pool(a.threads, || sample_probe(kind, size, a.samples, seed, a.tol))??;
            if a.plot {
                let plot = emit_plot_data(&report)?;
                emit(&a.output, stdout, |w, _| plot.write(w))?;
            } else {
                probe_report_out(&a.output, stdout, &report)?;
            }
            Ok(finish_probe(&report, stderr))
        }
        Command::Minimize(a) => {
            check_at_least("budget", a.budget, 1)?;
            check_tol(a.tol)?;
            let seed = resolve_seed(a.seed)?;
            let report = if let Some(path) = &a.config {
                let start: AnyConfig = read_json(path)?;
                ProbeReport::from_records(vec![minimize_abs(&start, a.budget, seed)?], a.tol)?
            } else {
                let (kind, size) = kind_and_size(a.n, a.m)?;
                check_at_least("samples", a.samples, 1)?;
                with_pool(a.threads, || minimize_probe(kind, size, a.samples, seed, a.budget, a.tol))??
            };
            probe_report_out(&a.output, stdout, &report)?;
            Ok(finish_probe(&report, stderr))
        }
        Command::ReduceCheck(a) => {
            check_at_least("m", a.m, 1)?;
            check_at_least("samples", a.samples, 1)?;
            check_tol(a.tol)?;
            let seed = resolve_seed(a.seed)?;
            let r = with_pool(a.threads, || reduction_sweep(a.m, a.samples, seed, a.tol))??;
            emit(&a.output, stdout, |w, csv| {
                if csv {
                    writeln!(w, "m,samples,max_rel_discrepancy,worst_seed,tol,pass")?;
                    writeln!(
                        w,
                        "{},{},{:?},{},{:?},{}",
                        r.m, r.samples, r.max_rel_discrepancy, r.worst_seed, r.tol, r.pass
                    )
                } else {
                    write_json(w, &r)
                }
            })?;
            if r.pass {
                Ok(EXIT_OK)
            } else {
                Err(Failure::Check(format!(
                    "max relative discrepancy {:e} exceeds {:e} (seed {})",
                    r.max_rel_discrepancy, r.tol, r.worst_seed
                )))
            }
        }
        Command::RootsCheck(a) => {
            check_at_least("m", a.m, 1)?;
            let r = verify_fold(a.m)?;
            emit(&a.output, stdout, |w, csv| {
                if csv {
                    writeln!(w, "m,set_equal,long_mult,short_mult,a_size,c_size")?;
                    writeln!(
                        w,
                        "{},{},{},{},{},{}",
                        r.m, r.set_equal, r.long_mult, r.short_mult, r.a_size, r.c_size
                    )
                } else {
                    write_json(w, &r)
                }
            })?;
            if r.passed() {
                Ok(EXIT_OK)
            } else {
                Err(Failure::Check(format!("fold check failed for m = {}", a.m)))
            }
        }
    }
}

fn kind_and_size(n: Option<usize>, m: Option<usize>) -> CliResult<(Kind, usize)> {
    match (n, m) {
        (Some(n), None) => {
            check_at_least("n", n, 2)?;
            Ok((Kind::As, n))
        }
        (None, Some(m)) => {
            check_at_least("m", m, 1)?;
            Ok((Kind::Symplectic, m))
        }
        _ => Err(Failure::Invalid("give exactly one of --n and --m".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Sorted values and a histogram of the excess `|D| - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    /// `(sample index, abs_value)` in nondecreasing `abs_value` order.
    pub rows: Vec<(usize, f64)>,
    /// A bin `[0, 0]` holding every excess `<= 0` (present only when
    /// nonempty), followed by up to [`HIST_BINS`] log-spaced bins covering
    /// the positive excesses.
    pub histogram: Vec<HistBin>,
}

impl PlotData {
    pub fn write(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "sample,abs_value")?;
        for (i, v) in &self.rows {
            writeln!(w, "{i},{v:?}")?;
        }
        writeln!(w)?;
        writeln!(w, "excess_lo,excess_hi,count")?;
        for b in &self.histogram {
            writeln!(w, "{:?},{:?},{}", b.lo, b.hi, b.count)?;
        }
        Ok(())
    }
}

pub fn emit_plot_data(report: &ProbeReport) -> crate::error::Result<PlotData> {
    if report.records.is_empty() {
        return Err(Error::invalid("cannot plot an empty report"));
    }
    let mut rows: Vec<(usize, f64)> = report.records.iter().map(|r| r.abs_value).enumerate().collect();
    rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let excess: Vec<f64> = rows.iter().map(|(_, v)| v - 1.0).collect();
    let at_or_below = excess.iter().filter(|&&e| e <= 0.0).count();
    let positive: Vec<f64> = excess.iter().copied().filter(|&e| e > 0.0).collect();

    let mut histogram = Vec::new();
    if at_or_below > 0 {
        histogram.push(HistBin {
            lo: 0.0,
            hi: 0.0,
            count: at_or_below,
        });
    }
    if let (Some(&lo), Some(&hi)) = (positive.first(), positive.last()) {
        if lo == hi {
            histogram.push(HistBin {
                lo,
                hi,
                count: positive.len(),
            });
        } else {
            let (llo, lhi) = (lo.log10(), hi.log10());
            let width = (lhi - llo) / HIST_BINS as f64;
            let edge = |k: usize| {
                if k == 0 {
                    lo
                } else if k == HIST_BINS {
                    hi
                } else {
                    10f64.powf(llo + k as f64 * width)
                }
            };
            let mut counts = [0usize; HIST_BINS];
            for e in &positive {
                let k = ((e.log10() - llo) / width).floor() as usize;
                counts[k.min(HIST_BINS - 1)] += 1;
            }
            histogram.extend(counts.iter().enumerate().map(|(k, &count)| HistBin {
                lo: edge(k),
                hi: edge(k + 1),
                count,
            }));
        }
    }
    Ok(PlotData { rows, histogram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::{Method, ProbeRecord};

    fn record(abs_value: f64) -> ProbeRecord {
        ProbeRecord {
            kind: Kind::As,
            size: 2,
            seed: 0,
            abs_value,
            log_abs: abs_value.ln(),
            config: vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            method: Method::Sample,
            iterations: 0,
        }
    }

    #[test]
    fn plot_all_ones_is_single_zero_bin() {
        let report = ProbeReport::from_records(vec![record(1.0); 10], TOL_VIOLATION).unwrap();
        let plot = emit_plot_data(&report).unwrap();
        assert_eq!(plot.histogram, [HistBin { lo: 0.0, hi: 0.0, count: 10 }]);
    }

    #[test]
    fn plot_rows_sorted() {
        let report = sample_probe(Kind::As, 4, 100, 2, TOL_VIOLATION).unwrap();
        let plot = emit_plot_data(&report).unwrap();
        assert_eq!(plot.rows.len(), 100);
        assert!(plot.rows.windows(2).all(|w| w[0].1 <= w[1].1));
        assert_eq!(plot.rows[0].1, report.min_record.abs_value);
        let total: usize = plot.histogram.iter().map(|b| b.count).sum();
        assert_eq!(total, 100);
        assert!(plot.histogram.len() <= HIST_BINS + 1);
    }

    #[test]
    fn plot_log_bins() {
        let values = [1.0 + 1e-6, 1.0 + 1e-3, 1.0 + 1e-1, 2.0, 11.0];
        let report = ProbeReport::from_records(values.iter().map(|&v| record(v)).collect(), TOL_VIOLATION).unwrap();
        let plot = emit_plot_data(&report).unwrap();
        assert_eq!(plot.histogram.len(), HIST_BINS);
        assert_eq!(plot.histogram[0].count, 1);
        assert_eq!(plot.histogram[HIST_BINS - 1].count, 1);
        for w in plot.histogram.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
    }

    #[test]
    fn violations_map_to_exit_4() {
        let clean = ProbeReport::from_records(vec![record(1.2), record(1.0)], TOL_VIOLATION).unwrap();
        assert_eq!(violation_code(&clean), (EXIT_OK, None));
        let bad = ProbeReport::from_records(vec![record(1.2), record(0.5)], TOL_VIOLATION).unwrap();
        let (code, note) = violation_code(&bad);
        assert_eq!(code, EXIT_VIOLATION);
        assert!(note.unwrap().contains("minimum |D| = 0.5"));
        // within tolerance of 1 is roundoff, not a violation
        let edge = ProbeReport::from_records(vec![record(1.0 - 1e-9)], TOL_VIOLATION).unwrap();
        assert_eq!(violation_code(&edge).0, EXIT_OK);
    }

    #[test]
    fn usage_errors_exit_2() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_with(["asdet", "frobnicate"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run_with(["asdet", "probe", "--n", "3", "--bogus"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run_with(["asdet", "probe", "--n", "1"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run_with(["asdet", "probe", "--n", "3", "--samples", "0"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run_with(["asdet", "probe", "--n", "3", "--tol", "-1"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run_with(["asdet", "probe", "--n", "3", "--m", "2"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run_with(["asdet", "roots-check", "--m", "0"], &mut out, &mut err), EXIT_INVALID);
    }

    #[test]
    fn roots_check_in_process() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_with(["asdet", "roots-check", "--m", "3"], &mut out, &mut err), EXIT_OK);
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["set_equal"], true);
        assert_eq!(v["long_mult"], 1);
        assert_eq!(v["short_mult"], 2);
    }
}
