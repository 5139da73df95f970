//! The `exseq` command line: verification reports, dimension tables,
//! convergence sweeps, Friedrichs sweeps and single interpolations.
//!
//! Exit codes: 0 when every invoked check passes, 1 on a failed check or a
//! runtime error, 2 on a usage error (unknown flag, bad value, bad config).

use clap::{Args, Parser, Subcommand};
use exseq::projectors::{build_plan, Operator};
use exseq::spectra::{friedrichs_sweep, write_friedrichs_csv, FriedrichsCase};
use exseq::studies::output::{write_dims_csv, write_json, write_study_csv, write_verification_csv, write_friedrichs_json};
use exseq::studies::suites::{fields_for, DEFAULT_ALPHA};
use exseq::studies::verify::FRIEDRICHS_SPREAD;
use exseq::studies::{dims_table, read_config_file, run_convergence, run_verification, Format, StudyConfig, SuiteKind};
use exseq::{Error, Result};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "exseq", version, about = "Commuting projection-based interpolation on simplices", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every executable check (dimensions, sequences, projections, diagrams, Poincaré maps, Friedrichs window).
    Verify(Common),
    /// Computed and closed-form space dimensions.
    Dims(Common),
    /// p-convergence sweep with error/best-approximation ratios and fitted slopes.
    Convergence(Common),
    /// Discrete Friedrichs constants over a p range.
    Friedrichs(Common),
    /// Interpolate one field and export the interpolant.
    Project(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    p_min: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    /// Degree for `project` (defaults to --p-max).
    #[arg(long)]
    p: Option<usize>,
    /// Operator name, a comma-separated list, or `all`.
    #[arg(long)]
    operator: Option<String>,
    /// Field suite: poly, entire or singular.
    #[arg(long)]
    suite: Option<String>,
    /// Exponent of the singular suite.
    #[arg(long)]
    alpha: Option<f64>,
    /// Restrict the suite to one named field.
    #[arg(long)]
    field: Option<String>,
    /// Smoothness shifts, comma-separated.
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    dual_offset: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Friedrichs case ids, comma-separated (default: all).
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Flat key = value file; flags on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Add per-row wall time to convergence output.
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn format(&self) -> Result<Format> {
        self.format.as_deref().unwrap_or("csv").parse()
    }

    fn range(&self, lo: usize, hi: usize) -> (usize, usize) {
        (self.p_min.unwrap_or(lo), self.p_max.unwrap_or(hi))
    }

    fn operators(&self) -> Result<Vec<Operator>> {
        match self.operator.as_deref() {
            None | Some("all") => Ok(Operator::ALL.to_vec()),
            Some(list) => list
                .split(',')
                .map(|s| Operator::parse(s.trim()).ok_or_else(|| Error::Config(format!("unknown operator {s:?}"))))
                .collect(),
        }
    }

    fn suite(&self, default: &str) -> Result<SuiteKind> {
        let name = self.suite.as_deref().unwrap_or(default);
        SuiteKind::parse(name, self.alpha.unwrap_or(DEFAULT_ALPHA)).ok_or_else(|| Error::Config(format!("unknown suite {name:?}")))
    }

    fn s_values(&self) -> Result<Vec<f64>> {
        match &self.s {
            None => Ok(vec![0.0]),
            Some(list) => list
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad s value {x:?}"))))
                .collect(),
        }
    }

    /// Write through `f` to --out, or to stdout.
    fn emit(&self, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match &self.out {
            Some(path) => {
                let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
                f(&mut file)?;
                file.flush()?;
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock)?;
                lock.flush()?;
            }
        }
        Ok(())
    }
}

/// Config-file pairs as flag tokens. Boolean flags take `true`/`false`.
fn config_tokens(path: &PathBuf) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (k, v) in read_config_file(path)? {
        if k == "config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        match v.as_str() {
            "true" => out.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{k}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

fn parse(args: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let cli = Cli::try_parse_from(&args)?;
    let common = match &cli.command {
        Command::Verify(c) | Command::Dims(c) | Command::Convergence(c) | Command::Friedrichs(c) | Command::Project(c) => c,
    };
    let Some(path) = &common.config else { return Ok(cli) };
    let tokens = config_tokens(path).map_err(|e| clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e}\n")))?;
    // Program, subcommand, config flags, then the original flags so they win.
    let mut merged = args[..2].to_vec();
    merged.extend(tokens);
    merged.extend(args[2..].iter().cloned());
    Cli::try_parse_from(merged)
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Verify(c) => verify(&c),
        Command::Dims(c) => dims(&c),
        Command::Convergence(c) => convergence(&c),
        Command::Friedrichs(c) => friedrichs(&c),
        Command::Project(c) => project(&c),
    }
}

fn verify(c: &Common) -> Result<bool> {
    let (lo, hi) = c.range(0, 6);
    let v = run_verification(lo, hi, c.seed.unwrap_or(0))?;
    let format = c.format()?;
    c.emit(|w| match format {
        Format::Csv => write_verification_csv(&v, w),
        Format::Json => write_json(&v, w),
    })?;
    let failures = v.report.failures();
    for f in &failures {
        eprintln!("FAIL {} measured {:e} threshold {:e}", f.name, f.measured, f.threshold);
    }
    eprintln!("{} checks, {} failed", v.report.lines.len(), failures.len());
    Ok(failures.is_empty())
}

fn dims(c: &Common) -> Result<bool> {
    let (lo, hi) = c.range(0, 8);
    let rows = dims_table(lo, hi)?;
    let format = c.format()?;
    c.emit(|w| match format {
        Format::Csv => write_dims_csv(&rows, w),
        Format::Json => write_json(&rows, w),
    })?;
    Ok(rows.iter().all(|r| r.matches))
}

fn convergence(c: &Common) -> Result<bool> {
    let (lo, hi) = c.range(1, 6);
    let cfg = StudyConfig {
        operators: c.operators()?,
        p_min: lo,
        p_max: hi,
        suite: c.suite("entire")?,
        field: c.field.clone(),
        s_values: c.s_values()?,
        dual_offset: c.dual_offset.unwrap_or(exseq::sobolev::DUAL_TEST_MARGIN),
        seed: c.seed.unwrap_or(0),
        timings: c.timings,
    };
    let out = run_convergence(&cfg)?;
    let format = c.format()?;
    c.emit(|w| match format {
        Format::Csv => write_study_csv(&out, w),
        Format::Json => write_json(&out, w),
    })?;
    let flagged = out.records.iter().filter(|r| r.flagged).count();
    eprintln!("{} records, {} slopes, {} flagged", out.records.len(), out.slopes.len(), flagged);
    Ok(flagged == 0)
}

fn friedrichs(c: &Common) -> Result<bool> {
    let (lo, hi) = c.range(0, 8);
    let cases: Vec<FriedrichsCase> = match c.case.as_deref() {
        None | Some("all") => FriedrichsCase::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| FriedrichsCase::parse(s.trim()).ok_or_else(|| Error::Config(format!("unknown Friedrichs case {s:?}"))))
            .collect::<Result<_>>()?,
    };
    if lo > hi {
        return Err(Error::Config(format!("p-min {lo} exceeds p-max {hi}")));
    }
    let recs = friedrichs_sweep(&cases, lo, hi)?;
    let format = c.format()?;
    c.emit(|w| match format {
        Format::Csv => write_friedrichs_csv(&recs, w),
        Format::Json => write_friedrichs_json(&recs, w),
    })?;
    let mut ok = true;
    for case in cases {
        let v: Vec<f64> = recs.iter().filter(|r| r.case == case && !r.empty).map(|r| r.constant).collect();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(0.0, f64::max);
        if !v.is_empty() && !(lo > 0.0 && hi / lo <= FRIEDRICHS_SPREAD) {
            eprintln!("FAIL {case}: constants in [{lo:e}, {hi:e}]");
            ok = false;
        }
    }
    Ok(ok)
}

fn project(c: &Common) -> Result<bool> {
    let ops = c.operators()?;
    let [op] = ops[..] else {
        return Err(Error::Config("project needs exactly one --operator".into()));
    };
    let p = c.p.or(c.p_max).unwrap_or(4);
    let suite = c.suite("entire")?;
    let fields = fields_for(op, suite);
    let field = match &c.field {
        Some(name) => fields
            .into_iter()
            .find(|f| &f.name == name)
            .ok_or_else(|| Error::Config(format!("no field {name:?} in suite {suite} for {op}")))?,
        None => fields.into_iter().next().expect("every suite has a field per operator"),
    };
    let plan = build_plan(op, p)?;
    let pi = plan.apply(&field)?;
    let format = c.format()?;
    c.emit(|w| match format {
        Format::Json => {
            let doc = serde_json::json!({
                "operator": op.name(),
                "p": p,
                "field": field.name,
                "condition_residual": pi.residual,
                "max_condition_number": plan.max_condition_number(),
                "interpolant": exseq::polyspace::polyfn_json(&pi.element),
            });
            write_json(&doc, w)
        }
        Format::Csv => write_samples(&field, &pi.element, w),
    })?;
    Ok(pi.residual <= exseq::projectors::CONDITION_TOL)
}

/// Field and interpolant values at the quadrature points of the cell.
fn write_samples(u: &exseq::sobolev::AnalyticField, pi: &exseq::polyspace::PolyFn, w: &mut dyn Write) -> Result<()> {
    let rule = exseq::refsimplex::quadrature(&pi.cell, (2 * pi.degree).max(4))?;
    let vd = pi.value_dim;
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    header.extend((0..vd).map(|c| format!("u{c}")));
    header.extend((0..vd).map(|c| format!("pi_u{c}")));
    out.write_record(&header)?;
    for x in &rule.points {
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        row.extend(u.eval_vec(x).iter().map(|v| v.to_string()));
        row.extend(pi.eval(x).iter().map(|v| v.to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
