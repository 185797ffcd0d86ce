//! `weylspec` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation error, 3 numerical failure.

mod config;
mod output;
mod verify;

use clap::{Parser, Subcommand};
use config::{Problem, RunConfig};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;
use weylspec::classifier::{find_eigenvalues, purity_check, scan_interval, EigenvalueRecord, Purity, SpectralReport};
use weylspec::dtn::{bound_states, mode_dtn, DtnValue, M_mode};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "weylspec", version, about = "Spectral classification from boundary limits of Weyl functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Directory for the artifacts (overrides output.dir).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// File stem for the artifacts (overrides output.stem).
    #[arg(long)]
    stem: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every grid point of [a, b]; writes CSV, JSON report and summary.
    Scan {
        /// TOML/JSON configuration, or a report JSON to re-run.
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Locate eigenvalues by residue refinement only.
    Eigs {
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Per-mode DtN table of a radial problem at one spectral parameter.
    DtnModes {
        config: PathBuf,
        /// Real part of λ.
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Imaginary part of λ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_im: f64,
    },
    /// Run a verification suite and print residuals against tolerances.
    OracleVerify {
        /// Configuration naming the suite (`suite = "lemma24"`).
        config: Option<PathBuf>,
        /// Suite name: lemma24, bessel-free, square-well or empty.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Describe the configured problem.
    ModelInfo { config: PathBuf },
}

#[derive(Serialize)]
struct ReportFile<'a> {
    tool: String,
    config: config::ReportConfig,
    purity: Purity,
    report: &'a SpectralReport,
}

#[derive(Serialize)]
struct EigsFile<'a> {
    tool: String,
    config: config::ReportConfig,
    eigenvalues: &'a [EigenvalueRecord],
}

fn tool() -> String {
    format!("weylspec {}", env!("CARGO_PKG_VERSION"))
}

fn load(path: &Path, out: &OutputArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(d) = &out.out_dir {
        cfg.output.dir = d.clone();
    }
    if let Some(s) = &out.stem {
        cfg.output.stem = s.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn scan(path: &Path, out: &OutputArgs) -> Result<(), CliError> {
    let cfg = load(path, out)?;
    let exec = cfg.exec()?;
    let s = cfg.scan_block()?;
    let provider = config::provider(&cfg.problem)?;
    let probes = cfg.probes(provider.dim())?;
    let report = scan_interval(provider.as_ref(), s.a, s.b, s.step, &probes, &cfg.classifier(exec))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if report.undetermined_points > 0 {
        let first = report
            .points
            .iter()
            .find(|p| p.class.cause.is_some())
            .and_then(|p| p.class.cause.clone().map(|c| format!(" (first at x = {}: {c})", p.x)))
            .unwrap_or_default();
        return Err(CliError::Numerical(format!(
            "{} grid points could not be classified{first}",
            report.undetermined_points
        )));
    }
    let purity = purity_check(&report);
    let o = &cfg.output;
    let mut staged = output::Staged::new(&o.dir)?;
    if o.csv {
        staged.add(&format!("{}.csv", o.stem), &output::scan_csv(&report)?)?;
    }
    if o.json {
        let file = ReportFile {
            tool: tool(),
            config: cfg.report_config(),
            purity,
            report: &report,
        };
        staged.add(&format!("{}.json", o.stem), &output::to_json(&file)?)?;
    }
    let text = output::summary(&report, purity);
    if o.summary {
        staged.add(&format!("{}.summary.txt", o.stem), &text)?;
    }
    let written = staged.commit()?;
    print!("{text}");
    for p in written {
        println!("wrote         {}", p.display());
    }
    Ok(())
}

fn eigs(path: &Path, out: &OutputArgs) -> Result<(), CliError> {
    let cfg = load(path, out)?;
    let exec = cfg.exec()?;
    let s = cfg.scan_block()?;
    let provider = config::provider(&cfg.problem)?;
    let probes = cfg.probes(provider.dim())?;
    let found = find_eigenvalues(provider.as_ref(), s.a, s.b, s.step, &probes, &cfg.classifier(exec))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let o = &cfg.output;
    let mut staged = output::Staged::new(&o.dir)?;
    if o.json {
        let file = EigsFile {
            tool: tool(),
            config: cfg.report_config(),
            eigenvalues: &found,
        };
        staged.add(&format!("{}.eigs.json", o.stem), &output::to_json(&file)?)?;
    }
    let written = staged.commit()?;
    println!("{} eigenvalues in [{}, {}] ({})", found.len(), s.a, s.b, provider.id());
    for e in &found {
        println!(
            "  x = {:<24} residue {:.3e}  rank {}  probe {}",
            output::fmt17(e.x),
            e.residue_norm,
            e.residue_rank,
            e.probe_id
        );
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn dtn_modes(path: &Path, re: f64, im: f64) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let Problem::Radial(r) = &cfg.problem else {
        return Err(CliError::Validation("dtn-modes needs a [problem.radial] block".into()));
    };
    if !(re.is_finite() && im.is_finite()) {
        return Err(CliError::Validation(format!("--lambda must be finite, got {re} + {im}i")));
    }
    let op = config::radial_operator(r)?;
    let lambda = C::new(re, im);
    let modes: Vec<u32> = r.modes.clone().unwrap_or_else(|| (0..=r.k_max).collect());
    let mut w = csv::Writer::from_writer(std::io::stdout());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["k", "lambda_i_re", "lambda_i_im", "lambda_e_re", "lambda_e_im", "wronskian_re", "wronskian_im", "M_re", "M_im"])
        .map_err(err)?;
    let pair = |v: DtnValue| match v {
        DtnValue::Finite(z) => [output::fmt17(z.re), output::fmt17(z.im)],
        DtnValue::Pole => ["pole".into(), "pole".into()],
    };
    for k in modes {
        let d = mode_dtn(&op, k, lambda).map_err(|e| CliError::Numerical(e.to_string()))?;
        // A vanishing Wronskian marks an eigenvalue of the coupled problem.
        let m = match M_mode(&op, k, lambda) {
            Ok(z) => [output::fmt17(z.re), output::fmt17(z.im)],
            Err(_) => ["eigenvalue".into(), "eigenvalue".into()],
        };
        let [a, b] = pair(d.lambda_i);
        let [c, e] = pair(d.lambda_e);
        w.write_record([
            k.to_string(),
            a,
            b,
            c,
            e,
            output::fmt17(d.wronskian.re),
            output::fmt17(d.wronskian.im),
            m[0].clone(),
            m[1].clone(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn oracle_verify(path: Option<&PathBuf>, suite: Option<&str>) -> Result<(), CliError> {
    let cfg = match (path, suite) {
        (_, Some(s)) => verify::VerifyConfig::named(s),
        (Some(p), None) => verify::VerifyConfig::load(p)?,
        (None, None) => return Err(CliError::Validation("give a suite config or --suite".into())),
    };
    let checks = verify::run(&cfg)?;
    println!("suite {}: {} checks", cfg.suite, checks.len());
    if !checks.is_empty() {
        println!("{:<44} {:>24} {:>10}  status", "check", "residual", "tolerance");
    }
    let mut failed = 0;
    for c in &checks {
        let ok = c.passed();
        failed += usize::from(!ok);
        println!(
            "{:<44} {:>24} {:>10.1e}  {}",
            c.name,
            output::fmt17(c.residual),
            c.tolerance,
            if ok { "pass" } else { "FAIL" }
        );
    }
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("all checks passed");
    Ok(())
}

fn model_info(path: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let provider = config::provider(&cfg.problem)?;
    println!("provider      {}", provider.id());
    println!("dimension     {}", provider.dim());
    match &cfg.problem {
        Problem::Matrix(m) => {
            let model = config::matrix_model(m)?;
            let mu0 = model.mu0();
            println!("n             {}", model.n());
            println!("mu0           {} + {}i", mu0.re, mu0.im);
            println!("eigenvalues   (value, multiplicity, visible rank)");
            for (x, mult) in model.distinct_eigenvalues() {
                let (_, vis) = model.eigen_visibility(x).map_err(|e| CliError::Numerical(e.to_string()))?;
                let note = if vis < mult { "  hidden part" } else { "" };
                println!("  {:<24} {mult} {vis}{note}", output::fmt17(x));
            }
            let r = model.spectral_radius() + 1.0;
            let s = model
                .local_simplicity(-r, r, &model.default_probe_points())
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            println!("simple        {} (rank {} of {})", s.simple, s.stacked_rank, s.spectral_rank);
        }
        Problem::Line(l) => {
            let q = config::line_potential(&l.potential)?;
            println!("pieces        {}", q.pieces().len());
            println!("support       [-{0}, {0}]", q.support_radius());
            println!("sup |q|       {}", q.sup_abs());
        }
        Problem::Radial(r) => {
            let op = config::radial_operator(r)?;
            let q = op.potential();
            println!("interface R   {}", op.r_interface());
            println!("modes         0..={}", op.k_max());
            println!("matching      {}", op.matching_radius());
            println!("sup |q|       {}", q.sup_abs());
            if q.sup_abs() > 0.0 {
                println!("bound states  (per mode, from Wronskian zeros)");
                for k in 0..=op.k_max() {
                    let states = bound_states(&op, k, -q.sup_abs(), -1e-6, 2000)
                        .map_err(|e| CliError::Numerical(e.to_string()))?;
                    let list: Vec<String> = states.iter().map(|x| output::fmt17(*x)).collect();
                    println!("  k = {k:<3} {}", if list.is_empty() { "none".into() } else { list.join(", ") });
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Scan { config, out } => scan(config, out),
        Command::Eigs { config, out } => eigs(config, out),
        Command::DtnModes { config, lambda, lambda_im } => dtn_modes(config, *lambda, *lambda_im),
        Command::OracleVerify { config, suite } => oracle_verify(config.as_ref(), suite.as_deref()),
        Command::ModelInfo { config } => model_info(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weylspec: {e}");
            ExitCode::from(e.code())
        }
    }
}
