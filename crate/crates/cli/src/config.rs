//! Run configuration: one problem block plus scan, ladder, probe, threshold,
//! closure, output and run blocks. TOML or JSON; a report JSON written by
//! `scan` is accepted too and re-runs from its embedded configuration.

use crate::CliError;
use nalgebra::DVector;
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use weylspec::classifier::{ClassifierConfig, Probe, Thresholds};
use weylspec::dtn::{DtnKind, DtnProvider, RadialOperator};
use weylspec::exec::{Exec, ExecMode};
use weylspec::nevanlinna::{ClosureConfig, LadderConfig};
use weylspec::provider::WeylProvider;
use weylspec::sturm::{CoupledMProvider, CoupledMTildeProvider, CoupledSolver, Potential, PotentialSpec};
use weylspec::triple::{TripleModel, TripleModelFile};

pub const THREADS_ENV: &str = "WEYLSPEC_THREADS";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default)]
    pub ladder: LadderConfig,
    #[serde(default)]
    pub probes: ProbesBlock,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub closure: ClosureConfig,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub run: RunBlock,
}

/// Exactly one of `[problem.line]`, `[problem.radial]`, `[problem.matrix]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Line(LineProblem),
    Radial(RadialProblem),
    Matrix(MatrixProblem),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineFunction {
    /// The scalar coupled function `m`, blind to states vanishing at 0.
    #[default]
    M,
    /// The 2×2 function `m̃`.
    MTilde,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineProblem {
    #[serde(default = "empty_potential")]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub function: LineFunction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialProblem {
    pub r_interface: f64,
    pub k_max: u32,
    #[serde(default = "empty_potential")]
    pub potential: PotentialSpec,
    /// Modes fed to the classifier; all of `0..=k_max` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<u32>>,
    #[serde(default = "default_kind")]
    pub kind: DtnKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixProblem {
    /// Model JSON, relative to the configuration file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<TripleModelFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub a: f64,
    pub b: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbesBlock {
    /// Explicit probe vectors as `[re, im]` pairs; the standard basis when empty.
    #[serde(default)]
    pub vectors: Vec<ProbeSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub id: String,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub stem: String,
    pub csv: bool,
    pub json: bool,
    pub summary: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            stem: "weylspec".into(),
            csv: true,
            json: true,
            summary: true,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunBlock {
    pub mode: ExecMode,
    /// Worker threads; `WEYLSPEC_THREADS` takes precedence.
    pub threads: Option<usize>,
}

fn empty_potential() -> PotentialSpec {
    PotentialSpec {
        support_radius: None,
        pieces: Vec::new(),
    }
}

fn default_kind() -> DtnKind {
    DtnKind::M
}

/// The part of a configuration that determines a report; embedded in every
/// report so that it can be re-run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub problem: Problem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    pub ladder: LadderConfig,
    pub probes: ProbesBlock,
    pub thresholds: Thresholds,
    pub closure: ClosureConfig,
}

#[derive(Deserialize)]
struct ReportEnvelope {
    config: ReportConfig,
}

impl RunConfig {
    /// Read a `.toml` or `.json` configuration, or the `config` of a report.
    /// A matrix model given by `path` is inlined so the result is self-contained.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut cfg: RunConfig = if is_json {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            if value.get("config").is_some() && value.get("report").is_some() {
                let env: ReportEnvelope = serde_json::from_value(value)
                    .map_err(|e| CliError::Validation(format!("{}: embedded config: {e}", path.display())))?;
                RunConfig::from_report(env.config)
            } else {
                serde_json::from_value(value).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
            }
        } else {
            toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        };
        if let Problem::Matrix(m) = &mut cfg.problem {
            if let Some(rel) = m.path.take() {
                if m.model.is_some() {
                    return Err(CliError::Validation(
                        "problem.matrix: give either `path` or `model`, not both".into(),
                    ));
                }
                let full = path.parent().unwrap_or(Path::new(".")).join(&rel);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| CliError::Validation(format!("problem.matrix.path {}: {e}", full.display())))?;
                let file: TripleModelFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("problem.matrix.path {}: {e}", full.display())))?;
                m.model = Some(file);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_report(r: ReportConfig) -> Self {
        Self {
            problem: r.problem,
            scan: r.scan,
            ladder: r.ladder,
            probes: r.probes,
            thresholds: r.thresholds,
            closure: r.closure,
            output: OutputBlock::default(),
            run: RunBlock::default(),
        }
    }

    pub fn report_config(&self) -> ReportConfig {
        ReportConfig {
            problem: self.problem.clone(),
            scan: self.scan,
            ladder: self.ladder,
            probes: self.probes.clone(),
            thresholds: self.thresholds,
            closure: self.closure,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if let Some(s) = &self.scan {
            if !(s.step > 0.0 && s.step.is_finite()) {
                return bad(format!("scan.step must be positive, got {}", s.step));
            }
            if !(s.a.is_finite() && s.b.is_finite() && s.a <= s.b) {
                return bad(format!("scan.a must not exceed scan.b, got a = {}, b = {}", s.a, s.b));
            }
        }
        if let Problem::Radial(r) = &self.problem {
            if !(r.r_interface > 0.0 && r.r_interface.is_finite()) {
                return bad(format!("problem.radial.r_interface must be positive, got {}", r.r_interface));
            }
        }
        // Builds the operator, which checks the model or potential.
        let p = provider(&self.problem)?;
        self.probes(p.dim())?;
        if self.run.threads == Some(0) {
            return bad("run.threads must be at least 1".into());
        }
        if self.output.stem.is_empty() || self.output.stem.contains(['/', '\\']) {
            return bad(format!("output.stem must be a plain file stem, got {:?}", self.output.stem));
        }
        self.classifier(Exec::sequential())
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn scan_block(&self) -> Result<ScanBlock, CliError> {
        self.scan
            .ok_or_else(|| CliError::Validation("missing [scan] block (a, b, step)".into()))
    }

    /// Thread count from `WEYLSPEC_THREADS`, else `run.threads`.
    pub fn exec(&self) -> Result<Exec, CliError> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => {
                    return Err(CliError::Validation(format!(
                        "{THREADS_ENV} must be a positive integer, got {v:?}"
                    )))
                }
            },
            Err(_) => self.run.threads,
        };
        Ok(Exec {
            mode: self.run.mode,
            threads,
        })
    }

    pub fn classifier(&self, exec: Exec) -> ClassifierConfig {
        ClassifierConfig {
            ladder: self.ladder,
            thresholds: self.thresholds,
            closure: self.closure,
            exec,
        }
    }

    pub fn probes(&self, dim: usize) -> Result<Vec<Probe>, CliError> {
        if self.probes.vectors.is_empty() {
            return Ok(Probe::basis(dim));
        }
        self.probes
            .vectors
            .iter()
            .map(|p| {
                if p.entries.len() != dim {
                    return Err(CliError::Validation(format!(
                        "probes.vectors[{}] has {} entries, the problem has dimension {dim}",
                        p.id,
                        p.entries.len()
                    )));
                }
                let v = DVector::from_iterator(dim, p.entries.iter().map(|e| C::new(e[0], e[1])));
                Ok(Probe::new(p.id.clone(), v))
            })
            .collect()
    }
}

pub fn line_potential(spec: &PotentialSpec) -> Result<Potential, CliError> {
    if spec.pieces.is_empty() {
        return Ok(Potential::zero());
    }
    Potential::from_spec(spec).map_err(|e| CliError::Validation(format!("problem potential: {e}")))
}

pub fn radial_operator(r: &RadialProblem) -> Result<RadialOperator, CliError> {
    let q = line_potential(&r.potential)?;
    RadialOperator::new(q, r.r_interface, r.k_max).map_err(|e| CliError::Validation(format!("problem.radial: {e}")))
}

pub fn matrix_model(m: &MatrixProblem) -> Result<TripleModel, CliError> {
    let file = m
        .model
        .clone()
        .ok_or_else(|| CliError::Validation("problem.matrix needs `path` or `model`".into()))?;
    TripleModel::try_from(file).map_err(|e| CliError::Validation(format!("problem.matrix: {e}")))
}

pub fn provider(problem: &Problem) -> Result<Box<dyn WeylProvider>, CliError> {
    Ok(match problem {
        Problem::Line(l) => {
            let solver = CoupledSolver::new(line_potential(&l.potential)?);
            match l.function {
                LineFunction::M => Box::new(CoupledMProvider(solver)),
                LineFunction::MTilde => Box::new(CoupledMTildeProvider(solver)),
            }
        }
        Problem::Radial(r) => {
            let op = radial_operator(r)?;
            match &r.modes {
                Some(modes) => Box::new(
                    DtnProvider::new(op, modes.clone(), r.kind)
                        .map_err(|e| CliError::Validation(format!("problem.radial.modes: {e}")))?,
                ),
                None => Box::new(DtnProvider::all_modes(op, r.kind)),
            }
        }
        Problem::Matrix(m) => Box::new(matrix_model(m)?),
    })
}
