//! JSON problem and report files. Complex numbers are `[re, im]` arrays.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use model_space_lab::{BlaschkeProduct, ClarkParams, Complex64, Sym3, Symbol, Variant};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Pair = [f64; 2];

pub fn to_complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    ClarkBasis,
    TtoMatrix,
    CheckDetthm,
    CheckClarkS6,
    SolveSo3,
    Corollary,
}

impl Task {
    pub const ALL: [Task; 6] =
        [Task::ClarkBasis, Task::TtoMatrix, Task::CheckDetthm, Task::CheckClarkS6, Task::SolveSo3, Task::Corollary];

    pub fn name(self) -> &'static str {
        match self {
            Task::ClarkBasis => "clark-basis",
            Task::TtoMatrix => "tto-matrix",
            Task::CheckDetthm => "check-detthm",
            Task::CheckClarkS6 => "check-clark-s6",
            Task::SolveSo3 => "solve-so3",
            Task::Corollary => "corollary",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown task '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    pub zeros: Vec<Pair>,
    #[serde(default = "one")]
    pub constant: Pair,
}

fn one() -> Pair {
    [1.0, 0.0]
}

impl ThetaSpec {
    pub fn build(&self) -> Result<BlaschkeProduct, CliError> {
        BlaschkeProduct::new(self.zeros.iter().copied().map(to_complex).collect(), to_complex(self.constant))
            .map_err(|e| CliError::Invalid(format!("theta: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClarkSpec {
    #[serde(default)]
    pub t: Pair,
    #[serde(default = "one")]
    pub alpha: Pair,
}

impl Default for ClarkSpec {
    fn default() -> Self {
        ClarkSpec { t: [0.0, 0.0], alpha: one() }
    }
}

impl ClarkSpec {
    pub fn build(&self) -> Result<ClarkParams, CliError> {
        ClarkParams::new(to_complex(self.t), to_complex(self.alpha))
            .map_err(|e| CliError::Invalid(format!("clark: {e}")))
    }
}

/// `(s1, s2, s3)` diagonal, then `(s4, s5, s6)` at (1,2), (1,3), (2,3).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub s: [Pair; 6],
}

impl MatrixSpec {
    pub fn build(&self) -> Sym3 {
        Sym3::new(self.s.map(to_complex))
    }

    pub fn from_sym(s: &Sym3) -> Self {
        MatrixSpec { s: s.s.map(to_pair) }
    }
}

/// `φ(z) = Σ c_k z^k`, as `[k, [re, im]]` terms. Defaults to `φ(z) = z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub terms: Vec<(i32, Pair)>,
}

impl SymbolSpec {
    pub fn build(&self) -> Result<Symbol, CliError> {
        let mut coeffs = BTreeMap::new();
        for &(k, c) in &self.terms {
            if coeffs.insert(k, to_complex(c)).is_some() {
                return Err(CliError::Invalid(format!("symbol: power {k} listed twice")));
            }
        }
        Ok(Symbol::new(coeffs))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorollarySpec {
    pub family: u8,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
    /// Random Clark bases tried in addition to the problem's own.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    100
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    pub theta: ThetaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clark: Option<ClarkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary: Option<CorollarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("problem file: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Verdict {
    Decision(bool),
    Status(String),
}

pub const INDETERMINATE: &str = "indeterminate";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum CertificateSpec {
    /// Coefficients over the five rank-one generators.
    Mu([Pair; 5]),
    /// Real orthogonal matrix, row-major.
    U([f64; 9]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisData {
    pub omega: Pair,
    pub etas: [Pair; 3],
    pub phases: [Pair; 3],
    pub norms: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub tol: f64,
    pub seed: u64,
    pub starts: usize,
    pub quadrature_points: usize,
    pub variant: Variant,
    pub root_tol: f64,
    pub distinct_tol: f64,
    pub quadrature_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub task: Task,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSpec>,
    #[serde(default)]
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisData>,
    /// A computed matrix: the TTO for `tto-matrix`, `U S Uᵀ` for the solvers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    pub config: ConfigEcho,
}

impl ReportFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let report: ReportFile =
            serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("report file: {e}")))?;
        report.validate()?;
        Ok(report)
    }

    /// Every number finite; verdict strings from the known set.
    pub fn validate(&self) -> Result<(), CliError> {
        let value = serde_json::to_value(self).map_err(|e| CliError::Invalid(e.to_string()))?;
        if !all_finite(&value) {
            return Err(CliError::Invalid("report contains a non-finite number".into()));
        }
        if let Verdict::Status(s) = &self.verdict {
            let known = [
                INDETERMINATE,
                crate::tasks::NOT_FOUND,
                crate::tasks::COROLLARY_CONFIRMED,
                crate::tasks::COROLLARY_REFUTED,
            ];
            if !known.contains(&s.as_str()) {
                return Err(CliError::Invalid(format!("unknown verdict '{s}'")));
            }
        }
        Ok(())
    }

    /// Pretty JSON with every float rounded to 12 significant digits.
    pub fn to_json(&self) -> Result<String, CliError> {
        self.validate()?;
        let mut value = serde_json::to_value(self).map_err(|e| CliError::Invalid(e.to_string()))?;
        round_floats(&mut value);
        let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Invalid(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

fn all_finite(v: &serde_json::Value) -> bool {
    use serde_json::Value;
    match v {
        Value::Null => false,
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(all_finite),
        Value::Object(o) => o.values().all(all_finite),
        _ => true,
    }
}

pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}
