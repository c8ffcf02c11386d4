//! Executes one problem and assembles its report.

use std::collections::BTreeMap;
use std::time::Instant;

use model_space_lab::repcheck::{clark_s6_test, counterexample_report};
use model_space_lab::so3::{self, SolverConfig};
use model_space_lab::{ClarkBasis, Error, ModelSpace, NumericConfig, PointConfig, Sym3, Symbol, Variant};
use num_complex::Complex64;

use crate::schema::{
    to_pair, BasisData, CertificateSpec, ClarkSpec, ConfigEcho, MatrixSpec, ProblemFile, ReportFile, Task, Verdict,
    INDETERMINATE,
};
use crate::CliError;

pub const NOT_FOUND: &str = "not-found-within-budget";
pub const COROLLARY_CONFIRMED: &str = "fails Clark test, representable via SO(3)";
pub const COROLLARY_REFUTED: &str = "corollary not reproduced";

pub const SEED_ENV: &str = "MODEL_SPACE_LAB_SEED";

/// Command-line overrides; each wins over the environment and the problem file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub quadrature_points: Option<usize>,
    pub variant: Option<Variant>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub numeric: NumericConfig,
    pub solver: SolverConfig,
}

impl Settings {
    /// Precedence: flag, then `MODEL_SPACE_LAB_SEED` (seed only), then the
    /// problem's options, then defaults.
    pub fn resolve(problem: &ProblemFile, overrides: &Overrides, env_seed: Option<&str>) -> Result<Self, CliError> {
        let file = problem.options.clone().unwrap_or_default();
        let env_seed = match env_seed {
            Some(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Invalid(format!("{SEED_ENV}='{s}' is not an unsigned integer")))?,
            ),
            None => None,
        };
        let mut numeric = NumericConfig::default();
        let mut solver = SolverConfig::default();
        if let Some(tol) = overrides.tol.or(file.tol) {
            numeric.decision_tol = tol;
            solver.tol = tol;
        }
        if let Some(n) = overrides.quadrature_points.or(file.quadrature_points) {
            numeric.quadrature_points = n;
        }
        solver.seed = overrides.seed.or(env_seed).or(file.seed).unwrap_or(solver.seed);
        solver.starts = overrides.starts.or(file.starts).unwrap_or(solver.starts);
        solver.variant = overrides.variant.or(file.variant).unwrap_or(solver.variant);
        numeric.validate().map_err(invalid)?;
        solver.validate().map_err(invalid)?;
        Ok(Settings { numeric, solver })
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            tol: self.numeric.decision_tol,
            seed: self.solver.seed,
            starts: self.solver.starts,
            quadrature_points: self.numeric.quadrature_points,
            variant: self.solver.variant,
            root_tol: self.numeric.root_tol,
            distinct_tol: self.numeric.distinct_tol,
            quadrature_tol: self.numeric.quadrature_tol,
        }
    }
}

fn invalid(e: Error) -> CliError {
    CliError::Invalid(e.to_string())
}

/// Inputs that cannot describe a valid problem are reported as invalid; every
/// other library failure is a numerical indeterminacy.
fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidBlaschke(_)
        | Error::Pole { .. }
        | Error::ThetaMismatch
        | Error::Precondition(_)
        | Error::DegenerateClark(_)
        | Error::InvalidConfig(_) => CliError::Invalid(e.to_string()),
        _ => CliError::Indeterminate(e.to_string()),
    }
}

/// Outcome of running a problem: a decision or an indeterminate report.
/// Invalid input yields `Err` and no report.
pub fn execute(task: Task, problem: &ProblemFile, settings: &Settings, timed: bool) -> Result<ReportFile, CliError> {
    if let Some(declared) = problem.task {
        if declared != task {
            return Err(CliError::Invalid(format!("problem declares task '{declared}' but '{task}' was requested")));
        }
    }
    let start = Instant::now();
    let mut report = ReportFile {
        task,
        verdict: Verdict::Decision(false),
        certificate: None,
        residuals: BTreeMap::new(),
        basis: None,
        matrix: None,
        counts: BTreeMap::new(),
        diagnostic: None,
        timing_ms: None,
        config: settings.echo(),
    };
    match run_task(task, problem, settings, &mut report) {
        Ok(()) => {}
        Err(CliError::Indeterminate(msg)) => {
            report.verdict = Verdict::Status(INDETERMINATE.into());
            report.certificate = None;
            report.diagnostic = Some(msg);
        }
        Err(e) => return Err(e),
    }
    if timed {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

fn run_task(task: Task, problem: &ProblemFile, settings: &Settings, report: &mut ReportFile) -> Result<(), CliError> {
    let theta = problem.theta.build()?;
    let params = problem.clark.clone().unwrap_or_default().build()?;
    if theta.order() != 3 {
        return Err(CliError::Invalid(format!("theta must have exactly three zeros, got {}", theta.order())));
    }
    let space = ModelSpace::new(theta, settings.numeric).map_err(classify)?;
    let cb = space.modified_clark_basis(&params).map_err(classify)?;
    report.basis = Some(basis_data(&cb));
    let tol = settings.numeric.decision_tol;

    match task {
        Task::ClarkBasis => {
            let mut level = 0.0_f64;
            for eta in &cb.etas {
                level = level.max((space.theta().eval(*eta).map_err(classify)? - cb.omega).norm());
            }
            let (_, creal) = cb.basis.c_real_defect(&space).map_err(classify)?;
            report.residuals.insert("gram".into(), cb.basis.gram_residual());
            report.residuals.insert("c_real".into(), creal);
            report.residuals.insert("level_set".into(), level);
            report.verdict = Verdict::Decision(cb.basis.gram_residual() < tol && creal < tol);
        }
        Task::TtoMatrix => {
            let symbol = match &problem.symbol {
                Some(spec) => spec.build()?,
                None => Symbol::monomial(1, Complex64::new(1.0, 0.0)),
            };
            let a = space.tto_matrix(&symbol, &cb.basis).map_err(classify)?;
            let defect = a.symmetry_defect();
            report.matrix = Some(MatrixSpec::from_sym(&Sym3::from_dmatrix(&a.entries).map_err(classify)?));
            report.residuals.insert("symmetry".into(), defect);
            report.verdict = Verdict::Decision(defect < tol);
        }
        Task::CheckDetthm => {
            let s = require_matrix(problem)?;
            let points = PointConfig::default_for(&space).map_err(classify)?;
            let v = space.detthm_test(&s, &cb.basis, &points).map_err(classify)?;
            report.verdict = Verdict::Decision(v.is_rep);
            report.certificate = Some(CertificateSpec::Mu(v.certificate.mu.map(to_pair)));
            report.residuals.insert("certificate".into(), v.certificate.residual);
            report.residuals.insert("scaled_det".into(), v.scaled_det);
            report.residuals.insert("conditioning".into(), v.conditioning);
        }
        Task::CheckClarkS6 => {
            let s = require_matrix(problem)?;
            let v = clark_s6_test(&s, &cb, settings.solver.variant, tol).map_err(classify)?;
            report.verdict = Verdict::Decision(v.is_rep);
            report.residuals.insert("gap".into(), v.gap);
        }
        Task::SolveSo3 => {
            let s = require_matrix(problem)?;
            let r = so3::solve(&space, &s, &cb, &settings.solver).map_err(classify)?;
            report.verdict = if r.found { Verdict::Decision(true) } else { Verdict::Status(NOT_FOUND.into()) };
            report.certificate = Some(CertificateSpec::U(r.best_matrix.entries()));
            report.matrix = Some(MatrixSpec::from_sym(&r.conjugated));
            report.residuals.insert("relation".into(), r.best_residual);
            report.residuals.insert("orthogonality".into(), r.best_matrix.orthogonality_defect());
            report.counts.insert("starts_used".into(), r.starts_used);
        }
        Task::Corollary => corollary(problem, &cb, settings, report)?,
    }
    Ok(())
}

fn require_matrix(problem: &ProblemFile) -> Result<Sym3, CliError> {
    problem
        .matrix
        .as_ref()
        .map(MatrixSpec::build)
        .ok_or_else(|| CliError::Invalid("this task needs a 'matrix' entry".into()))
}

/// Tests the family's matrix against the problem's Clark basis and against
/// `trials` random ones, then certifies it via a real orthogonal `U`.
fn corollary(
    problem: &ProblemFile,
    cb: &ClarkBasis,
    settings: &Settings,
    report: &mut ReportFile,
) -> Result<(), CliError> {
    let spec =
        problem.corollary.as_ref().ok_or_else(|| CliError::Invalid("this task needs a 'corollary' entry".into()))?;
    let tol = settings.numeric.decision_tol;
    let random = counterexample_report(
        spec.family,
        (spec.a, spec.b, spec.c),
        spec.trials,
        settings.solver.seed,
        settings.numeric,
    )
    .map_err(classify)?;
    let s = random.matrix;
    let own = clark_s6_test(&s, cb, Variant::General, tol).map_err(classify)?;

    report.residuals.insert("normality".into(), random.normality_defect);
    report.residuals.insert("own_basis_gap".into(), own.gap);
    if random.trials > 0 {
        report.residuals.insert("min_random_gap".into(), random.min_gap);
    }
    report.counts.insert("random_trials".into(), random.trials);
    report.counts.insert("random_clark_failures".into(), random.clark_failures);

    let mut representable = false;
    if let Some(u) = &random.orthogonal {
        let r = so3::residuals(&s, u, cb, Variant::General).map_err(classify)?;
        report.certificate = Some(CertificateSpec::U(u.entries()));
        report.matrix = Some(MatrixSpec::from_sym(&so3::conjugate_representation(&s, u)));
        report.residuals.insert("relation".into(), r.relation);
        report.residuals.insert("orthogonality".into(), r.orth);
        representable = r.relation < tol;
    }
    let confirmed = !own.is_rep && random.fails_every_clark_basis() && representable;
    report.verdict = Verdict::Status(if confirmed { COROLLARY_CONFIRMED } else { COROLLARY_REFUTED }.into());
    Ok(())
}

fn basis_data(cb: &ClarkBasis) -> BasisData {
    BasisData { omega: to_pair(cb.omega), etas: cb.etas.map(to_pair), phases: cb.phases.map(to_pair), norms: cb.norms }
}

/// Problem skeleton for the given θ zeros and Clark parameters.
pub fn problem(task: Task, zeros: &[Complex64], clark: ClarkSpec) -> ProblemFile {
    ProblemFile {
        task: Some(task),
        theta: crate::schema::ThetaSpec { zeros: zeros.iter().copied().map(to_pair).collect(), constant: [1.0, 0.0] },
        clark: Some(clark),
        matrix: None,
        symbol: None,
        corollary: None,
        options: None,
    }
}
