//! Golden problem/report pairs on the two standard spaces:
//! F1, θ = z³ with t = 0, α = 1; F2, zeros {0.5, 0, −0.5} with t = 0.3, α = 1.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use model_space_lab::so3::{self, OrthMatrix3};
use model_space_lab::{ClarkParams, ModelSpace, NumericConfig, Sym3, Variant};
use num_complex::Complex64;

use crate::schema::{ClarkSpec, CorollarySpec, MatrixSpec, Options, ProblemFile, SymbolSpec, Task};
use crate::tasks::{self, Overrides, Settings};
use crate::{write, CliError};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `[A_z]` in the F1 Clark basis, by hand.
pub fn f1_shift() -> Sym3 {
    let cis = |a: f64| Complex64::from_polar(1.0, a);
    Sym3::new([
        c(2.0 / 3.0, 0.0),
        2.0 * cis(2.0 * PI / 3.0) / 3.0,
        2.0 * cis(4.0 * PI / 3.0) / 3.0,
        cis(PI / 3.0) / 3.0,
        cis(2.0 * PI / 3.0) / 3.0,
        c(1.0 / 3.0, 0.0),
    ])
}

fn f1(task: Task) -> ProblemFile {
    tasks::problem(task, &[c(0.0, 0.0); 3], ClarkSpec::default())
}

const F2_ZEROS: [Complex64; 3] = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)];

fn f2_clark() -> ClarkSpec {
    ClarkSpec { t: [0.3, 0.0], alpha: [1.0, 0.0] }
}

fn f2(task: Task) -> ProblemFile {
    tasks::problem(task, &F2_ZEROS, f2_clark())
}

/// A fixed rotation used to disguise representable matrices.
fn disguise() -> OrthMatrix3 {
    OrthMatrix3::from_scaled_axis([0.3, -0.7, 1.1])
}

fn with_matrix(mut p: ProblemFile, s: &Sym3) -> ProblemFile {
    p.matrix = Some(MatrixSpec::from_sym(s));
    p
}

fn with_variant(mut p: ProblemFile, variant: Variant) -> ProblemFile {
    p.options = Some(Options { variant: Some(variant), ..Options::default() });
    p
}

/// `[A_φ]` for `φ(z) = z + 0.5 z̄²` in the F2 Clark basis.
fn f2_tto() -> Result<Sym3, CliError> {
    let space = ModelSpace::new(
        model_space_lab::BlaschkeProduct::new(F2_ZEROS.to_vec(), c(1.0, 0.0)).map_err(inv)?,
        NumericConfig::default(),
    )
    .map_err(inv)?;
    let cb = space.modified_clark_basis(&ClarkParams::new(c(0.3, 0.0), c(1.0, 0.0)).map_err(inv)?).map_err(inv)?;
    let a = space.tto_matrix(&f2_symbol().build()?, &cb.basis).map_err(inv)?;
    Sym3::from_dmatrix(&a.entries).map_err(inv)
}

fn f2_symbol() -> SymbolSpec {
    SymbolSpec { terms: vec![(1, [1.0, 0.0]), (-2, [0.5, 0.0])] }
}

fn inv(e: model_space_lab::Error) -> CliError {
    CliError::Invalid(e.to_string())
}

/// All fixture problems, keyed by file stem.
pub fn problems() -> Result<Vec<(String, ProblemFile)>, CliError> {
    let shift = f1_shift();
    let off_span = Sym3::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
    let f2_rep = f2_tto()?;

    let mut tto_f2 = f2(Task::TtoMatrix);
    tto_f2.symbol = Some(f2_symbol());
    let mut corollary = f1(Task::Corollary);
    corollary.corollary = Some(CorollarySpec { family: 3, a: 0.0, b: 0.0, c: 0.0, trials: 20 });
    let mut corollary_f2 = f2(Task::Corollary);
    corollary_f2.corollary = Some(CorollarySpec { family: 1, a: 1.0, b: -0.5, c: 2.0, trials: 20 });

    let out = vec![
        ("f1-clark-basis", f1(Task::ClarkBasis)),
        ("f1-tto-matrix", f1(Task::TtoMatrix)),
        ("f1-check-detthm", with_matrix(f1(Task::CheckDetthm), &shift)),
        ("f1-check-detthm-off-span", with_matrix(f1(Task::CheckDetthm), &off_span)),
        ("f1-check-clark-s6", with_matrix(f1(Task::CheckClarkS6), &shift)),
        ("f1-solve-so3", with_matrix(f1(Task::SolveSo3), &so3::conjugate_representation(&shift, &disguise()))),
        ("f1-corollary", corollary),
        ("f2-clark-basis", f2(Task::ClarkBasis)),
        ("f2-tto-matrix", tto_f2),
        ("f2-check-detthm", with_matrix(f2(Task::CheckDetthm), &f2_rep)),
        ("f2-check-clark-s6-general", with_variant(with_matrix(f2(Task::CheckClarkS6), &f2_rep), Variant::General)),
        ("f2-check-clark-s6-paper", with_variant(with_matrix(f2(Task::CheckClarkS6), &f2_rep), Variant::Paper)),
        ("f2-solve-so3", with_matrix(f2(Task::SolveSo3), &so3::conjugate_representation(&f2_rep, &disguise()))),
        ("f2-corollary", corollary_f2),
    ];
    Ok(out.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Writes `<stem>.problem.json` and `<stem>.report.json` for every fixture.
/// Reports carry no timing, so regeneration is byte-stable.
pub fn write_all(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for (stem, problem) in problems()? {
        let task = problem.task.expect("fixtures declare their task");
        let settings = Settings::resolve(&problem, &Overrides::default(), None)?;
        let report = tasks::execute(task, &problem, &settings, false)?;

        let mut text = serde_json::to_string_pretty(&problem).map_err(|e| CliError::Invalid(e.to_string()))?;
        text.push('\n');
        let p = dir.join(format!("{stem}.problem.json"));
        write(&p, &text)?;
        let r = dir.join(format!("{stem}.report.json"));
        write(&r, &report.to_json()?)?;
        written.extend([p, r]);
    }
    Ok(written)
}
