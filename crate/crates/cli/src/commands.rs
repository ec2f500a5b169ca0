//! Subcommand implementations, file loading, and report assembly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cpinterp_core::feasibility::{StochasticClass, TransferMatrix};
use cpinterp_core::matrix::ComplexMatrix;
use cpinterp_core::pipeline::{analyze_families, synthesize_map, SynthesisClass, SynthesizedMap};
use cpinterp_core::verify::{check_properties, numrange_margins};
use cpinterp_core::{birkhoff_decompose, Config};

use crate::error::{CliError, CliResult};
use crate::schema::{
    ClassReportDoc, DecompositionDoc, MapDocument, MatrixDoc, NumrangeDoc, ProblemDocument,
    RealMatrixDoc, ReportDocument, SquareMatrixDoc, TransferMatrixDoc, VerificationDoc,
};

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("cannot parse {what} file {}: {e}", path.display())))
}

pub fn load_problem(path: &Path) -> CliResult<ProblemDocument> {
    read_json(path, "problem")
}

/// `analyze <problem>`: joint diagonalization plus four-class verdicts.
pub fn cmd_analyze(path: &Path, cfg: &Config) -> CliResult<ReportDocument> {
    let doc = load_problem(path)?;
    analyze_document(&doc, cfg)
}

pub fn analyze_document(doc: &ProblemDocument, cfg: &Config) -> CliResult<ReportDocument> {
    let loaded = doc.load()?;
    let analysis = analyze_families(&loaded.a, &loaded.b, cfg)?;
    let mut classes = BTreeMap::new();
    let mut diagnostics = loaded.warnings;
    for v in &analysis.report.verdicts {
        classes.insert(
            v.class.label().to_string(),
            ClassReportDoc {
                feasible: v.feasibility.label().to_string(),
                criterion: v.criterion.to_string(),
                witness: v.witness.as_ref().map(TransferMatrixDoc::from_transfer),
                phase1_objective: v.phase1_objective,
            },
        );
        if v.feasibility == cpinterp_core::Feasibility::Marginal {
            diagnostics.push(format!(
                "class {} is marginal (phase-1 objective {:?}); consider rescaling",
                v.class.label(),
                v.phase1_objective
            ));
        }
    }
    let mut report = ReportDocument::new("analyze");
    report.classes = Some(classes);
    report.diagnostics = diagnostics;
    Ok(report)
}

/// `synthesize <problem> --class C`: emit a verified map of the class.
pub fn cmd_synthesize(
    path: &Path,
    class: SynthesisClass,
    cfg: &Config,
) -> CliResult<ReportDocument> {
    let doc = load_problem(path)?;
    synthesize_document(&doc, class, cfg)
}

pub fn synthesize_document(
    doc: &ProblemDocument,
    class: SynthesisClass,
    cfg: &Config,
) -> CliResult<ReportDocument> {
    let loaded = doc.load()?;
    let synthesis = synthesize_map(&loaded.a, &loaded.b, class, cfg)?;
    let mut report = ReportDocument::new("synthesize");
    report.requested_class = Some(class.label().to_string());
    report.map = Some(match &synthesis.map {
        SynthesizedMap::Kraus(k) => MapDocument::from_kraus(k),
        SynthesizedMap::MixedUnitary(m) => MapDocument::from_mixed_unitary(m),
    });
    report.verification = Some(VerificationDoc::from_report(&synthesis.verification));
    if let (Some(dec), Some(witness)) = (&synthesis.decomposition, &synthesis.witness) {
        report.decomposition = Some(DecompositionDoc::from_decomposition(dec, witness));
    }
    if let Some(witness) = &synthesis.witness {
        let mut classes = BTreeMap::new();
        classes.insert(
            class.label().to_string(),
            ClassReportDoc {
                feasible: "yes".to_string(),
                criterion: "synthesized".to_string(),
                witness: Some(TransferMatrixDoc::from_transfer(witness)),
                phase1_objective: None,
            },
        );
        report.classes = Some(classes);
    }
    report.diagnostics = loaded.warnings;
    Ok(report)
}

/// `verify <map> <problem>`: recompute every property of a serialized map.
/// Reports, never judges: residuals land in the report, exit stays 0.
pub fn cmd_verify(map_path: &Path, problem_path: &Path, cfg: &Config) -> CliResult<ReportDocument> {
    let map_doc = load_map_document(map_path)?;
    let problem = load_problem(problem_path)?;
    verify_document(&map_doc, &problem, cfg)
}

/// Accepts either a bare map document or a full report with an embedded map.
pub fn load_map_document(path: &Path) -> CliResult<MapDocument> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read map file {}: {e}", path.display())))?;
    if let Ok(map) = serde_json::from_str::<MapDocument>(&text) {
        return Ok(map);
    }
    let report: ReportDocument = serde_json::from_str(&text).map_err(|e| {
        CliError::Parse(format!(
            "{} is neither a map document nor a report with a map: {e}",
            path.display()
        ))
    })?;
    report.map.ok_or_else(|| {
        CliError::Parse(format!("report {} does not embed a map", path.display()))
    })
}

pub fn verify_document(
    map_doc: &MapDocument,
    problem: &ProblemDocument,
    cfg: &Config,
) -> CliResult<ReportDocument> {
    let loaded = problem.load()?;
    let kraus = map_doc.to_kraus(cfg.unitary_tol)?;
    let pairs: Vec<_> = loaded.a.iter().cloned().zip(loaded.b.iter().cloned()).collect();
    let verification = check_properties(&kraus, &pairs, cfg)?;
    let mut report = ReportDocument::new("verify");
    report.map = Some(map_doc.clone());
    report.verification = Some(VerificationDoc::from_report(&verification));
    report.diagnostics = loaded.warnings;
    Ok(report)
}

/// `decompose <matrix>`: Birkhoff decomposition of a doubly stochastic
/// matrix with its reconstruction residual.
pub fn cmd_decompose(path: &Path, cfg: &Config) -> CliResult<ReportDocument> {
    let doc: RealMatrixDoc = read_json(path, "matrix")?;
    decompose_document(&doc, cfg)
}

pub fn decompose_document(doc: &RealMatrixDoc, cfg: &Config) -> CliResult<ReportDocument> {
    if doc.rows != doc.cols {
        return Err(CliError::InvalidMatrix(format!(
            "decompose needs a square matrix, got {}x{}",
            doc.rows, doc.cols
        )));
    }
    if doc.entries.len() != doc.rows * doc.cols {
        return Err(CliError::Shape(format!(
            "matrix claims {}x{} but has {} entries",
            doc.rows,
            doc.cols,
            doc.entries.len()
        )));
    }
    let d = TransferMatrix::new(
        doc.rows,
        doc.cols,
        doc.entries.clone(),
        StochasticClass::DoublyStochastic,
    )
    .map_err(|e| CliError::InvalidMatrix(e.to_string()))?;
    let dec = birkhoff_decompose(&d, cfg.peel_tol)?;
    let mut report = ReportDocument::new("decompose");
    report.decomposition = Some(DecompositionDoc::from_decomposition(&dec, &d));
    Ok(report)
}

/// `numrange <A> <B> [--grid N]`: numerical-range containment W(B) ⊆ W(A)
/// with per-angle support margins.
pub fn cmd_numrange(
    a_path: &Path,
    b_path: &Path,
    grid: usize,
    cfg: &Config,
) -> CliResult<ReportDocument> {
    let a_doc: SquareMatrixDoc = read_json(a_path, "matrix A")?;
    let b_doc: SquareMatrixDoc = read_json(b_path, "matrix B")?;
    numrange_document(&a_doc, &b_doc, grid, cfg)
}

pub fn numrange_document(
    a_doc: &SquareMatrixDoc,
    b_doc: &SquareMatrixDoc,
    grid: usize,
    cfg: &Config,
) -> CliResult<ReportDocument> {
    let a = a_doc.to_matrix()?;
    let b = b_doc.to_matrix()?;
    let tol = cfg.numrange_tol * (1.0 + a.max_norm() + b.max_norm());
    let margins = numrange_margins(&b, &a, grid)?;
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut report = ReportDocument::new("numrange");
    report.numerical_range = Some(NumrangeDoc {
        contained: min_margin >= -tol,
        grid,
        tol,
        min_margin,
        margins,
    });
    Ok(report)
}

/// Helpers shared with the tests.
pub fn square_doc_from_matrix(m: &ComplexMatrix) -> SquareMatrixDoc {
    SquareMatrixDoc::from_matrix(m)
}

pub fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    MatrixDoc::from_matrix(m)
}
