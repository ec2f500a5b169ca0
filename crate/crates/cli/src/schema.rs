//! JSON schemas: problem documents in, report documents out.
//!
//! Complex scalars are [re, im] pairs, matrices row-major. Floats go through
//! serde_json's shortest-round-trip formatting, so every value reloads to
//! the identical f64.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use cpinterp_core::construct::{BirkhoffDecomposition, KrausMap, MixedUnitaryMap};
use cpinterp_core::feasibility::{StochasticClass, TransferMatrix};
use cpinterp_core::matrix::{C64, ComplexMatrix, HermitianMatrix};
use cpinterp_core::verify::VerificationReport;
use cpinterp_core::Config;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

/// Square complex matrix: {dim, entries: [[re, im]; dim*dim]} row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquareMatrixDoc {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl SquareMatrixDoc {
    pub fn to_matrix(&self) -> CliResult<ComplexMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(CliError::Shape(format!(
                "matrix claims dim {} but has {} entries",
                self.dim,
                self.entries.len()
            )));
        }
        let entries: Vec<C64> = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ComplexMatrix::new(self.dim, self.dim, entries)
            .map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        SquareMatrixDoc {
            dim: m.rows(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// General complex matrix: {rows, cols, entries: [[re, im]]} row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn to_matrix(&self) -> CliResult<ComplexMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(CliError::Shape(format!(
                "matrix claims {}x{} but has {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        let entries: Vec<C64> = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ComplexMatrix::new(self.rows, self.cols, entries)
            .map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixDoc {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Real matrix: {rows, cols, entries: [f64]} row-major. Used for transfer
/// matrices and the `decompose` input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealMatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
}

/// Problem: two equally long lists of Hermitian matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub version: String,
    #[serde(rename = "A")]
    pub a: Vec<SquareMatrixDoc>,
    #[serde(rename = "B")]
    pub b: Vec<SquareMatrixDoc>,
}

/// Parsed problem: Hermitian families plus load warnings.
pub struct LoadedProblem {
    pub a: Vec<HermitianMatrix>,
    pub b: Vec<HermitianMatrix>,
    pub warnings: Vec<String>,
}

impl ProblemDocument {
    pub fn load(&self) -> CliResult<LoadedProblem> {
        if self.a.len() != self.b.len() {
            return Err(CliError::Shape(format!(
                "A has {} matrices, B has {}",
                self.a.len(),
                self.b.len()
            )));
        }
        if self.a.is_empty() {
            return Err(CliError::Shape("problem must contain at least one pair".into()));
        }
        let mut warnings = Vec::new();
        let mut load_family = |docs: &[SquareMatrixDoc], name: &str| -> CliResult<Vec<HermitianMatrix>> {
            let mut out = Vec::with_capacity(docs.len());
            for (i, doc) in docs.iter().enumerate() {
                let raw = doc.to_matrix()?;
                if raw.rows() != docs[0].dim {
                    return Err(CliError::Shape(format!(
                        "{name}[{i}] has dim {}, expected {}",
                        raw.rows(),
                        docs[0].dim
                    )));
                }
                let scale = 1.0 + raw.max_norm();
                let (h, asymmetry) = HermitianMatrix::symmetrize(raw);
                if asymmetry > 1e-10 * scale {
                    warnings.push(format!(
                        "{name}[{i}] symmetrized: asymmetry {asymmetry:.3e} exceeds 1e-10 relative"
                    ));
                }
                out.push(h);
            }
            Ok(out)
        };
        let a = load_family(&self.a, "A")?;
        let b = load_family(&self.b, "B")?;
        Ok(LoadedProblem { a, b, warnings })
    }
}

/// Transfer matrix with its stochastic class tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferMatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub class: String,
    pub entries: Vec<f64>,
}

pub fn class_tag(class: StochasticClass) -> &'static str {
    match class {
        StochasticClass::Nonnegative => "nonnegative",
        StochasticClass::ColumnStochastic => "column-stochastic",
        StochasticClass::RowStochastic => "row-stochastic",
        StochasticClass::DoublyStochastic => "doubly-stochastic",
    }
}

impl TransferMatrixDoc {
    pub fn from_transfer(d: &TransferMatrix) -> Self {
        TransferMatrixDoc {
            rows: d.n(),
            cols: d.m(),
            class: class_tag(d.class()).to_string(),
            entries: d.entries().to_vec(),
        }
    }
}

/// Serialized map: Kraus operators or weighted unitaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapDocument {
    Kraus {
        input_dim: usize,
        output_dim: usize,
        operators: Vec<MatrixDoc>,
    },
    MixedUnitary {
        weights: Vec<f64>,
        unitaries: Vec<MatrixDoc>,
    },
}

impl MapDocument {
    pub fn from_kraus(k: &KrausMap) -> Self {
        MapDocument::Kraus {
            input_dim: k.input_dim(),
            output_dim: k.output_dim(),
            operators: k.operators().iter().map(MatrixDoc::from_matrix).collect(),
        }
    }

    pub fn from_mixed_unitary(m: &MixedUnitaryMap) -> Self {
        MapDocument::MixedUnitary {
            weights: m.weights().to_vec(),
            unitaries: m.unitaries().iter().map(MatrixDoc::from_matrix).collect(),
        }
    }

    /// Reconstruct the operator-sum form for verification.
    pub fn to_kraus(&self, unitary_tol: f64) -> CliResult<KrausMap> {
        match self {
            MapDocument::Kraus {
                input_dim,
                output_dim,
                operators,
            } => {
                let ops: CliResult<Vec<ComplexMatrix>> =
                    operators.iter().map(|d| d.to_matrix()).collect();
                KrausMap::new(*input_dim, *output_dim, ops?).map_err(CliError::from)
            }
            MapDocument::MixedUnitary { weights, unitaries } => {
                let us: CliResult<Vec<ComplexMatrix>> =
                    unitaries.iter().map(|d| d.to_matrix()).collect();
                let map = MixedUnitaryMap::new(weights.clone(), us?, unitary_tol)
                    .map_err(CliError::from)?;
                Ok(map.to_kraus())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationDoc {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub is_unital: bool,
    pub unital_residual: f64,
    pub is_tp: bool,
    pub tp_residual: f64,
    pub interpolation_residuals: Vec<f64>,
    pub kraus_rank: usize,
}

impl VerificationDoc {
    pub fn from_report(r: &VerificationReport) -> Self {
        VerificationDoc {
            is_cp: r.is_cp,
            min_choi_eigenvalue: r.min_choi_eigenvalue,
            is_unital: r.is_unital,
            unital_residual: r.unital_residual,
            is_tp: r.is_tp,
            tp_residual: r.tp_residual,
            interpolation_residuals: r.interpolation_residuals.clone(),
            kraus_rank: r.kraus_rank,
        }
    }
}

/// Feasibility verdict for one class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReportDoc {
    pub feasible: String, // "yes" | "no" | "marginal"
    pub criterion: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<TransferMatrixDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase1_objective: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub weights: Vec<f64>,
    pub permutations: Vec<Vec<usize>>,
    pub reconstruction_residual: f64,
}

impl DecompositionDoc {
    pub fn from_decomposition(dec: &BirkhoffDecomposition, source: &TransferMatrix) -> Self {
        let residual = dec.reconstruct().max_diff(&source.as_complex());
        DecompositionDoc {
            weights: dec.weights().to_vec(),
            permutations: dec.permutations().to_vec(),
            reconstruction_residual: residual,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NumrangeDoc {
    pub contained: bool,
    pub grid: usize,
    pub tol: f64,
    pub min_margin: f64,
    pub margins: Vec<f64>,
}

/// The one report shape every subcommand emits; absent sections are omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<BTreeMap<String, ClassReportDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub requested_class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<MapDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerical_range: Option<NumrangeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        ReportDocument {
            version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            classes: None,
            requested_class: None,
            map: None,
            verification: None,
            decomposition: None,
            numerical_range: None,
            diagnostics: Vec::new(),
        }
    }
}

/// Optional overrides loaded from --config; flags win over the file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub seed: Option<u64>,
    pub herm_tol: Option<f64>,
    pub unitary_tol: Option<f64>,
    pub diag_tol: Option<f64>,
    pub feas_tol: Option<f64>,
    pub marginal_factor: Option<f64>,
    pub peel_tol: Option<f64>,
    pub numrange_grid: Option<usize>,
    pub numrange_tol: Option<f64>,
    pub property_tol: Option<f64>,
}

impl ConfigDocument {
    pub fn apply(&self, cfg: &mut Config) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.herm_tol {
            cfg.herm_tol = v;
        }
        if let Some(v) = self.unitary_tol {
            cfg.unitary_tol = v;
        }
        if let Some(v) = self.diag_tol {
            cfg.diag_tol = v;
        }
        if let Some(v) = self.feas_tol {
            cfg.feas_tol = v;
        }
        if let Some(v) = self.marginal_factor {
            cfg.marginal_factor = v;
        }
        if let Some(v) = self.peel_tol {
            cfg.peel_tol = v;
        }
        if let Some(v) = self.numrange_grid {
            cfg.numrange_grid = v;
        }
        if let Some(v) = self.numrange_tol {
            cfg.numrange_tol = v;
        }
        if let Some(v) = self.property_tol {
            cfg.property_tol = v;
        }
    }
}
