//! Linear-programming feasibility for the transfer-matrix condition
//! (b_ij) = (a_ij) · D under the four stochastic classes.
//!
//! Column-stochastic (and plain nonnegative) systems decouple into m
//! independent column polytopes, each solved at an extreme point; row- and
//! doubly-stochastic systems couple the columns and go through one phase-1
//! run on all n·m variables.

mod simplex;

pub use simplex::{phase1_details, phase1_simplex, Phase1Outcome};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Stochastic class of a transfer matrix; encodes which map property the
/// matrix witnesses (unital, trace preserving, both, or neither).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StochasticClass {
    Nonnegative,
    ColumnStochastic,
    RowStochastic,
    DoublyStochastic,
}

impl StochasticClass {
    pub const ALL: [StochasticClass; 4] = [
        StochasticClass::Nonnegative,
        StochasticClass::ColumnStochastic,
        StochasticClass::RowStochastic,
        StochasticClass::DoublyStochastic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StochasticClass::Nonnegative => "nonnegative",
            StochasticClass::ColumnStochastic => "column-stochastic",
            StochasticClass::RowStochastic => "row-stochastic",
            StochasticClass::DoublyStochastic => "doubly-stochastic",
        }
    }

    fn wants_column_sums(self) -> bool {
        matches!(
            self,
            StochasticClass::ColumnStochastic | StochasticClass::DoublyStochastic
        )
    }

    fn wants_row_sums(self) -> bool {
        matches!(
            self,
            StochasticClass::RowStochastic | StochasticClass::DoublyStochastic
        )
    }
}

/// Tolerance for the stochastic sum constraints.
pub const SUM_TOL: f64 = 1e-9;
/// Entries in [−CLAMP_TOL, 0) are treated as roundoff and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// Nonnegative n×m matrix tagged with its stochastic class.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    n: usize,
    m: usize,
    entries: Vec<f64>, // row-major
    class: StochasticClass,
}

impl TransferMatrix {
    /// Validates nonnegativity (clamping roundoff) and the class sums.
    pub fn new(n: usize, m: usize, mut entries: Vec<f64>, class: StochasticClass) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("transfer matrix needs n, m >= 1".into()));
        }
        if entries.len() != n * m {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                n * m,
                entries.len()
            )));
        }
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for v in &mut entries {
            if *v < 0.0 {
                if *v < -CLAMP_TOL {
                    return Err(Error::InvalidInput(format!(
                        "negative entry {v:.3e} in transfer matrix"
                    )));
                }
                *v = 0.0;
            }
        }
        let mat = TransferMatrix { n, m, entries, class };
        if class.wants_column_sums() {
            for q in 0..m {
                let s: f64 = (0..n).map(|p| mat.entry(p, q)).sum();
                if (s - 1.0).abs() > SUM_TOL {
                    return Err(Error::InvalidInput(format!(
                        "column {q} sums to {s}, expected 1 for a {} matrix",
                        class.label()
                    )));
                }
            }
        }
        if class.wants_row_sums() {
            for p in 0..n {
                let s: f64 = (0..m).map(|q| mat.entry(p, q)).sum();
                if (s - 1.0).abs() > SUM_TOL {
                    return Err(Error::InvalidInput(format!(
                        "row {p} sums to {s}, expected 1 for a {} matrix",
                        class.label()
                    )));
                }
            }
        }
        Ok(mat)
    }

    pub fn identity(n: usize, class: StochasticClass) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        TransferMatrix::new(n, n, entries, class).expect("identity fits every class")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn class(&self) -> StochasticClass {
        self.class
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, p: usize, q: usize) -> f64 {
        self.entries[p * self.m + q]
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Nonzero count of column q.
    pub fn column_support(&self, q: usize) -> usize {
        (0..self.n).filter(|&p| self.entry(p, q) > 0.0).count()
    }

    /// Re-tag with another class, revalidating its sum constraints.
    pub fn with_class(&self, class: StochasticClass) -> Result<Self> {
        TransferMatrix::new(self.n, self.m, self.entries.clone(), class)
    }

    /// x · D for a row vector x of length n.
    pub fn apply_left(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.m)
            .map(|q| (0..self.n).map(|p| x[p] * self.entry(p, q)).sum())
            .collect()
    }

    pub fn as_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(self.n, self.m, &self.entries).expect("finite entries")
    }
}

/// The linear system (b_ij) = (a_ij) · D together with the class constraint.
#[derive(Debug, Clone)]
pub struct FeasibilitySystem {
    pub a_table: Vec<Vec<f64>>, // k×n
    pub b_table: Vec<Vec<f64>>, // k×m
    pub class: StochasticClass,
    n: usize,
    m: usize,
}

impl FeasibilitySystem {
    pub fn new(
        a_table: Vec<Vec<f64>>,
        b_table: Vec<Vec<f64>>,
        class: StochasticClass,
    ) -> Result<Self> {
        if a_table.len() != b_table.len() {
            return Err(Error::DimensionMismatch(format!(
                "a-table has {} rows, b-table has {}",
                a_table.len(),
                b_table.len()
            )));
        }
        if a_table.is_empty() {
            return Err(Error::InvalidInput(
                "k = 0 tables carry no dimensions; use FeasibilitySystem::empty".into(),
            ));
        }
        let check = |table: &[Vec<f64>], name: &str| -> Result<usize> {
            let first = table[0].len();
            for row in table {
                if row.len() != first {
                    return Err(Error::DimensionMismatch(format!(
                        "{name} rows have inconsistent lengths"
                    )));
                }
            }
            if !table.iter().flatten().all(|v| v.is_finite()) {
                return Err(Error::NonFinite);
            }
            Ok(first)
        };
        let n = check(&a_table, "a-table")?;
        let m = check(&b_table, "b-table")?;
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("empty spectra: n and m must be >= 1".into()));
        }
        Ok(FeasibilitySystem { a_table, b_table, class, n, m })
    }

    /// System with no interpolation constraints (k = 0): only the class
    /// constraint remains, so the uniform matrix solves it.
    pub fn empty(n: usize, m: usize, class: StochasticClass) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("empty spectra: n and m must be >= 1".into()));
        }
        Ok(FeasibilitySystem {
            a_table: vec![],
            b_table: vec![],
            class,
            n,
            m,
        })
    }

    pub fn k(&self) -> usize {
        self.a_table.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Data scale used for all tolerances: max(1, ‖a‖_max, ‖b‖_max).
    pub fn scale(&self) -> f64 {
        self.a_table
            .iter()
            .chain(self.b_table.iter())
            .flatten()
            .fold(1.0f64, |m, v| m.max(v.abs()))
    }
}

/// Verdict of a feasibility solve. The marginal band exists because phase-1
/// optima slightly above tolerance signal roundoff, not true infeasibility.
#[derive(Debug, Clone)]
pub enum FeasibilityOutcome {
    Feasible(TransferMatrix),
    Marginal { objective: f64 },
    Infeasible {
        objective: f64,
        failing_column: Option<usize>,
    },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible(_))
    }

    pub fn witness(&self) -> Option<&TransferMatrix> {
        match self {
            FeasibilityOutcome::Feasible(d) => Some(d),
            _ => None,
        }
    }
}

/// Full LP path for any class; the spec-level entry point.
///
/// `Some(D)` means D satisfies the system within tolerance; `None` covers
/// both the marginal band and certified infeasibility (use [`solve_transfer`]
/// to distinguish them).
pub fn find_transfer_matrix(sys: &FeasibilitySystem, cfg: &Config) -> Result<Option<TransferMatrix>> {
    Ok(solve_transfer(sys, cfg)?.witness().cloned())
}

/// Like [`find_transfer_matrix`] but exposing the feasible/marginal/infeasible
/// trichotomy and the phase-1 objective.
pub fn solve_transfer(sys: &FeasibilitySystem, cfg: &Config) -> Result<FeasibilityOutcome> {
    let (n, m, k) = (sys.n(), sys.m(), sys.k());
    if k == 0 {
        return degenerate_no_constraints(sys);
    }

    let feas_tol = cfg.feas_tol * sys.scale();

    // Variables d_pq in column-major order (q*n + p).
    let vars = n * m;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for i in 0..k {
        for q in 0..m {
            let mut row = vec![0.0; vars];
            for p in 0..n {
                row[q * n + p] = sys.a_table[i][p];
            }
            rows.push(row);
            rhs.push(sys.b_table[i][q]);
        }
    }
    if sys.class.wants_column_sums() {
        for q in 0..m {
            let mut row = vec![0.0; vars];
            for p in 0..n {
                row[q * n + p] = 1.0;
            }
            rows.push(row);
            rhs.push(1.0);
        }
    }
    if sys.class.wants_row_sums() {
        for p in 0..n {
            let mut row = vec![0.0; vars];
            for q in 0..m {
                row[q * n + p] = 1.0;
            }
            rows.push(row);
            rhs.push(1.0);
        }
    }

    let details = phase1_details(&rows, &rhs, &vec![0.0; vars])?;
    outcome_from_point(sys, cfg, details.objective, feas_tol, |q, p| {
        details.point[q * n + p]
    })
}

/// Column-decoupled solve per Remark-style polytopes P_q. Only classes whose
/// constraints split by columns are accepted; each returned column is an
/// extreme point and so has at most k+1 nonzero entries.
pub fn find_columnwise(sys: &FeasibilitySystem, cfg: &Config) -> Result<FeasibilityOutcome> {
    match sys.class {
        StochasticClass::ColumnStochastic | StochasticClass::Nonnegative => {}
        other => {
            return Err(Error::InvalidInput(format!(
                "{} systems do not decouple by columns",
                other.label()
            )))
        }
    }
    let (n, m, k) = (sys.n(), sys.m(), sys.k());
    if k == 0 {
        return degenerate_no_constraints(sys);
    }
    let feas_tol = cfg.feas_tol * sys.scale();
    let marginal_tol = cfg.marginal_factor * feas_tol;

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut worst_objective = 0.0f64;
    for q in 0..m {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for i in 0..k {
            rows.push(sys.a_table[i].clone());
            rhs.push(sys.b_table[i][q]);
        }
        if sys.class.wants_column_sums() {
            rows.push(vec![1.0; n]);
            rhs.push(1.0);
        }
        let details = phase1_details(&rows, &rhs, &vec![0.0; n])?;
        if details.objective > marginal_tol {
            return Ok(FeasibilityOutcome::Infeasible {
                objective: details.objective,
                failing_column: Some(q),
            });
        }
        worst_objective = worst_objective.max(details.objective);
        columns.push(details.point);
    }
    if worst_objective > feas_tol {
        return Ok(FeasibilityOutcome::Marginal {
            objective: worst_objective,
        });
    }
    outcome_from_point(sys, cfg, worst_objective, feas_tol, |q, p| columns[q][p])
}

/// Degenerate k = 0 case: no interpolation constraints, so the uniform matrix
/// of the requested class works whenever the class is satisfiable at all.
fn degenerate_no_constraints(sys: &FeasibilitySystem) -> Result<FeasibilityOutcome> {
    let (n, m) = (sys.n(), sys.m());
    if sys.class == StochasticClass::DoublyStochastic && n != m {
        return Ok(FeasibilityOutcome::Infeasible {
            objective: (n as f64 - m as f64).abs(),
            failing_column: None,
        });
    }
    Ok(FeasibilityOutcome::Feasible(uniform_transfer(n, m, sys.class)?))
}

/// Uniform matrix of a class (used for k = 0 inputs where any D works).
pub fn uniform_transfer(n: usize, m: usize, class: StochasticClass) -> Result<TransferMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput("uniform transfer needs n, m >= 1".into()));
    }
    if class == StochasticClass::DoublyStochastic && n != m {
        return Err(Error::InvalidInput(
            "doubly stochastic matrices must be square".into(),
        ));
    }
    let value = match class {
        StochasticClass::Nonnegative | StochasticClass::ColumnStochastic => 1.0 / n as f64,
        StochasticClass::RowStochastic => 1.0 / m as f64,
        StochasticClass::DoublyStochastic => 1.0 / n as f64,
    };
    TransferMatrix::new(n, m, vec![value; n * m], class)
}

fn outcome_from_point(
    sys: &FeasibilitySystem,
    cfg: &Config,
    objective: f64,
    feas_tol: f64,
    entry: impl Fn(usize, usize) -> f64,
) -> Result<FeasibilityOutcome> {
    let marginal_tol = cfg.marginal_factor * feas_tol;
    if objective > marginal_tol {
        return Ok(FeasibilityOutcome::Infeasible {
            objective,
            failing_column: None,
        });
    }
    if objective > feas_tol {
        return Ok(FeasibilityOutcome::Marginal { objective });
    }
    let (n, m) = (sys.n(), sys.m());
    let mut entries = vec![0.0; n * m];
    for p in 0..n {
        for q in 0..m {
            entries[p * m + q] = entry(q, p);
        }
    }
    let d = TransferMatrix::new(n, m, entries, sys.class)?;
    // Soundness gate: the vertex really must reproduce the b-table.
    let mut residual = 0.0f64;
    for i in 0..sys.k() {
        let got = d.apply_left(&sys.a_table[i]);
        for q in 0..m {
            residual = residual.max((got[q] - sys.b_table[i][q]).abs());
        }
    }
    if residual > feas_tol {
        return Err(Error::IllConditioned(format!(
            "phase-1 reported objective {objective:.3e} but the vertex misses by {residual:.3e}"
        )));
    }
    Ok(FeasibilityOutcome::Feasible(d))
}
