//! Closed-form feasibility criteria for the single-matrix case (k = 1),
//! majorization, the explicit constructive transfer matrices that witness
//! them, and the per-class classifier.
//!
//! For k = 1 the classifier always cross-checks the closed forms against the
//! LP; a disagreement outside the marginal band trips an internal-consistency
//! error rather than being reported to the caller.

use crate::config::Config;
use crate::error::{Error, Result};
use crate::feasibility::{
    find_columnwise, solve_transfer, FeasibilityOutcome, FeasibilitySystem, StochasticClass,
    TransferMatrix,
};
use crate::linalg::SpectrumTable;

/// Pair of real spectra, each sorted descending.
#[derive(Debug, Clone)]
pub struct SingleSpectrumPair {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl SingleSpectrumPair {
    /// Sorts both vectors descending; rejects empty or non-finite input.
    pub fn new(a: impl Into<Vec<f64>>, b: impl Into<Vec<f64>>) -> Result<Self> {
        let (mut a, mut b) = (a.into(), b.into());
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidInput("spectra must be nonempty".into()));
        }
        if !a.iter().chain(b.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        a.sort_by(|x, y| y.total_cmp(x));
        b.sort_by(|x, y| y.total_cmp(x));
        Ok(SingleSpectrumPair { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Equality tolerance for criteria built from sums of up to n terms.
    pub fn tol(&self) -> f64 {
        let mass: f64 = self.a.iter().chain(self.b.iter()).map(|v| v.abs()).sum();
        1e-9 * (1.0 + mass)
    }
}

/// Nonnegative scaling witnesses for the two-sided eigenvalue bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPair {
    pub gamma1: f64,
    pub gamma2: f64,
}

/// Does any completely positive map take spectrum `a` to spectrum `b`?
///
/// Feasible exactly when nonnegative γ₁, γ₂ exist with
/// γ₂·min(a) ≤ b_j ≤ γ₁·max(a) for all j; returns such a pair.
pub fn cp_single_feasible(p: &SingleSpectrumPair) -> Option<GammaPair> {
    let tol = p.tol();
    let (max_a, min_a) = (p.a[0], p.a[p.a.len() - 1]);
    let (max_b, min_b) = (p.b[0], p.b[p.b.len() - 1]);

    // Degenerate a = 0: only b = 0 is reachable.
    if max_a.abs() <= tol && min_a.abs() <= tol {
        let b_zero = max_b.abs() <= tol && min_b.abs() <= tol;
        return b_zero.then_some(GammaPair { gamma1: 0.0, gamma2: 0.0 });
    }

    let gamma1 = if max_a > tol {
        max_b.max(0.0) / max_a
    } else if max_b <= tol {
        0.0
    } else if max_a > 0.0 {
        max_b / max_a
    } else {
        return None; // positive b values, nothing positive in a
    };

    let gamma2 = if min_a < -tol {
        min_b.min(0.0) / min_a
    } else if min_b >= -tol {
        0.0
    } else if min_a < 0.0 {
        min_b / min_a
    } else {
        return None; // negative b values, nothing negative in a
    };

    Some(GammaPair { gamma1, gamma2 })
}

/// Unital case: every b_j must lie in [min(a), max(a)] (γ₁ = γ₂ = 1).
pub fn unital_single_feasible(p: &SingleSpectrumPair) -> bool {
    let tol = p.tol();
    let (max_a, min_a) = (p.a[0], p.a[p.a.len() - 1]);
    p.b[0] <= max_a + tol && p.b[p.b.len() - 1] >= min_a - tol
}

/// Trace-preserving case: tr A = tr B and Σ|a| ≥ Σ|b|.
pub fn tp_single_feasible(p: &SingleSpectrumPair) -> bool {
    let tol = p.tol();
    let sum_a: f64 = p.a.iter().sum();
    let sum_b: f64 = p.b.iter().sum();
    let abs_a: f64 = p.a.iter().map(|v| v.abs()).sum();
    let abs_b: f64 = p.b.iter().map(|v| v.abs()).sum();
    (sum_a - sum_b).abs() <= tol && abs_a >= abs_b - tol
}

/// b ≺ a: partial sums of the sorted spectra are dominated and totals match.
/// Lengths must agree.
pub fn majorizes(p: &SingleSpectrumPair) -> Result<bool> {
    if p.a.len() != p.b.len() {
        return Err(Error::DimensionMismatch(format!(
            "majorization needs equal lengths, got {} and {}",
            p.a.len(),
            p.b.len()
        )));
    }
    let tol = p.tol();
    let mut sa = 0.0;
    let mut sb = 0.0;
    for i in 0..p.a.len() - 1 {
        sa += p.a[i];
        sb += p.b[i];
        if sb > sa + tol {
            return Ok(false);
        }
    }
    sa += p.a[p.a.len() - 1];
    sb += p.b[p.b.len() - 1];
    Ok((sa - sb).abs() <= tol)
}

/// The two-row transfer matrix of the unital/CP construction: every b_q is a
/// convex mix t_q·γ₁a₁ + (1−t_q)·γ₂a_n, so only the first and last rows of D
/// carry weight. Column stochastic when γ₁ = γ₂ = 1.
pub fn construct_d_unital(p: &SingleSpectrumPair, g: GammaPair) -> Result<TransferMatrix> {
    if g.gamma1 < 0.0 || g.gamma2 < 0.0 {
        return Err(Error::CriterionViolated("gamma witnesses must be nonnegative".into()));
    }
    let tol = p.tol() * (1.0 + g.gamma1.abs() + g.gamma2.abs());
    let (n, m) = (p.a.len(), p.b.len());
    let hi = g.gamma1 * p.a[0];
    let lo = g.gamma2 * p.a[n - 1];
    for (q, &bq) in p.b.iter().enumerate() {
        if bq > hi + tol || bq < lo - tol {
            return Err(Error::CriterionViolated(format!(
                "b[{q}] = {bq} outside [{lo}, {hi}]"
            )));
        }
    }
    let denom = hi - lo;
    let mut entries = vec![0.0; n * m];
    for (q, &bq) in p.b.iter().enumerate() {
        // Degenerate span: all b_q equal the common value; any t works, use 1.
        let t = if denom.abs() <= 1e-14 * (1.0 + hi.abs()) {
            1.0
        } else {
            ((bq - lo) / denom).clamp(0.0, 1.0)
        };
        entries[q] += t * g.gamma1;
        entries[(n - 1) * m + q] += (1.0 - t) * g.gamma2;
    }
    let unital = (g.gamma1 - 1.0).abs() <= 1e-12 && (g.gamma2 - 1.0).abs() <= 1e-12;
    let class = if unital {
        StochasticClass::ColumnStochastic
    } else {
        StochasticClass::Nonnegative
    };
    TransferMatrix::new(n, m, entries, class)
}

/// The two-pattern row-stochastic matrix of the trace-preserving
/// construction: rows for nonnegative a_p share one pattern, rows for
/// negative a_p share another, and the slack lands in the last column.
pub fn construct_d_tp(p: &SingleSpectrumPair) -> Result<TransferMatrix> {
    if !tp_single_feasible(p) {
        return Err(Error::CriterionViolated(
            "trace/absolute-sum criterion fails; no trace preserving map exists".into(),
        ));
    }
    let (n, m) = (p.a.len(), p.b.len());
    let a_plus: f64 = p.a.iter().filter(|&&v| v >= 0.0).sum();
    let a_minus: f64 = p.a.iter().filter(|&&v| v < 0.0).sum();
    let s = p.b.iter().filter(|&&v| v >= 0.0).count(); // b sorted desc: first s entries
    let tiny = 1e-14 * (1.0 + p.a.iter().map(|v| v.abs()).sum::<f64>());

    let t: Vec<f64> = p
        .b
        .iter()
        .enumerate()
        .map(|(q, &bq)| {
            if q < s {
                if a_plus > tiny { bq / a_plus } else { 0.0 }
            } else if a_minus < -tiny {
                bq / a_minus
            } else {
                0.0
            }
        })
        .collect();
    let u = (1.0 - t[..s].iter().sum::<f64>()).max(0.0);
    let v = (1.0 - t[s..].iter().sum::<f64>()).max(0.0);

    let mut pos_row = vec![0.0; m];
    pos_row[..s].copy_from_slice(&t[..s]);
    pos_row[m - 1] += u;
    let mut neg_row = vec![0.0; m];
    neg_row[s..].copy_from_slice(&t[s..]);
    neg_row[m - 1] += v;

    let mut entries = vec![0.0; n * m];
    for (prow, &ap) in p.a.iter().enumerate() {
        let src = if ap >= 0.0 { &pos_row } else { &neg_row };
        entries[prow * m..(prow + 1) * m].copy_from_slice(src);
    }
    TransferMatrix::new(n, m, entries, StochasticClass::RowStochastic)
}

/// Map-level classes, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapClass {
    Cp,
    Unital,
    Tp,
    Utp,
}

impl MapClass {
    pub const ALL: [MapClass; 4] = [MapClass::Cp, MapClass::Unital, MapClass::Tp, MapClass::Utp];

    pub fn stochastic_class(self) -> StochasticClass {
        match self {
            MapClass::Cp => StochasticClass::Nonnegative,
            MapClass::Unital => StochasticClass::ColumnStochastic,
            MapClass::Tp => StochasticClass::RowStochastic,
            MapClass::Utp => StochasticClass::DoublyStochastic,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MapClass::Cp => "cp",
            MapClass::Unital => "unital",
            MapClass::Tp => "tp",
            MapClass::Utp => "utp",
        }
    }
}

/// Three-valued feasibility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Marginal,
    Infeasible,
}

impl Feasibility {
    pub fn label(self) -> &'static str {
        match self {
            Feasibility::Feasible => "yes",
            Feasibility::Marginal => "marginal",
            Feasibility::Infeasible => "no",
        }
    }
}

/// Verdict for one class: feasibility, the criterion that decided it, the
/// witness transfer matrix when feasible, and the LP objective when one ran.
#[derive(Debug, Clone)]
pub struct ClassVerdict {
    pub class: MapClass,
    pub feasibility: Feasibility,
    pub criterion: &'static str,
    pub witness: Option<TransferMatrix>,
    pub phase1_objective: Option<f64>,
}

/// Per-class feasibility verdicts for one pair of spectrum tables.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub verdicts: Vec<ClassVerdict>,
}

impl FeasibilityReport {
    pub fn verdict(&self, class: MapClass) -> &ClassVerdict {
        self.verdicts
            .iter()
            .find(|v| v.class == class)
            .expect("every class is reported")
    }
}

/// Classify both tables against all four map classes.
///
/// k must match between the tables. For k = 1 the analytic criteria decide
/// and the LP verifies; for larger families the LP decides.
pub fn classify(
    a_table: &SpectrumTable,
    b_table: &SpectrumTable,
    cfg: &Config,
) -> Result<FeasibilityReport> {
    if a_table.k != b_table.k {
        return Err(Error::DimensionMismatch(format!(
            "family sizes differ: {} vs {}",
            a_table.k, b_table.k
        )));
    }
    if a_table.k == 0 {
        return Err(Error::InvalidInput("cannot classify empty families".into()));
    }
    let mut verdicts = Vec::with_capacity(4);
    for class in MapClass::ALL {
        verdicts.push(classify_one(a_table, b_table, class, cfg)?);
    }
    Ok(FeasibilityReport { verdicts })
}

fn lp_outcome(
    a_table: &SpectrumTable,
    b_table: &SpectrumTable,
    class: MapClass,
    cfg: &Config,
) -> Result<FeasibilityOutcome> {
    let sys = FeasibilitySystem::new(
        a_table.table.clone(),
        b_table.table.clone(),
        class.stochastic_class(),
    )?;
    match class.stochastic_class() {
        StochasticClass::ColumnStochastic | StochasticClass::Nonnegative => {
            find_columnwise(&sys, cfg)
        }
        _ => solve_transfer(&sys, cfg),
    }
}

fn classify_one(
    a_table: &SpectrumTable,
    b_table: &SpectrumTable,
    class: MapClass,
    cfg: &Config,
) -> Result<ClassVerdict> {
    let lp = lp_outcome(a_table, b_table, class, cfg)?;
    let (lp_feas, objective) = match &lp {
        FeasibilityOutcome::Feasible(_) => (Feasibility::Feasible, None),
        FeasibilityOutcome::Marginal { objective } => (Feasibility::Marginal, Some(*objective)),
        FeasibilityOutcome::Infeasible { objective, .. } => {
            (Feasibility::Infeasible, Some(*objective))
        }
    };

    if a_table.k > 1 {
        return Ok(ClassVerdict {
            class,
            feasibility: lp_feas,
            criterion: "lp-phase1",
            witness: lp.witness().cloned(),
            phase1_objective: objective,
        });
    }

    // k = 1: decide analytically, cross-check against the LP.
    let pair = SingleSpectrumPair::new(a_table.row(0), b_table.row(0))?;
    let (feasible, criterion, witness) = single_verdict(&pair, class)?;
    let witness = match (feasible, witness) {
        (true, Some(d)) => Some(align_witness(&d, a_table.row(0), b_table.row(0))),
        (true, None) => lp.witness().cloned(),
        _ => None,
    };

    if lp_feas != Feasibility::Marginal {
        let lp_says = lp_feas == Feasibility::Feasible;
        if lp_says != feasible {
            return Err(Error::Inconsistent(format!(
                "class {}: analytic criterion says {} but LP says {} (objective {:?})",
                class.label(),
                feasible,
                lp_says,
                objective
            )));
        }
    }

    Ok(ClassVerdict {
        class,
        feasibility: if feasible {
            Feasibility::Feasible
        } else {
            Feasibility::Infeasible
        },
        criterion,
        witness,
        phase1_objective: objective,
    })
}

/// Analytic verdict and witness for one class at k = 1, on sorted spectra.
fn single_verdict(
    pair: &SingleSpectrumPair,
    class: MapClass,
) -> Result<(bool, &'static str, Option<TransferMatrix>)> {
    Ok(match class {
        MapClass::Cp => match cp_single_feasible(pair) {
            // The construction may come out column stochastic (γ = (1,1));
            // the CP witness is reported under the plain nonnegative tag.
            Some(g) => {
                let d = construct_d_unital(pair, g)?.with_class(StochasticClass::Nonnegative)?;
                (true, "gamma-bounds", Some(d))
            }
            None => (false, "gamma-bounds", None),
        },
        MapClass::Unital => {
            if unital_single_feasible(pair) {
                let g = GammaPair { gamma1: 1.0, gamma2: 1.0 };
                (true, "spectral-range", Some(construct_d_unital(pair, g)?))
            } else {
                (false, "spectral-range", None)
            }
        }
        MapClass::Tp => {
            if tp_single_feasible(pair) {
                (true, "trace-abs-sum", Some(construct_d_tp(pair)?))
            } else {
                (false, "trace-abs-sum", None)
            }
        }
        MapClass::Utp => {
            let feasible = pair.a().len() == pair.b().len() && majorizes(pair)?;
            // Witness comes from the LP (the analytic route proves existence
            // but the doubly stochastic D is cheapest to read off the LP).
            (feasible, "majorization", None)
        }
    })
}

/// The analytic constructions work on sorted spectra; scatter the result back
/// to the order the tables actually use.
fn align_witness(d_sorted: &TransferMatrix, a_row: &[f64], b_row: &[f64]) -> TransferMatrix {
    let pa = sort_perm(a_row);
    let pb = sort_perm(b_row);
    let (n, m) = (d_sorted.n(), d_sorted.m());
    let mut entries = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            entries[pa[i] * m + pb[j]] = d_sorted.entry(i, j);
        }
    }
    TransferMatrix::new(n, m, entries, d_sorted.class())
        .expect("permuting rows and columns preserves the class")
}

/// Permutation sending sorted position -> original index (descending).
fn sort_perm(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    idx
}
