//! Dense phase-1 simplex with Bland's rule.
//!
//! Solves "find x with Aeq x = beq, x >= lower" by minimizing the sum of
//! artificial variables. Bland's rule (lowest-index entering column, lowest
//! basic-index leaving row) guarantees termination; an iteration cap guards
//! against float-induced stalls.

use crate::error::{Error, Result};

/// Outcome of a phase-1 run.
#[derive(Debug, Clone)]
pub struct Phase1Outcome {
    /// Residual sum at the optimum; ~0 means feasible.
    pub objective: f64,
    /// Candidate point (basic solution of the original variables). It solves
    /// the system only up to `objective`.
    pub point: Vec<f64>,
}

/// Feasibility search for `Aeq x = beq`, `x >= lower`.
///
/// Returns a basic feasible solution (a vertex of the polyhedron) when the
/// phase-1 optimum is below `accept_tol`, `None` when the optimum certifies
/// infeasibility at that tolerance.
pub fn phase1_simplex(
    aeq: &[Vec<f64>],
    beq: &[f64],
    lower: &[f64],
    accept_tol: f64,
) -> Result<Option<Vec<f64>>> {
    let out = phase1_details(aeq, beq, lower)?;
    if out.objective <= accept_tol {
        Ok(Some(out.point))
    } else {
        Ok(None)
    }
}

/// Full phase-1 run, reporting the optimum so the caller can apply its own
/// feasible / marginal / infeasible policy.
pub fn phase1_details(aeq: &[Vec<f64>], beq: &[f64], lower: &[f64]) -> Result<Phase1Outcome> {
    let rows = aeq.len();
    if beq.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{} constraint rows but {} right-hand sides",
            rows,
            beq.len()
        )));
    }
    let vars = lower.len();
    for (i, row) in aeq.iter().enumerate() {
        if row.len() != vars {
            return Err(Error::DimensionMismatch(format!(
                "constraint row {} has {} coefficients, expected {}",
                i,
                row.len(),
                vars
            )));
        }
    }
    let finite = aeq.iter().flatten().chain(beq).chain(lower).all(|v| v.is_finite());
    if !finite {
        return Err(Error::NonFinite);
    }
    if rows == 0 {
        return Ok(Phase1Outcome {
            objective: 0.0,
            point: lower.to_vec(),
        });
    }

    // Shift x = lower + y, y >= 0, and orient rows so rhs >= 0.
    let total = vars + rows; // structural + artificial
    let mut t = vec![vec![0.0f64; total]; rows];
    let mut rhs = vec![0.0f64; rows];
    for i in 0..rows {
        let mut b = beq[i];
        for j in 0..vars {
            b -= aeq[i][j] * lower[j];
        }
        let flip = if b < 0.0 { -1.0 } else { 1.0 };
        rhs[i] = flip * b;
        for j in 0..vars {
            t[i][j] = flip * aeq[i][j];
        }
        t[i][vars + i] = 1.0;
    }

    let scale = t
        .iter()
        .flatten()
        .chain(rhs.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let piv_tol = 1e-11 * scale;

    // Reduced-cost row for min Σ artificials with the artificial basis.
    let mut cost = vec![0.0f64; total];
    for j in 0..vars {
        cost[j] = -t.iter().map(|row| row[j]).sum::<f64>();
    }
    let mut basis: Vec<usize> = (0..rows).map(|i| vars + i).collect();
    let mut banned = vec![false; total];

    let cap = 10_000 + 200 * total;
    let mut iterations = 0usize;
    loop {
        // Bland: lowest-index column with negative reduced cost.
        let entering = (0..total)
            .find(|&j| !banned[j] && cost[j] < -piv_tol);
        let Some(j) = entering else { break };

        // Ratio test; ties resolved by lowest basic variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            if t[i][j] > piv_tol {
                let ratio = rhs[i] / t[i][j];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - piv_tol
                            || ((ratio - lr).abs() <= piv_tol && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            // Phase-1 objective is bounded below; an unbounded column means
            // the data broke the arithmetic.
            return Err(Error::IllConditioned(
                "phase-1 ratio test found no pivot".into(),
            ));
        };

        if basis[i] >= vars {
            banned[basis[i]] = true;
        }
        pivot(&mut t, &mut rhs, &mut cost, &mut basis, i, j);

        iterations += 1;
        if iterations > cap {
            return Err(Error::IllConditioned(format!(
                "phase-1 exceeded {cap} pivots"
            )));
        }
    }

    // Optimum = value still carried by basic artificials.
    let objective: f64 = (0..rows)
        .filter(|&i| basis[i] >= vars)
        .map(|i| rhs[i].max(0.0))
        .sum();

    // Drive near-zero artificials out of the basis where a structural pivot
    // exists; rows without one are redundant and can stay.
    for i in 0..rows {
        if basis[i] >= vars && rhs[i].abs() <= piv_tol {
            if let Some(j) = (0..vars).find(|&j| !in_basis(&basis, j) && t[i][j].abs() > piv_tol) {
                pivot(&mut t, &mut rhs, &mut cost, &mut basis, i, j);
            }
        }
    }

    let mut point = lower.to_vec();
    for i in 0..rows {
        if basis[i] < vars {
            // Basic values only dip below zero through roundoff.
            let y = if rhs[i] < 0.0 && rhs[i] > -piv_tol { 0.0 } else { rhs[i] };
            point[basis[i]] = lower[basis[i]] + y;
        }
    }
    Ok(Phase1Outcome { objective, point })
}

fn in_basis(basis: &[usize], j: usize) -> bool {
    basis.contains(&j)
}

fn pivot(
    t: &mut [Vec<f64>],
    rhs: &mut [f64],
    cost: &mut [f64],
    basis: &mut [usize],
    i: usize,
    j: usize,
) {
    let total = t[0].len();
    let piv = t[i][j];
    for col in 0..total {
        t[i][col] /= piv;
    }
    rhs[i] /= piv;
    t[i][j] = 1.0;
    for r in 0..t.len() {
        if r == i {
            continue;
        }
        let factor = t[r][j];
        if factor != 0.0 {
            for col in 0..total {
                t[r][col] -= factor * t[i][col];
            }
            t[r][j] = 0.0;
            rhs[r] -= factor * rhs[i];
            if rhs[r] < 0.0 && rhs[r] > -1e-12 {
                rhs[r] = 0.0;
            }
        }
    }
    let factor = cost[j];
    if factor != 0.0 {
        for col in 0..total {
            cost[col] -= factor * t[i][col];
        }
        cost[j] = 0.0;
    }
    basis[i] = j;
}
