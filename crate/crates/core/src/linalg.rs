//! Hermitian eigendecomposition, simultaneous diagonalization of commuting
//! families, and the pinching average.
//!
//! The eigensolver is a cyclic complex Jacobi iteration: unitary plane
//! rotations zero one off-diagonal entry at a time and converge
//! quadratically. Dense desk scale only.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::matrix::{C64, ComplexMatrix, HermitianMatrix};

/// Eigenvalues sorted descending plus a unitary eigenvector basis
/// (columns are eigenvectors, in the order of `values`).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub basis: ComplexMatrix,
}

impl EigenDecomposition {
    /// basis · diag(values) · basis^*.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diag_real(&self.values);
        self.basis.mul(&d).mul(&self.basis.adjoint())
    }
}

/// Joint diagonalization result for a commuting family: a single unitary
/// `diagonalizer` U with U^* A_i U diagonal, and the k×n table of diagonals.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub k: usize,
    pub n: usize,
    pub diagonalizer: ComplexMatrix,
    pub table: Vec<Vec<f64>>,
}

impl SpectrumTable {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.table[i]
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come out sorted descending; ties are broken by lexicographic
/// order of the (phase-normalized) eigenvector columns so repeated runs are
/// reproducible.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            basis: ComplexMatrix::zeros(0, 0),
        });
    }
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = 1.0 + a.max_norm();
    let thresh = 1e-15 * scale;

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= thresh {
                    continue;
                }
                rotated = true;
                let phase = apq / g;
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * g);
                let sign = if tau < 0.0 { -1.0 } else { 1.0 };
                let t = sign / (tau.abs() + (tau * tau + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sigma = t * c;
                let s = phase * sigma;

                // A <- J^* A J with J = I except J[p][p]=J[q][q]=c,
                // J[p][q]=s, J[q][p]=-conj(s).
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    let new_p = aip * c - aiq * s.conj();
                    let new_q = aip * s + aiq * c;
                    a[(i, p)] = new_p;
                    a[(i, q)] = new_q;
                    a[(p, i)] = new_p.conj();
                    a[(q, i)] = new_q.conj();
                }
                let new_pp = alpha * c * c + beta * sigma * sigma - 2.0 * c * sigma * g;
                let new_qq = alpha * sigma * sigma + beta * c * c + 2.0 * c * sigma * g;
                a[(p, p)] = C64::new(new_pp, 0.0);
                a[(q, q)] = C64::new(new_qq, 0.0);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);

                // Accumulate V <- V J (columns p, q mix).
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * s.conj();
                    v[(i, q)] = vip * s + viq * c;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps > JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                op: "eig_hermitian (Jacobi)",
                iterations: sweeps,
                residual: a.offdiag_max(),
            });
        }
    }

    let mut values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    normalize_phases(&mut v);
    let order = sort_order(&values, &v);
    values = order.iter().map(|&i| values[i]).collect();
    let basis = v.permute_cols(&order);
    Ok(EigenDecomposition { values, basis })
}

/// Rotate each column so its largest-modulus entry is real positive.
fn normalize_phases(v: &mut ComplexMatrix) {
    let n = v.rows();
    for j in 0..v.cols() {
        let mut best = 0usize;
        let mut best_norm = 0.0f64;
        for i in 0..n {
            let m = v[(i, j)].norm();
            if m > best_norm + 1e-14 {
                best_norm = m;
                best = i;
            }
        }
        if best_norm > 0.0 {
            let z = v[(best, j)];
            let phase = z.conj() / z.norm();
            for i in 0..n {
                v[(i, j)] = v[(i, j)] * phase;
            }
        }
    }
}

/// Descending by value; exact ties fall back to lexicographic comparison of
/// the eigenvector columns.
fn sort_order(values: &[f64], v: &ComplexMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        values[j]
            .total_cmp(&values[i])
            .then_with(|| cmp_cols(v, i, j))
    });
    order
}

fn cmp_cols(v: &ComplexMatrix, i: usize, j: usize) -> std::cmp::Ordering {
    for r in 0..v.rows() {
        let (a, b) = (v[(r, i)], v[(r, j)]);
        let ord = a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Commutator AB − BA.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.mul(b).sub(&b.mul(a))
}

/// Pairwise commutation test: ‖A_iA_j − A_jA_i‖_max ≤ tol (1 + ‖A_i‖‖A_j‖).
pub fn is_commuting_family(family: &[HermitianMatrix], tol: f64) -> Result<bool> {
    check_same_dim(family)?;
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            let (a, b) = (family[i].matrix(), family[j].matrix());
            let bound = tol * (1.0 + a.max_norm() * b.max_norm());
            if commutator(a, b).max_norm() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Locate the worst-commuting pair; used for diagnostics.
pub fn worst_commutator(family: &[HermitianMatrix]) -> Option<(usize, usize, f64)> {
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            let norm = commutator(family[i].matrix(), family[j].matrix()).max_norm();
            if worst.map_or(true, |(_, _, w)| norm > w) {
                worst = Some((i, j, norm));
            }
        }
    }
    worst
}

fn check_same_dim(family: &[HermitianMatrix]) -> Result<usize> {
    let n = family
        .first()
        .ok_or_else(|| Error::InvalidInput("empty family has no dimension".into()))?
        .dim();
    for (i, h) in family.iter().enumerate() {
        if h.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "family member {} has dim {}, expected {}",
                i,
                h.dim(),
                n
            )));
        }
    }
    Ok(n)
}

/// Simultaneously diagonalize a commuting Hermitian family.
///
/// Eigendecomposes a random real combination Σ c_i A_i (c_i seeded from the
/// configuration); when a degenerate combination leaves some member
/// non-diagonal, recurses inside each eigenvalue cluster with a fresh
/// combination. Up to five fresh attempts before giving up.
pub fn simultaneous_diagonalize(
    family: &[HermitianMatrix],
    cfg: &Config,
) -> Result<SpectrumTable> {
    check_same_dim(family)?;
    let k = family.len();

    if k == 1 {
        // Single matrix: plain eigendecomposition, descending order.
        let eig = eig_hermitian(&family[0])?;
        return finish_table(family, eig.basis, cfg);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_residual = f64::INFINITY;
    for _attempt in 0..5 {
        let basis = cluster_basis(family, &mut rng, 0)?;
        match table_residual(family, &basis) {
            r if r <= residual_bound(family, cfg) => return finish_table(family, basis, cfg),
            r => worst_residual = worst_residual.min(r),
        }
    }
    Err(Error::NoConvergence {
        op: "simultaneous_diagonalize",
        iterations: 5,
        residual: worst_residual,
    })
}

fn residual_bound(family: &[HermitianMatrix], cfg: &Config) -> f64 {
    let scale = family
        .iter()
        .map(|h| h.max_norm())
        .fold(0.0f64, f64::max);
    cfg.diag_tol * (1.0 + scale)
}

/// Worst off-diagonal entry of U^* A_i U over the family, absolute.
fn table_residual(family: &[HermitianMatrix], u: &ComplexMatrix) -> f64 {
    let ua = u.adjoint();
    family
        .iter()
        .map(|h| ua.mul(h.matrix()).mul(u).offdiag_max())
        .fold(0.0f64, f64::max)
}

const CLUSTER_DEPTH_CAP: usize = 6;

fn cluster_basis(
    family: &[HermitianMatrix],
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Result<ComplexMatrix> {
    let n = family[0].dim();
    if n <= 1 || depth > CLUSTER_DEPTH_CAP {
        return Ok(ComplexMatrix::identity(n));
    }

    let mut combo = ComplexMatrix::zeros(n, n);
    for h in family {
        let c: f64 = rng.gen_range(-1.0..1.0);
        combo = combo.add(&h.matrix().scale_re(c));
    }
    let (combo_h, _) = HermitianMatrix::symmetrize(combo);
    let eig = eig_hermitian(&combo_h)?;
    let mut basis = eig.basis;

    // If the generic combination already separates everything we are done.
    let scale = family.iter().map(|h| h.max_norm()).fold(0.0f64, f64::max);
    if table_residual(family, &basis) <= 1e-10 * (1.0 + scale) {
        return Ok(basis);
    }

    // Refine inside each eigenvalue cluster of the combination.
    let cluster_gap = 1e-7 * (1.0 + eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.values[end - 1] - eig.values[end]).abs() <= cluster_gap {
            end += 1;
        }
        let d = end - start;
        if d > 1 {
            let w = ComplexMatrix::from_fn(n, d, |i, j| basis[(i, start + j)]);
            let wa = w.adjoint();
            let sub_family: Vec<HermitianMatrix> = family
                .iter()
                .map(|h| HermitianMatrix::symmetrize(wa.mul(h.matrix()).mul(&w)).0)
                .collect();
            let next_depth = if d == n { depth + 2 } else { depth + 1 };
            let u_sub = cluster_basis(&sub_family, rng, next_depth)?;
            let refined = w.mul(&u_sub);
            for j in 0..d {
                for i in 0..n {
                    basis[(i, start + j)] = refined[(i, j)];
                }
            }
        }
        start = end;
    }
    Ok(basis)
}

fn finish_table(
    family: &[HermitianMatrix],
    basis: ComplexMatrix,
    cfg: &Config,
) -> Result<SpectrumTable> {
    let n = family[0].dim();
    let k = family.len();
    let bound = residual_bound(family, cfg);
    let ua = basis.adjoint();
    let mut table = Vec::with_capacity(k);
    let mut worst = 0.0f64;
    for h in family {
        let m = ua.mul(h.matrix()).mul(&basis);
        worst = worst.max(m.offdiag_max());
        table.push((0..n).map(|j| m[(j, j)].re).collect());
    }
    if worst > bound {
        return Err(Error::NoConvergence {
            op: "simultaneous_diagonalize",
            iterations: 1,
            residual: worst,
        });
    }
    Ok(SpectrumTable {
        k,
        n,
        diagonalizer: basis,
        table,
    })
}

/// Pinching average (1/n) Σ_{j=1..n} (P^j)^* C P^j with P = diag(1, w, …, w^{n−1}),
/// w = e^{i2π/n}. Equals the diagonal part of C; computed by the literal sum
/// so the averaged form itself is what gets tested.
pub fn pinch_average(c: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !c.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "pinch_average needs a square matrix, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let n = c.rows();
    if n == 0 {
        return Ok(c.clone());
    }
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / (n as f64));
    let mut acc = ComplexMatrix::zeros(n, n);
    for j in 1..=n {
        // (P^j)^* C P^j entrywise: entry (a,b) picks up w^{j(b−a)}.
        let pj: Vec<C64> = (0..n)
            .map(|i| w.powu((i * j) as u32 % n as u32))
            .collect();
        let term = ComplexMatrix::from_fn(n, n, |a, b| pj[a].conj() * c[(a, b)] * pj[b]);
        acc = acc.add(&term);
    }
    Ok(acc.scale_re(1.0 / n as f64))
}
