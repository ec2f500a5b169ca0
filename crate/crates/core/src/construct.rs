//! Synthesis of explicit maps: Kraus operators from a transfer matrix,
//! Birkhoff decompositions and mixed-unitary maps, the Schur–Horn unitary
//! with a prescribed diagonal, equal-weight n-unitary averages, dual maps,
//! and the unital extension to one extra dimension.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::feasibility::{StochasticClass, TransferMatrix};
use crate::linalg::eig_hermitian;
use crate::matrix::{C64, ComplexMatrix, HermitianMatrix};

/// Operator-sum representation Φ(A) = Σ F_j^* A F_j with F_j ∈ M_{n,m}.
#[derive(Debug, Clone)]
pub struct KrausMap {
    n: usize,
    m: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(n: usize, m: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidInput("a Kraus map needs at least one operator".into()));
        }
        for (j, op) in operators.iter().enumerate() {
            if op.rows() != n || op.cols() != m {
                return Err(Error::DimensionMismatch(format!(
                    "operator {} is {}x{}, expected {}x{}",
                    j,
                    op.rows(),
                    op.cols(),
                    n,
                    m
                )));
            }
        }
        Ok(KrausMap { n, m, operators })
    }

    /// The identity channel on M_n.
    pub fn identity(n: usize) -> Self {
        KrausMap {
            n,
            m: n,
            operators: vec![ComplexMatrix::identity(n)],
        }
    }

    /// The pinching channel (diagonal part) on M_n.
    pub fn pinching(n: usize) -> Self {
        KrausMap {
            n,
            m: n,
            operators: (0..n).map(|j| ComplexMatrix::unit(n, n, j, j)).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Number of operators in this representation.
    pub fn rank(&self) -> usize {
        self.operators.len()
    }

    /// Σ F_j^* F_j; equals I_m exactly when the map is unital.
    pub fn unital_gram(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.m, self.m);
        for f in &self.operators {
            s = s.add(&f.adjoint().mul(f));
        }
        s
    }

    /// Σ F_j F_j^*; equals I_n exactly when the map is trace preserving.
    pub fn tp_gram(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.n, self.n);
        for f in &self.operators {
            s = s.add(&f.mul(&f.adjoint()));
        }
        s
    }
}

/// Convex combination of permutation matrices reproducing a doubly
/// stochastic matrix. Permutations are stored as maps row → column.
#[derive(Debug, Clone)]
pub struct BirkhoffDecomposition {
    weights: Vec<f64>,
    permutations: Vec<Vec<usize>>,
}

impl BirkhoffDecomposition {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.permutations
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.permutations.first().map_or(0, |p| p.len())
    }

    /// Σ t_ℓ P_ℓ as a dense matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (w, p) in self.weights.iter().zip(&self.permutations) {
            for (i, &j) in p.iter().enumerate() {
                out[(i, j)] += C64::new(*w, 0.0);
            }
        }
        out
    }
}

/// Permutation matrix with P[i][sigma(i)] = 1.
pub fn permutation_matrix(sigma: &[usize]) -> ComplexMatrix {
    let n = sigma.len();
    let mut p = ComplexMatrix::zeros(n, n);
    for (i, &j) in sigma.iter().enumerate() {
        p[(i, j)] = C64::new(1.0, 0.0);
    }
    p
}

/// Weighted unitary conjugations Φ(X) = Σ t_j U_j^* X U_j.
#[derive(Debug, Clone)]
pub struct MixedUnitaryMap {
    weights: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
}

impl MixedUnitaryMap {
    pub fn new(weights: Vec<f64>, unitaries: Vec<ComplexMatrix>, unitary_tol: f64) -> Result<Self> {
        if weights.is_empty() || weights.len() != unitaries.len() {
            return Err(Error::InvalidInput(format!(
                "{} weights against {} unitaries",
                weights.len(),
                unitaries.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidInput("mixed-unitary weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "mixed-unitary weights sum to {total}, expected 1"
            )));
        }
        let n = unitaries[0].rows();
        for u in &unitaries {
            if u.rows() != n || u.cols() != n {
                return Err(Error::DimensionMismatch(
                    "mixed-unitary terms must share one square dimension".into(),
                ));
            }
            let residual = u.unitary_residual();
            if residual > unitary_tol * (1.0 + n as f64) {
                return Err(Error::NotUnitary {
                    residual,
                    tol: unitary_tol,
                });
            }
        }
        Ok(MixedUnitaryMap { weights, unitaries })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].rows()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Equivalent operator-sum form with F_j = √t_j · U_j.
    pub fn to_kraus(&self) -> KrausMap {
        let ops = self
            .weights
            .iter()
            .zip(&self.unitaries)
            .map(|(w, u)| u.scale_re(w.sqrt()))
            .collect();
        KrausMap::new(self.dim(), self.dim(), ops).expect("shapes agree by construction")
    }
}

/// Kraus operators realizing the diagonal-table interpolation encoded by a
/// transfer matrix, conjugated back to the original bases via Φ_j = U F_j V.
///
/// For nonnegative / column-stochastic D the operators are the m one-column
/// matrices with column j = (√d_1j, …, √d_nj)^t; that family is unital
/// exactly when D is column stochastic. Row- and doubly-stochastic D instead
/// use one rank-one operator √d_pq·E_pq per positive entry: the coherent
/// one-column family cannot preserve traces (off-diagonal inputs pick up
/// diagonal mass), while the entrywise family is trace preserving exactly
/// when D is row stochastic and unital exactly when it is column stochastic.
pub fn kraus_from_transfer(
    d: &TransferMatrix,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    unitary_tol: f64,
) -> Result<KrausMap> {
    let (n, m) = (d.n(), d.m());
    check_unitary(u, n, unitary_tol, "U")?;
    check_unitary(v, m, unitary_tol, "V")?;

    let raw: Vec<ComplexMatrix> = match d.class() {
        StochasticClass::Nonnegative | StochasticClass::ColumnStochastic => (0..m)
            .map(|j| {
                ComplexMatrix::from_fn(n, m, |p, q| {
                    if q == j {
                        C64::new(d.entry(p, j).sqrt(), 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            })
            .collect(),
        StochasticClass::RowStochastic | StochasticClass::DoublyStochastic => {
            let mut ops = Vec::new();
            for p in 0..n {
                for q in 0..m {
                    let w = d.entry(p, q);
                    if w > 0.0 {
                        let mut f = ComplexMatrix::zeros(n, m);
                        f[(p, q)] = C64::new(w.sqrt(), 0.0);
                        ops.push(f);
                    }
                }
            }
            if ops.is_empty() {
                ops.push(ComplexMatrix::zeros(n, m));
            }
            ops
        }
    };

    let operators = raw.into_iter().map(|f| u.mul(&f).mul(v)).collect();
    KrausMap::new(n, m, operators)
}

fn check_unitary(u: &ComplexMatrix, dim: usize, tol: f64, name: &str) -> Result<()> {
    if u.rows() != dim || u.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {}x{}",
            u.rows(),
            u.cols(),
            dim,
            dim
        )));
    }
    let residual = u.unitary_residual();
    if residual > tol * (1.0 + dim as f64) {
        return Err(Error::NotUnitary { residual, tol });
    }
    Ok(())
}

/// Greedy Birkhoff peeling: repeatedly match the positive support perfectly,
/// peel the minimum matched entry, and stop when the mass is exhausted. A
/// Carathéodory reduction afterwards enforces the (n−1)²+1 term bound.
pub fn birkhoff_decompose(d: &TransferMatrix, peel_tol: f64) -> Result<BirkhoffDecomposition> {
    let n = d.n();
    if d.m() != n {
        return Err(Error::DimensionMismatch(format!(
            "Birkhoff decomposition needs a square matrix, got {}x{}",
            n,
            d.m()
        )));
    }
    let sum_tol = crate::feasibility::SUM_TOL;
    for p in 0..n {
        let row: f64 = (0..n).map(|q| d.entry(p, q)).sum();
        let col: f64 = (0..n).map(|q| d.entry(q, p)).sum();
        if (row - 1.0).abs() > sum_tol || (col - 1.0).abs() > sum_tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not doubly stochastic: row {p} sums to {row}, column to {col}"
            )));
        }
    }

    let mut rem: Vec<f64> = d.entries().to_vec();
    let mut weights: Vec<f64> = Vec::new();
    let mut perms: Vec<Vec<usize>> = Vec::new();

    loop {
        let support: Vec<Vec<bool>> = (0..n)
            .map(|p| (0..n).map(|q| rem[p * n + q] > peel_tol).collect())
            .collect();
        if support.iter().flatten().all(|&s| !s) {
            break;
        }
        let Some(matching) = perfect_matching(&support) else {
            let leftover = rem.iter().cloned().fold(0.0f64, f64::max);
            if leftover <= 10.0 * sum_tol {
                break; // residue is input inaccuracy, not structure
            }
            return Err(Error::MatchingFailed(format!(
                "support lost Hall's condition with {leftover:.3e} mass left; \
                 the input is not doubly stochastic at working tolerance"
            )));
        };
        let t = matching
            .iter()
            .enumerate()
            .map(|(p, &q)| rem[p * n + q])
            .fold(f64::INFINITY, f64::min);
        for (p, &q) in matching.iter().enumerate() {
            rem[p * n + q] -= t;
            if rem[p * n + q] < peel_tol {
                rem[p * n + q] = 0.0;
            }
        }
        weights.push(t);
        perms.push(matching);
        if weights.len() > n * n {
            return Err(Error::MatchingFailed(
                "peeling failed to terminate; input is numerically inconsistent".into(),
            ));
        }
    }

    if weights.is_empty() {
        return Err(Error::InvalidInput("matrix peeled to nothing".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::MatchingFailed(format!(
            "peeled weights sum to {total}, expected 1"
        )));
    }
    for w in &mut weights {
        *w /= total;
    }

    caratheodory_reduce(&mut weights, &mut perms, n);

    Ok(BirkhoffDecomposition {
        weights,
        permutations: perms,
    })
}

/// Kuhn's augmenting-path bipartite matching; returns row → column or None
/// when no perfect matching exists on the support.
fn perfect_matching(support: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = support.len();
    let mut col_owner = vec![usize::MAX; n];

    fn try_assign(
        p: usize,
        support: &[Vec<bool>],
        seen: &mut [bool],
        col_owner: &mut [usize],
    ) -> bool {
        for q in 0..support.len() {
            if support[p][q] && !seen[q] {
                seen[q] = true;
                if col_owner[q] == usize::MAX
                    || try_assign(col_owner[q], support, seen, col_owner)
                {
                    col_owner[q] = p;
                    return true;
                }
            }
        }
        false
    }

    for p in 0..n {
        let mut seen = vec![false; n];
        if !try_assign(p, support, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut matching = vec![0usize; n];
    for q in 0..n {
        matching[col_owner[q]] = q;
    }
    Some(matching)
}

/// While more than (n−1)²+1 terms remain the permutations are affinely
/// dependent; walk along a dependence direction until a weight hits zero.
/// Reconstruction Σ t_ℓ P_ℓ is unchanged by each step.
fn caratheodory_reduce(weights: &mut Vec<f64>, perms: &mut Vec<Vec<usize>>, n: usize) {
    let bound = (n - 1) * (n - 1) + 1;
    while weights.len() > bound {
        let cols: Vec<Vec<f64>> = perms
            .iter()
            .map(|p| {
                let mut v = vec![0.0; n * n + 1];
                for (i, &j) in p.iter().enumerate() {
                    v[i * n + j] = 1.0;
                }
                v[n * n] = 1.0; // affine row
                v
            })
            .collect();
        let Some(mut lambda) = null_vector(&cols) else {
            break; // numerically defeated; keep the longer decomposition
        };
        let max_pos = lambda.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max_pos <= 0.0 {
            for l in &mut lambda {
                *l = -*l;
            }
        }
        let mut theta = f64::INFINITY;
        for (w, &l) in weights.iter().zip(lambda.iter()) {
            if l > 1e-13 {
                theta = theta.min(w / l);
            }
        }
        if !theta.is_finite() {
            break;
        }
        for (w, &l) in weights.iter_mut().zip(lambda.iter()) {
            *w -= theta * l;
        }
        let keep: Vec<bool> = weights.iter().map(|&w| w > 1e-12).collect();
        let mut kw = Vec::new();
        let mut kp = Vec::new();
        for (idx, k) in keep.iter().enumerate() {
            if *k {
                kw.push(weights[idx]);
                kp.push(perms[idx].clone());
            }
        }
        if kw.len() == weights.len() {
            break; // nothing dropped; avoid spinning
        }
        *weights = kw;
        *perms = kp;
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
}

/// Nonzero x with Σ x_ℓ · cols[ℓ] = 0, via Gauss-Jordan on the stacked
/// column vectors. None when the columns are independent.
fn null_vector(cols: &[Vec<f64>]) -> Option<Vec<f64>> {
    let l = cols.len();
    if l == 0 {
        return None;
    }
    let rows = cols[0].len();
    let mut mat: Vec<Vec<f64>> = (0..rows)
        .map(|r| (0..l).map(|c| cols[c][r]).collect())
        .collect();
    let mut pivot_of_col = vec![usize::MAX; l];
    let mut rank = 0usize;
    for c in 0..l {
        // Partial pivot in column c below current rank.
        let mut best = rank;
        let mut best_val = 0.0f64;
        for r in rank..rows {
            if mat[r][c].abs() > best_val {
                best_val = mat[r][c].abs();
                best = r;
            }
        }
        if best_val < 1e-9 {
            continue; // free column
        }
        mat.swap(rank, best);
        let piv = mat[rank][c];
        for v in mat[rank].iter_mut() {
            *v /= piv;
        }
        for r in 0..rows {
            if r != rank && mat[r][c] != 0.0 {
                let f = mat[r][c];
                for cc in 0..l {
                    let sub = f * mat[rank][cc];
                    mat[r][cc] -= sub;
                }
            }
        }
        pivot_of_col[c] = rank;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let free = (0..l).find(|&c| pivot_of_col[c] == usize::MAX)?;
    let mut x = vec![0.0; l];
    x[free] = 1.0;
    for c in 0..l {
        let r = pivot_of_col[c];
        if r != usize::MAX {
            x[c] = -mat[r][free];
        }
    }
    Some(x)
}

/// Mixed-unitary map Ψ(X) = Σ t_j (U P_j V)^* X (U P_j V) from a Birkhoff
/// decomposition of the transfer matrix.
pub fn mixed_unitary_from_decomposition(
    dec: &BirkhoffDecomposition,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    unitary_tol: f64,
) -> Result<MixedUnitaryMap> {
    let n = dec.dim();
    check_unitary(u, n, unitary_tol, "U")?;
    check_unitary(v, n, unitary_tol, "V")?;
    let unitaries: Vec<ComplexMatrix> = dec
        .permutations()
        .iter()
        .map(|p| u.mul(&permutation_matrix(p)).mul(v))
        .collect();
    MixedUnitaryMap::new(dec.weights().to_vec(), unitaries, unitary_tol)
}

/// Unitary (real orthogonal) W such that W·diag(a)·W^* has diagonal b, for
/// b ≺ a. Classic chain of plane rotations: each step mixes two adjacent
/// active values to pin one diagonal entry at the next b value, leaving a
/// one-shorter majorization problem.
pub fn schur_horn_unitary(a: &[f64], b: &[f64]) -> Result<ComplexMatrix> {
    let n = a.len();
    let pair = crate::analytic::SingleSpectrumPair::new(a.to_vec(), b.to_vec())?;
    if !crate::analytic::majorizes(&pair)? {
        return Err(Error::CriterionViolated(
            "b is not majorized by a; no such unitary exists".into(),
        ));
    }

    let pa = sort_perm_desc(a);
    let pb = sort_perm_desc(b);
    let a_sorted: Vec<f64> = pa.iter().map(|&i| a[i]).collect();
    let b_sorted: Vec<f64> = pb.iter().map(|&i| b[i]).collect();

    // Active coordinates of the sorted diagonal, values kept descending.
    let mut active: Vec<(usize, f64)> = a_sorted.iter().cloned().enumerate().collect();
    let mut w = ComplexMatrix::identity(n);
    let mut fixed_coord = vec![0usize; n];

    for (t, &target) in b_sorted.iter().enumerate().take(n - 1) {
        // First adjacent pair with v_k >= target >= v_{k+1}.
        let k = (0..active.len() - 1)
            .find(|&k| active[k + 1].1 <= target)
            .unwrap_or(active.len() - 2);
        let (ci, vi) = active[k];
        let (cj, vj) = active[k + 1];
        let span = vi - vj;
        let c2 = if span.abs() <= 1e-15 * (1.0 + vi.abs()) {
            1.0
        } else {
            ((target - vj) / span).clamp(0.0, 1.0)
        };
        let c = c2.sqrt();
        let s = (1.0 - c2).sqrt();
        // W <- G^T W, G the rotation in coordinates (ci, cj).
        for col in 0..n {
            let wi = w[(ci, col)];
            let wj = w[(cj, col)];
            w[(ci, col)] = wi * c - wj * s;
            w[(cj, col)] = wi * s + wj * c;
        }
        fixed_coord[t] = ci;
        active.remove(k);
        active[k] = (cj, vi + vj - target);
    }
    fixed_coord[n - 1] = active[0].0;

    // Route sorted coordinates to the input order of b, and the input order
    // of a into the sorted frame.
    let mut sigma_out = vec![0usize; n];
    for t in 0..n {
        sigma_out[pb[t]] = fixed_coord[t];
    }
    let p_out = permutation_matrix(&sigma_out);
    let p_a = permutation_matrix(&pa);
    Ok(p_out.mul(&w).mul(&p_a))
}

fn sort_perm_desc(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    idx
}

/// Equal-weight n-unitary average realizing B from A when the spectrum of B
/// is majorized by that of A (dimensions equal).
///
/// Diagonalize A = U diag(a) U^*, B = V diag(b) V^*, take the Schur–Horn W
/// for (a, b) and U_j = U W^* P^j V^* with P = diag(1, w, …, w^{n−1}): the
/// pinching identity collapses the average onto diag(b).
pub fn equal_weight_unitaries(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    unitary_tol: f64,
) -> Result<MixedUnitaryMap> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "equal-weight construction needs equal dimensions, got {} and {}",
            n,
            b.dim()
        )));
    }
    let eig_a = eig_hermitian(a)?;
    let eig_b = eig_hermitian(b)?;
    let pair = crate::analytic::SingleSpectrumPair::new(eig_a.values.clone(), eig_b.values.clone())?;
    if !crate::analytic::majorizes(&pair)? {
        return Err(Error::CriterionViolated(
            "spectrum of B is not majorized by spectrum of A".into(),
        ));
    }
    let w = schur_horn_unitary(&eig_a.values, &eig_b.values)?;
    let root = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    let u_whet = eig_a.basis.mul(&w.adjoint());
    let v_adj = eig_b.basis.adjoint();
    let unitaries: Vec<ComplexMatrix> = (1..=n)
        .map(|j| {
            let powers: Vec<C64> = (0..n).map(|i| root.powu(((i * j) % n) as u32)).collect();
            let pj = ComplexMatrix::diag_complex(&powers);
            u_whet.mul(&pj).mul(&v_adj)
        })
        .collect();
    MixedUnitaryMap::new(vec![1.0 / n as f64; n], unitaries, unitary_tol)
}

/// Dual map Φ*(B) = Σ F_j B F_j^*: same operator list, adjointed, with input
/// and output dimensions swapped. Unital and trace preserving trade places.
pub fn dual_map(k: &KrausMap) -> KrausMap {
    let operators = k.operators().iter().map(|f| f.adjoint()).collect();
    KrausMap::new(k.output_dim(), k.input_dim(), operators)
        .expect("adjoint operators have the swapped shape")
}

/// Unital extension: given Φ = Σ F_j^*·F_j on M_n and γ with γI − Φ(I_n)
/// positive semidefinite, build Ψ: M_{n+1} → M_m with Ψ(I) = I and
/// Ψ(X ⊕ [0]) = Φ(X)/γ. Operators are the stacked (F_j over g_j)/√γ with
/// the g rows from an eigendecomposition of γI − Φ(I_n).
pub fn unital_extension(k: &KrausMap, gamma: f64) -> Result<KrausMap> {
    if !(gamma > 0.0) {
        return Err(Error::CriterionViolated("gamma must be positive".into()));
    }
    let (n, m) = (k.input_dim(), k.output_dim());
    let p = k.unital_gram(); // Φ(I_n)
    let residue = ComplexMatrix::identity(m).scale_re(gamma).sub(&p);
    let (residue_h, _) = HermitianMatrix::symmetrize(residue);
    let eig = eig_hermitian(&residue_h)?;
    let scale = 1.0 + p.max_norm() + gamma.abs();
    if let Some(&min) = eig.values.last() {
        if min < -1e-9 * scale {
            let lambda_max = eig_hermitian(&HermitianMatrix::symmetrize(p.clone()).0)?
                .values
                .first()
                .cloned()
                .unwrap_or(0.0);
            return Err(Error::CriterionViolated(format!(
                "gamma = {gamma} is too small: gamma*I - Phi(I) has eigenvalue {min:.3e}; \
                 the minimal admissible gamma is lambda_max(Phi(I)) = {lambda_max:.6e}"
            )));
        }
    }

    // gamma*I - P = Σ g_j^* g_j over eigenpairs with positive eigenvalue.
    let g_rows: Vec<Vec<C64>> = (0..m)
        .filter(|&i| eig.values[i] > 1e-12 * scale)
        .map(|i| {
            let root = eig.values[i].sqrt();
            (0..m).map(|c| eig.basis[(c, i)].conj() * root).collect()
        })
        .collect();

    let r = k.rank();
    let s = g_rows.len();
    let count = r.max(s).max(1);
    let inv_root = 1.0 / gamma.sqrt();
    let operators: Vec<ComplexMatrix> = (0..count)
        .map(|j| {
            ComplexMatrix::from_fn(n + 1, m, |i, c| {
                let val = if i < n {
                    if j < r { k.operators()[j][(i, c)] } else { C64::new(0.0, 0.0) }
                } else if j < s {
                    g_rows[j][c]
                } else {
                    C64::new(0.0, 0.0)
                };
                val * inv_root
            })
        })
        .collect();
    KrausMap::new(n + 1, m, operators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::random::{
        random_doubly_stochastic, random_doubly_stochastic_dense, random_unitary, seeded_rng,
    };
    use crate::verify::apply_map;

    #[test]
    fn kraus_identity_transfer_is_pinching() {
        let d = TransferMatrix::identity(3, StochasticClass::Nonnegative);
        let id = ComplexMatrix::identity(3);
        let k = kraus_from_transfer(&d, &id, &id, 1e-10).unwrap();
        assert_eq!(k.rank(), 3);
        let x = ComplexMatrix::from_real(3, 3, &[1., 2., 3., 4., 5., 6., 7., 8., 9.]).unwrap();
        let got = apply_map(&k, &x).unwrap();
        let want = ComplexMatrix::diag_real(&[1., 5., 9.]);
        assert!(got.max_diff(&want) < 1e-12);
    }

    #[test]
    fn kraus_row_stochastic_is_trace_preserving() {
        // All rows (1/2, 1/2, 0, 0).
        let mut entries = vec![0.0; 16];
        for p in 0..4 {
            entries[p * 4] = 0.5;
            entries[p * 4 + 1] = 0.5;
        }
        let d = TransferMatrix::new(4, 4, entries, StochasticClass::RowStochastic).unwrap();
        let id = ComplexMatrix::identity(4);
        let k = kraus_from_transfer(&d, &id, &id, 1e-10).unwrap();
        let got = apply_map(&k, &ComplexMatrix::diag_real(&[4.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(got.max_diff(&ComplexMatrix::diag_real(&[3.0, 3.0, 0.0, 0.0])) < 1e-10);
        assert!(k.tp_gram().max_diff(&id) < 1e-9);
    }

    #[test]
    fn kraus_column_stochastic_is_unital() {
        let mut rng = seeded_rng(20);
        let d = crate::random::random_stochastic(&mut rng, 3, 4, StochasticClass::ColumnStochastic);
        let u = random_unitary(&mut rng, 3);
        let v = random_unitary(&mut rng, 4);
        let k = kraus_from_transfer(&d, &u, &v, 1e-10).unwrap();
        assert_eq!(k.rank(), 4);
        assert!(k.unital_gram().max_diff(&ComplexMatrix::identity(4)) < 1e-9);
    }

    #[test]
    fn kraus_rejects_non_unitary_conjugators() {
        let d = TransferMatrix::identity(2, StochasticClass::Nonnegative);
        let bad = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let id = ComplexMatrix::identity(2);
        assert!(matches!(
            kraus_from_transfer(&d, &bad, &id, 1e-10),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn birkhoff_single_permutation() {
        let sigma = vec![2usize, 0, 1];
        let p = permutation_matrix(&sigma);
        let entries: Vec<f64> = p.entries().iter().map(|z| z.re).collect();
        let d = TransferMatrix::new(3, 3, entries, StochasticClass::DoublyStochastic).unwrap();
        let dec = birkhoff_decompose(&d, 1e-12).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.weights()[0] - 1.0).abs() < 1e-12);
        assert_eq!(dec.permutations()[0], sigma);
    }

    #[test]
    fn birkhoff_uniform_2x2() {
        let d =
            TransferMatrix::new(2, 2, vec![0.5, 0.5, 0.5, 0.5], StochasticClass::DoublyStochastic)
                .unwrap();
        let dec = birkhoff_decompose(&d, 1e-12).unwrap();
        assert_eq!(dec.len(), 2);
        for w in dec.weights() {
            assert!((w - 0.5).abs() < 1e-12);
        }
        assert!(dec.reconstruct().max_diff(&d.as_complex()) < 1e-12);
    }

    #[test]
    fn birkhoff_random_combinations_reconstruct() {
        let mut rng = seeded_rng(21);
        for n in [2usize, 4, 8] {
            let d = random_doubly_stochastic(&mut rng, n, 5);
            let dec = birkhoff_decompose(&d, 1e-12).unwrap();
            assert!(dec.reconstruct().max_diff(&d.as_complex()) < 1e-9);
            assert!(dec.len() <= (n - 1) * (n - 1) + 1);
            let total: f64 = dec.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
            assert!(dec.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn birkhoff_dense_matrix_respects_term_bound() {
        let mut rng = seeded_rng(22);
        let n = 6;
        let d = random_doubly_stochastic_dense(&mut rng, n);
        let dec = birkhoff_decompose(&d, 1e-12).unwrap();
        assert!(
            dec.len() <= (n - 1) * (n - 1) + 1,
            "{} terms exceeds the Caratheodory bound",
            dec.len()
        );
        assert!(dec.reconstruct().max_diff(&d.as_complex()) < 1e-9);
    }

    #[test]
    fn birkhoff_rejects_non_doubly_stochastic() {
        let d = TransferMatrix::new(
            2,
            2,
            vec![0.9, 0.0, 0.0, 0.9],
            StochasticClass::Nonnegative,
        )
        .unwrap();
        assert!(birkhoff_decompose(&d, 1e-12).is_err());
    }

    #[test]
    fn schur_horn_identity_case() {
        let a = [3.0, 1.0, -2.0];
        let w = schur_horn_unitary(&a, &a).unwrap();
        let conj = w.mul(&ComplexMatrix::diag_real(&a)).mul(&w.adjoint());
        for (i, &ai) in a.iter().enumerate() {
            assert!((conj[(i, i)].re - ai).abs() < 1e-10);
        }
    }

    #[test]
    fn schur_horn_flat_target() {
        let a = [3.0, 0.0, 0.0];
        let b = [1.0, 1.0, 1.0];
        let w = schur_horn_unitary(&a, &b).unwrap();
        assert!(w.unitary_residual() < 1e-10);
        let conj = w.mul(&ComplexMatrix::diag_real(&a)).mul(&w.adjoint());
        for i in 0..3 {
            assert!((conj[(i, i)].re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn schur_horn_unsorted_inputs() {
        let a = [0.0, 3.0, -1.0];
        let b = [1.5, -0.5, 1.0]; // majorized by a, deliberately unsorted
        let w = schur_horn_unitary(&a, &b).unwrap();
        let conj = w.mul(&ComplexMatrix::diag_real(&a)).mul(&w.adjoint());
        for (i, &bi) in b.iter().enumerate() {
            assert!((conj[(i, i)].re - bi).abs() < 1e-8, "position {i}");
        }
    }

    #[test]
    fn schur_horn_rejects_non_majorized() {
        assert!(schur_horn_unitary(&[4.0, 1.0, 1.0, 0.0], &[3.0, 3.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn equal_weight_reaches_uniform_from_rank_one() {
        let a = HermitianMatrix::from_real_diag(&[3.0, 0.0, 0.0]);
        let b = HermitianMatrix::from_real_diag(&[1.0, 1.0, 1.0]);
        let map = equal_weight_unitaries(&a, &b, 1e-10).unwrap();
        assert_eq!(map.len(), 3);
        assert!(map.weights().iter().all(|&w| (w - 1.0 / 3.0).abs() < 1e-15));
        let mut acc = ComplexMatrix::zeros(3, 3);
        for (w, u) in map.weights().iter().zip(map.unitaries()) {
            acc = acc.add(&u.adjoint().mul(a.matrix()).mul(u).scale_re(*w));
        }
        assert!(acc.max_diff(b.matrix()) < 1e-10);
    }

    #[test]
    fn dual_of_pinching_is_itself() {
        let k = KrausMap::pinching(3);
        let dual = dual_map(&k);
        for (f, g) in k.operators().iter().zip(dual.operators()) {
            assert!(f.max_diff(g) < 1e-15);
        }
    }

    #[test]
    fn unital_extension_of_unital_map_is_trivial() {
        let k = KrausMap::pinching(3);
        let ext = unital_extension(&k, 1.0).unwrap();
        assert!(ext.unital_gram().max_diff(&ComplexMatrix::identity(3)) < 1e-9);
        let x = crate::random::random_complex(&mut seeded_rng(23), 3, 3, 1.0);
        let embedded = x.direct_sum(&ComplexMatrix::zeros(1, 1));
        let got = apply_map(&ext, &embedded).unwrap();
        let want = apply_map(&k, &x).unwrap();
        assert!(got.max_diff(&want) < 1e-9);
    }

    #[test]
    fn unital_extension_scales_by_gamma() {
        let k = KrausMap::pinching(2);
        let ext = unital_extension(&k, 2.0).unwrap();
        assert!(ext.unital_gram().max_diff(&ComplexMatrix::identity(2)) < 1e-9);
        let x = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let embedded = x.direct_sum(&ComplexMatrix::zeros(1, 1));
        let got = apply_map(&ext, &embedded).unwrap();
        let want = apply_map(&k, &x).unwrap().scale_re(0.5);
        assert!(got.max_diff(&want) < 1e-10);
    }

    #[test]
    fn unital_extension_rejects_small_gamma() {
        let k = KrausMap::identity(2); // Phi(I) = I, so gamma must be >= 1
        assert!(unital_extension(&k, 0.5).is_err());
    }

    #[test]
    fn mixed_unitary_validation() {
        let cfgt = Config::default().unitary_tol;
        let id = ComplexMatrix::identity(2);
        assert!(MixedUnitaryMap::new(vec![0.5, 0.5], vec![id.clone(), id.clone()], cfgt).is_ok());
        assert!(MixedUnitaryMap::new(vec![0.7, 0.5], vec![id.clone(), id.clone()], cfgt).is_err());
        assert!(MixedUnitaryMap::new(vec![1.0], vec![id.scale_re(2.0)], cfgt).is_err());
    }
}
