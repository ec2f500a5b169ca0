//! Independent verification: channel application, Choi matrices and their
//! Kraus extraction, unital/TP/CP property reports, interpolation residuals,
//! and numerical-range support functions.

use num_complex::Complex64;

use crate::config::Config;
use crate::construct::KrausMap;
use crate::error::{Error, Result};
use crate::linalg::eig_hermitian;
use crate::matrix::{ComplexMatrix, HermitianMatrix};

/// Choi matrix Σ_pq E_pq ⊗ Φ(E_pq), system index first: row index p·m + i.
/// The transpose convention would silently break the Kraus round trip, so
/// the ordering is fixed here once.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub n: usize,
    pub m: usize,
    pub entries: ComplexMatrix,
}

/// Property report: booleans thresholded at the configured relative
/// tolerance, with the raw residuals always alongside.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub is_unital: bool,
    pub unital_residual: f64,
    pub is_tp: bool,
    pub tp_residual: f64,
    pub interpolation_residuals: Vec<f64>,
    pub kraus_rank: usize,
}

/// Φ(X) = Σ F_j^* X F_j by direct operator-sum evaluation.
pub fn apply_map(k: &KrausMap, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = k.input_dim();
    if x.rows() != n || x.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "input is {}x{}, map expects {}x{}",
            x.rows(),
            x.cols(),
            n,
            n
        )));
    }
    let mut out = ComplexMatrix::zeros(k.output_dim(), k.output_dim());
    for f in k.operators() {
        out = out.add(&f.adjoint().mul(x).mul(f));
    }
    Ok(out)
}

/// Same map through the stacked dilation form F^* (I_r ⊗ X) F with F the
/// vertical stack of the operators. Used as an independent evaluation route.
pub fn apply_stacked(k: &KrausMap, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, m, r) = (k.input_dim(), k.output_dim(), k.rank());
    if x.rows() != n || x.cols() != n {
        return Err(Error::DimensionMismatch("stacked form: input shape mismatch".into()));
    }
    let stack = ComplexMatrix::from_fn(r * n, m, |i, j| k.operators()[i / n][(i % n, j)]);
    let big = ComplexMatrix::identity(r).kron(x);
    Ok(stack.adjoint().mul(&big).mul(&stack))
}

/// Same map through the row-stacked partial-trace form: with
/// F̃ = [F_1 … F_r], Φ(X) is the sum of the m×m diagonal blocks of F̃^* X F̃.
pub fn apply_block_trace(k: &KrausMap, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, m, r) = (k.input_dim(), k.output_dim(), k.rank());
    if x.rows() != n || x.cols() != n {
        return Err(Error::DimensionMismatch("block form: input shape mismatch".into()));
    }
    let wide = ComplexMatrix::from_fn(n, r * m, |i, j| k.operators()[j / m][(i, j % m)]);
    let big = wide.adjoint().mul(x).mul(&wide);
    let mut out = ComplexMatrix::zeros(m, m);
    for block in 0..r {
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] += big[(block * m + i, block * m + j)];
            }
        }
    }
    Ok(out)
}

/// Build the Choi matrix of a Kraus map. PSD by construction; the eigenvalue
/// check lives in [`check_properties`].
pub fn choi_matrix(k: &KrausMap) -> ChoiMatrix {
    let (n, m) = (k.input_dim(), k.output_dim());
    let mut entries = ComplexMatrix::zeros(n * m, n * m);
    for f in k.operators() {
        // Block (p,q) of E_pq ⊗ Φ(E_pq) is conj(row_p)^t · row_q.
        for p in 0..n {
            for q in 0..n {
                for i in 0..m {
                    let left = f[(p, i)].conj();
                    if left.norm_sqr() == 0.0 {
                        continue;
                    }
                    for l in 0..m {
                        entries[(p * m + i, q * m + l)] += left * f[(q, l)];
                    }
                }
            }
        }
    }
    ChoiMatrix { n, m, entries }
}

/// Extract a Kraus representation from a PSD Choi matrix; the operator count
/// equals the numerical rank.
pub fn kraus_from_choi(c: &ChoiMatrix) -> Result<KrausMap> {
    let (n, m) = (c.n, c.m);
    let scale = 1.0 + c.entries.max_norm();
    let (herm, _) = HermitianMatrix::symmetrize(c.entries.clone());
    let eig = eig_hermitian(&herm)?;
    if let Some(&min) = eig.values.last() {
        if min < -1e-6 * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not a Choi matrix of a CP map: eigenvalue {min:.3e}"
            )));
        }
    }
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > 1e-9 * scale)
        .collect();
    let mut operators: Vec<ComplexMatrix> = keep
        .iter()
        .map(|&idx| {
            let root = eig.values[idx].sqrt();
            ComplexMatrix::from_fn(n, m, |p, i| (eig.basis[(p * m + i, idx)] * root).conj())
        })
        .collect();
    if operators.is_empty() {
        operators.push(ComplexMatrix::zeros(n, m));
    }
    KrausMap::new(n, m, operators)
}

/// Evaluate unital/TP/CP properties and per-pair interpolation residuals.
/// Reports rather than judges: property failures do not error.
pub fn check_properties(
    k: &KrausMap,
    pairs: &[(HermitianMatrix, HermitianMatrix)],
    cfg: &Config,
) -> Result<VerificationReport> {
    let (n, m) = (k.input_dim(), k.output_dim());
    let unital_gram = k.unital_gram();
    let unital_residual = unital_gram.max_diff(&ComplexMatrix::identity(m));
    let tp_gram = k.tp_gram();
    let tp_residual = tp_gram.max_diff(&ComplexMatrix::identity(n));

    let choi = choi_matrix(k);
    let choi_scale = 1.0 + choi.entries.max_norm();
    let eig = eig_hermitian(&HermitianMatrix::symmetrize(choi.entries).0)?;
    let min_choi = eig.values.last().cloned().unwrap_or(0.0);

    let mut interpolation_residuals = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        if a.dim() != n || b.dim() != m {
            return Err(Error::DimensionMismatch(format!(
                "pair is {}->{} but the map is {}->{}",
                a.dim(),
                b.dim(),
                n,
                m
            )));
        }
        let got = apply_map(k, a.matrix())?;
        interpolation_residuals.push(got.max_diff(b.matrix()));
    }

    let tol = cfg.property_tol;
    Ok(VerificationReport {
        is_cp: min_choi >= -tol * choi_scale,
        min_choi_eigenvalue: min_choi,
        is_unital: unital_residual <= tol * (1.0 + unital_gram.max_norm()),
        unital_residual,
        is_tp: tp_residual <= tol * (1.0 + tp_gram.max_norm()),
        tp_residual,
        interpolation_residuals,
        kraus_rank: k.rank(),
    })
}

/// Support function of the numerical range: for each angle θ the largest
/// eigenvalue of the Hermitian part of e^{−iθ}T.
pub fn numrange_support(t: &ComplexMatrix, angles: &[f64]) -> Result<Vec<f64>> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "numerical range needs a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let mut out = Vec::with_capacity(angles.len());
    for &theta in angles {
        let rotated = t.scale(Complex64::from_polar(1.0, -theta));
        let herm = HermitianMatrix::symmetrize(rotated.hermitian_part()).0;
        let eig = eig_hermitian(&herm)?;
        out.push(eig.values.first().cloned().unwrap_or(0.0));
    }
    Ok(out)
}

/// Uniform angle grid on [0, 2π).
pub fn angle_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / count as f64)
        .collect()
}

/// Per-angle margins h_A(θ) − h_B(θ); containment of W(B) in W(A) holds up
/// to grid resolution when all margins exceed −tol.
pub fn numrange_margins(b: &ComplexMatrix, a: &ComplexMatrix, grid: usize) -> Result<Vec<f64>> {
    let angles = angle_grid(grid.max(4));
    let ha = numrange_support(a, &angles)?;
    let hb = numrange_support(b, &angles)?;
    Ok(ha.iter().zip(hb.iter()).map(|(x, y)| x - y).collect())
}

/// Numerical-range containment test W(B) ⊆ W(A) on a support-function grid.
pub fn numrange_contained(
    b: &ComplexMatrix,
    a: &ComplexMatrix,
    grid: usize,
    tol: f64,
) -> Result<bool> {
    let margins = numrange_margins(b, a, grid)?;
    Ok(margins.iter().all(|&m| m >= -tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;
    use crate::random::{random_complex, random_kraus, seeded_rng};

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn identity_channel_applies() {
        let k = KrausMap::identity(3);
        let x = random_complex(&mut seeded_rng(31), 3, 3, 1.0);
        assert!(apply_map(&k, &x).unwrap().max_diff(&x) < 1e-15);
    }

    #[test]
    fn pinching_channel_takes_diagonal() {
        let k = KrausMap::pinching(3);
        let x = random_complex(&mut seeded_rng(32), 3, 3, 1.0);
        let got = apply_map(&k, &x).unwrap();
        let want = ComplexMatrix::diag_complex(&x.diagonal());
        assert!(got.max_diff(&want) < 1e-14);
    }

    #[test]
    fn three_evaluation_routes_agree() {
        let mut rng = seeded_rng(33);
        let k = random_kraus(&mut rng, 3, 4, 3);
        let x = random_complex(&mut rng, 3, 3, 1.0);
        let direct = apply_map(&k, &x).unwrap();
        let stacked = apply_stacked(&k, &x).unwrap();
        let blocked = apply_block_trace(&k, &x).unwrap();
        assert!(direct.max_diff(&stacked) < 1e-10);
        assert!(direct.max_diff(&blocked) < 1e-10);
    }

    #[test]
    fn hermitian_in_hermitian_out() {
        let mut rng = seeded_rng(34);
        let k = random_kraus(&mut rng, 4, 3, 2);
        let h = crate::random::random_hermitian(&mut rng, 4);
        let out = apply_map(&k, h.matrix()).unwrap();
        assert!(out.max_diff(&out.adjoint()) < 1e-12);
    }

    #[test]
    fn choi_of_identity_is_rank_one() {
        let k = KrausMap::identity(2);
        let c = choi_matrix(&k);
        assert!((c.entries.trace().re - 2.0).abs() < 1e-12);
        let eig = eig_hermitian(&HermitianMatrix::symmetrize(c.entries.clone()).0).unwrap();
        assert!((eig.values[0] - 2.0).abs() < 1e-12);
        for &v in &eig.values[1..] {
            assert!(v.abs() < 1e-12);
        }
        // Explicit layout: C[(p*m+i, q*m+l)] = δ_pi δ_ql.
        assert!((c.entries[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((c.entries[(0, 3)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn choi_of_pinching_is_diagonal_rank_two() {
        let k = KrausMap::pinching(2);
        let c = choi_matrix(&k);
        let want = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 1.0]);
        assert!(c.entries.max_diff(&want) < 1e-14);
        let back = kraus_from_choi(&c).unwrap();
        assert_eq!(back.rank(), 2);
    }

    #[test]
    fn choi_kraus_round_trip() {
        let mut rng = seeded_rng(35);
        for (n, m, r) in [(2usize, 2usize, 2usize), (3, 4, 2), (4, 3, 5)] {
            let k = random_kraus(&mut rng, n, m, r);
            let c = choi_matrix(&k);
            let back = kraus_from_choi(&c).unwrap();
            let c2 = choi_matrix(&back);
            assert!(
                c.entries.max_diff(&c2.entries) < 1e-8 * (1.0 + c.entries.max_norm()),
                "round trip failed for {n}x{m} rank {r}"
            );
        }
    }

    #[test]
    fn kraus_from_choi_rejects_negative() {
        let c = ChoiMatrix {
            n: 1,
            m: 2,
            entries: ComplexMatrix::diag_real(&[1.0, -0.5]),
        };
        assert!(kraus_from_choi(&c).is_err());
    }

    #[test]
    fn properties_of_identity() {
        let k = KrausMap::identity(2);
        let h = crate::random::random_hermitian(&mut seeded_rng(36), 2);
        let report = check_properties(&k, &[(h.clone(), h)], &cfg()).unwrap();
        assert!(report.is_cp && report.is_unital && report.is_tp);
        assert!(report.interpolation_residuals[0] < 1e-12);
        assert_eq!(report.kraus_rank, 1);
    }

    #[test]
    fn properties_shape_mismatch_errors() {
        let k = KrausMap::identity(2);
        let a = HermitianMatrix::from_real_diag(&[1.0, 2.0, 3.0]);
        let b = HermitianMatrix::from_real_diag(&[1.0, 2.0]);
        assert!(check_properties(&k, &[(a, b)], &cfg()).is_err());
    }

    #[test]
    fn support_function_of_identity_and_segment() {
        // W(I) = {1}: the support in direction θ is Re(e^{−iθ}) = cos θ.
        let id = ComplexMatrix::identity(2);
        let angles = angle_grid(8);
        let s = numrange_support(&id, &angles).unwrap();
        for (v, theta) in s.iter().zip(angles.iter()) {
            assert!((v - theta.cos()).abs() < 1e-12);
        }
        let seg = ComplexMatrix::diag_real(&[0.0, 2.0]);
        let s = numrange_support(&seg, &[0.0, std::f64::consts::PI]).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
    }

    #[test]
    fn containment_basic_cases() {
        let a = ComplexMatrix::diag_real(&[0.0, 2.0]);
        assert!(numrange_contained(&a, &a, 360, 1e-9).unwrap());
        let b = ComplexMatrix::diag_real(&[3.0]);
        assert!(!numrange_contained(&b, &a, 360, 1e-9).unwrap());
    }

    #[test]
    fn centroid_inside_roots_of_unity() {
        // Normal A with eigenvalues at the cube roots of unity, B = centroid.
        let roots: Vec<C64> = (0..3)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
            .collect();
        let a = ComplexMatrix::diag_complex(&roots);
        let b = ComplexMatrix::diag_complex(&[C64::new(0.0, 0.0)]);
        assert!(numrange_contained(&b, &a, 720, 1e-9).unwrap());
    }
}
