//! Seeded generators for matrices, channels and stochastic data.
//!
//! Everything takes an explicit ChaCha RNG so callers (tests, benches,
//! planted-instance experiments) stay reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::construct::KrausMap;
use crate::feasibility::{StochasticClass, TransferMatrix};
use crate::matrix::{C64, ComplexMatrix, HermitianMatrix};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix scaled by `scale`.
pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrize(random_complex(rng, n, n, 1.0)).0
}

/// Haar-ish random unitary: Gram-Schmidt on a Ginibre matrix with two
/// orthogonalization passes.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n, 1.0);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| g.col(j)).collect();
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: C64 = (0..n).map(|r| cols[i][r].conj() * cols[j][r]).sum();
                for r in 0..n {
                    let correction = proj * cols[i][r];
                    cols[j][r] -= correction;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "Ginibre column collapsed; try another seed");
        for r in 0..n {
            cols[j][r] /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Random transfer matrix of the requested stochastic class.
/// Doubly stochastic ones are convex combinations of `5` random permutations.
pub fn random_stochastic(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    class: StochasticClass,
) -> TransferMatrix {
    match class {
        StochasticClass::Nonnegative => {
            let entries: Vec<f64> = (0..n * m).map(|_| rng.gen_range(0.0..2.0)).collect();
            TransferMatrix::new(n, m, entries, class).expect("nonnegative matrix is always valid")
        }
        StochasticClass::ColumnStochastic => {
            let mut entries = vec![0.0; n * m];
            for q in 0..m {
                let col: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
                let s: f64 = col.iter().sum();
                for p in 0..n {
                    entries[p * m + q] = col[p] / s;
                }
            }
            TransferMatrix::new(n, m, entries, class).expect("normalized columns")
        }
        StochasticClass::RowStochastic => {
            let mut entries = vec![0.0; n * m];
            for p in 0..n {
                let row: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
                let s: f64 = row.iter().sum();
                for q in 0..m {
                    entries[p * m + q] = row[q] / s;
                }
            }
            TransferMatrix::new(n, m, entries, class).expect("normalized rows")
        }
        StochasticClass::DoublyStochastic => {
            assert_eq!(n, m, "doubly stochastic matrices are square");
            random_doubly_stochastic(rng, n, 5)
        }
    }
}

/// Convex combination of `terms` random permutation matrices.
pub fn random_doubly_stochastic(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> TransferMatrix {
    let terms = terms.max(1);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= s;
    }
    let mut entries = vec![0.0; n * n];
    for w in weights {
        let p = random_permutation(rng, n);
        for (i, &j) in p.iter().enumerate() {
            entries[i * n + j] += w;
        }
    }
    TransferMatrix::new(n, n, entries, StochasticClass::DoublyStochastic)
        .expect("convex combination of permutations")
}

/// Full-support doubly stochastic matrix via Sinkhorn normalization.
pub fn random_doubly_stochastic_dense(rng: &mut ChaCha8Rng, n: usize) -> TransferMatrix {
    let mut entries: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.2..1.2)).collect();
    for _ in 0..500 {
        for p in 0..n {
            let s: f64 = entries[p * n..(p + 1) * n].iter().sum();
            for q in 0..n {
                entries[p * n + q] /= s;
            }
        }
        let mut worst = 0.0f64;
        for q in 0..n {
            let s: f64 = (0..n).map(|p| entries[p * n + q]).sum();
            worst = worst.max((s - 1.0).abs());
            for p in 0..n {
                entries[p * n + q] /= s;
            }
        }
        if worst < 1e-14 {
            break;
        }
    }
    TransferMatrix::new(n, n, entries, StochasticClass::DoublyStochastic)
        .expect("Sinkhorn converged")
}

/// Plain random Kraus map (no unital/TP structure), operators scaled to keep
/// the channel roughly norm-1.
pub fn random_kraus(rng: &mut ChaCha8Rng, n: usize, m: usize, r: usize) -> KrausMap {
    let scale = 1.0 / ((r * n) as f64).sqrt();
    let ops = (0..r).map(|_| random_complex(rng, n, m, scale)).collect();
    KrausMap::new(n, m, ops).expect("shapes are consistent")
}

/// Random unital map: the vertical stack of operators is an isometry,
/// so ΣF_j^*F_j = I_m. Requires r·n ≥ m.
pub fn random_unital_kraus(rng: &mut ChaCha8Rng, n: usize, m: usize, r: usize) -> KrausMap {
    assert!(r * n >= m, "need r*n >= m for a unital map");
    let q = random_unitary(rng, r * n);
    let ops = (0..r)
        .map(|j| ComplexMatrix::from_fn(n, m, |i, l| q[(j * n + i, l)]))
        .collect();
    KrausMap::new(n, m, ops).expect("shapes are consistent")
}

/// Random trace-preserving map: the horizontal stack has orthonormal rows,
/// so ΣF_jF_j^* = I_n. Requires r·m ≥ n.
pub fn random_tp_kraus(rng: &mut ChaCha8Rng, n: usize, m: usize, r: usize) -> KrausMap {
    assert!(r * m >= n, "need r*m >= n for a trace preserving map");
    let q = random_unitary(rng, r * m);
    let ops = (0..r)
        .map(|j| ComplexMatrix::from_fn(n, m, |i, l| q[(i, j * m + l)]))
        .collect();
    KrausMap::new(n, m, ops).expect("shapes are consistent")
}
