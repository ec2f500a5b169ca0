//! Operator-sum identities, duality, Choi round trips, Birkhoff and
//! Schur–Horn constructions, and planted end-to-end synthesis pipelines.

use cpinterp_core::construct::{dual_map, unital_extension, KrausMap};
use cpinterp_core::feasibility::StochasticClass;
use cpinterp_core::matrix::{C64, ComplexMatrix, HermitianMatrix};
use cpinterp_core::pipeline::{synthesize_map, SynthesisClass, SynthesizedMap};
use cpinterp_core::random::{
    random_complex, random_hermitian, random_kraus, random_stochastic, random_tp_kraus,
    random_unital_kraus, random_unitary, seeded_rng,
};
use cpinterp_core::verify::{apply_map, apply_stacked, check_properties, choi_matrix, kraus_from_choi};
use cpinterp_core::{eig_hermitian, Config};
use rand::Rng;

#[test]
fn unital_and_tp_grams_follow_the_transfer_class() {
    let mut rng = seeded_rng(301);
    let cfg = Config::default();
    for _ in 0..20 {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(2..=5);
        let u = random_unitary(&mut rng, n);
        let v = random_unitary(&mut rng, m);

        let d = random_stochastic(&mut rng, n, m, StochasticClass::ColumnStochastic);
        let k = cpinterp_core::kraus_from_transfer(&d, &u, &v, cfg.unitary_tol).unwrap();
        assert!(k.unital_gram().max_diff(&ComplexMatrix::identity(m)) < 1e-9);

        let d = random_stochastic(&mut rng, n, m, StochasticClass::RowStochastic);
        let k = cpinterp_core::kraus_from_transfer(&d, &u, &v, cfg.unitary_tol).unwrap();
        assert!(k.tp_gram().max_diff(&ComplexMatrix::identity(n)) < 1e-9);

        let d = random_stochastic(&mut rng, n, n, StochasticClass::DoublyStochastic);
        let un = random_unitary(&mut rng, n);
        let k = cpinterp_core::kraus_from_transfer(&d, &u, &un, cfg.unitary_tol).unwrap();
        assert!(k.unital_gram().max_diff(&ComplexMatrix::identity(n)) < 1e-9);
        assert!(k.tp_gram().max_diff(&ComplexMatrix::identity(n)) < 1e-9);
    }
}

#[test]
fn stacked_form_matches_direct_evaluation() {
    let mut rng = seeded_rng(302);
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let r = rng.gen_range(1..=4);
        let k = random_kraus(&mut rng, n, m, r);
        let x = random_complex(&mut rng, n, n, 1.0);
        let direct = apply_map(&k, &x).unwrap();
        let stacked = apply_stacked(&k, &x).unwrap();
        assert!(direct.max_diff(&stacked) < 1e-9);
    }
}

/// Conjugation covariance: replacing F_j by U F_j V turns Φ(X) into
/// V^* Φ(U^* X U) V.
#[test]
fn conjugation_covariance() {
    let mut rng = seeded_rng(303);
    for _ in 0..15 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(2..=4);
        let k = random_kraus(&mut rng, n, m, 3);
        let u = random_unitary(&mut rng, n);
        let v = random_unitary(&mut rng, m);
        let conjugated = KrausMap::new(
            n,
            m,
            k.operators().iter().map(|f| u.mul(f).mul(&v)).collect(),
        )
        .unwrap();
        let x = random_complex(&mut rng, n, n, 1.0);
        let lhs = apply_map(&conjugated, &x).unwrap();
        let inner = apply_map(&k, &u.adjoint().mul(&x).mul(&u)).unwrap();
        let rhs = v.adjoint().mul(&inner).mul(&v);
        assert!(lhs.max_diff(&rhs) < 1e-9);
    }
}

/// <Φ(A), B> = <A, Φ*(B)> for the trace inner product, plus the property
/// swap between a map and its dual.
#[test]
fn dual_adjoint_identity_and_property_swap() {
    let mut rng = seeded_rng(304);
    let cfg = Config::default();
    for case in 0..50 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(2..=4);
        let r = rng.gen_range(1..=3);
        let k = match case % 3 {
            0 => random_kraus(&mut rng, n, m, r),
            1 => random_unital_kraus(&mut rng, n, m, r.max((m + n - 1) / n)),
            _ => random_tp_kraus(&mut rng, n, m, r.max((n + m - 1) / m)),
        };
        let dual = dual_map(&k);
        for _ in 0..20 {
            let a = random_complex(&mut rng, n, n, 1.0);
            let b = random_complex(&mut rng, m, m, 1.0);
            let lhs = apply_map(&k, &a).unwrap().inner(&b);
            let rhs = a.inner(&apply_map(&dual, &b).unwrap());
            assert!((lhs - rhs).norm() < 1e-9, "adjoint identity violated");
        }
        let report = check_properties(&k, &[], &cfg).unwrap();
        let dual_report = check_properties(&dual, &[], &cfg).unwrap();
        assert_eq!(report.is_unital, dual_report.is_tp);
        assert_eq!(report.is_tp, dual_report.is_unital);
        assert!((report.unital_residual - dual_report.tp_residual).abs() < 1e-12);
        assert!((report.tp_residual - dual_report.unital_residual).abs() < 1e-12);
    }
}

#[test]
fn choi_round_trip_random_maps() {
    let mut rng = seeded_rng(305);
    for _ in 0..15 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=6);
        let r = rng.gen_range(1..=4);
        let k = random_kraus(&mut rng, n, m, r);
        let c = choi_matrix(&k);
        let back = kraus_from_choi(&c).unwrap();
        let c2 = choi_matrix(&back);
        let scale = 1.0 + c.entries.max_norm();
        assert!(c.entries.max_diff(&c2.entries) < 1e-8 * scale);
        // Verified rank is the numerical rank of the Choi matrix.
        assert!(back.rank() <= n * m);
    }
}

#[test]
fn choi_matrices_of_kraus_maps_are_psd() {
    let mut rng = seeded_rng(306);
    let cfg = Config::default();
    for _ in 0..10 {
        let k = random_kraus(&mut rng, 4, 3, 3);
        let report = check_properties(&k, &[], &cfg).unwrap();
        assert!(report.is_cp);
        assert!(report.min_choi_eigenvalue > -1e-9);
    }
}

#[test]
fn unital_extension_random_maps() {
    let mut rng = seeded_rng(307);
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(2..=4);
        let r = rng.gen_range(1..=3);
        let k = random_kraus(&mut rng, n, m, r);
        let phi_i = k.unital_gram();
        let lambda_max = eig_hermitian(&HermitianMatrix::symmetrize(phi_i).0).unwrap().values[0];
        let gamma = lambda_max + 1.0;
        let ext = unital_extension(&k, gamma).unwrap();
        assert!(ext.unital_gram().max_diff(&ComplexMatrix::identity(m)) < 1e-9);
        for _ in 0..5 {
            let x = random_complex(&mut rng, n, n, 1.0);
            let embedded = x.direct_sum(&ComplexMatrix::zeros(1, 1));
            let got = apply_map(&ext, &embedded).unwrap();
            let want = apply_map(&k, &x).unwrap().scale_re(1.0 / gamma);
            assert!(got.max_diff(&want) < 1e-8);
        }
    }
}

fn conjugated_family(
    rng: &mut rand_chacha::ChaCha8Rng,
    basis: &ComplexMatrix,
    rows: &[Vec<f64>],
) -> Vec<HermitianMatrix> {
    let _ = rng;
    rows.iter()
        .map(|r| {
            HermitianMatrix::symmetrize(
                basis
                    .mul(&ComplexMatrix::diag_real(r))
                    .mul(&basis.adjoint()),
            )
            .0
        })
        .collect()
}

/// Plant a transfer matrix of each class behind random unitaries and check
/// that synthesis returns a verified map of that class.
#[test]
fn planted_synthesis_per_class() {
    let mut rng = seeded_rng(308);
    let cfg = Config::default();
    let cases = [
        (StochasticClass::Nonnegative, SynthesisClass::Cp),
        (StochasticClass::ColumnStochastic, SynthesisClass::Unital),
        (StochasticClass::RowStochastic, SynthesisClass::Tp),
        (StochasticClass::DoublyStochastic, SynthesisClass::Utp),
        (StochasticClass::DoublyStochastic, SynthesisClass::MixedUnitary),
    ];
    for (sc, synth) in cases {
        for _ in 0..8 {
            let k = rng.gen_range(1..=3);
            let n = rng.gen_range(2..=5);
            let m = if sc == StochasticClass::DoublyStochastic {
                n
            } else {
                rng.gen_range(2..=5)
            };
            let d = random_stochastic(&mut rng, n, m, sc);
            let a_rows: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let b_rows: Vec<Vec<f64>> = a_rows.iter().map(|r| d.apply_left(r)).collect();
            let ua = random_unitary(&mut rng, n);
            let ub = random_unitary(&mut rng, m);
            let fam_a = conjugated_family(&mut rng, &ua, &a_rows);
            let fam_b = conjugated_family(&mut rng, &ub, &b_rows);

            let s = synthesize_map(&fam_a, &fam_b, synth, &cfg)
                .unwrap_or_else(|e| panic!("planted {:?}/{:?} failed: {e}", sc, synth));
            for (i, residual) in s.verification.interpolation_residuals.iter().enumerate() {
                assert!(residual <= &1e-8, "pair {i} residual {residual:.3e}");
            }
            match synth {
                SynthesisClass::Unital => assert!(s.verification.is_unital),
                SynthesisClass::Tp => assert!(s.verification.is_tp),
                SynthesisClass::Utp | SynthesisClass::MixedUnitary => {
                    assert!(s.verification.is_unital && s.verification.is_tp)
                }
                _ => {}
            }
            assert!(s.verification.is_cp);
            if synth == SynthesisClass::MixedUnitary {
                let dec = s.decomposition.as_ref().expect("birkhoff terms present");
                assert!(dec.len() <= (n - 1) * (n - 1) + 1);
                match &s.map {
                    SynthesizedMap::MixedUnitary(mu) => {
                        let total: f64 = mu.weights().iter().sum();
                        assert!((total - 1.0).abs() < 1e-10);
                    }
                    _ => panic!("mixed-unitary synthesis must return unitaries"),
                }
            }
        }
    }
}

/// Equal-weight construction on random majorizing pairs, via the full
/// Hermitian pipeline (B = average of n unitary conjugates of A).
#[test]
fn equal_weight_random_majorizing_pairs() {
    let mut rng = seeded_rng(309);
    let cfg = Config::default();
    for _ in 0..15 {
        let n = rng.gen_range(2..=8);
        let a_spec: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ds = random_stochastic(&mut rng, n, n, StochasticClass::DoublyStochastic);
        let b_spec = ds.apply_left(&a_spec);
        let ua = random_unitary(&mut rng, n);
        let ub = random_unitary(&mut rng, n);
        let a = conjugated_family(&mut rng, &ua, &[a_spec]).remove(0);
        let b = conjugated_family(&mut rng, &ub, &[b_spec]).remove(0);

        let s = synthesize_map(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            SynthesisClass::EqualWeight,
            &cfg,
        )
        .unwrap();
        let mu = match &s.map {
            SynthesizedMap::MixedUnitary(mu) => mu,
            _ => panic!("equal-weight must be mixed unitary"),
        };
        assert_eq!(mu.len(), n);
        for w in mu.weights() {
            assert!((w - 1.0 / n as f64).abs() < 1e-15);
        }
        // Direct-sum oracle: residual of B − (1/n) Σ U_j^* A U_j.
        let mut acc = ComplexMatrix::zeros(n, n);
        for u in mu.unitaries() {
            acc = acc.add(&u.adjoint().mul(a.matrix()).mul(u));
        }
        acc = acc.scale_re(1.0 / n as f64);
        assert!(acc.max_diff(b.matrix()) <= 1e-8);
    }
}

/// The pinch-average oracle behind the equal-weight construction: averaging
/// W diag(a) W^* over the diagonal root-of-unity conjugations leaves exactly
/// diag(b) when W solves the Schur–Horn problem.
#[test]
fn equal_weight_matches_pinch_oracle() {
    let mut rng = seeded_rng(310);
    for _ in 0..10 {
        let n = rng.gen_range(2..=6);
        let a_spec: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ds = random_stochastic(&mut rng, n, n, StochasticClass::DoublyStochastic);
        let mut b_spec = ds.apply_left(&a_spec);
        b_spec.sort_by(|x, y| y.total_cmp(x));
        let mut a_sorted = a_spec.clone();
        a_sorted.sort_by(|x, y| y.total_cmp(x));
        let w = cpinterp_core::schur_horn_unitary(&a_sorted, &b_spec).unwrap();
        let conj = w.mul(&ComplexMatrix::diag_real(&a_sorted)).mul(&w.adjoint());
        let pinched = cpinterp_core::pinch_average(&conj).unwrap();
        let want = ComplexMatrix::diag_real(&b_spec);
        assert!(pinched.max_diff(&want) < 1e-9);
    }
}

#[test]
fn mixed_unitary_unreachable_when_no_doubly_stochastic_witness() {
    let cfg = Config::default();
    let a = [HermitianMatrix::from_real_diag(&[4.0, 1.0, 1.0, 0.0])];
    let b = [HermitianMatrix::from_real_diag(&[3.0, 3.0, 0.0, 0.0])];
    assert!(synthesize_map(&a, &b, SynthesisClass::MixedUnitary, &cfg).is_err());
}

#[test]
fn kraus_rank_and_operator_rank_bounds() {
    let mut rng = seeded_rng(311);
    let cfg = Config::default();
    for sc in StochasticClass::ALL {
        let n = 4;
        let m = if sc == StochasticClass::DoublyStochastic { 4 } else { 3 };
        let d = random_stochastic(&mut rng, n, m, sc);
        let u = random_unitary(&mut rng, n);
        let v = random_unitary(&mut rng, m);
        let k = cpinterp_core::kraus_from_transfer(&d, &u, &v, cfg.unitary_tol).unwrap();
        assert!(k.rank() <= n * m);
        match sc {
            StochasticClass::Nonnegative | StochasticClass::ColumnStochastic => {
                assert_eq!(k.rank(), m)
            }
            _ => {}
        }
        // Every operator is a rank-one column pattern conjugated by
        // unitaries, so its rank is at most min(n, m); check via Gram trace.
        for f in k.operators() {
            let gram = f.adjoint().mul(f);
            let eig = eig_hermitian(&HermitianMatrix::symmetrize(gram).0).unwrap();
            let numrank = eig.values.iter().filter(|&&v| v > 1e-10).count();
            assert!(numrank <= n.min(m));
        }
    }
}

#[test]
fn verification_reports_corrupted_maps() {
    let mut rng = seeded_rng(312);
    let cfg = Config::default();
    let h = random_hermitian(&mut rng, 3);
    let k = KrausMap::identity(3);
    let report = check_properties(&k, &[(h.clone(), h.clone())], &cfg).unwrap();
    assert!(report.interpolation_residuals[0] < 1e-12);
    // Scale one operator: residuals must become visible, no error thrown.
    let corrupted = KrausMap::new(
        3,
        3,
        k.operators().iter().map(|f| f.scale(C64::new(2.0, 0.0))).collect(),
    )
    .unwrap();
    let report = check_properties(&corrupted, &[(h.clone(), h)], &cfg).unwrap();
    assert!(report.interpolation_residuals[0] > 0.1);
    assert!(!report.is_unital && !report.is_tp);
}
