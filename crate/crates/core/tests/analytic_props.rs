//! The closed-form single-matrix criteria against the LP, the majorization
//! shift equivalence, and planted classification.

use cpinterp_core::analytic::{
    classify, cp_single_feasible, majorizes, tp_single_feasible, unital_single_feasible,
    Feasibility, MapClass, SingleSpectrumPair,
};
use cpinterp_core::feasibility::{
    solve_transfer, FeasibilityOutcome, FeasibilitySystem, StochasticClass,
};
use cpinterp_core::linalg::SpectrumTable;
use cpinterp_core::matrix::ComplexMatrix;
use cpinterp_core::Config;
use rand::Rng;

fn grid_spectrum(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-4..=4) as f64 / 2.0).collect()
}

fn lp_feasible(a: &[f64], b: &[f64], class: StochasticClass, cfg: &Config) -> bool {
    let sys = FeasibilitySystem::new(vec![a.to_vec()], vec![b.to_vec()], class).unwrap();
    match solve_transfer(&sys, cfg).unwrap() {
        FeasibilityOutcome::Feasible(_) => true,
        FeasibilityOutcome::Infeasible { .. } => false,
        FeasibilityOutcome::Marginal { objective } => {
            panic!("marginal on grid data (objective {objective:.3e})")
        }
    }
}

#[test]
fn gamma_bounds_match_lp_nonnegative() {
    let mut rng = cpinterp_core::random::seeded_rng(201);
    let cfg = Config::default();
    for _ in 0..250 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let (a, b) = (grid_spectrum(&mut rng, n), grid_spectrum(&mut rng, m));
        let pair = SingleSpectrumPair::new(a.clone(), b.clone()).unwrap();
        let analytic = cp_single_feasible(&pair).is_some();
        let lp = lp_feasible(&a, &b, StochasticClass::Nonnegative, &cfg);
        assert_eq!(analytic, lp, "a={a:?} b={b:?}");
    }
}

#[test]
fn spectral_range_matches_lp_column_stochastic() {
    let mut rng = cpinterp_core::random::seeded_rng(202);
    let cfg = Config::default();
    for _ in 0..250 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let (a, b) = (grid_spectrum(&mut rng, n), grid_spectrum(&mut rng, m));
        let pair = SingleSpectrumPair::new(a.clone(), b.clone()).unwrap();
        let analytic = unital_single_feasible(&pair);
        let lp = lp_feasible(&a, &b, StochasticClass::ColumnStochastic, &cfg);
        assert_eq!(analytic, lp, "a={a:?} b={b:?}");
    }
}

#[test]
fn trace_abs_sum_matches_lp_row_stochastic() {
    let mut rng = cpinterp_core::random::seeded_rng(203);
    let cfg = Config::default();
    for _ in 0..250 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let (a, b) = (grid_spectrum(&mut rng, n), grid_spectrum(&mut rng, m));
        let pair = SingleSpectrumPair::new(a.clone(), b.clone()).unwrap();
        let analytic = tp_single_feasible(&pair);
        let lp = lp_feasible(&a, &b, StochasticClass::RowStochastic, &cfg);
        assert_eq!(analytic, lp, "a={a:?} b={b:?}");
    }
}

#[test]
fn majorization_matches_lp_doubly_stochastic() {
    let mut rng = cpinterp_core::random::seeded_rng(204);
    let cfg = Config::default();
    for case in 0..250 {
        let n = rng.gen_range(1..=5);
        let a = grid_spectrum(&mut rng, n);
        // Half the cases share the total (interesting), half are free.
        let b = if case % 2 == 0 {
            let mut b = grid_spectrum(&mut rng, n);
            let diff: f64 = a.iter().sum::<f64>() - b.iter().sum::<f64>();
            b[0] += diff; // stays on the half-integer grid
            b
        } else {
            grid_spectrum(&mut rng, n)
        };
        let pair = SingleSpectrumPair::new(a.clone(), b.clone()).unwrap();
        let analytic = majorizes(&pair).unwrap();
        let lp = lp_feasible(&a, &b, StochasticClass::DoublyStochastic, &cfg);
        assert_eq!(analytic, lp, "a={a:?} b={b:?}");
    }
}

/// Majorization holds iff the shifted trace-preserving criterion holds at
/// every shift; a failing partial sum at index k yields an explicit witness
/// shift between the adjacent sorted a values.
#[test]
fn shift_equivalence_with_tp_criterion() {
    let mut rng = cpinterp_core::random::seeded_rng(205);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let a = grid_spectrum(&mut rng, n);
        let b = {
            let mut b = grid_spectrum(&mut rng, n);
            let diff: f64 = a.iter().sum::<f64>() - b.iter().sum::<f64>();
            b[0] += diff;
            b
        };
        let pair = SingleSpectrumPair::new(a.clone(), b.clone()).unwrap();
        let major = majorizes(&pair).unwrap();

        let lo = a.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        let hi = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let shifts: Vec<f64> = (0..50).map(|i| lo + (hi - lo) * i as f64 / 49.0).collect();
        let tp_at = |t: f64| {
            let sa: Vec<f64> = pair.a().iter().map(|v| v - t).collect();
            let sb: Vec<f64> = pair.b().iter().map(|v| v - t).collect();
            tp_single_feasible(&SingleSpectrumPair::new(sa, sb).unwrap())
        };

        if major {
            for &t in &shifts {
                assert!(tp_at(t), "majorization holds but TP fails at shift {t}");
            }
        } else {
            // Locate the first violated partial sum on the sorted spectra.
            let (sa, sb) = (pair.a(), pair.b());
            let mut k_fail = None;
            let (mut pa, mut pb) = (0.0, 0.0);
            for k in 0..n - 1 {
                pa += sa[k];
                pb += sb[k];
                if pb > pa + 1e-12 {
                    k_fail = Some(k);
                    break;
                }
            }
            let k = k_fail.expect("failed majorization has a violated partial sum");
            let witness = (sa[k] + sa[k + 1]) / 2.0;
            assert!(
                !tp_at(witness),
                "shift {witness} between a_{k} and a_{} must break TP",
                k + 1
            );
            assert!(
                shifts.iter().any(|&t| !tp_at(t)),
                "no grid shift witnesses the failure for a={a:?} b={b:?}"
            );
        }
    }
}

fn table_from_rows(rows: Vec<Vec<f64>>) -> SpectrumTable {
    let n = rows[0].len();
    SpectrumTable {
        k: rows.len(),
        n,
        diagonalizer: ComplexMatrix::identity(n),
        table: rows,
    }
}

#[test]
fn planted_tables_classify_feasible() {
    let mut rng = cpinterp_core::random::seeded_rng(206);
    let cfg = Config::default();
    let class_of = |sc: StochasticClass| match sc {
        StochasticClass::Nonnegative => MapClass::Cp,
        StochasticClass::ColumnStochastic => MapClass::Unital,
        StochasticClass::RowStochastic => MapClass::Tp,
        StochasticClass::DoublyStochastic => MapClass::Utp,
    };
    for sc in StochasticClass::ALL {
        for _ in 0..15 {
            let k = rng.gen_range(1..=3);
            let n = rng.gen_range(2..=5);
            let m = if sc == StochasticClass::DoublyStochastic {
                n
            } else {
                rng.gen_range(2..=5)
            };
            let d = cpinterp_core::random::random_stochastic(&mut rng, n, m, sc);
            let a_rows: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let b_rows: Vec<Vec<f64>> = a_rows.iter().map(|r| d.apply_left(r)).collect();
            let report = classify(&table_from_rows(a_rows), &table_from_rows(b_rows), &cfg)
                .expect("classification succeeds");
            let verdict = report.verdict(class_of(sc));
            assert_eq!(
                verdict.feasibility,
                Feasibility::Feasible,
                "planted {} instance not recognized",
                verdict.class.label()
            );
            let witness = verdict.witness.as_ref().expect("feasible carries witness");
            assert_eq!(witness.class(), sc);
        }
    }
}

#[test]
fn classify_witnesses_reproduce_tables() {
    let mut rng = cpinterp_core::random::seeded_rng(207);
    let cfg = Config::default();
    for _ in 0..40 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let a = grid_spectrum(&mut rng, n);
        let b = grid_spectrum(&mut rng, m);
        let report = classify(
            &table_from_rows(vec![a.clone()]),
            &table_from_rows(vec![b.clone()]),
            &cfg,
        )
        .unwrap();
        for v in &report.verdicts {
            if let Some(d) = &v.witness {
                let got = d.apply_left(&a);
                for (g, w) in got.iter().zip(b.iter()) {
                    assert!(
                        (g - w).abs() < 1e-8,
                        "class {} witness misses: {got:?} vs {b:?}",
                        v.class.label()
                    );
                }
                assert_eq!(d.class(), v.class.stochastic_class());
            }
        }
    }
}
