//! End-to-end orchestration: validate commuting families, jointly
//! diagonalize, classify, and synthesize verified maps.

use crate::analytic::{classify, FeasibilityReport, Feasibility, MapClass};
use crate::config::Config;
use crate::construct::{
    birkhoff_decompose, equal_weight_unitaries, kraus_from_transfer,
    mixed_unitary_from_decomposition, BirkhoffDecomposition, KrausMap, MixedUnitaryMap,
};
use crate::error::{Error, Result};
use crate::feasibility::TransferMatrix;
use crate::linalg::{is_commuting_family, simultaneous_diagonalize, worst_commutator, SpectrumTable};
use crate::matrix::HermitianMatrix;
use crate::verify::{check_properties, VerificationReport};

/// What to synthesize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisClass {
    Cp,
    Unital,
    Tp,
    Utp,
    /// Birkhoff route: doubly stochastic D peeled into weighted permutations.
    MixedUnitary,
    /// Equal-weight average of n unitary conjugations (k = 1, n = m only).
    EqualWeight,
}

impl SynthesisClass {
    pub fn label(self) -> &'static str {
        match self {
            SynthesisClass::Cp => "cp",
            SynthesisClass::Unital => "unital",
            SynthesisClass::Tp => "tp",
            SynthesisClass::Utp => "utp",
            SynthesisClass::MixedUnitary => "mixed-unitary",
            SynthesisClass::EqualWeight => "equal-weight",
        }
    }

    fn map_class(self) -> Option<MapClass> {
        match self {
            SynthesisClass::Cp => Some(MapClass::Cp),
            SynthesisClass::Unital => Some(MapClass::Unital),
            SynthesisClass::Tp => Some(MapClass::Tp),
            SynthesisClass::Utp | SynthesisClass::MixedUnitary => Some(MapClass::Utp),
            SynthesisClass::EqualWeight => None,
        }
    }
}

/// A synthesized map in either representation.
#[derive(Debug, Clone)]
pub enum SynthesizedMap {
    Kraus(KrausMap),
    MixedUnitary(MixedUnitaryMap),
}

impl SynthesizedMap {
    /// Operator-sum view for verification.
    pub fn to_kraus(&self) -> KrausMap {
        match self {
            SynthesizedMap::Kraus(k) => k.clone(),
            SynthesizedMap::MixedUnitary(m) => m.to_kraus(),
        }
    }
}

/// Output of [`analyze_families`].
#[derive(Debug, Clone)]
pub struct Analysis {
    pub a_table: SpectrumTable,
    pub b_table: SpectrumTable,
    pub report: FeasibilityReport,
}

/// Output of [`synthesize_map`]: the map, the witnesses that produced it,
/// and an independent verification report.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub class: SynthesisClass,
    pub map: SynthesizedMap,
    pub witness: Option<TransferMatrix>,
    pub decomposition: Option<BirkhoffDecomposition>,
    pub verification: VerificationReport,
}

fn validate_families(
    a: &[HermitianMatrix],
    b: &[HermitianMatrix],
    cfg: &Config,
) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "family sizes differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("families must contain at least one matrix".into()));
    }
    for (family, name) in [(a, "A"), (b, "B")] {
        if !is_commuting_family(family, cfg.herm_tol)? {
            let (i, j, norm) = worst_commutator(family).expect("non-commuting pair exists");
            return Err(Error::NonCommuting { family: name, i, j, norm });
        }
    }
    Ok(())
}

/// Joint diagonalization plus the four-class feasibility report.
pub fn analyze_families(
    a: &[HermitianMatrix],
    b: &[HermitianMatrix],
    cfg: &Config,
) -> Result<Analysis> {
    validate_families(a, b, cfg)?;
    let a_table = simultaneous_diagonalize(a, cfg)?;
    let b_table = simultaneous_diagonalize(b, cfg)?;
    let report = classify(&a_table, &b_table, cfg)?;
    Ok(Analysis { a_table, b_table, report })
}

/// Synthesize a verified map of the requested class, or explain why none
/// exists. Every emitted map carries a fresh [`VerificationReport`].
pub fn synthesize_map(
    a: &[HermitianMatrix],
    b: &[HermitianMatrix],
    class: SynthesisClass,
    cfg: &Config,
) -> Result<Synthesis> {
    if class == SynthesisClass::EqualWeight {
        return synthesize_equal_weight(a, b, cfg);
    }
    let analysis = analyze_families(a, b, cfg)?;
    let map_class = class.map_class().expect("non-equal-weight classes map directly");
    let verdict = analysis.report.verdict(map_class);
    match verdict.feasibility {
        Feasibility::Feasible => {}
        Feasibility::Marginal => {
            return Err(Error::Marginal(format!(
                "class {} (phase-1 objective {:?}); rescale the input and retry",
                map_class.label(),
                verdict.phase1_objective
            )));
        }
        Feasibility::Infeasible => {
            return Err(Error::CriterionViolated(format!(
                "class {} is infeasible (criterion: {})",
                map_class.label(),
                verdict.criterion
            )));
        }
    }
    let witness = verdict
        .witness
        .clone()
        .ok_or_else(|| Error::Inconsistent("feasible verdict without witness".into()))?;

    let u = &analysis.a_table.diagonalizer;
    let v = analysis.b_table.diagonalizer.adjoint();

    let (map, decomposition) = if class == SynthesisClass::MixedUnitary {
        let dec = birkhoff_decompose(&witness, cfg.peel_tol)?;
        let map = mixed_unitary_from_decomposition(&dec, u, &v, cfg.unitary_tol)?;
        (SynthesizedMap::MixedUnitary(map), Some(dec))
    } else {
        let k = kraus_from_transfer(&witness, u, &v, cfg.unitary_tol)?;
        (SynthesizedMap::Kraus(k), None)
    };

    let pairs: Vec<(HermitianMatrix, HermitianMatrix)> =
        a.iter().cloned().zip(b.iter().cloned()).collect();
    let verification = check_properties(&map.to_kraus(), &pairs, cfg)?;
    Ok(Synthesis {
        class,
        map,
        witness: Some(witness),
        decomposition,
        verification,
    })
}

fn synthesize_equal_weight(
    a: &[HermitianMatrix],
    b: &[HermitianMatrix],
    cfg: &Config,
) -> Result<Synthesis> {
    if a.len() != 1 || b.len() != 1 {
        return Err(Error::Unsupported(format!(
            "equal-weight synthesis needs single matrices, got k = {}",
            a.len().max(b.len())
        )));
    }
    if a[0].dim() != b[0].dim() {
        return Err(Error::Unsupported(format!(
            "equal-weight synthesis needs equal dimensions, got {} and {}",
            a[0].dim(),
            b[0].dim()
        )));
    }
    let map = equal_weight_unitaries(&a[0], &b[0], cfg.unitary_tol)?;
    let pairs = vec![(a[0].clone(), b[0].clone())];
    let verification = check_properties(&map.to_kraus(), &pairs, cfg)?;
    Ok(Synthesis {
        class: SynthesisClass::EqualWeight,
        map: SynthesizedMap::MixedUnitary(map),
        witness: None,
        decomposition: None,
        verification,
    })
}
