//! Isomorphism deciders for evaluation modules and their induced
//! extensions, and the Whittaker-vector solver.

use serde_json::{json, Value};
use std::sync::Arc;

use crate::error::AnalysisError;
use crate::lie::rep::GenLabel;
use crate::lie::Weight;
use crate::linalg::{nullspace, RationalMatrix, Subspace};
use crate::modules::eval::TensorSpace;
use crate::modules::{EtaHom, EvaluationModule, ModuleDescriptor, TruncatedInducedModule};
use crate::poly::Poly;
use crate::rational::{q_to_string, Q};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    /// Structurally impossible regardless of parameters.
    NeverIsomorphic,
}

impl IsoVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            IsoVerdict::Isomorphic => "isomorphic",
            IsoVerdict::NotIsomorphic => "not-isomorphic",
            IsoVerdict::NeverIsomorphic => "never-isomorphic",
        }
    }
}

/// Decision for a pair of evaluation modules, with either a verified
/// intertwiner or explicit non-isomorphism certificates.
#[derive(Clone, Debug)]
pub struct EvaluationIsoResult {
    pub verdict: IsoVerdict,
    pub intertwiner: Option<RationalMatrix>,
    pub certificates: Vec<String>,
}

impl EvaluationIsoResult {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "evaluation_iso",
            "verdict": self.verdict.as_str(),
            "has_intertwiner": self.intertwiner.is_some(),
            "certificates": self.certificates,
        })
    }
}

/// Normalized multiset data: the nonzero-weight factors with their points
/// and original positions, sorted deterministically.
fn normalized_pairs(e: &EvaluationModule) -> Vec<(Q, Weight, usize)> {
    let mut out: Vec<(Q, Weight, usize)> = e
        .lambdas
        .iter()
        .zip(e.points.points())
        .enumerate()
        .filter(|(_, (l, _))| !l.is_zero())
        .map(|(pos, (l, a))| (a.clone(), l.clone(), pos))
        .collect();
    out.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    out
}

/// The annihilator polynomial of the normalized data.
fn annihilator_poly(e: &EvaluationModule) -> Poly {
    let roots: Vec<Q> = normalized_pairs(e).iter().map(|(a, _, _)| a.clone()).collect();
    Poly::from_roots(&roots)
}

/// Decides `E(lambda, a) ~ E(lambda', a')`.
///
/// Zero-weight entries are dropped first; the modules are isomorphic
/// exactly when the remaining multisets of (weight, point) pairs agree. A
/// positive answer produces the factor-permutation intertwiner, verified
/// on all common window generators; a negative answer carries dimension,
/// annihilator, or weight-spectrum mismatch certificates.
pub fn evaluation_iso(
    e1: &EvaluationModule,
    e2: &EvaluationModule,
) -> Result<EvaluationIsoResult, AnalysisError> {
    if !e1.rep.algebra.same_algebra(&e2.rep.algebra) {
        return Err(AnalysisError::InputError("different algebras".into()));
    }
    let p1 = normalized_pairs(e1);
    let p2 = normalized_pairs(e2);
    let key1: Vec<(Q, Weight)> = p1.iter().map(|(a, l, _)| (a.clone(), l.clone())).collect();
    let key2: Vec<(Q, Weight)> = p2.iter().map(|(a, l, _)| (a.clone(), l.clone())).collect();

    if key1 == key2 {
        let t = permutation_intertwiner(e1, &p1, e2, &p2)?;
        // Verify the intertwining identity on all common generators.
        let window = e1.window.min(e2.window);
        for (label, a1) in e1.rep.actions() {
            let within = match label {
                GenLabel::Loop { power, .. } => power.abs() <= window,
                _ => true,
            };
            if !within {
                continue;
            }
            let Some(a2) = e2.rep.action(label) else { continue };
            let lhs = t
                .matmul(a1)
                .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?;
            let rhs = a2
                .matmul(&t)
                .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?;
            if lhs != rhs {
                return Err(AnalysisError::CheckFailed(format!(
                    "permutation intertwiner fails on {label}"
                )));
            }
        }
        return Ok(EvaluationIsoResult {
            verdict: IsoVerdict::Isomorphic,
            intertwiner: Some(t),
            certificates: vec!["multiset of (weight, point) pairs agrees".into()],
        });
    }

    // Certify the negative answer.
    let mut certificates = Vec::new();
    let d1: usize = p1.iter().map(|(_, _, pos)| e1.factor_dims[*pos]).product();
    let d2: usize = p2.iter().map(|(_, _, pos)| e2.factor_dims[*pos]).product();
    if d1 != d2 {
        certificates.push(format!("dimension mismatch: {d1} vs {d2}"));
    }
    let f1 = annihilator_poly(e1);
    let f2 = annihilator_poly(e2);
    if f1 != f2 {
        certificates.push(format!("annihilator mismatch: {f1} vs {f2}"));
    }
    if certificates.is_empty() {
        if weight_spectra_differ(e1, e2)? {
            certificates.push("joint Cartan loop spectra differ".into());
        } else {
            certificates.push("multiset of (weight, point) pairs differs".into());
        }
    }
    Ok(EvaluationIsoResult {
        verdict: IsoVerdict::NotIsomorphic,
        intertwiner: None,
        certificates,
    })
}

/// Builds the permutation matrix matching the sorted nonzero factors of
/// `e1` to those of `e2`, skipping trivial factors on both sides.
fn permutation_intertwiner(
    e1: &EvaluationModule,
    p1: &[(Q, Weight, usize)],
    e2: &EvaluationModule,
    p2: &[(Q, Weight, usize)],
) -> Result<RationalMatrix, AnalysisError> {
    let space1 = TensorSpace::new(e1.factor_dims.clone());
    let space2 = TensorSpace::new(e2.factor_dims.clone());
    if space1.total != space2.total {
        return Err(AnalysisError::DimensionMismatch(format!(
            "{} vs {}",
            space1.total, space2.total
        )));
    }
    let mut t = RationalMatrix::zero(space2.total, space1.total);
    for idx in 0..space1.total {
        let comps = space1.components(idx);
        // Trivial factors are one-dimensional, so their components are 0;
        // the k-th nonzero slot of e2 receives the k-th nonzero slot of e1.
        let mut target = vec![0usize; e2.factor_dims.len()];
        for (slot1, slot2) in p1.iter().zip(p2) {
            target[slot2.2] = comps[slot1.2];
        }
        // Row-major index in e2.
        let mut out = 0usize;
        for (i, d) in e2.factor_dims.iter().enumerate() {
            out = out * d + target[i];
        }
        t.set(out, idx, num::One::one());
    }
    Ok(t)
}

/// Compares the multisets of joint diagonal spectra of `h_i (x) t^k` over
/// the common window.
fn weight_spectra_differ(
    e1: &EvaluationModule,
    e2: &EvaluationModule,
) -> Result<bool, AnalysisError> {
    if e1.dim() != e2.dim() {
        return Ok(true);
    }
    let window = e1.window.min(e2.window);
    let collect = |e: &EvaluationModule| -> Vec<Vec<Q>> {
        let mut sigs: Vec<Vec<Q>> = (0..e.dim()).map(|_| Vec::new()).collect();
        for i in 0..e.rep.algebra.rank {
            for k in 0..=window {
                let label = GenLabel::loop_gen(e.rep.algebra.cartan_index(i), k);
                if let Some(a) = e.rep.action(&label) {
                    for (sig, s) in sigs.iter_mut().enumerate() {
                        s.push(a.get(sig, sig));
                    }
                }
            }
        }
        sigs.sort();
        sigs
    };
    Ok(collect(e1) != collect(e2))
}

/// Decision for a pair of `d`-extensions of evaluation-tensor modules.
#[derive(Clone, Debug)]
pub struct DExtensionIsoResult {
    pub verdict: IsoVerdict,
    pub reason: String,
    pub evaluation: Option<EvaluationIsoResult>,
    /// Set when the Whittaker comparison is only truncation-level (the
    /// nondegenerate uniqueness question is open).
    pub truncation_caveat: bool,
}

impl DExtensionIsoResult {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "d_extension_iso",
            "verdict": self.verdict.as_str(),
            "reason": self.reason,
            "evaluation": self.evaluation.as_ref().map(EvaluationIsoResult::to_json),
            "truncation_caveat": self.truncation_caveat,
        })
    }
}

enum InducedFactor<'a> {
    HighestWeight(&'a crate::modules::AffineWeight),
    Whittaker(&'a EtaHom),
}

fn split_d_extension(
    m: &TruncatedInducedModule,
) -> Result<(&ModuleDescriptor, InducedFactor<'_>, usize), AnalysisError> {
    let ModuleDescriptor::DExtension { base, depth } = &m.descriptor else {
        return Err(AnalysisError::InputError(
            "input is not a d-extension".into(),
        ));
    };
    let ModuleDescriptor::Tensor { left, right } = base.as_ref() else {
        return Err(AnalysisError::InputError(
            "d-extension base is not an evaluation tensor".into(),
        ));
    };
    let ModuleDescriptor::Evaluation { .. } = left.as_ref() else {
        return Err(AnalysisError::InputError(
            "tensor left factor is not an evaluation module".into(),
        ));
    };
    let factor = match right.as_ref() {
        ModuleDescriptor::HighestWeight { gamma, .. } => InducedFactor::HighestWeight(gamma),
        ModuleDescriptor::Whittaker { eta, .. } => InducedFactor::Whittaker(eta),
        _ => {
            return Err(AnalysisError::InputError(
                "tensor right factor is neither highest-weight nor Whittaker".into(),
            ))
        }
    };
    Ok((left.as_ref(), factor, *depth))
}

fn rebuild_evaluation(desc: &ModuleDescriptor, alg: &Arc<crate::lie::LieAlgebraData>) -> Result<EvaluationModule, AnalysisError> {
    let ModuleDescriptor::Evaluation { lambdas, points } = desc else {
        return Err(AnalysisError::InputError("not an evaluation descriptor".into()));
    };
    let pc = crate::affine::PointConfiguration::new(points.clone())
        .map_err(|e| AnalysisError::InputError(e.to_string()))?;
    crate::modules::build_evaluation_module(Arc::clone(alg), lambdas, &pc, None)
        .map_err(|e| AnalysisError::InputError(e.to_string()))
}

/// Decides isomorphism of two `d`-extensions of evaluation-tensor modules
/// by reducing along the construction: a `d`-extension iso forces a base
/// iso; highest-weight and Whittaker factors can never be isomorphic;
/// matching families compare the evaluation factors and the induction data
/// (exact weight equality, or character equality with a truncation caveat
/// in the nondegenerate Whittaker regime).
pub fn d_extension_iso(
    m1: &TruncatedInducedModule,
    m2: &TruncatedInducedModule,
) -> Result<DExtensionIsoResult, AnalysisError> {
    let (e1_desc, f1, depth1) = split_d_extension(m1)?;
    let (e2_desc, f2, depth2) = split_d_extension(m2)?;
    if depth1 != depth2 {
        return Err(AnalysisError::InputError(format!(
            "mixed truncation depths {depth1} vs {depth2}"
        )));
    }
    match (&f1, &f2) {
        (InducedFactor::HighestWeight(_), InducedFactor::Whittaker(_))
        | (InducedFactor::Whittaker(_), InducedFactor::HighestWeight(_)) => {
            return Ok(DExtensionIsoResult {
                verdict: IsoVerdict::NeverIsomorphic,
                reason: "a highest-weight factor can never match a Whittaker factor".into(),
                evaluation: None,
                truncation_caveat: false,
            });
        }
        _ => {}
    }
    let ev1 = rebuild_evaluation(e1_desc, &m1.algebra)?;
    let ev2 = rebuild_evaluation(e2_desc, &m2.algebra)?;
    let ev = evaluation_iso(&ev1, &ev2)?;
    if ev.verdict != IsoVerdict::Isomorphic {
        return Ok(DExtensionIsoResult {
            verdict: IsoVerdict::NotIsomorphic,
            reason: "evaluation factors are not isomorphic".into(),
            evaluation: Some(ev),
            truncation_caveat: false,
        });
    }
    match (f1, f2) {
        (InducedFactor::HighestWeight(g1), InducedFactor::HighestWeight(g2)) => {
            if g1 == g2 {
                Ok(DExtensionIsoResult {
                    verdict: IsoVerdict::Isomorphic,
                    reason: "evaluation factors isomorphic and highest weights equal".into(),
                    evaluation: Some(ev),
                    truncation_caveat: false,
                })
            } else {
                Ok(DExtensionIsoResult {
                    verdict: IsoVerdict::NotIsomorphic,
                    reason: "highest weights differ".into(),
                    evaluation: Some(ev),
                    truncation_caveat: false,
                })
            }
        }
        (InducedFactor::Whittaker(n1), InducedFactor::Whittaker(n2)) => {
            let caveat = n1.is_nondegenerate() || n2.is_nondegenerate();
            if n1 == n2 {
                Ok(DExtensionIsoResult {
                    verdict: IsoVerdict::Isomorphic,
                    reason: "evaluation factors isomorphic and Whittaker characters equal".into(),
                    evaluation: Some(ev),
                    truncation_caveat: caveat,
                })
            } else {
                Ok(DExtensionIsoResult {
                    verdict: IsoVerdict::NotIsomorphic,
                    reason: "Whittaker characters differ".into(),
                    evaluation: Some(ev),
                    truncation_caveat: caveat,
                })
            }
        }
        _ => unreachable!("mixed factors handled above"),
    }
}

/// Solution space of `x v = eta(x) v` over the Chevalley generators of the
/// positive part. This suffices: the positive part is generated by these
/// elements and both sides are multiplicative over brackets.
pub fn whittaker_vectors(
    w: &TruncatedInducedModule,
    eta: &EtaHom,
) -> Result<Subspace, AnalysisError> {
    let alg = &w.algebra;
    let mut gens: Vec<(GenLabel, Q)> = Vec::new();
    for (j, &root) in alg.simple_root_indices().iter().enumerate() {
        gens.push((
            GenLabel::loop_gen(alg.e_index(root), 0),
            eta.simple_values[j].clone(),
        ));
    }
    gens.push((
        GenLabel::loop_gen(alg.f_index(alg.theta), 1),
        eta.affine_value.clone(),
    ));
    let mut stacked = RationalMatrix::zero(w.dim * gens.len(), w.dim);
    for (block, (label, value)) in gens.iter().enumerate() {
        let action = w.action(label).ok_or_else(|| {
            AnalysisError::InputError(format!("module misses Chevalley generator {label}"))
        })?;
        if !action.is_total() {
            return Err(AnalysisError::PartialInput);
        }
        let shifted = action
            .matrix
            .sub(&RationalMatrix::identity(w.dim).scale(value))
            .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?;
        for (r, c, v) in shifted.entries() {
            stacked.set(block * w.dim + r, c, v.clone());
        }
    }
    let mut out = Subspace::zero(w.dim);
    for v in nullspace(&stacked) {
        out.insert(v);
    }
    Ok(out)
}

/// Formats a rational for report text.
pub fn q_str(x: &Q) -> String {
    q_to_string(x)
}
