//! Algorithmic verification layer: irreducibility certificates, spinning,
//! density elements, and the structural checks behind the tensor-submodule
//! and local-finiteness results.

pub mod closure;
pub mod iso;

pub use closure::{
    annihilator_in_quotient, classify_nplus_module, locally_finite_closure, Classification,
    ClosureResult, QuotientAnnihilator,
};
pub use iso::{
    d_extension_iso, evaluation_iso, whittaker_vectors, DExtensionIsoResult, EvaluationIsoResult,
    IsoVerdict,
};

use num::{One, Zero};
use serde_json::{json, Value};

use crate::error::AnalysisError;
use crate::lie::rep::{GenLabel, ModuleRep};
use crate::linalg::{spin, MatrixAlgebraBasis, RationalMatrix, Subspace};
use crate::modules::{EvaluationModule, PartialAction, TruncatedInducedModule};
use crate::rational::Q;

/// Ambient dimension up to which the Burnside criterion is used; beyond it
/// irreducibility falls back to spinning. Exact-rational algebra closure
/// grows quartically with the dimension, and 20 keeps runs in seconds.
pub const BURNSIDE_DIMENSION_LIMIT: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IrreducibilityMethod {
    Burnside,
    Spinning,
}

/// Verdict plus re-checkable witness data.
#[derive(Clone, Debug)]
pub struct IrreducibilityCertificate {
    pub irreducible: bool,
    pub method: IrreducibilityMethod,
    /// Dimension of the generated matrix algebra (Burnside method).
    pub algebra_dim: Option<usize>,
    /// A proper nonzero invariant subspace witnessing reducibility.
    pub witness: Option<Subspace>,
}

impl IrreducibilityCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "irreducible": self.irreducible,
            "method": match self.method {
                IrreducibilityMethod::Burnside => "burnside",
                IrreducibilityMethod::Spinning => "spinning",
            },
            "algebra_dim": self.algebra_dim,
            "witness": self.witness.as_ref().map(Subspace::to_json),
        })
    }
}

fn unit_vector(dim: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[i] = Q::one();
    v
}

/// Decides irreducibility of a finite-dimensional module with total action.
///
/// Below the dimension threshold the Burnside criterion decides: the module
/// is irreducible exactly when the generated unital matrix algebra has full
/// dimension `n^2`. Above it, spinning from every basis vector plus dual
/// spinning is used. Negative verdicts always carry an invariant subspace
/// that re-verifies under spin.
pub fn is_irreducible(m: &ModuleRep) -> Result<IrreducibilityCertificate, AnalysisError> {
    let n = m.dim;
    if n == 0 {
        return Err(AnalysisError::InputError("zero-dimensional module".into()));
    }
    let ops: Vec<&RationalMatrix> = m.actions().map(|(_, a)| a).collect();
    if n <= BURNSIDE_DIMENSION_LIMIT {
        let basis = MatrixAlgebraBasis::generate(&ops, n, None)
            .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?;
        let dim = basis.dim();
        if dim == n * n {
            return Ok(IrreducibilityCertificate {
                irreducible: true,
                method: IrreducibilityMethod::Burnside,
                algebra_dim: Some(dim),
                witness: None,
            });
        }
        let witness = find_invariant_subspace(&ops, n, Some(&basis))?;
        let witness = witness.ok_or_else(|| {
            AnalysisError::CheckFailed(
                "algebra dimension is deficient but no invariant subspace was found".into(),
            )
        })?;
        return Ok(IrreducibilityCertificate {
            irreducible: false,
            method: IrreducibilityMethod::Burnside,
            algebra_dim: Some(dim),
            witness: Some(witness),
        });
    }
    match find_invariant_subspace(&ops, n, None)? {
        Some(witness) => Ok(IrreducibilityCertificate {
            irreducible: false,
            method: IrreducibilityMethod::Spinning,
            algebra_dim: None,
            witness: Some(witness),
        }),
        None => Ok(IrreducibilityCertificate {
            irreducible: true,
            method: IrreducibilityMethod::Spinning,
            algebra_dim: None,
            witness: None,
        }),
    }
}

/// Searches for a proper nonzero invariant subspace: spin every basis
/// vector, spin every dual basis vector under the transposed action (taking
/// orthogonal complements back), and finally spin kernels of algebra
/// elements when an algebra basis is available.
fn find_invariant_subspace(
    ops: &[&RationalMatrix],
    n: usize,
    algebra: Option<&MatrixAlgebraBasis>,
) -> Result<Option<Subspace>, AnalysisError> {
    let to_err = |e: crate::error::LinalgError| AnalysisError::DimensionMismatch(e.to_string());
    for i in 0..n {
        let s = spin(&[unit_vector(n, i)], ops).map_err(to_err)?;
        if s.dim() < n {
            return Ok(Some(s));
        }
    }
    let transposed: Vec<RationalMatrix> = ops.iter().map(|m| m.transpose()).collect();
    let t_refs: Vec<&RationalMatrix> = transposed.iter().collect();
    for i in 0..n {
        let s = spin(&[unit_vector(n, i)], &t_refs).map_err(to_err)?;
        if s.dim() < n {
            // The annihilator of a transpose-invariant subspace is
            // invariant for the original action.
            let rows: Vec<Vec<Q>> = s.basis().to_vec();
            let mat = RationalMatrix::from_dense(rows);
            let perp = crate::linalg::nullspace(&mat);
            let candidate = spin(&perp, ops).map_err(to_err)?;
            if candidate.dim() > 0 && candidate.dim() < n {
                return Ok(Some(candidate));
            }
        }
    }
    if let Some(basis) = algebra {
        for el in &basis.elements {
            if el.degree == 0 {
                continue;
            }
            for v in crate::linalg::nullspace(&el.matrix) {
                let s = spin(&[v], ops).map_err(to_err)?;
                if s.dim() > 0 && s.dim() < n {
                    return Ok(Some(s));
                }
            }
        }
    }
    Ok(None)
}

/// Smallest subspace containing `v` and invariant under all generators of a
/// total module.
pub fn submodule_generated_rep(m: &ModuleRep, v: &[Q]) -> Result<Subspace, AnalysisError> {
    if v.len() != m.dim {
        return Err(AnalysisError::DimensionMismatch(format!(
            "vector length {} in module of dimension {}",
            v.len(),
            m.dim
        )));
    }
    let ops: Vec<&RationalMatrix> = m.actions().map(|(_, a)| a).collect();
    spin(&[v.to_vec()], &ops).map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))
}

/// Smallest subspace containing `v` invariant under every total operator of
/// a truncation.
pub fn submodule_generated(
    m: &TruncatedInducedModule,
    v: &[Q],
) -> Result<Subspace, AnalysisError> {
    if v.len() != m.dim {
        return Err(AnalysisError::DimensionMismatch(format!(
            "vector length {} in module of dimension {}",
            v.len(),
            m.dim
        )));
    }
    let ops = m.total_matrices();
    spin(&[v.to_vec()], &ops).map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))
}

/// Spin closure that also uses partial operators wherever they are defined:
/// at every pass each operator is applied to the whole intersection of the
/// current span with its domain subspace, not just to basis rows, so no
/// domain-supported vector of the span is missed. Sound because a partial
/// operator, where defined, computes the honest module action.
pub fn spin_with_partials(seed: &[Vec<Q>], ops: &[&PartialAction], ambient: usize) -> Subspace {
    let mut space = Subspace::from_vectors(ambient, seed);
    loop {
        let before = space.dim();
        for op in ops {
            for v in domain_intersection(&space, op) {
                if let Ok(w) = op.matrix.mul_vec(&v) {
                    space.insert(w);
                }
            }
        }
        if space.dim() == before {
            return space;
        }
    }
}

/// Basis of `{v in space : supp(v) inside the operator domain}`.
fn domain_intersection(space: &Subspace, op: &PartialAction) -> Vec<Vec<Q>> {
    let forbidden: Vec<usize> = op
        .domain
        .iter()
        .enumerate()
        .filter(|(_, &ok)| !ok)
        .map(|(i, _)| i)
        .collect();
    if forbidden.is_empty() {
        return space.basis().to_vec();
    }
    // Combinations of basis rows whose forbidden coordinates vanish.
    let mut constraint = RationalMatrix::zero(forbidden.len(), space.dim());
    for (r, &coord) in forbidden.iter().enumerate() {
        for (c, row) in space.basis().iter().enumerate() {
            if !row[coord].is_zero() {
                constraint.set(r, c, row[coord].clone());
            }
        }
    }
    crate::linalg::nullspace(&constraint)
        .into_iter()
        .map(|coeffs| {
            let mut v = vec![Q::zero(); space.ambient_dim()];
            for (c, row) in coeffs.iter().zip(space.basis()) {
                if !c.is_zero() {
                    crate::lie::gvec_add_scaled(&mut v, c, row);
                }
            }
            v
        })
        .collect()
}

/// An element of the enveloping action algebra found by a density solve:
/// its matrix, the product words over generator labels with coefficients,
/// and the minimal word degree that sufficed.
#[derive(Clone, Debug)]
pub struct DensityElement {
    pub matrix: RationalMatrix,
    pub words: Vec<(Q, Vec<GenLabel>)>,
    pub degree: usize,
}

/// Finds an element of the unital algebra generated by the given labeled
/// operators sending each `v_j` to `target_j`, using words of degree at
/// most `degree_bound`. The postcondition is re-verified by direct matrix
/// application before returning.
pub fn density_solve_with_generators(
    gens: &[(GenLabel, &RationalMatrix)],
    vs: &[Vec<Q>],
    targets: &[Vec<Q>],
    degree_bound: usize,
) -> Result<DensityElement, AnalysisError> {
    if vs.is_empty() || vs.len() != targets.len() {
        return Err(AnalysisError::InputError(
            "need equally many vectors and targets".into(),
        ));
    }
    let n = vs[0].len();
    let independent = Subspace::from_vectors(n, vs);
    if independent.dim() != vs.len() {
        return Err(AnalysisError::DependentVectors);
    }
    let ops: Vec<&RationalMatrix> = gens.iter().map(|(_, m)| *m).collect();
    let basis = MatrixAlgebraBasis::generate(&ops, n, Some(degree_bound))
        .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?;
    let mut rhs = Vec::with_capacity(n * vs.len());
    for t in targets {
        rhs.extend(t.iter().cloned());
    }
    let max_seen = basis.elements.iter().map(|e| e.degree).max().unwrap_or(0);
    for degree in 0..=degree_bound.min(max_seen) {
        let usable: Vec<usize> = basis
            .elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.degree <= degree)
            .map(|(i, _)| i)
            .collect();
        let mut cols = Vec::with_capacity(usable.len());
        for &i in &usable {
            let mut col = Vec::with_capacity(n * vs.len());
            for v in vs {
                col.extend(
                    basis.elements[i]
                        .matrix
                        .mul_vec(v)
                        .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?,
                );
            }
            cols.push(col);
        }
        let system = RationalMatrix::from_columns(&cols);
        if let Some(sol) = crate::linalg::solve_linear(&system, &rhs)
            .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?
        {
            let mut matrix = RationalMatrix::zero(n, n);
            let mut words = Vec::new();
            for (k, &i) in usable.iter().enumerate() {
                if sol[k].is_zero() {
                    continue;
                }
                matrix = matrix
                    .add(&basis.elements[i].matrix.scale(&sol[k]))
                    .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?;
                let word: Vec<GenLabel> =
                    basis.elements[i].word.iter().map(|&g| gens[g].0).collect();
                words.push((sol[k].clone(), word));
            }
            // Re-verify before returning.
            for (v, t) in vs.iter().zip(targets) {
                let img = matrix
                    .mul_vec(v)
                    .map_err(|e| AnalysisError::DimensionMismatch(e.to_string()))?;
                if &img != t {
                    return Err(AnalysisError::CheckFailed(
                        "density element failed re-verification".into(),
                    ));
                }
            }
            return Ok(DensityElement {
                matrix,
                words,
                degree,
            });
        }
    }
    Err(AnalysisError::DegreeBoundExceeded(degree_bound))
}

/// Density solve over an evaluation module's generator window.
pub fn density_solve(
    e: &EvaluationModule,
    vs: &[Vec<Q>],
    targets: &[Vec<Q>],
    degree_bound: usize,
) -> Result<DensityElement, AnalysisError> {
    let gens: Vec<(GenLabel, &RationalMatrix)> = e
        .rep
        .actions()
        .filter(|(l, _)| matches!(l, GenLabel::Loop { .. }))
        .map(|(l, m)| (*l, m))
        .collect();
    density_solve_with_generators(&gens, vs, targets, degree_bound)
}

/// Report for the tensor-submodule shape verification.
#[derive(Clone, Debug)]
pub struct TensorShapeReport {
    pub samples: Vec<SampleShapeReport>,
    pub kill_power: i64,
}

#[derive(Clone, Debug)]
pub struct SampleShapeReport {
    pub terms: usize,
    pub layers: Vec<usize>,
    pub density_degrees: Vec<usize>,
    pub contained: bool,
}

impl TensorShapeReport {
    pub fn verified(&self) -> bool {
        self.samples.iter().all(|s| s.contained)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "tensor_submodule_shape",
            "kill_power": self.kill_power,
            "verdict": self.verified(),
            "samples": self.samples.iter().map(|s| json!({
                "terms": s.terms,
                "layers": s.layers,
                "density_degrees": s.density_degrees,
                "contained": s.contained,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Smallest power from which the whole loop algebra annihilates the
/// truncation `l` within the available windows.
fn kill_power(e: &EvaluationModule, l: &TruncatedInducedModule) -> Result<i64, AnalysisError> {
    let alg = &l.algebra;
    let max_power = l
        .labels()
        .filter_map(|lab| match lab {
            GenLabel::Loop { power, .. } => Some(*power),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    'outer: for k in 1..=max_power {
        for j in k..=max_power {
            for b in 0..alg.dim {
                match l.action(&GenLabel::loop_gen(b, j)) {
                    Some(a) if a.is_total() && a.matrix.is_zero_matrix() => {}
                    _ => continue 'outer,
                }
            }
        }
        if k <= e.window {
            return Ok(k);
        }
    }
    Err(AnalysisError::InputError(
        "no annihilating power inside the generator windows; enlarge them".into(),
    ))
}

/// Verifies the submodule-shape mechanism on the tensor product
/// `E (x) L` (or its `d`-extension when `d_depth` is set): spin a sampled
/// vector `w = sum v_i (x) u_i` under loop operators of degree at least the
/// kill power, separate components with density elements, and certify that
/// the full `E (x) u_i` (at every `d`-layer, in the extension case) lies in
/// the generated submodule.
pub fn verify_tensor_submodule_shape(
    e: &EvaluationModule,
    l: &TruncatedInducedModule,
    samples: usize,
    seed: u64,
    d_depth: Option<usize>,
) -> Result<TensorShapeReport, AnalysisError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let tensor = crate::modules::tensor_modules(e, l)
        .map_err(|err| AnalysisError::InputError(err.to_string()))?;
    let module = match d_depth {
        Some(dd) => crate::modules::build_d_extension(&tensor, dd)
            .map_err(|err| AnalysisError::InputError(err.to_string()))?,
        None => tensor.clone(),
    };
    let k = kill_power(e, l)?;
    let ldim = l.dim;
    let tensor_dim = tensor.dim;
    let layers = d_depth.unwrap_or(0) + 1;

    // Operators used by the proof mechanism: loop generators of degree at
    // least k (total on the tensor side since they annihilate L), plus the
    // partial d where defined.
    let mechanism_labels: Vec<GenLabel> = module
        .labels()
        .filter(|lab| match lab {
            GenLabel::Loop { power, .. } => *power >= k,
            GenLabel::DerivationD => true,
            GenLabel::CentralK => false,
        })
        .copied()
        .collect();
    let mechanism_ops: Vec<&PartialAction> = mechanism_labels
        .iter()
        .map(|lab| module.action(lab).expect("label comes from the module"))
        .collect();

    let density_gens: Vec<(GenLabel, &RationalMatrix)> = e
        .rep
        .actions()
        .filter(|(lab, _)| matches!(lab, GenLabel::Loop { power, .. } if *power >= k))
        .map(|(lab, m)| (*lab, m))
        .collect();

    let mut reports = Vec::new();
    for _ in 0..samples {
        // Sample independent v_i and u_i with small entries; resample on
        // dependence.
        let terms = rng.gen_range(1..=2usize.min(e.dim()).min(ldim));
        let (vs, us) = loop {
            let vs: Vec<Vec<Q>> = (0..terms)
                .map(|_| {
                    (0..e.dim())
                        .map(|_| crate::rational::qi(rng.gen_range(-2..=2)))
                        .collect()
                })
                .collect();
            let us: Vec<Vec<Q>> = (0..terms)
                .map(|_| {
                    (0..ldim)
                        .map(|_| crate::rational::qi(rng.gen_range(-2..=2)))
                        .collect()
                })
                .collect();
            if Subspace::from_vectors(e.dim(), &vs).dim() == terms
                && Subspace::from_vectors(ldim, &us).dim() == terms
            {
                break (vs, us);
            }
        };
        let term_layers: Vec<usize> = (0..terms).map(|_| rng.gen_range(0..layers)).collect();

        // w = sum_i d^{c_i} (x) (v_i (x) u_i)
        let mut w = vec![Q::zero(); module.dim];
        for i in 0..terms {
            let offset = term_layers[i] * tensor_dim;
            for (a, va) in vs[i].iter().enumerate() {
                for (b, ub) in us[i].iter().enumerate() {
                    let val = va * ub;
                    if !val.is_zero() {
                        w[offset + a * ldim + b] = &w[offset + a * ldim + b] + &val;
                    }
                }
            }
        }
        let generated = spin_with_partials(&[w], &mechanism_ops, module.dim);

        // Density elements separating the sampled E-components.
        let mut density_degrees = Vec::new();
        let mut contained = true;
        for i in 0..terms {
            let targets: Vec<Vec<Q>> = (0..terms)
                .map(|j| {
                    if i == j {
                        vs[j].clone()
                    } else {
                        vec![Q::zero(); e.dim()]
                    }
                })
                .collect();
            match density_solve_with_generators(&density_gens, &vs, &targets, e.dim() * e.dim()) {
                Ok(el) => density_degrees.push(el.degree),
                Err(err) => {
                    return Err(AnalysisError::CheckFailed(format!(
                        "density separation failed: {err}"
                    )))
                }
            }
        }
        // The conclusion: E (x) u_i (at every available d-layer) sits inside
        // the generated submodule.
        for i in 0..terms {
            for layer in 0..layers {
                for a in 0..e.dim() {
                    let mut vec = vec![Q::zero(); module.dim];
                    for (b, ub) in us[i].iter().enumerate() {
                        if !ub.is_zero() {
                            vec[layer * tensor_dim + a * ldim + b] = ub.clone();
                        }
                    }
                    if !generated.contains(&vec) {
                        contained = false;
                    }
                }
            }
        }
        reports.push(SampleShapeReport {
            terms,
            layers: term_layers,
            density_degrees,
            contained,
        });
    }
    Ok(TensorShapeReport {
        samples: reports,
        kill_power: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::PointConfiguration;
    use crate::lie::irrep::build_irrep;
    use crate::lie::{build_simple_lie_algebra, Series, Weight};
    use crate::modules::{build_evaluation_module, build_whittaker_truncation, EtaHom};
    use crate::rational::qi;
    use std::sync::Arc;

    fn sl2() -> Arc<crate::lie::LieAlgebraData> {
        build_simple_lie_algebra(Series::A, 1).unwrap()
    }

    fn w(ls: &[i64]) -> Vec<Weight> {
        ls.iter().map(|&l| Weight::from_integers(&[l])).collect()
    }

    fn pts(ps: &[i64]) -> PointConfiguration {
        PointConfiguration::new(ps.iter().map(|&p| qi(p)).collect()).unwrap()
    }

    #[test]
    fn irreducibility_of_small_irreps() {
        let g = sl2();
        let v1 = build_irrep(Arc::clone(&g), &Weight::from_integers(&[1])).unwrap();
        let cert = is_irreducible(&v1).unwrap();
        assert!(cert.irreducible);
        assert_eq!(cert.method, IrreducibilityMethod::Burnside);
        assert_eq!(cert.algebra_dim, Some(4));
    }

    #[test]
    fn every_built_irrep_is_irreducible() {
        let g2 = sl2();
        for lam in 0..=3i64 {
            let rep = build_irrep(Arc::clone(&g2), &Weight::from_integers(&[lam])).unwrap();
            assert!(is_irreducible(&rep).unwrap().irreducible, "sl2 V({lam})");
        }
        let g3 = build_simple_lie_algebra(Series::A, 2).unwrap();
        for lam in [[1, 0], [1, 1]] {
            let rep = build_irrep(Arc::clone(&g3), &Weight::from_integers(&lam)).unwrap();
            assert!(is_irreducible(&rep).unwrap().irreducible, "sl3 V({lam:?})");
        }
    }

    #[test]
    fn s_modules_are_irreducible_over_the_positive_part() {
        use crate::modules::build_s_module;
        let g = sl2();
        let cases: Vec<(EtaHom, Vec<Weight>, PointConfiguration)> = vec![
            (
                EtaHom {
                    simple_values: vec![qi(1)],
                    affine_value: qi(0),
                },
                w(&[1]),
                pts(&[2]),
            ),
            (EtaHom::zero(1), w(&[1, 1]), pts(&[1, 2])),
            (
                EtaHom {
                    simple_values: vec![qi(2)],
                    affine_value: qi(3),
                },
                w(&[2]),
                pts(&[-1]),
            ),
        ];
        for (eta, lambdas, pc) in cases {
            let s = build_s_module(Arc::clone(&g), &eta, &lambdas, &pc, None).unwrap();
            let cert = is_irreducible(&s).unwrap();
            assert!(cert.irreducible, "S({:?}, {:?})", lambdas, pc.points());
        }
    }

    #[test]
    fn evaluation_module_is_irreducible_with_full_burnside_dimension() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        let cert = is_irreducible(&e.rep).unwrap();
        assert!(cert.irreducible);
        assert_eq!(cert.algebra_dim, Some(16));
    }

    #[test]
    fn direct_sum_is_reducible_with_witness() {
        let g = sl2();
        let v1 = build_irrep(Arc::clone(&g), &Weight::from_integers(&[1])).unwrap();
        let sum = v1.direct_sum(&v1).unwrap();
        let cert = is_irreducible(&sum).unwrap();
        assert!(!cert.irreducible);
        let witness = cert.witness.expect("negative verdict carries a witness");
        assert!(witness.dim() > 0 && witness.dim() < sum.dim);
        // The witness re-verifies under spin.
        let ops: Vec<&RationalMatrix> = sum.actions().map(|(_, a)| a).collect();
        let respun = spin(witness.basis(), &ops).unwrap();
        assert_eq!(&respun, &witness);
    }

    #[test]
    fn burnside_and_spinning_agree_on_small_modules() {
        let g = sl2();
        for lam in 0..4i64 {
            let rep = build_irrep(Arc::clone(&g), &Weight::from_integers(&[lam])).unwrap();
            let ops: Vec<&RationalMatrix> = rep.actions().map(|(_, a)| a).collect();
            let burnside = is_irreducible(&rep).unwrap().irreducible;
            let spinning = find_invariant_subspace(&ops, rep.dim, None)
                .unwrap()
                .is_none();
            assert_eq!(burnside, spinning, "lambda = {lam}");
        }
        let v1 = build_irrep(Arc::clone(&g), &Weight::from_integers(&[1])).unwrap();
        let sum = v1.direct_sum(&v1).unwrap();
        let ops: Vec<&RationalMatrix> = sum.actions().map(|(_, a)| a).collect();
        assert!(!is_irreducible(&sum).unwrap().irreducible);
        assert!(find_invariant_subspace(&ops, sum.dim, None)
            .unwrap()
            .is_some());
    }

    #[test]
    fn submodule_generated_examples() {
        let g = sl2();
        let v1 = build_irrep(Arc::clone(&g), &Weight::from_integers(&[1])).unwrap();
        // Zero vector generates the zero subspace.
        let z = submodule_generated_rep(&v1, &[qi(0), qi(0)]).unwrap();
        assert_eq!(z.dim(), 0);
        // Any nonzero vector of an irreducible module generates everything.
        let s = submodule_generated_rep(&v1, &[qi(2), qi(-3)]).unwrap();
        assert!(s.is_full());
    }

    #[test]
    fn density_solve_identity_and_projection() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        let dim = e.dim();
        let basis: Vec<Vec<Q>> = (0..dim).map(|i| unit_vector(dim, i)).collect();
        // Full basis to itself: the identity, degree zero.
        let el = density_solve(&e, &basis, &basis, 4).unwrap();
        assert_eq!(el.degree, 0);
        assert_eq!(el.matrix, RationalMatrix::identity(dim));

        // v++ and v-- separated: some element kills one and fixes the other.
        let vpp = unit_vector(dim, 0);
        let vmm = unit_vector(dim, dim - 1);
        let el = density_solve(
            &e,
            &[vpp.clone(), vmm.clone()],
            &[vpp.clone(), vec![Q::zero(); dim]],
            8,
        )
        .unwrap();
        assert_eq!(el.matrix.mul_vec(&vpp).unwrap(), vpp);
        assert!(el.matrix.mul_vec(&vmm).unwrap().iter().all(Q::is_zero));

        // Dependent inputs are rejected.
        assert!(matches!(
            density_solve(&e, &[vpp.clone(), vpp.clone()], &[vpp.clone(), vpp], 4),
            Err(AnalysisError::DependentVectors)
        ));
    }

    #[test]
    fn tensor_shape_mechanism_with_whittaker_factor() {
        let g = sl2();
        let l = build_whittaker_truncation(
            Arc::clone(&g),
            &EtaHom {
                simple_values: vec![qi(1)],
                affine_value: qi(0),
            },
            1,
        )
        .unwrap();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), Some(4)).unwrap();
        let report = verify_tensor_submodule_shape(&e, &l, 3, 17, None).unwrap();
        assert!(report.verified());
        assert!(report.kill_power <= 3);
    }

    #[test]
    fn tensor_shape_mechanism_in_d_extension() {
        let g = sl2();
        let l = build_whittaker_truncation(
            Arc::clone(&g),
            &EtaHom {
                simple_values: vec![qi(1)],
                affine_value: qi(0),
            },
            1,
        )
        .unwrap();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), Some(4)).unwrap();
        let report = verify_tensor_submodule_shape(&e, &l, 2, 23, Some(1)).unwrap();
        assert!(report.verified());
    }
}
