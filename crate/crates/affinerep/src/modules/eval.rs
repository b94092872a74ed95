//! Evaluation modules and their one-dimensional twists over the positive
//! part.
//!
//! `E(lambda, a)` is the tensor product of finite-dimensional irreducibles
//! on which `x (x) t^k` acts through evaluation of `t^k` at the points,
//! with trivial central action. Twisting the same formula by a character
//! `eta` of the positive part gives the modules `S(eta, lambda, a)`.

use num::Zero;
use std::sync::Arc;

use crate::affine::{NposBasis, PointConfiguration};
use crate::error::ModuleError;
use crate::lie::irrep::build_irrep;
use crate::lie::rep::{GenLabel, ModuleRep};
use crate::lie::{LieAlgebraData, Weight};
use crate::linalg::RationalMatrix;
use crate::modules::{tensor_labels, EtaHom, ModuleDescriptor};
use crate::poly::Poly;
use crate::rational::{q_pow, Q};

/// Index arithmetic for a tensor product of factors, row-major.
pub(crate) struct TensorSpace {
    pub dims: Vec<usize>,
    pub total: usize,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Self {
        let total = dims.iter().product::<usize>().max(1);
        TensorSpace { dims, total }
    }

    /// Adds `coef * (1 (x) .. (x) m at factor (x) .. (x) 1)` into `target`.
    pub fn add_lifted(
        &self,
        target: &mut RationalMatrix,
        factor: usize,
        m: &RationalMatrix,
        coef: &Q,
    ) {
        if coef.is_zero() {
            return;
        }
        let inner: usize = self.dims[factor + 1..].iter().product();
        let outer: usize = self.dims[..factor].iter().product();
        let block = self.dims[factor] * inner;
        for (r, c, v) in m.entries() {
            let value = v * coef;
            for o in 0..outer {
                for i in 0..inner {
                    target.add_to(o * block + r * inner + i, o * block + c * inner + i, value.clone());
                }
            }
        }
    }

    pub fn components(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (i, d) in self.dims.iter().enumerate().rev() {
            out[i] = idx % d;
            idx /= d;
        }
        out
    }
}

/// An evaluation module together with its construction data.
#[derive(Clone, Debug)]
pub struct EvaluationModule {
    pub rep: ModuleRep,
    pub lambdas: Vec<Weight>,
    pub points: PointConfiguration,
    pub factor_dims: Vec<usize>,
    /// Per basis vector, the tuple of factor weights (the multiweight).
    pub multiweights: Vec<Vec<Weight>>,
    /// Symmetric generator power window `[-window, window]`.
    pub window: i64,
    pub descriptor: ModuleDescriptor,
}

impl EvaluationModule {
    pub fn dim(&self) -> usize {
        self.rep.dim
    }

    /// The module seen as a plain finite-algebra module (power-zero
    /// generators only).
    pub fn restrict_to_g(&self) -> ModuleRep {
        self.rep
            .restrict_generators(|l| matches!(l, GenLabel::Loop { power: 0, .. }))
    }

    /// Index of the highest weight pure tensor (all factors at their
    /// highest weight vectors, which sit at factor index 0).
    pub fn highest_vector_index(&self) -> usize {
        0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "descriptor": self.descriptor.to_json(),
            "window": self.window,
            "module": self.rep.to_json(),
        })
    }

    /// Rebuilds the module from its serialized descriptor and verifies that
    /// the stored action matrices are entry-identical to the rebuilt ones.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, crate::error::FormatError> {
        use crate::error::FormatError;
        let descriptor = ModuleDescriptor::from_json(
            v.get("descriptor")
                .ok_or_else(|| FormatError::BadJson("evaluation.descriptor".into()))?,
        )?;
        let window = v
            .get("window")
            .and_then(serde_json::Value::as_i64)
            .ok_or_else(|| FormatError::BadJson("evaluation.window".into()))?;
        let stored = ModuleRep::from_json(
            v.get("module")
                .ok_or_else(|| FormatError::BadJson("evaluation.module".into()))?,
        )?;
        let ModuleDescriptor::Evaluation { lambdas, points } = &descriptor else {
            return Err(FormatError::BadJson(
                "descriptor is not an evaluation family".into(),
            ));
        };
        let pc = PointConfiguration::new(points.clone())
            .map_err(|e| FormatError::BadJson(e.to_string()))?;
        let rebuilt =
            build_evaluation_module(Arc::clone(&stored.algebra), lambdas, &pc, Some(window))
                .map_err(|e| FormatError::BadJson(e.to_string()))?;
        if rebuilt.rep.dim != stored.dim {
            return Err(FormatError::BadJson("stored dimension mismatch".into()));
        }
        for (label, matrix) in stored.actions() {
            if rebuilt.rep.action(label) != Some(matrix) {
                return Err(FormatError::BadJson(format!(
                    "stored action for {label} differs from the rebuilt module"
                )));
            }
        }
        Ok(rebuilt)
    }
}

/// Builds `E(lambda, a)` with generator set
/// `{x_b (x) t^k : |k| <= window} + {K}`; the window defaults to
/// `m + 2` so that annihilator and density checks have margin.
pub fn build_evaluation_module(
    algebra: Arc<LieAlgebraData>,
    lambdas: &[Weight],
    points: &PointConfiguration,
    window: Option<i64>,
) -> Result<EvaluationModule, ModuleError> {
    if lambdas.len() != points.len() {
        return Err(ModuleError::LengthMismatch(lambdas.len(), points.len()));
    }
    let window = window.unwrap_or(points.len() as i64 + 2).max(1);
    let mut factors = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        factors.push(build_irrep(Arc::clone(&algebra), l)?);
    }
    let space = TensorSpace::new(factors.iter().map(|f| f.dim).collect());
    let dim = space.total;

    let labels = if factors.is_empty() {
        vec!["1".to_string()]
    } else {
        factors
            .iter()
            .map(|f| f.basis_labels.clone())
            .reduce(|acc, next| tensor_labels(&acc, &next))
            .unwrap()
    };
    let mut rep = ModuleRep::new(Arc::clone(&algebra), dim, labels);

    for basis in 0..algebra.dim {
        for k in -window..=window {
            let mut matrix = RationalMatrix::zero(dim, dim);
            for (i, factor) in factors.iter().enumerate() {
                let coef = q_pow(&points.points()[i], k)
                    .map_err(|e| ModuleError::Construction(e.to_string()))?;
                let action = factor
                    .action(&GenLabel::loop_gen(basis, 0))
                    .expect("irreducible factors carry full finite actions");
                space.add_lifted(&mut matrix, i, action, &coef);
            }
            rep.insert_action(GenLabel::loop_gen(basis, k), matrix);
        }
    }
    // K acts trivially.
    rep.insert_action(GenLabel::CentralK, RationalMatrix::zero(dim, dim));

    // Multiweights and joint weights.
    let factor_weights: Vec<Vec<Weight>> = factors
        .iter()
        .map(|f| f.weights.clone().expect("irreps carry weight labels"))
        .collect();
    let mut multiweights = Vec::with_capacity(dim);
    let mut joint = Vec::with_capacity(dim);
    for idx in 0..dim {
        let comps = space.components(idx);
        let tuple: Vec<Weight> = comps
            .iter()
            .enumerate()
            .map(|(i, &c)| factor_weights[i][c].clone())
            .collect();
        let mut sum = Weight::zero(algebra.rank);
        for w in &tuple {
            for (s, c) in sum.0.iter_mut().zip(&w.0) {
                *s = &*s + c;
            }
        }
        multiweights.push(tuple);
        joint.push(sum);
    }
    rep.weights = Some(joint);

    Ok(EvaluationModule {
        factor_dims: space.dims.clone(),
        rep,
        lambdas: lambdas.to_vec(),
        points: points.clone(),
        multiweights,
        window,
        descriptor: ModuleDescriptor::Evaluation {
            lambdas: lambdas.to_vec(),
            points: points.points().to_vec(),
        },
    })
}

/// Certificate produced alongside the annihilator polynomial: the ideal it
/// generates kills the module on the whole window and no proper divisor
/// does.
#[derive(Clone, Debug)]
pub struct AnnihilatorCertificate {
    pub poly: Poly,
    pub kills_module: bool,
    pub minimal: bool,
}

/// The annihilator polynomial `f_{lambda, a} = prod_{lambda_i != 0} (t - a_i)`,
/// verified against the module action on the available window.
pub fn evaluation_annihilator(
    e: &EvaluationModule,
) -> Result<AnnihilatorCertificate, ModuleError> {
    let roots: Vec<Q> = e
        .lambdas
        .iter()
        .zip(e.points.points())
        .filter(|(l, _)| !l.is_zero())
        .map(|(_, a)| a.clone())
        .collect();
    let poly = Poly::from_roots(&roots);
    let kills_module = poly_annihilates(e, &poly)?;
    let mut minimal = true;
    for drop in &roots {
        let (quot, rem) = poly.div_rem(&Poly::linear_root(drop));
        debug_assert!(rem.is_zero());
        if poly_annihilates(e, &quot)? {
            minimal = false;
        }
    }
    Ok(AnnihilatorCertificate {
        poly,
        kills_module,
        minimal,
    })
}

/// Whether `g (x) p(t) t^j` acts as zero for every shift `j` that fits the
/// window.
fn poly_annihilates(e: &EvaluationModule, p: &Poly) -> Result<bool, ModuleError> {
    let deg = p.degree() as i64;
    for basis in 0..e.rep.algebra.dim {
        for j in -e.window..=(e.window - deg) {
            let mut acc = RationalMatrix::zero(e.dim(), e.dim());
            for (s, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let label = GenLabel::loop_gen(basis, j + s as i64);
                let a = e
                    .rep
                    .action(&label)
                    .ok_or_else(|| ModuleError::PartialAction(format!("{label}")))?;
                acc = acc
                    .add(&a.scale(c))
                    .map_err(|err| ModuleError::Construction(err.to_string()))?;
            }
            if !acc.is_zero_matrix() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Builds `S(eta, lambda, a)`: the positive part acts on the tensor product
/// of irreducibles by the evaluation formula plus the scalar `eta`. Passing
/// empty weights and points yields the one-dimensional module `C v_eta`.
pub fn build_s_module(
    algebra: Arc<LieAlgebraData>,
    eta: &EtaHom,
    lambdas: &[Weight],
    points: &PointConfiguration,
    window: Option<usize>,
) -> Result<ModuleRep, ModuleError> {
    if lambdas.len() != points.len() {
        return Err(ModuleError::LengthMismatch(lambdas.len(), points.len()));
    }
    if eta.simple_values.len() != algebra.rank {
        return Err(ModuleError::Construction(format!(
            "eta has {} simple values for rank {}",
            eta.simple_values.len(),
            algebra.rank
        )));
    }
    let window = window.unwrap_or(points.len() + 2).max(2);
    let mut factors = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        factors.push(build_irrep(Arc::clone(&algebra), l)?);
    }
    let space = TensorSpace::new(factors.iter().map(|f| f.dim).collect());
    let dim = space.total;
    let labels = if factors.is_empty() {
        vec!["v_eta".to_string()]
    } else {
        factors
            .iter()
            .map(|f| f.basis_labels.clone())
            .reduce(|acc, next| tensor_labels(&acc, &next))
            .unwrap()
    };
    let mut rep = ModuleRep::new(Arc::clone(&algebra), dim, labels);

    let npos = NposBasis::new(Arc::clone(&algebra), window);
    for i in 0..npos.len() {
        let (basis, power) = npos.elem(i);
        let mut matrix =
            RationalMatrix::identity(dim).scale(&eta.value_on_loop(&algebra, basis, power));
        for (fi, factor) in factors.iter().enumerate() {
            let coef = q_pow(&points.points()[fi], power)
                .map_err(|e| ModuleError::Construction(e.to_string()))?;
            let action = factor
                .action(&GenLabel::loop_gen(basis, 0))
                .expect("irreducible factors carry full finite actions");
            space.add_lifted(&mut matrix, fi, action, &coef);
        }
        rep.insert_action(GenLabel::loop_gen(basis, power), matrix);
    }

    let factor_weights: Vec<Vec<Weight>> = factors
        .iter()
        .map(|f| f.weights.clone().expect("irreps carry weight labels"))
        .collect();
    let mut joint = Vec::with_capacity(dim);
    for idx in 0..dim {
        let comps = space.components(idx);
        let mut sum = Weight::zero(algebra.rank);
        for (i, &c) in comps.iter().enumerate() {
            for (s, w) in sum.0.iter_mut().zip(&factor_weights[i][c].0) {
                *s = &*s + w;
            }
        }
        joint.push(sum);
    }
    rep.weights = Some(joint);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::rep::weight_decomposition;
    use crate::lie::{build_simple_lie_algebra, Series};
    use crate::modules::module_action_of;
    use crate::rational::{qi, qr};

    fn sl2() -> Arc<LieAlgebraData> {
        build_simple_lie_algebra(Series::A, 1).unwrap()
    }

    fn w(ls: &[i64]) -> Vec<Weight> {
        ls.iter().map(|&l| Weight::from_integers(&[l])).collect()
    }

    fn pts(ps: &[i64]) -> PointConfiguration {
        PointConfiguration::new(ps.iter().map(|&p| qi(p)).collect()).unwrap()
    }

    #[test]
    fn evaluation_action_formula() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        assert_eq!(e.dim(), 4);

        // (h (x) t)(v+ (x) v+) = (1 + 2)(v+ (x) v+).
        let h1 = e
            .rep
            .action(&GenLabel::loop_gen(g.cartan_index(0), 1))
            .unwrap();
        let mut vpp = vec![qi(0); 4];
        vpp[0] = qi(1);
        assert_eq!(h1.mul_vec(&vpp).unwrap(), vec![qi(3), qi(0), qi(0), qi(0)]);

        // K acts as zero.
        let k = e.rep.action(&GenLabel::CentralK).unwrap();
        assert!(k.is_zero_matrix());

        // Bracket compatibility holds exactly on the window.
        assert!(e.rep.check_bracket_compatibility().unwrap() > 100);
    }

    #[test]
    fn evaluation_single_point_powers() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), None).unwrap();
        // (e (x) t^k) v- = 2^k v+.
        for k in -3..=3i64 {
            let a = e.rep.action(&GenLabel::loop_gen(g.e_index(0), k)).unwrap();
            let vminus = vec![qi(0), qi(1)];
            let img = a.mul_vec(&vminus).unwrap();
            assert_eq!(img[0], q_pow(&qi(2), k).unwrap());
            assert_eq!(img[1], qi(0));
        }
    }

    #[test]
    fn evaluation_weight_decomposition_tensor() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        let wd = weight_decomposition(&e.restrict_to_g()).unwrap();
        assert_eq!(
            wd,
            vec![
                (Weight::from_integers(&[2]), 1),
                (Weight::from_integers(&[0]), 2),
                (Weight::from_integers(&[-2]), 1),
            ]
        );
    }

    #[test]
    fn multiweights_separate_points() {
        // For distinct points the joint spectra of h (x) t^k distinguish all
        // multiweight lines.
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        let mut signatures = std::collections::HashSet::new();
        for idx in 0..e.dim() {
            let mut sig = Vec::new();
            for k in 0..=e.points.len() as i64 {
                let a = e
                    .rep
                    .action(&GenLabel::loop_gen(g.cartan_index(0), k))
                    .unwrap();
                sig.push(a.get(idx, idx));
            }
            signatures.insert(sig);
        }
        // Multiweights (1,1), (1,-1), (-1,1), (-1,-1) are pairwise distinct.
        assert_eq!(signatures.len(), 4);
    }

    #[test]
    fn annihilator_examples() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        let cert = evaluation_annihilator(&e).unwrap();
        assert_eq!(cert.poly, Poly::from_roots(&[qi(1), qi(2)]));
        assert!(cert.kills_module);
        assert!(cert.minimal);

        // Zero weights drop out.
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 0]), &pts(&[1, 2]), None).unwrap();
        let cert = evaluation_annihilator(&e).unwrap();
        assert_eq!(cert.poly, Poly::from_roots(&[qi(1)]));
        assert!(cert.kills_module);
        assert!(cert.minimal);

        // Trivial module: everything annihilates.
        let e = build_evaluation_module(Arc::clone(&g), &w(&[0]), &pts(&[5]), None).unwrap();
        let cert = evaluation_annihilator(&e).unwrap();
        assert_eq!(cert.poly, Poly::one());
        assert!(cert.kills_module);
    }

    #[test]
    fn s_module_action_examples() {
        let g = sl2();
        let eta = EtaHom {
            simple_values: vec![qi(1)],
            affine_value: qi(0),
        };
        let s = build_s_module(Arc::clone(&g), &eta, &w(&[1]), &pts(&[2]), None).unwrap();
        assert_eq!(s.dim, 2);
        // (e (x) 1)(v_eta (x) v+) = eta(e) v+ + e v+ = v+.
        let e0 = s.action(&GenLabel::loop_gen(g.e_index(0), 0)).unwrap();
        assert_eq!(e0.mul_vec(&[qi(1), qi(0)]).unwrap(), vec![qi(1), qi(0)]);
        // On v-: eta-term plus evaluation term e v- = v+.
        assert_eq!(e0.mul_vec(&[qi(0), qi(1)]).unwrap(), vec![qi(1), qi(1)]);

        // With eta = 0 the matrices coincide with the evaluation module's
        // restriction to positive-part generators.
        let zero = EtaHom::zero(1);
        let s0 = build_s_module(Arc::clone(&g), &zero, &w(&[1]), &pts(&[2]), None).unwrap();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), Some(3)).unwrap();
        for (label, m) in s0.actions() {
            assert_eq!(e.rep.action(label).unwrap(), m);
        }
    }

    #[test]
    fn s_module_kills_twisted_ideal() {
        // I(t f_a) acts as zero: the positive part tensored with multiples
        // of t f_a, and the rest tensored with multiples of t^2 f_a.
        let g = sl2();
        let eta = EtaHom {
            simple_values: vec![qr(2, 3)],
            affine_value: qi(5),
        };
        let points = pts(&[1, 2]);
        let window = points.len() + 2;
        let s = build_s_module(Arc::clone(&g), &eta, &w(&[1, 1]), &points, Some(window)).unwrap();
        let tf = points.vanishing_poly().shift(1);
        let ideal = crate::affine::ideal_basis(Arc::clone(&g), &tf, window).unwrap();
        for elem in &ideal.elements {
            let action = module_action_of(&s, elem).unwrap();
            assert!(action.is_zero_matrix(), "{}", elem.describe());
        }
        // For the nilpotent-positive directions even x (x) t f_a itself dies.
        let e_elem = crate::affine::AffineElement::from_polynomial(Arc::clone(&g), g.e_index(0), &tf);
        assert!(module_action_of(&s, &e_elem).unwrap().is_zero_matrix());
        // With a vanishing affine eta value it dies for every direction.
        let eta0 = EtaHom {
            simple_values: vec![qi(1)],
            affine_value: qi(0),
        };
        let s0 = build_s_module(Arc::clone(&g), &eta0, &w(&[1, 1]), &points, Some(window)).unwrap();
        for basis in 0..g.dim {
            let elem = crate::affine::AffineElement::from_polynomial(Arc::clone(&g), basis, &tf);
            assert!(module_action_of(&s0, &elem).unwrap().is_zero_matrix());
        }
    }

    #[test]
    fn s_module_one_dimensional_case() {
        let g = sl2();
        let eta = EtaHom {
            simple_values: vec![qi(3)],
            affine_value: qi(4),
        };
        let empty = PointConfiguration::new(vec![]).unwrap();
        let s = build_s_module(Arc::clone(&g), &eta, &[], &empty, None).unwrap();
        assert_eq!(s.dim, 1);
        let e0 = s.action(&GenLabel::loop_gen(g.e_index(0), 0)).unwrap();
        assert_eq!(e0.get(0, 0), qi(3));
        let ft1 = s.action(&GenLabel::loop_gen(g.f_index(0), 1)).unwrap();
        assert_eq!(ft1.get(0, 0), qi(4));
        let ht1 = s.action(&GenLabel::loop_gen(g.cartan_index(0), 1)).unwrap();
        assert!(ht1.is_zero_matrix());
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = sl2();
        assert!(matches!(
            build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[1, 2]), None),
            Err(ModuleError::LengthMismatch(1, 2))
        ));
    }
}
