//! Locally-finite closure machinery: kernel ideals, annihilators in
//! quotients of the positive part, and the classification of its
//! finite-dimensional irreducible modules.

use num::Zero;
use serde_json::{json, Value};
use std::sync::Arc;

use crate::affine::{ideal_basis, NposBasis, PointConfiguration};
use crate::error::AnalysisError;
use crate::lie::rep::{GenLabel, ModuleRep};
use crate::lie::{BasisKind, Weight};
use crate::linalg::{
    eigenspace, nullspace, rational_eigenvalues, restrict_to_subspace, solve_linear, spin,
    RationalMatrix, Subspace,
};
use crate::modules::{build_s_module, module_action_of, EtaHom};
use crate::poly::Poly;
use crate::rational::Q;

fn lin_err(e: crate::error::LinalgError) -> AnalysisError {
    AnalysisError::DimensionMismatch(e.to_string())
}

/// Largest loop power present among a module's generator labels.
fn max_loop_power(m: &ModuleRep) -> i64 {
    m.labels()
        .filter_map(|l| match l {
            GenLabel::Loop { power, .. } => Some(*power),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// Output of the locally-finite closure algorithm.
#[derive(Clone, Debug)]
pub struct ClosureResult {
    /// The eigenvector the closure was grown from.
    pub eigenvector: Vec<Q>,
    /// `W = U(n~_+) v`, the generated finite-dimensional submodule.
    pub closure: Subspace,
    /// Monic kernel-ideal generator per root: (positive?, root index, f).
    pub root_polys: Vec<(bool, usize, Poly)>,
    /// Least common multiple of the kernel-ideal generators.
    pub f_tilde: Poly,
    /// The combined polynomial with `I(f) W = 0`, namely `f_tilde^2 / t`.
    pub f: Poly,
    /// Degree bookkeeping: `deg(t f) - 1 = deg f`.
    pub p: usize,
    pub annihilation_verified: bool,
}

impl ClosureResult {
    pub fn root_poly(&self, positive: bool, root: usize) -> Option<&Poly> {
        self.root_polys
            .iter()
            .find(|(p, r, _)| *p == positive && *r == root)
            .map(|(_, _, f)| f)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "locally_finite_closure",
            "closure_dim": self.closure.dim(),
            "root_polys": self.root_polys.iter().map(|(pos, r, f)| {
                json!({ "positive": pos, "root": r, "poly": f.to_string() })
            }).collect::<Vec<_>>(),
            "f_tilde": self.f_tilde.to_string(),
            "f": self.f.to_string(),
            "p": self.p,
            "verdict": self.annihilation_verified,
        })
    }
}

/// Finds a joint eigenvector of the commuting operators inside the span of
/// the orbit of `v`, using exact rational eigenvalue extraction.
fn joint_eigenvector(
    ops: &[&RationalMatrix],
    v: &[Q],
) -> Result<Vec<Q>, AnalysisError> {
    let orbit = spin(&[v.to_vec()], ops).map_err(lin_err)?;
    if orbit.dim() == 0 {
        return Err(AnalysisError::InputError("zero start vector".into()));
    }
    let mut space = orbit;
    for op in ops {
        if space.dim() == 1 {
            break;
        }
        let restricted = restrict_to_subspace(op, &space)
            .map_err(lin_err)?
            .ok_or_else(|| {
                AnalysisError::CheckFailed("orbit span is not operator-invariant".into())
            })?;
        let eigenvalues = rational_eigenvalues(&restricted).map_err(lin_err)?;
        let Some(first) = eigenvalues.first() else {
            return Err(AnalysisError::CheckFailed(
                "no rational eigenvalue in the orbit span".into(),
            ));
        };
        let local = eigenspace(&restricted, first).map_err(lin_err)?;
        let lifted: Vec<Vec<Q>> = local
            .iter()
            .map(|coords| {
                let mut out = vec![Q::zero(); v.len()];
                for (c, b) in coords.iter().zip(space.basis()) {
                    crate::lie::gvec_add_scaled(&mut out, c, b);
                }
                out
            })
            .collect();
        space = Subspace::from_vectors(v.len(), &lifted);
    }
    Ok(space.basis()[0].clone())
}

/// The locally-finite closure algorithm: replace `v` by a joint
/// `h (x) t`-eigenvector in its orbit span, spin the closure
/// `W = U(n~_+) v`, compute the monic kernel-ideal generator for every
/// root vector (with `t` dividing it on negative roots), combine them into
/// `f~` and `f = f~^2/t`, and verify `I(f) W = 0` on the host window.
///
/// On a finite host the local-finiteness hypothesis itself is not a
/// checkable statement; what this routine certifies is the conclusion's
/// data: the closure, every kernel ideal, and the annihilation. Hosts where
/// the mechanism genuinely fails surface as errors (no eigenvector, or no
/// kernel polynomial within the window).
pub fn locally_finite_closure(
    host: &ModuleRep,
    v: &[Q],
) -> Result<ClosureResult, AnalysisError> {
    let alg = Arc::clone(&host.algebra);
    let window = max_loop_power(host);
    if window < 1 {
        return Err(AnalysisError::InputError(
            "host carries no positive loop generators".into(),
        ));
    }
    // Step 1: joint eigenvector for the commuting h (x) t operators.
    let mut cartan_ops = Vec::new();
    for i in 0..alg.rank {
        let label = GenLabel::loop_gen(alg.cartan_index(i), 1);
        cartan_ops.push(host.action(&label).ok_or_else(|| {
            AnalysisError::InputError(format!("host misses Cartan loop generator h{}@1", i + 1))
        })?);
    }
    let eigenvector = joint_eigenvector(&cartan_ops, v)?;

    // Step 2: W = U(n~_+) v by spinning under the positive-part window.
    let npos = NposBasis::new(Arc::clone(&alg), window as usize);
    let mut npos_ops = Vec::new();
    for i in 0..npos.len() {
        let label = npos.gen_label(i);
        npos_ops.push(host.action(&label).ok_or_else(|| {
            AnalysisError::InputError(format!("host misses positive generator {label}"))
        })?);
    }
    let closure = spin(std::slice::from_ref(&eigenvector), &npos_ops).map_err(lin_err)?;

    // Step 3: kernel ideals per root.
    let mut root_polys = Vec::new();
    let mut f_tilde = Poly::one();
    for root in 0..alg.num_positive_roots() {
        for positive in [true, false] {
            let basis = if positive {
                alg.e_index(root)
            } else {
                alg.f_index(root)
            };
            let f_alpha = kernel_ideal_generator(host, basis, &eigenvector, positive, window)?;
            f_tilde = f_tilde.lcm(&f_alpha);
            root_polys.push((positive, root, f_alpha));
        }
    }

    // Step 4: f = f~^2 / t; t divides f~ via the negative-root constraint.
    let f_sq = f_tilde.mul(&f_tilde);
    let (f, rem) = f_sq.div_rem(&Poly::monomial(num::One::one(), 1));
    if !rem.is_zero() {
        return Err(AnalysisError::CheckFailed(
            "t does not divide the combined kernel polynomial".into(),
        ));
    }
    let p = f.degree();

    // Step 5: verify I(f) W = 0 on the window.
    let need = f.degree() + 1;
    if (window as usize) < need {
        return Err(AnalysisError::InputError(format!(
            "host window {window} cannot express I(f) generators of degree {need}"
        )));
    }
    let ideal = ideal_basis(Arc::clone(&alg), &f, window as usize)
        .map_err(|e| AnalysisError::InputError(e.to_string()))?;
    let mut verified = true;
    for gen in &ideal.elements {
        let action =
            module_action_of(host, gen).map_err(|e| AnalysisError::InputError(e.to_string()))?;
        for b in closure.basis() {
            let img = action.mul_vec(b).map_err(lin_err)?;
            if !img.iter().all(Q::is_zero) {
                verified = false;
            }
        }
    }

    Ok(ClosureResult {
        eigenvector,
        closure,
        root_polys,
        f_tilde,
        f,
        p,
        annihilation_verified: verified,
    })
}

/// Monic minimal-degree generator of
/// `{g : (x (x) g(t)) v = 0, t | g when the direction is lowering}`,
/// found by degree-incrementing linear solves.
fn kernel_ideal_generator(
    host: &ModuleRep,
    basis: usize,
    v: &[Q],
    positive: bool,
    window: i64,
) -> Result<Poly, AnalysisError> {
    let images: Vec<Vec<Q>> = (0..=window)
        .map(|k| {
            host.action(&GenLabel::loop_gen(basis, k))
                .ok_or_else(|| {
                    AnalysisError::InputError(format!("host misses generator at power {k}"))
                })
                .and_then(|a| a.mul_vec(v).map_err(lin_err))
        })
        .collect::<Result<_, _>>()?;
    let low = if positive { 0usize } else { 1usize };
    for deg in low..=window as usize {
        // Ansatz: t^deg + sum_{low <= j < deg} c_j t^j.
        let cols: Vec<Vec<Q>> = (low..deg).map(|j| images[j].clone()).collect();
        let rhs: Vec<Q> = images[deg].iter().map(|x| -x.clone()).collect();
        let solution = if cols.is_empty() {
            if rhs.iter().all(Q::is_zero) {
                Some(Vec::new())
            } else {
                None
            }
        } else {
            solve_linear(&RationalMatrix::from_columns(&cols), &rhs).map_err(lin_err)?
        };
        if let Some(sol) = solution {
            let mut coeffs = vec![Q::zero(); deg + 1];
            coeffs[deg] = num::One::one();
            for (idx, j) in (low..deg).enumerate() {
                coeffs[j] = sol[idx].clone();
            }
            return Ok(Poly::new(coeffs));
        }
    }
    Err(AnalysisError::CheckFailed(format!(
        "no kernel polynomial up to degree {window} for basis element {basis}"
    )))
}

/// Annihilator of a module over a truncated quotient of the positive part.
#[derive(Clone, Debug)]
pub struct QuotientAnnihilator {
    /// Kernel of the action map on the truncated positive part.
    pub kernel: Subspace,
    pub window: usize,
    /// Whether `I(f~)` (the input's defining ideal) is contained in it.
    pub contains_ideal: bool,
}

impl QuotientAnnihilator {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "annihilator_in_quotient",
            "kernel_dim": self.kernel.dim(),
            "window": self.window,
            "contains_ideal": self.contains_ideal,
        })
    }
}

/// Computes `{x in n~_+ truncation : x . s = 0}` as a subspace in the
/// positive-part coordinates and checks that the defining ideal `I(f~)`
/// annihilates (an input error otherwise).
pub fn annihilator_in_quotient(
    s: &ModuleRep,
    f_tilde: &Poly,
) -> Result<QuotientAnnihilator, AnalysisError> {
    let alg = Arc::clone(&s.algebra);
    let window = max_loop_power(s) as usize;
    let npos = NposBasis::new(Arc::clone(&alg), window);
    // Verify I(f~) s = 0.
    let ideal = ideal_basis(Arc::clone(&alg), f_tilde, window)
        .map_err(|e| AnalysisError::InputError(e.to_string()))?;
    for gen in &ideal.elements {
        let action =
            module_action_of(s, gen).map_err(|e| AnalysisError::InputError(e.to_string()))?;
        if !action.is_zero_matrix() {
            return Err(AnalysisError::InputError(format!(
                "I(f~) does not annihilate the input: {}",
                gen.describe()
            )));
        }
    }
    // Kernel of x -> A_x as a matrix from the truncation to endomorphisms.
    let mut stacked = RationalMatrix::zero(s.dim * s.dim, npos.len());
    for i in 0..npos.len() {
        let label = npos.gen_label(i);
        let a = s
            .action(&label)
            .ok_or_else(|| AnalysisError::InputError(format!("missing generator {label}")))?;
        for (r, c, val) in a.entries() {
            stacked.set(r * s.dim + c, i, val.clone());
        }
    }
    let mut kernel = Subspace::zero(npos.len());
    for vec in nullspace(&stacked) {
        kernel.insert(vec);
    }
    Ok(QuotientAnnihilator {
        kernel,
        window,
        contains_ideal: true,
    })
}

/// Result of the classification of a finite-dimensional irreducible module
/// over the positive part: the recovered character, dominant weights and
/// points, plus an explicit verified intertwiner to the rebuilt module.
#[derive(Clone, Debug)]
pub struct Classification {
    pub eta: EtaHom,
    pub lambdas: Vec<Weight>,
    pub points: Vec<Q>,
    pub intertwiner: RationalMatrix,
}

impl Classification {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "classify_nplus_module",
            "eta": self.eta.to_json(),
            "lambda": self.lambdas.iter().map(Weight::to_json).collect::<Vec<_>>(),
            "points": crate::linalg::vec_to_json(&self.points),
        })
    }
}

/// Classifies a finite-dimensional irreducible module over the truncated
/// positive part annihilated by `I(f~)`: factors `f~` over the rationals,
/// splits the action through the evaluation components, reads off the
/// highest weight at every nonzero point and the character on the nilpotent
/// block, and certifies the answer with an explicit intertwiner against the
/// rebuilt module.
pub fn classify_nplus_module(
    s: &ModuleRep,
    f_tilde: &Poly,
) -> Result<Classification, AnalysisError> {
    let alg = Arc::clone(&s.algebra);
    let window = max_loop_power(s) as usize;

    // Rational factorization with multiplicities.
    let (roots, rest) = f_tilde.rational_roots();
    if rest.degree() > 0 {
        return Err(AnalysisError::Unsupported(format!(
            "irrational factor {rest} in the annihilator polynomial"
        )));
    }
    let zero_mult = roots
        .iter()
        .find(|(r, _)| r.is_zero())
        .map(|(_, m)| *m)
        .unwrap_or(0);
    let nonzero_points: Vec<Q> = roots
        .iter()
        .filter(|(r, _)| !r.is_zero())
        .map(|(r, _)| r.clone())
        .collect();
    let m = nonzero_points.len();

    // Input checks: irreducible, annihilated by I(f~) and by I(t f_red).
    let cert = super::is_irreducible(s)?;
    if !cert.irreducible {
        return Err(AnalysisError::InputError(
            "classification needs an irreducible input".into(),
        ));
    }
    let _ = annihilator_in_quotient(s, f_tilde)?;
    let f_red = Poly::from_roots(&nonzero_points);
    let reduced_ideal_gen = f_red.shift(1);
    if reduced_ideal_gen.degree() + 1 > window {
        return Err(AnalysisError::InputError(format!(
            "window {window} too small for the reduced ideal of degree {}",
            reduced_ideal_gen.degree()
        )));
    }
    let ideal = ideal_basis(Arc::clone(&alg), &reduced_ideal_gen, window)
        .map_err(|e| AnalysisError::InputError(e.to_string()))?;
    for gen in &ideal.elements {
        let action =
            module_action_of(s, gen).map_err(|e| AnalysisError::InputError(e.to_string()))?;
        if !action.is_zero_matrix() {
            return Err(AnalysisError::InputError(
                "I(t f_red) does not annihilate the input".into(),
            ));
        }
    }

    // Per-point evaluation components through interpolation polynomials.
    let mut lambdas = Vec::with_capacity(m);
    for i in 0..m {
        let component = |basis: usize| -> Result<RationalMatrix, AnalysisError> {
            let q = interpolation_poly(&nonzero_points, i, &alg, basis);
            let elem = crate::affine::AffineElement::from_polynomial(Arc::clone(&alg), basis, &q);
            module_action_of(s, &elem).map_err(|e| AnalysisError::InputError(e.to_string()))
        };
        // Highest weight space: joint kernel of the raising component.
        let mut stacked_rows = Vec::new();
        for root in 0..alg.num_positive_roots() {
            let a = component(alg.e_index(root))?;
            stacked_rows.push(a);
        }
        let mut stack = RationalMatrix::zero(s.dim * stacked_rows.len(), s.dim);
        for (block, a) in stacked_rows.iter().enumerate() {
            for (r, c, v) in a.entries() {
                stack.set(block * s.dim + r, c, v.clone());
            }
        }
        let hw_space = nullspace(&stack);
        let hw = hw_space.first().ok_or_else(|| {
            AnalysisError::CheckFailed(format!("no highest weight vector at point {i}"))
        })?;
        // Read the weight off the Cartan component action.
        let mut coords = Vec::with_capacity(alg.rank);
        for j in 0..alg.rank {
            let a = component(alg.cartan_index(j))?;
            let img = a.mul_vec(hw).map_err(lin_err)?;
            let k = hw
                .iter()
                .position(|x| !x.is_zero())
                .expect("nullspace vectors are nonzero");
            let c = &img[k] / &hw[k];
            // Consistency: hw really is an eigenvector.
            for (x, y) in img.iter().zip(hw) {
                if x != &(y * &c) {
                    return Err(AnalysisError::CheckFailed(
                        "highest weight space is not a joint eigenspace".into(),
                    ));
                }
            }
            coords.push(c);
        }
        let weight = Weight(coords);
        if !weight.is_dominant_integral() {
            return Err(AnalysisError::CheckFailed(format!(
                "recovered weight {weight} is not dominant integral"
            )));
        }
        lambdas.push(weight);
    }

    // The character on the nilpotent block.
    let mut eta = EtaHom::zero(alg.rank);
    if zero_mult > 0 {
        let q0 = if m == 0 {
            Poly::one()
        } else {
            let c = f_red.eval(&Q::zero());
            f_red.scale(&c.recip())
        };
        let scalar_of = |elem: &crate::affine::AffineElement| -> Result<Q, AnalysisError> {
            let a = module_action_of(s, elem)
                .map_err(|e| AnalysisError::InputError(e.to_string()))?;
            let c = a.get(0, 0);
            if a != RationalMatrix::identity(s.dim).scale(&c) {
                return Err(AnalysisError::InputError(
                    "nilpotent block acts non-scalar on an irreducible input".into(),
                ));
            }
            Ok(c)
        };
        for (j, &root) in alg.simple_root_indices().iter().enumerate() {
            let elem = crate::affine::AffineElement::from_polynomial(
                Arc::clone(&alg),
                alg.e_index(root),
                &q0,
            );
            eta.simple_values[j] = scalar_of(&elem)?;
        }
        let elem = crate::affine::AffineElement::from_polynomial(
            Arc::clone(&alg),
            alg.f_index(alg.theta),
            &q0.shift(1),
        );
        eta.affine_value = scalar_of(&elem)?;
    }

    // Drop trivial factors: zero weights contribute nothing.
    let mut final_lambdas = Vec::new();
    let mut final_points = Vec::new();
    for (l, a) in lambdas.into_iter().zip(nonzero_points) {
        if !l.is_zero() {
            final_lambdas.push(l);
            final_points.push(a);
        }
    }

    // Round-trip: rebuild and produce an explicit intertwiner.
    let rebuilt_points = PointConfiguration::new(final_points.clone())
        .map_err(|e| AnalysisError::InputError(e.to_string()))?;
    let rebuilt = build_s_module(
        Arc::clone(&alg),
        &eta,
        &final_lambdas,
        &rebuilt_points,
        Some(window),
    )
    .map_err(|e| AnalysisError::InputError(e.to_string()))?;
    if rebuilt.dim != s.dim {
        return Err(AnalysisError::CheckFailed(format!(
            "rebuilt module dimension {} disagrees with input {}",
            rebuilt.dim, s.dim
        )));
    }
    let intertwiner = find_intertwiner(s, &rebuilt)?;
    Ok(Classification {
        eta,
        lambdas: final_lambdas,
        points: final_points,
        intertwiner,
    })
}

/// Interpolation polynomial `q` with `q(a_j) = delta_{ij}`, a vanishing
/// constant term, and the t-coefficient forced to zero on Cartan and
/// lowering directions (so the class is purely the i-th evaluation
/// component).
fn interpolation_poly(
    points: &[Q],
    i: usize,
    alg: &crate::lie::LieAlgebraData,
    basis: usize,
) -> Poly {
    let power = match alg.basis_kind(basis) {
        BasisKind::PositiveRoot(_) => 1usize,
        _ => 2usize,
    };
    // q = t^power * r(t) with r(a_j) = delta_ij / a_j^power.
    let mut r = Poly::one();
    for (j, a) in points.iter().enumerate() {
        if j != i {
            r = r.mul(&Poly::linear_root(a));
        }
    }
    let denom = r.eval(&points[i]) * points[i].pow(power as i32);
    r.scale(&denom.recip()).shift(power)
}

/// Solves for an invertible intertwiner `T` with `T A_x = B_x T` on every
/// common generator label, verifying the result exactly.
pub fn find_intertwiner(
    from: &ModuleRep,
    to: &ModuleRep,
) -> Result<RationalMatrix, AnalysisError> {
    let n = from.dim;
    if to.dim != n {
        return Err(AnalysisError::DimensionMismatch(format!(
            "{} vs {}",
            n, to.dim
        )));
    }
    let labels: Vec<GenLabel> = from
        .labels()
        .filter(|l| to.action(l).is_some())
        .copied()
        .collect();
    if labels.is_empty() {
        return Err(AnalysisError::InputError("no common generators".into()));
    }
    // Constraints (B T - T A)[r, c] = 0, unknowns T[i, j] at index i n + j.
    let mut rows: Vec<Vec<(usize, Q)>> = Vec::new();
    for label in &labels {
        let a = from.action(label).unwrap();
        let b = to.action(label).unwrap();
        for r in 0..n {
            for c in 0..n {
                let mut row: Vec<(usize, Q)> = Vec::new();
                for (k, bv) in b.row_sparse(r) {
                    row.push((k * n + c, bv.clone()));
                }
                for k in 0..n {
                    let av = a.get(k, c);
                    if !av.is_zero() {
                        row.push((r * n + k, -av));
                    }
                }
                row.sort_by_key(|(j, _)| *j);
                // Merge duplicates.
                let mut merged: Vec<(usize, Q)> = Vec::new();
                for (j, v) in row {
                    match merged.last_mut() {
                        Some((jj, vv)) if *jj == j => *vv = &*vv + &v,
                        _ => merged.push((j, v)),
                    }
                }
                merged.retain(|(_, v)| !v.is_zero());
                if !merged.is_empty() {
                    rows.push(merged);
                }
            }
        }
    }
    let mut system = RationalMatrix::zero(rows.len(), n * n);
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row {
            system.add_to(r, c, v);
        }
    }
    for candidate in nullspace(&system) {
        let t = RationalMatrix::from_dense(
            (0..n)
                .map(|i| candidate[i * n..(i + 1) * n].to_vec())
                .collect(),
        );
        if crate::linalg::rank(&t) != n {
            continue;
        }
        for label in &labels {
            let a = from.action(label).unwrap();
            let b = to.action(label).unwrap();
            let lhs = t.matmul(a).map_err(lin_err)?;
            let rhs = b.matmul(&t).map_err(lin_err)?;
            if lhs != rhs {
                return Err(AnalysisError::CheckFailed(
                    "intertwiner candidate failed re-verification".into(),
                ));
            }
        }
        return Ok(t);
    }
    Err(AnalysisError::CheckFailed(
        "no invertible intertwiner exists".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_simple_lie_algebra, Series};
    use crate::modules::build_evaluation_module;
    use crate::rational::{qi, qr};

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
    fn closure_on_single_point_evaluation() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), Some(5)).unwrap();
        let vplus = vec![qi(1), qi(0)];
        let result = locally_finite_closure(&e.rep, &vplus).unwrap();
        // e kills v+, so the raising ideal is everything: f = 1.
        assert_eq!(result.root_poly(true, 0).unwrap(), &Poly::one());
        // Lowering ideal: t(t - 2).
        assert_eq!(
            result.root_poly(false, 0).unwrap(),
            &Poly::from_roots(&[qi(0), qi(2)])
        );
        assert_eq!(result.f_tilde, Poly::from_roots(&[qi(0), qi(2)]));
        // W is the whole two-dimensional module.
        assert!(result.closure.is_full());
        assert!(result.annihilation_verified);
        // f = f~^2 / t = t (t-2)^2.
        assert_eq!(
            result.f,
            Poly::from_roots(&[qi(0), qi(2), qi(2)])
        );
        assert_eq!(result.p, 3);
    }

    #[test]
    fn closure_on_trivial_module() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[0]), &pts(&[5]), Some(4)).unwrap();
        let result = locally_finite_closure(&e.rep, &[qi(1)]).unwrap();
        assert_eq!(result.closure.dim(), 1);
        assert_eq!(result.f_tilde, Poly::monomial(qi(1), 1));
        assert!(result.annihilation_verified);
    }

    #[test]
    fn closure_on_two_point_evaluation() {
        let g = sl2();
        let e =
            build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), Some(7)).unwrap();
        let mut vpp = vec![qi(0); 4];
        vpp[0] = qi(1);
        let result = locally_finite_closure(&e.rep, &vpp).unwrap();
        // f~ divides t(t-1)(t-2).
        let t012 = Poly::from_roots(&[qi(0), qi(1), qi(2)]);
        assert!(result.f_tilde.divides(&t012));
        assert!(result.closure.dim() > 0);
        assert!(result.annihilation_verified);
    }

    #[test]
    fn joint_eigenvector_is_found_in_orbit() {
        let g = sl2();
        let e =
            build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), Some(7)).unwrap();
        // Start from a non-eigenvector mix.
        let mix = vec![qi(1), qi(1), qi(2), qi(0)];
        let result = locally_finite_closure(&e.rep, &mix).unwrap();
        let h1 = e
            .rep
            .action(&GenLabel::loop_gen(g.cartan_index(0), 1))
            .unwrap();
        let img = h1.mul_vec(&result.eigenvector).unwrap();
        // Eigenvector property: img is a rational multiple of the vector.
        let k = result
            .eigenvector
            .iter()
            .position(|x| !x.is_zero())
            .unwrap();
        let c = &img[k] / &result.eigenvector[k];
        for (x, y) in img.iter().zip(&result.eigenvector) {
            assert_eq!(x, &(y * &c));
        }
    }

    #[test]
    fn annihilator_of_pullback_is_shifted_ideal() {
        // The V(1)-pullback through evaluation at 2, regarded modulo
        // I((t-2)^2): its annihilator is exactly I(t-2) on the truncation.
        let g = sl2();
        let eta = EtaHom::zero(1);
        let s = build_s_module(Arc::clone(&g), &eta, &w(&[1]), &pts(&[2]), Some(4)).unwrap();
        let f2 = Poly::from_roots(&[qi(2), qi(2)]);
        let ann = annihilator_in_quotient(&s, &f2).unwrap();
        let predicted = ideal_basis(Arc::clone(&g), &Poly::linear_root(&qi(2)), 4).unwrap();
        assert_eq!(&ann.kernel, predicted.subspace());
    }

    #[test]
    fn annihilator_of_eta_line_contains_displayed_space() {
        let g = sl2();
        let eta = EtaHom {
            simple_values: vec![qi(1)],
            affine_value: qi(2),
        };
        let empty = PointConfiguration::new(vec![]).unwrap();
        let s = build_s_module(Arc::clone(&g), &eta, &[], &empty, Some(4)).unwrap();
        let ann = annihilator_in_quotient(&s, &Poly::monomial(qi(1), 2)).unwrap();
        let npos = NposBasis::new(Arc::clone(&g), 4);
        // For sl2 the displayed annihilator space is
        // e (x) <t> + f (x) <t^2> + h (x) <t>.
        for k in 1..=4i64 {
            let e_elem = crate::affine::AffineElement::basis_term(Arc::clone(&g), g.e_index(0), k);
            assert!(ann.kernel.contains(&npos.coordinates(&e_elem).unwrap()));
            let h_elem =
                crate::affine::AffineElement::basis_term(Arc::clone(&g), g.cartan_index(0), k);
            assert!(ann.kernel.contains(&npos.coordinates(&h_elem).unwrap()));
        }
        for k in 2..=4i64 {
            let f_elem = crate::affine::AffineElement::basis_term(Arc::clone(&g), g.f_index(0), k);
            assert!(ann.kernel.contains(&npos.coordinates(&f_elem).unwrap()));
        }
        // f (x) t acts by the nonzero affine value, so it is not annihilated.
        let ft = crate::affine::AffineElement::basis_term(Arc::clone(&g), g.f_index(0), 1);
        assert!(!ann.kernel.contains(&npos.coordinates(&ft).unwrap()));
    }

    #[test]
    fn annihilator_rejects_wrong_ideal() {
        let g = sl2();
        let eta = EtaHom::zero(1);
        let s = build_s_module(Arc::clone(&g), &eta, &w(&[1]), &pts(&[2]), Some(4)).unwrap();
        // I((t-3)^2) does not annihilate the evaluation at 2.
        let wrong = Poly::from_roots(&[qi(3), qi(3)]);
        assert!(annihilator_in_quotient(&s, &wrong).is_err());
    }

    #[test]
    fn classification_round_trip_single_point() {
        let g = sl2();
        let eta = EtaHom {
            simple_values: vec![qi(1)],
            affine_value: qi(0),
        };
        let s = build_s_module(Arc::clone(&g), &eta, &w(&[1]), &pts(&[3]), None).unwrap();
        // f~ = t (t - 3): the character lives at zero, the module at 3.
        let f = Poly::from_roots(&[qi(0), qi(3)]);
        let result = classify_nplus_module(&s, &f).unwrap();
        assert_eq!(result.eta, eta);
        assert_eq!(result.lambdas, w(&[1]));
        assert_eq!(result.points, vec![qi(3)]);
    }

    #[test]
    fn classification_of_evaluation_restriction() {
        let g = sl2();
        let zero = EtaHom::zero(1);
        let s = build_s_module(Arc::clone(&g), &zero, &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        let f = Poly::from_roots(&[qi(1), qi(2)]);
        let result = classify_nplus_module(&s, &f).unwrap();
        assert!(result.eta.is_zero());
        assert_eq!(result.lambdas, w(&[1, 1]));
        assert_eq!(result.points, vec![qi(1), qi(2)]);
    }

    #[test]
    fn classification_one_dimensional_eta_module() {
        let g = sl2();
        let eta = EtaHom {
            simple_values: vec![qr(3, 2)],
            affine_value: qi(5),
        };
        let empty = PointConfiguration::new(vec![]).unwrap();
        let s = build_s_module(Arc::clone(&g), &eta, &[], &empty, Some(3)).unwrap();
        let result = classify_nplus_module(&s, &Poly::monomial(qi(1), 2)).unwrap();
        assert!(result.lambdas.is_empty());
        assert_eq!(result.eta, eta);
    }

    #[test]
    fn classification_rejects_irrational_points() {
        let g = sl2();
        let zero = EtaHom::zero(1);
        let s = build_s_module(Arc::clone(&g), &zero, &w(&[1]), &pts(&[2]), None).unwrap();
        // t^2 - 2 has no rational roots.
        let f = Poly::new(vec![qi(-2), qi(0), qi(1)]);
        assert!(matches!(
            classify_nplus_module(&s, &f),
            Err(AnalysisError::Unsupported(_))
        ));
    }

    #[test]
    fn classification_rejects_reducible_input() {
        let g = sl2();
        let zero = EtaHom::zero(1);
        let s = build_s_module(Arc::clone(&g), &zero, &w(&[1]), &pts(&[2]), None).unwrap();
        let sum = s.direct_sum(&s).unwrap();
        let f = Poly::from_roots(&[qi(2)]);
        assert!(matches!(
            classify_nplus_module(&sum, &f),
            Err(AnalysisError::InputError(_))
        ));
    }
}
