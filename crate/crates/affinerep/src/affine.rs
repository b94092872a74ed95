//! The untwisted affine algebra: loop elements with central and derivation
//! terms, its bracket, the positive part, the ideals `I(f)`, and the
//! evaluation/CRT quotient maps.
//!
//! Laurent powers are always bounded per computation by an explicit window;
//! every identity verified here lives on a finite truncation.

use num::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{AffineError, FormatError};
use crate::lie::rep::GenLabel;
use crate::lie::{gvec_add_scaled, gvec_is_zero, gvec_zero, GVec, LieAlgebraData};
use crate::linalg::{rank, vec_from_json, vec_to_json, RationalMatrix, Subspace};
use crate::poly::Poly;
use crate::rational::{q_from_str, q_pow, q_to_string, Q};

/// Finite sum of loop terms `x (x) t^k` plus central and derivation
/// coefficients. Terms are stored by distinct power with zero coefficient
/// vectors dropped.
#[derive(Clone, Debug)]
pub struct AffineElement {
    pub algebra: Arc<LieAlgebraData>,
    loop_terms: BTreeMap<i64, GVec>,
    pub c_k: Q,
    pub c_d: Q,
}

impl PartialEq for AffineElement {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_algebra(&other.algebra)
            && self.loop_terms == other.loop_terms
            && self.c_k == other.c_k
            && self.c_d == other.c_d
    }
}

impl Eq for AffineElement {}

impl AffineElement {
    pub fn zero(algebra: Arc<LieAlgebraData>) -> Self {
        AffineElement {
            algebra,
            loop_terms: BTreeMap::new(),
            c_k: Q::zero(),
            c_d: Q::zero(),
        }
    }

    pub fn central(algebra: Arc<LieAlgebraData>) -> Self {
        let mut e = AffineElement::zero(algebra);
        e.c_k = Q::one();
        e
    }

    pub fn derivation(algebra: Arc<LieAlgebraData>) -> Self {
        let mut e = AffineElement::zero(algebra);
        e.c_d = Q::one();
        e
    }

    /// `x (x) t^power` for a coordinate vector `x`.
    pub fn from_loop(algebra: Arc<LieAlgebraData>, x: GVec, power: i64) -> Self {
        let mut e = AffineElement::zero(algebra);
        e.add_loop_term(power, x);
        e
    }

    /// `x_b (x) t^power` for a basis element.
    pub fn basis_term(algebra: Arc<LieAlgebraData>, basis: usize, power: i64) -> Self {
        let dim = algebra.dim;
        AffineElement::from_loop(algebra, crate::lie::gvec_unit(dim, basis), power)
    }

    /// `x (x) p(t)` expanded over the monomials of `p`.
    pub fn from_polynomial(algebra: Arc<LieAlgebraData>, basis: usize, p: &Poly) -> Self {
        let mut e = AffineElement::zero(Arc::clone(&algebra));
        for (k, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let mut v = gvec_zero(algebra.dim);
                v[basis] = c.clone();
                e.add_loop_term(k as i64, v);
            }
        }
        e
    }

    pub fn add_loop_term(&mut self, power: i64, x: GVec) {
        if gvec_is_zero(&x) {
            return;
        }
        match self.loop_terms.get_mut(&power) {
            Some(cur) => {
                gvec_add_scaled(cur, &Q::one(), &x);
                if gvec_is_zero(cur) {
                    self.loop_terms.remove(&power);
                }
            }
            None => {
                self.loop_terms.insert(power, x);
            }
        }
    }

    pub fn loop_terms(&self) -> impl Iterator<Item = (i64, &GVec)> {
        self.loop_terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn loop_coefficient(&self, power: i64) -> Option<&GVec> {
        self.loop_terms.get(&power)
    }

    pub fn is_zero(&self) -> bool {
        self.loop_terms.is_empty() && self.c_k.is_zero() && self.c_d.is_zero()
    }

    pub fn add(&self, other: &AffineElement) -> Result<AffineElement, AffineError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, v) in other.loop_terms() {
            out.add_loop_term(k, v.clone());
        }
        out.c_k = &out.c_k + &other.c_k;
        out.c_d = &out.c_d + &other.c_d;
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> AffineElement {
        if c.is_zero() {
            return AffineElement::zero(Arc::clone(&self.algebra));
        }
        let mut out = self.clone();
        for v in out.loop_terms.values_mut() {
            for x in v.iter_mut() {
                *x = &*x * c;
            }
        }
        out.c_k = &out.c_k * c;
        out.c_d = &out.c_d * c;
        out
    }

    fn check_same(&self, other: &AffineElement) -> Result<(), AffineError> {
        if !self.algebra.same_algebra(&other.algebra) {
            return Err(AffineError::AlgebraMismatch(format!(
                "{} vs {}",
                self.algebra.tag(),
                other.algebra.tag()
            )));
        }
        Ok(())
    }

    /// True when the element lies in the positive part: no `K` or `d`
    /// component, no negative powers, and the power-zero coefficient inside
    /// the positive nilpotent part of the finite algebra.
    pub fn in_positive_part(&self) -> bool {
        if !self.c_k.is_zero() || !self.c_d.is_zero() {
            return false;
        }
        for (k, v) in self.loop_terms() {
            if k < 0 {
                return false;
            }
            if k == 0 {
                let np = self.algebra.num_positive_roots();
                if v.iter().skip(np).any(|c| !c.is_zero()) {
                    return false;
                }
            }
        }
        true
    }

    pub fn describe(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, v) in self.loop_terms() {
            for (b, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    parts.push(format!("{} {}@{}", c, self.algebra.basis_labels[b], k));
                }
            }
        }
        if !self.c_k.is_zero() {
            parts.push(format!("{} K", self.c_k));
        }
        if !self.c_d.is_zero() {
            parts.push(format!("{} d", self.c_d));
        }
        parts.join(" + ")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "loop": self.loop_terms().map(|(k, v)| json!([vec_to_json(v), k])).collect::<Vec<_>>(),
            "K": q_to_string(&self.c_k),
            "d": q_to_string(&self.c_d),
        })
    }

    pub fn from_json(algebra: Arc<LieAlgebraData>, v: &Value) -> Result<Self, FormatError> {
        let mut out = AffineElement::zero(algebra);
        let terms = v
            .get("loop")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("affine element loop part".into()))?;
        for t in terms {
            let pair = t
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| FormatError::BadJson("loop term".into()))?;
            let coeffs = vec_from_json(&pair[0])?;
            if coeffs.len() != out.algebra.dim {
                return Err(FormatError::BadJson("loop coefficient length".into()));
            }
            let power = pair[1]
                .as_i64()
                .ok_or_else(|| FormatError::BadJson("loop power".into()))?;
            out.add_loop_term(power, coeffs);
        }
        if let Some(k) = v.get("K").and_then(Value::as_str) {
            out.c_k = q_from_str(k)?;
        }
        if let Some(d) = v.get("d").and_then(Value::as_str) {
            out.c_d = q_from_str(d)?;
        }
        Ok(out)
    }
}

/// The affine bracket
/// `[x (x) t^m, y (x) t^n] = [x,y] (x) t^{m+n} + (x|y) m delta_{m+n,0} K`
/// together with `[d, x (x) t^m] = m x (x) t^m`; `K` is central.
///
/// The invariant form in the central term is the plain Killing form.
pub fn affine_bracket(
    x: &AffineElement,
    y: &AffineElement,
) -> Result<AffineElement, AffineError> {
    affine_bracket_with_form(x, y, &Q::one())
}

/// Affine bracket with the invariant form rescaled by `form_scale`
/// (e.g. the factor normalizing the highest root to squared length two).
/// The default bracket uses scale one.
pub fn affine_bracket_with_form(
    x: &AffineElement,
    y: &AffineElement,
    form_scale: &Q,
) -> Result<AffineElement, AffineError> {
    x.check_same(y)?;
    let alg = Arc::clone(&x.algebra);
    let mut out = AffineElement::zero(Arc::clone(&alg));
    for (m, xv) in x.loop_terms() {
        for (n, yv) in y.loop_terms() {
            let b = alg.bracket_vec(xv, yv);
            out.add_loop_term(m + n, b);
            if m + n == 0 && m != 0 {
                let central = alg.killing_vec(xv, yv) * crate::rational::qi(m) * form_scale;
                out.c_k = &out.c_k + &central;
            }
        }
    }
    if !x.c_d.is_zero() {
        for (n, yv) in y.loop_terms() {
            let mut scaled = yv.clone();
            let factor = &x.c_d * crate::rational::qi(n);
            for c in scaled.iter_mut() {
                *c = &*c * &factor;
            }
            out.add_loop_term(n, scaled);
        }
    }
    if !y.c_d.is_zero() {
        for (m, xv) in x.loop_terms() {
            let mut scaled = xv.clone();
            let factor = &y.c_d * crate::rational::qi(-m);
            for c in scaled.iter_mut() {
                *c = &*c * &factor;
            }
            out.add_loop_term(m, scaled);
        }
    }
    Ok(out)
}

/// Basis bookkeeping for the degree-truncated positive part: the elements
/// `e_alpha` at degree zero followed by all of `g (x) t^k` for
/// `1 <= k <= max_degree`, degree-major and in basis order within a degree.
#[derive(Clone, Debug)]
pub struct NposBasis {
    pub algebra: Arc<LieAlgebraData>,
    pub max_degree: usize,
    elems: Vec<(usize, i64)>,
}

impl NposBasis {
    pub fn new(algebra: Arc<LieAlgebraData>, max_degree: usize) -> Self {
        let mut elems = Vec::new();
        for root in 0..algebra.num_positive_roots() {
            elems.push((algebra.e_index(root), 0));
        }
        for k in 1..=max_degree as i64 {
            for b in 0..algebra.dim {
                elems.push((b, k));
            }
        }
        NposBasis {
            algebra,
            max_degree,
            elems,
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elem(&self, i: usize) -> (usize, i64) {
        self.elems[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, i64)> {
        self.elems.iter()
    }

    pub fn gen_label(&self, i: usize) -> GenLabel {
        let (basis, power) = self.elems[i];
        GenLabel::loop_gen(basis, power)
    }

    pub fn index_of(&self, basis: usize, power: i64) -> Option<usize> {
        if power < 0 || power > self.max_degree as i64 {
            return None;
        }
        if power == 0 {
            if basis < self.algebra.num_positive_roots() {
                Some(basis)
            } else {
                None
            }
        } else {
            let np = self.algebra.num_positive_roots();
            Some(np + (power as usize - 1) * self.algebra.dim + basis)
        }
    }

    pub fn affine_element(&self, i: usize) -> AffineElement {
        let (basis, power) = self.elems[i];
        AffineElement::basis_term(Arc::clone(&self.algebra), basis, power)
    }

    /// Coordinates of an element of the positive part over this basis.
    pub fn coordinates(&self, e: &AffineElement) -> Result<Vec<Q>, AffineError> {
        if !e.in_positive_part() {
            return Err(AffineError::NotInPositivePart(e.describe()));
        }
        let mut out = vec![Q::zero(); self.len()];
        for (k, v) in e.loop_terms() {
            for (b, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let idx = self.index_of(b, k).ok_or({
                    AffineError::DegreeBoundTooSmall {
                        bound: self.max_degree,
                        need: k as usize,
                    }
                })?;
                out[idx] = c.clone();
            }
        }
        Ok(out)
    }

    pub fn element_of(&self, coords: &[Q]) -> AffineElement {
        let mut e = AffineElement::zero(Arc::clone(&self.algebra));
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                let (basis, power) = self.elems[i];
                let mut v = gvec_zero(self.algebra.dim);
                v[basis] = c.clone();
                e.add_loop_term(power, v);
            }
        }
        e
    }
}

/// Basis of the positive part up to the degree bound, in the deterministic
/// order used everywhere in the crate.
pub fn npos_basis(algebra: Arc<LieAlgebraData>, degree_bound: usize) -> Vec<AffineElement> {
    let idx = NposBasis::new(algebra, degree_bound);
    (0..idx.len()).map(|i| idx.affine_element(i)).collect()
}

/// Nonzero, pairwise-distinct evaluation points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointConfiguration(Vec<Q>);

impl PointConfiguration {
    pub fn new(points: Vec<Q>) -> Result<Self, AffineError> {
        for (i, a) in points.iter().enumerate() {
            if a.is_zero() {
                return Err(AffineError::InvalidPoints(format!("point {} is zero", i)));
            }
            for b in points.iter().skip(i + 1) {
                if a == b {
                    return Err(AffineError::InvalidPoints(format!(
                        "points must be pairwise distinct; {} repeats",
                        a
                    )));
                }
            }
        }
        Ok(PointConfiguration(points))
    }

    pub fn points(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `f_a(t) = prod (t - a_i)`.
    pub fn vanishing_poly(&self) -> Poly {
        Poly::from_roots(&self.0)
    }

    pub fn to_json(&self) -> Value {
        vec_to_json(&self.0)
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let pts = vec_from_json(v)?;
        PointConfiguration::new(pts).map_err(|e| FormatError::BadJson(e.to_string()))
    }
}

/// Explicit basis of the ideal `I(f)` of the positive part up to a degree
/// bound: `n_+ (x) <f>` plus `(h + n_-) (x) <t f>`.
#[derive(Clone, Debug)]
pub struct PolynomialIdealBasis {
    pub generator: Poly,
    pub degree_bound: usize,
    pub elements: Vec<AffineElement>,
    space: Subspace,
}

impl PolynomialIdealBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// The ideal as a subspace in `NposBasis` coordinates.
    pub fn subspace(&self) -> &Subspace {
        &self.space
    }
}

/// Materializes a spanning basis of `I(f)` intersected with degrees up to
/// the bound.
pub fn ideal_basis(
    algebra: Arc<LieAlgebraData>,
    f: &Poly,
    degree_bound: usize,
) -> Result<PolynomialIdealBasis, AffineError> {
    if f.is_zero() {
        return Err(AffineError::ZeroPolynomial);
    }
    let need = f.degree() + 1;
    if degree_bound < need {
        return Err(AffineError::DegreeBoundTooSmall {
            bound: degree_bound,
            need,
        });
    }
    let index = NposBasis::new(Arc::clone(&algebra), degree_bound);
    let mut elements = Vec::new();
    let np = algebra.num_positive_roots();
    for b in 0..algebra.dim {
        // n_+ takes multiples of f; h and n_- take multiples of t f.
        let base = if b < np { f.clone() } else { f.shift(1) };
        let mut shift = 0;
        while base.degree() + shift <= degree_bound {
            elements.push(AffineElement::from_polynomial(
                Arc::clone(&algebra),
                b,
                &base.shift(shift),
            ));
            shift += 1;
        }
    }
    let mut space = Subspace::zero(index.len());
    for e in &elements {
        space.insert(index.coordinates(e)?);
    }
    debug_assert_eq!(space.dim(), elements.len(), "ideal generators independent");
    Ok(PolynomialIdealBasis {
        generator: f.clone(),
        degree_bound,
        elements,
        space,
    })
}

/// The canonical evaluation map onto the finite algebra:
/// `x (x) g(t) -> g(a) x` with kernel `I(t - a)`.
pub fn evaluation_quotient_map(e: &AffineElement, a: &Q) -> Result<GVec, AffineError> {
    if a.is_zero() {
        return Err(AffineError::InvalidPoints(
            "evaluation point must be nonzero".into(),
        ));
    }
    if !e.in_positive_part() {
        return Err(AffineError::NotInPositivePart(e.describe()));
    }
    let mut out = gvec_zero(e.algebra.dim);
    for (k, v) in e.loop_terms() {
        let factor = q_pow(a, k).expect("nonzero point");
        gvec_add_scaled(&mut out, &factor, v);
    }
    Ok(out)
}

/// Image of an element of the positive part under the CRT decomposition:
/// the class in the nilpotent block (positive part mod `I(t)`) together
/// with the evaluations at every configuration point.
///
/// The nilpotent block has dimension `dim g`, with coordinates: constant
/// coefficients on `e_alpha` directions and `t`-coefficients on Cartan and
/// negative directions.
pub fn crt_decompose(
    e: &AffineElement,
    points: &PointConfiguration,
) -> Result<(Vec<Q>, Vec<GVec>), AffineError> {
    if !e.in_positive_part() {
        return Err(AffineError::NotInPositivePart(e.describe()));
    }
    let alg = &e.algebra;
    let np = alg.num_positive_roots();
    let mut block = vec![Q::zero(); alg.dim];
    for (k, v) in e.loop_terms() {
        if k == 0 {
            for (b, c) in v.iter().enumerate().take(np) {
                block[b] = &block[b] + c;
            }
        } else if k == 1 {
            for (b, c) in v.iter().enumerate().skip(np) {
                block[b] = &block[b] + c;
            }
        }
    }
    let mut evals = Vec::with_capacity(points.len());
    for a in points.points() {
        evals.push(evaluation_quotient_map(e, a)?);
    }
    Ok((block, evals))
}

/// Rank certificate for the truncated evaluation isomorphism: the map from
/// `g (x) {t^k, ..., t^{k+m-1}}` to `m` copies of `g` given by evaluation at
/// each configuration point has full rank `m * dim g`.
#[derive(Clone, Debug)]
pub struct TruncatedIsoReport {
    pub k: usize,
    pub points: PointConfiguration,
    pub rank: usize,
    pub expected_rank: usize,
}

impl TruncatedIsoReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.expected_rank
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "truncated_evaluation_iso",
            "k": self.k,
            "points": self.points.to_json(),
            "rank": self.rank,
            "expected_rank": self.expected_rank,
            "verdict": self.full_rank(),
        })
    }
}

pub fn verify_truncated_iso(
    algebra: Arc<LieAlgebraData>,
    k: usize,
    points: &PointConfiguration,
) -> Result<TruncatedIsoReport, AffineError> {
    let m = points.len();
    let dim = algebra.dim;
    let mut matrix = RationalMatrix::zero(m * dim, m * dim);
    for j in 0..m {
        let power = (k + j) as i64;
        for (i, a) in points.points().iter().enumerate() {
            let value = q_pow(a, power).expect("nonzero point");
            for b in 0..dim {
                matrix.add_to(i * dim + b, j * dim + b, value.clone());
            }
        }
    }
    Ok(TruncatedIsoReport {
        k,
        points: points.clone(),
        rank: rank(&matrix),
        expected_rank: m * dim,
    })
}
