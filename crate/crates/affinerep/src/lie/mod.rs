//! Finite simple Lie algebras with triangular decomposition.
//!
//! Type A is realized concretely: `sl(l+1)` as traceless `(l+1) x (l+1)`
//! matrices with `e`/`f` basis vectors the elementary matrices and Cartan
//! basis `h_i = E_ii - E_{i+1,i+1}`. Structure constants come from matrix
//! commutators in this defining realization, and the Killing form is the
//! trace form of the adjoint action, so no sign conventions are guessed
//! anywhere. The Killing form is deliberately left unnormalized.

pub mod irrep;
pub mod rep;

use num::Zero;
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{FormatError, LieError};
use crate::linalg::RationalMatrix;
use crate::rational::{is_nonneg_integer, q_to_string, Q};

/// Supported series of finite simple Lie algebras.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Series {
    A,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::A => write!(f, "A"),
        }
    }
}

impl FromStr for Series {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Self, LieError> {
        match s.trim() {
            "A" | "a" => Ok(Series::A),
            other => Err(LieError::Unsupported(format!("series {other:?}"))),
        }
    }
}

/// Element of h* in fundamental-weight coordinates.
#[derive(Clone, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub struct Weight(pub Vec<Q>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![Q::zero(); rank])
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Weight(coords.iter().map(|&c| crate::rational::qi(c)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Q::is_zero)
    }

    /// Dominant integral means every fundamental coordinate is a
    /// nonnegative integer.
    pub fn is_dominant_integral(&self) -> bool {
        self.0.iter().all(is_nonneg_integer)
    }

    /// Value on the Cartan basis element `h_i`.
    pub fn on_cartan(&self, i: usize) -> Q {
        self.0[i].clone()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|c| Value::String(q_to_string(c)))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        Ok(Weight(crate::linalg::vec_from_json(v)?))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

/// Which part of the triangular decomposition a basis index lies in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisKind {
    /// `e_alpha` for the positive root with this index.
    PositiveRoot(usize),
    /// `h_i`.
    Cartan(usize),
    /// `f_alpha` for the positive root with this index.
    NegativeRoot(usize),
}

/// A finite simple Lie algebra given by exact structure constants on a
/// triangular basis `e_alpha (alpha in Delta_+), h_1..h_l, f_alpha`.
#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    pub series: Series,
    pub rank: usize,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    /// Positive roots in simple-root coordinates, sorted by height then
    /// support; the simple roots come first and the highest root last.
    pub positive_roots: Vec<Vec<i64>>,
    /// Index of the highest root theta in `positive_roots`.
    pub theta: usize,
    pub cartan_matrix: Vec<Vec<i64>>,
    /// Killing form values on basis pairs, computed as ad-traces.
    pub killing: Vec<Vec<Q>>,
    /// Sparse structure constants: `brackets[i][j]` expands `[x_i, x_j]`.
    brackets: Vec<Vec<Vec<(usize, Q)>>>,
    /// Defining (l+1) x (l+1) matrix of every basis element.
    defining: Vec<RationalMatrix>,
}

/// Dense coordinate vector of a Lie algebra element over the fixed basis.
pub type GVec = Vec<Q>;

pub fn gvec_zero(dim: usize) -> GVec {
    vec![Q::zero(); dim]
}

pub fn gvec_unit(dim: usize, idx: usize) -> GVec {
    let mut v = gvec_zero(dim);
    v[idx] = num::One::one();
    v
}

pub fn gvec_is_zero(v: &GVec) -> bool {
    v.iter().all(Q::is_zero)
}

pub fn gvec_add_scaled(target: &mut GVec, coef: &Q, source: &GVec) {
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t = &*t + &(s * coef);
        }
    }
}

impl LieAlgebraData {
    /// Short identifying tag like `A1`, used in mismatch errors.
    pub fn tag(&self) -> String {
        format!("{}{}", self.series, self.rank)
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn e_index(&self, root: usize) -> usize {
        root
    }

    pub fn cartan_index(&self, i: usize) -> usize {
        self.num_positive_roots() + i
    }

    pub fn f_index(&self, root: usize) -> usize {
        self.num_positive_roots() + self.rank + root
    }

    pub fn basis_kind(&self, idx: usize) -> BasisKind {
        let np = self.num_positive_roots();
        if idx < np {
            BasisKind::PositiveRoot(idx)
        } else if idx < np + self.rank {
            BasisKind::Cartan(idx - np)
        } else {
            BasisKind::NegativeRoot(idx - np - self.rank)
        }
    }

    /// Indices into `positive_roots` of the simple roots, in Dynkin order.
    pub fn simple_root_indices(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.rank];
        for (r, coords) in self.positive_roots.iter().enumerate() {
            if coords.iter().map(|c| c.abs()).sum::<i64>() == 1 {
                let i = coords.iter().position(|&c| c == 1).unwrap();
                out[i] = r;
            }
        }
        out
    }

    pub fn root_height(&self, root: usize) -> i64 {
        self.positive_roots[root].iter().sum()
    }

    /// `alpha(h_i)` for a positive root index.
    pub fn root_on_cartan(&self, root: usize, i: usize) -> i64 {
        self.positive_roots[root]
            .iter()
            .enumerate()
            .map(|(j, &c)| c * self.cartan_matrix[i][j])
            .sum()
    }

    /// Weight of the basis vector under `h_i` (0 on the Cartan itself).
    pub fn basis_weight_on_cartan(&self, idx: usize, i: usize) -> i64 {
        match self.basis_kind(idx) {
            BasisKind::PositiveRoot(r) => self.root_on_cartan(r, i),
            BasisKind::Cartan(_) => 0,
            BasisKind::NegativeRoot(r) => -self.root_on_cartan(r, i),
        }
    }

    /// Chevalley antiinvolution on basis indices: swaps `e_alpha` with
    /// `f_alpha` and fixes the Cartan. In the defining realization of type A
    /// this is matrix transposition.
    pub fn transpose_index(&self, idx: usize) -> usize {
        match self.basis_kind(idx) {
            BasisKind::PositiveRoot(r) => self.f_index(r),
            BasisKind::Cartan(i) => self.cartan_index(i),
            BasisKind::NegativeRoot(r) => self.e_index(r),
        }
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Q)] {
        &self.brackets[i][j]
    }

    /// Bilinear extension of the structure-constant table.
    pub fn bracket_vec(&self, x: &GVec, y: &GVec) -> GVec {
        let mut out = gvec_zero(self.dim);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let coef = a * b;
                for (k, c) in &self.brackets[i][j] {
                    out[*k] = &out[*k] + &(c * &coef);
                }
            }
        }
        out
    }

    /// Killing form on coordinate vectors.
    pub fn killing_vec(&self, x: &GVec, y: &GVec) -> Q {
        let mut out = Q::zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() || self.killing[i][j].is_zero() {
                    continue;
                }
                out += a * b * &self.killing[i][j];
            }
        }
        out
    }

    /// Adjoint action matrix of the basis element `x_i`.
    pub fn ad_matrix(&self, i: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zero(self.dim, self.dim);
        for j in 0..self.dim {
            for (k, c) in &self.brackets[i][j] {
                m.add_to(*k, j, c.clone());
            }
        }
        m
    }

    pub fn defining_matrix(&self, i: usize) -> &RationalMatrix {
        &self.defining[i]
    }

    pub fn same_algebra(&self, other: &LieAlgebraData) -> bool {
        self.series == other.series && self.rank == other.rank
    }

    pub fn to_json(&self) -> Value {
        let mut constants = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for (k, c) in &self.brackets[i][j] {
                    constants.push(json!([i, j, *k, q_to_string(c)]));
                }
            }
        }
        json!({
            "series": self.series.to_string(),
            "rank": self.rank,
            "dim": self.dim,
            "basis_labels": self.basis_labels,
            "positive_roots": self.positive_roots,
            "theta": self.theta,
            "cartan_matrix": self.cartan_matrix,
            "structure_constants": constants,
            "killing": self.killing.iter().map(|row| {
                Value::Array(row.iter().map(|x| Value::String(q_to_string(x))).collect())
            }).collect::<Vec<_>>(),
        })
    }

    /// Reconstructs the algebra from its series and rank and verifies the
    /// serialized structure constants against the rebuilt table.
    pub fn from_json(v: &Value) -> Result<Arc<Self>, FormatError> {
        let series = v
            .get("series")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::BadJson("algebra.series".into()))?;
        let rank = v
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| FormatError::BadJson("algebra.rank".into()))? as usize;
        let series: Series = series
            .parse()
            .map_err(|e: LieError| FormatError::BadJson(e.to_string()))?;
        let alg = build_simple_lie_algebra(series, rank)
            .map_err(|e| FormatError::BadJson(e.to_string()))?;
        if let Some(dim) = v.get("dim").and_then(Value::as_u64) {
            if dim as usize != alg.dim {
                return Err(FormatError::BadJson(format!(
                    "algebra dim {} does not match rebuilt {}",
                    dim, alg.dim
                )));
            }
        }
        Ok(alg)
    }
}

/// Builds the finite simple Lie algebra of the given series and rank.
///
/// Type A with rank >= 1 is supported: the defining realization is used to
/// produce all structure constants, and the Killing form matrix is computed
/// afterwards as the trace form of the adjoint action.
pub fn build_simple_lie_algebra(series: Series, rank: usize) -> Result<Arc<LieAlgebraData>, LieError> {
    match series {
        Series::A => {
            if rank < 1 {
                return Err(LieError::Unsupported("A requires rank >= 1".into()));
            }
            Ok(Arc::new(build_type_a(rank)))
        }
    }
}

fn build_type_a(rank: usize) -> LieAlgebraData {
    let n = rank + 1;
    // Positive roots alpha_{ij} = eps_i - eps_j (i < j), simple-root
    // coordinates 1 on [i, j). Sorted by height, then by start index.
    let mut positive_roots = Vec::new();
    for height in 1..n {
        for i in 0..n - height {
            let j = i + height;
            let mut coords = vec![0i64; rank];
            for c in coords.iter_mut().take(j).skip(i) {
                *c = 1;
            }
            positive_roots.push(coords);
        }
    }
    let num_pos = positive_roots.len();
    let theta = num_pos - 1;
    let dim = 2 * num_pos + rank;

    // The pair (i, j) realized by each positive root, in the same order.
    let mut root_pairs = Vec::new();
    for height in 1..n {
        for i in 0..n - height {
            root_pairs.push((i, i + height));
        }
    }

    let elementary = |i: usize, j: usize| {
        let mut m = RationalMatrix::zero(n, n);
        m.set(i, j, num::One::one());
        m
    };

    let mut defining = Vec::with_capacity(dim);
    let mut basis_labels = Vec::with_capacity(dim);
    for &(i, j) in &root_pairs {
        defining.push(elementary(i, j));
        basis_labels.push(format!("e{}{}", i + 1, j + 1));
    }
    for k in 0..rank {
        let mut m = RationalMatrix::zero(n, n);
        m.set(k, k, crate::rational::qi(1));
        m.set(k + 1, k + 1, crate::rational::qi(-1));
        defining.push(m);
        basis_labels.push(format!("h{}", k + 1));
    }
    for &(i, j) in &root_pairs {
        defining.push(elementary(j, i));
        basis_labels.push(format!("f{}{}", i + 1, j + 1));
    }

    // Expand a traceless n x n matrix over the basis.
    let expand = |m: &RationalMatrix| -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        for (idx, &(i, j)) in root_pairs.iter().enumerate() {
            let upper = m.get(i, j);
            if !upper.is_zero() {
                out.push((idx, upper));
            }
            let lower = m.get(j, i);
            if !lower.is_zero() {
                out.push((num_pos + rank + idx, lower));
            }
        }
        let mut partial = Q::zero();
        for k in 0..rank {
            partial += m.get(k, k);
            if !partial.is_zero() {
                out.push((num_pos + k, partial.clone()));
            }
        }
        out.sort_by_key(|(k, _)| *k);
        out
    };

    let mut brackets = vec![vec![Vec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let comm = defining[i].commutator(&defining[j]).unwrap();
            brackets[i][j] = expand(&comm);
        }
    }

    // Killing form as the trace form of the adjoint action.
    let mut partial = LieAlgebraData {
        series: Series::A,
        rank,
        dim,
        basis_labels,
        positive_roots,
        theta,
        cartan_matrix: cartan_matrix_a(rank),
        killing: vec![vec![Q::zero(); dim]; dim],
        brackets,
        defining,
    };
    let ads: Vec<RationalMatrix> = (0..dim).map(|i| partial.ad_matrix(i)).collect();
    for i in 0..dim {
        for j in i..dim {
            let value = ads[i].matmul(&ads[j]).unwrap().trace();
            partial.killing[i][j] = value.clone();
            partial.killing[j][i] = value;
        }
    }
    partial
}

fn cartan_matrix_a(rank: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        m[i][i] = 2;
        if i + 1 < rank {
            m[i][i + 1] = -1;
            m[i + 1][i] = -1;
        }
    }
    m
}

/// Bracket of two coordinate vectors over the same algebra.
pub fn bracket(alg: &LieAlgebraData, x: &GVec, y: &GVec) -> GVec {
    alg.bracket_vec(x, y)
}

/// Killing form value `tr(ad x . ad y)`.
pub fn killing_form(alg: &LieAlgebraData, x: &GVec, y: &GVec) -> Q {
    alg.killing_vec(x, y)
}
