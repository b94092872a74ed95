//! Exact sparse linear algebra over arbitrary-precision rationals.
//!
//! Everything downstream (brackets, module actions, spinning, algebra
//! closures) reduces to the operations here. All arithmetic is exact; there
//! is no tolerance anywhere. Subspaces are kept in reduced echelon form so
//! that equal subspaces have identical stored representations.

use num::{One, Zero};
use serde_json::{json, Value};
use std::collections::VecDeque;

use crate::error::{FormatError, LinalgError};
use crate::poly::Poly;
use crate::rational::{q_from_str, q_to_string, Q};

/// Sparse matrix over Q. Rows are kept sorted by column with no explicit
/// zeros and no duplicate positions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Q)>>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zero(n, n);
        for i in 0..n {
            m.data[i].push((i, Q::one()));
        }
        m
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<(usize, usize, Q)>,
    ) -> Result<Self, LinalgError> {
        let mut m = RationalMatrix::zero(rows, cols);
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if m.data[r].iter().any(|(j, _)| *j == c) {
                return Err(LinalgError::DimensionMismatch(format!(
                    "duplicate entry at ({r}, {c})"
                )));
            }
            if !v.is_zero() {
                m.data[r].push((c, v));
            }
        }
        for row in &mut m.data {
            row.sort_by_key(|(j, _)| *j);
        }
        Ok(m)
    }

    pub fn from_dense(rows: Vec<Vec<Q>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = RationalMatrix::zero(nrows, ncols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_zero() {
                    m.data[i].push((j, v));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.data[r]
            .iter()
            .find(|(j, _)| *j == c)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |(j, _)| *j) {
            Ok(idx) => {
                if v.is_zero() {
                    row.remove(idx);
                } else {
                    row[idx].1 = v;
                }
            }
            Err(idx) => {
                if !v.is_zero() {
                    row.insert(idx, (c, v));
                }
            }
        }
    }

    /// Adds `v` to entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, v: Q) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|row| row.is_empty())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Q)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn num_entries(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn row_sparse(&self, r: usize) -> &[(usize, Q)] {
        &self.data[r]
    }

    pub fn scale(&self, c: &Q) -> RationalMatrix {
        if c.is_zero() {
            return RationalMatrix::zero(self.rows, self.cols);
        }
        let mut m = self.clone();
        for row in &mut m.data {
            for (_, v) in row.iter_mut() {
                *v = &*v * c;
            }
        }
        m
    }

    pub fn add(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = RationalMatrix::zero(self.rows, self.cols);
        for r in 0..self.rows {
            m.data[r] = merge_axpy(&self.data[r], &Q::one(), &other.data[r]);
        }
        Ok(m)
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn matmul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = RationalMatrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc: Vec<(usize, Q)> = Vec::new();
            for (k, a) in &self.data[r] {
                acc = merge_axpy(&acc, a, &other.data[*k]);
            }
            m.data[r] = acc;
        }
        Ok(m)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Result<Vec<Q>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix {}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Q::zero(); self.rows];
        for (r, row) in self.data.iter().enumerate() {
            let mut acc = Q::zero();
            for (c, a) in row {
                if !v[*c].is_zero() {
                    acc += a * &v[*c];
                }
            }
            out[r] = acc;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zero(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            m.data[c].push((r, v.clone()));
        }
        for row in &mut m.data {
            row.sort_by_key(|(j, _)| *j);
        }
        m
    }

    pub fn trace(&self) -> Q {
        let mut t = Q::zero();
        for r in 0..self.rows.min(self.cols) {
            t += self.get(r, r);
        }
        t
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.rows];
        for (r, row) in self.data.iter().enumerate() {
            if let Ok(idx) = row.binary_search_by_key(&c, |(j, _)| *j) {
                out[r] = row[idx].1.clone();
            }
        }
        out
    }

    pub fn dense_rows(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    /// Row-major flattening, used to treat matrices as vectors of length
    /// rows*cols inside algebra closures.
    pub fn flatten(&self) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.rows * self.cols];
        for (r, c, v) in self.entries() {
            out[r * self.cols + c] = v.clone();
        }
        out
    }

    pub fn from_columns(cols: &[Vec<Q>]) -> RationalMatrix {
        let n = cols.first().map_or(0, |c| c.len());
        let mut m = RationalMatrix::zero(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    m.data[i].push((j, v.clone()));
                }
            }
        }
        for row in &mut m.data {
            row.sort_by_key(|(j, _)| *j);
        }
        m
    }

    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for (r, c, v) in self.entries() {
            entries.push(json!([r, c, q_to_string(v)]));
        }
        json!({ "rows": self.rows, "cols": self.cols, "entries": entries })
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let obj = v
            .as_object()
            .ok_or_else(|| FormatError::BadJson("matrix must be an object".into()))?;
        let rows = obj
            .get("rows")
            .and_then(Value::as_u64)
            .ok_or_else(|| FormatError::BadJson("matrix.rows".into()))? as usize;
        let cols = obj
            .get("cols")
            .and_then(Value::as_u64)
            .ok_or_else(|| FormatError::BadJson("matrix.cols".into()))? as usize;
        let raw = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("matrix.entries".into()))?;
        let mut entries = Vec::with_capacity(raw.len());
        for e in raw {
            let triple = e
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| FormatError::BadJson("matrix entry triple".into()))?;
            let r = triple[0]
                .as_u64()
                .ok_or_else(|| FormatError::BadJson("entry row".into()))? as usize;
            let c = triple[1]
                .as_u64()
                .ok_or_else(|| FormatError::BadJson("entry col".into()))? as usize;
            let q = q_from_str(
                triple[2]
                    .as_str()
                    .ok_or_else(|| FormatError::BadJson("entry value".into()))?,
            )?;
            entries.push((r, c, q));
        }
        RationalMatrix::from_entries(rows, cols, entries)
            .map_err(|e| FormatError::BadJson(e.to_string()))
    }
}

/// target + coef * source on sparse sorted rows.
fn merge_axpy(target: &[(usize, Q)], coef: &Q, source: &[(usize, Q)]) -> Vec<(usize, Q)> {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let next = match (target.get(i), source.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) => {
                if ci < cj {
                    i += 1;
                    (*ci, vi.clone())
                } else if cj < ci {
                    j += 1;
                    (*cj, vj * coef)
                } else {
                    let v = vi + &(vj * coef);
                    i += 1;
                    j += 1;
                    (*ci, v)
                }
            }
            (Some((ci, vi)), None) => {
                i += 1;
                (*ci, vi.clone())
            }
            (None, Some((cj, vj))) => {
                j += 1;
                (*cj, vj * coef)
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    out
}

/// Result of reduced row echelon computation.
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub rank: usize,
    pub reduced: RationalMatrix,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form by exact Gauss-Jordan elimination. The output is
/// the unique RREF of the input; pivot entries are 1 and pivot columns are
/// cleared above and below.
pub fn rref(m: &RationalMatrix) -> RrefResult {
    let mut rows = m.dense_rows();
    let (nr, nc) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..nc {
        if rank >= nr {
            break;
        }
        let Some(pr) = (rank..nr).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].clone().recip();
        for v in rows[rank].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        for r in 0..nr {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..nc {
                    if !rows[rank][c].is_zero() {
                        let delta = &rows[rank][c] * &factor;
                        rows[r][c] = &rows[r][c] - &delta;
                    }
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    RrefResult {
        rank,
        reduced: RationalMatrix::from_dense(rows),
        pivots,
    }
}

pub fn rank(m: &RationalMatrix) -> usize {
    rref(m).rank
}

/// Solves `a x = b` exactly. Returns `None` when the system is inconsistent.
/// Free variables are set to zero, so the solution choice is deterministic.
pub fn solve_linear(a: &RationalMatrix, b: &[Q]) -> Result<Option<Vec<Q>>, LinalgError> {
    if a.rows() != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "system {}x{} with rhs of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let mut aug = RationalMatrix::zero(a.rows(), a.cols() + 1);
    for (r, c, v) in a.entries() {
        aug.data[r].push((c, v.clone()));
    }
    for (r, v) in b.iter().enumerate() {
        if !v.is_zero() {
            aug.data[r].push((a.cols(), v.clone()));
        }
    }
    let red = rref(&aug);
    if red.pivots.contains(&a.cols()) {
        return Ok(None);
    }
    let mut x = vec![Q::zero(); a.cols()];
    for (i, &p) in red.pivots.iter().enumerate() {
        x[p] = red.reduced.get(i, a.cols());
    }
    Ok(Some(x))
}

/// Basis of the null space `{x : m x = 0}`, one vector per free column.
pub fn nullspace(m: &RationalMatrix) -> Vec<Vec<Q>> {
    let red = rref(m);
    let pivot_set: Vec<usize> = red.pivots.clone();
    let mut basis = Vec::new();
    for free in 0..m.cols() {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Q::zero(); m.cols()];
        v[free] = Q::one();
        for (i, &p) in pivot_set.iter().enumerate() {
            let coeff = red.reduced.get(i, free);
            if !coeff.is_zero() {
                v[p] = -coeff;
            }
        }
        basis.push(v);
    }
    basis
}

/// A linear subspace stored through a reduced-echelon basis, so that equal
/// subspaces compare equal as values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let mut s = Subspace::zero(ambient_dim);
        for i in 0..ambient_dim {
            let mut v = vec![Q::zero(); ambient_dim];
            v[i] = Q::one();
            s.basis.push(v);
            s.pivots.push(i);
        }
        s
    }

    pub fn from_vectors(ambient_dim: usize, vectors: &[Vec<Q>]) -> Self {
        let mut s = Subspace::zero(ambient_dim);
        for v in vectors {
            s.insert(v.clone());
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Reduces `v` against the basis in place and returns it; the result is
    /// zero exactly when `v` lies in the subspace.
    pub fn reduce(&self, mut v: Vec<Q>) -> Vec<Q> {
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = &*x - &(y * &factor);
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v.to_vec()).iter().all(Q::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Inserts a vector, maintaining reduced echelon form. Returns the new
    /// pivot column if the vector enlarged the subspace.
    pub fn insert(&mut self, v: Vec<Q>) -> Option<usize> {
        assert_eq!(v.len(), self.ambient_dim, "subspace ambient dimension");
        let mut v = self.reduce(v);
        let pivot = v.iter().position(|x| !x.is_zero())?;
        let inv = v[pivot].clone().recip();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        // Clear the new pivot column from existing rows to stay reduced.
        for row in &mut self.basis {
            if !row[pivot].is_zero() {
                let factor = row[pivot].clone();
                for (x, y) in row.iter_mut().zip(&v) {
                    if !y.is_zero() {
                        *x = &*x - &(y * &factor);
                    }
                }
            }
        }
        let at = self
            .pivots
            .binary_search(&pivot)
            .expect_err("pivot column must be new");
        self.pivots.insert(at, pivot);
        self.basis.insert(at, v);
        Some(pivot)
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` lies outside.
    /// With a reduced-echelon basis the coordinates are read off the pivot
    /// columns directly.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        let coords: Vec<Q> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut check = v.to_vec();
        for (c, row) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                for (x, y) in check.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = &*x - &(y * c);
                    }
                }
            }
        }
        if check.iter().all(Q::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient_dim": self.ambient_dim,
            "basis": self.basis.iter().map(|row| {
                Value::Array(row.iter().map(|x| Value::String(q_to_string(x))).collect())
            }).collect::<Vec<_>>(),
        })
    }
}

/// Smallest subspace containing `seed` and invariant under every operator.
///
/// The worklist is processed in FIFO order and every image is reduced against
/// the current echelon basis immediately, so the result (and the
/// intermediate memory footprint) is deterministic. Termination is guaranteed
/// because each enqueue strictly increases the subspace dimension, which is
/// bounded by the ambient dimension.
pub fn spin(seed: &[Vec<Q>], ops: &[&RationalMatrix]) -> Result<Subspace, LinalgError> {
    let ambient = seed
        .first()
        .map(|v| v.len())
        .or_else(|| ops.first().map(|m| m.cols()))
        .unwrap_or(0);
    for op in ops {
        if op.rows() != ambient || op.cols() != ambient {
            return Err(LinalgError::DimensionMismatch(format!(
                "spin operator {}x{} on ambient dimension {}",
                op.rows(),
                op.cols(),
                ambient
            )));
        }
    }
    let mut space = Subspace::zero(ambient);
    let mut queue: VecDeque<Vec<Q>> = VecDeque::new();
    for v in seed {
        if v.len() != ambient {
            return Err(LinalgError::DimensionMismatch(
                "seed vector length".to_string(),
            ));
        }
        if let Some(p) = space.insert(v.clone()) {
            let at = space.pivots.binary_search(&p).unwrap();
            queue.push_back(space.basis[at].clone());
        }
    }
    while let Some(v) = queue.pop_front() {
        for op in ops {
            let w = op.mul_vec(&v)?;
            if let Some(p) = space.insert(w) {
                let at = space.pivots.binary_search(&p).unwrap();
                queue.push_back(space.basis[at].clone());
            }
        }
    }
    Ok(space)
}

/// One element of a generated matrix algebra: the matrix, the product word
/// over generator indices that produced it, and the word length.
#[derive(Clone, Debug)]
pub struct AlgebraWord {
    pub matrix: RationalMatrix,
    pub word: Vec<usize>,
    pub degree: usize,
}

/// Basis of the unital associative algebra generated by square matrices,
/// grown breadth-first so element degrees are nondecreasing.
pub struct MatrixAlgebraBasis {
    pub n: usize,
    pub elements: Vec<AlgebraWord>,
    span: Subspace,
}

impl MatrixAlgebraBasis {
    /// Generates words up to `max_degree` (or to closure when `None`).
    pub fn generate(
        ops: &[&RationalMatrix],
        n: usize,
        max_degree: Option<usize>,
    ) -> Result<Self, LinalgError> {
        for op in ops {
            if op.rows() != n || op.cols() != n {
                return Err(LinalgError::DimensionMismatch(format!(
                    "algebra generator {}x{} on dimension {}",
                    op.rows(),
                    op.cols(),
                    n
                )));
            }
        }
        let mut span = Subspace::zero(n * n);
        let mut elements = Vec::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        let identity = RationalMatrix::identity(n);
        span.insert(identity.flatten());
        elements.push(AlgebraWord {
            matrix: identity,
            word: Vec::new(),
            degree: 0,
        });
        queue.push_back(0);
        while let Some(idx) = queue.pop_front() {
            let degree = elements[idx].degree + 1;
            if let Some(limit) = max_degree {
                if degree > limit {
                    continue;
                }
            }
            for (g, op) in ops.iter().enumerate() {
                let product = op.matmul(&elements[idx].matrix)?;
                if span.insert(product.flatten()).is_some() {
                    let mut word = vec![g];
                    word.extend(&elements[idx].word);
                    elements.push(AlgebraWord {
                        matrix: product,
                        word,
                        degree,
                    });
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        Ok(MatrixAlgebraBasis { n, elements, span })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn contains_matrix(&self, m: &RationalMatrix) -> bool {
        self.span.contains(&m.flatten())
    }
}

/// Dimension and basis of the unital algebra generated by `ops`.
pub fn algebra_closure(
    ops: &[&RationalMatrix],
    n: usize,
) -> Result<(usize, Vec<RationalMatrix>), LinalgError> {
    let basis = MatrixAlgebraBasis::generate(ops, n, None)?;
    let mats = basis.elements.iter().map(|e| e.matrix.clone()).collect();
    Ok((basis.dim(), mats))
}

/// Characteristic polynomial by the Faddeev-LeVerrier recurrence (exact).
pub fn char_poly(m: &RationalMatrix) -> Result<Poly, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::DimensionMismatch(format!(
            "characteristic polynomial of {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mk = RationalMatrix::zero(n, n);
    let mut ck = Q::one();
    for k in 1..=n {
        let shifted = mk.add(&RationalMatrix::identity(n).scale(&ck))?;
        mk = m.matmul(&shifted)?;
        ck = -(mk.trace() / Q::from_integer(k.into()));
        coeffs[n - k] = ck.clone();
    }
    Ok(Poly::new(coeffs))
}

/// All rational eigenvalues of a square matrix.
pub fn rational_eigenvalues(m: &RationalMatrix) -> Result<Vec<Q>, LinalgError> {
    let cp = char_poly(m)?;
    Ok(cp.rational_roots().0.into_iter().map(|(r, _)| r).collect())
}

/// Basis of the eigenspace `ker(m - c)`.
pub fn eigenspace(m: &RationalMatrix, c: &Q) -> Result<Vec<Vec<Q>>, LinalgError> {
    let n = m.rows();
    let shifted = m.sub(&RationalMatrix::identity(n).scale(c))?;
    Ok(nullspace(&shifted))
}

/// Restriction of `m` to an invariant subspace, written in the subspace
/// basis. `None` if the subspace is not invariant.
pub fn restrict_to_subspace(
    m: &RationalMatrix,
    sub: &Subspace,
) -> Result<Option<RationalMatrix>, LinalgError> {
    let mut cols = Vec::with_capacity(sub.dim());
    for b in sub.basis() {
        let img = m.mul_vec(b)?;
        match sub.coordinates(&img) {
            Some(c) => cols.push(c),
            None => return Ok(None),
        }
    }
    Ok(Some(RationalMatrix::from_columns(&cols)))
}

pub fn vec_to_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(q_to_string(x))).collect())
}

pub fn vec_from_json(v: &Value) -> Result<Vec<Q>, FormatError> {
    let arr = v
        .as_array()
        .ok_or_else(|| FormatError::BadJson("vector must be an array".into()))?;
    arr.iter()
        .map(|x| {
            q_from_str(
                x.as_str()
                    .ok_or_else(|| FormatError::BadJson("vector entry".into()))?,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, qr};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&x| qi(x)).collect())
                .collect(),
        )
    }

    fn qvec(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = RationalMatrix::identity(3);
        let r = rref(&id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivots, vec![0, 1, 2]);

        let z = RationalMatrix::zero(2, 2);
        let r = rref(&z);
        assert_eq!(r.rank, 0);
        assert!(r.reduced.is_zero_matrix());
    }

    #[test]
    fn rref_rank_one() {
        // Hand row-reduction: [[1,2],[2,4]] -> [[1,2],[0,0]], rank 1.
        let m = dense(&[&[1, 2], &[2, 4]]);
        let r = rref(&m);
        assert_eq!(r.rank, 1);
        assert_eq!(r.reduced, dense(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn rref_is_invariant_under_row_permutation() {
        // The reduced form is unique, so shuffling rows cannot change it.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let rows = rng.gen_range(2..5);
            let cols = rng.gen_range(1..5);
            let data: Vec<Vec<Q>> = (0..rows)
                .map(|_| (0..cols).map(|_| qi(rng.gen_range(-3..4))).collect())
                .collect();
            let m = RationalMatrix::from_dense(data.clone());
            let mut shuffled = data;
            for i in (1..shuffled.len()).rev() {
                let j = rng.gen_range(0..=i);
                shuffled.swap(i, j);
            }
            let p = RationalMatrix::from_dense(shuffled);
            assert_eq!(rref(&m).reduced, rref(&p).reduced);
        }
    }

    #[test]
    fn rref_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let m = RationalMatrix::from_dense(
                (0..rows)
                    .map(|_| {
                        (0..cols)
                            .map(|_| qr(rng.gen_range(-4..5), rng.gen_range(1..4)))
                            .collect()
                    })
                    .collect(),
            );
            let once = rref(&m);
            let twice = rref(&once.reduced);
            assert_eq!(once.reduced, twice.reduced);
            assert_eq!(once.rank, twice.rank);
        }
    }

    #[test]
    fn solve_identity_and_free_variable() {
        let id = RationalMatrix::identity(3);
        let b = qvec(&[3, -1, 2]);
        assert_eq!(solve_linear(&id, &b).unwrap().unwrap(), b);

        // [[1,1]] x = [2] -> free variable zeroed: x = [2, 0].
        let m = dense(&[&[1, 1]]);
        let x = solve_linear(&m, &qvec(&[2])).unwrap().unwrap();
        assert_eq!(x, qvec(&[2, 0]));

        // Inconsistent system.
        let m = dense(&[&[1], &[1]]);
        assert!(solve_linear(&m, &qvec(&[1, 2])).unwrap().is_none());

        assert!(solve_linear(&m, &qvec(&[1])).is_err());
    }

    #[test]
    fn solve_solutions_verify_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let m = RationalMatrix::from_dense(
                (0..rows)
                    .map(|_| (0..cols).map(|_| qi(rng.gen_range(-3..4))).collect())
                    .collect(),
            );
            let b: Vec<Q> = (0..rows).map(|_| qi(rng.gen_range(-3..4))).collect();
            if let Some(x) = solve_linear(&m, &b).unwrap() {
                assert_eq!(m.mul_vec(&x).unwrap(), b);
            }
        }
    }

    /// sl2 acting on V(1): e, f, h as 2x2 matrices in the basis (v+, v-).
    fn sl2_v1() -> (RationalMatrix, RationalMatrix, RationalMatrix) {
        let e = dense(&[&[0, 1], &[0, 0]]);
        let f = dense(&[&[0, 0], &[1, 0]]);
        let h = dense(&[&[1, 0], &[0, -1]]);
        (e, f, h)
    }

    #[test]
    fn spin_examples() {
        let (e, f, h) = sl2_v1();
        let vplus = qvec(&[1, 0]);

        // Seed spanning the ambient space stays the whole space.
        let full = spin(&[qvec(&[1, 0]), qvec(&[0, 1])], &[&e]).unwrap();
        assert!(full.is_full());

        // e kills the highest weight vector: span stays one-dimensional.
        let s = spin(std::slice::from_ref(&vplus), &[&e]).unwrap();
        assert_eq!(s.dim(), 1);

        // Closing under e, f, h reaches the whole 2-dimensional module.
        let s = spin(&[vplus], &[&e, &f, &h]).unwrap();
        assert!(s.is_full());
    }

    #[test]
    fn spin_output_is_invariant() {
        let (e, f, h) = sl2_v1();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let seed = vec![qvec(&[rng.gen_range(-2..3), rng.gen_range(-2..3)])];
            let ops = [&e, &f, &h];
            let s = spin(&seed, &ops).unwrap();
            for v in s.basis() {
                for op in ops {
                    assert!(s.contains(&op.mul_vec(v).unwrap()));
                }
            }
        }
    }

    #[test]
    fn algebra_closure_examples() {
        // No generators: only the identity.
        let (dim, basis) = algebra_closure(&[], 4).unwrap();
        assert_eq!(dim, 1);
        assert_eq!(basis[0], RationalMatrix::identity(4));

        // e, f, h on V(1) generate the full 2x2 matrix algebra.
        let (e, f, h) = sl2_v1();
        let (dim, basis) = algebra_closure(&[&e, &f, &h], 2).unwrap();
        assert_eq!(dim, 4);

        // Closure property: all pairwise products stay in the span.
        let span = Subspace::from_vectors(4, &basis.iter().map(|m| m.flatten()).collect::<Vec<_>>());
        for a in &basis {
            for b in &basis {
                assert!(span.contains(&a.matmul(b).unwrap().flatten()));
            }
        }

        // Powers of diag(1, 2) span the diagonal algebra: dimension 2.
        let d = dense(&[&[1, 0], &[0, 2]]);
        let (dim, _) = algebra_closure(&[&d], 2).unwrap();
        assert_eq!(dim, 2);
    }

    #[test]
    fn subspace_echelon_normal_form() {
        // Two different spanning sets of the same plane give identical bases.
        let a = Subspace::from_vectors(3, &[qvec(&[1, 1, 0]), qvec(&[0, 0, 1])]);
        let b = Subspace::from_vectors(3, &[qvec(&[2, 2, 2]), qvec(&[1, 1, 3])]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(a.contains(&qvec(&[3, 3, -5])));
        assert!(!a.contains(&qvec(&[1, 0, 0])));
    }

    #[test]
    fn nullspace_and_eigen() {
        let m = dense(&[&[1, 2], &[2, 4]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert_eq!(m.mul_vec(&ns[0]).unwrap(), qvec(&[0, 0]));

        let d = dense(&[&[3, 0], &[0, 5]]);
        let cp = char_poly(&d).unwrap();
        // (t-3)(t-5) = t^2 - 8t + 15
        assert_eq!(cp.coeff(0), qi(15));
        assert_eq!(cp.coeff(1), qi(-8));
        assert_eq!(cp.coeff(2), qi(1));
        let eig = rational_eigenvalues(&d).unwrap();
        assert_eq!(eig, vec![qi(3), qi(5)]);
        let es = eigenspace(&d, &qi(3)).unwrap();
        assert_eq!(es.len(), 1);
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = RationalMatrix::from_entries(
            2,
            3,
            vec![(0, 1, qr(3, 2)), (1, 0, qi(-1)), (1, 2, qr(1, 7))],
        )
        .unwrap();
        let j = m.to_json();
        let back = RationalMatrix::from_json(&j).unwrap();
        assert_eq!(m, back);
        // Canonical p/q strings appear in the serialization.
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"3/2\""));
        assert!(text.contains("\"-1/1\""));
    }

    #[test]
    fn restriction_to_invariant_subspace() {
        let (e, f, h) = sl2_v1();
        let whole = Subspace::from_vectors(2, &[qvec(&[1, 0]), qvec(&[0, 1])]);
        assert!(restrict_to_subspace(&e, &whole).unwrap().is_some());
        let line = Subspace::from_vectors(2, &[qvec(&[1, 0])]);
        // e v+ = 0 keeps the line invariant; f does not.
        assert!(restrict_to_subspace(&e, &line).unwrap().is_some());
        assert!(restrict_to_subspace(&f, &line).unwrap().is_none());
        let _ = h;
    }
}
