//! Finite-dimensional representations given by one exact action matrix per
//! generator, together with the bracket-compatibility check that makes a
//! table of matrices an actual module.

use num::Zero;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{FormatError, LieError};
use crate::lie::{LieAlgebraData, Weight};
use crate::linalg::RationalMatrix;
use crate::rational::{qi, Q};

/// Label of an acting generator of the affine algebra: a loop element
/// `x_b (x) t^k`, the central element `K`, or the derivation `d`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GenLabel {
    Loop { basis: usize, power: i64 },
    CentralK,
    DerivationD,
}

impl GenLabel {
    pub fn loop_gen(basis: usize, power: i64) -> Self {
        GenLabel::Loop { basis, power }
    }

    pub fn to_json(&self) -> Value {
        match self {
            GenLabel::Loop { basis, power } => json!({ "loop": [basis, power] }),
            GenLabel::CentralK => Value::String("K".into()),
            GenLabel::DerivationD => Value::String("d".into()),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        if let Some(s) = v.as_str() {
            return match s {
                "K" => Ok(GenLabel::CentralK),
                "d" => Ok(GenLabel::DerivationD),
                other => Err(FormatError::BadJson(format!("generator label {other:?}"))),
            };
        }
        let pair = v
            .get("loop")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| FormatError::BadJson("generator label".into()))?;
        let basis = pair[0]
            .as_u64()
            .ok_or_else(|| FormatError::BadJson("loop basis index".into()))?
            as usize;
        let power = pair[1]
            .as_i64()
            .ok_or_else(|| FormatError::BadJson("loop power".into()))?;
        Ok(GenLabel::Loop { basis, power })
    }

    pub fn describe(&self, alg: &LieAlgebraData) -> String {
        match self {
            GenLabel::Loop { basis, power } => {
                format!("{}@{}", alg.basis_labels[*basis], power)
            }
            GenLabel::CentralK => "K".into(),
            GenLabel::DerivationD => "d".into(),
        }
    }
}

impl fmt::Display for GenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenLabel::Loop { basis, power } => write!(f, "x{}@{}", basis, power),
            GenLabel::CentralK => write!(f, "K"),
            GenLabel::DerivationD => write!(f, "d"),
        }
    }
}

/// A finite-dimensional module: labeled basis plus one sparse exact action
/// matrix per generator label.
#[derive(Clone, Debug)]
pub struct ModuleRep {
    pub algebra: Arc<LieAlgebraData>,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    actions: BTreeMap<GenLabel, RationalMatrix>,
    /// Optional weight label per basis vector (joint Cartan eigenvalues).
    pub weights: Option<Vec<Weight>>,
}

impl ModuleRep {
    pub fn new(algebra: Arc<LieAlgebraData>, dim: usize, basis_labels: Vec<String>) -> Self {
        assert_eq!(basis_labels.len(), dim);
        ModuleRep {
            algebra,
            dim,
            basis_labels,
            actions: BTreeMap::new(),
            weights: None,
        }
    }

    pub fn insert_action(&mut self, label: GenLabel, matrix: RationalMatrix) {
        assert_eq!(matrix.rows(), self.dim);
        assert_eq!(matrix.cols(), self.dim);
        self.actions.insert(label, matrix);
    }

    pub fn action(&self, label: &GenLabel) -> Option<&RationalMatrix> {
        self.actions.get(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &GenLabel> {
        self.actions.keys()
    }

    pub fn actions(&self) -> impl Iterator<Item = (&GenLabel, &RationalMatrix)> {
        self.actions.iter()
    }

    pub fn num_generators(&self) -> usize {
        self.actions.len()
    }

    /// Module with actions restricted to the labels accepted by `keep`.
    pub fn restrict_generators<F: Fn(&GenLabel) -> bool>(&self, keep: F) -> ModuleRep {
        let mut out = ModuleRep::new(
            Arc::clone(&self.algebra),
            self.dim,
            self.basis_labels.clone(),
        );
        out.weights = self.weights.clone();
        for (label, matrix) in &self.actions {
            if keep(label) {
                out.actions.insert(*label, matrix.clone());
            }
        }
        out
    }

    /// Direct sum of two modules over the same generator set.
    pub fn direct_sum(&self, other: &ModuleRep) -> Result<ModuleRep, LieError> {
        if !self.algebra.same_algebra(&other.algebra) {
            return Err(LieError::AlgebraMismatch(
                self.algebra.tag(),
                other.algebra.tag(),
            ));
        }
        let dim = self.dim + other.dim;
        let mut labels = self.basis_labels.clone();
        labels.extend(other.basis_labels.iter().map(|l| format!("{l}'")));
        let mut out = ModuleRep::new(Arc::clone(&self.algebra), dim, labels);
        for (label, a) in &self.actions {
            let Some(b) = other.actions.get(label) else {
                continue;
            };
            let mut m = RationalMatrix::zero(dim, dim);
            for (r, c, v) in a.entries() {
                m.set(r, c, v.clone());
            }
            for (r, c, v) in b.entries() {
                m.set(self.dim + r, self.dim + c, v.clone());
            }
            out.actions.insert(*label, m);
        }
        Ok(out)
    }

    /// Checks `[A_x, A_y] = A_{[x,y]} + central term` for every pair of
    /// stored labels whose bracket is expressible with the stored labels.
    /// Returns the number of verified pairs.
    pub fn check_bracket_compatibility(&self) -> Result<usize, LieError> {
        let alg = &self.algebra;
        let labels: Vec<GenLabel> = self.actions.keys().copied().collect();
        let mut checked = 0;
        for (i, la) in labels.iter().enumerate() {
            for lb in labels.iter().skip(i + 1) {
                let Some(expected) = self.bracket_action(la, lb) else {
                    continue;
                };
                let a = &self.actions[la];
                let b = &self.actions[lb];
                let comm = a
                    .commutator(b)
                    .map_err(|e| LieError::Structural(e.to_string()))?;
                if comm != expected {
                    return Err(LieError::Structural(format!(
                        "bracket relation fails for [{}, {}]",
                        la.describe(alg),
                        lb.describe(alg)
                    )));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// Expected action matrix of `[a, b]`, if all needed labels are stored.
    fn bracket_action(&self, a: &GenLabel, b: &GenLabel) -> Option<RationalMatrix> {
        let alg = &self.algebra;
        match (a, b) {
            (GenLabel::CentralK, _) | (_, GenLabel::CentralK) => {
                Some(RationalMatrix::zero(self.dim, self.dim))
            }
            (GenLabel::DerivationD, GenLabel::Loop { basis, power }) => Some(
                self.actions
                    .get(&GenLabel::loop_gen(*basis, *power))?
                    .scale(&qi(*power)),
            ),
            (GenLabel::Loop { basis, power }, GenLabel::DerivationD) => Some(
                self.actions
                    .get(&GenLabel::loop_gen(*basis, *power))?
                    .scale(&qi(-*power)),
            ),
            (
                GenLabel::Loop {
                    basis: b1,
                    power: k1,
                },
                GenLabel::Loop {
                    basis: b2,
                    power: k2,
                },
            ) => {
                let mut expected = RationalMatrix::zero(self.dim, self.dim);
                for (c, coef) in alg.bracket_basis(*b1, *b2) {
                    let m = self.actions.get(&GenLabel::loop_gen(*c, k1 + k2))?;
                    expected = expected.add(&m.scale(coef)).ok()?;
                }
                if k1 + k2 == 0 && *k1 != 0 {
                    let central = &alg.killing[*b1][*b2] * qi(*k1);
                    if !central.is_zero() {
                        let mk = self.actions.get(&GenLabel::CentralK)?;
                        expected = expected.add(&mk.scale(&central)).ok()?;
                    }
                }
                Some(expected)
            }
            (GenLabel::DerivationD, GenLabel::DerivationD) => {
                Some(RationalMatrix::zero(self.dim, self.dim))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra.to_json(),
            "dim": self.dim,
            "basis_labels": self.basis_labels,
            "weights": self.weights.as_ref().map(|ws| {
                ws.iter().map(Weight::to_json).collect::<Vec<_>>()
            }),
            "generators": self.actions.iter().map(|(label, m)| {
                json!({ "label": label.to_json(), "matrix": m.to_json() })
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let algebra = LieAlgebraData::from_json(
            v.get("algebra")
                .ok_or_else(|| FormatError::BadJson("module.algebra".into()))?,
        )?;
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| FormatError::BadJson("module.dim".into()))? as usize;
        let basis_labels: Vec<String> = v
            .get("basis_labels")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("module.basis_labels".into()))?
            .iter()
            .map(|s| s.as_str().unwrap_or_default().to_string())
            .collect();
        let mut rep = ModuleRep::new(algebra, dim, basis_labels);
        if let Some(ws) = v.get("weights").and_then(Value::as_array) {
            let mut weights = Vec::with_capacity(ws.len());
            for w in ws {
                weights.push(Weight::from_json(w)?);
            }
            rep.weights = Some(weights);
        }
        let gens = v
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("module.generators".into()))?;
        for g in gens {
            let label = GenLabel::from_json(
                g.get("label")
                    .ok_or_else(|| FormatError::BadJson("generator.label".into()))?,
            )?;
            let matrix = RationalMatrix::from_json(
                g.get("matrix")
                    .ok_or_else(|| FormatError::BadJson("generator.matrix".into()))?,
            )?;
            if matrix.rows() != dim || matrix.cols() != dim {
                return Err(FormatError::BadJson("generator matrix shape".into()));
            }
            rep.actions.insert(label, matrix);
        }
        Ok(rep)
    }
}

/// Partition of the basis by joint Cartan eigenvalues.
///
/// All modules built in this crate carry weight bases, so the Cartan action
/// matrices must literally be diagonal; anything else is reported as a
/// structural error rather than silently diagonalized.
pub fn weight_decomposition(m: &ModuleRep) -> Result<Vec<(Weight, usize)>, LieError> {
    let rank = m.algebra.rank;
    let mut cartans = Vec::with_capacity(rank);
    for i in 0..rank {
        let label = GenLabel::loop_gen(m.algebra.cartan_index(i), 0);
        let a = m
            .action(&label)
            .ok_or_else(|| LieError::Structural(format!("missing Cartan action h{}", i + 1)))?;
        for (r, c, _) in a.entries() {
            if r != c {
                return Err(LieError::Structural(format!(
                    "Cartan action h{} is not diagonal on the stored basis",
                    i + 1
                )));
            }
        }
        cartans.push(a);
    }
    let mut counts: BTreeMap<Vec<Q>, usize> = BTreeMap::new();
    for j in 0..m.dim {
        let wt: Vec<Q> = cartans.iter().map(|a| a.get(j, j)).collect();
        *counts.entry(wt).or_insert(0) += 1;
    }
    let mut out: Vec<(Weight, usize)> = counts
        .into_iter()
        .map(|(coords, mult)| (Weight(coords), mult))
        .collect();
    // Highest weights first.
    out.reverse();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_simple_lie_algebra, Series};
    use crate::linalg::RationalMatrix;

    fn sl2_v1_rep() -> ModuleRep {
        let g = build_simple_lie_algebra(Series::A, 1).unwrap();
        let mut rep = ModuleRep::new(Arc::clone(&g), 2, vec!["v0".into(), "v1".into()]);
        let e = RationalMatrix::from_dense(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]);
        let f = RationalMatrix::from_dense(vec![vec![qi(0), qi(0)], vec![qi(1), qi(0)]]);
        let h = RationalMatrix::from_dense(vec![vec![qi(1), qi(0)], vec![qi(0), qi(-1)]]);
        rep.insert_action(GenLabel::loop_gen(g.e_index(0), 0), e);
        rep.insert_action(GenLabel::loop_gen(g.f_index(0), 0), f);
        rep.insert_action(GenLabel::loop_gen(g.cartan_index(0), 0), h);
        rep
    }

    #[test]
    fn bracket_compatibility_detects_errors() {
        let rep = sl2_v1_rep();
        assert!(rep.check_bracket_compatibility().unwrap() >= 3);

        let g = Arc::clone(&rep.algebra);
        let mut broken = rep.clone();
        broken.insert_action(
            GenLabel::loop_gen(g.e_index(0), 0),
            RationalMatrix::identity(2),
        );
        assert!(broken.check_bracket_compatibility().is_err());
    }

    #[test]
    fn weight_decomposition_reads_diagonals() {
        let rep = sl2_v1_rep();
        let wd = weight_decomposition(&rep).unwrap();
        assert_eq!(wd.len(), 2);
        assert_eq!(wd[0].0, Weight::from_integers(&[1]));
        assert_eq!(wd[0].1, 1);
        assert_eq!(wd[1].0, Weight::from_integers(&[-1]));
        let total: usize = wd.iter().map(|(_, m)| m).sum();
        assert_eq!(total, rep.dim);
    }

    #[test]
    fn weight_decomposition_of_trivial_module() {
        let g = build_simple_lie_algebra(Series::A, 1).unwrap();
        let mut rep = ModuleRep::new(Arc::clone(&g), 1, vec!["v".into()]);
        for b in 0..g.dim {
            rep.insert_action(GenLabel::loop_gen(b, 0), RationalMatrix::zero(1, 1));
        }
        assert_eq!(
            weight_decomposition(&rep).unwrap(),
            vec![(Weight::from_integers(&[0]), 1)]
        );
    }

    #[test]
    fn non_diagonal_cartan_is_a_structural_error() {
        let mut rep = sl2_v1_rep();
        let g = Arc::clone(&rep.algebra);
        let off = RationalMatrix::from_dense(vec![vec![qi(1), qi(1)], vec![qi(0), qi(-1)]]);
        rep.insert_action(GenLabel::loop_gen(g.cartan_index(0), 0), off);
        assert!(weight_decomposition(&rep).is_err());
    }

    #[test]
    fn module_json_round_trip() {
        let rep = sl2_v1_rep();
        let j = rep.to_json();
        let back = ModuleRep::from_json(&j).unwrap();
        assert_eq!(back.dim, rep.dim);
        for (label, m) in rep.actions() {
            assert_eq!(back.action(label).unwrap(), m);
        }
    }

    #[test]
    fn label_order_is_stable() {
        let a = GenLabel::loop_gen(0, -1);
        let b = GenLabel::loop_gen(0, 1);
        let c = GenLabel::CentralK;
        let mut v = [c, b, a];
        v.sort();
        assert_eq!(v, [a, b, c]);
    }
}
