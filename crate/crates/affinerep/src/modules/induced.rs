//! Truncated induced modules: highest-weight inductions, universal
//! Whittaker inductions, tensor products with evaluation modules, and
//! `d`-extensions.
//!
//! Truncations are honest: every operator carries a per-basis-vector domain
//! flag, and a flag is set only when the exact image lies inside the
//! truncation. Operators that do not raise the relevant grading (the whole
//! positive part on PBW layers, everything but `d` on `d`-layers) come out
//! total; the rest are partial at the boundary.

use num::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{FormatError, ModuleError};
use crate::lie::rep::{GenLabel, ModuleRep};
use crate::lie::LieAlgebraData;
use crate::linalg::{rank, RationalMatrix};
use crate::modules::eval::EvaluationModule;
use crate::modules::{AffineWeight, EtaHom, ModuleDescriptor};
use crate::pbw::{Monomial, PbwBasis, PbwEngine};
use crate::rational::{q_binomial, q_pow, qi, Q};

/// An action matrix valid only on the flagged part of the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAction {
    pub matrix: RationalMatrix,
    pub domain: Vec<bool>,
}

impl PartialAction {
    pub fn total(matrix: RationalMatrix) -> Self {
        let n = matrix.cols();
        PartialAction {
            matrix,
            domain: vec![true; n],
        }
    }

    pub fn is_total(&self) -> bool {
        self.domain.iter().all(|&d| d)
    }

    /// Applies the operator when the input is supported on the domain.
    pub fn apply(&self, v: &[Q]) -> Option<Vec<Q>> {
        for (x, &ok) in v.iter().zip(&self.domain) {
            if !ok && !x.is_zero() {
                return None;
            }
        }
        self.matrix.mul_vec(v).ok()
    }

    pub fn to_json(&self) -> Value {
        json!({ "matrix": self.matrix.to_json(), "domain": self.domain })
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let matrix = RationalMatrix::from_json(
            v.get("matrix")
                .ok_or_else(|| FormatError::BadJson("action.matrix".into()))?,
        )?;
        let domain = v
            .get("domain")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("action.domain".into()))?
            .iter()
            .map(|b| b.as_bool().unwrap_or(false))
            .collect();
        Ok(PartialAction { matrix, domain })
    }
}

/// How the layers of a truncation are graded.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LayerKind {
    /// Layers `d^i (x) M` of an induced module over the full algebra.
    DDegree,
    /// PBW filtration layers by monomial length.
    PbwLength,
    /// Grading by total t-degree of the lowering monomial.
    TDegree,
    /// A single layer (a plain finite-dimensional module).
    Flat,
}

impl LayerKind {
    fn as_str(&self) -> &'static str {
        match self {
            LayerKind::DDegree => "d-degree",
            LayerKind::PbwLength => "pbw-length",
            LayerKind::TDegree => "t-degree",
            LayerKind::Flat => "flat",
        }
    }

    fn from_str(s: &str) -> Result<Self, FormatError> {
        match s {
            "d-degree" => Ok(LayerKind::DDegree),
            "pbw-length" => Ok(LayerKind::PbwLength),
            "t-degree" => Ok(LayerKind::TDegree),
            "flat" => Ok(LayerKind::Flat),
            other => Err(FormatError::BadJson(format!("layer kind {other:?}"))),
        }
    }
}

/// A layered truncation of an induced module with partial action data.
#[derive(Clone, Debug)]
pub struct TruncatedInducedModule {
    pub algebra: Arc<LieAlgebraData>,
    pub dim: usize,
    pub layer_kind: LayerKind,
    pub layer_of: Vec<usize>,
    pub num_layers: usize,
    pub basis_labels: Vec<String>,
    pub cyclic_index: usize,
    pub descriptor: ModuleDescriptor,
    actions: BTreeMap<GenLabel, PartialAction>,
}

impl TruncatedInducedModule {
    pub fn new(
        algebra: Arc<LieAlgebraData>,
        layer_kind: LayerKind,
        layer_of: Vec<usize>,
        basis_labels: Vec<String>,
        descriptor: ModuleDescriptor,
    ) -> Self {
        let dim = layer_of.len();
        let num_layers = layer_of.iter().max().map_or(0, |m| m + 1);
        assert_eq!(basis_labels.len(), dim);
        TruncatedInducedModule {
            algebra,
            dim,
            layer_kind,
            layer_of,
            num_layers,
            basis_labels,
            cyclic_index: 0,
            descriptor,
            actions: BTreeMap::new(),
        }
    }

    /// Wraps a total finite-dimensional module as a single-layer truncation.
    pub fn from_module_rep(rep: &ModuleRep, descriptor: ModuleDescriptor) -> Self {
        let mut out = TruncatedInducedModule::new(
            Arc::clone(&rep.algebra),
            LayerKind::Flat,
            vec![0; rep.dim],
            rep.basis_labels.clone(),
            descriptor,
        );
        for (label, m) in rep.actions() {
            out.insert_action(*label, PartialAction::total(m.clone()));
        }
        out
    }

    pub fn insert_action(&mut self, label: GenLabel, action: PartialAction) {
        assert_eq!(action.matrix.rows(), self.dim);
        assert_eq!(action.domain.len(), self.dim);
        self.actions.insert(label, action);
    }

    pub fn action(&self, label: &GenLabel) -> Option<&PartialAction> {
        self.actions.get(label)
    }

    pub fn actions(&self) -> impl Iterator<Item = (&GenLabel, &PartialAction)> {
        self.actions.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &GenLabel> {
        self.actions.keys()
    }

    /// Labels whose action is defined on the whole truncation.
    pub fn total_labels(&self) -> Vec<GenLabel> {
        self.actions
            .iter()
            .filter(|(_, a)| a.is_total())
            .map(|(l, _)| *l)
            .collect()
    }

    pub fn total_matrices(&self) -> Vec<&RationalMatrix> {
        self.actions
            .values()
            .filter(|a| a.is_total())
            .map(|a| &a.matrix)
            .collect()
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_layers];
        for &l in &self.layer_of {
            out[l] += 1;
        }
        out
    }

    pub fn layer_indices(&self, layer: usize) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.layer_of[i] == layer).collect()
    }

    /// Verifies `[A_x, A_y] = A_{[x,y]}` column by column on the subdomain
    /// where all three sides are defined. Returns the number of verified
    /// (pair, column) instances.
    pub fn check_bracket_compatibility_on_domain(&self) -> Result<usize, ModuleError> {
        let labels: Vec<GenLabel> = self.actions.keys().copied().collect();
        let mut checked = 0usize;
        let rep_proxy = self.as_total_rep_proxy();
        for (i, la) in labels.iter().enumerate() {
            for lb in labels.iter().skip(i + 1) {
                let Some(expected) = expected_bracket(&rep_proxy, self, la, lb) else {
                    continue;
                };
                let pa = &self.actions[la];
                let pb = &self.actions[lb];
                for col in 0..self.dim {
                    if !pa.domain[col] || !pb.domain[col] || !expected.domain[col] {
                        continue;
                    }
                    let unit: Vec<Q> = (0..self.dim)
                        .map(|r| if r == col { Q::one() } else { Q::zero() })
                        .collect();
                    let Some(bv) = pb.apply(&unit) else { continue };
                    let Some(abv) = pa.apply(&bv) else { continue };
                    let Some(av) = pa.apply(&unit) else { continue };
                    let Some(bav) = pb.apply(&av) else { continue };
                    let expect = expected.matrix.column(col);
                    let got: Vec<Q> = abv
                        .iter()
                        .zip(&bav)
                        .map(|(x, y)| x - y)
                        .collect();
                    if got != expect {
                        return Err(ModuleError::Construction(format!(
                            "bracket relation fails for [{la}, {lb}] on column {col}"
                        )));
                    }
                    checked += 1;
                }
            }
        }
        Ok(checked)
    }

    fn as_total_rep_proxy(&self) -> ModuleRep {
        // Only used to share the bracket-expansion helper; matrices are not
        // read from the proxy.
        ModuleRep::new(Arc::clone(&self.algebra), 0, Vec::new())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra.to_json(),
            "dim": self.dim,
            "layer_kind": self.layer_kind.as_str(),
            "layer_of": self.layer_of,
            "basis_labels": self.basis_labels,
            "cyclic_index": self.cyclic_index,
            "descriptor": self.descriptor.to_json(),
            "generators": self.actions.iter().map(|(label, a)| {
                json!({ "label": label.to_json(), "action": a.to_json() })
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let algebra = LieAlgebraData::from_json(
            v.get("algebra")
                .ok_or_else(|| FormatError::BadJson("module.algebra".into()))?,
        )?;
        let layer_kind = LayerKind::from_str(
            v.get("layer_kind")
                .and_then(Value::as_str)
                .ok_or_else(|| FormatError::BadJson("module.layer_kind".into()))?,
        )?;
        let layer_of: Vec<usize> = v
            .get("layer_of")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("module.layer_of".into()))?
            .iter()
            .map(|x| x.as_u64().unwrap_or(0) as usize)
            .collect();
        let basis_labels: Vec<String> = v
            .get("basis_labels")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("module.basis_labels".into()))?
            .iter()
            .map(|s| s.as_str().unwrap_or_default().to_string())
            .collect();
        let descriptor = ModuleDescriptor::from_json(
            v.get("descriptor")
                .ok_or_else(|| FormatError::BadJson("module.descriptor".into()))?,
        )?;
        let mut out =
            TruncatedInducedModule::new(algebra, layer_kind, layer_of, basis_labels, descriptor);
        if let Some(c) = v.get("cyclic_index").and_then(Value::as_u64) {
            out.cyclic_index = c as usize;
        }
        for g in v
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::BadJson("module.generators".into()))?
        {
            let label = GenLabel::from_json(
                g.get("label")
                    .ok_or_else(|| FormatError::BadJson("generator.label".into()))?,
            )?;
            let action = PartialAction::from_json(
                g.get("action")
                    .ok_or_else(|| FormatError::BadJson("generator.action".into()))?,
            )?;
            out.insert_action(label, action);
        }
        Ok(out)
    }
}

/// Expected bracket action `[a, b]` as a partial action; `None` when a
/// needed label is absent.
fn expected_bracket(
    _proxy: &ModuleRep,
    m: &TruncatedInducedModule,
    a: &GenLabel,
    b: &GenLabel,
) -> Option<PartialAction> {
    let alg = &m.algebra;
    let dim = m.dim;
    match (a, b) {
        (GenLabel::CentralK, _) | (_, GenLabel::CentralK) => {
            Some(PartialAction::total(RationalMatrix::zero(dim, dim)))
        }
        (GenLabel::DerivationD, GenLabel::DerivationD) => {
            Some(PartialAction::total(RationalMatrix::zero(dim, dim)))
        }
        (GenLabel::DerivationD, GenLabel::Loop { basis, power }) => {
            let act = m.action(&GenLabel::loop_gen(*basis, *power))?;
            Some(PartialAction {
                matrix: act.matrix.scale(&qi(*power)),
                domain: act.domain.clone(),
            })
        }
        (GenLabel::Loop { basis, power }, GenLabel::DerivationD) => {
            let act = m.action(&GenLabel::loop_gen(*basis, *power))?;
            Some(PartialAction {
                matrix: act.matrix.scale(&qi(-*power)),
                domain: act.domain.clone(),
            })
        }
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
            let mut matrix = RationalMatrix::zero(dim, dim);
            let mut domain = vec![true; dim];
            for (c, coef) in alg.bracket_basis(*b1, *b2) {
                let act = m.action(&GenLabel::loop_gen(*c, k1 + k2))?;
                matrix = matrix.add(&act.matrix.scale(coef)).ok()?;
                for (d, &ok) in domain.iter_mut().zip(&act.domain) {
                    *d = *d && ok;
                }
            }
            if k1 + k2 == 0 && *k1 != 0 {
                let central = &alg.killing[*b1][*b2] * qi(*k1);
                if !central.is_zero() {
                    let act = m.action(&GenLabel::CentralK)?;
                    matrix = matrix.add(&act.matrix.scale(&central)).ok()?;
                    for (d, &ok) in domain.iter_mut().zip(&act.domain) {
                        *d = *d && ok;
                    }
                }
            }
            Some(PartialAction { matrix, domain })
        }
    }
}

/// Generator labels stored on a PBW truncation: the full loop window
/// `[-depth, depth + margin]` plus `K`.
fn pbw_generator_labels(alg: &LieAlgebraData, depth: usize, margin: usize) -> Vec<GenLabel> {
    let mut labels = Vec::new();
    for k in -(depth as i64)..=(depth + margin) as i64 {
        for basis in 0..alg.dim {
            if k == 0 {
                labels.push(GenLabel::loop_gen(basis, 0));
            } else {
                labels.push(GenLabel::loop_gen(basis, k));
            }
        }
    }
    labels.push(GenLabel::CentralK);
    labels
}

/// One-dimensional module over the positive part defined by a character.
fn eta_vacuum_rep(alg: Arc<LieAlgebraData>, eta: &EtaHom, window: usize) -> ModuleRep {
    let npos = crate::affine::NposBasis::new(Arc::clone(&alg), window);
    let mut rep = ModuleRep::new(alg, 1, vec!["u_eta".into()]);
    for i in 0..npos.len() {
        let (basis, power) = npos.elem(i);
        let value = eta.value_on_loop(&rep.algebra, basis, power);
        let mut m = RationalMatrix::zero(1, 1);
        m.set(0, 0, value);
        rep.insert_action(GenLabel::loop_gen(basis, power), m);
    }
    rep
}

/// Verma-type induction from a one-dimensional highest weight line over the
/// derived algebra, truncated at t-degree and monomial length `depth`. With
/// `simple` set, each t-degree layer is replaced by its quotient modulo the
/// radical of the contravariant form computed on the truncation.
pub fn build_hw_truncation(
    algebra: Arc<LieAlgebraData>,
    gamma: &AffineWeight,
    depth: usize,
    simple: bool,
) -> Result<TruncatedInducedModule, ModuleError> {
    build_hw_truncation_with_margin(algebra, gamma, depth, simple, 2)
}

pub fn build_hw_truncation_with_margin(
    algebra: Arc<LieAlgebraData>,
    gamma: &AffineWeight,
    depth: usize,
    simple: bool,
    margin: usize,
) -> Result<TruncatedInducedModule, ModuleError> {
    if gamma.cartan.len() != algebra.rank {
        return Err(ModuleError::Construction(format!(
            "gamma has {} Cartan values for rank {}",
            gamma.cartan.len(),
            algebra.rank
        )));
    }
    let engine = PbwEngine::new_highest_weight(
        Arc::clone(&algebra),
        depth,
        gamma.cartan.clone(),
        gamma.central.clone(),
    );
    let weights = engine.gen_weights();
    let monomials = engine.enumerate_monomials(depth, depth);
    let descriptor = ModuleDescriptor::HighestWeight {
        gamma: gamma.clone(),
        depth,
        simple,
    };

    if !simple {
        let mut by_layer: Vec<Monomial> = monomials;
        by_layer.sort_by_key(|m| (m.weight(&weights), m.factors().to_vec()));
        let layer_of: Vec<usize> = by_layer.iter().map(|m| m.weight(&weights)).collect();
        let labels: Vec<String> = by_layer.iter().map(|m| m.label(&engine)).collect();
        let basis = PbwBasis::new(by_layer, 1);
        let mut out = TruncatedInducedModule::new(
            Arc::clone(&algebra),
            LayerKind::TDegree,
            layer_of,
            labels,
            descriptor,
        );
        for label in pbw_generator_labels(&algebra, depth, margin) {
            let (matrix, domain) = basis.partial_action(&engine, &label);
            out.insert_action(label, PartialAction { matrix, domain });
        }
        return Ok(out);
    }

    // Simple quotient: group monomials by t-degree layer, compute the
    // radical of the contravariant form per layer, and push actions through
    // the per-layer projection.
    let mut layers: Vec<Vec<Monomial>> = vec![Vec::new(); depth + 1];
    for m in monomials {
        layers[m.weight(&weights)].push(m);
    }
    for layer in &mut layers {
        layer.sort_by_key(|m| m.factors().to_vec());
    }
    struct QuotLayer {
        monomials: Vec<Monomial>,
        chosen: Vec<usize>,
        offset: usize,
        gram: RationalMatrix,
    }
    let mut quots: Vec<QuotLayer> = Vec::new();
    let mut total = 0usize;
    for layer in &layers {
        let n = layer.len();
        let mut gram = RationalMatrix::zero(n, n);
        for i in 0..n {
            for j in i..n {
                let v = engine
                    .contravariant_form(&layer[i], &layer[j])
                    .ok_or_else(|| {
                        ModuleError::Construction("contravariant form left the window".into())
                    })?;
                if !v.is_zero() {
                    gram.set(i, j, v.clone());
                    gram.set(j, i, v);
                }
            }
        }
        let red = crate::linalg::rref(&gram);
        let chosen = red.pivots;
        quots.push(QuotLayer {
            monomials: layer.clone(),
            chosen,
            offset: total,
            gram,
        });
        total += red.rank;
    }

    let mut layer_of = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for (w, q) in quots.iter().enumerate() {
        for &j in &q.chosen {
            layer_of.push(w);
            labels.push(q.monomials[j].label(&engine));
        }
    }
    let mut out = TruncatedInducedModule::new(
        Arc::clone(&algebra),
        LayerKind::TDegree,
        layer_of,
        labels,
        descriptor,
    );

    let project = |q: &QuotLayer, u: &[Q]| -> Result<Vec<Q>, ModuleError> {
        if q.chosen.is_empty() {
            return Ok(Vec::new());
        }
        let rhs = q
            .gram
            .mul_vec(u)
            .map_err(|e| ModuleError::Construction(e.to_string()))?;
        let cols: Vec<Vec<Q>> = q.chosen.iter().map(|&j| q.gram.column(j)).collect();
        let system = RationalMatrix::from_columns(&cols);
        crate::linalg::solve_linear(&system, &rhs)
            .map_err(|e| ModuleError::Construction(e.to_string()))?
            .ok_or_else(|| ModuleError::Construction("radical projection inconsistent".into()))
    };

    for label in pbw_generator_labels(&algebra, depth, margin) {
        let mut matrix = RationalMatrix::zero(total, total);
        let mut domain = vec![false; total];
        let mut col = 0usize;
        for q in &quots {
            for &j in &q.chosen {
                let image = engine.act(&label, &q.monomials[j], 0);
                let ok = (|| -> Option<Vec<(usize, Q)>> {
                    let image = image?;
                    let mut grouped: BTreeMap<usize, Vec<(Monomial, Q)>> = BTreeMap::new();
                    for ((m, _), c) in image {
                        grouped.entry(m.weight(&weights)).or_default().push((m, c));
                    }
                    let mut entries = Vec::new();
                    for (w, terms) in grouped {
                        if w >= quots.len() {
                            return None;
                        }
                        let target = &quots[w];
                        if target.chosen.is_empty() {
                            continue;
                        }
                        let mut u = vec![Q::zero(); target.monomials.len()];
                        for (m, c) in terms {
                            let pos = target.monomials.iter().position(|x| *x == m)?;
                            u[pos] = c;
                        }
                        let coords = project(target, &u).ok()?;
                        for (k, c) in coords.into_iter().enumerate() {
                            if !c.is_zero() {
                                entries.push((target.offset + k, c));
                            }
                        }
                    }
                    Some(entries)
                })();
                if let Some(entries) = ok {
                    for (r, c) in entries {
                        matrix.add_to(r, col, c);
                    }
                    domain[col] = true;
                }
                col += 1;
            }
        }
        out.insert_action(label, PartialAction { matrix, domain });
    }
    Ok(out)
}

/// Universal Whittaker induction truncated at monomial length and t-degree
/// `depth`: layers are the PBW filtration by monomial length; the action of
/// the positive part is total, the lowering action partial.
pub fn build_whittaker_truncation(
    algebra: Arc<LieAlgebraData>,
    eta: &EtaHom,
    depth: usize,
) -> Result<TruncatedInducedModule, ModuleError> {
    build_whittaker_truncation_with_margin(algebra, eta, depth, 2)
}

pub fn build_whittaker_truncation_with_margin(
    algebra: Arc<LieAlgebraData>,
    eta: &EtaHom,
    depth: usize,
    margin: usize,
) -> Result<TruncatedInducedModule, ModuleError> {
    if eta.is_zero() {
        return Err(ModuleError::ZeroEta);
    }
    if eta.simple_values.len() != algebra.rank {
        return Err(ModuleError::Construction(format!(
            "eta has {} simple values for rank {}",
            eta.simple_values.len(),
            algebra.rank
        )));
    }
    let vacuum = eta_vacuum_rep(Arc::clone(&algebra), eta, depth + margin);
    let engine = PbwEngine::new_induced(Arc::clone(&algebra), depth, vacuum);
    let weights = engine.gen_weights();
    let mut monomials = engine.enumerate_monomials(depth, depth);
    monomials.sort_by_key(|m| (m.length(), m.weight(&weights), m.factors().to_vec()));
    let layer_of: Vec<usize> = monomials.iter().map(Monomial::length).collect();
    let labels: Vec<String> = monomials
        .iter()
        .map(|m| {
            if m.is_one() {
                "u_eta".into()
            } else {
                format!("{}.u_eta", m.label(&engine))
            }
        })
        .collect();
    let basis = PbwBasis::new(monomials, 1);
    let mut out = TruncatedInducedModule::new(
        Arc::clone(&algebra),
        LayerKind::PbwLength,
        layer_of,
        labels,
        ModuleDescriptor::Whittaker {
            eta: eta.clone(),
            depth,
        },
    );
    for label in pbw_generator_labels(&algebra, depth, margin) {
        let (matrix, domain) = basis.partial_action(&engine, &label);
        out.insert_action(label, PartialAction { matrix, domain });
    }
    Ok(out)
}

/// Tensor product of an evaluation module with a layered truncation, graded
/// by the truncation's layers. Generators are the labels both sides carry;
/// the evaluation window must cover the truncation's window.
pub fn tensor_modules(
    e: &EvaluationModule,
    l: &TruncatedInducedModule,
) -> Result<TruncatedInducedModule, ModuleError> {
    if !e.rep.algebra.same_algebra(&l.algebra) {
        return Err(ModuleError::Construction(format!(
            "algebra mismatch: {} vs {}",
            e.rep.algebra.tag(),
            l.algebra.tag()
        )));
    }
    for label in l.labels() {
        if let GenLabel::Loop { power, .. } = label {
            if power.abs() > e.window {
                return Err(ModuleError::WindowMismatch(format!(
                    "evaluation window {} misses truncation generator power {}",
                    e.window, power
                )));
            }
        }
    }
    let dim = e.dim() * l.dim;
    let mut layer_of = Vec::with_capacity(dim);
    let mut labels = Vec::with_capacity(dim);
    for i in 0..e.dim() {
        for j in 0..l.dim {
            layer_of.push(l.layer_of[j]);
            labels.push(format!(
                "{}(x){}",
                e.rep.basis_labels[i], l.basis_labels[j]
            ));
        }
    }
    let mut out = TruncatedInducedModule::new(
        Arc::clone(&l.algebra),
        l.layer_kind,
        layer_of,
        labels,
        ModuleDescriptor::Tensor {
            left: Box::new(e.descriptor.clone()),
            right: Box::new(l.descriptor.clone()),
        },
    );
    let ldim = l.dim;
    for (label, la) in l.actions() {
        let ea = e.rep.action(label).ok_or_else(|| {
            ModuleError::WindowMismatch(format!("evaluation module misses label {label}"))
        })?;
        let mut matrix = RationalMatrix::zero(dim, dim);
        // id (x) A_l
        for (r, c, v) in la.matrix.entries() {
            for i in 0..e.dim() {
                matrix.add_to(i * ldim + r, i * ldim + c, v.clone());
            }
        }
        // A_e (x) id
        for (r, c, v) in ea.entries() {
            for j in 0..ldim {
                matrix.add_to(r * ldim + j, c * ldim + j, v.clone());
            }
        }
        let mut domain = vec![true; dim];
        for i in 0..e.dim() {
            for j in 0..ldim {
                domain[i * ldim + j] = la.domain[j];
            }
        }
        out.insert_action(*label, PartialAction { matrix, domain });
    }
    Ok(out)
}

/// `d`-extension of a module: layers `d^i (x) M` for `i <= d_depth`, with
/// `(x (x) t^k)(d^n v) = sum_j C(n,j) (-k)^j d^{n-j} (x) (x (x) t^k) v`,
/// `K` acting layerwise and `d` raising the layer (partial at the top).
pub fn build_d_extension(
    m: &TruncatedInducedModule,
    d_depth: usize,
) -> Result<TruncatedInducedModule, ModuleError> {
    let base_dim = m.dim;
    let dim = base_dim * (d_depth + 1);
    let mut layer_of = Vec::with_capacity(dim);
    let mut labels = Vec::with_capacity(dim);
    for n in 0..=d_depth {
        for j in 0..base_dim {
            layer_of.push(n);
            if n == 0 {
                labels.push(m.basis_labels[j].clone());
            } else {
                labels.push(format!("d^{}(x){}", n, m.basis_labels[j]));
            }
        }
    }
    let mut out = TruncatedInducedModule::new(
        Arc::clone(&m.algebra),
        LayerKind::DDegree,
        layer_of,
        labels,
        ModuleDescriptor::DExtension {
            base: Box::new(m.descriptor.clone()),
            depth: d_depth,
        },
    );
    for (label, action) in m.actions() {
        let k = match label {
            GenLabel::Loop { power, .. } => *power,
            GenLabel::CentralK => 0,
            GenLabel::DerivationD => {
                return Err(ModuleError::Construction(
                    "input to the d-extension already carries a d action".into(),
                ))
            }
        };
        let mut matrix = RationalMatrix::zero(dim, dim);
        let mut domain = vec![false; dim];
        for n in 0..=d_depth {
            for col in 0..base_dim {
                let global_col = n * base_dim + col;
                domain[global_col] = action.domain[col];
                if !action.domain[col] {
                    continue;
                }
                for j in 0..=n {
                    let coef = q_binomial(n, j)
                        * q_pow(&qi(-k), j as i64)
                            .map_err(|e| ModuleError::Construction(e.to_string()))?;
                    if coef.is_zero() {
                        continue;
                    }
                    for (r, v) in action.matrix.column(col).into_iter().enumerate() {
                        if !v.is_zero() {
                            matrix.add_to((n - j) * base_dim + r, global_col, v * &coef);
                        }
                    }
                }
            }
        }
        out.insert_action(*label, PartialAction { matrix, domain });
    }
    // d raises the layer; undefined on the top layer.
    let mut d_matrix = RationalMatrix::zero(dim, dim);
    let mut d_domain = vec![false; dim];
    for n in 0..d_depth {
        for j in 0..base_dim {
            d_matrix.set((n + 1) * base_dim + j, n * base_dim + j, Q::one());
            d_domain[n * base_dim + j] = true;
        }
    }
    out.insert_action(GenLabel::DerivationD, PartialAction {
        matrix: d_matrix,
        domain: d_domain,
    });
    Ok(out)
}

/// Verification report for the intertwiner between the induction of
/// `S(eta, lambda, a)` and the tensor product of the evaluation module with
/// the universal Whittaker truncation.
#[derive(Clone, Debug)]
pub struct IntertwinerReport {
    pub depth: usize,
    pub dim: usize,
    pub matrix: RationalMatrix,
    pub intertwined_pairs: usize,
    pub triangular: bool,
    /// (layer, accumulated dimension, rank of the restriction).
    pub layer_ranks: Vec<(usize, usize, usize)>,
    pub bijective_by_layer: bool,
    pub failures: Vec<String>,
}

impl IntertwinerReport {
    pub fn verified(&self) -> bool {
        self.failures.is_empty() && self.triangular && self.bijective_by_layer
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "intertwiner_phi_hat",
            "depth": self.depth,
            "dim": self.dim,
            "intertwined_pairs": self.intertwined_pairs,
            "triangular": self.triangular,
            "layer_ranks": self.layer_ranks,
            "bijective_by_layer": self.bijective_by_layer,
            "failures": self.failures,
            "verdict": self.verified(),
        })
    }
}

/// Builds the induced module of `S(eta, lambda, a)` truncated at `depth`,
/// the tensor module `E (x) M(eta)` at the same truncation, and the
/// intertwiner between them; then verifies intertwining on every operator
/// wherever both sides are defined, triangularity with respect to the PBW
/// filtration, and layerwise bijectivity.
pub fn intertwiner_phi_hat(
    algebra: Arc<LieAlgebraData>,
    eta: &EtaHom,
    lambdas: &[crate::lie::Weight],
    points: &crate::affine::PointConfiguration,
    depth: usize,
) -> Result<IntertwinerReport, ModuleError> {
    if eta.is_zero() {
        return Err(ModuleError::ZeroEta);
    }
    let margin = 2usize;
    let s_window = (points.len() + 2).max(depth + margin);
    let s_rep = crate::modules::eval::build_s_module(
        Arc::clone(&algebra),
        eta,
        lambdas,
        points,
        Some(s_window),
    )?;
    let s_dim = s_rep.dim;
    let engine = PbwEngine::new_induced(Arc::clone(&algebra), depth, s_rep);
    let weights = engine.gen_weights();
    let mut monomials = engine.enumerate_monomials(depth, depth);
    monomials.sort_by_key(|m| (m.length(), m.weight(&weights), m.factors().to_vec()));
    let basis = PbwBasis::new(monomials.clone(), s_dim);

    let lhs_layers: Vec<usize> = (0..basis.dim())
        .map(|i| basis.entry(i).0.length())
        .collect();
    let lhs_labels: Vec<String> = (0..basis.dim())
        .map(|i| {
            let (m, vac) = basis.entry(i);
            format!("{}(x)s{}", m.label(&engine), vac)
        })
        .collect();
    let mut lhs = TruncatedInducedModule::new(
        Arc::clone(&algebra),
        LayerKind::PbwLength,
        lhs_layers,
        lhs_labels,
        ModuleDescriptor::InducedFromS {
            eta: eta.clone(),
            lambdas: lambdas.to_vec(),
            points: points.points().to_vec(),
            depth,
        },
    );
    for label in pbw_generator_labels(&algebra, depth, margin) {
        let (matrix, domain) = basis.partial_action(&engine, &label);
        lhs.insert_action(label, PartialAction { matrix, domain });
    }

    let eval = crate::modules::eval::build_evaluation_module(
        Arc::clone(&algebra),
        lambdas,
        points,
        Some((depth + margin) as i64),
    )?;
    let whittaker = build_whittaker_truncation_with_margin(
        Arc::clone(&algebra),
        eta,
        depth,
        margin,
    )?;
    let rhs = tensor_modules(&eval, &whittaker)?;
    if rhs.dim != lhs.dim {
        return Err(ModuleError::Construction(format!(
            "intertwiner endpoints disagree: {} vs {}",
            lhs.dim, rhs.dim
        )));
    }

    // The Whittaker truncation shares the monomial enumeration with the
    // engine above, so monomial index m and vacuum coordinate sigma on the
    // left match E-index sigma, Whittaker-index m on the right.
    let mono_index: std::collections::HashMap<Monomial, usize> = monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();

    let mut failures = Vec::new();
    let wdim = whittaker.dim;
    let mut phi = RationalMatrix::zero(rhs.dim, lhs.dim);
    for col in 0..lhs.dim {
        let (mono, sigma) = basis.entry(col);
        // Start from phi(v) (x) u_eta = sigma (x) u_eta and apply the
        // monomial factors from the inside out.
        let mut vector = vec![Q::zero(); rhs.dim];
        let u_eta = whittaker.cyclic_index;
        vector[sigma * wdim + u_eta] = Q::one();
        let mut ok = true;
        'outer: for (gen, r) in mono.factors() {
            let label = engine.gens[*gen as usize].gen_label();
            let action = rhs.action(&label).expect("window covers lowering labels");
            for _ in 0..*r {
                match action.apply(&vector) {
                    Some(next) => vector = next,
                    None => {
                        failures.push(format!(
                            "could not push {} through the tensor side",
                            lhs.basis_labels[col]
                        ));
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            for (r, v) in vector.into_iter().enumerate() {
                if !v.is_zero() {
                    phi.set(r, col, v);
                }
            }
        }
    }

    // Intertwining on every label wherever both sides are defined.
    let mut intertwined_pairs = 0usize;
    for (label, la) in lhs.actions() {
        let Some(ra) = rhs.action(label) else { continue };
        for col in 0..lhs.dim {
            if !la.domain[col] {
                continue;
            }
            let unit: Vec<Q> = (0..lhs.dim)
                .map(|r| if r == col { Q::one() } else { Q::zero() })
                .collect();
            let lv = la.apply(&unit).expect("domain checked");
            let phi_lv = phi
                .mul_vec(&lv)
                .map_err(|e| ModuleError::Construction(e.to_string()))?;
            let phi_v = phi.column(col);
            let Some(r_phi_v) = ra.apply(&phi_v) else {
                continue;
            };
            if phi_lv != r_phi_v {
                failures.push(format!(
                    "intertwining fails for {} on column {}",
                    label.describe(&algebra),
                    lhs.basis_labels[col]
                ));
            } else {
                intertwined_pairs += 1;
            }
        }
    }

    // Triangularity: the image of a length-l basis vector lies in layers
    // <= l on the tensor side.
    let mut triangular = true;
    for col in 0..lhs.dim {
        let l = lhs.layer_of[col];
        for (r, v) in phi.column(col).into_iter().enumerate() {
            if !v.is_zero() && rhs.layer_of[r] > l {
                triangular = false;
                failures.push(format!(
                    "image of {} leaks above layer {}",
                    lhs.basis_labels[col], l
                ));
            }
        }
    }

    // Layerwise bijectivity: the restriction to the filtration step <= l is
    // square of full rank for every l.
    let mut layer_ranks = Vec::new();
    let mut bijective = true;
    for l in 0..=depth {
        let cols: Vec<usize> = (0..lhs.dim).filter(|&c| lhs.layer_of[c] <= l).collect();
        let rows: Vec<usize> = (0..rhs.dim).filter(|&r| rhs.layer_of[r] <= l).collect();
        let mut sub = RationalMatrix::zero(rows.len(), cols.len());
        for (cj, &c) in cols.iter().enumerate() {
            let col = phi.column(c);
            for (ri, &r) in rows.iter().enumerate() {
                if !col[r].is_zero() {
                    sub.set(ri, cj, col[r].clone());
                }
            }
        }
        let rk = rank(&sub);
        if rows.len() != cols.len() || rk != cols.len() {
            bijective = false;
        }
        layer_ranks.push((l, cols.len(), rk));
    }
    let _ = mono_index;

    Ok(IntertwinerReport {
        depth,
        dim: lhs.dim,
        matrix: phi,
        intertwined_pairs,
        triangular,
        layer_ranks,
        bijective_by_layer: bijective,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::PointConfiguration;
    use crate::lie::{build_simple_lie_algebra, Series, Weight};
    use crate::modules::eval::build_evaluation_module;
    use crate::pbw::enumerate_monomials_weighted;
    use crate::rational::qi;

    fn sl2() -> Arc<LieAlgebraData> {
        build_simple_lie_algebra(Series::A, 1).unwrap()
    }

    fn eta_std() -> EtaHom {
        EtaHom {
            simple_values: vec![qi(1)],
            affine_value: qi(0),
        }
    }

    fn pts(ps: &[i64]) -> PointConfiguration {
        PointConfiguration::new(ps.iter().map(|&p| qi(p)).collect()).unwrap()
    }

    fn w(ls: &[i64]) -> Vec<Weight> {
        ls.iter().map(|&l| Weight::from_integers(&[l])).collect()
    }

    #[test]
    fn hw_truncation_depth_zero() {
        let g = sl2();
        let gamma = AffineWeight {
            cartan: vec![qi(3)],
            central: qi(2),
        };
        let m = build_hw_truncation(Arc::clone(&g), &gamma, 0, false).unwrap();
        assert_eq!(m.dim, 1);
        let h = m.action(&GenLabel::loop_gen(g.cartan_index(0), 0)).unwrap();
        assert_eq!(h.matrix.get(0, 0), qi(3));
        let k = m.action(&GenLabel::CentralK).unwrap();
        assert_eq!(k.matrix.get(0, 0), qi(2));
    }

    #[test]
    fn hw_truncation_central_scalar_on_every_layer() {
        let g = sl2();
        let gamma = AffineWeight {
            cartan: vec![qi(1)],
            central: qi(5),
        };
        let m = build_hw_truncation(Arc::clone(&g), &gamma, 2, false).unwrap();
        let k = m.action(&GenLabel::CentralK).unwrap();
        assert!(k.is_total());
        assert_eq!(k.matrix, RationalMatrix::identity(m.dim).scale(&qi(5)));
        // Positive-part actions are total.
        for root in 0..g.num_positive_roots() {
            let a = m.action(&GenLabel::loop_gen(g.e_index(root), 0)).unwrap();
            assert!(a.is_total());
        }
        for k_pow in 1..=2i64 {
            for b in 0..g.dim {
                let a = m.action(&GenLabel::loop_gen(b, k_pow)).unwrap();
                assert!(a.is_total(), "raising {b}@{k_pow} total");
            }
        }
        assert!(m.check_bracket_compatibility_on_domain().unwrap() > 0);
    }

    #[test]
    fn hw_zero_weight_simple_quotient_collapses() {
        let g = sl2();
        let gamma = AffineWeight::zero(1);
        let m = build_hw_truncation(Arc::clone(&g), &gamma, 2, true).unwrap();
        assert_eq!(m.dim, 1);
        for (_, a) in m.actions() {
            assert!(a.matrix.is_zero_matrix());
        }
    }

    #[test]
    fn whittaker_layer_zero_is_eta_line() {
        let g = sl2();
        let eta = EtaHom {
            simple_values: vec![qi(1)],
            affine_value: qi(3),
        };
        let m = build_whittaker_truncation(Arc::clone(&g), &eta, 2).unwrap();
        assert_eq!(m.cyclic_index, 0);
        assert_eq!(m.layer_of[0], 0);
        // x u_eta = eta(x) u_eta for positive-part generators.
        let e0 = m.action(&GenLabel::loop_gen(g.e_index(0), 0)).unwrap();
        assert_eq!(e0.matrix.column(0)[0], qi(1));
        assert!(e0.matrix.column(0)[1..].iter().all(Q::is_zero));
        let f1 = m.action(&GenLabel::loop_gen(g.f_index(0), 1)).unwrap();
        assert_eq!(f1.matrix.column(0)[0], qi(3));
        assert!(f1.matrix.column(0)[1..].iter().all(Q::is_zero));
        let e2 = m.action(&GenLabel::loop_gen(g.e_index(0), 2)).unwrap();
        assert!(e2.matrix.column(0).iter().all(Q::is_zero));
    }

    #[test]
    fn whittaker_layer_dimensions_match_monomial_count() {
        let g = sl2();
        let m = build_whittaker_truncation(Arc::clone(&g), &eta_std(), 2).unwrap();
        // Oracle: monomials over {h, K, f, 3 gens at t^-1, 3 gens at t^-2}
        // with length <= 2 and t-weight <= 2, counted per length layer.
        let weights = vec![0usize, 0, 0, 1, 1, 1, 2, 2, 2];
        let monos = enumerate_monomials_weighted(&weights, 2, 2);
        let mut expect = vec![0usize; 3];
        for mono in &monos {
            expect[mono.length()] += 1;
        }
        assert_eq!(m.layer_dims(), expect);
        assert_eq!(m.layer_dims()[0], 1);
        assert_eq!(m.layer_dims()[1], 9);

        // Positive part acts totally; lowering is partial at the boundary.
        for k in 1..=2i64 {
            for b in 0..g.dim {
                assert!(m.action(&GenLabel::loop_gen(b, k)).unwrap().is_total());
            }
        }
        assert!(m.action(&GenLabel::loop_gen(g.e_index(0), 0)).unwrap().is_total());
        assert!(!m
            .action(&GenLabel::loop_gen(g.f_index(0), -1))
            .unwrap()
            .is_total());
        assert!(m.check_bracket_compatibility_on_domain().unwrap() > 0);
    }

    #[test]
    fn whittaker_rejects_zero_eta() {
        let g = sl2();
        assert!(matches!(
            build_whittaker_truncation(Arc::clone(&g), &EtaHom::zero(1), 1),
            Err(ModuleError::ZeroEta)
        ));
    }

    #[test]
    fn tensor_layer_dims_and_central_action() {
        let g = sl2();
        let gamma = AffineWeight {
            cartan: vec![qi(2)],
            central: qi(7),
        };
        let l = build_hw_truncation(Arc::clone(&g), &gamma, 1, false).unwrap();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), Some(3)).unwrap();
        let t = tensor_modules(&e, &l).unwrap();
        assert_eq!(t.dim, e.dim() * l.dim);
        let mut expect = l.layer_dims();
        for d in expect.iter_mut() {
            *d *= e.dim();
        }
        assert_eq!(t.layer_dims(), expect);
        // K acts by gamma(K): the evaluation side contributes zero.
        let k = t.action(&GenLabel::CentralK).unwrap();
        assert_eq!(k.matrix, RationalMatrix::identity(t.dim).scale(&qi(7)));
        assert!(t.check_bracket_compatibility_on_domain().unwrap() > 0);
    }

    #[test]
    fn tensor_window_mismatch_detected() {
        let g = sl2();
        let l = build_hw_truncation(
            Arc::clone(&g),
            &AffineWeight::zero(1),
            2,
            false,
        )
        .unwrap();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), Some(1)).unwrap();
        assert!(matches!(
            tensor_modules(&e, &l),
            Err(ModuleError::WindowMismatch(_))
        ));
    }

    #[test]
    fn d_extension_action_formula() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1, 1]), &pts(&[1, 2]), None).unwrap();
        let base = TruncatedInducedModule::from_module_rep(&e.rep, e.descriptor.clone());
        let m = build_d_extension(&base, 1).unwrap();
        assert_eq!(m.dim, 8);

        // (h (x) t)(d (x) w) = 3 (d (x) w) - 3 w for w = v+ (x) v+.
        let h1 = m.action(&GenLabel::loop_gen(g.cartan_index(0), 1)).unwrap();
        let mut dw = vec![qi(0); 8];
        dw[4] = qi(1); // d (x) (v+ (x) v+)
        let img = h1.apply(&dw).unwrap();
        let mut expect = vec![qi(0); 8];
        expect[4] = qi(3);
        expect[0] = qi(-3);
        assert_eq!(img, expect);

        // Power zero has no correction terms.
        let h0 = m.action(&GenLabel::loop_gen(g.cartan_index(0), 0)).unwrap();
        let img = h0.apply(&dw).unwrap();
        let mut expect = vec![qi(0); 8];
        expect[4] = qi(2); // (h (x) 1)(v+ (x) v+) = 2 v+ (x) v+
        assert_eq!(img, expect);

        // d raises the layer and is undefined on top.
        let d = m.action(&GenLabel::DerivationD).unwrap();
        assert!(!d.is_total());
        let mut w0 = vec![qi(0); 8];
        w0[0] = qi(1);
        let img = d.apply(&w0).unwrap();
        assert_eq!(img[4], qi(1));
        assert!(d.apply(&dw).is_none());

        assert!(m.check_bracket_compatibility_on_domain().unwrap() > 0);
    }

    #[test]
    fn d_extension_layer_quotients_reproduce_base() {
        let g = sl2();
        let e = build_evaluation_module(Arc::clone(&g), &w(&[1]), &pts(&[2]), None).unwrap();
        let base = TruncatedInducedModule::from_module_rep(&e.rep, e.descriptor.clone());
        let m = build_d_extension(&base, 2).unwrap();
        let bd = base.dim;
        for (label, pa) in base.actions() {
            let ext = m.action(label).unwrap();
            for n in 0..=2usize {
                // The diagonal block of layer n equals the base action.
                for col in 0..bd {
                    let full = ext.matrix.column(n * bd + col);
                    let base_col = pa.matrix.column(col);
                    for r in 0..bd {
                        assert_eq!(full[n * bd + r], base_col[r]);
                    }
                }
            }
        }
    }

    #[test]
    fn intertwiner_depth_zero_is_identity_relabeling() {
        let g = sl2();
        let report =
            intertwiner_phi_hat(Arc::clone(&g), &eta_std(), &w(&[1]), &pts(&[2]), 0).unwrap();
        assert!(report.verified(), "failures: {:?}", report.failures);
        assert_eq!(report.dim, 2);
        assert_eq!(report.matrix, RationalMatrix::identity(2));
    }

    #[test]
    fn intertwiner_depth_one_verifies() {
        let g = sl2();
        let report =
            intertwiner_phi_hat(Arc::clone(&g), &eta_std(), &w(&[1]), &pts(&[2]), 1).unwrap();
        assert!(report.verified(), "failures: {:?}", report.failures);
        assert!(report.intertwined_pairs > 0);
        assert_eq!(report.layer_ranks.last().unwrap().1, report.dim);
    }
}
