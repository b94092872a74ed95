//! Ordered-monomial engine for induced modules.
//!
//! Modules induced from a cyclic vector have PBW bases of ordered monomials
//! `b_n^{r_n} ... b_1^{r_1} v` in a fixed list of lowering generators. This
//! module implements exact straightening (left multiplication by a
//! generator), the action of raising elements through iterated brackets
//! down to the vacuum rule, and the contravariant form for highest-weight
//! vacua. Truncations and layer bookkeeping live in the callers; the engine
//! computes in the free span of ordered monomials and reports `None`
//! whenever a bracket leaves the generator window.

use num::{One, Zero};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::lie::rep::{GenLabel, ModuleRep};
use crate::lie::{BasisKind, LieAlgebraData};
use crate::linalg::RationalMatrix;
use crate::rational::{qi, Q};

/// A lowering generator: `x_b (x) t^power` with `power <= 0`, or the
/// central element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BGen {
    Loop { basis: usize, power: i64 },
    Central,
}

impl BGen {
    pub fn gen_label(&self) -> GenLabel {
        match self {
            BGen::Loop { basis, power } => GenLabel::loop_gen(*basis, *power),
            BGen::Central => GenLabel::CentralK,
        }
    }

    /// Absolute t-degree, the weight used for truncation bookkeeping.
    pub fn t_weight(&self) -> usize {
        match self {
            BGen::Loop { power, .. } => power.unsigned_abs() as usize,
            BGen::Central => 0,
        }
    }
}

/// Ordered monomial over generator indices: sorted pairs
/// `(generator index, exponent)` with positive exponents. The product
/// meaning is `b_n^{r_n} ... b_1^{r_1}` with indices decreasing from left
/// to right, so lower indices sit next to the vacuum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    /// Total number of factors counted with multiplicity.
    pub fn length(&self) -> usize {
        self.0.iter().map(|(_, r)| *r as usize).sum()
    }

    /// Weighted degree for a given per-generator weight table.
    pub fn weight(&self, weights: &[usize]) -> usize {
        self.0
            .iter()
            .map(|(g, r)| weights[*g as usize] * *r as usize)
            .sum()
    }

    pub fn leading(&self) -> Option<u32> {
        self.0.last().map(|(g, _)| *g)
    }

    pub fn exponent_of(&self, g: u32) -> u32 {
        self.0
            .iter()
            .find(|(h, _)| *h == g)
            .map(|(_, r)| *r)
            .unwrap_or(0)
    }

    pub fn incremented(&self, g: u32) -> Monomial {
        let mut v = self.0.clone();
        match v.binary_search_by_key(&g, |(h, _)| *h) {
            Ok(i) => v[i].1 += 1,
            Err(i) => v.insert(i, (g, 1)),
        }
        Monomial(v)
    }

    /// Removes one copy of the leading (largest-index) factor.
    pub fn decrement_leading(&self) -> Monomial {
        let mut v = self.0.clone();
        let last = v.len() - 1;
        if v[last].1 == 1 {
            v.pop();
        } else {
            v[last].1 -= 1;
        }
        Monomial(v)
    }

    pub fn label(&self, engine: &PbwEngine) -> String {
        if self.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (g, r) in self.0.iter().rev() {
            let name = match engine.gens[*g as usize] {
                BGen::Loop { basis, power } => {
                    format!("{}@{}", engine.algebra.basis_labels[basis], power)
                }
                BGen::Central => "K".into(),
            };
            if *r == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{r}"));
            }
        }
        parts.join(".")
    }
}

/// Linear combination of ordered monomials (coefficients in the enveloping
/// algebra of the lowering subalgebra).
pub type LinComb = BTreeMap<Monomial, Q>;

/// Linear combination of (monomial, vacuum coordinate) pairs: an element of
/// the induced module.
pub type ModVec = BTreeMap<(Monomial, usize), Q>;

fn add_term(target: &mut LinComb, m: Monomial, c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = target.entry(m.clone()).or_insert_with(Q::zero);
    *entry = &*entry + &c;
    if entry.is_zero() {
        target.remove(&m);
    }
}

pub fn mod_add_term(target: &mut ModVec, key: (Monomial, usize), c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = target.entry(key.clone()).or_insert_with(Q::zero);
    *entry = &*entry + &c;
    if entry.is_zero() {
        target.remove(&key);
    }
}

/// Behavior of the cyclic vector.
pub enum VacuumRule {
    /// Highest weight: the positive part kills the vacuum, the Cartan acts
    /// by the given values and `K` by the central value. Vacuum dimension 1.
    HighestWeight { cartan: Vec<Q>, central: Q },
    /// Induced from a finite-dimensional module over the positive part:
    /// raising elements act on vacuum coordinates through the stored
    /// representation. The Cartan and `K` are lowering generators here.
    Induced { rep: ModuleRep },
}

impl VacuumRule {
    pub fn dim(&self) -> usize {
        match self {
            VacuumRule::HighestWeight { .. } => 1,
            VacuumRule::Induced { rep } => rep.dim,
        }
    }
}

/// The straightening engine for one generator list and vacuum rule.
pub struct PbwEngine {
    pub algebra: Arc<LieAlgebraData>,
    pub gens: Vec<BGen>,
    pub window: usize,
    vacuum: VacuumRule,
    gen_index: HashMap<(usize, i64), usize>,
    central_index: Option<usize>,
    mul_memo: RefCell<HashMap<(u32, Monomial), Option<LinComb>>>,
    form_memo: RefCell<HashMap<(Monomial, Monomial), Option<Q>>>,
}

impl PbwEngine {
    /// Engine for a highest-weight induction over the derived affine
    /// algebra: lowering generators are the negative part within the
    /// window (`f_alpha` at degree zero, everything at negative degrees).
    pub fn new_highest_weight(
        algebra: Arc<LieAlgebraData>,
        window: usize,
        cartan: Vec<Q>,
        central: Q,
    ) -> Self {
        assert_eq!(cartan.len(), algebra.rank);
        let mut gens = Vec::new();
        for root in 0..algebra.num_positive_roots() {
            gens.push(BGen::Loop {
                basis: algebra.f_index(root),
                power: 0,
            });
        }
        for k in 1..=window as i64 {
            for basis in 0..algebra.dim {
                gens.push(BGen::Loop { basis, power: -k });
            }
        }
        Self::assemble(algebra, window, gens, VacuumRule::HighestWeight { cartan, central })
    }

    /// Engine for an induction from a module over the positive part up to
    /// the derived affine algebra: lowering generators are the Cartan, `K`,
    /// and the negative part within the window, in that order.
    pub fn new_induced(algebra: Arc<LieAlgebraData>, window: usize, rep: ModuleRep) -> Self {
        assert!(algebra.same_algebra(&rep.algebra));
        let mut gens = Vec::new();
        for i in 0..algebra.rank {
            gens.push(BGen::Loop {
                basis: algebra.cartan_index(i),
                power: 0,
            });
        }
        gens.push(BGen::Central);
        for root in 0..algebra.num_positive_roots() {
            gens.push(BGen::Loop {
                basis: algebra.f_index(root),
                power: 0,
            });
        }
        for k in 1..=window as i64 {
            for basis in 0..algebra.dim {
                gens.push(BGen::Loop { basis, power: -k });
            }
        }
        Self::assemble(algebra, window, gens, VacuumRule::Induced { rep })
    }

    fn assemble(
        algebra: Arc<LieAlgebraData>,
        window: usize,
        gens: Vec<BGen>,
        vacuum: VacuumRule,
    ) -> Self {
        let mut gen_index = HashMap::new();
        let mut central_index = None;
        for (i, g) in gens.iter().enumerate() {
            match g {
                BGen::Loop { basis, power } => {
                    gen_index.insert((*basis, *power), i);
                }
                BGen::Central => central_index = Some(i),
            }
        }
        PbwEngine {
            algebra,
            gens,
            window,
            vacuum,
            gen_index,
            central_index,
            mul_memo: RefCell::new(HashMap::new()),
            form_memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn vacuum_dim(&self) -> usize {
        self.vacuum.dim()
    }

    pub fn gen_weights(&self) -> Vec<usize> {
        self.gens.iter().map(BGen::t_weight).collect()
    }

    pub fn lowering_label_index(&self, label: &GenLabel) -> Option<usize> {
        match label {
            GenLabel::Loop { basis, power } => self.gen_index.get(&(*basis, *power)).copied(),
            GenLabel::CentralK => self.central_index,
            GenLabel::DerivationD => None,
        }
    }

    /// Bracket of two lowering generators expanded over the generator list;
    /// `None` when a component falls outside the window.
    fn bracket_gens(&self, a: usize, b: usize) -> Option<Vec<(usize, Q)>> {
        let (b1, k1) = match self.gens[a] {
            BGen::Loop { basis, power } => (basis, power),
            BGen::Central => return Some(Vec::new()),
        };
        let (b2, k2) = match self.gens[b] {
            BGen::Loop { basis, power } => (basis, power),
            BGen::Central => return Some(Vec::new()),
        };
        // Powers are both nonpositive, so no central term can arise.
        let power = k1 + k2;
        let mut out = Vec::new();
        for (c, coef) in self.algebra.bracket_basis(b1, b2) {
            let idx = self.gen_index.get(&(*c, power))?;
            out.push((*idx, coef.clone()));
        }
        Some(out)
    }

    /// Left multiplication of an ordered monomial by generator `g`,
    /// straightened back to ordered monomials.
    fn left_mul_gen(&self, g: u32, m: &Monomial) -> Option<LinComb> {
        if m.leading().is_none_or(|h| g >= h) {
            let mut out = LinComb::new();
            out.insert(m.incremented(g), Q::one());
            return Some(out);
        }
        let key = (g, m.clone());
        if let Some(cached) = self.mul_memo.borrow().get(&key) {
            return cached.clone();
        }
        let result = self.left_mul_gen_uncached(g, m);
        self.mul_memo.borrow_mut().insert(key, result.clone());
        result
    }

    fn left_mul_gen_uncached(&self, g: u32, m: &Monomial) -> Option<LinComb> {
        let h = m.leading().expect("nonempty by fast path");
        let rest = m.decrement_leading();
        // b_g b_h X = b_h (b_g X) + [b_g, b_h] X
        let inner = self.left_mul_gen(g, &rest)?;
        let mut out = LinComb::new();
        for (mono, coef) in &inner {
            let lifted = self.left_mul_gen(h, mono)?;
            for (m2, c2) in lifted {
                add_term(&mut out, m2, c2 * coef);
            }
        }
        for (k, coef) in self.bracket_gens(g as usize, h as usize)? {
            let t = self.left_mul_gen(k as u32, &rest)?;
            for (m2, c2) in t {
                add_term(&mut out, m2, c2 * &coef);
            }
        }
        Some(out)
    }

    fn left_mul_modvec(&self, g: u32, v: &ModVec) -> Option<ModVec> {
        let mut out = ModVec::new();
        for ((m, vac), c) in v {
            let t = self.left_mul_gen(g, m)?;
            for (m2, c2) in t {
                mod_add_term(&mut out, (m2, *vac), c2 * c);
            }
        }
        Some(out)
    }

    /// Action of the raising loop element `x_b (x) t^k` (`k > 0`, or `k = 0`
    /// with `x_b` in the positive or Cartan part) on `monomial (x) vacuum`.
    fn act_raise(&self, basis: usize, power: i64, m: &Monomial, vac: usize) -> Option<ModVec> {
        if m.is_one() {
            return self.vacuum_raise(basis, power, vac);
        }
        let h = m.leading().unwrap();
        let rest = m.decrement_leading();
        // x b_h X = b_h (x X) + [x, b_h] X
        let inner = self.act_raise(basis, power, &rest, vac)?;
        let mut out = self.left_mul_modvec(h, &inner)?;
        let (hb, hk) = match self.gens[h as usize] {
            BGen::Loop { basis, power } => (basis, power),
            BGen::Central => {
                // K is central: x K X = K (x X), already covered above.
                return Some(out);
            }
        };
        let sum_power = power + hk;
        for (c, coef) in self.algebra.bracket_basis(basis, hb) {
            let contribution = self.apply_element(*c, sum_power, &rest, vac)?;
            for (key, value) in contribution {
                mod_add_term(&mut out, key, value * coef);
            }
        }
        if sum_power == 0 && power != 0 {
            let central = &self.algebra.killing[basis][hb] * qi(power);
            if !central.is_zero() {
                let contribution = self.apply_central(&rest, vac)?;
                for (key, value) in contribution {
                    mod_add_term(&mut out, key, value * &central);
                }
            }
        }
        Some(out)
    }

    /// Applies a single loop element of arbitrary power, dispatching between
    /// lowering (straightening) and raising (recursion to the vacuum).
    fn apply_element(&self, basis: usize, power: i64, m: &Monomial, vac: usize) -> Option<ModVec> {
        let lowering = power < 0
            || (power == 0
                && match self.algebra.basis_kind(basis) {
                    BasisKind::NegativeRoot(_) => true,
                    BasisKind::Cartan(_) => matches!(self.vacuum, VacuumRule::Induced { .. }),
                    BasisKind::PositiveRoot(_) => false,
                });
        if lowering {
            let idx = *self.gen_index.get(&(basis, power))?;
            let t = self.left_mul_gen(idx as u32, m)?;
            let mut out = ModVec::new();
            for (m2, c2) in t {
                mod_add_term(&mut out, (m2, vac), c2);
            }
            Some(out)
        } else {
            self.act_raise(basis, power, m, vac)
        }
    }

    fn apply_central(&self, m: &Monomial, vac: usize) -> Option<ModVec> {
        match &self.vacuum {
            VacuumRule::HighestWeight { central, .. } => {
                let mut out = ModVec::new();
                mod_add_term(&mut out, (m.clone(), vac), central.clone());
                Some(out)
            }
            VacuumRule::Induced { .. } => {
                let idx = self.central_index?;
                let t = self.left_mul_gen(idx as u32, m)?;
                let mut out = ModVec::new();
                for (m2, c2) in t {
                    mod_add_term(&mut out, (m2, vac), c2);
                }
                Some(out)
            }
        }
    }

    /// Raising action on the vacuum itself.
    fn vacuum_raise(&self, basis: usize, power: i64, vac: usize) -> Option<ModVec> {
        match &self.vacuum {
            VacuumRule::HighestWeight { cartan, .. } => {
                let mut out = ModVec::new();
                if power == 0 {
                    match self.algebra.basis_kind(basis) {
                        BasisKind::Cartan(i) => {
                            mod_add_term(&mut out, (Monomial::one(), vac), cartan[i].clone());
                        }
                        BasisKind::PositiveRoot(_) => {}
                        BasisKind::NegativeRoot(_) => {
                            unreachable!("negative degree-zero elements are lowering generators")
                        }
                    }
                }
                // Positive powers kill a highest weight vacuum.
                Some(out)
            }
            VacuumRule::Induced { rep } => {
                let label = GenLabel::loop_gen(basis, power);
                let action = rep.action(&label)?;
                let mut out = ModVec::new();
                for r in 0..rep.dim {
                    let v = action.get(r, vac);
                    mod_add_term(&mut out, (Monomial::one(), r), v);
                }
                Some(out)
            }
        }
    }

    /// Full operator dispatch for a generator label acting on
    /// `monomial (x) vacuum coordinate`. `None` marks truncation overflow
    /// (a bracket or vacuum action left the window).
    pub fn act(&self, label: &GenLabel, m: &Monomial, vac: usize) -> Option<ModVec> {
        match label {
            GenLabel::DerivationD => None,
            GenLabel::CentralK => match &self.vacuum {
                VacuumRule::HighestWeight { central, .. } => {
                    let mut out = ModVec::new();
                    mod_add_term(&mut out, (m.clone(), vac), central.clone());
                    Some(out)
                }
                VacuumRule::Induced { .. } => {
                    let idx = self.central_index?;
                    let t = self.left_mul_gen(idx as u32, m)?;
                    let mut out = ModVec::new();
                    for (m2, c2) in t {
                        mod_add_term(&mut out, (m2, vac), c2);
                    }
                    Some(out)
                }
            },
            GenLabel::Loop { basis, power } => self.apply_element(*basis, *power, m, vac),
        }
    }

    /// Contravariant form between two monomials applied to a highest-weight
    /// vacuum: peel one leading factor and move its Chevalley transpose to
    /// the other side. `None` when the raising action overflows the window
    /// (cannot happen for windows closed under the transposes used here).
    pub fn contravariant_form(&self, m1: &Monomial, m2: &Monomial) -> Option<Q> {
        assert!(
            matches!(self.vacuum, VacuumRule::HighestWeight { .. }),
            "contravariant form needs a highest-weight vacuum"
        );
        if m1.is_one() {
            return Some(if m2.is_one() { Q::one() } else { Q::zero() });
        }
        let key = (m1.clone(), m2.clone());
        if let Some(cached) = self.form_memo.borrow().get(&key) {
            return cached.clone();
        }
        let result = (|| {
            let h = m1.leading().unwrap();
            let rest = m1.decrement_leading();
            let (hb, hk) = match self.gens[h as usize] {
                BGen::Loop { basis, power } => (basis, power),
                BGen::Central => unreachable!("central element in highest-weight generators"),
            };
            let transpose = self.algebra.transpose_index(hb);
            let moved = self.apply_element(transpose, -hk, m2, 0)?;
            let mut acc = Q::zero();
            for ((m2p, _), coef) in moved {
                let inner = self.contravariant_form(&rest, &m2p)?;
                if !inner.is_zero() {
                    acc += inner * coef;
                }
            }
            Some(acc)
        })();
        self.form_memo.borrow_mut().insert(key, result.clone());
        result
    }

    /// All ordered monomials over this engine's generators subject to a
    /// maximum length and maximum weighted degree, deterministically ordered
    /// by (length, weight, exponent vector).
    pub fn enumerate_monomials(&self, max_length: usize, max_weight: usize) -> Vec<Monomial> {
        enumerate_monomials_weighted(&self.gen_weights(), max_length, max_weight)
    }
}

/// Ordered monomials over `weights.len()` generators with total length at
/// most `max_length` and weighted degree at most `max_weight`, sorted by
/// (length, weight, exponent vector).
pub fn enumerate_monomials_weighted(
    weights: &[usize],
    max_length: usize,
    max_weight: usize,
) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    enumerate_rec(weights, 0, max_length, max_weight, &mut current, &mut out);
    out.sort_by_key(|m| (m.length(), m.weight(weights), m.factors().to_vec()));
    out
}

fn enumerate_rec(
    weights: &[usize],
    from: usize,
    length_left: usize,
    weight_left: usize,
    current: &mut Vec<(u32, u32)>,
    out: &mut Vec<Monomial>,
) {
    out.push(Monomial(current.clone()));
    for g in from..weights.len() {
        if length_left == 0 {
            break;
        }
        if weights[g] > weight_left {
            continue;
        }
        current.push((g as u32, 1));
        let last = current.len() - 1;
        let mut used_len = 1usize;
        let mut used_wt = weights[g];
        while used_len <= length_left && used_wt <= weight_left {
            enumerate_rec(
                weights,
                g + 1,
                length_left - used_len,
                weight_left - used_wt,
                current,
                out,
            );
            current[last].1 += 1;
            used_len += 1;
            used_wt += weights[g];
        }
        current.pop();
    }
}

/// A concrete truncation basis: a set of monomials (times vacuum
/// coordinates) with index lookup. Basis vector `i` is
/// `monomials[i / vacuum_dim]` applied to vacuum coordinate
/// `i % vacuum_dim`.
pub struct PbwBasis {
    pub monomials: Vec<Monomial>,
    pub vacuum_dim: usize,
    index: HashMap<Monomial, usize>,
}

impl PbwBasis {
    pub fn new(monomials: Vec<Monomial>, vacuum_dim: usize) -> Self {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        PbwBasis {
            monomials,
            vacuum_dim,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len() * self.vacuum_dim
    }

    pub fn monomial_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn vector_index(&self, m: &Monomial, vac: usize) -> Option<usize> {
        Some(self.monomial_index(m)? * self.vacuum_dim + vac)
    }

    pub fn entry(&self, i: usize) -> (&Monomial, usize) {
        (&self.monomials[i / self.vacuum_dim], i % self.vacuum_dim)
    }

    /// Converts an engine result to coordinates; `None` if a term lies
    /// outside the basis.
    pub fn coordinates(&self, v: &ModVec) -> Option<Vec<Q>> {
        let mut out = vec![Q::zero(); self.dim()];
        for ((m, vac), c) in v {
            let idx = self.vector_index(m, *vac)?;
            out[idx] = c.clone();
        }
        Some(out)
    }

    /// Partial action matrix of a label: the matrix columns are valid only
    /// where the returned domain flag is set.
    pub fn partial_action(
        &self,
        engine: &PbwEngine,
        label: &GenLabel,
    ) -> (RationalMatrix, Vec<bool>) {
        let dim = self.dim();
        let mut matrix = RationalMatrix::zero(dim, dim);
        let mut domain = vec![false; dim];
        for col in 0..dim {
            let (m, vac) = self.entry(col);
            if let Some(image) = engine.act(label, m, vac) {
                if let Some(coords) = self.coordinates(&image) {
                    for (r, c) in coords.into_iter().enumerate() {
                        if !c.is_zero() {
                            matrix.set(r, col, c);
                        }
                    }
                    domain[col] = true;
                }
            }
        }
        (matrix, domain)
    }
}
