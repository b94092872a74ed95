//! Finite-dimensional irreducibles as Shapovalov quotients.
//!
//! `V(lambda)` is realized as the cyclic span of a highest weight vector
//! under lowering operators inside the height-truncated Verma module,
//! quotiented height layer by height layer by the radical of the
//! contravariant form. The construction stops at the first empty quotient
//! layer and certifies completeness against the Weyl dimension formula.

use num::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::LieError;
use crate::lie::rep::{GenLabel, ModuleRep};
use crate::lie::{LieAlgebraData, Weight};
use crate::linalg::{rref, solve_linear, RationalMatrix};
use crate::pbw::{enumerate_monomials_weighted, Monomial, PbwEngine};
use crate::rational::{qi, Q};

/// Weyl dimension formula
/// `dim V(lambda) = prod_{alpha > 0} <lambda + rho, alpha^v> / <rho, alpha^v>`.
pub fn weyl_dimension(alg: &LieAlgebraData, lambda: &Weight) -> Result<usize, LieError> {
    if !lambda.is_dominant_integral() {
        return Err(LieError::NotDominant(lambda.to_string()));
    }
    let mut num = Q::one();
    let mut den = Q::one();
    for coords in &alg.positive_roots {
        let mut pairing = Q::zero();
        let mut height = Q::zero();
        for (j, &c) in coords.iter().enumerate() {
            if c != 0 {
                pairing += (&lambda.0[j] + Q::one()) * qi(c);
                height += qi(c);
            }
        }
        num *= pairing;
        den *= height;
    }
    let dim = num / den;
    debug_assert!(dim.is_integer());
    Ok(dim.to_integer().try_into().unwrap_or(0))
}

struct LayerData {
    monomials: Vec<Monomial>,
    /// Positions (into `monomials`) of the representatives that survive the
    /// quotient, and their offset into the global basis.
    chosen: Vec<usize>,
    global_offset: usize,
    gram: RationalMatrix,
}

impl LayerData {
    /// Coordinates of a Verma-layer vector in the quotient basis: solve
    /// `G[:, chosen] c = G u`, which is consistent by construction.
    fn project(&self, u: &[Q]) -> Result<Vec<Q>, LieError> {
        if self.chosen.is_empty() {
            return Ok(Vec::new());
        }
        let rhs = self.gram.mul_vec(u).map_err(to_structural)?;
        let cols: Vec<Vec<Q>> = self.chosen.iter().map(|&j| self.gram.column(j)).collect();
        let system = RationalMatrix::from_columns(&cols);
        solve_linear(&system, &rhs)
            .map_err(to_structural)?
            .ok_or_else(|| LieError::Structural("radical projection inconsistent".into()))
    }
}

fn to_structural<E: std::fmt::Display>(e: E) -> LieError {
    LieError::Structural(e.to_string())
}

/// Builds the irreducible highest weight module `V(lambda)` on a weight
/// basis. The returned action table covers every basis element of the
/// algebra; the highest weight vector is basis index 0.
pub fn build_irrep(alg: Arc<LieAlgebraData>, lambda: &Weight) -> Result<ModuleRep, LieError> {
    if lambda.rank() != alg.rank {
        return Err(LieError::NotDominant(format!(
            "weight rank {} vs algebra rank {}",
            lambda.rank(),
            alg.rank
        )));
    }
    if !lambda.is_dominant_integral() {
        return Err(LieError::NotDominant(lambda.to_string()));
    }
    let target_dim = weyl_dimension(&alg, lambda)?;
    let engine = PbwEngine::new_highest_weight(Arc::clone(&alg), 0, lambda.0.clone(), Q::zero());
    // Lowering generator g corresponds to the positive root with the same
    // index; its height grades the Verma module.
    let heights: Vec<usize> = (0..alg.num_positive_roots())
        .map(|r| alg.root_height(r) as usize)
        .collect();
    let theta_height = alg.root_height(alg.theta) as usize;

    let monomials_at = |d: usize| -> Vec<Monomial> {
        let mut ms: Vec<Monomial> = enumerate_monomials_weighted(&heights, d, d)
            .into_iter()
            .filter(|m| m.weight(&heights) == d)
            .collect();
        ms.sort_by_key(|m| m.factors().to_vec());
        ms
    };

    let mut layers: Vec<LayerData> = Vec::new();
    let mut total = 0usize;
    let depth_stop;
    let mut d = 0usize;
    loop {
        let monomials = monomials_at(d);
        let n = monomials.len();
        let mut gram = RationalMatrix::zero(n, n);
        for i in 0..n {
            for j in i..n {
                let v = engine
                    .contravariant_form(&monomials[i], &monomials[j])
                    .ok_or_else(|| {
                        LieError::Structural("contravariant form left the window".into())
                    })?;
                if !v.is_zero() {
                    gram.set(i, j, v.clone());
                    gram.set(j, i, v);
                }
            }
        }
        let red = rref(&gram);
        let chosen = red.pivots.clone();
        let rank = red.rank;
        layers.push(LayerData {
            monomials,
            chosen,
            global_offset: total,
            gram,
        });
        total += rank;
        if rank == 0 {
            depth_stop = d;
            break;
        }
        d += 1;
        if total > target_dim {
            return Err(LieError::Structural(format!(
                "quotient dimension exceeded Weyl dimension {target_dim}"
            )));
        }
    }
    if total != target_dim {
        return Err(LieError::Structural(format!(
            "quotient dimension {total} disagrees with Weyl dimension {target_dim}"
        )));
    }
    // Extend with the layers reachable by one lowering action; their
    // quotients must be empty as well.
    for d in depth_stop + 1..=depth_stop + theta_height {
        let monomials = monomials_at(d);
        let n = monomials.len();
        let mut gram = RationalMatrix::zero(n, n);
        let mut any = false;
        for i in 0..n {
            for j in i..n {
                let v = engine
                    .contravariant_form(&monomials[i], &monomials[j])
                    .ok_or_else(|| {
                        LieError::Structural("contravariant form left the window".into())
                    })?;
                if !v.is_zero() {
                    any = true;
                    gram.set(i, j, v.clone());
                    gram.set(j, i, v);
                }
            }
        }
        if any {
            return Err(LieError::Structural(format!(
                "nonzero quotient layer at height {d} beyond the stop depth"
            )));
        }
        layers.push(LayerData {
            monomials,
            chosen: Vec::new(),
            global_offset: total,
            gram,
        });
    }

    // Global basis and weight labels.
    let mut basis_labels = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for layer in &layers {
        for &j in &layer.chosen {
            let m = &layer.monomials[j];
            basis_labels.push(monomial_label(&alg, m));
            let mut coords = lambda.0.clone();
            for (gen, r) in m.factors() {
                for (i, w) in coords.iter_mut().enumerate() {
                    let shift = alg.root_on_cartan(*gen as usize, i) * *r as i64;
                    *w = &*w - qi(shift);
                }
            }
            weights.push(Weight(coords));
        }
    }

    let mut rep = ModuleRep::new(Arc::clone(&alg), total, basis_labels);
    for basis in 0..alg.dim {
        let label = GenLabel::loop_gen(basis, 0);
        let mut matrix = RationalMatrix::zero(total, total);
        let mut col = 0usize;
        for (li, layer) in layers.iter().enumerate() {
            for &j in &layer.chosen {
                let image = engine
                    .act(&label, &layer.monomials[j], 0)
                    .ok_or_else(|| LieError::Structural("action left the window".into()))?;
                // Group image terms by height layer and project each group.
                let mut grouped: BTreeMap<usize, Vec<(Monomial, Q)>> = BTreeMap::new();
                for ((m, _), c) in image {
                    grouped.entry(m.weight(&heights)).or_default().push((m, c));
                }
                for (height, terms) in grouped {
                    if height >= layers.len() {
                        return Err(LieError::Structural(format!(
                            "action from height {li} reached unprepared height {height}"
                        )));
                    }
                    let target = &layers[height];
                    if target.chosen.is_empty() {
                        continue;
                    }
                    let mut u = vec![Q::zero(); target.monomials.len()];
                    for (m, c) in terms {
                        let pos = target
                            .monomials
                            .iter()
                            .position(|x| *x == m)
                            .ok_or_else(|| {
                                LieError::Structural("image monomial missing from layer".into())
                            })?;
                        u[pos] = c;
                    }
                    let coords = target.project(&u)?;
                    for (k, c) in coords.into_iter().enumerate() {
                        if !c.is_zero() {
                            matrix.add_to(target.global_offset + k, col, c);
                        }
                    }
                }
                col += 1;
            }
        }
        rep.insert_action(label, matrix);
    }
    rep.weights = Some(weights);
    Ok(rep)
}

fn monomial_label(alg: &LieAlgebraData, m: &Monomial) -> String {
    if m.is_one() {
        return "v+".into();
    }
    let mut parts = Vec::new();
    for (gen, r) in m.factors().iter().rev() {
        let name = &alg.basis_labels[alg.f_index(*gen as usize)];
        if *r == 1 {
            parts.push(name.clone());
        } else {
            parts.push(format!("{name}^{r}"));
        }
    }
    parts.join(".")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::rep::weight_decomposition;
    use crate::lie::{build_simple_lie_algebra, Series};

    fn sl2() -> Arc<LieAlgebraData> {
        build_simple_lie_algebra(Series::A, 1).unwrap()
    }

    fn sl3() -> Arc<LieAlgebraData> {
        build_simple_lie_algebra(Series::A, 2).unwrap()
    }

    /// Independent statement of the Weyl dimension formula for type A,
    /// written against hook contents rather than the crate routine.
    fn weyl_oracle_type_a(lambda: &[i64]) -> usize {
        let l = lambda.len();
        let mut num = 1i64;
        let mut den = 1i64;
        for i in 0..l {
            for j in i..l {
                let sum: i64 = lambda[i..=j].iter().sum();
                num *= sum + (j - i + 1) as i64;
                den *= (j - i + 1) as i64;
            }
        }
        (num / den) as usize
    }

    #[test]
    fn weyl_dimension_matches_oracle() {
        let g2 = sl2();
        for l in 0..6i64 {
            assert_eq!(
                weyl_dimension(&g2, &Weight::from_integers(&[l])).unwrap(),
                weyl_oracle_type_a(&[l])
            );
        }
        let g3 = sl3();
        for lam in [[1, 0], [0, 1], [1, 1], [2, 0], [3, 1]] {
            assert_eq!(
                weyl_dimension(&g3, &Weight::from_integers(&lam)).unwrap(),
                weyl_oracle_type_a(&lam)
            );
        }
        assert!(weyl_dimension(&g2, &Weight::from_integers(&[-1])).is_err());
    }

    #[test]
    fn sl2_small_irreps() {
        let g = sl2();
        // lambda = 0: the trivial module.
        let v0 = build_irrep(Arc::clone(&g), &Weight::from_integers(&[0])).unwrap();
        assert_eq!(v0.dim, 1);
        for (_, m) in v0.actions() {
            assert!(m.is_zero_matrix());
        }

        // lambda = 1: weights {1, -1}.
        let v1 = build_irrep(Arc::clone(&g), &Weight::from_integers(&[1])).unwrap();
        assert_eq!(v1.dim, 2);
        let wd = weight_decomposition(&v1).unwrap();
        assert_eq!(
            wd,
            vec![
                (Weight::from_integers(&[1]), 1),
                (Weight::from_integers(&[-1]), 1)
            ]
        );

        // lambda = 2: weights {2, 0, -2}.
        let v2 = build_irrep(Arc::clone(&g), &Weight::from_integers(&[2])).unwrap();
        let wd = weight_decomposition(&v2).unwrap();
        assert_eq!(
            wd,
            vec![
                (Weight::from_integers(&[2]), 1),
                (Weight::from_integers(&[0]), 1),
                (Weight::from_integers(&[-2]), 1)
            ]
        );
    }

    #[test]
    fn irrep_dimensions_and_relations() {
        let g2 = sl2();
        for l in 0..6i64 {
            let rep = build_irrep(Arc::clone(&g2), &Weight::from_integers(&[l])).unwrap();
            assert_eq!(rep.dim, (l + 1) as usize);
            assert!(rep.check_bracket_compatibility().unwrap() > 0);
        }
        let g3 = sl3();
        for lam in [[1, 0], [0, 1], [1, 1], [2, 0]] {
            let rep = build_irrep(Arc::clone(&g3), &Weight::from_integers(&lam)).unwrap();
            assert_eq!(rep.dim, weyl_oracle_type_a(&lam));
            assert!(rep.check_bracket_compatibility().unwrap() > 0);
        }
    }

    #[test]
    fn adjoint_of_sl3_has_dimension_eight() {
        let g = sl3();
        let rep = build_irrep(Arc::clone(&g), &Weight::from_integers(&[1, 1])).unwrap();
        assert_eq!(rep.dim, 8);
        // Highest weight vector is index 0 and is killed by all raising ops.
        for root in 0..g.num_positive_roots() {
            let a = rep.action(&GenLabel::loop_gen(g.e_index(root), 0)).unwrap();
            assert!(a.column(0).iter().all(Q::is_zero));
        }
    }

    #[test]
    fn non_dominant_rejected() {
        let g = sl2();
        assert!(build_irrep(Arc::clone(&g), &Weight::from_integers(&[-2])).is_err());
        assert!(build_irrep(
            Arc::clone(&g),
            &Weight(vec![crate::rational::qr(1, 2)])
        )
        .is_err());
    }
}
