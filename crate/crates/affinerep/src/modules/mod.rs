//! Module families over the affine algebra: evaluation modules, the
//! one-dimensional-twisted tensor families over the positive part,
//! truncated highest-weight and Whittaker inductions, tensor products and
//! `d`-extensions.

pub mod eval;
pub mod induced;

pub use eval::{build_evaluation_module, build_s_module, evaluation_annihilator, EvaluationModule};
pub use induced::{
    build_d_extension, build_hw_truncation, build_whittaker_truncation, intertwiner_phi_hat,
    tensor_modules, IntertwinerReport, LayerKind, PartialAction, TruncatedInducedModule,
};

use num::Zero;
use serde_json::{json, Value};

use crate::affine::AffineElement;
use crate::error::{FormatError, ModuleError};
use crate::lie::rep::{GenLabel, ModuleRep};
use crate::lie::{BasisKind, LieAlgebraData, Weight};
use crate::linalg::{vec_from_json, vec_to_json, RationalMatrix};
use crate::rational::{q_from_str, q_to_string, Q};

/// A Lie algebra homomorphism from the positive part to the scalars,
/// stored by its values on the Chevalley generators: the simple root
/// vectors `e_alpha` and the affine generator in `g_{-theta} (x) t`.
///
/// The extension to the whole positive part is forced: brackets and `I(t)`
/// are killed, so the value on `x (x) t` is the `f_theta`-coordinate of `x`
/// times the affine value, every power above one maps to zero, and
/// non-simple degree-zero directions map to zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EtaHom {
    pub simple_values: Vec<Q>,
    pub affine_value: Q,
}

impl EtaHom {
    pub fn zero(rank: usize) -> Self {
        EtaHom {
            simple_values: vec![Q::zero(); rank],
            affine_value: Q::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.simple_values.iter().all(Q::is_zero) && self.affine_value.is_zero()
    }

    /// Nondegenerate means every Chevalley generator value is nonzero.
    pub fn is_nondegenerate(&self) -> bool {
        self.simple_values.iter().all(|v| !v.is_zero()) && !self.affine_value.is_zero()
    }

    /// Value on the basis loop element `x_b (x) t^power`.
    pub fn value_on_loop(&self, alg: &LieAlgebraData, basis: usize, power: i64) -> Q {
        match power {
            0 => match alg.basis_kind(basis) {
                BasisKind::PositiveRoot(r) => {
                    match alg.simple_root_indices().iter().position(|&s| s == r) {
                        Some(i) => self.simple_values[i].clone(),
                        None => Q::zero(),
                    }
                }
                _ => Q::zero(),
            },
            1 => {
                if basis == alg.f_index(alg.theta) {
                    self.affine_value.clone()
                } else {
                    Q::zero()
                }
            }
            _ => Q::zero(),
        }
    }

    /// Linear extension to an element of the positive part.
    pub fn value_on_element(&self, e: &AffineElement) -> Result<Q, ModuleError> {
        if !e.in_positive_part() {
            return Err(ModuleError::Construction(format!(
                "eta is defined only on the positive part, got {}",
                e.describe()
            )));
        }
        let mut out = Q::zero();
        for (k, v) in e.loop_terms() {
            for (b, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    out += c * &self.value_on_loop(&e.algebra, b, k);
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "simple": vec_to_json(&self.simple_values),
            "affine": q_to_string(&self.affine_value),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let simple = vec_from_json(
            v.get("simple")
                .ok_or_else(|| FormatError::BadJson("eta.simple".into()))?,
        )?;
        let affine = q_from_str(
            v.get("affine")
                .and_then(Value::as_str)
                .ok_or_else(|| FormatError::BadJson("eta.affine".into()))?,
        )?;
        Ok(EtaHom {
            simple_values: simple,
            affine_value: affine,
        })
    }
}

/// A weight of the extended Cartan of the derived algebra: values on the
/// finite Cartan plus the central charge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineWeight {
    pub cartan: Vec<Q>,
    pub central: Q,
}

impl AffineWeight {
    pub fn zero(rank: usize) -> Self {
        AffineWeight {
            cartan: vec![Q::zero(); rank],
            central: Q::zero(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "h": vec_to_json(&self.cartan),
            "K": q_to_string(&self.central),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let cartan = vec_from_json(
            v.get("h")
                .ok_or_else(|| FormatError::BadJson("gamma.h".into()))?,
        )?;
        let central = q_from_str(
            v.get("K")
                .and_then(Value::as_str)
                .ok_or_else(|| FormatError::BadJson("gamma.K".into()))?,
        )?;
        Ok(AffineWeight { cartan, central })
    }
}

/// What a constructed module is an instance of; carried as metadata so the
/// isomorphism deciders can reduce along the construction tree.
#[derive(Clone, PartialEq, Debug)]
pub enum ModuleDescriptor {
    Evaluation {
        lambdas: Vec<Weight>,
        points: Vec<Q>,
    },
    SModule {
        eta: EtaHom,
        lambdas: Vec<Weight>,
        points: Vec<Q>,
    },
    HighestWeight {
        gamma: AffineWeight,
        depth: usize,
        simple: bool,
    },
    Whittaker {
        eta: EtaHom,
        depth: usize,
    },
    InducedFromS {
        eta: EtaHom,
        lambdas: Vec<Weight>,
        points: Vec<Q>,
        depth: usize,
    },
    Tensor {
        left: Box<ModuleDescriptor>,
        right: Box<ModuleDescriptor>,
    },
    DExtension {
        base: Box<ModuleDescriptor>,
        depth: usize,
    },
    Irreducible {
        lambda: Weight,
    },
    Opaque(String),
}

impl ModuleDescriptor {
    pub fn family(&self) -> &'static str {
        match self {
            ModuleDescriptor::Evaluation { .. } => "evaluation",
            ModuleDescriptor::SModule { .. } => "S",
            ModuleDescriptor::HighestWeight { .. } => "hw",
            ModuleDescriptor::Whittaker { .. } => "whittaker",
            ModuleDescriptor::InducedFromS { .. } => "induced-S",
            ModuleDescriptor::Tensor { .. } => "tensor",
            ModuleDescriptor::DExtension { .. } => "d-extension",
            ModuleDescriptor::Irreducible { .. } => "irreducible",
            ModuleDescriptor::Opaque(_) => "opaque",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ModuleDescriptor::Evaluation { lambdas, points } => json!({
                "family": "evaluation",
                "lambda": lambdas.iter().map(Weight::to_json).collect::<Vec<_>>(),
                "points": vec_to_json(points),
            }),
            ModuleDescriptor::SModule {
                eta,
                lambdas,
                points,
            } => json!({
                "family": "S",
                "eta": eta.to_json(),
                "lambda": lambdas.iter().map(Weight::to_json).collect::<Vec<_>>(),
                "points": vec_to_json(points),
            }),
            ModuleDescriptor::HighestWeight {
                gamma,
                depth,
                simple,
            } => json!({
                "family": "hw",
                "gamma": gamma.to_json(),
                "depth": depth,
                "simple": simple,
            }),
            ModuleDescriptor::Whittaker { eta, depth } => json!({
                "family": "whittaker",
                "eta": eta.to_json(),
                "depth": depth,
            }),
            ModuleDescriptor::InducedFromS {
                eta,
                lambdas,
                points,
                depth,
            } => json!({
                "family": "induced-S",
                "eta": eta.to_json(),
                "lambda": lambdas.iter().map(Weight::to_json).collect::<Vec<_>>(),
                "points": vec_to_json(points),
                "depth": depth,
            }),
            ModuleDescriptor::Tensor { left, right } => json!({
                "family": "tensor",
                "left": left.to_json(),
                "right": right.to_json(),
            }),
            ModuleDescriptor::DExtension { base, depth } => json!({
                "family": "d-extension",
                "base": base.to_json(),
                "depth": depth,
            }),
            ModuleDescriptor::Irreducible { lambda } => json!({
                "family": "irreducible",
                "lambda": lambda.to_json(),
            }),
            ModuleDescriptor::Opaque(tag) => json!({ "family": "opaque", "tag": tag }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let family = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::BadJson("descriptor.family".into()))?;
        let weights = |key: &str| -> Result<Vec<Weight>, FormatError> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| FormatError::BadJson(format!("descriptor.{key}")))?
                .iter()
                .map(Weight::from_json)
                .collect()
        };
        let depth = |key: &str| -> Result<usize, FormatError> {
            Ok(v.get(key)
                .and_then(Value::as_u64)
                .ok_or_else(|| FormatError::BadJson(format!("descriptor.{key}")))? as usize)
        };
        match family {
            "evaluation" => Ok(ModuleDescriptor::Evaluation {
                lambdas: weights("lambda")?,
                points: vec_from_json(
                    v.get("points")
                        .ok_or_else(|| FormatError::BadJson("descriptor.points".into()))?,
                )?,
            }),
            "S" => Ok(ModuleDescriptor::SModule {
                eta: EtaHom::from_json(
                    v.get("eta")
                        .ok_or_else(|| FormatError::BadJson("descriptor.eta".into()))?,
                )?,
                lambdas: weights("lambda")?,
                points: vec_from_json(
                    v.get("points")
                        .ok_or_else(|| FormatError::BadJson("descriptor.points".into()))?,
                )?,
            }),
            "hw" => Ok(ModuleDescriptor::HighestWeight {
                gamma: AffineWeight::from_json(
                    v.get("gamma")
                        .ok_or_else(|| FormatError::BadJson("descriptor.gamma".into()))?,
                )?,
                depth: depth("depth")?,
                simple: v.get("simple").and_then(Value::as_bool).unwrap_or(false),
            }),
            "whittaker" => Ok(ModuleDescriptor::Whittaker {
                eta: EtaHom::from_json(
                    v.get("eta")
                        .ok_or_else(|| FormatError::BadJson("descriptor.eta".into()))?,
                )?,
                depth: depth("depth")?,
            }),
            "induced-S" => Ok(ModuleDescriptor::InducedFromS {
                eta: EtaHom::from_json(
                    v.get("eta")
                        .ok_or_else(|| FormatError::BadJson("descriptor.eta".into()))?,
                )?,
                lambdas: weights("lambda")?,
                points: vec_from_json(
                    v.get("points")
                        .ok_or_else(|| FormatError::BadJson("descriptor.points".into()))?,
                )?,
                depth: depth("depth")?,
            }),
            "tensor" => Ok(ModuleDescriptor::Tensor {
                left: Box::new(ModuleDescriptor::from_json(
                    v.get("left")
                        .ok_or_else(|| FormatError::BadJson("descriptor.left".into()))?,
                )?),
                right: Box::new(ModuleDescriptor::from_json(
                    v.get("right")
                        .ok_or_else(|| FormatError::BadJson("descriptor.right".into()))?,
                )?),
            }),
            "d-extension" => Ok(ModuleDescriptor::DExtension {
                base: Box::new(ModuleDescriptor::from_json(
                    v.get("base")
                        .ok_or_else(|| FormatError::BadJson("descriptor.base".into()))?,
                )?),
                depth: depth("depth")?,
            }),
            "irreducible" => Ok(ModuleDescriptor::Irreducible {
                lambda: Weight::from_json(
                    v.get("lambda")
                        .ok_or_else(|| FormatError::BadJson("descriptor.lambda".into()))?,
                )?,
            }),
            "opaque" => Ok(ModuleDescriptor::Opaque(
                v.get("tag")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string(),
            )),
            other => Err(FormatError::BadJson(format!("unknown family {other:?}"))),
        }
    }
}

/// Action matrix of a whole affine element on a module with labeled
/// generator actions; errors when a needed label is outside the module's
/// generator window.
pub fn module_action_of(
    rep: &ModuleRep,
    elem: &AffineElement,
) -> Result<RationalMatrix, ModuleError> {
    if !rep.algebra.same_algebra(&elem.algebra) {
        return Err(ModuleError::Construction(format!(
            "algebra mismatch: {} vs {}",
            rep.algebra.tag(),
            elem.algebra.tag()
        )));
    }
    let mut out = RationalMatrix::zero(rep.dim, rep.dim);
    let mut add_scaled = |label: GenLabel, coef: &Q| -> Result<(), ModuleError> {
        if coef.is_zero() {
            return Ok(());
        }
        let a = rep.action(&label).ok_or_else(|| {
            ModuleError::PartialAction(format!(
                "generator {} outside the module window",
                label.describe(&rep.algebra)
            ))
        })?;
        out = out
            .add(&a.scale(coef))
            .map_err(|e| ModuleError::Construction(e.to_string()))?;
        Ok(())
    };
    for (k, v) in elem.loop_terms() {
        for (b, c) in v.iter().enumerate() {
            add_scaled(GenLabel::loop_gen(b, k), c)?;
        }
    }
    add_scaled(GenLabel::CentralK, &elem.c_k)?;
    add_scaled(GenLabel::DerivationD, &elem.c_d)?;
    Ok(out)
}

/// Standard tensor-basis labels `u (x) v`.
pub(crate) fn tensor_labels(left: &[String], right: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in left {
        for r in right {
            out.push(format!("{l}(x){r}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_simple_lie_algebra, Series};
    use crate::rational::qi;
    use std::sync::Arc;

    #[test]
    fn eta_extension_rules() {
        let g = build_simple_lie_algebra(Series::A, 2).unwrap();
        let eta = EtaHom {
            simple_values: vec![qi(2), qi(3)],
            affine_value: qi(5),
        };
        assert!(eta.is_nondegenerate());
        // Values on the Chevalley generators.
        let simples = g.simple_root_indices();
        assert_eq!(eta.value_on_loop(&g, g.e_index(simples[0]), 0), qi(2));
        assert_eq!(eta.value_on_loop(&g, g.e_index(simples[1]), 0), qi(3));
        assert_eq!(eta.value_on_loop(&g, g.f_index(g.theta), 1), qi(5));
        // Non-simple directions, higher powers, and non-theta lowering
        // directions all vanish.
        assert_eq!(eta.value_on_loop(&g, g.e_index(g.theta), 0), qi(0));
        assert_eq!(eta.value_on_loop(&g, g.e_index(0), 2), qi(0));
        assert_eq!(eta.value_on_loop(&g, g.f_index(0), 1), qi(0));

        // eta vanishes on brackets of positive-part elements.
        let idx = crate::affine::NposBasis::new(Arc::clone(&g), 2);
        for i in 0..idx.len() {
            for j in 0..idx.len() {
                let b = crate::affine::affine_bracket(
                    &idx.affine_element(i),
                    &idx.affine_element(j),
                )
                .unwrap();
                if b.is_zero() {
                    continue;
                }
                assert_eq!(eta.value_on_element(&b).unwrap(), qi(0));
            }
        }
    }

    #[test]
    fn eta_kills_i_of_t() {
        let g = build_simple_lie_algebra(Series::A, 1).unwrap();
        let eta = EtaHom {
            simple_values: vec![qi(1)],
            affine_value: qi(7),
        };
        let ideal =
            crate::affine::ideal_basis(Arc::clone(&g), &crate::poly::Poly::monomial(qi(1), 1), 4)
                .unwrap();
        for e in &ideal.elements {
            assert_eq!(eta.value_on_element(e).unwrap(), qi(0));
        }
    }

    #[test]
    fn descriptor_json_round_trip() {
        let desc = ModuleDescriptor::DExtension {
            base: Box::new(ModuleDescriptor::Tensor {
                left: Box::new(ModuleDescriptor::Evaluation {
                    lambdas: vec![Weight::from_integers(&[1])],
                    points: vec![qi(2)],
                }),
                right: Box::new(ModuleDescriptor::Whittaker {
                    eta: EtaHom {
                        simple_values: vec![qi(1)],
                        affine_value: qi(0),
                    },
                    depth: 2,
                }),
            }),
            depth: 1,
        };
        let j = desc.to_json();
        let back = ModuleDescriptor::from_json(&j).unwrap();
        assert_eq!(desc, back);
    }
}
