//! Instance descriptors: parsing CLI input into module builders, and the
//! on-disk JSON format for constructed modules.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use std::sync::Arc;

use affinerep::affine::PointConfiguration;
use affinerep::lie::rep::ModuleRep;
use affinerep::lie::{build_simple_lie_algebra, LieAlgebraData, Series};
use affinerep::modules::{
    build_d_extension, build_evaluation_module, build_hw_truncation, build_s_module,
    build_whittaker_truncation, tensor_modules, EvaluationModule, ModuleDescriptor,
    TruncatedInducedModule,
};

/// A constructed module of any family.
pub enum BuiltModule {
    Evaluation(EvaluationModule),
    Rep {
        rep: ModuleRep,
        descriptor: ModuleDescriptor,
    },
    Truncated(TruncatedInducedModule),
}

impl BuiltModule {
    pub fn dim(&self) -> usize {
        match self {
            BuiltModule::Evaluation(e) => e.dim(),
            BuiltModule::Rep { rep, .. } => rep.dim,
            BuiltModule::Truncated(t) => t.dim,
        }
    }

    pub fn descriptor(&self) -> &ModuleDescriptor {
        match self {
            BuiltModule::Evaluation(e) => &e.descriptor,
            BuiltModule::Rep { descriptor, .. } => descriptor,
            BuiltModule::Truncated(t) => &t.descriptor,
        }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        match self {
            BuiltModule::Evaluation(e) => &e.rep.algebra,
            BuiltModule::Rep { rep, .. } => &rep.algebra,
            BuiltModule::Truncated(t) => &t.algebra,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            BuiltModule::Evaluation(e) => {
                let mut v = e.to_json();
                v["kind"] = json!("evaluation");
                v
            }
            BuiltModule::Rep { rep, descriptor } => json!({
                "kind": "module-rep",
                "descriptor": descriptor.to_json(),
                "module": rep.to_json(),
            }),
            BuiltModule::Truncated(t) => {
                let mut v = t.to_json();
                v["kind"] = json!("truncated");
                v
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("module file misses its kind tag"))?;
        match kind {
            "evaluation" => Ok(BuiltModule::Evaluation(EvaluationModule::from_json(v)?)),
            "module-rep" => Ok(BuiltModule::Rep {
                rep: ModuleRep::from_json(
                    v.get("module").ok_or_else(|| anyhow!("missing module"))?,
                )?,
                descriptor: ModuleDescriptor::from_json(
                    v.get("descriptor")
                        .ok_or_else(|| anyhow!("missing descriptor"))?,
                )?,
            }),
            "truncated" => Ok(BuiltModule::Truncated(TruncatedInducedModule::from_json(v)?)),
            other => bail!("unknown module kind {other:?}"),
        }
    }

    /// Human-readable construction summary for standard output.
    pub fn summary(&self) -> String {
        let mut lines = Vec::new();
        lines.push(format!(
            "family: {}  algebra: {}  dim: {}",
            self.descriptor().family(),
            self.algebra().tag(),
            self.dim()
        ));
        match self {
            BuiltModule::Evaluation(e) => {
                lines.push(format!(
                    "window: [{}, {}]  generators: {}",
                    -e.window,
                    e.window,
                    e.rep.num_generators()
                ));
            }
            BuiltModule::Rep { rep, .. } => {
                lines.push(format!("generators: {}", rep.num_generators()));
            }
            BuiltModule::Truncated(t) => {
                lines.push(format!(
                    "layers: {:?}  generators: {}",
                    t.layer_dims(),
                    t.actions().count()
                ));
                let total = t.total_labels().len();
                lines.push(format!("total operators: {total}"));
            }
        }
        lines.join("\n")
    }
}

/// Parses the algebra field `{ "series": "A", "rank": n }`.
pub fn parse_algebra(v: &Value) -> Result<Arc<LieAlgebraData>> {
    let series: Series = v
        .get("series")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("algebra.series missing"))?
        .parse()?;
    let rank = v
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("algebra.rank missing"))? as usize;
    Ok(build_simple_lie_algebra(series, rank)?)
}

/// Builds a module from an instance descriptor file:
/// `{ "algebra": {...}, "module": {family tree}, "window": ..optional.. }`.
pub fn build_from_instance(
    v: &Value,
    window_override: Option<i64>,
    depth_override: Option<usize>,
) -> Result<BuiltModule> {
    let algebra = parse_algebra(
        v.get("algebra")
            .ok_or_else(|| anyhow!("instance descriptor misses the algebra field"))?,
    )?;
    let mut desc = ModuleDescriptor::from_json(
        v.get("module")
            .ok_or_else(|| anyhow!("instance descriptor misses the module field"))?,
    )?;
    if let Some(depth) = depth_override {
        desc = override_depth(desc, depth);
    }
    let window = window_override.or_else(|| v.get("window").and_then(Value::as_i64));
    build_module(algebra, &desc, window)
}

fn override_depth(desc: ModuleDescriptor, depth: usize) -> ModuleDescriptor {
    match desc {
        ModuleDescriptor::HighestWeight { gamma, simple, .. } => {
            ModuleDescriptor::HighestWeight {
                gamma,
                depth,
                simple,
            }
        }
        ModuleDescriptor::Whittaker { eta, .. } => ModuleDescriptor::Whittaker { eta, depth },
        ModuleDescriptor::DExtension { base, .. } => ModuleDescriptor::DExtension { base, depth },
        other => other,
    }
}

/// Recursive builder over the descriptor tree.
pub fn build_module(
    algebra: Arc<LieAlgebraData>,
    desc: &ModuleDescriptor,
    window: Option<i64>,
) -> Result<BuiltModule> {
    match desc {
        ModuleDescriptor::Evaluation { lambdas, points } => {
            let pc = PointConfiguration::new(points.clone())?;
            let e = build_evaluation_module(algebra, lambdas, &pc, window)?;
            Ok(BuiltModule::Evaluation(e))
        }
        ModuleDescriptor::SModule {
            eta,
            lambdas,
            points,
        } => {
            let pc = PointConfiguration::new(points.clone())?;
            let rep = build_s_module(
                algebra,
                eta,
                lambdas,
                &pc,
                window.map(|w| w.unsigned_abs() as usize),
            )?;
            Ok(BuiltModule::Rep {
                rep,
                descriptor: desc.clone(),
            })
        }
        ModuleDescriptor::HighestWeight {
            gamma,
            depth,
            simple,
        } => Ok(BuiltModule::Truncated(build_hw_truncation(
            algebra, gamma, *depth, *simple,
        )?)),
        ModuleDescriptor::Whittaker { eta, depth } => Ok(BuiltModule::Truncated(
            build_whittaker_truncation(algebra, eta, *depth)?,
        )),
        ModuleDescriptor::Tensor { left, right } => {
            let right_built = build_module(Arc::clone(&algebra), right, None)?;
            let BuiltModule::Truncated(l) = right_built else {
                bail!("tensor right factor must be a layered truncation");
            };
            let needed = l
                .labels()
                .filter_map(|lab| match lab {
                    affinerep::lie::rep::GenLabel::Loop { power, .. } => Some(power.abs()),
                    _ => None,
                })
                .max()
                .unwrap_or(1);
            let eval_window = window.unwrap_or(0).max(needed);
            let ModuleDescriptor::Evaluation { lambdas, points } = left.as_ref() else {
                bail!("tensor left factor must be an evaluation module");
            };
            let pc = PointConfiguration::new(points.clone())?;
            let e = build_evaluation_module(Arc::clone(&algebra), lambdas, &pc, Some(eval_window))?;
            Ok(BuiltModule::Truncated(tensor_modules(&e, &l)?))
        }
        ModuleDescriptor::DExtension { base, depth } => {
            let inner = build_module(Arc::clone(&algebra), base, window)?;
            let t = match inner {
                BuiltModule::Evaluation(e) => {
                    TruncatedInducedModule::from_module_rep(&e.rep, e.descriptor.clone())
                }
                BuiltModule::Rep { rep, descriptor } => {
                    TruncatedInducedModule::from_module_rep(&rep, descriptor)
                }
                BuiltModule::Truncated(t) => t,
            };
            Ok(BuiltModule::Truncated(build_d_extension(&t, *depth)?))
        }
        ModuleDescriptor::Irreducible { lambda } => {
            let rep = affinerep::lie::irrep::build_irrep(algebra, lambda)?;
            Ok(BuiltModule::Rep {
                rep,
                descriptor: desc.clone(),
            })
        }
        other => bail!("family {:?} cannot be constructed directly", other.family()),
    }
}

/// Reads a module file from disk.
pub fn load_module(path: &std::path::Path) -> Result<BuiltModule> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading module file {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)?;
    BuiltModule::from_json(&value)
}
