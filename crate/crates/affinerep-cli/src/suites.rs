//! Verification suites: fixed instance grids from the versioned config
//! plus seed-randomized instances, one JSON report per check.

use anyhow::{anyhow, bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::{BTreeMap, VecDeque};
use std::sync::{Arc, Mutex};

use affinerep::affine::{ideal_basis, verify_truncated_iso, AffineElement, PointConfiguration};
use affinerep::analysis::{
    annihilator_in_quotient, classify_nplus_module, d_extension_iso, evaluation_iso,
    is_irreducible, locally_finite_closure, submodule_generated, verify_tensor_submodule_shape,
    whittaker_vectors, IsoVerdict,
};
use affinerep::lie::rep::GenLabel;
use affinerep::lie::{LieAlgebraData, Weight};
use affinerep::linalg::vec_from_json;
use affinerep::modules::{
    build_d_extension, build_evaluation_module, build_hw_truncation, build_s_module,
    build_whittaker_truncation, intertwiner_phi_hat, module_action_of, tensor_modules,
    AffineWeight, EtaHom, TruncatedInducedModule,
};
use affinerep::poly::Poly;
use affinerep::rational::{qi, Q};
use affinerep::report::{CheckReport, CheckTimer};
use num::{One, Zero};

use crate::descriptor::parse_algebra;

pub const SUITES: &[&str] = &[
    "lemma3.1", "thm3.2", "thm3.3", "thm4.1", "lemma4.2", "lemma4.3", "lemma5.1", "sec6",
];

type Check = Box<dyn FnOnce() -> CheckReport + Send>;

/// Runs at most `threads` checks concurrently and returns the reports in
/// submission order.
fn run_checks(checks: Vec<Check>, threads: usize) -> Vec<CheckReport> {
    if threads <= 1 {
        return checks.into_iter().map(|c| c()).collect();
    }
    let queue: Mutex<VecDeque<(usize, Check)>> =
        Mutex::new(checks.into_iter().enumerate().collect());
    let results: Mutex<BTreeMap<usize, CheckReport>> = Mutex::new(BTreeMap::new());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let job = queue.lock().unwrap().pop_front();
                match job {
                    Some((i, check)) => {
                        let report = check();
                        results.lock().unwrap().insert(i, report);
                    }
                    None => break,
                }
            });
        }
    });
    results.into_inner().unwrap().into_values().collect()
}

fn weights_from(v: &Value) -> Result<Vec<Weight>> {
    v.as_array()
        .ok_or_else(|| anyhow!("expected weight list"))?
        .iter()
        .map(|w| Ok(Weight::from_json(w)?))
        .collect()
}

fn points_from(v: &Value) -> Result<PointConfiguration> {
    Ok(PointConfiguration::new(vec_from_json(v)?)?)
}

fn random_points(rng: &mut ChaCha8Rng, len: usize) -> PointConfiguration {
    loop {
        let pts: Vec<Q> = (0..len).map(|_| nonzero_small(rng)).collect();
        if let Ok(pc) = PointConfiguration::new(pts) {
            return pc;
        }
    }
}

fn nonzero_small(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let n = rng.gen_range(-4i64..=4);
        if n != 0 {
            return qi(n);
        }
    }
}

fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<Weight> {
    (0..len)
        .map(|_| Weight::from_integers(&[rng.gen_range(1i64..=2)]))
        .collect()
}

/// Entry point: runs a named suite and returns its check reports.
pub fn run_suite(
    name: &str,
    seed: u64,
    config: &Value,
    threads: usize,
) -> Result<Vec<CheckReport>> {
    let algebra = parse_algebra(
        config
            .get("algebra")
            .ok_or_else(|| anyhow!("suite config misses the algebra"))?,
    )?;
    let section = config
        .get(name)
        .ok_or_else(|| anyhow!("suite config misses the {name} section"))?
        .clone();
    let checks: Vec<Check> = match name {
        "lemma3.1" => suite_lemma31(algebra, &section, seed)?,
        "thm3.2" => suite_thm32(algebra, &section, seed)?,
        "thm3.3" => suite_thm33(algebra, &section, seed)?,
        "thm4.1" => suite_thm41(algebra, &section, seed)?,
        "lemma4.2" => suite_lemma42(algebra, &section)?,
        "lemma4.3" => suite_lemma43(algebra, &section, seed)?,
        "lemma5.1" => suite_lemma51(algebra, &section, seed)?,
        "sec6" => suite_sec6(algebra, &section, seed)?,
        other => bail!("unknown suite {other:?}"),
    };
    Ok(run_checks(checks, threads))
}

fn suite_lemma31(alg: Arc<LieAlgebraData>, cfg: &Value, seed: u64) -> Result<Vec<Check>> {
    let k_min = cfg.get("k_min").and_then(Value::as_u64).unwrap_or(1) as usize;
    let k_max = cfg.get("k_max").and_then(Value::as_u64).unwrap_or(6) as usize;
    let mut sets = Vec::new();
    for s in cfg
        .get("point_sets")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("lemma3.1 point_sets"))?
    {
        sets.push(points_from(s)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra = cfg.get("random_sets").and_then(Value::as_u64).unwrap_or(0);
    for _ in 0..extra {
        let m = rng.gen_range(1..=3usize);
        sets.push(random_points(&mut rng, m));
    }
    let mut checks: Vec<Check> = Vec::new();
    for ps in sets {
        for k in k_min..=k_max {
            let alg = Arc::clone(&alg);
            let ps = ps.clone();
            checks.push(Box::new(move || {
                let timer = CheckTimer::start(
                    "truncated_evaluation_iso",
                    json!({ "k": k, "points": ps.to_json() }),
                );
                match verify_truncated_iso(alg, k, &ps) {
                    Ok(report) => {
                        let ok = report.full_rank();
                        timer.finish(ok, report.to_json(), json!({ "rank": report.rank }))
                    }
                    Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
                }
            }));
        }
    }
    Ok(checks)
}

fn suite_thm32(alg: Arc<LieAlgebraData>, cfg: &Value, seed: u64) -> Result<Vec<Check>> {
    let mut checks: Vec<Check> = Vec::new();
    for inst in cfg
        .get("instances")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("thm3.2 instances"))?
    {
        let lambdas = weights_from(inst.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
        let pc = points_from(inst.get("points").ok_or_else(|| anyhow!("points"))?)?;
        let alg = Arc::clone(&alg);
        let instance = inst.clone();
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("evaluation_irreducible_burnside", instance);
            let run = || -> Result<(bool, Value)> {
                let e = build_evaluation_module(alg, &lambdas, &pc, None)?;
                let cert = is_irreducible(&e.rep)?;
                let ok = cert.irreducible && cert.algebra_dim == Some(e.dim() * e.dim());
                Ok((ok, cert.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    // Tensor shape mechanism with a Whittaker factor, fixed plus seeded.
    let tensor_inst = cfg
        .get("tensor_instance")
        .cloned()
        .ok_or_else(|| anyhow!("thm3.2 tensor_instance"))?;
    let depth = cfg
        .get("whittaker_depth")
        .and_then(Value::as_u64)
        .unwrap_or(1) as usize;
    let samples = cfg.get("samples").and_then(Value::as_u64).unwrap_or(2) as usize;
    {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start(
                "tensor_submodule_shape",
                json!({ "instance": tensor_inst, "depth": depth }),
            );
            let run = || -> Result<(bool, Value)> {
                let lambdas =
                    weights_from(tensor_inst.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
                let pc = points_from(tensor_inst.get("points").ok_or_else(|| anyhow!("points"))?)?;
                let eta = EtaHom {
                    simple_values: vec![qi(1); alg.rank],
                    affine_value: qi(0),
                };
                let l = build_whittaker_truncation(Arc::clone(&alg), &eta, depth)?;
                let window = (depth as i64 + 2).max(pc.len() as i64 + 2);
                let e = build_evaluation_module(Arc::clone(&alg), &lambdas, &pc, Some(window))?;
                let report = verify_tensor_submodule_shape(&e, &l, samples, seed, None)?;
                Ok((report.verified(), report.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    Ok(checks)
}

fn suite_thm33(alg: Arc<LieAlgebraData>, cfg: &Value, seed: u64) -> Result<Vec<Check>> {
    let mut checks: Vec<Check> = Vec::new();
    for inst in cfg
        .get("instances")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("thm3.3 instances"))?
    {
        let lambdas = weights_from(inst.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
        let pc = points_from(inst.get("points").ok_or_else(|| anyhow!("points"))?)?;
        let alg = Arc::clone(&alg);
        let instance = inst.clone();
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("d_extension_layer_spin", instance);
            let run = || -> Result<(bool, Value)> {
                let e = build_evaluation_module(Arc::clone(&alg), &lambdas, &pc, None)?;
                let base =
                    TruncatedInducedModule::from_module_rep(&e.rep, e.descriptor.clone());
                let ext = build_d_extension(&base, 1)?;
                // Layer quotient identity: diagonal blocks equal the base
                // action.
                for (label, pa) in base.actions() {
                    let full = ext
                        .action(label)
                        .ok_or_else(|| anyhow!("missing extension action"))?;
                    for n in 0..=1usize {
                        for col in 0..base.dim {
                            let column = full.matrix.column(n * base.dim + col);
                            let expect = pa.matrix.column(col);
                            for r in 0..base.dim {
                                if column[n * base.dim + r] != expect[r] {
                                    bail!("layer quotient differs from the base action");
                                }
                            }
                        }
                    }
                }
                // Spinning any nonzero layer-1 basis vector reaches layer 0.
                let layer0 = ext.layer_indices(0);
                for idx in ext.layer_indices(1) {
                    let mut v = vec![Q::zero(); ext.dim];
                    v[idx] = Q::one();
                    let generated = submodule_generated(&ext, &v)?;
                    for &j in &layer0 {
                        let mut unit = vec![Q::zero(); ext.dim];
                        unit[j] = Q::one();
                        if !generated.contains(&unit) {
                            bail!("layer-1 vector {idx} does not reach layer-0 vector {j}");
                        }
                    }
                }
                Ok((true, json!({ "dim": ext.dim })))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    // Sampled d-extension tensor shape checks.
    let d_samples = cfg.get("d_samples").and_then(Value::as_u64).unwrap_or(2) as usize;
    {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("tensor_submodule_shape_d", json!({ "depth": 1 }));
            let run = || -> Result<(bool, Value)> {
                let eta = EtaHom {
                    simple_values: vec![qi(1); alg.rank],
                    affine_value: qi(0),
                };
                let l = build_whittaker_truncation(Arc::clone(&alg), &eta, 1)?;
                let lambdas = vec![Weight::from_integers(&[1])];
                let pc = PointConfiguration::new(vec![qi(2)])?;
                let e = build_evaluation_module(Arc::clone(&alg), &lambdas, &pc, Some(4))?;
                let report = verify_tensor_submodule_shape(&e, &l, d_samples, seed, Some(1))?;
                Ok((report.verified(), report.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    Ok(checks)
}

fn suite_thm41(alg: Arc<LieAlgebraData>, cfg: &Value, seed: u64) -> Result<Vec<Check>> {
    let mut checks: Vec<Check> = Vec::new();
    let random_vectors = cfg
        .get("random_vectors")
        .and_then(Value::as_u64)
        .unwrap_or(0) as usize;
    let probes = cfg
        .get("random_divisibility_probes")
        .and_then(Value::as_u64)
        .unwrap_or(0) as usize;
    for (idx, inst) in cfg
        .get("instances")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("thm4.1 instances"))?
        .iter()
        .enumerate()
    {
        let lambdas = weights_from(inst.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
        let pc = points_from(inst.get("points").ok_or_else(|| anyhow!("points"))?)?;
        let window = inst.get("window").and_then(Value::as_i64);
        let alg = Arc::clone(&alg);
        let instance = inst.clone();
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("locally_finite_closure", instance);
            let run = || -> Result<(bool, Value)> {
                let e = build_evaluation_module(Arc::clone(&alg), &lambdas, &pc, window)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64));
                let mut starts = vec![{
                    let mut v = vec![Q::zero(); e.dim()];
                    v[0] = Q::one();
                    v
                }];
                for _ in 0..random_vectors {
                    loop {
                        let v: Vec<Q> = (0..e.dim())
                            .map(|_| qi(rng.gen_range(-2i64..=2)))
                            .collect();
                        if v.iter().any(|x| !Zero::is_zero(x)) {
                            starts.push(v);
                            break;
                        }
                    }
                }
                let mut witnesses = Vec::new();
                for v in &starts {
                    let result = locally_finite_closure(&e.rep, v)?;
                    if !result.annihilation_verified {
                        bail!("I(f) does not annihilate the closure");
                    }
                    // Postconditions: the closure is invariant under every
                    // positive generator inside the window.
                    let max_pow = e.window;
                    for k in 0..=max_pow {
                        for b in 0..alg.dim {
                            if k == 0 && b >= alg.num_positive_roots() {
                                continue;
                            }
                            let a = e
                                .rep
                                .action(&GenLabel::loop_gen(b, k))
                                .ok_or_else(|| anyhow!("window misses a generator"))?;
                            for basis_vec in result.closure.basis() {
                                if !result.closure.contains(&a.mul_vec(basis_vec)?) {
                                    bail!("closure is not invariant under the positive part");
                                }
                            }
                        }
                    }
                    // Kernel polynomial minimality probes: anything the
                    // generator kills is a multiple of it.
                    for (positive, root, f_alpha) in &result.root_polys {
                        let basis = if *positive {
                            alg.e_index(*root)
                        } else {
                            alg.f_index(*root)
                        };
                        for _ in 0..probes {
                            let deg = rng.gen_range(0..=(e.window as usize).saturating_sub(1));
                            let coeffs: Vec<Q> = (0..=deg)
                                .map(|_| qi(rng.gen_range(-2i64..=2)))
                                .collect();
                            let mut g = Poly::new(coeffs);
                            if !positive {
                                g = g.shift(1);
                            }
                            if g.is_zero() || g.degree() > e.window as usize {
                                continue;
                            }
                            let elem = AffineElement::from_polynomial(
                                Arc::clone(&alg),
                                basis,
                                &g,
                            );
                            let action = module_action_of(&e.rep, &elem)?;
                            let img = action.mul_vec(&result.eigenvector)?;
                            let kills = img.iter().all(Zero::is_zero);
                            if kills && !f_alpha.divides(&g) {
                                bail!("kernel polynomial fails minimality");
                            }
                        }
                    }
                    witnesses.push(result.to_json());
                }
                Ok((true, Value::Array(witnesses)))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    Ok(checks)
}

fn suite_lemma42(alg: Arc<LieAlgebraData>, cfg: &Value) -> Result<Vec<Check>> {
    let mut checks: Vec<Check> = Vec::new();
    let pullback = cfg
        .get("pullback")
        .cloned()
        .ok_or_else(|| anyhow!("lemma4.2 pullback"))?;
    {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("pullback_annihilator", pullback.clone());
            let run = || -> Result<(bool, Value)> {
                let lambdas =
                    weights_from(pullback.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
                let point = affinerep::rational::q_from_str(
                    pullback
                        .get("point")
                        .and_then(Value::as_str)
                        .ok_or_else(|| anyhow!("point"))?,
                )?;
                let window = pullback
                    .get("window")
                    .and_then(Value::as_u64)
                    .unwrap_or(4) as usize;
                let pc = PointConfiguration::new(vec![point.clone()])?;
                let s = build_s_module(
                    Arc::clone(&alg),
                    &EtaHom::zero(alg.rank),
                    &lambdas,
                    &pc,
                    Some(window),
                )?;
                let f2 = Poly::from_roots(&[point.clone(), point.clone()]);
                let ann = annihilator_in_quotient(&s, &f2)?;
                let predicted =
                    ideal_basis(Arc::clone(&alg), &Poly::linear_root(&point), window)?;
                let ok = &ann.kernel == predicted.subspace();
                Ok((ok, ann.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    let eta_line = cfg
        .get("eta_line")
        .cloned()
        .ok_or_else(|| anyhow!("lemma4.2 eta_line"))?;
    {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("eta_line_annihilator", eta_line.clone());
            let run = || -> Result<(bool, Value)> {
                let eta = EtaHom::from_json(&eta_line)?;
                let window = eta_line
                    .get("window")
                    .and_then(Value::as_u64)
                    .unwrap_or(4) as usize;
                let empty = PointConfiguration::new(vec![])?;
                let s = build_s_module(Arc::clone(&alg), &eta, &[], &empty, Some(window))?;
                let ann = annihilator_in_quotient(&s, &Poly::monomial(qi(1), 2))?;
                // The displayed space: non-simple raising directions over
                // C[t], simple raising and Cartan directions over <t>,
                // non-theta lowering over <t>, theta lowering over <t^2>.
                let npos = affinerep::affine::NposBasis::new(Arc::clone(&alg), window);
                let simples = alg.simple_root_indices();
                let mut ok = true;
                for i in 0..npos.len() {
                    let (basis, power) = npos.elem(i);
                    let expected_in = match alg.basis_kind(basis) {
                        affinerep::lie::BasisKind::PositiveRoot(r) => {
                            if simples.contains(&r) {
                                power >= 1
                            } else {
                                true
                            }
                        }
                        affinerep::lie::BasisKind::Cartan(_) => power >= 1,
                        affinerep::lie::BasisKind::NegativeRoot(r) => {
                            if r == alg.theta {
                                power >= 2
                            } else {
                                power >= 1
                            }
                        }
                    };
                    if expected_in {
                        let elem = npos.affine_element(i);
                        let coords = npos.coordinates(&elem)?;
                        if !ann.kernel.contains(&coords) {
                            ok = false;
                        }
                    }
                }
                Ok((ok, ann.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    // Trivial module: everything annihilates.
    {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("trivial_module_annihilator", Value::Null);
            let run = || -> Result<(bool, Value)> {
                let window = 3usize;
                let empty = PointConfiguration::new(vec![])?;
                let s = build_s_module(
                    Arc::clone(&alg),
                    &EtaHom::zero(alg.rank),
                    &[],
                    &empty,
                    Some(window),
                )?;
                let ann = annihilator_in_quotient(&s, &Poly::monomial(qi(1), 1))?;
                let npos = affinerep::affine::NposBasis::new(Arc::clone(&alg), window);
                Ok((ann.kernel.dim() == npos.len(), ann.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    Ok(checks)
}

fn suite_lemma43(alg: Arc<LieAlgebraData>, cfg: &Value, seed: u64) -> Result<Vec<Check>> {
    let mut instances: Vec<(EtaHom, Vec<Weight>, PointConfiguration)> = Vec::new();
    for inst in cfg
        .get("instances")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("lemma4.3 instances"))?
    {
        instances.push((
            EtaHom::from_json(inst.get("eta").ok_or_else(|| anyhow!("eta"))?)?,
            weights_from(inst.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?,
            points_from(inst.get("points").ok_or_else(|| anyhow!("points"))?)?,
        ));
    }
    let extra = cfg
        .get("random_instances")
        .and_then(Value::as_u64)
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        let m = rng.gen_range(1..=2usize);
        let eta = EtaHom {
            simple_values: (0..alg.rank).map(|_| qi(rng.gen_range(0..=2))).collect(),
            affine_value: qi(rng.gen_range(0..=1)),
        };
        instances.push((eta, random_weights(&mut rng, m), random_points(&mut rng, m)));
    }
    let mut checks: Vec<Check> = Vec::new();
    for (eta, lambdas, pc) in instances {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start(
                "classification_round_trip",
                json!({
                    "eta": eta.to_json(),
                    "lambda": lambdas.iter().map(Weight::to_json).collect::<Vec<_>>(),
                    "points": pc.to_json(),
                }),
            );
            let run = || -> Result<(bool, Value)> {
                let s = build_s_module(Arc::clone(&alg), &eta, &lambdas, &pc, None)?;
                let mut f = pc.vanishing_poly();
                if !eta.is_zero() {
                    f = f.shift(1);
                }
                let result = classify_nplus_module(&s, &f)?;
                let mut got: Vec<(Q, Weight)> = result
                    .points
                    .iter()
                    .cloned()
                    .zip(result.lambdas.iter().cloned())
                    .collect();
                let mut expect: Vec<(Q, Weight)> = pc
                    .points()
                    .iter()
                    .cloned()
                    .zip(lambdas.iter().cloned())
                    .collect();
                got.sort();
                expect.sort();
                let ok = result.eta == eta && got == expect;
                Ok((ok, result.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    Ok(checks)
}

fn suite_lemma51(alg: Arc<LieAlgebraData>, cfg: &Value, seed: u64) -> Result<Vec<Check>> {
    let eta = EtaHom::from_json(cfg.get("eta").ok_or_else(|| anyhow!("lemma5.1 eta"))?)?;
    let lambdas = weights_from(cfg.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
    let pc = points_from(cfg.get("points").ok_or_else(|| anyhow!("points"))?)?;
    let depths: Vec<usize> = cfg
        .get("depths")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("depths"))?
        .iter()
        .filter_map(Value::as_u64)
        .map(|d| d as usize)
        .collect();
    let mut checks: Vec<Check> = Vec::new();
    for depth in depths {
        let alg = Arc::clone(&alg);
        let eta = eta.clone();
        let lambdas = lambdas.clone();
        let pc = pc.clone();
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("intertwiner_phi_hat", json!({ "depth": depth }));
            let run = || -> Result<(bool, Value)> {
                let report = intertwiner_phi_hat(alg, &eta, &lambdas, &pc, depth)?;
                Ok((report.verified(), report.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    // Whittaker vector solve at the truncations, fixed character plus a
    // seed-randomized one.
    let random_depth = cfg
        .get("random_depth")
        .and_then(Value::as_u64)
        .unwrap_or(1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut characters = vec![eta.clone()];
    characters.push(EtaHom {
        simple_values: (0..alg.rank)
            .map(|_| nonzero_small(&mut rng))
            .collect(),
        affine_value: qi(rng.gen_range(0..=2)),
    });
    // Classification catalog: an irreducible finite-dimensional submodule
    // of the positive part induces up to a module in the highest-weight
    // family exactly when its character vanishes, and in the Whittaker
    // family otherwise.
    for (character, lams, ps) in [
        (EtaHom::zero(alg.rank), vec![1i64], vec![2i64]),
        (eta.clone(), vec![1], vec![2]),
    ] {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start(
                "classification_catalog",
                json!({ "eta": character.to_json() }),
            );
            let run = || -> Result<(bool, Value)> {
                let lambdas: Vec<Weight> =
                    lams.iter().map(|&l| Weight::from_integers(&[l])).collect();
                let pc = PointConfiguration::new(ps.iter().map(|&p| qi(p)).collect())?;
                let s = build_s_module(Arc::clone(&alg), &character, &lambdas, &pc, None)?;
                let mut f = pc.vanishing_poly();
                if !character.is_zero() {
                    f = f.shift(1);
                }
                let classified = classify_nplus_module(&s, &f)?;
                let family = if classified.eta.is_zero() {
                    "evaluation-tensor-highest-weight"
                } else {
                    "evaluation-tensor-whittaker"
                };
                let expected = if character.is_zero() {
                    "evaluation-tensor-highest-weight"
                } else {
                    "evaluation-tensor-whittaker"
                };
                Ok((
                    family == expected,
                    json!({ "family": family, "classified": classified.to_json() }),
                ))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    for character in characters {
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start(
                "whittaker_vectors",
                json!({ "eta": character.to_json(), "depth": random_depth }),
            );
            let run = || -> Result<(bool, Value)> {
                let m0 = build_whittaker_truncation(Arc::clone(&alg), &character, 0)?;
                let v0 = whittaker_vectors(&m0, &character)?;
                let mut ok = v0.dim() == 1;
                let m = build_whittaker_truncation(Arc::clone(&alg), &character, random_depth)?;
                let v = whittaker_vectors(&m, &character)?;
                let mut unit = vec![Q::zero(); m.dim];
                unit[m.cyclic_index] = Q::one();
                ok = ok && v.contains(&unit);
                Ok((ok, json!({ "depth0_dim": v0.dim(), "depth_dim": v.dim() })))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    Ok(checks)
}

fn suite_sec6(alg: Arc<LieAlgebraData>, cfg: &Value, seed: u64) -> Result<Vec<Check>> {
    let mut checks: Vec<Check> = Vec::new();
    for pair in cfg
        .get("pairs")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("sec6 pairs"))?
    {
        let left = pair.get("left").cloned().ok_or_else(|| anyhow!("left"))?;
        let right = pair.get("right").cloned().ok_or_else(|| anyhow!("right"))?;
        let expect = pair
            .get("expect")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("expect"))?
            .to_string();
        let alg = Arc::clone(&alg);
        let instance = pair.clone();
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("evaluation_iso", instance);
            let run = || -> Result<(bool, Value)> {
                let build = |v: &Value| -> Result<_> {
                    let lambdas = weights_from(v.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
                    let pc = points_from(v.get("points").ok_or_else(|| anyhow!("points"))?)?;
                    Ok(build_evaluation_module(Arc::clone(&alg), &lambdas, &pc, None)?)
                };
                let e1 = build(&left)?;
                let e2 = build(&right)?;
                let res = evaluation_iso(&e1, &e2)?;
                let ok = res.verdict.as_str() == expect
                    && (res.verdict != IsoVerdict::Isomorphic || res.intertwiner.is_some());
                Ok((ok, res.to_json()))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    // d-extension decision table: hw vs Whittaker never isomorphic,
    // matching data isomorphic, differing gamma or eta not isomorphic.
    {
        let alg = Arc::clone(&alg);
        let cfg = cfg.clone();
        checks.push(Box::new(move || {
            let timer = CheckTimer::start("d_extension_decision_table", Value::Null);
            let run = || -> Result<(bool, Value)> {
                let ev = cfg
                    .get("extension_eval")
                    .ok_or_else(|| anyhow!("extension_eval"))?;
                let lambdas = weights_from(ev.get("lambda").ok_or_else(|| anyhow!("lambda"))?)?;
                let pc = points_from(ev.get("points").ok_or_else(|| anyhow!("points"))?)?;
                let gamma =
                    AffineWeight::from_json(cfg.get("gamma").ok_or_else(|| anyhow!("gamma"))?)?;
                let gamma_other = AffineWeight::from_json(
                    cfg.get("gamma_other").ok_or_else(|| anyhow!("gamma_other"))?,
                )?;
                let eta = EtaHom::from_json(cfg.get("eta").ok_or_else(|| anyhow!("eta"))?)?;
                let eta_other =
                    EtaHom::from_json(cfg.get("eta_other").ok_or_else(|| anyhow!("eta_other"))?)?;
                let depth = cfg.get("depth").and_then(Value::as_u64).unwrap_or(1) as usize;
                let window = (depth as i64 + 2).max(pc.len() as i64 + 2);
                let e = build_evaluation_module(Arc::clone(&alg), &lambdas, &pc, Some(window))?;
                let hw_ext = |g: &AffineWeight| -> Result<TruncatedInducedModule> {
                    let l = build_hw_truncation(Arc::clone(&alg), g, depth, false)?;
                    Ok(build_d_extension(&tensor_modules(&e, &l)?, 1)?)
                };
                let wh_ext = |n: &EtaHom| -> Result<TruncatedInducedModule> {
                    let l = build_whittaker_truncation(Arc::clone(&alg), n, depth)?;
                    Ok(build_d_extension(&tensor_modules(&e, &l)?, 1)?)
                };
                let a = hw_ext(&gamma)?;
                let b = wh_ext(&eta)?;
                let mut table = Vec::new();
                let never = d_extension_iso(&a, &b)?;
                table.push(never.to_json());
                let mut ok = never.verdict == IsoVerdict::NeverIsomorphic;
                let same = d_extension_iso(&a, &hw_ext(&gamma)?)?;
                ok = ok && same.verdict == IsoVerdict::Isomorphic;
                table.push(same.to_json());
                let diff = d_extension_iso(&a, &hw_ext(&gamma_other)?)?;
                ok = ok && diff.verdict == IsoVerdict::NotIsomorphic;
                table.push(diff.to_json());
                let wh_same = d_extension_iso(&b, &wh_ext(&eta)?)?;
                ok = ok && wh_same.verdict == IsoVerdict::Isomorphic;
                table.push(wh_same.to_json());
                let wh_diff = d_extension_iso(&b, &wh_ext(&eta_other)?)?;
                ok = ok && wh_diff.verdict == IsoVerdict::NotIsomorphic;
                table.push(wh_diff.to_json());
                Ok((ok, Value::Array(table)))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    // Seed-randomized evaluation pairs: permutations are isomorphic.
    let random_pairs = cfg
        .get("random_pairs")
        .and_then(Value::as_u64)
        .unwrap_or(0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_pairs {
        let m = rng.gen_range(2..=3usize);
        let lambdas = random_weights(&mut rng, m);
        let pc = random_points(&mut rng, m);
        // A simultaneous rotation of the pairs.
        let mut lambdas2 = lambdas.clone();
        lambdas2.rotate_left(1);
        let mut pts2 = pc.points().to_vec();
        pts2.rotate_left(1);
        let alg = Arc::clone(&alg);
        checks.push(Box::new(move || {
            let timer = CheckTimer::start(
                "evaluation_iso_random_permutation",
                json!({
                    "lambda": lambdas.iter().map(Weight::to_json).collect::<Vec<_>>(),
                    "points": pc.to_json(),
                }),
            );
            let run = || -> Result<(bool, Value)> {
                let e1 = build_evaluation_module(Arc::clone(&alg), &lambdas, &pc, None)?;
                let pc2 = PointConfiguration::new(pts2.clone())?;
                let e2 = build_evaluation_module(Arc::clone(&alg), &lambdas2, &pc2, None)?;
                let res = evaluation_iso(&e1, &e2)?;
                Ok((
                    res.verdict == IsoVerdict::Isomorphic && res.intertwiner.is_some(),
                    res.to_json(),
                ))
            };
            match run() {
                Ok((ok, witness)) => timer.finish(ok, witness, Value::Null),
                Err(e) => timer.finish(false, json!(e.to_string()), Value::Null),
            }
        }));
    }
    Ok(checks)
}
