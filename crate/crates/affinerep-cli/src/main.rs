//! Command-line driver: construct modules, apply elements, run the
//! verification suites, and invoke the isomorphism, classification and
//! closure deciders. All input and output rationals are canonical `p/q`
//! strings; reports are JSON.

mod descriptor;
mod suites;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use affinerep::affine::AffineElement;
use affinerep::analysis::{
    classify_nplus_module, d_extension_iso, evaluation_iso, locally_finite_closure,
};
use affinerep::linalg::{vec_from_json, vec_to_json};
use affinerep::modules::module_action_of;
use affinerep::poly::Poly;
use affinerep::rational::Q;
use affinerep::report::suite_report;

use descriptor::{build_from_instance, load_module, BuiltModule};

const DEFAULT_SUITES: &str = include_str!("../suites.json");

#[derive(Parser)]
#[command(
    name = "affinerep",
    about = "Exact-arithmetic constructions and verification for modules over untwisted affine Kac-Moody algebras",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a module from an instance descriptor file and write it out.
    Construct {
        /// Path to the instance descriptor JSON.
        desc: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the generator power window.
        #[arg(long)]
        window: Option<i64>,
        /// Override the truncation depth of the top-level family.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Apply an affine-algebra element to a vector of a stored module.
    Act {
        #[arg(long)]
        module: PathBuf,
        /// The element as JSON: {"loop": [[coeffs, power], ...], "K": "p/q", "d": "p/q"}.
        #[arg(long)]
        element: String,
        /// The vector: a JSON array of "p/q" entries, or "#i" for the i-th
        /// basis vector.
        #[arg(long)]
        vector: String,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run a verification suite over its configured instance grid.
    Verify {
        /// One of: lemma3.1 thm3.2 thm3.3 thm4.1 lemma4.2 lemma4.3 lemma5.1 sec6 all.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Alternative suite grid configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Decide isomorphism of two stored modules.
    Iso {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Classify a stored module over the positive part.
    Classify {
        module: PathBuf,
        /// Annihilator polynomial coefficients, lowest first, as a JSON
        /// array of "p/q" strings.
        #[arg(long)]
        ftilde: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Locally-finite closure of a vector in a stored module.
    Closure {
        module: PathBuf,
        #[arg(long)]
        vector: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn check_format(format: &str) -> Result<()> {
    if format != "json" {
        bail!("unsupported output format {format:?}; only json is available");
    }
    Ok(())
}

fn write_or_print(out: Option<&PathBuf>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn threads_cap() -> usize {
    std::env::var("AFFINEREP_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct {
            desc,
            out,
            window,
            depth,
            format,
        } => {
            check_format(&format)?;
            let text = std::fs::read_to_string(&desc)
                .with_context(|| format!("reading descriptor {}", desc.display()))?;
            let value: Value = serde_json::from_str(&text)?;
            let built = build_from_instance(&value, window, depth)?;
            println!("{}", built.summary());
            if let Some(path) = &out {
                write_or_print(Some(path), &built.to_json())?;
                println!("written: {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Act {
            module,
            element,
            vector,
            format,
        } => {
            check_format(&format)?;
            let built = load_module(&module)?;
            let elem_value: Value = serde_json::from_str(&element)?;
            let elem =
                AffineElement::from_json(std::sync::Arc::clone(built.algebra()), &elem_value)?;
            let vec = parse_vector(&vector, built.dim())?;
            let image = act(&built, &elem, &vec)?;
            println!("{}", serde_json::to_string(&vec_to_json(&image))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            seed,
            out,
            config,
            format,
        } => {
            check_format(&format)?;
            let config_value: Value = match &config {
                Some(path) => serde_json::from_str(
                    &std::fs::read_to_string(path)
                        .with_context(|| format!("reading config {}", path.display()))?,
                )?,
                None => serde_json::from_str(DEFAULT_SUITES)?,
            };
            let names: Vec<&str> = if suite == "all" {
                suites::SUITES.to_vec()
            } else if suites::SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                bail!(
                    "unknown suite {suite:?}; known: {} all",
                    suites::SUITES.join(" ")
                );
            };
            let threads = threads_cap();
            let mut all_pass = true;
            let mut reports = Vec::new();
            for name in names {
                let checks = suites::run_suite(name, seed, &config_value, threads)?;
                let passed = checks.iter().all(|c| c.verdict);
                let failed = checks.iter().filter(|c| !c.verdict).count();
                println!(
                    "suite {name}: {} ({} checks, {} failed)",
                    if passed { "PASS" } else { "FAIL" },
                    checks.len(),
                    failed
                );
                all_pass &= passed;
                reports.push(suite_report(name, seed, &checks));
            }
            let combined = if reports.len() == 1 {
                reports.pop().unwrap()
            } else {
                json!({ "suites": reports, "seed": seed })
            };
            write_or_print(out.as_ref(), &combined)?;
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Iso {
            left,
            right,
            out,
            format,
        } => {
            check_format(&format)?;
            let l = load_module(&left)?;
            let r = load_module(&right)?;
            let report = match (&l, &r) {
                (BuiltModule::Evaluation(a), BuiltModule::Evaluation(b)) => {
                    evaluation_iso(a, b)?.to_json()
                }
                (BuiltModule::Truncated(a), BuiltModule::Truncated(b)) => {
                    d_extension_iso(a, b)?.to_json()
                }
                _ => bail!("iso expects two evaluation modules or two d-extensions"),
            };
            write_or_print(out.as_ref(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify {
            module,
            ftilde,
            out,
            format,
        } => {
            check_format(&format)?;
            let built = load_module(&module)?;
            let BuiltModule::Rep { rep, .. } = &built else {
                bail!("classification expects a module over the positive part");
            };
            let coeff_value: Value = serde_json::from_str(&ftilde)?;
            let coeffs = vec_from_json(&coeff_value)?;
            let poly = Poly::new(coeffs);
            let result = classify_nplus_module(rep, &poly)?;
            write_or_print(out.as_ref(), &result.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Closure {
            module,
            vector,
            out,
            format,
        } => {
            check_format(&format)?;
            let built = load_module(&module)?;
            let rep = match &built {
                BuiltModule::Evaluation(e) => &e.rep,
                BuiltModule::Rep { rep, .. } => rep,
                BuiltModule::Truncated(_) => {
                    bail!("closure expects a module with total action; use an evaluation module")
                }
            };
            let vec = parse_vector(&vector, rep.dim)?;
            let result = locally_finite_closure(rep, &vec)?;
            write_or_print(out.as_ref(), &result.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_vector(input: &str, dim: usize) -> Result<Vec<Q>> {
    if let Some(index) = input.strip_prefix('#') {
        let i: usize = index.parse().context("basis index after '#'")?;
        if i >= dim {
            bail!("basis index {i} out of range for dimension {dim}");
        }
        let mut v = vec![Q::from_integer(0.into()); dim];
        v[i] = Q::from_integer(1.into());
        return Ok(v);
    }
    let value: Value = serde_json::from_str(input)?;
    let v = vec_from_json(&value)?;
    if v.len() != dim {
        bail!("vector length {} does not match dimension {}", v.len(), dim);
    }
    Ok(v)
}

/// Applies an element to a vector, respecting partial-action domains.
fn act(built: &BuiltModule, elem: &AffineElement, vec: &[Q]) -> Result<Vec<Q>> {
    match built {
        BuiltModule::Evaluation(e) => {
            let action = module_action_of(&e.rep, elem).map_err(|err| {
                anyhow!("{err}; the module window is [{}, {}]", -e.window, e.window)
            })?;
            Ok(action.mul_vec(vec)?)
        }
        BuiltModule::Rep { rep, .. } => Ok(module_action_of(rep, elem)?.mul_vec(vec)?),
        BuiltModule::Truncated(t) => {
            use affinerep::lie::rep::GenLabel;
            use num::Zero;
            let mut out = vec![Q::zero(); t.dim];
            let mut apply = |label: GenLabel, coef: &Q| -> Result<()> {
                if coef.is_zero() {
                    return Ok(());
                }
                let action = t.action(&label).ok_or_else(|| {
                    anyhow!(
                        "element outside the module window at {}",
                        label.describe(&t.algebra)
                    )
                })?;
                let image = action.apply(vec).ok_or_else(|| {
                    anyhow!(
                        "action of {} undefined on this vector (truncation boundary)",
                        label.describe(&t.algebra)
                    )
                })?;
                for (o, x) in out.iter_mut().zip(&image) {
                    *o = &*o + &(x * coef);
                }
                Ok(())
            };
            for (k, gv) in elem.loop_terms() {
                for (b, c) in gv.iter().enumerate() {
                    apply(GenLabel::loop_gen(b, k), c)?;
                }
            }
            apply(GenLabel::CentralK, &elem.c_k)?;
            apply(GenLabel::DerivationD, &elem.c_d)?;
            Ok(out)
        }
    }
}
