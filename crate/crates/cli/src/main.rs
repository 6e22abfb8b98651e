//! Batch front-end: parse a config, build the family member, run the named
//! analyses, write one JSON report per analysis plus a summary table.
//!
//! Exit codes: 0 = all verdict expectations met, 1 = an expectation failed,
//! 2 = usage or specification error, 3 = numerical failure.

mod analyses;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use confhol_core::zoo;
use confhol_core::Error;
use serde_json::{json, Value};

use crate::config::{Analysis, RunConfig};

#[derive(Parser)]
#[command(name = "confhol", version, about = "Conformal tractor holonomy analyses over coordinate metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses listed in a config file.
    Run {
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the report output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress the text table; write reports only.
        #[arg(long)]
        json_only: bool,
        /// Global multiplier on verdict tolerances for robustness sweeps.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
    /// List the built-in metric families and analyses.
    Families,
    /// Check a config without running: parse, build, and report diagnostics.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            seed,
            out,
            json_only,
            tol_scale,
        } => run(config, seed, out, json_only, tol_scale),
        Command::Families => {
            println!("{}", serde_json::to_string_pretty(&families_catalog()).unwrap());
            ExitCode::SUCCESS
        }
        Command::Validate { config } => validate(config),
    }
}

fn exit_for(err: &Error) -> ExitCode {
    match err {
        Error::IntegratorFailure(_) | Error::DomainExit(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

/// Machine-readable error object on stderr, one line.
fn emit_error(stage: &str, message: &str) {
    eprintln!(
        "{}",
        json!({ "error": { "stage": stage, "message": message } })
    );
}

fn run(
    path: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    json_only: bool,
    tol_scale: f64,
) -> ExitCode {
    let mut cfg = match RunConfig::from_path(&path) {
        Ok(c) => c,
        Err(e) => {
            emit_error("config", &e);
            return ExitCode::from(2);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.output_path = o.display().to_string();
    }
    let st = match zoo::build(&cfg.spacetime) {
        Ok(st) => st,
        Err(e) => {
            emit_error("spacetime", &e.to_string());
            return exit_for(&e);
        }
    };

    let out_dir = PathBuf::from(&cfg.output_path);
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        emit_error("io", &format!("cannot create output directory: {e}"));
        return ExitCode::from(2);
    }

    let resolved_config = serde_json::to_value(&cfg).unwrap();
    let mut summary_all: BTreeMap<String, Value> = BTreeMap::new();
    let mut failures = Vec::new();
    for &analysis in &cfg.analyses {
        match analyses::run_analysis(analysis, &st, &cfg, tol_scale) {
            Ok(output) => {
                let report = json!({
                    "schema": 1,
                    "tool_version": env!("CARGO_PKG_VERSION"),
                    "analysis": analysis.name(),
                    "seed": cfg.seed,
                    "tol_scale": tol_scale,
                    "config": resolved_config,
                    "report": output.report,
                    "summary": output.summary,
                });
                let file = out_dir.join(format!("{}.json", analysis.name()));
                let mut text = serde_json::to_string_pretty(&report).unwrap();
                text.push('\n');
                if let Err(e) = std::fs::write(&file, text) {
                    emit_error("io", &format!("cannot write report {}: {e}", file.display()));
                    return ExitCode::from(2);
                }
                summary_all.extend(output.summary);
            }
            Err(e) => {
                emit_error(analysis.name(), &e.to_string());
                failures.push((analysis, e));
            }
        }
    }
    if let Some((_, e)) = failures.first() {
        return exit_for(e);
    }

    if !json_only {
        println!("{:<48} value", "summary key");
        println!("{}", "-".repeat(64));
        for (k, v) in &summary_all {
            println!("{k:<48} {v}");
        }
    }

    // Expectation checks.
    let mut mismatched = false;
    for (key, expected) in &cfg.expect {
        let got = summary_all.get(key);
        let expected_json = toml_to_json(expected);
        let ok = match got {
            Some(v) => values_match(v, &expected_json),
            None => false,
        };
        if !ok {
            mismatched = true;
            eprintln!(
                "{}",
                json!({ "error": {
                    "stage": "expect",
                    "key": key,
                    "actual": got,
                    "expected": expected_json,
                }})
            );
        }
    }
    if mismatched {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn toml_to_json(v: &toml::Value) -> Value {
    match v {
        toml::Value::String(s) => json!(s),
        toml::Value::Integer(i) => json!(i),
        toml::Value::Float(f) => json!(f),
        toml::Value::Boolean(b) => json!(b),
        toml::Value::Array(a) => Value::Array(a.iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => Value::Object(
            t.iter()
                .map(|(k, v)| (k.clone(), toml_to_json(v)))
                .collect(),
        ),
        toml::Value::Datetime(d) => json!(d.to_string()),
    }
}

fn values_match(got: &Value, expected: &Value) -> bool {
    match (got, expected) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
            (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
        }
        _ => got == expected,
    }
}

fn families_catalog() -> Value {
    json!({
        "families": [
            {"family": "flat", "params": {"dim": "integer >= 2", "time_dims": "integer, default 0"}},
            {"family": "pp_wave", "params": {"n": "screen dimension", "f": "potential f(y*, z), x-independent"}},
            {"family": "pr_wave", "params": {"n": "screen dimension", "f": "potential f(x, y*, z)"}},
            {"family": "plane_wave", "params": {"n": "screen dimension", "a": "n x n symmetric table of z-expressions"}},
            {"family": "cahen_wallach", "params": {"n": "screen dimension", "a": "n x n symmetric constants"}},
            {"family": "recurrent_general", "params": {"n": "screen dimension", "f": "f(x, y*, z)", "u": "n cross-term expressions u_i(y*, z)", "g_block": "n x n symmetric screen metric expressions"}},
            {"family": "einstein_model", "params": {"kind": "sphere | hyperbolic", "dim": "integer >= 2"}},
            {"family": "riemannian_block_product", "params": {"wave": "nested wave spec with parallel field", "block": "nested Riemannian spec"}},
            {"family": "ambient_einstein", "params": {"base": "nested Einstein spec with nonzero scalar"}},
            {"family": "ambient_ricci_flat", "params": {"base": "nested spec"}},
            {"family": "cone", "params": {"base": "nested Einstein spec with nonzero scalar"}},
            {"family": "generic", "params": {"coords": "coordinate names", "signature": "(neg, pos)", "components": "list of (i, j, expression)"}},
        ],
        "analyses": Analysis::all().iter().map(|a| a.name()).collect::<Vec<_>>(),
        "defaults": {
            "seed": 7, "sample_points": 40, "rtol": 1e-10, "atol": 1e-12,
            "svd_threshold": 1e-6, "n_random_loops": 32, "n_lasso": 8,
        },
        "expression_language": "+ - * / ^, exp, log, sin, cos, pi, numeric literals, coordinate symbols",
    })
}

fn validate(path: PathBuf) -> ExitCode {
    let cfg = match RunConfig::from_path(&path) {
        Ok(c) => c,
        Err(e) => {
            println!("diagnostic: config parse failed: {e}");
            return ExitCode::SUCCESS;
        }
    };
    let mut diagnostics: Vec<String> = Vec::new();
    match zoo::build(&cfg.spacetime) {
        Ok(st) => {
            for &a in &cfg.analyses {
                match a {
                    Analysis::Recognize | Analysis::ScreenHolonomy => {
                        if st.recurrent.is_none() {
                            diagnostics.push(format!(
                                "{}: family exposes no recurrent lightlike field",
                                a.name()
                            ));
                        }
                    }
                    Analysis::PlaneWaveSections
                        if !matches!(
                            st.spec,
                            zoo::SpacetimeSpec::PlaneWave { .. }
                                | zoo::SpacetimeSpec::CahenWallach { .. }
                        ) =>
                    {
                        diagnostics
                            .push(format!("{}: needs a plane-wave family member", a.name()));
                    }
                    Analysis::AmbientCompare => {
                        if st.base.is_none() {
                            diagnostics
                                .push(format!("{}: needs an ambient or cone family", a.name()));
                        }
                    }
                    Analysis::TractorHolonomy | Analysis::ClassifyInvariants => {
                        if st.dim() < 4 {
                            diagnostics.push(format!(
                                "{}: tractor curvature needs dimension >= 4",
                                a.name()
                            ));
                        }
                    }
                    _ => {}
                }
            }
        }
        Err(e) => diagnostics.push(format!("spacetime: {e}")),
    }
    if diagnostics.is_empty() {
        println!("ok: config is runnable");
    } else {
        for d in &diagnostics {
            println!("diagnostic: {d}");
        }
    }
    ExitCode::SUCCESS
}
