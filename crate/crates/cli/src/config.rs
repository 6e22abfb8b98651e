//! Run configuration: a TOML file with the spacetime table, the list of
//! analyses, seeds, tolerance overrides and optional verdict expectations.

use std::collections::BTreeMap;
use std::path::Path;

use confhol_core::zoo::SpacetimeSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Curvature,
    Recognize,
    TractorHolonomy,
    TangentHolonomy,
    ScreenHolonomy,
    AmbientCompare,
    Berger,
    PlaneWaveSections,
    ClassifyInvariants,
    CounterexampleIsoL,
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Curvature => "curvature",
            Analysis::Recognize => "recognize",
            Analysis::TractorHolonomy => "tractor_holonomy",
            Analysis::TangentHolonomy => "tangent_holonomy",
            Analysis::ScreenHolonomy => "screen_holonomy",
            Analysis::AmbientCompare => "ambient_compare",
            Analysis::Berger => "berger",
            Analysis::PlaneWaveSections => "plane_wave_sections",
            Analysis::ClassifyInvariants => "classify_invariants",
            Analysis::CounterexampleIsoL => "counterexample_iso_l",
        }
    }

    pub fn all() -> &'static [Analysis] {
        &[
            Analysis::Curvature,
            Analysis::Recognize,
            Analysis::TractorHolonomy,
            Analysis::TangentHolonomy,
            Analysis::ScreenHolonomy,
            Analysis::AmbientCompare,
            Analysis::Berger,
            Analysis::PlaneWaveSections,
            Analysis::ClassifyInvariants,
            Analysis::CounterexampleIsoL,
        ]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_svd")]
    pub svd_threshold: f64,
}

fn default_rtol() -> f64 {
    1e-10
}
fn default_atol() -> f64 {
    1e-12
}
fn default_svd() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: default_rtol(),
            atol: default_atol(),
            svd_threshold: default_svd(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Random smooth loops in the holonomy ensembles.
    #[serde(default = "default_loops")]
    pub n_random_loops: usize,
    /// Conjugation path endpoints.
    #[serde(default = "default_lasso")]
    pub n_lasso: usize,
    /// Refinement pass for holonomy estimates (doubled loops, halved rtol).
    #[serde(default = "default_true")]
    pub stability_check: bool,
    /// Model algebra for the berger analysis: "wave_pattern", "iso_l",
    /// "so" (with so_p, so_q), or "estimated_tractor".
    #[serde(default = "default_berger_model")]
    pub berger_model: String,
    #[serde(default = "default_wave_n")]
    pub wave_n: usize,
    #[serde(default)]
    pub so_p: usize,
    #[serde(default = "default_so_q")]
    pub so_q: usize,
}

fn default_loops() -> usize {
    32
}
fn default_lasso() -> usize {
    8
}
fn default_true() -> bool {
    true
}
fn default_berger_model() -> String {
    "wave_pattern".into()
}
fn default_wave_n() -> usize {
    2
}
fn default_so_q() -> usize {
    4
}

impl Default for Options {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub spacetime: SpacetimeSpec,
    pub analyses: Vec<Analysis>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub sample_points: usize,
    #[serde(default = "default_out")]
    pub output_path: String,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub options: Options,
    /// Expected summary values, keyed "analysis.field"; mismatches set the
    /// exit code to 1.
    #[serde(default)]
    pub expect: BTreeMap<String, toml::Value>,
}

fn default_schema() -> u32 {
    1
}
fn default_seed() -> u64 {
    7
}
fn default_samples() -> usize {
    40
}
fn default_out() -> String {
    "reports".into()
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<RunConfig, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| format!("config parse: {e}"))?;
        if cfg.analyses.is_empty() {
            return Err("config must list at least one analysis".into());
        }
        if cfg.tolerances.rtol <= 0.0 || cfg.tolerances.atol <= 0.0 || cfg.tolerances.svd_threshold <= 0.0
        {
            return Err("tolerances must be positive".into());
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_config() {
        let cfg = RunConfig::from_str(
            r#"
            analyses = ["curvature"]
            [spacetime]
            family = "flat"
            dim = 4
            time_dims = 1
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.analyses.len(), 1);
        assert!(matches!(
            cfg.spacetime,
            SpacetimeSpec::Flat {
                dim: 4,
                time_dims: 1
            }
        ));
    }

    #[test]
    fn parses_nested_base_and_expect() {
        let cfg = RunConfig::from_str(
            r#"
            analyses = ["tangent_holonomy"]
            seed = 11
            [spacetime]
            family = "ambient_ricci_flat"
            [spacetime.base]
            family = "einstein_model"
            kind = "sphere"
            dim = 2
            [expect]
            "tangent_holonomy.dim" = 3
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.expect.len(), 1);
    }

    #[test]
    fn rejects_empty_analyses_and_bad_tolerances() {
        assert!(RunConfig::from_str(
            r#"
            analyses = []
            [spacetime]
            family = "flat"
            dim = 3
            "#
        )
        .is_err());
        assert!(RunConfig::from_str(
            r#"
            analyses = ["curvature"]
            [spacetime]
            family = "flat"
            dim = 3
            [tolerances]
            rtol = -1.0
            "#
        )
        .is_err());
    }
}
