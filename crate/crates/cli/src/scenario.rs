//! Scenario documents: actions, verifiers and run settings, as JSON.
//!
//! Parsing fills every default, so emitting a parsed scenario and parsing it
//! again gives the same value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_K: f64 = 1e4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub rank: usize,
    #[serde(default)]
    pub seed: u64,
    pub actions: BTreeMap<String, ActionSpec>,
    pub verifiers: Vec<VerifierSpec>,
    #[serde(default)]
    pub config: RunConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "K")]
    pub k: f64,
    pub c_delta: f64,
    pub k_max: usize,
    pub tolerance: f64,
    pub window_cap: usize,
    pub epsilon: f64,
    pub ref_factor: f64,
    pub u_depth: usize,
    pub max_frontier: usize,
    pub class_cap: usize,
    pub n_max: usize,
    pub lo_candidates: usize,
    /// Largest number of matrix products enumerated per instance.
    pub product_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: DEFAULT_K,
            c_delta: 4.0,
            k_max: 8,
            tolerance: 1e-9,
            window_cap: 12,
            epsilon: 1e-9,
            ref_factor: 2.0,
            u_depth: 8,
            max_frontier: 1_000_000,
            class_cap: 2_000_000,
            n_max: 10,
            lo_candidates: 16,
            product_cap: 1 << 20,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub format: Format,
}

/// A real number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Complex([f64; 2]),
}

impl Num {
    pub fn re(&self) -> f64 {
        match self {
            Num::Real(x) => *x,
            Num::Complex([x, _]) => *x,
        }
    }

    pub fn im(&self) -> f64 {
        match self {
            Num::Real(_) => 0.0,
            Num::Complex([_, y]) => *y,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedWord {
    pub word: String,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

fn six() -> usize {
    6
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Möbius action on ℍ² or ℍ³.
    #[default]
    Mobius,
    /// `ln σ₁` of the same matrices.
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionSpec {
    /// Weighted Cayley tree; unit weights by default.
    Tree { weights: Option<Vec<f64>> },
    /// Word metric of a weighted generating set.
    WordMetric { elements: Vec<WeightedWord> },
    /// Generator matrices `[a, b, c, d]` acting on ℍ² (`dim` 2) or ℍ³ (`dim` 3).
    Mobius {
        #[serde(default = "two")]
        dim: usize,
        generators: Vec<[Num; 4]>,
        delta: Option<f64>,
    },
    /// Real generator matrices, given as rows.
    Linear {
        generators: Vec<Vec<Vec<f64>>>,
        alpha: Option<f64>,
        #[serde(default = "six")]
        certificate_radius: usize,
    },
    Schottky {
        stretches: Vec<f64>,
        angles: Vec<Num>,
        delta: Option<f64>,
        #[serde(default)]
        representation: Representation,
        #[serde(default = "six")]
        certificate_radius: usize,
    },
    /// `count` seeded Gaussian matrices of determinant 1.
    RandomLinear { dim: usize, count: usize },
    /// A named built-in action.
    Preset { name: String },
}

/// Built-in actions.
pub fn preset(name: &str) -> Option<ActionSpec> {
    match name {
        "cor17-default" => Some(ActionSpec::Schottky {
            stretches: vec![4.0, 4.0],
            angles: vec![Num::Real(0.0), Num::Real(1.2)],
            delta: Some(4f64.ln()),
            representation: Representation::Mobius,
            certificate_radius: 6,
        }),
        _ => None,
    }
}

pub const PRESETS: &[&str] = &["cor17-default"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub max_size: usize,
    pub max_len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub dim: usize,
    #[serde(default = "two")]
    pub size: usize,
    pub instances: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SandwichCase {
    #[default]
    Cobounded,
    RoughGeodesic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum VerifierSpec {
    /// Window supremum and dilation bracket.
    Dilation {
        x: String,
        xstar: String,
        #[serde(rename = "L")]
        l: Vec<f64>,
    },
    Thm13 {
        x: String,
        xstar: String,
        #[serde(rename = "L")]
        l: Vec<f64>,
        #[serde(rename = "K")]
        k: Option<f64>,
        delta: Option<f64>,
        #[serde(rename = "D")]
        d: Option<f64>,
    },
    Cor17 {
        x: String,
        xstar: String,
        #[serde(rename = "L")]
        l: Vec<f64>,
        #[serde(rename = "K")]
        k: Option<f64>,
        #[serde(rename = "D")]
        d: Option<f64>,
    },
    Thm15 {
        xstar: String,
        generating_set: String,
        #[serde(rename = "L")]
        l: Vec<usize>,
        #[serde(rename = "K")]
        k: Option<f64>,
        delta: Option<f64>,
    },
    Cor14 {
        x: String,
        xstar: String,
        #[serde(rename = "L")]
        l: Vec<f64>,
        alpha: Option<f64>,
        beta: Option<f64>,
        c0: Option<f64>,
    },
    Anosov {
        rho: String,
        tau: String,
        #[serde(rename = "L")]
        l: Vec<f64>,
        #[serde(default)]
        alpha: f64,
        c_m: Option<f64>,
        d_m: Option<usize>,
        #[serde(default = "six")]
        certificate_radius: usize,
    },
    Bf {
        x: String,
        #[serde(default)]
        subsets: Vec<Vec<String>>,
        sweep: Option<SweepSpec>,
        #[serde(rename = "K")]
        k: Option<f64>,
        delta: Option<f64>,
        n_max: Option<usize>,
    },
    Bochi {
        matrices: Option<String>,
        ensemble: Option<EnsembleSpec>,
        n_max: Option<usize>,
        c_m: Option<f64>,
        d_m: Option<usize>,
    },
    Jsr {
        matrices: String,
        n_max: Option<usize>,
    },
    Prop31 {
        x: String,
        generating_set: String,
        #[serde(default = "six")]
        radius: usize,
        n_max: Option<usize>,
    },
    Lemma25 {
        x: String,
        n: usize,
        ball_radius: usize,
        #[serde(default)]
        case: SandwichCase,
        #[serde(rename = "D")]
        d: Option<f64>,
        alpha: Option<f64>,
    },
    Lemma32 {
        x: String,
        ball_radius: usize,
        #[serde(default = "one_usize")]
        f_radius: usize,
        #[serde(default = "five")]
        max_f: usize,
    },
    Delta {
        d1: String,
        d2: String,
        #[serde(rename = "L")]
        l: Vec<f64>,
    },
}

fn one_usize() -> usize {
    1
}

fn five() -> usize {
    5
}

pub const VERIFIER_NAMES: &[&str] = &[
    "dilation", "thm13", "cor17", "thm15", "cor14", "anosov", "bf", "bochi", "jsr", "prop31",
    "lemma25", "lemma32", "delta",
];

impl VerifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            VerifierSpec::Dilation { .. } => "dilation",
            VerifierSpec::Thm13 { .. } => "thm13",
            VerifierSpec::Cor17 { .. } => "cor17",
            VerifierSpec::Thm15 { .. } => "thm15",
            VerifierSpec::Cor14 { .. } => "cor14",
            VerifierSpec::Anosov { .. } => "anosov",
            VerifierSpec::Bf { .. } => "bf",
            VerifierSpec::Bochi { .. } => "bochi",
            VerifierSpec::Jsr { .. } => "jsr",
            VerifierSpec::Prop31 { .. } => "prop31",
            VerifierSpec::Lemma25 { .. } => "lemma25",
            VerifierSpec::Lemma32 { .. } => "lemma32",
            VerifierSpec::Delta { .. } => "delta",
        }
    }

    /// Action names the verifier refers to.
    pub fn action_refs(&self) -> Vec<(&'static str, &str)> {
        match self {
            VerifierSpec::Dilation { x, xstar, .. }
            | VerifierSpec::Thm13 { x, xstar, .. }
            | VerifierSpec::Cor17 { x, xstar, .. }
            | VerifierSpec::Cor14 { x, xstar, .. } => vec![("x", x), ("xstar", xstar)],
            VerifierSpec::Thm15 {
                xstar,
                generating_set,
                ..
            } => vec![("xstar", xstar), ("generating_set", generating_set)],
            VerifierSpec::Anosov { rho, tau, .. } => vec![("rho", rho), ("tau", tau)],
            VerifierSpec::Bf { x, .. }
            | VerifierSpec::Lemma25 { x, .. }
            | VerifierSpec::Lemma32 { x, .. } => vec![("x", x)],
            VerifierSpec::Prop31 {
                x, generating_set, ..
            } => vec![("x", x), ("generating_set", generating_set)],
            VerifierSpec::Bochi { matrices, .. } => {
                matrices.iter().map(|m| ("matrices", m.as_str())).collect()
            }
            VerifierSpec::Jsr { matrices, .. } => vec![("matrices", matrices)],
            VerifierSpec::Delta { d1, d2, .. } => vec![("d1", d1), ("d2", d2)],
        }
    }

    /// Replaces unset universal constants with the run-wide value.
    fn fill_defaults(&mut self, cfg: &RunConfig) {
        match self {
            VerifierSpec::Thm13 { k, .. }
            | VerifierSpec::Cor17 { k, .. }
            | VerifierSpec::Thm15 { k, .. }
            | VerifierSpec::Bf { k, .. } => {
                k.get_or_insert(cfg.k);
            }
            _ => {}
        }
    }
}

fn fill_action(spec: &mut ActionSpec, rank: usize, path: &str) -> Result<(), CliError> {
    if let ActionSpec::Preset { name } = spec {
        *spec = preset(name).ok_or_else(|| {
            CliError::Scenario(format!(
                "{path}.name: unknown preset `{name}`, expected one of {}",
                PRESETS.join(", ")
            ))
        })?;
    }
    match spec {
        ActionSpec::Tree { weights } => {
            weights.get_or_insert_with(|| vec![1.0; rank]);
        }
        ActionSpec::Mobius { delta, .. } => {
            delta.get_or_insert(std::f64::consts::LN_2);
        }
        ActionSpec::Schottky {
            delta,
            representation: Representation::Mobius,
            ..
        } => {
            delta.get_or_insert(std::f64::consts::LN_2);
        }
        _ => {}
    }
    Ok(())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Scenario(msg()))
    }
}

impl Scenario {
    /// Parses and validates a scenario, filling defaults.
    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Scenario(format!(
                "{path}: {inner} (line {}, column {})",
                inner.line(),
                inner.column()
            ))
        })?;
        s.fill_and_validate()?;
        Ok(s)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn fill_and_validate(&mut self) -> Result<(), CliError> {
        check(self.rank >= 1, || "rank: must be at least 1".into())?;
        for (name, spec) in self.actions.iter_mut() {
            fill_action(spec, self.rank, &format!("actions.{name}"))?;
        }
        check(!self.verifiers.is_empty(), || {
            "verifiers: at least one verifier is required".into()
        })?;
        let cfg = self.config;
        check(cfg.k >= 0.0 && cfg.tolerance >= 0.0 && cfg.c_delta >= 0.0, || {
            "config: K, c_delta and tolerance must be nonnegative".into()
        })?;
        check(cfg.k_max >= 2, || "config.k_max: must be at least 2".into())?;
        check(cfg.n_max >= 2, || "config.n_max: must be at least 2".into())?;
        for (i, v) in self.verifiers.iter_mut().enumerate() {
            for (field, target) in v.action_refs() {
                check(self.actions.contains_key(target), || {
                    format!("verifiers[{i}].{field}: no action named `{target}`")
                })?;
            }
            if let VerifierSpec::Bochi {
                matrices, ensemble, ..
            } = v
            {
                check(matrices.is_some() != ensemble.is_some(), || {
                    format!("verifiers[{i}]: give exactly one of `matrices` and `ensemble`")
                })?;
            }
            if let VerifierSpec::Bf { subsets, sweep, .. } = v {
                check(!subsets.is_empty() || sweep.is_some(), || {
                    format!("verifiers[{i}]: give `subsets` or `sweep`")
                })?;
            }
            v.fill_defaults(&cfg);
        }
        Ok(())
    }
}
