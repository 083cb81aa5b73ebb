//! Builds the actions of a scenario and runs its verifiers.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use mls_core::actions::{ActionModel, StableConfig};
use mls_core::bounds::{
    anosov_dilation_bound, cor14_check, delta_metric, dilation_report, lemma25_check,
    lemma32_search, linear_with_gap_comparison, prop31_check, thm13_check, thm15_check,
    DilationReport, Lemma25Case, Thm13Params, Thm13Variant, Verdict, WindowConfig,
};
use mls_core::jsl::{
    bf_check, bf_tree_sweep, bochi_check, jsr_bracket, BochiConstants, JslConfig,
};
use mls_core::linalg::{random_unit_det, C2};
use mls_core::spaces::{LinearRepModel, MobiusModel, SchottkyBuilder, TreeModel, WordMetricModel};
use mls_core::words::{Alphabet, GeneratingSet, SearchLimits, Word};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{exit, CliError};
use crate::scenario::{
    ActionSpec, Representation, RunConfig, SandwichCase, Scenario, VerifierSpec,
};

/// A scenario action in every form the verifiers may need.
#[derive(Clone)]
pub struct BuiltAction {
    pub model: Option<Arc<dyn ActionModel>>,
    pub linear: Option<LinearRepModel>,
    pub matrices: Option<Vec<DMatrix<f64>>>,
    pub warnings: Vec<String>,
}

impl BuiltAction {
    fn model(&self, name: &str) -> mls_core::Result<&dyn ActionModel> {
        self.model
            .as_deref()
            .ok_or_else(|| mls_core::Error::input(format!("action `{name}` is not an action of the group")))
    }
}

fn rank_check(name: &str, got: usize, rank: usize) -> mls_core::Result<()> {
    if got != rank {
        return Err(mls_core::Error::input(format!(
            "action `{name}` has {got} generators, the scenario rank is {rank}"
        )));
    }
    Ok(())
}

fn matrix(name: &str, rows: &[Vec<f64>]) -> mls_core::Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(mls_core::Error::input(format!(
            "action `{name}`: generator matrices must be square"
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Builds one action. `seed` feeds random ensembles.
pub fn build_action(
    name: &str,
    spec: &ActionSpec,
    rank: usize,
    seed: u64,
) -> mls_core::Result<BuiltAction> {
    let alphabet = Alphabet::new(rank)?;
    let mut out = BuiltAction {
        model: None,
        linear: None,
        matrices: None,
        warnings: Vec::new(),
    };
    match spec {
        ActionSpec::Tree { weights } => {
            let w = weights.clone().unwrap_or_else(|| vec![1.0; rank]);
            out.model = Some(Arc::new(TreeModel::new(alphabet, w)?));
        }
        ActionSpec::WordMetric { elements } => {
            let els = elements
                .iter()
                .map(|e| Ok((Word::parse(&alphabet, &e.word)?, e.weight)))
                .collect::<mls_core::Result<Vec<_>>>()?;
            let set = GeneratingSet::new(alphabet, els)?;
            out.model = Some(Arc::new(WordMetricModel::new(set, SearchLimits::default())?));
        }
        ActionSpec::Mobius {
            dim,
            generators,
            delta,
        } => {
            rank_check(name, generators.len(), rank)?;
            let c = |n: &crate::scenario::Num| Complex64::new(n.re(), n.im());
            let gens = generators
                .iter()
                .map(|g| C2::new(c(&g[0]), c(&g[1]), c(&g[2]), c(&g[3])))
                .collect();
            out.model = Some(Arc::new(MobiusModel::new(*dim, gens, *delta)?));
        }
        ActionSpec::Linear {
            generators,
            alpha,
            certificate_radius,
        } => {
            rank_check(name, generators.len(), rank)?;
            let mats = generators
                .iter()
                .map(|g| matrix(name, g))
                .collect::<mls_core::Result<Vec<_>>>()?;
            let lin = LinearRepModel::new(mats)?.with_alpha(*alpha);
            let (lin, cert) = linear_with_gap_comparison(&lin, *certificate_radius)?;
            if !cert.ok {
                out.warnings.push(format!(
                    "action `{name}`: no singular value gap growth (slope {:.6})",
                    cert.mu
                ));
            }
            out.matrices = Some(lin.generators().to_vec());
            out.model = Some(Arc::new(lin.clone()));
            out.linear = Some(lin);
        }
        ActionSpec::Schottky {
            stretches,
            angles,
            delta,
            representation,
            certificate_radius,
        } => {
            rank_check(name, stretches.len(), rank)?;
            let builder = SchottkyBuilder {
                stretches: stretches.clone(),
                angles: angles.iter().map(|a| Complex64::new(a.re(), a.im())).collect(),
                delta: *delta,
                certificate_radius: *certificate_radius,
            };
            let g = builder.build()?;
            out.warnings
                .extend(g.warnings.iter().map(|w| format!("action `{name}`: {w}")));
            if let Some(lin) = &g.linear {
                out.matrices = Some(lin.generators().to_vec());
            }
            out.model = match representation {
                Representation::Mobius => Some(Arc::new(g.mobius.clone())),
                Representation::Linear => {
                    let lin = g.linear.clone().ok_or_else(|| {
                        mls_core::Error::input(format!(
                            "action `{name}`: a linear representation needs real angles"
                        ))
                    })?;
                    Some(Arc::new(lin))
                }
            };
            out.linear = g.linear;
        }
        ActionSpec::RandomLinear { dim, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mats = (0..*count)
                .map(|_| random_unit_det(*dim, &mut rng))
                .collect::<mls_core::Result<Vec<_>>>()?;
            if *count == rank {
                let (lin, _) = linear_with_gap_comparison(&LinearRepModel::new(mats.clone())?, 6)?;
                out.model = Some(Arc::new(lin.clone()));
                out.linear = Some(lin);
            }
            out.matrices = Some(mats);
        }
        ActionSpec::Preset { name: p } => {
            return Err(mls_core::Error::input(format!("preset `{p}` was not expanded")));
        }
    }
    Ok(out)
}

/// Builds every action of a scenario; random actions are seeded by position.
pub fn build_actions(s: &Scenario) -> Result<BTreeMap<String, BuiltAction>, CliError> {
    let mut out = BTreeMap::new();
    for (i, (name, spec)) in s.actions.iter().enumerate() {
        let a = build_action(name, spec, s.rank, s.seed.wrapping_add(i as u64))
            .map_err(|e| CliError::Scenario(format!("actions.{name}: {e}")))?;
        out.insert(name.clone(), a);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeError {
    pub kind: String,
    pub message: String,
}

impl From<&mls_core::Error> for OutcomeError {
    fn from(e: &mls_core::Error) -> Self {
        let kind = match e {
            mls_core::Error::Input(_) => "input",
            mls_core::Error::Precondition(_) => "precondition",
            mls_core::Error::Numeric(_) => "numeric",
            mls_core::Error::ResourceCap { .. } => "resource-cap",
            mls_core::Error::SearchExhausted { .. } => "search-exhausted",
        };
        OutcomeError {
            kind: kind.to_string(),
            message: e.to_string(),
        }
    }
}

/// A flat table attached to an outcome, written as its own CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub index: usize,
    pub name: String,
    pub label: String,
    pub reports: Vec<DilationReport>,
    pub error: Option<OutcomeError>,
    pub table_rows: Option<usize>,
    #[serde(skip)]
    pub table: Option<Table>,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub hypothesis_failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub warnings: Vec<String>,
    pub outcomes: Vec<Outcome>,
    pub summary: Summary,
}

impl RunReport {
    /// `1` for any violation, else `3` for a resource cap, `2` for any other
    /// verifier error, `0` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.violated > 0 {
            return exit::VIOLATION;
        }
        let kinds: Vec<&str> = self
            .outcomes
            .iter()
            .filter_map(|o| o.error.as_ref().map(|e| e.kind.as_str()))
            .collect();
        if kinds.contains(&"resource-cap") {
            exit::RESOURCE_CAP
        } else if !kinds.is_empty() {
            exit::INPUT
        } else {
            exit::OK
        }
    }
}

pub fn window_config(c: &RunConfig) -> WindowConfig {
    WindowConfig {
        window_cap: c.window_cap,
        epsilon: c.epsilon,
        stable: StableConfig {
            k_max: c.k_max,
            c_delta: c.c_delta,
        },
        class_cap: c.class_cap,
        u_depth: c.u_depth,
        max_frontier: c.max_frontier,
        ref_factor: c.ref_factor,
        tolerance: c.tolerance,
    }
}

pub fn jsl_config(c: &RunConfig, n_max: Option<usize>) -> JslConfig {
    JslConfig {
        n_max: n_max.unwrap_or(c.n_max),
        max_frontier: c.max_frontier,
        allow_pruning: false,
        lo_candidates: c.lo_candidates,
        stable: StableConfig {
            k_max: c.k_max,
            c_delta: c.c_delta,
        },
    }
}

struct Ctx<'a> {
    actions: &'a BTreeMap<String, BuiltAction>,
    cfg: RunConfig,
    wcfg: WindowConfig,
    rank: usize,
    seed: u64,
}

impl Ctx<'_> {
    fn action(&self, name: &str) -> mls_core::Result<&BuiltAction> {
        self.actions
            .get(name)
            .ok_or_else(|| mls_core::Error::input(format!("no action named `{name}`")))
    }

    fn model(&self, name: &str) -> mls_core::Result<&dyn ActionModel> {
        self.action(name)?.model(name)
    }

    fn matrices(&self, name: &str) -> mls_core::Result<Vec<DMatrix<f64>>> {
        self.action(name)?
            .matrices
            .clone()
            .ok_or_else(|| mls_core::Error::input(format!("action `{name}` has no real matrices")))
    }
}

fn bochi_constants(m: usize, c_m: Option<f64>, d_m: Option<usize>) -> mls_core::Result<BochiConstants> {
    let caps = BochiConstants::caps(m);
    BochiConstants::new(m, c_m.unwrap_or(caps.c_m), d_m.unwrap_or(caps.d_m))
}

fn label(spec: &VerifierSpec) -> String {
    let refs = spec
        .action_refs()
        .iter()
        .map(|(f, a)| format!("{f}={a}"))
        .collect::<Vec<_>>()
        .join(" ");
    if refs.is_empty() {
        spec.name().to_string()
    } else {
        format!("{} {refs}", spec.name())
    }
}

fn run_one(
    ctx: &Ctx,
    index: usize,
    spec: &VerifierSpec,
) -> mls_core::Result<(Vec<DilationReport>, Option<Table>)> {
    let w = &ctx.wcfg;
    let tol = ctx.cfg.tolerance;
    let mut table = None;
    let reports = match spec {
        VerifierSpec::Dilation { x, xstar, l } => {
            let (x, xs) = (ctx.model(x)?, ctx.model(xstar)?);
            l.iter()
                .map(|l| dilation_report(xs, x, *l, w))
                .collect::<mls_core::Result<_>>()?
        }
        VerifierSpec::Thm13 {
            x,
            xstar,
            l,
            k,
            delta,
            d,
        } => {
            let (x, xs) = (ctx.model(x)?, ctx.model(xstar)?);
            let p = Thm13Params {
                k: k.unwrap_or(ctx.cfg.k),
                delta: *delta,
                d: *d,
                variant: Thm13Variant::Standard,
            };
            l.iter()
                .map(|l| thm13_check(xs, x, *l, p, w))
                .collect::<mls_core::Result<_>>()?
        }
        VerifierSpec::Cor17 { x, xstar, l, k, d } => {
            let (x, xs) = (ctx.model(x)?, ctx.model(xstar)?);
            let p = Thm13Params {
                k: k.unwrap_or(ctx.cfg.k),
                delta: None,
                d: *d,
                variant: Thm13Variant::Cor17,
            };
            l.iter()
                .map(|l| thm13_check(xs, x, *l, p, w))
                .collect::<mls_core::Result<_>>()?
        }
        VerifierSpec::Thm15 {
            xstar,
            generating_set,
            l,
            k,
            delta,
        } => {
            let xs = ctx.model(xstar)?;
            let set = ctx.model(generating_set)?.generating_set().ok_or_else(|| {
                mls_core::Error::input(format!("action `{generating_set}` is not a word metric"))
            })?;
            l.iter()
                .map(|l| thm15_check(xs, &set, *l, k.unwrap_or(ctx.cfg.k), *delta, w))
                .collect::<mls_core::Result<_>>()?
        }
        VerifierSpec::Cor14 {
            x,
            xstar,
            l,
            alpha,
            beta,
            c0,
        } => {
            let (x, xs) = (ctx.model(x)?, ctx.model(xstar)?);
            l.iter()
                .map(|l| cor14_check(xs, x, *l, *alpha, *beta, *c0, w))
                .collect::<mls_core::Result<_>>()?
        }
        VerifierSpec::Anosov {
            rho,
            tau,
            l,
            alpha,
            c_m,
            d_m,
            certificate_radius,
        } => {
            let rho_lin = ctx.action(rho)?.linear.clone().ok_or_else(|| {
                mls_core::Error::input(format!("action `{rho}` is not a real linear representation"))
            })?;
            let tau_a = ctx.action(tau)?;
            let psi: &dyn ActionModel = match &tau_a.linear {
                Some(lin) => lin,
                None => tau_a.model(tau)?,
            };
            let c = bochi_constants(rho_lin.dim(), *c_m, *d_m)?;
            l.iter()
                .map(|l| anosov_dilation_bound(&rho_lin, psi, *l, *alpha, c, *certificate_radius, w))
                .collect::<mls_core::Result<_>>()?
        }
        VerifierSpec::Bf {
            x,
            subsets,
            sweep,
            k,
            delta,
            n_max,
        } => {
            let model = ctx.model(x)?;
            let jcfg = jsl_config(&ctx.cfg, *n_max);
            let alphabet = Alphabet::new(ctx.rank)?;
            let mut reports = Vec::new();
            for sub in subsets {
                let words = sub
                    .iter()
                    .map(|t| Word::parse(&alphabet, t))
                    .collect::<mls_core::Result<Vec<_>>>()?;
                let delta = delta
                    .or_else(|| model.delta())
                    .ok_or_else(|| mls_core::Error::precondition("hyperbolicity constant is unknown"))?;
                let b = bf_check(model, &words, delta, k.unwrap_or(ctx.cfg.k), jcfg, tol)?;
                let mut r = DilationReport::new("bf", jcfg.n_max as f64);
                r.notes.push(format!("S = {{{}}}", sub.join(", ")));
                r.metric("jsl_lo", b.jsl.lo);
                r.metric("jsl_hi", b.jsl.hi);
                r.metric("half_s2_lo", b.half_s2.lo);
                r.metric("half_s2_hi", b.half_s2.hi);
                r.metric("delta", b.delta);
                r.metric("K", b.k);
                r.metric("upper", b.upper);
                if let Some((lo, hi)) = b.minimal_k {
                    r.metric("minimal_k_lo", lo);
                    r.metric("minimal_k_hi", hi);
                }
                r.verdict = if !b.lower_ok && b.certified || b.upper_holds == Some(false) {
                    Verdict::Violated
                } else if b.lower_ok && b.upper_holds == Some(true) {
                    Verdict::Holds
                } else {
                    Verdict::Inconclusive
                };
                reports.push(r);
            }
            if let Some(sw) = sweep {
                let res = bf_tree_sweep(model, sw.max_size, sw.max_len, jcfg)?;
                let mut r = DilationReport::new("bf", jcfg.n_max as f64);
                r.metric("subsets", res.subsets as f64);
                r.metric("max_gap", res.max_gap);
                r.metric("lo_failures", res.lo_failures as f64);
                r.metric("width_failures", res.width_failures as f64);
                r.verdict = if res.lo_failures > 0 {
                    Verdict::Violated
                } else if res.width_failures > 0 {
                    Verdict::Inconclusive
                } else {
                    Verdict::Holds
                };
                table = Some(Table {
                    headers: [
                        "subset", "jsl_lo", "jsl_hi", "half_s2", "max_disp", "gap", "lo_equal",
                        "width_ok",
                    ]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                    rows: res
                        .rows
                        .iter()
                        .map(|row| {
                            vec![
                                row.subset.clone(),
                                row.jsl.lo.to_string(),
                                row.jsl.hi.to_string(),
                                row.half_s2.to_string(),
                                row.max_disp.to_string(),
                                row.gap.to_string(),
                                row.lo_equal.to_string(),
                                row.width_ok.to_string(),
                            ]
                        })
                        .collect(),
                });
                reports.push(r);
            }
            reports
        }
        VerifierSpec::Bochi {
            matrices,
            ensemble,
            n_max,
            c_m,
            d_m,
        } => {
            let instances: Vec<Vec<DMatrix<f64>>> = match (matrices, ensemble) {
                (Some(m), _) => vec![ctx.matrices(m)?],
                (None, Some(e)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(1000 + index as u64));
                    (0..e.instances)
                        .map(|_| {
                            (0..e.size)
                                .map(|_| random_unit_det(e.dim, &mut rng))
                                .collect::<mls_core::Result<Vec<_>>>()
                        })
                        .collect::<mls_core::Result<_>>()?
                }
                (None, None) => return Err(mls_core::Error::input("bochi needs matrices or an ensemble")),
            };
            let mut reports = Vec::new();
            for (i, mats) in instances.iter().enumerate() {
                let c = bochi_constants(mats[0].nrows(), *c_m, *d_m)?;
                let n = n_max.unwrap_or(c.d_m);
                let b = bochi_check(mats, &c, n, ctx.cfg.product_cap, tol)?;
                let mut r = DilationReport::new("bochi", n as f64);
                r.metric("instance", i as f64);
                r.metric("log_jsr_lo", b.jsr.lo);
                r.metric("log_jsr_hi", b.jsr.hi);
                r.metric("log_rhs", b.rhs.value);
                r.metric("rhs_depth", b.rhs.depth as f64);
                r.metric("c_m", c.c_m);
                r.metric("d_m", c.d_m as f64);
                // the right-hand side is a maximum over j ≤ d_m, so a partial
                // maximum is a lower bound for it
                r.verdict = if b.jsr.hi <= b.rhs.value + tol {
                    Verdict::Holds
                } else if b.rhs.certified && b.jsr.lo > b.rhs.value + tol {
                    Verdict::Violated
                } else {
                    Verdict::Inconclusive
                };
                if !b.rhs.certified {
                    r.notes.push(format!(
                        "right-hand side probed up to j = {} of {}",
                        b.rhs.depth, c.d_m
                    ));
                }
                reports.push(r);
            }
            reports
        }
        VerifierSpec::Jsr { matrices, n_max } => {
            let mats = ctx.matrices(matrices)?;
            let n = n_max.unwrap_or(ctx.cfg.n_max);
            let b = jsr_bracket(&mats, n, ctx.cfg.product_cap)?;
            let mut r = DilationReport::new("jsr", n as f64);
            r.metric("log_jsr_lo", b.lo);
            r.metric("log_jsr_hi", b.hi);
            r.metric("jsr_lo", b.lo.exp());
            r.metric("jsr_hi", b.hi.exp());
            r.verdict = Verdict::Holds;
            vec![r]
        }
        VerifierSpec::Prop31 {
            x,
            generating_set,
            radius,
            n_max,
        } => {
            let model = ctx.model(x)?;
            let set = ctx.model(generating_set)?.generating_set().ok_or_else(|| {
                mls_core::Error::input(format!("action `{generating_set}` is not a word metric"))
            })?;
            vec![prop31_check(model, &set, *radius, jsl_config(&ctx.cfg, *n_max), w)?]
        }
        VerifierSpec::Lemma25 {
            x,
            n,
            ball_radius,
            case,
            d,
            alpha,
        } => {
            let model = ctx.model(x)?;
            let case = match case {
                SandwichCase::Cobounded => Lemma25Case::Cobounded { d: *d },
                SandwichCase::RoughGeodesic => Lemma25Case::RoughGeodesic { alpha: *alpha },
            };
            let (r, _) = lemma25_check(model, *n, *ball_radius, case, ctx.cfg.class_cap)?;
            vec![r]
        }
        VerifierSpec::Lemma32 {
            x,
            ball_radius,
            f_radius,
            max_f,
        } => vec![lemma32_search(
            ctx.model(x)?,
            *ball_radius,
            *f_radius,
            *max_f,
            ctx.cfg.class_cap,
        )?],
        VerifierSpec::Delta { d1, d2, l } => {
            let (a, b) = (ctx.model(d1)?, ctx.model(d2)?);
            let mut reports = Vec::new();
            for l in l {
                let m = delta_metric(a, b, *l, w)?;
                let mut r = DilationReport::new("delta", *l);
                r.metric("delta_lo", m.delta.lo);
                r.metric("delta_hi", m.delta.hi);
                r.metric("dil_12_lo", m.dil_12.lo);
                r.metric("dil_12_hi", m.dil_12.hi);
                r.metric("dil_21_lo", m.dil_21.lo);
                r.metric("dil_21_hi", m.dil_21.hi);
                r.reference = Some(m.delta);
                r.verdict = if m.certifiable {
                    Verdict::Holds
                } else {
                    r.notes.push("a window had no class of positive length".to_string());
                    Verdict::Inconclusive
                };
                reports.push(r);
            }
            reports
        }
    };
    Ok((reports, table))
}

/// Runs the verifiers accepted by `filter`, in scenario order. Verifier errors
/// are recorded in their outcome and the run continues.
pub fn run_filtered(
    s: &Scenario,
    filter: impl Fn(&VerifierSpec) -> bool,
) -> Result<RunReport, CliError> {
    let actions = build_actions(s)?;
    let ctx = Ctx {
        actions: &actions,
        cfg: s.config,
        wcfg: window_config(&s.config),
        rank: s.rank,
        seed: s.seed,
    };
    let mut outcomes = Vec::new();
    let mut summary = Summary::default();
    for (i, spec) in s.verifiers.iter().enumerate() {
        if !filter(spec) {
            continue;
        }
        let t = Instant::now();
        let res = run_one(&ctx, i, spec);
        let seconds = t.elapsed().as_secs_f64();
        let (reports, table, error) = match res {
            Ok((r, t)) => (r, t, None),
            Err(e) => (Vec::new(), None, Some(OutcomeError::from(&e))),
        };
        for r in &reports {
            match r.verdict {
                Verdict::Holds => summary.holds += 1,
                Verdict::Violated => summary.violated += 1,
                Verdict::Inconclusive => summary.inconclusive += 1,
                Verdict::HypothesisFailed => summary.hypothesis_failed += 1,
            }
        }
        summary.errors += usize::from(error.is_some());
        outcomes.push(Outcome {
            index: i,
            name: spec.name().to_string(),
            label: label(spec),
            reports,
            error,
            table_rows: table.as_ref().map(|t| t.rows.len()),
            table,
            seconds,
        });
    }
    Ok(RunReport {
        tool: "mls".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: s.seed,
        config: s.config,
        warnings: actions.values().flat_map(|a| a.warnings.clone()).collect(),
        outcomes,
        summary,
    })
}

pub fn run(s: &Scenario) -> Result<RunReport, CliError> {
    run_filtered(s, |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(verifiers: &str) -> Scenario {
        Scenario::parse(&format!(
            r#"{{ "rank": 2,
                 "actions": {{ "a": {{ "kind": "tree", "weights": [1, 10] }},
                               "b": {{ "kind": "tree", "weights": [1, 20] }} }},
                 "verifiers": {verifiers} }}"#
        ))
        .unwrap()
    }

    #[test]
    fn violation_takes_precedence_over_errors() {
        let s = scenario(
            r#"[ { "name": "thm13", "x": "a", "xstar": "b", "L": [5], "K": 0, "delta": 0, "D": 0 },
                 { "name": "thm13", "x": "a", "xstar": "b", "L": [1] } ]"#,
        );
        let r = run(&s).unwrap();
        assert_eq!(r.summary.violated, 1);
        assert_eq!(r.summary.errors, 1);
        assert_eq!(r.outcomes[1].error.as_ref().unwrap().kind, "precondition");
        assert_eq!(r.exit_code(), exit::VIOLATION);
    }

    #[test]
    fn errors_without_violation() {
        let r = run(&scenario(r#"[ { "name": "thm13", "x": "a", "xstar": "b", "L": [1] } ]"#)).unwrap();
        assert_eq!(r.exit_code(), exit::INPUT);
        let r = run(&scenario(r#"[ { "name": "dilation", "x": "a", "xstar": "b", "L": [8] } ]"#)).unwrap();
        assert_eq!(r.exit_code(), exit::OK);
        assert_eq!(r.outcomes[0].reports[0].reference.unwrap().lo, 2.0);
    }

    #[test]
    fn random_actions_depend_on_seed_and_position() {
        let spec = ActionSpec::RandomLinear { dim: 2, count: 2 };
        let a = build_action("m", &spec, 2, 5).unwrap().matrices.unwrap();
        let b = build_action("m", &spec, 2, 5).unwrap().matrices.unwrap();
        let c = build_action("m", &spec, 2, 6).unwrap().matrices.unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
