//! Windowed dilations `sup ℓ_{X*}[g]/ℓ_X[g]` and executable checks of the
//! dilation inequalities built on them.
//!
//! Every verifier compares a computed bound against a bracket for the true
//! dilation. A verdict is `holds` when the bracket's upper end is below the
//! bound evaluated at the window's lower end, `violated` when the bracket's
//! lower end exceeds the bound evaluated at the window's upper end, and
//! `inconclusive` otherwise.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::actions::{
    anosov_certificate, stable_length, stable_length_of, ActionModel, AnosovCertificate,
    LengthBracket, StableConfig, FLOAT_PAD,
};
use crate::error::{Error, Result};
use crate::jsl::{joint_stable_length, BochiConstants, JslConfig};
use crate::spaces::{LinearRepModel, WordMetricModel};
use crate::words::{enumerate_conj_classes, GeneratingSet, SearchLimits, Word};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowConfig {
    /// Largest cyclically reduced length enumerated.
    pub window_cap: usize,
    /// Classes with `ℓ_X` below this are treated as elliptic and skipped.
    pub epsilon: f64,
    pub stable: StableConfig,
    pub class_cap: usize,
    /// Deepest product level used for the global dilation bound.
    pub u_depth: usize,
    pub max_frontier: usize,
    /// Reference windows are this many times the test window.
    pub ref_factor: f64,
    pub tolerance: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            window_cap: 12,
            epsilon: 1e-9,
            stable: StableConfig::default(),
            class_cap: 2_000_000,
            u_depth: 8,
            max_frontier: 1_000_000,
            ref_factor: 2.0,
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
    HypothesisFailed,
}

impl Verdict {
    /// `holds` if `truth_hi ≤ bound_lo`, `violated` if `truth_lo > bound_hi`.
    pub fn compare(truth: &LengthBracket, bound: &LengthBracket, tol: f64) -> Verdict {
        if truth.hi <= bound.lo + tol {
            Verdict::Holds
        } else if truth.lo > bound.hi + tol {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
            Verdict::HypothesisFailed => "hypothesis-failed",
        }
    }
}

/// One conjugacy class with both stable lengths and their ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: String,
    pub std_len: usize,
    pub x: LengthBracket,
    pub xstar: LengthBracket,
    /// `[ℓ*_lo/ℓ_hi, ℓ*_hi/ℓ_lo]`; `None` when `ℓ_X` is below epsilon.
    pub ratio: Option<LengthBracket>,
}

fn ratio_bracket(xstar: &LengthBracket, x: &LengthBracket) -> LengthBracket {
    let lo = xstar.lo / x.hi;
    let hi = xstar.hi / x.lo;
    LengthBracket {
        lo,
        hi,
        exact: xstar.exact && x.exact && lo == hi,
    }
}

/// Stable lengths of every class up to a cyclically reduced length.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassTable {
    pub radius: usize,
    pub rows: Vec<ClassRow>,
}

impl ClassTable {
    pub fn build(
        xstar: &dyn ActionModel,
        x: &dyn ActionModel,
        radius: usize,
        cfg: &WindowConfig,
    ) -> Result<ClassTable> {
        if xstar.alphabet() != x.alphabet() {
            return Err(Error::input("the two actions have different ranks"));
        }
        let classes = enumerate_conj_classes(&x.alphabet(), radius.max(1), cfg.class_cap)?;
        let mut rows = Vec::with_capacity(classes.len());
        for c in &classes {
            let lx = stable_length(x, c, cfg.stable)?;
            let ls = stable_length(xstar, c, cfg.stable)?;
            let ratio = (lx.lo >= cfg.epsilon).then(|| ratio_bracket(&ls, &lx));
            rows.push(ClassRow {
                class: c.rep().to_string(),
                std_len: c.len(),
                x: lx,
                xstar: ls,
                ratio,
            });
        }
        Ok(ClassTable { radius, rows })
    }

    /// Rows whose `ℓ_X` bracket meets `[0, l]`.
    pub fn window_rows(&self, l: f64) -> Vec<ClassRow> {
        self.rows.iter().filter(|r| r.x.lo <= l).cloned().collect()
    }
}

/// Supremum of the ratio over `0 < ℓ_X ≤ L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub l: f64,
    pub sup: LengthBracket,
    /// Enumeration radius used.
    pub radius: usize,
    /// True when every class with `ℓ_X ≤ L` was enumerated.
    pub coverage_certified: bool,
    pub in_window: usize,
    pub excluded_elliptic: usize,
    /// Classes whose `ℓ_X` bracket contains `L` in its interior.
    pub straddling: usize,
    pub global_bound: Option<f64>,
    pub argmax: Option<String>,
}

/// Cyclically reduced length needed to see every class with `ℓ_X ≤ L`, and
/// whether that length fits under the cap.
pub fn coverage_radius(x: &dyn ActionModel, l: f64, cap: usize) -> (usize, bool) {
    match x.std_length_comparison() {
        Some(k) if k > 0.0 => {
            let need = (l / k + 1e-9).floor();
            if need <= cap as f64 {
                ((need as usize).max(1), true)
            } else {
                (cap, false)
            }
        }
        _ => (cap, false),
    }
}

/// `max_{p ∈ Sⁿ} d*(x, p·x)/cost(p)` minimized over `n ≤ u_depth`, where
/// `cost(p)` is the cheapest way to write `p` as an `n`-fold product.
///
/// Splitting an `S`-geodesic for `gᵏ` into blocks of `n` letters and applying
/// the triangle inequality gives `ℓ*[g] ≤ R_n·ℓ_S[g]` for each `n`.
pub fn dilation_over_generating_set(
    xstar: &dyn ActionModel,
    set: &GeneratingSet,
    cfg: &WindowConfig,
) -> Result<f64> {
    let mut level: HashMap<Word, f64> = HashMap::new();
    level.insert(Word::identity(), 0.0);
    let mut best = f64::INFINITY;
    for _ in 0..cfg.u_depth.max(1) {
        let mut next: HashMap<Word, f64> = HashMap::new();
        for (p, c) in &level {
            for (s, w) in set.elements() {
                let q = p.mul(s);
                let cost = c + w;
                let e = next.entry(q).or_insert(f64::INFINITY);
                if cost < *e {
                    *e = cost;
                }
            }
            if next.len() > cfg.max_frontier {
                break;
            }
        }
        if next.len() > cfg.max_frontier {
            break;
        }
        let mut r: f64 = 0.0;
        for (p, c) in &next {
            if p.is_identity() {
                continue;
            }
            r = r.max(xstar.displacement(p)? / c);
        }
        best = best.min(r);
        level = next;
    }
    if !best.is_finite() {
        return Err(Error::cap("products at level 1", cfg.max_frontier));
    }
    Ok(if xstar.rounding_free() {
        best
    } else {
        best * (1.0 + FLOAT_PAD)
    })
}

/// An upper bound for `Dil(X*, X)` valid over all classes, when one is known:
/// from the generating set of `X` if it has one, otherwise through the
/// standard generators and the comparison constant of `X`.
pub fn global_dilation_bound(
    xstar: &dyn ActionModel,
    x: &dyn ActionModel,
    cfg: &WindowConfig,
) -> Result<Option<f64>> {
    if let Some(set) = x.generating_set() {
        return dilation_over_generating_set(xstar, &set, cfg).map(Some);
    }
    match x.std_length_comparison() {
        Some(k) if k > 0.0 => {
            let std = GeneratingSet::standard(x.alphabet());
            let u = dilation_over_generating_set(xstar, &std, cfg)?;
            Ok(Some(u / k * (1.0 + FLOAT_PAD)))
        }
        _ => Ok(None),
    }
}

/// Class table, global bound and window selection for one pair of actions.
pub struct DilationSetup<'a> {
    pub xstar: &'a dyn ActionModel,
    pub x: &'a dyn ActionModel,
    pub cfg: WindowConfig,
    pub table: ClassTable,
    pub global: Option<f64>,
}

impl<'a> DilationSetup<'a> {
    /// Enumerates enough classes for windows up to `max_l`, within the cap.
    pub fn new(
        xstar: &'a dyn ActionModel,
        x: &'a dyn ActionModel,
        max_l: f64,
        cfg: WindowConfig,
    ) -> Result<DilationSetup<'a>> {
        let (radius, _) = coverage_radius(x, max_l, cfg.window_cap);
        DilationSetup::with_radius(xstar, x, radius, cfg)
    }

    pub fn with_radius(
        xstar: &'a dyn ActionModel,
        x: &'a dyn ActionModel,
        radius: usize,
        cfg: WindowConfig,
    ) -> Result<DilationSetup<'a>> {
        let table = ClassTable::build(xstar, x, radius, &cfg)?;
        let global = global_dilation_bound(xstar, x, &cfg)?;
        Ok(DilationSetup {
            xstar,
            x,
            cfg,
            table,
            global,
        })
    }

    /// Window supremum. Classes straddling `L` count towards the upper end
    /// only. Without full coverage the upper end falls back to the global bound.
    pub fn window(&self, l: f64) -> WindowResult {
        let (need, fits) = coverage_radius(self.x, l, self.cfg.window_cap);
        let certified = fits && need <= self.table.radius;
        let mut lo: f64 = 0.0;
        let mut hi: f64 = 0.0;
        let mut exact = true;
        let mut in_window = 0;
        let mut excluded = 0;
        let mut straddling = 0;
        let mut argmax = None;
        for r in &self.table.rows {
            if r.x.lo > l {
                continue;
            }
            let Some(ratio) = r.ratio else {
                excluded += 1;
                continue;
            };
            in_window += 1;
            if r.x.hi > l {
                straddling += 1;
            } else if ratio.lo > lo {
                lo = ratio.lo;
                argmax = Some(r.class.clone());
            }
            hi = hi.max(ratio.hi);
            exact &= ratio.exact;
        }
        if !certified {
            hi = hi.max(self.global.unwrap_or(f64::INFINITY));
        }
        WindowResult {
            l,
            sup: LengthBracket {
                lo: lo.min(hi),
                hi,
                exact: exact && lo == hi,
            },
            radius: self.table.radius,
            coverage_certified: certified,
            in_window,
            excluded_elliptic: excluded,
            straddling,
            global_bound: self.global,
            argmax,
        }
    }

    /// Bracket for `Dil(X*, X)`: the best ratio seen on the reference window
    /// below, the global bound (or `∞`) above.
    pub fn reference(&self, ref_l: f64) -> LengthBracket {
        let lo = self
            .table
            .rows
            .iter()
            .filter(|r| r.x.hi <= ref_l)
            .filter_map(|r| r.ratio.map(|q| q.lo))
            .fold(0.0, f64::max);
        let hi = self.global.unwrap_or(f64::INFINITY).max(lo);
        LengthBracket {
            lo,
            hi,
            exact: lo == hi,
        }
    }
}

/// Enumeration radius covering a window of size `l` and its reference window.
fn setup<'a>(
    xstar: &'a dyn ActionModel,
    x: &'a dyn ActionModel,
    ref_l: f64,
    cfg: &WindowConfig,
) -> Result<DilationSetup<'a>> {
    DilationSetup::new(xstar, x, ref_l, *cfg)
}

/// Window supremum of `ℓ_{X*}/ℓ_X` over `0 < ℓ_X ≤ L`.
pub fn dilation_window(
    xstar: &dyn ActionModel,
    x: &dyn ActionModel,
    l: f64,
    cfg: &WindowConfig,
) -> Result<WindowResult> {
    Ok(setup(xstar, x, l, cfg)?.window(l))
}

/// Bracket for `Dil(X*, X)` from a window of size `l`.
pub fn dilation_bracket(
    xstar: &dyn ActionModel,
    x: &dyn ActionModel,
    l: f64,
    cfg: &WindowConfig,
) -> Result<LengthBracket> {
    Ok(setup(xstar, x, l, cfg)?.reference(l))
}

/// Window supremum and dilation bracket without any bound attached.
pub fn dilation_report(
    xstar: &dyn ActionModel,
    x: &dyn ActionModel,
    l: f64,
    cfg: &WindowConfig,
) -> Result<DilationReport> {
    let ref_l = cfg.ref_factor * l;
    let s = setup(xstar, x, ref_l, cfg)?;
    let w = s.window(l);
    let mut r = DilationReport::new("dilation", l);
    r.window_metrics(&w);
    r.metric("reference_window", ref_l);
    r.verdict = Verdict::Holds;
    r.reference = Some(s.reference(ref_l));
    r.rows = s.table.window_rows(l);
    r.window = Some(w);
    Ok(r)
}

/// Result of a verifier run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    pub verifier: String,
    pub window_l: f64,
    pub window: Option<WindowResult>,
    /// The bound evaluated at both ends of the window supremum.
    pub bound: Option<LengthBracket>,
    pub reference: Option<LengthBracket>,
    pub verdict: Verdict,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub rows: Vec<ClassRow>,
}

impl DilationReport {
    /// An empty, inconclusive report.
    pub fn new(verifier: &str, l: f64) -> DilationReport {
        DilationReport {
            verifier: verifier.to_string(),
            window_l: l,
            window: None,
            bound: None,
            reference: None,
            verdict: Verdict::Inconclusive,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.to_string(), v);
    }

    fn window_metrics(&mut self, w: &WindowResult) {
        self.metric("radius", w.radius as f64);
        self.metric("in_window", w.in_window as f64);
        self.metric("excluded_elliptic", w.excluded_elliptic as f64);
        self.metric("straddling", w.straddling as f64);
        if let Some(u) = w.global_bound {
            self.metric("global_bound", u);
        }
        if !w.coverage_certified {
            self.notes.push(format!(
                "window L = {} not fully enumerated at radius {}; upper end uses the global bound",
                w.l, w.radius
            ));
        }
        if w.straddling > 0 {
            self.notes.push(format!(
                "{} classes straddle the window edge and count towards the upper end only",
                w.straddling
            ));
        }
    }
}

fn apply_increasing(sup: &LengthBracket, f: impl Fn(f64) -> f64) -> LengthBracket {
    let lo = f(sup.lo);
    let hi = f(sup.hi);
    LengthBracket {
        lo,
        hi,
        exact: sup.exact && lo == hi,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Thm13Variant {
    /// `sup·(L−2D)/(L−6D) + 2Kδ/(L−6D)`.
    Standard,
    /// `sup·L/(L−6D) + 2K·log 4/(L−6D)`.
    Cor17,
}

/// Coefficient of the window supremum and additive term of the bound.
fn thm13_terms(l: f64, d: f64, delta: f64, k: f64, variant: Thm13Variant) -> Result<(f64, f64)> {
    if !(l > 6.0 * d) {
        return Err(Error::precondition(format!(
            "window L = {l} must exceed 6D = {}",
            6.0 * d
        )));
    }
    let den = l - 6.0 * d;
    Ok(match variant {
        Thm13Variant::Standard => ((l - 2.0 * d) / den, 2.0 * k * delta / den),
        Thm13Variant::Cor17 => (l / den, 2.0 * k * 4f64.ln() / den),
    })
}

/// The right-hand side of the coarse dilation bound.
pub fn thm13_bound(
    window_sup: f64,
    l: f64,
    d: f64,
    delta: f64,
    k: f64,
    variant: Thm13Variant,
) -> Result<f64> {
    let (coef, add) = thm13_terms(l, d, delta, k, variant)?;
    Ok(window_sup * coef + add)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm13Params {
    pub k: f64,
    /// Hyperbolicity of `X*`; defaults to the model's.
    pub delta: Option<f64>,
    /// Coboundedness of `X`; defaults to the model's.
    pub d: Option<f64>,
    pub variant: Thm13Variant,
}

impl Default for Thm13Params {
    fn default() -> Self {
        Thm13Params {
            k: 1e4,
            delta: None,
            d: None,
            variant: Thm13Variant::Standard,
        }
    }
}

/// Compares `Dil(X*, X)` with the coarse bound from the window `ℓ_X ≤ L`.
pub fn thm13_check(
    xstar: &dyn ActionModel,
    x: &dyn ActionModel,
    l: f64,
    p: Thm13Params,
    cfg: &WindowConfig,
) -> Result<DilationReport> {
    let d = p
        .d
        .or_else(|| x.cobound())
        .ok_or_else(|| Error::precondition("coboundedness constant D of X is unknown"))?;
    let delta = match p.variant {
        Thm13Variant::Cor17 => p.delta.or_else(|| xstar.delta()).unwrap_or(0.0),
        Thm13Variant::Standard => p
            .delta
            .or_else(|| xstar.delta())
            .ok_or_else(|| Error::precondition("hyperbolicity constant of X* is unknown"))?,
    };
    if !xstar.is_symmetric() {
        return Err(Error::precondition("X* must be a symmetric metric"));
    }
    let (coef, add) = thm13_terms(l, d, delta, p.k, p.variant)?;
    let ref_l = cfg.ref_factor * l;
    let s = setup(xstar, x, ref_l, cfg)?;
    let w = s.window(l);
    let reference = s.reference(ref_l);
    let bound = apply_increasing(&w.sup, |v| v * coef + add);
    let name = match p.variant {
        Thm13Variant::Standard => "thm13",
        Thm13Variant::Cor17 => "cor17",
    };
    let mut r = DilationReport::new(name, l);
    r.window_metrics(&w);
    r.metric("D", d);
    r.metric("delta", delta);
    r.metric("K", p.k);
    r.metric("coefficient", coef);
    r.metric("additive", add);
    r.metric("reference_window", ref_l);
    let k_unit = match p.variant {
        Thm13Variant::Standard => delta,
        Thm13Variant::Cor17 => 4f64.ln(),
    };
    if k_unit > 0.0 {
        let mk = ((reference.hi - coef * w.sup.lo) * (l - 6.0 * d) / (2.0 * k_unit)).max(0.0);
        r.metric("minimal_k", mk);
    }
    r.verdict = Verdict::compare(&reference, &bound, cfg.tolerance);
    r.rows = s.table.window_rows(l);
    r.bound = Some(bound);
    r.reference = Some(reference);
    r.window = Some(w);
    Ok(r)
}

/// Compares `Dil(X*, S)` with `Kδ/L + sup_{ℓ_S ≤ 2L} ℓ*/ℓ_S`.
pub fn thm15_check(
    xstar: &dyn ActionModel,
    set: &GeneratingSet,
    l: usize,
    k: f64,
    delta: Option<f64>,
    cfg: &WindowConfig,
) -> Result<DilationReport> {
    if l < 1 {
        return Err(Error::input("window L must be a positive integer"));
    }
    let delta = delta
        .or_else(|| xstar.delta())
        .ok_or_else(|| Error::precondition("hyperbolicity constant of X* is unknown"))?;
    let ws = WordMetricModel::new(set.clone(), SearchLimits::default())?;
    let lf = l as f64;
    let ref_l = 4.0 * lf;
    let s = setup(xstar, &ws, ref_l, cfg)?;
    let w = s.window(2.0 * lf);
    let reference = s.reference(ref_l);
    let add = k * delta / lf;
    let bound = apply_increasing(&w.sup, |v| v + add);
    let mut r = DilationReport::new("thm15", lf);
    r.window_metrics(&w);
    r.metric("delta", delta);
    r.metric("K", k);
    r.metric("additive", add);
    r.metric("reference_window", ref_l);
    r.verdict = Verdict::compare(&reference, &bound, cfg.tolerance);
    r.rows = s.table.window_rows(2.0 * lf);
    r.bound = Some(bound);
    r.reference = Some(reference);
    r.window = Some(w);
    Ok(r)
}

/// Attaches the comparison constant implied by a singular value gap fitted
/// on a ball. The constant is only as good as the fit.
pub fn linear_with_gap_comparison(
    model: &LinearRepModel,
    radius: usize,
) -> Result<(LinearRepModel, AnosovCertificate)> {
    let cert = anosov_certificate(model, radius)?;
    let kappa = cert.ok.then(|| model.comparison_from_gap_slope(cert.mu));
    Ok((model.clone().with_comparison(kappa), cert))
}

/// Compares `Dil(ρ, ψ)` with `c_m·d_m/(L − d_m(α+1)) + η·L/(L − d_m(α+1))`,
/// where `η` is the window supremum of `ln λ₁(ρ(g))/ℓ_ψ[g]` over `ℓ_ψ ≤ L`.
pub fn anosov_dilation_bound(
    rho: &LinearRepModel,
    psi: &dyn ActionModel,
    l: f64,
    alpha: f64,
    constants: BochiConstants,
    certificate_radius: usize,
    cfg: &WindowConfig,
) -> Result<DilationReport> {
    let m = constants.m as f64;
    if rho.dim() != constants.m {
        return Err(Error::input(format!(
            "constants are for dimension {}, representation has dimension {}",
            constants.m,
            rho.dim()
        )));
    }
    let edge = constants.d_m as f64 * (alpha + 1.0);
    if !(l > edge) {
        return Err(Error::precondition(format!(
            "window L = {l} must exceed d_m(α+1) = {edge}"
        )));
    }
    let mut r = DilationReport::new("anosov", l);
    let cert = anosov_certificate(rho, certificate_radius)?;
    r.metric("gap_slope", cert.mu);
    r.metric("gap_constant", cert.c);
    if !cert.ok {
        r.verdict = Verdict::HypothesisFailed;
        r.notes.push(format!(
            "no singular value gap growth on the ball of radius {}: slope {:.6}",
            certificate_radius, cert.mu
        ));
        return Ok(r);
    }
    if psi.std_length_comparison().is_none() {
        r.verdict = Verdict::HypothesisFailed;
        r.notes.push(
            "ψ has no certified comparison with word length, so it is not known to be quasi-isometric to it"
                .to_string(),
        );
        return Ok(r);
    }
    let den = l - edge;
    let add = constants.c_m * constants.d_m as f64 / den;
    let coef = l / den;
    let ref_l = cfg.ref_factor * l;
    let s = setup(rho, psi, ref_l, cfg)?;
    let w = s.window(l);
    let reference = s.reference(ref_l);
    let bound = apply_increasing(&w.sup, |v| add + v * coef);
    r.window_metrics(&w);
    r.metric("m", m);
    r.metric("c_m", constants.c_m);
    r.metric("d_m", constants.d_m as f64);
    r.metric("alpha", alpha);
    r.metric("additive", add);
    r.metric("coefficient", coef);
    r.metric("reference_window", ref_l);
    r.verdict = Verdict::compare(&reference, &bound, cfg.tolerance);
    r.rows = s.table.window_rows(l);
    r.bound = Some(bound);
    r.reference = Some(reference);
    r.window = Some(w);
    Ok(r)
}

/// Checks the window hypothesis `α ≤ ℓ*/ℓ ≤ β` on `ℓ_X ≤ L` and measures the
/// least `C₀` for which `α(1 − C₀/L) − C₀/L ≤ ℓ*/ℓ ≤ β(1 + C₀/L) + C₀/L`
/// holds on the reference window.
pub fn cor14_check(
    xstar: &dyn ActionModel,
    x: &dyn ActionModel,
    l: f64,
    alpha: Option<f64>,
    beta: Option<f64>,
    c0: Option<f64>,
    cfg: &WindowConfig,
) -> Result<DilationReport> {
    let ref_l = cfg.ref_factor * l;
    let s = setup(xstar, x, ref_l, cfg)?;
    let w = s.window(l);
    let mut r = DilationReport::new("cor14", l);
    r.window_metrics(&w);
    // window extremes over classes certainly inside the window
    let (mut a_lo, mut a_hi, mut b_lo, mut b_hi) =
        (f64::INFINITY, f64::INFINITY, 0.0f64, 0.0f64);
    for row in &s.table.rows {
        if row.x.lo > l {
            continue;
        }
        let Some(q) = row.ratio else { continue };
        b_hi = b_hi.max(q.hi);
        a_lo = a_lo.min(q.lo);
        if row.x.hi <= l {
            a_hi = a_hi.min(q.hi);
            b_lo = b_lo.max(q.lo);
        }
    }
    if !a_lo.is_finite() {
        r.verdict = Verdict::Inconclusive;
        r.notes.push("no classes in the window".to_string());
        r.window = Some(w);
        return Ok(r);
    }
    r.metric("window_alpha", a_lo);
    r.metric("window_beta", b_hi);
    let alpha = alpha.unwrap_or(a_lo);
    let beta = beta.unwrap_or(b_hi);
    r.metric("alpha", alpha);
    r.metric("beta", beta);
    if alpha > a_hi + cfg.tolerance || beta + cfg.tolerance < b_lo {
        r.verdict = Verdict::HypothesisFailed;
        r.notes.push(format!(
            "window ratios leave [α, β] = [{alpha}, {beta}]"
        ));
        r.window = Some(w);
        return Ok(r);
    }
    let hyp_certified =
        alpha <= a_lo + cfg.tolerance && beta + cfg.tolerance >= b_hi && w.coverage_certified;
    let mut need: f64 = 0.0;
    for row in &s.table.rows {
        if row.x.hi > ref_l {
            continue;
        }
        let Some(q) = row.ratio else { continue };
        need = need.max((alpha - q.lo) * l / (alpha + 1.0));
        need = need.max((q.hi - beta) * l / (beta + 1.0));
    }
    r.metric("minimal_c0", need);
    r.metric("reference_window", ref_l);
    r.verdict = if !hyp_certified {
        r.notes.push("window hypothesis not certified".to_string());
        Verdict::Inconclusive
    } else {
        match c0 {
            Some(c) if c + cfg.tolerance >= need => Verdict::Holds,
            Some(c) => {
                r.notes.push(format!(
                    "C₀ = {c} is below the {need} needed on the reference window"
                ));
                Verdict::Inconclusive
            }
            None => Verdict::Holds,
        }
    };
    if let Some(c) = c0 {
        r.metric("c0", c);
    }
    r.reference = Some(s.reference(ref_l));
    r.rows = s.table.window_rows(l);
    r.window = Some(w);
    Ok(r)
}

/// Compares `Dil(X, S)` with the joint stable length `𝔇_X(S)` for a
/// generating set with unit weights.
pub fn prop31_check(
    x: &dyn ActionModel,
    set: &GeneratingSet,
    radius: usize,
    jsl: JslConfig,
    cfg: &WindowConfig,
) -> Result<DilationReport> {
    if set.elements().iter().any(|(_, w)| *w != 1.0) {
        return Err(Error::input("joint stable length needs unit weights"));
    }
    let words: Vec<Word> = set.elements().iter().map(|(w, _)| w.clone()).collect();
    let j = joint_stable_length(x, &words, jsl)?;
    let ws = WordMetricModel::new(set.clone(), SearchLimits::default())?;
    let s = DilationSetup::with_radius(x, &ws, radius, *cfg)?;
    let dil = s.reference(f64::INFINITY);
    let mut r = DilationReport::new("prop31", radius as f64);
    r.metric("dil_lo", dil.lo);
    r.metric("dil_hi", dil.hi);
    r.metric("jsl_lo", j.bracket.lo);
    r.metric("jsl_hi", j.bracket.hi);
    r.metric("radius", radius as f64);
    let tol = cfg.tolerance;
    r.verdict = if dil.hi <= j.bracket.hi + tol {
        Verdict::Holds
    } else if dil.lo > j.bracket.hi + tol {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    if dil.exact && j.bracket.exact {
        r.metric("equality_gap", (dil.lo - j.bracket.lo).abs());
    }
    if !j.certified {
        r.notes.push("joint stable length upper end is heuristic".to_string());
    }
    r.bound = Some(j.bracket);
    r.reference = Some(dil);
    r.rows = s.table.rows.clone();
    Ok(r)
}

/// Which sandwich to check in [`lemma25_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "case")]
pub enum Lemma25Case {
    /// `S_n = {d ≤ (n+2)D}`, `nD|g| − nD ≤ d ≤ (n+2)D|g|`.
    Cobounded { d: Option<f64> },
    /// `S_n = {ψ ≤ n}`, `(n−α−1)|g| − (n−1) ≤ ψ ≤ n|g|`.
    RoughGeodesic { alpha: Option<f64> },
}

/// Lower or upper edge of the sandwich as a function of the `S_n`-length.
type Bound = Box<dyn Fn(f64) -> f64>;

/// Builds `S_n` inside the ball of the given standard radius and checks the
/// word-length sandwich for every element of the ball.
pub fn lemma25_check(
    x: &dyn ActionModel,
    n: usize,
    ball_radius: usize,
    case: Lemma25Case,
    cap: usize,
) -> Result<(DilationReport, GeneratingSet)> {
    if n < 1 {
        return Err(Error::input("n must be at least 1"));
    }
    let nf = n as f64;
    let (threshold, lower, upper): (f64, Bound, Bound) =
        match case {
            Lemma25Case::Cobounded { d } => {
                let d = d
                    .or_else(|| x.cobound())
                    .ok_or_else(|| Error::precondition("coboundedness constant D is unknown"))?;
                (
                    (nf + 2.0) * d,
                    Box::new(move |k| nf * d * k - nf * d),
                    Box::new(move |k| (nf + 2.0) * d * k),
                )
            }
            Lemma25Case::RoughGeodesic { alpha } => {
                let a = alpha
                    .or_else(|| x.alpha())
                    .ok_or_else(|| Error::precondition("rough-geodesicity constant is unknown"))?;
                if !(nf > a + 1.0) {
                    return Err(Error::precondition(format!("n = {n} must exceed α + 1 = {}", a + 1.0)));
                }
                (
                    nf,
                    Box::new(move |k| (nf - a - 1.0) * k - (nf - 1.0)),
                    Box::new(move |k| nf * k),
                )
            }
        };
    let ball = x.alphabet().ball(ball_radius, cap)?;
    let mut disp = Vec::with_capacity(ball.len());
    for g in &ball {
        disp.push(x.displacement(g)?);
    }
    let s_n: Vec<Word> = ball
        .iter()
        .zip(&disp)
        .filter(|(g, d)| !g.is_identity() && **d <= threshold)
        .map(|(g, _)| g.clone())
        .collect();
    if s_n.is_empty() {
        return Err(Error::input(format!(
            "ball of radius {ball_radius} contains no element of S_{n}"
        )));
    }
    // displacement ≥ min weight · word length in a weighted tree
    let tree_min = x
        .tree_weights()
        .map(|w| w.iter().copied().fold(f64::INFINITY, f64::min));
    let complete = tree_min.is_some_and(|m| threshold / m <= ball_radius as f64);
    let exact_lengths = tree_min.is_some();

    let index: HashMap<&Word, usize> = ball.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut dist = vec![usize::MAX; ball.len()];
    let start = index[&Word::identity()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for s in &s_n {
            let v = ball[u].mul(s);
            if let Some(&j) = index.get(&v) {
                if dist[j] == usize::MAX {
                    dist[j] = dist[u] + 1;
                    queue.push_back(j);
                }
            }
        }
    }

    let mut lower_bad = 0usize;
    let mut upper_bad = 0usize;
    let mut unreached = 0usize;
    let mut worst_lower: f64 = f64::INFINITY;
    let mut worst_upper: f64 = f64::INFINITY;
    for (i, d) in disp.iter().enumerate() {
        if dist[i] == usize::MAX {
            unreached += 1;
            continue;
        }
        let k = dist[i] as f64;
        worst_lower = worst_lower.min(d - lower(k));
        worst_upper = worst_upper.min(upper(k) - d);
        if lower(k) > *d {
            lower_bad += 1;
        }
        if *d > upper(k) {
            upper_bad += 1;
        }
    }
    let mut r = DilationReport::new("lemma25", nf);
    r.metric("n", nf);
    r.metric("threshold", threshold);
    r.metric("ball_size", ball.len() as f64);
    r.metric("s_n_size", s_n.len() as f64);
    r.metric("checked", (ball.len() - unreached) as f64);
    r.metric("unreached", unreached as f64);
    r.metric("lower_violations", lower_bad as f64);
    r.metric("upper_violations", upper_bad as f64);
    r.metric("min_lower_slack", worst_lower);
    r.metric("min_upper_slack", worst_upper);
    if !complete {
        r.notes.push(format!(
            "S_{n} is cut off by the ball of radius {ball_radius}"
        ));
    }
    if !exact_lengths {
        r.notes.push("S_n-lengths are measured inside the ball and are upper bounds".to_string());
    }
    // Lengths measured inside the ball can only overestimate, which keeps an
    // upper violation certified; lower violations need exact lengths.
    r.verdict = if upper_bad > 0 || (lower_bad > 0 && exact_lengths && complete) {
        Verdict::Violated
    } else if lower_bad == 0 && unreached == 0 && exact_lengths && complete {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    let set = GeneratingSet::new(x.alphabet(), s_n.into_iter().map(|g| (g, 1.0)).collect())?;
    Ok((r, set))
}

/// Greedy search for a finite `F` and the least `C` with
/// `d(x, g·x) ≤ max_{f ∈ F} ℓ[g·f] + C` on the ball.
pub fn lemma32_search(
    x: &dyn ActionModel,
    ball_radius: usize,
    f_radius: usize,
    max_f: usize,
    cap: usize,
) -> Result<DilationReport> {
    let alphabet = x.alphabet();
    let ball = alphabet.ball(ball_radius, cap)?;
    let candidates = alphabet.ball(f_radius, cap)?;
    let exact_len = |g: &Word| -> Result<f64> {
        let c = crate::words::cyclic_reduce(g);
        x.exact_stable_length(c.rep())?
            .ok_or_else(|| Error::precondition("the search needs a model with exact stable lengths"))
    };
    let disp: Vec<f64> = ball.iter().map(|g| x.displacement(g)).collect::<Result<_>>()?;
    // best[i] = max over the chosen F of ℓ[g_i·f]
    let mut best: Vec<f64> = ball.iter().map(exact_len).collect::<Result<_>>()?;
    let mut chosen = vec![Word::identity()];
    let gap = |best: &[f64]| -> f64 {
        disp.iter()
            .zip(best)
            .map(|(d, b)| d - b)
            .fold(0.0, f64::max)
    };
    let mut c = gap(&best);
    let cols: Vec<Vec<f64>> = candidates
        .iter()
        .map(|f| ball.iter().map(|g| exact_len(&g.mul(f))).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    while chosen.len() < max_f && c > 0.0 {
        let mut pick: Option<(usize, f64)> = None;
        for (j, col) in cols.iter().enumerate() {
            if chosen.contains(&candidates[j]) {
                continue;
            }
            let cj = disp
                .iter()
                .zip(best.iter().zip(col))
                .map(|(d, (b, v))| d - b.max(*v))
                .fold(0.0, f64::max);
            if cj < c && pick.is_none_or(|(_, pc)| cj < pc) {
                pick = Some((j, cj));
            }
        }
        let Some((j, cj)) = pick else { break };
        for (b, v) in best.iter_mut().zip(&cols[j]) {
            *b = b.max(*v);
        }
        chosen.push(candidates[j].clone());
        c = cj;
    }
    let mut r = DilationReport::new("lemma32", ball_radius as f64);
    r.metric("ball_size", ball.len() as f64);
    r.metric("f_size", chosen.len() as f64);
    r.metric("c", c);
    r.notes.push(format!(
        "F = {{{}}}",
        chosen.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
    ));
    r.verdict = if c.is_finite() {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(r)
}

/// `Δ = log(Dil(d₁, d₂)·Dil(d₂, d₁))` as a bracket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaMetric {
    pub dil_12: LengthBracket,
    pub dil_21: LengthBracket,
    pub delta: LengthBracket,
    /// False when a window had no class of positive length.
    pub certifiable: bool,
}

pub fn delta_metric(
    d1: &dyn ActionModel,
    d2: &dyn ActionModel,
    l: f64,
    cfg: &WindowConfig,
) -> Result<DeltaMetric> {
    let dil_12 = dilation_bracket(d1, d2, l, cfg)?;
    let dil_21 = dilation_bracket(d2, d1, l, cfg)?;
    let lo = (dil_12.lo * dil_21.lo).ln();
    let hi = (dil_12.hi * dil_21.hi).ln();
    Ok(DeltaMetric {
        dil_12,
        dil_21,
        delta: LengthBracket {
            lo,
            hi,
            exact: dil_12.exact && dil_21.exact,
        },
        certifiable: dil_12.lo > 0.0 && dil_21.lo > 0.0,
    })
}

/// Stable length bracket of a single element, for reports.
pub fn class_lengths(
    xstar: &dyn ActionModel,
    x: &dyn ActionModel,
    g: &Word,
    cfg: &WindowConfig,
) -> Result<(LengthBracket, LengthBracket)> {
    Ok((
        stable_length_of(x, g, cfg.stable)?,
        stable_length_of(xstar, g, cfg.stable)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::TreeModel;
    use crate::words::Alphabet;

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&f2(), s).unwrap()
    }

    fn weighted() -> TreeModel {
        TreeModel::new(f2(), vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn window_weighted_over_unit() {
        let unit = TreeModel::unit(f2());
        let wt = weighted();
        let r = dilation_window(&wt, &unit, 4.0, &WindowConfig::default()).unwrap();
        assert_eq!(r.sup.lo, 2.0);
        assert_eq!(r.sup.hi, 2.0);
        assert!(r.coverage_certified);
        assert_eq!(r.argmax.as_deref(), Some("b"));
    }

    #[test]
    fn identical_and_scaled() {
        let unit = TreeModel::unit(f2());
        let cfg = WindowConfig::default();
        for l in [1.0, 3.0, 6.0] {
            let r = dilation_window(&unit, &unit, l, &cfg).unwrap();
            assert_eq!((r.sup.lo, r.sup.hi), (1.0, 1.0));
        }
        let three = unit.scaled(3.0).unwrap();
        let r = dilation_window(&three, &unit, 5.0, &cfg).unwrap();
        assert_eq!((r.sup.lo, r.sup.hi), (3.0, 3.0));
    }

    #[test]
    fn thm13_arithmetic() {
        let b = thm13_bound(1.0, 12.0, 0.5, 0.0, 1.0, Thm13Variant::Standard).unwrap();
        assert!((b - 11.0 / 9.0).abs() < 1e-15);
        let b = thm13_bound(1.0, 12.0, 1.0, 0.0, 1.0, Thm13Variant::Standard).unwrap();
        assert!((b - 5.0 / 3.0).abs() < 1e-15);
        assert!(thm13_bound(1.0, 3.0, 0.5, 0.0, 1.0, Thm13Variant::Standard).is_err());
        let b = thm13_bound(2.0, 12.0, 0.5, 0.0, 1.0, Thm13Variant::Cor17).unwrap();
        assert!((b - (2.0 * 12.0 / 9.0 + 2.0 * 4f64.ln() / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn thm13_tree_pair_holds() {
        let unit = TreeModel::unit(f2());
        let r = thm13_check(&weighted(), &unit, 6.0, Thm13Params::default(), &WindowConfig::default())
            .unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.reference.unwrap().lo, 2.0);
        assert_eq!(r.reference.unwrap().hi, 2.0);
    }

    #[test]
    fn thm15_weighted_tree_exact() {
        let set = GeneratingSet::standard(f2());
        for l in [1, 2, 4] {
            let r = thm15_check(&weighted(), &set, l, 1e4, None, &WindowConfig::default()).unwrap();
            let b = r.bound.unwrap();
            let refd = r.reference.unwrap();
            assert_eq!((b.lo, b.hi), (2.0, 2.0), "L = {l}");
            assert_eq!((refd.lo, refd.hi), (2.0, 2.0));
            assert_eq!(r.verdict, Verdict::Holds);
        }
    }

    #[test]
    fn delta_of_weighted_pair() {
        let unit = TreeModel::unit(f2());
        let d = delta_metric(&unit, &weighted(), 6.0, &WindowConfig::default()).unwrap();
        assert_eq!(d.delta.lo, 2f64.ln());
        assert_eq!(d.delta.hi, 2f64.ln());
        let same = delta_metric(&unit, &unit, 6.0, &WindowConfig::default()).unwrap();
        assert_eq!((same.delta.lo, same.delta.hi), (0.0, 0.0));
    }

    #[test]
    fn prop31_values() {
        let unit = TreeModel::unit(f2());
        let cfg = WindowConfig::default();
        let jcfg = JslConfig::default();
        let std = GeneratingSet::standard(f2());
        let r = prop31_check(&unit, &std, 6, jcfg, &cfg).unwrap();
        assert_eq!(r.metrics["dil_lo"], 1.0);
        assert_eq!(r.metrics["dil_hi"], 1.0);
        assert_eq!(r.metrics["jsl_lo"], 1.0);
        assert_eq!(r.metrics["jsl_hi"], 1.0);
        let mut els = std.elements().to_vec();
        els.push((w("ab"), 1.0));
        let s = GeneratingSet::new(f2(), els).unwrap();
        let r = prop31_check(&unit, &s, 5, jcfg, &cfg).unwrap();
        assert_eq!(r.metrics["dil_lo"], 2.0);
        assert_eq!(r.metrics["dil_hi"], 2.0);
        assert_eq!(r.metrics["jsl_lo"], 2.0);
        assert_eq!(r.metrics["jsl_hi"], 2.0);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn lemma25_unit_tree() {
        let unit = TreeModel::unit(f2());
        let (r, s) = lemma25_check(&unit, 4, 7, Lemma25Case::Cobounded { d: None }, 1_000_000).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        // S_4 is the ball of radius 3 without the identity
        assert_eq!(s.elements().len(), 52);
        assert_eq!(r.metrics["lower_violations"], 0.0);
        assert_eq!(r.metrics["upper_violations"], 0.0);
    }

    #[test]
    fn lemma32_tree() {
        let unit = TreeModel::unit(f2());
        let r = lemma32_search(&unit, 5, 1, 5, 1_000_000).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.metrics["c"] >= 0.0);
        assert!(r.metrics["c"] <= 4.0);
    }

    #[test]
    fn cor14_weighted_pair() {
        let unit = TreeModel::unit(f2());
        let r = cor14_check(&weighted(), &unit, 6.0, Some(1.0), Some(2.0), None, &WindowConfig::default())
            .unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.metrics["minimal_c0"], 0.0);
        assert_eq!(r.metrics["window_alpha"], 1.0);
        assert_eq!(r.metrics["window_beta"], 2.0);
        let bad = cor14_check(&weighted(), &unit, 6.0, Some(1.5), Some(2.0), None, &WindowConfig::default())
            .unwrap();
        assert_eq!(bad.verdict, Verdict::HypothesisFailed);
    }
}
