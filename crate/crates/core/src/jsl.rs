//! Joint stable lengths of finite subsets, joint spectral radii of matrix
//! sets, and the Breuillard–Fujiwara and Bochi inequalities.

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::actions::{stable_length_of, ActionModel, LengthBracket, StableConfig, FLOAT_PAD};
use crate::error::{Error, Result};
use crate::linalg::ScaledMat;
use crate::words::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JslConfig {
    pub n_max: usize,
    /// Largest number of distinct products kept at one level.
    pub max_frontier: usize,
    /// Keep only the `max_frontier` largest products instead of failing.
    /// The upper end of the bracket is then no longer certified.
    pub allow_pruning: bool,
    /// Products per level whose stable length feeds the lower end.
    pub lo_candidates: usize,
    pub stable: StableConfig,
}

impl Default for JslConfig {
    fn default() -> Self {
        JslConfig {
            n_max: 10,
            max_frontier: 1_000_000,
            allow_pruning: false,
            lo_candidates: 16,
            stable: StableConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointStableLength {
    pub bracket: LengthBracket,
    /// False when beam pruning made `hi` a heuristic value.
    pub certified: bool,
    /// `a_n = max_{p ∈ Sⁿ} d(x, p·x)` for `n = 1..`.
    pub levels: Vec<f64>,
    /// `½·max_{s ∈ S²} ℓ[s]`.
    pub half_s2: LengthBracket,
    pub method: String,
}

fn product_levels(s: &[Word], depth: usize, cap: usize) -> Result<Vec<Vec<Word>>> {
    let mut levels: Vec<Vec<Word>> = Vec::with_capacity(depth);
    let first: Vec<Word> = {
        let set: HashSet<Word> = s.iter().cloned().collect();
        let mut v: Vec<Word> = set.into_iter().collect();
        v.sort();
        v
    };
    levels.push(first);
    for n in 1..depth {
        let mut seen: HashSet<Word> = HashSet::new();
        for p in &levels[n - 1] {
            for x in s {
                seen.insert(p.mul(x));
                if seen.len() > cap {
                    return Err(Error::cap(format!("distinct products at level {}", n + 1), cap));
                }
            }
        }
        let mut v: Vec<Word> = seen.into_iter().collect();
        v.sort();
        levels.push(v);
    }
    Ok(levels)
}

/// `½·max_{s ∈ S²} ℓ[s]` as a bracket.
pub fn half_max_square_length(
    model: &dyn ActionModel,
    s: &[Word],
    cfg: StableConfig,
) -> Result<LengthBracket> {
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 0.0;
    let mut exact = true;
    for x in s {
        for y in s {
            let b = stable_length_of(model, &x.mul(y), cfg)?;
            lo = lo.max(b.lo);
            hi = hi.max(b.hi);
            exact &= b.exact;
        }
    }
    Ok(LengthBracket {
        lo: lo / 2.0,
        hi: hi / 2.0,
        exact,
    })
}

/// Prefix trie of reduced words with weighted depths, answering
/// `max_q (W(q) − 2·W(common prefix of q and u))` for a query word `u`.
struct Trie {
    stride: usize,
    children: Vec<u32>,
    depth_weight: Vec<f64>,
    max_end: Vec<f64>,
    max_sub: Vec<f64>,
}

const NONE: u32 = u32::MAX;

impl Trie {
    fn new(stride: usize) -> Trie {
        Trie {
            stride,
            children: vec![NONE; stride],
            depth_weight: vec![0.0],
            max_end: vec![f64::NEG_INFINITY],
            max_sub: vec![f64::NEG_INFINITY],
        }
    }

    fn insert(&mut self, w: &[Letter], weight: &dyn Fn(Letter) -> f64, total: f64) {
        let mut node = 0usize;
        self.max_sub[0] = self.max_sub[0].max(total);
        for l in w {
            let slot = node * self.stride + l.order_key() as usize;
            let next = self.children[slot];
            node = if next == NONE {
                let id = self.depth_weight.len();
                self.children.extend(std::iter::repeat_n(NONE, self.stride));
                self.depth_weight.push(self.depth_weight[node] + weight(*l));
                self.max_end.push(f64::NEG_INFINITY);
                self.max_sub.push(f64::NEG_INFINITY);
                self.children[slot] = id as u32;
                id
            } else {
                next as usize
            };
            self.max_sub[node] = self.max_sub[node].max(total);
        }
        self.max_end[node] = self.max_end[node].max(total);
    }

    /// `u` is given as an iterator of letters (the inverse of a product).
    fn best(&self, u: impl Iterator<Item = Letter>) -> f64 {
        let mut node = 0usize;
        let mut best = f64::NEG_INFINITY;
        let mut u = u.peekable();
        loop {
            let dw = 2.0 * self.depth_weight[node];
            let next = u.next();
            match next {
                None => {
                    return best.max(self.max_sub[node] - dw);
                }
                Some(l) => {
                    best = best.max(self.max_end[node] - dw);
                    let follow = l.order_key() as usize;
                    for k in 0..self.stride {
                        if k == follow {
                            continue;
                        }
                        let c = self.children[node * self.stride + k];
                        if c != NONE {
                            best = best.max(self.max_sub[c as usize] - dw);
                        }
                    }
                    let c = self.children[node * self.stride + follow];
                    if c == NONE {
                        return best;
                    }
                    node = c as usize;
                }
            }
        }
    }
}

/// `a_n` for `n = 1..=n_max` in a weighted tree, exactly, by splitting each
/// product into halves: `|pq| = |p| + |q| − 2·|common prefix of p⁻¹ and q|`.
fn tree_levels(weights: &[f64], s: &[Word], n_max: usize, cap: usize) -> Result<(Vec<f64>, Vec<Vec<Word>>)> {
    let half = n_max.div_ceil(2);
    let levels = product_levels(s, half, cap)?;
    let weight = |l: Letter| weights[l.index() - 1];
    let wlen = |w: &Word| w.letters().iter().map(|l| weight(*l)).sum::<f64>();
    let stride = 2 * weights.len();
    let tries: Vec<Trie> = levels
        .iter()
        .map(|lvl| {
            let mut t = Trie::new(stride);
            for w in lvl {
                t.insert(w.letters(), &weight, wlen(w));
            }
            t
        })
        .collect();
    let mut a = Vec::with_capacity(n_max);
    a.push(levels[0].iter().map(wlen).fold(0.0, f64::max));
    for n in 2..=n_max {
        let i = n / 2;
        let j = n - i;
        let trie = &tries[j - 1];
        let best = levels[i - 1]
            .iter()
            .map(|p| wlen(p) + trie.best(p.letters().iter().rev().map(|l| l.inverse())))
            .fold(0.0, f64::max);
        a.push(best);
    }
    Ok((a, levels))
}

/// Joint stable length `𝔇(S) = lim (1/n)·max_{p ∈ Sⁿ} d(x, p·x)` as a bracket.
///
/// `hi = min a_n/n` by subadditivity of `a_n`. `lo` is the larger of
/// `½·max_{S²} ℓ_lo` and `ℓ_lo[p]/n` over the largest products of each level.
pub fn joint_stable_length(
    model: &dyn ActionModel,
    s: &[Word],
    cfg: JslConfig,
) -> Result<JointStableLength> {
    if cfg.n_max < 2 {
        return Err(Error::input("n_max must be at least 2"));
    }
    if s.is_empty() {
        return Err(Error::input("subset must be non-empty"));
    }
    let alphabet = model.alphabet();
    for w in s {
        alphabet.check(w)?;
    }
    let half_s2 = half_max_square_length(model, s, cfg.stable)?;

    let (levels, products, certified, method) = if let Some(weights) = model.tree_weights() {
        let (a, products) = tree_levels(&weights, s, cfg.n_max, cfg.max_frontier)?;
        (a, products, true, "tree-split")
    } else {
        frontier_levels(model, s, cfg)?
    };

    let pad = if model.rounding_free() { 0.0 } else { FLOAT_PAD };
    let hi = levels
        .iter()
        .enumerate()
        .map(|(i, a)| a / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let hi = hi + pad * hi;

    let mut lo = half_s2.lo;
    for (i, lvl) in products.iter().enumerate().skip(1) {
        let mut ranked: Vec<(f64, &Word)> = Vec::with_capacity(lvl.len());
        for p in lvl {
            ranked.push((model.displacement(p)?, p));
        }
        ranked.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(y.1)));
        for (_, p) in ranked.into_iter().take(cfg.lo_candidates) {
            let b = stable_length_of(model, p, cfg.stable)?;
            lo = lo.max(b.lo / (i + 1) as f64);
        }
    }
    let exact = certified && half_s2.exact && lo == hi;
    Ok(JointStableLength {
        bracket: LengthBracket {
            lo: lo.min(hi),
            hi,
            exact,
        },
        certified,
        levels,
        half_s2,
        method: method.to_string(),
    })
}

type Levels = (Vec<f64>, Vec<Vec<Word>>, bool, &'static str);

fn frontier_levels(model: &dyn ActionModel, s: &[Word], cfg: JslConfig) -> Result<Levels> {
    let mut a = Vec::with_capacity(cfg.n_max);
    let mut kept: Vec<Vec<Word>> = Vec::new();
    let mut frontier: Vec<(Word, f64)> = Vec::new();
    {
        let set: HashSet<Word> = s.iter().cloned().collect();
        let mut v: Vec<Word> = set.into_iter().collect();
        v.sort();
        for w in v {
            let d = model.displacement(&w)?;
            frontier.push((w, d));
        }
    }
    let mut certified = true;
    for n in 1..=cfg.n_max {
        if n > 1 {
            let mut seen: HashSet<Word> = HashSet::new();
            let mut next: Vec<(Word, f64)> = Vec::new();
            for (p, _) in &frontier {
                for x in s {
                    let q = p.mul(x);
                    if seen.insert(q.clone()) {
                        if seen.len() > cfg.max_frontier && !cfg.allow_pruning {
                            return Err(Error::cap(
                                format!("distinct products at level {n}"),
                                cfg.max_frontier,
                            ));
                        }
                        let d = model.displacement(&q)?;
                        next.push((q, d));
                    }
                }
            }
            if next.len() > cfg.max_frontier {
                next.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
                next.truncate(cfg.max_frontier);
                certified = false;
            }
            frontier = next;
        }
        a.push(frontier.iter().map(|(_, d)| *d).fold(0.0, f64::max));
        kept.push(frontier.iter().map(|(w, _)| w.clone()).collect());
    }
    let method = if certified { "frontier" } else { "frontier-beam" };
    Ok((a, kept, certified, method))
}

/// `K·δ + ½·max_{S²} ℓ_hi`.
pub fn bf_upper(half_s2: &LengthBracket, delta: f64, k: f64) -> f64 {
    k * delta + half_s2.hi
}

/// The constant-free half: `½·max_{S²} ℓ_lo ≤ 𝔇_hi`.
pub fn bf_lower_check(j: &JointStableLength, tol: f64) -> bool {
    j.half_s2.lo <= j.bracket.hi + tol
}

/// Outcome of checking `𝔇 ≤ Kδ + ½·max_{S²} ℓ ≤ Kδ + 𝔇`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfReport {
    pub jsl: LengthBracket,
    pub certified: bool,
    pub half_s2: LengthBracket,
    pub delta: f64,
    pub k: f64,
    pub upper: f64,
    pub lower_ok: bool,
    /// `Some(true)` when `𝔇_hi ≤ upper`, `Some(false)` when `𝔇_lo > upper`.
    pub upper_holds: Option<bool>,
    /// `[K needed for 𝔇_lo, K sufficient for 𝔇_hi]`; `None` when `δ = 0`.
    pub minimal_k: Option<(f64, f64)>,
}

pub fn bf_check(
    model: &dyn ActionModel,
    s: &[Word],
    delta: f64,
    k: f64,
    cfg: JslConfig,
    tol: f64,
) -> Result<BfReport> {
    let j = joint_stable_length(model, s, cfg)?;
    let upper = bf_upper(&j.half_s2, delta, k);
    let upper_holds = if j.bracket.hi <= upper + tol {
        Some(true)
    } else if j.bracket.lo > upper + tol {
        Some(false)
    } else {
        None
    };
    let minimal_k = (delta > 0.0).then(|| {
        (
            ((j.bracket.lo - j.half_s2.hi) / delta).max(0.0),
            ((j.bracket.hi - j.half_s2.lo) / delta).max(0.0),
        )
    });
    Ok(BfReport {
        jsl: j.bracket,
        certified: j.certified,
        half_s2: j.half_s2,
        delta,
        k,
        upper,
        lower_ok: bf_lower_check(&j, tol),
        upper_holds,
        minimal_k,
    })
}

/// One subset of a tree sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub subset: String,
    pub jsl: LengthBracket,
    pub half_s2: f64,
    pub max_disp: f64,
    /// `𝔇_hi − ½·max_{S²} ℓ`.
    pub gap: f64,
    pub lo_equal: bool,
    pub width_ok: bool,
}

/// Checks `𝔇(S) = ½·max_{S²} ℓ` over every subset of a tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSweep {
    pub subsets: usize,
    pub max_gap: f64,
    /// Subsets whose lower end differs from `½·max_{S²} ℓ`.
    pub lo_failures: usize,
    /// Subsets with `hi − lo > 2·max_{s ∈ S} d(x, s·x)/n_max`.
    pub width_failures: usize,
    pub rows: Vec<SweepRow>,
}

/// Runs [`joint_stable_length`] on every subset of size `1..=max_size` of the
/// non-trivial words of length at most `max_len`.
pub fn bf_tree_sweep(
    model: &dyn ActionModel,
    max_size: usize,
    max_len: usize,
    cfg: JslConfig,
) -> Result<TreeSweep> {
    if model.tree_weights().is_none() {
        return Err(Error::input("the sweep needs a tree model"));
    }
    let words: Vec<Word> = model
        .alphabet()
        .ball(max_len, cfg.max_frontier)?
        .into_iter()
        .filter(|w| !w.is_identity())
        .collect();
    let mut out = TreeSweep {
        subsets: 0,
        max_gap: 0.0,
        lo_failures: 0,
        width_failures: 0,
        rows: Vec::new(),
    };
    let mut idx: Vec<usize> = Vec::new();
    for size in 1..=max_size.min(words.len()) {
        idx.clear();
        idx.extend(0..size);
        loop {
            let s: Vec<Word> = idx.iter().map(|&i| words[i].clone()).collect();
            let j = joint_stable_length(model, &s, cfg)?;
            let mut max_disp: f64 = 0.0;
            for w in &s {
                max_disp = max_disp.max(model.displacement(w)?);
            }
            let half = j.half_s2.lo;
            let gap = j.bracket.hi - half;
            let lo_equal = j.bracket.lo == half && half == j.half_s2.hi;
            let width_ok = j.bracket.width() <= 2.0 * max_disp / cfg.n_max as f64;
            out.subsets += 1;
            out.max_gap = out.max_gap.max(gap);
            out.lo_failures += usize::from(!lo_equal);
            out.width_failures += usize::from(!width_ok);
            out.rows.push(SweepRow {
                subset: s.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" "),
                jsl: j.bracket,
                half_s2: half,
                max_disp,
                gap,
                lo_equal,
                width_ok,
            });
            // next combination
            let mut k = size;
            while k > 0 && idx[k - 1] == words.len() - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for t in k..size {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
    Ok(out)
}

/// Constants `c_m`, `d_m` of the Bochi inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochiConstants {
    pub m: usize,
    pub c_m: f64,
    pub d_m: usize,
}

impl BochiConstants {
    /// The caps `c_m = 8 log 2 + 5 log m`, `d_m = 2m³`.
    pub fn caps(m: usize) -> BochiConstants {
        BochiConstants {
            m,
            c_m: 8.0 * std::f64::consts::LN_2 + 5.0 * (m as f64).ln(),
            d_m: 2 * m * m * m,
        }
    }

    pub fn new(m: usize, c_m: f64, d_m: usize) -> Result<BochiConstants> {
        let cap = BochiConstants::caps(m);
        if m == 0 || d_m == 0 || !(c_m.is_finite() && c_m >= 0.0) {
            return Err(Error::input("Bochi constants must be positive"));
        }
        if c_m > cap.c_m + 1e-12 || d_m > cap.d_m {
            return Err(Error::input(format!(
                "Bochi constants exceed the caps c_m ≤ {:.6}, d_m ≤ {}",
                cap.c_m, cap.d_m
            )));
        }
        Ok(BochiConstants { m, c_m, d_m })
    }
}

/// Per-length maxima over all products of a matrix set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductMaxima {
    /// `max_{Sⁿ} ln σ₁` for `n = 1..`.
    pub log_sigma1: Vec<f64>,
    /// `max_{Sⁿ} ln λ₁` for `n = 1..`.
    pub log_rho: Vec<f64>,
}

fn check_matrices(mats: &[DMatrix<f64>]) -> Result<usize> {
    let m = mats
        .first()
        .ok_or_else(|| Error::input("matrix set is empty"))?
        .nrows();
    for a in mats {
        if a.nrows() != m || a.ncols() != m {
            return Err(Error::input("matrices must be square of a common dimension"));
        }
        if !a.iter().all(|x| x.is_finite()) {
            return Err(Error::input("matrix entries must be finite"));
        }
    }
    Ok(m)
}

/// Enumerates every product of length `1..=depth` depth-first.
pub fn product_maxima(mats: &[DMatrix<f64>], depth: usize, cap: usize) -> Result<ProductMaxima> {
    let m = check_matrices(mats)?;
    let total = (mats.len() as f64).powi(depth as i32);
    if total > cap as f64 {
        return Err(Error::cap(
            format!("{} products of length {depth}", mats.len()),
            cap,
        ));
    }
    let mut out = ProductMaxima {
        log_sigma1: vec![f64::NEG_INFINITY; depth],
        log_rho: vec![f64::NEG_INFINITY; depth],
    };
    let mut stack: Vec<(ScaledMat, usize)> = vec![(ScaledMat::identity(m), 0)];
    while let Some((p, len)) = stack.pop() {
        if len == depth {
            continue;
        }
        for a in mats {
            let q = p.mul(a);
            out.log_sigma1[len] = out.log_sigma1[len].max(q.log_sigma1()?);
            out.log_rho[len] = out.log_rho[len].max(q.log_spectral_radius()?);
            stack.push((q, len + 1));
        }
    }
    Ok(out)
}

/// Bracket for `ln 𝔕(S)`:
/// `hi = min_n (1/n)·max_{Sⁿ} ln σ₁`, `lo = max_n (1/n)·max_{Sⁿ} ln λ₁`.
pub fn jsr_bracket(mats: &[DMatrix<f64>], n_max: usize, cap: usize) -> Result<LengthBracket> {
    if n_max < 1 {
        return Err(Error::input("n_max must be at least 1"));
    }
    let pm = product_maxima(mats, n_max, cap)?;
    Ok(jsr_from_maxima(&pm, n_max))
}

/// The same bracket from precomputed maxima, using lengths `1..=n_max`.
pub fn jsr_from_maxima(pm: &ProductMaxima, n_max: usize) -> LengthBracket {
    let n_max = n_max.min(pm.log_sigma1.len());
    let hi = (0..n_max)
        .map(|i| pm.log_sigma1[i] / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let lo = (0..n_max)
        .map(|i| pm.log_rho[i] / (i + 1) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let pad = FLOAT_PAD * (hi.abs().max(lo.abs()) + 1e-300);
    let hi = hi + pad;
    let lo = lo - pad;
    LengthBracket {
        lo: lo.min(hi),
        hi,
        exact: false,
    }
}

/// Right-hand side of the Bochi inequality in log scale,
/// `c_m + max_{1 ≤ j ≤ d_m} (1/j)·ln max_{Sʲ} λ₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochiRhs {
    pub value: f64,
    /// Largest `j` that was evaluated.
    pub depth: usize,
    /// True when every `j ≤ d_m` was evaluated.
    pub certified: bool,
}

fn rhs_from(pm: &ProductMaxima, c: &BochiConstants, depth: usize) -> f64 {
    c.c_m
        + (0..depth)
            .map(|i| pm.log_rho[i] / (i + 1) as f64)
            .fold(f64::NEG_INFINITY, f64::max)
}

pub fn bochi_rhs(mats: &[DMatrix<f64>], c: &BochiConstants, cap: usize) -> Result<BochiRhs> {
    let m = check_matrices(mats)?;
    if m != c.m {
        return Err(Error::input(format!(
            "constants are for dimension {}, matrices have dimension {m}",
            c.m
        )));
    }
    let pm = product_maxima(mats, c.d_m, cap)?;
    Ok(BochiRhs {
        value: rhs_from(&pm, c, c.d_m),
        depth: c.d_m,
        certified: true,
    })
}

/// Evaluates only `j ≤ probe_depth`; the result is labelled uncertified.
pub fn bochi_rhs_probe(
    mats: &[DMatrix<f64>],
    c: &BochiConstants,
    probe_depth: usize,
    cap: usize,
) -> Result<BochiRhs> {
    let depth = probe_depth.min(c.d_m).max(1);
    let pm = product_maxima(mats, depth, cap)?;
    Ok(BochiRhs {
        value: rhs_from(&pm, c, depth),
        depth,
        certified: depth == c.d_m,
    })
}

/// JSR bracket and Bochi right-hand side from one enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochiReport {
    pub jsr: LengthBracket,
    pub rhs: BochiRhs,
    pub constants: BochiConstants,
    pub holds: bool,
}

pub fn bochi_check(
    mats: &[DMatrix<f64>],
    c: &BochiConstants,
    n_max: usize,
    cap: usize,
    tol: f64,
) -> Result<BochiReport> {
    let depth_needed = c.d_m.max(n_max);
    let feasible = (mats.len() as f64).powi(depth_needed as i32) <= cap as f64;
    let (jsr, rhs) = if feasible {
        let pm = product_maxima(mats, depth_needed, cap)?;
        (
            jsr_from_maxima(&pm, n_max),
            BochiRhs {
                value: rhs_from(&pm, c, c.d_m),
                depth: c.d_m,
                certified: true,
            },
        )
    } else {
        let depth = ((cap as f64).ln() / (mats.len().max(2) as f64).ln()).floor() as usize;
        let depth = depth.max(1);
        let pm = product_maxima(mats, depth, cap)?;
        (
            jsr_from_maxima(&pm, n_max.min(depth)),
            BochiRhs {
                value: rhs_from(&pm, c, depth.min(c.d_m)),
                depth: depth.min(c.d_m),
                certified: depth >= c.d_m,
            },
        )
    };
    Ok(BochiReport {
        holds: jsr.hi <= rhs.value + tol,
        jsr,
        rhs,
        constants: *c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::TreeModel;
    use crate::words::Alphabet;

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn ws(items: &[&str]) -> Vec<Word> {
        items.iter().map(|s| Word::parse(&f2(), s).unwrap()).collect()
    }

    fn brute_levels(weights: &[f64], s: &[Word], n_max: usize) -> Vec<f64> {
        let t = TreeModel::new(f2(), weights.to_vec()).unwrap();
        let mut level: Vec<Word> = s.to_vec();
        let mut out = Vec::new();
        for n in 1..=n_max {
            if n > 1 {
                level = level.iter().flat_map(|p| s.iter().map(move |x| p.mul(x))).collect();
            }
            out.push(level.iter().map(|p| t.displacement(p).unwrap()).fold(0.0, f64::max));
        }
        out
    }

    #[test]
    fn tree_split_matches_brute_force() {
        let cases: Vec<(Vec<f64>, Vec<Word>)> = vec![
            (vec![1.0, 1.0], ws(&["a", "b"])),
            (vec![1.0, 1.0], ws(&["abA", "aBA"])),
            (vec![1.0, 2.5], ws(&["ab", "BA", "aab"])),
            (vec![1.0, 1.0], ws(&["aB", "bA", "1"])),
            (vec![0.5, 1.0], ws(&["abab", "A", "bb"])),
        ];
        for (weights, s) in cases {
            let (fast, _) = tree_levels(&weights, &s, 8, usize::MAX).unwrap();
            assert_eq!(fast, brute_levels(&weights, &s, 8), "S = {s:?}");
        }
    }

    #[test]
    fn standard_pair_is_exact() {
        let t = TreeModel::unit(f2());
        let j = joint_stable_length(&t, &ws(&["a", "b"]), JslConfig { n_max: 8, ..Default::default() }).unwrap();
        assert_eq!((j.bracket.lo, j.bracket.hi), (1.0, 1.0));
        assert!(j.bracket.exact);
    }

    #[test]
    fn conjugated_pair() {
        let t = TreeModel::unit(f2());
        let j = joint_stable_length(&t, &ws(&["abA", "aBA"]), JslConfig { n_max: 8, ..Default::default() }).unwrap();
        assert_eq!(j.levels, (1..=8).map(|n| n as f64 + 2.0).collect::<Vec<_>>());
        assert_eq!((j.bracket.lo, j.bracket.hi), (1.0, 1.25));
    }

    #[test]
    fn identity_subset() {
        let t = TreeModel::unit(f2());
        let j = joint_stable_length(&t, &[Word::identity()], JslConfig::default()).unwrap();
        assert_eq!((j.bracket.lo, j.bracket.hi), (0.0, 0.0));
    }

    #[test]
    fn frontier_path_agrees_with_tree_split() {
        struct Plain(TreeModel);
        impl ActionModel for Plain {
            fn kind(&self) -> &'static str {
                "plain"
            }
            fn alphabet(&self) -> Alphabet {
                self.0.alphabet()
            }
            fn displacement(&self, g: &Word) -> Result<f64> {
                self.0.displacement(g)
            }
            fn is_symmetric(&self) -> bool {
                true
            }
            fn delta(&self) -> Option<f64> {
                Some(0.0)
            }
            fn exactness(&self) -> crate::actions::Exactness {
                crate::actions::Exactness::BracketOnly
            }
        }
        let t = TreeModel::unit(f2());
        let s = ws(&["ab", "B", "aBB"]);
        let cfg = JslConfig { n_max: 7, ..Default::default() };
        let a = joint_stable_length(&t, &s, cfg).unwrap();
        let b = joint_stable_length(&Plain(t), &s, cfg).unwrap();
        assert_eq!(a.levels, b.levels);
        assert_eq!(b.method, "frontier");
    }

    #[test]
    fn bf_examples() {
        let t = TreeModel::unit(f2());
        let r = bf_check(&t, &ws(&["a", "b"]), 0.0, 1e4, JslConfig::default(), 1e-9).unwrap();
        assert_eq!(r.upper, 1.0);
        assert!(r.lower_ok);
        assert_eq!(r.upper_holds, Some(true));
        let single = bf_check(&t, &ws(&["a"]), 0.0, 0.0, JslConfig::default(), 0.0).unwrap();
        assert_eq!((single.jsl.lo, single.jsl.hi, single.upper), (1.0, 1.0, 1.0));
    }

    #[test]
    fn bochi_caps_at_dimension_two() {
        let c = BochiConstants::caps(2);
        assert!((c.c_m - 13.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!((c.c_m - 9.0109).abs() < 1e-4);
        assert_eq!(c.d_m, 16);
        assert!(BochiConstants::new(2, 10.0, 16).is_err());
        assert!(BochiConstants::new(2, 9.0, 17).is_err());
    }

    #[test]
    fn jsr_diagonal_and_identity() {
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let b = jsr_bracket(std::slice::from_ref(&d), 6, 1 << 20).unwrap();
        assert!((b.lo - 2f64.ln()).abs() < 1e-9 && (b.hi - 2f64.ln()).abs() < 1e-9);
        let i = DMatrix::<f64>::identity(2, 2);
        let b = jsr_bracket(&[i], 4, 1 << 20).unwrap();
        assert!(b.hi.abs() < 1e-9 && b.lo.abs() < 1e-9);
        let rhs = bochi_rhs(&[d], &BochiConstants::caps(2), 1 << 20).unwrap();
        assert!((rhs.value - (13.0 * std::f64::consts::LN_2 + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn product_cap() {
        let d = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(
            product_maxima(&[d.clone(), d], 20, 1000),
            Err(Error::ResourceCap { .. })
        ));
    }
}
