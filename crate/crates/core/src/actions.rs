//! Isometric actions seen through their displacement function
//! `g ↦ d(x, g·x)` at a fixed basepoint, and stable lengths computed from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{cyclic_reduce, Alphabet, ConjClass, GeneratingSet, Word};

/// Relative padding applied to brackets computed in floating point.
pub const FLOAT_PAD: f64 = 1e-10;

/// How a model computes stable lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    /// Weighted cyclically reduced length.
    TreeExact,
    /// Spectral formula on a matrix image.
    EigenvalueExact,
    /// Only a two-sided bracket is available.
    BracketOnly,
}

/// An interval `[lo, hi]` known to contain a length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthBracket {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
}

impl LengthBracket {
    pub fn exact(v: f64) -> LengthBracket {
        LengthBracket {
            lo: v,
            hi: v,
            exact: true,
        }
    }

    pub fn new(lo: f64, hi: f64) -> LengthBracket {
        let lo = lo.max(0.0);
        LengthBracket {
            lo: lo.min(hi),
            hi,
            exact: false,
        }
    }

    pub fn zero() -> LengthBracket {
        LengthBracket::exact(0.0)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lo - tol <= v && v <= self.hi + tol
    }

    /// Widens a floating point result by a relative margin; exactness is kept.
    pub fn padded(&self, rel: f64) -> LengthBracket {
        if self.exact && rel == 0.0 {
            return *self;
        }
        LengthBracket {
            lo: (self.lo - rel * self.lo.abs()).max(0.0),
            hi: self.hi + rel * self.hi.abs(),
            exact: self.exact,
        }
    }

    pub fn intersect(&self, other: &LengthBracket) -> LengthBracket {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        LengthBracket {
            lo: lo.min(hi),
            hi,
            exact: self.exact || other.exact,
        }
    }

    pub fn scale(&self, c: f64) -> LengthBracket {
        LengthBracket {
            lo: self.lo * c,
            hi: self.hi * c,
            exact: self.exact,
        }
    }
}

/// An isometric action of a free group, exposed through the displacement of
/// a fixed basepoint.
pub trait ActionModel: Send + Sync {
    /// Short model name for reports.
    fn kind(&self) -> &'static str;

    fn alphabet(&self) -> Alphabet;

    /// `d(x, g·x)`.
    fn displacement(&self, g: &Word) -> Result<f64>;

    /// `[d(x, g·x), d(x, g²·x), …, d(x, g^k_max·x)]`.
    fn power_displacements(&self, g: &Word, k_max: usize) -> Result<Vec<f64>> {
        (1..=k_max).map(|k| self.displacement(&g.pow(k))).collect()
    }

    fn is_symmetric(&self) -> bool;

    /// Hyperbolicity constant, when known.
    fn delta(&self) -> Option<f64>;

    /// Coboundedness constant, when known.
    fn cobound(&self) -> Option<f64> {
        None
    }

    /// Rough-geodesicity constant, when known.
    fn alpha(&self) -> Option<f64> {
        None
    }

    fn exactness(&self) -> Exactness;

    /// True when displacements are computed without rounding (integer weights).
    fn rounding_free(&self) -> bool {
        false
    }

    /// Stable length of a cyclically reduced word, for exact models.
    fn exact_stable_length(&self, _rep: &Word) -> Result<Option<f64>> {
        Ok(None)
    }

    /// A model-specific certified lower bound on the stable length.
    fn certified_lower_bound(&self, _rep: &Word) -> Result<f64> {
        Ok(0.0)
    }

    /// Per-generator weights when the model is a weighted tree.
    fn tree_weights(&self) -> Option<Vec<f64>> {
        None
    }

    /// A constant `κ > 0` with `ℓ_X[g] ≥ κ·ℓ_std[g]` for every class, where
    /// `ℓ_std` is the cyclically reduced length.
    fn std_length_comparison(&self) -> Option<f64> {
        None
    }

    /// The generating set when the model is a word metric (trees included).
    fn generating_set(&self) -> Option<GeneratingSet> {
        None
    }
}

/// Settings for the generic stable length estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableConfig {
    pub k_max: usize,
    pub c_delta: f64,
}

impl Default for StableConfig {
    fn default() -> Self {
        StableConfig {
            k_max: 8,
            c_delta: 4.0,
        }
    }
}

/// Bracket for `ℓ[g] = lim d(x, gᵏx)/k` from `a_k = d(x, gᵏx)`, `k ≤ 2·k_max`.
///
/// `hi = min a_k/k` holds by subadditivity. When the model declares `δ`,
/// `lo = max_{k ≤ k_max} (a_{2k} − a_k)/k − c_δ·δ/k`, clamped at 0.
pub fn stable_length_bracket(
    model: &dyn ActionModel,
    g: &Word,
    k_max: usize,
    c_delta: f64,
) -> Result<LengthBracket> {
    if k_max < 2 {
        return Err(Error::input("k_max must be at least 2"));
    }
    if g.is_identity() {
        return Ok(LengthBracket::zero());
    }
    let a = model.power_displacements(g, 2 * k_max)?;
    let hi = a
        .iter()
        .enumerate()
        .map(|(i, ak)| ak / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let lo = match model.delta() {
        Some(delta) => (1..=k_max)
            .map(|k| (a[2 * k - 1] - a[k - 1]) / k as f64 - c_delta * delta / k as f64)
            .fold(0.0, f64::max),
        None => 0.0,
    };
    let pad = if model.rounding_free() { 0.0 } else { FLOAT_PAD };
    let hi = hi + pad * hi;
    Ok(LengthBracket::new((lo - pad * lo).min(hi), hi))
}

/// Stable length of a conjugacy class: exact when the model allows, otherwise
/// the generic bracket intersected with the model's certified lower bound.
pub fn stable_length(
    model: &dyn ActionModel,
    class: &ConjClass,
    cfg: StableConfig,
) -> Result<LengthBracket> {
    let rep = class.rep();
    if rep.is_identity() {
        return Ok(LengthBracket::zero());
    }
    if let Some(v) = model.exact_stable_length(rep)? {
        return Ok(LengthBracket::exact(v));
    }
    let b = stable_length_bracket(model, rep, cfg.k_max, cfg.c_delta)?;
    let lb = model.certified_lower_bound(rep)?;
    Ok(LengthBracket::new(b.lo.max(lb.min(b.hi)), b.hi))
}

/// Stable length of an arbitrary element.
pub fn stable_length_of(
    model: &dyn ActionModel,
    g: &Word,
    cfg: StableConfig,
) -> Result<LengthBracket> {
    stable_length(model, &cyclic_reduce(g), cfg)
}

/// `(gx | hx)_x = ½(d(gx, x) + d(x, hx) − d(gx, hx))`. The flag is set when the
/// model is asymmetric, in which case this is the ordered product.
pub fn gromov_product(model: &dyn ActionModel, g: &Word, h: &Word) -> Result<(f64, bool)> {
    let ginv = g.inverse();
    let v = 0.5
        * (model.displacement(&ginv)? + model.displacement(h)?
            - model.displacement(&ginv.mul(h))?);
    Ok((v, !model.is_symmetric()))
}

/// `(px | qx)_{rx}`.
pub fn gromov_product_at(model: &dyn ActionModel, p: &Word, q: &Word, r: &Word) -> Result<f64> {
    let pinv = p.inverse();
    let rinv = r.inverse();
    Ok(0.5
        * (model.displacement(&pinv.mul(r))? + model.displacement(&rinv.mul(q))?
            - model.displacement(&pinv.mul(q))?))
}

/// Defect of the four-point condition on orbit points `x, y, z, w`: the least
/// `δ` with `(x|y)_z ≥ min{(x|w)_z, (y|w)_z} − δ`, clamped at 0.
pub fn four_point_defect(
    model: &dyn ActionModel,
    x: &Word,
    y: &Word,
    z: &Word,
    w: &Word,
) -> Result<f64> {
    let xy = gromov_product_at(model, x, y, z)?;
    let xw = gromov_product_at(model, x, w, z)?;
    let yw = gromov_product_at(model, y, w, z)?;
    Ok((xw.min(yw) - xy).max(0.0))
}

/// Something with singular value gaps `ln(σ₁/σ₂)` along group elements.
pub trait SingularGap {
    fn alphabet(&self) -> Alphabet;
    fn log_sigma_gap(&self, g: &Word) -> Result<f64>;
}

/// Exponential singular value gap fitted on a ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnosovCertificate {
    pub mu: f64,
    pub c: f64,
    pub ok: bool,
    pub radius: usize,
    /// Smallest `ln(σ₁/σ₂)` over words of each length `1..=radius`.
    pub min_gap_by_length: Vec<f64>,
}

/// Fits `ln(σ₁/σ₂)(ρ(g)) ≥ ln C + μ|g|` over the ball of the given radius.
///
/// With `m_n` the smallest gap at word length `n`, `μ` is the slope of the last
/// edge of the lower convex hull of the points `(n, m_n)` and `C` is the
/// largest constant making the inequality hold on the ball.
pub fn anosov_certificate(rep: &dyn SingularGap, radius: usize) -> Result<AnosovCertificate> {
    if radius < 2 {
        return Err(Error::input("certificate radius must be at least 2"));
    }
    let alphabet = rep.alphabet();
    let mut min_gap = vec![f64::INFINITY; radius];
    for g in alphabet.ball(radius, 10_000_000)? {
        if g.is_identity() {
            continue;
        }
        let v = rep.log_sigma_gap(&g)?;
        let slot = &mut min_gap[g.len() - 1];
        *slot = slot.min(v);
    }
    // lower hull of (n, m_n), n = 1..radius
    let pts: Vec<(f64, f64)> = min_gap
        .iter()
        .enumerate()
        .map(|(i, m)| ((i + 1) as f64, *m))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(*p);
    }
    let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
    let mu = (b.1 - a.1) / (b.0 - a.0);
    let log_c = pts
        .iter()
        .map(|(n, m)| m - mu * n)
        .fold(f64::INFINITY, f64::min);
    Ok(AnosovCertificate {
        mu,
        c: log_c.exp(),
        ok: mu > 1e-12,
        radius,
        min_gap_by_length: min_gap,
    })
}
