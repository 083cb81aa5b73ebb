//! Concrete actions: weighted trees, weighted word metrics, Möbius actions on
//! ℍ²/ℍ³ and singular-value pseudo-metrics of linear representations.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::actions::{
    anosov_certificate, ActionModel, AnosovCertificate, Exactness, SingularGap,
};
use crate::error::{Error, Result};
use crate::linalg::{inverse, normalize_det, ScaledC2, ScaledMat, C2};
use crate::words::{
    check_semigroup_generation, cyclic_reduce, word_length, word_length_in_tube, Alphabet,
    GeneratingSet, GenerationStatus, Letter, SearchLimits, Word,
};

/// Cayley tree of the standard generators, edge `a_i^{±1}` of length `weights[i-1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeModel {
    alphabet: Alphabet,
    weights: Vec<f64>,
}

impl TreeModel {
    pub fn new(alphabet: Alphabet, weights: Vec<f64>) -> Result<TreeModel> {
        if weights.len() != alphabet.rank() {
            return Err(Error::input(format!(
                "tree needs {} weights, got {}",
                alphabet.rank(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::input(format!("tree weights must be positive, got {w}")));
        }
        Ok(TreeModel { alphabet, weights })
    }

    pub fn unit(alphabet: Alphabet) -> TreeModel {
        TreeModel {
            alphabet,
            weights: vec![1.0; alphabet.rank()],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scaled(&self, c: f64) -> Result<TreeModel> {
        TreeModel::new(self.alphabet, self.weights.iter().map(|w| w * c).collect())
    }

    fn weight(&self, l: Letter) -> f64 {
        self.weights[l.index() - 1]
    }

    pub fn weighted_length(&self, g: &Word) -> f64 {
        g.letters().iter().map(|l| self.weight(*l)).sum()
    }

    /// `ℓ = d(x, gx) − 2(gx | g⁻¹x)_x`; agrees with the weighted cyclic length.
    pub fn stable_length_by_products(&self, g: &Word) -> f64 {
        let ginv = g.inverse();
        let common = &g.letters()[..g.common_prefix_len(&ginv)];
        let gp: f64 = common.iter().map(|l| self.weight(*l)).sum();
        self.weighted_length(g) - 2.0 * gp
    }
}

impl ActionModel for TreeModel {
    fn kind(&self) -> &'static str {
        "tree"
    }

    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn displacement(&self, g: &Word) -> Result<f64> {
        self.alphabet.check(g)?;
        Ok(self.weighted_length(g))
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn delta(&self) -> Option<f64> {
        Some(0.0)
    }

    fn cobound(&self) -> Option<f64> {
        Some(self.weights.iter().copied().fold(0.0, f64::max) / 2.0)
    }

    fn alpha(&self) -> Option<f64> {
        self.weights.iter().all(|w| *w == 1.0).then_some(0.0)
    }

    fn exactness(&self) -> Exactness {
        Exactness::TreeExact
    }

    fn rounding_free(&self) -> bool {
        self.weights.iter().all(|w| w.fract() == 0.0)
    }

    fn exact_stable_length(&self, rep: &Word) -> Result<Option<f64>> {
        self.alphabet.check(rep)?;
        Ok(Some(self.weighted_length(cyclic_reduce(rep).rep())))
    }

    fn tree_weights(&self) -> Option<Vec<f64>> {
        Some(self.weights.clone())
    }

    fn std_length_comparison(&self) -> Option<f64> {
        Some(self.weights.iter().copied().fold(f64::INFINITY, f64::min))
    }

    fn generating_set(&self) -> Option<GeneratingSet> {
        GeneratingSet::weighted_standard(self.alphabet, &self.weights).ok()
    }
}

/// Right word metric `d_S(g, h) = |g⁻¹h|_S` of a weighted, possibly
/// asymmetric generating set, with the group acting by left multiplication.
#[derive(Clone, Debug)]
pub struct WordMetricModel {
    set: GeneratingSet,
    limits: SearchLimits,
    exact_len: usize,
    tree: Option<TreeModel>,
}

/// Words longer than this get the tube upper bound instead of an exact search.
pub const DEFAULT_EXACT_WORD_LEN: usize = 10;

impl WordMetricModel {
    /// Fails unless `S` is certified to generate as a semigroup.
    pub fn new(set: GeneratingSet, limits: SearchLimits) -> Result<WordMetricModel> {
        let check = check_semigroup_generation(&set, limits);
        match check.status {
            GenerationStatus::Generated => {}
            GenerationStatus::NotGenerated => {
                return Err(Error::precondition(format!(
                    "generating set does not generate as a semigroup: {} is not a positive product",
                    check.failing.map(|l| l.to_string()).unwrap_or_default()
                )))
            }
            GenerationStatus::Inconclusive => {
                return Err(Error::precondition(format!(
                    "could not reach {} within cost radius {}",
                    check.failing.map(|l| l.to_string()).unwrap_or_default(),
                    limits.cost_radius
                )))
            }
        }
        let tree = set
            .standard_weights()
            .map(|w| TreeModel::new(set.alphabet(), w))
            .transpose()?;
        Ok(WordMetricModel {
            set,
            limits,
            exact_len: DEFAULT_EXACT_WORD_LEN,
            tree,
        })
    }

    pub fn set(&self) -> &GeneratingSet {
        &self.set
    }

    /// Words up to this length get an exact search.
    pub fn with_exact_len(mut self, len: usize) -> WordMetricModel {
        self.exact_len = len;
        self
    }

    /// `|g|_S` for short words. Longer words, or words whose exact search
    /// exceeds its budget, get the cost of the best product staying near the
    /// geodesic to `g`, which is an upper bound.
    pub fn length(&self, g: &Word) -> Result<f64> {
        if let Some(t) = &self.tree {
            return t.displacement(g);
        }
        if g.len() <= self.exact_len {
            match word_length(g, &self.set, self.limits) {
                Ok(v) => return Ok(v),
                Err(Error::SearchExhausted { .. }) | Err(Error::ResourceCap { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let lim = SearchLimits {
            cost_radius: f64::INFINITY,
            ..self.limits
        };
        let mut tube = self.set.max_element_len().max(1);
        loop {
            match word_length_in_tube(g, &self.set, tube, lim) {
                Ok(v) => return Ok(v),
                Err(Error::SearchExhausted { .. }) if tube < 4 * self.set.max_element_len().max(1) => {
                    tube *= 2;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

impl ActionModel for WordMetricModel {
    fn kind(&self) -> &'static str {
        "word_metric"
    }

    fn alphabet(&self) -> Alphabet {
        self.set.alphabet()
    }

    fn displacement(&self, g: &Word) -> Result<f64> {
        self.length(g)
    }

    fn is_symmetric(&self) -> bool {
        self.set.is_symmetric()
    }

    fn delta(&self) -> Option<f64> {
        self.tree.as_ref().map(|_| 0.0)
    }

    fn cobound(&self) -> Option<f64> {
        match &self.tree {
            Some(t) => t.cobound(),
            None => self.set.is_symmetric().then(|| self.set.max_weight() / 2.0),
        }
    }

    fn exactness(&self) -> Exactness {
        if self.tree.is_some() {
            Exactness::TreeExact
        } else {
            Exactness::BracketOnly
        }
    }

    fn rounding_free(&self) -> bool {
        self.set.elements().iter().all(|(_, w)| w.fract() == 0.0)
    }

    fn exact_stable_length(&self, rep: &Word) -> Result<Option<f64>> {
        match &self.tree {
            Some(t) => t.exact_stable_length(rep),
            None => Ok(None),
        }
    }

    /// `ℓ_S ≥ ℓ_tree / max(|s|/w(s))`, since one `S`-step of weight `w` moves at
    /// most `|s|` in the unit tree.
    fn certified_lower_bound(&self, rep: &Word) -> Result<f64> {
        let std = cyclic_reduce(rep).len() as f64;
        Ok(std / self.set.max_letters_per_cost())
    }

    fn tree_weights(&self) -> Option<Vec<f64>> {
        self.tree.as_ref().map(|t| t.weights.clone())
    }

    fn std_length_comparison(&self) -> Option<f64> {
        Some(1.0 / self.set.max_letters_per_cost())
    }

    fn generating_set(&self) -> Option<GeneratingSet> {
        Some(self.set.clone())
    }
}

/// Generator images in `PSL₂(ℝ)` (dimension 2, acting on ℍ² with basepoint
/// `i`) or `PSL₂(ℂ)` (dimension 3, acting on ℍ³ with basepoint `(0,0,1)`).
#[derive(Clone, Debug)]
pub struct MobiusModel {
    alphabet: Alphabet,
    dim: usize,
    gens: Vec<C2>,
    invs: Vec<C2>,
    delta: f64,
    comparison: Option<f64>,
}

impl MobiusModel {
    pub fn new(dim: usize, generators: Vec<C2>, delta: Option<f64>) -> Result<MobiusModel> {
        if dim != 2 && dim != 3 {
            return Err(Error::input(format!("Möbius model dimension must be 2 or 3, got {dim}")));
        }
        let alphabet = Alphabet::new(generators.len())?;
        let mut gens = Vec::with_capacity(generators.len());
        for (i, m) in generators.iter().enumerate() {
            if dim == 2 {
                if !m.is_real() {
                    return Err(Error::input(format!("generator {} of an ℍ² model must be real", i + 1)));
                }
                if m.det().re <= 0.0 {
                    return Err(Error::input(format!(
                        "generator {} must have positive determinant",
                        i + 1
                    )));
                }
            }
            gens.push(
                m.normalize()
                    .map_err(|e| Error::input(format!("generator {}: {e}", i + 1)))?,
            );
        }
        let delta = delta.unwrap_or(std::f64::consts::LN_2);
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::input("delta must be a nonnegative real"));
        }
        let invs = gens.iter().map(|g| g.adjugate()).collect();
        Ok(MobiusModel {
            alphabet,
            dim,
            gens,
            invs,
            delta,
            comparison: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[C2] {
        &self.gens
    }

    pub fn with_delta(mut self, delta: f64) -> MobiusModel {
        self.delta = delta;
        self
    }

    /// Records `κ` with `ℓ ≥ κ·ℓ_std`, e.g. from a singular value gap certificate.
    pub fn with_comparison(mut self, kappa: Option<f64>) -> MobiusModel {
        self.comparison = kappa.filter(|k| *k > 0.0);
        self
    }

    fn letter_matrix(&self, l: Letter) -> &C2 {
        if l.is_inverse() {
            &self.invs[l.index() - 1]
        } else {
            &self.gens[l.index() - 1]
        }
    }

    /// Image of a word as a scaled unit-determinant matrix.
    pub fn image(&self, g: &Word) -> Result<ScaledC2> {
        self.alphabet.check(g)?;
        Ok(g
            .letters()
            .iter()
            .fold(ScaledC2::identity(), |acc, l| acc.mul(self.letter_matrix(*l))))
    }

    /// Distance from the basepoint to its image, computed from the explicit
    /// Möbius action on the upper half plane (dimension 2 only).
    pub fn orbit_distance_h2(&self, g: &Word) -> Result<f64> {
        if self.dim != 2 {
            return Err(Error::input("orbit cross-check is only available in dimension 2"));
        }
        let s = self.image(g)?;
        let m = s.m.scale(Complex64::from(s.log_scale.exp()));
        let i = Complex64::i();
        let z = m.apply(i);
        Ok((1.0 + (z - i).norm_sqr() / (2.0 * z.im)).acosh())
    }
}

impl ActionModel for MobiusModel {
    fn kind(&self) -> &'static str {
        "mobius"
    }

    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn displacement(&self, g: &Word) -> Result<f64> {
        self.image(g)?.hyperbolic_displacement()
    }

    fn power_displacements(&self, g: &Word, k_max: usize) -> Result<Vec<f64>> {
        let c = cyclic_reduce(g);
        let w = self.image(c.conjugator())?;
        let winv = self.image(&c.conjugator().inverse())?;
        let u = self.image(c.rep())?;
        let mut p = w;
        let mut out = Vec::with_capacity(k_max);
        for _ in 0..k_max {
            p = p.mul_scaled(&u);
            out.push(p.mul_scaled(&winv).hyperbolic_displacement()?);
        }
        Ok(out)
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn delta(&self) -> Option<f64> {
        Some(self.delta)
    }

    fn exactness(&self) -> Exactness {
        Exactness::EigenvalueExact
    }

    /// `2·ln|λ_max|`; zero for elliptic and parabolic elements.
    fn exact_stable_length(&self, rep: &Word) -> Result<Option<f64>> {
        let m = self.image(rep)?;
        if self.dim == 2 {
            let t = m.m.trace().re.abs();
            let log_t = t.ln() + m.log_scale;
            if log_t <= std::f64::consts::LN_2 {
                return Ok(Some(0.0));
            }
        }
        Ok(Some((2.0 * m.log_spectral_radius()?).max(0.0)))
    }

    fn std_length_comparison(&self) -> Option<f64> {
        self.comparison
    }
}

impl SingularGap for MobiusModel {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn log_sigma_gap(&self, g: &Word) -> Result<f64> {
        self.image(g)?.log_sigma_gap()
    }
}

/// A real representation `ρ` with the pseudo-metric `ψ(g, h) = ln σ₁(ρ(g⁻¹h))`.
#[derive(Clone, Debug)]
pub struct LinearRepModel {
    alphabet: Alphabet,
    dim: usize,
    gens: Vec<DMatrix<f64>>,
    invs: Vec<DMatrix<f64>>,
    comparison: Option<f64>,
    alpha: Option<f64>,
}

impl LinearRepModel {
    /// Normalizes every generator to `|det| = 1`.
    pub fn new(generators: Vec<DMatrix<f64>>) -> Result<LinearRepModel> {
        let alphabet = Alphabet::new(generators.len())?;
        let dim = generators[0].nrows();
        let mut gens = Vec::with_capacity(generators.len());
        let mut invs = Vec::with_capacity(generators.len());
        for (i, m) in generators.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::input(format!(
                    "generator {} is not {dim}×{dim}",
                    i + 1
                )));
            }
            let n = normalize_det(m).map_err(|e| Error::input(format!("generator {}: {e}", i + 1)))?;
            invs.push(inverse(&n)?);
            gens.push(n);
        }
        Ok(LinearRepModel {
            alphabet,
            dim,
            gens,
            invs,
            comparison: None,
            alpha: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.gens
    }

    /// Records `κ` with `ℓ ≥ κ·ℓ_std`.
    pub fn with_comparison(mut self, kappa: Option<f64>) -> LinearRepModel {
        self.comparison = kappa.filter(|k| *k > 0.0);
        self
    }

    pub fn with_alpha(mut self, alpha: Option<f64>) -> LinearRepModel {
        self.alpha = alpha;
        self
    }

    pub fn image(&self, g: &Word) -> Result<ScaledMat> {
        self.alphabet.check(g)?;
        Ok(g.letters().iter().fold(ScaledMat::identity(self.dim), |acc, l| {
            if l.is_inverse() {
                acc.mul(&self.invs[l.index() - 1])
            } else {
                acc.mul(&self.gens[l.index() - 1])
            }
        }))
    }

    /// `κ` implied by a gap slope `μ`: with unit determinant, `ln σ₁ ≥ (m−1)/m · ln(σ₁/σ₂)`.
    pub fn comparison_from_gap_slope(&self, mu: f64) -> f64 {
        mu * (self.dim as f64 - 1.0) / self.dim as f64
    }
}

impl ActionModel for LinearRepModel {
    fn kind(&self) -> &'static str {
        "linear"
    }

    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn displacement(&self, g: &Word) -> Result<f64> {
        Ok(self.image(g)?.log_sigma1()?.max(0.0))
    }

    fn power_displacements(&self, g: &Word, k_max: usize) -> Result<Vec<f64>> {
        let c = cyclic_reduce(g);
        let w = self.image(c.conjugator())?;
        let winv = self.image(&c.conjugator().inverse())?;
        let u = self.image(c.rep())?;
        let mut p = w;
        let mut out = Vec::with_capacity(k_max);
        for _ in 0..k_max {
            p = p.mul_scaled(&u);
            out.push(p.mul_scaled(&winv).log_sigma1()?.max(0.0));
        }
        Ok(out)
    }

    fn is_symmetric(&self) -> bool {
        // σ₁(A⁻¹) = 1/σ_m(A), which equals σ₁(A) only in dimension 2
        self.dim <= 2
    }

    fn delta(&self) -> Option<f64> {
        None
    }

    fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    fn exactness(&self) -> Exactness {
        Exactness::EigenvalueExact
    }

    /// `ln λ₁`, the log spectral radius.
    fn exact_stable_length(&self, rep: &Word) -> Result<Option<f64>> {
        Ok(Some(self.image(rep)?.log_spectral_radius()?.max(0.0)))
    }

    fn std_length_comparison(&self) -> Option<f64> {
        self.comparison
    }
}

impl SingularGap for LinearRepModel {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn log_sigma_gap(&self, g: &Word) -> Result<f64> {
        self.image(g)?.log_sigma_gap()
    }
}

/// Builds `A_i = R(θ_i)·diag(λ_i, 1/λ_i)·R(θ_i)⁻¹`. Complex angles give a
/// representation into `PSL₂(ℂ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchottkyBuilder {
    pub stretches: Vec<f64>,
    pub angles: Vec<Complex64>,
    pub delta: Option<f64>,
    pub certificate_radius: usize,
}

/// Output of [`SchottkyBuilder::build`].
#[derive(Clone, Debug)]
pub struct SchottkyGroup {
    pub mobius: MobiusModel,
    /// The same matrices as a linear representation (real angles only).
    pub linear: Option<LinearRepModel>,
    pub certificate: AnosovCertificate,
    pub warnings: Vec<String>,
}

impl SchottkyBuilder {
    pub fn new(stretches: Vec<f64>, angles: Vec<f64>) -> SchottkyBuilder {
        SchottkyBuilder {
            stretches,
            angles: angles.into_iter().map(Complex64::from).collect(),
            delta: None,
            certificate_radius: 6,
        }
    }

    pub fn generator_matrices(&self) -> Result<Vec<C2>> {
        if self.stretches.len() != self.angles.len() || self.stretches.is_empty() {
            return Err(Error::input("need one stretch per angle and at least one generator"));
        }
        let mut out = Vec::with_capacity(self.stretches.len());
        for (lam, th) in self.stretches.iter().zip(&self.angles) {
            if !(lam.is_finite() && *lam > 1.0) {
                return Err(Error::input(format!("stretch must exceed 1, got {lam}")));
            }
            let (c, s) = (th.cos(), th.sin());
            let r = C2::new(c, -s, s, c);
            let rinv = C2::new(c, s, -s, c);
            let d = C2::real(*lam, 0.0, 0.0, 1.0 / lam);
            out.push(r.mul(&d).mul(&rinv));
        }
        Ok(out)
    }

    pub fn build(&self) -> Result<SchottkyGroup> {
        let mats = self.generator_matrices()?;
        let real = self.angles.iter().all(|a| a.im == 0.0);
        let mut mobius = MobiusModel::new(if real { 2 } else { 3 }, mats.clone(), self.delta)?;
        let linear = if real {
            Some(LinearRepModel::new(
                mats.iter()
                    .map(|m| DMatrix::from_row_slice(2, 2, &[m.a.re, m.b.re, m.c.re, m.d.re]))
                    .collect(),
            )?)
        } else {
            None
        };
        let certificate = anosov_certificate(&mobius, self.certificate_radius)?;
        let mut warnings = Vec::new();
        if !certificate.ok {
            warnings.push(format!(
                "singular value gap certificate failed (mu = {:.6})",
                certificate.mu
            ));
        }
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let ab = mats[i].mul(&mats[j]);
                let ba = mats[j].mul(&mats[i]);
                let diff = ab.scale(Complex64::from(-1.0));
                let comm = C2::new(ba.a + diff.a, ba.b + diff.b, ba.c + diff.c, ba.d + diff.d);
                if comm.max_abs() <= 1e-9 * ab.max_abs() {
                    warnings.push(format!(
                        "generators {} and {} commute: the group is not free (degenerate Schottky data)",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        let kappa = certificate.ok.then_some(certificate.mu);
        mobius = mobius.with_comparison(kappa);
        let linear = linear.map(|l| {
            let k = kappa.map(|mu| l.comparison_from_gap_slope(mu));
            l.with_comparison(k)
        });
        Ok(SchottkyGroup {
            mobius,
            linear,
            certificate,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{stable_length_bracket, StableConfig};

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&f2(), s).unwrap()
    }

    #[test]
    fn tree_examples() {
        let t = TreeModel::unit(f2());
        assert_eq!(t.displacement(&w("aBa")).unwrap(), 3.0);
        let t2 = TreeModel::new(f2(), vec![1.0, 2.0]).unwrap();
        assert_eq!(t2.displacement(&w("ab")).unwrap(), 3.0);
        assert_eq!(t.stable_length_by_products(&w("abA")), 1.0);
        assert_eq!(t2.exact_stable_length(&w("ab")).unwrap(), Some(3.0));
        assert!(TreeModel::new(f2(), vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn tree_bracket_example() {
        let t = TreeModel::unit(f2());
        let b = stable_length_bracket(&t, &w("abA"), 4, 4.0).unwrap();
        assert_eq!((b.lo, b.hi), (1.0, 1.25));
    }

    #[test]
    fn mobius_examples() {
        let m = MobiusModel::new(2, vec![C2::real(2.0, 0.0, 0.0, 0.5), C2::real(2.0, 1.0, 1.0, 1.0)], None).unwrap();
        let d = m.displacement(&w("a")).unwrap();
        assert!((d - 4f64.ln()).abs() < 1e-12);
        assert!((m.orbit_distance_h2(&w("a")).unwrap() - d).abs() < 1e-12);
        assert_eq!(m.displacement(&Word::identity()).unwrap(), 0.0);
        let tr3 = m.exact_stable_length(&w("b")).unwrap().unwrap();
        assert!((tr3 - 2.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
        assert!((tr3 - 2.0 * (1.5f64).acosh()).abs() < 1e-12);
        assert!(MobiusModel::new(2, vec![C2::real(-1.0, 0.0, 0.0, 1.0)], None).is_err());
    }

    #[test]
    fn rotation_is_elliptic() {
        let (s, c) = 0.4f64.sin_cos();
        let m = MobiusModel::new(2, vec![C2::real(c, -s, s, c)], None).unwrap();
        let z = Word::parse(&Alphabet::new(1).unwrap(), "a").unwrap();
        assert!(m.displacement(&z).unwrap() < 1e-12);
        assert_eq!(m.exact_stable_length(&z).unwrap(), Some(0.0));
    }

    #[test]
    fn linear_examples() {
        let l = LinearRepModel::new(vec![DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25])]).unwrap();
        let z = Word::parse(&Alphabet::new(1).unwrap(), "a").unwrap();
        assert!((l.displacement(&z).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert_eq!(l.displacement(&Word::identity()).unwrap(), 0.0);
    }

    #[test]
    fn schottky_certificate() {
        let g = SchottkyBuilder::new(vec![4.0, 4.0], vec![0.0, 1.2]).build().unwrap();
        assert!(g.certificate.ok && g.certificate.mu > 0.0);
        assert!(g.warnings.is_empty());
        for m in g.mobius.generators() {
            assert!(m.trace().norm() > 2.0);
        }
        let degenerate = SchottkyBuilder::new(vec![4.0, 4.0], vec![0.0, 0.0]).build().unwrap();
        assert!(!degenerate.warnings.is_empty());
        assert!(SchottkyBuilder::new(vec![1.0], vec![0.0]).build().is_err());
    }

    #[test]
    fn certificate_fails_for_rotations() {
        let (s, c) = 0.4f64.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let l = LinearRepModel::new(vec![rot.clone(), rot]).unwrap();
        assert!(!anosov_certificate(&l, 4).unwrap().ok);
        let id = LinearRepModel::new(vec![DMatrix::identity(2, 2); 2]).unwrap();
        assert!(!anosov_certificate(&id, 3).unwrap().ok);
    }

    #[test]
    fn word_metric_matches_tree_for_standard_set() {
        let wm = WordMetricModel::new(GeneratingSet::standard(f2()), SearchLimits::default()).unwrap();
        let t = TreeModel::unit(f2());
        for g in f2().ball(4, usize::MAX).unwrap() {
            assert_eq!(wm.displacement(&g).unwrap(), t.displacement(&g).unwrap());
        }
        let bad = GeneratingSet::new(f2(), vec![(w("a"), 1.0), (w("b"), 1.0)]).unwrap();
        assert!(WordMetricModel::new(bad, SearchLimits::default()).is_err());
        let _ = StableConfig::default();
    }
}
