//! Small matrix helpers: complex 2×2 matrices with closed-form invariants and
//! real square matrices carried with a separate log scale so long products
//! never overflow.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A complex 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct C2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl C2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> C2 {
        C2 { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> C2 {
        C2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> C2 {
        C2::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn mul(&self, o: &C2) -> C2 {
        C2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn frob2(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    pub fn scale(&self, f: Complex64) -> C2 {
        C2 {
            a: self.a * f,
            b: self.b * f,
            c: self.c * f,
            d: self.d * f,
        }
    }

    /// Adjugate; equals the inverse when `det = 1`.
    pub fn adjugate(&self) -> C2 {
        C2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    pub fn is_real(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.is_finite())
    }

    /// Divides by a square root of the determinant, so the result has `det = 1`.
    pub fn normalize(&self) -> Result<C2> {
        let det = self.det();
        if !self.is_finite() || det.norm() == 0.0 || !det.is_finite() {
            return Err(Error::input("matrix is singular or not finite"));
        }
        Ok(self.scale(det.sqrt().inv()))
    }

    /// Applies the Möbius map `z ↦ (az + b)/(cz + d)`.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }
}

/// `m · e^{log_scale}` with `m` kept at unit max-entry.
#[derive(Clone, Copy, Debug)]
pub struct ScaledC2 {
    pub m: C2,
    pub log_scale: f64,
}

impl ScaledC2 {
    pub fn identity() -> ScaledC2 {
        ScaledC2 {
            m: C2::identity(),
            log_scale: 0.0,
        }
    }

    pub fn from(m: C2) -> ScaledC2 {
        ScaledC2 { m, log_scale: 0.0 }.renormalized()
    }

    fn renormalized(mut self) -> ScaledC2 {
        let r = self.m.max_abs();
        if r > 0.0 && r.is_finite() {
            self.m = self.m.scale(Complex64::from(1.0 / r));
            self.log_scale += r.ln();
        }
        self
    }

    pub fn mul(&self, o: &C2) -> ScaledC2 {
        ScaledC2 {
            m: self.m.mul(o),
            log_scale: self.log_scale,
        }
        .renormalized()
    }

    pub fn mul_scaled(&self, o: &ScaledC2) -> ScaledC2 {
        ScaledC2 {
            m: self.m.mul(&o.m),
            log_scale: self.log_scale + o.log_scale,
        }
        .renormalized()
    }

    /// Hyperbolic displacement of the basepoint, assuming the represented matrix
    /// has determinant 1: `arccosh(‖A‖²_F / 2)`.
    pub fn hyperbolic_displacement(&self) -> Result<f64> {
        let log_f2 = self.m.frob2().ln() + 2.0 * self.log_scale;
        if !log_f2.is_finite() {
            return Err(Error::numeric("Frobenius norm is not finite"));
        }
        if log_f2 < 40.0 {
            // ‖A‖² − 2 = |a − d̄|² + |b + c̄|² avoids cancellation near the identity
            let a = self.m.scale(Complex64::from(self.log_scale.exp()));
            let excess = (a.a - a.d.conj()).norm_sqr() + (a.b + a.c.conj()).norm_sqr();
            Ok(2.0 * (0.5 * excess.sqrt()).asinh())
        } else {
            // arccosh(y) = ln y + ln(1 + sqrt(1 − y⁻²)), y = ‖A‖²/2
            let log_y = log_f2 - std::f64::consts::LN_2;
            let inv_y2 = (-2.0 * log_y).exp();
            Ok(log_y + (1.0 + (1.0 - inv_y2).sqrt()).ln())
        }
    }

    /// `ln` of the larger eigenvalue modulus of the represented matrix.
    pub fn log_spectral_radius(&self) -> Result<f64> {
        let t = self.m.trace();
        let det = self.m.det();
        let disc = (t * t - det * 4.0).sqrt();
        let r1 = t + disc;
        let r2 = t - disc;
        let big = if r1.norm() >= r2.norm() { r1 } else { r2 };
        let modulus = big.norm() / 2.0;
        if modulus == 0.0 {
            // nilpotent scaled part; only possible for singular input
            return Err(Error::numeric("zero spectral radius"));
        }
        let v = modulus.ln() + self.log_scale;
        if !v.is_finite() {
            return Err(Error::numeric("spectral radius is not finite"));
        }
        Ok(v)
    }

    /// `ln σ₁` of the represented matrix.
    pub fn log_sigma1(&self) -> Result<f64> {
        let f = self.m.frob2();
        let det = self.m.det().norm();
        let s2 = (f + ((f - 2.0 * det).max(0.0) * (f + 2.0 * det)).sqrt()) / 2.0;
        let v = 0.5 * s2.ln() + self.log_scale;
        if !v.is_finite() {
            return Err(Error::numeric("singular value is not finite"));
        }
        Ok(v)
    }

    /// `ln(σ₁/σ₂)` of the represented matrix.
    pub fn log_sigma_gap(&self) -> Result<f64> {
        let f = self.m.frob2();
        let det = self.m.det().norm();
        let s1sq = (f + ((f - 2.0 * det).max(0.0) * (f + 2.0 * det)).sqrt()) / 2.0;
        // σ₁σ₂ = |det|, so σ₁/σ₂ = σ₁²/|det|
        if det == 0.0 {
            return Err(Error::numeric("singular product in gap computation"));
        }
        let v = s1sq.ln() - det.ln();
        if !v.is_finite() {
            return Err(Error::numeric("singular value gap is not finite"));
        }
        Ok(v.max(0.0))
    }
}

/// Real square matrix `m · e^{log_scale}` with `m` at unit max-entry.
#[derive(Clone, Debug)]
pub struct ScaledMat {
    pub m: DMatrix<f64>,
    pub log_scale: f64,
}

impl ScaledMat {
    pub fn identity(dim: usize) -> ScaledMat {
        ScaledMat {
            m: DMatrix::identity(dim, dim),
            log_scale: 0.0,
        }
    }

    pub fn from(m: DMatrix<f64>) -> ScaledMat {
        ScaledMat { m, log_scale: 0.0 }.renormalized()
    }

    fn renormalized(mut self) -> ScaledMat {
        let r = self.m.amax();
        if r > 0.0 && r.is_finite() {
            self.m /= r;
            self.log_scale += r.ln();
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn mul(&self, o: &DMatrix<f64>) -> ScaledMat {
        ScaledMat {
            m: &self.m * o,
            log_scale: self.log_scale,
        }
        .renormalized()
    }

    pub fn mul_scaled(&self, o: &ScaledMat) -> ScaledMat {
        ScaledMat {
            m: &self.m * &o.m,
            log_scale: self.log_scale + o.log_scale,
        }
        .renormalized()
    }

    fn check(&self, v: f64, what: &str) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numeric(format!("{what} is not finite")))
        }
    }

    fn sigma_2x2(&self) -> (f64, f64) {
        let m = &self.m;
        let f = m.norm_squared();
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).abs();
        let s1sq = (f + ((f - 2.0 * det).max(0.0) * (f + 2.0 * det)).sqrt()) / 2.0;
        (s1sq, det)
    }

    /// Singular values of the scaled part, descending.
    fn singular_values(&self) -> Result<Vec<f64>> {
        if !self.m.iter().all(|x| x.is_finite()) {
            return Err(Error::numeric("matrix has non-finite entries"));
        }
        Ok(self.m.singular_values().iter().copied().collect())
    }

    pub fn log_sigma1(&self) -> Result<f64> {
        if self.dim() == 2 {
            let (s1sq, _) = self.sigma_2x2();
            return self.check(0.5 * s1sq.ln() + self.log_scale, "log σ₁");
        }
        let s = self.singular_values()?;
        self.check(s[0].ln() + self.log_scale, "log σ₁")
    }

    /// `ln(σ₁/σ₂)`.
    pub fn log_sigma_gap(&self) -> Result<f64> {
        if self.dim() == 1 {
            return Ok(0.0);
        }
        if self.dim() == 2 {
            let (s1sq, det) = self.sigma_2x2();
            if det == 0.0 {
                return Err(Error::numeric("singular product in gap computation"));
            }
            return self.check((s1sq.ln() - det.ln()).max(0.0), "singular value gap");
        }
        let s = self.singular_values()?;
        if s[1] == 0.0 {
            return Err(Error::numeric("singular product in gap computation"));
        }
        self.check((s[0] / s[1]).ln().max(0.0), "singular value gap")
    }

    /// `ln λ₁`, the log spectral radius.
    pub fn log_spectral_radius(&self) -> Result<f64> {
        let m = &self.m;
        let r = if self.dim() == 1 {
            m[(0, 0)].abs()
        } else if self.dim() == 2 {
            let t = m[(0, 0)] + m[(1, 1)];
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let disc = t * t - 4.0 * det;
            if disc >= 0.0 {
                (t.abs() + disc.sqrt()) / 2.0
            } else {
                det.sqrt()
            }
        } else {
            if !m.iter().all(|x| x.is_finite()) {
                return Err(Error::numeric("matrix has non-finite entries"));
            }
            m.complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        };
        if r == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        self.check(r.ln() + self.log_scale, "log spectral radius")
    }
}

/// Divides a real square matrix by `|det|^{1/m}`.
pub fn normalize_det(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::input("matrix must be square and non-empty"));
    }
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::input("matrix has non-finite entries"));
    }
    let det = m.determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::input("matrix is singular"));
    }
    Ok(m / det.abs().powf(1.0 / m.nrows() as f64))
}

/// A `dim × dim` matrix with independent standard Gaussian entries, scaled to
/// determinant 1 (the first row is negated when the determinant is negative).
pub fn random_unit_det<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    loop {
        let mut m = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        if m.determinant().abs() < 1e-6 {
            continue;
        }
        if m.determinant() < 0.0 {
            m.row_mut(0).neg_mut();
        }
        return normalize_det(&m);
    }
}

/// Inverse of a real square matrix.
pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::input("matrix is not invertible"))
}
