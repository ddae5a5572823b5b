//! The Hilbert modular group `Γ = SL_2(O_F ⊕ 𝔡⁻¹)` acting on `ℍ²`, Hecke orbits, and the
//! geometry of Hirzebruch–Zagier components near a point.
//!
//! Conventions: a component `M = (a, γ; γ', b)` vanishes at `z` when
//! `a z1 z2 + σ1(γ) z1 + σ2(γ) z2 + b = 0`, and a matrix acts on `z_i` through `σ_i`.
//! With these conventions `φ_{UᵗMU'}(z) = j1(U, z) j2(U, z) φ_M(Uz)`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::arith::{factor, gcd, hermite_rows, is_prime};
use crate::hzdiv::{iter_components, ComponentMatrix, HzError, PolarizationModulus};
use crate::numberfield::{FieldElement, QuadraticField};
use crate::qform::BinaryQF;

pub const DEFAULT_EPS: f64 = 1e-10;
pub const DEFAULT_MAX_MOVES: usize = 10_000;
/// A move must shrink `|N(cz + d)|` below `1 - REDUCE_TOL` to count as an improvement.
const REDUCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeckeError {
    #[error("point is not in the upper half plane: {0} / {1}")]
    OffHalfPlane(Complex64, Complex64),
    #[error("matrix does not preserve orientation in embedding {0}")]
    NotOrientationPreserving(usize),
    #[error("vanishing denominator |cz+d| = {0:e} in embedding {1}")]
    VanishingDenominator(f64, usize),
    #[error("reduction did not converge within {0} moves")]
    NonConvergence(usize),
    #[error("invalid Hecke parameter: {0}")]
    BadHeckeParameter(String),
    #[error("result is not integral")]
    NotIntegral,
    #[error(transparent)]
    Lattice(#[from] HzError),
    #[error("leading coefficient of the CM quadratic vanishes")]
    Degenerate,
    #[error("CM quadratic has real roots")]
    RealRoots,
    #[error("second coordinate of the CM point is not in the upper half plane")]
    SecondCoordinateOffHalfPlane,
    #[error("near-misses must come from distinct primes")]
    SamePrime,
    #[error("invalid near-miss: {0}")]
    InvalidNearMiss(String),
    #[error("relation lattice has rank {0} < 2; point is not special")]
    NotSpecial(usize),
    #[error("relation lattice has rank {0} > 2; tolerance too loose")]
    Tolerance(usize),
    #[error("restricted determinant form {0} is not positive definite")]
    NotPositiveDefinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointH2 {
    pub z1: Complex64,
    pub z2: Complex64,
    pub eps: f64,
}

impl PointH2 {
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self, HeckeError> {
        if !(z1.im > 0.0 && z2.im > 0.0) {
            return Err(HeckeError::OffHalfPlane(z1, z2));
        }
        Ok(PointH2 { z1, z2, eps: DEFAULT_EPS })
    }

    pub fn from_parts(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, HeckeError> {
        Self::new(Complex64::new(x1, y1), Complex64::new(x2, y2))
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn coord(&self, i: usize) -> Complex64 {
        if i == 0 { self.z1 } else { self.z2 }
    }

    /// `Im z1 · Im z2`.
    pub fn height(&self) -> f64 {
        self.z1.im * self.z2.im
    }

    pub fn distance(&self, other: &PointH2) -> f64 {
        (self.z1 - other.z1).norm().max((self.z2 - other.z2).norm())
    }
}

impl fmt::Display for PointH2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}{:+.6}i, {:.6}{:+.6}i)", self.z1.re, self.z1.im, self.z2.re, self.z2.im)
    }
}

/// A 2x2 matrix over `F`, stored as `O_F` numerators over a common positive integer denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixGL2F {
    num: [FieldElement; 4],
    den: i128,
}

impl MatrixGL2F {
    pub fn new(u11: FieldElement, u12: FieldElement, u21: FieldElement, u22: FieldElement) -> Self {
        MatrixGL2F { num: [u11, u12, u21, u22], den: 1 }
    }

    /// `entries / den`, brought to lowest terms.
    pub fn with_denominator(entries: [FieldElement; 4], den: i128) -> Self {
        assert!(den != 0);
        let (entries, den) = if den < 0 { (entries.map(|e| -e), -den) } else { (entries, den) };
        let mut m = MatrixGL2F { num: entries, den };
        m.normalize();
        m
    }

    pub fn identity(disc: i128) -> Self {
        let (o, z) = (FieldElement::one(disc), FieldElement::zero(disc));
        Self::new(o, z, z, o)
    }

    pub fn disc(&self) -> i128 {
        self.num[0].disc()
    }

    pub fn numerators(&self) -> [FieldElement; 4] {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    fn normalize(&mut self) {
        let mut g = self.den;
        for e in &self.num {
            let (x, y) = e.coords();
            g = gcd(gcd(g, x), y);
        }
        if g <= 1 {
            return;
        }
        for (q, _) in factor(g as u128) {
            let q = q as i128;
            while self.den % q == 0 {
                let divided: Option<Vec<FieldElement>> = self.num.iter().map(|e| e.div_int(q)).collect();
                match divided {
                    Some(v) => {
                        self.num = [v[0], v[1], v[2], v[3]];
                        self.den /= q;
                    }
                    None => break,
                }
            }
        }
    }

    /// `(1, β; 0, 1)` with `β = w / sqrt(D) ∈ 𝔡⁻¹`.
    pub fn translation_codifferent(field: &QuadraticField, w: FieldElement) -> Self {
        let (o, z) = (field.integer(1), field.integer(0));
        Self::with_denominator([o.scale(field.discriminant()), w * field.sqrt_disc(), z, o.scale(field.discriminant())], field.discriminant())
    }

    /// `(1, t; 0, 1)` for `t ∈ O_F`.
    pub fn translation(t: FieldElement) -> Self {
        let d = t.disc();
        Self::new(FieldElement::one(d), t, FieldElement::zero(d), FieldElement::one(d))
    }

    /// `(1, 0; sqrt(D)·w, 1)`.
    pub fn lower(field: &QuadraticField, w: FieldElement) -> Self {
        let (o, z) = (field.integer(1), field.integer(0));
        Self::new(o, z, w * field.sqrt_disc(), o)
    }

    /// `diag(ε^k, ε^{-k})` for the fundamental unit `ε`.
    pub fn unit_diagonal(field: &QuadraticField, k: i32) -> Self {
        let eps = field.fundamental_unit();
        let inv = eps.conjugate().scale(eps.norm());
        let (fwd, back) = if k >= 0 { (eps, inv) } else { (inv, eps) };
        let n = k.unsigned_abs();
        let z = field.integer(0);
        Self::new(fwd.pow(n), z, z, back.pow(n))
    }

    /// `(0, -1/sqrt D; sqrt D, 0)`, acting as `z_i ↦ -1/(D z_i)`.
    pub fn involution(field: &QuadraticField) -> Self {
        let d = field.discriminant();
        let s = field.sqrt_disc();
        let z = field.integer(0);
        Self::with_denominator([z, -s, s.scale(d), z], d)
    }

    pub fn mul(&self, other: &MatrixGL2F) -> MatrixGL2F {
        let [a, b, c, d] = self.num;
        let [e, f, g, h] = other.num;
        Self::with_denominator([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], self.den * other.den)
    }

    /// `(d, -b; -c, a)`, equal to `det · U⁻¹`.
    pub fn adjugate(&self) -> MatrixGL2F {
        let [a, b, c, d] = self.num;
        MatrixGL2F { num: [d, -b, -c, a], den: self.den }
    }

    pub fn det(&self) -> Result<FieldElement, HeckeError> {
        let [a, b, c, d] = self.num;
        (a * d - b * c).div_int(self.den * self.den).ok_or(HeckeError::NotIntegral)
    }

    /// Entries of `σ_i(U)` as reals, row-major.
    pub fn embed(&self, i: usize) -> [f64; 4] {
        let den = self.den as f64;
        self.num.map(|e| e.embed(i) / den)
    }

    /// Membership in `Γ`: diagonal in `O_F`, upper right in `𝔡⁻¹`, lower left in `𝔡`, det 1.
    pub fn is_in_gamma(&self, field: &QuadraticField) -> bool {
        let s = field.sqrt_disc();
        let [a, b, c, d] = self.num;
        let den = self.den;
        let integral = |e: FieldElement| e.div_int(den);
        integral(a).is_some()
            && integral(d).is_some()
            && integral(b * s).is_some()
            && integral(c).and_then(|c| c.div_exact(&s)).is_some()
            && self.det().map(|x| x == field.integer(1)).unwrap_or(false)
    }

    /// `(σ_i(c) z_i + σ_i(d))` for both embeddings.
    pub fn automorphy_factor(&self, z: &PointH2) -> (Complex64, Complex64) {
        let j = |i: usize| {
            let m = self.embed(i);
            z.coord(i) * m[2] + m[3]
        };
        (j(0), j(1))
    }
}

impl fmt::Display for MatrixGL2F {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.num;
        if self.den == 1 {
            write!(f, "({a}, {b}; {c}, {d})")
        } else {
            write!(f, "({a}, {b}; {c}, {d})/{}", self.den)
        }
    }
}

pub fn moebius_act(g: &MatrixGL2F, z: &PointH2) -> Result<PointH2, HeckeError> {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (i, slot) in out.iter_mut().enumerate() {
        let [a, b, c, d] = g.embed(i);
        if a * d - b * c <= 0.0 {
            return Err(HeckeError::NotOrientationPreserving(i));
        }
        let zi = z.coord(i);
        let denom = zi * c + d;
        if denom.norm() < z.eps {
            return Err(HeckeError::VanishingDenominator(denom.norm(), i));
        }
        *slot = (zi * a + b) / denom;
    }
    let mut w = PointH2::new(out[0], out[1])?;
    w.eps = z.eps;
    Ok(w)
}

/// All elements of `O_F` whose embeddings lie in `[lo1, hi1] × [lo2, hi2]`.
fn integers_in_box(field: &QuadraticField, lo: (f64, f64), hi: (f64, f64)) -> Vec<FieldElement> {
    let sd = (field.discriminant() as f64).sqrt();
    let (xlo, xhi) = ((lo.0 + lo.1).floor() as i128 - 1, (hi.0 + hi.1).ceil() as i128 + 1);
    let (ylo, yhi) = (((lo.0 - hi.1) / sd).floor() as i128 - 1, ((hi.0 - lo.1) / sd).ceil() as i128 + 1);
    let mut out = Vec::new();
    for x in xlo..=xhi {
        for y in ylo..=yhi {
            if let Ok(e) = field.element(x, y) {
                let (e1, e2) = e.embeddings();
                if e1 >= lo.0 && e1 <= hi.0 && e2 >= lo.1 && e2 <= hi.1 {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// The group `Γ` attached to a real quadratic field, with the data needed for reduction.
#[derive(Debug, Clone)]
pub struct ModularGroup {
    field: QuadraticField,
    /// `|σ1(ε)| > 1`.
    unit_size: f64,
    max_moves: usize,
}

impl ModularGroup {
    pub fn new(field: QuadraticField) -> Self {
        let e = field.fundamental_unit().embed(0).abs();
        let unit_size = if e > 1.0 { e } else { 1.0 / e };
        ModularGroup { field, unit_size, max_moves: DEFAULT_MAX_MOVES }
    }

    pub fn with_max_moves(mut self, n: usize) -> Self {
        self.max_moves = n;
        self
    }

    pub fn field(&self) -> &QuadraticField {
        &self.field
    }

    /// Move `z` into the standard box for the stabilizer of the cusp: `log(y1/y2)` into
    /// `[-2 log u, 2 log u)` by unit scalings, then real parts into the half-open unit cell of `𝔡⁻¹`.
    fn normalize_at_cusp(&self, z: PointH2) -> Result<(PointH2, MatrixGL2F), HeckeError> {
        let f = &self.field;
        let d = f.discriminant();
        let mut g = MatrixGL2F::identity(d);
        let mut w = z;
        let lu = self.unit_size.ln();
        let t = (w.z1.im / w.z2.im).ln();
        let mut k = -((t + 2.0 * lu) / (4.0 * lu)).floor() as i32;
        // orientation: diag(ε^k, ε^-k) multiplies y1/y2 by σ1(ε)^{4k}
        if f.fundamental_unit().embed(0).abs() < 1.0 {
            k = -k;
        }
        if k != 0 {
            let s = MatrixGL2F::unit_diagonal(f, k);
            w = moebius_act(&s, &w)?;
            g = s.mul(&g);
        }
        // 𝔡⁻¹ basis: 1/sqrt D and omega/sqrt D
        let sd = (d as f64).sqrt();
        let (b1, b2) = ((1.0 / sd, -1.0 / sd), ((sd + 1.0) / 2.0, (1.0 - sd) / 2.0));
        let det = b1.0 * b2.1 - b2.0 * b1.1;
        let alpha = (w.z1.re * b2.1 - b2.0 * w.z2.re) / det;
        let beta = (b1.0 * w.z2.re - w.z1.re * b1.1) / det;
        let (k1, k2) = ((alpha + 0.5).floor() as i128, (beta + 0.5).floor() as i128);
        if k1 != 0 || k2 != 0 {
            let t = MatrixGL2F::translation_codifferent(f, -f.from_basis(k1, k2));
            w = moebius_act(&t, &w)?;
            g = t.mul(&g);
        }
        Ok((w, g))
    }

    /// Complete a coprime bottom row `(sqrt(D)·e, d)` to an element of `Γ`.
    fn complete_row(&self, e: FieldElement, d: FieldElement) -> Option<MatrixGL2F> {
        let f = &self.field;
        let n = e.norm().abs();
        let one = f.integer(1);
        for s in 0..n {
            for t in 0..n {
                let a = f.from_basis(s, t);
                if let Some(bt) = (a * d - one).div_exact(&e) {
                    let disc = f.discriminant();
                    let sqrt_d = f.sqrt_disc();
                    return Some(MatrixGL2F::with_denominator(
                        [a.scale(disc), bt * sqrt_d, (e * sqrt_d).scale(disc), d.scale(disc)],
                        disc,
                    ));
                }
            }
        }
        None
    }

    /// The element of `Γ` with nonzero lower-left entry minimizing `|N(cz+d)|`, if that norm is below 1.
    fn best_inversion(&self, z: &PointH2) -> Option<MatrixGL2F> {
        let f = &self.field;
        let sd = (f.discriminant() as f64).sqrt();
        let r = self.unit_size.sqrt();
        let (x1, y1, x2, y2) = (z.z1.re, z.z1.im, z.z2.re, z.z2.im);
        let eb = (r / (y1 * sd), r / (y2 * sd));
        let mut candidates = Vec::new();
        for e in integers_in_box(f, (-eb.0, -eb.1), eb) {
            if e.is_zero() {
                continue;
            }
            let c = e * f.sqrt_disc();
            let (c1, c2) = c.embeddings();
            let lo = (-r - c1 * x1, -r - c2 * x2);
            let hi = (r - c1 * x1, r - c2 * x2);
            for d in integers_in_box(f, lo, hi) {
                let (d1, d2) = d.embeddings();
                let n = (z.z1 * c1 + d1).norm() * (z.z2 * c2 + d2).norm();
                if n < 1.0 - REDUCE_TOL {
                    candidates.push((n, e, d));
                }
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        candidates.into_iter().find_map(|(_, e, d)| self.complete_row(e, d))
    }

    /// Reduce `z` to the approximate fundamental domain: maximize `y1 y2` over `Γ`, then
    /// normalize with the stabilizer of the cusp. Returns the reduced point and `g` with `g z = z*`.
    pub fn reduce_fundamental(&self, z: &PointH2) -> Result<(PointH2, MatrixGL2F), HeckeError> {
        let (mut w, mut g) = self.normalize_at_cusp(*z)?;
        let mut moves = 0;
        while let Some(step) = self.best_inversion(&w) {
            moves += 1;
            if moves > self.max_moves {
                return Err(HeckeError::NonConvergence(self.max_moves));
            }
            w = moebius_act(&step, &w)?;
            g = step.mul(&g);
            let (w2, s) = self.normalize_at_cusp(w)?;
            w = w2;
            g = s.mul(&g);
        }
        Ok((w, g))
    }

    fn check_hecke_parameter(&self, p: u64, lambda: &FieldElement) -> Result<(), HeckeError> {
        if !is_prime(p) {
            return Err(HeckeError::BadHeckeParameter(format!("{p} is not prime")));
        }
        if lambda.disc() != self.field.discriminant() {
            return Err(HeckeError::BadHeckeParameter("lambda lies in another field".into()));
        }
        if lambda.norm() != p as i128 || !lambda.is_totally_positive() {
            return Err(HeckeError::BadHeckeParameter(format!("{lambda} is not a totally positive element of norm {p}")));
        }
        if self.field.discriminant() % p as i128 == 0 {
            return Err(HeckeError::BadHeckeParameter(format!("{p} divides the discriminant")));
        }
        Ok(())
    }

    /// Coset representatives `(1, j; 0, λ)` for `j = 0..p-1`, then `(λ, 0; 0, 1)`.
    pub fn hecke_representatives(&self, p: u64, lambda: &FieldElement) -> Result<Vec<MatrixGL2F>, HeckeError> {
        self.check_hecke_parameter(p, lambda)?;
        let f = &self.field;
        let (o, z) = (f.integer(1), f.integer(0));
        let mut reps: Vec<MatrixGL2F> = (0..p as i128).map(|j| MatrixGL2F::new(o, f.integer(j), z, *lambda)).collect();
        reps.push(MatrixGL2F::new(*lambda, z, z, o));
        Ok(reps)
    }

    /// Reduced images of `z` under the `p + 1` Hecke representatives, with the total matrices `g·R`.
    pub fn hecke_orbit_with_matrices(
        &self,
        z: &PointH2,
        p: u64,
        lambda: &FieldElement,
    ) -> Result<Vec<(PointH2, MatrixGL2F)>, HeckeError> {
        self.hecke_representatives(p, lambda)?
            .into_iter()
            .map(|rep| {
                let w = moebius_act(&rep, z)?;
                let (w, g) = self.reduce_fundamental(&w)?;
                Ok((w, g.mul(&rep)))
            })
            .collect()
    }

    pub fn hecke_orbit(&self, z: &PointH2, p: u64, lambda: &FieldElement) -> Result<Vec<PointH2>, HeckeError> {
        Ok(self.hecke_orbit_with_matrices(z, p, lambda)?.into_iter().map(|(w, _)| w).collect())
    }

    /// A random element of `Γ` built from `steps` random generators.
    pub fn random_element<R: Rng>(&self, rng: &mut R, steps: usize) -> MatrixGL2F {
        let f = &self.field;
        let mut g = MatrixGL2F::identity(f.discriminant());
        for _ in 0..steps {
            let w = f.from_basis(rng.gen_range(-2..=2), rng.gen_range(-1..=1));
            let gen = match rng.gen_range(0..4) {
                0 => MatrixGL2F::translation_codifferent(f, w),
                1 => MatrixGL2F::lower(f, f.from_basis(rng.gen_range(-1..=1), 0)),
                2 => MatrixGL2F::unit_diagonal(f, rng.gen_range(-1..=1)),
                _ => MatrixGL2F::involution(f),
            };
            g = gen.mul(&g);
        }
        g
    }
}

/// `|a z1 z2 + σ1(γ) z1 + σ2(γ) z2 + b|`.
pub fn proximity(z: &PointH2, m: &ComponentMatrix) -> f64 {
    let (g1, g2) = m.gamma().embeddings();
    (z.z1 * z.z2 * m.a() as f64 + z.z1 * g1 + z.z2 * g2 + m.b() as f64).norm()
}

/// `Uᵗ M U'` (entrywise conjugate on the right), computed exactly.
pub fn transport(u: &MatrixGL2F, m: &ComponentMatrix) -> Result<ComponentMatrix, HeckeError> {
    let disc = m.disc();
    let [p, q, r, s] = u.numerators();
    let a = FieldElement::integer(m.a(), disc);
    let b = FieldElement::integer(m.b(), disc);
    let g = m.gamma();
    let gc = g.conjugate();
    // Uᵗ M = (p, r; q, s)(a, γ; γ', b)
    let t11 = p * a + r * gc;
    let t12 = p * g + r * b;
    let t21 = q * a + s * gc;
    let t22 = q * g + s * b;
    // (Uᵗ M) U', U' = (p', q'; r', s')
    let (pc, qc, rc, sc) = (p.conjugate(), q.conjugate(), r.conjugate(), s.conjugate());
    let den2 = u.denominator() * u.denominator();
    let n11 = (t11 * pc + t12 * rc).div_int(den2).ok_or(HeckeError::NotIntegral)?;
    let n12 = (t11 * qc + t12 * sc).div_int(den2).ok_or(HeckeError::NotIntegral)?;
    let n22 = (t21 * qc + t22 * sc).div_int(den2).ok_or(HeckeError::NotIntegral)?;
    let (Some(na), Some(nb)) = (n11.as_integer(), n22.as_integer()) else {
        return Err(HeckeError::NotIntegral);
    };
    Ok(ComponentMatrix::new(na, nb, n12, m.modulus())?)
}

/// A lattice vector `(m, η; η', l)` with `m l − Nm η = p r Nm 𝔞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NearMiss {
    pub m: i128,
    pub l: i128,
    pub eta: FieldElement,
    pub p: u64,
    pub r: i128,
    pub modulus: PolarizationModulus,
}

impl NearMiss {
    pub fn new(m: i128, l: i128, eta: FieldElement, p: u64, r: i128, modulus: PolarizationModulus) -> Result<Self, HeckeError> {
        if !is_prime(p) {
            return Err(HeckeError::InvalidNearMiss(format!("{p} is not prime")));
        }
        if r < 1 {
            return Err(HeckeError::InvalidNearMiss("r must be positive".into()));
        }
        if m % (eta.disc() * modulus.norm_a) != 0 {
            return Err(HeckeError::InvalidNearMiss(format!("m = {m} not divisible by D·Nm(a)")));
        }
        if m * l - eta.norm() != p as i128 * r * modulus.norm_a {
            return Err(HeckeError::InvalidNearMiss(format!("m l - Nm(eta) = {} != p r Nm(a)", m * l - eta.norm())));
        }
        Ok(NearMiss { m, l, eta, p, r, modulus })
    }

    pub fn from_component(c: &ComponentMatrix, p: u64, r: i128) -> Result<Self, HeckeError> {
        Self::new(c.a(), c.b(), c.gamma(), p, r, c.modulus())
    }

    pub fn component(&self) -> ComponentMatrix {
        ComponentMatrix::new(self.m, self.l, self.eta, self.modulus).expect("validated on construction")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CmPoint {
    pub point: PointH2,
    /// Coefficients `(A, B, C)` of `A z^2 + B z + C`, read through the first embedding.
    pub coefficients: [FieldElement; 3],
}

/// The common zero of two near-miss components.
pub fn cm_point(n1: &NearMiss, n2: &NearMiss) -> Result<CmPoint, HeckeError> {
    if n1.p == n2.p {
        return Err(HeckeError::SamePrime);
    }
    let disc = n1.eta.disc();
    let (e1, e2) = (n1.eta, n2.eta);
    let int = |k: i128| FieldElement::integer(k, disc);
    let qa = e1.scale(n2.m) - e2.scale(n1.m);
    let qb = e1 * e2.conjugate() - e2 * e1.conjugate() + int(n1.l * n2.m - n2.l * n1.m);
    let qc = e2.conjugate().scale(n1.l) - e1.conjugate().scale(n2.l);
    if qa.is_zero() {
        return Err(HeckeError::Degenerate);
    }
    let delta = qb * qb - qa * qc.scale(4);
    if delta.embedding_sign(0) != std::cmp::Ordering::Less {
        return Err(HeckeError::RealRoots);
    }
    let (a, b, dl) = (qa.embed(0), qb.embed(0), delta.embed(0));
    let z1 = Complex64::new(-b / (2.0 * a), (-dl).sqrt() / (2.0 * a.abs()));
    let (eta1, eta1c) = e1.embeddings();
    let denom = z1 * n1.m as f64 + eta1c;
    let z2 = -(z1 * eta1 + n1.l as f64) / denom;
    if !(z2.im > 0.0) {
        return Err(HeckeError::SecondCoordinateOffHalfPlane);
    }
    Ok(CmPoint { point: PointH2::new(z1, z2)?, coefficients: [qa, qb, qc] })
}

/// Reduced primitive form of the determinant restricted to the relation lattice at `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialForm {
    pub form: BinaryQF,
    pub content: i64,
    pub basis: [ComponentMatrix; 2],
}

pub fn special_point_form(
    z: &PointH2,
    field: &QuadraticField,
    modulus: PolarizationModulus,
    height: f64,
) -> Result<SpecialForm, HeckeError> {
    let d = field.discriminant();
    let tol = z.eps * (1.0 + height).powi(2);
    let step = (d * modulus.norm_a) as f64;
    let hi = height.floor() as i128;
    let xb = (2.0 * height).floor() as i128;
    let yb = (2.0 * height / (d as f64).sqrt()).floor() as i128;
    let mut rows = Vec::new();
    for x in -xb..=xb {
        for y in -yb..=yb {
            let Ok(g) = field.element(x, y) else { continue };
            let (g1, g2) = g.embeddings();
            if g1.abs() > height || g2.abs() > height {
                continue;
            }
            let amax = (height / step).floor() as i128;
            for ka in -amax..=amax {
                for b in -hi..=hi {
                    let m = ComponentMatrix::new(ka * d * modulus.norm_a, b, g, modulus)?;
                    if proximity(z, &m) < tol {
                        rows.push(m.lattice_coords().to_vec());
                    }
                }
            }
        }
    }
    let basis = hermite_rows(&rows);
    match basis.len() {
        2 => {}
        n if n < 2 => return Err(HeckeError::NotSpecial(n)),
        n => return Err(HeckeError::Tolerance(n)),
    }
    let to_matrix = |v: &Vec<i128>| ComponentMatrix::from_lattice_coords([v[0], v[1], v[2], v[3]], d, modulus);
    let (u, v) = (to_matrix(&basis[0]), to_matrix(&basis[1]));
    let sum = ComponentMatrix::from_lattice_coords(
        [0, 1, 2, 3].map(|i| basis[0][i] + basis[1][i]),
        d,
        modulus,
    );
    let (qa, qc) = (u.det(), v.det());
    let qb = sum.det() - qa - qc;
    let raw = BinaryQF { a: qa as i64, b: qb as i64, c: qc as i64 };
    if raw.a <= 0 || raw.discriminant() >= 0 {
        return Err(HeckeError::NotPositiveDefinite(raw.to_string()));
    }
    let content = raw.content();
    let form = raw.primitive_part().reduce().map_err(|e| HeckeError::NotPositiveDefinite(e.to_string()))?;
    Ok(SpecialForm { form, content, basis: [u, v] })
}

/// Smallest proximity from `z` to a component of `T(r)` of height at most `height`.
pub fn min_proximity_to_divisor(
    z: &PointH2,
    r: i128,
    field: &QuadraticField,
    modulus: PolarizationModulus,
    height: f64,
) -> Option<(f64, ComponentMatrix)> {
    iter_components(r, field, modulus, height)
        .map(|m| (proximity(z, &m), m))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> QuadraticField {
        QuadraticField::from_discriminant(5).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng) -> PointH2 {
        PointH2::from_parts(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.2..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.2..3.0),
        )
        .unwrap()
    }

    #[test]
    fn action_examples() {
        let f = f5();
        let z = PointH2::from_parts(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(moebius_act(&MatrixGL2F::identity(5), &z).unwrap(), z);
        let w = moebius_act(&MatrixGL2F::translation(f.integer(1)), &z).unwrap();
        assert!(w.distance(&PointH2::from_parts(1.0, 1.0, 1.0, 1.0).unwrap()) < 1e-15);
        // J sends z to -1/(D z)
        let j = moebius_act(&MatrixGL2F::involution(&f), &z).unwrap();
        assert!((j.z1 - Complex64::new(0.0, 0.2)).norm() < 1e-14);
    }

    #[test]
    fn action_rejects_orientation_reversal() {
        let f = f5();
        let s = f.sqrt_disc();
        let one = f.integer(1);
        let z0 = f.integer(0);
        let g = MatrixGL2F::new(s, z0, z0, one);
        let z = PointH2::from_parts(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(moebius_act(&g, &z), Err(HeckeError::NotOrientationPreserving(1)));
    }

    #[test]
    fn generators_lie_in_gamma() {
        let f = f5();
        let gens = [
            MatrixGL2F::translation_codifferent(&f, f.integer(1)),
            MatrixGL2F::translation(f.omega()),
            MatrixGL2F::lower(&f, f.omega()),
            MatrixGL2F::unit_diagonal(&f, 1),
            MatrixGL2F::unit_diagonal(&f, -2),
            MatrixGL2F::involution(&f),
        ];
        for g in gens {
            assert!(g.is_in_gamma(&f), "{g}");
            assert!(g.mul(&g.adjugate()) == MatrixGL2F::identity(5));
        }
        let hecke = MatrixGL2F::new(f.integer(1), f.integer(0), f.integer(0), f.element(7, 1).unwrap());
        assert!(!hecke.is_in_gamma(&f));
        assert_eq!(hecke.det().unwrap().norm(), 11);
    }

    #[test]
    fn group_action_law() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let g = grp.random_element(&mut rng, 3);
            let h = grp.random_element(&mut rng, 3);
            let z = random_point(&mut rng);
            let lhs = moebius_act(&g.mul(&h), &z).unwrap();
            let rhs = moebius_act(&g, &moebius_act(&h, &z).unwrap()).unwrap();
            let scale = 1.0 + lhs.z1.norm().max(lhs.z2.norm());
            assert!(lhs.distance(&rhs) < 1e-9 * scale, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn reduction_properties() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let z = random_point(&mut rng);
            let (w, g) = grp.reduce_fundamental(&z).unwrap();
            assert!(g.is_in_gamma(&f));
            assert!(moebius_act(&g, &z).unwrap().distance(&w) < 1e-9);
            assert!(w.height() >= z.height() - z.eps);
            let (w2, g2) = grp.reduce_fundamental(&w).unwrap();
            assert!(w2.distance(&w) < 1e-9);
            assert_eq!(g2, MatrixGL2F::identity(5));
            // no sampled element of Γ raises the height further
            for _ in 0..40 {
                let h = grp.random_element(&mut rng, 4);
                let v = moebius_act(&h, &w).unwrap();
                assert!(v.height() <= w.height() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn reduction_undoes_integer_translation() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (w, _) = grp.reduce_fundamental(&random_point(&mut rng)).unwrap();
            let shifted = moebius_act(&MatrixGL2F::translation(f.integer(3)), &w).unwrap();
            let (back, _) = grp.reduce_fundamental(&shifted).unwrap();
            assert!(back.distance(&w) < 1e-9);
        }
    }

    #[test]
    fn reduction_cap_is_enforced() {
        let f = f5();
        let grp = ModularGroup::new(f).with_max_moves(0);
        let z = PointH2::from_parts(0.1, 0.01, 0.2, 0.02).unwrap();
        assert_eq!(grp.reduce_fundamental(&z).unwrap_err(), HeckeError::NonConvergence(0));
    }

    fn same_multiset(a: &[PointH2], b: &[PointH2], tol: f64) -> bool {
        let mut used = vec![false; b.len()];
        a.len() == b.len()
            && a.iter().all(|p| {
                let hit = (0..b.len()).find(|&i| !used[i] && p.distance(&b[i]) < tol);
                hit.map(|i| used[i] = true).is_some()
            })
    }

    #[test]
    fn hecke_orbit_properties() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let lambda = f.split_generator(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let eps = f.fundamental_unit();
        for _ in 0..10 {
            let z = random_point(&mut rng);
            let orbit = grp.hecke_orbit(&z, 11, &lambda).unwrap();
            assert_eq!(orbit.len(), 12);
            for i in 0..12 {
                for j in 0..i {
                    assert!(orbit[i].distance(&orbit[j]) > 1e-8);
                }
            }
            let g = grp.random_element(&mut rng, 4);
            let moved = grp.hecke_orbit(&moebius_act(&g, &z).unwrap(), 11, &lambda).unwrap();
            assert!(same_multiset(&orbit, &moved, 1e-8));
            let twisted = grp.hecke_orbit(&z, 11, &(lambda * eps * eps)).unwrap();
            assert!(same_multiset(&orbit, &twisted, 1e-8));
        }
        for p in [19u64, 29, 31, 41] {
            let l = f.split_generator(p).unwrap();
            let z = random_point(&mut rng);
            assert_eq!(grp.hecke_orbit(&z, p, &l).unwrap().len(), p as usize + 1);
        }
    }

    #[test]
    fn hecke_parameter_errors() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let z = PointH2::from_parts(0.1, 1.0, 0.2, 1.0).unwrap();
        let bad = [
            (11u64, f.element(7, -1).unwrap().conjugate() * f.integer(-1)),
            (11, f.element(3, 1).unwrap()),
            (5, f.element(5, 1).unwrap()),
            (12, f.element(7, 1).unwrap()),
        ];
        for (p, l) in bad {
            assert!(matches!(grp.hecke_orbit(&z, p, &l), Err(HeckeError::BadHeckeParameter(_))), "{p} {l}");
        }
    }

    fn random_lattice_vector(f: &QuadraticField, rng: &mut ChaCha8Rng) -> ComponentMatrix {
        let c = [rng.gen_range(-3..=3), rng.gen_range(-10..=10), rng.gen_range(-5..=5), rng.gen_range(-5..=5)];
        ComponentMatrix::from_lattice_coords(c, f.discriminant(), PolarizationModulus::default())
    }

    #[test]
    fn proximity_example() {
        let f = f5();
        let m = ComponentMatrix::new(5, 1, f.sqrt_disc(), PolarizationModulus::default()).unwrap();
        let z = PointH2::from_parts(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!((proximity(&z, &m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn transport_laws() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lambda = f.split_generator(11).unwrap();
        let reps = grp.hecke_representatives(11, &lambda).unwrap();
        for i in 0..500 {
            let m = random_lattice_vector(&f, &mut rng);
            let mut u = grp.random_element(&mut rng, 3);
            if i % 2 == 0 {
                u = reps[rng.gen_range(0..reps.len())].mul(&u);
            }
            let t = transport(&u, &m).unwrap();
            assert_eq!(t.det(), u.det().unwrap().norm() * m.det());
            let z = random_point(&mut rng);
            let (j1, j2) = u.automorphy_factor(&z);
            let moved = moebius_act(&u, &z).unwrap();
            let lhs = proximity(&z, &t);
            let rhs = (j1 * j2).norm() * proximity(&moved, &m);
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs), "{lhs} {rhs}");
        }
        let m = random_lattice_vector(&f, &mut rng);
        assert_eq!(transport(&MatrixGL2F::identity(5), &m).unwrap(), m);
        // translations have trivial automorphy factor
        let t = MatrixGL2F::translation_codifferent(&f, f.omega());
        let z = random_point(&mut rng);
        let lhs = proximity(&moebius_act(&t, &z).unwrap(), &m);
        assert!((lhs - proximity(&z, &transport(&t, &m).unwrap())).abs() < 1e-9 * (1.0 + lhs));
    }

    #[test]
    fn gamma_action_preserves_lattice() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..300 {
            let m = random_lattice_vector(&f, &mut rng);
            let g = grp.random_element(&mut rng, 4);
            let t = transport(&g, &m).unwrap();
            assert_eq!(t.a() % 5, 0);
            assert_eq!(t.det(), m.det());
        }
        // a matrix outside Γ can leave L
        let half = MatrixGL2F::with_denominator([f.integer(1), f.integer(1), f.integer(0), f.integer(2)], 2);
        let m = ComponentMatrix::new(5, 1, f.integer(1), PolarizationModulus::default()).unwrap();
        assert!(transport(&half, &m).is_err());
    }

    /// Independent route to the intersection: eliminate `z1` and solve for `z2` first.
    fn intersection_via_z2(n1: &ComponentMatrix, n2: &ComponentMatrix) -> Option<PointH2> {
        let (e1, e1c) = n1.gamma().embeddings();
        let (e2, e2c) = n2.gamma().embeddings();
        let (m1, l1, m2, l2) = (n1.a() as f64, n1.b() as f64, n2.a() as f64, n2.b() as f64);
        // z1 = -(e1c z2 + l1)/(m1 z2 + e1); substitute into the second equation
        let a = e1c * m2 - e2c * m1;
        let b = e1c * e2 - e2c * e1 + l1 * m2 - l2 * m1;
        let c = l1 * e2 - l2 * e1;
        let disc = b * b - 4.0 * a * c;
        if a.abs() < 1e-9 || disc >= 0.0 {
            return None;
        }
        let z2 = Complex64::new(-b / (2.0 * a), (-disc).sqrt() / (2.0 * a.abs()));
        let z1 = -(z2 * e1c + l1) / (z2 * m1 + e1);
        PointH2::new(z1, z2).ok()
    }

    #[test]
    fn cm_point_plant_and_recover() {
        let f = f5();
        let m0 = PolarizationModulus::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t11 = crate::hzdiv::enumerate_components(11, &f, m0, 12.0);
        let t19 = crate::hzdiv::enumerate_components(19, &f, m0, 12.0);
        let mut done = 0;
        let mut tries = 0;
        while done < 50 {
            tries += 1;
            assert!(tries < 100_000);
            let c1 = t11[rng.gen_range(0..t11.len())];
            let c2 = t19[rng.gen_range(0..t19.len())];
            let Some(truth) = intersection_via_z2(&c1, &c2) else { continue };
            let n1 = NearMiss::from_component(&c1, 11, 1).unwrap();
            let n2 = NearMiss::from_component(&c2, 19, 1).unwrap();
            let got = cm_point(&n1, &n2).unwrap();
            // perturb the truth and confirm both components are near-misses there
            let jitter = PointH2::new(truth.z1 + Complex64::new(3e-10, -4e-10), truth.z2 + Complex64::new(-5e-10, 2e-10)).unwrap();
            assert!(proximity(&jitter, &c1) < 1e-6 && proximity(&jitter, &c2) < 1e-6);
            assert!(got.point.distance(&truth) < 1e-6, "{} vs {}", got.point, truth);
            assert!(proximity(&got.point, &c1) < 1e-8);
            assert!(proximity(&got.point, &c2) < 1e-8);
            done += 1;
        }
    }

    #[test]
    fn cm_point_errors() {
        let f = f5();
        let m0 = PolarizationModulus::default();
        let c = ComponentMatrix::new(5, 3, f.integer(2), m0).unwrap();
        let n1 = NearMiss::from_component(&c, 11, 1).unwrap();
        let c2 = ComponentMatrix::new(10, 3, f.integer(4), m0).unwrap();
        let n2 = NearMiss::from_component(&c2, 7, 2).unwrap();
        assert_eq!(cm_point(&n1, &n2).unwrap_err(), HeckeError::Degenerate);
        assert_eq!(cm_point(&n1, &n1).unwrap_err(), HeckeError::SamePrime);
        assert!(matches!(NearMiss::new(5, 3, f.integer(2), 11, 2, m0), Err(HeckeError::InvalidNearMiss(_))));
        assert!(matches!(NearMiss::new(3, 4, f.integer(1), 11, 1, m0), Err(HeckeError::InvalidNearMiss(_))));
    }

    #[test]
    fn special_form_at_i_i() {
        let f = f5();
        let z = PointH2::from_parts(0.0, 1.0, 0.0, 1.0).unwrap();
        let sf = special_point_form(&z, &f, PolarizationModulus::default(), 10.0).unwrap();
        assert_eq!(sf.form, BinaryQF { a: 1, b: 0, c: 5 });
        assert_eq!(sf.content, 5);
        assert!(sf.form.discriminant() < 0);
    }

    #[test]
    fn generic_point_is_not_special() {
        let f = f5();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..3 {
            let z = random_point(&mut rng);
            assert!(matches!(
                special_point_form(&z, &f, PolarizationModulus::default(), 10.0),
                Err(HeckeError::NotSpecial(_))
            ));
        }
    }

    #[test]
    fn special_form_at_cm_point_represents_both_degrees() {
        let f = f5();
        let m0 = PolarizationModulus::default();
        let t11 = crate::hzdiv::enumerate_components(11, &f, m0, 6.0);
        let t19 = crate::hzdiv::enumerate_components(19, &f, m0, 6.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 5 {
            let c1 = t11[rng.gen_range(0..t11.len())];
            let c2 = t19[rng.gen_range(0..t19.len())];
            let (Ok(n1), Ok(n2)) = (NearMiss::from_component(&c1, 11, 1), NearMiss::from_component(&c2, 19, 1)) else {
                continue;
            };
            let Ok(cm) = cm_point(&n1, &n2) else { continue };
            let z = cm.point.with_eps(1e-9);
            let sf = special_point_form(&z, &f, m0, 8.0).unwrap();
            assert!(sf.form.discriminant() < 0);
            for n in [11i64, 19] {
                assert_eq!(n % sf.content, 0);
                assert!(crate::qform::represents(&sf.form, n / sf.content).is_some(), "{} {n}", sf.form);
            }
            checked += 1;
        }
    }

    #[test]
    fn hecke_translate_of_divisor_point_meets_t_pr() {
        let f = f5();
        let grp = ModularGroup::new(f);
        let m0 = PolarizationModulus::default();
        let eps = f.fundamental_unit();
        let on = ComponentMatrix::new(0, 0, eps, m0).unwrap();
        assert_eq!(on.det(), 1);
        let (e1, e2) = eps.embeddings();
        let lambda = f.split_generator(11).unwrap();
        let targets = crate::hzdiv::enumerate_components(11, &f, m0, 110.0);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..5 {
            let t = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0));
            let z = PointH2::new(t, -t * e1 / e2).unwrap();
            assert!(proximity(&z, &on) < 1e-12);
            let orbit = grp.hecke_orbit(&z, 11, &lambda).unwrap();
            let best = orbit
                .iter()
                .flat_map(|w| targets.iter().map(move |m| proximity(w, m)))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "closest approach {best}");
        }
    }
}
