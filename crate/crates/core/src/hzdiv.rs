//! Hirzebruch–Zagier divisors `T(r)` on the Hilbert modular surface of a real quadratic field.
//!
//! A component is cut out by a vector `M = (a, γ; γ', b)` of the lattice
//! `L = { a ∈ D·Nm(𝔞)·Z, b ∈ Z, γ ∈ O_F }` whose determinant `ab − Nm γ` equals `r·Nm(𝔞)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factor, kronecker, legendre, primes_in, valuation};
use crate::numberfield::{FieldElement, QuadraticField, SplittingType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HzError {
    #[error("r must be positive")]
    ZeroIndex,
    #[error("polarization norm must be at least 1, got {0}")]
    BadModulus(i128),
    #[error("a = {a} is not divisible by D·Nm(a) = {required}")]
    NotInLattice { a: i128, required: i128 },
    #[error("quaternion algebra ({a}, {b}) is definite")]
    Definite { a: i128, b: i128 },
    #[error("quaternion algebra entries must be nonzero")]
    DegenerateAlgebra,
}

/// The norm of the polarization ideal `𝔞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationModulus {
    pub norm_a: i128,
}

impl Default for PolarizationModulus {
    fn default() -> Self {
        PolarizationModulus { norm_a: 1 }
    }
}

impl PolarizationModulus {
    pub fn new(norm_a: i128) -> Result<Self, HzError> {
        if norm_a < 1 {
            return Err(HzError::BadModulus(norm_a));
        }
        Ok(PolarizationModulus { norm_a })
    }
}

/// A vector `(a, γ; γ', b)` of `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentMatrix {
    a: i128,
    b: i128,
    gamma: FieldElement,
    norm_a: i128,
}

impl ComponentMatrix {
    pub fn new(a: i128, b: i128, gamma: FieldElement, modulus: PolarizationModulus) -> Result<Self, HzError> {
        let required = gamma.disc() * modulus.norm_a;
        if a % required != 0 {
            return Err(HzError::NotInLattice { a, required });
        }
        Ok(ComponentMatrix { a, b, gamma, norm_a: modulus.norm_a })
    }

    pub fn a(&self) -> i128 {
        self.a
    }

    pub fn b(&self) -> i128 {
        self.b
    }

    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    pub fn modulus(&self) -> PolarizationModulus {
        PolarizationModulus { norm_a: self.norm_a }
    }

    pub fn disc(&self) -> i128 {
        self.gamma.disc()
    }

    pub fn det(&self) -> i128 {
        self.a * self.b - self.gamma.norm()
    }

    /// `max(|a|, |b|, |σ1 γ|, |σ2 γ|)`.
    pub fn height(&self) -> f64 {
        let (g1, g2) = self.gamma.embeddings();
        (self.a.abs() as f64).max(self.b.abs() as f64).max(g1.abs()).max(g2.abs())
    }

    /// Integer coordinates `(a / (D·Nm 𝔞), b, s, t)` with `γ = s + tω`.
    pub fn lattice_coords(&self) -> [i128; 4] {
        let (s, t) = self.gamma.basis_coords();
        [self.a / (self.disc() * self.norm_a), self.b, s, t]
    }

    pub fn from_lattice_coords(c: [i128; 4], disc: i128, modulus: PolarizationModulus) -> Self {
        ComponentMatrix {
            a: c[0] * disc * modulus.norm_a,
            b: c[1],
            gamma: FieldElement::from_basis(c[2], c[3], disc),
            norm_a: modulus.norm_a,
        }
    }
}

impl std::ops::Neg for ComponentMatrix {
    type Output = ComponentMatrix;
    fn neg(self) -> ComponentMatrix {
        ComponentMatrix { a: -self.a, b: -self.b, gamma: -self.gamma, norm_a: self.norm_a }
    }
}

impl fmt::Display for ComponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[a={}, b={}, gamma={}]", self.a, self.b, self.gamma)
    }
}

/// A height-truncated description of `T(r)`.
#[derive(Debug, Clone)]
pub struct HZDivisor {
    pub r: i128,
    pub field: QuadraticField,
    pub modulus: PolarizationModulus,
    pub components: Vec<ComponentMatrix>,
}

impl HZDivisor {
    pub fn new(r: i128, field: QuadraticField, modulus: PolarizationModulus, height: f64) -> Result<Self, HzError> {
        if r < 1 {
            return Err(HzError::ZeroIndex);
        }
        let components = enumerate_components(r, &field, modulus, height);
        Ok(HZDivisor { r, field, modulus, components })
    }

    /// `Q(s) = det / D` of the associated special endomorphism, defined when `D | r`.
    pub fn special_degree(&self) -> Option<i128> {
        let det = self.r * self.modulus.norm_a;
        let d = self.field.discriminant();
        (det % d == 0).then_some(det / d)
    }
}

/// Residues `{ -Nm γ mod D : γ ∈ O_F }`.
pub fn minus_norm_residues(field: &QuadraticField) -> BTreeSet<i128> {
    let d = field.discriminant();
    let mut out = BTreeSet::new();
    for s in 0..d {
        for t in 0..d {
            out.insert((-field.from_basis(s, t).norm()).rem_euclid(d));
        }
    }
    out
}

pub fn hz_nonempty(r: i128, field: &QuadraticField, modulus: PolarizationModulus) -> bool {
    let d = field.discriminant();
    minus_norm_residues(field).contains(&(r * modulus.norm_a).rem_euclid(d))
}

/// True exactly when `r` is not the norm of an ideal of `O_F`.
pub fn hz_is_compact(r: i128, field: &QuadraticField) -> Result<bool, HzError> {
    if r < 1 {
        return Err(HzError::ZeroIndex);
    }
    Ok(factor(r as u128)
        .into_iter()
        .any(|(p, e)| e % 2 == 1 && field.splitting_type(p as u64) == SplittingType::Inert))
}

/// Hilbert symbol `(a, b)_p` for nonzero integers and a finite prime `p`.
pub fn hilbert_symbol(a: i128, b: i128, p: i128) -> i32 {
    let alpha = valuation(a, p);
    let beta = valuation(b, p);
    let u = a / p.pow(alpha);
    let v = b / p.pow(beta);
    if p == 2 {
        let eps = |w: i128| ((w - 1) / 2).rem_euclid(2);
        let omega = |w: i128| ((w * w - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + alpha as i128 * omega(v) + beta as i128 * omega(u);
        if e % 2 == 0 { 1 } else { -1 }
    } else {
        let sign = if (alpha * beta) % 2 == 1 && (p - 1) / 2 % 2 == 1 { -1 } else { 1 };
        let lu = if beta % 2 == 1 { legendre(u, p as u64) } else { 1 };
        let lv = if alpha % 2 == 1 { legendre(v, p as u64) } else { 1 };
        sign * lu * lv
    }
}

/// Finite primes at which the quaternion algebra `(D, -r·Nm 𝔞)` over `Q` ramifies.
pub fn quaternion_ramified_primes(d: i128, minus_r_norm_a: i128) -> Result<BTreeSet<i128>, HzError> {
    if d == 0 || minus_r_norm_a == 0 {
        return Err(HzError::DegenerateAlgebra);
    }
    if d < 0 && minus_r_norm_a < 0 {
        return Err(HzError::Definite { a: d, b: minus_r_norm_a });
    }
    let mut candidates: BTreeSet<i128> = BTreeSet::from([2]);
    for n in [d, minus_r_norm_a] {
        candidates.extend(factor(n.unsigned_abs()).into_iter().map(|(p, _)| p as i128));
    }
    Ok(candidates
        .into_iter()
        .filter(|&p| hilbert_symbol(d, minus_r_norm_a, p) == -1)
        .collect())
}

/// Lazily enumerate the components of `T(r)` of height at most `height`.
pub fn iter_components(
    r: i128,
    field: &QuadraticField,
    modulus: PolarizationModulus,
    height: f64,
) -> impl Iterator<Item = ComponentMatrix> + '_ {
    let d = field.discriminant();
    let target = r * modulus.norm_a;
    let step = d * modulus.norm_a;
    let h = height.max(0.0);
    let hi = h.floor() as i128;
    let sqrt_d = (d as f64).sqrt();
    let xb = (2.0 * h).floor() as i128;
    let yb = (2.0 * h / sqrt_d).floor() as i128;
    let residues_ok = hz_nonempty(r, field, modulus);
    (-xb..=xb)
        .flat_map(move |x| (-yb..=yb).map(move |y| (x, y)))
        .filter(move |_| residues_ok)
        .filter_map(move |(x, y)| field.element(x, y).ok())
        .filter(move |g| {
            let (g1, g2) = g.embeddings();
            g1.abs() <= h && g2.abs() <= h
        })
        .flat_map(move |gamma| {
            // ab = r·Nm𝔞 + Nm γ with step | a
            let n = target + gamma.norm();
            let mut found = Vec::new();
            if n == 0 {
                for b in -hi..=hi {
                    found.push((0, b));
                }
                let mut a = step;
                while a <= hi {
                    found.push((a, 0));
                    found.push((-a, 0));
                    a += step;
                }
            } else {
                let mut a = step;
                while a <= hi {
                    if n % a == 0 && (n / a).abs() <= hi {
                        found.push((a, n / a));
                        found.push((-a, -n / a));
                    }
                    a += step;
                }
            }
            found.into_iter().map(move |(a, b)| ComponentMatrix { a, b, gamma, norm_a: modulus.norm_a })
        })
}

pub fn enumerate_components(
    r: i128,
    field: &QuadraticField,
    modulus: PolarizationModulus,
    height: f64,
) -> Vec<ComponentMatrix> {
    iter_components(r, field, modulus, height).collect()
}

/// `{ qD : q ≤ X prime and inert in F }`.
pub fn compact_family(field: &QuadraticField, bound: u64) -> Vec<i128> {
    let d = field.discriminant();
    primes_in(2, bound)
        .into_iter()
        .filter(|&q| kronecker(d, q) == -1)
        .map(|q| q as i128 * d)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> QuadraticField {
        QuadraticField::from_discriminant(5).unwrap()
    }

    #[test]
    fn nonempty_examples() {
        let f = f5();
        let m = PolarizationModulus::default();
        assert!(hz_nonempty(10, &f, m));
        assert!(!hz_nonempty(2, &f, m));
        assert!(hz_nonempty(1, &f, m));
        assert_eq!(minus_norm_residues(&f), BTreeSet::from([0, 1, 4]));
    }

    #[test]
    fn compactness_examples() {
        let f = f5();
        assert!(hz_is_compact(10, &f).unwrap());
        assert!(!hz_is_compact(11, &f).unwrap());
        assert!(!hz_is_compact(4, &f).unwrap());
        assert_eq!(hz_is_compact(0, &f), Err(HzError::ZeroIndex));
    }

    #[test]
    fn ramification_examples() {
        assert_eq!(quaternion_ramified_primes(5, -1).unwrap(), BTreeSet::new());
        assert_eq!(quaternion_ramified_primes(5, -10).unwrap(), BTreeSet::from([2, 5]));
        assert_eq!(quaternion_ramified_primes(5, -30).unwrap(), BTreeSet::from([2, 3]));
        assert!(matches!(quaternion_ramified_primes(-5, -3), Err(HzError::Definite { .. })));
    }

    /// Is `c` (a p-adic number known modulo p^k) a nonzero square, if decidable at this precision?
    fn square_class(c: i128, p: i128, k: u32) -> Option<bool> {
        let modulus = p.pow(k);
        let c = c.rem_euclid(modulus);
        if c == 0 {
            return None;
        }
        let v = valuation(c, p);
        let u = c / p.pow(v);
        let need = if p == 2 { 3 } else { 1 };
        if k - v < need {
            return None;
        }
        Some(v.is_multiple_of(2) && if p == 2 { u.rem_euclid(8) == 1 } else { legendre(u, p as u64) == 1 })
    }

    /// `(a, b)_p = 1` iff `a x^2 + b y^2` is a square for some primitive `(x, y)`, or `-ab` is a square.
    fn hilbert_oracle(a: i128, b: i128, p: i128) -> i32 {
        let k = if p == 2 { 8 } else { 3 };
        let modulus = p.pow(k);
        if square_class(-a * b, p, k + 6) == Some(true) {
            return 1;
        }
        for x in 0..modulus {
            for y in 0..modulus {
                if x % p == 0 && y % p == 0 {
                    continue;
                }
                if square_class(a * x * x + b * y * y, p, k) == Some(true) {
                    return 1;
                }
            }
        }
        -1
    }

    #[test]
    fn hilbert_symbol_matches_local_solubility() {
        let values = [-15i128, -10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 14, 15];
        for p in [2i128, 3, 5, 7] {
            for &a in &values {
                for &b in &values {
                    if p == 7 && (a.abs() > 7 || b.abs() > 7) {
                        continue;
                    }
                    assert_eq!(hilbert_symbol(a, b, p), hilbert_oracle(a, b, p), "({a},{b})_{p}");
                }
            }
        }
    }

    #[test]
    fn ramified_sets_have_even_size() {
        for d in [5i128, 8, 12, 13, 17, 21, 24, 28, 29] {
            for n in 1..200 {
                let s = quaternion_ramified_primes(d, -n).unwrap();
                assert_eq!(s.len() % 2, 0, "D={d} n={n} {s:?}");
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let f = f5();
        let m = PolarizationModulus::default();
        let comps = enumerate_components(10, &f, m, 10.0);
        let want1 = ComponentMatrix::new(5, 2, f.integer(0), m).unwrap();
        let want2 = ComponentMatrix::new(5, 1, f.sqrt_disc(), m).unwrap();
        assert!(comps.contains(&want1));
        assert!(comps.contains(&want2));
        assert!(comps.iter().all(|c| c.det() == 10 && c.height() <= 10.0));
        for c in &comps {
            assert!(comps.contains(&-*c));
        }
        assert!(enumerate_components(10, &f, m, 0.5).is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force_box() {
        let f = f5();
        let m = PolarizationModulus::default();
        let h = 12.0;
        let fast: BTreeSet<_> = enumerate_components(11, &f, m, h).iter().map(|c| c.lattice_coords()).collect();
        let mut brute = BTreeSet::new();
        for a in -12i128..=12 {
            for b in -12i128..=12 {
                for x in -24i128..=24 {
                    for y in -12i128..=12 {
                        let Ok(g) = f.element(x, y) else { continue };
                        let Ok(c) = ComponentMatrix::new(a, b, g, m) else { continue };
                        if c.det() == 11 && c.height() <= h {
                            brute.insert(c.lattice_coords());
                        }
                    }
                }
            }
        }
        assert_eq!(fast, brute);
    }

    #[test]
    fn nonempty_iff_witness_found() {
        let m = PolarizationModulus::default();
        for d in [5i128, 8, 13] {
            let f = QuadraticField::from_discriminant(d).unwrap();
            for r in 1..=60 {
                let found = iter_components(r, &f, m, 10.0 * r as f64).next().is_some();
                assert_eq!(hz_nonempty(r, &f, m), found, "D={d} r={r}");
            }
        }
    }

    #[test]
    fn compact_family_examples() {
        let f = f5();
        assert_eq!(compact_family(&f, 10), vec![10, 15, 35]);
        assert!(compact_family(&f, 1).is_empty());
        for d in [5i128, 8, 13, 17] {
            let f = QuadraticField::from_discriminant(d).unwrap();
            for r in compact_family(&f, 100) {
                assert!(hz_is_compact(r, &f).unwrap());
                assert!(hz_nonempty(r, &f, PolarizationModulus::default()));
            }
        }
    }

    #[test]
    fn special_degree_convention() {
        let f = f5();
        let t = HZDivisor::new(15, f, PolarizationModulus::default(), 5.0).unwrap();
        assert_eq!(t.special_degree(), Some(3));
        assert!(t.components.iter().all(|c| c.det() == 15));
    }

    proptest! {
        #[test]
        fn membership_is_enforced(a in -100i128..100, b in -50i128..50, s in -20i128..20, t in -20i128..20) {
            let f = f5();
            let g = f.from_basis(s, t);
            let m = PolarizationModulus::default();
            let res = ComponentMatrix::new(a, b, g, m);
            prop_assert_eq!(res.is_ok(), a % 5 == 0);
            if let Ok(c) = res {
                prop_assert_eq!(ComponentMatrix::from_lattice_coords(c.lattice_coords(), 5, m), c);
                prop_assert_eq!((-c).det(), c.det());
            }
        }
    }
}
