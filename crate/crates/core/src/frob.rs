//! Genus-2 curves `y² = f(x)`: point counts over `F_p` and `F_{p²}`, the Frobenius quartic
//! `x⁴ + a1 x³ + a2 x² + p a1 x + p²`, split/Newton classification, and Sato–Tate statistics.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{det_big, is_square, isqrt, legendre, primes_in};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrobError {
    #[error("f must have degree 5 or 6, got {0}")]
    BadDegree(usize),
    #[error("f is not squarefree")]
    NotSquarefree,
    #[error("p = {0} is a bad prime for this curve")]
    BadPrime(u64),
    #[error("q = {q} is not p or p² for p = {p}")]
    BadFieldSize { p: u64, q: u64 },
    #[error("Weil bound violated at p = {p}: a1 = {a1}, a2 = {a2}")]
    WeilViolation { p: u64, a1: i64, a2: i64 },
    #[error("inconsistent Frobenius data at p = {p}: {reason}")]
    Inconsistent { p: u64, reason: String },
}

/// `y² = f(x)` with `f` given by ascending integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genus2Curve {
    f: Vec<i64>,
    disc: BigInt,
    label: Option<String>,
}

fn discriminant(f: &[i64]) -> BigInt {
    // disc(f) = (-1)^{n(n-1)/2} Res(f, f') / a_n, via the Sylvester matrix
    let n = f.len() - 1;
    let df: Vec<i64> = (1..=n).map(|i| i as i64 * f[i]).collect();
    let size = 2 * n - 1;
    let mut syl = vec![vec![0i128; size]; size];
    for r in 0..n - 1 {
        for (i, &c) in f.iter().rev().enumerate() {
            syl[r][r + i] = c as i128;
        }
    }
    for r in 0..n {
        for (i, &c) in df.iter().rev().enumerate() {
            syl[n - 1 + r][r + i] = c as i128;
        }
    }
    let res = det_big(&syl);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    res * sign / BigInt::from(f[n])
}

impl Genus2Curve {
    pub fn new(f: Vec<i64>, label: Option<String>) -> Result<Self, FrobError> {
        let mut f = f;
        while f.len() > 1 && *f.last().unwrap() == 0 {
            f.pop();
        }
        let deg = f.len() - 1;
        if deg != 5 && deg != 6 {
            return Err(FrobError::BadDegree(deg));
        }
        let d = discriminant(&f);
        if d.is_zero() {
            return Err(FrobError::NotSquarefree);
        }
        // discriminant of f as a binary sextic
        let disc = if deg == 5 { d * BigInt::from(f[5]) * BigInt::from(f[5]) } else { d };
        Ok(Genus2Curve { f, disc, label })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    /// Discriminant of `f` viewed as a binary sextic.
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Odd primes not dividing the sextic discriminant.
    pub fn is_good_prime(&self, p: u64) -> bool {
        p > 2 && !(&self.disc % BigInt::from(p)).is_zero()
    }

    /// `y² = c·f(x)`.
    pub fn twist(&self, c: i64) -> Result<Genus2Curve, FrobError> {
        Genus2Curve::new(self.f.iter().map(|a| a * c).collect(), self.label.as_ref().map(|l| format!("{l}^({c})")))
    }

    fn reduced(&self, p: u64) -> Vec<u64> {
        self.f.iter().map(|&a| a.rem_euclid(p as i64) as u64).collect()
    }

    /// `#C(F_q)` on the smooth model, for `q ∈ {p, p²}`.
    pub fn point_count(&self, q: u64) -> Result<u64, FrobError> {
        let p = if crate::arith::is_prime(q) {
            q
        } else {
            let r = isqrt(q as i128) as u64;
            if r * r != q || !crate::arith::is_prime(r) {
                return Err(FrobError::BadFieldSize { p: q, q });
            }
            r
        };
        if !self.is_good_prime(p) {
            return Err(FrobError::BadPrime(p));
        }
        Ok(if q == p { count_fp(&self.reduced(p), p) } else { count_fp2(&self.reduced(p), p) })
    }
}

impl fmt::Display for Genus2Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.f.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            let coef = if mono.is_empty() || c.abs() != 1 { c.abs().to_string() } else { String::new() };
            terms.push((c < 0, format!("{coef}{mono}")));
        }
        write!(f, "y^2 = ")?;
        for (k, (neg, t)) in terms.iter().enumerate() {
            match (k, neg) {
                (0, true) => write!(f, "-{t}")?,
                (0, false) => write!(f, "{t}")?,
                (_, true) => write!(f, " - {t}")?,
                (_, false) => write!(f, " + {t}")?,
            }
        }
        Ok(())
    }
}

/// Table of `χ_p` on `0..p`.
fn chi_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..p {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// Points at infinity: one if the reduced degree is 5, otherwise `1 + χ(a6)` over `F_q`.
fn points_at_infinity(f: &[u64], p: u64, over_fp2: bool) -> u64 {
    if f.len() < 7 || f[6] == 0 {
        1
    } else if over_fp2 || legendre(f[6] as i128, p) == 1 {
        2
    } else {
        0
    }
}

fn count_fp(f: &[u64], p: u64) -> u64 {
    let chi = chi_table(p);
    let mut total: i64 = 0;
    for x in 0..p {
        let v = f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p);
        total += 1 + chi[v as usize] as i64;
    }
    total as u64 + points_at_infinity(f, p, false)
}

/// Smallest quadratic non-residue mod p.
fn non_residue(p: u64) -> u64 {
    (2..p).find(|&n| legendre(n as i128, p) == -1).expect("odd prime has a non-residue")
}

/// `F_{p²} = F_p[t]/(t² − n)`, elements `(a, b) = a + b t`.
#[derive(Clone, Copy)]
struct Fp2 {
    p: u64,
    n: u64,
}

impl Fp2 {
    fn add(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let (a, b) = (x.0 + y.0, x.1 + y.1);
        (if a >= self.p { a - self.p } else { a }, if b >= self.p { b - self.p } else { b })
    }

    fn sub(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        ((x.0 + self.p - y.0) % self.p, (x.1 + self.p - y.1) % self.p)
    }

    fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let p = self.p as u128;
        let (a, b, c, d) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        (((a * c + self.n as u128 * (b * d % p)) % p) as u64, ((a * d + b * c) % p) as u64)
    }

    fn norm(&self, x: (u64, u64)) -> u64 {
        let p = self.p as u128;
        let (a, b) = (x.0 as u128, x.1 as u128);
        ((a * a % p + p * p - self.n as u128 * (b * b % p)) % p) as u64
    }

    fn eval(&self, f: &[u64], x: (u64, u64)) -> (u64, u64) {
        f.iter().rev().fold((0, 0), |acc, &c| self.add(self.mul(acc, x), (c, 0)))
    }
}

/// `#C(F_{p²})`: for each `v`, `u ↦ f(u + v t)` is a polynomial in `u` of degree ≤ 6 over
/// `F_{p²}`, walked by finite differences; `χ_{p²}(w) = χ_p(Nm w)`; `v` and `−v` give conjugate values.
fn count_fp2(f: &[u64], p: u64) -> u64 {
    let chi = chi_table(p);
    let k = Fp2 { p, n: non_residue(p) };
    let deg = f.len() - 1;
    let mut total: i64 = 0;
    for v in 0..=(p - 1) / 2 {
        let weight = if v == 0 { 1 } else { 2 };
        // forward-difference table at u = 0
        let mut diffs: Vec<(u64, u64)> = (0..=deg as u64).map(|u| k.eval(f, (u % p, v))).collect();
        for level in 1..=deg {
            for i in (level..=deg).rev() {
                diffs[i] = k.sub(diffs[i], diffs[i - 1]);
            }
        }
        let mut sub = 0i64;
        for _ in 0..p {
            let val = diffs[0];
            sub += 1 + if val == (0, 0) { 0 } else { chi[k.norm(val) as usize] as i64 };
            for i in 0..deg {
                diffs[i] = k.add(diffs[i], diffs[i + 1]);
            }
        }
        total += weight * sub;
    }
    total as u64 + points_at_infinity(f, p, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusData {
    pub p: u64,
    pub a1: i64,
    pub a2: i64,
}

impl FrobeniusData {
    /// Validates the Weil bounds and the root moduli.
    pub fn new(p: u64, a1: i64, a2: i64) -> Result<Self, FrobError> {
        let d = FrobeniusData { p, a1, a2 };
        d.check_weil()?;
        Ok(d)
    }

    /// `δ = a1² − 4(a2 − 2p)`.
    pub fn delta(&self) -> i64 {
        self.a1 * self.a1 - 4 * (self.a2 - 2 * self.p as i64)
    }

    /// Roots of the quartic from the factorization `(x² + c1 x + p)(x² + c2 x + p)`.
    pub fn roots(&self) -> [num_complex::Complex64; 4] {
        use num_complex::Complex64;
        let sd = Complex64::new(self.delta() as f64, 0.0).sqrt();
        let a1 = Complex64::new(self.a1 as f64, 0.0);
        let p = self.p as f64;
        let quad = |c: Complex64| {
            let disc = (c * c - 4.0 * p).sqrt();
            [(-c + disc) / 2.0, (-c - disc) / 2.0]
        };
        let [r1, r2] = quad((a1 + sd) / 2.0);
        let [r3, r4] = quad((a1 - sd) / 2.0);
        [r1, r2, r3, r4]
    }

    fn check_weil(&self) -> Result<(), FrobError> {
        let p = self.p as f64;
        let violation = FrobError::WeilViolation { p: self.p, a1: self.a1, a2: self.a2 };
        if (self.a1 as f64).abs() > 4.0 * p.sqrt() + 1e-9 || (self.a2 as f64).abs() > 6.0 * p + 1e-9 {
            return Err(violation);
        }
        let target = p.sqrt();
        if self.roots().iter().any(|r| (r.norm() - target).abs() > 1e-6 * target.max(1.0)) {
            return Err(violation);
        }
        Ok(())
    }

    /// `#C(F_p)` and `#C(F_{p²})` implied by the data.
    pub fn implied_counts(&self) -> (i64, i64) {
        let p = self.p as i64;
        (p + 1 + self.a1, p * p + 1 - (self.a1 * self.a1 - 2 * self.a2))
    }
}

pub fn frobenius_data(c: &Genus2Curve, p: u64) -> Result<FrobeniusData, FrobError> {
    if !c.is_good_prime(p) {
        return Err(FrobError::BadPrime(p));
    }
    let n1 = c.point_count(p)? as i64;
    let n2 = c.point_count(p * p)? as i64;
    let pi = p as i64;
    let a1 = n1 - pi - 1;
    let twice = a1 * a1 - pi * pi - 1 + n2;
    if twice % 2 != 0 {
        return Err(FrobError::Inconsistent { p, reason: format!("odd value {twice} for 2·a2") });
    }
    FrobeniusData::new(p, a1, twice / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NewtonType {
    Ordinary,
    PRankOne,
    Supersingular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitKind {
    Bad,
    /// Quartic factors as `(x² − αx + p)(x² − βx + p)` with `α < β`.
    SplitRational(i64, i64),
    SplitEqual,
    Supersingular,
    OrdinaryNoSplitDetected,
    NonOrdinaryNoSplitDetected,
}

impl SplitKind {
    pub fn name(&self) -> &'static str {
        match self {
            SplitKind::Bad => "bad",
            SplitKind::SplitRational(..) => "split_rational",
            SplitKind::SplitEqual => "split_equal",
            SplitKind::Supersingular => "supersingular",
            SplitKind::OrdinaryNoSplitDetected => "ordinary_no_split",
            SplitKind::NonOrdinaryNoSplitDetected => "nonordinary_no_split",
        }
    }

    /// Split over the base field, as detected from `(a1, a2)`.
    pub fn is_split(&self) -> bool {
        matches!(self, SplitKind::SplitRational(..) | SplitKind::SplitEqual)
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitKind::SplitRational(a, b) => write!(f, "split_rational({a},{b})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Result of [`split_classify`]. `NoSplitDetected` kinds carry the caveat that geometric
/// splitting over an extension is not decidable from `(a1, a2)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitClass {
    pub kind: SplitKind,
    pub newton: NewtonType,
    /// `s1 ≤ s2`, normalized traces in `[−2, 2]`.
    pub svalues: (f64, f64),
    pub delta: i64,
    /// `δ` is a square or `D` times a square, so `Q(√δ) ⊆ F`.
    pub rm_consistent: bool,
}

pub fn newton_type(d: &FrobeniusData) -> NewtonType {
    let p = d.p as i64;
    if d.a2 % p != 0 {
        NewtonType::Ordinary
    } else if d.a1 % p == 0 {
        NewtonType::Supersingular
    } else {
        NewtonType::PRankOne
    }
}

pub fn split_classify(d: &FrobeniusData, disc: i64) -> Result<SplitClass, FrobError> {
    let delta = d.delta();
    if delta < 0 {
        return Err(FrobError::Inconsistent { p: d.p, reason: format!("negative δ = {delta}") });
    }
    let sp = (d.p as f64).sqrt();
    let sd = (delta as f64).sqrt();
    let svalues = ((-d.a1 as f64 - sd) / (2.0 * sp), (-d.a1 as f64 + sd) / (2.0 * sp));
    let newton = newton_type(d);
    let kind = if delta == 0 {
        SplitKind::SplitEqual
    } else if is_square(delta as i128) {
        let r = isqrt(delta as i128) as i64;
        SplitKind::SplitRational((-d.a1 - r) / 2, (-d.a1 + r) / 2)
    } else {
        match newton {
            NewtonType::Supersingular => SplitKind::Supersingular,
            NewtonType::Ordinary => SplitKind::OrdinaryNoSplitDetected,
            NewtonType::PRankOne => SplitKind::NonOrdinaryNoSplitDetected,
        }
    };
    let rm_consistent =
        is_square(delta as i128) || (disc > 0 && delta % disc == 0 && is_square((delta / disc) as i128));
    Ok(SplitClass { kind, newton, svalues, delta, rm_consistent })
}

/// Normalized product-semicircle density `(1/(4π²)) √(4 − s1²) √(4 − s2²)` on `[−2, 2]²`.
pub fn sato_tate_density(s1: f64, s2: f64) -> f64 {
    if s1.abs() > 2.0 || s2.abs() > 2.0 {
        return 0.0;
    }
    (4.0 - s1 * s1).sqrt() * (4.0 - s2 * s2).sqrt() / (4.0 * PI * PI)
}

/// `∫_a^b √(4 − s²) ds / (2π)`, the one-dimensional semicircle mass of `[a, b]`.
pub fn semicircle_mass(a: f64, b: f64) -> f64 {
    let prim = |s: f64| {
        let s = s.clamp(-2.0, 2.0);
        (s * (4.0 - s * s).sqrt() / 2.0 + 2.0 * (s / 2.0).asin()) / (2.0 * PI)
    };
    prim(b) - prim(a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2D {
    pub bins: usize,
    /// `counts[i][j]`: `s1` in bin `i`, `s2` in bin `j`, bins of width `4/bins` from −2.
    pub counts: Vec<Vec<u64>>,
}

impl Histogram2D {
    pub fn new(bins: usize) -> Self {
        Histogram2D { bins, counts: vec![vec![0; bins]; bins] }
    }

    pub fn bin_of(&self, s: f64) -> usize {
        (((s + 2.0) / 4.0 * self.bins as f64).floor().max(0.0) as usize).min(self.bins - 1)
    }

    pub fn add(&mut self, s1: f64, s2: f64) {
        let (i, j) = (self.bin_of(s1), self.bin_of(s2));
        self.counts[i][j] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Expected probability of bin `(i, j)` under the product-semicircle density.
    pub fn expected_mass(&self, i: usize, j: usize) -> f64 {
        let w = 4.0 / self.bins as f64;
        let edge = |k: usize| -2.0 + k as f64 * w;
        semicircle_mass(edge(i), edge(i + 1)) * semicircle_mass(edge(j), edge(j + 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub data: Option<FrobeniusData>,
    pub class: Option<SplitClass>,
    /// Reason the prime was skipped.
    pub skipped: Option<String>,
}

impl PrimeRecord {
    pub fn kind(&self) -> SplitKind {
        self.class.map_or(SplitKind::Bad, |c| c.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub records: Vec<PrimeRecord>,
    pub class_counts: BTreeMap<String, u64>,
    /// `Σ_{3 ≤ ℓ ≤ X prime} 1/√ℓ` over every odd prime in range.
    pub sum_inv_sqrt: f64,
    pub histogram: Histogram2D,
    /// `#{ℓ : |s1 − s2| < 1/√ℓ}`.
    pub near_diagonal: u64,
    /// The float test `|s1 − s2| < 1/√ℓ` agreed with `δ = 0` on every event.
    pub near_diagonal_exact: bool,
}

/// `|s1 − s2| < 1/√ℓ` decided exactly: `|s1 − s2| = √(δ/ℓ)`, so the condition is `δ < 1`.
pub fn is_near_diagonal(c: &SplitClass) -> bool {
    c.delta < 1
}

pub fn frobenius_record(c: &Genus2Curve, disc: i64, p: u64) -> PrimeRecord {
    if !c.is_good_prime(p) {
        return PrimeRecord { p, data: None, class: None, skipped: Some("bad reduction".into()) };
    }
    match frobenius_data(c, p).and_then(|d| split_classify(&d, disc).map(|cl| (d, cl))) {
        Ok((d, cl)) => PrimeRecord { p, data: Some(d), class: Some(cl), skipped: None },
        Err(e) => PrimeRecord { p, data: None, class: None, skipped: Some(e.to_string()) },
    }
}

pub fn summarize(records: Vec<PrimeRecord>, bins: usize) -> ScanSummary {
    let mut class_counts = BTreeMap::new();
    let mut histogram = Histogram2D::new(bins);
    let mut near_diagonal = 0;
    let mut near_diagonal_exact = true;
    let mut sum_inv_sqrt = 0.0;
    for r in &records {
        sum_inv_sqrt += 1.0 / (r.p as f64).sqrt();
        *class_counts.entry(r.kind().name().to_string()).or_insert(0) += 1;
        if let Some(c) = r.class {
            histogram.add(c.svalues.0, c.svalues.1);
            let near = (c.svalues.1 - c.svalues.0).abs() < 1.0 / (r.p as f64).sqrt();
            if near {
                near_diagonal += 1;
            }
            near_diagonal_exact &= near == is_near_diagonal(&c);
        }
    }
    ScanSummary { records, class_counts, sum_inv_sqrt, histogram, near_diagonal, near_diagonal_exact }
}

/// Frobenius data and classification for every odd prime `3 ≤ ℓ ≤ X`.
pub fn sato_tate_scan(c: &Genus2Curve, disc: i64, bound: u64) -> ScanSummary {
    sato_tate_scan_range(c, disc, 3, bound, 20)
}

pub fn sato_tate_scan_range(c: &Genus2Curve, disc: i64, lo: u64, hi: u64, bins: usize) -> ScanSummary {
    let records = primes_in(lo.max(3), hi).into_iter().map(|p| frobenius_record(c, disc, p)).collect();
    summarize(records, bins)
}

/// `Σ 1/√ℓ` over odd primes `ℓ ≤ X`, computed directly.
pub fn inverse_sqrt_sum(bound: u64) -> f64 {
    primes_in(3, bound).into_iter().map(|p| 1.0 / (p as f64).sqrt()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve(f: &[i64]) -> Genus2Curve {
        Genus2Curve::new(f.to_vec(), None).unwrap()
    }

    /// Durand–Kerner roots of a monic-normalized real polynomial (ascending coefficients).
    fn roots(f: &[f64]) -> Vec<Complex64> {
        let n = f.len() - 1;
        let lead = f[n];
        let mut z: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.3, 0.4 + k as f64 * 2.0 * PI / n as f64)).collect();
        let eval = |x: Complex64| f.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c) / lead;
        for _ in 0..2000 {
            let prev = z.clone();
            for i in 0..n {
                let mut den = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        den *= prev[i] - z[j];
                    }
                }
                z[i] = prev[i] - eval(prev[i]) / den;
            }
        }
        z
    }

    /// Brute force over all (x, y) in F_q² with F_{p²} = F_p[t]/(t² − t − c).
    fn naive_count(f: &[i64], p: u64, square: bool) -> u64 {
        let pi = p as i64;
        let c = (1..pi).find(|&c| legendre((1 + 4 * c) as i128, p) == -1).unwrap();
        let mul = |x: (i64, i64), y: (i64, i64)| {
            // t² = t + c
            let t2 = x.1 * y.1;
            ((x.0 * y.0 + c * t2).rem_euclid(pi), (x.0 * y.1 + x.1 * y.0 + t2).rem_euclid(pi))
        };
        let elems: Vec<(i64, i64)> =
            if square { (0..pi).flat_map(|a| (0..pi).map(move |b| (a, b))).collect() } else { (0..pi).map(|a| (a, 0)).collect() };
        let fr: Vec<i64> = f.iter().map(|a| a.rem_euclid(pi)).collect();
        let eval = |x: (i64, i64)| fr.iter().rev().fold((0, 0), |acc, &a| {
            let m = mul(acc, x);
            ((m.0 + a) % pi, m.1)
        });
        let mut count = 0;
        for &x in &elems {
            let fx = eval(x);
            count += elems.iter().filter(|&&y| mul(y, y) == fx).count() as u64;
        }
        // X = 0 on Y² = X⁶ f(1/X)
        let a6 = if fr.len() == 7 { (fr[6], 0) } else { (0, 0) };
        count += if a6 == (0, 0) { 1 } else { elems.iter().filter(|&&y| mul(y, y) == a6).count() as u64 };
        count
    }

    #[test]
    fn point_count_examples() {
        let c = curve(&[1, 0, 0, 0, 0, 1]);
        assert_eq!(c.point_count(3).unwrap(), 4);
        assert_eq!(c.point_count(9).unwrap(), 10);
        assert_eq!(curve(&[0, 1, 0, 0, 0, 1]).point_count(3).unwrap(), 4);
        assert_eq!(c.point_count(5), Err(FrobError::BadPrime(5)));
        assert_eq!(c.point_count(25), Err(FrobError::BadPrime(5)));
        assert!(matches!(c.point_count(15), Err(FrobError::BadFieldSize { .. })));
        assert!(matches!(c.point_count(27), Err(FrobError::BadFieldSize { .. })));
    }

    #[test]
    fn construction_errors_and_discriminant() {
        assert_eq!(Genus2Curve::new(vec![1, 0, 0, 1], None), Err(FrobError::BadDegree(3)));
        assert_eq!(Genus2Curve::new(vec![0, 0, 1, 0, 0, 1], None), Err(FrobError::NotSquarefree));
        assert_eq!(curve(&[1, 0, 0, 0, 0, 1]).disc(), &BigInt::from(3125));
        // product formula over numerical roots
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let deg = rng.gen_range(5..=6);
            let f: Vec<i64> = (0..=deg).map(|i| if i == deg { rng.gen_range(1..4) } else { rng.gen_range(-4..=4) }).collect();
            let Ok(c) = Genus2Curve::new(f.clone(), None) else { continue };
            let r = roots(&f.iter().map(|&a| a as f64).collect::<Vec<_>>());
            let mut prod = Complex64::new((f[deg] as f64).powi(2 * deg as i32 - 2), 0.0);
            for i in 0..deg {
                for j in i + 1..deg {
                    prod *= (r[i] - r[j]) * (r[i] - r[j]);
                }
            }
            let sextic = if deg == 5 { prod.re * (f[5] * f[5]) as f64 } else { prod.re };
            let exact = c.disc().to_string().parse::<f64>().unwrap();
            assert!((sextic - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{f:?}: {sextic} vs {exact}");
        }
    }

    #[test]
    fn counts_match_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 25 {
            let deg = rng.gen_range(5..=6);
            let f: Vec<i64> = (0..=deg).map(|i| if i == deg { rng.gen_range(1..6) } else { rng.gen_range(-9..=9) }).collect();
            let Ok(c) = Genus2Curve::new(f.clone(), None) else { continue };
            for p in [3u64, 5, 7, 11, 13] {
                if !c.is_good_prime(p) {
                    continue;
                }
                assert_eq!(c.point_count(p).unwrap(), naive_count(&f, p, false), "{f:?} p={p}");
                assert_eq!(c.point_count(p * p).unwrap(), naive_count(&f, p, true), "{f:?} q={}", p * p);
                checked += 1;
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        let c = curve(&[1, 0, 0, 0, 0, 1]);
        let d = frobenius_data(&c, 3).unwrap();
        assert_eq!((d.a1, d.a2), (0, 0));
        assert_eq!(frobenius_data(&c, 5), Err(FrobError::BadPrime(5)));
        let d11 = frobenius_data(&c, 11).unwrap();
        let (n1, n2) = (naive_count(c.coefficients(), 11, false) as i64, naive_count(c.coefficients(), 11, true) as i64);
        assert_eq!(d11.a1, n1 - 12);
        assert_eq!(d11.a2, (d11.a1 * d11.a1 - 121 - 1 + n2) / 2);
        assert!(d11.a1.abs() as f64 <= 4.0 * 11f64.sqrt() && d11.a2.abs() <= 66);
        let cl = split_classify(&d, 5).unwrap();
        assert_eq!(cl.kind, SplitKind::Supersingular);
        assert_eq!(cl.newton, NewtonType::Supersingular);
        assert_eq!(cl.delta, 24);
        assert!(!cl.rm_consistent);
    }

    #[test]
    fn classification_examples() {
        let d = FrobeniusData::new(5, -3, 12).unwrap();
        let c = split_classify(&d, 5).unwrap();
        assert_eq!(c.kind, SplitKind::SplitRational(1, 2));
        assert_eq!(c.newton, NewtonType::Ordinary);
        assert!((c.svalues.0 - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((c.svalues.1 - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!(c.rm_consistent);
        let e = split_classify(&FrobeniusData::new(5, -4, 14).unwrap(), 5).unwrap();
        assert_eq!(e.kind, SplitKind::SplitEqual);
        assert_eq!(e.delta, 0);
        assert_eq!(e.svalues.0, e.svalues.1);
        // p-rank one: p | a2, p ∤ a1, δ = 1 + 4·6 = 25 is a square, so pick another
        let pr = FrobeniusData::new(5, 1, 5).unwrap();
        assert_eq!(newton_type(&pr), NewtonType::PRankOne);
        assert_eq!(split_classify(&pr, 5).unwrap().kind, SplitKind::NonOrdinaryNoSplitDetected);
    }

    #[test]
    fn consistency_errors() {
        assert!(matches!(FrobeniusData::new(5, 100, 0), Err(FrobError::WeilViolation { .. })));
        assert!(matches!(FrobeniusData::new(5, 0, 31), Err(FrobError::WeilViolation { .. })));
        // roots off the circle while the coarse bounds hold
        assert!(matches!(FrobeniusData::new(5, 0, -25), Err(FrobError::WeilViolation { .. })));
        let raw = FrobeniusData { p: 5, a1: 0, a2: 20 };
        assert!(matches!(split_classify(&raw, 5), Err(FrobError::Inconsistent { .. })));
    }

    #[test]
    fn split_rational_factorization_is_exact() {
        for p in [3i64, 5, 7, 11, 13] {
            for a in -2 * p..=2 * p {
                for b in a..=2 * p {
                    if a * a > 4 * p || b * b > 4 * p {
                        continue;
                    }
                    // (x² − ax + p)(x² − bx + p)
                    let a1 = -(a + b);
                    let a2 = a * b + 2 * p;
                    let d = FrobeniusData::new(p as u64, a1, a2).unwrap();
                    let c = split_classify(&d, 5).unwrap();
                    if a == b {
                        assert_eq!(c.kind, SplitKind::SplitEqual);
                    } else {
                        assert_eq!(c.kind, SplitKind::SplitRational(a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn scan_round_trips_and_roots() {
        for f in [[1, 0, 0, 0, 0, 1], [0, 1, 0, 0, 0, 1], [-1, -2, -2, -1, 0, 1]] {
            let c = curve(&f);
            let s = sato_tate_scan_range(&c, 5, 3, 200, 20);
            for r in &s.records {
                let Some(d) = r.data else { continue };
                let (n1, n2) = d.implied_counts();
                assert_eq!(n1 as u64, c.point_count(r.p).unwrap());
                assert_eq!(n2 as u64, c.point_count(r.p * r.p).unwrap());
                let quartic = [(r.p * r.p) as f64, (r.p as i64 * d.a1) as f64, d.a2 as f64, d.a1 as f64, 1.0];
                for z in roots(&quartic) {
                    assert!((z.norm() - (r.p as f64).sqrt()).abs() < 1e-6, "p={} {:?}", r.p, d);
                }
                let cl = r.class.unwrap();
                if cl.kind == SplitKind::SplitEqual {
                    assert_eq!(d.a1 % 2, 0);
                    let alpha = -d.a1 / 2;
                    assert_eq!(d.a2, alpha * alpha + 2 * r.p as i64);
                }
            }
        }
    }

    #[test]
    fn rm_consistent_where_endomorphisms_are_rational() {
        // the level-47 curve has RM by Q(√5) over Q; for the CM curves it is defined over Q(ζ5) and Q(ζ8)
        let cases: [([i64; 6], i64, u64); 3] = [([-1, -2, -2, -1, 0, 1], 5, 1), ([1, 0, 0, 0, 0, 1], 5, 5), ([0, 1, 0, 0, 0, 1], 8, 8)];
        for (f, disc, m) in cases {
            let s = sato_tate_scan_range(&curve(&f), disc, 3, 400, 20);
            let mut seen = 0;
            for r in s.records.iter().filter(|r| r.class.is_some() && r.p % m == 1 % m) {
                assert!(r.class.unwrap().rm_consistent, "{f:?} p={} {:?}", r.p, r.data);
                seen += 1;
            }
            assert!(seen > 5);
        }
    }

    #[test]
    fn twists_preserve_ordinary_class() {
        let base = curve(&[-1, -2, -2, -1, 0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let c = rng.gen_range(2..40i64) * if rng.gen_bool(0.5) { -1 } else { 1 };
            let tw = base.twist(c).unwrap();
            for p in primes_in(3, 80) {
                if !base.is_good_prime(p) || c % p as i64 == 0 {
                    continue;
                }
                let (d0, d1) = (frobenius_data(&base, p).unwrap(), frobenius_data(&tw, p).unwrap());
                assert_eq!(d1.a2, d0.a2);
                assert_eq!(d1.a1, legendre(c as i128, p) as i64 * d0.a1);
                assert_eq!(newton_type(&d0) == NewtonType::Ordinary, newton_type(&d1) == NewtonType::Ordinary);
            }
        }
        let sq = base.twist(9).unwrap();
        for p in [7u64, 11, 13, 17] {
            if base.is_good_prime(p) {
                assert_eq!(sq.point_count(p * p).unwrap(), base.point_count(p * p).unwrap());
                assert_eq!(sq.point_count(p).unwrap(), base.point_count(p).unwrap());
            }
        }
    }

    #[test]
    fn scan_to_100() {
        let c = curve(&[1, 0, 0, 0, 0, 1]);
        let s = sato_tate_scan(&c, 5, 100);
        assert_eq!(s.records.len(), 24);
        assert_eq!(s.records.iter().filter(|r| r.data.is_some()).count(), 23);
        assert_eq!(s.records.iter().find(|r| r.skipped.is_some()).unwrap().p, 5);
        for r in &s.records {
            if let Some(cl) = r.class {
                assert!(cl.svalues.0.abs() <= 2.0 && cl.svalues.1.abs() <= 2.0);
            }
        }
        let direct: f64 = primes_in(3, 100).iter().map(|&p| (p as f64).powf(-0.5)).sum();
        assert!((s.sum_inv_sqrt - direct).abs() < 1e-12);
        assert!(s.near_diagonal_exact);
        assert_eq!(s.histogram.total(), 23);
        assert_eq!(s.class_counts.values().sum::<u64>(), 24);
    }

    #[test]
    fn density_is_normalized() {
        let h = Histogram2D::new(20);
        let total: f64 = (0..20).flat_map(|i| (0..20).map(move |j| (i, j))).map(|(i, j)| h.expected_mass(i, j)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // midpoint quadrature of the density on one bin
        let (i, j) = (7, 13);
        let n = 400;
        let w = 0.2 / n as f64;
        let mut q = 0.0;
        for a in 0..n {
            for b in 0..n {
                let s1 = -2.0 + 0.2 * i as f64 + (a as f64 + 0.5) * w;
                let s2 = -2.0 + 0.2 * j as f64 + (b as f64 + 0.5) * w;
                q += sato_tate_density(s1, s2) * w * w;
            }
        }
        assert!((q - h.expected_mass(i, j)).abs() < 1e-7);
        assert_eq!(sato_tate_density(2.5, 0.0), 0.0);
    }
}
