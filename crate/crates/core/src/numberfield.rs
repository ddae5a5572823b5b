//! Exact arithmetic in a real quadratic field `F = Q(sqrt d)` and its ring of integers.
//!
//! Integral elements are stored as `(x + y*sqrt(D))/2` where `D` is the field
//! discriminant and `x = y*D (mod 2)`. This single shape covers both
//! `d = 1 (mod 4)` and `d = 2, 3 (mod 4)` without a second representation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_squarefree, isqrt, kronecker};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("d = {0} is not a squarefree integer greater than 1")]
    NotSquarefree(i128),
    #[error("{0} is not a real quadratic fundamental discriminant")]
    NotFundamental(i128),
    #[error("(x, y) = ({x}, {y}) violates x = y*D (mod 2) for D = {disc}")]
    InvalidElement { x: i128, y: i128, disc: i128 },
    #[error("fundamental unit of Q(sqrt {0}) does not fit in 128-bit coordinates")]
    UnitOverflow(i128),
}

/// Splitting behaviour of a rational prime in `O_F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

/// An element `(x + y*sqrt(D))/2` of `O_F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    x: i128,
    y: i128,
    disc: i128,
}

/// Result of [`FieldElement::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementSummary {
    pub norm: i128,
    pub trace: i128,
    pub conjugate: FieldElement,
    pub totally_positive: bool,
}

impl FieldElement {
    pub fn new(x: i128, y: i128, disc: i128) -> Result<Self, FieldError> {
        if (x - y * disc).rem_euclid(2) != 0 {
            return Err(FieldError::InvalidElement { x, y, disc });
        }
        Ok(FieldElement { x, y, disc })
    }

    pub(crate) fn raw(x: i128, y: i128, disc: i128) -> Self {
        debug_assert_eq!((x - y * disc).rem_euclid(2), 0);
        FieldElement { x, y, disc }
    }

    pub fn integer(n: i128, disc: i128) -> Self {
        FieldElement { x: 2 * n, y: 0, disc }
    }

    pub fn zero(disc: i128) -> Self {
        Self::integer(0, disc)
    }

    pub fn one(disc: i128) -> Self {
        Self::integer(1, disc)
    }

    /// Half-coordinates `(x, y)` of `(x + y*sqrt(D))/2`.
    pub fn coords(&self) -> (i128, i128) {
        (self.x, self.y)
    }

    pub fn disc(&self) -> i128 {
        self.disc
    }

    /// Coordinates `(s, t)` in the basis `{1, omega}`, `omega = (D + sqrt D)/2`.
    pub fn basis_coords(&self) -> (i128, i128) {
        ((self.x - self.y * self.disc) / 2, self.y)
    }

    pub fn from_basis(s: i128, t: i128, disc: i128) -> Self {
        FieldElement { x: 2 * s + t * disc, y: t, disc }
    }

    pub fn norm(&self) -> i128 {
        (self.x * self.x - self.disc * self.y * self.y) / 4
    }

    pub fn trace(&self) -> i128 {
        self.x
    }

    pub fn conjugate(&self) -> Self {
        FieldElement { x: self.x, y: -self.y, disc: self.disc }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn is_rational(&self) -> bool {
        self.y == 0
    }

    /// The rational integer value, if the element lies in `Z`.
    pub fn as_integer(&self) -> Option<i128> {
        (self.y == 0).then_some(self.x / 2)
    }

    /// Both real embeddings positive, decided exactly.
    pub fn is_totally_positive(&self) -> bool {
        // x > |y| sqrt(D)  <=>  x > 0 and x^2 > D y^2
        self.x > 0 && self.x * self.x > self.disc * self.y * self.y
    }

    /// Exact sign of the real embedding `i`.
    pub fn embedding_sign(&self, i: usize) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let y = if i == 0 { self.y } else { -self.y };
        let (sx, sy) = (self.x.signum(), y.signum());
        if sy == 0 || sx == sy {
            return if sx != 0 { sx.cmp(&0) } else { sy.cmp(&0) };
        }
        if sx == 0 {
            return sy.cmp(&0);
        }
        // opposite signs: the larger magnitude wins
        match (self.x * self.x).cmp(&(self.disc * y * y)) {
            Ordering::Greater => sx.cmp(&0),
            Ordering::Less => sy.cmp(&0),
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn arith(&self) -> ElementSummary {
        ElementSummary {
            norm: self.norm(),
            trace: self.trace(),
            conjugate: self.conjugate(),
            totally_positive: self.is_totally_positive(),
        }
    }

    /// Real embedding `i` (0: `sqrt D > 0`, 1: `sqrt D < 0`).
    pub fn embed(&self, i: usize) -> f64 {
        let s = (self.disc as f64).sqrt();
        let sign = if i == 0 { 1.0 } else { -1.0 };
        (self.x as f64 + sign * self.y as f64 * s) / 2.0
    }

    pub fn embeddings(&self) -> (f64, f64) {
        (self.embed(0), self.embed(1))
    }

    /// `self / k` for a nonzero rational integer, when the quotient is integral.
    pub fn div_int(&self, k: i128) -> Option<Self> {
        assert!(k != 0);
        if self.x % k != 0 || self.y % k != 0 {
            return None;
        }
        FieldElement::new(self.x / k, self.y / k, self.disc).ok()
    }

    /// `self / other` when the quotient lies in `O_F`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        let n = other.norm();
        if n == 0 {
            return None;
        }
        (*self * other.conjugate()).div_int(n)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.disc);
        for _ in 0..k {
            acc = acc * *self;
        }
        acc
    }

    pub fn scale(&self, k: i128) -> Self {
        FieldElement { x: self.x * k, y: self.y * k, disc: self.disc }
    }

    fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        let xx = self.x.checked_mul(rhs.x)?;
        let yy = self.y.checked_mul(rhs.y)?.checked_mul(self.disc)?;
        let xy = self.x.checked_mul(rhs.y)?;
        let yx = self.y.checked_mul(rhs.x)?;
        Some(FieldElement {
            x: xx.checked_add(yy)? / 2,
            y: xy.checked_add(yx)? / 2,
            disc: self.disc,
        })
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.disc, rhs.disc);
        FieldElement { x: self.x + rhs.x, y: self.y + rhs.y, disc: self.disc }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.disc, rhs.disc);
        FieldElement { x: self.x - rhs.x, y: self.y - rhs.y, disc: self.disc }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement { x: -self.x, y: -self.y, disc: self.disc }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.disc, rhs.disc);
        // (x1 + y1 s)(x2 + y2 s)/4 with s^2 = D; both halves are even by the parity rule
        FieldElement {
            x: (self.x * rhs.x + self.disc * self.y * rhs.y) / 2,
            y: (self.x * rhs.y + self.y * rhs.x) / 2,
            disc: self.disc,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x % 2 == 0 && self.y % 2 == 0, self.y) {
            (_, 0) => write!(f, "{}", self.x / 2),
            (true, y) => write!(f, "{} + {}*sqrt({})", self.x / 2, y / 2, self.disc),
            (false, y) => write!(f, "({} + {}*sqrt({}))/2", self.x, y, self.disc),
        }
    }
}

/// A real quadratic field, identified by its squarefree `d > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticField {
    d: i128,
    disc: i128,
    unit: FieldElement,
}

impl QuadraticField {
    pub fn new(d: i128) -> Result<Self, FieldError> {
        if d <= 1 || !is_squarefree(d) {
            return Err(FieldError::NotSquarefree(d));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let unit = compute_fundamental_unit(disc).ok_or(FieldError::UnitOverflow(d))?;
        Ok(QuadraticField { d, disc, unit })
    }

    /// Build the field from its fundamental discriminant (5, 8, 12, 13, ...).
    pub fn from_discriminant(disc: i128) -> Result<Self, FieldError> {
        let d = match disc.rem_euclid(4) {
            1 => disc,
            0 => disc / 4,
            _ => return Err(FieldError::NotFundamental(disc)),
        };
        let field = Self::new(d).map_err(|_| FieldError::NotFundamental(disc))?;
        if field.disc != disc {
            return Err(FieldError::NotFundamental(disc));
        }
        Ok(field)
    }

    pub fn d(&self) -> i128 {
        self.d
    }

    pub fn discriminant(&self) -> i128 {
        self.disc
    }

    pub fn element(&self, x: i128, y: i128) -> Result<FieldElement, FieldError> {
        FieldElement::new(x, y, self.disc)
    }

    pub fn integer(&self, n: i128) -> FieldElement {
        FieldElement::integer(n, self.disc)
    }

    pub fn from_basis(&self, s: i128, t: i128) -> FieldElement {
        FieldElement::from_basis(s, t, self.disc)
    }

    /// `omega = (D + sqrt D)/2`, the second element of the integral basis.
    pub fn omega(&self) -> FieldElement {
        FieldElement::raw(self.disc, 1, self.disc)
    }

    /// `sqrt D`, a generator of the different.
    pub fn sqrt_disc(&self) -> FieldElement {
        FieldElement::raw(0, 2, self.disc)
    }

    /// Generator of the unit group modulo `{+1, -1}`, larger than 1 in the first embedding.
    pub fn fundamental_unit(&self) -> FieldElement {
        self.unit
    }

    pub fn splitting_type(&self, p: u64) -> SplittingType {
        match kronecker(self.disc, p) {
            1 => SplittingType::Split,
            -1 => SplittingType::Inert,
            _ => SplittingType::Ramified,
        }
    }

    /// A totally positive `lambda` with `Nm(lambda) = p`, normalized by unit squares so
    /// that both embeddings lie in `[sqrt(p)/u^2, sqrt(p)*u^2]`, `u` the fundamental unit.
    ///
    /// Among the candidates in that band the one with the smallest larger embedding is
    /// returned; between `lambda` and its conjugate, the one whose first embedding is larger.
    pub fn split_generator(&self, p: u64) -> Option<FieldElement> {
        let p = p as i128;
        let u = self.unit.embed(0);
        let sp = (p as f64).sqrt();
        let (lo, hi) = (sp / (u * u), sp * u * u);
        let sd = (self.disc as f64).sqrt();
        let y_max = ((hi - lo) / sd).ceil() as i128 + 1;
        let mut best: Option<(f64, FieldElement)> = None;
        for y in (-y_max..=y_max).rev() {
            let t = 4 * p + self.disc * y * y;
            let x = isqrt(t);
            if x * x != t {
                continue;
            }
            let Ok(lambda) = self.element(x, y) else { continue };
            if !lambda.is_totally_positive() {
                continue;
            }
            let (e1, e2) = lambda.embeddings();
            let slack = 1e-12 * hi;
            if e1 < lo - slack || e2 < lo - slack || e1 > hi + slack || e2 > hi + slack {
                continue;
            }
            let key = e1.max(e2);
            // y is visited in descending order, so ties keep the larger first embedding
            if best.as_ref().is_none_or(|(k, _)| key < *k - 1e-12 * hi) {
                best = Some((key, lambda));
            }
        }
        best.map(|(_, l)| l)
    }
}

/// floor((p + sqrt d)/q) for a nonsquare d, exactly.
fn floor_surd(p: i128, q: i128, d: i128) -> i128 {
    let guess = ((p as f64 + (d as f64).sqrt()) / q as f64).floor() as i128;
    // value >= n  <=>  (p + sqrt d)/q >= n
    let ge = |n: i128| -> bool {
        let t = n * q - p;
        if q > 0 {
            // sqrt d >= t
            t <= 0 || t * t < d
        } else {
            // sqrt d <= t
            t > 0 && t * t > d
        }
    };
    let mut n = guess;
    while !ge(n) {
        n -= 1;
    }
    while ge(n + 1) {
        n += 1;
    }
    n
}

/// Continued-fraction expansion of `omega0 = (sigma + sqrt D)/2`; the first convergent
/// `p/q` with `|Nm(p - q*omega0')| = 1` gives the fundamental unit `p - q*omega0'`.
fn compute_fundamental_unit(disc: i128) -> Option<FieldElement> {
    let sigma = disc.rem_euclid(2);
    let (mut pk, mut qk) = (sigma, 2i128);
    let (mut p_prev, mut p_cur) = (0i128, 1i128);
    let (mut q_prev, mut q_cur) = (1i128, 0i128);
    for _ in 0..100_000 {
        let a = floor_surd(pk, qk, disc);
        let p_next = a.checked_mul(p_cur)?.checked_add(p_prev)?;
        let q_next = a.checked_mul(q_cur)?.checked_add(q_prev)?;
        (p_prev, p_cur) = (p_cur, p_next);
        (q_prev, q_cur) = (q_cur, q_next);
        if q_cur > 0 {
            let x = 2i128.checked_mul(p_cur)?.checked_sub(q_cur * sigma)?;
            let eta = FieldElement::raw(x, q_cur, disc);
            let n = eta.checked_mul(&eta.conjugate())?.x / 2;
            if n.abs() == 1 {
                return Some(eta);
            }
        }
        let p_new = a * qk - pk;
        let q_new = (disc - p_new * p_new) / qk;
        pk = p_new;
        qk = q_new;
    }
    None
}
