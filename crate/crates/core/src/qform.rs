//! Positive definite integral binary quadratic forms `a x^2 + b xy + c y^2`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::isqrt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QFormError {
    #[error("form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },
    #[error("discriminant {0} must be negative and congruent to 0 or 1 mod 4")]
    BadDiscriminant(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryQF {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for BinaryQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl BinaryQF {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, QFormError> {
        let q = BinaryQF { a, b, c };
        if a <= 0 || q.discriminant() >= 0 {
            return Err(QFormError::NotPositiveDefinite { a, b, c });
        }
        Ok(q)
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn content(&self) -> i64 {
        crate::arith::gcd(crate::arith::gcd(self.a as i128, self.b as i128), self.c as i128) as i64
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// The form divided by its content.
    pub fn primitive_part(&self) -> BinaryQF {
        let g = self.content();
        BinaryQF { a: self.a / g, b: self.b / g, c: self.c / g }
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// Gauss-reduced representative of the `SL_2(Z)` class.
    pub fn reduce(&self) -> Result<BinaryQF, QFormError> {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        if a <= 0 || self.discriminant() >= 0 {
            return Err(QFormError::NotPositiveDefinite { a, b, c });
        }
        loop {
            // translate b into (-a, a]
            if b > a || b <= -a {
                let k = (a - b).div_euclid(2 * a);
                c += k * (b + k * a);
                b += 2 * k * a;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return Ok(BinaryQF { a, b, c });
        }
    }

    /// Search box `|x| <= sqrt(4cn/|disc|)`, `|y| <= sqrt(4an/|disc|)` from completing the square.
    fn search_box(&self, n: i64) -> (i64, i64) {
        let d = -self.discriminant() as i128;
        let n = n as i128;
        let xb = isqrt(4 * self.c as i128 * n / d) + 1;
        let yb = isqrt(4 * self.a as i128 * n / d) + 1;
        (xb as i64, yb as i64)
    }
}

/// 0, 1, -1, 2, -2, ...
fn zigzag(bound: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=bound).flat_map(|k| [k, -k]))
}

/// Primitive reduced forms of discriminant `disc`, sorted.
pub fn reduced_forms(disc: i64) -> Result<Vec<BinaryQF>, QFormError> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(QFormError::BadDiscriminant(disc));
    }
    let abs = -disc;
    let a_max = isqrt(abs as i128 / 3) as i64;
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in -a..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let q = BinaryQF { a, b, c };
            if q.is_reduced() && q.is_primitive() {
                out.push(q);
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn class_number(disc: i64) -> Result<u64, QFormError> {
    Ok(reduced_forms(disc)?.len() as u64)
}

/// A witness `(x, y)` with `Q(x, y) = n`, searched in the order 0, 1, -1, 2, -2, ...
pub fn represents(q: &BinaryQF, n: i64) -> Option<(i64, i64)> {
    if n < 0 {
        return None;
    }
    let (xb, yb) = q.search_box(n);
    for x in zigzag(xb) {
        for y in zigzag(yb) {
            if q.eval(x, y) == n {
                return Some((x, y));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalCount {
    /// Integers in `[sqrt N, N]` represented by the form.
    pub count: u64,
    /// `1 + 4 sqrt(2N) + 8N / sqrt|disc|`.
    pub bound: f64,
}

/// Count the integers in `[sqrt N, N]` represented by `q`, with the elementary upper bound.
pub fn count_represented_interval(q: &BinaryQF, n: u64) -> IntervalCount {
    let n_i = n as i64;
    let (xb, yb) = q.search_box(n_i);
    let lo = isqrt(n as i128) as i64;
    let lo = if lo * lo == n_i { lo } else { lo + 1 };
    let mut seen = BTreeSet::new();
    for x in -xb..=xb {
        for y in -yb..=yb {
            let v = q.eval(x, y);
            if v >= lo && v <= n_i {
                seen.insert(v);
            }
        }
    }
    let nf = n as f64;
    let bound = 1.0 + 4.0 * (2.0 * nf).sqrt() + 8.0 * nf / (-q.discriminant() as f64).sqrt();
    IntervalCount { count: seen.len() as u64, bound }
}
