//! Small exact integer helpers shared by the field, form and lattice code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Floor square root of a nonnegative integer.
pub fn isqrt(n: i128) -> i128 {
    assert!(n >= 0, "isqrt of negative value {n}");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    // f64 is only accurate to ~53 bits; walk to the exact floor.
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n);
        r * r == n
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    if n >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2) as usize..=n)
        .filter(|&k| sieve[k])
        .map(|k| k as u64)
        .collect()
}

/// Prime factorization as (prime, exponent) pairs, ascending. `n` must be nonzero.
pub fn factor(n: u128) -> Vec<(u128, u32)> {
    assert!(n != 0);
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2u128;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: i128) -> bool {
    n != 0 && factor(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i128, p: u64) -> i32 {
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (D/p) for a discriminant D and a prime p.
pub fn kronecker(d: i128, p: u64) -> i32 {
    if p == 2 {
        if d.rem_euclid(2) == 0 {
            0
        } else if matches!(d.rem_euclid(8), 1 | 7) {
            1
        } else {
            -1
        }
    } else {
        legendre(d, p)
    }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: i128, p: i128) -> u32 {
    assert!(n != 0 && p > 1);
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Floor division for signed integers.
pub fn div_floor(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

/// Hermite normal form of the row lattice spanned by `rows`: nonzero rows only, echelon,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let mut m: Vec<Vec<i128>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == m.len() {
            break;
        }
        loop {
            // bring the smallest nonzero entry of this column (below pivot_row) to pivot_row
            let best = (pivot_row..m.len())
                .filter(|&i| m[i][col] != 0)
                .min_by_key(|&i| m[i][col].abs());
            let Some(best) = best else { break };
            m.swap(pivot_row, best);
            let mut done = true;
            for i in pivot_row + 1..m.len() {
                if m[i][col] != 0 {
                    let q = div_floor(m[i][col], m[pivot_row][col]);
                    for j in 0..ncols {
                        m[i][j] -= q * m[pivot_row][j];
                    }
                    if m[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][col] == 0 {
            continue;
        }
        if m[pivot_row][col] < 0 {
            for x in m[pivot_row].iter_mut() {
                *x = -*x;
            }
        }
        let pv = m[pivot_row][col];
        for i in 0..pivot_row {
            let q = div_floor(m[i][col], pv);
            for j in 0..ncols {
                m[i][j] -= q * m[pivot_row][j];
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m
}

/// Membership of `v` in the row lattice of a Hermite basis produced by [`hermite_rows`].
pub fn in_row_lattice(hnf: &[Vec<i128>], v: &[i128]) -> bool {
    let mut v = v.to_vec();
    for row in hnf {
        let Some(c) = row.iter().position(|&x| x != 0) else { continue };
        if v[c] % row[c] != 0 {
            return false;
        }
        let q = v[c] / row[c];
        for (x, r) in v.iter_mut().zip(row) {
            *x -= q * r;
        }
    }
    v.iter().all(|&x| x == 0)
}

/// A basis of the integer kernel `{x : A x = 0}`, saturated in `Z^n`.
pub fn integer_kernel(a: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    let k = a.len();
    let rows: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            let mut r: Vec<i128> = a.iter().map(|row| row[i]).collect();
            r.extend((0..n).map(|j| i128::from(i == j)));
            r
        })
        .collect();
    hermite_rows(&rows)
        .into_iter()
        .filter(|r| r[..k].iter().all(|&x| x == 0))
        .map(|r| r[k..].to_vec())
        .collect()
}

/// Exact determinant of a square integer matrix (fraction-free elimination in big integers).
pub fn det_big(m: &[Vec<i128>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate { -d } else { d }
}

/// [`det_big`] narrowed to `i128`; panics if the determinant does not fit.
pub fn det_int(m: &[Vec<i128>]) -> i128 {
    det_big(m).to_i128().expect("determinant exceeds i128")
}

/// Nonzero Smith invariants `d_1 | d_2 | ...` of an integer matrix.
pub fn smith_invariants(rows: &[Vec<i128>]) -> Vec<i128> {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let nr = m.len();
    let nc = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut k = 0;
    while k < nr.min(nc) {
        let pos = (k..nr)
            .flat_map(|i| (k..nc).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = pos else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        let pv = m[k][k];
        let mut clean = true;
        for i in k + 1..nr {
            let q = m[i][k] / pv;
            for j in k..nc {
                m[i][j] -= q * m[k][j];
            }
            clean &= m[i][k] == 0;
        }
        for j in k + 1..nc {
            let q = m[k][j] / pv;
            for i in k..nr {
                m[i][j] -= q * m[i][k];
            }
            clean &= m[k][j] == 0;
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest of the block
        let bad = (k + 1..nr).flat_map(|i| (k + 1..nc).map(move |j| (i, j))).find(|&(i, j)| m[i][j] % pv != 0);
        if let Some((i, _)) = bad {
            for j in k..nc {
                m[k][j] += m[i][j];
            }
            continue;
        }
        out.push(pv.abs());
        k += 1;
    }
    out
}
