//! Geometry of numbers for lattices of special endomorphisms: successive minima, short-vector
//! counts against Schmidt's bound, the ℓ-adic filtration model `Λ + ℓᵏM`, and confinement of
//! short vectors to a rank-2 sublattice.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{det_big, det_int, hermite_rows, in_row_lattice, integer_kernel, is_prime, isqrt, smith_invariants};

pub const MAX_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpendError {
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Gram matrix must be square and symmetric")]
    BadGram,
    #[error("rank {0} exceeds the supported maximum of 4")]
    RankTooLarge(usize),
    #[error("basis vectors are linearly dependent or have the wrong length")]
    BadBasis,
    #[error("sublattice is not primitive")]
    NotPrimitive,
    #[error("sublattice rank {0} exceeds 2")]
    SublatticeRank(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level {n} is not of the form n0 + k·e_v with k ≥ 0 (n0 = {n0}, e_v = {e_v})")]
    BadLevel { n: u64, n0: u64, e_v: u64 },
    #[error("index j = {j} outside 1..={m}")]
    BadIndex { j: usize, m: usize },
    #[error("vector does not lie in the ambient lattice")]
    NotInLattice,
}

/// A positive definite integral lattice, given by a basis inside an ambient `Z^n` with Gram `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadLattice {
    ambient_gram: Vec<Vec<i128>>,
    basis: Vec<Vec<i128>>,
    gram: Vec<Vec<i128>>,
}

fn gram_of(ambient: &[Vec<i128>], basis: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = ambient.len();
    basis
        .iter()
        .map(|u| {
            basis
                .iter()
                .map(|v| (0..n).map(|i| (0..n).map(|j| u[i] * ambient[i][j] * v[j]).sum::<i128>()).sum())
                .collect()
        })
        .collect()
}

fn is_positive_definite(g: &[Vec<i128>]) -> bool {
    (1..=g.len()).all(|k| {
        let minor: Vec<Vec<i128>> = g[..k].iter().map(|r| r[..k].to_vec()).collect();
        det_big(&minor).sign() == num_bigint::Sign::Plus
    })
}

impl QuadLattice {
    /// The lattice `Z^n` with Gram matrix `gram`.
    pub fn from_gram(gram: Vec<Vec<i128>>) -> Result<Self, SpendError> {
        let n = gram.len();
        if n > MAX_RANK {
            return Err(SpendError::RankTooLarge(n));
        }
        if gram.iter().any(|r| r.len() != n) || (0..n).any(|i| (0..n).any(|j| gram[i][j] != gram[j][i])) {
            return Err(SpendError::BadGram);
        }
        if !is_positive_definite(&gram) {
            return Err(SpendError::NotPositiveDefinite);
        }
        let basis = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
        Ok(QuadLattice { ambient_gram: gram.clone(), basis, gram })
    }

    /// The sublattice spanned by `rows` (ambient coordinates); rows must be independent.
    pub fn sublattice(&self, rows: &[Vec<i128>]) -> Result<Self, SpendError> {
        let n = self.ambient_gram.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SpendError::BadBasis);
        }
        let gram = gram_of(&self.ambient_gram, rows);
        if !is_positive_definite(&gram) {
            return Err(SpendError::BadBasis);
        }
        Ok(QuadLattice { ambient_gram: self.ambient_gram.clone(), basis: rows.to_vec(), gram })
    }

    /// The sublattice generated by arbitrary (possibly dependent) rows.
    pub fn span(&self, rows: &[Vec<i128>]) -> Result<Self, SpendError> {
        self.sublattice(&hermite_rows(rows))
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_gram.len()
    }

    pub fn gram(&self) -> &[Vec<i128>] {
        &self.gram
    }

    pub fn basis(&self) -> &[Vec<i128>] {
        &self.basis
    }

    pub fn ambient_gram(&self) -> &[Vec<i128>] {
        &self.ambient_gram
    }

    /// Determinant of the Gram matrix (the square of the covolume).
    pub fn discriminant(&self) -> i128 {
        det_int(&self.gram)
    }

    /// `Q(v)` for `v` in ambient coordinates.
    pub fn q_ambient(&self, v: &[i128]) -> i128 {
        let n = self.ambient_dim();
        (0..n).map(|i| (0..n).map(|j| v[i] * self.ambient_gram[i][j] * v[j]).sum::<i128>()).sum()
    }

    pub fn bilinear_ambient(&self, u: &[i128], v: &[i128]) -> i128 {
        let n = self.ambient_dim();
        (0..n).map(|i| (0..n).map(|j| u[i] * self.ambient_gram[i][j] * v[j]).sum::<i128>()).sum()
    }

    /// Ambient vector with coordinates `c` in this lattice's basis.
    pub fn to_ambient(&self, c: &[i128]) -> Vec<i128> {
        let n = self.ambient_dim();
        (0..n).map(|j| self.basis.iter().zip(c).map(|(row, &x)| x * row[j]).sum()).collect()
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        in_row_lattice(&hermite_rows(&self.basis), v)
    }

    /// The same lattice with an LLL-reduced basis.
    pub fn lll_reduced(&self) -> QuadLattice {
        let t = lll_transform(&self.gram);
        let basis: Vec<Vec<i128>> = t.iter().map(|c| self.to_ambient(c)).collect();
        let gram = gram_of(&self.ambient_gram, &basis);
        QuadLattice { ambient_gram: self.ambient_gram.clone(), basis, gram }
    }
}

/// Rows of a unimodular `T` such that `T G Tᵀ` is LLL-reduced (δ = 0.99).
fn lll_transform(g: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let m = g.len();
    let mut t: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();
    let ip = |t: &Vec<Vec<i128>>, a: usize, b: usize| -> f64 {
        let mut s = 0i128;
        for i in 0..m {
            for j in 0..m {
                s += t[a][i] * g[i][j] * t[b][j];
            }
        }
        s as f64
    };
    let gso = |t: &Vec<Vec<i128>>| {
        let mut mu = vec![vec![0.0; m]; m];
        let mut bstar = vec![0.0; m];
        for i in 0..m {
            for j in 0..i {
                let mut v = ip(t, i, j);
                for k in 0..j {
                    v -= mu[j][k] * mu[i][k] * bstar[k];
                }
                mu[i][j] = v / bstar[j];
            }
            let mut v = ip(t, i, i);
            for k in 0..i {
                v -= mu[i][k] * mu[i][k] * bstar[k];
            }
            bstar[i] = v;
        }
        (mu, bstar)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < m && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gso(&t);
            let q = mu[k][j].round() as i128;
            if q != 0 {
                for c in 0..m {
                    t[k][c] -= q * t[j][c];
                }
            }
        }
        let (mu, bstar) = gso(&t);
        if bstar[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            t.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    t
}

/// Fincke–Pohst over coordinates `1..m` with the first coordinate handled exactly:
/// calls `visit(x, lo, hi)` for every tail `x[1..]` with `x[0]` ranging exactly over `[lo, hi]`.
fn enumerate_tails<F: FnMut(&[i128], i128, i128)>(gram: &[Vec<i128>], bound: i128, mut visit: F) {
    let m = gram.len();
    if m == 0 || bound < 0 {
        return;
    }
    // Q(x) = sum_i d_i (x_i + sum_{j>i} c_ij x_j)^2
    let mut q: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    for i in 0..m {
        for j in i + 1..m {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..m {
            for l in k..m {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let d: Vec<f64> = (0..m).map(|i| q[i][i]).collect();
    let mut x = vec![0i128; m];
    let slack = |r: f64| r * (1.0 + 1e-9) + 1e-7;
    fn rec<F: FnMut(&[i128], i128, i128)>(
        i: usize,
        x: &mut Vec<i128>,
        remaining: f64,
        gram: &[Vec<i128>],
        coef: &[Vec<f64>],
        d: &[f64],
        bound: i128,
        slack: &dyn Fn(f64) -> f64,
        visit: &mut F,
    ) {
        let m = gram.len();
        if i == 0 {
            // exact: g00 x0^2 + 2 b x0 + c <= bound
            let b: i128 = (1..m).map(|j| gram[0][j] * x[j]).sum();
            let c: i128 = (1..m).map(|p| (1..m).map(|q| x[p] * gram[p][q] * x[q]).sum::<i128>()).sum();
            let g = gram[0][0];
            let disc = b * b - g * (c - bound);
            if disc < 0 {
                return;
            }
            let s = isqrt(disc);
            let lo = crate::arith::div_floor(-s - b + g - 1, g);
            let hi = crate::arith::div_floor(s - b, g);
            if lo <= hi {
                visit(x, lo, hi);
            }
            return;
        }
        let center: f64 = -(i + 1..m).map(|j| coef[i][j] * x[j] as f64).sum::<f64>();
        let r = slack(remaining.max(0.0) / d[i]).sqrt();
        let lo = (center - r).ceil() as i128;
        let hi = (center + r).floor() as i128;
        for xi in lo..=hi {
            x[i] = xi;
            let t = xi as f64 - center;
            let used = d[i] * t * t;
            if used <= slack(remaining) {
                rec(i - 1, x, remaining - used, gram, coef, d, bound, slack, visit);
            }
        }
        x[i] = 0;
    }
    rec(m - 1, &mut x, bound as f64, gram, &q, &d, bound, &slack, &mut visit);
}

/// Every vector with `Q ≤ bound`, as (ambient coordinates, Q).
pub fn enumerate_short(l: &QuadLattice, bound: i128) -> Vec<(Vec<i128>, i128)> {
    let red = l.lll_reduced();
    let gram = red.gram();
    let mut out = Vec::new();
    enumerate_tails(gram, bound, |x, lo, hi| {
        for x0 in lo..=hi {
            let mut v = x.to_vec();
            v[0] = x0;
            let q = (0..v.len()).map(|i| (0..v.len()).map(|j| v[i] * gram[i][j] * v[j]).sum::<i128>()).sum();
            out.push((red.to_ambient(&v), q));
        }
    });
    out
}

/// Number of lattice vectors with `Q ≤ bound`, zero included.
pub fn count_short_exact(l: &QuadLattice, bound: i128) -> u64 {
    let mut count = 0u64;
    enumerate_tails(l.lll_reduced().gram(), bound, |_, lo, hi| count += (hi - lo + 1) as u64);
    count
}

/// Successive minima as squared lengths `Q`.
pub fn successive_minima_sq(l: &QuadLattice) -> Vec<i128> {
    let red = l.lll_reduced();
    let m = red.rank();
    let radius = (0..m).map(|i| red.gram()[i][i]).max().unwrap_or(0);
    let mut vecs = enumerate_short(&red, radius);
    vecs.retain(|(_, q)| *q > 0);
    vecs.sort_by_key(|(_, q)| *q);
    let mut chosen: Vec<Vec<i128>> = Vec::new();
    let mut minima = Vec::new();
    for (v, q) in vecs {
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if hermite_rows(&trial).len() == trial.len() {
            chosen = trial;
            minima.push(q);
            if minima.len() == m {
                break;
            }
        }
    }
    minima
}

/// Successive minima as lengths `sqrt(Q)`.
pub fn successive_minima(l: &QuadLattice) -> Vec<f64> {
    successive_minima_sq(l).into_iter().map(|q| (q as f64).sqrt()).collect()
}

/// The frozen constant `c_m = 8^m` in Schmidt's count bound.
pub fn schmidt_constant(m: usize) -> f64 {
    8f64.powi(m as i32)
}

/// `c_m Σ_{j=0}^{m} N^{j/2} / (μ_1 ⋯ μ_j)`.
pub fn schmidt_bound(minima: &[f64], n: f64) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for j in 0..=minima.len() {
        if j > 0 {
            prod *= minima[j - 1];
        }
        sum += n.sqrt().powi(j as i32) / prod;
    }
    schmidt_constant(minima.len()) * sum
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortCount {
    pub count: u64,
    pub bound: f64,
    pub minima: Vec<f64>,
}

pub fn count_short(l: &QuadLattice, n: i128) -> ShortCount {
    let minima = successive_minima(l);
    ShortCount { count: count_short_exact(l, n), bound: schmidt_bound(&minima, n as f64), minima }
}

/// Synthetic model of the special-endomorphism filtration: `M_{n0 + k e_v} = Λ + ℓᵏ M`.
#[derive(Debug, Clone)]
pub struct FiltrationModel {
    pub m: QuadLattice,
    pub lambda: Vec<Vec<i128>>,
    pub ell: u64,
    pub e_v: u64,
    pub n0: u64,
}

fn is_primitive_in(ambient: &QuadLattice, rows: &[Vec<i128>]) -> bool {
    if rows.is_empty() {
        return true;
    }
    // coordinates of the rows in the basis of the ambient lattice
    let Some(coords) = rows.iter().map(|r| coordinates_in(ambient, r)).collect::<Option<Vec<_>>>() else {
        return false;
    };
    let inv = smith_invariants(&coords);
    inv.len() == rows.len() && inv.iter().all(|&d| d == 1)
}

/// Coordinates of an ambient vector in the lattice basis, if it lies in the lattice.
pub fn coordinates_in(l: &QuadLattice, v: &[i128]) -> Option<Vec<i128>> {
    // solve c · B = v by augmenting with an identity block
    let m = l.rank();
    let n = l.ambient_dim();
    let rows: Vec<Vec<i128>> = l
        .basis()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut r = b.clone();
            r.extend((0..m).map(|j| i128::from(i == j)));
            r
        })
        .collect();
    let h = hermite_rows(&rows);
    let mut rest: Vec<i128> = v.to_vec();
    rest.extend(std::iter::repeat_n(0, m));
    for row in &h {
        let Some(c) = row[..n].iter().position(|&x| x != 0) else { continue };
        if rest[c] % row[c] != 0 {
            return None;
        }
        let q = rest[c] / row[c];
        for (x, r) in rest.iter_mut().zip(row) {
            *x -= q * r;
        }
    }
    if rest[..n].iter().any(|&x| x != 0) {
        return None;
    }
    Some(rest[n..].iter().map(|&x| -x).collect())
}

impl FiltrationModel {
    pub fn new(m: QuadLattice, lambda: Vec<Vec<i128>>, ell: u64, e_v: u64, n0: u64) -> Result<Self, SpendError> {
        if !is_prime(ell) {
            return Err(SpendError::NotPrime(ell));
        }
        if e_v == 0 || n0 == 0 {
            return Err(SpendError::BadLevel { n: n0, n0, e_v });
        }
        if lambda.len() > 2 {
            return Err(SpendError::SublatticeRank(lambda.len()));
        }
        if !lambda.is_empty() && hermite_rows(&lambda).len() != lambda.len() {
            return Err(SpendError::BadBasis);
        }
        if !is_primitive_in(&m, &lambda) {
            return Err(SpendError::NotPrimitive);
        }
        Ok(FiltrationModel { m, lambda, ell, e_v, n0 })
    }

    pub fn rank(&self) -> usize {
        self.m.rank()
    }

    pub fn lambda_rank(&self) -> usize {
        self.lambda.len()
    }

    /// `k = (n − n0)/e_v`.
    pub fn step(&self, n: u64) -> Result<u32, SpendError> {
        if n < self.n0 || !(n - self.n0).is_multiple_of(self.e_v) {
            return Err(SpendError::BadLevel { n, n0: self.n0, e_v: self.e_v });
        }
        Ok(((n - self.n0) / self.e_v) as u32)
    }
}

pub fn filtration_lattice(model: &FiltrationModel, n: u64) -> Result<QuadLattice, SpendError> {
    let k = model.step(n)?;
    let scale = (model.ell as i128).pow(k);
    let mut rows = model.lambda.clone();
    rows.extend(model.m.basis().iter().map(|b| b.iter().map(|x| x * scale).collect::<Vec<_>>()));
    model.m.span(&rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    /// `∏_{i≤j} μ_i(M_n) ≥ ℓ^{-m} ℓ^{k(j−m')}`, compared exactly on squares.
    pub product_bound: bool,
    /// `disc(M_{n+e_v}) = ℓ^{2(m−m')} disc(M_n)` for the Gram determinants.
    pub discriminant_step: bool,
    /// `ℓ M_n ⊆ M_{n+e_v}`.
    pub scaled_containment: bool,
    /// `μ_i(M_{n+e_v}) ≤ ℓ μ_i(M_n)` for every i.
    pub minima_step: bool,
    pub minima_sq: Vec<i128>,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.product_bound && self.discriminant_step && self.scaled_containment && self.minima_step
    }
}

fn big(x: i128) -> BigUint {
    BigUint::from(x as u128)
}

pub fn minima_growth_check(model: &FiltrationModel, n: u64, j: usize) -> Result<GrowthReport, SpendError> {
    let m = model.rank();
    if j == 0 || j > m {
        return Err(SpendError::BadIndex { j, m });
    }
    let k = model.step(n)?;
    let mp = model.lambda_rank();
    let cur = filtration_lattice(model, n)?;
    let next = filtration_lattice(model, n + model.e_v)?;
    let mins = successive_minima_sq(&cur);
    let next_mins = successive_minima_sq(&next);
    let ell = big(model.ell as i128);
    // (prod Q_i) · ℓ^{2m} ≥ ℓ^{2k(j−m')}
    let lhs = mins[..j].iter().fold(BigUint::one(), |acc, &q| acc * big(q)) * ell.pow(2 * m as u32);
    let product_bound = if j >= mp {
        lhs >= ell.pow(2 * k * (j - mp) as u32)
    } else {
        lhs * ell.pow(2 * k * (mp - j) as u32) >= BigUint::one()
    };
    let ratio = ell.pow(2 * (m - mp) as u32);
    let discriminant_step = big(next.discriminant()) == big(cur.discriminant()) * ratio;
    let ell_i = model.ell as i128;
    let next_hnf = hermite_rows(next.basis());
    let scaled_containment =
        cur.basis().iter().all(|b| in_row_lattice(&next_hnf, &b.iter().map(|x| x * ell_i).collect::<Vec<_>>()));
    let minima_step = mins.iter().zip(&next_mins).all(|(&a, &b)| b <= ell_i * ell_i * a);
    Ok(GrowthReport { product_bound, discriminant_step, scaled_containment, minima_step, minima_sq: mins })
}

/// Frozen constant for the rank-≤1 count: `2·8^m`, valid for `N ≥ 1`.
pub fn rank_one_constant(m: usize) -> f64 {
    2.0 * schmidt_constant(m)
}

/// `c (N^{1/2} + Σ_{j=2}^{m} N^{j/2} / ℓ^{(j−1)k})`.
pub fn rank_one_count_bound(model: &FiltrationModel, n: u64, big_n: f64) -> Result<f64, SpendError> {
    let k = model.step(n)? as i32;
    let m = model.rank();
    let ell = model.ell as f64;
    let mut s = big_n.sqrt();
    for j in 2..=m as i32 {
        s += big_n.sqrt().powi(j) / ell.powi((j - 1) * k);
    }
    Ok(rank_one_constant(m) * s)
}

/// `P' = P^⊥ ∩ M` and the exponent `s` of `M / (P + P')`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalSplit {
    pub p_perp: Vec<Vec<i128>>,
    pub s: i128,
    /// `s·M ⊆ P + P'`, checked vector by vector.
    pub containment_verified: bool,
}

pub fn orthogonal_split(m: &QuadLattice, p: &[Vec<i128>]) -> Result<OrthogonalSplit, SpendError> {
    let coords: Vec<Vec<i128>> = p.iter().map(|v| coordinates_in(m, v).ok_or(SpendError::NotInLattice)).collect::<Result<_, _>>()?;
    // x ∈ P^⊥ (coordinates in M's basis) iff B(p_i, x) = 0
    let pairing: Vec<Vec<i128>> = p
        .iter()
        .map(|v| m.basis().iter().map(|b| m.bilinear_ambient(v, b)).collect())
        .collect();
    let kernel = integer_kernel(&pairing, m.rank());
    let p_perp: Vec<Vec<i128>> = kernel.iter().map(|c| m.to_ambient(c)).collect();
    let mut joint = coords.clone();
    joint.extend(kernel);
    let inv = smith_invariants(&joint);
    let s = if inv.len() == m.rank() { *inv.iter().max().unwrap_or(&1) } else { 0 };
    let joint_hnf = hermite_rows(&joint);
    let containment_verified = s > 0
        && (0..m.rank()).all(|i| {
            let e: Vec<i128> = (0..m.rank()).map(|j| if i == j { s } else { 0 }).collect();
            in_row_lattice(&joint_hnf, &e)
        });
    Ok(OrthogonalSplit { p_perp, s, containment_verified })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementReport {
    pub split: OrthogonalSplit,
    /// `det Gram(P)`, so that `d^8 = disc_p^4` for the root discriminant `d`.
    pub disc_p: i128,
    /// `ℓ^{2k} > s² d⁸ N`.
    pub condition: bool,
    pub short_vectors: u64,
    /// Short vectors of `P + ℓᵏM` outside `P` (empty when the lemma applies).
    pub escaped: u64,
}

impl ConfinementReport {
    /// The implication "condition ⇒ all short vectors lie in P" holds.
    pub fn holds(&self) -> bool {
        !self.condition || self.escaped == 0
    }
}

pub fn orthogonal_split_confinement(
    m: &QuadLattice,
    p: &[Vec<i128>],
    k: u32,
    ell: u64,
    n: i128,
) -> Result<ConfinementReport, SpendError> {
    if p.len() != 2 {
        return Err(SpendError::SublatticeRank(p.len()));
    }
    if hermite_rows(p).len() != 2 {
        return Err(SpendError::BadBasis);
    }
    if !is_primitive_in(m, p) {
        return Err(SpendError::NotPrimitive);
    }
    let split = orthogonal_split(m, p)?;
    let p_lat = m.sublattice(p)?;
    let disc_p = p_lat.discriminant();
    let lhs = BigUint::from(ell).pow(2 * k);
    let rhs = big(split.s).pow(2) * big(disc_p).pow(4) * big(n.max(0));
    let condition = lhs > rhs;
    let scale = (ell as i128).pow(k);
    let mut rows = p.to_vec();
    rows.extend(m.basis().iter().map(|b| b.iter().map(|x| x * scale).collect::<Vec<_>>()));
    let mn = m.span(&rows)?;
    let p_hnf = hermite_rows(p);
    let mut short_vectors = 0;
    let mut escaped = 0;
    for (v, _) in enumerate_short(&mn, n) {
        short_vectors += 1;
        if !in_row_lattice(&p_hnf, &v) {
            escaped += 1;
        }
    }
    Ok(ConfinementReport { split, disc_p, condition, short_vectors, escaped })
}

/// `log_ℓ` of an integer ratio, for reporting.
pub fn log_ratio(a: i128, b: i128, ell: u64) -> f64 {
    ((a as f64) / (b as f64)).ln() / (ell as f64).ln()
}

/// Covolume `sqrt(det Gram)`.
pub fn covolume(l: &QuadLattice) -> f64 {
    BigUint::from(l.discriminant() as u128).to_f64().unwrap_or(f64::INFINITY).sqrt()
}
