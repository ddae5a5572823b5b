//! Scans over prime ranges, the curve registry, CSV/JSON persistence and aggregate reports.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{gcd, hermite_rows, isqrt, kronecker, primes_in};
use crate::frob::{frobenius_record, Genus2Curve, Histogram2D};
use crate::hecke::{proximity, ModularGroup, PointH2};
use crate::hzdiv::{compact_family, enumerate_components, hz_is_compact, hz_nonempty, ComponentMatrix, PolarizationModulus};
use crate::numberfield::QuadraticField;
use crate::spend::{enumerate_short, filtration_lattice, FiltrationModel, QuadLattice};

pub const BUILTIN_REGISTRY: &str = include_str!("../data/registry.txt");
pub const CSV_HEADER: [&str; 11] =
    ["p", "mode", "a1", "a2", "s1", "s2", "class", "min_proximity", "neglog_sum", "depth", "status"];

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("registry error: {0}")]
    Registry(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ScanError {
    /// Process exit code: 2 for configuration problems, 3 for registry problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScanError::Registry(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "satotate")]
    SatoTate,
    #[serde(rename = "heckenear")]
    HeckeNear,
    #[serde(rename = "lattice-bench")]
    LatticeBench,
    #[serde(rename = "hz-audit")]
    HzAudit,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::SatoTate => "satotate",
            Mode::HeckeNear => "heckenear",
            Mode::LatticeBench => "lattice-bench",
            Mode::HzAudit => "hz-audit",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = ScanError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Mode::SatoTate, Mode::HeckeNear, Mode::LatticeBench, Mode::HzAudit]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ScanError::Config(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub label: String,
    pub coefficients: Vec<i64>,
    pub discriminant: i64,
    pub note: String,
}

impl RegistryEntry {
    pub fn curve(&self) -> Result<Genus2Curve, ScanError> {
        Genus2Curve::new(self.coefficients.clone(), Some(self.label.clone()))
            .map_err(|e| ScanError::Registry(format!("{}: {e}", self.label)))
    }
}

/// Lines `label, coefficients (ascending, space separated), D, note`; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
}

impl Registry {
    pub fn parse(text: &str) -> Result<Self, ScanError> {
        let mut entries: Vec<RegistryEntry> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| ScanError::Registry(format!("line {}: {what}", no + 1));
            let parts: Vec<&str> = line.splitn(4, ',').map(str::trim).collect();
            if parts.len() < 3 {
                return Err(bad("expected label, coefficients, D[, note]"));
            }
            let coefficients = parts[1]
                .split_whitespace()
                .map(|c| c.parse::<i64>().map_err(|_| bad(&format!("bad coefficient {c:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let discriminant = parts[2].parse::<i64>().map_err(|_| bad(&format!("bad discriminant {:?}", parts[2])))?;
            if entries.iter().any(|e| e.label == parts[0]) {
                return Err(bad(&format!("duplicate label {}", parts[0])));
            }
            let entry = RegistryEntry {
                label: parts[0].to_string(),
                coefficients,
                discriminant,
                note: parts.get(3).unwrap_or(&"").to_string(),
            };
            entry.curve()?;
            entries.push(entry);
        }
        Ok(Registry { entries })
    }

    pub fn builtin() -> Self {
        Registry::parse(BUILTIN_REGISTRY).expect("builtin registry parses")
    }

    pub fn get(&self, label: &str) -> Result<&RegistryEntry, ScanError> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| ScanError::Registry(format!("unknown curve label {label:?}")))
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub mode: Mode,
    /// Real quadratic field discriminant (heckenear, hz-audit).
    pub discriminant: i64,
    /// Registry label (satotate).
    pub curve: Option<String>,
    /// Range `[nmin, nmax]`; `nmin` defaults to `⌈√nmax⌉`.
    pub nmin: Option<u64>,
    pub nmax: u64,
    pub epsilon: f64,
    pub seed: u64,
    /// Base point of the Hecke orbits.
    pub base_point: [f64; 4],
    /// Height bound for divisor components in heckenear mode.
    pub component_height: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            mode: Mode::SatoTate,
            discriminant: 5,
            curve: None,
            nmin: None,
            nmax: 100,
            epsilon: 0.1,
            seed: 0,
            base_point: [0.3, 1.1, -0.2, 0.9],
            component_height: 10.0,
        }
    }
}

impl ScanConfig {
    pub fn range(&self) -> (u64, u64) {
        let lo = self.nmin.unwrap_or_else(|| {
            let r = isqrt(self.nmax as i128) as u64;
            if r * r == self.nmax { r } else { r + 1 }
        });
        (lo, self.nmax)
    }

    fn field(&self) -> Result<QuadraticField, ScanError> {
        QuadraticField::from_discriminant(self.discriminant as i128)
            .map_err(|e| ScanError::Config(format!("discriminant {}: {e}", self.discriminant)))
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(ScanError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.component_height.is_finite() && self.component_height > 0.0) {
            return Err(ScanError::Config("component height must be positive".into()));
        }
        match self.mode {
            Mode::SatoTate if self.curve.is_none() => Err(ScanError::Config("satotate mode needs --curve".into())),
            Mode::HeckeNear | Mode::HzAudit => self.field().map(|_| ()),
            _ => Ok(()),
        }
    }

    /// `⌈3 e_v log log N⌉`.
    pub fn loglog_threshold(&self, e_v: u64) -> u64 {
        let n = (self.nmax.max(3)) as f64;
        (3.0 * e_v as f64 * n.ln().ln()).ceil() as u64
    }

    /// `⌈e_v log N / log ℓ⌉`.
    pub fn log_threshold(&self, e_v: u64, ell: u64) -> u64 {
        (e_v as f64 * (self.nmax.max(2) as f64).ln() / (ell as f64).ln()).ceil() as u64
    }
}

/// One row of scan output. Timing is not recorded so that output bytes are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub p: u64,
    pub mode: Mode,
    pub a1: Option<i64>,
    pub a2: Option<i64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub class: Option<String>,
    pub min_proximity: Option<f64>,
    pub neglog_sum: Option<f64>,
    pub depth: Option<u64>,
    pub status: String,
}

impl ScanRecord {
    fn empty(p: u64, mode: Mode, status: impl Into<String>) -> Self {
        ScanRecord {
            p,
            mode,
            a1: None,
            a2: None,
            s1: None,
            s2: None,
            class: None,
            min_proximity: None,
            neglog_sum: None,
            depth: None,
            status: status.into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn run_scan(config: &ScanConfig, registry: &Registry) -> Result<Vec<ScanRecord>, ScanError> {
    config.validate()?;
    let (lo, hi) = config.range();
    if lo > hi {
        return Ok(Vec::new());
    }
    match config.mode {
        Mode::SatoTate => satotate(config, registry, lo, hi),
        Mode::HeckeNear => heckenear(config, lo, hi),
        Mode::LatticeBench => Ok(primes_in(lo.max(2), hi).into_iter().map(|ell| lattice_bench(config, ell)).collect()),
        Mode::HzAudit => hz_audit(config, lo, hi),
    }
}

fn satotate(config: &ScanConfig, registry: &Registry, lo: u64, hi: u64) -> Result<Vec<ScanRecord>, ScanError> {
    let entry = registry.get(config.curve.as_deref().unwrap_or_default())?;
    let curve = entry.curve()?;
    Ok(primes_in(lo.max(3), hi)
        .into_iter()
        .map(|p| {
            let r = frobenius_record(&curve, entry.discriminant, p);
            let mut rec = ScanRecord::empty(p, Mode::SatoTate, "ok");
            match (r.data, r.class) {
                (Some(d), Some(c)) => {
                    rec.a1 = Some(d.a1);
                    rec.a2 = Some(d.a2);
                    rec.s1 = Some(c.svalues.0);
                    rec.s2 = Some(c.svalues.1);
                    rec.class = Some(c.kind.to_string());
                }
                _ => {
                    rec.class = Some("bad".into());
                    rec.status = format!("skip: {}", r.skipped.unwrap_or_default());
                }
            }
            rec
        })
        .collect())
}

/// Components of `T(r)` used by heckenear mode: the smallest compact index `qD`.
pub fn heckenear_components(config: &ScanConfig) -> Result<(i128, Vec<ComponentMatrix>), ScanError> {
    let field = config.field()?;
    let r = *compact_family(&field, 1000)
        .first()
        .ok_or_else(|| ScanError::Config("no compact Hirzebruch-Zagier index found".into()))?;
    Ok((r, enumerate_components(r, &field, PolarizationModulus::default(), config.component_height)))
}

/// `min_M proximity(w, M)` over the configured components.
pub fn orbit_point_proximity(w: &PointH2, components: &[ComponentMatrix]) -> f64 {
    components.iter().map(|m| proximity(w, m)).fold(f64::INFINITY, f64::min)
}

fn heckenear(config: &ScanConfig, lo: u64, hi: u64) -> Result<Vec<ScanRecord>, ScanError> {
    let field = config.field()?;
    let [x1, y1, x2, y2] = config.base_point;
    let z = PointH2::new(Complex64::new(x1, y1), Complex64::new(x2, y2))
        .map_err(|e| ScanError::Config(format!("base point: {e}")))?;
    let (_, components) = heckenear_components(config)?;
    if components.is_empty() {
        return Err(ScanError::Config("no divisor components below the height bound".into()));
    }
    let group = ModularGroup::new(field);
    let disc = field.discriminant();
    Ok(primes_in(lo.max(2), hi)
        .into_iter()
        .map(|p| {
            let mut rec = ScanRecord::empty(p, Mode::HeckeNear, "ok");
            if kronecker(disc, p) != 1 {
                rec.status = "skip: not split".into();
                return rec;
            }
            let Some(lambda) = field.split_generator(p) else {
                rec.status = "skip: no totally positive generator".into();
                return rec;
            };
            match group.hecke_orbit(&z, p, &lambda) {
                Ok(orbit) => {
                    let prox: Vec<f64> = orbit.iter().map(|w| orbit_point_proximity(w, &components)).collect();
                    rec.min_proximity = Some(prox.iter().copied().fold(f64::INFINITY, f64::min));
                    rec.neglog_sum = Some(prox.iter().map(|x| -x.ln()).sum());
                }
                Err(e) => rec.status = format!("error: {e}"),
            }
            rec
        })
        .collect())
}

/// `−Σ log proximity ≥ ε p log p`.
pub fn archimedean_flag(rec: &ScanRecord, epsilon: f64) -> Option<bool> {
    let p = rec.p as f64;
    rec.neglog_sum.map(|s| s >= epsilon * p * p.ln())
}

fn random_model(rng: &mut ChaCha8Rng, ell: u64) -> FiltrationModel {
    loop {
        let a: Vec<Vec<i128>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let gram: Vec<Vec<i128>> =
            (0..4).map(|i| (0..4).map(|j| (0..4).map(|k| a[k][i] * a[k][j]).sum()).collect()).collect();
        let Ok(m) = QuadLattice::from_gram(gram) else { continue };
        let v: Vec<i128> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().fold(0, |g, &x| gcd(g, x)) != 1 {
            continue;
        }
        let e_v = rng.gen_range(1..=2);
        if let Ok(model) = FiltrationModel::new(m, vec![v], ell, e_v, 1) {
            return model;
        }
    }
}

/// Largest level `n` at which `M_n` still holds a vector of norm `≤ N` outside `Λ ⊗ Q`; 0 if none.
pub fn contact_depth(model: &FiltrationModel, big_n: i128) -> u64 {
    let mut depth = 0;
    for k in 0..64u32 {
        if (model.ell as f64).powi(k as i32) > 1e12 {
            break;
        }
        let n = model.n0 + k as u64 * model.e_v;
        let Ok(lat) = filtration_lattice(model, n) else { break };
        let outside = enumerate_short(&lat, big_n).into_iter().any(|(v, _)| {
            let mut rows = model.lambda.clone();
            rows.push(v);
            hermite_rows(&rows).len() > model.lambda.len()
        });
        if !outside {
            break;
        }
        depth = n;
    }
    depth
}

fn lattice_bench(config: &ScanConfig, ell: u64) -> ScanRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ ell.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let model = random_model(&mut rng, ell);
    let mut rec = ScanRecord::empty(ell, Mode::LatticeBench, "ok");
    rec.depth = Some(contact_depth(&model, config.nmax as i128));
    rec.class = Some(format!("e_v={}", model.e_v));
    rec
}

/// An explicit component `(D, γ; γ', b)` of `T(r)` with `γ` in a fundamental box mod `D`.
pub fn hz_witness(r: i128, field: &QuadraticField) -> Option<ComponentMatrix> {
    let d = field.discriminant();
    let modulus = PolarizationModulus::default();
    (0..d).flat_map(|s| (0..d).map(move |t| (s, t))).find_map(|(s, t)| {
        let gamma = field.from_basis(s, t);
        let n = gamma.norm() + r;
        if n.rem_euclid(d) != 0 {
            return None;
        }
        ComponentMatrix::new(d, n / d, gamma, modulus).ok().filter(|m| m.det() == r)
    })
}

fn hz_audit(config: &ScanConfig, lo: u64, hi: u64) -> Result<Vec<ScanRecord>, ScanError> {
    let field = config.field()?;
    let modulus = PolarizationModulus::default();
    Ok((lo.max(1)..=hi)
        .map(|r| {
            let ri = r as i128;
            let predicate = hz_nonempty(ri, &field, modulus);
            let witness = hz_witness(ri, &field).is_some();
            let mut rec = ScanRecord::empty(r, Mode::HzAudit, if predicate == witness { "ok" } else { "mismatch" });
            let compact = hz_is_compact(ri, &field).unwrap_or(false);
            rec.class = Some(format!(
                "{}{}",
                if predicate { "nonempty" } else { "empty" },
                if compact { ";compact" } else { "" }
            ));
            rec
        })
        .collect())
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn write_csv<W: io::Write>(records: &[ScanRecord], out: W) -> Result<(), ScanError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.p.to_string(),
            r.mode.to_string(),
            opt(&r.a1),
            opt(&r.a2),
            opt(&r.s1),
            opt(&r.s2),
            opt(&r.class),
            opt(&r.min_proximity),
            opt(&r.neglog_sum),
            opt(&r.depth),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<ScanRecord>, ScanError> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(CSV_HEADER) {
        return Err(ScanError::Config("unexpected CSV header".into()));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("").to_string();
        fn parse<T: FromStr>(s: String) -> Result<Option<T>, ScanError> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| ScanError::Config(format!("bad CSV value {s:?}")))
        }
        let p = parse(field(0))?.ok_or_else(|| ScanError::Config("missing p".into()))?;
        out.push(ScanRecord {
            p,
            mode: field(1).parse()?,
            a1: parse(field(2))?,
            a2: parse(field(3))?,
            s1: parse(field(4))?,
            s2: parse(field(5))?,
            class: Some(field(6)).filter(|s| !s.is_empty()),
            min_proximity: parse(field(7))?,
            neglog_sum: parse(field(8))?,
            depth: parse(field(9))?,
            status: field(10),
        });
    }
    Ok(out)
}

pub fn write_json<W: io::Write>(records: &[ScanRecord], mut out: W) -> Result<(), ScanError> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json<R: io::Read>(input: R) -> Result<Vec<ScanRecord>, ScanError> {
    Ok(serde_json::from_reader(input)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitGrowthRow {
    pub x: u64,
    pub split_count: u64,
    pub sum_inv_sqrt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub mode: Mode,
    pub threshold: String,
    pub exceeding: u64,
    pub total: u64,
}

/// Aggregates computed from records alone (plus thresholds from the config).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub class_counts: BTreeMap<String, u64>,
    pub status_counts: BTreeMap<String, u64>,
    pub split_growth: Vec<SplitGrowthRow>,
    pub histogram: Histogram2D,
    pub thresholds: Vec<ThresholdRow>,
    pub proximity: Vec<(u64, f64, f64)>,
}

fn is_split_class(c: &str) -> bool {
    c.starts_with("split_rational") || c == "split_equal"
}

pub fn report(records: &[ScanRecord], config: &ScanConfig) -> Report {
    let mut class_counts = BTreeMap::new();
    let mut status_counts = BTreeMap::new();
    let mut split_growth = Vec::new();
    let mut histogram = Histogram2D::new(20);
    let (mut split, mut sum) = (0u64, 0.0f64);
    let mut eps_hits = (0u64, 0u64);
    let mut loglog_hits = (0u64, 0u64);
    let mut log_hits = (0u64, 0u64);
    let mut proximity = Vec::new();
    for r in records {
        let status = r.status.split(':').next().unwrap_or("").to_string();
        *status_counts.entry(status).or_insert(0) += 1;
        match r.mode {
            Mode::SatoTate => {
                let class = r.class.clone().unwrap_or_default();
                let key = class.split('(').next().unwrap_or("").to_string();
                *class_counts.entry(key).or_insert(0) += 1;
                sum += 1.0 / (r.p as f64).sqrt();
                if is_split_class(&class) {
                    split += 1;
                }
                if let (Some(s1), Some(s2)) = (r.s1, r.s2) {
                    histogram.add(s1, s2);
                }
                split_growth.push(SplitGrowthRow { x: r.p, split_count: split, sum_inv_sqrt: sum });
            }
            Mode::HeckeNear => {
                if let (Some(flag), Some(m), Some(s)) = (archimedean_flag(r, config.epsilon), r.min_proximity, r.neglog_sum) {
                    eps_hits.0 += flag as u64;
                    eps_hits.1 += 1;
                    proximity.push((r.p, m, s));
                }
            }
            Mode::LatticeBench => {
                if let Some(depth) = r.depth {
                    let e_v = r.class.as_deref().and_then(|c| c.strip_prefix("e_v=")).and_then(|s| s.parse().ok()).unwrap_or(1);
                    loglog_hits.0 += (depth >= config.loglog_threshold(e_v)) as u64;
                    loglog_hits.1 += 1;
                    log_hits.0 += (depth >= config.log_threshold(e_v, r.p)) as u64;
                    log_hits.1 += 1;
                }
            }
            Mode::HzAudit => {
                *class_counts.entry(r.class.clone().unwrap_or_default()).or_insert(0) += 1;
            }
        }
    }
    let mut thresholds = Vec::new();
    if eps_hits.1 > 0 {
        thresholds.push(ThresholdRow {
            mode: Mode::HeckeNear,
            threshold: format!("neglog_sum >= {} p log p", config.epsilon),
            exceeding: eps_hits.0,
            total: eps_hits.1,
        });
    }
    if loglog_hits.1 > 0 {
        thresholds.push(ThresholdRow {
            mode: Mode::LatticeBench,
            threshold: "depth >= ceil(3 e_v log log N)".into(),
            exceeding: loglog_hits.0,
            total: loglog_hits.1,
        });
        thresholds.push(ThresholdRow {
            mode: Mode::LatticeBench,
            threshold: "depth >= ceil(e_v log N / log l)".into(),
            exceeding: log_hits.0,
            total: log_hits.1,
        });
    }
    Report { class_counts, status_counts, split_growth, histogram, thresholds, proximity }
}

impl Report {
    /// Plain-text document with one CSV-style table per section; headers are always present.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# class counts\nclass,count");
        for (k, v) in &self.class_counts {
            let _ = writeln!(s, "{k},{v}");
        }
        let _ = writeln!(s, "\n# status counts\nstatus,count");
        for (k, v) in &self.status_counts {
            let _ = writeln!(s, "{k},{v}");
        }
        let _ = writeln!(s, "\n# split primes vs sum of 1/sqrt(l)\nx,split_count,sum_inv_sqrt,ratio");
        for r in &self.split_growth {
            let _ = writeln!(s, "{},{},{:.12},{:.6}", r.x, r.split_count, r.sum_inv_sqrt, r.split_count as f64 / r.sum_inv_sqrt);
        }
        let _ = writeln!(s, "\n# (s1,s2) histogram against the normalized product-semicircle density\ni,j,s1_lo,s2_lo,observed,observed_frac,expected_frac");
        let total = self.histogram.total();
        if total > 0 {
            let w = 4.0 / self.histogram.bins as f64;
            for i in 0..self.histogram.bins {
                for j in 0..self.histogram.bins {
                    let c = self.histogram.counts[i][j];
                    let _ = writeln!(
                        s,
                        "{i},{j},{:.2},{:.2},{c},{:.6},{:.6}",
                        -2.0 + i as f64 * w,
                        -2.0 + j as f64 * w,
                        c as f64 / total as f64,
                        self.histogram.expected_mass(i, j)
                    );
                }
            }
        }
        let _ = writeln!(s, "\n# threshold exceedances\nmode,threshold,exceeding,total,fraction");
        for t in &self.thresholds {
            let _ = writeln!(s, "{},{},{},{},{:.6}", t.mode, t.threshold, t.exceeding, t.total, t.exceeding as f64 / t.total as f64);
        }
        let _ = writeln!(s, "\n# hecke proximity per prime\np,min_proximity,neglog_sum");
        for (p, m, n) in &self.proximity {
            let _ = writeln!(s, "{p},{m},{n}");
        }
        s
    }
}
