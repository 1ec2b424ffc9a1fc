//! Norm-equation sieve for `R_{p*}`.
//!
//! If `l` is the smallest prime splitting in `L = Q(sqrt(p* q))` and the
//! exponent of `Cl(L)` divides `2u`, then `l^u` or `p l^u` is a norm from
//! `L`, so `D' = A X^2 - B l^u` equals the discriminant of `L` times a square
//! for some small `X`. For each odd prime `l` the admissible `X` are
//! enumerated through a tree of residue classes: at every odd prime `r < l`
//! only classes where `D'` is not a nonzero square mod `r` survive, since `r`
//! may not split. Survivors are factored and checked exactly.
//!
//! Under ERH the loop over `l` stops once `l` exceeds the Bach-Sorenson bound
//! for discriminants of size `4 l^u p`.

use std::collections::{BTreeSet, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_prime, isqrt, kronecker, primes_below, product_discriminant, PrimeStarDiscriminant};
use crate::bqf::{reduce_definite, ClassGroupCache, QuadForm};
use crate::error::{Error, Result};

pub use crate::families::redei_filter;

/// `(1.881 ln|D| + 6.18)^2`, the ERH bound for the least split prime.
pub fn bach_sorenson(d: f64) -> f64 {
    let t = 1.881 * d.abs().ln() + 6.18;
    t * t
}

/// Order of the class of a prime ideal above `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    U,
    TwoU,
}

/// Condition on `l` under which an `X`-congruence applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LCondition {
    Always,
    /// `l mod m` in the listed residues.
    LMod { modulus: u64, residues: &'static [u64] },
    /// `l p mod m` in the listed residues.
    LpMod { modulus: u64, residues: &'static [u64] },
}

impl LCondition {
    fn holds(self, l: u64, p: u64) -> bool {
        match self {
            LCondition::Always => true,
            LCondition::LMod { modulus, residues } => residues.contains(&(l % modulus)),
            LCondition::LpMod { modulus, residues } => {
                residues.contains(&((l as u128 * p as u128 % modulus as u128) as u64))
            }
        }
    }
}

/// `X = residue mod modulus`, required when `when` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XCongruence {
    pub residue: u64,
    pub modulus: u64,
    pub when: LCondition,
}

/// `x_coeff X^2 - rhs_coeff l^u = d Y^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveEquation {
    pub x_coeff: i128,
    pub rhs_coeff: i128,
    pub congruences: Vec<XCongruence>,
}

/// One of the six cases: by the shape of `p*` and the order of the ideal above `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveCase {
    pub case_id: u8,
    pub order: Order,
    pub legendre_requirement: Option<i8>,
    pub equations: Vec<SieveEquation>,
}

/// One equation with one congruence, specialized to a given `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    pub case_id: u8,
    pub x_coeff: i128,
    pub rhs_coeff: i128,
    pub residue: u64,
    pub modulus: u64,
}

const ODD: XCongruence = XCongruence { residue: 1, modulus: 2, when: LCondition::Always };

fn cong(residue: u64, modulus: u64, when: LCondition) -> XCongruence {
    XCongruence { residue, modulus, when }
}

fn l_mod(modulus: u64, residues: &'static [u64]) -> LCondition {
    LCondition::LMod { modulus, residues }
}

/// The cases that can occur for `p*` and an odd prime `l != p`.
pub fn select_cases(p: PrimeStarDiscriminant, l: u64) -> Vec<SieveCase> {
    assert!(p.is_negative() && l % 2 == 1 && l != p.prime());
    let eq = |a: i128, b: i128, congruences: Vec<XCongruence>| SieveEquation {
        x_coeff: a,
        rhs_coeff: b,
        congruences,
    };
    match p.value() {
        -8 => vec![
            SieveCase {
                case_id: 2,
                order: Order::TwoU,
                legendre_requirement: None,
                equations: vec![eq(
                    1,
                    2,
                    vec![cong(2, 4, l_mod(8, &[7])), cong(0, 4, l_mod(8, &[5]))],
                )],
            },
            SieveCase {
                case_id: 5,
                order: Order::U,
                legendre_requirement: None,
                equations: vec![eq(1, 1, vec![cong(1, 2, l_mod(8, &[1, 3]))])],
            },
        ],
        -4 => vec![
            SieveCase {
                case_id: 3,
                order: Order::TwoU,
                legendre_requirement: None,
                equations: vec![eq(1, 2, vec![cong(1, 2, l_mod(4, &[3]))])],
            },
            SieveCase {
                case_id: 6,
                order: Order::U,
                legendre_requirement: None,
                equations: vec![eq(
                    1,
                    1,
                    vec![
                        cong(1, 2, l_mod(4, &[1])),
                        cong(2, 4, l_mod(8, &[1])),
                        cong(0, 4, l_mod(8, &[5])),
                    ],
                )],
            },
        ],
        _ => {
            let pp = p.prime() as i128;
            if kronecker(l as i128, pp) == -1 {
                vec![SieveCase {
                    case_id: 1,
                    order: Order::TwoU,
                    legendre_requirement: Some(-1),
                    equations: vec![
                        eq(pp * pp, 4 * pp, vec![ODD]),
                        eq(
                            pp * pp,
                            pp,
                            vec![
                                cong(1, 2, l_mod(4, &[3])),
                                cong(2, 4, LCondition::LpMod { modulus: 8, residues: &[7] }),
                                cong(0, 4, LCondition::LpMod { modulus: 8, residues: &[3] }),
                            ],
                        ),
                    ],
                }]
            } else {
                vec![SieveCase {
                    case_id: 4,
                    order: Order::U,
                    legendre_requirement: Some(1),
                    equations: vec![
                        eq(1, 4, vec![ODD]),
                        eq(
                            1,
                            1,
                            vec![
                                cong(1, 2, l_mod(4, &[1])),
                                cong(2, 4, l_mod(8, &[7])),
                                cong(0, 4, l_mod(8, &[3])),
                            ],
                        ),
                    ],
                }]
            }
        }
    }
}

/// The applicable `(equation, congruence)` pairs for `l`.
pub fn lines_for(p: PrimeStarDiscriminant, l: u64) -> Vec<Line> {
    let mut out = Vec::new();
    for case in select_cases(p, l) {
        for eq in &case.equations {
            for c in &eq.congruences {
                if c.when.holds(l, p.prime()) {
                    out.push(Line {
                        case_id: case.case_id,
                        x_coeff: eq.x_coeff,
                        rhs_coeff: eq.rhs_coeff,
                        residue: c.residue,
                        modulus: c.modulus,
                    });
                }
            }
        }
    }
    out
}

/// True iff no prime below `l` splits in `Q(sqrt d)`.
pub fn smallest_split_check(d: i128, l: u64) -> bool {
    primes_below(l).into_iter().all(|q| kronecker(d, q as i128) != 1)
}

fn smallest_split_check_with(d: i128, primes: &[u64], l: u64) -> bool {
    primes.iter().take_while(|&&q| q < l).all(|&q| kronecker(d, q as i128) != 1)
}

/// Sieve parameters. Exactly one of `assume_erh` and `l_max` ends the loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SieveConfig {
    pub p_star: PrimeStarDiscriminant,
    pub u: u64,
    pub assume_erh: bool,
    pub l_max: Option<u64>,
    pub report_progress: bool,
    pub checkpoint: Option<PathBuf>,
}

impl SieveConfig {
    pub fn erh(p_star: PrimeStarDiscriminant, u: u64) -> Self {
        SieveConfig { p_star, u, assume_erh: true, l_max: None, report_progress: false, checkpoint: None }
    }

    pub fn up_to(p_star: PrimeStarDiscriminant, u: u64, l_max: u64) -> Self {
        SieveConfig {
            p_star,
            u,
            assume_erh: false,
            l_max: Some(l_max),
            report_progress: false,
            checkpoint: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.assume_erh == self.l_max.is_some() {
            return Err(Error::SieveConfig(
                "exactly one of assume_erh and l_max must be set".into(),
            ));
        }
        if !self.p_star.is_negative() {
            return Err(Error::SieveConfig(format!("p* = {} is not negative", self.p_star)));
        }
        if self.u % 2 == 0 || self.u == 0 {
            return Err(Error::SieveConfig(format!("u = {} is not odd", self.u)));
        }
        Ok(())
    }
}

/// Result of a sieve run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SieveOutcome {
    pub p_star: PrimeStarDiscriminant,
    pub u: u64,
    pub hits: Vec<PrimeStarDiscriminant>,
    /// Complete under ERH; `false` for runs cut off at `l_max`.
    pub exhaustive: bool,
    /// Largest `l` whose equations were scanned.
    pub last_l: u64,
    /// First `l` beyond the ERH bound, for ERH runs.
    pub stop_l: Option<u64>,
    pub l_max: Option<u64>,
    pub x_tested: u64,
    pub candidates: u64,
}

impl SieveOutcome {
    /// How far the result can be trusted.
    pub fn coverage(&self) -> String {
        match (self.exhaustive, self.stop_l, self.l_max) {
            (true, Some(l), _) => format!("complete under ERH (l-loop stopped at {l})"),
            (_, _, Some(l)) => format!("partial up to l_max = {l}"),
            _ => "partial".to_string(),
        }
    }
}

/// One line of the checkpoint file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointEntry {
    pub p_star: i64,
    pub u: u64,
    pub l: u64,
    pub cases: Vec<u8>,
    pub hits: Vec<i64>,
}

/// Entries of a checkpoint file that belong to `p` and `u`; empty if the
/// file does not exist yet.
pub fn read_checkpoint(path: &Path, p: i64, u: u64) -> Result<Vec<CheckpointEntry>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: CheckpointEntry = serde_json::from_str(&line)
            .map_err(|err| Error::Parse(format!("{}:{}: {err}", path.display(), i + 1)))?;
        if e.p_star == p && e.u == u {
            out.push(e);
        }
    }
    Ok(out)
}

/// Computes `R_{p*}` by the norm-equation sieve.
pub fn sieve_rp(cfg: &SieveConfig) -> Result<SieveOutcome> {
    cfg.validate()?;
    let p = cfg.p_star;
    let u = cfg.u;
    let pp = p.prime();
    let started = Instant::now();

    let mut hits: BTreeSet<PrimeStarDiscriminant> = BTreeSet::new();
    let mut done: HashSet<u64> = HashSet::new();
    let mut checkpoint = None;
    if let Some(path) = &cfg.checkpoint {
        for e in read_checkpoint(path, p.value(), u)? {
            done.insert(e.l);
            for h in e.hits {
                hits.insert(PrimeStarDiscriminant::new(h)?);
            }
        }
        checkpoint = Some(OpenOptions::new().create(true).append(true).open(path)?);
    }
    let mut log_line = |entry: CheckpointEntry| -> Result<()> {
        if let Some(f) = checkpoint.as_mut() {
            writeln!(f, "{}", serde_json::to_string(&entry)?)?;
            f.flush()?;
        }
        Ok(())
    };

    let checker = Checker::new(p, u);
    let mut x_tested = 0u64;
    let mut candidates = 0u64;

    // l = 2 and q* = 8. Only odd p: for p* = -4, -8 the prime 2 ramifies.
    if !p.is_two_type() && !done.contains(&2) {
        let mut found = Vec::new();
        if checker.accept_eight()? {
            found.push(PrimeStarDiscriminant::EIGHT);
        }
        let two_u = 1i128.checked_shl(u as u32).filter(|&v| v > 0).ok_or_else(|| {
            Error::RangeFault(format!("2^{u}"))
        })?;
        for c in [4 * pp as i128 * two_u, 4 * two_u] {
            let xmax = isqrt((c - 1) as u128) as u64;
            for x in 0..=xmax {
                x_tested += 1;
                let n = c - (x as i128) * (x as i128);
                if let Some(q) = checker.kernel_prime(n as u128) {
                    candidates += 1;
                    if checker.accept_q(q, None)? {
                        found.push(PrimeStarDiscriminant::new(q as i64)?);
                    }
                }
            }
        }
        hits.extend(found.iter().copied());
        log_line(CheckpointEntry {
            p_star: p.value(),
            u,
            l: 2,
            cases: vec![],
            hits: found.iter().map(|h| h.value()).collect(),
        })?;
    }

    let l_limit = cfg.l_max.unwrap_or(u64::MAX);
    let mut tables = QrTables::default();
    let mut last_l = 2;
    let mut stop_l = None;
    let mut l = 3u64;
    loop {
        if l > l_limit {
            break;
        }
        if cfg.assume_erh {
            let size = 4.0 * (l as f64).powi(u as i32) * pp as f64;
            if l as f64 > bach_sorenson(size) {
                stop_l = Some(l);
                log::info!("p* = {p}, u = {u}: ERH bound reached at l = {l}");
                break;
            }
        }
        if l == pp || done.contains(&l) {
            if done.contains(&l) {
                last_l = l;
            }
            l = next_prime(l);
            continue;
        }
        tables.extend_to(l);
        let lines = lines_for(p, l);
        let mut found = Vec::new();
        let mut cases: Vec<u8> = lines.iter().map(|ln| ln.case_id).collect();
        cases.dedup();
        for line in &lines {
            let scan = LineScan::new(line, p, u, l, &tables)?;
            let (xs, tested) = scan.run();
            x_tested += tested;
            for x in xs {
                let n = scan.neg_value(x);
                if n <= 0 {
                    continue;
                }
                if let Some(q) = checker.kernel_prime(n as u128) {
                    candidates += 1;
                    if checker.accept_q(q, Some((l, &tables.primes)))? {
                        found.push(PrimeStarDiscriminant::new(q as i64)?);
                    }
                }
            }
        }
        found.sort();
        found.dedup();
        hits.extend(found.iter().copied());
        log_line(CheckpointEntry {
            p_star: p.value(),
            u,
            l,
            cases,
            hits: found.iter().map(|h| h.value()).collect(),
        })?;
        if cfg.report_progress {
            log::info!(
                "p* = {p}, u = {u}: l = {l} done, {} hits so far, {:.1}s",
                hits.len(),
                started.elapsed().as_secs_f64()
            );
        }
        last_l = l;
        l = next_prime(l);
    }

    Ok(SieveOutcome {
        p_star: p,
        u,
        hits: hits.into_iter().collect(),
        exhaustive: cfg.assume_erh,
        last_l,
        stop_l,
        l_max: cfg.l_max,
        x_tested,
        candidates,
    })
}

fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime(k as u128) {
        k += 1;
    }
    k
}

/// Odd primes with bitsets of their nonzero squares.
#[derive(Default)]
struct QrTables {
    primes: Vec<u64>,
    squares: Vec<Vec<u64>>,
    limit: u64,
}

impl QrTables {
    fn extend_to(&mut self, l: u64) {
        if l <= self.limit {
            return;
        }
        let new_limit = (l * 2).max(1024);
        for q in primes_below(new_limit).into_iter().filter(|&q| q > 2 && q >= self.limit) {
            let mut bits = vec![0u64; (q as usize).div_ceil(64)];
            for x in 1..q {
                let s = (x * x % q) as usize;
                bits[s / 64] |= 1 << (s % 64);
            }
            self.primes.push(q);
            self.squares.push(bits);
        }
        self.limit = new_limit;
    }

    fn is_nonzero_square(&self, idx: usize, v: u64) -> bool {
        self.squares[idx][(v / 64) as usize] >> (v % 64) & 1 == 1
    }
}

/// Division-free `n mod q` via a precomputed `ceil(2^128 / q)`.
#[derive(Clone, Copy, Debug)]
struct FastMod {
    q: u64,
    c: u128,
}

impl FastMod {
    fn new(q: u64) -> Self {
        FastMod { q, c: (u128::MAX / q as u128).wrapping_add(1) }
    }

    #[inline]
    fn rem(self, n: u64) -> u64 {
        let low = self.c.wrapping_mul(n as u128);
        let q = self.q as u128;
        let (hi, lo) = (low >> 64, low as u64 as u128);
        ((hi * q + ((lo * q) >> 64)) >> 64) as u64
    }
}

struct Level {
    q: u64,
    fm: FastMod,
    allowed: Vec<u64>,
    m_inv: u64,
}

/// Leaf filter for one prime: reject when `a x^2 - c` is a nonzero square
/// (or, for `zero_only`, anything but zero).
#[derive(Clone, Copy)]
struct LeafPrime {
    idx: usize,
    q: u64,
    a: u64,
    c: u64,
    zero_only: bool,
}

/// Leaf primes handled 64 progression terms at a time.
const MASKED_PRIMES: usize = 48;
const CHUNK: u64 = 64;

/// For `x0 = X mod q`, bit `k` of `masks[x0]` is set iff `X + k M` passes.
struct MaskedPrime {
    q: u64,
    fm: FastMod,
    /// `CHUNK * M mod q`.
    step: u64,
    masks: Vec<u64>,
}

struct LineScan<'t> {
    a: i128,
    c: i128,
    x_max: u64,
    root: (u64, u64),
    levels: Vec<Level>,
    /// Product of the root modulus and all level primes.
    leaf_modulus: u64,
    masked: Vec<MaskedPrime>,
    leaves: Vec<LeafPrime>,
    tables: &'t QrTables,
}

impl<'t> LineScan<'t> {
    fn new(
        line: &Line,
        p: PrimeStarDiscriminant,
        u: u64,
        l: u64,
        tables: &'t QrTables,
    ) -> Result<Self> {
        let fault = || Error::RangeFault(format!("{} * {l}^{u}", line.rhs_coeff));
        let lu = (l as i128).checked_pow(u as u32).ok_or_else(fault)?;
        let c = lu.checked_mul(line.rhs_coeff).ok_or_else(fault)?;
        let a = line.x_coeff;
        let x_max = isqrt(((c - 1) / a) as u128) as u64;
        let pp = p.prime();
        // In the order-u case for odd p, p must divide D' = X^2 - B l^u.
        let p_zero = line.case_id == 4;

        let mut filters: Vec<LeafPrime> = Vec::new();
        for (idx, &q) in tables.primes.iter().enumerate() {
            if q >= l {
                break;
            }
            if q == pp && !p_zero {
                continue;
            }
            filters.push(LeafPrime {
                idx,
                q,
                a: (a.rem_euclid(q as i128)) as u64,
                c: (c.rem_euclid(q as i128)) as u64,
                zero_only: q == pp,
            });
        }
        if p_zero && pp >= l {
            let (ai, ci) = (a.rem_euclid(pp as i128) as u64, c.rem_euclid(pp as i128) as u64);
            filters.push(LeafPrime { idx: usize::MAX, q: pp, a: ai, c: ci, zero_only: true });
        }
        // p first: it keeps 2 of p classes.
        filters.sort_by_key(|f| (!f.zero_only, f.q));

        let mut levels = Vec::new();
        let mut modulus = line.modulus;
        let mut used = 0;
        for f in &filters {
            // A level pays off while leaves keep at least half a chunk.
            match modulus.checked_mul(f.q) {
                Some(next) if x_max / next >= CHUNK / 2 => {}
                _ => break,
            }
            let allowed: Vec<u64> = (0..f.q).filter(|&r| leaf_ok(f, r, tables)).collect();
            let m_inv = mod_inverse(modulus % f.q, f.q);
            levels.push(Level { q: f.q, fm: FastMod::new(f.q), allowed, m_inv });
            modulus *= f.q;
            used += 1;
        }
        let rest = &filters[used..];
        let split = rest.len().min(MASKED_PRIMES);
        let masked = rest[..split]
            .iter()
            .map(|f| {
                let step = modulus % f.q;
                let masks = (0..f.q)
                    .map(|x0| {
                        let mut bits = 0u64;
                        let mut x = x0;
                        for k in 0..CHUNK {
                            if leaf_ok(f, x, tables) {
                                bits |= 1 << k;
                            }
                            x = (x + step) % f.q;
                        }
                        bits
                    })
                    .collect();
                MaskedPrime { q: f.q, fm: FastMod::new(f.q), step: CHUNK % f.q * step % f.q, masks }
            })
            .collect();
        Ok(LineScan {
            a,
            c,
            x_max,
            root: (line.residue % line.modulus, line.modulus),
            levels,
            leaf_modulus: modulus,
            masked,
            leaves: rest[split..].to_vec(),
            tables,
        })
    }

    /// `-(a x^2 - c)`.
    fn neg_value(&self, x: u64) -> i128 {
        self.c - self.a * (x as i128) * (x as i128)
    }

    /// Surviving `X` and the number of progression terms examined.
    fn run(&self) -> (Vec<u64>, u64) {
        let (r0, m0) = self.root;
        if r0 > self.x_max {
            return (Vec::new(), 0);
        }
        if self.levels.is_empty() {
            let mut out = Vec::new();
            let tested = self.leaf_scan(r0, &mut out);
            return (out, tested);
        }
        let first = &self.levels[0];
        let results: Vec<(Vec<u64>, u64)> = first
            .allowed
            .par_iter()
            .map(|&s| {
                let mut out = Vec::new();
                let child = self.child(r0, m0, first, s);
                let tested = self.dfs(1, child, m0 * first.q, &mut out);
                (out, tested)
            })
            .collect();
        let mut xs = Vec::new();
        let mut tested = 0;
        for (v, t) in results {
            xs.extend(v);
            tested += t;
        }
        xs.sort_unstable();
        (xs, tested)
    }

    fn child(&self, r: u64, m: u64, lv: &Level, s: u64) -> u64 {
        let q = lv.q;
        let t = lv.fm.rem((s + q - lv.fm.rem(r)) * lv.m_inv);
        r + m * t
    }

    fn dfs(&self, depth: usize, r: u64, m: u64, out: &mut Vec<u64>) -> u64 {
        if r > self.x_max {
            return 0;
        }
        if depth == self.levels.len() {
            return self.leaf_scan(r, out);
        }
        let lv = &self.levels[depth];
        let mut tested = 0;
        for &s in &lv.allowed {
            let child = self.child(r, m, lv, s);
            tested += self.dfs(depth + 1, child, m * lv.q, out);
        }
        tested
    }

    /// Scans `r, r + M, ...` up to `x_max` in chunks of 64 terms.
    fn leaf_scan(&self, r: u64, out: &mut Vec<u64>) -> u64 {
        let m = self.leaf_modulus;
        // Residues of the chunk start, filled in lazily for the first `known` primes.
        let mut idx = [0u64; MASKED_PRIMES];
        let mut known = 0;
        let mut start = r;
        let mut tested = 0;
        loop {
            let terms = ((self.x_max - start) / m + 1).min(CHUNK);
            tested += terms;
            let mut bits = if terms == CHUNK { u64::MAX } else { (1u64 << terms) - 1 };
            for (i, mp) in self.masked.iter().enumerate() {
                if i == known {
                    idx[i] = mp.fm.rem(start);
                    known += 1;
                }
                bits &= mp.masks[idx[i] as usize];
                if bits == 0 {
                    break;
                }
            }
            while bits != 0 {
                let k = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                let x = start + k * m;
                if self.leaves.iter().all(|f| leaf_ok(f, x % f.q, self.tables)) {
                    out.push(x);
                }
            }
            if terms < CHUNK {
                break;
            }
            match start.checked_add(CHUNK * m) {
                Some(next) if next <= self.x_max => start = next,
                _ => break,
            }
            for (i, mp) in self.masked[..known].iter().enumerate() {
                idx[i] += mp.step;
                if idx[i] >= mp.q {
                    idx[i] -= mp.q;
                }
            }
        }
        tested
    }
}

#[inline]
fn leaf_ok(f: &LeafPrime, xr: u64, tables: &QrTables) -> bool {
    let v = (f.a * (xr * xr % f.q) % f.q + f.q - f.c) % f.q;
    if f.zero_only {
        return v == 0;
    }
    v == 0 || !tables.is_nonzero_square(f.idx, v)
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (g, x, _) = crate::arith::ext_gcd(a as i128, m as i128);
    assert_eq!(g, 1, "{a} not invertible mod {m}");
    x.rem_euclid(m as i128) as u64
}

/// Checks candidates `q` for one `p*`.
struct Checker {
    p: PrimeStarDiscriminant,
    u: u64,
    cache: ClassGroupCache,
    seen: std::sync::Mutex<std::collections::HashMap<u64, bool>>,
}

/// Above this size the class group is not enumerated; the ERH generation
/// bound is used instead.
const EXACT_LIMIT: u128 = 10_000_000_000;

impl Checker {
    fn new(p: PrimeStarDiscriminant, u: u64) -> Self {
        Checker { p, u, cache: ClassGroupCache::new(), seen: Default::default() }
    }

    /// The prime `q` if `n` has squarefree kernel `p q` (odd `p`), `2q`
    /// (`p* = -8`) or `q` (`p* = -4`) with `q = 1 mod 4`, `q != p`.
    fn kernel_prime(&self, n: u128) -> Option<u64> {
        if n == 0 {
            return None;
        }
        let cof: u128 = match self.p.value() {
            -4 => 1,
            -8 => 2,
            _ => self.p.prime() as u128,
        };
        if n % cof != 0 {
            return None;
        }
        let k = factor(n).squarefree_kernel();
        if k % cof != 0 {
            return None;
        }
        let q = k / cof;
        if q % 4 != 1 || q == self.p.prime() as u128 || q > i64::MAX as u128 || !is_prime(q) {
            return None;
        }
        Some(q as u64)
    }

    fn accept_eight(&self) -> Result<bool> {
        let d = product_discriminant(self.p, PrimeStarDiscriminant::EIGHT)?;
        self.exponent_divides(d)
    }

    fn accept_q(&self, q: u64, split: Option<(u64, &[u64])>) -> Result<bool> {
        if !redei_filter(self.p, q) {
            return Ok(false);
        }
        let qs = PrimeStarDiscriminant::new(q as i64)?;
        let d = product_discriminant(self.p, qs)?;
        if let Some((l, primes)) = split {
            if kronecker(d, l as i128) != 1 || !smallest_split_check_with(d, primes, l) {
                return Ok(false);
            }
        }
        if let Some(&v) = self.seen.lock().expect("poisoned").get(&q) {
            return Ok(v);
        }
        let v = self.exponent_divides(d)?;
        self.seen.lock().expect("poisoned").insert(q, v);
        Ok(v)
    }

    fn exponent_divides(&self, d: i128) -> Result<bool> {
        let m = 2 * self.u;
        if !crate::bqf::passes_cheap_tests(d, m) || !split_forms_killed(d, m, 2, 24) {
            return Ok(false);
        }
        if d.unsigned_abs() <= EXACT_LIMIT {
            return Ok(self.cache.structure(d)?.exponent_divides(m));
        }
        log::warn!("d = {d} passed prime-form tests; deciding via ERH generators");
        Ok(erh_generators_killed(d, m))
    }
}

/// `f^m = 1` for the forms over the first `count` split primes `>= start`.
fn split_forms_killed(d: i128, m: u64, start: u64, count: usize) -> bool {
    let mut l = start;
    let mut tried = 0;
    while tried < count {
        if is_prime(l as u128) && kronecker(d, l as i128) == 1 && !form_killed(d, l, m) {
            return false;
        }
        if is_prime(l as u128) && kronecker(d, l as i128) == 1 {
            tried += 1;
        }
        l += 1;
    }
    true
}

fn form_killed(d: i128, l: u64, m: u64) -> bool {
    let f = reduce_definite(QuadForm::prime_form(d, l).expect("split or ramified"));
    crate::bqf::form_order(&f, m).is_some_and(|o| m % o == 0)
}

/// Under ERH the classes of prime ideals of norm below `6 ln^2 |d|`
/// generate the class group.
fn erh_generators_killed(d: i128, m: u64) -> bool {
    let ln = (d.unsigned_abs() as f64).ln();
    let bound = (6.0 * ln * ln).ceil() as u64;
    primes_below(bound + 1)
        .into_iter()
        .filter(|&l| kronecker(d, l as i128) != -1)
        .all(|l| form_killed(d, l, m))
}
