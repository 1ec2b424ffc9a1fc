//! Enumeration of the imaginary quadratic, biquadratic and triquadratic
//! fields whose class group has exponent dividing an odd `u`.
//!
//! The pipeline is: the imaginary prime discriminants `p*` with exponent
//! dividing `u` (I1), the sets `R_{p*}` of positive `q*` with
//! `E(Q(sqrt(p* q*))) | 2u`, and from those the biquadratic families 2a
//! (two negative generators) and 2b (one negative, one positive), then the
//! triquadratic families 3a and 3b built out of them.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, primes_below, product_discriminant, PrimeStarDiscriminant};
use crate::bqf::{
    exponent_divides, passes_cheap_tests, prime_forms_killed_by, ClassGroupCache, GroupStructure,
    Mode, FAST_PRIME_FORMS,
};
use crate::error::{Error, Result};
use crate::multiquad::{class_group_if_exponent_divides, Family, FamilyRecord, FieldSpec};

/// `R_{p*}` for each `p*` in I1.
pub type RpMap = BTreeMap<PrimeStarDiscriminant, Vec<PrimeStarDiscriminant>>;

/// Default I1 scan bound for `u`.
pub fn default_dmax(u: u64) -> u64 {
    match u {
        3 => 4100,
        5 => 38000,
        _ => 10_000,
    }
}

/// Negative elements of `P*` with absolute value at most `dmax`.
pub fn negative_prime_stars(dmax: u64) -> Vec<PrimeStarDiscriminant> {
    let mut out = Vec::new();
    for v in [-4i64, -8] {
        if v.unsigned_abs() <= dmax {
            out.push(PrimeStarDiscriminant::new(v).expect("2-adic discriminant"));
        }
    }
    for p in primes_below(dmax + 1) {
        if p % 4 == 3 {
            out.push(PrimeStarDiscriminant::new(-(p as i64)).expect("p = 3 mod 4"));
        }
    }
    out.sort();
    out
}

/// All `p* < 0` with `|p*| <= dmax` whose class group has exponent dividing `u`.
pub fn compute_i1(u: u64, dmax: u64) -> Vec<PrimeStarDiscriminant> {
    compute_k1(u, dmax, &ClassGroupCache::new())
        .into_iter()
        .map(|r| r.field.generators()[0])
        .collect()
}

/// The imaginary quadratic records behind I1, sorted by `|p*|`.
pub fn compute_k1(u: u64, dmax: u64, cache: &ClassGroupCache) -> Vec<FamilyRecord> {
    let mut out: Vec<FamilyRecord> = negative_prime_stars(dmax)
        .into_par_iter()
        .filter_map(|p| {
            let d = p.value() as i128;
            if !prime_forms_killed_by(d, u, FAST_PRIME_FORMS) {
                return None;
            }
            let s = cache.structure(d).expect("prime discriminants are fundamental");
            s.exponent_divides(u).then(|| {
                FamilyRecord::new(FieldSpec::new(vec![p]).expect("one generator"), s)
                    .expect("imaginary")
            })
        })
        .collect();
    out.sort_by_key(|r| r.field.generators()[0]);
    out
}

/// Biquadratic fields with two negative generators from I1.
pub fn compute_k2a(
    i1: &[PrimeStarDiscriminant],
    u: u64,
    cache: &ClassGroupCache,
) -> Result<Vec<FamilyRecord>> {
    let mut pairs = Vec::new();
    for (i, &p) in i1.iter().enumerate() {
        for &q in &i1[i + 1..] {
            pairs.push(FieldSpec::new(vec![p, q])?);
        }
    }
    classify(pairs, u, cache)
}

fn classify(fields: Vec<FieldSpec>, u: u64, cache: &ClassGroupCache) -> Result<Vec<FamilyRecord>> {
    let results: Vec<Result<Option<FamilyRecord>>> = fields
        .into_par_iter()
        .map(|f| match class_group_if_exponent_divides(&f, u, cache)? {
            Ok(g) => Ok(Some(FamilyRecord::new(f, g)?)),
            Err(_) => Ok(None),
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        if let Some(rec) = r? {
            out.push(rec);
        }
    }
    out.sort_by_key(FamilyRecord::sort_key);
    Ok(out)
}

/// Redei's criterion for `4 ∤ h(p* q)`, `q = 1 mod 4`: for odd `p` both
/// `(q|p)` and `(p*|q)` equal -1, for the 2-adic `p*` `q = 5 mod 8`.
pub fn redei_filter(p: PrimeStarDiscriminant, q: u64) -> bool {
    debug_assert!(q % 4 == 1);
    if p.is_two_type() {
        return q % 8 == 5;
    }
    let pp = p.prime() as i128;
    crate::arith::kronecker(q as i128, pp) == -1
        && crate::arith::kronecker(p.value() as i128, q as i128) == -1
}

/// All `q* > 0` with `q* <= qmax` and `E(Q(sqrt(p* q*))) | 2u`.
pub fn rp_scan(
    p: PrimeStarDiscriminant,
    u: u64,
    qmax: u64,
) -> Result<Vec<PrimeStarDiscriminant>> {
    if !p.is_negative() {
        return Err(Error::NotPrimeStar(p.value() as i128));
    }
    let m = 2 * u;
    let mut candidates: Vec<u64> = Vec::new();
    if !p.is_two_type() && qmax >= 8 {
        candidates.push(8);
    }
    candidates.extend(primes_below(qmax + 1).into_iter().filter(|q| q % 4 == 1));
    let hits: Vec<u64> = candidates
        .into_par_iter()
        .with_min_len(256)
        .filter(|&q| {
            if q != 8 && !redei_filter(p, q) {
                return false;
            }
            let qs = PrimeStarDiscriminant::new(q as i64).expect("element of P*+");
            let d = product_discriminant(p, qs).expect("distinct generators");
            passes_cheap_tests(d, m)
                && exponent_divides(d, m, Mode::Exact).expect("fundamental discriminant")
        })
        .collect();
    let mut out: Vec<PrimeStarDiscriminant> = hits
        .into_iter()
        .map(|q| PrimeStarDiscriminant::new(q as i64).expect("element of P*+"))
        .collect();
    out.sort();
    Ok(out)
}

const U3_SCAN_CONSTANT: u64 = 5_761_140;
const U3_MAX_PRIME: u64 = 4027;

/// Complete `q*` bound for `u = 3`: `floor(5761140 / |p*|)`.
pub fn rp_qmax_u3(p: PrimeStarDiscriminant) -> Result<u64> {
    let a = p.value().unsigned_abs();
    if a > U3_MAX_PRIME {
        return Err(Error::OutOfRange {
            bound: a,
            reason: format!("|p*| must be at most {U3_MAX_PRIME}"),
        });
    }
    Ok(U3_SCAN_CONSTANT / a)
}

/// Location of the last crossing of `f1(x) = (1.881 ln x + 6.18)^2` and
/// `f2(x) = (x / (4 * 4027))^(1/3)`, with a bracket certifying it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub value: f64,
    /// `f1 >= f2` here.
    pub lower: f64,
    /// `f1 < f2` here and beyond.
    pub upper: f64,
}

pub fn crossover_f1(x: f64) -> f64 {
    let t = 1.881 * x.ln() + 0.34 * 2.0 + 5.5;
    t * t
}

pub fn crossover_f2(x: f64) -> f64 {
    (x / (4.0 * U3_MAX_PRIME as f64)).cbrt()
}

/// Bracketing plus bisection in `ln x` to relative tolerance `1e-6`.
pub fn crossover_bound(u: u64) -> Result<Crossover> {
    if u != 3 {
        return Err(Error::OutOfRange { bound: u, reason: "crossover is defined for u = 3".into() });
    }
    let g = |x: f64| crossover_f1(x) - crossover_f2(x);
    let mut lo = 25f64.exp();
    assert!(g(lo) >= 0.0);
    let mut hi = lo;
    while g(hi) >= 0.0 {
        hi *= 2.0;
    }
    // f2/f1 is increasing once f2 has overtaken f1, so [lo, hi] holds the
    // last crossing.
    while hi / lo - 1.0 > 1e-6 {
        let mid = (lo * hi).sqrt();
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossover { value: lo, lower: lo, upper: hi })
}

/// Biquadratic fields with one negative generator `p*` in I1 and one
/// positive `q*` in `R_{p*}`.
pub fn compute_k2b(
    i1: &[PrimeStarDiscriminant],
    rp: &RpMap,
    u: u64,
    cache: &ClassGroupCache,
) -> Result<Vec<FamilyRecord>> {
    let mut fields = Vec::new();
    for p in i1 {
        for &q in rp.get(p).map(Vec::as_slice).unwrap_or(&[]) {
            fields.push(FieldSpec::new(vec![*p, q])?);
        }
    }
    classify(fields, u, cache)
}

/// Triquadratic families: 3a has three negative generators with all three
/// biquadratic subfields in 2a; 3b has two negative and one positive with
/// `k12` in 2a and `k13`, `k23` in 2b.
pub fn compute_k3(
    k2a: &[FamilyRecord],
    k2b: &[FamilyRecord],
    u: u64,
    cache: &ClassGroupCache,
) -> Result<(Vec<FamilyRecord>, Vec<FamilyRecord>)> {
    let pair = |r: &FamilyRecord| {
        let g = r.field.generators();
        (g[0], g[1])
    };
    let a_set: HashSet<(PrimeStarDiscriminant, PrimeStarDiscriminant)> =
        k2a.iter().map(pair).collect();
    let b_set: HashSet<(PrimeStarDiscriminant, PrimeStarDiscriminant)> =
        k2b.iter().map(pair).collect();
    let ordered = |x: PrimeStarDiscriminant, y: PrimeStarDiscriminant| if x < y { (x, y) } else { (y, x) };

    let negatives: BTreeSet<PrimeStarDiscriminant> =
        k2a.iter().flat_map(|r| r.field.generators().to_vec()).collect();
    let positives: BTreeSet<PrimeStarDiscriminant> = k2b
        .iter()
        .flat_map(|r| r.field.generators().to_vec())
        .filter(|g| !g.is_negative())
        .collect();

    let mut triples_a = BTreeSet::new();
    let mut triples_b = BTreeSet::new();
    for &(x, y) in &a_set {
        for &z in &negatives {
            if z > y && a_set.contains(&ordered(x, z)) && a_set.contains(&ordered(y, z)) {
                triples_a.insert([x, y, z]);
            }
        }
        for &q in &positives {
            if b_set.contains(&ordered(x, q)) && b_set.contains(&ordered(y, q)) {
                triples_b.insert([x, y, q]);
            }
        }
    }
    let to_fields = |ts: BTreeSet<[PrimeStarDiscriminant; 3]>| {
        ts.into_iter().map(|t| FieldSpec::new(t.to_vec())).collect::<Result<Vec<_>>>()
    };
    let a = classify(to_fields(triples_a)?, u, cache)?;
    let b = classify(to_fields(triples_b)?, u, cache)?;
    Ok((a, b))
}

/// Where the `R_{p*}` sets come from.
#[derive(Debug, Clone)]
pub enum RpSource {
    /// `rp_scan` with `floor(5761140/|p*|)`; complete under ERH for `u = 3`.
    ScanU3Bound,
    /// `rp_scan` with a fixed `qmax`; not claimed complete.
    Scan { qmax: u64 },
    /// Precomputed sets, e.g. from the sieve, with their completeness flag.
    Provided { rp: RpMap, exhaustive: bool },
}

/// Everything one enumeration run produces.
#[derive(Debug, Clone)]
pub struct Classification {
    pub u: u64,
    pub dmax: u64,
    pub exhaustive: bool,
    pub k1: Vec<FamilyRecord>,
    pub rp: RpMap,
    pub k2a: Vec<FamilyRecord>,
    pub k2b: Vec<FamilyRecord>,
    pub k3a: Vec<FamilyRecord>,
    pub k3b: Vec<FamilyRecord>,
}

impl Classification {
    pub fn i1(&self) -> Vec<PrimeStarDiscriminant> {
        self.k1.iter().map(|r| r.field.generators()[0]).collect()
    }

    /// All records sorted by (family, composite discriminant).
    pub fn records(&self) -> Vec<FamilyRecord> {
        let mut all: Vec<FamilyRecord> = [&self.k1, &self.k2a, &self.k2b, &self.k3a, &self.k3b]
            .into_iter()
            .flatten()
            .cloned()
            .collect();
        all.sort_by_key(FamilyRecord::sort_key);
        all
    }

    pub fn family(&self, f: Family) -> &[FamilyRecord] {
        match f {
            Family::One => &self.k1,
            Family::TwoA => &self.k2a,
            Family::TwoB => &self.k2b,
            Family::ThreeA => &self.k3a,
            Family::ThreeB => &self.k3b,
        }
    }
}

/// Rank histogram `r = 0..=4` of a record list.
pub fn rank_histogram(records: &[FamilyRecord]) -> [usize; 5] {
    let mut h = [0usize; 5];
    for r in records {
        h[r.rank().min(4)] += 1;
    }
    h
}

/// Record with the largest composite discriminant for each rank.
pub fn max_discriminants(records: &[FamilyRecord]) -> BTreeMap<usize, &FamilyRecord> {
    let mut out: BTreeMap<usize, &FamilyRecord> = BTreeMap::new();
    for r in records {
        let e = out.entry(r.rank()).or_insert(r);
        if r.composite_discriminant > e.composite_discriminant {
            *e = r;
        }
    }
    out
}

/// Runs the full enumeration for `u`.
pub fn classify_fields(
    u: u64,
    dmax: u64,
    source: RpSource,
    cache: &ClassGroupCache,
) -> Result<Classification> {
    if u % 2 == 0 {
        return Err(Error::OutOfRange { bound: u, reason: "u must be odd".into() });
    }
    let k1 = compute_k1(u, dmax, cache);
    let i1: Vec<PrimeStarDiscriminant> = k1.iter().map(|r| r.field.generators()[0]).collect();
    log::info!("I1: {} discriminants up to {dmax}", i1.len());
    let k2a = compute_k2a(&i1, u, cache)?;
    log::info!("2a: {} fields", k2a.len());
    let (rp, exhaustive) = match source {
        RpSource::ScanU3Bound => {
            let mut rp = RpMap::new();
            for &p in &i1 {
                rp.insert(p, rp_scan(p, u, rp_qmax_u3(p)?)?);
            }
            (rp, u == 3)
        }
        RpSource::Scan { qmax } => {
            let mut rp = RpMap::new();
            for &p in &i1 {
                rp.insert(p, rp_scan(p, u, qmax)?);
            }
            (rp, false)
        }
        RpSource::Provided { rp, exhaustive } => (rp, exhaustive),
    };
    let k2b = compute_k2b(&i1, &rp, u, cache)?;
    log::info!("2b: {} fields", k2b.len());
    let (k3a, k3b) = compute_k3(&k2a, &k2b, u, cache)?;
    log::info!("3a: {} fields, 3b: {} fields", k3a.len(), k3b.len());
    Ok(Classification { u, dmax, exhaustive, k1, rp, k2a, k2b, k3a, k3b })
}

/// Whether a positive integer is an admissible `q*` value.
pub fn is_positive_prime_star(q: u64) -> bool {
    q == 8 || (q % 4 == 1 && is_prime(q as u128))
}

/// Structure of a record, recomputed.
pub fn recompute_structure(r: &FamilyRecord, cache: &ClassGroupCache) -> Result<GroupStructure> {
    crate::multiquad::odd_class_group(&r.field, cache)
}
