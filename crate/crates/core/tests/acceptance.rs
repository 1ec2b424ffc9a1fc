//! Acceptance suite. Each test prints one `[PASS]` or `[FAIL]` line for its
//! criterion; runtime targets are printed next to the elapsed time but not
//! enforced.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use quadclass::arith::{is_fundamental, primes_below, product_discriminant, PrimeStarDiscriminant};
use quadclass::bqf::{
    class_structure, compose, exponent_divides, reduce_definite, reduced_forms_imaginary,
    ClassGroupCache, Mode, QuadForm,
};
use quadclass::cli::expected::ExpectedData;
use quadclass::families::{
    classify_fields, compute_i1, compute_k1, crossover_bound, crossover_f1, crossover_f2, default_dmax,
    max_discriminants, negative_prime_stars, redei_filter, rank_histogram, rp_qmax_u3, rp_scan,
    Classification, RpSource,
};
use quadclass::froehlich::{narrow_h_odd, symbol};
use quadclass::multiquad::{FamilyRecord, FieldSpec};
use quadclass::sieve::{sieve_rp, SieveConfig};

/// Collects failures for one criterion and reports them in a single line.
struct Criterion {
    id: u8,
    title: &'static str,
    target: &'static str,
    start: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u8, title: &'static str, target: &'static str) -> Self {
        Criterion { id, title, target, start: Instant::now(), failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, found: T, expected: T) {
        if found != expected {
            self.failures.push(format!("{what}: expected {expected:?}, found {found:?}"));
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed();
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        // Written to the real stdout so the line survives output capture.
        let mut out = std::io::stdout().lock();
        writeln!(
            out,
            "[{status}] criterion {}: {} ({}, target {})",
            self.id,
            self.title,
            fmt_duration(elapsed),
            self.target
        )
        .unwrap();
        for f in &self.failures {
            writeln!(out, "        {f}").unwrap();
        }
        drop(out);
        assert!(self.failures.is_empty(), "criterion {} failed: {:#?}", self.id, self.failures);
    }
}

fn fmt_duration(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn ps(v: i64) -> PrimeStarDiscriminant {
    PrimeStarDiscriminant::new(v).unwrap()
}

fn values(v: &[PrimeStarDiscriminant]) -> Vec<i64> {
    v.iter().map(|p| p.value()).collect()
}

fn cache() -> &'static ClassGroupCache {
    static CACHE: OnceLock<ClassGroupCache> = OnceLock::new();
    CACHE.get_or_init(ClassGroupCache::new)
}

fn classification_u3() -> &'static Classification {
    static C: OnceLock<Classification> = OnceLock::new();
    C.get_or_init(|| classify_fields(3, default_dmax(3), RpSource::ScanU3Bound, cache()).unwrap())
}

fn classification_u5() -> &'static Classification {
    static C: OnceLock<Classification> = OnceLock::new();
    C.get_or_init(|| {
        classify_fields(5, default_dmax(5), RpSource::Scan { qmax: 40_000 }, cache()).unwrap()
    })
}

fn strata(records: &[FamilyRecord]) -> [usize; 3] {
    let h = rank_histogram(records);
    [h[0], h[1], h[2]]
}

fn find_field<'a>(records: &'a [FamilyRecord], gens: &[i64]) -> Option<&'a FamilyRecord> {
    let want: BTreeSet<i64> = gens.iter().copied().collect();
    records.iter().find(|r| r.field.values().into_iter().collect::<BTreeSet<_>>() == want)
}

fn i1_criterion(c: &mut Criterion, u: u64, dmax: u64, count: usize, want_strata: [usize; 3]) {
    let i1 = compute_i1(u, dmax);
    c.eq("|I1|", i1.len(), count);
    let k1 = compute_k1(u, dmax, cache());
    c.eq("I1 vs the records", values(&i1), k1.iter().map(|r| r.field.values()[0]).collect());
    c.eq("rank strata", strata(&k1), want_strata);
    let fixture: BTreeSet<(usize, i64)> = ExpectedData::bundled().i1[&u].clone();
    let got: BTreeSet<(usize, i64)> =
        k1.iter().map(|r| (r.rank(), r.field.generators()[0].value())).collect();
    c.eq("I1 with ranks vs fixture", got, fixture);
}

#[test]
fn criterion_1_i1_u3() {
    let mut c = Criterion::new(1, "I1 for u = 3 has 26 members, strata (9,16,1)", "< 10 s");
    i1_criterion(&mut c, 3, 4100, 26, [9, 16, 1]);
    c.finish();
}

#[test]
fn criterion_2_i1_u5() {
    let mut c = Criterion::new(2, "I1 for u = 5 has 36 members, strata (9,25,2)", "< 2 min");
    i1_criterion(&mut c, 5, 38_000, 36, [9, 25, 2]);
    c.finish();
}

#[test]
fn criterion_3_family_2a() {
    let mut c = Criterion::new(3, "kappa_2a = 307 / 537 with rank histograms", "< 15 min");
    let a3 = &classification_u3().k2a;
    let a5 = &classification_u5().k2a;
    for cl in [classification_u3(), classification_u5()] {
        let fresh = compute_i1(cl.u, cl.dmax);
        c.eq(&format!("I1 used for u={}", cl.u), values(&cl.i1()), values(&fresh));
    }
    c.eq("kappa_2a (u=3)", a3.len(), 307);
    c.eq("kappa_2a (u=5)", a5.len(), 537);
    c.eq("histogram (u=3)", rank_histogram(a3), [32, 133, 110, 31, 1]);
    c.eq("histogram (u=5)", rank_histogram(a5), [32, 194, 256, 54, 1]);
    c.finish();
}

#[test]
fn criterion_4_family_2b_u3() {
    let mut c = Criterion::new(4, "u = 3 family 2b: 58 fields, histogram, maximal discriminants", "< 2 h");
    let cl = classification_u3();
    c.check(cl.exhaustive, || "u = 3 run with the complete q* bound not flagged exhaustive".into());
    for p in cl.i1() {
        c.check(cl.rp.contains_key(&p), || format!("no R set for {p}"));
    }
    let b = &cl.k2b;
    c.eq("kappa_2b", b.len(), 58);
    c.eq("histogram", rank_histogram(b), [15, 30, 12, 1, 0]);
    let max = max_discriminants(b);
    for (rank, disc, divisors) in
        [(1usize, 7_767_369i128, vec![3u64]), (2, 1_157_836_729, vec![3, 3]), (3, 503_688_249, vec![3, 3, 3])]
    {
        match max.get(&rank) {
            Some(r) => {
                c.eq(&format!("max disc, rank {rank}"), r.composite_discriminant, disc);
                c.eq(&format!("structure, rank {rank}"), r.class_group.divisors().to_vec(), divisors);
            }
            None => c.check(false, || format!("no rank {rank} field")),
        }
    }
    c.finish();
}

#[test]
fn criterion_5_r_table_u5() {
    let mut c = Criterion::new(5, "u = 5 R table entries have exponent | 10 and match a scan to 40000", "< 30 min");
    let table = ExpectedData::bundled().rp_rows(5).expect("bundled u = 5 R table");
    let mut pairs = 0;
    for (&p, qs) in &table {
        for &q in qs {
            let d = product_discriminant(ps(p), ps(q)).unwrap();
            let ok = exponent_divides(d, 10, Mode::Exact).unwrap();
            c.check(ok, || format!("({p}, {q}): exponent of Cl+({d}) does not divide 10"));
            pairs += 1;
        }
    }
    c.eq("table pairs", pairs, 85);
    // The u = 5 classification computes each R set with rp_scan to 40000.
    let cl = classification_u5();
    c.eq("rows scanned", cl.rp.len(), 36);
    for (p, got) in &cl.rp {
        let want: Vec<i64> =
            table.get(&p.value()).cloned().unwrap_or_default().into_iter().filter(|&q| q <= 40_000).collect();
        c.eq(&format!("R({p})"), values(got), want);
    }
    c.finish();
}

#[test]
fn criterion_6_triquadratic() {
    let mut c = Criterion::new(6, "triquadratic counts, histograms and rank-4 fields", "< 30 min");
    let (c3, c5) = (classification_u3(), classification_u5());
    c.eq("(kappa_3a, kappa_3b) u=3", (c3.k3a.len(), c3.k3b.len()), (35, 42));
    c.eq("(kappa_3a, kappa_3b) u=5", (c5.k3a.len(), c5.k3b.len()), (29, 39));
    let combined = |cl: &Classification| {
        let (a, b) = (rank_histogram(&cl.k3a), rank_histogram(&cl.k3b));
        std::array::from_fn::<usize, 5, _>(|i| a[i] + b[i])
    };
    c.eq("combined histogram u=3", combined(c3), [17, 23, 29, 7, 1]);
    c.eq("combined histogram u=5", combined(c5), [17, 18, 26, 6, 1]);
    for (cl, gens, disc, div) in [
        (c3, [-59i64, -107, 8], 6_505_835_909_336_928_256i128, 3u64),
        (c5, [-11, -127, 29], 2_693_876_092_569_442_561, 5),
    ] {
        match find_field(&cl.k3b, &gens) {
            Some(r) => {
                c.eq(&format!("disc of {gens:?}"), r.composite_discriminant, disc);
                c.eq(&format!("Cl of {gens:?}"), r.class_group.divisors().to_vec(), vec![div; 4]);
            }
            None => c.check(false, || format!("{gens:?} missing from family 3b")),
        }
    }
    c.finish();
}

#[test]
fn criterion_7_sieve_vs_scan() {
    let mut c = Criterion::new(7, "sieve under ERH matches the scan (u=3) and the R rows (u=5)", "< 4 h");
    for p in [-3, -4, -7, -8, -11] {
        let p = ps(p);
        let out = sieve_rp(&SieveConfig::erh(p, 3)).unwrap();
        let scan = rp_scan(p, 3, rp_qmax_u3(p).unwrap()).unwrap();
        c.check(out.exhaustive, || format!("u=3 sieve for {p} not exhaustive"));
        c.eq(&format!("u=3 R({p})"), values(&out.hits), values(&scan));
    }
    for (p, want) in [(-43, vec![8, 73, 929]), (-103, vec![37]), (-227, vec![17, 41]), (-347, vec![8])] {
        let t = Instant::now();
        let out = sieve_rp(&SieveConfig::erh(ps(p), 5)).unwrap();
        let mut o = std::io::stdout().lock();
        writeln!(o, "        u=5 sieve {p}: {:?} in {}, {}", values(&out.hits), fmt_duration(t.elapsed()), out.coverage()).unwrap();
        drop(o);
        c.check(out.exhaustive, || format!("u=5 sieve for {p} not exhaustive"));
        c.eq(&format!("u=5 R({p})"), values(&out.hits), want);
    }
    c.finish();
}

// Property suites.

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_root(p: u64) -> u64 {
    let qs = prime_factors(p - 1);
    (2..p).find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).unwrap()
}

/// Euler's criterion.
fn legendre(a: i64, p: u64) -> i8 {
    let r = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Symbol values against brute-force discrete logarithms, and the identity
/// `(-1)^[x,y]` = `(y|x)` for odd `x`, `(x|y)` for `x` in {-1, 2}.
fn symbol_identity(limit: u64) -> (usize, Vec<String>) {
    let primes = primes_below(limit + 1);
    let mut bad = Vec::new();
    let mut pairs = 0;
    for &x in primes.iter().filter(|&&x| x > 2) {
        let g = primitive_root(x);
        let mut log = vec![0u64; x as usize];
        let mut v = 1u64;
        for k in 0..x - 1 {
            log[v as usize] = k;
            v = v * g % x;
        }
        for &y in primes.iter().filter(|&&y| y != x) {
            pairs += 1;
            let parity = log[(y % x) as usize] % 2 == 1;
            let s = symbol(x as i64, y).unwrap();
            let sign = if parity { -1 } else { 1 };
            if (s.bit() == 1) != parity || legendre(y as i64, x) != sign {
                bad.push(format!("[{x},{y}]"));
            }
        }
    }
    for &y in primes.iter().filter(|&&y| y > 2) {
        // 5^r (-1)^s = y mod 8
        let (r, s) = (0..2u32)
            .flat_map(|r| (0..2u32).map(move |s| (r, s)))
            .find(|&(r, s)| (5u64.pow(r) * if s == 1 { 7 } else { 1 }) % 8 == y % 8)
            .unwrap();
        for (x, e) in [(2i64, r), (-1, s)] {
            pairs += 1;
            let val = symbol(x, y).unwrap();
            let sign = if e == 1 { -1 } else { 1 };
            if val.bit() as u32 != e || legendre(x, y) != sign {
                bad.push(format!("[{x},{y}]"));
            }
        }
    }
    if symbol(-1, 2).is_ok() {
        bad.push("[-1,2] should be undefined".into());
    }
    (pairs, bad)
}

fn random_fundamentals(count: usize, bound: i64) -> Vec<i128> {
    let mut runner = TestRunner::deterministic();
    let strat = -bound..bound;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let d = strat.new_tree(&mut runner).unwrap().current() as i128;
        if d != 1 && is_fundamental(d) && seen.insert(d) {
            out.push(d);
        }
    }
    out
}

/// Size of the subgroup generated by the prime forms of norm at most
/// `sqrt(|d|/3)`, by coset expansion under composition.
fn composition_closure(d: i128) -> usize {
    let bound = ((d.unsigned_abs() / 3) as f64).sqrt() as u64;
    let id = reduce_definite(QuadForm::principal(d));
    let mut elems = vec![id];
    let mut set: HashSet<QuadForm> = HashSet::from([id]);
    for l in primes_below(bound + 1) {
        let Some(f) = QuadForm::prime_form(d, l) else { continue };
        let g = reduce_definite(f);
        let base = elems.clone();
        let mut power = g;
        while !set.contains(&power) {
            for h in &base {
                let x = compose(h, &power, d).unwrap();
                if set.insert(x) {
                    elems.push(x);
                }
            }
            power = compose(&power, &g, d).unwrap();
        }
    }
    elems.len()
}

#[test]
fn criterion_8_property_suites() {
    let mut c = Criterion::new(8, "symbol identity, genus 2-rank, Redei, enumeration vs composition, parity", "< 10 min");
    let mut lines = Vec::new();

    let t = Instant::now();
    let (pairs, bad) = symbol_identity(10_000);
    c.check(bad.is_empty(), || format!("symbol identity fails on {} pairs, e.g. {:?}", bad.len(), &bad[..bad.len().min(5)]));
    lines.push(format!("symbol identity: {pairs} pairs ({})", fmt_duration(t.elapsed())));

    let t = Instant::now();
    let sample = random_fundamentals(1000, 1_000_000);
    for &d in &sample {
        let t_count = prime_factors(d.unsigned_abs() as u64).len();
        let r2 = class_structure(d).unwrap().p_rank(2);
        c.check(r2 + 1 == t_count, || format!("D = {d}: 2-rank {r2}, {t_count} prime discriminants"));
    }
    let negatives = sample.iter().filter(|&&d| d < 0).count();
    lines.push(format!(
        "genus 2-rank: {} discriminants, {negatives} negative ({})",
        sample.len(),
        fmt_duration(t.elapsed())
    ));

    let t = Instant::now();
    let mut redei = 0;
    for p in negative_prime_stars(100_000 / 5) {
        let a = p.value().unsigned_abs();
        for q in primes_below(100_000 / a + 1).into_iter().filter(|q| q % 4 == 1) {
            let d = p.value() as i128 * q as i128;
            if d.unsigned_abs() >= 100_000 {
                continue;
            }
            redei += 1;
            let h = class_structure(d).unwrap().order();
            c.check(redei_filter(p, q) == (h % 4 != 0), || format!("Redei filter wrong for {p} * {q}, h = {h}"));
        }
    }
    lines.push(format!("Redei filter: {redei} discriminants ({})", fmt_duration(t.elapsed())));

    let t = Instant::now();
    let mut fund = 0;
    for d in (-100_000i128 + 1..0).rev().filter(|&d| is_fundamental(d)) {
        fund += 1;
        let h = reduced_forms_imaginary(d).unwrap().len();
        let closure = composition_closure(d);
        c.check(h == closure, || format!("D = {d}: {h} reduced forms, closure {closure}"));
    }
    lines.push(format!("enumeration vs composition: {fund} discriminants ({})", fmt_duration(t.elapsed())));

    let t = Instant::now();
    let neg: Vec<i64> = negative_prime_stars(2000).into_iter().map(|p| p.value()).collect();
    let pos: Vec<i64> = std::iter::once(8)
        .chain(primes_below(2000).into_iter().filter(|q| q % 4 == 1).map(|q| q as i64))
        .collect();
    let mut runner = TestRunner::deterministic();
    let pick = (0..neg.len(), 0..pos.len(), 0..pos.len());
    let mut fields = HashSet::new();
    while fields.len() < 1000 {
        let (i, j, k) = pick.new_tree(&mut runner).unwrap().current();
        let gens = [ps(neg[i]), ps(pos[j]), ps(pos[k])];
        let primes: HashSet<u64> = gens.iter().map(|g| g.prime()).collect();
        if primes.len() < 3 {
            continue;
        }
        let f = FieldSpec::new(gens.to_vec()).unwrap();
        if fields.insert(f.values()) {
            c.check(!narrow_h_odd(&f), || format!("{f}: odd narrow class number claimed"));
        }
    }
    lines.push(format!("parity exclusion: {} triquadratics ({})", fields.len(), fmt_duration(t.elapsed())));

    let mut o = std::io::stdout().lock();
    for l in lines {
        writeln!(o, "        {l}").unwrap();
    }
    drop(o);
    c.finish();
}

#[test]
fn criterion_9_crossover() {
    let mut c = Criterion::new(9, "crossover_bound(3) <= 2.4e15 with a certified bracket", "< 1 s");
    let x = crossover_bound(3).unwrap();
    c.check(x.value <= 2.4e15, || format!("crossover {} exceeds 2.4e15", x.value));
    c.check(crossover_f1(x.lower) >= crossover_f2(x.lower), || "f1 < f2 at the lower end".into());
    c.check(crossover_f1(x.upper) < crossover_f2(x.upper), || "f1 >= f2 at the upper end".into());
    c.check(x.lower <= x.value && x.value < x.upper, || format!("{x:?} does not bracket its value"));
    // Beyond the bracket f2 stays ahead.
    for k in 1..=40 {
        let y = x.upper * 1.5f64.powi(k);
        c.check(crossover_f1(y) < crossover_f2(y), || format!("f1 >= f2 at {y:e}"));
    }
    c.finish();
}
