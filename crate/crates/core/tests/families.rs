use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;

use quadclass::arith::{field_discriminant, PrimeStarDiscriminant};
use quadclass::bqf::{class_structure, ClassGroupCache};
use quadclass::families::{
    classify_fields, compute_k3, default_dmax, rp_qmax_u3, rp_scan, Classification, RpSource,
};
use quadclass::multiquad::{odd_class_group, quadratic_subfields, Family, FamilyRecord};

fn cache() -> &'static ClassGroupCache {
    static CACHE: OnceLock<ClassGroupCache> = OnceLock::new();
    CACHE.get_or_init(ClassGroupCache::new)
}

fn u3() -> &'static Classification {
    static C: OnceLock<Classification> = OnceLock::new();
    C.get_or_init(|| classify_fields(3, default_dmax(3), RpSource::ScanU3Bound, cache()).unwrap())
}

#[test]
fn records_carry_their_odd_class_group() {
    for r in u3().records() {
        assert_eq!(r.class_group, odd_class_group(&r.field, cache()).unwrap(), "{}", r.field);
        assert!(r.class_group.exponent_divides(3));
    }
}

#[test]
fn imaginary_quadratic_subfields_have_small_exponent() {
    for r in u3().records() {
        // The norm to Q(sqrt p*) is onto, so the whole group is bounded there.
        for g in r.field.generators().iter().filter(|g| g.is_negative()) {
            let s = class_structure(g.value() as i128).unwrap();
            assert!(s.exponent_divides(3), "{} has generator {g}", r.field);
        }
        for d in quadratic_subfields(&r.field).into_iter().filter(|&d| d < 0) {
            let s = class_structure(d).unwrap();
            assert!(s.odd_part().exponent_divides(3), "{} has subfield {d}", r.field);
        }
    }
    // Unramified subfield extensions are not covered: Cl(-15) = C2 inside
    // Q(sqrt -3, sqrt 5).
    assert!(u3().k2b.iter().any(|r| r.field.values() == [-3, 5]));
    assert_eq!(class_structure(-15).unwrap().divisors(), &[2]);
}

#[test]
fn family_tags_match_generators() {
    for r in u3().records() {
        assert_eq!(Family::of(&r.field), Some(r.family));
        let neg = r.field.negative_count();
        if r.field.n() == 3 {
            assert_ne!(neg, 1, "{} has one negative generator", r.field);
        }
        let vals = r.field.values();
        let keys: Vec<(u64, i64)> = r.field.generators().iter().map(|g| g.sort_key()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "{vals:?} not canonical");
    }
}

#[test]
fn triquadratic_step_ignores_input_order() {
    let c = u3();
    let mut a = c.k2a.clone();
    let mut b = c.k2b.clone();
    a.reverse();
    b.reverse();
    b.rotate_left(7);
    let (x, y) = compute_k3(&a, &b, 3, cache()).unwrap();
    assert_eq!(x, c.k3a);
    assert_eq!(y, c.k3b);
}

#[test]
fn scan_rows_are_the_2b_partners() {
    let c = u3();
    let from_records: BTreeSet<(i64, i64)> = c
        .k2b
        .iter()
        .map(|r| {
            let g = r.field.generators();
            let (n, p) = if g[0].is_negative() { (g[0], g[1]) } else { (g[1], g[0]) };
            (n.value(), p.value())
        })
        .collect();
    let mut from_scan = BTreeSet::new();
    for p in c.i1() {
        for q in rp_scan(p, 3, rp_qmax_u3(p).unwrap()).unwrap() {
            from_scan.insert((p.value(), q.value()));
        }
    }
    assert!(from_records.is_subset(&from_scan));
    // Pairs in R whose biquadratic field fails through the real subfield.
    let extra: Vec<(i64, i64)> = from_scan.difference(&from_records).copied().collect();
    assert_eq!(extra, vec![(-11, 2153), (-11, 3137), (-3, 401)]);
    for (_, q) in extra {
        assert!(!class_structure(q as i128).unwrap().odd_part().exponent_divides(3));
    }
}

fn big_discriminant(r: &FamilyRecord) -> BigInt {
    let g = r.field.values();
    let mut out = BigInt::from(1);
    let mut seen = BTreeSet::new();
    for mask in 1u32..(1 << g.len()) {
        let prod: i128 = (0..g.len()).filter(|i| mask >> i & 1 == 1).map(|i| g[i] as i128).product();
        let d = field_discriminant(prod);
        if seen.insert(d) {
            out *= BigInt::from(d);
        }
    }
    out
}

#[test]
fn composite_discriminants() {
    for r in u3().records() {
        assert_eq!(BigInt::from(r.composite_discriminant), big_discriminant(&r), "{}", r.field);
        if r.field.n() == 2 && r.field.generators().iter().all(|g| !g.is_two_type()) {
            let pq: i128 = r.field.values().iter().map(|&v| v as i128).product();
            assert_eq!(r.composite_discriminant, pq * pq);
        }
    }
    // 7767369 = (3 * 929)^2.
    for (gens, disc) in [
        (vec![-3i64, 929], 7_767_369i128),
        (vec![-59, -107, 8], 6_505_835_909_336_928_256),
    ] {
        let r = u3()
            .records()
            .into_iter()
            .find(|r| r.field.values().into_iter().collect::<BTreeSet<_>>() == gens.iter().copied().collect())
            .unwrap_or_else(|| panic!("{gens:?} missing"));
        assert_eq!(r.composite_discriminant, disc);
    }
}

#[test]
fn json_round_trip_and_schema() {
    let records = u3().records();
    let text = serde_json::to_string(&records).unwrap();
    let back: Vec<FamilyRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, records);
    let raw: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    for v in raw {
        let obj = v.as_object().unwrap();
        let keys: BTreeSet<&str> = obj.keys().map(String::as_str).collect();
        assert_eq!(keys, BTreeSet::from(["class_group", "disc", "family", "generators", "n"]));
        assert!(obj["disc"].is_string());
        assert!(["1", "2a", "2b", "3a", "3b"].contains(&obj["family"].as_str().unwrap()));
        let gens: Vec<i64> = obj["generators"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        assert_eq!(gens.len() as u64, obj["n"].as_u64().unwrap());
        let keys: Vec<(u64, i64)> =
            gens.iter().map(|&g| PrimeStarDiscriminant::new(g).unwrap().sort_key()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let cg: Vec<u64> = obj["class_group"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        assert!(cg.windows(2).all(|w| w[1] % w[0] == 0));
    }
}
