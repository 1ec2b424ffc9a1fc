//! Text renderings of a classification: counts.csv, maxdisc.csv, rp.csv.

use std::fmt::Write;

use crate::families::{max_discriminants, rank_histogram, Classification, RpMap};
use crate::multiquad::{Family, FamilyRecord};

fn row(out: &mut String, label: &str, h: [usize; 5]) {
    let total: usize = h.iter().sum();
    let cells: Vec<String> = h.iter().map(usize::to_string).collect();
    writeln!(out, "{label},{},{total}", cells.join(",")).expect("write to String");
}

fn add(a: [usize; 5], b: [usize; 5]) -> [usize; 5] {
    std::array::from_fn(|i| a[i] + b[i])
}

/// Rank tables: I1, then 2a, 2b and their total, then 3a, 3b and theirs.
pub fn counts_csv(c: &Classification) -> String {
    let mut out = String::from("family,r0,r1,r2,r3,r4,total\n");
    let h = |f: Family| rank_histogram(c.family(f));
    row(&mut out, "1", h(Family::One));
    row(&mut out, "2a", h(Family::TwoA));
    row(&mut out, "2b", h(Family::TwoB));
    row(&mut out, "total", add(h(Family::TwoA), h(Family::TwoB)));
    row(&mut out, "3a", h(Family::ThreeA));
    row(&mut out, "3b", h(Family::ThreeB));
    row(&mut out, "total", add(h(Family::ThreeA), h(Family::ThreeB)));
    out
}

fn join<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Largest composite discriminant per family and rank.
pub fn maxdisc_csv(records: &[FamilyRecord]) -> String {
    let mut out = String::from("family,rank,disc,generators\n");
    for family in Family::ALL {
        let recs: Vec<FamilyRecord> = records.iter().filter(|r| r.family == family).cloned().collect();
        for (rank, r) in max_discriminants(&recs) {
            writeln!(out, "{family},{rank},{},{}", r.composite_discriminant, join(r.field.values()))
                .expect("write to String");
        }
    }
    out
}

/// One row per `p*`, empty sets included.
pub fn rp_csv(rp: &RpMap) -> String {
    let mut out = String::from("p_star,q\n");
    for (p, qs) in rp {
        writeln!(out, "{p},{}", join(qs.iter().map(|q| q.value()))).expect("write to String");
    }
    out
}

/// Records as pretty JSON, sorted by family and discriminant.
pub fn records_json(records: &[FamilyRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}
