//! Bundled reference tables and the checks `verify` runs against them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::families::rank_histogram;
use crate::multiquad::{Family, FamilyRecord};
use crate::{Error, Result};

pub const I1_U3: &str = include_str!("../../data/i1_u3.csv");
pub const I1_U5: &str = include_str!("../../data/i1_u5.csv");
pub const RANK_TABLES: &str = include_str!("../../data/rank_tables.csv");
pub const RP_U5: &str = include_str!("../../data/rp_u5.csv");
pub const MAXDISC: &str = include_str!("../../data/maxdisc.csv");

/// `p* -> R_{p*}`, rows absent from a table meaning the empty set.
pub type RpTable = BTreeMap<i64, Vec<i64>>;

/// Maximal discriminant of one (family, rank) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxDisc {
    pub disc: i128,
    pub generators: Vec<i64>,
}

/// Published data used only by verification.
#[derive(Debug, Clone, Default)]
pub struct ExpectedData {
    /// `u -> {(rank, p*)}`.
    pub i1: BTreeMap<u64, BTreeSet<(usize, i64)>>,
    /// Histogram `r = 0..=4` followed by the total.
    pub rank_tables: BTreeMap<(u64, Family), [usize; 6]>,
    pub rp: BTreeMap<u64, RpTable>,
    pub maxdisc: BTreeMap<(u64, Family, usize), MaxDisc>,
}

/// Data rows of a headed CSV file: `(line number, fields)`.
pub(crate) fn csv_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect()))
}

fn parse<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("line {line}: bad {what} {s:?}")))
}

pub(crate) fn parse_list(s: &str, line: usize) -> Result<Vec<i64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|v| parse(v.trim(), "integer", line)).collect()
}

fn expect_fields(fields: &[&str], n: usize, line: usize) -> Result<()> {
    if fields.len() != n {
        return Err(Error::Parse(format!("line {line}: expected {n} fields, got {}", fields.len())));
    }
    Ok(())
}

/// Parses an `R` table: `p_star,q1;q2;...`.
pub fn parse_rp_table(text: &str) -> Result<RpTable> {
    let mut out = RpTable::new();
    for (line, f) in csv_rows(text) {
        expect_fields(&f, 2, line)?;
        out.insert(parse(f[0], "p*", line)?, parse_list(f[1], line)?);
    }
    Ok(out)
}

impl ExpectedData {
    /// The tables compiled into the binary.
    pub fn bundled() -> Self {
        Self::from_texts(I1_U3, I1_U5, RANK_TABLES, RP_U5, MAXDISC)
            .expect("bundled fixtures parse")
    }

    /// Reads `i1_u3.csv`, `i1_u5.csv`, `rank_tables.csv`, `rp_u5.csv` and
    /// `maxdisc.csv` from `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let read = |name: &str| -> Result<String> {
            std::fs::read_to_string(dir.join(name))
                .map_err(|e| Error::Parse(format!("{}: {e}", dir.join(name).display())))
        };
        Self::from_texts(
            &read("i1_u3.csv")?,
            &read("i1_u5.csv")?,
            &read("rank_tables.csv")?,
            &read("rp_u5.csv")?,
            &read("maxdisc.csv")?,
        )
    }

    fn from_texts(i1_u3: &str, i1_u5: &str, ranks: &str, rp_u5: &str, maxdisc: &str) -> Result<Self> {
        let mut e = ExpectedData::default();
        for (u, text) in [(3, i1_u3), (5, i1_u5)] {
            let set = e.i1.entry(u).or_default();
            for (line, f) in csv_rows(text) {
                expect_fields(&f, 2, line)?;
                set.insert((parse(f[0], "rank", line)?, parse(f[1], "p*", line)?));
            }
        }
        for (line, f) in csv_rows(ranks) {
            expect_fields(&f, 8, line)?;
            let u = parse(f[0], "u", line)?;
            let family: Family = f[1].parse()?;
            let mut row = [0usize; 6];
            for (k, v) in f[2..].iter().enumerate() {
                row[k] = parse(v, "count", line)?;
            }
            e.rank_tables.insert((u, family), row);
        }
        e.rp.insert(5, parse_rp_table(rp_u5)?);
        for (line, f) in csv_rows(maxdisc) {
            expect_fields(&f, 5, line)?;
            let key = (parse(f[0], "u", line)?, f[1].parse()?, parse(f[2], "rank", line)?);
            let md = MaxDisc { disc: parse(f[3], "disc", line)?, generators: parse_list(f[4], line)? };
            e.maxdisc.insert(key, md);
        }
        Ok(e)
    }

    pub fn kappa(&self, u: u64, family: Family) -> Option<usize> {
        self.rank_tables.get(&(u, family)).map(|r| r[5])
    }

    /// `R_{p*}` for every `p*` in I1, empty where the table has no row.
    pub fn rp_rows(&self, u: u64) -> Option<RpTable> {
        let table = self.rp.get(&u)?;
        let i1 = self.i1.get(&u)?;
        Some(i1.iter().map(|&(_, p)| (p, table.get(&p).cloned().unwrap_or_default())).collect())
    }
}

/// One failed comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub check: String,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub u: u64,
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    fn new(u: u64) -> Self {
        VerifyReport { u, checks: 0, mismatches: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, expected: String, found: String) {
        self.checks += 1;
        if expected != found {
            self.mismatches.push(Mismatch { check: name.into(), expected, found });
        }
    }

    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `u` from the class groups in a record list: the unique prime occurring.
pub fn infer_u(records: &[FamilyRecord]) -> Option<u64> {
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    for r in records {
        seen.extend(r.class_group.divisors().iter().copied());
    }
    match seen.len() {
        1 => seen.into_iter().next(),
        _ => None,
    }
}

fn fmt_list<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn describe(r: &FamilyRecord) -> String {
    format!("{} {} [{}] {}", r.family, r.composite_discriminant, fmt_list(r.field.values()), r.class_group)
}

/// Compares records (and optionally their `R` sets) with the published tables.
pub fn verify_tables(
    records: &[FamilyRecord],
    rp: Option<&RpTable>,
    u: u64,
    expected: &ExpectedData,
) -> VerifyReport {
    let mut rep = VerifyReport::new(u);
    let by_family = |f: Family| -> Vec<FamilyRecord> {
        records.iter().filter(|r| r.family == f).cloned().collect()
    };

    if let Some(want) = expected.i1.get(&u) {
        let got: BTreeSet<(usize, i64)> = by_family(Family::One)
            .iter()
            .map(|r| (r.rank(), r.field.values()[0]))
            .collect();
        for (rank, p) in want.difference(&got) {
            rep.mismatches.push(Mismatch {
                check: format!("I1 p* = {p}"),
                expected: format!("rank {rank}"),
                found: "missing".into(),
            });
        }
        for (rank, p) in got.difference(want) {
            rep.mismatches.push(Mismatch {
                check: format!("I1 p* = {p}"),
                expected: "absent".into(),
                found: format!("rank {rank}"),
            });
        }
        rep.checks += want.len();
    }

    for family in Family::ALL {
        let Some(row) = expected.rank_tables.get(&(u, family)) else { continue };
        let recs = by_family(family);
        let h = rank_histogram(&recs);
        rep.check(format!("kappa {family}"), row[5].to_string(), recs.len().to_string());
        rep.check(format!("rank histogram {family}"), fmt_list(&row[..5]), fmt_list(h));
    }

    let mut computed: BTreeMap<(Family, usize), &FamilyRecord> = BTreeMap::new();
    for r in records.iter().filter(|r| r.family != Family::One && r.rank() > 0) {
        let e = computed.entry((r.family, r.rank())).or_insert(r);
        if r.composite_discriminant > e.composite_discriminant {
            *e = r;
        }
    }
    let expected_cells: Vec<_> = expected.maxdisc.iter().filter(|((eu, _, _), _)| *eu == u).collect();
    if !expected_cells.is_empty() {
        for ((_, family, rank), md) in &expected_cells {
            let found = computed
                .get(&(*family, *rank))
                .map(|r| format!("{} [{}]", r.composite_discriminant, fmt_list(r.field.values())))
                .unwrap_or_else(|| "missing".into());
            rep.check(
                format!("max disc {family} rank {rank}"),
                format!("{} [{}]", md.disc, fmt_list(&md.generators)),
                found,
            );
        }
        for ((family, rank), r) in &computed {
            if !expected.maxdisc.contains_key(&(u, *family, *rank)) {
                rep.check(format!("max disc {family} rank {rank}"), "absent".into(), describe(r));
            }
        }
    }

    if let Some(want) = expected.rp_rows(u) {
        match rp {
            None => rep.check("R table", "present".into(), "missing rp.csv".into()),
            Some(got) => {
                for (p, qs) in &want {
                    let found = got.get(p).map(|v| fmt_list(v)).unwrap_or_else(|| "missing row".into());
                    rep.check(format!("R_{p}"), fmt_list(qs), found);
                }
            }
        }
    }
    rep
}

/// Record-level comparison with a reference `records.json`.
pub fn verify_records(records: &[FamilyRecord], golden: &[FamilyRecord], u: u64) -> VerifyReport {
    let mut rep = VerifyReport::new(u);
    let key = |r: &FamilyRecord| (r.family, r.composite_discriminant, r.field.values());
    let got: BTreeMap<_, &FamilyRecord> = records.iter().map(|r| (key(r), r)).collect();
    let want: BTreeMap<_, &FamilyRecord> = golden.iter().map(|r| (key(r), r)).collect();
    for (k, w) in &want {
        rep.checks += 1;
        match got.get(k) {
            None => rep.mismatches.push(Mismatch {
                check: format!("record {} {}", w.family, w.composite_discriminant),
                expected: describe(w),
                found: "missing".into(),
            }),
            Some(g) if g.class_group != w.class_group => rep.mismatches.push(Mismatch {
                check: format!("record {} {}", w.family, w.composite_discriminant),
                expected: describe(w),
                found: describe(g),
            }),
            Some(_) => {}
        }
    }
    for (k, g) in &got {
        if !want.contains_key(k) {
            rep.mismatches.push(Mismatch {
                check: format!("record {} {}", g.family, g.composite_discriminant),
                expected: "absent".into(),
                found: describe(g),
            });
        }
    }
    rep
}
