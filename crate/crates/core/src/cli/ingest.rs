//! External class-group tables (`discriminant,d1;d2;...`) used as a
//! cross-check on computed structures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::is_fundamental;
use crate::bqf::{ClassGroupCache, GroupStructure};

/// Imported structures keyed by discriminant.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestTable {
    pub entries: BTreeMap<i128, Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub discriminant: i128,
    pub ingested: Vec<u64>,
    pub computed: Vec<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub accepted: usize,
    pub skipped: usize,
    pub warnings: Vec<String>,
    pub disagreements: Vec<Disagreement>,
}

fn parse_row(line: &str) -> Result<(i128, Vec<u64>), String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 2 {
        return Err(format!("expected 2 fields, got {}", fields.len()));
    }
    let d: i128 = fields[0].parse().map_err(|_| format!("bad discriminant {:?}", fields[0]))?;
    let divisors: Vec<u64> = if fields[1].is_empty() {
        Vec::new()
    } else {
        fields[1]
            .split(';')
            .map(|v| v.trim().parse().map_err(|_| format!("bad divisor {v:?}")))
            .collect::<Result<_, _>>()?
    };
    if divisors.iter().any(|&x| x < 2) {
        return Err("divisors must exceed 1".into());
    }
    if divisors.windows(2).any(|w| w[1] % w[0] != 0) {
        return Err(format!("{divisors:?} is not a divisor chain"));
    }
    Ok((d, divisors))
}

/// Parses and checks a CSV dump. Malformed rows are skipped with a warning;
/// disagreements with the computed structure are recorded, not fatal.
pub fn ingest_csv(text: &str, cache: &ClassGroupCache) -> (IngestTable, IngestSummary) {
    let mut table = IngestTable::default();
    let mut sum = IngestSummary::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if i == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        sum.rows += 1;
        let mut skip = |msg: String| {
            log::warn!("line {}: {msg}, skipped", i + 1);
            sum.warnings.push(format!("line {}: {msg}", i + 1));
            sum.skipped += 1;
        };
        let (d, divisors) = match parse_row(line) {
            Ok(v) => v,
            Err(msg) => {
                skip(msg);
                continue;
            }
        };
        if !is_fundamental(d) {
            skip(format!("{d} is not a fundamental discriminant"));
            continue;
        }
        let computed = match cache.structure(d) {
            Ok(s) => s,
            Err(e) => {
                skip(e.to_string());
                continue;
            }
        };
        // A lone entry equal to h for a non-cyclic group is a class number
        // written where invariant factors belong.
        if divisors.len() == 1 && computed.rank() > 1 && divisors[0] as u128 == computed.order() {
            skip(format!("{:?} looks like the class number, not invariant factors", divisors));
            continue;
        }
        sum.accepted += 1;
        if computed.divisors() != divisors.as_slice() {
            sum.disagreements.push(Disagreement {
                discriminant: d,
                ingested: divisors.clone(),
                computed: computed.divisors().to_vec(),
            });
        }
        table.entries.insert(d, divisors);
    }
    (table, sum)
}

/// Entries of `table` that disagree with structures already in `cache`.
pub fn compare_with_cache(table: &IngestTable, cache: &ClassGroupCache) -> Vec<Disagreement> {
    table
        .entries
        .iter()
        .filter_map(|(&d, want)| {
            let got: GroupStructure = cache.get(d)?;
            (got.divisors() != want.as_slice()).then(|| Disagreement {
                discriminant: d,
                ingested: want.clone(),
                computed: got.divisors().to_vec(),
            })
        })
        .collect()
}
