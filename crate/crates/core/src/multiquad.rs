//! Multiquadratic fields generated by prime discriminants, their quadratic
//! subfields and the odd part of their class groups.
//!
//! For a field with Galois group `C2^n`, `n <= 3`, the odd part of the class
//! group is the product of the odd parts of the class groups of its
//! `2^n - 1` quadratic subfields.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{field_discriminant, PrimeStarDiscriminant};
use crate::bqf::{ClassGroupCache, GroupStructure};
use crate::error::{Error, Result};
use crate::froehlich::narrow_h_odd;

/// A multiquadratic field `Q(sqrt g1, ..., sqrt gn)`, generators kept in
/// canonical order `(|g|, g)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    generators: Vec<PrimeStarDiscriminant>,
}

impl FieldSpec {
    pub fn new(mut generators: Vec<PrimeStarDiscriminant>) -> Result<Self> {
        if generators.is_empty() || generators.len() > 3 {
            return Err(Error::InvalidField(format!(
                "expected 1 to 3 generators, got {}",
                generators.len()
            )));
        }
        generators.sort();
        let mut odd: Vec<u64> = generators.iter().filter(|g| !g.is_two_type()).map(|g| g.prime()).collect();
        odd.dedup();
        let twos: Vec<i64> =
            generators.iter().filter(|g| g.is_two_type()).map(|g| g.value()).collect();
        let odd_count = generators.len() - twos.len();
        if odd.len() != odd_count {
            return Err(Error::InvalidField("repeated odd prime".into()));
        }
        if twos.len() > 1 && twos != [-4, -8] {
            return Err(Error::InvalidField(format!("2-adic generators {twos:?}")));
        }
        Ok(FieldSpec { generators })
    }

    pub fn from_values(values: &[i64]) -> Result<Self> {
        let gens = values.iter().map(|&v| PrimeStarDiscriminant::new(v)).collect::<Result<_>>()?;
        FieldSpec::new(gens)
    }

    pub fn generators(&self) -> &[PrimeStarDiscriminant] {
        &self.generators
    }

    pub fn values(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.value()).collect()
    }

    pub fn n(&self) -> usize {
        self.generators.len()
    }

    pub fn negative_count(&self) -> usize {
        self.generators.iter().filter(|g| g.is_negative()).count()
    }

    pub fn is_imaginary(&self) -> bool {
        self.negative_count() > 0
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| format!("sqrt({g})")).collect();
        write!(f, "Q({})", parts.join(", "))
    }
}

/// Discriminants of all quadratic subfields, in subset order, deduplicated.
pub fn quadratic_subfields(f: &FieldSpec) -> Vec<i128> {
    let g = f.generators();
    let mut out: Vec<i128> = Vec::new();
    for mask in 1u32..(1 << g.len()) {
        let prod: i128 = (0..g.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| g[i].value() as i128)
            .product();
        let d = field_discriminant(prod);
        if !out.contains(&d) {
            out.push(d);
        }
    }
    out
}

/// Product of the discriminants of all quadratic subfields.
pub fn composite_discriminant(f: &FieldSpec) -> Result<i128> {
    quadratic_subfields(f).into_iter().try_fold(1i128, |acc, d| {
        acc.checked_mul(d)
            .ok_or_else(|| Error::RangeFault(format!("composite discriminant of {f}")))
    })
}

/// Odd part of the class group, as the product over quadratic subfields
/// (narrow groups for the real ones).
pub fn odd_class_group(f: &FieldSpec, cache: &ClassGroupCache) -> Result<GroupStructure> {
    let mut acc = GroupStructure::trivial();
    for d in quadratic_subfields(f) {
        acc = acc.product(&cache.structure(d)?.odd_part());
    }
    Ok(acc)
}

/// Why a field fails the exponent test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    EvenNarrowClassNumber,
    ExponentTooLarge { discriminant: i128, exponent: u64 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::EvenNarrowClassNumber => write!(f, "narrow class number is even"),
            Rejection::ExponentTooLarge { discriminant, exponent } => write!(
                f,
                "odd part of Cl({discriminant}) has exponent {exponent}"
            ),
        }
    }
}

/// The odd class group if the narrow class number is odd and every
/// subfield's odd exponent divides `u`.
pub fn class_group_if_exponent_divides(
    f: &FieldSpec,
    u: u64,
    cache: &ClassGroupCache,
) -> Result<std::result::Result<GroupStructure, Rejection>> {
    assert!(u % 2 == 1, "u must be odd");
    if !narrow_h_odd(f) {
        return Ok(Err(Rejection::EvenNarrowClassNumber));
    }
    let mut acc = GroupStructure::trivial();
    for d in quadratic_subfields(f) {
        let odd = cache.structure(d)?.odd_part();
        if !odd.exponent_divides(u) {
            return Ok(Err(Rejection::ExponentTooLarge { discriminant: d, exponent: odd.exponent() }));
        }
        acc = acc.product(&odd);
    }
    Ok(Ok(acc))
}

/// Family tag of a classified field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2a")]
    TwoA,
    #[serde(rename = "2b")]
    TwoB,
    #[serde(rename = "3a")]
    ThreeA,
    #[serde(rename = "3b")]
    ThreeB,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::One, Family::TwoA, Family::TwoB, Family::ThreeA, Family::ThreeB];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::One => "1",
            Family::TwoA => "2a",
            Family::TwoB => "2b",
            Family::ThreeA => "3a",
            Family::ThreeB => "3b",
        }
    }

    /// Tag implied by the number and signs of the generators.
    pub fn of(field: &FieldSpec) -> Option<Family> {
        match (field.n(), field.negative_count()) {
            (1, 1) => Some(Family::One),
            (2, 2) => Some(Family::TwoA),
            (2, 1) => Some(Family::TwoB),
            (3, 3) => Some(Family::ThreeA),
            (3, 2) => Some(Family::ThreeB),
            _ => None,
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family tag {s:?}")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A classified field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RecordJson", try_from = "RecordJson")]
pub struct FamilyRecord {
    pub field: FieldSpec,
    pub family: Family,
    pub class_group: GroupStructure,
    pub composite_discriminant: i128,
}

impl FamilyRecord {
    pub fn new(field: FieldSpec, class_group: GroupStructure) -> Result<Self> {
        let family = Family::of(&field)
            .ok_or_else(|| Error::InvalidField(format!("{field} is not imaginary")))?;
        let composite_discriminant = composite_discriminant(&field)?;
        Ok(FamilyRecord { field, family, class_group, composite_discriminant })
    }

    /// Rank of the class group (`r` in `C_u^r`).
    pub fn rank(&self) -> usize {
        self.class_group.rank()
    }

    pub fn sort_key(&self) -> (Family, i128, Vec<i64>) {
        (self.family, self.composite_discriminant, self.field.values())
    }
}

#[derive(Serialize, Deserialize)]
struct RecordJson {
    generators: Vec<i64>,
    n: usize,
    family: Family,
    disc: String,
    class_group: Vec<u64>,
}

impl From<FamilyRecord> for RecordJson {
    fn from(r: FamilyRecord) -> Self {
        RecordJson {
            generators: r.field.values(),
            n: r.field.n(),
            family: r.family,
            disc: r.composite_discriminant.to_string(),
            class_group: r.class_group.into(),
        }
    }
}

impl TryFrom<RecordJson> for FamilyRecord {
    type Error = Error;
    fn try_from(j: RecordJson) -> Result<Self> {
        let field = FieldSpec::from_values(&j.generators)?;
        if field.n() != j.n {
            return Err(Error::Parse(format!("n = {} but {} generators", j.n, field.n())));
        }
        let disc: i128 =
            j.disc.parse().map_err(|_| Error::Parse(format!("bad disc {:?}", j.disc)))?;
        let rec = FamilyRecord {
            family: j.family,
            class_group: GroupStructure::from(j.class_group),
            composite_discriminant: disc,
            field,
        };
        Ok(rec)
    }
}
