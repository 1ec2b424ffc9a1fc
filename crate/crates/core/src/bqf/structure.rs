use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::factor;

/// Finite abelian group given by its invariant factors `d1 | d2 | ... | dk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct GroupStructure {
    divisors: Vec<u64>,
}

impl GroupStructure {
    pub fn trivial() -> Self {
        GroupStructure::default()
    }

    /// Builds the invariant-factor form of a product of cyclic groups of the
    /// given orders (in any order, ones allowed).
    pub fn from_cyclic<I: IntoIterator<Item = u64>>(orders: I) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for n in orders {
            assert!(n >= 1, "cyclic factor of order 0");
            for (p, e) in factor(n as u128).factors {
                by_prime.entry(p as u64).or_default().push((p as u64).pow(e));
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut divisors = vec![1u64; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (i, q) in powers.iter().enumerate() {
                divisors[len - 1 - i] *= q;
            }
        }
        GroupStructure { divisors }
    }

    /// Direct product.
    pub fn product(&self, other: &GroupStructure) -> GroupStructure {
        GroupStructure::from_cyclic(self.divisors.iter().chain(&other.divisors).copied())
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn order(&self) -> u128 {
        self.divisors.iter().map(|&d| d as u128).product()
    }

    pub fn exponent(&self) -> u64 {
        self.divisors.last().copied().unwrap_or(1)
    }

    /// Number of invariant factors.
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// `dim_{F_p} G/pG`.
    pub fn p_rank(&self, p: u64) -> usize {
        self.divisors.iter().filter(|&&d| d % p == 0).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn odd_part(&self) -> GroupStructure {
        odd_part(self)
    }

    /// True when the exponent divides `m`.
    pub fn exponent_divides(&self, m: u64) -> bool {
        m % self.exponent() == 0
    }
}

/// Removes the 2-primary component.
pub fn odd_part(s: &GroupStructure) -> GroupStructure {
    GroupStructure::from_cyclic(s.divisors.iter().map(|&d| d >> d.trailing_zeros()))
}

impl From<Vec<u64>> for GroupStructure {
    fn from(v: Vec<u64>) -> Self {
        GroupStructure::from_cyclic(v)
    }
}

impl From<GroupStructure> for Vec<u64> {
    fn from(g: GroupStructure) -> Vec<u64> {
        g.divisors
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divisors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.divisors.iter().map(|d| format!("C{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_factor_normal_form() {
        let g = GroupStructure::from_cyclic([6, 2, 2, 6, 2, 2]);
        assert_eq!(g.divisors(), &[2, 2, 2, 2, 6, 6]);
        assert_eq!(g.order(), 576);
        assert_eq!(g.exponent(), 6);
        assert_eq!(GroupStructure::from_cyclic([4, 6]).divisors(), &[2, 12]);
        assert_eq!(GroupStructure::from_cyclic([1, 1]).divisors(), &[] as &[u64]);
        assert_eq!(GroupStructure::from_cyclic([3, 5]).divisors(), &[15]);
    }

    #[test]
    fn odd_part_examples() {
        let g = GroupStructure::from_cyclic([2, 2, 2, 2, 6, 6]);
        assert_eq!(odd_part(&g).divisors(), &[3, 3]);
        assert_eq!(odd_part(&GroupStructure::from_cyclic([5])).divisors(), &[5]);
        assert!(odd_part(&GroupStructure::trivial()).is_trivial());
    }

    #[test]
    fn serde_is_a_plain_list() {
        let g = GroupStructure::from_cyclic([3, 3]);
        assert_eq!(serde_json::to_string(&g).unwrap(), "[3,3]");
        let back: GroupStructure = serde_json::from_str("[9,3]").unwrap();
        assert_eq!(back.divisors(), &[3, 9]);
    }
}
