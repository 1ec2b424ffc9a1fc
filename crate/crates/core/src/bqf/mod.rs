//! Class groups of quadratic fields via binary quadratic forms.
//!
//! Negative discriminants use reduced positive definite forms. Positive
//! discriminants use cycles of reduced indefinite forms, so the group that
//! comes out is the narrow class group. Both are enumerated completely and
//! the invariant factors are read off from element counts; the
//! discriminants that occur here have class numbers in the thousands at
//! most.

mod cache;
mod forms;
mod group;
mod structure;

pub use cache::ClassGroupCache;
pub use forms::{
    compose_raw, enumerate_definite, enumerate_indefinite, is_reduced_definite,
    is_reduced_indefinite, reduce_definite, reduce_indefinite, rho, sqrt_mod, QuadForm,
};
pub use structure::{odd_part, GroupStructure};

use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_fundamental, isqrt, kronecker, primes_below};
use crate::error::{Error, Result};
use group::{multiply, power, reduce_form, FormClassGroup};

/// Class group (narrow for `D > 0`) with a generating set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    pub discriminant: i128,
    pub structure: GroupStructure,
    pub generators: Vec<QuadForm>,
}

/// How much work `exponent_divides` may skip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Cheap disqualifiers first, exact computation on survivors.
    Fast,
}

fn check_fundamental(d: i128) -> Result<()> {
    if is_fundamental(d) {
        Ok(())
    } else {
        Err(Error::NotFundamental(d))
    }
}

/// All reduced forms of a negative fundamental discriminant.
pub fn reduced_forms_imaginary(d: i128) -> Result<Vec<QuadForm>> {
    if d >= 0 {
        return Err(Error::NotFundamental(d));
    }
    check_fundamental(d)?;
    Ok(enumerate_definite(d))
}

/// Reduced representative of the product class.
pub fn compose(f: &QuadForm, g: &QuadForm, d: i128) -> Result<QuadForm> {
    for x in [f, g] {
        if x.discriminant() != d {
            return Err(Error::DiscriminantMismatch(x.discriminant(), d));
        }
    }
    let s = if d > 0 { isqrt(d as u128) as i128 } else { 0 };
    if d < 0 {
        let (f, g) = (reduce_definite(normalize_sign(*f)), reduce_definite(normalize_sign(*g)));
        return Ok(multiply(&f, &g, d, s));
    }
    let (f, g) = (reduce_indefinite(*f, d, s), reduce_indefinite(*g, d, s));
    Ok(multiply(&f, &g, d, s))
}

fn normalize_sign(f: QuadForm) -> QuadForm {
    if f.a < 0 {
        QuadForm::new(-f.a, -f.b, -f.c)
    } else {
        f
    }
}

/// Class group of a fundamental discriminant; narrow when `d > 0`.
pub fn class_group(d: i128) -> Result<ClassGroup> {
    check_fundamental(d)?;
    let g = FormClassGroup::new(d);
    let structure = g.structure();
    let generators = g.generators(structure.exponent());
    Ok(ClassGroup { discriminant: d, structure, generators })
}

/// Invariant factors only.
pub fn class_structure(d: i128) -> Result<GroupStructure> {
    check_fundamental(d)?;
    Ok(FormClassGroup::new(d).structure())
}

/// One reduced indefinite form per rho-cycle; the count is `h+(d)`.
pub fn narrow_cycles_indefinite(d: i128) -> Result<Vec<QuadForm>> {
    if d <= 0 {
        return Err(Error::NotFundamental(d));
    }
    check_fundamental(d)?;
    Ok(FormClassGroup::new(d).reps().to_vec())
}

/// Order of the class of `f` in the (narrow) class group, by brute force
/// over `1..=limit`.
pub fn form_order(f: &QuadForm, limit: u64) -> Option<u64> {
    let d = f.discriminant();
    let s = if d > 0 { isqrt(d as u128) as i128 } else { 0 };
    let id = reduce_form(QuadForm::principal(d), d, s);
    let start = reduce_form(*f, d, s);
    let mut x = start;
    for k in 1..=limit {
        if same_class(&x, &id, d, s) {
            return Some(k);
        }
        x = multiply(&x, &start, d, s);
    }
    None
}

fn same_class(f: &QuadForm, g: &QuadForm, d: i128, s: i128) -> bool {
    if d < 0 {
        return f == g;
    }
    let mut x = *f;
    loop {
        if x == *g {
            return true;
        }
        x = rho(&x, d, s);
        if x == *f {
            return false;
        }
    }
}

/// Splits a fundamental discriminant into its prime discriminants.
pub fn prime_discriminants(d: i128) -> Vec<i128> {
    let mut out = Vec::new();
    let mut rest = d;
    for p in factor(d.unsigned_abs()).primes() {
        if p == 2 {
            continue;
        }
        let ps = if p % 4 == 1 { p as i128 } else { -(p as i128) };
        out.push(ps);
        rest /= ps;
    }
    if rest != 1 {
        out.push(rest);
    }
    out
}

/// Number of prime discriminants `t`; the 2-rank of the (narrow) class
/// group is `t - 1`.
pub fn genus_count(d: i128) -> usize {
    factor(d.unsigned_abs()).factors.len()
}

/// Decides `4 | h+(d1 d2)` for two distinct prime discriminants.
pub fn four_divides_two_prime(d1: i128, d2: i128) -> bool {
    let p1 = prime_of(d1);
    let p2 = prime_of(d2);
    kronecker(d1, p2 as i128) == 1 && kronecker(d2, p1 as i128) == 1
}

fn prime_of(d: i128) -> u128 {
    let a = d.unsigned_abs();
    if a % 2 == 0 {
        2
    } else {
        a
    }
}

/// Number of split-prime forms tried by the fast path.
pub const FAST_PRIME_FORMS: usize = 12;
const FAST_PRIME_BOUND: u64 = 2000;

/// Whether the exponent of the (narrow) class group divides `m`.
///
/// Fast mode may answer `false` early; it never answers `true` without the
/// exact computation.
pub fn exponent_divides(d: i128, m: u64, mode: Mode) -> Result<bool> {
    check_fundamental(d)?;
    assert!(m >= 1);
    if mode == Mode::Fast && !passes_cheap_tests(d, m) {
        return Ok(false);
    }
    Ok(class_structure(d)?.exponent_divides(m))
}

/// Genus, Redei and prime-form disqualifiers. `false` means the exponent
/// certainly does not divide `m`.
pub fn passes_cheap_tests(d: i128, m: u64) -> bool {
    let t = genus_count(d);
    let two_rank = t - 1;
    if two_rank > 0 && m % 2 == 1 {
        return false;
    }
    if t == 2 && m % 4 != 0 {
        let pd = prime_discriminants(d);
        if four_divides_two_prime(pd[0], pd[1]) {
            return false;
        }
    }
    if d < 0 {
        prime_forms_killed_by(d, m, FAST_PRIME_FORMS)
    } else {
        true
    }
}

/// Checks `f^m = 1` for the forms over the first `count` split primes.
pub fn prime_forms_killed_by(d: i128, m: u64, count: usize) -> bool {
    debug_assert!(d < 0);
    let mut tried = 0;
    for &l in small_primes() {
        if tried == count {
            break;
        }
        if kronecker(d, l as i128) != 1 {
            continue;
        }
        let f = QuadForm::prime_form(d, l).expect("split prime has a form");
        let x = power(&reduce_definite(f), m, d, 0);
        if x.a != 1 {
            return false;
        }
        tried += 1;
    }
    true
}

/// Whether the odd part of the exponent of `Cl(d)`, `d < 0`, divides the odd
/// number `u`, using prime forms only; `false` is conclusive.
pub fn prime_forms_odd_order_divides(d: i128, u: u64, count: usize) -> bool {
    let mut tried = 0;
    for &l in small_primes() {
        if tried == count {
            break;
        }
        if kronecker(d, l as i128) != 1 {
            continue;
        }
        let f = reduce_definite(QuadForm::prime_form(d, l).expect("split prime has a form"));
        let mut x = power(&f, u, d, 0);
        let mut ok = false;
        for _ in 0..64 {
            if x.a == 1 {
                ok = true;
                break;
            }
            x = multiply(&x, &x, d, 0);
        }
        if !ok {
            return false;
        }
        tried += 1;
    }
    true
}

fn small_primes() -> &'static [u64] {
    static P: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    P.get_or_init(|| primes_below(FAST_PRIME_BOUND))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_group_examples() {
        assert_eq!(class_group(-4027).unwrap().structure.divisors(), &[3, 3]);
        assert_eq!(class_group(-47).unwrap().structure.divisors(), &[5]);
        assert_eq!(class_group(-5761140).unwrap().structure.divisors(), &[2, 2, 2, 2, 6, 6]);
        assert_eq!(class_group(-37363).unwrap().structure.divisors(), &[5, 5]);
        assert!(class_group(-3).unwrap().structure.is_trivial());
        assert!(class_group(-12).is_err());
        assert!(class_group(1).is_err());
    }

    #[test]
    fn compose_examples() {
        let d = -23;
        let f = QuadForm::new(2, 1, 3);
        assert_eq!(compose(&f, &f, d).unwrap(), QuadForm::new(2, -1, 3));
        assert_eq!(compose(&QuadForm::principal(d), &f, d).unwrap(), f);
        assert_eq!(compose(&f, &f.inverse(), d).unwrap(), QuadForm::principal(d));
        assert!(compose(&f, &QuadForm::new(1, 1, 1), d).is_err());
    }

    #[test]
    fn narrow_cycles_examples() {
        assert_eq!(narrow_cycles_indefinite(5).unwrap().len(), 1);
        assert_eq!(narrow_cycles_indefinite(12).unwrap().len(), 2);
        // 2787 = 3 * 929 is not fundamental; the real subfield of
        // Q(sqrt -3, sqrt 929) is Q(sqrt 929)
        assert!(narrow_cycles_indefinite(2787).is_err());
        let s = class_structure(929).unwrap();
        assert!(3 % s.odd_part().exponent() == 0);
        assert_eq!(narrow_cycles_indefinite(11148).unwrap().len() as u128, class_structure(11148).unwrap().order());
    }

    #[test]
    fn exponent_divides_examples() {
        for mode in [Mode::Exact, Mode::Fast] {
            assert!(exponent_divides(-23, 3, mode).unwrap());
            assert!(exponent_divides(-2787, 6, mode).unwrap());
            assert!(exponent_divides(-4, 1, mode).unwrap());
            assert!(!exponent_divides(-5761140, 3, mode).unwrap());
            assert!(exponent_divides(-5761140, 6, mode).unwrap());
        }
    }

    #[test]
    fn prime_discriminant_split() {
        assert_eq!(prime_discriminants(-2787), vec![-3, 929]);
        assert_eq!(prime_discriminants(-20), vec![5, -4]);
        assert_eq!(prime_discriminants(-24), vec![-3, 8]);
        assert_eq!(prime_discriminants(8), vec![8]);
        assert_eq!(prime_discriminants(-4), vec![-4]);
    }

    #[test]
    fn form_orders() {
        assert_eq!(form_order(&QuadForm::new(2, 1, 3), 10), Some(3));
        assert_eq!(form_order(&QuadForm::new(1, 2, -2), 10), Some(1));
        assert_eq!(form_order(&QuadForm::new(-1, 2, 2), 10), Some(2));
    }
}
