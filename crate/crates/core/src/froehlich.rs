//! F2-valued symbols on ramified primes and the parity test for the narrow
//! class number of a multiquadratic field built from prime discriminants.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Serialize};

use crate::arith::{discrete_log_parity, is_prime};
use crate::error::{Error, Result};
use crate::multiquad::FieldSpec;

/// Element of the field with two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct F2(bool);

impl F2 {
    pub const ZERO: F2 = F2(false);
    pub const ONE: F2 = F2(true);

    pub fn is_zero(self) -> bool {
        !self.0
    }

    pub fn bit(self) -> u8 {
        self.0 as u8
    }
}

impl From<bool> for F2 {
    fn from(b: bool) -> Self {
        F2(b)
    }
}

impl Add for F2 {
    type Output = F2;
    fn add(self, rhs: F2) -> F2 {
        F2(self.0 ^ rhs.0)
    }
}

impl AddAssign for F2 {
    fn add_assign(&mut self, rhs: F2) {
        self.0 ^= rhs.0;
    }
}

impl Mul for F2 {
    type Output = F2;
    fn mul(self, rhs: F2) -> F2 {
        F2(self.0 & rhs.0)
    }
}

impl fmt::Display for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// Which quadratic subfields ramified only at 2 the field contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwoType {
    None,
    Sqrt2,
    SqrtMinus1,
    SqrtMinus2,
    Zeta8,
}

/// Ramified primes and 2-type of a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolContext {
    pub field: FieldSpec,
    /// Ramified primes, ascending (2 first when present).
    pub s: Vec<u64>,
    pub two_type: TwoType,
}

impl SymbolContext {
    pub fn new(field: &FieldSpec) -> Self {
        let mut s: Vec<u64> = field.generators().iter().map(|g| g.prime()).collect();
        s.sort_unstable();
        s.dedup();
        let twos: Vec<i64> = field
            .generators()
            .iter()
            .filter(|g| g.is_two_type())
            .map(|g| g.value())
            .collect();
        let two_type = match twos.as_slice() {
            [] => TwoType::None,
            [8] => TwoType::Sqrt2,
            [-4] => TwoType::SqrtMinus1,
            [-8] => TwoType::SqrtMinus2,
            _ => TwoType::Zeta8,
        };
        SymbolContext { field: field.clone(), s, two_type }
    }

    pub fn smallest_prime(&self) -> u64 {
        self.s[0]
    }
}

/// The symbol `[x, y]` for `x` a prime or `-1` and `y` a prime.
///
/// For odd `x` it is the parity of the index of `y` mod `x`. For `x = 2`
/// and `x = -1` it is the exponent `r` resp. `s` in `y = 5^r (-1)^s mod 8`.
pub fn symbol(x: i64, y: u64) -> Result<F2> {
    let undefined = || Error::UndefinedSymbol(x, y as i64);
    if !is_prime(y as u128) || x as i128 == y as i128 {
        return Err(undefined());
    }
    match x {
        -1 | 2 => {
            if y == 2 {
                return Err(undefined());
            }
            let r = y % 8;
            Ok(F2::from(if x == 2 { r == 3 || r == 5 } else { r == 3 || r == 7 }))
        }
        _ if x > 2 && x % 2 == 1 && is_prime(x as u128) => {
            Ok(discrete_log_parity(y as i128, x as u64))
        }
        _ => Err(undefined()),
    }
}

/// `a_{p1}(p)`: `[p1, p]` if `p1` is odd or `sqrt 2` lies in the field,
/// `[-1, p]` if `sqrt -1` does, `[2, p] + [-1, p]` if `sqrt -2` does.
pub fn a_value(ctx: &SymbolContext, p: u64, p1: u64) -> Result<F2> {
    if ctx.two_type == TwoType::Zeta8 {
        return Err(Error::Zeta8Context);
    }
    if p <= p1 {
        return Err(Error::UndefinedSymbol(p1 as i64, p as i64));
    }
    if p1 != 2 {
        return symbol(p1 as i64, p);
    }
    match ctx.two_type {
        TwoType::Sqrt2 => symbol(2, p),
        TwoType::SqrtMinus1 => symbol(-1, p),
        TwoType::SqrtMinus2 => Ok(symbol(2, p)? + symbol(-1, p)?),
        TwoType::None | TwoType::Zeta8 => Err(Error::UndefinedSymbol(2, p as i64)),
    }
}

/// Determinant over F2 of
/// `[[p2,p1], 0, [p3,p1]; a(p2), [p3,p2], 0; 0, [p2,p3], a(p3)]`.
pub fn det_m(ctx: &SymbolContext) -> Result<F2> {
    if ctx.s.len() != 3 {
        return Err(Error::RamifiedCount { expected: 3, found: ctx.s.len() });
    }
    if ctx.two_type == TwoType::Zeta8 {
        return Err(Error::Zeta8Context);
    }
    let m = matrix_m(ctx)?;
    Ok(det3(&m))
}

pub(crate) fn matrix_m(ctx: &SymbolContext) -> Result<[[F2; 3]; 3]> {
    let (p1, p2, p3) = (ctx.s[0], ctx.s[1], ctx.s[2]);
    let sym = |x: u64, y: u64| symbol(x as i64, y);
    Ok([
        [sym(p2, p1)?, F2::ZERO, sym(p3, p1)?],
        [a_value(ctx, p2, p1)?, sym(p3, p2)?, F2::ZERO],
        [F2::ZERO, sym(p2, p3)?, a_value(ctx, p3, p1)?],
    ])
}

/// Cofactor expansion over F2.
pub fn det3(m: &[[F2; 3]; 3]) -> F2 {
    m[0][0] * (m[1][1] * m[2][2] + m[1][2] * m[2][1])
        + m[0][1] * (m[1][0] * m[2][2] + m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] + m[1][1] * m[2][0])
}

/// Whether the narrow class number of the field is odd.
pub fn narrow_h_odd(field: &FieldSpec) -> bool {
    let ctx = SymbolContext::new(field);
    let sym = |x: u64, y: u64| symbol(x as i64, y).expect("symbol on distinct ramified primes");
    match field.n() {
        1 => true,
        2 => {
            if ctx.s == [2] {
                return true;
            }
            let (p1, p2) = (ctx.s[0], ctx.s[1]);
            !sym(p2, p1).is_zero()
                || !a_value(&ctx, p2, p1).expect("two distinct primes").is_zero()
        }
        3 => {
            if ctx.s.len() == 2 {
                return ctx.s[0] == 2 && !sym(ctx.s[1], 2).is_zero();
            }
            !det_m(&ctx).expect("three ramified primes").is_zero()
        }
        _ => false,
    }
}
