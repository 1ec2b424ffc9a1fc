//! Exact integer arithmetic: Kronecker symbols, primality, factorization
//! and fundamental discriminants.
//!
//! Everything works on `i128`/`u128`. Values above `2^64` go through a
//! Montgomery multiplier so that primality tests and Pollard rho stay cheap
//! for the 70-80 bit discriminants that show up in the sieve.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::froehlich::F2;

/// Kronecker symbol `(a|n)`.
///
/// # Panics
/// If `n == 0`.
pub fn kronecker(a: i128, n: i128) -> i8 {
    assert!(n != 0, "kronecker symbol with n = 0");
    let mut sign: i8 = 1;
    let mut n_abs = n.unsigned_abs();
    if n < 0 && a < 0 {
        sign = -1;
    }
    let v = n_abs.trailing_zeros();
    if v > 0 {
        if a & 1 == 0 {
            return 0;
        }
        let a8 = a.rem_euclid(8);
        if v & 1 == 1 && (a8 == 3 || a8 == 5) {
            sign = -sign;
        }
        n_abs >>= v;
    }
    if n_abs == 1 {
        return sign;
    }
    let a_red = a.rem_euclid(n_abs as i128) as u128;
    sign * jacobi(a_red, n_abs)
}

/// Jacobi symbol `(a|n)` for odd `n > 0`.
pub fn jacobi(mut a: u128, mut n: u128) -> i8 {
    debug_assert!(n & 1 == 1);
    a %= n;
    let mut sign: i8 = 1;
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        let n8 = n & 7;
        if t & 1 == 1 && (n8 == 3 || n8 == 5) {
            sign = -sign;
        }
        if a & 3 == 3 && n & 3 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Parity of the index of `y` with respect to a primitive root mod `p`.
///
/// This is residuosity: the index is even exactly when `y` is a square mod `p`.
///
/// # Panics
/// If `p` divides `y`.
pub fn discrete_log_parity(y: i128, p: u64) -> F2 {
    let k = kronecker(y, p as i128);
    assert!(k != 0, "discrete_log_parity: {p} divides {y}");
    F2::from(k == -1)
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    gcd_u128(a.unsigned_abs(), b.unsigned_abs()) as i128
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Integer square root (floor).
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u128) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Primes below `limit` by a plain sieve of Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::with_capacity(n / 10 + 8);
    for i in 2..n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

// Witness set that makes Miller-Rabin deterministic below 2^64.
const MR_BASES_64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Primality test, deterministic below `2^64`; 40 fixed Miller-Rabin bases
/// above. Inputs must stay below `2^127`.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p as u128 {
            return true;
        }
        if n % p as u128 == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    if n <= u64::MAX as u128 {
        return is_prime_u64(n as u64);
    }
    let mont = Montgomery::new(n);
    let d_shift = (n - 1).trailing_zeros();
    let d = (n - 1) >> d_shift;
    let bases = first_primes(40);
    bases.iter().all(|&a| mont.strong_probable_prime(a as u128, d, d_shift))
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

fn mulmod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn powmod_u64(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1u64 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u64(r, a, n);
        }
        a = mulmod_u64(a, a, n);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &base in &MR_BASES_64 {
        let a = base % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// 256-bit product of two `u128` values as `(hi, lo)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a0, a1) = (a & MASK, a >> 64);
    let (b0, b1) = (b & MASK, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery arithmetic modulo an odd `n < 2^127` with `R = 2^128`.
struct Montgomery {
    n: u128,
    n_neg_inv: u128,
    r2: u128,
}

impl Montgomery {
    fn new(n: u128) -> Self {
        assert!(n & 1 == 1 && n < (1u128 << 127));
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let mut r = (u128::MAX % n + 1) % n;
        for _ in 0..128 {
            r <<= 1;
            if r >= n {
                r -= n;
            }
        }
        Montgomery { n, n_neg_inv: inv.wrapping_neg(), r2: r }
    }

    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.n_neg_inv);
        let (mh, ml) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let t = hi + mh + carry as u128;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    fn one(&self) -> u128 {
        self.to_mont(1)
    }

    fn pow(&self, base: u128, mut e: u128) -> u128 {
        let mut r = self.to_mont(1);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    fn strong_probable_prime(&self, a: u128, d: u128, s: u32) -> bool {
        let one = self.to_mont(1);
        let minus_one = self.n - one;
        let mut x = self.pow(self.to_mont(a), d);
        if x == one || x == minus_one {
            return true;
        }
        for _ in 1..s {
            x = self.mul(x, x);
            if x == minus_one {
                return true;
            }
        }
        false
    }
}

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: u128,
    pub factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Product of the primes that occur to an odd power.
    pub fn squarefree_kernel(&self) -> u128 {
        self.factors
            .iter()
            .filter(|&&(_, e)| e & 1 == 1)
            .map(|&(p, _)| p)
            .product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// All positive divisors, unsorted.
    pub fn divisors(&self) -> Vec<u128> {
        let mut out = vec![1u128];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u128;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Odd primes below `2^16`, used for trial division.
fn trial_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(1 << 16).into_iter().skip(1).map(|p| p as u32).collect())
}

/// Complete factorization: trial division by primes below `2^16`, then
/// Brent's variant of Pollard rho with a deterministic sequence of
/// polynomials.
///
/// # Panics
/// If `n == 0`.
pub fn factor(n: u128) -> Factorization {
    assert!(n >= 1, "factor(0)");
    let mut primes: Vec<u128> = Vec::new();
    let tz = n.trailing_zeros();
    primes.extend(std::iter::repeat(2).take(tz as usize));
    let rem = n >> tz;
    if rem <= u64::MAX as u128 {
        trial_u64(rem as u64, &mut primes);
    } else {
        let mut rem = rem;
        for &p in trial_primes() {
            let p = p as u128;
            if p * p > rem {
                break;
            }
            while rem % p == 0 {
                primes.push(p);
                rem /= p;
            }
        }
        if rem <= u64::MAX as u128 {
            trial_u64(rem as u64, &mut primes);
        } else {
            split_into(rem, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { value: n, factors }
}

fn trial_u64(mut rem: u64, out: &mut Vec<u128>) {
    let mut exhausted = true;
    for &p in trial_primes() {
        let p = p as u64;
        if p * p > rem {
            exhausted = false;
            break;
        }
        if rem % p == 0 {
            while rem % p == 0 {
                out.push(p as u128);
                rem /= p;
            }
        }
    }
    if rem == 1 {
        return;
    }
    if !exhausted || rem < 1 << 32 {
        out.push(rem as u128);
    } else {
        split_into(rem as u128, out);
    }
}

fn split_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let r = isqrt(n);
    if r * r == n {
        split_into(r, out);
        split_into(r, out);
        return;
    }
    let d = if n <= u64::MAX as u128 {
        brent_u64(n as u64) as u128
    } else {
        brent_u128(n)
    };
    split_into(d, out);
    split_into(n / d, out);
}

fn brent_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        if let Some(d) = brent_attempt_u64(n, c) {
            return d;
        }
        c += 1;
    }
}

fn brent_attempt_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let m = 128u64;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mulmod_u64(q, x.abs_diff(y), n);
            }
            g = gcd_u128(q as u128, n as u128) as u64;
            k += m;
        }
        r <<= 1;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u128(x.abs_diff(ys) as u128, n as u128) as u64;
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_u128(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mont = Montgomery::new(n);
    let mut c = 1u128;
    loop {
        if let Some(d) = brent_attempt_u128(&mont, c) {
            return d;
        }
        c += 1;
    }
}

fn brent_attempt_u128(mont: &Montgomery, c: u128) -> Option<u128> {
    let n = mont.n;
    let cm = mont.to_mont(c);
    let f = |x: u128| {
        let s = mont.mul(x, x) + cm;
        if s >= n {
            s - n
        } else {
            s
        }
    };
    let m = 128u64;
    let mut y = mont.to_mont(2);
    let mut r = 1u64;
    let mut q = mont.one();
    let mut g = 1u128;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mont.mul(q, x.abs_diff(y));
            }
            g = gcd_u128(q, n);
            k += m;
        }
        r <<= 1;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u128(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// An element of `P* = {8, -4, -8} ∪ {p* : p odd prime}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct PrimeStarDiscriminant {
    value: i64,
}

impl PrimeStarDiscriminant {
    pub const EIGHT: Self = PrimeStarDiscriminant { value: 8 };
    pub const MINUS_FOUR: Self = PrimeStarDiscriminant { value: -4 };
    pub const MINUS_EIGHT: Self = PrimeStarDiscriminant { value: -8 };

    /// Accepts 8, -4, -8 or `(-1)^((p-1)/2) p` for an odd prime `p`.
    pub fn new(value: i64) -> Result<Self> {
        match value {
            8 | -4 | -8 => Ok(PrimeStarDiscriminant { value }),
            v => {
                let p = v.unsigned_abs();
                if p % 2 == 1 && is_prime(p as u128) && p_star_value(p) == v {
                    Ok(PrimeStarDiscriminant { value })
                } else {
                    Err(Error::NotPrimeStar(value as i128))
                }
            }
        }
    }

    pub fn value(self) -> i64 {
        self.value
    }

    pub fn prime(self) -> u64 {
        if self.value.unsigned_abs() % 2 == 0 {
            2
        } else {
            self.value.unsigned_abs()
        }
    }

    pub fn is_negative(self) -> bool {
        self.value < 0
    }

    pub fn is_two_type(self) -> bool {
        self.prime() == 2
    }

    /// Canonical ordering key: `(|value|, value)`.
    pub fn sort_key(self) -> (u64, i64) {
        (self.value.unsigned_abs(), self.value)
    }
}

impl PartialOrd for PrimeStarDiscriminant {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeStarDiscriminant {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl TryFrom<i64> for PrimeStarDiscriminant {
    type Error = Error;
    fn try_from(v: i64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PrimeStarDiscriminant> for i64 {
    fn from(d: PrimeStarDiscriminant) -> i64 {
        d.value
    }
}

impl fmt::Display for PrimeStarDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn p_star_value(p: u64) -> i64 {
    if p % 4 == 3 {
        -(p as i64)
    } else {
        p as i64
    }
}

/// `p* = (-1)^((p-1)/2) p` for an odd prime `p`.
pub fn p_star(p: u64) -> Result<PrimeStarDiscriminant> {
    if p == 2 {
        return Err(Error::NotOddPrime(2));
    }
    if !is_prime(p as u128) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(PrimeStarDiscriminant { value: p_star_value(p) })
}

/// Signed squarefree kernel of a nonzero integer.
pub fn squarefree_kernel(n: i128) -> i128 {
    assert!(n != 0);
    let k = factor(n.unsigned_abs()).squarefree_kernel() as i128;
    if n < 0 {
        -k
    } else {
        k
    }
}

/// Discriminant of `Q(sqrt(n))` for a non-square `n`.
pub fn field_discriminant(n: i128) -> i128 {
    let k = squarefree_kernel(n);
    if k.rem_euclid(4) == 1 {
        k
    } else {
        4 * k
    }
}

pub fn is_fundamental(d: i128) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => factor(d.unsigned_abs()).is_squarefree(),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && factor(m.unsigned_abs()).is_squarefree()
        }
        _ => false,
    }
}

/// Discriminant of the quadratic subfield `Q(sqrt(d1 d2))`.
pub fn product_discriminant(d1: PrimeStarDiscriminant, d2: PrimeStarDiscriminant) -> Result<i128> {
    if d1 == d2 {
        return Err(Error::DegenerateSubfield(d1.value()));
    }
    Ok(field_discriminant(d1.value() as i128 * d2.value() as i128))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(7, 3), 1);
        assert_eq!(kronecker(-1, 23), -1);
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(-23, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(6, 4), 0);
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(3, -5), -1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_below(300).into_iter().skip(1) {
            for a in -200i128..200 {
                let e = powmod_u64(a.rem_euclid(p as i128) as u64, (p - 1) / 2, p);
                let want = match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker(a, p as i128), want, "({a}|{p})");
            }
        }
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2));
        assert!(is_prime(4027));
        assert!(!is_prime(5761140));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(18446744073709551557));
        assert!(is_prime((1u128 << 89) - 1));
        assert!(!is_prime(((1u128 << 61) - 1) * ((1u128 << 31) - 1)));
        // strong pseudoprime to many small bases
        assert!(!is_prime(3825123056546413051));
    }

    #[test]
    fn primality_matches_sieve() {
        let ps = primes_below(200_000);
        let set: std::collections::HashSet<u64> = ps.iter().copied().collect();
        for n in 0..200_000u64 {
            assert_eq!(is_prime(n as u128), set.contains(&n), "{n}");
        }
    }

    #[test]
    fn factor_examples() {
        let f = factor(5761140);
        assert_eq!(f.factors, vec![(2, 2), (3, 1), (5, 1), (7, 1), (11, 1), (29, 1), (43, 1)]);
        assert!(factor(1).factors.is_empty());
        assert_eq!(factor(6704790388321).factors, vec![(643, 2), (4027, 2)]);
        assert_eq!(factor(6505835909336928256).factors, vec![(2, 12), (59, 4), (107, 4)]);
        let big = 977807264466179992321u128;
        assert_eq!(factor(big).factors, vec![(19, 4), (41, 4), (227, 4)]);
    }

    #[test]
    fn factor_large_semiprimes() {
        let p = 1_000_000_007u128;
        let q = 998_244_353u128;
        let r = 4_294_967_311u128;
        assert_eq!(factor(p * q).factors, vec![(q, 1), (p, 1)]);
        assert_eq!(factor(p * q * r).factors, vec![(q, 1), (p, 1), (r, 1)]);
        let m61 = (1u128 << 61) - 1;
        assert_eq!(factor(m61 * 1_000_003).factors, vec![(1_000_003, 1), (m61, 1)]);
    }

    #[test]
    fn montgomery_roundtrip() {
        let n = (1u128 << 89) - 1;
        let m = Montgomery::new(n);
        assert_eq!(m.one(), m.to_mont(1));
        let a = 123456789012345678901234u128 % n;
        let b = 987654321098765432109876u128 % n;
        let prod = m.mul(m.to_mont(a), m.to_mont(b));
        let back = m.mul(prod, 1);
        let mut want = 0u128;
        let mut x = a;
        let mut y = b;
        while y > 0 {
            if y & 1 == 1 {
                want = (want + x) % n;
            }
            x = (x << 1) % n;
            y >>= 1;
        }
        assert_eq!(back, want);
    }

    #[test]
    fn p_star_examples() {
        assert_eq!(p_star(3).unwrap().value(), -3);
        assert_eq!(p_star(5).unwrap().value(), 5);
        assert_eq!(p_star(929).unwrap().value(), 929);
        assert!(p_star(2).is_err());
        assert!(p_star(9).is_err());
        assert!(PrimeStarDiscriminant::new(3).is_err());
        assert!(PrimeStarDiscriminant::new(-5).is_err());
        assert_eq!(PrimeStarDiscriminant::new(-8).unwrap().prime(), 2);
    }

    #[test]
    fn product_discriminant_examples() {
        let d = |v| PrimeStarDiscriminant::new(v).unwrap();
        assert_eq!(product_discriminant(d(-4), d(-8)).unwrap(), 8);
        assert_eq!(product_discriminant(d(-3), d(5)).unwrap(), -15);
        assert_eq!(product_discriminant(d(-3), d(929)).unwrap(), -2787);
        assert_eq!(product_discriminant(d(-4), d(5)).unwrap(), -20);
        assert_eq!(product_discriminant(d(8), d(-3)).unwrap(), -24);
        assert!(product_discriminant(d(-3), d(-3)).is_err());
    }

    #[test]
    fn discrete_log_parity_examples() {
        assert_eq!(discrete_log_parity(7, 3), F2::ZERO);
        assert_eq!(discrete_log_parity(5, 3), F2::ONE);
        assert_eq!(discrete_log_parity(2, 7), F2::ZERO);
    }

    #[test]
    fn discrete_log_parity_matches_index() {
        for p in primes_below(200).into_iter().skip(1) {
            let g = (2..p)
                .find(|&g| (1..p - 1).all(|k| powmod_u64(g, k, p) != 1))
                .unwrap();
            let mut x = 1u64;
            for k in 0..p - 1 {
                assert_eq!(discrete_log_parity(x as i128, p), F2::from(k % 2 == 1));
                x = x * g % p;
            }
        }
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3, -4, -8, 5, 8, 12, -15, -20, -24, 21, -2787, -5761140] {
            assert!(is_fundamental(d), "{d}");
        }
        for d in [0, 1, -1, 4, -12, 9, 16, 18, -16, 45] {
            assert!(!is_fundamental(d), "{d}");
        }
    }
}
