use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, factor, isqrt, kronecker};

/// Integral binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl QuadForm {
    pub const fn new(a: i128, b: i128, c: i128) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The principal form `(1, b, c)` with `b` in `{0, 1}`.
    pub fn principal(d: i128) -> Self {
        let b = d.rem_euclid(2);
        QuadForm::new(1, b, (b - d) / 4)
    }

    /// Representative of the inverse class.
    pub fn inverse(&self) -> Self {
        QuadForm::new(self.a, -self.b, self.c)
    }

    /// Form with leading coefficient `l` for a prime `l` that splits or
    /// ramifies, or `None` if `l` is inert.
    pub fn prime_form(d: i128, l: u64) -> Option<Self> {
        let l128 = l as i128;
        let b = if l == 2 {
            match d.rem_euclid(8) {
                1 => 1,
                0 => 0,
                4 => 2,
                5 => return None,
                _ => return None,
            }
        } else {
            if kronecker(d, l128) == -1 {
                return None;
            }
            let r = sqrt_mod(d.rem_euclid(l128) as u64, l)? as i128;
            if (r - d).rem_euclid(2) == 0 {
                r
            } else {
                r + l128
            }
        };
        let num = b * b - d;
        debug_assert_eq!(num.rem_euclid(4 * l128), 0);
        if num.rem_euclid(4 * l128) != 0 {
            return None;
        }
        Some(QuadForm::new(l128, b, num / (4 * l128)))
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    let pm = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = pm(r, b);
            }
            b = pm(b, b);
            e >>= 1;
        }
        r
    };
    if pow(a, (p - 1) / 2) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow(a, (p + 1) / 4));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow(z, (p - 1) / 2) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow(z, q);
    let mut t = pow(a, q);
    let mut r = pow(a, (q + 1) / 2);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = pm(tt, tt);
            i += 1;
        }
        let b = pow(c, 1 << (m - i - 1));
        m = i;
        c = pm(b, b);
        t = pm(t, c);
        r = pm(r, b);
    }
    Some(r)
}

/// Reduces a positive definite form: `|b| <= a <= c`, and `b >= 0` when
/// `|b| = a` or `a = c`.
pub fn reduce_definite(f: QuadForm) -> QuadForm {
    let d = f.discriminant();
    let QuadForm { mut a, mut b, mut c } = f;
    debug_assert!(a > 0 && d < 0);
    loop {
        if b <= -a || b > a {
            let mut r = b.rem_euclid(2 * a);
            if r > a {
                r -= 2 * a;
            }
            b = r;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if (a == c || b == -a) && b < 0 {
            b = -b;
        }
        return QuadForm::new(a, b, c);
    }
}

pub fn is_reduced_definite(f: &QuadForm) -> bool {
    let QuadForm { a, b, c } = *f;
    a > 0 && b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
}

/// Reducedness for indefinite forms of discriminant `d`, `s = isqrt(d)`:
/// `|sqrt(d) - 2|a|| < b < sqrt(d)`.
pub fn is_reduced_indefinite(f: &QuadForm, s: i128) -> bool {
    let a2 = 2 * f.a.abs();
    f.b > 0 && f.b <= s && f.b + a2 > s && a2 - f.b <= s
}

/// One step of the reduction operator on indefinite forms:
/// `(a, b, c) -> (c, r, (r^2 - d) / 4c)` with `r = -b mod 2c` normalized.
pub fn rho(f: &QuadForm, d: i128, s: i128) -> QuadForm {
    let c = f.c;
    let c_abs = c.abs();
    let two_c = 2 * c_abs;
    let r = if c_abs <= s {
        s - (s + f.b).rem_euclid(two_c)
    } else {
        let mut r = (-f.b).rem_euclid(two_c);
        if r > c_abs {
            r -= two_c;
        }
        r
    };
    QuadForm::new(c, r, (r * r - d) / (4 * c))
}

pub fn reduce_indefinite(f: QuadForm, d: i128, s: i128) -> QuadForm {
    let mut g = f;
    while !is_reduced_indefinite(&g, s) {
        g = rho(&g, d, s);
    }
    g
}

/// Composition of two primitive forms with positive leading coefficients
/// and equal discriminant; the result is not reduced.
pub fn compose_raw(f: &QuadForm, g: &QuadForm) -> QuadForm {
    let (f1, f2) = if f.a > g.a { (g, f) } else { (f, g) };
    debug_assert!(f1.a > 0 && f2.a > 0);
    let s = (f1.b + f2.b) / 2;
    let n = f2.b - s;
    let (y1, d) = if f2.a % f1.a == 0 {
        (0, f1.a)
    } else {
        let (d, u, _) = ext_gcd(f2.a, f1.a);
        (u, d)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let (d1, u, v) = ext_gcd(s, d);
        (u, -v, d1)
    };
    let v1 = f1.a / d1;
    let v2 = f2.a / d1;
    let r = ((y1 % v1) * (y2 % v1) % v1 * (n % v1) - (x2 % v1) * (f2.c % v1)).rem_euclid(v1);
    let b3 = f2.b + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (f2.c * d1 + r * (f2.b + v2 * r)) / v1;
    QuadForm::new(a3, b3, c3)
}

/// All reduced forms of a negative discriminant; their number is `h(d)`.
pub fn enumerate_definite(d: i128) -> Vec<QuadForm> {
    assert!(d < 0);
    let dd = -d;
    let bmax = isqrt((dd / 3) as u128) as i128;
    let mut out = Vec::new();
    let mut b = dd & 1;
    while b <= bmax {
        let n = (b * b + dd) / 4;
        let amax = isqrt(n as u128) as i128;
        for a in divisors_in(n, b.max(1), amax) {
            let c = n / a;
            out.push(QuadForm::new(a, b, c));
            if b > 0 && b < a && a < c {
                out.push(QuadForm::new(a, -b, c));
            }
        }
        b += 2;
    }
    out
}

/// All reduced indefinite forms of a positive non-square discriminant.
pub fn enumerate_indefinite(d: i128) -> Vec<QuadForm> {
    assert!(d > 0);
    let s = isqrt(d as u128) as i128;
    let mut out = Vec::new();
    let mut b = if (s - d) % 2 == 0 { s } else { s - 1 };
    while b > 0 {
        let n = (d - b * b) / 4;
        let lo = (s - b) / 2 + 1;
        let hi = (s + b) / 2;
        for a in divisors_in(n, lo, hi) {
            let c = n / a;
            out.push(QuadForm::new(a, b, -c));
            out.push(QuadForm::new(-a, b, c));
        }
        b -= 2;
    }
    out
}

/// Divisors of `n > 0` in `[lo, hi]`, ascending.
fn divisors_in(n: i128, lo: i128, hi: i128) -> Vec<i128> {
    if lo > hi {
        return Vec::new();
    }
    if hi - lo < 64 {
        return (lo..=hi).filter(|&a| n % a == 0).collect();
    }
    let mut ds: Vec<i128> = factor(n as u128)
        .divisors()
        .into_iter()
        .map(|x| x as i128)
        .filter(|&a| a >= lo && a <= hi)
        .collect();
    ds.sort_unstable();
    ds
}
