use std::collections::HashMap;

use super::forms::{
    compose_raw, enumerate_definite, enumerate_indefinite, reduce_definite, reduce_indefinite,
    rho, QuadForm,
};
use super::structure::GroupStructure;
use crate::arith::{factor, isqrt};

/// The form class group of a fundamental discriminant with every class
/// enumerated. For `d > 0` classes are rho-cycles of reduced forms, which
/// gives the narrow class group.
pub(crate) struct FormClassGroup {
    d: i128,
    s: i128,
    reps: Vec<QuadForm>,
    index: HashMap<(i128, i128), u32>,
    identity: u32,
}

impl FormClassGroup {
    pub fn new(d: i128) -> Self {
        if d < 0 {
            let reps = enumerate_definite(d);
            let index = reps.iter().enumerate().map(|(i, f)| ((f.a, f.b), i as u32)).collect();
            let mut g = FormClassGroup { d, s: 0, reps, index, identity: 0 };
            g.identity = g.class_id(&QuadForm::principal(d));
            g
        } else {
            let s = isqrt(d as u128) as i128;
            let forms = enumerate_indefinite(d);
            let slot: HashMap<(i128, i128), usize> =
                forms.iter().enumerate().map(|(i, f)| ((f.a, f.b), i)).collect();
            let mut cycle = vec![u32::MAX; forms.len()];
            let mut reps = Vec::new();
            for start in 0..forms.len() {
                if cycle[start] != u32::MAX {
                    continue;
                }
                let id = reps.len() as u32;
                let mut best = forms[start];
                let mut i = start;
                loop {
                    cycle[i] = id;
                    let f = forms[i];
                    if f.a > 0 && (best.a < 0 || (f.a, f.b) < (best.a, best.b)) {
                        best = f;
                    }
                    let g = rho(&f, d, s);
                    i = slot[&(g.a, g.b)];
                    if i == start {
                        break;
                    }
                }
                reps.push(best);
            }
            let index = forms.iter().zip(&cycle).map(|(f, &c)| ((f.a, f.b), c)).collect();
            let principal = reduce_indefinite(QuadForm::principal(d), d, s);
            let mut g = FormClassGroup { d, s, reps, index, identity: 0 };
            g.identity = g.class_id(&principal);
            g
        }
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[QuadForm] {
        &self.reps
    }

    /// Class of a reduced form.
    pub fn class_id(&self, f: &QuadForm) -> u32 {
        *self
            .index
            .get(&(f.a, f.b))
            .unwrap_or_else(|| panic!("{f} is not a reduced form of discriminant {}", self.d))
    }

    pub fn is_identity(&self, f: &QuadForm) -> bool {
        self.class_id(f) == self.identity
    }

    pub fn mul(&self, f: &QuadForm, g: &QuadForm) -> QuadForm {
        multiply(f, g, self.d, self.s)
    }

    pub fn pow(&self, f: &QuadForm, e: u64) -> QuadForm {
        power(f, e, self.d, self.s)
    }

    /// Invariant factors, read off from the number of elements killed by
    /// each prime power dividing the order.
    pub fn structure(&self) -> GroupStructure {
        let h = self.order() as u64;
        let mut cyclic = Vec::new();
        for (p, e) in factor(h as u128).factors {
            let p = p as u64;
            let cofactor = h / p.pow(e);
            let mut killed = vec![0usize; e as usize + 1];
            for x in &self.reps {
                let mut y = self.pow(x, cofactor);
                let mut k = 0;
                while k <= e as usize {
                    if self.is_identity(&y) {
                        break;
                    }
                    y = self.pow(&y, p);
                    k += 1;
                }
                assert!(k <= e as usize, "element order exceeds the group order");
                for n in &mut killed[k..] {
                    *n += 1;
                }
            }
            // x -> x^cofactor maps onto the p-Sylow subgroup with fibres of size cofactor
            let logs: Vec<u32> = killed
                .iter()
                .map(|&n| {
                    assert_eq!(n as u64 % cofactor, 0);
                    log_exact(n as u64 / cofactor, p)
                })
                .collect();
            assert_eq!(logs[e as usize], e, "p-Sylow order mismatch for p = {p}");
            // at_least[k] = number of cyclic factors of order >= p^k
            let at_least: Vec<u32> = (1..=e as usize).map(|k| logs[k] - logs[k - 1]).collect();
            for k in 1..=e as usize {
                let next = at_least.get(k).copied().unwrap_or(0);
                for _ in 0..(at_least[k - 1] - next) {
                    cyclic.push(p.pow(k as u32));
                }
            }
        }
        let s = GroupStructure::from_cyclic(cyclic);
        assert_eq!(s.order(), h as u128);
        s
    }

    /// Order of a class, given a multiple of it.
    pub fn element_order(&self, f: &QuadForm, multiple: u64) -> u64 {
        let mut ord = multiple;
        for (p, _) in factor(multiple as u128).factors {
            let p = p as u64;
            while ord % p == 0 && self.is_identity(&self.pow(f, ord / p)) {
                ord /= p;
            }
        }
        ord
    }

    /// A generating set built greedily from elements of largest order.
    pub fn generators(&self, exponent: u64) -> Vec<QuadForm> {
        let n = self.order();
        let mut by_order: Vec<(u64, usize)> = self
            .reps
            .iter()
            .enumerate()
            .map(|(i, f)| (self.element_order(f, exponent), i))
            .collect();
        by_order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut in_h = vec![false; n];
        in_h[self.identity as usize] = true;
        let mut members = vec![self.reps[self.identity as usize]];
        let mut gens = Vec::new();
        for (_, i) in by_order {
            if members.len() == n {
                break;
            }
            if in_h[i] {
                continue;
            }
            let g = self.reps[i];
            gens.push(g);
            let base = members.clone();
            let mut y = g;
            while !in_h[self.class_id(&y) as usize] {
                for m in &base {
                    let z = self.mul(&y, m);
                    let id = self.class_id(&z) as usize;
                    if !in_h[id] {
                        in_h[id] = true;
                        members.push(z);
                    }
                }
                y = self.mul(&y, &g);
            }
        }
        gens
    }
}

fn log_exact(n: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut m = n;
    while m > 1 {
        assert_eq!(m % p, 0, "{n} is not a power of {p}");
        m /= p;
        k += 1;
    }
    k
}

pub(crate) fn reduce_form(f: QuadForm, d: i128, s: i128) -> QuadForm {
    if d < 0 {
        reduce_definite(f)
    } else {
        reduce_indefinite(f, d, s)
    }
}

// Composition needs positive leading coefficients; a reduced indefinite form
// with a < 0 has c > 0, so one rho step fixes that.
fn positive(f: &QuadForm, d: i128, s: i128) -> QuadForm {
    if f.a > 0 {
        *f
    } else {
        rho(f, d, s)
    }
}

pub(crate) fn multiply(f: &QuadForm, g: &QuadForm, d: i128, s: i128) -> QuadForm {
    if d < 0 {
        reduce_definite(compose_raw(f, g))
    } else {
        let h = compose_raw(&positive(f, d, s), &positive(g, d, s));
        reduce_indefinite(h, d, s)
    }
}

pub(crate) fn power(f: &QuadForm, mut e: u64, d: i128, s: i128) -> QuadForm {
    let mut result = reduce_form(QuadForm::principal(d), d, s);
    let mut base = *f;
    while e > 0 {
        if e & 1 == 1 {
            result = multiply(&result, &base, d, s);
        }
        e >>= 1;
        if e > 0 {
            base = multiply(&base, &base, d, s);
        }
    }
    result
}
