//! Sparse multivariate polynomials over the integers.
//!
//! Monomials are ordered graded-lexicographically with `u4 > u3 > u2 > u1 > u > q > h`,
//! so the last key of the term map is the leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub const NVARS: usize = 7;

/// The fixed variable universe, in increasing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    H = 0,
    Q = 1,
    U = 2,
    U1 = 3,
    U2 = 4,
    U3 = 5,
    U4 = 6,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::H, Var::Q, Var::U, Var::U1, Var::U2, Var::U3, Var::U4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Var {
        Var::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::H => "h",
            Var::Q => "q",
            Var::U => "u",
            Var::U1 => "u1",
            Var::U2 => "u2",
            Var::U3 => "u3",
            Var::U4 => "u4",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.iter().copied().find(|v| v.name() == s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub [u16; NVARS]);

impl Mono {
    pub fn one() -> Mono {
        Mono([0; NVARS])
    }

    pub fn var(v: Var) -> Mono {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Mono(e)
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a -= *b;
        }
        Mono(e)
    }

    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = (*a).min(*b);
        }
        Mono(e)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for i in (0..NVARS).rev() {
                match self.0[i].cmp(&other.0[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, BigInt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn var(v: Var) -> Poly {
        Poly::monomial(Mono::var(v), BigInt::one())
    }

    pub fn monomial(m: Mono, c: BigInt) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, BigInt)>>(it: I) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Mono::one()).is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.is_constant() {
            self.terms.get(&Mono::one()).cloned()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.leading().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.0[v.index()] as u32).max().unwrap_or(0)
    }

    /// Bit `i` is set when variable `i` occurs.
    pub fn var_mask(&self) -> u8 {
        let mut mask = 0u8;
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    pub fn vars(&self) -> Vec<Var> {
        let mask = self.var_mask();
        Var::ALL.iter().copied().filter(|v| mask & (1 << v.index()) != 0).collect()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn div_int(&self, c: &BigInt) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v / c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Gcd of the integer coefficients, nonnegative.
    pub fn int_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Flips the sign so that the leading coefficient is positive.
    pub fn with_positive_lead(self) -> Poly {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self
        }
    }

    /// Exact division in `Z[vars]`, `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = other.constant_value() {
            if self.terms.values().all(|v| v.is_multiple_of(&c)) {
                return Some(self.div_int(&c));
            }
            return None;
        }
        let (lm, lc) = other.leading().map(|(m, c)| (*m, c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            if !lm.divides(&rm) || !rc.is_multiple_of(&lc) {
                return None;
            }
            let m = rm.div(&lm);
            let c = &rc / &lc;
            rem = rem.sub(&other.mul_mono(&m, &c));
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Coefficients in `v`, index = power of `v`.
    pub fn as_univariate(&self, v: Var) -> Vec<Poly> {
        let i = v.index();
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[i] as usize;
            let mut mm = *m;
            mm.0[i] = 0;
            out[k].add_term(mm, c.clone());
        }
        out
    }

    pub fn from_univariate(coeffs: &[Poly], v: Var) -> Poly {
        let mut out = Poly::zero();
        for (k, p) in coeffs.iter().enumerate() {
            let mut vm = Mono::one();
            vm.0[v.index()] = k as u16;
            for (m, c) in &p.terms {
                out.add_term(m.mul(&vm), c.clone());
            }
        }
        out
    }

    pub fn eval(&self, point: &[BigRational; NVARS]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Value at an integer point.
    pub fn eval_int(&self, point: &[BigInt; NVARS]) -> BigInt {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    fn fmt_mono(m: &Mono) -> String {
        let mut parts = Vec::new();
        for i in (0..NVARS).rev() {
            let e = m.0[i];
            if e == 1 {
                parts.push(Var::from_index(i).name().to_string());
            } else if e > 1 {
                parts.push(format!("{}^{}", Var::from_index(i).name(), e));
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            let body = if m.is_one() {
                a.to_string()
            } else if a.is_one() {
                Poly::fmt_mono(m)
            } else {
                format!("{}*{}", a, Poly::fmt_mono(m))
            };
            match (k, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

fn gcd_list(ps: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for p in ps {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r: Vec<Poly> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for x in r.iter_mut() {
            *x = x.mul(lb);
        }
        for (k, bk) in b.iter().enumerate() {
            r[k + shift] = r[k + shift].sub(&bk.mul(&lr));
        }
        while r.last().is_some_and(|p| p.is_zero()) {
            r.pop();
        }
    }
    r
}

fn primitive(u: &[Poly]) -> (Poly, Vec<Poly>) {
    let c = gcd_list(u).with_positive_lead();
    let p = u.iter().map(|x| x.div_exact(&c).expect("content divides")).collect();
    (c, p)
}

/// Greatest common divisor in `Z[vars]`, normalized to a positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone().with_positive_lead();
    }
    if b.is_zero() {
        return a.clone().with_positive_lead();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.int_content().gcd(&b.int_content()));
    }
    if a == b {
        return a.clone().with_positive_lead();
    }
    let ma = a.var_mask();
    let mb = b.var_mask();
    let x = Var::from_index(7 - (ma | mb).leading_zeros() as usize);
    let bit = 1u8 << x.index();
    if ma & bit == 0 {
        return gcd(a, &gcd_list(&b.as_univariate(x)));
    }
    if mb & bit == 0 {
        return gcd(&gcd_list(&a.as_univariate(x)), b);
    }
    // Monomial fast path.
    if a.num_terms() == 1 || b.num_terms() == 1 {
        let (single, other) = if a.num_terms() == 1 { (a, b) } else { (b, a) };
        let mut m = *single.leading().unwrap().0;
        for k in other.terms.keys() {
            m = m.gcd(k);
        }
        let c = single.int_content().gcd(&other.int_content());
        return Poly::monomial(m, c);
    }
    // Linear fast path: a primitive linear form is irreducible.
    for (p, q) in [(a, b), (b, a)] {
        if p.total_degree() == 1 {
            let pc = p.int_content();
            let pp = p.div_int(&pc).with_positive_lead();
            let c = pc.gcd(&q.int_content());
            return if q.div_exact(&pp).is_some() {
                pp.scale(&c)
            } else {
                Poly::constant(c)
            };
        }
    }
    let ua = a.as_univariate(x);
    let ub = b.as_univariate(x);
    let (ca, pa) = primitive(&ua);
    let (cb, pb) = primitive(&ub);
    let c = gcd(&ca, &cb);
    let (mut f, mut g) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    loop {
        let r = prem(&f, &g);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return c;
        }
        f = g;
        g = primitive(&r).1;
    }
    let (_, g) = primitive(&g);
    Poly::from_univariate(&g, x).mul(&c).with_positive_lead()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Poly {
        Poly::var(x)
    }

    fn k(c: i64) -> Poly {
        Poly::constant(BigInt::from(c))
    }

    #[test]
    fn leading_term_is_graded_lex() {
        let p = v(Var::H).add(&v(Var::U1)).add(&k(3));
        assert_eq!(p.leading().unwrap().0, &Mono::var(Var::U1));
        assert_eq!(p.to_string(), "u1 + h + 3");
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let f = v(Var::U1).sub(&v(Var::U2)).add(&v(Var::H));
        let a = f.mul(&v(Var::U1).add(&k(2)));
        let b = f.mul(&v(Var::H).mul(&v(Var::U2)).sub(&k(1)));
        assert_eq!(gcd(&a, &b), f.with_positive_lead());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = v(Var::U).add(&v(Var::H));
        let b = v(Var::U).sub(&v(Var::H));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_keeps_integer_content() {
        let a = v(Var::U).scale(&BigInt::from(6));
        let b = v(Var::U).mul(&v(Var::H)).scale(&BigInt::from(4));
        assert_eq!(gcd(&a, &b), v(Var::U).scale(&BigInt::from(2)));
    }

    #[test]
    fn gcd_nonlinear_shared_factor() {
        let s = v(Var::U).mul(&v(Var::U)).add(&v(Var::H).mul(&v(Var::Q))).add(&k(1));
        let a = s.mul(&s).mul(&v(Var::U).add(&k(1)));
        let b = s.mul(&v(Var::Q).sub(&v(Var::U)));
        assert_eq!(gcd(&a, &b), s);
    }

    #[test]
    fn exact_division_roundtrip() {
        let a = v(Var::U1).add(&v(Var::H));
        let b = v(Var::U2).sub(&k(3));
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a), Some(b));
        assert_eq!(p.div_exact(&v(Var::Q)), None);
    }
}
