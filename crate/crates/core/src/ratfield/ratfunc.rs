use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{gcd, Mono, Poly, Var, NVARS};
use super::RatError;

/// A reduced quotient of integer polynomials.
///
/// Canonical form: `gcd(num, den) = 1`, the integer contents of `num` and `den`
/// are jointly coprime, and the leading coefficient of `den` is positive.
/// Zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc, RatError> {
        if den.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let (mut num, mut den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        let c = num.int_content().gcd(&den.int_content());
        if !c.is_one() {
            num = num.div_int(&c);
            den = den.div_int(&c);
        }
        if den.leading_coeff().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { num, den }
    }

    pub fn zero() -> RatFunc {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc::from_int(1)
    }

    pub fn from_int(c: i64) -> RatFunc {
        RatFunc { num: Poly::constant(BigInt::from(c)), den: Poly::one() }
    }

    pub fn from_ratio(n: i64, d: i64) -> RatFunc {
        RatFunc::new(Poly::constant(n.into()), Poly::constant(d.into())).expect("nonzero denominator")
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn var(v: Var) -> RatFunc {
        RatFunc::from_poly(Poly::var(v))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn inv(&self) -> Result<RatFunc, RatError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Checked division; the `/` operator panics on a zero divisor.
    pub fn checked_div(&self, other: &RatFunc) -> Result<RatFunc, RatError> {
        Ok(self.mul_impl(&other.inv()?))
    }

    pub fn pow(&self, n: i32) -> Result<RatFunc, RatError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let k = n.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn vars(&self) -> Vec<Var> {
        let mask = self.num.var_mask() | self.den.var_mask();
        Var::ALL.iter().copied().filter(|v| mask & (1 << v.index()) != 0).collect()
    }

    /// Re-runs normalization; the result must equal `self`.
    pub fn renormalized(&self) -> RatFunc {
        RatFunc::normalize(self.num.clone(), self.den.clone())
    }

    /// Evaluates at a point; `None` when the denominator vanishes there.
    pub fn eval(&self, point: &[BigRational; NVARS]) -> Option<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point) / d)
    }

    /// Laurent coefficients `c_0..=c_order` of `var^0, var^-1, ...` at `var = ∞`.
    pub fn expand_at_infinity(&self, var: Var, order: usize) -> Result<Vec<RatFunc>, RatError> {
        let n = self.num.as_univariate(var);
        let d = self.den.as_univariate(var);
        let dn = if self.num.is_zero() { 0 } else { n.len() - 1 };
        let dd = d.len() - 1;
        if !self.num.is_zero() && dn > dd {
            return Err(RatError::NotRegularAtInfinity);
        }
        // In t = 1/var: A(t) = Σ a_{dd-j} t^j, B(t) = Σ b_{dd-j} t^j.
        let coef = |v: &[Poly], j: usize| -> RatFunc {
            if j <= dd && dd - j < v.len() {
                RatFunc::from_poly(v[dd - j].clone())
            } else {
                RatFunc::zero()
            }
        };
        let b0 = coef(&d, 0);
        let b0inv = b0.inv()?;
        let mut out: Vec<RatFunc> = Vec::with_capacity(order + 1);
        for r in 0..=order {
            let mut acc = if self.num.is_zero() { RatFunc::zero() } else { coef(&n, r) };
            for j in 1..=r {
                let bj = coef(&d, j);
                if !bj.is_zero() {
                    acc = &acc - &(&bj * &out[r - j]);
                }
            }
            out.push(&acc * &b0inv);
        }
        Ok(out)
    }

    fn add_impl(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return RatFunc::normalize(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_constant() && other.den.is_constant() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            return RatFunc::normalize(num, self.den.mul(&other.den));
        }
        // Henrici: only the gcd of the denominators can cancel.
        let g = gcd(&self.den, &other.den);
        let bd = self.den.div_exact(&g).unwrap();
        let dd = other.den.div_exact(&g).unwrap();
        let t = self.num.mul(&dd).add(&other.num.mul(&bd));
        if t.is_zero() {
            return RatFunc::zero();
        }
        let den = bd.mul(&other.den);
        if g.is_constant() {
            return RatFunc::normalize_coprime(t, den);
        }
        let h = gcd(&t, &g);
        if h.is_constant() {
            RatFunc::normalize_coprime(t, den)
        } else {
            RatFunc::normalize_coprime(t.div_exact(&h).unwrap(), den.div_exact(&h).unwrap())
        }
    }

    /// Normalization when `num` and `den` are already polynomially coprime.
    fn normalize_coprime(mut num: Poly, mut den: Poly) -> RatFunc {
        let c = num.int_content().gcd(&den.int_content());
        if !c.is_one() {
            num = num.div_int(&c);
            den = den.div_int(&c);
        }
        if den.leading_coeff().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { num, den }
    }

    fn mul_impl(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        RatFunc::normalize_coprime(n1.mul(&n2), d1.mul(&d2))
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl From<i64> for RatFunc {
    fn from(c: i64) -> Self {
        RatFunc::from_int(c)
    }
}

impl From<Var> for RatFunc {
    fn from(v: Var) -> Self {
        RatFunc::var(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a RatFunc> for &'a RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &'a RatFunc) -> RatFunc {
                let f: fn(&RatFunc, &RatFunc) -> RatFunc = $body;
                f(self, rhs)
            }
        }
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &'a RatFunc) -> RatFunc {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<RatFunc> for &'a RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b));
binop!(Sub, sub, |a, b| a.add_impl(&-b));
binop!(Mul, mul, |a, b| a.mul_impl(b));
binop!(Div, div, |a, b| a.mul_impl(&b.inv().expect("division by zero rational function")));

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

fn needs_parens_den(p: &Poly) -> bool {
    if p.num_terms() > 1 {
        return true;
    }
    match p.leading() {
        Some((m, c)) => !(m.is_one() || (c.is_one() && m.degree() == 1)),
        None => false,
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if needs_parens_den(&self.den) {
            write!(f, " / ({})", self.den)
        } else {
            write!(f, " / {}", self.den)
        }
    }
}

impl FromStr for RatFunc {
    type Err = RatError;
    fn from_str(s: &str) -> Result<RatFunc, RatError> {
        Parser::new(s).parse()
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<RatFunc, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    err: Option<String>,
}

impl Parser {
    fn new(s: &str) -> Parser {
        let mut toks = Vec::new();
        let mut err = None;
        let cs: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < cs.len() {
            let c = cs[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let st = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let t: String = cs[st..i].iter().collect();
                toks.push(Tok::Int(t.parse().unwrap()));
            } else if c.is_ascii_alphabetic() {
                let st = i;
                while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                toks.push(Tok::Ident(cs[st..i].iter().collect()));
            } else if "+-*/^()".contains(c) {
                toks.push(Tok::Sym(c));
                i += 1;
            } else {
                err.get_or_insert(format!("unexpected character '{c}'"));
                i += 1;
            }
        }
        Parser { toks, pos: 0, err }
    }

    fn fail<T>(&self, msg: &str) -> Result<T, RatError> {
        Err(RatError::Parse(msg.to_string()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<RatFunc, RatError> {
        if let Some(e) = self.err.take() {
            return Err(RatError::Parse(e));
        }
        if self.toks.is_empty() {
            return self.fail("empty expression");
        }
        let r = self.expr()?;
        if self.pos != self.toks.len() {
            return self.fail("trailing input");
        }
        Ok(r)
    }

    fn expr(&mut self) -> Result<RatFunc, RatError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, RatError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(RatError::DivisionByZero);
                }
                acc = acc / d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, RatError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, RatError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.peek() {
                Some(Tok::Int(n)) => n.clone(),
                _ => return self.fail("expected integer exponent"),
            };
            self.pos += 1;
            let e: i32 = e.try_into().map_err(|_| RatError::Parse("exponent too large".into()))?;
            return base.pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, RatError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(RatFunc::from_poly(Poly::constant(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match Var::from_name(&name) {
                    Some(v) => Ok(RatFunc::var(v)),
                    None => self.fail(&format!("unknown variable '{name}'")),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail("expected ')'");
                }
                Ok(e)
            }
            _ => self.fail("expected operand"),
        }
    }
}

/// Monomial `c * prod vars^e`, a convenience for tests and builders.
pub fn monomial(c: i64, exps: &[(Var, u16)]) -> RatFunc {
    let mut m = Mono::one();
    for &(v, e) in exps {
        m.0[v.index()] += e;
    }
    RatFunc::from_poly(Poly::monomial(m, BigInt::from(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_string() {
        let r = p("h") / (p("2*u1") + p("2*h"));
        assert_eq!(r.to_string(), "h / (2*u1 + 2*h)");
        assert_eq!(p(&r.to_string()), r);
    }

    #[test]
    fn zero_is_zero_over_one() {
        let z = p("u") - p("u");
        assert!(z.is_zero());
        assert!(z.den().is_one());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn rational_constants() {
        let r = p("1/2") + p("1/3");
        assert_eq!(r.to_string(), "5 / 6");
        assert_eq!(p("-h/2").to_string(), "-h / 2");
    }

    #[test]
    fn denominator_sign_normalized() {
        let r = p("1 / (h - u)");
        assert_eq!(r.to_string(), "-1 / (u - h)");
    }

    #[test]
    fn cancellation() {
        let r = p("(u^2 - h^2) / (u + h)");
        assert_eq!(r, p("u - h"));
        assert_eq!(r.to_string(), "u - h");
    }

    #[test]
    fn geometric_series_at_infinity() {
        let r = p("h / (u + h)");
        let c = r.expand_at_infinity(Var::U, 3).unwrap();
        let want: Vec<RatFunc> = ["0", "h", "-h^2", "h^3"].iter().map(|s| p(s)).collect();
        assert_eq!(c, want);
        let r = p("u / (u + h)");
        let c = r.expand_at_infinity(Var::U, 2).unwrap();
        let want: Vec<RatFunc> = ["1", "-h", "h^2"].iter().map(|s| p(s)).collect();
        assert_eq!(c, want);
    }

    #[test]
    fn not_regular_at_infinity() {
        assert!(matches!(
            p("u^2 / (u + h)").expand_at_infinity(Var::U, 1),
            Err(RatError::NotRegularAtInfinity)
        ));
    }

    #[test]
    fn parse_errors() {
        assert!("u +".parse::<RatFunc>().is_err());
        assert!("x1".parse::<RatFunc>().is_err());
        assert!("1/0".parse::<RatFunc>().is_err());
        assert!("(u".parse::<RatFunc>().is_err());
    }
}
