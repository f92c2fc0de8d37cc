//! Tautological K-theory classes `W_i`, `V_j`, `U_i` with Laurent coefficients in `q`,
//! and the reflection-functor transformation along a reduced word.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dynkin::{cartan_matrix, invast, longest_word, CartanData, DynkinType, InvolutionSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KClassError {
    #[error("stability parameter vanishes at vertex {0}")]
    NonGeneric(usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("composite transform at vertex {vertex} is {found}, expected {expected}")]
    Mismatch { vertex: usize, found: String, expected: String },
}

/// Laurent polynomial in `q` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Laurent(BTreeMap<i32, BigInt>);

impl Laurent {
    pub fn zero() -> Laurent {
        Laurent::default()
    }

    pub fn monomial(c: i64, e: i32) -> Laurent {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(e, BigInt::from(c));
        }
        Laurent(m)
    }

    pub fn one() -> Laurent {
        Laurent::monomial(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &BigInt)> {
        self.0.iter()
    }

    fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let x = self.0.entry(e).or_insert_with(BigInt::zero);
        *x += c;
        if x.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut r = self.clone();
        for (e, c) in &o.0 {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (*e, -c)).collect())
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut r = Laurent::zero();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }

    /// `q ↦ q^{-1}`.
    pub fn dual(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (-e, c.clone())).collect())
    }

    /// `Some((c, e))` when this is the single term `c q^e`.
    pub fn as_monomial(&self) -> Option<(BigInt, i32)> {
        if self.0.len() == 1 {
            self.0.iter().next().map(|(e, c)| (c.clone(), *e))
        } else {
            None
        }
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.0.iter().rev().enumerate() {
            let a = c.abs();
            let body = match (*e, a.is_one()) {
                (0, _) => a.to_string(),
                (1, true) => "q".to_string(),
                (e, true) => format!("q^{e}"),
                (1, false) => format!("{a}*q"),
                (e, false) => format!("{a}*q^{e}"),
            };
            let neg = c.is_negative();
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

impl Serialize for Laurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `[m] = (q^m - q^{-m}) / (q - q^{-1})`.
pub fn q_integer(m: i64) -> Laurent {
    let mut r = Laurent::zero();
    let k = m.unsigned_abs() as i32;
    for j in 0..k {
        r.add_term(k - 1 - 2 * j, BigInt::one());
    }
    if m < 0 {
        r.neg()
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Symbol {
    W(usize),
    V(usize),
    U(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::W(i) => write!(f, "W{i}"),
            Symbol::V(i) => write!(f, "V{i}"),
            Symbol::U(i) => write!(f, "U{i}"),
        }
    }
}

/// Formal combination `Σ coeff · symbol`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct KClassExpr(BTreeMap<Symbol, Laurent>);

impl KClassExpr {
    pub fn zero() -> KClassExpr {
        KClassExpr::default()
    }

    pub fn symbol(s: Symbol) -> KClassExpr {
        KClassExpr::term(s, Laurent::one())
    }

    pub fn term(s: Symbol, c: Laurent) -> KClassExpr {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(s, c);
        }
        KClassExpr(m)
    }

    pub fn coeff(&self, s: Symbol) -> Laurent {
        self.0.get(&s).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Symbol, &Laurent)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &KClassExpr) -> KClassExpr {
        let mut r = self.0.clone();
        for (s, c) in &o.0 {
            let x = r.entry(*s).or_default().add(c);
            if x.is_zero() {
                r.remove(s);
            } else {
                r.insert(*s, x);
            }
        }
        KClassExpr(r)
    }

    pub fn scale(&self, c: &Laurent) -> KClassExpr {
        KClassExpr(self.0.iter().map(|(s, x)| (*s, x.mul(c))).filter(|(_, x)| !x.is_zero()).collect())
    }
}

impl fmt::Display for KClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|(s, c)| format!("({c})*{s}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `U_i = q^{-1} W_i + Σ_j q^{-1} [-a_ij] V_j` (vertices 1-based).
pub fn u_class(i: usize, c: &CartanData) -> Result<KClassExpr, KClassError> {
    if i == 0 || i > c.rank() {
        return Err(KClassError::BadVertex(i));
    }
    let qinv = Laurent::monomial(1, -1);
    let mut e = KClassExpr::term(Symbol::W(i), qinv.clone());
    for j in 0..c.rank() {
        e = e.add(&KClassExpr::term(Symbol::V(j + 1), qinv.mul(&q_integer(-c.cartan[i - 1][j]))));
    }
    Ok(e)
}

/// Real stability parameter, one entry per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberState {
    pub zeta: Vec<Ratio<i64>>,
}

impl ChamberState {
    /// The start chamber `(-1, -2, -3, …)`.
    pub fn negative(rank: usize) -> ChamberState {
        ChamberState { zeta: (1..=rank as i64).map(|k| Ratio::from_integer(-k)).collect() }
    }
}

/// One reflection at vertex `i` (1-based):
/// `U'_j = U_j - q^{±}[a_ij] U_i` with `+` iff `zeta_i < 0`, then `zeta ↦ s_i zeta`.
pub fn reflect_step(
    us: &[KClassExpr],
    i: usize,
    state: &ChamberState,
    c: &CartanData,
) -> Result<(Vec<KClassExpr>, ChamberState), KClassError> {
    if i == 0 || i > c.rank() {
        return Err(KClassError::BadVertex(i));
    }
    let zi = state.zeta[i - 1];
    if zi.is_zero() {
        return Err(KClassError::NonGeneric(i));
    }
    let shift = Laurent::monomial(1, if zi.is_negative() { 1 } else { -1 });
    let ui = us[i - 1].clone();
    let new_us = us
        .iter()
        .enumerate()
        .map(|(j, uj)| {
            let f = shift.mul(&q_integer(c.cartan[i - 1][j])).neg();
            uj.add(&ui.scale(&f))
        })
        .collect();
    let zeta = (0..c.rank())
        .map(|j| state.zeta[j] - Ratio::from_integer(c.cartan[i - 1][j]) * zi)
        .collect();
    Ok((new_us, ChamberState { zeta }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransformEntry {
    pub vertex: usize,
    pub target: usize,
    pub coefficient: Laurent,
}

/// Applies `w0 = s_{i1} … s_{iN}` right to left, starting from the formal basis
/// `U_1, …, U_n`, and reads off `U'_i = coeff · U_target`.
pub fn reflection_transform_along(
    t: DynkinType,
    word: &[usize],
    start: ChamberState,
) -> Result<Vec<TransformEntry>, KClassError> {
    let c = cartan_matrix(t);
    let n = t.rank;
    let mut us: Vec<KClassExpr> = (1..=n).map(|i| KClassExpr::symbol(Symbol::U(i))).collect();
    let mut state = start;
    for &i in word.iter().rev() {
        let (u, s) = reflect_step(&us, i, &state, &c)?;
        us = u;
        state = s;
    }
    us.iter()
        .enumerate()
        .map(|(k, e)| {
            let mut it = e.terms();
            match (it.next(), it.next()) {
                (Some((Symbol::U(j), coeff)), None) => {
                    Ok(TransformEntry { vertex: k + 1, target: *j, coefficient: coeff.clone() })
                }
                _ => Err(KClassError::Mismatch {
                    vertex: k + 1,
                    found: e.to_string(),
                    expected: "a single U term".into(),
                }),
            }
        })
        .collect()
}

/// The composite along the longest word from an all-negative chamber, checked
/// against `U'_i = -q^c U_{invast(i)}`.
pub fn longest_reflection_transform(t: DynkinType) -> Result<Vec<TransformEntry>, KClassError> {
    composite_along(t, &longest_word(t))
}

/// As [`longest_reflection_transform`] for a given reduced word of `w0`. A start
/// point that hits a wall is perturbed.
pub fn composite_along(t: DynkinType, word: &[usize]) -> Result<Vec<TransformEntry>, KClassError> {
    let mut last = None;
    for shift in 0..4i64 {
        let start = ChamberState {
            zeta: (1..=t.rank as i64).map(|k| Ratio::new(-(k * (2 * shift + 1) + shift), 1 + shift)).collect(),
        };
        match reflection_transform_along(t, word, start) {
            Ok(entries) => {
                check_composite(t, &entries)?;
                return Ok(entries);
            }
            Err(e @ KClassError::NonGeneric(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(KClassError::NonGeneric(0)))
}

pub fn check_composite(t: DynkinType, entries: &[TransformEntry]) -> Result<(), KClassError> {
    let c = cartan_matrix(t).coxeter_number as i32;
    let inv = invast(t);
    let want = Laurent::monomial(-1, c);
    for e in entries {
        if e.target != inv[e.vertex - 1] || e.coefficient != want {
            return Err(KClassError::Mismatch {
                vertex: e.vertex,
                found: format!("({})*U{}", e.coefficient, e.target),
                expected: format!("({})*U{}", want, inv[e.vertex - 1]),
            });
        }
    }
    Ok(())
}

/// Framing classes under `σ = σ′ ∘ S_{w0} ∘ invast ∘ t`: returns, per vertex `i`,
/// the vertex `j` and dualization flag with `W'_i = W_j` or `W_j^∨`.
pub fn w_class_transform(spec: &InvolutionSpec) -> Vec<(usize, bool)> {
    let n = spec.invast.len();
    // t dualizes, invast and σ′ relabel, S_{w0} leaves framing classes alone.
    let stages: [(&dyn Fn(usize) -> usize, bool); 4] = [
        (&|i| i, true),
        (&|i| spec.invast[i - 1], false),
        (&|i| i, false),
        (&|i| spec.sigma_prime[i - 1], false),
    ];
    (1..=n)
        .map(|i| {
            let mut j = i;
            let mut dual = false;
            for (relabel, flips) in stages.iter().rev() {
                j = relabel(j);
                dual ^= *flips;
            }
            (j, dual)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynkin::{longest_word_with, TypeSign};

    #[test]
    fn q_integers() {
        assert!(q_integer(0).is_zero());
        assert_eq!(q_integer(-1), Laurent::monomial(-1, 0));
        assert_eq!(q_integer(2), Laurent::monomial(1, 1).add(&Laurent::monomial(1, -1)));
        assert_eq!(q_integer(2).to_string(), "q + q^-1");
    }

    #[test]
    fn u_class_examples() {
        let a1 = cartan_matrix(DynkinType::a(1));
        let u = u_class(1, &a1).unwrap();
        assert_eq!(u.coeff(Symbol::W(1)), Laurent::monomial(1, -1));
        assert_eq!(u.coeff(Symbol::V(1)), Laurent::monomial(-1, 0).add(&Laurent::monomial(-1, -2)));
        let a2 = cartan_matrix(DynkinType::a(2));
        let u = u_class(1, &a2).unwrap();
        assert_eq!(u.coeff(Symbol::V(2)), Laurent::monomial(1, -1));
        assert_eq!(u.len(), 3);
    }

    #[test]
    fn step_at_own_vertex_from_negative_side() {
        let a2 = cartan_matrix(DynkinType::a(2));
        let us: Vec<_> = (1..=2).map(|i| KClassExpr::symbol(Symbol::U(i))).collect();
        let (out, st) = reflect_step(&us, 1, &ChamberState::negative(2), &a2).unwrap();
        assert_eq!(out[0], KClassExpr::term(Symbol::U(1), Laurent::monomial(-1, 2)));
        assert_eq!(out[1].coeff(Symbol::U(1)), Laurent::monomial(1, 1));
        assert_eq!(st.zeta, vec![Ratio::from_integer(1), Ratio::from_integer(-3)]);
    }

    #[test]
    fn zero_stability_is_rejected() {
        let a1 = cartan_matrix(DynkinType::a(1));
        let us = vec![KClassExpr::symbol(Symbol::U(1))];
        let st = ChamberState { zeta: vec![Ratio::from_integer(0)] };
        assert_eq!(reflect_step(&us, 1, &st, &a1), Err(KClassError::NonGeneric(1)));
    }

    #[test]
    fn a1_and_a2_composites() {
        let e = longest_reflection_transform(DynkinType::a(1)).unwrap();
        assert_eq!(e[0].coefficient, Laurent::monomial(-1, 2));
        let e = longest_reflection_transform(DynkinType::a(2)).unwrap();
        assert_eq!((e[0].target, e[1].target), (2, 1));
        assert_eq!(e[0].coefficient.to_string(), "-q^3");
    }

    #[test]
    fn second_word_agrees() {
        for t in [DynkinType::a(3), DynkinType::d(4)] {
            let w = longest_word_with(t, true);
            let e = reflection_transform_along(t, &w, ChamberState::negative(t.rank)).unwrap();
            check_composite(t, &e).unwrap();
        }
    }

    #[test]
    fn framing_transform_is_sigma_invast() {
        let t = DynkinType::a(4);
        let spec = InvolutionSpec::new(t, false, TypeSign::Plus);
        assert_eq!(w_class_transform(&spec), vec![(4, true), (3, true), (2, true), (1, true)]);
        let spec = InvolutionSpec::new(t, true, TypeSign::Plus);
        assert!(w_class_transform(&spec).iter().enumerate().all(|(i, &(j, d))| j == i + 1 && d));
    }

    #[test]
    fn coxeter_exponent_across_types() {
        for t in [DynkinType::a(3), DynkinType::a(5), DynkinType::d(4), DynkinType::d(5), DynkinType::e6()] {
            let e = longest_reflection_transform(t).unwrap();
            let c = cartan_matrix(t).coxeter_number as i32;
            assert!(e.iter().all(|x| x.coefficient == Laurent::monomial(-1, c)), "{t}");
        }
    }

    #[test]
    fn opposite_steps_cancel() {
        for t in [DynkinType::a(4), DynkinType::d(5), DynkinType::e6()] {
            let c = cartan_matrix(t);
            let n = t.rank;
            let us: Vec<_> = (1..=n).map(|i| u_class(i, &c).unwrap()).collect();
            for i in 1..=n {
                let (once, st) = reflect_step(&us, i, &ChamberState::negative(n), &c).unwrap();
                assert!(st.zeta[i - 1] > Ratio::from_integer(0));
                let (twice, _) = reflect_step(&once, i, &st, &c).unwrap();
                assert_eq!(twice, us);
            }
        }
    }
}
