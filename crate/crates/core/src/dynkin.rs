//! ADE Dynkin data, Weyl-group action on weights and dimension-vector bookkeeping.
//!
//! Vertices are numbered from 1. Type A_n is the chain `1 - 2 - … - n`.
//! D_n is the chain `1 - … - (n-2)` with tails `n-1` and `n` both attached to
//! `n-2`. E6 is the chain `1 - 2 - 3 - 4 - 5` with `6` attached to `3`.
//! Internally vectors are indexed from 0.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DynkinError {
    #[error("unsupported Dynkin type '{0}' (only A_n, D_n with n >= 4 and E6)")]
    Unsupported(String),
    #[error("dimension vector length {got} does not match rank {rank}")]
    Length { got: usize, rank: usize },
    #[error("w0*v is not integral")]
    NonIntegral,
    #[error("not implemented: {0}")]
    NotImplemented(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DynkinType {
    pub family: Family,
    pub rank: usize,
}

impl DynkinType {
    pub fn new(family: Family, rank: usize) -> Result<DynkinType, DynkinError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::D => rank >= 4,
            Family::E => rank == 6,
        };
        let t = DynkinType { family, rank };
        if ok {
            Ok(t)
        } else {
            Err(DynkinError::Unsupported(t.to_string()))
        }
    }

    pub fn a(rank: usize) -> DynkinType {
        DynkinType::new(Family::A, rank).expect("rank >= 1")
    }

    pub fn d(rank: usize) -> DynkinType {
        DynkinType::new(Family::D, rank).expect("rank >= 4")
    }

    pub fn e6() -> DynkinType {
        DynkinType { family: Family::E, rank: 6 }
    }

    /// Edges as 0-based vertex pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        match self.family {
            Family::A => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Family::D => {
                let mut e: Vec<_> = (0..n - 3).map(|i| (i, i + 1)).collect();
                e.push((n - 3, n - 2));
                e.push((n - 3, n - 1));
                e
            }
            Family::E => vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)],
        }
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.family {
            Family::A => 'A',
            Family::D => 'D',
            Family::E => 'E',
        };
        write!(f, "{c}{}", self.rank)
    }
}

impl FromStr for DynkinType {
    type Err = DynkinError;
    fn from_str(s: &str) -> Result<Self, DynkinError> {
        let s = s.trim();
        let bad = || DynkinError::Unsupported(s.to_string());
        let mut cs = s.chars();
        let family = match cs.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('D') => Family::D,
            Some('E') => Family::E,
            _ => return Err(bad()),
        };
        let rest = cs.as_str().trim_start_matches('_');
        let rank: usize = rest.parse().map_err(|_| bad())?;
        DynkinType::new(family, rank)
    }
}

impl Serialize for DynkinType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DynkinType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CartanData {
    pub dynkin: DynkinType,
    pub cartan: Vec<Vec<i64>>,
    pub coxeter_number: usize,
    pub positive_root_count: usize,
}

impl CartanData {
    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank()).filter(move |&j| self.cartan[i][j] == -1)
    }

    /// Simple reflection on a weight in fundamental-weight coordinates.
    pub fn reflect_weight(&self, i: usize, mu: &mut [i64]) {
        let mi = mu[i];
        for (j, m) in mu.iter_mut().enumerate() {
            *m -= self.cartan[i][j] * mi;
        }
    }

    /// Simple reflection on a root in simple-root coordinates.
    pub fn reflect_root(&self, i: usize, beta: &mut [i64]) {
        let pairing: i64 = (0..self.rank()).map(|j| self.cartan[i][j] * beta[j]).sum();
        beta[i] -= pairing;
    }

    pub fn apply_word_to_weight(&self, word: &[usize], mu: &[i64]) -> Vec<i64> {
        let mut m = mu.to_vec();
        for &i in word.iter().rev() {
            self.reflect_weight(i - 1, &mut m);
        }
        m
    }

    pub fn cartan_times(&self, v: &[i64]) -> Vec<i64> {
        self.cartan.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Positive roots in simple-root coordinates, generated by reflection closure.
pub fn positive_roots(t: DynkinType) -> Vec<Vec<i64>> {
    let c = cartan_only(t);
    let n = t.rank;
    let data = CartanData { dynkin: t, cartan: c, coxeter_number: 0, positive_root_count: 0 };
    let mut roots: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let mut k = 0;
    while k < roots.len() {
        for i in 0..n {
            let mut b = roots[k].clone();
            data.reflect_root(i, &mut b);
            if b.iter().all(|&x| x >= 0) && b.iter().any(|&x| x > 0) && !roots.contains(&b) {
                roots.push(b);
            }
        }
        k += 1;
    }
    roots
}

fn cartan_only(t: DynkinType) -> Vec<Vec<i64>> {
    let n = t.rank;
    let mut c = vec![vec![0i64; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in t.edges() {
        c[a][b] = -1;
        c[b][a] = -1;
    }
    c
}

pub fn cartan_matrix(t: DynkinType) -> CartanData {
    let npos = positive_roots(t).len();
    CartanData {
        dynkin: t,
        cartan: cartan_only(t),
        // h = 2N / r for simply-laced types.
        coxeter_number: 2 * npos / t.rank,
        positive_root_count: npos,
    }
}

/// The involution `-w0` on vertices, 1-based in and out.
pub fn invast(t: DynkinType) -> Vec<usize> {
    let n = t.rank;
    match t.family {
        Family::A => (1..=n).map(|i| n + 1 - i).collect(),
        Family::D if n % 2 == 1 => {
            let mut p: Vec<usize> = (1..=n).collect();
            p.swap(n - 2, n - 1);
            p
        }
        Family::D => (1..=n).collect(),
        Family::E => vec![5, 4, 3, 2, 1, 6],
    }
}

/// The nontrivial diagram automorphism: reversal for A, tail swap for D,
/// arm reflection for E6.
pub fn diagram_automorphism(t: DynkinType) -> Vec<usize> {
    let n = t.rank;
    match t.family {
        Family::A | Family::E => invast(t),
        Family::D => {
            let mut p: Vec<usize> = (1..=n).collect();
            p.swap(n - 2, n - 1);
            p
        }
    }
}

/// Reduced word for `w0` by greedy descent from `ρ`. `prefer_high` picks the
/// largest available vertex at each step, giving a second word.
pub fn longest_word_with(t: DynkinType, prefer_high: bool) -> Vec<usize> {
    let c = cartan_matrix(t);
    let n = t.rank;
    let mut x = vec![1i64; n];
    let mut word = Vec::new();
    loop {
        let mut cands = (0..n).filter(|&i| x[i] > 0);
        let pick = if prefer_high { cands.next_back() } else { cands.next() };
        match pick {
            Some(i) => {
                c.reflect_weight(i, &mut x);
                word.push(i + 1);
            }
            None => break,
        }
    }
    // x = s_{i_N} … s_{i_1} ρ, so w0 = s_{i_N} … s_{i_1}.
    word.reverse();
    word
}

pub fn longest_word(t: DynkinType) -> Vec<usize> {
    longest_word_with(t, false)
}

/// Number of positive roots sent negative by `s_{j1} … s_{jk}`, and whether every
/// prefix step raised the length by exactly one.
pub fn certify_word(t: DynkinType, word: &[usize]) -> (usize, bool) {
    let c = cartan_matrix(t);
    let roots = positive_roots(t);
    let inversions = |w: &[usize]| -> usize {
        roots
            .iter()
            .filter(|r| {
                let mut b = (*r).clone();
                for &i in w.iter().rev() {
                    c.reflect_root(i - 1, &mut b);
                }
                b.iter().all(|&x| x <= 0)
            })
            .count()
    };
    let mut stepwise = true;
    for k in 1..=word.len() {
        if inversions(&word[..k]) != k {
            stepwise = false;
            break;
        }
    }
    (inversions(word), stepwise)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimVectors {
    pub v: Vec<i64>,
    pub w: Vec<i64>,
}

impl DimVectors {
    pub fn new(v: Vec<i64>, w: Vec<i64>) -> DimVectors {
        DimVectors { v, w }
    }

    fn check(&self, c: &CartanData) -> Result<(), DynkinError> {
        for x in [&self.v, &self.w] {
            if x.len() != c.rank() {
                return Err(DynkinError::Length { got: x.len(), rank: c.rank() });
            }
        }
        Ok(())
    }
}

/// `(λ, μ)` in fundamental-weight coordinates: `λ = w`, `μ = w - Cv`.
pub fn weights_from_dims(d: &DimVectors, c: &CartanData) -> Result<(Vec<i64>, Vec<i64>), DynkinError> {
    d.check(c)?;
    let cv = c.cartan_times(&d.v);
    let mu = d.w.iter().zip(&cv).map(|(a, b)| a - b).collect();
    Ok((d.w.clone(), mu))
}

/// Solves `w - C v' = w0(w - C v)` for `v'`.
pub fn w0_star(d: &DimVectors, c: &CartanData) -> Result<Vec<i64>, DynkinError> {
    let (_, mu) = weights_from_dims(d, c)?;
    let w0mu = c.apply_word_to_weight(&longest_word(c.dynkin), &mu);
    let rhs: Vec<i64> = d.w.iter().zip(&w0mu).map(|(a, b)| a - b).collect();
    solve_integral(&c.cartan, &rhs)
}

fn solve_integral(a: &[Vec<i64>], b: &[i64]) -> Result<Vec<i64>, DynkinError> {
    let n = a.len();
    let mut m: Vec<Vec<Ratio<i64>>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| row.iter().map(|&x| Ratio::from_integer(x)).chain([Ratio::from_integer(bi)]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != Ratio::from_integer(0)).expect("Cartan matrix is invertible");
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != Ratio::from_integer(0) {
                    let pivot_row = m[col].clone();
                    for (x, y) in m[r].iter_mut().zip(pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    m.iter()
        .map(|row| {
            let x = row[n];
            if x.is_integer() {
                Ok(x.to_integer())
            } else {
                Err(DynkinError::NonIntegral)
            }
        })
        .collect()
}

pub fn dim_quiver_variety(d: &DimVectors, c: &CartanData) -> Result<i64, DynkinError> {
    d.check(c)?;
    let cv = c.cartan_times(&d.v);
    Ok(d.v.iter().zip(d.w.iter().zip(&cv)).map(|(v, (w, x))| v * (2 * w - x)).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl TypeSign {
    pub fn value(self) -> i8 {
        match self {
            TypeSign::Plus => 1,
            TypeSign::Minus => -1,
        }
    }

    pub fn flip(self) -> TypeSign {
        match self {
            TypeSign::Plus => TypeSign::Minus,
            TypeSign::Minus => TypeSign::Plus,
        }
    }
}

impl FromStr for TypeSign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+" | "plus" | "so" | "SO" => Ok(TypeSign::Plus),
            "-" | "minus" | "sp" | "Sp" => Ok(TypeSign::Minus),
            _ => Err(format!("unknown sign '{s}'")),
        }
    }
}

impl fmt::Display for TypeSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeSign::Plus => "+",
            TypeSign::Minus => "-",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InvolutionSpec {
    pub invast: Vec<usize>,
    pub sigma_prime: Vec<usize>,
    pub type_sign: TypeSign,
}

impl InvolutionSpec {
    /// `nontrivial` selects the diagram automorphism for σ′, otherwise the identity.
    pub fn new(t: DynkinType, nontrivial: bool, type_sign: TypeSign) -> InvolutionSpec {
        let sigma_prime = if nontrivial { diagram_automorphism(t) } else { (1..=t.rank).collect() };
        InvolutionSpec { invast: invast(t), sigma_prime, type_sign }
    }
}

/// `(σλ, σμ) = (σ′(invast λ), −σ′(μ))`, where a permutation `p` acts on a vector by
/// moving the entry at vertex `i` to vertex `p(i)`.
pub fn sigma_on_weights(lambda: &[i64], mu: &[i64], spec: &InvolutionSpec) -> (Vec<i64>, Vec<i64>) {
    let permute = |p: &[usize], x: &[i64]| -> Vec<i64> {
        let mut out = vec![0; x.len()];
        for (i, &xi) in x.iter().enumerate() {
            out[p[i] - 1] = xi;
        }
        out
    };
    let sl = permute(&spec.sigma_prime, &permute(&spec.invast, lambda));
    let sm = permute(&spec.sigma_prime, mu).into_iter().map(|x| -x).collect();
    (sl, sm)
}

/// Form on the framing space `W_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum FormType {
    /// `W_i` carries its own form: `+` orthogonal, `-` symplectic.
    Own { sign: TypeSign },
    /// `W_i ⊕ W_partner` carries a form of the given type pairing the two.
    Paired { partner: usize, sign: TypeSign },
}

/// Form types on framing vertices, for type A.
pub fn epsilon_assignment(t: DynkinType, spec: &InvolutionSpec) -> Result<Vec<FormType>, DynkinError> {
    if t.family != Family::A {
        return Err(DynkinError::NotImplemented(format!(
            "epsilon assignment for {t} (only type A is supported)"
        )));
    }
    let n = t.rank;
    let composite: Vec<usize> = (0..n).map(|i| spec.sigma_prime[spec.invast[i] - 1]).collect();
    if composite.iter().enumerate().all(|(i, &j)| j == i + 1) {
        // Every vertex is fixed: forms alternate along the chain.
        let mut s = spec.type_sign;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(FormType::Own { sign: s });
            s = s.flip();
        }
        return Ok(out);
    }
    if spec.sigma_prime.iter().enumerate().all(|(i, &j)| j == i + 1) {
        let s = spec.type_sign;
        return Ok((0..n)
            .map(|i| {
                let j = spec.invast[i];
                if j == i + 1 {
                    FormType::Own { sign: s }
                } else {
                    FormType::Paired { partner: j, sign: s }
                }
            })
            .collect());
    }
    Err(DynkinError::NotImplemented("mixed fixed and paired vertices".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_cartan() {
        let c = cartan_matrix(DynkinType::a(2));
        assert_eq!(c.cartan, vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(c.coxeter_number, 3);
        assert_eq!(c.positive_root_count, 3);
        assert_eq!(cartan_matrix(DynkinType::a(1)).coxeter_number, 2);
    }

    #[test]
    fn coxeter_numbers_match_family_formulas() {
        for n in 1..=7 {
            assert_eq!(cartan_matrix(DynkinType::a(n)).coxeter_number, n + 1);
        }
        for n in 4..=7 {
            let c = cartan_matrix(DynkinType::d(n));
            assert_eq!(c.coxeter_number, 2 * n - 2);
            assert_eq!(c.positive_root_count, n * (n - 1));
        }
        let e = cartan_matrix(DynkinType::e6());
        assert_eq!((e.coxeter_number, e.positive_root_count), (12, 36));
    }

    #[test]
    fn invast_examples() {
        assert_eq!(invast(DynkinType::a(4)), vec![4, 3, 2, 1]);
        assert_eq!(invast(DynkinType::d(4)), vec![1, 2, 3, 4]);
        assert_eq!(invast(DynkinType::d(5)), vec![1, 2, 3, 5, 4]);
        let e = invast(DynkinType::e6());
        assert_eq!((e[0], e[4], e[2], e[5]), (5, 1, 3, 6));
    }

    #[test]
    fn small_longest_words() {
        assert_eq!(longest_word(DynkinType::a(1)), vec![1]);
        assert_eq!(longest_word(DynkinType::a(2)), vec![1, 2, 1]);
        let w = longest_word(DynkinType::d(4));
        assert_eq!(w.len(), 12);
        assert_eq!(certify_word(DynkinType::d(4), &w), (12, true));
    }

    #[test]
    fn non_reduced_word_is_rejected() {
        assert!(!certify_word(DynkinType::a(2), &[1, 1]).1);
    }

    #[test]
    fn weights_examples() {
        let c = cartan_matrix(DynkinType::a(2));
        let d = DimVectors::new(vec![1, 1], vec![1, 1]);
        assert_eq!(weights_from_dims(&d, &c).unwrap().1, vec![0, 0]);
        let c4 = cartan_matrix(DynkinType::a(4));
        let d = DimVectors::new(vec![2, 2, 2, 2], vec![2, 0, 0, 2]);
        assert_eq!(weights_from_dims(&d, &c4).unwrap().1, vec![0, 0, 0, 0]);
    }

    #[test]
    fn w0_star_examples() {
        let a1 = cartan_matrix(DynkinType::a(1));
        assert_eq!(w0_star(&DimVectors::new(vec![0], vec![2]), &a1).unwrap(), vec![2]);
        let a2 = cartan_matrix(DynkinType::a(2));
        assert_eq!(w0_star(&DimVectors::new(vec![0, 0], vec![1, 0]), &a2).unwrap(), vec![1, 1]);
        assert_eq!(w0_star(&DimVectors::new(vec![1, 1], vec![1, 1]), &a2).unwrap(), vec![1, 1]);
    }

    #[test]
    fn dimension_examples() {
        let a1 = cartan_matrix(DynkinType::a(1));
        assert_eq!(dim_quiver_variety(&DimVectors::new(vec![1], vec![2]), &a1).unwrap(), 2);
        let a2 = cartan_matrix(DynkinType::a(2));
        assert_eq!(dim_quiver_variety(&DimVectors::new(vec![1, 1], vec![1, 1]), &a2).unwrap(), 2);
        assert_eq!(dim_quiver_variety(&DimVectors::new(vec![0, 0], vec![3, 1]), &a2).unwrap(), 0);
    }

    #[test]
    fn sigma_weight_examples() {
        let t = DynkinType::a(3);
        let l = vec![1, 0, 0];
        let id = InvolutionSpec::new(t, false, TypeSign::Plus);
        assert_eq!(sigma_on_weights(&l, &[0, 0, 0], &id), (vec![0, 0, 1], vec![0, 0, 0]));
        let tw = InvolutionSpec::new(t, true, TypeSign::Plus);
        assert_eq!(sigma_on_weights(&l, &[0, 0, 0], &tw).0, vec![1, 0, 0]);
    }

    #[test]
    fn epsilon_examples() {
        use FormType::*;
        use TypeSign::*;
        let a5 = DynkinType::a(5);
        let e = epsilon_assignment(a5, &InvolutionSpec::new(a5, true, Plus)).unwrap();
        let signs: Vec<TypeSign> = e.iter().map(|f| if let Own { sign } = f { *sign } else { panic!() }).collect();
        assert_eq!(signs, vec![Plus, Minus, Plus, Minus, Plus]);
        let a3 = DynkinType::a(3);
        let e = epsilon_assignment(a3, &InvolutionSpec::new(a3, false, Minus)).unwrap();
        assert_eq!(e[0], Paired { partner: 3, sign: Minus });
        assert_eq!(e[1], Own { sign: Minus });
        let a1 = DynkinType::a(1);
        assert_eq!(epsilon_assignment(a1, &InvolutionSpec::new(a1, false, Plus)).unwrap(), vec![Own { sign: Plus }]);
        let d5 = DynkinType::d(5);
        assert!(epsilon_assignment(d5, &InvolutionSpec::new(d5, false, Plus)).is_err());
    }

    #[test]
    fn parse_types() {
        assert_eq!("A4".parse::<DynkinType>().unwrap(), DynkinType::a(4));
        assert_eq!("d_5".parse::<DynkinType>().unwrap(), DynkinType::d(5));
        assert!("E7".parse::<DynkinType>().is_err());
        assert!("D3".parse::<DynkinType>().is_err());
        assert!("B2".parse::<DynkinType>().is_err());
    }
}
