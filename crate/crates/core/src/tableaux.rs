//! Torus fixed points of σ-quiver varieties in type A as row-increasing tableaux:
//! the Sp/SO instanton family (one-box positive rows, (ℓ−1)-box negative rows) and
//! the partial-flag family (all rows of length one).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynkin::TypeSign;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("invalid tableau: {0}")]
    Invalid(String),
    #[error("charge invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstantonKind {
    Sp,
    So,
}

impl std::str::FromStr for InstantonKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sp" => Ok(InstantonKind::Sp),
            "so" => Ok(InstantonKind::So),
            _ => Err(format!("unknown kind '{s}' (expected sp or so)")),
        }
    }
}

/// Rows keyed by signed index; entries strictly increasing in `1..=ell`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tableau {
    pub ell: u8,
    pub rows: BTreeMap<i32, Vec<u8>>,
}

impl Tableau {
    pub fn new(ell: u8, rows: BTreeMap<i32, Vec<u8>>) -> Tableau {
        Tableau { ell, rows }
    }

    /// Instanton tableau determined by its positive rows `t[k-1] = T(k,1)`.
    pub fn from_positive_rows(ell: u8, t: &[u8]) -> Tableau {
        let mut rows = BTreeMap::new();
        for (k, &s) in t.iter().enumerate() {
            let k = k as i32 + 1;
            rows.insert(k, vec![s]);
            rows.insert(-k, (1..=ell).filter(|&x| x != s).collect());
        }
        Tableau { ell, rows }
    }

    pub fn row(&self, k: i32) -> Option<&[u8]> {
        self.rows.get(&k).map(|r| r.as_slice())
    }

    /// `T(k, a)` with 1-based column `a`.
    pub fn entry(&self, k: i32, a: usize) -> Option<u8> {
        self.rows.get(&k).and_then(|r| a.checked_sub(1).and_then(|i| r.get(i))).copied()
    }

    pub fn positive_rows(&self) -> Vec<u8> {
        self.rows.range(1..).map(|(_, r)| r[0]).collect()
    }

    /// Largest positive row index.
    pub fn w1(&self) -> usize {
        self.rows.keys().filter(|&&k| k > 0).count()
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|(k, r)| {
                let e: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("{k}: {}", e.join(" "))
            })
            .collect();
        f.write_str(&rows.join(" | "))
    }
}

/// All `ell^w1` instanton tableaux, in lexicographic order of the positive rows.
pub fn enumerate_instanton_tableaux(ell: u8, w1: usize) -> Vec<Tableau> {
    let total = (ell as usize).pow(w1 as u32);
    (0..total)
        .map(|mut idx| {
            let mut t = vec![0u8; w1];
            for slot in t.iter_mut().rev() {
                *slot = (idx % ell as usize) as u8 + 1;
                idx /= ell as usize;
            }
            Tableau::from_positive_rows(ell, &t)
        })
        .collect()
}

/// Shape, complement and content checks for an instanton tableau.
pub fn validate_instanton(t: &Tableau, w1: usize) -> Result<(), TableauError> {
    let ell = t.ell;
    let bad = |m: String| Err(TableauError::Invalid(m));
    let want: BTreeSet<i32> = (1..=w1 as i32).flat_map(|k| [k, -k]).collect();
    if t.rows.keys().copied().collect::<BTreeSet<_>>() != want {
        return bad(format!("row indices {:?}", t.rows.keys().collect::<Vec<_>>()));
    }
    let mut content = vec![0usize; ell as usize + 1];
    for (&k, r) in &t.rows {
        let len = if k > 0 { 1 } else { ell as usize - 1 };
        if r.len() != len {
            return bad(format!("row {k} has length {}", r.len()));
        }
        if r.windows(2).any(|w| w[0] >= w[1]) || r.iter().any(|&x| x == 0 || x > ell) {
            return bad(format!("row {k} is not strictly increasing in 1..{ell}"));
        }
        for &x in r {
            content[x as usize] += 1;
        }
    }
    for k in 1..=w1 as i32 {
        let pos = &t.rows[&k];
        let neg = &t.rows[&-k];
        if (1..=ell).any(|x| pos.contains(&x) == neg.contains(&x)) {
            return bad(format!("rows {k} and {} are not complementary", -k));
        }
    }
    if let Some(i) = (1..=ell as usize).find(|&i| content[i] != w1) {
        return bad(format!("value {i} appears {} times", content[i]));
    }
    Ok(())
}

/// The three-bullet condition on the node `(k, a)` relative to row `l`.
pub fn condition_28(t: &Tableau, k: i32, l: i32, a: usize) -> bool {
    if l == k {
        return false;
    }
    let (Some(tka), Some(row_l)) = (t.entry(k, a), t.row(l)) else {
        return false;
    };
    if row_l.contains(&tka) {
        return false;
    }
    let other = if l < k { t.entry(l, a) } else { t.entry(l, a + 1) };
    matches!(other, Some(x) if x < tka)
}

/// Satisfied triples `(k, l, a)`.
pub fn satisfied_triples(t: &Tableau) -> Vec<(i32, i32, usize)> {
    let mut out = Vec::new();
    for (&k, r) in &t.rows {
        for a in 1..=r.len() {
            for &l in t.rows.keys() {
                if condition_28(t, k, l, a) {
                    out.push((k, l, a));
                }
            }
        }
    }
    out
}

/// Number of satisfied columns `a` per ordered row pair `(k, l)`.
pub fn pair_counts(triples: &[(i32, i32, usize)]) -> BTreeMap<(i32, i32), usize> {
    let mut m = BTreeMap::new();
    for &(k, l, _) in triples {
        *m.entry((k, l)).or_insert(0) += 1;
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChargeReport {
    pub tableau: Tableau,
    pub l: usize,
    pub l_sp: usize,
    pub l_so: usize,
    /// Satisfied triples of the form `(k, -k, a)`.
    pub diagonal: usize,
}

impl ChargeReport {
    pub fn charge(&self, kind: InstantonKind) -> usize {
        match kind {
            InstantonKind::Sp => self.l_sp,
            InstantonKind::So => self.l_so,
        }
    }
}

pub fn charges(t: &Tableau) -> Result<ChargeReport, TableauError> {
    let triples = satisfied_triples(t);
    let per_pair = pair_counts(&triples);
    for (&(k, l), &n) in &per_pair {
        let m = per_pair.get(&(-l, -k)).copied().unwrap_or(0);
        if n != m {
            return Err(TableauError::Invariant(format!("pair ({k},{l}) has {n} triples, ({},{}) has {m}", -l, -k)));
        }
    }
    let diagonal = triples.iter().filter(|(k, l, _)| *k == -l).count();
    let off = triples.len() - diagonal;
    if !off.is_multiple_of(2) {
        return Err(TableauError::Invariant(format!("odd off-diagonal count {off}")));
    }
    Ok(ChargeReport { tableau: t.clone(), l: triples.len(), l_sp: diagonal + off / 2, l_so: off / 2, diagonal })
}

/// Integer polynomial in `t`, stored by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poincare(pub Vec<u64>);

impl Poincare {
    pub fn constant_term(&self) -> u64 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn coefficient(&self, deg: usize) -> u64 {
        self.0.get(deg).copied().unwrap_or(0)
    }
}

impl fmt::Display for Poincare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(d, &c)| match (d, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}t"),
                (d, 1) => format!("t^{d}"),
                (d, c) => format!("{c}t^{d}"),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl Serialize for Poincare {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `Σ_T t^{2·charge(T)}` over the instanton tableaux.
pub fn poincare_polynomial(kind: InstantonKind, ell: u8, w1: usize) -> Result<Poincare, TableauError> {
    let reports: Vec<ChargeReport> =
        enumerate_instanton_tableaux(ell, w1).par_iter().map(charges).collect::<Result<_, _>>()?;
    let mut p = Vec::new();
    for r in &reports {
        let d = 2 * r.charge(kind);
        if p.len() <= d {
            p.resize(d + 1, 0);
        }
        p[d] += 1;
    }
    Ok(Poincare(p))
}

/// `dim H^1(C(k,l))` from the four-case table.
fn h1(t: &Tableau, k: i32, l: i32) -> usize {
    if k == l {
        return 0;
    }
    let same = t.entry(k.abs(), 1) == t.entry(l.abs(), 1);
    usize::from((k * l > 0) != same)
}

/// Dimension of the σ-fixed tangent space: diagonal pairs `(k,-k)` count in full
/// for Sp and not at all for SO; the remaining pairs come in orbits
/// `{(k,l), (-l,-k)}` each contributing one copy.
pub fn tangent_dimension(t: &Tableau, kind: InstantonKind) -> usize {
    let idx: Vec<i32> = t.rows.keys().copied().collect();
    let mut diag = 0;
    let mut off = 0;
    for &k in &idx {
        for &l in &idx {
            if l == -k {
                diag += h1(t, k, l);
            } else {
                off += h1(t, k, l) + h1(t, -l, -k);
            }
        }
    }
    // each orbit was visited twice, once from each member
    let off = off / 4;
    match kind {
        InstantonKind::Sp => diag + off,
        InstantonKind::So => off,
    }
}

pub fn expected_dimension(kind: InstantonKind, w1: usize) -> usize {
    match kind {
        InstantonKind::Sp => w1 * (w1 + 1),
        InstantonKind::So => w1 * w1.saturating_sub(1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SoComponentReport {
    pub ell: u8,
    pub w1: usize,
    pub fixed_points: usize,
    pub zero_charge_count: usize,
    /// For `ell = 2`: class sizes by parity of the number of 1s among positive rows.
    pub components: Option<Vec<usize>>,
}

pub fn so_component_report(ell: u8, w1: usize) -> Result<SoComponentReport, TableauError> {
    let ts = enumerate_instanton_tableaux(ell, w1);
    let mut zero = 0;
    for t in &ts {
        if charges(t)?.l_so == 0 {
            zero += 1;
        }
    }
    let components = (ell == 2).then(|| {
        let mut sizes = [0usize; 2];
        for t in &ts {
            let ones = t.positive_rows().iter().filter(|&&x| x == 1).count();
            sizes[ones % 2] += 1;
        }
        sizes.into_iter().filter(|&s| s > 0).collect()
    });
    Ok(SoComponentReport { ell, w1, fixed_points: ts.len(), zero_charge_count: zero, components })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FlagEnumeration {
    pub tableaux: Vec<Tableau>,
    pub diagnostic: Option<String>,
}

/// `v_i = #{entries > i}` for `i = 1..ell-1`.
pub fn flag_dimension_vector(t: &Tableau) -> Vec<i64> {
    (1..t.ell).map(|i| t.rows.values().filter(|r| r[0] > i).count() as i64).collect()
}

/// Flag-family fixed points for framing `w`. With `v = Some(..)` only the tableaux
/// realizing that dimension vector are returned; with `None`, those of every
/// σ-compatible `v`.
pub fn enumerate_flag_tableaux(ell: u8, v: Option<&[i64]>, w: usize, sign: TypeSign) -> FlagEnumeration {
    let fail = |m: String| FlagEnumeration { tableaux: vec![], diagnostic: Some(m) };
    if w % 2 == 1 && sign == TypeSign::Minus {
        return fail(format!("odd framing {w} carries no symplectic form"));
    }
    if !w.is_multiple_of(2) && ell.is_multiple_of(2) {
        return fail(format!("odd framing {w} needs odd ell for the middle row"));
    }
    if let Some(v) = v {
        if v.len() != ell as usize - 1 {
            return fail(format!("dimension vector has {} entries, expected {}", v.len(), ell - 1));
        }
        if let Some(i) = (1..ell as usize).find(|&i| v[i - 1] + v[ell as usize - i - 1] != w as i64) {
            return fail(format!("v_{i} + v_{} != {w}", ell as usize - i));
        }
    }
    let m = w / 2;
    let mut out = Vec::new();
    for mut idx in 0..(ell as usize).pow(m as u32) {
        let mut rows = BTreeMap::new();
        for k in (1..=m as i32).rev() {
            let s = (idx % ell as usize) as u8 + 1;
            idx /= ell as usize;
            rows.insert(k, vec![s]);
            rows.insert(-k, vec![ell + 1 - s]);
        }
        if w % 2 == 1 {
            rows.insert(0, vec![ell.div_ceil(2)]);
        }
        let t = Tableau::new(ell, rows);
        if v.is_none_or(|v| flag_dimension_vector(&t) == v) {
            out.push(t);
        }
    }
    let diagnostic = out.is_empty().then(|| "no fixed points for this dimension vector".to_string());
    FlagEnumeration { tableaux: out, diagnostic }
}
