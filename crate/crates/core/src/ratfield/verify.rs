//! Exact identity checks between (products of) labeled matrices.
//!
//! Multipoint mode never forms symbolic products. Each factor `M` is written as
//! `N / d` with `d` the lcm of its entry denominators and `N` a polynomial matrix;
//! the identity `ΠL = ΠR` is then the polynomial identity
//! `ΠN_L · Πd_R = ΠN_R · Πd_L`. A polynomial of degree at most `D` in each
//! variable that vanishes on a `(D+1)^k` grid is zero, so agreement on the grid
//! is a proof.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::LabeledMatrix;
use super::poly::{gcd, Poly, Var, NVARS};
use super::RatError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Symbolic,
    Multipoint,
}

impl std::str::FromStr for VerifyMode {
    type Err = RatError;
    fn from_str(s: &str) -> Result<Self, RatError> {
        match s {
            "symbolic" => Ok(VerifyMode::Symbolic),
            "multipoint" => Ok(VerifyMode::Multipoint),
            _ => Err(RatError::Parse(format!("unknown verify mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub holds: bool,
    pub mode: VerifyMode,
    /// Grid points evaluated (multipoint only).
    pub points: usize,
    /// Per-variable degree bounds used for the grid (multipoint only).
    pub degree_bounds: Vec<(String, u32)>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// A differing entry: labels and the value of each side. In multipoint mode the
/// values are the exact rationals at `point`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub row: String,
    pub col: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

/// Checks `lhs == rhs`.
pub fn verify_identity(lhs: &LabeledMatrix, rhs: &LabeledMatrix, mode: VerifyMode) -> Result<Verdict, RatError> {
    verify_products(&[lhs], &[rhs], mode)
}

/// Checks `lhs[0]·lhs[1]·… == rhs[0]·rhs[1]·…`.
pub fn verify_products(lhs: &[&LabeledMatrix], rhs: &[&LabeledMatrix], mode: VerifyMode) -> Result<Verdict, RatError> {
    if lhs.is_empty() || rhs.is_empty() {
        return Err(RatError::Shape("empty product".into()));
    }
    let lrows = lhs[0].rows();
    let lcols = lhs[lhs.len() - 1].cols();
    if lrows != rhs[0].rows() || lcols != rhs[rhs.len() - 1].cols() {
        return Err(RatError::LabelMismatch("the two sides act on different label sets".into()));
    }
    for w in lhs.windows(2).chain(rhs.windows(2)) {
        if w[0].cols() != w[1].rows() {
            return Err(RatError::LabelMismatch("adjacent factors do not compose".into()));
        }
    }
    match mode {
        VerifyMode::Symbolic => symbolic(lhs, rhs),
        VerifyMode::Multipoint => multipoint(lhs, rhs),
    }
}

fn product(fs: &[&LabeledMatrix]) -> Result<LabeledMatrix, RatError> {
    let mut acc = fs[0].clone();
    for f in &fs[1..] {
        acc = acc.mul(f)?;
    }
    Ok(acc)
}

fn symbolic(lhs: &[&LabeledMatrix], rhs: &[&LabeledMatrix]) -> Result<Verdict, RatError> {
    let l = product(lhs)?;
    let r = product(rhs)?;
    let mut detail = String::new();
    let mut counterexample = None;
    let holds = l == r;
    if !holds {
        'outer: for i in 0..l.nrows() {
            for j in 0..l.ncols() {
                let (a, b) = (l.get(i, j), r.get(i, j));
                if a != b {
                    detail = format!("first mismatch at ({}, {}): {} vs {}", l.rows()[i], l.cols()[j], a, b);
                    counterexample = Some(Counterexample {
                        row: l.rows()[i].to_string(),
                        col: l.cols()[j].to_string(),
                        lhs: a.to_string(),
                        rhs: b.to_string(),
                        point: None,
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(Verdict { holds, mode: VerifyMode::Symbolic, points: 0, degree_bounds: vec![], detail, counterexample })
}

/// A factor with cleared denominators: `M = num / den`.
struct Cleared {
    num: Vec<Vec<(usize, Poly)>>,
    den: Poly,
}

fn lcm(a: &Poly, b: &Poly) -> Poly {
    let g = gcd(a, b);
    a.div_exact(&g).expect("gcd divides").mul(b)
}

fn clear(m: &LabeledMatrix) -> Cleared {
    let mut dens: BTreeSet<String> = BTreeSet::new();
    let mut den = Poly::one();
    for i in 0..m.nrows() {
        for (_, x) in m.row_entries(i) {
            if dens.insert(x.den().to_string()) {
                den = lcm(&den, x.den());
            }
        }
    }
    let num = (0..m.nrows())
        .map(|i| {
            m.row_entries(i)
                .iter()
                .map(|(j, x)| (*j, x.num().mul(&den.div_exact(x.den()).expect("lcm divides"))))
                .collect()
        })
        .collect();
    Cleared { num, den }
}

fn num_degree(c: &Cleared, v: Var) -> u32 {
    c.num.iter().flat_map(|r| r.iter().map(|(_, p)| p.degree_in(v))).max().unwrap_or(0)
}

type NumRow = Vec<(usize, BigInt)>;

fn eval_factor(c: &Cleared, pt: &[BigInt; NVARS]) -> Vec<NumRow> {
    c.num
        .iter()
        .map(|r| r.iter().map(|(j, p)| (*j, p.eval_int(pt))).filter(|(_, x)| !x.is_zero()).collect())
        .collect()
}

fn num_mul(a: &[NumRow], b: &[NumRow]) -> Vec<NumRow> {
    a.iter()
        .map(|r| {
            let mut acc: std::collections::BTreeMap<usize, BigInt> = Default::default();
            for (k, x) in r {
                for (j, y) in &b[*k] {
                    *acc.entry(*j).or_insert_with(BigInt::zero) += x * y;
                }
            }
            acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
        })
        .collect()
}

fn num_scale(a: &mut [NumRow], c: &BigInt) {
    for r in a.iter_mut() {
        for (_, x) in r.iter_mut() {
            *x *= c;
        }
    }
}

const MAX_GRID_ATTEMPTS: u32 = 8;

fn multipoint(lhs: &[&LabeledMatrix], rhs: &[&LabeledMatrix]) -> Result<Verdict, RatError> {
    let cl: Vec<Cleared> = lhs.par_iter().map(|m| clear(m)).collect();
    let cr: Vec<Cleared> = rhs.par_iter().map(|m| clear(m)).collect();
    let mut mask = 0u8;
    for c in cl.iter().chain(cr.iter()) {
        mask |= c.den.var_mask();
        for r in &c.num {
            for (_, p) in r {
                mask |= p.var_mask();
            }
        }
    }
    let vars: Vec<Var> = Var::ALL.iter().copied().filter(|v| mask & (1 << v.index()) != 0).collect();
    let bounds: Vec<u32> = vars
        .iter()
        .map(|&v| {
            let nl: u32 = cl.iter().map(|c| num_degree(c, v)).sum();
            let nr: u32 = cr.iter().map(|c| num_degree(c, v)).sum();
            let dl: u32 = cl.iter().map(|c| c.den.degree_in(v)).sum();
            let dr: u32 = cr.iter().map(|c| c.den.degree_in(v)).sum();
            (nl + dr).max(nr + dl)
        })
        .collect();
    let degree_bounds: Vec<(String, u32)> = vars.iter().zip(&bounds).map(|(v, d)| (v.name().to_string(), *d)).collect();

    // Every entry denominator of every factor; the grid must avoid their zeros.
    let mut all_dens: Vec<Poly> = Vec::new();
    for m in lhs.iter().chain(rhs.iter()) {
        let mut seen = BTreeSet::new();
        for i in 0..m.nrows() {
            for (_, x) in m.row_entries(i) {
                if !x.den().is_constant() && seen.insert(x.den().to_string()) {
                    all_dens.push(x.den().clone());
                }
            }
        }
    }

    for attempt in 0..MAX_GRID_ATTEMPTS {
        // Variables live on well separated integer scales so small linear
        // forms in them rarely vanish on the grid.
        let axes: Vec<Vec<BigInt>> = vars
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let base = BigInt::from(7 + attempt as i64 * 13) * num_traits::pow(BigInt::from(101), k);
                (0..=bounds[k] as i64)
                    .map(|j| &base + BigInt::from(j * (k as i64 + 2)))
                    .collect()
            })
            .collect();
        let total: usize = axes.iter().map(|a| a.len()).product();
        let points: Vec<[BigInt; NVARS]> = (0..total)
            .map(|mut idx| {
                let mut pt: [BigInt; NVARS] = std::array::from_fn(|_| BigInt::zero());
                for (k, v) in vars.iter().enumerate() {
                    let n = axes[k].len();
                    pt[v.index()] = axes[k][idx % n].clone();
                    idx /= n;
                }
                pt
            })
            .collect();
        let clean = points.par_iter().all(|pt| all_dens.iter().all(|d| !d.eval_int(pt).is_zero()));
        if !clean {
            continue;
        }
        let bad = points.par_iter().find_map_first(|pt| side_mismatch(&cl, &cr, pt).map(|m| (pt, m)));
        let (detail, counterexample) = match bad {
            Some((pt, (i, j, a, b))) => {
                let at = vars.iter().map(|v| format!("{}={}", v, pt[v.index()])).collect::<Vec<_>>().join(", ");
                let (row, col) = (lhs[0].rows()[i].to_string(), lhs[lhs.len() - 1].cols()[j].to_string());
                (
                    format!("identity fails at {at}: entry ({row}, {col}) is {a} vs {b}"),
                    Some(Counterexample { row, col, lhs: a.to_string(), rhs: b.to_string(), point: Some(at) }),
                )
            }
            None => (String::new(), None),
        };
        return Ok(Verdict {
            holds: counterexample.is_none(),
            mode: VerifyMode::Multipoint,
            points: total,
            degree_bounds,
            detail,
            counterexample,
        });
    }
    Err(RatError::GridExhausted)
}

/// First entry where the two sides differ at `pt`, with both true values.
fn side_mismatch(
    cl: &[Cleared],
    cr: &[Cleared],
    pt: &[BigInt; NVARS],
) -> Option<(usize, usize, BigRational, BigRational)> {
    let eval_side = |fs: &[Cleared], others: &[Cleared]| {
        let mut acc = eval_factor(&fs[0], pt);
        for f in &fs[1..] {
            acc = num_mul(&acc, &eval_factor(f, pt));
        }
        let mut s = BigInt::one();
        for f in others {
            s *= f.den.eval_int(pt);
        }
        num_scale(&mut acc, &s);
        acc
    };
    let l = eval_side(cl, cr);
    let r = eval_side(cr, cl);
    if l == r {
        return None;
    }
    // both sides carry the full product of denominators
    let scale: BigInt = cl.iter().chain(cr).map(|c| c.den.eval_int(pt)).product();
    let get = |m: &[NumRow], i: usize, j: usize| {
        m[i].iter().find(|(c, _)| *c == j).map(|(_, x)| x.clone()).unwrap_or_else(BigInt::zero)
    };
    for i in 0..l.len() {
        let cols: BTreeSet<usize> = l[i].iter().chain(&r[i]).map(|(c, _)| *c).collect();
        for j in cols {
            let (a, b) = (get(&l, i, j), get(&r, i, j));
            if a != b {
                return Some((i, j, BigRational::new(a, scale.clone()), BigRational::new(b, scale.clone())));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfield::matrix::index_labels;
    use crate::ratfield::RatFunc;

    fn p(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    fn m2(a: &str, b: &str, c: &str, d: &str) -> LabeledMatrix {
        LabeledMatrix::from_dense(index_labels(2), index_labels(2), vec![vec![p(a), p(b)], vec![p(c), p(d)]]).unwrap()
    }

    #[test]
    fn identity_equal_both_modes() {
        let i = LabeledMatrix::identity(index_labels(3));
        for mode in [VerifyMode::Symbolic, VerifyMode::Multipoint] {
            assert!(verify_identity(&i, &i, mode).unwrap().holds);
        }
    }

    #[test]
    fn inverse_product_is_identity_multipoint() {
        let a = m2("u / (u + h)", "h / (u + h)", "h / (u + h)", "u / (u + h)");
        let ai = a.inv().unwrap();
        let i = LabeledMatrix::identity(index_labels(2));
        let v = verify_products(&[&a, &ai], &[&i], VerifyMode::Multipoint).unwrap();
        assert!(v.holds, "{}", v.detail);
        assert!(v.points > 1);
    }

    #[test]
    fn detects_a_false_identity() {
        let a = m2("u", "h", "0", "1");
        let b = m2("u", "h", "0", "1 + h^3 * (u - 1) * (u - 2)");
        for mode in [VerifyMode::Symbolic, VerifyMode::Multipoint] {
            assert!(!verify_identity(&a, &b, mode).unwrap().holds);
        }
    }
}
