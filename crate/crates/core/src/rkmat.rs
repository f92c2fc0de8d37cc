//! R- and K-matrices over the rational-function field, tensor-factor embeddings,
//! monodromy matrices and the S-matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ratfield::{index_labels, Label, LabeledMatrix, RatError, RatFunc, Var};

pub const DEFAULT_DIM_BOUND: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RkError {
    #[error(transparent)]
    Rat(#[from] RatError),
    #[error("tensor dimension {dim} exceeds bound {bound}")]
    DimensionBound { dim: usize, bound: usize },
    #[error("ell must be at least 2, got {0}")]
    Size(usize),
}

fn h() -> RatFunc {
    RatFunc::var(Var::H)
}

fn check_ell(ell: usize) -> Result<(), RkError> {
    if ell < 2 {
        Err(RkError::Size(ell))
    } else {
        Ok(())
    }
}

/// Labels of `F^{⊗k}` with `dim F = ell`, nested left to right as produced by `kron`.
pub fn tensor_labels(dims: &[usize]) -> Vec<Label> {
    let mut it = dims.iter();
    let Some(&first) = it.next() else {
        return vec![Label::atom("*")];
    };
    let mut labels = index_labels(first);
    for &d in it {
        labels = labels
            .iter()
            .flat_map(|a| index_labels(d).into_iter().map(move |b| Label::pair(a.clone(), b)))
            .collect();
    }
    labels
}

pub fn pair_labels(ell: usize) -> Vec<Label> {
    tensor_labels(&[ell, ell])
}

/// The swap `P` on `F ⊗ F`.
pub fn swap(ell: usize) -> LabeledMatrix {
    let l = pair_labels(ell);
    LabeledMatrix::from_fn(l.clone(), l, |i, j| {
        let (s, t) = (i / ell, i % ell);
        RatFunc::from_int(i64::from(j == t * ell + s))
    })
}

/// `Q = Σ e_ij ⊗ e_ij`: the all-ones block on the diagonal pairs `(i,i)`.
pub fn diagonal_pair_block(ell: usize) -> LabeledMatrix {
    let l = pair_labels(ell);
    LabeledMatrix::from_fn(l.clone(), l, |i, j| RatFunc::from_int(i64::from(i % (ell + 1) == 0 && j % (ell + 1) == 0)))
}

/// The all-ones `ell × ell` matrix.
pub fn all_ones(ell: usize) -> LabeledMatrix {
    LabeledMatrix::from_fn(index_labels(ell), index_labels(ell), |_, _| RatFunc::one())
}

/// The permutation matrix of `s ↦ ell + 1 - s`.
pub fn anti_identity(ell: usize) -> LabeledMatrix {
    LabeledMatrix::from_fn(index_labels(ell), index_labels(ell), |i, j| RatFunc::from_int(i64::from(i + j + 1 == ell)))
}

/// Yang's R-matrix `(u + ℏP)/(u + ℏ)`.
pub fn yang_r(ell: usize, u: &RatFunc) -> Result<LabeledMatrix, RkError> {
    check_ell(ell)?;
    let den = (u + &h()).inv()?;
    let a = u * &den;
    let b = &h() * &den;
    let l = pair_labels(ell);
    Ok(LabeledMatrix::from_fn(l.clone(), l, |i, j| {
        let (s, t) = (i / ell, i % ell);
        let p = j == t * ell + s;
        match (i == j, p) {
            (true, true) => RatFunc::one(),
            (true, false) => a.clone(),
            (false, true) => b.clone(),
            _ => RatFunc::zero(),
        }
    }))
}

/// `Id - ℏ/(u + ℓℏ/2) · Q`.
pub fn r_bullet_sigma(ell: usize, u: &RatFunc) -> Result<LabeledMatrix, RkError> {
    check_ell(ell)?;
    let c = h().checked_div(&(u + &(&RatFunc::from_ratio(ell as i64, 2) * &h())))?;
    let id = LabeledMatrix::identity(pair_labels(ell));
    Ok(id.sub(&diagonal_pair_block(ell).scale(&c))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum KMatrixKind {
    SpInstanton,
    SoInstanton,
    FlagPlus,
    FlagMinus,
}

impl KMatrixKind {
    pub const ALL: [KMatrixKind; 4] =
        [KMatrixKind::SpInstanton, KMatrixKind::SoInstanton, KMatrixKind::FlagPlus, KMatrixKind::FlagMinus];

    pub fn name(self) -> &'static str {
        match self {
            KMatrixKind::SpInstanton => "spInstanton",
            KMatrixKind::SoInstanton => "soInstanton",
            KMatrixKind::FlagPlus => "flagPlus",
            KMatrixKind::FlagMinus => "flagMinus",
        }
    }

    /// The constant term `σ` of the K-matrix at `u = ∞`.
    pub fn sigma(self, ell: usize) -> LabeledMatrix {
        match self {
            KMatrixKind::SpInstanton | KMatrixKind::SoInstanton => LabeledMatrix::identity(index_labels(ell)),
            KMatrixKind::FlagPlus | KMatrixKind::FlagMinus => anti_identity(ell),
        }
    }
}

impl fmt::Display for KMatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KMatrixKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        KMatrixKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown K-matrix kind '{s}'"))
    }
}

/// Where the `u`-type entries of the two-entry K-matrix sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagPlacement {
    /// `2u/(2u+ℏ)` on the anti-diagonal, so the constant term is `σ`.
    AntiDiagonal,
    /// `2u/(2u+ℏ)` on the diagonal.
    Diagonal,
}

pub fn flag_minus_k(ell: usize, u: &RatFunc, placement: FlagPlacement) -> Result<LabeledMatrix, RkError> {
    check_ell(ell)?;
    let two_u = &RatFunc::from_int(2) * u;
    let den = (&two_u + &h()).inv()?;
    let a = &two_u * &den;
    let b = &h() * &den;
    let (on_anti, on_diag) = match placement {
        FlagPlacement::AntiDiagonal => (a, b),
        FlagPlacement::Diagonal => (b, a),
    };
    Ok(LabeledMatrix::from_fn(index_labels(ell), index_labels(ell), |i, j| {
        let anti = i + j + 1 == ell;
        match (i == j, anti) {
            (true, true) => RatFunc::one(),
            (true, false) => on_diag.clone(),
            (false, true) => on_anti.clone(),
            _ => RatFunc::zero(),
        }
    }))
}

pub fn k_matrix(kind: KMatrixKind, ell: usize, u: &RatFunc) -> Result<LabeledMatrix, RkError> {
    check_ell(ell)?;
    Ok(match kind {
        KMatrixKind::SoInstanton => LabeledMatrix::identity(index_labels(ell)),
        KMatrixKind::FlagPlus => anti_identity(ell),
        KMatrixKind::FlagMinus => flag_minus_k(ell, u, FlagPlacement::AntiDiagonal)?,
        KMatrixKind::SpInstanton => {
            let shift = &RatFunc::from_ratio(ell as i64, 2) * &h();
            let c = h().checked_div(&(&(&RatFunc::from_int(2) * u) + &shift))?;
            LabeledMatrix::identity(index_labels(ell)).sub(&all_ones(ell).scale(&c))?
        }
    })
}

/// Extends `op`, acting on the tensor factors `factors` (in that order), by the
/// identity on the remaining factors of a space with factor dimensions `dims`.
pub fn embed(op: &LabeledMatrix, factors: &[usize], dims: &[usize]) -> Result<LabeledMatrix, RkError> {
    let sub: usize = factors.iter().map(|&f| dims[f]).product();
    if op.nrows() != sub || op.ncols() != sub {
        return Err(RatError::Shape(format!("operator is {}x{}, factors span {sub}", op.nrows(), op.ncols())).into());
    }
    let labels = tensor_labels(dims);
    let n = labels.len();
    let strides: Vec<usize> = (0..dims.len()).map(|i| dims[i + 1..].iter().product()).collect();
    let digit = |idx: usize, f: usize| (idx / strides[f]) % dims[f];
    let local = |idx: usize| factors.iter().fold(0, |acc, &f| acc * dims[f] + digit(idx, f));
    let mut out = LabeledMatrix::zeros(labels.clone(), labels);
    for row in 0..n {
        let r = local(row);
        let base = row - factors.iter().map(|&f| digit(row, f) * strides[f]).sum::<usize>();
        for (c, x) in op.row_entries(r) {
            let mut col = base;
            let mut rem = *c;
            for &f in factors.iter().rev() {
                col += (rem % dims[f]) * strides[f];
                rem /= dims[f];
            }
            out.set(row, col, x.clone());
        }
    }
    Ok(out)
}

pub type Builder<'a> = dyn Fn(&RatFunc) -> Result<LabeledMatrix, RkError> + Sync + 'a;

fn check_bound(dims: &[usize], bound: usize) -> Result<(), RkError> {
    let dim: usize = dims.iter().product();
    if dim > bound {
        Err(RkError::DimensionBound { dim, bound })
    } else {
        Ok(())
    }
}

/// The factors `R_{aux,n}(u - u_n), …, R_{aux,1}(u - u_1)` of a monodromy matrix on
/// the space `dims`, with site `k` at tensor position `sites[k]`.
pub fn monodromy_factors(
    r: &Builder,
    aux: usize,
    sites: &[usize],
    u: &RatFunc,
    shifts: &[RatFunc],
    dims: &[usize],
) -> Result<Vec<LabeledMatrix>, RkError> {
    check_bound(dims, DEFAULT_DIM_BOUND)?;
    sites
        .iter()
        .zip(shifts)
        .rev()
        .map(|(&s, uk)| embed(&r(&(u - uk))?, &[aux, s], dims))
        .collect()
}

pub fn product(factors: &[LabeledMatrix], dims: &[usize]) -> Result<LabeledMatrix, RkError> {
    let mut acc = LabeledMatrix::identity(tensor_labels(dims));
    for f in factors {
        acc = acc.mul(f)?;
    }
    Ok(acc)
}

/// `T(u) = R_{0,n}(u - u_n) ⋯ R_{0,1}(u - u_1)` on `F ⊗ F^{⊗n}` with the auxiliary space first.
pub fn monodromy_t(ell: usize, u: &RatFunc, shifts: &[RatFunc], r: &Builder) -> Result<LabeledMatrix, RkError> {
    let dims = vec![ell; shifts.len() + 1];
    let sites: Vec<usize> = (1..=shifts.len()).collect();
    product(&monodromy_factors(r, 0, &sites, u, shifts, &dims)?, &dims)
}

/// The R-matrix `R^{σ•}(x)` as an operator on `F^σ ⊗ F`, obtained from the
/// boundary builder by unitarity: `(P B(-x) P)^{-1}`.
pub fn r_sigma_bullet(ell: usize, b: &Builder, x: &RatFunc) -> Result<LabeledMatrix, RkError> {
    let p = swap(ell);
    Ok(p.mul(&b(&-x)?)?.mul(&p)?.inv()?)
}

/// `S(u)` as the product of the left factors `P B(u + u_k) P` for `k = 1..n`,
/// then `K(u)` on the auxiliary space, then `T(u)`.
pub fn s_matrix_factors(
    ell: usize,
    u: &RatFunc,
    shifts: &[RatFunc],
    k: &LabeledMatrix,
    r: &Builder,
    b: &Builder,
) -> Result<Vec<LabeledMatrix>, RkError> {
    let dims = vec![ell; shifts.len() + 1];
    check_bound(&dims, DEFAULT_DIM_BOUND)?;
    let p = swap(ell);
    let mut out = Vec::new();
    for (i, uk) in shifts.iter().enumerate() {
        let bk = p.mul(&b(&(u + uk))?)?.mul(&p)?;
        out.push(embed(&bk, &[0, i + 1], &dims)?);
    }
    out.push(embed(k, &[0], &dims)?);
    let sites: Vec<usize> = (1..=shifts.len()).collect();
    out.extend(monodromy_factors(r, 0, &sites, u, shifts, &dims)?);
    Ok(out)
}

pub fn s_matrix(
    ell: usize,
    u: &RatFunc,
    shifts: &[RatFunc],
    k: &LabeledMatrix,
    r: &Builder,
    b: &Builder,
) -> Result<LabeledMatrix, RkError> {
    let dims = vec![ell; shifts.len() + 1];
    product(&s_matrix_factors(ell, u, shifts, k, r, b)?, &dims)
}

/// `T^σ(-u)^{-1} K(u) T(u)`, inverting the full twisted monodromy matrix.
pub fn s_matrix_factorized(
    ell: usize,
    u: &RatFunc,
    shifts: &[RatFunc],
    k: &LabeledMatrix,
    r: &Builder,
    b: &Builder,
) -> Result<LabeledMatrix, RkError> {
    let dims = vec![ell; shifts.len() + 1];
    let rsb = |x: &RatFunc| r_sigma_bullet(ell, b, x);
    let t_sigma = monodromy_t(ell, &-u, shifts, &rsb)?;
    let t = monodromy_t(ell, u, shifts, r)?;
    Ok(t_sigma.inv()?.relabel(tensor_labels(&dims), tensor_labels(&dims))?.mul(&embed(k, &[0], &dims)?)?.mul(&t)?)
}

/// Entrywise coefficient of `var^{-order}` in the expansion at `var = ∞`.
pub fn expansion_coefficient(m: &LabeledMatrix, var: Var, order: usize) -> Result<LabeledMatrix, RkError> {
    let mut out = LabeledMatrix::zeros(m.rows().to_vec(), m.cols().to_vec());
    for i in 0..m.nrows() {
        for (j, x) in m.row_entries(i) {
            out.set(i, *j, x.expand_at_infinity(var, order)?[order].clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> RatFunc {
        RatFunc::var(Var::U)
    }

    #[test]
    fn yang_two() {
        let r = yang_r(2, &u()).unwrap();
        assert!(r.get(0, 0).is_one() && r.get(3, 3).is_one());
        assert_eq!(r.get(1, 1).to_string(), "u / (u + h)");
        assert_eq!(r.get(1, 2).to_string(), "h / (u + h)");
        assert!(r.get(0, 1).is_zero());
        assert!(expansion_coefficient(&r, Var::U, 0).unwrap().is_identity());
    }

    #[test]
    fn ones_squared() {
        let j = all_ones(3);
        assert_eq!(j.mul(&j).unwrap(), j.scale(&RatFunc::from_int(3)));
        let p = swap(3);
        assert!(p.mul(&p).unwrap().is_identity());
    }

    #[test]
    fn bullet_sigma_two() {
        let x: RatFunc = "u1 + u2".parse().unwrap();
        let m = r_bullet_sigma(2, &x).unwrap();
        assert_eq!(m.get(0, 3).to_string(), "-h / (u2 + u1 + h)");
        assert_eq!(m.get(0, 0).to_string(), "(u2 + u1) / (u2 + u1 + h)");
        assert!(m.get(1, 1).is_one());
        let m3 = r_bullet_sigma(3, &u()).unwrap();
        let sum = (0..9).fold(RatFunc::zero(), |acc, j| &acc + &m3.get(4, j));
        assert_eq!(sum, "(2*u - 3*h) / (2*u + 3*h)".parse().unwrap());
    }

    #[test]
    fn k_matrices() {
        let k = k_matrix(KMatrixKind::SpInstanton, 2, &u()).unwrap();
        assert_eq!(k.get(0, 0).to_string(), "2*u / (2*u + h)");
        assert_eq!(k.get(0, 1).to_string(), "-h / (2*u + h)");
        let k = k_matrix(KMatrixKind::FlagPlus, 4, &u()).unwrap();
        assert_eq!(k, anti_identity(4));
        assert!(k_matrix(KMatrixKind::SoInstanton, 3, &u()).unwrap().is_identity());
        let k = k_matrix(KMatrixKind::FlagMinus, 3, &u()).unwrap();
        assert!(k.get(1, 1).is_one());
        assert_eq!(expansion_coefficient(&k, Var::U, 0).unwrap(), anti_identity(3));
        let sp3 = k_matrix(KMatrixKind::SpInstanton, 3, &u()).unwrap();
        assert!(expansion_coefficient(&sp3, Var::U, 0).unwrap().is_identity());
    }

    #[test]
    fn embedding_matches_kron() {
        let r = yang_r(2, &u()).unwrap();
        let id = LabeledMatrix::identity(index_labels(2));
        assert_eq!(embed(&r, &[0, 1], &[2, 2, 2]).unwrap(), r.kron(&id));
        let l = tensor_labels(&[2, 2, 2]);
        assert_eq!(embed(&r, &[1, 2], &[2, 2, 2]).unwrap(), id.kron(&r).relabel(l.clone(), l).unwrap());
        let p = swap(2);
        let swapped = p.mul(&r).unwrap().mul(&p).unwrap();
        assert_eq!(embed(&r, &[1, 0], &[2, 2]).unwrap(), swapped);
    }

    #[test]
    fn trivial_monodromy() {
        let yang = |x: &RatFunc| yang_r(2, x);
        assert!(monodromy_t(2, &u(), &[], &yang).unwrap().is_identity());
        let u1 = RatFunc::var(Var::U1);
        let t = monodromy_t(2, &u(), std::slice::from_ref(&u1), &yang).unwrap();
        assert_eq!(t, yang_r(2, &(&u() - &u1)).unwrap());
    }

    #[test]
    fn dimension_bound() {
        let yang = |x: &RatFunc| yang_r(3, x);
        let shifts: Vec<RatFunc> = (0..5).map(|_| RatFunc::var(Var::U1)).collect();
        assert!(matches!(monodromy_t(3, &u(), &shifts, &yang), Err(RkError::DimensionBound { .. })));
    }
}
