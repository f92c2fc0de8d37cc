//! Exact checks of the operator identities: Yang–Baxter, unitarity, the
//! reflection equation, the four RTT relations, the S-matrix factorization and
//! the embedding of solutions into larger spaces.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::ratfield::{index_labels, verify_products, LabeledMatrix, RatFunc, Var, Verdict, VerifyMode};
use crate::rkmat::{
    embed, expansion_coefficient, flag_minus_k, k_matrix, monodromy_factors, r_bullet_sigma, r_sigma_bullet,
    s_matrix_factorized, s_matrix_factors, swap, tensor_labels, yang_r, Builder, FlagPlacement, KMatrixKind,
    RkError,
};

fn var(v: Var) -> RatFunc {
    RatFunc::var(v)
}

/// A K-matrix together with the R-matrices it is paired with in the reflection
/// equation. `R` and `R^{σσ}_{21}` are Yang's matrix throughout; `R^{•σ}` is
/// Yang's matrix for the flag kinds, the diagonal-pair matrix for the orthogonal
/// instanton and `R(-x)` for the symplectic instanton; `R^{σ•}_{21}` is its swap
/// conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub kind: KMatrixKind,
    pub ell: usize,
    pub placement: FlagPlacement,
}

impl Scenario {
    pub fn new(kind: KMatrixKind, ell: usize) -> Scenario {
        Scenario { kind, ell, placement: FlagPlacement::AntiDiagonal }
    }

    pub fn with_placement(mut self, placement: FlagPlacement) -> Scenario {
        self.placement = placement;
        self
    }

    pub fn r(&self, x: &RatFunc) -> Result<LabeledMatrix, RkError> {
        yang_r(self.ell, x)
    }

    /// `R^{•σ}(x)` on `F ⊗ F^σ`.
    pub fn bullet_sigma(&self, x: &RatFunc) -> Result<LabeledMatrix, RkError> {
        match self.kind {
            KMatrixKind::SoInstanton => r_bullet_sigma(self.ell, x),
            KMatrixKind::SpInstanton => yang_r(self.ell, &-x),
            KMatrixKind::FlagPlus | KMatrixKind::FlagMinus => yang_r(self.ell, x),
        }
    }

    /// `R^{σ•}_{21}(x) = P R^{•σ}(x) P`.
    pub fn sigma_bullet_21(&self, x: &RatFunc) -> Result<LabeledMatrix, RkError> {
        let p = swap(self.ell);
        Ok(p.mul(&self.bullet_sigma(x)?)?.mul(&p)?)
    }

    pub fn k(&self, u: &RatFunc) -> Result<LabeledMatrix, RkError> {
        match self.kind {
            KMatrixKind::FlagMinus => flag_minus_k(self.ell, u, self.placement),
            k => k_matrix(k, self.ell, u),
        }
    }

    pub fn label(&self) -> String {
        match (self.kind, self.placement) {
            (KMatrixKind::FlagMinus, FlagPlacement::Diagonal) => format!("{}[diagonal]/l={}", self.kind, self.ell),
            _ => format!("{}/l={}", self.kind, self.ell),
        }
    }
}

/// A verdict with the identity it refers to and what the suite expects of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityVerdict {
    pub identity: String,
    pub scenario: Option<String>,
    /// `Some(true)`: must hold; `Some(false)`: must fail; `None`: reported only.
    pub expected: Option<bool>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl IdentityVerdict {
    pub fn holds(&self) -> bool {
        self.verdict.holds
    }

    pub fn as_expected(&self) -> bool {
        self.expected.is_none_or(|e| e == self.verdict.holds)
    }
}

fn verdict(
    identity: impl Into<String>,
    scenario: Option<String>,
    lhs: &[LabeledMatrix],
    rhs: &[LabeledMatrix],
    mode: VerifyMode,
) -> Result<IdentityVerdict, RkError> {
    let l: Vec<&LabeledMatrix> = lhs.iter().collect();
    let r: Vec<&LabeledMatrix> = rhs.iter().collect();
    Ok(IdentityVerdict { identity: identity.into(), scenario, expected: Some(true), verdict: verify_products(&l, &r, mode)? })
}

/// `R12(u1-u2) R13(u1-u3) R23(u2-u3) = R23(u2-u3) R13(u1-u3) R12(u1-u2)`.
pub fn check_ybe(ell: usize, r: &Builder, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    let dims = [ell; 3];
    let (u1, u2, u3) = (var(Var::U1), var(Var::U2), var(Var::U3));
    let r12 = embed(&r(&(&u1 - &u2))?, &[0, 1], &dims)?;
    let r13 = embed(&r(&(&u1 - &u3))?, &[0, 2], &dims)?;
    let r23 = embed(&r(&(&u2 - &u3))?, &[1, 2], &dims)?;
    verdict(
        format!("yang-baxter/l={ell}"),
        None,
        &[r12.clone(), r13.clone(), r23.clone()],
        &[r23, r13, r12],
        mode,
    )
}

/// `R(u1-u2) · P R(u2-u1) P = Id`.
pub fn check_r_unitarity(ell: usize, r: &Builder, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    let x = &var(Var::U1) - &var(Var::U2);
    let p = swap(ell);
    let back = p.mul(&r(&-&x)?)?.mul(&p)?;
    let id = LabeledMatrix::identity(tensor_labels(&[ell, ell]));
    verdict(format!("r-unitarity/l={ell}"), None, &[r(&x)?, back], &[id], mode)
}

/// `K(-u) K(u) = Id`.
pub fn check_k_unitarity(ell: usize, k: &Builder, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    let u = var(Var::U);
    let id = LabeledMatrix::identity(index_labels(ell));
    verdict(format!("k-unitarity/l={ell}"), None, &[k(&-&u)?, k(&u)?], &[id], mode)
}

fn reflection_factors(
    s: &Scenario,
    k1: &LabeledMatrix,
    k2: &LabeledMatrix,
    dims: &[usize],
) -> Result<(Vec<LabeledMatrix>, Vec<LabeledMatrix>), RkError> {
    let (u1, u2) = (var(Var::U1), var(Var::U2));
    let diff = &u1 - &u2;
    let sum = &u1 + &u2;
    let r = embed(&s.r(&diff)?, &[0, 1], dims)?;
    let rss = r.clone();
    let b = embed(&s.bullet_sigma(&sum)?, &[0, 1], dims)?;
    let b21 = embed(&s.sigma_bullet_21(&sum)?, &[0, 1], dims)?;
    Ok((vec![k2.clone(), b21, k1.clone(), r], vec![rss, k1.clone(), b, k2.clone()]))
}

/// `K2(u2) R^{σ•}_{21}(u1+u2) K1(u1) R(u1-u2) = R^{σσ}_{21}(u1-u2) K1(u1) R^{•σ}(u1+u2) K2(u2)`.
pub fn check_reflection(s: &Scenario, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    let dims = [s.ell, s.ell];
    let k1 = embed(&s.k(&var(Var::U1))?, &[0], &dims)?;
    let k2 = embed(&s.k(&var(Var::U2))?, &[1], &dims)?;
    let (l, r) = reflection_factors(s, &k1, &k2, &dims)?;
    verdict("reflection", Some(s.label()), &l, &r, mode)
}

/// The reflection equation for a constant K-matrix with the scenario's R-matrices.
pub fn check_reflection_constant_k(s: &Scenario, k: &LabeledMatrix, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    let dims = [s.ell, s.ell];
    let k1 = embed(k, &[0], &dims)?;
    let k2 = embed(k, &[1], &dims)?;
    let (l, r) = reflection_factors(s, &k1, &k2, &dims)?;
    verdict("reflection[constant K]", Some(s.label()), &l, &r, mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RttVariant {
    H5,
    H6,
    H7,
    H8,
}

impl RttVariant {
    pub const ALL: [RttVariant; 4] = [RttVariant::H5, RttVariant::H6, RttVariant::H7, RttVariant::H8];
}

impl fmt::Display for RttVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RttVariant::H5 => "h5",
            RttVariant::H6 => "h6",
            RttVariant::H7 => "h7",
            RttVariant::H8 => "h8",
        };
        f.write_str(s)
    }
}

impl FromStr for RttVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        RttVariant::ALL.into_iter().find(|v| v.to_string() == s.to_ascii_lowercase()).ok_or_else(|| format!("unknown RTT variant '{s}'"))
    }
}

/// RTT relations for two auxiliary spaces (parameters `u1`, `u2`) over `n ≤ 2`
/// sites with inhomogeneities `u3`, `u4`:
///
/// * h5: `R(u-v) T1(u) T2(v) = T2(v) T1(u) R(u-v)`
/// * h6: `R^{•σ}(u+v) T1(u) T2^σ(-v) = T2^σ(-v) T1(u) R^{•σ}(u+v)`
/// * h7: `R^{σ•}(-u-v) T1^σ(-u) T2(v) = T2(v) T1^σ(-u) R^{σ•}(-u-v)`
/// * h8: `R(-u+v) T1^σ(-u) T2^σ(-v) = T2^σ(-v) T1^σ(-u) R(-u+v)`
pub fn check_rtt(s: &Scenario, n: usize, variant: RttVariant, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    if n > 2 {
        return Err(RkError::DimensionBound { dim: n, bound: 2 });
    }
    let ell = s.ell;
    let dims = vec![ell; n + 2];
    let sites: Vec<usize> = (2..n + 2).collect();
    let shifts: Vec<RatFunc> = [Var::U3, Var::U4][..n].iter().map(|&v| var(v)).collect();
    let (u, v) = (var(Var::U1), var(Var::U2));
    let r = |x: &RatFunc| s.r(x);
    let b = |x: &RatFunc| s.bullet_sigma(x);
    let rsb = |x: &RatFunc| r_sigma_bullet(ell, &b, x);
    let t = |aux: usize, z: &RatFunc| monodromy_factors(&r, aux, &sites, z, &shifts, &dims);
    let ts = |aux: usize, z: &RatFunc| monodromy_factors(&rsb, aux, &sites, z, &shifts, &dims);
    let (x12, first, second) = match variant {
        RttVariant::H5 => (r(&(&u - &v))?, t(0, &u)?, t(1, &v)?),
        RttVariant::H6 => (b(&(&u + &v))?, t(0, &u)?, ts(1, &-&v)?),
        RttVariant::H7 => (rsb(&(&-&u - &v))?, ts(0, &-&u)?, t(1, &v)?),
        RttVariant::H8 => (r(&(&v - &u))?, ts(0, &-&u)?, ts(1, &-&v)?),
    };
    let x12 = embed(&x12, &[0, 1], &dims)?;
    let mut lhs = vec![x12.clone()];
    lhs.extend(first.iter().cloned());
    lhs.extend(second.iter().cloned());
    let mut rhs = second;
    rhs.extend(first);
    rhs.push(x12);
    verdict(format!("rtt-{variant}/n={n}"), Some(s.label()), &lhs, &rhs, mode)
}

/// The product form of `S(u)` against `T^σ(-u)^{-1} K(u) T(u)`.
pub fn check_s_factorization(s: &Scenario, n: usize, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    let u = var(Var::U);
    let shifts: Vec<RatFunc> = [Var::U1, Var::U2][..n].iter().map(|&v| var(v)).collect();
    let k = s.k(&u)?;
    let r = |x: &RatFunc| s.r(x);
    let b = |x: &RatFunc| s.bullet_sigma(x);
    let factors = s_matrix_factors(s.ell, &u, &shifts, &k, &r, &b)?;
    let other = s_matrix_factorized(s.ell, &u, &shifts, &k, &r, &b)?;
    verdict(format!("s-factorization/n={n}"), Some(s.label()), &factors, &[other], mode)
}

/// The constant term of `S(u)` at `u = ∞` against `σ ⊗ Id`.
pub fn check_s_constant_term(s: &Scenario, n: usize) -> Result<IdentityVerdict, RkError> {
    let u = var(Var::U);
    let shifts: Vec<RatFunc> = [Var::U1, Var::U2][..n].iter().map(|&v| var(v)).collect();
    let dims = vec![s.ell; n + 1];
    let k = s.k(&u)?;
    let r = |x: &RatFunc| s.r(x);
    let b = |x: &RatFunc| s.bullet_sigma(x);
    let sm = crate::rkmat::s_matrix(s.ell, &u, &shifts, &k, &r, &b)?;
    let c0 = expansion_coefficient(&sm, Var::U, 0)?;
    let sigma = embed(&s.kind.sigma(s.ell), &[0], &dims)?;
    verdict(format!("s-constant-term/n={n}"), Some(s.label()), &[c0], &[sigma], VerifyMode::Symbolic)
}

/// The reflection equation for `S'(u) = T^σ(-u)^{-1} K(u) T(u)` on `F1 ⊗ F2 ⊗ F`
/// with one site at `u3`.
pub fn check_embedding(s: &Scenario, mode: VerifyMode) -> Result<IdentityVerdict, RkError> {
    let ell = s.ell;
    let dims = [ell; 3];
    let u3 = var(Var::U3);
    let p = swap(ell);
    let s_prime = |aux: usize, ua: &RatFunc| -> Result<Vec<LabeledMatrix>, RkError> {
        let left = p.mul(&s.bullet_sigma(&(ua + &u3))?)?.mul(&p)?;
        Ok(vec![
            embed(&left, &[aux, 2], &dims)?,
            embed(&s.k(ua)?, &[aux], &dims)?,
            embed(&s.r(&(ua - &u3))?, &[aux, 2], &dims)?,
        ])
    };
    let (u1, u2) = (var(Var::U1), var(Var::U2));
    let s1 = s_prime(0, &u1)?;
    let s2 = s_prime(1, &u2)?;
    let r = embed(&s.r(&(&u1 - &u2))?, &[0, 1], &dims)?;
    let b = embed(&s.bullet_sigma(&(&u1 + &u2))?, &[0, 1], &dims)?;
    let b21 = embed(&s.sigma_bullet_21(&(&u1 + &u2))?, &[0, 1], &dims)?;
    let mut lhs = s2.clone();
    lhs.push(b21);
    lhs.extend(s1.iter().cloned());
    lhs.push(r.clone());
    let mut rhs = vec![r];
    rhs.extend(s1);
    rhs.push(b);
    rhs.extend(s2);
    verdict("embedding/n=1", Some(s.label()), &lhs, &rhs, mode)
}

/// Symbolic for small spaces, multipoint otherwise.
pub fn default_mode(dim: usize) -> VerifyMode {
    if dim <= 27 {
        VerifyMode::Symbolic
    } else {
        VerifyMode::Multipoint
    }
}

type Job = Box<dyn Fn() -> Result<IdentityVerdict, RkError> + Send + Sync>;

fn expect(v: Result<IdentityVerdict, RkError>, e: Option<bool>) -> Result<IdentityVerdict, RkError> {
    v.map(|mut v| {
        v.expected = e;
        v
    })
}

/// The identity battery for one `ell`: YBE, unitarity, reflection for every
/// scenario (plus the wrong flag placement, expected to fail), RTT and the
/// S-matrix at `n ≤ 1`, and the embedding at `ell = 2`. The symplectic RTT
/// relations with the twisted factor are reported without expectation.
pub fn run_suite(ell: usize, mode: Option<VerifyMode>) -> Vec<Result<IdentityVerdict, RkError>> {
    let m = move |dim: usize| mode.unwrap_or_else(|| default_mode(dim));
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(move || check_ybe(ell, &|x: &RatFunc| yang_r(ell, x), m(ell.pow(3)))));
    jobs.push(Box::new(move || check_r_unitarity(ell, &|x: &RatFunc| yang_r(ell, x), m(ell * ell))));
    jobs.push(Box::new(move || {
        let mut v = check_r_unitarity(ell, &|x: &RatFunc| r_bullet_sigma(ell, x), m(ell * ell))?;
        v.identity = format!("r-bullet-sigma-unitarity/l={ell}");
        Ok(v)
    }));
    for kind in KMatrixKind::ALL {
        jobs.push(Box::new(move || {
            let mut v = check_k_unitarity(ell, &|x: &RatFunc| k_matrix(kind, ell, x), m(ell))?;
            v.scenario = Some(Scenario::new(kind, ell).label());
            Ok(v)
        }));
        let sp_unsupported = kind == KMatrixKind::SpInstanton && ell != 2;
        jobs.push(Box::new(move || {
            expect(check_reflection(&Scenario::new(kind, ell), m(ell * ell)), (!sp_unsupported).then_some(true))
        }));
        for n in 0..=1usize {
            jobs.push(Box::new(move || check_s_factorization(&Scenario::new(kind, ell), n, m(ell.pow(n as u32 + 1)))));
            jobs.push(Box::new(move || check_s_constant_term(&Scenario::new(kind, ell), n)));
            for variant in RttVariant::ALL {
                let twisted = variant != RttVariant::H5 && n > 0;
                let e = if kind == KMatrixKind::SpInstanton && twisted { None } else { Some(true) };
                jobs.push(Box::new(move || {
                    expect(check_rtt(&Scenario::new(kind, ell), n, variant, m(ell.pow(n as u32 + 2))), e)
                }));
            }
        }
    }
    jobs.push(Box::new(move || {
        let s = Scenario::new(KMatrixKind::FlagMinus, ell).with_placement(FlagPlacement::Diagonal);
        expect(check_reflection(&s, m(ell * ell)), Some(false))
    }));
    if ell == 2 {
        for kind in [KMatrixKind::FlagPlus, KMatrixKind::SoInstanton] {
            jobs.push(Box::new(move || check_embedding(&Scenario::new(kind, ell), m(8))));
        }
    }
    jobs.par_iter().map(|j| j()).collect()
}
