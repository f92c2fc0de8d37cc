//! Test-side oracles: the R- and K-matrices rebuilt as dense rational matrices
//! from their closed forms, and the identities checked at sample points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use tyangian::ratfield::{RatFunc, Var, NVARS};
use tyangian::relations::{check_reflection, Scenario};
use tyangian::rkmat::{flag_minus_k, k_matrix, r_bullet_sigma, yang_r, FlagPlacement, KMatrixKind};
use tyangian::ratfield::VerifyMode;

type Q = BigRational;
type M = Vec<Vec<Q>>;
type Builder = Box<dyn Fn(&Q, &Q) -> M>;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn zeros(n: usize) -> M {
    vec![vec![Q::zero(); n]; n]
}

fn eye(n: usize) -> M {
    let mut m = zeros(n);
    (0..n).for_each(|i| m[i][i] = Q::one());
    m
}

fn mul(a: &M, b: &M) -> M {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                c[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    c
}

fn kron(a: &M, b: &M) -> M {
    let (n, m) = (a.len(), b.len());
    let mut c = zeros(n * m);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    c[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    c
}

/// The swap on `C^ℓ ⊗ C^ℓ`.
fn swap(ell: usize) -> M {
    let mut p = zeros(ell * ell);
    for a in 0..ell {
        for b in 0..ell {
            p[a * ell + b][b * ell + a] = Q::one();
        }
    }
    p
}

/// `(x·Id + ℏ·P)/(x + ℏ)`.
fn yang(ell: usize, x: &Q, h: &Q) -> M {
    let d = x + h;
    let p = swap(ell);
    let n = ell * ell;
    let mut r = zeros(n);
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { x.clone() } else { Q::zero() };
            r[i][j] = (id + h * &p[i][j]) / &d;
        }
    }
    r
}

/// `Id − ℏ/(x + ℓℏ/2) · Σ e_ij ⊗ e_ij`.
fn q_form(ell: usize, x: &Q, h: &Q) -> M {
    let c = h / (x + q(ell as i64, 2) * h);
    let mut r = eye(ell * ell);
    for i in 0..ell {
        for j in 0..ell {
            r[i * ell + i][j * ell + j] -= &c;
        }
    }
    r
}

/// `Id − ℏ/(2u + ℓℏ/2) · J`.
fn k_sp(ell: usize, u: &Q, h: &Q) -> M {
    let c = h / (q(2, 1) * u + q(ell as i64, 2) * h);
    let mut k = eye(ell);
    k.iter_mut().flatten().for_each(|x| *x -= &c);
    k
}

fn anti(ell: usize) -> M {
    let mut k = zeros(ell);
    (0..ell).for_each(|i| k[i][ell - 1 - i] = Q::one());
    k
}

/// The two-entry K-matrix: `2u/(2u+ℏ)` on one diagonal, `ℏ/(2u+ℏ)` on the other, 1 where they meet.
fn k_two(ell: usize, u: &Q, h: &Q, u_on_anti: bool) -> M {
    let d = q(2, 1) * u + h;
    let a = q(2, 1) * u / &d;
    let b = h / &d;
    let (on_anti, on_diag) = if u_on_anti { (a, b) } else { (b, a) };
    let mut k = zeros(ell);
    for (i, row) in k.iter_mut().enumerate() {
        let j = ell - 1 - i;
        if i == j {
            row[i] = Q::one();
        } else {
            row[j] = on_anti.clone();
            row[i] = on_diag.clone();
        }
    }
    k
}

fn point(u1: Q, u2: Q, h: Q) -> [Q; NVARS] {
    let mut p: [Q; NVARS] = std::array::from_fn(|_| Q::zero());
    p[Var::H.index()] = h;
    p[Var::U1.index()] = u1;
    p[Var::U2.index()] = u2;
    p
}

fn eval(m: &tyangian::ratfield::LabeledMatrix, pt: &[Q; NVARS]) -> M {
    m.to_dense().iter().map(|r| r.iter().map(|x| x.eval(pt).expect("regular point")).collect()).collect()
}

const SAMPLES: [(i64, i64, i64, i64); 4] = [(3, 1, 7, 1), (-5, 2, 1, 3), (11, 1, -2, 1), (2, 7, 5, 4)];

fn samples() -> impl Iterator<Item = (Q, Q, Q)> {
    SAMPLES.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d), q(7, 3) + q(a.abs(), 11)))
}

fn sym(v: Var) -> RatFunc {
    RatFunc::var(v)
}

#[test]
fn closed_forms_match_library() {
    let x = &sym(Var::U1) + &sym(Var::U2);
    for ell in 2..=4 {
        for (u1, u2, h) in samples() {
            let pt = point(u1.clone(), u2.clone(), h.clone());
            let s = &u1 + &u2;
            assert_eq!(eval(&yang_r(ell, &x).unwrap(), &pt), yang(ell, &s, &h));
            assert_eq!(eval(&r_bullet_sigma(ell, &x).unwrap(), &pt), q_form(ell, &s, &h));
            let u = sym(Var::U1);
            assert_eq!(eval(&k_matrix(KMatrixKind::SpInstanton, ell, &u).unwrap(), &pt), k_sp(ell, &u1, &h));
            assert_eq!(eval(&k_matrix(KMatrixKind::FlagPlus, ell, &u).unwrap(), &pt), anti(ell));
            assert_eq!(eval(&k_matrix(KMatrixKind::SoInstanton, ell, &u).unwrap(), &pt), eye(ell));
            for (placement, on_anti) in [(FlagPlacement::AntiDiagonal, true), (FlagPlacement::Diagonal, false)] {
                assert_eq!(eval(&flag_minus_k(ell, &u, placement).unwrap(), &pt), k_two(ell, &u1, &h, on_anti));
            }
        }
    }
}

#[test]
fn yang_baxter_at_points() {
    for ell in 2..=3 {
        let id = eye(ell);
        let p23 = kron(&id, &swap(ell));
        let lift = |r: &M, pos: u8| -> M {
            match pos {
                12 => kron(r, &id),
                23 => kron(&id, r),
                // R13 = P23 R12 P23
                _ => mul(&mul(&p23, &kron(r, &id)), &p23),
            }
        };
        for (a, b, h) in samples() {
            let c = q(-4, 3);
            let r12 = lift(&yang(ell, &(&a - &b), &h), 12);
            let r13 = lift(&yang(ell, &(&a - &c), &h), 13);
            let r23 = lift(&yang(ell, &(&b - &c), &h), 23);
            assert_eq!(mul(&mul(&r12, &r13), &r23), mul(&mul(&r23, &r13), &r12), "ℓ={ell}");
        }
    }
}

/// `K2 · P B(u1+u2) P · K1 · R(u1−u2)` against `R(u1−u2) · K1 · B(u1+u2) · K2`.
fn reflection_holds(ell: usize, b: &dyn Fn(&Q, &Q) -> M, k: &dyn Fn(&Q, &Q) -> M) -> bool {
    samples().all(|(u1, u2, h)| {
        let id = eye(ell);
        let p = swap(ell);
        let k1 = kron(&k(&u1, &h), &id);
        let k2 = kron(&id, &k(&u2, &h));
        let bb = b(&(&u1 + &u2), &h);
        let b21 = mul(&mul(&p, &bb), &p);
        let r = yang(ell, &(&u1 - &u2), &h);
        let lhs = mul(&mul(&mul(&k2, &b21), &k1), &r);
        let rhs = mul(&mul(&mul(&r, &k1), &bb), &k2);
        lhs == rhs
    })
}

#[test]
fn reflection_at_points_agrees_with_symbolic() {
    let cases: Vec<(KMatrixKind, usize)> = vec![
        (KMatrixKind::FlagPlus, 2),
        (KMatrixKind::FlagPlus, 3),
        (KMatrixKind::FlagPlus, 4),
        (KMatrixKind::FlagMinus, 2),
        (KMatrixKind::FlagMinus, 3),
        (KMatrixKind::FlagMinus, 4),
        (KMatrixKind::SoInstanton, 2),
        (KMatrixKind::SoInstanton, 3),
        (KMatrixKind::SpInstanton, 2),
    ];
    for (kind, ell) in cases {
        let b: Builder = match kind {
            KMatrixKind::SoInstanton => Box::new(move |x, h| q_form(ell, x, h)),
            KMatrixKind::SpInstanton => Box::new(move |x, h| yang(ell, &-x.clone(), h)),
            _ => Box::new(move |x, h| yang(ell, x, h)),
        };
        let k: Builder = match kind {
            KMatrixKind::SoInstanton => Box::new(move |_, _| eye(ell)),
            KMatrixKind::SpInstanton => Box::new(move |u, h| k_sp(ell, u, h)),
            KMatrixKind::FlagPlus => Box::new(move |_, _| anti(ell)),
            KMatrixKind::FlagMinus => Box::new(move |u, h| k_two(ell, u, h, true)),
        };
        assert!(reflection_holds(ell, &*b, &*k), "{kind} ℓ={ell} fails at sample points");
        let symbolic = check_reflection(&Scenario::new(kind, ell), VerifyMode::Symbolic).unwrap();
        assert!(symbolic.holds(), "{kind} ℓ={ell}");
    }
    for ell in 2..=4 {
        let b = move |x: &Q, h: &Q| yang(ell, x, h);
        let k = move |u: &Q, h: &Q| k_two(ell, u, h, false);
        assert!(!reflection_holds(ell, &b, &k), "diagonal placement ℓ={ell} should fail");
    }
    // the Q-form with the Sp K-matrix is not a solution
    let b = |x: &Q, h: &Q| q_form(2, x, h);
    let k = |u: &Q, h: &Q| k_sp(2, u, h);
    assert!(!reflection_holds(2, &b, &k));
}

#[test]
fn k_unitarity_at_points() {
    for ell in 2..=5 {
        for (u, _, h) in samples() {
            let mu = -u.clone();
            assert_eq!(mul(&k_sp(ell, &mu, &h), &k_sp(ell, &u, &h)), eye(ell));
            assert_eq!(mul(&k_two(ell, &mu, &h, true), &k_two(ell, &u, &h, true)), eye(ell));
            assert_eq!(mul(&anti(ell), &anti(ell)), eye(ell));
        }
    }
}

mod polarization_brute_force {
    use std::collections::BTreeMap;

    use tyangian::dynkin::TypeSign;
    use tyangian::polarization::{build_instance, check_choice, solve, Choice, Label, Point, SiteChoice};

    /// `u_b − u_a` in the basis (u1, u2), with `u_{-k} = −u_k`.
    fn weight(l: Label) -> (i64, i64) {
        let u = |k: i8| -> (i64, i64) {
            let s = i64::from(k.signum());
            if k.abs() == 1 { (s, 0) } else { (0, s) }
        };
        let (a, b) = (u(l.a), u(l.b));
        (b.0 - a.0, b.1 - a.1)
    }

    fn components(sign: TypeSign, ell: u8) -> Vec<((i64, i64), Vec<Point>)> {
        let r = 1..=ell;
        let mut out = Vec::new();
        for s in r.clone() {
            for t in r.clone().filter(|&t| t > s) {
                out.push(((1, 1), vec![Point(s, t), Point(t, s)]));
            }
        }
        out.push(((1, -1), r.clone().map(|s| Point(s, s)).collect()));
        if sign == TypeSign::Minus {
            for k in r.clone() {
                out.push(((0, 1), r.clone().map(|s| Point(s, k)).collect()));
                out.push(((1, 0), r.clone().map(|t| Point(k, t)).collect()));
            }
        }
        out
    }

    fn consistent(sign: TypeSign, ell: u8, c: &Choice) -> bool {
        let at: BTreeMap<Point, &Vec<Label>> = c.sites.iter().map(|s| (s.point, &s.labels)).collect();
        components(sign, ell).iter().all(|(dir, pts)| {
            let multiset = |p: &Point| {
                let mut v: Vec<i64> = at[p].iter().map(|&l| {
                    let w = weight(l);
                    w.0 * dir.0 + w.1 * dir.1
                }).collect();
                v.sort();
                v
            };
            pts.windows(2).all(|w| multiset(&w[0]) == multiset(&w[1]))
        })
    }

    #[test]
    fn exhaustive_agreement() {
        for (sign, ell) in [(TypeSign::Minus, 2), (TypeSign::Plus, 2), (TypeSign::Plus, 3)] {
            let inst = build_instance(sign, ell).unwrap();
            let nbits: usize = inst.sites.iter().map(|s| s.pairs.len()).sum();
            let mut sat = 0u32;
            for mask in 0u32..(1 << nbits) {
                let mut k = 0;
                let sites = inst
                    .sites
                    .iter()
                    .map(|s| SiteChoice {
                        point: s.point,
                        labels: s
                            .pairs
                            .iter()
                            .map(|d| {
                                k += 1;
                                if mask >> (k - 1) & 1 == 1 { d.first } else { d.second }
                            })
                            .collect(),
                    })
                    .collect();
                let c = Choice { sites };
                let ours = consistent(sign, ell, &c);
                assert_eq!(check_choice(&inst, &c).unwrap().ok, ours, "{sign:?} ℓ={ell} mask {mask:#x}");
                sat += u32::from(ours);
            }
            assert!(sat > 0);
            assert!(solve(&inst).outcome.is_sat());
        }
    }
}
