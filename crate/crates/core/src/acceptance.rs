//! The acceptance battery: eleven exact checks over the library, each reporting
//! pass/fail with a one-line detail.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::dynkin::{cartan_matrix, certify_word, longest_word, longest_word_with, DynkinType, TypeSign};
use crate::kclass::{composite_along, longest_reflection_transform};
use crate::polarization::{build_instance, check_choice, solve_with, verify_certificate, Outcome, Strategy};
use crate::ratfield::{RatFunc, VerifyMode};
use crate::relations::{
    check_embedding, check_k_unitarity, check_r_unitarity, check_reflection, check_rtt, check_s_constant_term,
    check_s_factorization, check_ybe, IdentityVerdict, RttVariant, Scenario,
};
use crate::rkmat::{k_matrix, r_bullet_sigma, yang_r, FlagPlacement, KMatrixKind, RkError};
use crate::tableaux::{
    condition_28, enumerate_flag_tableaux, enumerate_instanton_tableaux, expected_dimension,
    poincare_polynomial, so_component_report, tangent_dimension, InstantonKind, Tableau,
};

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "fixed-point counts"),
    (2, "charge example"),
    (3, "tangent dimensions"),
    (4, "connectivity and Betti numbers"),
    (5, "K-class composite"),
    (6, "R-matrix identities"),
    (7, "reflection equation"),
    (8, "RTT relations and embedding"),
    (9, "S-matrix"),
    (10, "polarization dichotomy"),
    (11, "flag fixed points"),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub wall_ms: u128,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {} ({} ms): {}", self.id, self.title, self.wall_ms, self.detail)
    }
}

/// Collects failures; `Ok(summary)` when there are none.
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally { checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn verdict(&mut self, v: Result<IdentityVerdict, RkError>, want: bool) {
        match v {
            Ok(v) => {
                let ok = v.holds() == want;
                let label = format!("{} {}", v.identity, v.scenario.unwrap_or_default());
                self.check(ok, || format!("{label}: holds={} ({})", v.verdict.holds, v.verdict.detail));
            }
            Err(e) => self.check(false, || e.to_string()),
        }
    }

    fn finish(self, summary: impl FnOnce(usize) -> String) -> Result<String, String> {
        if self.failures.is_empty() {
            Ok(summary(self.checks))
        } else {
            Err(format!("{} of {} checks failed; first: {}", self.failures.len(), self.checks, self.failures[0]))
        }
    }
}

fn c1() -> Result<String, String> {
    let mut t = Tally::new();
    for ell in 2..=6u8 {
        for w1 in 0..=4usize {
            let n = enumerate_instanton_tableaux(ell, w1).len();
            t.check(n == (ell as usize).pow(w1 as u32), || format!("ℓ={ell} w1={w1}: {n}"));
        }
    }
    t.finish(|n| format!("{n} (ℓ, w1) counts equal ℓ^w1"))
}

/// The ℓ = 5 tableau with rows −2: 2 3 4 5, −1: 1 2 4 5, 1: 3, 2: 1.
pub fn displayed_tableau() -> Tableau {
    let mut rows = std::collections::BTreeMap::new();
    rows.insert(-2, vec![2, 3, 4, 5]);
    rows.insert(-1, vec![1, 2, 4, 5]);
    rows.insert(1, vec![3]);
    rows.insert(2, vec![1]);
    Tableau::new(5, rows)
}

fn c2() -> Result<String, String> {
    let tab = displayed_tableau();
    let holding: Vec<i32> = tab.rows.keys().copied().filter(|&l| condition_28(&tab, 1, l, 1)).collect();
    if holding == [-1] {
        Ok("T(1,1) = 3 satisfies the condition for l = -1 only".into())
    } else {
        Err(format!("condition holds for l in {holding:?}"))
    }
}

fn c3() -> Result<String, String> {
    let mut t = Tally::new();
    for ell in 2..=5u8 {
        for w1 in 0..=3usize {
            for tab in enumerate_instanton_tableaux(ell, w1) {
                for kind in [InstantonKind::Sp, InstantonKind::So] {
                    let d = tangent_dimension(&tab, kind);
                    t.check(d == expected_dimension(kind, w1), || format!("{kind:?} {tab}: {d}"));
                }
            }
        }
    }
    t.finish(|n| format!("{n} tangent dimensions equal w1(w1+1) / w1(w1-1)"))
}

fn c4() -> Result<String, String> {
    let mut t = Tally::new();
    for ell in 2..=5u8 {
        for w1 in 0..=3usize {
            match poincare_polynomial(InstantonKind::Sp, ell, w1) {
                Ok(p) => {
                    t.check(p.constant_term() == 1, || format!("Sp ℓ={ell} w1={w1}: constant term of {p}"));
                    if w1 == 1 {
                        let l1 = ell as u64 - 1;
                        let ok = p.coefficient(2) == l1 && p.total() == l1 + 1;
                        t.check(ok, || format!("Sp ℓ={ell} w1=1: {p}"));
                    }
                }
                Err(e) => t.check(false, || e.to_string()),
            }
        }
        match so_component_report(ell, 2) {
            Ok(r) => {
                let want = 1 + (ell as usize) * (ell as usize - 1) / 2;
                t.check(r.zero_charge_count == want, || format!("SO ℓ={ell} w1=2: {} zero-charge points", r.zero_charge_count));
            }
            Err(e) => t.check(false, || e.to_string()),
        }
    }
    for w1 in 1..=5usize {
        match so_component_report(2, w1) {
            Ok(r) => {
                let half = 1usize << (w1 - 1);
                t.check(r.components == Some(vec![half, half]), || format!("SO ℓ=2 w1={w1}: {:?}", r.components));
            }
            Err(e) => t.check(false, || e.to_string()),
        }
    }
    t.finish(|n| format!("{n} Poincaré and component checks"))
}

pub fn kclass_types() -> Vec<DynkinType> {
    let mut v: Vec<DynkinType> = (1..=5).map(DynkinType::a).collect();
    v.extend([DynkinType::d(4), DynkinType::d(5), DynkinType::e6()]);
    v
}

fn c5() -> Result<String, String> {
    let mut t = Tally::new();
    let mut distinct = 0;
    for ty in kclass_types() {
        let first = longest_reflection_transform(ty);
        t.check(first.is_ok(), || format!("{ty}: {}", first.as_ref().unwrap_err()));
        let w2 = longest_word_with(ty, true);
        let n = cartan_matrix(ty).positive_root_count;
        t.check(certify_word(ty, &w2) == (n, true), || format!("{ty}: second word is not reduced"));
        if w2 != longest_word(ty) {
            distinct += 1;
        }
        let second = composite_along(ty, &w2);
        t.check(second.is_ok(), || format!("{ty} second word: {}", second.as_ref().unwrap_err()));
        if let (Ok(a), Ok(b)) = (first, second) {
            t.check(a == b, || format!("{ty}: words disagree"));
        }
    }
    t.finish(|n| format!("{n} checks; U_i -> -q^c U_invast(i) on 8 types, {distinct} with two distinct words"))
}

fn c6() -> Result<String, String> {
    let mut t = Tally::new();
    for (ell, mode) in [(2, VerifyMode::Symbolic), (3, VerifyMode::Symbolic), (4, VerifyMode::Multipoint), (5, VerifyMode::Multipoint)] {
        t.verdict(check_ybe(ell, &|x: &RatFunc| yang_r(ell, x), mode), true);
    }
    for ell in 2..=4 {
        t.verdict(check_r_unitarity(ell, &|x: &RatFunc| yang_r(ell, x), VerifyMode::Symbolic), true);
        t.verdict(check_r_unitarity(ell, &|x: &RatFunc| r_bullet_sigma(ell, x), VerifyMode::Symbolic), true);
    }
    for ell in 2..=5 {
        for kind in KMatrixKind::ALL {
            t.verdict(check_k_unitarity(ell, &|x: &RatFunc| k_matrix(kind, ell, x), VerifyMode::Symbolic), true);
        }
    }
    t.finish(|n| format!("{n} identities (YBE ℓ=2..5, R-unitarity ℓ≤4, K-unitarity ℓ≤5)"))
}

fn c7() -> Result<String, String> {
    let mut t = Tally::new();
    let cases: [(KMatrixKind, &[usize]); 4] = [
        (KMatrixKind::FlagPlus, &[2, 3, 4, 5]),
        (KMatrixKind::FlagMinus, &[2, 3, 4]),
        (KMatrixKind::SoInstanton, &[2, 3]),
        (KMatrixKind::SpInstanton, &[2]),
    ];
    for (kind, ells) in cases {
        for &ell in ells {
            t.verdict(check_reflection(&Scenario::new(kind, ell), VerifyMode::Symbolic), true);
        }
    }
    for ell in 2..=4 {
        let wrong = Scenario::new(KMatrixKind::FlagMinus, ell).with_placement(FlagPlacement::Diagonal);
        t.verdict(check_reflection(&wrong, VerifyMode::Symbolic), false);
    }
    t.finish(|n| format!("{n} reflection checks including 3 failing opposite placements"))
}

/// Scenarios whose twisted RTT relations are asserted.
pub const RTT_KINDS: [KMatrixKind; 3] = [KMatrixKind::FlagPlus, KMatrixKind::FlagMinus, KMatrixKind::SoInstanton];

fn c8() -> Result<String, String> {
    let mut t = Tally::new();
    for kind in KMatrixKind::ALL {
        for n in 0..=2 {
            for variant in RttVariant::ALL {
                let twisted_sp = kind == KMatrixKind::SpInstanton && variant != RttVariant::H5 && n > 0;
                if !twisted_sp {
                    t.verdict(check_rtt(&Scenario::new(kind, 2), n, variant, VerifyMode::Symbolic), true);
                }
            }
        }
    }
    for kind in [KMatrixKind::FlagPlus, KMatrixKind::SoInstanton] {
        t.verdict(check_embedding(&Scenario::new(kind, 2), VerifyMode::Symbolic), true);
    }
    t.finish(|n| format!("{n} checks at ℓ=2, n≤2 (Sp twisted relations at n>0 excluded)"))
}

fn c9() -> Result<String, String> {
    let mut t = Tally::new();
    for kind in KMatrixKind::ALL {
        for ell in 2..=3 {
            for n in 0..=1 {
                let s = Scenario::new(kind, ell);
                t.verdict(check_s_constant_term(&s, n), true);
                t.verdict(check_s_factorization(&s, n, VerifyMode::Symbolic), true);
            }
        }
    }
    t.finish(|n| format!("{n} S-matrix checks at ℓ≤3, n≤1"))
}

fn c10() -> Result<String, String> {
    let mut t = Tally::new();
    for ell in 2..=6u8 {
        for sign in [TypeSign::Plus, TypeSign::Minus] {
            let inst = match build_instance(sign, ell) {
                Ok(i) => i,
                Err(e) => {
                    t.check(false, || e.to_string());
                    continue;
                }
            };
            let want_sat = sign == TypeSign::Plus || ell == 2;
            let strategy = if ell <= 4 { Strategy::Exhaustive } else { Strategy::Propagation };
            let r = solve_with(&inst, strategy);
            t.check(r.outcome.is_sat() == want_sat, || format!("{sign:?} ℓ={ell}: {}", r.outcome.verdict()));
            let checked = match &r.outcome {
                Outcome::Sat { witness } => check_choice(&inst, witness).map(|c| c.ok).unwrap_or(false),
                Outcome::Unsat { certificate } => verify_certificate(&inst, certificate).is_ok(),
            };
            t.check(checked, || format!("{sign:?} ℓ={ell}: witness or certificate rejected"));
        }
    }
    t.finish(|n| format!("{n} checks; (+) SAT ℓ=2..6, (-) SAT ℓ=2, UNSAT ℓ=3..6"))
}

/// The two-point dimension vectors at `w = 2`: `2` on `1..i-1`, `1` on `i..ℓ-i`, `0` after.
pub fn two_point_vector(ell: usize, i: usize) -> Vec<i64> {
    (1..ell).map(|k| if k < i { 2 } else if k <= ell - i { 1 } else { 0 }).collect()
}

fn c11() -> Result<String, String> {
    let mut t = Tally::new();
    for ell in 2..=7u8 {
        let l = ell as usize;
        let e = enumerate_flag_tableaux(ell, None, 1, TypeSign::Plus);
        let want = if l % 2 == 1 { 1 } else { 0 };
        t.check(e.tableaux.len() == want, || format!("w=1 ℓ={ell}: {}", e.tableaux.len()));
        if l % 2 == 1 {
            let v: Vec<i64> = (1..l).map(|k| if k <= (l - 1) / 2 { 1 } else { 0 }).collect();
            let e = enumerate_flag_tableaux(ell, Some(&v), 1, TypeSign::Plus);
            t.check(e.tableaux.len() == 1, || format!("w=1 ℓ={ell} v={v:?}: {}", e.tableaux.len()));
        }
        for i in 1..=l / 2 {
            let v = two_point_vector(l, i);
            for sign in [TypeSign::Plus, TypeSign::Minus] {
                let e = enumerate_flag_tableaux(ell, Some(&v), 2, sign);
                t.check(e.tableaux.len() == 2, || format!("w=2 {sign:?} ℓ={ell} v={v:?}: {}", e.tableaux.len()));
            }
        }
        let e = enumerate_flag_tableaux(ell, None, 4, TypeSign::Plus);
        t.check(e.tableaux.len() == l * l, || format!("w=4 ℓ={ell}: {}", e.tableaux.len()));
        if l % 2 == 1 {
            let e = enumerate_flag_tableaux(ell, None, 5, TypeSign::Plus);
            t.check(e.tableaux.len() == l * l, || format!("w=5 ℓ={ell}: {}", e.tableaux.len()));
        }
    }
    t.finish(|n| format!("{n} counts for ℓ=2..7"))
}

pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    let f: fn() -> Result<String, String> = match id {
        1 => c1,
        2 => c2,
        3 => c3,
        4 => c4,
        5 => c5,
        6 => c6,
        7 => c7,
        8 => c8,
        9 => c9,
        10 => c10,
        11 => c11,
        _ => return None,
    };
    let title = CRITERIA[id as usize - 1].1.to_string();
    let start = Instant::now();
    let r = f();
    let wall_ms = start.elapsed().as_millis();
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CriterionResult { id, title, passed, detail, wall_ms })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|&(id, _)| run_criterion(id)).collect()
}

