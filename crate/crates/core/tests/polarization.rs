use proptest::prelude::*;
use tyangian::dynkin::TypeSign;
use tyangian::polarization::*;
use tyangian::polarization::Strategy as Search;
use proptest::strategy::Strategy;

fn sp(ell: u8) -> PolarizationInstance {
    build_instance(TypeSign::Minus, ell).unwrap()
}

fn so(ell: u8) -> PolarizationInstance {
    build_instance(TypeSign::Plus, ell).unwrap()
}

fn l(s: &str) -> Label {
    s.parse().unwrap()
}

#[test]
fn dichotomy_both_strategies() {
    for ell in 2..=6u8 {
        for sign in [TypeSign::Plus, TypeSign::Minus] {
            let inst = build_instance(sign, ell).unwrap();
            let expect_sat = sign == TypeSign::Plus || ell == 2;
            let strategies: &[Search] =
                if ell <= 4 { &[Search::Exhaustive, Search::Propagation] } else { &[Search::Propagation] };
            for &st in strategies {
                let r = solve_with(&inst, st);
                assert_eq!(r.outcome.is_sat(), expect_sat, "{sign:?} ℓ={ell} {st:?}");
                match &r.outcome {
                    Outcome::Sat { witness } => assert!(check_choice(&inst, witness).unwrap().ok),
                    Outcome::Unsat { certificate } => {
                        assert!(matches!(certificate, Certificate::OddCycle { .. }));
                        verify_certificate(&inst, certificate).unwrap();
                    }
                }
            }
        }
    }
}

// The pattern at ℓ = 2: on the component t of {u1=0} pick C(1,2)⊕C(-1,2) or its
// opposite, alternating with t, which also makes {u2=0} uniform.
#[test]
fn explicit_witness_at_two() {
    let inst = sp(2);
    let pick = |p: Point| match (p.0, p.1) {
        (1, 1) => l("C(-1,2)"),
        (1, 2) => l("C(2,1)"),
        (2, 1) => l("C(1,2)"),
        _ => l("C(2,-1)"),
    };
    let c = Choice::from_fn(&inst, |p, d| if d.contains(l("C(1,2)")) || d.contains(l("C(1,-2)")) { pick(p) } else { d.first });
    let rep = check_choice(&inst, &c).unwrap();
    assert!(rep.ok, "{:?}", rep.violations);
}

// Selecting C(-2,1) on the whole diagonal and C(1,2) off it is uniform on each
// {u1=0} component but not on the {u2=0} components.
#[test]
fn uniform_diagonal_choice_breaks_u2_wall() {
    let inst = sp(2);
    let c = Choice::from_fn(&inst, |_, d| {
        if d.contains(l("C(1,-2)")) {
            l("C(-2,1)")
        } else if d.contains(l("C(1,2)")) {
            l("C(1,2)")
        } else {
            d.first
        }
    });
    let rep = check_choice(&inst, &c).unwrap();
    assert!(!rep.ok);
    assert!(rep.violations.iter().all(|v| v.wall == "u2=0"));
    assert_eq!(rep.violations.len(), 2);
}

// The attempted choice at ℓ = 3: C(2,-1) at (1,1), C(2,1) at (s,1) for s ≠ 1,
// then propagated along {u2=0} as far as it goes.
#[test]
fn attempted_choice_at_three_fails() {
    let inst = sp(3);
    let third = |p: Point| match (p.0, p.1) {
        (1, 1) => l("C(2,-1)"),
        (1, _) => l("C(1,2)"),
        (s, t) if s == t => l("C(-1,2)"),
        _ => l("C(2,1)"),
    };
    let c = Choice::from_fn(&inst, |p, d| if d.contains(l("C(1,2)")) || d.contains(l("C(1,-2)")) { third(p) } else { d.first });
    let rep = check_choice(&inst, &c).unwrap();
    assert!(!rep.ok);
    // the t = 1 component of {u1=0} is uniform, a t ≠ 1 component is not
    assert!(rep.violations.iter().any(|v| v.wall == "u1=0" && v.points.iter().all(|p| p.1 != 1)));
    assert!(!rep.violations.iter().any(|v| v.wall == "u1=0" && v.points.iter().all(|p| p.1 == 1)));
}

#[test]
fn obstruction_ignores_the_k_minus_k_pairs() {
    let inst = sp(3);
    for fix in 0..4u8 {
        let mut any = false;
        for mask in 0u32..(1 << 9) {
            let c = Choice::from_fn(&inst, |p, d| {
                if d.contains(l("C(1,-1)")) {
                    if fix & 1 == 1 { d.first } else { d.second }
                } else if d.contains(l("C(2,-2)")) {
                    if fix & 2 == 2 { d.first } else { d.second }
                } else {
                    let i = inst.site_index(p).unwrap();
                    if mask >> i & 1 == 1 { d.first } else { d.second }
                }
            });
            any |= check_choice(&inst, &c).unwrap().ok;
        }
        assert!(!any, "fixing {fix} admits a consistent choice");
    }
}

#[test]
fn certificate_names_only_the_mixed_pairs() {
    for ell in 3..=6 {
        let inst = sp(ell);
        let Outcome::Unsat { certificate: Certificate::OddCycle { steps } } = solve(&inst).outcome else {
            panic!("ℓ={ell} should be UNSAT");
        };
        assert!(steps.iter().all(|s| s.wall == "u1=0" || s.wall == "u2=0"));
        let mixed = [l("C(1,2)"), l("C(2,1)"), l("C(1,-2)"), l("C(-2,1)")];
        assert!(steps.iter().all(|s| mixed.contains(&s.from.label) && mixed.contains(&s.to.label)));
    }
}

#[test]
fn solve_report_json_shape() {
    let r = solve(&sp(3));
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["verdict"], "UNSAT");
    assert_eq!(v["sign"], "-");
    assert!(v["certificate"]["steps"].is_array());
    let r = solve(&so(2));
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["verdict"], "SAT");
    assert_eq!(v["witness"]["sites"].as_array().unwrap().len(), 4);
}

fn choice_from_bits(inst: &PolarizationInstance, bits: &[bool]) -> Choice {
    let mut k = 0;
    let mut sites = Vec::new();
    for s in &inst.sites {
        let labels = s
            .pairs
            .iter()
            .map(|d| {
                k += 1;
                if bits[(k - 1) % bits.len()] { d.first } else { d.second }
            })
            .collect();
        sites.push(SiteChoice { point: s.point, labels });
    }
    Choice { sites }
}

fn sign_strategy() -> impl Strategy<Value = TypeSign> {
    prop_oneof![Just(TypeSign::Plus), Just(TypeSign::Minus)]
}

proptest! {
    #[test]
    fn swap_preserves_consistency(sign in sign_strategy(), ell in 2u8..=4, bits in prop::collection::vec(any::<bool>(), 48)) {
        let inst = build_instance(sign, ell).unwrap();
        let c = choice_from_bits(&inst, &bits);
        let swapped = c.swap_coordinates(&inst).unwrap();
        prop_assert_eq!(check_choice(&inst, &c).unwrap().ok, check_choice(&inst, &swapped).unwrap().ok);
        prop_assert_eq!(swapped.swap_coordinates(&inst).unwrap(), c);
    }

    #[test]
    fn entry_relabeling_preserves_consistency(
        sign in sign_strategy(),
        perm in Just((1u8..=4).collect::<Vec<_>>()).prop_shuffle(),
        bits in prop::collection::vec(any::<bool>(), 48),
    ) {
        let inst = build_instance(sign, 4).unwrap();
        let c = choice_from_bits(&inst, &bits);
        let moved = c.relabel_entries(&inst, &perm).unwrap();
        prop_assert_eq!(check_choice(&inst, &c).unwrap().ok, check_choice(&inst, &moved).unwrap().ok);
    }

    #[test]
    fn witnesses_transport(sign in sign_strategy(), ell in 2u8..=6, seed in any::<u64>()) {
        let inst = build_instance(sign, ell).unwrap();
        let mut perm: Vec<u8> = (1..=ell).collect();
        let n = perm.len();
        for i in (1..n).rev() {
            perm.swap(i, (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize);
        }
        if let Outcome::Sat { witness } = solve(&inst).outcome {
            prop_assert!(check_choice(&inst, &witness.swap_coordinates(&inst).unwrap()).unwrap().ok);
            prop_assert!(check_choice(&inst, &witness.relabel_entries(&inst, &perm).unwrap()).unwrap().ok);
        } else {
            prop_assert!(sign == TypeSign::Minus && ell >= 3);
        }
    }
}
