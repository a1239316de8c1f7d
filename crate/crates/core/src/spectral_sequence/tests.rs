use proptest::prelude::*;

use super::*;
use crate::field::PrimeField;
use crate::graded_algebra::{hilbert_bigraded, GeneratorSpec};

fn fp(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn alg(p: u32, gens: Vec<GeneratorSpec>) -> AlgebraSpec {
    AlgebraSpec::new(fp(p), gens).unwrap()
}

/// E(lambda1, lambda2) ⊗ P(mu2) ⊗ [extra] ⊗ Γ([dv]) on page E^p.
fn dv_page(p: u32, extra: Vec<GeneratorSpec>) -> AlgebraSpec {
    let mut gens = vec![
        GeneratorSpec::exterior("lambda1", 2 * p - 1),
        GeneratorSpec::exterior("lambda2", 2 * p * p - 1),
        GeneratorSpec::polynomial("mu2", 2 * p * p),
    ];
    gens.extend(extra);
    gens.push(GeneratorSpec::divided("[dv]", 2 * p - 1).in_filtration(1));
    alg(p, gens)
}

fn dv_rules(a: &AlgebraSpec, p: u32, cap: u32) -> Vec<DifferentialRule> {
    let mut rules = Vec::new();
    let mut level = 1;
    while p.pow(level) * 2 * p <= cap + 1 {
        let target = a
            .elem(&format!("lambda2 [dv]^{}", p.pow(level) - p))
            .unwrap();
        rules.push(DifferentialRule::generator(p, "[dv]", level, target));
        level += 1;
    }
    rules
}

#[test]
fn empty_rules_leave_the_page_alone() {
    let a = dv_page(3, vec![]);
    let page = Page::from_algebra(a).with_index(3).with_cap(30);
    let next = run_differential(&page, &[]).unwrap();
    assert_eq!(next.dims(), page.dims());
    assert_eq!(next.index(), 4);
    let again = run_differential(&next.clone().with_index(3), &[]).unwrap();
    assert_eq!(again.dims(), next.dims());
}

#[test]
fn thhz_page_collapses_to_truncated_dv() {
    let p = 3;
    let cap = 54;
    let a = dv_page(p, vec![GeneratorSpec::exterior("[v]", 4).in_filtration(1)]);
    let page = Page::from_algebra(a.clone()).with_index(p).with_cap(cap);
    let e4 = run_differential(&page, &dv_rules(&a, p, cap)).unwrap();
    let stated = alg(
        p,
        vec![
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::polynomial("mu2", 18),
            GeneratorSpec::exterior("[v]", 4).in_filtration(1),
            GeneratorSpec::truncated("[dv]", 5, 3).in_filtration(1),
        ],
    );
    assert_eq!(e4.dims(), hilbert_bigraded(&stated, cap));
}

#[test]
fn rule_family_scalars() {
    let p = 3;
    let a = dv_page(p, vec![]);
    let page = Page::from_algebra(a.clone()).with_index(p).with_cap(60);
    let rules = dv_rules(&a, p, 60);
    let members: Vec<FamilyMember> = (0..10)
        .map(|k| FamilyMember {
            k,
            source: page.alg_key(&format!("[dv]^{k}")).unwrap(),
            expected: (k >= p).then(|| page.alg_key(&format!("lambda2 [dv]^{}", k - p)).unwrap()),
        })
        .collect();
    let rep = verify_rule_family(&page, &rules, &members).unwrap();
    let got: BTreeMap<u32, u32> = rep.scalars.into_iter().collect();
    assert_eq!(got[&4], 1);
    assert_eq!(got[&6], 1);
    assert_eq!(got[&1], 0);
    assert!(got.iter().all(|(&k, &c)| (k >= p) == (c != 0)));
}

#[test]
fn rule_family_violation_names_k() {
    let p = 3;
    let a = dv_page(p, vec![]);
    let page = Page::from_algebra(a.clone()).with_index(p).with_cap(30);
    // only the level-1 rule: gamma_9 is then a cycle
    let rules = vec![dv_rules(&a, p, 30).remove(0)];
    let members = vec![FamilyMember {
        k: 9,
        source: page.alg_key("[dv]^9").unwrap(),
        expected: Some(page.alg_key("lambda2 [dv]^6").unwrap()),
    }];
    match verify_rule_family(&page, &rules, &members) {
        Err(Error::FamilyViolation { k, value }) => {
            assert_eq!(k, 9);
            assert_eq!(value, "0");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_bidegree_is_rejected() {
    let p = 3;
    let a = dv_page(p, vec![]);
    let page = Page::from_algebra(a.clone()).with_index(2).with_cap(30);
    let rules = dv_rules(&a, p, 30);
    assert!(matches!(
        run_differential(&page, &rules),
        Err(Error::BidegreeViolation { .. })
    ));
    let page3 = page.with_index(3);
    let bad = DifferentialRule::generator(3, "[dv]", 1, a.elem("lambda1").unwrap());
    assert!(matches!(
        run_differential(&page3, &[bad]),
        Err(Error::BidegreeViolation { .. })
    ));
}

#[test]
fn relation_conflict_is_detected() {
    // P_2(u) with d(u) = e: d(u^2) would be 2 u e, not 0
    let a = alg(
        3,
        vec![
            GeneratorSpec::exterior("e", 1),
            GeneratorSpec::truncated("u", 0, 2).in_filtration(2),
        ],
    );
    let page = Page::from_algebra(a.clone()).with_cap(10);
    let rule = DifferentialRule::generator(2, "u", 0, a.elem("e").unwrap());
    assert!(matches!(
        run_differential(&page, &[rule]),
        Err(Error::LeibnizConflict(_))
    ));
}

#[test]
fn non_differential_is_rejected() {
    // block x -> y -> w with both arrows nonzero
    let a2 = alg(3, vec![GeneratorSpec::exterior("l", 1)]);
    let f = fp(3);
    let blocks = vec![
        Block {
            label: "x".into(),
            shift: (4, 0),
            extra: AlgebraSpec::ground(f),
        },
        Block {
            label: "y".into(),
            shift: (2, 1),
            extra: AlgebraSpec::ground(f),
        },
        Block {
            label: "w".into(),
            shift: (0, 2),
            extra: AlgebraSpec::ground(f),
        },
    ];
    let page = Page::new(a2.clone(), blocks).with_cap(6);
    let key = |b: usize| PageKey {
        block: b,
        alg: a2.one(),
        extra: Monomial::one(0),
    };
    let rules = vec![
        DifferentialRule::block(2, 0, Monomial::one(0), [(key(1), 1)].into_iter().collect()),
        DifferentialRule::block(2, 1, Monomial::one(0), [(key(2), 1)].into_iter().collect()),
    ];
    assert!(matches!(
        run_differential(&page, &rules),
        Err(Error::NotADifferential(_))
    ));
}

fn ell_einfty_setup(p: u32, cap: u32) -> (Page, AbutmentSpec, Vec<ExtensionRule>) {
    let a = dv_page(p, vec![GeneratorSpec::exterior("dlogv", 1)]);
    let page = Page::from_algebra(a.clone()).with_index(p).with_cap(cap);
    let einfty = run_differential(&page, &dv_rules(&a, p, cap)).unwrap();
    let target = alg(
        p,
        vec![
            GeneratorSpec::exterior("lambda1", 2 * p - 1),
            GeneratorSpec::exterior("dlogv", 1),
            GeneratorSpec::polynomial("kappa1", 2 * p),
        ],
    );
    let spec = AbutmentSpec::for_algebra(
        &einfty,
        target,
        &[
            ("[dv]", "kappa1"),
            ("mu2", &format!("kappa1^{p}")),
            ("lambda2", "0"),
        ],
        &[("lambda1", 0), ("dlogv", 0), ("kappa1", 1)],
    )
    .unwrap();
    let dv = einfty.alg_key("[dv]").unwrap();
    let ext = ExtensionRule {
        label: "[dv]^p = mu2".into(),
        factors: vec![dv; p as usize],
        detected_by: einfty.alg_key("mu2").unwrap(),
    };
    (einfty, spec, vec![ext])
}

#[test]
fn ell_abutment_matches() {
    let (einfty, spec, ext) = ell_einfty_setup(3, 60);
    let rep = compare_abutment(&einfty, &spec, &ext).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.possible_differentials, 0);
    rep.require_dims().unwrap();
}

#[test]
fn wrong_abutment_reports_first_degree() {
    let (einfty, mut spec, ext) = ell_einfty_setup(3, 30);
    spec.target = alg(
        3,
        vec![
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::exterior("dlogv", 3),
            GeneratorSpec::polynomial("kappa1", 6),
        ],
    );
    spec.algebra_images.insert("dlogv".into(), Element::zero());
    let rep = compare_abutment(&einfty, &spec, &ext).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.first_mismatch, Some(1));
    assert!(matches!(
        rep.require_dims(),
        Err(Error::DimMismatch {
            degree: 1,
            expected: 0,
            actual: 1
        })
    ));
}

#[test]
fn extension_degree_error() {
    let (einfty, spec, _) = ell_einfty_setup(3, 30);
    let bad = ExtensionRule {
        label: "[dv]^2 = mu2".into(),
        factors: vec![einfty.alg_key("[dv]").unwrap(); 2],
        detected_by: einfty.alg_key("mu2").unwrap(),
    };
    assert!(matches!(
        compare_abutment(&einfty, &spec, &[bad]),
        Err(Error::ExtensionDegreeError(_))
    ));
}

#[test]
fn identical_abutment_trivially_matches() {
    let a = alg(
        5,
        vec![
            GeneratorSpec::exterior("e", 3),
            GeneratorSpec::polynomial("x", 4),
        ],
    );
    let page = Page::from_algebra(a.clone()).with_cap(40);
    let spec = AbutmentSpec::for_algebra(&page, a, &[], &[("e", 0), ("x", 0)]).unwrap();
    let rep = compare_abutment(&page, &spec, &[]).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn block_page_keys_and_formatting() {
    let f = fp(3);
    let a = alg(3, vec![GeneratorSpec::exterior("l", 5)]);
    let g = alg(3, vec![GeneratorSpec::divided("[du]", 3).in_filtration(1)]);
    let page = Page::new(
        a,
        vec![
            Block {
                label: "1".into(),
                shift: (0, 0),
                extra: AlgebraSpec::ground(f),
            },
            Block {
                label: "a1".into(),
                shift: (0, 7),
                extra: g,
            },
        ],
    );
    let k = page.key("l", "a1", "[du]^2").unwrap();
    assert_eq!(page.key_bidegree(&k), (2, 18));
    assert_eq!(page.format_key(&k), "l g2[du] {a1}");
    assert_eq!(page.format_key(&page.alg_key("").unwrap()), "{1}");
    assert!(page.key("l", "nope", "").is_err());
}

/// E(lambda) ⊗ P(mu) ⊗ Γ([y]) with d^p(gamma_{p^i}) = lambda gamma_{p^i - p}.
fn family_page(p: u32, m: u32, mu: u32, cap: u32) -> (Page, Vec<DifferentialRule>) {
    let a = alg(
        p,
        vec![
            GeneratorSpec::exterior("lambda", p * m + p - 1),
            GeneratorSpec::polynomial("mu", 2 * mu),
            GeneratorSpec::divided("[y]", m).in_filtration(1),
        ],
    );
    let mut rules = Vec::new();
    let mut level = 1;
    while p.pow(level) * (m + 1) <= cap + 1 {
        let t = a.elem(&format!("lambda [y]^{}", p.pow(level) - p)).unwrap();
        rules.push(DifferentialRule::generator(p, "[y]", level, t));
        level += 1;
    }
    (Page::from_algebra(a).with_index(p).with_cap(cap), rules)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn page_invariants(p in prop_oneof![Just(3u32), Just(5u32)], half in 0u32..3, mu in 1u32..6, cap in 10u32..40) {
        let m = 2 * half + 1;
        let (page, rules) = family_page(p, m, mu, cap);
        let (next, ranks) = turn_page(&page, &rules).unwrap();
        let before = page.dims();
        let after = next.dims();
        for ((s, t), d) in after.entries() {
            prop_assert!(d <= before.get(s, t));
        }
        // each rank-one piece of d^r removes one class at its source and one at its target
        let r = page.index();
        let mut lost = BigradedDims::new(cap);
        for (&(s, t), &k) in &ranks {
            lost.add_at(s, t, k);
            lost.add_at(s - r, t + r - 1, k);
        }
        for ((s, t), d) in before.entries() {
            prop_assert_eq!(d - after.get(s, t), lost.get(s, t), "at {:?}", (s, t));
        }
        let idle = run_differential(&next.clone().with_index(r), &[]).unwrap();
        prop_assert_eq!(idle.dims(), after);
    }
}
