use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::field::PrimeField;

fn fp(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn ell_abutment(p: u32) -> AlgebraSpec {
    AlgebraSpec::new(
        fp(p),
        vec![
            GeneratorSpec::exterior("lambda1", 2 * p - 1),
            GeneratorSpec::exterior("dlogv", 1),
            GeneratorSpec::polynomial("kappa1", 2 * p),
        ],
    )
    .unwrap()
}

fn divided_line(p: u32) -> AlgebraSpec {
    AlgebraSpec::new(
        fp(p),
        vec![GeneratorSpec::divided("[dv]", 2 * p - 1).in_filtration(1)],
    )
    .unwrap()
}

#[test]
fn make_algebra_accepts_paper_generators() {
    let a = AlgebraSpec::new(
        fp(3),
        vec![
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::polynomial("mu2", 18),
        ],
    );
    assert!(a.is_ok());
    let u = AlgebraSpec::new(fp(5), vec![GeneratorSpec::truncated("u", 2, 4)]).unwrap();
    assert_eq!(u.hilbert(10).as_slice(), &[1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0]);
}

#[test]
fn make_algebra_rejects_bad_generators() {
    let odd_poly = AlgebraSpec::new(fp(3), vec![GeneratorSpec::polynomial("w", 3)]);
    assert!(matches!(odd_poly, Err(Error::ParityViolation { .. })));
    let dup = AlgebraSpec::new(
        fp(3),
        vec![
            GeneratorSpec::exterior("x", 1),
            GeneratorSpec::exterior("x", 3),
        ],
    );
    assert_eq!(dup.unwrap_err(), Error::DuplicateName("x".into()));
    let zero = AlgebraSpec::new(fp(3), vec![GeneratorSpec::polynomial("z", 0)]);
    assert_eq!(zero.unwrap_err(), Error::ZeroDegree("z".into()));
    let even_ext = AlgebraSpec::new(fp(3), vec![GeneratorSpec::exterior("e", 4)]);
    assert!(matches!(even_ext, Err(Error::ParityViolation { .. })));
    // filtration shifts parity: [dv] has internal degree 5 but total degree 6
    assert!(AlgebraSpec::new(fp(3), vec![GeneratorSpec::divided("[dv]", 5)]).is_err());
    assert!(divided_line(3).ngens() == 1);
}

#[test]
fn exterior_squares_and_anticommutation() {
    let a = ell_abutment(3);
    let l = a.gen("lambda1").unwrap();
    let d = a.gen("dlogv").unwrap();
    assert!(a.multiply(&l, &l).unwrap().is_zero());
    let dl = a.multiply(&d, &l).unwrap();
    let ld = a.multiply(&l, &d).unwrap();
    assert_eq!(dl, ld.scale(a.field(), a.field().neg(1)));
}

#[test]
fn divided_products_follow_binomials() {
    let g = divided_line(3);
    let f = *g.field();
    let gamma = |k: u32| Element::monomial(Monomial(vec![k]), 1);
    assert!(g.multiply(&gamma(1), &gamma(2)).unwrap().is_zero());
    assert_eq!(
        g.multiply(&gamma(3), &gamma(3)).unwrap(),
        gamma(6).scale(&f, 2)
    );
    assert_eq!(g.multiply(&gamma(1), &gamma(3)).unwrap(), gamma(4));
}

#[test]
fn mixed_specs_are_rejected() {
    let a = ell_abutment(3);
    let b = divided_line(3);
    let x = b.unit();
    assert_eq!(a.multiply(&a.unit(), &x).unwrap_err(), Error::MixedSpec);
}

#[test]
fn hilbert_examples() {
    assert_eq!(
        ell_abutment(3).hilbert(7).as_slice(),
        &[1, 1, 0, 0, 0, 1, 2, 1]
    );
    assert_eq!(
        AlgebraSpec::ground(fp(3)).hilbert(5).as_slice(),
        &[1, 0, 0, 0, 0, 0]
    );
    let z = AlgebraSpec::new(
        fp(3),
        vec![
            GeneratorSpec::exterior("eps1", 5),
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::polynomial("mu1", 6),
        ],
    )
    .unwrap();
    assert_eq!(z.hilbert(6).as_slice(), &[1, 0, 0, 0, 0, 2, 1]);
}

#[test]
fn extension_accounting_identity() {
    let f = fp(3);
    let lhs = AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::polynomial("mu2", 18),
            GeneratorSpec::exterior("[v]", 4).in_filtration(1),
            GeneratorSpec::truncated("[dv]", 5, 3).in_filtration(1),
        ],
    )
    .unwrap();
    let rhs = AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::exterior("[v]", 4).in_filtration(1),
            GeneratorSpec::polynomial("[dv]", 5).in_filtration(1),
        ],
    )
    .unwrap();
    assert_eq!(lhs.hilbert(60), rhs.hilbert(60));
}

#[test]
fn tensor_with_ground_is_identity() {
    let a = ell_abutment(3);
    let t = a.tensor(&AlgebraSpec::ground(fp(3))).unwrap();
    assert_eq!(t, a);
    assert_eq!(
        a.tensor(&a).unwrap_err(),
        Error::DuplicateName("lambda1".into())
    );
}

#[test]
fn base_change_morphism_is_iso() {
    let f = fp(3);
    let u = GeneratorSpec::truncated("u", 2, 2);
    let src = AlgebraSpec::new(
        f,
        vec![
            u.clone(),
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::exterior("dlogv", 1),
            GeneratorSpec::polynomial("kappa1", 6),
        ],
    )
    .unwrap();
    let tgt = AlgebraSpec::new(
        f,
        vec![
            u,
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::exterior("dlogu", 1),
            GeneratorSpec::polynomial("kappa1", 6),
        ],
    )
    .unwrap();
    let mut images = BTreeMap::new();
    images.insert("dlogv".to_string(), tgt.elem("-dlogu").unwrap());
    let r = check_morphism(&src, &tgt, &images, 60).unwrap();
    assert!(r.is_isomorphism());
    let id = check_morphism(&src, &src, &BTreeMap::new(), 30).unwrap();
    assert!(id.is_isomorphism());
}

#[test]
fn alpha_bar_is_valid_but_not_surjective() {
    let f = fp(3);
    let src = AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::polynomial("v", 4),
            GeneratorSpec::exterior("dlogv", 1),
        ],
    )
    .unwrap();
    let tgt = ell_abutment(3);
    let mut images = BTreeMap::new();
    images.insert("v".to_string(), Element::zero());
    let r = check_morphism(&src, &tgt, &images, 20).unwrap();
    assert!(r.is_valid());
    assert!(r.cokernel_degrees().contains(&6));
    let d6 = &r.degrees[6];
    assert_eq!((d6.target_dim, d6.rank), (2, 0));
}

#[test]
fn inhomogeneous_image_is_rejected() {
    let a = ell_abutment(3);
    let mut images = BTreeMap::new();
    images.insert(
        "kappa1".to_string(),
        a.elem("kappa1 + lambda1 dlogv").unwrap(),
    );
    assert!(check_morphism(&a, &a, &images, 6).is_ok());
    images.insert("kappa1".to_string(), a.elem("kappa1 + lambda1").unwrap());
    assert!(matches!(
        check_morphism(&a, &a, &images, 6),
        Err(Error::DegreeMismatch { .. })
    ));
}

#[test]
fn morphism_detects_broken_relation() {
    let f = fp(3);
    let src = AlgebraSpec::new(f, vec![GeneratorSpec::truncated("u", 2, 2)]).unwrap();
    let tgt = AlgebraSpec::new(f, vec![GeneratorSpec::polynomial("w", 2)]).unwrap();
    let mut images = BTreeMap::new();
    images.insert("u".to_string(), tgt.gen("w").unwrap());
    let r = check_morphism(&src, &tgt, &images, 6).unwrap();
    assert_eq!(r.relation_failures.len(), 1);
}

#[test]
fn derivation_on_truncated_generator() {
    let f = fp(3);
    let a = AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::truncated("u", 2, 2),
            GeneratorSpec::exterior("lambda1", 5),
            GeneratorSpec::exterior("dlogu", 1),
            GeneratorSpec::polynomial("kappa1", 6),
        ],
    )
    .unwrap();
    let d = Derivation::from_text(&a, 1, &[("u", "u dlogu"), ("kappa1", "-kappa1 dlogu")]).unwrap();
    // sigma(u^2) = 2 u^2 dlogu, which vanishes in P_2(u)
    let lhs = Monomial(vec![2, 0, 0, 0]);
    assert!(d.apply_monomial(&a, &lhs).unwrap().is_zero());
    let k2 = a.mono("kappa1^2").unwrap();
    assert_eq!(
        d.apply_monomial(&a, &k2).unwrap(),
        a.elem("-2 kappa1^2 dlogu").unwrap()
    );
}

#[test]
fn divided_derivation_digit_formula() {
    // d(gamma_1) = 0, d(gamma_3) = lambda2: d(gamma_k) = lambda2 gamma_{k-3}
    let f = fp(3);
    let a = AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::exterior("lambda2", 17),
            GeneratorSpec::divided("[dv]", 5).in_filtration(1),
        ],
    )
    .unwrap();
    let mut d = Derivation::new(-1);
    d.set_level(&a, "[dv]", 1, a.elem("lambda2").unwrap())
        .unwrap();
    d.set_level(&a, "[dv]", 2, a.elem("lambda2 [dv]^6").unwrap())
        .unwrap();
    for k in 0..27u32 {
        let got = d.apply_monomial(&a, &Monomial(vec![0, k])).unwrap();
        let want = if k >= 3 {
            Element::monomial(Monomial(vec![1, k - 3]), 1)
        } else {
            Element::zero()
        };
        assert_eq!(got, want, "k = {k}");
    }
}

#[test]
fn derivation_rejects_wrong_degree() {
    let a = ell_abutment(3);
    let mut d = Derivation::new(1);
    assert!(matches!(
        d.set(&a, "kappa1", a.elem("kappa1").unwrap()),
        Err(Error::DegreeMismatch { .. })
    ));
}

fn small_spec(p: u32) -> AlgebraSpec {
    AlgebraSpec::new(
        fp(p),
        vec![
            GeneratorSpec::exterior("x", 1),
            GeneratorSpec::exterior("y", 3),
            GeneratorSpec::polynomial("z", 2),
            GeneratorSpec::truncated("t", 4, p),
            GeneratorSpec::divided("g", 2),
        ],
    )
    .unwrap()
}

fn random_element(spec: &AlgebraSpec, picks: &[(usize, u32)], cap: u32) -> Element {
    // positive degrees only: the augmentation ideal
    let all: Vec<Monomial> = spec.basis_upto(cap).into_iter().skip(1).flatten().collect();
    let mut e = Element::zero();
    for &(i, c) in picks {
        e.add_term(
            spec.field(),
            all[i % all.len()].clone(),
            c % spec.field().p(),
        );
    }
    e
}

proptest! {
    #[test]
    fn product_is_associative_and_graded_commutative(
        p in prop::sample::select(vec![3u32, 5]),
        a in 0usize..500, b in 0usize..500, c in 0usize..500,
    ) {
        let s = small_spec(p);
        let f = *s.field();
        let all: Vec<Monomial> = s.basis_upto(10).into_iter().flatten().collect();
        let pick = |i: usize| Element::monomial(all[i % all.len()].clone(), 1);
        let (x, y, z) = (pick(a), pick(b), pick(c));
        let left = s.multiply(&s.multiply(&x, &y).unwrap(), &z).unwrap();
        let right = s.multiply(&x, &s.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let xy = s.multiply(&x, &y).unwrap();
        let yx = s.multiply(&y, &x).unwrap();
        let odd = s.is_odd(&all[a % all.len()]) && s.is_odd(&all[b % all.len()]);
        prop_assert_eq!(xy, yx.scale(&f, f.sign(odd)));
    }

    #[test]
    fn hilbert_of_tensor_is_convolution(
        d1 in 1u32..7, d2 in 1u32..7, d3 in 1u32..7, cap in 0u32..40,
    ) {
        let f = fp(3);
        let mk = |name: &str, d: u32| if d % 2 == 1 {
            GeneratorSpec::exterior(name, d)
        } else {
            GeneratorSpec::polynomial(name, d)
        };
        let a = AlgebraSpec::new(f, vec![mk("a", d1), GeneratorSpec::truncated("h", 2 * d2, 3)]).unwrap();
        let b = AlgebraSpec::new(f, vec![mk("b", d3), GeneratorSpec::divided("g", 2 * d1)]).unwrap();
        let t = a.tensor(&b).unwrap();
        prop_assert_eq!(t.hilbert(cap), a.hilbert(cap).convolve(&b.hilbert(cap)));
    }

    #[test]
    fn divided_power_matches_truncated_factorization(
        p in prop::sample::select(vec![3u32, 5]), half in 1u32..5, cap in 0u32..120,
    ) {
        let f = fp(p);
        let d = 2 * half;
        let gamma = AlgebraSpec::new(f, vec![GeneratorSpec::divided("y", d)]).unwrap();
        let mut gens = Vec::new();
        let mut pi = 1;
        while d * pi <= cap.max(1) {
            gens.push(GeneratorSpec::truncated(format!("y{pi}"), d * pi, p));
            pi *= p;
        }
        let trunc = AlgebraSpec::new(f, gens).unwrap();
        prop_assert_eq!(gamma.hilbert(cap), trunc.hilbert(cap));
    }

    #[test]
    fn height_p_elements_are_nilpotent(
        p in prop::sample::select(vec![3u32, 5]),
        picks in prop::collection::vec((0usize..50, 0u32..5), 1..4),
    ) {
        let f = fp(p);
        let s = AlgebraSpec::new(f, vec![
            GeneratorSpec::truncated("t", 2, p),
            GeneratorSpec::truncated("w", 4, p),
        ]).unwrap();
        let a = random_element(&s, &picks, 12);
        let mut pow = s.unit();
        for _ in 0..p {
            pow = s.multiply(&pow, &a).unwrap();
        }
        prop_assert!(pow.is_zero());
        let e = AlgebraSpec::new(f, vec![
            GeneratorSpec::exterior("x", 1),
            GeneratorSpec::exterior("y", 3),
            GeneratorSpec::polynomial("z", 2),
        ]).unwrap();
        let odd: Vec<Monomial> = e.basis(5);
        let mut o = Element::zero();
        for (i, &(_, c)) in picks.iter().enumerate() {
            o.add_term(&f, odd[i % odd.len()].clone(), c % p);
        }
        prop_assert!(e.multiply(&o, &o).unwrap().is_zero());
    }
}
