use super::*;

fn fp(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

#[test]
fn ell_sequence_degree_six() {
    let spec = ell_sequence(fp(3), 0).unwrap();
    assert!(spec.a.basis(6).is_empty());
    let b = spec.b.spec().clone();
    let c = spec.c.spec().clone();
    let b6: Vec<String> = spec
        .b
        .basis(6)
        .iter()
        .map(|m| b.format_monomial(m))
        .collect();
    assert_eq!(b6.len(), 2);
    assert_eq!(spec.c.basis(5).len(), 2);
    let del = |t: &str| c.format_element(&(spec.del)(&b.mono(t).unwrap()).unwrap());
    assert_eq!(del("kappa1"), "epsilon1");
    assert_eq!(del("lambda1 dlogv"), "lambda1");
    let r = ranks(&spec, 6).unwrap();
    assert_eq!(r[&6].2, 2);
    assert_eq!(r[&5].0, 0);
}

#[test]
fn ell_sequence_tau_hits_lambda2() {
    let spec = ell_sequence(fp(3), 0).unwrap();
    let a = spec.a.spec().clone();
    let c = spec.c.spec().clone();
    let v = (spec.tau)(&c.mono("epsilon1 mu1^2").unwrap()).unwrap();
    assert_eq!(a.format_element(&v), "lambda2");
    let rep = check_les(&spec, 17).unwrap();
    let row = rep
        .joints
        .iter()
        .find(|j| j.n == 17 && j.joint == "A")
        .unwrap();
    assert_eq!((row.image, row.kernel), (1, 1));
}

#[test]
fn ell_sequence_is_exact_for_both_coefficients() {
    for p in [3, 5] {
        for c in [0, 1] {
            let spec = ell_sequence(fp(p), c).unwrap();
            let rep = check_les(&spec, 60).unwrap();
            assert!(rep.passed(), "p={p} c={c}: {rep:?}");
        }
    }
}

/// The zero vector space, written as an algebra with no basis at all.
struct Zero(AlgebraSpec);

impl GradedAlgebra for Zero {
    fn spec(&self) -> &AlgebraSpec {
        &self.0
    }
    fn normalize(&self, _: Element) -> Result<Element> {
        Ok(Element::zero())
    }
    fn basis(&self, _: u32) -> Vec<Monomial> {
        Vec::new()
    }
    fn relations(&self) -> Vec<crate::graded_algebra::Relation> {
        Vec::new()
    }
}

#[test]
fn zero_sequence_is_exact() {
    let g = AlgebraSpec::ground(fp(3));
    let spec = LongExactSpec {
        a: Box::new(Zero(g.clone())),
        b: Box::new(Zero(g.clone())),
        c: Box::new(Zero(g.clone())),
        rho: AlgebraMap::from_text(&g, &g, &[]).unwrap(),
        del: Box::new(|_| Ok(Element::zero())),
        tau: Box::new(|_| Ok(Element::zero())),
        c_action: None,
    };
    let rep = check_les(&spec, 20).unwrap();
    assert!(rep.passed());
    assert!(rep.joints.iter().all(|j| j.image == 0 && j.kernel == 0));
}

#[test]
fn broken_tau_is_reported() {
    let mut spec = ell_sequence(fp(3), 0).unwrap();
    spec.tau = Box::new(|_| Ok(Element::zero()));
    match check_les(&spec, 20) {
        Err(Error::InexactAt {
            degree,
            joint,
            image,
            kernel,
        }) => {
            assert_eq!((degree, joint.as_str(), image, kernel), (17, "A", 0, 1));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn ku_sequence_is_exact() {
    for p in [3, 5] {
        let spec = ku_sequence(fp(p), 0).unwrap();
        let cap = if p == 3 { 60 } else { 70 };
        let rep = check_les(&spec, cap).unwrap();
        assert!(
            rep.passed(),
            "p={p}: {:?}",
            (&rep.rho_relation_failures, &rep.module_failures)
        );
        for n in 0..=cap {
            let (_, im) = rho_image(&spec, n).unwrap();
            let stated = ku_stated_image(spec.b.spec(), n);
            assert!(im.same_as(spec.b.spec().field(), &stated), "p={p} n={n}");
        }
    }
}
