use std::collections::BTreeMap;

use super::thh::alg;
use super::{attempt, attempt_many, Check, Status};
use crate::error::Result;
use crate::field::PrimeField;
use crate::graded_algebra::{
    check_morphism, hilbert, map_matrix, morphism_report, AlgebraMap, AlgebraSpec,
    CoefficientFactor, Derivation, Element, GeneratorSpec, GradedAlgebra, GradedDims,
};
use crate::les_checker::{
    ell_sequence, exactness_report, ku_sequence, ku_stated_image, rho_image, thh_ell, thh_ell_log,
    thh_ku, thh_ku_log, ExactnessReport, LongExactSpec,
};
use crate::presentation::{check_derivation, check_naturality, theta_a, theta_b};
use crate::spectral_sequence::DegreeRow;
use crate::tor_engine::{tor_closed_form, tor_oracle, ModuleSpec, Summand};

fn theta_bar_images(p: u32) -> Vec<(String, String)> {
    let mut images = vec![("mu2".to_string(), format!("kappa1^{p}"))];
    for i in 0..p {
        images.push((theta_a(i), format!("u dlogu kappa1^{i}")));
    }
    for j in 1..p {
        images.push((theta_b(j), format!("u kappa1^{j}")));
    }
    images
}

fn pairs(v: &[(String, String)]) -> Vec<(&str, &str)> {
    v.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

pub(super) fn ausoni(f: PrimeField, cap: u32) -> Vec<Check> {
    attempt_many("ausoni setup", || {
        let p = f.p();
        let mut out = Vec::new();
        let source = thh_ku(f)?;
        let target = thh_ku_log(f)?;
        let l1 = alg(f, vec![GeneratorSpec::exterior("lambda1", 2 * p - 1)])?;
        let l1_mu2 = l1.tensor(&alg(f, vec![GeneratorSpec::polynomial("mu2", 2 * p * p)])?)?;
        let ker = hilbert(&l1_mu2, cap).shifted(2 * p * p - 1);
        let mut im = hilbert(
            &l1.tensor(&alg(f, vec![GeneratorSpec::polynomial("k", 2 * p * p)])?)?,
            cap,
        );
        let free = thh_ell_log(f, "dlogu")?;
        for k in 1..=p - 2 {
            im = im.plus(&hilbert(&free, cap).shifted(2 * k));
        }
        out.push(Check::dims(
            "hilbert(E(lambda1) ⊗ Theta_*) = hilbert(ker rho') + hilbert(im rho')",
            &source.hilbert(cap),
            &ker.plus(&im),
        ));

        let images = theta_bar_images(p);
        let theta_bar = AlgebraMap::from_text(&source, &target, &pairs(&images))?;
        let rep = morphism_report(&theta_bar, &source, &target, cap)?;
        let mut c = Check::new(
            "theta-bar respects every relation of Theta_*",
            rep.is_valid(),
        );
        for r in &rep.relation_failures {
            c = c.witness(format!("{} leaves {}", r.label, r.residual));
        }
        out.push(c);
        let ranks = GradedDims::new(rep.degrees.iter().map(|d| d.rank).collect());
        let kernels = GradedDims::new(rep.degrees.iter().map(|d| d.source_dim - d.rank).collect());
        out.push(Check::dims(
            "rank of theta-bar = stated im rho'",
            &im,
            &ranks,
        ));
        out.push(Check::dims(
            "kernel of theta-bar = E(lambda1) ⊗ P(mu2){u^{p-2} a_{p-1}}",
            &ker,
            &kernels,
        ));

        let les = ku_sequence(f, 0)?;
        out.push(attempt("im theta-bar = im rho' = stated image", || {
            let mut bad = Vec::new();
            for n in 0..=cap {
                let tb = target.basis(n);
                let m = map_matrix(&source.basis(n), &tb, |x| {
                    theta_bar.apply_monomial(&source, &target, x)
                })?;
                let mine = m.image(&f);
                let (_, theirs) = rho_image(&les, n)?;
                let stated = ku_stated_image(&target, n);
                if !(mine.same_as(&f, &theirs) && mine.same_as(&f, &stated)) {
                    bad.push(n);
                }
            }
            let mut c = Check::new("im theta-bar = im rho' = stated image", bad.is_empty());
            if !bad.is_empty() {
                c = c.witness(format!("differs in degrees {bad:?}"));
            }
            Ok(c)
        }));
        out.push(attempt("rho' values on generators", || {
            let s = source.spec();
            let mut c = Check::new("rho' values on generators", true);
            for (g, img) in &images {
                let i = s.index_of(g)?;
                let want = target.elem(img)?;
                if les.rho.image(i) != &want {
                    c.status = Status::Fail;
                    c = c.witness(format!(
                        "rho'({g}) = {}, expected {img}",
                        target.format_element(les.rho.image(i))
                    ));
                }
            }
            // lambda2 in ker rho' is tau of epsilon1 mu1^{p-1}
            let cz = les.c.spec().clone();
            let lam2 = (les.tau)(&cz.mono(&format!("epsilon1 mu1^{}", p - 1))?)?;
            let want = s.elem(&format!("u^{} {}", p - 2, theta_a(p - 1)))?;
            let unit = (1..p).any(|k| want.scale(&f, k) == lam2);
            let rho_l2 = theta_bar.apply(&source, &target, &lam2)?;
            if !unit || !rho_l2.is_zero() {
                c.status = Status::Fail;
            }
            Ok(c.witness(format!(
                "lambda2 -> {} (unit multiple of u^{}a{}: {unit}), rho'(lambda2) = {}",
                s.format_element(&lam2),
                p - 2,
                p - 1,
                target.format_element(&rho_l2)
            )))
        }));
        out.push(attempt("theta-bar lifts multiplicatively", || {
            let s = source.spec();
            let mut degrees: Vec<u32> = s.generators().iter().map(|g| g.total_degree()).collect();
            degrees.extend(source.relations().iter().map(|r| s.total_degree(&r.lhs)));
            degrees.sort_unstable();
            degrees.dedup();
            let hits: Vec<u32> = degrees
                .into_iter()
                .filter(|&n| n <= cap && kernels.get(n) > 0)
                .collect();
            let name = "theta-bar lifts multiplicatively: ker rho' = 0 in generator and relation degrees of Theta_*";
            let c = if hits.is_empty() {
                Check::new(name, true)
            } else if p == 3 {
                Check::new(name, true)
                    .with_status(Status::Conditional)
                    .witness(format!(
                        "ker rho' is nonzero in relation degrees {hits:?}; the lift needs the relations there, unchecked at p = 3"
                    ))
            } else {
                Check::new(name, false).witness(format!("ker rho' nonzero in degrees {hits:?}"))
            };
            Ok(c)
        }));
        Ok(out)
    })
}

fn les_check(name: &str, rep: &ExactnessReport, cap: u32) -> Check {
    let mut kernel = GradedDims::zeros(cap);
    let mut image = GradedDims::zeros(cap);
    for j in &rep.joints {
        if j.n <= cap {
            kernel.add_at(j.n, j.kernel);
            image.add_at(j.n, j.image);
        }
    }
    let mut c = Check::dims(name, &kernel, &image);
    c.status = Status::from_bool(rep.passed());
    if let Some(e) = rep.first_failure() {
        c = c.witness(e.to_string());
    }
    for n in &rep.counting_failures {
        c = c.witness(format!("rank count fails in degree {n}"));
    }
    for m in rep.rho_relation_failures.iter().chain(&rep.module_failures) {
        c = c.witness(m.clone());
    }
    c
}

fn exactness_checks(
    build: fn(PrimeField, u32) -> Result<LongExactSpec>,
    f: PrimeField,
    cap: u32,
) -> Vec<Check> {
    [0, 1]
        .into_iter()
        .map(|c| {
            let name = format!("exact at all three joints, mod-lambda1 coefficient {c}");
            attempt(&name, || {
                Ok(les_check(
                    &name,
                    &exactness_report(&build(f, c)?, cap)?,
                    cap,
                ))
            })
        })
        .collect()
}

fn value_check(
    spec: &LongExactSpec,
    from: &str,
    text: &str,
    want: &str,
    on_b: bool,
) -> Result<Check> {
    let (src, tgt) = if on_b {
        (spec.b.spec(), spec.c.spec())
    } else {
        (spec.c.spec(), spec.a.spec())
    };
    let v = if on_b {
        (spec.del)(&src.mono(text)?)?
    } else {
        (spec.tau)(&src.mono(text)?)?
    };
    let got = tgt.format_element(&v);
    Ok(Check::new(format!("{from}({text}) = {want}"), got == want).witness(format!("got {got}")))
}

pub(super) fn les_ell(f: PrimeField, cap: u32) -> Vec<Check> {
    let p = f.p();
    let mut out = exactness_checks(ell_sequence, f, cap);
    out.extend(attempt_many("ell sequence values", || {
        let spec = ell_sequence(f, 0)?;
        Ok(vec![
            value_check(&spec, "del", "kappa1", "epsilon1", true)?,
            value_check(&spec, "del", "lambda1 dlogv", "lambda1", true)?,
            value_check(&spec, "del", "dlogv kappa1", "mu1", true)?,
            value_check(
                &spec,
                "tau",
                &format!("epsilon1 mu1^{}", p - 1),
                "lambda2",
                false,
            )?,
        ])
    }));
    out
}

pub(super) fn les_ku(f: PrimeField, cap: u32) -> Vec<Check> {
    let mut out = exactness_checks(ku_sequence, f, cap);
    out.push(attempt(
        "im rho' = E(lambda1) ⊗ P(kappa1^p) ⊕ (u)",
        || {
            let spec = ku_sequence(f, 0)?;
            let b = spec.b.spec().clone();
            let mut rows = Vec::new();
            let mut bad = Vec::new();
            for n in 0..=cap {
                let (_, im) = rho_image(&spec, n)?;
                let stated = ku_stated_image(&b, n);
                if !im.same_as(&f, &stated) {
                    bad.push(n);
                }
                rows.push(DegreeRow {
                    n,
                    expected: stated.dim(),
                    actual: im.dim(),
                });
            }
            let mut c = Check::new("im rho' = E(lambda1) ⊗ P(kappa1^p) ⊕ (u)", bad.is_empty());
            c.degrees = rows;
            if !bad.is_empty() {
                c = c.witness(format!("subspaces differ in degrees {bad:?}"));
            }
            Ok(c)
        },
    ));
    out
}

/// A carrier of the suspension operator with its stated values.
struct Carrier {
    tag: &'static str,
    name: &'static str,
    algebra: Box<dyn GradedAlgebra>,
    sigma: Derivation,
}

fn sigma(spec: &AlgebraSpec, values: &[(String, String)]) -> Result<Derivation> {
    let mut d = Derivation::new(1);
    for (g, v) in values {
        d.set(spec, g, spec.elem(v)?)?;
    }
    Ok(d)
}

fn carriers(f: PrimeField) -> Result<Vec<Carrier>> {
    let p = f.p();
    let s = |v: &[(&str, &str)]| -> Vec<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    };
    let ell = thh_ell(f)?;
    let ell_log = thh_ell_log(f, "dlogv")?;
    let ku = thh_ku(f)?;
    let ku_log = thh_ku_log(f)?;
    let mut ku_vals = vec![("u".to_string(), "a0".to_string())];
    for j in 1..p {
        let c = f.reduce(1 - j as i64);
        ku_vals.push((theta_b(j), format!("{c} {}", theta_a(j))));
    }
    Ok(vec![
        Carrier {
            tag: "(i)",
            name: "(i) E(lambda1, lambda2) ⊗ P(mu2)",
            sigma: sigma(&ell, &[])?,
            algebra: Box::new(ell),
        },
        Carrier {
            tag: "(ii)",
            name: "(ii) E(lambda1, dlogv) ⊗ P(kappa1)",
            sigma: sigma(&ell_log, &s(&[("kappa1", "kappa1 dlogv")]))?,
            algebra: Box::new(ell_log),
        },
        Carrier {
            tag: "(iii)",
            name: "(iii) E(lambda1) ⊗ Theta_*",
            sigma: sigma(ku.spec(), &ku_vals)?,
            algebra: Box::new(ku),
        },
        Carrier {
            tag: "(iv)",
            name: "(iv) P_{p-1}(u) ⊗ E(lambda1, dlogu) ⊗ P(kappa1)",
            sigma: sigma(
                &ku_log,
                &s(&[("u", "u dlogu"), ("kappa1", "-kappa1 dlogu")]),
            )?,
            algebra: Box::new(ku_log),
        },
    ])
}

/// (source, target, map) between carriers along which sigma is natural.
fn natural_maps(f: PrimeField, cs: &[Carrier]) -> Result<Vec<(usize, usize, AlgebraMap)>> {
    let p = f.p();
    let rho = AlgebraMap::from_text(
        cs[0].algebra.as_ref(),
        cs[1].algebra.as_ref(),
        &[("lambda2", "0"), ("mu2", &format!("kappa1^{p}"))],
    )?;
    let base = AlgebraMap::from_text(
        cs[1].algebra.as_ref(),
        cs[3].algebra.as_ref(),
        &[("dlogv", "-dlogu")],
    )?;
    let images = theta_bar_images(p);
    let theta_bar = AlgebraMap::from_text(
        cs[2].algebra.as_ref(),
        cs[3].algebra.as_ref(),
        &pairs(&images),
    )?;
    Ok(vec![(0, 1, rho), (1, 3, base), (2, 3, theta_bar)])
}

/// Relation failures for `d` on carrier `k`, plus naturality failures along
/// maps touching `k` with the other carriers' stated values.
fn failures(
    cs: &[Carrier],
    maps: &[(usize, usize, AlgebraMap)],
    k: usize,
    d: &Derivation,
) -> Result<(usize, usize)> {
    let rel = check_derivation(cs[k].algebra.as_ref(), d)?
        .failures()
        .count();
    let mut nat = 0;
    for (s, t, m) in maps {
        if *s != k && *t != k {
            continue;
        }
        let ds = if *s == k { d } else { &cs[*s].sigma };
        let dt = if *t == k { d } else { &cs[*t].sigma };
        nat += check_naturality(cs[*s].algebra.as_ref(), cs[*t].algebra.as_ref(), m, ds, dt)?
            .failures()
            .count();
    }
    Ok((rel, nat))
}

pub(super) fn suspension(f: PrimeField, _cap: u32) -> Vec<Check> {
    attempt_many("suspension setup", || {
        let p = f.p();
        let mut out = Vec::new();
        let cs = carriers(f)?;
        for c in &cs {
            let rep = check_derivation(c.algebra.as_ref(), &c.sigma)?;
            let mut chk = Check::new(format!("sigma is a derivation on {}", c.name), rep.passed())
                .witness(format!("{} relations checked", rep.relations.len()));
            for r in rep.failures() {
                chk = chk.witness(format!("{} leaves {}", r.label, r.residual));
            }
            out.push(chk);
        }
        let maps = natural_maps(f, &cs)?;
        for (s, t, m) in &maps {
            let rep = check_naturality(
                cs[*s].algebra.as_ref(),
                cs[*t].algebra.as_ref(),
                m,
                &cs[*s].sigma,
                &cs[*t].sigma,
            )?;
            let mut chk = Check::new(
                format!("sigma is natural from {} to {}", cs[*s].tag, cs[*t].tag),
                rep.passed(),
            );
            for r in rep.failures() {
                chk = chk.witness(format!("{} leaves {}", r.label, r.residual));
            }
            out.push(chk);
        }

        // the single-value mutation sigma(b_j) = (1 + j) a_j
        let ku = cs[2].algebra.spec().clone();
        let mut missed = Vec::new();
        let mut notes = Vec::new();
        for j in 1..p {
            let v = ku.elem(&format!("{} {}", f.reduce(1 + j as i64), theta_a(j)))?;
            let mut d = cs[2].sigma.clone();
            d.set(&ku, &theta_b(j), v)?;
            let (rel, nat) = failures(&cs, &maps, 2, &d)?;
            if rel == 0 {
                missed.push(j);
            }
            notes.push(format!(
                "j = {j}: {rel} relation failures, {nat} naturality failures"
            ));
        }
        let mut chk = Check::new(
            "sigma(b_j) = (1 + j) a_j breaks a relation of Theta_* for every j",
            missed.is_empty(),
        );
        chk.witnesses = notes;
        out.push(chk);

        // sweep: double every nonzero value, give every zero value a nonzero one
        let mut missed = Vec::new();
        let mut tried = 0;
        let mut skipped = Vec::new();
        for (k, c) in cs.iter().enumerate() {
            let spec = c.algebra.spec();
            for (i, g) in spec.generators().iter().enumerate() {
                let cur = c.sigma.image(i, 0);
                let new = if cur.is_zero() {
                    match c.algebra.basis(g.total_degree() + 1).first() {
                        Some(m) => Element::monomial(m.clone(), 1),
                        None => {
                            skipped.push(format!("{} on {}", g.name, c.tag));
                            continue;
                        }
                    }
                } else {
                    cur.scale(&f, 2)
                };
                let mut d = c.sigma.clone();
                d.set(spec, &g.name, new)?;
                tried += 1;
                let (rel, nat) = failures(&cs, &maps, k, &d)?;
                if rel + nat == 0 {
                    missed.push(format!("{} on {}", g.name, c.tag));
                }
            }
        }
        let mut chk = Check::new(
            "every single-value mutation is detected by a relation or naturality check",
            missed.is_empty(),
        )
        .witness(format!("{tried} mutations tried"));
        if !skipped.is_empty() {
            chk = chk.witness(format!("no target degree for: {}", skipped.join(", ")));
        }
        if !missed.is_empty() {
            chk = chk.witness(format!("undetected: {}", missed.join(", ")));
        }
        out.push(chk);
        Ok(out)
    })
}

fn grid_generators() -> Vec<GeneratorSpec> {
    let mut out = Vec::new();
    for d in 1..=6 {
        if d % 2 == 1 {
            out.push(GeneratorSpec::exterior(format!("e{d}"), d));
        } else {
            out.push(GeneratorSpec::polynomial(format!("x{d}"), d));
        }
    }
    out
}

fn subsets(names: &[String]) -> Vec<Vec<&str>> {
    (0..1u32 << names.len())
        .map(|mask| {
            names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| n.as_str())
                .collect()
        })
        .collect()
}

/// Closed form against the oracle for every ground algebra on at most two
/// generators of degree <= 6 and every module with at most two summands
/// (free or trivial on any subset, shift 0 or 3).
pub(super) fn tor_oracle_sweep(f: PrimeField, cap: u32) -> Vec<Check> {
    let name = "closed-form Tor = resolution oracle on the small grid";
    vec![attempt(name, || {
        let cap = cap.min(30);
        let pool = grid_generators();
        let mut algebras: Vec<Vec<GeneratorSpec>> = vec![vec![]];
        for (i, a) in pool.iter().enumerate() {
            algebras.push(vec![a.clone()]);
            for b in &pool[i..] {
                let mut b = b.clone();
                if b.name == a.name {
                    b.name.push('\'');
                }
                algebras.push(vec![a.clone(), b]);
            }
        }
        let mut cases = 0;
        let mut bad = Vec::new();
        for gens in algebras {
            let a = AlgebraSpec::new(f, gens)?;
            let names: Vec<String> = a.generators().iter().map(|g| g.name.clone()).collect();
            let mut options = Vec::new();
            for sub in subsets(&names) {
                for shift in [0, 3] {
                    options.push((sub.clone(), shift));
                }
            }
            let mut modules = Vec::new();
            for (i, x) in options.iter().enumerate() {
                modules.push(vec![x.clone()]);
                for y in &options[i + 1..] {
                    modules.push(vec![x.clone(), y.clone()]);
                }
            }
            for m in modules {
                let summands = m
                    .iter()
                    .enumerate()
                    .map(|(k, (sub, shift))| Summand::free(format!("m{k}"), *shift, sub))
                    .collect();
                let left = ModuleSpec::with_summands(AlgebraSpec::ground(f), summands)?;
                let right = ModuleSpec::ground(f);
                let closed = tor_closed_form(&a, &left, &right)?.e2_dims(cap);
                let oracle = tor_oracle(&a, &left, &right, cap)?;
                cases += 1;
                if closed != oracle && bad.len() < 5 {
                    bad.push(format!("{names:?} with {m:?}"));
                }
            }
        }
        let mut c = Check::new(name, bad.is_empty()).witness(format!("{cases} cases at cap {cap}"));
        for b in bad {
            c = c.witness(format!("mismatch: {b}"));
        }
        Ok(c)
    })]
}

fn series_check(name: &str, spec: &AlgebraSpec, cap: u32, term: impl Fn(u32) -> usize) -> Check {
    let want = GradedDims::new((0..=cap).map(term).collect());
    Check::dims(name, &want, &hilbert(spec, cap))
}

pub(super) fn inputs(f: PrimeField, cap: u32) -> Vec<Check> {
    let p = f.p();
    let mut out = Vec::new();
    for (x, d) in [("v", 2 * p - 2), ("u", 2)] {
        out.extend(attempt_many(&format!("inputs for {x}"), || {
            let mut checks = Vec::new();
            let dx = format!("d{x}");
            let dlog = format!("dlog{x}");
            let c = vec![CoefficientFactor::trivial("C")];
            let cy = AlgebraSpec::with_coefficients(
                f,
                vec![
                    GeneratorSpec::polynomial(x, d),
                    GeneratorSpec::exterior(&dx, d + 1),
                ],
                c.clone(),
            )?;
            let rep = AlgebraSpec::with_coefficients(
                f,
                vec![GeneratorSpec::polynomial(x, d), GeneratorSpec::exterior(&dlog, 1)],
                c.clone(),
            )?;
            let unit = AlgebraSpec::with_coefficients(
                f,
                vec![GeneratorSpec::exterior(&dlog, 1)],
                c.clone(),
            )?;
            checks.push(series_check(
                &format!("P({x}) ⊗ E(d{x}) ⊗ C_* has series (1 + t^{}) / (1 - t^{d})", d + 1),
                &cy,
                cap,
                |n| usize::from(n % d == 0) + usize::from(n > d && (n - d - 1) % d == 0),
            ));
            checks.push(series_check(
                &format!("P({x}) ⊗ E(dlog {x}) ⊗ C_* has series (1 + t) / (1 - t^{d})"),
                &rep,
                cap,
                |n| usize::from(n % d == 0) + usize::from(n >= 1 && (n - 1) % d == 0),
            ));
            checks.push(series_check(
                &format!("E(dlog {x}) ⊗ C_* has series 1 + t"),
                &unit,
                cap,
                |n| usize::from(n <= 1),
            ));

            let mut images = BTreeMap::new();
            images.insert(dx.clone(), rep.elem(&format!("{x} {dlog}"))?);
            let m = check_morphism(&cy, &rep, &images, cap)?;
            let coker = m.cokernel_degrees();
            let mut chk = Check::new(
                format!("d{x} -> {x} · dlog {x} is an injective algebra map with cokernel F_p{{dlog {x}}}"),
                m.is_valid() && m.is_injective() && coker == vec![1],
            )
            .witness(format!("cokernel degrees {coker:?}"));
            for r in &m.relation_failures {
                chk = chk.witness(format!("{} leaves {}", r.label, r.residual));
            }
            checks.push(chk);

            let mut images = BTreeMap::new();
            images.insert(x.to_string(), Element::zero());
            let m = check_morphism(&rep, &unit, &images, cap)?;
            checks.push(Check::new(
                format!("{x} -> 0 maps P({x}) ⊗ E(dlog {x}) onto E(dlog {x})"),
                m.is_valid() && m.is_surjective(),
            ));

            // C_* cancels: Tor with C acting freely on one side equals Tor without it
            let ground = AlgebraSpec::with_coefficients(
                f,
                vec![GeneratorSpec::polynomial(x, d), GeneratorSpec::exterior(&dx, d + 1)],
                c,
            )?;
            let bare = alg(f, ground.generators().to_vec())?;
            let l = ModuleSpec::trivial(thh_ell(f)?);
            let r = ModuleSpec::trivial(alg(f, vec![GeneratorSpec::exterior(&dlog, 1)])?);
            let with_c = tor_closed_form(&ground, &l, &r.clone().free_on_coefficients(&["C"]))?.e2_dims(cap);
            let without = tor_closed_form(&bare, &l, &r)?.e2_dims(cap);
            checks.push(Check::bigraded(
                format!("C_* cancels in Tor over P({x}) ⊗ E(d{x}) ⊗ C_*"),
                &without,
                &with_c,
            ));
            Ok(checks)
        }));
    }
    out
}
