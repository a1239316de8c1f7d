use std::collections::BTreeMap;

use super::thh::{abutment_checks, alg};
use super::{attempt, attempt_many, Check};
use crate::error::Result;
use crate::field::PrimeField;
use crate::graded_algebra::{
    hilbert, hilbert_bigraded, AlgebraSpec, BigradedDims, Element, GeneratorSpec, GradedAlgebra,
    GradedDims, Monomial,
};
use crate::les_checker::{thh_ku, thh_ku_log};
use crate::spectral_sequence::{
    compare_abutment, run_differential, AbutmentSpec, DifferentialRule, ExtensionRule, Page,
    PageElement, PageKey,
};
use crate::tor_engine::{tor_exterior_module, tor_oracle, ModuleSpec, Summand};

/// Label of u^i b_j in Theta_*, with b_0 = u.
fn theta_label(i: u32, j: u32) -> String {
    match (i, j) {
        (0, 0) => "u".into(),
        (i, 0) => format!("u^{}", i + 1),
        (0, j) => format!("b{j}"),
        (1, j) => format!("u b{j}"),
        (i, j) => format!("u^{i} b{j}"),
    }
}

fn theta_degree(p: u32, i: u32, j: u32) -> u32 {
    2 * i + if j == 0 { 2 } else { 2 * p * j + 2 }
}

/// E(lambda1, dlogu) ⊗ P(mu2).
fn coefficients(f: PrimeField) -> Result<AlgebraSpec> {
    let p = f.p();
    alg(
        f,
        vec![
            GeneratorSpec::exterior("lambda1", 2 * p - 1),
            GeneratorSpec::exterior("dlogu", 1),
            GeneratorSpec::polynomial("mu2", 2 * p * p),
        ],
    )
}

fn du() -> GeneratorSpec {
    GeneratorSpec::exterior("du", 3)
}

/// (label, degree) of the E(du)-free summands other than u^{p-3} b_{p-1}.
fn free_generators(p: u32) -> Vec<(String, u32)> {
    let mut out = vec![("1".to_string(), 0)];
    for i in 0..(p - 3) {
        for j in 0..p {
            out.push((theta_label(i, j), theta_degree(p, i, j)));
        }
    }
    out
}

/// (label, degree) of u^{p-3} b_{j-1} and a_j, 1 <= j <= p-1.
fn trivial_generators(p: u32) -> Vec<(String, u32, String, u32)> {
    (1..p)
        .map(|j| {
            (
                theta_label(p - 3, j - 1),
                2 * p * j - 4,
                format!("a{j}"),
                2 * p * j + 3,
            )
        })
        .collect()
}

fn module_summands(p: u32, alternative: bool) -> Vec<Summand> {
    let mut out: Vec<Summand> = free_generators(p)
        .into_iter()
        .map(|(l, d)| Summand::free(l, d, &["du"]))
        .collect();
    if alternative {
        out.push(Summand::trivial("z", 2 * p * p - 4));
        out.push(Summand::trivial("lambda2", 2 * p * p - 1));
    } else {
        out.push(Summand::free(
            theta_label(p - 3, p - 1),
            2 * p * p - 4,
            &["du"],
        ));
    }
    for (b, db, a, da) in trivial_generators(p) {
        out.push(Summand::trivial(b, db));
        out.push(Summand::trivial(a, da));
    }
    out
}

fn gamma(k: u32) -> Monomial {
    Monomial::generator(1, 0, k)
}

/// d^2(gamma_k[du] u^{p-3} b_{j-1}) = gamma_{k-2}[du] a_j for block elements of
/// total degree at most `top`.
fn d2_rules(page: &Page, p: u32, top: u32) -> Result<Vec<DifferentialRule>> {
    let one = page.algebra().one();
    let mut rules = Vec::new();
    for (b, db, a, _) in trivial_generators(p) {
        let bi = page.block_index(&b)?;
        let ai = page.block_index(&a)?;
        let mut k = 2;
        while 4 * k + db <= top {
            let target: PageElement = [(
                PageKey {
                    block: ai,
                    alg: one.clone(),
                    extra: gamma(k - 2),
                },
                1,
            )]
            .into_iter()
            .collect();
            rules.push(DifferentialRule::block(2, bi, gamma(k), target));
            k += 1;
        }
    }
    Ok(rules)
}

fn block_key(page: &Page, label: &str, extra: Monomial) -> Result<PageKey> {
    Ok(PageKey {
        block: page.block_index(label)?,
        alg: page.algebra().one(),
        extra,
    })
}

fn extension_rules(page: &Page, p: u32) -> Result<Vec<ExtensionRule>> {
    let mut out = Vec::new();
    let unit = |l: &str| -> Result<PageKey> {
        let i = page.block_index(l)?;
        block_key(page, l, page.blocks()[i].extra.one())
    };
    let kappa = |j: u32| block_key(page, &theta_label(p - 3, j - 1), gamma(1));
    for j in 1..p {
        out.push(ExtensionRule {
            label: format!("u · [du] {} = b{j}", theta_label(p - 3, j - 1)),
            factors: vec![unit("u")?, kappa(j)?],
            detected_by: unit(&theta_label(0, j))?,
        });
    }
    for j in 1..p {
        let k = p - j;
        if j > k {
            continue;
        }
        out.push(ExtensionRule {
            label: format!(
                "[du] {} · [du] {} = mu2",
                theta_label(p - 3, j - 1),
                theta_label(p - 3, k - 1)
            ),
            factors: vec![kappa(j)?, kappa(k)?],
            detected_by: PageKey {
                block: page.block_index("1")?,
                alg: page.algebra().mono("mu2")?,
                extra: Monomial::one(0),
            },
        });
    }
    Ok(out)
}

fn abutment(page: &Page, f: PrimeField, cap: u32) -> Result<AbutmentSpec> {
    let p = f.p();
    let target = thh_ku_log(f)?;
    let mut algebra_images = BTreeMap::new();
    algebra_images.insert("mu2".to_string(), target.elem(&format!("kappa1^{p}"))?);
    let mut block_images = vec![BTreeMap::new(); page.blocks().len()];
    let mut set = |label: &str, extra: Monomial, img: Element| -> Result<()> {
        block_images[page.block_index(label)?].insert(extra, img);
        Ok(())
    };
    set("1", Monomial::one(0), target.unit())?;
    for i in 0..(p - 3) {
        for j in 0..p {
            set(
                &theta_label(i, j),
                Monomial::one(0),
                target.elem(&format!("u^{} kappa1^{j}", i + 1))?,
            )?;
        }
    }
    set(
        &theta_label(p - 3, p - 1),
        Monomial::one(0),
        target.elem(&format!("u^{} kappa1^{}", p - 2, p - 1))?,
    )?;
    for (j, (b, _, a, _)) in (1..p).zip(trivial_generators(p)) {
        for k in 0..=cap / 4 + 1 {
            let img = match k {
                0 => target.elem(&format!("u^{} kappa1^{}", p - 2, j - 1))?,
                1 => target.elem(&format!("kappa1^{j}"))?,
                _ => Element::zero(),
            };
            set(&b, gamma(k), img)?;
            set(&a, gamma(k), Element::zero())?;
        }
    }
    let filtration_assignment = [("u", 0), ("lambda1", 0), ("dlogu", 0), ("kappa1", 1)]
        .into_iter()
        .map(|(n, s)| (n.to_string(), s))
        .collect();
    Ok(AbutmentSpec {
        target,
        algebra_images,
        block_images,
        filtration_assignment,
    })
}

/// Stated E3 dims: free blocks contribute the coefficients, E([du]) blocks the
/// coefficients in filtrations 0 and 1.
fn stated_e3(f: PrimeField, cap: u32) -> Result<BigradedDims> {
    let p = f.p();
    let common = hilbert_bigraded(&coefficients(f)?, cap);
    let mut out = BigradedDims::new(cap);
    let mut free = free_generators(p);
    free.push((theta_label(p - 3, p - 1), 2 * p * p - 4));
    for (_, d) in free {
        out = out.plus(&common.shifted(0, d));
    }
    for (_, d, _, _) in trivial_generators(p) {
        out = out
            .plus(&common.shifted(0, d))
            .plus(&common.shifted(1, d + 3));
    }
    Ok(out)
}

fn stated_e2(f: PrimeField, cap: u32) -> Result<BigradedDims> {
    let p = f.p();
    let common = coefficients(f)?;
    let plain = hilbert_bigraded(&common, cap);
    let divided = hilbert_bigraded(
        &common.tensor(&alg(
            f,
            vec![GeneratorSpec::divided("[du]", 3).in_filtration(1)],
        )?)?,
        cap,
    );
    let mut out = BigradedDims::new(cap);
    let mut free = free_generators(p);
    free.push((theta_label(p - 3, p - 1), 2 * p * p - 4));
    for (_, d) in free {
        out = out.plus(&plain.shifted(0, d));
    }
    for (_, db, _, da) in trivial_generators(p) {
        out = out
            .plus(&divided.shifted(0, db))
            .plus(&divided.shifted(0, da));
    }
    Ok(out)
}

/// The E(du)-module transcription against E(lambda1) ⊗ Theta_* below 2p^2 - 1.
fn transcription(f: PrimeField, cap: u32) -> Result<Check> {
    let p = f.p();
    let top = cap.min(2 * p * p - 2);
    let l1 = hilbert(
        &alg(f, vec![GeneratorSpec::exterior("lambda1", 2 * p - 1)])?,
        top,
    );
    let mut gens = GradedDims::zeros(top);
    let mut free = free_generators(p);
    free.push((theta_label(p - 3, p - 1), 2 * p * p - 4));
    for (_, d) in free {
        gens.add_at(d, 1);
        gens.add_at(d + 3, 1);
    }
    for (_, db, _, da) in trivial_generators(p) {
        gens.add_at(db, 1);
        gens.add_at(da, 1);
    }
    Ok(Check::dims(
        "E(du)-module summands ⊗ E(lambda1) = E(lambda1) ⊗ Theta_* below degree 2p^2 - 1",
        &thh_ku(f)?.hilbert(top),
        &gens.convolve(&l1),
    ))
}

/// Replays the exclusion of du·z = 0: with z and lambda2 as E(du)-trivial
/// classes and only the d^2 forced below total degree 2p^2 - 1, at least two
/// classes survive in degree 2p^2 - 1, where the abutment has one.
fn alternative(f: PrimeField) -> Result<Check> {
    let p = f.p();
    let name = "du·z = 0 alternative leaves >= 2 classes in degree 2p^2 - 1 against abutment dim 1 (expected contradiction)";
    let n = 2 * p * p - 1;
    let cap = n + 1;
    let page = tor_exterior_module(&du(), module_summands(p, true), &coefficients(f)?)?
        .with_index(2)
        .with_cap(cap);
    let rules = d2_rules(&page, p, n)?;
    let e3 = run_differential(&page, &rules)?;
    let dims = e3.total_dims();
    let mut sources = 0;
    for &(s, t) in e3.cells().keys() {
        if s + t != cap || s < 2 {
            continue;
        }
        for v in e3.representatives(s, t) {
            let e = e3.element_from_coords(s, t, &v);
            if e.keys().any(|k| k.alg.is_one()) {
                sources += 1;
            }
        }
    }
    let bound = dims.get(n).saturating_sub(sources + dims.get(n - 1));
    let abut = hilbert(&thh_ku_log(f)?, n).get(n);
    let m = (p - 1) / 2;
    Ok(Check::new(name, bound >= 2 && abut == 1 && bound > abut)
        .witness(format!(
            "E3 in degree {n}: {} classes (m + 2 = {})",
            dims.get(n),
            m + 2
        ))
        .witness(format!(
            "possible sources in degree {cap}, s >= 2, not lambda1/dlogu multiples: {sources} (m = {m})"
        ))
        .witness(format!("E3 in degree {}: {}", n - 1, dims.get(n - 1)))
        .witness(format!("survivors >= {bound}, abutment dim {abut}")))
}

pub(super) fn thh_ku_ss(f: PrimeField, cap: u32) -> Vec<Check> {
    attempt_many("thh-ku-ss setup", || {
        let p = f.p();
        let mut out = Vec::new();
        let coeff = coefficients(f)?;
        let summands = module_summands(p, false);
        let e2 = tor_exterior_module(&du(), summands.clone(), &coeff)?;
        let closed = e2.e2_dims(cap);
        out.push(Check::bigraded(
            "E2 = E(lambda1, dlogu) ⊗ P(mu2) ⊗ (free part ⊕ Γ([du]){u^{p-3} b_{j-1}, a_j})",
            &stated_e2(f, cap)?,
            &closed,
        ));
        out.push(attempt("E2: closed form = resolution oracle", || {
            let ground = alg(f, vec![du()])?;
            let module = ModuleSpec::with_summands(coeff.clone(), summands)?;
            Ok(Check::bigraded(
                "E2: closed form = resolution oracle",
                &tor_oracle(&ground, &module, &ModuleSpec::ground(f), cap)?,
                &closed,
            ))
        }));
        out.push(attempt("transcription", || transcription(f, cap)));

        let page = e2.with_index(2).with_cap(cap);
        let rules = d2_rules(&page, p, cap + 1)?;
        let e3 = match run_differential(&page, &rules) {
            Ok(e) => e,
            Err(e) => {
                out.push(Check::error("d^2 page turn", &e));
                return Ok(out);
            }
        };
        out.push(Check::bigraded(
            "E3 = E(lambda1, dlogu) ⊗ P(mu2) ⊗ (free part ⊕ E([du]){u^{p-3} b_{j-1}})",
            &stated_e3(f, cap)?,
            &e3.dims(),
        ));
        let spec = abutment(&e3, f, cap)?;
        let exts = extension_rules(&e3, p)?;
        out.extend(abutment_checks(
            "P_{p-1}(u) ⊗ E(lambda1, dlogu) ⊗ P(kappa1) (so E3 = E∞)",
            &compare_abutment(&e3, &spec, &exts)?,
        ));
        out.push(attempt("du·z = 0 alternative", || alternative(f)));
        Ok(out)
    })
}
