use std::collections::BTreeMap;

use super::{attempt, attempt_many, Check, Status};
use crate::error::Result;
use crate::field::PrimeField;
use crate::graded_algebra::{
    check_morphism, hilbert, hilbert_bigraded, AlgebraMap, AlgebraSpec, Derivation, Element,
    GeneratorSpec, Monomial,
};
use crate::les_checker::{thh_ell, thh_ell_log as ell_log_answer, thh_ku_log, thh_z};
use crate::spectral_sequence::{
    compare_abutment, run_differential, verify_rule_family, AbutmentReport, AbutmentSpec,
    DifferentialRule, ExtensionRule, FamilyMember, Page,
};
use crate::tor_engine::{
    check_chain_map, induced_ranks, tor_closed_form, tor_oracle, DgAlgebra, ModuleSpec, Summand,
};

pub(super) fn alg(f: PrimeField, gens: Vec<GeneratorSpec>) -> Result<AlgebraSpec> {
    AlgebraSpec::new(f, gens)
}

/// P(v) ⊗ E(dv).
fn v_dv(f: PrimeField) -> Result<AlgebraSpec> {
    let p = f.p();
    alg(
        f,
        vec![
            GeneratorSpec::polynomial("v", 2 * p - 2),
            GeneratorSpec::exterior("dv", 2 * p - 1),
        ],
    )
}

fn tate_v(p: u32) -> GeneratorSpec {
    GeneratorSpec::exterior("[v]", 2 * p - 2).in_filtration(1)
}

fn gamma_dv(p: u32) -> GeneratorSpec {
    GeneratorSpec::divided("[dv]", 2 * p - 1).in_filtration(1)
}

/// d^p(gamma_{p^i}[dv]) = lambda2 gamma_{p^i - p}[dv] for every level in range.
pub(super) fn dv_rules(a: &AlgebraSpec, p: u32, cap: u32) -> Result<Vec<DifferentialRule>> {
    let mut rules = Vec::new();
    let mut level = 1;
    while p.pow(level) * 2 * p <= cap + 1 {
        let target = a.elem(&format!("lambda2 [dv]^{}", p.pow(level) - p))?;
        rules.push(DifferentialRule::generator(p, "[dv]", level, target));
        level += 1;
    }
    Ok(rules)
}

/// Checks d^p(gamma_k[dv]) against lambda2 gamma_{k-p}[dv] for k <= cap/(2p).
pub(super) fn dv_family(page: &Page, rules: &[DifferentialRule], p: u32, cap: u32) -> Check {
    let name = "d^p(γ_k[dv]) = unit · lambda2 γ_{k-p}[dv] for p <= k <= cap/(2p)";
    attempt(name, || {
        let kmax = cap / (2 * p);
        let mut members = Vec::new();
        for k in 0..=kmax {
            members.push(FamilyMember {
                k,
                source: page.alg_key(&format!("[dv]^{k}"))?,
                expected: if k >= p {
                    Some(page.alg_key(&format!("lambda2 [dv]^{}", k - p))?)
                } else {
                    None
                },
            });
        }
        let c = match verify_rule_family(page, rules, &members) {
            Ok(rep) => {
                let scalars: Vec<String> = rep
                    .scalars
                    .iter()
                    .filter(|(k, _)| *k >= p)
                    .map(|(k, c)| format!("{k}:{c}"))
                    .collect();
                let mut c = Check::new(name, true);
                if scalars.is_empty() {
                    c = c.witness(format!("no k in [{p}, {kmax}]"));
                } else {
                    c = c.witness(format!("scalars k:c = {}", scalars.join(" ")));
                }
                c
            }
            Err(e) => Check::error(name, &e),
        };
        Ok(c)
    })
}

/// Turns an abutment comparison into report checks.
pub(super) fn abutment_checks(target_name: &str, rep: &AbutmentReport) -> Vec<Check> {
    let mut out = Vec::new();
    let mut dims = Check::new(
        format!("E∞ total dims = {target_name}"),
        rep.first_mismatch.is_none(),
    );
    dims.degrees = rep.dims.clone();
    if let Some(n) = rep.first_mismatch {
        dims = dims.witness(format!("first mismatch in degree {n}"));
    }
    if rep.possible_differentials > 0 {
        dims = dims.witness(format!(
            "{} degree-compatible pairs of nonzero E∞ cells remain (permanence is by comparison)",
            rep.possible_differentials
        ));
    }
    out.push(dims);
    let mut repr = Check::new(
        "E∞ representatives form a basis of the abutment",
        rep.representation_failures.is_empty(),
    );
    if !rep.representation_failures.is_empty() {
        repr = repr.witness(format!("failing degrees {:?}", rep.representation_failures));
    }
    out.push(repr);
    for e in &rep.extensions {
        out.push(Check::new(format!("extension {}", e.name), e.passed).witness(e.detail.clone()));
    }
    for e in &rep.filtrations {
        out.push(Check::new(e.name.clone(), e.passed).witness(e.detail.clone()));
    }
    out
}

fn dv_power_extension(page: &Page, p: u32) -> Result<ExtensionRule> {
    Ok(ExtensionRule {
        label: "[dv]^p = mu2".into(),
        factors: vec![page.alg_key("[dv]")?; p as usize],
        detected_by: page.alg_key("mu2")?,
    })
}

pub(super) fn thhz(f: PrimeField, cap: u32) -> Vec<Check> {
    attempt_many("thhz setup", || {
        let p = f.p();
        let mut out = Vec::new();
        let a = v_dv(f)?;
        let left = ModuleSpec::trivial(thh_ell(f)?);
        let right = ModuleSpec::ground(f);
        let e2 = tor_closed_form(&a, &left, &right)?;
        let closed = e2.e2_dims(cap);
        out.push(attempt("E2: closed form = resolution oracle", || {
            Ok(Check::bigraded(
                "E2: closed form = resolution oracle",
                &tor_oracle(&a, &left, &right, cap)?,
                &closed,
            ))
        }));
        let stated = thh_ell(f)?.tensor(&alg(f, vec![tate_v(p), gamma_dv(p)])?)?;
        out.push(Check::bigraded(
            "E2 = E(lambda1, lambda2) ⊗ P(mu2) ⊗ E([v]) ⊗ Γ([dv])",
            &hilbert_bigraded(&stated, cap),
            &closed,
        ));

        let page = e2.with_index(p).with_cap(cap);
        let rules = dv_rules(page.algebra(), p, cap)?;
        out.push(dv_family(&page, &rules, p, cap));
        let einfty = match run_differential(&page, &rules) {
            Ok(e) => e,
            Err(e) => {
                out.push(Check::error("d^p page turn", &e));
                return Ok(out);
            }
        };
        let stated_inf = alg(
            f,
            vec![
                GeneratorSpec::exterior("lambda1", 2 * p - 1),
                GeneratorSpec::polynomial("mu2", 2 * p * p),
                tate_v(p),
                GeneratorSpec::truncated("[dv]", 2 * p - 1, p).in_filtration(1),
            ],
        )?;
        out.push(Check::bigraded(
            "E^{p+1} = E(lambda1) ⊗ P(mu2) ⊗ E([v]) ⊗ P_p([dv])",
            &hilbert_bigraded(&stated_inf, cap),
            &einfty.dims(),
        ));
        let spec = AbutmentSpec::for_algebra(
            &einfty,
            thh_z(f)?,
            &[
                ("[v]", "epsilon1"),
                ("[dv]", "mu1"),
                ("mu2", &format!("mu1^{p}")),
                ("lambda2", "0"),
            ],
            &[("epsilon1", 1), ("lambda1", 0), ("mu1", 1)],
        )?;
        let ext = dv_power_extension(&einfty, p)?;
        out.extend(abutment_checks(
            "E(epsilon1, lambda1) ⊗ P(mu1)",
            &compare_abutment(&einfty, &spec, &[ext])?,
        ));
        Ok(out)
    })
}

/// Homology of the DG model L ⊗ E([v]) ⊗ Γ([dv]) ⊗ N with d[v] = v·1 and
/// d gamma_{p^i}[dv] = gamma_{p^i - 1}[dv] · (dv acting on N).
fn ell_model(f: PrimeField, n: Vec<GeneratorSpec>, dv_acts: &str, cap: u32) -> Result<DgAlgebra> {
    let p = f.p();
    let mut gens = thh_ell(f)?.generators().to_vec();
    gens.push(tate_v(p));
    gens.push(gamma_dv(p));
    gens.extend(n);
    let spec = alg(f, gens)?;
    let mut d = Derivation::new(-1);
    if spec.has_generator("v") {
        d.set(&spec, "[v]", spec.gen("v")?)?;
    }
    let action = spec.elem(dv_acts)?;
    if !action.is_zero() {
        let i = spec.index_of("[dv]")?;
        let mut level = 0;
        while p.pow(level) * 2 * p <= cap + 1 {
            let lower =
                Element::monomial(Monomial::generator(spec.ngens(), i, p.pow(level) - 1), 1);
            d.set_level(&spec, "[dv]", level, spec.multiply(&lower, &action)?)?;
            level += 1;
        }
    }
    DgAlgebra::new(spec, d)
}

fn injectivity_check(
    name: &str,
    src: &DgAlgebra,
    tgt: &DgAlgebra,
    map: &AlgebraMap,
    cap: u32,
) -> Result<Check> {
    if !check_chain_map(src, tgt, map)? {
        return Ok(Check::new(name, false).witness("not a chain map"));
    }
    let hs = src.homology(cap)?;
    let ht = tgt.homology(cap)?;
    let ranks = induced_ranks(src, &hs, tgt, &ht, map)?;
    let mut dims = crate::graded_algebra::GradedDims::zeros(cap);
    let mut rks = crate::graded_algebra::GradedDims::zeros(cap);
    let mut bad = None;
    for (&(s, t), &(d, r)) in &ranks {
        dims.add_at(s + t, d);
        rks.add_at(s + t, r);
        if r != d && bad.is_none() {
            bad = Some((s, t));
        }
    }
    let mut c = Check::dims(name, &dims, &rks);
    if let Some((s, t)) = bad {
        c.status = Status::Fail;
        c = c.witness(format!("kernel at (s, t) = ({s}, {t})"));
    }
    Ok(c)
}

pub(super) fn thh_ell_log(f: PrimeField, cap: u32) -> Vec<Check> {
    attempt_many("thh-ell-log setup", || {
        let p = f.p();
        let mut out = Vec::new();
        let l = thh_ell(f)?;
        let dlog = alg(f, vec![GeneratorSpec::exterior("dlogv", 1)])?;
        let e_dv = alg(f, vec![GeneratorSpec::exterior("dv", 2 * p - 1)])?;
        let vdv = v_dv(f)?;
        let lm = ModuleSpec::trivial(l.clone());
        let nm = ModuleSpec::trivial(dlog.clone());
        let gm = ModuleSpec::ground(f);

        // the three E2 terms
        let terms: [(&str, &AlgebraSpec, &ModuleSpec, Vec<GeneratorSpec>); 3] = [
            (
                "left E2 = Tor^{E(dv)}(L, E(dlogv)) = L ⊗ E(dlogv) ⊗ Γ([dv])",
                &e_dv,
                &nm,
                vec![GeneratorSpec::exterior("dlogv", 1), gamma_dv(p)],
            ),
            (
                "middle E2 = Tor^{P(v) ⊗ E(dv)}(L, E(dlogv)) = L ⊗ E(dlogv) ⊗ E([v]) ⊗ Γ([dv])",
                &vdv,
                &nm,
                vec![GeneratorSpec::exterior("dlogv", 1), tate_v(p), gamma_dv(p)],
            ),
            (
                "right E2 = Tor^{P(v) ⊗ E(dv)}(L, F_p) = L ⊗ E([v]) ⊗ Γ([dv])",
                &vdv,
                &gm,
                vec![tate_v(p), gamma_dv(p)],
            ),
        ];
        let mut pages = Vec::new();
        for (name, ground, module, extra) in terms {
            let page = tor_closed_form(ground, &lm, module)?;
            let closed = page.e2_dims(cap);
            let stated = hilbert_bigraded(&l.tensor(&alg(f, extra)?)?, cap);
            let mut c = Check::bigraded(name, &stated, &closed);
            let oracle = tor_oracle(ground, &lm, module, cap)?;
            if oracle != closed {
                c.status = Status::Fail;
                c = c.witness("closed form disagrees with the resolution oracle");
            } else {
                c = c.witness("closed form = resolution oracle");
            }
            out.push(c);
            pages.push(page);
        }

        // comparison maps on DG models
        let m1 = ell_model(
            f,
            vec![
                GeneratorSpec::polynomial("v", 2 * p - 2),
                GeneratorSpec::exterior("dlogv", 1),
            ],
            "v dlogv",
            cap,
        )?;
        let m2 = ell_model(f, vec![GeneratorSpec::exterior("dlogv", 1)], "0", cap)?;
        let m3 = ell_model(f, vec![], "0", cap)?;
        out.push(attempt("left model homology = left E2", || {
            Ok(Check::bigraded(
                "left model homology = left E2",
                &pages[0].e2_dims(cap),
                &m1.homology(cap)?.dims(),
            ))
        }));
        out.push(attempt("left comparison map is injective", || {
            let map = AlgebraMap::from_text(&m1.spec, &m2.spec, &[("v", "0")])?;
            injectivity_check("left comparison map is injective", &m1, &m2, &map, cap)
        }));
        out.push(attempt("right comparison map is injective", || {
            let map = AlgebraMap::from_text(&m3.spec, &m2.spec, &[])?;
            injectivity_check("right comparison map is injective", &m3, &m2, &map, cap)
        }));

        // differentials: right (thhz), middle and left pages
        let mut left_page = None;
        for (i, label) in [(2usize, "right"), (1, "middle"), (0, "left")] {
            let page = pages[i].clone().with_index(p).with_cap(cap);
            let rules = dv_rules(page.algebra(), p, cap)?;
            let mut c = dv_family(&page, &rules, p, cap);
            c.name = format!("{label}: {}", c.name);
            out.push(c);
            if i == 0 {
                left_page = Some((page, rules));
            }
        }
        let (page, rules) = left_page.expect("left page");
        let einfty = match run_differential(&page, &rules) {
            Ok(e) => e,
            Err(e) => {
                out.push(Check::error("d^p page turn", &e));
                return Ok(out);
            }
        };
        let stated_inf = alg(
            f,
            vec![
                GeneratorSpec::exterior("lambda1", 2 * p - 1),
                GeneratorSpec::polynomial("mu2", 2 * p * p),
                GeneratorSpec::exterior("dlogv", 1),
                GeneratorSpec::truncated("[dv]", 2 * p - 1, p).in_filtration(1),
            ],
        )?;
        out.push(Check::bigraded(
            "E^{p+1} = E(lambda1) ⊗ P(mu2) ⊗ E(dlogv) ⊗ P_p([dv])",
            &hilbert_bigraded(&stated_inf, cap),
            &einfty.dims(),
        ));
        let spec = AbutmentSpec::for_algebra(
            &einfty,
            ell_log_answer(f, "dlogv")?,
            &[
                ("[dv]", "kappa1"),
                ("mu2", &format!("kappa1^{p}")),
                ("lambda2", "0"),
            ],
            &[("lambda1", 0), ("dlogv", 0), ("kappa1", 1)],
        )?;
        let ext = dv_power_extension(&einfty, p)?;
        out.extend(abutment_checks(
            "E(lambda1, dlogv) ⊗ P(kappa1)",
            &compare_abutment(&einfty, &spec, &[ext])?,
        ));
        Ok(out)
    })
}

pub(super) fn thh_ku_basechange(f: PrimeField, cap: u32) -> Vec<Check> {
    attempt_many("thh-ku-basechange setup", || {
        let p = f.p();
        let mut out = Vec::new();
        let pv = alg(f, vec![GeneratorSpec::polynomial("v", 2 * p - 2)])?;
        let b_ell = ell_log_answer(f, "dlogv")?;
        // pi_* ku = P(u) is free over P(v) on u^i, 0 <= i < p-1
        let ku = ModuleSpec::with_summands(
            AlgebraSpec::ground(f),
            (0..p - 1)
                .map(|i| Summand::free(format!("u^{i}"), 2 * i, &["v"]))
                .collect(),
        )?;
        let b = ModuleSpec::trivial(b_ell.clone());
        let page = tor_closed_form(&pv, &ku, &b)?;
        let closed = page.e2_dims(cap);
        let oracle = tor_oracle(&pv, &ku, &b, cap)?;
        out.push(Check::bigraded(
            "E2 = Tor^{P(v)}(P(u), B): closed form = resolution oracle",
            &oracle,
            &closed,
        ));
        let high: Vec<(u32, u32)> = closed
            .entries()
            .filter(|((s, _), d)| *s > 0 && *d > 0)
            .map(|(k, _)| k)
            .collect();
        let mut c = Check::new(
            "E2 is concentrated in filtration 0 (collapse)",
            high.is_empty(),
        );
        if let Some((s, t)) = high.first() {
            c = c.witness(format!("class in bidegree ({s}, {t})"));
        }
        out.push(c);

        let pu = alg(f, vec![GeneratorSpec::truncated("u", 2, p - 1)])?;
        let lhs = hilbert(&pu, cap).convolve(&hilbert(&b_ell, cap));
        let answer = thh_ku_log(f)?;
        out.push(Check::dims(
            "hilbert(P_{p-1}(u)) * hilbert(E(lambda1, dlogv) ⊗ P(kappa1)) = hilbert(P_{p-1}(u) ⊗ E(lambda1, dlogu) ⊗ P(kappa1))",
            &hilbert(&answer, cap),
            &lhs,
        ));
        out.push(Check::dims(
            "E2 total dims = P_{p-1}(u) ⊗ E(lambda1, dlogu) ⊗ P(kappa1)",
            &hilbert(&answer, cap),
            &closed.total(),
        ));

        let source = pu.tensor(&b_ell)?;
        let mut images = BTreeMap::new();
        images.insert("dlogv".to_string(), answer.elem("-dlogu")?);
        let rep = check_morphism(&source, &answer, &images, cap)?;
        let mut c = Check::new(
            "dlogv -> -dlogu is an algebra isomorphism",
            rep.is_isomorphism(),
        );
        c.degrees = rep
            .degrees
            .iter()
            .map(|d| crate::spectral_sequence::DegreeRow {
                n: d.n,
                expected: d.target_dim,
                actual: d.rank,
            })
            .collect();
        for r in &rep.relation_failures {
            c = c.witness(format!("relation {} fails: {}", r.label, r.residual));
        }
        if !rep.kernel_degrees().is_empty() {
            c = c.witness(format!("kernel in degrees {:?}", rep.kernel_degrees()));
        }
        out.push(c);
        Ok(out)
    })
}
