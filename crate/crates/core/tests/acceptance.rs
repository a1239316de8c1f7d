//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//! Runs without the libtest harness so the lines are printed even on success.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use sseqbench::graded_algebra::{AlgebraSpec, Element, GeneratorSpec, GradedAlgebra, Monomial};
use sseqbench::presentation::make_theta;
use sseqbench::scenarios::{run_scenario, Report, Status};
use sseqbench::spectral_sequence::{run_differential, Differential, DifferentialRule, Page};
use sseqbench::PrimeField;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cap(p: u32) -> u32 {
    2 * p * p + 4 * p
}

fn run(name: &str, p: u32) -> std::result::Result<Report, String> {
    let r = run_scenario(name, p, cap(p)).map_err(|e| e.to_string())?;
    if !r.warnings.is_empty() {
        return Err(format!(
            "{name} p={p}: unexpected warnings {:?}",
            r.warnings
        ));
    }
    Ok(r)
}

/// The checks whose names start with `prefix` all have `status`; at least `min` of them.
fn expect(r: &Report, prefix: &str, status: Status, min: usize) -> std::result::Result<(), String> {
    let hits: Vec<_> = r
        .checks
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .collect();
    if hits.len() < min {
        return Err(format!(
            "{} p={}: {} checks named {prefix:?}, need {min}",
            r.scenario,
            r.prime,
            hits.len()
        ));
    }
    for c in hits {
        if c.status != status {
            return Err(format!(
                "{} p={}: {:?} is {:?}: {:?}",
                r.scenario, r.prime, c.name, c.status, c.witnesses
            ));
        }
    }
    Ok(())
}

fn all_pass(r: &Report) -> std::result::Result<(), String> {
    match r.checks.iter().find(|c| c.status == Status::Fail) {
        Some(c) => Err(format!(
            "{} p={}: {:?} failed: {:?}",
            r.scenario, r.prime, c.name, c.witnesses
        )),
        None => Ok(()),
    }
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for p in [3, 5] {
        let t = Instant::now();
        let r = run("thhz", p)?;
        let dt = t.elapsed();
        all_pass(&r)?;
        expect(&r, "E2: closed form = resolution oracle", Status::Pass, 1)?;
        expect(&r, "d^p(γ_k[dv])", Status::Pass, 1)?;
        expect(&r, "E∞ total dims", Status::Pass, 1)?;
        if dt > Duration::from_secs(10) {
            return Err(format!("thhz p={p} took {dt:?}"));
        }
        notes.push(format!("p={p} {:.2}s", dt.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn criterion_2() -> Outcome {
    for p in [3, 5] {
        let r = run("thh-ell-log", p)?;
        all_pass(&r)?;
        expect(&r, "left comparison map is injective", Status::Pass, 1)?;
        expect(&r, "right comparison map is injective", Status::Pass, 1)?;
        expect(&r, "E∞ total dims", Status::Pass, 1)?;
        expect(&r, "extension [dv]^p = mu2", Status::Pass, 1)?;
    }
    Ok("p=3,5".into())
}

fn criterion_3() -> Outcome {
    for p in [3, 5] {
        let r = run("thh-ku-basechange", p)?;
        all_pass(&r)?;
        expect(&r, "hilbert(P_{p-1}(u)) * hilbert", Status::Pass, 1)?;
        expect(
            &r,
            "dlogv -> -dlogu is an algebra isomorphism",
            Status::Pass,
            1,
        )?;
    }
    Ok("p=3,5".into())
}

fn criterion_4() -> Outcome {
    for p in [3, 5] {
        let r = run("thh-ku-ss", p)?;
        all_pass(&r)?;
        expect(&r, "E2 = E(lambda1, dlogu)", Status::Pass, 1)?;
        expect(&r, "E3 =", Status::Pass, 1)?;
        expect(&r, "E∞ total dims", Status::Pass, 1)?;
        expect(&r, "extension u · [du]", Status::Pass, (p - 1) as usize)?;
        expect(&r, "extension [du]", Status::Pass, 1)?;
        expect(&r, "du·z = 0 alternative", Status::Pass, 1)?;
    }
    Ok("p=3,5; du·z = 0 alternative contradicted".into())
}

fn criterion_5() -> Outcome {
    let r3 = run("ausoni", 3)?;
    all_pass(&r3)?;
    expect(
        &r3,
        "hilbert(E(lambda1) ⊗ Theta_*) = hilbert(ker",
        Status::Pass,
        1,
    )?;
    expect(
        &r3,
        "theta-bar lifts multiplicatively",
        Status::Conditional,
        1,
    )?;
    let r5 = run("ausoni", 5)?;
    all_pass(&r5)?;
    expect(
        &r5,
        "hilbert(E(lambda1) ⊗ Theta_*) = hilbert(ker",
        Status::Pass,
        1,
    )?;
    Ok("p=3 lift conditional".into())
}

fn criterion_6() -> Outcome {
    for p in [3, 5] {
        for name in ["les-ell", "les-ku"] {
            let r = run(name, p)?;
            all_pass(&r)?;
            expect(&r, "exact at all three joints", Status::Pass, 2)?;
        }
    }
    Ok("ell and ku, p=3,5, two coefficients".into())
}

fn criterion_7() -> Outcome {
    for p in [3, 5] {
        let r = run("suspension", p)?;
        all_pass(&r)?;
        expect(&r, "sigma is a derivation on", Status::Pass, 4)?;
        expect(&r, "sigma(b_j) = (1 + j) a_j", Status::Pass, 1)?;
        expect(&r, "every single-value mutation", Status::Pass, 1)?;
    }
    Ok("p=3,5".into())
}

/// E(lambda) ⊗ P(mu) ⊗ Γ([y]) ⊗ inert extras with d^p(γ_{p^i}) = c · lambda γ_{p^i - p}.
fn random_page(
    p: u32,
    half: u32,
    mu: u32,
    c: u32,
    extras: u32,
    cap: u32,
) -> (Page, Vec<DifferentialRule>) {
    let f = PrimeField::new(p).unwrap();
    let m = 2 * half + 1;
    let mut gens = vec![
        GeneratorSpec::exterior("lambda", p * m + p - 1),
        GeneratorSpec::polynomial("mu", 2 * mu),
        GeneratorSpec::divided("[y]", m).in_filtration(1),
    ];
    if extras & 1 == 1 {
        gens.push(GeneratorSpec::exterior("e", 2 * mu + 1));
    }
    if extras & 2 == 2 {
        gens.push(GeneratorSpec::truncated("w", 3, p).in_filtration(1));
    }
    let a = AlgebraSpec::new(f, gens).unwrap();
    let mut rules = Vec::new();
    let mut level = 1;
    while p.pow(level) * (m + 1) <= cap + 1 {
        let t = a
            .elem(&format!("lambda [y]^{}", p.pow(level) - p))
            .unwrap()
            .scale(&f, c);
        rules.push(DifferentialRule::generator(p, "[y]", level, t));
        level += 1;
    }
    (Page::from_algebra(a).with_index(p).with_cap(cap), rules)
}

fn proptest_run<S: Strategy>(
    cases: u32,
    strategy: S,
    body: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>,
) -> std::result::Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, body).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    for p in [3, 5] {
        let r = run_scenario("tor-oracle", p, 30).map_err(|e| e.to_string())?;
        all_pass(&r)?;
    }

    proptest_run(
        24,
        (
            prop_oneof![Just(3u32), Just(5u32)],
            0u32..3,
            1u32..6,
            1u32..5,
            0u32..4,
            10u32..40,
        ),
        |(p, half, mu, c, extras, cap)| {
            let c = c % p;
            let c = if c == 0 { 1 } else { c };
            let (page, rules) = random_page(p, half, mu, c, extras, cap);
            let d =
                Differential::new(&page, &rules).map_err(|e| TestCaseError::fail(e.to_string()))?;
            d.check_relations()
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            for keys in page.basis_upto(cap).values() {
                for k in keys {
                    d.check_leibniz(&k.alg)
                        .map_err(|e| TestCaseError::fail(e.to_string()))?;
                    let dd = d
                        .apply(
                            &d.apply_key(k)
                                .map_err(|e| TestCaseError::fail(e.to_string()))?,
                        )
                        .map_err(|e| TestCaseError::fail(e.to_string()))?;
                    prop_assert!(
                        dd.values().all(|&v| v == 0),
                        "d d {} != 0",
                        page.format_key(k)
                    );
                }
            }
            run_differential(&page, &rules).map_err(|e| TestCaseError::fail(e.to_string()))?;
            Ok(())
        },
    )?;

    proptest_run(
        32,
        (prop_oneof![Just(3u32), Just(5u32)], 1u32..5, 0u32..120),
        |(p, half, cap)| {
            let f = PrimeField::new(p).unwrap();
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
            Ok(())
        },
    )?;

    let thetas = [3u32, 5].map(|p| make_theta(PrimeField::new(p).unwrap()).unwrap());
    proptest_run(
        32,
        (
            0usize..2,
            any::<u64>(),
            0u32..60,
            prop::collection::vec((0usize..1000, 1u32..5), 1..5),
        ),
        |(which, seed, n, picks)| {
            let t = &thetas[which];
            let f = *t.spec().field();
            let raw: Vec<Monomial> = t.spec().basis(n);
            let mut e = Element::zero();
            if !raw.is_empty() {
                for &(i, c) in &picks {
                    e.add_term(&f, raw[i % raw.len()].clone(), c);
                }
            }
            let once = t
                .normal_form(e.clone())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(once.terms().all(|(m, _)| t.is_normal(m)));
            prop_assert_eq!(&t.normal_form(once.clone()).unwrap(), &once);

            let mut order: Vec<usize> = (0..t.rules().len()).collect();
            let mut state = seed | 1;
            for i in (1..order.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                order.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let shuffled = t.reordered(&order);
            prop_assert_eq!(shuffled.normal_form(e).unwrap(), once);
            prop_assert_eq!(shuffled.hilbert(n), t.hilbert(n));
            Ok(())
        },
    )?;

    let dt = start.elapsed();
    if dt > Duration::from_secs(60) {
        return Err(format!("property suites took {dt:?}"));
    }
    Ok(format!("{:.2}s", dt.as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 thhz: E2 oracle, d^p family, abutment", criterion_1),
        (
            "2 thh-ell-log: injective comparisons, abutment",
            criterion_2,
        ),
        ("3 thh-ku base change: convolution, dlog iso", criterion_3),
        (
            "4 thh-ku spectral sequence: E2, d2, E3 = E∞, du·z",
            criterion_4,
        ),
        ("5 ausoni: ker + im, conditional lift at p=3", criterion_5),
        ("6 long exact sequences", criterion_6),
        ("7 suspension: derivations and mutations", criterion_7),
        ("8 property suites", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(note) => println!("PASS  criterion {name}  ({note})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
