use sseqbench::graded_algebra::GeneratorSpec;
use sseqbench::scenarios::file::{GeneratorRecord, ScenarioFile};
use sseqbench::scenarios::{emit_report, run_scenario, scenario_names, Format, Report, Status};
use sseqbench::Error;

const THHZ: &str = include_str!("../data/thhz.toml");

fn default_cap(p: u32) -> u32 {
    2 * p * p + 4 * p
}

#[test]
fn every_scenario_passes_at_default_cap() {
    for p in [3, 5] {
        for name in scenario_names() {
            let r = run_scenario(name, p, default_cap(p)).unwrap();
            assert!(r.warnings.is_empty(), "{name} p={p}: {:?}", r.warnings);
            assert!(!r.checks.is_empty(), "{name} p={p} ran no checks");
            for c in &r.checks {
                assert_ne!(
                    c.status,
                    Status::Fail,
                    "{name} p={p}: {} {:?}",
                    c.name,
                    c.witnesses
                );
            }
        }
    }
}

#[test]
fn small_cap_warns() {
    let r = run_scenario("thhz", 3, 4).unwrap();
    assert_eq!(r.warnings.len(), 1);
    assert!(r.warnings[0].starts_with("CapTooSmall"));
    assert!(r.checks.iter().all(|c| c.status != Status::Pass));
    let json: serde_json::Value = serde_json::from_slice(&emit_report(&r, Format::Json)).unwrap();
    assert!(json["warnings"][0]
        .as_str()
        .unwrap()
        .contains("CapTooSmall"));
}

#[test]
fn unknown_scenario_is_an_error() {
    assert!(matches!(
        run_scenario("thh-moon", 3, 30),
        Err(Error::UnknownScenario(_))
    ));
}

#[test]
fn json_is_deterministic() {
    for name in ["thhz", "thh-ku-ss", "suspension"] {
        let a = emit_report(&run_scenario(name, 5, 70).unwrap(), Format::Json);
        let b = emit_report(&run_scenario(name, 5, 70).unwrap(), Format::Json);
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn json_schema() {
    let r = run_scenario("thhz", 3, 30).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&emit_report(&r, Format::Json)).unwrap();
    assert_eq!(v["scenario"], "thhz");
    assert_eq!(v["prime"], 3);
    assert_eq!(v["cap"], 30);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["name"].is_string());
        assert!(["pass", "fail", "conditional"].contains(&c["status"].as_str().unwrap()));
        assert!(c["witnesses"].is_array());
        for d in c["degrees"].as_array().unwrap() {
            assert!(d["n"].is_u64() && d["expected"].is_u64() && d["actual"].is_u64());
        }
    }
}

#[test]
fn empty_report_document() {
    let text = emit_report(&Report::empty("none", 3, 0), Format::Json);
    let v: serde_json::Value = serde_json::from_slice(&text).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn thhz_file_matches_builtin() {
    let file = ScenarioFile::parse(THHZ).unwrap();
    let r = file.run(None, None).unwrap();
    assert!(r.warnings.is_empty());
    assert!(r.checks.len() >= 5);
    assert!(r.checks.iter().all(|c| c.status == Status::Pass), "{r:?}");
    let again = ScenarioFile::parse(&file.to_toml()).unwrap();
    assert_eq!(
        emit_report(&again.run(None, Some(40)).unwrap(), Format::Json),
        emit_report(&file.run(None, Some(40)).unwrap(), Format::Json)
    );
}

#[test]
fn wrong_abutment_fails_at_first_mismatch() {
    let mut file = ScenarioFile::parse(THHZ).unwrap();
    // an extra exterior class in degree 9 that nothing on E∞ can hit
    let extra = GeneratorSpec::exterior("x9", 9);
    file.abutment
        .as_mut()
        .unwrap()
        .generators
        .push(GeneratorRecord::from_spec(&extra));
    let r = file.run(None, None).unwrap();
    assert!(r.failed());
    let c = r.checks.iter().find(|c| c.status == Status::Fail).unwrap();
    assert!(c.name.starts_with("E∞ total dims"), "{}", c.name);
    let first = c.degrees.iter().find(|d| d.expected != d.actual).unwrap();
    assert_eq!(first.n, 9);
    assert!(c
        .witnesses
        .iter()
        .any(|w| w == "first mismatch in degree 9"));
    let json: serde_json::Value = serde_json::from_slice(&emit_report(&r, Format::Json)).unwrap();
    assert!(json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["status"] == "fail"));
}

#[test]
fn wrong_differential_is_reported() {
    let mut file = ScenarioFile::parse(THHZ).unwrap();
    file.differentials[0].target = "lambda1".into();
    let r = file.run(None, None).unwrap();
    assert!(r.failed());
    assert!(r.checks[0].witnesses[0].starts_with("error:"));
}

#[test]
fn bad_file_is_a_parse_error() {
    assert!(matches!(
        ScenarioFile::parse("name = 3"),
        Err(Error::Parse(_))
    ));
    let extra = THHZ.replace("first_page = 3", "first_page = 3\ncolour = \"red\"");
    assert!(matches!(ScenarioFile::parse(&extra), Err(Error::Parse(_))));
}
