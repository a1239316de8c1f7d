//! User scenarios as TOML: a first page given by its generators, generator
//! differentials, an optional stated stable page, and an abutment with
//! representation, filtrations and multiplicative extensions.
//!
//! ```toml
//! name = "thhz"
//! prime = 3
//! cap = 54
//! first_page = 3
//! page = [ { name = "lambda1", degree = 5, kind = "exterior" }, ... ]
//! [[differentials]]
//! r = 3
//! source = "[dv]"
//! level = 1
//! target = "lambda2 [dv]^0"
//! ```
//!
//! See `data/thhz.toml` for a full example.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::thh::abutment_checks;
use super::{attempt_many, finish, Check, Report};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded_algebra::{hilbert_bigraded, AlgebraSpec, GeneratorSpec, Kind};
use crate::spectral_sequence::{
    compare_abutment, run_differential, AbutmentSpec, DifferentialRule, ExtensionRule, Page,
};

/// One generator record: name, degree, filtration, kind and (for truncated
/// generators) height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub name: String,
    pub degree: u32,
    #[serde(default)]
    pub filtration: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
}

impl GeneratorRecord {
    pub fn to_spec(&self) -> Result<GeneratorSpec> {
        let kind = match (self.kind.as_str(), self.height) {
            ("exterior", None) => Kind::Exterior,
            ("polynomial", None) => Kind::Polynomial,
            ("divided", None) => Kind::Divided,
            ("truncated", Some(h)) => Kind::Truncated(h),
            (k, h) => {
                return Err(Error::Parse(format!(
                    "generator {}: bad kind {k:?} with height {h:?}",
                    self.name
                )))
            }
        };
        Ok(GeneratorSpec::new(self.name.clone(), self.degree, kind).in_filtration(self.filtration))
    }

    pub fn from_spec(g: &GeneratorSpec) -> Self {
        let (kind, height) = match g.kind {
            Kind::Exterior => ("exterior", None),
            Kind::Polynomial => ("polynomial", None),
            Kind::Divided => ("divided", None),
            Kind::Truncated(h) => ("truncated", Some(h)),
        };
        GeneratorRecord {
            name: g.name.clone(),
            degree: g.degree,
            filtration: g.filtration,
            kind: kind.into(),
            height,
        }
    }
}

pub fn algebra_from_records(f: PrimeField, records: &[GeneratorRecord]) -> Result<AlgebraSpec> {
    let gens = records
        .iter()
        .map(GeneratorRecord::to_spec)
        .collect::<Result<Vec<_>>>()?;
    AlgebraSpec::new(f, gens)
}

pub fn algebra_to_records(a: &AlgebraSpec) -> Vec<GeneratorRecord> {
    a.generators()
        .iter()
        .map(GeneratorRecord::from_spec)
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialRecord {
    pub r: u32,
    pub source: String,
    #[serde(default)]
    pub level: u32,
    pub target: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionRecord {
    pub label: String,
    pub factors: Vec<String>,
    pub detected_by: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbutmentRecord {
    pub generators: Vec<GeneratorRecord>,
    #[serde(default)]
    pub images: BTreeMap<String, String>,
    #[serde(default)]
    pub filtrations: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub prime: u32,
    pub cap: u32,
    #[serde(default = "default_first_page")]
    pub first_page: u32,
    pub page: Vec<GeneratorRecord>,
    #[serde(default)]
    pub differentials: Vec<DifferentialRecord>,
    /// Stated generators of the stable page, compared bidegree-wise.
    #[serde(default)]
    pub stable_page: Option<Vec<GeneratorRecord>>,
    #[serde(default)]
    pub abutment: Option<AbutmentRecord>,
    #[serde(default)]
    pub extensions: Vec<ExtensionRecord>,
}

fn default_first_page() -> u32 {
    2
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Runs the file with optional overrides of prime and cap.
    pub fn run(&self, prime: Option<u32>, cap: Option<u32>) -> Result<Report> {
        let p = prime.unwrap_or(self.prime);
        let cap = cap.unwrap_or(self.cap);
        let f = PrimeField::new(p)?;
        let checks = attempt_many("scenario file", || self.checks(f, cap));
        Ok(finish(&self.name, p, cap, checks))
    }

    fn checks(&self, f: PrimeField, cap: u32) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        let first = algebra_from_records(f, &self.page)?;
        let mut page = Page::from_algebra(first)
            .with_index(self.first_page)
            .with_cap(cap);
        let last = self.differentials.iter().map(|d| d.r).max().unwrap_or(0);
        for r in self.first_page..=last {
            let rules = self
                .differentials
                .iter()
                .filter(|d| d.r == r)
                .map(|d| {
                    Ok(DifferentialRule::generator(
                        r,
                        &d.source,
                        d.level,
                        page.algebra().elem(&d.target)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            match run_differential(&page, &rules) {
                Ok(next) => {
                    if !rules.is_empty() {
                        out.push(
                            Check::new(format!("d^{r} is a differential"), true)
                                .witness(format!("{} generator rules", rules.len())),
                        );
                    }
                    page = next;
                }
                Err(e) => {
                    out.push(Check::error(format!("d^{r} is a differential"), &e));
                    return Ok(out);
                }
            }
        }
        if let Some(stable) = &self.stable_page {
            let stated = algebra_from_records(f, stable)?;
            out.push(Check::bigraded(
                format!("E^{} = stated stable page", page.index()),
                &hilbert_bigraded(&stated, cap),
                &page.dims(),
            ));
        }
        if let Some(ab) = &self.abutment {
            let target = algebra_from_records(f, &ab.generators)?;
            let images: Vec<(&str, &str)> = ab
                .images
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .collect();
            let filt: Vec<(&str, u32)> = ab
                .filtrations
                .iter()
                .map(|(a, s)| (a.as_str(), *s))
                .collect();
            let spec = AbutmentSpec::for_algebra(&page, target, &images, &filt)?;
            let exts = self
                .extensions
                .iter()
                .map(|e| {
                    Ok(ExtensionRule {
                        label: e.label.clone(),
                        factors: e
                            .factors
                            .iter()
                            .map(|x| page.alg_key(x))
                            .collect::<Result<Vec<_>>>()?,
                        detected_by: page.alg_key(&e.detected_by)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let names: Vec<&str> = ab.generators.iter().map(|g| g.name.as_str()).collect();
            out.extend(abutment_checks(
                &format!("algebra on {}", names.join(", ")),
                &compare_abutment(&page, &spec, &exts)?,
            ));
        }
        Ok(out)
    }
}
