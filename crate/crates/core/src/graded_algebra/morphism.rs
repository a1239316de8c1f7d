use std::collections::BTreeMap;

use serde::Serialize;

use super::carrier::{map_matrix, GradedAlgebra};
use super::derivation::check_homogeneous;
use super::element::{Element, Monomial};
use super::spec::Kind;
use crate::error::{Error, Result};

/// A multiplicative map determined by generator images. Generators without an
/// explicit image go to the same-named generator of the target, or to zero if
/// the target has no such generator.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    images: Vec<Element>,
}

impl AlgebraMap {
    pub fn new(
        source: &dyn GradedAlgebra,
        target: &dyn GradedAlgebra,
        images: &BTreeMap<String, Element>,
    ) -> Result<Self> {
        let (s, t) = (source.spec(), target.spec());
        for name in images.keys() {
            s.index_of(name)?;
        }
        let mut out = Vec::with_capacity(s.ngens());
        for g in s.generators() {
            let img = match images.get(&g.name) {
                Some(e) => e.clone(),
                None if t.has_generator(&g.name) => t.gen(&g.name)?,
                None => Element::zero(),
            };
            if img.terms().any(|(m, _)| m.len() != t.ngens()) {
                return Err(Error::MixedSpec);
            }
            check_homogeneous(t, &g.name, &img, g.total_degree() as i64)?;
            out.push(target.normalize(img)?);
        }
        Ok(AlgebraMap { images: out })
    }

    /// Builds a map from `(generator, image)` pairs in text form.
    pub fn from_text(
        source: &dyn GradedAlgebra,
        target: &dyn GradedAlgebra,
        values: &[(&str, &str)],
    ) -> Result<Self> {
        let images = values
            .iter()
            .map(|(n, e)| Ok((n.to_string(), target.spec().elem(e)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        AlgebraMap::new(source, target, &images)
    }

    pub fn image(&self, gen: usize) -> &Element {
        &self.images[gen]
    }

    fn power(
        &self,
        source: &dyn GradedAlgebra,
        target: &dyn GradedAlgebra,
        gen: usize,
        e: u32,
    ) -> Result<Element> {
        let t = target.spec();
        let f = *t.field();
        let img = &self.images[gen];
        if source.spec().generators()[gen].kind == Kind::Divided {
            // gamma_1 -> c * gamma_1(y) forces gamma_k -> c^k gamma_k(y).
            let mut terms = img.terms();
            if let (Some((m, c)), None) = (terms.next(), terms.next()) {
                let support: Vec<usize> = (0..m.len()).filter(|&j| m.0[j] > 0).collect();
                if let [j] = support[..] {
                    if t.generators()[j].kind == Kind::Divided && m.0[j] == 1 {
                        let gm = Monomial::generator(t.ngens(), j, e);
                        return target.normalize(Element::monomial(gm, f.pow(c, e as u64)));
                    }
                }
            }
            if e >= f.p() && !img.is_zero() {
                return Err(Error::UnsupportedKind(format!(
                    "image of divided generator {} is not a divided generator",
                    source.spec().generators()[gen].name
                )));
            }
            let mut acc = t.unit();
            for _ in 0..e {
                acc = target.product(&acc, img)?;
            }
            return Ok(acc.scale(&f, f.inv(f.factorial(e))));
        }
        let mut acc = t.unit();
        for _ in 0..e {
            acc = target.product(&acc, img)?;
        }
        Ok(acc)
    }

    /// Image of a (possibly raw) monomial of the source.
    pub fn apply_monomial(
        &self,
        source: &dyn GradedAlgebra,
        target: &dyn GradedAlgebra,
        m: &Monomial,
    ) -> Result<Element> {
        let mut acc = target.spec().unit();
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                acc = target.product(&acc, &self.power(source, target, i, e)?)?;
                if acc.is_zero() {
                    break;
                }
            }
        }
        Ok(acc)
    }

    pub fn apply(
        &self,
        source: &dyn GradedAlgebra,
        target: &dyn GradedAlgebra,
        e: &Element,
    ) -> Result<Element> {
        let f = *target.spec().field();
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out.add_scaled(&f, &self.apply_monomial(source, target, m)?, c);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationFailure {
    pub label: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeRank {
    pub n: u32,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub relation_failures: Vec<RelationFailure>,
    pub degrees: Vec<DegreeRank>,
}

impl MorphismReport {
    /// All defining relations of the source are respected.
    pub fn is_valid(&self) -> bool {
        self.relation_failures.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        self.degrees.iter().all(|d| d.rank == d.source_dim)
    }

    pub fn is_surjective(&self) -> bool {
        self.degrees.iter().all(|d| d.rank == d.target_dim)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_valid() && self.is_injective() && self.is_surjective()
    }

    /// Degrees where the map fails to be surjective.
    pub fn cokernel_degrees(&self) -> Vec<u32> {
        self.degrees
            .iter()
            .filter(|d| d.rank < d.target_dim)
            .map(|d| d.n)
            .collect()
    }

    pub fn kernel_degrees(&self) -> Vec<u32> {
        self.degrees
            .iter()
            .filter(|d| d.rank < d.source_dim)
            .map(|d| d.n)
            .collect()
    }
}

/// Checks that generator images define an algebra map and records its rank in
/// each total degree up to `cap`.
pub fn check_morphism(
    source: &dyn GradedAlgebra,
    target: &dyn GradedAlgebra,
    images: &BTreeMap<String, Element>,
    cap: u32,
) -> Result<MorphismReport> {
    let map = AlgebraMap::new(source, target, images)?;
    morphism_report(&map, source, target, cap)
}

pub fn morphism_report(
    map: &AlgebraMap,
    source: &dyn GradedAlgebra,
    target: &dyn GradedAlgebra,
    cap: u32,
) -> Result<MorphismReport> {
    let t = target.spec();
    let f = *t.field();
    let mut relation_failures = Vec::new();
    for rel in source.relations() {
        let lhs = map.apply_monomial(source, target, &rel.lhs)?;
        let rhs = map.apply(source, target, &rel.rhs)?;
        let residual = target.normalize(lhs.sub(&f, &rhs))?;
        if !residual.is_zero() {
            relation_failures.push(RelationFailure {
                label: rel.label,
                residual: t.format_element(&residual),
            });
        }
    }
    let mut degrees = Vec::new();
    for n in 0..=cap {
        let sb = source.basis(n);
        let tb = target.basis(n);
        let m = map_matrix(&sb, &tb, |x| map.apply_monomial(source, target, x))?;
        degrees.push(DegreeRank {
            n,
            source_dim: sb.len(),
            target_dim: tb.len(),
            rank: m.rank(&f),
        });
    }
    Ok(MorphismReport {
        relation_failures,
        degrees,
    })
}
