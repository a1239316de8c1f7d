//! Finitely presented graded-commutative algebras by monomial rewriting, the
//! algebra Theta_*, and a checker for graded derivations on such carriers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded_algebra::{
    AlgebraMap, AlgebraSpec, Derivation, Element, GeneratorSpec, GradedAlgebra, GradedDims, Kind,
    Monomial, Relation,
};

/// One rewrite rule `lhs -> rhs`; the left side is a basis monomial of the base algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub label: String,
    pub lhs: Monomial,
    pub rhs: Element,
}

#[derive(Clone, Debug)]
pub struct Presentation {
    base: AlgebraSpec,
    rules: Vec<RewriteRule>,
    max_steps: usize,
}

impl Presentation {
    pub fn new(base: AlgebraSpec, rules: Vec<RewriteRule>) -> Result<Self> {
        for r in &rules {
            if r.lhs.len() != base.ngens() || r.rhs.terms().any(|(m, _)| m.len() != base.ngens()) {
                return Err(Error::MixedSpec);
            }
            if !base.is_valid(&r.lhs) {
                return Err(Error::Parse(format!(
                    "rule `{}` has a left side outside the base basis",
                    r.label
                )));
            }
            if r.lhs
                .exps()
                .iter()
                .enumerate()
                .any(|(i, &e)| e > 0 && base.generators()[i].kind == Kind::Divided)
            {
                return Err(Error::UnsupportedKind(format!(
                    "rule `{}` rewrites a divided power",
                    r.label
                )));
            }
            let d = base.total_degree(&r.lhs) as i64;
            if r.rhs.terms().any(|(m, _)| base.total_degree(m) as i64 != d) {
                return Err(Error::DegreeMismatch {
                    name: r.label.clone(),
                    expected: d,
                });
            }
        }
        Ok(Presentation {
            base,
            rules,
            max_steps: 100_000,
        })
    }

    /// Parses rules written as `(label, lhs, rhs)` text triples.
    pub fn from_text(base: AlgebraSpec, rules: &[(&str, &str, &str)]) -> Result<Self> {
        let rules = rules
            .iter()
            .map(|(label, l, r)| {
                Ok(RewriteRule {
                    label: label.to_string(),
                    lhs: base.mono(l)?,
                    rhs: base.elem(r)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(base, rules)
    }

    pub fn base(&self) -> &AlgebraSpec {
        &self.base
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn with_max_steps(mut self, steps: usize) -> Self {
        self.max_steps = steps;
        self
    }

    /// Same presentation with rules tried in the order given by `order`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Presentation {
            base: self.base.clone(),
            rules: order.iter().map(|&i| self.rules[i].clone()).collect(),
            max_steps: self.max_steps,
        }
    }

    fn rule_for(&self, m: &Monomial) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.lhs.divides(m))
    }

    pub fn is_normal(&self, m: &Monomial) -> bool {
        self.base.is_valid(m) && self.rule_for(m).is_none()
    }

    /// Rewrites until no rule applies. The step bound guards against rule
    /// systems that do not terminate.
    pub fn normal_form(&self, e: Element) -> Result<Element> {
        let f = *self.base.field();
        let mut pending = e;
        let mut out = Element::zero();
        let mut steps = 0usize;
        while let Some((m, c)) = pending.pop_first() {
            let Some(rule) = self.rule_for(&m) else {
                out.add_term(&f, m, c);
                continue;
            };
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::NonTermination(steps));
            }
            let q = m.quotient(&rule.lhs);
            // lhs * q = s * m in the base algebra, so c m = (c / s) rhs * q
            let (s, prod) = self
                .base
                .multiply_monomials(&rule.lhs, &q)
                .expect("divisor of a basis monomial multiplies back");
            debug_assert_eq!(prod, m);
            let q = Element::monomial(q, 1);
            let image = self.base.multiply(&rule.rhs, &q)?;
            pending.add_scaled(&f, &image, f.mul(c, f.inv(s)));
        }
        Ok(out)
    }

    /// Adjoins free generators of another algebra, placed before the existing ones.
    pub fn with_free_factor(&self, extra: &AlgebraSpec) -> Result<Presentation> {
        let base = extra.tensor(&self.base)?;
        let rules = self
            .rules
            .iter()
            .map(|r| {
                Ok(RewriteRule {
                    label: r.label.clone(),
                    lhs: base.embed(&self.base, &r.lhs)?,
                    rhs: base.embed_element(&self.base, &r.rhs)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation {
            base,
            rules,
            max_steps: self.max_steps,
        })
    }
}

impl GradedAlgebra for Presentation {
    fn spec(&self) -> &AlgebraSpec {
        &self.base
    }

    fn normalize(&self, e: Element) -> Result<Element> {
        if e.terms().any(|(m, _)| m.len() != self.base.ngens()) {
            return Err(Error::MixedSpec);
        }
        self.normal_form(e)
    }

    fn basis(&self, n: u32) -> Vec<Monomial> {
        self.base
            .basis(n)
            .into_iter()
            .filter(|m| self.rule_for(m).is_none())
            .collect()
    }

    fn relations(&self) -> Vec<Relation> {
        let mut rels = self.base.relations();
        rels.extend(self.rules.iter().map(|r| Relation {
            label: r.label.clone(),
            lhs: r.lhs.clone(),
            rhs: r.rhs.clone(),
        }));
        rels
    }
}

pub fn hilbert_pres(pres: &Presentation, cap: u32) -> GradedDims {
    pres.hilbert(cap)
}

/// Name of `b_j` in Theta_*, with `b_0 = u`.
pub fn theta_b(j: u32) -> String {
    if j == 0 {
        "u".into()
    } else {
        format!("b{j}")
    }
}

pub fn theta_a(i: u32) -> String {
    format!("a{i}")
}

/// Theta_*: generators u (height p-1), mu2, a_0..a_{p-1}, b_1..b_{p-1} with the
/// defining relations oriented to reduce the number of a/b letters.
pub fn make_theta(field: PrimeField) -> Result<Presentation> {
    let p = field.p();
    let mut gens = vec![
        GeneratorSpec::truncated("u", 2, p - 1),
        GeneratorSpec::polynomial("mu2", 2 * p * p),
    ];
    for i in 0..p {
        gens.push(GeneratorSpec::exterior(theta_a(i), 2 * p * i + 3));
    }
    for j in 1..p {
        gens.push(GeneratorSpec::polynomial(theta_b(j), 2 * p * j + 2));
    }
    let base = AlgebraSpec::new(field, gens)?;
    let mut rules: Vec<(String, String, String)> = Vec::new();
    let shifted = |letter: &dyn Fn(u32) -> String, k: u32| {
        let (target, tail) = if k < p { (k, "") } else { (k - p, " mu2") };
        let name = letter(target);
        if name == "u" {
            // u b_0 = u^2, which vanishes when p - 1 = 2
            if p > 3 {
                format!("u^2{tail}")
            } else {
                "0".into()
            }
        } else {
            format!("u {name}{tail}")
        }
    };
    for i in 0..p {
        for j in i + 1..p {
            rules.push((
                format!("a{i} a{j} = 0"),
                format!("{} {}", theta_a(i), theta_a(j)),
                "0".into(),
            ));
        }
    }
    for i in 1..p {
        for j in i..p {
            let rhs = shifted(&theta_b, i + j);
            rules.push((
                format!("b{i} b{j} = {rhs}"),
                format!("{} {}", theta_b(i), theta_b(j)),
                rhs,
            ));
        }
    }
    for i in 0..p {
        for j in 1..p {
            let rhs = shifted(&theta_a, i + j);
            rules.push((
                format!("a{i} b{j} = {rhs}"),
                format!("{} {}", theta_a(i), theta_b(j)),
                rhs,
            ));
        }
    }
    for i in 0..p - 1 {
        rules.push((
            format!("u^{} a{i} = 0", p - 2),
            format!("u^{} {}", p - 2, theta_a(i)),
            "0".into(),
        ));
    }
    for j in 1..p {
        rules.push((
            format!("u^{} b{j} = 0", p - 2),
            format!("u^{} {}", p - 2, theta_b(j)),
            "0".into(),
        ));
    }
    let triples: Vec<(&str, &str, &str)> = rules
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Presentation::from_text(base, &triples)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub label: String,
    pub passed: bool,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationReport {
    pub relations: Vec<RelationCheck>,
}

impl DerivationReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.relations.iter().filter(|r| !r.passed)
    }
}

/// Checks that the Leibniz extension of `d` respects every defining relation
/// of the carrier: d(lhs) and d(rhs) have equal normal forms.
pub fn check_derivation(carrier: &dyn GradedAlgebra, d: &Derivation) -> Result<DerivationReport> {
    let spec = carrier.spec();
    let f = *spec.field();
    let mut relations = Vec::new();
    for rel in carrier.relations() {
        let lhs = d.apply_monomial(carrier, &rel.lhs)?;
        let rhs = d.apply(carrier, &rel.rhs)?;
        let residual = carrier.normalize(lhs.sub(&f, &rhs))?;
        relations.push(RelationCheck {
            label: format!("d({})", rel.label),
            passed: residual.is_zero(),
            residual: spec.format_element(&residual),
        });
    }
    Ok(DerivationReport { relations })
}

/// Checks `map(d_src(g)) = d_tgt(map(g))` on every generator `g` of the source.
/// Both sides are derivations along `map`, so agreement on generators is enough.
pub fn check_naturality(
    source: &dyn GradedAlgebra,
    target: &dyn GradedAlgebra,
    map: &AlgebraMap,
    d_source: &Derivation,
    d_target: &Derivation,
) -> Result<DerivationReport> {
    let s = source.spec();
    let t = target.spec();
    let f = *t.field();
    let mut relations = Vec::new();
    for (i, g) in s.generators().iter().enumerate() {
        if g.kind == Kind::Divided {
            return Err(Error::UnsupportedKind(g.name.clone()));
        }
        let gm = Monomial::generator(s.ngens(), i, 1);
        let left = map.apply(source, target, &d_source.apply_monomial(source, &gm)?)?;
        let right = d_target.apply(target, &map.apply_monomial(source, target, &gm)?)?;
        let residual = target.normalize(left.sub(&f, &right))?;
        relations.push(RelationCheck {
            label: format!("natural on {}", g.name),
            passed: residual.is_zero(),
            residual: t.format_element(&residual),
        });
    }
    Ok(DerivationReport { relations })
}
