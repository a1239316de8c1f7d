use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::element::{Element, Monomial};
use crate::error::{Error, Result};
use crate::field::PrimeField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exterior,
    Polynomial,
    /// Polynomial algebra truncated at height h: x^h = 0.
    Truncated(u32),
    Divided,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Exterior => write!(f, "exterior"),
            Kind::Polynomial => write!(f, "polynomial"),
            Kind::Truncated(h) => write!(f, "truncated({h})"),
            Kind::Divided => write!(f, "divided"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub name: String,
    /// Internal degree t.
    pub degree: u32,
    /// Filtration degree s.
    pub filtration: u32,
    pub kind: Kind,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, degree: u32, kind: Kind) -> Self {
        GeneratorSpec {
            name: name.into(),
            degree,
            filtration: 0,
            kind,
        }
    }

    pub fn exterior(name: impl Into<String>, degree: u32) -> Self {
        Self::new(name, degree, Kind::Exterior)
    }

    pub fn polynomial(name: impl Into<String>, degree: u32) -> Self {
        Self::new(name, degree, Kind::Polynomial)
    }

    pub fn truncated(name: impl Into<String>, degree: u32, height: u32) -> Self {
        Self::new(name, degree, Kind::Truncated(height))
    }

    pub fn divided(name: impl Into<String>, degree: u32) -> Self {
        Self::new(name, degree, Kind::Divided)
    }

    pub fn in_filtration(mut self, s: u32) -> Self {
        self.filtration = s;
        self
    }

    #[inline]
    pub fn total_degree(&self) -> u32 {
        self.degree + self.filtration
    }

    #[inline]
    pub fn is_odd(&self) -> bool {
        self.total_degree() % 2 == 1
    }

    /// Largest admissible exponent, if bounded.
    pub fn max_exponent(&self) -> Option<u32> {
        match self.kind {
            Kind::Exterior => Some(1),
            Kind::Truncated(h) => Some(h - 1),
            Kind::Polynomial | Kind::Divided => None,
        }
    }
}

/// Opaque coefficient algebra carried along formally. Both modes contribute
/// the ground field as a graded vector space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoefficientFactor {
    pub name: String,
    pub mode: CoefficientMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientMode {
    Trivial,
    Symbolic,
}

impl CoefficientFactor {
    pub fn trivial(name: impl Into<String>) -> Self {
        CoefficientFactor {
            name: name.into(),
            mode: CoefficientMode::Trivial,
        }
    }
}

/// A graded-commutative F_p-algebra with a monomial basis: a tensor product of
/// exterior, polynomial, truncated polynomial and divided power algebras.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    field: PrimeField,
    generators: Vec<GeneratorSpec>,
    coefficients: Vec<CoefficientFactor>,
    index: HashMap<String, usize>,
}

impl PartialEq for AlgebraSpec {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.generators == other.generators
            && self.coefficients == other.coefficients
    }
}

impl Eq for AlgebraSpec {}

impl AlgebraSpec {
    pub fn new(field: PrimeField, generators: Vec<GeneratorSpec>) -> Result<Self> {
        Self::with_coefficients(field, generators, Vec::new())
    }

    pub fn with_coefficients(
        field: PrimeField,
        generators: Vec<GeneratorSpec>,
        coefficients: Vec<CoefficientFactor>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            validate_generator(g)?;
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::DuplicateName(g.name.clone()));
            }
        }
        for c in &coefficients {
            if index.contains_key(&c.name)
                || coefficients.iter().filter(|d| d.name == c.name).count() > 1
            {
                return Err(Error::DuplicateName(c.name.clone()));
            }
        }
        Ok(AlgebraSpec {
            field,
            generators,
            coefficients,
            index,
        })
    }

    /// The ground field viewed as an algebra with no generators.
    pub fn ground(field: PrimeField) -> Self {
        Self::new(field, Vec::new()).expect("empty spec is valid")
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.generators
    }

    pub fn coefficients(&self) -> &[CoefficientFactor] {
        &self.coefficients
    }

    #[inline]
    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn has_generator(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn generator(&self, name: &str) -> Result<&GeneratorSpec> {
        Ok(&self.generators[self.index_of(name)?])
    }

    pub fn one(&self) -> Monomial {
        Monomial::one(self.ngens())
    }

    pub fn unit(&self) -> Element {
        Element::monomial(self.one(), 1)
    }

    /// The generator itself (gamma_1 for a divided generator) as an element.
    pub fn gen(&self, name: &str) -> Result<Element> {
        let i = self.index_of(name)?;
        Ok(Element::monomial(
            Monomial::generator(self.ngens(), i, 1),
            1,
        ))
    }

    pub fn is_valid(&self, m: &Monomial) -> bool {
        m.len() == self.ngens()
            && self
                .generators
                .iter()
                .zip(m.exps())
                .all(|(g, &e)| g.max_exponent().is_none_or(|mx| e <= mx))
    }

    pub fn total_degree(&self, m: &Monomial) -> u32 {
        self.generators
            .iter()
            .zip(m.exps())
            .map(|(g, &e)| e * g.total_degree())
            .sum()
    }

    /// (filtration s, internal degree t).
    pub fn bidegree(&self, m: &Monomial) -> (u32, u32) {
        self.generators
            .iter()
            .zip(m.exps())
            .fold((0, 0), |(s, t), (g, &e)| {
                (s + e * g.filtration, t + e * g.degree)
            })
    }

    pub fn is_odd(&self, m: &Monomial) -> bool {
        self.total_degree(m) % 2 == 1
    }

    /// Total degree of a homogeneous element, `None` for zero or inhomogeneous.
    pub fn element_degree(&self, e: &Element) -> Option<u32> {
        let mut degs = e.terms().map(|(m, _)| self.total_degree(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn element_bidegree(&self, e: &Element) -> Option<(u32, u32)> {
        let mut degs = e.terms().map(|(m, _)| self.bidegree(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Product of two basis monomials: `None` when it vanishes, otherwise the
    /// coefficient (sign times divided-power binomials) and the monomial.
    pub fn multiply_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(u32, Monomial)> {
        let f = &self.field;
        let mut coeff = 1u32;
        let mut out = Vec::with_capacity(self.ngens());
        let mut odd_b_before = 0u32;
        let mut sign_odd = false;
        for (i, g) in self.generators.iter().enumerate() {
            let (x, y) = (a.0[i], b.0[i]);
            let gen_odd = g.is_odd();
            // a's factor at i moves past b's factors at positions < i
            if gen_odd && x % 2 == 1 && odd_b_before % 2 == 1 {
                sign_odd = !sign_odd;
            }
            if gen_odd && y % 2 == 1 {
                odd_b_before += 1;
            }
            let e = x + y;
            match g.kind {
                Kind::Exterior => {
                    if e > 1 {
                        return None;
                    }
                }
                Kind::Truncated(h) => {
                    if e >= h {
                        return None;
                    }
                }
                Kind::Polynomial => {}
                Kind::Divided => {
                    if x > 0 && y > 0 {
                        let c = f.binomial(e as u64, x as u64);
                        if c == 0 {
                            return None;
                        }
                        coeff = f.mul(coeff, c);
                    }
                }
            }
            out.push(e);
        }
        if sign_odd {
            coeff = f.neg(coeff);
        }
        Some((coeff, Monomial(out)))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        let f = &self.field;
        let mut out = Element::zero();
        for (ma, ca) in a.terms() {
            if ma.len() != self.ngens() {
                return Err(Error::MixedSpec);
            }
            for (mb, cb) in b.terms() {
                if mb.len() != self.ngens() {
                    return Err(Error::MixedSpec);
                }
                if let Some((c, m)) = self.multiply_monomials(ma, mb) {
                    out.add_term(f, m, f.mul(c, f.mul(ca, cb)));
                }
            }
        }
        Ok(out)
    }

    /// Normal-form monomials of total degree <= cap, grouped by total degree.
    pub fn basis_upto(&self, cap: u32) -> Vec<Vec<Monomial>> {
        let mut out = vec![Vec::new(); cap as usize + 1];
        let mut cur = vec![0u32; self.ngens()];
        self.enumerate(0, 0, cap, &mut cur, &mut |m, d| {
            out[d as usize].push(Monomial(m.to_vec()))
        });
        for v in &mut out {
            v.sort();
        }
        out
    }

    pub fn basis(&self, n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.ngens()];
        self.enumerate(0, 0, n, &mut cur, &mut |m, d| {
            if d == n {
                out.push(Monomial(m.to_vec()))
            }
        });
        out.sort();
        out
    }

    /// Basis grouped by bidegree (s, t) with s + t <= cap.
    pub fn basis_bigraded(&self, cap: u32) -> BTreeMap<(u32, u32), Vec<Monomial>> {
        let mut out: BTreeMap<(u32, u32), Vec<Monomial>> = BTreeMap::new();
        for by_deg in self.basis_upto(cap) {
            for m in by_deg {
                out.entry(self.bidegree(&m)).or_default().push(m);
            }
        }
        out
    }

    fn enumerate(
        &self,
        i: usize,
        deg: u32,
        cap: u32,
        cur: &mut Vec<u32>,
        emit: &mut dyn FnMut(&[u32], u32),
    ) {
        if i == self.ngens() {
            emit(cur, deg);
            return;
        }
        let g = &self.generators[i];
        let d = g.total_degree();
        let mut e = 0;
        loop {
            let nd = deg + e * d;
            if nd > cap || g.max_exponent().is_some_and(|mx| e > mx) {
                break;
            }
            cur[i] = e;
            self.enumerate(i + 1, nd, cap, cur, emit);
            e += 1;
        }
        cur[i] = 0;
    }

    /// Tensor product: disjoint union of generators.
    pub fn tensor(&self, other: &AlgebraSpec) -> Result<AlgebraSpec> {
        if self.field != other.field {
            return Err(Error::MixedSpec);
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let mut coeffs = self.coefficients.clone();
        coeffs.extend(other.coefficients.iter().cloned());
        AlgebraSpec::with_coefficients(self.field, gens, coeffs)
    }

    /// Embeds a monomial of a tensor factor whose generators appear here by name.
    pub fn embed(&self, from: &AlgebraSpec, m: &Monomial) -> Result<Monomial> {
        let mut out = self.one();
        for (g, &e) in from.generators.iter().zip(m.exps()) {
            if e > 0 {
                out.0[self.index_of(&g.name)?] = e;
            }
        }
        Ok(out)
    }

    pub fn embed_element(&self, from: &AlgebraSpec, e: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out.add_term(&self.field, self.embed(from, m)?, c);
        }
        Ok(out)
    }

    /// Parses a monomial such as `"lambda1 mu2^3 [dv]^4"` (`"1"` is the unit).
    /// For divided generators the exponent is the gamma index.
    pub fn mono(&self, text: &str) -> Result<Monomial> {
        let mut m = self.one();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.rsplit_once('^') {
                Some((n, e)) => (
                    n,
                    e.trim_matches(|c| c == '{' || c == '}')
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?,
                ),
                None => (tok, 1),
            };
            let i = self.index_of(name)?;
            m.0[i] += exp;
        }
        if !self.is_valid(&m) {
            return Err(Error::Parse(format!("`{text}` is not a basis monomial")));
        }
        Ok(m)
    }

    /// Parses an element such as `"2 lambda1 mu2 - [v] + 1"`. Coefficients are
    /// integers reduced mod p; a leading integer token is the coefficient.
    pub fn elem(&self, text: &str) -> Result<Element> {
        let f = self.field;
        let mut out = Element::zero();
        let normalized = text.replace('-', " - ").replace('+', " + ");
        let mut sign = 1i64;
        let mut current: Vec<&str> = Vec::new();
        let flush = |current: &mut Vec<&str>, sign: i64, out: &mut Element| -> Result<()> {
            if current.is_empty() {
                return Ok(());
            }
            let (coeff, rest) = match current[0].parse::<i64>() {
                Ok(c) => (c, &current[1..]),
                _ => (1, &current[..]),
            };
            let m = self.mono(&rest.join(" "))?;
            out.add_term(&f, m, f.reduce(sign * coeff));
            current.clear();
            Ok(())
        };
        for tok in normalized.split_whitespace() {
            match tok {
                "+" => {
                    flush(&mut current, sign, &mut out)?;
                    sign = 1;
                }
                "-" => {
                    flush(&mut current, sign, &mut out)?;
                    sign = -1;
                }
                _ => current.push(tok),
            }
        }
        flush(&mut current, sign, &mut out)?;
        Ok(out)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = self
            .generators
            .iter()
            .zip(m.exps())
            .filter(|(_, &e)| e > 0)
            .map(|(g, &e)| match (g.kind, e) {
                (Kind::Divided, e) => format!("g{e}{}", g.name),
                (_, 1) => g.name.clone(),
                (_, e) => format!("{}^{e}", g.name),
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    pub fn format_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.terms()
            .map(|(m, c)| {
                if c == 1 {
                    self.format_monomial(m)
                } else {
                    format!("{c} {}", self.format_monomial(m))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn validate_generator(g: &GeneratorSpec) -> Result<()> {
    let total = g.total_degree();
    if total == 0 {
        return Err(Error::ZeroDegree(g.name.clone()));
    }
    let parity_ok = match g.kind {
        Kind::Exterior => total % 2 == 1,
        Kind::Polynomial | Kind::Divided => total.is_multiple_of(2),
        Kind::Truncated(h) => {
            if h < 2 {
                return Err(Error::Parse(format!(
                    "truncation height of `{}` must be at least 2",
                    g.name
                )));
            }
            total.is_multiple_of(2)
        }
    };
    if !parity_ok {
        return Err(Error::ParityViolation {
            name: g.name.clone(),
            kind: g.kind.to_string(),
            degree: total,
        });
    }
    if g.name.is_empty()
        || g.name
            .contains(|c: char| c.is_whitespace() || "^+-".contains(c))
    {
        return Err(Error::Parse(format!("invalid generator name `{}`", g.name)));
    }
    Ok(())
}
