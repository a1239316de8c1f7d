use std::collections::HashMap;

use super::element::{Element, Monomial};
use super::hilbert::GradedDims;
use super::spec::{AlgebraSpec, Kind};
use crate::error::{Error, Result};
use crate::fp_linalg::FpMatrix;

/// A defining relation `lhs = rhs`. The left side is a raw exponent vector and
/// may lie outside the normal-form range (e.g. `u^h` for a truncated `u`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub label: String,
    pub lhs: Monomial,
    pub rhs: Element,
}

/// Anything with a normal-form monomial basis over a free graded-commutative
/// algebra: monomial algebras themselves and finitely presented quotients.
pub trait GradedAlgebra {
    /// The ambient free algebra supplying generators, degrees and signs.
    fn spec(&self) -> &AlgebraSpec;

    /// Rewrites an element of the ambient algebra into normal form.
    fn normalize(&self, e: Element) -> Result<Element>;

    /// Normal-form monomials of total degree `n`.
    fn basis(&self, n: u32) -> Vec<Monomial>;

    fn relations(&self) -> Vec<Relation>;

    fn product(&self, a: &Element, b: &Element) -> Result<Element> {
        self.normalize(self.spec().multiply(a, b)?)
    }

    fn hilbert(&self, cap: u32) -> GradedDims {
        GradedDims::new((0..=cap).map(|n| self.basis(n).len()).collect())
    }

    /// `g^e` computed by repeated multiplication (gamma_e for divided `g`).
    fn raw_power(&self, gen: usize, e: u32) -> Result<Element> {
        let spec = self.spec();
        if spec.generators()[gen].kind == Kind::Divided {
            return self.normalize(Element::monomial(
                Monomial::generator(spec.ngens(), gen, e),
                1,
            ));
        }
        let g = Element::monomial(Monomial::generator(spec.ngens(), gen, 1), 1);
        let mut acc = spec.unit();
        for _ in 0..e {
            acc = self.product(&acc, &g)?;
        }
        Ok(acc)
    }

    /// The product of generator powers in `m`, taken in generator order.
    fn raw_monomial(&self, m: &Monomial) -> Result<Element> {
        let mut acc = self.spec().unit();
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                acc = self.product(&acc, &self.raw_power(i, e)?)?;
            }
        }
        Ok(acc)
    }
}

impl GradedAlgebra for AlgebraSpec {
    fn spec(&self) -> &AlgebraSpec {
        self
    }

    fn normalize(&self, e: Element) -> Result<Element> {
        if e.terms().any(|(m, _)| m.len() != self.ngens()) {
            return Err(Error::MixedSpec);
        }
        Ok(e)
    }

    fn basis(&self, n: u32) -> Vec<Monomial> {
        AlgebraSpec::basis(self, n)
    }

    fn relations(&self) -> Vec<Relation> {
        let n = self.ngens();
        self.generators()
            .iter()
            .enumerate()
            .filter_map(|(i, g)| match g.kind {
                Kind::Exterior => Some(Relation {
                    label: format!("{}^2 = 0", g.name),
                    lhs: Monomial::generator(n, i, 2),
                    rhs: Element::zero(),
                }),
                Kind::Truncated(h) => Some(Relation {
                    label: format!("{}^{h} = 0", g.name),
                    lhs: Monomial::generator(n, i, h),
                    rhs: Element::zero(),
                }),
                _ => None,
            })
            .collect()
    }
}

/// Index of each basis monomial, for building coordinate vectors.
pub struct BasisIndex<'a> {
    basis: &'a [Monomial],
    index: HashMap<&'a Monomial, usize>,
}

impl<'a> BasisIndex<'a> {
    pub fn new(basis: &'a [Monomial]) -> Self {
        BasisIndex {
            basis,
            index: basis.iter().enumerate().map(|(i, m)| (m, i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of a normal-form element; errors if a term is not in the basis.
    pub fn coordinates(&self, e: &Element) -> Result<Vec<u32>> {
        let mut v = vec![0; self.basis.len()];
        for (m, c) in e.terms() {
            let i = self.position(m).ok_or_else(|| {
                Error::DimensionMismatch(format!("term {m} outside the target basis"))
            })?;
            v[i] = c;
        }
        Ok(v)
    }
}

/// Matrix of a linear map between two bases, given by its values on the source basis.
pub fn map_matrix<F>(source: &[Monomial], target: &[Monomial], mut value: F) -> Result<FpMatrix>
where
    F: FnMut(&Monomial) -> Result<Element>,
{
    let idx = BasisIndex::new(target);
    let cols = source
        .iter()
        .map(|m| idx.coordinates(&value(m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(FpMatrix::from_columns(target.len(), &cols))
}
