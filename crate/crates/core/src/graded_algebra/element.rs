use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::field::PrimeField;

/// Exponent vector over the generators of an algebra.
///
/// For a divided-power generator the entry `k` stands for the basis symbol
/// gamma_k of that generator, not for a k-th power.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(ngens: usize) -> Self {
        Monomial(vec![0; ngens])
    }

    pub fn generator(ngens: usize, i: usize, exp: u32) -> Self {
        let mut v = vec![0; ngens];
        v[i] = exp;
        Monomial(v)
    }

    #[inline]
    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Exponentwise comparison.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Exponentwise difference; caller guarantees `rhs.divides(self)`.
    pub fn quotient(&self, rhs: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }

    /// Concatenation of exponent vectors (monomial of a tensor product).
    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Monomial(v)
    }
}

/// An F_p-linear combination of monomials. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn monomial(m: Monomial, coeff: u32) -> Self {
        let mut e = Element::zero();
        if coeff != 0 {
            e.terms.insert(m, coeff);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, f: &PrimeField, m: Monomial, c: u32) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                let v = f.add(*o.get(), c);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, f: &PrimeField, other: &Element, c: u32) {
        if c == 0 {
            return;
        }
        for (m, x) in other.terms() {
            self.add_term(f, m.clone(), f.mul(x, c));
        }
    }

    pub fn add(&self, f: &PrimeField, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(f, other, 1);
        out
    }

    pub fn sub(&self, f: &PrimeField, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(f, other, f.neg(1));
        out
    }

    pub fn scale(&self, f: &PrimeField, c: u32) -> Element {
        let mut out = Element::zero();
        out.add_scaled(f, self, c);
        out
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, u32> {
        self.terms
    }

    pub(crate) fn pop_first(&mut self) -> Option<(Monomial, u32)> {
        self.terms.pop_first()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}
