use std::collections::BTreeMap;

use super::carrier::GradedAlgebra;
use super::element::{Element, Monomial};
use super::spec::{AlgebraSpec, Kind};
use crate::error::{Error, Result};

/// A graded derivation of some fixed total degree, determined by its values on
/// generators. For a divided-power generator the values are given on the
/// indecomposables gamma_{p^i}, keyed by `i`.
///
/// Leibniz rule: d(xy) = d(x) y + (-1)^{deg(d) |x|} x d(y), with |x| the total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    degree: i64,
    images: BTreeMap<(usize, u32), Element>,
}

impl Derivation {
    pub fn new(degree: i64) -> Self {
        Derivation {
            degree,
            images: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Sets the value on a generator (on gamma_1 for a divided generator).
    pub fn set(&mut self, spec: &AlgebraSpec, name: &str, image: Element) -> Result<()> {
        self.set_level(spec, name, 0, image)
    }

    /// Sets the value on gamma_{p^level} of a divided generator.
    pub fn set_level(
        &mut self,
        spec: &AlgebraSpec,
        name: &str,
        level: u32,
        image: Element,
    ) -> Result<()> {
        let i = spec.index_of(name)?;
        if level > 0 && spec.generators()[i].kind != Kind::Divided {
            return Err(Error::UnsupportedKind(name.to_string()));
        }
        let p = spec.field().p();
        let src_deg = spec.generators()[i].total_degree() as i64 * (p as i64).pow(level);
        check_homogeneous(spec, name, &image, src_deg + self.degree)?;
        if image.is_zero() {
            self.images.remove(&(i, level));
        } else {
            self.images.insert((i, level), image);
        }
        Ok(())
    }

    /// Builds a derivation from `(generator, image)` pairs written in text form.
    pub fn from_text(spec: &AlgebraSpec, degree: i64, values: &[(&str, &str)]) -> Result<Self> {
        let mut d = Derivation::new(degree);
        for (name, img) in values {
            d.set(spec, name, spec.elem(img)?)?;
        }
        Ok(d)
    }

    pub fn image(&self, gen: usize, level: u32) -> Element {
        self.images.get(&(gen, level)).cloned().unwrap_or_default()
    }

    pub fn images(&self) -> impl Iterator<Item = ((usize, u32), &Element)> {
        self.images.iter().map(|(&k, v)| (k, v))
    }

    pub fn with_image(mut self, gen: usize, level: u32, image: Element) -> Self {
        if image.is_zero() {
            self.images.remove(&(gen, level));
        } else {
            self.images.insert((gen, level), image);
        }
        self
    }

    /// Value on a (possibly raw) monomial, expanded by the Leibniz rule.
    pub fn apply_monomial(&self, carrier: &dyn GradedAlgebra, m: &Monomial) -> Result<Element> {
        let spec = carrier.spec();
        let f = *spec.field();
        let odd = self.degree.rem_euclid(2) == 1;
        let n = spec.ngens();
        let mut out = Element::zero();
        let mut prefix_degree = 0u32;
        for i in 0..n {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let g = &spec.generators()[i];
            let piece = self.piece(carrier, i, e)?;
            if !piece.is_zero() {
                let mut pre = m.clone();
                let mut post = m.clone();
                for j in 0..n {
                    if j >= i {
                        pre.0[j] = 0;
                    }
                    if j <= i {
                        post.0[j] = 0;
                    }
                }
                let pre = carrier.raw_monomial(&pre)?;
                let post = carrier.raw_monomial(&post)?;
                let term = carrier.product(&carrier.product(&pre, &piece)?, &post)?;
                let sign = f.sign(odd && prefix_degree % 2 == 1);
                out.add_scaled(&f, &term, sign);
            }
            prefix_degree += e * g.total_degree();
        }
        carrier.normalize(out)
    }

    /// d(g^e) for a single generator.
    fn piece(&self, carrier: &dyn GradedAlgebra, i: usize, e: u32) -> Result<Element> {
        let spec = carrier.spec();
        let f = *spec.field();
        let g = &spec.generators()[i];
        let n = spec.ngens();
        if g.kind == Kind::Divided {
            // gamma_k = prod_l gamma_{p^l}^{c_l} / c_l!, so
            // d(gamma_k) = sum_{c_l > 0} gamma_{k - p^l} d(gamma_{p^l}).
            let mut out = Element::zero();
            let mut pl = 1u32;
            for (level, c) in f.digits(e).into_iter().enumerate() {
                if c > 0 {
                    let img = self.image(i, level as u32);
                    if !img.is_zero() {
                        let rest = Element::monomial(Monomial::generator(n, i, e - pl), 1);
                        out = out.add(&f, &carrier.product(&rest, &img)?);
                    }
                }
                pl *= f.p();
            }
            return Ok(out);
        }
        let img = self.image(i, 0);
        if img.is_zero() {
            return Ok(img);
        }
        let odd = self.degree.rem_euclid(2) == 1 && g.is_odd();
        let mut out = Element::zero();
        for j in 0..e {
            let left = carrier.raw_power(i, j)?;
            let right = carrier.raw_power(i, e - 1 - j)?;
            let term = carrier.product(&carrier.product(&left, &img)?, &right)?;
            out.add_scaled(&f, &term, f.sign(odd && j % 2 == 1));
        }
        Ok(out)
    }

    pub fn apply(&self, carrier: &dyn GradedAlgebra, e: &Element) -> Result<Element> {
        let f = *carrier.spec().field();
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out.add_scaled(&f, &self.apply_monomial(carrier, m)?, c);
        }
        Ok(out)
    }
}

pub(crate) fn check_homogeneous(
    spec: &AlgebraSpec,
    name: &str,
    image: &Element,
    expected: i64,
) -> Result<()> {
    if image.is_zero() {
        return Ok(());
    }
    match spec.element_degree(image) {
        Some(d) if d as i64 == expected => Ok(()),
        _ => Err(Error::DegreeMismatch {
            name: name.to_string(),
            expected,
        }),
    }
}
