//! Multiplicative bigraded spectral-sequence pages, stored as subquotients of
//! the E2 basis, with Leibniz-extended differentials and abutment comparison.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp_linalg::{FpMatrix, Subspace};
use crate::graded_algebra::{
    AlgebraMap, AlgebraSpec, BigradedDims, Derivation, Element, GradedAlgebra, GradedDims, Kind,
    Monomial,
};

/// A module summand of a page: `algebra ⊗ extra`, shifted by `shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub label: String,
    pub shift: (u32, u32),
    pub extra: AlgebraSpec,
}

/// A basis element `alg · (block, extra)` of a page.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PageKey {
    pub block: usize,
    pub alg: Monomial,
    pub extra: Monomial,
}

/// A linear combination of page basis elements.
pub type PageElement = BTreeMap<PageKey, u32>;

/// Source bidegree, target bidegree, length r.
pub type DifferentialSlot = ((u32, u32), (u32, u32), u32);

/// Rank of d^r at each source bidegree.
pub type Ranks = BTreeMap<(u32, u32), usize>;

fn add_term(f: &crate::field::PrimeField, e: &mut PageElement, k: PageKey, c: u32) {
    if c == 0 {
        return;
    }
    let v = f.add(e.get(&k).copied().unwrap_or(0), c);
    if v == 0 {
        e.remove(&k);
    } else {
        e.insert(k, v);
    }
}

/// Cycles and boundaries of the current page inside the E2 basis of one bidegree.
#[derive(Clone, Debug)]
pub struct Cell {
    pub basis: Vec<PageKey>,
    pub cycles: Subspace,
    pub boundaries: Subspace,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.cycles.dim() - self.boundaries.dim()
    }
}

#[derive(Clone, Debug)]
pub struct Page {
    algebra: AlgebraSpec,
    blocks: Vec<Block>,
    index: u32,
    cap: Option<u32>,
    cells: BTreeMap<(u32, u32), Cell>,
}

impl Page {
    pub fn new(algebra: AlgebraSpec, blocks: Vec<Block>) -> Self {
        Page {
            algebra,
            blocks,
            index: 2,
            cap: None,
            cells: BTreeMap::new(),
        }
    }

    /// A page that is just an algebra (one unshifted block).
    pub fn from_algebra(algebra: AlgebraSpec) -> Self {
        let f = *algebra.field();
        Page::new(
            algebra,
            vec![Block {
                label: "1".into(),
                shift: (0, 0),
                extra: AlgebraSpec::ground(f),
            }],
        )
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn with_index(mut self, r: u32) -> Self {
        self.index = r;
        self
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    pub fn cells(&self) -> &BTreeMap<(u32, u32), Cell> {
        &self.cells
    }

    pub fn block_index(&self, label: &str) -> Result<usize> {
        self.blocks
            .iter()
            .position(|b| b.label == label)
            .ok_or_else(|| Error::UnknownGenerator(label.to_string()))
    }

    pub fn key_bidegree(&self, k: &PageKey) -> (u32, u32) {
        let b = &self.blocks[k.block];
        let (s1, t1) = self.algebra.bidegree(&k.alg);
        let (s2, t2) = b.extra.bidegree(&k.extra);
        (s1 + s2 + b.shift.0, t1 + t2 + b.shift.1)
    }

    pub fn total_degree(&self, k: &PageKey) -> u32 {
        let (s, t) = self.key_bidegree(k);
        s + t
    }

    /// Key from text: algebra monomial, block label, extra monomial.
    pub fn key(&self, alg: &str, block: &str, extra: &str) -> Result<PageKey> {
        let b = self.block_index(block)?;
        Ok(PageKey {
            block: b,
            alg: self.algebra.mono(alg)?,
            extra: self.blocks[b].extra.mono(extra)?,
        })
    }

    /// Key of an algebra monomial in the first block.
    pub fn alg_key(&self, alg: &str) -> Result<PageKey> {
        Ok(PageKey {
            block: 0,
            alg: self.algebra.mono(alg)?,
            extra: self.blocks[0].extra.one(),
        })
    }

    pub fn format_key(&self, k: &PageKey) -> String {
        let b = &self.blocks[k.block];
        let mut parts = Vec::new();
        if !k.alg.is_one() {
            parts.push(self.algebra.format_monomial(&k.alg));
        }
        if !k.extra.is_one() {
            parts.push(b.extra.format_monomial(&k.extra));
        }
        if b.label != "1" || parts.is_empty() {
            parts.push(format!("{{{}}}", b.label));
        }
        parts.join(" ")
    }

    pub fn format_element(&self, e: &PageElement) -> String {
        if e.is_empty() {
            return "0".into();
        }
        e.iter()
            .map(|(k, &c)| {
                if c == 1 {
                    self.format_key(k)
                } else {
                    format!("{c} {}", self.format_key(k))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// E2 basis of every bidegree with s + t <= cap.
    pub fn basis_upto(&self, cap: u32) -> BTreeMap<(u32, u32), Vec<PageKey>> {
        let alg = self.algebra.basis_bigraded(cap);
        let mut out: BTreeMap<(u32, u32), Vec<PageKey>> = BTreeMap::new();
        for (bi, b) in self.blocks.iter().enumerate() {
            let shift = b.shift.0 + b.shift.1;
            if shift > cap {
                continue;
            }
            let extra = b.extra.basis_bigraded(cap - shift);
            for (&(s1, t1), ms) in &alg {
                for (&(s2, t2), es) in &extra {
                    let (s, t) = (s1 + s2 + b.shift.0, t1 + t2 + b.shift.1);
                    if s + t > cap {
                        continue;
                    }
                    let cell = out.entry((s, t)).or_default();
                    for m in ms {
                        for e in es {
                            cell.push(PageKey {
                                block: bi,
                                alg: m.clone(),
                                extra: e.clone(),
                            });
                        }
                    }
                }
            }
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    /// The page with its E2 state materialized up to total degree `cap`
    /// (one more degree is kept internally so boundaries into `cap` are known).
    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cells = self
            .basis_upto(cap + 1)
            .into_iter()
            .map(|(k, basis)| {
                let n = basis.len();
                (
                    k,
                    Cell {
                        basis,
                        cycles: Subspace::full(n),
                        boundaries: Subspace::zero(n),
                    },
                )
            })
            .collect();
        self.cap = Some(cap);
        self
    }

    fn require_cap(&self) -> Result<u32> {
        self.cap
            .ok_or_else(|| Error::UnsupportedShape("page has no degree window".into()))
    }

    pub fn dims(&self) -> BigradedDims {
        let cap = self.cap.unwrap_or(0);
        let mut out = BigradedDims::new(cap);
        for (&(s, t), c) in &self.cells {
            out.add_at(s, t, c.dim());
        }
        out
    }

    pub fn total_dims(&self) -> GradedDims {
        self.dims().total()
    }

    /// Bigraded dims of the E2 basis without materializing state.
    pub fn e2_dims(&self, cap: u32) -> BigradedDims {
        let mut out = BigradedDims::new(cap);
        for ((s, t), v) in self.basis_upto(cap) {
            out.add_at(s, t, v.len());
        }
        out
    }

    /// Bidegree pairs where a d^r with r >= the current index could still be
    /// nonzero inside the window: both source and target cells nonzero.
    pub fn possible_differentials(&self) -> Vec<DifferentialSlot> {
        let mut out = Vec::new();
        let Some(cap) = self.cap else { return out };
        for (&(s, t), c) in &self.cells {
            if s + t > cap || c.dim() == 0 {
                continue;
            }
            for r in self.index.max(2)..=s {
                let tgt = (s - r, t + r - 1);
                if self.cells.get(&tgt).is_some_and(|tc| tc.dim() > 0) {
                    out.push(((s, t), tgt, r));
                }
            }
        }
        out
    }

    /// Representatives of a basis of the current page in bidegree (s, t):
    /// basis keys that are cycles, greedily, then reduced cycle vectors.
    pub fn representatives(&self, s: u32, t: u32) -> Vec<Vec<u32>> {
        let Some(cell) = self.cells.get(&(s, t)) else {
            return Vec::new();
        };
        let f = *self.algebra.field();
        let n = cell.basis.len();
        let mut span = cell.boundaries.clone();
        let mut reps = Vec::new();
        for i in 0..n {
            let mut v = vec![0; n];
            v[i] = 1;
            if cell.cycles.contains(&f, &v) && span.insert(&f, v.clone()) {
                reps.push(v);
            }
        }
        for z in cell.cycles.basis() {
            if span.insert(&f, z.clone()) {
                reps.push(z.clone());
            }
        }
        reps
    }

    pub fn element_from_coords(&self, s: u32, t: u32, v: &[u32]) -> PageElement {
        let mut out = PageElement::new();
        if let Some(cell) = self.cells.get(&(s, t)) {
            for (k, &c) in cell.basis.iter().zip(v) {
                if c != 0 {
                    out.insert(k.clone(), c);
                }
            }
        }
        out
    }
}

/// A generator-level differential declaration on page `r`.
#[derive(Clone, Debug)]
pub enum DifferentialRule {
    /// d^r on an algebra generator; for a divided generator, on gamma_{p^level}.
    Generator {
        r: u32,
        name: String,
        level: u32,
        target: Element,
        scalar: u32,
    },
    /// d^r on the basis element `1 · (block, extra)` of a module block.
    Block {
        r: u32,
        block: usize,
        extra: Monomial,
        target: PageElement,
        scalar: u32,
    },
}

impl DifferentialRule {
    pub fn generator(r: u32, name: &str, level: u32, target: Element) -> Self {
        DifferentialRule::Generator {
            r,
            name: name.to_string(),
            level,
            target,
            scalar: 1,
        }
    }

    pub fn block(r: u32, block: usize, extra: Monomial, target: PageElement) -> Self {
        DifferentialRule::Block {
            r,
            block,
            extra,
            target,
            scalar: 1,
        }
    }

    pub fn r(&self) -> u32 {
        match self {
            DifferentialRule::Generator { r, .. } | DifferentialRule::Block { r, .. } => *r,
        }
    }
}

/// The Leibniz extension of a rule set, evaluated on page basis elements.
pub struct Differential<'a> {
    page: &'a Page,
    on_algebra: Derivation,
    on_blocks: HashMap<(usize, Monomial), PageElement>,
    cache: std::cell::RefCell<HashMap<Monomial, Element>>,
}

impl<'a> Differential<'a> {
    pub fn new(page: &'a Page, rules: &[DifferentialRule]) -> Result<Self> {
        let alg = &page.algebra;
        let f = *alg.field();
        let r = page.index;
        let (es, et) = (-(r as i64), r as i64 - 1);
        let mut on_algebra = Derivation::new(-1);
        let mut on_blocks = HashMap::new();
        let violation = |desc: String, src: (u32, u32), tgt: (u32, u32)| Error::BidegreeViolation {
            source_desc: desc,
            ds: tgt.0 as i64 - src.0 as i64,
            dt: tgt.1 as i64 - src.1 as i64,
            es,
            et,
        };
        for rule in rules {
            if rule.r() != r {
                return Err(Error::BidegreeViolation {
                    source_desc: format!("a d^{} rule on page E^{r}", rule.r()),
                    ds: -(rule.r() as i64),
                    dt: rule.r() as i64 - 1,
                    es,
                    et,
                });
            }
            match rule {
                DifferentialRule::Generator {
                    name,
                    level,
                    target,
                    scalar,
                    ..
                } => {
                    let i = alg.index_of(name)?;
                    let g = &alg.generators()[i];
                    let k = if g.kind == Kind::Divided {
                        f.p().pow(*level)
                    } else {
                        1
                    };
                    let src = Monomial::generator(alg.ngens(), i, k);
                    let sb = alg.bidegree(&src);
                    if !target.is_zero() {
                        match alg.element_bidegree(target) {
                            Some(tb)
                                if tb.0 as i64 - sb.0 as i64 == es
                                    && tb.1 as i64 - sb.1 as i64 == et => {}
                            Some(tb) => return Err(violation(alg.format_monomial(&src), sb, tb)),
                            None => {
                                return Err(Error::DegreeMismatch {
                                    name: name.clone(),
                                    expected: (sb.0 + sb.1) as i64 - 1,
                                })
                            }
                        }
                    }
                    on_algebra.set_level(alg, name, *level, target.scale(&f, *scalar))?;
                }
                DifferentialRule::Block {
                    block,
                    extra,
                    target,
                    scalar,
                    ..
                } => {
                    let src = PageKey {
                        block: *block,
                        alg: alg.one(),
                        extra: extra.clone(),
                    };
                    let sb = page.key_bidegree(&src);
                    for k in target.keys() {
                        let tb = page.key_bidegree(k);
                        if tb.0 as i64 - sb.0 as i64 != es || tb.1 as i64 - sb.1 as i64 != et {
                            return Err(violation(page.format_key(&src), sb, tb));
                        }
                    }
                    let scaled = target
                        .iter()
                        .map(|(k, &c)| (k.clone(), f.mul(c, *scalar)))
                        .filter(|(_, c)| *c != 0)
                        .collect();
                    on_blocks.insert((*block, extra.clone()), scaled);
                }
            }
        }
        Ok(Differential {
            page,
            on_algebra,
            on_blocks,
            cache: Default::default(),
        })
    }

    pub fn on_algebra(&self) -> &Derivation {
        &self.on_algebra
    }

    fn alg_value(&self, m: &Monomial) -> Result<Element> {
        if let Some(v) = self.cache.borrow().get(m) {
            return Ok(v.clone());
        }
        let v = self.on_algebra.apply_monomial(&self.page.algebra, m)?;
        self.cache.borrow_mut().insert(m.clone(), v.clone());
        Ok(v)
    }

    /// d(alg · x) = d(alg) x + (-1)^{|alg|} alg d(x).
    pub fn apply_key(&self, k: &PageKey) -> Result<PageElement> {
        let alg = &self.page.algebra;
        let f = *alg.field();
        let mut out = PageElement::new();
        for (m, c) in self.alg_value(&k.alg)?.terms() {
            add_term(
                &f,
                &mut out,
                PageKey {
                    block: k.block,
                    alg: m.clone(),
                    extra: k.extra.clone(),
                },
                c,
            );
        }
        if let Some(img) = self.on_blocks.get(&(k.block, k.extra.clone())) {
            let sign = f.sign(alg.is_odd(&k.alg));
            for (tk, &c) in img {
                if let Some((pc, m)) = alg.multiply_monomials(&k.alg, &tk.alg) {
                    add_term(
                        &f,
                        &mut out,
                        PageKey {
                            block: tk.block,
                            alg: m,
                            extra: tk.extra.clone(),
                        },
                        f.mul(sign, f.mul(pc, c)),
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, e: &PageElement) -> Result<PageElement> {
        let f = *self.page.algebra.field();
        let mut out = PageElement::new();
        for (k, &c) in e {
            for (tk, tc) in self.apply_key(k)? {
                add_term(&f, &mut out, tk, f.mul(c, tc));
            }
        }
        Ok(out)
    }

    /// Compares d(m) with d(m1) m2 ± m1 d(m2) over splits of `m` that peel off
    /// part of one generator's power.
    pub fn check_leibniz(&self, m: &Monomial) -> Result<()> {
        let alg = &self.page.algebra;
        let f = *alg.field();
        let dm = self.alg_value(m)?;
        for i in 0..m.len() {
            for j in 1..=m.0[i] {
                let m1 = Monomial::generator(m.len(), i, j);
                let m2 = m.quotient(&m1);
                if m2.is_one() {
                    continue;
                }
                let Some((c, prod)) = alg.multiply_monomials(&m1, &m2) else {
                    continue;
                };
                debug_assert_eq!(&prod, m);
                let e1 = Element::monomial(m1.clone(), 1);
                let e2 = Element::monomial(m2.clone(), 1);
                let left = alg.multiply(&self.alg_value(&m1)?, &e2)?;
                let right = alg.multiply(&e1, &self.alg_value(&m2)?)?;
                let sum = left.add(&f, &right.scale(&f, f.sign(alg.is_odd(&m1))));
                if sum != dm.scale(&f, c) {
                    return Err(Error::LeibnizConflict(format!(
                        "{} split as {} · {}",
                        alg.format_monomial(m),
                        alg.format_monomial(&m1),
                        alg.format_monomial(&m2)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Values forced on zero products by the nilpotence relations g^h = 0
    /// must vanish: d(g^j) g^(h-j) ± g^j d(g^(h-j)) = 0.
    pub fn check_relations(&self) -> Result<()> {
        let alg = &self.page.algebra;
        let f = *alg.field();
        let n = alg.ngens();
        for (i, g) in alg.generators().iter().enumerate() {
            let h = match g.kind {
                Kind::Exterior => 2,
                Kind::Truncated(h) => h,
                _ => continue,
            };
            for j in 1..h {
                let m1 = Monomial::generator(n, i, j);
                let m2 = Monomial::generator(n, i, h - j);
                let left =
                    alg.multiply(&self.alg_value(&m1)?, &Element::monomial(m2.clone(), 1))?;
                let right =
                    alg.multiply(&Element::monomial(m1.clone(), 1), &self.alg_value(&m2)?)?;
                let sum = left.add(&f, &right.scale(&f, f.sign(alg.is_odd(&m1))));
                if !sum.is_zero() {
                    return Err(Error::LeibnizConflict(format!(
                        "{}^{h} = 0 but the Leibniz rule gives {}",
                        g.name,
                        alg.format_element(&sum)
                    )));
                }
            }
        }
        Ok(())
    }

    fn matrix(&self, src: &Cell, tgt: Option<&Cell>, at: (u32, u32)) -> Result<FpMatrix> {
        let empty = Vec::new();
        let tbasis = tgt.map(|c| &c.basis).unwrap_or(&empty);
        let index: HashMap<&PageKey, usize> =
            tbasis.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut cols = Vec::with_capacity(src.basis.len());
        for k in &src.basis {
            let mut v = vec![0; tbasis.len()];
            for (tk, c) in self.apply_key(k)? {
                let i = index.get(&tk).ok_or_else(|| {
                    Error::NotADifferential(format!(
                        "d({}) has a term {} outside bidegree ({}, {})",
                        self.page.format_key(k),
                        self.page.format_key(&tk),
                        at.0 as i64 - self.page.index as i64,
                        at.1 + self.page.index - 1
                    ))
                })?;
                v[*i] = c;
            }
            cols.push(v);
        }
        Ok(FpMatrix::from_columns(tbasis.len(), &cols))
    }
}

/// Extends `rules` by the Leibniz rule, checks it is a differential on the
/// current page, and returns the next page.
pub fn run_differential(page: &Page, rules: &[DifferentialRule]) -> Result<Page> {
    turn_page(page, rules).map(|(p, _)| p)
}

/// Like [`run_differential`], also returning the rank of d^r on the current
/// page for every source bidegree where it is nonzero.
pub fn turn_page(page: &Page, rules: &[DifferentialRule]) -> Result<(Page, Ranks)> {
    let cap = page.require_cap()?;
    let f = *page.algebra.field();
    let r = page.index;
    let d = Differential::new(page, rules)?;
    d.check_relations()?;
    let mut seen = std::collections::HashSet::new();
    for cell in page.cells.values() {
        for k in &cell.basis {
            if seen.insert(k.alg.clone()) {
                d.check_leibniz(&k.alg)?;
            }
        }
    }
    let target_of = |(s, t): (u32, u32)| (s >= r).then(|| (s - r, t + r - 1));
    let mut mats = BTreeMap::new();
    for (&at, cell) in &page.cells {
        let tgt = target_of(at).and_then(|k| page.cells.get(&k));
        mats.insert(at, d.matrix(cell, tgt, at)?);
    }
    let mut next = page.clone();
    let mut ranks = BTreeMap::new();
    for (&at, cell) in &page.cells {
        let m = &mats[&at];
        let Some(tk) = target_of(at) else {
            if !cell.cycles.map(&f, m).basis().is_empty() {
                return Err(Error::NotADifferential(format!("bidegree {at:?}")));
            }
            continue;
        };
        let Some(tcell) = page.cells.get(&tk) else {
            continue;
        };
        // d∘d = 0 on this cell
        if let Some(tm) = mats.get(&tk) {
            if tm.cols() > 0 && m.rows() > 0 && !tm.mul(&f, m)?.is_zero() {
                return Err(Error::NotADifferential(format!(
                    "bidegree ({}, {})",
                    at.0, at.1
                )));
            }
        }
        let dz = cell.cycles.map(&f, m);
        if !dz.is_subspace_of(&f, &tcell.cycles)
            || !cell
                .boundaries
                .map(&f, m)
                .is_subspace_of(&f, &tcell.boundaries)
        {
            return Err(Error::NotADifferential(format!(
                "the differential from ({}, {}) does not respect the current page",
                at.0, at.1
            )));
        }
        let rank = dz.sum(&f, &tcell.boundaries).dim() - tcell.boundaries.dim();
        if rank > 0 {
            ranks.insert(at, rank);
        }
        let nc = next.cells.get_mut(&at).expect("same cells");
        nc.cycles = cell.cycles.preimage_within(&f, m, &tcell.boundaries);
        let nt = next.cells.get_mut(&tk).expect("same cells");
        nt.boundaries = nt.boundaries.sum(&f, &dz);
    }
    next.index = r + 1;
    debug_assert!(next.cap == Some(cap));
    Ok((next, ranks))
}

/// One member of a rule family: d(source) should be a nonzero multiple of
/// `expected`, or zero when `expected` is `None`.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub k: u32,
    pub source: PageKey,
    pub expected: Option<PageKey>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    /// `(k, scalar)`; the scalar is 0 for members expected to be cycles.
    pub scalars: Vec<(u32, u32)>,
}

pub fn verify_rule_family(
    page: &Page,
    rules: &[DifferentialRule],
    members: &[FamilyMember],
) -> Result<FamilyReport> {
    let d = Differential::new(page, rules)?;
    let mut scalars = Vec::new();
    for mem in members {
        let value = d.apply_key(&mem.source)?;
        let ok = match &mem.expected {
            None => value.is_empty().then_some(0),
            Some(t) => match value.iter().next() {
                Some((k, &c)) if value.len() == 1 && k == t => Some(c),
                _ => None,
            },
        };
        match ok {
            Some(c) => scalars.push((mem.k, c)),
            None => {
                return Err(Error::FamilyViolation {
                    k: mem.k,
                    value: page.format_element(&value),
                })
            }
        }
    }
    Ok(FamilyReport { scalars })
}

/// The abutment of a spectral sequence and a chosen representation of page
/// classes in it: algebra generators go through `algebra_images`, block
/// basis elements through `block_images[block][extra]`.
#[derive(Clone, Debug)]
pub struct AbutmentSpec {
    pub target: AlgebraSpec,
    pub algebra_images: BTreeMap<String, Element>,
    pub block_images: Vec<BTreeMap<Monomial, Element>>,
    pub filtration_assignment: BTreeMap<String, u32>,
}

impl AbutmentSpec {
    /// Representation for a single-block page: block unit maps to 1.
    pub fn for_algebra(
        page: &Page,
        target: AlgebraSpec,
        images: &[(&str, &str)],
        filtration: &[(&str, u32)],
    ) -> Result<Self> {
        let mut algebra_images = BTreeMap::new();
        for (n, e) in images {
            algebra_images.insert(n.to_string(), target.elem(e)?);
        }
        let mut unit = BTreeMap::new();
        unit.insert(page.blocks[0].extra.one(), target.unit());
        Ok(AbutmentSpec {
            target,
            algebra_images,
            block_images: vec![unit],
            filtration_assignment: filtration
                .iter()
                .map(|(n, s)| (n.to_string(), *s))
                .collect(),
        })
    }
}

/// `factors[0] · factors[1] · ...` equals a unit times `detected_by` in the
/// abutment, in lower filtration than the factors.
#[derive(Clone, Debug)]
pub struct ExtensionRule {
    pub label: String,
    pub factors: Vec<PageKey>,
    pub detected_by: PageKey,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeRow {
    pub n: u32,
    pub expected: usize,
    pub actual: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbutmentReport {
    pub dims: Vec<DegreeRow>,
    pub first_mismatch: Option<u32>,
    /// Degrees where the representation is not an isomorphism from the page.
    pub representation_failures: Vec<u32>,
    pub extensions: Vec<NamedCheck>,
    pub filtrations: Vec<NamedCheck>,
    pub possible_differentials: usize,
}

impl AbutmentReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
            && self.representation_failures.is_empty()
            && self.extensions.iter().all(|c| c.passed)
            && self.filtrations.iter().all(|c| c.passed)
    }

    pub fn require_dims(&self) -> Result<()> {
        match self.first_mismatch {
            None => Ok(()),
            Some(n) => {
                let row = &self.dims[n as usize];
                Err(Error::DimMismatch {
                    degree: n,
                    expected: row.expected,
                    actual: row.actual,
                })
            }
        }
    }
}

struct Representation<'a> {
    page: &'a Page,
    spec: &'a AbutmentSpec,
    map: AlgebraMap,
}

impl<'a> Representation<'a> {
    fn new(page: &'a Page, spec: &'a AbutmentSpec) -> Result<Self> {
        let map = AlgebraMap::new(&page.algebra, &spec.target, &spec.algebra_images)?;
        Ok(Representation { page, spec, map })
    }

    fn key(&self, k: &PageKey) -> Result<Element> {
        let a = self
            .map
            .apply_monomial(&self.page.algebra, &self.spec.target, &k.alg)?;
        let b = self
            .spec
            .block_images
            .get(k.block)
            .and_then(|m| m.get(&k.extra))
            .ok_or_else(|| {
                Error::UnsupportedShape(format!(
                    "no abutment image for {}",
                    self.page.format_key(k)
                ))
            })?;
        self.spec.target.product(&a, b)
    }

    fn element(&self, e: &PageElement) -> Result<Element> {
        let f = *self.spec.target.field();
        let mut out = Element::zero();
        for (k, &c) in e {
            out.add_scaled(&f, &self.key(k)?, c);
        }
        Ok(out)
    }
}

/// Compares a stable page with its abutment: total dimensions, the chosen
/// representation, declared multiplicative extensions and the filtration in
/// which each abutment generator is detected.
pub fn compare_abutment(
    einfty: &Page,
    abutment: &AbutmentSpec,
    extensions: &[ExtensionRule],
) -> Result<AbutmentReport> {
    let cap = einfty.require_cap()?;
    let target = &abutment.target;
    let f = *target.field();
    let expected = target.hilbert(cap);
    let actual = einfty.total_dims();
    let dims: Vec<DegreeRow> = (0..=cap)
        .map(|n| DegreeRow {
            n,
            expected: expected.get(n),
            actual: actual.get(n),
        })
        .collect();
    let first_mismatch = dims.iter().find(|r| r.expected != r.actual).map(|r| r.n);

    let rep = Representation::new(einfty, abutment)?;
    // representatives by total degree, with their filtration
    let mut reps: BTreeMap<u32, Vec<(u32, Element)>> = BTreeMap::new();
    for &(s, t) in einfty.cells.keys() {
        if s + t > cap {
            continue;
        }
        for v in einfty.representatives(s, t) {
            let e = einfty.element_from_coords(s, t, &v);
            reps.entry(s + t).or_default().push((s, rep.element(&e)?));
        }
    }
    let mut representation_failures = Vec::new();
    for n in 0..=cap {
        let basis = target.basis(n);
        let list = reps.get(&n).map(|v| &v[..]).unwrap_or(&[]);
        let idx = crate::graded_algebra::BasisIndex::new(&basis);
        let mut span = Subspace::zero(basis.len());
        let mut injective = true;
        for (_, e) in list {
            injective &= span.insert(&f, idx.coordinates(e)?);
        }
        if !injective || span.dim() != basis.len() {
            representation_failures.push(n);
        }
    }

    let mut ext_checks = Vec::new();
    for ext in extensions {
        let deg: u32 = ext.factors.iter().map(|k| einfty.total_degree(k)).sum();
        let filt: u32 = ext.factors.iter().map(|k| einfty.key_bidegree(k).0).sum();
        let (ds, dt) = einfty.key_bidegree(&ext.detected_by);
        if deg != ds + dt {
            return Err(Error::ExtensionDegreeError(format!(
                "{}: factors have total degree {deg}, target {}",
                ext.label,
                ds + dt
            )));
        }
        if filt <= ds {
            return Err(Error::ExtensionDegreeError(format!(
                "{}: no filtration jump ({filt} -> {ds})",
                ext.label
            )));
        }
        let mut prod = target.unit();
        for k in &ext.factors {
            prod = target.product(&prod, &rep.key(k)?)?;
        }
        let det = rep.key(&ext.detected_by)?;
        let passed = !det.is_zero() && (0..f.p()).any(|c| c != 0 && det.scale(&f, c) == prod);
        ext_checks.push(NamedCheck {
            name: ext.label.clone(),
            passed,
            detail: format!(
                "product {} vs {}",
                target.format_element(&prod),
                target.format_element(&det)
            ),
        });
    }

    let mut filtrations = Vec::new();
    for (name, &assigned) in &abutment.filtration_assignment {
        let g = target.gen(name)?;
        let n = target.element_degree(&g).unwrap_or(0);
        let detected = if n > cap {
            None
        } else {
            let basis = target.basis(n);
            let idx = crate::graded_algebra::BasisIndex::new(&basis);
            let gv = idx.coordinates(&g)?;
            let mut list: Vec<&(u32, Element)> =
                reps.get(&n).map(|v| v.iter().collect()).unwrap_or_default();
            list.sort_by_key(|(s, _)| *s);
            let mut span = Subspace::zero(basis.len());
            let mut found = None;
            for (s, e) in list {
                span.insert(&f, idx.coordinates(e)?);
                if span.contains(&f, &gv) {
                    found = Some(*s);
                    break;
                }
            }
            found
        };
        filtrations.push(NamedCheck {
            name: format!("{name} detected in filtration {assigned}"),
            passed: detected == Some(assigned) || n > cap,
            detail: match detected {
                Some(s) => format!("lowest filtration containing {name}: {s}"),
                None if n > cap => "beyond the window".into(),
                None => format!("{name} is not in the span of the representatives"),
            },
        });
    }

    Ok(AbutmentReport {
        dims,
        first_mismatch,
        representation_failures,
        extensions: ext_checks,
        filtrations,
        possible_differentials: einfty.possible_differentials().len(),
    })
}

#[cfg(test)]
mod tests;
