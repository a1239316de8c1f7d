//! Tor over monomial algebras: Koszul/Tate resolutions, a homology oracle,
//! and the closed forms used for E2-terms.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fp_linalg::{homology_dim, FpMatrix, Subspace};
use crate::graded_algebra::{
    hilbert_bigraded, map_matrix, AlgebraMap, AlgebraSpec, BigradedDims, Derivation, Element,
    GeneratorSpec, Kind, Monomial,
};
use crate::spectral_sequence::{Block, Page};

/// A summand of a module over a monomial algebra: a copy of the subalgebra on
/// `free_over`, shifted up by `shift`, with all other generators acting by zero.
/// An empty `free_over` is the trivial module F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub label: String,
    pub shift: u32,
    pub free_over: BTreeSet<String>,
}

impl Summand {
    pub fn trivial(label: impl Into<String>, shift: u32) -> Self {
        Summand {
            label: label.into(),
            shift,
            free_over: BTreeSet::new(),
        }
    }

    pub fn free(label: impl Into<String>, shift: u32, over: &[&str]) -> Self {
        Summand {
            label: label.into(),
            shift,
            free_over: over.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// `coefficients ⊗ (⊕ summands)`, where `coefficients` is a graded vector space
/// (written as an algebra) on which everything acts trivially. Coefficient
/// factors of the ground algebra named in `free_coefficients` act freely.
#[derive(Clone, Debug)]
pub struct ModuleSpec {
    pub coefficients: AlgebraSpec,
    pub summands: Vec<Summand>,
    pub free_coefficients: BTreeSet<String>,
}

impl ModuleSpec {
    /// The trivial module F_p.
    pub fn ground(field: crate::field::PrimeField) -> Self {
        Self::trivial(AlgebraSpec::ground(field))
    }

    /// A graded vector space with trivial action.
    pub fn trivial(coefficients: AlgebraSpec) -> Self {
        ModuleSpec {
            coefficients,
            summands: vec![Summand::trivial("1", 0)],
            free_coefficients: BTreeSet::new(),
        }
    }

    pub fn with_summands(coefficients: AlgebraSpec, summands: Vec<Summand>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &summands {
            if !seen.insert(&s.label) {
                return Err(Error::DuplicateName(s.label.clone()));
            }
        }
        Ok(ModuleSpec {
            coefficients,
            summands,
            free_coefficients: BTreeSet::new(),
        })
    }

    pub fn free_on_coefficients(mut self, names: &[&str]) -> Self {
        self.free_coefficients
            .extend(names.iter().map(|s| s.to_string()));
        self
    }

    fn validate(&self, algebra: &AlgebraSpec) -> Result<()> {
        for s in &self.summands {
            for g in &s.free_over {
                algebra.index_of(g)?;
            }
        }
        for c in &self.free_coefficients {
            if !algebra.coefficients().iter().any(|f| &f.name == c) {
                return Err(Error::UnknownGenerator(c.clone()));
            }
        }
        Ok(())
    }
}

fn tate_name(g: &str) -> String {
    format!("[{g}]")
}

/// Tate generator for `g`: exterior `[x]` for even `x`, divided `[y]` for odd `y`,
/// both in filtration 1.
fn tate_generator(g: &GeneratorSpec) -> Result<GeneratorSpec> {
    if g.filtration != 0 {
        return Err(Error::UnsupportedShape(format!(
            "generator {} already has positive filtration",
            g.name
        )));
    }
    match g.kind {
        Kind::Polynomial => {
            Ok(GeneratorSpec::exterior(tate_name(&g.name), g.degree).in_filtration(1))
        }
        Kind::Exterior => Ok(GeneratorSpec::divided(tate_name(&g.name), g.degree).in_filtration(1)),
        _ => Err(Error::UnsupportedKind(format!("{} ({})", g.name, g.kind))),
    }
}

/// A bigraded commutative DG algebra whose differential has bidegree (-1, 0).
#[derive(Clone, Debug)]
pub struct DgAlgebra {
    pub spec: AlgebraSpec,
    pub d: Derivation,
}

/// Cycles and boundaries in one bidegree, in coordinates of the monomial basis.
#[derive(Clone, Debug)]
pub struct HomologyCell {
    pub basis: Vec<Monomial>,
    pub cycles: Subspace,
    pub boundaries: Subspace,
}

impl HomologyCell {
    pub fn dim(&self) -> usize {
        self.cycles.dim() - self.boundaries.dim()
    }
}

#[derive(Clone, Debug)]
pub struct DgHomology {
    pub cap: u32,
    pub cells: BTreeMap<(u32, u32), HomologyCell>,
}

impl DgHomology {
    pub fn dims(&self) -> BigradedDims {
        let mut out = BigradedDims::new(self.cap);
        for (&(s, t), c) in &self.cells {
            out.add_at(s, t, c.dim());
        }
        out
    }
}

impl DgAlgebra {
    pub fn new(spec: AlgebraSpec, d: Derivation) -> Result<Self> {
        if d.degree() != -1 {
            return Err(Error::NotADifferential(format!(
                "differential has degree {}",
                d.degree()
            )));
        }
        Ok(DgAlgebra { spec, d })
    }

    fn matrix(
        &self,
        basis: &BTreeMap<(u32, u32), Vec<Monomial>>,
        s: u32,
        t: u32,
    ) -> Result<FpMatrix> {
        let empty = Vec::new();
        let src = basis.get(&(s, t)).unwrap_or(&empty);
        let tgt = if s == 0 {
            &empty
        } else {
            basis.get(&(s - 1, t)).unwrap_or(&empty)
        };
        map_matrix(src, tgt, |m| self.d.apply_monomial(&self.spec, m)).map_err(|e| match e {
            Error::DimensionMismatch(_) => Error::NotADifferential(format!(
                "bidegree ({s}, {t}): the image leaves bidegree ({}, {t})",
                s.saturating_sub(1)
            )),
            other => other,
        })
    }

    /// Homology in bidegrees with s + t <= cap, checking d∘d = 0 along the way.
    pub fn homology(&self, cap: u32) -> Result<DgHomology> {
        let f = *self.spec.field();
        let basis = self.spec.basis_bigraded(cap + 1);
        let mut mats = BTreeMap::new();
        for &(s, t) in basis.keys() {
            mats.insert((s, t), self.matrix(&basis, s, t)?);
        }
        let mut cells = BTreeMap::new();
        for (&(s, t), b) in &basis {
            if s + t > cap {
                continue;
            }
            let d_out = &mats[&(s, t)];
            let d_in = match mats.get(&(s + 1, t)) {
                Some(m) => m.clone(),
                None => FpMatrix::zeros(b.len(), 0),
            };
            homology_dim(&d_in, d_out, &f).map_err(|e| match e {
                Error::CompositionNonzero => {
                    Error::NotADifferential(format!("d∘d != 0 at bidegree ({}, {t})", s + 1))
                }
                other => other,
            })?;
            let cycles = Subspace::spanned_by(&f, b.len(), d_out.kernel(&f));
            let boundaries = d_in.image(&f);
            cells.insert(
                (s, t),
                HomologyCell {
                    basis: b.clone(),
                    cycles,
                    boundaries,
                },
            );
        }
        Ok(DgHomology { cap, cells })
    }
}

/// Rank of the map induced on homology by a multiplicative chain map, per bidegree.
/// Returns `(dim source homology, rank)` for each bidegree with nonzero source.
pub fn induced_ranks(
    source: &DgAlgebra,
    hs: &DgHomology,
    target: &DgAlgebra,
    ht: &DgHomology,
    map: &AlgebraMap,
) -> Result<BTreeMap<(u32, u32), (usize, usize)>> {
    let f = *source.spec.field();
    let mut out = BTreeMap::new();
    for (&(s, t), cell) in &hs.cells {
        let dim = cell.dim();
        if dim == 0 {
            continue;
        }
        let Some(tcell) = ht.cells.get(&(s, t)) else {
            out.insert((s, t), (dim, 0));
            continue;
        };
        let m = map_matrix(&cell.basis, &tcell.basis, |x| {
            map.apply_monomial(&source.spec, &target.spec, x)
        })?;
        // rank of cycles -> H(target) = dim(f(Z) + B) - dim B
        let image = cell.cycles.map(&f, &m);
        let rank = image.sum(&f, &tcell.boundaries).dim() - tcell.boundaries.dim();
        out.insert((s, t), (dim, rank));
    }
    Ok(out)
}

/// Checks that a chain map commutes with the differentials on generators.
pub fn check_chain_map(source: &DgAlgebra, target: &DgAlgebra, map: &AlgebraMap) -> Result<bool> {
    let f = *target.spec.field();
    for (i, g) in source.spec.generators().iter().enumerate() {
        let levels = if g.kind == Kind::Divided { 3 } else { 1 };
        for level in 0..levels {
            let k = f.p().pow(level);
            let m = Monomial::generator(
                source.spec.ngens(),
                i,
                if g.kind == Kind::Divided { k } else { 1 },
            );
            let a = map.apply(
                &source.spec,
                &target.spec,
                &source.d.apply_monomial(&source.spec, &m)?,
            )?;
            let b = target.d.apply(
                &target.spec,
                &map.apply_monomial(&source.spec, &target.spec, &m)?,
            )?;
            if a != b {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The Tate differential: d[x] = x, d(gamma_{p^i}[y]) = gamma_{p^i - 1}[y] y, on
/// the Tate generators of `gens`, valued in `total` (which contains both).
fn tate_differential(
    total: &AlgebraSpec,
    gens: &[GeneratorSpec],
    acts: &dyn Fn(&str) -> Result<Element>,
    cap: u32,
) -> Result<Derivation> {
    let f = *total.field();
    let n = total.ngens();
    let mut d = Derivation::new(-1);
    for g in gens {
        let tn = tate_name(&g.name);
        let ti = total.index_of(&tn)?;
        let action = acts(&g.name)?;
        match g.kind {
            Kind::Polynomial => d.set(total, &tn, action)?,
            Kind::Exterior => {
                let mut pl = 1u32;
                let mut level = 0;
                while pl * (g.degree + 1) <= cap + 1 {
                    let lower = Element::monomial(Monomial::generator(n, ti, pl - 1), 1);
                    let img = total.multiply(&lower, &action)?;
                    d.set_level(total, &tn, level, img)?;
                    level += 1;
                    pl *= f.p();
                }
            }
            _ => return Err(Error::UnsupportedKind(format!("{} ({})", g.name, g.kind))),
        }
    }
    Ok(d)
}

/// A free resolution `A ⊗ Tate(A) -> F_p` truncated at a degree cap.
#[derive(Clone, Debug)]
pub struct ChainComplexOfFrees {
    pub algebra: AlgebraSpec,
    pub complex: DgAlgebra,
    pub cap: u32,
}

impl ChainComplexOfFrees {
    /// Free generators (monomials in the Tate variables) in filtration `s`,
    /// with their internal degrees.
    pub fn generators(&self, s: u32) -> Vec<(Monomial, u32)> {
        let tate = AlgebraSpec::new(
            *self.algebra.field(),
            self.complex.spec.generators()[self.algebra.ngens()..].to_vec(),
        )
        .expect("tate generators are valid");
        tate.basis_bigraded(self.cap)
            .into_iter()
            .filter(|((ss, _), _)| *ss == s)
            .flat_map(|((_, t), ms)| ms.into_iter().map(move |m| (m, t)))
            .collect()
    }

    /// Whether homology is F_p in bidegree (0, 0) and zero elsewhere up to the cap.
    pub fn is_exact(&self) -> Result<bool> {
        let h = self.complex.homology(self.cap)?;
        Ok(h.cells
            .iter()
            .all(|(&k, c)| c.dim() == usize::from(k == (0, 0))))
    }
}

pub fn resolution(algebra: &AlgebraSpec, cap: u32) -> Result<ChainComplexOfFrees> {
    let tate = algebra
        .generators()
        .iter()
        .map(tate_generator)
        .collect::<Result<Vec<_>>>()?;
    let total = algebra.tensor(&AlgebraSpec::new(*algebra.field(), tate)?)?;
    let d = tate_differential(&total, algebra.generators(), &|name| total.gen(name), cap)?;
    Ok(ChainComplexOfFrees {
        algebra: algebra.clone(),
        complex: DgAlgebra::new(total, d)?,
        cap,
    })
}

/// Which argument gets resolved by a Koszul/Tate complex in the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_coefficients(algebra: &AlgebraSpec, left: &ModuleSpec, right: &ModuleSpec) -> Result<()> {
    left.validate(algebra)?;
    right.validate(algebra)?;
    for c in algebra.coefficients() {
        if !left.free_coefficients.contains(&c.name) && !right.free_coefficients.contains(&c.name) {
            return Err(Error::UnsupportedShape(format!(
                "coefficient factor {} acts freely on neither module",
                c.name
            )));
        }
    }
    Ok(())
}

/// Tor of one summand pair, by resolving the summand on `side` with
/// `A ⊗ Tate(generators acting trivially on it)` and tensoring with the other.
pub fn summand_complex(
    algebra: &AlgebraSpec,
    kept: &BTreeSet<String>,
    resolved: &BTreeSet<String>,
    cap: u32,
) -> Result<DgAlgebra> {
    let f = *algebra.field();
    let kept_gens: Vec<GeneratorSpec> = algebra
        .generators()
        .iter()
        .filter(|g| kept.contains(&g.name))
        .cloned()
        .collect();
    let koszul_on: Vec<GeneratorSpec> = algebra
        .generators()
        .iter()
        .filter(|g| !resolved.contains(&g.name))
        .cloned()
        .collect();
    let tate = koszul_on
        .iter()
        .map(tate_generator)
        .collect::<Result<Vec<_>>>()?;
    let mut gens = kept_gens;
    gens.extend(tate);
    let total = AlgebraSpec::new(f, gens)?;
    let d = tate_differential(
        &total,
        &koszul_on,
        &|name| {
            if kept.contains(name) {
                total.gen(name)
            } else {
                Ok(Element::zero())
            }
        },
        cap,
    )?;
    DgAlgebra::new(total, d)
}

/// Bigraded Tor dimensions computed by taking homology of an explicit complex.
pub fn tor_oracle_resolving(
    algebra: &AlgebraSpec,
    left: &ModuleSpec,
    right: &ModuleSpec,
    cap: u32,
    side: Side,
) -> Result<BigradedDims> {
    check_coefficients(algebra, left, right)?;
    for g in algebra.generators() {
        if !matches!(g.kind, Kind::Polynomial | Kind::Exterior) {
            return Err(Error::UnsupportedKind(format!("{} ({})", g.name, g.kind)));
        }
    }
    let mut total = BigradedDims::new(cap);
    for a in &left.summands {
        for b in &right.summands {
            let shift = a.shift + b.shift;
            if shift > cap {
                continue;
            }
            let (kept, resolved) = match side {
                Side::Right => (&a.free_over, &b.free_over),
                Side::Left => (&b.free_over, &a.free_over),
            };
            let h = summand_complex(algebra, kept, resolved, cap - shift)?.homology(cap - shift)?;
            for ((s, t), d) in h.dims().entries() {
                total.add_at(s, t + shift, d);
            }
        }
    }
    let vm = hilbert_bigraded(&left.coefficients, cap);
    let vn = hilbert_bigraded(&right.coefficients, cap);
    Ok(total.convolve(&vm).convolve(&vn))
}

pub fn tor_oracle(
    algebra: &AlgebraSpec,
    left: &ModuleSpec,
    right: &ModuleSpec,
    cap: u32,
) -> Result<BigradedDims> {
    tor_oracle_resolving(algebra, left, right, cap, Side::Right)
}

/// Closed-form Tor: the tensor product of the two coefficient spaces, times one
/// block per summand pair carrying P/E on generators free on both sides and
/// E([x]) or Γ([y]) on generators free on neither.
pub fn tor_closed_form(
    algebra: &AlgebraSpec,
    left: &ModuleSpec,
    right: &ModuleSpec,
) -> Result<Page> {
    check_coefficients(algebra, left, right)?;
    let f = *algebra.field();
    for g in algebra.generators() {
        if !matches!(g.kind, Kind::Polynomial | Kind::Exterior) {
            return Err(Error::UnsupportedShape(format!(
                "generator {} of kind {} in the ground algebra",
                g.name, g.kind
            )));
        }
    }
    let common = left.coefficients.tensor(&right.coefficients)?;
    let mut blocks = Vec::new();
    for a in &left.summands {
        for b in &right.summands {
            let mut gens = Vec::new();
            for g in algebra.generators() {
                match (a.free_over.contains(&g.name), b.free_over.contains(&g.name)) {
                    (true, true) => gens.push(g.clone()),
                    (false, false) => gens.push(tate_generator(g)?),
                    _ => {}
                }
            }
            let label = match (a.label.as_str(), b.label.as_str()) {
                ("1", l) | (l, "1") => l.to_string(),
                (l, r) => format!("{l} ⊗ {r}"),
            };
            blocks.push(Block {
                label,
                shift: (0, a.shift + b.shift),
                extra: AlgebraSpec::new(f, gens)?,
            });
        }
    }
    if let [only] = &blocks[..] {
        if only.shift == (0, 0) {
            let folded = common.tensor(&only.extra)?;
            return Ok(Page::from_algebra(folded));
        }
    }
    Ok(Page::new(common, blocks))
}

/// E2 of a Tor computation over E(y) with a module given as free and trivial
/// summands, tensored with a coefficient space.
pub fn tor_exterior_module(
    y: &GeneratorSpec,
    summands: Vec<Summand>,
    coefficients: &AlgebraSpec,
) -> Result<Page> {
    if y.kind != Kind::Exterior {
        return Err(Error::UnsupportedShape(format!(
            "{} is not exterior",
            y.name
        )));
    }
    let f = *coefficients.field();
    for s in &summands {
        if s.free_over.iter().any(|g| g != &y.name) {
            return Err(Error::UnsupportedShape(format!(
                "summand {} is free over something other than {}",
                s.label, y.name
            )));
        }
    }
    let algebra = AlgebraSpec::new(f, vec![y.clone()])?;
    let module = ModuleSpec::with_summands(coefficients.clone(), summands)?;
    tor_closed_form(&algebra, &module, &ModuleSpec::ground(f))
}
