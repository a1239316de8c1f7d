//! Degreewise exactness of a long exact sequence
//! `... -> C_n --tau--> A_n --rho--> B_n --del--> C_{n-1} -> ...`
//! given by explicit maps on monomial bases.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::fp_linalg::{FpMatrix, Subspace};
use crate::graded_algebra::{
    map_matrix, morphism_report, AlgebraMap, AlgebraSpec, Element, GeneratorSpec, GradedAlgebra,
    Monomial,
};
use crate::presentation::{make_theta, theta_a, theta_b, Presentation};

pub type BasisMap = Box<dyn Fn(&Monomial) -> Result<Element>>;

pub struct LongExactSpec {
    pub a: Box<dyn GradedAlgebra>,
    pub b: Box<dyn GradedAlgebra>,
    pub c: Box<dyn GradedAlgebra>,
    /// Algebra map A -> B.
    pub rho: AlgebraMap,
    /// B_n -> C_{n-1}.
    pub del: BasisMap,
    /// C_n -> A_n.
    pub tau: BasisMap,
    /// How A acts on C, for the module-map checks on `del` and `tau`.
    pub c_action: Option<AlgebraMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JointRow {
    pub n: u32,
    pub joint: String,
    pub image: usize,
    pub kernel: usize,
    /// Image and kernel are the same subspace, not just equal in dimension.
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub rho_relation_failures: Vec<String>,
    pub module_failures: Vec<String>,
    pub joints: Vec<JointRow>,
    /// Degrees where the rank-nullity bookkeeping
    /// dim A_n = rk tau_n + rk rho_n, dim B_n = rk rho_n + rk del_n,
    /// dim C_n = rk del_{n+1} + rk tau_n fails.
    pub counting_failures: Vec<u32>,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.joints.iter().all(|j| j.equal) && self.counting_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.exact() && self.rho_relation_failures.is_empty() && self.module_failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<Error> {
        self.joints
            .iter()
            .find(|j| !j.equal)
            .map(|j| Error::InexactAt {
                degree: j.n,
                joint: j.joint.clone(),
                image: j.image,
                kernel: j.kernel,
            })
    }
}

struct Matrices {
    a: Vec<Vec<Monomial>>,
    b: Vec<Vec<Monomial>>,
    c: Vec<Vec<Monomial>>,
    tau: Vec<FpMatrix>,
    rho: Vec<FpMatrix>,
    /// del[n]: B_n -> C_{n-1}; del[0] maps to the zero space.
    del: Vec<FpMatrix>,
}

fn matrices(spec: &LongExactSpec, cap: u32) -> Result<Matrices> {
    let a: Vec<_> = (0..=cap).map(|n| spec.a.basis(n)).collect();
    let b: Vec<_> = (0..=cap).map(|n| spec.b.basis(n)).collect();
    let c: Vec<_> = (0..=cap).map(|n| spec.c.basis(n)).collect();
    let mut tau = Vec::new();
    let mut rho = Vec::new();
    let mut del = Vec::new();
    for n in 0..=cap as usize {
        tau.push(map_matrix(&c[n], &a[n], |m| {
            spec.a.normalize(spec.tau.as_ref()(m)?)
        })?);
        rho.push(map_matrix(&a[n], &b[n], |m| {
            spec.rho.apply_monomial(spec.a.as_ref(), spec.b.as_ref(), m)
        })?);
        let empty = Vec::new();
        let tgt = if n == 0 { &empty } else { &c[n - 1] };
        del.push(map_matrix(&b[n], tgt, |m| {
            spec.c.normalize(spec.del.as_ref()(m)?)
        })?);
    }
    Ok(Matrices {
        a,
        b,
        c,
        tau,
        rho,
        del,
    })
}

fn joint(f: &PrimeField, n: u32, name: &str, into: &FpMatrix, out: &FpMatrix) -> JointRow {
    let image = into.image(f);
    let kernel = Subspace::spanned_by(f, out.cols(), out.kernel(f));
    JointRow {
        n,
        joint: name.into(),
        image: image.dim(),
        kernel: kernel.dim(),
        equal: image.same_as(f, &kernel),
    }
}

/// Checks every joint in degrees `n <= cap`, plus the algebra-map property of
/// rho and the module-map property of del and tau over generators of A.
pub fn exactness_report(spec: &LongExactSpec, cap: u32) -> Result<ExactnessReport> {
    let f = *spec.a.spec().field();
    let rho_rep = morphism_report(&spec.rho, spec.a.as_ref(), spec.b.as_ref(), 0)?;
    let rho_relation_failures = rho_rep
        .relation_failures
        .iter()
        .map(|r| format!("{}: {}", r.label, r.residual))
        .collect();
    let mx = matrices(spec, cap)?;
    let mut joints = Vec::new();
    let mut counting_failures = Vec::new();
    for n in 0..=cap as usize {
        let nn = n as u32;
        joints.push(joint(&f, nn, "A", &mx.tau[n], &mx.rho[n]));
        joints.push(joint(&f, nn, "B", &mx.rho[n], &mx.del[n]));
        if n >= 1 {
            joints.push(joint(&f, nn - 1, "C", &mx.del[n], &mx.tau[n - 1]));
        }
        let rt = mx.tau[n].rank(&f);
        let rr = mx.rho[n].rank(&f);
        let rd = mx.del[n].rank(&f);
        let mut ok = mx.a[n].len() == rt + rr && mx.b[n].len() == rr + rd;
        if n >= 1 {
            ok &= mx.c[n - 1].len() == rd + mx.tau[n - 1].rank(&f);
        }
        if !ok {
            counting_failures.push(nn);
        }
    }
    let module_failures = match &spec.c_action {
        Some(phi) => module_checks(spec, phi, cap)?,
        None => Vec::new(),
    };
    Ok(ExactnessReport {
        rho_relation_failures,
        module_failures,
        joints,
        counting_failures,
    })
}

/// Like [`exactness_report`], failing with `InexactAt` at the first bad joint.
pub fn check_les(spec: &LongExactSpec, cap: u32) -> Result<ExactnessReport> {
    let rep = exactness_report(spec, cap)?;
    match rep.first_failure() {
        Some(e) => Err(e),
        None => Ok(rep),
    }
}

fn proportional(f: &PrimeField, x: &Element, y: &Element) -> bool {
    if x.is_zero() || y.is_zero() {
        return x.is_zero() && y.is_zero();
    }
    (1..f.p()).any(|c| &y.scale(f, c) == x)
}

/// del(rho(a) y) = unit * a.del(y) and tau(a.x) = unit * a tau(x) for each
/// generator a of A and basis elements x, y of C, B.
fn module_checks(spec: &LongExactSpec, phi: &AlgebraMap, cap: u32) -> Result<Vec<String>> {
    let f = *spec.a.spec().field();
    let (a, b, c) = (spec.a.as_ref(), spec.b.as_ref(), spec.c.as_ref());
    let mut out = Vec::new();
    for (i, g) in a.spec().generators().iter().enumerate() {
        let gm = Monomial::generator(a.spec().ngens(), i, 1);
        let deg = g.total_degree();
        if deg > cap {
            continue;
        }
        let rg = spec.rho.apply_monomial(a, b, &gm)?;
        let pg = phi.apply_monomial(a, c, &gm)?;
        let ag = a.spec().gen(&g.name)?;
        for n in 0..=cap - deg {
            for y in b.basis(n) {
                let ye = Element::monomial(y.clone(), 1);
                let lhs = c.normalize(apply(&spec.del, &b.product(&rg, &ye)?, &f)?)?;
                let rhs = c.product(&pg, &spec.del.as_ref()(&y)?)?;
                if !proportional(&f, &lhs, &rhs) {
                    out.push(format!(
                        "del({} * {}) = {}, {} * del = {}",
                        g.name,
                        b.spec().format_monomial(&y),
                        c.spec().format_element(&lhs),
                        g.name,
                        c.spec().format_element(&rhs)
                    ));
                }
            }
            for x in c.basis(n) {
                let xe = Element::monomial(x.clone(), 1);
                let lhs = a.normalize(apply(&spec.tau, &c.product(&pg, &xe)?, &f)?)?;
                let rhs = a.product(&ag, &spec.tau.as_ref()(&x)?)?;
                if !proportional(&f, &lhs, &rhs) {
                    out.push(format!(
                        "tau({} * {}) = {}, {} * tau = {}",
                        g.name,
                        c.spec().format_monomial(&x),
                        a.spec().format_element(&lhs),
                        g.name,
                        a.spec().format_element(&rhs)
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn apply(m: &BasisMap, e: &Element, f: &PrimeField) -> Result<Element> {
    let mut out = Element::zero();
    for (mono, c) in e.terms() {
        out.add_scaled(f, &m.as_ref()(mono)?, c);
    }
    Ok(out)
}

/// Image of rho in degree `n`, as a subspace in coordinates of B's basis.
pub fn rho_image(spec: &LongExactSpec, n: u32) -> Result<(Vec<Monomial>, Subspace)> {
    let f = *spec.a.spec().field();
    let src = spec.a.basis(n);
    let tgt = spec.b.basis(n);
    let m = map_matrix(&src, &tgt, |x| {
        spec.rho.apply_monomial(spec.a.as_ref(), spec.b.as_ref(), x)
    })?;
    Ok((tgt, m.image(&f)))
}

/// E(epsilon1, lambda1) ⊗ P(mu1).
pub fn thh_z(f: PrimeField) -> Result<AlgebraSpec> {
    let p = f.p();
    AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::exterior("epsilon1", 2 * p - 1),
            GeneratorSpec::exterior("lambda1", 2 * p - 1),
            GeneratorSpec::polynomial("mu1", 2 * p),
        ],
    )
}

/// E(lambda1, lambda2) ⊗ P(mu2).
pub fn thh_ell(f: PrimeField) -> Result<AlgebraSpec> {
    let p = f.p();
    AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::exterior("lambda1", 2 * p - 1),
            GeneratorSpec::exterior("lambda2", 2 * p * p - 1),
            GeneratorSpec::polynomial("mu2", 2 * p * p),
        ],
    )
}

/// E(lambda1, dlog x) ⊗ P(kappa1).
pub fn thh_ell_log(f: PrimeField, dlog: &str) -> Result<AlgebraSpec> {
    let p = f.p();
    AlgebraSpec::new(
        f,
        vec![
            GeneratorSpec::exterior("lambda1", 2 * p - 1),
            GeneratorSpec::exterior(dlog, 1),
            GeneratorSpec::polynomial("kappa1", 2 * p),
        ],
    )
}

/// P_{p-1}(u) ⊗ E(lambda1, dlog u) ⊗ P(kappa1).
pub fn thh_ku_log(f: PrimeField) -> Result<AlgebraSpec> {
    let u = AlgebraSpec::new(f, vec![GeneratorSpec::truncated("u", 2, f.p() - 1)])?;
    u.tensor(&thh_ell_log(f, "dlogu")?)
}

/// E(lambda1) ⊗ Theta.
pub fn thh_ku(f: PrimeField) -> Result<Presentation> {
    let l1 = AlgebraSpec::new(f, vec![GeneratorSpec::exterior("lambda1", 2 * f.p() - 1)])?;
    make_theta(f)?.with_free_factor(&l1)
}

fn exps(spec: &AlgebraSpec, m: &Monomial, name: &str) -> u32 {
    m.0[spec.index_of(name).expect("known generator")]
}

/// The del of the ell-sequence on a basis monomial lambda1^a dlogv^b kappa1^k;
/// `c` is the coefficient of lambda1 mu1^(k-1) left open by the determination
/// modulo lambda1.
fn ell_del(b: &AlgebraSpec, cz: &AlgebraSpec, dlog: &str, c: u32, y: &Monomial) -> Result<Element> {
    let f = *cz.field();
    let p = f.p();
    let la = exps(b, y, "lambda1");
    let dl = exps(b, y, dlog);
    let k = exps(b, y, "kappa1");
    let l1 = if la == 1 {
        cz.gen("lambda1")?
    } else {
        cz.unit()
    };
    let core = if dl == 1 {
        cz.elem(&format!("mu1^{k}"))?
    } else if !k.is_multiple_of(p) {
        cz.elem(&format!("epsilon1 mu1^{}", k - 1))?
            .add(&f, &cz.elem(&format!("{c} lambda1 mu1^{}", k - 1))?)
    } else {
        Element::zero()
    };
    cz.multiply(&l1, &core)
}

/// The tau of the ell-sequence: epsilon1 lambda1^a mu1^(pm+p-1) goes to
/// lambda1^a mu2^m lambda2, everything else to 0.
fn ell_tau(cz: &AlgebraSpec, a: &AlgebraSpec, x: &Monomial) -> Result<Element> {
    let p = cz.field().p();
    let e = exps(cz, x, "epsilon1");
    let la = exps(cz, x, "lambda1");
    let k = exps(cz, x, "mu1");
    if e == 0 || k % p != p - 1 {
        return Ok(Element::zero());
    }
    let l1 = if la == 1 { "lambda1 " } else { "" };
    a.elem(&format!("{l1}mu2^{} lambda2", k / p))
}

/// The sequence for THH(ell) -> THH(ell, D(v)) -> Sigma THH(Z_(p)), with all
/// unit ambiguities set to 1 and mod-lambda1 coefficient `c`.
pub fn ell_sequence(f: PrimeField, c: u32) -> Result<LongExactSpec> {
    let p = f.p();
    let a = thh_ell(f)?;
    let b = thh_ell_log(f, "dlogv")?;
    let cz = thh_z(f)?;
    let rho = AlgebraMap::from_text(
        &a,
        &b,
        &[
            ("lambda1", "lambda1"),
            ("lambda2", "0"),
            ("mu2", &format!("kappa1^{p}")),
        ],
    )?;
    let phi = AlgebraMap::from_text(
        &a,
        &cz,
        &[
            ("lambda1", "lambda1"),
            ("lambda2", "0"),
            ("mu2", &format!("mu1^{p}")),
        ],
    )?;
    let (b2, c2, c3, a3) = (b.clone(), cz.clone(), cz.clone(), a.clone());
    Ok(LongExactSpec {
        a: Box::new(a),
        b: Box::new(b),
        c: Box::new(cz),
        rho,
        del: Box::new(move |y| ell_del(&b2, &c2, "dlogv", c, y)),
        tau: Box::new(move |x| ell_tau(&c3, &a3, x)),
        c_action: Some(phi),
    })
}

/// The sequence for THH(ku) -> THH(ku, D(u)) -> Sigma THH(Z_(p)): rho' is
/// theta-bar, del' kills positive powers of u and is del on the rest with
/// dlog v = -dlog u, and tau' is tau followed by lambda2 -> u^(p-2) a_(p-1).
pub fn ku_sequence(f: PrimeField, c: u32) -> Result<LongExactSpec> {
    let p = f.p();
    let a = thh_ku(f)?;
    let b = thh_ku_log(f)?;
    let cz = thh_z(f)?;
    let mut images = vec![
        ("lambda1".to_string(), "lambda1".to_string()),
        ("u".into(), "u".into()),
        ("mu2".into(), format!("kappa1^{p}")),
    ];
    for i in 0..p {
        images.push((theta_a(i), format!("u dlogu kappa1^{i}")));
    }
    for j in 1..p {
        images.push((theta_b(j), format!("u kappa1^{j}")));
    }
    let pairs: Vec<(&str, &str)> = images
        .iter()
        .map(|(x, y)| (x.as_str(), y.as_str()))
        .collect();
    let rho = AlgebraMap::from_text(&a, &b, &pairs)?;
    let mut act: Vec<(String, String)> = vec![
        ("lambda1".into(), "lambda1".into()),
        ("u".into(), "0".into()),
        ("mu2".into(), format!("mu1^{p}")),
    ];
    act.extend((0..p).map(|i| (theta_a(i), "0".to_string())));
    act.extend((1..p).map(|j| (theta_b(j), "0".to_string())));
    let pairs: Vec<(&str, &str)> = act.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
    let phi = AlgebraMap::from_text(&a, &cz, &pairs)?;

    let ell_b = thh_ell_log(f, "dlogv")?;
    let bs = b.spec().clone();
    let (c2, c3) = (cz.clone(), cz.clone());
    let del: BasisMap = Box::new(move |y: &Monomial| {
        if exps(&bs, y, "u") > 0 {
            return Ok(Element::zero());
        }
        let dl = exps(&bs, y, "dlogu");
        let mut v = Monomial::one(3);
        v.0[0] = exps(&bs, y, "lambda1");
        v.0[1] = dl;
        v.0[2] = exps(&bs, y, "kappa1");
        let val = ell_del(&ell_b, &c2, "dlogv", c, &v)?;
        // dlog v = -dlog u
        Ok(if dl == 1 {
            val.scale(c2.field(), c2.field().neg(1))
        } else {
            val
        })
    });
    let ell = thh_ell(f)?;
    let iota_target = a.spec().elem(&format!("u^{} {}", p - 2, theta_a(p - 1)))?;
    let a_spec = a.spec().clone();
    let tau: BasisMap = Box::new(move |x: &Monomial| {
        let v = ell_tau(&c3, &ell, x)?;
        let mut out = Element::zero();
        let fld = *a_spec.field();
        for (m, coeff) in v.terms() {
            // lambda1^a mu2^m lambda2 -> lambda1^a mu2^m u^(p-2) a_(p-1)
            let mut rest = a_spec.unit();
            if m.0[0] == 1 {
                rest = a_spec.multiply(&rest, &a_spec.gen("lambda1")?)?;
            }
            rest = a_spec.multiply(&rest, &a_spec.elem(&format!("mu2^{}", m.0[2]))?)?;
            out.add_scaled(&fld, &a_spec.multiply(&rest, &iota_target)?, coeff);
        }
        Ok(out)
    });
    Ok(LongExactSpec {
        a: Box::new(a),
        b: Box::new(b),
        c: Box::new(cz),
        rho,
        del,
        tau,
        c_action: Some(phi),
    })
}

/// The subspace E(lambda1) ⊗ P(kappa1^p) ⊕ (u) ⊗ E(lambda1, dlog u) ⊗ P(kappa1)
/// of THH(ku, D(u)) in degree `n`, spanned by monomials.
pub fn ku_stated_image(b: &AlgebraSpec, n: u32) -> Subspace {
    let f = *b.field();
    let p = f.p();
    let basis = b.basis(n);
    let vecs = basis.iter().enumerate().filter_map(|(i, m)| {
        let u = exps(b, m, "u");
        let dl = exps(b, m, "dlogu");
        let k = exps(b, m, "kappa1");
        let keep = u >= 1 || (dl == 0 && k.is_multiple_of(p));
        keep.then(|| {
            let mut v = vec![0; basis.len()];
            v[i] = 1;
            v
        })
    });
    Subspace::spanned_by(&f, basis.len(), vecs)
}

/// Per-degree ranks of tau, rho and del, for reports.
pub fn ranks(spec: &LongExactSpec, cap: u32) -> Result<BTreeMap<u32, (usize, usize, usize)>> {
    let f = *spec.a.spec().field();
    let mx = matrices(spec, cap)?;
    Ok((0..=cap as usize)
        .map(|n| {
            (
                n as u32,
                (mx.tau[n].rank(&f), mx.rho[n].rank(&f), mx.del[n].rank(&f)),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests;
