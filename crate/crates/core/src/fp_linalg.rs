//! Dense exact linear algebra over F_p.
//!
//! Matrices act on column vectors: an `rows x cols` matrix is a map
//! F_p^cols -> F_p^rows. Subspaces are kept as reduced row echelon bases.

use crate::error::{Error, Result};
use crate::field::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FpMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows, reducing every entry mod p.
    pub fn from_rows(f: &PrimeField, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, f.reduce(x));
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, f: &PrimeField, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = f.p() as u64;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j) as u64;
                    if b != 0 {
                        let cur = out.get(i, j) as u64;
                        out.set(i, j, ((cur + a * b) % p) as u32);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, f: &PrimeField, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    pub fn row_reduce(&mut self, f: &PrimeField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c));
            for j in c..self.cols {
                let x = self.get(r, j);
                self.set(r, j, f.mul(x, inv));
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let x = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &PrimeField) -> usize {
        self.clone().row_reduce(f).len()
    }

    /// Basis of the null space {x : M x = 0}.
    pub fn kernel(&self, f: &PrimeField) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.row_reduce(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, fc));
                }
                v
            })
            .collect()
    }

    /// Basis of the column space.
    pub fn image(&self, f: &PrimeField) -> Subspace {
        Subspace::spanned_by(f, self.rows, (0..self.cols).map(|j| self.column(j)))
    }
}

/// Row rank of `m` over F_p.
pub fn rank(m: &FpMatrix, f: &PrimeField) -> usize {
    m.rank(f)
}

/// dim ker(d_out) - rank(d_in) for C' --d_in--> C --d_out--> C''.
pub fn homology_dim(d_in: &FpMatrix, d_out: &FpMatrix, f: &PrimeField) -> Result<usize> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::DimensionMismatch(format!(
            "d_in lands in dimension {}, d_out starts in dimension {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !d_out.mul(f, d_in)?.is_zero() {
        return Err(Error::CompositionNonzero);
    }
    let n = d_out.cols();
    Ok(n - d_out.rank(f) - d_in.rank(f))
}

/// A linear subspace of F_p^n stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace {
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn spanned_by<I>(f: &PrimeField, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.insert(f, v);
        }
        s
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, f: &PrimeField, mut v: Vec<u32>) -> Vec<u32> {
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        v
    }

    pub fn contains(&self, f: &PrimeField, v: &[u32]) -> bool {
        self.reduce(f, v.to_vec()).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span. Returns true when the dimension grew.
    pub fn insert(&mut self, f: &PrimeField, v: Vec<u32>) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut v = self.reduce(f, v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[pc]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.basis.iter_mut() {
            let c = row[pc];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&v) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < pc);
        self.pivots.insert(pos, pc);
        self.basis.insert(pos, v);
        true
    }

    pub fn sum(&self, f: &PrimeField, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(f, v.clone());
        }
        s
    }

    pub fn is_subspace_of(&self, f: &PrimeField, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(f, v))
    }

    pub fn same_as(&self, f: &PrimeField, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(f, other)
    }

    /// Image of this subspace under `m`.
    pub fn map(&self, f: &PrimeField, m: &FpMatrix) -> Subspace {
        Subspace::spanned_by(f, m.rows(), self.basis.iter().map(|v| m.apply(f, v)))
    }

    /// {x in self : m x in target}.
    pub fn preimage_within(&self, f: &PrimeField, m: &FpMatrix, target: &Subspace) -> Subspace {
        // Columns are the images of the basis vectors, taken modulo `target`.
        let columns: Vec<Vec<u32>> = self
            .basis
            .iter()
            .map(|v| target.reduce(f, m.apply(f, v)))
            .collect();
        let coeffs = FpMatrix::from_columns(m.rows(), &columns).kernel(f);
        Subspace::spanned_by(
            f,
            self.ambient,
            coeffs.into_iter().map(|c| self.combine(f, &c)),
        )
    }

    /// Linear combination of the basis with the given coefficients.
    pub fn combine(&self, f: &PrimeField, coeffs: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.ambient];
        for (row, &c) in self.basis.iter().zip(coeffs) {
            if c != 0 {
                for (x, &y) in out.iter_mut().zip(row) {
                    *x = f.add(*x, f.mul(c, y));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&FpMatrix::identity(2), &f(3)), 2);
        assert_eq!(rank(&FpMatrix::zeros(3, 4), &f(5)), 0);
        let m = FpMatrix::from_rows(&f(5), &[vec![1, 2], vec![2, 4]]);
        assert_eq!(rank(&m, &f(5)), 1);
    }

    #[test]
    fn homology_examples() {
        let p = f(3);
        assert_eq!(
            homology_dim(&FpMatrix::zeros(4, 0), &FpMatrix::zeros(0, 4), &p).unwrap(),
            4
        );
        assert_eq!(
            homology_dim(&FpMatrix::identity(2), &FpMatrix::zeros(0, 2), &p).unwrap(),
            0
        );
    }

    #[test]
    fn koszul_complex_of_polynomial_generator() {
        // P(x){sigma} -> P(x), d(sigma) = x, in internal degree |x| = 4 over p = 3:
        // filtration 1 has basis {sigma}, filtration 0 has basis {x}; d is the 1x1 matrix [1].
        let p = f(3);
        let d1 = FpMatrix::from_rows(&p, &[vec![1]]);
        // middle spot in filtration 0: nothing out, d1 in
        assert_eq!(homology_dim(&d1, &FpMatrix::zeros(0, 1), &p).unwrap(), 0);
        // filtration 1: d1 out, nothing in
        assert_eq!(homology_dim(&FpMatrix::zeros(1, 0), &d1, &p).unwrap(), 0);
    }

    #[test]
    fn composition_and_shape_errors() {
        let p = f(3);
        let id = FpMatrix::identity(2);
        assert_eq!(homology_dim(&id, &id, &p), Err(Error::CompositionNonzero));
        assert!(matches!(
            homology_dim(&FpMatrix::identity(3), &id, &p),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let p = f(5);
        let m = FpMatrix::from_rows(&p, &[vec![1, 2, 3, 4], vec![2, 4, 1, 0]]);
        let k = m.kernel(&p);
        assert_eq!(k.len(), 4 - m.rank(&p));
        for v in &k {
            assert!(m.apply(&p, v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn preimage_within_subspace() {
        let p = f(3);
        // projection onto the first coordinate of F_3^2
        let m = FpMatrix::from_rows(&p, &[vec![1, 0], vec![0, 0]]);
        let pre = Subspace::full(2).preimage_within(&p, &m, &Subspace::zero(2));
        assert_eq!(pre.dim(), 1);
        assert!(pre.contains(&p, &[0, 1]));
    }
}
