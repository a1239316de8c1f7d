use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::spec::AlgebraSpec;

/// Dimensions of a graded vector space in degrees 0..=cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedDims {
    dims: Vec<usize>,
}

impl GradedDims {
    pub fn new(dims: Vec<usize>) -> Self {
        assert!(!dims.is_empty(), "GradedDims needs at least degree 0");
        GradedDims { dims }
    }

    pub fn zeros(cap: u32) -> Self {
        GradedDims {
            dims: vec![0; cap as usize + 1],
        }
    }

    #[inline]
    pub fn cap(&self) -> u32 {
        (self.dims.len() - 1) as u32
    }

    pub fn get(&self, n: u32) -> usize {
        self.dims.get(n as usize).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn add_at(&mut self, n: u32, k: usize) {
        if let Some(d) = self.dims.get_mut(n as usize) {
            *d += k;
        }
    }

    /// Degreewise sum, truncated to the smaller cap.
    pub fn plus(&self, other: &GradedDims) -> GradedDims {
        let cap = self.cap().min(other.cap());
        GradedDims::new((0..=cap).map(|n| self.get(n) + other.get(n)).collect())
    }

    /// Degreewise difference; panics if it would go negative.
    pub fn minus(&self, other: &GradedDims) -> GradedDims {
        let cap = self.cap().min(other.cap());
        GradedDims::new(
            (0..=cap)
                .map(|n| {
                    self.get(n)
                        .checked_sub(other.get(n))
                        .expect("negative dimension")
                })
                .collect(),
        )
    }

    /// Shifts up by `k` degrees, keeping the cap.
    pub fn shifted(&self, k: u32) -> GradedDims {
        let cap = self.cap();
        GradedDims::new(
            (0..=cap)
                .map(|n| if n >= k { self.get(n - k) } else { 0 })
                .collect(),
        )
    }

    /// Cauchy product (Hilbert function of a tensor product).
    pub fn convolve(&self, other: &GradedDims) -> GradedDims {
        let cap = self.cap().min(other.cap());
        let mut out = vec![0; cap as usize + 1];
        for i in 0..=cap {
            for j in 0..=(cap - i) {
                out[(i + j) as usize] += self.get(i) * other.get(j);
            }
        }
        GradedDims::new(out)
    }

    /// First degree where the two sequences differ.
    pub fn first_difference(&self, other: &GradedDims) -> Option<u32> {
        let cap = self.cap().min(other.cap());
        (0..=cap).find(|&n| self.get(n) != other.get(n))
    }
}

impl fmt::Display for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Dimensions of a bigraded vector space in bidegrees (s, t) with s + t <= cap.
/// Only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigradedDims {
    cap: u32,
    entries: BTreeMap<(u32, u32), usize>,
}

impl BigradedDims {
    pub fn new(cap: u32) -> Self {
        BigradedDims {
            cap,
            entries: BTreeMap::new(),
        }
    }

    #[inline]
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn get(&self, s: u32, t: u32) -> usize {
        self.entries.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn add_at(&mut self, s: u32, t: u32, k: usize) {
        if k > 0 && s + t <= self.cap {
            *self.entries.entry((s, t)).or_insert(0) += k;
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32), usize)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Collapses to total degree s + t.
    pub fn total(&self) -> GradedDims {
        let mut out = GradedDims::zeros(self.cap);
        for ((s, t), d) in self.entries() {
            out.add_at(s + t, d);
        }
        out
    }

    /// Restricts to a smaller cap.
    pub fn truncate(&self, cap: u32) -> BigradedDims {
        let mut out = BigradedDims::new(cap.min(self.cap));
        for ((s, t), d) in self.entries() {
            out.add_at(s, t, d);
        }
        out
    }

    pub fn plus(&self, other: &BigradedDims) -> BigradedDims {
        let mut out = self.truncate(self.cap.min(other.cap));
        for ((s, t), d) in other.entries() {
            out.add_at(s, t, d);
        }
        out
    }

    pub fn shifted(&self, ds: u32, dt: u32) -> BigradedDims {
        let mut out = BigradedDims::new(self.cap);
        for ((s, t), d) in self.entries() {
            out.add_at(s + ds, t + dt, d);
        }
        out
    }

    /// Bigraded Cauchy product.
    pub fn convolve(&self, other: &BigradedDims) -> BigradedDims {
        let mut out = BigradedDims::new(self.cap.min(other.cap));
        for ((s1, t1), d1) in self.entries() {
            for ((s2, t2), d2) in other.entries() {
                out.add_at(s1 + s2, t1 + t2, d1 * d2);
            }
        }
        out
    }

    /// First bidegree (ordered by total degree, then s) where the two differ.
    pub fn first_difference(&self, other: &BigradedDims) -> Option<(u32, u32)> {
        let cap = self.cap.min(other.cap);
        let mut keys: Vec<(u32, u32)> = self
            .entries
            .keys()
            .chain(other.entries.keys())
            .copied()
            .filter(|(s, t)| s + t <= cap)
            .collect();
        keys.sort_by_key(|&(s, t)| (s + t, s));
        keys.dedup();
        keys.into_iter()
            .find(|&(s, t)| self.get(s, t) != other.get(s, t))
    }
}

/// Number of normal-form monomials in each total degree <= cap.
pub fn hilbert(spec: &AlgebraSpec, cap: u32) -> GradedDims {
    GradedDims::new(spec.basis_upto(cap).iter().map(|v| v.len()).collect())
}

pub fn hilbert_bigraded(spec: &AlgebraSpec, cap: u32) -> BigradedDims {
    let mut out = BigradedDims::new(cap);
    for ((s, t), v) in spec.basis_bigraded(cap) {
        out.add_at(s, t, v.len());
    }
    out
}
