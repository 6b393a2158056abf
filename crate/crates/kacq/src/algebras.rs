//! Catalog of affine Kac-Moody algebras: the five twisted families plus
//! simply-laced untwisted types for cross-checks.
//!
//! Conventions:
//! - finite weights are stored in *doubled* coordinates (`v2 = 2v`), so
//!   half-integral vectors (F4 half-roots, rho of B_l) stay integral;
//! - inner products always go through the stored Gram matrix of the
//!   single-unit basis: `<v, w> = v2 . G . w2 / 4`;
//! - the invariant form is normalized so that short real roots of the affine
//!   algebra have norm 2 (for `A_{2l}^{(2)}` the ambient standard form of
//!   paragraph 4, where the three real-root classes have norms 1, 2, 4).

use std::collections::{HashSet, VecDeque};
#[cfg(test)]
use std::collections::HashMap;

use thiserror::Error;

use crate::series::Monomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown or unsupported algebra id `{0}`")]
    UnknownId(String),
    #[error("rank {0} outside catalog limits (l <= 8)")]
    RankLimit(usize),
    #[error("Weyl group materialization restricted to rank <= 4 plus F4/G2")]
    WeylTooLarge,
    #[error("weight is not dominant")]
    NotDominant,
    #[error("n must be >= 1")]
    BadImaginaryIndex,
}

// ---------------------------------------------------------------------------
// small exact linear algebra (ranks <= 8, tiny entries)
// ---------------------------------------------------------------------------

fn det_bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| m[i][k] != 0);
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn minor(m: &[Vec<i64>], skip_r: usize, skip_c: usize) -> Vec<Vec<i128>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != skip_c)
                .map(|(_, v)| *v as i128)
                .collect()
        })
        .collect()
}

/// Scaled inverse: returns `(N, d)` with `inv(m) = N / d`.
fn inverse_scaled(m: &[Vec<i64>]) -> (Vec<Vec<i64>>, i64) {
    let n = m.len();
    let d = det_bareiss(m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect());
    assert!(d != 0, "singular basis matrix");
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            // inv_{ij} = cofactor C_{ji} / det
            inv[i][j] = (sign * det_bareiss(minor(m, j, i))) as i64;
        }
    }
    // normalize to a positive denominator so callers can treat the rows as
    // orientation-preserving functionals
    if d < 0 {
        for row in &mut inv {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        return (inv, -d as i64);
    }
    (inv, d as i64)
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64 + 2;
    while x * x > n {
        x -= 1;
    }
    x
}

// ---------------------------------------------------------------------------
// finite root systems
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    F4,
    G2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    /// doubled coordinates
    pub v2: Vec<i64>,
    /// `<alpha, alpha>` under the stored form
    pub norm2: i64,
    pub height: i64,
    pub is_long: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRootSystem {
    pub ty: FiniteType,
    pub rank: usize,
    /// Gram matrix of the single-unit basis vectors
    pub gram: Vec<Vec<i64>>,
    /// simple roots, doubled coordinates
    pub simple: Vec<Vec<i64>>,
    pub positive_roots: Vec<Root>,
    pub cartan: Vec<Vec<i64>>,
    /// dominant long root, doubled
    pub theta_l: Vec<i64>,
    /// dominant short root, doubled (None for simply-laced types)
    pub theta_s: Option<Vec<i64>>,
    /// half-sum of positive roots, doubled
    pub rho2: Vec<i64>,
    // scaled inverse of the simple-root column matrix, for coordinate solves
    basis_inv: Vec<Vec<i64>>,
    basis_den: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightStats {
    /// n_p: count of positive roots of height p (index p-1)
    pub by_height: Vec<i64>,
    /// n_p(s): count of short positive roots of height p
    pub short_by_height: Vec<i64>,
}

/// Finite Weyl group element acting on doubled coordinates as `v2 -> m2 v2 / 2`.
///
/// The factor of two lets F4 reflections (which are half-integral in the
/// epsilon basis) stay in integer arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrthogonalMap {
    pub m2: Vec<Vec<i64>>,
    pub sign: i64,
}

impl OrthogonalMap {
    pub fn identity(rank: usize) -> Self {
        let mut m2 = vec![vec![0; rank]; rank];
        for (i, row) in m2.iter_mut().enumerate() {
            row[i] = 2;
        }
        Self { m2, sign: 1 }
    }

    pub fn apply(&self, v2: &[i64]) -> Vec<i64> {
        self.m2
            .iter()
            .map(|row| {
                let s: i64 = row.iter().zip(v2).map(|(a, b)| a * b).sum();
                debug_assert!(s % 2 == 0, "Weyl image left the doubled lattice");
                s / 2
            })
            .collect()
    }

    pub fn compose(&self, other: &OrthogonalMap) -> OrthogonalMap {
        let n = self.m2.len();
        let mut m2 = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let s: i64 = (0..n).map(|k| self.m2[i][k] * other.m2[k][j]).sum();
                debug_assert!(s % 2 == 0);
                m2[i][j] = s / 2;
            }
        }
        OrthogonalMap {
            m2,
            sign: self.sign * other.sign,
        }
    }
}

impl FiniteRootSystem {
    pub fn build(ty: FiniteType) -> Self {
        let (gram, simple, pos, theta_l, theta_s): (
            Vec<Vec<i64>>,
            Vec<Vec<i64>>,
            Vec<Vec<i64>>,
            Vec<i64>,
            Option<Vec<i64>>,
        ) = match ty {
            FiniteType::A(l) => {
                assert!(l >= 1);
                let mut gram = vec![vec![0; l]; l];
                for i in 0..l {
                    gram[i][i] = 2;
                    if i + 1 < l {
                        gram[i][i + 1] = -1;
                        gram[i + 1][i] = -1;
                    }
                }
                let simple: Vec<Vec<i64>> = (0..l)
                    .map(|i| (0..l).map(|j| if i == j { 2 } else { 0 }).collect())
                    .collect();
                let mut pos = Vec::new();
                for i in 0..l {
                    for j in i..l {
                        let mut v = vec![0; l];
                        for (k, item) in v.iter_mut().enumerate().take(j + 1).skip(i) {
                            let _ = k;
                            *item = 2;
                        }
                        pos.push(v);
                    }
                }
                let theta = (0..l).map(|_| 2).collect::<Vec<_>>();
                (gram, simple, pos, theta, None)
            }
            FiniteType::B(l) => {
                assert!(l >= 1);
                let mut gram = vec![vec![0; l]; l];
                for (i, row) in gram.iter_mut().enumerate() {
                    row[i] = 2;
                }
                let mut simple = Vec::new();
                for i in 0..l - 1 {
                    let mut v = vec![0; l];
                    v[i] = 2;
                    v[i + 1] = -2;
                    simple.push(v);
                }
                let mut last = vec![0; l];
                last[l - 1] = 2;
                simple.push(last);
                let mut pos = Vec::new();
                for i in 0..l {
                    let mut v = vec![0; l];
                    v[i] = 2;
                    pos.push(v); // eps_i, short
                }
                for i in 0..l {
                    for j in i + 1..l {
                        for s in [1i64, -1] {
                            let mut v = vec![0; l];
                            v[i] = 2;
                            v[j] = 2 * s;
                            pos.push(v);
                        }
                    }
                }
                let theta_l = if l >= 2 {
                    let mut v = vec![0; l];
                    v[0] = 2;
                    v[1] = 2;
                    v
                } else {
                    vec![2]
                };
                let mut ts = vec![0; l];
                ts[0] = 2;
                let theta_s = if l >= 2 { Some(ts) } else { None };
                (gram, simple, pos, theta_l, theta_s)
            }
            FiniteType::C(l) => {
                assert!(l >= 1);
                let mut gram = vec![vec![0; l]; l];
                for (i, row) in gram.iter_mut().enumerate() {
                    row[i] = 1;
                }
                let mut simple = Vec::new();
                for i in 0..l - 1 {
                    let mut v = vec![0; l];
                    v[i] = 2;
                    v[i + 1] = -2;
                    simple.push(v);
                }
                let mut last = vec![0; l];
                last[l - 1] = 4;
                simple.push(last);
                let mut pos = Vec::new();
                for i in 0..l {
                    for j in i + 1..l {
                        for s in [1i64, -1] {
                            let mut v = vec![0; l];
                            v[i] = 2;
                            v[j] = 2 * s;
                            pos.push(v); // eps_i +- eps_j, short
                        }
                    }
                }
                for i in 0..l {
                    let mut v = vec![0; l];
                    v[i] = 4;
                    pos.push(v); // 2 eps_i, long
                }
                let mut theta_l = vec![0; l];
                theta_l[0] = 4;
                let theta_s = if l >= 2 {
                    let mut v = vec![0; l];
                    v[0] = 2;
                    v[1] = 2;
                    Some(v)
                } else {
                    None
                };
                (gram, simple, pos, theta_l, theta_s)
            }
            FiniteType::D(l) => {
                assert!(l >= 3);
                let mut gram = vec![vec![0; l]; l];
                for (i, row) in gram.iter_mut().enumerate() {
                    row[i] = 1;
                }
                let mut simple = Vec::new();
                for i in 0..l - 1 {
                    let mut v = vec![0; l];
                    v[i] = 2;
                    v[i + 1] = -2;
                    simple.push(v);
                }
                let mut last = vec![0; l];
                last[l - 2] = 2;
                last[l - 1] = 2;
                simple.push(last);
                let mut pos = Vec::new();
                for i in 0..l {
                    for j in i + 1..l {
                        for s in [1i64, -1] {
                            let mut v = vec![0; l];
                            v[i] = 2;
                            v[j] = 2 * s;
                            pos.push(v);
                        }
                    }
                }
                let mut theta = vec![0; l];
                theta[0] = 2;
                theta[1] = 2;
                (gram, simple, pos, theta, None)
            }
            FiniteType::F4 => {
                let gram = (0..4)
                    .map(|i| (0..4).map(|j| if i == j { 2 } else { 0 }).collect())
                    .collect();
                let simple = vec![
                    vec![0, 2, -2, 0],
                    vec![0, 0, 2, -2],
                    vec![0, 0, 0, 2],
                    vec![1, -1, -1, -1],
                ];
                let mut pos = Vec::new();
                for i in 0..4 {
                    let mut v = vec![0; 4];
                    v[i] = 2;
                    pos.push(v); // eps_i, short
                }
                for i in 0..4 {
                    for j in i + 1..4 {
                        for s in [1i64, -1] {
                            let mut v = vec![0; 4];
                            v[i] = 2;
                            v[j] = 2 * s;
                            pos.push(v); // long
                        }
                    }
                }
                for s2 in [1i64, -1] {
                    for s3 in [1i64, -1] {
                        for s4 in [1i64, -1] {
                            pos.push(vec![1, s2, s3, s4]); // short half-roots
                        }
                    }
                }
                (gram, simple, pos, vec![2, 2, 0, 0], Some(vec![2, 0, 0, 0]))
            }
            FiniteType::G2 => {
                let gram = vec![vec![2, -3], vec![-3, 6]];
                let simple = vec![vec![2, 0], vec![0, 2]];
                let pos = vec![
                    vec![2, 0],
                    vec![0, 2],
                    vec![2, 2],
                    vec![4, 2],
                    vec![6, 2],
                    vec![6, 4],
                ];
                (gram, simple, pos, vec![6, 4], Some(vec![4, 2]))
            }
        };

        let rank = gram.len();
        let basis: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| simple[j][i]).collect())
            .collect();
        let (basis_inv, basis_den) = inverse_scaled(&basis);

        let mut sys = FiniteRootSystem {
            ty,
            rank,
            gram,
            simple,
            positive_roots: Vec::new(),
            cartan: Vec::new(),
            theta_l,
            theta_s,
            rho2: Vec::new(),
            basis_inv,
            basis_den,
        };

        // in single-length systems every root counts as long
        let max_norm = pos.iter().map(|v| sys.norm2(v)).max().unwrap();
        sys.positive_roots = pos
            .iter()
            .map(|v| {
                let norm2 = sys.norm2(v);
                let height = sys
                    .simple_coords(v)
                    .expect("positive root outside the root lattice")
                    .iter()
                    .sum();
                Root {
                    v2: v.clone(),
                    norm2,
                    height,
                    is_long: norm2 == max_norm,
                }
            })
            .collect();

        let mut rho2 = vec![0i64; rank];
        for r in &sys.positive_roots {
            for (a, b) in rho2.iter_mut().zip(&r.v2) {
                *a += b;
            }
        }
        for a in rho2.iter_mut() {
            assert!(*a % 2 == 0);
            *a /= 2;
        }
        sys.rho2 = rho2;

        sys.cartan = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| {
                        let num = 2 * sys.ip4(&sys.simple[i], &sys.simple[j]);
                        let den = sys.ip4(&sys.simple[j], &sys.simple[j]);
                        assert!(num % den == 0);
                        num / den
                    })
                    .collect()
            })
            .collect();

        sys.validate();
        sys
    }

    /// `4 <v, w>` for doubled vectors.
    pub fn ip4(&self, a2: &[i64], b2: &[i64]) -> i64 {
        let mut s = 0i64;
        for (i, ai) in a2.iter().enumerate() {
            for (j, bj) in b2.iter().enumerate() {
                s += ai * self.gram[i][j] * bj;
            }
        }
        s
    }

    /// `<v, v>` (must be integral for lattice vectors).
    pub fn norm2(&self, v2: &[i64]) -> i64 {
        let n4 = self.ip4(v2, v2);
        assert!(n4 % 4 == 0, "norm not integral: {:?}", v2);
        n4 / 4
    }

    /// Coordinates in the simple-root basis, if integral.
    pub fn simple_coords(&self, v2: &[i64]) -> Option<Vec<i64>> {
        let mut out = Vec::with_capacity(self.rank);
        for row in &self.basis_inv {
            let num: i64 = row.iter().zip(v2).map(|(a, b)| a * b).sum();
            if num % self.basis_den != 0 {
                return None;
            }
            out.push(num / self.basis_den);
        }
        Some(out)
    }

    /// Simple-root coordinate functionals as scaled integer rows:
    /// `coords_i(v) = (rows_i . v2) / den`.
    pub fn coord_rows(&self) -> (Vec<Vec<i64>>, i64) {
        (self.basis_inv.clone(), self.basis_den)
    }

    /// Height functional as an integer covector: `ht(v) = (w . v2) / den`.
    pub fn height_form(&self) -> (Vec<i64>, i64) {
        let w: Vec<i64> = (0..self.rank)
            .map(|j| self.basis_inv.iter().map(|row| row[j]).sum())
            .collect();
        (w, self.basis_den)
    }

    /// `<v, alpha_i-check>` for a simple root.
    pub fn pair_simple_coroot(&self, v2: &[i64], i: usize) -> i64 {
        let num = 2 * self.ip4(v2, &self.simple[i]);
        let den = self.ip4(&self.simple[i], &self.simple[i]);
        assert!(num % den == 0);
        num / den
    }

    pub fn is_dominant(&self, v2: &[i64]) -> bool {
        (0..self.rank).all(|i| self.pair_simple_coroot(v2, i) >= 0)
    }

    /// Reflection in the hyperplane of a root (doubled coords).
    pub fn reflection(&self, alpha2: &[i64]) -> OrthogonalMap {
        let rank = self.rank;
        let n4 = self.ip4(alpha2, alpha2);
        let mut m2 = vec![vec![0i64; rank]; rank];
        for j in 0..rank {
            // image of the doubled basis vector 2 e_j
            let mut e2 = vec![0i64; rank];
            e2[j] = 2;
            let k = 2 * self.ip4(&e2, alpha2);
            for i in 0..rank {
                // column j holds the doubled coordinates of s(e_j):
                // e_j - (2<e_j,a>/<a,a>) a, everything scaled consistently
                let num = e2[i] * n4 - k * alpha2[i];
                assert!(num % n4 == 0, "reflection left the doubled lattice");
                m2[i][j] = num / n4;
            }
        }
        OrthogonalMap { m2, sign: -1 }
    }

    pub fn simple_reflections(&self) -> Vec<OrthogonalMap> {
        self.simple.iter().map(|a| self.reflection(a)).collect()
    }

    /// Full Weyl group by closure from the simple reflections.
    ///
    /// Materialized only where route A needs it (rank <= 4, F4, G2).
    pub fn weyl_group(&self) -> Result<Vec<OrthogonalMap>, CatalogError> {
        let allowed = self.rank <= 4;
        if !allowed {
            return Err(CatalogError::WeylTooLarge);
        }
        let gens = self.simple_reflections();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        let id = OrthogonalMap::identity(self.rank);
        seen.insert(id.m2.concat());
        queue.push_back(id.clone());
        out.push(id);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let next = g.compose(&w);
                let key = next.m2.concat();
                if seen.insert(key) {
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(out)
    }

    pub fn height_stats(&self) -> HeightStats {
        let max_h = self
            .positive_roots
            .iter()
            .map(|r| r.height)
            .max()
            .unwrap_or(0) as usize;
        let mut by_height = vec![0i64; max_h];
        let mut short_by_height = vec![0i64; max_h];
        for r in &self.positive_roots {
            by_height[(r.height - 1) as usize] += 1;
            if !r.is_long {
                short_by_height[(r.height - 1) as usize] += 1;
            }
        }
        HeightStats {
            by_height,
            short_by_height,
        }
    }

    fn validate(&self) {
        // height-1 positive roots are exactly the simple roots
        let h1 = self
            .positive_roots
            .iter()
            .filter(|r| r.height == 1)
            .count();
        assert_eq!(h1, self.rank);
        assert!(self.positive_roots.iter().all(|r| r.height >= 1));
        // simple reflections permute the root set
        let mut all: HashSet<Vec<i64>> = HashSet::new();
        for r in &self.positive_roots {
            all.insert(r.v2.clone());
            all.insert(r.v2.iter().map(|c| -c).collect());
        }
        for s in self.simple_reflections() {
            for r in &self.positive_roots {
                assert!(all.contains(&s.apply(&r.v2)));
            }
        }
        assert!(self.is_dominant(&self.theta_l));
        if let Some(ts) = &self.theta_s {
            assert!(self.is_dominant(ts));
        }
    }

    /// Exponents of the simple Lie algebra (generalized exponents of the
    /// adjoint representation), as catalog data.
    pub fn exponents(&self) -> Vec<i64> {
        match self.ty {
            FiniteType::A(l) => (1..=l as i64).collect(),
            FiniteType::B(l) | FiniteType::C(l) => (0..l as i64).map(|i| 2 * i + 1).collect(),
            FiniteType::D(l) => {
                let mut e: Vec<i64> = (0..(l as i64) - 1).map(|i| 2 * i + 1).collect();
                e.push(l as i64 - 1);
                e.sort();
                e
            }
            FiniteType::F4 => vec![1, 5, 7, 11],
            FiniteType::G2 => vec![1, 5],
        }
    }
}

// ---------------------------------------------------------------------------
// t-deformed Kostant partition function for the finite system, and
// generalized exponents via the finite Lusztig t-analog
// ---------------------------------------------------------------------------

use crate::series::CoeffPoly;

/// Coefficient of `e^beta` in `prod_{alpha > 0} (1 - t e^alpha)^{-1}` for all
/// `beta` with simple-root coordinates componentwise `<= bound`.
///
/// Returned as a dense table keyed by mixed-radix index over the bound box.
pub(crate) struct FinitePartitionTable {
    bound: Vec<i64>,
    strides: Vec<usize>,
    table: Vec<CoeffPoly>,
}

impl FinitePartitionTable {
    pub fn build(sys: &FiniteRootSystem, bound: &[i64]) -> Self {
        let dims: Vec<usize> = bound.iter().map(|b| (*b + 1) as usize).collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let total: usize = dims.iter().product();
        let mut table = vec![CoeffPoly::zero(); total];
        table[0] = CoeffPoly::one();

        let t = CoeffPoly::t_pow(1);
        for root in &sys.positive_roots {
            let c = sys
                .simple_coords(&root.v2)
                .expect("root outside lattice");
            let offset: usize = c
                .iter()
                .zip(&strides)
                .map(|(ci, st)| (*ci as usize) * st)
                .sum();
            if offset == 0 || c.iter().zip(bound).any(|(ci, b)| ci > b) {
                continue;
            }
            // in-place ascending pass implements the geometric series of this
            // root exactly (1-D partition DP along the root direction)
            let mut odo = vec![0i64; dims.len()];
            for idx in 0..total {
                if odo.iter().zip(&c).zip(bound).all(|((o, ci), b)| o + ci <= *b) {
                    let src = table[idx].clone();
                    if !src.is_zero() {
                        let dst = idx + offset;
                        let add = src.mul(&t);
                        table[dst].add_assign(&add);
                    }
                }
                // odometer increment (row-major, last coordinate fastest)
                for pos in (0..dims.len()).rev() {
                    odo[pos] += 1;
                    if odo[pos] < dims[pos] as i64 {
                        break;
                    }
                    odo[pos] = 0;
                }
            }
        }
        FinitePartitionTable {
            bound: bound.to_vec(),
            strides,
            table,
        }
    }

    pub fn get(&self, coords: &[i64]) -> CoeffPoly {
        if coords
            .iter()
            .zip(&self.bound)
            .any(|(c, b)| *c < 0 || c > b)
        {
            return CoeffPoly::zero();
        }
        let idx: usize = coords
            .iter()
            .zip(&self.strides)
            .map(|(c, st)| (*c as usize) * st)
            .sum();
        self.table[idx].clone()
    }
}

/// Finite Lusztig t-analog `K_{lambda, 0}(t)` as a polynomial.
pub fn finite_t_analog_zero_weight(
    sys: &FiniteRootSystem,
    lambda2: &[i64],
) -> Result<CoeffPoly, CatalogError> {
    if !sys.is_dominant(lambda2) {
        return Err(CatalogError::NotDominant);
    }
    let lam_coords = match sys.simple_coords(lambda2) {
        // lambda outside the root lattice: zero weight space is empty
        None => return Ok(CoeffPoly::zero()),
        Some(c) => c,
    };
    if lam_coords.iter().any(|&c| c < 0) {
        return Ok(CoeffPoly::zero());
    }
    let group = sys.weyl_group()?;
    let lam_rho: Vec<i64> = lambda2.iter().zip(&sys.rho2).map(|(a, b)| a + b).collect();

    // images of dominant weights never exceed the dominant one coordinatewise,
    // so the targets all live in the box bounded by lambda's coordinates
    let table = FinitePartitionTable::build(sys, &lam_coords);

    let mut k = CoeffPoly::zero();
    for w in &group {
        let img = w.apply(&lam_rho);
        let target: Vec<i64> = img.iter().zip(&sys.rho2).map(|(a, b)| a - b).collect();
        if let Some(c) = sys.simple_coords(&target) {
            if c.iter().all(|&x| x >= 0) {
                let mut p = table.get(&c);
                if w.sign < 0 {
                    p = p.neg();
                }
                k.add_assign(&p);
            }
        }
    }
    Ok(k)
}

/// Generalized exponents of `V(lambda)` as a sorted multiset, via the finite
/// Lusztig t-analog.
pub fn generalized_exponents(
    sys: &FiniteRootSystem,
    lambda2: &[i64],
) -> Result<Vec<i64>, CatalogError> {
    let k = finite_t_analog_zero_weight(sys, lambda2)?;
    let mut out = Vec::new();
    for ((te, se), c) in k.terms() {
        assert_eq!(*se, 0);
        let mult: i64 = c.try_into().expect("unexpectedly large multiplicity");
        assert!(mult > 0, "negative multiplicity in t-analog");
        for _ in 0..mult {
            out.push(*te as i64);
        }
    }
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// affine catalog
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraId {
    /// A_{2l}^{(2)}
    A2Even(usize),
    /// A_{2l-1}^{(2)}
    AOdd(usize),
    /// D_{l+1}^{(2)}
    DTwo(usize),
    /// E_6^{(2)}
    E6Two,
    /// D_4^{(3)}
    D4Three,
    /// A_l^{(1)}
    AUntwisted(usize),
    /// D_l^{(1)}
    DUntwisted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// full integer span of the epsilon basis
    ZBox,
    /// integer vectors with even coordinate sum
    DParity,
    /// F4 root lattice: integral or half-integral vectors (doubled: all even
    /// or all odd)
    F4,
    /// full integer span of the simple-root basis
    SimpleSpan,
}

#[derive(Debug, Clone)]
pub struct AffineAlgebra {
    pub id: AlgebraId,
    pub name: String,
    /// twist order r
    pub twist: i64,
    /// N of the ambient simply-laced X_N
    pub ambient_rank: usize,
    /// number of short simple roots m = (N - l)/(r - 1) for r > 1
    pub short_simple_count: i64,
    /// Coxeter number
    pub coxeter: i64,
    /// dual Coxeter number (level of rho)
    pub dual_coxeter: i64,
    /// underlying finite simple Lie algebra
    pub finite: FiniteRootSystem,
    /// sigma-fixed subalgebra m_0 (differs from `finite` only for A_{2l}^{(2)})
    pub m0: FiniteRootSystem,
    pub lattice: LatticeKind,
    /// Table-1 exponent multisets
    pub e0: Vec<i64>,
    pub e1: Vec<i64>,
    /// delta in affine simple-root coordinates: (a_0, a_1, ..., a_l)
    pub marks: Vec<i64>,
    /// alpha_0 = (finite part doubled, d2)
    pub alpha0: (Vec<i64>, i64),
}

pub const CATALOG_NAMES: &[&str] = &["A2~2", "A4~2", "A5~2", "D3~2", "E6~2", "D4~3", "A1~1", "A2~1"];

impl AlgebraId {
    pub fn parse(s: &str) -> Result<Self, CatalogError> {
        let err = || CatalogError::UnknownId(s.to_string());
        let (head, twist) = s.split_once('~').ok_or_else(err)?;
        let fam = head.chars().next().ok_or_else(err)?;
        let n: usize = head[1..].parse().map_err(|_| err())?;
        let r: usize = twist.parse().map_err(|_| err())?;
        let id = match (fam, r) {
            ('A', 2) if n >= 2 && n % 2 == 0 => AlgebraId::A2Even(n / 2),
            ('A', 2) if n >= 3 && n % 2 == 1 => AlgebraId::AOdd((n + 1) / 2),
            ('D', 2) if n >= 3 => AlgebraId::DTwo(n - 1),
            ('E', 2) if n == 6 => AlgebraId::E6Two,
            ('D', 3) if n == 4 => AlgebraId::D4Three,
            ('A', 1) if n >= 1 => AlgebraId::AUntwisted(n),
            ('D', 1) if n >= 3 => AlgebraId::DUntwisted(n),
            _ => return Err(err()),
        };
        let l = id.rank();
        if l > 8 {
            return Err(CatalogError::RankLimit(l));
        }
        Ok(id)
    }

    pub fn rank(&self) -> usize {
        match self {
            AlgebraId::A2Even(l) | AlgebraId::AOdd(l) | AlgebraId::DTwo(l) => *l,
            AlgebraId::E6Two => 4,
            AlgebraId::D4Three => 2,
            AlgebraId::AUntwisted(l) | AlgebraId::DUntwisted(l) => *l,
        }
    }

    pub fn ascii_name(&self) -> String {
        match self {
            AlgebraId::A2Even(l) => format!("A{}~2", 2 * l),
            AlgebraId::AOdd(l) => format!("A{}~2", 2 * l - 1),
            AlgebraId::DTwo(l) => format!("D{}~2", l + 1),
            AlgebraId::E6Two => "E6~2".to_string(),
            AlgebraId::D4Three => "D4~3".to_string(),
            AlgebraId::AUntwisted(l) => format!("A{}~1", l),
            AlgebraId::DUntwisted(l) => format!("D{}~1", l),
        }
    }

    pub fn is_twisted(&self) -> bool {
        !matches!(self, AlgebraId::AUntwisted(_) | AlgebraId::DUntwisted(_))
    }
}

pub fn build(id: AlgebraId) -> Result<AffineAlgebra, CatalogError> {
    if id.rank() > 8 {
        return Err(CatalogError::RankLimit(id.rank()));
    }
    let (twist, ambient, finite_ty, m0_ty, lattice, e0, e1, coxeter): (
        i64,
        usize,
        FiniteType,
        FiniteType,
        LatticeKind,
        Vec<i64>,
        Vec<i64>,
        i64,
    ) = match id {
        AlgebraId::A2Even(l) => (
            2,
            2 * l,
            FiniteType::C(l),
            FiniteType::B(l),
            LatticeKind::ZBox,
            (0..l as i64).map(|i| 2 * i + 1).collect(),
            (1..=l as i64).map(|i| 2 * i).collect(),
            2 * l as i64 + 1,
        ),
        AlgebraId::AOdd(l) => (
            2,
            2 * l - 1,
            FiniteType::C(l),
            FiniteType::C(l),
            LatticeKind::DParity,
            (0..l as i64).map(|i| 2 * i + 1).collect(),
            (1..l as i64).map(|i| 2 * i).collect(),
            2 * l as i64 - 1,
        ),
        AlgebraId::DTwo(l) => (
            2,
            l + 1,
            FiniteType::B(l),
            FiniteType::B(l),
            LatticeKind::ZBox,
            (0..l as i64).map(|i| 2 * i + 1).collect(),
            vec![l as i64],
            l as i64 + 1,
        ),
        AlgebraId::E6Two => (
            2,
            6,
            FiniteType::F4,
            FiniteType::F4,
            LatticeKind::F4,
            vec![1, 5, 7, 11],
            vec![4, 8],
            9,
        ),
        AlgebraId::D4Three => (
            3,
            4,
            FiniteType::G2,
            FiniteType::G2,
            LatticeKind::SimpleSpan,
            vec![1, 5],
            vec![3],
            4,
        ),
        AlgebraId::AUntwisted(l) => (
            1,
            l,
            FiniteType::A(l),
            FiniteType::A(l),
            LatticeKind::SimpleSpan,
            (1..=l as i64).collect(),
            (1..=l as i64).collect(),
            l as i64 + 1,
        ),
        AlgebraId::DUntwisted(l) => {
            let f = FiniteRootSystem::build(FiniteType::D(l));
            let e = f.exponents();
            (
                1,
                l,
                FiniteType::D(l),
                FiniteType::D(l),
                LatticeKind::DParity,
                e.clone(),
                e,
                2 * l as i64 - 2,
            )
        }
    };

    let finite = FiniteRootSystem::build(finite_ty);
    let m0 = if m0_ty == finite_ty {
        finite.clone()
    } else {
        FiniteRootSystem::build(m0_ty)
    };
    let l = finite.rank;

    // alpha_0 and the marks (affine simple coordinates of delta)
    let (alpha0, theta_for_marks): ((Vec<i64>, i64), Vec<i64>) = match id {
        AlgebraId::A2Even(_) => {
            let half_theta: Vec<i64> = finite.theta_l.iter().map(|c| c / 2).collect();
            (
                (half_theta.iter().map(|c| -c).collect(), 1),
                finite.theta_l.clone(),
            )
        }
        AlgebraId::AUntwisted(_) | AlgebraId::DUntwisted(_) => (
            (finite.theta_l.iter().map(|c| -c).collect(), 2),
            finite.theta_l.clone(),
        ),
        _ => {
            let ts = finite.theta_s.clone().expect("twisted type has two lengths");
            ((ts.iter().map(|c| -c).collect(), 2), ts)
        }
    };
    let a0 = 2 / alpha0.1;
    let mut marks = vec![a0];
    marks.extend(
        finite
            .simple_coords(&theta_for_marks)
            .expect("theta outside root lattice"),
    );
    debug_assert_eq!(marks.iter().sum::<i64>(), coxeter);

    // level of rho: <rho, alpha_0-check> = 1 with rho = (rho-bar, L, 0)
    let n0_4 = finite.ip4(&alpha0.0, &alpha0.0);
    assert!(n0_4 % 4 == 0);
    let n0 = n0_4 / 4;
    let rho_f0 = finite.ip4(&finite.rho2, &alpha0.0);
    assert!(rho_f0 % 4 == 0);
    let dual_coxeter = {
        let num = n0 - 2 * (rho_f0 / 4);
        assert!(num % alpha0.1 == 0);
        num / alpha0.1
    };

    let short_simple_count = if twist > 1 {
        (ambient as i64 - l as i64) / (twist - 1)
    } else {
        l as i64
    };

    let g = AffineAlgebra {
        id,
        name: id.ascii_name(),
        twist,
        ambient_rank: ambient,
        short_simple_count,
        coxeter,
        dual_coxeter,
        finite,
        m0,
        lattice,
        e0,
        e1,
        marks,
        alpha0,
    };
    g.validate()?;
    Ok(g)
}

pub fn build_named(name: &str) -> Result<AffineAlgebra, CatalogError> {
    build(AlgebraId::parse(name)?)
}

impl AffineAlgebra {
    pub fn rank(&self) -> usize {
        self.finite.rank
    }

    /// Exponent multiset E_n (n >= 1; E_0 is the n ≡ 0 class).
    pub fn exponents_at(&self, n: i64) -> &[i64] {
        if n.rem_euclid(self.twist) == 0 {
            &self.e0
        } else {
            &self.e1
        }
    }

    /// mult(n delta)
    pub fn imaginary_mult(&self, n: i64) -> Result<i64, CatalogError> {
        if n < 1 {
            return Err(CatalogError::BadImaginaryIndex);
        }
        Ok(match self.id {
            AlgebraId::A2Even(l) => l as i64,
            _ => {
                if n % self.twist == 0 {
                    self.rank() as i64
                } else {
                    self.short_simple_count
                }
            }
        })
    }

    /// All positive real roots with delta-grade `<= max_d2`, as monomials
    /// `(finite doubled, d2)`, each exactly once.
    pub fn positive_real_roots_up_to(&self, max_d2: i64) -> Vec<Monomial> {
        let mut out = Vec::new();
        for r in &self.finite.positive_roots {
            out.push(Monomial::new(r.v2.clone(), 0));
        }
        match self.id {
            AlgebraId::A2Even(_) => {
                for r in &self.finite.positive_roots {
                    for sgn in [1i64, -1] {
                        let v: Vec<i64> = r.v2.iter().map(|c| c * sgn).collect();
                        if r.is_long {
                            // S_1: (alpha + (2n-1) delta)/2, norm 1
                            let half: Vec<i64> = v.iter().map(|c| c / 2).collect();
                            let mut d2 = 1;
                            while d2 <= max_d2 {
                                out.push(Monomial::new(half.clone(), d2));
                                d2 += 2;
                            }
                            // S_4: alpha + 2n delta, norm 4
                            let mut d2 = 4;
                            while d2 <= max_d2 {
                                out.push(Monomial::new(v.clone(), d2));
                                d2 += 4;
                            }
                        } else {
                            // S_2: alpha + n delta, norm 2
                            let mut d2 = 2;
                            while d2 <= max_d2 {
                                out.push(Monomial::new(v.clone(), d2));
                                d2 += 2;
                            }
                        }
                    }
                }
            }
            _ => {
                let step_of = |r: &Root| -> i64 {
                    if self.twist == 1 {
                        2
                    } else {
                        // beta + (<beta,beta>/2) j delta
                        r.norm2
                    }
                };
                for r in &self.finite.positive_roots {
                    let step = step_of(r);
                    for sgn in [1i64, -1] {
                        let v: Vec<i64> = r.v2.iter().map(|c| c * sgn).collect();
                        let mut d2 = step;
                        while d2 <= max_d2 {
                            out.push(Monomial::new(v.clone(), d2));
                            d2 += step;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn lattice_contains(&self, v2: &[i64]) -> bool {
        match self.lattice {
            LatticeKind::ZBox | LatticeKind::SimpleSpan => v2.iter().all(|c| c % 2 == 0),
            LatticeKind::DParity => {
                v2.iter().all(|c| c % 2 == 0) && v2.iter().map(|c| c / 2).sum::<i64>() % 2 == 0
            }
            LatticeKind::F4 => {
                v2.iter().all(|c| c % 2 == 0) || v2.iter().all(|c| c % 2 != 0)
            }
        }
    }

    /// All lattice vectors with `<v, v> <= max_norm2`, doubled coordinates.
    pub fn lattice_ball(&self, max_norm2: i64) -> Vec<Vec<i64>> {
        assert!(max_norm2 >= 0);
        let l = self.rank();
        // coordinate bound: v_i^2 <= max_norm2 * (G^-1)_ii, on doubled coords
        let (inv, den) = inverse_scaled(&self.finite.gram);
        let mut bounds = Vec::with_capacity(l);
        for i in 0..l {
            let num = 4 * max_norm2 * inv[i][i];
            let b = isqrt(if den > 0 { num / den + 1 } else { 0 }) + 1;
            bounds.push(b);
        }
        let mut out = Vec::new();
        let mut cur = vec![0i64; l];
        self.ball_rec(0, &bounds, &mut cur, max_norm2, &mut out);
        out.sort();
        out
    }

    fn ball_rec(
        &self,
        i: usize,
        bounds: &[i64],
        cur: &mut Vec<i64>,
        max_norm2: i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == bounds.len() {
            if self.lattice_contains(cur) {
                let n4 = self.finite.ip4(cur, cur);
                if n4 % 4 == 0 && n4 / 4 <= max_norm2 {
                    out.push(cur.clone());
                }
            }
            return;
        }
        for v in -bounds[i]..=bounds[i] {
            cur[i] = v;
            self.ball_rec(i + 1, bounds, cur, max_norm2, out);
        }
        cur[i] = 0;
    }

    /// Affine simple-root coordinates `(c_0, c_1, ..., c_l)` of a level-zero
    /// weight `(f2, d2)`, if integral.
    pub fn affine_coords(&self, f2: &[i64], d2: i64) -> Option<Vec<i64>> {
        let d0 = self.alpha0.1;
        if d2.rem_euclid(d0) != 0 {
            return None;
        }
        let c0 = d2 / d0;
        let rest: Vec<i64> = f2
            .iter()
            .zip(&self.alpha0.0)
            .map(|(f, a)| f - c0 * a)
            .collect();
        let mut coords = vec![c0];
        coords.extend(self.finite.simple_coords(&rest)?);
        Some(coords)
    }

    fn validate(&self) -> Result<(), CatalogError> {
        let l = self.rank() as i64;
        if self.twist > 1 {
            assert_eq!(
                self.short_simple_count,
                (self.ambient_rank as i64 - l) / (self.twist - 1)
            );
        }
        // |E_n| == mult(n delta)
        for n in 1..=(2 * self.twist) {
            assert_eq!(
                self.exponents_at(n).len() as i64,
                self.imaginary_mult(n).unwrap(),
                "|E_n| != mult(n delta) for {} at n={}",
                self.name,
                n
            );
        }
        // alpha_0 must be a (possibly half) root of the correct norm
        let n0 = self.finite.norm2(&self.alpha0.0.iter().map(|c| -c).collect::<Vec<_>>());
        match self.id {
            AlgebraId::A2Even(_) => assert_eq!(n0, 1),
            _ => assert_eq!(n0, 2),
        }
        Ok(())
    }

    /// Positive exponents `{e + h n : n >= 0, e in E_n}` up to `max`.
    pub fn positive_affine_exponents(&self, max: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let mut n = 0i64;
        while n * self.coxeter <= max {
            let es: &[i64] = if n == 0 {
                &self.e0
            } else {
                self.exponents_at(n)
            };
            for e in es {
                let v = e + self.coxeter * n;
                if v <= max && v > 0 {
                    out.push(v);
                }
            }
            n += 1;
        }
        out.sort();
        out
    }

    /// Exponent multiset of the ambient simply-laced algebra X_N.
    pub fn ambient_exponents(&self) -> Vec<i64> {
        match self.id {
            AlgebraId::A2Even(l) => (1..=(2 * l as i64)).collect(),
            AlgebraId::AOdd(l) => (1..=(2 * l as i64 - 1)).collect(),
            AlgebraId::DTwo(l) => FiniteRootSystem::build(FiniteType::D(l + 1)).exponents(),
            AlgebraId::E6Two => vec![1, 4, 5, 7, 8, 11],
            AlgebraId::D4Three => vec![1, 3, 3, 5],
            AlgebraId::AUntwisted(l) => (1..=(l as i64)).collect(),
            AlgebraId::DUntwisted(l) => FiniteRootSystem::build(FiniteType::D(l)).exponents(),
        }
    }
}

// handy lookup for tests and debugging
#[cfg(test)]
pub(crate) fn root_multiplicity_map(g: &AffineAlgebra, max_d2: i64) -> HashMap<Monomial, i64> {
    let mut map = HashMap::new();
    for r in g.positive_real_roots_up_to(max_d2) {
        *map.entry(r).or_insert(0) += 1;
    }
    map
}
