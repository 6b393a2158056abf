//! t-deformed Kostant partition function and affine Kostka-Foulkes
//! polynomials via the alternating Weyl-group sum (route A).
//!
//! The partition table works in affine simple-root coordinates `(c_0, ...,
//! c_l)`. Any defect of the form `lambda + rho - w(lambda + rho)` is a
//! nonnegative combination of simple roots, so for string coefficients at
//! `mu = lambda - k delta` every partition argument satisfies `c <= k *
//! marks(delta)` componentwise: the finite window below is provably complete,
//! with no truncation heuristics.

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebras::{AffineAlgebra, CatalogError};
use crate::series::{CoeffPoly, Monomial, Series, SeriesError, TruncationSpec};
use crate::weyl::{enumerate_contributing, AffineWeight, WeylError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KostkaError {
    #[error("lambda and mu have different levels")]
    LevelMismatch,
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Dense table of partition values over an affine-coordinate box.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    pub bound: Vec<i64>,
    pub two_variable: bool,
    strides: Vec<usize>,
    table: Vec<CoeffPoly>,
}

impl PartitionTable {
    /// Coefficient of `e^beta` (beta given by affine coordinates) in
    /// `prod_{alpha > 0} (1 - u_alpha e^alpha)^{-mult alpha}`.
    pub fn get(&self, coords: &[i64]) -> CoeffPoly {
        if coords.len() != self.bound.len()
            || coords.iter().zip(&self.bound).any(|(c, b)| *c < 0 || c > b)
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

    /// Rebuild a dense table from its nonzero entries (the inverse of
    /// [`PartitionTable::entries`]); out-of-window coordinates are rejected.
    pub fn from_entries(
        bound: Vec<i64>,
        two_variable: bool,
        entries: impl IntoIterator<Item = (Vec<i64>, CoeffPoly)>,
    ) -> Option<Self> {
        let dims: Vec<usize> = bound.iter().map(|b| (*b + 1) as usize).collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let total: usize = dims.iter().product();
        let mut table = vec![CoeffPoly::zero(); total];
        for (coords, p) in entries {
            if coords.len() != bound.len()
                || coords.iter().zip(&bound).any(|(c, b)| *c < 0 || c > b)
            {
                return None;
            }
            let idx: usize = coords
                .iter()
                .zip(&strides)
                .map(|(c, st)| (*c as usize) * st)
                .sum();
            table[idx] = p;
        }
        Some(PartitionTable {
            bound,
            two_variable,
            strides,
            table,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vec<i64>, &CoeffPoly)> {
        let bound = self.bound.clone();
        self.table.iter().enumerate().filter_map(move |(idx, p)| {
            if p.is_zero() {
                return None;
            }
            let mut rem = idx;
            let mut coords = vec![0i64; bound.len()];
            for i in (0..bound.len()).rev() {
                let dim = (bound[i] + 1) as usize;
                coords[i] = (rem % dim) as i64;
                rem /= dim;
            }
            Some((coords, p))
        })
    }
}

fn dp_over_roots(bound: &[i64], roots: &[(Vec<i64>, CoeffPoly)]) -> PartitionTable {
    let dims: Vec<usize> = bound.iter().map(|b| (*b + 1) as usize).collect();
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let total: usize = dims.iter().product();
    let mut table = vec![CoeffPoly::zero(); total];
    table[0] = CoeffPoly::one();

    for (coords, u) in roots {
        if coords.iter().zip(bound).any(|(c, b)| c > b) || coords.iter().all(|&c| c == 0) {
            continue;
        }
        let offset: usize = coords
            .iter()
            .zip(&strides)
            .map(|(c, st)| (*c as usize) * st)
            .sum();
        // ascending in-place pass: exact geometric series along this root
        let mut odo = vec![0i64; dims.len()];
        for idx in 0..total {
            if odo
                .iter()
                .zip(coords)
                .zip(bound)
                .all(|((o, c), b)| o + c <= *b)
                && !table[idx].is_zero()
            {
                let add = table[idx].mul(u);
                table[idx + offset].add_assign(&add);
            }
            for pos in (0..dims.len()).rev() {
                odo[pos] += 1;
                if odo[pos] < dims[pos] as i64 {
                    break;
                }
                odo[pos] = 0;
            }
        }
    }
    PartitionTable {
        bound: bound.to_vec(),
        two_variable: false,
        strides,
        table,
    }
}

/// Build the partition table for all arguments with affine coordinates
/// componentwise below `bound` (length `l + 1`, zeroth node first).
///
/// In the two-variable version, real roots of norm 1 carry `s` instead of `t`
/// (the shortest-root class of `A_{2l}^{(2)}`); imaginary roots and all other
/// real roots carry `t`.
pub fn partition_table(
    g: &AffineAlgebra,
    bound: &[i64],
    two_variable: bool,
) -> Result<PartitionTable, KostkaError> {
    assert_eq!(bound.len(), g.rank() + 1);
    let max_d2 = bound[0] * g.alpha0.1;
    let mut roots: Vec<(Vec<i64>, CoeffPoly)> = Vec::new();
    for m in g.positive_real_roots_up_to(max_d2) {
        if let Some(coords) = g.affine_coords(&m.finite, m.d2) {
            if coords.iter().any(|&c| c < 0) || coords.iter().zip(bound).any(|(c, b)| c > b) {
                continue;
            }
            let u = if two_variable && g.finite.norm2(&m.finite) == 1 {
                CoeffPoly::s_pow(1)
            } else {
                CoeffPoly::t_pow(1)
            };
            roots.push((coords, u));
        }
    }
    let delta_d2 = 2;
    let mut n = 1i64;
    while n * delta_d2 <= max_d2.max(0) {
        let coords: Vec<i64> = g.marks.iter().map(|a| a * n).collect();
        if coords.iter().zip(bound).all(|(c, b)| c <= b) {
            for _ in 0..g.imaginary_mult(n)? {
                roots.push((coords.clone(), CoeffPoly::t_pow(1)));
            }
        }
        n += 1;
    }
    let mut t = dp_over_roots(bound, &roots);
    t.two_variable = two_variable;
    Ok(t)
}

/// Partition table sized for string coefficients down to `lambda - max_q
/// delta`.
pub fn t_kostant(
    g: &AffineAlgebra,
    max_q: i64,
    two_variable: bool,
) -> Result<PartitionTable, KostkaError> {
    let bound: Vec<i64> = g.marks.iter().map(|a| a * max_q).collect();
    partition_table(g, &bound, two_variable)
}

/// `K_{lambda mu} = sum_w eps(w) P(w(lambda+rho) - (mu+rho))`.
pub fn kostka_poly(
    g: &AffineAlgebra,
    lambda: &AffineWeight,
    mu: &AffineWeight,
    two_variable: bool,
) -> Result<CoeffPoly, KostkaError> {
    if lambda.level != mu.level {
        return Err(KostkaError::LevelMismatch);
    }
    let diff = lambda.sub(mu);
    let bound = match g.affine_coords(&diff.finite2, diff.d2) {
        Some(c) if c.iter().all(|&x| x >= 0) => c,
        // mu not below lambda in the root-lattice order: empty sum
        _ => return Ok(CoeffPoly::zero()),
    };
    let table = partition_table(g, &bound, two_variable)?;
    let rho = AffineWeight::rho(g);
    let lam_rho = lambda.add(&rho);
    let mu_rho = mu.add(&rho);
    kostka_from_parts(g, &table, &enumerate_contributing(g, &lam_rho, &mu_rho)?, &mu_rho)
}

fn kostka_from_parts(
    g: &AffineAlgebra,
    table: &PartitionTable,
    contributions: &[(i64, AffineWeight)],
    mu_rho: &AffineWeight,
) -> Result<CoeffPoly, KostkaError> {
    let mut k = CoeffPoly::zero();
    for (sign, img) in contributions {
        let beta = img.sub(mu_rho);
        if let Some(coords) = g.affine_coords(&beta.finite2, beta.d2) {
            if coords.iter().all(|&c| c >= 0) {
                let mut p = table.get(&coords);
                if *sign < 0 {
                    p = p.neg();
                }
                k.add_assign(&p);
            }
        }
    }
    Ok(k)
}

/// Route-A t-string function of the basic representation:
/// `sum_{k=0}^{max_q} K_{Lambda_0, Lambda_0 - k delta} q^k`.
pub fn string_function_weylsum(
    g: &AffineAlgebra,
    max_q: i64,
    two_variable: bool,
) -> Result<Series, KostkaError> {
    let table = t_kostant(g, max_q, two_variable)?;
    string_function_from_table(g, max_q, &table)
}

/// Same as [`string_function_weylsum`], reusing an already built (possibly
/// cached) partition table. The table must cover `max_q * marks(delta)`.
pub fn string_function_from_table(
    g: &AffineAlgebra,
    max_q: i64,
    table: &PartitionTable,
) -> Result<Series, KostkaError> {
    assert!(max_q >= 0);
    let rank = g.rank();
    assert!(
        g.marks.iter().zip(&table.bound).all(|(a, b)| a * max_q <= *b),
        "partition table window too small for the requested order"
    );
    let rho = AffineWeight::rho(g);
    let lam_rho = AffineWeight::fundamental_zero(rank).add(&rho);
    // the most permissive mu bounds the enumeration once for all k
    let mu_min_rho = AffineWeight::new(lam_rho.finite2.clone(), lam_rho.level, lam_rho.d2 - 2 * max_q);
    let contributions = enumerate_contributing(g, &lam_rho, &mu_min_rho)?;

    let mut out = Series::zero(TruncationSpec::new(rank, 2 * max_q, 0));
    for k in 0..=max_q {
        let mu_rho = AffineWeight::new(lam_rho.finite2.clone(), lam_rho.level, lam_rho.d2 - 2 * k);
        let kp = kostka_from_parts(g, table, &contributions, &mu_rho)?;
        out.insert(Monomial::q_power(rank, 2 * k), kp);
    }
    Ok(out)
}

/// `K(1)`: specialize both t and s to one.
pub fn weight_multiplicity(k: &CoeffPoly) -> BigInt {
    k.eval_one()
}
