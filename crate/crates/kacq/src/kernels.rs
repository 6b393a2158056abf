//! Constant-term route: the deformed Weyl denominator (a Cherednik-style
//! kernel), the lattice theta series, and the string function obtained as a
//! constant term of their product.
//!
//! The pipeline works inside a truncation window built by
//! [`kernel_truncation`]: a coordinate box plus a budget-aware cone prune.
//! The prune is sound — a monomial is dropped only when no combination of
//! remaining kernel factors within the leftover delta-grade budget can bring
//! it back to the constant-term axis.

use thiserror::Error;

use crate::algebras::{AffineAlgebra, CatalogError};
use crate::identities::{compare, VerificationReport};
use crate::series::{CoeffPoly, HtPrune, Monomial, Series, SeriesError, TruncationSpec};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Truncation window for constant-term extraction at `q`-order `max_q`.
///
/// The cone prune keeps a monomial `e^f q^{d2/2}` only while every simple-root
/// coordinate functional of `f` stays inside a two-sided budget cone:
/// * below, `c >= -(base + slope * remaining)`: climbing back to the
///   constant-term axis costs delta-grade at a bounded rate, so a monomial
///   too deep for the leftover budget can never contribute;
/// * above, `c <= base + slope * spent`: coordinates only rise through
///   delta-graded factors (or the one theta term, covered by `base`), so a
///   monomial cannot sit higher than the grade it has already consumed
///   allows. Descending back down is free, hence no `remaining` term.
///
/// `slope` is the worst-case coordinate gain per unit of delta-grade over all
/// kernel factors; `base` covers the theta term net of its own grade cost.
/// `pad` loosens every bound (in simple-root coordinate units) and widens the
/// box; results must be independent of it.
pub fn kernel_truncation(g: &AffineAlgebra, max_q: i64, pad: i64) -> TruncationSpec {
    assert!(max_q >= 0 && pad >= 0);
    let max_d2 = 2 * max_q;
    let rank = g.rank();
    let (rows, den) = g.finite.coord_rows();

    // per-row ascent rate of kernel factors with positive delta-grade
    let mut slope = vec![1i64; rank];
    for root in g.positive_real_roots_up_to(max_d2) {
        if root.d2 == 0 {
            continue;
        }
        for (j, row) in rows.iter().enumerate() {
            let gain: i64 = -row.iter().zip(&root.finite).map(|(a, b)| a * b).sum::<i64>();
            if gain > 0 {
                slope[j] = slope[j].max((gain + root.d2 - 1) / root.d2);
            }
        }
    }

    // one-time allowance for the theta term, net of the grade it consumes
    let ball = g.lattice_ball(max_d2);
    let mut base = vec![pad * den; rank];
    for gamma in &ball {
        let n = g.finite.norm2(gamma);
        for (j, row) in rows.iter().enumerate() {
            let v: i64 = row.iter().zip(gamma).map(|(a, b)| a * b).sum();
            base[j] = base[j].max(v - slope[j] * n + pad * den);
        }
    }

    // box: convert the per-coordinate extents back to the epsilon basis
    let extent: Vec<i64> = (0..rank).map(|j| base[j] + slope[j] * max_d2).collect();
    let mut box_bound = 0i64;
    for i in 0..rank {
        let num: i64 = (0..rank)
            .map(|j| extent[j] * g.finite.simple[j][i].abs())
            .sum();
        box_bound = box_bound.max((num + den - 1) / den);
    }
    box_bound += 2 + 2 * pad;

    // lower cone: row . f >= -(base_j + slope_j * remaining)
    // upper cone: row . f <= base_j + slope_j * (max_d2 - remaining), encoded
    // as a negated row with a negative per-remaining slope
    let mut prune_rows = Vec::with_capacity(2 * rank);
    let mut prune_base = Vec::with_capacity(2 * rank);
    let mut prune_slope = Vec::with_capacity(2 * rank);
    for j in 0..rank {
        prune_rows.push(rows[j].clone());
        prune_base.push(base[j]);
        prune_slope.push(slope[j]);
        prune_rows.push(rows[j].iter().map(|v| -v).collect());
        prune_base.push(base[j] + slope[j] * max_d2);
        prune_slope.push(-slope[j]);
    }

    TruncationSpec::new(rank, max_d2, box_bound).with_ht_prune(HtPrune {
        rows: prune_rows,
        base: prune_base,
        slope: prune_slope,
    })
}

/// Deformed denominator over the positive real roots:
/// `prod (1 - e^{-alpha}) / (1 - u_alpha e^{-alpha})` with `u_alpha = t`,
/// except `u_alpha = s` on norm-1 roots when `two_variable` is set.
pub fn cherednik_kernel(
    g: &AffineAlgebra,
    spec: &TruncationSpec,
    two_variable: bool,
) -> Result<Series, KernelError> {
    let mut r = Series::one(spec.clone());
    for root in g.positive_real_roots_up_to(spec.max_d2) {
        let m = Monomial::new(root.finite.iter().map(|c| -c).collect(), root.d2);
        let u = if two_variable && g.finite.norm2(&root.finite) == 1 {
            CoeffPoly::s_pow(1)
        } else {
            CoeffPoly::t_pow(1)
        };
        let factor = Series::one_minus(spec.clone(), m.clone(), CoeffPoly::one())
            .mul(&Series::inv_one_minus(spec.clone(), &m, &u)?)?;
        r = r.mul(&factor)?;
    }
    Ok(r)
}

/// Imaginary-root part of the deformed denominator:
/// `prod_{n>=1} ((1 - q^n) / (1 - t q^n))^{mult(n delta)}`.
pub fn imaginary_kernel(
    g: &AffineAlgebra,
    spec: &TruncationSpec,
) -> Result<Series, KernelError> {
    let mut r = Series::one(spec.clone());
    let mut n = 1i64;
    while 2 * n <= spec.max_d2 {
        let m = Monomial::q_power(spec.rank, 2 * n);
        let factor = Series::one_minus(spec.clone(), m.clone(), CoeffPoly::one())
            .mul(&Series::inv_one_minus(spec.clone(), &m, &CoeffPoly::t_pow(1))?)?;
        let mult = g.imaginary_mult(n)?;
        for _ in 0..mult {
            r = r.mul(&factor)?;
        }
        n += 1;
    }
    Ok(r)
}

/// `sum_{gamma in M} e^gamma q^{<gamma,gamma>/2}` over the translation
/// lattice, truncated to the window.
pub fn theta_series(g: &AffineAlgebra, spec: &TruncationSpec) -> Series {
    let mut r = Series::zero(spec.clone());
    for gamma in g.lattice_ball(spec.max_d2) {
        let n = g.finite.norm2(&gamma);
        r.insert(Monomial::new(gamma, n), CoeffPoly::one());
    }
    r
}

/// Constant term of `series * Theta` without forming the product: each
/// monomial `c e^{-gamma} q^{d2/2}` with `gamma` in the lattice contributes
/// `c q^{(d2 + <gamma,gamma>)/2}`.
pub fn constant_term_with_theta(g: &AffineAlgebra, series: &Series) -> Series {
    let spec = series.spec.clone();
    let mut r = Series::zero(spec.clone());
    for (m, c) in series.terms() {
        let gamma: Vec<i64> = m.finite.iter().map(|x| -x).collect();
        if !g.lattice_contains(&gamma) {
            continue;
        }
        let n4 = g.finite.ip4(&gamma, &gamma);
        if n4 % 4 != 0 {
            continue;
        }
        let d2 = m.d2 + n4 / 4;
        if d2 <= spec.max_d2 {
            r.insert(Monomial::q_power(spec.rank, d2), c.clone());
        }
    }
    r
}

/// Basic string function via constant-term extraction:
/// `prod_{n>=1} (1 - t q^n)^{-mult(n delta)} * ct(kernel * Theta)`,
/// returned as a pure `q`-series on the plain window `(rank, 2 max_q, 0)`.
pub fn string_function_ct(
    g: &AffineAlgebra,
    max_q: i64,
    two_variable: bool,
    pad: i64,
) -> Result<Series, KernelError> {
    let spec = kernel_truncation(g, max_q, pad);
    let mu = cherednik_kernel(g, &spec, two_variable)?;
    let mut r = constant_term_with_theta(g, &mu);
    for n in 1..=max_q {
        let mult = g.imaginary_mult(n)?;
        let inv = Series::inv_one_minus(
            spec.clone(),
            &Monomial::q_power(spec.rank, 2 * n),
            &CoeffPoly::t_pow(1),
        )?;
        for _ in 0..mult {
            r = r.mul(&inv)?;
        }
    }
    Ok(r.reproject(TruncationSpec::new(g.rank(), 2 * max_q, 0)))
}

/// `e^{-Lambda_0} ch L(Lambda_0)` for the level-one vacuum module:
/// `Theta * prod_{n>=1} (1 - q^n)^{-mult(n delta)}`.
pub fn basic_character_shifted(
    g: &AffineAlgebra,
    max_q: i64,
) -> Result<Series, KernelError> {
    let max_d2 = 2 * max_q;
    let box_bound = g
        .lattice_ball(max_d2)
        .iter()
        .flat_map(|v| v.iter().map(|c| c.abs()))
        .max()
        .unwrap_or(0);
    let spec = TruncationSpec::new(g.rank(), max_d2, box_bound);
    let mut r = theta_series(g, &spec);
    for n in 1..=max_q {
        let mult = g.imaginary_mult(n)?;
        let inv = Series::inv_one_minus(
            spec.clone(),
            &Monomial::q_power(spec.rank, 2 * n),
            &CoeffPoly::one(),
        )?;
        for _ in 0..mult {
            r = r.mul(&inv)?;
        }
    }
    Ok(r)
}

/// Parameters of the rank-`l` (C-dual, C) product kernel. All exponents are
/// in half-delta-grade units: `k2[i]` encodes `k_i = k2[i] / 2`. With
/// `k4_infinite` the fourth parameter pair is removed (its factors tend to 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacdonaldParams {
    pub k2: [i64; 5],
    pub k4_infinite: bool,
}

impl MacdonaldParams {
    /// The one-parameter specialization `k3 = k5 = 2 k1 = 2 k2`, `k4 = 0`
    /// (or `k4 -> infinity`), driven by `t = q^{k5}` with `k5 = k5_2 / 2`.
    pub fn specialized(k5_2: i64, k4_infinite: bool) -> Self {
        assert!(k5_2 >= 0 && k5_2 % 2 == 0);
        Self {
            k2: [k5_2 / 2, k5_2 / 2, k5_2, 0, k5_2],
            k4_infinite,
        }
    }
}

/// The (C-dual, C) kernel `Delta = Delta_1 * Delta_2` on rank `l`:
///
/// `Delta_1` runs over the short positive directions `eps_i` with numerator
/// `poch(e^{-2a}; q) poch(q e^{2a}; q)` and denominator parameters
/// `(q^{k1}, -q^{k2}, q^{k3+1/2}, -q^{k4+1/2})` paired with
/// `(q^{k1+1}, -q^{k2+1}, q^{k3+1/2}, -q^{k4+1/2})` on the inverse direction.
/// `Delta_2` runs over `eps_i +- eps_j` with the single parameter `q^{k5}`.
pub fn macdonald_kernel_cc(
    l: usize,
    params: &MacdonaldParams,
    spec: &TruncationSpec,
) -> Result<Series, KernelError> {
    assert_eq!(spec.rank, l);
    let q = Monomial::q_power(l, 2);
    let one = CoeffPoly::one();
    let neg = CoeffPoly::constant(-1);
    let mut r = Series::one(spec.clone());

    let eps = |i: usize, scale: i64| -> Vec<i64> {
        let mut v = vec![0i64; l];
        v[i] = 2 * scale;
        v
    };

    // Delta_1 over the eps_i directions
    for i in 0..l {
        let a = eps(i, 1);
        let na: Vec<i64> = a.iter().map(|c| -c).collect();
        let a2 = eps(i, 2);
        let na2: Vec<i64> = a2.iter().map(|c| -c).collect();
        r = r.mul(&Series::poch(spec.clone(), &Monomial::new(na2, 0), &one, &q)?)?;
        r = r.mul(&Series::poch(spec.clone(), &Monomial::new(a2, 2), &one, &q)?)?;
        // (u_i, sign, u'_i) delta-grades
        let pairs = [
            (params.k2[0], 1, params.k2[0] + 2),
            (params.k2[1], -1, params.k2[1] + 2),
            (params.k2[2] + 1, 1, params.k2[2] + 1),
            (params.k2[3] + 1, -1, params.k2[3] + 1),
        ];
        for (idx, (du, sgn, dup)) in pairs.iter().enumerate() {
            if idx == 3 && params.k4_infinite {
                continue;
            }
            let c = if *sgn < 0 { neg.clone() } else { one.clone() };
            r = r.mul(&Series::poch_inv(
                spec.clone(),
                &Monomial::new(na.clone(), *du),
                &c,
                &q,
            )?)?;
            r = r.mul(&Series::poch_inv(
                spec.clone(),
                &Monomial::new(a.clone(), *dup),
                &c,
                &q,
            )?)?;
        }
    }

    // Delta_2 over eps_i - eps_j and eps_i + eps_j
    let k5 = params.k2[4];
    for i in 0..l {
        for j in (i + 1)..l {
            for sj in [-1i64, 1] {
                let mut a = vec![0i64; l];
                a[i] = 2;
                a[j] = 2 * sj;
                let na: Vec<i64> = a.iter().map(|c| -c).collect();
                r = r.mul(&Series::poch(
                    spec.clone(),
                    &Monomial::new(na.clone(), 0),
                    &one,
                    &q,
                )?)?;
                r = r.mul(&Series::poch(
                    spec.clone(),
                    &Monomial::new(a.clone(), 2),
                    &one,
                    &q,
                )?)?;
                r = r.mul(&Series::poch_inv(
                    spec.clone(),
                    &Monomial::new(na, k5),
                    &one,
                    &q,
                )?)?;
                r = r.mul(&Series::poch_inv(
                    spec.clone(),
                    &Monomial::new(a, k5 + 2),
                    &one,
                    &q,
                )?)?;
            }
        }
    }
    Ok(r)
}

/// Rank-one triple product: `prod_{n>=0} (1 + q^{n+1/2} e)(1 + q^{n+1/2}
/// e^{-1})` equals `poch(q;q)^{-1} sum_n q^{n^2/2} e^n`, checked exactly to
/// delta-grade `max_d2`.
pub fn jacobi_triple_product_check(max_d2: i64) -> Result<VerificationReport, KernelError> {
    let mut n_max = 0i64;
    while (n_max + 1) * (n_max + 1) <= max_d2 {
        n_max += 1;
    }
    let spec = TruncationSpec::new(1, max_d2, 2 * (n_max + 1));
    let q = Monomial::q_power(1, 2);
    let neg = CoeffPoly::constant(-1);

    let lhs = Series::poch(spec.clone(), &Monomial::new(vec![2], 1), &neg, &q)?
        .mul(&Series::poch(
            spec.clone(),
            &Monomial::new(vec![-2], 1),
            &neg,
            &q,
        )?)?;

    let mut theta = Series::zero(spec.clone());
    for n in -n_max..=n_max {
        theta.insert(Monomial::new(vec![2 * n], n * n), CoeffPoly::one());
    }
    let rhs = theta.mul(&Series::poch_inv(spec, &q, &CoeffPoly::one(), &q)?)?;

    Ok(compare(
        "triple product",
        &lhs,
        "theta over euler product",
        &rhs,
        max_d2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::build_named;

    fn t_poly(exps: &[u32]) -> CoeffPoly {
        let mut p = CoeffPoly::zero();
        for e in exps {
            p.add_assign(&CoeffPoly::t_pow(*e));
        }
        p
    }

    #[test]
    fn kernel_at_t_one_is_trivial() {
        for name in ["A2~2", "D3~2"] {
            let g = build_named(name).unwrap();
            let spec = kernel_truncation(&g, 2, 0);
            let mu = cherednik_kernel(&g, &spec, false).unwrap();
            assert!(mu.subst_ts(0, 0).is_one(), "{}", name);
        }
    }

    #[test]
    fn kernel_grade_zero_descent() {
        let g = build_named("A2~2").unwrap();
        let spec = kernel_truncation(&g, 3, 0);
        let mu = cherednik_kernel(&g, &spec, false).unwrap();
        // only the grade-zero long-root ray reaches these monomials
        let want = CoeffPoly::t_pow(1).sub(&CoeffPoly::one());
        assert_eq!(mu.coeff(&Monomial::new(vec![-4], 0)), want);
        assert_eq!(mu.coeff(&Monomial::new(vec![-2], 0)), CoeffPoly::zero());
        let want2 = CoeffPoly::t_pow(2).sub(&CoeffPoly::t_pow(1));
        assert_eq!(mu.coeff(&Monomial::new(vec![-8], 0)), want2);
    }

    #[test]
    fn imaginary_kernel_first_order() {
        let g = build_named("A2~2").unwrap();
        let spec = TruncationSpec::new(1, 6, 0);
        let im = imaginary_kernel(&g, &spec).unwrap();
        assert_eq!(im.q_coeff(1), CoeffPoly::t_pow(1).sub(&CoeffPoly::one()));
        assert!(im.substitute(0, 0).unwrap().is_one());
    }

    #[test]
    fn theta_constant_term_is_one() {
        for name in ["A2~2", "D3~2"] {
            let g = build_named(name).unwrap();
            let spec = kernel_truncation(&g, 3, 0);
            let th = theta_series(&g, &spec);
            assert!(th.ct().is_one(), "{}", name);
            assert!(constant_term_with_theta(&g, &Series::one(spec.clone()))
                .q_coeff(0)
                .is_one());
        }
    }

    #[test]
    fn theta_first_shells() {
        // rank 1, integer lattice: two vectors of norm 1
        let g = build_named("A2~2").unwrap();
        let spec = kernel_truncation(&g, 2, 0);
        let th = theta_series(&g, &spec);
        let shell1 = th.terms().filter(|(m, _)| m.d2 == 1).count();
        assert_eq!(shell1, 2);

        // rank 2, even-sum lattice: four vectors of norm 2, none of norm 1
        let g = build_named("A3~2").unwrap();
        let spec = kernel_truncation(&g, 2, 0);
        let th = theta_series(&g, &spec);
        assert_eq!(th.terms().filter(|(m, _)| m.d2 == 1).count(), 0);
        assert_eq!(th.terms().filter(|(m, _)| m.d2 == 2).count(), 4);
    }

    #[test]
    fn string_function_first_orders() {
        let g = build_named("A2~2").unwrap();
        let s = string_function_ct(&g, 2, false, 0).unwrap();
        assert!(s.q_coeff(0).is_one());
        assert_eq!(s.q_coeff(1), t_poly(&[3]));
        assert_eq!(s.q_coeff(2), t_poly(&[2, 6]));
    }

    #[test]
    fn string_function_d3_2_second_order() {
        let g = build_named("D3~2").unwrap();
        let s = string_function_ct(&g, 2, false, 0).unwrap();
        assert_eq!(s.q_coeff(2), t_poly(&[2, 4, 6]));
    }

    #[test]
    fn string_function_two_variable_first_order() {
        let g = build_named("A2~2").unwrap();
        let s = string_function_ct(&g, 1, true, 0).unwrap();
        let want = CoeffPoly::t_pow(1).mul(&CoeffPoly::s_pow(2));
        assert_eq!(s.q_coeff(1), want);
    }

    #[test]
    fn string_function_padding_stable() {
        let g = build_named("A2~2").unwrap();
        let a = string_function_ct(&g, 3, false, 0).unwrap();
        let b = string_function_ct(&g, 3, false, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn basic_character_level_one() {
        let g = build_named("A2~2").unwrap();
        let ch = basic_character_shifted(&g, 2).unwrap();
        assert!(ch.q_coeff(0).is_one());
        // weight eps_1 enters at q^{1/2} with multiplicity one
        assert_eq!(ch.coeff(&Monomial::new(vec![2], 1)), CoeffPoly::one());
        // string through the highest weight: partition-like growth
        assert_eq!(ch.q_coeff(1), CoeffPoly::one());
        assert_eq!(ch.q_coeff(2), CoeffPoly::constant(2));
    }

    #[test]
    fn jacobi_triple_product() {
        let report = jacobi_triple_product_check(20).unwrap();
        assert!(report.pass, "{:?}", report.first_discrepancy);
    }

    fn plain_spec(l: usize, max_d2: i64) -> TruncationSpec {
        // box wide enough that no genuine contribution is cut: ascent of at
        // most two doubled units per unit delta-grade, plus the theta shell
        TruncationSpec::new(l, max_d2, 2 * max_d2 + 6)
    }

    #[test]
    fn macdonald_reduces_to_kernel() {
        for (l, name) in [(1usize, "A2~2"), (2, "A4~2")] {
            let g = build_named(name).unwrap();
            let max_d2 = 6;
            let spec = plain_spec(l, max_d2);
            let mu = cherednik_kernel(&g, &spec, false).unwrap();
            for k5_2 in [4i64, 6] {
                let params = MacdonaldParams::specialized(k5_2, false);
                let delta = macdonald_kernel_cc(l, &params, &spec).unwrap();
                let lhs = mu.subst_ts(k5_2, 0);
                let report = compare("kernel at t=q^k", &lhs, "product kernel", &delta, max_d2);
                assert!(report.pass, "{} k5_2={}: {:?}", name, k5_2, report.first_discrepancy);
            }
        }
    }

    #[test]
    fn macdonald_limit_gives_theta_kernel() {
        for (l, name) in [(1usize, "A2~2"), (2, "A4~2")] {
            let g = build_named(name).unwrap();
            let max_d2 = 6;
            let spec = plain_spec(l, max_d2);
            let mu = cherednik_kernel(&g, &spec, false).unwrap();
            let theta = theta_series(&g, &spec);
            let q = Monomial::q_power(l, 2);
            let euler_inv = Series::poch_inv(spec.clone(), &q, &CoeffPoly::one(), &q).unwrap();
            for k5_2 in [4i64, 6] {
                let params = MacdonaldParams::specialized(k5_2, true);
                let delta = macdonald_kernel_cc(l, &params, &spec).unwrap();
                let mut rhs = mu.subst_ts(k5_2, 0).mul(&theta).unwrap();
                for _ in 0..l {
                    rhs = rhs.mul(&euler_inv).unwrap();
                }
                let report = compare(
                    "product kernel, fourth parameter removed",
                    &delta,
                    "kernel times theta over euler product",
                    &rhs,
                    max_d2,
                );
                assert!(report.pass, "{} k5_2={}: {:?}", name, k5_2, report.first_discrepancy);
            }
        }
    }
}
