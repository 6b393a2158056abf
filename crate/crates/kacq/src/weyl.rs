//! Affine Weyl group `W = W-finite x t_M` acting on level-graded weights.
//!
//! Weights are `(finite, level, d2)` with the finite part in doubled
//! coordinates and the delta-degree `d2` in half units, so every action stays
//! in integer arithmetic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebras::{AffineAlgebra, CatalogError, FiniteRootSystem, OrthogonalMap};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeylError {
    #[error("levels differ")]
    LevelMismatch,
    #[error("vector is not in the translation lattice M")]
    NotInLattice,
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineWeight {
    /// doubled coordinates
    pub finite2: Vec<i64>,
    pub level: i64,
    /// delta-degree in half units
    pub d2: i64,
}

impl AffineWeight {
    pub fn new(finite2: Vec<i64>, level: i64, d2: i64) -> Self {
        Self { finite2, level, d2 }
    }

    /// `Lambda_0` of the affine algebra.
    pub fn fundamental_zero(rank: usize) -> Self {
        Self::new(vec![0; rank], 1, 0)
    }

    /// `rho = (rho-finite, h-dual, 0)`; the delta-degree is a free
    /// convention and cancels in every defect.
    pub fn rho(g: &AffineAlgebra) -> Self {
        Self::new(g.finite.rho2.clone(), g.dual_coxeter, 0)
    }

    pub fn add(&self, other: &AffineWeight) -> AffineWeight {
        AffineWeight::new(
            self.finite2
                .iter()
                .zip(&other.finite2)
                .map(|(a, b)| a + b)
                .collect(),
            self.level + other.level,
            self.d2 + other.d2,
        )
    }

    pub fn sub(&self, other: &AffineWeight) -> AffineWeight {
        AffineWeight::new(
            self.finite2
                .iter()
                .zip(&other.finite2)
                .map(|(a, b)| a - b)
                .collect(),
            self.level - other.level,
            self.d2 - other.d2,
        )
    }

    /// `4 <self, other>` under the affine pairing
    /// `<(v,k,d),(v',k',d')> = <v,v'> + k d' + k' d` (d the delta-degree).
    pub fn pairing4(&self, f: &FiniteRootSystem, other: &AffineWeight) -> i64 {
        f.ip4(&self.finite2, &other.finite2) + 2 * self.level * other.d2
            + 2 * other.level * self.d2
    }
}

/// `w = t_gamma . w-finite`, sign carried by the finite part (translations
/// are even).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    pub finite_part: OrthogonalMap,
    /// translation component, doubled coordinates, in M
    pub gamma2: Vec<i64>,
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        Self {
            finite_part: OrthogonalMap::identity(rank),
            gamma2: vec![0; rank],
        }
    }

    pub fn sign(&self) -> i64 {
        self.finite_part.sign
    }

    pub fn apply(&self, f: &FiniteRootSystem, w: &AffineWeight) -> AffineWeight {
        let rotated = AffineWeight::new(self.finite_part.apply(&w.finite2), w.level, w.d2);
        translate_unchecked(f, &self.gamma2, &rotated)
    }
}

fn translate_unchecked(f: &FiniteRootSystem, gamma2: &[i64], w: &AffineWeight) -> AffineWeight {
    let finite2: Vec<i64> = w
        .finite2
        .iter()
        .zip(gamma2)
        .map(|(v, g)| v + w.level * g)
        .collect();
    // d2 drops by 2<v,gamma> + k<gamma,gamma>
    let num = 2 * f.ip4(&w.finite2, gamma2) + w.level * f.ip4(gamma2, gamma2);
    assert!(num % 4 == 0, "translation left the half-integral grading");
    AffineWeight::new(finite2, w.level, w.d2 - num / 4)
}

/// `t_gamma(v, k, d) = (v + k gamma, k, d - <v,gamma> - k <gamma,gamma>/2)`.
pub fn translate(
    g: &AffineAlgebra,
    gamma2: &[i64],
    w: &AffineWeight,
) -> Result<AffineWeight, WeylError> {
    if !g.lattice_contains(gamma2) {
        return Err(WeylError::NotInLattice);
    }
    Ok(translate_unchecked(&g.finite, gamma2, w))
}

/// Reflection in a positive real root `(f2, d2)` of norm `n2`.
pub fn affine_reflection(
    f: &FiniteRootSystem,
    root_f2: &[i64],
    root_d2: i64,
    w: &AffineWeight,
) -> AffineWeight {
    let n4 = f.ip4(root_f2, root_f2);
    // <w, alpha> in quarter units: <v,f> + k * d/2
    let pair4 = f.ip4(&w.finite2, root_f2) + 2 * w.level * root_d2;
    // c = 2 <w,alpha>/<alpha,alpha>
    assert!((2 * pair4) % n4 == 0, "non-integral reflection coefficient");
    let c = 2 * pair4 / n4;
    AffineWeight::new(
        w.finite2
            .iter()
            .zip(root_f2)
            .map(|(v, r)| v - c * r)
            .collect(),
        w.level,
        w.d2 - c * root_d2,
    )
}

/// All `w` in the affine Weyl group for which `w(lam_rho) - mu_rho` lies in
/// the nonnegative span of the simple roots (the support of the partition
/// function), returned as `(sign, image)` pairs.
///
/// Completeness: iterate the full finite Weyl group against lattice balls of
/// doubling radius until the result stabilizes; translations move the
/// delta-degree down quadratically, so only finitely many contribute.
pub fn enumerate_contributing(
    g: &AffineAlgebra,
    lam_rho: &AffineWeight,
    mu_rho: &AffineWeight,
) -> Result<Vec<(i64, AffineWeight)>, WeylError> {
    if lam_rho.level != mu_rho.level {
        return Err(WeylError::LevelMismatch);
    }
    let group = g.finite.weyl_group()?;
    let rotated: Vec<(i64, AffineWeight)> = group
        .iter()
        .map(|w| {
            (
                w.sign,
                AffineWeight::new(w.apply(&lam_rho.finite2), lam_rho.level, lam_rho.d2),
            )
        })
        .collect();

    let admissible = |img: &AffineWeight| -> Option<AffineWeight> {
        let beta = img.sub(mu_rho);
        let coords = g.affine_coords(&beta.finite2, beta.d2)?;
        if coords.iter().all(|&c| c >= 0) {
            Some(img.clone())
        } else {
            None
        }
    };

    let collect = |radius: i64| -> Vec<(i64, AffineWeight)> {
        let mut out = Vec::new();
        for gamma2 in g.lattice_ball(radius) {
            for (sign, base) in &rotated {
                let img = translate_unchecked(&g.finite, &gamma2, base);
                if admissible(&img).is_some() {
                    out.push((*sign, img));
                }
            }
        }
        out
    };

    let fingerprint = |v: &Vec<(i64, AffineWeight)>| -> BTreeSet<(i64, Vec<i64>, i64)> {
        v.iter()
            .map(|(s, w)| (*s, w.finite2.clone(), w.d2))
            .collect()
    };

    let mut radius = (lam_rho.d2 - mu_rho.d2).abs().max(2);
    let mut cur = collect(radius);
    loop {
        radius *= 2;
        let next = collect(radius);
        if fingerprint(&next) == fingerprint(&cur) {
            return Ok(cur);
        }
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::build_named;

    #[test]
    fn translate_identity() {
        let g = build_named("A2~2").unwrap();
        let w = AffineWeight::new(vec![2], 1, 0);
        assert_eq!(translate(&g, &[0], &w).unwrap(), w);
    }

    #[test]
    fn translate_basic_weight() {
        // t_{eps_1}(Lambda_0) = (eps_1, 1, -1/2)
        let g = build_named("A2~2").unwrap();
        let lam0 = AffineWeight::fundamental_zero(1);
        let t = translate(&g, &[2], &lam0).unwrap();
        assert_eq!(t, AffineWeight::new(vec![2], 1, -1));
    }

    #[test]
    fn translate_rejects_non_lattice() {
        let g = build_named("A3~2").unwrap(); // M = D_2 parity lattice
        let lam0 = AffineWeight::fundamental_zero(2);
        assert_eq!(
            translate(&g, &[2, 0], &lam0),
            Err(WeylError::NotInLattice)
        );
        assert!(translate(&g, &[2, 2], &lam0).is_ok());
    }

    #[test]
    fn pairing_symmetric_and_preserved() {
        let g = build_named("D3~2").unwrap();
        let a = AffineWeight::new(vec![2, 0], 1, 3);
        let b = AffineWeight::new(vec![2, 2], 2, -1);
        assert_eq!(a.pairing4(&g.finite, &b), b.pairing4(&g.finite, &a));
        for gamma in g.lattice_ball(4) {
            let ta = translate(&g, &gamma, &a).unwrap();
            let tb = translate(&g, &gamma, &b).unwrap();
            assert_eq!(
                ta.pairing4(&g.finite, &tb),
                a.pairing4(&g.finite, &b),
                "pairing not preserved by t_{:?}",
                gamma
            );
        }
    }

    #[test]
    fn zero_node_reflection() {
        // <rho, alpha_0-check> = 1, so s_0(rho) = rho - alpha_0 (defect d2=1);
        // adding Lambda_0 contributes one more alpha_0
        let g = build_named("A2~2").unwrap();
        let (f0, d0) = (g.alpha0.0.clone(), g.alpha0.1);
        let rho = AffineWeight::rho(&g);
        let img = affine_reflection(&g.finite, &f0, d0, &rho);
        let defect = rho.sub(&img);
        assert_eq!(defect, AffineWeight::new(f0.clone(), 0, d0));
        assert_eq!(defect.d2, 1);

        let lam_rho = AffineWeight::fundamental_zero(1).add(&rho);
        let img = affine_reflection(&g.finite, &f0, d0, &lam_rho);
        let defect = lam_rho.sub(&img);
        assert_eq!(
            defect,
            AffineWeight::new(f0.iter().map(|c| 2 * c).collect(), 0, 2 * d0)
        );
    }

    #[test]
    fn simple_reflection_fixes_orthogonal_weight() {
        let g = build_named("D3~2").unwrap();
        // first simple root eps_1 - eps_2; weight eps_1 + eps_2 is orthogonal
        let w = AffineWeight::new(vec![2, 2], 1, 0);
        let img = affine_reflection(&g.finite, &g.finite.simple[0].clone(), 0, &w);
        assert_eq!(img, w);
    }

    #[test]
    fn contributing_at_defect_zero_is_identity() {
        let g = build_named("A2~2").unwrap();
        let lam_rho = AffineWeight::fundamental_zero(1).add(&AffineWeight::rho(&g));
        let out = enumerate_contributing(&g, &lam_rho, &lam_rho).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], (1, lam_rho));
    }

    #[test]
    fn contributing_includes_zero_node_reflection() {
        let g = build_named("A2~2").unwrap();
        let lam_rho = AffineWeight::fundamental_zero(1).add(&AffineWeight::rho(&g));
        // mu = Lambda_0 - delta
        let mu_rho = AffineWeight::new(lam_rho.finite2.clone(), lam_rho.level, lam_rho.d2 - 2);
        let out = enumerate_contributing(&g, &lam_rho, &mu_rho).unwrap();
        let s0_img = affine_reflection(&g.finite, &g.alpha0.0.clone(), g.alpha0.1, &lam_rho);
        assert!(out.iter().any(|(s, w)| *s == -1 && *w == s0_img));
        assert!(out.iter().any(|(s, w)| *s == 1 && *w == lam_rho));
    }

    #[test]
    fn defect_invariant_under_rho_d2_shift() {
        // the image defect w(lam+rho)-(mu+rho) is unchanged when rho's d2
        // convention shifts, since W fixes delta
        let g = build_named("D3~2").unwrap();
        let base = AffineWeight::fundamental_zero(2).add(&AffineWeight::rho(&g));
        let shifted = AffineWeight::new(base.finite2.clone(), base.level, base.d2 + 7);
        for gamma in g.lattice_ball(2) {
            let w = WeylElement {
                finite_part: g.finite.simple_reflections()[0].clone(),
                gamma2: gamma.clone(),
            };
            let d1 = w.apply(&g.finite, &base).sub(&base);
            let d2 = w.apply(&g.finite, &shifted).sub(&shifted);
            assert_eq!(d1, d2);
        }
    }
}
