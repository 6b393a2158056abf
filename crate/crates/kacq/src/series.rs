//! Exact truncated Laurent-series arithmetic.
//!
//! A [`Series`] is a finite sum of monomials `e^v * q^(d2/2)` where `v` is a
//! lattice vector stored in *doubled* coordinates (so half-integral weights
//! stay integral) and `d2` is the delta-grade in units of half a delta.
//! Coefficients are integer polynomials in `t` and `s` with arbitrary
//! precision ([`CoeffPoly`]).
//!
//! Invariants:
//! - no stored zero coefficient polynomials
//! - every stored monomial lies inside the [`TruncationSpec`] window
//! - all arithmetic is exact; truncation is the only loss

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation specs differ")]
    SpecMismatch,
    #[error("geometric series of the unit monomial diverges")]
    DivergentGeometric,
    #[error("pochhammer ratio must have positive delta-grade")]
    NonconvergentProduct,
    #[error("series has nonzero finite parts; not a pure q-series")]
    NotAQSeries,
}

/// Integer polynomial in `t` and `s`, sparse over (t-exponent, s-exponent).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoeffPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl CoeffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, BigInt::one())
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(0, 0, BigInt::from(c))
    }

    /// `c * t^te * s^se`
    pub fn monomial(te: u32, se: u32, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((te, se), c);
        }
        Self { terms }
    }

    pub fn t_pow(e: u32) -> Self {
        Self::monomial(e, 0, BigInt::one())
    }

    pub fn s_pow(e: u32) -> Self {
        Self::monomial(0, e, BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&(0, 0))
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, te: u32, se: u32) -> BigInt {
        self.terms.get(&(te, se)).cloned().unwrap_or_default()
    }

    pub fn add_assign(&mut self, other: &CoeffPoly) {
        for (k, v) in &other.terms {
            let e = self.terms.entry(*k).or_default();
            *e += v;
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    pub fn add(&self, other: &CoeffPoly) -> CoeffPoly {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn neg(&self) -> CoeffPoly {
        CoeffPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn sub(&self, other: &CoeffPoly) -> CoeffPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CoeffPoly) -> CoeffPoly {
        let mut terms: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for ((ta, sa), ca) in &self.terms {
            for ((tb, sb), cb) in &other.terms {
                let k = (ta + tb, sa + sb);
                let e = terms.entry(k).or_default();
                *e += ca * cb;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        CoeffPoly { terms }
    }

    /// Multiply by `c * t^te * s^se` in place.
    pub fn mul_monomial(&mut self, te: u32, se: u32, c: &BigInt) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        self.terms = self
            .terms
            .iter()
            .map(|((a, b), v)| ((a + te, b + se), v * c))
            .collect();
    }

    /// Evaluate at t = s = 1.
    pub fn eval_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonneg(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Exponents of `t` with multiplicity, provided the polynomial is a sum
    /// of distinct `t`-powers with coefficient 1 (the shape of a generalized
    /// exponent generating polynomial). Returns `None` otherwise.
    pub fn t_exponent_multiset(&self) -> Option<Vec<i64>> {
        let mut out = Vec::new();
        for ((te, se), c) in &self.terms {
            if *se != 0 || !c.is_one() {
                return None;
            }
            out.push(*te as i64);
        }
        Some(out)
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((te, se), c) in &self.terms {
            let mag = c.magnitude();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = *te == 0 && *se == 0;
            if !mag.is_one() || unit {
                write!(f, "{}", mag)?;
                if !unit {
                    write!(f, "*")?;
                }
            }
            match (te, se) {
                (0, 0) => {}
                (1, 0) => write!(f, "t")?,
                (e, 0) => write!(f, "t^{}", e)?,
                (0, 1) => write!(f, "s")?,
                (0, e) => write!(f, "s^{}", e)?,
                (a, b) => {
                    if *a == 1 {
                        write!(f, "t*")?;
                    } else {
                        write!(f, "t^{}*", a)?;
                    }
                    if *b == 1 {
                        write!(f, "s")?;
                    } else {
                        write!(f, "s^{}", b)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `e^finite * q^(d2/2)` with `finite` in doubled coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub finite: Vec<i64>,
    pub d2: i64,
}

impl Monomial {
    pub fn new(finite: Vec<i64>, d2: i64) -> Self {
        Self { finite, d2 }
    }

    /// Pure `q^(d2/2)` monomial of the given rank.
    pub fn q_power(rank: usize, d2: i64) -> Self {
        Self {
            finite: vec![0; rank],
            d2,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.d2 == 0 && self.finite.iter().all(|&c| c == 0)
    }

    pub fn has_zero_finite(&self) -> bool {
        self.finite.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            finite: self
                .finite
                .iter()
                .zip(&other.finite)
                .map(|(a, b)| a + b)
                .collect(),
            d2: self.d2 + other.d2,
        }
    }

    pub fn pow(&self, k: i64) -> Monomial {
        Monomial {
            finite: self.finite.iter().map(|c| c * k).collect(),
            d2: self.d2 * k,
        }
    }
}

// Canonical order: by delta-grade, then lexicographically on the finite part.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d2
            .cmp(&other.d2)
            .then_with(|| self.finite.cmp(&other.finite))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Optional budget-aware cone pruning: a monomial at delta-grade `d2` is
/// dropped when some functional `row . finite` falls below `-(base + slope *
/// (max_d2 - d2))`. Used by the kernel pipeline, with one row per simple-root
/// coordinate: descending in a coordinate is free (delta-grade-zero factors),
/// but climbing back costs delta-grade, so monomials too deep below the
/// constant-term axis can never contribute within the remaining budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HtPrune {
    pub rows: Vec<Vec<i64>>,
    /// per-row allowance at zero remaining budget (same scale as `rows`)
    pub base: Vec<i64>,
    /// per-row allowance per unit of remaining delta-grade
    pub slope: Vec<i64>,
}

impl HtPrune {
    fn keeps(&self, finite: &[i64], remaining_d2: i64) -> bool {
        let rem = remaining_d2.max(0);
        self.rows.iter().zip(&self.base).zip(&self.slope).all(
            |((row, b), s)| {
                let dot: i64 = row.iter().zip(finite).map(|(w, f)| w * f).sum();
                dot >= -(b + s * rem)
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub rank: usize,
    pub max_d2: i64,
    pub box_bound: i64,
    pub ht_prune: Option<HtPrune>,
}

impl TruncationSpec {
    pub fn new(rank: usize, max_d2: i64, box_bound: i64) -> Self {
        assert!(max_d2 >= 0 && box_bound >= 0);
        Self {
            rank,
            max_d2,
            box_bound,
            ht_prune: None,
        }
    }

    pub fn with_ht_prune(mut self, p: HtPrune) -> Self {
        self.ht_prune = Some(p);
        self
    }

    pub fn keeps(&self, m: &Monomial) -> bool {
        m.d2 <= self.max_d2
            && m.finite.iter().all(|c| c.abs() <= self.box_bound)
            && self
                .ht_prune
                .as_ref()
                .map(|p| p.keeps(&m.finite, self.max_d2 - m.d2))
                .unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub spec: TruncationSpec,
    terms: BTreeMap<Monomial, CoeffPoly>,
}

impl Series {
    pub fn zero(spec: TruncationSpec) -> Self {
        Self {
            spec,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: TruncationSpec) -> Self {
        let mut s = Self::zero(spec);
        s.insert(Monomial::q_power(s.spec.rank, 0), CoeffPoly::one());
        s
    }

    pub fn from_term(spec: TruncationSpec, m: Monomial, c: CoeffPoly) -> Self {
        let mut s = Self::zero(spec);
        s.insert(m, c);
        s
    }

    /// `1 - c e^m` as a series.
    pub fn one_minus(spec: TruncationSpec, m: Monomial, c: CoeffPoly) -> Self {
        let mut s = Self::one(spec);
        s.insert(m, c.neg());
        s
    }

    pub fn insert(&mut self, m: Monomial, c: CoeffPoly) {
        assert_eq!(m.finite.len(), self.spec.rank);
        if c.is_zero() || !self.spec.keeps(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CoeffPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> CoeffPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Coefficient of `q^k` (zero finite part, d2 = 2k).
    pub fn q_coeff(&self, k: i64) -> CoeffPoly {
        self.coeff(&Monomial::q_power(self.spec.rank, 2 * k))
    }

    /// Coefficient of `q^(d2/2)` at zero finite part, in half units.
    pub fn q_coeff_d2(&self, d2: i64) -> CoeffPoly {
        self.coeff(&Monomial::q_power(self.spec.rank, d2))
    }

    pub fn add(&self, other: &Series) -> Result<Series, SeriesError> {
        if self.spec != other.spec {
            return Err(SeriesError::SpecMismatch);
        }
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.insert(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn neg(&self) -> Series {
        Series {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Result<Series, SeriesError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Series) -> Result<Series, SeriesError> {
        if self.spec != other.spec {
            return Err(SeriesError::SpecMismatch);
        }
        let mut r = Series::zero(self.spec.clone());
        for (ma, ca) in &self.terms {
            // other.terms is ordered by d2 first, so we can stop once the
            // combined grade exceeds the window
            for (mb, cb) in &other.terms {
                if ma.d2 + mb.d2 > self.spec.max_d2 {
                    break;
                }
                let m = ma.mul(mb);
                if r.spec.keeps(&m) {
                    r.insert(m, ca.mul(cb));
                }
            }
        }
        Ok(r)
    }

    /// Geometric series `sum_{k>=0} c^k e^{km}` truncated to the window.
    ///
    /// Requires `m.d2 > 0`, or `m.d2 == 0` with a nonzero finite part (the
    /// box bound then terminates the expansion).
    pub fn inv_one_minus(
        spec: TruncationSpec,
        m: &Monomial,
        c: &CoeffPoly,
    ) -> Result<Series, SeriesError> {
        if m.is_unit() {
            return Err(SeriesError::DivergentGeometric);
        }
        if m.d2 < 0 {
            return Err(SeriesError::NonconvergentProduct);
        }
        let mut r = Series::zero(spec);
        let mut cur_m = Monomial::q_power(r.spec.rank, 0);
        let mut cur_c = CoeffPoly::one();
        loop {
            if cur_m.d2 > r.spec.max_d2
                || cur_m.finite.iter().any(|x| x.abs() > r.spec.box_bound)
            {
                break;
            }
            // monotone along the ray, so a ht-pruned power ends the loop too
            if !r.spec.keeps(&cur_m) {
                break;
            }
            r.insert(cur_m.clone(), cur_c.clone());
            cur_m = cur_m.mul(m);
            cur_c = cur_c.mul(c);
        }
        Ok(r)
    }

    /// Truncated `prod_{n>=0} (1 - a x^n)` where `a = c e^{am}`.
    pub fn poch(
        spec: TruncationSpec,
        am: &Monomial,
        c: &CoeffPoly,
        x: &Monomial,
    ) -> Result<Series, SeriesError> {
        if x.d2 <= 0 {
            return Err(SeriesError::NonconvergentProduct);
        }
        let mut r = Series::one(spec.clone());
        let mut f = am.clone();
        while f.d2 <= spec.max_d2 {
            r = r.mul(&Series::one_minus(spec.clone(), f.clone(), c.clone()))?;
            f = f.mul(x);
        }
        Ok(r)
    }

    /// Truncated `prod_{n>=0} (1 - a x^n)^{-1}`.
    pub fn poch_inv(
        spec: TruncationSpec,
        am: &Monomial,
        c: &CoeffPoly,
        x: &Monomial,
    ) -> Result<Series, SeriesError> {
        if x.d2 <= 0 {
            return Err(SeriesError::NonconvergentProduct);
        }
        let mut r = Series::one(spec.clone());
        let mut f = am.clone();
        while f.d2 <= spec.max_d2 {
            r = r.mul(&Series::inv_one_minus(spec.clone(), &f, c)?)?;
            f = f.mul(x);
        }
        Ok(r)
    }

    /// Sub-series of monomials with zero finite part.
    pub fn ct(&self) -> Series {
        Series {
            spec: self.spec.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.has_zero_finite())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitute `t -> q^(t_half/2)`, `s -> q^(s_half/2)` (exponents given in
    /// half-q units). Requires a pure q-series.
    pub fn substitute(&self, t_half: i64, s_half: i64) -> Result<Series, SeriesError> {
        if !self.terms.keys().all(|m| m.has_zero_finite()) {
            return Err(SeriesError::NotAQSeries);
        }
        Ok(self.subst_ts(t_half, s_half))
    }

    /// Internal variant of [`substitute`] that also re-grades monomials with
    /// nonzero finite parts (used when comparing kernels at `t = q^k`).
    pub fn subst_ts(&self, t_half: i64, s_half: i64) -> Series {
        assert!(t_half >= 0 && s_half >= 0);
        let mut r = Series::zero(self.spec.clone());
        for (m, c) in &self.terms {
            for ((te, se), v) in c.terms() {
                let d2 = m.d2 + (*te as i64) * t_half + (*se as i64) * s_half;
                r.insert(
                    Monomial::new(m.finite.clone(), d2),
                    CoeffPoly::monomial(0, 0, v.clone()),
                );
            }
        }
        r
    }

    /// Multiply every delta-grade by `factor`; monomials pushed past the
    /// window are silently truncated.
    pub fn rescale_q(&self, factor: i64) -> Result<Series, SeriesError> {
        assert!(factor > 0);
        if !self.terms.keys().all(|m| m.has_zero_finite()) {
            return Err(SeriesError::NotAQSeries);
        }
        let mut r = Series::zero(self.spec.clone());
        for (m, c) in &self.terms {
            r.insert(
                Monomial::new(m.finite.clone(), m.d2 * factor),
                c.clone(),
            );
        }
        Ok(r)
    }

    /// Re-insert every term under a new truncation window (same rank); terms
    /// outside the new window are dropped.
    pub fn reproject(&self, spec: TruncationSpec) -> Series {
        let mut r = Series::zero(spec);
        for (m, c) in &self.terms {
            r.insert(m.clone(), c.clone());
        }
        r
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Result<Series, SeriesError> {
        let mut r = Series::one(self.spec.clone());
        for _ in 0..k {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_unit() && c.is_one())
                .unwrap_or(false)
    }
}

// ---------------------------------------------------------------------------
// Canonical JSON form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermJson {
    finite: Vec<i64>,
    d2: i64,
    coeff: Vec<(u32, u32, String)>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    rank: usize,
    #[serde(rename = "maxD2")]
    max_d2: i64,
    #[serde(rename = "box")]
    box_bound: i64,
    terms: Vec<TermJson>,
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                finite: m.finite.clone(),
                d2: m.d2,
                coeff: c
                    .terms()
                    .map(|((te, se), v)| (*te, *se, v.to_string()))
                    .collect(),
            })
            .collect();
        SeriesJson {
            rank: self.spec.rank,
            max_d2: self.spec.max_d2,
            box_bound: self.spec.box_bound,
            terms,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = SeriesJson::deserialize(de)?;
        let mut s = Series::zero(TruncationSpec::new(j.rank, j.max_d2, j.box_bound));
        for t in j.terms {
            let mut c = CoeffPoly::zero();
            for (te, se, v) in t.coeff {
                let big: BigInt = v.parse().map_err(serde::de::Error::custom)?;
                c.add_assign(&CoeffPoly::monomial(te, se, big));
            }
            s.insert(Monomial::new(t.finite, t.d2), c);
        }
        Ok(s)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            if !m.has_zero_finite() {
                write!(f, "*e{:?}", m.finite)?;
            }
            if m.d2 != 0 {
                if m.d2 % 2 == 0 {
                    write!(f, "*q^{}", m.d2 / 2)?;
                } else {
                    write!(f, "*q^({}/2)", m.d2)?;
                }
            }
        }
        Ok(())
    }
}
