//! Exact computation of Lusztig t-analogs of weight multiplicities
//! (Kostka-Foulkes polynomials) and t-string functions for twisted affine
//! Kac-Moody algebras, by three independent routes:
//!
//! - route A: the alternating Weyl-group sum over a t-deformed Kostant
//!   partition table ([`kostka`]),
//! - route B: the constant term of the Cherednik kernel against a lattice
//!   theta function ([`kernels`]),
//! - route C: closed-form infinite products built from generalized exponents
//!   ([`identities`]).
//!
//! All arithmetic is exact: integer polynomials in `t` (and `s`) over
//! arbitrary-precision integers, truncated multivariate Laurent series in
//! [`series`].

pub mod algebras;
pub mod identities;
pub mod kernels;
pub mod kostka;
pub mod series;
pub mod weyl;
