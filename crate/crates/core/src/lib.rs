//! Exact arithmetic for the modular side of Drinfeld module theory over
//! A = F_q[T]: skew (F_q-linear) polynomials, Drinfeld modules and their
//! torsion, truncated Carlitz analytic series over F_oo, the Bruhat-Tits
//! tree of PGL_2(F_oo) with Gamma_0(n) quotients, harmonic cochains with
//! Hecke operators and Fourier coefficients, and cuspidal/Eisenstein-ideal
//! invariants.
//!
//! All arithmetic is exact (finite fields, F_q(T), big rationals) except in
//! F_oo, where every series carries an explicit precision window and
//! comparisons are restricted to certified coefficients.

pub mod analytic;
pub mod drinfeld;
pub mod eisenstein;
pub mod error;
pub mod field;
pub mod harmonic;
pub mod linalg;
pub mod skew;
pub mod tree;

pub use error::{Error, Result};

/// The polynomial ring A = F_q[T].
pub type PolyA = field::Poly<field::Fq>;

/// The residue field A/p of a prime p, with t the class of T.
pub type ResidueField = field::ExtField<field::Fq>;

/// A one-step extension of a residue field (splitting fields for torsion).
pub type ResidueExt = field::ExtField<ResidueField>;

/// Skew polynomials over the fraction field F = F_q(T).
pub type SkewOverF = skew::SkewPoly<field::RationalField>;

/// Skew polynomials over a residue field A/p.
pub type SkewOverresidue = skew::SkewPoly<ResidueField>;
