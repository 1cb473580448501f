//! Exact arithmetic contexts: prime and extension fields F_q, the polynomial
//! ring A = F_q[T], its fraction field F = F_q(T), residue rings A/n, and the
//! completion F_oo = F_q((1/T)) with explicit precision windows.
//!
//! Fields are runtime-parametrized (q is an input, not a const generic), so
//! arithmetic goes through a context object implementing [`Field`] rather
//! than through `std::ops` on bare elements.  Everything downstream
//! (skew polynomials, Drinfeld modules, cochains) is generic over this trait,
//! with concrete aliases at the crate root.

mod ext;
mod fq;
mod laurent;
mod poly;
mod rational;
mod residue;
pub mod text;

pub use ext::ExtField;
pub use fq::{Fq, FqElem};
pub use laurent::{LaurentField, LaurentSeries};
pub use poly::{enumerate_monic_irreducibles, irreducible_count, Deg, Poly};
pub use rational::{RationalField, RationalFunc};
pub use residue::{ResidueElem, ResidueRing};

use crate::error::Result;

/// A field that is an F_q-algebra, presented as a context object.
///
/// `Elem` values do not carry their context; all arithmetic is mediated by
/// the field handle.  Mixing elements of different contexts is a logic error
/// (checked in debug builds where cheap).
pub trait Field: Clone + std::fmt::Debug {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    /// The base F_q context this field is an algebra over.
    fn fq(&self) -> &Fq;

    fn q(&self) -> u64 {
        self.fq().order()
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; domain error on zero.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    /// The structural embedding F_q -> this field.
    fn embed_fq(&self, c: &FqElem) -> Self::Elem;

    /// Short human-readable form of an element.
    fn fmt_elem(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::Elem, mut n: u128) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// x -> x^q, the q-power Frobenius of the F_q-algebra structure.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.q() as u128)
    }
}

/// A [`Field`] of finite dimension over its base F_q, with explicit
/// coordinates.  This is what the kernel linear algebra for F_q-linear
/// polynomials needs.
pub trait FiniteField: Field {
    /// Dimension over F_q.
    fn qdim(&self) -> usize;

    /// Number of elements (q^qdim); desk-scale fields only.
    fn order_u128(&self) -> u128 {
        let mut n: u128 = 1;
        for _ in 0..self.qdim() {
            n = n.checked_mul(self.q() as u128).expect("field too large");
        }
        n
    }

    fn to_fq_coords(&self, a: &Self::Elem) -> Vec<FqElem>;
    fn from_fq_coords(&self, coords: &[FqElem]) -> Self::Elem;

    /// Deterministic enumeration: index in [0, order) -> element.
    fn elem_from_index(&self, mut idx: u128) -> Self::Elem {
        let q = self.q() as u128;
        let coords: Vec<FqElem> = (0..self.qdim())
            .map(|_| {
                let d = (idx % q) as u64;
                idx /= q;
                self.fq().elem_from_index(d)
            })
            .collect();
        self.from_fq_coords(&coords)
    }
}
