//! The rational function field F_q(j, alpha) in two variables, used to
//! verify the universal rank-2 cyclic-kernel identities symbolically.
//!
//! Fractions are kept unreduced (equality by cross-multiplication); the
//! expressions in play are tiny, so no bivariate gcd is needed.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Fq, FqElem};

/// A polynomial in F_q[j, alpha], exponent pairs (degree in j, degree in alpha).
#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    fq: Fq,
    terms: BTreeMap<(u32, u32), FqElem>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_display())
    }
}

impl BiPoly {
    pub fn zero(fq: Fq) -> Self {
        BiPoly {
            fq,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(fq: Fq, c: FqElem) -> Self {
        let mut terms = BTreeMap::new();
        if !fq.is_zero(&c) {
            terms.insert((0, 0), c);
        }
        BiPoly { fq, terms }
    }

    pub fn monomial(fq: Fq, c: FqElem, dj: u32, da: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !fq.is_zero(&c) {
            terms.insert((dj, da), c);
        }
        BiPoly { fq, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let entry = terms.entry(*k).or_insert_with(|| self.fq.zero());
            *entry = self.fq.add(entry, c);
            if self.fq.is_zero(entry) {
                terms.remove(k);
            }
        }
        BiPoly {
            fq: self.fq.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (*k, self.fq.neg(c)))
            .collect();
        BiPoly {
            fq: self.fq.clone(),
            terms,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<(u32, u32), FqElem> = BTreeMap::new();
        for ((j1, a1), c1) in &self.terms {
            for ((j2, a2), c2) in &other.terms {
                let key = (j1 + j2, a1 + a2);
                let prod = self.fq.mul(c1, c2);
                let entry = terms.entry(key).or_insert_with(|| self.fq.zero());
                *entry = self.fq.add(entry, &prod);
                if self.fq.is_zero(entry) {
                    terms.remove(&key);
                }
            }
        }
        BiPoly {
            fq: self.fq.clone(),
            terms,
        }
    }

    pub fn to_display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|((dj, da), c)| {
                let cs = self.fq.fmt_elem(c);
                let mut s = String::new();
                if cs != "1" || (*dj == 0 && *da == 0) {
                    s.push_str(&cs);
                }
                for (sym, d) in [("j", dj), ("al", da)] {
                    if *d > 0 {
                        if !s.is_empty() {
                            s.push('*');
                        }
                        s.push_str(sym);
                        if *d > 1 {
                            s.push_str(&format!("^{d}"));
                        }
                    }
                }
                s
            })
            .collect();
        parts.join("+")
    }
}

/// The field F_q(j, alpha) as unreduced fractions of [`BiPoly`].
#[derive(Clone)]
pub struct JAlphaField {
    fq: Fq,
}

#[derive(Clone)]
pub struct BiRat {
    pub num: BiPoly,
    pub den: BiPoly,
}

impl fmt::Debug for BiRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num.to_display(), self.den.to_display())
    }
}

impl PartialEq for BiRat {
    fn eq(&self, other: &Self) -> bool {
        // Cross multiplication; denominators are nonzero by construction.
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl fmt::Debug for JAlphaField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq(j,alpha) over {:?}", self.fq)
    }
}

impl JAlphaField {
    pub fn new(fq: Fq) -> Self {
        JAlphaField { fq }
    }

    pub fn from_poly(&self, p: BiPoly) -> BiRat {
        BiRat {
            num: p,
            den: BiPoly::constant(self.fq.clone(), self.fq.one()),
        }
    }

    /// The variable j.
    pub fn j(&self) -> BiRat {
        self.from_poly(BiPoly::monomial(self.fq.clone(), self.fq.one(), 1, 0))
    }

    /// The variable alpha.
    pub fn alpha(&self) -> BiRat {
        self.from_poly(BiPoly::monomial(self.fq.clone(), self.fq.one(), 0, 1))
    }
}

impl Field for JAlphaField {
    type Elem = BiRat;

    fn fq(&self) -> &Fq {
        &self.fq
    }

    fn zero(&self) -> BiRat {
        self.from_poly(BiPoly::zero(self.fq.clone()))
    }

    fn one(&self) -> BiRat {
        self.from_poly(BiPoly::constant(self.fq.clone(), self.fq.one()))
    }

    fn is_zero(&self, a: &BiRat) -> bool {
        a.num.is_zero()
    }

    fn add(&self, a: &BiRat, b: &BiRat) -> BiRat {
        BiRat {
            num: a.num.mul(&b.den).add(&b.num.mul(&a.den)),
            den: a.den.mul(&b.den),
        }
    }

    fn neg(&self, a: &BiRat) -> BiRat {
        BiRat {
            num: a.num.neg(),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &BiRat, b: &BiRat) -> BiRat {
        BiRat {
            num: a.num.mul(&b.num),
            den: a.den.mul(&b.den),
        }
    }

    fn inv(&self, a: &BiRat) -> Result<BiRat> {
        if a.num.is_zero() {
            return Err(Error::domain("inversion of zero in F_q(j, alpha)"));
        }
        Ok(BiRat {
            num: a.den.clone(),
            den: a.num.clone(),
        })
    }

    fn embed_fq(&self, c: &FqElem) -> BiRat {
        self.from_poly(BiPoly::constant(self.fq.clone(), *c))
    }

    fn fmt_elem(&self, a: &BiRat) -> String {
        format!("({})/({})", a.num.to_display(), a.den.to_display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_multiplication_equality() {
        let fq = Fq::prime(3).unwrap();
        let f = JAlphaField::new(fq);
        let j = f.j();
        let a = f.alpha();
        // j/al == (j*al)/(al^2)
        let lhs = f.mul(&j, &f.inv(&a).unwrap());
        let rhs = f.mul(
            &f.mul(&j, &a),
            &f.inv(&f.mul(&a, &a)).unwrap(),
        );
        assert_eq!(lhs, rhs);
        assert_ne!(lhs, j);
    }

    #[test]
    fn field_ops_sane() {
        let fq = Fq::prime(2).unwrap();
        let f = JAlphaField::new(fq);
        let j = f.j();
        let x = f.add(&j, &f.one());
        let y = f.mul(&x, &f.inv(&x).unwrap());
        assert_eq!(y, f.one());
    }
}
