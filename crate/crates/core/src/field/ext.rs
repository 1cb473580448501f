//! Extension fields B[w]/(m(w)) over any base field context B.
//!
//! With B = F_q and m a monic irreducible of A = F_q[T] this is the residue
//! field A/p (the class of the variable is t = gamma(T)); towers
//! `ExtField<ExtField<Fq>>` provide the splitting extensions used by torsion
//! computations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Field, FiniteField, Fq, FqElem, Poly};

#[derive(Clone)]
pub struct ExtField<B: Field> {
    base: B,
    modulus: Arc<Poly<B>>,
    deg: usize,
}

impl<B: Field> fmt::Debug for ExtField<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ext({:?})[w]/({})",
            self.base,
            self.modulus.to_string_with_var("w")
        )
    }
}

impl<B: Field> PartialEq for ExtField<B> {
    fn eq(&self, other: &Self) -> bool {
        *self.modulus == *other.modulus
    }
}

impl<B: Field> ExtField<B> {
    /// Quotient by a monic modulus of degree >= 1; irreducibility is the
    /// caller's responsibility here (checked constructors below).
    pub fn new_unchecked(modulus: Poly<B>) -> Result<ExtField<B>> {
        if !modulus.is_monic() {
            return Err(Error::domain("extension modulus must be monic"));
        }
        let deg = modulus.deg().finite().unwrap() as usize;
        if deg < 1 {
            return Err(Error::domain("extension modulus must have degree >= 1"));
        }
        Ok(ExtField {
            base: modulus.field().clone(),
            modulus: Arc::new(modulus),
            deg,
        })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn modulus(&self) -> &Poly<B> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    /// The class of the adjoined variable.
    pub fn gen(&self) -> Vec<B::Elem> {
        let mut v = vec![self.base.zero(); self.deg];
        if self.deg == 1 {
            // w = -m_0 in the degree-one case.
            v[0] = self.base.neg(&self.modulus.coeff(0));
        } else {
            v[1] = self.base.one();
        }
        v
    }

    /// Constant embedding of the base field.
    pub fn embed_base(&self, c: &B::Elem) -> Vec<B::Elem> {
        let mut v = vec![self.base.zero(); self.deg];
        v[0] = c.clone();
        v
    }

    pub fn from_base_poly(&self, p: &Poly<B>) -> Vec<B::Elem> {
        let r = p.rem(&self.modulus).expect("modulus nonzero");
        let mut v = vec![self.base.zero(); self.deg];
        for (i, c) in r.coeffs().iter().enumerate() {
            v[i] = c.clone();
        }
        v
    }

    fn to_poly(&self, a: &[B::Elem]) -> Poly<B> {
        Poly::from_coeffs(self.base.clone(), a.to_vec())
    }
}

impl ExtField<Fq> {
    /// The residue field A/p for a monic irreducible p of positive degree.
    pub fn residue_field(p: &Poly<Fq>) -> Result<ExtField<Fq>> {
        if !p.is_monic() || !p.is_irreducible() {
            return Err(Error::domain(format!(
                "modulus {} is not monic irreducible",
                p.to_string_with_var("T")
            )));
        }
        ExtField::new_unchecked(p.clone())
    }
}

impl<B: FiniteField> ExtField<B> {
    /// Degree-m extension of a finite field, via the graded-lex smallest
    /// monic irreducible of degree m (deterministic).
    pub fn extension_of(base: B, m: usize) -> Result<ExtField<B>> {
        if m < 1 {
            return Err(Error::domain("extension degree must be >= 1"));
        }
        let order = base.order_u128();
        let count = order
            .checked_pow(m as u32)
            .ok_or_else(|| Error::domain("extension too large"))?;
        for idx in 0..count {
            let mut coeffs: Vec<B::Elem> = Vec::with_capacity(m + 1);
            let mut n = idx;
            for _ in 0..m {
                coeffs.push(base.elem_from_index(n % order));
                n /= order;
            }
            coeffs.push(base.one());
            let f = Poly::from_coeffs(base.clone(), coeffs);
            if f.is_irreducible() {
                return ExtField::new_unchecked(f);
            }
        }
        unreachable!("irreducible polynomials of every degree exist")
    }
}

impl<B: Field> Field for ExtField<B> {
    type Elem = Vec<B::Elem>;

    fn fq(&self) -> &Fq {
        self.base.fq()
    }

    fn zero(&self) -> Vec<B::Elem> {
        vec![self.base.zero(); self.deg]
    }

    fn one(&self) -> Vec<B::Elem> {
        self.embed_base(&self.base.one())
    }

    fn is_zero(&self, a: &Vec<B::Elem>) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }

    fn add(&self, a: &Vec<B::Elem>, b: &Vec<B::Elem>) -> Vec<B::Elem> {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| self.base.add(x, y))
            .collect()
    }

    fn neg(&self, a: &Vec<B::Elem>) -> Vec<B::Elem> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Vec<B::Elem>, b: &Vec<B::Elem>) -> Vec<B::Elem> {
        let pa = self.to_poly(a);
        let pb = self.to_poly(b);
        self.from_base_poly(&pa.mul(&pb))
    }

    fn inv(&self, a: &Vec<B::Elem>) -> Result<Vec<B::Elem>> {
        if self.is_zero(a) {
            return Err(Error::domain("inversion of zero in extension field"));
        }
        let pa = self.to_poly(a);
        let (g, s, _) = pa.xgcd(&self.modulus);
        if !g.is_one() {
            return Err(Error::domain(
                "element not invertible (modulus not irreducible?)",
            ));
        }
        Ok(self.from_base_poly(&s))
    }

    fn embed_fq(&self, c: &FqElem) -> Vec<B::Elem> {
        self.embed_base(&self.base.embed_fq(c))
    }

    fn fmt_elem(&self, a: &Vec<B::Elem>) -> String {
        self.to_poly(a).to_string_with_var("w")
    }
}

impl<B: FiniteField> FiniteField for ExtField<B> {
    fn qdim(&self) -> usize {
        self.base.qdim() * self.deg
    }

    fn to_fq_coords(&self, a: &Vec<B::Elem>) -> Vec<FqElem> {
        let mut out = Vec::with_capacity(self.qdim());
        for c in a {
            out.extend(self.base.to_fq_coords(c));
        }
        out
    }

    fn from_fq_coords(&self, coords: &[FqElem]) -> Vec<B::Elem> {
        let bd = self.base.qdim();
        (0..self.deg)
            .map(|i| {
                let lo = i * bd;
                self.base.from_fq_coords(&coords[lo..lo + bd])
            })
            .collect()
    }
}

impl FiniteField for Fq {
    fn qdim(&self) -> usize {
        1
    }

    fn to_fq_coords(&self, a: &FqElem) -> Vec<FqElem> {
        vec![a.clone()]
    }

    fn from_fq_coords(&self, coords: &[FqElem]) -> FqElem {
        coords[0].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_poly;

    #[test]
    fn residue_field_f8() {
        let f2 = Fq::prime(2).unwrap();
        let p = parse_poly(&f2, "T^3+T+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        assert_eq!(k.order_u128(), 8);
        let t = k.gen();
        // t^3 = t + 1 in A/(T^3+T+1).
        let t3 = k.pow(&t, 3);
        let expect = k.add(&t, &k.one());
        assert_eq!(t3, expect);
        // Every nonzero residue is invertible.
        for i in 1..8u128 {
            let a = k.elem_from_index(i);
            let b = k.inv(&a).unwrap();
            assert_eq!(k.mul(&a, &b), k.one());
        }
    }

    #[test]
    fn tower_dimensions() {
        let f3 = Fq::prime(3).unwrap();
        let p = parse_poly(&f3, "T^2+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        let k2 = ExtField::extension_of(k, 3).unwrap();
        assert_eq!(k2.qdim(), 6);
        assert_eq!(k2.order_u128(), 3u128.pow(6));
        // Coordinates roundtrip.
        let a = k2.elem_from_index(500);
        let coords = k2.to_fq_coords(&a);
        assert_eq!(k2.from_fq_coords(&coords), a);
    }

    #[test]
    fn frobenius_fixed_field_of_tower() {
        // x in Ext is fixed by x -> x^(q^d) iff x is in the base copy.
        let f2 = Fq::prime(2).unwrap();
        let p = parse_poly(&f2, "T^2+T+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        let k2 = ExtField::extension_of(k.clone(), 2).unwrap();
        let mut fixed = 0;
        for i in 0..k2.order_u128() {
            let a = k2.elem_from_index(i);
            if k2.pow(&a, 4) == a {
                fixed += 1;
            }
        }
        assert_eq!(fixed, 4);
    }
}
