//! The residue ring A/n for an arbitrary monic modulus n (not necessarily
//! prime).  For prime moduli prefer [`ExtField::residue_field`], which gives
//! a field context.

use crate::error::{Error, Result};

use super::{Fq, Poly};

#[derive(Clone, Debug)]
pub struct ResidueRing {
    modulus: Poly<Fq>,
}

/// A reduced representative (degree < deg n).
pub type ResidueElem = Poly<Fq>;

impl ResidueRing {
    pub fn new(modulus: Poly<Fq>) -> Result<ResidueRing> {
        match modulus.deg().finite() {
            Some(d) if d >= 1 && modulus.is_monic() => Ok(ResidueRing { modulus }),
            _ => Err(Error::domain("residue modulus must be monic of degree >= 1")),
        }
    }

    pub fn modulus(&self) -> &Poly<Fq> {
        &self.modulus
    }

    pub fn fq(&self) -> &Fq {
        self.modulus.field()
    }

    pub fn size(&self) -> u128 {
        self.modulus.abs_norm()
    }

    /// Order of the unit group when the modulus is prime: q^deg - 1.
    pub fn unit_group_order(&self) -> Result<u128> {
        if !self.modulus.is_irreducible() {
            return Err(Error::domain("unit group order formula requires a prime modulus"));
        }
        Ok(self.size() - 1)
    }

    pub fn reduce(&self, a: &Poly<Fq>) -> ResidueElem {
        a.rem(&self.modulus).expect("modulus nonzero")
    }

    pub fn add(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        self.reduce(&a.add(b))
    }

    pub fn mul(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        self.reduce(&a.mul(b))
    }

    pub fn neg(&self, a: &ResidueElem) -> ResidueElem {
        a.neg()
    }

    pub fn inv(&self, a: &ResidueElem) -> Result<ResidueElem> {
        let (g, s, _) = a.xgcd(&self.modulus);
        if !g.is_one() {
            return Err(Error::domain(format!(
                "{} is not invertible mod {} (gcd {})",
                a.to_string_with_var("T"),
                self.modulus.to_string_with_var("T"),
                g.to_string_with_var("T")
            )));
        }
        Ok(self.reduce(&s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_poly;

    #[test]
    fn prime_modulus_all_units() {
        let f2 = Fq::prime(2).unwrap();
        let p = parse_poly(&f2, "T^3+T+1").unwrap();
        let r = ResidueRing::new(p).unwrap();
        assert_eq!(r.unit_group_order().unwrap(), 7);
        for i in 1..8u128 {
            let elem = index_elem(&r, i);
            let inv = r.inv(&elem).unwrap();
            assert!(r.mul(&elem, &inv).is_one());
        }
    }

    #[test]
    fn composite_modulus_has_zero_divisors() {
        let f2 = Fq::prime(2).unwrap();
        let n = parse_poly(&f2, "T^2+T").unwrap(); // T(T+1)
        let r = ResidueRing::new(n).unwrap();
        let t = parse_poly(&f2, "T").unwrap();
        assert!(r.inv(&t).is_err());
        assert!(r.unit_group_order().is_err());
    }

    fn index_elem(r: &ResidueRing, mut i: u128) -> ResidueElem {
        let fq = r.fq().clone();
        let q = fq.order() as u128;
        let d = r.modulus().deg().finite().unwrap() as usize;
        let mut coeffs = Vec::new();
        for _ in 0..d {
            coeffs.push(fq.elem_from_index((i % q) as u64));
            i /= q;
        }
        Poly::from_coeffs(fq, coeffs)
    }
}
