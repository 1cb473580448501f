//! The fraction field F = F_q(T), reduced with monic denominators.

use std::fmt;

use crate::error::{Error, Result};

use super::{Deg, Field, Fq, FqElem, Poly};

/// An element of F = F_q(T): gcd(num, den) = 1 and den monic.
#[derive(Clone, PartialEq)]
pub struct RationalFunc {
    num: Poly<Fq>,
    den: Poly<Fq>,
}

impl fmt::Debug for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_display())
    }
}

impl RationalFunc {
    pub fn new(num: Poly<Fq>, den: Poly<Fq>) -> Result<RationalFunc> {
        if den.is_zero() {
            return Err(Error::domain("rational function with zero denominator"));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.divmod(&g)?.0, den.divmod(&g)?.0)
        };
        // Normalize: monic denominator.
        let lc = den.leading().unwrap().clone();
        let fq = num.field().clone();
        let c = fq.inv(&lc)?;
        Ok(RationalFunc {
            num: num.scale(&c),
            den: den.scale(&c),
        })
    }

    pub fn from_poly(num: Poly<Fq>) -> Result<RationalFunc> {
        let one = Poly::one(num.field().clone());
        RationalFunc::new(num, one)
    }

    pub fn num(&self) -> &Poly<Fq> {
        &self.num
    }
    pub fn den(&self) -> &Poly<Fq> {
        &self.den
    }

    pub fn fq(&self) -> &Fq {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// deg(a/b) = deg a - deg b.
    pub fn deg(&self) -> Deg {
        match self.num.deg() {
            Deg::NegInf => Deg::NegInf,
            Deg::Fin(dn) => Deg::Fin(dn - self.den.deg().finite().unwrap()),
        }
    }

    /// ord_p, the p-adic valuation at a prime of A.
    pub fn ord_at(&self, p: &Poly<Fq>) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::domain("ord of zero"));
        }
        Ok(self.num.ord_at(p)? - self.den.ord_at(p)?)
    }
}

/// Field context for F = F_q(T).
#[derive(Clone, PartialEq)]
pub struct RationalField {
    fq: Fq,
}

impl fmt::Debug for RationalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FracField({:?})", self.fq)
    }
}

impl RationalField {
    pub fn new(fq: Fq) -> Self {
        RationalField { fq }
    }

    pub fn from_poly(&self, p: Poly<Fq>) -> RationalFunc {
        RationalFunc::from_poly(p).expect("denominator one")
    }

    /// The element T.
    pub fn t(&self) -> RationalFunc {
        self.from_poly(Poly::var(self.fq.clone()))
    }
}

impl RationalFunc {
    pub fn to_display(&self) -> String {
        if self.is_poly() {
            self.num.to_string_with_var("T")
        } else {
            format!(
                "({})/({})",
                self.num.to_string_with_var("T"),
                self.den.to_string_with_var("T")
            )
        }
    }
}

impl Field for RationalField {
    type Elem = RationalFunc;

    fn fq(&self) -> &Fq {
        &self.fq
    }

    fn zero(&self) -> RationalFunc {
        self.from_poly(Poly::zero(self.fq.clone()))
    }

    fn one(&self) -> RationalFunc {
        self.from_poly(Poly::one(self.fq.clone()))
    }

    fn is_zero(&self, a: &RationalFunc) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &RationalFunc, b: &RationalFunc) -> RationalFunc {
        let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
        let den = a.den.mul(&b.den);
        RationalFunc::new(num, den).expect("den nonzero")
    }

    fn neg(&self, a: &RationalFunc) -> RationalFunc {
        RationalFunc {
            num: a.num.neg(),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &RationalFunc, b: &RationalFunc) -> RationalFunc {
        let num = a.num.mul(&b.num);
        let den = a.den.mul(&b.den);
        RationalFunc::new(num, den).expect("den nonzero")
    }

    fn inv(&self, a: &RationalFunc) -> Result<RationalFunc> {
        if a.is_zero() {
            return Err(Error::domain("inversion of zero in F_q(T)"));
        }
        RationalFunc::new(a.den.clone(), a.num.clone())
    }

    fn embed_fq(&self, c: &FqElem) -> RationalFunc {
        self.from_poly(Poly::constant(self.fq.clone(), c.clone()))
    }

    fn fmt_elem(&self, a: &RationalFunc) -> String {
        a.to_display()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::{parse_poly, parse_rational};

    #[test]
    fn reduction_and_monic_den() {
        let f3 = Fq::prime(3).unwrap();
        let num = parse_poly(&f3, "2*T^2+2*T").unwrap(); // 2T(T+1)
        let den = parse_poly(&f3, "2*T").unwrap();
        let r = RationalFunc::new(num, den).unwrap();
        assert!(r.is_poly());
        assert_eq!(r.num().to_string_with_var("T"), "T+1");
    }

    #[test]
    fn field_axioms_spot() {
        let f2 = Fq::prime(2).unwrap();
        let ff = RationalField::new(f2.clone());
        let a = parse_rational(&f2, "(T+1)/(T^2+T+1)").unwrap();
        let ai = ff.inv(&a).unwrap();
        assert_eq!(ff.mul(&a, &ai), ff.one());
        assert_eq!(a.deg(), Deg::Fin(-1));
    }

    #[test]
    fn ord_at_prime() {
        let f2 = Fq::prime(2).unwrap();
        let t = parse_poly(&f2, "T").unwrap();
        let r = parse_rational(&f2, "(T^2)/(T^3+T+1)").unwrap();
        assert_eq!(r.ord_at(&t).unwrap(), 2);
        let r2 = parse_rational(&f2, "(T+1)/(T^2)").unwrap();
        assert_eq!(r2.ord_at(&t).unwrap(), -2);
    }
}
