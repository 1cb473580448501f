//! F_oo = F_q((pi)) with pi = 1/T, with explicit precision windows.
//!
//! A series is stored on the window [val, prec): coefficients below `val`
//! are certified zero, coefficients at or beyond `prec` are unknown.
//! Operations propagate precision pessimistically; asking for a coefficient
//! beyond the horizon is a precision error, never silent truncation.
//! The absolute value is normalized by |T| = q, i.e. |x| = q^(-val).

use std::fmt;

use crate::error::{Error, Result};

use super::{Deg, Field, Fq, FqElem, Poly, RationalFunc};

#[derive(Clone, PartialEq)]
pub struct LaurentSeries {
    fq: Fq,
    /// Valuation in powers of pi; equals `prec` for zero-within-precision.
    val: i64,
    /// Coefficients for exponents val, val+1, ..., prec-1.
    coeffs: Vec<FqElem>,
    prec: i64,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_display())
    }
}

impl LaurentSeries {
    pub fn new(fq: Fq, val: i64, coeffs: Vec<FqElem>, prec: i64) -> LaurentSeries {
        assert!(
            val + coeffs.len() as i64 <= prec,
            "window longer than precision"
        );
        let mut s = LaurentSeries {
            fq,
            val,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        // Pad to full window, then strip leading zeros.
        let want = (self.prec - self.val).max(0) as usize;
        self.coeffs.resize(want, self.fq.zero());
        let lead = self
            .coeffs
            .iter()
            .position(|c| !self.fq.is_zero(c));
        match lead {
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
        }
    }

    pub fn zero(fq: Fq, prec: i64) -> LaurentSeries {
        LaurentSeries {
            fq,
            val: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn one(fq: Fq, prec: i64) -> LaurentSeries {
        let one = fq.one();
        LaurentSeries::new(fq, 0, vec![one], prec)
    }

    /// pi^k with the given horizon.
    pub fn pi_power(fq: Fq, k: i64, prec: i64) -> LaurentSeries {
        let one = fq.one();
        LaurentSeries::new(fq, k, vec![one], prec)
    }

    /// Exact expansion of a polynomial in T: T^d contributes at exponent -d.
    pub fn from_poly(a: &Poly<Fq>, prec: i64) -> LaurentSeries {
        let fq = a.field().clone();
        match a.deg() {
            Deg::NegInf => LaurentSeries::zero(fq, prec),
            Deg::Fin(d) => {
                let coeffs: Vec<FqElem> = a.coeffs().iter().rev().cloned().collect();
                LaurentSeries::new(fq, -d, coeffs, prec)
            }
        }
    }

    /// Expansion of x in F at infinity to horizon `prec`; the valuation is
    /// deg den - deg num.
    pub fn from_rational(x: &RationalFunc, prec: i64) -> LaurentSeries {
        let fq = x.fq().clone();
        if x.is_zero() {
            return LaurentSeries::zero(fq, prec);
        }
        let dn = x.num().deg().finite().unwrap();
        let dd = x.den().deg().finite().unwrap();
        let val = dd - dn;
        // Work with enough relative terms that val + rel >= prec.
        let rel = (prec - val).max(0) as usize + 1;
        let num = LaurentSeries::from_poly(x.num(), -dn + rel as i64 + dd + 1);
        let den = LaurentSeries::from_poly(x.den(), -dd + rel as i64 + dn + 1);
        let mut out = num.mul(&den.inv().expect("den nonzero"));
        out.prec = out.prec.min(prec);
        out.truncate_to_prec();
        out
    }

    fn truncate_to_prec(&mut self) {
        let want = (self.prec - self.val).max(0) as usize;
        self.coeffs.truncate(want);
        self.normalize();
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    /// Valuation; `None` when zero within precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero_within_prec() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_zero_within_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// |x| = q^(-v); 0 when zero within precision.
    pub fn abs_log_q(&self) -> Option<i64> {
        self.valuation().map(|v| -v)
    }

    /// Coefficient at pi^e; precision error beyond the horizon.
    pub fn coeff_at(&self, e: i64) -> Result<FqElem> {
        if e >= self.prec {
            return Err(Error::precision(format!(
                "coefficient at pi^{e} requested, horizon is pi^{}",
                self.prec
            )));
        }
        if e < self.val {
            return Ok(self.fq.zero());
        }
        Ok(self.coeffs[(e - self.val) as usize].clone())
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let prec = self.prec.min(other.prec);
        let val = self.val.min(other.val).min(prec);
        let n = (prec - val).max(0) as usize;
        let fq = &self.fq;
        let mut coeffs = vec![fq.zero(); n];
        for (s, shift) in [(self, self.val - val), (other, other.val - val)] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let k = i + shift as usize;
                if k < n {
                    coeffs[k] = fq.add(&coeffs[k], c);
                }
            }
        }
        LaurentSeries::new(fq.clone(), val, coeffs, prec)
    }

    pub fn neg(&self) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|c| self.fq.neg(c)).collect();
        LaurentSeries {
            fq: self.fq.clone(),
            val: self.val,
            coeffs,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    /// Product horizon: min(va + pb, vb + pa).
    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let prec = (self.val + other.prec).min(other.val + self.prec);
        let val = self.val + other.val;
        let n = (prec - val).max(0) as usize;
        let fq = &self.fq;
        let mut coeffs = vec![fq.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if fq.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < n {
                    coeffs[i + j] = fq.add(&coeffs[i + j], &fq.mul(a, b));
                }
            }
        }
        LaurentSeries::new(fq.clone(), val, coeffs, prec)
    }

    pub fn inv(&self) -> Result<LaurentSeries> {
        if self.is_zero_within_prec() {
            return Err(Error::precision(
                "cannot invert a series that is zero within its precision",
            ));
        }
        let fq = &self.fq;
        let n = self.coeffs.len();
        // Invert the unit part u = c_0 + c_1 pi + ... by the usual recurrence.
        let c0inv = fq.inv(&self.coeffs[0])?;
        let mut inv = vec![fq.zero(); n];
        inv[0] = c0inv.clone();
        for k in 1..n {
            let mut acc = fq.zero();
            for i in 1..=k {
                acc = fq.add(&acc, &fq.mul(&self.coeffs[i], &inv[k - i]));
            }
            inv[k] = fq.neg(&fq.mul(&acc, &c0inv));
        }
        // Relative precision is preserved: prec' = -val + (prec - val).
        let val = -self.val;
        let prec = self.prec - 2 * self.val;
        Ok(LaurentSeries::new(fq.clone(), val, inv, prec))
    }

    pub fn pow(&self, n: i64) -> Result<LaurentSeries> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut acc = LaurentSeries::one(self.fq.clone(), self.prec - self.val.min(0) * n);
        let mut base = self.clone();
        let mut m = n as u64;
        if m == 0 {
            // x^0 = 1 exactly; keep a sane horizon.
            return Ok(LaurentSeries::one(self.fq.clone(), self.prec));
        }
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Certified agreement: equality of all coefficients below both horizons.
    /// Errors if the common certified region is empty.
    pub fn agrees_with(&self, other: &LaurentSeries) -> Result<bool> {
        let horizon = self.prec.min(other.prec);
        let lo = self.val.min(other.val);
        if horizon <= lo && self.is_zero_within_prec() != other.is_zero_within_prec() {
            return Err(Error::precision("no common certified window to compare"));
        }
        for e in lo..horizon {
            if self.coeff_at(e)? != other.coeff_at(e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_display(&self) -> String {
        if self.is_zero_within_prec() {
            return format!("O(pi^{})", self.prec);
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.fq.is_zero(c) {
                continue;
            }
            let e = self.val + i as i64;
            let cs = self.fq.fmt_elem(c);
            let body = match e {
                0 => {
                    parts.push(cs);
                    continue;
                }
                1 => "pi".to_string(),
                _ => format!("pi^{e}"),
            };
            if cs == "1" {
                parts.push(body);
            } else {
                parts.push(format!("{cs}*{body}"));
            }
        }
        format!("{} + O(pi^{})", parts.join(" + "), self.prec)
    }

    /// (exponent, coefficient) pairs of the certified window.
    pub fn terms(&self) -> Vec<(i64, FqElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.fq.is_zero(c))
            .map(|(i, c)| (self.val + i as i64, c.clone()))
            .collect()
    }
}

/// Field handle for F_oo with a working precision used for constants.
#[derive(Clone)]
pub struct LaurentField {
    fq: Fq,
    prec: i64,
}

impl fmt::Debug for LaurentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Foo({:?}, prec {})", self.fq, self.prec)
    }
}

impl LaurentField {
    pub fn new(fq: Fq, prec: i64) -> Self {
        LaurentField { fq, prec }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// The element T = pi^(-1).
    pub fn t(&self) -> LaurentSeries {
        LaurentSeries::pi_power(self.fq.clone(), -1, self.prec)
    }

    pub fn expand(&self, x: &RationalFunc) -> LaurentSeries {
        LaurentSeries::from_rational(x, self.prec)
    }
}

impl Field for LaurentField {
    type Elem = LaurentSeries;

    fn fq(&self) -> &Fq {
        &self.fq
    }

    fn zero(&self) -> LaurentSeries {
        LaurentSeries::zero(self.fq.clone(), self.prec)
    }

    fn one(&self) -> LaurentSeries {
        LaurentSeries::one(self.fq.clone(), self.prec)
    }

    fn is_zero(&self, a: &LaurentSeries) -> bool {
        a.is_zero_within_prec()
    }

    fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.add(b)
    }

    fn neg(&self, a: &LaurentSeries) -> LaurentSeries {
        a.neg()
    }

    fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.mul(b)
    }

    fn inv(&self, a: &LaurentSeries) -> Result<LaurentSeries> {
        a.inv()
    }

    fn embed_fq(&self, c: &FqElem) -> LaurentSeries {
        if self.fq.is_zero(c) {
            self.zero()
        } else {
            LaurentSeries::new(self.fq.clone(), 0, vec![c.clone()], self.prec)
        }
    }

    fn fmt_elem(&self, a: &LaurentSeries) -> String {
        a.to_display()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::{parse_poly, parse_rational};

    #[test]
    fn expand_t() {
        let f2 = Fq::prime(2).unwrap();
        let t = parse_rational(&f2, "T").unwrap();
        let s = LaurentSeries::from_rational(&t, 10);
        assert_eq!(s.valuation(), Some(-1));
        assert_eq!(s.terms().len(), 1);
    }

    #[test]
    fn geometric_series() {
        // 1/(T+1) = pi/(1+pi) = pi + pi^2 + pi^3 + ... over F_2.
        let f2 = Fq::prime(2).unwrap();
        let x = parse_rational(&f2, "1/(T+1)").unwrap();
        let s = LaurentSeries::from_rational(&x, 8);
        assert_eq!(s.valuation(), Some(1));
        for e in 1..8 {
            assert_eq!(s.coeff_at(e).unwrap(), f2.one(), "exponent {e}");
        }
    }

    #[test]
    fn poly_valuation_is_minus_deg() {
        let f3 = Fq::prime(3).unwrap();
        for s in ["T^4+T", "2*T^2+1", "T"] {
            let a = parse_poly(&f3, s).unwrap();
            let x = LaurentSeries::from_poly(&a, 5);
            assert_eq!(x.valuation(), Some(-a.deg().finite().unwrap()));
        }
    }

    #[test]
    fn roundtrip_times_denominator() {
        let f3 = Fq::prime(3).unwrap();
        for (n, d) in [("T^2+1", "T^3+2*T+1"), ("1", "T+2"), ("T^5+T", "T^2+1")] {
            let x = parse_rational(&f3, &format!("({n})/({d})")).unwrap();
            let s = LaurentSeries::from_rational(&x, 12);
            let ds = LaurentSeries::from_poly(x.den(), 12);
            let ns = LaurentSeries::from_poly(x.num(), 12);
            assert!(s.mul(&ds).agrees_with(&ns).unwrap(), "{n}/{d}");
        }
    }

    #[test]
    fn precision_error_beyond_horizon() {
        let f2 = Fq::prime(2).unwrap();
        let s = LaurentSeries::one(f2, 5);
        assert!(s.coeff_at(4).is_ok());
        assert!(s.coeff_at(5).is_err());
    }

    #[test]
    fn mul_precision_is_pessimistic() {
        let f2 = Fq::prime(2).unwrap();
        let a = LaurentSeries::pi_power(f2.clone(), 2, 7);
        let b = LaurentSeries::pi_power(f2.clone(), -1, 4);
        let c = a.mul(&b);
        // min(va + pb, vb + pa) = min(2+4, -1+7) = 6.
        assert_eq!(c.precision(), 6);
        assert_eq!(c.valuation(), Some(1));
    }
}
