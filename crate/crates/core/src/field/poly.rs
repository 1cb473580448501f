//! Dense univariate polynomials over any [`Field`] context.
//!
//! `Poly<Fq>` is the ring A = F_q[T]; the same type over other coefficient
//! fields backs extension moduli and splitting towers.  deg(0) is the
//! sentinel [`Deg::NegInf`], ordered below every integer, and |a| = q^deg a
//! with |0| = 0.

use std::fmt;

use crate::error::{Error, Result};

use super::{Field, FiniteField, Fq, FqElem};

/// Degree with the -infinity sentinel for the zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Deg {
    NegInf,
    Fin(i64),
}

impl Deg {
    pub fn finite(self) -> Option<i64> {
        match self {
            Deg::NegInf => None,
            Deg::Fin(d) => Some(d),
        }
    }
}

#[derive(Clone)]
pub struct Poly<F: Field> {
    field: F,
    /// Ascending coefficients, no trailing zero.
    coeffs: Vec<F::Elem>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]", self.to_string_with_var("T"))
    }
}

impl std::hash::Hash for Poly<Fq> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state)
    }
}
impl Eq for Poly<Fq> {}

/// Graded order on A: by degree, then by the coefficient index vector.
impl Ord for Poly<Fq> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let fq = self.field();
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| {
                for (a, b) in self.coeffs.iter().zip(other.coeffs.iter()).rev() {
                    let ord = fq.elem_index(a).cmp(&fq.elem_index(b));
                    if ord != std::cmp::Ordering::Equal {
                        return ord;
                    }
                }
                std::cmp::Ordering::Equal
            })
    }
}

impl PartialOrd for Poly<Fq> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Field> Poly<F> {
    pub fn from_coeffs(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while let Some(last) = coeffs.last() {
            if field.is_zero(last) {
                coeffs.pop();
            } else {
                break;
            }
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Poly {
            field,
            coeffs: vec![one],
        }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Poly::from_coeffs(field, vec![c])
    }

    /// The variable itself (T for A = F_q[T]).
    pub fn var(field: F) -> Self {
        let coeffs = vec![field.zero(), field.one()];
        Poly { field, coeffs }
    }

    /// c * T^k.
    pub fn monomial(field: F, c: F::Elem, k: usize) -> Self {
        if field.is_zero(&c) {
            return Poly::zero(field);
        }
        let mut coeffs = vec![field.zero(); k + 1];
        coeffs[k] = c;
        Poly { field, coeffs }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F::Elem {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn deg(&self) -> Deg {
        if self.coeffs.is_empty() {
            Deg::NegInf
        } else {
            Deg::Fin(self.coeffs.len() as i64 - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        match self.coeffs.last() {
            Some(c) => *c == self.field.one(),
            None => false,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let f = &self.field;
        let coeffs: Vec<F::Elem> = (0..n)
            .map(|i| f.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Poly::from_coeffs(self.field.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut coeffs = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(&coeffs[i + j], &f.mul(a, b));
            }
        }
        Poly::from_coeffs(self.field.clone(), coeffs)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Poly::from_coeffs(self.field.clone(), coeffs)
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field.clone());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Division with remainder: self = s * rhs + r, deg r < deg rhs.
    pub fn divmod(&self, rhs: &Self) -> Result<(Self, Self)> {
        if rhs.is_zero() {
            return Err(Error::domain("polynomial division by zero"));
        }
        let f = self.field.clone();
        let db = rhs.coeffs.len() - 1;
        let lead_inv = f.inv(rhs.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot: Vec<F::Elem> = if rem.len() > db {
            vec![f.zero(); rem.len() - db]
        } else {
            Vec::new()
        };
        while rem.len() > db {
            let dr = rem.len() - 1;
            let c = f.mul(rem.last().unwrap(), &lead_inv);
            if !f.is_zero(&c) {
                quot[dr - db] = c.clone();
                for (i, b) in rhs.coeffs.iter().enumerate() {
                    let t = f.mul(&c, b);
                    rem[dr - db + i] = f.sub(&rem[dr - db + i], &t);
                }
            }
            rem.pop();
            while rem.last().map(|x| f.is_zero(x)).unwrap_or(false) {
                rem.pop();
            }
            if rem.len() <= db {
                break;
            }
        }
        Ok((
            Poly::from_coeffs(f.clone(), quot),
            Poly::from_coeffs(f, rem),
        ))
    }

    pub fn rem(&self, rhs: &Self) -> Result<Self> {
        Ok(self.divmod(rhs)?.1)
    }

    pub fn divides(&self, other: &Self) -> bool {
        match other.divmod(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("b nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns (g, s, t) monic with s*self + t*other = g.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let f = self.field.clone();
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Poly::one(f.clone());
        let mut s1 = Poly::zero(f.clone());
        let mut t0 = Poly::zero(f.clone());
        let mut t1 = Poly::one(f.clone());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("r1 nonzero");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = f.inv(r0.leading().unwrap()).unwrap();
        (
            r0.scale(&c),
            s0.scale(&c),
            t0.scale(&c),
        )
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let c = self.field.inv(l).expect("leading nonzero");
                self.scale(&c)
            }
        }
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    /// Evaluate in another field through a coefficient embedding.
    pub fn eval_in<G: Field>(
        &self,
        g: &G,
        embed: impl Fn(&F::Elem) -> G::Elem,
        x: &G::Elem,
    ) -> G::Elem {
        let mut acc = g.zero();
        for c in self.coeffs.iter().rev() {
            acc = g.add(&g.mul(&acc, x), &embed(c));
        }
        acc
    }

    /// Map coefficients into another field.
    pub fn map_coeffs<G: Field>(&self, g: G, map: impl Fn(&F::Elem) -> G::Elem) -> Poly<G> {
        let coeffs = self.coeffs.iter().map(|c| map(c)).collect();
        Poly::from_coeffs(g, coeffs)
    }

    /// self^n mod m (square and multiply with polynomial reduction).
    pub fn powmod(&self, mut n: u128, m: &Self) -> Result<Self> {
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(self.field.clone());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).rem(m)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).rem(m)?;
            }
        }
        Ok(acc)
    }

    pub fn to_string_with_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let cs = f.fmt_elem(c);
            let needs_coeff = cs != "1" || k == 0;
            let coeff_part = if needs_coeff {
                if cs.contains('+') || cs.contains('-') || cs.contains('*') {
                    format!("({cs})")
                } else {
                    cs
                }
            } else {
                String::new()
            };
            let part = match k {
                0 => coeff_part,
                1 if coeff_part.is_empty() => var.to_string(),
                1 => format!("{coeff_part}*{var}"),
                _ if coeff_part.is_empty() => format!("{var}^{k}"),
                _ => format!("{coeff_part}*{var}^{k}"),
            };
            parts.push(part);
        }
        parts.join("+")
    }
}

impl Poly<Fq> {
    /// |a| = q^deg a as u128 (|0| = 0).
    pub fn abs_norm(&self) -> u128 {
        match self.deg() {
            Deg::NegInf => 0,
            Deg::Fin(d) => (self.field().order() as u128).pow(d as u32),
        }
    }

    /// Deterministic index of a monic polynomial of degree d within the
    /// graded-lex enumeration; inverse of [`monic_from_index`].
    pub fn monic_from_index(fq: &Fq, d: usize, mut idx: u128) -> Poly<Fq> {
        let q = fq.order() as u128;
        let mut coeffs: Vec<FqElem> = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(fq.elem_from_index((idx % q) as u64));
            idx /= q;
        }
        coeffs.push(fq.one());
        Poly::from_coeffs(fq.clone(), coeffs)
    }

    /// All monic polynomials of degree d in graded-lex order.
    pub fn monic_of_degree(fq: &Fq, d: usize) -> impl Iterator<Item = Poly<Fq>> + '_ {
        let q = fq.order() as u128;
        let count = q.pow(d as u32);
        (0..count).map(move |i| Poly::monic_from_index(fq, d, i))
    }

    /// ord_p(self): the exact power of the prime `p` dividing self.
    pub fn ord_at(&self, p: &Poly<Fq>) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::domain("ord of zero polynomial"));
        }
        let mut n = 0i64;
        let mut cur = self.clone();
        loop {
            let (s, r) = cur.divmod(p)?;
            if !r.is_zero() {
                return Ok(n);
            }
            n += 1;
            cur = s;
        }
    }

    /// Prime factorization by trial division against the graded-lex
    /// enumeration of monic irreducibles (desk-scale degrees).
    pub fn factor(&self) -> Result<Vec<(Poly<Fq>, u32)>> {
        if self.is_zero() {
            return Err(Error::domain("factor of zero polynomial"));
        }
        let fq = self.field().clone();
        let mut rest = self.monic();
        let mut out: Vec<(Poly<Fq>, u32)> = Vec::new();
        let mut d = 1usize;
        while let Deg::Fin(dr) = rest.deg() {
            if dr == 0 {
                break;
            }
            if (d as i64) * 2 > dr {
                out.push((rest.clone(), 1));
                break;
            }
            for p in Poly::monic_of_degree(&fq, d) {
                let mut mult = 0u32;
                loop {
                    let (s, r) = rest.divmod(&p)?;
                    if r.is_zero() {
                        mult += 1;
                        rest = s;
                    } else {
                        break;
                    }
                }
                if mult > 0 {
                    out.push((p, mult));
                }
            }
            d += 1;
        }
        Ok(out)
    }
}

impl<F: FiniteField> Poly<F> {
    /// Rabin irreducibility test over a finite coefficient field.
    pub fn is_irreducible(&self) -> bool {
        let d = match self.deg() {
            Deg::Fin(d) if d >= 1 => d as u64,
            _ => return false,
        };
        let f = self.monic();
        let field = self.field.clone();
        let q_big = field.order_u128();
        let x = Poly::var(field.clone());
        // Frobenius iterates x^(Q^i) mod f, computed by repeated Q-powering.
        let mut frob = x.clone();
        let mut frob_cache: Vec<Poly<F>> = vec![x.clone()];
        for _ in 0..d {
            frob = frob.powmod(q_big, &f).expect("f nonzero");
            frob_cache.push(frob.clone());
        }
        if frob_cache[d as usize] != x.rem(&f).unwrap() {
            return false;
        }
        // For each prime l | d: gcd(x^(Q^(d/l)) - x, f) must be 1.
        let mut m = d;
        let mut primes = Vec::new();
        let mut l = 2;
        while l * l <= m {
            if m % l == 0 {
                primes.push(l);
                while m % l == 0 {
                    m /= l;
                }
            }
            l += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        for l in primes {
            let g = frob_cache[(d / l) as usize].sub(&x).gcd(&f);
            if !g.is_one() {
                return false;
            }
        }
        true
    }
}

/// Exactly the monic irreducibles of degree d over F_q, in graded-lex order
/// on coefficient vectors.
pub fn enumerate_monic_irreducibles(fq: &Fq, d: usize) -> Vec<Poly<Fq>> {
    assert!(d >= 1, "degree must be >= 1");
    Poly::monic_of_degree(fq, d)
        .filter(|f| f.is_irreducible())
        .collect()
}

/// Necklace count (1/d) sum_{e|d} mu(e) q^(d/e): the number of monic
/// irreducibles of degree d.
pub fn irreducible_count(q: u64, d: u64) -> u64 {
    fn moebius(mut n: u64) -> i64 {
        let mut m = 1i64;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    }
    let mut total: i128 = 0;
    for e in 1..=d {
        if d % e == 0 {
            total += moebius(e) as i128 * (q as i128).pow((d / e) as u32);
        }
    }
    (total / d as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_poly;

    #[test]
    fn divmod_roundtrip() {
        let f2 = Fq::prime(2).unwrap();
        let a = parse_poly(&f2, "T^3+T+1").unwrap();
        let b = parse_poly(&f2, "T").unwrap();
        let (s, r) = a.divmod(&b).unwrap();
        assert_eq!(s.mul(&b).add(&r), a);
        assert_eq!(r, Poly::one(f2.clone()));
    }

    #[test]
    fn gcd_example() {
        let f2 = Fq::prime(2).unwrap();
        let a = parse_poly(&f2, "T^2+T").unwrap();
        let b = parse_poly(&f2, "T").unwrap();
        assert_eq!(a.gcd(&b), b);
    }

    #[test]
    fn deg_multiplicative() {
        let f3 = Fq::prime(3).unwrap();
        let a = parse_poly(&f3, "T^2+2*T").unwrap();
        let b = parse_poly(&f3, "2*T^3+1").unwrap();
        assert_eq!(a.mul(&b).deg(), Deg::Fin(5));
        assert!(Deg::NegInf < Deg::Fin(-100));
    }

    #[test]
    fn irreducibles_q2() {
        let f2 = Fq::prime(2).unwrap();
        let d2 = enumerate_monic_irreducibles(&f2, 2);
        assert_eq!(d2.len(), 1);
        assert_eq!(d2[0], parse_poly(&f2, "T^2+T+1").unwrap());
        let d3 = enumerate_monic_irreducibles(&f2, 3);
        assert_eq!(
            d3,
            vec![
                parse_poly(&f2, "T^3+T+1").unwrap(),
                parse_poly(&f2, "T^3+T^2+1").unwrap()
            ]
        );
    }

    #[test]
    fn irreducibles_q3_degree1() {
        let f3 = Fq::prime(3).unwrap();
        let d1 = enumerate_monic_irreducibles(&f3, 1);
        let names: Vec<String> = d1.iter().map(|f| f.to_string_with_var("T")).collect();
        assert_eq!(names, vec!["T", "T+1", "T+2"]);
    }

    #[test]
    fn necklace_counts() {
        for q in [2u64, 3, 4, 5] {
            let fq = if q == 4 {
                Fq::new(2, 2).unwrap()
            } else {
                Fq::prime(q as u32).unwrap()
            };
            for d in 1..=4usize {
                let got = enumerate_monic_irreducibles(&fq, d).len() as u64;
                assert_eq!(got, irreducible_count(q, d as u64), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn factor_small() {
        let f2 = Fq::prime(2).unwrap();
        let n = parse_poly(&f2, "T^2+T").unwrap(); // T(T+1)
        let fac = n.factor().unwrap();
        assert_eq!(fac.len(), 2);
        assert!(fac.iter().all(|(_, m)| *m == 1));
    }
}
