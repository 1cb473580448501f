//! The finite field F_q, q = p^e, in a polynomial basis over F_p.
//!
//! For e > 1 the modulus defaults to the first monic irreducible of degree e
//! in graded-lexicographic order (a fixed, reproducible choice recorded in
//! the context descriptor).  Elements are inline coordinate vectors over
//! F_p (p < 2^16, e <= 8), so they are `Copy` and allocation-free.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::Field;

/// Maximum extension degree over F_p supported by the inline representation.
pub const MAX_E: usize = 8;

/// An element of F_q as a coordinate vector over F_p of length e; unused
/// slots are zero so that derived equality and hashing are canonical.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqElem {
    c: [u16; MAX_E],
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq{:?}", self.c)
    }
}

impl FqElem {
    fn zero() -> FqElem {
        FqElem { c: [0; MAX_E] }
    }

    pub fn coords(&self, e: usize) -> &[u16] {
        &self.c[..e]
    }
}

#[derive(Debug)]
struct FqRepr {
    p: u32,
    e: u32,
    /// Monic modulus of degree e over F_p, ascending; `None` iff e == 1.
    modulus: Option<Vec<u32>>,
}

/// Context for F_q = F_p[z]/(modulus).
#[derive(Clone)]
pub struct Fq {
    repr: Arc<FqRepr>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.repr.p == other.repr.p
            && self.repr.e == other.repr.e
            && self.repr.modulus == other.repr.modulus
    }
}
impl Eq for Fq {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// F_p scalar helpers.
#[inline]
fn p_add(p: u32, a: u32, b: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}
#[inline]
fn p_sub(p: u32, a: u32, b: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}
#[inline]
fn p_mul(p: u32, a: u32, b: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}
fn p_inv(p: u32, a: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut n = p as u64 - 2;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        n >>= 1;
    }
    acc as u32
}

fn poly_deg(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Irreducibility over F_p by trial division (degrees here are tiny).
fn fp_poly_irreducible(p: u32, f: &[u32]) -> bool {
    let d = match poly_deg(f) {
        Some(d) => d,
        None => return false,
    };
    if d == 0 {
        return false;
    }
    for deg in 1..=d / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut g = vec![0u32; deg + 1];
            let mut n = idx;
            for gi in g.iter_mut().take(deg) {
                *gi = (n % p as u64) as u32;
                n /= p as u64;
            }
            g[deg] = 1;
            if fp_poly_rem_is_zero(p, f, &g) {
                return false;
            }
        }
    }
    true
}

fn fp_poly_rem_is_zero(p: u32, f: &[u32], g: &[u32]) -> bool {
    let dg = poly_deg(g).unwrap();
    let mut r: Vec<u32> = f.to_vec();
    loop {
        let dr = match poly_deg(&r) {
            Some(d) => d,
            None => return true,
        };
        if dr < dg {
            return false;
        }
        let lead = r[dr]; // g monic
        for (i, &gi) in g.iter().enumerate() {
            r[dr - dg + i] = p_sub(p, r[dr - dg + i], p_mul(p, lead, gi));
        }
    }
}

/// First monic irreducible of degree e over F_p in graded-lex order on the
/// coefficient vector (a_0, a_1, ..., a_{e-1}).
fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for idx in 0..count {
        let mut f = vec![0u32; e as usize + 1];
        let mut n = idx;
        for fi in f.iter_mut().take(e as usize) {
            *fi = (n % p as u64) as u32;
            n /= p as u64;
        }
        f[e as usize] = 1;
        if fp_poly_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

impl Fq {
    /// F_q with q = p^e and the default (graded-lex smallest) modulus.
    pub fn new(p: u32, e: u32) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::domain(format!("p = {p} is not prime")));
        }
        if p > u16::MAX as u32 {
            return Err(Error::domain("p too large for this library (p < 2^16)"));
        }
        if e == 0 || e as usize > MAX_E {
            return Err(Error::domain(format!(
                "extension degree must satisfy 1 <= e <= {MAX_E}"
            )));
        }
        let modulus = if e == 1 {
            None
        } else {
            Some(default_modulus(p, e))
        };
        Ok(Fq {
            repr: Arc::new(FqRepr { p, e, modulus }),
        })
    }

    /// F_q with an explicit modulus (monic, degree e, ascending over F_p).
    pub fn with_modulus(p: u32, e: u32, modulus: Vec<u32>) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::domain(format!("p = {p} is not prime")));
        }
        if p > u16::MAX as u32 {
            return Err(Error::domain("p too large for this library (p < 2^16)"));
        }
        if e < 2 || e as usize > MAX_E {
            return Err(Error::domain(format!(
                "explicit modulus requires 2 <= e <= {MAX_E}"
            )));
        }
        if modulus.len() != e as usize + 1 || modulus[e as usize] != 1 {
            return Err(Error::domain("modulus must be monic of degree e"));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::domain("modulus coefficients must be reduced mod p"));
        }
        if !fp_poly_irreducible(p, &modulus) {
            return Err(Error::domain("modulus is not irreducible over F_p"));
        }
        Ok(Fq {
            repr: Arc::new(FqRepr {
                p,
                e,
                modulus: Some(modulus),
            }),
        })
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Fq> {
        Fq::new(p, 1)
    }

    pub fn p(&self) -> u32 {
        self.repr.p
    }
    pub fn e(&self) -> u32 {
        self.repr.e
    }
    pub fn order(&self) -> u64 {
        (self.repr.p as u64).pow(self.repr.e)
    }
    pub fn modulus(&self) -> Option<&[u32]> {
        self.repr.modulus.as_deref()
    }

    /// Deterministic descriptor `Fq(p,e[,modulus])`.
    pub fn descriptor(&self) -> String {
        match &self.repr.modulus {
            None => format!("Fq({},{})", self.repr.p, self.repr.e),
            Some(m) => format!(
                "Fq({},{},{})",
                self.repr.p,
                self.repr.e,
                super::text::fmt_fp_poly(m, "z")
            ),
        }
    }

    pub fn elem_from_coords(&self, coords: &[u32]) -> FqElem {
        let e = self.repr.e as usize;
        let mut v = FqElem::zero();
        for (i, &c) in coords.iter().enumerate().take(e) {
            v.c[i] = (c % self.repr.p) as u16;
        }
        v
    }

    /// Element with index `idx` in [0, q): base-p digits are the coordinates.
    pub fn elem_from_index(&self, mut idx: u64) -> FqElem {
        let e = self.repr.e as usize;
        let p = self.repr.p as u64;
        let mut v = FqElem::zero();
        for i in 0..e {
            v.c[i] = (idx % p) as u16;
            idx /= p;
        }
        v
    }

    pub fn elem_index(&self, a: &FqElem) -> u64 {
        let e = self.repr.e as usize;
        let p = self.repr.p as u64;
        let mut idx = 0u64;
        for i in (0..e).rev() {
            idx = idx * p + a.c[i] as u64;
        }
        idx
    }

    /// The integer c mod p, embedded.
    pub fn from_int(&self, c: i64) -> FqElem {
        let p = self.repr.p as i64;
        let r = ((c % p) + p) % p;
        let mut v = FqElem::zero();
        v.c[0] = r as u16;
        v
    }

    /// The class of z (generator of the polynomial basis); equals 0 if e = 1.
    pub fn gen(&self) -> FqElem {
        let mut v = FqElem::zero();
        if self.repr.e > 1 {
            v.c[1] = 1;
        }
        v
    }

    pub fn elems(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.order()).map(move |i| self.elem_from_index(i))
    }
}

impl Field for Fq {
    type Elem = FqElem;

    fn fq(&self) -> &Fq {
        self
    }

    fn zero(&self) -> FqElem {
        FqElem::zero()
    }

    fn one(&self) -> FqElem {
        self.from_int(1)
    }

    fn is_zero(&self, a: &FqElem) -> bool {
        a.c.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.repr.p;
        let e = self.repr.e as usize;
        let mut v = FqElem::zero();
        for i in 0..e {
            v.c[i] = p_add(p, a.c[i] as u32, b.c[i] as u32) as u16;
        }
        v
    }

    fn neg(&self, a: &FqElem) -> FqElem {
        let p = self.repr.p;
        let e = self.repr.e as usize;
        let mut v = FqElem::zero();
        for i in 0..e {
            v.c[i] = p_sub(p, 0, a.c[i] as u32) as u16;
        }
        v
    }

    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.repr.p;
        let e = self.repr.e as usize;
        if e == 1 {
            let mut v = FqElem::zero();
            v.c[0] = p_mul(p, a.c[0] as u32, b.c[0] as u32) as u16;
            return v;
        }
        let modulus = self.repr.modulus.as_ref().unwrap();
        let mut prod = [0u32; 2 * MAX_E];
        for i in 0..e {
            let ai = a.c[i] as u32;
            if ai == 0 {
                continue;
            }
            for j in 0..e {
                let bj = b.c[j] as u32;
                if bj == 0 {
                    continue;
                }
                prod[i + j] = p_add(p, prod[i + j], p_mul(p, ai, bj));
            }
        }
        for k in (e..2 * e - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &mi) in modulus.iter().enumerate().take(e) {
                prod[k - e + i] = p_sub(p, prod[k - e + i], p_mul(p, c, mi));
            }
        }
        let mut v = FqElem::zero();
        for i in 0..e {
            v.c[i] = prod[i] as u16;
        }
        v
    }

    fn inv(&self, a: &FqElem) -> Result<FqElem> {
        if self.is_zero(a) {
            return Err(Error::domain("inversion of zero in F_q"));
        }
        let p = self.repr.p;
        if self.repr.e == 1 {
            let mut v = FqElem::zero();
            v.c[0] = p_inv(p, a.c[0] as u32) as u16;
            Ok(v)
        } else {
            Ok(self.pow(a, (self.order() - 2) as u128))
        }
    }

    fn embed_fq(&self, c: &FqElem) -> FqElem {
        *c
    }

    fn fmt_elem(&self, a: &FqElem) -> String {
        if self.repr.e == 1 {
            format!("{}", a.c[0])
        } else {
            let coords: Vec<u32> = a.c[..self.repr.e as usize]
                .iter()
                .map(|&x| x as u32)
                .collect();
            super::text::fmt_fp_poly(&coords, "z")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_two_addition() {
        let f2 = Fq::prime(2).unwrap();
        let one = f2.one();
        assert!(f2.is_zero(&f2.add(&one, &one)));
    }

    #[test]
    fn f4_default_modulus_is_z2_z_1() {
        let f4 = Fq::new(2, 2).unwrap();
        assert_eq!(f4.modulus().unwrap(), &[1, 1, 1]);
        // z * z = z + 1
        let z = f4.gen();
        let z2 = f4.mul(&z, &z);
        let expect = f4.add(&z, &f4.one());
        assert_eq!(z2, expect);
    }

    #[test]
    fn inverses_everywhere() {
        for (p, e) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)] {
            let f = Fq::new(p, e).unwrap();
            for i in 1..f.order() {
                let a = f.elem_from_index(i);
                let b = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &b), f.one(), "q = {}", f.order());
            }
        }
    }

    #[test]
    fn frobenius_fixes_field() {
        let f9 = Fq::new(3, 2).unwrap();
        for a in f9.elems() {
            assert_eq!(f9.pow(&a, 9), a);
        }
    }

    #[test]
    fn index_roundtrip() {
        let f8 = Fq::new(2, 3).unwrap();
        for i in 0..8 {
            assert_eq!(f8.elem_index(&f8.elem_from_index(i)), i);
        }
    }
}
