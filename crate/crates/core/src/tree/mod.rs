//! The Bruhat-Tits tree of PGL_2(F_oo): matrix normal forms for vertices and
//! oriented edges, adjacency, and the GL_2(F) action.
//!
//! All matrices are kept exactly as Laurent polynomials in pi = 1/T
//! (elements of F_q[T, 1/T]); pi-expansions of fractions appear only through
//! exact truncated inverses, and only to produce residues modulo pi^k, which
//! is finite data.
//!
//! Conventions (these reproduce the published quotient pictures):
//! - vertex(g) is the homothety class of the column lattice g O^2, with
//!   normal form (pi^k, u; 0, 1), u reduced mod pi^k O;
//! - the oriented edge of the coset g F^x I (I the Iwahori group) runs from
//!   [g O^2] to [g L_1] with L_1 = columns(1, 0; 0, pi) O^2;
//! - plus-side normal forms are (pi^k, u; 0, 1), running from (k, u) to
//!   (k-1, u mod pi^{k-1}); the reversal is right multiplication by
//!   iota = (0, 1; pi, 0), i.e. the flag toggled.

pub mod quotient;

pub use quotient::{
    gamma0_equivalent, stabilizer_order, QuotientGraph, QuotientOptions, Ray,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Deg, Field, Fq, FqElem, Poly};

/// An exact Laurent polynomial over F_q in pi: support [lo, lo + len).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LPoly {
    lo: i64,
    /// Coefficients from exponent lo upward; first and last nonzero.
    c: Vec<FqElem>,
}

impl fmt::Debug for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.coords(8).iter().all(|&v| v == 0))
            .map(|(i, x)| format!("{:?}*pi^{}", x, self.lo + i as i64))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl LPoly {
    pub fn zero() -> LPoly {
        LPoly {
            lo: 0,
            c: Vec::new(),
        }
    }

    pub fn from_terms(fq: &Fq, terms: impl IntoIterator<Item = (i64, FqElem)>) -> LPoly {
        let terms: Vec<(i64, FqElem)> = terms
            .into_iter()
            .filter(|(_, c)| !fq.is_zero(c))
            .collect();
        if terms.is_empty() {
            return LPoly::zero();
        }
        let lo = terms.iter().map(|(e, _)| *e).min().unwrap();
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut c = vec![fq.zero(); (hi - lo + 1) as usize];
        for (e, x) in terms {
            let slot = &mut c[(e - lo) as usize];
            *slot = fq.add(slot, &x);
        }
        LPoly { lo, c }.normalized(fq)
    }

    fn normalized(mut self, fq: &Fq) -> LPoly {
        while self.c.last().map(|x| fq.is_zero(x)).unwrap_or(false) {
            self.c.pop();
        }
        let lead = self.c.iter().position(|x| !fq.is_zero(x));
        match lead {
            Some(k) => {
                self.c.drain(..k);
                self.lo += k as i64;
            }
            None => {
                self.c.clear();
                self.lo = 0;
            }
        }
        self
    }

    pub fn one(fq: &Fq) -> LPoly {
        LPoly {
            lo: 0,
            c: vec![fq.one()],
        }
    }

    /// c * pi^e.
    pub fn monomial(fq: &Fq, c: FqElem, e: i64) -> LPoly {
        if fq.is_zero(&c) {
            LPoly::zero()
        } else {
            LPoly { lo: e, c: vec![c] }
        }
    }

    /// A polynomial in T becomes a Laurent polynomial with exponents -deg..0.
    pub fn from_poly_t(a: &Poly<Fq>) -> LPoly {
        match a.deg() {
            Deg::NegInf => LPoly::zero(),
            Deg::Fin(d) => {
                let c: Vec<FqElem> = a.coeffs().iter().rev().cloned().collect();
                LPoly { lo: -d, c }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Valuation; None for zero.
    pub fn val(&self) -> Option<i64> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.lo)
        }
    }

    pub fn coeff_at(&self, fq: &Fq, e: i64) -> FqElem {
        if e < self.lo || e >= self.lo + self.c.len() as i64 {
            fq.zero()
        } else {
            self.c[(e - self.lo) as usize]
        }
    }

    pub fn terms(&self, fq: &Fq) -> Vec<(i64, FqElem)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !fq.is_zero(x))
            .map(|(i, x)| (self.lo + i as i64, *x))
            .collect()
    }

    pub fn add(&self, fq: &Fq, other: &LPoly) -> LPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = (self.lo + self.c.len() as i64).max(other.lo + other.c.len() as i64);
        let mut c = vec![fq.zero(); (hi - lo) as usize];
        for (s, base) in [(self, self.lo - lo), (other, other.lo - lo)] {
            for (i, x) in s.c.iter().enumerate() {
                let k = i + base as usize;
                c[k] = fq.add(&c[k], x);
            }
        }
        LPoly { lo, c }.normalized(fq)
    }

    pub fn neg(&self, fq: &Fq) -> LPoly {
        LPoly {
            lo: self.lo,
            c: self.c.iter().map(|x| fq.neg(x)).collect(),
        }
    }

    pub fn sub(&self, fq: &Fq, other: &LPoly) -> LPoly {
        self.add(fq, &other.neg(fq))
    }

    pub fn mul(&self, fq: &Fq, other: &LPoly) -> LPoly {
        if self.is_zero() || other.is_zero() {
            return LPoly::zero();
        }
        let lo = self.lo + other.lo;
        let mut c = vec![fq.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if fq.is_zero(a) {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = fq.add(&c[i + j], &fq.mul(a, b));
            }
        }
        LPoly { lo, c }.normalized(fq)
    }

    pub fn scale(&self, fq: &Fq, s: &FqElem) -> LPoly {
        LPoly {
            lo: self.lo,
            c: self.c.iter().map(|x| fq.mul(x, s)).collect(),
        }
        .normalized(fq)
    }

    pub fn shift(&self, e: i64) -> LPoly {
        if self.is_zero() {
            return self.clone();
        }
        LPoly {
            lo: self.lo + e,
            c: self.c.clone(),
        }
    }

    /// Keep exponents < k only (reduction mod pi^k O).
    pub fn truncate_above(&self, fq: &Fq, k: i64) -> LPoly {
        let terms: Vec<(i64, FqElem)> = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| (self.lo + i as i64, *x))
            .filter(|(e, _)| *e < k)
            .collect();
        LPoly::from_terms(fq, terms)
    }

    /// Truncated inverse: the Laurent polynomial agreeing with 1/self on
    /// exponents [-v, -v + nterms), v the valuation of self.
    pub fn inv_trunc(&self, fq: &Fq, nterms: usize) -> Result<LPoly> {
        if self.is_zero() {
            return Err(Error::domain("inverse of zero Laurent polynomial"));
        }
        let v = self.lo;
        let c0inv = fq.inv(&self.c[0])?;
        let mut inv = vec![fq.zero(); nterms];
        if nterms > 0 {
            inv[0] = c0inv;
        }
        for k in 1..nterms {
            let mut acc = fq.zero();
            for i in 1..=k.min(self.c.len() - 1) {
                acc = fq.add(&acc, &fq.mul(&self.c[i], &inv[k - i]));
            }
            inv[k] = fq.neg(&fq.mul(&acc, &c0inv));
        }
        Ok(LPoly { lo: -v, c: inv }.normalized(fq))
    }

    /// Is this a polynomial in T, i.e. support only at exponents <= 0?
    pub fn is_t_polynomial(&self) -> bool {
        self.is_zero() || self.lo + self.c.len() as i64 - 1 <= 0
    }

    /// Convert back to a polynomial in T (errors if positive pi-exponents).
    pub fn to_poly_t(&self, fq: &Fq) -> Result<Poly<Fq>> {
        if !self.is_t_polynomial() {
            return Err(Error::domain("not a polynomial in T"));
        }
        let deg = (-self.lo).max(0) as usize;
        let mut coeffs = vec![fq.zero(); deg + 1];
        for (i, x) in self.c.iter().enumerate() {
            let e = self.lo + i as i64;
            coeffs[(-e) as usize] = *x;
        }
        Ok(Poly::from_coeffs(fq.clone(), coeffs))
    }
}

/// 2x2 matrix over F_q[T, 1/T] (row major: a b / c d).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: LPoly,
    pub b: LPoly,
    pub c: LPoly,
    pub d: LPoly,
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:?}, {:?}; {:?}, {:?}]",
            self.a, self.b, self.c, self.d
        )
    }
}

impl Mat2 {
    pub fn identity(fq: &Fq) -> Mat2 {
        Mat2 {
            a: LPoly::one(fq),
            b: LPoly::zero(),
            c: LPoly::zero(),
            d: LPoly::one(fq),
        }
    }

    /// iota = (0, 1; pi, 0), the edge-reversal coset representative.
    pub fn iota(fq: &Fq) -> Mat2 {
        Mat2 {
            a: LPoly::zero(),
            b: LPoly::one(fq),
            c: LPoly::monomial(fq, fq.one(), 1),
            d: LPoly::zero(),
        }
    }

    pub fn from_t_polys(a: &Poly<Fq>, b: &Poly<Fq>, c: &Poly<Fq>, d: &Poly<Fq>) -> Mat2 {
        Mat2 {
            a: LPoly::from_poly_t(a),
            b: LPoly::from_poly_t(b),
            c: LPoly::from_poly_t(c),
            d: LPoly::from_poly_t(d),
        }
    }

    pub fn mul(&self, fq: &Fq, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a.mul(fq, &o.a).add(fq, &self.b.mul(fq, &o.c)),
            b: self.a.mul(fq, &o.b).add(fq, &self.b.mul(fq, &o.d)),
            c: self.c.mul(fq, &o.a).add(fq, &self.d.mul(fq, &o.c)),
            d: self.c.mul(fq, &o.b).add(fq, &self.d.mul(fq, &o.d)),
        }
    }

    pub fn det(&self, fq: &Fq) -> LPoly {
        self.a.mul(fq, &self.d).sub(fq, &self.b.mul(fq, &self.c))
    }

    /// det in F_q^x, i.e. gamma in GL_2(A) when entries are T-polynomials.
    pub fn is_unit_det(&self, fq: &Fq) -> bool {
        let det = self.det(fq);
        det.val() == Some(0) && det.c.len() == 1
    }
}

/// Vertex normal form (k, u): the class of (pi^k, u; 0, 1), u reduced mod
/// pi^k O (support at exponents < k).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexNF {
    pub k: i64,
    pub u: LPoly,
}

impl fmt::Debug for VertexNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v(k={}, u={:?})", self.k, self.u)
    }
}

/// Oriented edge normal form: plus side (pi^k, u; 0, 1) or its iota twist.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeNF {
    pub iota: bool,
    pub k: i64,
    pub u: LPoly,
}

impl fmt::Debug for EdgeNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e({}k={}, u={:?})",
            if self.iota { "iota, " } else { "" },
            self.k,
            self.u
        )
    }
}

impl VertexNF {
    pub fn standard(_fq: &Fq) -> VertexNF {
        VertexNF {
            k: 0,
            u: LPoly::zero(),
        }
    }

    pub fn matrix(&self, fq: &Fq) -> Mat2 {
        Mat2 {
            a: LPoly::monomial(fq, fq.one(), self.k),
            b: self.u.clone(),
            c: LPoly::zero(),
            d: LPoly::one(fq),
        }
    }

    /// The q+1 neighbors: one down (k-1, u mod pi^{k-1}) and q up
    /// (k+1, u + c pi^k) for c in F_q.
    pub fn neighbors(&self, fq: &Fq) -> Vec<VertexNF> {
        let mut out = Vec::with_capacity(fq.order() as usize + 1);
        out.push(VertexNF {
            k: self.k - 1,
            u: self.u.truncate_above(fq, self.k - 1),
        });
        for idx in 0..fq.order() {
            let c = fq.elem_from_index(idx);
            let u = self.u.add(fq, &LPoly::monomial(fq, c, self.k));
            out.push(VertexNF { k: self.k + 1, u });
        }
        out
    }
}

impl EdgeNF {
    pub fn plus(k: i64, u: LPoly) -> EdgeNF {
        EdgeNF { iota: false, k, u }
    }

    pub fn matrix(&self, fq: &Fq) -> Mat2 {
        let base = Mat2 {
            a: LPoly::monomial(fq, fq.one(), self.k),
            b: self.u.clone(),
            c: LPoly::zero(),
            d: LPoly::one(fq),
        };
        if self.iota {
            base.mul(fq, &Mat2::iota(fq))
        } else {
            base
        }
    }

    /// Reversal: right multiplication by iota toggles the side.
    pub fn reverse(&self) -> EdgeNF {
        EdgeNF {
            iota: !self.iota,
            k: self.k,
            u: self.u.clone(),
        }
    }

    pub fn origin(&self, fq: &Fq) -> VertexNF {
        if self.iota {
            VertexNF {
                k: self.k - 1,
                u: self.u.truncate_above(fq, self.k - 1),
            }
        } else {
            VertexNF {
                k: self.k,
                u: self.u.clone(),
            }
        }
    }

    pub fn terminus(&self, fq: &Fq) -> VertexNF {
        self.reverse().origin(fq)
    }
}

/// Vertex normal form of an invertible matrix: column-reduce the lattice
/// g O^2.  With the bottom row (r, s) pivoted so v(r) <= v(s), the lattice
/// has the triangular basis ((-det/r, a_top); (0, r)), giving
/// k = v(det) - 2 v(r) and u = a_top/r mod pi^k.
pub fn vertex_normal_form(fq: &Fq, g: &Mat2) -> Result<VertexNF> {
    let det = g.det(fq);
    if det.is_zero() {
        return Err(Error::domain("singular matrix has no vertex class"));
    }
    // Pivot: bottom-left should have minimal valuation.
    let (top, bot) = {
        let vc = g.c.val();
        let vd = g.d.val();
        let swap = match (vc, vd) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x > y,
        };
        if swap {
            ((g.b.clone(), g.a.clone()), (g.d.clone(), g.c.clone()))
        } else {
            ((g.a.clone(), g.b.clone()), (g.c.clone(), g.d.clone()))
        }
    };
    let (p_top, _q_top) = top;
    let (r, _s) = bot;
    let m = r.val().expect("pivot nonzero");
    let k = det.val().unwrap() - 2 * m;
    // u = p_top / r mod pi^k, computed with an exact truncated inverse.
    let u = if p_top.is_zero() {
        LPoly::zero()
    } else {
        let vp = p_top.val().unwrap();
        let need = (k - (vp - m)).max(0) as usize;
        let rinv = r.inv_trunc(fq, need + p_top.c.len())?;
        p_top.mul(fq, &rinv).truncate_above(fq, k)
    };
    Ok(VertexNF { k, u })
}

/// Edge normal form of an invertible matrix: the ordered pair of adjacent
/// endpoint classes determines the oriented edge.
pub fn edge_normal_form(fq: &Fq, g: &Mat2) -> Result<EdgeNF> {
    let o = vertex_normal_form(fq, g)?;
    // Terminus: the class of g * columns(1, 0; 0, pi).
    let g_l1 = Mat2 {
        a: g.a.clone(),
        b: g.b.shift(1),
        c: g.c.clone(),
        d: g.d.shift(1),
    };
    let t = vertex_normal_form(fq, &g_l1)?;
    if o.k == t.k + 1 {
        debug_assert_eq!(t.u, o.u.truncate_above(fq, t.k));
        Ok(EdgeNF {
            iota: false,
            k: o.k,
            u: o.u,
        })
    } else if t.k == o.k + 1 {
        debug_assert_eq!(o.u, t.u.truncate_above(fq, o.k));
        Ok(EdgeNF {
            iota: true,
            k: t.k,
            u: t.u,
        })
    } else {
        Err(Error::domain(
            "matrix endpoints are not adjacent; invalid edge coset",
        ))
    }
}

/// Left action of gamma in GL_2(A) on an oriented edge.
pub fn act(fq: &Fq, gamma: &Mat2, e: &EdgeNF) -> Result<EdgeNF> {
    if !gamma.is_unit_det(fq) {
        return Err(Error::domain("action requires det in F_q^x (GL_2(A))"));
    }
    edge_normal_form(fq, &gamma.mul(fq, &e.matrix(fq)))
}

/// Left action on a vertex.
pub fn act_vertex(fq: &Fq, gamma: &Mat2, v: &VertexNF) -> Result<VertexNF> {
    if !gamma.is_unit_det(fq) {
        return Err(Error::domain("action requires det in F_q^x (GL_2(A))"));
    }
    vertex_normal_form(fq, &gamma.mul(fq, &v.matrix(fq)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rand_gl2o_ish(fq: &Fq, rng: &mut impl Rng) -> Mat2 {
        // A random element of GL_2(O) (unit determinant at valuation 0):
        // product of elementary matrices with O-entries.
        let mut m = Mat2::identity(fq);
        for _ in 0..6 {
            let e = rng.gen_range(0..4i64);
            let c = fq.elem_from_index(rng.gen_range(0..fq.order()));
            let x = LPoly::monomial(fq, c, e);
            let elem = if rng.gen_bool(0.5) {
                Mat2 {
                    a: LPoly::one(fq),
                    b: x,
                    c: LPoly::zero(),
                    d: LPoly::one(fq),
                }
            } else {
                Mat2 {
                    a: LPoly::one(fq),
                    b: LPoly::zero(),
                    c: x.shift(1),
                    d: LPoly::one(fq),
                }
            };
            m = m.mul(fq, &elem);
            // Occasionally scale a column by a unit.
            if rng.gen_bool(0.3) {
                let u = fq.elem_from_index(rng.gen_range(1..fq.order()));
                m.a = m.a.scale(fq, &u);
                m.c = m.c.scale(fq, &u);
            }
        }
        m
    }

    #[test]
    fn identity_is_standard_vertex() {
        let fq = Fq::prime(2).unwrap();
        let v = vertex_normal_form(&fq, &Mat2::identity(&fq)).unwrap();
        assert_eq!(v, VertexNF::standard(&fq));
    }

    #[test]
    fn figure_edge_matrices_are_normal() {
        let fq = Fq::prime(2).unwrap();
        // b_u = (pi^3, pi + u pi^2; 0, 1) is already a normal form.
        for u_val in 0..2u64 {
            let u = LPoly::from_terms(
                &fq,
                [
                    (1i64, fq.one()),
                    (2i64, fq.elem_from_index(u_val)),
                ],
            );
            let e = EdgeNF::plus(3, u.clone());
            let back = edge_normal_form(&fq, &e.matrix(&fq)).unwrap();
            assert_eq!(back, e);
            // Its origin is the vertex (3, u).
            assert_eq!(e.origin(&fq), VertexNF { k: 3, u });
        }
    }

    #[test]
    fn coset_invariance_200_trials() {
        let fq = Fq::prime(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..200 {
            let k = rng.gen_range(-2..4i64);
            let u = LPoly::from_terms(
                &fq,
                (-1..k).map(|e| (e, fq.elem_from_index(rng.gen_range(0..3)))),
            )
            .truncate_above(&fq, k);
            let v = VertexNF { k, u };
            let g = v.matrix(&fq);
            let h = rand_gl2o_ish(&fq, &mut rng);
            let scalar = LPoly::monomial(&fq, fq.elem_from_index(rng.gen_range(1..3)), rng.gen_range(-2..3));
            let gh = Mat2 {
                a: g.a.mul(&fq, &scalar),
                b: g.b.mul(&fq, &scalar),
                c: g.c.mul(&fq, &scalar),
                d: g.d.mul(&fq, &scalar),
            }
            .mul(&fq, &h);
            let nf = vertex_normal_form(&fq, &gh).unwrap();
            assert_eq!(nf, v, "trial {trial}");
        }
    }

    #[test]
    fn reverse_involution_and_endpoints() {
        let fq = Fq::prime(2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let k = rng.gen_range(-3..5i64);
            let u = LPoly::from_terms(
                &fq,
                (-2..k).map(|e| (e, fq.elem_from_index(rng.gen_range(0..2)))),
            )
            .truncate_above(&fq, k);
            let e = EdgeNF {
                iota: rng.gen_bool(0.5),
                k,
                u,
            };
            assert_eq!(e.reverse().reverse(), e);
            assert_eq!(e.reverse().origin(&fq), e.terminus(&fq));
            // Matrix route agrees with the flag toggle.
            let m = e.matrix(&fq).mul(&fq, &Mat2::iota(&fq));
            assert_eq!(edge_normal_form(&fq, &m).unwrap(), e.reverse());
        }
    }

    #[test]
    fn neighbors_structure() {
        let fq = Fq::prime(3).unwrap();
        let std = VertexNF::standard(&fq);
        let nbs = std.neighbors(&fq);
        assert_eq!(nbs.len(), 4);
        // Down neighbor (pi^-1, 0) and the q vertices (pi, c).
        assert!(nbs.contains(&VertexNF {
            k: -1,
            u: LPoly::zero()
        }));
        for idx in 0..3 {
            let c = fq.elem_from_index(idx);
            assert!(nbs.contains(&VertexNF {
                k: 1,
                u: LPoly::monomial(&fq, c, 0)
            }));
        }
        // Symmetry: w in neighbors(v) iff v in neighbors(w); and each
        // random vertex has q+1 distinct neighbors.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let k = rng.gen_range(-3..5i64);
            let u = LPoly::from_terms(
                &fq,
                (-2..k).map(|e| (e, fq.elem_from_index(rng.gen_range(0..3)))),
            )
            .truncate_above(&fq, k);
            let v = VertexNF { k, u };
            let nbs = v.neighbors(&fq);
            assert_eq!(nbs.len(), 4);
            for w in &nbs {
                assert!(w.neighbors(&fq).contains(&v));
            }
            let mut uniq = nbs.clone();
            uniq.dedup_by(|a, b| a == b);
            assert_eq!(uniq.len(), 4);
        }
    }

    #[test]
    fn action_is_group_action() {
        let fq = Fq::prime(2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rand_gamma = |rng: &mut rand_chacha::ChaCha8Rng| {
            // Random GL_2(A) element via elementary T-polynomial matrices.
            let mut m = Mat2::identity(&fq);
            for _ in 0..4 {
                let d = rng.gen_range(0..3i64);
                let x = LPoly::monomial(&fq, fq.one(), -d);
                let elem = if rng.gen_bool(0.5) {
                    Mat2 {
                        a: LPoly::one(&fq),
                        b: x,
                        c: LPoly::zero(),
                        d: LPoly::one(&fq),
                    }
                } else {
                    Mat2 {
                        a: LPoly::one(&fq),
                        b: LPoly::zero(),
                        c: x,
                        d: LPoly::one(&fq),
                    }
                };
                m = m.mul(&fq, &elem);
            }
            m
        };
        for trial in 0..100 {
            let g1 = rand_gamma(&mut rng);
            let g2 = rand_gamma(&mut rng);
            let k = rng.gen_range(-2..4i64);
            let u = LPoly::from_terms(
                &fq,
                (-2..k).map(|e| (e, fq.elem_from_index(rng.gen_range(0..2)))),
            )
            .truncate_above(&fq, k);
            let e = EdgeNF {
                iota: rng.gen_bool(0.5),
                k,
                u,
            };
            let lhs = act(&fq, &g1.mul(&fq, &g2), &e).unwrap();
            let rhs = act(&fq, &g1, &act(&fq, &g2, &e).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "associativity trial {trial}");
            // Identity acts trivially; action commutes with reversal.
            assert_eq!(act(&fq, &Mat2::identity(&fq), &e).unwrap(), e);
            assert_eq!(
                act(&fq, &g1, &e.reverse()).unwrap(),
                act(&fq, &g1, &e).unwrap().reverse()
            );
        }
    }

    #[test]
    fn upper_triangular_fixes_infinity_ray_edge() {
        // (1, b; 0, 1) with b in A fixes the deep edges of the standard
        // apartment toward [infinity] (k <= -deg b).
        let fq = Fq::prime(2).unwrap();
        let b = LPoly::from_poly_t(
            &crate::field::text::parse_poly(&fq, "T^2+1").unwrap(),
        );
        let gamma = Mat2 {
            a: LPoly::one(&fq),
            b,
            c: LPoly::zero(),
            d: LPoly::one(&fq),
        };
        let e = EdgeNF::plus(-2, LPoly::zero());
        let img = act(&fq, &gamma, &e).unwrap();
        assert_eq!(img, e);
    }

    #[test]
    fn figure_adjacency_a_inf_s_inf() {
        // a_inf = (pi^2, pi; 0, 1), s_inf = (pi, 0; 0, 1): the terminus of
        // a_inf is the origin of s_inf, and their origins are adjacent.
        let fq = Fq::prime(2).unwrap();
        let a_inf = EdgeNF::plus(2, LPoly::monomial(&fq, fq.one(), 1));
        let s_inf = EdgeNF::plus(1, LPoly::zero());
        assert_eq!(a_inf.terminus(&fq), s_inf.origin(&fq));
        assert!(a_inf
            .origin(&fq)
            .neighbors(&fq)
            .contains(&s_inf.origin(&fq)));
    }
}
