//! The non-commutative ring K{x} of F_q-linear polynomials
//! a_0 x + a_1 x^q + ... + a_n x^(q^n) under addition and composition.
//!
//! Coefficients are stored sparsely by q-power index: the images phi_a of a
//! Drinfeld module are dense, but most hand-built operands (kernel
//! polynomials, Frobenius twists) are very sparse.

use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::field::{Field, FiniteField, FqElem};
use crate::linalg::fq_kernel;

/// An F_q-linear polynomial over the coefficient field F.
#[derive(Clone)]
pub struct SkewPoly<F: Field> {
    field: F,
    /// (q-power index, coefficient), sorted by index, coefficients nonzero.
    terms: Vec<(u32, F::Elem)>,
}

impl<F: Field> PartialEq for SkewPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Field> fmt::Debug for SkewPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Skew[{}]", self.to_display())
    }
}

impl<F: Field> SkewPoly<F> {
    pub fn zero(field: F) -> Self {
        SkewPoly {
            field,
            terms: Vec::new(),
        }
    }

    /// The identity x.
    pub fn identity(field: F) -> Self {
        let one = field.one();
        SkewPoly {
            field,
            terms: vec![(0, one)],
        }
    }

    pub fn from_terms(field: F, terms: impl IntoIterator<Item = (u32, F::Elem)>) -> Self {
        let mut map: Vec<(u32, F::Elem)> = Vec::new();
        for (i, c) in terms {
            if field.is_zero(&c) {
                continue;
            }
            match map.binary_search_by_key(&i, |t| t.0) {
                Ok(pos) => {
                    let s = field.add(&map[pos].1, &c);
                    if field.is_zero(&s) {
                        map.remove(pos);
                    } else {
                        map[pos].1 = s;
                    }
                }
                Err(pos) => map.insert(pos, (i, c)),
            }
        }
        SkewPoly { field, terms: map }
    }

    /// Dense coefficient list a_0..a_n.
    pub fn dense_coeffs(&self) -> Vec<F::Elem> {
        match self.terms.last() {
            None => Vec::new(),
            Some(&(n, _)) => {
                let mut v = vec![self.field.zero(); n as usize + 1];
                for (i, c) in &self.terms {
                    v[*i as usize] = c.clone();
                }
                v
            }
        }
    }

    pub fn terms(&self) -> &[(u32, F::Elem)] {
        &self.terms
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// q-degree, or `None` for the zero polynomial.
    pub fn qdeg(&self) -> Option<u32> {
        self.terms.last().map(|t| t.0)
    }

    /// Ht(f): least index with a nonzero coefficient (f != 0).
    pub fn height(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0)
    }

    /// The derivative at 0: the coefficient of x.
    pub fn d_coeff(&self) -> F::Elem {
        match self.terms.first() {
            Some(&(0, ref c)) => c.clone(),
            _ => self.field.zero(),
        }
    }

    pub fn coeff(&self, i: u32) -> F::Elem {
        match self.terms.binary_search_by_key(&i, |t| t.0) {
            Ok(pos) => self.terms[pos].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SkewPoly::from_terms(
            self.field.clone(),
            self.terms
                .iter()
                .cloned()
                .chain(other.terms.iter().cloned()),
        )
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(i, c)| (*i, self.field.neg(c)))
            .collect::<Vec<_>>();
        SkewPoly {
            field: self.field.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Left multiplication by a constant: c * f, i.e. (cx) o f.
    pub fn scale_left(&self, c: &F::Elem) -> Self {
        SkewPoly::from_terms(
            self.field.clone(),
            self.terms
                .iter()
                .map(|(i, a)| (*i, self.field.mul(c, a))),
        )
    }

    /// Composition product (f o g)(x) = f(g(x)); the coefficient of x^(q^k)
    /// is sum over i+j = k of f_i * g_j^(q^i).
    pub fn compose(&self, g: &Self) -> Self {
        let f = &self.field;
        let mut acc: Vec<(u32, F::Elem)> = Vec::new();
        for (i, a) in &self.terms {
            // g twisted by Frobenius^i, scaled by a, shifted by i.
            for (j, b) in &g.terms {
                let mut tw = b.clone();
                for _ in 0..*i {
                    tw = f.frobenius(&tw);
                }
                acc.push((i + j, f.mul(a, &tw)));
            }
        }
        SkewPoly::from_terms(f.clone(), acc)
    }

    /// Evaluate at a point of the coefficient field.
    pub fn evaluate(&self, alpha: &F::Elem) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        let mut pow = alpha.clone(); // alpha^(q^i)
        let mut at = 0u32;
        for (i, c) in &self.terms {
            while at < *i {
                pow = f.frobenius(&pow);
                at += 1;
            }
            acc = f.add(&acc, &f.mul(c, &pow));
        }
        acc
    }

    /// Right division: f = h o g + r with qdeg r < qdeg g; h unique.
    pub fn right_divide(&self, g: &Self) -> Result<(Self, Self)> {
        if g.is_zero() {
            return Err(Error::domain("right division by the zero skew polynomial"));
        }
        let f = self.field.clone();
        let dg = g.qdeg().unwrap();
        let lead_g = g.coeff(dg);
        let mut rem = self.clone();
        let mut quot = SkewPoly::zero(f.clone());
        while let Some(dr) = rem.qdeg() {
            if dr < dg {
                break;
            }
            let k = dr - dg;
            // h_k * lead_g^(q^k) = lead_rem
            let mut lg = lead_g.clone();
            for _ in 0..k {
                lg = f.frobenius(&lg);
            }
            let hk = f.mul(&rem.coeff(dr), &f.inv(&lg)?);
            let term = SkewPoly::from_terms(f.clone(), [(k, hk)]);
            quot = quot.add(&term);
            rem = rem.sub(&term.compose(g));
        }
        Ok((quot, rem))
    }

    /// Map coefficients into another field (e.g. embed into an extension).
    pub fn map_coeffs<G: Field>(&self, g: G, map: impl Fn(&F::Elem) -> G::Elem) -> SkewPoly<G> {
        let terms = self.terms.iter().map(|(i, c)| (*i, map(c)));
        SkewPoly::from_terms(g, terms)
    }

    pub fn to_display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in &self.terms {
            let cs = self.field.fmt_elem(c);
            let x = match i {
                0 => "x".to_string(),
                1 => "x^q".to_string(),
                _ => format!("x^q{i}"),
            };
            if cs == "1" {
                parts.push(x);
            } else if cs.contains('+') || cs.contains('/') {
                parts.push(format!("({cs})*{x}"));
            } else {
                parts.push(format!("{cs}*{x}"));
            }
        }
        parts.join(" + ")
    }
}

/// Kernel linear algebra on a finite coefficient field, with a shared
/// Frobenius-power table so torsion queries over the same field reuse it.
pub struct KernelSolver<F: FiniteField> {
    field: F,
    /// powers[i][j] = basis_j^(q^i) as field elements; grown on demand.
    powers: RwLock<Vec<Vec<F::Elem>>>,
}

impl<F: FiniteField> KernelSolver<F> {
    pub fn new(field: F) -> Self {
        let dim = field.qdim();
        let basis: Vec<F::Elem> = (0..dim)
            .map(|j| {
                let coords: Vec<FqElem> = (0..dim)
                    .map(|i| {
                        if i == j {
                            field.fq().one()
                        } else {
                            field.fq().zero()
                        }
                    })
                    .collect();
                field.from_fq_coords(&coords)
            })
            .collect();
        KernelSolver {
            field,
            powers: RwLock::new(vec![basis]),
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    fn ensure_powers(&self, upto: u32) {
        let mut tab = self.powers.write().unwrap();
        while tab.len() <= upto as usize {
            let last = tab.last().unwrap();
            let next: Vec<F::Elem> = last.iter().map(|x| self.field.frobenius(x)).collect();
            tab.push(next);
        }
    }

    /// F_q-basis of the kernel {alpha : f(alpha) = 0} inside the field.
    pub fn kernel(&self, f: &SkewPoly<F>) -> Vec<F::Elem> {
        let dim = self.field.qdim();
        if f.is_zero() {
            // Everything is in the kernel.
            let tab = self.powers.read().unwrap();
            return tab[0].clone();
        }
        self.ensure_powers(f.qdeg().unwrap());
        let tab = self.powers.read().unwrap();
        // Column j of the matrix: coords of f(basis_j).
        let mut rows: Vec<Vec<FqElem>> = vec![Vec::with_capacity(dim); dim];
        for j in 0..dim {
            let mut img = self.field.zero();
            for (i, c) in f.terms() {
                img = self
                    .field
                    .add(&img, &self.field.mul(c, &tab[*i as usize][j]));
            }
            let coords = self.field.to_fq_coords(&img);
            for (r, v) in coords.into_iter().enumerate() {
                rows[r].push(v);
            }
        }
        let ker = fq_kernel(self.field.fq(), &rows, dim);
        ker.iter()
            .map(|coords| self.field.from_fq_coords(coords))
            .collect()
    }

    /// Kernel dimension over F_q.
    pub fn kernel_dim(&self, f: &SkewPoly<F>) -> usize {
        self.kernel(f).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_poly;
    use crate::field::{ExtField, Fq, RationalField};
    use rand::{Rng, SeedableRng};

    fn skew_over_f(
        ff: &RationalField,
        terms: &[(u32, &str)],
    ) -> SkewPoly<RationalField> {
        SkewPoly::from_terms(
            ff.clone(),
            terms.iter().map(|(i, s)| {
                (
                    *i,
                    crate::field::text::parse_rational(ff.fq(), s).unwrap(),
                )
            }),
        )
    }

    /// The worked composition: (Tx + x^q) o (x + Tx^(q^2))
    /// = Tx + x^q + T^2 x^(q^2) + T^q x^(q^3).
    #[test]
    fn composition_display_example() {
        for (p, e) in [(2u32, 1u32), (3, 1), (2, 2)] {
            let fq = Fq::new(p, e).unwrap();
            let q = fq.order() as u64;
            let ff = RationalField::new(fq.clone());
            let f = skew_over_f(&ff, &[(0, "T"), (1, "1")]);
            let g = skew_over_f(&ff, &[(0, "1"), (2, "T")]);
            let fg = f.compose(&g);
            let t = ff.t();
            let t2 = ff.mul(&t, &t);
            let tq = ff.pow(&t, q as u128);
            let expect = SkewPoly::from_terms(
                ff.clone(),
                [(0, t), (1, ff.one()), (2, t2), (3, tq)],
            );
            assert_eq!(fg, expect, "q = {q}");
            // Non-commutativity: the reverse order differs.
            assert_ne!(g.compose(&f), fg);
        }
    }

    #[test]
    fn compose_with_identity() {
        let fq = Fq::prime(3).unwrap();
        let ff = RationalField::new(fq);
        let f = skew_over_f(&ff, &[(0, "T+1"), (2, "T^2")]);
        let id = SkewPoly::identity(ff.clone());
        assert_eq!(f.compose(&id), f);
        assert_eq!(id.compose(&f), f);
    }

    #[test]
    fn carlitz_squared() {
        // (Tx + x^q) o (Tx + x^q) = T^2 x + (T + T^q) x^q + x^(q^2).
        let fq = Fq::prime(2).unwrap();
        let ff = RationalField::new(fq.clone());
        let c = skew_over_f(&ff, &[(0, "T"), (1, "1")]);
        let c2 = c.compose(&c);
        let expect = skew_over_f(&ff, &[(0, "T^2"), (1, "T^2+T"), (2, "1")]);
        // over F_2: T + T^q = T + T^2
        assert_eq!(c2, expect);
    }

    #[test]
    fn evaluate_linearity_and_compose() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        let t = k.gen();
        let f = SkewPoly::from_terms(k.clone(), [(0, t.clone()), (1, k.one())]);
        // f(T) = T*T + T^2 = 0 over F_2.
        use crate::field::FiniteField;
        let img = f.evaluate(&t);
        assert!(k.is_zero(&img));
        let g = SkewPoly::from_terms(k.clone(), [(0, k.one()), (1, t.clone())]);
        let fg = f.compose(&g);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = k.elem_from_index(rng.gen_range(0..k.order_u128()));
            let b = k.elem_from_index(rng.gen_range(0..k.order_u128()));
            // additivity
            assert_eq!(
                f.evaluate(&k.add(&a, &b)),
                k.add(&f.evaluate(&a), &f.evaluate(&b))
            );
            // compose compatibility
            assert_eq!(fg.evaluate(&a), f.evaluate(&g.evaluate(&a)));
        }
        assert!(k.is_zero(&f.evaluate(&k.zero())));
    }

    #[test]
    fn right_divide_roundtrip_random() {
        let fq = Fq::prime(3).unwrap();
        let p = parse_poly(&fq, "T^2+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        use crate::field::FiniteField;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let order = k.order_u128();
        for trial in 0..200 {
            let df = rng.gen_range(1..=5u32);
            let dg = rng.gen_range(1..=df);
            let rand_skew = |rng: &mut rand_chacha::ChaCha8Rng, d: u32| {
                let mut terms = Vec::new();
                for i in 0..=d {
                    terms.push((i, k.elem_from_index(rng.gen_range(0..order))));
                }
                // Force exact degree.
                terms.push((d, k.one()));
                SkewPoly::from_terms(k.clone(), terms)
            };
            let f = rand_skew(&mut rng, df);
            let g = rand_skew(&mut rng, dg);
            if g.is_zero() {
                continue;
            }
            let (h, r) = f.right_divide(&g).unwrap();
            assert!(r.qdeg().map(|d| d < g.qdeg().unwrap()).unwrap_or(true));
            assert_eq!(h.compose(&g).add(&r), f, "trial {trial}");
        }
    }

    #[test]
    fn divide_by_self() {
        let fq = Fq::prime(2).unwrap();
        let ff = RationalField::new(fq);
        let f = skew_over_f(&ff, &[(0, "T"), (1, "1"), (2, "T^2+T")]);
        let (h, r) = f.right_divide(&f).unwrap();
        assert_eq!(h, SkewPoly::identity(ff));
        assert!(r.is_zero());
    }

    #[test]
    fn height_additive_under_compose() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^2+T+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        let f = SkewPoly::from_terms(k.clone(), [(1, k.one()), (2, k.gen())]);
        let g = SkewPoly::from_terms(k.clone(), [(2, k.gen()), (3, k.one())]);
        let fg = f.compose(&g);
        assert_eq!(
            fg.height().unwrap(),
            f.height().unwrap() + g.height().unwrap()
        );
        // d is a ring homomorphism to the field.
        let d = fg.d_coeff();
        assert_eq!(d, k.mul(&f.d_coeff(), &g.d_coeff()));
    }

    #[test]
    fn kernel_of_x_is_trivial() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        let solver = KernelSolver::new(k.clone());
        let id = SkewPoly::identity(k);
        assert_eq!(solver.kernel(&id).len(), 0);
    }

    #[test]
    fn kernel_of_carlitz_t_over_f8() {
        // f = Tx + x^2 over A/(T^3+T+1): kernel of dimension 1.
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        let f = SkewPoly::from_terms(k.clone(), [(0, k.gen()), (1, k.one())]);
        let solver = KernelSolver::new(k.clone());
        let ker = solver.kernel(&f);
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(k.is_zero(&f.evaluate(v)));
        }
    }

    #[test]
    fn separable_full_kernel_in_big_extension() {
        // x^q - x (q-deg 1) has kernel F_q inside any extension.
        let fq = Fq::prime(3).unwrap();
        let p = parse_poly(&fq, "T^2+1").unwrap();
        let k = ExtField::residue_field(&p).unwrap();
        let f = SkewPoly::from_terms(
            k.clone(),
            [(0, k.neg(&k.one())), (1, k.one())],
        );
        let solver = KernelSolver::new(k.clone());
        assert_eq!(solver.kernel(&f).len(), 1);
    }
}
