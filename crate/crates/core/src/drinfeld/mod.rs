//! Drinfeld A-modules over an A-field: phi_a expansion, height, torsion
//! module structure, j-invariants and isomorphism testing, isogeny
//! factorization, and the explicit rank-2 modular-curve relations.

mod modcurve;
mod rational;
pub mod symbolic;

pub use modcurve::{
    cyclic_kernel_for_alpha, universal_x0t_symbolic_check, x0_product_relation, X0RelationReport,
};
pub use rational::{
    good_reduction_at, rational_torsion_search, reduce_at, RationalTorsionReport,
};

use crate::error::{Error, Result};
use crate::field::{Deg, ExtField, Field, FiniteField, Fq, Poly};
use crate::skew::{KernelSolver, SkewPoly};

/// An A-field: a field K with an F_q-algebra map gamma: A -> K, recorded by
/// t = gamma(T) and the A-characteristic ker(gamma) (zero or a prime of A).
#[derive(Clone, Debug)]
pub struct AField<K: Field> {
    field: K,
    t: K::Elem,
    char_prime: Option<Poly<Fq>>,
}

impl<K: Field> AField<K> {
    /// A-field of zero A-characteristic (gamma injective).
    pub fn generic(field: K, t: K::Elem) -> Self {
        AField {
            field,
            t,
            char_prime: None,
        }
    }

    /// A-field of characteristic p (a prime of A); checks p(t) = 0.
    pub fn finite_char(field: K, t: K::Elem, p: Poly<Fq>) -> Result<Self> {
        if !p.is_monic() {
            return Err(Error::domain("A-characteristic must be monic"));
        }
        let img = p.eval_in(&field, |c| field.embed_fq(c), &t);
        if !field.is_zero(&img) {
            return Err(Error::domain(
                "gamma does not kill the claimed A-characteristic: p(t) != 0",
            ));
        }
        Ok(AField {
            field,
            t,
            char_prime: Some(p),
        })
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn t(&self) -> &K::Elem {
        &self.t
    }

    pub fn char_prime(&self) -> Option<&Poly<Fq>> {
        self.char_prime.as_ref()
    }

    /// gamma(a) = a(t).
    pub fn gamma(&self, a: &Poly<Fq>) -> K::Elem {
        a.eval_in(&self.field, |c| self.field.embed_fq(c), &self.t)
    }
}

impl AField<ExtField<Fq>> {
    /// The residue A-field A/p with t the class of T.
    pub fn residue(p: &Poly<Fq>) -> Result<Self> {
        let k = ExtField::residue_field(p)?;
        let t = k.gen();
        AField::finite_char(k, t, p.monic())
    }
}

impl AField<crate::field::RationalField> {
    /// F itself with gamma the inclusion.
    pub fn rational(fq: &Fq) -> Self {
        let field = crate::field::RationalField::new(fq.clone());
        let t = field.t();
        AField::generic(field, t)
    }
}

/// A Drinfeld module of rank r: phi_T = t x + g_1 x^q + ... + g_r x^(q^r),
/// g_r != 0.
#[derive(Clone, Debug)]
pub struct DrinfeldModule<K: Field> {
    base: AField<K>,
    coeffs: Vec<K::Elem>,
}

impl<K: Field> DrinfeldModule<K> {
    pub fn new(base: AField<K>, coeffs: Vec<K::Elem>) -> Result<Self> {
        match coeffs.last() {
            Some(gr) if !base.field.is_zero(gr) => Ok(DrinfeldModule { base, coeffs }),
            _ => Err(Error::domain(
                "rank-r Drinfeld module needs g_r != 0 (got zero leading coefficient)",
            )),
        }
    }

    /// The Carlitz module C_T = t x + x^q.
    pub fn carlitz(base: AField<K>) -> Self {
        let one = base.field.one();
        DrinfeldModule {
            base,
            coeffs: vec![one],
        }
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn base(&self) -> &AField<K> {
        &self.base
    }

    pub fn field(&self) -> &K {
        &self.base.field
    }

    pub fn coeffs(&self) -> &[K::Elem] {
        &self.coeffs
    }

    pub fn phi_t(&self) -> SkewPoly<K> {
        let mut terms = vec![(0u32, self.base.t.clone())];
        for (i, g) in self.coeffs.iter().enumerate() {
            terms.push((i as u32 + 1, g.clone()));
        }
        SkewPoly::from_terms(self.base.field.clone(), terms)
    }

    /// phi_a for arbitrary a, via the F_q-algebra map on T-digits:
    /// phi_{sum c_d T^d} = sum c_d phi_T^(compose d).
    pub fn phi_a(&self, a: &Poly<Fq>) -> SkewPoly<K> {
        let f = &self.base.field;
        let phi_t = self.phi_t();
        let mut acc = SkewPoly::zero(f.clone());
        let mut power = SkewPoly::identity(f.clone());
        for (d, c) in a.coeffs().iter().enumerate() {
            if d > 0 {
                power = phi_t.compose(&power);
            }
            if !a.field().is_zero(c) {
                acc = acc.add(&power.scale_left(&f.embed_fq(c)));
            }
        }
        acc
    }

    /// H(phi) = Ht(phi_p)/deg p for p the A-characteristic; domain error in
    /// zero characteristic.
    pub fn height(&self) -> Result<u32> {
        let p = self.base.char_prime().ok_or_else(|| {
            Error::domain("height is defined only in finite A-characteristic")
        })?;
        let d = p.deg().finite().unwrap() as u32;
        let ht = self
            .phi_a(p)
            .height()
            .ok_or_else(|| Error::domain("phi_p = 0 is impossible"))?;
        if ht % d != 0 {
            return Err(Error::domain(format!(
                "Ht(phi_p) = {ht} not divisible by deg p = {d}; inconsistent module"
            )));
        }
        Ok(ht / d)
    }

    /// j-invariant g_1^(q+1)/g_2 of a rank-2 module.
    pub fn j_invariant(&self) -> Result<K::Elem> {
        if self.rank() != 2 {
            return Err(Error::domain("j-invariant requires rank 2"));
        }
        let f = &self.base.field;
        let q = f.q() as u128;
        let g1 = &self.coeffs[0];
        let g2 = &self.coeffs[1];
        Ok(f.mul(&f.pow(g1, q + 1), &f.inv(g2)?))
    }

    /// Twist by c: the isomorphic module with g_i' = g_i c^(q^i - 1).
    pub fn twist(&self, c: &K::Elem) -> Result<Self> {
        let f = &self.base.field;
        if f.is_zero(c) {
            return Err(Error::domain("twist by zero"));
        }
        let q = f.q() as u128;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let e = q.pow(i as u32 + 1) - 1;
                f.mul(g, &f.pow(c, e))
            })
            .collect();
        DrinfeldModule::new(self.base.clone(), coeffs)
    }
}

/// An isogeny witness u with u o phi_T = psi_T o u.
#[derive(Clone, Debug)]
pub struct IsogenyWitness<K: Field> {
    pub u: SkewPoly<K>,
    pub source: DrinfeldModule<K>,
    pub target: DrinfeldModule<K>,
}

impl<K: Field> IsogenyWitness<K> {
    /// Check the defining commutation for a supplied a (it follows for all
    /// a once it holds for T, since T generates A).
    pub fn commutes_for(&self, a: &Poly<Fq>) -> bool {
        let lhs = self.u.compose(&self.source.phi_a(a));
        let rhs = self.target.phi_a(a).compose(&self.u);
        lhs == rhs
    }
}

/// Quotient by a finite phi-stable kernel given by a separable skew
/// polynomial: returns psi with psi_T o kernel = kernel o phi_T.
pub fn factor_isogeny<K: Field>(
    phi: &DrinfeldModule<K>,
    kernel: &SkewPoly<K>,
) -> Result<(DrinfeldModule<K>, IsogenyWitness<K>)> {
    let f = phi.field().clone();
    if kernel.is_zero() {
        return Err(Error::domain("kernel polynomial must be nonzero"));
    }
    if f.is_zero(&kernel.d_coeff()) {
        return Err(Error::domain(
            "kernel polynomial is inseparable (vanishing derivative)",
        ));
    }
    let (psi_t, rem) = kernel.compose(&phi.phi_t()).right_divide(kernel)?;
    if !rem.is_zero() {
        return Err(Error::domain(format!(
            "kernel is not a phi-submodule: right division leaves remainder {}",
            rem.to_display()
        )));
    }
    // psi_T has the same d-coefficient t and the same q-degree.
    debug_assert_eq!(psi_t.d_coeff(), *phi.base.t());
    let r = phi.rank();
    let coeffs: Vec<K::Elem> = (1..=r as u32).map(|i| psi_t.coeff(i)).collect();
    let psi = DrinfeldModule::new(phi.base.clone(), coeffs)?;
    let witness = IsogenyWitness {
        u: kernel.clone(),
        source: phi.clone(),
        target: psi.clone(),
    };
    Ok((psi, witness))
}

/// Isomorphism testing over the base field K (finite case: exhaustive search
/// for the twisting constant).
pub fn is_isomorphic_over<K: FiniteField>(
    phi: &DrinfeldModule<K>,
    psi: &DrinfeldModule<K>,
) -> Result<Option<K::Elem>> {
    if phi.rank() != psi.rank() {
        return Ok(None);
    }
    let f = phi.field().clone();
    if phi.base.t() != psi.base.t() {
        return Err(Error::domain("modules over different A-field structures"));
    }
    let q = f.q() as u128;
    let r = phi.rank();
    'outer: for idx in 1..f.order_u128() {
        let c = f.elem_from_index(idx);
        for i in 1..=r {
            let e = q.pow(i as u32) - 1;
            let want = f.mul(&psi.coeffs[i - 1], &f.pow(&c, e));
            if want != phi.coeffs[i - 1] {
                continue 'outer;
            }
        }
        return Ok(Some(c));
    }
    Ok(None)
}

/// Isomorphism over the algebraic closure: rank 1 always, rank 2 iff the
/// j-invariants agree.
pub fn is_isomorphic_closure<K: Field>(
    phi: &DrinfeldModule<K>,
    psi: &DrinfeldModule<K>,
) -> Result<bool> {
    if phi.rank() != psi.rank() {
        return Ok(false);
    }
    match phi.rank() {
        1 => Ok(true),
        2 => Ok(phi.j_invariant()? == psi.j_invariant()?),
        r => Err(Error::domain(format!(
            "closure isomorphism test implemented for ranks 1 and 2 only (got {r})"
        ))),
    }
}

/// The elementary divisor chain of a finite torsion module:
/// d_1 | d_2 | ... | d_s, monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionStructure {
    pub divisors: Vec<Poly<Fq>>,
}

impl TorsionStructure {
    pub fn trivial() -> Self {
        TorsionStructure {
            divisors: Vec::new(),
        }
    }

    pub fn point_count(&self) -> u128 {
        self.divisors.iter().map(|d| d.abs_norm()).product()
    }

    pub fn describe(&self) -> String {
        if self.divisors.is_empty() {
            return "0".into();
        }
        self.divisors
            .iter()
            .map(|d| format!("A/({})", d.to_string_with_var("T")))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Does other embed into self elementwise (for reduction constraints)?
    pub fn divides_into(&self, other: &TorsionStructure) -> bool {
        let mut mine: Vec<&Poly<Fq>> = self.divisors.iter().collect();
        let mut theirs: Vec<&Poly<Fq>> = other.divisors.iter().collect();
        mine.reverse();
        theirs.reverse();
        if mine.len() > theirs.len() {
            return false;
        }
        mine.iter().zip(theirs.iter()).all(|(m, t)| m.divides(t))
    }
}

/// Compute phi[a] over the algebraic closure as an A-module, by kernel
/// dimensions of phi_{p^i} in incrementally grown splitting extensions.
///
/// `ext_cap` bounds the extension degree scan; exceeding it is an explicit
/// "insufficient extension" error.
pub fn torsion_module<K: FiniteField>(
    phi: &DrinfeldModule<K>,
    a: &Poly<Fq>,
    ext_cap: usize,
) -> Result<TorsionStructure> {
    if a.is_zero() {
        return Err(Error::domain("torsion of a = 0 is the whole field"));
    }
    if a.deg() == Deg::Fin(0) {
        return Ok(TorsionStructure::trivial());
    }
    let height = match phi.base.char_prime() {
        Some(_) => phi.height()?,
        None => 0,
    };
    let r = phi.rank() as u32;
    let mut per_prime: Vec<(Poly<Fq>, Vec<u32>)> = Vec::new();
    for (p, s) in a.factor()? {
        let dp = p.deg().finite().unwrap() as u32;
        let is_char = phi
            .base
            .char_prime()
            .map(|cp| *cp == p.monic())
            .unwrap_or(false);
        let rk = if is_char { r - height } else { r };
        // Kernel dimension targets over F_q.
        let target: Vec<usize> = (1..=s).map(|i| (rk * i * dp) as usize).collect();
        if rk == 0 {
            per_prime.push((p, vec![0; s as usize]));
            continue;
        }
        // phi_{p^i} over K, lifted into the splitting extension.
        let phi_p = phi.phi_a(&p);
        let mut powers = Vec::with_capacity(s as usize);
        let mut cur = phi_p.clone();
        for _ in 0..s {
            powers.push(cur.clone());
            cur = phi_p.compose(&cur);
        }
        let mut dims: Option<Vec<usize>> = None;
        for m in 1..=ext_cap {
            let ext = ExtField::extension_of(phi.field().clone(), m)?;
            let solver = KernelSolver::new(ext.clone());
            let lifted: Vec<_> = powers
                .iter()
                .map(|f| f.map_coeffs(ext.clone(), |c| ext.embed_base(c)))
                .collect();
            let got: Vec<usize> = lifted.iter().map(|f| solver.kernel_dim(f)).collect();
            if got == target {
                dims = Some(got);
                break;
            }
        }
        let dims = dims.ok_or_else(|| {
            Error::depth(format!(
                "insufficient extension: kernel of phi_{{{}^{s}}} did not saturate \
                 within extension degree {ext_cap}",
                p.to_string_with_var("T")
            ))
        })?;
        // Multiplicities m_i = (dims_i - dims_{i-1})/deg p = #{j : e_j >= i};
        // the exponent partition is the conjugate.
        let mut mults = Vec::with_capacity(s as usize);
        let mut prev = 0usize;
        for d in &dims {
            mults.push(((d - prev) / dp as usize) as u32);
            prev = *d;
        }
        let mut exps = Vec::new();
        let m1 = mults.first().copied().unwrap_or(0);
        for j in 1..=m1 {
            let e = mults.iter().filter(|&&mi| mi >= j).count() as u32;
            exps.push(e);
        }
        // exps is descending.
        per_prime.push((p, exps));
    }
    // Merge across primes into one divisibility chain (largest first).
    let width = per_prime
        .iter()
        .map(|(_, e)| e.len())
        .max()
        .unwrap_or(0);
    let fq = a.field().clone();
    let mut chain: Vec<Poly<Fq>> = Vec::new();
    for k in 0..width {
        let mut d = Poly::one(fq.clone());
        for (p, exps) in &per_prime {
            if let Some(&e) = exps.get(k) {
                d = d.mul(&p.pow(e as u64));
            }
        }
        if !d.is_one() {
            chain.push(d);
        }
    }
    chain.reverse();
    Ok(TorsionStructure { divisors: chain })
}

/// The A-module structure of the whole finite A-field K under phi: the
/// invariant factors of T*I - M where M is the matrix of phi_T on K as an
/// F_q-space.  This is the target of reduction maps on rational torsion.
pub fn finite_field_module_structure<K: FiniteField>(
    phi: &DrinfeldModule<K>,
) -> Result<TorsionStructure> {
    let f = phi.field().clone();
    let fq = f.fq().clone();
    let n = f.qdim();
    let phi_t = phi.phi_t();
    // Columns: images of basis vectors.
    let mut cols: Vec<Vec<crate::field::FqElem>> = Vec::with_capacity(n);
    for j in 0..n {
        let coords: Vec<crate::field::FqElem> = (0..n)
            .map(|i| if i == j { fq.one() } else { fq.zero() })
            .collect();
        let bj = f.from_fq_coords(&coords);
        cols.push(f.to_fq_coords(&phi_t.evaluate(&bj)));
    }
    // T*I - M as a polynomial matrix (rows over F_q[T]).
    let t = Poly::var(fq.clone());
    let rows: Vec<Vec<Poly<Fq>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mij = Poly::constant(fq.clone(), cols[j][i]);
                    if i == j {
                        t.sub(&mij)
                    } else {
                        mij.neg()
                    }
                })
                .collect()
        })
        .collect();
    let invariants = crate::linalg::poly_snf_invariants(&rows)?;
    let divisors: Vec<Poly<Fq>> = invariants
        .into_iter()
        .filter(|d| d.deg() > Deg::Fin(0))
        .collect();
    Ok(TorsionStructure { divisors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_poly;
    use crate::field::RationalField;
    use rand::{Rng, SeedableRng};

    fn carlitz_over_f(fq: &Fq) -> DrinfeldModule<RationalField> {
        DrinfeldModule::carlitz(AField::rational(fq))
    }

    #[test]
    fn phi_t_squared_is_phi_t2() {
        let fq = Fq::prime(2).unwrap();
        let c = carlitz_over_f(&fq);
        let t2 = parse_poly(&fq, "T^2").unwrap();
        let direct = c.phi_a(&t2);
        let composed = c.phi_t().compose(&c.phi_t());
        assert_eq!(direct, composed);
    }

    #[test]
    fn phi_constant_is_scalar() {
        let fq = Fq::prime(3).unwrap();
        let c = carlitz_over_f(&fq);
        let two = parse_poly(&fq, "2").unwrap();
        let phi2 = c.phi_a(&two);
        assert_eq!(phi2.qdeg(), Some(0));
        let ff = c.field().clone();
        assert_eq!(phi2.d_coeff(), ff.embed_fq(&fq.from_int(2)));
    }

    #[test]
    fn homomorphism_property_random() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let k = base.field().clone();
        let phi = DrinfeldModule::new(base, vec![k.gen(), k.one()]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = Poly::monic_from_index(&fq, rng.gen_range(0..3), rng.gen_range(0..8));
            let b = Poly::monic_from_index(&fq, rng.gen_range(0..3), rng.gen_range(0..8));
            assert_eq!(phi.phi_a(&a.add(&b)), phi.phi_a(&a).add(&phi.phi_a(&b)));
            assert_eq!(
                phi.phi_a(&a.mul(&b)),
                phi.phi_a(&a).compose(&phi.phi_a(&b))
            );
            // d(phi_a) = gamma(a), qdeg = r deg a.
            let pa = phi.phi_a(&a);
            assert_eq!(pa.d_coeff(), phi.base().gamma(&a));
            assert_eq!(
                pa.qdeg(),
                Some(2 * a.deg().finite().unwrap() as u32)
            );
        }
    }

    #[test]
    fn height_of_frobenius_module_is_two() {
        // K = F_{q^2}, gamma: A -> A/(T), phi_T = x^(q^2): H = 2.
        let fq = Fq::prime(3).unwrap();
        let t_poly = parse_poly(&fq, "T").unwrap();
        let k = ExtField::extension_of(fq.clone(), 2).unwrap();
        let base = AField::finite_char(k.clone(), k.zero(), t_poly).unwrap();
        let phi = DrinfeldModule::new(base, vec![k.zero(), k.one()]).unwrap();
        assert_eq!(phi.height().unwrap(), 2);
    }

    #[test]
    fn height_of_reduced_carlitz_is_one() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let phi = DrinfeldModule::carlitz(base);
        assert_eq!(phi.height().unwrap(), 1);
    }

    #[test]
    fn height_scaling_identity() {
        // Ht(phi_a) = H * ord_p(a) * deg(p) for several a.
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^2+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let k = base.field().clone();
        let phi = DrinfeldModule::new(base, vec![k.gen(), k.one()]).unwrap();
        let h = phi.height().unwrap();
        for (a_str, ord) in [("T^2+T+1", 1), ("T^4+T^2+1", 2), ("T^3+T", 0)] {
            let a = parse_poly(&fq, a_str).unwrap();
            let expect = h * ord * 2;
            assert_eq!(phi.phi_a(&a).height().unwrap(), expect, "a = {a_str}");
        }
    }

    #[test]
    fn torsion_prime_to_char() {
        // Carlitz over A/(T^3+T+1), a = T: structure A/T (rank 1).
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let phi = DrinfeldModule::carlitz(base);
        let t = parse_poly(&fq, "T").unwrap();
        let s = torsion_module(&phi, &t, 24).unwrap();
        assert_eq!(s.divisors.len(), 1);
        assert_eq!(s.divisors[0], t);
    }

    #[test]
    fn torsion_at_char_prime_rank2() {
        // a = char prime p, rank 2, H = 1: structure A/p.
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^2+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let k = base.field().clone();
        let phi = DrinfeldModule::new(base, vec![k.one(), k.gen()]).unwrap();
        assert_eq!(phi.height().unwrap(), 1);
        let s = torsion_module(&phi, &p, 24).unwrap();
        assert_eq!(s.divisors, vec![p]);
    }

    #[test]
    fn j_invariant_and_twists() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let k = base.field().clone();
        let phi = DrinfeldModule::new(base.clone(), vec![k.one(), k.one()]).unwrap();
        assert_eq!(phi.j_invariant().unwrap(), k.one());
        use crate::field::FiniteField;
        for idx in 1..k.order_u128() {
            let c = k.elem_from_index(idx);
            let tw = phi.twist(&c).unwrap();
            assert_eq!(tw.j_invariant().unwrap(), phi.j_invariant().unwrap());
            // And the twist is detected as isomorphic over K.
            let witness = is_isomorphic_over(&tw, &phi).unwrap();
            assert!(witness.is_some());
        }
    }

    #[test]
    fn rank1_isomorphic_over_degree_qm1_extension() {
        // Rank-1 modules become isomorphic over K((g1/h1)^(1/(q-1))).
        let fq = Fq::prime(3).unwrap();
        let p = parse_poly(&fq, "T^2+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let k = base.field().clone();
        use crate::field::FiniteField;
        let phi = DrinfeldModule::new(base.clone(), vec![k.elem_from_index(5)]).unwrap();
        let psi = DrinfeldModule::new(base.clone(), vec![k.elem_from_index(7)]).unwrap();
        // Not isomorphic over K in general; over the degree-(q-1) extension
        // a witness must exist.
        let q = fq.order() as usize;
        let ext = ExtField::extension_of(k.clone(), q - 1).unwrap();
        let lift = |m: &DrinfeldModule<ResidueFieldAlias>| {
            let t = ext.embed_base(m.base().t());
            let af = AField::generic(ext.clone(), t);
            DrinfeldModule::new(
                af,
                m.coeffs().iter().map(|g| ext.embed_base(g)).collect(),
            )
            .unwrap()
        };
        type ResidueFieldAlias = ExtField<Fq>;
        let witness = is_isomorphic_over(&lift(&phi), &lift(&psi)).unwrap();
        assert!(witness.is_some());
    }

    #[test]
    fn factor_isogeny_trivial_kernel() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let k = base.field().clone();
        let phi = DrinfeldModule::new(base, vec![k.one(), k.gen()]).unwrap();
        let id = SkewPoly::identity(k.clone());
        let (psi, w) = factor_isogeny(&phi, &id).unwrap();
        assert_eq!(psi.coeffs(), phi.coeffs());
        assert!(w.commutes_for(&parse_poly(&fq, "T").unwrap()));
    }

    #[test]
    fn torsion_counts_match_norms() {
        // #phi[a] = |a|^r away from the characteristic.
        let fq = Fq::prime(3).unwrap();
        let p = parse_poly(&fq, "T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let k = base.field().clone();
        let phi = DrinfeldModule::new(base, vec![k.one(), k.one()]).unwrap();
        let a = parse_poly(&fq, "T").unwrap();
        let s = torsion_module(&phi, &a, 24).unwrap();
        assert_eq!(s.point_count(), 9); // |T|^2 = q^2 = 9
        assert_eq!(s.divisors.len(), 2);
    }

    #[test]
    fn finite_module_structure_total_size() {
        let fq = Fq::prime(2).unwrap();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let base = AField::residue(&p).unwrap();
        let phi = DrinfeldModule::carlitz(base);
        let s = finite_field_module_structure(&phi).unwrap();
        assert_eq!(s.point_count(), 8);
    }
}
