//! Drinfeld modules over F = F_q(T): good reduction, reduction maps, and
//! the bounded-degree rational torsion search with reduction-based pruning.
//!
//! Reduction at a good prime l is injective on the prime-to-l part of the
//! torsion (the l-part can meet the kernel of reduction: the Carlitz point
//! T dies at l = T), so structure constraints are intersected prime
//! component by prime component over at least two distinct reduction
//! primes, and injectivity is checked jointly across the prime set.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Deg, ExtField, Field, FiniteField, Fq, Poly, RationalField, RationalFunc};
use crate::linalg::fq_kernel;

use super::{finite_field_module_structure, AField, DrinfeldModule, TorsionStructure};

/// Good reduction at the prime l: ord_l(g_i) >= 0 for all i and
/// ord_l(g_r) = 0 (model-dependent; no twist search).
pub fn good_reduction_at(phi: &DrinfeldModule<RationalField>, l: &Poly<Fq>) -> Result<bool> {
    if !l.is_monic() || !l.is_irreducible() {
        return Err(Error::domain("reduction prime must be monic irreducible"));
    }
    let r = phi.rank();
    for (i, g) in phi.coeffs().iter().enumerate() {
        if phi.field().is_zero(g) {
            continue;
        }
        let ord = g.ord_at(l)?;
        if ord < 0 {
            return Ok(false);
        }
        if i == r - 1 && ord != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reduce the module at a good prime; refuses with a diagnostic otherwise.
pub fn reduce_at(
    phi: &DrinfeldModule<RationalField>,
    l: &Poly<Fq>,
) -> Result<DrinfeldModule<ExtField<Fq>>> {
    if !good_reduction_at(phi, l)? {
        return Err(Error::domain(format!(
            "bad reduction at {}: some ord_l(g_i) < 0 or ord_l(g_r) > 0",
            l.to_string_with_var("T")
        )));
    }
    let base = AField::residue(l)?;
    let k = base.field().clone();
    let coeffs = phi
        .coeffs()
        .iter()
        .map(|g| reduce_rational(&k, g, l))
        .collect::<Result<Vec<_>>>()?;
    DrinfeldModule::new(base, coeffs)
}

/// Image of x in A/l for x with ord_l(x) >= 0.
pub fn reduce_rational(
    k: &ExtField<Fq>,
    x: &RationalFunc,
    l: &Poly<Fq>,
) -> Result<Vec<crate::field::FqElem>> {
    if x.is_zero() {
        return Ok(k.zero());
    }
    if x.ord_at(l)? < 0 {
        return Err(Error::domain("negative valuation at the reduction prime"));
    }
    let num = k.from_base_poly(x.num());
    let den = k.from_base_poly(x.den());
    Ok(k.mul(&num, &k.inv(&den)?))
}

/// Report of a bounded rational torsion search.
#[derive(Clone, Debug, Serialize)]
pub struct RationalTorsionReport {
    pub module: String,
    pub annihilator: String,
    pub points: Vec<String>,
    pub structure: Vec<String>,
    pub certified_bound: i64,
    pub primes_used: Vec<String>,
    /// deg m + deg n observed on the structure (reported, never asserted).
    pub degree_sum: i64,
}

/// Outcome of the search with exact data attached.
pub struct RationalTorsion {
    pub points: Vec<RationalFunc>,
    pub structure: TorsionStructure,
    pub annihilator: Poly<Fq>,
    pub primes_used: Vec<Poly<Fq>>,
    pub bound: i64,
}

impl RationalTorsion {
    pub fn report(&self, phi: &DrinfeldModule<RationalField>) -> RationalTorsionReport {
        let desc: Vec<String> = phi.coeffs().iter().map(|g| g.to_display()).collect();
        RationalTorsionReport {
            module: format!("g = [{}]", desc.join(", ")),
            annihilator: self.annihilator.to_string_with_var("T"),
            points: self.points.iter().map(|p| p.to_display()).collect(),
            structure: self
                .structure
                .divisors
                .iter()
                .map(|d| d.to_string_with_var("T"))
                .collect(),
            certified_bound: self.bound,
            primes_used: self
                .primes_used
                .iter()
                .map(|p| p.to_string_with_var("T"))
                .collect(),
            degree_sum: self
                .structure
                .divisors
                .iter()
                .map(|d| d.deg().finite().unwrap_or(0))
                .sum(),
        }
    }
}

/// Per-prime exponent partitions (descending) of a divisor chain.
fn partitions_of(structure: &TorsionStructure) -> Result<BTreeMap<Poly<Fq>, Vec<u32>>> {
    let mut out: BTreeMap<Poly<Fq>, Vec<u32>> = BTreeMap::new();
    let mut desc = structure.divisors.clone();
    desc.reverse();
    for (slot, d) in desc.iter().enumerate() {
        for (p, e) in d.factor()? {
            let v = out.entry(p).or_default();
            if v.len() <= slot {
                v.resize(slot + 1, 0);
            }
            v[slot] = e;
        }
    }
    Ok(out)
}

/// Rational torsion search: (i) reductions at up to `prime_budget` good
/// primes bound the structure from above; (ii) candidates alpha in F with
/// numerator/denominator degree <= bound are certified by exact evaluation
/// phi_a(alpha) = 0 for a the annihilator bound from (i) (or the supplied
/// `restrict_to`, which confines the search to phi[a](F)).  The certified
/// points are closed under addition and phi_T and their A-module structure
/// is returned.  Completeness holds within the stated degree bound only.
pub fn rational_torsion_search(
    phi: &DrinfeldModule<RationalField>,
    bound: Option<i64>,
    prime_budget: usize,
    restrict_to: Option<&Poly<Fq>>,
) -> Result<RationalTorsion> {
    let fq = phi.field().fq().clone();
    let ff = phi.field().clone();
    // (i) reductions at good primes.
    let budget = prime_budget.max(2);
    let mut primes_used: Vec<Poly<Fq>> = Vec::new();
    let mut reduction_parts: Vec<(Poly<Fq>, BTreeMap<Poly<Fq>, Vec<u32>>)> = Vec::new();
    let mut d = 1usize;
    while primes_used.len() < budget && d <= 6 {
        for l in crate::field::enumerate_monic_irreducibles(&fq, d) {
            if primes_used.len() >= budget {
                break;
            }
            if !good_reduction_at(phi, &l)? {
                continue;
            }
            let red = reduce_at(phi, &l)?;
            let s = finite_field_module_structure(&red)?;
            reduction_parts.push((l.clone(), partitions_of(&s)?));
            primes_used.push(l);
        }
        d += 1;
    }
    if primes_used.len() < 2 {
        return Err(Error::domain(
            "fewer than two good-reduction primes found within the budget",
        ));
    }
    // Intersect constraints per prime component q, using only reductions at
    // primes l != q.
    let mut all_primes: Vec<Poly<Fq>> = Vec::new();
    for (_, parts) in &reduction_parts {
        for p in parts.keys() {
            if !all_primes.contains(p) {
                all_primes.push(p.clone());
            }
        }
    }
    let mut bound_parts: BTreeMap<Poly<Fq>, Vec<u32>> = BTreeMap::new();
    for qp in &all_primes {
        let mut acc: Option<Vec<u32>> = None;
        for (l, parts) in &reduction_parts {
            if l == qp {
                continue;
            }
            let part = parts.get(qp).cloned().unwrap_or_default();
            acc = Some(match acc {
                None => part,
                Some(prev) => prev
                    .iter()
                    .zip(part.iter().chain(std::iter::repeat(&0)))
                    .map(|(a, b)| *a.min(b))
                    .collect(),
            });
        }
        let acc = acc.ok_or_else(|| {
            Error::domain(format!(
                "no reduction prime different from {} available; raise the budget",
                qp.to_string_with_var("T")
            ))
        })?;
        let acc: Vec<u32> = acc.into_iter().take_while(|&e| e > 0).collect();
        if !acc.is_empty() {
            bound_parts.insert(qp.clone(), acc);
        }
    }
    let mut annihilator = Poly::one(fq.clone());
    for (p, part) in &bound_parts {
        annihilator = annihilator.mul(&p.pow(part[0] as u64));
    }
    // Optional restriction to phi[a].
    let cert = match restrict_to {
        Some(a) => {
            let mut g = Poly::one(fq.clone());
            for (p, e) in a.factor()? {
                let from_bound = bound_parts.get(&p).map(|v| v[0]).unwrap_or(0);
                g = g.mul(&p.pow(e.min(from_bound) as u64));
            }
            g
        }
        None => annihilator.clone(),
    };
    // (ii) bounded enumeration.
    let bound = bound.unwrap_or_else(|| {
        let da = cert.deg().finite().unwrap_or(0);
        (2 * da * phi.rank() as i64).max(1)
    });
    let phi_cert = phi.phi_a(&cert);
    let mut points: Vec<RationalFunc> = vec![ff.zero()];
    if cert.deg() > Deg::Fin(0) {
        let q = fq.order() as u128;
        for dd in 0..=bound {
            for den_idx in 0..q.pow(dd as u32) {
                let den = Poly::monic_from_index(&fq, dd as usize, den_idx);
                for num_idx in 1..q.pow(bound as u32 + 1) {
                    let num = poly_from_index(&fq, num_idx, bound as usize);
                    if !num.gcd(&den).is_one() {
                        continue;
                    }
                    let alpha = RationalFunc::new(num, den.clone())?;
                    if ff.is_zero(&phi_cert.evaluate(&alpha)) {
                        points.push(alpha);
                    }
                }
            }
        }
    }
    // Close under addition and phi_T (results remain torsion).
    let phi_t = phi.phi_t();
    loop {
        let mut new_points = Vec::new();
        for x in &points {
            let y = phi_t.evaluate(x);
            if !points.contains(&y) && !new_points.contains(&y) {
                new_points.push(y);
            }
        }
        for i in 0..points.len() {
            for j in i..points.len() {
                let s = ff.add(&points[i], &points[j]);
                if !points.contains(&s) && !new_points.contains(&s) {
                    new_points.push(s);
                }
            }
        }
        if new_points.is_empty() {
            break;
        }
        points.extend(new_points);
    }
    // Joint injectivity across the used primes: distinct certified points
    // must differ at some good prime.
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let mut separated = false;
            for l in &primes_used {
                let k = ExtField::residue_field(l)?;
                let a = reduce_rational(&k, &points[i], l)?;
                let b = reduce_rational(&k, &points[j], l)?;
                if a != b {
                    separated = true;
                    break;
                }
            }
            if !separated {
                return Err(Error::domain(
                    "two distinct certified points agree at every reduction prime",
                ));
            }
        }
    }
    let structure = span_structure(phi, &points)?;
    Ok(RationalTorsion {
        points,
        structure,
        annihilator,
        primes_used,
        bound,
    })
}

fn poly_from_index(fq: &Fq, mut idx: u128, max_deg: usize) -> Poly<Fq> {
    let q = fq.order() as u128;
    let mut coeffs = Vec::with_capacity(max_deg + 1);
    for _ in 0..=max_deg {
        coeffs.push(fq.elem_from_index((idx % q) as u64));
        idx /= q;
    }
    Poly::from_coeffs(fq.clone(), coeffs)
}

/// A-module structure of the F_q-span of a finite phi-stable set of points:
/// invariant factors of T*I - M for M the matrix of phi_T on the span.
fn span_structure(
    phi: &DrinfeldModule<RationalField>,
    points: &[RationalFunc],
) -> Result<TorsionStructure> {
    let fq = phi.field().fq().clone();
    let nonzero: Vec<&RationalFunc> = points.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(TorsionStructure::trivial());
    }
    // Common denominator and coefficient coordinates.
    let mut den = Poly::one(fq.clone());
    for p in &nonzero {
        let g = den.gcd(p.den());
        den = den.mul(&p.den().divmod(&g)?.0);
    }
    let coords = |x: &RationalFunc| -> Result<Vec<crate::field::FqElem>> {
        let scaled = x.num().mul(&den.divmod(x.den())?.0);
        Ok(scaled.coeffs().to_vec())
    };
    let width = 1 + nonzero
        .iter()
        .map(|p| (p.num().deg().finite().unwrap_or(0) + den.deg().finite().unwrap_or(0)) as usize)
        .max()
        .unwrap_or(0);
    let pad = |mut v: Vec<crate::field::FqElem>| {
        v.resize(width, fq.zero());
        v
    };
    // Greedy F_q-basis from the point list.
    let mut basis_pts: Vec<RationalFunc> = Vec::new();
    let mut basis_rows: Vec<Vec<crate::field::FqElem>> = Vec::new();
    for p in &nonzero {
        let v = pad(coords(p)?);
        if solve_in_basis(&fq, &basis_rows, &v).is_none() {
            basis_rows.push(v);
            basis_pts.push((*p).clone());
        }
    }
    let k = basis_pts.len();
    // Matrix of phi_T on the span, column per basis point.
    let phi_t = phi.phi_t();
    let mut m_cols: Vec<Vec<crate::field::FqElem>> = Vec::with_capacity(k);
    for b in &basis_pts {
        let img = phi_t.evaluate(b);
        let v = pad(coords(&img)?);
        let sol = solve_in_basis(&fq, &basis_rows, &v)
            .ok_or_else(|| Error::domain("phi_T image leaves the span of certified points"))?;
        m_cols.push(sol);
    }
    // Invariant factors of T*I - M.
    let t = Poly::var(fq.clone());
    let rows: Vec<Vec<Poly<Fq>>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mij = Poly::constant(fq.clone(), m_cols[j][i]);
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
    let divisors = invariants
        .into_iter()
        .filter(|f| f.deg() > Deg::Fin(0))
        .collect();
    Ok(TorsionStructure { divisors })
}

/// Express v as an F_q-combination of the rows, if possible.
fn solve_in_basis(
    fq: &Fq,
    rows: &[Vec<crate::field::FqElem>],
    v: &[crate::field::FqElem],
) -> Option<Vec<crate::field::FqElem>> {
    if rows.is_empty() {
        return if v.iter().all(|c| fq.is_zero(c)) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let n = v.len();
    let k = rows.len();
    // Unknowns (x_0..x_{k-1}, s): kernel vectors with s != 0 give solutions
    // of sum x_i rows[i] = v after scaling.
    let mut sys_rows: Vec<Vec<crate::field::FqElem>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(k + 1);
        for r in rows {
            row.push(r[j]);
        }
        row.push(fq.neg(&v[j]));
        sys_rows.push(row);
    }
    let ker = fq_kernel(fq, &sys_rows, k + 1);
    for vec in ker {
        let s = vec[k];
        if !fq.is_zero(&s) {
            let sinv = fq.inv(&s).ok()?;
            return Some(vec[..k].iter().map(|x| fq.mul(x, &sinv)).collect());
        }
    }
    None
}

/// Poonen-style full-level module: phi_T(x) = T x prod over nonzero v in V
/// of (1 - x/v) for the F_q-subspace V of F spanned by `basis`; phi[T]
/// contains V by construction.
pub fn full_level_module(
    fq: &Fq,
    basis: &[RationalFunc],
) -> Result<DrinfeldModule<RationalField>> {
    let ff = RationalField::new(fq.clone());
    let q = fq.order() as u128;
    // e_V(x) = x prod (1 - x/v), built by the kernel-extension chain
    // e' = e - e(w)^(1-q) e^q, which keeps the x-coefficient 1 and extends
    // the kernel by w.
    let mut e = crate::skew::SkewPoly::identity(ff.clone());
    for w in basis {
        if ff.is_zero(w) {
            return Err(Error::domain("subspace basis contains zero"));
        }
        let ew = e.evaluate(w);
        if ff.is_zero(&ew) {
            return Err(Error::domain("subspace basis is F_q-dependent"));
        }
        let scale = ff.inv(&ff.pow(&ew, q - 1))?;
        let frob = crate::skew::SkewPoly::from_terms(ff.clone(), [(1u32, ff.one())]);
        let frob_part = frob.compose(&e).scale_left(&scale);
        e = e.sub(&frob_part);
    }
    let phi_t = e.scale_left(&ff.t());
    let r = basis.len();
    let g: Vec<RationalFunc> = (1..=r as u32).map(|i| phi_t.coeff(i)).collect();
    DrinfeldModule::new(AField::rational(fq), g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::{parse_poly, parse_rational};

    #[test]
    fn carlitz_good_everywhere() {
        let fq = Fq::prime(2).unwrap();
        let phi = DrinfeldModule::carlitz(AField::rational(&fq));
        for d in 1..=3 {
            for l in crate::field::enumerate_monic_irreducibles(&fq, d) {
                assert!(good_reduction_at(&phi, &l).unwrap());
            }
        }
    }

    #[test]
    fn bad_reduction_detected() {
        let fq = Fq::prime(2).unwrap();
        let ff = RationalField::new(fq.clone());
        let l = parse_poly(&fq, "T^2+T+1").unwrap();
        let g2 = parse_rational(&fq, "1/(T^2+T+1)").unwrap();
        let phi = DrinfeldModule::new(AField::rational(&fq), vec![ff.one(), g2]).unwrap();
        assert!(!good_reduction_at(&phi, &l).unwrap());
        assert!(reduce_at(&phi, &l).is_err());
        // The target of reduction has exactly |l| points.
        let good = parse_poly(&fq, "T").unwrap();
        let red = reduce_at(&phi, &good).unwrap();
        let s = finite_field_module_structure(&red).unwrap();
        assert!(s.point_count() <= good.abs_norm());
    }

    #[test]
    fn carlitz_t_torsion_is_zero_and_t() {
        let fq = Fq::prime(2).unwrap();
        let phi = DrinfeldModule::carlitz(AField::rational(&fq));
        let t_poly = parse_poly(&fq, "T").unwrap();
        let found = rational_torsion_search(&phi, Some(2), 3, Some(&t_poly)).unwrap();
        let t = parse_rational(&fq, "T").unwrap();
        assert_eq!(found.points.len(), 2);
        assert!(found.points.contains(&t));
        assert_eq!(found.structure.divisors, vec![t_poly]);
    }

    #[test]
    fn carlitz_full_torsion_q2() {
        // The full rational torsion of the Carlitz module at q = 2 is
        // {0, 1, T, T+1} of structure A/(T^2+T).
        let fq = Fq::prime(2).unwrap();
        let phi = DrinfeldModule::carlitz(AField::rational(&fq));
        let found = rational_torsion_search(&phi, Some(2), 3, None).unwrap();
        assert_eq!(found.points.len(), 4);
        assert_eq!(
            found.structure.divisors,
            vec![parse_poly(&fq, "T^2+T").unwrap()]
        );
    }

    #[test]
    fn poonen_full_level_rank2() {
        let fq = Fq::prime(2).unwrap();
        let one = parse_rational(&fq, "1").unwrap();
        let t = parse_rational(&fq, "T").unwrap();
        let phi = full_level_module(&fq, &[one.clone(), t.clone()]).unwrap();
        assert_eq!(phi.rank(), 2);
        let ff = phi.field().clone();
        let phi_t = phi.phi_t();
        for v in [ff.zero(), one.clone(), t.clone(), ff.add(&one, &t)] {
            assert!(ff.is_zero(&phi_t.evaluate(&v)), "{}", v.to_display());
        }
        let t_poly = parse_poly(&fq, "T").unwrap();
        let found = rational_torsion_search(&phi, Some(1), 3, Some(&t_poly)).unwrap();
        // Structure contains (A/T)^2.
        let want = TorsionStructure {
            divisors: vec![t_poly.clone(), t_poly],
        };
        assert!(want.divides_into(&found.structure));
    }
}
