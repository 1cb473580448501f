//! Truncated analytic theory over F_oo: Eisenstein lattice sums, the
//! exponential-coefficient recursions (lattice-side and module-side), the
//! Carlitz period, and functional-equation verification.
//!
//! Every truncated value carries its precision certificate: the horizon of
//! the returned series is the minimum of the arithmetic horizon and the
//! valuation of the first omitted tail term.  Assertions downstream compare
//! certified coefficients only.

use crate::error::{Error, Result};
use crate::field::{Deg, Field, Fq, LaurentField, LaurentSeries, Poly};
use crate::skew::SkewPoly;

/// A rank-1 lattice cA in F_oo.  The generator may be known only through
/// its (q-1)-th power (the Carlitz period is defined up to F_q^x and is
/// handled exclusively through pi_C^(q-1)); in that case only weights
/// divisible by q-1 are available, which covers every Eisenstein index
/// q^n - 1 used by the coefficient recursion.
#[derive(Clone, Debug)]
pub enum LatticeRank1 {
    /// The lattice cA with c given exactly.
    Exact(LaurentSeries),
    /// The lattice cA with c^(q-1) given.
    PowQm1(LaurentSeries),
}

impl LatticeRank1 {
    /// c^(-n) for the homogeneity rescaling; errors if only c^(q-1) is known
    /// and (q-1) does not divide n.
    fn gen_power_neg(&self, n: i64, q: i64) -> Result<LaurentSeries> {
        match self {
            LatticeRank1::Exact(c) => {
                if c.is_zero_within_prec() {
                    return Err(Error::domain("lattice generator is zero within precision"));
                }
                c.pow(-n)
            }
            LatticeRank1::PowQm1(cq) => {
                if cq.is_zero_within_prec() {
                    return Err(Error::domain(
                        "lattice generator power is zero within precision",
                    ));
                }
                if n % (q - 1) != 0 {
                    return Err(Error::domain(format!(
                        "lattice generator known only through its (q-1)-th power; \
                         weight {n} is not divisible by q-1 = {}",
                        q - 1
                    )));
                }
                cq.pow(-n / (q - 1))
            }
        }
    }
}

/// Partial Eisenstein sum E_n(Lambda) = sum over nonzero lambda of
/// lambda^(-n), truncated at deg a <= D for Lambda = cA.
///
/// Summing a fixed degree d over the F_q^x-multiples of monic a gives
/// (sum of xi^(-n)) * (monic sum), which is -1 times the monic sum when
/// (q-1) | n and 0 otherwise; the series converges in F_oo exactly in the
/// former case.  The precision certificate is the valuation of the first
/// omitted term, capped by the working precision.
pub fn eisenstein_sum(
    fq: &Fq,
    lattice: &LatticeRank1,
    n: i64,
    trunc_degree: i64,
    work_prec: i64,
) -> Result<LaurentSeries> {
    if n < 1 {
        return Err(Error::domain("Eisenstein weight must be >= 1"));
    }
    let q = fq.order() as i64;
    let scale = lattice.gen_power_neg(n, q)?;
    let monic = monic_power_sum(fq, -n, trunc_degree, work_prec)?;
    let unit_factor: i64 = if n % (q - 1) == 0 { -1 } else { 0 };
    let mut sum = match unit_factor {
        0 => LaurentSeries::zero(fq.clone(), work_prec),
        _ => monic.neg(),
    };
    sum = sum.mul(&scale);
    // Certificate: first omitted term lambda = c*a with deg a = D+1 has
    // valuation n(D+1) + n*v(c) = n(D+1) - v(scale)... v(scale) = -n*v(c).
    let v_scale = scale.valuation().unwrap_or(0);
    let cert = (n * (trunc_degree + 1) + v_scale).min(sum.precision());
    Ok(clamp_precision(sum, cert))
}

fn clamp_precision(s: LaurentSeries, prec: i64) -> LaurentSeries {
    if prec >= s.precision() {
        return s;
    }
    let fq = s.fq().clone();
    let coeffs: Vec<_> = s.terms().into_iter().filter(|(e, _)| *e < prec).collect();
    let val = coeffs.first().map(|(e, _)| *e).unwrap_or(prec);
    let mut window = vec![fq.zero(); (prec - val).max(0) as usize];
    for (e, c) in coeffs {
        window[(e - val) as usize] = c;
    }
    LaurentSeries::new(fq, val, window, prec)
}

/// sum over monic a with deg a <= D of a^k (k may be negative), expanded at
/// infinity with the given working precision, in graded-lex order.
fn monic_power_sum(fq: &Fq, k: i64, max_deg: i64, work_prec: i64) -> Result<LaurentSeries> {
    let mut acc = LaurentSeries::zero(fq.clone(), work_prec);
    for d in 0..=max_deg.max(0) {
        for a in Poly::monic_of_degree(fq, d as usize) {
            let s = LaurentSeries::from_poly(&a, work_prec + k.unsigned_abs() as i64 * (d + 1));
            acc = acc.add(&s.pow(k)?);
        }
    }
    Ok(clamp_precision(acc, work_prec))
}

/// Coefficients e_0 = 1, e_1, ..., e_N of the lattice exponential via the
/// Eisenstein recursion e_n = E_{q^n-1} + sum_{i=1}^{n-1} e_i E_{q^{n-i}-1}^{q^i}.
pub fn exp_coeffs_from_eisenstein(
    fq: &Fq,
    lattice: &LatticeRank1,
    n_max: u32,
    trunc_degree: i64,
    work_prec: i64,
) -> Result<Vec<LaurentSeries>> {
    let q = fq.order() as i64;
    let mut e: Vec<LaurentSeries> = vec![LaurentSeries::one(fq.clone(), work_prec)];
    for n in 1..=n_max {
        let mut en = eisenstein_sum(fq, lattice, q.pow(n) - 1, trunc_degree, work_prec)?;
        for i in 1..n {
            let weight = q.pow(n - i) - 1;
            let ei_pow =
                eisenstein_sum(fq, lattice, weight, trunc_degree, work_prec)?.pow(q.pow(i))?;
            en = en.add(&e[i as usize].mul(&ei_pow));
        }
        if en.precision() <= en.valuation().unwrap_or(en.precision()) {
            return Err(Error::precision(format!(
                "exponential coefficient e_{n} has no certified terms; \
                 raise the working precision or truncation degree"
            )));
        }
        e.push(en);
    }
    Ok(e)
}

/// Exponential coefficients from the module side: the recursion
/// (T^{q^n} - T) e_n = e_{n-1}^q g_1 + ... + e_{n-r}^{q^r} g_r with e_0 = 1,
/// over any coefficient field where t^{q^n} != t for all n used (zero
/// A-characteristic).
pub fn exp_coeffs_from_phi<F: Field>(
    field: &F,
    t: &F::Elem,
    g: &[F::Elem],
    n_max: u32,
) -> Result<Vec<F::Elem>> {
    let q = field.q() as u128;
    let mut e: Vec<F::Elem> = vec![field.one()];
    for n in 1..=n_max {
        let tqn = field.pow(t, q.pow(n));
        let denom = field.sub(&tqn, t);
        if field.is_zero(&denom) {
            return Err(Error::domain(format!(
                "t^(q^{n}) = t: base has positive A-characteristic, \
                 the exponential recursion divisor vanishes"
            )));
        }
        let mut rhs = field.zero();
        for (i, gi) in g.iter().enumerate() {
            let i = i as u32 + 1;
            if i > n {
                break;
            }
            let prev = &e[(n - i) as usize];
            let tw = field.pow(prev, q.pow(i));
            rhs = field.add(&rhs, &field.mul(&tw, gi));
        }
        e.push(field.mul(&rhs, &field.inv(&denom)?));
    }
    Ok(e)
}

/// -(T^q - T) * sum over monic a with deg a <= D of a^(1-q), an
/// approximation of pi_C^(q-1) with tail certificate; the leading valuation
/// is -q, i.e. |pi_C^(q-1)| = q^q.
pub fn carlitz_period_power(fq: &Fq, trunc_degree: i64, work_prec: i64) -> Result<LaurentSeries> {
    if trunc_degree < 1 {
        return Err(Error::domain("truncation degree must be >= 1"));
    }
    let q = fq.order() as i64;
    let sum = monic_power_sum(fq, 1 - q, trunc_degree, work_prec)?;
    // -(T^q - T) = T - T^q.
    let lf = LaurentField::new(fq.clone(), work_prec);
    let t = lf.t();
    let tq = t.pow(q)?;
    let factor = t.sub(&tq);
    let out = factor.mul(&sum);
    // First omitted term: a of degree D+1 contributes valuation
    // (q-1)(D+1) - q after the factor.
    let cert = ((q - 1) * (trunc_degree + 1) - q).min(out.precision());
    Ok(clamp_precision(out, cert))
}

/// Truncated exponential e(x) = sum e_n x^(q^n) with coefficients in F.
#[derive(Clone, Debug)]
pub struct ExpSeries<F: Field> {
    pub field: F,
    pub coeffs: Vec<F::Elem>,
}

impl<F: Field> ExpSeries<F> {
    pub fn new(field: F, coeffs: Vec<F::Elem>) -> Self {
        ExpSeries { field, coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Check e(Tx) = phi_T(e(x)) through x^(q^N), coefficientwise: index n holds
/// iff e_n * t^(q^n) equals sum_{i=0..r} g_i e_{n-i}^(q^i) (g_0 = t).
/// Returns the first failing index, or None if all n <= N pass.
pub fn functional_equation_first_failure<F: Field>(
    field: &F,
    t: &F::Elem,
    g: &[F::Elem],
    e: &ExpSeries<F>,
    n_max: u32,
) -> Option<u32> {
    let q = field.q() as u128;
    for n in 0..=n_max {
        if n as usize >= e.coeffs.len() {
            return Some(n);
        }
        let en = &e.coeffs[n as usize];
        let tqn = field.pow(t, q.pow(n));
        let lhs = field.mul(en, &tqn);
        let mut rhs = field.mul(t, en);
        for (i, gi) in g.iter().enumerate() {
            let i = i as u32 + 1;
            if i > n {
                break;
            }
            let tw = field.pow(&e.coeffs[(n - i) as usize], q.pow(i));
            rhs = field.add(&rhs, &field.mul(gi, &tw));
        }
        if lhs != rhs {
            return Some(n);
        }
    }
    None
}

/// Convenience wrapper returning a boolean.
pub fn functional_equation_check<F: Field>(
    field: &F,
    t: &F::Elem,
    g: &[F::Elem],
    e: &ExpSeries<F>,
    n_max: u32,
) -> bool {
    functional_equation_first_failure(field, t, g, e, n_max).is_none()
}

/// phi_T as a skew polynomial from (t, g_1..g_r).
pub fn phi_t_skew<F: Field>(field: &F, t: &F::Elem, g: &[F::Elem]) -> SkewPoly<F> {
    let mut terms = vec![(0u32, t.clone())];
    for (i, gi) in g.iter().enumerate() {
        terms.push((i as u32 + 1, gi.clone()));
    }
    SkewPoly::from_terms(field.clone(), terms)
}

/// The products (T^{q^n}-T)(T^{q^n}-T^q)...(T^{q^n}-T^{q^{n-1}}).  The
/// recursion forces e_n = 1/(this product) for the Carlitz module, which is
/// what [`exp_coeffs_from_phi`] returns; the reciprocal relation is verified
/// in the tests.
pub fn carlitz_coeff_denominator(
    field: &crate::field::RationalField,
    n: u32,
) -> crate::field::RationalFunc {
    let q = field.q() as u128;
    let t = field.t();
    let tqn = field.pow(&t, q.pow(n));
    let mut prod = field.one();
    for i in 0..n {
        let tqi = field.pow(&t, q.pow(i));
        prod = field.mul(&prod, &field.sub(&tqn, &tqi));
    }
    prod
}

/// Valuation of the degree-d slice of an Eisenstein sum (the increment from
/// D = d-1 to D = d); used to check the Cauchy property of partial sums.
pub fn eisenstein_increment_valuation(
    fq: &Fq,
    n: i64,
    d: i64,
    work_prec: i64,
) -> Result<Option<i64>> {
    let q = fq.order() as i64;
    if n % (q - 1) != 0 {
        return Ok(None);
    }
    let mut inc = LaurentSeries::zero(fq.clone(), work_prec);
    for a in Poly::monic_of_degree(fq, d as usize) {
        let s = LaurentSeries::from_poly(&a, work_prec + n * (d + 1));
        inc = inc.add(&s.pow(-n)?);
    }
    Ok(inc.valuation())
}

/// deg in T of a polynomial (re-export for CLI convenience).
pub fn poly_deg(p: &Poly<Fq>) -> Deg {
    p.deg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_rational;
    use crate::field::RationalField;
    use rand::{Rng, SeedableRng};

    #[test]
    fn eisenstein_degree_zero_term_is_minus_one() {
        // E_{q-1}(A) truncated at D = 0: sum over F_q^x of c^(1-q) = q-1 = -1.
        for p in [2u32, 3, 5] {
            let fq = Fq::prime(p).unwrap();
            let lat = LatticeRank1::Exact(LaurentSeries::one(fq.clone(), 40));
            let s = eisenstein_sum(&fq, &lat, p as i64 - 1, 0, 40).unwrap();
            assert_eq!(s.valuation(), Some(0));
            assert_eq!(s.coeff_at(0).unwrap(), fq.from_int(-1));
        }
    }

    #[test]
    fn eisenstein_homogeneity() {
        // E_n(cA) = c^(-n) E_n(A).
        let fq = Fq::prime(3).unwrap();
        let prec = 40;
        let c = LaurentSeries::pi_power(fq.clone(), 2, prec); // c = pi^2
        let unit = LatticeRank1::Exact(LaurentSeries::one(fq.clone(), prec));
        let scaled = LatticeRank1::Exact(c.clone());
        let n = 4; // q-1 = 2 divides 4
        let e_unit = eisenstein_sum(&fq, &unit, n, 3, prec).unwrap();
        let e_scaled = eisenstein_sum(&fq, &scaled, n, 3, prec).unwrap();
        let expect = e_unit.mul(&c.pow(-n).unwrap());
        assert!(e_scaled.agrees_with(&expect).unwrap());
    }

    #[test]
    fn eisenstein_tail_valuations_grow() {
        let fq = Fq::prime(2).unwrap();
        let mut last = i64::MIN;
        for d in 0..5 {
            let v = eisenstein_increment_valuation(&fq, 1, d, 60)
                .unwrap()
                .expect("nonzero increment");
            assert!(v > last, "valuation at degree {d} should grow");
            last = v;
        }
    }

    #[test]
    fn carlitz_period_leading_valuation() {
        for p in [2u32, 3] {
            let fq = Fq::prime(p).unwrap();
            let s = carlitz_period_power(&fq, 4, 60).unwrap();
            assert_eq!(s.valuation(), Some(-(p as i64)), "q = {p}");
        }
    }

    #[test]
    fn carlitz_period_stable_d6_d8() {
        let fq = Fq::prime(2).unwrap();
        let a = carlitz_period_power(&fq, 6, 80).unwrap();
        let b = carlitz_period_power(&fq, 8, 80).unwrap();
        assert!(a.agrees_with(&b).unwrap());
        assert!(a.precision() >= 3, "certificate too weak");
    }

    #[test]
    fn carlitz_exp_coeffs_match_product_formula() {
        // e_1 = 1/(T^q - T) and e_n * D_n = 1 for n <= 3.
        let fq = Fq::prime(2).unwrap();
        let ff = RationalField::new(fq.clone());
        let t = ff.t();
        let e = exp_coeffs_from_phi(&ff, &t, &[ff.one()], 3).unwrap();
        for n in 1..=3u32 {
            let denom = carlitz_coeff_denominator(&ff, n);
            let prod = ff.mul(&e[n as usize], &denom);
            assert_eq!(prod, ff.one(), "e_{n} * D_{n} = 1");
        }
    }

    #[test]
    fn rank2_unit_coeff_recursion() {
        // g_1 = g_2 = 1: e_1 = 1/(T^q-T), e_2 = (e_1^q + 1)/(T^{q^2}-T).
        let fq = Fq::prime(3).unwrap();
        let ff = RationalField::new(fq.clone());
        let t = ff.t();
        let one = ff.one();
        let e = exp_coeffs_from_phi(&ff, &t, &[one.clone(), one.clone()], 2).unwrap();
        let q = 3u128;
        let tq = ff.pow(&t, q);
        let e1 = ff.inv(&ff.sub(&tq, &t)).unwrap();
        assert_eq!(e[1], e1);
        let tq2 = ff.pow(&t, q * q);
        let e2 = ff.mul(
            &ff.add(&ff.pow(&e1, q), &one),
            &ff.inv(&ff.sub(&tq2, &t)).unwrap(),
        );
        assert_eq!(e[2], e2);
    }

    #[test]
    fn functional_equation_and_mutation() {
        let fq = Fq::prime(2).unwrap();
        let ff = RationalField::new(fq.clone());
        let t = ff.t();
        // Carlitz.
        let g = vec![ff.one()];
        let e = ExpSeries::new(ff.clone(), exp_coeffs_from_phi(&ff, &t, &g, 4).unwrap());
        assert!(functional_equation_check(&ff, &t, &g, &e, 4));
        // Perturb e_2 by 1: fails exactly at index 2.
        let mut bad = e.clone();
        bad.coeffs[2] = ff.add(&bad.coeffs[2], &ff.one());
        assert_eq!(
            functional_equation_first_failure(&ff, &t, &g, &bad, 4),
            Some(2)
        );
        // Random rank-2 modules.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let rand_g = |rng: &mut rand_chacha::ChaCha8Rng| {
                let n = rng.gen_range(0..4u32);
                let d = rng.gen_range(0..3u32);
                parse_rational(&fq, &format!("(T^{}+{})/(T^{}+T+1)", n + 1, n % 2, d + 2)).unwrap()
            };
            let g2 = vec![rand_g(&mut rng), rand_g(&mut rng)];
            if ff.is_zero(&g2[1]) {
                continue;
            }
            let e2 = ExpSeries::new(ff.clone(), exp_coeffs_from_phi(&ff, &t, &g2, 4).unwrap());
            assert!(functional_equation_check(&ff, &t, &g2, &e2, 4));
        }
    }

    #[test]
    fn cross_oracle_lattice_vs_module() {
        // The Carlitz lattice pi_C A: e_n(Lambda) computed from Eisenstein
        // sums (through pi_C^(q-1)) must match the module recursion's exact
        // rational values within certified precision, n <= 2.
        for p in [2u32, 3] {
            let fq = Fq::prime(p).unwrap();
            let prec = 70;
            let pi_pow = carlitz_period_power(&fq, 9, prec).unwrap();
            let lat = LatticeRank1::PowQm1(pi_pow);
            let e_lat = exp_coeffs_from_eisenstein(&fq, &lat, 2, 7, prec).unwrap();
            let ff = RationalField::new(fq.clone());
            let t = ff.t();
            let e_mod = exp_coeffs_from_phi(&ff, &t, &[ff.one()], 2).unwrap();
            for (n, e_lat_n) in e_lat.iter().enumerate() {
                let exact = LaurentSeries::from_rational(&e_mod[n], prec);
                assert!(
                    e_lat_n.agrees_with(&exact).unwrap(),
                    "q = {p}, n = {n}: {} vs {}",
                    e_lat_n.to_display(),
                    exact.to_display()
                );
            }
        }
    }
}
