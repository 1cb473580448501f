//! Harmonic 1-cochains on Gamma_0(n)\T, Hecke operators via the explicit
//! upper-triangular coset set S_m, the Eisenstein cochain (by its Hecke
//! eigencharacterization), Fourier coefficients, the mu-weighted pairing,
//! and finite-part L-polynomials.
//!
//! Values are exact rationals; integer bases are extracted by saturation
//! (Smith normal form), so the Z-module structure downstream (Eisenstein
//! ideal indices) is computed on honest lattices.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Fq, FqElem, Poly};
use crate::linalg::{saturate_columns, QMat, ZMat};
use crate::tree::quotient::edge_between;
use crate::tree::{EdgeNF, LPoly, Mat2, QuotientGraph};

fn big(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn qpow(q: u64, e: i64) -> BigRational {
    let base = BigRational::from(BigInt::from(q));
    if e >= 0 {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= &base;
        }
        acc
    } else {
        qpow(q, -e).recip()
    }
}

/// A harmonic cochain: one exact rational per stored oriented edge class
/// (antisymmetry holds classwise), with geometric ray tails implied by the
/// stored values.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub graph: Arc<QuotientGraph>,
    pub values: Vec<BigRational>,
}

impl Cochain {
    pub fn value(&self, class: usize) -> &BigRational {
        &self.values[class]
    }

    /// Value on an arbitrary oriented edge (reduced into the quotient).
    pub fn eval(&self, e: &EdgeNF) -> Result<BigRational> {
        let c = self.graph.reduce_edge(e)?;
        Ok(self.values[c].clone())
    }

    /// Eventually-geometric tail data for a ray: the value on the first
    /// outward edge and the outward ratio (from the last stored step).
    pub fn ray_tail(&self, ray: usize) -> (BigRational, BigRational) {
        let r = &self.graph.rays[ray];
        let first = self.values[r.out_edges[0]].clone();
        let n = r.out_edges.len();
        let ratio = if n >= 2 && !self.values[r.out_edges[n - 2]].is_zero() {
            &self.values[r.out_edges[n - 1]] / &self.values[r.out_edges[n - 2]]
        } else {
            big(self.graph.fq.order() as i64)
        };
        (first, ratio)
    }

    /// Compact support as a function on the quotient: all ray tails vanish.
    pub fn is_cuspidal(&self) -> bool {
        self.graph
            .rays
            .iter()
            .all(|r| r.out_edges.iter().all(|&e| self.values[e].is_zero()))
    }

    pub fn scale(&self, c: &BigRational) -> Cochain {
        Cochain {
            graph: Arc::clone(&self.graph),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        Cochain {
            graph: Arc::clone(&self.graph),
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        Cochain {
            graph: Arc::clone(&self.graph),
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Check both harmonicity axioms on a lift: antisymmetry per class pair
    /// and vertex sums at every fully-explored vertex class.
    pub fn verify_harmonic(&self) -> Result<()> {
        let g = &self.graph;
        for (i, e) in g.edges.iter().enumerate() {
            let rev = e.reversal;
            if self.values[i] != -self.values[rev].clone() {
                return Err(Error::domain(format!(
                    "antisymmetry fails on edge class {i}"
                )));
            }
        }
        for vi in complete_vertices(g) {
            let rep = g.vertices[vi].rep.clone();
            let mut sum = BigRational::zero();
            for nb in rep.neighbors(&g.fq) {
                let enf = edge_between(&g.fq, &rep, &nb)?;
                let cls = g.reduce_edge(&enf)?;
                sum += &self.values[cls];
            }
            if !sum.is_zero() {
                return Err(Error::domain(format!("vertex sum fails at class {vi}")));
            }
        }
        Ok(())
    }
}

/// Vertex classes whose full q+1 neighborhood reduces inside storage.
fn complete_vertices(g: &QuotientGraph) -> Vec<usize> {
    (0..g.vertices.len())
        .filter(|&vi| {
            let rep = &g.vertices[vi].rep;
            rep.neighbors(&g.fq).iter().all(|nb| {
                edge_between(&g.fq, rep, nb)
                    .and_then(|e| g.reduce_edge(&e))
                    .is_ok()
            })
        })
        .collect()
}

/// The full and cuspidal harmonic spaces with saturated integer bases, and
/// the evaluation data used to express Hecke images in coordinates.
pub struct HarmonicSpace {
    pub graph: Arc<QuotientGraph>,
    /// Saturated integer basis of H(n, Z), as value vectors per edge class.
    pub full_basis: Vec<Vec<BigInt>>,
    /// Saturated integer basis of H_0(n, Z).
    pub cusp_basis: Vec<Vec<BigInt>>,
    eval_edges: Vec<usize>,
    eval_full: QMat,
    eval_cusp: QMat,
}

impl HarmonicSpace {
    pub fn new(graph: Arc<QuotientGraph>) -> Result<HarmonicSpace> {
        let g = &graph;
        let ne = g.edges.len();
        // Constraint rows over Q: antisymmetry f(e) + f(rev e) = 0 and the
        // vertex sums at fully-explored vertex classes, assembled from
        // lifts (fold multiplicities are counted automatically).
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for (i, e) in g.edges.iter().enumerate() {
            if i < e.reversal {
                let mut row = vec![BigRational::zero(); ne];
                row[i] += BigRational::one();
                row[e.reversal] += BigRational::one();
                rows.push(row);
            }
        }
        for vi in complete_vertices(g) {
            let rep = g.vertices[vi].rep.clone();
            let mut row = vec![BigRational::zero(); ne];
            for nb in rep.neighbors(&g.fq) {
                let enf = edge_between(&g.fq, &rep, &nb)?;
                let cls = g.reduce_edge(&enf)?;
                row[cls] += BigRational::one();
            }
            rows.push(row);
        }
        let mut full_mat = QMat::from_rows(rows.clone());
        full_mat.cols = ne;
        let full_q = full_mat.kernel();
        // Cuspidal: additionally kill the first outward edge of each ray
        // (the geometric recursion then kills the whole tail).
        let mut crows = rows;
        for r in &g.rays {
            let mut row = vec![BigRational::zero(); ne];
            row[r.out_edges[0]] = BigRational::one();
            crows.push(row);
        }
        let cusp_q = QMat::from_rows(crows).kernel();
        let full_basis = saturate_value_vectors(ne, &full_q);
        let cusp_basis = saturate_value_vectors(ne, &cusp_q);
        // Evaluation edges: the finite part plus the first two outward
        // edges of each ray (both orientations); values there determine
        // the cochain.
        let mut eval_edges: Vec<usize> = g.finite_edges();
        for r in &g.rays {
            for &e in r.out_edges.iter().take(2) {
                eval_edges.push(e);
                eval_edges.push(g.edges[e].reversal);
            }
        }
        eval_edges.sort_unstable();
        eval_edges.dedup();
        let eval_full = eval_matrix(&eval_edges, &full_basis);
        let eval_cusp = eval_matrix(&eval_edges, &cusp_basis);
        Ok(HarmonicSpace {
            graph,
            full_basis,
            cusp_basis,
            eval_edges,
            eval_full,
            eval_cusp,
        })
    }

    pub fn full_rank(&self) -> usize {
        self.full_basis.len()
    }

    pub fn cusp_rank(&self) -> usize {
        self.cusp_basis.len()
    }

    pub fn basis_cochain(&self, cuspidal: bool, i: usize) -> Cochain {
        let b = if cuspidal {
            &self.cusp_basis[i]
        } else {
            &self.full_basis[i]
        };
        Cochain {
            graph: Arc::clone(&self.graph),
            values: b.iter().map(|x| BigRational::from(x.clone())).collect(),
        }
    }

    pub fn from_full_coords(&self, coords: &[BigRational]) -> Cochain {
        let ne = self.graph.edges.len();
        let mut values = vec![BigRational::zero(); ne];
        for (c, b) in coords.iter().zip(self.full_basis.iter()) {
            for (v, x) in values.iter_mut().zip(b.iter()) {
                *v += c * BigRational::from(x.clone());
            }
        }
        Cochain {
            graph: Arc::clone(&self.graph),
            values,
        }
    }

    /// Coordinates of a cochain in the chosen basis, via the evaluation
    /// edges; errors if the values are not in the span.
    pub fn coords_of(&self, f: &Cochain, cuspidal: bool) -> Result<Vec<BigRational>> {
        let m = if cuspidal {
            &self.eval_cusp
        } else {
            &self.eval_full
        };
        let b: Vec<BigRational> = self
            .eval_edges
            .iter()
            .map(|&e| f.values[e].clone())
            .collect();
        m.solve(&b)
            .ok_or_else(|| Error::domain("cochain is not in the harmonic span"))
    }

    /// f|T_m = sum over g in S_m of f(g e), computed on the evaluation
    /// edges and re-expanded through the full harmonic basis (the exact
    /// solve doubles as a consistency check).
    pub fn hecke_apply(&self, f: &Cochain, m: &Poly<Fq>) -> Result<Cochain> {
        let g = &self.graph;
        let reps = hecke_coset_reps(&g.level, m)?;
        let mut vals = vec![BigRational::zero(); self.eval_edges.len()];
        for (slot, &ecls) in self.eval_edges.iter().enumerate() {
            let enf = g.edges[ecls].rep.clone();
            for rep in &reps {
                let image = crate::tree::act(&g.fq, rep, &enf)?;
                let cls = g.reduce_edge(&image)?;
                vals[slot] += &f.values[cls];
            }
        }
        let x = self
            .eval_full
            .solve(&vals)
            .ok_or_else(|| Error::domain("Hecke image is not harmonic: depth too small?"))?;
        Ok(self.from_full_coords(&x))
    }

    /// Integer Hecke matrix on the chosen basis (columns are images).
    pub fn hecke_matrix(&self, m: &Poly<Fq>, cuspidal: bool) -> Result<ZMat> {
        let rank = if cuspidal {
            self.cusp_rank()
        } else {
            self.full_rank()
        };
        let mut z = ZMat::zero(rank, rank);
        for j in 0..rank {
            let f = self.basis_cochain(cuspidal, j);
            let img = self.hecke_apply(&f, m)?;
            let coords = self.coords_of(&img, cuspidal)?;
            for (i, c) in coords.iter().enumerate() {
                if !c.is_integer() {
                    return Err(Error::domain(
                        "Hecke operator does not preserve the integer lattice",
                    ));
                }
                z.set(i, j, c.to_integer());
            }
        }
        Ok(z)
    }

    /// mu(e) = (q-1)/2 * #Stab(e), an exact rational.
    pub fn mu(&self, class: usize) -> BigRational {
        let q = self.graph.fq.order() as i64;
        let stab = BigRational::from(BigInt::from(self.graph.edges[class].stab));
        big(q - 1) / big(2) * stab
    }

    /// (f, g) = sum over oriented edge classes of f(e) g(e) mu(e)^{-1};
    /// both inputs must be cuspidal (finite support).
    pub fn petersson(&self, f: &Cochain, g: &Cochain) -> Result<BigRational> {
        if !f.is_cuspidal() || !g.is_cuspidal() {
            return Err(Error::domain(
                "Petersson pairing requires cuspidal (finitely supported) cochains",
            ));
        }
        let mut acc = BigRational::zero();
        for e in self.graph.finite_edges() {
            acc += &f.values[e] * &g.values[e] * self.mu(e).recip();
        }
        Ok(acc)
    }
}

fn eval_matrix(eval_edges: &[usize], basis: &[Vec<BigInt>]) -> QMat {
    let rows = eval_edges
        .iter()
        .map(|&e| {
            basis
                .iter()
                .map(|b| BigRational::from(b[e].clone()))
                .collect()
        })
        .collect();
    let mut m = QMat::from_rows(rows);
    m.cols = basis.len();
    m
}

/// Saturated integer basis of the Q-span of rational value vectors.
fn saturate_value_vectors(n: usize, vectors: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut a = ZMat::zero(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        let denlcm = v
            .iter()
            .fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
        for (i, x) in v.iter().enumerate() {
            a.set(i, j, (x * BigRational::from(denlcm.clone())).to_integer());
        }
    }
    saturate_columns(&a)
}

/// The coset representatives S_m: upper-triangular (a, b; 0, d) with a, d
/// monic, ad = m, a coprime to the level, deg b < deg d.
pub fn hecke_coset_reps(level: &Poly<Fq>, m: &Poly<Fq>) -> Result<Vec<Mat2>> {
    if m.is_zero() || !m.is_monic() {
        return Err(Error::domain("Hecke index must be monic nonzero"));
    }
    let fq = m.field().clone();
    let mut reps = Vec::new();
    for a in monic_divisors(m)? {
        if !a.gcd(level).is_one() {
            continue;
        }
        let d = m.divmod(&a)?.0;
        let dd = d.deg().finite().unwrap();
        let q = fq.order() as u128;
        let count = q.pow(dd as u32);
        for idx in 0..count {
            let b = poly_below(&fq, idx, dd as usize);
            reps.push(Mat2::from_t_polys(&a, &b, &Poly::zero(fq.clone()), &d));
        }
    }
    Ok(reps)
}

fn poly_below(fq: &Fq, mut idx: u128, deg_bound: usize) -> Poly<Fq> {
    let q = fq.order() as u128;
    let mut coeffs: Vec<FqElem> = Vec::with_capacity(deg_bound);
    for _ in 0..deg_bound {
        coeffs.push(fq.elem_from_index((idx % q) as u64));
        idx /= q;
    }
    Poly::from_coeffs(fq.clone(), coeffs)
}

/// All monic divisors of m.
pub fn monic_divisors(m: &Poly<Fq>) -> Result<Vec<Poly<Fq>>> {
    let fq = m.field().clone();
    let mut divs = vec![Poly::one(fq.clone())];
    for (p, e) in m.factor()? {
        let mut next = Vec::new();
        for d in &divs {
            let mut power = Poly::one(fq.clone());
            for _ in 0..=e {
                next.push(d.mul(&power));
                power = power.mul(&p);
            }
        }
        divs = next;
    }
    Ok(divs)
}

/// The Eisenstein cochain at prime level p: the (unique up to scale) vector
/// of the full harmonic space with f|T_q = (|q|+1) f for the two smallest
/// primes q != p, normalized so E(s_oo) = (q^2+q+1)(q-1)^2 when deg p = 3
/// and by E*(1) = q^{-1}(q+1)(q-1)^2 otherwise.
pub fn eisenstein_cochain(space: &HarmonicSpace, p: &Poly<Fq>) -> Result<Cochain> {
    let fq = space.graph.fq.clone();
    if space.graph.level != p.monic() {
        return Err(Error::domain("level mismatch"));
    }
    // Two smallest primes different from p.
    let mut qs = Vec::new();
    let mut d = 1usize;
    while qs.len() < 2 && d <= 4 {
        for cand in crate::field::enumerate_monic_irreducibles(&fq, d) {
            if qs.len() >= 2 {
                break;
            }
            if cand != p.monic() {
                qs.push(cand);
            }
        }
        d += 1;
    }
    let n = space.full_rank();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for qprime in &qs {
        let m = space.hecke_matrix(qprime, false)?;
        let eig = BigInt::from(qprime.abs_norm()) + BigInt::one();
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let mut v = BigRational::from(m.at(i, j).clone());
                if i == j {
                    v -= BigRational::from(eig.clone());
                }
                row.push(v);
            }
            rows.push(row);
        }
    }
    let mut sys = QMat::from_rows(rows);
    sys.cols = n;
    let ker = sys.kernel();
    if ker.len() != 1 {
        return Err(Error::domain(format!(
            "Eisenstein eigenline has dimension {} (expected 1)",
            ker.len()
        )));
    }
    let e0 = space.from_full_coords(&ker[0]);
    // Normalization.
    let q = fq.order() as i64;
    let deg_p = p.deg().finite().unwrap();
    if deg_p == 3 {
        let s_inf = EdgeNF::plus(1, LPoly::zero());
        let cur = e0.eval(&s_inf)?;
        if cur.is_zero() {
            return Err(Error::domain("Eisenstein cochain vanishes at s_oo"));
        }
        let target = big((q * q + q + 1) * (q - 1) * (q - 1));
        Ok(e0.scale(&(target / cur)))
    } else {
        let table = fourier_coeffs(&e0, 3)?;
        let one = Poly::one(fq.clone());
        let cur = table
            .fstar_of(&one)
            .cloned()
            .ok_or_else(|| Error::domain("missing E*(1)"))?;
        if cur.is_zero() {
            return Err(Error::domain("Eisenstein cochain has E*(1) = 0"));
        }
        let target = qpow(q as u64, -1) * big((q + 1) * (q - 1) * (q - 1));
        Ok(e0.scale(&(target / cur)))
    }
}

/// Fourier data of a cochain: f0(pi^k) for k = 1..=kmax and f*(m) for
/// monic m with deg m <= kmax - 2.
#[derive(Clone, Debug)]
pub struct FourierTable {
    pub q: u64,
    pub f0: Vec<BigRational>,
    pub fstar: Vec<(Poly<Fq>, BigRational)>,
    pub kmax: usize,
}

/// nu(m u) for u = sum u_i pi^i: q-1 if the pi-coefficient of m*u vanishes,
/// -1 otherwise; that coefficient is sum_i u_i * (coeff of T^{i-1} in m).
fn nu_of(fq: &Fq, m: &Poly<Fq>, u_digits: &[FqElem]) -> i64 {
    let mut acc = fq.zero();
    for (i, ud) in u_digits.iter().enumerate() {
        let c = m.coeff(i);
        acc = fq.add(&acc, &fq.mul(ud, &c));
    }
    if fq.is_zero(&acc) {
        fq.order() as i64 - 1
    } else {
        -1
    }
}

/// Extract Fourier coefficients by exact character sums over the
/// representatives u = sum_{i=1}^{k-1} u_i pi^i at each level, then verify
/// that the expansion reproduces every evaluated edge value.
pub fn fourier_coeffs(f: &Cochain, kmax: usize) -> Result<FourierTable> {
    let g = &f.graph;
    let fq = g.fq.clone();
    let q = fq.order();
    let mut levels: Vec<Vec<(Vec<FqElem>, BigRational)>> = Vec::new();
    for k in 1..=kmax {
        let mut vals = Vec::new();
        let ndigits = k - 1;
        let count = (q as u128).pow(ndigits as u32);
        for idx in 0..count {
            let mut digits = Vec::with_capacity(ndigits);
            let mut n = idx;
            for _ in 0..ndigits {
                digits.push(fq.elem_from_index((n % q as u128) as u64));
                n /= q as u128;
            }
            let u = LPoly::from_terms(
                &fq,
                digits.iter().enumerate().map(|(i, c)| (i as i64 + 1, *c)),
            );
            let e = EdgeNF::plus(k as i64, u);
            vals.push((digits, f.eval(&e)?));
        }
        levels.push(vals);
    }
    // f0 by averaging.
    let mut f0 = Vec::with_capacity(kmax);
    for (k0, vals) in levels.iter().enumerate() {
        let k = k0 as i64 + 1;
        let sum: BigRational = vals.iter().map(|(_, v)| v.clone()).sum();
        f0.push(sum * qpow(q, -(k - 1)));
    }
    // f*(m) at level deg m + 2 by pairing against nu.
    let mut fstar = Vec::new();
    for degm in 0..=kmax.saturating_sub(2) {
        let k = degm + 2;
        let vals = &levels[k - 1];
        for m in Poly::monic_of_degree(&fq, degm) {
            let mut acc = BigRational::zero();
            for (digits, v) in vals {
                acc += v * big(nu_of(&fq, &m, digits));
            }
            let denom = big(q as i64 - 1) * qpow(q, degm as i64 + 1);
            fstar.push((m, acc / denom));
        }
    }
    let table = FourierTable {
        q,
        f0,
        fstar,
        kmax,
    };
    // Consistency: re-synthesize every evaluated edge value.
    for (k0, vals) in levels.iter().enumerate() {
        let k = k0 + 1;
        for (digits, v) in vals {
            let synth = synthesize(&table, &fq, k, digits);
            if &synth != v {
                return Err(Error::domain(format!(
                    "values at level {k} do not match a Fourier expansion \
                     (non-harmonic input?)"
                )));
            }
        }
    }
    Ok(table)
}

/// f0(pi^k) + sum_{j <= k-2} q^{-k+2+j} sum_{deg m = j} f*(m) nu(m u).
fn synthesize(table: &FourierTable, fq: &Fq, k: usize, digits: &[FqElem]) -> BigRational {
    let mut acc = table.f0[k - 1].clone();
    for (m, coef) in &table.fstar {
        let j = m.deg().finite().unwrap() as usize;
        if j + 2 > k {
            continue;
        }
        let scale = qpow(table.q, -(k as i64) + 2 + j as i64);
        acc += scale * coef * big(nu_of(fq, m, digits));
    }
    acc
}

/// Public synthesis hook (round-trip tests).
pub fn synthesize_edge_value(
    table: &FourierTable,
    fq: &Fq,
    k: usize,
    digits: &[FqElem],
) -> BigRational {
    synthesize(table, fq, k, digits)
}

impl FourierTable {
    pub fn fstar_of(&self, m: &Poly<Fq>) -> Option<&BigRational> {
        self.fstar.iter().find(|(p, _)| p == m).map(|(_, v)| v)
    }
}

/// The first-coefficient identity (f|T_m)*(1) = |m| f*(m).
pub fn check_first_coefficient(space: &HarmonicSpace, f: &Cochain, m: &Poly<Fq>) -> Result<bool> {
    let img = space.hecke_apply(f, m)?;
    let t_img = fourier_coeffs(&img, 2)?;
    let kneed = (m.deg().finite().unwrap() as usize + 2).max(2);
    let t_f = fourier_coeffs(f, kneed)?;
    let one = Poly::one(m.field().clone());
    let lhs = t_img.fstar_of(&one).cloned().unwrap_or_default();
    let rhs = BigRational::from(BigInt::from(m.abs_norm()))
        * t_f.fstar_of(m).cloned().unwrap_or_default();
    Ok(lhs == rhs)
}

/// Self-adjointness of T_m under the mu-weighted pairing on the cuspidal
/// space, as an exact matrix identity.
pub fn self_adjoint(space: &HarmonicSpace, m: &Poly<Fq>) -> Result<bool> {
    let rank = space.cusp_rank();
    let basis: Vec<Cochain> = (0..rank).map(|i| space.basis_cochain(true, i)).collect();
    let images: Vec<Cochain> = basis
        .iter()
        .map(|f| space.hecke_apply(f, m))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..rank {
        for j in 0..rank {
            let lhs = space.petersson(&images[i], &basis[j])?;
            let rhs = space.petersson(&basis[i], &images[j])?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Finite-part L-polynomial of a cuspidal cochain: the coefficient of U^j
/// is q^{-j} sum over monic m of degree j of f*(m), with U = q^{-s}.
pub fn l_polynomial(f: &Cochain, kmax: usize) -> Result<Vec<BigRational>> {
    if !f.is_cuspidal() {
        return Err(Error::domain("L-polynomial requires a cuspidal cochain"));
    }
    let table = fourier_coeffs(f, kmax)?;
    let q = table.q;
    let mut coeffs: Vec<BigRational> = Vec::new();
    for j in 0..=kmax.saturating_sub(2) {
        let sum: BigRational = table
            .fstar
            .iter()
            .filter(|(m, _)| m.deg().finite() == Some(j as i64))
            .map(|(_, v)| v.clone())
            .sum();
        coeffs.push(sum * qpow(q, -(j as i64)));
    }
    while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
    Ok(coeffs)
}

/// Empirical functional-equation test for the finite part under
/// U -> 1/(q^2 U): is P(U) = c * U^d P(1/(q^2 U)) for some scalar c?
/// Reported, never asserted (the oo-component is out of scope).
pub fn l_functional_equation_report(coeffs: &[BigRational], q: u64) -> Option<BigRational> {
    if coeffs.is_empty() {
        return None;
    }
    let d = coeffs.len() - 1;
    let r: Vec<BigRational> = (0..=d)
        .map(|i| coeffs[d - i].clone() * qpow(q, -2 * (d as i64 - i as i64)))
        .collect();
    let (p0, r0) = coeffs.iter().zip(r.iter()).find(|(_, ri)| !ri.is_zero())?;
    let c = p0 / r0;
    for (pi, ri) in coeffs.iter().zip(r.iter()) {
        if pi != &(&c * ri) {
            return None;
        }
    }
    Some(c)
}

/// The duality pairing matrix (T, f) -> (f|T)*(1): rows indexed by T_m for
/// deg m <= bound, columns by the cuspidal basis.
pub fn duality_pairing_matrix(space: &HarmonicSpace, bound: usize) -> Result<QMat> {
    let fq = space.graph.fq.clone();
    let one = Poly::one(fq.clone());
    let mut rows = Vec::new();
    for d in 0..=bound {
        for m in Poly::monic_of_degree(&fq, d) {
            let mut row = Vec::new();
            for i in 0..space.cusp_rank() {
                let f = space.basis_cochain(true, i);
                let img = space.hecke_apply(&f, &m)?;
                let table = fourier_coeffs(&img, 2)?;
                row.push(table.fstar_of(&one).cloned().unwrap_or_default());
            }
            rows.push(row);
        }
    }
    let mut m = QMat::from_rows(rows);
    m.cols = space.cusp_rank();
    Ok(m)
}

/// Roots of a rational-coefficient polynomial by Durand-Kerner, for the
/// floating Weil-bound check after the exact characteristic polynomial.
pub fn complex_roots(coeffs: &[BigRational]) -> Vec<(f64, f64)> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let to_f64 = |x: &BigRational| -> f64 {
        let num = x.numer().to_string().parse::<f64>().unwrap_or(0.0);
        let den = x.denom().to_string().parse::<f64>().unwrap_or(1.0);
        num / den
    };
    let c: Vec<f64> = coeffs.iter().map(to_f64).collect();
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (0.0f64, 0.0f64);
        for k in (0..=n).rev() {
            let re = acc.0 * z.0 - acc.1 * z.1 + monic[k];
            let im = acc.0 * z.1 + acc.1 * z.0;
            acc = (re, im);
        }
        acc
    };
    let mut roots: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            (1.3 * theta.cos(), 1.3 * theta.sin())
        })
        .collect();
    for _ in 0..300 {
        let old = roots.clone();
        for i in 0..n {
            let zi = old[i];
            let mut denom = (1.0f64, 0.0f64);
            for (j, zj) in old.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = (zi.0 - zj.0, zi.1 - zj.1);
                denom = (denom.0 * d.0 - denom.1 * d.1, denom.0 * d.1 + denom.1 * d.0);
            }
            let fv = eval(zi);
            let norm = denom.0 * denom.0 + denom.1 * denom.1;
            if norm == 0.0 {
                continue;
            }
            roots[i] = (
                zi.0 - (fv.0 * denom.0 + fv.1 * denom.1) / norm,
                zi.1 - (fv.1 * denom.0 - fv.0 * denom.1) / norm,
            );
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_poly;
    use crate::tree::QuotientOptions;

    fn space_for(q: u32, level: &str, depth: usize) -> HarmonicSpace {
        let fq = Fq::prime(q).unwrap();
        let level = parse_poly(&fq, level).unwrap();
        let g = QuotientGraph::build(
            &fq,
            &level,
            QuotientOptions {
                depth,
                ray_threshold: 3,
            },
        )
        .unwrap();
        HarmonicSpace::new(Arc::new(g)).unwrap()
    }

    #[test]
    fn ranks_for_degree3_prime_q2() {
        let s = space_for(2, "T^3+T+1", 10);
        assert_eq!(s.cusp_rank(), 2, "cuspidal rank = genus = q");
        assert_eq!(s.full_rank(), 3, "full rank = g + c - 1");
        for i in 0..s.full_rank() {
            s.basis_cochain(false, i).verify_harmonic().unwrap();
        }
    }

    #[test]
    fn ranks_for_level_t_q2() {
        let s = space_for(2, "T", 9);
        assert_eq!(s.cusp_rank(), 0);
        assert_eq!(s.full_rank(), 1);
    }

    #[test]
    fn hecke_t1_is_identity() {
        let s = space_for(2, "T^3+T+1", 10);
        let fq = s.graph.fq.clone();
        let one = Poly::one(fq);
        let m = s.hecke_matrix(&one, false).unwrap();
        for i in 0..s.full_rank() {
            for j in 0..s.full_rank() {
                let want = i64::from(i == j);
                assert_eq!(m.at(i, j), &BigInt::from(want));
            }
        }
    }

    #[test]
    fn eisenstein_values_match_published_q2() {
        let s = space_for(2, "T^3+T+1", 10);
        let fq = s.graph.fq.clone();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let e = eisenstein_cochain(&s, &p).unwrap();
        let pi = |k: i64, terms: &[(i64, u64)]| {
            EdgeNF::plus(
                k,
                LPoly::from_terms(
                    &fq,
                    terms.iter().map(|(e, c)| (*e, fq.elem_from_index(*c))),
                ),
            )
        };
        assert_eq!(e.eval(&pi(1, &[])).unwrap(), big(7), "E(s_oo)");
        assert_eq!(e.eval(&pi(3, &[])).unwrap(), big(7), "E(s_1)");
        assert_eq!(e.eval(&pi(2, &[(1, 1)])).unwrap(), big(2), "E(a_oo)");
        assert_eq!(e.eval(&pi(2, &[])).unwrap(), big(5), "E(d_oo)");
        let a1 = pi(3, &[(2, 1)]);
        assert_eq!(e.eval(&a1.reverse()).unwrap(), big(2), "E(rev a_1)");
        for u in 0..2 {
            assert_eq!(e.eval(&pi(3, &[(1, 1), (2, u)])).unwrap(), big(1), "E(b_{u})");
        }
        e.verify_harmonic().unwrap();
    }

    #[test]
    fn eisenstein_fourier_q2() {
        let s = space_for(2, "T^3+T+1", 10);
        let fq = s.graph.fq.clone();
        let p = parse_poly(&fq, "T^3+T+1").unwrap();
        let e = eisenstein_cochain(&s, &p).unwrap();
        let table = fourier_coeffs(&e, 4).unwrap();
        // E0(pi^k) = q^{1-k} * 7 * (q-1)^2 at q = 2.
        for (k0, v) in table.f0.iter().enumerate() {
            let k = k0 as i64 + 1;
            assert_eq!(v, &(qpow(2, 1 - k) * big(7)), "E0(pi^{k})");
        }
        let one = Poly::one(fq.clone());
        assert_eq!(table.fstar_of(&one).unwrap(), &(big(3) / big(2)));
        // E*(T) = 3/4 * 3 = 9/4.
        let t = parse_poly(&fq, "T").unwrap();
        assert_eq!(table.fstar_of(&t).unwrap(), &(big(9) / big(4)));
    }

    #[test]
    fn cuspidal_constant_coefficients_vanish() {
        let s = space_for(2, "T^3+T+1", 10);
        for i in 0..s.cusp_rank() {
            let f = s.basis_cochain(true, i);
            assert!(f.is_cuspidal());
            let table = fourier_coeffs(&f, 4).unwrap();
            for v in &table.f0 {
                assert!(v.is_zero(), "cuspidal f0 must vanish");
            }
        }
    }

    #[test]
    fn pairing_positive_and_nondegenerate() {
        let s = space_for(2, "T^3+T+1", 10);
        let n = s.cusp_rank();
        let mut gram = QMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = s
                    .petersson(&s.basis_cochain(true, i), &s.basis_cochain(true, j))
                    .unwrap();
                gram.set(i, j, v);
            }
        }
        for i in 0..n {
            assert!(gram.at(i, i).is_positive(), "(f, f) > 0");
        }
        assert_eq!(gram.rank(), n, "Gram determinant nonzero");
    }

    #[test]
    fn fourier_synthesis_roundtrip() {
        // Invert a basis cochain's values, then synthesize back on a level
        // not used in extraction.
        let s = space_for(2, "T^3+T+1", 10);
        let fq = s.graph.fq.clone();
        let f = s.basis_cochain(false, 0);
        let table = fourier_coeffs(&f, 5).unwrap();
        let digits = vec![fq.elem_from_index(1), fq.elem_from_index(0), fq.elem_from_index(1)];
        let u = LPoly::from_terms(
            &fq,
            digits.iter().enumerate().map(|(i, c)| (i as i64 + 1, *c)),
        );
        let e = EdgeNF::plus(4, u);
        assert_eq!(
            synthesize_edge_value(&table, &fq, 4, &digits),
            f.eval(&e).unwrap()
        );
    }
}
