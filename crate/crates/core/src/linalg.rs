//! Small exact linear algebra kernels shared across modules: Gaussian
//! elimination over a [`Field`] context, kernels/solves over the rationals,
//! and Smith normal form over the integers and over F_q[T].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Fq, Poly};

/// Dense row-major matrix over a field context.
pub struct FMat<F: Field> {
    pub field: F,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F::Elem>,
}

impl<F: Field> FMat<F> {
    pub fn zero(field: F, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        FMat {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    /// Reduced row echelon form in place; returns pivot column per rank row.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !f.is_zero(self.at(r, col))) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = f.inv(self.at(row, col)).expect("pivot nonzero");
            for c in col..self.cols {
                let v = f.mul(self.at(row, c), &inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !f.is_zero(self.at(r, col)) {
                    let factor = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = f.sub(self.at(r, c), &f.mul(&factor, self.at(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of the right kernel {x : Ax = 0}.
    pub fn kernel(mut self) -> Vec<Vec<F::Elem>> {
        let f = self.field.clone();
        let pivots = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(self.at(r, free));
            }
            basis.push(v);
        }
        basis
    }

    pub fn rank(mut self) -> usize {
        self.rref().len()
    }
}

/// Kernel of an F_q matrix given as rows; `ncols` must be passed explicitly
/// so that a system with no constraint rows yields the full space.
pub fn fq_kernel(
    fq: &Fq,
    rows: &[Vec<crate::field::FqElem>],
    ncols: usize,
) -> Vec<Vec<crate::field::FqElem>> {
    let cols = ncols;
    debug_assert!(rows.iter().all(|r| r.len() == cols));
    let mut m = FMat::zero(fq.clone(), rows.len(), cols);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    m.kernel()
}

// ---------------------------------------------------------------------------
// Rational matrices
// ---------------------------------------------------------------------------

/// Dense matrix over Q (BigRational), row major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigRational>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> QMat {
        QMat {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> QMat {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.at(i, j) * &v[j])
                    .fold(BigRational::zero(), |a, b| a + b)
            })
            .collect()
    }

    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = self.at(row, col).recip();
            for c in col..self.cols {
                let v = self.at(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c) - &factor * self.at(row, c);
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; m.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..m.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![BigRational::zero(); m.cols];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve Ax = b exactly; `None` when inconsistent; free variables 0.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMat::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }

    /// Characteristic polynomial coefficients (ascending) by Faddeev-LeVerrier.
    pub fn charpoly(&self) -> Vec<BigRational> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut m = QMat::identity(n);
        for k in 1..=n {
            m = self.mul(&m);
            let tr: BigRational = (0..n)
                .map(|i| m.at(i, i).clone())
                .fold(BigRational::zero(), |a, b| a + b);
            let c = -tr / BigRational::from(BigInt::from(k as i64));
            coeffs[n - k] = c.clone();
            for i in 0..n {
                let v = m.at(i, i) + &c;
                m.set(i, i, v);
            }
        }
        coeffs
    }
}

// ---------------------------------------------------------------------------
// Smith normal form over Z
// ---------------------------------------------------------------------------

/// Row-major integer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ZMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl ZMat {
    pub fn zero(rows: usize, cols: usize) -> ZMat {
        ZMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> ZMat {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        ZMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for c in 0..self.cols {
            let v = self.at(dst, c) + f * self.at(src, c);
            self.set(dst, c, v);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for r in 0..self.rows {
            let v = self.at(r, dst) + f * self.at(r, src);
            self.set(r, dst, v);
        }
    }
}

/// Result of a Smith normal form computation over Z.
pub struct Snf {
    /// Nonzero diagonal entries d_1 | d_2 | ..., positive.
    pub invariants: Vec<BigInt>,
    /// Left transform U (rows x rows): U * A * V = D.
    pub left: ZMat,
    /// Right transform V (cols x cols).
    pub right: ZMat,
}

/// Diagonalize m from slot t0 on, by Euclidean row/column operations
/// mirrored into u and v.
fn diagonalize_from(m: &mut ZMat, u: &mut ZMat, v: &mut ZMat, t0: usize) {
    let rows = m.rows;
    let cols = m.cols;
    let n = rows.min(cols);
    let mut t = t0;
    while t < n {
        let mut pivot = None;
        'search: for r in t..rows {
            for c in t..cols {
                if !m.at(r, c).is_zero() {
                    pivot = Some((r, c));
                    break 'search;
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        m.swap_rows(t, pr);
        u.swap_rows(t, pr);
        m.swap_cols(t, pc);
        v.swap_cols(t, pc);
        loop {
            for r in t + 1..rows {
                if m.at(r, t).is_zero() {
                    continue;
                }
                let f = -(m.at(r, t).div_floor(m.at(t, t)));
                m.add_row(r, t, &f);
                u.add_row(r, t, &f);
                if !m.at(r, t).is_zero() {
                    // Remainder became the smaller pivot; swap it up.
                    m.swap_rows(t, r);
                    u.swap_rows(t, r);
                }
            }
            for c in t + 1..cols {
                if m.at(t, c).is_zero() {
                    continue;
                }
                let f = -(m.at(t, c).div_floor(m.at(t, t)));
                m.add_col(c, t, &f);
                v.add_col(c, t, &f);
                if !m.at(t, c).is_zero() {
                    m.swap_cols(t, c);
                    v.swap_cols(t, c);
                }
            }
            if (t + 1..rows).all(|r| m.at(r, t).is_zero())
                && (t + 1..cols).all(|c| m.at(t, c).is_zero())
            {
                break;
            }
        }
        t += 1;
    }
}

/// Smith normal form over Z with unimodular transforms U A V = D.
pub fn snf(a: &ZMat) -> Snf {
    let mut m = a.clone();
    let rows = m.rows;
    let cols = m.cols;
    let mut u = ZMat::zero(rows, rows);
    let mut v = ZMat::zero(cols, cols);
    for i in 0..rows {
        u.set(i, i, BigInt::one());
    }
    for i in 0..cols {
        v.set(i, i, BigInt::one());
    }
    diagonalize_from(&mut m, &mut u, &mut v, 0);
    let n = rows.min(cols);
    // Enforce the divisibility chain: couple a bad pair and re-diagonalize.
    loop {
        let mut bad = None;
        for i in 0..n.saturating_sub(1) {
            let a_ii = m.at(i, i);
            let b_ii = m.at(i + 1, i + 1);
            if a_ii.is_zero() && !b_ii.is_zero() {
                bad = Some(i);
                break;
            }
            if !a_ii.is_zero() && !b_ii.is_zero() && !(b_ii % a_ii).is_zero() {
                bad = Some(i);
                break;
            }
        }
        let Some(i) = bad else { break };
        // col_i += col_{i+1} puts d_{i+1} below the diagonal at (i+1, i).
        m.add_col(i, i + 1, &BigInt::one());
        v.add_col(i, i + 1, &BigInt::one());
        diagonalize_from(&mut m, &mut u, &mut v, i);
    }
    // Normalize signs: negate the row.
    for i in 0..n {
        if m.at(i, i).is_negative() {
            let minus_two = BigInt::from(-2);
            m.add_row(i, i, &minus_two);
            u.add_row(i, i, &minus_two);
        }
    }
    let invariants = (0..n)
        .map(|i| m.at(i, i).clone())
        .filter(|d| !d.is_zero())
        .collect();
    Snf {
        invariants,
        left: u,
        right: v,
    }
}

/// Saturation of the column span: a basis (as columns) of
/// span_Q(cols of A) intersected with Z^rows.
///
/// If U A V = D with r nonzero invariants then the first r columns of U^-1
/// are such a basis (they are primitive and span the same Q-subspace).
pub fn saturate_columns(a: &ZMat) -> Vec<Vec<BigInt>> {
    let s = snf(a);
    let r = s.invariants.len();
    let n = a.rows;
    // U is unimodular, so its inverse is integral; invert over Q.
    let mut aug = QMat::zero(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, BigRational::from(s.left.at(i, j).clone()));
        }
        aug.set(i, n + i, BigRational::one());
    }
    aug.rref();
    (0..r)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let v = aug.at(i, n + k).clone();
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Smith normal form over F_q[T] (invariant factors of polynomial matrices)
// ---------------------------------------------------------------------------

/// Invariant factors (monic, each dividing the next) of a matrix over F_q[T].
pub fn poly_snf_invariants(rows_in: &[Vec<Poly<Fq>>]) -> Result<Vec<Poly<Fq>>> {
    if rows_in.is_empty() {
        return Ok(Vec::new());
    }
    let fq = rows_in[0][0].field().clone();
    let rows = rows_in.len();
    let cols = rows_in[0].len();
    let mut m: Vec<Vec<Poly<Fq>>> = rows_in.to_vec();
    let n = rows.min(cols);
    let mut t = 0usize;
    while t < n {
        let mut pivot = None;
        'search: for r in t..rows {
            for c in t..cols {
                if !m[r][c].is_zero() {
                    pivot = Some((r, c));
                    break 'search;
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        m.swap(t, pr);
        for row in m.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                if m[r][t].is_zero() {
                    continue;
                }
                let (quot, rem) = m[r][t].divmod(&m[t][t])?;
                for c in t..cols {
                    let sub = quot.mul(&m[t][c]);
                    m[r][c] = m[r][c].sub(&sub);
                }
                if !rem.is_zero() {
                    m.swap(t, r);
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                if m[t][c].is_zero() {
                    continue;
                }
                let (quot, rem) = m[t][c].divmod(&m[t][t])?;
                for r in t..rows {
                    let sub = quot.mul(&m[r][t]);
                    m[r][c] = m[r][c].sub(&sub);
                }
                if !rem.is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, c);
                    }
                    dirty = true;
                }
            }
            if !dirty
                && (t + 1..rows).all(|r| m[r][t].is_zero())
                && (t + 1..cols).all(|c| m[t][c].is_zero())
            {
                break;
            }
        }
        t += 1;
    }
    // Divisibility chain.
    loop {
        let mut changed = false;
        for i in 0..n.saturating_sub(1) {
            if m[i][i].is_zero() && !m[i + 1][i + 1].is_zero() {
                m.swap(i, i + 1);
                for row in m.iter_mut() {
                    row.swap(i, i + 1);
                }
                changed = true;
                continue;
            }
            if m[i][i].is_zero() || m[i + 1][i + 1].is_zero() {
                continue;
            }
            if m[i + 1][i + 1].rem(&m[i][i])?.is_zero() {
                continue;
            }
            let g = m[i][i].gcd(&m[i + 1][i + 1]);
            let l = m[i][i].mul(&m[i + 1][i + 1]).divmod(&g)?.0;
            m[i][i] = g;
            m[i + 1][i + 1] = l;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let _ = fq;
    Ok((0..n)
        .filter(|&i| !m[i][i].is_zero())
        .map(|i| m[i][i].monic())
        .collect())
}

/// Index [Z^n-span : lattice] style helper: product of SNF invariants of the
/// matrix whose columns are lattice generators expressed in a basis; errors
/// if the lattice does not have full rank.
pub fn lattice_index(a: &ZMat, full_rank: usize) -> Result<BigInt> {
    let s = snf(a);
    if s.invariants.len() < full_rank {
        return Err(Error::domain(format!(
            "sublattice has rank {} < {}, index infinite",
            s.invariants.len(),
            full_rank
        )));
    }
    Ok(s.invariants.iter().product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmat(rows: Vec<Vec<i64>>) -> ZMat {
        ZMat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
    }

    #[test]
    fn snf_small() {
        let a = zmat(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = snf(&a);
        let inv: Vec<i64> = s
            .invariants
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect();
        assert_eq!(inv, vec![2, 2, 156]);
        // U A V = D check.
        let d = matmul(&matmul(&s.left, &a), &s.right);
        for i in 0..3 {
            for j in 0..3 {
                if i == j && i < inv.len() {
                    assert_eq!(d.at(i, j), &BigInt::from(inv[i]));
                } else {
                    assert!(d.at(i, j).is_zero());
                }
            }
        }
    }

    fn matmul(a: &ZMat, b: &ZMat) -> ZMat {
        let mut out = ZMat::zero(a.rows, b.cols);
        for i in 0..a.rows {
            for k in 0..a.cols {
                if a.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let v = out.at(i, j) + a.at(i, k) * b.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    #[test]
    fn snf_divisibility_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..30 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let a = ZMat::from_rows(
                (0..rows)
                    .map(|_| {
                        (0..cols)
                            .map(|_| BigInt::from(rng.gen_range(-9i64..=9)))
                            .collect()
                    })
                    .collect(),
            );
            let s = snf(&a);
            for w in s.invariants.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
            }
            let d = matmul(&matmul(&s.left, &a), &s.right);
            for i in 0..rows {
                for j in 0..cols {
                    if i == j && i < s.invariants.len() {
                        assert_eq!(d.at(i, j), &s.invariants[i]);
                    } else {
                        assert!(d.at(i, j).is_zero(), "off-diagonal zero");
                    }
                }
            }
        }
    }

    #[test]
    fn qmat_charpoly() {
        let m = QMat::from_rows(vec![
            vec![BigRational::from(BigInt::from(2)), BigRational::from(BigInt::from(1))],
            vec![BigRational::from(BigInt::from(1)), BigRational::from(BigInt::from(2))],
        ]);
        let cp = m.charpoly();
        // x^2 - 4x + 3
        assert_eq!(cp[2], BigRational::one());
        assert_eq!(cp[1], BigRational::from(BigInt::from(-4)));
        assert_eq!(cp[0], BigRational::from(BigInt::from(3)));
    }

    #[test]
    fn qmat_kernel_and_solve() {
        let m = QMat::from_rows(vec![
            vec![
                BigRational::from(BigInt::from(1)),
                BigRational::from(BigInt::from(2)),
                BigRational::from(BigInt::from(3)),
            ],
            vec![
                BigRational::from(BigInt::from(2)),
                BigRational::from(BigInt::from(4)),
                BigRational::from(BigInt::from(6)),
            ],
        ]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel().len(), 2);
        let b = vec![
            BigRational::from(BigInt::from(6)),
            BigRational::from(BigInt::from(12)),
        ];
        let x = m.solve(&b).unwrap();
        let ax = m.mul_vec(&x);
        assert_eq!(ax, b);
    }
}
