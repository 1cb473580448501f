//! Gamma_0(n)-equivalence on the tree and the quotient graph.
//!
//! Equivalence testing is complete by construction: gamma e_1 = e_2 with
//! gamma in Gamma_0(n) iff H = pi^(m') g_2^{-1} gamma g_1 lies in the
//! Iwahori group, where m' is forced by determinant valuations (parity
//! obstruction included).  Writing gamma as a matrix of bounded-degree
//! polynomials (bounds forced by the valuations of g_1, g_2) with n | c,
//! the Iwahori conditions are finitely many F_q-linear constraints; on the
//! solution space the determinant is automatically an F_q constant, so the
//! transporter is the nonvanishing locus of an explicit quadratic form over
//! F_q, which we search/count by enumeration with incremental evaluation.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Fq, FqElem, Poly};

use super::{edge_normal_form, vertex_normal_form, EdgeNF, LPoly, Mat2, VertexNF};

/// Whether we are testing cosets of GL_2(O) (vertices) or Iwahori (edges).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Mode {
    Vertex,
    Edge,
}

/// The F_q-linear space of candidate gamma matrices for a transporter.
struct CandidateSpace {
    fq: Fq,
    /// Basis of the solution space, as 2x2 T-polynomial matrices.
    basis: Vec<Mat2>,
    /// det as a quadratic form on the basis coordinates:
    /// Q(x) = sum_i diag[i] x_i^2 + sum_{i<j} cross[i][j] x_i x_j.
    diag: Vec<FqElem>,
    cross: Vec<Vec<FqElem>>,
}

fn const_det(fq: &Fq, m: &Mat2) -> FqElem {
    let det = m.det(fq);
    if det.is_zero() {
        return fq.zero();
    }
    debug_assert_eq!(det.val(), Some(0), "solution-space det must be constant");
    det.coeff_at(fq, 0)
}

impl CandidateSpace {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn gamma_at(&self, x: &[u64]) -> Mat2 {
        let fq = &self.fq;
        let mut m = Mat2 {
            a: LPoly::zero(),
            b: LPoly::zero(),
            c: LPoly::zero(),
            d: LPoly::zero(),
        };
        for (i, bi) in self.basis.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let s = fq.elem_from_index(x[i]);
            m.a = m.a.add(fq, &bi.a.scale(fq, &s));
            m.b = m.b.add(fq, &bi.b.scale(fq, &s));
            m.c = m.c.add(fq, &bi.c.scale(fq, &s));
            m.d = m.d.add(fq, &bi.d.scale(fq, &s));
        }
        m
    }

    /// Enumerate F_q^n with an odometer, maintaining Q(x) and the partial
    /// sums S_i = sum_j cross_ij x_j incrementally; call f on each nonzero.
    fn scan<Fv: FnMut(&[u64]) -> bool>(&self, mut visit: Fv) {
        let fq = &self.fq;
        let n = self.dim();
        if n == 0 {
            return;
        }
        let q = fq.order();
        let mut x = vec![0u64; n];
        let mut xe = vec![fq.zero(); n];
        let mut qval = fq.zero();
        let mut s: Vec<FqElem> = vec![fq.zero(); n];
        loop {
            if !fq.is_zero(&qval) && !visit(&x) {
                return;
            }
            // Odometer step.
            let mut i = 0;
            loop {
                if i == n {
                    return;
                }
                let old = xe[i];
                let (new_idx, carry) = if x[i] + 1 == q {
                    (0, true)
                } else {
                    (x[i] + 1, false)
                };
                let new = fq.elem_from_index(new_idx);
                // Update Q: delta = d^2 diag_i + d*(2x_i diag_i) ... done
                // directly via the polarization with delta = new - old:
                // Q(x + d e_i) - Q(x) = diag_i (new^2 - old^2) + (new - old) S_i.
                let d = fq.sub(&new, &old);
                let sq_diff = fq.sub(&fq.mul(&new, &new), &fq.mul(&old, &old));
                qval = fq.add(
                    &qval,
                    &fq.add(&fq.mul(&self.diag[i], &sq_diff), &fq.mul(&d, &s[i])),
                );
                // Update partial sums for the other coordinates.
                for j in 0..n {
                    if j != i {
                        let cij = if i < j {
                            self.cross[i][j]
                        } else {
                            self.cross[j][i]
                        };
                        s[j] = fq.add(&s[j], &fq.mul(&cij, &d));
                    }
                }
                x[i] = new_idx;
                xe[i] = new;
                if !carry {
                    break;
                }
                i += 1;
            }
        }
    }

    fn count_unit_det(&self) -> u128 {
        let mut count: u128 = 0;
        self.scan(|_| {
            count += 1;
            true
        });
        count
    }

    fn find_unit_det(&self) -> Option<Mat2> {
        let mut found = None;
        self.scan(|x| {
            found = Some(x.to_vec());
            false
        });
        found.map(|x| self.gamma_at(&x))
    }
}

/// Build the solution space for gamma g_1 ~ g_2 (mod F^x K, K per mode)
/// with gamma in Gamma_0(n).  Returns None on the parity obstruction.
fn transporter_space(
    fq: &Fq,
    level: &Poly<Fq>,
    g1: &Mat2,
    g2: &Mat2,
    mode: Mode,
) -> Result<Option<CandidateSpace>> {
    let det1 = g1.det(fq);
    let det2 = g2.det(fq);
    let vd1 = det1.val().ok_or_else(|| Error::domain("singular g1"))?;
    let vd2 = det2.val().ok_or_else(|| Error::domain("singular g2"))?;
    if (vd2 - vd1).rem_euclid(2) != 0 {
        return Ok(None);
    }
    let m_shift = (vd2 - vd1) / 2;
    // M_pre = pi^(m') g_2^{-1}; det g_2 is a monomial for normal forms.
    if det2.terms(fq).len() != 1 {
        return Err(Error::domain("expected monomial determinant normal form"));
    }
    let eps_inv = fq.inv(&det2.coeff_at(fq, vd2))?;
    let shift = m_shift - vd2;
    let adj2 = [
        [g2.d.clone(), g2.b.neg(fq)],
        [g2.c.neg(fq), g2.a.clone()],
    ];
    let m_pre: Vec<Vec<LPoly>> = (0..2)
        .map(|u| {
            (0..2)
                .map(|r| adj2[u][r].scale(fq, &eps_inv).shift(shift))
                .collect()
        })
        .collect();
    let g1m = [
        [g1.a.clone(), g1.b.clone()],
        [g1.c.clone(), g1.d.clone()],
    ];
    // Degree bounds for gamma entries from valuations:
    // v(gamma_ij) >= -m' + rowmin_i(g2) + colmin_j(adj g1) - vd1.
    let rowmin =
        |m: &[[LPoly; 2]; 2], i: usize| -> Option<i64> {
            [m[i][0].val(), m[i][1].val()]
                .into_iter()
                .flatten()
                .min()
        };
    let g2m = [
        [g2.a.clone(), g2.b.clone()],
        [g2.c.clone(), g2.d.clone()],
    ];
    let adj1 = [
        [g1.d.clone(), g1.b.neg(fq)],
        [g1.c.neg(fq), g1.a.clone()],
    ];
    let colmin = |m: &[[LPoly; 2]; 2], j: usize| -> Option<i64> {
        [m[0][j].val(), m[1][j].val()]
            .into_iter()
            .flatten()
            .min()
    };
    let deg_level = level.deg().finite().unwrap();
    let mut unknowns: Vec<(usize, usize, i64, LPoly)> = Vec::new();
    for r in 0..2 {
        for s in 0..2 {
            let rm = match rowmin(&g2m, r) {
                Some(v) => v,
                None => continue,
            };
            let cm = match colmin(&adj1, s) {
                Some(v) => v,
                None => continue,
            };
            let dmax = m_shift - rm - cm + vd1;
            if r == 1 && s == 0 {
                // n | gamma_21: parametrize gamma_21 = n * c'.
                let d2 = dmax - deg_level;
                for i in 0..=d2.max(-1) {
                    if i < 0 {
                        continue;
                    }
                    let base = LPoly::from_poly_t(level).shift(-i);
                    unknowns.push((r, s, i, base));
                }
            } else {
                for i in 0..=dmax.max(-1) {
                    if i < 0 {
                        continue;
                    }
                    unknowns.push((r, s, i, LPoly::monomial(fq, fq.one(), -i)));
                }
            }
        }
    }
    if unknowns.is_empty() {
        return Ok(Some(CandidateSpace {
            fq: fq.clone(),
            basis: Vec::new(),
            diag: Vec::new(),
            cross: Vec::new(),
        }));
    }
    // H contribution of each unknown: M_pre . E_rs . g1 scaled by its poly.
    let thresholds = |u: usize, v: usize| -> i64 {
        if mode == Mode::Edge && u == 1 && v == 0 {
            1
        } else {
            0
        }
    };
    let mut contribs: Vec<[[LPoly; 2]; 2]> = Vec::with_capacity(unknowns.len());
    for (r, s, _i, basepoly) in &unknowns {
        let mut h = [
            [LPoly::zero(), LPoly::zero()],
            [LPoly::zero(), LPoly::zero()],
        ];
        for (u, hu) in h.iter_mut().enumerate() {
            for (v, huv) in hu.iter_mut().enumerate() {
                *huv = m_pre[u][*r]
                    .mul(fq, basepoly)
                    .mul(fq, &g1m[*s][v]);
            }
        }
        contribs.push(h);
    }
    // Rows: one per (u, v, exponent below threshold).
    let mut rows: Vec<Vec<FqElem>> = Vec::new();
    for u in 0..2 {
        for v in 0..2 {
            let theta = thresholds(u, v);
            let lo = contribs
                .iter()
                .filter_map(|h| h[u][v].val())
                .min()
                .unwrap_or(theta);
            for e in lo..theta {
                let row: Vec<FqElem> = contribs
                    .iter()
                    .map(|h| h[u][v].coeff_at(fq, e))
                    .collect();
                rows.push(row);
            }
        }
    }
    let kernel = crate::linalg::fq_kernel(fq, &rows, unknowns.len());
    let basis: Vec<Mat2> = kernel
        .iter()
        .map(|coeffs| {
            let mut m = Mat2 {
                a: LPoly::zero(),
                b: LPoly::zero(),
                c: LPoly::zero(),
                d: LPoly::zero(),
            };
            for (x, (r, s, _, basepoly)) in coeffs.iter().zip(unknowns.iter()) {
                if fq.is_zero(x) {
                    continue;
                }
                let term = basepoly.scale(fq, x);
                let entry = match (r, s) {
                    (0, 0) => &mut m.a,
                    (0, 1) => &mut m.b,
                    (1, 0) => &mut m.c,
                    (1, 1) => &mut m.d,
                    _ => unreachable!(),
                };
                *entry = entry.add(fq, &term);
            }
            m
        })
        .collect();
    let n = basis.len();
    if n > 26 {
        return Err(Error::depth(format!(
            "transporter space dimension {n} too large for enumeration"
        )));
    }
    let diag: Vec<FqElem> = basis.iter().map(|b| const_det(fq, b)).collect();
    let mut cross = vec![vec![fq.zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let sum = Mat2 {
                a: basis[i].a.add(fq, &basis[j].a),
                b: basis[i].b.add(fq, &basis[j].b),
                c: basis[i].c.add(fq, &basis[j].c),
                d: basis[i].d.add(fq, &basis[j].d),
            };
            let pol = fq.sub(&fq.sub(&const_det(fq, &sum), &diag[i]), &diag[j]);
            cross[i][j] = pol;
        }
    }
    Ok(Some(CandidateSpace {
        fq: fq.clone(),
        basis,
        diag,
        cross,
    }))
}

/// A witness gamma in Gamma_0(n) with gamma e_1 = e_2, or None.
pub fn gamma0_equivalent(
    fq: &Fq,
    level: &Poly<Fq>,
    e1: &EdgeNF,
    e2: &EdgeNF,
) -> Result<Option<Mat2>> {
    let g1 = e1.matrix(fq);
    let g2 = e2.matrix(fq);
    match transporter_space(fq, level, &g1, &g2, Mode::Edge)? {
        None => Ok(None),
        Some(space) => Ok(space.find_unit_det()),
    }
}

/// Same for vertex classes.
pub fn gamma0_equivalent_vertex(
    fq: &Fq,
    level: &Poly<Fq>,
    v1: &VertexNF,
    v2: &VertexNF,
) -> Result<Option<Mat2>> {
    let g1 = v1.matrix(fq);
    let g2 = v2.matrix(fq);
    match transporter_space(fq, level, &g1, &g2, Mode::Vertex)? {
        None => Ok(None),
        Some(space) => Ok(space.find_unit_det()),
    }
}

/// Order of the stabilizer of an oriented edge in Gamma_0(n); always a
/// multiple of q-1 (the scalars act trivially).
pub fn stabilizer_order(fq: &Fq, level: &Poly<Fq>, e: &EdgeNF) -> Result<u128> {
    let g = e.matrix(fq);
    let space = transporter_space(fq, level, &g, &g, Mode::Edge)?
        .expect("self-transporter has no parity obstruction");
    Ok(space.count_unit_det())
}

/// Order of the stabilizer of a vertex class.
pub fn vertex_stabilizer_order(fq: &Fq, level: &Poly<Fq>, v: &VertexNF) -> Result<u128> {
    let g = v.matrix(fq);
    let space = transporter_space(fq, level, &g, &g, Mode::Vertex)?
        .expect("self-transporter has no parity obstruction");
    Ok(space.count_unit_det())
}

/// A cusp ray: a half-line of classes with stabilizers growing by q.
#[derive(Clone, Debug)]
pub struct Ray {
    /// Finite-part vertex the ray hangs off.
    pub attach: usize,
    /// Ray vertices ordered outward (excluding the attach vertex).
    pub verts: Vec<usize>,
    /// Oriented edge classes pointing outward: attach -> verts[0] -> ...
    pub out_edges: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct VertexClass {
    pub rep: VertexNF,
    pub stab: u128,
    pub depth: usize,
    /// (ray index, position along the ray) when this is a ray vertex.
    pub ray: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct EdgeClass {
    pub rep: EdgeNF,
    pub origin: usize,
    pub terminus: usize,
    pub reversal: usize,
    pub stab: u128,
    /// (ray index, position) when this edge lies on a ray (either direction).
    pub ray: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug)]
pub struct QuotientOptions {
    pub depth: usize,
    /// Minimum number of repeats of the (one new class, stabilizer ratio q)
    /// pattern before a chain is accepted as a cusp ray.
    pub ray_threshold: usize,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions {
            depth: 12,
            ray_threshold: 3,
        }
    }
}

/// The quotient graph Gamma_0(n)\T explored to a fixed depth, with cusp
/// rays detected and the finite part identified.
pub struct QuotientGraph {
    pub fq: Fq,
    pub level: Poly<Fq>,
    pub vertices: Vec<VertexClass>,
    pub edges: Vec<EdgeClass>,
    pub rays: Vec<Ray>,
    pub options: QuotientOptions,
    vcache: Mutex<HashMap<VertexNF, usize>>,
    ecache: Mutex<HashMap<EdgeNF, usize>>,
}

impl QuotientGraph {
    pub fn build(fq: &Fq, level: &Poly<Fq>, options: QuotientOptions) -> Result<QuotientGraph> {
        if level.is_zero() || level.deg().finite().unwrap_or(0) < 1 {
            return Err(Error::domain("level must be nonconstant"));
        }
        let level = level.monic();
        let mut vertices: Vec<VertexClass> = Vec::new();
        let mut edges: Vec<EdgeClass> = Vec::new();
        let mut vcache: HashMap<VertexNF, usize> = HashMap::new();
        let mut ecache: HashMap<EdgeNF, usize> = HashMap::new();
        let v0 = VertexNF::standard(fq);
        let stab0 = vertex_stabilizer_order(fq, &level, &v0)?;
        vertices.push(VertexClass {
            rep: v0.clone(),
            stab: stab0,
            depth: 0,
            ray: None,
        });
        vcache.insert(v0, 0);
        let mut frontier = vec![0usize];
        for depth in 0..options.depth {
            let mut next = Vec::new();
            for &vi in &frontier {
                let rep = vertices[vi].rep.clone();
                for nb in rep.neighbors(fq) {
                    // Identify the neighbor's class.
                    let wi = match vcache.get(&nb) {
                        Some(&w) => w,
                        None => {
                            let stab = vertex_stabilizer_order(fq, &level, &nb)?;
                            let mut found = None;
                            for (ci, c) in vertices.iter().enumerate() {
                                if (c.rep.k - nb.k).rem_euclid(2) != 0 || c.stab != stab {
                                    continue;
                                }
                                if gamma0_equivalent_vertex(fq, &level, &nb, &c.rep)?
                                    .is_some()
                                {
                                    found = Some(ci);
                                    break;
                                }
                            }
                            let w = match found {
                                Some(ci) => ci,
                                None => {
                                    vertices.push(VertexClass {
                                        rep: nb.clone(),
                                        stab,
                                        depth: depth + 1,
                                        ray: None,
                                    });
                                    next.push(vertices.len() - 1);
                                    vertices.len() - 1
                                }
                            };
                            vcache.insert(nb.clone(), w);
                            w
                        }
                    };
                    // Classify the oriented edge rep -> nb.
                    let enf = edge_between(fq, &rep, &nb)?;
                    if ecache.contains_key(&enf) {
                        continue;
                    }
                    let mut found = None;
                    for (ci, c) in edges.iter().enumerate() {
                        if c.origin != vi || c.terminus != wi {
                            continue;
                        }
                        if gamma0_equivalent(fq, &level, &enf, &c.rep)?.is_some() {
                            found = Some(ci);
                            break;
                        }
                    }
                    if let Some(ci) = found {
                        ecache.insert(enf, ci);
                        continue;
                    }
                    // New oriented class; insert it and its reversal.
                    let stab = stabilizer_order(fq, &level, &enf)?;
                    let ei = edges.len();
                    edges.push(EdgeClass {
                        rep: enf.clone(),
                        origin: vi,
                        terminus: wi,
                        reversal: ei + 1,
                        stab,
                        ray: None,
                    });
                    let rev = enf.reverse();
                    edges.push(EdgeClass {
                        rep: rev.clone(),
                        origin: wi,
                        terminus: vi,
                        reversal: ei,
                        stab,
                        ray: None,
                    });
                    ecache.insert(enf, ei);
                    ecache.insert(rev, ei + 1);
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let mut graph = QuotientGraph {
            fq: fq.clone(),
            level,
            vertices,
            edges,
            rays: Vec::new(),
            options,
            vcache: Mutex::new(vcache),
            ecache: Mutex::new(ecache),
        };
        graph.detect_rays(&frontier)?;
        Ok(graph)
    }

    /// Out-edge classes at a vertex class.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.origin == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Walk inward from each frontier vertex along the unique continuation
    /// while the quotient stays a half-line (degree 2) with stabilizer
    /// ratio q per step.  Depth is irrelevant here: a ray may pass through
    /// the BFS root.  The boundary between a ray and the finite part is
    /// only canonical up to sliding along degree-2 geometric chains, which
    /// changes neither the cycle rank nor the cusp count.
    fn detect_rays(&mut self, frontier: &[usize]) -> Result<()> {
        let max_depth = self.options.depth;
        let q = self.fq.order() as u128;
        let mut assigned: Vec<Option<(usize, usize)>> = vec![None; self.vertices.len()];
        let mut is_attach: Vec<bool> = vec![false; self.vertices.len()];
        let mut rays: Vec<Ray> = Vec::new();
        for &f in frontier {
            if assigned[f].is_some() {
                continue;
            }
            let outs_f = self.out_edges(f);
            if outs_f.len() != 1 {
                return Err(Error::depth(format!(
                    "frontier vertex {:?} at depth {max_depth} has {} known edge \
                     classes; the boundary has not stabilized, increase depth",
                    self.vertices[f].rep,
                    outs_f.len()
                )));
            }
            // Chain from the frontier inward.
            let mut chain = vec![f];
            let mut came: Option<usize> = None; // edge class we arrived through
            let mut cur = f;
            let attach;
            loop {
                let outs = self.out_edges(cur);
                let usable: Vec<usize> = outs
                    .into_iter()
                    .filter(|&e| Some(self.edges[e].reversal) != came)
                    .collect();
                if usable.len() != 1 {
                    return Err(Error::depth(format!(
                        "ray walk from frontier {:?} branched unexpectedly; increase depth",
                        self.vertices[f].rep
                    )));
                }
                let e = usable[0];
                let nxt = self.edges[e].terminus;
                let ratio_ok = self.vertices[cur].stab == q * self.vertices[nxt].stab;
                let nxt_degree2 = self.out_edges(nxt).len() == 2;
                if !ratio_ok || !nxt_degree2 || assigned[nxt].is_some() || is_attach[nxt] {
                    attach = nxt;
                    break;
                }
                chain.push(nxt);
                came = Some(e);
                cur = nxt;
            }
            // chain = [frontier, ..., innermost ray vertex]; reverse so the
            // ray runs outward from the attach side.
            let ray_verts: Vec<usize> = chain.into_iter().rev().collect();
            let repeats = ray_verts.len().saturating_sub(1);
            if repeats < self.options.ray_threshold {
                return Err(Error::depth(format!(
                    "non-stabilized ray at depth {max_depth}: frontier vertex {:?} \
                     extends a geometric chain of only {repeats} steps; increase depth",
                    self.vertices[f].rep
                )));
            }
            let ray_id = rays.len();
            is_attach[attach] = true;
            for (pos, &v) in ray_verts.iter().enumerate() {
                assigned[v] = Some((ray_id, pos));
            }
            // Outward edges along the ray.
            let mut out_edges = Vec::new();
            let mut from = attach;
            for &v in &ray_verts {
                let ei = self
                    .edges
                    .iter()
                    .position(|e| e.origin == from && e.terminus == v)
                    .ok_or_else(|| Error::depth("ray edge missing from table"))?;
                out_edges.push(ei);
                from = v;
            }
            rays.push(Ray {
                attach,
                verts: ray_verts,
                out_edges,
            });
        }
        for ray in &rays {
            if assigned[ray.attach].is_some() {
                return Err(Error::depth(
                    "a cusp ray attaches to another ray's interior; \
                     increase depth so the finite part separates the cusps",
                ));
            }
        }
        for (v, a) in assigned.iter().enumerate() {
            if let Some((rid, pos)) = a {
                self.vertices[v].ray = Some((*rid, *pos));
            }
        }
        for (rid, ray) in rays.iter().enumerate() {
            for (pos, &ei) in ray.out_edges.iter().enumerate() {
                self.edges[ei].ray = Some((rid, pos));
                let rev = self.edges[ei].reversal;
                self.edges[rev].ray = Some((rid, pos));
            }
        }
        self.rays = rays;
        Ok(())
    }

    /// Number of cusps found.
    pub fn cusp_count(&self) -> usize {
        self.rays.len()
    }

    /// Vertex classes in the finite part.
    pub fn finite_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.vertices[v].ray.is_none())
            .collect()
    }

    /// Oriented edge classes with both endpoints in the finite part.
    pub fn finite_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].ray.is_none())
            .collect()
    }

    /// Cycle rank of the finite part: E - V + 1 (the graph is connected).
    pub fn genus(&self) -> i64 {
        let vf = self.finite_vertices().len() as i64;
        let ef = (self.finite_edges().len() / 2) as i64;
        ef - vf + 1
    }

    /// Identify the class of an arbitrary vertex normal form.
    pub fn reduce_vertex(&self, v: &VertexNF) -> Result<usize> {
        if let Some(&i) = self.vcache.lock().unwrap().get(v) {
            return Ok(i);
        }
        let stab = vertex_stabilizer_order(&self.fq, &self.level, v)?;
        for (ci, c) in self.vertices.iter().enumerate() {
            if (c.rep.k - v.k).rem_euclid(2) != 0 || c.stab != stab {
                continue;
            }
            if gamma0_equivalent_vertex(&self.fq, &self.level, v, &c.rep)?.is_some() {
                self.vcache.lock().unwrap().insert(v.clone(), ci);
                return Ok(ci);
            }
        }
        Err(Error::depth(format!(
            "vertex {v:?} does not reduce into the explored quotient; increase depth"
        )))
    }

    /// Identify the class of an arbitrary oriented edge normal form.
    pub fn reduce_edge(&self, e: &EdgeNF) -> Result<usize> {
        if let Some(&i) = self.ecache.lock().unwrap().get(e) {
            return Ok(i);
        }
        let o = self.reduce_vertex(&e.origin(&self.fq))?;
        let t = self.reduce_vertex(&e.terminus(&self.fq))?;
        for (ci, c) in self.edges.iter().enumerate() {
            if c.origin != o || c.terminus != t {
                continue;
            }
            if gamma0_equivalent(&self.fq, &self.level, e, &c.rep)?.is_some() {
                self.ecache.lock().unwrap().insert(e.clone(), ci);
                return Ok(ci);
            }
        }
        Err(Error::depth(format!(
            "edge {e:?} does not reduce into the explored quotient; increase depth"
        )))
    }

    /// DOT export (unoriented edges once, with stabilizer and ray markers).
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph quotient {\n");
        s.push_str("  node [shape=circle];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let label = match v.ray {
                Some((r, p)) => format!("v{i}\\nray {r} pos {p}"),
                None => format!("v{i}\\nstab {}", v.stab),
            };
            let style = if v.ray.is_some() {
                ", style=dashed"
            } else {
                ""
            };
            s.push_str(&format!("  v{i} [label=\"{label}\"{style}];\n"));
        }
        let mut seen = vec![false; self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if seen[i] || seen[e.reversal] {
                continue;
            }
            seen[i] = true;
            seen[e.reversal] = true;
            let style = if e.ray.is_some() { " style=dashed" } else { "" };
            let rep = format!(
                "(pi^{}, {}; 0, 1){}",
                e.rep.k,
                lpoly_label(&self.fq, &e.rep.u),
                if e.rep.iota { " iota" } else { "" }
            );
            s.push_str(&format!(
                "  v{} -- v{} [label=\"{} stab {}\"{}];\n",
                e.origin, e.terminus, rep, e.stab, style
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct V {
            id: usize,
            k: i64,
            stab: String,
            ray: Option<(usize, usize)>,
        }
        #[derive(Serialize)]
        struct E {
            id: usize,
            origin: usize,
            terminus: usize,
            reversal: usize,
            k: i64,
            iota: bool,
            u: String,
            stab: String,
            ray: Option<(usize, usize)>,
        }
        let vs: Vec<V> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| V {
                id,
                k: v.rep.k,
                stab: v.stab.to_string(),
                ray: v.ray,
            })
            .collect();
        let es: Vec<E> = self
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| E {
                id,
                origin: e.origin,
                terminus: e.terminus,
                reversal: e.reversal,
                k: e.rep.k,
                iota: e.rep.iota,
                u: lpoly_label(&self.fq, &e.rep.u),
                stab: e.stab.to_string(),
                ray: e.ray,
            })
            .collect();
        serde_json::json!({
            "level": self.level.to_string_with_var("T"),
            "q": self.fq.order(),
            "vertices": vs,
            "edges": es,
            "cusps": self.rays.iter().map(|r| serde_json::json!({
                "attach": r.attach,
                "vertices": r.verts,
                "out_edges": r.out_edges,
            })).collect::<Vec<_>>(),
            "genus": self.genus(),
        })
    }
}

fn lpoly_label(fq: &Fq, u: &LPoly) -> String {
    let terms = u.terms(fq);
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(e, c)| {
            let cs = fq.fmt_elem(c);
            if cs == "1" {
                format!("pi^{e}")
            } else {
                format!("{cs}*pi^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// The oriented edge from v to an adjacent w.
pub fn edge_between(fq: &Fq, v: &VertexNF, w: &VertexNF) -> Result<EdgeNF> {
    if v.k == w.k + 1 && w.u == v.u.truncate_above(fq, w.k) {
        Ok(EdgeNF {
            iota: false,
            k: v.k,
            u: v.u.clone(),
        })
    } else if w.k == v.k + 1 && v.u == w.u.truncate_above(fq, v.k) {
        Ok(EdgeNF {
            iota: true,
            k: w.k,
            u: w.u.clone(),
        })
    } else {
        Err(Error::domain("vertices are not adjacent"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::text::parse_poly;
    use rand::{Rng, SeedableRng};

    #[test]
    fn level_t_is_a_line() {
        let fq = Fq::prime(2).unwrap();
        let level = parse_poly(&fq, "T").unwrap();
        let g = QuotientGraph::build(
            &fq,
            &level,
            QuotientOptions {
                depth: 9,
                ray_threshold: 3,
            },
        )
        .unwrap();
        assert_eq!(g.cusp_count(), 2, "two cusps");
        assert_eq!(g.genus(), 0, "genus zero");
        // The finite part of a line is the single attach vertex... or an
        // edge between two attach vertices; in either case no cycles.
        assert!(g.finite_edges().len() / 2 < 2);
    }

    #[test]
    fn figure_one_combinatorics_q2() {
        let fq = Fq::prime(2).unwrap();
        for lvl in ["T^3+T+1", "T^3+T^2+1"] {
            let level = parse_poly(&fq, lvl).unwrap();
            let g = QuotientGraph::build(
                &fq,
                &level,
                QuotientOptions {
                    depth: 10,
                    ray_threshold: 3,
                },
            )
            .unwrap();
            assert_eq!(g.finite_vertices().len(), 4, "{lvl}: 4 finite vertices");
            assert_eq!(g.finite_edges().len() / 2, 5, "{lvl}: q+3 = 5 edge pairs");
            assert_eq!(g.cusp_count(), 2, "{lvl}: 2 cusps");
            assert_eq!(g.genus(), 2, "{lvl}: genus q = 2");
        }
    }

    #[test]
    fn b_edges_inequivalent_q2() {
        let fq = Fq::prime(2).unwrap();
        let level = parse_poly(&fq, "T^3+T+1").unwrap();
        let b = |uval: u64| {
            EdgeNF::plus(
                3,
                LPoly::from_terms(
                    &fq,
                    [(1i64, fq.one()), (2i64, fq.elem_from_index(uval))],
                ),
            )
        };
        let b0 = b(0);
        let b1 = b(1);
        assert!(gamma0_equivalent(&fq, &level, &b0, &b1)
            .unwrap()
            .is_none());
        assert!(gamma0_equivalent(&fq, &level, &b0, &b0)
            .unwrap()
            .is_some());
    }

    #[test]
    fn equivalence_soundness_roundtrip() {
        let fq = Fq::prime(2).unwrap();
        let level = parse_poly(&fq, "T^2+T+1").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        // gamma_0 in Gamma_0(n): act on an edge; the witness recovered must
        // map e to gamma_0 e.
        for trial in 0..20 {
            let b = LPoly::from_poly_t(
                &Poly::monic_from_index(&fq, rng.gen_range(0..2), rng.gen_range(0..4)),
            );
            let c = LPoly::from_poly_t(&level).mul(
                &fq,
                &LPoly::from_poly_t(&Poly::monic_from_index(&fq, 0, 0)),
            );
            let gamma0 = Mat2 {
                a: LPoly::one(&fq),
                b,
                c,
                d: LPoly::one(&fq)
                    .add(&fq, &LPoly::zero()),
            };
            // Ensure unit determinant (unipotent-ish product).
            let gamma0 = if gamma0.is_unit_det(&fq) {
                gamma0
            } else {
                Mat2::identity(&fq)
            };
            let e = EdgeNF::plus(
                rng.gen_range(-1..3),
                LPoly::from_terms(&fq, [(0i64, fq.elem_from_index(rng.gen_range(0..2)))]),
            );
            let e = EdgeNF {
                u: e.u.truncate_above(&fq, e.k),
                ..e
            };
            let image = super::super::act(&fq, &gamma0, &e).unwrap();
            let w = gamma0_equivalent(&fq, &level, &e, &image)
                .unwrap()
                .expect("equivalent by construction");
            assert_eq!(
                super::super::act(&fq, &w, &e).unwrap(),
                image,
                "trial {trial}"
            );
            // The witness is in Gamma_0(n): c entry divisible by the level.
            let cpoly = w.c.to_poly_t(&fq).unwrap();
            assert!(level.divides(&cpoly) || cpoly.is_zero());
        }
    }

    #[test]
    fn scalar_stabilizer_minimum() {
        let fq = Fq::prime(3).unwrap();
        let level = parse_poly(&fq, "T^2+1").unwrap();
        let e = EdgeNF::plus(1, LPoly::zero());
        let stab = stabilizer_order(&fq, &level, &e).unwrap();
        assert!(stab >= 2, "scalars give at least q-1 = 2, got {stab}");
        assert_eq!(stab % 2, 0);
    }

    #[test]
    fn quotient_vertex_degrees_unfold_to_q_plus_one() {
        // Sum over tree edges at a lift = q + 1, grouped by class.
        let fq = Fq::prime(2).unwrap();
        let level = parse_poly(&fq, "T^3+T+1").unwrap();
        let g = QuotientGraph::build(&fq, &level, QuotientOptions::default()).unwrap();
        for &vi in g.finite_vertices().iter() {
            let rep = g.vertices[vi].rep.clone();
            let mut count = 0;
            for nb in rep.neighbors(&fq) {
                let enf = edge_between(&fq, &rep, &nb).unwrap();
                let _ = g.reduce_edge(&enf).unwrap();
                count += 1;
            }
            assert_eq!(count, 3);
        }
    }
}
