//! Tropical hypersurfaces and regular subdivisions of lattice polytopes.
//!
//! Convention: the hypersurface of a lift h is the corner locus of
//! x ↦ max_m (⟨m,x⟩ − h_m); its dual subdivision is the lower hull of the lift.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{gcd_all, rank_int, IntVector, Rat, RatVector};
use crate::polyhedral::cone::from_hrep;
use crate::polyhedral::{PolyError, Polyhedron};
use crate::project::{ProjectError, TropicalCycle};

/// Guards for the lift sweep.
pub const MAX_LIFTS: u128 = 2_000_000;
pub const MAX_POINTS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HyperError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("hypersurface does not match the polytope: {0}")]
    AsymptoticsMismatch(String),
    #[error("search too large: {0}")]
    TooLarge(String),
    #[error("rank {0} is not supported here")]
    UnsupportedRank(usize),
    #[error("input shape mismatch: {0}")]
    InputShape(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Project(#[from] ProjectError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    rank: usize,
    vertices: Vec<IntVector>,
    /// All lattice points, sorted.
    points: Vec<IntVector>,
    poly: Polyhedron,
}

impl LatticePolytope {
    /// Convex hull of the given lattice points; must be full-dimensional and of dimension ≥ 1.
    pub fn new(points: Vec<IntVector>) -> Result<Self, HyperError> {
        let rank = points.first().map(|p| p.rank()).ok_or_else(|| HyperError::DegenerateInput("no points".into()))?;
        let poly = Polyhedron::new(rank, points.iter().map(|p| p.to_rat()).collect(), vec![])?;
        if poly.dim() == 0 {
            return Err(HyperError::DegenerateInput("zero-dimensional polytope".into()));
        }
        if poly.dim() != rank {
            return Err(HyperError::DegenerateInput(format!("polytope of dimension {} in rank {rank}", poly.dim())));
        }
        let vertices: Vec<IntVector> =
            poly.vertices().iter().map(|v| IntVector::new(v.entries.iter().map(|x| x.to_integer()).collect())).collect();
        let lo: Vec<BigInt> = (0..rank).map(|i| vertices.iter().map(|v| v.entries[i].clone()).min().unwrap()).collect();
        let hi: Vec<BigInt> = (0..rank).map(|i| vertices.iter().map(|v| v.entries[i].clone()).max().unwrap()).collect();
        let mut pts = Vec::new();
        let mut cur = lo.clone();
        loop {
            let p = IntVector::new(cur.clone());
            if poly.contains_point(&p.to_rat()) {
                pts.push(p);
            }
            let mut i = 0;
            loop {
                if i == rank {
                    pts.sort();
                    return Ok(LatticePolytope { rank, vertices, points: pts, poly });
                }
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    break;
                }
                cur[i] = lo[i].clone();
                i += 1;
            }
        }
    }

    pub fn segment(a: i64, b: i64) -> Result<Self, HyperError> {
        Self::new(vec![IntVector::from_i64(&[a]), IntVector::from_i64(&[b])])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[IntVector] {
        &self.vertices
    }

    pub fn lattice_points(&self) -> &[IntVector] {
        &self.points
    }

    fn points_in(&self, verts: &[IntVector]) -> Vec<IntVector> {
        let cell = Polyhedron::new(self.rank, verts.iter().map(|v| v.to_rat()).collect(), vec![])
            .expect("nonempty cell");
        self.points.iter().filter(|p| cell.contains_point(&p.to_rat())).cloned().collect()
    }
}

/// Integer heights on exactly the lattice points of a polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftFunction {
    heights: BTreeMap<IntVector, BigInt>,
}

impl LiftFunction {
    pub fn new(p: &LatticePolytope, heights: BTreeMap<IntVector, BigInt>) -> Result<Self, HyperError> {
        let keys: Vec<&IntVector> = heights.keys().collect();
        let pts: Vec<&IntVector> = p.points.iter().collect();
        if keys != pts {
            return Err(HyperError::InputShape("lift must be defined on exactly the lattice points".into()));
        }
        Ok(LiftFunction { heights })
    }

    pub fn zero(p: &LatticePolytope) -> Self {
        LiftFunction { heights: p.points.iter().map(|q| (q.clone(), BigInt::zero())).collect() }
    }

    /// Heights listed in the order of the polytope's sorted lattice points.
    pub fn from_values(p: &LatticePolytope, values: &[i64]) -> Result<Self, HyperError> {
        if values.len() != p.points.len() {
            return Err(HyperError::InputShape(format!("{} heights for {} points", values.len(), p.points.len())));
        }
        Ok(LiftFunction { heights: p.points.iter().cloned().zip(values.iter().map(|&v| BigInt::from(v))).collect() })
    }

    pub fn heights(&self) -> &BTreeMap<IntVector, BigInt> {
        &self.heights
    }

    pub fn get(&self, m: &IntVector) -> &BigInt {
        &self.heights[m]
    }
}

/// Maximal cells as sorted lattice-point lists, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeSubdivision {
    pub cells: Vec<Vec<IntVector>>,
}

impl LatticeSubdivision {
    pub fn new(mut cells: Vec<Vec<IntVector>>) -> Self {
        for c in cells.iter_mut() {
            c.sort();
            c.dedup();
        }
        cells.sort();
        cells.dedup();
        LatticeSubdivision { cells }
    }

    pub fn trivial(p: &LatticePolytope) -> Self {
        Self::new(vec![p.points.clone()])
    }
}

fn lifted(p: &LatticePolytope, h: &LiftFunction) -> Result<Polyhedron, HyperError> {
    let n = p.rank;
    let pts: Vec<RatVector> = p
        .points
        .iter()
        .map(|m| {
            let mut e: Vec<Rat> = m.entries.iter().map(|x| Rat::from_integer(x.clone())).collect();
            e.push(Rat::from_integer(h.get(m).clone()));
            RatVector::new(e)
        })
        .collect();
    let mut up = vec![0i64; n + 1];
    up[n] = 1;
    Ok(Polyhedron::new(n + 1, pts, vec![IntVector::from_i64(&up)])?)
}

fn project_vertex(v: &RatVector) -> IntVector {
    let n = v.rank() - 1;
    IntVector::new(v.entries[..n].iter().map(|x| x.to_integer()).collect())
}

/// Lower faces of the lift: (maximal cells, edges as vertex pairs).
fn lower_faces(p: &LatticePolytope, h: &LiftFunction) -> Result<(Vec<Vec<IntVector>>, Vec<(IntVector, IntVector)>), HyperError> {
    let n = p.rank;
    let q = lifted(p, h)?;
    let mut cells = Vec::new();
    let mut edges = Vec::new();
    for f in q.faces() {
        if !f.is_bounded() {
            continue;
        }
        let verts: Vec<IntVector> = f.vertices().iter().map(project_vertex).collect();
        if f.dim() == n {
            cells.push(verts.clone());
        }
        if f.dim() == 1 {
            edges.push((verts[0].clone(), verts[1].clone()));
        }
    }
    Ok((cells, edges))
}

/// The regular subdivision induced by the lower hull of the lift.
pub fn regular_subdivision(p: &LatticePolytope, h: &LiftFunction) -> Result<LatticeSubdivision, HyperError> {
    let (cells, _) = lower_faces(p, h)?;
    Ok(LatticeSubdivision::new(cells.iter().map(|c| p.points_in(c)).collect()))
}

pub fn tropical_from_lift(p: &LatticePolytope, h: &LiftFunction) -> Result<(TropicalCycle, LatticeSubdivision), HyperError> {
    let n = p.rank;
    let (cells, edges) = lower_faces(p, h)?;
    let sub = LatticeSubdivision::new(cells.iter().map(|c| p.points_in(c)).collect());
    let mut dual = Vec::with_capacity(edges.len());
    for (a, b) in &edges {
        // ⟨a,x⟩ − h_a = ⟨b,x⟩ − h_b ≥ ⟨m,x⟩ − h_m, homogenized with t ≥ 0
        let row = |m: &IntVector| -> Vec<BigInt> {
            let mut r: Vec<BigInt> = a.entries.iter().zip(&m.entries).map(|(x, y)| x - y).collect();
            r.push(h.get(m) - h.get(a));
            r
        };
        let mut ineqs: Vec<Vec<BigInt>> = p.points.iter().filter(|m| *m != a).map(row).collect();
        let mut t = vec![BigInt::zero(); n + 1];
        t[n] = BigInt::from(1);
        ineqs.push(t);
        let cell = Polyhedron::from_cone(n, from_hrep(n + 1, &ineqs, &[row(b)]))?;
        let d: Vec<BigInt> = a.entries.iter().zip(&b.entries).map(|(x, y)| x - y).collect();
        dual.push((cell, gcd_all(&d)));
    }
    let cycle = TropicalCycle::from_top_weights(n, n - 1, dual)?;
    Ok((cycle, sub))
}

pub fn dual_hypersurface(p: &LatticePolytope) -> Result<TropicalCycle, HyperError> {
    Ok(tropical_from_lift(p, &LiftFunction::zero(p))?.0)
}

fn rot(d: &[BigInt]) -> Vec<BigInt> {
    vec![-d[1].clone(), d[0].clone()]
}

fn angle_key(d: &[BigInt]) -> (u8, Rat) {
    // half-plane, then slope ordering inside it, counterclockwise from angle 0
    let (x, y) = (&d[0], &d[1]);
    let upper = y.is_positive() || (y.is_zero() && x.is_positive());
    let half = if upper { 0 } else { 1 };
    // −cot is increasing in the angle on each open half-plane
    let key = if y.is_zero() { Rat::from_integer(BigInt::from(-1_000_000_000i64)) } else { -Rat::new(x.clone(), y.clone()) };
    (half, key)
}

/// Dual subdivision of a hypersurface, for ranks 1 and 2.
pub fn subdivision_of_hypersurface(c: &TropicalCycle, p: &LatticePolytope) -> Result<LatticeSubdivision, HyperError> {
    let n = p.rank;
    let g = c.complex();
    if g.rank() != n {
        return Err(HyperError::InputShape(format!("cycle of rank {} for a rank-{n} polytope", g.rank())));
    }
    if c.dim() + 1 != n {
        return Err(HyperError::AsymptoticsMismatch("not a hypersurface".into()));
    }
    match n {
        1 => {
            let lo = p.vertices[0].entries[0].clone();
            let hi = p.vertices[1].entries[0].clone();
            let mut pts: Vec<(Rat, BigInt)> = (0..g.len())
                .map(|i| (g.poly(i).vertices()[0].entries[0].clone(), c.weights().get(i).clone()))
                .collect();
            pts.sort();
            let mut cells = Vec::new();
            let mut cur = lo.clone();
            for (_, w) in pts {
                if !w.is_positive() {
                    return Err(HyperError::AsymptoticsMismatch("non-positive weight".into()));
                }
                let next = &cur + &w;
                cells.push(range_points(&cur, &next));
                cur = next;
            }
            if cur != hi || cells.is_empty() {
                return Err(HyperError::AsymptoticsMismatch(format!("total weight reaches {cur}, polytope ends at {hi}")));
            }
            Ok(LatticeSubdivision::new(cells))
        }
        2 => planar_dual(c, p),
        _ => Err(HyperError::UnsupportedRank(n)),
    }
}

fn range_points(a: &BigInt, b: &BigInt) -> Vec<IntVector> {
    let mut out = Vec::new();
    let mut x = a.clone();
    while &x <= b {
        out.push(IntVector::new(vec![x.clone()]));
        x += 1;
    }
    out
}

fn planar_dual(c: &TropicalCycle, p: &LatticePolytope) -> Result<LatticeSubdivision, HyperError> {
    let g = c.complex();
    let verts: Vec<usize> = (0..g.len()).filter(|&i| g.cell_dim(i) == 0).collect();
    if verts.is_empty() {
        return Err(HyperError::AsymptoticsMismatch("hypersurface has no vertex".into()));
    }
    // local polygon at each vertex: list of (edge cell, start, end) in local coordinates
    let mut local: BTreeMap<usize, Vec<(usize, Vec<BigInt>, Vec<BigInt>)>> = BTreeMap::new();
    for &v in &verts {
        let base = &g.poly(v).vertices()[0];
        let mut edges: Vec<(usize, Vec<BigInt>, BigInt)> = Vec::new();
        for &e in g.cofaces(v) {
            if g.cell_dim(e) != 1 {
                continue;
            }
            let rp = g.poly(e).relint_point();
            let d: Vec<Rat> = rp.entries.iter().zip(&base.entries).map(|(a, b)| a - b).collect();
            let dir = crate::lattice::primitive(&IntVector::new(crate::lattice::integerize(&d)))
                .map_err(|e| HyperError::DegenerateInput(e.to_string()))?;
            edges.push((e, dir.entries, c.weights().get(e).clone()));
        }
        edges.sort_by(|a, b| angle_key(&a.1).cmp(&angle_key(&b.1)));
        let mut cur = vec![BigInt::zero(), BigInt::zero()];
        let mut list = Vec::new();
        for (e, d, w) in edges {
            let step: Vec<BigInt> = rot(&d).iter().map(|x| x * &w).collect();
            let next: Vec<BigInt> = cur.iter().zip(&step).map(|(a, b)| a + b).collect();
            list.push((e, cur.clone(), next.clone()));
            cur = next;
        }
        if cur.iter().any(|x| !x.is_zero()) {
            return Err(HyperError::AsymptoticsMismatch(format!("unbalanced at {}", g.id(v))));
        }
        local.insert(v, list);
    }
    // propagate translations across bounded edges
    let mut shift: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    shift.insert(verts[0], vec![BigInt::zero(), BigInt::zero()]);
    queue.push_back(verts[0]);
    while let Some(v) = queue.pop_front() {
        let t = shift[&v].clone();
        for (e, s, _) in &local[&v] {
            for &w in &g.cell(*e).faces {
                if w == v || g.cell_dim(w) != 0 {
                    continue;
                }
                let (_, s2, e2) = local[&w].iter().find(|(x, _, _)| x == e).expect("edge at both ends");
                // the shared dual edge is traversed in opposite directions
                let t2: Vec<BigInt> = (0..2).map(|i| &t[i] + &s[i] - &e2[i]).collect();
                let check: Vec<BigInt> = (0..2).map(|i| &s2[i] + &t2[i]).collect();
                let other_end: Vec<BigInt> =
                    local[&v].iter().find(|(x, _, _)| x == e).map(|(_, _, end)| (0..2).map(|i| &end[i] + &t[i]).collect()).unwrap();
                if check != other_end {
                    return Err(HyperError::AsymptoticsMismatch(format!("edge {} has inconsistent duals", g.id(*e))));
                }
                match shift.get(&w) {
                    Some(old) if *old != t2 => {
                        return Err(HyperError::AsymptoticsMismatch("inconsistent cycle of translations".into()))
                    }
                    Some(_) => {}
                    None => {
                        shift.insert(w, t2);
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    if shift.len() != verts.len() {
        return Err(HyperError::AsymptoticsMismatch("hypersurface is disconnected".into()));
    }
    let polys: Vec<Vec<Vec<BigInt>>> = verts
        .iter()
        .map(|v| local[v].iter().map(|(_, s, _)| (0..2).map(|i| &s[i] + &shift[v][i]).collect()).collect())
        .collect();
    let lex_min = polys.iter().flatten().min().unwrap().clone();
    let target = p.vertices.iter().min().unwrap().entries.clone();
    let delta: Vec<BigInt> = (0..2).map(|i| &target[i] - &lex_min[i]).collect();
    let mut cells = Vec::new();
    let mut area = BigInt::zero();
    for poly in &polys {
        let pts: Vec<IntVector> =
            poly.iter().map(|q| IntVector::new((0..2).map(|i| &q[i] + &delta[i]).collect())).collect();
        area += twice_area(&pts);
        if !pts.iter().all(|q| p.poly.contains_point(&q.to_rat())) {
            return Err(HyperError::AsymptoticsMismatch("dual cell leaves the polytope".into()));
        }
        cells.push(p.points_in(&pts));
    }
    if area != twice_area(&hull_order(p)) {
        return Err(HyperError::AsymptoticsMismatch("dual cells do not tile the polytope".into()));
    }
    Ok(LatticeSubdivision::new(cells))
}

fn twice_area(pts: &[IntVector]) -> BigInt {
    let k = pts.len();
    let mut s = BigInt::zero();
    for i in 0..k {
        let (a, b) = (&pts[i].entries, &pts[(i + 1) % k].entries);
        s += &a[0] * &b[1] - &a[1] * &b[0];
    }
    s.abs()
}

/// Vertices of a polygon in counterclockwise order.
fn hull_order(p: &LatticePolytope) -> Vec<IntVector> {
    let c: Vec<Rat> = (0..2)
        .map(|i| p.vertices.iter().map(|v| Rat::from_integer(v.entries[i].clone())).sum::<Rat>() / Rat::from_integer(BigInt::from(p.vertices.len())))
        .collect();
    let mut vs = p.vertices.clone();
    vs.sort_by_key(|v| {
        let d: Vec<BigInt> = (0..2)
            .map(|i| ((Rat::from_integer(v.entries[i].clone()) - &c[i]) * Rat::from_integer(BigInt::from(p.vertices.len()))).to_integer())
            .collect();
        angle_key(&d)
    });
    vs
}

/// Vertices forming an affine basis of the polytope's span (greedy, in sorted order).
fn affine_basis(p: &LatticePolytope) -> Vec<IntVector> {
    let mut basis = vec![p.vertices[0].clone()];
    let mut diffs: Vec<Vec<BigInt>> = Vec::new();
    for v in &p.vertices[1..] {
        let d: Vec<BigInt> = v.entries.iter().zip(&basis[0].entries).map(|(a, b)| a - b).collect();
        let mut trial = diffs.clone();
        trial.push(d.clone());
        if rank_int(&trial, p.rank) > diffs.len() {
            diffs = trial;
            basis.push(v.clone());
        }
    }
    basis
}

/// Breakpoints of the lower hull of (i, h_i), i = 0..len.
fn segment_breaks(h: &[i128]) -> Vec<usize> {
    let mut stack: Vec<(i128, i128)> = Vec::with_capacity(h.len());
    for (i, &y) in h.iter().enumerate() {
        let p = (i as i128, y);
        while stack.len() >= 2 {
            let (o, a) = (stack[stack.len() - 2], stack[stack.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0 {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(p);
    }
    stack[1..stack.len() - 1].iter().map(|&(x, _)| x as usize).collect()
}

/// Regular subdivisions seen by integer lifts with |h| ≤ bound; heights on an
/// affine basis of vertices are fixed to 0 (lifts differing by an affine
/// function give the same subdivision).
pub fn enumerate_types(p: &LatticePolytope, bound: u32) -> Result<BTreeSet<LatticeSubdivision>, HyperError> {
    let npts = p.points.len();
    if npts > MAX_POINTS {
        return Err(HyperError::TooLarge(format!("{npts} lattice points")));
    }
    let basis = affine_basis(p);
    let free: Vec<usize> = (0..npts).filter(|&i| !basis.contains(&p.points[i])).collect();
    let base = 2 * bound as u128 + 1;
    let total = base.checked_pow(free.len() as u32).filter(|&t| t <= MAX_LIFTS).ok_or_else(|| {
        HyperError::TooLarge(format!("{base}^{} lifts", free.len()))
    })?;
    let decode = |mut idx: u128| -> Vec<i128> {
        let mut h = vec![0i128; npts];
        for &i in &free {
            h[i] = (idx % base) as i128 - bound as i128;
            idx /= base;
        }
        h
    };
    if p.rank == 1 {
        let lo = p.points[0].entries[0].to_i64().ok_or_else(|| HyperError::TooLarge("coordinates".into()))?;
        let breaks: BTreeSet<Vec<usize>> = (0..total)
            .into_par_iter()
            .map(|idx| segment_breaks(&decode(idx)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        let last = npts - 1;
        return Ok(breaks
            .into_iter()
            .map(|b| {
                let mut cuts = vec![0];
                cuts.extend(b);
                cuts.push(last);
                let cells = cuts
                    .windows(2)
                    .map(|w| (w[0]..=w[1]).map(|i| IntVector::from_i64(&[lo + i as i64])).collect())
                    .collect();
                LatticeSubdivision::new(cells)
            })
            .collect());
    }
    let subs: Vec<Result<LatticeSubdivision, HyperError>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let h: Vec<i64> = decode(idx).into_iter().map(|x| x as i64).collect();
            regular_subdivision(p, &LiftFunction::from_values(p, &h)?)
        })
        .collect();
    subs.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::check_cycle_balanced;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn triangle() -> LatticePolytope {
        LatticePolytope::new(vec![IntVector::from_i64(&[0, 0]), IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1])])
            .unwrap()
    }

    #[test]
    fn segments() {
        let c = dual_hypersurface(&LatticePolytope::segment(0, 1).unwrap()).unwrap();
        assert_eq!(c.top_cells(), vec![("v(0)".to_string(), b(1))]);
        let c = dual_hypersurface(&LatticePolytope::segment(0, 2).unwrap()).unwrap();
        assert_eq!(c.top_cells(), vec![("v(0)".to_string(), b(2))]);
        assert!(matches!(LatticePolytope::segment(3, 3), Err(HyperError::DegenerateInput(_))));
    }

    #[test]
    fn tropical_line() {
        let c = dual_hypersurface(&triangle()).unwrap();
        let ids: Vec<String> = c.top_cells().into_iter().map(|(i, _)| i).collect();
        assert_eq!(ids, vec!["v(0,0)|r(-1,0)", "v(0,0)|r(0,-1)", "v(0,0)|r(1,1)"]);
        assert!(check_cycle_balanced(&c).balanced);
    }

    #[test]
    fn segment_lifts() {
        let p = LatticePolytope::segment(0, 2).unwrap();
        let (c, s) = tropical_from_lift(&p, &LiftFunction::from_values(&p, &[0, 0, 0]).unwrap()).unwrap();
        assert_eq!(s, LatticeSubdivision::trivial(&p));
        assert_eq!(c.top_cells(), vec![("v(0)".to_string(), b(2))]);
        let (c, s) = tropical_from_lift(&p, &LiftFunction::from_values(&p, &[0, -1, 0]).unwrap()).unwrap();
        assert_eq!(s.cells.len(), 2);
        assert_eq!(c.top_cells(), vec![("v(-1)".to_string(), b(1)), ("v(1)".to_string(), b(1))]);
        assert_eq!(subdivision_of_hypersurface(&c, &p).unwrap(), s);
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_types(&LatticePolytope::segment(0, 2).unwrap(), 1).unwrap().len(), 2);
        assert_eq!(enumerate_types(&LatticePolytope::segment(0, 3).unwrap(), 2).unwrap().len(), 4);
        assert_eq!(enumerate_types(&triangle(), 1).unwrap().len(), 1);
    }

    #[test]
    fn planar_roundtrip() {
        let sq = LatticePolytope::new(vec![
            IntVector::from_i64(&[0, 0]),
            IntVector::from_i64(&[2, 0]),
            IntVector::from_i64(&[0, 2]),
            IntVector::from_i64(&[2, 2]),
        ])
        .unwrap();
        let h = LiftFunction::from_values(&sq, &[3, 1, 2, 0, -1, 1, 2, 0, 3]).unwrap();
        let (c, s) = tropical_from_lift(&sq, &h).unwrap();
        assert!(check_cycle_balanced(&c).balanced);
        assert_eq!(subdivision_of_hypersurface(&c, &sq).unwrap(), s);
        let c0 = dual_hypersurface(&sq).unwrap();
        assert_eq!(subdivision_of_hypersurface(&c0, &sq).unwrap(), LatticeSubdivision::trivial(&sq));
    }
}
