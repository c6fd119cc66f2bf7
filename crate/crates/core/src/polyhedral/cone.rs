//! Homogenized cones: every polyhedron P ⊂ Q^n is handled through
//! C(P) = cone{(v,1), (r,0)} ⊂ Q^(n+1). Lineality is allowed here; the
//! polyhedron layer insists on pointed cones.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::lattice::{dot, dot_rat, kernel_int, rank_int, Rat};

#[derive(Clone, Debug)]
pub(crate) struct Facet {
    /// Inward normal, primitive, orthogonal to the equations.
    pub normal: Vec<BigInt>,
    /// Indices of generators on the facet.
    pub tight: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct HCone {
    pub m: usize,
    pub gens: Vec<Vec<BigInt>>,
    /// Basis of the orthogonal complement of span(gens).
    pub eqs: Vec<Vec<BigInt>>,
    pub facets: Vec<Facet>,
    pub dim: usize,
}

pub(crate) fn primitive_vec(v: &[BigInt]) -> Vec<BigInt> {
    let g = crate::lattice::gcd_all(v);
    if g.is_zero() {
        v.to_vec()
    } else {
        v.iter().map(|x| x / &g).collect()
    }
}

impl HCone {
    /// Generators are made primitive and deduplicated; zero vectors are dropped.
    pub fn new(m: usize, gens: Vec<Vec<BigInt>>) -> HCone {
        let mut seen = BTreeSet::new();
        let mut clean = Vec::new();
        for g in gens {
            debug_assert_eq!(g.len(), m);
            if g.iter().all(|x| x.is_zero()) {
                continue;
            }
            let p = primitive_vec(&g);
            if seen.insert(p.clone()) {
                clean.push(p);
            }
        }
        let dim = rank_int(&clean, m);
        let eqs = kernel_int(&clean, m);
        let facets = compute_facets(m, &clean, &eqs, dim);
        HCone { m, gens: clean, eqs, facets, dim }
    }

    pub fn contains(&self, g: &[BigInt]) -> bool {
        self.eqs.iter().all(|e| dot(e, g).is_zero())
            && self.facets.iter().all(|f| !dot(&f.normal, g).is_negative())
    }

    pub fn contains_rat(&self, g: &[Rat]) -> bool {
        let conv = |v: &[BigInt]| -> Vec<Rat> { v.iter().map(|x| Rat::from_integer(x.clone())).collect() };
        self.eqs.iter().all(|e| dot_rat(&conv(e), g).is_zero())
            && self.facets.iter().all(|f| !dot_rat(&conv(&f.normal), g).is_negative())
    }

    pub fn contains_cone(&self, other: &HCone) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    pub fn is_pointed(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        if self.facets.is_empty() {
            return false;
        }
        let mut common: BTreeSet<usize> = self.facets[0].tight.iter().copied().collect();
        for f in &self.facets[1..] {
            let t: BTreeSet<usize> = f.tight.iter().copied().collect();
            common = common.intersection(&t).copied().collect();
        }
        common.is_empty()
    }

    /// Generators that are extreme rays (pointed cones only).
    pub fn extreme_gens(&self) -> Vec<Vec<BigInt>> {
        if self.dim <= 1 {
            return self.gens.clone();
        }
        self.gens
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let mut rows = self.eqs.clone();
                rows.extend(self.facets.iter().filter(|f| f.tight.contains(i)).map(|f| f.normal.clone()));
                rank_int(&rows, self.m) == self.m - 1
            })
            .map(|(_, g)| g.clone())
            .collect()
    }

    /// All faces as sorted generator index sets, including the cone itself.
    pub fn face_sets(&self) -> Vec<Vec<usize>> {
        let full: Vec<usize> = (0..self.gens.len()).collect();
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        faces.insert(full);
        for f in &self.facets {
            let tight: BTreeSet<usize> = f.tight.iter().copied().collect();
            let new: Vec<Vec<usize>> =
                faces.iter().map(|s| s.iter().copied().filter(|i| tight.contains(i)).collect()).collect();
            faces.extend(new);
        }
        faces.into_iter().collect()
    }

    /// Facets whose hyperplanes contain every generator in `set`.
    pub fn facets_containing(&self, set: &[usize]) -> Vec<&Facet> {
        self.facets.iter().filter(|f| set.iter().all(|i| f.tight.contains(i))).collect()
    }

    /// Whether `g` lies in the face spanned by the generators in `set`.
    pub fn face_contains(&self, set: &[usize], g: &[BigInt]) -> bool {
        self.contains(g) && self.facets_containing(set).iter().all(|f| dot(&f.normal, g).is_zero())
    }

    /// Inequality rows (normals) and equation rows describing the cone.
    pub fn hrep(&self) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
        (self.facets.iter().map(|f| f.normal.clone()).collect(), self.eqs.clone())
    }

    pub fn intersect(&self, other: &HCone) -> HCone {
        let (mut ineqs, mut eqs) = self.hrep();
        let (i2, e2) = other.hrep();
        ineqs.extend(i2);
        eqs.extend(e2);
        from_hrep(self.m, &ineqs, &eqs)
    }

    /// Sum of generators: a point of the relative interior.
    pub fn interior_point(&self) -> Vec<BigInt> {
        let mut s = vec![BigInt::zero(); self.m];
        for g in &self.gens {
            for (a, b) in s.iter_mut().zip(g) {
                *a += b;
            }
        }
        s
    }

    /// Lineality space basis (rows).
    pub fn lineality(&self) -> Vec<Vec<BigInt>> {
        let (mut rows, eqs) = self.hrep();
        rows.extend(eqs);
        kernel_int(&rows, self.m)
    }

    /// Whether `self` is a face of `outer` (assuming self ⊆ outer).
    pub fn is_face_of(&self, outer: &HCone) -> bool {
        let z = self.interior_point();
        let tight: Vec<&Facet> = outer.facets.iter().filter(|f| dot(&f.normal, &z).is_zero()).collect();
        outer
            .gens
            .iter()
            .filter(|g| tight.iter().all(|f| dot(&f.normal, g).is_zero()))
            .all(|g| self.contains(g))
    }

    /// Canonical description: sorted generators as recomputed from the H-representation.
    pub fn canonical_gens(&self) -> Vec<Vec<BigInt>> {
        let (ineqs, eqs) = self.hrep();
        let mut g = hrep_generators(self.m, &ineqs, &eqs);
        g.sort();
        g
    }
}

fn compute_facets(m: usize, gens: &[Vec<BigInt>], eqs: &[Vec<BigInt>], dim: usize) -> Vec<Facet> {
    if dim == 0 {
        return Vec::new();
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for subset in (0..gens.len()).combinations(dim - 1) {
        let mut rows: Vec<Vec<BigInt>> = subset.iter().map(|&i| gens[i].clone()).collect();
        rows.extend(eqs.iter().cloned());
        if rank_int(&rows, m) != m - 1 {
            continue;
        }
        let mut f = kernel_int(&rows, m).pop().expect("one-dimensional kernel");
        let vals: Vec<BigInt> = gens.iter().map(|g| dot(&f, g)).collect();
        let pos = vals.iter().any(|v| v.is_positive());
        let neg = vals.iter().any(|v| v.is_negative());
        if pos && neg {
            continue;
        }
        if neg {
            f = f.into_iter().map(|x| -x).collect();
        }
        let tight: Vec<usize> = vals.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i).collect();
        if seen.insert(tight.clone()) {
            out.push(Facet { normal: f, tight });
        }
    }
    out
}

/// Generators of {y : ineqs·y ≥ 0, eqs·y = 0}: extreme rays of the pointed part
/// followed by ± a lineality basis.
pub(crate) fn hrep_generators(m: usize, ineqs: &[Vec<BigInt>], eqs: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let ineqs: Vec<Vec<BigInt>> = ineqs
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| primitive_vec(r))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut all = ineqs.clone();
    all.extend(eqs.iter().cloned());
    let lin = kernel_int(&all, m);
    let mut eq_rows: Vec<Vec<BigInt>> = eqs.to_vec();
    eq_rows.extend(lin.iter().cloned());
    let r = rank_int(&eq_rows, m);
    let mut rays: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    if r < m {
        let k = m - 1 - r;
        for subset in (0..ineqs.len()).combinations(k) {
            let mut rows = eq_rows.clone();
            rows.extend(subset.iter().map(|&i| ineqs[i].clone()));
            if rank_int(&rows, m) != m - 1 {
                continue;
            }
            let y = kernel_int(&rows, m).pop().expect("one-dimensional kernel");
            for cand in [y.clone(), y.iter().map(|x| -x).collect::<Vec<_>>()] {
                if ineqs.iter().all(|row| !dot(row, &cand).is_negative()) {
                    rays.insert(cand);
                }
            }
        }
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().collect();
    for l in lin {
        out.push(l.iter().map(|x| -x).collect());
        out.push(l);
    }
    out
}

pub(crate) fn from_hrep(m: usize, ineqs: &[Vec<BigInt>], eqs: &[Vec<BigInt>]) -> HCone {
    HCone::new(m, hrep_generators(m, ineqs, eqs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn quadrant_facets_and_faces() {
        let c = HCone::new(2, vec![v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(c.dim, 2);
        assert_eq!(c.facets.len(), 2);
        assert!(c.is_pointed());
        assert_eq!(c.face_sets().len(), 4);
        assert!(c.contains(&v(&[3, 5])));
        assert!(!c.contains(&v(&[-1, 5])));
    }

    #[test]
    fn halfplane_is_not_pointed() {
        let c = HCone::new(2, vec![v(&[1, 0]), v(&[-1, 0]), v(&[0, 1])]);
        assert_eq!(c.dim, 2);
        assert!(!c.is_pointed());
        assert_eq!(c.lineality().len(), 1);
    }

    #[test]
    fn redundant_generator_removed() {
        let c = HCone::new(2, vec![v(&[1, 0]), v(&[1, 1]), v(&[0, 1])]);
        assert_eq!(c.extreme_gens().len(), 2);
    }

    #[test]
    fn hrep_roundtrip() {
        let c = HCone::new(3, vec![v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[0, 0, 1]), v(&[1, 1, 0])]);
        let (ineqs, eqs) = c.hrep();
        let back = from_hrep(3, &ineqs, &eqs);
        assert!(back.contains_cone(&c) && c.contains_cone(&back));
    }
}
