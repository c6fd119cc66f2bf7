use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::{PolyError, Polyhedron};
use crate::lattice::{lattice_index, primitive, IntVector};

#[derive(Clone, Debug)]
pub struct Cell {
    pub poly: Polyhedron,
    pub dim: usize,
    /// Proper faces, as indices into the complex.
    pub faces: Vec<usize>,
}

/// Cells sorted by (dimension, identifier); closed under faces.
#[derive(Clone, Debug)]
pub struct PolyhedralComplex {
    rank: usize,
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
    cofaces: Vec<Vec<usize>>,
}

impl PartialEq for PolyhedralComplex {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| a.poly.id() == b.poly.id())
    }
}
impl Eq for PolyhedralComplex {}

/// Closes the cells under faces, computes the face poset and checks that any
/// two cells meet in a common face.
pub fn build_complex(rank: usize, cells: Vec<Polyhedron>) -> Result<PolyhedralComplex, PolyError> {
    if let Some(bad) = cells.iter().find(|c| c.rank() != rank) {
        return Err(PolyError::InputShape(format!("cell {} is not of rank {rank}", bad.id())));
    }
    let mut all: BTreeMap<(usize, String), Polyhedron> = BTreeMap::new();
    let mut inputs: BTreeMap<String, ()> = BTreeMap::new();
    for c in cells {
        if inputs.insert(c.id().to_string(), ()).is_some() {
            continue;
        }
        for f in c.faces() {
            all.entry((f.dim(), f.id().to_string())).or_insert(f);
        }
    }
    let polys: Vec<Polyhedron> = all.into_values().collect();
    let index: HashMap<String, usize> = polys.iter().enumerate().map(|(i, p)| (p.id().to_string(), i)).collect();
    let mut out = Vec::with_capacity(polys.len());
    for p in &polys {
        let mut faces: Vec<usize> =
            p.faces().iter().filter(|f| f.id() != p.id()).map(|f| index[f.id()]).collect();
        faces.sort();
        out.push(Cell { poly: p.clone(), dim: p.dim(), faces });
    }
    let mut cofaces = vec![Vec::new(); out.len()];
    for (i, c) in out.iter().enumerate() {
        for &f in &c.faces {
            cofaces[f].push(i);
        }
    }
    let complex = PolyhedralComplex { rank, cells: out, index, cofaces };
    let maximal = complex.maximal_cells();
    for (a, &i) in maximal.iter().enumerate() {
        for &j in &maximal[a + 1..] {
            let (p, q) = (complex.poly(i), complex.poly(j));
            if let Some(meet) = p.intersection(q) {
                let ok = match complex.find(meet.id()) {
                    Some(k) => complex.is_face_or_equal(k, i) && complex.is_face_or_equal(k, j),
                    None => false,
                };
                if !ok {
                    return Err(PolyError::NotAComplex(p.id().to_string(), q.id().to_string()));
                }
            }
        }
    }
    Ok(complex)
}

impl PolyhedralComplex {
    pub fn empty(rank: usize) -> Self {
        PolyhedralComplex { rank, cells: Vec::new(), index: HashMap::new(), cofaces: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn poly(&self, i: usize) -> &Polyhedron {
        &self.cells[i].poly
    }

    pub fn id(&self, i: usize) -> &str {
        self.cells[i].poly.id()
    }

    pub fn cell_dim(&self, i: usize) -> usize {
        self.cells[i].dim
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Cells having `i` as a proper face.
    pub fn cofaces(&self, i: usize) -> &[usize] {
        &self.cofaces[i]
    }

    pub fn is_face_or_equal(&self, a: usize, b: usize) -> bool {
        a == b || self.cells[b].faces.binary_search(&a).is_ok()
    }

    pub fn dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn maximal_cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cofaces[i].is_empty()).collect()
    }

    pub fn bounded_cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.poly(i).is_bounded()).collect()
    }

    /// Every cell has the origin as its only vertex.
    pub fn is_fan(&self) -> bool {
        !self.cells.is_empty() && self.cells.iter().all(|c| c.poly.is_cone())
    }

    pub fn contains_point(&self, p: &crate::lattice::RatVector) -> bool {
        self.cells.iter().any(|c| c.poly.contains_point(p))
    }

    /// The cell whose relative interior contains `p` (the smallest cell containing it).
    pub fn locate(&self, p: &crate::lattice::RatVector) -> Option<usize> {
        (0..self.cells.len()).filter(|&i| self.poly(i).contains_point(p)).min_by_key(|&i| self.cells[i].dim)
    }

    /// Support is all of R^n: pure of full dimension and every codimension-one
    /// cell lies in exactly two maximal cells.
    pub fn is_complete(&self) -> bool {
        let n = self.rank;
        if self.cells.is_empty() {
            return false;
        }
        if self.maximal_cells().iter().any(|&i| self.cells[i].dim != n) {
            return false;
        }
        (0..self.cells.len()).filter(|&i| n > 0 && self.cells[i].dim == n - 1).all(|i| self.cofaces[i].len() == 2)
    }

    /// Whether the cell lies in the interior of the support (its star is complete).
    pub fn is_interior_cell(&self, c: usize) -> bool {
        let n = self.rank;
        if self.cells[c].dim == n {
            return true;
        }
        let mut around: Vec<usize> = self.cofaces[c].clone();
        around.push(c);
        around.iter().all(|&i| !self.cofaces[i].is_empty() || self.cells[i].dim == n)
            && around.iter().filter(|&&i| self.cells[i].dim + 1 == n).all(|&i| self.cofaces[i].len() == 2)
    }

    pub fn ids(&self) -> Vec<String> {
        self.cells.iter().map(|c| c.poly.id().to_string()).collect()
    }
}

/// A fan: a complex whose cells are cones at the origin, with the rays indexed.
#[derive(Clone, Debug)]
pub struct Fan {
    complex: Arc<PolyhedralComplex>,
    rays: Vec<IntVector>,
    cones: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.complex == other.complex
    }
}

impl Fan {
    /// Rays keep their given order; each cone lists ray indices.
    pub fn new(rank: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<Fan, PolyError> {
        let rays: Vec<IntVector> = rays.iter().map(primitive).collect::<Result<_, _>>()?;
        if rays.iter().any(|r| r.rank() != rank) {
            return Err(PolyError::InputShape(format!("ray of rank other than {rank}")));
        }
        let mut polys = vec![Polyhedron::cone(rank, vec![])?];
        for c in &cones {
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(PolyError::InputShape(format!("cone references ray {bad} of {}", rays.len())));
            }
            let p = Polyhedron::cone(rank, c.iter().map(|&i| rays[i].clone()).collect())?;
            if p.rays().len() != c.iter().collect::<std::collections::BTreeSet<_>>().len() {
                return Err(PolyError::InputShape(format!("cone {c:?} has redundant rays")));
            }
            polys.push(p);
        }
        for r in &rays {
            polys.push(Polyhedron::cone(rank, vec![r.clone()])?);
        }
        let complex = build_complex(rank, polys)?;
        Self::with_rays(Arc::new(complex), rays)
    }

    pub fn from_complex(complex: Arc<PolyhedralComplex>) -> Result<Fan, PolyError> {
        if !complex.is_fan() {
            return Err(PolyError::NotAFan);
        }
        let rays: Vec<IntVector> =
            complex.cells().iter().filter(|c| c.dim == 1).map(|c| c.poly.rays()[0].clone()).collect();
        Self::with_rays(complex, rays)
    }

    fn with_rays(complex: Arc<PolyhedralComplex>, rays: Vec<IntVector>) -> Result<Fan, PolyError> {
        if !complex.is_fan() {
            return Err(PolyError::NotAFan);
        }
        let ray_index: HashMap<&IntVector, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut cones = Vec::with_capacity(complex.len());
        let mut lookup = HashMap::new();
        for (i, c) in complex.cells().iter().enumerate() {
            let mut idx: Vec<usize> = c
                .poly
                .rays()
                .iter()
                .map(|r| ray_index.get(r).copied().ok_or_else(|| PolyError::UnknownCell(format!("ray {r}"))))
                .collect::<Result<_, _>>()?;
            idx.sort();
            lookup.insert(idx.clone(), i);
            cones.push(idx);
        }
        Ok(Fan { complex, rays, cones, lookup })
    }

    pub fn complex(&self) -> &PolyhedralComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> Arc<PolyhedralComplex> {
        self.complex.clone()
    }

    pub fn rank(&self) -> usize {
        self.complex.rank()
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    /// Ray indices of each cone; aligned with the cells of the complex.
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn num_cones(&self) -> usize {
        self.cones.len()
    }

    /// Index of the cone spanned by the given rays, if it belongs to the fan.
    pub fn cone_of(&self, rays: &[usize]) -> Option<usize> {
        let mut k = rays.to_vec();
        k.sort();
        k.dedup();
        self.lookup.get(&k).copied()
    }

    pub fn origin(&self) -> usize {
        self.cone_of(&[]).expect("every fan contains the origin")
    }

    pub fn cone_dim(&self, i: usize) -> usize {
        self.complex.cell_dim(i)
    }

    pub fn is_complete(&self) -> bool {
        self.complex.is_complete()
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| self.cone_index(c) == BigInt::one())
    }

    /// Lattice index of the rays of a cone inside the saturated lattice of their span.
    pub fn cone_index(&self, cone: &[usize]) -> BigInt {
        let gens: Vec<IntVector> = cone.iter().map(|&i| self.rays[i].clone()).collect();
        lattice_index(&gens).unwrap_or_else(|_| BigInt::from(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RatVector;

    fn seg(a: i64, b: i64) -> Polyhedron {
        Polyhedron::new(1, vec![RatVector::from_i64(&[a]), RatVector::from_i64(&[b])], vec![]).unwrap()
    }

    fn p2() -> Fan {
        let rays = vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1]), IntVector::from_i64(&[-1, -1])];
        Fan::new(2, rays, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn two_segments() {
        let c = build_complex(1, vec![seg(0, 1), seg(1, 2)]).unwrap();
        assert_eq!(c.ids(), vec!["v(0)", "v(1)", "v(2)", "v(0);v(1)", "v(1);v(2)"]);
        assert_eq!(c.maximal_cells(), vec![3, 4]);
        assert!(!c.is_complete());
    }

    #[test]
    fn overlapping_segments_rejected() {
        assert!(matches!(build_complex(1, vec![seg(0, 2), seg(1, 3)]), Err(PolyError::NotAComplex(_, _))));
    }

    #[test]
    fn projective_plane_fan() {
        let f = p2();
        assert_eq!(f.num_cones(), 7);
        assert!(f.is_complete());
        assert!(f.is_smooth());
        assert_eq!(f.cone_of(&[2, 0]).map(|i| f.cone_dim(i)), Some(2));
        assert!((0..f.num_cones()).all(|c| f.complex().is_interior_cell(c)));
    }

    #[test]
    fn overlapping_cones_rejected() {
        let rays = vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1]), IntVector::from_i64(&[1, 1])];
        assert!(Fan::new(2, rays, vec![vec![0, 1], vec![0, 2]]).is_err());
    }

    #[test]
    fn non_smooth_cone_detected() {
        let rays = vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[1, 2])];
        let f = Fan::new(2, rays, vec![vec![0, 1]]).unwrap();
        assert!(!f.is_smooth());
        assert!(!f.is_complete());
    }
}
