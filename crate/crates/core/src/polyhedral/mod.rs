//! Fans and polyhedral complexes in V-representation.

mod complex;
pub(crate) mod cone;
mod flatten;
mod ops;

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{integerize, IntVector, LatticeError, Rat, RatVector};
use cone::HCone;

pub use complex::{build_complex, Cell, Fan, PolyhedralComplex};
pub use flatten::{flatten_projection, is_combinatorially_flat, Flattening};
pub use ops::{is_subdivision, recession_fan, star_fan, stellar_subdivision, Recession, StarFan, SubdivisionMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("input shape mismatch: {0}")]
    InputShape(String),
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("polyhedron is not pointed")]
    NotPointed,
    #[error("cells {0} and {1} meet in a non-face")]
    NotAComplex(String, String),
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("recession cones do not form a fan: {0}")]
    RecessionNotFan(String),
    #[error("point {0} lies outside the support")]
    OutsideSupport(String),
    #[error("projection is not surjective onto the target lattice")]
    NotSurjective,
    #[error("complex is not a fan")]
    NotAFan,
    #[error("projection is not combinatorially flat at {0}")]
    NotFlat(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// conv(vertices) + cone(rays), stored canonically: sorted irredundant
/// vertices, sorted primitive rays.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    rank: usize,
    vertices: Vec<RatVector>,
    rays: Vec<IntVector>,
    pub(crate) cone: HCone,
    id: String,
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.id == other.id
    }
}
impl Eq for Polyhedron {}

pub(crate) fn homogenize_point(p: &RatVector) -> Vec<BigInt> {
    let mut h = p.entries.clone();
    h.push(Rat::one());
    integerize(&h)
}

pub(crate) fn homogenize_ray(r: &IntVector) -> Vec<BigInt> {
    let mut h = r.entries.clone();
    h.push(BigInt::zero());
    cone::primitive_vec(&h)
}

fn dehomogenize(g: &[BigInt]) -> Result<RatVector, IntVector> {
    let n = g.len() - 1;
    if g[n].is_zero() {
        Err(IntVector::new(g[..n].to_vec()))
    } else {
        let t = Rat::from_integer(g[n].clone());
        Ok(RatVector::new(g[..n].iter().map(|x| Rat::from_integer(x.clone()) / &t).collect()))
    }
}

pub(crate) fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn cell_id(vertices: &[RatVector], rays: &[IntVector]) -> String {
    let mut s = String::new();
    for (i, v) in vertices.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        s.push_str("v(");
        s.push_str(&v.entries.iter().map(fmt_rat).collect::<Vec<_>>().join(","));
        s.push(')');
    }
    if !rays.is_empty() {
        s.push('|');
        for (i, r) in rays.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            let _ = write!(s, "r{r}");
        }
    }
    s
}

impl Polyhedron {
    pub fn new(rank: usize, vertices: Vec<RatVector>, rays: Vec<IntVector>) -> Result<Self, PolyError> {
        if vertices.iter().any(|v| v.rank() != rank) || rays.iter().any(|r| r.rank() != rank) {
            return Err(PolyError::InputShape(format!("generator of rank other than {rank}")));
        }
        if vertices.is_empty() {
            return Err(PolyError::EmptyPolyhedron);
        }
        let mut gens: Vec<Vec<BigInt>> = vertices.iter().map(homogenize_point).collect();
        gens.extend(rays.iter().filter(|r| !r.is_zero()).map(homogenize_ray));
        Self::from_hgens(rank, gens)
    }

    pub fn point(p: RatVector) -> Self {
        let rank = p.rank();
        Self::new(rank, vec![p], vec![]).expect("a point is a polyhedron")
    }

    /// Cone with apex at the origin.
    pub fn cone(rank: usize, rays: Vec<IntVector>) -> Result<Self, PolyError> {
        Self::new(rank, vec![RatVector::new(vec![Rat::zero(); rank])], rays)
    }

    pub(crate) fn from_hgens(rank: usize, gens: Vec<Vec<BigInt>>) -> Result<Self, PolyError> {
        Self::from_cone(rank, HCone::new(rank + 1, gens))
    }

    pub(crate) fn from_cone(rank: usize, mut cone: HCone) -> Result<Self, PolyError> {
        if !cone.gens.iter().any(|g| g[rank].is_positive()) {
            return Err(PolyError::EmptyPolyhedron);
        }
        if !cone.is_pointed() {
            return Err(PolyError::NotPointed);
        }
        let ext = cone.extreme_gens();
        if ext.len() != cone.gens.len() {
            cone = HCone::new(rank + 1, ext);
        }
        let keyed: Vec<Result<RatVector, IntVector>> = cone.gens.iter().map(|g| dehomogenize(g)).collect();
        let mut order: Vec<usize> = (0..keyed.len()).collect();
        order.sort_by(|&a, &b| match (&keyed[a], &keyed[b]) {
            (Ok(x), Ok(y)) => x.cmp(y),
            (Err(x), Err(y)) => x.cmp(y),
            (Ok(_), Err(_)) => Ordering::Less,
            (Err(_), Ok(_)) => Ordering::Greater,
        });
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        cone.gens = order.iter().map(|&i| cone.gens[i].clone()).collect();
        for f in cone.facets.iter_mut() {
            f.tight = f.tight.iter().map(|&i| inverse[i]).collect();
            f.tight.sort();
        }
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for &i in &order {
            match &keyed[i] {
                Ok(v) => vertices.push(v.clone()),
                Err(r) => rays.push(r.clone()),
            }
        }
        let id = cell_id(&vertices, &rays);
        Ok(Polyhedron { rank, vertices, rays, cone, id })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[RatVector] {
        &self.vertices
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    /// Canonical identifier, e.g. `v(0,0);v(1,0)|r(1,1)`.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.cone.dim - 1
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Single vertex at the origin.
    pub fn is_cone(&self) -> bool {
        self.vertices.len() == 1 && self.vertices[0].entries.iter().all(|x| x.is_zero())
    }

    pub fn contains_point(&self, p: &RatVector) -> bool {
        if p.rank() != self.rank {
            return false;
        }
        let mut h = p.entries.clone();
        h.push(Rat::one());
        self.cone.contains_rat(&h)
    }

    /// Whether the direction lies in the recession cone.
    pub fn contains_direction(&self, r: &IntVector) -> bool {
        r.rank() == self.rank && self.cone.contains(&homogenize_ray(r))
    }

    pub fn contains(&self, other: &Polyhedron) -> bool {
        self.rank == other.rank && self.cone.contains_cone(&other.cone)
    }

    /// Average of the vertices plus the sum of the rays.
    pub fn relint_point(&self) -> RatVector {
        let k = Rat::from_integer(BigInt::from(self.vertices.len()));
        let mut p = vec![Rat::zero(); self.rank];
        for v in &self.vertices {
            for (a, b) in p.iter_mut().zip(&v.entries) {
                *a += b;
            }
        }
        for a in p.iter_mut() {
            *a /= &k;
        }
        for r in &self.rays {
            for (a, b) in p.iter_mut().zip(&r.entries) {
                *a += Rat::from_integer(b.clone());
            }
        }
        RatVector::new(p)
    }

    /// All nonempty faces, including the polyhedron itself.
    pub fn faces(&self) -> Vec<Polyhedron> {
        let n = self.rank;
        self.cone
            .face_sets()
            .into_iter()
            .filter(|s| s.iter().any(|&i| self.cone.gens[i][n].is_positive()))
            .map(|s| {
                if s.len() == self.cone.gens.len() {
                    self.clone()
                } else {
                    let gens = s.iter().map(|&i| self.cone.gens[i].clone()).collect();
                    Polyhedron::from_hgens(n, gens).expect("faces of pointed polyhedra are pointed")
                }
            })
            .collect()
    }

    pub fn recession_cone(&self) -> Polyhedron {
        Polyhedron::cone(self.rank, self.rays.clone()).expect("recession cone of a pointed polyhedron")
    }

    pub fn intersection(&self, other: &Polyhedron) -> Option<Polyhedron> {
        if self.rank != other.rank {
            return None;
        }
        Polyhedron::from_cone(self.rank, self.cone.intersect(&other.cone)).ok()
    }

    /// Homogenized generators: (q·v, q) for vertices, (r, 0) for rays.
    pub(crate) fn hgens(&self) -> &[Vec<BigInt>] {
        &self.cone.gens
    }

    pub fn is_face_of(&self, other: &Polyhedron) -> bool {
        other.contains(self) && self.cone.is_face_of(&other.cone)
    }

    /// Lattice-generating vectors of span(P − P): vertex differences and rays.
    pub fn direction_generators(&self) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        if let Some((v0, rest)) = self.vertices.split_first() {
            for v in rest {
                let d: Vec<Rat> = v.entries.iter().zip(&v0.entries).map(|(a, b)| a - b).collect();
                out.push(integerize(&d));
            }
        }
        out.extend(self.rays.iter().map(|r| r.entries.clone()));
        out
    }
}

impl std::fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.id)
    }
}
