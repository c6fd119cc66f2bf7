use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::cone::primitive_vec;
use super::{build_complex, Fan, PolyError, PolyhedralComplex, Polyhedron};
use crate::lattice::{integerize, quotient_map, IntVector, Rat, RatVector};

/// Γ′ → Γ: each source cell goes to the target cell whose relative interior
/// contains its relative interior.
#[derive(Clone, Debug)]
pub struct SubdivisionMap {
    pub source: Arc<PolyhedralComplex>,
    pub target: Arc<PolyhedralComplex>,
    pub cell_map: Vec<usize>,
}

impl SubdivisionMap {
    pub fn identity(c: Arc<PolyhedralComplex>) -> Self {
        let cell_map = (0..c.len()).collect();
        SubdivisionMap { source: c.clone(), target: c, cell_map }
    }

    pub fn is_identity(&self) -> bool {
        *self.source == *self.target && self.cell_map.iter().enumerate().all(|(i, &j)| i == j)
    }
}

#[derive(Clone, Debug)]
pub struct StarFan {
    pub fan: Fan,
    /// Cell of the original complex each cone comes from (aligned with the fan's cones).
    pub origin: Vec<usize>,
}

pub fn star_fan(g: &PolyhedralComplex, f: usize) -> Result<StarFan, PolyError> {
    if f >= g.len() {
        return Err(PolyError::UnknownCell(format!("#{f}")));
    }
    let n = g.rank();
    let face = g.poly(f);
    let q = quotient_map(&face.direction_generators(), n);
    let x0 = face.relint_point();
    let rank = q.rows;
    let mut containing: Vec<usize> = g.cofaces(f).to_vec();
    containing.push(f);
    let mut polys = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for &c in &containing {
        let p = g.poly(c);
        let mut rays = Vec::new();
        for v in p.vertices() {
            let d: Vec<Rat> = v.entries.iter().zip(&x0.entries).map(|(a, b)| a - b).collect();
            let img = integerize(&q.mul_rat_vec(&d));
            rays.push(IntVector::new(img));
        }
        for r in p.rays() {
            rays.push(IntVector::new(q.mul_vec(&r.entries)?));
        }
        rays.retain(|r| !r.is_zero());
        let cone = Polyhedron::cone(rank, rays)?;
        by_id.insert(cone.id().to_string(), c);
        polys.push(cone);
    }
    let complex = build_complex(rank, polys)?;
    let origin = (0..complex.len())
        .map(|i| by_id.get(complex.id(i)).copied().ok_or_else(|| PolyError::UnknownCell(complex.id(i).to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let fan = Fan::from_complex(Arc::new(complex))?;
    Ok(StarFan { fan, origin })
}

#[derive(Clone, Debug)]
pub struct Recession {
    pub fan: Fan,
    /// Specialization: each cell of Γ goes to its recession cone.
    pub sp: Vec<usize>,
}

pub fn recession_fan(g: &PolyhedralComplex) -> Result<Recession, PolyError> {
    let cones: Vec<Polyhedron> = g.cells().iter().map(|c| c.poly.recession_cone()).collect();
    let complex = build_complex(g.rank(), cones.clone()).map_err(|e| match e {
        PolyError::NotAComplex(a, b) => PolyError::RecessionNotFan(format!("{a} and {b}")),
        other => other,
    })?;
    let sp = cones.iter().map(|c| complex.find(c.id()).expect("recession cone present")).collect();
    let fan = Fan::from_complex(Arc::new(complex))?;
    Ok(Recession { fan, sp })
}

pub fn is_subdivision(fine: &Arc<PolyhedralComplex>, coarse: &Arc<PolyhedralComplex>) -> Option<SubdivisionMap> {
    if fine.rank() != coarse.rank() {
        return None;
    }
    let mut cell_map = Vec::with_capacity(fine.len());
    for i in 0..fine.len() {
        let p = fine.poly(i);
        let best = (0..coarse.len()).filter(|&j| coarse.poly(j).contains(p)).min_by_key(|&j| coarse.cell_dim(j))?;
        cell_map.push(best);
    }
    for g in coarse.maximal_cells() {
        let d = coarse.cell_dim(g);
        let pieces: Vec<usize> = (0..fine.len()).filter(|&i| cell_map[i] == g && fine.cell_dim(i) == d).collect();
        if pieces.is_empty() {
            return None;
        }
        if d == 0 {
            continue;
        }
        let mut count: HashMap<usize, usize> = HashMap::new();
        for &p in &pieces {
            for &f in &fine.cell(p).faces {
                if fine.cell_dim(f) + 1 == d && cell_map[f] == g {
                    *count.entry(f).or_default() += 1;
                }
            }
        }
        if count.values().any(|&c| c != 2) {
            return None;
        }
    }
    Some(SubdivisionMap { source: fine.clone(), target: coarse.clone(), cell_map })
}

/// Stellar subdivision at `p`; for fans `p` is a new ray direction.
pub fn stellar_subdivision(
    g: &Arc<PolyhedralComplex>,
    p: &RatVector,
) -> Result<(Arc<PolyhedralComplex>, SubdivisionMap), PolyError> {
    let n = g.rank();
    if p.rank() != n {
        return Err(PolyError::InputShape(format!("point of rank {} in a rank-{n} complex", p.rank())));
    }
    let fan = g.is_fan();
    let unchanged = || Ok((g.clone(), SubdivisionMap::identity(g.clone())));
    let gen: Vec<BigInt> = if fan {
        if p.entries.iter().all(|x| x.is_zero()) {
            return unchanged();
        }
        let mut d = integerize(&p.entries);
        d.push(BigInt::zero());
        d
    } else {
        super::homogenize_point(p)
    };
    let containing: Vec<usize> = (0..g.len()).filter(|&i| g.poly(i).cone.contains(&gen)).collect();
    if containing.is_empty() {
        return Err(PolyError::OutsideSupport(p.to_string()));
    }
    let hit_existing = g.cells().iter().any(|c| {
        c.dim == 1 && fan && primitive_vec(&c.poly.hgens()[1]) == gen
            || c.dim == 0 && !fan && c.poly.hgens()[0] == gen
    });
    if hit_existing {
        return unchanged();
    }
    let mut cells = Vec::new();
    for (i, c) in g.cells().iter().enumerate() {
        if !containing.contains(&i) {
            cells.push(c.poly.clone());
            continue;
        }
        let cone = &c.poly.cone;
        for face in cone.face_sets() {
            if cone.face_contains(&face, &gen) {
                continue;
            }
            let mut gens: Vec<Vec<BigInt>> = face.iter().map(|&k| cone.gens[k].clone()).collect();
            gens.push(gen.clone());
            if gens.iter().any(|h| h[n].is_positive()) {
                cells.push(Polyhedron::from_hgens(n, gens)?);
            }
        }
    }
    let refined = Arc::new(build_complex(n, cells)?);
    let map = is_subdivision(&refined, g).expect("stellar subdivision refines its input");
    Ok((refined, map))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(x: &[i64]) -> IntVector {
        IntVector::from_i64(x)
    }
    fn rv(x: &[i64]) -> RatVector {
        RatVector::from_i64(x)
    }

    fn p2() -> Fan {
        Fan::new(2, vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    /// The real line with vertices at the given integers.
    pub(crate) fn line(points: &[i64]) -> PolyhedralComplex {
        let mut cells = vec![
            Polyhedron::new(1, vec![rv(&[points[0]])], vec![iv(&[-1])]).unwrap(),
            Polyhedron::new(1, vec![rv(&[*points.last().unwrap()])], vec![iv(&[1])]).unwrap(),
        ];
        for w in points.windows(2) {
            cells.push(Polyhedron::new(1, vec![rv(&[w[0]]), rv(&[w[1]])], vec![]).unwrap());
        }
        build_complex(1, cells).unwrap()
    }

    #[test]
    fn star_of_ray_in_p2() {
        let f = p2();
        let e1 = f.cone_of(&[0]).unwrap();
        let s = star_fan(f.complex(), e1).unwrap();
        assert_eq!(s.fan.rank(), 1);
        assert_eq!(s.fan.num_cones(), 3);
        assert!(s.fan.is_complete());
        assert_eq!(s.origin[0], e1);
    }

    #[test]
    fn star_of_origin_is_the_fan() {
        let f = p2();
        let s = star_fan(f.complex(), f.origin()).unwrap();
        assert_eq!(s.fan.complex(), f.complex());
    }

    #[test]
    fn star_of_maximal_cell_is_trivial() {
        let f = p2();
        let s = star_fan(f.complex(), f.cone_of(&[0, 1]).unwrap()).unwrap();
        assert_eq!(s.fan.rank(), 0);
        assert_eq!(s.fan.num_cones(), 1);
        assert!(s.fan.is_complete());
    }

    #[test]
    fn star_of_interior_vertex_of_line() {
        let l = line(&[0, 1]);
        let v1 = l.find("v(1)").unwrap();
        let s = star_fan(&l, v1).unwrap();
        assert!(s.fan.is_complete());
        assert_eq!(s.fan.num_cones(), 3);
    }

    #[test]
    fn recession_of_line() {
        let l = line(&[0, 1]);
        let r = recession_fan(&l).unwrap();
        assert_eq!(r.fan.num_cones(), 3);
        let zero = r.fan.origin();
        for id in ["v(0)", "v(1)", "v(0);v(1)"] {
            assert_eq!(r.sp[l.find(id).unwrap()], zero);
        }
        let neg = r.sp[l.find("v(0)|r(-1)").unwrap()];
        assert_eq!(r.fan.complex().id(neg), "v(0)|r(-1)");
        let pos = r.sp[l.find("v(1)|r(1)").unwrap()];
        assert_eq!(r.fan.complex().id(pos), "v(0)|r(1)");
    }

    #[test]
    fn recession_of_fan_is_identity() {
        let f = p2();
        let r = recession_fan(f.complex()).unwrap();
        assert_eq!(r.fan.complex(), f.complex());
        assert!(r.sp.iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn recession_not_fan() {
        let a = Polyhedron::new(3, vec![rv(&[0, 0, 0])], vec![iv(&[1, 0, 0]), iv(&[1, 2, 0])]).unwrap();
        let b = Polyhedron::new(3, vec![rv(&[0, 0, 1])], vec![iv(&[1, 1, 0]), iv(&[1, -1, 0])]).unwrap();
        let g = build_complex(3, vec![a, b]).unwrap();
        assert!(matches!(recession_fan(&g), Err(PolyError::RecessionNotFan(_))));
    }

    #[test]
    fn subdivision_of_line() {
        let fine = Arc::new(line(&[0, 1]));
        let coarse = Arc::new(line(&[0]));
        let m = is_subdivision(&fine, &coarse).unwrap();
        let ray = coarse.find("v(0)|r(1)").unwrap();
        for id in ["v(1)", "v(0);v(1)", "v(1)|r(1)"] {
            assert_eq!(m.cell_map[fine.find(id).unwrap()], ray);
        }
        assert!(is_subdivision(&coarse, &fine).is_none());
        assert!(is_subdivision(&coarse, &coarse).unwrap().is_identity());
    }

    #[test]
    fn different_supports() {
        let a = Arc::new(build_complex(1, vec![Polyhedron::new(1, vec![rv(&[0]), rv(&[1])], vec![]).unwrap()]).unwrap());
        let b = Arc::new(build_complex(1, vec![Polyhedron::new(1, vec![rv(&[0]), rv(&[2])], vec![]).unwrap()]).unwrap());
        assert!(is_subdivision(&a, &b).is_none());
        assert!(is_subdivision(&b, &a).is_none());
    }

    #[test]
    fn stellar_p2() {
        let f = p2();
        let (g, m) = stellar_subdivision(&f.complex_arc(), &rv(&[1, 1])).unwrap();
        let fan = Fan::from_complex(g).unwrap();
        assert_eq!(fan.rays().len(), 4);
        assert_eq!(fan.complex().maximal_cells().len(), 4);
        assert!(fan.is_smooth() && fan.is_complete());
        assert_eq!(m.target.len(), 7);
    }

    #[test]
    fn stellar_on_existing_ray() {
        let f = p2();
        let (g, m) = stellar_subdivision(&f.complex_arc(), &rv(&[2, 0])).unwrap();
        assert_eq!(*g, *f.complex());
        assert!(m.is_identity());
    }

    #[test]
    fn stellar_segment() {
        let s = Arc::new(build_complex(1, vec![Polyhedron::new(1, vec![rv(&[0]), rv(&[2])], vec![]).unwrap()]).unwrap());
        let (g, _) = stellar_subdivision(&s, &rv(&[1])).unwrap();
        assert_eq!(g.ids(), vec!["v(0)", "v(1)", "v(2)", "v(0);v(1)", "v(1);v(2)"]);
        assert!(matches!(stellar_subdivision(&s, &rv(&[3])), Err(PolyError::OutsideSupport(_))));
    }

    #[test]
    fn stellar_unbounded_cell() {
        let q = Polyhedron::new(2, vec![rv(&[0, 0])], vec![iv(&[1, 0]), iv(&[0, 1])]).unwrap();
        let quad = build_complex(2, vec![q]).unwrap();
        // not a fan once we pick a point: treat as a complex by adding a bounded cell elsewhere
        let seg = Polyhedron::new(2, vec![rv(&[-2, -2]), rv(&[-1, -2])], vec![]).unwrap();
        let mut cells: Vec<Polyhedron> = quad.cells().iter().map(|c| c.poly.clone()).collect();
        cells.push(seg);
        let g = Arc::new(build_complex(2, cells).unwrap());
        let (h, m) = stellar_subdivision(&g, &rv(&[1, 1])).unwrap();
        assert!(h.find("v(1,1)").is_some());
        assert!(h.find("v(1,1)|r(1,0)").is_some());
        assert!(h.find("v(0,0);v(1,1)").is_some());
        assert_eq!(m.source.len(), h.len());
    }
}
