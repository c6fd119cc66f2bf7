mod common;

use std::sync::Arc;

use common::*;
use ktrop::kweight::{canonical_coarsening, dimension_filtration, excess_chi, total_chi, truncate_below, KWeighting};
use ktrop::lattice::RatVector;
use ktrop::polyhedral::{build_complex, PolyhedralComplex, Polyhedron};
use ktrop::project::{check_cycle_balanced, excess_cycle, is_effective};
use ktrop::torick::{chi_line_bundle, product_fan, projective_space, KClass, ToricEngine};

#[test]
fn triangle_coarsening_strata() {
    let k = coarsening_triangle();
    let g = k.complex();
    let s = canonical_coarsening(g, &k).unwrap();
    // four separate 7-points, three 5-edges, one merged 2-region
    assert_eq!(s.num_strata(), 8);
    let count = |w: i64, d: usize| (0..s.num_strata()).filter(|&i| s.weight(i) == &b(w) && s.dim(i) == d).count();
    assert_eq!(count(7, 0), 4);
    assert_eq!(count(5, 1), 3);
    assert_eq!(count(2, 2), 1);
    let inner = s.stratum_of(g.find("v(2,2)").unwrap());
    assert_eq!(s.cells(inner).len(), 1);
    let region = s.stratum_of(g.find("v(0,0);v(2,2)").unwrap());
    assert_eq!(s.cells(region).len(), 6);
    assert_eq!(total_chi(g, &k).unwrap(), b(13));
}

#[test]
fn excess_chi_values() {
    assert_eq!(excess_chi(&b(7), &b(5)), b(2));
    assert_eq!(excess_chi(&b(5), &b(7)), b(-2));
    assert_eq!(excess_chi(&b(3), &b(3)), b(0));
}

/// Three quadrants in R³ (green z=0, red y=0, blue x=0) with the blue one cut
/// by segments through V=(0,1,1) and a marked midpoint M, and a marked point P
/// inside the green one.
fn quadrants() -> KWeighting {
    let p = |v: &[RatVector], r: &[&[i64]]| Polyhedron::new(3, v.to_vec(), r.iter().map(|x| iv(x)).collect()).unwrap();
    let o = rv(&[0, 0, 0]);
    let pp = rv(&[1, 1, 0]);
    let v = rv(&[0, 1, 1]);
    let m = RatVector::new(vec![rat(0, 1), rat(1, 2), rat(1, 2)]);
    let (e1, e2, e3): (&[i64], &[i64], &[i64]) = (&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]);
    let cells = vec![
        p(&[o.clone(), pp.clone()], &[e1]),
        p(&[o.clone(), pp.clone()], &[e2]),
        p(&[pp.clone()], &[e1, e2]),
        p(&[o.clone()], &[e1, e3]),
        p(&[o.clone(), m.clone()], &[e2]),
        p(&[m.clone(), v.clone()], &[e2]),
        p(&[o.clone(), m.clone()], &[e3]),
        p(&[m.clone(), v.clone()], &[e3]),
        p(&[v.clone()], &[e2, e3]),
    ];
    let g: Arc<PolyhedralComplex> = Arc::new(build_complex(3, cells).unwrap());
    let special: [(&str, i64); 11] = [
        ("v(0,0,0)", 12),
        ("v(1,1,0)", 7),
        ("v(0,1,1)", 4),
        ("v(0,1/2,1/2)", 6),
        ("v(0,0,0)|r(1,0,0)", 5),
        ("v(0,0,0)|r(0,1,0)", 1),
        ("v(0,0,0)|r(0,0,1)", 11),
        ("v(0,0,0);v(0,1/2,1/2)", 3),
        ("v(0,1/2,1/2);v(0,1,1)", 3),
        ("v(0,1,1)|r(0,1,0)", 3),
        ("v(0,1,1)|r(0,0,1)", 8),
    ];
    let mut k = KWeighting::zero(g.clone());
    for i in 0..g.len() {
        let x = &g.poly(i).relint_point().entries[0];
        k.set(i, b(if *x == rat(0, 1) { 9 } else { 2 }));
    }
    for (id, w) in special {
        k.set_by_id(id, b(w)).unwrap_or_else(|_| panic!("missing {id}"));
    }
    k
}

#[test]
fn three_step_dimension_filtration() {
    let k = quadrants();
    let g = k.complex();
    let id = |s: &str| g.find(s).unwrap();
    let f = dimension_filtration(g, &k).unwrap();
    assert_eq!(f.len(), 3);
    assert_eq!(f[0], canonical_coarsening(g, &k).unwrap());

    // below 1: the marked points P and M disappear, V and the origin stay
    let t1 = &f[1];
    assert_eq!(*t1, truncate_below(g, &k, 1).unwrap());
    assert_eq!(t1.stratum_of(id("v(1,1,0)")), t1.stratum_of(id("v(0,0,0);v(1,1,0)")));
    let seg = t1.stratum_of(id("v(0,0,0);v(0,1/2,1/2)"));
    assert_eq!(t1.stratum_of(id("v(0,1/2,1/2)")), seg);
    assert_eq!(t1.stratum_of(id("v(0,1/2,1/2);v(0,1,1)")), seg);
    assert_eq!(t1.weight(seg), &b(3));
    let vv = t1.stratum_of(id("v(0,1,1)"));
    assert_eq!((t1.cells(vv).len(), t1.weight(vv)), (1, &b(4)));
    let o = t1.stratum_of(id("v(0,0,0)"));
    assert_eq!((t1.cells(o).len(), t1.weight(o)), (1, &b(12)));
    assert!(f[0].num_strata() > t1.num_strata());

    // below 2: green, red and the x-axis merge; the blue quadrant is one stratum;
    // the y- and z-axes and the origin remain
    let t2 = &f[2];
    let green = t2.stratum_of(id("v(1,1,0)|r(0,1,0);r(1,0,0)"));
    assert_eq!(t2.stratum_of(id("v(0,0,0)|r(0,0,1);r(1,0,0)")), green);
    assert_eq!(t2.stratum_of(id("v(0,0,0)|r(1,0,0)")), green);
    let blue = t2.stratum_of(id("v(0,1,1)|r(0,0,1);r(0,1,0)"));
    assert_eq!(t2.stratum_of(id("v(0,1,1)")), blue);
    assert_eq!(t2.stratum_of(id("v(0,0,0);v(0,1/2,1/2)")), blue);
    assert_eq!(t2.weight(blue), &b(9));
    assert_eq!(t2.num_strata(), 5);
    for (s, w) in [("v(0,0,0)|r(0,1,0)", 1), ("v(0,0,0)|r(0,0,1)", 11), ("v(0,0,0)", 12)] {
        let st = t2.stratum_of(id(s));
        assert_eq!((t2.cells(st).len(), t2.weight(st)), (1, &b(w)), "{s}");
    }
    assert!(t1.refines(t2) && f[0].refines(t1));
}

#[test]
fn projective_plane_chi() {
    let p2 = projective_space(2);
    for d in -5..=5 {
        assert_eq!(chi_line_bundle(&p2, &[b(d), b(0), b(0)]).unwrap(), b((d + 1) * (d + 2) / 2));
    }
}

#[test]
fn quadric_surface_chi() {
    let p1 = projective_space(1);
    let q = product_fan(&p1, &p1);
    for a in -3..=3 {
        for c in -3..=3 {
            assert_eq!(chi_line_bundle(&q, &[b(a), b(0), b(c), b(0)]).unwrap(), b((a + 1) * (c + 1)));
        }
    }
}

#[test]
fn projective_space_chi_all_degrees() {
    for n in 1..=3 {
        let f = projective_space(n);
        let e = ToricEngine::new(&f).unwrap();
        for d in -6..=6 {
            let mut a = vec![b(0); n + 1];
            // spread the degree over the rays: O(d) does not depend on the representative
            a[0] = b(d - d / 2);
            a[n] = b(d / 2);
            assert_eq!(e.chi_line_bundle(&a).unwrap(), chi_pn(n as i64, d), "P{n} O({d})");
        }
    }
}

#[test]
fn excess_on_plane_line_bundle() {
    // O(1) on P²: rays carry χ(O_line(1)) = 2 and cones carry 1; excess 1 everywhere
    let p2 = projective_space(2);
    let e = ToricEngine::new(&p2).unwrap();
    let alpha = KClass::monomial(3, vec![-1, 0, 0], b(1));
    let k = e.decoration_of_class(&alpha).unwrap();
    for r in 0..3 {
        assert_eq!(k.get(p2.cone_of(&[r]).unwrap()), &b(2));
    }
    let c = excess_cycle(p2.complex(), &k, p2.origin()).unwrap();
    assert!(c.top_cells().iter().all(|(_, w)| *w == b(1)));
    assert_eq!(c.top_cells().len(), 3);
    assert!(check_cycle_balanced(&c).balanced);
    assert!(is_effective(&c));
}
