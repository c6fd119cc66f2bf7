#![allow(dead_code)]

use std::sync::Arc;

use ktrop::kweight::KWeighting;
use ktrop::lattice::{IntMatrix, IntVector, Rat, RatVector};
use ktrop::polyhedral::{build_complex, stellar_subdivision, Fan, PolyhedralComplex, Polyhedron, SubdivisionMap};
use ktrop::torick::{product_fan, projective_space, KClass};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn b(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn iv(x: &[i64]) -> IntVector {
    IntVector::from_i64(x)
}

pub fn rv(x: &[i64]) -> RatVector {
    RatVector::from_i64(x)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(b(p), b(q))
}

pub fn hirzebruch(a: i64) -> Fan {
    Fan::new(2, vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, a]), iv(&[0, -1])], vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]])
        .unwrap()
}

/// Smooth complete fans of ranks 1–3.
pub fn catalog() -> Vec<(&'static str, Fan)> {
    let p1 = projective_space(1);
    vec![
        ("P1", p1.clone()),
        ("P2", projective_space(2)),
        ("P1xP1", product_fan(&p1, &p1)),
        ("F1", hirzebruch(1)),
        ("F2", hirzebruch(2)),
        ("P3", projective_space(3)),
        ("P2xP1", product_fan(&projective_space(2), &p1)),
        ("P1xP1xP1", product_fan(&product_fan(&p1, &p1), &p1)),
    ]
}

pub fn random_class(r: &mut ChaCha8Rng, nrays: usize) -> KClass {
    let nterms = r.gen_range(1..=3);
    KClass::from_terms(
        nrays,
        (0..nterms).map(|_| ((0..nrays).map(|_| r.gen_range(-2..=2)).collect(), b(r.gen_range(-3..=3)))),
    )
}

/// The real line with vertices at the given integers.
pub fn line(points: &[i64]) -> Arc<PolyhedralComplex> {
    let mut cells = vec![
        Polyhedron::new(1, vec![rv(&[points[0]])], vec![iv(&[-1])]).unwrap(),
        Polyhedron::new(1, vec![rv(&[*points.last().unwrap()])], vec![iv(&[1])]).unwrap(),
    ];
    for w in points.windows(2) {
        cells.push(Polyhedron::new(1, vec![rv(&[w[0]]), rv(&[w[1]])], vec![]).unwrap());
    }
    Arc::new(build_complex(1, cells).unwrap())
}

/// The plane cut along x ∈ {0,1} and y ∈ {0,1}.
pub fn grid() -> Arc<PolyhedralComplex> {
    let p = |v: &[i64], r: &[&[i64]]| Polyhedron::new(2, v.chunks(2).map(rv).collect(), r.iter().map(|x| iv(x)).collect()).unwrap();
    let cells = vec![
        p(&[0, 0, 1, 0, 0, 1, 1, 1], &[]),
        p(&[1, 0, 1, 1], &[&[1, 0]]),
        p(&[0, 0, 0, 1], &[&[-1, 0]]),
        p(&[0, 1, 1, 1], &[&[0, 1]]),
        p(&[0, 0, 1, 0], &[&[0, -1]]),
        p(&[1, 1], &[&[1, 0], &[0, 1]]),
        p(&[0, 1], &[&[-1, 0], &[0, 1]]),
        p(&[0, 0], &[&[-1, 0], &[0, -1]]),
        p(&[1, 0], &[&[1, 0], &[0, -1]]),
    ];
    Arc::new(build_complex(2, cells).unwrap())
}

/// The subdivided triangle with weights 7 (vertices), 5 (outer edges), 2 (the rest).
pub fn coarsening_triangle() -> KWeighting {
    let p = |v: &[i64]| Polyhedron::new(2, v.chunks(2).map(rv).collect(), vec![]).unwrap();
    let g = Arc::new(build_complex(2, vec![p(&[0, 0, 6, 0, 2, 2]), p(&[6, 0, 0, 6, 2, 2]), p(&[0, 0, 0, 6, 2, 2])]).unwrap());
    let mut k = KWeighting::constant(g.clone(), 2);
    for i in 0..g.len() {
        if g.cell_dim(i) == 0 {
            k.set(i, b(7));
        }
    }
    for id in ["v(0,0);v(6,0)", "v(0,6);v(6,0)", "v(0,0);v(0,6)"] {
        k.set_by_id(id, b(5)).unwrap();
    }
    k
}

/// Base complexes for random weighted examples.
pub fn bases() -> Vec<Arc<PolyhedralComplex>> {
    let mut out: Vec<Arc<PolyhedralComplex>> = catalog().into_iter().filter(|(_, f)| f.rank() <= 2).map(|(_, f)| f.complex_arc()).collect();
    out.push(line(&[0, 2, 3]));
    out.push(grid());
    out.push(coarsening_triangle().complex_arc());
    out
}

/// A point in the relative interior of a random cell (fans: a lattice direction).
pub fn random_point(r: &mut ChaCha8Rng, g: &PolyhedralComplex) -> RatVector {
    if g.is_fan() {
        loop {
            let v: Vec<i64> = (0..g.rank()).map(|_| r.gen_range(-3..=3)).collect();
            if v.iter().any(|&x| x != 0) {
                return rv(&v);
            }
        }
    }
    let cells: Vec<usize> = (0..g.len()).filter(|&i| g.cell_dim(i) > 0).collect();
    g.poly(*cells.choose(r).unwrap()).relint_point()
}

pub fn random_stellar(r: &mut ChaCha8Rng, g: &Arc<PolyhedralComplex>) -> (Arc<PolyhedralComplex>, SubdivisionMap) {
    let p = random_point(r, g);
    stellar_subdivision(g, &p).unwrap()
}

/// Weights drawn from a small range so equal neighbours are common.
pub fn random_weights(r: &mut ChaCha8Rng, g: &Arc<PolyhedralComplex>) -> KWeighting {
    KWeighting::new(g.clone(), (0..g.len()).map(|_| b(r.gen_range(0..=2))).collect()).unwrap()
}

/// A random weighted complex: a base with up to two stellar subdivisions.
pub fn random_weighted(r: &mut ChaCha8Rng) -> KWeighting {
    let all = bases();
    let mut g = all.choose(r).unwrap().clone();
    for _ in 0..r.gen_range(0..=2) {
        g = random_stellar(r, &g).0;
    }
    random_weights(r, &g)
}

/// A random surjective integer row vector (primitive).
pub fn random_row(r: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    loop {
        let row: Vec<i64> = (0..n).map(|_| r.gen_range(-2..=2)).collect();
        let g = row.iter().fold(0i64, |a, &x| num_integer::gcd(a, x));
        if g == 1 {
            return IntMatrix::from_i64(&[&row]);
        }
    }
}

/// Binomial coefficient as an independent oracle (zero outside the usual range).
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k {
        return b(0);
    }
    let mut acc = b(1);
    for i in 0..k {
        acc = acc * b(n - i) / b(i + 1);
    }
    acc
}

/// χ(O(d)) on P^n by Serre duality-aware closed form: C(n+d, n), with
/// negative range through (-1)^n C(-d-1, n).
pub fn chi_pn(n: i64, d: i64) -> BigInt {
    if d >= 0 {
        binom(n + d, n)
    } else if -d - 1 >= n {
        let v = binom(-d - 1, n);
        if n % 2 == 0 {
            v
        } else {
            -v
        }
    } else {
        b(0)
    }
}
