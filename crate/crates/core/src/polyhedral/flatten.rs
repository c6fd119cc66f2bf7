use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use std::collections::BTreeSet;

use super::cone::{from_hrep, primitive_vec, HCone};
use super::{build_complex, is_subdivision, PolyError, PolyhedralComplex, Polyhedron, SubdivisionMap};
use crate::lattice::{dot, dot_rat, integerize, lcm_all, rref, smith_normal_form, solve_rat, to_rat, IntMatrix, Rat};

/// Result of making Γ → L combinatorially flat.
#[derive(Clone, Debug)]
pub struct Flattening {
    /// Γ′, the common refinement of Γ with preimages of cells of 𝓛.
    pub refined: Arc<PolyhedralComplex>,
    /// 𝓛, induced by the images of the cells of Γ.
    pub target: Arc<PolyhedralComplex>,
    /// Γ′ → Γ.
    pub subdivision: SubdivisionMap,
    /// Each cell of Γ′ maps onto this cell of 𝓛.
    pub cell_map: Vec<usize>,
    /// Least common denominator of the vertices of Γ′.
    pub dilation: BigInt,
    pub matrix: IntMatrix,
}

fn map_gen(pi: &IntMatrix, g: &[BigInt]) -> Vec<BigInt> {
    let n = pi.cols;
    let mut out = pi.mul_vec(&g[..n]).expect("shape checked");
    out.push(g[n].clone());
    out
}

/// Pull a homogenized functional on L × R back to N × R.
fn pull_row(pi: &IntMatrix, row: &[BigInt]) -> Vec<BigInt> {
    let l = pi.rows;
    let mut out = pi.transpose().mul_vec(&row[..l]).expect("shape checked");
    out.push(row[l].clone());
    out
}

/// A region of the target together with every hyperplane it has been cut
/// by. All hyperplanes come from the finite canonical set of the images, so
/// each region is a closed face of one arrangement and the refinement stops.
struct Region {
    key: Vec<Vec<BigInt>>,
    cone: HCone,
    hist: BTreeSet<Vec<BigInt>>,
}

impl Region {
    fn new(cone: HCone, hist: BTreeSet<Vec<BigInt>>) -> Region {
        Region { key: cone.canonical_gens(), cone, hist }
    }
}

fn push_unique(regions: &mut Vec<Region>, r: Region) {
    match regions.iter_mut().find(|x| x.key == r.key) {
        Some(x) => x.hist.extend(r.hist),
        None => regions.push(r),
    }
}

/// Primitive, first nonzero entry positive.
fn normalized(v: &[BigInt]) -> Vec<BigInt> {
    let p = primitive_vec(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => p.iter().map(|y| -y).collect(),
        _ => p,
    }
}

/// Hyperplanes cutting out a region, chosen independently of how its
/// H-representation happened to come out: the affine hull in reduced echelon
/// form, and each facet through the hyperplane orthogonal to the hull.
fn canonical_hyperplanes(c: &HCone) -> BTreeSet<Vec<BigInt>> {
    let l = c.m - 1;
    let (ineqs, eqs) = c.hrep();
    let (eq, _) = rref(eqs.iter().map(|r| to_rat(r)).collect(), c.m);
    let gram: Vec<Vec<Rat>> = eq.iter().map(|a| eq.iter().map(|b| dot_rat(&a[..l], &b[..l])).collect()).collect();
    let mut out: BTreeSet<Vec<BigInt>> = eq.iter().map(|r| normalized(&integerize(r))).collect();
    for r in &ineqs {
        let rr = to_rat(r);
        let rhs: Vec<Rat> = eq.iter().map(|e| dot_rat(&e[..l], &rr[..l])).collect();
        let lam = solve_rat(&gram, &rhs, eq.len()).expect("independent equations");
        let mut v = rr;
        for (e, x) in eq.iter().zip(&lam) {
            for (a, b) in v.iter_mut().zip(e) {
                *a -= x * b;
            }
        }
        if v[..l].iter().any(|x| !x.is_zero()) {
            out.insert(normalized(&integerize(&v)));
        }
    }
    out
}

fn affine(c: &HCone) -> bool {
    let t = c.m - 1;
    c.gens.iter().any(|g| g[t].is_positive())
}

fn cut(region: &HCone, h: &[BigInt]) -> Vec<HCone> {
    let pos = region.gens.iter().any(|g| dot(h, g).is_positive());
    let neg = region.gens.iter().any(|g| dot(h, g).is_negative());
    if !(pos && neg) {
        return vec![region.clone()];
    }
    let (ineqs, eqs) = region.hrep();
    let minus: Vec<BigInt> = h.iter().map(|x| -x).collect();
    [h.to_vec(), minus]
        .into_iter()
        .map(|row| {
            let mut i = ineqs.clone();
            i.push(row);
            from_hrep(region.m, &i, &eqs)
        })
        .filter(affine)
        .collect()
}

fn cut_by_all(region: &HCone, rows: &[Vec<BigInt>]) -> Vec<HCone> {
    let mut pieces = vec![region.clone()];
    for h in rows {
        pieces = pieces.iter().flat_map(|p| cut(p, h)).collect();
    }
    pieces
}

fn meets_properly(a: &HCone, b: &HCone) -> bool {
    let i = a.intersect(b);
    !affine(&i) || (i.is_face_of(a) && i.is_face_of(b))
}

pub fn flatten_projection(g: &Arc<PolyhedralComplex>, pi: &IntMatrix) -> Result<Flattening, PolyError> {
    let n = g.rank();
    if pi.cols != n {
        return Err(PolyError::InputShape(format!("{}x{} matrix on a rank-{n} complex", pi.rows, pi.cols)));
    }
    let l = pi.rows;
    let snf = smith_normal_form(pi);
    if snf.rank() != l || snf.diag.iter().any(|d| !d.is_one()) {
        return Err(PolyError::NotSurjective);
    }

    let mut regions: Vec<Region> = Vec::new();
    for c in g.cells() {
        let gens = c.poly.hgens().iter().map(|h| map_gen(pi, h)).collect();
        let cone = HCone::new(l + 1, gens);
        let hist = if cone.is_pointed() { canonical_hyperplanes(&cone) } else { BTreeSet::new() };
        push_unique(&mut regions, Region::new(cone, hist));
    }
    let anchor: Option<Vec<BigInt>> = g.cells().first().map(|c| map_gen(pi, &c.poly.hgens()[0]));

    loop {
        if let Some(r) = regions.iter().find(|r| !r.cone.is_pointed()) {
            let anchor = anchor.as_ref().expect("nonempty complex");
            let rows: Vec<Vec<BigInt>> = r
                .cone
                .lineality()
                .into_iter()
                .map(|lv| {
                    let mut row: Vec<BigInt> = lv[..l].iter().map(|x| x * &anchor[l]).collect();
                    row.push(-dot(&lv[..l], &anchor[..l]));
                    normalized(&row)
                })
                .collect();
            let mut next = Vec::new();
            for r in &regions {
                for p in cut_by_all(&r.cone, &rows) {
                    let mut hist = r.hist.clone();
                    hist.extend(rows.iter().cloned());
                    if p.is_pointed() {
                        hist.extend(canonical_hyperplanes(&p));
                    }
                    push_unique(&mut next, Region::new(p, hist));
                }
            }
            regions = next;
            continue;
        }
        let mut bad = None;
        'search: for i in 0..regions.len() {
            for j in i + 1..regions.len() {
                if !meets_properly(&regions[i].cone, &regions[j].cone) {
                    bad = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((i, j)) = bad else { break };
        let hist: BTreeSet<Vec<BigInt>> = regions[i].hist.union(&regions[j].hist).cloned().collect();
        let rows: Vec<Vec<BigInt>> = hist.iter().cloned().collect();
        let (a, b) = (regions[i].cone.clone(), regions[j].cone.clone());
        let mut next: Vec<Region> = Vec::new();
        for (k, r) in regions.into_iter().enumerate() {
            if k != i && k != j {
                push_unique(&mut next, r);
            }
        }
        for c in [a, b] {
            for p in cut_by_all(&c, &rows) {
                push_unique(&mut next, Region::new(p, hist.clone()));
            }
        }
        regions = next;
    }

    let target_cells = regions
        .into_iter()
        .map(|r| Polyhedron::from_cone(l, r.cone))
        .collect::<Result<Vec<_>, _>>()?;
    let target = Arc::new(build_complex(l, target_cells)?);

    let mut pieces = Vec::new();
    let lam_max = target.maximal_cells();
    for c in g.maximal_cells() {
        let (ineqs, eqs) = g.poly(c).cone.hrep();
        for &lam in &lam_max {
            let (li, le) = target.poly(lam).cone.hrep();
            let mut all_i = ineqs.clone();
            all_i.extend(li.iter().map(|r| pull_row(pi, r)));
            let mut all_e = eqs.clone();
            all_e.extend(le.iter().map(|r| pull_row(pi, r)));
            let cone = from_hrep(n + 1, &all_i, &all_e);
            if affine(&cone) {
                pieces.push(Polyhedron::from_cone(n, cone)?);
            }
        }
    }
    let refined = Arc::new(build_complex(n, pieces)?);

    let mut cell_map = Vec::with_capacity(refined.len());
    for c in refined.cells() {
        let img = Polyhedron::from_hgens(l, c.poly.hgens().iter().map(|h| map_gen(pi, h)).collect())?;
        let k = target.find(img.id()).ok_or_else(|| PolyError::NotFlat(c.poly.id().to_string()))?;
        cell_map.push(k);
    }
    let subdivision = is_subdivision(&refined, g).ok_or_else(|| PolyError::NotFlat("refinement".into()))?;
    let dilation = lcm_all(refined.cells().iter().flat_map(|c| c.poly.vertices()).map(|v| v.denominator()).collect::<Vec<_>>().iter());
    Ok(Flattening { refined, target, subdivision, cell_map, dilation, matrix: pi.clone() })
}

/// Every cell maps onto a cell of the target complex.
pub fn is_combinatorially_flat(g: &PolyhedralComplex, target: &PolyhedralComplex, pi: &IntMatrix) -> bool {
    if pi.cols != g.rank() || pi.rows != target.rank() {
        return false;
    }
    g.cells().iter().all(|c| {
        let gens = c.poly.hgens().iter().map(|h| map_gen(pi, h)).collect();
        match Polyhedron::from_hgens(pi.rows, gens) {
            Ok(img) => target.find(img.id()).is_some(),
            Err(_) => false,
        }
    })
}
