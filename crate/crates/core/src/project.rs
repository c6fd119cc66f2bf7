//! Pushforward of K-weights along linear projections, slices, tropical cycles
//! and classical balancing.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::kweight::{pullback_weights, KWeightError, KWeighting};
use crate::lattice::{
    integer_kernel, integerize, lattice_index, primitive, quotient_map, saturated_basis, smith_solve, solve_rat,
    to_rat, IntMatrix, IntVector, LatticeError, Rat, RatVector,
};
use crate::polyhedral::cone::from_hrep;
use crate::polyhedral::{
    build_complex, flatten_projection, star_fan, Fan, Flattening, PolyError, PolyhedralComplex, Polyhedron,
};
use crate::torick::{KClass, ToricEngine, ToricError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectError {
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("point {0} is not in the relative interior of a top-dimensional target cell")]
    NonGenericPoint(String),
    #[error("not a tropical cycle: {0}")]
    NotACycle(String),
    #[error("input shape mismatch: {0}")]
    InputShape(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    KWeight(#[from] KWeightError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// ℓ = dim(Γ,k): lattice-index weighted sum over ℓ-cells.
    TopDimensional,
    /// Unit indices: alternating sum over all cells onto the target cell.
    UnitIndex,
    /// Fan with a witness class: χ against the pulled-back point class.
    Witness,
}

#[derive(Clone, Debug)]
pub struct Pushforward {
    pub flattening: Flattening,
    /// Weights on the target complex; only ℓ-cells carry nonzero values.
    pub weights: KWeighting,
    pub regime: Regime,
    /// Witness regime: the value obtained from each maximal cone used as the point representative.
    pub representatives: Vec<(String, BigInt)>,
}

/// Weighted pure-dimensional complex with weights in top dimension only.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalCycle {
    weights: KWeighting,
    dim: usize,
}

impl TropicalCycle {
    pub fn new(weights: KWeighting, dim: usize) -> Result<Self, ProjectError> {
        let c = weights.complex();
        if let Some(&m) = c.maximal_cells().iter().find(|&&m| c.cell_dim(m) != dim) {
            return Err(ProjectError::NotACycle(format!("maximal cell {} has dimension other than {dim}", c.id(m))));
        }
        if let Some(i) = (0..c.len()).find(|&i| c.cell_dim(i) != dim && !weights.get(i).is_zero()) {
            return Err(ProjectError::NotACycle(format!("nonzero weight on {}", c.id(i))));
        }
        Ok(TropicalCycle { weights, dim })
    }

    /// Keeps the cells of dimension `dim` with nonzero weight.
    pub fn from_top_weights(rank: usize, dim: usize, cells: Vec<(Polyhedron, BigInt)>) -> Result<Self, ProjectError> {
        let cells: Vec<(Polyhedron, BigInt)> = cells.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        if let Some((p, _)) = cells.iter().find(|(p, _)| p.dim() != dim) {
            return Err(ProjectError::NotACycle(format!("cell {} has dimension other than {dim}", p.id())));
        }
        let ids: BTreeMap<String, BigInt> = cells.iter().map(|(p, w)| (p.id().to_string(), w.clone())).collect();
        let complex = Arc::new(build_complex(rank, cells.into_iter().map(|(p, _)| p).collect())?);
        let k = KWeighting::from_sparse(complex, &ids)?;
        Ok(TropicalCycle { weights: k, dim })
    }

    pub fn weights(&self) -> &KWeighting {
        &self.weights
    }

    pub fn complex(&self) -> &PolyhedralComplex {
        self.weights.complex()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Top cells with their weights.
    pub fn top_cells(&self) -> Vec<(String, BigInt)> {
        let c = self.complex();
        (0..c.len()).filter(|&i| c.cell_dim(i) == self.dim).map(|i| (c.id(i).to_string(), self.weights.get(i).clone())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleBalance {
    pub balanced: bool,
    /// (codimension-one cell, defect in coordinates of the quotient by its span).
    pub defects: Vec<(String, IntVector)>,
}

#[derive(Clone, Debug)]
pub struct Slice {
    pub fiber: Arc<PolyhedralComplex>,
    pub weights: KWeighting,
    /// Point of π⁻¹(p) used as the origin of the fiber coordinates.
    pub origin: RatVector,
    /// Lattice basis of ker π; fiber coordinates c mean origin + Σ c_i basis_i.
    pub basis: Vec<IntVector>,
    pub target_cell: String,
}

/// Index of π(L_F) in the lattice of the image span, for F of full image dimension.
fn map_index(poly: &Polyhedron, pi: &IntMatrix) -> Result<BigInt, ProjectError> {
    let n = poly.rank();
    let basis = saturated_basis(&poly.direction_generators(), n);
    if basis.is_empty() {
        return Ok(BigInt::one());
    }
    let imgs: Vec<IntVector> =
        basis.iter().map(|b| pi.mul_vec(b).map(IntVector::new)).collect::<Result<_, LatticeError>>()?;
    Ok(lattice_index(&imgs)?)
}

fn sign_add(acc: &mut BigInt, w: &BigInt, parity: usize) {
    if parity % 2 == 0 {
        *acc += w;
    } else {
        *acc -= w;
    }
}

pub fn pushforward_weights(
    g: &Arc<PolyhedralComplex>,
    k: &KWeighting,
    pi: &IntMatrix,
    witness: Option<&KClass>,
) -> Result<Pushforward, ProjectError> {
    if *k.complex() != **g {
        return Err(KWeightError::WrongComplex.into());
    }
    let fl = flatten_projection(g, pi)?;
    let l = pi.rows;
    if let Some(alpha) = witness {
        return witness_regime(g, k, pi, alpha, fl);
    }
    let kp = pullback_weights(&fl.subdivision, k)?;
    let refined = fl.refined.clone();
    let target = fl.target.clone();
    let mut weights = vec![BigInt::zero(); target.len()];
    let regime = if k.weighted_dim() == Some(l) || k.weighted_dim().is_none() {
        for f in 0..refined.len() {
            if refined.cell_dim(f) == l && target.cell_dim(fl.cell_map[f]) == l {
                let idx = map_index(refined.poly(f), pi)?;
                weights[fl.cell_map[f]] += idx * kp.get(f);
            }
        }
        Regime::TopDimensional
    } else {
        for f in 0..refined.len() {
            if refined.cell_dim(f) == l && target.cell_dim(fl.cell_map[f]) == l {
                let idx = map_index(refined.poly(f), pi)?;
                if !idx.is_one() {
                    return Err(ProjectError::UnsupportedRegime(format!(
                        "cell {} maps with lattice index {idx} while higher-dimensional cells carry weight",
                        refined.id(f)
                    )));
                }
            }
        }
        for f in 0..refined.len() {
            let lam = fl.cell_map[f];
            if target.cell_dim(lam) == l {
                sign_add(&mut weights[lam], kp.get(f), refined.cell_dim(f) - l);
            }
        }
        Regime::UnitIndex
    };
    let weights = KWeighting::new(target, weights)?;
    Ok(Pushforward { flattening: fl, weights, regime, representatives: vec![] })
}

/// Coefficients of `v` in the rays of `cone` (exact, must be integral).
fn cone_coords(fan: &Fan, cone: usize, v: &[BigInt]) -> Result<Vec<(usize, BigInt)>, ProjectError> {
    let rays = &fan.cones()[cone];
    if rays.is_empty() {
        return Ok(vec![]);
    }
    let cols: Vec<Vec<BigInt>> = rays.iter().map(|&r| fan.rays()[r].entries.clone()).collect();
    let a = IntMatrix::from_columns(&cols, fan.rank());
    let sol = smith_solve(&a, &IntVector::new(v.to_vec()))?
        .ok_or_else(|| ProjectError::UnsupportedRegime("support function is not integral on a non-smooth cone".into()))?;
    if !sol.kernel_basis.is_empty() {
        return Err(ProjectError::UnsupportedRegime("non-simplicial cone in the target".into()));
    }
    Ok(rays.iter().copied().zip(sol.particular.entries).collect())
}

fn witness_regime(
    g: &Arc<PolyhedralComplex>,
    k: &KWeighting,
    pi: &IntMatrix,
    alpha: &KClass,
    fl: Flattening,
) -> Result<Pushforward, ProjectError> {
    if !g.is_fan() {
        return Err(ProjectError::UnsupportedRegime("witness regime needs a fan".into()));
    }
    let l = pi.rows;
    let fan = Fan::from_complex(g.clone())?;
    let eng = ToricEngine::new(&fan)?;
    if eng.decoration_of_class(alpha)? != *k {
        return Err(ProjectError::UnsupportedRegime("witness class does not reproduce the weighting".into()));
    }
    let fine = Fan::from_complex(fl.refined.clone())?;
    let eng2 = ToricEngine::new(&fine)
        .map_err(|e| ProjectError::UnsupportedRegime(format!("flattened fan unusable: {e}")))?;
    let target = Fan::from_complex(fl.target.clone())?;
    let nr2 = fine.rays().len();
    // φ_ρ(v_ρ′) for every ray ρ of Γ and ray ρ′ of Γ′
    let mut phi = vec![vec![0i64; nr2]; fan.rays().len()];
    // π v_ρ′ in the cone of 𝓛 it maps into
    let mut img_coords: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(nr2);
    for (j, v) in fine.rays().iter().enumerate() {
        let cell = fine.cone_of(&[j]).expect("ray cone");
        let sigma = fl.subdivision.cell_map[cell];
        for (r, c) in cone_coords(&fan, sigma, &v.entries)? {
            phi[r][j] = i64::try_from(c).map_err(|_| ProjectError::UnsupportedRegime("huge coefficient".into()))?;
        }
        img_coords.push(cone_coords(&target, fl.cell_map[cell], &pi.mul_vec(&v.entries)?)?);
    }
    let pulled = KClass::from_terms(
        nr2,
        alpha.terms().iter().map(|(e, c)| {
            let mut e2 = vec![0i64; nr2];
            for (r, &er) in e.iter().enumerate() {
                for j in 0..nr2 {
                    e2[j] += er * phi[r][j];
                }
            }
            (e2, c.clone())
        }),
    );
    let mut representatives = Vec::new();
    let mut weights = vec![BigInt::zero(); fl.target.len()];
    for lam in 0..target.num_cones() {
        if target.cone_dim(lam) != l || !target.cone_index(&target.cones()[lam]).is_one() {
            continue;
        }
        let mut point = KClass::one(nr2);
        for &w in &target.cones()[lam] {
            let e: Vec<i64> = img_coords
                .iter()
                .map(|co| co.iter().find(|(r, _)| *r == w).map(|(_, c)| i64::try_from(c).unwrap_or(0)).unwrap_or(0))
                .collect();
            let factor = &KClass::one(nr2) - &KClass::monomial(nr2, e, BigInt::one());
            point = &point * &factor;
        }
        let val = eng2.euler_char(&(&pulled * &point))?;
        weights[lam] = val.clone();
        representatives.push((fl.target.id(lam).to_string(), val));
    }
    if representatives.is_empty() {
        return Err(ProjectError::UnsupportedRegime("no unimodular maximal cone in the target".into()));
    }
    let weights = KWeighting::new(fl.target.clone(), weights)?;
    Ok(Pushforward { flattening: fl, weights, regime: Regime::Witness, representatives })
}

/// Fiber of the weighted complex over a generic point p of the target.
pub fn slice(
    g: &Arc<PolyhedralComplex>,
    k: &KWeighting,
    pi: &IntMatrix,
    p: &RatVector,
) -> Result<Slice, ProjectError> {
    let n = g.rank();
    let l = pi.rows;
    if p.rank() != l {
        return Err(ProjectError::InputShape(format!("point of rank {} for a rank-{l} target", p.rank())));
    }
    if *k.complex() != **g {
        return Err(KWeightError::WrongComplex.into());
    }
    let fl = flatten_projection(g, pi)?;
    let kp = pullback_weights(&fl.subdivision, k)?;
    let lam = fl.target.locate(p).ok_or_else(|| ProjectError::NonGenericPoint(format!("{p}")))?;
    if fl.target.cell_dim(lam) != l {
        return Err(ProjectError::NonGenericPoint(format!("{p}")));
    }
    let over: Vec<usize> = (0..fl.refined.len()).filter(|&f| fl.cell_map[f] == lam).collect();
    for &f in &over {
        if fl.refined.cell_dim(f) == l && !map_index(fl.refined.poly(f), pi)?.is_one() {
            return Err(ProjectError::UnsupportedRegime(format!("cell {} maps with non-unit index", fl.refined.id(f))));
        }
    }
    // π(x) = p·t in homogenized coordinates
    let den = p.denominator();
    let mut eqs = Vec::with_capacity(l);
    for i in 0..l {
        let mut row = pi.row(i);
        row.push(-(&p.entries[i] * Rat::from_integer(den.clone())).to_integer());
        eqs.push(row);
    }
    let mut pieces = Vec::new();
    for &f in &over {
        let (ineq, mut eq) = fl.refined.poly(f).cone.hrep();
        eq.extend(eqs.iter().cloned());
        let cone = from_hrep(n + 1, &ineq, &eq);
        pieces.push((Polyhedron::from_cone(n, cone)?, kp.get(f).clone()));
    }
    let kernel: Vec<IntVector> = integer_kernel(pi).into_iter().map(IntVector::new).collect();
    let origin = pieces
        .iter()
        .flat_map(|(q, _)| q.vertices().iter().cloned())
        .min()
        .ok_or_else(|| ProjectError::NonGenericPoint(format!("{p}")))?;
    let m = kernel.len();
    let krows: Vec<Vec<Rat>> = (0..n).map(|i| kernel.iter().map(|b| Rat::from_integer(b.entries[i].clone())).collect()).collect();
    let coords = |d: &[Rat]| -> Vec<Rat> { solve_rat(&krows, d, m).expect("fiber lies in a translate of ker π") };
    let mut cells = Vec::new();
    let mut ids: BTreeMap<String, BigInt> = BTreeMap::new();
    for (q, w) in &pieces {
        let verts: Vec<RatVector> = q
            .vertices()
            .iter()
            .map(|v| {
                let d: Vec<Rat> = v.entries.iter().zip(&origin.entries).map(|(a, b)| a - b).collect();
                RatVector::new(coords(&d))
            })
            .collect();
        let rays: Vec<IntVector> = q
            .rays()
            .iter()
            .map(|r| primitive(&IntVector::new(integerize(&coords(&to_rat(&r.entries))))))
            .collect::<Result<_, _>>()?;
        let cell = Polyhedron::new(m, verts, rays)?;
        ids.insert(cell.id().to_string(), w.clone());
        cells.push(cell);
    }
    let fiber = Arc::new(build_complex(m, cells)?);
    let weights = KWeighting::from_map(fiber.clone(), &ids)?;
    Ok(Slice { fiber, weights, origin, basis: kernel, target_cell: fl.target.id(lam).to_string() })
}

/// Pushforward of a tropical cycle: Σ k(F)·|index| over cells F of full image dimension.
pub fn cycle_pushforward(c: &TropicalCycle, pi: &IntMatrix) -> Result<TropicalCycle, ProjectError> {
    let r = c.dim;
    let l = pi.rows;
    if c.complex().is_empty() {
        return TropicalCycle::from_top_weights(l, r, vec![]);
    }
    let g = c.weights.complex_arc();
    let fl = flatten_projection(&g, pi)?;
    let kp = pullback_weights(&fl.subdivision, &c.weights)?;
    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
    for f in 0..fl.refined.len() {
        let lam = fl.cell_map[f];
        if fl.refined.cell_dim(f) == r && fl.target.cell_dim(lam) == r && !kp.get(f).is_zero() {
            let idx = map_index(fl.refined.poly(f), pi)?;
            *acc.entry(lam).or_insert_with(BigInt::zero) += idx * kp.get(f);
        }
    }
    let cells = acc.into_iter().map(|(lam, w)| (fl.target.poly(lam).clone(), w)).collect();
    TropicalCycle::from_top_weights(l, r, cells)
}

/// Classical balancing at every codimension-one cell.
pub fn check_cycle_balanced(c: &TropicalCycle) -> CycleBalance {
    let g = c.complex();
    let n = g.rank();
    let mut defects = Vec::new();
    if c.dim == 0 {
        return CycleBalance { balanced: true, defects };
    }
    for d in 0..g.len() {
        if g.cell_dim(d) + 1 != c.dim {
            continue;
        }
        let delta = g.poly(d);
        let q = quotient_map(&delta.direction_generators(), n);
        let base = delta.relint_point();
        let mut sum = vec![BigInt::zero(); q.rows];
        for &t in g.cofaces(d) {
            if g.cell_dim(t) != c.dim {
                continue;
            }
            let w = c.weights.get(t);
            let diff: Vec<Rat> =
                g.poly(t).relint_point().entries.iter().zip(&base.entries).map(|(a, b)| a - b).collect();
            let dir = primitive(&IntVector::new(integerize(&q.mul_rat_vec(&diff)))).expect("nonzero direction");
            for (s, x) in sum.iter_mut().zip(&dir.entries) {
                *s += w * x;
            }
        }
        if sum.iter().any(|x| !x.is_zero()) {
            defects.push((g.id(d).to_string(), IntVector::new(sum)));
        }
    }
    CycleBalance { balanced: defects.is_empty(), defects }
}

/// Excess-χ cycle at a codimension-two cell δ whose star lies in a single
/// higher cell: each ray τ of the star gets k(τ) − k(γ).
pub fn excess_cycle(g: &PolyhedralComplex, k: &KWeighting, delta: usize) -> Result<TropicalCycle, ProjectError> {
    if *k.complex() != *g {
        return Err(KWeightError::WrongComplex.into());
    }
    let star = star_fan(g, delta)?;
    let fan = &star.fan;
    if fan.rank() != 2 {
        return Err(ProjectError::InputShape(format!("cell {} is not of codimension two", g.id(delta))));
    }
    let tops: Vec<usize> = (0..fan.num_cones()).filter(|&c| fan.cone_dim(c) == 2).collect();
    let kg = tops.first().map(|&c| k.get(star.origin[c]).clone()).unwrap_or_else(BigInt::zero);
    if tops.iter().any(|&c| *k.get(star.origin[c]) != kg) {
        return Err(ProjectError::UnsupportedRegime("top cells around the face carry different weights".into()));
    }
    let cells = (0..fan.num_cones())
        .filter(|&c| fan.cone_dim(c) == 1)
        .map(|c| (fan.complex().poly(c).clone(), crate::kweight::excess_chi(k.get(star.origin[c]), &kg)))
        .collect();
    TropicalCycle::from_top_weights(2, 1, cells)
}

/// Whether every weight is nonnegative (effective cycle).
pub fn is_effective(c: &TropicalCycle) -> bool {
    c.weights.weights().iter().all(|w| !w.is_negative())
}
