//! Integer K-weight decorations on complexes and their calculus.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::polyhedral::{recession_fan, Fan, PolyError, PolyhedralComplex, SubdivisionMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KWeightError {
    #[error("weighting does not decorate this complex")]
    WrongComplex,
    #[error("no cell {0} in the complex")]
    UnknownCell(String),
    #[error("cell {0} has no weight")]
    MissingCell(String),
    #[error("{0}")]
    InputRange(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One integer per cell, aligned with the cell order of the complex.
#[derive(Clone, Debug)]
pub struct KWeighting {
    complex: Arc<PolyhedralComplex>,
    weights: Vec<BigInt>,
}

impl PartialEq for KWeighting {
    fn eq(&self, other: &Self) -> bool {
        *self.complex == *other.complex && self.weights == other.weights
    }
}

impl KWeighting {
    pub fn new(complex: Arc<PolyhedralComplex>, weights: Vec<BigInt>) -> Result<Self, KWeightError> {
        if weights.len() != complex.len() {
            return Err(KWeightError::InputRange(format!(
                "{} weights for {} cells",
                weights.len(),
                complex.len()
            )));
        }
        Ok(KWeighting { complex, weights })
    }

    pub fn constant(complex: Arc<PolyhedralComplex>, w: impl Into<BigInt>) -> Self {
        let w = w.into();
        let weights = vec![w; complex.len()];
        KWeighting { complex, weights }
    }

    pub fn zero(complex: Arc<PolyhedralComplex>) -> Self {
        Self::constant(complex, 0)
    }

    /// Every cell must be keyed exactly once.
    pub fn from_map(complex: Arc<PolyhedralComplex>, map: &BTreeMap<String, BigInt>) -> Result<Self, KWeightError> {
        if let Some(bad) = map.keys().find(|id| complex.find(id).is_none()) {
            return Err(KWeightError::UnknownCell(bad.clone()));
        }
        let weights = (0..complex.len())
            .map(|i| map.get(complex.id(i)).cloned().ok_or_else(|| KWeightError::MissingCell(complex.id(i).to_string())))
            .collect::<Result<_, _>>()?;
        Ok(KWeighting { complex, weights })
    }

    /// Like `from_map`, but cells not listed get weight zero.
    pub fn from_sparse(complex: Arc<PolyhedralComplex>, map: &BTreeMap<String, BigInt>) -> Result<Self, KWeightError> {
        let mut k = Self::zero(complex);
        for (id, w) in map {
            k.set_by_id(id, w.clone())?;
        }
        Ok(k)
    }

    pub fn complex(&self) -> &PolyhedralComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> Arc<PolyhedralComplex> {
        self.complex.clone()
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn get(&self, cell: usize) -> &BigInt {
        &self.weights[cell]
    }

    pub fn by_id(&self, id: &str) -> Option<&BigInt> {
        self.complex.find(id).map(|i| &self.weights[i])
    }

    pub fn set(&mut self, cell: usize, w: BigInt) {
        self.weights[cell] = w;
    }

    pub fn set_by_id(&mut self, id: &str, w: BigInt) -> Result<(), KWeightError> {
        let i = self.complex.find(id).ok_or_else(|| KWeightError::UnknownCell(id.to_string()))?;
        self.weights[i] = w;
        Ok(())
    }

    pub fn to_map(&self) -> BTreeMap<String, BigInt> {
        (0..self.complex.len()).map(|i| (self.complex.id(i).to_string(), self.weights[i].clone())).collect()
    }

    /// dim(Γ,k): the largest dimension of a cell with nonzero weight.
    pub fn weighted_dim(&self) -> Option<usize> {
        (0..self.weights.len()).filter(|&i| !self.weights[i].is_zero()).map(|i| self.complex.cell_dim(i)).max()
    }
}

/// Integer polynomial in t₀..t_d, exponent vector → coefficient.
pub type Polynomial = BTreeMap<Vec<u32>, BigInt>;

/// Polynomial decorations; stored and round-tripped only.
#[derive(Clone, Debug)]
pub struct PolynomialWeighting {
    complex: Arc<PolyhedralComplex>,
    weights: Vec<Polynomial>,
}

impl PolynomialWeighting {
    pub fn from_map(complex: Arc<PolyhedralComplex>, map: &BTreeMap<String, Polynomial>) -> Result<Self, KWeightError> {
        if let Some(bad) = map.keys().find(|id| complex.find(id).is_none()) {
            return Err(KWeightError::UnknownCell(bad.clone()));
        }
        let weights = (0..complex.len())
            .map(|i| map.get(complex.id(i)).cloned().ok_or_else(|| KWeightError::MissingCell(complex.id(i).to_string())))
            .collect::<Result<_, _>>()?;
        Ok(PolynomialWeighting { complex, weights })
    }

    pub fn complex(&self) -> &PolyhedralComplex {
        &self.complex
    }

    pub fn get(&self, cell: usize) -> &Polynomial {
        &self.weights[cell]
    }

    pub fn to_map(&self) -> BTreeMap<String, Polynomial> {
        (0..self.complex.len()).map(|i| (self.complex.id(i).to_string(), self.weights[i].clone())).collect()
    }
}

/// A partition of the open cells of a complex into strata, with one weight per stratum.
/// Strata are numbered in order of their first cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Stratification {
    complex: Arc<PolyhedralComplex>,
    cell_stratum: Vec<usize>,
    weights: Vec<BigInt>,
}

impl Stratification {
    /// Renumbers the labels in order of first appearance.
    fn from_labels(complex: Arc<PolyhedralComplex>, labels: &[usize], cell_weights: &[BigInt]) -> Self {
        let mut renum: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cell_stratum = Vec::with_capacity(labels.len());
        let mut weights = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let next = renum.len();
            let s = *renum.entry(*l).or_insert_with(|| {
                weights.push(cell_weights[i].clone());
                next
            });
            cell_stratum.push(s);
        }
        Stratification { complex, cell_stratum, weights }
    }

    pub fn complex(&self) -> &PolyhedralComplex {
        &self.complex
    }

    pub fn num_strata(&self) -> usize {
        self.weights.len()
    }

    pub fn stratum_of(&self, cell: usize) -> usize {
        self.cell_stratum[cell]
    }

    pub fn weight(&self, stratum: usize) -> &BigInt {
        &self.weights[stratum]
    }

    pub fn cells(&self, stratum: usize) -> Vec<usize> {
        (0..self.cell_stratum.len()).filter(|&i| self.cell_stratum[i] == stratum).collect()
    }

    pub fn strata(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.weights.len()];
        for (i, &s) in self.cell_stratum.iter().enumerate() {
            out[s].push(i);
        }
        out
    }

    /// Dimension of a stratum: the largest dimension of its cells.
    pub fn dim(&self, stratum: usize) -> usize {
        self.cells(stratum).iter().map(|&c| self.complex.cell_dim(c)).max().unwrap_or(0)
    }

    /// The weighting that is constant on strata.
    pub fn cell_weights(&self) -> KWeighting {
        let weights = self.cell_stratum.iter().map(|&s| self.weights[s].clone()).collect();
        KWeighting { complex: self.complex.clone(), weights }
    }

    /// Every stratum of `self` lies inside one stratum of `coarser` (same complex).
    pub fn refines(&self, coarser: &Stratification) -> bool {
        if *self.complex != *coarser.complex {
            return false;
        }
        let mut image: Vec<Option<usize>> = vec![None; self.num_strata()];
        for (c, &s) in self.cell_stratum.iter().enumerate() {
            let t = coarser.cell_stratum[c];
            match image[s] {
                None => image[s] = Some(t),
                Some(u) if u != t => return false,
                _ => {}
            }
        }
        true
    }

    /// Whether `self` (on the source of `sub`) and `other` (on its target)
    /// describe the same strata with the same weights.
    pub fn same_as(&self, other: &Stratification, sub: &SubdivisionMap) -> bool {
        if *self.complex != *sub.source || *other.complex != *sub.target {
            return false;
        }
        let mut fwd: BTreeMap<usize, usize> = BTreeMap::new();
        let mut back: BTreeMap<usize, usize> = BTreeMap::new();
        for (c, &s) in self.cell_stratum.iter().enumerate() {
            let t = other.cell_stratum[sub.cell_map[c]];
            if *fwd.entry(s).or_insert(t) != t || *back.entry(t).or_insert(s) != s {
                return false;
            }
        }
        fwd.len() == self.num_strata()
            && back.len() == other.num_strata()
            && fwd.iter().all(|(&s, &t)| self.weights[s] == other.weights[t])
    }
}

fn check_same(a: &PolyhedralComplex, b: &PolyhedralComplex) -> Result<(), KWeightError> {
    if a == b {
        Ok(())
    } else {
        Err(KWeightError::WrongComplex)
    }
}

pub fn pullback_weights(sub: &SubdivisionMap, k: &KWeighting) -> Result<KWeighting, KWeightError> {
    check_same(&sub.target, &k.complex)?;
    let weights = sub.cell_map.iter().map(|&c| k.weights[c].clone()).collect();
    Ok(KWeighting { complex: sub.source.clone(), weights })
}

/// k₀(G) = Σ_{sp(F) = G} (−1)^{dim F − dim G} k(F) on the recession fan.
pub fn asymptotic_weights(g: &PolyhedralComplex, k: &KWeighting) -> Result<(Fan, KWeighting), KWeightError> {
    check_same(g, &k.complex)?;
    let rec = recession_fan(g)?;
    let fc = rec.fan.complex_arc();
    let mut w = vec![BigInt::zero(); fc.len()];
    for (f, &target) in rec.sp.iter().enumerate() {
        let sign = (g.cell_dim(f) - fc.cell_dim(target)) % 2;
        if sign == 0 {
            w[target] += &k.weights[f];
        } else {
            w[target] -= &k.weights[f];
        }
    }
    Ok((rec.fan, KWeighting { complex: fc, weights: w }))
}

/// Σ over bounded cells of (−1)^dim · k.
pub fn total_chi(g: &PolyhedralComplex, k: &KWeighting) -> Result<BigInt, KWeightError> {
    check_same(g, &k.complex)?;
    let mut s = BigInt::zero();
    for c in g.bounded_cells() {
        if g.cell_dim(c) % 2 == 0 {
            s += &k.weights[c];
        } else {
            s -= &k.weights[c];
        }
    }
    Ok(s)
}

pub fn excess_chi(k_tau: &BigInt, k_gamma: &BigInt) -> BigInt {
    k_tau - k_gamma
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Strata are the connected components of the level sets of k.
pub fn canonical_coarsening(g: &PolyhedralComplex, k: &KWeighting) -> Result<Stratification, KWeightError> {
    coarsening(g, k, true)
}

/// With `connected = false` strata are the raw level sets.
pub fn coarsening(g: &PolyhedralComplex, k: &KWeighting, connected: bool) -> Result<Stratification, KWeightError> {
    check_same(g, &k.complex)?;
    let n = g.len();
    let labels: Vec<usize> = if connected {
        let mut uf = UnionFind::new(n);
        for c in 0..n {
            for &f in &g.cell(c).faces {
                if k.weights[f] == k.weights[c] {
                    uf.union(f, c);
                }
            }
        }
        (0..n).map(|i| uf.find(i)).collect()
    } else {
        let mut first: BTreeMap<&BigInt, usize> = BTreeMap::new();
        (0..n).map(|i| *first.entry(&k.weights[i]).or_insert(i)).collect()
    };
    Ok(Stratification::from_labels(k.complex.clone(), &labels, &k.weights))
}

/// Candidate neighbours of a stratum: another stratum, or the complement of the support.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Nbr {
    Stratum(usize),
    Outside,
}

/// One reassignment pass over strata of dimension < s, highest dimension first.
fn truncate_step(g: &PolyhedralComplex, st: &Stratification, s: usize) -> Vec<BigInt> {
    let strata = st.strata();
    let dims: Vec<usize> = (0..strata.len()).map(|i| st.dim(i)).collect();
    let boundary: Vec<bool> = strata.iter().map(|cells| cells.iter().any(|&c| !g.is_interior_cell(c))).collect();
    // below[t] = strata having a cell that is a proper face of a cell of t
    let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); strata.len()];
    for c in 0..g.len() {
        let t = st.stratum_of(c);
        for &f in &g.cell(c).faces {
            let u = st.stratum_of(f);
            if u != t {
                below[t].insert(u);
            }
        }
    }
    let mut weights = st.weights.clone();
    for d in (0..s).rev() {
        let mut updates = Vec::new();
        for (i, cells) in strata.iter().enumerate() {
            if dims[i] != d {
                continue;
            }
            let mut cand: BTreeSet<Nbr> = BTreeSet::new();
            for &c in cells {
                for &cf in g.cofaces(c) {
                    let t = st.stratum_of(cf);
                    if t != i {
                        cand.insert(Nbr::Stratum(t));
                    }
                }
            }
            if boundary[i] {
                cand.insert(Nbr::Outside);
            }
            let precedes = |a: Nbr, b: Nbr| match (a, b) {
                (Nbr::Stratum(x), Nbr::Stratum(y)) => below[y].contains(&x),
                (Nbr::Stratum(x), Nbr::Outside) => boundary[x],
                (Nbr::Outside, _) => false,
            };
            let minimal: Vec<Nbr> =
                cand.iter().copied().filter(|&b| !cand.iter().any(|&a| a != b && precedes(a, b))).collect();
            let ws: BTreeSet<BigInt> = minimal
                .iter()
                .map(|m| match m {
                    Nbr::Stratum(t) => weights[*t].clone(),
                    Nbr::Outside => BigInt::zero(),
                })
                .collect();
            if ws.len() == 1 {
                updates.push((i, ws.into_iter().next().unwrap()));
            }
        }
        for (i, w) in updates {
            weights[i] = w;
        }
    }
    let mut cell_w = vec![BigInt::zero(); g.len()];
    for (c, w) in cell_w.iter_mut().enumerate() {
        *w = weights[st.stratum_of(c)].clone();
    }
    cell_w
}

/// Truncation below dimension r: strata of dimension < r whose nearest
/// surrounding strata agree on a weight take that weight; then coarsen.
pub fn truncate_below(g: &PolyhedralComplex, k: &KWeighting, r: usize) -> Result<Stratification, KWeightError> {
    if r > g.rank() {
        return Err(KWeightError::InputRange(format!("truncation below {r} in rank {}", g.rank())));
    }
    let mut st = canonical_coarsening(g, k)?;
    for s in 1..=r {
        st = truncate_once(g, &st, s);
    }
    Ok(st)
}

fn truncate_once(g: &PolyhedralComplex, st: &Stratification, s: usize) -> Stratification {
    let w = truncate_step(g, st, s);
    let k = KWeighting { complex: st.complex.clone(), weights: w };
    canonical_coarsening(g, &k).expect("same complex")
}

/// Γ≥0 → Γ≥1 → … → Γ≥d with d = dim(Γ,k) (or 0 when k vanishes).
pub fn dimension_filtration(g: &PolyhedralComplex, k: &KWeighting) -> Result<Vec<Stratification>, KWeightError> {
    let top = k.weighted_dim().unwrap_or(0);
    let mut chain = vec![canonical_coarsening(g, k)?];
    for s in 1..=top {
        let next = truncate_once(g, chain.last().unwrap(), s);
        chain.push(next);
    }
    Ok(chain)
}

/// Sign of a weight, used by renderers for colour classes.
pub fn weight_sign(w: &BigInt) -> i8 {
    if w.is_positive() {
        1
    } else if w.is_negative() {
        -1
    } else {
        0
    }
}
