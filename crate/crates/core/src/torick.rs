//! Exact K-theory and Riemann–Roch on smooth complete toric varieties.
//!
//! Classes are Laurent polynomials in y_ρ = [O(−D_ρ)]. Euler characteristics
//! come from deg(e^D · Td) with the intersection products reduced on the fan.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::kweight::KWeighting;
use crate::lattice::{dot, smith_solve, solve_rat, IntMatrix, IntVector, LatticeError, Rat};
use crate::polyhedral::{star_fan, Fan, PolyError, PolyhedralComplex};

pub const DEFAULT_MAX_RANK: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("unsupported fan: {0}")]
    UnsupportedFan(String),
    #[error("non-integral Euler characteristic {0}")]
    IntegralityViolation(String),
    #[error("rank {rank} exceeds the engine limit {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("class or weighting belongs to a different fan")]
    WrongFan,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Laurent polynomial in the ray variables y_ρ; zero coefficients are pruned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass {
    nrays: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl KClass {
    pub fn zero(nrays: usize) -> Self {
        KClass { nrays, terms: BTreeMap::new() }
    }

    pub fn one(nrays: usize) -> Self {
        Self::monomial(nrays, vec![0; nrays], BigInt::one())
    }

    pub fn monomial(nrays: usize, exps: Vec<i64>, coeff: BigInt) -> Self {
        assert_eq!(exps.len(), nrays);
        let mut k = Self::zero(nrays);
        if !coeff.is_zero() {
            k.terms.insert(exps, coeff);
        }
        k
    }

    /// y_ρ, the class of the ideal sheaf of D_ρ.
    pub fn y(nrays: usize, ray: usize) -> Self {
        let mut e = vec![0; nrays];
        e[ray] = 1;
        Self::monomial(nrays, e, BigInt::one())
    }

    /// ∏_{ρ∈σ}(1 − y_ρ) = [O_{W_σ}].
    pub fn structure_sheaf(nrays: usize, rays: &[usize]) -> Self {
        rays.iter().fold(Self::one(nrays), |acc, &r| &acc * &(&Self::one(nrays) - &Self::y(nrays, r)))
    }

    pub fn from_terms(nrays: usize, terms: impl IntoIterator<Item = (Vec<i64>, BigInt)>) -> Self {
        let mut k = Self::zero(nrays);
        for (e, c) in terms {
            assert_eq!(e.len(), nrays);
            k.add_term(e, c);
        }
        k
    }

    fn add_term(&mut self, e: Vec<i64>, c: BigInt) {
        let slot = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn nrays(&self) -> usize {
        self.nrays
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.nrays, self.terms.iter().map(|(e, x)| (e.clone(), x * c)))
    }
}

impl Add for &KClass {
    type Output = KClass;
    fn add(self, rhs: &KClass) -> KClass {
        assert_eq!(self.nrays, rhs.nrays);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &KClass {
    type Output = KClass;
    fn sub(self, rhs: &KClass) -> KClass {
        self + &(-rhs)
    }
}

impl Neg for &KClass {
    type Output = KClass;
    fn neg(self) -> KClass {
        self.scale(&BigInt::from(-1))
    }
}

impl Mul for &KClass {
    type Output = KClass;
    fn mul(self, rhs: &KClass) -> KClass {
        assert_eq!(self.nrays, rhs.nrays);
        let mut out = KClass::zero(self.nrays);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

/// Rational combination of orbit-closure classes [W_σ], keyed by cone index.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChowElement {
    pub terms: BTreeMap<usize, Rat>,
}

impl ChowElement {
    fn add(&mut self, cone: usize, c: Rat) {
        let slot = self.terms.entry(cone).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&cone);
        }
    }

    /// Degree: the coefficient sum over maximal cones (each a point class).
    pub fn degree(&self, fan: &Fan) -> Rat {
        let n = fan.rank();
        self.terms.iter().filter(|(&c, _)| fan.cone_dim(c) == n).map(|(_, x)| x.clone()).sum()
    }
}

/// Symmetric matrix of χ([O_{W_σ}]·[O_{W_τ}]) over all cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingMatrix {
    pub cones: Vec<String>,
    pub entries: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub balanced: bool,
    /// Solvable over the rationals.
    pub rational: bool,
    /// c with k = decoration of Σ c_σ [O_{W_σ}], indexed by cone.
    pub witness: Option<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTest {
    /// Cone whose star the test runs on.
    pub cone: String,
    /// Character in the coordinates of the star's lattice.
    pub u: IntVector,
    pub residual: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBalance {
    pub balanced: bool,
    pub per_cell: Vec<(String, bool)>,
}

/// χ as a polynomial in the divisor coefficients, with a common denominator.
#[derive(Debug)]
struct ChiPoly {
    terms: Vec<(Vec<(usize, u32)>, BigInt)>,
    den: BigInt,
}

/// Fan plus the data for the rewriting rules; the χ polynomial is built on first use.
#[derive(Debug)]
pub struct ToricEngine {
    fan: Arc<Fan>,
    n: usize,
    /// (cone, ray in cone) → u with ⟨u,v_ρ⟩ = 1 and ⟨u,v_ρ′⟩ = 0 on the other rays of the cone.
    duals: HashMap<(usize, usize), Vec<BigInt>>,
    /// Lattice basis of σ^⊥ per cone.
    perp: HashMap<usize, Vec<Vec<BigInt>>>,
    chi: OnceLock<Result<ChiPoly, ToricError>>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn binom(m: i64, j: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(m - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Coefficients of x/(1 − e^{−x}) up to x^n.
fn todd_series(n: usize) -> Vec<Rat> {
    // g(x) = (1 − e^{−x})/x = Σ (−1)^j x^j/(j+1)!
    let mut fact = BigInt::one();
    let mut g = Vec::with_capacity(n + 1);
    for j in 0..=n {
        fact *= BigInt::from(j + 1);
        let s = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        g.push(Rat::new(s, fact.clone()));
    }
    let mut t: Vec<Rat> = vec![Rat::one()];
    for k in 1..=n {
        let s: Rat = (1..=k).map(|i| &g[i] * &t[k - i]).sum();
        t.push(-s);
    }
    t
}

impl ToricEngine {
    pub fn new(fan: &Fan) -> Result<Self, ToricError> {
        Self::with_max_rank(fan, DEFAULT_MAX_RANK)
    }

    pub fn with_max_rank(fan: &Fan, max: usize) -> Result<Self, ToricError> {
        let n = fan.rank();
        if n > max {
            return Err(ToricError::RankTooLarge { rank: n, max });
        }
        if !fan.is_smooth() {
            return Err(ToricError::UnsupportedFan("fan is not smooth".into()));
        }
        if !fan.is_complete() {
            return Err(ToricError::UnsupportedFan("fan is not complete".into()));
        }
        let mut duals = HashMap::new();
        let mut perp = HashMap::new();
        for (c, rays) in fan.cones().iter().enumerate() {
            let rows: Vec<Vec<BigInt>> = rays.iter().map(|&r| fan.rays()[r].entries.clone()).collect();
            let a = IntMatrix::from_rows(&rows, n)?;
            for (j, &r) in rays.iter().enumerate() {
                let mut e = vec![BigInt::zero(); rays.len()];
                e[j] = BigInt::one();
                let sol = smith_solve(&a, &IntVector::new(e))?
                    .ok_or_else(|| ToricError::UnsupportedFan("cone is not unimodular".into()))?;
                duals.insert((c, r), sol.particular.entries);
                perp.entry(c).or_insert_with(|| sol.kernel_basis.into_iter().map(|v| v.entries).collect::<Vec<_>>());
            }
            if rays.is_empty() {
                perp.insert(c, (0..n).map(|i| IntVector::from_i64(&unit(n, i)).entries).collect());
            }
        }
        Ok(ToricEngine { fan: Arc::new(fan.clone()), n, duals, perp, chi: OnceLock::new() })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn nrays(&self) -> usize {
        self.fan.rays().len()
    }

    fn pairing_ray(&self, u: &[BigInt], ray: usize) -> BigInt {
        dot(u, &self.fan.rays()[ray].entries)
    }

    /// x_ρ · [W_σ] with the dual choice supplied by `dual`.
    fn mult_ray(&self, elem: &ChowElement, ray: usize, dual: &dyn Fn(usize, usize) -> Vec<BigInt>) -> ChowElement {
        let mut out = ChowElement::default();
        for (&c, coeff) in &elem.terms {
            let cone = &self.fan.cones()[c];
            if !cone.contains(&ray) {
                let mut t = cone.clone();
                t.push(ray);
                if let Some(tc) = self.fan.cone_of(&t) {
                    out.add(tc, coeff.clone());
                }
                continue;
            }
            let u = dual(c, ray);
            for other in 0..self.nrays() {
                if cone.contains(&other) {
                    continue;
                }
                let p = self.pairing_ray(&u, other);
                if p.is_zero() {
                    continue;
                }
                let mut t = cone.clone();
                t.push(other);
                if let Some(tc) = self.fan.cone_of(&t) {
                    out.add(tc, -(coeff * Rat::from_integer(p)));
                }
            }
        }
        out
    }

    fn reduce_with(&self, monomial: &[usize], dual: &dyn Fn(usize, usize) -> Vec<BigInt>) -> ChowElement {
        let mut elem = ChowElement::default();
        elem.add(self.fan.origin(), Rat::one());
        for &r in monomial {
            elem = self.mult_ray(&elem, r, dual);
        }
        elem
    }

    pub fn chow_reduce(&self, monomial: &[usize]) -> ChowElement {
        self.reduce_with(monomial, &|c, r| self.duals[&(c, r)].clone())
    }

    /// Same reduction with each dual vector shifted by a pseudo-random element of σ^⊥.
    pub fn chow_reduce_with_choice(&self, monomial: &[usize], seed: u64) -> ChowElement {
        let dual = |c: usize, r: usize| {
            let mut u = self.duals[&(c, r)].clone();
            for (i, w) in self.perp[&c].iter().enumerate() {
                let h = splitmix(seed ^ ((c as u64) << 32) ^ ((r as u64) << 16) ^ i as u64);
                let k = BigInt::from((h % 7) as i64 - 3);
                for (a, b) in u.iter_mut().zip(w) {
                    *a += &k * b;
                }
            }
            u
        };
        self.reduce_with(monomial, &dual)
    }

    /// x_m · Σ c_σ [W_σ] for a multiset m of rays.
    pub fn chow_mul(&self, elem: &ChowElement, monomial: &[usize]) -> ChowElement {
        monomial.iter().fold(elem.clone(), |e, &r| self.mult_ray(&e, r, &|c, x| self.duals[&(c, x)].clone()))
    }

    /// Rational equivalence: equal degrees against every complementary monomial.
    pub fn chow_equivalent(&self, a: &ChowElement, b: &ChowElement) -> bool {
        let mut diff = a.clone();
        for (&c, x) in &b.terms {
            diff.add(c, -x.clone());
        }
        let dims: std::collections::BTreeSet<usize> = diff.terms.keys().map(|&c| self.fan.cone_dim(c)).collect();
        dims.into_iter().all(|d| {
            let part = ChowElement {
                terms: diff.terms.iter().filter(|(&c, _)| self.fan.cone_dim(c) == d).map(|(&c, x)| (c, x.clone())).collect(),
            };
            (0..self.nrays())
                .combinations_with_replacement(self.n - d)
                .all(|m| self.chow_mul(&part, &m).degree(&self.fan).is_zero())
        })
    }

    fn build_chi(&self) -> Result<ChiPoly, ToricError> {
        let n = self.n;
        let r = self.nrays();
        let todd = todd_series(n);
        // deg(x^e) for all multisets of size n, built incrementally
        let mut level: HashMap<Vec<usize>, ChowElement> = HashMap::new();
        let mut origin = ChowElement::default();
        origin.add(self.fan.origin(), Rat::one());
        level.insert(vec![], origin);
        for _ in 0..n {
            let mut next = HashMap::new();
            for (m, elem) in &level {
                let start = m.last().copied().unwrap_or(0);
                for ray in start..r {
                    let mut m2 = m.clone();
                    m2.push(ray);
                    let e = self.mult_ray(elem, ray, &|c, x| self.duals[&(c, x)].clone());
                    next.insert(m2, e);
                }
            }
            level = next;
        }
        let mut inv_fact = vec![Rat::one()];
        for i in 1..=n {
            let prev = inv_fact[i - 1].clone();
            inv_fact.push(prev / Rat::from_integer(BigInt::from(i)));
        }
        let mut poly: BTreeMap<Vec<(usize, u32)>, Rat> = BTreeMap::new();
        for (m, elem) in level.iter().sorted_by(|a, b| a.0.cmp(b.0)) {
            let d = elem.degree(&self.fan);
            if d.is_zero() {
                continue;
            }
            let counts: Vec<(usize, u32)> = m.iter().dedup_with_count().map(|(c, &ray)| (ray, c as u32)).collect();
            if counts.is_empty() {
                *poly.entry(vec![]).or_insert_with(Rat::zero) += d;
                continue;
            }
            // ∏ over the support of c_{e}(a) = Σ_{i ≤ e} a^i/i! · t_{e−i}
            let choices = counts.iter().map(|&(_, e)| 0..=e).multi_cartesian_product();
            for pick in choices {
                let mut coeff = d.clone();
                let mut mono = Vec::new();
                for (&(ray, e), &i) in counts.iter().zip(&pick) {
                    coeff *= &inv_fact[i as usize] * &todd[(e - i) as usize];
                    if i > 0 {
                        mono.push((ray, i));
                    }
                }
                *poly.entry(mono).or_insert_with(Rat::zero) += coeff;
            }
        }
        poly.retain(|_, c| !c.is_zero());
        let den = poly.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let terms = poly.into_iter().map(|(m, c)| (m, (c * Rat::from_integer(den.clone())).to_integer())).collect();
        Ok(ChiPoly { terms, den })
    }

    fn chi_poly(&self) -> Result<&ChiPoly, ToricError> {
        self.chi.get_or_init(|| self.build_chi()).as_ref().map_err(|e| e.clone())
    }

    /// Builds the χ table eagerly.
    pub fn freeze(&self) -> Result<(), ToricError> {
        self.chi_poly().map(|_| ())
    }

    /// χ(O(Σ a_ρ D_ρ)).
    pub fn chi_line_bundle(&self, a: &[BigInt]) -> Result<BigInt, ToricError> {
        if a.len() != self.nrays() {
            return Err(ToricError::WrongFan);
        }
        let p = self.chi_poly()?;
        let num = eval_small(p, a).unwrap_or_else(|| eval_big(p, a));
        let (q, rem) = num.div_rem(&p.den);
        if !rem.is_zero() {
            return Err(ToricError::IntegralityViolation(format!("{num}/{}", p.den)));
        }
        Ok(q)
    }

    pub fn euler_char(&self, alpha: &KClass) -> Result<BigInt, ToricError> {
        if alpha.nrays != self.nrays() {
            return Err(ToricError::WrongFan);
        }
        let mut s = BigInt::zero();
        for (e, c) in &alpha.terms {
            let a: Vec<BigInt> = e.iter().map(|&x| BigInt::from(-x)).collect();
            s += c * self.chi_line_bundle(&a)?;
        }
        Ok(s)
    }

    pub fn structure_sheaf(&self, cone: usize) -> KClass {
        KClass::structure_sheaf(self.nrays(), &self.fan.cones()[cone])
    }

    pub fn decoration_of_class(&self, alpha: &KClass) -> Result<KWeighting, ToricError> {
        let weights = (0..self.fan.num_cones())
            .map(|c| self.euler_char(&(alpha * &self.structure_sheaf(c))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KWeighting::new(self.fan.complex_arc(), weights).expect("one weight per cone"))
    }

    pub fn pairing_matrix(&self) -> Result<PairingMatrix, ToricError> {
        let m = self.fan.num_cones();
        let sheaves: Vec<KClass> = (0..m).map(|c| self.structure_sheaf(c)).collect();
        let mut entries = IntMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let x = self.euler_char(&(&sheaves[i] * &sheaves[j]))?;
                entries.entries[i * m + j] = x.clone();
                entries.entries[j * m + i] = x;
            }
        }
        Ok(PairingMatrix { cones: self.fan.complex().ids(), entries })
    }

    /// Σ c_σ [O_{W_σ}].
    pub fn class_from_witness(&self, c: &[BigInt]) -> KClass {
        c.iter().enumerate().fold(KClass::zero(self.nrays()), |acc, (i, x)| &acc + &self.structure_sheaf(i).scale(x))
    }

    fn check_weighting(&self, k: &KWeighting) -> Result<(), ToricError> {
        if *k.complex() != *self.fan.complex() {
            return Err(ToricError::WrongFan);
        }
        Ok(())
    }

    pub fn is_balanced_fan(&self, k: &KWeighting) -> Result<BalanceReport, ToricError> {
        self.check_weighting(k)?;
        let pm = self.pairing_matrix()?;
        let rhs = IntVector::new(k.weights().to_vec());
        let witness = smith_solve(&pm.entries, &rhs)?.map(|s| s.particular.entries);
        let rows: Vec<Vec<Rat>> = pm.entries.row_vecs().iter().map(|r| crate::lattice::to_rat(r)).collect();
        let rational = solve_rat(&rows, &crate::lattice::to_rat(k.weights()), pm.entries.cols).is_some();
        Ok(BalanceReport { balanced: witness.is_some(), rational, witness })
    }

    /// Writes α as Σ b_σ [O_{W_σ}] by the K-theoretic version of the Chow rewriting.
    pub fn structure_sheaf_expansion(&self, alpha: &KClass) -> Result<BTreeMap<usize, BigInt>, ToricError> {
        if alpha.nrays != self.nrays() {
            return Err(ToricError::WrongFan);
        }
        let nr = self.nrays();
        let origin = self.fan.origin();
        let mut work: BTreeMap<(usize, Vec<i64>), BigInt> = BTreeMap::new();
        let push = |w: &mut BTreeMap<(usize, Vec<i64>), BigInt>, key: (usize, Vec<i64>), c: BigInt| {
            *w.entry(key).or_insert_with(BigInt::zero) += c;
        };
        for (e, c) in &alpha.terms {
            push(&mut work, (origin, e.clone()), c.clone());
        }
        let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
        while let Some(((s, e), c)) = work.pop_first() {
            if c.is_zero() {
                continue;
            }
            let cone = &self.fan.cones()[s];
            if let Some(&r) = cone.iter().find(|&&r| e[r] != 0) {
                // y_ρ = ∏_{ρ''∉σ} y_ρ''^{−⟨u,v_ρ''⟩} by the character u
                let u = &self.duals[&(s, r)];
                let m = e[r];
                let mut e2 = e.clone();
                e2[r] = 0;
                for other in 0..nr {
                    if !cone.contains(&other) {
                        let p = self.pairing_ray(u, other).to_i64().expect("small pairing");
                        e2[other] -= m * p;
                    }
                }
                push(&mut work, (s, e2), c);
                continue;
            }
            let Some(r) = (0..nr).find(|&r| e[r] != 0) else {
                *out.entry(s).or_insert_with(BigInt::zero) += c;
                continue;
            };
            let m = e[r];
            let mut rest = e.clone();
            rest[r] = 0;
            let mut t = cone.clone();
            t.push(r);
            match self.fan.cone_of(&t) {
                // D_ρ misses W_σ
                None => push(&mut work, (s, rest), c),
                Some(tc) => {
                    // y^m = Σ_j C(m,j)(−1)^j (1−y)^j and (1−y_ρ)^j S_σ = (1−y_ρ)^{j−1} S_τ
                    push(&mut work, (s, rest.clone()), c.clone());
                    let room = self.n - cone.len();
                    for j in 1..=room as u32 {
                        let mut cj = &c * binom(m, j);
                        if j % 2 == 1 {
                            cj = -cj;
                        }
                        if cj.is_zero() {
                            continue;
                        }
                        for i in 0..j {
                            let mut ci = &cj * binom((j - 1) as i64, i);
                            if i % 2 == 1 {
                                ci = -ci;
                            }
                            let mut e3 = rest.clone();
                            e3[r] = i as i64;
                            push(&mut work, (tc, e3), ci);
                        }
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Σ b_σ k(σ) for α = Σ b_σ [O_{W_σ}].
    pub fn evaluate(&self, alpha: &KClass, k: &KWeighting) -> Result<BigInt, ToricError> {
        self.check_weighting(k)?;
        Ok(self.structure_sheaf_expansion(alpha)?.iter().map(|(&c, b)| b * k.get(c)).sum())
    }

    /// Residuals ev(A_u) − ev(B_u) with A_u = 1 − ∏_{⟨u,v⟩>0} y^{⟨u,v⟩} and
    /// B_u = 1 − ∏_{⟨u,v⟩<0} y^{−⟨u,v⟩}, for a basis of M on every star.
    pub fn character_tests(&self, k: &KWeighting) -> Result<Vec<CharacterTest>, ToricError> {
        self.check_weighting(k)?;
        let complex = self.fan.complex();
        let mut out = Vec::new();
        for tau in 0..complex.len() {
            let star = star_fan(complex, tau)?;
            let sub = ToricEngine::with_max_rank(&star.fan, usize::MAX)?;
            let weights: Vec<BigInt> = star.origin.iter().map(|&c| k.get(c).clone()).collect();
            let ks = KWeighting::new(star.fan.complex_arc(), weights).expect("aligned");
            let rank = star.fan.rank();
            let nr = sub.nrays();
            for i in 0..rank {
                let u = unit(rank, i);
                let pairings: Vec<i64> =
                    star.fan.rays().iter().map(|v| v.entries[i].to_i64().expect("small entry")).collect();
                let mut pos = vec![0i64; nr];
                let mut neg = vec![0i64; nr];
                for (r, &p) in pairings.iter().enumerate() {
                    if p > 0 {
                        pos[r] = p;
                    } else {
                        neg[r] = -p;
                    }
                }
                let one = KClass::one(nr);
                let a = &one - &KClass::monomial(nr, pos, BigInt::one());
                let b = &one - &KClass::monomial(nr, neg, BigInt::one());
                let residual = sub.evaluate(&a, &ks)? - sub.evaluate(&b, &ks)?;
                out.push(CharacterTest { cone: complex.id(tau).to_string(), u: IntVector::from_i64(&u), residual });
            }
        }
        Ok(out)
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn eval_small(p: &ChiPoly, a: &[BigInt]) -> Option<BigInt> {
    let a: Vec<i128> = a.iter().map(|x| x.to_i128()).collect::<Option<_>>()?;
    let mut s: i128 = 0;
    for (mono, c) in &p.terms {
        let mut t = c.to_i128()?;
        for &(r, e) in mono {
            t = t.checked_mul(a[r].checked_pow(e)?)?;
        }
        s = s.checked_add(t)?;
    }
    Some(BigInt::from(s))
}

fn eval_big(p: &ChiPoly, a: &[BigInt]) -> BigInt {
    p.terms
        .iter()
        .map(|(mono, c)| mono.iter().fold(c.clone(), |acc, &(r, e)| acc * num_traits::pow(a[r].clone(), e as usize)))
        .sum()
}

pub fn chow_reduce(fan: &Fan, monomial: &[usize]) -> Result<ChowElement, ToricError> {
    Ok(ToricEngine::new(fan)?.chow_reduce(monomial))
}

pub fn chi_line_bundle(fan: &Fan, a: &[BigInt]) -> Result<BigInt, ToricError> {
    ToricEngine::new(fan)?.chi_line_bundle(a)
}

pub fn euler_char(fan: &Fan, alpha: &KClass) -> Result<BigInt, ToricError> {
    ToricEngine::new(fan)?.euler_char(alpha)
}

pub fn decoration_of_class(fan: &Fan, alpha: &KClass) -> Result<KWeighting, ToricError> {
    ToricEngine::new(fan)?.decoration_of_class(alpha)
}

pub fn pairing_matrix(fan: &Fan) -> Result<PairingMatrix, ToricError> {
    ToricEngine::new(fan)?.pairing_matrix()
}

pub fn is_balanced_fan(fan: &Fan, k: &KWeighting) -> Result<BalanceReport, ToricError> {
    ToricEngine::new(fan)?.is_balanced_fan(k)
}

pub fn character_tests(fan: &Fan, k: &KWeighting) -> Result<Vec<CharacterTest>, ToricError> {
    ToricEngine::new(fan)?.character_tests(k)
}

/// Runs the fan test on the star of every cell.
pub fn is_balanced_complex(g: &PolyhedralComplex, k: &KWeighting) -> Result<ComplexBalance, ToricError> {
    if *k.complex() != *g {
        return Err(ToricError::WrongFan);
    }
    let mut per_cell = Vec::with_capacity(g.len());
    for f in 0..g.len() {
        let star = star_fan(g, f)?;
        let engine = ToricEngine::new(&star.fan)
            .map_err(|e| ToricError::UnsupportedFan(format!("star of {}: {e}", g.id(f))))?;
        let weights: Vec<BigInt> = star.origin.iter().map(|&c| k.get(c).clone()).collect();
        let ks = KWeighting::new(star.fan.complex_arc(), weights).expect("aligned");
        per_cell.push((g.id(f).to_string(), engine.is_balanced_fan(&ks)?.balanced));
    }
    Ok(ComplexBalance { balanced: per_cell.iter().all(|(_, b)| *b), per_cell })
}

/// Projective space P^n: rays e_1..e_n, −Σe_i; all proper subsets span cones.
pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<IntVector> = (0..n).map(|i| IntVector::from_i64(&unit(n, i))).collect();
    rays.push(IntVector::from_i64(&vec![-1; n]));
    let cones = (0..=n).combinations(n).collect();
    Fan::new(n, rays, cones).expect("projective space fan")
}

/// Product of two fans, rays of the first then the second.
pub fn product_fan(a: &Fan, b: &Fan) -> Fan {
    let (na, nb) = (a.rank(), b.rank());
    let mut rays = Vec::new();
    for r in a.rays() {
        let mut e = r.entries.clone();
        e.extend(std::iter::repeat(BigInt::zero()).take(nb));
        rays.push(IntVector::new(e));
    }
    for r in b.rays() {
        let mut e = vec![BigInt::zero(); na];
        e.extend(r.entries.iter().cloned());
        rays.push(IntVector::new(e));
    }
    let off = a.rays().len();
    let max_a: Vec<&Vec<usize>> = a.cones().iter().filter(|c| c.len() == na).collect();
    let max_b: Vec<&Vec<usize>> = b.cones().iter().filter(|c| c.len() == nb).collect();
    let mut cones = Vec::new();
    for ca in &max_a {
        for cb in &max_b {
            let mut c: Vec<usize> = ca.to_vec();
            c.extend(cb.iter().map(|&x| x + off));
            cones.push(c);
        }
    }
    Fan::new(na + nb, rays, cones).expect("product fan")
}
