//! Exact integer and rational linear algebra.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("input shape mismatch: {0}")]
    InputShape(String),
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector {
    pub entries: Vec<BigInt>,
}

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector { entries }
    }

    pub fn from_i64(v: &[i64]) -> Self {
        IntVector { entries: v.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn zero(rank: usize) -> Self {
        IntVector { entries: vec![BigInt::zero(); rank] }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        dot(&self.entries, &other.entries)
    }

    pub fn to_rat(&self) -> RatVector {
        RatVector::new(self.entries.iter().map(|x| Rat::from_integer(x.clone())).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Rational vector; `BigRational` keeps every entry in lowest terms with a
/// positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVector {
    pub entries: Vec<Rat>,
}

impl RatVector {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVector { entries }
    }

    pub fn from_i64(v: &[i64]) -> Self {
        RatVector { entries: v.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect() }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    /// Common denominator of all entries.
    pub fn denominator(&self) -> BigInt {
        self.entries.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if entries.len() != rows * cols {
            return Err(LatticeError::InputShape(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Rows of equal length; `cols` must be given for the empty case.
    pub fn from_rows(rows: &[Vec<BigInt>], cols: usize) -> Result<Self, LatticeError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LatticeError::InputShape(format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            entries.extend(r.iter().cloned());
        }
        Ok(IntMatrix { rows: rows.len(), cols, entries })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(&rows, cols).expect("ragged literal matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.entries[i * cols.len() + j] = c[i].clone();
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if v.len() != self.cols {
            return Err(LatticeError::InputShape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(&self.entries[i * self.cols..(i + 1) * self.cols], v)).collect())
    }

    pub fn mul_rat_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc += &v[j] * Rat::from_integer(a.clone());
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn to_rat(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Positive multiple of a rational vector with coprime integer entries.
/// The zero vector maps to the integer zero vector.
pub fn integerize(v: &[Rat]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
    let g = gcd_all(&ints);
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn primitive(v: &IntVector) -> Result<IntVector, LatticeError> {
    let g = gcd_all(&v.entries);
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(IntVector::new(v.entries.iter().map(|x| x / &g).collect()))
}

// ---------------------------------------------------------------------------
// Smith normal form

#[derive(Clone, Debug)]
pub struct Smith {
    /// Unimodular, rows x rows.
    pub u: IntMatrix,
    /// Unimodular, cols x cols.
    pub v: IntMatrix,
    /// Positive invariant factors d_1 | d_2 | ... (length = rank).
    pub diag: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

/// U·A·V = diag(d_1..d_r, 0..). Pivots are chosen with smallest absolute value.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d: Vec<Vec<BigInt>> = a.row_vecs();
    let mut u: Vec<Vec<BigInt>> = IntMatrix::identity(m).row_vecs();
    // v is kept column-major (v[j] is column j) so column operations are row operations here
    let mut v: Vec<Vec<BigInt>> = IntMatrix::identity(n).row_vecs();
    let mut diag = Vec::new();

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap(t, pi);
            u.swap(t, pi);
            for row in d.iter_mut() {
                row.swap(t, pj);
            }
            v.swap(t, pj);

            let mut dirty = false;
            for i in t + 1..m {
                let q = &d[i][t] / &d[t][t];
                if !q.is_zero() {
                    for j in t..n {
                        let s = &q * &d[t][j];
                        d[i][j] -= s;
                    }
                    for j in 0..m {
                        let s = &q * &u[t][j];
                        u[i][j] -= s;
                    }
                }
                dirty |= !d[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = &d[t][j] / &d[t][t];
                if !q.is_zero() {
                    for i in t..m {
                        let s = &q * &d[i][t];
                        d[i][j] -= s;
                    }
                    for k in 0..n {
                        let s = &q * &v[t][k];
                        v[j][k] -= s;
                    }
                }
                dirty |= !d[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[i][j] % &d[t][t]).is_zero()));
            if let Some(i) = bad {
                for j in t..n {
                    let s = d[i][j].clone();
                    d[t][j] += s;
                }
                for j in 0..m {
                    let s = u[i][j].clone();
                    u[t][j] += s;
                }
                continue;
            }
            break;
        }
        if d[t][t].is_zero() {
            break;
        }
        if d[t][t].is_negative() {
            for j in t..n {
                d[t][j] = -d[t][j].clone();
            }
            for j in 0..m {
                u[t][j] = -u[t][j].clone();
            }
        }
        diag.push(d[t][t].clone());
    }

    let u = IntMatrix::from_rows(&u, m).expect("square");
    let v = IntMatrix::from_rows(&v, n).expect("square").transpose();
    Smith { u, v, diag }
}

/// An integer solution of A·x = b together with a lattice basis of the integer kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSolution {
    pub particular: IntVector,
    pub kernel_basis: Vec<IntVector>,
}

pub fn smith_solve(a: &IntMatrix, b: &IntVector) -> Result<Option<IntSolution>, LatticeError> {
    if b.rank() != a.rows {
        return Err(LatticeError::InputShape(format!(
            "right-hand side of length {} for {} equations",
            b.rank(),
            a.rows
        )));
    }
    let s = smith_normal_form(a);
    let c = s.u.mul_vec(&b.entries)?;
    let r = s.rank();
    let mut y = vec![BigInt::zero(); a.cols];
    for i in 0..a.rows {
        if i < r {
            let (q, rem) = c[i].div_rem(&s.diag[i]);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return Ok(None);
        }
    }
    let x = s.v.mul_vec(&y)?;
    debug_assert_eq!(a.mul_vec(&x)?, b.entries);
    if a.mul_vec(&x)? != b.entries {
        return Ok(None);
    }
    let kernel_basis = (r..a.cols).map(|j| IntVector::new(sign_normalized(s.v.column(j)))).collect();
    Ok(Some(IntSolution { particular: IntVector::new(x), kernel_basis }))
}

fn sign_normalized(v: Vec<BigInt>) -> Vec<BigInt> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.into_iter().map(|x| -x).collect(),
        _ => v,
    }
}

/// Lattice basis of {x ∈ Z^cols : A·x = 0}.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(a);
    (s.rank()..a.cols).map(|j| sign_normalized(s.v.column(j))).collect()
}

/// Integer map Z^n → Z^(n-r) whose kernel is the saturation of the span of `gens`.
pub fn quotient_map(gens: &[Vec<BigInt>], n: usize) -> IntMatrix {
    let a = IntMatrix::from_columns(gens, n);
    let s = smith_normal_form(&a);
    let r = s.rank();
    let rows: Vec<Vec<BigInt>> = (r..n).map(|i| s.u.row(i)).collect();
    IntMatrix::from_rows(&rows, n).expect("rows of U")
}

/// Lattice basis of the saturation of span(gens) inside Z^n.
pub fn saturated_basis(gens: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    integer_kernel(&quotient_map(gens, n))
}

pub fn lattice_index(generators: &[IntVector]) -> Result<BigInt, LatticeError> {
    let Some(first) = generators.first() else {
        return Ok(BigInt::one());
    };
    let n = first.rank();
    if generators.iter().any(|g| g.rank() != n) {
        return Err(LatticeError::InputShape("generators of different ranks".into()));
    }
    let cols: Vec<Vec<BigInt>> = generators.iter().map(|g| g.entries.clone()).collect();
    let s = smith_normal_form(&IntMatrix::from_columns(&cols, n));
    if s.rank() < generators.len() {
        return Err(LatticeError::DegenerateInput("generators are linearly dependent".into()));
    }
    Ok(s.diag.iter().fold(BigInt::one(), |acc, d| acc * d))
}

// ---------------------------------------------------------------------------
// Rational elimination

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: Vec<Vec<Rat>>, ncols: usize) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    let s = &f * &rows[r][j];
                    rows[i][j] -= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank_rat(rows: &[Vec<Rat>], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).1.len()
}

pub fn rank_int(rows: &[Vec<BigInt>], ncols: usize) -> usize {
    rank_rat(&rows.iter().map(|r| to_rat(r)).collect::<Vec<_>>(), ncols)
}

/// Basis of {x : rows·x = 0} over the rationals.
pub fn kernel_rat(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (red, pivots) = rref(rows.to_vec(), ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Rat::zero(); ncols];
        x[free] = Rat::one();
        for (row, &p) in red.iter().zip(&pivots) {
            x[p] = -row[free].clone();
        }
        basis.push(x);
    }
    basis
}

/// Rational kernel basis scaled to primitive integer vectors.
pub fn kernel_int(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let r: Vec<Vec<Rat>> = rows.iter().map(|x| to_rat(x)).collect();
    kernel_rat(&r, ncols).iter().map(|v| integerize(v)).collect()
}

/// Some solution of rows·x = rhs, if one exists.
pub fn solve_rat(rows: &[Vec<Rat>], rhs: &[Rat], ncols: usize) -> Option<Vec<Rat>> {
    let aug: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (row, &p) in red.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

pub fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x))
}
