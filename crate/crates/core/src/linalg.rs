//! Exact dense linear algebra over `Scalar`.
//!
//! Gaussian elimination with exact zero tests everywhere; no tolerances.
//! Subspaces keep their basis in reduced row echelon form so that equality of
//! subspaces is plain structural equality.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type SVec = Vec<Scalar>;

pub fn svec_zero(n: usize) -> SVec {
    vec![Scalar::zero(); n]
}

pub fn svec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn svec_add(a: &[Scalar], b: &[Scalar]) -> SVec {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn svec_sub(a: &[Scalar], b: &[Scalar]) -> SVec {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn svec_scale(a: &[Scalar], c: &Scalar) -> SVec {
    a.iter().map(|x| x * c).collect()
}

pub fn svec_unit(n: usize, i: usize) -> SVec {
    let mut v = svec_zero(n);
    v[i] = Scalar::one();
    v
}

/// Dense row-major matrix with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<SVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> SVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = &out[(i, j)] + &(a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<SVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                v.len()
            )));
        }
        let mut out = svec_zero(self.rows);
        for i in 0..self.rows {
            let mut acc = Scalar::zero();
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if !a.is_zero() && !v[j].is_zero() {
                    acc = &acc + &(a * &v[j]);
                }
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn trace(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut acc = Scalar::zero();
        for i in 0..self.rows {
            acc = &acc + &self[(i, i)];
        }
        acc
    }

    /// Flattens to a row-major coordinate vector (for treating matrices as
    /// vectors of a subspace).
    pub fn flatten(&self) -> SVec {
        self.data.clone()
    }

    pub fn from_flat(rows: usize, cols: usize, data: SVec) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    /// Reduces `self` in place to reduced row echelon form; returns the pivot
    /// columns. Pivots are normalized to one.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv().expect("pivot nonzero");
            for j in c..self.cols {
                self[(r, j)] = &self[(r, j)] * &inv;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let factor = self[(i, c)].clone();
                    for j in c..self.cols {
                        self[(i, j)] = &self[(i, j)] - &(&factor * &self[(r, j)]);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = -&det;
            }
            det = &det * &m[(c, c)];
            let inv = m[(c, c)].inv().expect("pivot nonzero");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] * &inv;
                for j in c..n {
                    m[(i, j)] = &m[(i, j)] - &(&factor * &m[(c, j)]);
                }
            }
        }
        det
    }

    /// Basis of `{v : self * v = 0}` as a subspace of the column space.
    pub fn nullspace(&self) -> Subspace {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            pivot_of_col[c] = Some(row);
        }
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = svec_zero(self.cols);
            v[free] = Scalar::one();
            for (c, p) in pivot_of_col.iter().enumerate() {
                if let Some(row) = p {
                    v[c] = -&m[(*row, free)];
                }
            }
            basis.push(v);
        }
        Subspace::from_vectors(self.cols, basis)
    }

    /// Inverse of a square matrix; errors when singular.
    pub fn inverse(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let pivots = aug.rref();
        if pivots != (0..n).collect::<Vec<_>>() {
            return Err(Error::SingularMatrix);
        }
        Ok(Mat::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Outcome of solving `a x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution {
        particular: SVec,
        homogeneous: Subspace,
    },
    Infeasible,
}

/// Solves `a x = b` exactly; `Infeasible` iff `rank([a|b]) > rank(a)`.
pub fn solve_affine(a: &Mat, b: &[Scalar]) -> Result<SolveOutcome> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, rhs has length {}",
            a.rows(),
            b.len()
        )));
    }
    let mut aug = Mat::zeros(a.rows(), a.cols() + 1);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols())] = b[i].clone();
    }
    let pivots = aug.rref();
    if pivots.contains(&a.cols()) {
        return Ok(SolveOutcome::Infeasible);
    }
    let mut particular = svec_zero(a.cols());
    for (row, &c) in pivots.iter().enumerate() {
        particular[c] = aug[(row, a.cols())].clone();
    }
    Ok(SolveOutcome::Solution {
        particular,
        homogeneous: a.nullspace(),
    })
}

/// A linear subspace given by an echelon-reduced basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<SVec>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::from_vectors(
            ambient,
            (0..ambient).map(|i| svec_unit(ambient, i)).collect(),
        )
    }

    /// Canonicalizes an arbitrary spanning set.
    pub fn from_vectors(ambient: usize, vectors: Vec<SVec>) -> Self {
        for v in &vectors {
            assert_eq!(v.len(), ambient, "vector length differs from ambient");
        }
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let mut m = Mat::from_rows(vectors);
        m.rref();
        let basis = (0..m.rows())
            .map(|i| m.row(i).to_vec())
            .filter(|r| !svec_is_zero(r))
            .collect();
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SVec] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Mat {
        if self.basis.is_empty() {
            Mat::zeros(0, self.ambient)
        } else {
            Mat::from_rows(self.basis.clone())
        }
    }

    pub fn contains_vec(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient);
        // Reduce v against the echelon basis; member iff the residual is zero.
        let mut r = v.to_vec();
        for b in &self.basis {
            let lead = b.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if !r[lead].is_zero() {
                let factor = r[lead].clone(); // pivot of b is 1
                r = svec_sub(&r, &svec_scale(b, &factor));
            }
        }
        svec_is_zero(&r)
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.basis.iter().all(|v| self.contains_vec(v)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.iter().cloned());
        Ok(Subspace::from_vectors(self.ambient, vectors))
    }

    /// Zassenhaus: row reduce [U|U; W|0]; rows with zero left half carry an
    /// intersection basis in the right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let n = self.ambient;
        let mut rows = Vec::new();
        for u in &self.basis {
            let mut row = u.clone();
            row.extend(u.iter().cloned());
            rows.push(row);
        }
        for w in &other.basis {
            let mut row = w.clone();
            row.extend(svec_zero(n));
            rows.push(row);
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(n));
        }
        let mut m = Mat::from_rows(rows);
        m.rref();
        let mut inter = Vec::new();
        for i in 0..m.rows() {
            let row = m.row(i);
            if svec_is_zero(&row[..n]) && !svec_is_zero(&row[n..]) {
                inter.push(row[n..].to_vec());
            }
        }
        Ok(Subspace::from_vectors(n, inter))
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (k, v) in self.basis.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in v.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", x)?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}
