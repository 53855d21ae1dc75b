//! Structure-constant Lie algebra engine.
//!
//! `GradedLieAlgebra` is the universal carrier for every algebra in the
//! toolkit: stratified algebras, their prolongations, and (ungraded)
//! modification algebras. Brackets are stored sparsely per ordered basis
//! pair; the antisymmetric half is generated on demand, and raw descriptions
//! that list both orientations inconsistently survive construction so that
//! `check_axioms` can report the violation instead of silently fixing it.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{svec_is_zero, svec_zero, Mat, SVec, Subspace};
use crate::scalar::{Scalar, ScalarDomain};

/// Sparse vector: (basis index, nonzero coefficient) pairs, sorted by index.
pub type SparseVec = Vec<(usize, Scalar)>;

fn sparse_normalize(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|(k, _)| *k);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (k, c) in v {
        match out.last_mut() {
            Some((k0, c0)) if *k0 == k => *c0 = &*c0 + &c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

fn sparse_to_dense(v: &SparseVec, n: usize) -> SVec {
    let mut out = svec_zero(n);
    for (k, c) in v {
        out[*k] = c.clone();
    }
    out
}

/// A finite-dimensional Lie algebra given by structure constants, with an
/// optional integer grading on basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedLieAlgebra {
    labels: Vec<String>,
    degrees: Option<Vec<i64>>,
    /// Brackets as given: `(i, j) -> [e_i, e_j]`. Missing pairs are either
    /// the negated mirror of a stored pair or zero.
    brackets: BTreeMap<(usize, usize), SparseVec>,
    domain: ScalarDomain,
}

/// One violated axiom instance found by [`GradedLieAlgebra::check_axioms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `c_{ij}^k != -c_{ji}^k` (indices of the offending triple).
    Antisymmetry(usize, usize, usize),
    /// Jacobi sum over the cyclic triple is nonzero.
    Jacobi(usize, usize, usize),
    /// A bracket coefficient lands outside the layer forced by the grading.
    Grading(usize, usize, usize),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Antisymmetry(i, j, k) => {
                write!(f, "antisymmetry fails at ({}, {}, {})", i, j, k)
            }
            AxiomViolation::Jacobi(i, j, k) => {
                write!(f, "Jacobi fails on triple ({}, {}, {})", i, j, k)
            }
            AxiomViolation::Grading(i, j, k) => {
                write!(f, "grading violated by bracket ({}, {}) -> {}", i, j, k)
            }
        }
    }
}

impl GradedLieAlgebra {
    /// Builds an algebra from raw bracket data. Entries may use either
    /// orientation; duplicates within one orientation are summed.
    pub fn new(
        labels: Vec<String>,
        degrees: Option<Vec<i64>>,
        brackets: Vec<((usize, usize), SparseVec)>,
        domain: ScalarDomain,
    ) -> Result<Self> {
        let n = labels.len();
        if let Some(d) = &degrees {
            if d.len() != n {
                return Err(Error::Description(
                    "degree list length differs from basis size".into(),
                ));
            }
        }
        let mut map: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for ((i, j), v) in brackets {
            if i >= n || j >= n || v.iter().any(|(k, _)| *k >= n) {
                return Err(Error::Description("basis index out of range".into()));
            }
            let entry = map.entry((i, j)).or_default();
            entry.extend(v);
        }
        let brackets = map
            .into_iter()
            .map(|(k, v)| (k, sparse_normalize(v)))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        Ok(GradedLieAlgebra {
            labels,
            degrees,
            brackets,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Description(format!("unknown basis label {:?}", label)))
    }

    pub fn degrees(&self) -> Option<&[i64]> {
        self.degrees.as_deref()
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    /// Iterates stored bracket entries in their given orientation.
    pub fn bracket_entries(&self) -> impl Iterator<Item = (&(usize, usize), &SparseVec)> {
        self.brackets.iter()
    }

    /// `[e_i, e_j]` as a sparse vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        if let Some(v) = self.brackets.get(&(i, j)) {
            return v.clone();
        }
        if let Some(v) = self.brackets.get(&(j, i)) {
            return v.iter().map(|(k, c)| (*k, -c)).collect();
        }
        Vec::new()
    }

    /// Bilinear extension of the structure tensor.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<SVec> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "algebra has dimension {}, arguments have lengths {} and {}",
                n,
                x.len(),
                y.len()
            )));
        }
        let mut out = svec_zero(n);
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let coeff = &x[i] * &y[j];
                for (k, c) in self.bracket_basis(i, j) {
                    out[k] = &out[k] + &(&coeff * &c);
                }
            }
        }
        Ok(out)
    }

    /// `ad_x` as a matrix: column `j` holds `[x, e_j]`.
    pub fn ad(&self, x: &[Scalar]) -> Result<Mat> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for j in 0..n {
            let mut col = svec_zero(n);
            for i in 0..n {
                if x[i].is_zero() {
                    continue;
                }
                for (k, c) in self.bracket_basis(i, j) {
                    col[k] = &col[k] + &(&x[i] * &c);
                }
            }
            for k in 0..n {
                if !col[k].is_zero() {
                    m[(k, j)] = col[k].clone();
                }
            }
        }
        Ok(m)
    }

    pub fn ad_basis(&self, i: usize) -> Mat {
        let n = self.dim();
        let mut x = svec_zero(n);
        x[i] = Scalar::one();
        self.ad(&x).expect("basis vector has the right length")
    }

    /// Brute-force antisymmetry, Jacobi and grading checks over all basis
    /// tuples. Violations are data, not errors.
    pub fn check_axioms(&self) -> Vec<AxiomViolation> {
        let n = self.dim();
        let mut report = Vec::new();
        // Antisymmetry across stored orientations, and [e_i, e_i] = 0.
        for i in 0..n {
            for j in i..n {
                let fwd = self.brackets.get(&(i, j));
                let bwd = self.brackets.get(&(j, i));
                let fwd_dense = fwd
                    .map(|v| sparse_to_dense(v, n))
                    .unwrap_or_else(|| svec_zero(n));
                let bwd_dense = bwd
                    .map(|v| sparse_to_dense(v, n))
                    .unwrap_or_else(|| svec_zero(n));
                if i == j {
                    for (k, c) in fwd_dense.iter().enumerate() {
                        if !c.is_zero() {
                            report.push(AxiomViolation::Antisymmetry(i, j, k));
                        }
                    }
                    continue;
                }
                if fwd.is_some() && bwd.is_some() {
                    for k in 0..n {
                        if !(&fwd_dense[k] + &bwd_dense[k]).is_zero() {
                            report.push(AxiomViolation::Antisymmetry(i, j, k));
                        }
                    }
                }
            }
        }
        if !report.is_empty() {
            // Jacobi over an antisymmetry-violating tensor is ill-defined;
            // report the antisymmetry failures alone.
            return report;
        }
        // Grading: c_{ij}^k = 0 unless deg(k) = deg(i) + deg(j).
        if let Some(deg) = &self.degrees {
            for ((i, j), v) in &self.brackets {
                for (k, c) in v {
                    if !c.is_zero() && deg[*k] != deg[*i] + deg[*j] {
                        report.push(AxiomViolation::Grading(*i, *j, *k));
                    }
                }
            }
        }
        // Jacobi by brute force on all triples.
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let ei = unit(n, i);
                    let ej = unit(n, j);
                    let ek = unit(n, k);
                    let a = self.bracket(&self.bracket(&ei, &ej).unwrap(), &ek).unwrap();
                    let b = self.bracket(&self.bracket(&ej, &ek).unwrap(), &ei).unwrap();
                    let c = self.bracket(&self.bracket(&ek, &ei).unwrap(), &ej).unwrap();
                    let mut sum = svec_zero(n);
                    for t in 0..n {
                        sum[t] = &(&a[t] + &b[t]) + &c[t];
                    }
                    if !svec_is_zero(&sum) {
                        report.push(AxiomViolation::Jacobi(i, j, k));
                    }
                }
            }
        }
        report
    }

    /// Basis indices of one layer of the grading.
    pub fn layer_indices(&self, degree: i64) -> Vec<usize> {
        match &self.degrees {
            None => Vec::new(),
            Some(d) => d
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == degree)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    /// Layer as a coordinate subspace.
    pub fn layer(&self, degree: i64) -> Subspace {
        let n = self.dim();
        Subspace::from_vectors(
            n,
            self.layer_indices(degree)
                .into_iter()
                .map(|i| unit(n, i))
                .collect(),
        )
    }

    /// Span of `[u, w]` over basis pairs of two subspaces.
    pub fn bracket_subspaces(&self, u: &Subspace, w: &Subspace) -> Result<Subspace> {
        let mut vectors = Vec::new();
        for a in u.basis() {
            for b in w.basis() {
                vectors.push(self.bracket(a, b)?);
            }
        }
        Ok(Subspace::from_vectors(self.dim(), vectors))
    }

    /// Checks that degrees are exactly `-s..-1` and each deeper layer equals
    /// the bracket of the first layer with the previous one. Returns the step.
    pub fn is_stratified(&self) -> Result<(bool, usize)> {
        let degrees = self.degrees.as_ref().ok_or(Error::MissingDegrees)?;
        if degrees.is_empty() {
            return Ok((false, 0));
        }
        let min = *degrees.iter().min().unwrap();
        let max = *degrees.iter().max().unwrap();
        if max != -1 || min >= 0 {
            return Ok((false, 0));
        }
        let s = (-min) as usize;
        for d in 1..=s {
            if self.layer_indices(-(d as i64)).is_empty() {
                return Ok((false, 0));
            }
        }
        let first = self.layer(-1);
        let mut prev = first.clone();
        for d in 2..=s {
            let expected = self.layer(-(d as i64));
            let generated = self.bracket_subspaces(&first, &prev)?;
            if generated != expected {
                return Ok((false, 0));
            }
            prev = expected;
        }
        // Nothing below the bottom layer.
        let bottom = self.layer(-(s as i64));
        let below = self.bracket_subspaces(&first, &bottom)?;
        if below.dim() != 0 {
            return Ok((false, 0));
        }
        Ok((true, s))
    }

    /// Descending central or derived series, computed until stabilization.
    pub fn series(&self, kind: SeriesKind) -> Vec<Subspace> {
        let n = self.dim();
        let mut chain = vec![Subspace::full(n)];
        loop {
            let last = chain.last().unwrap();
            let next = match kind {
                SeriesKind::LowerCentral => self.bracket_subspaces(&chain[0], last),
                SeriesKind::Derived => self.bracket_subspaces(last, last),
            }
            .expect("series brackets are well-formed");
            if &next == last {
                break;
            }
            let stop = next.dim() == 0;
            chain.push(next);
            if stop {
                break;
            }
        }
        chain
    }

    pub fn is_nilpotent(&self) -> bool {
        self.series(SeriesKind::LowerCentral)
            .last()
            .map(|s| s.dim() == 0)
            .unwrap_or(true)
    }

    pub fn is_solvable(&self) -> bool {
        self.series(SeriesKind::Derived)
            .last()
            .map(|s| s.dim() == 0)
            .unwrap_or(true)
    }

    /// Number of nonzero terms of the lower central series; `None` when the
    /// algebra is not nilpotent.
    pub fn nilpotency_step(&self) -> Option<usize> {
        let chain = self.series(SeriesKind::LowerCentral);
        if chain.last().unwrap().dim() != 0 {
            return None;
        }
        Some(chain.len() - 1)
    }

    /// `K(e_i, e_j) = trace(ad_i ad_j)` as an exact symmetric matrix.
    pub fn killing_form(&self) -> Mat {
        let n = self.dim();
        let ads: Vec<Mat> = (0..n).map(|i| self.ad_basis(i)).collect();
        let mut k = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let tr = ads[i].matmul(&ads[j]).trace();
                k[(i, j)] = tr.clone();
                if i != j {
                    k[(j, i)] = tr;
                }
            }
        }
        k
    }

    /// Diagonal derivation with `D v = j v` for `v` of degree `-j`.
    ///
    /// This is the generator of dilations in the convention `delta_{e^t} =
    /// e^{tD}` used by the semidirect product; note that the dilation map
    /// itself scales a degree `i` vector by `lambda^i`, which differs by a
    /// sign in the exponent on negative layers.
    pub fn grading_derivation(&self) -> Result<Mat> {
        let degrees = self.degrees.as_ref().ok_or(Error::MissingDegrees)?;
        if degrees.iter().any(|&d| d >= 0) {
            return Err(Error::NotStratified(
                "grading derivation requires strictly negative degrees".into(),
            ));
        }
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::from_int(-degrees[i]);
        }
        debug_assert!(self.is_derivation(&m).unwrap_or(false));
        Ok(m)
    }

    /// Leibniz check: `u [x, y] = [u x, y] + [x, u y]` on all basis pairs.
    pub fn is_derivation(&self, u: &Mat) -> Result<bool> {
        let n = self.dim();
        if u.rows() != n || u.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "derivation candidate must be {n}x{n}"
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                let ei = unit(n, i);
                let ej = unit(n, j);
                let lhs = u.mul_vec(&self.bracket(&ei, &ej)?)?;
                let a = self.bracket(&u.mul_vec(&ei)?, &ej)?;
                let b = self.bracket(&ei, &u.mul_vec(&ej)?)?;
                for k in 0..n {
                    if !(&lhs[k] - &(&a[k] + &b[k])).is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Bracket-compatibility check for an invertible matrix:
    /// `A [x, y] = [A x, A y]` on all basis pairs.
    pub fn is_automorphism(&self, a: &Mat) -> Result<bool> {
        let n = self.dim();
        if a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "automorphism candidate must be {n}x{n}"
            )));
        }
        if a.rank() != n {
            return Ok(false);
        }
        for i in 0..n {
            for j in i + 1..n {
                let ei = unit(n, i);
                let ej = unit(n, j);
                let lhs = a.mul_vec(&self.bracket(&ei, &ej)?)?;
                let rhs = self.bracket(&a.mul_vec(&ei)?, &a.mul_vec(&ej)?)?;
                for k in 0..n {
                    if !(&lhs[k] - &rhs[k]).is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Transports structure constants along an invertible change of basis:
    /// the new basis vectors are the columns of `t` in the old coordinates.
    pub fn change_basis(&self, t: &Mat, new_labels: Vec<String>) -> Result<GradedLieAlgebra> {
        let n = self.dim();
        if t.rows() != n || t.cols() != n || new_labels.len() != n {
            return Err(Error::DimensionMismatch(
                "change of basis must be square of the algebra dimension".into(),
            ));
        }
        let t_inv = t.inverse()?;
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let bracket = self.bracket(&t.col(i), &t.col(j))?;
                let coords = t_inv.mul_vec(&bracket)?;
                let sparse: SparseVec = coords
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if !sparse.is_empty() {
                    brackets.push(((i, j), sparse));
                }
            }
        }
        GradedLieAlgebra::new(new_labels, None, brackets, self.domain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    LowerCentral,
    Derived,
}

pub fn unit(n: usize, i: usize) -> SVec {
    let mut v = svec_zero(n);
    v[i] = Scalar::one();
    v
}
