//! Matrix realizations: exact unipotent exponentials and logarithms, the
//! unit-upper-triangular x lower-triangular coset projection, and the
//! concrete sl(3) and su(2,1) models used by the bundled catalogs.

use crate::error::{Error, Result};
use crate::lie::{GradedLieAlgebra, SparseVec};
use crate::linalg::{solve_affine, Mat, SVec, SolveOutcome};
use crate::scalar::{Scalar, ScalarDomain};

/// Generator matrices for each basis label of a modeled algebra; the
/// commutator relations are verified against the algebra on construction.
#[derive(Debug, Clone)]
pub struct MatrixModel {
    pub name: String,
    pub size: usize,
    pub generators: Vec<(String, Mat)>,
}

impl MatrixModel {
    pub fn for_algebra(name: &str, alg: &GradedLieAlgebra, mats: Vec<Mat>) -> Result<Self> {
        let n = alg.dim();
        if mats.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "need one matrix per basis vector ({n})"
            )));
        }
        let size = mats[0].rows();
        for m in &mats {
            if m.rows() != size || m.cols() != size {
                return Err(Error::DimensionMismatch("ragged generator sizes".into()));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut expected = Mat::zeros(size, size);
                for (k, c) in alg.bracket_basis(i, j) {
                    expected = expected.add(&mats[k].scale(&c));
                }
                if mats[i].commutator(&mats[j]) != expected {
                    return Err(Error::Description(format!(
                        "model violates the bracket relation at ({}, {})",
                        alg.labels()[i],
                        alg.labels()[j]
                    )));
                }
            }
        }
        Ok(MatrixModel {
            name: name.to_string(),
            size,
            generators: alg.labels().iter().cloned().zip(mats).collect(),
        })
    }

    pub fn matrix_of(&self, label: &str) -> Option<&Mat> {
        self.generators
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, m)| m)
    }

    /// Realizes a coordinate vector as a matrix.
    pub fn realize(&self, coords: &[Scalar]) -> Mat {
        let mut acc = Mat::zeros(self.size, self.size);
        for ((_, m), c) in self.generators.iter().zip(coords) {
            if !c.is_zero() {
                acc = acc.add(&m.scale(c));
            }
        }
        acc
    }

    /// Coordinates of a matrix in the generator span, if it lies there.
    pub fn coordinates_of(&self, m: &Mat) -> Option<SVec> {
        let rows = self.size * self.size;
        let a = Mat::from_fn(rows, self.generators.len(), |r, c| {
            self.generators[c].1.flatten()[r].clone()
        });
        match solve_affine(&a, &m.flatten()).ok()? {
            SolveOutcome::Solution { particular, .. } => Some(particular),
            SolveOutcome::Infeasible => None,
        }
    }
}

/// Exact exponential of a nilpotent matrix.
pub fn exp_nilpotent(m: &Mat) -> Result<Mat> {
    let n = m.rows();
    let mut acc = Mat::identity(n);
    let mut power = Mat::identity(n);
    let mut fact = Scalar::one();
    for k in 1..=n + 1 {
        power = power.matmul(m);
        if power.is_zero() {
            return Ok(acc);
        }
        if k == n + 1 {
            return Err(Error::NotNilpotent("matrix exponential refused".into()));
        }
        fact = &fact * &Scalar::from_int(k as i64);
        acc = acc.add(&power.scale(&fact.inv()?));
    }
    Ok(acc)
}

/// Exact logarithm of a unipotent matrix.
pub fn log_unipotent(u: &Mat) -> Result<Mat> {
    let n = u.rows();
    let nilpotent = u.sub(&Mat::identity(n));
    let mut acc = Mat::zeros(n, n);
    let mut power = Mat::identity(n);
    for k in 1..=n + 1 {
        power = power.matmul(&nilpotent);
        if power.is_zero() {
            return Ok(acc);
        }
        if k == n + 1 {
            return Err(Error::NotNilpotent("matrix is not unipotent".into()));
        }
        let coeff = Scalar::from_int(if k % 2 == 1 { 1 } else { -1 })
            .checked_div(&Scalar::from_int(k as i64))?;
        acc = acc.add(&power.scale(&coeff));
    }
    Ok(acc)
}

/// Outcome of factoring through the open cell `m = g q` with `g` unit upper
/// triangular and `q` lower triangular.
#[derive(Debug, Clone, PartialEq)]
pub enum CosetProjection<M> {
    Factors { g: M, q: M },
    NoIntersection,
}

/// Exact UL projection; `NoIntersection` exactly when a trailing principal
/// minor vanishes.
pub fn ul_project_exact(m: &Mat) -> Result<CosetProjection<Mat>> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::DimensionMismatch("square matrix required".into()));
    }
    if m.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let mut l = m.clone();
    let mut g = Mat::identity(n);
    for i in (0..n).rev() {
        // Rows below i are already reduced; use them to clear row i to the
        // right of the diagonal.
        for j in i + 1..n {
            if l[(i, j)].is_zero() {
                continue;
            }
            if l[(j, j)].is_zero() {
                return Ok(CosetProjection::NoIntersection);
            }
            let factor = &l[(i, j)] / &l[(j, j)];
            for c in 0..=j {
                let delta = &factor * &l[(j, c)];
                l[(i, c)] = &l[(i, c)] - &delta;
            }
            // Row operation on l is E l with E = I - factor E_ij, so g picks
            // up E^{-1} on the right: column j gains factor * column i.
            for r in 0..n {
                let delta = &g[(r, i)] * &factor;
                g[(r, j)] = &g[(r, j)] + &delta;
            }
        }
        if i > 0 && l[(i, i)].is_zero() {
            return Ok(CosetProjection::NoIntersection);
        }
    }
    Ok(CosetProjection::Factors { g, q: l })
}

/// Floating UL projection with a pivot threshold, for charts with
/// transcendental entries.
pub fn ul_project_f64(m: &[Vec<f64>], tol: f64) -> CosetProjection<Vec<Vec<f64>>> {
    let n = m.len();
    let mut l: Vec<Vec<f64>> = m.to_vec();
    let mut g = vec![vec![0.0; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            if l[i][j] == 0.0 {
                continue;
            }
            if l[j][j].abs() <= tol {
                return CosetProjection::NoIntersection;
            }
            let factor = l[i][j] / l[j][j];
            for c in 0..=j {
                l[i][c] -= factor * l[j][c];
            }
            for r in 0..n {
                let delta = g[r][i] * factor;
                g[r][j] += delta;
            }
        }
        if i > 0 && l[i][i].abs() <= tol {
            return CosetProjection::NoIntersection;
        }
    }
    CosetProjection::Factors { g, q: l }
}

/// Heisenberg chart `H(x1, x2, x3)` in the sl(3) model.
pub fn chart_h(x1: &Scalar, x2: &Scalar, x3: &Scalar) -> Mat {
    let mut m = Mat::identity(3);
    m[(0, 1)] = x1.clone();
    m[(1, 2)] = x2.clone();
    m[(0, 2)] = x3.clone();
    m
}

/// Planar rigid-motion chart `R(y1, y2, y3)` (floating entries).
pub fn chart_r_f64(y1: f64, y2: f64, y3: f64) -> Vec<Vec<f64>> {
    vec![
        vec![y1.cos(), y1.sin(), y3],
        vec![-y1.sin(), y1.cos(), y2],
        vec![0.0, 0.0, 1.0],
    ]
}

pub fn chart_h_f64(x1: f64, x2: f64, x3: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0, x1, x3], vec![0.0, 1.0, x2], vec![0.0, 0.0, 1.0]]
}

fn e(i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(3, 3);
    m[(i, j)] = Scalar::one();
    m
}

/// The three nilpotent generators of the Heisenberg algebra inside sl(3):
/// `e1 = E12, e2 = E23, e3 = E13`.
pub fn sl3_heisenberg_generators() -> Vec<Mat> {
    vec![e(0, 1), e(1, 2), e(0, 2)]
}

/// Basis of the lower-triangular traceless 3x3 matrices (the nonnegative
/// part of the sl(3) grading): `E21, E32, E31, E11-E22, E22-E33`.
pub fn sl3_q_space() -> Vec<Mat> {
    vec![
        e(1, 0),
        e(2, 1),
        e(2, 0),
        e(0, 0).sub(&e(1, 1)),
        e(1, 1).sub(&e(2, 2)),
    ]
}

/// Builds sl(3) matrices for every basis vector of an abstract prolongation
/// of the Heisenberg algebra (degrees -2..2), by matching bracket actions.
/// The result is verified to be a Lie algebra isomorphism onto sl(3).
pub fn sl3_model_for(p: &crate::prolong::ProlongedAlgebra) -> Result<MatrixModel> {
    let alg = p.algebra();
    if p.g_dim() != 3 || alg.dim() != 8 {
        return Err(Error::Unsupported(
            "the sl(3) model applies to the 8-dimensional Heisenberg prolongation".into(),
        ));
    }
    let mut images: Vec<Option<Mat>> = vec![None; 8];
    for (i, m) in sl3_heisenberg_generators().into_iter().enumerate() {
        images[i] = Some(m);
    }
    let q_space = sl3_q_space();
    // Process q elements by ascending degree so every bracket value needed
    // on the right-hand side is already realized.
    let mut order: Vec<usize> = p.q_indices().collect();
    let degrees = alg.degrees().expect("prolongation is graded");
    order.sort_by_key(|&i| (degrees[i], i));
    for b in order {
        // Solve [W, model(e_a)] = model([u_b, e_a]) for W in the q space.
        let mut rows: Vec<SVec> = Vec::new();
        let mut rhs: SVec = Vec::new();
        for a in 0..3 {
            let target: SparseVec = alg.bracket_basis(b, a);
            let mut target_mat = Mat::zeros(3, 3);
            for (k, c) in target {
                let img = images[k]
                    .as_ref()
                    .ok_or_else(|| Error::Unsupported("bracket image not yet realized".into()))?;
                target_mat = target_mat.add(&img.scale(&c));
            }
            let ea = images[a].as_ref().unwrap().clone();
            for r in 0..3 {
                for c in 0..3 {
                    let mut row = Vec::with_capacity(q_space.len());
                    for w in &q_space {
                        row.push(w.commutator(&ea)[(r, c)].clone());
                    }
                    rows.push(row);
                    rhs.push(target_mat[(r, c)].clone());
                }
            }
        }
        let a = Mat::from_rows(rows);
        match solve_affine(&a, &rhs)? {
            SolveOutcome::Solution {
                particular,
                homogeneous,
            } => {
                if homogeneous.dim() != 0 {
                    return Err(Error::Unsupported("sl(3) realization is not unique".into()));
                }
                let mut w = Mat::zeros(3, 3);
                for (c, m) in particular.iter().zip(&q_space) {
                    if !c.is_zero() {
                        w = w.add(&m.scale(c));
                    }
                }
                images[b] = Some(w);
            }
            SolveOutcome::Infeasible => {
                return Err(Error::Unsupported(
                    "prolongation element has no sl(3) realization".into(),
                ))
            }
        }
    }
    let mats: Vec<Mat> = images.into_iter().map(Option::unwrap).collect();
    MatrixModel::for_algebra("sl3", alg, mats)
}

fn gauss(re: (i64, i64), im: (i64, i64)) -> Scalar {
    let r = Scalar::ratio(re.0, re.1);
    let i = Scalar::ratio(im.0, im.1);
    &r + &(&i * &Scalar::i())
}

fn mat3(entries: [[Scalar; 3]; 3]) -> Mat {
    let mut m = Mat::zeros(3, 3);
    for (i, row) in entries.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// The eight su(2,1) matrices of the graded basis
/// `X, Y, Z, H, U, thX, thY, thZ` (degrees -1,-1,-2,0,0,1,1,2).
pub fn su21_matrices() -> Vec<Mat> {
    let z = || Scalar::zero();
    let i = |n: i64| gauss((0, 1), (n, 1));
    let r = Scalar::from_int;
    vec![
        // X
        mat3([[z(), i(1), z()], [i(-1), z(), i(-1)], [z(), i(-1), z()]]),
        // Y
        mat3([[z(), r(1), z()], [r(1), z(), r(1)], [z(), r(-1), z()]]),
        // Z
        mat3([[i(2), z(), i(2)], [z(), z(), z()], [i(-2), z(), i(-2)]]),
        // H
        mat3([[z(), z(), r(1)], [z(), z(), z()], [r(1), z(), z()]]),
        // U
        mat3([[i(1), z(), z()], [z(), i(-2), z()], [z(), z(), i(1)]]),
        // theta X
        mat3([[z(), i(-1), z()], [i(1), z(), i(-1)], [z(), i(-1), z()]]),
        // theta Y
        mat3([[z(), r(-1), z()], [r(-1), z(), r(1)], [z(), r(-1), z()]]),
        // theta Z
        mat3([[i(2), z(), i(-2)], [z(), z(), z()], [i(2), z(), i(-2)]]),
    ]
}

/// The graded su(2,1) prolongation of the Heisenberg algebra, with structure
/// constants computed from the matrices (they come out rational).
pub fn su21_graded() -> Result<(GradedLieAlgebra, MatrixModel)> {
    let mats = su21_matrices();
    let labels: Vec<String> = ["X", "Y", "Z", "H", "U", "thX", "thY", "thZ"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let degrees = vec![-1, -1, -2, 0, 0, 1, 1, 2];
    // Express each commutator in the basis.
    let rows = 9usize;
    let span = Mat::from_fn(rows * 2, 8, |r, c| {
        // Real and imaginary parts stacked so the solve runs over Q.
        let flat = mats[c].flatten();
        let entry = &flat[r / 2];
        if r % 2 == 0 {
            Scalar::Rat(entry.re().clone())
        } else {
            entry
                .im()
                .map(|v| Scalar::Rat(v.clone()))
                .unwrap_or_else(Scalar::zero)
        }
    });
    let mut brackets: Vec<((usize, usize), SparseVec)> = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            let comm = mats[i].commutator(&mats[j]);
            let flat = comm.flatten();
            let rhs: SVec = (0..rows * 2)
                .map(|r| {
                    let entry = &flat[r / 2];
                    if r % 2 == 0 {
                        Scalar::Rat(entry.re().clone())
                    } else {
                        entry
                            .im()
                            .map(|v| Scalar::Rat(v.clone()))
                            .unwrap_or_else(Scalar::zero)
                    }
                })
                .collect();
            match solve_affine(&span, &rhs)? {
                SolveOutcome::Solution { particular, .. } => {
                    let sparse: SparseVec = particular
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    if !sparse.is_empty() {
                        brackets.push(((i, j), sparse));
                    }
                }
                SolveOutcome::Infeasible => {
                    return Err(Error::Description(
                        "su(2,1) matrices do not close under commutator".into(),
                    ))
                }
            }
        }
    }
    let alg = GradedLieAlgebra::new(
        labels,
        Some(degrees),
        brackets,
        ScalarDomain::GaussianRational,
    )?;
    let model = MatrixModel::for_algebra("su21", &alg, mats)?;
    Ok((alg, model))
}
