//! Modifications: graphs of linear maps from a stratified algebra into the
//! nonnegative part of a prolongation.
//!
//! A modification stores the prolongation with its splitting `p = g + q` and
//! a `(dim q) x (dim g)` matrix of polynomial entries in declared parameters.
//! Specializing the parameters yields the subalgebra test, the modified
//! bracket table in the graph basis, and the closure equations whose common
//! zeros are exactly the closing maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::descr::SigmaFile;
use crate::error::{Error, Result};
use crate::lie::{unit, GradedLieAlgebra, SparseVec};
use crate::linalg::{svec_is_zero, svec_zero, Mat, SVec, Subspace};
use crate::poly::{parse_poly, MultiPoly, PolyRing};
use crate::prolong::{semidirect, G0Spec, ProlongedAlgebra};
use crate::scalar::{Scalar, ScalarDomain};

#[derive(Debug, Clone)]
pub struct Modification {
    p: ProlongedAlgebra,
    params: Arc<PolyRing>,
    /// `sigma[r][c]`: coefficient of the `r`-th q-basis vector in the image
    /// of the `c`-th g-basis vector.
    sigma: Vec<Vec<MultiPoly>>,
}

/// Result of the subalgebra test at specialized parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureCheck {
    Closed,
    /// First failing basis pair, with the residual in q coordinates.
    Fails {
        left: String,
        right: String,
        residual: SVec,
    },
}

impl ClosureCheck {
    pub fn is_closed(&self) -> bool {
        matches!(self, ClosureCheck::Closed)
    }
}

impl Modification {
    pub fn new(
        p: ProlongedAlgebra,
        params: Arc<PolyRing>,
        sigma: Vec<Vec<MultiPoly>>,
    ) -> Result<Self> {
        let (qd, gd) = (p.q_dim(), p.g_dim());
        if sigma.len() != qd || sigma.iter().any(|row| row.len() != gd) {
            return Err(Error::DimensionMismatch(format!(
                "sigma must be {qd}x{gd} for this splitting"
            )));
        }
        Ok(Modification { p, params, sigma })
    }

    /// Zero map: the modification is `g` itself.
    pub fn zero(p: ProlongedAlgebra) -> Self {
        let params = PolyRing::new(Vec::<String>::new());
        let sigma = vec![vec![MultiPoly::zero(&params); p.g_dim()]; p.q_dim()];
        Modification { p, params, sigma }
    }

    /// Reads a sigma file against an already-constructed prolongation.
    pub fn from_file(file: &SigmaFile, p: ProlongedAlgebra) -> Result<Self> {
        let alg = p.algebra();
        let q_labels: Vec<&String> = p.q_indices().map(|i| &alg.labels()[i]).collect();
        if file.splitting.len() != q_labels.len()
            || file.splitting.iter().zip(&q_labels).any(|(a, b)| &a != b)
        {
            return Err(Error::Description(format!(
                "splitting {:?} does not match the prolongation's nonnegative part {:?}",
                file.splitting, q_labels
            )));
        }
        let mut unique = file.parameters.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != file.parameters.len() {
            return Err(Error::Description("duplicate parameter name".into()));
        }
        let params = PolyRing::new(file.parameters.clone());
        let mut sigma = vec![vec![MultiPoly::zero(&params); p.g_dim()]; p.q_dim()];
        for column in &file.sigma {
            let c = alg.label_index(&column.from)?;
            if c >= p.g_dim() {
                return Err(Error::Description(format!(
                    "sigma source {:?} is not in the negative part",
                    column.from
                )));
            }
            for (q_label, coeff) in &column.to {
                let q_idx = alg.label_index(q_label)?;
                if q_idx < p.g_dim() {
                    return Err(Error::Description(format!(
                        "sigma target {:?} is not in the splitting",
                        q_label
                    )));
                }
                let value = parse_coefficient(&params, coeff)?;
                if alg.domain() == ScalarDomain::Rational {
                    if let Some(c) = value.terms().find(|(_, c)| !c.is_rational()) {
                        return Err(Error::Description(format!(
                            "gaussian coefficient {} in a rational algebra",
                            c.1
                        )));
                    }
                }
                let r = q_idx - p.g_dim();
                sigma[r][c] = &sigma[r][c] + &value;
            }
        }
        Ok(Modification { p, params, sigma })
    }

    pub fn prolongation(&self) -> &ProlongedAlgebra {
        &self.p
    }

    pub fn params(&self) -> &Arc<PolyRing> {
        &self.params
    }

    pub fn sigma(&self) -> &[Vec<MultiPoly>] {
        &self.sigma
    }

    /// Evaluates sigma at parameter values.
    pub fn specialize(&self, bindings: &BTreeMap<String, Scalar>) -> Result<Mat> {
        for name in self.params.vars() {
            if !bindings.contains_key(name) {
                return Err(Error::UnboundParameter(name.clone()));
            }
        }
        let mut m = Mat::zeros(self.p.q_dim(), self.p.g_dim());
        for (r, row) in self.sigma.iter().enumerate() {
            for (c, entry) in row.iter().enumerate() {
                m[(r, c)] = entry.eval(bindings)?;
            }
        }
        Ok(m)
    }

    /// Graph vector `e_c + sigma(e_c)` in p coordinates.
    fn graph_basis_vector(&self, sigma: &Mat, c: usize) -> SVec {
        let n = self.p.dim();
        let mut v = svec_zero(n);
        v[c] = Scalar::one();
        for r in 0..self.p.q_dim() {
            v[self.p.g_dim() + r] = sigma[(r, c)].clone();
        }
        v
    }

    /// Subalgebra test: the q-component of each graph bracket must be sigma
    /// of its g-component.
    pub fn is_modification_subalgebra(
        &self,
        bindings: &BTreeMap<String, Scalar>,
    ) -> Result<ClosureCheck> {
        let sigma = self.specialize(bindings)?;
        let alg = self.p.algebra();
        let gd = self.p.g_dim();
        for i in 0..gd {
            for j in i + 1..gd {
                let x = self.graph_basis_vector(&sigma, i);
                let y = self.graph_basis_vector(&sigma, j);
                let w = alg.bracket(&x, &y)?;
                let (wg, wq) = self.p.split(&w);
                let expected = sigma.mul_vec(&wg)?;
                let residual: SVec = wq.iter().zip(&expected).map(|(a, b)| a - b).collect();
                if !svec_is_zero(&residual) {
                    return Ok(ClosureCheck::Fails {
                        left: alg.labels()[i].clone(),
                        right: alg.labels()[j].clone(),
                        residual,
                    });
                }
            }
        }
        Ok(ClosureCheck::Closed)
    }

    /// Structure constants of the graph algebra in the basis
    /// `f_i = e_i + sigma(e_i)`, together with its polarization.
    ///
    /// The polarization (span of the `f_i` over the first layer of `g`) is
    /// verified to bracket-generate.
    pub fn modified_brackets(
        &self,
        bindings: &BTreeMap<String, Scalar>,
    ) -> Result<(GradedLieAlgebra, Subspace)> {
        match self.is_modification_subalgebra(bindings)? {
            ClosureCheck::Closed => {}
            ClosureCheck::Fails { left, right, .. } => {
                return Err(Error::ClosureFailed { left, right });
            }
        }
        let sigma = self.specialize(bindings)?;
        let alg = self.p.algebra();
        let gd = self.p.g_dim();
        let mut brackets: Vec<((usize, usize), SparseVec)> = Vec::new();
        for i in 0..gd {
            for j in i + 1..gd {
                let x = self.graph_basis_vector(&sigma, i);
                let y = self.graph_basis_vector(&sigma, j);
                let w = alg.bracket(&x, &y)?;
                let (wg, _) = self.p.split(&w);
                let sparse: SparseVec = wg
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if !sparse.is_empty() {
                    brackets.push(((i, j), sparse));
                }
            }
        }
        let labels = (1..=gd).map(|k| format!("f{k}")).collect();
        let s = GradedLieAlgebra::new(labels, None, brackets, alg.domain())?;
        let first = self
            .p
            .algebra()
            .degrees()
            .map(|d| {
                (0..gd)
                    .filter(|&i| d[i] == -1)
                    .map(|i| unit(gd, i))
                    .collect::<Vec<SVec>>()
            })
            .unwrap_or_default();
        let polarization = Subspace::from_vectors(gd, first);
        if !bracket_generates(&s, &polarization)? {
            return Err(Error::NotPolarization(
                "first-layer graph does not bracket generate".into(),
            ));
        }
        Ok((s, polarization))
    }

    /// Polynomial closure equations in the declared parameters; the common
    /// zeros are exactly the parameter values at which the graph closes.
    /// Deduplicated, monic, canonically ordered.
    pub fn closure_equations(&self) -> Result<Vec<MultiPoly>> {
        let alg = self.p.algebra();
        let gd = self.p.g_dim();
        let qd = self.p.q_dim();
        let ring = &self.params;
        let mut equations: Vec<MultiPoly> = Vec::new();
        for i in 0..gd {
            for j in i + 1..gd {
                // Graph vectors with polynomial q-part.
                let mut x = vec![MultiPoly::zero(ring); alg.dim()];
                let mut y = vec![MultiPoly::zero(ring); alg.dim()];
                x[i] = MultiPoly::one(ring);
                y[j] = MultiPoly::one(ring);
                for r in 0..qd {
                    x[gd + r] = self.sigma[r][i].clone();
                    y[gd + r] = self.sigma[r][j].clone();
                }
                let w = bracket_poly(alg, &x, &y)?;
                // Residual: w_q - sigma(w_g).
                for r in 0..qd {
                    let mut expected = MultiPoly::zero(ring);
                    for c in 0..gd {
                        if !w[c].is_zero() && !self.sigma[r][c].is_zero() {
                            expected = &expected + &(&self.sigma[r][c] * &w[c]);
                        }
                    }
                    let residual = &w[gd + r] - &expected;
                    if !residual.is_zero() {
                        equations.push(residual.monic());
                    }
                }
            }
        }
        let mut keyed: Vec<(String, MultiPoly)> =
            equations.into_iter().map(|p| (p.to_string(), p)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        Ok(keyed.into_iter().map(|(_, p)| p).collect())
    }

    /// Solves the closure equations when they are linear in the parameters.
    /// Returns the affine solution set, or an error in the quadratic regime.
    pub fn solve_closure_linear(&self) -> Result<crate::linalg::SolveOutcome> {
        let eqs = self.closure_equations()?;
        let k = self.params.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for eq in &eqs {
            let mut row = svec_zero(k);
            let mut constant = Scalar::zero();
            for (mono, coeff) in eq.terms() {
                let total: u32 = mono.0.iter().sum();
                match total {
                    0 => constant = coeff.clone(),
                    1 => {
                        let var = mono.0.iter().position(|&e| e == 1).unwrap();
                        row[var] = coeff.clone();
                    }
                    _ => {
                        return Err(Error::Unsupported(
                            "closure equations are not linear in the parameters".into(),
                        ))
                    }
                }
            }
            rows.push(row);
            rhs.push(-&constant);
        }
        let a = if rows.is_empty() {
            Mat::zeros(0, k)
        } else {
            Mat::from_rows(rows)
        };
        crate::linalg::solve_affine(&a, &rhs)
    }
}

fn parse_coefficient(params: &Arc<PolyRing>, text: &str) -> Result<MultiPoly> {
    if let Ok(c) = text.parse::<Scalar>() {
        return Ok(MultiPoly::constant(params, c));
    }
    parse_poly(params, text)
}

/// Bracket with polynomial coefficients over the algebra's structure tensor.
pub fn bracket_poly(
    alg: &GradedLieAlgebra,
    x: &[MultiPoly],
    y: &[MultiPoly],
) -> Result<Vec<MultiPoly>> {
    let n = alg.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "algebra has dimension {n}"
        )));
    }
    let ring = x
        .first()
        .map(|p| p.ring().clone())
        .expect("nonempty coordinates");
    let mut out = vec![MultiPoly::zero(&ring); n];
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if y[j].is_zero() {
                continue;
            }
            let coeff = &x[i] * &y[j];
            for (k, c) in alg.bracket_basis(i, j) {
                out[k] = &out[k] + &coeff.scale(&c);
            }
        }
    }
    Ok(out)
}

/// Iterated bracket generation test for a subspace of an algebra.
pub fn bracket_generates(alg: &GradedLieAlgebra, seed: &Subspace) -> Result<bool> {
    let mut current = seed.clone();
    loop {
        let grown = current.sum(&alg.bracket_subspaces(seed, &current)?)?;
        if grown == current {
            return Ok(current.dim() == alg.dim());
        }
        current = grown;
    }
}

/// Kernel criterion for modifications of `g x R`: the graph of a functional
/// closes iff every layer below the first is in its kernel.
pub fn ultra_rigid_criterion(g: &GradedLieAlgebra, sigma: &[Scalar]) -> Result<bool> {
    let (ok, _) = g.is_stratified()?;
    if !ok {
        return Err(Error::NotStratified(
            "criterion needs a stratified algebra".into(),
        ));
    }
    if sigma.len() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "functional must have length {}",
            g.dim()
        )));
    }
    let degrees = g.degrees().expect("stratified algebra has degrees");
    Ok(sigma
        .iter()
        .zip(degrees)
        .all(|(c, &d)| d == -1 || c.is_zero()))
}

/// Builds the modification of `g x R` (grading derivation in degree zero)
/// whose sigma is the given functional on `g`.
pub fn semidirect_modification(g: &GradedLieAlgebra, sigma: &[Scalar]) -> Result<Modification> {
    let d = G0Spec::Grading.resolve(g)?;
    let p = semidirect(g, &d)?;
    let params = PolyRing::new(Vec::<String>::new());
    let row: Vec<MultiPoly> = sigma
        .iter()
        .map(|c| MultiPoly::constant(&params, c.clone()))
        .collect();
    Modification::new(p, params, vec![row])
}
