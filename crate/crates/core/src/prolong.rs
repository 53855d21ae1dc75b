//! Strata-preserving derivations and layer-by-layer Tanaka prolongation.
//!
//! Degree-`k` elements are represented concretely by their action on the
//! negative part: each basis element of a nonnegative layer stores the map
//! `X -> [u, X]` for `X` in the base algebra, with values expressed in the
//! already-constructed basis of the prolongation. Brackets among nonnegative
//! layers are operator commutators resolved against the computed layer bases,
//! so maximality and faithfulness stay checkable by linear algebra alone.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lie::{unit, GradedLieAlgebra, SparseVec};
use crate::linalg::{solve_affine, svec_is_zero, svec_zero, Mat, SVec, SolveOutcome, Subspace};
use crate::scalar::Scalar;

/// A space of derivation matrices closed under commutator.
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    algebra: GradedLieAlgebra,
    basis: Vec<Mat>,
    /// Commutator structure constants: `(i, j) -> coords of [b_i, b_j]`,
    /// for `i < j`.
    closure: BTreeMap<(usize, usize), SVec>,
}

impl DerivationSpace {
    /// Wraps an explicit list of matrices, verifying the Leibniz identity for
    /// each and closure of the span under commutators.
    pub fn from_matrices(algebra: &GradedLieAlgebra, basis: Vec<Mat>) -> Result<Self> {
        for (idx, m) in basis.iter().enumerate() {
            if !algebra.is_derivation(m)? {
                return Err(Error::NotDerivation(idx));
            }
        }
        let mut space = DerivationSpace {
            algebra: algebra.clone(),
            basis,
            closure: BTreeMap::new(),
        };
        space.closure = space.compute_closure()?;
        Ok(space)
    }

    fn compute_closure(&self) -> Result<BTreeMap<(usize, usize), SVec>> {
        let mut closure = BTreeMap::new();
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let comm = self.basis[i].commutator(&self.basis[j]);
                let coords = self.coordinates_of(&comm).ok_or(Error::NotClosed)?;
                closure.insert((i, j), coords);
            }
        }
        Ok(closure)
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn closure_constants(&self) -> &BTreeMap<(usize, usize), SVec> {
        &self.closure
    }

    /// Coordinates of a matrix in this basis, if it lies in the span.
    pub fn coordinates_of(&self, m: &Mat) -> Option<SVec> {
        let n2 = self.algebra.dim() * self.algebra.dim();
        if self.basis.is_empty() {
            return if m.is_zero() { Some(Vec::new()) } else { None };
        }
        let a = Mat::from_fn(n2, self.basis.len(), |r, c| {
            self.basis[c].flatten()[r].clone()
        });
        match solve_affine(&a, &m.flatten()).ok()? {
            SolveOutcome::Solution { particular, .. } => Some(particular),
            SolveOutcome::Infeasible => None,
        }
    }

    /// Solves for the element whose restriction to the first layer is the
    /// given block (rows/columns ordered like `layer_indices(-1)`).
    pub fn coordinates_for_first_layer_block(&self, block: &Mat) -> Result<SVec> {
        let first = self.algebra.layer_indices(-1);
        let k = first.len();
        if block.rows() != k || block.cols() != k {
            return Err(Error::DimensionMismatch(format!(
                "first layer has dimension {k}"
            )));
        }
        if self.basis.is_empty() {
            return if block.is_zero() {
                Ok(Vec::new())
            } else {
                Err(Error::Unsupported("block not in derivation space".into()))
            };
        }
        let a = Mat::from_fn(k * k, self.basis.len(), |r, c| {
            let (p, q) = (r / k, r % k);
            self.basis[c][(first[p], first[q])].clone()
        });
        let rhs: SVec = (0..k * k).map(|r| block[(r / k, r % k)].clone()).collect();
        match solve_affine(&a, &rhs)? {
            SolveOutcome::Solution { particular, .. } => Ok(particular),
            SolveOutcome::Infeasible => Err(Error::Unsupported(
                "first-layer block does not extend within this derivation space".into(),
            )),
        }
    }

    /// The span as a subspace of flattened matrices.
    pub fn matrix_span(&self) -> Subspace {
        let n2 = self.algebra.dim() * self.algebra.dim();
        Subspace::from_vectors(n2, self.basis.iter().map(Mat::flatten).collect())
    }

    pub fn combination(&self, coords: &[Scalar]) -> Mat {
        let n = self.algebra.dim();
        let mut acc = Mat::zeros(n, n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }
}

/// How to choose the degree-zero part of a prolongation.
#[derive(Debug, Clone)]
pub enum G0Spec {
    /// All strata-preserving derivations.
    Full,
    /// Derivations mapping each first-layer basis line into itself.
    Diagonal,
    /// The span of the grading derivation.
    Grading,
    /// An explicit matrix list.
    Matrices(Vec<Mat>),
}

impl G0Spec {
    pub fn resolve(&self, g: &GradedLieAlgebra) -> Result<DerivationSpace> {
        match self {
            G0Spec::Full => derivation_algebra(g),
            G0Spec::Diagonal => derivation_algebra_diagonal(g),
            G0Spec::Grading => DerivationSpace::from_matrices(g, vec![g.grading_derivation()?]),
            G0Spec::Matrices(mats) => {
                let space = DerivationSpace::from_matrices(g, mats.clone())?;
                // Strata preservation: each matrix must keep the first layer.
                let first = g.layer(-1);
                for (idx, m) in space.basis().iter().enumerate() {
                    for q in g.layer_indices(-1) {
                        if !first.contains_vec(&m.col(q)) {
                            return Err(Error::NotDerivation(idx));
                        }
                    }
                }
                Ok(space)
            }
        }
    }
}

fn require_stratified(g: &GradedLieAlgebra) -> Result<usize> {
    let (ok, step) = g.is_stratified()?;
    if !ok {
        return Err(Error::NotStratified(
            "operation requires a stratified algebra".into(),
        ));
    }
    Ok(step)
}

/// Basis of all strata-preserving derivations: the solution space of the
/// Leibniz linear system restricted to maps preserving the first layer.
pub fn derivation_algebra(g: &GradedLieAlgebra) -> Result<DerivationSpace> {
    derivation_space_constrained(g, false)
}

/// Like [`derivation_algebra`] but additionally requiring
/// `u(e) in span(e)` for each first-layer basis vector `e`.
pub fn derivation_algebra_diagonal(g: &GradedLieAlgebra) -> Result<DerivationSpace> {
    derivation_space_constrained(g, true)
}

fn derivation_space_constrained(g: &GradedLieAlgebra, diagonal: bool) -> Result<DerivationSpace> {
    require_stratified(g)?;
    let n = g.dim();
    let first = g.layer_indices(-1);
    let idx = |p: usize, q: usize| p * n + q; // entry (p, q): coefficient of e_p in u(e_q)
    let mut rows: Vec<SVec> = Vec::new();

    // u(g_{-1}) inside g_{-1}.
    for &q in &first {
        for p in 0..n {
            let keep = if diagonal { p == q } else { first.contains(&p) };
            if !keep {
                let mut row = svec_zero(n * n);
                row[idx(p, q)] = Scalar::one();
                rows.push(row);
            }
        }
    }

    // Leibniz on basis pairs: u([ei,ej]) - [u ei, ej] - [ei, u ej] = 0.
    for i in 0..n {
        for j in i + 1..n {
            let target = g.bracket_basis(i, j);
            for k in 0..n {
                let mut row = svec_zero(n * n);
                // u([ei,ej])_k = sum_m c_m u_{k,m}
                for (m, c) in &target {
                    row[idx(k, *m)] = &row[idx(k, *m)] + c;
                }
                // -[u ei, ej]_k = -sum_p u_{p,i} c_{pj}^k
                for p in 0..n {
                    for (t, c) in g.bracket_basis(p, j) {
                        if t == k {
                            row[idx(p, i)] = &row[idx(p, i)] - &c;
                        }
                    }
                    // -[ei, u ej]_k = -sum_p u_{p,j} c_{ip}^k
                    for (t, c) in g.bracket_basis(i, p) {
                        if t == k {
                            row[idx(p, j)] = &row[idx(p, j)] - &c;
                        }
                    }
                }
                if !svec_is_zero(&row) {
                    rows.push(row);
                }
            }
        }
    }

    let system = if rows.is_empty() {
        Mat::zeros(0, n * n)
    } else {
        Mat::from_rows(rows)
    };
    let null = system.nullspace();
    let basis: Vec<Mat> = null
        .basis()
        .iter()
        .map(|v| Mat::from_flat(n, n, v.clone()))
        .collect();
    DerivationSpace::from_matrices(g, basis)
}

/// A finite graded prolongation `p = g + q` with its splitting.
#[derive(Debug, Clone)]
pub struct ProlongedAlgebra {
    algebra: GradedLieAlgebra,
    g_dim: usize,
    /// `(degree, dimension)` for every computed layer, ascending by degree;
    /// includes layers reported but not included in `algebra` when the
    /// computation was capped before reaching a zero layer.
    layer_dims: Vec<(i64, usize)>,
    rigid: bool,
}

impl ProlongedAlgebra {
    /// Adopts an explicitly given graded algebra as a prolongation with its
    /// splitting read off the degrees. The negative-degree basis vectors
    /// must come first, the negative part must be stratified, and every
    /// nonnegative basis element must act faithfully on the first layer.
    pub fn from_graded(algebra: GradedLieAlgebra) -> Result<Self> {
        let degrees = algebra.degrees().ok_or(Error::MissingDegrees)?.to_vec();
        let g_dim = degrees.iter().filter(|&&d| d < 0).count();
        if degrees[..g_dim].iter().any(|&d| d >= 0) || degrees[g_dim..].iter().any(|&d| d < 0) {
            return Err(Error::Description(
                "negative-degree basis vectors must precede the nonnegative part".into(),
            ));
        }
        let mut layer_dims: Vec<(i64, usize)> = Vec::new();
        let min = *degrees.iter().min().unwrap();
        let max = *degrees.iter().max().unwrap();
        for d in min..=max {
            layer_dims.push((d, degrees.iter().filter(|&&x| x == d).count()));
        }
        let p = ProlongedAlgebra {
            algebra,
            g_dim,
            layer_dims,
            rigid: true,
        };
        let (ok, _) = p.base().is_stratified()?;
        if !ok {
            return Err(Error::NotStratified(
                "negative part of the splitting must be stratified".into(),
            ));
        }
        // Faithfulness of each nonnegative layer on the first layer.
        let alg = p.algebra();
        let first = alg.layer_indices(-1);
        for d in 0..=max {
            let layer = alg.layer_indices(d);
            if layer.is_empty() {
                continue;
            }
            let n = alg.dim();
            let rows: Vec<SVec> = first
                .iter()
                .flat_map(|&a| {
                    let cols: Vec<SVec> = layer
                        .iter()
                        .map(|&b| {
                            let mut dense = svec_zero(n);
                            for (k, c) in alg.bracket_basis(b, a) {
                                dense[k] = c;
                            }
                            dense
                        })
                        .collect();
                    (0..n).map(move |r| cols.iter().map(|c| c[r].clone()).collect())
                })
                .collect();
            let system = Mat::from_rows(rows);
            if system.nullspace().dim() != 0 {
                return Err(Error::Description(format!(
                    "layer {d} does not act faithfully on the first layer"
                )));
            }
        }
        Ok(p)
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn g_dim(&self) -> usize {
        self.g_dim
    }

    pub fn q_dim(&self) -> usize {
        self.algebra.dim() - self.g_dim
    }

    pub fn g_indices(&self) -> std::ops::Range<usize> {
        0..self.g_dim
    }

    pub fn q_indices(&self) -> std::ops::Range<usize> {
        self.g_dim..self.algebra.dim()
    }

    pub fn rigid(&self) -> bool {
        self.rigid
    }

    pub fn layer_dims(&self) -> &[(i64, usize)] {
        &self.layer_dims
    }

    /// The negative part as a standalone algebra (the original input).
    pub fn base(&self) -> GradedLieAlgebra {
        let n = self.g_dim;
        let labels = self.algebra.labels()[..n].to_vec();
        let degrees = self.algebra.degrees().map(|d| d[..n].to_vec());
        let mut brackets = Vec::new();
        for (&(i, j), v) in self.algebra.bracket_entries() {
            if i < n && j < n {
                debug_assert!(v.iter().all(|(k, _)| *k < n));
                brackets.push(((i, j), v.clone()));
            }
        }
        GradedLieAlgebra::new(labels, degrees, brackets, self.algebra.domain())
            .expect("negative part is well-formed")
    }

    pub fn q_subspace(&self) -> Subspace {
        let n = self.dim();
        Subspace::from_vectors(n, self.q_indices().map(|i| unit(n, i)).collect())
    }

    /// Splits a vector of `p` into its `g` and `q` coordinate parts.
    pub fn split(&self, v: &[Scalar]) -> (SVec, SVec) {
        (v[..self.g_dim].to_vec(), v[self.g_dim..].to_vec())
    }

    /// Span of `ad` over the nonnegative part, as flattened matrices.
    pub fn ad_q_span(&self) -> Subspace {
        let n = self.dim();
        Subspace::from_vectors(
            n * n,
            self.q_indices()
                .map(|i| self.algebra.ad_basis(i).flatten())
                .collect(),
        )
    }
}

struct LayerBuilder {
    /// Degrees of the prolongation basis built so far.
    deg_of: Vec<i64>,
    /// For basis indices at and above `g_dim`: the action map, one sparse
    /// column per base basis vector.
    actions: Vec<Vec<SparseVec>>,
    g_dim: usize,
}

impl LayerBuilder {
    /// `[e_b, e_a]` for a prolongation basis index `b` and base index `a`.
    fn action_on_base(&self, g: &GradedLieAlgebra, b: usize, a: usize) -> SparseVec {
        if b < self.g_dim {
            g.bracket_basis(b, a)
        } else {
            self.actions[b - self.g_dim][a].clone()
        }
    }
}

/// Tanaka prolongation of a stratified algebra through a chosen `g0`,
/// computed layer by layer up to `max_degree` or the first zero layer.
///
/// When a zero layer is found the result is the complete finite prolongation
/// and the rigidity flag is set. Otherwise the computation was capped with a
/// nonzero top layer; the reported layer dimensions cover everything
/// computed, while the assembled algebra keeps only `g + g0` (a graded
/// truncation above degree zero would not close under brackets).
pub fn tanaka_prolong(
    g: &GradedLieAlgebra,
    g0: &DerivationSpace,
    max_degree: usize,
) -> Result<ProlongedAlgebra> {
    let step = require_stratified(g)?;
    let n = g.dim();

    let mut builder = LayerBuilder {
        deg_of: g
            .degrees()
            .expect("stratified algebra has degrees")
            .to_vec(),
        actions: Vec::new(),
        g_dim: n,
    };
    let mut layer_dims: Vec<(i64, usize)> = (1..=step as i64)
        .rev()
        .map(|j| (-j, g.layer_indices(-j).len()))
        .collect();

    // Degree 0: the supplied derivation space.
    for b in g0.basis() {
        builder.deg_of.push(0);
        builder
            .actions
            .push((0..n).map(|a| sparse_of_col(b, a)).collect());
    }
    layer_dims.push((0, g0.dim()));

    let mut rigid = false;
    let mut included_top = 0i64;
    for k in 1..=max_degree as i64 {
        let new_layer = solve_layer(g, &builder, k)?;
        layer_dims.push((k, new_layer.len()));
        if new_layer.is_empty() {
            rigid = true;
            break;
        }
        for action in new_layer {
            builder.deg_of.push(k);
            builder.actions.push(action);
        }
        included_top = k;
    }

    // A graded truncation above degree zero would not close under brackets,
    // so a capped non-rigid run assembles only g + g0.
    let top = if rigid { included_top } else { 0 };
    let (labels, degrees, keep) = assemble_meta(g, &builder, top);
    let brackets = assemble_brackets(g, &builder, keep)?;
    let algebra = GradedLieAlgebra::new(labels, Some(degrees), brackets, g.domain())?;
    Ok(ProlongedAlgebra {
        algebra,
        g_dim: n,
        layer_dims,
        rigid,
    })
}

fn sparse_of_col(m: &Mat, col: usize) -> SparseVec {
    (0..m.rows())
        .filter(|&r| !m[(r, col)].is_zero())
        .map(|r| (r, m[(r, col)].clone()))
        .collect()
}

fn assemble_meta(
    g: &GradedLieAlgebra,
    builder: &LayerBuilder,
    top: i64,
) -> (Vec<String>, Vec<i64>, usize) {
    let mut labels: Vec<String> = g.labels().to_vec();
    let mut degrees: Vec<i64> = g.degrees().unwrap().to_vec();
    let mut keep = g.dim();
    let mut per_degree_count: BTreeMap<i64, usize> = BTreeMap::new();
    for (offset, &d) in builder.deg_of[g.dim()..].iter().enumerate() {
        if d > top {
            break;
        }
        let c = per_degree_count.entry(d).or_insert(0);
        *c += 1;
        labels.push(format!("q{}_{}", d, c));
        degrees.push(d);
        keep = g.dim() + offset + 1;
    }
    (labels, degrees, keep)
}

/// Solves the Leibniz system for one positive layer; returns the action maps
/// of a canonical (echelon-reduced) basis.
fn solve_layer(
    g: &GradedLieAlgebra,
    builder: &LayerBuilder,
    k: i64,
) -> Result<Vec<Vec<SparseVec>>> {
    let n = g.dim();
    let p_dim = builder.deg_of.len();
    // Unknowns: w_{b,a} with a a base index, b a prolongation index of degree
    // deg(a) + k. Ordered by (a, b) for reproducible layer bases.
    let mut unknowns: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        let target = builder.deg_of[a] + k;
        for b in 0..p_dim {
            if builder.deg_of[b] == target {
                unknowns.push((a, b));
            }
        }
    }
    if unknowns.is_empty() {
        return Ok(Vec::new());
    }
    let slot: BTreeMap<(usize, usize), usize> = unknowns
        .iter()
        .enumerate()
        .map(|(s, &ab)| (ab, s))
        .collect();

    let mut rows: Vec<SVec> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // u([e_i, e_j]) - [u(e_i), e_j] + [u(e_j), e_i] = 0, one scalar
            // equation per prolongation coordinate.
            let mut row_per_coord: Vec<SVec> = vec![svec_zero(unknowns.len()); p_dim];
            for (m, c) in g.bracket_basis(i, j) {
                for b in 0..p_dim {
                    if let Some(&s) = slot.get(&(m, b)) {
                        row_per_coord[b][s] = &row_per_coord[b][s] + &c;
                    }
                }
            }
            for (&(a, b), &s) in &slot {
                if a == i {
                    for (t, c) in builder.action_on_base(g, b, j) {
                        row_per_coord[t][s] = &row_per_coord[t][s] - &c;
                    }
                } else if a == j {
                    for (t, c) in builder.action_on_base(g, b, i) {
                        row_per_coord[t][s] = &row_per_coord[t][s] + &c;
                    }
                }
            }
            for row in row_per_coord {
                if !svec_is_zero(&row) {
                    rows.push(row);
                }
            }
        }
    }

    let system = if rows.is_empty() {
        Mat::zeros(0, unknowns.len())
    } else {
        Mat::from_rows(rows)
    };
    let null = system.nullspace();
    let mut layer = Vec::new();
    for v in null.basis() {
        let mut action: Vec<SparseVec> = vec![Vec::new(); n];
        for (s, &(a, b)) in unknowns.iter().enumerate() {
            if !v[s].is_zero() {
                action[a].push((b, v[s].clone()));
            }
        }
        layer.push(action);
    }
    Ok(layer)
}

/// Structure constants for the kept prefix of the prolongation basis.
fn assemble_brackets(
    g: &GradedLieAlgebra,
    builder: &LayerBuilder,
    keep: usize,
) -> Result<Vec<((usize, usize), SparseVec)>> {
    let n = g.dim();
    let mut out: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    for (&(i, j), v) in g.bracket_entries() {
        out.insert((i, j), v.clone());
    }
    // q x g brackets come straight from the stored actions.
    for b in n..keep {
        for a in 0..n {
            let v = builder.action_on_base(g, b, a);
            if !v.is_empty() {
                out.insert((a, b), v.iter().map(|(t, c)| (*t, -c)).collect());
            }
        }
    }
    // q x q brackets by operator commutator, in ascending total degree so
    // every lookup is already resolved.
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in n..keep {
        for j in i + 1..keep {
            pairs.push((i, j));
        }
    }
    pairs.sort_by_key(|&(i, j)| (builder.deg_of[i] + builder.deg_of[j], i, j));
    for (i, j) in pairs {
        let coords = commutator_in_layers(g, builder, keep, &out, i, j)?;
        if !coords.is_empty() {
            out.insert((i, j), coords);
        }
    }
    Ok(out.into_iter().collect())
}

/// Resolves `[u_i, u_j]` for nonnegative basis elements through its action on
/// the base, then expresses it in the basis of the target layer.
fn commutator_in_layers(
    g: &GradedLieAlgebra,
    builder: &LayerBuilder,
    keep: usize,
    table: &BTreeMap<(usize, usize), SparseVec>,
    i: usize,
    j: usize,
) -> Result<SparseVec> {
    let n = g.dim();
    let p_dim = keep;
    let lookup = |a: usize, b: usize| -> SparseVec {
        // [e_a, e_b] from the partially built table (a, b arbitrary order).
        if let Some(v) = table.get(&(a.min(b), a.max(b))) {
            if a < b {
                v.clone()
            } else {
                v.iter().map(|(t, c)| (*t, -c)).collect()
            }
        } else {
            Vec::new()
        }
    };
    // Action of the commutator on each base vector:
    // [[u_i, u_j], X] = [u_i, [u_j, X]] - [u_j, [u_i, X]].
    let mut action_cols: Vec<SVec> = Vec::new();
    for a in 0..n {
        let mut acc = svec_zero(p_dim);
        for (w, c) in builder.action_on_base(g, j, a) {
            let inner = if w < n {
                builder.action_on_base(g, i, w)
            } else {
                lookup(i, w)
            };
            for (t, d) in inner {
                if t >= p_dim {
                    return Err(Error::Unsupported(
                        "commutator escapes the computed layers".into(),
                    ));
                }
                acc[t] = &acc[t] + &(&c * &d);
            }
        }
        for (w, c) in builder.action_on_base(g, i, a) {
            let inner = if w < n {
                builder.action_on_base(g, j, w)
            } else {
                lookup(j, w)
            };
            for (t, d) in inner {
                if t >= p_dim {
                    return Err(Error::Unsupported(
                        "commutator escapes the computed layers".into(),
                    ));
                }
                acc[t] = &acc[t] - &(&c * &d);
            }
        }
        action_cols.push(acc);
    }

    // Express in the target layer by matching actions.
    let target_degree = builder.deg_of[i] + builder.deg_of[j];
    let candidates: Vec<usize> = (n..keep)
        .filter(|&b| builder.deg_of[b] == target_degree)
        .collect();
    if candidates.is_empty() {
        // Above the top nonzero layer; maximality forces the action to vanish.
        if action_cols.iter().all(|c| svec_is_zero(c)) {
            return Ok(Vec::new());
        }
        return Err(Error::Unsupported(
            "nonzero commutator above the computed top layer".into(),
        ));
    }
    // Flatten the action into one long vector and solve against the
    // candidate basis actions.
    let flatten = |cols: &[SVec]| -> SVec { cols.iter().flat_map(|c| c.iter().cloned()).collect() };
    let rhs = flatten(&action_cols);
    let basis_actions: Vec<SVec> = candidates
        .iter()
        .map(|&b| {
            let cols: Vec<SVec> = (0..n)
                .map(|a| {
                    let mut dense = svec_zero(p_dim);
                    for (t, c) in builder.action_on_base(g, b, a) {
                        dense[t] = c;
                    }
                    dense
                })
                .collect();
            flatten(&cols)
        })
        .collect();
    let a = Mat::from_fn(rhs.len(), candidates.len(), |r, c| {
        basis_actions[c][r].clone()
    });
    match solve_affine(&a, &rhs)? {
        SolveOutcome::Solution { particular, .. } => Ok(particular
            .into_iter()
            .zip(candidates)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, b)| (b, c))
            .collect()),
        SolveOutcome::Infeasible => Err(Error::Unsupported(
            "commutator action is not in the computed layer".into(),
        )),
    }
}

/// Semidirect product `g x h` with `h` a derivation space in degree zero.
pub fn semidirect(g: &GradedLieAlgebra, h: &DerivationSpace) -> Result<ProlongedAlgebra> {
    let n = g.dim();
    let mut labels: Vec<String> = g.labels().to_vec();
    let mut degrees: Vec<i64> = g.degrees().ok_or(Error::MissingDegrees)?.to_vec();
    let mut per = 0usize;
    for _ in 0..h.dim() {
        per += 1;
        labels.push(format!("q0_{per}"));
        degrees.push(0);
    }
    let mut brackets: Vec<((usize, usize), SparseVec)> =
        g.bracket_entries().map(|(&k, v)| (k, v.clone())).collect();
    for (b, mat) in h.basis().iter().enumerate() {
        for a in 0..n {
            let col = sparse_of_col(mat, a);
            if !col.is_empty() {
                brackets.push(((a, n + b), col.iter().map(|(t, c)| (*t, -c)).collect()));
            }
        }
    }
    for (&(i, j), coords) in h.closure_constants() {
        let sparse: SparseVec = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (n + t, c.clone()))
            .collect();
        if !sparse.is_empty() {
            brackets.push(((n + i, n + j), sparse));
        }
    }
    let mut layer_dims: Vec<(i64, usize)> = Vec::new();
    let min = *degrees.iter().min().unwrap();
    for d in min..=0 {
        layer_dims.push((d, degrees.iter().filter(|&&x| x == d).count()));
    }
    let algebra = GradedLieAlgebra::new(labels, Some(degrees), brackets, g.domain())?;
    Ok(ProlongedAlgebra {
        algebra,
        g_dim: n,
        layer_dims,
        rigid: true,
    })
}

/// The maximal subspace of `sub` that is an ideal of `p`, by iterated
/// refinement until stabilization.
pub fn largest_ideal_in(p: &ProlongedAlgebra, sub: &Subspace) -> Result<Subspace> {
    let alg = p.algebra();
    let n = alg.dim();
    if sub.ambient() != n {
        return Err(Error::AmbientMismatch(sub.ambient(), n));
    }
    let mut current = sub.clone();
    loop {
        if current.dim() == 0 {
            return Ok(current);
        }
        // v in current with [e_b, v] in current for every basis vector e_b.
        let basis_mat = current.basis_matrix();
        let d = current.dim();
        // Membership functionals: rows spanning the annihilator of `current`.
        let ann = basis_mat.nullspace();
        let mut rows: Vec<SVec> = Vec::new();
        for b in 0..n {
            let ad_b = alg.ad_basis(b);
            for phi in ann.basis() {
                // phi^T (ad_b (B^T c)) = 0, unknowns c.
                let mut row = svec_zero(d);
                for (c_idx, basis_vec) in current.basis().iter().enumerate() {
                    let image = ad_b.mul_vec(basis_vec)?;
                    let mut acc = Scalar::zero();
                    for t in 0..n {
                        if !phi[t].is_zero() && !image[t].is_zero() {
                            acc = &acc + &(&phi[t] * &image[t]);
                        }
                    }
                    row[c_idx] = acc;
                }
                if !svec_is_zero(&row) {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return Ok(current);
        }
        let system = Mat::from_rows(rows);
        let kernel = system.nullspace();
        let next_vectors: Vec<SVec> = kernel
            .basis()
            .iter()
            .map(|c| {
                let mut v = svec_zero(n);
                for (c_idx, basis_vec) in current.basis().iter().enumerate() {
                    if !c[c_idx].is_zero() {
                        for t in 0..n {
                            v[t] = &v[t] + &(&c[c_idx] * &basis_vec[t]);
                        }
                    }
                }
                v
            })
            .collect();
        let next = Subspace::from_vectors(n, next_vectors);
        if next == current {
            return Ok(current);
        }
        current = next;
    }
}

/// All derivations of `p` preserving `q` and `g_{-1} + q`; when `p` is the
/// full prolongation of a rigid algebra this coincides with `ad(q)`.
pub fn aut_pg_algebra(p: &ProlongedAlgebra) -> Result<DerivationSpace> {
    let alg = p.algebra();
    let n = alg.dim();
    let q_start = p.g_dim();
    let first: Vec<usize> = alg
        .degrees()
        .map(|d| (0..q_start).filter(|&i| d[i] == -1).collect::<Vec<usize>>())
        .ok_or(Error::MissingDegrees)?;
    let idx = |pp: usize, q: usize| pp * n + q;
    let mut rows: Vec<SVec> = Vec::new();
    // D(q) in q.
    for src in q_start..n {
        for tgt in 0..q_start {
            let mut row = svec_zero(n * n);
            row[idx(tgt, src)] = Scalar::one();
            rows.push(row);
        }
    }
    // D(g_{-1} + q) in g_{-1} + q.
    for &src in &first {
        for tgt in 0..q_start {
            if !first.contains(&tgt) {
                let mut row = svec_zero(n * n);
                row[idx(tgt, src)] = Scalar::one();
                rows.push(row);
            }
        }
    }
    // Leibniz over all basis pairs of p.
    for i in 0..n {
        for j in i + 1..n {
            let target = alg.bracket_basis(i, j);
            for k in 0..n {
                let mut row = svec_zero(n * n);
                for (m, c) in &target {
                    row[idx(k, *m)] = &row[idx(k, *m)] + c;
                }
                for pp in 0..n {
                    for (t, c) in alg.bracket_basis(pp, j) {
                        if t == k {
                            row[idx(pp, i)] = &row[idx(pp, i)] - &c;
                        }
                    }
                    for (t, c) in alg.bracket_basis(i, pp) {
                        if t == k {
                            row[idx(pp, j)] = &row[idx(pp, j)] - &c;
                        }
                    }
                }
                if !svec_is_zero(&row) {
                    rows.push(row);
                }
            }
        }
    }
    let system = if rows.is_empty() {
        Mat::zeros(0, n * n)
    } else {
        Mat::from_rows(rows)
    };
    let basis: Vec<Mat> = system
        .nullspace()
        .basis()
        .iter()
        .map(|v| Mat::from_flat(n, n, v.clone()))
        .collect();
    DerivationSpace::from_matrices(alg, basis)
}

/// Grading automorphism scaling a degree-`i` vector by `lambda^i`.
pub fn dilation(alg: &GradedLieAlgebra, lambda: &Scalar) -> Result<Mat> {
    if lambda.is_zero() {
        return Err(Error::ZeroDilation);
    }
    let degrees = alg.degrees().ok_or(Error::MissingDegrees)?;
    let n = alg.dim();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = lambda.pow(degrees[i])?;
    }
    debug_assert!(alg.is_automorphism(&m).unwrap_or(false));
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{f24, heisenberg};

    #[test]
    fn derivation_dimensions() {
        let der_h = derivation_algebra(&heisenberg()).unwrap();
        assert_eq!(der_h.dim(), 4); // gl(2)
        let der_f = derivation_algebra(&f24()).unwrap();
        assert_eq!(der_f.dim(), 4); // gl(2) again
                                    // Abelian plane in degree -1: Leibniz is vacuous.
        let ab = GradedLieAlgebra::new(
            vec!["e1".into(), "e2".into()],
            Some(vec![-1, -1]),
            vec![],
            crate::scalar::ScalarDomain::Rational,
        )
        .unwrap();
        assert_eq!(derivation_algebra(&ab).unwrap().dim(), 4);
        // Every basis element preserves all layers.
        for u in der_f.basis() {
            for j in 1..=4i64 {
                for idx in der_f.algebra().layer_indices(-j) {
                    let img = u.mul_vec(&unit(8, idx)).unwrap();
                    assert!(der_f.algebra().layer(-j).contains_vec(&img));
                }
            }
        }
    }

    #[test]
    fn heisenberg_diagonal_prolongation_is_sl3_shaped() {
        let h = heisenberg();
        let g0 = G0Spec::Diagonal.resolve(&h).unwrap();
        assert_eq!(g0.dim(), 2);
        let p = tanaka_prolong(&h, &g0, 4).unwrap();
        assert!(p.rigid());
        assert_eq!(p.dim(), 8);
        let dims: Vec<usize> = p.layer_dims().iter().map(|&(_, d)| d).collect();
        assert_eq!(dims, vec![1, 2, 2, 2, 1, 0]);
        assert!(p.algebra().check_axioms().is_empty());
        // Killing form nondegenerate: evidence for sl(3).
        assert!(!p.algebra().killing_form().det().is_zero());
    }

    #[test]
    fn f24_full_prolongation_is_rigid_at_one() {
        let f = f24();
        let g0 = G0Spec::Full.resolve(&f).unwrap();
        let p = tanaka_prolong(&f, &g0, 3).unwrap();
        assert!(p.rigid());
        assert_eq!(p.dim(), 12);
        assert_eq!(
            p.layer_dims(),
            &[(-4, 3), (-3, 2), (-2, 1), (-1, 2), (0, 4), (1, 0)]
        );
        assert!(p.algebra().check_axioms().is_empty());
        // The negative part reproduces the input exactly.
        assert_eq!(p.base(), f);
    }

    #[test]
    fn heisenberg_full_prolongation_grows() {
        let h = heisenberg();
        let g0 = G0Spec::Full.resolve(&h).unwrap();
        let p = tanaka_prolong(&h, &g0, 3).unwrap();
        assert!(!p.rigid());
        for &(d, dim) in p.layer_dims() {
            assert!(dim > 0, "layer {d} unexpectedly zero");
        }
        // The returned algebra keeps only g + g0 but is a genuine algebra.
        assert_eq!(p.dim(), 7);
        assert!(p.algebra().check_axioms().is_empty());
    }

    #[test]
    fn semidirect_with_grading_derivation() {
        let h = heisenberg();
        let d = G0Spec::Grading.resolve(&h).unwrap();
        let p = semidirect(&h, &d).unwrap();
        assert_eq!(p.dim(), 4);
        assert!(p.algebra().check_axioms().is_empty());
        // [(0,1),(e1,0)] = (e1,0); [(0,1),(e3,0)] = (2 e3,0).
        let n = 4;
        let dvec = unit(n, 3);
        let e1 = unit(n, 0);
        let e3 = unit(n, 2);
        assert_eq!(p.algebra().bracket(&dvec, &e1).unwrap(), e1);
        let twice_e3: Vec<Scalar> = e3.iter().map(|c| c * &Scalar::from_int(2)).collect();
        assert_eq!(p.algebra().bracket(&dvec, &e3).unwrap(), twice_e3);
    }

    #[test]
    fn semidirect_matches_prolongation_through_degree_zero() {
        let f = f24();
        let g0 = G0Spec::Full.resolve(&f).unwrap();
        let via_prolong = tanaka_prolong(&f, &g0, 1).unwrap();
        let via_semidirect = semidirect(&f, &g0).unwrap();
        assert_eq!(via_prolong.dim(), via_semidirect.dim());
        for i in 0..12 {
            for j in i + 1..12 {
                assert_eq!(
                    via_prolong.algebra().bracket_basis(i, j),
                    via_semidirect.algebra().bracket_basis(i, j),
                    "tensors differ at ({i}, {j})"
                );
            }
        }
        // h = 0 leaves g unchanged.
        let h0 = DerivationSpace::from_matrices(&f, vec![]).unwrap();
        let trivial = semidirect(&f, &h0).unwrap();
        assert_eq!(trivial.dim(), 8);
        assert_eq!(trivial.base(), f);
    }

    #[test]
    fn largest_ideal_cases() {
        // sl(3)-shaped prolongation: the largest ideal inside q is zero.
        let h = heisenberg();
        let g0 = G0Spec::Diagonal.resolve(&h).unwrap();
        let p = tanaka_prolong(&h, &g0, 4).unwrap();
        assert_eq!(largest_ideal_in(&p, &p.q_subspace()).unwrap().dim(), 0);

        // Abelian p: everything is an ideal.
        let ab = GradedLieAlgebra::new(
            vec!["e1".into(), "e2".into()],
            Some(vec![-1, -1]),
            vec![],
            crate::scalar::ScalarDomain::Rational,
        )
        .unwrap();
        let h0 = DerivationSpace::from_matrices(&ab, vec![]).unwrap();
        let pa = semidirect(&ab, &h0).unwrap();
        let sub = Subspace::from_vectors(2, vec![vec![Scalar::one(), Scalar::from_int(5)]]);
        assert_eq!(largest_ideal_in(&pa, &sub).unwrap(), sub);

        // Heisenberg, sub = center: the center is an ideal.
        let hh = DerivationSpace::from_matrices(&h, vec![]).unwrap();
        let ph = semidirect(&h, &hh).unwrap();
        let center = Subspace::from_vectors(3, vec![unit(3, 2)]);
        assert_eq!(largest_ideal_in(&ph, &center).unwrap(), center);
    }

    #[test]
    fn aut_pg_of_f24_prolongation_equals_ad_q() {
        let f = f24();
        let g0 = G0Spec::Full.resolve(&f).unwrap();
        let p = tanaka_prolong(&f, &g0, 1).unwrap();
        let aut = aut_pg_algebra(&p).unwrap();
        assert_eq!(aut.dim(), 4);
        assert_eq!(aut.matrix_span(), p.ad_q_span());
        // ad_X for X in q is always contained in the result.
        for i in p.q_indices() {
            let ad = p.algebra().ad_basis(i);
            assert!(aut.coordinates_of(&ad).is_some());
        }
        // Containment also holds for a prolongation through a smaller g0.
        let h = heisenberg();
        let diag = G0Spec::Diagonal.resolve(&h).unwrap();
        let ps = tanaka_prolong(&h, &diag, 4).unwrap();
        let auts = aut_pg_algebra(&ps).unwrap();
        assert!(auts.matrix_span().contains(&ps.ad_q_span()).unwrap());
    }

    #[test]
    fn explicit_g0_lists_are_validated() {
        let h = heisenberg();
        // Fails Leibniz: e3 -> e1 with everything else zero.
        let mut bad = Mat::zeros(3, 3);
        bad[(0, 2)] = Scalar::one();
        assert!(matches!(
            DerivationSpace::from_matrices(&h, vec![bad]),
            Err(Error::NotDerivation(0))
        ));
        // A derivation that does not preserve the first layer (e1 -> e3) is
        // rejected by the g0 resolver.
        let mut shift = Mat::zeros(3, 3);
        shift[(2, 0)] = Scalar::one();
        assert!(h.is_derivation(&shift).unwrap());
        assert!(matches!(
            G0Spec::Matrices(vec![shift]).resolve(&h),
            Err(Error::NotDerivation(0))
        ));
        // Derivations whose span is not closed under commutator: pick two
        // elements of gl(2) generating a third direction.
        let full = derivation_algebra(&h).unwrap();
        let e12 = full
            .coordinates_for_first_layer_block(&Mat::from_fn(2, 2, |i, j| {
                if (i, j) == (0, 1) {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }))
            .unwrap();
        let e21 = full
            .coordinates_for_first_layer_block(&Mat::from_fn(2, 2, |i, j| {
                if (i, j) == (1, 0) {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }))
            .unwrap();
        let pair = vec![full.combination(&e12), full.combination(&e21)];
        assert!(matches!(
            DerivationSpace::from_matrices(&h, pair),
            Err(Error::NotClosed)
        ));
    }

    #[test]
    fn contact_prolongation_layer_growth() {
        // Full prolongation of the Heisenberg algebra: the layer at degree k
        // matches the weighted polynomial count #{a+b+2c = k+2} of the
        // contact algebra (weights 1, 1, 2), so 4, 6, 9, 12 from degree 0 on.
        let h = heisenberg();
        let g0 = G0Spec::Full.resolve(&h).unwrap();
        let p = tanaka_prolong(&h, &g0, 3).unwrap();
        assert_eq!(
            p.layer_dims(),
            &[(-2, 1), (-1, 2), (0, 4), (1, 6), (2, 9), (3, 12)]
        );
    }

    #[test]
    fn larger_caps_do_not_change_computed_layers() {
        let h = heisenberg();
        let g0 = G0Spec::Full.resolve(&h).unwrap();
        let short = tanaka_prolong(&h, &g0, 2).unwrap();
        let long = tanaka_prolong(&h, &g0, 4).unwrap();
        assert_eq!(
            short.layer_dims(),
            &long.layer_dims()[..short.layer_dims().len()]
        );
    }

    #[test]
    fn positive_layers_act_faithfully() {
        let h = heisenberg();
        let g0 = G0Spec::Diagonal.resolve(&h).unwrap();
        let p = tanaka_prolong(&h, &g0, 4).unwrap();
        // No nonzero element of any nonnegative layer kills the first layer.
        let alg = p.algebra();
        let first = alg.layer_indices(-1);
        for b in p.q_indices() {
            let ad = alg.ad_basis(b);
            let nonzero_on_first = first
                .iter()
                .any(|&a| !crate::linalg::svec_is_zero(&ad.col(a)));
            assert!(nonzero_on_first, "basis {b} acts trivially on g_-1");
        }
    }

    #[test]
    fn dilation_values() {
        let h = heisenberg();
        let lam = Scalar::from_int(2);
        let d = dilation(&h, &lam).unwrap();
        assert_eq!(d[(2, 2)], Scalar::ratio(1, 4));
        assert_eq!(dilation(&h, &Scalar::one()).unwrap(), Mat::identity(3));
        assert!(dilation(&h, &Scalar::zero()).is_err());
        // Automorphism check on f24 at lambda = 3.
        let f = f24();
        let d3 = dilation(&f, &Scalar::from_int(3)).unwrap();
        assert!(f.is_automorphism(&d3).unwrap());
    }
}
