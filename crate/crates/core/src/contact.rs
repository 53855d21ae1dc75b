//! Exact Baker-Campbell-Hausdorff machinery and the polynomial development
//! ODE whose solution gives contact maps in exponential coordinates.
//!
//! Everything here is exact: the Dynkin series truncates at the nilpotency
//! step (terms beyond it are provably zero), the left-translation
//! differential uses Bernoulli numbers with the B1 = +1/2 convention to match
//! the expansion `v + [g,v]/2 + [g,[g,v]]/12 + ...`, and the development ODE
//! integrates layer by layer in closed polynomial form.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::GradedLieAlgebra;
use crate::linalg::Mat;
use crate::modification::bracket_poly;
use crate::poly::{MultiPoly, PolyRing};
use crate::scalar::Scalar;

/// Vector with one polynomial per algebra coordinate.
pub type PolyVector = Vec<MultiPoly>;

/// Square matrix of polynomials acting on algebra coordinates.
pub type PolyMat = Vec<Vec<MultiPoly>>;

/// Bernoulli numbers with the plus convention (`B1 = +1/2`), exact.
pub fn bernoulli_plus(count: usize) -> Vec<Scalar> {
    // Standard recurrence for the minus convention, then flip B1.
    let mut b: Vec<Scalar> = Vec::with_capacity(count);
    for n in 0..count {
        if n == 0 {
            b.push(Scalar::one());
            continue;
        }
        let mut acc = Scalar::zero();
        for (k, bk) in b.iter().enumerate() {
            acc = &acc + &(&binomial(n + 1, k) * bk);
        }
        let denom = Scalar::from_int((n + 1) as i64);
        b.push(-&acc.checked_div(&denom).expect("n+1 nonzero"));
    }
    if count > 1 {
        b[1] = Scalar::ratio(1, 2);
    }
    b
}

fn binomial(n: usize, k: usize) -> Scalar {
    let mut num = Scalar::one();
    for i in 0..k {
        num = &num * &Scalar::from_int((n - i) as i64);
        num = num
            .checked_div(&Scalar::from_int((i + 1) as i64))
            .expect("nonzero");
    }
    num
}

fn require_nilpotent(alg: &GradedLieAlgebra) -> Result<usize> {
    alg.nilpotency_step()
        .ok_or_else(|| Error::NotNilpotent("the lower central series does not reach zero".into()))
}

/// Exact `log(exp x . exp y)` by the Dynkin series truncated at the
/// nilpotency step: the truncation is exact, not approximate.
pub fn bch(alg: &GradedLieAlgebra, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
    let step = require_nilpotent(alg)?;
    let n = alg.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "algebra has dimension {n}"
        )));
    }
    let mut acc = vec![Scalar::zero(); n];
    // Blocks (p_i, q_i) of x- and y-powers; each nonempty, total length
    // bounded by the step.
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    dynkin_sum(alg, x, y, step, &mut blocks, &mut acc)?;
    Ok(acc)
}

fn dynkin_sum(
    alg: &GradedLieAlgebra,
    x: &[Scalar],
    y: &[Scalar],
    remaining: usize,
    blocks: &mut Vec<(usize, usize)>,
    acc: &mut [Scalar],
) -> Result<()> {
    if !blocks.is_empty() {
        let term = dynkin_term(alg, x, y, blocks)?;
        for (a, t) in acc.iter_mut().zip(term) {
            *a = &*a + &t;
        }
    }
    if remaining == 0 {
        return Ok(());
    }
    for p in 0..=remaining {
        for q in 0..=(remaining - p) {
            if p + q == 0 {
                continue;
            }
            blocks.push((p, q));
            dynkin_sum(alg, x, y, remaining - p - q, blocks, acc)?;
            blocks.pop();
        }
    }
    Ok(())
}

/// One Dynkin term: the right-nested bracket of the word
/// `x^{p1} y^{q1} ... x^{pn} y^{qn}` scaled by
/// `(-1)^{n-1} / (n * m * prod p_i! q_i!)` with `m` the word length.
fn dynkin_term(
    alg: &GradedLieAlgebra,
    x: &[Scalar],
    y: &[Scalar],
    blocks: &[(usize, usize)],
) -> Result<Vec<Scalar>> {
    let mut word: Vec<&[Scalar]> = Vec::new();
    for &(p, q) in blocks {
        for _ in 0..p {
            word.push(x);
        }
        for _ in 0..q {
            word.push(y);
        }
    }
    let mut value = word.last().unwrap().to_vec();
    for letter in word.iter().rev().skip(1) {
        value = alg.bracket(letter, &value)?;
    }
    let n_blocks = blocks.len();
    let m = word.len();
    let mut denom = Scalar::from_int((n_blocks * m) as i64);
    for &(p, q) in blocks {
        denom = &denom * &factorial(p);
        denom = &denom * &factorial(q);
    }
    let mut coeff = denom.inv()?;
    if n_blocks % 2 == 0 {
        coeff = -&coeff;
    }
    Ok(value.iter().map(|c| c * &coeff).collect())
}

fn factorial(n: usize) -> Scalar {
    let mut f = Scalar::one();
    for i in 2..=n {
        f = &f * &Scalar::from_int(i as i64);
    }
    f
}

/// Differential of left translation in exponential coordinates:
/// `dL_g(v) = sum_n (B_n^+ / n!) ad_g^n(v)`, exact at the nilpotency step.
pub fn left_translation_differential(
    alg: &GradedLieAlgebra,
    gamma: &PolyVector,
    v: &PolyVector,
) -> Result<PolyVector> {
    let step = require_nilpotent(alg)?;
    let bern = bernoulli_plus(step);
    let mut acc: PolyVector = v.iter().map(|p| p.scale(&bern[0])).collect();
    let mut power = v.clone();
    for (n, b) in bern.iter().enumerate().skip(1) {
        power = bracket_poly(alg, gamma, &power)?;
        if power.iter().all(MultiPoly::is_zero) {
            break;
        }
        let coeff = b.checked_div(&factorial(n)).expect("factorial nonzero");
        if coeff.is_zero() {
            continue;
        }
        for (a, p) in acc.iter_mut().zip(&power) {
            *a = &*a + &p.scale(&coeff);
        }
    }
    Ok(acc)
}

/// Variable ring `t, x1..xn` for development computations.
pub fn development_ring(n: usize) -> Arc<PolyRing> {
    let mut vars = vec!["t".to_string()];
    vars.extend((1..=n).map(|i| format!("x{i}")));
    PolyRing::new(vars)
}

/// Ring with additional formal solution variables `g1..gn`, used to display
/// the assembled right-hand side of the development ODE.
pub fn development_ring_with_gamma(n: usize) -> Arc<PolyRing> {
    let mut vars = vec!["t".to_string()];
    vars.extend((1..=n).map(|i| format!("x{i}")));
    vars.extend((1..=n).map(|i| format!("g{i}")));
    PolyRing::new(vars)
}

/// The derivation matrix scaled by a polynomial, as a polynomial matrix.
pub fn scaled_action(u: &Mat, scale: &MultiPoly) -> PolyMat {
    (0..u.rows())
        .map(|i| (0..u.cols()).map(|j| scale.scale(&u[(i, j)])).collect())
        .collect()
}

fn poly_mat_mul_vec(m: &PolyMat, v: &PolyVector) -> PolyVector {
    m.iter()
        .map(|row| {
            let mut acc = MultiPoly::zero(v[0].ring());
            for (e, x) in row.iter().zip(v) {
                if !e.is_zero() && !x.is_zero() {
                    acc = &acc + &(e * x);
                }
            }
            acc
        })
        .collect()
}

/// `exp(action)(w)` for a nilpotent polynomial matrix, exact.
pub fn poly_exp_apply(action: &PolyMat, w: &PolyVector) -> Result<PolyVector> {
    let n = w.len();
    let mut acc = w.clone();
    let mut power = w.clone();
    for k in 1..=n + 1 {
        power = poly_mat_mul_vec(action, &power);
        if power.iter().all(MultiPoly::is_zero) {
            return Ok(acc);
        }
        if k == n + 1 {
            return Err(Error::NotNilpotent(
                "action matrix is not nilpotent; exact exponential refused".into(),
            ));
        }
        let coeff = factorial(k).inv()?;
        for (a, p) in acc.iter_mut().zip(&power) {
            *a = &*a + &p.scale(&coeff);
        }
    }
    Ok(acc)
}

/// Twisted velocity `v(t) = exp(action)(sum_i x_i e_i)` with symbolic
/// coordinates; the action entries already carry their `t` dependence.
pub fn twisted_velocity(
    alg: &GradedLieAlgebra,
    ring: &Arc<PolyRing>,
    action: &PolyMat,
) -> Result<PolyVector> {
    let n = alg.dim();
    if action.len() != n || action.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("action must be {n}x{n}")));
    }
    let w: PolyVector = (1..=n)
        .map(|i| MultiPoly::var(ring, &format!("x{i}")))
        .collect::<Result<_>>()?;
    poly_exp_apply(action, &w)
}

/// Integrates the development ODE `gamma' = dL_gamma(v(t))`, `gamma(0) = 0`,
/// layer by layer; the returned polynomials satisfy the ODE exactly.
pub fn integrate_development(
    alg: &GradedLieAlgebra,
    ring: &Arc<PolyRing>,
    action: &PolyMat,
) -> Result<PolyVector> {
    let (stratified, step) = alg.is_stratified()?;
    if !stratified {
        return Err(Error::NotStratified(
            "development integration proceeds layer by layer".into(),
        ));
    }
    let v = twisted_velocity(alg, ring, action)?;
    let n = alg.dim();
    let mut gamma: PolyVector = vec![MultiPoly::zero(ring); n];
    for depth in 1..=step as i64 {
        let rhs = left_translation_differential(alg, &gamma, &v)?;
        for idx in alg.layer_indices(-depth) {
            gamma[idx] = rhs[idx].integrate("t")?;
        }
    }
    // Exact residual check: d(gamma)/dt - dL_gamma(v) = 0.
    let rhs = left_translation_differential(alg, &gamma, &v)?;
    for (g, r) in gamma.iter().zip(&rhs) {
        let residual = &g.differentiate("t")? - r;
        if !residual.is_zero() {
            return Err(Error::Unsupported(
                "development residual is nonzero; input is not layer-triangular".into(),
            ));
        }
    }
    Ok(gamma)
}

/// The assembled right-hand side of the development ODE with the solution
/// coordinates left as formal variables `g1..gn`.
pub fn development_rhs_symbolic(
    alg: &GradedLieAlgebra,
    action_builder: impl Fn(&Arc<PolyRing>) -> PolyMat,
) -> Result<PolyVector> {
    let n = alg.dim();
    let ring = development_ring_with_gamma(n);
    let action = action_builder(&ring);
    let v = twisted_velocity(alg, &ring, &action)?;
    let gamma: PolyVector = (1..=n)
        .map(|i| MultiPoly::var(&ring, &format!("g{i}")))
        .collect::<Result<_>>()?;
    left_translation_differential(alg, &gamma, &v)
}

/// `gamma(1)`: the coordinate form of the contact map.
pub fn psi(alg: &GradedLieAlgebra, ring: &Arc<PolyRing>, action: &PolyMat) -> Result<PolyVector> {
    let gamma = integrate_development(alg, ring, action)?;
    let mut at_one = BTreeMap::new();
    at_one.insert("t".to_string(), MultiPoly::one(ring));
    gamma.iter().map(|g| g.substitute(&at_one)).collect()
}

/// Evaluates a polynomial vector at scalar coordinates (t bound to 1 if
/// present in the polynomials).
pub fn eval_poly_vector(v: &PolyVector, xs: &[Scalar]) -> Result<Vec<Scalar>> {
    let mut bindings: BTreeMap<String, Scalar> = BTreeMap::new();
    bindings.insert("t".to_string(), Scalar::one());
    for (i, x) in xs.iter().enumerate() {
        bindings.insert(format!("x{}", i + 1), x.clone());
    }
    v.iter().map(|p| p.eval(&bindings)).collect()
}

/// Checks that the Jacobian of `psi` with respect to `x1..xn` is
/// block-lower-triangular by layer with every diagonal block of exact
/// determinant one.
pub fn psi_jacobian_is_unit(alg: &GradedLieAlgebra, map: &PolyVector) -> Result<bool> {
    let n = alg.dim();
    let degrees = alg.degrees().ok_or(Error::MissingDegrees)?;
    let mut jac: Vec<Vec<MultiPoly>> = Vec::with_capacity(n);
    for row in map {
        jac.push(
            (1..=n)
                .map(|j| row.differentiate(&format!("x{j}")))
                .collect::<Result<_>>()?,
        );
    }
    // Entries where the source layer is strictly deeper must vanish.
    for i in 0..n {
        for j in 0..n {
            if degrees[j] < degrees[i] && !jac[i][j].is_zero() {
                return Ok(false);
            }
        }
    }
    // Diagonal blocks per layer must have determinant one.
    let mut layers: Vec<i64> = degrees.to_vec();
    layers.sort_unstable();
    layers.dedup();
    for d in layers {
        let idx = alg.layer_indices(d);
        let det = poly_det(&jac, &idx);
        let ring = map[0].ring();
        if det != MultiPoly::one(ring) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Laplace-expansion determinant of a submatrix of polynomials.
fn poly_det(m: &[Vec<MultiPoly>], idx: &[usize]) -> MultiPoly {
    poly_det_rect(m, idx, idx)
}

fn poly_det_rect(m: &[Vec<MultiPoly>], rows: &[usize], cols: &[usize]) -> MultiPoly {
    let ring = m[0][0].ring();
    debug_assert_eq!(rows.len(), cols.len());
    match rows.len() {
        0 => MultiPoly::one(ring),
        1 => m[rows[0]][cols[0]].clone(),
        _ => {
            let mut acc = MultiPoly::zero(ring);
            for (k, &col) in cols.iter().enumerate() {
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&c| c != col).collect();
                let sub = poly_det_rect(m, &rows[1..], &sub_cols);
                let signed = if k % 2 == 0 {
                    m[rows[0]][col].clone()
                } else {
                    -&m[rows[0]][col]
                };
                acc = &acc + &(&signed * &sub);
            }
            acc
        }
    }
}
