//! Deterministic generation of random stratified algebras, used to exercise
//! the modification criteria over a spread of examples.
//!
//! Random quotients of the bundled free nilpotent algebras by saturated
//! graded ideals: quotienting a stratified algebra by a graded ideal inside
//! the layers below the first stays stratified (layers may vanish only from
//! the bottom up), and Jacobi holds automatically in the quotient.

use crate::catalog;
use crate::error::Result;
use crate::lie::{unit, GradedLieAlgebra, SparseVec};
use crate::linalg::{svec_is_zero, svec_zero, SVec, Subspace};
use crate::scalar::Scalar;

/// SplitMix64: small, deterministic, good enough for test-data generation.
#[derive(Debug, Clone)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Small random rational with numerator in `-max..=max` and denominator
    /// in `1..=den`.
    pub fn rational(&mut self, max: i64, den: i64) -> Scalar {
        let n = self.int_in(-max, max);
        let d = self.int_in(1, den);
        Scalar::ratio(n, d)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[(self.next_u64() % items.len() as u64) as usize]
    }
}

/// Quotient by the graded ideal generated by homogeneous seed vectors
/// supported in layers below the first.
pub fn graded_quotient(g: &GradedLieAlgebra, seeds: Vec<SVec>) -> Result<GradedLieAlgebra> {
    let n = g.dim();
    let mut ideal = Subspace::from_vectors(n, seeds);
    loop {
        let grown = ideal.sum(&g.bracket_subspaces(&Subspace::full(n), &ideal)?)?;
        if grown == ideal {
            break;
        }
        ideal = grown;
    }
    // Kept coordinates: non-pivot columns of the ideal's echelon basis.
    let mut killed = vec![false; n];
    for row in ideal.basis() {
        let lead = row.iter().position(|c| !c.is_zero()).unwrap();
        killed[lead] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !killed[i]).collect();
    let reduce = |v: &[Scalar]| -> SVec {
        let mut r = v.to_vec();
        for row in ideal.basis() {
            let lead = row.iter().position(|c| !c.is_zero()).unwrap();
            if !r[lead].is_zero() {
                let factor = r[lead].clone();
                for (x, b) in r.iter_mut().zip(row) {
                    *x = &*x - &(&factor * b);
                }
            }
        }
        r
    };
    let degrees = g.degrees().expect("stratified input").to_vec();
    let labels: Vec<String> = kept.iter().map(|&i| g.labels()[i].clone()).collect();
    let new_degrees: Vec<i64> = kept.iter().map(|&i| degrees[i]).collect();
    let mut brackets: Vec<((usize, usize), SparseVec)> = Vec::new();
    for (a, &i) in kept.iter().enumerate() {
        for (b, &j) in kept.iter().enumerate().skip(a + 1) {
            let w = reduce(&g.bracket(&unit(n, i), &unit(n, j))?);
            let mut sparse: SparseVec = Vec::new();
            for (c, &k) in kept.iter().enumerate() {
                if !w[k].is_zero() {
                    sparse.push((c, w[k].clone()));
                }
            }
            // Everything outside the kept coordinates must have reduced away.
            debug_assert!({
                let mut residue = w.clone();
                for &k in &kept {
                    residue[k] = Scalar::zero();
                }
                svec_is_zero(&residue)
            });
            if !sparse.is_empty() {
                brackets.push(((a, b), sparse));
            }
        }
    }
    GradedLieAlgebra::new(labels, Some(new_degrees), brackets, g.domain())
}

/// A random stratified algebra with the requested dimension bound, built as
/// a quotient of one of the bundled free nilpotent algebras.
pub fn random_stratified(rng: &mut Rng64, max_dim: usize) -> GradedLieAlgebra {
    loop {
        let base = match rng.int_in(0, 3) {
            0 => catalog::heisenberg(),
            1 => catalog::f32(),
            _ => catalog::f24(),
        };
        let n = base.dim();
        let mut seeds: Vec<SVec> = Vec::new();
        let attempts = rng.int_in(0, 3);
        for _ in 0..attempts {
            // A random homogeneous vector in a random layer below the first.
            let degrees = base.degrees().unwrap();
            let min = *degrees.iter().min().unwrap();
            if min == -1 {
                break;
            }
            let layer = rng.int_in(min, -2);
            let idx = base.layer_indices(layer);
            let mut v = svec_zero(n);
            for &i in &idx {
                v[i] = Scalar::from_int(rng.int_in(-2, 2));
            }
            if !svec_is_zero(&v) {
                seeds.push(v);
            }
        }
        let Ok(q) = graded_quotient(&base, seeds) else {
            continue;
        };
        if q.dim() == 0 || q.dim() > max_dim {
            continue;
        }
        match q.is_stratified() {
            Ok((true, _)) => return q,
            _ => continue,
        }
    }
}

/// A random functional on the algebra with entries from small rationals;
/// `deep_support` controls whether layers below the first may be hit.
pub fn random_functional(rng: &mut Rng64, g: &GradedLieAlgebra, deep_support: bool) -> SVec {
    let degrees = g.degrees().expect("graded algebra");
    (0..g.dim())
        .map(|i| {
            if !deep_support && degrees[i] < -1 {
                Scalar::zero()
            } else {
                rng.rational(3, 3)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotients_are_stratified_and_consistent() {
        let mut rng = Rng64::new(7);
        for _ in 0..25 {
            let g = random_stratified(&mut rng, 6);
            assert!(g.dim() <= 6);
            assert!(g.check_axioms().is_empty());
            let (ok, step) = g.is_stratified().unwrap();
            assert!(ok);
            assert!(step <= 4);
        }
    }

    #[test]
    fn nilpotent_quotients_have_zero_killing_form() {
        let mut rng = Rng64::new(11);
        for _ in 0..10 {
            let g = random_stratified(&mut rng, 6);
            assert!(g.is_nilpotent());
            assert!(g.killing_form().is_zero());
        }
    }

    #[test]
    fn killing_a_layer_kills_everything_below() {
        let f = catalog::f24();
        // Kill the whole -3 layer: the -4 layer must die with it.
        let seeds = vec![unit(8, 3), unit(8, 4)];
        let q = graded_quotient(&f, seeds).unwrap();
        assert_eq!(q.dim(), 3);
        assert_eq!(q.is_stratified().unwrap(), (true, 2));
    }
}
