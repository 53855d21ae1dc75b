//! Classification of three-dimensional polarized Lie algebras.
//!
//! Input: a 3-dimensional algebra with a bracket-generating plane. The
//! decision procedure splits on solvable vs simple (derived series vs
//! nondegenerate Killing form), normalizes solvable algebras to the bracket
//! form `[f1,f2]=f3, [f2,f3]=0, [f1,f3]=alpha f2 + beta f3`, and separates
//! the simple cases by definiteness of the Killing form and by the sign of
//! `det(ad_{[f1,f2]}|_plane)`, which is invariant under the allowed basis
//! changes (rescaling multiplies it by a positive square).

use std::fmt;

use crate::error::{Error, Result};
use crate::lie::GradedLieAlgebra;
use crate::linalg::{svec_is_zero, Mat, SVec, Subspace};
use crate::modification::bracket_generates;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeDLabel {
    A1,
    A2,
    A3,
    A4,
    B,
    C,
    D,
}

impl fmt::Display for ThreeDLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ThreeDLabel::A1 => "A1",
            ThreeDLabel::A2 => "A2",
            ThreeDLabel::A3 => "A3",
            ThreeDLabel::A4 => "A4",
            ThreeDLabel::B => "B",
            ThreeDLabel::C => "C",
            ThreeDLabel::D => "D",
        };
        write!(f, "{s}")
    }
}

/// Outcome of [`classify_3d`]: the case label, the basis-independent
/// parameter for case A4, and the basis achieving the decision form
/// (columns are `f1, f2, f3` in input coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeDClass {
    pub label: ThreeDLabel,
    pub alpha: Option<Scalar>,
    pub basis: Mat,
}

/// Decides which of the seven cases a polarized 3-dimensional algebra falls
/// into. The polarization must be a bracket-generating plane.
pub fn classify_3d(alg: &GradedLieAlgebra, polarization: &Subspace) -> Result<ThreeDClass> {
    if alg.dim() != 3 {
        return Err(Error::DimensionMismatch(
            "classification requires dimension 3".into(),
        ));
    }
    if polarization.ambient() != 3 || polarization.dim() != 2 {
        return Err(Error::NotPolarization(
            "polarization must be a plane in dimension 3".into(),
        ));
    }
    if !bracket_generates(alg, polarization)? {
        return Err(Error::NotPolarization(
            "polarization does not bracket generate".into(),
        ));
    }
    let v1 = polarization.basis()[0].clone();
    let v2 = polarization.basis()[1].clone();
    let w = alg.bracket(&v1, &v2)?;
    if polarization.contains_vec(&w) {
        // Then the plane is a subalgebra and cannot generate.
        return Err(Error::NotPolarization(
            "bracket of the plane lies in the plane".into(),
        ));
    }

    if alg.is_solvable() {
        classify_solvable(alg, &v1, &v2, &w)
    } else {
        classify_simple(alg, &v1, &v2, &w)
    }
}

fn coords_in(f1: &SVec, f2: &SVec, f3: &SVec, v: &SVec) -> Result<SVec> {
    let t = Mat::from_fn(3, 3, |i, j| match j {
        0 => f1[i].clone(),
        1 => f2[i].clone(),
        _ => f3[i].clone(),
    });
    t.inverse()?.mul_vec(v)
}

fn classify_solvable(
    alg: &GradedLieAlgebra,
    v1: &SVec,
    v2: &SVec,
    w: &SVec,
) -> Result<ThreeDClass> {
    // An abelian direction inside the plane: f2 with [f2, w] = 0. For
    // solvable algebras the kernel is nonempty (the derived algebra is
    // abelian and meets the plane).
    let b1 = alg.bracket(v1, w)?;
    let b2 = alg.bracket(v2, w)?;
    let system = Mat::from_fn(
        3,
        2,
        |i, j| if j == 0 { b1[i].clone() } else { b2[i].clone() },
    );
    let kernel = system.nullspace();
    if kernel.dim() == 0 {
        return Err(Error::NotPolarization(
            "solvable algebra with no abelian direction in the plane".into(),
        ));
    }
    let coeffs = &kernel.basis()[0];
    let f2: SVec = (0..3)
        .map(|i| &(&coeffs[0] * &v1[i]) + &(&coeffs[1] * &v2[i]))
        .collect();
    // Deterministic complement inside the plane.
    let span_f2 = Subspace::from_vectors(3, vec![f2.clone()]);
    let f1 = if span_f2.contains_vec(v1) {
        v2.clone()
    } else {
        v1.clone()
    };
    let f3 = alg.bracket(&f1, &f2)?;
    debug_assert!(!svec_is_zero(&f3));
    let c = coords_in(&f1, &f2, &f3, &alg.bracket(&f1, &f3)?)?;
    if !c[0].is_zero() {
        return Err(Error::NotPolarization(
            "unexpected f1 component in [f1, f3]".into(),
        ));
    }
    let (alpha0, beta0) = (c[1].clone(), c[2].clone());
    let basis = |a: &SVec, b: &SVec, cc: &SVec| {
        Mat::from_fn(3, 3, |i, j| match j {
            0 => a[i].clone(),
            1 => b[i].clone(),
            _ => cc[i].clone(),
        })
    };
    if beta0.is_zero() {
        if alpha0.is_zero() {
            return Ok(ThreeDClass {
                label: ThreeDLabel::A1,
                alpha: None,
                basis: basis(&f1, &f2, &f3),
            });
        }
        let label = match alpha0.sign() {
            Some(1) => ThreeDLabel::A2,
            Some(-1) => ThreeDLabel::A3,
            _ => {
                return Err(Error::Unsupported(
                    "classification needs rational structure constants".into(),
                ))
            }
        };
        return Ok(ThreeDClass {
            label,
            alpha: None,
            basis: basis(&f1, &f2, &f3),
        });
    }
    // beta != 0: rescale f1 by 1/beta so the f3 coefficient becomes 1; the
    // invariant parameter is alpha / beta^2.
    let inv = beta0.inv()?;
    let f1n: SVec = f1.iter().map(|x| x * &inv).collect();
    let f3n: SVec = f3.iter().map(|x| x * &inv).collect();
    let alpha = &(&alpha0 * &inv) * &inv;
    Ok(ThreeDClass {
        label: ThreeDLabel::A4,
        alpha: Some(alpha),
        basis: basis(&f1n, &f2, &f3n),
    })
}

fn classify_simple(alg: &GradedLieAlgebra, v1: &SVec, v2: &SVec, w: &SVec) -> Result<ThreeDClass> {
    let killing = alg.killing_form();
    if is_negative_definite(&killing)? {
        return Ok(ThreeDClass {
            label: ThreeDLabel::B,
            alpha: None,
            basis: Mat::from_fn(3, 3, |i, j| match j {
                0 => v1[i].clone(),
                1 => v2[i].clone(),
                _ => w[i].clone(),
            }),
        });
    }
    // ad_{f3} preserves the plane for every algebra in this classification;
    // its determinant's sign separates a reflection from a rotation.
    let a1 = alg.bracket(w, v1)?;
    let a2 = alg.bracket(w, v2)?;
    let c1 = coords_in(v1, v2, w, &a1)?;
    let c2 = coords_in(v1, v2, w, &a2)?;
    if !c1[2].is_zero() || !c2[2].is_zero() {
        return Err(Error::NotPolarization(
            "ad_[f1,f2] does not preserve the plane".into(),
        ));
    }
    let det = &(&c1[0] * &c2[1]) - &(&c1[1] * &c2[0]);
    let label = match det.sign() {
        Some(-1) => ThreeDLabel::C,
        Some(1) => ThreeDLabel::D,
        _ => {
            return Err(Error::NotPolarization(
                "degenerate ad_[f1,f2] on the plane".into(),
            ))
        }
    };
    Ok(ThreeDClass {
        label,
        alpha: None,
        basis: Mat::from_fn(3, 3, |i, j| match j {
            0 => v1[i].clone(),
            1 => v2[i].clone(),
            _ => w[i].clone(),
        }),
    })
}

/// Sylvester test on the negated matrix, exact.
fn is_negative_definite(k: &Mat) -> Result<bool> {
    let n = k.rows();
    for size in 1..=n {
        let minor = Mat::from_fn(size, size, |i, j| -&k[(i, j)]);
        match minor.det().sign() {
            Some(1) => continue,
            Some(_) => return Ok(false),
            None => {
                return Err(Error::Unsupported(
                    "definiteness needs rational entries".into(),
                ))
            }
        }
    }
    Ok(true)
}
