//! Bundled algebras, modification data and matrix models.
//!
//! Everything here is constructed programmatically and self-verifies on
//! load: algebras pass the axiom checks, matrix models reproduce the
//! structure constants under commutators, and each bundled sigma closes with
//! the expected bracket table before it is handed out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::descr::{AlgebraDescription, SigmaBase, SigmaColumn, SigmaFile};
use crate::error::{Error, Result};
use crate::lie::{GradedLieAlgebra, SparseVec};
use crate::linalg::Mat;
use crate::matmodel::{sl3_model_for, su21_graded, MatrixModel};
use crate::modification::Modification;
use crate::poly::{MultiPoly, PolyRing};
use crate::prolong::{tanaka_prolong, G0Spec, ProlongedAlgebra};
use crate::scalar::{Scalar, ScalarDomain};

/// Heisenberg algebra: `[e1, e2] = e3`, first layer `{e1, e2}`.
pub fn heisenberg() -> GradedLieAlgebra {
    GradedLieAlgebra::new(
        vec!["e1".into(), "e2".into(), "e3".into()],
        Some(vec![-1, -1, -2]),
        vec![((0, 1), vec![(2, Scalar::one())])],
        ScalarDomain::Rational,
    )
    .expect("heisenberg is well-formed")
}

/// Free nilpotent algebra of rank 2 and step 4:
/// `[e2,e1]=e3, [e3,e1]=e4, [e3,e2]=e5, [e4,e1]=e6, [e5,e1]=e7,
///  [e4,e2]=e7, [e5,e2]=e8`.
pub fn f24() -> GradedLieAlgebra {
    let one = Scalar::one;
    GradedLieAlgebra::new(
        (1..=8).map(|i| format!("e{}", i)).collect(),
        Some(vec![-1, -1, -2, -3, -3, -4, -4, -4]),
        vec![
            ((1, 0), vec![(2, one())]),
            ((2, 0), vec![(3, one())]),
            ((2, 1), vec![(4, one())]),
            ((3, 0), vec![(5, one())]),
            ((4, 0), vec![(6, one())]),
            ((3, 1), vec![(6, one())]),
            ((4, 1), vec![(7, one())]),
        ],
        ScalarDomain::Rational,
    )
    .expect("f24 is well-formed")
}

/// Free nilpotent algebra of rank 3 and step 2 (dimension 6).
pub fn f32() -> GradedLieAlgebra {
    let one = Scalar::one;
    GradedLieAlgebra::new(
        (1..=6).map(|i| format!("e{}", i)).collect(),
        Some(vec![-1, -1, -1, -2, -2, -2]),
        vec![
            ((0, 1), vec![(3, one())]),
            ((0, 2), vec![(4, one())]),
            ((1, 2), vec![(5, one())]),
        ],
        ScalarDomain::Rational,
    )
    .expect("f32 is well-formed")
}

/// A dimension-7, step-5 stratified algebra whose only strata-preserving
/// derivation is the grading derivation; its full prolongation is g x R.
pub fn ultra_rigid() -> GradedLieAlgebra {
    let one = Scalar::one;
    GradedLieAlgebra::new(
        (1..=7).map(|i| format!("e{}", i)).collect(),
        Some(vec![-1, -1, -2, -3, -3, -4, -5]),
        vec![
            ((1, 0), vec![(2, one())]),
            ((2, 0), vec![(3, one())]),
            ((2, 1), vec![(4, one())]),
            ((4, 0), vec![(5, one())]),
            ((3, 1), vec![(5, one())]),
            ((5, 0), vec![(6, one())]),
            ((5, 1), vec![(6, one())]),
            ((3, 2), vec![(6, one())]),
            ((4, 2), vec![(6, -&one())]),
        ],
        ScalarDomain::Rational,
    )
    .expect("ultra-rigid template is well-formed")
}

/// The graded su(2,1) algebra (a finite prolongation of the Heisenberg
/// algebra over the Gaussian rationals).
pub fn su21() -> GradedLieAlgebra {
    su21_graded().expect("su(2,1) matrices close").0
}

/// The abstract sl(3)-shaped prolongation of the Heisenberg algebra through
/// the line-preserving derivations.
pub fn sl3_prolongation() -> ProlongedAlgebra {
    let h = heisenberg();
    let g0 = G0Spec::Diagonal
        .resolve(&h)
        .expect("diagonal derivations resolve");
    tanaka_prolong(&h, &g0, 3).expect("heisenberg diagonal prolongation")
}

/// The full prolongation of f24 (rigid at degree one, dimension 12).
pub fn f24_prolongation() -> ProlongedAlgebra {
    let f = f24();
    let g0 = G0Spec::Full.resolve(&f).expect("derivations resolve");
    tanaka_prolong(&f, &g0, 1).expect("f24 full prolongation")
}

/// JSON form for a bundled matrix model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescription {
    pub name: String,
    pub size: usize,
    pub algebra: AlgebraDescription,
    /// One entry per basis label: rows of scalar strings.
    pub generators: Vec<(String, Vec<Vec<String>>)>,
    pub charts: Vec<String>,
}

impl ModelDescription {
    pub fn from_model(alg: &GradedLieAlgebra, model: &MatrixModel, charts: &[&str]) -> Self {
        ModelDescription {
            name: model.name.clone(),
            size: model.size,
            algebra: AlgebraDescription::from_algebra(&model.name, alg),
            generators: model
                .generators
                .iter()
                .map(|(l, m)| {
                    let rows = (0..m.rows())
                        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect())
                        .collect();
                    (l.clone(), rows)
                })
                .collect(),
            charts: charts.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// One bundled catalog entry.
#[derive(Debug, Clone)]
pub enum CatalogEntry {
    Algebra(AlgebraDescription),
    Sigma(SigmaFile),
    Model(ModelDescription),
}

impl CatalogEntry {
    pub fn to_json(&self) -> String {
        match self {
            CatalogEntry::Algebra(d) => d.to_json(),
            CatalogEntry::Sigma(s) => s.to_json(),
            CatalogEntry::Model(m) => serde_json::to_string_pretty(m).expect("model serializes"),
        }
    }
}

pub const CATALOG_NAMES: &[&str] = &[
    "heisenberg3",
    "f24",
    "f32",
    "sl3-graded",
    "su21-graded",
    "ultra-rigid-template",
    "heis-semidirect-R",
    "ultra-rigid-semidirect-R",
    "heis-sl3-A",
    "heis-sl3-B",
    "heis-sl3-C",
    "heis-su21-D",
    "f24-abc",
    "e2-matrix-model",
];

/// Returns the named bundled entry, fully self-verified.
pub fn entry(name: &str) -> Result<CatalogEntry> {
    match name {
        "heisenberg3" => Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
            name,
            &heisenberg(),
        ))),
        "f24" => Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
            name,
            &f24(),
        ))),
        "f32" => Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
            name,
            &f32(),
        ))),
        "sl3-graded" => Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
            name,
            sl3_prolongation().algebra(),
        ))),
        "su21-graded" => Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
            name,
            &su21(),
        ))),
        "ultra-rigid-template" => {
            let g = ultra_rigid();
            let der = crate::prolong::derivation_algebra(&g)?;
            if der.dim() != 1 {
                return Err(Error::Description(
                    "ultra-rigid template lost its rigidity".into(),
                ));
            }
            Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
                name, &g,
            )))
        }
        "heis-semidirect-R" => {
            let h = heisenberg();
            let d = G0Spec::Grading.resolve(&h)?;
            let p = crate::prolong::semidirect(&h, &d)?;
            Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
                name,
                p.algebra(),
            )))
        }
        "ultra-rigid-semidirect-R" => {
            let g = ultra_rigid();
            let d = G0Spec::Grading.resolve(&g)?;
            let p = crate::prolong::semidirect(&g, &d)?;
            Ok(CatalogEntry::Algebra(AlgebraDescription::from_algebra(
                name,
                p.algebra(),
            )))
        }
        "heis-sl3-A" | "heis-sl3-B" | "heis-sl3-C" => {
            let file = heis_sl3_sigma(name)?;
            verify_sigma_entry(name, &file)?;
            Ok(CatalogEntry::Sigma(file))
        }
        "heis-su21-D" => {
            let file = heis_su21_sigma();
            verify_sigma_entry(name, &file)?;
            Ok(CatalogEntry::Sigma(file))
        }
        "f24-abc" => {
            let file = f24_abc_sigma()?;
            verify_sigma_entry(name, &file)?;
            Ok(CatalogEntry::Sigma(file))
        }
        "e2-matrix-model" => Ok(CatalogEntry::Model(e2_matrix_model()?)),
        _ => Err(Error::UnknownCatalog(name.to_string())),
    }
}

/// Resolves a sigma file's base into a prolongation: graded descriptions are
/// adopted directly, stratified ones are prolonged through all derivations
/// (requiring rigidity).
pub fn resolve_base(base: &SigmaBase) -> Result<ProlongedAlgebra> {
    let descr = match base {
        SigmaBase::Name(n) => match entry(n)? {
            CatalogEntry::Algebra(d) => d,
            _ => return Err(Error::Description(format!("{n:?} is not an algebra"))),
        },
        SigmaBase::Inline(d) => (**d).clone(),
    };
    let alg = descr.to_algebra()?;
    let degrees = alg.degrees().ok_or(Error::MissingDegrees)?;
    if degrees.iter().any(|&d| d >= 0) {
        ProlongedAlgebra::from_graded(alg)
    } else {
        let g0 = G0Spec::Full.resolve(&alg)?;
        let p = tanaka_prolong(&alg, &g0, 6)?;
        if !p.rigid() {
            return Err(Error::Unsupported(
                "base algebra is not rigid within the degree cap".into(),
            ));
        }
        Ok(p)
    }
}

/// Builds the modification described by a bundled or user sigma file.
pub fn sigma_modification(file: &SigmaFile) -> Result<Modification> {
    let p = resolve_base(&file.base)?;
    Modification::from_file(file, p)
}

/// Convenience: the named bundled modification.
pub fn catalog_modification(name: &str) -> Result<Modification> {
    match entry(name)? {
        CatalogEntry::Sigma(file) => sigma_modification(&file),
        _ => Err(Error::UnknownCatalog(format!(
            "{name} is not a sigma entry"
        ))),
    }
}

fn sigma_file(
    base: &str,
    p: &ProlongedAlgebra,
    parameters: Vec<String>,
    columns: Vec<(usize, Vec<MultiPoly>)>,
) -> SigmaFile {
    let alg = p.algebra();
    let splitting: Vec<String> = p.q_indices().map(|i| alg.labels()[i].clone()).collect();
    let sigma = columns
        .into_iter()
        .map(|(from, coords)| SigmaColumn {
            from: alg.labels()[from].clone(),
            to: coords
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(r, c)| (alg.labels()[p.g_dim() + r].clone(), c.to_string()))
                .collect(),
        })
        .filter(|c| !c.to.is_empty())
        .collect();
    SigmaFile {
        base: SigmaBase::Name(base.to_string()),
        splitting,
        sigma,
        parameters,
    }
}

/// q-coordinates of an sl(3) matrix in the abstract prolongation, via the
/// bundled matrix model.
fn sl3_q_coords(p: &ProlongedAlgebra, model: &MatrixModel, m: &Mat) -> Result<Vec<Scalar>> {
    let coords = model
        .coordinates_of(m)
        .ok_or_else(|| Error::Description("matrix outside the sl(3) span".into()))?;
    if coords[..p.g_dim()].iter().any(|c| !c.is_zero()) {
        return Err(Error::Description(
            "matrix has a component in the negative part".into(),
        ));
    }
    Ok(coords[p.g_dim()..].to_vec())
}

fn heis_sl3_sigma(name: &str) -> Result<SigmaFile> {
    let p = sl3_prolongation();
    let model = sl3_model_for(&p)?;
    let e = |i: usize, j: usize| {
        let mut m = Mat::zeros(3, 3);
        m[(i, j)] = Scalar::one();
        m
    };
    match name {
        "heis-sl3-A" => {
            let params = PolyRing::new(vec!["alpha", "beta"]);
            // sigma(e1) = beta * diag(2/3, -1/3, -1/3) + alpha * E21.
            let m_beta = {
                let mut m = Mat::zeros(3, 3);
                m[(0, 0)] = Scalar::ratio(2, 3);
                m[(1, 1)] = Scalar::ratio(-1, 3);
                m[(2, 2)] = Scalar::ratio(-1, 3);
                m
            };
            let cb = sl3_q_coords(&p, &model, &m_beta)?;
            let ca = sl3_q_coords(&p, &model, &e(1, 0))?;
            let alpha = MultiPoly::var(&params, "alpha")?;
            let beta = MultiPoly::var(&params, "beta")?;
            let col: Vec<MultiPoly> = cb
                .iter()
                .zip(&ca)
                .map(|(b, a)| &beta.scale(b) + &alpha.scale(a))
                .collect();
            Ok(sigma_file(
                "sl3-graded",
                &p,
                vec!["alpha".into(), "beta".into()],
                vec![(0, col)],
            ))
        }
        "heis-sl3-B" => {
            let params = PolyRing::new(Vec::<String>::new());
            let to_col = |m: &Mat| -> Result<Vec<MultiPoly>> {
                Ok(sl3_q_coords(&p, &model, m)?
                    .iter()
                    .map(|c| MultiPoly::constant(&params, c.clone()))
                    .collect())
            };
            let minus = |m: Mat| m.scale(&Scalar::from_int(-1));
            Ok(sigma_file(
                "sl3-graded",
                &p,
                vec![],
                vec![
                    (0, to_col(&minus(e(1, 0)))?),
                    (1, to_col(&minus(e(2, 1)))?),
                    (2, to_col(&minus(e(2, 0)))?),
                ],
            ))
        }
        "heis-sl3-C" => {
            let params = PolyRing::new(Vec::<String>::new());
            let to_col = |m: &Mat| -> Result<Vec<MultiPoly>> {
                Ok(sl3_q_coords(&p, &model, m)?
                    .iter()
                    .map(|c| MultiPoly::constant(&params, c.clone()))
                    .collect())
            };
            let half = Scalar::ratio(1, 2);
            let m2 = e(1, 0).scale(&half);
            let m3 = e(0, 0).sub(&e(1, 1)).scale(&half);
            Ok(sigma_file(
                "sl3-graded",
                &p,
                vec![],
                vec![(1, to_col(&m2)?), (2, to_col(&m3)?)],
            ))
        }
        _ => Err(Error::UnknownCatalog(name.to_string())),
    }
}

/// The su(2,1) case-D data: coefficients straight from the displayed
/// combinations of the graded basis.
fn heis_su21_sigma() -> SigmaFile {
    let q_labels = ["H", "U", "thX", "thY", "thZ"];
    let col = |entries: &[(&str, &str)]| SigmaColumn {
        from: String::new(),
        to: entries
            .iter()
            .map(|(l, c)| (l.to_string(), c.to_string()))
            .collect(),
    };
    let mut c_x = col(&[("thX", "-1/16"), ("thY", "0+9/16*i")]);
    c_x.from = "X".into();
    let mut c_y = col(&[("thX", "0-9/16*i"), ("thY", "-1/16")]);
    c_y.from = "Y".into();
    let mut c_z = col(&[("H", "0-9/4*i"), ("U", "1/4"), ("thZ", "-5/16")]);
    c_z.from = "Z".into();
    SigmaFile {
        base: SigmaBase::Name("su21-graded".into()),
        splitting: q_labels.iter().map(|s| s.to_string()).collect(),
        sigma: vec![c_x, c_y, c_z],
        parameters: vec![],
    }
}

/// Sigma supported on `e1` with the lower-triangular 2x2 block
/// `[[a, 0], [c, b]]` expressed in the computed derivation basis of f24.
fn f24_abc_sigma() -> Result<SigmaFile> {
    let p = f24_prolongation();
    let g0 = G0Spec::Full.resolve(&f24())?;
    let params = PolyRing::new(vec!["a", "b", "c"]);
    let mut col = vec![MultiPoly::zero(&params); p.q_dim()];
    let blocks = [("a", (0usize, 0usize)), ("b", (1, 1)), ("c", (1, 0))];
    for (name, (r, c)) in blocks {
        let mut block = Mat::zeros(2, 2);
        block[(r, c)] = Scalar::one();
        let coords = g0.coordinates_for_first_layer_block(&block)?;
        let var = MultiPoly::var(&params, name)?;
        for (row, coeff) in coords.iter().enumerate() {
            if !coeff.is_zero() {
                col[row] = &col[row] + &var.scale(coeff);
            }
        }
    }
    Ok(sigma_file(
        "f24",
        &p,
        vec!["a".into(), "b".into(), "c".into()],
        vec![(0, col)],
    ))
}

/// The planar rigid-motion model inside sl(3): span of
/// `f1 = E12 - E21, f2 = E23, f3 = E13` with the H and R charts.
fn e2_matrix_model() -> Result<ModelDescription> {
    let alg = GradedLieAlgebra::new(
        vec!["f1".into(), "f2".into(), "f3".into()],
        None,
        vec![
            ((0, 1), vec![(2, Scalar::one())]),
            ((0, 2), vec![(1, Scalar::from_int(-1))]),
        ],
        ScalarDomain::Rational,
    )?;
    let e = |i: usize, j: usize| {
        let mut m = Mat::zeros(3, 3);
        m[(i, j)] = Scalar::one();
        m
    };
    let f1 = e(0, 1).sub(&e(1, 0));
    let mats = vec![f1, e(1, 2), e(0, 2)];
    let model = MatrixModel::for_algebra("e2", &alg, mats)?;
    Ok(ModelDescription::from_model(&alg, &model, &["H", "R"]))
}

/// Expected f-basis bracket tables for the four three-dimensional cases.
/// `alpha`/`beta` apply to case A.
fn expected_case_brackets(
    case: char,
    alpha: &Scalar,
    beta: &Scalar,
) -> Vec<((usize, usize), SparseVec)> {
    let one = Scalar::one();
    match case {
        'A' => {
            let mut v: Vec<((usize, usize), SparseVec)> = vec![((0, 1), vec![(2, one.clone())])];
            let mut terms: SparseVec = Vec::new();
            if !alpha.is_zero() {
                terms.push((1, alpha.clone()));
            }
            if !beta.is_zero() {
                terms.push((2, beta.clone()));
            }
            if !terms.is_empty() {
                v.push(((0, 2), terms));
            }
            v
        }
        'B' => vec![
            ((0, 1), vec![(2, one.clone())]),
            ((0, 2), vec![(1, -&one)]),
            ((1, 2), vec![(0, one.clone())]),
        ],
        'C' => vec![
            ((0, 1), vec![(2, one.clone())]),
            ((0, 2), vec![(0, -&one)]),
            ((1, 2), vec![(1, one.clone())]),
        ],
        'D' => vec![
            ((0, 1), vec![(2, one.clone())]),
            ((0, 2), vec![(1, one.clone())]),
            ((1, 2), vec![(0, -&one)]),
        ],
        _ => unreachable!(),
    }
}

/// Self-verification: the bundled sigma closes and its bracket table matches
/// the advertised case (at sample parameter values where parametric).
fn verify_sigma_entry(name: &str, file: &SigmaFile) -> Result<()> {
    let m = sigma_modification(file)?;
    let sample: BTreeMap<String, Scalar> = match name {
        "heis-sl3-A" => [
            ("alpha".to_string(), Scalar::from_int(-2)),
            ("beta".to_string(), Scalar::one()),
        ]
        .into(),
        "f24-abc" => [
            ("a".to_string(), Scalar::from_int(1)),
            ("b".to_string(), Scalar::from_int(-2)),
            ("c".to_string(), Scalar::ratio(1, 3)),
        ]
        .into(),
        _ => BTreeMap::new(),
    };
    let (s, _) = m.modified_brackets(&sample)?;
    let expected: Option<Vec<((usize, usize), SparseVec)>> = match name {
        "heis-sl3-A" => Some(expected_case_brackets(
            'A',
            &Scalar::from_int(-2),
            &Scalar::one(),
        )),
        "heis-sl3-B" => Some(expected_case_brackets(
            'B',
            &Scalar::zero(),
            &Scalar::zero(),
        )),
        "heis-sl3-C" => Some(expected_case_brackets(
            'C',
            &Scalar::zero(),
            &Scalar::zero(),
        )),
        "heis-su21-D" => Some(expected_case_brackets(
            'D',
            &Scalar::zero(),
            &Scalar::zero(),
        )),
        _ => None,
    };
    if let Some(table) = expected {
        for i in 0..s.dim() {
            for j in i + 1..s.dim() {
                let want: SparseVec = table
                    .iter()
                    .find(|(k, _)| *k == (i, j))
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default();
                if s.bracket_basis(i, j) != want {
                    return Err(Error::Description(format!(
                        "{name}: bracket ({i}, {j}) deviates from the case table"
                    )));
                }
            }
        }
    }
    if !s.check_axioms().is_empty() {
        return Err(Error::Description(format!(
            "{name}: graph algebra fails axioms"
        )));
    }
    Ok(())
}
