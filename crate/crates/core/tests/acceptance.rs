//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p carnot --test acceptance -- --nocapture` to see
//! the per-criterion lines. All checks are exact except the coset-projection
//! criterion, which uses floating point with tolerance 1e-12.
//!
//! Criterion 5 asserts the reference step value 5 for the bundled s(1); the
//! implementation computes 6 from the bracket table (series 8,6,5,3,2,1,0),
//! so that single check is expected to stay red; the discrepancy sits in the
//! reference value, not in the series computation, which is verified
//! independently elsewhere in this suite.

use std::collections::BTreeMap;

use carnot::catalog::{
    self, catalog_modification, f24, f24_prolongation, heisenberg, sl3_prolongation, su21,
    ultra_rigid,
};
use carnot::classify::{classify_3d, ThreeDLabel};
use carnot::contact::{
    development_rhs_symbolic, development_ring, integrate_development, scaled_action,
};
use carnot::lie::{unit, GradedLieAlgebra, SparseVec};
use carnot::linalg::{Mat, Subspace};
use carnot::matmodel::{chart_h_f64, chart_r_f64, ul_project_f64, CosetProjection};
use carnot::modification::{semidirect_modification, ultra_rigid_criterion, Modification};
use carnot::poly::parse_poly;
use carnot::prolong::{
    aut_pg_algebra, derivation_algebra, largest_ideal_in, tanaka_prolong, G0Spec,
};
use carnot::random::{random_functional, random_stratified, Rng64};
use carnot::scalar::Scalar;

fn pass(n: usize, what: &str) {
    println!("PASS criterion {n}: {what}");
}

fn bind(pairs: &[(&str, Scalar)]) -> BTreeMap<String, Scalar> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

#[test]
fn criterion_01_derivation_dimensions() {
    assert_eq!(derivation_algebra(&heisenberg()).unwrap().dim(), 4);
    assert_eq!(derivation_algebra(&f24()).unwrap().dim(), 4);
    pass(
        1,
        "derivation algebras of heisenberg3 and f24 both have dimension 4",
    );
}

#[test]
fn criterion_02_prolongation_profiles() {
    // Heisenberg through the line-preserving derivations: sl(3) shape.
    let p = sl3_prolongation();
    assert!(p.rigid());
    assert_eq!(p.dim(), 8);
    let dims: Vec<usize> = p
        .layer_dims()
        .iter()
        .filter(|&&(_, d)| d > 0)
        .map(|&(_, d)| d)
        .collect();
    assert_eq!(dims, vec![1, 2, 2, 2, 1]);
    assert!(!p.algebra().killing_form().det().is_zero());
    assert!(p.algebra().check_axioms().is_empty());

    // f24 through all derivations: rigid at degree one, total dimension 12.
    let pf = f24_prolongation();
    assert!(pf.rigid());
    assert_eq!(pf.dim(), 12);
    assert_eq!(pf.layer_dims().last(), Some(&(1, 0)));
    assert!(pf.algebra().check_axioms().is_empty());

    // Heisenberg through all derivations, capped at 3: nonzero everywhere.
    let h = heisenberg();
    let g0 = G0Spec::Full.resolve(&h).unwrap();
    let ph = tanaka_prolong(&h, &g0, 3).unwrap();
    assert!(!ph.rigid());
    for &(d, dim) in ph.layer_dims() {
        assert!(dim > 0, "layer {d} is zero");
    }
    assert!(ph.algebra().check_axioms().is_empty());
    pass(
        2,
        "prolongation profiles: (1,2|2|2,1) rigid dim 8 with nondegenerate \
         Killing form; f24 rigid at 1 dim 12; capped heisenberg nonzero at every degree",
    );
}

/// The ten published relations of s(a,b,c), with zero coefficients dropped.
fn expected_s_abc(a: &Scalar, b: &Scalar, c: &Scalar) -> Vec<((usize, usize), SparseVec)> {
    let one = Scalar::one();
    let term = |pairs: Vec<(usize, Scalar)>| -> SparseVec {
        pairs.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    };
    let s2 = |x: &Scalar| x + x;
    let s3 = |x: &Scalar| &(x + x) + x;
    vec![
        ((1, 0), term(vec![(1, -b), (2, one.clone())])),
        ((2, 0), term(vec![(2, -&(a + b)), (3, one.clone())])),
        ((2, 1), term(vec![(4, one.clone())])),
        (
            (3, 0),
            term(vec![(3, -&(&s2(a) + b)), (4, -c), (5, one.clone())]),
        ),
        ((3, 1), term(vec![(6, one.clone())])),
        ((4, 0), term(vec![(4, -&(a + &s2(b))), (6, one.clone())])),
        ((0, 5), term(vec![(5, &s3(a) + b), (6, s2(c))])),
        ((0, 6), term(vec![(6, s2(&(a + b))), (7, c.clone())])),
        ((0, 7), term(vec![(7, a + &s3(b))])),
        ((4, 1), term(vec![(7, one.clone())])),
    ]
}

#[test]
fn criterion_03_modification_closure_table() {
    let m = catalog_modification("f24-abc").unwrap();
    let mut rng = Rng64::new(0xABC);
    for trial in 0..50 {
        let (a, b, c) = (rng.rational(5, 4), rng.rational(5, 4), rng.rational(5, 4));
        let bindings = bind(&[("a", a.clone()), ("b", b.clone()), ("c", c.clone())]);
        assert!(
            m.is_modification_subalgebra(&bindings).unwrap().is_closed(),
            "trial {trial} failed to close"
        );
        let (s, _) = m.modified_brackets(&bindings).unwrap();
        let table = expected_s_abc(&a, &b, &c);
        for i in 0..8 {
            for j in i + 1..8 {
                let want_fwd = table.iter().find(|(k, _)| *k == (i, j));
                let want_bwd = table.iter().find(|(k, _)| *k == (j, i));
                let got = s.bracket_basis(i, j);
                let want: SparseVec = match (want_fwd, want_bwd) {
                    (Some((_, v)), _) => v.clone(),
                    (None, Some((_, v))) => v.iter().map(|(k, c)| (*k, -c)).collect(),
                    (None, None) => Vec::new(),
                };
                assert_eq!(got, want, "trial {trial}: bracket ({i}, {j})");
            }
        }
    }
    pass(
        3,
        "f24 sigma ansatz closes for 50 random rational (a,b,c) and reproduces \
         the ten-relation table exactly",
    );
}

#[test]
fn criterion_04_contact_map_golden() {
    let f = f24();
    let ring = development_ring(8);
    // Derivation of sigma(e1) at (a,b,c) = (0,0,1): e1->e2 extended.
    let mut u = Mat::zeros(8, 8);
    u[(1, 0)] = Scalar::one();
    u[(4, 3)] = Scalar::one();
    u[(6, 5)] = Scalar::from_int(2);
    u[(7, 6)] = Scalar::one();
    let scale = parse_poly(&ring, "t*x1").unwrap();
    let action = scaled_action(&u, &scale);
    let gamma = integrate_development(&f, &ring, &action).unwrap();
    let table = [
        "t*x1",
        "1/2*t^2*x1^2 + t*x2",
        "-1/12*t^3*x1^3 + t*x3",
        "t*x4",
        "-1/240*t^5*x1^5 + 1/12*t^3*x1^2*x3 + 1/2*t^2*x1*x4 + t*x5",
        "1/720*t^5*x1^5 + t*x6",
        "1/720*t^6*x1^6 + 1/360*t^5*x1^4*x2 + t^2*x1*x6 + t*x7",
        "1/5040*t^7*x1^7 + 1/720*t^6*x1^5*x2 + 1/720*(x1^3*x2^2 + 3*x1^4*x3)*t^5 \
         - 1/12*(x1*x2*x4 - x1^2*x5 - 4*x1^2*x6)*t^3 + 1/2*t^2*x1*x7 + t*x8",
    ];
    for (i, want) in table.iter().enumerate() {
        assert_eq!(
            gamma[i],
            parse_poly(&ring, want).unwrap(),
            "gamma_{} deviates from the published solution",
            i + 1
        );
    }

    // Assembled right-hand sides with formal solution variables.
    let rhs = development_rhs_symbolic(&f, |ring| {
        let scale = parse_poly(ring, "t*x1").unwrap();
        scaled_action(&u, &scale)
    })
    .unwrap();
    let gring = rhs[0].ring().clone();
    let system = [
        "x1",
        "t*x1^2 + x2",
        "-1/2*t*x1^2*g1 - 1/2*x2*g1 + 1/2*x1*g2 + x3",
        "1/12*t*x1^2*g1^2 + 1/12*x2*g1^2 - 1/12*(g1*g2 - 6*g3)*x1 - 1/2*x3*g1 + x4",
        "1/12*x2*g1*g2 - 1/12*x1*g2^2 + 1/12*(x1^2*g1*g2 + 6*x1^2*g3 + 12*x1*x4)*t \
         - 1/2*x3*g2 + 1/2*x2*g3 + x5",
        "1/12*x3*g1^2 - 1/12*(g1*g3 - 6*g4)*x1 - 1/2*x4*g1 + x6",
        "1/6*x3*g1*g2 - 1/12*x2*g1*g3 - 1/12*(x1^2*g1*g3 + 6*x1*x4*g1 - 6*x1^2*g4 \
         - 24*x1*x6)*t - 1/12*(g2*g3 - 6*g5)*x1 - 1/2*x5*g1 - 1/2*x4*g2 + 1/2*x2*g4 + x7",
        "t^2*x1^2*x6 + 1/12*x3*g2^2 - 1/12*x2*g2*g3 - 1/12*(x1^2*g2*g3 + 6*x1*x4*g2 \
         - 6*x1^2*g5 - 12*x1*x7)*t - 1/2*x5*g2 + 1/2*x2*g5 + x8",
    ];
    for (i, want) in system.iter().enumerate() {
        assert_eq!(
            rhs[i],
            parse_poly(&gring, want).unwrap(),
            "gamma_{}' deviates from the published system",
            i + 1
        );
    }
    pass(
        4,
        "development solution matches all eight published polynomials \
         (including 1/5040 t^7 x1^7) and the assembled ODE matches the \
         published right-hand sides term by term",
    );
}

#[test]
fn criterion_05_step_separation() {
    assert_eq!(f24().nilpotency_step(), Some(4));
    let m = catalog_modification("f24-abc").unwrap();
    let bindings = bind(&[
        ("a", Scalar::zero()),
        ("b", Scalar::zero()),
        ("c", Scalar::one()),
    ]);
    let (s, _) = m.modified_brackets(&bindings).unwrap();
    let computed = s.nilpotency_step();
    let dims: Vec<usize> = s
        .series(carnot::lie::SeriesKind::LowerCentral)
        .iter()
        .map(|x| x.dim())
        .collect();
    if computed == Some(5) {
        pass(5, "nilpotency steps are 5 for s(1) and 4 for f24");
    } else {
        println!(
            "FAIL criterion 5: reference step for s(1) is 5, computed {:?} \
             (lower central series dims {:?}); the bracket table itself is \
             pinned green by criterion 3, and [f1, f6 - f5] = 3 f7 forces the \
             extra nonzero term",
            computed, dims
        );
    }
    assert_eq!(
        computed,
        Some(5),
        "s(1) step: reference value 5 vs computed {computed:?} (series {dims:?})"
    );
}

/// Expected brackets of the four three-dimensional cases in the f-basis.
fn expected_case(
    case: ThreeDLabel,
    alpha: &Scalar,
    beta: &Scalar,
) -> Vec<((usize, usize), SparseVec)> {
    let one = Scalar::one();
    let term = |pairs: Vec<(usize, Scalar)>| -> SparseVec {
        pairs.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    };
    match case {
        ThreeDLabel::B => vec![
            ((0, 1), term(vec![(2, one.clone())])),
            ((0, 2), term(vec![(1, -&one)])),
            ((1, 2), term(vec![(0, one.clone())])),
        ],
        ThreeDLabel::C => vec![
            ((0, 1), term(vec![(2, one.clone())])),
            ((0, 2), term(vec![(0, -&one)])),
            ((1, 2), term(vec![(1, one.clone())])),
        ],
        ThreeDLabel::D => vec![
            ((0, 1), term(vec![(2, one.clone())])),
            ((0, 2), term(vec![(1, one.clone())])),
            ((1, 2), term(vec![(0, -&one)])),
        ],
        _ => vec![
            ((0, 1), term(vec![(2, one.clone())])),
            ((0, 2), term(vec![(1, alpha.clone()), (2, beta.clone())])),
        ],
    }
}

fn assert_table(s: &GradedLieAlgebra, table: &[((usize, usize), SparseVec)], what: &str) {
    for i in 0..3 {
        for j in i + 1..3 {
            let want: SparseVec = table
                .iter()
                .find(|(k, _)| *k == (i, j))
                .map(|(_, v)| v.clone())
                .unwrap_or_default();
            assert_eq!(s.bracket_basis(i, j), want, "{what}: bracket ({i}, {j})");
        }
    }
}

/// A random basis change fixing the span of the first two basis vectors.
fn random_plane_change(rng: &mut Rng64) -> Mat {
    loop {
        let entries = [
            [rng.int_in(-3, 3), rng.int_in(-3, 3), rng.int_in(-3, 3)],
            [rng.int_in(-3, 3), rng.int_in(-3, 3), rng.int_in(-3, 3)],
            [0, 0, rng.int_in(-3, 3)],
        ];
        let t = Mat::from_fn(3, 3, |i, j| Scalar::from_int(entries[i][j]));
        if !t.det().is_zero() {
            return t;
        }
    }
}

#[test]
fn criterion_06_three_dimensional_classification() {
    let mut rng = Rng64::new(0x3D);
    let plane = Subspace::from_vectors(3, vec![unit(3, 0), unit(3, 1)]);
    let labels3 = || vec!["g1".to_string(), "g2".to_string(), "g3".to_string()];

    // Case A over the sample grid.
    let m = catalog_modification("heis-sl3-A").unwrap();
    for alpha in [-2i64, -1, 0, 1, 2] {
        for beta in [0i64, 1] {
            let a = Scalar::from_int(alpha);
            let b = Scalar::from_int(beta);
            let bindings = bind(&[("alpha", a.clone()), ("beta", b.clone())]);
            assert!(m.is_modification_subalgebra(&bindings).unwrap().is_closed());
            let (s, pol) = m.modified_brackets(&bindings).unwrap();
            assert_table(&s, &expected_case(ThreeDLabel::A1, &a, &b), "case A");
            let want_label = match (alpha, beta) {
                (0, 0) => ThreeDLabel::A1,
                (x, 0) if x > 0 => ThreeDLabel::A2,
                (_, 0) => ThreeDLabel::A3,
                _ => ThreeDLabel::A4,
            };
            let got = classify_3d(&s, &pol).unwrap();
            assert_eq!(got.label, want_label, "alpha={alpha}, beta={beta}");
            if want_label == ThreeDLabel::A4 {
                assert_eq!(got.alpha, Some(a.clone()));
            }
            for _ in 0..100 {
                let t = random_plane_change(&mut rng);
                let moved = s.change_basis(&t, labels3()).unwrap();
                let c = classify_3d(&moved, &plane).unwrap();
                assert_eq!(c.label, want_label);
                if want_label == ThreeDLabel::A4 {
                    assert_eq!(c.alpha, Some(a.clone()));
                }
            }
        }
    }

    // Cases B, C in sl(3); D in su(2,1) over the Gaussian rationals.
    for (name, label) in [
        ("heis-sl3-B", ThreeDLabel::B),
        ("heis-sl3-C", ThreeDLabel::C),
        ("heis-su21-D", ThreeDLabel::D),
    ] {
        let m = catalog_modification(name).unwrap();
        assert!(m
            .is_modification_subalgebra(&BTreeMap::new())
            .unwrap()
            .is_closed());
        let (s, pol) = m.modified_brackets(&BTreeMap::new()).unwrap();
        assert_table(
            &s,
            &expected_case(label, &Scalar::zero(), &Scalar::zero()),
            name,
        );
        assert_eq!(classify_3d(&s, &pol).unwrap().label, label, "{name}");
        for _ in 0..100 {
            let t = random_plane_change(&mut rng);
            let moved = s.change_basis(&t, labels3()).unwrap();
            assert_eq!(classify_3d(&moved, &plane).unwrap().label, label, "{name}");
        }
    }
    pass(
        6,
        "catalog cases A (ten samples), B, C, D close, match their tables, and \
         classify stably under 100 plane-preserving basis changes each",
    );
}

#[test]
fn criterion_07_ultra_rigid_equivalence() {
    let mut rng = Rng64::new(0x07);
    let mut instances = 0usize;
    let mut closing_nonzero = 0usize;
    while instances < 200 {
        let g = random_stratified(&mut rng, 6);
        let kinds = [0u8, 1, 2];
        for &kind in &kinds {
            if instances >= 200 {
                break;
            }
            instances += 1;
            let sigma = match kind {
                0 => vec![Scalar::zero(); g.dim()],
                1 => random_functional(&mut rng, &g, false),
                _ => random_functional(&mut rng, &g, true),
            };
            let criterion = ultra_rigid_criterion(&g, &sigma).unwrap();
            let m = semidirect_modification(&g, &sigma).unwrap();
            let direct = m
                .is_modification_subalgebra(&BTreeMap::new())
                .unwrap()
                .is_closed();
            assert_eq!(
                direct, criterion,
                "criterion disagrees with the direct test"
            );
            if direct {
                let (s, _) = m.modified_brackets(&BTreeMap::new()).unwrap();
                assert!(s.is_solvable(), "closing modification must be solvable");
                let sigma_zero = sigma.iter().all(Scalar::is_zero);
                assert_eq!(
                    s.is_nilpotent(),
                    sigma_zero,
                    "nilpotency must occur exactly at sigma = 0"
                );
                if !sigma_zero {
                    closing_nonzero += 1;
                }
            }
        }
    }
    assert!(
        closing_nonzero > 20,
        "want a real spread of nonzero closing instances"
    );
    pass(
        7,
        "kernel criterion agrees with the direct subalgebra test on 200 random \
         instances; closing modifications are solvable and nilpotent only at sigma = 0",
    );
}

#[test]
fn criterion_08_aut_pg_and_largest_ideal() {
    let pf = f24_prolongation();
    let aut = aut_pg_algebra(&pf).unwrap();
    assert_eq!(aut.dim(), 4);
    assert_eq!(aut.matrix_span(), pf.ad_q_span());
    assert_eq!(largest_ideal_in(&pf, &pf.q_subspace()).unwrap().dim(), 0);
    let ph = sl3_prolongation();
    assert_eq!(largest_ideal_in(&ph, &ph.q_subspace()).unwrap().dim(), 0);
    pass(
        8,
        "aut(p,g) of the f24 prolongation has dimension 4 and equals ad(q); \
         the largest ideal inside q is zero for both bundled rigid prolongations",
    );
}

#[test]
fn criterion_09_e2_coset_map() {
    let mut rng = Rng64::new(0x09);
    let tol = 1e-12;
    for k in 0..10 {
        let y1 = -1.35 + 0.3 * k as f64;
        let y2 = rng.int_in(-500, 500) as f64 / 100.0;
        let y3 = rng.int_in(-500, 500) as f64 / 100.0;
        let r = chart_r_f64(y1, y2, y3);
        match ul_project_f64(&r, tol) {
            CosetProjection::Factors { g, q } => {
                let h = chart_h_f64(y1.tan(), y2, y3);
                for i in 0..3 {
                    for j in 0..3 {
                        assert!(
                            (g[i][j] - h[i][j]).abs() <= tol,
                            "chart mismatch at y1={y1}: ({i},{j})"
                        );
                        let mut acc = 0.0;
                        for t in 0..3 {
                            acc += g[i][t] * q[t][j];
                        }
                        assert!((acc - r[i][j]).abs() <= tol, "g q != m at y1={y1}");
                    }
                }
            }
            CosetProjection::NoIntersection => panic!("cell missed at y1={y1}"),
        }
    }
    let r = chart_r_f64(std::f64::consts::FRAC_PI_2, 0.3, -0.7);
    assert_eq!(ul_project_f64(&r, tol), CosetProjection::NoIntersection);
    pass(
        9,
        "coset projection of R(y) matches H(tan y1, y2, y3) within 1e-12 at ten \
         samples and reports no intersection at y1 = pi/2",
    );
}

#[test]
fn criterion_10_axiom_sweep() {
    let mut algebras: Vec<GradedLieAlgebra> = vec![
        heisenberg(),
        f24(),
        catalog::f32(),
        ultra_rigid(),
        su21(),
        sl3_prolongation().algebra().clone(),
        f24_prolongation().algebra().clone(),
    ];
    // Semidirect products with the grading derivation.
    for g in [heisenberg(), f24(), ultra_rigid()] {
        let d = G0Spec::Grading.resolve(&g).unwrap();
        algebras.push(
            carnot::prolong::semidirect(&g, &d)
                .unwrap()
                .algebra()
                .clone(),
        );
    }
    // Modified algebras over sample bindings (including the Gaussian case).
    let mods: Vec<(Modification, BTreeMap<String, Scalar>)> = vec![
        (
            catalog_modification("f24-abc").unwrap(),
            bind(&[
                ("a", Scalar::ratio(3, 7)),
                ("b", Scalar::from_int(-2)),
                ("c", Scalar::one()),
            ]),
        ),
        (
            catalog_modification("heis-sl3-A").unwrap(),
            bind(&[("alpha", Scalar::from_int(-2)), ("beta", Scalar::one())]),
        ),
        (catalog_modification("heis-sl3-B").unwrap(), BTreeMap::new()),
        (catalog_modification("heis-sl3-C").unwrap(), BTreeMap::new()),
        (
            catalog_modification("heis-su21-D").unwrap(),
            BTreeMap::new(),
        ),
    ];
    for (m, bindings) in &mods {
        let (s, _) = m.modified_brackets(bindings).unwrap();
        algebras.push(s);
    }
    // Random stratified quotients.
    let mut rng = Rng64::new(0x10);
    for _ in 0..30 {
        algebras.push(random_stratified(&mut rng, 6));
    }
    for (k, alg) in algebras.iter().enumerate() {
        let report = alg.check_axioms();
        assert!(report.is_empty(), "algebra {k} fails axioms: {:?}", report);
    }
    pass(
        10,
        "every algebra produced across the suite passes brute-force \
         antisymmetry, Jacobi and grading checks",
    );
}
