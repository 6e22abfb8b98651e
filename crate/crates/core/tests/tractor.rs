mod common;

use common::*;
use confhol_core::curvature::{tensor_scale, CurvatureData};
use confhol_core::geometry::{Point, ScalarField};
use confhol_core::tractor::{
    einstein_section, gram_matrix, recurrent_rescale, theta_map, tractor_bianchi_defect,
    tractor_curvature, tractor_derivative, tractor_inner, Tractor, TractorField, TractorJet,
};
use confhol_core::zoo;
use confhol_core::Error;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_tractor(rng: &mut ChaCha8Rng, d: usize, p: &Point) -> Tractor {
    Tractor::new(
        rng.random::<f64>() * 2.0 - 1.0,
        DVector::from_fn(d, |_, _| rng.random::<f64>() * 2.0 - 1.0),
        rng.random::<f64>() * 2.0 - 1.0,
        p.clone(),
    )
}

/// The canonical section of an Einstein gauge is annihilated by the tractor
/// derivative in every direction.
#[test]
fn einstein_section_is_parallel_pointwise() {
    for st in [sphere(3), sphere(4), hyperbolic(4)] {
        let d = st.dim();
        let chart = st.metric.chart().clone();
        let names = chart.coord_names();
        // Constant sigma = 1 and rho = -S/(2d(d-1)) as closed-form fields.
        let section = einstein_section(&st.metric, &st.default_base_point()).unwrap();
        let rho = section.rho;
        let field = TractorField {
            sigma: ScalarField::constant(chart.clone(), 1.0),
            y: (0..d)
                .map(|_| ScalarField::constant(chart.clone(), 0.0))
                .collect(),
            rho: ScalarField::constant(chart.clone(), rho),
        };
        let _ = names;
        for p in sample_points(&st, 8) {
            for dir_idx in 0..d {
                let mut dir = DVector::zeros(d);
                dir[dir_idx] = 1.0;
                let tj = TractorJet::of_field(&field, &p, &dir).unwrap();
                let dt = tractor_derivative(&st.metric, &p, &dir, &tj).unwrap();
                assert!(
                    dt.to_vector().amax() < 1e-9,
                    "Einstein section not parallel at {:?}: {:?}",
                    p.coords(),
                    dt
                );
            }
        }
    }
}

/// Metric compatibility: X <t, t'> = <D_X t, t'> + <t, D_X t'> on field jets.
#[test]
fn tractor_derivative_is_metric() {
    let st = pp_wave("y1^2*y2 + sin(z)");
    let chart = st.metric.chart().clone();
    let mk = |srcs: [&str; 6]| -> TractorField {
        TractorField {
            sigma: ScalarField::parse(chart.clone(), srcs[0]).unwrap(),
            y: (1..5)
                .map(|i| ScalarField::parse(chart.clone(), srcs[i]).unwrap())
                .collect(),
            rho: ScalarField::parse(chart.clone(), srcs[5]).unwrap(),
        }
    };
    let f1 = mk(["1 + 0.2*z", "y1", "0.3", "sin(z)", "0.1*y2", "z^2"]);
    let f2 = mk(["0.5 - y2", "z", "0.2*y1", "1", "0.4", "cos(z)"]);
    for p in sample_points(&st, 6) {
        for dir_idx in 0..4 {
            let mut dir = DVector::zeros(4);
            dir[dir_idx] = 1.0;
            let j1 = TractorJet::of_field(&f1, &p, &dir).unwrap();
            let j2 = TractorJet::of_field(&f2, &p, &dir).unwrap();
            let d1 = tractor_derivative(&st.metric, &p, &dir, &j1).unwrap();
            let d2 = tractor_derivative(&st.metric, &p, &dir, &j2).unwrap();
            let t1 = f1.value(&p).unwrap();
            let t2 = f2.value(&p).unwrap();
            // Directional derivative of <t1, t2> from component jets and the
            // metric jets.
            let mj = st.metric.jets(&p).unwrap();
            let mut lhs = j1.d_sigma * j2.rho
                + j1.sigma * j2.d_rho
                + j1.d_rho * j2.sigma
                + j1.rho * j2.d_sigma;
            for i in 0..4 {
                for j in 0..4 {
                    let dg: f64 = (0..4).map(|k| mj.dg(k, i, j) * dir[k]).sum();
                    lhs += dg * j1.y[i] * j2.y[j]
                        + mj.g[(i, j)] * (j1.d_y[i] * j2.y[j] + j1.y[i] * j2.d_y[j]);
                }
            }
            let rhs = tractor_inner(&st.metric, &d1, &t2).unwrap()
                + tractor_inner(&st.metric, &t1, &d2).unwrap();
            assert!(
                (lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0),
                "compatibility: {lhs} vs {rhs}"
            );
        }
    }
}

/// Plane-wave gauge: (sigma(z), tau(z) X, 0) has D = 0 exactly when the
/// transversal ODE holds; wrong-sign coefficients must fail.
#[test]
fn wave_section_ode_is_the_parallel_condition() {
    let st = cahen_wallach([[1.5, 0.0], [0.0, 0.5]]);
    let chart = st.metric.chart().clone();
    let a: f64 = 2.0; // trace
    let d = 4.0;
    let k = a / (d - 2.0);
    let w = k.sqrt();
    // sigma = cosh(w z), tau = w sinh(w z) solves sigma' = tau, tau' = k sigma.
    let sigma = ScalarField::parse(chart.clone(), &format!("(exp({w}*z) + exp(-{w}*z))/2")).unwrap();
    let tau = ScalarField::parse(chart.clone(), &format!("{w}*(exp({w}*z) - exp(-{w}*z))/2")).unwrap();
    let field = TractorField {
        sigma,
        y: vec![
            tau.clone(),
            ScalarField::constant(chart.clone(), 0.0),
            ScalarField::constant(chart.clone(), 0.0),
            ScalarField::constant(chart.clone(), 0.0),
        ],
        rho: ScalarField::constant(chart.clone(), 0.0),
    };
    for p in sample_points(&st, 6) {
        for dir_idx in 0..4 {
            let mut dir = DVector::zeros(4);
            dir[dir_idx] = 1.0;
            let tj = TractorJet::of_field(&field, &p, &dir).unwrap();
            let dt = tractor_derivative(&st.metric, &p, &dir, &tj).unwrap();
            assert!(
                dt.to_vector().amax() < 1e-9,
                "section not parallel along e_{dir_idx} at {:?}: {:?}",
                p.coords(),
                dt.to_vector()
            );
        }
    }
    // The sign-flipped ODE (trigonometric branch) must NOT be parallel.
    let bad_sigma = ScalarField::parse(chart.clone(), &format!("cos({w}*z)")).unwrap();
    let bad_tau = ScalarField::parse(chart.clone(), &format!("-{w}*sin({w}*z)")).unwrap();
    let bad = TractorField {
        sigma: bad_sigma,
        y: vec![
            bad_tau,
            ScalarField::constant(chart.clone(), 0.0),
            ScalarField::constant(chart.clone(), 0.0),
            ScalarField::constant(chart.clone(), 0.0),
        ],
        rho: ScalarField::constant(chart, 0.0),
    };
    let p = st.default_base_point();
    let mut dir = DVector::zeros(4);
    dir[3] = 1.0;
    let tj = TractorJet::of_field(&bad, &p, &dir).unwrap();
    let dt = tractor_derivative(&st.metric, &p, &dir, &tj).unwrap();
    assert!(dt.to_vector().amax() > 1e-3);
}

#[test]
fn tractor_curvature_vanishes_conformally_flat() {
    let st = flat_lorentz4();
    let phi = zoo::scalar_field_on(&st, "0.2*x1 - 0.1*x0*x3 + 0.05*x2^2").unwrap();
    let g2 = st.metric.conformal_rescale(&phi);
    let p = st.default_base_point();
    let x = DVector::from_vec(vec![1.0, 0.0, 0.5, 0.0]);
    let y = DVector::from_vec(vec![0.0, 1.0, 0.0, -0.3]);
    let f = tractor_curvature(&g2, &p, &x, &y).unwrap();
    assert!(f.m.amax() < 1e-8);
}

/// In a gauge with vanishing Cotton tensor the tractor curvature has only the
/// middle Weyl block: sigma and rho rows/columns vanish.
#[test]
fn c_space_gauge_curvature_is_weyl_block() {
    let st = cahen_wallach([[1.0, 0.3], [0.3, -0.5]]);
    let p = st.default_base_point();
    let gram = gram_matrix(&st.metric, &p).unwrap();
    for (i, j) in [(1usize, 3usize), (2, 3), (1, 2)] {
        let mut x = DVector::zeros(4);
        let mut y = DVector::zeros(4);
        x[i] = 1.0;
        y[j] = 1.0;
        let f = tractor_curvature(&st.metric, &p, &x, &y).unwrap();
        // Form compatibility.
        assert!(f.algebra_residual(&gram) < 1e-8);
        // sigma row, rho column, and the C-blocks vanish.
        for k in 0..6 {
            assert!(f.m[(0, k)].abs() < 1e-12);
            assert!(f.m[(k, 0)].abs() < 1e-12);
            assert!(f.m[(5, k)].abs() < 1e-12);
            assert!(f.m[(k, 5)].abs() < 1e-12);
        }
    }
}

/// F equals the commutator of D on quadratic test fields: build a field,
/// differentiate twice along coordinate directions via nested jets of the
/// closed-form components, and compare.
#[test]
fn tractor_curvature_matches_derivative_commutator() {
    // The potential has a y1-dependent screen Laplacian, so the Cotton
    // blocks of F(e_{y1}, e_z) are nonzero and the commutator check pins
    // them as well as the Weyl block.
    let st = pp_wave("y1^3 + 0.5*y2^2*sin(z)");
    let chart = st.metric.chart().clone();
    let p = Point::new(chart.clone(), vec![0.1, 0.6, -0.4, 0.9]).unwrap();
    let d = 4usize;
    // Test field with polynomial components.
    let field = TractorField {
        sigma: ScalarField::parse(chart.clone(), "1 + 0.3*y1 - 0.2*z").unwrap(),
        y: vec![
            ScalarField::parse(chart.clone(), "0.5*z").unwrap(),
            ScalarField::parse(chart.clone(), "y2").unwrap(),
            ScalarField::parse(chart.clone(), "0.1 + y1*z").unwrap(),
            ScalarField::parse(chart.clone(), "0.7").unwrap(),
        ],
        rho: ScalarField::parse(chart.clone(), "0.2*y1*y2").unwrap(),
    };
    let (i, j) = (1usize, 3usize); // directions y1 and z
    let mut ei = DVector::zeros(d);
    ei[i] = 1.0;
    let mut ej = DVector::zeros(d);
    ej[j] = 1.0;

    // D_{e_i} D_{e_j} field at p via a finite-difference of the inner
    // derivative (the outer derivative needs the inner one as a field; a
    // directional central difference at 1e-5 is accurate to ~1e-10 here and
    // the commutator cancels the symmetric error).
    let h = 1e-5;
    let d_field = |q: &Point, dir: &DVector<f64>| -> DVector<f64> {
        let tj = TractorJet::of_field(&field, q, dir).unwrap();
        tractor_derivative(&st.metric, q, dir, &tj)
            .unwrap()
            .to_vector()
    };
    let second = |dir_outer: usize, dir_inner: &DVector<f64>| -> DVector<f64> {
        let qp = p.shifted(dir_outer, h).unwrap();
        let qm = p.shifted(dir_outer, -h).unwrap();
        (d_field(&qp, dir_inner) - d_field(&qm, dir_inner)) / (2.0 * h)
    };
    // Commutator [D_i, D_j] on the field: D_i(D_j t) - D_j(D_i t). The outer
    // covariant derivative of a tractor field T along e_i is
    // e_i(T-components) + connection terms; build it from the transport
    // matrix identity D_i T = dT/dx_i + B_i T with B_i the connection matrix.
    let data = CurvatureData::connection_level(&st.metric, &p).unwrap();
    let b_at = |q: &Point, dir: &DVector<f64>| -> DMatrix<f64> {
        let data = CurvatureData::connection_level(&st.metric, q).unwrap();
        -confhol_core::tractor::transport_matrix(&data, dir)
    };
    let t_at = |q: &Point| -> DVector<f64> { field.value(q).unwrap().to_vector() };
    let di_dj = second(i, &ej) + b_at(&p, &ei) * d_field(&p, &ej);
    let dj_di = second(j, &ei) + b_at(&p, &ej) * d_field(&p, &ei);
    let commutator = di_dj - dj_di;
    let f = tractor_curvature(&st.metric, &p, &ei, &ej).unwrap();
    // The Cotton corner entries participate at this point.
    assert!(
        f.m.column(0).amax() > 1e-4 || f.m.row(d + 1).amax() > 1e-4,
        "test point should have nonzero Cotton blocks"
    );
    let expected = &f.m * t_at(&p);
    let scale = tensor_scale(expected.amax().max(data.riemann.max_abs()));
    assert!(
        (&commutator - &expected).amax() < 1e-7 * scale.max(1.0),
        "commutator mismatch: got {:?} expected {:?}",
        commutator,
        expected
    );
}

/// Naturality of the gauge change: D^{g2}(Theta t) = Theta(D^g t) on jets.
#[test]
fn theta_map_commutes_with_the_derivative() {
    let st = pp_wave("y1^2 + y2^2*z");
    let chart = st.metric.chart().clone();
    let psi = ScalarField::parse(chart.clone(), "0.2*y1 - 0.1*z^2").unwrap();
    let g2 = st.metric.conformal_rescale(&psi);
    let field = TractorField {
        sigma: ScalarField::parse(chart.clone(), "1 + 0.1*z").unwrap(),
        y: vec![
            ScalarField::parse(chart.clone(), "0.4*y2").unwrap(),
            ScalarField::parse(chart.clone(), "z").unwrap(),
            ScalarField::parse(chart.clone(), "0.3").unwrap(),
            ScalarField::parse(chart.clone(), "y1").unwrap(),
        ],
        rho: ScalarField::parse(chart.clone(), "0.5 - 0.2*y1").unwrap(),
    };
    let p = st.default_base_point();
    let d = 4usize;
    let h = 1e-5;
    for dir_idx in 0..d {
        let mut dir = DVector::zeros(d);
        dir[dir_idx] = 1.0;
        // Theta of the field, differentiated along dir by central difference
        // (the map is closed-form in the components and psi jets; 1e-5 keeps
        // the FD error near 1e-11, well under the 1e-8 gate).
        let theta_field = |q: &Point| -> DVector<f64> {
            let t = field.value(q).unwrap();
            theta_map(&psi, &t, &st.metric).unwrap().to_vector()
        };
        let qp = p.shifted(dir_idx, h).unwrap();
        let qm = p.shifted(dir_idx, -h).unwrap();
        let deriv = (theta_field(&qp) - theta_field(&qm)) / (2.0 * h);
        let value = theta_field(&p);
        let tj = TractorJet {
            sigma: value[0],
            d_sigma: deriv[0],
            y: DVector::from_iterator(d, (0..d).map(|k| value[1 + k])),
            d_y: DVector::from_iterator(d, (0..d).map(|k| deriv[1 + k])),
            rho: value[d + 1],
            d_rho: deriv[d + 1],
        };
        let lhs = tractor_derivative(&g2, &p, &dir, &tj).unwrap().to_vector();

        let tj0 = TractorJet::of_field(&field, &p, &dir).unwrap();
        let dt = tractor_derivative(&st.metric, &p, &dir, &tj0).unwrap();
        let rhs = theta_map(&psi, &dt, &st.metric).unwrap().to_vector();
        assert!(
            (&lhs - &rhs).amax() < 1e-8 * rhs.amax().max(1.0),
            "naturality along e_{dir_idx}: {:?} vs {:?}",
            lhs,
            rhs
        );
    }
}

#[test]
fn theta_isometry_on_random_tractors() {
    let st = pp_wave("y1^2");
    let psi = zoo::scalar_field_on(&st, "0.3*y2 - 0.2*z + 0.1*y1^2").unwrap();
    let g2 = st.metric.conformal_rescale(&psi);
    let p = st.default_base_point();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let a = random_tractor(&mut rng, 4, &p);
        let b = random_tractor(&mut rng, 4, &p);
        let lhs = tractor_inner(
            &g2,
            &theta_map(&psi, &a, &st.metric).unwrap(),
            &theta_map(&psi, &b, &st.metric).unwrap(),
        )
        .unwrap();
        let rhs = tractor_inner(&st.metric, &a, &b).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
    }
}

/// Cyclic curvature identity: defect ~ 0 on a curved wave; with all sigma
/// slots zero the correction term drops exactly.
#[test]
fn bianchi_defect_vanishes() {
    let st = cahen_wallach([[1.0, 0.4], [0.4, -1.0]]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in sample_points(&st, 5) {
        let triples = std::array::from_fn(|_| {
            (
                rng.random::<f64>() - 0.5,
                DVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0),
                rng.random::<f64>() - 0.5,
            )
        });
        let defect = tractor_bianchi_defect(&st.metric, &p, triples).unwrap();
        let data = CurvatureData::connection_level(&st.metric, &p).unwrap();
        let scale = tensor_scale(data.riemann.max_abs());
        assert!(
            defect.to_vector().amax() < 1e-7 * scale,
            "defect {:?}",
            defect.to_vector()
        );
    }
    // sigma = 0 on all three slots: both sides vanish separately in a
    // C-space gauge; the defect is exactly the cyclic F sum.
    let p = st.default_base_point();
    let triples = std::array::from_fn(|k| {
        let mut v = DVector::zeros(4);
        v[k + 1] = 1.0;
        (0.0, v, 0.3)
    });
    let defect = tractor_bianchi_defect(&st.metric, &p, triples).unwrap();
    assert!(defect.to_vector().amax() < 1e-10);
}

/// Recurrent sections rescale to parallel ones; pure-rho sections cannot be
/// recurrent.
#[test]
fn recurrent_rescale_cases() {
    let st = sphere(3);
    let chart = st.metric.chart().clone();
    let p0 = st.default_base_point();
    let section = einstein_section(&st.metric, &p0).unwrap();
    let rho = section.rho;

    // Already-parallel input: factor stays 1.
    let parallel = TractorField {
        sigma: ScalarField::constant(chart.clone(), 1.0),
        y: (0..3)
            .map(|_| ScalarField::constant(chart.clone(), 0.0))
            .collect(),
        rho: ScalarField::constant(chart.clone(), rho),
    };
    let q = Point::new(chart.clone(), vec![1.2, 1.1, 1.3]).unwrap();
    let curve = confhol_core::curve::Curve::segment(&p0, &q);
    let report = recurrent_rescale(&st.metric, &parallel, &curve, 16).unwrap();
    assert!(report.factor.iter().all(|f| (f - 1.0).abs() < 1e-9));
    assert!(report.parallel_defect < 1e-9);

    // Forward-scaled parallel section: recover parallelity after rescale.
    let scaled = TractorField {
        sigma: ScalarField::parse(chart.clone(), "exp(0.3*p1 - 0.2*p2)").unwrap(),
        y: (0..3)
            .map(|_| ScalarField::constant(chart.clone(), 0.0))
            .collect(),
        rho: ScalarField::from_jet_fn(chart.clone(), {
            let e = confhol_core::expr::parse("exp(0.3*p1 - 0.2*p2)", &["p1", "p2", "p3"]).unwrap();
            move |coords| {
                let vars: Vec<confhol_core::jet::Jet3> = (0..3)
                    .map(|i| confhol_core::jet::Jet3::variable(3, i, coords[i]))
                    .collect();
                e.eval_jet(&vars).scale(rho)
            }
        }),
    };
    // Scaled section is recurrent with theta = d(0.3 p1 - 0.2 p2).
    let report = recurrent_rescale(&st.metric, &scaled, &curve, 16).unwrap();
    assert!(
        report.recurrence_residual < 1e-8,
        "recurrence {:.3e}",
        report.recurrence_residual
    );
    assert!(report.parallel_defect < 1e-8, "defect {:.3e}", report.parallel_defect);
    assert!(report.closedness_residual < 1e-7);

    // (0, 0, rho): sigma vanishes identically, rejected.
    let pure_rho = TractorField {
        sigma: ScalarField::constant(chart.clone(), 0.0),
        y: (0..3)
            .map(|_| ScalarField::constant(chart.clone(), 0.0))
            .collect(),
        rho: ScalarField::constant(chart, 1.0),
    };
    assert!(matches!(
        recurrent_rescale(&st.metric, &pure_rho, &curve, 8),
        Err(Error::SigmaVanishes(_))
    ));
}

/// F is antisymmetric in its arguments and lands in the orthogonal algebra
/// of the tractor Gram matrix.
#[test]
fn tractor_curvature_antisymmetry_and_form() {
    let st = pp_wave("y1^3 + 0.5*y2^2*sin(z)");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in sample_points(&st, 4) {
        let gram = gram_matrix(&st.metric, &p).unwrap();
        let x = DVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let y = DVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let fxy = tractor_curvature(&st.metric, &p, &x, &y).unwrap();
        let fyx = tractor_curvature(&st.metric, &p, &y, &x).unwrap();
        assert!((&fxy.m + &fyx.m).amax() < 1e-12 * fxy.m.amax().max(1.0));
        assert!(fxy.algebra_residual(&gram) < 1e-8);
    }
}

/// The section ODE coefficient divides by the manifold dimension minus two,
/// not the screen dimension minus two; n = 3 separates the two readings.
#[test]
fn section_coefficient_uses_manifold_dimension() {
    let st = zoo::build(&confhol_core::zoo::SpacetimeSpec::CahenWallach {
        n: 3,
        a: vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ],
    })
    .unwrap();
    let chart = st.metric.chart().clone();
    let d = 5usize;
    // trace a = 3; correct rate w^2 = 3/(d-2) = 1, wrong rate w^2 = 3/(n-2) = 3.
    let build = |w: f64| -> TractorField {
        let sigma = ScalarField::parse(
            chart.clone(),
            &format!("(exp({w}*z) + exp(-{w}*z))/2"),
        )
        .unwrap();
        let tau = ScalarField::parse(
            chart.clone(),
            &format!("{w}*(exp({w}*z) - exp(-{w}*z))/2"),
        )
        .unwrap();
        let mut y = vec![tau];
        for _ in 1..d {
            y.push(ScalarField::constant(chart.clone(), 0.0));
        }
        TractorField {
            sigma,
            y,
            rho: ScalarField::constant(chart.clone(), 0.0),
        }
    };
    let p = Point::new(chart.clone(), vec![0.0, 0.0, 0.0, 0.0, 0.6]).unwrap();
    let mut dir = DVector::zeros(d);
    dir[d - 1] = 1.0;
    let eval = |field: &TractorField| -> f64 {
        let tj = TractorJet::of_field(field, &p, &dir).unwrap();
        tractor_derivative(&st.metric, &p, &dir, &tj)
            .unwrap()
            .to_vector()
            .amax()
    };
    let right = eval(&build(1.0));
    let wrong = eval(&build(3.0f64.sqrt()));
    assert!(right < 1e-10, "manifold-dimension rate not parallel: {right}");
    assert!(wrong > 1e-2, "screen-dimension rate unexpectedly parallel: {wrong}");
}
