mod common;

use common::*;
use confhol_core::curvature::CurvatureData;
use confhol_core::curve::Curve;
use confhol_core::geometry::Point;
use confhol_core::tractor::{einstein_section, tractor_curvature};
use confhol_core::transport::{
    gram_residual, log_near_identity, transport_tangent, transport_tractor,
};
use confhol_core::waves;
use confhol_core::zoo::{self, SpacetimeSpec};
use nalgebra::{DMatrix, DVector};

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-12;

#[test]
fn flat_loops_transport_to_identity() {
    let st = flat_lorentz4();
    let base = st.default_base_point();
    for curve in [
        Curve::rectangle(&base, 0, 2, 0.4, 0.3),
        Curve::trig_loop(
            &base,
            vec![vec![0.2, 0.0, 0.1, 0.0]],
            vec![vec![0.0, 0.3, 0.0, 0.2]],
        ),
    ] {
        let tr = transport_tangent(&st.metric, &curve, RTOL, ATOL).unwrap();
        assert!((tr.matrix.clone() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-10);
        let tt = transport_tractor(&st.metric, &curve, RTOL, ATOL).unwrap();
        assert!((tt.matrix.clone() - DMatrix::<f64>::identity(6, 6)).amax() < 1e-10);
    }
}

#[test]
fn conformally_flat_tractor_loop_is_identity() {
    let st = flat_lorentz4();
    let phi = zoo::scalar_field_on(&st, "0.2*x1 - 0.1*x0*x3 + 0.05*x2^2").unwrap();
    let g2 = st.metric.conformal_rescale(&phi);
    let base = st.default_base_point();
    let curve = Curve::rectangle(&base, 1, 3, 0.5, 0.4);
    let tt = transport_tractor(&g2, &curve, RTOL, ATOL).unwrap();
    assert!((tt.matrix - DMatrix::<f64>::identity(6, 6)).amax() < 1e-8);
}

#[test]
fn transport_composes_and_inverts() {
    let st = sphere(3);
    let chart = st.metric.chart().clone();
    let a = Point::new(chart.clone(), vec![1.0, 1.2, 0.9]).unwrap();
    let b = Point::new(chart.clone(), vec![1.6, 0.8, 1.4]).unwrap();
    let c = Point::new(chart.clone(), vec![0.9, 1.7, 2.0]).unwrap();
    let seg1 = Curve::segment(&a, &b);
    let seg2 = Curve::segment(&b, &c);
    let both = Curve::composite(vec![seg1.clone(), seg2.clone()]);
    let t1 = transport_tangent(&st.metric, &seg1, RTOL, ATOL).unwrap();
    let t2 = transport_tangent(&st.metric, &seg2, RTOL, ATOL).unwrap();
    let t12 = transport_tangent(&st.metric, &both, RTOL, ATOL).unwrap();
    assert!((&t2.matrix * &t1.matrix - &t12.matrix).amax() < 1e-9);

    let back = transport_tangent(&st.metric, &both.reversed(), RTOL, ATOL).unwrap();
    assert!((&back.matrix * &t12.matrix - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);
}

#[test]
fn gram_preservation_bound() {
    let st = pp_wave("y1^2*y2 + sin(z)");
    let base = st.default_base_point();
    for curve in [
        Curve::rectangle(&base, 1, 3, 0.6, 0.5),
        Curve::trig_loop(
            &base,
            vec![vec![0.0, 0.3, 0.0, 0.2]],
            vec![vec![0.2, 0.0, 0.25, 0.0]],
        ),
    ] {
        let tt = transport_tractor(&st.metric, &curve, RTOL, ATOL).unwrap();
        let res = gram_residual(&st.metric, &curve, &tt).unwrap();
        assert!(
            res <= 10.0 * tt.error_estimate.max(1e-12),
            "gram residual {res} vs error estimate {}",
            tt.error_estimate
        );
    }
}

/// Small rectangle loops recover the curvature: averaging the loop log with
/// the log of its point-reflected twin kills the odd orders, and the
/// estimator log(transport)/area converges to -F(e_i, e_j) at second order
/// in the side length.
#[test]
fn small_loop_curvature_recovery() {
    let st = cahen_wallach([[1.0, 0.3], [0.3, -0.6]]);
    let base = st.default_base_point();
    let (i, j) = (1usize, 3usize);
    let mut ei = DVector::zeros(4);
    ei[i] = 1.0;
    let mut ej = DVector::zeros(4);
    ej[j] = 1.0;
    let f = tractor_curvature(&st.metric, &base, &ei, &ej).unwrap();

    let recover = |eps: f64| -> DMatrix<f64> {
        let t_pp = transport_tractor(
            &st.metric,
            &Curve::rectangle(&base, i, j, eps, eps),
            1e-12,
            1e-14,
        )
        .unwrap();
        let t_mm = transport_tractor(
            &st.metric,
            &Curve::rectangle(&base, i, j, -eps, -eps),
            1e-12,
            1e-14,
        )
        .unwrap();
        (log_near_identity(&t_pp.matrix).unwrap() + log_near_identity(&t_mm.matrix).unwrap())
            / (2.0 * eps * eps)
    };
    let e1 = (recover(0.1) + &f.m).amax();
    let e2 = (recover(0.05) + &f.m).amax();
    assert!(
        e1 < 0.01 * f.m.amax().max(1.0),
        "recovery at eps=0.1 off by {e1}"
    );
    // Convergence order >= 2: halving eps cuts the defect by >= ~3.2x.
    assert!(
        e2 < e1 / 3.2,
        "convergence too slow: {e1} -> {e2} (ratio {})",
        e1 / e2
    );

    // Tangent mode: the same estimator recovers -R(e_i, e_j).
    let data = CurvatureData::connection_level(&st.metric, &base).unwrap();
    let r_endo = data.curvature_endomorphism(&ei, &ej);
    let eps = 0.05;
    let t_pp = transport_tangent(
        &st.metric,
        &Curve::rectangle(&base, i, j, eps, eps),
        1e-12,
        1e-14,
    )
    .unwrap();
    let t_mm = transport_tangent(
        &st.metric,
        &Curve::rectangle(&base, i, j, -eps, -eps),
        1e-12,
        1e-14,
    )
    .unwrap();
    let log = (log_near_identity(&t_pp.matrix).unwrap()
        + log_near_identity(&t_mm.matrix).unwrap())
        / (2.0 * eps * eps);
    assert!((log + &r_endo).amax() < 0.001 * r_endo.amax().max(1.0));
}

/// Transport on the lightlike ambient over a curved base, along a loop inside
/// the base slice: block structure [[1, a, *], [0, P_base, *], [0, 0, 1]] in
/// the coordinate frame, with the middle block the base transport.
#[test]
fn ambient_transport_block_form() {
    let st = ambient_over_sphere2();
    let base_st = st.base.as_ref().unwrap();
    // Loop in the slice xa = 0, za = 1.
    let p = Point::new(st.metric.chart().clone(), vec![0.0, 1.0, 1.2, 1.0]).unwrap();
    let loop_in_slice = Curve::rectangle(&p, 1, 2, 0.5, 0.4);
    let tr = transport_tangent(&st.metric, &loop_in_slice, RTOL, ATOL).unwrap();
    let m = &tr.matrix;
    // Rows: xa mixes with everything; base rows only with base; za row trivial.
    assert!((m[(0, 0)] - 1.0).abs() < 1e-9);
    assert!((m[(3, 3)] - 1.0).abs() < 1e-9);
    for c in 0..3 {
        assert!(m[(3, c)].abs() < 1e-9, "za row must be trivial");
    }
    assert!(m[(1, 0)].abs() < 1e-9 && m[(2, 0)].abs() < 1e-9);

    // Middle block equals the base transport of the same loop.
    let bp = Point::new(base_st.metric.chart().clone(), vec![1.0, 1.2]).unwrap();
    let base_loop = Curve::rectangle(&bp, 0, 1, 0.5, 0.4);
    let tb = transport_tangent(&base_st.metric, &base_loop, RTOL, ATOL).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!((m[(1 + i, 1 + j)] - tb.matrix[(i, j)]).abs() < 1e-8);
        }
    }
}

#[test]
fn ambient_over_flat_base_is_flat() {
    let st = zoo::build(&SpacetimeSpec::AmbientRicciFlat {
        base: Box::new(SpacetimeSpec::Flat {
            dim: 2,
            time_dims: 0,
        }),
    })
    .unwrap();
    let base = st.default_base_point();
    for p in sample_points(&st, 10) {
        let r = confhol_core::curvature::riemann(&st.metric, &p).unwrap();
        assert!(r.max_abs() < 1e-10);
    }
    let curve = Curve::rectangle(&base, 0, 3, 0.5, 0.3);
    let tr = transport_tangent(&st.metric, &curve, RTOL, ATOL).unwrap();
    assert!((tr.matrix - DMatrix::<f64>::identity(4, 4)).amax() < 1e-9);
}

/// The canonical section of an Einstein gauge is fixed by loop transports.
#[test]
fn einstein_canonical_section_is_loop_invariant() {
    let st = sphere(3);
    let base = st.default_base_point();
    let section = einstein_section(&st.metric, &base).unwrap().to_vector();
    for curve in [
        Curve::rectangle(&base, 0, 1, 0.5, 0.4),
        Curve::rectangle(&base, 1, 2, 0.35, 0.5),
    ] {
        let tt = transport_tractor(&st.metric, &curve, RTOL, ATOL).unwrap();
        let defect = (&tt.matrix * &section - &section).amax();
        assert!(defect < 1e-7, "canonical section moved by {defect}");
    }
}

/// The ODE-built wave sections are fixed by loop transports, and for constant
/// coefficients they match the closed forms.
#[test]
fn wave_sections_parallel_and_closed_form() {
    let st = cahen_wallach([[0.8, 0.0], [0.0, 0.4]]);
    let base = st.default_base_point();
    let z0 = base.coords()[3];
    let tractors = waves::section_tractors(&st, &base, z0).unwrap();
    // Isotropy of both sections.
    for t in &tractors {
        let norm = confhol_core::tractor::tractor_inner(&st.metric, t, t).unwrap();
        assert!(norm.abs() < 1e-10);
    }
    for curve in [
        Curve::rectangle(&base, 0, 3, 0.4, 0.5),
        Curve::rectangle(&base, 1, 3, 0.5, 0.4),
        Curve::trig_loop(
            &base,
            vec![vec![0.2, 0.1, 0.0, 0.2]],
            vec![vec![0.0, 0.2, 0.1, 0.0]],
        ),
    ] {
        let tt = transport_tractor(&st.metric, &curve, RTOL, ATOL).unwrap();
        for t in &tractors {
            let v = t.to_vector();
            let defect = (&tt.matrix * &v - &v).amax();
            assert!(defect < 1e-6, "section moved by {defect}");
        }
    }

    // Closed forms for constant trace a = 1.2 on a z-grid.
    let sections = waves::plane_wave_sections(&st, z0, z0 + 1.0, 16).unwrap();
    assert!(sections.wronskian_drift < 1e-10);
    for (k, &z) in sections.z_grid.iter().enumerate() {
        let (s1, t1, s2, t2) = waves::constant_trace_sections(1.2, 2, z0, z);
        assert!((sections.sol1[k].0 - s1).abs() < 1e-9);
        assert!((sections.sol1[k].1 - t1).abs() < 1e-9);
        assert!((sections.sol2[k].0 - s2).abs() < 1e-9);
        assert!((sections.sol2[k].1 - t2).abs() < 1e-9);
    }
}

#[test]
fn zero_potential_sections_are_polynomial() {
    let st = cahen_wallach([[0.0, 0.0], [0.0, 0.0]]);
    let base = st.default_base_point();
    let z0 = base.coords()[3];
    let sections = waves::plane_wave_sections(&st, z0, z0 + 2.0, 8).unwrap();
    for (k, &z) in sections.z_grid.iter().enumerate() {
        assert!((sections.sol1[k].0 - 1.0).abs() < 1e-12);
        assert!((sections.sol1[k].1).abs() < 1e-12);
        assert!((sections.sol2[k].0 - (z - z0)).abs() < 1e-12);
        assert!((sections.sol2[k].1 - 1.0).abs() < 1e-12);
    }
}

/// The parallel coordinate field of the Einstein ambient really is parallel.
#[test]
fn einstein_ambient_parallel_field() {
    let st = zoo::build(&SpacetimeSpec::AmbientEinstein {
        base: Box::new(SpacetimeSpec::EinsteinModel {
            kind: zoo::EinsteinKind::Sphere,
            dim: 2,
        }),
    })
    .unwrap();
    let idx = st.parallel_coord.unwrap();
    let base = st.default_base_point();
    let mut v = DVector::zeros(4);
    v[idx] = 1.0;
    for curve in [
        Curve::rectangle(&base, 0, 1, 0.3, 0.4),
        Curve::rectangle(&base, 1, 2, 0.5, 0.5),
    ] {
        let tr = transport_tangent(&st.metric, &curve, RTOL, ATOL).unwrap();
        assert!((&tr.matrix * &v - &v).amax() < 1e-7);
    }
    // Useful length sign: over the sphere base (S > 0) the parallel field is
    // timelike in this construction.
    let gm = st.metric.eval(&base).unwrap();
    assert!(gm[(idx, idx)] < 0.0);

    // Over a hyperbolic base (S < 0) it is spacelike.
    let st2 = zoo::build(&SpacetimeSpec::AmbientEinstein {
        base: Box::new(SpacetimeSpec::EinsteinModel {
            kind: zoo::EinsteinKind::Hyperbolic,
            dim: 3,
        }),
    })
    .unwrap();
    let idx2 = st2.parallel_coord.unwrap();
    let gm2 = st2.metric.eval(&st2.default_base_point()).unwrap();
    assert!(gm2[(idx2, idx2)] > 0.0);
}

#[test]
fn ambient_christoffel_table() {
    let st = ambient_over_sphere2();
    for p in sample_points(&st, 20) {
        let res = zoo::ambient_christoffel_residual(&st, &p).unwrap();
        assert!(res < 1e-12, "Christoffel table residual {res}");
    }
}

#[test]
fn cahen_wallach_is_locally_symmetric() {
    let st = cahen_wallach([[1.0, 0.2], [0.2, -0.7]]);
    let pts = sample_points(&st, 8);
    let res = zoo::nabla_riemann_residual(&st, &pts).unwrap();
    assert!(res < 1e-7, "nabla R residual {res}");
    // A z-dependent plane wave is not symmetric.
    let st2 = plane_wave([["sin(z)", "0"], ["0", "1"]]);
    let pts2 = sample_points(&st2, 8);
    assert!(zoo::nabla_riemann_residual(&st2, &pts2).unwrap() > 1e-3);
}

/// Higher derivatives of the analytic ambient over a plane wave: the two
/// displayed components evaluate to -za*a_ij and +za*a_ij.
#[test]
fn ambient_higher_derivative_values() {
    let st = zoo::build(&SpacetimeSpec::AmbientRicciFlat {
        base: Box::new(SpacetimeSpec::CahenWallach {
            n: 2,
            a: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        }),
    })
    .unwrap();
    let p = Point::new(
        st.metric.chart().clone(),
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    let hd = waves::ambient_higher_derivatives(&st, &p).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let a_ij = if i == j { 1.0 } else { 0.0 };
            assert!((hd.expected[(i, j)] - a_ij).abs() < 1e-10);
            assert!(
                (hd.first[(i, j)] + a_ij).abs() < 1e-7,
                "first component ({i},{j}) = {}",
                hd.first[(i, j)]
            );
            assert!(
                (hd.second[(i, j)] - a_ij).abs() < 1e-7,
                "second component ({i},{j}) = {}",
                hd.second[(i, j)]
            );
        }
    }
    // Zero coefficients give zero everywhere.
    let st0 = zoo::build(&SpacetimeSpec::AmbientRicciFlat {
        base: Box::new(SpacetimeSpec::CahenWallach {
            n: 2,
            a: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        }),
    })
    .unwrap();
    let p0 = Point::new(
        st0.metric.chart().clone(),
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    let hd0 = waves::ambient_higher_derivatives(&st0, &p0).unwrap();
    assert!(hd0.first.amax() < 1e-12 && hd0.second.amax() < 1e-12);
}

/// Zero sets of sigma are reported: the second fundamental solution vanishes
/// at the anchor, and trigonometric solutions cross inside the window.
#[test]
fn section_sigma_zero_sets() {
    let st = cahen_wallach([[0.8, 0.0], [0.0, 0.4]]);
    let z0 = 1.0;
    let sections = waves::plane_wave_sections(&st, z0, z0 + 2.0, 64).unwrap();
    assert!(sections.sigma_zeros[0].is_empty(), "cosh never vanishes");
    assert_eq!(sections.sigma_zeros[1].len(), 1);
    assert!((sections.sigma_zeros[1][0] - z0).abs() < 1e-12);

    // Negative trace: trigonometric solutions with zeros inside the window.
    let st = cahen_wallach([[-2.0, 0.0], [0.0, -2.0]]);
    let sections = waves::plane_wave_sections(&st, z0, z0 + 3.0, 256).unwrap();
    // sigma1 = cos(w (z - z0)) with w = sqrt(2): zeros at z0 + pi/(2w), ...
    let w = 2.0f64.sqrt();
    assert!(!sections.sigma_zeros[0].is_empty());
    assert!((sections.sigma_zeros[0][0] - (z0 + std::f64::consts::FRAC_PI_2 / w)).abs() < 1e-3);
}
