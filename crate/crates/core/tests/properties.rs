mod common;

use common::*;
use confhol_core::curvature::kulkarni_nomizu;
use confhol_core::geometry::Point;
use confhol_core::jet::Jet3;
use confhol_core::kform::{KForm, RingMatrix};
use confhol_core::lie::{classify_subspace, IndefiniteForm};
use confhol_core::models::corner_form;
use confhol_core::tractor::{theta_map, tractor_inner, Tractor};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn sym_matrix(d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-2.0..2.0f64, d * d).prop_map(move |v| {
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let val = v[i * d + j];
                m[(i, j)] += val;
                m[(j, i)] += val;
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The Kulkarni-Nomizu product of symmetric forms always satisfies the
    /// cyclic first identity and all curvature index symmetries.
    #[test]
    fn kulkarni_nomizu_symmetries(a in sym_matrix(4), b in sym_matrix(4)) {
        let kn = kulkarni_nomizu(&a, &b);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        prop_assert!((kn.at(i, j, k, l) + kn.at(j, i, k, l)).abs() < 1e-12);
                        prop_assert!((kn.at(i, j, k, l) + kn.at(i, j, l, k)).abs() < 1e-12);
                        prop_assert!((kn.at(i, j, k, l) - kn.at(k, l, i, j)).abs() < 1e-12);
                        let cyc = kn.at(i, j, k, l) + kn.at(j, k, i, l) + kn.at(k, i, j, l);
                        prop_assert!(cyc.abs() < 1e-12);
                    }
                }
            }
        }
    }

    /// Jet multiplication is commutative and associative through order 3.
    #[test]
    fn jet_ring_laws(vals in proptest::collection::vec(0.2..1.8f64, 3)) {
        let x = Jet3::variable(3, 0, vals[0]);
        let y = Jet3::variable(3, 1, vals[1]);
        let z = Jet3::variable(3, 2, vals[2]);
        let a = x.sin().add_jet(&y.mul_jet(&z));
        let b = z.exp().add_jet(&x);
        let c = y.add_jet(&Jet3::constant(3, 0.7));
        let ab = a.mul_jet(&b);
        let ba = b.mul_jet(&a);
        let abc1 = ab.mul_jet(&c);
        let abc2 = a.mul_jet(&b.mul_jet(&c));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    prop_assert!((ab.d3(i, j, k) - ba.d3(i, j, k)).abs() < 1e-12);
                    prop_assert!(
                        (abc1.d3(i, j, k) - abc2.d3(i, j, k)).abs()
                            < 1e-11 * abc1.v.abs().max(1.0)
                    );
                }
            }
        }
    }

    /// Subspace classification is invariant under basis recombination.
    #[test]
    fn classification_basis_invariance(coeffs in proptest::collection::vec(-1.0..1.0f64, 4)) {
        let form = corner_form(2);
        // The isotropic plane span(e0, e1) under a random invertible 2x2
        // recombination (shifted to stay away from singularity).
        let m00 = 1.5 + coeffs[0];
        let m11 = 1.5 + coeffs[3];
        let (m01, m10) = (coeffs[1], coeffs[2]);
        prop_assume!((m00 * m11 - m01 * m10).abs() > 0.2);
        let mut basis = DMatrix::zeros(6, 2);
        basis[(0, 0)] = m00;
        basis[(1, 0)] = m10;
        basis[(0, 1)] = m01;
        basis[(1, 1)] = m11;
        // Orthonormalize columns.
        let q = basis.qr().q();
        let sub = q.columns(0, 2).into_owned();
        let (class, _) = classify_subspace(&sub, &form);
        prop_assert_eq!(class, confhol_core::lie::SubspaceClass::TotallyIsotropic);
    }

    /// The derivation rule of the form action over wedge products.
    #[test]
    fn form_action_leibniz(entries in proptest::collection::vec(-1.0..1.0f64, 16),
                           cov in proptest::collection::vec(-1.0..1.0f64, 12)) {
        let gram = DMatrix::<f64>::identity(4, 4);
        let form = IndefiniteForm::new(gram).unwrap();
        // Form-compatible generator: A = M - M^T is in so(4).
        let mut a = DMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                a[(i, j)] = entries[i * 4 + j];
            }
        }
        let a = &a - &a.transpose();
        let _ = form;
        let rm = RingMatrix {
            n: 4,
            rows: (0..4).map(|i| (0..4).map(|j| a[(i, j)]).collect()).collect(),
        };
        let alpha = KForm::<f64>::wedge_of_covectors(4, &[cov[0..4].to_vec()]);
        let beta = KForm::<f64>::wedge_of_covectors(4, &[cov[4..8].to_vec(), cov[8..12].to_vec()]);
        let lhs = alpha.wedge(&beta).action(&rm);
        let rhs1 = alpha.action(&rm).wedge(&beta);
        let rhs2 = alpha.wedge(&beta.action(&rm));
        for (idx, c) in lhs.entries() {
            let r = rhs1.coeff(idx) + rhs2.coeff(idx);
            prop_assert!((c - r).abs() < 1e-10);
        }
        for (idx, c) in rhs1.entries() {
            let l = lhs.coeff(idx);
            let r = c + rhs2.coeff(idx);
            prop_assert!((l - r).abs() < 1e-10);
        }
    }

    /// Gauge-change isometry and inverse composition on random tractors.
    #[test]
    fn theta_isometry_and_inverse(vals in proptest::collection::vec(-1.0..1.0f64, 12)) {
        let st = pp_wave("y1^2");
        let psi = confhol_core::zoo::scalar_field_on(&st, "0.2*y1 - 0.1*z").unwrap();
        let g2 = st.metric.conformal_rescale(&psi);
        let p = Point::new(st.metric.chart().clone(), vec![0.1, 0.2, -0.3, 0.8]).unwrap();
        let a = Tractor::new(vals[0], DVector::from_vec(vals[1..5].to_vec()), vals[5], p.clone());
        let b = Tractor::new(vals[6], DVector::from_vec(vals[7..11].to_vec()), vals[11], p);
        let fa = theta_map(&psi, &a, &st.metric).unwrap();
        let fb = theta_map(&psi, &b, &st.metric).unwrap();
        let lhs = tractor_inner(&g2, &fa, &fb).unwrap();
        let rhs = tractor_inner(&st.metric, &a, &b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        let back = theta_map(&psi.negated(), &fa, &g2).unwrap();
        prop_assert!((back.to_vector() - a.to_vector()).amax() < 1e-12);
    }
}
