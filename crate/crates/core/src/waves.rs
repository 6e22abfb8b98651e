//! Plane-wave parallel tractor sections from their transversal ODE, and the
//! higher curvature derivatives of analytic ambient metrics over plane waves
//! used to enrich holonomy samples.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::curvature::CurvatureData;
use crate::error::{Error, Result};
use crate::geometry::{Point, ScalarField};
use crate::ode;
use crate::tractor::{Tractor, TractorField};
use crate::zoo::{Spacetime, SpacetimeSpec};

/// The two fundamental solutions of the section ODE on a z-grid.
#[derive(Debug, Clone, Serialize)]
pub struct WaveSections {
    pub z_grid: Vec<f64>,
    /// (sigma, tau) samples of the first solution, initial data (1, 0).
    pub sol1: Vec<(f64, f64)>,
    /// (sigma, tau) samples of the second solution, initial data (0, 1).
    pub sol2: Vec<(f64, f64)>,
    /// max |sigma1 tau2 - sigma2 tau1 - 1| over the grid.
    pub wronskian_drift: f64,
    /// Approximate zeros of sigma for each solution inside the grid.
    pub sigma_zeros: Vec<Vec<f64>>,
}

/// Isotropic parallel sections (sigma, tau X, 0) of a plane wave: sigma and
/// tau depend on z only and solve sigma' = tau, tau' = (a/(d-2)) sigma with
/// a = trace of the coefficient matrix and d the manifold dimension.
///
/// The sign and the d-2 denominator come from the tractor derivative formula
/// with the Schouten tensor -(a/(d-2)) dz^2 of the wave; the parallel-defect
/// checks in the tests pin this normalization against transport.
pub fn plane_wave_sections(
    st: &Spacetime,
    z_start: f64,
    z_end: f64,
    grid_points: usize,
) -> Result<WaveSections> {
    let (n, trace_jet) = wave_trace_jets(st)?;
    let d = (n + 2) as f64;
    let rhs = move |z: f64, y: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let a = trace_jet(z).v;
        // Column-wise: (sigma, tau)' = [[0, 1], [a/(d-2), 0]] (sigma, tau).
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = a / (d - 2.0);
        Ok(&m * y)
    };

    let mut z_grid = Vec::with_capacity(grid_points + 1);
    let mut fundamental = Vec::with_capacity(grid_points + 1);
    let mut current = DMatrix::identity(2, 2);
    let mut prev = z_start;
    for k in 0..=grid_points {
        let z = z_start + (z_end - z_start) * k as f64 / grid_points as f64;
        if z > prev {
            let sol = ode::integrate_linear(&rhs, current.clone(), prev, z, 1e-12, 1e-14, &[])?;
            current = sol.y;
        }
        z_grid.push(z);
        fundamental.push(current.clone());
        prev = z;
    }

    let sol1: Vec<(f64, f64)> = fundamental.iter().map(|m| (m[(0, 0)], m[(1, 0)])).collect();
    let sol2: Vec<(f64, f64)> = fundamental.iter().map(|m| (m[(0, 1)], m[(1, 1)])).collect();
    let mut wronskian_drift = 0.0f64;
    for m in &fundamental {
        let w = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        wronskian_drift = wronskian_drift.max((w - 1.0).abs());
    }
    let zeros = |sol: &[(f64, f64)]| -> Vec<f64> {
        let mut out = Vec::new();
        for k in 1..sol.len() {
            let (s0, s1) = (sol[k - 1].0, sol[k].0);
            if s0 == 0.0 {
                out.push(z_grid[k - 1]);
            } else if s0 * s1 < 0.0 {
                // Linear interpolation of the crossing.
                let t = s0 / (s0 - s1);
                out.push(z_grid[k - 1] + t * (z_grid[k] - z_grid[k - 1]));
            }
        }
        out
    };
    Ok(WaveSections {
        sigma_zeros: vec![zeros(&sol1), zeros(&sol2)],
        z_grid,
        sol1,
        sol2,
        wronskian_drift,
    })
}

/// Closed-form fundamental solutions (sigma1, tau1, sigma2, tau2) of
/// sigma'' = k sigma for constant trace a, k = a/(d-2): hyperbolic for
/// a > 0, polynomial for a = 0, trigonometric for a < 0.
pub fn constant_trace_sections(a: f64, n: usize, z_start: f64, z: f64) -> (f64, f64, f64, f64) {
    let d = (n + 2) as f64;
    let k = a / (d - 2.0);
    let dz = z - z_start;
    if k == 0.0 {
        (1.0, 0.0, dz, 1.0)
    } else if k > 0.0 {
        let w = k.sqrt();
        (
            (w * dz).cosh(),
            w * (w * dz).sinh(),
            (w * dz).sinh() / w,
            (w * dz).cosh(),
        )
    } else {
        let w = (-k).sqrt();
        (
            (w * dz).cos(),
            -w * (w * dz).sin(),
            (w * dz).sin() / w,
            (w * dz).cos(),
        )
    }
}

/// Build the two sections as tractor fields on the wave chart.
///
/// Component jets come from the ODE itself: sigma' = tau, tau' = -k sigma
/// with k = a(z)/(d-2), and higher z-derivatives follow by differentiating
/// the system with exact k-jets, so no finite differences enter.
pub fn section_fields(st: &Spacetime, z_start: f64) -> Result<[TractorField; 2]> {
    let chart = st.metric.chart().clone();
    let (n, trace_jet) = wave_trace_jets(st)?;
    let d = n + 2;
    let trace_jet = std::sync::Arc::new(trace_jet);

    let build_component = |column: usize, component: usize| -> ScalarField {
        let trace_jet = trace_jet.clone();
        ScalarField::from_jet_fn(chart.clone(), move |coords: &[f64]| {
            let dtotal = coords.len();
            let z = coords[dtotal - 1];
            let trace_jet_rhs = trace_jet.clone();
            let rhs = move |zz: f64, y: &DMatrix<f64>| -> Result<DMatrix<f64>> {
                let a = trace_jet_rhs(zz).v;
                let mut m = DMatrix::zeros(2, 2);
                m[(0, 1)] = 1.0;
                m[(1, 0)] = a / (d as f64 - 2.0);
                Ok(&m * y)
            };
            let m = if z == z_start {
                DMatrix::identity(2, 2)
            } else {
                let (a, b) = if z > z_start { (z_start, z) } else { (z, z_start) };
                let sol =
                    ode::integrate_linear(&rhs, DMatrix::identity(2, 2), a, b, 1e-12, 1e-14, &[])
                        .expect("section ODE");
                if z > z_start {
                    sol.y
                } else {
                    sol.y.try_inverse().expect("fundamental matrix invertible")
                }
            };
            let sigma = m[(0, column)];
            let tau = m[(1, column)];
            let kj = trace_jet(z);
            let denom = d as f64 - 2.0;
            let (k, kp, kpp) = (kj.v / denom, kj.d1(0) / denom, kj.d2(0, 0) / denom);
            // sigma' = tau, tau' = k sigma, and the chain of z-derivatives.
            let s1 = tau;
            let t1 = k * sigma;
            let s2 = t1;
            let t2 = kp * sigma + k * s1;
            let s3 = t2;
            let t3 = kpp * sigma + 2.0 * kp * s1 + k * s2;
            let zi = dtotal - 1;
            let mut jet = crate::jet::Jet3::constant(dtotal, if component == 0 { sigma } else { tau });
            if component == 0 {
                jet.set_d1(zi, s1);
                jet.set_d2(zi, zi, s2);
                jet.set_d3(zi, zi, zi, s3);
            } else {
                jet.set_d1(zi, t1);
                jet.set_d2(zi, zi, t2);
                jet.set_d3(zi, zi, zi, t3);
            }
            jet
        })
    };

    let x_index = st.recurrent()?.x_index;
    let dim = st.dim();
    let mut fields = Vec::new();
    for column in 0..2 {
        let sigma = build_component(column, 0);
        let tau = build_component(column, 1);
        let mut y = Vec::new();
        for i in 0..dim {
            if i == x_index {
                y.push(tau.clone());
            } else {
                y.push(ScalarField::constant(chart.clone(), 0.0));
            }
        }
        fields.push(TractorField {
            sigma,
            y,
            rho: ScalarField::constant(chart.clone(), 0.0),
        });
    }
    Ok([fields.remove(0), fields.remove(0)])
}

/// The two sections as tractors at a point.
pub fn section_tractors(st: &Spacetime, p: &Point, z_start: f64) -> Result<[Tractor; 2]> {
    let fields = section_fields(st, z_start)?;
    Ok([fields[0].value(p)?, fields[1].value(p)?])
}

type TraceJetFn = Box<dyn Fn(f64) -> crate::jet::Jet3 + Send + Sync>;

fn wave_trace_jets(st: &Spacetime) -> Result<(usize, TraceJetFn)> {
    match &st.spec {
        SpacetimeSpec::PlaneWave { n, a } => {
            let n = *n;
            let mut diagonal = Vec::new();
            for (i, row) in a.iter().enumerate() {
                diagonal.push(crate::expr::parse(&row[i], &["z"])?);
            }
            Ok((
                n,
                Box::new(move |z: f64| {
                    let var = [crate::jet::Jet3::variable(1, 0, z)];
                    let mut acc = crate::jet::Jet3::constant(1, 0.0);
                    for e in &diagonal {
                        acc = acc.add_jet(&e.eval_jet(&var));
                    }
                    acc
                }) as TraceJetFn,
            ))
        }
        SpacetimeSpec::CahenWallach { n, a } => {
            let trace: f64 = (0..*n).map(|i| a[i][i]).sum();
            let n = *n;
            Ok((
                n,
                Box::new(move |_z: f64| crate::jet::Jet3::constant(1, trace)) as TraceJetFn,
            ))
        }
        _ => Err(Error::Spec(
            "parallel sections require a plane-wave family member".into(),
        )),
    }
}

/// The two displayed higher-derivative curvature components of an analytic
/// ambient metric over a plane wave, evaluated numerically, plus the matching
/// endomorphism enrichments for holonomy spans.
#[derive(Debug, Clone)]
pub struct HigherDerivativeSamples {
    /// (nabla_{Y_i} R)(Y_j, Z, Z, Za) at the base point.
    pub first: DMatrix<f64>,
    /// (nabla_Z R)(Y_j, Z, Y_i, Za) at the base point.
    pub second: DMatrix<f64>,
    /// za * a_ij at the base point; the first component equals its negative,
    /// the second equals it.
    pub expected: DMatrix<f64>,
    /// Endomorphism samples (nabla_U R)(V, W) for the slot combinations above.
    pub endomorphisms: Vec<DMatrix<f64>>,
}

pub fn ambient_higher_derivatives(st: &Spacetime, p: &Point) -> Result<HigherDerivativeSamples> {
    let base = st
        .base
        .as_ref()
        .ok_or_else(|| Error::Spec("not an ambient construction".into()))?;
    let n = match &base.spec {
        SpacetimeSpec::PlaneWave { n, .. } | SpacetimeSpec::CahenWallach { n, .. } => *n,
        _ => {
            return Err(Error::Spec(
                "higher-derivative samples need a plane-wave base".into(),
            ))
        }
    };
    if !matches!(st.spec, SpacetimeSpec::AmbientRicciFlat { .. }) {
        return Err(Error::Spec(
            "higher-derivative samples need the lightlike ambient".into(),
        ));
    }
    let d = st.dim();
    let data = CurvatureData::new(&st.metric, p)?;
    let nr = data.nabla_riemann()?;
    // Ambient coordinate layout: (xa, x, y_1..y_n, z, za).
    let y_idx = |i: usize| 2 + i;
    let z_idx = d - 2;
    let za_idx = d - 1;
    let za = p.coords()[za_idx];

    // Base coefficient values a_ij at the base projection.
    let bp = Point::new(
        base.metric.chart().clone(),
        p.coords()[1..(d - 1)].to_vec(),
    )?;
    let base_data = CurvatureData::connection_level(&base.metric, &bp)?;
    let mut a_mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // R(Y_i, Z, Z, Y_j) = a_ij on the wave in this convention package.
            a_mat[(i, j)] = base_data.riemann.at(1 + i, n + 1, n + 1, 1 + j);
        }
    }

    let mut first = DMatrix::zeros(n, n);
    let mut second = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            first[(i, j)] = nr.at(y_idx(i), y_idx(j), z_idx, z_idx, za_idx);
            second[(i, j)] = nr.at(z_idx, y_idx(j), z_idx, y_idx(i), za_idx);
        }
    }

    // Endomorphism samples: raise the last slot of (nabla_U R)(V, W, ., .).
    let mut endos = Vec::new();
    let mut push_endo = |u: usize, v: usize, w: usize| {
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            for l in 0..d {
                let mut s = 0.0;
                for a in 0..d {
                    s += data.inv[(k, a)] * nr.at(u, v, w, l, a);
                }
                m[(k, l)] = s;
            }
        }
        endos.push(m);
    };
    for i in 0..n {
        for j in 0..n {
            push_endo(y_idx(i), y_idx(j), z_idx);
        }
        push_endo(z_idx, y_idx(i), z_idx);
    }

    Ok(HigherDerivativeSamples {
        first,
        second,
        expected: a_mat * za,
        endomorphisms: endos,
    })
}
