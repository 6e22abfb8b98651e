//! Recognizers for the curvature conditions of wave-type metrics: the
//! quadratic trace condition, the screen-to-null condition with its
//! skew-symmetrisation equivalent, the reconstruction and quartic-trace
//! equivalents, Ricci isotropy, the closedness certificate for rescaling a
//! recurrent field to a parallel one, and the invariance of the isotropic
//! tractor sub-bundle.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::{tensor_scale, CurvatureData};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::tractor::{tractor_derivative, TractorField, TractorJet};
use crate::zoo::Spacetime;

pub const TRACE_CONDITION_TOL: f64 = 1e-8;
pub const PR_CONDITION_TOL: f64 = 1e-8;
pub const RICCI_ISO_TOL: f64 = 1e-8;
pub const CLOSEDNESS_TOL: f64 = 1e-7;
pub const SUBBUNDLE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct TraceConditionReport {
    /// max |tr_(3,5)(4,6) (R (x) R)| over all slots.
    pub residual: f64,
    pub threshold: f64,
    pub verdict: bool,
}

/// Quadratic trace condition: tr_(3,5)(4,6)(R (x) R) = 0.
pub fn pp_trace_condition(st: &Spacetime, p: &Point) -> Result<TraceConditionReport> {
    st.recurrent()?;
    let data = CurvatureData::connection_level(&st.metric, p)?;
    let d = data.dim;
    let r = &data.riemann;
    let scale = tensor_scale(r.max_abs());
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            for c in 0..d {
                                for e in 0..d {
                                    s += data.inv[(a, b)]
                                        * data.inv[(c, e)]
                                        * r.at(i, j, a, c)
                                        * r.at(b, e, k, l);
                                }
                            }
                        }
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    let threshold = TRACE_CONDITION_TOL * scale * scale;
    Ok(TraceConditionReport {
        residual: worst,
        threshold,
        verdict: worst < threshold,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PrConditionReport {
    /// max |R(E_i, E_j, ., .)| in the adapted frame.
    pub screen_residual: f64,
    /// max |R(X, E_i, ., .)| in the adapted frame (vanishes for any recurrent field).
    pub x_residual: f64,
    /// max of the cyclic skew-symmetrisation of xi (x) R.
    pub skew_residual: f64,
    pub threshold: f64,
    pub verdict: bool,
    /// The two characterizations agree.
    pub consistent: bool,
}

/// Screen-to-null condition R(Y1, Y2) = 0 for Y1, Y2 orthogonal to X,
/// together with the equivalent cyclic skew-symmetrisation of xi (x) R.
pub fn pr_condition(st: &Spacetime, p: &Point) -> Result<PrConditionReport> {
    let rec = st.recurrent()?;
    let data = CurvatureData::connection_level(&st.metric, p)?;
    let d = data.dim;
    let frame = rec.adapted_frame(&st.metric, p)?;
    let r = &data.riemann;
    let scale = tensor_scale(r.max_abs());

    // Frame-transformed curvature R(F_a, F_b, F_c, F_e).
    let rf = |a: usize, b: usize, c: usize, e: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        s += r.at(i, j, k, l)
                            * frame[(i, a)]
                            * frame[(j, b)]
                            * frame[(k, c)]
                            * frame[(l, e)];
                    }
                }
            }
        }
        s
    };
    let mut screen_residual = 0.0f64;
    for a in 1..=(d - 2) {
        for b in 1..=(d - 2) {
            for c in 0..d {
                for e in 0..d {
                    screen_residual = screen_residual.max(rf(a, b, c, e).abs());
                }
            }
        }
    }
    let mut x_residual = 0.0f64;
    for b in 0..(d - 1) {
        for c in 0..d {
            for e in 0..d {
                x_residual = x_residual.max(rf(0, b, c, e).abs());
            }
        }
    }

    // Cyclic skew-symmetrisation of xi (x) R over the first three slots,
    // xi = g(X, .).
    let mut x_vec = DVector::zeros(d);
    x_vec[rec.x_index] = 1.0;
    let xi = &data.g * &x_vec;
    let mut skew_residual = 0.0f64;
    for u in 0..d {
        for v in 0..d {
            for w in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let s = xi[u] * r.at(v, w, a, b)
                            + xi[v] * r.at(w, u, a, b)
                            + xi[w] * r.at(u, v, a, b);
                        skew_residual = skew_residual.max(s.abs());
                    }
                }
            }
        }
    }

    let threshold = PR_CONDITION_TOL * scale;
    let verdict = screen_residual < threshold;
    let skew_verdict = skew_residual < threshold;
    Ok(PrConditionReport {
        screen_residual,
        x_residual,
        skew_residual,
        threshold,
        verdict,
        consistent: verdict == skew_verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RicciIsotropyReport {
    /// max |Ric(E_i, .)| and |Ric(X, .)| in the adapted frame.
    pub perp_residual: f64,
    /// max |Ric(X, V)| over V orthogonal to X; vanishes for every recurrent
    /// field, isotropic or not.
    pub x_row_residual: f64,
    pub scalar_abs: f64,
    /// max |<Ric(U), Ric(V)>| over frame pairs (the image-isotropy Gram).
    pub image_gram_residual: f64,
    pub threshold: f64,
    pub verdict: bool,
    /// The direct characterization and the image-isotropy one agree.
    pub consistent: bool,
}

/// Ricci isotropy: the image of the Ricci endomorphism is totally isotropic,
/// equivalently Ric(Y, .) = 0 for every Y orthogonal to X.
pub fn ricci_isotropy(st: &Spacetime, p: &Point) -> Result<RicciIsotropyReport> {
    let rec = st.recurrent()?;
    let data = CurvatureData::connection_level(&st.metric, p)?;
    let d = data.dim;
    let frame = rec.adapted_frame(&st.metric, p)?;
    let ric_f = frame.transpose() * &data.ricci * &frame;
    let scale = tensor_scale(data.ricci.amax().max(data.riemann.max_abs()));

    let mut perp_residual = 0.0f64;
    for a in 0..=(d - 2) {
        // X and the screen directions span the orthogonal complement of X.
        for b in 0..d {
            perp_residual = perp_residual.max(ric_f[(a, b)].abs());
        }
    }
    let mut x_row_residual = 0.0f64;
    for b in 0..=(d - 2) {
        x_row_residual = x_row_residual.max(ric_f[(0, b)].abs());
    }

    // <Ric(U), Ric(V)> = (Ric g^{-1} Ric)_{uv}.
    let image_gram = &data.ricci * &data.inv * &data.ricci;
    let image_gram_residual = image_gram.amax();

    let threshold = RICCI_ISO_TOL * scale;
    let verdict = perp_residual < threshold;
    let gram_verdict = image_gram_residual < RICCI_ISO_TOL * scale * scale.max(1.0);
    Ok(RicciIsotropyReport {
        perp_residual,
        x_row_residual,
        scalar_abs: data.scalar.abs(),
        image_gram_residual,
        threshold,
        verdict,
        consistent: verdict == gram_verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosednessReport {
    /// max |d theta| over the sampled points.
    pub dtheta_residual: f64,
    pub threshold: f64,
    pub applicable: bool,
    pub verdict: bool,
    /// Rescaling exponent along the transversal coordinate at the samples.
    pub rescale_exponent: Vec<f64>,
}

/// For a screen-to-null metric with isotropic Ricci tensor, certify that the
/// recurrence form is closed (so the recurrent field rescales to a parallel
/// one) and emit the rescaling exponent along a transversal segment.
pub fn parallelizability(st: &Spacetime, points: &[Point]) -> Result<ClosednessReport> {
    let rec = st.recurrent()?;
    let pr_ok = points
        .iter()
        .map(|p| pr_condition(st, p))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|r| r.verdict);
    if !pr_ok {
        return Err(Error::NotPrWave(
            "curvature does not map the orthogonal complement into the line".into(),
        ));
    }
    let iso_ok = points
        .iter()
        .map(|p| ricci_isotropy(st, p))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|r| r.verdict);

    // theta = (f_x / 2) dz, so d theta = (1/2)(f_xx dx + f_xyi dyi) ^ dz;
    // both factors come from the metric jets directly.
    let d = st.dim();
    let z = d - 1;
    let x = rec.x_index;
    let mut worst = 0.0f64;
    for p in points {
        let mj = st.metric.jets(p)?;
        for i in 0..d {
            if i == z {
                continue;
            }
            // d theta (e_i, e_z) = d_i theta_z; theta_i = 0 for i != z.
            let dtheta = 0.5 * mj.d2g(i, x, z, z);
            worst = worst.max(dtheta.abs());
        }
    }

    // Rescaling exponent u with du = theta, integrated along a transversal
    // segment through the first sample (trapezoid on a fine grid).
    let mut exponents = Vec::new();
    if let Some(p0) = points.first() {
        let steps = 32;
        let half_span = 0.3;
        let mut acc = 0.0;
        let mut prev_theta_z: Option<f64> = None;
        for k in 0..=steps {
            let dz = -half_span + (2.0 * half_span) * k as f64 / steps as f64;
            let q = p0.shifted(z, dz)?;
            let theta_z = rec.theta(&q)?[z];
            if let Some(prev) = prev_theta_z {
                acc += 0.5 * (prev + theta_z) * (2.0 * half_span / steps as f64);
            }
            prev_theta_z = Some(theta_z);
            if k % 8 == 0 {
                exponents.push(acc);
            }
        }
    }
    Ok(ClosednessReport {
        dtheta_residual: worst,
        threshold: CLOSEDNESS_TOL,
        applicable: iso_ok,
        verdict: iso_ok && worst < CLOSEDNESS_TOL,
        rescale_exponent: exponents,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubbundleReport {
    /// max norm of the derivative components outside (sigma, X-line, 0).
    pub invariance_residual: f64,
    pub threshold: f64,
    pub verdict: bool,
    pub directions_tested: usize,
}

/// Invariance of the isotropic rank-2 tractor sub-bundle spanned by the
/// sigma slot and the recurrent direction: derivatives of sections
/// (sigma, tau X, 0) must stay in that span.
pub fn subbundle_invariance(st: &Spacetime, points: &[Point]) -> Result<SubbundleReport> {
    let rec = st.recurrent()?;
    for p in points {
        let iso = ricci_isotropy(st, p)?;
        if !iso.verdict {
            return Err(Error::HypothesisFailed(format!(
                "Ricci tensor is not isotropic at {:?} (residual {:.3e})",
                p.coords(),
                iso.perp_residual
            )));
        }
    }
    let d = st.dim();
    let chart = st.metric.chart().clone();
    let names = chart.coord_names();
    let z_name = names[d - 1];
    // Section components with genuine z-dependence to exercise the derivative.
    let sigma = crate::geometry::ScalarField::parse(chart.clone(), &format!("1 + 0.3*{z_name}"))?;
    let tau_src = format!("0.7 - 0.2*{z_name}");
    let mut y_fields = Vec::new();
    for i in 0..d {
        if i == rec.x_index {
            y_fields.push(crate::geometry::ScalarField::parse(chart.clone(), &tau_src)?);
        } else {
            y_fields.push(crate::geometry::ScalarField::constant(chart.clone(), 0.0));
        }
    }
    let field = TractorField {
        sigma,
        y: y_fields,
        rho: crate::geometry::ScalarField::constant(chart.clone(), 0.0),
    };

    let mut worst = 0.0f64;
    let mut tested = 0usize;
    for p in points {
        for dir_idx in 0..d {
            let mut dir = DVector::zeros(d);
            dir[dir_idx] = 1.0;
            let tj = TractorJet::of_field(&field, p, &dir)?;
            let dt = tractor_derivative(&st.metric, p, &dir, &tj)?;
            // Outside pattern: middle components off the X line, and rho.
            for k in 0..d {
                if k != rec.x_index {
                    worst = worst.max(dt.y[k].abs());
                }
            }
            worst = worst.max(dt.rho.abs());
            tested += 1;
        }
    }
    Ok(SubbundleReport {
        invariance_residual: worst,
        threshold: SUBBUNDLE_TOL,
        verdict: worst < SUBBUNDLE_TOL,
        directions_tested: tested,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub trace_condition: bool,
    pub simple_condition: bool,
    pub skew_condition: bool,
    pub reconstruction: bool,
    pub quartic_trace: bool,
    pub all_consistent: bool,
    pub reconstruction_residual: f64,
    pub quartic_residual: f64,
}

/// The battery of equivalent wave characterizations at a point: the quadratic
/// trace condition, the screen-to-null condition, the skew-symmetrisation,
/// curvature reconstruction from xi (x) r (x) xi, and the quartic trace
/// proportionality; consistency of all verdicts is reported.
pub fn equivalence_battery(st: &Spacetime, p: &Point) -> Result<EquivalenceReport> {
    let rec = st.recurrent()?;
    let trace = pp_trace_condition(st, p)?;
    let pr = pr_condition(st, p)?;
    let data = CurvatureData::connection_level(&st.metric, p)?;
    let d = data.dim;
    let r = &data.riemann;
    let scale = tensor_scale(r.max_abs());
    let mut x_vec = DVector::zeros(d);
    x_vec[rec.x_index] = 1.0;
    let xi = &data.g * &x_vec;

    // Reconstruction: least squares fit of a symmetric r in
    // R = T(u,v,a,b) - T(v,u,a,b) - T(u,v,b,a) + T(v,u,b,a),
    // T(u,v,a,b) = xi_u r_va xi_b.
    let n_sym = d * (d + 1) / 2;
    let sym_idx = |i: usize, j: usize| -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * d - i * (i + 1) / 2 + j
    };
    let mut design = DMatrix::zeros(d * d * d * d, n_sym);
    let mut target = DVector::zeros(d * d * d * d);
    for u in 0..d {
        for v in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let row = ((u * d + v) * d + a) * d + b;
                    target[row] = r.at(u, v, a, b);
                    // coefficient of r_{pq} (p <= q): gather the four terms.
                    let mut add = |p: usize, q: usize, c: f64| {
                        let col = sym_idx(p, q);
                        design[(row, col)] += c;
                    };
                    // xi_u r_va xi_b
                    add(v, a, xi[u] * xi[b]);
                    // - xi_v r_ua xi_b
                    add(u, a, -xi[v] * xi[b]);
                    // - xi_u r_vb xi_a
                    add(v, b, -xi[u] * xi[a]);
                    // + xi_v r_ub xi_a
                    add(u, b, xi[v] * xi[a]);
                }
            }
        }
    }
    let svd = design.svd(true, true);
    let fit = svd
        .solve(&target, 1e-12)
        .map_err(|e| Error::Spec(e.to_string()))?;
    let mut recon_residual = 0.0f64;
    {
        let mut reconstructed = vec![0.0; d * d * d * d];
        for u in 0..d {
            for v in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let row = ((u * d + v) * d + a) * d + b;
                        let mut s = 0.0;
                        for p in 0..d {
                            for q in p..d {
                                let col = sym_idx(p, q);
                                let mut coeff = 0.0;
                                if v == p && a == q || v == q && a == p {
                                    coeff += xi[u] * xi[b];
                                }
                                if u == p && a == q || u == q && a == p {
                                    coeff -= xi[v] * xi[b];
                                }
                                if v == p && b == q || v == q && b == p {
                                    coeff -= xi[u] * xi[a];
                                }
                                if u == p && b == q || u == q && b == p {
                                    coeff += xi[v] * xi[a];
                                }
                                s += coeff * fit[col];
                            }
                        }
                        reconstructed[row] = s;
                        recon_residual =
                            recon_residual.max((s - r.at(u, v, a, b)).abs());
                    }
                }
            }
        }
    }
    let reconstruction = recon_residual < PR_CONDITION_TOL * scale;

    // Quartic trace: tr_(1,5)(4,8)(R (x) R) = rho xi^4, rho fitted.
    let mut t2 = vec![0.0; d * d * d * d];
    let mut dot_txi = 0.0;
    let mut dot_xixi = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            for c in 0..d {
                                for e in 0..d {
                                    s += data.inv[(a, b)]
                                        * data.inv[(c, e)]
                                        * r.at(a, i, j, c)
                                        * r.at(b, k, l, e);
                                }
                            }
                        }
                    }
                    let row = ((i * d + j) * d + k) * d + l;
                    t2[row] = s;
                    let basis = xi[i] * xi[j] * xi[k] * xi[l];
                    dot_txi += s * basis;
                    dot_xixi += basis * basis;
                }
            }
        }
    }
    let rho = if dot_xixi > 0.0 { dot_txi / dot_xixi } else { 0.0 };
    let mut quartic_residual = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let row = ((i * d + j) * d + k) * d + l;
                    quartic_residual = quartic_residual
                        .max((t2[row] - rho * xi[i] * xi[j] * xi[k] * xi[l]).abs());
                }
            }
        }
    }
    let quartic = quartic_residual < TRACE_CONDITION_TOL * scale * scale;

    let skew = pr.skew_residual < PR_CONDITION_TOL * scale;
    // For a parallel X all five characterizations are equivalent; with a
    // recurrent non-parallel X only the screen-to-null and skew conditions
    // are, and the trace conditions may genuinely fail.
    let all_consistent = if rec.parallel {
        let first = trace.verdict;
        [pr.verdict, skew, reconstruction, quartic]
            .iter()
            .all(|&v| v == first)
    } else {
        pr.verdict == skew
    };

    Ok(EquivalenceReport {
        trace_condition: trace.verdict,
        simple_condition: pr.verdict,
        skew_condition: skew,
        reconstruction,
        quartic_trace: quartic,
        all_consistent,
        reconstruction_residual: recon_residual,
        quartic_residual,
    })
}
