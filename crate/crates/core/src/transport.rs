//! Parallel transport of tangent vectors and tractors along curves, loop
//! ensembles, curvature-conjugation sampling, and numerical holonomy-algebra
//! spans.
//!
//! Holonomy here is sampled, never proven: a span gives a numerical lower
//! bound on the algebra dimension, reported together with the singular-value
//! spectrum and checked for stability under refinement.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{tensor_scale, CurvatureData};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::geometry::{MetricField, Point};
use crate::ode;
use crate::tractor;

pub const SVD_THRESHOLD_REL: f64 = 1e-6;
pub const GRAM_RESIDUAL_FACTOR: f64 = 10.0;
pub const SPAN_ZERO_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransportMode {
    Tangent,
    Tractor,
}

#[derive(Debug, Clone)]
pub struct TransportResult {
    pub matrix: DMatrix<f64>,
    pub steps: usize,
    pub error_estimate: f64,
    pub mode: TransportMode,
}

fn point_on(curve: &Curve, t: f64) -> Result<Point> {
    Point::new(curve.chart().clone(), curve.position(t)).map_err(|_| Error::DomainExit(t))
}

/// Solve v'^k + Γ^k_ij γ'^i v^j = 0 for the full frame; returns the
/// transport matrix from the start fiber to the end fiber.
pub fn transport_tangent(
    g: &MetricField,
    curve: &Curve,
    rtol: f64,
    atol: f64,
) -> Result<TransportResult> {
    let d = g.dim();
    let rhs = |t: f64, m: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let p = point_on(curve, t)?;
        let vel = DVector::from_vec(curve.velocity(t));
        let gamma = crate::curvature::christoffel(g, &p)?;
        let mut a = DMatrix::zeros(d, d);
        for k in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for i in 0..d {
                    s += gamma.at(k, i, j) * vel[i];
                }
                a[(k, j)] = -s;
            }
        }
        Ok(&a * m)
    };
    let sol = ode::integrate_linear(
        &rhs,
        DMatrix::identity(d, d),
        0.0,
        1.0,
        rtol,
        atol,
        &curve.breakpoints(),
    )?;
    Ok(TransportResult {
        matrix: sol.y,
        steps: sol.steps,
        error_estimate: sol.error_estimate,
        mode: TransportMode::Tangent,
    })
}

/// Parallel transport of the tractor connection; a (d+2)x(d+2) matrix.
pub fn transport_tractor(
    g: &MetricField,
    curve: &Curve,
    rtol: f64,
    atol: f64,
) -> Result<TransportResult> {
    let d = g.dim();
    if d < 3 {
        return Err(Error::Dimension {
            required: 3,
            actual: d,
        });
    }
    let rhs = |t: f64, m: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let p = point_on(curve, t)?;
        let vel = DVector::from_vec(curve.velocity(t));
        let data = CurvatureData::connection_level(g, &p)?;
        let b = tractor::transport_matrix(&data, &vel);
        Ok(&b * m)
    };
    let sol = ode::integrate_linear(
        &rhs,
        DMatrix::identity(d + 2, d + 2),
        0.0,
        1.0,
        rtol,
        atol,
        &curve.breakpoints(),
    )?;
    Ok(TransportResult {
        matrix: sol.y,
        steps: sol.steps,
        error_estimate: sol.error_estimate,
        mode: TransportMode::Tractor,
    })
}

/// ‖P' G_end P - G_start‖ for a transport along `curve`.
pub fn gram_residual(g: &MetricField, curve: &Curve, res: &TransportResult) -> Result<f64> {
    let start = point_on(curve, 0.0)?;
    let end = point_on(curve, 1.0)?;
    let (g0, g1) = match res.mode {
        TransportMode::Tangent => (g.eval(&start)?, g.eval(&end)?),
        TransportMode::Tractor => (
            tractor::gram_matrix(g, &start)?,
            tractor::gram_matrix(g, &end)?,
        ),
    };
    Ok((res.matrix.transpose() * g1 * &res.matrix - g0).amax())
}

/// Matrix logarithm by the power series, valid near the identity.
pub fn log_near_identity(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    let e = m - DMatrix::<f64>::identity(n, n);
    if e.norm() > 0.8 {
        return None;
    }
    let mut term = e.clone();
    let mut acc = e.clone();
    for k in 2..80 {
        term = &term * &e;
        let add = &term * (if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64);
        acc += &add;
        if term.norm() < 1e-18 {
            break;
        }
    }
    Some(acc)
}

/// Options for loop ensembles and span extraction.
#[derive(Debug, Clone)]
pub struct EnsembleOptions {
    /// Largest rectangle side, per coordinate, as a fraction of the usable extent.
    pub rect_fraction: f64,
    /// Number of random smooth loops.
    pub n_random: usize,
    /// Number of lasso path endpoints for curvature conjugation.
    pub n_lasso: usize,
    pub seed: u64,
    pub rtol: f64,
    pub atol: f64,
    pub svd_threshold: f64,
    /// Close the span under commutators before reporting.
    pub commutator_closure: bool,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            rect_fraction: 0.5,
            n_random: 32,
            n_lasso: 8,
            seed: 7,
            rtol: ode::RK_RTOL,
            atol: ode::RK_ATOL,
            svd_threshold: SVD_THRESHOLD_REL,
            commutator_closure: false,
        }
    }
}

/// Usable half-extent around the base point in each coordinate.
fn extents(base: &Point) -> Vec<f64> {
    base.coords()
        .iter()
        .zip(base.chart().domain())
        .map(|(x, b)| match b {
            Some((lo, hi)) => 0.8 * (x - lo).min(hi - x).min(0.5 * (hi - lo)),
            None => 0.35,
        })
        .collect()
}

/// The deterministic loop inventory: rectangles at three scales per
/// coordinate plane plus seeded random trigonometric loops.
pub fn loop_family(base: &Point, n_random: usize, rect_fraction: f64, seed: u64) -> Vec<(String, Curve)> {
    let d = base.coords().len();
    let ext = extents(base);
    let mut out = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            for (si, scale) in [1.0, 0.5, 0.25].into_iter().enumerate() {
                let a = ext[i] * rect_fraction * scale;
                let b = ext[j] * rect_fraction * scale;
                out.push((
                    format!("rect_{i}_{j}_s{si}"),
                    Curve::rectangle(base, i, j, a, b),
                ));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 0..n_random {
        let mut cos_c = Vec::new();
        let mut sin_c = Vec::new();
        for k in 0..2usize {
            let damp = 0.5 / (k as f64 + 1.0);
            let c: Vec<f64> = (0..d)
                .map(|i| ext[i] * damp * (rng.random::<f64>() - 0.5))
                .collect();
            let s: Vec<f64> = (0..d)
                .map(|i| ext[i] * damp * (rng.random::<f64>() - 0.5))
                .collect();
            cos_c.push(c);
            sin_c.push(s);
        }
        out.push((format!("trig_{r}"), Curve::trig_loop(base, cos_c, sin_c)));
    }
    out
}

/// Endpoints for lasso conjugation paths, seeded and inside the domain.
fn lasso_endpoints(base: &Point, n: usize, seed: u64) -> Vec<Point> {
    let ext = extents(base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut out = Vec::new();
    for _ in 0..n {
        let coords: Vec<f64> = base
            .coords()
            .iter()
            .zip(&ext)
            .map(|(x, e)| x + e * 0.9 * (rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        if let Ok(p) = Point::new(base.chart().clone(), coords) {
            out.push(p);
        }
    }
    out
}

/// Curvature endomorphism used for conjugation samples, per mode.
fn curvature_sample(
    g: &MetricField,
    p: &Point,
    i: usize,
    j: usize,
    mode: TransportMode,
) -> Result<DMatrix<f64>> {
    let d = g.dim();
    let mut u = DVector::zeros(d);
    let mut v = DVector::zeros(d);
    u[i] = 1.0;
    v[j] = 1.0;
    match mode {
        TransportMode::Tangent => {
            let data = CurvatureData::connection_level(g, p)?;
            Ok(data.curvature_endomorphism(&u, &v))
        }
        TransportMode::Tractor => {
            let data = CurvatureData::new(g, p)?;
            Ok(tractor::tractor_curvature_with(&data, p, &u, &v)?.m)
        }
    }
}

/// Conjugated curvature samples: for each path endpoint q, transport P along
/// base -> q and collect P^{-1} F(e_i, e_j)|_q P over all coordinate plane pairs.
pub fn ambrose_singer_samples(
    g: &MetricField,
    base: &Point,
    mode: TransportMode,
    opts: &EnsembleOptions,
) -> Result<Vec<DMatrix<f64>>> {
    let d = g.dim();
    let mut endpoints = vec![base.clone()];
    endpoints.extend(lasso_endpoints(base, opts.n_lasso, opts.seed));

    let per_endpoint: Vec<Result<Vec<DMatrix<f64>>>> = endpoints
        .par_iter()
        .map(|q| {
            let transport = if q.coords() == base.coords() {
                None
            } else {
                let stem = Curve::segment(base, q);
                Some(match mode {
                    TransportMode::Tangent => transport_tangent(g, &stem, opts.rtol, opts.atol)?,
                    TransportMode::Tractor => transport_tractor(g, &stem, opts.rtol, opts.atol)?,
                })
            };
            let mut samples = Vec::new();
            for i in 0..d {
                for j in (i + 1)..d {
                    let f = curvature_sample(g, q, i, j, mode)?;
                    let s = match &transport {
                        None => f,
                        Some(tr) => {
                            let inv = tr
                                .matrix
                                .clone()
                                .lu()
                                .try_inverse()
                                .ok_or_else(|| {
                                    Error::IntegratorFailure("transport not invertible".into())
                                })?;
                            &inv * f * &tr.matrix
                        }
                    };
                    samples.push(s);
                }
            }
            Ok(samples)
        })
        .collect();

    let mut out = Vec::new();
    for r in per_endpoint {
        out.extend(r?);
    }
    Ok(out)
}

/// Orthonormalized span of a set of matrices under the Frobenius inner product.
#[derive(Debug, Clone)]
pub struct AlgebraSpan {
    pub generators: Vec<DMatrix<f64>>,
    pub basis: Vec<DMatrix<f64>>,
    pub dim: usize,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl AlgebraSpan {
    /// Largest distance of any generator from its projection onto the basis.
    pub fn projection_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for gmat in &self.generators {
            let mut proj = DMatrix::zeros(gmat.nrows(), gmat.ncols());
            for b in &self.basis {
                let c = frob_inner(gmat, b);
                proj += b * c;
            }
            worst = worst.max((gmat - proj).norm() / tensor_scale(gmat.norm()));
        }
        worst
    }

    /// Frobenius-norm of the part of `m` outside the span, relative to |m|.
    pub fn residual_of(&self, m: &DMatrix<f64>) -> f64 {
        let mut proj = DMatrix::zeros(m.nrows(), m.ncols());
        for b in &self.basis {
            proj += b * frob_inner(m, b);
        }
        (m - proj).norm() / tensor_scale(m.norm())
    }
}

pub fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Numerical span: stack the samples, SVD, count singular values above the
/// relative threshold. An optional commutator closure repeats with brackets
/// added until the dimension stabilizes (at most 10 rounds).
pub fn span_algebra(
    samples: &[DMatrix<f64>],
    svd_threshold: f64,
    commutator_closure: bool,
) -> AlgebraSpan {
    let mut current: Vec<DMatrix<f64>> = samples.to_vec();
    let mut span = span_once(&current, svd_threshold);
    if commutator_closure {
        for _ in 0..10 {
            let mut extended: Vec<DMatrix<f64>> = span.basis.clone();
            let n = span.basis.len();
            for a in 0..n {
                for b in (a + 1)..n {
                    extended.push(&span.basis[a] * &span.basis[b] - &span.basis[b] * &span.basis[a]);
                }
            }
            let next = span_once(&extended, svd_threshold);
            if next.dim == span.dim {
                break;
            }
            span = next;
            current = extended;
        }
        span.generators = current;
    }
    span
}

fn span_once(samples: &[DMatrix<f64>], svd_threshold: f64) -> AlgebraSpan {
    if samples.is_empty() {
        return AlgebraSpan {
            generators: Vec::new(),
            basis: Vec::new(),
            dim: 0,
            singular_values: Vec::new(),
            threshold: svd_threshold,
        };
    }
    let m = samples[0].nrows();
    let n = samples[0].ncols();
    let scale = samples.iter().map(|s| s.norm()).fold(0.0f64, f64::max);
    if scale < SPAN_ZERO_FLOOR {
        return AlgebraSpan {
            generators: samples.to_vec(),
            basis: Vec::new(),
            dim: 0,
            singular_values: Vec::new(),
            threshold: svd_threshold,
        };
    }
    let mut stack = DMatrix::zeros(samples.len(), m * n);
    for (r, s) in samples.iter().enumerate() {
        for i in 0..m {
            for j in 0..n {
                stack[(r, i * n + j)] = s[(i, j)] / scale;
            }
        }
    }
    let svd = stack.svd(false, true);
    let v_t = svd.v_t.expect("svd with v requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sv_max = sv.iter().copied().fold(0.0f64, f64::max);
    let dim = sv.iter().filter(|&&s| s > svd_threshold * sv_max).count();
    let mut basis = Vec::with_capacity(dim);
    for r in 0..dim {
        let mut b = DMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                b[(i, j)] = v_t[(r, i * n + j)];
            }
        }
        basis.push(b);
    }
    AlgebraSpan {
        generators: samples.to_vec(),
        basis,
        dim,
        singular_values: sv,
        threshold: svd_threshold,
    }
}

/// Per-loop bookkeeping for reports.
#[derive(Debug, Clone, Serialize)]
pub struct LoopRecord {
    pub id: String,
    pub steps: usize,
    pub error_estimate: f64,
    pub gram_residual: f64,
    pub log_used: bool,
}

#[derive(Debug)]
pub struct HolonomyEstimate {
    pub span: AlgebraSpan,
    pub loops: Vec<LoopRecord>,
    pub n_loops: usize,
    pub n_samples: usize,
    pub max_gram_residual: f64,
    pub mode: TransportMode,
}

/// Estimate the holonomy algebra at `base`: loop transports (their logs when
/// close to the identity) plus conjugated curvature samples, spanned with the
/// SVD rank rule. Loop transports run in parallel; the sample order is fixed
/// by the loop inventory, so results are deterministic for a given seed.
pub fn estimate_holonomy(
    g: &MetricField,
    base: &Point,
    mode: TransportMode,
    opts: &EnsembleOptions,
) -> Result<HolonomyEstimate> {
    let loops = loop_family(base, opts.n_random, opts.rect_fraction, opts.seed);
    let transported: Vec<Result<(String, TransportResult, f64)>> = loops
        .par_iter()
        .map(|(id, curve)| {
            let tr = match mode {
                TransportMode::Tangent => transport_tangent(g, curve, opts.rtol, opts.atol)?,
                TransportMode::Tractor => transport_tractor(g, curve, opts.rtol, opts.atol)?,
            };
            let gr = gram_residual(g, curve, &tr)?;
            Ok((id.clone(), tr, gr))
        })
        .collect();

    let mut samples = Vec::new();
    let mut records = Vec::new();
    let mut max_gram = 0.0f64;
    for item in transported {
        let (id, tr, gr) = item?;
        max_gram = max_gram.max(gr);
        let log = log_near_identity(&tr.matrix);
        records.push(LoopRecord {
            id,
            steps: tr.steps,
            error_estimate: tr.error_estimate,
            gram_residual: gr,
            log_used: log.is_some(),
        });
        if let Some(l) = log {
            samples.push(l);
        }
    }
    let n_loops = records.len();
    samples.extend(ambrose_singer_samples(g, base, mode, opts)?);
    let n_samples = samples.len();
    let span = span_algebra(&samples, opts.svd_threshold, opts.commutator_closure);
    Ok(HolonomyEstimate {
        span,
        loops: records,
        n_loops,
        n_samples,
        max_gram_residual: max_gram,
        mode,
    })
}

/// Middle-block projection of samples written in an adapted frame: conjugate
/// by the frame matrix and cut out rows/columns 1..=n.
pub fn screen_blocks(samples: &[DMatrix<f64>], frame: &DMatrix<f64>) -> Result<Vec<DMatrix<f64>>> {
    let d = frame.nrows();
    let n = d - 2;
    let inv = frame
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Domain("adapted frame not invertible".into()))?;
    Ok(samples
        .iter()
        .map(|s| {
            let ad = &inv * s * frame;
            let mut block = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    block[(i, j)] = ad[(1 + i, 1 + j)];
                }
            }
            block
        })
        .collect())
}
