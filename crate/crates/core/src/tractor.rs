//! The rank-(d+2) standard tractor bundle in a fixed metric gauge: inner
//! product, covariant derivative, curvature, gauge-change map, and recurrent
//! section utilities.
//!
//! A tractor is a triple (sigma, Y, rho) of a scalar, a tangent vector and a
//! scalar; the frame order is (sigma-slot, coordinate tangent slots, rho-slot)
//! throughout the crate. The inner product pairs sigma with rho and uses the
//! gauge metric on the middle block, giving signature (r+1, s+1).

use nalgebra::{DMatrix, DVector};

use crate::curvature::{tensor_scale, CurvatureData};
use crate::error::{Error, Result};
use crate::geometry::{MetricField, Point, ScalarField};
use crate::ode;

pub const METRIC_COMPAT_TOL: f64 = 1e-9;
pub const FORM_COMPAT_TOL: f64 = 1e-8;
pub const THETA_ISOMETRY_TOL: f64 = 1e-10;
pub const RECURRENT_SIGMA_TOL: f64 = 1e-10;
pub const RECURRENT_RESCALE_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Tractor {
    pub sigma: f64,
    pub y: DVector<f64>,
    pub rho: f64,
    pub at: Point,
}

impl serde::Serialize for Tractor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Tractor", 4)?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field("y", &self.y.as_slice().to_vec())?;
        st.serialize_field("rho", &self.rho)?;
        st.serialize_field("at", &self.at.coords().to_vec())?;
        st.end()
    }
}

impl Tractor {
    pub fn new(sigma: f64, y: DVector<f64>, rho: f64, at: Point) -> Tractor {
        Tractor { sigma, y, rho, at }
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    /// Components in frame order (sigma, tangent.., rho).
    pub fn to_vector(&self) -> DVector<f64> {
        let d = self.dim();
        let mut v = DVector::zeros(d + 2);
        v[0] = self.sigma;
        for i in 0..d {
            v[1 + i] = self.y[i];
        }
        v[d + 1] = self.rho;
        v
    }

    pub fn from_vector(v: &DVector<f64>, at: Point) -> Tractor {
        let d = v.len() - 2;
        Tractor {
            sigma: v[0],
            y: DVector::from_iterator(d, (0..d).map(|i| v[1 + i])),
            rho: v[d + 1],
            at,
        }
    }

    pub fn scale(&self, c: f64) -> Tractor {
        Tractor {
            sigma: c * self.sigma,
            y: &self.y * c,
            rho: c * self.rho,
            at: self.at.clone(),
        }
    }
}

/// The canonical section of an Einstein gauge, (1, 0, -S/(2 d (d-1))).
pub fn einstein_section(g: &MetricField, p: &Point) -> Result<Tractor> {
    let data = CurvatureData::new(g, p)?;
    let d = data.dim as f64;
    Ok(Tractor::new(
        1.0,
        DVector::zeros(data.dim),
        -data.scalar / (2.0 * d * (d - 1.0)),
        p.clone(),
    ))
}

fn same_fiber(t1: &Tractor, t2: &Tractor) -> Result<()> {
    if t1.at.coords() != t2.at.coords() {
        return Err(Error::GaugeMismatch(format!(
            "tractors live at different points {:?} vs {:?}",
            t1.at.coords(),
            t2.at.coords()
        )));
    }
    Ok(())
}

/// Tractor Gram matrix at a point, in frame order (sigma, tangent.., rho).
pub fn gram_matrix(g: &MetricField, p: &Point) -> Result<DMatrix<f64>> {
    let d = g.dim();
    let gm = g.eval(p)?;
    let mut out = DMatrix::zeros(d + 2, d + 2);
    out[(0, d + 1)] = 1.0;
    out[(d + 1, 0)] = 1.0;
    for i in 0..d {
        for j in 0..d {
            out[(1 + i, 1 + j)] = gm[(i, j)];
        }
    }
    Ok(out)
}

/// <(s,X,r), (t,Y,q)> = s q + r t + g(X,Y).
pub fn tractor_inner(g: &MetricField, t1: &Tractor, t2: &Tractor) -> Result<f64> {
    same_fiber(t1, t2)?;
    let gm = g.eval(&t1.at)?;
    let mut s = t1.sigma * t2.rho + t1.rho * t2.sigma;
    for i in 0..gm.nrows() {
        for j in 0..gm.ncols() {
            s += gm[(i, j)] * t1.y[i] * t2.y[j];
        }
    }
    Ok(s)
}

/// A tractor field given by component scalar fields.
#[derive(Debug, Clone)]
pub struct TractorField {
    pub sigma: ScalarField,
    pub y: Vec<ScalarField>,
    pub rho: ScalarField,
}

impl TractorField {
    pub fn value(&self, p: &Point) -> Result<Tractor> {
        let d = self.y.len();
        let mut y = DVector::zeros(d);
        for (i, c) in self.y.iter().enumerate() {
            y[i] = c.value(p)?;
        }
        Ok(Tractor::new(self.sigma.value(p)?, y, self.rho.value(p)?, p.clone()))
    }
}

/// First-order data of a tractor field along one direction.
#[derive(Debug, Clone)]
pub struct TractorJet {
    pub sigma: f64,
    pub d_sigma: f64,
    pub y: DVector<f64>,
    pub d_y: DVector<f64>,
    pub rho: f64,
    pub d_rho: f64,
}

impl TractorJet {
    pub fn of_field(field: &TractorField, p: &Point, dir: &DVector<f64>) -> Result<TractorJet> {
        let d = field.y.len();
        let sj = field.sigma.jet(p)?;
        let rj = field.rho.jet(p)?;
        let mut y = DVector::zeros(d);
        let mut dy = DVector::zeros(d);
        for (i, c) in field.y.iter().enumerate() {
            let j = c.jet(p)?;
            y[i] = j.v;
            dy[i] = (0..d).map(|k| j.d1(k) * dir[k]).sum();
        }
        Ok(TractorJet {
            sigma: sj.v,
            d_sigma: (0..d).map(|k| sj.d1(k) * dir[k]).sum(),
            y,
            d_y: dy,
            rho: rj.v,
            d_rho: (0..d).map(|k| rj.d1(k) * dir[k]).sum(),
        })
    }
}

/// Covariant tractor derivative along `dir` of a field given by its jet:
/// D_X (s, Y, r) = (X(s) - g(X,Y), nabla_X Y + r X + s P(X)#, X(r) - P(X,Y)).
pub fn tractor_derivative(
    g: &MetricField,
    p: &Point,
    dir: &DVector<f64>,
    tj: &TractorJet,
) -> Result<Tractor> {
    let data = CurvatureData::connection_level(g, p)?;
    if data.schouten.is_none() {
        return Err(Error::Dimension {
            required: 3,
            actual: data.dim,
        });
    }
    Ok(tractor_derivative_with(&data, p, dir, tj))
}

pub fn tractor_derivative_with(
    data: &CurvatureData,
    p: &Point,
    dir: &DVector<f64>,
    tj: &TractorJet,
) -> Tractor {
    let d = data.dim;
    let pm = data
        .schouten
        .as_ref()
        .expect("tractor derivative needs dimension >= 3");
    let mut g_dir_y = 0.0;
    let mut p_dir_y = 0.0;
    for i in 0..d {
        for j in 0..d {
            g_dir_y += data.g[(i, j)] * dir[i] * tj.y[j];
            p_dir_y += pm[(i, j)] * dir[i] * tj.y[j];
        }
    }
    // (P(X))# = g^{-1} P(X, .)
    let mut p_sharp = DVector::zeros(d);
    for k in 0..d {
        let mut s = 0.0;
        for m in 0..d {
            for i in 0..d {
                s += data.inv[(k, m)] * pm[(i, m)] * dir[i];
            }
        }
        p_sharp[k] = s;
    }
    let mut mid = DVector::zeros(d);
    for k in 0..d {
        let mut s = tj.d_y[k];
        for i in 0..d {
            for j in 0..d {
                s += data.gamma.at(k, i, j) * dir[i] * tj.y[j];
            }
        }
        mid[k] = s + tj.rho * dir[k] + tj.sigma * p_sharp[k];
    }
    Tractor::new(tj.d_sigma - g_dir_y, mid, tj.d_rho - p_dir_y, p.clone())
}

/// Coefficient matrix B with (sigma, y, rho)' = B (sigma, y, rho) for
/// parallel transport of the tractor connection along a curve with
/// velocity `vel`.
pub fn transport_matrix(data: &CurvatureData, vel: &DVector<f64>) -> DMatrix<f64> {
    let d = data.dim;
    let pm = data
        .schouten
        .as_ref()
        .expect("tractor transport needs dimension >= 3");
    let mut b = DMatrix::zeros(d + 2, d + 2);
    for j in 0..d {
        let mut gv = 0.0;
        let mut pv = 0.0;
        for i in 0..d {
            gv += data.g[(i, j)] * vel[i];
            pv += pm[(i, j)] * vel[i];
        }
        b[(0, 1 + j)] = gv;
        b[(d + 1, 1 + j)] = pv;
    }
    let mut p_sharp = DVector::zeros(d);
    for k in 0..d {
        let mut s = 0.0;
        for m in 0..d {
            for i in 0..d {
                s += data.inv[(k, m)] * pm[(i, m)] * vel[i];
            }
        }
        p_sharp[k] = s;
    }
    for k in 0..d {
        b[(1 + k, 0)] = -p_sharp[k];
        b[(1 + k, d + 1)] = -vel[k];
        for j in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                s += data.gamma.at(k, i, j) * vel[i];
            }
            b[(1 + k, 1 + j)] = -s;
        }
    }
    b
}

/// A (d+2)x(d+2) matrix acting on tractor components, tagged with its fiber.
#[derive(Debug, Clone)]
pub struct TractorMatrix {
    pub m: DMatrix<f64>,
    pub at: Point,
}

impl serde::Serialize for TractorMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<Vec<f64>> = (0..self.m.nrows())
            .map(|i| (0..self.m.ncols()).map(|j| self.m[(i, j)]).collect())
            .collect();
        let mut st = serializer.serialize_struct("TractorMatrix", 2)?;
        st.serialize_field("m", &rows)?;
        st.serialize_field("at", &self.at.coords().to_vec())?;
        st.end()
    }
}

impl TractorMatrix {
    /// Residual of m' G + G m = 0 (Lie algebra of the tractor Gram).
    pub fn algebra_residual(&self, gram: &DMatrix<f64>) -> f64 {
        let r = self.m.transpose() * gram + gram * &self.m;
        r.amax() / tensor_scale(self.m.amax() * gram.amax())
    }

    /// Residual of m' G m = G (isometry group of the tractor Gram).
    pub fn group_residual(&self, gram: &DMatrix<f64>) -> f64 {
        let r = self.m.transpose() * gram * &self.m - gram;
        r.amax() / tensor_scale(gram.amax())
    }
}

/// Tractor curvature F(X,Y) as a matrix in frame order (sigma, tangent, rho):
/// F = [[0,0,0],[C(X,Y)#, W(X,Y), 0],[0, -C(X,Y,.), 0]].
pub fn tractor_curvature(
    g: &MetricField,
    p: &Point,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<TractorMatrix> {
    let data = CurvatureData::new(g, p)?;
    tractor_curvature_with(&data, p, x, y)
}

pub fn tractor_curvature_with(
    data: &CurvatureData,
    p: &Point,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<TractorMatrix> {
    let d = data.dim;
    let w = data.weyl()?;
    let c = data.cotton()?;
    let mut m = DMatrix::zeros(d + 2, d + 2);
    let mut c_xy = DVector::zeros(d);
    for j in 0..d {
        let mut s = 0.0;
        for a in 0..d {
            for b in 0..d {
                s += c.at(a, b, j) * x[a] * y[b];
            }
        }
        c_xy[j] = s;
    }
    let c_sharp = &data.inv * &c_xy;
    for k in 0..d {
        m[(1 + k, 0)] = c_sharp[k];
        m[(d + 1, 1 + k)] = -c_xy[k];
        for l in 0..d {
            // Weyl endomorphism: (W(X,Y))^k_l = g^{km} W(X, Y, e_m, e_l),
            // raising the third slot of the stored (0,4) tensor. With this
            // orientation F equals the commutator of tractor derivatives.
            let mut s = 0.0;
            for mm in 0..d {
                let mut wxy = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        wxy += w.at(a, b, mm, l) * x[a] * y[b];
                    }
                }
                s += data.inv[(k, mm)] * wxy;
            }
            m[(1 + k, 1 + l)] = s;
        }
    }
    Ok(TractorMatrix { m, at: p.clone() })
}

/// Defect of the cyclic curvature identity: the cyclic sum of
/// F(X_i, X_j)(s_k, X_k, r_k) minus (0, sum of s_i C(X_j, X_k)# cyclically, 0).
pub fn tractor_bianchi_defect(
    g: &MetricField,
    p: &Point,
    triples: [(f64, DVector<f64>, f64); 3],
) -> Result<Tractor> {
    let data = CurvatureData::new(g, p)?;
    let c = data.cotton()?;
    let d = data.dim;
    let apply = |x: &DVector<f64>,
                 y: &DVector<f64>,
                 t: &(f64, DVector<f64>, f64)|
     -> Result<DVector<f64>> {
        let f = tractor_curvature_with(&data, p, x, y)?;
        let tv = Tractor::new(t.0, t.1.clone(), t.2, p.clone()).to_vector();
        Ok(&f.m * tv)
    };
    let [t1, t2, t3] = &triples;
    let (x1, x2, x3) = (&t1.1, &t2.1, &t3.1);
    let lhs = apply(x1, x2, t3)? + apply(x2, x3, t1)? + apply(x3, x1, t2)?;

    let c_sharp = |x: &DVector<f64>, y: &DVector<f64>| -> DVector<f64> {
        let mut cv = DVector::zeros(d);
        for j in 0..d {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    s += c.at(a, b, j) * x[a] * y[b];
                }
            }
            cv[j] = s;
        }
        &data.inv * cv
    };
    let mut rhs = DVector::zeros(d + 2);
    let mid = c_sharp(x2, x3) * t1.0 + c_sharp(x3, x1) * t2.0 + c_sharp(x1, x2) * t3.0;
    for k in 0..d {
        rhs[1 + k] = mid[k];
    }
    Ok(Tractor::from_vector(&(lhs - rhs), p.clone()))
}

/// Gauge transition of tractor components under g -> e^{2 psi} g.
///
/// Includes the density weight factors e^{psi} and e^{-psi} on the slots, so
/// the map is an isometry onto the rescaled-gauge tractor metric and commutes
/// with the tractor derivative. For psi = 0 it is the identity; for constant
/// psi the gradient correction vanishes and only the diagonal weight factors
/// remain.
pub fn theta_map(psi: &ScalarField, t: &Tractor, g: &MetricField) -> Result<Tractor> {
    let d = t.dim();
    let jet = psi.jet(&t.at)?;
    let gm = g.eval(&t.at)?;
    let inv = gm
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::Domain("metric not invertible".into()))?;
    let dpsi = DVector::from_iterator(d, (0..d).map(|i| jet.d1(i)));
    let grad = &inv * &dpsi;
    let grad_sq = dpsi.dot(&grad);
    let e = jet.v.exp();
    let sigma = e * t.sigma;
    let y = (&t.y + &grad * t.sigma) / e;
    let rho = (t.rho - dpsi.dot(&t.y) - 0.5 * grad_sq * t.sigma) / e;
    Ok(Tractor::new(sigma, y, rho, t.at.clone()))
}

/// Report of a recurrent-section rescale along a curve.
#[derive(Debug, Clone)]
pub struct RescaleReport {
    pub params: Vec<f64>,
    /// Integrating factor at each sample.
    pub factor: Vec<f64>,
    pub rescaled: Vec<Tractor>,
    /// max |D(f t)| along the curve, relative to the field scale.
    pub parallel_defect: f64,
    /// max |D t - theta t| over the samples (how recurrent the input is).
    pub recurrence_residual: f64,
    /// max |d(g(Y/sigma, .))| over the samples.
    pub closedness_residual: f64,
}

/// Rescale a recurrent section to a parallel one along a curve.
///
/// The section must have nowhere-vanishing sigma on the curve; the
/// integrating factor solves f' = -theta(velocity) f, where theta is read off
/// the section's tractor derivative.
pub fn recurrent_rescale(
    g: &MetricField,
    field: &TractorField,
    curve: &crate::curve::Curve,
    n_samples: usize,
) -> Result<RescaleReport> {
    let chart = curve.chart().clone();
    let d = g.dim();
    let ts: Vec<f64> = (0..=n_samples).map(|i| i as f64 / n_samples as f64).collect();

    let theta_at = |t: f64| -> Result<(f64, f64)> {
        let p = Point::new(chart.clone(), curve.position(t))?;
        let vel = DVector::from_vec(curve.velocity(t));
        let tj = TractorJet::of_field(field, &p, &vel)?;
        let dt = tractor_derivative(g, &p, &vel, &tj)?.to_vector();
        let tv = field.value(&p)?.to_vector();
        let norm_sq = tv.dot(&tv);
        let theta = dt.dot(&tv) / norm_sq;
        let residual = (&dt - &tv * theta).norm();
        Ok((theta, residual))
    };

    // Reject sections whose sigma vanishes anywhere on the curve.
    let mut min_sigma = f64::INFINITY;
    let mut field_scale = 0.0f64;
    for &t in &ts {
        let p = Point::new(chart.clone(), curve.position(t))?;
        let v = field.value(&p)?.to_vector();
        field_scale = field_scale.max(v.amax());
        min_sigma = min_sigma.min(v[0].abs());
    }
    if min_sigma < RECURRENT_SIGMA_TOL * tensor_scale(field_scale) {
        return Err(Error::SigmaVanishes(min_sigma));
    }

    // Integrate f' = -theta f piecewise over the sample grid.
    let rhs = |t: f64, y: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let (theta, _) = theta_at(t)?;
        Ok(y * (-theta))
    };
    let mut factor = Vec::with_capacity(ts.len());
    let mut current = DMatrix::from_element(1, 1, 1.0);
    let mut prev_t = 0.0;
    for &t in &ts {
        if t > prev_t {
            let res = ode::integrate_linear(
                &rhs,
                current.clone(),
                prev_t,
                t,
                ode::RK_RTOL,
                ode::RK_ATOL,
                &[],
            )?;
            current = res.y;
        }
        factor.push(current[(0, 0)]);
        prev_t = t;
    }

    let mut rescaled = Vec::with_capacity(ts.len());
    let mut parallel_defect = 0.0f64;
    let mut recurrence_residual = 0.0f64;
    let mut closedness_residual = 0.0f64;
    for (idx, &t) in ts.iter().enumerate() {
        let p = Point::new(chart.clone(), curve.position(t))?;
        let vel = DVector::from_vec(curve.velocity(t));
        let tj = TractorJet::of_field(field, &p, &vel)?;
        let dt = tractor_derivative(g, &p, &vel, &tj)?.to_vector();
        let tv = field.value(&p)?;
        let (theta, res) = theta_at(t)?;
        recurrence_residual = recurrence_residual.max(res / tensor_scale(field_scale));
        let f = factor[idx];
        let df = -theta * f;
        let defect = (tv.to_vector() * df + dt * f).amax();
        parallel_defect = parallel_defect.max(defect / tensor_scale(field_scale));
        rescaled.push(tv.scale(f));

        // d(g(Y/sigma, .)) at the sample point, from component jets.
        let mj = g.jets(&p)?;
        let sj = field.sigma.jet(&p)?;
        let yj: Vec<crate::jet::Jet3> = field
            .y
            .iter()
            .map(|c| c.jet(&p))
            .collect::<Result<Vec<_>>>()?;
        let mut omega_d = vec![vec![0.0; d]; d]; // [k][i] = d_k omega_i
        for (k, row) in omega_d.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for j in 0..d {
                    let yhat = yj[j].v / sj.v;
                    let dyhat = (yj[j].d1(k) * sj.v - yj[j].v * sj.d1(k)) / (sj.v * sj.v);
                    s += mj.dg(k, i, j) * yhat + mj.g[(i, j)] * dyhat;
                }
                *slot = s;
            }
        }
        for i in 0..d {
            for k in 0..d {
                closedness_residual =
                    closedness_residual.max((omega_d[k][i] - omega_d[i][k]).abs());
            }
        }
    }

    Ok(RescaleReport {
        params: ts,
        factor,
        rescaled,
        parallel_defect,
        recurrence_residual,
        closedness_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;

    fn flat_lorentz() -> MetricField {
        let chart = Chart::new(&["t", "x", "y", "z"]);
        let names = chart.coord_names();
        MetricField::from_exprs(
            chart.clone(),
            (1, 3),
            vec![
                ((0, 0), crate::expr::parse("-1", &names).unwrap()),
                ((1, 1), crate::expr::parse("1", &names).unwrap()),
                ((2, 2), crate::expr::parse("1", &names).unwrap()),
                ((3, 3), crate::expr::parse("1", &names).unwrap()),
            ],
        )
    }

    fn origin(g: &MetricField) -> Point {
        Point::new(g.chart().clone(), vec![0.0; 4]).unwrap()
    }

    #[test]
    fn inner_product_pairs_slots() {
        let g = flat_lorentz();
        let p = origin(&g);
        let t1 = Tractor::new(1.0, DVector::zeros(4), 0.0, p.clone());
        let t2 = Tractor::new(0.0, DVector::zeros(4), 1.0, p.clone());
        assert_eq!(tractor_inner(&g, &t1, &t2).unwrap(), 1.0);
        assert_eq!(tractor_inner(&g, &t1, &t1).unwrap(), 0.0);
        let v = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let t3 = Tractor::new(0.0, v, 0.0, p);
        assert_eq!(tractor_inner(&g, &t3, &t3).unwrap(), -1.0);
    }

    #[test]
    fn gram_signature_is_shifted() {
        let g = flat_lorentz();
        let p = origin(&g);
        let gram = gram_matrix(&g, &p).unwrap();
        let eig = gram.symmetric_eigen();
        let neg = eig.eigenvalues.iter().filter(|&&e| e < 0.0).count();
        let pos = eig.eigenvalues.iter().filter(|&&e| e > 0.0).count();
        assert_eq!((neg, pos), (2, 4));
    }

    #[test]
    fn constant_rho_tractor_derivative() {
        // D_X (0,0,rho) = (0, rho X, X(rho)) in a flat gauge.
        let g = flat_lorentz();
        let p = origin(&g);
        let dir = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.7]);
        let tj = TractorJet {
            sigma: 0.0,
            d_sigma: 0.0,
            y: DVector::zeros(4),
            d_y: DVector::zeros(4),
            rho: 2.5,
            d_rho: 0.0,
        };
        let dt = tractor_derivative(&g, &p, &dir, &tj).unwrap();
        assert!((dt.sigma).abs() < 1e-14);
        assert!((&dt.y - &dir * 2.5).norm() < 1e-14);
        assert!((dt.rho).abs() < 1e-14);
    }

    #[test]
    fn theta_zero_is_identity_and_inverse_composes() {
        let g = flat_lorentz();
        let p = origin(&g);
        let t = Tractor::new(1.2, DVector::from_vec(vec![0.3, 1.0, -2.0, 0.1]), -0.4, p);
        let zero = ScalarField::constant(g.chart().clone(), 0.0);
        let t2 = theta_map(&zero, &t, &g).unwrap();
        assert!((t2.to_vector() - t.to_vector()).amax() < 1e-15);

        let psi = ScalarField::parse(g.chart().clone(), "0.2*x + 0.1*y*z").unwrap();
        let g2 = g.conformal_rescale(&psi);
        let fwd = theta_map(&psi, &t, &g).unwrap();
        let back = theta_map(&psi.negated(), &fwd, &g2).unwrap();
        assert!((back.to_vector() - t.to_vector()).amax() < 1e-12);
    }

    #[test]
    fn theta_is_isometry_into_rescaled_gauge() {
        let g = flat_lorentz();
        let p = Point::new(g.chart().clone(), vec![0.2, -0.4, 0.9, 0.5]).unwrap();
        let psi = ScalarField::parse(g.chart().clone(), "0.3*x - 0.2*t + 0.05*y^2").unwrap();
        let g2 = g.conformal_rescale(&psi);
        let a = Tractor::new(0.7, DVector::from_vec(vec![1.0, 0.2, -0.3, 0.4]), -1.1, p.clone());
        let b = Tractor::new(-0.2, DVector::from_vec(vec![0.1, 1.5, 0.0, -0.7]), 0.6, p);
        let lhs = tractor_inner(
            &g2,
            &theta_map(&psi, &a, &g).unwrap(),
            &theta_map(&psi, &b, &g).unwrap(),
        )
        .unwrap();
        let rhs = tractor_inner(&g, &a, &b).unwrap();
        assert!((lhs - rhs).abs() < THETA_ISOMETRY_TOL * rhs.abs().max(1.0));
    }
}
