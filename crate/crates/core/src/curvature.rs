//! Curvature of the Levi-Civita connection: Christoffel symbols, Riemann,
//! Ricci, scalar, Schouten, Weyl and Cotton tensors, their first covariant
//! derivatives, and the Einstein / C-space predicates.
//!
//! Conventions, pinned by golden tests: R(X,Y) = [nabla_X, nabla_Y] -
//! nabla_{[X,Y]}, the (0,4) tensor is R(X,Y,Z,W) = g(R(X,Y)W, Z), and
//! Ric(U,V) = g^{ab} R(e_a, U, e_b, V). This is the unique package in which
//! the round sphere has scalar curvature +d(d-1), the Weyl part of
//! R - g <> P is totally trace-free and conformally covariant, and the
//! Schouten tensor obeys the standard conformal transformation law. All
//! derivative tensors come from order-3 metric jets by differentiating the
//! closed-form expressions; nothing here uses finite differences.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{MetricField, MetricJets, Point, ScalarField};

/// Scale floor used to turn absolute residuals into relative ones.
pub const SCALE_FLOOR: f64 = 1e-30;

pub fn tensor_scale(max_abs: f64) -> f64 {
    max_abs + SCALE_FLOOR
}

#[derive(Debug, Clone)]
pub struct Tensor3 {
    pub d: usize,
    a: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(d: usize) -> Self {
        Tensor3 {
            d,
            a: vec![0.0; d * d * d],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.a[(i * self.d + j) * self.d + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.a[(i * self.d + j) * self.d + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone)]
pub struct Tensor4 {
    pub d: usize,
    a: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(d: usize) -> Self {
        Tensor4 {
            d,
            a: vec![0.0; d * d * d * d],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.a[((i * self.d + j) * self.d + k) * self.d + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.a[((i * self.d + j) * self.d + k) * self.d + l] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        Tensor4 {
            d: self.d,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        }
    }
}

/// Rank-5 tensor indexed as [m][i][j][k][l]; m is the derivative slot.
#[derive(Debug, Clone)]
pub struct Tensor5 {
    pub d: usize,
    a: Vec<f64>,
}

impl Tensor5 {
    pub fn zeros(d: usize) -> Self {
        Tensor5 {
            d,
            a: vec![0.0; d * d * d * d * d],
        }
    }

    #[inline]
    pub fn at(&self, m: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.a[(((m * self.d + i) * self.d + j) * self.d + k) * self.d + l]
    }

    #[inline]
    pub fn set(&mut self, m: usize, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.a[(((m * self.d + i) * self.d + j) * self.d + k) * self.d + l] = v;
    }
}

/// How much of the stack to compute. `Connection` stops after Weyl (enough
/// for transport right-hand sides); `Full` adds the covariant-derivative
/// tensors and the Cotton tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Connection,
    Full,
}

struct GammaJets {
    /// gamma[k][i][j] = Γ^k_ij
    gamma: Tensor3,
    /// dgamma[m][k][i][j] = ∂_m Γ^k_ij
    dgamma: Tensor4,
    /// d2gamma[n][m][k][i][j] = ∂_n ∂_m Γ^k_ij (Full depth only)
    d2gamma: Option<Tensor5>,
}

fn gamma_jets(mj: &MetricJets, depth: Depth) -> GammaJets {
    let d = mj.dim;
    let inv = &mj.inv;

    // ∂_m g^{kl} = -(g^{-1} ∂_m g g^{-1})_{kl}
    let mut dgs = Vec::with_capacity(d);
    for m in 0..d {
        let mut dg_m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                dg_m[(i, j)] = mj.dg(m, i, j);
            }
        }
        dgs.push(dg_m);
    }
    let dinv: Vec<DMatrix<f64>> = dgs.iter().map(|dg_m| -(inv * dg_m * inv)).collect();

    let half = 0.5;
    let mut gamma = Tensor3::zeros(d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += inv[(k, l)] * (mj.dg(i, j, l) + mj.dg(j, i, l) - mj.dg(l, i, j));
                }
                gamma.set(k, i, j, half * s);
            }
        }
    }

    let mut dgamma = Tensor4::zeros(d);
    for m in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for l in 0..d {
                        s += dinv[m][(k, l)] * (mj.dg(i, j, l) + mj.dg(j, i, l) - mj.dg(l, i, j));
                        s += inv[(k, l)]
                            * (mj.d2g(m, i, j, l) + mj.d2g(m, j, i, l) - mj.d2g(m, l, i, j));
                    }
                    dgamma.set(m, k, i, j, half * s);
                }
            }
        }
    }

    let d2gamma = match depth {
        Depth::Connection => None,
        Depth::Full => {
            // ∂_n ∂_m g^{kl}
            let mut d2inv = vec![DMatrix::zeros(d, d); d * d];
            for n in 0..d {
                for m in 0..d {
                    let mut d2g_nm = DMatrix::zeros(d, d);
                    for i in 0..d {
                        for j in 0..d {
                            d2g_nm[(i, j)] = mj.d2g(n, m, i, j);
                        }
                    }
                    d2inv[n * d + m] = -(&dinv[n] * &dgs[m] * inv)
                        - (inv * &d2g_nm * inv)
                        - (inv * &dgs[m] * &dinv[n]);
                }
            }
            let mut t = Tensor5::zeros(d);
            for n in 0..d {
                for m in 0..d {
                    for k in 0..d {
                        for i in 0..d {
                            for j in 0..d {
                                let mut s = 0.0;
                                for l in 0..d {
                                    s += d2inv[n * d + m][(k, l)]
                                        * (mj.dg(i, j, l) + mj.dg(j, i, l) - mj.dg(l, i, j));
                                    s += dinv[m][(k, l)]
                                        * (mj.d2g(n, i, j, l) + mj.d2g(n, j, i, l)
                                            - mj.d2g(n, l, i, j));
                                    s += dinv[n][(k, l)]
                                        * (mj.d2g(m, i, j, l) + mj.d2g(m, j, i, l)
                                            - mj.d2g(m, l, i, j));
                                    s += inv[(k, l)]
                                        * (mj.d3g(n, m, i, j, l) + mj.d3g(n, m, j, i, l)
                                            - mj.d3g(n, m, l, i, j));
                                }
                                t.set(n, m, k, i, j, half * s);
                            }
                        }
                    }
                }
            }
            Some(t)
        }
    };

    GammaJets {
        gamma,
        dgamma,
        d2gamma,
    }
}

/// Curvature quantities at one point. Derivative-level fields are present
/// only at `Depth::Full`.
pub struct CurvatureData {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub inv: DMatrix<f64>,
    /// Γ^k_ij as [k][i][j]
    pub gamma: Tensor3,
    /// (0,4) curvature
    pub riemann: Tensor4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub schouten: Option<DMatrix<f64>>,
    pub weyl: Option<Tensor4>,
    /// (∇_m R)_{ijkl} as [m][i][j][k][l]
    pub nabla_riemann: Option<Tensor5>,
    pub nabla_ricci: Option<Tensor3>,
    pub d_scalar: Option<DVector<f64>>,
    /// (∇_m P)_{ij} as [m][i][j]
    pub nabla_schouten: Option<Tensor3>,
    pub nabla_weyl: Option<Tensor5>,
    pub cotton: Option<Tensor3>,
}

impl CurvatureData {
    pub fn new(g: &MetricField, p: &Point) -> Result<CurvatureData> {
        Ok(Self::from_jets(&g.jets(p)?, Depth::Full))
    }

    pub fn connection_level(g: &MetricField, p: &Point) -> Result<CurvatureData> {
        Ok(Self::from_jets(&g.jets(p)?, Depth::Connection))
    }

    pub fn from_jets(mj: &MetricJets, depth: Depth) -> CurvatureData {
        let d = mj.dim;
        let gj = gamma_jets(mj, depth);

        // R^k_{lij} = ∂_i Γ^k_{jl} - ∂_j Γ^k_{il} + Γ^m_{jl} Γ^k_{im} - Γ^m_{il} Γ^k_{jm}
        let mut r_mixed = Tensor4::zeros(d); // [k][l][i][j]
        for k in 0..d {
            for l in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut s = gj.dgamma.at(i, k, j, l) - gj.dgamma.at(j, k, i, l);
                        for m in 0..d {
                            s += gj.gamma.at(m, j, l) * gj.gamma.at(k, i, m)
                                - gj.gamma.at(m, i, l) * gj.gamma.at(k, j, m);
                        }
                        r_mixed.set(k, l, i, j, s);
                    }
                }
            }
        }

        // (0,4) curvature R(∂_i, ∂_j, ∂_l, ∂_w) = g(R(∂_i, ∂_j) ∂_w, ∂_l)
        //                                       = g_{lk} R^k_{wij}.
        let mut riemann = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    for w in 0..d {
                        let mut s = 0.0;
                        for k in 0..d {
                            s += mj.g[(l, k)] * r_mixed.at(k, w, i, j);
                        }
                        riemann.set(i, j, l, w, s);
                    }
                }
            }
        }

        // Ric(U,V) = g^{ab} R(e_a, U, e_b, V); S traces again.
        let mut ricci = DMatrix::zeros(d, d);
        for u in 0..d {
            for v in 0..d {
                let mut s = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        s += mj.inv[(a, b)] * riemann.at(a, u, b, v);
                    }
                }
                ricci[(u, v)] = s;
            }
        }
        let mut scalar = 0.0;
        for u in 0..d {
            for v in 0..d {
                scalar += mj.inv[(u, v)] * ricci[(u, v)];
            }
        }

        let schouten = if d >= 3 {
            let c1 = 1.0 / (d as f64 - 2.0);
            let c2 = 1.0 / (2.0 * (d as f64 - 1.0));
            let mut p_mat = DMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    p_mat[(i, j)] = c1 * (ricci[(i, j)] - scalar * c2 * mj.g[(i, j)]);
                }
            }
            Some(p_mat)
        } else {
            None
        };
        let weyl = match &schouten {
            Some(p_mat) if d >= 4 => Some(riemann.sub(&kulkarni_nomizu(&mj.g, p_mat))),
            _ => None,
        };

        let mut data = CurvatureData {
            dim: d,
            g: mj.g.clone(),
            inv: mj.inv.clone(),
            gamma: gj.gamma.clone(),
            riemann,
            ricci,
            scalar,
            schouten,
            weyl,
            nabla_riemann: None,
            nabla_ricci: None,
            d_scalar: None,
            nabla_schouten: None,
            nabla_weyl: None,
            cotton: None,
        };
        if depth == Depth::Full {
            data.fill_derivatives(mj, &gj, &r_mixed);
        }
        data
    }

    fn fill_derivatives(&mut self, mj: &MetricJets, gj: &GammaJets, r_mixed: &Tensor4) {
        let d = self.dim;
        let d2gamma = gj.d2gamma.as_ref().expect("full depth");

        // Coordinate derivative of R^k_{lij}, then of the (0,4) tensor.
        let mut dr_mixed = Tensor5::zeros(d);
        for m in 0..d {
            for k in 0..d {
                for l in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            let mut s = d2gamma.at(m, i, k, j, l) - d2gamma.at(m, j, k, i, l);
                            for q in 0..d {
                                s += gj.dgamma.at(m, q, j, l) * gj.gamma.at(k, i, q)
                                    + gj.gamma.at(q, j, l) * gj.dgamma.at(m, k, i, q)
                                    - gj.dgamma.at(m, q, i, l) * gj.gamma.at(k, j, q)
                                    - gj.gamma.at(q, i, l) * gj.dgamma.at(m, k, j, q);
                            }
                            dr_mixed.set(m, k, l, i, j, s);
                        }
                    }
                }
            }
        }
        let mut d_riemann = Tensor5::zeros(d);
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        for w in 0..d {
                            let mut t = 0.0;
                            for k in 0..d {
                                t += mj.dg(m, l, k) * r_mixed.at(k, w, i, j)
                                    + mj.g[(l, k)] * dr_mixed.at(m, k, w, i, j);
                            }
                            d_riemann.set(m, i, j, l, w, t);
                        }
                    }
                }
            }
        }

        // Covariant derivative of the (0,4) curvature.
        let mut nabla_riemann = Tensor5::zeros(d);
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        for w in 0..d {
                            let mut s = d_riemann.at(m, i, j, l, w);
                            for a in 0..d {
                                s -= gj.gamma.at(a, m, i) * self.riemann.at(a, j, l, w);
                                s -= gj.gamma.at(a, m, j) * self.riemann.at(i, a, l, w);
                                s -= gj.gamma.at(a, m, l) * self.riemann.at(i, j, a, w);
                                s -= gj.gamma.at(a, m, w) * self.riemann.at(i, j, l, a);
                            }
                            nabla_riemann.set(m, i, j, l, w, s);
                        }
                    }
                }
            }
        }

        // ∇Ric and dS by contraction (∇ commutes with g-contractions).
        let mut nabla_ricci = Tensor3::zeros(d);
        for m in 0..d {
            for u in 0..d {
                for v in 0..d {
                    let mut t = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            t += mj.inv[(a, b)] * nabla_riemann.at(m, a, u, b, v);
                        }
                    }
                    nabla_ricci.set(m, u, v, t);
                }
            }
        }
        let mut d_scalar = DVector::zeros(d);
        for m in 0..d {
            let mut s = 0.0;
            for u in 0..d {
                for v in 0..d {
                    s += mj.inv[(u, v)] * nabla_ricci.at(m, u, v);
                }
            }
            d_scalar[m] = s;
        }

        if self.dim >= 3 {
            let c1 = 1.0 / (d as f64 - 2.0);
            let c2 = 1.0 / (2.0 * (d as f64 - 1.0));
            let mut np = Tensor3::zeros(d);
            for m in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        np.set(
                            m,
                            i,
                            j,
                            c1 * (nabla_ricci.at(m, i, j) - d_scalar[m] * c2 * mj.g[(i, j)]),
                        );
                    }
                }
            }
            let mut cotton = Tensor3::zeros(d);
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        cotton.set(x, y, z, np.at(x, y, z) - np.at(y, x, z));
                    }
                }
            }
            if self.dim >= 4 {
                // (∇_m W) = (∇_m R) - g ◇ (∇_m P); ∇g = 0.
                let mut nw = Tensor5::zeros(d);
                for m in 0..d {
                    let mut npm = DMatrix::zeros(d, d);
                    for i in 0..d {
                        for j in 0..d {
                            npm[(i, j)] = np.at(m, i, j);
                        }
                    }
                    let knm = kulkarni_nomizu(&mj.g, &npm);
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                for l in 0..d {
                                    nw.set(
                                        m,
                                        i,
                                        j,
                                        k,
                                        l,
                                        nabla_riemann.at(m, i, j, k, l) - knm.at(i, j, k, l),
                                    );
                                }
                            }
                        }
                    }
                }
                self.nabla_weyl = Some(nw);
            }
            self.nabla_schouten = Some(np);
            self.cotton = Some(cotton);
        }
        self.nabla_riemann = Some(nabla_riemann);
        self.nabla_ricci = Some(nabla_ricci);
        self.d_scalar = Some(d_scalar);
    }

    pub fn schouten(&self) -> Result<&DMatrix<f64>> {
        self.schouten.as_ref().ok_or(Error::Dimension {
            required: 3,
            actual: self.dim,
        })
    }

    pub fn weyl(&self) -> Result<&Tensor4> {
        self.weyl.as_ref().ok_or(Error::Dimension {
            required: 4,
            actual: self.dim,
        })
    }

    pub fn cotton(&self) -> Result<&Tensor3> {
        self.cotton.as_ref().ok_or(Error::Dimension {
            required: 3,
            actual: self.dim,
        })
    }

    pub fn nabla_schouten(&self) -> Result<&Tensor3> {
        self.nabla_schouten.as_ref().ok_or(Error::Dimension {
            required: 3,
            actual: self.dim,
        })
    }

    pub fn nabla_riemann(&self) -> Result<&Tensor5> {
        self.nabla_riemann.as_ref().ok_or(Error::Dimension {
            required: 2,
            actual: self.dim,
        })
    }

    /// Divergence of the Weyl tensor: (div W)(X,Y,Z) = g^{ab} (∇_a W)(X,Y,e_b,Z),
    /// normalized so that (d-3) C = div W.
    pub fn div_weyl(&self) -> Result<Tensor3> {
        let d = self.dim;
        let nw = self.nabla_weyl.as_ref().ok_or(Error::Dimension {
            required: 4,
            actual: d,
        })?;
        let mut out = Tensor3::zeros(d);
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let mut s = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            s += self.inv[(a, b)] * nw.at(a, x, y, b, z);
                        }
                    }
                    out.set(x, y, z, s);
                }
            }
        }
        Ok(out)
    }

    /// Curvature as an endomorphism: (R(U,V))^k_l, raising the third slot of
    /// the stored (0,4) tensor R(U, V, ., W) = g(R(U,V) W, .).
    pub fn curvature_endomorphism(&self, u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        let mut out = DMatrix::zeros(d, d);
        for k in 0..d {
            for l in 0..d {
                let mut s = 0.0;
                for m in 0..d {
                    let mut r_uv = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            r_uv += self.riemann.at(i, j, m, l) * u[i] * v[j];
                        }
                    }
                    s += self.inv[(k, m)] * r_uv;
                }
                out[(k, l)] = s;
            }
        }
        out
    }
}

/// Kulkarni-Nomizu product of two symmetric bilinear forms.
pub fn kulkarni_nomizu(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Tensor4 {
    let d = a.nrows();
    let mut out = Tensor4::zeros(d);
    for u in 0..d {
        for v in 0..d {
            for x in 0..d {
                for y in 0..d {
                    out.set(
                        u,
                        v,
                        x,
                        y,
                        a[(u, x)] * b[(v, y)] + a[(v, y)] * b[(u, x)]
                            - a[(u, y)] * b[(v, x)]
                            - a[(v, x)] * b[(u, y)],
                    );
                }
            }
        }
    }
    out
}

pub fn christoffel(g: &MetricField, p: &Point) -> Result<Tensor3> {
    let mj = g.jets(p)?;
    Ok(gamma_jets(&mj, Depth::Connection).gamma)
}

pub fn riemann(g: &MetricField, p: &Point) -> Result<Tensor4> {
    Ok(CurvatureData::connection_level(g, p)?.riemann)
}

pub fn ricci(g: &MetricField, p: &Point) -> Result<DMatrix<f64>> {
    Ok(CurvatureData::connection_level(g, p)?.ricci)
}

pub fn scalar(g: &MetricField, p: &Point) -> Result<f64> {
    Ok(CurvatureData::connection_level(g, p)?.scalar)
}

pub fn schouten(g: &MetricField, p: &Point) -> Result<DMatrix<f64>> {
    CurvatureData::connection_level(g, p)?.schouten().cloned()
}

pub fn weyl(g: &MetricField, p: &Point) -> Result<Tensor4> {
    CurvatureData::connection_level(g, p)?.weyl().cloned()
}

pub fn cotton(g: &MetricField, p: &Point) -> Result<Tensor3> {
    CurvatureData::new(g, p)?.cotton().cloned()
}

/// Hessian form of a scalar field: H(X,Y) = (∇_X dσ)(Y).
pub fn hessian(g: &MetricField, sigma: &ScalarField, p: &Point) -> Result<DMatrix<f64>> {
    let mj = g.jets(p)?;
    let gamma = gamma_jets(&mj, Depth::Connection).gamma;
    let sj = sigma.jet(p)?;
    let d = mj.dim;
    let mut h = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut s = sj.d2(i, j);
            for k in 0..d {
                s -= gamma.at(k, i, j) * sj.d1(k);
            }
            h[(i, j)] = s;
        }
    }
    Ok(h)
}

/// One verdict of a sampled predicate, with its residual and threshold.
#[derive(Debug, Clone, Serialize)]
pub struct PredicateReport {
    pub verdict: bool,
    pub max_deviation: f64,
    pub threshold: f64,
    pub samples: usize,
}

pub const PREDICATE_REL_TOL: f64 = 1e-7;

/// Einstein test: max |Ric - (S/d) g| over the samples, relative to scale.
pub fn is_einstein(g: &MetricField, samples: &[Point]) -> Result<PredicateReport> {
    let mut max_dev = 0.0f64;
    let mut scale = 0.0f64;
    for p in samples {
        let data = CurvatureData::connection_level(g, p)?;
        let f = data.scalar / data.dim as f64;
        for i in 0..data.dim {
            for j in 0..data.dim {
                max_dev = max_dev.max((data.ricci[(i, j)] - f * data.g[(i, j)]).abs());
                scale = scale.max(data.ricci[(i, j)].abs()).max(data.g[(i, j)].abs());
            }
        }
    }
    let threshold = PREDICATE_REL_TOL * tensor_scale(scale);
    Ok(PredicateReport {
        verdict: max_dev < threshold,
        max_deviation: max_dev,
        threshold,
        samples: samples.len(),
    })
}

/// C-space test: max |C| over the samples, relative to the derivative scale.
pub fn is_c_space(g: &MetricField, samples: &[Point]) -> Result<PredicateReport> {
    let mut max_dev = 0.0f64;
    let mut scale = 0.0f64;
    for p in samples {
        let data = CurvatureData::new(g, p)?;
        let c = data.cotton()?;
        max_dev = max_dev.max(c.max_abs());
        let np = data.nabla_schouten()?;
        scale = scale.max(np.max_abs()).max(data.riemann.max_abs());
    }
    let threshold = PREDICATE_REL_TOL * tensor_scale(scale);
    Ok(PredicateReport {
        verdict: max_dev < threshold,
        max_deviation: max_dev,
        threshold,
        samples: samples.len(),
    })
}

/// Residuals of the algebraic curvature symmetries; all should be ~0.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryResiduals {
    pub gamma_symmetry: f64,
    pub riemann_antisym_12: f64,
    pub riemann_antisym_34: f64,
    pub riemann_pair_swap: f64,
    pub first_bianchi: f64,
    pub ricci_symmetry: f64,
    pub weyl_trace: Option<f64>,
    pub cotton_antisym: Option<f64>,
    pub schouten_trace: Option<f64>,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        [
            self.gamma_symmetry,
            self.riemann_antisym_12,
            self.riemann_antisym_34,
            self.riemann_pair_swap,
            self.first_bianchi,
            self.ricci_symmetry,
            self.weyl_trace.unwrap_or(0.0),
            self.cotton_antisym.unwrap_or(0.0),
            self.schouten_trace.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0f64, f64::max)
    }
}

pub fn symmetry_residuals(data: &CurvatureData) -> SymmetryResiduals {
    let d = data.dim;
    let r = &data.riemann;
    let scale = tensor_scale(r.max_abs());
    let mut a12 = 0.0f64;
    let mut a34 = 0.0f64;
    let mut swap = 0.0f64;
    let mut bianchi = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    a12 = a12.max((r.at(i, j, k, l) + r.at(j, i, k, l)).abs());
                    a34 = a34.max((r.at(i, j, k, l) + r.at(i, j, l, k)).abs());
                    swap = swap.max((r.at(i, j, k, l) - r.at(k, l, i, j)).abs());
                    bianchi = bianchi
                        .max((r.at(i, j, k, l) + r.at(j, k, i, l) + r.at(k, i, j, l)).abs());
                }
            }
        }
    }
    let mut gamma_sym = 0.0f64;
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                gamma_sym = gamma_sym.max((data.gamma.at(k, i, j) - data.gamma.at(k, j, i)).abs());
            }
        }
    }
    let mut ric_sym = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            ric_sym = ric_sym.max((data.ricci[(i, j)] - data.ricci[(j, i)]).abs());
        }
    }
    let weyl_trace = data.weyl.as_ref().map(|w| {
        let mut t = 0.0f64;
        for x in 0..d {
            for y in 0..d {
                let (mut t13, mut t14, mut t12) = (0.0, 0.0, 0.0);
                for a in 0..d {
                    for b in 0..d {
                        t13 += data.inv[(a, b)] * w.at(a, x, b, y);
                        t14 += data.inv[(a, b)] * w.at(a, x, y, b);
                        t12 += data.inv[(a, b)] * w.at(a, b, x, y);
                    }
                }
                t = t.max(t13.abs()).max(t14.abs()).max(t12.abs());
            }
        }
        t / tensor_scale(w.max_abs().max(data.riemann.max_abs()))
    });
    let cotton_antisym = data.cotton.as_ref().map(|c| {
        let mut t = 0.0f64;
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    t = t.max((c.at(x, y, z) + c.at(y, x, z)).abs());
                }
            }
        }
        t / tensor_scale(c.max_abs().max(data.riemann.max_abs()))
    });
    let schouten_trace = data.schouten.as_ref().map(|p| {
        let mut tr = 0.0;
        for i in 0..d {
            for j in 0..d {
                tr += data.inv[(i, j)] * p[(i, j)];
            }
        }
        let expected = data.scalar / (2.0 * (d as f64 - 1.0));
        (tr - expected).abs() / tensor_scale(data.scalar.abs())
    });

    SymmetryResiduals {
        gamma_symmetry: gamma_sym / scale.max(1.0),
        riemann_antisym_12: a12 / scale,
        riemann_antisym_34: a34 / scale,
        riemann_pair_swap: swap / scale,
        first_bianchi: bianchi / scale,
        ricci_symmetry: ric_sym / tensor_scale(data.ricci.amax()),
        weyl_trace,
        cotton_antisym,
        schouten_trace,
    }
}
