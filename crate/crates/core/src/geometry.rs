//! Charts, points, metric fields and scalar fields over a single coordinate
//! chart. Metric components carry exact derivatives through order 3, supplied
//! either by expression-tree jets or by closed-form jet closures; finite
//! differences never enter the production path.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet3;

/// Relative degeneracy tolerance: |det g| must exceed this times (max |g_ij|)^d.
pub const DEGENERACY_REL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Chart {
    dim: usize,
    coord_names: Vec<String>,
    /// Per-coordinate open interval bounds; `None` means unbounded.
    domain: Vec<Option<(f64, f64)>>,
}

impl Chart {
    pub fn new(coord_names: &[&str]) -> Arc<Chart> {
        Self::with_domain(coord_names, &vec![None; coord_names.len()])
    }

    pub fn with_domain(coord_names: &[&str], domain: &[Option<(f64, f64)>]) -> Arc<Chart> {
        assert!(coord_names.len() >= 2, "charts need dimension >= 2");
        assert_eq!(coord_names.len(), domain.len());
        let mut seen = coord_names.to_vec();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), coord_names.len(), "coordinate names must be distinct");
        Arc::new(Chart {
            dim: coord_names.len(),
            coord_names: coord_names.iter().map(|s| s.to_string()).collect(),
            domain: domain.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coord_names(&self) -> Vec<&str> {
        self.coord_names.iter().map(|s| s.as_str()).collect()
    }

    pub fn coord_name(&self, i: usize) -> &str {
        &self.coord_names[i]
    }

    pub fn domain(&self) -> &[Option<(f64, f64)>] {
        &self.domain
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.dim
            && coords.iter().zip(&self.domain).all(|(x, b)| match b {
                Some((lo, hi)) => *x > *lo && *x < *hi,
                None => x.is_finite(),
            })
    }

    /// Deterministic low-discrepancy points inside the domain box.
    ///
    /// Uses the R2 additive recurrence; unbounded coordinates sample a
    /// centered box of half-width 1.
    pub fn sample_points(self: &Arc<Chart>, n: usize, margin: f64) -> Vec<Point> {
        let d = self.dim;
        // Generalized golden ratio for the R2 sequence in d dimensions.
        let mut phi = 1.5f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
        }
        let alphas: Vec<f64> = (1..=d).map(|k| (1.0 / phi.powi(k as i32)) % 1.0).collect();
        let mut out = Vec::with_capacity(n);
        for step in 1..=n {
            let coords: Vec<f64> = (0..d)
                .map(|i| {
                    let u = (0.5 + alphas[i] * step as f64) % 1.0;
                    let (lo, hi) = match self.domain[i] {
                        Some((lo, hi)) => (lo, hi),
                        None => (-1.0, 1.0),
                    };
                    let w = hi - lo;
                    lo + w * margin + u * w * (1.0 - 2.0 * margin)
                })
                .collect();
            out.push(Point::new(self.clone(), coords).expect("sample inside box"));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Point {
    chart: Arc<Chart>,
    coords: Vec<f64>,
}

impl Point {
    pub fn new(chart: Arc<Chart>, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != chart.dim() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, chart `{}` needs {}",
                coords.len(),
                chart.coord_names().join(","),
                chart.dim()
            )));
        }
        if !chart.contains(&coords) {
            return Err(Error::Domain(format!(
                "coordinates {:?} outside chart domain {:?}",
                coords,
                chart.domain()
            )));
        }
        Ok(Point { chart, coords })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn shifted(&self, idx: usize, delta: f64) -> Result<Point> {
        let mut c = self.coords.clone();
        c[idx] += delta;
        Point::new(self.chart.clone(), c)
    }
}

/// All metric data at a point needed by the curvature stack: components,
/// inverse, and coordinate partials through order 3 (unpacked).
#[derive(Debug, Clone)]
pub struct MetricJets {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub inv: DMatrix<f64>,
    pub det: f64,
    /// dg[k][i][j] = ∂_k g_ij
    pub dg: Vec<f64>,
    /// d2g[k][l][i][j] = ∂_k ∂_l g_ij
    pub d2g: Vec<f64>,
    /// d3g[k][l][m][i][j] = ∂_k ∂_l ∂_m g_ij
    pub d3g: Vec<f64>,
}

impl MetricJets {
    #[inline]
    pub fn dg(&self, k: usize, i: usize, j: usize) -> f64 {
        self.dg[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn d2g(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.d2g[((k * self.dim + l) * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn d3g(&self, k: usize, l: usize, m: usize, i: usize, j: usize) -> f64 {
        self.d3g[(((k * self.dim + l) * self.dim + m) * self.dim + i) * self.dim + j]
    }
}

type ComponentJets = Vec<Jet3>; // packed over i <= j
type MetricProvider = Arc<dyn Fn(&[f64]) -> ComponentJets + Send + Sync>;

fn pack_sym(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

#[derive(Clone)]
pub struct MetricField {
    chart: Arc<Chart>,
    signature: (usize, usize),
    provider: MetricProvider,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField")
            .field("chart", &self.chart.coord_names())
            .field("signature", &self.signature)
            .finish()
    }
}

impl MetricField {
    /// Build from per-component expressions; `components[(i, j)]` with i <= j,
    /// missing entries are zero.
    pub fn from_exprs(
        chart: Arc<Chart>,
        signature: (usize, usize),
        components: Vec<((usize, usize), Expr)>,
    ) -> MetricField {
        let d = chart.dim();
        let mut table: Vec<Option<Expr>> = vec![None; d * (d + 1) / 2];
        for ((i, j), e) in components {
            table[pack_sym(d, i, j)] = Some(e);
        }
        let provider = Arc::new(move |coords: &[f64]| {
            let vars: Vec<Jet3> = (0..d).map(|i| Jet3::variable(d, i, coords[i])).collect();
            table
                .iter()
                .map(|e| match e {
                    Some(expr) => expr.eval_jet(&vars),
                    None => Jet3::constant(d, 0.0),
                })
                .collect()
        });
        MetricField {
            chart,
            signature,
            provider,
        }
    }

    /// Build from a closure returning the packed (i <= j) component jets.
    pub fn from_jet_fn(
        chart: Arc<Chart>,
        signature: (usize, usize),
        f: impl Fn(&[f64]) -> ComponentJets + Send + Sync + 'static,
    ) -> MetricField {
        MetricField {
            chart,
            signature,
            provider: Arc::new(f),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if !Arc::ptr_eq(p.chart(), &self.chart) && p.chart().coord_names() != self.chart.coord_names()
        {
            return Err(Error::Domain("point lives on a different chart".into()));
        }
        if !self.chart.contains(p.coords()) {
            return Err(Error::Domain(format!(
                "point {:?} outside metric chart domain",
                p.coords()
            )));
        }
        Ok(())
    }

    pub fn component_jets(&self, p: &Point) -> Result<Vec<Jet3>> {
        self.check_point(p)?;
        let jets = (self.provider)(p.coords());
        if jets.iter().any(|j| !j.is_finite()) {
            return Err(Error::Domain(format!(
                "metric components not finite at {:?}",
                p.coords()
            )));
        }
        Ok(jets)
    }

    /// Component matrix at `p`, with nondegeneracy and signature validated.
    pub fn eval(&self, p: &Point) -> Result<DMatrix<f64>> {
        let (g, det) = self.eval_with_det(p)?;
        let _ = det;
        self.validate_signature(&g)?;
        Ok(g)
    }

    fn eval_with_det(&self, p: &Point) -> Result<(DMatrix<f64>, f64)> {
        let jets = self.component_jets(p)?;
        let d = self.dim();
        let mut g = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = jets[pack_sym(d, i, j)].v;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        let det = g.clone().lu().determinant();
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = DEGENERACY_REL * scale.powi(d as i32);
        if det.abs() <= tol {
            return Err(Error::DegenerateMetric { det, tol });
        }
        Ok((g, det))
    }

    fn validate_signature(&self, g: &DMatrix<f64>) -> Result<()> {
        let eig = g.clone().symmetric_eigen();
        let neg = eig.eigenvalues.iter().filter(|&&e| e < 0.0).count();
        let pos = eig.eigenvalues.iter().filter(|&&e| e > 0.0).count();
        if (neg, pos) != self.signature {
            return Err(Error::Domain(format!(
                "signature ({neg},{pos}) does not match declared {:?}",
                self.signature
            )));
        }
        Ok(())
    }

    /// Exact partials of all components through order 3, plus g and g^{-1}.
    pub fn jets(&self, p: &Point) -> Result<MetricJets> {
        let jets = self.component_jets(p)?;
        let d = self.dim();
        let mut g = DMatrix::zeros(d, d);
        let mut dg = vec![0.0; d * d * d];
        let mut d2g = vec![0.0; d * d * d * d];
        let mut d3g = vec![0.0; d * d * d * d * d];
        for i in 0..d {
            for j in 0..d {
                let jet = &jets[pack_sym(d, i, j)];
                g[(i, j)] = jet.v;
                for k in 0..d {
                    dg[(k * d + i) * d + j] = jet.d1(k);
                    for l in 0..d {
                        d2g[((k * d + l) * d + i) * d + j] = jet.d2(k, l);
                        for m in 0..d {
                            d3g[(((k * d + l) * d + m) * d + i) * d + j] = jet.d3(k, l, m);
                        }
                    }
                }
            }
        }
        let lu = g.clone().lu();
        let det = lu.determinant();
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = DEGENERACY_REL * scale.powi(d as i32);
        if det.abs() <= tol {
            return Err(Error::DegenerateMetric { det, tol });
        }
        let inv = lu.try_inverse().ok_or(Error::DegenerateMetric { det, tol })?;
        Ok(MetricJets {
            dim: d,
            g,
            inv,
            det,
            dg,
            d2g,
            d3g,
        })
    }

    /// The metric e^{2 phi} g with jets composed through order 3.
    pub fn conformal_rescale(&self, phi: &ScalarField) -> MetricField {
        let provider = self.provider.clone();
        let phi_provider = phi.provider.clone();
        MetricField {
            chart: self.chart.clone(),
            signature: self.signature,
            provider: Arc::new(move |coords: &[f64]| {
                let factor = phi_provider(coords).scale(2.0).exp();
                provider(coords)
                    .into_iter()
                    .map(|j| j.mul_jet(&factor))
                    .collect()
            }),
        }
    }

    /// Musical isomorphism: covector -> vector.
    pub fn raise(&self, p: &Point, covector: &DVector<f64>) -> Result<DVector<f64>> {
        let (g, _) = self.eval_with_det(p)?;
        let inv = g
            .lu()
            .try_inverse()
            .ok_or(Error::Domain("metric not invertible".into()))?;
        Ok(inv * covector)
    }

    /// Musical isomorphism: vector -> covector.
    pub fn lower(&self, p: &Point, vector: &DVector<f64>) -> Result<DVector<f64>> {
        let (g, _) = self.eval_with_det(p)?;
        Ok(g * vector)
    }
}

type ScalarProvider = Arc<dyn Fn(&[f64]) -> Jet3 + Send + Sync>;

#[derive(Clone)]
pub struct ScalarField {
    chart: Arc<Chart>,
    provider: ScalarProvider,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("chart", &self.chart.coord_names())
            .finish()
    }
}

impl ScalarField {
    pub fn from_expr(chart: Arc<Chart>, expr: Expr) -> ScalarField {
        let d = chart.dim();
        ScalarField {
            chart,
            provider: Arc::new(move |coords: &[f64]| {
                let vars: Vec<Jet3> = (0..d).map(|i| Jet3::variable(d, i, coords[i])).collect();
                expr.eval_jet(&vars)
            }),
        }
    }

    pub fn from_jet_fn(
        chart: Arc<Chart>,
        f: impl Fn(&[f64]) -> Jet3 + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField {
            chart,
            provider: Arc::new(f),
        }
    }

    pub fn parse(chart: Arc<Chart>, src: &str) -> Result<ScalarField> {
        let names = chart.coord_names();
        let expr = crate::expr::parse(src, &names)?;
        Ok(ScalarField::from_expr(chart.clone(), expr))
    }

    pub fn constant(chart: Arc<Chart>, v: f64) -> ScalarField {
        let d = chart.dim();
        ScalarField {
            chart,
            provider: Arc::new(move |_| Jet3::constant(d, v)),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn jet(&self, p: &Point) -> Result<Jet3> {
        if !self.chart.contains(p.coords()) {
            return Err(Error::Domain(format!(
                "point {:?} outside scalar field domain",
                p.coords()
            )));
        }
        Ok((self.provider)(p.coords()))
    }

    pub fn value(&self, p: &Point) -> Result<f64> {
        Ok(self.jet(p)?.v)
    }

    pub fn negated(&self) -> ScalarField {
        let provider = self.provider.clone();
        ScalarField {
            chart: self.chart.clone(),
            provider: Arc::new(move |c| provider(c).scale(-1.0)),
        }
    }
}
