//! Built-in metric families with exact jets and structural metadata: flat
//! space, pp/pr/plane waves and their constant-coefficient subfamily, the
//! general recurrent normal form, Einstein models, block products, the two
//! ambient constructions, cones, and fully generic expression metrics.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curvature::{tensor_scale, CurvatureData};
use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::geometry::{Chart, MetricField, Point, ScalarField};
use crate::jet::Jet3;

pub const FRAME_ORTHO_TOL: f64 = 1e-10;
pub const RECURRENCE_TOL: f64 = 1e-7;

/// Declarative description of a built-in metric family member.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpacetimeSpec {
    Flat {
        dim: usize,
        #[serde(default)]
        time_dims: usize,
    },
    PpWave {
        n: usize,
        f: String,
    },
    PrWave {
        n: usize,
        f: String,
    },
    PlaneWave {
        n: usize,
        /// a[i][j](z) expressions, entry-for-entry symmetric.
        a: Vec<Vec<String>>,
    },
    CahenWallach {
        n: usize,
        a: Vec<Vec<f64>>,
    },
    RecurrentGeneral {
        n: usize,
        f: String,
        u: Vec<String>,
        g_block: Vec<Vec<String>>,
    },
    EinsteinModel {
        kind: EinsteinKind,
        dim: usize,
    },
    RiemannianBlockProduct {
        wave: Box<SpacetimeSpec>,
        block: Box<SpacetimeSpec>,
    },
    AmbientEinstein {
        base: Box<SpacetimeSpec>,
    },
    AmbientRicciFlat {
        base: Box<SpacetimeSpec>,
    },
    Cone {
        base: Box<SpacetimeSpec>,
    },
    Generic {
        coords: Vec<String>,
        signature: (usize, usize),
        /// (i, j, expression) for i <= j; missing components are zero.
        components: Vec<(usize, usize, String)>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EinsteinKind {
    Sphere,
    Hyperbolic,
}

/// A recurrent lightlike direction with its recurrence 1-form and the
/// adapted-frame constructor.
#[derive(Clone)]
pub struct RecurrentStructure {
    /// Coordinate index of the recurrent field X (a coordinate direction for
    /// every built-in family).
    pub x_index: usize,
    /// Whether the recurrence form vanishes identically (X parallel).
    pub parallel: bool,
    theta_fn: Arc<dyn Fn(&Point) -> Result<DVector<f64>> + Send + Sync>,
}

impl std::fmt::Debug for RecurrentStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RecurrentStructure")
            .field("x_index", &self.x_index)
            .field("parallel", &self.parallel)
            .finish()
    }
}

impl RecurrentStructure {
    /// Recurrence 1-form theta with nabla X = theta (x) X, as a covector.
    pub fn theta(&self, p: &Point) -> Result<DVector<f64>> {
        (self.theta_fn)(p)
    }

    /// Adapted frame (X, E_1..E_n, Z) as matrix columns at p:
    /// g(X,Z) = 1, g(Z,Z) = 0, g(E_i,E_j) = delta, g(E_i,Z) = g(E_i,X) = 0.
    pub fn adapted_frame(&self, g: &MetricField, p: &Point) -> Result<DMatrix<f64>> {
        let d = g.dim();
        let gm = g.eval(p)?;
        let mut frame = DMatrix::zeros(d, d);
        let mut x = DVector::zeros(d);
        x[self.x_index] = 1.0;
        frame.set_column(0, &x);

        // Screen directions: Gram-Schmidt under g of the coordinate
        // directions pairing to zero with X.
        let mut screen: Vec<DVector<f64>> = Vec::new();
        for i in 0..d {
            if i == self.x_index {
                continue;
            }
            let mut cand = DVector::zeros(d);
            cand[i] = 1.0;
            if (gm.row(self.x_index) * &cand)[0].abs() > 1e-13 {
                continue; // transversal direction, handled below
            }
            for e in &screen {
                let c = (e.transpose() * &gm * &cand)[0];
                cand -= e * c;
            }
            let norm_sq = (cand.transpose() * &gm * &cand)[0];
            if norm_sq > 1e-12 {
                screen.push(cand / norm_sq.sqrt());
            }
        }
        let n = d - 2;
        if screen.len() != n {
            return Err(Error::NoRecurrentField);
        }
        for (i, e) in screen.iter().enumerate() {
            frame.set_column(1 + i, e);
        }

        // Transversal null vector: normalize the pairing with X, remove the
        // screen components, then the null correction along X.
        let mut z_dir = None;
        for i in 0..d {
            let mut cand = DVector::zeros(d);
            cand[i] = 1.0;
            let pair = (gm.row(self.x_index) * &cand)[0];
            if pair.abs() > 1e-13 {
                z_dir = Some(cand / pair);
                break;
            }
        }
        let mut z = z_dir.ok_or(Error::NoRecurrentField)?;
        for e in &screen {
            let c = (e.transpose() * &gm * &z)[0];
            z -= e * c;
        }
        let zz = (z.transpose() * &gm * &z)[0];
        z -= &x * (0.5 * zz);
        frame.set_column(d - 1, &z);

        let gram = frame.transpose() * &gm * &frame;
        let mut expected = DMatrix::zeros(d, d);
        expected[(0, d - 1)] = 1.0;
        expected[(d - 1, 0)] = 1.0;
        for i in 0..n {
            expected[(1 + i, 1 + i)] = 1.0;
        }
        if (gram - expected).amax() > FRAME_ORTHO_TOL {
            return Err(Error::NoRecurrentField);
        }
        Ok(frame)
    }

    /// max |nabla_{e_i} X - theta(e_i) X| over coordinate directions at p.
    pub fn recurrence_residual(&self, g: &MetricField, p: &Point) -> Result<f64> {
        let gamma = crate::curvature::christoffel(g, p)?;
        let theta = self.theta(p)?;
        let d = g.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for k in 0..d {
                // (nabla_{e_i} X)^k = Γ^k_{i x}
                let val = gamma.at(k, i, self.x_index);
                let expect = if k == self.x_index { theta[i] } else { 0.0 };
                worst = worst.max((val - expect).abs());
            }
        }
        Ok(worst)
    }
}

/// A built metric family member: the metric plus structural metadata.
pub struct Spacetime {
    pub spec: SpacetimeSpec,
    pub metric: MetricField,
    pub recurrent: Option<RecurrentStructure>,
    /// Coordinate index of a parallel field promised by the construction.
    pub parallel_coord: Option<usize>,
    /// Base member for ambient, cone and product constructions.
    pub base: Option<Box<Spacetime>>,
    /// Scalar curvature promised by the family, when constant by design.
    pub expected_scalar: Option<f64>,
}

impl Spacetime {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Family-specific base point used by the analyses: bounded coordinates
    /// at their box centers, wave transversal coordinate at 1, rest at 0.
    pub fn default_base_point(&self) -> Point {
        let chart = self.metric.chart().clone();
        let is_wave = matches!(
            self.spec,
            SpacetimeSpec::PpWave { .. }
                | SpacetimeSpec::PrWave { .. }
                | SpacetimeSpec::PlaneWave { .. }
                | SpacetimeSpec::CahenWallach { .. }
                | SpacetimeSpec::RecurrentGeneral { .. }
                | SpacetimeSpec::RiemannianBlockProduct { .. }
        );
        let d = chart.dim();
        let coords: Vec<f64> = chart
            .domain()
            .iter()
            .enumerate()
            .map(|(i, b)| match b {
                Some((lo, hi)) => 0.5 * (lo + hi),
                None => {
                    if is_wave && i == d - 1 {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
            .collect();
        Point::new(chart, coords).expect("default base point inside domain")
    }

    pub fn recurrent(&self) -> Result<&RecurrentStructure> {
        self.recurrent.as_ref().ok_or(Error::NoRecurrentField)
    }
}

fn wave_chart(n: usize) -> Arc<Chart> {
    let mut names: Vec<String> = vec!["x".into()];
    for i in 1..=n {
        names.push(format!("y{i}"));
    }
    names.push("z".into());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::new(&refs)
}

fn parse_on(chart: &Arc<Chart>, src: &str) -> Result<Expr> {
    expr::parse(src, &chart.coord_names())
}

fn zero_theta(d: usize) -> Arc<dyn Fn(&Point) -> Result<DVector<f64>> + Send + Sync> {
    Arc::new(move |_p: &Point| Ok(DVector::zeros(d)))
}

/// theta = (1/2) (df/dx) dz for the recurrent normal form.
fn half_fx_theta(
    f: Expr,
    d: usize,
    x_index: usize,
    z_index: usize,
) -> Arc<dyn Fn(&Point) -> Result<DVector<f64>> + Send + Sync> {
    Arc::new(move |p: &Point| {
        let vars: Vec<Jet3> = (0..d)
            .map(|i| Jet3::variable(d, i, p.coords()[i]))
            .collect();
        let jet = f.eval_jet(&vars);
        let mut theta = DVector::zeros(d);
        theta[z_index] = 0.5 * jet.d1(x_index);
        Ok(theta)
    })
}

/// The plane-wave potential sum a_ij(z) y_i y_j as an expression tree.
fn plane_wave_potential(n: usize, a: &[Vec<Expr>]) -> Expr {
    let mut f = Expr::Const(0.0);
    for i in 0..n {
        for j in 0..n {
            let term = Expr::mul(
                a[i][j].clone(),
                Expr::mul(Expr::var(1 + i), Expr::var(1 + j)),
            );
            f = Expr::add(f, term);
        }
    }
    f
}

fn pack(i: usize, j: usize, dim: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

/// Validate and build a family member.
pub fn build(spec: &SpacetimeSpec) -> Result<Spacetime> {
    match spec {
        SpacetimeSpec::Flat { dim, time_dims } => {
            if *dim < 2 || *time_dims > *dim {
                return Err(Error::Spec(format!(
                    "flat family needs dim >= 2 and time_dims <= dim, got {dim}, {time_dims}"
                )));
            }
            let names: Vec<String> = (0..*dim).map(|i| format!("x{i}")).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let chart = Chart::new(&refs);
            let comps = (0..*dim)
                .map(|i| {
                    (
                        (i, i),
                        Expr::Const(if i < *time_dims { -1.0 } else { 1.0 }),
                    )
                })
                .collect();
            let metric = MetricField::from_exprs(chart, (*time_dims, dim - time_dims), comps);
            Ok(Spacetime {
                spec: spec.clone(),
                metric,
                recurrent: None,
                parallel_coord: Some(0),
                base: None,
                expected_scalar: Some(0.0),
            })
        }
        SpacetimeSpec::PpWave { n, f } => {
            let chart = wave_chart(*n);
            let fe = parse_on(&chart, f)?;
            if !fe.independent_of(0) {
                return Err(Error::Spec(
                    "pp family requires f independent of x; use the pr family instead".into(),
                ));
            }
            build_wave(spec.clone(), chart, *n, fe, None, None)
        }
        SpacetimeSpec::PrWave { n, f } => {
            let chart = wave_chart(*n);
            let fe = parse_on(&chart, f)?;
            build_wave(spec.clone(), chart, *n, fe, None, None)
        }
        SpacetimeSpec::PlaneWave { n, a } => {
            let chart = wave_chart(*n);
            let a_exprs = parse_symmetric_table(&chart, *n, a)?;
            for e in a_exprs.iter().flatten() {
                for v in 0..=*n {
                    if !e.independent_of(v) {
                        return Err(Error::Spec(
                            "plane-wave coefficients may depend on z only".into(),
                        ));
                    }
                }
            }
            let fe = plane_wave_potential(*n, &a_exprs);
            build_wave(spec.clone(), chart, *n, fe, None, None)
        }
        SpacetimeSpec::CahenWallach { n, a } => {
            if a.len() != *n || a.iter().any(|r| r.len() != *n) {
                return Err(Error::Spec("coefficient matrix must be n x n".into()));
            }
            for i in 0..*n {
                for j in 0..*n {
                    if a[i][j] != a[j][i] {
                        return Err(Error::Spec("coefficient matrix must be symmetric".into()));
                    }
                }
            }
            let chart = wave_chart(*n);
            let a_exprs: Vec<Vec<Expr>> = a
                .iter()
                .map(|row| row.iter().map(|&v| Expr::Const(v)).collect())
                .collect();
            let fe = plane_wave_potential(*n, &a_exprs);
            build_wave(spec.clone(), chart, *n, fe, None, None)
        }
        SpacetimeSpec::RecurrentGeneral { n, f, u, g_block } => {
            let chart = wave_chart(*n);
            let fe = parse_on(&chart, f)?;
            if u.len() != *n {
                return Err(Error::Spec("u needs n entries".into()));
            }
            let u_exprs: Vec<Expr> = u
                .iter()
                .map(|s| parse_on(&chart, s))
                .collect::<Result<_>>()?;
            let g_exprs = parse_symmetric_table(&chart, *n, g_block)?;
            for e in u_exprs.iter().chain(g_exprs.iter().flatten()) {
                if !e.independent_of(0) {
                    return Err(Error::Spec(
                        "the recurrent normal form needs x-independent u_i and g_ij".into(),
                    ));
                }
            }
            build_wave(spec.clone(), chart, *n, fe, Some(u_exprs), Some(g_exprs))
        }
        SpacetimeSpec::EinsteinModel { kind, dim } => build_einstein_model(spec, *kind, *dim),
        SpacetimeSpec::RiemannianBlockProduct { wave, block } => {
            build_block_product(spec, wave, block)
        }
        SpacetimeSpec::AmbientRicciFlat { base } => build_ambient_ricci_flat(spec, base),
        SpacetimeSpec::AmbientEinstein { base } => build_ambient_einstein(spec, base, false),
        SpacetimeSpec::Cone { base } => build_ambient_einstein(spec, base, true),
        SpacetimeSpec::Generic {
            coords,
            signature,
            components,
        } => {
            let refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
            let chart = Chart::new(&refs);
            let mut comps = Vec::new();
            for (i, j, src) in components {
                if *i >= coords.len() || *j >= coords.len() {
                    return Err(Error::Spec(format!(
                        "component index ({i},{j}) out of range"
                    )));
                }
                comps.push(((*i, *j), parse_on(&chart, src)?));
            }
            let metric = MetricField::from_exprs(chart, *signature, comps);
            Ok(Spacetime {
                spec: spec.clone(),
                metric,
                recurrent: None,
                parallel_coord: None,
                base: None,
                expected_scalar: None,
            })
        }
    }
}

fn parse_symmetric_table(
    chart: &Arc<Chart>,
    n: usize,
    table: &[Vec<String>],
) -> Result<Vec<Vec<Expr>>> {
    if table.len() != n || table.iter().any(|r| r.len() != n) {
        return Err(Error::Spec("coefficient table must be n x n".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if table[i][j] != table[j][i] {
                return Err(Error::Spec(
                    "coefficient table must be symmetric entry-for-entry".into(),
                ));
            }
        }
    }
    table
        .iter()
        .map(|row| row.iter().map(|s| parse_on(chart, s)).collect())
        .collect()
}

/// Shared constructor of the recurrent normal form
/// h = 2 dx dz + sum u_i dy_i dz + f dz^2 + g_ij dy_i dy_j.
fn build_wave(
    spec: SpacetimeSpec,
    chart: Arc<Chart>,
    n: usize,
    f: Expr,
    u: Option<Vec<Expr>>,
    g_block: Option<Vec<Vec<Expr>>>,
) -> Result<Spacetime> {
    let d = n + 2;
    let z_index = n + 1;
    let mut comps: Vec<((usize, usize), Expr)> = vec![
        ((0, z_index), Expr::Const(1.0)),
        ((z_index, z_index), f.clone()),
    ];
    match &g_block {
        Some(gb) => {
            for i in 0..n {
                for j in i..n {
                    comps.push(((1 + i, 1 + j), gb[i][j].clone()));
                }
            }
        }
        None => {
            for i in 0..n {
                comps.push(((1 + i, 1 + i), Expr::Const(1.0)));
            }
        }
    }
    if let Some(us) = &u {
        for (i, ue) in us.iter().enumerate() {
            comps.push((
                (1 + i, z_index),
                Expr::Div(Box::new(ue.clone()), Box::new(Expr::Const(2.0))),
            ));
        }
    }
    let metric = MetricField::from_exprs(chart, (1, n + 1), comps);
    let parallel = f.independent_of(0);
    let theta = if parallel {
        zero_theta(d)
    } else {
        half_fx_theta(f, d, 0, z_index)
    };
    Ok(Spacetime {
        spec,
        metric,
        recurrent: Some(RecurrentStructure {
            x_index: 0,
            parallel,
            theta_fn: theta,
        }),
        parallel_coord: if parallel { Some(0) } else { None },
        base: None,
        expected_scalar: None,
    })
}

fn build_einstein_model(spec: &SpacetimeSpec, kind: EinsteinKind, dim: usize) -> Result<Spacetime> {
    if dim < 2 {
        return Err(Error::Spec("Einstein models need dim >= 2".into()));
    }
    match kind {
        EinsteinKind::Sphere => {
            // Iterated polar coordinates of the unit sphere:
            // g_kk = prod_{j<k} sin^2(p_j).
            let names: Vec<String> = (1..=dim).map(|i| format!("p{i}")).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let domain: Vec<Option<(f64, f64)>> = (0..dim).map(|_| Some((0.35, 2.75))).collect();
            let chart = Chart::with_domain(&refs, &domain);
            let mut comps = Vec::new();
            for k in 0..dim {
                let mut e = Expr::Const(1.0);
                for j in 0..k {
                    e = Expr::mul(
                        e,
                        Expr::Pow(
                            Box::new(Expr::Sin(Box::new(Expr::var(j)))),
                            Box::new(Expr::Const(2.0)),
                        ),
                    );
                }
                comps.push(((k, k), e));
            }
            let metric = MetricField::from_exprs(chart, (0, dim), comps);
            Ok(Spacetime {
                spec: spec.clone(),
                metric,
                recurrent: None,
                parallel_coord: None,
                base: None,
                expected_scalar: Some((dim * (dim - 1)) as f64),
            })
        }
        EinsteinKind::Hyperbolic => {
            // Upper half space: g = (sum dx_i^2 + dy^2) / y^2.
            let mut names: Vec<String> = (1..dim).map(|i| format!("x{i}")).collect();
            names.push("y".into());
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let mut domain: Vec<Option<(f64, f64)>> = vec![None; dim];
            domain[dim - 1] = Some((0.4, 3.0));
            let chart = Chart::with_domain(&refs, &domain);
            let y = Expr::var(dim - 1);
            let inv_y2 = Expr::Div(
                Box::new(Expr::Const(1.0)),
                Box::new(Expr::mul(y.clone(), y)),
            );
            let comps = (0..dim).map(|i| ((i, i), inv_y2.clone())).collect();
            let metric = MetricField::from_exprs(chart, (0, dim), comps);
            Ok(Spacetime {
                spec: spec.clone(),
                metric,
                recurrent: None,
                parallel_coord: None,
                base: None,
                expected_scalar: Some(-((dim * (dim - 1)) as f64)),
            })
        }
    }
}

/// Product of a wave metric with a Riemannian block, block-diagonal, keeping
/// the transversal coordinate last: (x, y.., block.., z).
fn build_block_product(
    spec: &SpacetimeSpec,
    wave: &SpacetimeSpec,
    block: &SpacetimeSpec,
) -> Result<Spacetime> {
    let wave_built = build(wave)?;
    let block_built = build(block)?;
    if block_built.metric.signature().0 != 0 {
        return Err(Error::Spec("product block must be Riemannian".into()));
    }
    let wave_rec = wave_built
        .recurrent
        .as_ref()
        .ok_or_else(|| Error::Spec("product wave part must carry a recurrent field".into()))?;
    if !wave_rec.parallel {
        return Err(Error::Spec(
            "product wave part must have a parallel lightlike field".into(),
        ));
    }
    let dw = wave_built.dim();
    let db = block_built.dim();
    let d = dw + db;
    let wave_names = wave_built.metric.chart().coord_names();
    let block_names = block_built.metric.chart().coord_names();
    let mut names: Vec<String> = wave_names[..dw - 1].iter().map(|s| s.to_string()).collect();
    names.extend(block_names.iter().map(|s| format!("q_{s}")));
    names.push(wave_names[dw - 1].to_string());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut domain: Vec<Option<(f64, f64)>> =
        wave_built.metric.chart().domain()[..dw - 1].to_vec();
    domain.extend(block_built.metric.chart().domain().iter().cloned());
    domain.push(wave_built.metric.chart().domain()[dw - 1]);
    let chart = Chart::with_domain(&refs, &domain);

    let wave_metric = wave_built.metric.clone();
    let block_metric = block_built.metric.clone();
    let (r, s) = wave_built.metric.signature();
    let signature = (r, s + db);
    let metric = MetricField::from_jet_fn(chart, signature, move |coords| {
        let mut wc = coords[..dw - 1].to_vec();
        wc.push(coords[d - 1]);
        let bc = &coords[dw - 1..d - 1];
        let wave_point = Point::new(wave_metric.chart().clone(), wc).expect("wave point");
        let block_point =
            Point::new(block_metric.chart().clone(), bc.to_vec()).expect("block point");
        let wjets = wave_metric.component_jets(&wave_point).expect("wave jets");
        let bjets = block_metric.component_jets(&block_point).expect("block jets");
        // Wave coordinate index -> product index (transversal moves to the end).
        let wmap = |i: usize| if i == dw - 1 { d - 1 } else { i };
        let mut out = vec![Jet3::constant(d, 0.0); d * (d + 1) / 2];
        for i in 0..dw {
            for j in i..dw {
                let src = &wjets[pack(i, j, dw)];
                let mut lifted = Jet3::constant(d, src.v);
                for a in 0..dw {
                    lifted.set_d1(wmap(a), src.d1(a));
                    for b in a..dw {
                        lifted.set_d2(wmap(a), wmap(b), src.d2(a, b));
                        for c in b..dw {
                            lifted.set_d3(wmap(a), wmap(b), wmap(c), src.d3(a, b, c));
                        }
                    }
                }
                out[pack(wmap(i), wmap(j), d)] = lifted;
            }
        }
        for i in 0..db {
            for j in i..db {
                let src = &bjets[pack(i, j, db)];
                out[pack(dw - 1 + i, dw - 1 + j, d)] = src.lift(d, dw - 1);
            }
        }
        out
    });

    Ok(Spacetime {
        spec: spec.clone(),
        metric,
        recurrent: Some(RecurrentStructure {
            x_index: 0,
            parallel: true,
            theta_fn: zero_theta(d),
        }),
        parallel_coord: Some(0),
        base: Some(Box::new(block_built)),
        expected_scalar: None,
    })
}

/// The lightlike ambient construction 2 dxa dza + za^2 g over any base.
fn build_ambient_ricci_flat(spec: &SpacetimeSpec, base: &SpacetimeSpec) -> Result<Spacetime> {
    let base_built = build(base)?;
    let db = base_built.dim();
    let d = db + 2;
    let base_names = base_built.metric.chart().coord_names();
    if base_names.contains(&"xa") || base_names.contains(&"za") {
        return Err(Error::Spec("coordinate name clash in ambient chart".into()));
    }
    let mut names: Vec<String> = vec!["xa".into()];
    names.extend(base_names.iter().map(|s| s.to_string()));
    names.push("za".into());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut domain: Vec<Option<(f64, f64)>> = vec![None];
    domain.extend(base_built.metric.chart().domain().iter().cloned());
    domain.push(Some((0.5, 2.0)));
    let chart = Chart::with_domain(&refs, &domain);

    let base_metric = base_built.metric.clone();
    let (r, s) = base_built.metric.signature();
    let metric = MetricField::from_jet_fn(chart, (r + 1, s + 1), move |coords| {
        let bc = &coords[1..=db];
        let bp = Point::new(base_metric.chart().clone(), bc.to_vec()).expect("base point");
        let bjets = base_metric.component_jets(&bp).expect("base jets");
        let za = Jet3::variable(d, d - 1, coords[d - 1]);
        let za_sq = za.mul_jet(&za);
        let mut out = vec![Jet3::constant(d, 0.0); d * (d + 1) / 2];
        out[pack(0, d - 1, d)] = Jet3::constant(d, 1.0);
        for i in 0..db {
            for j in i..db {
                out[pack(1 + i, 1 + j, d)] = bjets[pack(i, j, db)].lift(d, 1).mul_jet(&za_sq);
            }
        }
        out
    });

    Ok(Spacetime {
        spec: spec.clone(),
        metric,
        recurrent: None,
        parallel_coord: Some(0),
        base: Some(Box::new(base_built)),
        expected_scalar: None,
    })
}

/// The Einstein ambient c (dt^2 - ds^2) + t^2 g, or the cone c dt^2 + t^2 g,
/// with c = n(n-1)/S; requires an Einstein base with nonzero scalar.
fn build_ambient_einstein(
    spec: &SpacetimeSpec,
    base: &SpacetimeSpec,
    cone_only: bool,
) -> Result<Spacetime> {
    let base_built = build(base)?;
    let db = base_built.dim();
    let samples = base_built.metric.chart().sample_points(24, 0.1);
    let einstein = crate::curvature::is_einstein(&base_built.metric, &samples)?;
    if !einstein.verdict {
        return Err(Error::NotEinstein(einstein.max_deviation));
    }
    let s_val = crate::curvature::scalar(&base_built.metric, &samples[0])?;
    let g_scale = base_built.metric.eval(&samples[0])?.amax();
    if s_val.abs() < 1e-10 * tensor_scale(g_scale) {
        return Err(Error::ZeroScalar(s_val.abs()));
    }
    let c = (db * (db - 1)) as f64 / s_val;

    let d = if cone_only { db + 1 } else { db + 2 };
    let base_names = base_built.metric.chart().coord_names();
    if base_names.contains(&"tc") || base_names.contains(&"sc") {
        return Err(Error::Spec("coordinate name clash in ambient chart".into()));
    }
    let mut names: Vec<String> = vec!["tc".into()];
    names.extend(base_names.iter().map(|s| s.to_string()));
    if !cone_only {
        names.push("sc".into());
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut domain: Vec<Option<(f64, f64)>> = vec![Some((0.5, 2.0))];
    domain.extend(base_built.metric.chart().domain().iter().cloned());
    if !cone_only {
        domain.push(None);
    }
    let chart = Chart::with_domain(&refs, &domain);

    let (r, s) = base_built.metric.signature();
    let signature = if cone_only {
        if c > 0.0 {
            (r, s + 1)
        } else {
            (r + 1, s)
        }
    } else {
        (r + 1, s + 1)
    };
    let base_metric = base_built.metric.clone();
    let metric = MetricField::from_jet_fn(chart, signature, move |coords| {
        let bc = &coords[1..=db];
        let bp = Point::new(base_metric.chart().clone(), bc.to_vec()).expect("base point");
        let bjets = base_metric.component_jets(&bp).expect("base jets");
        let t = Jet3::variable(d, 0, coords[0]);
        let t_sq = t.mul_jet(&t);
        let mut out = vec![Jet3::constant(d, 0.0); d * (d + 1) / 2];
        out[pack(0, 0, d)] = Jet3::constant(d, c);
        if !cone_only {
            out[pack(d - 1, d - 1, d)] = Jet3::constant(d, -c);
        }
        for i in 0..db {
            for j in i..db {
                out[pack(1 + i, 1 + j, d)] = bjets[pack(i, j, db)].lift(d, 1).mul_jet(&t_sq);
            }
        }
        out
    });

    Ok(Spacetime {
        spec: spec.clone(),
        metric,
        recurrent: None,
        parallel_coord: if cone_only { None } else { Some(d - 1) },
        base: Some(Box::new(base_built)),
        expected_scalar: None,
    })
}

/// Residual of the promised Christoffel table of the lightlike ambient
/// construction at a point: Γ^xa_ab = -za g_ab, Γ^c_ab = base Γ^c_ab,
/// Γ^c_{a, za} = δ/za, all others zero.
pub fn ambient_christoffel_residual(st: &Spacetime, p: &Point) -> Result<f64> {
    let base = st
        .base
        .as_ref()
        .ok_or_else(|| Error::Spec("not an ambient construction".into()))?;
    if !matches!(st.spec, SpacetimeSpec::AmbientRicciFlat { .. }) {
        return Err(Error::Spec(
            "the Christoffel table applies to the lightlike ambient".into(),
        ));
    }
    let d = st.dim();
    let db = base.dim();
    let gamma = crate::curvature::christoffel(&st.metric, p)?;
    let bp = Point::new(base.metric.chart().clone(), p.coords()[1..=db].to_vec())?;
    let base_gamma = crate::curvature::christoffel(&base.metric, &bp)?;
    let base_g = base.metric.eval(&bp)?;
    let za = p.coords()[d - 1];
    let mut worst = 0.0f64;
    let in_base = |i: usize| i >= 1 && i <= db;
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let expect = if k == 0 && in_base(i) && in_base(j) {
                    -za * base_g[(i - 1, j - 1)]
                } else if in_base(k) && in_base(i) && in_base(j) {
                    base_gamma.at(k - 1, i - 1, j - 1)
                } else if in_base(k)
                    && ((i == d - 1 && j == k) || (j == d - 1 && i == k))
                {
                    1.0 / za
                } else {
                    0.0
                };
                worst = worst.max((gamma.at(k, i, j) - expect).abs());
            }
        }
    }
    Ok(worst)
}

/// max relative |nabla R| over the given points; ~0 certifies local symmetry.
pub fn nabla_riemann_residual(st: &Spacetime, points: &[Point]) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in points {
        let data = CurvatureData::new(&st.metric, p)?;
        let nr = data.nabla_riemann()?;
        let d = data.dim;
        let scale = tensor_scale(data.riemann.max_abs());
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            worst = worst.max(nr.at(m, i, j, k, l).abs() / scale);
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Parse a scalar field in the chart of a built member.
pub fn scalar_field_on(st: &Spacetime, src: &str) -> Result<ScalarField> {
    ScalarField::parse(st.metric.chart().clone(), src)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pp_wave_with_x_dependence_is_rejected() {
        let spec = SpacetimeSpec::PpWave {
            n: 2,
            f: "x*z + y1^2".into(),
        };
        assert!(matches!(build(&spec), Err(Error::Spec(_))));
    }

    #[test]
    fn pp_wave_zero_potential_is_flat() {
        let spec = SpacetimeSpec::PpWave {
            n: 2,
            f: "0".into(),
        };
        let st = build(&spec).unwrap();
        let p = st.default_base_point();
        let r = crate::curvature::riemann(&st.metric, &p).unwrap();
        assert!(r.max_abs() < 1e-14);
        assert!(st.recurrent.as_ref().unwrap().parallel);
    }

    #[test]
    fn plane_wave_component_values() {
        // h_zz at y = (1, 0) equals a_11(z).
        let spec = SpacetimeSpec::PlaneWave {
            n: 2,
            a: vec![
                vec!["sin(z)".into(), "0".into()],
                vec!["0".into(), "2".into()],
            ],
        };
        let st = build(&spec).unwrap();
        let p = Point::new(st.metric.chart().clone(), vec![0.3, 1.0, 0.0, 0.9]).unwrap();
        let gm = st.metric.eval(&p).unwrap();
        assert!((gm[(3, 3)] - 0.9f64.sin()).abs() < 1e-14);
        assert!((gm[(0, 3)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn einstein_models_have_promised_scalar() {
        for (kind, dim, expect) in [
            (EinsteinKind::Sphere, 2, 2.0),
            (EinsteinKind::Sphere, 3, 6.0),
            (EinsteinKind::Hyperbolic, 4, -12.0),
        ] {
            let st = build(&SpacetimeSpec::EinsteinModel { kind, dim }).unwrap();
            let p = st.default_base_point();
            let s = crate::curvature::scalar(&st.metric, &p).unwrap();
            assert!(
                (s - expect).abs() < 1e-9,
                "{kind:?} dim {dim}: scalar {s} vs {expect}"
            );
        }
    }

    #[test]
    fn ambient_over_flat_base_needs_nonzero_scalar() {
        let spec = SpacetimeSpec::AmbientEinstein {
            base: Box::new(SpacetimeSpec::Flat {
                dim: 2,
                time_dims: 0,
            }),
        };
        assert!(matches!(build(&spec), Err(Error::ZeroScalar(_))));
    }

    #[test]
    fn ambient_spatial_block_scales_with_za() {
        let spec = SpacetimeSpec::AmbientRicciFlat {
            base: Box::new(SpacetimeSpec::Flat {
                dim: 2,
                time_dims: 0,
            }),
        };
        let st = build(&spec).unwrap();
        let p = Point::new(st.metric.chart().clone(), vec![0.0, 0.3, -0.2, 1.9]).unwrap();
        let gm = st.metric.eval(&p).unwrap();
        assert!((gm[(1, 1)] - 1.9 * 1.9).abs() < 1e-14);
        assert!((gm[(0, 3)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adapted_frame_normalization() {
        let spec = SpacetimeSpec::RecurrentGeneral {
            n: 2,
            f: "x*z + y1^2 - y2^2".into(),
            u: vec!["y2*z".into(), "0".into()],
            g_block: vec![
                vec!["1 + 0.1*y1^2".into(), "0".into()],
                vec!["0".into(), "1".into()],
            ],
        };
        let st = build(&spec).unwrap();
        let p = Point::new(st.metric.chart().clone(), vec![0.2, 0.4, -0.3, 0.8]).unwrap();
        let rec = st.recurrent().unwrap();
        let frame = rec.adapted_frame(&st.metric, &p).unwrap();
        let gm = st.metric.eval(&p).unwrap();
        let gram = frame.transpose() * gm * &frame;
        assert!((gram[(0, 3)] - 1.0).abs() < 1e-12);
        assert!(gram[(3, 3)].abs() < 1e-12);
        assert!((gram[(1, 1)] - 1.0).abs() < 1e-12);
        assert!(rec.recurrence_residual(&st.metric, &p).unwrap() < 1e-12);
        assert!(!rec.parallel);
    }
}
