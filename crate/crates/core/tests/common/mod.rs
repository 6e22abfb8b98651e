//! Shared test support: the finite-difference derivative oracle (independent
//! of the jet arithmetic under test) and standard family fixtures.
#![allow(dead_code)]

use confhol_core::geometry::{MetricField, Point};
use confhol_core::zoo::{self, SpacetimeSpec, Spacetime};

/// Central finite differences of the metric components through order 3, with
/// one Richardson extrapolation level. Derivative order picks its own step:
/// truncation vs roundoff balance differs between orders.
pub struct FdOracle<'a> {
    g: &'a MetricField,
}

impl<'a> FdOracle<'a> {
    pub fn new(g: &'a MetricField) -> Self {
        FdOracle { g }
    }

    fn comp(&self, p: &Point, shifts: &[(usize, f64)], i: usize, j: usize) -> f64 {
        let mut coords = p.coords().to_vec();
        for (idx, delta) in shifts {
            coords[*idx] += delta;
        }
        let q = Point::new(p.chart().clone(), coords).expect("oracle point inside domain");
        let jets = self.g.component_jets(&q).expect("metric evaluates");
        let d = self.g.dim();
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        jets[a * d - a * (a + 1) / 2 + b].v
    }

    fn d1_step(&self, p: &Point, k: usize, i: usize, j: usize, h: f64) -> f64 {
        (self.comp(p, &[(k, h)], i, j) - self.comp(p, &[(k, -h)], i, j)) / (2.0 * h)
    }

    pub fn d1(&self, p: &Point, k: usize, i: usize, j: usize) -> f64 {
        let h = 1e-4;
        let coarse = self.d1_step(p, k, i, j, h);
        let fine = self.d1_step(p, k, i, j, h / 2.0);
        (4.0 * fine - coarse) / 3.0
    }

    fn d2_step(&self, p: &Point, k: usize, l: usize, i: usize, j: usize, h: f64) -> f64 {
        if k == l {
            (self.comp(p, &[(k, h)], i, j) - 2.0 * self.comp(p, &[], i, j)
                + self.comp(p, &[(k, -h)], i, j))
                / (h * h)
        } else {
            (self.comp(p, &[(k, h), (l, h)], i, j) - self.comp(p, &[(k, h), (l, -h)], i, j)
                - self.comp(p, &[(k, -h), (l, h)], i, j)
                + self.comp(p, &[(k, -h), (l, -h)], i, j))
                / (4.0 * h * h)
        }
    }

    pub fn d2(&self, p: &Point, k: usize, l: usize, i: usize, j: usize) -> f64 {
        let h = 5e-4;
        let coarse = self.d2_step(p, k, l, i, j, h);
        let fine = self.d2_step(p, k, l, i, j, h / 2.0);
        (4.0 * fine - coarse) / 3.0
    }

    fn d3_step(&self, p: &Point, k: usize, l: usize, m: usize, i: usize, j: usize, h: f64) -> f64 {
        // Fully mixed central stencil: 8 corners weighted by sign products,
        // collapsing to the classical stencils when indices repeat.
        if k == l && l == m {
            (self.comp(p, &[(k, 2.0 * h)], i, j) - 2.0 * self.comp(p, &[(k, h)], i, j)
                + 2.0 * self.comp(p, &[(k, -h)], i, j)
                - self.comp(p, &[(k, -2.0 * h)], i, j))
                / (2.0 * h * h * h)
        } else if k == l || l == m || k == m {
            // d^2 in the repeated direction, d^1 in the distinct one.
            let (rep, single) = if k == l {
                (k, m)
            } else if l == m {
                (l, k)
            } else {
                (k, l)
            };
            let f = |sr: f64, ss: f64| self.comp(p, &[(rep, sr), (single, ss)], i, j);
            (f(h, h) - 2.0 * f(0.0, h) + f(-h, h) - f(h, -h) + 2.0 * f(0.0, -h) - f(-h, -h))
                / (2.0 * h * h * h)
        } else {
            let mut acc = 0.0;
            for sk in [-1.0, 1.0] {
                for sl in [-1.0, 1.0] {
                    for sm in [-1.0, 1.0] {
                        acc += sk
                            * sl
                            * sm
                            * self.comp(p, &[(k, sk * h), (l, sl * h), (m, sm * h)], i, j);
                    }
                }
            }
            acc / (8.0 * h * h * h)
        }
    }

    pub fn d3(&self, p: &Point, k: usize, l: usize, m: usize, i: usize, j: usize) -> f64 {
        let h = 2.5e-3;
        let coarse = self.d3_step(p, k, l, m, i, j, h);
        let fine = self.d3_step(p, k, l, m, i, j, h / 2.0);
        (4.0 * fine - coarse) / 3.0
    }
}

pub fn flat_lorentz4() -> Spacetime {
    zoo::build(&SpacetimeSpec::Flat {
        dim: 4,
        time_dims: 1,
    })
    .unwrap()
}

pub fn pp_wave(f: &str) -> Spacetime {
    zoo::build(&SpacetimeSpec::PpWave {
        n: 2,
        f: f.into(),
    })
    .unwrap()
}

pub fn pr_wave(f: &str) -> Spacetime {
    zoo::build(&SpacetimeSpec::PrWave {
        n: 2,
        f: f.into(),
    })
    .unwrap()
}

pub fn plane_wave(a: [[&str; 2]; 2]) -> Spacetime {
    zoo::build(&SpacetimeSpec::PlaneWave {
        n: 2,
        a: a.iter()
            .map(|row| row.iter().map(|s| s.to_string()).collect())
            .collect(),
    })
    .unwrap()
}

pub fn cahen_wallach(a: [[f64; 2]; 2]) -> Spacetime {
    zoo::build(&SpacetimeSpec::CahenWallach {
        n: 2,
        a: a.iter().map(|r| r.to_vec()).collect(),
    })
    .unwrap()
}

pub fn sphere(dim: usize) -> Spacetime {
    zoo::build(&SpacetimeSpec::EinsteinModel {
        kind: zoo::EinsteinKind::Sphere,
        dim,
    })
    .unwrap()
}

pub fn hyperbolic(dim: usize) -> Spacetime {
    zoo::build(&SpacetimeSpec::EinsteinModel {
        kind: zoo::EinsteinKind::Hyperbolic,
        dim,
    })
    .unwrap()
}

pub fn ambient_over_sphere2() -> Spacetime {
    zoo::build(&SpacetimeSpec::AmbientRicciFlat {
        base: Box::new(SpacetimeSpec::EinsteinModel {
            kind: zoo::EinsteinKind::Sphere,
            dim: 2,
        }),
    })
    .unwrap()
}

pub fn recurrent_general_curved() -> Spacetime {
    zoo::build(&SpacetimeSpec::RecurrentGeneral {
        n: 2,
        f: "x*z + y1^2*y2 + sin(z)".into(),
        u: vec!["0.3*y2".into(), "0".into()],
        g_block: vec![
            vec!["1 + 0.2*y1^2".into(), "0.1*y1*y2".into()],
            vec!["0.1*y1*y2".into(), "1 + 0.1*y2^2".into()],
        ],
    })
    .unwrap()
}

pub fn sample_points(st: &Spacetime, n: usize) -> Vec<Point> {
    // Keep wave-family samples in a moderate box so potentials stay tame.
    let chart = st.metric.chart().clone();
    let bounded = chart.domain().iter().all(|b| b.is_some());
    if bounded {
        chart.sample_points(n, 0.12)
    } else {
        let base = st.default_base_point();
        let d = chart.dim();
        (0..n)
            .map(|k| {
                let mut coords = base.coords().to_vec();
                for (i, c) in coords.iter_mut().enumerate() {
                    let u = ((0.5 + 0.7548776662 * (k * d + i + 1) as f64) % 1.0) - 0.5;
                    match chart.domain()[i] {
                        Some((lo, hi)) => *c = 0.5 * (lo + hi) + 0.7 * u * (hi - lo) * 0.5,
                        None => *c += 1.4 * u,
                    }
                }
                Point::new(chart.clone(), coords).unwrap()
            })
            .collect()
    }
}
