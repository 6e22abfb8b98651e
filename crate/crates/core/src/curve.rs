//! Parametrized curves in a chart: segments, coordinate rectangles, smooth
//! trigonometric loops and composites. Positions and velocities are exact
//! closed forms; loops close exactly at the endpoints.

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::geometry::{Chart, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Segment,
    RectangleLoop,
    SmoothLoop,
    Composite,
}

#[derive(Debug, Clone)]
enum Path {
    Segment {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    /// Axis-aligned rectangle in the (i, j) coordinate plane, traversed
    /// base -> +si e_i -> +sj e_j -> -si e_i -> -sj e_j.
    Rectangle {
        base: Vec<f64>,
        i: usize,
        j: usize,
        si: f64,
        sj: f64,
    },
    /// base + sum_k a_k (cos(2 pi k t) - 1) + b_k sin(2 pi k t), componentwise.
    Trig {
        base: Vec<f64>,
        cos_coeff: Vec<Vec<f64>>,
        sin_coeff: Vec<Vec<f64>>,
    },
    Composite(Vec<Curve>),
}

#[derive(Debug, Clone)]
pub struct Curve {
    chart: Arc<Chart>,
    path: Path,
}

impl Curve {
    pub fn segment(a: &Point, b: &Point) -> Curve {
        Curve {
            chart: a.chart().clone(),
            path: Path::Segment {
                a: a.coords().to_vec(),
                b: b.coords().to_vec(),
            },
        }
    }

    pub fn rectangle(base: &Point, i: usize, j: usize, si: f64, sj: f64) -> Curve {
        assert_ne!(i, j, "rectangle needs two distinct coordinate directions");
        Curve {
            chart: base.chart().clone(),
            path: Path::Rectangle {
                base: base.coords().to_vec(),
                i,
                j,
                si,
                sj,
            },
        }
    }

    pub fn trig_loop(base: &Point, cos_coeff: Vec<Vec<f64>>, sin_coeff: Vec<Vec<f64>>) -> Curve {
        assert_eq!(cos_coeff.len(), sin_coeff.len());
        for c in cos_coeff.iter().chain(sin_coeff.iter()) {
            assert_eq!(c.len(), base.coords().len());
        }
        Curve {
            chart: base.chart().clone(),
            path: Path::Trig {
                base: base.coords().to_vec(),
                cos_coeff,
                sin_coeff,
            },
        }
    }

    pub fn composite(parts: Vec<Curve>) -> Curve {
        assert!(!parts.is_empty());
        for w in parts.windows(2) {
            let end = w[0].position(1.0);
            let start = w[1].position(0.0);
            assert_eq!(end, start, "composite pieces must join exactly");
        }
        let chart = parts[0].chart.clone();
        Curve {
            chart,
            path: Path::Composite(parts),
        }
    }

    /// A lasso: out along `stem`, around `loop_part`, back along the reversed stem.
    pub fn lasso(stem: Curve, loop_part: Curve) -> Curve {
        let back = stem.reversed();
        Curve::composite(vec![stem, loop_part, back])
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn kind(&self) -> CurveKind {
        match &self.path {
            Path::Segment { .. } => CurveKind::Segment,
            Path::Rectangle { .. } => CurveKind::RectangleLoop,
            Path::Trig { .. } => CurveKind::SmoothLoop,
            Path::Composite(_) => CurveKind::Composite,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.position(0.0) == self.position(1.0)
    }

    pub fn position(&self, t: f64) -> Vec<f64> {
        match &self.path {
            Path::Segment { a, b } => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    if t == 0.0 {
                        *x
                    } else if t == 1.0 {
                        *y
                    } else {
                        x + t * (y - x)
                    }
                })
                .collect(),
            Path::Rectangle { base, i, j, si, sj } => {
                let mut p = base.clone();
                if t == 0.0 || t == 1.0 {
                    return p;
                }
                let leg = ((t * 4.0).floor() as usize).min(3);
                let s = t * 4.0 - leg as f64;
                match leg {
                    0 => p[*i] += s * si,
                    1 => {
                        p[*i] += si;
                        p[*j] += s * sj;
                    }
                    2 => {
                        p[*i] += (1.0 - s) * si;
                        p[*j] += sj;
                    }
                    _ => p[*j] += (1.0 - s) * sj,
                }
                p
            }
            Path::Trig {
                base,
                cos_coeff,
                sin_coeff,
            } => {
                let mut p = base.clone();
                if t == 0.0 || t == 1.0 {
                    return p;
                }
                for (k, (ck, sk)) in cos_coeff.iter().zip(sin_coeff).enumerate() {
                    let phase = TAU * (k as f64 + 1.0) * t;
                    let (s, c) = phase.sin_cos();
                    for (idx, x) in p.iter_mut().enumerate() {
                        *x += ck[idx] * (c - 1.0) + sk[idx] * s;
                    }
                }
                p
            }
            Path::Composite(parts) => {
                let n = parts.len() as f64;
                if t >= 1.0 {
                    return parts.last().unwrap().position(1.0);
                }
                let scaled = t * n;
                let idx = (scaled.floor() as usize).min(parts.len() - 1);
                parts[idx].position(scaled - idx as f64)
            }
        }
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        match &self.path {
            Path::Segment { a, b } => a.iter().zip(b).map(|(x, y)| y - x).collect(),
            Path::Rectangle { base, i, j, si, sj } => {
                let mut v = vec![0.0; base.len()];
                let leg = ((t * 4.0).floor() as usize).min(3);
                match leg {
                    0 => v[*i] = 4.0 * si,
                    1 => v[*j] = 4.0 * sj,
                    2 => v[*i] = -4.0 * si,
                    _ => v[*j] = -4.0 * sj,
                }
                v
            }
            Path::Trig {
                base,
                cos_coeff,
                sin_coeff,
            } => {
                let mut v = vec![0.0; base.len()];
                for (k, (ck, sk)) in cos_coeff.iter().zip(sin_coeff).enumerate() {
                    let omega = TAU * (k as f64 + 1.0);
                    let (s, c) = (omega * t).sin_cos();
                    for (idx, x) in v.iter_mut().enumerate() {
                        *x += omega * (-ck[idx] * s + sk[idx] * c);
                    }
                }
                v
            }
            Path::Composite(parts) => {
                let n = parts.len() as f64;
                let scaled = (t * n).min(n - 1e-12);
                let idx = (scaled.floor() as usize).min(parts.len() - 1);
                parts[idx]
                    .velocity(scaled - idx as f64)
                    .into_iter()
                    .map(|x| x * n)
                    .collect()
            }
        }
    }

    /// Parameter values where the velocity may jump; the transport integrator
    /// restarts at each of these.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.path {
            Path::Segment { .. } | Path::Trig { .. } => vec![0.0, 1.0],
            Path::Rectangle { .. } => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            Path::Composite(parts) => {
                let n = parts.len() as f64;
                let mut out = vec![0.0];
                for (i, part) in parts.iter().enumerate() {
                    for b in part.breakpoints() {
                        if b > 0.0 {
                            out.push((i as f64 + b) / n);
                        }
                    }
                }
                out.dedup();
                out
            }
        }
    }

    pub fn reversed(&self) -> Curve {
        match &self.path {
            Path::Segment { a, b } => Curve {
                chart: self.chart.clone(),
                path: Path::Segment {
                    a: b.clone(),
                    b: a.clone(),
                },
            },
            Path::Composite(parts) => Curve {
                chart: self.chart.clone(),
                path: Path::Composite(parts.iter().rev().map(|c| c.reversed()).collect()),
            },
            Path::Rectangle { base, i, j, si, sj } => {
                // Same rectangle traversed the other way round: swap the roles
                // of the two legs.
                Curve {
                    chart: self.chart.clone(),
                    path: Path::Rectangle {
                        base: base.clone(),
                        i: *j,
                        j: *i,
                        si: *sj,
                        sj: *si,
                    },
                }
            }
            Path::Trig {
                base,
                cos_coeff,
                sin_coeff,
            } => Curve {
                chart: self.chart.clone(),
                path: Path::Trig {
                    base: base.clone(),
                    cos_coeff: cos_coeff.clone(),
                    sin_coeff: sin_coeff.iter().map(|v| v.iter().map(|x| -x).collect()).collect(),
                },
            },
        }
    }
}
