//! Truncated Taylor (forward-mode) arithmetic carrying a value together with
//! all partial derivatives up to order 3 in `dim` variables.
//!
//! Second and third derivative blocks are stored packed over sorted index
//! tuples, so the symmetry `d2[i][j] = d2[j][i]` and the full permutation
//! symmetry of `d3` hold by construction, not up to tolerance.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of packed second-derivative entries for `dim` variables.
pub fn len2(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Number of packed third-derivative entries for `dim` variables.
pub fn len3(dim: usize) -> usize {
    dim * (dim + 1) * (dim + 2) / 6
}

/// Packed offset of the pair `(i, j)` with `i <= j`.
fn off2(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < dim);
    i * dim - i * (i + 1) / 2 + j
}

/// Packed offset of the triple `(i, j, k)` with `i <= j <= k`.
fn off3(dim: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i <= j && j <= k && k < dim);
    // Triples starting below i, then the pair (j-i, k-i) within dimension dim-i.
    let mut base = 0;
    for a in 0..i {
        let m = dim - a;
        base += m * (m + 1) / 2;
    }
    base + off2(dim - i, j - i, k - i)
}

fn sort2(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

fn sort3(i: usize, j: usize, k: usize) -> (usize, usize, usize) {
    let (a, b) = sort2(i, j);
    if k >= b {
        (a, b, k)
    } else if k >= a {
        (a, k, b)
    } else {
        (k, a, b)
    }
}

/// Value plus exact partial derivatives through order 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet3 {
    dim: usize,
    pub v: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl Jet3 {
    pub fn constant(dim: usize, v: f64) -> Self {
        Jet3 {
            dim,
            v,
            d1: vec![0.0; dim],
            d2: vec![0.0; len2(dim)],
            d3: vec![0.0; len3(dim)],
        }
    }

    /// The coordinate function `x_idx` seeded at value `v`.
    pub fn variable(dim: usize, idx: usize, v: f64) -> Self {
        let mut j = Jet3::constant(dim, v);
        j.d1[idx] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.d1[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let (i, j) = sort2(i, j);
        self.d2[off2(self.dim, i, j)]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        let (i, j, k) = sort3(i, j, k);
        self.d3[off3(self.dim, i, j, k)]
    }

    pub fn set_d1(&mut self, i: usize, val: f64) {
        self.d1[i] = val;
    }

    pub fn set_d2(&mut self, i: usize, j: usize, val: f64) {
        let (i, j) = sort2(i, j);
        self.d2[off2(self.dim, i, j)] = val;
    }

    pub fn set_d3(&mut self, i: usize, j: usize, k: usize, val: f64) {
        let (i, j, k) = sort3(i, j, k);
        self.d3[off3(self.dim, i, j, k)] = val;
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.d1.iter().all(|x| x.is_finite())
            && self.d2.iter().all(|x| x.is_finite())
            && self.d3.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.v *= c;
        out.d1.iter_mut().for_each(|x| *x *= c);
        out.d2.iter_mut().for_each(|x| *x *= c);
        out.d3.iter_mut().for_each(|x| *x *= c);
        out
    }

    fn zip(&self, other: &Jet3, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        Jet3 {
            dim: self.dim,
            v: f(self.v, other.v),
            d1: self.d1.iter().zip(&other.d1).map(|(a, b)| f(*a, *b)).collect(),
            d2: self.d2.iter().zip(&other.d2).map(|(a, b)| f(*a, *b)).collect(),
            d3: self.d3.iter().zip(&other.d3).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add_jet(&self, other: &Jet3) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub_jet(&self, other: &Jet3) -> Self {
        self.zip(other, |a, b| a - b)
    }

    /// Leibniz product through order 3.
    pub fn mul_jet(&self, other: &Jet3) -> Self {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        let d = self.dim;
        let (a, b) = (self, other);
        let mut out = Jet3::constant(d, a.v * b.v);
        for i in 0..d {
            out.d1[i] = a.d1[i] * b.v + a.v * b.d1[i];
        }
        for i in 0..d {
            for j in i..d {
                out.d2[off2(d, i, j)] =
                    a.d2(i, j) * b.v + a.d1[i] * b.d1[j] + a.d1[j] * b.d1[i] + a.v * b.d2(i, j);
            }
        }
        for i in 0..d {
            for j in i..d {
                for k in j..d {
                    out.d3[off3(d, i, j, k)] = a.d3(i, j, k) * b.v
                        + a.d2(i, j) * b.d1[k]
                        + a.d2(i, k) * b.d1[j]
                        + a.d2(j, k) * b.d1[i]
                        + a.d1[i] * b.d2(j, k)
                        + a.d1[j] * b.d2(i, k)
                        + a.d1[k] * b.d2(i, j)
                        + a.v * b.d3(i, j, k);
                }
            }
        }
        out
    }

    /// Chain rule for a univariate outer function with derivatives `f0..f3` at `self.v`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64, f3: f64) -> Self {
        let d = self.dim;
        let u = self;
        let mut out = Jet3::constant(d, f0);
        for i in 0..d {
            out.d1[i] = f1 * u.d1[i];
        }
        for i in 0..d {
            for j in i..d {
                out.d2[off2(d, i, j)] = f2 * u.d1[i] * u.d1[j] + f1 * u.d2(i, j);
            }
        }
        for i in 0..d {
            for j in i..d {
                for k in j..d {
                    out.d3[off3(d, i, j, k)] = f3 * u.d1[i] * u.d1[j] * u.d1[k]
                        + f2 * (u.d2(i, j) * u.d1[k] + u.d2(i, k) * u.d1[j] + u.d2(j, k) * u.d1[i])
                        + f1 * u.d3(i, j, k);
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let u = self.v;
        self.compose(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u), -6.0 / (u * u * u * u))
    }

    pub fn div_jet(&self, other: &Jet3) -> Self {
        self.mul_jet(&other.recip())
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e, e)
    }

    pub fn ln(&self) -> Self {
        let u = self.v;
        self.compose(u.ln(), 1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s, -c)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c, s)
    }

    /// Integer power by repeated multiplication (valid for any base value).
    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet3::constant(self.dim, 1.0);
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_jet(&base);
            }
            base = base.mul_jet(&base);
            n >>= 1;
        }
        acc
    }

    /// Real power `u^c`; requires `u > 0` unless `c` is an integer.
    pub fn powf(&self, c: f64) -> Self {
        if c.fract() == 0.0 && c.abs() < 64.0 {
            return self.powi(c as i64);
        }
        let u = self.v;
        self.compose(
            u.powf(c),
            c * u.powf(c - 1.0),
            c * (c - 1.0) * u.powf(c - 2.0),
            c * (c - 1.0) * (c - 2.0) * u.powf(c - 3.0),
        )
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    /// Embed into a larger variable space: variable i becomes variable
    /// offset + i, all derivatives in the new directions vanish.
    pub fn lift(&self, dim: usize, offset: usize) -> Jet3 {
        assert!(offset + self.dim <= dim);
        let mut out = Jet3::constant(dim, self.v);
        for i in 0..self.dim {
            out.set_d1(offset + i, self.d1[i]);
            for j in i..self.dim {
                out.set_d2(offset + i, offset + j, self.d2(i, j));
                for k in j..self.dim {
                    out.set_d3(offset + i, offset + j, offset + k, self.d3(i, j, k));
                }
            }
        }
        out
    }
}

impl Add for &Jet3 {
    type Output = Jet3;
    fn add(self, rhs: &Jet3) -> Jet3 {
        self.add_jet(rhs)
    }
}

impl Sub for &Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: &Jet3) -> Jet3 {
        self.sub_jet(rhs)
    }
}

impl Mul for &Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: &Jet3) -> Jet3 {
        self.mul_jet(rhs)
    }
}

impl Div for &Jet3 {
    type Output = Jet3;
    fn div(self, rhs: &Jet3) -> Jet3 {
        self.div_jet(rhs)
    }
}

impl Neg for &Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}
