//! Alternating k-forms on R^m with a Lie-algebra action, generic over the
//! scalar ring so the model-algebra computations can run bit-exactly over the
//! rationals as well as in floating point.
//!
//! Coefficients are stored on strictly increasing index tuples; evaluation
//! and the action resolve permutations by sign, so antisymmetry is exact by
//! construction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The scalar operations the form algebra needs.
#[allow(clippy::should_implement_trait)] // generic ring ops, not std::ops
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn abs_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_f64(&self) -> f64 {
        let a = self.abs();
        rational_to_f64(&a)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    // Good enough for thresholds; exact values stay rational.
    let n: f64 = numer.to_string().parse().unwrap_or(f64::MAX);
    let d: f64 = denom.to_string().parse().unwrap_or(1.0);
    n / d
}

/// Dense square matrix over a generic ring (row major).
#[derive(Debug, Clone)]
pub struct RingMatrix<T> {
    pub n: usize,
    pub rows: Vec<Vec<T>>,
}

impl<T: Ring> RingMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        RingMatrix {
            n,
            rows: vec![vec![T::zero(); n]; n],
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        RingMatrix {
            n: rows.len(),
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.rows[i][j]
    }
}

/// Alternating k-form with coefficients on sorted index tuples.
#[derive(Debug, Clone)]
pub struct KForm<T> {
    pub m: usize,
    pub k: usize,
    coeffs: BTreeMap<Vec<usize>, T>,
}

fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v: Vec<usize> = idx.to_vec();
    let mut swaps = 0usize;
    // Insertion sort, counting inversions.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, swaps % 2 == 1))
}

impl<T: Ring> KForm<T> {
    pub fn zero(m: usize, k: usize) -> Self {
        KForm {
            m,
            k,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, idx: &[usize]) -> T {
        match sort_with_sign(idx) {
            None => T::zero(),
            Some((sorted, flip)) => {
                let c = self.coeffs.get(&sorted).cloned().unwrap_or_else(T::zero);
                if flip {
                    c.neg()
                } else {
                    c
                }
            }
        }
    }

    pub fn add_to(&mut self, idx: &[usize], val: T) {
        if val.is_zero() {
            return;
        }
        if let Some((sorted, flip)) = sort_with_sign(idx) {
            let val = if flip { val.neg() } else { val };
            let slot = self.coeffs.entry(sorted.clone()).or_insert_with(T::zero);
            *slot = slot.add(&val);
            if slot.is_zero() {
                self.coeffs.remove(&sorted);
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &T)> {
        self.coeffs.iter()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .map(|v| v.abs_f64())
            .fold(0.0f64, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|v| v.is_zero())
    }

    /// Wedge of 1-forms: coefficient on a sorted tuple I is the determinant
    /// of the submatrix [omega_a(e_{i_b})], computed by the permutation sum
    /// (division-free, so exact over the rationals).
    pub fn wedge_of_covectors(m: usize, covectors: &[Vec<T>]) -> Self {
        let k = covectors.len();
        let mut out = KForm::zero(m, k);
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let det = permutation_determinant(covectors, &idx);
            if !det.is_zero() {
                out.add_to(&idx.clone(), det);
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
        out
    }

    /// Evaluate on vectors (each of length m).
    pub fn eval(&self, vectors: &[Vec<T>]) -> T {
        assert_eq!(vectors.len(), self.k);
        let mut acc = T::zero();
        for (idx, c) in &self.coeffs {
            // det of the k x k matrix rows = index slots, cols = vectors.
            let rows: Vec<Vec<T>> = idx
                .iter()
                .map(|&i| vectors.iter().map(|v| v[i].clone()).collect())
                .collect();
            let det = full_determinant(&rows);
            acc = acc.add(&c.mul(&det));
        }
        acc
    }

    /// Lie-algebra action: (A . alpha)(v_1..v_k) = -sum_j alpha(v_1,..,A v_j,..,v_k).
    pub fn action(&self, a: &RingMatrix<T>) -> Self {
        let mut out = KForm::zero(self.m, self.k);
        // Scatter form: a coefficient alpha_I sends mass to the tuple with
        // slot value i replaced by l, weighted by -A[i][l] (the l-component
        // of the dual action on the slot covector).
        for (idx, c) in &self.coeffs {
            for (slot, &i_slot) in idx.iter().enumerate() {
                for l in 0..self.m {
                    let a_il = a.at(i_slot, l);
                    if a_il.is_zero() {
                        continue;
                    }
                    let mut new_idx = idx.clone();
                    new_idx[slot] = l;
                    out.add_to(&new_idx, c.mul(a_il).neg());
                }
            }
        }
        out
    }

    /// Wedge product of two forms.
    pub fn wedge(&self, other: &KForm<T>) -> KForm<T> {
        assert_eq!(self.m, other.m);
        let mut out = KForm::zero(self.m, self.k + other.k);
        for (i1, c1) in &self.coeffs {
            for (i2, c2) in &other.coeffs {
                let mut idx = i1.clone();
                idx.extend_from_slice(i2);
                out.add_to(&idx, c1.mul(c2));
            }
        }
        out
    }
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < m - (k - i) {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// det[covectors[a][idx[b]]] over permutations (rows a, columns b).
fn permutation_determinant<T: Ring>(covectors: &[Vec<T>], idx: &[usize]) -> T {
    let rows: Vec<Vec<T>> = covectors
        .iter()
        .map(|c| idx.iter().map(|&i| c[i].clone()).collect())
        .collect();
    full_determinant(&rows)
}

fn full_determinant<T: Ring>(rows: &[Vec<T>]) -> T {
    let n = rows.len();
    if n == 0 {
        return T::one();
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    // Cofactor expansion along the first row; n <= 8 here.
    let mut acc = T::zero();
    for (j, pivot) in rows[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<T>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = pivot.mul(&full_determinant(&minor));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// Verdict of a stabilizer test: is alpha fixed by every generator?
#[derive(Debug, Clone)]
pub struct StabilizerReport {
    pub fixed: bool,
    pub max_action_norm: f64,
    pub threshold: f64,
    /// Per-generator max |A . alpha| coefficients.
    pub per_generator: Vec<f64>,
}

pub const STABILIZER_REL_TOL: f64 = 1e-8;

pub fn stabilizer_check<T: Ring>(generators: &[RingMatrix<T>], alpha: &KForm<T>) -> StabilizerReport {
    let mut per_generator = Vec::with_capacity(generators.len());
    let mut worst = 0.0f64;
    for a in generators {
        let norm = alpha.action(a).max_abs();
        per_generator.push(norm);
        worst = worst.max(norm);
    }
    let threshold = STABILIZER_REL_TOL * (alpha.max_abs() + f64::MIN_POSITIVE);
    StabilizerReport {
        fixed: worst < threshold,
        max_action_norm: worst,
        threshold,
        per_generator,
    }
}
