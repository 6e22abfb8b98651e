//! Linear-algebraic analysis of matrix Lie algebra spans: joint kernels,
//! low-dimensional invariant subspaces with their classification against an
//! indefinite bilinear form, and subspace utilities.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::tensor_scale;
use crate::error::{Error, Result};

pub const JOINT_KERNEL_REL: f64 = 1e-7;
pub const INVARIANCE_TOL: f64 = 1e-6;
pub const ISOTROPY_TOL: f64 = 1e-8;
pub const CAUSAL_SIGN_TOL: f64 = 1e-9;
pub const DEDUP_PROJECTOR_TOL: f64 = 1e-6;
const CANDIDATE_CAP: usize = 512;

/// A nondegenerate symmetric bilinear form with its eigenvalue signature.
#[derive(Debug, Clone)]
pub struct IndefiniteForm {
    pub gram: DMatrix<f64>,
    pub signature: (usize, usize),
}

impl IndefiniteForm {
    pub fn new(gram: DMatrix<f64>) -> Result<IndefiniteForm> {
        let eig = gram.clone().symmetric_eigen();
        let scale = eig.eigenvalues.amax();
        let neg = eig.eigenvalues.iter().filter(|&&e| e < -1e-12 * scale).count();
        let pos = eig.eigenvalues.iter().filter(|&&e| e > 1e-12 * scale).count();
        if neg + pos != gram.nrows() {
            return Err(Error::Spec("bilinear form is degenerate".into()));
        }
        Ok(IndefiniteForm {
            gram,
            signature: (neg, pos),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceClass {
    Nondegenerate,
    Degenerate,
    TotallyIsotropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalTag {
    Timelike,
    Spacelike,
    Lightlike,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct Subspace {
    /// Euclidean-orthonormal basis columns (m x k).
    pub basis: DMatrix<f64>,
    pub class: SubspaceClass,
    pub causal: Option<CausalTag>,
    /// max_i |A_i V - V (V' A_i V)| over the generators.
    pub invariance_residual: f64,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Orthonormal basis of the intersection of the kernels of the generators.
pub fn joint_kernel(generators: &[DMatrix<f64>]) -> Vec<DVector<f64>> {
    assert!(!generators.is_empty(), "joint_kernel needs generators");
    let m = generators[0].ncols();
    let mut stack = DMatrix::zeros(generators.len() * m, m);
    for (idx, a) in generators.iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                stack[(idx * m + i, j)] = a[(i, j)];
            }
        }
    }
    nullspace(&stack, JOINT_KERNEL_REL)
}

/// Right nullspace of a matrix by SVD, with a relative singular threshold.
/// Wide matrices are zero-padded to square so the thin SVD still carries the
/// full set of right singular vectors.
pub fn nullspace(m: &DMatrix<f64>, rel_threshold: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    let scale = m.amax();
    if scale < 1e-300 {
        // Zero map: the whole space.
        return (0..cols)
            .map(|i| {
                let mut v = DVector::zeros(cols);
                v[i] = 1.0;
                v
            })
            .collect();
    }
    let work = if m.nrows() < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        padded / scale
    } else {
        m / scale
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("svd v_t");
    let sv = &svd.singular_values;
    let sv_max = sv.amax();
    let rank = sv.iter().filter(|&&s| s > rel_threshold * sv_max).count();
    (rank..cols).map(|r| v_t.row(r).transpose()).collect()
}

/// Classify the restriction of the form to span(basis); 1-dimensional
/// subspaces additionally get a causal tag by the sign of <v, v>.
pub fn classify_subspace(
    basis: &DMatrix<f64>,
    form: &IndefiniteForm,
) -> (SubspaceClass, Option<CausalTag>) {
    let restricted = basis.transpose() * &form.gram * basis;
    let scale = tensor_scale(form.gram.amax());
    let eig = restricted.clone().symmetric_eigen();
    let zero = |e: f64| e.abs() < ISOTROPY_TOL * scale;
    let all_zero = eig.eigenvalues.iter().all(|&e| zero(e));
    let none_zero = eig.eigenvalues.iter().all(|&e| !zero(e));
    let class = if all_zero {
        SubspaceClass::TotallyIsotropic
    } else if none_zero {
        SubspaceClass::Nondegenerate
    } else {
        SubspaceClass::Degenerate
    };
    let causal = if basis.ncols() == 1 {
        let v = restricted[(0, 0)];
        Some(if v.abs() < CAUSAL_SIGN_TOL * scale {
            CausalTag::Lightlike
        } else if v < 0.0 {
            CausalTag::Timelike
        } else {
            CausalTag::Spacelike
        })
    } else if class == SubspaceClass::TotallyIsotropic {
        Some(CausalTag::Lightlike)
    } else {
        let signs: Vec<i8> = eig
            .eigenvalues
            .iter()
            .map(|&e| if zero(e) { 0 } else if e < 0.0 { -1 } else { 1 })
            .collect();
        if signs.iter().all(|&s| s == 1) {
            Some(CausalTag::Spacelike)
        } else if signs.iter().all(|&s| s == -1) {
            Some(CausalTag::Timelike)
        } else {
            Some(CausalTag::Mixed)
        }
    };
    (class, causal)
}

fn orthonormalize(cols: Vec<DVector<f64>>) -> Option<DMatrix<f64>> {
    let m = cols.first()?.len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for mut v in cols {
        for b in &basis {
            let c = v.dot(b);
            v -= b * c;
        }
        let n = v.norm();
        if n > 1e-10 {
            basis.push(v / n);
        }
    }
    if basis.is_empty() {
        return None;
    }
    let mut out = DMatrix::zeros(m, basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    Some(out)
}

/// If the projector of the span is within 1e-9 of a coordinate-plane
/// projector, return the exact coordinate basis.
fn axis_aligned_basis(basis: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let m = basis.nrows();
    let k = basis.ncols();
    let proj = basis * basis.transpose();
    let axes: Vec<usize> = (0..m).filter(|&i| proj[(i, i)] > 0.5).collect();
    if axes.len() != k {
        return None;
    }
    let mut exact = DMatrix::zeros(m, m);
    for &i in &axes {
        exact[(i, i)] = 1.0;
    }
    if (proj - &exact).amax() > 1e-9 {
        return None;
    }
    let mut out = DMatrix::zeros(m, k);
    for (col, &i) in axes.iter().enumerate() {
        out[(i, col)] = 1.0;
    }
    Some(out)
}

fn invariance_residual(basis: &DMatrix<f64>, generators: &[DMatrix<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for a in generators {
        let av = a * basis;
        let proj = basis * (basis.transpose() * &av);
        let scale = tensor_scale(a.amax());
        worst = worst.max((av - proj).amax() / scale);
    }
    worst
}

/// Result of the eigenspace-sum search for invariant subspaces.
#[derive(Debug)]
pub struct SubspaceSearch {
    pub subspaces: Vec<Subspace>,
    /// Orthogonal complements (with respect to the form) of found totally
    /// isotropic subspaces of dimension > 1; invariant but above the search
    /// dimension cap, reported as the annihilator of the found subspace.
    pub duals: Vec<(usize, usize)>,
    pub inconclusive: Option<String>,
}

/// Search for invariant subspaces of dimension <= k_max.
///
/// Procedure: draw a seeded generic element of the span, split it into real
/// generalized eigenspaces (kernel powers when a single eigenvalue remains),
/// enumerate sums up to the dimension cap, and filter by the invariance
/// residual under every generator.
pub fn invariant_subspaces(
    generators: &[DMatrix<f64>],
    k_max: usize,
    form: &IndefiniteForm,
    seed: u64,
) -> SubspaceSearch {
    assert!((1..=3).contains(&k_max), "search supports k <= 3");
    let m = form.gram.nrows();
    let scale = generators.iter().map(|a| a.amax()).fold(0.0f64, f64::max);
    if scale < 1e-12 {
        return SubspaceSearch {
            subspaces: Vec::new(),
            duals: Vec::new(),
            inconclusive: Some("all generators vanish; every subspace is invariant".into()),
        };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generic = DMatrix::zeros(m, m);
    for a in generators {
        generic += a * (rng.random::<f64>() * 2.0 - 1.0);
    }

    let eigenspaces = real_generalized_eigenspaces(&generic);
    let mut candidates: Vec<DMatrix<f64>> = Vec::new();
    if eigenspaces.len() <= 1 {
        // Nilpotent-style fallback: kernel powers of the generic element.
        let mut power = generic.clone() / tensor_scale(generic.amax());
        for _ in 0..m {
            let ker = nullspace(&power, JOINT_KERNEL_REL);
            if !ker.is_empty() && ker.len() <= k_max {
                if let Some(b) = orthonormalize(ker) {
                    candidates.push(b);
                }
            }
            if candidates.len() >= CANDIDATE_CAP {
                break;
            }
            power = &power * &generic;
            let n = power.amax();
            if n > 0.0 {
                power /= n;
            }
        }
    } else {
        // Sums of generalized eigenspaces with total dimension <= k_max.
        let n_spaces = eigenspaces.len();
        let mut stack: Vec<Vec<usize>> = (0..n_spaces).map(|i| vec![i]).collect();
        while let Some(sel) = stack.pop() {
            let total: usize = sel.iter().map(|&i| eigenspaces[i].ncols()).sum();
            if total <= k_max {
                let cols: Vec<DVector<f64>> = sel
                    .iter()
                    .flat_map(|&i| eigenspaces[i].column_iter().map(|c| c.into_owned()))
                    .collect();
                if let Some(b) = orthonormalize(cols) {
                    candidates.push(b);
                }
                if candidates.len() >= CANDIDATE_CAP {
                    break;
                }
                let last = *sel.last().unwrap();
                for next in (last + 1)..n_spaces {
                    let mut s = sel.clone();
                    s.push(next);
                    stack.push(s);
                }
            }
        }
    }

    let mut found: Vec<Subspace> = Vec::new();
    for basis in candidates {
        if basis.ncols() > k_max {
            continue;
        }
        let residual = invariance_residual(&basis, generators);
        if residual < INVARIANCE_TOL {
            // Deduplicate by projector distance.
            let proj = &basis * basis.transpose();
            let dup = found.iter().any(|s| {
                s.dim() == basis.ncols() && {
                    let p2 = &s.basis * s.basis.transpose();
                    (&proj - p2).amax() < DEDUP_PROJECTOR_TOL
                }
            });
            if !dup {
                // Canonicalize: when the subspace is exactly a coordinate
                // plane, present it with the exact coordinate basis so the
                // residual of integer model algebras is literally zero.
                let (basis, residual) = match axis_aligned_basis(&basis) {
                    Some(exact) => {
                        let r = invariance_residual(&exact, generators);
                        if r <= residual {
                            (exact, r)
                        } else {
                            (basis, residual)
                        }
                    }
                    None => (basis, residual),
                };
                let (class, causal) = classify_subspace(&basis, form);
                found.push(Subspace {
                    basis,
                    class,
                    causal,
                    invariance_residual: residual,
                });
            }
        }
    }
    found.sort_by_key(|s| s.dim());
    let duals = found
        .iter()
        .enumerate()
        .filter(|(_, s)| s.class == SubspaceClass::TotallyIsotropic && s.dim() > 1)
        .map(|(i, s)| (i, m - s.dim()))
        .collect();
    let inconclusive = if found.is_empty() {
        Some("no invariant subspace surfaced from the generic-element eigenspace lattice".into())
    } else {
        None
    };
    SubspaceSearch {
        subspaces: found,
        duals,
        inconclusive,
    }
}

/// Real generalized eigenspaces of a matrix: clusters of eigenvalues (complex
/// pairs merged) mapped to the nullspace of the associated real polynomial in
/// the matrix, raised to the cluster multiplicity.
fn real_generalized_eigenspaces(a: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let m = a.nrows();
    let scale = tensor_scale(a.amax());
    let eigs: Vec<Complex<f64>> = a.complex_eigenvalues().iter().copied().collect();
    let tol = 1e-7 * scale;

    // Cluster eigenvalues; keep one representative of each conjugate pair.
    let mut clusters: Vec<(Complex<f64>, usize)> = Vec::new();
    for e in eigs {
        let e = if e.im < 0.0 { e.conj() } else { e };
        match clusters.iter_mut().find(|(c, _)| (c - e).norm() < tol) {
            Some((_, count)) => *count += 1,
            None => clusters.push((e, 1)),
        }
    }

    let id = DMatrix::<f64>::identity(m, m);
    let mut out = Vec::new();
    for (lambda, mult) in clusters {
        let factor = if lambda.im.abs() < tol {
            a - &id * lambda.re
        } else {
            // (A - l)(A - conj l) = A^2 - 2 Re(l) A + |l|^2
            a * a - a * (2.0 * lambda.re) + &id * lambda.norm_sqr()
        };
        let mut power = factor.clone() / tensor_scale(factor.amax());
        for _ in 1..mult {
            power = &power * &factor;
            let n = power.amax();
            if n > 0.0 {
                power /= n;
            }
        }
        let ker = nullspace(&power, JOINT_KERNEL_REL);
        if let Some(b) = orthonormalize(ker) {
            out.push(b);
        }
    }
    out
}
