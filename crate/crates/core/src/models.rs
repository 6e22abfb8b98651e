//! Hand-written model algebras used as references for the numerical spans:
//! the stabilizer of a totally isotropic 2-plane in so(2, n+2), the nilpotent
//! (2n+1)-dimensional wave pattern, and the parabolic semidirect pattern
//! coming from a parallel lightlike direction.
//!
//! All constructors return integer matrices (as f64 and as exact i64 tables)
//! with respect to the coordinate order (x1, x2, y_1..y_n, z1, z2) and the
//! anti-diagonal inner product pairing x1-z2 and x2-z1, positive on the y
//! block.

use nalgebra::DMatrix;

use crate::lie::IndefiniteForm;

/// The signature-(2, n+2) Gram matrix with anti-diagonal corner pairings.
pub fn corner_form(n: usize) -> IndefiniteForm {
    let m = n + 4;
    let mut g = DMatrix::zeros(m, m);
    g[(0, m - 1)] = 1.0;
    g[(m - 1, 0)] = 1.0;
    g[(1, m - 2)] = 1.0;
    g[(m - 2, 1)] = 1.0;
    for i in 0..n {
        g[(2 + i, 2 + i)] = 1.0;
    }
    IndefiniteForm::new(g).expect("corner form nondegenerate")
}

fn to_f64(rows: &[Vec<i64>]) -> DMatrix<f64> {
    let m = rows.len();
    DMatrix::from_fn(m, m, |i, j| rows[i][j] as f64)
}

/// Basis of the stabilizer algebra of L = span(x1, x2) inside so(2, n+2),
/// as integer matrices. Block structure:
/// [[X, B, C], [0, A, E], [0, 0, K]] with K and E determined by the form.
///
/// Parameters: X in gl(2) (4), A in so(n) (n(n-1)/2), B rows u and v (2n),
/// and one corner parameter; dimension 4 + n(n-1)/2 + 2n + 1.
pub fn iso_l_basis_exact(n: usize) -> Vec<Vec<Vec<i64>>> {
    let m = n + 4;
    let z0 = n + 2; // z1 index
    let mut out = Vec::new();
    let zero = || vec![vec![0i64; m]; m];

    // X = E_ab in gl(2); corner block K = -J2 X^T J2, i.e.
    // K[i][j] = -X[1-j][1-i].
    for a in 0..2 {
        for b in 0..2 {
            let mut mat = zero();
            mat[a][b] = 1;
            mat[z0 + (1 - b)][z0 + (1 - a)] = -1;
            out.push(mat);
        }
    }
    // A = E_ij - E_ji in so(n) on the y block.
    for i in 0..n {
        for j in (i + 1)..n {
            let mut mat = zero();
            mat[2 + i][2 + j] = 1;
            mat[2 + j][2 + i] = -1;
            out.push(mat);
        }
    }
    // u row (first x-row) with compensating column -u in the z2 column.
    for r in 0..n {
        let mut mat = zero();
        mat[0][2 + r] = 1;
        mat[2 + r][z0 + 1] = -1;
        out.push(mat);
    }
    // v row (second x-row) with compensating column -v in the z1 column.
    for r in 0..n {
        let mut mat = zero();
        mat[1][2 + r] = 1;
        mat[2 + r][z0] = -1;
        out.push(mat);
    }
    // Corner parameter coupling the two isotropic pairs.
    let mut corner = zero();
    corner[0][z0] = -1;
    corner[1][z0 + 1] = 1;
    out.push(corner);
    out
}

pub fn iso_l_basis(n: usize) -> Vec<DMatrix<f64>> {
    iso_l_basis_exact(n).iter().map(|m| to_f64(m)).collect()
}

/// The element diag(I2, 0, -I2) of the stabilizer algebra (X = identity).
pub fn iso_l_diagonal_element(n: usize) -> Vec<Vec<i64>> {
    let m = n + 4;
    let mut mat = vec![vec![0i64; m]; m];
    mat[0][0] = 1;
    mat[1][1] = 1;
    mat[n + 2][n + 2] = -1;
    mat[n + 3][n + 3] = -1;
    mat
}

/// The rank-one stabilizer element with X = E_11 (and corner completion).
pub fn iso_l_rank_one_element(n: usize) -> Vec<Vec<i64>> {
    let m = n + 4;
    let mut mat = vec![vec![0i64; m]; m];
    mat[0][0] = 1;
    mat[n + 3][n + 3] = -1;
    mat
}

/// Basis of the abelian (2n+1)-dimensional wave holonomy pattern in
/// so(2, n+2):
/// rows (x1, x2, y, z1, z2) = [[0,0,u',c,0],[0,0,v',0,-c],[0,0,0,-v,-u],0,0].
pub fn wave_pattern_basis_exact(n: usize) -> Vec<Vec<Vec<i64>>> {
    let m = n + 4;
    let z0 = n + 2;
    let zero = || vec![vec![0i64; m]; m];
    let mut out = Vec::new();
    for r in 0..n {
        let mut mat = zero();
        mat[0][2 + r] = 1;
        mat[2 + r][z0 + 1] = -1;
        out.push(mat);
    }
    for r in 0..n {
        let mut mat = zero();
        mat[1][2 + r] = 1;
        mat[2 + r][z0] = -1;
        out.push(mat);
    }
    let mut c = zero();
    c[0][z0] = 1;
    c[1][z0 + 1] = -1;
    out.push(c);
    out
}

pub fn wave_pattern_basis(n: usize) -> Vec<DMatrix<f64>> {
    wave_pattern_basis_exact(n).iter().map(|m| to_f64(m)).collect()
}

/// Off-pattern content of a matrix against the wave pattern, together with
/// the coupling residuals (c must reappear negated, u and v must reappear in
/// the middle-block columns).
pub fn wave_pattern_residual(mat: &DMatrix<f64>, n: usize) -> f64 {
    let m = n + 4;
    assert_eq!(mat.nrows(), m);
    let z0 = n + 2;
    let mut worst = 0.0f64;
    // Extract parameters.
    let c = mat[(0, z0)];
    let u: Vec<f64> = (0..n).map(|r| mat[(0, 2 + r)]).collect();
    let v: Vec<f64> = (0..n).map(|r| mat[(1, 2 + r)]).collect();
    // Expected matrix from the parameters.
    let mut expect = DMatrix::zeros(m, m);
    for r in 0..n {
        expect[(0, 2 + r)] = u[r];
        expect[(1, 2 + r)] = v[r];
        expect[(2 + r, z0)] = -v[r];
        expect[(2 + r, z0 + 1)] = -u[r];
    }
    expect[(0, z0)] = c;
    expect[(1, z0 + 1)] = -c;
    for i in 0..m {
        for j in 0..m {
            worst = worst.max((mat[(i, j)] - expect[(i, j)]).abs());
        }
    }
    worst
}

/// Parabolic pattern for a parallel lightlike direction in frame
/// (X, E_1..E_n, Z): [[0, v', 0], [0, A, -v], [0, 0, 0]].
pub fn semidirect_pattern_basis(a_basis: &[DMatrix<f64>], n: usize) -> Vec<DMatrix<f64>> {
    let m = n + 2;
    let mut out = Vec::new();
    for a in a_basis {
        let mut mat = DMatrix::zeros(m, m);
        for i in 0..n {
            for j in 0..n {
                mat[(1 + i, 1 + j)] = a[(i, j)];
            }
        }
        out.push(mat);
    }
    for r in 0..n {
        let mut mat = DMatrix::zeros(m, m);
        mat[(0, 1 + r)] = 1.0;
        mat[(1 + r, m - 1)] = -1.0;
        out.push(mat);
    }
    out
}

/// Basis of so(p, q) for a diagonal form diag(-1 x p, +1 x q).
pub fn so_pq_basis(p: usize, q: usize) -> Vec<DMatrix<f64>> {
    let n = p + q;
    let eps: Vec<f64> = (0..n).map(|i| if i < p { -1.0 } else { 1.0 }).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            // M with M' G + G M = 0 for G = diag(eps): M = E_ij eps_j - E_ji eps_i.
            let mut m = DMatrix::zeros(n, n);
            m[(i, j)] = eps[j];
            m[(j, i)] = -eps[i];
            out.push(m);
        }
    }
    out
}

/// Basis of the Lie algebra preserving an arbitrary nondegenerate symmetric
/// form: nullspace of M -> M' G + G M over the standard matrix basis.
pub fn so_of_form(form: &IndefiniteForm) -> Vec<DMatrix<f64>> {
    let m = form.gram.nrows();
    let mut rows = DMatrix::zeros(m * m, m * m);
    // Row (a,b): entry of A'G + GA at (a,b) as a linear map of A entries.
    for a in 0..m {
        for b in 0..m {
            for i in 0..m {
                for j in 0..m {
                    // (A' G)[a][b] = sum_k A[k][a] G[k][b]
                    let mut coeff = 0.0;
                    if j == a {
                        coeff += form.gram[(i, b)];
                    }
                    // (G A)[a][b] = sum_k G[a][k] A[k][b]
                    if j == b {
                        coeff += form.gram[(a, i)];
                    }
                    if coeff != 0.0 {
                        rows[(a * m + b, i * m + j)] += coeff;
                    }
                }
            }
        }
    }
    crate::lie::nullspace(&rows, 1e-10)
        .into_iter()
        .map(|v| DMatrix::from_fn(m, m, |i, j| v[i * m + j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::tensor_scale;

    fn algebra_residual(mat: &DMatrix<f64>, gram: &DMatrix<f64>) -> f64 {
        (mat.transpose() * gram + gram * mat).amax() / tensor_scale(mat.amax())
    }

    #[test]
    fn iso_l_is_in_the_orthogonal_algebra() {
        for n in [2usize, 3] {
            let form = corner_form(n);
            for m in iso_l_basis(n) {
                assert!(algebra_residual(&m, &form.gram) < 1e-14);
            }
            assert_eq!(iso_l_basis(n).len(), 4 + n * (n - 1) / 2 + 2 * n + 1);
        }
    }

    #[test]
    fn iso_l_preserves_the_isotropic_plane() {
        let n = 2;
        for m in iso_l_basis(n) {
            // Columns x1, x2 map into span(x1, x2): rows below 2 vanish there.
            for col in 0..2 {
                for row in 2..(n + 4) {
                    assert_eq!(m[(row, col)], 0.0);
                }
            }
        }
    }

    #[test]
    fn special_elements_belong_to_the_algebra() {
        let n = 2;
        let form = corner_form(n);
        for e in [iso_l_diagonal_element(n), iso_l_rank_one_element(n)] {
            let m = to_f64(&e);
            assert!(algebra_residual(&m, &form.gram) < 1e-14);
        }
    }

    #[test]
    fn wave_pattern_is_a_nilpotent_subalgebra() {
        let n = 2;
        let form = corner_form(n);
        let basis = wave_pattern_basis(n);
        assert_eq!(basis.len(), 2 * n + 1);
        for a in &basis {
            assert!(algebra_residual(a, &form.gram) < 1e-14);
            assert!(wave_pattern_residual(a, n) < 1e-14);
        }
        // [u_r, v_r] = -(corner generator); all brackets fit the pattern.
        for a in &basis {
            for b in &basis {
                let bracket = a * b - b * a;
                assert!(wave_pattern_residual(&bracket, n) < 1e-14);
            }
        }
        let bracket = &basis[0] * &basis[n] - &basis[n] * &basis[0];
        assert!((&bracket + &basis[2 * n]).amax() < 1e-14);
    }

    #[test]
    fn so_pq_dimension() {
        assert_eq!(so_pq_basis(0, 4).len(), 6);
        assert_eq!(so_pq_basis(2, 4).len(), 15);
        let gens = so_of_form(&corner_form(2));
        assert_eq!(gens.len(), 15);
    }
}
