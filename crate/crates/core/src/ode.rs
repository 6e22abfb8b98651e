//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) for dense
//! matrix-valued linear ODEs. The whole matrix is advanced as one system; the
//! embedded pair supplies the local error estimates that are accumulated into
//! the reported error bound.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const RK_RTOL: f64 = 1e-10;
pub const RK_ATOL: f64 = 1e-12;

const MAX_STEPS: usize = 2_000_000;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub y: DMatrix<f64>,
    /// Accumulated Frobenius norm of the embedded local error estimates.
    pub error_estimate: f64,
    pub steps: usize,
    pub rejected: usize,
}

/// Integrate y' = rhs(t, y) from t0 to t1, restarting at each breakpoint so
/// velocity discontinuities of piecewise curves never sit inside a step.
pub fn integrate_linear(
    rhs: &dyn Fn(f64, &DMatrix<f64>) -> Result<DMatrix<f64>>,
    y0: DMatrix<f64>,
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
    breakpoints: &[f64],
) -> Result<OdeSolution> {
    let mut marks: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > t0 && *b < t1)
        .collect();
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    marks.dedup();
    marks.push(t1);

    let mut y = y0;
    let mut t_start = t0;
    let mut error_estimate = 0.0;
    let mut steps = 0;
    let mut rejected = 0;
    for t_end in marks {
        let piece = integrate_piece(rhs, y, t_start, t_end, rtol, atol)?;
        y = piece.y;
        error_estimate += piece.error_estimate;
        steps += piece.steps;
        rejected += piece.rejected;
        t_start = t_end;
    }
    Ok(OdeSolution {
        y,
        error_estimate,
        steps,
        rejected,
    })
}

fn integrate_piece(
    rhs: &dyn Fn(f64, &DMatrix<f64>) -> Result<DMatrix<f64>>,
    y0: DMatrix<f64>,
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Result<OdeSolution> {
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(OdeSolution {
            y: y0,
            error_estimate: 0.0,
            steps: 0,
            rejected: 0,
        });
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = span / 16.0;
    let h_min = span * 1e-14;
    let mut error_estimate = 0.0;
    let mut steps = 0;
    let mut rejected = 0;

    while t < t1 {
        if steps + rejected > MAX_STEPS {
            return Err(Error::IntegratorFailure(format!(
                "step limit exceeded at t = {t}"
            )));
        }
        if h < h_min {
            return Err(Error::IntegratorFailure(format!(
                "step size underflow at t = {t} (h = {h:.3e})"
            )));
        }
        if t + h > t1 {
            h = t1 - t;
        }

        // Stage times never touch the right endpoint of the piece: velocity
        // fields of piecewise curves are right-continuous, so the value at a
        // breakpoint belongs to the next piece. A nudge of 1e-13 of the span
        // keeps stage data on this piece at negligible position error.
        let nudge = span * 1e-13;
        let mut k: Vec<DMatrix<f64>> = Vec::with_capacity(7);
        k.push(rhs(t, &y)?);
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    ys += kj * (a * h);
                }
            }
            let ts = (t + C[s] * h).min(t1 - nudge);
            k.push(rhs(ts, &ys)?);
        }

        let mut y5 = y.clone();
        let mut e = DMatrix::zeros(y.nrows(), y.ncols());
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y5 += kj * (B5[j] * h);
            }
            let db = B5[j] - B4[j];
            if db != 0.0 {
                e += kj * (db * h);
            }
        }

        // Scaled RMS error over all entries.
        let mut err_sq = 0.0;
        for (val, (y_old, y_new)) in e.iter().zip(y.iter().zip(y5.iter())) {
            let sc = atol + rtol * y_old.abs().max(y_new.abs());
            err_sq += (val / sc) * (val / sc);
        }
        let err = (err_sq / e.len() as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y5;
            steps += 1;
            error_estimate += e.norm();
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }

    Ok(OdeSolution {
        y,
        error_estimate,
        steps,
        rejected,
    })
}
