//! Reference kernels from direct numerical integration of the mode ODE
//! `û'' + (1+k)û' + kû = 0`, independent of the closed forms in
//! [`crate::propagator`].

use crate::error::{check_param, Error, Result};
use crate::propagator::PropagatorKernels;

/// Local relative tolerance of the adaptive integrator.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

const MAX_STEPS: usize = 5_000_000;

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
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
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B_HAT: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates both fundamental solutions (unit displacement and unit
/// velocity) together as a 4-component system.
pub fn ode_oracle(k: f64, t: f64) -> Result<PropagatorKernels> {
    check_param("k", k, k >= 0.0, "[0, ∞)")?;
    check_param("t", t, (0.0..=100.0).contains(&t), "[0, 100]")?;
    // y = [A, A', K1, K1'].
    let mut y = [1.0, 0.0, 0.0, 1.0];
    let rhs = |y: &[f64; 4]| -> [f64; 4] {
        [
            y[1],
            -(1.0 + k) * y[1] - k * y[0],
            y[3],
            -(1.0 + k) * y[3] - k * y[2],
        ]
    };
    let mut time = 0.0;
    // Start inside the explicit stability region of the fastest mode.
    let mut h = (0.1 / (1.0 + k)).min(t.max(1e-300));
    let mut steps = 0;
    while time < t {
        if steps > MAX_STEPS {
            return Err(Error::IntegratorFailure("step budget exhausted"));
        }
        steps += 1;
        if time + h > t {
            h = t - time;
        }
        let mut stages = [[0.0; 4]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, a) in A[s].iter().enumerate().take(s) {
                for c in 0..4 {
                    ys[c] += h * a * stages[j][c];
                }
            }
            stages[s] = rhs(&ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for c in 0..4 {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B[s] * stages[s][c];
                lo += B_HAT[s] * stages[s][c];
            }
            y_new[c] += h * hi;
            let scale = 1e-30 + ORACLE_TOLERANCE * y[c].abs().max(y_new[c].abs());
            err = err.max((h * (hi - lo)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::IntegratorFailure("non-finite error estimate"));
        }
        if err <= 1.0 {
            time += h;
            y = y_new;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if time < t && h < 1e-15 * t.max(1.0) {
            return Err(Error::IntegratorFailure("step size underflow"));
        }
    }
    Ok(PropagatorKernels {
        k,
        t,
        a: y[0],
        k1: y[2],
        da: y[1],
        dk1: y[3],
    })
}
