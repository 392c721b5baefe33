//! Adaptive Dormand-Prince 5(4) integration of complex-valued ODE systems.
//!
//! The transfer dynamics in this crate are linear Schrodinger-type equations
//! `dy/dt = -i G(t) y` with time-dependent generators, integrated over fixed
//! windows. The integrator works on any right-hand side `f(t, y, dy)` over
//! `Complex64` state vectors; step size is controlled by an embedded 4th
//! order error estimate with per-component mixed absolute/relative weights.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use num_complex::Complex64;

use crate::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Starting step size; estimated from the initial derivative if `None`.
    pub h_initial: Option<f64>,
    /// Floor for the step size, as a fraction of the integration span.
    pub h_min_fraction: f64,
    /// Hard cap on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h_initial: None,
            h_min_fraction: 1e-14,
            max_steps: 50_000_000,
        }
    }
}

/// Counters from one integration run.
#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evals: usize,
}

// Dormand-Prince 5(4) tableau. The seventh stage equals the next step's
// first stage (FSAL), so an accepted step costs six fresh evaluations.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the 5th-order solution weights and the embedded
// 4th-order weights, applied directly to form the error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy_stage(y: &[Complex64], h: f64, ks: &[&[Complex64]], coeffs: &[f64], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in ks.iter().zip(coeffs) {
            acc += k[i] * c;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` in place, `t1 > t0`.
///
/// The right-hand side writes the derivative into its third argument. On
/// success `y` holds the state at `t1`. Fails with
/// [`Error::StepSizeUnderflow`] when error control cannot advance (step
/// below the floor or the step budget exhausted).
pub fn integrate<F>(mut rhs: F, t0: f64, t1: f64, y: &mut [Complex64], opts: &OdeOptions) -> Result<OdeStats>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidInput("integration window must satisfy t0 < t1 and be finite"));
    }
    if !(opts.rtol > 0.0) || !(opts.atol > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive"));
    }
    let dim = y.len();
    let span = t1 - t0;
    let h_min = opts.h_min_fraction * span;
    let mut stats = OdeStats::default();

    let mut k: [Vec<Complex64>; 7] = core::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); dim]);
    let mut ytmp = vec![Complex64::new(0.0, 0.0); dim];
    let mut ynew = vec![Complex64::new(0.0, 0.0); dim];

    let mut t = t0;
    rhs(t, y, &mut k[0]);
    stats.rhs_evals += 1;

    let mut h = match opts.h_initial {
        Some(h0) => h0.min(span),
        None => {
            // Scale the first step so that an Euler move stays within
            // tolerance of the state magnitude.
            let ynorm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let fnorm = k[0].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let guess = 0.01 * (ynorm + opts.atol) / (fnorm + 1e-300);
            guess.min(span * 1e-2).max(h_min)
        }
    };

    loop {
        if stats.steps_accepted + stats.steps_rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        axpy_stage(y, h, &[&k[0]], &A2, &mut ytmp);
        rhs(t + C[1] * h, &ytmp, &mut k[1]);
        axpy_stage(y, h, &[&k[0], &k[1]], &A3, &mut ytmp);
        rhs(t + C[2] * h, &ytmp, &mut k[2]);
        axpy_stage(y, h, &[&k[0], &k[1], &k[2]], &A4, &mut ytmp);
        rhs(t + C[3] * h, &ytmp, &mut k[3]);
        axpy_stage(y, h, &[&k[0], &k[1], &k[2], &k[3]], &A5, &mut ytmp);
        rhs(t + C[4] * h, &ytmp, &mut k[4]);
        axpy_stage(y, h, &[&k[0], &k[1], &k[2], &k[3], &k[4]], &A6, &mut ytmp);
        rhs(t + C[5] * h, &ytmp, &mut k[5]);
        axpy_stage(y, h, &[&k[0], &k[1], &k[2], &k[3], &k[4], &k[5]], &A7, &mut ynew);
        rhs(t + C[6] * h, &ynew, &mut k[6]);
        stats.rhs_evals += 6;

        // Weighted RMS of the embedded error estimate.
        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = Complex64::new(0.0, 0.0);
            for (kj, &c) in k.iter().zip(&E) {
                e += kj[i] * c;
            }
            let scale = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            let ratio = e.norm() * h / scale;
            err_sq += ratio * ratio;
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            stats.steps_accepted += 1;
            if last {
                return Ok(stats);
            }
        } else {
            stats.steps_rejected += 1;
        }

        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t });
        }
    }
}
