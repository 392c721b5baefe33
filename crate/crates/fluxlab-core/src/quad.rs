//! Adaptive Gauss-Kronrod quadrature for the radial overlap integrals.
//!
//! All azimuthal integrals in this crate are resolved analytically by angular
//! selection rules, so the only numerical integration needed is over a radial
//! coordinate on `[0, inf)` (integrands decaying like a Gaussian times a
//! rational function) or over a finite interval. Semi-infinite integrals are
//! mapped through `y = 2x^2` followed by `t = y/(1 + y)`, after which a
//! G7/K15 panel subdivision scheme with a worst-panel-first priority queue
//! does the work. Panel nodes are interior, so integrand endpoints are never
//! evaluated.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Tolerances and budget for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Relative tolerance on the accumulated integral.
    pub rel_tol: f64,
    /// Absolute tolerance floor (used when the integral is near zero).
    pub abs_tol: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-10, abs_tol: 1e-14, max_evals: 1_000_000 }
    }
}

// 15-point Kronrod abscissae on (-1, 1), positive half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_7,
    0.949_107_912_342_758_524_526_189_7,
    0.864_864_423_359_769_072_789_712_8,
    0.741_531_185_599_394_439_863_864_8,
    0.586_087_235_467_691_130_294_144_8,
    0.405_845_151_377_397_166_906_606_4,
    0.207_784_955_007_898_467_600_689_4,
    0.0,
];

// Kronrod weights matching XGK.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_0,
    0.063_092_092_629_978_553_290_700_7,
    0.104_790_010_322_250_183_839_876_3,
    0.140_653_259_715_525_918_745_189_6,
    0.169_004_726_639_267_902_826_583_4,
    0.190_350_578_064_785_409_913_256_4,
    0.204_432_940_075_298_892_414_162_0,
    0.209_482_141_084_727_828_012_999_2,
];

// Embedded 7-point Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_4,
    0.279_705_391_489_276_667_901_467_8,
    0.381_830_050_505_118_944_950_369_8,
    0.417_959_183_673_469_387_755_102_0,
];

/// One evaluated panel: Kronrod value plus an error estimate from the
/// Gauss/Kronrod discrepancy.
fn eval_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    (resk * h, (resk - resg).abs() * h)
}

#[derive(Debug)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive quadrature of `f` over the finite interval `[a, b]`.
///
/// Returns `(value, error_estimate)`; fails with
/// [`Error::QuadratureBudget`] if the evaluation cap is reached before the
/// tolerance target `max(abs_tol, rel_tol * |value|)`.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidInput("quadrature interval must be finite and nonempty"));
    }
    let mut heap = BinaryHeap::new();
    let (val, err) = eval_panel(&f, a, b);
    let mut evals = 15usize;
    let mut total_val = val;
    let mut total_err = err;
    heap.push(Panel { err, a, b, val });

    loop {
        let target = config.abs_tol.max(config.rel_tol * total_val.abs());
        if total_err <= target {
            return Ok((total_val, total_err));
        }
        if evals + 30 > config.max_evals {
            return Err(Error::QuadratureBudget { achieved_err: total_err });
        }
        let worst = match heap.pop() {
            // All panels settled at f64 resolution; nothing left to refine.
            None => return Ok((total_val, total_err)),
            Some(p) => p,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Not splittable in f64; keep its contribution, stop refining it.
            continue;
        }
        let (v1, e1) = eval_panel(&f, worst.a, mid);
        let (v2, e2) = eval_panel(&f, mid, worst.b);
        evals += 30;
        total_val += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { err: e1, a: worst.a, b: mid, val: v1 });
        heap.push(Panel { err: e2, a: mid, b: worst.b, val: v2 });
    }
}

/// Adaptive quadrature of `f` over `[0, inf)` for integrands that decay at
/// least as fast as `exp(-x^2)` times a rational function.
///
/// The integral is transformed with `y = 2x^2` and then compactified with
/// `t = y/(1 + y)` before panel subdivision. Returns `(value,
/// error_estimate)`.
pub fn radial_quadrature<F: Fn(f64) -> f64>(
    f: F,
    config: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let g = move |t: f64| {
        let om = 1.0 - t;
        let y = t / om;
        let x = (0.5 * y).sqrt();
        // dx = dy / (4x), dy = dt / (1-t)^2
        f(x) / (4.0 * x * om * om)
    };
    adaptive_quadrature(g, 0.0, 1.0, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ln_factorial(n: u32) -> f64 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn gaussian_moment_x1() {
        let (v, e) = radial_quadrature(|x| x * (-2.0 * x * x).exp(), &Default::default()).unwrap();
        assert!((v - 0.25).abs() < 1e-12, "got {v}");
        assert!(e < 1e-9);
    }

    #[test]
    fn gaussian_moment_x3() {
        let (v, _) =
            radial_quadrature(|x| x.powi(3) * (-2.0 * x * x).exp(), &Default::default()).unwrap();
        assert!((v - 0.125).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn gaussian_moment_l4() {
        // l = 4: integral of x^9 exp(-2x^2) = 4!/2^6 = 24/64
        let (v, _) =
            radial_quadrature(|x| x.powi(9) * (-2.0 * x * x).exp(), &Default::default()).unwrap();
        assert!((v - 24.0 / 64.0).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn finite_interval_polynomial_and_sine() {
        let (v, _) = adaptive_quadrature(|x| x * x, 0.0, 1.0, &Default::default()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-13);
        let (v, _) =
            adaptive_quadrature(|x| x.sin(), 0.0, core::f64::consts::PI, &Default::default())
                .unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let config = QuadratureConfig { rel_tol: 1e-15, abs_tol: 1e-300, max_evals: 200 };
        let r = adaptive_quadrature(|x| (1e4 * x * x).cos(), 0.0, 10.0, &config);
        match r {
            Err(Error::QuadratureBudget { achieved_err }) => assert!(achieved_err > 0.0),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(adaptive_quadrature(|x| x, 1.0, 1.0, &Default::default()).is_err());
        assert!(adaptive_quadrature(|x| x, 0.0, f64::INFINITY, &Default::default()).is_err());
    }

    #[test]
    fn integrable_sqrt_singularity() {
        // integral of 1/sqrt(x) over (0, 1] = 2; the transform in
        // radial_quadrature produces this shape for even-power integrands.
        let config = QuadratureConfig { rel_tol: 1e-9, abs_tol: 1e-12, max_evals: 1_000_000 };
        let (v, _) = adaptive_quadrature(|x| 1.0 / x.sqrt(), 1e-300, 1.0, &config).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "got {v}");
    }

    proptest! {
        #[test]
        fn gaussian_moments_match_factorials(l in 0u32..=8) {
            // integral of x^(2l+1) exp(-2x^2) dx = l! / 2^(l+2)
            let (v, _) = radial_quadrature(
                |x| x.powi(2 * l as i32 + 1) * (-2.0 * x * x).exp(),
                &Default::default(),
            ).unwrap();
            let exact = (ln_factorial(l) - (l as f64 + 2.0) * core::f64::consts::LN_2).exp();
            prop_assert!((v - exact).abs() <= 1e-10 * exact.max(1e-3));
        }

        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 1u32..6) {
            let f = move |x: f64| x * (-2.0 * x * x).exp();
            let g = move |x: f64| x.powi(k as i32) * (-x * x).exp();
            let (vf, _) = radial_quadrature(f, &Default::default()).unwrap();
            let (vg, _) = radial_quadrature(g, &Default::default()).unwrap();
            let (vc, _) = radial_quadrature(move |x| a * f(x) + b * g(x), &Default::default()).unwrap();
            prop_assert!((vc - (a * vf + b * vg)).abs() < 1e-9);
        }
    }
}
