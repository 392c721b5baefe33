//! Laguerre-Gauss mode functions on the transverse plane, their
//! normalization and orthogonality, and the shared factorial helpers.
//!
//! A mode is labeled by a radial quantum number `n` and an orbital angular
//! momentum `l`; its transverse profile is
//!
//! ```text
//! f_{n,l}(r, phi) = C_{n,l} x^l e^{i l phi} e^{-x^2} L_n^l(2 x^2),   x = r/w0
//! C_{n,l} = sqrt(2^(l+1) n! / (pi (l+n)!)) / w0
//! ```
//!
//! so that `integral |f|^2 d^2r = 1`. Degenerate ladders used elsewhere in the
//! crate are `l = 3m` (lowest manifold) and `l = 3m + 1` (first manifold).

use alloc::collections::BTreeMap;
use core::f64::consts::PI;
use num_complex::Complex64;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

pub use crate::quad::{adaptive_quadrature, radial_quadrature, QuadratureConfig};

/// Radial and angular quantum numbers of a transverse cavity (or collective
/// atomic) mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    /// Radial quantum number, `n >= 0`.
    pub n: u32,
    /// Orbital angular momentum in units of hbar, `l >= 0`.
    pub l: u32,
}

impl ModeIndex {
    pub fn new(n: u32, l: u32) -> Self {
        ModeIndex { n, l }
    }

    /// Lowest-manifold membership: `n = 0`, `l = 0 (mod 3)`.
    pub fn is_lowest_manifold(&self) -> bool {
        self.n == 0 && self.l % 3 == 0
    }

    /// First-manifold membership: `n = 0`, `l = 1 (mod 3)`.
    pub fn is_first_manifold(&self) -> bool {
        self.n == 0 && self.l % 3 == 1
    }
}

/// Static cavity data: waist and the frequency ladder.
///
/// Frequencies are keyed by `(n, alpha)` with `alpha = l mod 3`; all modes
/// sharing `(n, alpha)` are degenerate, which is what makes the mode ladders
/// usable as synthetic Landau levels.
#[derive(Debug, Clone)]
pub struct CavityGeometry {
    w0: f64,
    delta_freqs: BTreeMap<(u32, u8), f64>,
}

impl CavityGeometry {
    pub fn new(w0: f64) -> Result<Self> {
        if !(w0 > 0.0) {
            return Err(Error::InvalidInput("cavity waist must be positive"));
        }
        Ok(CavityGeometry { w0, delta_freqs: BTreeMap::new() })
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    /// Sets the angular frequency of the `(n, alpha)` ladder.
    pub fn set_frequency(&mut self, n: u32, alpha: u8, freq: f64) {
        self.delta_freqs.insert((n, alpha % 3), freq);
    }

    /// Frequency of the ladder a mode belongs to, if recorded.
    pub fn frequency(&self, mode: ModeIndex) -> Option<f64> {
        self.delta_freqs.get(&(mode.n, (mode.l % 3) as u8)).copied()
    }
}

/// Natural log of `n!` by direct summation.
///
/// Factorial ratios throughout the crate are formed in log space so that
/// quantum numbers up to the protocol's `l = 15` (and the quadrature checks
/// beyond) never overflow.
pub fn ln_factorial(n: u32) -> f64 {
    let mut acc = 0.0;
    let mut k = 2u32;
    while k <= n {
        acc += (k as f64).ln();
        k += 1;
    }
    acc
}

/// Generalized Laguerre polynomial `L_n^k(x)` by the three-term recurrence
/// in `n`:
///
/// ```text
/// L_0^k = 1,  L_1^k = 1 + k - x,
/// (n+1) L_{n+1}^k = (2n + k + 1 - x) L_n^k - (n + k) L_{n-1}^k
/// ```
pub fn laguerre(n: u32, k: u32, x: f64) -> f64 {
    let kf = k as f64;
    if n == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 + kf - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + kf + 1.0 - x) * l - (jf + kf) * lm1) / (jf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// Normalization constant `C_{n,l}` of the mode profile (dimension `1/w0`).
pub fn mode_norm_constant(n: u32, l: u32, w0: f64) -> f64 {
    let ln_c2 = (l as f64 + 1.0) * core::f64::consts::LN_2 + ln_factorial(n)
        - PI.ln()
        - ln_factorial(l + n);
    (0.5 * ln_c2).exp() / w0
}

/// Transverse mode profile `f_{n,l}(r, phi)` for waist `w0`.
pub fn mode_function(mode: ModeIndex, r: f64, phi: f64, w0: f64) -> Complex64 {
    let x = r / w0;
    let radial = mode_norm_constant(mode.n, mode.l, w0)
        * x.powi(mode.l as i32)
        * (-x * x).exp()
        * laguerre(mode.n, mode.l, 2.0 * x * x);
    Complex64::from_polar(radial, mode.l as f64 * phi)
}

/// Two-dimensional overlap `integral f_a^* f_b d^2r`.
///
/// The azimuthal integral is resolved analytically: it vanishes unless
/// `l_a = l_b` (in which case it contributes `2 pi`), so modes with different
/// angular momenta return exactly zero with no quadrature performed. The
/// radial factor is integrated numerically.
pub fn mode_overlap(a: ModeIndex, b: ModeIndex, w0: f64) -> Result<Complex64> {
    if !(w0 > 0.0) {
        return Err(Error::InvalidInput("cavity waist must be positive"));
    }
    if a.l != b.l {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Radial parts in units of x = r/w0; the waist cancels.
    let (na, nb, l) = (a.n, b.n, a.l);
    let ca = mode_norm_constant(na, l, 1.0);
    let cb = mode_norm_constant(nb, l, 1.0);
    let integrand = move |x: f64| {
        let xl2 = x.powi(2 * l as i32 + 1);
        let gauss = (-2.0 * x * x).exp();
        ca * cb * xl2 * gauss * laguerre(na, l, 2.0 * x * x) * laguerre(nb, l, 2.0 * x * x)
    };
    let (v, _err) = radial_quadrature(integrand, &QuadratureConfig::default())?;
    Ok(Complex64::new(2.0 * PI * v, 0.0))
}
