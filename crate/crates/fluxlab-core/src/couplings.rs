//! Coupling matrix elements between collective atomic Laguerre-Gauss modes.
//!
//! The two-step transfer scheme uses classical control fields with tailored
//! spatial profiles. Projecting them onto the mode ladders produces coupling
//! matrix elements between radial quantum numbers `n` (spin modes, column
//! index) and `n'` (polarization modes, row index):
//!
//! * Step one uses the profile `kappa(x) = x^2 / (a^3 + x^3)` with a cutoff
//!   `a = r0/w0`; the matrix element is `chi_{3m}^{n',n}`.
//! * Step two uses `kappa_tilde(x) = x^2`, chosen so that the spin mode with
//!   `n = 0` couples only to the `n' = 0` polarization row; the element is
//!   `chi_tilde_{3m}^{n',n}` connecting the `l = 3m - 2` ladder to `l = 3m`.
//!
//! Finite-cutoff values come from radial quadrature; the `a -> 0` limits have
//! closed forms used as oracles and as fast tables.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::modes::{laguerre, ln_factorial};
use crate::quad::{radial_quadrature, QuadratureConfig};
use crate::{Error, Result};

/// Quadrature tolerances for coupling integrals. The absolute floor sits two
/// decades above the Gauss-Kronrod roundoff plateau so that identically-zero
/// integrands (suppressed couplings) converge instead of exhausting the
/// evaluation budget chasing machine noise.
fn chi_quad_config() -> QuadratureConfig {
    // The absolute floor stops the relative-error chase on suppressed
    // elements; 1e-11 is reachable within the evaluation budget for every
    // tabulated order (the cutoff feature at x ~ a makes 1e-12 unreachable
    // for the highest ones) and sits far below any consumer's tolerance.
    QuadratureConfig { rel_tol: 1e-10, abs_tol: 1e-11, max_evals: 1_000_000 }
}

/// Spatial profile of the active control field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialProfile {
    /// Step-one profile `x^2 / (a^3 + x^3)` with dimensionless cutoff `a`.
    KappaStep1 { a: f64 },
    /// Step-two profile `x^2` (no parameter).
    KappaTildeStep2,
}

impl SpatialProfile {
    /// Profile value at dimensionless radius `x`.
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            SpatialProfile::KappaStep1 { a } => kappa(x, a),
            SpatialProfile::KappaTildeStep2 => x * x,
        }
    }
}

/// Step-one spatial profile `kappa(x) = x^2 / (a^3 + x^3)`.
pub fn kappa(x: f64, a: f64) -> f64 {
    x * x / (a * a * a + x * x * x)
}

/// Step-one coupling `chi_{3m}^{n',n}` at finite cutoff `a`, by quadrature:
///
/// ```text
/// chi = C int_0^inf e^(-2x^2) x^(6m+2) kappa(x) L_n^(3m+1)(2x^2) L_{n'}^(3m)(2x^2) dx
/// C   = 2^(3m+2) sqrt(2 n! n'! / ((3m+1+n)! (3m+n')!))
/// ```
pub fn chi_numeric(m: u32, n: u32, n_prime: u32, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput("cutoff a must be positive"));
    }
    let ln_c = (3.0 * m as f64 + 2.0) * core::f64::consts::LN_2
        + 0.5
            * (core::f64::consts::LN_2 + ln_factorial(n) + ln_factorial(n_prime)
                - ln_factorial(3 * m + 1 + n)
                - ln_factorial(3 * m + n_prime));
    let c = ln_c.exp();
    let k1 = 3 * m + 1;
    let k0 = 3 * m;
    let integrand = move |x: f64| {
        let y = 2.0 * x * x;
        (-y).exp() * x.powi(6 * m as i32 + 2) * kappa(x, a) * laguerre(n, k1, y) * laguerre(n_prime, k0, y)
    };
    let (v, _) = radial_quadrature(integrand, &chi_quad_config())?;
    Ok(c * v)
}

/// Closed form of `chi_{3m}^{n',n}` in the limit `a -> 0`:
/// `sqrt(2 (3m+n')! n! / (n'! (3m+1+n)!))` for `n >= n'`, zero otherwise.
pub fn chi_analytic_a0(m: u32, n: u32, n_prime: u32) -> f64 {
    if n < n_prime {
        return 0.0;
    }
    let ln_v2 = core::f64::consts::LN_2 + ln_factorial(3 * m + n_prime) + ln_factorial(n)
        - ln_factorial(n_prime)
        - ln_factorial(3 * m + 1 + n);
    (0.5 * ln_v2).exp()
}

/// Printed lowest-order residual coupling to the `n' > 0` rows at small
/// cutoff: `-(8 pi / 3) sqrt(2/3) a^2` (stated for `m = 0`; smaller for
/// higher `m`). Advisory: the quadrature is the ground truth for finite `a`.
pub fn chi_correction_small_a(a: f64) -> f64 {
    -(8.0 * PI / 3.0) * (2.0f64 / 3.0).sqrt() * a * a
}

/// Step-two coupling of the `n = 0` spin column, `chi_tilde_{3m}^{n',0}`:
/// `(1/2) sqrt((3m)!/(3m-2)!)` for `n' = 0` and exactly zero otherwise (the
/// `x^2` profile cancels every transition out of `n = 0` into `n' > 0`).
///
/// `m >= 1` is required: the element couples the `l = 3m - 2` ladder to
/// `l = 3m`, and no `l = -2` mode exists.
pub fn chi_tilde(m: u32, n_prime: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("chi_tilde requires m >= 1 (couples l = 3m-2 to l = 3m)"));
    }
    if n_prime > 0 {
        return Ok(0.0);
    }
    Ok(0.5 * (0.5 * (ln_factorial(3 * m) - ln_factorial(3 * m - 2))).exp())
}

/// Step-two coupling `chi_tilde_{3m}^{n',n}` by quadrature of the printed
/// integrand (used to verify the suppression result and to tabulate the
/// `n' = 0` row that the reduced second-stage system retains):
///
/// ```text
/// chi_tilde = C int_0^inf e^(-2x^2) x^(6m+1) L_n^(3m-2)(2x^2) L_{n'}^(3m)(2x^2) dx
/// C         = 2^(3m+1) sqrt(n! n'! / ((3m-2+n)! (3m+n')!))
/// ```
pub fn chi_tilde_numeric(m: u32, n: u32, n_prime: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("chi_tilde requires m >= 1 (couples l = 3m-2 to l = 3m)"));
    }
    let ln_c = (3.0 * m as f64 + 1.0) * core::f64::consts::LN_2
        + 0.5
            * (ln_factorial(n) + ln_factorial(n_prime)
                - ln_factorial(3 * m - 2 + n)
                - ln_factorial(3 * m + n_prime));
    let c = ln_c.exp();
    let klo = 3 * m - 2;
    let khi = 3 * m;
    let integrand = move |x: f64| {
        let y = 2.0 * x * x;
        (-y).exp() * x.powi(6 * m as i32 + 1) * laguerre(n, klo, y) * laguerre(n_prime, khi, y)
    };
    let (v, _) = radial_quadrature(integrand, &chi_quad_config())?;
    Ok(c * v)
}

/// How a [`CouplingTable`]'s entries were computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComputedBy {
    Quadrature,
    AnalyticLimit,
}

/// Precomputed coupling matrix elements for `m <= m_max`, `n, n' <= n_max`.
///
/// Keys are `(m, n, n')` with `n` the spin column and `n'` the polarization
/// row. For the step-two profile only the `n' = 0` row enters the reduced
/// dynamics; its entries are tabulated by quadrature and every `n' > 0` slot
/// is zero (exactly, by the suppression result, for the `n = 0` column that
/// feeds them).
#[derive(Debug, Clone)]
pub struct CouplingTable {
    profile: SpatialProfile,
    computed_by: ComputedBy,
    m_max: u32,
    n_max: u32,
    entries: BTreeMap<(u32, u32, u32), f64>,
}

impl CouplingTable {
    pub fn profile(&self) -> SpatialProfile {
        self.profile
    }

    pub fn computed_by(&self) -> ComputedBy {
        self.computed_by
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Entry `(m, n, n')`, if within bounds.
    pub fn get(&self, m: u32, n: u32, n_prime: u32) -> Option<f64> {
        self.entries.get(&(m, n, n_prime)).copied()
    }

    /// All entries in deterministic key order.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32, u32), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Rows of `(m, n_row, n_col, value)` for export, in deterministic order.
    pub fn export_rows(&self) -> Vec<(u32, u32, u32, f64)> {
        self.entries.iter().map(|(&(m, n, np), &v)| (m, np, n, v)).collect()
    }
}

/// Builds the dense coupling table for a profile by quadrature.
///
/// For [`SpatialProfile::KappaTildeStep2`] the valid sector index starts at
/// `m = 1` and only the `n' = 0` row is computed (the rest of the table is
/// zero; those rows never enter the reduced second-stage system).
pub fn build_coupling_table(profile: SpatialProfile, m_max: u32, n_max: u32) -> Result<CouplingTable> {
    let mut entries = BTreeMap::new();
    match profile {
        SpatialProfile::KappaStep1 { a } => {
            for m in 0..=m_max {
                for n in 0..=n_max {
                    for np in 0..=n_max {
                        entries.insert((m, n, np), chi_numeric(m, n, np, a)?);
                    }
                }
            }
        }
        SpatialProfile::KappaTildeStep2 => {
            if m_max == 0 {
                return Err(Error::InvalidInput("step-two table requires m_max >= 1"));
            }
            for m in 1..=m_max {
                for n in 0..=n_max {
                    for np in 0..=n_max {
                        let v = if np == 0 { chi_tilde_numeric(m, n, 0)? } else { 0.0 };
                        entries.insert((m, n, np), v);
                    }
                }
            }
        }
    }
    Ok(CouplingTable { profile, computed_by: ComputedBy::Quadrature, m_max, n_max, entries })
}

/// Builds the step-one table in the `a -> 0` limit from the closed form.
pub fn build_coupling_table_a0(m_max: u32, n_max: u32) -> CouplingTable {
    let mut entries = BTreeMap::new();
    for m in 0..=m_max {
        for n in 0..=n_max {
            for np in 0..=n_max {
                entries.insert((m, n, np), chi_analytic_a0(m, n, np));
            }
        }
    }
    CouplingTable {
        profile: SpatialProfile::KappaStep1 { a: 0.0 },
        computed_by: ComputedBy::AnalyticLimit,
        m_max,
        n_max,
        entries,
    }
}
