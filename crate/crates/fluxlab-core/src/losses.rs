//! Non-adiabatic loss model for the flux-insertion protocol.
//!
//! During each transfer stage an atom at radius `x` (in waist units) sees a
//! three-state chain `cavity_src -- g -- excited_1 -- omega_fall -- spin --
//! omega_rise -- excited_2 -- g -- cavity_tgt` whose two excited states decay
//! at rate `gamma`. Population that follows the instantaneous dark state of
//! the chain survives; non-adiabatic coupling into the damped bright states
//! leaks. This module provides
//!
//! * the dark-state [`mixing_angles`] along the pulse pair,
//! * the survival probability three ways: [`survival_closed_form`], the
//!   mixing-angle quadrature [`survival_integral_numeric`], and the
//!   brute-force five-state oracle [`five_level_evolve`],
//! * the cloud-averaged initial dark-state overlap [`dark_overlap_pin`],
//! * the radially averaged fidelity [`flux_insertion_fidelity`] of one full
//!   insertion cycle, `F = p * p_in`.
//!
//! Everything works in the dimensionless groups `OmegaT`, `gT`, `gammaT`
//! (peak frequencies times the sweep duration) and in pulse-centered time
//! `tau = t / T`, with the sigmoid crossing at `tau = 0`. Both optical fields
//! are taken on resonance, which is the worst case for the losses.

use num_complex::Complex64;

use crate::couplings::kappa;
use crate::ode::{self, OdeOptions};
use crate::quad::{adaptive_quadrature, radial_quadrature, QuadratureConfig};
use crate::stirap::StepKind;
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Half-width of the pulse-centered window for the mixing-angle quadrature.
/// The loss integrand needs both a finite rotation rate and a finite bright
/// admixture, so it decays at least like `exp(-|tau|)` in every parameter
/// regime; at `|tau| = 40` it is below double precision.
const ANGLE_WINDOW: f64 = 40.0;

/// Half-width of the window integrated by the five-level oracle. Shorter than
/// the quadrature window because strong damping makes every unit of `tau`
/// expensive for an explicit stepper; the pulse tails beyond `|tau| = 12`
/// move the survival only at the 1e-5 level.
const ODE_WINDOW: f64 = 12.0;

/// Radial atomic density profile, up to normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityProfile {
    /// `n(x) = exp(-x^2 / xi^2)` with `xi` the cloud radius in waist units.
    Gaussian,
}

impl DensityProfile {
    /// Density at radius `x` (waist units) for cloud radius `xi`.
    pub fn value(&self, x: f64, xi: f64) -> f64 {
        match self {
            DensityProfile::Gaussian => (-x * x / (xi * xi)).exp(),
        }
    }
}

/// Dimensionless parameter set for the loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    /// Peak Rabi frequency times sweep duration, `OmegaT`.
    pub omega_t: f64,
    /// Cavity coupling times sweep duration, `gT`.
    pub g_t: f64,
    /// Excited-state decay rate times sweep duration, `gammaT`.
    pub gamma_t: f64,
    /// Hard-core cutoff of the flux-inserting profile, in waist units.
    pub a: f64,
    /// Cloud radius in waist units.
    pub xi: f64,
    /// Radial density profile (weights all cloud averages).
    pub density: DensityProfile,
}

impl LossParams {
    /// Checks the positivity requirements. `omega_t` and `gamma_t` may be
    /// zero (the undriven and lossless limits are meaningful); the coupling,
    /// the cutoff and the cloud radius must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_t >= 0.0) {
            return Err(Error::InvalidInput("peak Rabi frequency must be nonnegative"));
        }
        if !(self.g_t > 0.0) {
            return Err(Error::InvalidInput("cavity coupling must be positive"));
        }
        if !(self.gamma_t >= 0.0) {
            return Err(Error::InvalidInput("decay rate must be nonnegative"));
        }
        if !(self.a > 0.0) {
            return Err(Error::InvalidInput("profile cutoff must be positive"));
        }
        if !(self.xi > 0.0) {
            return Err(Error::InvalidInput("cloud radius must be positive"));
        }
        Ok(())
    }
}

/// Canonical sigmoid arms in pulse-centered time: the falling arm starts at
/// full strength, the rising arm ends there, they cross at `tau = 0`, and
/// their squares sum to one.
fn sigmoid_arms(tau: f64) -> (f64, f64) {
    (1.0 / (1.0 + tau.exp()).sqrt(), 1.0 / (1.0 + (-tau).exp()).sqrt())
}

/// Peak amplitudes `(c_fall, c_rise)` seen by an atom at radius `x`. The arm
/// driving the flux-inserting transition carries a transverse profile: during
/// step one that is the falling arm, weighted by the vortex profile
/// `kappa(x)`; during step two it is the rising arm, weighted by `x^2`.
fn arm_peaks(step: StepKind, x: f64, params: &LossParams) -> (f64, f64) {
    match step {
        StepKind::One => (params.omega_t * kappa(x, params.a), params.omega_t),
        StepKind::Two => (params.omega_t, params.omega_t * x * x),
    }
}

/// Rabi amplitudes `(omega_fall, omega_rise)` at pulse-centered time `tau`.
fn pulse_pair(step: StepKind, x: f64, tau: f64, params: &LossParams) -> (f64, f64) {
    let (c_fall, c_rise) = arm_peaks(step, x, params);
    let (fall, rise) = sigmoid_arms(tau);
    (c_fall * fall, c_rise * rise)
}

/// Instantaneous dark-state mixing angles of the five-state chain.
///
/// `phi` rotates between the two cavity modes, `tan(phi) =
/// omega_rise / omega_fall`; `theta` rotates between the cavity pair and the
/// collective spin excitation, `tan(theta) = sqrt(omega_fall^2 +
/// omega_rise^2) / g`. Both angles lie in `[0, pi/2]` for nonnegative
/// amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngles {
    pub phi: f64,
    pub theta: f64,
    pub step: StepKind,
}

/// Mixing angles for an atom at radius `x` and pulse-centered time `tau`.
/// Zero amplitudes are handled atan2-style: an undriven chain has
/// `phi = theta = 0` (pure cavity-photon dark state).
pub fn mixing_angles(step: StepKind, x: f64, tau: f64, params: &LossParams) -> MixingAngles {
    let (w_fall, w_rise) = pulse_pair(step, x, tau, params);
    let s = w_fall.hypot(w_rise);
    MixingAngles { phi: w_rise.atan2(w_fall), theta: s.atan2(params.g_t), step }
}

/// Exact time derivatives `(dphi/dtau, dtheta/dtau)` of the mixing angles.
///
/// With `F = 1/sqrt(1 + e^tau)` and `R = 1/sqrt(1 + e^-tau)` the arms obey
/// `F' = -F R^2 / 2`, `R' = R F^2 / 2` and `F^2 + R^2 = 1`, which collapses
/// the quotient-rule derivatives of the angle definitions to
///
/// `phi'   = omega_fall * omega_rise / (2 S^2)`
/// `theta' = g F^2 R^2 (c_rise^2 - c_fall^2) / (2 S (g^2 + S^2))`
///
/// with `S^2 = omega_fall^2 + omega_rise^2`.
fn mixing_angle_rates(step: StepKind, x: f64, tau: f64, params: &LossParams) -> (f64, f64) {
    let (c_fall, c_rise) = arm_peaks(step, x, params);
    let (fall, rise) = sigmoid_arms(tau);
    let w_fall = c_fall * fall;
    let w_rise = c_rise * rise;
    let s2 = w_fall * w_fall + w_rise * w_rise;
    if s2 == 0.0 {
        return (0.0, 0.0);
    }
    let g = params.g_t;
    let dphi = 0.5 * w_fall * w_rise / s2;
    let dtheta = 0.5 * g * fall * fall * rise * rise * (c_rise * c_rise - c_fall * c_fall)
        / (s2.sqrt() * (g * g + s2));
    (dphi, dtheta)
}

/// Transverse profile of the flux-inserting arm for each step.
fn step_profile(step: StepKind, x: f64, a: f64) -> f64 {
    match step {
        StepKind::One => kappa(x, a),
        StepKind::Two => x * x,
    }
}

/// Closed-form survival probability of an atom at radius `x` through one
/// sigmoid crossing:
///
/// `e(x) = exp{ -(gammaT/4) [ 2/gT^2 - 1/(gT^2 + OmegaT^2)
///                            - 1/(gT^2 + f^2 OmegaT^2) ] }`
///
/// where `f` is the transverse profile of the flux-inserting arm
/// (`kappa(x)` for step one, `x^2` for step two). This is the symbolic
/// evaluation of the mixing-angle integral in [`survival_integral_numeric`];
/// the two agree to quadrature accuracy.
pub fn survival_closed_form(x: f64, params: &LossParams, step: StepKind) -> f64 {
    let f = step_profile(step, x, params.a);
    let g2 = params.g_t * params.g_t;
    let w2 = params.omega_t * params.omega_t;
    let exponent =
        0.25 * params.gamma_t * (2.0 / g2 - 1.0 / (g2 + w2) - 1.0 / (g2 + f * f * w2));
    (-exponent).exp()
}

/// Survival probability by direct quadrature of the mixing-angle integral
///
/// `exp{ -(2 gammaT / gT^2) Int[ phi'^2 sin^2(theta) + theta'^2 cos^2(theta) ] dtau }`.
///
/// Kept as an independent numerical check on [`survival_closed_form`].
pub fn survival_integral_numeric(x: f64, params: &LossParams, step: StepKind) -> Result<f64> {
    params.validate()?;
    let integrand = |tau: f64| {
        let angles = mixing_angles(step, x, tau, params);
        let (dphi, dtheta) = mixing_angle_rates(step, x, tau, params);
        let (sin_t, cos_t) = angles.theta.sin_cos();
        dphi * dphi * sin_t * sin_t + dtheta * dtheta * cos_t * cos_t
    };
    let (integral, _) = adaptive_quadrature(
        integrand,
        -ANGLE_WINDOW,
        ANGLE_WINDOW,
        &QuadratureConfig::default(),
    )?;
    let g2 = params.g_t * params.g_t;
    Ok((-2.0 * params.gamma_t / g2 * integral).exp())
}

/// Instantaneous dark state of the five-state chain in the basis
/// `[excited_1, spin, excited_2, cavity_src, cavity_tgt]`. It carries no
/// excited-state weight, so it is an exact null vector of the chain
/// Hamiltonian, damping included.
fn dark_vector(angles: &MixingAngles) -> [Complex64; 5] {
    let (sin_p, cos_p) = angles.phi.sin_cos();
    let (sin_t, cos_t) = angles.theta.sin_cos();
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(-cos_t, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(cos_p * sin_t, 0.0),
        Complex64::new(sin_p * sin_t, 0.0),
    ]
}

/// Right-hand side `db/dtau = -i H(tau) b` of the five-state chain with
/// non-Hermitian damping `-i gamma` on the two excited states.
fn chain_rhs(
    step: StepKind,
    x: f64,
    params: &LossParams,
    tau: f64,
    b: &[Complex64],
    dbdt: &mut [Complex64],
) {
    let (w_fall, w_rise) = pulse_pair(step, x, tau, params);
    let g = params.g_t;
    let gamma = params.gamma_t;
    let mi = Complex64::new(0.0, -1.0);
    dbdt[0] = -gamma * b[0] + mi * (w_fall * b[1] + g * b[3]);
    dbdt[1] = mi * (w_fall * b[0] + w_rise * b[2]);
    dbdt[2] = -gamma * b[2] + mi * (w_rise * b[1] + g * b[4]);
    dbdt[3] = mi * (g * b[0]);
    dbdt[4] = mi * (g * b[2]);
}

/// Brute-force survival oracle: integrates the five-state chain from the
/// instantaneous dark state at the opening edge of the pulse window and
/// returns the population remaining in the instantaneous dark state at the
/// closing edge.
pub fn five_level_evolve(x: f64, params: &LossParams, step: StepKind) -> Result<f64> {
    params.validate()?;
    let mut y = dark_vector(&mixing_angles(step, x, -ODE_WINDOW, params));
    ode::integrate(
        |tau, b, dbdt| chain_rhs(step, x, params, tau, b, dbdt),
        -ODE_WINDOW,
        ODE_WINDOW,
        &mut y,
        &OdeOptions::default(),
    )?;
    let d = dark_vector(&mixing_angles(step, x, ODE_WINDOW, params));
    let overlap: Complex64 = d.iter().zip(y.iter()).map(|(di, yi)| di.conj() * yi).sum();
    Ok(overlap.norm_sqr())
}

/// Cloud-averaged overlap of the initial photonic state with the dark state
/// at the moment the flux-inserting arm opens step one:
///
/// `p_in = (1/N) Int[ n(x) OmegaT^2 kappa^2(x) / (gT^2 + OmegaT^2 kappa^2(x)) ] x dx`
///
/// with `N = Int[ n(x) ] x dx`. Atoms outside the overlap start in the bright
/// manifold and are not transferred.
pub fn dark_overlap_pin(params: &LossParams) -> Result<f64> {
    params.validate()?;
    let g2 = params.g_t * params.g_t;
    let config = QuadratureConfig::default();
    let (num, _) = radial_quadrature(
        |x| {
            let wk = params.omega_t * kappa(x, params.a);
            x * params.density.value(x, params.xi) * wk * wk / (g2 + wk * wk)
        },
        &config,
    )?;
    let (den, _) = radial_quadrature(|x| x * params.density.value(x, params.xi), &config)?;
    Ok(num / den)
}

/// The factors of the insertion fidelity at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityBreakdown {
    /// Cloud-averaged survival through both sweeps, `p`.
    pub survival: f64,
    /// Cloud-averaged initial dark-state overlap, `p_in`.
    pub dark_overlap: f64,
    /// Product `F = p * p_in`.
    pub fidelity: f64,
}

/// Fidelity of one full flux-insertion cycle, split into its factors: the
/// cloud average `p` of the closed-form survival through both steps and the
/// initial dark-state overlap `p_in`, with `F = p * p_in`.
pub fn fidelity_breakdown(params: &LossParams) -> Result<FidelityBreakdown> {
    params.validate()?;
    let config = QuadratureConfig::default();
    let (num, _) = radial_quadrature(
        |x| {
            x * params.density.value(x, params.xi)
                * survival_closed_form(x, params, StepKind::One)
                * survival_closed_form(x, params, StepKind::Two)
        },
        &config,
    )?;
    let (den, _) = radial_quadrature(|x| x * params.density.value(x, params.xi), &config)?;
    let survival = num / den;
    let dark_overlap = dark_overlap_pin(params)?;
    Ok(FidelityBreakdown { survival, dark_overlap, fidelity: survival * dark_overlap })
}

/// Radially averaged fidelity `F = p * p_in` of one full insertion cycle.
pub fn flux_insertion_fidelity(params: &LossParams) -> Result<f64> {
    Ok(fidelity_breakdown(params)?.fidelity)
}
