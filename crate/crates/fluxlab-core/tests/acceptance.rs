//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`; failures carry the same line
//! in the panic message). Tolerances are pinned here and are not to be
//! loosened without revisiting the underlying analysis.

use std::collections::BTreeMap;
use std::time::Instant;

use fluxlab_core::couplings::{
    chi_analytic_a0, chi_numeric, chi_tilde_numeric, SpatialProfile,
};
use fluxlab_core::fqh::{
    default_mode_list, laughlin_state, project_onto_basis, pump_overlap, quasihole_state,
    total_angular_momentum, zero_energy_subspace, FockBasis, InteractionParams,
};
use fluxlab_core::growing::{
    fidelity_scaling, run_growing_protocol, ProtocolConfig,
};
use fluxlab_core::losses::{
    five_level_evolve, flux_insertion_fidelity, survival_closed_form, survival_integral_numeric,
    DensityProfile, LossParams,
};
use fluxlab_core::stirap::{
    run_flux_insertion, PulseSchedule, StepKind, StirapParams,
};

const TWO_PI: f64 = std::f64::consts::TAU;

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {criterion:02}: {verdict} ({detail})");
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_01_coupling_matches_analytic_limit() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = (0u32, 0u32, 0u32);
    for m in 0..=3u32 {
        for n in 0..=4u32 {
            for n_prime in 0..=4u32 {
                let numeric = chi_numeric(m, n, n_prime, 1e-6).unwrap();
                let analytic = chi_analytic_a0(m, n, n_prime);
                let dev = (numeric - analytic).abs();
                if dev > worst {
                    worst = dev;
                    worst_at = (m, n, n_prime);
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        worst <= 1e-5 && elapsed <= 10.0,
        &format!(
            "max |numeric - analytic| = {worst:.3e} at (m, n, n') = {worst_at:?}, \
             tol 1e-5; runtime {elapsed:.2} s of 10 s"
        ),
    );
}

#[test]
fn criterion_02_step_two_suppression() {
    let mut worst_suppressed = 0.0f64;
    let mut worst_pinned = 0.0f64;
    for m in 1..=3u32 {
        for n_prime in 1..=4u32 {
            let value = chi_tilde_numeric(m, 0, n_prime).unwrap().abs();
            worst_suppressed = worst_suppressed.max(value);
        }
        let value = chi_tilde_numeric(m, 0, 0).unwrap();
        let mut ratio = 1.0;
        for k in (3 * m - 1)..=(3 * m) {
            ratio *= k as f64;
        }
        let expected = 0.5 * ratio.sqrt();
        worst_pinned = worst_pinned.max((value - expected).abs());
    }
    report(
        2,
        worst_suppressed <= 1e-10 && worst_pinned <= 1e-10,
        &format!(
            "max suppressed element {worst_suppressed:.3e} (tol 1e-10), \
             max n'=0 deviation {worst_pinned:.3e} (tol 1e-10)"
        ),
    );
}

#[test]
fn criterion_03_residual_coupling_quadratic_scaling() {
    // Log-log fit of the leading forbidden element chi_0^{1,0}(a) over the
    // cutoff decade [1e-3, 1e-2]; the slope is asserted, the prefactor is
    // reported for reference only.
    let points: Vec<(f64, f64)> = (0..=10)
        .map(|i| {
            let a = 1e-3 * 10f64.powf(i as f64 / 10.0);
            (a, chi_numeric(0, 0, 1, a).unwrap().abs())
        })
        .collect();
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(a, v) in &points {
        let (x, y) = (a.ln(), v.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let prefactor = points[0].1 / points[0].0.powi(2);
    report(
        3,
        (slope - 2.0).abs() <= 0.1,
        &format!("slope {slope:.4} (target 2.0 +- 0.1); prefactor {prefactor:.4} (reported only)"),
    );
}

fn transfer_params(a: f64) -> (StirapParams, PulseSchedule, PulseSchedule) {
    let g = TWO_PI * 0.45;
    let mut map = BTreeMap::new();
    for l in [0u32, 1, 3] {
        map.insert(l, g);
    }
    let params = StirapParams {
        g: map,
        delta: TWO_PI * 0.13,
        gamma: 0.0,
        m_sector: 0,
        n_max: 5,
        a,
    };
    let s1 = PulseSchedule {
        omega_peak: TWO_PI * 12.4,
        t_char: 1.0,
        tau1: 6.0,
        step: StepKind::One,
        profile: SpatialProfile::KappaStep1 { a },
    };
    let s2 = PulseSchedule { step: StepKind::Two, profile: SpatialProfile::KappaTildeStep2, ..s1 };
    (params, s1, s2)
}

#[test]
fn criterion_04_reference_two_step_transfer() {
    let start = Instant::now();
    let (params, s1, s2) = transfer_params(0.01);
    let result = run_flux_insertion(&params, &s1, &s2, 1, 41).unwrap();
    let eff = &result.efficiencies[0];
    let elapsed = start.elapsed().as_secs_f64();
    report(
        4,
        eff.at_end >= 0.95 && eff.at_handoff > 0.95 && elapsed <= 60.0,
        &format!(
            "final l=3 population {:.4} (>= 0.95), l=1 population at handoff {:.4} (> 0.95); \
             runtime {elapsed:.1} s of 60 s",
            eff.at_end, eff.at_handoff
        ),
    );
}

#[test]
fn criterion_05_transfer_trends_in_drive_and_cutoff() {
    let omegas: Vec<f64> = [12.4, 15.0, 20.0, 25.0, 30.0, 40.0]
        .iter()
        .map(|f| TWO_PI * f)
        .collect();
    let cutoffs = [0.01, 0.015, 0.02];
    let mut table: Vec<Vec<f64>> = Vec::new();
    for &a in &cutoffs {
        let mut row = Vec::new();
        for &omega in &omegas {
            let (params, mut s1, mut s2) = transfer_params(a);
            s1.omega_peak = omega;
            s2.omega_peak = omega;
            let result = run_flux_insertion(&params, &s1, &s2, 1, 3).unwrap();
            row.push(result.efficiencies[0].at_handoff);
        }
        table.push(row);
    }

    let mut drive_ok = true;
    let mut drive_detail = String::new();
    for (row, &a) in table.iter().zip(&cutoffs) {
        for w in row.windows(2) {
            if w[1] + 1e-12 < w[0] {
                drive_ok = false;
            }
        }
        drive_detail.push_str(&format!(" a={a}: {row:.6?}"));
    }

    // Handoff transfer at the strongest drive, listed by increasing cutoff:
    // the claim under test is that it never increases with the cutoff.
    let at_max: Vec<f64> = table.iter().map(|row| *row.last().unwrap()).collect();
    let mut cutoff_ok = true;
    for w in at_max.windows(2) {
        if w[1] > w[0] + 1e-12 {
            cutoff_ok = false;
        }
    }

    // The cutoff clause is not satisfied by the lossless coherent model:
    // with gamma = 0 the forbidden-coupling admixture is O(a^4) ~ 1e-5 and
    // the residual nonadiabatic fringes, which dominate at O(1e-3), drift
    // slightly in the favorable direction as the cutoff grows. Degradation
    // with the cutoff is a dissipative effect and appears only with loss
    // included. The clause is asserted anyway; this failure is expected and
    // documented.
    report(
        5,
        drive_ok && cutoff_ok,
        &format!(
            "drive monotonicity {} [{}]; cutoff monotonicity {} at peak drive \
             (handoff transfer by cutoff {at_max:.6?})",
            if drive_ok { "holds" } else { "violated" },
            drive_detail.trim(),
            if cutoff_ok { "holds" } else { "violated" },
        ),
    );
}

#[test]
fn criterion_06_survival_formula_oracles() {
    let start = Instant::now();
    let base = LossParams {
        omega_t: 0.0,
        g_t: 1.0,
        gamma_t: 100.0,
        a: 0.005,
        xi: 0.25,
        density: DensityProfile::Gaussian,
    };
    let mut worst_quad = 0.0f64;
    let mut ode_failures = Vec::new();
    let mut worst_ode = 0.0f64;
    for &omega_t in &[20.0, 60.0, 100.0] {
        for &g_t in &[5.0, 20.0, 50.0] {
            for &x in &[0.0, 0.3, 1.0] {
                for step in [StepKind::One, StepKind::Two] {
                    let p = LossParams { omega_t, g_t, ..base };
                    let closed = survival_closed_form(x, &p, step);
                    let quad = survival_integral_numeric(x, &p, step).unwrap();
                    let ode = five_level_evolve(x, &p, step).unwrap();
                    let dq = (closed - quad).abs() / quad.abs().max(1e-300);
                    let de = (closed - ode).abs() / ode.abs().max(1e-300);
                    worst_quad = worst_quad.max(dq);
                    worst_ode = worst_ode.max(de);
                    if de > 0.05 {
                        ode_failures.push(format!(
                            "OmegaT={omega_t} gT={g_t} x={x} {step:?}: rel {de:.3}"
                        ));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    // The weak-coupling rows (gT = 5 at gammaT = 100) are beyond the
    // closed form's adiabatic-elimination regime (the dropped corrections
    // are order one there) and fail the 5% bound; the oracle and the
    // formula converge steadily at gT = 20 and 50. Asserted anyway; the
    // failure is expected and documented.
    report(
        6,
        worst_quad <= 1e-3 && ode_failures.is_empty() && elapsed <= 120.0,
        &format!(
            "max closed-vs-quadrature rel dev {worst_quad:.2e} (tol 1e-3); \
             max closed-vs-ODE rel dev {worst_ode:.3} (tol 0.05), {} point(s) over: {}; \
             runtime {elapsed:.1} s of 120 s",
            ode_failures.len(),
            if ode_failures.is_empty() { "none".to_string() } else { ode_failures.join("; ") },
        ),
    );
}

#[test]
fn criterion_07_fidelity_surface_bounds_and_interior_peak() {
    let base = LossParams {
        omega_t: 0.0,
        g_t: 1.0,
        gamma_t: 100.0,
        a: 0.005,
        xi: 0.25,
        density: DensityProfile::Gaussian,
    };
    let omega_grid: Vec<f64> = (1..=10).map(|i| 10.0 * i as f64).collect();
    let g_grid: Vec<f64> = (0..=49).map(|i| 1.0 + i as f64).collect();
    let mut bounds_ok = true;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for &omega_t in &omega_grid {
        for &g_t in &g_grid {
            let f = flux_insertion_fidelity(&LossParams { omega_t, g_t, ..base }).unwrap();
            if !(0.0..=1.0).contains(&f) {
                bounds_ok = false;
                worst = (omega_t, g_t, f);
            }
        }
    }

    let ridge: Vec<f64> = g_grid
        .iter()
        .map(|&g_t| flux_insertion_fidelity(&LossParams { omega_t: 60.0, g_t, ..base }).unwrap())
        .collect();
    let argmax = ridge
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let interior = argmax > 0 && argmax < g_grid.len() - 1;
    report(
        7,
        bounds_ok && interior,
        &format!(
            "bounds {}{}; ridge at OmegaT=60 peaks at gT={} with F={:.4} (interior: {})",
            if bounds_ok { "hold on the full grid" } else { "violated" },
            if bounds_ok {
                String::new()
            } else {
                format!(" (F={} at OmegaT={}, gT={})", worst.2, worst.0, worst.1)
            },
            g_grid[argmax],
            ridge[argmax],
            interior
        ),
    );
}

#[test]
fn criterion_08_unique_zero_energy_ground_states() {
    let start = Instant::now();
    let params = InteractionParams::unit_v0();
    let mut detail = String::new();
    let mut pass = true;
    for (photons, momentum) in [(2u32, 6u32), (3, 18)] {
        let basis =
            FockBasis::sector(&default_mode_list(photons), photons, momentum).unwrap();
        let null = zero_energy_subspace(&basis, &params).unwrap();
        let model = project_onto_basis(&laughlin_state(photons).unwrap(), &basis).unwrap();
        let overlap = if null.len() == 1 {
            null[0]
                .iter()
                .zip(model.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .abs()
        } else {
            0.0
        };
        if null.len() != 1 || overlap < 1.0 - 1e-10 {
            pass = false;
        }
        detail.push_str(&format!(
            "(N={photons}, L={momentum}): dim {} |overlap| {:.12}; ",
            null.len(),
            overlap
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        8,
        pass && elapsed <= 30.0,
        &format!("{detail}runtime {elapsed:.2} s of 30 s"),
    );
}

#[test]
fn criterion_09_pump_overlap_value() {
    let value = pump_overlap(1).unwrap();
    let expected = (10.0f64 / 11.0).sqrt();
    let dev = (value - expected).abs();
    report(
        9,
        dev <= 1e-9,
        &format!("pump_overlap(1) = {value:.12}, sqrt(10/11) = {expected:.12}, |dev| = {dev:.2e}"),
    );
}

#[test]
fn criterion_10_quasihole_angular_momentum() {
    let mut pass = true;
    let mut detail = String::new();
    for photons in 1..=3u32 {
        for m in 1..=2u32 {
            let state = quasihole_state(photons, m).unwrap();
            let expected = 3 * m * photons + 3 * photons * (photons - 1);
            let uniform = state
                .keys()
                .all(|s| s.angular_momentum() == expected);
            if !uniform {
                pass = false;
            }
            if m == 2 && expected != 3 * photons * (photons + 1) {
                pass = false;
            }
            detail.push_str(&format!("(N={photons}, m={m}): L={expected}; "));
        }
    }
    report(10, pass, &format!("{}all exact", detail));
}

#[test]
fn criterion_11_full_growing_protocol() {
    let start = Instant::now();
    let trace = run_growing_protocol(&ProtocolConfig::reference(3)).unwrap();
    let row = trace.rows.last().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let fidelity_ok = (row.p_laughlin3 - 0.97).abs() <= 0.03;
    let momentum_ok = (row.mean_momentum - 18.0).abs() <= 0.4;
    report(
        11,
        fidelity_ok && momentum_ok && elapsed <= 600.0,
        &format!(
            "final ground-state overlap^2 {:.4} (0.97 +- 0.03), mean L {:.3} (18 +- 0.4); \
             runtime {elapsed:.0} s of 600 s",
            row.p_laughlin3, row.mean_momentum
        ),
    );
}

#[test]
fn criterion_12_conservation_suite() {
    use fluxlab_core::fqh::{build_hint, photon_number_operator};

    let params = InteractionParams::unit_v0();
    let mut worst_commutator = 0.0f64;
    let mut psd_ok = true;
    let mut min_eig = f64::INFINITY;
    for (modes, cap) in [
        (vec![0u32, 3, 6, 9], 3u32),
        (vec![0, 1, 3, 4, 6, 7, 9], 2),
    ] {
        let basis = FockBasis::mixed(&modes, cap).unwrap();
        let hint = build_hint(&basis, &params).unwrap();
        let l_op = total_angular_momentum(&basis);
        let n_op = photon_number_operator(&basis);
        worst_commutator = worst_commutator
            .max(hint.commutator_max_entry(&l_op).unwrap())
            .max(hint.commutator_max_entry(&n_op).unwrap());
        let eig =
            fluxlab_core::linalg::symmetric_eigen(&hint.to_dense(), basis.len()).unwrap();
        min_eig = min_eig.min(eig.values[0]);
        if eig.values[0] < -1e-10 {
            psd_ok = false;
        }
    }

    // Norm conservation over a representative full evolution.
    let trace = run_growing_protocol(&ProtocolConfig::reference(2)).unwrap();
    let drift = trace.max_norm_drift;
    report(
        12,
        worst_commutator <= 1e-12 && psd_ok && drift <= 1e-8,
        &format!(
            "max commutator entry {worst_commutator:.2e} (tol 1e-12); \
             min interaction eigenvalue {min_eig:.2e} (PSD tol -1e-10); \
             norm drift {drift:.2e} over a two-photon run (tol 1e-8)"
        ),
    );
}

#[test]
fn criterion_13_fidelity_scaling_sanity() {
    let unit_ok = fidelity_scaling(3, 0.0, 7.0, 0.2, 0.0) == 1.0;

    let mut monotone_n = true;
    for n in 1..5u32 {
        if fidelity_scaling(n + 1, 1e-4, 50.0, 0.2, 0.3)
            >= fidelity_scaling(n, 1e-4, 50.0, 0.2, 0.3)
        {
            monotone_n = false;
        }
    }
    let mut monotone_gamma = true;
    for k in 1..5 {
        let lo = fidelity_scaling(2, k as f64 * 1e-4, 50.0, 0.2, 0.3);
        let hi = fidelity_scaling(2, (k + 1) as f64 * 1e-4, 50.0, 0.2, 0.3);
        if hi >= lo {
            monotone_gamma = false;
        }
    }

    let (n, gamma, delta, lambda) = (3u32, 1e-4, 0.2, 0.4);
    let tau_star =
        (4.0 * lambda * lambda / (gamma * (n as f64 + 1.0) * delta * delta)).powf(1.0 / 3.0);
    let mut lo = tau_star / 50.0;
    let mut hi = tau_star * 50.0;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if fidelity_scaling(n, gamma, m1, delta, lambda)
            < fidelity_scaling(n, gamma, m2, delta, lambda)
        {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let numeric = 0.5 * (lo + hi);
    let rel = ((numeric - tau_star) / tau_star).abs();
    report(
        13,
        unit_ok && monotone_n && monotone_gamma && rel <= 1e-6,
        &format!(
            "lossless value 1: {unit_ok}; decreasing in N: {monotone_n}; \
             decreasing in loss rate: {monotone_gamma}; \
             optimum tau {numeric:.4} vs stationarity {tau_star:.4} (rel dev {rel:.2e}, tol 1e-6)"
        ),
    );
}
