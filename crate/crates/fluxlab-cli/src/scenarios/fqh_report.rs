//! Spectral report scenario: per photon number, the model ground-state
//! momentum, sector dimensions, zero-energy count, gap, pump overlap and
//! quasi-hole momenta, plus the full ground-state expansions as a table.

use fluxlab_core::fqh::{
    laughlin_state, many_body_gap, pump_overlap, quasihole_state, zero_energy_subspace,
    default_mode_list, FockBasis, FockState, InteractionParams,
};
use serde_json::json;

use crate::config::{CliError, LoadedConfig};
use crate::output::{fmt_float, RunOutput};

fn occupation_label(state: &FockState) -> String {
    let parts: Vec<String> = state.iter().map(|(l, c)| format!("{l}:{c}")).collect();
    if parts.is_empty() {
        "vacuum".to_string()
    } else {
        parts.join(" ")
    }
}

pub fn run(cfg: &LoadedConfig, out: &mut RunOutput) -> Result<(), CliError> {
    let max_photons = cfg.int("max_photons", 3).min(5) as u32;
    let params = InteractionParams {
        c6: cfg.num("c6", 8.0 / 3.0),
        a_b: cfg.num("a_b", 1.0),
        l_b: cfg.num("l_b", 1.0),
    };
    params.validate().map_err(CliError::numeric)?;

    let mut sections = Vec::new();
    let mut amplitude_rows: Vec<Vec<String>> = Vec::new();
    for n in 1..=max_photons {
        let momentum = 3 * n * (n - 1);
        let modes = default_mode_list(n);
        let basis = FockBasis::sector(&modes, n, momentum).map_err(CliError::numeric)?;
        let zero_modes = zero_energy_subspace(&basis, &params).map_err(CliError::numeric)?;
        let gap = many_body_gap(n, momentum, &params).map_err(CliError::numeric)?;
        let ground = laughlin_state(n).map_err(CliError::numeric)?;
        for (state, amp) in &ground {
            amplitude_rows.push(vec![
                n.to_string(),
                occupation_label(state),
                fmt_float(*amp),
            ]);
        }
        let quasihole_momenta: Vec<u32> = [1u32, 2]
            .iter()
            .map(|&m| {
                quasihole_state(n, m).map(|qh| {
                    qh.keys()
                        .next()
                        .map(|s| s.angular_momentum())
                        .unwrap_or(0)
                })
            })
            .collect::<Result<_, _>>()
            .map_err(CliError::numeric)?;
        let pump = pump_overlap(n - 1).map_err(CliError::numeric)?;
        sections.push(json!({
            "photons": n,
            "ground_state_momentum": momentum,
            "sector_dimension": basis.len(),
            "zero_energy_dimension": zero_modes.len(),
            "gap_over_v0": gap.map(|g| g / params.v0()),
            "pump_overlap_into": pump,
            "quasihole_momenta": quasihole_momenta,
            "expansion_terms": ground.len(),
        }));
    }

    out.csv_table(
        "amplitudes.csv",
        &["photons", "occupations", "amplitude"],
        amplitude_rows,
    )?;

    out.json_doc(
        "report.json",
        &json!({
            "v0": params.v0(),
            "hard_core_regime": params.hard_core_regime(),
            "max_photons": max_photons,
            "sectors": sections,
        }),
    )
}
