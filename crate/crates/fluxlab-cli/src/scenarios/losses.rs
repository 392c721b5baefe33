//! Loss-surface scenario: evaluates the insertion fidelity and its factors
//! over a drive/coupling grid. Grid points are independent, so they are
//! evaluated in parallel; the output order is fixed by the grid, not by
//! completion order.

use fluxlab_core::losses::{fidelity_breakdown, DensityProfile, LossParams};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{CliError, LoadedConfig};
use crate::output::{fmt_float, RunOutput};
use crate::scenarios::linspace;

pub fn run(cfg: &LoadedConfig, out: &mut RunOutput) -> Result<(), CliError> {
    let gamma_t = cfg.num("gamma_t", 100.0);
    let a = cfg.num("a", 0.005);
    let xi = cfg.num("xi", 0.25);
    let (o_min, o_max, o_count) = cfg.grid("omega_t_grid", (10.0, 100.0, 10));
    let (g_min, g_max, g_count) = cfg.grid("g_t_grid", (1.0, 50.0, 50));

    let omega_axis = linspace(o_min, o_max, o_count);
    let g_axis = linspace(g_min, g_max, g_count);
    let points: Vec<(f64, f64)> = omega_axis
        .iter()
        .flat_map(|&w| g_axis.iter().map(move |&gt| (w, gt)))
        .collect();

    let breakdowns = points
        .par_iter()
        .map(|&(omega_t, g_t)| {
            let params = LossParams {
                omega_t,
                g_t,
                gamma_t,
                a,
                xi,
                density: DensityProfile::Gaussian,
            };
            fidelity_breakdown(&params).map_err(|e| e.to_string())
        })
        .collect::<Vec<_>>();

    let mut rows = Vec::with_capacity(points.len());
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut bounds_ok = true;
    for (&(omega_t, g_t), b) in points.iter().zip(&breakdowns) {
        let b = b.as_ref().map_err(|e| CliError::Numeric(e.clone()))?;
        if b.fidelity > best.0 {
            best = (b.fidelity, omega_t, g_t);
        }
        for v in [b.survival, b.dark_overlap, b.fidelity] {
            if !(0.0..=1.0).contains(&v) {
                bounds_ok = false;
            }
        }
        rows.push(vec![
            fmt_float(omega_t),
            fmt_float(g_t),
            fmt_float(b.survival),
            fmt_float(b.dark_overlap),
            fmt_float(b.fidelity),
        ]);
    }

    out.csv_table(
        "fidelity_surface.csv",
        &["omega_t", "g_t", "survival", "dark_overlap", "fidelity"],
        rows,
    )?;

    out.json_doc(
        "summary.json",
        &json!({
            "grid_points": points.len(),
            "max_fidelity": best.0,
            "argmax": { "omega_t": best.1, "g_t": best.2 },
            "all_in_unit_interval": bounds_ok,
        }),
    )
}
