//! One module per scenario. Each runner pulls its typed parameters from the
//! resolved config, drives the numerical core, and emits its tables and
//! summary through the shared output writer.

mod couplings;
mod fqh_report;
mod grow;
mod losses;
mod stirap;

use crate::config::{CliError, LoadedConfig, Scenario};
use crate::output::RunOutput;

pub fn run(cfg: &LoadedConfig, out: &mut RunOutput) -> Result<(), CliError> {
    match cfg.scenario {
        Scenario::Couplings => couplings::run(cfg, out),
        Scenario::Stirap => stirap::run(cfg, out),
        Scenario::Losses => losses::run(cfg, out),
        Scenario::FqhReport => fqh_report::run(cfg, out),
        Scenario::Grow => grow::run(cfg, out),
    }
}

/// Inclusive linear grid; a single-point axis sits at `min`.
pub(crate) fn linspace(min: f64, max: f64, count: u64) -> Vec<f64> {
    if count <= 1 {
        return vec![min];
    }
    (0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::linspace;

    #[test]
    fn linspace_hits_both_endpoints() {
        let grid = linspace(1.0, 50.0, 50);
        assert_eq!(grid.len(), 50);
        assert_eq!(grid[0], 1.0);
        assert_eq!(grid[49], 50.0);
        let single = linspace(3.0, 9.0, 1);
        assert_eq!(single, vec![3.0]);
    }
}
