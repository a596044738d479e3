//! Rayon-backed replication and dataset construction. Work items are
//! seeded by index and reduced in index order, so results do not depend on
//! the thread count.

use paoi_core::calibration::{
    calibration_row_with, CalibrationDataset, CalibrationPoint, ReplicationSettings, Scenario,
};
use paoi_core::simulator::{run_replication, summarize, ReplicationConfig, ReplicationSummary};
use rayon::prelude::*;

/// Parallel counterpart of `paoi_core::simulator::replicate`; returns the
/// same summary bit for bit.
pub fn replicate_par(cfg: &ReplicationConfig) -> paoi_core::Result<ReplicationSummary> {
    cfg.validate()?;
    let outcomes = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_replication(cfg, r))
        .collect::<paoi_core::Result<Vec<_>>>()?;
    Ok(summarize(cfg, &outcomes))
}

/// Parallel counterpart of `paoi_core::calibration::build_calibration_dataset`.
pub fn build_dataset_par(
    points: &[CalibrationPoint],
    scenario: Scenario,
    settings: &ReplicationSettings,
) -> (CalibrationDataset, Vec<(usize, paoi_core::Error)>) {
    let rows: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| calibration_row_with(p, i, scenario, settings, replicate_par))
        .collect();
    let mut dataset = CalibrationDataset::default();
    let mut failures = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        match r {
            Ok(row) => dataset.rows.push(row),
            Err(e) => failures.push((i, e)),
        }
    }
    (dataset, failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use paoi_core::calibration::build_calibration_dataset;
    use paoi_core::simulator::{replicate, Sources};
    use paoi_core::stochastic::DistributionSpec;

    #[test]
    fn matches_sequential_replicate() {
        let cfg = ReplicationConfig {
            sources: Sources::Two,
            arrival: DistributionSpec::uniform_mean(3.0).unwrap(),
            service: DistributionSpec::exponential(1.0).unwrap(),
            n: 2000,
            replications: 7,
            warmup: 0.1,
            master_seed: 11,
        };
        assert_eq!(replicate_par(&cfg).unwrap(), replicate(&cfg).unwrap());
    }

    #[test]
    fn matches_sequential_dataset() {
        let points: Vec<_> = [0.3, 0.6, 1.2]
            .iter()
            .map(|&l| CalibrationPoint {
                arrival: DistributionSpec::exponential(l).unwrap(),
                service: DistributionSpec::exponential(1.0).unwrap(),
            })
            .collect();
        let settings = ReplicationSettings {
            n: 2000,
            replications: 4,
            warmup: 0.1,
            master_seed: 5,
        };
        let (par, par_fail) = build_dataset_par(&points, Scenario::SingleSource, &settings);
        let (seq, seq_fail) = build_calibration_dataset(&points, Scenario::SingleSource, &settings);
        assert_eq!(par, seq);
        assert_eq!(par.len(), 2);
        assert_eq!(par_fail, seq_fail);
        assert_eq!(par_fail[0].0, 2);
    }
}
