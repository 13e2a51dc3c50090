use std::fmt;

use rayon::prelude::*;

use super::config::{ModeSelection, NoiseSetting, RunConfig};
use super::sweep::run_sweep_with;
use crate::error::{Error, Result};
use crate::protocols::{helstrom_bound, oracle_min_error_search, oracle_usd_failure_search, ProtocolKind, StatePair};
use crate::readout::{
    calibrate, pooled_conclusive_error, CalibrationOptions, CalibrationReport, Mode, NoiseProfile, ProtocolFit,
    ProtocolTarget, SweepRow, Table1Targets,
};

pub const TABLE1_PROTOCOLS: [ProtocolKind; 3] =
    [ProtocolKind::SusdRandomized, ProtocolKind::Idp, ProtocolKind::Helstrom];

/// Grid summary of Monte Carlo rows, with the same definitions the
/// calibration objective uses.
pub fn summarize_rows(kind: ProtocolKind, rows: &[SweepRow]) -> Option<ProtocolFit> {
    let mut mine: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.protocol == kind && r.mode == Mode::MonteCarlo)
        .collect();
    if mine.is_empty() {
        return None;
    }
    mine.sort_by(|a, b| a.overlap.total_cmp(&b.overlap));
    let n = mine.len() as f64;
    let mean = |f: fn(&SweepRow) -> f64| mine.iter().map(|r| f(r)).sum::<f64>() / n;
    let error = if kind.is_unambiguous() {
        pooled_conclusive_error(mine.iter().map(|r| (r.p_corr, r.p_err)))
    } else {
        mine[0].conditional_error()
    };
    Some(ProtocolFit {
        kind,
        efficiency: mean(|r| r.efficiency),
        multi_positive: mean(|r| r.p_multipositive),
        error,
    })
}

#[derive(Clone, Debug)]
pub struct Table1Row {
    pub target: ProtocolTarget,
    pub dimension: usize,
    pub unambiguous: bool,
    pub simulated: ProtocolFit,
}

#[derive(Clone, Debug)]
pub struct Table1Report {
    pub noise: NoiseProfile,
    pub calibration: Option<CalibrationReport>,
    pub rows: Vec<Table1Row>,
    pub sweep: Vec<SweepRow>,
}

/// Monte Carlo sweep of SUSD, IDP and Helstrom under the configured noise,
/// summarized next to the published per-protocol numbers. Noise defaults
/// to the calibrated profile.
pub fn run_table1(config: &RunConfig) -> Result<Table1Report> {
    let config = RunConfig {
        protocols: TABLE1_PROTOCOLS.to_vec(),
        mode: ModeSelection::MonteCarlo,
        ..config.clone()
    };
    config.validate()?;
    let (noise, calibration) = config.noise_or(NoiseSetting::Calibrated).resolve(&config.overlaps())?;
    let sweep = run_sweep_with(&config, &noise)?;
    let targets = Table1Targets::default();
    let rows = targets
        .protocols
        .iter()
        .map(|t| Table1Row {
            target: *t,
            dimension: t.kind.dimension(),
            unambiguous: t.kind.is_unambiguous(),
            simulated: summarize_rows(t.kind, &sweep).expect("every table protocol was swept"),
        })
        .collect();
    Ok(Table1Report {
        noise,
        calibration,
        rows,
        sweep,
    })
}

impl fmt::Display for Table1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "noise profile:")?;
        write!(f, "{}", self.noise)?;
        if let Some(c) = &self.calibration {
            if !c.converged {
                writeln!(f, "warning: calibration did not converge")?;
            }
        }
        writeln!(f)?;
        writeln!(
            f,
            "{:<9} {:>2} {:>5} | {:>6} {:>8} | {:>6} {:>8} | {:>7} {:>8}",
            "protocol", "d", "unamb", "err%", "(target)", "eff%", "(target)", "multi%", "(target)"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<9} {:>2} {:>5} | {:>6.2} {:>8} | {:>6.1} {:>8.1} | {:>7.1} {:>8.1}",
                r.target.kind.name(),
                r.dimension,
                if r.unambiguous { "yes" } else { "no" },
                100.0 * r.simulated.error,
                r.target.error.to_string(),
                100.0 * r.simulated.efficiency,
                100.0 * r.target.efficiency,
                100.0 * r.simulated.multi_positive,
                100.0 * r.target.multi_positive,
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleRow {
    pub theta: f64,
    pub overlap: f64,
    pub helstrom_bound: f64,
    pub min_error_search: f64,
    pub usd_failure_search: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub resolution: usize,
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    pub fn max_min_error_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.min_error_search - r.helstrom_bound).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_usd_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.usd_failure_search - r.overlap).abs())
            .fold(0.0, f64::max)
    }
}

/// Brute-force searches over measurement bases at every grid point.
pub fn run_oracles(config: &RunConfig) -> Result<OracleReport> {
    if config.theta_grid.is_empty() {
        return Err(Error::Config("empty theta grid".into()));
    }
    let rows = config
        .theta_grid
        .par_iter()
        .map(|&theta| -> Result<OracleRow> {
            let pair = StatePair::equal(theta)?;
            Ok(OracleRow {
                theta: pair.theta(),
                overlap: pair.overlap(),
                helstrom_bound: helstrom_bound(&pair),
                min_error_search: oracle_min_error_search(&pair, config.resolution)?,
                usd_failure_search: oracle_usd_failure_search(&pair, config.resolution)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport {
        resolution: config.resolution,
        rows,
    })
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "resolution {}", self.resolution)?;
        writeln!(
            f,
            "{:>10} {:>8} {:>12} {:>12} {:>12} {:>12}",
            "theta", "overlap", "helstrom", "min-err grid", "cos(2theta)", "usd grid"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>10.6} {:>8.4} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
                r.theta, r.overlap, r.helstrom_bound, r.min_error_search, r.overlap, r.usd_failure_search
            )?;
        }
        writeln!(
            f,
            "max |min-error search - helstrom bound| = {:.3e}",
            self.max_min_error_deviation()
        )?;
        writeln!(
            f,
            "max |usd failure search - overlap|      = {:.3e}",
            self.max_usd_deviation()
        )
    }
}

/// Fit starting from the configured profile (the built-in guess unless
/// the config gives an explicit one), over the configured grid.
pub fn run_calibration(config: &RunConfig) -> Result<CalibrationReport> {
    let seed_guess = match &config.noise {
        Some(NoiseSetting::Explicit(p)) => p.clone(),
        _ => NoiseProfile::initial_guess(),
    };
    if config.theta_grid.is_empty() {
        return Err(Error::Config("empty theta grid".into()));
    }
    let options = CalibrationOptions {
        overlaps: config.overlaps(),
        ..CalibrationOptions::default()
    };
    calibrate(&seed_guess, &Table1Targets::default(), &options)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_table_is_perfect() {
        let config = RunConfig {
            theta_grid: vec![0.1, 0.4],
            shots: 5_000,
            seed: Some(1),
            noise: Some(NoiseSetting::Zero),
            ..RunConfig::default()
        };
        let report = run_table1(&config).unwrap();
        assert_eq!(report.rows.len(), 3);
        for r in &report.rows {
            assert_eq!(r.simulated.efficiency, 1.0);
            assert_eq!(r.simulated.multi_positive, 0.0);
            if r.unambiguous {
                assert_eq!(r.simulated.error, 0.0);
            }
        }
        assert_eq!(
            report.rows.iter().map(|r| r.dimension).collect::<Vec<_>>(),
            vec![2, 3, 2]
        );
        let text = report.to_string();
        assert!(text.contains("idp") && text.contains("90.2"));
    }

    #[test]
    fn table1_requires_seed() {
        assert!(run_table1(&RunConfig::default()).is_err());
    }

    #[test]
    fn oracle_report_on_small_grid() {
        let config = RunConfig {
            theta_grid: vec![0.0, 0.3, std::f64::consts::FRAC_PI_4],
            resolution: 128,
            ..RunConfig::default()
        };
        let report = run_oracles(&config).unwrap();
        assert!(report.max_min_error_deviation() < 1e-3);
        assert!(report.max_usd_deviation() < 1e-3);
        assert!(report.to_string().contains("resolution 128"));
        let bad = RunConfig {
            resolution: 8,
            ..config
        };
        assert!(run_oracles(&bad).is_err());
    }

    #[test]
    fn summary_uses_smallest_overlap_for_helstrom() {
        let mut config = RunConfig {
            theta_grid: vec![0.2, std::f64::consts::FRAC_PI_4],
            mode: ModeSelection::MonteCarlo,
            shots: 2_000,
            seed: Some(9),
            noise: Some(NoiseSetting::Default),
            protocols: vec![ProtocolKind::Helstrom],
            ..RunConfig::default()
        };
        let rows = super::super::sweep::run_sweep(&config).unwrap();
        let s = summarize_rows(ProtocolKind::Helstrom, &rows).unwrap();
        let at_zero = rows.iter().find(|r| r.overlap.abs() < 1e-12).unwrap();
        assert_eq!(s.error, at_zero.conditional_error());
        config.protocols = vec![ProtocolKind::Idp];
        assert!(summarize_rows(ProtocolKind::Idp, &rows).is_none());
    }
}
