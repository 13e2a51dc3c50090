use std::io::Write;

use rayon::prelude::*;

use super::config::{NoiseSetting, RunConfig};
use crate::error::Result;
use crate::protocols::{Protocol, ProtocolKind, StatePair};
use crate::readout::{mix_seed, run_batch, Experiment, NoiseProfile, SweepRow};

pub const CSV_HEADER: &str = "protocol,mode,theta_rad,overlap,shots,p_corr,p_err,p_inconclusive,p_noresult,\
p_multipositive,efficiency,stderr_corr,stderr_err,stderr_inconclusive";

/// Seed of the (protocol, theta) cell; independent of which other cells run.
pub fn cell_seed(seed: u64, kind: ProtocolKind, theta: f64) -> u64 {
    mix_seed(mix_seed(seed, kind as u64), theta.to_bits())
}

/// One row per (protocol, theta, mode), sorted by protocol, then theta, then mode.
/// Noise defaults to none.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let (noise, _) = config.noise_or(NoiseSetting::Zero).resolve(&config.overlaps())?;
    run_sweep_with(config, &noise)
}

/// [`run_sweep`] with an already resolved noise profile.
pub fn run_sweep_with(config: &RunConfig, noise: &NoiseProfile) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let cells: Vec<(ProtocolKind, f64)> = config
        .protocols
        .iter()
        .flat_map(|&k| config.theta_grid.iter().map(move |&t| (k, t)))
        .collect();
    let per_cell: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(kind, theta)| -> Result<Vec<SweepRow>> {
            let protocol = Protocol::build(kind, StatePair::equal(theta)?)?;
            let mut rows = Vec::with_capacity(2);
            if config.mode.ideal() {
                rows.push(SweepRow::ideal(&protocol)?);
            }
            if config.mode.montecarlo() {
                let seed = config.seed.expect("validated");
                let exp = Experiment::new(protocol, noise.clone())?;
                rows.push(run_batch(&exp, config.shots, cell_seed(seed, kind, theta))?);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_cell.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.protocol
            .cmp(&b.protocol)
            .then(a.theta.total_cmp(&b.theta))
            .then(a.mode.cmp(&b.mode))
    });
    Ok(rows)
}

/// C-style `%.{sig}g`.
pub fn format_g(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g12(x: f64) -> String {
    format_g(x, 12)
}

pub fn csv_line(r: &SweepRow) -> String {
    [
        r.protocol.name().to_string(),
        r.mode.name().to_string(),
        g12(r.theta),
        g12(r.overlap),
        r.shots.to_string(),
        g12(r.p_corr),
        g12(r.p_err),
        g12(r.p_inconclusive),
        g12(r.p_noresult),
        g12(r.p_multipositive),
        g12(r.efficiency),
        g12(r.stderr_corr),
        g12(r.stderr_err),
        g12(r.stderr_inconclusive),
    ]
    .join(",")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", csv_line(r))?;
    }
    out.flush()
}
