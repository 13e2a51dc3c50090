//! `key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! protocols = susd, idp, helstrom
//! overlap_grid = 0, 0.25, 0.5, 0.75, 1
//! mode = both
//! shots = 100000
//! seed = 42
//! noise = explicit
//! noise.p_flip_per_probe = 0.03
//! noise.readout_order.idp = m0, m-1, m+1
//! ```

use std::path::PathBuf;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::protocols::{check_theta, theta_from_overlap, ProtocolKind};
use crate::qudit::Level;
use crate::readout::{calibrate, CalibrationOptions, CalibrationReport, NoiseProfile, Table1Targets};

pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_RESOLUTION: usize = 512;

/// Seventeen overlaps `0, 0.0625, ..., 1`, as angles.
pub fn default_theta_grid() -> Vec<f64> {
    (0..=16)
        .map(|k| theta_from_overlap(k as f64 * 0.0625).expect("overlap in range"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSelection {
    Ideal,
    MonteCarlo,
    Both,
}

impl ModeSelection {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "ideal" => Ok(ModeSelection::Ideal),
            "montecarlo" => Ok(ModeSelection::MonteCarlo),
            "both" => Ok(ModeSelection::Both),
            other => Err(Error::Config(format!(
                "unknown mode {other:?} (ideal, montecarlo, both)"
            ))),
        }
    }

    pub fn ideal(self) -> bool {
        matches!(self, ModeSelection::Ideal | ModeSelection::Both)
    }

    pub fn montecarlo(self) -> bool {
        matches!(self, ModeSelection::MonteCarlo | ModeSelection::Both)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSetting {
    Zero,
    /// The calibration starting point.
    Default,
    /// Fit to the published summary targets at run time.
    Calibrated,
    Explicit(NoiseProfile),
}

impl NoiseSetting {
    /// The profile to simulate with, plus the fit report for `Calibrated`.
    pub fn resolve(&self, overlaps: &[f64]) -> Result<(NoiseProfile, Option<CalibrationReport>)> {
        match self {
            NoiseSetting::Zero => Ok((NoiseProfile::zero(), None)),
            NoiseSetting::Default => Ok((NoiseProfile::initial_guess(), None)),
            NoiseSetting::Explicit(p) => {
                p.validate()?;
                Ok((p.clone(), None))
            }
            NoiseSetting::Calibrated => {
                let options = CalibrationOptions {
                    overlaps: overlaps.to_vec(),
                    ..CalibrationOptions::default()
                };
                let report = calibrate(&NoiseProfile::initial_guess(), &Table1Targets::default(), &options)?;
                Ok((report.profile.clone(), Some(report)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub protocols: Vec<ProtocolKind>,
    /// Angles in radians.
    pub theta_grid: Vec<f64>,
    pub shots: u64,
    pub mode: ModeSelection,
    /// `None` lets each command pick its own default.
    pub noise: Option<NoiseSetting>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Oracle grid resolution.
    pub resolution: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            protocols: vec![ProtocolKind::SusdRandomized, ProtocolKind::Idp, ProtocolKind::Helstrom],
            theta_grid: default_theta_grid(),
            shots: DEFAULT_SHOTS,
            mode: ModeSelection::Ideal,
            noise: None,
            seed: None,
            output_path: None,
            threads: None,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?} as a number")))
}

fn parse_int<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?} as a non-negative integer")))
}

/// `susd` is the randomized-basis variant.
pub fn parse_protocol(s: &str) -> Result<ProtocolKind> {
    ProtocolKind::parse(s).ok_or_else(|| Error::Config(format!("unknown protocol {s:?}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key {key}", n + 1)));
            }
            config
                .set(key, value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies one setting; used for both file lines and command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "protocols" => self.protocols = parse_list(value, parse_protocol)?,
            "theta_grid" => self.theta_grid = parse_list(value, |s| parse_f64(key, s))?,
            "overlap_grid" => {
                self.theta_grid = parse_list(value, |s| theta_from_overlap(parse_f64(key, s)?))?;
            }
            "shots" => self.shots = parse_int(key, value)?,
            "mode" => self.mode = ModeSelection::parse(value)?,
            "noise" => {
                self.noise = Some(match value {
                    "zero" => NoiseSetting::Zero,
                    "default" => NoiseSetting::Default,
                    "calibrated" => NoiseSetting::Calibrated,
                    "explicit" => match &self.noise {
                        Some(NoiseSetting::Explicit(p)) => NoiseSetting::Explicit(p.clone()),
                        _ => NoiseSetting::Explicit(NoiseProfile::initial_guess()),
                    },
                    other => {
                        return Err(Error::Config(format!(
                            "unknown noise {other:?} (zero, default, calibrated, explicit)"
                        )))
                    }
                })
            }
            "seed" => self.seed = Some(parse_int(key, value)?),
            "out" | "output_path" => self.output_path = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(parse_int(key, value)?),
            "resolution" => self.resolution = parse_int(key, value)?,
            _ => {
                let Some(param) = key.strip_prefix("noise.") else {
                    return Err(Error::Config(format!("unknown key {key}")));
                };
                // Any noise.* key switches to an explicit profile seeded from the defaults.
                let mut profile = match &self.noise {
                    Some(NoiseSetting::Explicit(p)) => p.clone(),
                    _ => NoiseProfile::initial_guess(),
                };
                if let Some(kind) = param.strip_prefix("readout_order.") {
                    let levels = parse_list(value, |s| {
                        Level::parse(s).ok_or_else(|| Error::Config(format!("unknown level {s:?}")))
                    })?;
                    let seq = SmallVec::from_vec(levels);
                    match kind {
                        "susd" => profile.readout_order.susd = seq,
                        "idp" => profile.readout_order.idp = seq,
                        "helstrom" => profile.readout_order.helstrom = seq,
                        _ => return Err(Error::Config(format!("unknown key {key}"))),
                    }
                } else {
                    profile.set_param(param, parse_f64(key, value)?)?;
                }
                self.noise = Some(NoiseSetting::Explicit(profile));
            }
        }
        Ok(())
    }

    pub fn noise_or(&self, fallback: NoiseSetting) -> NoiseSetting {
        self.noise.clone().unwrap_or(fallback)
    }

    pub fn overlaps(&self) -> Vec<f64> {
        self.theta_grid.iter().map(|t| (2.0 * t).cos()).collect()
    }

    /// Checks every invariant up front so no work starts on a bad config.
    pub fn validate(&self) -> Result<()> {
        if self.protocols.is_empty() {
            return Err(Error::Config("no protocols selected".into()));
        }
        if self.theta_grid.is_empty() {
            return Err(Error::Config("empty theta grid".into()));
        }
        for &t in &self.theta_grid {
            if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&t) {
                check_theta(t)?;
            }
        }
        if self.mode.montecarlo() {
            if self.shots == 0 {
                return Err(Error::Config("shots must be at least 1 in montecarlo mode".into()));
            }
            if self.seed.is_none() {
                return Err(Error::Config("montecarlo mode requires an explicit seed".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if let Some(NoiseSetting::Explicit(p)) = &self.noise {
            p.validate()?;
        }
        Ok(())
    }
}
