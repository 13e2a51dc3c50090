//! Monte Carlo model of the experiment: preparation, initialization failure,
//! the compiled pulses, and sequential single-shot level readout with false
//! positives, missed detections and spin flips between probes.
//!
//! A shot is decided by the first probe that fires. Probing continues after
//! that so that multi-positive shots can be counted.

mod calibrate;
mod exact;

pub use calibrate::{
    calibrate, evaluate_profile, pooled_conclusive_error, CalibrationOptions, CalibrationReport, ErrorTarget,
    ProtocolFit, ProtocolTarget, Table1Targets, TargetWeights,
};
pub use exact::{exact_rates, exact_rates_with, Rates};

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::protocols::{ideal_stats, Prepared, Protocol, ProtocolKind, StatePair};
use crate::pulse::{compile_protocol, PulseSchedule};
use crate::qudit::{Level, Outcome, StateVector};

/// Levels probed, in order, for one protocol family.
pub type ReadoutSequence = SmallVec<[Level; 3]>;

#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutOrder {
    pub susd: ReadoutSequence,
    pub idp: ReadoutSequence,
    pub helstrom: ReadoutSequence,
}

impl ReadoutOrder {
    pub fn for_kind(&self, kind: ProtocolKind) -> &[Level] {
        match kind {
            ProtocolKind::SusdA | ProtocolKind::SusdB | ProtocolKind::SusdRandomized => &self.susd,
            ProtocolKind::Idp => &self.idp,
            ProtocolKind::Helstrom => &self.helstrom,
        }
    }
}

impl Default for ReadoutOrder {
    fn default() -> Self {
        use Level::*;
        ReadoutOrder {
            susd: SmallVec::from_slice(&[MPlus1, MMinus1]),
            idp: SmallVec::from_slice(&[M0, MMinus1, MPlus1]),
            helstrom: SmallVec::from_slice(&[MPlus1, MMinus1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseProfile {
    /// The whole pulse sequence, preparation included, acts as the identity.
    pub p_init_fail: f64,
    pub p_true_positive: f64,
    /// Probe of a level with `|dm| = 1` from the occupied one.
    pub p_false_positive_neighbor: f64,
    /// Probe of `m+1` while in `m-1` or vice versa.
    pub p_false_positive_far: f64,
    /// Chance per probe that the spin hops to a uniformly chosen adjacent level.
    pub p_flip_per_probe: f64,
    pub readout_order: ReadoutOrder,
}

pub const PARAM_NAMES: [&str; 5] = [
    "p_init_fail",
    "p_true_positive",
    "p_false_positive_neighbor",
    "p_false_positive_far",
    "p_flip_per_probe",
];

impl NoiseProfile {
    /// Perfect readout.
    pub fn zero() -> Self {
        NoiseProfile {
            p_init_fail: 0.0,
            p_true_positive: 1.0,
            p_false_positive_neighbor: 0.0,
            p_false_positive_far: 0.0,
            p_flip_per_probe: 0.0,
            readout_order: ReadoutOrder::default(),
        }
    }

    /// Starting point for [`calibrate`].
    pub fn initial_guess() -> Self {
        NoiseProfile {
            p_init_fail: 0.06,
            p_true_positive: 0.92,
            p_false_positive_neighbor: 0.03,
            p_false_positive_far: 0.003,
            p_flip_per_probe: 0.02,
            readout_order: ReadoutOrder::default(),
        }
    }

    /// Parameters in [`PARAM_NAMES`] order.
    pub fn params(&self) -> [f64; 5] {
        [
            self.p_init_fail,
            self.p_true_positive,
            self.p_false_positive_neighbor,
            self.p_false_positive_far,
            self.p_flip_per_probe,
        ]
    }

    pub fn with_params(&self, p: [f64; 5]) -> Self {
        NoiseProfile {
            p_init_fail: p[0],
            p_true_positive: p[1],
            p_false_positive_neighbor: p[2],
            p_false_positive_far: p[3],
            p_flip_per_probe: p[4],
            readout_order: self.readout_order.clone(),
        }
    }

    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let idx = PARAM_NAMES
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::InvalidNoise(format!("unknown parameter {name}")))?;
        let mut p = self.params();
        p[idx] = value;
        *self = self.with_params(p);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in PARAM_NAMES.iter().zip(self.params()) {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidNoise(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.p_false_positive_far > self.p_false_positive_neighbor {
            return Err(Error::InvalidNoise(
                "p_false_positive_far must not exceed p_false_positive_neighbor".into(),
            ));
        }
        if self.p_false_positive_neighbor > self.p_true_positive {
            return Err(Error::InvalidNoise(
                "p_false_positive_neighbor must not exceed p_true_positive".into(),
            ));
        }
        for seq in [
            &self.readout_order.susd,
            &self.readout_order.idp,
            &self.readout_order.helstrom,
        ] {
            if seq.is_empty() {
                return Err(Error::InvalidNoise("empty readout order".into()));
            }
            for (i, l) in seq.iter().enumerate() {
                if seq[..i].contains(l) {
                    return Err(Error::InvalidNoise(format!("level {l} probed twice")));
                }
            }
        }
        Ok(())
    }

    /// Firing probability of a probe of `probe` while the spin sits in `occupied`.
    pub fn fire_probability(&self, probe: Level, occupied: Level) -> f64 {
        if probe == occupied {
            self.p_true_positive
        } else if probe.is_adjacent(occupied) {
            self.p_false_positive_neighbor
        } else {
            self.p_false_positive_far
        }
    }
}

impl fmt::Display for NoiseProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, p) in PARAM_NAMES.iter().zip(self.params()) {
            writeln!(f, "{name} = {p:.6}")?;
        }
        Ok(())
    }
}

/// A protocol bound to its compiled schedules and a noise profile, with the
/// post-pulse level populations precomputed per branch and prepared state.
#[derive(Clone, Debug)]
pub struct Experiment {
    protocol: Protocol,
    schedules: Vec<PulseSchedule>,
    noise: NoiseProfile,
    // [branch][prepared A/B] -> populations over levels
    populations: Vec<[[f64; 3]; 2]>,
}

const PREPARED: [Prepared; 2] = [Prepared::A, Prepared::B];

impl Experiment {
    pub fn new(protocol: Protocol, noise: NoiseProfile) -> Result<Self> {
        let schedules = compile_protocol(&protocol)?;
        Experiment::with_schedules(protocol, schedules, noise)
    }

    /// Binds explicit schedules; each must implement its branch's unitary.
    pub fn with_schedules(protocol: Protocol, schedules: Vec<PulseSchedule>, noise: NoiseProfile) -> Result<Self> {
        noise.validate()?;
        if schedules.len() != protocol.branches().len() {
            return Err(Error::Config(format!(
                "{} schedules for {} branches",
                schedules.len(),
                protocol.branches().len()
            )));
        }
        let mut populations = Vec::with_capacity(schedules.len());
        for (schedule, branch) in schedules.iter().zip(protocol.branches()) {
            let u = schedule.full_product();
            let d = u.distance_up_to_phase(branch.unitary());
            if d > crate::pulse::SCHEDULE_TOL {
                return Err(Error::Config(format!(
                    "schedule does not match the protocol unitary ({d:e})"
                )));
            }
            let mut pops = [[0.0; 3]; 2];
            for (k, which) in PREPARED.into_iter().enumerate() {
                let psi = protocol.pair().state(which).embed();
                let out = StateVector::new(&u.apply(&psi)?)?;
                pops[k] = out.populations();
            }
            populations.push(pops);
        }
        Ok(Experiment {
            protocol,
            schedules,
            noise,
            populations,
        })
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn schedules(&self) -> &[PulseSchedule] {
        &self.schedules
    }

    pub fn noise(&self) -> &NoiseProfile {
        &self.noise
    }

    pub fn readout_order(&self) -> &[Level] {
        self.noise.readout_order.for_kind(self.protocol.kind())
    }

    pub(crate) fn populations(&self, branch: usize, prepared: Prepared) -> [f64; 3] {
        self.populations[branch][prepared_index(prepared)]
    }

    pub(crate) fn outcome_of(&self, branch: usize, level: Level) -> Outcome {
        self.protocol.branches()[branch].outcome_of(level)
    }
}

fn prepared_index(p: Prepared) -> usize {
    match p {
        Prepared::A => 0,
        Prepared::B => 1,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub prepared: Prepared,
    pub branch: usize,
    /// Level after preparation, pulses and collapse; before any probe.
    pub initial_level: Level,
    pub raw_positives: SmallVec<[Level; 3]>,
    /// `None` is "no result".
    pub assigned: Option<Outcome>,
}

impl TrialRecord {
    pub fn positive_count(&self) -> usize {
        self.raw_positives.len()
    }
}

fn sample_level(pops: &[f64; 3], u: f64) -> Level {
    let mut acc = 0.0;
    for level in Level::ALL {
        acc += pops[level.index()];
        if u < acc {
            return level;
        }
    }
    // Rounding left a sliver above the cumulative sum; take the last populated level.
    Level::ALL
        .into_iter()
        .rev()
        .find(|l| pops[l.index()] > 0.0)
        .unwrap_or(Level::M0)
}

/// One shot with a fixed preparation and branch.
pub fn run_trial_in_branch<R: Rng + ?Sized>(
    exp: &Experiment,
    prepared: Prepared,
    branch: usize,
    rng: &mut R,
) -> TrialRecord {
    let noise = &exp.noise;
    let initial_level = if rng.random::<f64>() < noise.p_init_fail {
        Level::M0
    } else {
        sample_level(&exp.populations(branch, prepared), rng.random::<f64>())
    };
    let mut current = initial_level;
    let mut raw_positives = SmallVec::new();
    for &probe in exp.readout_order() {
        if rng.random::<f64>() < noise.fire_probability(probe, current) {
            raw_positives.push(probe);
        }
        if rng.random::<f64>() < noise.p_flip_per_probe {
            let nb = current.neighbors();
            current = nb[rng.random_range(0..nb.len())];
        }
    }
    let assigned = raw_positives.first().map(|&l| exp.outcome_of(branch, l));
    TrialRecord {
        prepared,
        branch,
        initial_level,
        raw_positives,
        assigned,
    }
}

/// One shot with a fixed preparation; randomized protocols draw their branch uniformly.
pub fn run_trial<R: Rng + ?Sized>(exp: &Experiment, prepared: Prepared, rng: &mut R) -> TrialRecord {
    let n = exp.protocol.branches().len();
    let branch = if n == 1 { 0 } else { rng.random_range(0..n) };
    run_trial_in_branch(exp, prepared, branch, rng)
}

/// splitmix64 finalizer, used to derive independent seeds from `(seed, index)`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for trial `index` of a batch seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Integer tallies of a batch. Addition is associative, so any reduction
/// order gives the same totals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub shots: u64,
    pub correct: u64,
    pub error: u64,
    pub inconclusive: u64,
    pub no_result: u64,
    pub multi_positive: u64,
}

impl Counts {
    pub fn record(&mut self, t: &TrialRecord) {
        self.shots += 1;
        match t.assigned {
            None => self.no_result += 1,
            Some(o) if o == t.prepared.correct_outcome() => self.correct += 1,
            Some(o) if o == t.prepared.wrong_outcome() => self.error += 1,
            Some(_) => self.inconclusive += 1,
        }
        if t.positive_count() >= 2 {
            self.multi_positive += 1;
        }
    }

    pub fn merge(self, o: Counts) -> Counts {
        Counts {
            shots: self.shots + o.shots,
            correct: self.correct + o.correct,
            error: self.error + o.error,
            inconclusive: self.inconclusive + o.inconclusive,
            no_result: self.no_result + o.no_result,
            multi_positive: self.multi_positive + o.multi_positive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Ideal,
    MonteCarlo,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Ideal => "ideal",
            Mode::MonteCarlo => "montecarlo",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Aggregated rates for one (protocol, theta, mode) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub protocol: ProtocolKind,
    pub mode: Mode,
    pub theta: f64,
    pub overlap: f64,
    /// Zero for ideal rows.
    pub shots: u64,
    pub p_corr: f64,
    pub p_err: f64,
    pub p_inconclusive: f64,
    pub p_noresult: f64,
    pub p_multipositive: f64,
    pub efficiency: f64,
    pub stderr_corr: f64,
    pub stderr_err: f64,
    pub stderr_inconclusive: f64,
    pub stderr_noresult: f64,
    pub stderr_multipositive: f64,
}

/// Normal-approximation binomial standard error.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

impl SweepRow {
    pub fn from_counts(protocol: ProtocolKind, pair: &StatePair, c: &Counts) -> Self {
        let n = c.shots;
        let rate = |k: u64| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        let (p_corr, p_err, p_inconclusive, p_noresult, p_multipositive) = (
            rate(c.correct),
            rate(c.error),
            rate(c.inconclusive),
            rate(c.no_result),
            rate(c.multi_positive),
        );
        SweepRow {
            protocol,
            mode: Mode::MonteCarlo,
            theta: pair.theta(),
            overlap: pair.overlap(),
            shots: n,
            p_corr,
            p_err,
            p_inconclusive,
            p_noresult,
            p_multipositive,
            efficiency: rate(n - c.no_result),
            stderr_corr: binomial_stderr(p_corr, n),
            stderr_err: binomial_stderr(p_err, n),
            stderr_inconclusive: binomial_stderr(p_inconclusive, n),
            stderr_noresult: binomial_stderr(p_noresult, n),
            stderr_multipositive: binomial_stderr(p_multipositive, n),
        }
    }

    /// Noise-free Born-rule row; every shot yields a result.
    pub fn ideal(protocol: &Protocol) -> Result<Self> {
        let s = ideal_stats(protocol)?;
        let pair = protocol.pair();
        Ok(SweepRow {
            protocol: protocol.kind(),
            mode: Mode::Ideal,
            theta: pair.theta(),
            overlap: pair.overlap(),
            shots: 0,
            p_corr: s.p_corr,
            p_err: s.p_err,
            p_inconclusive: s.p_inconclusive,
            p_noresult: 0.0,
            p_multipositive: 0.0,
            efficiency: 1.0,
            stderr_corr: 0.0,
            stderr_err: 0.0,
            stderr_inconclusive: 0.0,
            stderr_noresult: 0.0,
            stderr_multipositive: 0.0,
        })
    }

    /// Error rate among shots that produced a result.
    pub fn conditional_error(&self) -> f64 {
        if self.efficiency > 0.0 {
            self.p_err / self.efficiency
        } else {
            0.0
        }
    }
}

/// Raw tallies of `shots` trials. Trial `i` uses [`trial_rng`]`(seed, i)`, so
/// the result does not depend on how rayon splits the range.
pub fn run_counts(exp: &Experiment, shots: u64, seed: u64) -> Counts {
    let pa = exp.protocol.pair().prior_a();
    let base = trial_rng(seed, 0);
    (0..shots)
        .into_par_iter()
        .fold(Counts::default, |mut acc, i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            let prepared = if rng.random::<f64>() < pa {
                Prepared::A
            } else {
                Prepared::B
            };
            acc.record(&run_trial(exp, prepared, &mut rng));
            acc
        })
        .reduce(Counts::default, Counts::merge)
}

pub fn run_batch(exp: &Experiment, shots: u64, seed: u64) -> Result<SweepRow> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let counts = run_counts(exp, shots, seed);
    Ok(SweepRow::from_counts(exp.protocol.kind(), exp.protocol.pair(), &counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::build_idp;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn experiment(kind: ProtocolKind, theta: f64, noise: NoiseProfile) -> Experiment {
        Experiment::new(Protocol::build(kind, StatePair::equal(theta).unwrap()).unwrap(), noise).unwrap()
    }

    #[test]
    fn profile_validation() {
        NoiseProfile::zero().validate().unwrap();
        NoiseProfile::initial_guess().validate().unwrap();
        let mut bad = NoiseProfile::zero();
        bad.p_flip_per_probe = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = NoiseProfile::initial_guess();
        bad.p_false_positive_far = 0.05;
        assert!(bad.validate().is_err());
        let mut bad = NoiseProfile::initial_guess();
        bad.p_true_positive = 0.01;
        assert!(bad.validate().is_err());
        let mut bad = NoiseProfile::zero();
        bad.readout_order.idp = SmallVec::from_slice(&[Level::M0, Level::M0]);
        assert!(bad.validate().is_err());
        let mut p = NoiseProfile::zero();
        p.set_param("p_flip_per_probe", 0.25).unwrap();
        assert_eq!(p.p_flip_per_probe, 0.25);
        assert!(p.set_param("p_bogus", 0.1).is_err());
    }

    #[test]
    fn zero_noise_orthogonal_idp_is_certain() {
        let exp = experiment(ProtocolKind::Idp, FRAC_PI_4, NoiseProfile::zero());
        for i in 0..2000 {
            let t = run_trial(&exp, Prepared::A, &mut trial_rng(1, i));
            assert_eq!(t.assigned, Some(Outcome::A));
            assert_eq!(t.positive_count(), 1);
        }
    }

    #[test]
    fn zero_noise_idp_matches_born_rule() {
        let exp = experiment(ProtocolKind::Idp, FRAC_PI_8, NoiseProfile::zero());
        let n = 100_000u64;
        let hits = (0..n)
            .into_par_iter()
            .filter(|&i| run_trial(&exp, Prepared::A, &mut trial_rng(7, i)).assigned == Some(Outcome::A))
            .count();
        let p = hits as f64 / n as f64;
        let want = 0.292_893_218_813_452_5;
        assert!((p - want).abs() < 3.0 * binomial_stderr(want, n), "{p}");
    }

    #[test]
    fn init_failure_leaves_spin_in_m0() {
        let mut noise = NoiseProfile::zero();
        noise.p_init_fail = 1.0;
        noise.p_true_positive = 0.9;
        let exp = experiment(ProtocolKind::Idp, FRAC_PI_8, noise);
        let c = run_counts(&exp, 50_000, 3);
        let p = c.inconclusive as f64 / c.shots as f64;
        assert!((p - 0.9).abs() < 4.0 * binomial_stderr(0.9, c.shots));
        assert_eq!(c.correct + c.error, 0);

        let exp = Experiment::new(build_idp(StatePair::equal(0.3).unwrap()).unwrap(), exp.noise().clone()).unwrap();
        let t = run_trial(&exp, Prepared::B, &mut trial_rng(5, 0));
        assert_eq!(t.initial_level, Level::M0);
    }

    #[test]
    fn single_shot_rates_are_degenerate() {
        let exp = experiment(ProtocolKind::Helstrom, 0.4, NoiseProfile::initial_guess());
        for seed in 0..20 {
            let row = run_batch(&exp, 1, seed).unwrap();
            for p in [
                row.p_corr,
                row.p_err,
                row.p_inconclusive,
                row.p_noresult,
                row.p_multipositive,
            ] {
                assert!(p == 0.0 || p == 1.0);
            }
        }
        assert!(run_batch(&exp, 0, 1).is_err());
    }

    #[test]
    fn zero_noise_helstrom_error() {
        let exp = experiment(ProtocolKind::Helstrom, FRAC_PI_8, NoiseProfile::zero());
        let row = run_batch(&exp, 1_000_000, 42).unwrap();
        let want = 0.146_446_609_406_726_2;
        assert!((row.p_err - want).abs() < 3.0 * binomial_stderr(want, row.shots));
        assert_eq!(row.efficiency, 1.0);
    }

    #[test]
    fn batches_are_reproducible_across_pools() {
        let exp = experiment(ProtocolKind::SusdRandomized, 0.3, NoiseProfile::initial_guess());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_batch(&exp, 20_000, 99).unwrap());
        let b = four.install(|| run_batch(&exp, 20_000, 99).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, run_batch(&exp, 20_000, 100).unwrap());
    }

    #[test]
    fn rates_partition_the_shots() {
        for kind in [ProtocolKind::SusdRandomized, ProtocolKind::Idp, ProtocolKind::Helstrom] {
            let exp = experiment(kind, 0.2, NoiseProfile::initial_guess());
            let row = run_batch(&exp, 10_000, 1).unwrap();
            let total = row.p_corr + row.p_err + row.p_inconclusive + row.p_noresult;
            assert!((total - 1.0).abs() < 1e-12);
            assert_eq!(row.efficiency + row.p_noresult, 1.0);
        }
    }

    #[test]
    fn false_positives_alone_make_usd_err() {
        let mut noise = NoiseProfile::zero();
        noise.p_false_positive_neighbor = 0.05;
        noise.p_false_positive_far = 0.01;
        let idp = run_batch(&experiment(ProtocolKind::Idp, 0.3, noise.clone()), 50_000, 11).unwrap();
        assert!(idp.p_err > 0.0);

        // SUSD probes its inconclusive level first, so a perfect probe there
        // shields it; any missed detection exposes the far false positive.
        let susd = experiment(ProtocolKind::SusdRandomized, 0.3, noise.clone());
        assert!(exact_rates(&susd).p_err < 1e-15);
        noise.p_true_positive = 0.95;
        let row = run_batch(&experiment(ProtocolKind::SusdRandomized, 0.3, noise), 50_000, 11).unwrap();
        assert!(row.p_err > 0.0);
        assert!(SweepRow::ideal(susd.protocol()).unwrap().p_err.abs() < 1e-12);
    }

    #[test]
    fn flips_raise_idp_error_near_unit_overlap() {
        let theta = 0.5 * 0.95f64.acos();
        let base = NoiseProfile::initial_guess();
        let mut more = base.clone();
        more.p_flip_per_probe += 0.05;
        let lo = run_batch(&experiment(ProtocolKind::Idp, theta, base), 200_000, 5).unwrap();
        let hi = run_batch(&experiment(ProtocolKind::Idp, theta, more), 200_000, 5).unwrap();
        let sigma = (lo.stderr_err.powi(2) + hi.stderr_err.powi(2)).sqrt();
        assert!(hi.p_err > lo.p_err + 3.0 * sigma, "{} vs {}", hi.p_err, lo.p_err);
    }

    #[test]
    fn mismatched_schedule_is_rejected() {
        let protocol = Protocol::build(ProtocolKind::Idp, StatePair::equal(0.3).unwrap()).unwrap();
        let wrong = crate::pulse::compile_protocol(
            &Protocol::build(ProtocolKind::Idp, StatePair::equal(0.5).unwrap()).unwrap(),
        )
        .unwrap();
        assert!(Experiment::with_schedules(protocol.clone(), wrong, NoiseProfile::zero()).is_err());
        assert!(Experiment::with_schedules(protocol, vec![], NoiseProfile::zero()).is_err());
    }

    #[test]
    fn mixed_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| mix_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(mix_seed(1, 0), mix_seed(2, 0));
    }
}
