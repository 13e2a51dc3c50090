//! Fit of the noise profile to per-protocol summary targets (detection
//! efficiency, multi-positive fraction, error level).
//!
//! The objective is a weighted sum of squared log-ratios `ln(sim / target)^2`
//! plus a hinge on the protocol orderings across the overlap grid, evaluated
//! with the exact path-sum rates so that it is deterministic. The search is a
//! pattern search over `u` with `p = sin^2 u` and step halving.

use std::cell::Cell;
use std::fmt;

use super::{exact_rates_with, Experiment, NoiseProfile, Rates, PARAM_NAMES};
use crate::error::Result;
use crate::protocols::{Protocol, ProtocolKind, StatePair};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErrorTarget {
    Around(f64),
    Range(f64, f64),
    AtLeast(f64),
}

impl ErrorTarget {
    /// Squared log distance to the nearest admissible value.
    fn penalty(self, sim: f64) -> f64 {
        match self {
            ErrorTarget::Around(t) => log_dev(sim, t),
            ErrorTarget::Range(lo, _) if sim < lo => log_dev(sim, lo),
            ErrorTarget::Range(_, hi) if sim > hi => log_dev(sim, hi),
            ErrorTarget::Range(..) => 0.0,
            ErrorTarget::AtLeast(t) if sim < t => log_dev(sim, t),
            ErrorTarget::AtLeast(_) => 0.0,
        }
    }
}

impl fmt::Display for ErrorTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ErrorTarget::Around(t) => write!(f, "~{:.1}", 100.0 * t),
            ErrorTarget::Range(lo, hi) => write!(f, "{:.1}-{:.1}", 100.0 * lo, 100.0 * hi),
            ErrorTarget::AtLeast(t) => write!(f, ">{:.1}", 100.0 * t),
        }
    }
}

fn log_dev(sim: f64, target: f64) -> f64 {
    let r = (sim.max(1e-12) / target).ln();
    r * r
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolTarget {
    pub kind: ProtocolKind,
    pub efficiency: f64,
    pub multi_positive: f64,
    pub error: ErrorTarget,
}

/// Published per-protocol summary numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Table1Targets {
    pub protocols: Vec<ProtocolTarget>,
}

impl Default for Table1Targets {
    fn default() -> Self {
        Table1Targets {
            protocols: vec![
                ProtocolTarget {
                    kind: ProtocolKind::SusdRandomized,
                    efficiency: 0.846,
                    multi_positive: 0.01,
                    error: ErrorTarget::Around(0.035),
                },
                ProtocolTarget {
                    kind: ProtocolKind::Idp,
                    efficiency: 0.902,
                    multi_positive: 0.102,
                    error: ErrorTarget::Range(0.04, 0.075),
                },
                ProtocolTarget {
                    kind: ProtocolKind::Helstrom,
                    efficiency: 0.831,
                    multi_positive: 0.011,
                    error: ErrorTarget::AtLeast(0.035),
                },
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetWeights {
    pub efficiency: f64,
    pub multi_positive: f64,
    pub error: f64,
}

impl Default for TargetWeights {
    fn default() -> Self {
        TargetWeights {
            efficiency: 2000.0,
            multi_positive: 1.0,
            error: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationOptions {
    pub overlaps: Vec<f64>,
    pub weights: TargetWeights,
    /// Weight of the ordering hinge (see [`ordering_violation`]); zero disables it.
    pub ordering_weight: f64,
    pub ordering_margin: f64,
    pub max_evaluations: usize,
    /// Initial coordinate step in the search variable `u`, where `p = sin^2 u`.
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            overlaps: (0..=16).map(|k| k as f64 * 0.0625).collect(),
            weights: TargetWeights::default(),
            ordering_weight: 1e6,
            ordering_margin: 0.003,
            max_evaluations: 20_000,
            initial_step: 0.2,
            min_step: 1e-5,
        }
    }
}

/// Simulated summary of one protocol over the overlap grid.
///
/// `efficiency` and `multi_positive` are grid averages. For unambiguous
/// schemes `error` is the share of wrong answers among all conclusive
/// answers on the grid; for the minimum-error scheme it is the error among
/// shots with a result at the smallest overlap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolFit {
    pub kind: ProtocolKind,
    pub efficiency: f64,
    pub multi_positive: f64,
    pub error: f64,
}

impl ProtocolFit {
    fn objective(&self, t: &ProtocolTarget, w: &TargetWeights) -> f64 {
        w.efficiency * log_dev(self.efficiency, t.efficiency)
            + w.multi_positive * log_dev(self.multi_positive, t.multi_positive)
            + w.error * t.error.penalty(self.error)
    }
}

#[derive(Clone, Debug)]
pub struct CalibrationReport {
    pub profile: NoiseProfile,
    pub objective: f64,
    pub fits: Vec<(ProtocolTarget, ProtocolFit)>,
    pub evaluations: usize,
    /// False when the evaluation budget ran out before the step shrank below `min_step`.
    pub converged: bool,
}

impl fmt::Display for CalibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.profile)?;
        writeln!(
            f,
            "objective = {:.6e} after {} evaluations",
            self.objective, self.evaluations
        )?;
        if !self.converged {
            writeln!(
                f,
                "warning: calibration stopped at the evaluation limit before converging"
            )?;
        }
        writeln!(f, "protocol  eff%  (target)  multi%  (target)  err%  (target)")?;
        for (t, s) in &self.fits {
            writeln!(
                f,
                "{:<9} {:5.1} ({:5.1})   {:5.1} ({:5.1})   {:4.1} ({})",
                t.kind.name(),
                100.0 * s.efficiency,
                100.0 * t.efficiency,
                100.0 * s.multi_positive,
                100.0 * t.multi_positive,
                100.0 * s.error,
                t.error
            )?;
        }
        Ok(())
    }
}

struct Grid {
    cells: Vec<(ProtocolKind, Vec<Experiment>)>,
}

impl Grid {
    fn new(kinds: impl Iterator<Item = ProtocolKind>, overlaps: &[f64], noise: &NoiseProfile) -> Result<Self> {
        let mut sorted = overlaps.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut cells = Vec::new();
        for kind in kinds {
            let exps = sorted
                .iter()
                .map(|&ov| Experiment::new(Protocol::build(kind, StatePair::from_overlap(ov, 0.5)?)?, noise.clone()))
                .collect::<Result<Vec<_>>>()?;
            cells.push((kind, exps));
        }
        Ok(Grid { cells })
    }

    fn rates(&self, noise: &NoiseProfile) -> Vec<(ProtocolKind, Vec<Rates>)> {
        self.cells
            .iter()
            .map(|(kind, exps)| (*kind, exps.iter().map(|e| exact_rates_with(e, noise)).collect()))
            .collect()
    }
}

fn summarize(kind: ProtocolKind, rates: &[Rates]) -> ProtocolFit {
    let n = rates.len() as f64;
    let error = if kind.is_unambiguous() {
        pooled_conclusive_error(rates.iter().map(|r| (r.p_corr, r.p_err)))
    } else {
        rates[0].conditional_error()
    };
    ProtocolFit {
        kind,
        efficiency: rates.iter().map(|r| r.efficiency()).sum::<f64>() / n,
        multi_positive: rates.iter().map(|r| r.p_multipositive).sum::<f64>() / n,
        error,
    }
}

/// Sum of squared hinge violations of the result-normalized orderings
/// `p_corr`: Helstrom >= IDP >= SUSD and `p_?`: IDP <= SUSD at every
/// overlap, plus `p_err`: IDP > SUSD at the largest overlap. Each
/// inequality must hold with `margin` to spare. Zero unless all three
/// protocols are on the grid.
fn ordering_violation(rates: &[(ProtocolKind, Vec<Rates>)], margin: f64) -> f64 {
    let find = |k| rates.iter().find(|(kind, _)| *kind == k).map(|(_, r)| r);
    let (Some(susd), Some(idp), Some(hel)) = (
        find(ProtocolKind::SusdRandomized),
        find(ProtocolKind::Idp),
        find(ProtocolKind::Helstrom),
    ) else {
        return 0.0;
    };
    let norm = |r: &Rates, x: f64| if r.efficiency() > 0.0 { x / r.efficiency() } else { 0.0 };
    let hinge = |short: f64| (short + margin).max(0.0).powi(2);
    let mut total = 0.0;
    for ((s, i), h) in susd.iter().zip(idp).zip(hel) {
        total += hinge(norm(i, i.p_corr) - norm(h, h.p_corr));
        total += hinge(norm(s, s.p_corr) - norm(i, i.p_corr));
        total += hinge(norm(i, i.p_inconclusive) - norm(s, s.p_inconclusive));
    }
    if let (Some(s), Some(i)) = (susd.last(), idp.last()) {
        total += hinge(norm(s, s.p_err) - norm(i, i.p_err));
    }
    total
}

/// `sum p_err / sum (p_corr + p_err)` over `(p_corr, p_err)` pairs; zero
/// when nothing was conclusive.
pub fn pooled_conclusive_error(points: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (conclusive, wrong) = points
        .into_iter()
        .fold((0.0, 0.0), |(c, w), (corr, err)| (c + corr + err, w + err));
    if conclusive > 0.0 {
        wrong / conclusive
    } else {
        0.0
    }
}

/// Summary of every protocol in `kinds` under `noise`, as used by [`calibrate`].
pub fn evaluate_profile(noise: &NoiseProfile, kinds: &[ProtocolKind], overlaps: &[f64]) -> Result<Vec<ProtocolFit>> {
    noise.validate()?;
    if overlaps.is_empty() {
        return Err(crate::Error::Config("empty overlap grid".into()));
    }
    let grid = Grid::new(kinds.iter().copied(), overlaps, noise)?;
    Ok(grid.rates(noise).iter().map(|(k, r)| summarize(*k, r)).collect())
}

// p = sin^2(u): unbounded search variable, reflecting at both ends of [0, 1].
fn to_search(p: f64) -> f64 {
    p.clamp(0.0, 1.0).sqrt().asin()
}

fn from_search(u: f64) -> f64 {
    u.sin().powi(2)
}

/// Pattern search from `seed_guess`; returns the best profile found even
/// when the budget runs out (with `converged = false`).
pub fn calibrate(
    seed_guess: &NoiseProfile,
    targets: &Table1Targets,
    options: &CalibrationOptions,
) -> Result<CalibrationReport> {
    seed_guess.validate()?;
    if options.overlaps.is_empty() {
        return Err(crate::Error::Config("empty overlap grid".into()));
    }
    let grid = Grid::new(targets.protocols.iter().map(|t| t.kind), &options.overlaps, seed_guess)?;
    let evaluations = Cell::new(0usize);
    let objective = |x: &[f64; 5]| -> f64 {
        let noise = seed_guess.with_params(x.map(from_search));
        if noise.validate().is_err() {
            return f64::INFINITY;
        }
        evaluations.set(evaluations.get() + 1);
        let rates = grid.rates(&noise);
        let fit: f64 = rates
            .iter()
            .zip(&targets.protocols)
            .map(|((kind, r), t)| summarize(*kind, r).objective(t, &options.weights))
            .sum();
        if options.ordering_weight > 0.0 {
            fit + options.ordering_weight * ordering_violation(&rates, options.ordering_margin)
        } else {
            fit
        }
    };

    let budget = || evaluations.get() < options.max_evaluations;
    // One exploratory pass: try +-step along each coordinate, keep what helps.
    let explore = |mut x: [f64; 5], mut f: f64, step: f64| {
        for i in 0..PARAM_NAMES.len() {
            for dir in [1.0, -1.0] {
                let mut trial = x;
                trial[i] += dir * step;
                let ft = objective(&trial);
                if ft < f {
                    x = trial;
                    f = ft;
                    break;
                }
            }
        }
        (x, f)
    };

    let mut x = seed_guess.params().map(to_search);
    let mut best = objective(&x);
    let mut step = options.initial_step;
    while step >= options.min_step && budget() {
        let (mut next, mut f_next) = explore(x, best, step);
        if f_next >= best {
            step *= 0.5;
            continue;
        }
        // Pattern moves along the last successful direction.
        while f_next < best && budget() {
            let jump: [f64; 5] = std::array::from_fn(|i| 2.0 * next[i] - x[i]);
            x = next;
            best = f_next;
            let f_jump = objective(&jump);
            (next, f_next) = explore(jump, f_jump, step);
        }
    }
    let budget_left = step < options.min_step;
    let profile = seed_guess.with_params(x.map(from_search));
    let rates = grid.rates(&profile);
    let fits = targets
        .protocols
        .iter()
        .zip(&rates)
        .map(|(t, (kind, r))| (*t, summarize(*kind, r)))
        .collect();
    Ok(CalibrationReport {
        profile,
        objective: best,
        fits,
        evaluations: evaluations.get(),
        converged: budget_left,
    })
}
