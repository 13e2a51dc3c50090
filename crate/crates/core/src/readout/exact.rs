//! Exact outcome rates of the readout model, obtained by summing over every
//! probe/flip path instead of sampling. Used as the calibration objective
//! and as a cross-check on the Monte Carlo engine.

use super::{Experiment, NoiseProfile, PREPARED};
use crate::qudit::Level;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rates {
    pub p_corr: f64,
    pub p_err: f64,
    pub p_inconclusive: f64,
    pub p_noresult: f64,
    pub p_multipositive: f64,
}

impl Rates {
    pub fn efficiency(&self) -> f64 {
        1.0 - self.p_noresult
    }

    /// Error rate among shots that produced a result.
    pub fn conditional_error(&self) -> f64 {
        let eff = self.efficiency();
        if eff > 0.0 {
            self.p_err / eff
        } else {
            0.0
        }
    }
}

// Path state: occupied level x first fired level (index 3 = none yet) x positives (capped at 2).
type Paths = [[[f64; 3]; 4]; 3];

pub fn exact_rates(exp: &Experiment) -> Rates {
    exact_rates_with(exp, exp.noise())
}

/// Rates of `exp`'s protocol under a different noise profile (assumed valid).
#[allow(clippy::needless_range_loop)]
pub fn exact_rates_with(exp: &Experiment, noise: &NoiseProfile) -> Rates {
    let order = noise.readout_order.for_kind(exp.protocol().kind());
    let pair = exp.protocol().pair();
    let n_branches = exp.protocol().branches().len();
    let mut rates = Rates::default();

    for prepared in PREPARED {
        let w_prep = pair.prior(prepared);
        for branch in 0..n_branches {
            let w = w_prep / n_branches as f64;
            let pops = exp.populations(branch, prepared);
            let mut paths: Paths = [[[0.0; 3]; 4]; 3];
            for level in Level::ALL {
                let mut p = (1.0 - noise.p_init_fail) * pops[level.index()];
                if level == Level::M0 {
                    p += noise.p_init_fail;
                }
                paths[level.index()][3][0] = p;
            }
            for &probe in order {
                let mut next: Paths = [[[0.0; 3]; 4]; 3];
                for cur in Level::ALL {
                    let fire = noise.fire_probability(probe, cur);
                    let nb = cur.neighbors();
                    for first in 0..4 {
                        for count in 0..3 {
                            let p = paths[cur.index()][first][count];
                            if p == 0.0 {
                                continue;
                            }
                            let fired_first = if first == 3 { probe.index() } else { first };
                            for (f, c, pf) in [(first, count, 1.0 - fire), (fired_first, (count + 1).min(2), fire)] {
                                let q = p * pf;
                                next[cur.index()][f][c] += q * (1.0 - noise.p_flip_per_probe);
                                for n in nb {
                                    next[n.index()][f][c] += q * noise.p_flip_per_probe / nb.len() as f64;
                                }
                            }
                        }
                    }
                }
                paths = next;
            }
            for cur in 0..3 {
                for first in 0..4 {
                    for count in 0..3 {
                        let p = w * paths[cur][first][count];
                        if count >= 2 {
                            rates.p_multipositive += p;
                        }
                        if first == 3 {
                            rates.p_noresult += p;
                            continue;
                        }
                        let outcome = exp.outcome_of(branch, Level::from_index(first).expect("level index"));
                        match outcome {
                            o if o == prepared.correct_outcome() => rates.p_corr += p,
                            o if o == prepared.wrong_outcome() => rates.p_err += p,
                            _ => rates.p_inconclusive += p,
                        }
                    }
                }
            }
        }
    }
    rates
}
