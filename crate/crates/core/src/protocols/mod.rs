//! The three discrimination schemes as (unitary, level measurement, relabeling)
//! pipelines, with exact Born-rule statistics.
//!
//! Every pipeline ends with the relabeling pulse, a full inversion of the
//! `m0 <-> m+1` transition. Consequences for the measured levels:
//!
//! | protocol | `m0` | `m-1` | `m+1` |
//! |----------|------|-------|-------|
//! | SUSD, A basis | unused | B | inconclusive |
//! | SUSD, B basis | unused | A | inconclusive |
//! | IDP | inconclusive | B | A |
//! | Helstrom | unused | B | A |

mod oracle;

pub use oracle::{oracle_min_error_search, oracle_usd_failure_search, usd_failure_with_conclusive_a};

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use crate::error::{Error, Result};
use crate::qudit::{
    apply_unitary, born_probabilities, Dim, Level, Operator, Outcome, OutcomeDistribution, Povm, StateVector,
    MATRIX_TOL, STATE_TOL,
};

/// Which of the two states was prepared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prepared {
    A,
    B,
}

impl Prepared {
    /// The outcome that identifies this state correctly.
    pub fn correct_outcome(self) -> Outcome {
        match self {
            Prepared::A => Outcome::A,
            Prepared::B => Outcome::B,
        }
    }

    pub fn wrong_outcome(self) -> Outcome {
        match self {
            Prepared::A => Outcome::B,
            Prepared::B => Outcome::A,
        }
    }
}

/// Checks `0 <= theta <= pi/4`, absorbing rounding of at most 1e-12.
pub fn check_theta(theta: f64) -> Result<f64> {
    if !(-STATE_TOL..=FRAC_PI_4 + STATE_TOL).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(theta.clamp(0.0, FRAC_PI_4))
}

/// `theta = arccos(overlap) / 2`.
pub fn theta_from_overlap(overlap: f64) -> Result<f64> {
    if !overlap.is_finite() || !(0.0..=1.0).contains(&overlap) {
        return Err(Error::OverlapOutOfRange(overlap));
    }
    Ok(overlap.acos() / 2.0)
}

/// `|a> = cos(theta)|0> - sin(theta)|-1>`, `|b> = cos(theta)|0> + sin(theta)|-1>`.
pub fn prepare_pair(theta: f64) -> Result<(StateVector, StateVector)> {
    let theta = check_theta(theta)?;
    let (s, c) = theta.sin_cos();
    Ok((StateVector::from_real(&[c, -s])?, StateVector::from_real(&[c, s])?))
}

/// The two candidate states and their prior probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatePair {
    theta: f64,
    prior_a: f64,
    prior_b: f64,
}

impl StatePair {
    pub fn new(theta: f64, prior_a: f64, prior_b: f64) -> Result<Self> {
        let theta = check_theta(theta)?;
        let ok = prior_a.is_finite()
            && prior_b.is_finite()
            && prior_a >= 0.0
            && prior_b >= 0.0
            && (prior_a + prior_b - 1.0).abs() <= STATE_TOL;
        if !ok {
            return Err(Error::InvalidPriors(prior_a, prior_b));
        }
        Ok(StatePair {
            theta,
            prior_a,
            prior_b,
        })
    }

    pub fn equal(theta: f64) -> Result<Self> {
        Self::new(theta, 0.5, 0.5)
    }

    pub fn from_overlap(overlap: f64, prior_a: f64) -> Result<Self> {
        Self::new(theta_from_overlap(overlap)?, prior_a, 1.0 - prior_a)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn prior_a(&self) -> f64 {
        self.prior_a
    }

    pub fn prior_b(&self) -> f64 {
        self.prior_b
    }

    pub fn prior(&self, which: Prepared) -> f64 {
        match which {
            Prepared::A => self.prior_a,
            Prepared::B => self.prior_b,
        }
    }

    /// `<a|b> = cos(2 theta)`.
    pub fn overlap(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    pub fn has_equal_priors(&self) -> bool {
        (self.prior_a - 0.5).abs() <= STATE_TOL
    }

    pub fn states(&self) -> (StateVector, StateVector) {
        let (s, c) = self.theta.sin_cos();
        (
            StateVector::from_real(&[c, -s]).expect("unit by construction"),
            StateVector::from_real(&[c, s]).expect("unit by construction"),
        )
    }

    pub fn state(&self, which: Prepared) -> StateVector {
        let (a, b) = self.states();
        match which {
            Prepared::A => a,
            Prepared::B => b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    /// Standard USD in the `{|a>, |a_perp>}` basis.
    SusdA,
    /// Standard USD in the `{|b>, |b_perp>}` basis.
    SusdB,
    /// Standard USD with the basis drawn uniformly per trial.
    SusdRandomized,
    Idp,
    Helstrom,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::SusdA,
        ProtocolKind::SusdB,
        ProtocolKind::SusdRandomized,
        ProtocolKind::Idp,
        ProtocolKind::Helstrom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::SusdA => "susd_a",
            ProtocolKind::SusdB => "susd_b",
            ProtocolKind::SusdRandomized => "susd",
            ProtocolKind::Idp => "idp",
            ProtocolKind::Helstrom => "helstrom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ProtocolKind::ALL.into_iter().find(|k| k.name() == s.trim())
    }

    /// Hilbert-space dimension the scheme needs.
    pub fn dimension(self) -> usize {
        match self {
            ProtocolKind::Idp => 3,
            _ => 2,
        }
    }

    pub fn is_unambiguous(self) -> bool {
        !matches!(self, ProtocolKind::Helstrom)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SusdBasis {
    A,
    B,
}

/// The final inversion pulse on `m0 <-> m+1`: `|0> -> |+1>`, `|+1> -> -|0>`.
pub fn relabel_pulse() -> Operator {
    Operator::from_real_rows(&[&[0.0, 0.0, -1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]).expect("3x3")
}

/// One deterministic measurement pipeline: a unitary followed by a
/// projective measurement of the levels, relabelled into outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    unitary: Operator,
    relabel: [Outcome; 3],
    measurement: Povm,
}

impl Branch {
    pub fn new(unitary: Operator, relabel: [Outcome; 3]) -> Result<Self> {
        if unitary.dim() != Dim::Three {
            return Err(Error::DimensionMismatch(unitary.dim().size(), 3));
        }
        let residual = unitary.unitarity_residual();
        if residual > MATRIX_TOL {
            return Err(Error::NotUnitary(residual));
        }
        let measurement = Povm::levels(&relabel)?;
        Ok(Branch {
            unitary,
            relabel,
            measurement,
        })
    }

    /// Working unitary, including the final relabeling pulse.
    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn relabel(&self) -> &[Outcome; 3] {
        &self.relabel
    }

    pub fn outcome_of(&self, level: Level) -> Outcome {
        self.relabel[level.index()]
    }

    pub fn measurement(&self) -> &Povm {
        &self.measurement
    }

    /// The measurement expressed on the input space, `U^dagger P_level U`.
    pub fn effective_povm(&self) -> Povm {
        self.measurement.conjugated_by(&self.unitary)
    }

    /// Level populations after the unitary.
    pub fn level_populations(&self, psi: &StateVector) -> Result<[f64; 3]> {
        Ok(apply_unitary(&self.unitary, &psi.embed())?.populations())
    }

    pub fn distribution(&self, psi: &StateVector) -> Result<OutcomeDistribution> {
        born_probabilities(&apply_unitary(&self.unitary, &psi.embed())?, &self.measurement)
    }
}

/// A discrimination protocol bound to a [`StatePair`]. Branches are
/// mixed with equal weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    kind: ProtocolKind,
    pair: StatePair,
    branches: Vec<Branch>,
}

impl Protocol {
    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn pair(&self) -> &StatePair {
        &self.pair
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// `p(outcome | prepared)` averaged over the branches.
    pub fn conditional(&self, prepared: Prepared) -> Result<OutcomeDistribution> {
        let psi = self.pair.state(prepared);
        let w = 1.0 / self.branches.len() as f64;
        let mut out = OutcomeDistribution::default();
        for branch in &self.branches {
            for (o, p) in branch.distribution(&psi)?.iter() {
                out.add(o, w * p);
            }
        }
        Ok(out)
    }

    pub fn build(kind: ProtocolKind, pair: StatePair) -> Result<Protocol> {
        match kind {
            ProtocolKind::SusdA => build_susd(pair, SusdBasis::A),
            ProtocolKind::SusdB => build_susd(pair, SusdBasis::B),
            ProtocolKind::SusdRandomized => build_susd_randomized(pair),
            ProtocolKind::Idp => build_idp(pair),
            ProtocolKind::Helstrom => build_helstrom(pair),
        }
    }
}

fn three(v: &StateVector) -> StateVector {
    v.embed()
}

fn susd_branch(pair: &StatePair, basis: SusdBasis) -> Result<Branch> {
    let (s, c) = pair.theta().sin_cos();
    let plus = StateVector::basis(Level::MPlus1, Dim::Three)?;
    let (parallel, perp, relabel) = match basis {
        // |a_perp> = sin|0> + cos|-1>
        SusdBasis::A => (pair.state(Prepared::A), StateVector::from_real(&[s, c])?, Outcome::B),
        // -|b_perp> with |b_perp> = sin|0> - cos|-1>; the sign keeps the map a proper rotation.
        SusdBasis::B => (pair.state(Prepared::B), StateVector::from_real(&[-s, c])?, Outcome::A),
    };
    let rotation = Operator::from_bras(&[three(&parallel), three(&perp), plus])?;
    Branch::new(
        relabel_pulse() * rotation,
        [Outcome::Unused, relabel, Outcome::Inconclusive],
    )
}

/// Standard unambiguous discrimination in one fixed two-dimensional basis.
pub fn build_susd(pair: StatePair, which_basis: SusdBasis) -> Result<Protocol> {
    let kind = match which_basis {
        SusdBasis::A => ProtocolKind::SusdA,
        SusdBasis::B => ProtocolKind::SusdB,
    };
    Ok(Protocol {
        kind,
        pair,
        branches: vec![susd_branch(&pair, which_basis)?],
    })
}

pub fn build_susd_randomized(pair: StatePair) -> Result<Protocol> {
    Ok(Protocol {
        kind: ProtocolKind::SusdRandomized,
        pair,
        branches: vec![susd_branch(&pair, SusdBasis::A)?, susd_branch(&pair, SusdBasis::B)?],
    })
}

/// The orthonormal IDP basis `(|a~>, |b~>, |?>)`, with `<a~|b> = <b~|a> = 0`.
pub fn idp_basis(theta: f64) -> Result<[StateVector; 3]> {
    let theta = check_theta(theta)?;
    // tan(pi/4) rounds just below 1 in floating point.
    let t = if FRAC_PI_4 - theta < 1e-15 { 1.0 } else { theta.tan() };
    let r = (1.0 - t * t).max(0.0).sqrt();
    let h = FRAC_1_SQRT_2;
    Ok([
        StateVector::from_real(&[h * t, -h, -h * r])?,
        StateVector::from_real(&[h * t, h, -h * r])?,
        StateVector::from_real(&[r, 0.0, t])?,
    ])
}

/// `U = |0><a~| + |-1><b~| + |+1><?|`.
pub fn idp_unitary(theta: f64) -> Result<Operator> {
    Operator::from_bras(&idp_basis(theta)?)
}

/// Optimal unambiguous discrimination in the three-level space. Equal priors only.
pub fn build_idp(pair: StatePair) -> Result<Protocol> {
    if !pair.has_equal_priors() {
        return Err(Error::Unsupported(format!(
            "IDP measurement requires equal priors, got p_a = {}",
            pair.prior_a()
        )));
    }
    let branch = Branch::new(
        relabel_pulse() * idp_unitary(pair.theta())?,
        [Outcome::Inconclusive, Outcome::B, Outcome::A],
    )?;
    Ok(Protocol {
        kind: ProtocolKind::Idp,
        pair,
        branches: vec![branch],
    })
}

/// Helstrom basis `(|a'>, |b'>)` in the two-dimensional span.
///
/// For equal priors this is `(|0> -+ |-1>)/sqrt 2`. Otherwise it is the
/// eigenbasis of `p_a|a><a| - p_b|b><b|`, the positive eigenvector first.
/// The returned pair always has the form `(cos f, -sin f), (sin f, cos f)`.
pub fn helstrom_basis(pair: &StatePair) -> (StateVector, StateVector) {
    if pair.has_equal_priors() {
        let h = FRAC_1_SQRT_2;
        return (
            StateVector::from_real(&[h, -h]).expect("unit"),
            StateVector::from_real(&[h, h]).expect("unit"),
        );
    }
    helstrom_basis_for_weights(pair.theta(), pair.prior_a(), pair.prior_b())
}

/// Eigenbasis of `w_a|a><a| - w_b|b><b|` for arbitrary non-negative weights.
pub fn helstrom_basis_for_weights(theta: f64, weight_a: f64, weight_b: f64) -> (StateVector, StateVector) {
    let (s, c) = theta.sin_cos();
    // Real symmetric weight operator in the (m0, m-1) plane.
    let g00 = (weight_a - weight_b) * c * c;
    let g11 = (weight_a - weight_b) * s * s;
    let g01 = -(weight_a + weight_b) * c * s;
    let mean = 0.5 * (g00 + g11);
    let r = (0.25 * (g00 - g11) * (g00 - g11) + g01 * g01).sqrt();
    let top = mean + r;
    let (mut x, mut y) = if g01.abs() > 0.0 {
        let u = (g01, top - g00);
        let v = (top - g11, g01);
        if u.0.hypot(u.1) >= v.0.hypot(v.1) {
            u
        } else {
            v
        }
    } else if g00 >= g11 {
        (1.0, 0.0)
    } else {
        (0.0, -1.0)
    };
    let n = x.hypot(y);
    x /= n;
    y /= n;
    if x < 0.0 || (x == 0.0 && y > 0.0) {
        x = -x;
        y = -y;
    }
    (
        StateVector::from_real(&[x, y]).expect("normalized"),
        StateVector::from_real(&[-y, x]).expect("normalized"),
    )
}

/// Minimum-error measurement.
pub fn build_helstrom(pair: StatePair) -> Result<Protocol> {
    let (a_prime, b_prime) = helstrom_basis(&pair);
    let plus = StateVector::basis(Level::MPlus1, Dim::Three)?;
    let rotation = Operator::from_bras(&[three(&a_prime), three(&b_prime), plus])?;
    let branch = Branch::new(relabel_pulse() * rotation, [Outcome::Unused, Outcome::B, Outcome::A])?;
    Ok(Protocol {
        kind: ProtocolKind::Helstrom,
        pair,
        branches: vec![branch],
    })
}

/// `(1 - sqrt(1 - 4 p_a p_b |<a|b>|^2)) / 2`.
pub fn helstrom_bound(pair: &StatePair) -> f64 {
    let ov = pair.overlap();
    let arg = (1.0 - 4.0 * pair.prior_a() * pair.prior_b() * ov * ov).max(0.0);
    0.5 * (1.0 - arg.sqrt())
}

/// Exact averaged statistics of a protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealStats {
    pub p_corr: f64,
    pub p_err: f64,
    /// Includes the (ideally empty) unused outcome.
    pub p_inconclusive: f64,
    pub given_a: OutcomeDistribution,
    pub given_b: OutcomeDistribution,
}

impl IdealStats {
    /// `p(outcome | prepared)`.
    pub fn conditional(&self, outcome: Outcome, prepared: Prepared) -> f64 {
        match prepared {
            Prepared::A => self.given_a.get(outcome),
            Prepared::B => self.given_b.get(outcome),
        }
    }
}

pub fn ideal_stats(protocol: &Protocol) -> Result<IdealStats> {
    let pair = protocol.pair();
    let given_a = protocol.conditional(Prepared::A)?;
    let given_b = protocol.conditional(Prepared::B)?;
    let (pa, pb) = (pair.prior_a(), pair.prior_b());
    let p_corr = pa * given_a.get(Outcome::A) + pb * given_b.get(Outcome::B);
    let p_err = pa * given_a.get(Outcome::B) + pb * given_b.get(Outcome::A);
    let inconclusive = |d: &OutcomeDistribution| d.get(Outcome::Inconclusive) + d.get(Outcome::Unused);
    let p_inconclusive = pa * inconclusive(&given_a) + pb * inconclusive(&given_b);
    Ok(IdealStats {
        p_corr,
        p_err,
        p_inconclusive,
        given_a,
        given_b,
    })
}
