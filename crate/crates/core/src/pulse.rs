//! Two-level rotations on the `m0 <-> m-1` and `m0 <-> m+1` transitions and
//! the pulse schedules that realize each protocol's unitary.
//!
//! # Rotation convention
//!
//! A pulse of angle `alpha` and phase `phi` on transition `(i, j)` (with `i = m0`)
//! acts as
//!
//! ```text
//! |i> -> cos(alpha/2) |i> + e^{+i phi} sin(alpha/2) |j>
//! |j> -> -e^{-i phi} sin(alpha/2) |i> + cos(alpha/2) |j>
//! ```
//!
//! and leaves the third level alone. With this convention a `2 theta` pulse on
//! `m0 <-> m-1` takes `|0>` to `|b>` at phase 0 and to `|a>` at phase `pi`, and
//! the `pi/2` pulse is exactly the `T(0,-1)` factor of the IDP unitary.
//!
//! Rotations have period `4 pi` in `alpha`, so a negative angle is stored as
//! its magnitude with the phase advanced by `pi`; the two are the same matrix.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::protocols::{self, check_theta, Prepared, Protocol, ProtocolKind, StatePair, SusdBasis};
use crate::qudit::{Dim, Level, Operator, StateVector, MATRIX_TOL};

/// Reconstruction tolerance for [`verify_schedule`].
pub const SCHEDULE_TOL: f64 = MATRIX_TOL;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transition {
    T0Minus1,
    T0Plus1,
}

impl Transition {
    pub fn other_level(self) -> Level {
        match self {
            Transition::T0Minus1 => Level::MMinus1,
            Transition::T0Plus1 => Level::MPlus1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Transition::T0Minus1 => "T0_minus1",
            Transition::T0Plus1 => "T0_plus1",
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A resonant pulse on one transition. `angle` and `phase` are kept in `[0, 2 pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelRotation {
    transition: Transition,
    angle: f64,
    phase: f64,
}

impl TwoLevelRotation {
    /// Normalizes any finite angle into `[0, 2 pi)`. A net rotation of
    /// exactly `2 pi` (minus the identity on the pair) is rejected.
    pub fn new(transition: Transition, angle: f64, phase: f64) -> Result<Self> {
        if !angle.is_finite() || !phase.is_finite() {
            return Err(Error::Config(format!("non-finite pulse angle {angle} / phase {phase}")));
        }
        let mut angle = angle.rem_euclid(2.0 * TWO_PI);
        let mut phase = phase;
        if angle > TWO_PI {
            angle = 2.0 * TWO_PI - angle;
            phase += PI;
        } else if angle == TWO_PI {
            return Err(Error::Config("a 2 pi rotation is not representable as a pulse".into()));
        }
        let mut phase = phase.rem_euclid(TWO_PI);
        if phase >= TWO_PI {
            phase = 0.0;
        }
        Ok(TwoLevelRotation {
            transition,
            angle,
            phase,
        })
    }

    pub fn transition(&self) -> Transition {
        self.transition
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn matrix(&self) -> Operator {
        rotation_matrix(self)
    }
}

pub fn rotation_matrix(r: &TwoLevelRotation) -> Operator {
    let (s, c) = (r.angle / 2.0).sin_cos();
    let i = Level::M0.index();
    let j = r.transition.other_level().index();
    let e = Complex64::from_polar(1.0, r.phase);
    let mut m = Operator::identity(Dim::Three);
    m.set(i, i, Complex64::new(c, 0.0));
    m.set(j, j, Complex64::new(c, 0.0));
    m.set(j, i, e * s);
    m.set(i, j, -e.conj() * s);
    m
}

/// Pulses in execution order plus the unitary they are meant to implement.
///
/// The optional `readout_pulse` is the final inversion on `m0 <-> m+1`; it is
/// part of the executed sequence but not of the reconstruction check.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pulses: Vec<TwoLevelRotation>,
    readout_pulse: Option<TwoLevelRotation>,
    intended_unitary: Operator,
}

impl PulseSchedule {
    pub fn new(
        pulses: Vec<TwoLevelRotation>,
        readout_pulse: Option<TwoLevelRotation>,
        intended_unitary: Operator,
    ) -> Self {
        PulseSchedule {
            pulses,
            readout_pulse,
            intended_unitary,
        }
    }

    /// Pulses realizing the intended unitary.
    pub fn pulses(&self) -> &[TwoLevelRotation] {
        &self.pulses
    }

    pub fn readout_pulse(&self) -> Option<&TwoLevelRotation> {
        self.readout_pulse.as_ref()
    }

    /// Every pulse in execution order, including the readout pulse.
    pub fn executed(&self) -> impl Iterator<Item = &TwoLevelRotation> {
        self.pulses.iter().chain(self.readout_pulse.iter())
    }

    pub fn intended_unitary(&self) -> &Operator {
        &self.intended_unitary
    }

    /// Product of [`Self::pulses`]; later pulses multiply from the left.
    pub fn product(&self) -> Operator {
        product_of(self.pulses.iter())
    }

    /// Product of every executed pulse.
    pub fn full_product(&self) -> Operator {
        product_of(self.executed())
    }

    /// One `<transition> <angle> <phase>` line per executed pulse.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in self.executed() {
            writeln!(out, "{} {:.12} {:.12}", p.transition, p.angle, p.phase).expect("write to string");
        }
        out
    }
}

fn product_of<'a>(pulses: impl Iterator<Item = &'a TwoLevelRotation>) -> Operator {
    pulses.fold(Operator::identity(Dim::Three), |acc, p| p.matrix() * acc)
}

/// Max entrywise deviation between the pulse product and the intended
/// unitary, minimized over a global phase.
pub fn verify_schedule(s: &PulseSchedule) -> f64 {
    s.product().distance_up_to_phase(&s.intended_unitary)
}

fn readout_pulse() -> TwoLevelRotation {
    TwoLevelRotation::new(Transition::T0Plus1, PI, 0.0).expect("valid")
}

/// `theta_1 = 2 arcsin(sqrt(1 - tan^2 theta))`.
pub fn idp_first_angle(theta: f64) -> Result<f64> {
    let theta = check_theta(theta)?;
    let t = if std::f64::consts::FRAC_PI_4 - theta < 1e-15 {
        1.0
    } else {
        theta.tan()
    };
    Ok(2.0 * (1.0 - t * t).max(0.0).sqrt().min(1.0).asin())
}

/// `theta_1` pulse on `m0 <-> m+1`, then `pi/2` on `m0 <-> m-1`, then the readout pulse.
pub fn compile_idp(theta: f64) -> Result<PulseSchedule> {
    let theta_1 = idp_first_angle(theta)?;
    let pulses = vec![
        TwoLevelRotation::new(Transition::T0Plus1, theta_1, 0.0)?,
        TwoLevelRotation::new(Transition::T0Minus1, FRAC_PI_2, 0.0)?,
    ];
    Ok(PulseSchedule::new(
        pulses,
        Some(readout_pulse()),
        protocols::idp_unitary(theta)?,
    ))
}

/// `+2 theta` (A basis) or `-2 theta` (B basis) on `m0 <-> m-1`, then the readout pulse.
pub fn compile_susd(theta: f64, which_basis: SusdBasis) -> Result<PulseSchedule> {
    let theta = check_theta(theta)?;
    let (s, c) = theta.sin_cos();
    let plus = StateVector::basis(Level::MPlus1, Dim::Three)?;
    let (angle, rows) = match which_basis {
        // |0><a| + |-1><a_perp|
        SusdBasis::A => (2.0 * theta, [[c, -s], [s, c]]),
        // |0><b| - |-1><b_perp|
        SusdBasis::B => (-2.0 * theta, [[c, s], [-s, c]]),
    };
    let intended = Operator::from_bras(&[
        StateVector::from_real(&[rows[0][0], rows[0][1], 0.0])?,
        StateVector::from_real(&[rows[1][0], rows[1][1], 0.0])?,
        plus,
    ])?;
    let pulses = vec![TwoLevelRotation::new(Transition::T0Minus1, angle, 0.0)?];
    Ok(PulseSchedule::new(pulses, Some(readout_pulse()), intended))
}

/// Equal-prior Helstrom: the `pi/2` pulse on `m0 <-> m-1` and the readout
/// pulse. Independent of `theta`.
pub fn compile_helstrom() -> PulseSchedule {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let intended = Operator::from_real_rows(&[&[h, -h, 0.0], &[h, h, 0.0], &[0.0, 0.0, 1.0]]).expect("3x3");
    let pulses = vec![TwoLevelRotation::new(Transition::T0Minus1, FRAC_PI_2, 0.0).expect("valid")];
    PulseSchedule::new(pulses, Some(readout_pulse()), intended)
}

/// Helstrom for arbitrary priors: a single rotation on `m0 <-> m-1` onto the
/// eigenbasis returned by [`protocols::helstrom_basis`].
pub fn compile_helstrom_for(pair: &StatePair) -> Result<PulseSchedule> {
    if pair.has_equal_priors() {
        return Ok(compile_helstrom());
    }
    let (a_prime, b_prime) = protocols::helstrom_basis(pair);
    // a' = (cos f, -sin f)
    let x = a_prime.amplitude(Level::M0).re;
    let y = a_prime.amplitude(Level::MMinus1).re;
    let f = (-y).atan2(x);
    let plus = StateVector::basis(Level::MPlus1, Dim::Three)?;
    let intended = Operator::from_bras(&[a_prime.embed(), b_prime.embed(), plus])?;
    let pulses = vec![TwoLevelRotation::new(Transition::T0Minus1, 2.0 * f, 0.0)?];
    Ok(PulseSchedule::new(pulses, Some(readout_pulse()), intended))
}

/// The `2 theta` preparation pulse taking `|0>` to `|a>` (phase `pi`) or `|b>` (phase 0).
pub fn preparation_pulse(theta: f64, which: Prepared) -> Result<TwoLevelRotation> {
    let theta = check_theta(theta)?;
    let phase = match which {
        Prepared::A => PI,
        Prepared::B => 0.0,
    };
    TwoLevelRotation::new(Transition::T0Minus1, 2.0 * theta, phase)
}

/// One schedule per protocol branch, in branch order.
pub fn compile_protocol(protocol: &Protocol) -> Result<Vec<PulseSchedule>> {
    let theta = protocol.pair().theta();
    Ok(match protocol.kind() {
        ProtocolKind::SusdA => vec![compile_susd(theta, SusdBasis::A)?],
        ProtocolKind::SusdB => vec![compile_susd(theta, SusdBasis::B)?],
        ProtocolKind::SusdRandomized => vec![compile_susd(theta, SusdBasis::A)?, compile_susd(theta, SusdBasis::B)?],
        ProtocolKind::Idp => vec![compile_idp(theta)?],
        ProtocolKind::Helstrom => vec![compile_helstrom_for(protocol.pair())?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::apply_unitary;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    fn eq5() -> Operator {
        let h = FRAC_1_SQRT_2;
        Operator::from_real_rows(&[&[h, -h, 0.0], &[h, h, 0.0], &[0.0, 0.0, 1.0]]).unwrap()
    }

    fn tan(theta: f64) -> f64 {
        if FRAC_PI_4 - theta < 1e-15 {
            1.0
        } else {
            theta.tan()
        }
    }

    fn eq6(theta: f64) -> Operator {
        let t = tan(theta);
        let r = (1.0 - t * t).sqrt();
        Operator::from_real_rows(&[&[t, 0.0, -r], &[0.0, 1.0, 0.0], &[r, 0.0, t]]).unwrap()
    }

    fn eq4(theta: f64) -> Operator {
        let t = tan(theta);
        let r = (1.0 - t * t).max(0.0).sqrt();
        let h = FRAC_1_SQRT_2;
        Operator::from_real_rows(&[&[h * t, -h, -h * r], &[h * t, h, -h * r], &[r, 0.0, t]]).unwrap()
    }

    #[test]
    fn rotation_matrix_examples() {
        let id = rotation_matrix(&TwoLevelRotation::new(Transition::T0Minus1, 0.0, 0.0).unwrap());
        assert_eq!(id, Operator::identity(Dim::Three));

        let half = rotation_matrix(&TwoLevelRotation::new(Transition::T0Minus1, FRAC_PI_2, 0.0).unwrap());
        assert!((half - eq5()).max_abs() < 1e-15);

        let first = idp_first_angle(FRAC_PI_8).unwrap();
        let m = rotation_matrix(&TwoLevelRotation::new(Transition::T0Plus1, first, 0.0).unwrap());
        assert!((m - eq6(FRAC_PI_8)).max_abs() < 1e-12);
    }

    #[test]
    fn negative_angles_fold_into_phase() {
        let neg = TwoLevelRotation::new(Transition::T0Minus1, -0.7, 0.0).unwrap();
        assert!((neg.angle() - 0.7).abs() < 1e-15);
        assert!((neg.phase() - PI).abs() < 1e-15);
        // Same matrix as the real rotation by -0.7.
        let (s, c) = (-0.35f64).sin_cos();
        let want = Operator::from_real_rows(&[&[c, -s, 0.0], &[s, c, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!((neg.matrix() - want).max_abs() < 1e-15);

        let wrapped = TwoLevelRotation::new(Transition::T0Plus1, 3.0 * PI, 0.0).unwrap();
        assert!((wrapped.angle() - PI).abs() < 1e-12);
        assert!(
            (wrapped.matrix() - TwoLevelRotation::new(Transition::T0Plus1, -PI, 0.0).unwrap().matrix()).max_abs()
                < 1e-12
        );
        assert!(TwoLevelRotation::new(Transition::T0Plus1, TWO_PI, 0.0).is_err());
        assert!(TwoLevelRotation::new(Transition::T0Plus1, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn preparation_pulses_produce_the_pair() {
        for theta in [0.0, 0.2, FRAC_PI_8, FRAC_PI_4] {
            let pair = StatePair::equal(theta).unwrap();
            let zero = StateVector::basis(Level::M0, Dim::Three).unwrap();
            for which in [Prepared::A, Prepared::B] {
                let u = preparation_pulse(theta, which).unwrap().matrix();
                let out = apply_unitary(&u, &zero).unwrap();
                let want = pair.state(which).embed();
                for (x, y) in out.amplitudes().iter().zip(want.amplitudes()) {
                    assert!((x - y).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn compile_idp_examples() {
        let s = compile_idp(FRAC_PI_4).unwrap();
        assert!(s.pulses()[0].angle().abs() < 1e-7);
        let s = compile_idp(FRAC_PI_8).unwrap();
        assert!((s.pulses()[0].angle() - 2.287_4).abs() < 1e-4);
        assert!(verify_schedule(&s) <= SCHEDULE_TOL);
        let s = compile_idp(0.0).unwrap();
        assert!((s.pulses()[0].angle() - PI).abs() < 1e-12);
        assert!(verify_schedule(&s) <= SCHEDULE_TOL);
        assert_eq!(s.executed().count(), 3);
        assert!(matches!(compile_idp(0.9), Err(Error::ThetaOutOfRange(_))));
    }

    #[test]
    fn t_factors_reproduce_idp_unitary() {
        for k in 0..100 {
            let theta = FRAC_PI_4 * k as f64 / 99.0;
            let product = eq5() * eq6(theta);
            assert!(product.distance_up_to_phase(&eq4(theta)) < 1e-10, "theta {theta}");
            let s = compile_idp(theta).unwrap();
            assert!(
                verify_schedule(&s) <= SCHEDULE_TOL,
                "theta {theta}: {}",
                verify_schedule(&s)
            );
        }
    }

    #[test]
    fn compile_susd_examples() {
        let s = compile_susd(0.0, SusdBasis::A).unwrap();
        assert!((s.product() - Operator::identity(Dim::Three)).max_abs() < 1e-15);

        let pair = StatePair::equal(FRAC_PI_8).unwrap();
        let s = compile_susd(FRAC_PI_8, SusdBasis::A).unwrap();
        assert!(verify_schedule(&s) <= SCHEDULE_TOL);
        let out = apply_unitary(&s.full_product(), &pair.state(Prepared::A).embed()).unwrap();
        assert!(out.amplitude(Level::MMinus1).norm() < 1e-12);

        let b = compile_susd(FRAC_PI_8, SusdBasis::B).unwrap();
        assert!(verify_schedule(&b) <= SCHEDULE_TOL);
        assert!((b.pulses()[0].angle() - s.pulses()[0].angle()).abs() < 1e-15);
        assert!((b.pulses()[0].phase() - PI).abs() < 1e-15);
        let out = apply_unitary(&b.full_product(), &pair.state(Prepared::B).embed()).unwrap();
        assert!(out.amplitude(Level::MMinus1).norm() < 1e-12);
    }

    #[test]
    fn compile_helstrom_examples() {
        let s = compile_helstrom();
        assert!((s.product() - eq5()).max_abs() < 1e-15);
        assert!(verify_schedule(&s) <= SCHEDULE_TOL);

        let h = FRAC_1_SQRT_2;
        let a_prime = StateVector::from_real(&[h, -h, 0.0]).unwrap();
        let out = apply_unitary(&s.full_product(), &a_prime).unwrap();
        assert!((out.amplitude(Level::MPlus1).norm_sqr() - 1.0).abs() < 1e-12);

        let zero = StateVector::basis(Level::M0, Dim::Three).unwrap();
        let pops = apply_unitary(&s.full_product(), &zero).unwrap().populations();
        assert!((pops[Level::MMinus1.index()] - 0.5).abs() < 1e-12);
        assert!((pops[Level::MPlus1.index()] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn verify_schedule_detects_perturbation() {
        let s = compile_idp(FRAC_PI_8).unwrap();
        let mut pulses = s.pulses().to_vec();
        pulses[1] = TwoLevelRotation::new(Transition::T0Minus1, FRAC_PI_2 + 1e-3, 0.0).unwrap();
        let bent = PulseSchedule::new(pulses, None, *s.intended_unitary());
        assert!(verify_schedule(&bent) > 1e-4);

        let empty = PulseSchedule::new(vec![], None, Operator::identity(Dim::Three));
        assert_eq!(verify_schedule(&empty), 0.0);
    }

    #[test]
    fn compiled_protocols_match_protocol_unitaries() {
        for k in 0..=20 {
            let theta = FRAC_PI_4 * k as f64 / 20.0;
            for prior_a in [0.5, 0.2, 0.85] {
                let pair = StatePair::new(theta, prior_a, 1.0 - prior_a).unwrap();
                for kind in ProtocolKind::ALL {
                    let Ok(protocol) = Protocol::build(kind, pair) else {
                        assert_eq!(kind, ProtocolKind::Idp);
                        continue;
                    };
                    let schedules = compile_protocol(&protocol).unwrap();
                    assert_eq!(schedules.len(), protocol.branches().len());
                    for (sched, branch) in schedules.iter().zip(protocol.branches()) {
                        assert!(verify_schedule(sched) <= SCHEDULE_TOL, "{kind} theta {theta}");
                        let d = sched.full_product().distance_up_to_phase(branch.unitary());
                        assert!(d < 1e-10, "{kind} theta {theta} p_a {prior_a}: {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_matrices_are_unitary() {
        for k in 0..50 {
            let angle = 0.13 * k as f64;
            let phase = 0.29 * k as f64;
            for t in [Transition::T0Minus1, Transition::T0Plus1] {
                let r = TwoLevelRotation::new(t, angle, phase).unwrap();
                assert!(r.angle() >= 0.0 && r.angle() < TWO_PI);
                assert!(r.phase() >= 0.0 && r.phase() < TWO_PI);
                assert!(r.matrix().unitarity_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn text_export_format() {
        let text = compile_idp(FRAC_PI_8).unwrap().to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("T0_plus1 2.287"));
        assert_eq!(lines[1], "T0_minus1 1.570796326795 0.000000000000");
        assert_eq!(lines[2], "T0_plus1 3.141592653590 0.000000000000");
        assert!(text.ends_with('\n'));
    }
}
