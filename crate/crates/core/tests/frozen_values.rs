// Reference numbers below were produced by a separate 40-digit path
// enumeration of the readout model and by direct formula evaluation.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use qsd_core::protocols::{ideal_stats, Protocol, ProtocolKind, StatePair};
use qsd_core::pulse::{compile_idp, idp_first_angle};
use qsd_core::readout::{exact_rates, Experiment, NoiseProfile, Rates};
use qsd_core::{helstrom_bound, Outcome, Prepared};

const TOL: f64 = 1e-12;

fn rates(kind: ProtocolKind, noise: NoiseProfile) -> Rates {
    let protocol = Protocol::build(kind, StatePair::equal(FRAC_PI_8).unwrap()).unwrap();
    exact_rates(&Experiment::new(protocol, noise).unwrap())
}

fn assert_rates(r: Rates, want: [f64; 5]) {
    let got = [r.p_corr, r.p_err, r.p_inconclusive, r.p_noresult, r.p_multipositive];
    for (name, (g, w)) in ["corr", "err", "inconclusive", "noresult", "multi"]
        .iter()
        .zip(got.iter().zip(want))
    {
        assert!((g - w).abs() < TOL, "{name}: {g} vs {w}");
    }
}

#[test]
fn starting_profile_rates_at_pi_over_8() {
    let guess = NoiseProfile::initial_guess;
    assert_rates(
        rates(ProtocolKind::SusdRandomized, guess()),
        [0.212571634, 0.001257237, 0.651105, 0.135066129, 0.003001629],
    );
    assert_rates(
        rates(ProtocolKind::Idp, guess()),
        [
            0.2407230913494112,
            0.0030548814520810677,
            0.674_965_533_140_665_7,
            0.081_256_494_057_842_08,
            0.064_480_417_160_871,
        ],
    );
    assert_rates(
        rates(ProtocolKind::Helstrom, guess()),
        [
            0.732_176_452_892_841_3,
            0.128_576_815_107_158_7,
            0.0,
            0.139246732,
            0.002872332,
        ],
    );
}

#[test]
fn idp_with_certain_init_failure() {
    let noise = NoiseProfile::zero().with_params([1.0, 0.9, 0.1, 0.0, 0.0]);
    assert_rates(rates(ProtocolKind::Idp, noise), [0.0095, 0.0095, 0.9, 0.081, 0.172]);
}

#[test]
fn closed_forms() {
    let pair = StatePair::equal(FRAC_PI_8).unwrap();
    assert!((pair.overlap() - FRAC_PI_4.cos()).abs() < TOL);
    assert!((helstrom_bound(&pair) - 0.14644660940672624).abs() < TOL);
    let skewed = StatePair::new(FRAC_PI_8, 0.9, 0.1).unwrap();
    assert!((helstrom_bound(&skewed) - 0.047_230_743_093_129_17).abs() < TOL);
    assert!((idp_first_angle(FRAC_PI_8).unwrap() - 2.287435480804841).abs() < TOL);
}

#[test]
fn ideal_table_at_pi_over_8() {
    let cases = [
        (
            ProtocolKind::Idp,
            [0.29289321881345254, 0.0, std::f64::consts::FRAC_1_SQRT_2],
        ),
        (ProtocolKind::SusdRandomized, [0.25, 0.0, 0.75]),
        (
            ProtocolKind::Helstrom,
            [0.853_553_390_593_273_7, 0.14644660940672624, 0.0],
        ),
    ];
    for (kind, [corr, err, inc]) in cases {
        let p = Protocol::build(kind, StatePair::equal(FRAC_PI_8).unwrap()).unwrap();
        let s = ideal_stats(&p).unwrap();
        assert!((s.p_corr - corr).abs() < TOL, "{kind}");
        assert!((s.p_err - err).abs() < TOL, "{kind}");
        assert!((s.p_inconclusive - inc).abs() < TOL, "{kind}");
    }
    let idp = Protocol::build(ProtocolKind::Idp, StatePair::equal(FRAC_PI_8).unwrap()).unwrap();
    let given_a = idp.conditional(Prepared::A).unwrap();
    assert!((given_a.get(Outcome::Inconclusive) - std::f64::consts::FRAC_1_SQRT_2).abs() < TOL);
    assert!(given_a.get(Outcome::B).abs() < TOL);
}

#[test]
fn idp_schedule_text_is_stable() {
    let text = compile_idp(FRAC_PI_8).unwrap().to_text();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines,
        [
            "T0_plus1 2.287435480805 0.000000000000",
            "T0_minus1 1.570796326795 0.000000000000",
            "T0_plus1 3.141592653590 0.000000000000",
        ]
    );
}
