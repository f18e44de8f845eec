mod common;

use common::instances::{affine_maximizer, random_zero_substitutable, typespaces};
use mexlab::certificate::Certificate;
use mexlab::extensions::{sample_witnesses, HullPoint};
use mexlab::fixtures::{build_det_fixture, build_rand_fixture};
use mexlab::incentives::{synthesize_payments, verify_dsic};
use mexlab::inextensibility::{
    augment, check_randomized_extension, default_witness, enumerate_deterministic_extensions,
    verify_extendable, AugmentError, EnumerationError, ExtensionVerdict, WitnessFixture,
    DEFAULT_CAP,
};
use mexlab::rational::q;
use mexlab::ratlp::{verify_outcome, LpOutcome};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn not_extendable(aug: &mexlab::inextensibility::AugmentedInstance) -> bool {
    let (ext, verdict) = check_randomized_extension(aug).unwrap();
    match verdict {
        ExtensionVerdict::NotExtendable { farkas } => {
            verify_outcome(
                &ext.lp,
                &LpOutcome::Infeasible {
                    farkas: farkas.clone(),
                },
            )
            .unwrap();
            assert!(Certificate::farkas(&ext.lp, &farkas).check_farkas(&ext.lp));
            true
        }
        v @ ExtensionVerdict::Extendable { .. } => {
            assert!(verify_extendable(aug, &v));
            false
        }
    }
}

#[test]
fn symmetric_witness_is_also_blocked() {
    let aug = augment(
        &build_rand_fixture(),
        &default_witness(WitnessFixture::Rand, true),
    )
    .unwrap();
    assert!(not_extendable(&aug));
    let aug = augment(
        &build_det_fixture(),
        &default_witness(WitnessFixture::Det, true),
    )
    .unwrap();
    let e = enumerate_deterministic_extensions(&aug, DEFAULT_CAP).unwrap();
    assert!(e.passing.is_empty());
}

#[test]
fn det_fixture_admits_a_randomized_extension() {
    let aug = augment(
        &build_det_fixture(),
        &default_witness(WitnessFixture::Det, false),
    )
    .unwrap();
    assert!(!not_extendable(&aug));
}

/// More witnesses only add constraints.
#[test]
fn adding_witnesses_keeps_the_obstruction() {
    let inst = build_rand_fixture();
    let mut ws = default_witness(WitnessFixture::Rand, false);
    let mut c = vec![q(0, 1); 8];
    c[0] = q(1, 2);
    c[4] = q(1, 2);
    ws[1].push(HullPoint::new(1, c));
    let aug = augment(&inst, &ws).unwrap();
    assert_eq!(aug.unknown.len(), 9 * 9 - 8 * 8);
    assert!(not_extendable(&aug));
}

#[test]
fn cap_and_duplicate_errors() {
    let inst = build_det_fixture();
    let ws = default_witness(WitnessFixture::Det, false);
    let aug = augment(&inst, &ws).unwrap();
    assert_eq!(
        enumerate_deterministic_extensions(&aug, 1000),
        Err(EnumerationError::CapExceeded {
            required: 65536,
            cap: 1000
        })
    );
    let mut dup = ws.clone();
    dup[0].push(HullPoint::new(0, vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)]));
    assert!(matches!(
        augment(&inst, &dup),
        Err(AugmentError::Duplicate { agent: 0, index: 1 })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    /// A passing deterministic assignment is in particular a randomized
    /// extension, and every rejection certificate checks out.
    #[test]
    fn deterministic_success_implies_randomized_success(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=2);
        let fs = random_zero_substitutable(&mut rng, m, 2);
        let ts = typespaces(&mut rng, m, 2, 2);
        let inst = affine_maximizer(&mut rng, fs, ts);
        let agent = rng.gen_range(0..2);
        let mut ws = vec![Vec::new(), Vec::new()];
        ws[agent] = sample_witnesses(&inst.typespaces[agent], agent, 1, &mut rng);
        ws[agent].retain(|h| inst.typespaces[agent].position(&h.vector(&inst.typespaces[agent])).is_none());
        ws[agent].truncate(1);
        let aug = augment(&inst, &ws).unwrap();
        let Ok(e) = enumerate_deterministic_extensions(&aug, 1 << 14) else { return Ok(()) };
        for (i, v) in e.verdicts.iter().enumerate() {
            let filled = aug.deterministic_instance(&e.assignment(i as u64));
            match v {
                Some(c) => prop_assert!(e.certificates[*c as usize].verify(&filled)),
                None => {
                    let pay = synthesize_payments(&filled).unwrap();
                    prop_assert!(verify_dsic(&filled, &pay).is_ok());
                }
            }
        }
        if !e.passing.is_empty() {
            prop_assert!(!not_extendable(&aug));
        }
    }
}
