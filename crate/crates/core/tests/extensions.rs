mod common;

use common::instances::{affine_maximizer, random_product, random_zero_substitutable, typespaces};
use mexlab::extensions::{
    extend_ssf, extend_zero, hull_membership, materialize, sample_witnesses, ExtensionError,
    HullPoint, QueryEntry, SsfExtension, ZeroExtension,
};
use mexlab::fixtures::build_det_fixture;
use mexlab::incentives::{synthesize_ir_payments, synthesize_payments, verify_dsic, verify_ir};
use mexlab::model::{is_zero_substitutable, PaymentRule, TypeVector};
use mexlab::rational::{q, qi};
use mexlab::ratlp::{verify_outcome, LpOutcome};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn zero_extension_keeps_dsic_and_ir(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let fs = random_zero_substitutable(&mut rng, m, n);
        prop_assert!(is_zero_substitutable(&fs).is_ok());
        let ts = typespaces(&mut rng, m, n, 3);
        let inst = affine_maximizer(&mut rng, fs, ts);
        let Ok(pay) = synthesize_ir_payments(&inst) else { return Ok(()) };
        let ext = ZeroExtension::new(&inst, &pay).unwrap();
        let ws: Vec<Vec<HullPoint>> =
            (0..n).map(|i| sample_witnesses(&inst.typespaces[i], i, 3, &mut rng)).collect();
        let (aug, aug_pay) = materialize(&inst, &ws, |q| ext.query(q)).unwrap();
        prop_assert!(verify_dsic(&aug, &aug_pay).is_ok());
        prop_assert!(verify_ir(&aug, &aug_pay).is_ok());
    }

    #[test]
    fn swap_extension_keeps_dsic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let fs = random_product(&mut rng, m, n);
        let ts = typespaces(&mut rng, m, n, 3);
        let inst = affine_maximizer(&mut rng, fs, ts);
        let pay = synthesize_payments(&inst).unwrap();
        let ext = SsfExtension::new(&inst, &pay).unwrap();
        prop_assert!(ext.swaps().verify(&inst.feasible));
        let ws: Vec<Vec<HullPoint>> =
            (0..n).map(|i| sample_witnesses(&inst.typespaces[i], i, 3, &mut rng)).collect();
        let (aug, aug_pay) = materialize(&inst, &ws, |q| ext.query(q)).unwrap();
        prop_assert!(verify_dsic(&aug, &aug_pay).is_ok());
    }

    /// On original types both constructions return the mechanism itself.
    #[test]
    fn extensions_agree_on_original_profiles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = (rng.gen_range(1..=2), rng.gen_range(1..=3));
        let fs = random_product(&mut rng, m, n);
        let ts = typespaces(&mut rng, m, n, 3);
        let inst = affine_maximizer(&mut rng, fs, ts);
        let Ok(pay) = synthesize_ir_payments(&inst) else { return Ok(()) };
        for (idx, profile) in inst.profiles().iter().enumerate() {
            let query: Vec<QueryEntry> = profile.iter().map(|t| QueryEntry::Original(*t)).collect();
            let expected = (inst.dist(idx), &pay.entries[idx]);
            let ssf = extend_ssf(&inst, &pay, &query).unwrap();
            prop_assert_eq!((&ssf.dist, &ssf.payments), expected);
            if is_zero_substitutable(&inst.feasible).is_ok() {
                let zero = extend_zero(&inst, &pay, &query).unwrap();
                prop_assert_eq!((&zero.dist, &zero.payments), expected);
            }
        }
    }

    #[test]
    fn hull_membership_certifies_both_ways(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let space = common::instances::random_types(&mut rng, m, k);
        let point = TypeVector((0..m).map(|_| q(rng.gen_range(0..=8), rng.gen_range(1..=4))).collect());
        match hull_membership(&point, &space, 0) {
            Ok(h) => {
                prop_assert!(h.validate(&space).is_ok());
                prop_assert_eq!(h.vector(&space), point);
            }
            Err(nih) => {
                let lp = mexlab::extensions::hull_lp(&point, &space);
                let checked = verify_outcome(&lp, &LpOutcome::Infeasible { farkas: nih.farkas });
                prop_assert!(checked.is_ok());
            }
        }
    }
}

#[test]
fn det_fixture_fails_both_preconditions() {
    let inst = build_det_fixture();
    let pay = inst.payments.clone().unwrap();
    let q = [QueryEntry::Original(0), QueryEntry::Original(0)];
    assert!(matches!(
        extend_zero(&inst, &pay, &q),
        Err(ExtensionError::NotZeroSubstitutable(_))
    ));
    assert!(matches!(
        extend_ssf(&inst, &pay, &q),
        Err(ExtensionError::NoSwap(_))
    ));
}

#[test]
fn non_dsic_input_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    loop {
        let fs = random_product(&mut rng, 2, 1);
        let ts = typespaces(&mut rng, 2, 1, 3);
        let inst = affine_maximizer(&mut rng, fs, ts);
        let pay = synthesize_payments(&inst).unwrap();
        let mut bad = pay.entries.clone();
        let Some(t) = (0..bad.len()).find(|t| {
            let mut trial = bad.clone();
            trial[*t][0] += qi(100);
            verify_dsic(&inst, &PaymentRule { entries: trial }).is_err()
        }) else {
            continue;
        };
        bad[t][0] += qi(100);
        let bad = PaymentRule { entries: bad };
        let q = [QueryEntry::Original(0)];
        assert!(matches!(
            extend_ssf(&inst, &bad, &q),
            Err(ExtensionError::NotDsic(_))
        ));
        break;
    }
}
