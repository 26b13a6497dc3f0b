use std::collections::BTreeMap;
use std::sync::Arc;

use num::rational::BigRational;
use num::Zero;
use proptest::prelude::*;

use islab_core::aixi::{aixi_policy, WeightedFamily};
use islab_core::bits::bs;
use islab_core::complexity::cache;
use islab_core::cybernetic::{
    agent_set, echo, env_set_b, env_set_d, optimal_policy, optimal_value, value, Alphabet, Kernel,
    Policy, Signature, TableEnvironment,
};
use islab_core::{
    algorithmic_mass, decode_pair, decode_set, encode_pair, encode_set, BitString, Budget, Cache,
    ComplexityModel, Context, ExactBounded, LevinBounded, Player, Quantity,
};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn bits(max: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..=max).prop_map(BitString::from_bits)
}

/// A history-dependent binary environment over three cycles; each row's
/// probability of perception 1 is `quarters[i] / 4`.
fn table_env(quarters: &[u8]) -> TableEnvironment {
    let mut table = BTreeMap::new();
    let mut it = quarters.iter().cycle();
    for len in [1usize, 3, 5] {
        for key in 0..1u64 << len {
            let k: Vec<usize> = (0..len).rev().map(|b| ((key >> b) & 1) as usize).collect();
            let p = r(*it.next().unwrap() as i64, 4);
            table.insert(k, vec![r(1, 1) - &p, p]);
        }
    }
    TableEnvironment::new("random", Signature::binary(), Kernel::History(table)).unwrap()
}

fn quarters() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=4, 1..=42)
}

#[test]
fn mass_of_empty_output_at_six_bits() {
    // the empty string has 17/32 mass at L=6, T=100; the sum exceeds what a
    // prefix-free machine could reach because programs are not self-delimiting
    let b = Budget::new(6, 100).unwrap();
    assert_eq!(algorithmic_mass(&bs(""), &b), r(17, 32));
    assert_eq!(algorithmic_mass(&bs(""), &Budget::new(9, 100).unwrap()), r(255, 256));
}

#[test]
fn conditional_pin() {
    let model = ExactBounded::new(Budget::new(9, 100).unwrap());
    assert_eq!(model.complexity(&bs("0"), &Context::single(bs("10101"))), Quantity::int(6));
}

#[test]
fn persistent_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let b = Budget::new(9, 100).unwrap();
    let targets: Vec<BitString> = ["", "0", "1", "01"].iter().map(|s| bs(s)).collect();
    let first: Vec<Quantity> = {
        let c = Arc::new(Cache::open(dir.path()).unwrap());
        let plain = ExactBounded::with_cache(b, c.clone());
        let levin = LevinBounded::with_cache(b, c.clone());
        targets
            .iter()
            .flat_map(|t| [plain.complexity(t, &Context::empty()), levin.complexity(t, &Context::empty())])
            .collect()
    };
    let reopened = Arc::new(Cache::open(dir.path()).unwrap());
    assert_eq!(reopened.len(), 2 * targets.len());
    let plain = ExactBounded::with_cache(b, reopened.clone());
    let levin = LevinBounded::with_cache(b, reopened.clone());
    let second: Vec<Quantity> = targets
        .iter()
        .flat_map(|t| [plain.complexity(t, &Context::empty()), levin.complexity(t, &Context::empty())])
        .collect();
    assert_eq!(first, second);
    assert_eq!(reopened.len(), 2 * targets.len());
    let report = cache::verify(dir.path()).unwrap();
    assert!(report.ok());
    assert_eq!(report.checked, 2 * targets.len());
    assert_eq!(cache::stats(dir.path()).unwrap().entries["levin"], targets.len());
}

#[test]
fn mixture_agent_on_singleton_family_is_the_optimal_agent() {
    for m in 1..=4 {
        let fam = WeightedFamily::equal(vec![echo()]).unwrap();
        assert_eq!(aixi_policy(&fam, m).unwrap(), optimal_policy(&echo(), m).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_and_set_codes_round_trip(x in bits(12), y in bits(12), z in bits(6)) {
        prop_assert_eq!(decode_pair(&encode_pair(&x, &y)).unwrap(), (x.clone(), y.clone()));
        let code = encode_set([&x, &y, &z]);
        let mut sorted = vec![x, y, z];
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(decode_set(&code, sorted.len()).unwrap(), sorted);
    }

    #[test]
    fn complexity_never_rises_with_budget(x in bits(3), l in 3u32..9, t in 10u64..120) {
        let small = Budget::new(l, t).unwrap();
        let large = Budget::new(l + 1, t * 2).unwrap();
        let ctx = Context::empty();
        let a = ExactBounded::new(small).complexity(&x, &ctx);
        let b = ExactBounded::new(large).complexity(&x, &ctx);
        prop_assert!(b.le(&a), "{} then {}", a, b);
        let a = LevinBounded::new(small).complexity(&x, &ctx);
        let b = LevinBounded::new(large).complexity(&x, &ctx);
        prop_assert!(b.le(&a), "{} then {}", a, b);
    }

    #[test]
    fn threshold_sets_shrink_as_tau_grows(qs in quarters(), m in 1usize..=3, lo in 0i64..8, step in 0i64..8) {
        let env = table_env(&qs);
        let (t1, t2) = (r(lo, 4), r(lo + step, 4));
        let b1 = env_set_b(&env, m, &t1).unwrap();
        let b2 = env_set_b(&env, m, &t2).unwrap();
        prop_assert!(b2.is_subset(&b1));
        match (env_set_d(&env, m, &t1), env_set_d(&env, m, &t2)) {
            (Ok(d1), Ok(d2)) => {
                prop_assert!(d2.is_subset(&d1));
                // every D member lies in the support, as do all B members at τ = 0
                prop_assert!(d1.is_subset(&env_set_b(&env, m, &BigRational::zero()).unwrap()));
            }
            (Err(_), Err(_)) => prop_assert!(optimal_value(&env, m, &[]).unwrap().is_zero()),
            _ => prop_assert!(false, "D defined for one threshold only"),
        }
    }

    #[test]
    fn no_policy_beats_the_optimum(qs in quarters(), m in 1usize..=3, seed in any::<u64>()) {
        let env = table_env(&qs);
        let policy = Policy::from_fn(Alphabet::binary(), Alphabet::binary(), m, |xs| {
            let key = xs.iter().fold(seed, |h, &x| h.rotate_left(7) ^ (x as u64 + 1));
            (key & 1) as usize
        }).unwrap();
        let v = value(&policy, &env, m).unwrap();
        let best = optimal_value(&env, m, &[]).unwrap();
        prop_assert!(v <= best);
        let opt = optimal_policy(&env, m).unwrap();
        prop_assert_eq!(value(&opt, &env, m).unwrap(), best);
        prop_assert_eq!(agent_set(&policy, m).unwrap().len(), 1 << m);
    }

    #[test]
    fn mixture_value_bounded_by_member_optima(a in quarters(), b in quarters(), w in 1i64..8, m in 1usize..=3) {
        let fam = WeightedFamily::new(vec![table_env(&a), table_env(&b)], Some(vec![r(w, 8), r(8 - w, 8)])).unwrap();
        let p = aixi_policy(&fam, m).unwrap();
        let mix = value(&p, &fam.mixture(), m).unwrap();
        let blend: BigRational = fam.members().iter().zip(fam.weights())
            .map(|(e, w)| w * value(&p, e, m).unwrap()).sum();
        let ceiling: BigRational = fam.members().iter().zip(fam.weights())
            .map(|(e, w)| w * optimal_value(e, m, &[]).unwrap()).sum();
        prop_assert_eq!(&mix, &blend);
        prop_assert!(mix <= ceiling);
        prop_assert_eq!(mix, optimal_value(&fam.mixture(), m, &[]).unwrap());
    }

    #[test]
    fn intersection_is_commutative_and_contained(xs in prop::collection::vec(0u64..16, 0..16), ys in prop::collection::vec(0u64..16, 0..16)) {
        let a = Player::new(4, xs.iter().map(|&v| BitString::from_uint(v, 4))).unwrap();
        let b = Player::new(4, ys.iter().map(|&v| BitString::from_uint(v, 4))).unwrap();
        let ab = a.intersect(&b).unwrap();
        prop_assert_eq!(&ab, &b.intersect(&a).unwrap());
        prop_assert!(ab.is_subset(&a) && ab.is_subset(&b));
        prop_assert_eq!(a.interacts(&b).unwrap(), !ab.is_empty());
    }
}
