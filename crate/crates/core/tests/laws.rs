mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ninfty::families::{close_family, intersection, is_family, union};
use ninfty::group::{all_subgroups, Limits, Subgroup};
use ninfty::realizability::{is_realizable, realizable_closure, FamilySequence};

use common::{random_graph_sequence, tower};

fn pick(subs: &[Subgroup], seed: u64) -> Vec<Subgroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    subs.iter().filter(|_| rand::Rng::gen_bool(&mut rng, 0.2)).cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn union_and_intersection_of_families_are_families(a in any::<u64>(), b in any::<u64>()) {
        let t = tower("S3", 2);
        let ambient = t.ambient(2).unwrap().clone();
        let limits = Limits::default();
        let subs = all_subgroups(&ambient, &limits).unwrap();
        let fa = close_family(&ambient, pick(&subs, a), &limits).unwrap();
        let fb = close_family(&ambient, pick(&subs, b), &limits).unwrap();
        for f in [union(&fa, &fb).unwrap(), intersection(&fa, &fb).unwrap()] {
            prop_assert!(is_family(&ambient, f.iter(), &limits).unwrap().is_ok());
        }
    }

    #[test]
    fn realizable_closure_is_a_closure(a in any::<u64>(), b in any::<u64>()) {
        let t = tower("C4", 3);
        let s = random_graph_sequence(&t, &mut ChaCha8Rng::seed_from_u64(a));
        let extra = random_graph_sequence(&t, &mut ChaCha8Rng::seed_from_u64(b));
        let seeds: Vec<Vec<Subgroup>> =
            s.families().iter().zip(extra.families()).map(|(x, y)| x.iter().chain(y.iter()).cloned().collect()).collect();
        let bigger = FamilySequence::from_seeds(t.clone(), seeds).unwrap();
        let rs = realizable_closure(&s).unwrap();
        prop_assert!(s.is_subsequence(&rs).unwrap());
        prop_assert_eq!(&realizable_closure(&rs).unwrap(), &rs);
        prop_assert!(rs.is_subsequence(&realizable_closure(&bigger).unwrap()).unwrap());
        prop_assert!(is_realizable(&rs).unwrap().is_realizable());
        // realizable sequences are exactly the fixpoints
        prop_assert_eq!(is_realizable(&s).unwrap().is_realizable(), rs == s);
    }
}
