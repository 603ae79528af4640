mod common;

use std::collections::BTreeSet;

use ninfty::group::{all_subgroups, conjugacy_classes, conjugate, homomorphisms, Limits};

use common::{brute_force_hom_count, brute_force_subgroups, group};

#[test]
fn subgroups_of_small_groups_match_brute_force() {
    for spec in ["C1", "C2", "C6", "C9", "C12", "K4", "S3", "D4", "D5", "Q8.json", "A4.json", "C2xC2xC2"] {
        let g = group(spec);
        let found: BTreeSet<Vec<usize>> =
            all_subgroups(&g, &Limits::default()).unwrap().iter().map(|s| s.elements().to_vec()).collect();
        assert_eq!(found, brute_force_subgroups(&g), "{spec}");
    }
}

#[test]
fn known_subgroup_counts() {
    for (spec, count) in [("S4", 30), ("A4.json", 10), ("Q8.json", 6), ("D4", 10), ("C2xC2xC2", 16), ("C12", 6)] {
        assert_eq!(all_subgroups(&group(spec), &Limits::default()).unwrap().len(), count, "{spec}");
    }
}

#[test]
fn conjugacy_classes_are_orbits() {
    for spec in ["S3", "D4", "A4.json", "S4"] {
        let g = group(spec);
        let subs = all_subgroups(&g, &Limits::default()).unwrap();
        let classes = conjugacy_classes(&g, &subs);
        assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), subs.len());
        for class in &classes {
            let orbit: BTreeSet<_> = (0..g.order()).map(|x| conjugate(&g, &subs[class[0]], x)).collect();
            let listed: BTreeSet<_> = class.iter().map(|&i| subs[i].clone()).collect();
            assert_eq!(orbit, listed, "{spec}");
        }
    }
}

#[test]
fn homomorphism_counts_match_brute_force() {
    let specs = ["C1", "C2", "C3", "C4", "K4", "S3", "C5", "C6"];
    for s in specs {
        for t in specs {
            let (s, t) = (group(s), group(t));
            assert_eq!(homomorphisms(&s, &t).len(), brute_force_hom_count(&s, &t), "{} -> {}", s.label(), t.label());
        }
    }
    // |Hom(Q8, S3)| = 1 + 3*3 and |Hom(S3, S3)| = 10
    assert_eq!(homomorphisms(&group("Q8.json"), &group("S3")).len(), 10);
    assert_eq!(homomorphisms(&group("S3"), &group("S3")).len(), 10);
}

#[test]
fn q8_table_is_the_quaternion_group() {
    let q8 = group("Q8.json");
    let mut orders: Vec<usize> = (0..8).map(|x| q8.element_order(x)).collect();
    orders.sort_unstable();
    assert_eq!(orders, [1, 2, 4, 4, 4, 4, 4, 4]);
    let a4 = group("A4.json");
    let mut orders: Vec<usize> = (0..12).map(|x| a4.element_order(x)).collect();
    orders.sort_unstable();
    assert_eq!(orders, [1, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3]);
}
