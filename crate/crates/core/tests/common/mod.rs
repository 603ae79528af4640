#![allow(dead_code)]
pub mod oracle;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use ninfty::graph::{all_graph_subgroups, ProductTower};
use ninfty::group::{FiniteGroup, Limits, Permutation, Subgroup};
use ninfty::io::{canonical, families_json, load_group};
use ninfty::realizability::{enumerate_realizable, realizable_closure, Coverage, FamilySequence};

use oracle::{canonical_sort, Oracle};

/// One group of each isomorphism type of order at most 8.
pub const GROUPS_UP_TO_8: &[&str] =
    &["C1", "C2", "C3", "C4", "K4", "C5", "C6", "S3", "C7", "C8", "C2xC4", "C2xC2xC2", "D4", "Q8.json"];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

/// A builtin spec, or a table file under `tests/fixtures` when it ends in `.json`.
pub fn group(spec: &str) -> Arc<FiniteGroup> {
    let arg = if spec.ends_with(".json") { fixture(spec).display().to_string() } else { spec.to_string() };
    Arc::new(load_group(&arg, None, &Limits::default()).unwrap())
}

pub fn tower(spec: &str, max_arity: usize) -> Arc<ProductTower> {
    Arc::new(ProductTower::new(group(spec), max_arity, Limits::default()).unwrap())
}

pub fn engine_enumeration_json(tower: &Arc<ProductTower>) -> ninfty::Result<String> {
    let seqs = enumerate_realizable(tower, &Coverage::Full)?;
    let docs = seqs.iter().map(families_json).collect::<ninfty::Result<Vec<_>>>()?;
    Ok(canonical(&Value::Array(docs)))
}

/// The oracle's enumeration in the engine's file format.
pub fn oracle_enumeration_json(oracle: &Oracle) -> String {
    let mut seqs: Vec<_> = oracle.enumerate(&oracle.subgroups).iter().map(|s| oracle.materialize(s)).collect();
    canonical_sort(&mut seqs);
    let docs: Vec<Value> = seqs
        .iter()
        .map(|seq| {
            let levels: Vec<Value> = seq
                .iter()
                .enumerate()
                .map(|(n, family)| {
                    let sym = oracle.levels[n].sym_order;
                    let members: Vec<Value> = family
                        .iter()
                        .map(|elems| {
                            let pairs: Vec<Value> = elems
                                .iter()
                                .map(|&z| json!([z / sym, Permutation::from_lex_rank(n, z % sym).images()]))
                                .collect();
                            json!({ "elements": pairs })
                        })
                        .collect();
                    Value::Array(members)
                })
                .collect();
            Value::Array(levels)
        })
        .collect();
    canonical(&Value::Array(docs))
}

/// The oracle's view of an engine sequence.
pub fn to_oracle(oracle: &Oracle, seq: &FamilySequence) -> Vec<BTreeSet<usize>> {
    seq.families()
        .iter()
        .enumerate()
        .map(|(n, f)| f.iter().map(|s| oracle.levels[n].lookup[s.elements()]).collect())
        .collect()
}

/// Random graph seeds at each level, closed into families.
pub fn random_graph_sequence(tower: &Arc<ProductTower>, rng: &mut impl Rng) -> FamilySequence {
    let density = rng.gen_range(0.05..0.5);
    let seeds: Vec<Vec<Subgroup>> = (0..=tower.max_arity())
        .map(|n| {
            all_graph_subgroups(tower, n)
                .unwrap()
                .into_iter()
                .filter(|_| rng.gen_bool(density))
                .map(|(_, s)| s)
                .collect()
        })
        .collect();
    FamilySequence::from_seeds(tower.clone(), seeds).unwrap()
}

/// A mix of arbitrary, realizable and nearly realizable sequences.
pub fn sample_sequences(tower: &Arc<ProductTower>, count: usize, rng: &mut impl Rng) -> Vec<FamilySequence> {
    (0..count)
        .map(|i| {
            let seq = random_graph_sequence(tower, rng);
            match i % 3 {
                0 => seq,
                1 => realizable_closure(&seq).unwrap(),
                _ => drop_one_maximal(&realizable_closure(&seq).unwrap(), rng),
            }
        })
        .collect()
}

/// Removes one maximal member, together with its conjugates, from a random level.
pub fn drop_one_maximal(seq: &FamilySequence, rng: &mut impl Rng) -> FamilySequence {
    let tower = seq.tower_arc().clone();
    let n = rng.gen_range(0..=tower.max_arity());
    let family = &seq.families()[n];
    let maximal: Vec<&Subgroup> = family
        .iter()
        .filter(|s| !family.iter().any(|t| t != *s && s.is_subgroup_of(t)))
        .collect();
    let Some(&victim) = maximal.choose(rng) else {
        return seq.clone();
    };
    let ambient = tower.ambient(n).unwrap();
    let conjugates: BTreeSet<Subgroup> =
        (0..ambient.order()).map(|g| ninfty::group::conjugate(ambient, victim, g)).collect();
    let seeds: Vec<Vec<Subgroup>> = seq
        .families()
        .iter()
        .enumerate()
        .map(|(m, f)| f.iter().filter(|s| m != n || !conjugates.contains(s)).cloned().collect())
        .collect();
    FamilySequence::from_seeds(tower, seeds).unwrap()
}

/// Every subset containing the identity that is closed under the product.
pub fn brute_force_subgroups(g: &FiniteGroup) -> BTreeSet<Vec<usize>> {
    let n = g.order();
    let e = g.identity();
    let others: Vec<usize> = (0..n).filter(|&x| x != e).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << others.len()) {
        let mut member = vec![false; n];
        member[e] = true;
        for (i, &x) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                member[x] = true;
            }
        }
        let elems: Vec<usize> = (0..n).filter(|&x| member[x]).collect();
        if elems.iter().all(|&a| elems.iter().all(|&b| member[g.mul(a, b)])) {
            out.insert(elems);
        }
    }
    out
}

/// Number of maps `source -> target` preserving products, by trying every function.
pub fn brute_force_hom_count(source: &FiniteGroup, target: &FiniteGroup) -> usize {
    let (s, t) = (source.order(), target.order());
    let mut images = vec![0usize; s];
    let mut count = 0;
    loop {
        if (0..s).all(|a| (0..s).all(|b| images[source.mul(a, b)] == target.mul(images[a], images[b]))) {
            count += 1;
        }
        let mut i = 0;
        while i < s {
            images[i] += 1;
            if images[i] < t {
                break;
            }
            images[i] = 0;
            i += 1;
        }
        if i == s {
            return count;
        }
    }
}
