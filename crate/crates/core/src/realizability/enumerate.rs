//! Enumeration of realizable sequences, deciding one arity at a time.
//!
//! A candidate level is a union of the forced `H x 1` subgroups with a
//! down-closed set of conjugacy classes of graph subgroups. Before listing
//! candidates for level `L`, the classes that level-`L` data must contain
//! (images of decompositions whose inputs are all below `L`) and the classes
//! that would break a containment at a lower arity are computed; survivors
//! are checked against every decomposition whose highest referenced level is `L`.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use super::wreath::{scan, scan_order, GraphIndex};
use super::{Coverage, FamilySequence};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::graph::ProductTower;
use crate::group::conjugate;

/// Default bound on partial sequences kept alive during the search.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

/// The covered graph subgroups at one arity, with their class structure.
struct Universe {
    /// `(subgroup id, ρ images)`, ordered by subgroup id then `ρ`.
    members: Vec<(usize, Vec<usize>)>,
    lookup: HashMap<(usize, Vec<usize>), usize>,
    forced: Vec<usize>,
    /// Non-forced conjugacy classes, ordered by representative.
    classes: Vec<Class>,
    class_of: Vec<Option<usize>>,
}

struct Class {
    members: Vec<usize>,
    /// Classes of proper subgroups of the representative.
    below: Vec<usize>,
}

impl Universe {
    fn build(tower: &ProductTower, n: usize, covered: &[bool]) -> Result<Self> {
        let mut members = Vec::new();
        for (h, &ok) in covered.iter().enumerate() {
            if ok {
                for rho in tower.homs(h, n) {
                    members.push((h, rho.clone()));
                }
            }
        }
        let lookup: HashMap<(usize, Vec<usize>), usize> =
            members.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let forced: Vec<usize> = (0..members.len()).filter(|&i| members[i].1.iter().all(|&r| r == 0)).collect();

        let ambient = tower.ambient(n)?;
        let mut class_of: Vec<Option<usize>> = vec![None; members.len()];
        let mut classes: Vec<Class> = Vec::new();
        for i in 0..members.len() {
            if class_of[i].is_some() || forced.contains(&i) {
                continue;
            }
            let gamma = tower.graph_raw(n, members[i].0, &members[i].1);
            let mut orbit = Vec::new();
            for z in 0..ambient.order() {
                let c = conjugate(ambient, &gamma, z);
                let (h, rho) = tower.split_graph(n, &c).expect("conjugate of a graph is a graph");
                let j = *lookup
                    .get(&(h, rho))
                    .ok_or_else(|| Error::Input("coverage family is not closed under conjugation".into()))?;
                if class_of[j].is_none() {
                    class_of[j] = Some(classes.len());
                    orbit.push(j);
                }
            }
            orbit.sort_unstable();
            classes.push(Class { members: orbit, below: Vec::new() });
        }
        // Representatives are the smallest member; order classes by subgroup
        // size so that every class comes after the classes below it.
        let mut order: Vec<usize> = (0..classes.len()).collect();
        let rep_key = |c: &Class| {
            let (h, ref rho) = members[c.members[0]];
            (tower.subgroups()[h].order(), h, rho.clone())
        };
        order.sort_by_key(|&c| rep_key(&classes[c]));
        let mut renumber = vec![0; classes.len()];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new;
        }
        let mut sorted: Vec<Class> = Vec::with_capacity(classes.len());
        for &old in &order {
            sorted.push(Class { members: std::mem::take(&mut classes[old].members), below: Vec::new() });
        }
        for c in class_of.iter_mut().flatten() {
            *c = renumber[*c];
        }
        for class in &mut sorted {
            let (h, ref rho) = members[class.members[0]];
            let hsub = &tower.subgroups()[h];
            let mut below = Vec::new();
            for (l, lsub) in tower.subgroups().iter().enumerate() {
                if lsub.order() >= hsub.order() || !lsub.is_subgroup_of(hsub) || !covered[l] {
                    continue;
                }
                let restricted: Vec<usize> =
                    lsub.elements().iter().map(|&g| rho[hsub.position(g).expect("L ≤ H")]).collect();
                let j = lookup[&(l, restricted)];
                if let Some(c) = class_of[j] {
                    below.push(c);
                }
            }
            below.sort_unstable();
            below.dedup();
            class.below = below;
        }
        Ok(Universe { members, lookup, forced, classes: sorted, class_of })
    }

    fn bits_from_classes(&self, included: &[bool]) -> Bits {
        let mut bits = Bits::new(self.members.len());
        for &f in &self.forced {
            bits.set(f);
        }
        for (c, class) in self.classes.iter().enumerate() {
            if included[c] {
                for &m in &class.members {
                    bits.set(m);
                }
            }
        }
        bits
    }

    fn lists(&self, bits: &Bits, subgroup_count: usize) -> Vec<Vec<Vec<usize>>> {
        let mut lists = vec![Vec::new(); subgroup_count];
        for i in bits.ones() {
            let (h, rho) = &self.members[i];
            lists[*h].push(rho.clone());
        }
        lists
    }

    fn all_bits(&self) -> Bits {
        let mut bits = Bits::new(self.members.len());
        for i in 0..self.members.len() {
            bits.set(i);
        }
        bits
    }

    fn forced_bits(&self) -> Bits {
        let mut bits = Bits::new(self.members.len());
        for &f in &self.forced {
            bits.set(f);
        }
        bits
    }

    /// Visits the down-closed class sets containing `required` and avoiding
    /// `forbidden` until `visit` breaks.
    fn downsets(&self, required: &[bool], forbidden: &[bool], visit: &mut dyn FnMut(&[bool]) -> ControlFlow<()>) {
        let k = self.classes.len();
        let mut need = required.to_vec();
        for c in (0..k).rev() {
            if need[c] {
                for &b in &self.classes[c].below {
                    need[b] = true;
                }
            }
        }
        if (0..k).any(|c| need[c] && forbidden[c]) {
            return;
        }
        let mut chosen = vec![false; k];
        let _ = self.downsets_rec(0, &need, forbidden, &mut chosen, visit);
    }

    fn downsets_rec(
        &self,
        c: usize,
        need: &[bool],
        forbidden: &[bool],
        chosen: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[bool]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if c == self.classes.len() {
            return visit(chosen);
        }
        if !need[c] {
            self.downsets_rec(c + 1, need, forbidden, chosen, visit)?;
        }
        if !forbidden[c] && self.classes[c].below.iter().all(|&b| chosen[b]) {
            chosen[c] = true;
            let flow = self.downsets_rec(c + 1, need, forbidden, chosen, visit);
            chosen[c] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Every realizable sequence satisfying the N∞ condition for `coverage`,
/// in canonical order.
pub fn enumerate_realizable(tower: &Arc<ProductTower>, coverage: &Coverage) -> Result<Vec<FamilySequence>> {
    enumerate_realizable_capped(tower, coverage, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_realizable_capped(
    tower: &Arc<ProductTower>,
    coverage: &Coverage,
    cap: usize,
) -> Result<Vec<FamilySequence>> {
    let max = tower.max_arity();
    let covered: Vec<bool> = tower.subgroups().iter().map(|h| coverage.contains(h)).collect();
    let scope = match coverage {
        Coverage::Full => None,
        Coverage::Subgroups(_) => Some(covered.as_slice()),
    };
    let universes = (0..=max).map(|n| Universe::build(tower, n, &covered)).collect::<Result<Vec<_>>>()?;
    let count = tower.subgroups().len();
    let plan = scan_order(max);

    let mut partials: Vec<Vec<Bits>> = vec![Vec::new()];
    for level in 0..=max {
        let uni = &universes[level];
        let checks: Vec<&Vec<usize>> = plan
            .iter()
            .filter(|p| p.len().max(p.iter().sum()) == level)
            .collect();
        let extend = |prefix: &Vec<Bits>, accepted: &AtomicUsize| -> Vec<Vec<Bits>> {
            let lower: Vec<Vec<Vec<Vec<usize>>>> =
                prefix.iter().enumerate().map(|(n, b)| universes[n].lists(b, count)).collect();
            let with_level = |bits: &Bits| {
                let mut lists = lower.clone();
                lists.push(uni.lists(bits, count));
                GraphIndex::from_lists(lists)
            };

            // Data that must be present whatever level `level` contains.
            let mut required = vec![false; uni.classes.len()];
            let base = with_level(&uni.forced_bits());
            for parts in checks.iter().filter(|p| p.iter().sum::<usize>() == level && p.iter().all(|&x| x < level)) {
                let _ = scan(tower, &base, parts, scope, |step| {
                    if let Some(&i) = uni.lookup.get(&(step.h, step.rho.clone())) {
                        if let Some(c) = uni.class_of[i] {
                            required[c] = true;
                        }
                    }
                    ControlFlow::Continue(())
                });
            }
            // Outer maps at this level that break a containment below it.
            let mut forbidden = vec![false; uni.classes.len()];
            let mut forced_broken = false;
            let full = with_level(&uni.all_bits());
            for parts in checks.iter().filter(|p| p.iter().sum::<usize>() < level) {
                let n: usize = parts.iter().sum();
                let _ = scan(tower, &full, parts, scope, |step| {
                    if !full.contains(n, step.h, &step.rho) {
                        let i = uni.lookup[&(step.h, step.outer.to_vec())];
                        match uni.class_of[i] {
                            Some(c) => forbidden[c] = true,
                            None => forced_broken = true,
                        }
                    }
                    ControlFlow::Continue(())
                });
            }
            if forced_broken {
                return Vec::new();
            }
            let mut out = Vec::new();
            uni.downsets(&required, &forbidden, &mut |classes| {
                if accepted.load(Ordering::Relaxed) > cap {
                    return ControlFlow::Break(());
                }
                let bits = uni.bits_from_classes(classes);
                let index = with_level(&bits);
                let ok = checks.iter().all(|parts| {
                    let n: usize = parts.iter().sum();
                    scan(tower, &index, parts, scope, |step| {
                        if index.contains(n, step.h, &step.rho) {
                            ControlFlow::Continue(())
                        } else {
                            ControlFlow::Break(())
                        }
                    })
                    .is_continue()
                });
                if ok {
                    accepted.fetch_add(1, Ordering::Relaxed);
                    let mut next = prefix.clone();
                    next.push(bits);
                    out.push(next);
                }
                ControlFlow::Continue(())
            });
            out
        };
        let accepted = AtomicUsize::new(0);
        let next: Vec<Vec<Bits>> = partials.par_iter().flat_map_iter(|p| extend(p, &accepted)).collect();
        if next.len() > cap {
            return Err(Error::EnumerationCap { count: next.len(), cap });
        }
        partials = next;
    }

    let mut out = partials
        .into_iter()
        .map(|levels| {
            let families = levels
                .iter()
                .enumerate()
                .map(|(n, bits)| {
                    let members = bits
                        .ones()
                        .map(|i| {
                            let (h, rho) = &universes[n].members[i];
                            tower.graph_raw(n, *h, rho)
                        })
                        .collect();
                    Ok(Family::from_closed(tower.ambient(n)?.clone(), members))
                })
                .collect::<Result<Vec<_>>>()?;
            FamilySequence::from_closed(tower.clone(), families)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

#[cfg(test)]
pub(super) fn class_count(tower: &ProductTower, n: usize) -> usize {
    let covered = vec![true; tower.subgroups().len()];
    Universe::build(tower, n, &covered).unwrap().classes.len()
}
