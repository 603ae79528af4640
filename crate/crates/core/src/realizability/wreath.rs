//! Wreath composition of graph data and the containment scan built on it.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use rayon::prelude::*;

use super::FamilySequence;
use crate::error::{Error, Result};
use crate::families::{close_family, Family};
use crate::graph::ProductTower;
use crate::group::{Homomorphism, Permutation, Subgroup};

/// Graph members of every level, grouped by subgroup of `G`:
/// `lists[n][h]` holds the sorted image arrays of the allowed `ρ: H_h -> S_n`.
#[derive(Clone, Debug)]
pub(crate) struct GraphIndex {
    lists: Vec<Vec<Vec<Vec<usize>>>>,
}

impl GraphIndex {
    pub(crate) fn build(tower: &ProductTower, families: &[Family]) -> Result<Self> {
        let count = tower.subgroups().len();
        let mut lists = Vec::with_capacity(families.len());
        for (n, family) in families.iter().enumerate() {
            let mut level = vec![Vec::new(); count];
            for m in family.iter() {
                let (h, rho) = tower.split_graph(n, m).ok_or(Error::NotAGraph { arity: n })?;
                level[h].push(rho);
            }
            for l in &mut level {
                l.sort();
            }
            lists.push(level);
        }
        Ok(GraphIndex { lists })
    }

    pub(crate) fn from_lists(lists: Vec<Vec<Vec<Vec<usize>>>>) -> Self {
        GraphIndex { lists }
    }

    pub(crate) fn allowed(&self, n: usize, h: usize) -> &[Vec<usize>] {
        &self.lists[n][h]
    }

    pub(crate) fn contains(&self, n: usize, h: usize, rho: &[usize]) -> bool {
        self.lists[n][h].binary_search_by(|x| x.as_slice().cmp(rho)).is_ok()
    }
}

/// One element of `F_k ≀ (F_{n_1} x ... x F_{n_k})` before taking its graph.
#[derive(Clone, Debug)]
pub(crate) struct WreathStep<'a> {
    pub h: usize,
    pub outer: &'a [usize],
    pub blocks: Vec<&'a [usize]>,
    pub rho: Vec<usize>,
}

/// Compositions of `n` into `k` non-negative parts, in lexicographic order.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=rest {
            prefix.push(first);
            rec(rest - first, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Every decomposition checked for a sequence truncated at `max_arity`:
/// increasing `n`, then increasing number of parts `k`, then lexicographic.
pub fn scan_order(max_arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for n in 0..=max_arity {
        for k in 1..=max_arity.max(1) {
            out.extend(compositions(n, k));
        }
    }
    out
}

/// Orbit id of each block under `ρ_k(H)`; ids follow the first block of each orbit.
pub(crate) fn block_orbits(tower: &ProductTower, k: usize, outer: &[usize]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &r in outer {
        let sigma = tower.perm(k, r);
        for i in 0..k {
            let (a, b) = (find(&mut parent, i), find(&mut parent, sigma.apply(i)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut ids = vec![usize::MAX; k];
    let mut next = 0;
    let mut root_id = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if root_id[r] == usize::MAX {
            root_id[r] = next;
            next += 1;
        }
        ids[i] = root_id[r];
    }
    ids
}

/// The block sum of `blocks` twisted by `outer`: position `t` of block `i`
/// goes to position `ρ_{n_i}(h)(t)` of block `ρ_k(h)(i)`, blocks laid out
/// consecutively. Returns `S_n` ranks indexed by position in `H`.
pub(crate) fn twisted_block_sum(
    tower: &ProductTower,
    h: usize,
    parts: &[usize],
    outer: &[usize],
    blocks: &[&[usize]],
) -> Result<Vec<usize>> {
    let k = parts.len();
    let n: usize = parts.iter().sum();
    let mut offsets = Vec::with_capacity(k);
    let mut acc = 0;
    for &p in parts {
        offsets.push(acc);
        acc += p;
    }
    let hsize = tower.subgroups()[h].order();
    let mut rho = Vec::with_capacity(hsize);
    for pos in 0..hsize {
        let sigma = tower.perm(k, outer[pos]);
        let mut images = vec![0; n];
        for i in 0..k {
            let j = sigma.apply(i);
            if parts[j] != parts[i] {
                return Err(Error::InvalidSequence(format!("outer permutation moves block {i} onto block {j} of a different size")));
            }
            let tau = tower.perm(parts[i], blocks[i][pos]);
            for t in 0..parts[i] {
                images[offsets[i] + t] = offsets[j] + tau.apply(t);
            }
        }
        rho.push(Permutation::new(images)?.lex_rank());
    }
    Ok(rho)
}

fn is_hom(tower: &ProductTower, h: usize, n: usize, rho: &[usize]) -> bool {
    let src = tower.subgroup_group(h);
    let sym = &tower.product(n).expect("arity checked").right;
    (0..src.order()).all(|a| (0..src.order()).all(|b| rho[src.mul(a, b)] == sym.mul(rho[a], rho[b])))
}

/// Visits every wreath datum for the decomposition `parts`, in scan order:
/// subgroups of `G` in canonical order, then `ρ_k`, then block choices.
///
/// Blocks in one `ρ_k(H)`-orbit must share size and homomorphism; outer maps
/// violating the size condition are skipped.
pub(crate) fn scan<'a>(
    tower: &ProductTower,
    index: &'a GraphIndex,
    parts: &[usize],
    scope: Option<&[bool]>,
    mut visit: impl FnMut(WreathStep<'a>) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let k = parts.len();
    let n: usize = parts.iter().sum();
    for h in 0..tower.subgroups().len() {
        if scope.is_some_and(|s| !s[h]) {
            continue;
        }
        for outer in index.allowed(k, h) {
            let orbit = block_orbits(tower, k, outer);
            let orbit_count = orbit.iter().max().map_or(0, |m| m + 1);
            let mut rep = vec![usize::MAX; orbit_count];
            let mut uniform = true;
            for i in 0..k {
                if rep[orbit[i]] == usize::MAX {
                    rep[orbit[i]] = i;
                } else if parts[rep[orbit[i]]] != parts[i] {
                    uniform = false;
                }
            }
            if !uniform {
                continue;
            }
            let choices: Vec<&'a [Vec<usize>]> = rep.iter().map(|&i| index.allowed(parts[i], h)).collect();
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            let radices: Vec<usize> = choices.iter().map(|c| c.len()).collect();
            let mut pick = vec![0; orbit_count];
            loop {
                let blocks: Vec<&'a [usize]> = (0..k).map(|i| choices[orbit[i]][pick[orbit[i]]].as_slice()).collect();
                let rho = twisted_block_sum(tower, h, parts, outer, &blocks).expect("orbit sizes are uniform");
                assert!(is_hom(tower, h, n, &rho), "twisted block sum is not a homomorphism");
                visit(WreathStep { h, outer, blocks, rho })?;
                if !crate::group::advance_odometer(&mut pick, &radices) {
                    break;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Subgroup-id mask for an optional family of subgroups of `G`.
pub(crate) fn scope_mask(tower: &ProductTower, scope: Option<&Family>) -> Option<Vec<bool>> {
    scope.map(|f| tower.subgroups().iter().map(|h| f.contains(h)).collect())
}

fn check_decomposition(seq: &FamilySequence, parts: &[usize]) -> Result<()> {
    let max = seq.max_arity();
    let n: usize = parts.iter().sum();
    if parts.is_empty() {
        return Err(Error::Input("a decomposition needs at least one part".into()));
    }
    for a in [n, parts.len()] {
        if a > max {
            return Err(Error::ArityOutOfRange { arity: a, max });
        }
    }
    Ok(())
}

/// `F_k ≀ (F_{n_1} x ... x F_{n_k})` as a set of subgroups of `G x S_n`.
pub fn wreath_compose(seq: &FamilySequence, parts: &[usize]) -> Result<BTreeSet<Subgroup>> {
    check_decomposition(seq, parts)?;
    let tower = seq.tower();
    let index = GraphIndex::build(tower, seq.families())?;
    let n = parts.iter().sum();
    let mut out = BTreeSet::new();
    let _ = scan(tower, &index, parts, None, |step| {
        out.insert(tower.graph_raw(n, step.h, &step.rho));
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// A wreath datum whose graph is missing from the target family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub arity: usize,
    pub parts: Vec<usize>,
    pub h: Subgroup,
    /// `ρ_k: H -> S_k`.
    pub outer: Homomorphism,
    /// `ρ_{n_i}: H -> S_{n_i}`, one per block.
    pub blocks: Vec<Homomorphism>,
    /// The twisted block sum `ρ: H -> S_n`.
    pub composite: Homomorphism,
    pub gamma: Subgroup,
}

impl Witness {
    fn from_step(tower: &ProductTower, parts: &[usize], step: &WreathStep<'_>) -> Result<Self> {
        let hg = tower.subgroup_group(step.h).clone();
        let n: usize = parts.iter().sum();
        let hom = |arity: usize, images: &[usize]| -> Result<Homomorphism> {
            Ok(Homomorphism::new_unchecked(hg.clone(), tower.sym(arity)?.clone(), images.to_vec()))
        };
        Ok(Witness {
            arity: n,
            parts: parts.to_vec(),
            h: tower.subgroups()[step.h].clone(),
            outer: hom(parts.len(), step.outer)?,
            blocks: parts.iter().zip(&step.blocks).map(|(&p, b)| hom(p, b)).collect::<Result<_>>()?,
            composite: hom(n, &step.rho)?,
            gamma: tower.graph_raw(n, step.h, &step.rho),
        })
    }

    /// Recomputes `Γ_ρ` from the stored `H`, `ρ_k` and block maps.
    pub fn replay(&self, tower: &ProductTower) -> Result<Subgroup> {
        let h = tower
            .subgroup_id(&self.h)
            .ok_or_else(|| Error::Input("witness subgroup is not a subgroup of G".into()))?;
        if self.blocks.len() != self.parts.len() || self.parts.iter().sum::<usize>() != self.arity {
            return Err(Error::Input("witness parts do not match its blocks".into()));
        }
        for a in std::iter::once(self.parts.len()).chain(std::iter::once(self.arity)) {
            tower.sym(a)?;
        }
        let blocks: Vec<&[usize]> = self.blocks.iter().map(|b| b.images()).collect();
        let rho = twisted_block_sum(tower, h, &self.parts, self.outer.images(), &blocks)?;
        if !is_hom(tower, h, self.arity, &rho) {
            return Err(Error::InvalidHomomorphism("replayed block sum is not a homomorphism".into()));
        }
        Ok(tower.graph_raw(self.arity, h, &rho))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Realizable,
    NotRealizable(Box<Witness>),
}

impl Verdict {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Verdict::Realizable)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Realizable => None,
            Verdict::NotRealizable(w) => Some(w),
        }
    }
}

/// First datum of `parts` whose graph is missing from level `n`.
pub(crate) fn first_violation<'a>(
    tower: &ProductTower,
    index: &'a GraphIndex,
    parts: &[usize],
    scope: Option<&[bool]>,
) -> Option<WreathStep<'a>> {
    let n: usize = parts.iter().sum();
    let mut found = None;
    let _ = scan(tower, index, parts, scope, |step| {
        if index.contains(n, step.h, &step.rho) {
            ControlFlow::Continue(())
        } else {
            found = Some(step);
            ControlFlow::Break(())
        }
    });
    found
}

/// Decides whether every wreath containment holds up to the truncation arity.
pub fn is_realizable(seq: &FamilySequence) -> Result<Verdict> {
    is_realizable_within(seq, None)
}

/// As [`is_realizable`], quantifying only over `H` in `scope` when given.
pub fn is_realizable_within(seq: &FamilySequence, scope: Option<&Family>) -> Result<Verdict> {
    let tower = seq.tower();
    let index = GraphIndex::build(tower, seq.families())?;
    let mask = scope_mask(tower, scope);
    let plan = scan_order(seq.max_arity());
    let hit = plan.par_iter().find_map_first(|parts| {
        first_violation(tower, &index, parts, mask.as_deref()).map(|step| Witness::from_step(tower, parts, &step))
    });
    match hit {
        None => Ok(Verdict::Realizable),
        Some(w) => Ok(Verdict::NotRealizable(Box::new(w?))),
    }
}

/// Smallest realizable sequence containing `seq` levelwise.
pub fn realizable_closure(seq: &FamilySequence) -> Result<FamilySequence> {
    realizable_closure_within(seq, None)
}

pub fn realizable_closure_within(seq: &FamilySequence, scope: Option<&Family>) -> Result<FamilySequence> {
    let tower = seq.tower();
    let mask = scope_mask(tower, scope);
    let plan = scan_order(seq.max_arity());
    let mut families = seq.families().to_vec();
    loop {
        let index = GraphIndex::build(tower, &families)?;
        let found: Vec<(usize, Vec<Subgroup>)> = plan
            .par_iter()
            .map(|parts| {
                let n: usize = parts.iter().sum();
                let mut missing = Vec::new();
                let _ = scan(tower, &index, parts, mask.as_deref(), |step| {
                    if !index.contains(n, step.h, &step.rho) {
                        missing.push(tower.graph_raw(n, step.h, &step.rho));
                    }
                    ControlFlow::Continue(())
                });
                (n, missing)
            })
            .collect();
        let mut additions: Vec<BTreeSet<Subgroup>> = vec![BTreeSet::new(); families.len()];
        for (n, missing) in found {
            additions[n].extend(missing);
        }
        if additions.iter().all(BTreeSet::is_empty) {
            break;
        }
        for (n, add) in additions.into_iter().enumerate() {
            if !add.is_empty() {
                let seeds = families[n].iter().cloned().chain(add);
                families[n] = close_family(tower.ambient(n)?, seeds, tower.limits())?;
            }
        }
    }
    FamilySequence::from_closed(seq.tower_arc().clone(), families)
}
