//! Exhaustive reference implementation. Shares only the group tables and
//! subgroup lists with the engine: graph subgroups are found by filtering
//! every subgroup of `G x S_n`, families by closing single additions, and the
//! containment by building every block permutation directly.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use ninfty::group::{all_subgroups, direct_product, FiniteGroup, Limits, Permutation};

/// A subgroup of `G x S_n` as a sorted element list.
pub type Elems = Vec<usize>;

pub struct Level {
    pub n: usize,
    pub ambient: Arc<FiniteGroup>,
    pub sym_order: usize,
    /// Every graph subgroup, in canonical subgroup order.
    pub graphs: Vec<Elems>,
    /// For each graph: `G` element -> permutation images.
    pub maps: Vec<HashMap<usize, Vec<usize>>>,
    /// For each graph: its projection to `G`.
    pub projections: Vec<Vec<usize>>,
    pub lookup: HashMap<Elems, usize>,
    /// For each graph: every graph it contains, and every conjugate.
    below: Vec<Vec<usize>>,
    conjugates: Vec<Vec<usize>>,
}

impl Level {
    fn split(&self, z: usize) -> (usize, Vec<usize>) {
        let p = Permutation::from_lex_rank(self.n, z % self.sym_order);
        (z / self.sym_order, p.images().to_vec())
    }

    fn join(&self, g: usize, images: &[usize]) -> usize {
        g * self.sym_order + Permutation::new(images.to_vec()).unwrap().lex_rank()
    }

    /// Smallest set of graph indices containing `seeds` closed under
    /// subgroups and conjugation.
    pub fn close(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut work: Vec<usize> = seeds.into_iter().collect();
        while let Some(i) = work.pop() {
            if !out.insert(i) {
                continue;
            }
            work.extend(self.below[i].iter().copied().filter(|j| !out.contains(j)));
            work.extend(self.conjugates[i].iter().copied().filter(|j| !out.contains(j)));
        }
        out
    }

    fn link(&mut self) {
        for i in 0..self.graphs.len() {
            let m: HashSet<usize> = self.graphs[i].iter().copied().collect();
            let below = (0..self.graphs.len()).filter(|&j| self.graphs[j].iter().all(|x| m.contains(x))).collect();
            let mut conj: Vec<usize> = (0..self.ambient.order())
                .map(|z| {
                    let zi = self.ambient.inv(z);
                    let mut c: Elems = self.graphs[i].iter().map(|&x| self.ambient.mul(self.ambient.mul(z, x), zi)).collect();
                    c.sort_unstable();
                    self.lookup[&c]
                })
                .collect();
            conj.sort_unstable();
            conj.dedup();
            self.below.push(below);
            self.conjugates.push(conj);
        }
    }

    /// Indices of the graphs `H x 1` for the chosen `H`.
    pub fn forced(&self, base: &[Vec<usize>]) -> Vec<usize> {
        let id: Vec<usize> = (0..self.n).collect();
        base.iter()
            .map(|h| {
                let mut e: Elems = h.iter().map(|&g| self.join(g, &id)).collect();
                e.sort_unstable();
                self.lookup[&e]
            })
            .collect()
    }

    /// Every family of graph subgroups containing the forced ones.
    pub fn candidate_families(&self, base: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
        let start = self.close(self.forced(base));
        let mut seen: HashSet<BTreeSet<usize>> = HashSet::from([start.clone()]);
        let mut frontier = vec![start];
        while let Some(f) = frontier.pop() {
            for g in 0..self.graphs.len() {
                if f.contains(&g) {
                    continue;
                }
                let next = self.close(f.iter().copied().chain([g]));
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        seen.into_iter().collect()
    }
}

pub struct Oracle {
    pub group: Arc<FiniteGroup>,
    pub levels: Vec<Level>,
    /// Subgroups of `G` as element lists.
    pub subgroups: Vec<Vec<usize>>,
}

fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Oracle {
    pub fn new(group: Arc<FiniteGroup>, max_arity: usize) -> Self {
        let limits = Limits::default();
        let subgroups = all_subgroups(&group, &limits).unwrap().into_iter().map(|s| s.elements().to_vec()).collect();
        let levels = (0..=max_arity)
            .map(|n| {
                let sym = Arc::new(FiniteGroup::symmetric(n, &limits).unwrap());
                let ambient = direct_product(&group, &sym, &limits).unwrap().group;
                let sym_order = sym.order();
                let mut level = Level {
                    n,
                    ambient: ambient.clone(),
                    sym_order,
                    graphs: Vec::new(),
                    maps: Vec::new(),
                    projections: Vec::new(),
                    lookup: HashMap::new(),
                    below: Vec::new(),
                    conjugates: Vec::new(),
                };
                for s in all_subgroups(&ambient, &limits).unwrap() {
                    let free = s.elements().iter().filter(|&&z| z / sym_order == group.identity()).count() == 1;
                    if !free {
                        continue;
                    }
                    let map: HashMap<usize, Vec<usize>> = s.elements().iter().map(|&z| level.split(z)).collect();
                    let mut proj: Vec<usize> = map.keys().copied().collect();
                    proj.sort_unstable();
                    level.lookup.insert(s.elements().to_vec(), level.graphs.len());
                    level.graphs.push(s.elements().to_vec());
                    level.maps.push(map);
                    level.projections.push(proj);
                }
                level.link();
                level
            })
            .collect();
        Oracle { group, levels, subgroups }
    }

    pub fn max_arity(&self) -> usize {
        self.levels.len() - 1
    }

    /// Whether every decomposition lands inside the target family.
    pub fn is_realizable(&self, seq: &[BTreeSet<usize>]) -> bool {
        let max = self.max_arity();
        for n in 0..=max {
            for k in 1..=max {
                for parts in compositions(n, k) {
                    if !self.containment_holds(seq, &parts) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn containment_holds(&self, seq: &[BTreeSet<usize>], parts: &[usize]) -> bool {
        let k = parts.len();
        let n: usize = parts.iter().sum();
        let target = &self.levels[n];
        let offsets: Vec<usize> = parts.iter().scan(0, |acc, &p| {
            let o = *acc;
            *acc += p;
            Some(o)
        }).collect();
        for &outer in &seq[k] {
            let h = &self.levels[k].projections[outer];
            let outer_map = &self.levels[k].maps[outer];
            // candidate block data: members of F_{n_i} with the same projection
            let choices: Vec<Vec<usize>> = parts
                .iter()
                .map(|&p| seq[p].iter().copied().filter(|&m| &self.levels[p].projections[m] == h).collect())
                .collect();
            if choices.iter().any(Vec::is_empty) {
                continue;
            }
            let mut pick = vec![0usize; k];
            loop {
                let blocks: Vec<usize> = (0..k).map(|i| choices[i][pick[i]]).collect();
                let compatible = h.iter().all(|g| {
                    (0..k).all(|i| {
                        let j = outer_map[g][i];
                        parts[i] == parts[j] && blocks[i] == blocks[j]
                    })
                });
                if compatible {
                    let mut elems: Elems = h
                        .iter()
                        .map(|&g| {
                            let mut images = vec![0; n];
                            for i in 0..k {
                                let j = outer_map[&g][i];
                                let inner = &self.levels[parts[i]].maps[blocks[i]][&g];
                                for t in 0..parts[i] {
                                    images[offsets[i] + t] = offsets[j] + inner[t];
                                }
                            }
                            target.join(g, &images)
                        })
                        .collect();
                    elems.sort_unstable();
                    match target.lookup.get(&elems) {
                        Some(i) if seq[n].contains(i) => {}
                        _ => return false,
                    }
                }
                let mut i = 0;
                loop {
                    if i == k {
                        break;
                    }
                    pick[i] += 1;
                    if pick[i] < choices[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
        true
    }

    /// Every realizable sequence containing `H x 1` for each `H` in `base`,
    /// by filtering the full product of per-level candidates.
    pub fn enumerate(&self, base: &[Vec<usize>]) -> Vec<Vec<BTreeSet<usize>>> {
        let cands: Vec<Vec<BTreeSet<usize>>> = self.levels.iter().map(|l| l.candidate_families(base)).collect();
        let mut out = Vec::new();
        let mut pick = vec![0usize; cands.len()];
        loop {
            let seq: Vec<BTreeSet<usize>> = (0..cands.len()).map(|n| cands[n][pick[n]].clone()).collect();
            if self.is_realizable(&seq) {
                out.push(seq);
            }
            let mut i = 0;
            while i < pick.len() {
                pick[i] += 1;
                if pick[i] < cands[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == pick.len() {
                break;
            }
        }
        out
    }

    /// Per-level candidate counts; their product is the search size.
    pub fn candidate_counts(&self, base: &[Vec<usize>]) -> Vec<usize> {
        self.levels.iter().map(|l| l.candidate_families(base).len()).collect()
    }

    /// Member element lists of each level, in canonical subgroup order.
    pub fn materialize(&self, seq: &[BTreeSet<usize>]) -> Vec<Vec<Elems>> {
        seq.iter()
            .enumerate()
            .map(|(n, f)| {
                let mut members: Vec<Elems> = f.iter().map(|&i| self.levels[n].graphs[i].clone()).collect();
                members.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                members
            })
            .collect()
    }
}

/// Canonical sequence order: level by level, smaller families first, then
/// member lists compared in canonical subgroup order.
pub fn canonical_sort(seqs: &mut [Vec<Vec<Elems>>]) {
    seqs.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            let ord = x.len().cmp(&y.len()).then_with(|| {
                for (s, t) in x.iter().zip(y) {
                    let o = s.len().cmp(&t.len()).then_with(|| s.cmp(t));
                    if o.is_ne() {
                        return o;
                    }
                }
                std::cmp::Ordering::Equal
            });
            if ord.is_ne() {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });
}
