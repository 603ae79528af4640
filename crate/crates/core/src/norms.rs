//! Norms `N_K^H`, admissible `H`-sets, and audits of the indexing-system
//! closure properties (coproducts, products, self-induction).

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{FamilyKind, ProductTower};
use crate::group::{FiniteGroup, Homomorphism, Permutation, Subgroup};
use crate::realizability::{realizable_closure, twisted_block_sum, FamilySequence};

/// Pairs `K ≤ H ≤ G` naming the norms `N_K^H`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormSpec {
    pairs: Vec<(Subgroup, Subgroup)>,
}

impl NormSpec {
    pub fn new(pairs: Vec<(Subgroup, Subgroup)>) -> Result<Self> {
        for (h, k) in &pairs {
            if !k.is_subgroup_of(h) {
                return Err(Error::NotASubgroupChain(format!("{:?} is not contained in {:?}", k.elements(), h.elements())));
            }
        }
        Ok(NormSpec { pairs })
    }

    pub fn pairs(&self) -> &[(Subgroup, Subgroup)] {
        &self.pairs
    }
}

/// The left action of `H` on `H/K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetAction {
    /// Cosets `hK` as sorted element lists, ordered by least element.
    pub cosets: Vec<Vec<usize>>,
    /// `ρ(h)` for each element of `H`, by position in `H`.
    pub perms: Vec<Permutation>,
}

impl CosetAction {
    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    /// `ρ` as a homomorphism into the `S_n` of the tower.
    pub fn homomorphism(&self, tower: &ProductTower, h: &Subgroup) -> Result<Homomorphism> {
        let id = subgroup_id(tower, h)?;
        Homomorphism::new(tower.subgroup_group(id).clone(), tower.sym(self.index())?.clone(), self.ranks())
    }

    fn ranks(&self) -> Vec<usize> {
        self.perms.iter().map(Permutation::lex_rank).collect()
    }
}

pub fn coset_action(group: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<CosetAction> {
    if !k.is_subgroup_of(h) {
        return Err(Error::NotASubgroupChain(format!("{:?} is not contained in {:?}", k.elements(), h.elements())));
    }
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for &x in h.elements() {
        if cosets.iter().any(|c| c.binary_search(&x).is_ok()) {
            continue;
        }
        let mut c: Vec<usize> = k.elements().iter().map(|&y| group.mul(x, y)).collect();
        c.sort_unstable();
        cosets.push(c);
    }
    cosets.sort_by_key(|c| c[0]);
    let locate = |x: usize| cosets.iter().position(|c| c.binary_search(&x).is_ok()).expect("cosets cover H");
    let perms = h
        .elements()
        .iter()
        .map(|&g| Permutation::new(cosets.iter().map(|c| locate(group.mul(g, c[0]))).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CosetAction { cosets, perms })
}

fn subgroup_id(tower: &ProductTower, h: &Subgroup) -> Result<usize> {
    tower
        .subgroup_id(h)
        .ok_or_else(|| Error::Input(format!("{:?} is not a subgroup of {}", h.elements(), tower.group().label())))
}

/// The smallest realizable N∞ sequence in which every norm of `spec` is admissible.
pub fn norms_to_sequence(tower: &Arc<ProductTower>, spec: &NormSpec) -> Result<FamilySequence> {
    let max = tower.max_arity();
    let base = FamilySequence::uniform(tower.clone(), &FamilyKind::TrivialGraphs)?;
    let mut seeds: Vec<Vec<Subgroup>> = base.families().iter().map(|f| f.iter().cloned().collect()).collect();
    for (h, k) in spec.pairs() {
        let action = coset_action(tower.group(), h, k)?;
        let n = action.index();
        if n > max {
            return Err(Error::ArityTooSmall { index: n, max_arity: max });
        }
        let id = subgroup_id(tower, h)?;
        seeds[n].push(tower.graph_raw(n, id, &action.ranks()));
    }
    realizable_closure(&FamilySequence::from_seeds(tower.clone(), seeds)?)
}

/// An `H`-set of cardinality `arity` whose graph lies in the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleSet {
    pub h: Subgroup,
    pub arity: usize,
    pub rho: Homomorphism,
}

/// Admissible `H`-sets by arity, each arity in lexicographic order of `ρ`.
pub fn admissible_sets(seq: &FamilySequence, h: &Subgroup) -> Result<Vec<AdmissibleSet>> {
    let tower = seq.tower();
    let id = subgroup_id(tower, h)?;
    let mut out = Vec::new();
    for n in 0..=seq.max_arity() {
        let family = seq.families()[n].members();
        for rho in admissible_images(seq, id, n) {
            debug_assert!(family.contains(&tower.graph_raw(n, id, rho)));
            out.push(AdmissibleSet {
                h: h.clone(),
                arity: n,
                rho: Homomorphism::new_unchecked(tower.subgroup_group(id).clone(), tower.sym(n)?.clone(), rho.clone()),
            });
        }
    }
    Ok(out)
}

fn admissible_images(seq: &FamilySequence, h: usize, n: usize) -> impl Iterator<Item = &Vec<usize>> {
    let tower = seq.tower();
    let family = seq.families()[n].members();
    tower.homs(h, n).iter().filter(move |rho| family.contains(&tower.graph_raw(n, h, rho)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AuditKind {
    Coproduct,
    Product,
    SelfInduction,
}

/// A composite `H`-set missing from its level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditFailure {
    pub kind: AuditKind,
    pub h: Subgroup,
    /// For self-induction, the subgroup `K`.
    pub k: Option<Subgroup>,
    /// Input structure maps: `(ρ_a, ρ_b)`, `(ρ_k, τ_q)` or `(H/K, τ)`.
    pub inputs: Vec<Homomorphism>,
    pub composite: Homomorphism,
    pub gamma: Subgroup,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditOutcome {
    pub checked: usize,
    /// Instances whose composite arity exceeds the truncation.
    pub skipped: usize,
    pub failure: Option<Box<AuditFailure>>,
}

impl AuditOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    fn merge(mut self, other: AuditOutcome) -> Self {
        self.checked += other.checked;
        self.skipped += other.skipped;
        if self.failure.is_none() {
            self.failure = other.failure;
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub coproduct: AuditOutcome,
    pub product: AuditOutcome,
    pub self_induction: AuditOutcome,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.coproduct.passed() && self.product.passed() && self.self_induction.passed()
    }
}

/// Which coset representatives the self-induction audit uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Representatives {
    #[default]
    Least,
    Greatest,
}

pub fn audit_closure_properties(seq: &FamilySequence) -> Result<AuditReport> {
    audit_closure_properties_with(seq, Representatives::Least)
}

pub fn audit_closure_properties_with(seq: &FamilySequence, reps: Representatives) -> Result<AuditReport> {
    if !seq.is_graph_sequence() {
        return Err(Error::NotAGraph { arity: first_non_graph(seq) });
    }
    let tower = seq.tower();
    let ids: Vec<usize> = (0..tower.subgroups().len()).collect();
    let per_h = |audit: &(dyn Fn(usize) -> Result<AuditOutcome> + Sync)| -> Result<AuditOutcome> {
        let parts = ids.par_iter().map(|&h| audit(h)).collect::<Result<Vec<_>>>()?;
        Ok(parts.into_iter().fold(AuditOutcome::default(), AuditOutcome::merge))
    };
    Ok(AuditReport {
        coproduct: per_h(&|h| coproduct_audit(seq, h))?,
        product: per_h(&|h| product_audit(seq, h))?,
        self_induction: per_h(&|h| self_induction_audit(seq, h, reps))?,
    })
}

fn first_non_graph(seq: &FamilySequence) -> usize {
    (0..=seq.max_arity())
        .find(|&n| seq.families()[n].iter().any(|m| !crate::graph::is_graph_subgroup(seq.tower(), n, m).unwrap_or(false)))
        .unwrap_or(0)
}

struct Recorder<'a> {
    seq: &'a FamilySequence,
    kind: AuditKind,
    h: usize,
    outcome: AuditOutcome,
}

impl<'a> Recorder<'a> {
    fn new(seq: &'a FamilySequence, kind: AuditKind, h: usize) -> Self {
        Recorder { seq, kind, h, outcome: AuditOutcome::default() }
    }

    fn hom(&self, src: &Arc<FiniteGroup>, n: usize, images: &[usize]) -> Result<Homomorphism> {
        Ok(Homomorphism::new_unchecked(src.clone(), self.seq.tower().sym(n)?.clone(), images.to_vec()))
    }

    /// Records one instance; returns `true` once a failure is held.
    fn check(&mut self, n: usize, rho: &[usize], k: Option<Subgroup>, inputs: impl FnOnce() -> Result<Vec<Homomorphism>>) -> Result<bool> {
        let tower = self.seq.tower();
        self.outcome.checked += 1;
        let gamma = tower.graph_raw(n, self.h, rho);
        if self.seq.families()[n].contains(&gamma) {
            return Ok(false);
        }
        let composite = self.hom(tower.subgroup_group(self.h), n, rho)?;
        self.outcome.failure = Some(Box::new(AuditFailure {
            kind: self.kind,
            h: tower.subgroups()[self.h].clone(),
            k,
            inputs: inputs()?,
            composite,
            gamma,
        }));
        Ok(true)
    }
}

fn coproduct_audit(seq: &FamilySequence, h: usize) -> Result<AuditOutcome> {
    let tower = seq.tower();
    let max = seq.max_arity();
    let hg = tower.subgroup_group(h);
    let mut rec = Recorder::new(seq, AuditKind::Coproduct, h);
    for a in 0..=max {
        for b in 0..=max {
            for ra in admissible_images(seq, h, a) {
                let rbs: Vec<&Vec<usize>> = admissible_images(seq, h, b).collect();
                // the outer map lives in S_2
                if a + b > max || max < 2 {
                    rec.outcome.skipped += rbs.len();
                    continue;
                }
                let outer = vec![0; hg.order()];
                for rb in rbs {
                    let rho = twisted_block_sum(tower, h, &[a, b], &outer, &[ra, rb])?;
                    if rec.check(a + b, &rho, None, || Ok(vec![rec_hom(tower, hg, a, ra)?, rec_hom(tower, hg, b, rb)?]))? {
                        return Ok(rec.outcome);
                    }
                }
            }
        }
    }
    Ok(rec.outcome)
}

fn rec_hom(tower: &ProductTower, src: &Arc<FiniteGroup>, n: usize, images: &[usize]) -> Result<Homomorphism> {
    Ok(Homomorphism::new_unchecked(src.clone(), tower.sym(n)?.clone(), images.to_vec()))
}

fn product_audit(seq: &FamilySequence, h: usize) -> Result<AuditOutcome> {
    let tower = seq.tower();
    let max = seq.max_arity();
    let hg = tower.subgroup_group(h);
    let mut rec = Recorder::new(seq, AuditKind::Product, h);
    for k in 1..=max {
        for rk in admissible_images(seq, h, k) {
            for q in 0..=max {
                let taus: Vec<&Vec<usize>> = admissible_images(seq, h, q).collect();
                if k * q > max {
                    rec.outcome.skipped += taus.len();
                    continue;
                }
                let parts = vec![q; k];
                for tau in taus {
                    let blocks = vec![tau.as_slice(); k];
                    let rho = twisted_block_sum(tower, h, &parts, rk, &blocks)?;
                    if rec.check(k * q, &rho, None, || Ok(vec![rec_hom(tower, hg, k, rk)?, rec_hom(tower, hg, q, tau)?]))? {
                        return Ok(rec.outcome);
                    }
                }
            }
        }
    }
    Ok(rec.outcome)
}

/// `H x_K T` for `H/K` admissible and `T` an admissible `K`-set. With
/// representatives `g_i`, write `h g_i = g_j κ` with `κ ∈ K`; then `h` sends
/// point `t` of copy `i` to point `τ(κ)(t)` of copy `j`.
fn self_induction_audit(seq: &FamilySequence, h: usize, reps: Representatives) -> Result<AuditOutcome> {
    let tower = seq.tower();
    let g = tower.group();
    let max = seq.max_arity();
    let hsub = &tower.subgroups()[h];
    let hg = tower.subgroup_group(h);
    let mut rec = Recorder::new(seq, AuditKind::SelfInduction, h);
    for (kid, ksub) in tower.subgroups().iter().enumerate() {
        if !ksub.is_subgroup_of(hsub) {
            continue;
        }
        let action = coset_action(g, hsub, ksub)?;
        let idx = action.index();
        if idx > max || !seq.families()[idx].contains(&tower.graph_raw(idx, h, &action.ranks())) {
            continue;
        }
        let reps: Vec<usize> = action
            .cosets
            .iter()
            .map(|c| match reps {
                Representatives::Least => c[0],
                Representatives::Greatest => c[c.len() - 1],
            })
            .collect();
        for q in 0..=max {
            let taus: Vec<&Vec<usize>> = admissible_images(seq, kid, q).collect();
            if idx * q > max {
                rec.outcome.skipped += taus.len();
                continue;
            }
            for tau in taus {
                let n = idx * q;
                let rho = hsub
                    .elements()
                    .iter()
                    .enumerate()
                    .map(|(pos, &x)| {
                        let sigma = &action.perms[pos];
                        let mut images = vec![0; n];
                        for (i, &gi) in reps.iter().enumerate() {
                            let j = sigma.apply(i);
                            let kappa = g.mul(g.inv(reps[j]), g.mul(x, gi));
                            let t = tower.perm(q, tau[ksub.position(kappa).expect("cocycle lands in K")]);
                            for s in 0..q {
                                images[i * q + s] = j * q + t.apply(s);
                            }
                        }
                        Ok(Permutation::new(images)?.lex_rank())
                    })
                    .collect::<Result<Vec<_>>>()?;
                let inputs = || -> Result<Vec<Homomorphism>> {
                    Ok(vec![
                        rec_hom(tower, hg, idx, &action.ranks())?,
                        rec_hom(tower, tower.subgroup_group(kid), q, tau)?,
                    ])
                };
                if rec.check(n, &rho, Some(ksub.clone()), inputs)? {
                    return Ok(rec.outcome);
                }
            }
        }
    }
    Ok(rec.outcome)
}
