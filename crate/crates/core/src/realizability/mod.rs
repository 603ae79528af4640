//! Sequences of families `(F_0, .., F_N)`, the wreath containment that makes
//! them realizable, and the classification of realizable sequences.

mod enumerate;
mod wreath;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::families::{close_family, is_family, same_ambient, Family};
use crate::graph::{extremal_family, is_graph_subgroup, FamilyKind, ProductTower};
use crate::group::{FiniteGroup, Subgroup};

pub use enumerate::{enumerate_realizable, enumerate_realizable_capped, DEFAULT_ENUMERATION_CAP};
pub use wreath::{
    compositions, is_realizable, is_realizable_within, realizable_closure, realizable_closure_within, scan_order,
    wreath_compose, Verdict, Witness,
};

pub(crate) use wreath::twisted_block_sum;

/// One family of subgroups of `G x S_n` for each `n ≤ N`.
#[derive(Clone)]
pub struct FamilySequence {
    tower: Arc<ProductTower>,
    families: Vec<Family>,
}

impl fmt::Debug for FamilySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<usize> = self.families.iter().map(Family::len).collect();
        write!(f, "FamilySequence({}, sizes {:?})", self.group().label(), sizes)
    }
}

impl PartialEq for FamilySequence {
    fn eq(&self, other: &Self) -> bool {
        same_group(self.group(), other.group()) && self.families == other.families
    }
}

impl Eq for FamilySequence {}

impl PartialOrd for FamilySequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: level by level, smaller families first, then by members.
impl Ord for FamilySequence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.families.len().cmp(&other.families.len()).then_with(|| {
            for (a, b) in self.families.iter().zip(&other.families) {
                let ord = a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    }
}

fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    same_ambient(a, b)
}

impl FamilySequence {
    /// Validates that there is one family per arity, each over `G x S_n`.
    pub fn new(tower: Arc<ProductTower>, families: Vec<Family>) -> Result<Self> {
        let seq = Self::from_closed(tower, families)?;
        for (n, f) in seq.families.iter().enumerate() {
            if let Err(v) = is_family(f.ambient(), f.iter(), seq.tower.limits())? {
                return Err(Error::InvalidSequence(format!("level {n} is not a family: {v}")));
            }
        }
        Ok(seq)
    }

    pub(crate) fn from_closed(tower: Arc<ProductTower>, families: Vec<Family>) -> Result<Self> {
        if families.len() != tower.max_arity() + 1 {
            return Err(Error::InvalidSequence(format!(
                "expected {} levels, got {}",
                tower.max_arity() + 1,
                families.len()
            )));
        }
        for (n, f) in families.iter().enumerate() {
            if !same_ambient(f.ambient(), tower.ambient(n)?) {
                return Err(Error::InvalidSequence(format!("level {n} does not live in G x S_{n}")));
            }
        }
        Ok(FamilySequence { tower, families })
    }

    /// Closes each level of seeds into a family.
    pub fn from_seeds(tower: Arc<ProductTower>, seeds: Vec<Vec<Subgroup>>) -> Result<Self> {
        if seeds.len() != tower.max_arity() + 1 {
            return Err(Error::InvalidSequence(format!(
                "expected {} levels, got {}",
                tower.max_arity() + 1,
                seeds.len()
            )));
        }
        let families = seeds
            .into_iter()
            .enumerate()
            .map(|(n, s)| close_family(tower.ambient(n)?, s, tower.limits()))
            .collect::<Result<Vec<_>>>()?;
        Ok(FamilySequence { tower, families })
    }

    /// The same named family at every arity.
    pub fn uniform(tower: Arc<ProductTower>, kind: &FamilyKind) -> Result<Self> {
        let kinds = vec![kind.clone(); tower.max_arity() + 1];
        Self::from_kinds(tower, &kinds)
    }

    /// Level `n` is the named family `kinds[n]`.
    pub fn from_kinds(tower: Arc<ProductTower>, kinds: &[FamilyKind]) -> Result<Self> {
        let families = kinds
            .iter()
            .enumerate()
            .map(|(n, k)| extremal_family(&tower, n, k))
            .collect::<Result<Vec<_>>>()?;
        Self::from_closed(tower, families)
    }

    pub fn tower(&self) -> &ProductTower {
        &self.tower
    }

    pub fn tower_arc(&self) -> &Arc<ProductTower> {
        &self.tower
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.tower.group()
    }

    pub fn max_arity(&self) -> usize {
        self.families.len() - 1
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn family(&self, n: usize) -> Option<&Family> {
        self.families.get(n)
    }

    /// Levelwise inclusion.
    pub fn is_subsequence(&self, other: &FamilySequence) -> Result<bool> {
        if !same_group(self.group(), other.group()) || self.families.len() != other.families.len() {
            return Err(Error::MixedSequences);
        }
        Ok(self.families.iter().zip(&other.families).all(|(a, b)| a.members().is_subset(b.members())))
    }

    /// True if every member of every level is a graph subgroup.
    pub fn is_graph_sequence(&self) -> bool {
        self.families
            .iter()
            .enumerate()
            .all(|(n, f)| f.iter().all(|m| is_graph_subgroup(&self.tower, n, m).unwrap_or(false)))
    }
}

/// Which subgroups `H ≤ G` must appear as `H x 1` at every arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every subgroup of `G`.
    Full,
    /// A family `𝓗` of subgroups of `G`.
    Subgroups(Family),
}

impl Coverage {
    pub fn contains(&self, h: &Subgroup) -> bool {
        match self {
            Coverage::Full => true,
            Coverage::Subgroups(f) => f.contains(h),
        }
    }

    pub fn scope(&self) -> Option<&Family> {
        match self {
            Coverage::Full => None,
            Coverage::Subgroups(f) => Some(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NInfinityViolation {
    /// The member meets `1 x S_n` nontrivially.
    NotFree { arity: usize, member: Subgroup },
    /// `H x 1` is required but absent.
    MissingBase { arity: usize, h: Subgroup },
}

impl fmt::Display for NInfinityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NInfinityViolation::NotFree { arity, member } => write!(
                f,
                "S_{arity} does not act freely: member {:?} of level {arity} meets 1 x S_{arity} nontrivially",
                member.elements()
            ),
            NInfinityViolation::MissingBase { arity, h } => {
                write!(f, "level {arity} is missing H x 1 for H = {:?}", h.elements())
            }
        }
    }
}

/// Checks that every member is a graph subgroup, then that each level
/// contains `H x 1` for every covered `H`.
pub fn validate_n_infinity(seq: &FamilySequence, coverage: &Coverage) -> Result<std::result::Result<(), NInfinityViolation>> {
    let tower = seq.tower();
    for (n, family) in seq.families().iter().enumerate() {
        for m in family.iter() {
            if !is_graph_subgroup(tower, n, m)? {
                return Ok(Err(NInfinityViolation::NotFree { arity: n, member: m.clone() }));
            }
        }
    }
    for (n, family) in seq.families().iter().enumerate() {
        for h in tower.subgroups() {
            if coverage.contains(h) && !family.contains(&tower.trivial_graph(n, h)?) {
                return Ok(Err(NInfinityViolation::MissingBase { arity: n, h: h.clone() }));
            }
        }
    }
    Ok(Ok(()))
}

/// Covering relations of levelwise inclusion, as `(smaller, larger)` index pairs.
pub fn sequence_poset(seqs: &[FamilySequence]) -> Result<Vec<(usize, usize)>> {
    let n = seqs.len();
    let mut below = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            below[i][j] = i != j && seqs[i].is_subsequence(&seqs[j])?;
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if below[i][j] && !(0..n).any(|m| below[i][m] && below[m][j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}
