//! Families of subgroups: sets closed under passing to subgroups and under
//! conjugation, stored literally (every member, not class representatives).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{all_subgroups, conjugate, subgroup_as_group, FiniteGroup, Limits, Subgroup};

#[derive(Clone)]
pub struct Family {
    ambient: Arc<FiniteGroup>,
    members: BTreeSet<Subgroup>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family")
            .field("ambient", &self.ambient.label())
            .field("members", &self.members)
            .finish()
    }
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        same_ambient(&self.ambient, &other.ambient) && self.members == other.members
    }
}

impl Eq for Family {}

pub(crate) fn same_ambient(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_ambient(a: &Family, b: &Family) -> Result<()> {
    if same_ambient(&a.ambient, &b.ambient) {
        Ok(())
    } else {
        Err(Error::AmbientMismatch {
            left: a.ambient.label().to_string(),
            right: b.ambient.label().to_string(),
        })
    }
}

impl Family {
    pub fn empty(ambient: Arc<FiniteGroup>) -> Self {
        Family { ambient, members: BTreeSet::new() }
    }

    /// The caller guarantees `members` is closed.
    pub(crate) fn from_closed(ambient: Arc<FiniteGroup>, members: BTreeSet<Subgroup>) -> Self {
        Family { ambient, members }
    }

    pub fn ambient(&self) -> &Arc<FiniteGroup> {
        &self.ambient
    }

    pub fn members(&self) -> &BTreeSet<Subgroup> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Subgroup) -> bool {
        self.members.contains(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subgroup> {
        self.members.iter()
    }
}

/// All subgroups of `member`, expressed in the ambient group's indices.
pub(crate) fn subgroups_within(ambient: &Arc<FiniteGroup>, member: &Subgroup, limits: &Limits) -> Result<Vec<Subgroup>> {
    let (sub, embedding) = subgroup_as_group(ambient, member);
    let inner = all_subgroups(&sub, limits)?;
    Ok(inner
        .into_iter()
        .map(|s| {
            let mut elems: Vec<usize> = s.elements().iter().map(|&i| embedding.apply(i)).collect();
            elems.sort_unstable();
            Subgroup::from_sorted_unchecked(elems)
        })
        .collect())
}

/// Smallest family containing `seeds`.
pub fn close_family(
    ambient: &Arc<FiniteGroup>,
    seeds: impl IntoIterator<Item = Subgroup>,
    limits: &Limits,
) -> Result<Family> {
    let mut members = BTreeSet::new();
    let mut pending: Vec<Subgroup> = seeds.into_iter().collect();
    while let Some(s) = pending.pop() {
        if members.contains(&s) {
            continue;
        }
        for sub in subgroups_within(ambient, &s, limits)? {
            if !members.contains(&sub) && sub != s {
                pending.push(sub);
            }
        }
        for g in 0..ambient.order() {
            let c = conjugate(ambient, &s, g);
            if !members.contains(&c) && c != s {
                pending.push(c);
            }
        }
        members.insert(s);
    }
    Ok(Family { ambient: ambient.clone(), members })
}

/// Why a set of subgroups fails to be a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyViolation {
    MissingSubgroup { member: Subgroup, missing: Subgroup },
    MissingConjugate { member: Subgroup, by: usize, missing: Subgroup },
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::MissingSubgroup { member, missing } => write!(
                f,
                "member {:?} has subgroup {:?} which is not a member",
                member.elements(),
                missing.elements()
            ),
            FamilyViolation::MissingConjugate { member, by, missing } => write!(
                f,
                "conjugate of member {:?} by {by} is {:?}, which is not a member",
                member.elements(),
                missing.elements()
            ),
        }
    }
}

/// Checks the family axioms; reports the first violation in member order.
pub fn is_family<'a>(
    ambient: &Arc<FiniteGroup>,
    members: impl IntoIterator<Item = &'a Subgroup>,
    limits: &Limits,
) -> Result<std::result::Result<(), FamilyViolation>> {
    let set: BTreeSet<&Subgroup> = members.into_iter().collect();
    for &m in &set {
        for sub in subgroups_within(ambient, m, limits)? {
            if !set.contains(&sub) {
                return Ok(Err(FamilyViolation::MissingSubgroup { member: m.clone(), missing: sub }));
            }
        }
        for g in 0..ambient.order() {
            let c = conjugate(ambient, m, g);
            if !set.contains(&c) {
                return Ok(Err(FamilyViolation::MissingConjugate { member: m.clone(), by: g, missing: c }));
            }
        }
    }
    Ok(Ok(()))
}

pub fn union(a: &Family, b: &Family) -> Result<Family> {
    check_ambient(a, b)?;
    let members = a.members.union(&b.members).cloned().collect();
    Ok(Family { ambient: a.ambient.clone(), members })
}

pub fn intersection(a: &Family, b: &Family) -> Result<Family> {
    check_ambient(a, b)?;
    let members = a.members.intersection(&b.members).cloned().collect();
    Ok(Family { ambient: a.ambient.clone(), members })
}

pub fn is_subfamily(a: &Family, b: &Family) -> Result<bool> {
    check_ambient(a, b)?;
    Ok(a.members.is_subset(&b.members))
}
