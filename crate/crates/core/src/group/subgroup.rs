use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use super::{FiniteGroup, Homomorphism, Limits};
use crate::error::{Error, Result};

/// A subgroup in canonical form: its sorted, duplicate-free element indices.
///
/// Subgroups do not carry their ambient group; two subgroups compare equal
/// iff their element arrays are identical. The total order is by size, then
/// lexicographically by elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elements
            .len()
            .cmp(&other.elements.len())
            .then_with(|| self.elements.cmp(&other.elements))
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Subgroup {
    /// Wraps an element set, checking that it is a subgroup of `group`.
    pub fn new(group: &FiniteGroup, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if let Some(&x) = elements.iter().find(|&&x| x >= group.order()) {
            return Err(Error::Input(format!("element {x} outside {}", group.label())));
        }
        let s = Subgroup { elements };
        if !s.contains(group.identity()) {
            return Err(Error::Input("subgroup must contain the identity".into()));
        }
        for &a in &s.elements {
            if !s.contains(group.inv(a)) {
                return Err(Error::Input(format!("not closed under inverse at {a}")));
            }
            for &b in &s.elements {
                if !s.contains(group.mul(a, b)) {
                    return Err(Error::Input(format!("not closed under product at ({a},{b})")));
                }
            }
        }
        Ok(s)
    }

    /// Caller guarantees `elements` is sorted, duplicate-free and a subgroup.
    pub(crate) fn from_sorted_unchecked(elements: Vec<usize>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Subgroup { elements }
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Subgroup { elements: vec![group.identity()] }
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Subgroup { elements: (0..group.order()).collect() }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.order() <= other.order() && self.elements.iter().all(|&x| other.contains(x))
    }

    /// Position of `x` within the element array.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }
}

/// Smallest subgroup containing `gens`, by closing under right
/// multiplication by the generators.
pub fn subgroup_generated(group: &FiniteGroup, gens: &[usize]) -> Subgroup {
    let mut seen = vec![false; group.order()];
    let e = group.identity();
    seen[e] = true;
    let mut frontier = vec![e];
    let mut elements = vec![e];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = group.mul(x, g);
            if !seen[y] {
                seen[y] = true;
                elements.push(y);
                frontier.push(y);
            }
        }
    }
    elements.sort_unstable();
    Subgroup { elements }
}

/// `{g s g^-1 : s in S}`.
pub fn conjugate(group: &FiniteGroup, s: &Subgroup, g: usize) -> Subgroup {
    let gi = group.inv(g);
    let mut elements: Vec<usize> = s.elements.iter().map(|&x| group.mul(group.mul(g, x), gi)).collect();
    elements.sort_unstable();
    Subgroup { elements }
}

/// Every subgroup exactly once, in canonical order.
///
/// Seeds with the cyclic subgroups and closes under joins with cyclic
/// subgroups; every subgroup is a join of cyclic ones, so this reaches the
/// full lattice.
pub fn all_subgroups(group: &FiniteGroup, limits: &Limits) -> Result<Vec<Subgroup>> {
    if group.order() > limits.subgroup_enumeration {
        return Err(Error::SubgroupCap { order: group.order(), cap: limits.subgroup_enumeration });
    }
    let mut cyclic: Vec<(usize, Subgroup)> = Vec::new();
    let mut cyclic_seen = HashSet::new();
    for x in 0..group.order() {
        let c = subgroup_generated(group, &[x]);
        if cyclic_seen.insert(c.clone()) {
            cyclic.push((x, c));
        }
    }
    // Each found subgroup keeps a short generating set so joins stay cheap.
    let mut found: HashSet<Subgroup> = HashSet::new();
    let mut queue: Vec<(Vec<usize>, Subgroup)> = Vec::new();
    for (x, c) in &cyclic {
        if found.insert(c.clone()) {
            queue.push((vec![*x], c.clone()));
        }
    }
    while let Some((gens, s)) = queue.pop() {
        for (x, c) in &cyclic {
            if c.is_subgroup_of(&s) {
                continue;
            }
            let mut joined_gens = gens.clone();
            joined_gens.push(*x);
            let joined = subgroup_generated(group, &joined_gens);
            if found.insert(joined.clone()) {
                queue.push((joined_gens, joined));
            }
        }
    }
    let mut all: Vec<Subgroup> = found.into_iter().collect();
    all.sort();
    Ok(all)
}

/// The subgroup as a group in its own right; element `i` is `S.elements[i]`.
pub fn subgroup_as_group(group: &Arc<FiniteGroup>, s: &Subgroup) -> (Arc<FiniteGroup>, Homomorphism) {
    let k = s.order();
    let mut table = Vec::with_capacity(k * k);
    for &a in &s.elements {
        for &b in &s.elements {
            table.push(s.position(group.mul(a, b)).expect("subgroup is closed"));
        }
    }
    let identity = s.position(group.identity()).expect("subgroup contains identity");
    let inverse = s.elements.iter().map(|&a| s.position(group.inv(a)).expect("closed under inverse")).collect();
    let sub = Arc::new(FiniteGroup {
        label: format!("{}<{}>", group.label(), k),
        order: k,
        table,
        identity,
        inverse,
    });
    let embedding = Homomorphism::new_unchecked(sub.clone(), group.clone(), s.elements.clone());
    (sub, embedding)
}

/// Conjugacy classes of a list of subgroups, as index lists into `subgroups`.
///
/// Classes are ordered by their first member; members keep input order.
pub fn conjugacy_classes(group: &FiniteGroup, subgroups: &[Subgroup]) -> Vec<Vec<usize>> {
    let index: std::collections::HashMap<&Subgroup, usize> =
        subgroups.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut assigned = vec![false; subgroups.len()];
    let mut classes = Vec::new();
    for i in 0..subgroups.len() {
        if assigned[i] {
            continue;
        }
        let orbit: BTreeSet<usize> = (0..group.order())
            .filter_map(|g| index.get(&conjugate(group, &subgroups[i], g)).copied())
            .collect();
        for &j in &orbit {
            assigned[j] = true;
        }
        classes.push(orbit.into_iter().collect());
    }
    classes
}
