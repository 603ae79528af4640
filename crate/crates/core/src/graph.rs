//! Graph subgroups `Γ(ρ) = {(h, ρ(h)) : h ∈ H}` of `G x S_n`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::families::{close_family, Family};
use crate::group::{
    all_subgroups, direct_product, homomorphisms, subgroup_as_group, DirectProduct, FiniteGroup, Homomorphism,
    Limits, Permutation, Subgroup,
};

/// `G` together with `S_n` and `G x S_n` for every arity `0..=max_arity`,
/// and the data shared by every computation over them: the subgroups of `G`
/// and all homomorphisms from each of them into each `S_n`.
///
/// Elements of `G x S_n` are indexed `g * n! + r` where `r` is the
/// lexicographic rank of the permutation.
pub struct ProductTower {
    group: Arc<FiniteGroup>,
    limits: Limits,
    levels: Vec<Level>,
    subgroups: Vec<Subgroup>,
    subgroup_index: HashMap<Subgroup, usize>,
    subgroup_groups: Vec<Arc<FiniteGroup>>,
}

struct Level {
    product: DirectProduct,
    perms: Vec<Permutation>,
    /// `homs[i]` are the images of all `H_i -> S_n`, indexed by position in `H_i`.
    homs: Vec<Vec<Vec<usize>>>,
}

impl std::fmt::Debug for ProductTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ProductTower({}, max arity {})", self.group.label(), self.max_arity())
    }
}

impl ProductTower {
    pub fn new(group: Arc<FiniteGroup>, max_arity: usize, limits: Limits) -> Result<Self> {
        let subgroups = all_subgroups(&group, &limits)?;
        let subgroup_index = subgroups.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let subgroup_groups: Vec<Arc<FiniteGroup>> =
            subgroups.iter().map(|s| subgroup_as_group(&group, s).0).collect();
        let mut levels = Vec::with_capacity(max_arity + 1);
        for n in 0..=max_arity {
            let sym = Arc::new(FiniteGroup::symmetric(n, &limits)?);
            let product = direct_product(&group, &sym, &limits)?;
            let homs = subgroup_groups
                .iter()
                .map(|h| homomorphisms(h, &sym).into_iter().map(|f| f.images().to_vec()).collect())
                .collect();
            levels.push(Level { product, perms: Permutation::all(n), homs });
        }
        Ok(ProductTower { group, limits, levels, subgroups, subgroup_index, subgroup_groups })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn max_arity(&self) -> usize {
        self.levels.len() - 1
    }

    fn level(&self, n: usize) -> Result<&Level> {
        self.levels.get(n).ok_or(Error::ArityOutOfRange { arity: n, max: self.max_arity() })
    }

    pub fn product(&self, n: usize) -> Result<&DirectProduct> {
        Ok(&self.level(n)?.product)
    }

    /// `G x S_n`.
    pub fn ambient(&self, n: usize) -> Result<&Arc<FiniteGroup>> {
        Ok(&self.level(n)?.product.group)
    }

    /// `S_n`.
    pub fn sym(&self, n: usize) -> Result<&Arc<FiniteGroup>> {
        Ok(&self.level(n)?.product.right)
    }

    /// The permutation with lexicographic rank `r` in `S_n`.
    pub fn perm(&self, n: usize, r: usize) -> &Permutation {
        &self.levels[n].perms[r]
    }

    /// Every subgroup of `G`, in canonical order.
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn subgroup_id(&self, h: &Subgroup) -> Option<usize> {
        self.subgroup_index.get(h).copied()
    }

    /// The `i`-th subgroup of `G` as a group in its own right.
    pub fn subgroup_group(&self, i: usize) -> &Arc<FiniteGroup> {
        &self.subgroup_groups[i]
    }

    /// Image arrays of all homomorphisms from the `i`-th subgroup into `S_n`.
    pub fn homs(&self, i: usize, n: usize) -> &[Vec<usize>] {
        &self.levels[n].homs[i]
    }

    /// `Γ(ρ)` from a subgroup id and an image array over its positions.
    pub(crate) fn graph_raw(&self, n: usize, h: usize, rho: &[usize]) -> Subgroup {
        let p = &self.levels[n].product;
        let elems = self.subgroups[h].elements().iter().zip(rho).map(|(&g, &s)| p.pair(g, s)).collect();
        Subgroup::from_sorted_unchecked(elems)
    }

    /// `H x 1` inside `G x S_n`.
    pub fn trivial_graph(&self, n: usize, h: &Subgroup) -> Result<Subgroup> {
        let p = self.product(n)?;
        let e = p.right.identity();
        Ok(Subgroup::from_sorted_unchecked(h.elements().iter().map(|&g| p.pair(g, e)).collect()))
    }

    /// Splits a graph subgroup into (subgroup id, image array), or `None`
    /// if it meets `1 x S_n` nontrivially.
    pub(crate) fn split_graph(&self, n: usize, s: &Subgroup) -> Option<(usize, Vec<usize>)> {
        let p = &self.levels[n].product;
        let mut hs = Vec::with_capacity(s.order());
        let mut rho = Vec::with_capacity(s.order());
        for &z in s.elements() {
            let (g, r) = p.split(z);
            if hs.last() == Some(&g) {
                return None;
            }
            hs.push(g);
            rho.push(r);
        }
        let id = self.subgroup_index.get(&Subgroup::from_sorted_unchecked(hs))?;
        Some((*id, rho))
    }
}

/// A subgroup `H ≤ G` with `ρ: H -> S_n`; `ρ` is defined on `H` as a group
/// whose element `i` is `H.elements()[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDatum {
    pub h: Subgroup,
    pub rho: Homomorphism,
    pub arity: usize,
}

impl GraphDatum {
    pub fn new(tower: &ProductTower, h: Subgroup, rho_images: Vec<usize>, arity: usize) -> Result<Self> {
        let id = tower
            .subgroup_id(&h)
            .ok_or_else(|| Error::Input(format!("{:?} is not a subgroup of {}", h.elements(), tower.group().label())))?;
        let rho = Homomorphism::new(tower.subgroup_group(id).clone(), tower.sym(arity)?.clone(), rho_images)?;
        Ok(GraphDatum { h, rho, arity })
    }

    /// `ρ(h)` as a permutation, for `h` given by ambient index.
    pub fn image_of<'t>(&self, tower: &'t ProductTower, g: usize) -> Option<&'t Permutation> {
        self.h.position(g).map(|i| tower.perm(self.arity, self.rho.apply(i)))
    }
}

pub fn graph_of(tower: &ProductTower, datum: &GraphDatum) -> Result<Subgroup> {
    let id = tower
        .subgroup_id(&datum.h)
        .ok_or_else(|| Error::Input("graph datum subgroup not found in G".into()))?;
    tower.level(datum.arity)?;
    Ok(tower.graph_raw(datum.arity, id, datum.rho.images()))
}

/// True iff `S ∩ (1 x S_n)` is trivial, i.e. the projection to `G` is injective on `S`.
pub fn is_graph_subgroup(tower: &ProductTower, n: usize, s: &Subgroup) -> Result<bool> {
    let p = tower.product(n)?;
    let mut last = None;
    for &z in s.elements() {
        let g = p.split(z).0;
        if last == Some(g) {
            return Ok(false);
        }
        last = Some(g);
    }
    Ok(true)
}

pub fn decompose_graph(tower: &ProductTower, n: usize, s: &Subgroup) -> Result<GraphDatum> {
    tower.level(n)?;
    let (id, rho) = tower.split_graph(n, s).ok_or(Error::NotAGraph { arity: n })?;
    let rho = Homomorphism::new(tower.subgroup_group(id).clone(), tower.sym(n)?.clone(), rho)?;
    Ok(GraphDatum { h: tower.subgroups()[id].clone(), rho, arity: n })
}

/// Every graph subgroup of `G x S_n`, ordered by `H` then by `ρ`.
pub fn all_graph_subgroups(tower: &ProductTower, n: usize) -> Result<Vec<(GraphDatum, Subgroup)>> {
    let sym = tower.sym(n)?.clone();
    let mut out = Vec::new();
    for (id, h) in tower.subgroups().iter().enumerate() {
        for rho in tower.homs(id, n) {
            let gamma = tower.graph_raw(n, id, rho);
            let rho = Homomorphism::new_unchecked(tower.subgroup_group(id).clone(), sym.clone(), rho.clone());
            out.push((GraphDatum { h: h.clone(), rho, arity: n }, gamma));
        }
    }
    Ok(out)
}

/// The named families of subgroups of `G x S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// `{H x 1 : H ≤ G}`.
    TrivialGraphs,
    /// Every graph subgroup.
    AllGraphs,
    /// `{1 x K : K ≤ S_n}`.
    Rezk,
    /// Every subgroup of `G x S_n`.
    Everything,
    /// `{H x 1 : H ∈ 𝓗}`, closed.
    HGraphs(Vec<Subgroup>),
}

pub fn extremal_family(tower: &ProductTower, n: usize, kind: &FamilyKind) -> Result<Family> {
    let ambient = tower.ambient(n)?.clone();
    let limits = tower.limits();
    match kind {
        FamilyKind::TrivialGraphs => {
            let members = tower.subgroups().iter().map(|h| tower.trivial_graph(n, h)).collect::<Result<BTreeSet<_>>>()?;
            Ok(Family::from_closed(ambient, members))
        }
        FamilyKind::AllGraphs => {
            let members = all_graph_subgroups(tower, n)?.into_iter().map(|(_, s)| s).collect();
            Ok(Family::from_closed(ambient, members))
        }
        FamilyKind::Rezk => {
            let p = tower.product(n)?;
            let e = p.left.identity();
            let members = all_subgroups(&p.right, limits)?
                .into_iter()
                .map(|k| Subgroup::from_sorted_unchecked(k.elements().iter().map(|&s| p.pair(e, s)).collect()))
                .collect();
            Ok(Family::from_closed(ambient, members))
        }
        FamilyKind::Everything => Ok(Family::from_closed(ambient.clone(), all_subgroups(&ambient, limits)?.into_iter().collect())),
        FamilyKind::HGraphs(hs) => {
            let seeds = hs.iter().map(|h| tower.trivial_graph(n, h)).collect::<Result<Vec<_>>>()?;
            close_family(&ambient, seeds, limits)
        }
    }
}
