use std::collections::VecDeque;
use std::sync::Arc;

use super::{subgroup_generated, FiniteGroup};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    images: Vec<usize>,
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
            && (Arc::ptr_eq(&self.source, &other.source) || self.source == other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || self.target == other.target)
    }
}

impl Eq for Homomorphism {}

impl Homomorphism {
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, images: Vec<usize>) -> Result<Self> {
        let h = Homomorphism { source, target, images };
        h.check()?;
        Ok(h)
    }

    pub(crate) fn new_unchecked(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, images: Vec<usize>) -> Self {
        debug_assert_eq!(images.len(), source.order());
        Homomorphism { source, target, images }
    }

    pub fn trivial(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>) -> Self {
        let images = vec![target.identity(); source.order()];
        Homomorphism { source, target, images }
    }

    /// Verifies `f(ab) = f(a) f(b)` exhaustively.
    pub fn check(&self) -> Result<()> {
        let (s, t) = (&*self.source, &*self.target);
        if self.images.len() != s.order() {
            return Err(Error::InvalidHomomorphism(format!(
                "{} images for a source of order {}",
                self.images.len(),
                s.order()
            )));
        }
        if let Some(&bad) = self.images.iter().find(|&&x| x >= t.order()) {
            return Err(Error::InvalidHomomorphism(format!("image {bad} outside the target")));
        }
        if self.images[s.identity()] != t.identity() {
            return Err(Error::InvalidHomomorphism("identity not preserved".into()));
        }
        for a in 0..s.order() {
            for b in 0..s.order() {
                if self.images[s.mul(a, b)] != t.mul(self.images[a], self.images[b]) {
                    return Err(Error::InvalidHomomorphism(format!("f({a}*{b}) != f({a})*f({b})")));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Homomorphism) -> Homomorphism {
        let images = other.images.iter().map(|&y| self.images[y]).collect();
        Homomorphism { source: other.source.clone(), target: self.target.clone(), images }
    }

    pub fn is_identity(&self) -> bool {
        (Arc::ptr_eq(&self.source, &self.target) || self.source == self.target)
            && self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn is_trivial(&self) -> bool {
        let e = self.target.identity();
        self.images.iter().all(|&x| x == e)
    }
}

/// Greedy generating set: repeatedly adds the element whose inclusion
/// generates the largest subgroup (ties broken by smallest index).
pub fn minimal_generating_set(group: &FiniteGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut current = 1;
    while current < group.order() {
        let mut best = (0, usize::MAX);
        for x in 0..group.order() {
            let mut trial = gens.clone();
            trial.push(x);
            let size = subgroup_generated(group, &trial).order();
            if size > best.0 {
                best = (size, x);
            }
        }
        gens.push(best.1);
        current = best.0;
    }
    gens
}

/// Traversal of a group along right multiplication by generators.
struct WordTree {
    gens: Vec<usize>,
    /// `(element, parent, generator slot)` in breadth-first order, identity first.
    order: Vec<(usize, usize, usize)>,
}

impl WordTree {
    fn new(group: &FiniteGroup, gens: Vec<usize>) -> Self {
        let mut seen = vec![false; group.order()];
        let e = group.identity();
        seen[e] = true;
        let mut order = vec![(e, e, usize::MAX)];
        let mut queue = VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            for (i, &g) in gens.iter().enumerate() {
                let y = group.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    order.push((y, x, i));
                    queue.push_back(y);
                }
            }
        }
        debug_assert_eq!(order.len(), group.order());
        WordTree { gens, order }
    }

    /// Extends generator images to a full map, or `None` on a contradiction.
    fn extend(&self, source: &FiniteGroup, target: &FiniteGroup, gen_images: &[usize]) -> Option<Vec<usize>> {
        let mut images = vec![usize::MAX; source.order()];
        images[source.identity()] = target.identity();
        for &(x, parent, slot) in &self.order[1..] {
            images[x] = target.mul(images[parent], gen_images[slot]);
        }
        for &(x, _, _) in &self.order {
            for (slot, &g) in self.gens.iter().enumerate() {
                if images[source.mul(x, g)] != target.mul(images[x], gen_images[slot]) {
                    return None;
                }
            }
        }
        Some(images)
    }
}

/// All homomorphisms `source -> target`, sorted lexicographically by image array.
pub fn homomorphisms(source: &Arc<FiniteGroup>, target: &Arc<FiniteGroup>) -> Vec<Homomorphism> {
    let gens = minimal_generating_set(source);
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let k = source.element_order(g);
            (0..target.order()).filter(|&t| k % target.element_order(t) == 0).collect()
        })
        .collect();
    let tree = WordTree::new(source, gens);
    let mut found = Vec::new();
    if candidates.iter().all(|c| !c.is_empty()) {
        let lens: Vec<usize> = candidates.iter().map(Vec::len).collect();
        let mut choice = vec![0usize; candidates.len()];
        loop {
            let gen_images: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if let Some(images) = tree.extend(source, target, &gen_images) {
                found.push(images);
            }
            if !advance(&mut choice, &lens) {
                break;
            }
        }
    }
    found.sort();
    found.dedup();
    found
        .into_iter()
        .map(|images| Homomorphism::new_unchecked(source.clone(), target.clone(), images))
        .collect()
}

/// Odometer step over mixed radices; returns `false` after the last tuple.
pub(crate) fn advance(choice: &mut [usize], radices: &[usize]) -> bool {
    for slot in (0..choice.len()).rev() {
        choice[slot] += 1;
        if choice[slot] < radices[slot] {
            return true;
        }
        choice[slot] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_builtin, Limits};

    fn g(spec: &str) -> Arc<FiniteGroup> {
        Arc::new(make_builtin(spec, &Limits::default()).unwrap())
    }

    /// Counts homomorphisms by trying every function source -> target.
    fn brute_force_count(s: &FiniteGroup, t: &FiniteGroup) -> usize {
        let (n, m) = (s.order(), t.order());
        let mut f = vec![0usize; n];
        let mut count = 0;
        loop {
            let ok = (0..n).all(|a| (0..n).all(|b| f[s.mul(a, b)] == t.mul(f[a], f[b])));
            if ok {
                count += 1;
            }
            let mut i = 0;
            while i < n {
                f[i] += 1;
                if f[i] < m {
                    break;
                }
                f[i] = 0;
                i += 1;
            }
            if i == n {
                return count;
            }
        }
    }

    #[test]
    fn small_examples() {
        let homs = homomorphisms(&g("C2"), &g("S2"));
        assert_eq!(homs.len(), 2);
        assert!(homs[0].is_trivial());
        assert_eq!(homs[1].images(), &[0, 1]);
        assert_eq!(homomorphisms(&g("C3"), &g("S2")).len(), 1);
        for s in ["C1", "C4", "S3", "K4"] {
            assert_eq!(homomorphisms(&g(s), &g("C1")).len(), 1);
        }
        assert_eq!(homomorphisms(&g("C1"), &g("S3")).len(), 1);
    }

    #[test]
    fn counts_match_brute_force() {
        let groups = ["C1", "C2", "C3", "C4", "K4", "S3", "C6", "D4", "S2", "C5"];
        for s in groups {
            for t in groups {
                let (src, tgt) = (g(s), g(t));
                if (tgt.order() as f64).powi(src.order() as i32) > 1e6 {
                    continue;
                }
                let homs = homomorphisms(&src, &tgt);
                assert_eq!(homs.len(), brute_force_count(&src, &tgt), "Hom({s},{t})");
                for h in &homs {
                    h.check().unwrap();
                }
                assert!(homs.windows(2).all(|w| w[0].images() < w[1].images()));
            }
        }
    }

    #[test]
    fn generating_set_generates() {
        for s in ["C1", "C6", "K4", "S3", "D4", "S4", "C2xC2xC2"] {
            let grp = g(s);
            let gens = minimal_generating_set(&grp);
            assert_eq!(subgroup_generated(&grp, &gens).order(), grp.order(), "{s}");
        }
        assert_eq!(minimal_generating_set(&g("C2xC2xC2")).len(), 3);
        assert_eq!(minimal_generating_set(&g("S4")).len(), 2);
    }

    #[test]
    fn check_rejects_non_homomorphism() {
        let (c2, c3) = (g("C2"), g("C3"));
        assert!(Homomorphism::new(c2.clone(), c3.clone(), vec![0, 1]).is_err());
        assert!(Homomorphism::new(c3, c2, vec![1, 0, 0]).is_err());
    }
}
