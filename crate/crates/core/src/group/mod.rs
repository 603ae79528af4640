//! Finite groups as Cayley tables.
//!
//! Every group in this crate is a multiplication table over element indices
//! `0..order`. This makes products like `G x S_n` a matter of pairing indices,
//! and lets subgroups be plain sorted index arrays.

mod hom;
mod perm;
mod subgroup;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use hom::advance as advance_odometer;
pub use hom::{homomorphisms, minimal_generating_set, Homomorphism};
pub use perm::{factorial, Permutation};
pub use subgroup::{
    all_subgroups, conjugacy_classes, conjugate, subgroup_as_group, subgroup_generated, Subgroup,
};

/// Resource caps shared by group construction and subgroup enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest group order for which a Cayley table is materialized.
    pub max_order: usize,
    /// Associativity is checked on every triple up to this order, sampled above.
    pub full_associativity_check: usize,
    /// Largest order accepted by [`all_subgroups`].
    pub subgroup_enumeration: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: 2048,
            full_associativity_check: 256,
            subgroup_enumeration: 384,
        }
    }
}

const ASSOCIATIVITY_SAMPLES: usize = 10_000;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    label: String,
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.label, self.order)
    }
}

impl FiniteGroup {
    /// Builds a group from a row-major Cayley table, validating the group axioms.
    pub fn from_table(label: impl Into<String>, rows: Vec<Vec<usize>>, limits: &Limits) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if order > limits.max_order {
            return Err(Error::OrderCap { order, cap: limits.max_order });
        }
        let mut table = Vec::with_capacity(order * order);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidTable(format!(
                    "row {a} has length {} but the table has {order} rows",
                    row.len()
                )));
            }
            for &x in row {
                if x >= order {
                    return Err(Error::InvalidTable(format!("entry {x} in row {a} is out of range")));
                }
            }
            table.extend_from_slice(row);
        }
        Self::from_flat(label.into(), order, table, limits)
    }

    fn from_flat(label: String, order: usize, table: Vec<usize>, limits: &Limits) -> Result<Self> {
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e * order + x] == x && table[x * order + e] == x))
            .ok_or_else(|| Error::InvalidTable("no two-sided identity".into()))?;
        let mut inverse = vec![usize::MAX; order];
        for x in 0..order {
            let y = (0..order)
                .find(|&y| table[x * order + y] == identity)
                .ok_or_else(|| Error::InvalidTable(format!("element {x} has no inverse")))?;
            if table[y * order + x] != identity {
                return Err(Error::InvalidTable(format!("element {x} has no two-sided inverse")));
            }
            inverse[x] = y;
        }
        let group = FiniteGroup { label, order, table, identity, inverse };
        group.check_associativity(limits)?;
        Ok(group)
    }

    fn check_associativity(&self, limits: &Limits) -> Result<()> {
        let n = self.order;
        let fail = |a, b, c| Err(Error::InvalidTable(format!("not associative at ({a},{b},{c})")));
        if n <= limits.full_associativity_check {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return fail(a, b, c);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_7ab1e);
            for _ in 0..ASSOCIATIVITY_SAMPLES {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return fail(a, b, c);
                }
            }
        }
        Ok(())
    }

    /// Trusted constructor for tables produced by this crate; axioms are
    /// only checked in debug builds.
    fn from_trusted(label: String, order: usize, table: Vec<usize>, limits: &Limits) -> Result<Self> {
        if order > limits.max_order {
            return Err(Error::OrderCap { order, cap: limits.max_order });
        }
        if cfg!(debug_assertions) && order <= 64 {
            return Self::from_flat(label, order, table, limits);
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e * order + x] == x))
            .expect("trusted table has an identity");
        let inverse = (0..order)
            .map(|x| (0..order).find(|&y| table[x * order + y] == identity).expect("trusted table has inverses"))
            .collect();
        Ok(FiniteGroup { label, order, table, identity, inverse })
    }

    pub fn trivial() -> Self {
        FiniteGroup {
            label: "C1".into(),
            order: 1,
            table: vec![0],
            identity: 0,
            inverse: vec![0],
        }
    }

    /// Cyclic group of order `n`; element `i` is the residue `i`.
    pub fn cyclic(n: usize, limits: &Limits) -> Result<Self> {
        if n == 0 {
            return Err(Error::GroupSpec { spec: "C0".into(), reason: "order must be positive".into() });
        }
        if n > limits.max_order {
            return Err(Error::OrderCap { order: n, cap: limits.max_order });
        }
        let table = (0..n * n).map(|ab| (ab / n + ab % n) % n).collect();
        Self::from_trusted(format!("C{n}"), n, table, limits)
    }

    /// Symmetric group on `n` letters; element `r` is the permutation of
    /// lexicographic rank `r`, and the product is composition `a ∘ b`.
    pub fn symmetric(n: usize, limits: &Limits) -> Result<Self> {
        let order = checked_factorial(n).filter(|&o| o <= limits.max_order).ok_or(Error::OrderCap {
            order: checked_factorial(n).unwrap_or(usize::MAX),
            cap: limits.max_order,
        })?;
        let perms = Permutation::all(n);
        let mut table = Vec::with_capacity(order * order);
        for a in &perms {
            for b in &perms {
                table.push(a.compose(b).lex_rank());
            }
        }
        Self::from_trusted(format!("S{n}"), order, table, limits)
    }

    /// Dihedral group of order `2n`; `r^i s^j` has index `j*n + i`, with
    /// `s r s = r^-1`.
    pub fn dihedral(n: usize, limits: &Limits) -> Result<Self> {
        if n == 0 {
            return Err(Error::GroupSpec { spec: "D0".into(), reason: "n must be positive".into() });
        }
        let order = 2 * n;
        if order > limits.max_order {
            return Err(Error::OrderCap { order, cap: limits.max_order });
        }
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            let (i1, j1) = (a % n, a / n);
            for b in 0..order {
                let (i2, j2) = (b % n, b / n);
                let i = if j1 == 0 { (i1 + i2) % n } else { (i1 + n - i2) % n };
                let j = (j1 + j2) % 2;
                table.push(j * n + i);
            }
        }
        Self::from_trusted(format!("D{n}"), order, table, limits)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverse
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson { label: self.label.clone(), order: self.order, table: self.rows() }
    }
}

fn checked_factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// On-disk form of a group: `{"label", "order", "table"}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupJson {
    pub label: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl GroupJson {
    pub fn into_group(self, limits: &Limits) -> Result<FiniteGroup> {
        if self.order != self.table.len() {
            return Err(Error::InvalidTable(format!(
                "declared order {} but table has {} rows",
                self.order,
                self.table.len()
            )));
        }
        FiniteGroup::from_table(self.label, self.table, limits)
    }
}

/// `G x K` together with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectProduct {
    pub group: Arc<FiniteGroup>,
    pub left: Arc<FiniteGroup>,
    pub right: Arc<FiniteGroup>,
}

impl DirectProduct {
    /// Index of the pair `(x, y)`.
    #[inline]
    pub fn pair(&self, x: usize, y: usize) -> usize {
        x * self.right.order() + y
    }

    #[inline]
    pub fn split(&self, z: usize) -> (usize, usize) {
        (z / self.right.order(), z % self.right.order())
    }

    pub fn projection_left(&self) -> Homomorphism {
        let images = (0..self.group.order()).map(|z| self.split(z).0).collect();
        Homomorphism::new_unchecked(self.group.clone(), self.left.clone(), images)
    }

    pub fn projection_right(&self) -> Homomorphism {
        let images = (0..self.group.order()).map(|z| self.split(z).1).collect();
        Homomorphism::new_unchecked(self.group.clone(), self.right.clone(), images)
    }

    pub fn inclusion_left(&self) -> Homomorphism {
        let e = self.right.identity();
        let images = (0..self.left.order()).map(|x| self.pair(x, e)).collect();
        Homomorphism::new_unchecked(self.left.clone(), self.group.clone(), images)
    }

    pub fn inclusion_right(&self) -> Homomorphism {
        let e = self.left.identity();
        let images = (0..self.right.order()).map(|y| self.pair(e, y)).collect();
        Homomorphism::new_unchecked(self.right.clone(), self.group.clone(), images)
    }
}

/// Direct product with pair indexing `(x, y) -> x * |right| + y`.
pub fn direct_product(left: &Arc<FiniteGroup>, right: &Arc<FiniteGroup>, limits: &Limits) -> Result<DirectProduct> {
    let (n1, n2) = (left.order(), right.order());
    let order = n1
        .checked_mul(n2)
        .filter(|&o| o <= limits.max_order)
        .ok_or(Error::OrderCap { order: n1.saturating_mul(n2), cap: limits.max_order })?;
    let mut table = Vec::with_capacity(order * order);
    for a in 0..order {
        let (x1, y1) = (a / n2, a % n2);
        for b in 0..order {
            let (x2, y2) = (b / n2, b % n2);
            table.push(left.mul(x1, x2) * n2 + right.mul(y1, y2));
        }
    }
    let inverse = (0..order).map(|a| left.inv(a / n2) * n2 + right.inv(a % n2)).collect();
    let group = FiniteGroup {
        label: format!("{}x{}", left.label(), right.label()),
        order,
        table,
        identity: left.identity() * n2 + right.identity(),
        inverse,
    };
    Ok(DirectProduct { group: Arc::new(group), left: left.clone(), right: right.clone() })
}

/// Parses `C<n> | S<n> | D<n> | K4 | <spec>x<spec>` (products left-associative).
pub fn make_builtin(spec: &str, limits: &Limits) -> Result<FiniteGroup> {
    let spec = spec.trim();
    let parse_err = |reason: &str| Error::GroupSpec { spec: spec.to_string(), reason: reason.to_string() };
    if spec.is_empty() {
        return Err(parse_err("empty spec"));
    }
    let mut acc: Option<Arc<FiniteGroup>> = None;
    for factor in spec.split('x') {
        let g = Arc::new(parse_factor(factor).map_err(|r| match r {
            Error::GroupSpec { reason, .. } => parse_err(&reason),
            other => other,
        })?(limits)?);
        acc = Some(match acc {
            None => g,
            Some(prev) => direct_product(&prev, &g, limits)?.group,
        });
    }
    let group = Arc::try_unwrap(acc.expect("split yields at least one factor")).unwrap_or_else(|a| (*a).clone());
    Ok(group.with_label(spec))
}

type Ctor = Box<dyn Fn(&Limits) -> Result<FiniteGroup>>;

fn parse_factor(factor: &str) -> Result<Ctor> {
    let err = |reason: String| Error::GroupSpec { spec: factor.to_string(), reason };
    if factor == "K4" {
        return Ok(Box::new(|l: &Limits| {
            let c2 = Arc::new(FiniteGroup::cyclic(2, l)?);
            let p = direct_product(&c2, &c2, l)?;
            Ok((*p.group).clone().with_label("K4"))
        }));
    }
    let mut chars = factor.chars();
    let kind = chars.next().ok_or_else(|| err("empty factor".into()))?;
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(format!("expected a number after {kind:?}")));
    }
    let n: usize = digits.parse().map_err(|_| err("number too large".into()))?;
    match kind {
        'C' if n >= 1 => Ok(Box::new(move |l: &Limits| FiniteGroup::cyclic(n, l))),
        'S' => Ok(Box::new(move |l: &Limits| FiniteGroup::symmetric(n, l))),
        'D' if n >= 1 => Ok(Box::new(move |l: &Limits| FiniteGroup::dihedral(n, l))),
        'C' | 'D' => Err(err("index must be positive".into())),
        other => Err(err(format!("unknown group family {other:?}"))),
    }
}
