use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `{0, .., n-1}` in 0-based one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Input(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Rank among all permutations of the same degree in lexicographic order
    /// of one-line notation.
    pub fn lex_rank(&self) -> usize {
        let n = self.images.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    pub fn from_lex_rank(n: usize, mut rank: usize) -> Permutation {
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let images = digits.into_iter().map(|d| pool.remove(d)).collect();
        Permutation { images }
    }

    /// All permutations of degree `n`, in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        (0..factorial(n)).map(|r| Permutation::from_lex_rank(n, r)).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_rank_roundtrips_and_orders() {
        for n in 0..=5 {
            let all = Permutation::all(n);
            assert_eq!(all.len(), factorial(n));
            for (r, p) in all.iter().enumerate() {
                assert_eq!(p.lex_rank(), r);
            }
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn compose_applies_right_first() {
        let a = Permutation::new(vec![1, 0, 2]).unwrap();
        let b = Permutation::new(vec![0, 2, 1]).unwrap();
        // a∘b sends 1 -> b -> 2 -> a -> 2
        assert_eq!(a.compose(&b).images(), &[1, 2, 0]);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![2, 0]).is_err());
    }
}
