//! Permutations of `{0, .., k-1}`.
//!
//! Internally sheets are zero-based; file formats use the one-based image
//! list and convert at the boundary.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A permutation `g` of `[k]`, stored as its image list `g(0), .., g(k-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return Err(Error::MalformedInput(format!(
                    "{images:?} is not a permutation of 0..{k}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    /// Parses the one-based image list used in voltage files.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::MalformedInput(format!(
                "{images:?} is not one-based"
            )));
        }
        Self::from_images(images.iter().map(|&x| x - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x + 1).collect()
    }

    /// The cycle `(0 1 .. k-1)` raised to `power`.
    pub fn cycle_power(k: usize, power: usize) -> Self {
        Permutation((0..k).map(|j| (j + power) % k).collect())
    }

    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(a, b);
        Permutation(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, j: usize) -> usize {
        self.0[j]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (j, &gj) in self.0.iter().enumerate() {
            inv[gj] = j;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &gj)| j == gj)
    }

    /// +1 for even permutations, -1 for odd.
    pub fn sign(&self) -> i8 {
        let mut visited = vec![false; self.0.len()];
        let mut transpositions = 0;
        for start in 0..self.0.len() {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !visited[j] {
                visited[j] = true;
                j = self.0[j];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Permutation matrix `P` with `P[(l, j)] = 1` iff `l = g(j)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let k = self.0.len();
        let mut p = DMatrix::zeros(k, k);
        for (j, &l) in self.0.iter().enumerate() {
            p[(l, j)] = 1.0;
        }
        p
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation on one-based points, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut visited = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if visited[start] || self.0[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut j = start;
            let mut first = true;
            while !visited[j] {
                visited[j] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", j + 1)?;
                first = false;
                j = self.0[j];
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Sign of the permutation that sorts `seq`; `None` if `seq` has repeats.
pub fn sorting_sign<T: Ord>(seq: &[T]) -> Option<i8> {
    let mut inversions = 0usize;
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            match seq[a].cmp(&seq[b]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_first() {
        let a = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let b = Permutation::transposition(3, 0, 1);
        // (a ∘ b)(0) = a(1) = 2
        assert_eq!(a.compose(&b).apply(0), 2);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn signs() {
        assert_eq!(Permutation::identity(4).sign(), 1);
        assert_eq!(Permutation::transposition(4, 1, 3).sign(), -1);
        assert_eq!(Permutation::cycle_power(3, 1).sign(), 1);
        assert_eq!(Permutation::cycle_power(4, 1).sign(), -1);
    }

    #[test]
    fn matrix_convention() {
        let g = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let p = g.matrix();
        assert_eq!(p[(2, 0)], 1.0);
        assert_eq!(p[(0, 1)], 1.0);
        assert_eq!(p.transpose(), g.inverse().matrix());
    }

    #[test]
    fn one_based_round_trip() {
        let g = Permutation::from_one_based(&[2, 1]).unwrap();
        assert_eq!(g.to_one_based(), vec![2, 1]);
        assert_eq!(g.to_string(), "(1 2)");
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn sorting_sign_counts_inversions() {
        assert_eq!(sorting_sign(&[4, 7, 9]), Some(1));
        assert_eq!(sorting_sign(&[9, 4]), Some(-1));
        assert_eq!(sorting_sign(&[7, 9, 4]), Some(1));
        assert_eq!(sorting_sign(&[1, 1]), None);
    }
}
