//! Block interleaver backed by an explicit permutation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A bijection on `{0, .., k-1}` with its inverse precomputed.
///
/// `interleave(v)[i] = v[perm[i]]`, and `deinterleave` undoes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl Interleaver {
    /// Pseudorandom permutation from a fixed seed, identical at encoder and
    /// decoder for the same `(len, seed)`.
    pub fn random(len: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        perm.shuffle(&mut rng);
        Self::from_perm(perm).expect("shuffle of identity is a bijection")
    }

    /// Spread ("S-random") permutation: any two indices within `spread`
    /// output positions of each other differ by at least `spread`. Greedy
    /// construction over shuffled candidates, retrying with a fresh shuffle
    /// and, past 3000 attempts, a smaller spread, so it is total and
    /// deterministic for the same `(len, spread, seed)`.
    pub fn s_random(len: usize, spread: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in (1..=spread.max(1)).rev() {
            for _ in 0..3000 {
                let mut pool: Vec<usize> = (0..len).collect();
                pool.shuffle(&mut rng);
                let mut out: Vec<usize> = Vec::with_capacity(len);
                let mut feasible = true;
                while out.len() < len {
                    let pos = pool.iter().position(|&cand| {
                        out.iter()
                            .rev()
                            .take(s)
                            .all(|&prev| cand.abs_diff(prev) >= s)
                    });
                    match pos {
                        Some(p) => out.push(pool.remove(p)),
                        None => {
                            feasible = false;
                            break;
                        }
                    }
                }
                if feasible {
                    return Self::from_perm(out).expect("construction yields a bijection");
                }
            }
        }
        // spread 1 always succeeds (any permutation qualifies)
        Self::random(len, seed)
    }

    pub fn identity(len: usize) -> Self {
        Self::from_perm((0..len).collect()).expect("identity is a bijection")
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let len = perm.len();
        let mut inverse = vec![usize::MAX; len];
        for (i, &p) in perm.iter().enumerate() {
            if p >= len || inverse[p] != usize::MAX {
                return Err(Error::InvalidParam(
                    "interleaver permutation is not a bijection".into(),
                ));
            }
            inverse[p] = i;
        }
        Ok(Self { perm, inverse })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn interleave<T: Copy>(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.perm.len());
        self.perm.iter().map(|&p| v[p]).collect()
    }

    pub fn deinterleave<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.inverse.len());
        self.inverse.iter().map(|&p| v[p]).collect()
    }
}
