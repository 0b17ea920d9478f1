use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::MultiPoly;

pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Work per task before the odometer is split across threads.
const PREFIX_FANOUT: u128 = 256;

/// Settings for exhaustive enumeration of `S^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    /// Maximum number of points visited.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration {
            budget: DEFAULT_BUDGET,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

impl Enumeration {
    pub fn with_budget(budget: u64) -> Self {
        Enumeration {
            budget,
            ..Self::default()
        }
    }

    pub fn serial(self) -> Self {
        Enumeration {
            parallel: false,
            ..self
        }
    }

    /// `|S|^n`, saturating.
    pub fn point_count(size: usize, n: usize) -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..n {
            acc = acc.saturating_mul(size as u128);
        }
        acc
    }

    pub fn check(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.budget as u128 {
            return Err(Error::budget(what, needed, self.budget as u128));
        }
        Ok(())
    }

    /// Folds over every point of `S^n` (given as element indices).
    ///
    /// Points are split on a fixed coordinate prefix; each prefix block is
    /// folded from `init()` and the blocks are merged in prefix order, so the
    /// result does not depend on scheduling.
    pub fn fold<A, I, F, M>(&self, s: &Alphabet, n: usize, init: I, visit: F, merge: M) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &[usize]) + Sync,
        M: Fn(A, A) -> A,
    {
        let size = s.size();
        self.check("points of S^n", Self::point_count(size, n))?;
        let mut prefix_len = 0;
        while prefix_len < n && Self::point_count(size, prefix_len) < PREFIX_FANOUT {
            prefix_len += 1;
        }
        let blocks = Self::point_count(size, prefix_len) as usize;
        let run = |block: usize| -> A {
            let mut acc = init();
            let mut idx = vec![0usize; n];
            let mut b = block;
            for slot in idx[..prefix_len].iter_mut().rev() {
                *slot = b % size;
                b /= size;
            }
            loop {
                visit(&mut acc, &idx);
                // odometer over the suffix, last coordinate fastest
                let mut pos = n;
                loop {
                    if pos == prefix_len {
                        return acc;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < size {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        };
        let parts: Vec<A> = self.map_blocks(blocks, &run);
        let mut it = parts.into_iter();
        let first = it.next().unwrap_or_else(&init);
        Ok(it.fold(first, merge))
    }

    #[cfg(feature = "parallel")]
    fn map_blocks<A: Send>(&self, blocks: usize, run: &(dyn Fn(usize) -> A + Sync)) -> Vec<A> {
        use rayon::prelude::*;
        if self.parallel && blocks > 1 {
            (0..blocks).into_par_iter().map(run).collect()
        } else {
            (0..blocks).map(run).collect()
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn map_blocks<A: Send>(&self, blocks: usize, run: &(dyn Fn(usize) -> A + Sync)) -> Vec<A> {
        (0..blocks).map(run).collect()
    }
}

/// A polynomial compiled for fast evaluation on points of `S^n`.
#[derive(Debug, Clone)]
pub struct Evaluator {
    field: PrimeField,
    terms: Vec<(u64, Vec<(usize, usize)>)>,
    /// `powers[e][j] = S[j]^e`
    powers: Vec<Vec<u64>>,
}

impl Evaluator {
    pub fn new(p: &MultiPoly, s: &Alphabet) -> Self {
        let f = p.field();
        let mut max_exp = 0;
        let terms = p
            .terms()
            .map(|(m, c)| {
                let factors: Vec<(usize, usize)> = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as usize))
                    .collect();
                for &(_, e) in &factors {
                    max_exp = max_exp.max(e);
                }
                (c as u64, factors)
            })
            .collect();
        let powers = (0..=max_exp)
            .map(|e| s.elements().iter().map(|&w| f.pow(w, e as u64) as u64).collect())
            .collect();
        Evaluator {
            field: f,
            terms,
            powers,
        }
    }

    /// Value at the point whose coordinates are `S[idx[i]]`.
    #[inline]
    pub fn eval(&self, idx: &[usize]) -> u32 {
        let p = self.field.p() as u64;
        let mut acc = 0u64;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(var, e) in factors {
                t = t * self.powers[e][idx[var]] % p;
            }
            acc += t;
            if acc >= p {
                acc -= p;
            }
        }
        acc as u32
    }
}
