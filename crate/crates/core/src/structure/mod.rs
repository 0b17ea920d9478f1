//! Acceptable decompositions `P = P_0 + Σ α_i ∏_{j∈J_i} P_j`, their degree
//! descriptions, and the engine that lowers modified degrees until every
//! member is at most `e = ⌊d/(t+1)⌋`.

mod bounds;
mod engine;
mod eliminate;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly};

pub use bounds::{bound_b, constants, BoundConfig};
pub use eliminate::{eliminate_coordinates, range_hypothesis_check, Elimination, HypothesisCheck};
pub use engine::{case2_check, case3_substitute, reduce_to_rank, regroup_by_power, EngineOptions, EngineReport, LogEntry, Regrouped};

/// `α · ∏ family[j]` over the multiset `factors` (sorted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Product {
    pub coeff: u32,
    pub factors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptableDecomposition {
    pub target: MultiPoly,
    /// Distinct monic non-constant members in graded-lex order.
    pub family: Vec<MultiPoly>,
    pub terms: Vec<Product>,
    pub vanishing_part: MultiPoly,
    pub d: u32,
    pub t: u32,
}

/// `(D_0, …, D_d)`: member counts by modified degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeDescription(pub Vec<usize>);

/// 0 for constants and `a·x_i`, 1 for other affine polynomials, else the degree.
pub fn modified_degree(q: &MultiPoly) -> u32 {
    match q.degree() {
        None | Some(0) => 0,
        Some(1) => {
            let coordinate = q.num_terms() == 1 && q.constant_term() == 0;
            u32::from(!coordinate)
        }
        Some(g) => g,
    }
}

/// True iff `a < b` at the largest index where they differ.
pub fn colex_less(a: &DegreeDescription, b: &DegreeDescription) -> Result<bool> {
    if a.0.len() != b.0.len() {
        return Err(Error::LengthMismatch(format!(
            "degree descriptions of lengths {} and {}",
            a.0.len(),
            b.0.len()
        )));
    }
    for (x, y) in a.0.iter().zip(&b.0).rev() {
        match x.cmp(y) {
            Ordering::Less => return Ok(true),
            Ordering::Greater => return Ok(false),
            Ordering::Equal => {}
        }
    }
    Ok(false)
}

/// Graded-lex key of a canonical form.
fn member_key(q: &MultiPoly) -> (u32, Vec<(Monomial, u32)>) {
    (
        q.degree().unwrap_or(0),
        q.terms().rev().map(|(m, c)| (m.clone(), c)).collect(),
    )
}

/// Monic representative and the scalar taken out.
fn monic(q: &MultiPoly) -> (MultiPoly, u32) {
    let f = q.field();
    let lead = q.leading().map_or(1, |(_, c)| c);
    (q.scale(f.inv(lead).expect("non-zero")), lead)
}

/// Outcome of [`AcceptableDecomposition::verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub identity: bool,
    /// Term indices whose product exceeds degree `d`.
    pub degree_violations: Vec<usize>,
    pub vanishing: bool,
    /// Members that are zero, repeated, or of degree above `d`.
    pub bad_members: Vec<usize>,
}

impl AcceptableDecomposition {
    pub fn e(&self) -> u32 {
        self.d / (self.t + 1)
    }

    /// `P = P` as a one-member family, or the empty family when `P`
    /// vanishes on `S^n`.
    pub fn trivial(p: &MultiPoly, s: &Alphabet, d: u32, t: u32) -> Result<Self> {
        let n = p.nvars();
        let products = if s.vanishes_on(p) {
            Vec::new()
        } else {
            vec![(1, vec![p.clone()])]
        };
        Self::assemble(p, s, d, t, Vec::new(), products, n)
    }

    /// Builds a canonical decomposition from explicit products: scalars are
    /// pulled out of members, constants folded into coefficients, repeated
    /// members merged and equal multisets combined. `keep` lists members to
    /// retain even when no product uses them.
    pub fn assemble(
        target: &MultiPoly,
        s: &Alphabet,
        d: u32,
        t: u32,
        keep: Vec<MultiPoly>,
        products: Vec<(u32, Vec<MultiPoly>)>,
        n: usize,
    ) -> Result<Self> {
        let f = target.field();
        let mut members: Vec<MultiPoly> = Vec::new();
        let mut index: BTreeMap<(u32, Vec<(Monomial, u32)>), usize> = BTreeMap::new();
        let mut insert = |q: MultiPoly, members: &mut Vec<MultiPoly>| -> usize {
            let key = member_key(&q);
            *index.entry(key).or_insert_with(|| {
                members.push(q);
                members.len() - 1
            })
        };
        for q in keep {
            if !q.is_constant() {
                insert(monic(&q.with_nvars(n)).0, &mut members);
            }
        }
        let mut raw: Vec<(u32, Vec<usize>)> = Vec::new();
        for (coeff, factors) in products {
            let mut c = coeff;
            let mut idx = Vec::new();
            for q in factors {
                if q.is_constant() {
                    c = f.mul(c, q.constant_term());
                } else {
                    let (m, lead) = monic(&q.with_nvars(n));
                    c = f.mul(c, lead);
                    idx.push(insert(m, &mut members));
                }
            }
            if c != 0 {
                raw.push((c, idx));
            }
        }
        // graded-lex order of members
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.sort_by_key(|&i| member_key(&members[i]));
        let mut rank = vec![0; members.len()];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let family: Vec<MultiPoly> = order.iter().map(|&i| members[i].clone()).collect();
        let mut merged: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
        for (c, idx) in raw {
            let mut key: Vec<usize> = idx.into_iter().map(|i| rank[i]).collect();
            key.sort_unstable();
            let slot = merged.entry(key).or_insert(0);
            *slot = f.add(*slot, c);
        }
        let terms: Vec<Product> = merged
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(factors, coeff)| Product { coeff, factors })
            .collect();
        let mut dec = AcceptableDecomposition {
            target: target.clone(),
            family,
            terms,
            vanishing_part: MultiPoly::zero(f, n),
            d,
            t,
        };
        dec.vanishing_part = target - &dec.expand();
        if !s.vanishes_on(&dec.vanishing_part) {
            return Err(Error::Corrupt("assembled products do not agree with P on S^n".into()));
        }
        Ok(dec)
    }

    pub fn product(&self, term: &Product) -> MultiPoly {
        let f = self.target.field();
        let n = self.target.nvars();
        term.factors
            .iter()
            .fold(MultiPoly::constant(f, n, term.coeff), |acc, &j| &acc * &self.family[j])
    }

    /// `Σ α_i ∏ P_j`, without the vanishing part.
    pub fn expand(&self) -> MultiPoly {
        let f = self.target.field();
        let n = self.target.nvars();
        self.terms
            .iter()
            .fold(MultiPoly::zero(f, n), |acc, term| &acc + &self.product(term))
            .with_nvars(n)
    }

    /// Products as explicit factor lists.
    pub fn products(&self) -> Vec<(u32, Vec<MultiPoly>)> {
        self.terms
            .iter()
            .map(|t| (t.coeff, t.factors.iter().map(|&j| self.family[j].clone()).collect()))
            .collect()
    }

    pub fn description(&self) -> DegreeDescription {
        let mut out = vec![0; self.d as usize + 1];
        for q in &self.family {
            let u = (modified_degree(q) as usize).min(self.d as usize);
            out[u] += 1;
        }
        DegreeDescription(out)
    }

    pub fn modified_degrees(&self) -> Vec<u32> {
        self.family.iter().map(modified_degree).collect()
    }

    pub fn verify(&self, s: &Alphabet) -> VerifyReport {
        let identity = (&self.expand() + &self.vanishing_part) == self.target;
        let degree_violations: Vec<usize> = self
            .terms
            .iter()
            .enumerate()
            .filter(|(_, t)| {
                let deg: u32 = t.factors.iter().map(|&j| self.family[j].degree().unwrap_or(0)).sum();
                deg > self.d
            })
            .map(|(i, _)| i)
            .collect();
        let vanishing = self.vanishing_part.degree_at_most(self.d.max(self.target.degree().unwrap_or(0)))
            && s.vanishes_on(&self.vanishing_part);
        let bad_members: Vec<usize> = self
            .family
            .iter()
            .enumerate()
            .filter(|(i, q)| {
                q.is_zero() || !q.degree_at_most(self.d) || self.family[..*i].contains(q)
            })
            .map(|(i, _)| i)
            .collect();
        VerifyReport {
            ok: identity && degree_violations.is_empty() && vanishing && bad_members.is_empty(),
            identity,
            degree_violations,
            vanishing,
            bad_members,
        }
    }

    /// Number of distinct products: an upper bound on the degree-`e` rank
    /// relative to `S` once every member has modified degree at most `e`.
    pub fn rank_bound(&self) -> usize {
        self.terms.len()
    }
}

#[cfg(test)]
mod tests;
