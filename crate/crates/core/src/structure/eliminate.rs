use std::collections::BTreeSet;

use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::Result;
use crate::poly::MultiPoly;
use crate::spectrum::{histogram, Enumeration};
use crate::util::next_vector;

/// Outcome of [`eliminate_coordinates`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Elimination {
    /// `P` equals `value` on all of `S^n`.
    Constant {
        value: u32,
        /// Coordinates dropped, last first.
        dropped: Vec<usize>,
        verified_by_enumeration: Option<bool>,
    },
    /// `A(S) ⊆ P(S^n)` for the non-constant univariate `A`, read off the
    /// slices in `coordinate` at the point `rest`.
    Witness {
        coordinate: usize,
        rest: Vec<(usize, u32)>,
        /// Ascending coefficients of `A`.
        a: Vec<u32>,
        a_of_s: Vec<u32>,
        verified: bool,
    },
}

/// Drops coordinates from the last one down while the slices of the reduced
/// form in `x_n^k`, `k ≥ 1`, all vanish on `S^n`. Ends with a constant or with
/// a univariate `A` whose values on `S` all occur in `P(S^n)`.
pub fn eliminate_coordinates(p: &MultiPoly, s: &Alphabet, cfg: &Enumeration) -> Result<Elimination> {
    let f = p.field();
    let n = p.nvars();
    let mut q = s.reduce(p);
    let mut dropped = Vec::new();
    for var in (0..n).rev() {
        let slices = q.slices_in(var);
        if slices[1..].iter().all(|sl| s.vanishes_on(sl)) {
            q = slices[0].clone();
            dropped.push(var);
            continue;
        }
        // a point of S^{n−1} where the higher slices are not all zero
        let others: Vec<usize> = (0..n).filter(|&i| i != var).collect();
        cfg.check("points of S^(n-1)", Enumeration::point_count(s.size(), others.len()))?;
        let els = s.elements();
        let mut idx = vec![0u32; others.len()];
        let (rest, a) = loop {
            let rest: Vec<(usize, u32)> = others.iter().zip(&idx).map(|(&i, &j)| (i, els[j as usize])).collect();
            let coeffs: Vec<u32> = slices
                .iter()
                .map(|sl| sl.partial_evaluate(&rest).map(|c| c.constant_term()))
                .collect::<Result<_>>()?;
            if coeffs[1..].iter().any(|&c| c != 0) {
                break (rest, coeffs);
            }
            if !next_vector(&mut idx, s.size() as u32) {
                unreachable!("a reduced non-zero slice is non-zero somewhere on S");
            }
        };
        let a_of_s: Vec<u32> = els
            .iter()
            .map(|&u| a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, u), c)))
            .collect::<BTreeSet<u32>>()
            .into_iter()
            .collect();
        let image = histogram(p, s, cfg)?.image();
        let verified = a_of_s.len() >= 2 && a_of_s.iter().all(|v| image.contains(v));
        return Ok(Elimination::Witness {
            coordinate: var,
            rest,
            a,
            a_of_s,
            verified,
        });
    }
    let value = q.constant_term();
    let verified_by_enumeration = if Enumeration::point_count(s.size(), n) <= cfg.budget as u128 {
        let h = histogram(p, s, cfg)?;
        Some(h.counts[value as usize] == h.total)
    } else {
        None
    };
    Ok(Elimination::Constant {
        value,
        dropped,
        verified_by_enumeration,
    })
}

/// Whether `P(S^n)` contains `A(F_p)` for no non-constant `A` of degree ≤ `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    /// Ascending coefficients of the first offending `A`, by degree then
    /// coefficients.
    pub witness: Option<Vec<u32>>,
    pub image: Vec<u32>,
    /// Distinct image sets `A(F_p)` examined.
    pub images_checked: usize,
}

pub fn range_hypothesis_check(p: &MultiPoly, s: &Alphabet, t: u32, cfg: &Enumeration) -> Result<HypothesisCheck> {
    let f = p.field();
    let q = f.p();
    cfg.check(
        "univariate polynomials of degree ≤ t",
        Enumeration::point_count(q as usize, t as usize + 1),
    )?;
    let image = histogram(p, s, cfg)?.image();
    let img: BTreeSet<u32> = image.iter().copied().collect();
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    for deg in 1..=t as usize {
        for lead in 1..q {
            let mut lower = vec![0u32; deg];
            loop {
                let mut a = lower.clone();
                a.push(lead);
                let values: BTreeSet<u32> = f
                    .elements()
                    .map(|u| a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, u), c)))
                    .collect();
                let key: Vec<u32> = values.iter().copied().collect();
                if seen.insert(key) && values.is_subset(&img) {
                    return Ok(HypothesisCheck {
                        holds: false,
                        witness: Some(a),
                        image,
                        images_checked: seen.len(),
                    });
                }
                if !next_vector(&mut lower, q) {
                    break;
                }
            }
        }
    }
    Ok(HypothesisCheck {
        holds: true,
        witness: None,
        image,
        images_checked: seen.len(),
    })
}
