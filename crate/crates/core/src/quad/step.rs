use std::collections::BTreeSet;

use serde::Serialize;

use super::{best_combination, first_assignment, slice_is_full, SquareDecomposition, SupportThreshold};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg;
use crate::poly::{AffineView, MultiPoly};
use crate::rank::diagonalize_matrix;
use crate::spectrum::Enumeration;

/// One pass of [`inductive_step`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub k_before: usize,
    pub k_after: usize,
    pub l_before: usize,
    pub l_after: usize,
    /// Index of the eliminated square.
    pub index: usize,
    /// Coefficients on the other squares, in index order.
    pub combination: Vec<u32>,
    /// `|Z(L_c − Σ a_i L_i) \ I(J)|` for the chosen candidate.
    pub score: usize,
    pub threshold_exceeded: bool,
    /// Result of the slice test, when it ran.
    pub slice_full: Option<bool>,
    /// `"case1"`, `"case2"` or `"dropped"` for each follow-up move.
    pub cases: Vec<String>,
    /// Coordinates that may have joined `I(J)` during this step.
    pub new_coordinates: usize,
}

/// `A·L² + V·L` with `V` affine.
#[derive(Debug, Clone)]
struct Term {
    a: u32,
    l: AffineView,
    v: AffineView,
}

fn affine_product(u: &AffineView, w: &AffineView) -> MultiPoly {
    &u.to_poly() * &w.to_poly()
}

/// Rows of `Ω`, completed to a basis by unit vectors.
fn complete_basis(f: PrimeField, mut rows: Vec<Vec<u32>>, m: usize) -> Vec<Vec<u32>> {
    for i in 0..m {
        if rows.len() == m {
            break;
        }
        let mut trial = rows.clone();
        trial.push((0..m).map(|k| u32::from(k == i)).collect());
        if linalg::rank(f, &trial) == trial.len() {
            rows = trial;
        }
    }
    rows
}

fn check_slice(
    poly: &MultiPoly,
    on: &BTreeSet<usize>,
    s: &Alphabet,
    cfg: &Enumeration,
    context: &str,
    required: bool,
) -> Result<Option<bool>> {
    let free = poly.nvars().saturating_sub(on.len());
    if !required && Enumeration::point_count(s.size(), free) > cfg.budget as u128 {
        return Ok(None);
    }
    let y = first_assignment(on, s);
    let full = slice_is_full(poly, &y, s, cfg)?;
    if full {
        return Err(Error::FullRangeWitness {
            assignment: y,
            context: context.into(),
        });
    }
    Ok(Some(full))
}

/// Replaces the decomposition by one with fewer squares.
///
/// Picks the square `L_c` and coefficients `a` for which `L_c − Σ a_i L_i`
/// reaches the fewest coordinates outside `I(J)`, substitutes, re-diagonalizes
/// the remaining `k − 1` squares and then either completes squares (every
/// coefficient non-zero) or eliminates a form whose square vanished. A slice
/// on which `P` takes every value is reported as `FullRangeWitness`.
pub fn inductive_step(
    dec: &SquareDecomposition,
    s: &Alphabet,
    threshold: SupportThreshold,
    cfg: &Enumeration,
) -> Result<(SquareDecomposition, StepRecord)> {
    let f = dec.field();
    let n = dec.nvars();
    let k = dec.k();
    if k < 2 {
        return Err(Error::Invalid("inductive step needs at least two squares".into()));
    }
    if f.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    let poly = dec.to_poly();
    let i_j = dec.j.dependent_coords();

    let mut best: Option<(usize, usize, Vec<u32>, AffineView)> = None;
    for c in 0..k {
        let others: Vec<AffineView> = (0..k).filter(|&i| i != c).map(|i| dec.forms[i].clone()).collect();
        let (score, a, r) = best_combination(f, &dec.forms[c], &others, &i_j, cfg)?;
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, c, a, r));
        }
    }
    let (score, c, a, r) = best.expect("k ≥ 2");
    let exceeded = threshold.exceeded(score);
    let slice_full = if exceeded || threshold == SupportThreshold::Exact {
        check_slice(&poly, &i_j, s, cfg, "eliminated form leaves a full slice", exceeded)?
    } else {
        None
    };

    // A_c L_c² = A_c(Σ a_i L_i)² + 2 A_c R Σ a_i L_i + A_c R²
    let others: Vec<usize> = (0..k).filter(|&i| i != c).collect();
    let m = others.len();
    let ac = dec.coeffs[c];
    let mut y = vec![vec![0u32; m]; m];
    for i in 0..m {
        for jx in 0..m {
            y[i][jx] = f.mul(ac, f.mul(a[i], a[jx]));
        }
        y[i][i] = f.add(y[i][i], dec.coeffs[others[i]]);
    }
    let mut j = &dec.j + &affine_product(&r, &r).scale(ac);
    let v_old: Vec<AffineView> = a.iter().map(|&ai| r.scale(f.mul(2, f.mul(ac, ai)))).collect();

    // Y = Ωᵀ diag(A') Ω, so L' = Ω L and V' = Ω^{-T} V
    let pairs = diagonalize_matrix(f, &y)?;
    let mut coeffs: Vec<u32> = pairs.iter().map(|(c, _)| *c).collect();
    let omega = complete_basis(f, pairs.into_iter().map(|(_, w)| w).collect(), m);
    coeffs.resize(m, 0);
    let inv = linalg::inverse(f, &omega).ok_or_else(|| Error::Corrupt("basis completion failed".into()))?;
    let mut terms: Vec<Term> = (0..m)
        .map(|row| {
            let l = (0..m).fold(AffineView::zero(f, n), |acc, i| acc.axpy(omega[row][i], &dec.forms[others[i]]));
            let v = (0..m).fold(AffineView::zero(f, n), |acc, i| acc.axpy(inv[i][row], &v_old[i]));
            Term { a: coeffs[row], l, v }
        })
        .collect();

    let mut reach: BTreeSet<usize> = i_j.union(&r.support()).copied().collect();
    let mut new_coordinates = score;
    let mut cases = Vec::new();
    loop {
        let before = terms.len();
        terms.retain(|t| t.a != 0 || !t.v.is_zero());
        for _ in terms.len()..before {
            cases.push("dropped".to_string());
        }
        let Some(pos) = terms.iter().position(|t| t.a == 0) else {
            // A L² + V L = A (L + V/2A)² − V²/4A
            for t in terms.iter_mut() {
                let half = f.inv(f.mul(2, t.a)).expect("non-zero");
                let shift = t.v.scale(half);
                j = &j - &affine_product(&shift, &shift).scale(t.a);
                t.l = t.l.axpy(1, &shift);
                t.v = AffineView::zero(f, n);
            }
            if !terms.is_empty() {
                cases.push("case1".to_string());
            }
            break;
        };
        // V·L with L = Σ a_i L_i + R' spreads V over the remaining forms
        let t = terms.remove(pos);
        let basis: Vec<AffineView> = terms.iter().map(|u| u.l.clone()).collect();
        let (score2, a2, r2) = best_combination(f, &t.l, &basis, &reach, cfg)?;
        if threshold.exceeded(score2) {
            let on: BTreeSet<usize> = j.dependent_coords().union(&t.v.support()).copied().collect();
            check_slice(&poly, &on, s, cfg, "vanished square leaves a full slice", true)?;
        }
        for (u, &ai) in terms.iter_mut().zip(&a2) {
            u.v = u.v.axpy(ai, &t.v);
        }
        j = &j + &affine_product(&t.v, &r2);
        reach.extend(r2.support());
        new_coordinates += score2;
        cases.push("case2".to_string());
    }

    let j = j.with_nvars(n);
    let out = SquareDecomposition {
        coeffs: terms.iter().map(|t| t.a).collect(),
        forms: terms.into_iter().map(|t| t.l).collect(),
        j,
        vanishing_part: dec.vanishing_part.clone(),
    };
    if out.to_poly() != poly {
        return Err(Error::Corrupt("inductive step changed the polynomial".into()));
    }
    let rec = StepRecord {
        k_before: k,
        k_after: out.k(),
        l_before: i_j.len(),
        l_after: out.l(),
        index: c,
        combination: a,
        score,
        threshold_exceeded: exceeded,
        slice_full,
        cases,
        new_coordinates,
    };
    Ok((out, rec))
}
