//! Square-determined decompositions `P ≡ Σ A_i L_i² + J` of degree-2
//! polynomials with `P(S^n) ≠ F_p`, and the loop that trades squares for
//! coordinates of `J` until at most one square is left.

mod step;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::{AffineView, MultiPoly};
use crate::rank::diagonalize;
use crate::spectrum::{histogram, histogram_n, quadratic_residues, Enumeration};
use crate::util::next_vector;

pub use step::{inductive_step, StepRecord};

/// How far a form may reach outside `I(J)` before the slice test runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SupportThreshold {
    /// Always take the best candidate and test its slice by enumeration.
    #[default]
    Exact,
    /// Test the slice only when the best candidate exceeds this many coordinates.
    Fixed(usize),
}

impl SupportThreshold {
    pub fn exceeded(&self, score: usize) -> bool {
        match self {
            SupportThreshold::Exact => false,
            SupportThreshold::Fixed(t) => score > *t,
        }
    }
}

/// `P = Σ A_i·L_i² + J + vanishing_part` exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareDecomposition {
    pub coeffs: Vec<u32>,
    pub forms: Vec<AffineView>,
    pub j: MultiPoly,
    pub vanishing_part: MultiPoly,
}

impl SquareDecomposition {
    pub fn field(&self) -> PrimeField {
        self.j.field()
    }

    pub fn nvars(&self) -> usize {
        self.j.nvars()
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    /// `|I(J)|`.
    pub fn l(&self) -> usize {
        self.j.dependent_coords().len()
    }

    /// `Σ A_i L_i² + J`, which agrees with `P` on `S^n`.
    pub fn to_poly(&self) -> MultiPoly {
        let n = self.nvars();
        let mut out = self.j.clone();
        for (&a, l) in self.coeffs.iter().zip(&self.forms) {
            let lp = l.to_poly().with_nvars(n);
            out = &out + &(&lp * &lp).scale(a);
        }
        out.with_nvars(n)
    }

    pub fn reassemble(&self) -> MultiPoly {
        &self.to_poly() + &self.vanishing_part
    }

    /// Exact identity, degree bound on `J`, and vanishing of the remainder.
    pub fn check(&self, p: &MultiPoly, s: &Alphabet) -> Result<()> {
        if self.coeffs.len() != self.forms.len() {
            return Err(Error::Corrupt("coefficient and form counts differ".into()));
        }
        if !self.j.degree_at_most(2) {
            return Err(Error::Corrupt("J has degree above 2".into()));
        }
        if &self.reassemble() != p {
            return Err(Error::Corrupt("decomposition does not reassemble to P".into()));
        }
        if !s.vanishes_on(&self.vanishing_part) {
            return Err(Error::Corrupt("vanishing part does not vanish on S^n".into()));
        }
        Ok(())
    }
}

fn outside(l: &AffineView, i: &BTreeSet<usize>) -> usize {
    l.support().difference(i).count()
}

/// Best `a` for `target − Σ a_i basis_i` by support outside `avoid`.
/// Ties go to fewer non-zero entries of `a`, then lexicographic order.
pub(crate) fn best_combination(
    f: PrimeField,
    target: &AffineView,
    basis: &[AffineView],
    avoid: &BTreeSet<usize>,
    cfg: &Enumeration,
) -> Result<(usize, Vec<u32>, AffineView)> {
    let m = basis.len();
    cfg.check("coefficient vectors in F_p^k", Enumeration::point_count(f.p() as usize, m))?;
    let mut a = vec![0u32; m];
    let mut best: Option<(usize, usize, Vec<u32>, AffineView)> = None;
    loop {
        let mut r = target.clone();
        for (ai, b) in a.iter().zip(basis) {
            if *ai != 0 {
                r = r.axpy(f.neg(*ai), b);
            }
        }
        let score = outside(&r, avoid);
        let weight = a.iter().filter(|&&x| x != 0).count();
        if best.as_ref().is_none_or(|(s, w, _, _)| (score, weight) < (*s, *w)) {
            best = Some((score, weight, a.clone(), r));
        }
        if !next_vector(&mut a, f.p()) {
            break;
        }
    }
    let (score, _, a, r) = best.expect("at least one vector");
    Ok((score, a, r))
}

/// Whether `P` restricted to `{y} × S^{I^c}` takes every value, with `y` the
/// given partial assignment.
pub(crate) fn slice_is_full(p: &MultiPoly, assignment: &[(usize, u32)], s: &Alphabet, cfg: &Enumeration) -> Result<bool> {
    let slice = p.partial_evaluate(assignment)?;
    let free: Vec<usize> = slice.dependent_coords().into_iter().collect();
    let f = p.field();
    let subs: Vec<MultiPoly> = (0..slice.nvars())
        .map(|i| match free.binary_search(&i) {
            Ok(pos) => MultiPoly::var(f, free.len(), pos),
            Err(_) => MultiPoly::zero(f, free.len()),
        })
        .collect();
    let compact = slice.compose(&subs)?.with_nvars(free.len());
    Ok(histogram_n(&compact, s, free.len(), cfg)?.is_full_range())
}

/// `y ∈ S^I` with every coordinate at the first element of `S`.
pub(crate) fn first_assignment(i: &BTreeSet<usize>, s: &Alphabet) -> Vec<(usize, u32)> {
    i.iter().map(|&k| (k, s.elements()[0])).collect()
}

fn constant_decomposition(p: &MultiPoly, c: u32) -> SquareDecomposition {
    let f = p.field();
    let n = p.nvars();
    let j = MultiPoly::constant(f, n, c);
    SquareDecomposition {
        coeffs: Vec::new(),
        forms: Vec::new(),
        vanishing_part: p - &j,
        j,
    }
}

/// Initial data of a decomposition run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialRecord {
    /// `"p"` or `"reduced"`: which representative was diagonalized.
    pub source: String,
    pub k: usize,
    /// Support size of the affine remainder after the b-search.
    pub remainder_support: usize,
    pub threshold_exceeded: bool,
}

pub fn initial_decomposition(
    p: &MultiPoly,
    s: &Alphabet,
    threshold: SupportThreshold,
    cfg: &Enumeration,
) -> Result<(SquareDecomposition, InitialRecord)> {
    let f = p.field();
    let n = p.nvars();
    if let Some(g) = p.degree() {
        if g > 2 {
            return Err(Error::DegreeTooHigh { max: 2, got: g });
        }
    }
    let hist = histogram(p, s, cfg)?;
    if hist.is_full_range() {
        return Err(Error::FullRange);
    }
    let image = hist.image();
    // p = 2 or |S| = 1: a non-full image is a single value
    if f.p() == 2 || s.size() == 1 || image.len() == 1 {
        if image.len() == 1 {
            let dec = constant_decomposition(p, image[0]);
            let rec = InitialRecord {
                source: "constant".into(),
                k: 0,
                remainder_support: 0,
                threshold_exceeded: false,
            };
            return Ok((dec, rec));
        }
        return Err(Error::FullRange);
    }
    let reduced = s.reduce(p);
    let mut candidates = vec![("p", p.clone())];
    if &reduced != p {
        candidates.push(("reduced", reduced));
    }
    let diagonals: Vec<_> = candidates
        .into_iter()
        .map(|(name, base)| diagonalize(&base).map(|d| (name, base, d)))
        .collect::<Result<_>>()?;
    // more squares never wins the (k, l) comparison, so skip its b-search
    let min_k = diagonals.iter().map(|(_, _, d)| d.len()).min().unwrap_or(0);
    let mut best: Option<(SquareDecomposition, InitialRecord)> = None;
    for (name, base, diag) in diagonals.into_iter().filter(|(_, _, d)| d.len() == min_k) {
        let k = diag.len();
        let forms: Vec<AffineView> = diag.forms.iter().map(|l| l.clone().resized(n)).collect();
        let l0 = diag.remainder.clone().resized(n);
        let (score, b, rem) = best_combination(f, &l0, &forms, &BTreeSet::new(), cfg)?;
        // A_i L_i² + b_i L_i = A_i (L_i + b_i/2A_i)² − b_i²/4A_i
        let mut j = rem;
        let mut new_forms = Vec::with_capacity(k);
        for ((&a, l), &bi) in diag.coeffs.iter().zip(&forms).zip(&b) {
            let shift = f.div(bi, f.mul(2, a));
            new_forms.push(l.add_constant(shift));
            j = j.add_constant(f.neg(f.mul(a, f.mul(shift, shift))));
        }
        let j = j.to_poly().with_nvars(n);
        let dec = SquareDecomposition {
            coeffs: diag.coeffs.clone(),
            forms: new_forms,
            vanishing_part: p - &base,
            j,
        };
        let rec = InitialRecord {
            source: name.into(),
            k,
            remainder_support: score,
            threshold_exceeded: threshold.exceeded(score),
        };
        let better = match &best {
            None => true,
            Some((d, _)) => (dec.k(), dec.l()) < (d.k(), d.l()),
        };
        if better {
            best = Some((dec, rec));
        }
    }
    let (dec, rec) = best.expect("at least one candidate");
    dec.check(p, s)?;
    Ok((dec, rec))
}

/// Outcome of [`decompose`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposeReport {
    pub initial: InitialRecord,
    pub initial_k: usize,
    pub initial_l: usize,
    pub steps: Vec<StepRecord>,
    /// Whether the final square was folded into `J`.
    pub absorbed_final_square: bool,
    /// Whether the image contains a translate `aQ_p + b`, `a ≠ 0`.
    pub image_contains_square_translate: bool,
    pub decomposition: SquareDecomposition,
    /// `|I(J_final)| ≤ |I(J_initial)| + Σ` per-form new coordinates.
    pub growth_ledger_ok: bool,
    pub verified_by_reduction: bool,
    /// `None` when `S^n` is beyond the enumeration budget.
    pub verified_by_enumeration: Option<bool>,
}

/// Whether `image` contains `a·Q_p + b` for some `a ≠ 0`.
pub fn contains_square_translate(field: PrimeField, image: &[u32]) -> bool {
    let q = quadratic_residues(field);
    let img: BTreeSet<u32> = image.iter().copied().collect();
    (1..field.p()).any(|a| {
        (0..field.p()).any(|b| q.iter().all(|&y| img.contains(&field.add(field.mul(a, y), b))))
    })
}

/// Runs the whole degree-2 procedure. With `absorb_last`, a single remaining
/// square is folded into `J` whenever the image contains no translate of
/// `Q_p`, leaving a determined polynomial.
pub fn decompose(
    p: &MultiPoly,
    s: &Alphabet,
    threshold: SupportThreshold,
    absorb_last: bool,
    cfg: &Enumeration,
) -> Result<DecomposeReport> {
    let (mut dec, initial) = initial_decomposition(p, s, threshold, cfg)?;
    let initial_k = dec.k();
    let initial_l = dec.l();
    let mut steps = Vec::new();
    while dec.k() >= 2 {
        let (next, rec) = inductive_step(&dec, s, threshold, cfg)?;
        if next.k() >= dec.k() {
            return Err(Error::Corrupt("inductive step did not reduce the number of squares".into()));
        }
        next.check(p, s)?;
        steps.push(rec);
        dec = next;
    }
    let image = histogram(p, s, cfg)?.image();
    let translate = contains_square_translate(s.field(), &image);
    let mut absorbed = false;
    let mut growth: usize = steps.iter().map(|r| r.new_coordinates).sum();
    if absorb_last && dec.k() == 1 && !translate {
        let n = dec.nvars();
        growth += outside(&dec.forms[0], &dec.j.dependent_coords());
        let l = dec.forms[0].to_poly().with_nvars(n);
        dec.j = &dec.j + &(&l * &l).scale(dec.coeffs[0]);
        dec.coeffs.clear();
        dec.forms.clear();
        dec.check(p, s)?;
        absorbed = true;
    }
    let growth_ledger_ok = dec.l() <= initial_l + growth;
    let verified_by_reduction = s.agree(p, &dec.to_poly());
    let verified_by_enumeration = if Enumeration::point_count(s.size(), p.nvars()) <= cfg.budget as u128 {
        let a = histogram_n(&(p - &dec.to_poly()), s, p.nvars(), cfg)?;
        Some(a.counts[0] == a.total)
    } else {
        None
    };
    Ok(DecomposeReport {
        initial,
        initial_k,
        initial_l,
        steps,
        absorbed_final_square: absorbed,
        image_contains_square_translate: translate,
        decomposition: dec,
        growth_ledger_ok,
        verified_by_reduction,
        verified_by_enumeration,
    })
}
