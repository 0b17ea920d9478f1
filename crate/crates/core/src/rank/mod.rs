//! Degree-d ranks: monomial counts, quadratic-form diagonalization, pairing
//! certificates for degree-1 rank of quadratics, and an exhaustive oracle.

mod brute;
mod quadratic;

use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg;
use crate::poly::MultiPoly;

pub use brute::{brute_force_rank, DEFAULT_RANK_BUDGET};
pub use quadratic::{diagonalize, diagonalize_matrix, rk1_quadratic, DiagonalForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    UpperBound,
    Exact,
}

/// `P = Σ_j ∏ summands[j] + vanishing_part`, each factor of degree at most `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCertificate {
    pub kind: CertificateKind,
    pub d: u32,
    pub value: usize,
    /// Largest value known not to be attainable plus one.
    pub lower_bound: usize,
    pub summands: Vec<Vec<MultiPoly>>,
    /// Vanishes on `S^n`; absent for the plain rank.
    pub vanishing_part: Option<MultiPoly>,
    /// Expansion of the summands plus the vanishing part.
    pub reassembly: MultiPoly,
    /// Set when a search stopped on its budget before settling the value.
    pub budget_exhausted: bool,
}

impl RankCertificate {
    pub(crate) fn build(
        target: &MultiPoly,
        d: u32,
        summands: Vec<Vec<MultiPoly>>,
        s: Option<&Alphabet>,
        lower_bound: usize,
    ) -> Self {
        let n = target.nvars();
        let f = target.field();
        let summands: Vec<Vec<MultiPoly>> = summands
            .into_iter()
            .map(|fs| fs.into_iter().map(|q| q.with_nvars(n)).collect())
            .collect();
        let sum = expand(f, n, &summands);
        let vanishing_part = s.map(|_| target - &sum);
        let reassembly = match &vanishing_part {
            Some(v) => &sum + v,
            None => sum,
        };
        let value = summands.len();
        RankCertificate {
            kind: if value == lower_bound {
                CertificateKind::Exact
            } else {
                CertificateKind::UpperBound
            },
            d,
            value,
            lower_bound,
            summands,
            vanishing_part,
            reassembly,
            budget_exhausted: false,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind == CertificateKind::Exact
    }

    /// Re-checks every side condition against `P` and the alphabet.
    pub fn verify(&self, p: &MultiPoly, s: Option<&Alphabet>) -> Result<()> {
        let f = p.field();
        let n = p.nvars();
        let deg_p = p.degree().unwrap_or(0);
        for (j, fs) in self.summands.iter().enumerate() {
            // degree-0 summands are scaled monomials rather than products
            let ok = if self.d == 0 {
                fs.len() == 1 && fs[0].num_terms() <= 1
            } else {
                fs.iter().all(|q| q.degree_at_most(self.d))
            };
            if !ok {
                return Err(Error::Corrupt(format!("summand {j} violates the degree-{} shape", self.d)));
            }
        }
        let sum = expand(f, n, &self.summands);
        for (j, fs) in self.summands.iter().enumerate() {
            let prod = product(f, n, fs);
            if !prod.degree_at_most(deg_p) {
                return Err(Error::Corrupt(format!("summand {j} exceeds the degree of P")));
            }
        }
        let total = match (&self.vanishing_part, s) {
            (Some(v), Some(s)) => {
                if !v.degree_at_most(deg_p) {
                    return Err(Error::Corrupt("vanishing part exceeds the degree of P".into()));
                }
                if !s.vanishes_on(v) {
                    return Err(Error::Corrupt("vanishing part does not vanish on S^n".into()));
                }
                &sum + v
            }
            (None, _) => sum,
            (Some(_), None) => return Err(Error::Corrupt("vanishing part without an alphabet".into())),
        };
        if &total != p {
            return Err(Error::Corrupt("summands do not reassemble to P".into()));
        }
        if self.value != self.summands.len() {
            return Err(Error::Corrupt("value differs from the number of summands".into()));
        }
        Ok(())
    }
}

pub(crate) fn product(f: PrimeField, n: usize, factors: &[MultiPoly]) -> MultiPoly {
    factors
        .iter()
        .fold(MultiPoly::constant(f, n, 1), |acc, q| &acc * q)
}

pub(crate) fn expand(f: PrimeField, n: usize, summands: &[Vec<MultiPoly>]) -> MultiPoly {
    summands
        .iter()
        .fold(MultiPoly::zero(f, n), |acc, fs| &acc + &product(f, n, fs))
        .with_nvars(n)
}

/// Number of monomials of the canonical form.
pub fn rk0(p: &MultiPoly) -> usize {
    p.num_terms()
}

/// `rk0(reduce(P))`, an upper bound on the degree-0 rank relative to `S`.
pub fn rk0_s_upper(p: &MultiPoly, s: &Alphabet) -> usize {
    rk0(&s.reduce(p))
}

/// Rank of a symmetric matrix over an odd-characteristic field.
pub fn matrix_rank(field: PrimeField, m: &[Vec<u32>]) -> Result<usize> {
    if field.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    Ok(linalg::rank(field, &m.to_vec()))
}

#[cfg(test)]
mod tests;
