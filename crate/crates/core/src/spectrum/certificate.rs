use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{joint_histogram_n, Enumeration};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::util::{next_vector, ratio, ser_opt_ratio, ser_ratio};

/// Certificate that the fiber `{x ∈ S^n : P_i(x) = v_i ∀i}` is empty or has
/// density at least `|S|^{-s}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullstellensatzCertificate {
    /// Reduction of `E = ∏_i ((P_i − v_i)^{p−1} − 1)` modulo the vanishing ideal.
    pub reduced: MultiPoly,
    pub is_zero: bool,
    /// Maximal-degree monomial of the reduction that drove the search.
    pub pivot_monomial: Option<Vec<u32>>,
    /// A point of the fiber, when it is non-empty.
    pub witness: Option<Vec<u32>>,
    /// Number of variables in the pivot monomial: the guarantee exponent.
    pub lower_bound_exponent: u32,
    /// Total degree of the reduction; at most `(p−1)·d·k`.
    pub reduced_degree: u32,
    /// `(p−1)·d·k`.
    pub degree_cap: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub guarantee: BigRational,
    /// Exact fiber density when enumeration fit in the budget.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub enumerated_probability: Option<BigRational>,
}

pub fn nullstellensatz_certificate(
    ps: &[MultiPoly],
    v: &[u32],
    s: &Alphabet,
    cfg: &Enumeration,
) -> Result<NullstellensatzCertificate> {
    if ps.is_empty() {
        return Err(Error::Invalid("need at least one polynomial".into()));
    }
    if ps.len() != v.len() {
        return Err(Error::LengthMismatch(format!(
            "{} target values for {} polynomials",
            v.len(),
            ps.len()
        )));
    }
    let f = s.field();
    let q = f.p();
    let n = ps.iter().map(|x| x.nvars()).max().unwrap_or(0);
    let d = ps.iter().filter_map(|x| x.degree()).max().unwrap_or(0);
    let degree_cap = (q - 1) * d * ps.len() as u32;

    let mut e = MultiPoly::constant(f, n, 1);
    for (pi, &vi) in ps.iter().zip(v) {
        let shifted = pi - &MultiPoly::constant(f, n, vi);
        let factor = &s.pow_reduced(&shifted, q - 1) - &MultiPoly::constant(f, n, 1);
        e = s.mul_reduced(&e, &factor);
    }
    let reduced = e.with_nvars(n);
    let reduced_degree = reduced.degree().unwrap_or(0);

    let enumerated_probability = if Enumeration::point_count(s.size(), n) <= cfg.budget as u128 {
        let refs: Vec<&MultiPoly> = ps.iter().collect();
        let joint = joint_histogram_n(&refs, s, n, cfg)?;
        Some(ratio(joint.count(v), joint.total))
    } else {
        None
    };

    if reduced.is_zero() {
        return Ok(NullstellensatzCertificate {
            reduced,
            is_zero: true,
            pivot_monomial: None,
            witness: None,
            lower_bound_exponent: 0,
            reduced_degree: 0,
            degree_cap,
            guarantee: BigRational::from_integer(0.into()),
            enumerated_probability,
        });
    }

    // graded-lex maximal monomial: maximal total degree
    let (pivot, _) = reduced.leading().expect("non-zero");
    let vars: Vec<usize> = pivot.support().collect();
    let mut point = vec![s.elements()[0]; n];
    let mut choice = vec![0u32; vars.len()];
    let witness = loop {
        for (&var, &j) in vars.iter().zip(&choice) {
            point[var] = s.elements()[j as usize];
        }
        if reduced.evaluate(&point)? != 0 {
            break Some(point.clone());
        }
        if !next_vector(&mut choice, s.size() as u32) {
            break None;
        }
    };
    let witness = witness.ok_or_else(|| {
        Error::WitnessSearchFailed(format!("no point of S^{} makes the reduction non-zero", vars.len()))
    })?;
    for (pi, &vi) in ps.iter().zip(v) {
        if pi.evaluate(&witness)? != vi {
            return Err(Error::WitnessSearchFailed("witness is not in the fiber".into()));
        }
    }
    let exponent = vars.len() as u32;
    Ok(NullstellensatzCertificate {
        pivot_monomial: Some(pivot.exponents().to_vec()),
        reduced,
        is_zero: false,
        witness: Some(witness),
        lower_bound_exponent: exponent,
        reduced_degree,
        degree_cap,
        guarantee: BigRational::new(BigInt::one(), BigInt::from(s.size()).pow(exponent)),
        enumerated_probability,
    })
}
