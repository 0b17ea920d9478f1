//! Alphabets `S ⊆ F_p`, their annihilator `Δ_S(y) = ∏_{w∈S} (y - w)` and the
//! canonical reduction of polynomials modulo the functions vanishing on `S^n`.
//!
//! Reduction is per variable: every power `x_i^a` is replaced by the remainder
//! of `y^a` modulo `Δ_S`, a polynomial of degree `< |S|`. The result is the
//! unique representative with all per-variable degrees below `|S|`, so a
//! polynomial vanishes on `S^n` exactly when its reduction is zero.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::{Monomial, MultiPoly};

/// Exponents precomputed at construction; larger ones are reduced on demand.
const EAGER_DEPTH_FACTOR: usize = 8;

#[derive(Clone)]
pub struct Alphabet {
    field: PrimeField,
    elements: Vec<u32>,
    /// Ascending coefficients of Δ_S (monic, length |S|+1).
    delta: Vec<u32>,
    /// `table[a]` = ascending coefficients of `y^a mod Δ_S`, length |S|.
    table: Vec<Vec<u32>>,
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet(p={}, S={:?})", self.field.p(), self.elements)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.elements == other.elements
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(s)
    }
}

impl Alphabet {
    pub fn new(field: PrimeField, elements: &[u32]) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must be non-empty".into()));
        }
        let mut els = elements.to_vec();
        els.sort_unstable();
        if els.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidAlphabet("repeated element".into()));
        }
        if let Some(&w) = els.iter().find(|&&w| w >= field.p()) {
            return Err(Error::InvalidAlphabet(format!(
                "{w} is not a canonical element of F_{}",
                field.p()
            )));
        }
        let mut delta = vec![1u32];
        for &w in &els {
            // delta *= (y - w)
            let mut next = vec![0u32; delta.len() + 1];
            for (i, &c) in delta.iter().enumerate() {
                next[i + 1] = field.add(next[i + 1], c);
                next[i] = field.sub(next[i], field.mul(c, w));
            }
            delta = next;
        }
        let mut alpha = Alphabet {
            field,
            elements: els,
            delta,
            table: Vec::new(),
        };
        let depth = (field.p() as usize).max(2) * EAGER_DEPTH_FACTOR;
        let mut row = alpha.unit_row();
        for _ in 0..=depth {
            alpha.table.push(row.clone());
            row = alpha.times_y(&row);
        }
        Ok(alpha)
    }

    /// The whole field as an alphabet.
    pub fn full(field: PrimeField) -> Self {
        let all: Vec<u32> = field.elements().collect();
        Self::new(field, &all).expect("full field is a valid alphabet")
    }

    /// Parses `0,1,4` or `all` (optionally prefixed by `S=`).
    pub fn parse(field: PrimeField, literal: &str) -> Result<Self> {
        let body = literal.trim();
        let body = body.strip_prefix("S=").unwrap_or(body);
        if body.eq_ignore_ascii_case("all") {
            return Ok(Self::full(field));
        }
        let mut els = Vec::new();
        for tok in body.split(',') {
            let tok = tok.trim();
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::InvalidAlphabet(format!("bad element `{tok}`")))?;
            if v < 0 || v >= field.p() as i64 {
                return Err(Error::InvalidAlphabet(format!(
                    "{v} is outside [0, {})",
                    field.p()
                )));
            }
            els.push(v as u32);
        }
        Self::new(field, &els)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn is_full(&self) -> bool {
        self.elements.len() == self.field.p() as usize
    }

    pub fn contains(&self, v: u32) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    /// `Δ_S` as a polynomial in `x_{var+1}`.
    pub fn delta_in(&self, var: usize) -> MultiPoly {
        MultiPoly::univariate(self.field, var + 1, var, &self.delta)
    }

    /// `Δ_S(y)` as a univariate polynomial in `x1`.
    pub fn delta_poly(&self) -> MultiPoly {
        self.delta_in(0)
    }

    fn unit_row(&self) -> Vec<u32> {
        let s = self.size();
        let mut row = vec![0u32; s];
        if s == 1 {
            // y^0 mod (y - w) = 1
            row[0] = 1;
        } else {
            row[0] = 1;
        }
        row
    }

    /// Multiplies a reduced row by `y` and reduces again.
    fn times_y(&self, row: &[u32]) -> Vec<u32> {
        let f = self.field;
        let s = self.size();
        let top = row[s - 1];
        let mut next = vec![0u32; s];
        for i in (1..s).rev() {
            next[i] = row[i - 1];
        }
        next[0] = 0;
        // y^s ≡ -Σ_{i<s} delta[i] y^i
        if top != 0 {
            for (i, slot) in next.iter_mut().enumerate() {
                *slot = f.sub(*slot, f.mul(top, self.delta[i]));
            }
        }
        next
    }

    /// Remainder of `y^a` modulo `Δ_S`, ascending coefficients of length |S|.
    pub fn reduction_row(&self, a: u32) -> Vec<u32> {
        let a = a as usize;
        if let Some(row) = self.table.get(a) {
            return row.clone();
        }
        let mut row = self.table.last().expect("table is non-empty").clone();
        for _ in self.table.len() - 1..a {
            row = self.times_y(&row);
        }
        row
    }

    /// Canonical representative of `P` modulo the vanishing ideal of `S^n`.
    pub fn reduce(&self, p: &MultiPoly) -> MultiPoly {
        assert_eq!(p.field(), self.field, "alphabet and polynomial fields differ");
        let f = self.field;
        let s = self.size() as u32;
        let mut rows: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        let mut out = MultiPoly::zero(f, p.nvars());
        for (m, c) in p.terms() {
            if m.exponents().iter().all(|&e| e < s) {
                out.add_term(m.clone(), c);
                continue;
            }
            // expand ∏_i (x_i^{e_i} mod Δ_S(x_i))
            let mut partial: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), c)];
            for (i, &e) in m.exponents().iter().enumerate() {
                let row = rows.entry(e).or_insert_with(|| self.reduction_row(e));
                let mut next = Vec::with_capacity(partial.len() * row.len());
                for (exps, coef) in &partial {
                    for (j, &r) in row.iter().enumerate() {
                        if r == 0 {
                            continue;
                        }
                        let mut v = exps.clone();
                        v.resize(i + 1, 0);
                        v[i] = j as u32;
                        next.push((v, f.mul(*coef, r)));
                    }
                }
                partial = next;
            }
            for (exps, coef) in partial {
                out.add_term(Monomial::new(exps), coef);
            }
        }
        out
    }

    /// Whether `P` is identically zero on `S^n`.
    pub fn vanishes_on(&self, p: &MultiPoly) -> bool {
        self.reduce(p).is_zero()
    }

    /// Whether `P` and `Q` agree on `S^n`.
    pub fn agree(&self, p: &MultiPoly, q: &MultiPoly) -> bool {
        self.vanishes_on(&(p - q))
    }

    /// Reduced product: `reduce(reduce(a)·reduce(b))`.
    pub fn mul_reduced(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        self.reduce(&(&self.reduce(a) * &self.reduce(b)))
    }

    /// `reduce(a^e)` by repeated squaring in the quotient ring.
    pub fn pow_reduced(&self, a: &MultiPoly, mut e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.field, a.nvars(), 1);
        let mut base = self.reduce(a);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_reduced(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_reduced(&base, &base);
            }
        }
        acc.with_nvars(a.nvars())
    }
}
