//! Sparse multivariate polynomials over F_p.
//!
//! A [`MultiPoly`] maps trimmed exponent vectors to nonzero coefficients. The
//! map is kept canonical at all times: no zero coefficients, no trailing zero
//! exponents, so structural equality is polynomial equality. Terms are ordered
//! graded-lexicographically with `x1 > x2 > ...`, which is also the order used
//! for formatting.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Exponent vector with trailing zeros trimmed; variable `i` is `x_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    /// `x_{var+1}^exp`.
    pub fn var(var: usize, exp: u32) -> Self {
        let mut v = vec![0; var + 1];
        v[var] = exp;
        Monomial::new(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.0.get(var).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of variables in use (one past the last nonzero exponent).
    pub fn width(&self) -> usize {
        self.0.len()
    }

    /// Indices of variables with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let v = (0..len).map(|i| self.exp(i) + other.exp(i)).collect();
        Monomial(v)
    }

    /// Same monomial with variable `var` removed (exponent set to zero).
    pub fn without(&self, var: usize) -> Monomial {
        let mut v = self.0.clone();
        if var < v.len() {
            v[var] = 0;
        }
        Monomial::new(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone)]
pub struct MultiPoly {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Monomial, u32>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl std::hash::Hash for MultiPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.hash(state);
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl Ord for MultiPoly {
    /// Degree first, then the descending term lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.terms.iter().rev().cmp(other.terms.iter().rev()))
    }
}

impl PartialOrd for MultiPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[p={}, n={}]({})", self.field.p(), self.nvars, self)
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl MultiPoly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: u32) -> Self {
        Self::monomial(field, nvars, Monomial::one(), c)
    }

    /// The coordinate `x_{var+1}`.
    pub fn var(field: PrimeField, nvars: usize, var: usize) -> Self {
        Self::monomial(field, nvars.max(var + 1), Monomial::var(var, 1), 1)
    }

    pub fn monomial(field: PrimeField, nvars: usize, m: Monomial, c: u32) -> Self {
        let mut p = Self::zero(field, nvars.max(m.width()));
        p.add_term(m, c);
        p
    }

    /// Builds from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I>(field: PrimeField, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, u32)>,
    {
        let mut p = Self::zero(field, nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Univariate polynomial in `x_{var+1}` from ascending coefficients.
    pub fn univariate(field: PrimeField, nvars: usize, var: usize, coeffs: &[u32]) -> Self {
        Self::from_terms(
            field,
            nvars.max(var + 1),
            coeffs
                .iter()
                .enumerate()
                .map(|(e, &c)| (Monomial::var(var, e as u32), c)),
        )
    }

    /// In-place `self += c * m`.
    pub fn add_term(&mut self, m: Monomial, c: u32) {
        let c = c % self.field.p();
        if c == 0 {
            return;
        }
        self.nvars = self.nvars.max(m.width());
        let f = self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = f.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Same polynomial viewed in at least `n` variables.
    pub fn with_nvars(mut self, n: usize) -> Self {
        self.nvars = self.nvars.max(n);
        self
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff(&Monomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` stands for the zero polynomial (degree -inf).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// `deg <= d`, true for the zero polynomial.
    pub fn degree_at_most(&self, d: u32) -> bool {
        self.degree().is_none_or(|g| g <= d)
    }

    pub fn is_constant(&self) -> bool {
        self.degree_at_most(0)
    }

    /// Largest exponent of `x_{var+1}` among the terms.
    pub fn var_degree(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var)).max().unwrap_or(0)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, u32)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    /// `I(P)`: indices of variables appearing in some term.
    pub fn dependent_coords(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.support()).collect()
    }

    fn check_field(&self, other: &MultiPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.p(),
                right: other.field.p(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_field(other)?;
        let mut out = self.clone();
        out.nvars = out.nvars.max(other.nvars);
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_field(other)?;
        let mut out = Self::zero(self.field, self.nvars.max(other.nvars));
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: u32) -> MultiPoly {
        let c = c % self.field.p();
        let mut out = Self::zero(self.field, self.nvars);
        if c != 0 {
            for (m, &a) in &self.terms {
                out.terms.insert(m.clone(), self.field.mul(a, c));
            }
        }
        out
    }

    fn neg_ref(&self) -> MultiPoly {
        self.scale(self.field.p() - 1)
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut acc = Self::constant(self.field, self.nvars, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Value at `x`, which must cover every variable in use.
    pub fn evaluate(&self, x: &[u32]) -> Result<u32> {
        let need = self.terms.keys().map(Monomial::width).max().unwrap_or(0);
        if x.len() < need {
            return Err(Error::PointTooShort { need, got: x.len() });
        }
        let f = self.field;
        let mut acc = 0u32;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = f.mul(t, f.pow(x[i], e as u64));
                }
            }
            acc = f.add(acc, t);
        }
        Ok(acc)
    }

    /// Substitutes `x_{i+1} := subs[i]` for every variable in use.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        let width = self.terms.keys().map(Monomial::width).max().unwrap_or(0);
        if subs.len() < width {
            return Err(Error::PointTooShort {
                need: width,
                got: subs.len(),
            });
        }
        for s in subs {
            self.check_field(s)?;
        }
        let nvars = subs.iter().map(|s| s.nvars).max().unwrap_or(0);
        let mut cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut out = Self::zero(self.field, nvars);
        for (m, &c) in &self.terms {
            let mut t = Self::constant(self.field, nvars, c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = cache
                    .entry((i, e))
                    .or_insert_with(|| subs[i].pow(e))
                    .clone();
                t = &t * &pw;
            }
            out = &out + &t;
        }
        Ok(out.with_nvars(nvars))
    }

    /// Whether at most one variable appears.
    pub fn is_univariate(&self) -> bool {
        self.dependent_coords().len() <= 1
    }

    /// Ascending coefficients of a univariate polynomial (in whichever
    /// variable it uses).
    pub fn univariate_coeffs(&self) -> Result<Vec<u32>> {
        let coords = self.dependent_coords();
        if coords.len() > 1 {
            return Err(Error::NotUnivariate);
        }
        let var = coords.into_iter().next().unwrap_or(0);
        let deg = self.degree().unwrap_or(0) as usize;
        let mut out = vec![0; deg + 1];
        for (m, &c) in &self.terms {
            out[m.exp(var) as usize] = c;
        }
        while out.len() > 1 && out.last() == Some(&0) {
            out.pop();
        }
        Ok(out)
    }

    /// `A ∘ P` for univariate `A`.
    pub fn compose_univariate(a: &MultiPoly, p: &MultiPoly) -> Result<MultiPoly> {
        a.check_field(p)?;
        let coeffs = a.univariate_coeffs()?;
        let f = p.field;
        // Horner
        let mut acc = MultiPoly::zero(f, p.nvars);
        for &c in coeffs.iter().rev() {
            acc = &(&acc * p) + &MultiPoly::constant(f, p.nvars, c);
        }
        Ok(acc.with_nvars(p.nvars))
    }

    /// Fixes the variables listed in `assignment`; the rest stay symbolic.
    pub fn partial_evaluate(&self, assignment: &[(usize, u32)]) -> Result<MultiPoly> {
        let mut vals: BTreeMap<usize, u32> = BTreeMap::new();
        for &(i, y) in assignment {
            if i >= self.nvars {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.nvars,
                });
            }
            vals.insert(i, y % self.field.p());
        }
        let f = self.field;
        let mut out = Self::zero(f, self.nvars);
        for (m, &c) in &self.terms {
            let mut coef = c;
            let mut exps = m.exponents().to_vec();
            for (i, e) in exps.iter_mut().enumerate() {
                if *e > 0 {
                    if let Some(&y) = vals.get(&i) {
                        coef = f.mul(coef, f.pow(y, *e as u64));
                        *e = 0;
                    }
                }
            }
            out.add_term(Monomial::new(exps), coef);
        }
        Ok(out)
    }

    /// Groups terms by the power of `x_{var+1}`: `P = Σ_k slices[k] · x^k`.
    pub fn slices_in(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.var_degree(var) as usize;
        let mut out = vec![Self::zero(self.field, self.nvars); deg + 1];
        for (m, &c) in &self.terms {
            out[m.exp(var) as usize].add_term(m.without(var), c);
        }
        out
    }

    /// Homogeneous part of degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        Self::from_terms(
            self.field,
            self.nvars,
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, &c)| (m.clone(), c)),
        )
    }

    /// Splits a polynomial of degree at most two as `xᵀMx + L_0` with `M`
    /// symmetric (off-diagonal entries are half the mixed coefficients).
    pub fn quadratic_anatomy(&self) -> Result<(Vec<Vec<u32>>, AffineView)> {
        if let Some(g) = self.degree() {
            if g > 2 {
                return Err(Error::DegreeTooHigh { max: 2, got: g });
            }
        }
        let f = self.field;
        if f.p() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        let n = self.nvars;
        let half = f.inv(2).expect("p odd");
        let mut m = vec![vec![0u32; n]; n];
        let mut affine = AffineView::zero(f, n);
        for (mono, &c) in &self.terms {
            let support: Vec<usize> = mono.support().collect();
            match mono.degree() {
                0 => affine.constant = c,
                1 => affine.linear[support[0]] = c,
                _ => {
                    if support.len() == 1 {
                        let i = support[0];
                        m[i][i] = c;
                    } else {
                        let (i, j) = (support[0], support[1]);
                        let h = f.mul(c, half);
                        m[i][j] = h;
                        m[j][i] = h;
                    }
                }
            }
        }
        Ok((m, affine))
    }

    /// Inverse of [`MultiPoly::quadratic_anatomy`].
    pub fn from_quadratic(field: PrimeField, m: &[Vec<u32>], affine: &AffineView) -> MultiPoly {
        let n = m.len().max(affine.nvars());
        let mut out = affine.to_poly();
        out.nvars = out.nvars.max(n);
        for i in 0..m.len() {
            out.add_term(Monomial::var(i, 2), m[i][i]);
            for j in (i + 1)..m.len() {
                let c = field.add(m[i][j], m[j][i]);
                let mut e = vec![0; j + 1];
                e[i] = 1;
                e[j] = 1;
                out.add_term(Monomial::new(e), c);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            /// Panics on field mismatch; use the `try_` form for checked use.
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$checked(rhs).expect("field mismatch")
            }
        }
        impl $trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$checked(&rhs).expect("field mismatch")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

/// Affine polynomial `Σ c_i x_i + c_0` stored densely.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineView {
    field: PrimeField,
    pub linear: Vec<u32>,
    pub constant: u32,
}

impl Serialize for AffineView {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_poly().to_string())
    }
}

impl AffineView {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        AffineView {
            field,
            linear: vec![0; n],
            constant: 0,
        }
    }

    pub fn new(field: PrimeField, linear: Vec<u32>, constant: u32) -> Self {
        let p = field.p();
        AffineView {
            field,
            linear: linear.into_iter().map(|c| c % p).collect(),
            constant: constant % p,
        }
    }

    pub fn coordinate(field: PrimeField, n: usize, i: usize) -> Self {
        let mut a = Self::zero(field, n.max(i + 1));
        a.linear[i] = 1;
        a
    }

    pub fn from_poly(p: &MultiPoly) -> Result<Self> {
        if let Some(g) = p.degree() {
            if g > 1 {
                return Err(Error::DegreeTooHigh { max: 1, got: g });
            }
        }
        let mut a = Self::zero(p.field(), p.nvars());
        for (m, c) in p.terms() {
            match m.support().next() {
                None => a.constant = c,
                Some(i) => a.linear[i] = c,
            }
        }
        Ok(a)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.linear.len()
    }

    /// Pads to `n` variables.
    pub fn resized(mut self, n: usize) -> Self {
        if self.linear.len() < n {
            self.linear.resize(n, 0);
        }
        self
    }

    pub fn to_poly(&self) -> MultiPoly {
        let mut p = MultiPoly::constant(self.field, self.linear.len(), self.constant);
        for (i, &c) in self.linear.iter().enumerate() {
            p.add_term(Monomial::var(i, 1), c);
        }
        p.with_nvars(self.linear.len())
    }

    /// `Z(L)`: indices with a nonzero linear coefficient.
    pub fn support(&self) -> BTreeSet<usize> {
        self.linear
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.linear_is_zero()
    }

    pub fn linear_is_zero(&self) -> bool {
        self.linear.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, x: &[u32]) -> u32 {
        let f = self.field;
        self.linear
            .iter()
            .zip(x)
            .fold(self.constant, |acc, (&c, &xi)| f.add(acc, f.mul(c, xi)))
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: u32, other: &AffineView) -> AffineView {
        let f = self.field;
        let n = self.linear.len().max(other.linear.len());
        let mut out = self.clone().resized(n);
        for (i, &b) in other.linear.iter().enumerate() {
            out.linear[i] = f.add(out.linear[i], f.mul(c, b));
        }
        out.constant = f.add(out.constant, f.mul(c, other.constant));
        out
    }

    pub fn scale(&self, c: u32) -> AffineView {
        AffineView::zero(self.field, self.linear.len()).axpy(c, self)
    }

    pub fn add_constant(&self, c: u32) -> AffineView {
        let mut out = self.clone();
        out.constant = self.field.add(out.constant, c);
        out
    }

    /// Fixes the coordinates in `assignment`, folding them into the constant.
    pub fn restrict(&self, assignment: &[(usize, u32)]) -> AffineView {
        let f = self.field;
        let mut out = self.clone();
        for &(i, y) in assignment {
            if i < out.linear.len() {
                out.constant = f.add(out.constant, f.mul(out.linear[i], y));
                out.linear[i] = 0;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn x(field: PrimeField, i: usize) -> MultiPoly {
        MultiPoly::var(field, 0, i)
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial::new(vec![1]);
        let b = Monomial::new(vec![0, 1]);
        let c = Monomial::new(vec![0, 0, 2]);
        assert!(a > b);
        assert!(c > a);
        assert_eq!(Monomial::new(vec![1, 0, 0]), a);
    }

    #[test]
    fn difference_of_squares() {
        let f5 = f(5);
        let (x1, x2) = (x(f5, 0), x(f5, 1));
        let prod = &(&x1 + &x2) * &(&x1 - &x2);
        let expected = &x1.pow(2) + &x2.pow(2).scale(4);
        assert_eq!(prod, expected);
        assert_eq!(prod.degree(), Some(2));
        assert!((&prod + &(-&prod)).is_zero());
    }

    #[test]
    fn zero_degree_marker() {
        let z = MultiPoly::zero(f(3), 2);
        assert_eq!(z.degree(), None);
        assert!(z.degree_at_most(0));
        assert_eq!(MultiPoly::constant(f(3), 2, 1).degree(), Some(0));
        assert_eq!(z.evaluate(&[1, 2]).unwrap(), 0);
    }

    #[test]
    fn evaluation() {
        let f5 = f(5);
        let s = &(&x(f5, 0) + &x(f5, 1)) + &x(f5, 2);
        assert_eq!(s.evaluate(&[1, 1, 1]).unwrap(), 3);
        let q = &(&x(f5, 0).pow(4) + &x(f5, 1).pow(4)) + &x(f5, 2).pow(4);
        assert_eq!(q.evaluate(&[2, 3, 4]).unwrap(), 3);
        assert!(matches!(
            q.evaluate(&[1, 2]),
            Err(Error::PointTooShort { need: 3, got: 2 })
        ));
    }

    #[test]
    fn composition() {
        let f5 = f(5);
        let y2 = MultiPoly::univariate(f5, 1, 0, &[0, 0, 1]);
        let s = &x(f5, 0) + &x(f5, 1);
        let c = MultiPoly::compose_univariate(&y2, &s).unwrap();
        let expected = &(&x(f5, 0).pow(2) + &(&x(f5, 0) * &x(f5, 1)).scale(2)) + &x(f5, 1).pow(2);
        assert_eq!(c, expected);

        let y4 = MultiPoly::univariate(f5, 1, 0, &[0, 0, 0, 0, 1]);
        let c = MultiPoly::compose_univariate(&y4, &x(f5, 0)).unwrap();
        let image: BTreeSet<u32> = (0..5).map(|v| c.evaluate(&[v]).unwrap()).collect();
        assert_eq!(image, BTreeSet::from([0, 1]));

        let shift = MultiPoly::univariate(f5, 1, 0, &[3, 1]);
        let p = &(&x(f5, 0) * &x(f5, 2)) + &x(f5, 1);
        assert_eq!(
            MultiPoly::compose_univariate(&shift, &p).unwrap(),
            &p + &MultiPoly::constant(f5, 3, 3)
        );

        let not_uni = &x(f5, 0) * &x(f5, 1);
        assert_eq!(
            MultiPoly::compose_univariate(&not_uni, &p),
            Err(Error::NotUnivariate)
        );
    }

    #[test]
    fn dependent_coordinates() {
        let f3 = f(3);
        let p = &(&x(f3, 0) * &x(f3, 1)) + &(&x(f3, 1) * &x(f3, 2));
        assert_eq!(p.dependent_coords(), BTreeSet::from([0, 1, 2]));
        assert!(MultiPoly::constant(f3, 4, 1).dependent_coords().is_empty());
        let q = &x(f3, 0).pow(2) - &x(f3, 0);
        assert_eq!(q.dependent_coords(), BTreeSet::from([0]));
    }

    #[test]
    fn partial_evaluation() {
        let f5 = f(5);
        let p = &(&x(f5, 0) * &x(f5, 1)) + &x(f5, 2);
        assert_eq!(p.partial_evaluate(&[(0, 0)]).unwrap(), x(f5, 2).with_nvars(3));
        assert_eq!(
            p.partial_evaluate(&[(0, 2)]).unwrap(),
            &x(f5, 1).scale(2) + &x(f5, 2)
        );
        let l = &(&x(f5, 0) + &x(f5, 1)) + &x(f5, 2);
        let r = l.partial_evaluate(&[(1, 1), (2, 1)]).unwrap();
        assert_eq!(r, &x(f5, 0) + &MultiPoly::constant(f5, 1, 2));
        assert_eq!(r.dependent_coords().len(), 1);
        for a in 0..5 {
            assert_eq!(r.evaluate(&[a, 0, 0]).unwrap(), l.evaluate(&[a, 1, 1]).unwrap());
        }
        assert!(p.partial_evaluate(&[(7, 1)]).is_err());
    }

    #[test]
    fn quadratic_anatomy_examples() {
        let f5 = f(5);
        let (m, l0) = (&x(f5, 0) * &x(f5, 1)).quadratic_anatomy().unwrap();
        assert_eq!(m, vec![vec![0, 3], vec![3, 0]]);
        assert!(l0.is_zero());

        let f3 = f(3);
        let p = &(&x(f3, 0).pow(2) + &x(f3, 0)) + &MultiPoly::constant(f3, 1, 1);
        let (m, l0) = p.quadratic_anatomy().unwrap();
        assert_eq!(m, vec![vec![1]]);
        assert_eq!(l0.to_poly(), &x(f3, 0) + &MultiPoly::constant(f3, 1, 1));

        let aff = &x(f5, 1).scale(2) + &MultiPoly::constant(f5, 2, 4);
        let (m, l0) = aff.quadratic_anatomy().unwrap();
        assert!(m.iter().flatten().all(|&c| c == 0));
        assert_eq!(l0.to_poly(), aff);

        assert_eq!(
            x(f5, 0).pow(3).quadratic_anatomy(),
            Err(Error::DegreeTooHigh { max: 2, got: 3 })
        );
        assert_eq!(
            x(f(2), 0).quadratic_anatomy(),
            Err(Error::CharacteristicTwo)
        );
    }

    #[test]
    fn slicing() {
        let f5 = f(5);
        let p = &(&x(f5, 0) * &x(f5, 1).pow(2)) + &x(f5, 1);
        let s = p.slices_in(1);
        assert_eq!(s.len(), 3);
        assert!(s[0].is_zero());
        assert_eq!(s[1], MultiPoly::constant(f5, 2, 1));
        assert_eq!(s[2], x(f5, 0));
    }
}
