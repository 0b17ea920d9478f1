use std::collections::{BTreeMap, HashMap};

use super::{CertificateKind, RankCertificate};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::{Monomial, MultiPoly};
use crate::util::next_vector;

pub const DEFAULT_RANK_BUDGET: u64 = 20_000_000;

/// Dense coordinates over a fixed monomial basis.
struct Basis {
    index: BTreeMap<Monomial, usize>,
}

impl Basis {
    /// Monomials in `vars` of total degree ≤ `max_deg` (and per-variable
    /// degree < `cap` when given).
    fn new(vars: &[usize], max_deg: u32, cap: Option<u32>) -> Self {
        let mut index = BTreeMap::new();
        let width = vars.iter().max().map_or(0, |&v| v + 1);
        let per_var = cap.map_or(max_deg, |c| (c - 1).min(max_deg));
        let mut e = vec![0u32; vars.len()];
        loop {
            if e.iter().sum::<u32>() <= max_deg {
                let mut exps = vec![0u32; width];
                for (&v, &x) in vars.iter().zip(&e) {
                    exps[v] = x;
                }
                let m = Monomial::new(exps);
                let next = index.len();
                index.entry(m).or_insert(next);
            }
            if !next_vector(&mut e, per_var + 1) {
                break;
            }
        }
        Basis { index }
    }

    fn len(&self) -> usize {
        self.index.len()
    }

    fn encode(&self, p: &MultiPoly) -> Option<Vec<u32>> {
        let mut v = vec![0u32; self.len()];
        for (m, c) in p.terms() {
            v[*self.index.get(m)?] = c;
        }
        Some(v)
    }
}

fn add_vec(f: PrimeField, a: &mut [u32], b: &[u32]) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = f.add(*x, y);
    }
}

fn sub_vec(f: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

/// Monic non-constant polynomials in `vars` of degree at most `d`.
fn monic_factors(f: PrimeField, n: usize, vars: &[usize], d: u32, budget: u64) -> Result<Vec<MultiPoly>> {
    let basis: Vec<Monomial> = Basis::new(vars, d, None)
        .index
        .into_keys()
        .filter(|m| !m.is_one())
        .collect();
    let count = (f.p() as u128).saturating_pow(basis.len() as u32 + 1);
    if count > budget as u128 {
        return Err(Error::budget("candidate factors", count, budget as u128));
    }
    let mut out = Vec::new();
    let mut coeffs = vec![0u32; basis.len() + 1];
    while next_vector(&mut coeffs, f.p()) {
        let q = MultiPoly::from_terms(
            f,
            n,
            basis
                .iter()
                .cloned()
                .chain(std::iter::once(Monomial::one()))
                .zip(coeffs.iter().copied()),
        );
        if !q.is_constant() && q.leading().is_some_and(|(_, c)| c == 1) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Exact degree-`d` rank (relative to `S` when given) by exhaustive search.
///
/// Summands are products of factors of degree ≤ `d` with total degree at most
/// `deg P`; for `d = 0` they are scaled monomials. Relative to `S`, a sum of
/// summands works exactly when its reduction equals the reduction of `P`.
/// When `budget` runs out the result is an upper bound with
/// `budget_exhausted` set.
pub fn brute_force_rank(p: &MultiPoly, d: u32, s: Option<&Alphabet>, budget: u64) -> Result<RankCertificate> {
    let f = p.field();
    let n = p.nvars();
    let target = match s {
        Some(s) => s.reduce(p),
        None => p.clone(),
    };
    if target.is_zero() {
        return Ok(RankCertificate::build(p, d, Vec::new(), s, 0));
    }
    let deg = p.degree().expect("non-zero");
    if d >= 1 && d >= deg {
        return Ok(RankCertificate::build(p, d, vec![vec![p.clone()]], s, 1));
    }
    // coordinates outside I(target) can be frozen at a point of S (or 0)
    let vars: Vec<usize> = target.dependent_coords().into_iter().collect();
    let reduce = |q: &MultiPoly| match s {
        Some(s) => s.reduce(q),
        None => q.clone(),
    };
    let basis = Basis::new(&vars, deg, s.map(|s| s.size() as u32));
    let goal = basis.encode(&target).ok_or_else(|| Error::Corrupt("target outside basis".into()))?;

    // fallback: one scaled monomial per term of the target, split into
    // coordinate factors when d ≥ 1
    let monomial_split = |t: &MultiPoly| -> Vec<Vec<MultiPoly>> {
        t.terms()
            .map(|(m, c)| {
                if d == 0 {
                    return vec![MultiPoly::monomial(f, n, m.clone(), c)];
                }
                let mut fs = vec![MultiPoly::constant(f, n, c)];
                for (i, &e) in m.exponents().iter().enumerate() {
                    for _ in 0..e {
                        fs.push(MultiPoly::var(f, n, i));
                    }
                }
                if fs.len() > 1 {
                    let first = fs.remove(1).scale(c);
                    fs[0] = first;
                }
                fs
            })
            .collect()
    };
    let upper = target.num_terms();

    // candidate summands, keyed by their reduced coordinate vector
    let mut work: u64 = 0;
    let mut atoms: HashMap<Vec<u32>, Vec<MultiPoly>> = HashMap::new();
    let add_atom = |factors: Vec<MultiPoly>, atoms: &mut HashMap<Vec<u32>, Vec<MultiPoly>>| {
        let prod = factors
            .iter()
            .fold(MultiPoly::constant(f, n, 1), |acc, q| &acc * q);
        let red = reduce(&prod);
        if red.is_zero() {
            return;
        }
        if let Some(code) = basis.encode(&red) {
            atoms.entry(code).or_insert(factors);
        }
    };
    let exhausted = |lower: usize| -> RankCertificate {
        let mut c = RankCertificate::build(p, d, monomial_split(&target), s, lower);
        c.kind = if c.value == lower {
            CertificateKind::Exact
        } else {
            CertificateKind::UpperBound
        };
        c.budget_exhausted = c.kind == CertificateKind::UpperBound;
        c
    };

    if d == 0 {
        for m in basis.index.keys() {
            for c in 1..f.p() {
                add_atom(vec![MultiPoly::monomial(f, n, m.clone(), c)], &mut atoms);
            }
        }
    } else {
        let factors = match monic_factors(f, n, &vars, d, budget) {
            Ok(fs) => fs,
            Err(_) => return Ok(exhausted(1)),
        };
        let degs: Vec<u32> = factors.iter().map(|q| q.degree().unwrap_or(0)).collect();
        // multisets of factors with total degree ≤ deg, times scalars
        let mut stack: Vec<(usize, u32, Vec<usize>)> = vec![(0, 0, Vec::new())];
        while let Some((start, used, chosen)) = stack.pop() {
            for c in 1..f.p() {
                let mut fs: Vec<MultiPoly> = chosen.iter().map(|&i| factors[i].clone()).collect();
                match fs.first_mut() {
                    Some(first) => *first = first.scale(c),
                    None => fs.push(MultiPoly::constant(f, n, c)),
                }
                add_atom(fs, &mut atoms);
                work += 1;
            }
            if work > budget {
                return Ok(exhausted(1));
            }
            for i in start..factors.len() {
                if used + degs[i] <= deg {
                    let mut next = chosen.clone();
                    next.push(i);
                    stack.push((i, used + degs[i], next));
                }
            }
        }
    }

    let list: Vec<(&Vec<u32>, &Vec<MultiPoly>)> = {
        let mut l: Vec<_> = atoms.iter().collect();
        l.sort();
        l
    };
    // k = 1, 2, …: choose k−1 atoms, look up the last one
    let mut search = Search {
        f,
        goal: &goal,
        list: &list,
        atoms: &atoms,
        work,
        budget,
    };
    for k in 1..upper {
        let mut chosen = Vec::with_capacity(k - 1);
        let mut sum = vec![0u32; basis.len()];
        match search.dfs(k - 1, 0, &mut sum, &mut chosen) {
            Err(()) => return Ok(exhausted(k)),
            Ok(Some(fs)) => {
                let mut summands: Vec<Vec<MultiPoly>> = chosen.iter().map(|&i| list[i].1.clone()).collect();
                summands.push(fs);
                return Ok(RankCertificate::build(p, d, summands, s, k));
            }
            Ok(None) => {}
        }
    }
    Ok(RankCertificate::build(p, d, monomial_split(&target), s, upper))
}

struct Search<'a> {
    f: PrimeField,
    goal: &'a [u32],
    list: &'a [(&'a Vec<u32>, &'a Vec<MultiPoly>)],
    atoms: &'a HashMap<Vec<u32>, Vec<MultiPoly>>,
    work: u64,
    budget: u64,
}

impl Search<'_> {
    /// Picks `remaining` more atoms with index ≥ `start`; on success `chosen`
    /// holds them and the completing atom is returned. `Err` means the
    /// budget ran out.
    fn dfs(
        &mut self,
        remaining: usize,
        start: usize,
        sum: &mut Vec<u32>,
        chosen: &mut Vec<usize>,
    ) -> std::result::Result<Option<Vec<MultiPoly>>, ()> {
        if remaining == 0 {
            self.work += 1;
            if self.work > self.budget {
                return Err(());
            }
            let rest = sub_vec(self.f, self.goal, sum);
            return Ok(self.atoms.get(&rest).cloned());
        }
        for i in start..self.list.len() {
            let atom = self.list[i].0;
            add_vec(self.f, sum, atom);
            chosen.push(i);
            if let Some(fs) = self.dfs(remaining - 1, i, sum, chosen)? {
                return Ok(Some(fs));
            }
            chosen.pop();
            let back = sub_vec(self.f, sum, atom);
            *sum = back;
        }
        Ok(None)
    }
}
