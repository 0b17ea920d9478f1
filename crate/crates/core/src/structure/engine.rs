use serde::Serialize;

use super::{colex_less, modified_degree, AcceptableDecomposition, DegreeDescription, Product};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly};
use crate::rank::{rk1_quadratic, RankCertificate};
use crate::spectrum::{histogram, Enumeration};
use crate::util::next_vector;

/// Terms of a decomposition in which `P_k` appears exactly `r` times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regrouped {
    pub r: u32,
    /// `T_r ∘ (P_1, …, P_{k−1})`.
    pub composite: MultiPoly,
    /// The contributing terms with the `r` copies of `P_k` removed.
    pub terms: Vec<Product>,
}

/// Splits the decomposition by the power of member `k`:
/// `P = P_0 + Σ_{r ≤ t} (T_r ∘ others) · P_k^r`.
pub fn regroup_by_power(dec: &AcceptableDecomposition, k: usize) -> Result<Vec<Regrouped>> {
    if k >= dec.family.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: dec.family.len(),
        });
    }
    let f = dec.target.field();
    let n = dec.target.nvars();
    let mut out: Vec<Regrouped> = (0..=dec.t)
        .map(|r| Regrouped {
            r,
            composite: MultiPoly::zero(f, n),
            terms: Vec::new(),
        })
        .collect();
    for term in &dec.terms {
        let r = term.factors.iter().filter(|&&j| j == k).count();
        if r > dec.t as usize {
            return Err(Error::Corrupt(format!(
                "member {k} appears {r} times in one product, more than t = {}",
                dec.t
            )));
        }
        let rest = Product {
            coeff: term.coeff,
            factors: term.factors.iter().copied().filter(|&j| j != k).collect(),
        };
        let slot = &mut out[r];
        slot.composite = &slot.composite + &dec.product(&rest);
        slot.terms.push(rest);
    }
    // exactness of the regrouping
    let pk = &dec.family[k];
    let total = out.iter().fold(dec.vanishing_part.clone(), |acc, g| {
        &acc + &(&g.composite * &pk.pow(g.r))
    });
    if total.with_nvars(n) != dec.target {
        return Err(Error::Corrupt("regrouping does not reassemble to P".into()));
    }
    Ok(out)
}

/// Whether every `T_r ∘ others` with `r ≥ 1` vanishes on `S^n`. The reduction
/// test is cross-checked by enumeration when the cube fits the budget.
pub fn case2_check(ts: &[MultiPoly], s: &Alphabet, cfg: &Enumeration) -> Result<bool> {
    let mut all = true;
    for q in ts {
        let by_reduction = s.vanishes_on(q);
        if Enumeration::point_count(s.size(), q.nvars()) <= cfg.budget as u128 {
            let h = histogram(q, s, cfg)?;
            let by_enumeration = h.counts[0] == h.total;
            if by_enumeration != by_reduction {
                return Err(Error::Corrupt("reduction and enumeration disagree on vanishing".into()));
            }
        }
        all &= by_reduction;
    }
    Ok(all)
}

/// One summand per monomial: `c·x_i · (rest)` for degree ≥ 2, `c·x_i` or
/// `c` below.
fn monomial_split(q: &MultiPoly) -> Vec<Vec<MultiPoly>> {
    let f = q.field();
    let n = q.nvars();
    q.terms()
        .map(|(m, c)| {
            let Some(i) = m.support().next() else {
                return vec![MultiPoly::constant(f, n, c)];
            };
            let head = MultiPoly::var(f, n, i).scale(c);
            let mut exps = m.exponents().to_vec();
            exps[i] -= 1;
            let rest = Monomial::new(exps);
            if rest.is_one() {
                vec![head]
            } else {
                vec![head, MultiPoly::monomial(f, n, rest, 1)]
            }
        })
        .collect()
}

/// Certificate for `residual` relative to `S` whose factors all have modified
/// degree below `m`.
fn residual_certificate(residual: &MultiPoly, m: u32, s: &Alphabet) -> Result<RankCertificate> {
    let red = s.reduce(residual);
    let mut best = monomial_split(&red);
    if m == 2 && red.degree_at_most(2) && s.field().p() != 2 {
        let c = rk1_quadratic(&red, None)?;
        if c.summands.len() < best.len() {
            best = c.summands;
        }
    }
    Ok(RankCertificate::build(residual, m.saturating_sub(1), best, Some(s), 0))
}

/// Replaces every occurrence of member `k` by `Σ a_i P_i + Σ_j ∏ summands[j]`,
/// where `replacement` certifies `P_k − Σ a_i P_i` relative to `S`. The
/// certificate's vanishing part joins `P_0`.
pub fn case3_substitute(
    dec: &AcceptableDecomposition,
    k: usize,
    a: &[u32],
    replacement: &RankCertificate,
    s: &Alphabet,
) -> Result<AcceptableDecomposition> {
    let f = dec.target.field();
    let n = dec.target.nvars();
    if a.len() != dec.family.len() || a.get(k).is_some_and(|&x| x != 0) {
        return Err(Error::Invalid("combination must cover the family and skip the replaced member".into()));
    }
    let pk = &dec.family[k];
    let m = modified_degree(pk);
    let residual = a
        .iter()
        .zip(&dec.family)
        .fold(pk.clone(), |acc, (&ai, q)| &acc - &q.scale(ai));
    replacement.verify(&residual, Some(s))?;
    for fs in &replacement.summands {
        if let Some(q) = fs.iter().find(|q| !q.is_constant() && modified_degree(q) >= m) {
            return Err(Error::Corrupt(format!("replacement factor {q} is not below modified degree {m}")));
        }
    }
    // the replacement as a sum of factor lists
    let mut atoms: Vec<(u32, Vec<MultiPoly>)> = a
        .iter()
        .zip(&dec.family)
        .filter(|(&ai, _)| ai != 0)
        .map(|(&ai, q)| (ai, vec![q.clone()]))
        .collect();
    atoms.extend(replacement.summands.iter().map(|fs| (1, fs.clone())));

    let mut products = Vec::new();
    for term in &dec.terms {
        let r = term.factors.iter().filter(|&&j| j == k).count();
        let rest: Vec<MultiPoly> = term
            .factors
            .iter()
            .filter(|&&j| j != k)
            .map(|&j| dec.family[j].clone())
            .collect();
        let mut expanded: Vec<(u32, Vec<MultiPoly>)> = vec![(term.coeff, rest)];
        for _ in 0..r {
            expanded = expanded
                .iter()
                .flat_map(|(c, fs)| {
                    atoms.iter().map(move |(ca, fa)| {
                        let mut all = fs.clone();
                        all.extend(fa.iter().cloned());
                        (f.mul(*c, *ca), all)
                    })
                })
                .collect();
        }
        products.extend(expanded);
    }
    let mut keep: Vec<MultiPoly> = dec
        .family
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, q)| q.clone())
        .collect();
    keep.extend(replacement.summands.iter().flatten().cloned());
    let out = AcceptableDecomposition::assemble(&dec.target, s, dec.d, dec.t, keep, products, n)?;
    let report = out.verify(s);
    if !report.ok {
        return Err(Error::Corrupt(format!("substitution broke the decomposition: {report:?}")));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    /// Largest certificate accepted in the third case; `None` accepts any.
    pub max_summands: Option<usize>,
    /// Cap on the number of combinations `a` tried per step.
    pub a_budget: u64,
    pub max_steps: usize,
    pub cfg: Enumeration,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            max_summands: None,
            a_budget: 4096,
            max_steps: 10_000,
            cfg: Enumeration::default(),
        }
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogEntry {
    pub step: usize,
    pub case: String,
    pub removed: Option<String>,
    pub added: Vec<String>,
    pub degree_description: DegreeDescription,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineReport {
    pub e: u32,
    pub initial_description: DegreeDescription,
    pub log: Vec<LogEntry>,
    pub decomposition: AcceptableDecomposition,
    /// Number of distinct products in the final decomposition.
    pub rank_bound: usize,
    pub max_modified_degree: u32,
    pub verified_by_reduction: bool,
    pub verified_by_enumeration: Option<bool>,
}

impl EngineReport {
    /// The run log as JSON lines.
    pub fn log_lines(&self) -> Vec<String> {
        self.log
            .iter()
            .map(|e| {
                let added: Vec<String> = e.added.iter().map(|s| format!("{s:?}")).collect();
                let removed = e.removed.as_ref().map_or("null".to_string(), |s| format!("{s:?}"));
                let dd: Vec<String> = e.degree_description.0.iter().map(|x| x.to_string()).collect();
                format!(
                    "{{\"step\":{},\"case\":\"{}\",\"removed\":{},\"added\":[{}],\"degree_description\":[{}]}}",
                    e.step,
                    e.case,
                    removed,
                    added.join(","),
                    dd.join(",")
                )
            })
            .collect()
    }
}

/// First point of `S^n` (lexicographic) where `pred` holds.
fn first_point(s: &Alphabet, n: usize, cfg: &Enumeration, mut pred: impl FnMut(&[u32]) -> bool) -> Result<Option<Vec<u32>>> {
    cfg.check("points of S^n", Enumeration::point_count(s.size(), n))?;
    let mut idx = vec![0u32; n];
    let els = s.elements();
    loop {
        let x: Vec<u32> = idx.iter().map(|&i| els[i as usize]).collect();
        if pred(&x) {
            return Ok(Some(x));
        }
        if !next_vector(&mut idx, s.size() as u32) {
            return Ok(None);
        }
    }
}

/// Evidence for a stalled third case: a point where `(T_1, …, T_t)` is non-zero
/// and whether `A(F_p) ⊆ P(S^n)` for `A(u) = Σ T_r(y) u^r`.
fn stall_evidence(dec: &AcceptableDecomposition, groups: &[Regrouped], s: &Alphabet, cfg: &Enumeration) -> Result<String> {
    let f = dec.target.field();
    let n = dec.target.nvars();
    let point = first_point(s, n, cfg, |x| {
        groups[1..].iter().any(|g| g.composite.evaluate(x).unwrap_or(0) != 0)
    })?;
    let Some(y) = point else {
        return Ok("no point with a non-zero higher coefficient".into());
    };
    let h: Vec<u32> = groups.iter().map(|g| g.composite.evaluate(&y)).collect::<Result<_>>()?;
    let image = histogram(&dec.target, s, cfg)?.image();
    let contained = f.elements().all(|u| {
        let v = h.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, u), c));
        image.contains(&v)
    });
    Ok(format!("point {y:?}, A coefficients {h:?}, A(F_p) inside the image: {contained}"))
}

/// Lowers modified degrees until every member is at most `e = ⌊d/(t+1)⌋`.
///
/// Starts from `initial` or from `P = P`. Each pass removes a member of
/// maximal modified degree `m > e`: dropped when its higher coefficients
/// vanish on `S^n`, otherwise rewritten as a combination of other members plus
/// a certificate whose factors sit below `m`.
pub fn reduce_to_rank(
    p: &MultiPoly,
    s: &Alphabet,
    d: u32,
    t: u32,
    initial: Option<AcceptableDecomposition>,
    opts: &EngineOptions,
) -> Result<EngineReport> {
    let f = p.field();
    let n = p.nvars();
    if !p.degree_at_most(d) {
        return Err(Error::DegreeTooHigh {
            max: d,
            got: p.degree().unwrap_or(0),
        });
    }
    if d as u64 >= f.p() as u64 || t < 1 || t > d {
        return Err(Error::Invalid(format!("need 1 ≤ t ≤ d < p, got t = {t}, d = {d}, p = {}", f.p())));
    }
    let mut dec = match initial {
        Some(dec) => dec,
        None => AcceptableDecomposition::trivial(p, s, d, t)?,
    };
    if &dec.target != p || dec.d != d || dec.t != t {
        return Err(Error::Invalid("initial decomposition belongs to different data".into()));
    }
    let report = dec.verify(s);
    if !report.ok {
        return Err(Error::Corrupt(format!("initial decomposition fails verification: {report:?}")));
    }
    let e = dec.e();
    let initial_description = dec.description();
    let mut log = Vec::new();
    for step in 0.. {
        if step >= opts.max_steps {
            return Err(Error::budget("engine steps", step as u128 + 1, opts.max_steps as u128));
        }
        let mdeg = dec.modified_degrees();
        let m = mdeg.iter().copied().max().unwrap_or(0);
        if dec.family.is_empty() || m <= e {
            log.push(LogEntry {
                step,
                case: "case1".into(),
                removed: None,
                added: Vec::new(),
                degree_description: dec.description(),
            });
            break;
        }
        let k = mdeg.iter().position(|&u| u == m).expect("maximum exists");
        let pk = dec.family[k].clone();
        let groups = regroup_by_power(&dec, k)?;
        let higher: Vec<MultiPoly> = groups[1..].iter().map(|g| g.composite.clone()).collect();
        let (next, case) = if case2_check(&higher, s, &opts.cfg)? {
            let keep: Vec<MultiPoly> = dec
                .family
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, q)| q.clone())
                .collect();
            let products = groups[0]
                .terms
                .iter()
                .map(|t| (t.coeff, t.factors.iter().map(|&j| dec.family[j].clone()).collect()))
                .collect();
            (AcceptableDecomposition::assemble(p, s, d, t, keep, products, n)?, "case2")
        } else {
            let (a, cert) = search_combination(&dec, k, m, s, opts)?;
            if opts.max_summands.is_some_and(|cap| cert.value > cap) {
                return Err(Error::NoProgress {
                    member: pk.to_string(),
                    detail: stall_evidence(&dec, &groups, s, &opts.cfg)?,
                });
            }
            (case3_substitute(&dec, k, &a, &cert, s)?, "case3")
        };
        let before = dec.description();
        let after = next.description();
        if !colex_less(&after, &before)? {
            return Err(Error::Corrupt(format!(
                "degree description did not decrease: {:?} to {:?}",
                before.0, after.0
            )));
        }
        let added: Vec<String> = next
            .family
            .iter()
            .filter(|q| !dec.family.contains(q))
            .map(|q| q.to_string())
            .collect();
        log.push(LogEntry {
            step,
            case: case.into(),
            removed: Some(pk.to_string()),
            added,
            degree_description: after,
        });
        dec = next;
    }
    let residual = p - &dec.expand();
    let verified_by_reduction = s.vanishes_on(&residual);
    let verified_by_enumeration = if Enumeration::point_count(s.size(), n) <= opts.cfg.budget as u128 {
        let h = histogram(&residual, s, &opts.cfg)?;
        Some(h.counts[0] == h.total)
    } else {
        None
    };
    Ok(EngineReport {
        e,
        initial_description,
        rank_bound: dec.rank_bound(),
        max_modified_degree: dec.modified_degrees().into_iter().max().unwrap_or(0),
        decomposition: dec,
        log,
        verified_by_reduction,
        verified_by_enumeration,
    })
}

/// Best `a` over members of the same modified degree, scored by the size of
/// the residual certificate; ties go to fewer non-zero entries.
fn search_combination(
    dec: &AcceptableDecomposition,
    k: usize,
    m: u32,
    s: &Alphabet,
    opts: &EngineOptions,
) -> Result<(Vec<u32>, RankCertificate)> {
    let f = dec.target.field();
    let p = f.p() as u128;
    let mut cands: Vec<usize> = (0..dec.family.len())
        .filter(|&j| j != k && modified_degree(&dec.family[j]) == m)
        .collect();
    while !cands.is_empty() && p.saturating_pow(cands.len() as u32) > opts.a_budget as u128 {
        cands.pop();
    }
    let mut coeffs = vec![0u32; cands.len()];
    let mut best: Option<(usize, usize, Vec<u32>, RankCertificate)> = None;
    loop {
        let mut a = vec![0u32; dec.family.len()];
        for (&j, &c) in cands.iter().zip(&coeffs) {
            a[j] = c;
        }
        let residual = a
            .iter()
            .zip(&dec.family)
            .fold(dec.family[k].clone(), |acc, (&ai, q)| &acc - &q.scale(ai));
        let cert = residual_certificate(&residual, m, s)?;
        let weight = coeffs.iter().filter(|&&c| c != 0).count();
        if best.as_ref().is_none_or(|(v, w, _, _)| (cert.value, weight) < (*v, *w)) {
            best = Some((cert.value, weight, a, cert));
        }
        if !next_vector(&mut coeffs, f.p()) {
            break;
        }
    }
    let (_, _, a, cert) = best.expect("at least one combination");
    Ok((a, cert))
}
