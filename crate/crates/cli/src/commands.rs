use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use fprange::alphabet::Alphabet;
use fprange::corpus::{generate, CorpusKind, CorpusSpec};
use fprange::error::{Error, Result};
use fprange::poly::{Monomial, MultiPoly};
use fprange::quad::decompose;
use fprange::rank::{brute_force_rank, rk0, rk0_s_upper, rk1_quadratic, DEFAULT_RANK_BUDGET};
use fprange::spectrum::{bias, dichotomy_check, histogram, nullstellensatz_certificate, Enumeration};
use fprange::structure::{
    bound_b, colex_less, constants, eliminate_coordinates, range_hypothesis_check, reduce_to_rank, BoundConfig,
    Elimination, EngineOptions,
};
use fprange::util::next_vector;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::Outcome;

/// Enumerates when `S^n` fits in the budget.
fn vanishes_by_enumeration(p: &MultiPoly, s: &Alphabet, cfg: &Enumeration) -> Result<Option<bool>> {
    if Enumeration::point_count(s.size(), p.nvars()) > cfg.budget as u128 {
        return Ok(None);
    }
    let h = histogram(p, s, cfg)?;
    Ok(Some(h.counts[0] == h.total))
}

pub fn analyze(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let p = c.poly(f)?;
    let cfg = c.enumeration();
    let h = histogram(&p, &s, &cfg)?;
    let reduced = s.reduce(&p);
    let vanishes = reduced.is_zero();
    let mut out = Outcome::new(json!({
        "poly": p,
        "image": h.image(),
        "histogram": h,
        "full_range": h.is_full_range(),
        "bias": fprange::spectrum::BiasReport::from_histogram(&h),
        "rk0": rk0(&p),
        "rk0_s_upper": rk0_s_upper(&p, &s),
        "reduced": reduced,
        "vanishes": vanishes,
    }));
    out.check("reduction_matches_enumeration", vanishes == (h.counts[0] == h.total));
    out.check("histogram_total", h.total as u128 == Enumeration::point_count(s.size(), p.nvars()));
    Ok(out)
}

pub fn reduce(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let p = c.poly(f)?;
    let reduced = s.reduce(&p);
    let low = (0..p.nvars()).all(|i| (reduced.var_degree(i) as usize) < s.size());
    let same = vanishes_by_enumeration(&(&p - &reduced), &s, &c.enumeration())?;
    let mut out = Outcome::new(json!({ "poly": p, "reduced": reduced }));
    out.check("per_variable_degree_below_|S|", low);
    out.check_opt("agrees_on_S^n_by_enumeration", same);
    Ok(out)
}

pub fn vanish(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let p = c.poly(f)?;
    let by_reduction = s.vanishes_on(&p);
    let by_enumeration = vanishes_by_enumeration(&p, &s, &c.enumeration())?;
    let mut out = Outcome::new(json!({
        "poly": p,
        "vanishes": by_reduction,
        "vanishes_by_enumeration": by_enumeration,
    }));
    out.check_opt("reduction_matches_enumeration", by_enumeration.map(|e| e == by_reduction));
    Ok(out)
}

pub fn bias_cmd(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let p = c.poly(f)?;
    let rep = bias(&p, &s, &c.enumeration())?;
    let bounded = rep.entries.iter().all(|e| e.magnitude <= 1.0 + 1e-12);
    let mut out = Outcome::new(&rep);
    out.check("magnitudes_at_most_one", bounded);
    Ok(out)
}

pub fn certify(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let ps = c.polys(f)?;
    let cfg = c.enumeration();
    let k = ps.len();
    let targets: Vec<Vec<u32>> = match c.get_list("v")? {
        Some(v) => vec![v.into_iter().map(|x| f.elem(x as i64)).collect()],
        None => {
            cfg.check("target tuples v", Enumeration::point_count(f.p() as usize, k))?;
            let mut all = Vec::new();
            let mut v = vec![0u32; k];
            loop {
                all.push(v.clone());
                if !next_vector(&mut v, f.p()) {
                    break;
                }
            }
            all
        }
    };
    let mut certs = Vec::new();
    let mut sound = true;
    let mut witnessed = true;
    let mut law: Option<bool> = Some(true);
    for v in &targets {
        let cert = nullstellensatz_certificate(&ps, v, &s, &cfg)?;
        if let Some(w) = &cert.witness {
            for (pi, vi) in ps.iter().zip(v) {
                witnessed &= pi.evaluate(w)? == *vi;
            }
        }
        match &cert.enumerated_probability {
            Some(prob) => {
                sound &= cert.is_zero == prob.is_zero();
                sound &= cert.is_zero || &cert.guarantee <= prob;
                let floor = lower_law(&s, cert_degree(&ps), k);
                law = law.map(|l| l && (prob.is_zero() || prob >= &floor));
            }
            None => law = None,
        }
        certs.push(cert);
    }
    let mut out = Outcome::new(json!({ "polys": ps, "certificates": certs }));
    out.check("certificates_match_enumeration", sound);
    out.check("witnesses_lie_in_fibers", witnessed);
    out.check_opt("zero_or_at_least_|S|^-(p-1)dk", law);
    Ok(out)
}

/// `|S|^{-(p-1)dk}`.
fn lower_law(s: &Alphabet, d: u32, k: usize) -> BigRational {
    let exp = (s.field().p() - 1) * d * k as u32;
    BigRational::new(BigInt::one(), BigInt::from(s.size()).pow(exp))
}

fn cert_degree(ps: &[MultiPoly]) -> u32 {
    ps.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
}

pub fn dichotomy(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let mut ps = c.polys(f)?;
    let p = ps.remove(0);
    let d = c.d.unwrap_or_else(|| p.degree().unwrap_or(0).max(1));
    if d == 0 {
        return Err(Error::Invalid("dichotomy needs d ≥ 1".into()));
    }
    let threshold: usize = match c.threshold.as_deref() {
        None => 1,
        Some(v) => v
            .parse()
            .map_err(|_| Error::Invalid(format!("`threshold` expects a rank, got `{v}`")))?,
    };
    let budget = c.budget.unwrap_or(DEFAULT_RANK_BUDGET);
    let mut oracle = |q: &MultiPoly| -> Result<usize> { Ok(brute_force_rank(q, d - 1, Some(&s), budget)?.value) };
    let rep = dichotomy_check(&p, &ps, &s, &c.enumeration(), &mut oracle, threshold, None)?;
    let consistent = rep.low_rank.as_ref().is_none_or(|(_, r)| *r <= threshold && rep.min_rank <= *r);
    let mut out = Outcome::new(&rep);
    out.check("low_rank_branch_consistent", consistent);
    Ok(out)
}

pub fn decompose2(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let p = c.poly(f)?;
    let cfg = c.enumeration();
    let absorb = c.get_bool("absorb")?;
    match decompose(&p, &s, c.threshold()?, absorb, &cfg) {
        Err(Error::FullRange) => {
            let h = histogram(&p, &s, &cfg)?;
            let mut out = Outcome::new(json!({ "full_range": true, "histogram": h }));
            out.witness = true;
            Ok(out)
        }
        Err(e) => Err(e),
        Ok(rep) => {
            let descending = rep.steps.iter().all(|r| r.k_after < r.k_before);
            let mut out = Outcome::new(&rep);
            out.check("identity_by_reduction", rep.verified_by_reduction);
            out.check_opt("identity_by_enumeration", rep.verified_by_enumeration);
            out.check("growth_ledger", rep.growth_ledger_ok);
            out.check("k_strictly_decreases", descending);
            Ok(out)
        }
    }
}

pub fn structure(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let p = c.poly(f)?;
    let cfg = c.enumeration();
    let d = c.d.unwrap_or_else(|| p.degree().unwrap_or(1).max(1));
    let t = c.t.unwrap_or(1);
    let opts = EngineOptions {
        max_summands: c.get("max_summands")?,
        a_budget: c.get("a_budget")?.unwrap_or(EngineOptions::default().a_budget),
        max_steps: c.get("max_steps")?.unwrap_or(EngineOptions::default().max_steps),
        cfg,
    };
    let hypothesis = range_hypothesis_check(&p, &s, t, &cfg)?;
    let rep = reduce_to_rank(&p, &s, d, t, None, &opts)?;
    let mut descending = true;
    let mut prev = rep.initial_description.clone();
    for entry in rep.log.iter().take(rep.log.len().saturating_sub(1)) {
        descending &= colex_less(&entry.degree_description, &prev)?;
        prev = entry.degree_description.clone();
    }
    let mut out = Outcome::new(json!({ "hypothesis": hypothesis, "engine": rep }));
    out.check("identity_by_reduction", rep.verified_by_reduction);
    out.check_opt("identity_by_enumeration", rep.verified_by_enumeration);
    out.check("colex_strictly_decreases", descending);
    out.check("modified_degrees_at_most_e", rep.max_modified_degree <= rep.e);
    out.witness = !hypothesis.holds;
    Ok(out)
}

pub fn eliminate(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let s = c.alphabet(f)?;
    let p = c.poly(f)?;
    let rep = eliminate_coordinates(&p, &s, &c.enumeration())?;
    let mut out = Outcome::new(&rep);
    match &rep {
        Elimination::Constant {
            verified_by_enumeration,
            ..
        } => out.check_opt("constant_by_enumeration", *verified_by_enumeration),
        Elimination::Witness { verified, .. } => out.check("A(S)_within_image", *verified),
    };
    Ok(out)
}

pub fn rank(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    let p = c.poly(f)?;
    let d = c.d.unwrap_or(1);
    let s = match &c.s {
        Some(_) => Some(c.alphabet(f)?),
        None => None,
    };
    let budget = c.budget.unwrap_or(DEFAULT_RANK_BUDGET);
    let method = c.get_str("method").unwrap_or("auto");
    let quadratic = p.degree_at_most(2);
    let cert = match method {
        "rk1" => rk1_quadratic(&p, s.as_ref())?,
        "brute" => brute_force_rank(&p, d, s.as_ref(), budget)?,
        "auto" if d == 1 && quadratic => rk1_quadratic(&p, s.as_ref())?,
        "auto" => brute_force_rank(&p, d, s.as_ref(), budget)?,
        other => return Err(Error::Invalid(format!("unknown rank method `{other}`"))),
    };
    let verified = cert.verify(&p, s.as_ref()).is_ok();
    let mut out = Outcome::new(json!({ "poly": p, "method": method, "certificate": cert }));
    out.check("certificate_reassembles", verified);
    Ok(out)
}

/// `V(D)` named on the command line.
fn v_function(spec: &str) -> Result<Box<dyn Fn(&[usize]) -> BigUint>> {
    match spec {
        "sum" => Ok(Box::new(|d: &[usize]| BigUint::from(d.iter().sum::<usize>()))),
        "one" => Ok(Box::new(|_: &[usize]| BigUint::one())),
        "base" => Ok(Box::new(|d: &[usize]| BigUint::from(d[0]))),
        other => match other.strip_prefix("const:") {
            Some(k) => {
                let k: BigUint = k
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad constant in `v={other}`")))?;
                Ok(Box::new(move |_: &[usize]| k.clone()))
            }
            None => Err(Error::Invalid(format!("unknown V `{other}` (sum, one, base, const:K)"))),
        },
    }
}

pub fn bound(c: &RunConfig) -> Result<Outcome> {
    let d: Vec<usize> = c
        .get_list("D")?
        .ok_or_else(|| Error::Invalid("missing D=D0,D1,...".into()))?
        .into_iter()
        .map(|x| x as usize)
        .collect();
    let e: usize = c.get("e")?.unwrap_or(0);
    let v_name = c.get_str("v").unwrap_or("sum").to_string();
    let w_const: usize = c.get("w")?.unwrap_or(1);
    let v = v_function(&v_name)?;
    let w = move |_: &[usize]| w_const;
    let mut cfg = BoundConfig::new(e);
    if let Some(b) = c.budget {
        cfg.max_evaluations = b;
    }
    let b = bound_b(&*v, &w, &d, cfg)?;
    let base = d.iter().skip(e + 1).all(|&x| x == 0);
    let mut out = Outcome::new(json!({ "D": d, "e": e, "v": v_name, "w": w_const, "B": b.to_string() }));
    out.check_opt("base_case_equals_V", base.then(|| b == v(&d)));
    Ok(out)
}

pub fn constants_cmd(c: &RunConfig) -> Result<Outcome> {
    let psi: BigUint = match c.get_str("psi") {
        Some(v) => v.parse().map_err(|_| Error::Invalid(format!("bad psi `{v}`")))?,
        None => return Err(Error::Invalid("missing psi".into())),
    };
    let p = c.p.ok_or_else(|| Error::Invalid("missing p".into()))?;
    let d = c.d.ok_or_else(|| Error::Invalid("missing d".into()))?;
    let (c_pre, big) = constants(&psi, p, d)?;
    // (Ψ − 1)·C_pre = Ψ^{d+1} − 1
    let geometric = if psi == BigUint::one() {
        c_pre == BigUint::from(d + 1)
    } else {
        (&psi - 1u32) * &c_pre == psi.pow(d + 1) - 1u32
    };
    let digits = big.to_string().len();
    let c_text = if digits <= 200 { big.to_string() } else { format!("{}…({} digits)", &big.to_string()[..40], digits) };
    let mut out = Outcome::new(json!({
        "psi": psi.to_string(),
        "p": p,
        "d": d,
        "t": c.t,
        "C_pre": c_pre.to_string(),
        "C": c_text,
        "C_digits": digits,
    }));
    out.check("C_pre_closed_form", geometric);
    Ok(out)
}

pub fn corpus(c: &RunConfig) -> Result<Outcome> {
    let kind: CorpusKind = c
        .get_str("kind")
        .ok_or_else(|| Error::Invalid("missing kind".into()))?
        .parse()?;
    let p = c.p.ok_or_else(|| Error::Invalid("missing p".into()))? as u32;
    let n = c.n.unwrap_or(4);
    let count: usize = c.get("count")?.unwrap_or(10);
    let mut spec = CorpusSpec::new(kind, p, n, count, c.seed);
    if c.s.is_some() {
        spec.alphabet = c.alphabet(c.field()?)?.elements().to_vec();
    }
    if let Some(d) = c.d.or(c.get("u")?) {
        spec.degree = d;
    }
    if let Some(t) = c.t {
        spec.t = t;
    }
    if let Some(v) = c.get("support")? {
        spec.support = v;
    }
    if let Some(v) = c.get("terms")? {
        spec.terms = v;
    }
    if let Some(v) = c.get("noise")? {
        spec.noise_terms = v;
    }
    let items = generate(&spec, &c.enumeration())?;
    if let Some(dir) = c.get_str("dir") {
        let dir = Path::new(dir);
        fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
        for item in &items {
            let path = dir.join(format!("{}_{:04}.poly", item.kind, item.index));
            fs::write(&path, item.poly_file().format())
                .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        }
    }
    let all_hold = items.iter().all(|i| i.property_holds);
    let mut out = Outcome::new(json!({ "spec": spec, "items": items }));
    out.check("construction_properties_hold", all_hold);
    Ok(out)
}

#[derive(Serialize)]
struct Finding {
    sample: usize,
    poly: MultiPoly,
    rank: usize,
}

/// Dense random polynomial of degree ≤ 2 in `n` variables.
fn random_quadratic(rng: &mut ChaCha8Rng, f: fprange::field::PrimeField, n: usize) -> MultiPoly {
    let mut out = MultiPoly::constant(f, n, rng.gen_range(0..f.p()));
    for i in 0..n {
        out.add_term(Monomial::var(i, 1), rng.gen_range(0..f.p()));
        for k in i..n {
            out.add_term(Monomial::var(i, 1).mul(&Monomial::var(k, 1)), rng.gen_range(0..f.p()));
        }
    }
    out
}

pub fn search_q1(c: &RunConfig) -> Result<Outcome> {
    let f = c.field()?;
    if !matches!(f.p(), 3 | 5) {
        return Err(Error::Invalid("search-q1 supports p ∈ {3, 5}".into()));
    }
    let s = match &c.s {
        Some(_) => c.alphabet(f)?,
        None => Alphabet::new(f, &[0, 1])?,
    };
    let n = c.n.unwrap_or(3);
    if n > 5 {
        return Err(Error::Invalid("search-q1 supports n ≤ 5".into()));
    }
    let samples: usize = c.get("samples")?.unwrap_or(200);
    let budget = c.budget.unwrap_or(DEFAULT_RANK_BUDGET);
    let cfg = c.enumeration();
    let limit = (f.p() - 2) as usize;
    let mut rank_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut max_rank: Option<(usize, MultiPoly)> = None;
    let mut findings = Vec::new();
    let mut unresolved = 0usize;
    let mut non_full = 0usize;
    let mut verified = true;
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        rng.set_stream(i as u64);
        let p = random_quadratic(&mut rng, f, n);
        if histogram(&p, &s, &cfg)?.is_full_range() {
            continue;
        }
        non_full += 1;
        let cert = brute_force_rank(&p, 1, Some(&s), budget)?;
        verified &= cert.verify(&p, Some(&s)).is_ok();
        if cert.budget_exhausted {
            unresolved += 1;
            continue;
        }
        *rank_counts.entry(cert.value).or_default() += 1;
        if max_rank.as_ref().is_none_or(|(r, _)| cert.value > *r) {
            max_rank = Some((cert.value, p.clone()));
        }
        if cert.value > limit {
            findings.push(Finding {
                sample: i,
                poly: p,
                rank: cert.value,
            });
        }
    }
    let mut out = Outcome::new(json!({
        "p": f.p(),
        "n": n,
        "S": s,
        "samples": samples,
        "non_full_range": non_full,
        "rank_counts": rank_counts,
        "max_rank_observed": max_rank.as_ref().map(|(r, _)| r),
        "max_rank_instance": max_rank.map(|(_, p)| p),
        "p_minus_2": limit,
        "findings": findings,
        "unresolved_by_budget": unresolved,
    }));
    out.check("certificates_reassemble", verified);
    Ok(out)
}
