//! Exact value distributions of polynomials on `S^n` by exhaustive
//! enumeration, Fourier bias, and the fiber-level certificates built on them.

mod certificate;
mod enumerate;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::MultiPoly;
use crate::util::{checked_power, next_vector, ratio, ratio_to_f64, ser_ratio};

pub use certificate::{nullstellensatz_certificate, NullstellensatzCertificate};
pub use enumerate::{Enumeration, Evaluator, DEFAULT_BUDGET};

/// Joint tables larger than this are accumulated sparsely.
const DENSE_JOINT_LIMIT: u64 = 1 << 20;
/// Character-sum terms evaluated when cross-checking the gap identity.
const FOURIER_WORK_LIMIT: u64 = 1 << 24;

fn common_nvars(ps: &[&MultiPoly]) -> usize {
    ps.iter().map(|p| p.nvars()).max().unwrap_or(0)
}

/// Exact counts `#{x ∈ S^n : P(x) = v}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueHistogram {
    pub p: u32,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ValueHistogram {
    pub fn image(&self) -> Vec<u32> {
        (0..self.p).filter(|&v| self.counts[v as usize] > 0).collect()
    }

    pub fn is_full_range(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }

    pub fn probability(&self, v: u32) -> BigRational {
        ratio(self.counts[v as usize], self.total)
    }
}

pub fn histogram(p: &MultiPoly, s: &Alphabet, cfg: &Enumeration) -> Result<ValueHistogram> {
    histogram_n(p, s, p.nvars(), cfg)
}

/// Histogram over `S^n` for an explicit `n ≥ nvars(P)`.
pub fn histogram_n(p: &MultiPoly, s: &Alphabet, n: usize, cfg: &Enumeration) -> Result<ValueHistogram> {
    let n = n.max(p.nvars());
    let ev = Evaluator::new(p, s);
    let q = p.field().p() as usize;
    let counts = cfg.fold(
        s,
        n,
        || vec![0u64; q],
        |acc, idx| acc[ev.eval(idx) as usize] += 1,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    let total = counts.iter().sum();
    Ok(ValueHistogram {
        p: p.field().p(),
        counts,
        total,
    })
}

/// Exact counts of the tuple `(P_1(x), …, P_k(x))` over `S^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    pub p: u32,
    pub dims: usize,
    pub counts: BTreeMap<Vec<u32>, u64>,
    pub total: u64,
}

impl Serialize for JointHistogram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(&Vec<u32>, u64)> = self.counts.iter().map(|(k, &v)| (k, v)).collect();
        let mut st = s.serialize_struct("JointHistogram", 4)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("dims", &self.dims)?;
        st.serialize_field("counts", &entries)?;
        st.serialize_field("total", &self.total)?;
        st.end()
    }
}

impl JointHistogram {
    pub fn count(&self, tuple: &[u32]) -> u64 {
        self.counts.get(tuple).copied().unwrap_or(0)
    }

    pub fn image(&self) -> BTreeSet<Vec<u32>> {
        self.counts.keys().cloned().collect()
    }

    /// Sums out coordinate `coord`.
    pub fn marginalize(&self, coord: usize) -> JointHistogram {
        let mut counts = BTreeMap::new();
        for (t, &c) in &self.counts {
            let mut rest = t.clone();
            rest.remove(coord);
            *counts.entry(rest).or_insert(0) += c;
        }
        JointHistogram {
            p: self.p,
            dims: self.dims - 1,
            counts,
            total: self.total,
        }
    }

    /// Counts of the coordinate-0 values among tuples whose tail is `tail`.
    pub fn fiber(&self, tail: &[u32]) -> Vec<u64> {
        let mut out = vec![0u64; self.p as usize];
        for (t, &c) in &self.counts {
            if &t[1..] == tail {
                out[t[0] as usize] += c;
            }
        }
        out
    }
}

pub fn joint_histogram(ps: &[MultiPoly], s: &Alphabet, cfg: &Enumeration) -> Result<JointHistogram> {
    let refs: Vec<&MultiPoly> = ps.iter().collect();
    joint_histogram_n(&refs, s, common_nvars(&refs), cfg)
}

pub fn joint_histogram_n(
    ps: &[&MultiPoly],
    s: &Alphabet,
    n: usize,
    cfg: &Enumeration,
) -> Result<JointHistogram> {
    let f = s.field();
    let p = f.p() as u64;
    let k = ps.len();
    let n = n.max(common_nvars(ps));
    let evs: Vec<Evaluator> = ps.iter().map(|q| Evaluator::new(q, s)).collect();
    let encode = |idx: &[usize]| -> u64 { evs.iter().fold(0u64, |acc, e| acc * p + e.eval(idx) as u64) };
    let decode = |mut code: u64| -> Vec<u32> {
        let mut t = vec![0u32; k];
        for slot in t.iter_mut().rev() {
            *slot = (code % p) as u32;
            code /= p;
        }
        t
    };
    let cells = checked_power(p, k);
    let mut counts = BTreeMap::new();
    match cells {
        Some(cells) if cells <= DENSE_JOINT_LIMIT => {
            let dense = cfg.fold(
                s,
                n,
                || vec![0u64; cells as usize],
                |acc, idx| acc[encode(idx) as usize] += 1,
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )?;
            for (code, c) in dense.into_iter().enumerate() {
                if c > 0 {
                    counts.insert(decode(code as u64), c);
                }
            }
        }
        Some(_) => {
            let sparse = cfg.fold(
                s,
                n,
                BTreeMap::<u64, u64>::new,
                |acc, idx| *acc.entry(encode(idx)).or_insert(0) += 1,
                |mut a, b| {
                    for (key, c) in b {
                        *a.entry(key).or_insert(0) += c;
                    }
                    a
                },
            )?;
            for (code, c) in sparse {
                counts.insert(decode(code), c);
            }
        }
        None => return Err(Error::Invalid(format!("{k} polynomials over F_{p} is too many to encode"))),
    }
    let total = counts.values().sum();
    Ok(JointHistogram {
        p: f.p(),
        dims: k,
        counts,
        total,
    })
}

/// `E_x ω^{sP(x)}` for one frequency `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasEntry {
    pub s: u32,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub p: u32,
    pub entries: Vec<BiasEntry>,
    pub max_bias: f64,
    /// Frequency attaining `max_bias` (smallest such).
    pub argmax: u32,
}

impl BiasReport {
    pub fn from_histogram(h: &ValueHistogram) -> Self {
        let p = h.p;
        let total = h.total as f64;
        let mut entries = Vec::new();
        for s in 1..p {
            let mut z = Complex64::new(0.0, 0.0);
            for (v, &c) in h.counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let phase = ((s as u64 * v as u64) % p as u64) as f64;
                z += Complex64::from_polar(c as f64, 2.0 * PI * phase / p as f64);
            }
            z /= total;
            entries.push(BiasEntry {
                s,
                re: z.re,
                im: z.im,
                magnitude: z.norm(),
            });
        }
        let (argmax, max_bias) = entries
            .iter()
            .fold((1, 0.0f64), |(bs, bm), e| if e.magnitude > bm + 1e-15 { (e.s, e.magnitude) } else { (bs, bm) });
        BiasReport {
            p,
            entries,
            max_bias,
            argmax,
        }
    }

    pub fn value(&self, s: u32) -> Complex64 {
        let e = &self.entries[(s - 1) as usize];
        Complex64::new(e.re, e.im)
    }
}

pub fn bias(p: &MultiPoly, s: &Alphabet, cfg: &Enumeration) -> Result<BiasReport> {
    Ok(BiasReport::from_histogram(&histogram(p, s, cfg)?))
}

/// Deviation of the joint law of `(P, P_1, …, P_k)` at `(u, v)` from the
/// product with the uniform law on the first coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub u: u32,
    pub v: Vec<u32>,
    /// `|Pr(P=u, Ps=v) − Pr(Ps=v)/p|`
    #[serde(serialize_with = "ser_ratio")]
    pub gap: BigRational,
    /// The same difference without the absolute value.
    #[serde(serialize_with = "ser_ratio")]
    pub signed: BigRational,
    /// `p^{-(k+1)} Σ_{a≠0, b} E_x ω^{a(P−u) + Σ b_i(P_i − v_i)}`, when evaluated.
    pub fourier: Option<f64>,
    pub fourier_agrees: Option<bool>,
}

pub fn equidistribution_gap(
    p: &MultiPoly,
    ps: &[MultiPoly],
    u: u32,
    v: &[u32],
    s: &Alphabet,
    cfg: &Enumeration,
) -> Result<GapReport> {
    if v.len() != ps.len() {
        return Err(Error::LengthMismatch(format!(
            "{} target values for {} polynomials",
            v.len(),
            ps.len()
        )));
    }
    let f = s.field();
    let q = f.p() as u64;
    let mut all: Vec<&MultiPoly> = vec![p];
    all.extend(ps.iter());
    let joint = joint_histogram_n(&all, s, common_nvars(&all), cfg)?;
    let mut both = vec![u];
    both.extend_from_slice(v);
    let c_joint = joint.count(&both);
    let c_tail: u64 = joint.fiber(v).iter().sum();
    let signed = ratio(
        BigInt::from(q) * BigInt::from(c_joint) - BigInt::from(c_tail),
        BigInt::from(q) * BigInt::from(joint.total),
    );
    let gap = signed.abs();

    let k = ps.len();
    let work = checked_power(q, k + 1).and_then(|a| a.checked_mul(joint.counts.len() as u64));
    let fourier = match work {
        Some(w) if w <= FOURIER_WORK_LIMIT => Some(fourier_gap_sum(f, &joint, u, v)),
        _ => None,
    };
    let fourier_agrees = fourier.map(|x| (x - ratio_to_f64(&signed)).abs() <= 1e-9);
    Ok(GapReport {
        u,
        v: v.to_vec(),
        gap,
        signed,
        fourier,
        fourier_agrees,
    })
}

fn fourier_gap_sum(f: PrimeField, joint: &JointHistogram, u: u32, v: &[u32]) -> f64 {
    let q = f.p();
    let k = v.len();
    let total = joint.total as f64;
    let mut acc = 0.0f64;
    let mut b = vec![0u32; k];
    loop {
        for a in 1..q {
            // E_x ω^{a(P−u) + Σ b_i (P_i − v_i)}, real part suffices after summing
            let mut sum = 0.0f64;
            for (t, &c) in &joint.counts {
                let mut phase = f.mul(a, f.sub(t[0], u));
                for i in 0..k {
                    phase = f.add(phase, f.mul(b[i], f.sub(t[i + 1], v[i])));
                }
                sum += c as f64 * (2.0 * PI * phase as f64 / q as f64).cos();
            }
            acc += sum / total;
        }
        if !next_vector(&mut b, q) {
            break;
        }
    }
    acc / (q as f64).powi(k as i32 + 1)
}

/// The set `Q_p` of squares in `F_p`.
pub fn quadratic_residues(field: PrimeField) -> BTreeSet<u32> {
    field.elements().map(|y| field.mul(y, y)).collect()
}

pub fn sumset(field: PrimeField, a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> BTreeSet<u32> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| field.add(x, y))).collect()
}

/// `{c·y + t : y ∈ set}`.
pub fn affine_image(field: PrimeField, set: &BTreeSet<u32>, c: u32, t: u32) -> BTreeSet<u32> {
    set.iter().map(|&y| field.add(field.mul(c, y), t)).collect()
}

/// Whether every sum of two affine translates `(aQ_p + b) + (a'Q_p + b')`,
/// `a, a' ≠ 0`, is all of `F_p`. Returns the first failing parameters.
pub fn translates_of_squares_cover(field: PrimeField) -> std::result::Result<(), [u32; 4]> {
    let q: Vec<u32> = quadratic_residues(field).into_iter().collect();
    let p = field.p();
    let mut hit = vec![false; p as usize];
    for a in 1..p {
        for a2 in 1..p {
            for b in 0..p {
                let left: Vec<u32> = q.iter().map(|&y| field.add(field.mul(a, y), b)).collect();
                for b2 in 0..p {
                    hit.iter_mut().for_each(|h| *h = false);
                    let mut covered = 0;
                    for &x in &left {
                        for &y in &q {
                            let z = field.add(x, field.add(field.mul(a2, y), b2)) as usize;
                            if !hit[z] {
                                hit[z] = true;
                                covered += 1;
                            }
                        }
                    }
                    if covered != p as usize {
                        return Err([a, b, a2, b2]);
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyBranch {
    /// Some `P + Σ a_i P_i` has rank at most the threshold.
    LowRank,
    /// Every attained fiber of `Ps` sees all `p` values of `P`.
    FullFibers,
    /// Neither held at this threshold.
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub branch: DichotomyBranch,
    pub rank_threshold: usize,
    /// First `a` (lexicographic) with low rank, and that rank.
    pub low_rank: Option<(Vec<u32>, usize)>,
    /// Smallest oracle rank seen over all `a`.
    pub min_rank: usize,
    pub full_fibers: bool,
    pub fibers_checked: usize,
    /// A tail `v` attained by `Ps` and a value `u` missing from its fiber.
    pub missing: Option<(Vec<u32>, u32)>,
    #[serde(serialize_with = "ser_ratio")]
    pub epsilon: BigRational,
    /// `min Pr(P=u, Ps=v)` over all `u` and attained `v`.
    #[serde(serialize_with = "ser_ratio")]
    pub min_joint_probability: BigRational,
    pub above_epsilon: bool,
}

/// `|S|^{-(p-1)dk} / 2p`.
pub fn default_epsilon(s: &Alphabet, d: u32, k: usize) -> BigRational {
    let p = s.field().p();
    let exp = (p as usize - 1) * d as usize * k;
    let den = BigInt::from(s.size()).pow(exp as u32) * BigInt::from(2 * p as u64);
    BigRational::new(BigInt::one(), den)
}

/// Checks the conditional-full-range dichotomy for `(P; P_1, …, P_k)` on `S^n`.
///
/// `rank_oracle` returns `rk_{d-1,S}` of its argument. It is called on every
/// `P + Σ a_i P_i`, `a ∈ F_p^k`.
pub fn dichotomy_check(
    p: &MultiPoly,
    ps: &[MultiPoly],
    s: &Alphabet,
    cfg: &Enumeration,
    rank_oracle: &mut dyn FnMut(&MultiPoly) -> Result<usize>,
    rank_threshold: usize,
    epsilon: Option<BigRational>,
) -> Result<DichotomyReport> {
    let f = s.field();
    let q = f.p();
    let k = ps.len();
    let combos = checked_power(q as u64, k).unwrap_or(u64::MAX);
    cfg.check("linear combinations a ∈ F_p^k", combos as u128)?;

    let mut low_rank = None;
    let mut min_rank = usize::MAX;
    let mut a = vec![0u32; k];
    loop {
        let mut comb = p.clone();
        for (ai, pi) in a.iter().zip(ps) {
            if *ai != 0 {
                comb = &comb + &pi.scale(*ai);
            }
        }
        let r = rank_oracle(&comb)?;
        min_rank = min_rank.min(r);
        if r <= rank_threshold && low_rank.is_none() {
            low_rank = Some((a.clone(), r));
        }
        if !next_vector(&mut a, q) {
            break;
        }
    }

    let mut all: Vec<&MultiPoly> = vec![p];
    all.extend(ps.iter());
    let joint = joint_histogram_n(&all, s, common_nvars(&all), cfg)?;
    let tails: BTreeSet<Vec<u32>> = joint.counts.keys().map(|t| t[1..].to_vec()).collect();
    let mut missing = None;
    let mut min_count = u64::MAX;
    for tail in &tails {
        let fib = joint.fiber(tail);
        for (u, &c) in fib.iter().enumerate() {
            min_count = min_count.min(c);
            if c == 0 && missing.is_none() {
                missing = Some((tail.clone(), u as u32));
            }
        }
    }
    let d = all.iter().filter_map(|x| x.degree()).max().unwrap_or(0).max(1);
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(s, d, k));
    let min_joint_probability = if tails.is_empty() {
        BigRational::zero()
    } else {
        ratio(min_count, joint.total)
    };
    let full_fibers = missing.is_none();
    let branch = if low_rank.is_some() {
        DichotomyBranch::LowRank
    } else if full_fibers {
        DichotomyBranch::FullFibers
    } else {
        DichotomyBranch::Neither
    };
    Ok(DichotomyReport {
        branch,
        rank_threshold,
        low_rank,
        min_rank,
        full_fibers,
        fibers_checked: tails.len(),
        missing,
        above_epsilon: min_joint_probability >= epsilon,
        epsilon,
        min_joint_probability,
    })
}

#[cfg(test)]
mod tests;
