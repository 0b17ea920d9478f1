//! Seeded generators for test corpora.
//!
//! Item `i` of a corpus with seed `s` draws from `ChaCha8Rng::seed_from_u64(s)`
//! on stream `i`, so items are independent of `count` and of each other.
//! Every item records the defining property of its construction and whether
//! exhaustive enumeration over `S^n` confirmed it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::parse::PolyFile;
use crate::poly::{Monomial, MultiPoly};
use crate::spectrum::{histogram, Enumeration};

/// Redraws allowed per item before giving up on a non-full image.
const MAX_REDRAWS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    /// `A∘Q` with `A` univariate of degree `t` and `Q` of degree `degree`.
    PowerComposition,
    /// `a·L² + J` with `L` affine and `J` quadratic on `support` coordinates.
    SquarePlusDetermined,
    /// Combinations of `Δ_S(x_i)·m`, zero on `S^n`.
    VanishingNoise,
    /// `terms` random monomials of degree at most `degree`.
    RandomDegreeD,
}

impl CorpusKind {
    pub const ALL: [CorpusKind; 4] = [
        CorpusKind::PowerComposition,
        CorpusKind::SquarePlusDetermined,
        CorpusKind::VanishingNoise,
        CorpusKind::RandomDegreeD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorpusKind::PowerComposition => "power_composition",
            CorpusKind::SquarePlusDetermined => "square_plus_determined",
            CorpusKind::VanishingNoise => "vanishing_noise",
            CorpusKind::RandomDegreeD => "random_degree_d",
        }
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        CorpusKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Invalid(format!("unknown corpus kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSpec {
    pub kind: CorpusKind,
    pub p: u32,
    pub n: usize,
    pub alphabet: Vec<u32>,
    /// `deg Q`, the degree bound of a random polynomial, or the noise degree
    /// for `vanishing_noise`.
    pub degree: u32,
    /// Degree of the outer `A`.
    pub t: u32,
    /// Coordinates available to `J`.
    pub support: usize,
    /// Monomials in a random polynomial or in `Q`.
    pub terms: usize,
    /// Multiples of `Δ_S(x_i)` added on top.
    pub noise_terms: usize,
    pub count: usize,
    pub seed: u64,
}

impl CorpusSpec {
    /// Defaults: `S = {0,1}`, degree 2, `t = 2`, support 2, 4 terms, 2 noise terms.
    pub fn new(kind: CorpusKind, p: u32, n: usize, count: usize, seed: u64) -> Self {
        CorpusSpec {
            kind,
            p,
            n,
            alphabet: vec![0, 1],
            degree: 2,
            t: 2,
            support: 2,
            terms: 4,
            noise_terms: 2,
            count,
            seed,
        }
    }

    fn validate(&self, field: PrimeField) -> Result<Alphabet> {
        let s = Alphabet::new(field, &self.alphabet)?;
        if self.n == 0 {
            return Err(Error::Invalid("corpus needs n ≥ 1".into()));
        }
        match self.kind {
            CorpusKind::PowerComposition if self.degree == 0 || self.t == 0 => {
                Err(Error::Invalid("power_composition needs deg Q ≥ 1 and t ≥ 1".into()))
            }
            CorpusKind::SquarePlusDetermined if self.support > self.n => Err(Error::Invalid(format!(
                "support {} exceeds n = {}",
                self.support, self.n
            ))),
            _ => Ok(s),
        }
    }
}

/// Construction data, enough to rebuild the polynomial from its pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parts {
    PowerComposition {
        q: MultiPoly,
        /// Ascending coefficients of `A`.
        a: Vec<u32>,
    },
    SquarePlusDetermined {
        a: u32,
        l: MultiPoly,
        j: MultiPoly,
        j_support: Vec<usize>,
    },
    VanishingNoise,
    RandomDegreeD,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusItem {
    pub kind: CorpusKind,
    pub index: usize,
    pub seed: u64,
    pub poly: MultiPoly,
    pub noise: MultiPoly,
    pub parts: Parts,
    pub property: String,
    pub property_holds: bool,
}

impl CorpusItem {
    /// The item as a polynomial file with its provenance in the header.
    pub fn poly_file(&self) -> PolyFile {
        PolyFile {
            field: self.poly.field(),
            nvars: self.poly.nvars(),
            metadata: vec![
                ("kind".into(), self.kind.name().into()),
                ("seed".into(), self.seed.to_string()),
                ("stream".into(), self.index.to_string()),
                ("property".into(), self.property.clone()),
                ("property_holds".into(), self.property_holds.to_string()),
            ],
            polys: vec![self.poly.clone()],
        }
    }
}

pub fn generate(spec: &CorpusSpec, cfg: &Enumeration) -> Result<Vec<CorpusItem>> {
    (0..spec.count).map(|i| generate_item(spec, i, cfg)).collect()
}

pub fn generate_item(spec: &CorpusSpec, index: usize, cfg: &Enumeration) -> Result<CorpusItem> {
    let field = PrimeField::new(spec.p as u64)?;
    let s = spec.validate(field)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let n = spec.n;
    let q = field.p();

    let (body, parts, noise_degree) = match spec.kind {
        CorpusKind::PowerComposition => {
            let inner = loop {
                let cand = random_poly(&mut rng, field, n, spec.degree, spec.terms.max(1));
                if cand.degree() == Some(spec.degree) {
                    break cand;
                }
            };
            let mut a: Vec<u32> = (0..spec.t).map(|_| rng.gen_range(0..q)).collect();
            a.push(rng.gen_range(1..q));
            let body = a
                .iter()
                .enumerate()
                .fold(MultiPoly::zero(field, n), |acc, (r, &c)| &acc + &inner.pow(r as u32).scale(c));
            (body, Parts::PowerComposition { q: inner, a }, spec.degree * spec.t)
        }
        CorpusKind::SquarePlusDetermined => {
            let mut redraws = 0;
            loop {
                let a = rng.gen_range(1..q);
                let width = rng.gen_range(1..=n);
                let l_support = choose_coordinates(&mut rng, n, width);
                let lin: Vec<u32> = (0..n)
                    .map(|i| if l_support.contains(&i) { rng.gen_range(1..q) } else { 0 })
                    .collect();
                let l = MultiPoly::from_terms(
                    field,
                    n,
                    lin.iter()
                        .enumerate()
                        .map(|(i, &c)| (Monomial::var(i, 1), c))
                        .chain(std::iter::once((Monomial::one(), rng.gen_range(0..q)))),
                );
                let j_support = choose_coordinates(&mut rng, n, spec.support);
                let j = random_quadratic_on(&mut rng, field, n, &j_support);
                let body = &(&l * &l).scale(a) + &j;
                let full = histogram(&body, &s, cfg)?.is_full_range();
                if !full {
                    break (body, Parts::SquarePlusDetermined { a, l, j, j_support }, 2);
                }
                redraws += 1;
                if redraws >= MAX_REDRAWS {
                    return Err(Error::Invalid(format!(
                        "no square_plus_determined draw with a non-full image after {MAX_REDRAWS} tries"
                    )));
                }
            }
        }
        CorpusKind::VanishingNoise => (MultiPoly::zero(field, n), Parts::VanishingNoise, spec.degree),
        CorpusKind::RandomDegreeD => (
            random_poly(&mut rng, field, n, spec.degree, spec.terms),
            Parts::RandomDegreeD,
            spec.degree,
        ),
    };

    let noise = random_noise(&mut rng, &s, n, noise_degree, spec.noise_terms);
    let poly = &body + &noise;
    let (property, property_holds) = check_property(&poly, &noise, &parts, spec, &s, cfg)?;
    Ok(CorpusItem {
        kind: spec.kind,
        index,
        seed: spec.seed,
        poly,
        noise,
        parts,
        property,
        property_holds,
    })
}

fn check_property(
    poly: &MultiPoly,
    noise: &MultiPoly,
    parts: &Parts,
    spec: &CorpusSpec,
    s: &Alphabet,
    cfg: &Enumeration,
) -> Result<(String, bool)> {
    let f = poly.field();
    Ok(match parts {
        Parts::PowerComposition { a, .. } => {
            let image: BTreeSet<u32> = histogram(poly, s, cfg)?.image().into_iter().collect();
            let outer: BTreeSet<u32> = f
                .elements()
                .map(|u| a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, u), c)))
                .collect();
            ("image_within_A(F_p)".into(), image.is_subset(&outer))
        }
        Parts::SquarePlusDetermined { a, l, j, j_support } => {
            let model = &(l * l).scale(*a) + j;
            let diff = poly - &model;
            let agrees = vanishes_by_enumeration(&diff, s, cfg)?;
            let narrow = j.dependent_coords().iter().all(|i| j_support.contains(i));
            let partial = !histogram(poly, s, cfg)?.is_full_range();
            ("equals_aL2_plus_J_and_image_not_full".into(), agrees && narrow && partial)
        }
        Parts::VanishingNoise => ("zero_on_S^n".into(), vanishes_by_enumeration(poly, s, cfg)?),
        Parts::RandomDegreeD => {
            let ok = poly.degree_at_most(spec.degree) && vanishes_by_enumeration(noise, s, cfg)?;
            ("degree_at_most_d".into(), ok)
        }
    })
}

fn vanishes_by_enumeration(p: &MultiPoly, s: &Alphabet, cfg: &Enumeration) -> Result<bool> {
    let h = histogram(p, s, cfg)?;
    Ok(h.counts[0] == h.total)
}

/// Monomial of degree at most `max_deg`, uniform degree then uniform variables.
fn random_monomial(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> Monomial {
    let g = rng.gen_range(0..=max_deg);
    let mut exps = vec![0u32; n];
    for _ in 0..g {
        exps[rng.gen_range(0..n)] += 1;
    }
    Monomial::new(exps)
}

fn random_poly(rng: &mut ChaCha8Rng, field: PrimeField, n: usize, max_deg: u32, terms: usize) -> MultiPoly {
    let mut out = MultiPoly::zero(field, n);
    for _ in 0..terms {
        let m = random_monomial(rng, n, max_deg);
        out.add_term(m, rng.gen_range(1..field.p()));
    }
    out
}

fn choose_coordinates(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        all.swap(i, j);
    }
    let mut out = all[..k].to_vec();
    out.sort_unstable();
    out
}

/// Random polynomial of degree ≤ 2 in the listed coordinates; each
/// non-constant monomial is kept with probability `density`.
fn random_quadratic_on(rng: &mut ChaCha8Rng, field: PrimeField, n: usize, coords: &[usize]) -> MultiPoly {
    let q = field.p();
    let density: f64 = rng.gen_range(0.0..1.0);
    let mut out = MultiPoly::constant(field, n, rng.gen_range(0..q));
    for (a, &i) in coords.iter().enumerate() {
        let mut monomials = vec![Monomial::var(i, 1)];
        monomials.extend(coords[a..].iter().map(|&k| Monomial::var(i, 1).mul(&Monomial::var(k, 1))));
        for m in monomials {
            if rng.gen_bool(density) {
                out.add_term(m, rng.gen_range(1..q));
            }
        }
    }
    out
}

/// `Σ c·Δ_S(x_i)·m` with every summand of degree at most `max_deg`; empty
/// when `max_deg < |S|`.
fn random_noise(rng: &mut ChaCha8Rng, s: &Alphabet, n: usize, max_deg: u32, terms: usize) -> MultiPoly {
    let field = s.field();
    let width = s.size() as u32;
    let mut out = MultiPoly::zero(field, n);
    if max_deg < width {
        return out;
    }
    for _ in 0..terms {
        let i = rng.gen_range(0..n);
        let m = random_monomial(rng, n, max_deg - width);
        let c = rng.gen_range(1..field.p());
        let piece = &s.delta_in(i).with_nvars(n) * &MultiPoly::monomial(field, n, m, c);
        out = &out + &piece;
    }
    out
}
