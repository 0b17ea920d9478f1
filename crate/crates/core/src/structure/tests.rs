use super::*;
use crate::field::PrimeField;
use crate::parse::parse_poly;
use crate::spectrum::{histogram, Enumeration};
use num_bigint::BigUint;
use proptest::prelude::*;

fn f(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn poly(s: &str, p: u64) -> MultiPoly {
    parse_poly(s, f(p)).unwrap()
}

fn bin(p: u64) -> Alphabet {
    Alphabet::new(f(p), &[0, 1]).unwrap()
}

fn cfg() -> Enumeration {
    Enumeration::default()
}

fn index_of(dec: &AcceptableDecomposition, q: &MultiPoly) -> usize {
    dec.family.iter().position(|m| m == q).unwrap()
}

#[test]
fn modified_degrees_and_descriptions() {
    assert_eq!(modified_degree(&poly("3*x2", 5)), 0);
    assert_eq!(modified_degree(&poly("5", 7)), 0);
    assert_eq!(modified_degree(&poly("x1 + x2", 5)), 1);
    assert_eq!(modified_degree(&poly("x1 + 1", 5)), 1);
    assert_eq!(modified_degree(&poly("x1*x2", 5)), 2);

    let s = bin(5);
    let p = poly("x1*x2*x3", 5);
    let dec = AcceptableDecomposition::trivial(&p, &s, 3, 1).unwrap();
    assert_eq!(dec.description(), DegreeDescription(vec![0, 0, 0, 1]));

    let n = 2;
    let p = poly("3*x2*(x1 + x2)*x1*x2", 5);
    let q = poly("3*x2 + x1 + x2 + x1*x2", 5);
    let dec = AcceptableDecomposition::assemble(
        &q,
        &s,
        2,
        1,
        vec![poly("3*x2", 5), poly("x1 + x2", 5), poly("x1*x2", 5)],
        vec![
            (1, vec![poly("3*x2", 5)]),
            (1, vec![poly("x1 + x2", 5)]),
            (1, vec![poly("x1*x2", 5)]),
        ],
        n,
    )
    .unwrap();
    let _ = p;
    assert_eq!(dec.description(), DegreeDescription(vec![1, 1, 1]));
    assert!(dec.verify(&s).ok);
}

#[test]
fn colex_examples() {
    let dd = |v: &[usize]| DegreeDescription(v.to_vec());
    assert!(colex_less(&dd(&[9, 0, 0]), &dd(&[0, 1, 0])).unwrap());
    assert!(colex_less(&dd(&[0, 1, 1]), &dd(&[0, 2, 1])).unwrap());
    assert!(!colex_less(&dd(&[1, 2]), &dd(&[1, 2])).unwrap());
    assert!(colex_less(&dd(&[1]), &dd(&[1, 2])).is_err());
}

#[test]
fn verify_reports_failures() {
    let s = bin(5);
    let p = poly("x1*x2 + 2*x3", 5);
    let dec = AcceptableDecomposition::trivial(&p, &s, 2, 1).unwrap();
    assert!(dec.verify(&s).ok);

    let mut bad = dec.clone();
    bad.family[0] = poly("x1*x2*x3", 5);
    bad.vanishing_part = &p - &bad.expand();
    let r = bad.verify(&s);
    assert!(!r.ok);
    assert_eq!(r.degree_violations, vec![0]);

    let q = poly("x1^2 - x1", 5);
    let dec = AcceptableDecomposition::trivial(&q, &s, 2, 1).unwrap();
    assert!(dec.family.is_empty());
    assert!(dec.verify(&s).vanishing);
}

#[test]
fn regroup_examples() {
    let s = bin(7);
    let p1 = poly("x1 + x2", 7);
    let p2 = poly("x3*x4 + x3", 7);
    let target = &(&p1 * &(&p2 * &p2)) + &p2;
    let dec = AcceptableDecomposition::assemble(
        &target,
        &s,
        5,
        2,
        Vec::new(),
        vec![(1, vec![p1.clone(), p2.clone(), p2.clone()]), (1, vec![p2.clone()])],
        4,
    )
    .unwrap();
    let k = index_of(&dec, &p2);
    let g = regroup_by_power(&dec, k).unwrap();
    assert_eq!(g.len(), 3);
    assert!(g[0].composite.is_zero());
    assert_eq!(g[1].composite, MultiPoly::constant(f(7), 4, 1));
    assert_eq!(g[2].composite, p1.clone().with_nvars(4));

    // no occurrence of the chosen member
    let dec = AcceptableDecomposition::assemble(
        &p1,
        &s,
        5,
        2,
        vec![p2.clone()],
        vec![(1, vec![p1.clone()])],
        4,
    )
    .unwrap();
    let k = index_of(&dec, &p2);
    let g = regroup_by_power(&dec, k).unwrap();
    assert_eq!(g[0].composite, p1.with_nvars(4));
    assert!(g[1].composite.is_zero() && g[2].composite.is_zero());
}

#[test]
fn regroup_of_power_composition_reads_coefficients() {
    // A(y) = 2 + 3y + y² composed with Q
    let s = bin(7);
    let q = poly("x1*x2 + x3", 7);
    let target = &(&(&q * &q) + &q.scale(3)) + &MultiPoly::constant(f(7), 3, 2);
    let dec = AcceptableDecomposition::assemble(
        &target,
        &s,
        4,
        2,
        Vec::new(),
        vec![(2, vec![]), (3, vec![q.clone()]), (1, vec![q.clone(), q.clone()])],
        3,
    )
    .unwrap();
    let g = regroup_by_power(&dec, 0).unwrap();
    let coeffs: Vec<u32> = g.iter().map(|x| x.composite.constant_term()).collect();
    assert_eq!(coeffs, vec![2, 3, 1]);
    assert!(g.iter().all(|x| x.composite.is_constant()));
}

#[test]
fn case2_examples() {
    let s = bin(5);
    assert!(case2_check(&[MultiPoly::zero(f(5), 2)], &s, &cfg()).unwrap());
    assert!(case2_check(&[poly("x1^2 - x1", 5)], &s, &cfg()).unwrap());
    assert!(!case2_check(&[poly("x1", 5)], &s, &cfg()).unwrap());
}

#[test]
fn case3_removes_member_with_vanishing_difference() {
    let s = bin(5);
    let p1 = poly("x2*x3 + x2", 5);
    let pk = &p1 + &poly("x1^2 - x1", 5);
    let target = &(&p1 * &pk) + &pk;
    let dec = AcceptableDecomposition::assemble(
        &target,
        &s,
        4,
        1,
        Vec::new(),
        vec![(1, vec![p1.clone(), pk.clone()]), (1, vec![pk.clone()])],
        3,
    )
    .unwrap();
    let k = index_of(&dec, &pk);
    let j = index_of(&dec, &p1);
    let mut a = vec![0; dec.family.len()];
    a[j] = 1;
    let residual = &pk - &p1;
    let cert = crate::rank::RankCertificate::build(&residual, 1, Vec::new(), Some(&s), 0);
    let out = case3_substitute(&dec, k, &a, &cert, &s).unwrap();
    assert_eq!(out.family.len(), dec.family.len() - 1);
    assert!(out.verify(&s).ok);
    assert!(colex_less(&out.description(), &dec.description()).unwrap());
}

#[test]
fn canonicalization_merges_scalar_multiples() {
    let s = bin(5);
    let q = poly("x1 + x2", 5);
    // 2q + 4q = q
    let target = q.clone();
    let dec = AcceptableDecomposition::assemble(
        &target,
        &s,
        1,
        1,
        Vec::new(),
        vec![(1, vec![q.scale(2)]), (1, vec![q.scale(4)])],
        2,
    )
    .unwrap();
    assert_eq!(dec.family, vec![q.clone()]);
    assert_eq!(dec.terms.len(), 1);
    assert_eq!(dec.terms[0].coeff, 1);
}

#[test]
fn engine_on_square_plus_vanishing() {
    let s = bin(5);
    let p = poly("(x2 + x3)^2 + x1^2 - x1", 5);
    let rep = reduce_to_rank(&p, &s, 2, 1, None, &EngineOptions::default()).unwrap();
    assert_eq!(rep.e, 1);
    assert!(rep.max_modified_degree <= 1);
    assert!(rep.verified_by_reduction);
    assert_eq!(rep.verified_by_enumeration, Some(true));
    assert!(rep.decomposition.family.iter().all(|q| q.degree_at_most(1)));
    let steps = &rep.log[..rep.log.len() - 1];
    for w in steps.windows(2) {
        assert!(colex_less(&w[1].degree_description, &w[0].degree_description).unwrap());
    }
    assert_eq!(rep.log.last().unwrap().case, "case1");
    assert_eq!(rep.log.len(), rep.log_lines().len());
    assert!(rep.log_lines()[0].starts_with("{\"step\":0,"));
}

#[test]
fn engine_on_vanishing_input() {
    let s = bin(5);
    let p = poly("x1^2 - x1 + x2*(x3^2 - x3)", 5);
    let rep = reduce_to_rank(&p, &s, 3, 1, None, &EngineOptions::default()).unwrap();
    assert!(rep.decomposition.family.is_empty());
    assert!(rep.decomposition.terms.is_empty());
    assert_eq!(rep.rank_bound, 0);
}

#[test]
fn engine_keeps_low_degree_composition() {
    let s = bin(7);
    let q = poly("x1 + 2*x2 + x3", 7);
    let p = q.pow(3);
    let init = AcceptableDecomposition::assemble(&p, &s, 6, 3, Vec::new(), vec![(1, vec![q.clone(); 3])], 3).unwrap();
    let rep = reduce_to_rank(&p, &s, 6, 3, Some(init), &EngineOptions::default()).unwrap();
    assert_eq!(rep.e, 1);
    assert_eq!(rep.decomposition.family, vec![q]);
    assert_eq!(rep.log.len(), 1);
}

#[test]
fn engine_reports_stall_when_capped() {
    let s = bin(5);
    let p = poly("x1*x2 + x3*x4 + x1*x3", 5);
    let opts = EngineOptions {
        max_summands: Some(0),
        ..EngineOptions::default()
    };
    match reduce_to_rank(&p, &s, 2, 1, None, &opts) {
        Err(Error::NoProgress { detail, .. }) => assert!(detail.contains("A coefficients")),
        other => panic!("expected a stall, got {other:?}"),
    }
}

#[test]
fn engine_rejects_bad_parameters() {
    let s = bin(5);
    let p = poly("x1*x2", 5);
    assert!(reduce_to_rank(&p, &s, 5, 1, None, &EngineOptions::default()).is_err());
    assert!(reduce_to_rank(&p, &s, 2, 3, None, &EngineOptions::default()).is_err());
    assert!(reduce_to_rank(&p, &s, 1, 1, None, &EngineOptions::default()).is_err());
}

#[test]
fn elimination_examples() {
    let s = bin(5);
    match eliminate_coordinates(&poly("x1^2 - x1 + 4", 5), &s, &cfg()).unwrap() {
        Elimination::Constant {
            value,
            verified_by_enumeration,
            ..
        } => {
            assert_eq!(value, 4);
            assert_eq!(verified_by_enumeration, Some(true));
        }
        other => panic!("expected a constant, got {other:?}"),
    }
    match eliminate_coordinates(&poly("x1", 5), &s, &cfg()).unwrap() {
        Elimination::Witness { a, a_of_s, verified, .. } => {
            assert_eq!(a, vec![0, 1]);
            assert_eq!(a_of_s, vec![0, 1]);
            assert!(verified);
        }
        other => panic!("expected a witness, got {other:?}"),
    }
    // cubes collapse on {0, 1, 4} ⊂ F_5 only up to x³ − x on {0, 1, 4}
    let s3 = Alphabet::new(f(5), &[0, 1, 4]).unwrap();
    let p = poly("x1^3 - x1 + x2^3 - x2 + 2", 5);
    let v: Vec<u32> = s3.elements().iter().map(|&x| f(5).sub(f(5).pow(x, 3), x)).collect();
    let expect_constant = v.iter().all(|&y| y == 0);
    match eliminate_coordinates(&p, &s3, &cfg()).unwrap() {
        Elimination::Constant { value, .. } => {
            assert!(expect_constant);
            assert_eq!(value, 2);
        }
        Elimination::Witness { verified, .. } => {
            assert!(!expect_constant);
            assert!(verified);
        }
    }
}

#[test]
fn bound_examples() {
    let one = |_: &[usize]| BigUint::from(1u32);
    let w1 = |_: &[usize]| 1usize;
    assert_eq!(bound_b(&one, &w1, &[0, 1], BoundConfig::new(0)).unwrap(), BigUint::from(1u32));

    let size = |d: &[usize]| BigUint::from(d.iter().sum::<usize>());
    assert_eq!(bound_b(&size, &w1, &[3, 4, 0], BoundConfig::new(1)).unwrap(), BigUint::from(7u32));

    // W ≡ 0: a pure chain (0,0,1) → (0,0,0)
    let w0 = |_: &[usize]| 0usize;
    let tagged = |d: &[usize]| BigUint::from(100 * d[0] + 10 * d[1] + d[2] + 1);
    assert_eq!(bound_b(&tagged, &w0, &[0, 0, 1], BoundConfig::new(0)).unwrap(), BigUint::from(1u32));
    assert_eq!(bound_b(&tagged, &w0, &[2, 1, 0], BoundConfig::new(0)).unwrap(), BigUint::from(201u32));
}

/// Direct transcription of the recursion for `d = 2`, `e = 0`.
fn hand_b2(v: &dyn Fn(&[usize]) -> u64, w: &dyn Fn(&[usize]) -> usize, d: [usize; 3]) -> u64 {
    if d[1] == 0 && d[2] == 0 {
        return v(&d);
    }
    if d[2] > 0 {
        let wd = w(&d);
        let mut best = 0;
        for u0 in 0..=wd {
            for u1 in 0..=wd {
                best = best.max(hand_b2(v, w, [d[0] + u0, d[1] + u1, d[2] - 1]));
            }
        }
        return best;
    }
    let wd = w(&d);
    (0..=wd).map(|u0| hand_b2(v, w, [d[0] + u0, d[1] - 1, 0])).max().unwrap()
}

#[test]
fn bound_matches_hand_recursion() {
    let v = |d: &[usize]| (d[0] * d[0] + 1) as u64;
    let w = |d: &[usize]| (d[2] + 1).min(2);
    let vb = |d: &[usize]| BigUint::from(v(d));
    for d in [[0, 0, 1], [1, 1, 1], [0, 2, 1], [2, 0, 2], [0, 3, 0]] {
        let got = bound_b(&vb, &w, &d, BoundConfig::new(0)).unwrap();
        assert_eq!(got, BigUint::from(hand_b2(&v, &w, d)), "{d:?}");
    }
}

#[test]
fn bound_budget_is_enforced() {
    let v = |d: &[usize]| BigUint::from(d[0]);
    let w = |_: &[usize]| 3usize;
    let cfg = BoundConfig {
        e: 0,
        max_evaluations: 5,
    };
    assert!(matches!(bound_b(&v, &w, &[0, 2, 2], cfg), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn constants_examples() {
    let (pre, c) = constants(&BigUint::from(1u32), 7, 2).unwrap();
    assert_eq!(pre, BigUint::from(3u32));
    assert_eq!(c, BigUint::from(343u32));
    let (pre, c) = constants(&BigUint::from(2u32), 3, 2).unwrap();
    assert_eq!(pre, BigUint::from(7u32));
    assert_eq!(c, BigUint::from(2187u32));
    let (pre, c) = constants(&BigUint::from(10u32), 5, 3).unwrap();
    assert_eq!(pre, BigUint::from(1111u32));
    assert_eq!(c.to_string().len(), 777);
    assert_eq!(c, BigUint::from(5u32).pow(1111));
}

#[test]
fn hypothesis_examples() {
    let s = bin(5);
    let zero = MultiPoly::zero(f(5), 2);
    assert!(range_hypothesis_check(&zero, &s, 2, &cfg()).unwrap().holds);

    let full = Alphabet::full(f(5));
    let h = range_hypothesis_check(&poly("x1", 5), &full, 2, &cfg()).unwrap();
    assert!(!h.holds);
    assert_eq!(h.witness, Some(vec![0, 1]));

    // image {0,1,2,3}: no translate a·Q_5 + b fits, and degree-1 images are full
    let p = poly("x1^4 + x2^4 + x3^4", 5);
    let h = range_hypothesis_check(&p, &full, 2, &cfg()).unwrap();
    assert_eq!(h.image, vec![0, 1, 2, 3]);
    let translate = crate::quad::contains_square_translate(f(5), &h.image);
    assert_eq!(h.holds, !translate);
}

/// `A∘Q + noise` with `Q` of degree `deg_q` on `n` variables over `F_5`.
fn power_composition(n: usize, deg_q: u32, t: u32) -> impl Strategy<Value = (MultiPoly, MultiPoly, Vec<u32>)> {
    (
        prop::collection::vec((prop::collection::vec(0u32..=deg_q, n), 1u32..5), 1..5),
        prop::collection::vec(0u32..5, t as usize),
        1u32..5,
        prop::collection::vec((0..n, 0u32..5), 0..3),
    )
        .prop_filter_map("degree of Q", move |(terms, low, lead, noise)| {
            let field = PrimeField::new(5).unwrap();
            let q = MultiPoly::from_terms(
                field,
                n,
                terms
                    .into_iter()
                    .filter(|(e, _)| e.iter().sum::<u32>() <= deg_q)
                    .map(|(e, c)| (Monomial::new(e), c)),
            );
            if q.degree() != Some(deg_q) {
                return None;
            }
            let mut a = low;
            a.push(lead);
            let mut out = MultiPoly::zero(field, n);
            for (r, &c) in a.iter().enumerate() {
                out = &out + &q.pow(r as u32).scale(c);
            }
            let mut noise_poly = MultiPoly::zero(field, n);
            for (i, c) in noise {
                let x = MultiPoly::var(field, n, i);
                noise_poly = &noise_poly + &(&(&x * &x) - &x).scale(c);
            }
            Some((&out + &noise_poly, q, a))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn engine_descends_and_preserves_values(
        (t, (p, q, a)) in prop::sample::select(vec![(1u32, 2u32), (2, 2), (2, 1), (1, 3), (1, 4)])
            .prop_flat_map(|(t, dq)| (Just(t), power_composition(5, dq, t)))
    ) {
        let s = bin(5);
        let d = t * q.degree().unwrap();
        let products: Vec<(u32, Vec<MultiPoly>)> = a
            .iter()
            .enumerate()
            .map(|(r, &c)| (c, vec![q.clone(); r]))
            .collect();
        let init = AcceptableDecomposition::assemble(&p, &s, d, t, Vec::new(), products, 5).unwrap();
        let rep = reduce_to_rank(&p, &s, d, t, Some(init), &EngineOptions::default()).unwrap();
        prop_assert!(rep.max_modified_degree <= rep.e);
        prop_assert!(rep.decomposition.verify(&s).ok);
        prop_assert_eq!(rep.verified_by_enumeration, Some(true));
        let mut prev = rep.initial_description.clone();
        for entry in &rep.log[..rep.log.len() - 1] {
            prop_assert!(colex_less(&entry.degree_description, &prev).unwrap());
            prev = entry.degree_description.clone();
        }
    }

    #[test]
    fn elimination_recovers_planted_constants(
        c in 0u32..5,
        noise in prop::collection::vec((0usize..4, 0usize..4, 1u32..5), 0..6),
    ) {
        let field = f(5);
        let s = bin(5);
        let mut p = MultiPoly::constant(field, 4, c);
        for (i, j, k) in noise {
            let xi = MultiPoly::var(field, 4, i);
            let xj = MultiPoly::var(field, 4, j);
            p = &p + &(&(&(&xi * &xi) - &xi) * &xj).scale(k);
        }
        match eliminate_coordinates(&p, &s, &cfg()).unwrap() {
            Elimination::Constant { value, verified_by_enumeration, .. } => {
                prop_assert_eq!(value, c);
                prop_assert_eq!(verified_by_enumeration, Some(true));
            }
            Elimination::Witness { .. } => prop_assert!(false, "planted constant missed"),
        }
    }

    #[test]
    fn elimination_witnesses_are_sound(
        terms in prop::collection::vec((prop::collection::vec(0u32..=2, 3), 1u32..3), 1..5),
    ) {
        let field = f(3);
        let s = bin(3);
        let p = MultiPoly::from_terms(field, 3, terms.into_iter().map(|(e, c)| (Monomial::new(e), c)));
        let image = histogram(&p, &s, &cfg()).unwrap().image();
        match eliminate_coordinates(&p, &s, &cfg()).unwrap() {
            Elimination::Constant { value, .. } => prop_assert_eq!(image, vec![value]),
            Elimination::Witness { a, a_of_s, verified, .. } => {
                prop_assert!(verified);
                prop_assert!(image.len() >= 2);
                for &u in s.elements() {
                    let v = a.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, u), c));
                    prop_assert!(a_of_s.contains(&v) && image.contains(&v));
                }
            }
        }
    }

    #[test]
    fn bound_is_monotone_in_v(
        d in prop::collection::vec(0usize..3, 3),
        bump in prop::collection::vec(0u32..4, 16),
    ) {
        let v1 = |x: &[usize]| BigUint::from((x[0] + 2 * x[1] + 3 * x[2]) as u32);
        let v2 = |x: &[usize]| v1(x) + BigUint::from(bump[(x[0] + x[1] + x[2]) % 16]);
        let w = |x: &[usize]| x[2].min(1);
        let b1 = bound_b(&v1, &w, &d, BoundConfig::new(0)).unwrap();
        let b2 = bound_b(&v2, &w, &d, BoundConfig::new(0)).unwrap();
        prop_assert!(b1 <= b2);
    }
}
