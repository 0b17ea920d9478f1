use super::*;
use crate::parse::parse_poly;
use crate::poly::Monomial;
use proptest::prelude::*;

fn f(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn poly(s: &str, p: u64) -> MultiPoly {
    parse_poly(s, f(p)).unwrap()
}

fn alpha(p: u64, els: &[u32]) -> Alphabet {
    Alphabet::new(f(p), els).unwrap()
}

fn cfg() -> Enumeration {
    Enumeration::default()
}

/// Independent oracle: count by direct evaluation of every point.
fn naive_counts(p: &MultiPoly, s: &Alphabet, n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; s.field().p() as usize];
    let mut idx = vec![0u32; n];
    loop {
        let point: Vec<u32> = idx.iter().map(|&j| s.elements()[j as usize]).collect();
        counts[p.evaluate(&point).unwrap() as usize] += 1;
        if !next_vector(&mut idx, s.size() as u32) {
            break;
        }
    }
    counts
}

#[test]
fn histogram_examples() {
    let h = histogram(&poly("x1", 5), &alpha(5, &[0, 1]), &cfg()).unwrap();
    assert_eq!(h.counts, vec![1, 1, 0, 0, 0]);

    let h = histogram(&poly("x1^4 + x2^4 + x3^4", 5), &Alphabet::full(f(5)), &cfg()).unwrap();
    assert_eq!(h.counts[4], 0);
    assert_eq!(h.total, 125);

    let h = histogram(&poly("x1 + x2 + x3", 5), &alpha(5, &[0, 1]), &cfg()).unwrap();
    assert_eq!(h.image(), vec![0, 1, 2, 3]);
    assert!(!h.is_full_range());
}

#[test]
fn histogram_budget() {
    let p = poly("x1 + x2 + x3 + x4 + x5", 5);
    let err = histogram(&p, &Alphabet::full(f(5)), &Enumeration::with_budget(100)).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { needed: 3125, .. }));
}

#[test]
fn joint_examples() {
    let j = joint_histogram(&[poly("x1", 3), poly("x2", 3)], &alpha(3, &[0, 1]), &cfg()).unwrap();
    assert_eq!(j.counts.len(), 4);
    assert!(j.counts.values().all(|&c| c == 1));

    let j = joint_histogram(&[poly("x1*x2", 5)], &alpha(5, &[0, 1]), &cfg()).unwrap();
    assert_eq!(j.count(&[1]), 1);
    assert_eq!(j.total, 4);

    let j = joint_histogram(&[poly("x1 + x2", 5), poly("x1 - x2", 5)], &alpha(5, &[0, 1]), &cfg()).unwrap();
    assert_eq!(j.counts.len(), 4);
    assert!(j.counts.values().all(|&c| c == 1));
}

#[test]
fn bias_examples() {
    let b = bias(&poly("3", 5), &alpha(5, &[0, 1]), &cfg()).unwrap();
    assert!((b.max_bias - 1.0).abs() < 1e-12);
    let b = bias(&poly("x1", 5), &Alphabet::full(f(5)), &cfg()).unwrap();
    assert!(b.max_bias < 1e-12);
    let b = bias(&poly("x1", 5), &alpha(5, &[0, 1]), &cfg()).unwrap();
    let expected = (PI / 5.0).cos();
    assert!((b.entries[0].magnitude - expected).abs() < 1e-12);
}

#[test]
fn gap_examples() {
    let s = alpha(3, &[0, 1]);
    let g = equidistribution_gap(&poly("x1", 3), &[poly("x2", 3)], 0, &[0], &s, &cfg()).unwrap();
    assert_eq!(g.gap, ratio(1, 12));
    assert_eq!(g.fourier_agrees, Some(true));

    // identical polynomials, u ≠ v: the joint probability vanishes
    let p1 = poly("x1 + x2", 5);
    let s5 = alpha(5, &[0, 1]);
    let g = equidistribution_gap(&p1, std::slice::from_ref(&p1), 0, &[1], &s5, &cfg()).unwrap();
    assert_eq!(g.gap, ratio(1, 5) * ratio(1, 2));
    assert_eq!(g.fourier_agrees, Some(true));

    // constant P = c, u = c
    let g = equidistribution_gap(&poly("2", 5), std::slice::from_ref(&p1), 2, &[1], &s5, &cfg()).unwrap();
    assert_eq!(g.gap, ratio(4, 5) * ratio(1, 2));
}

#[test]
fn certificate_examples() {
    let s2 = alpha(2, &[0, 1]);
    let c = nullstellensatz_certificate(&[poly("x1*x2", 2)], &[1], &s2, &cfg()).unwrap();
    assert!(!c.is_zero);
    assert_eq!(c.guarantee, ratio(1, 4));
    assert_eq!(c.enumerated_probability, Some(ratio(1, 4)));
    assert_eq!(c.witness, Some(vec![1, 1]));

    let c = nullstellensatz_certificate(&[poly("x1", 5)], &[3], &alpha(5, &[0, 1]), &cfg()).unwrap();
    assert!(c.is_zero);
    assert_eq!(c.enumerated_probability, Some(ratio(0, 1)));

    let c = nullstellensatz_certificate(&[poly("x1 + x2", 3)], &[2], &alpha(3, &[0, 1]), &cfg()).unwrap();
    assert_eq!(c.witness, Some(vec![1, 1]));
    assert_eq!(c.enumerated_probability, Some(ratio(1, 4)));
    assert!(c.guarantee >= ratio(1, 4));
}

#[test]
fn quadratic_residue_examples() {
    assert_eq!(quadratic_residues(f(3)).into_iter().collect::<Vec<_>>(), vec![0, 1]);
    assert_eq!(quadratic_residues(f(5)).into_iter().collect::<Vec<_>>(), vec![0, 1, 4]);
    assert_eq!(quadratic_residues(f(2)).len(), 2);
    for p in [3u64, 7, 11, 13] {
        assert_eq!(quadratic_residues(f(p)).len() as u64, p.div_ceil(2));
    }
}

#[test]
fn translates_cover_small_primes() {
    for p in [3u64, 5, 7, 11] {
        assert_eq!(translates_of_squares_cover(f(p)), Ok(()));
    }
}

/// Rank oracle for the tests: number of monomials of the reduced form, an
/// upper bound on the degree-0 rank that is exact for these inputs.
fn monomial_count(s: &Alphabet) -> impl FnMut(&MultiPoly) -> Result<usize> + '_ {
    move |q| Ok(s.reduce(q).terms().filter(|(m, _)| !m.is_one()).count())
}

#[test]
fn dichotomy_examples() {
    let s = alpha(3, &[0, 1]);
    let r = dichotomy_check(&poly("x1", 3), &[poly("x2", 3)], &s, &cfg(), &mut monomial_count(&s), 1, None).unwrap();
    assert_eq!(r.branch, DichotomyBranch::LowRank);
    assert_eq!(r.low_rank, Some((vec![0], 1)));
    assert!(!r.full_fibers);

    let full = Alphabet::full(f(3));
    let p = poly("x1 + x2 + x3 + x4 + x5 + x6", 3);
    let r = dichotomy_check(&p, &[], &full, &cfg(), &mut monomial_count(&full), 0, None).unwrap();
    assert_eq!(r.branch, DichotomyBranch::FullFibers);
    assert_eq!(r.fibers_checked, 1);

    let s = alpha(5, &[0, 1]);
    let z = poly("x1^2 - x1", 5);
    let r = dichotomy_check(&z, &[poly("x2", 5)], &s, &cfg(), &mut monomial_count(&s), 0, None).unwrap();
    assert_eq!(r.branch, DichotomyBranch::LowRank);
    assert_eq!(r.low_rank, Some((vec![0], 0)));
}

#[test]
fn fourier_inversion() {
    let s = alpha(5, &[0, 1, 3]);
    let h = histogram(&poly("x1*x2 + x3^2", 5), &s, &cfg()).unwrap();
    let b = BiasReport::from_histogram(&h);
    let p = 5.0f64;
    for u in 0..5u32 {
        // p·Pr(P=u) = 1 + Σ_{s≠0} E ω^{s(P−u)}
        let mut acc = 1.0;
        for sfreq in 1..5u32 {
            let w = Complex64::from_polar(1.0, -2.0 * PI * (sfreq * u) as f64 / p);
            acc += (b.value(sfreq) * w).re;
        }
        let exact = p * h.counts[u as usize] as f64 / h.total as f64;
        assert!((acc - exact).abs() < 1e-9);
    }
    for sfreq in 1..5u32 {
        let a = b.value(sfreq);
        let c = b.value(5 - sfreq).conj();
        assert!((a - c).norm() < 1e-12);
    }
}

#[test]
fn k_zero_joint_is_a_single_cell() {
    let j = joint_histogram(&[], &alpha(3, &[0, 1]), &cfg()).unwrap();
    assert_eq!(j.count(&[]), 1);
}

fn arb_poly(p: u32, n: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, n), 0..p), 0..6).prop_map(move |terms| {
        let field = PrimeField::new(p as u64).unwrap();
        let kept = terms
            .into_iter()
            .filter(|(e, _)| e.iter().sum::<u32>() <= max_deg)
            .map(|(e, c)| (Monomial::new(e), c));
        MultiPoly::from_terms(field, n, kept)
    })
}

fn arb_alphabet(p: u32) -> impl Strategy<Value = Alphabet> {
    prop::sample::subsequence((0..p).collect::<Vec<_>>(), 1..=p as usize)
        .prop_map(move |els| Alphabet::new(PrimeField::new(p as u64).unwrap(), &els).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn histogram_matches_naive_evaluation(
        (p, s, q) in prop::sample::select(vec![2u32, 3, 5]).prop_flat_map(|p| (Just(p), arb_alphabet(p), arb_poly(p, 3, 4)))
    ) {
        let h = histogram_n(&q, &s, 3, &cfg()).unwrap();
        prop_assert_eq!(h.counts, naive_counts(&q, &s, 3));
        let _ = p;
    }

    #[test]
    fn parallel_and_serial_agree(
        (s, q) in arb_alphabet(5).prop_flat_map(|s| (Just(s), arb_poly(5, 5, 3)))
    ) {
        let par = histogram_n(&q, &s, 5, &Enumeration::default()).unwrap();
        let ser = histogram_n(&q, &s, 5, &Enumeration::default().serial()).unwrap();
        prop_assert_eq!(par, ser);
    }

    #[test]
    fn marginals_are_consistent(
        (s, a, b) in arb_alphabet(3).prop_flat_map(|s| (Just(s), arb_poly(3, 3, 2), arb_poly(3, 3, 2)))
    ) {
        let j = joint_histogram_n(&[&a, &b], &s, 3, &cfg()).unwrap();
        let hb = histogram_n(&b, &s, 3, &cfg()).unwrap();
        let m = j.marginalize(0);
        for v in 0..3u32 {
            prop_assert_eq!(m.count(&[v]), hb.counts[v as usize]);
        }
        prop_assert_eq!(j.counts.values().sum::<u64>(), j.total);
    }

    #[test]
    fn fiber_law_and_certificate_soundness(
        (p, s, a, b) in prop::sample::select(vec![2u32, 3, 5])
            .prop_flat_map(|p| (Just(p), arb_alphabet(p), arb_poly(p, 3, 2), arb_poly(p, 3, 2)))
    ) {
        let ps = [a.with_nvars(3), b.with_nvars(3)];
        let j = joint_histogram(&ps, &s, &cfg()).unwrap();
        let d = ps.iter().filter_map(|x| x.degree()).max().unwrap_or(0);
        let floor = BigRational::new(BigInt::one(), BigInt::from(s.size()).pow((p - 1) * d * 2));
        let mut v = vec![0u32; 2];
        loop {
            let prob = ratio(j.count(&v), j.total);
            prop_assert!(prob.is_zero() || prob >= floor);
            let cert = nullstellensatz_certificate(&ps, &v, &s, &cfg()).unwrap();
            prop_assert_eq!(cert.is_zero, prob.is_zero());
            if let Some(w) = &cert.witness {
                prop_assert_eq!(ps[0].evaluate(w).unwrap(), v[0]);
                prop_assert_eq!(ps[1].evaluate(w).unwrap(), v[1]);
                prop_assert!(prob >= cert.guarantee);
                prop_assert!(cert.lower_bound_exponent <= cert.reduced_degree);
                prop_assert!(cert.reduced_degree <= cert.degree_cap);
            }
            if !next_vector(&mut v, p) { break; }
        }
    }

    #[test]
    fn gap_identity_holds(
        (s, a, b) in arb_alphabet(3).prop_flat_map(|s| (Just(s), arb_poly(3, 3, 2), arb_poly(3, 3, 2))),
        u in 0u32..3, v in 0u32..3
    ) {
        let g = equidistribution_gap(&a, &[b], u, &[v], &s, &cfg()).unwrap();
        prop_assert_eq!(g.fourier_agrees, Some(true));
    }
}
