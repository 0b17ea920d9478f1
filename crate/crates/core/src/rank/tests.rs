use super::*;
use crate::parse::parse_poly;
use crate::poly::{AffineView, Monomial};
use proptest::prelude::*;

fn f(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn poly(s: &str, p: u64) -> MultiPoly {
    parse_poly(s, f(p)).unwrap()
}

fn chain_of_products(m: usize, p: u64) -> MultiPoly {
    let text: Vec<String> = (0..m).map(|i| format!("x{}*x{}", 2 * i + 1, 2 * i + 2)).collect();
    poly(&text.join(" + "), p)
}

#[test]
fn rk0_examples() {
    assert_eq!(rk0(&MultiPoly::zero(f(5), 2)), 0);
    assert_eq!(rk0(&poly("x1*x2 + 3*x3 + 1", 5)), 3);
    assert_eq!(rk0(&poly("x1^2 - x1", 5)), 2);
}

#[test]
fn rk0_s_examples() {
    let bin = Alphabet::new(f(5), &[0, 1]).unwrap();
    assert_eq!(rk0_s_upper(&poly("x1^2 - x1 + x2^2 - x2", 5), &bin), 0);
    assert_eq!(rk0_s_upper(&poly("x1^3 + x1", 5), &bin), 1);
    let full = Alphabet::full(f(5));
    let q = poly("x1^3*x2 + 2*x2^4 + x3", 5);
    assert_eq!(rk0_s_upper(&q, &full), rk0(&q));
}

#[test]
fn matrix_rank_examples() {
    let (m, _) = poly("x1*x2", 5).quadratic_anatomy().unwrap();
    assert_eq!(matrix_rank(f(5), &m).unwrap(), 2);
    assert_eq!(matrix_rank(f(5), &[vec![0, 0], vec![0, 0]]).unwrap(), 0);
    for m in 1..=4 {
        let (mm, _) = chain_of_products(m, 7).quadratic_anatomy().unwrap();
        assert_eq!(matrix_rank(f(7), &mm).unwrap(), 2 * m);
    }
    assert_eq!(matrix_rank(f(2), &[vec![1]]), Err(Error::CharacteristicTwo));
}

#[test]
fn diagonalize_examples() {
    let d = diagonalize(&poly("x1^2 + x2^2", 5)).unwrap();
    assert_eq!(d.coeffs, vec![1, 1]);
    assert!(d.remainder.is_zero());

    let p = poly("x1*x2", 5);
    let d = diagonalize(&p).unwrap();
    assert_eq!(d.len(), 2);
    assert_eq!(d.to_poly(), p);

    let p = poly("x1*x2 + x3", 7);
    let d = diagonalize(&p).unwrap();
    assert_eq!(d.len(), 2);
    assert_eq!(d.remainder.to_poly(), poly("x3", 7).with_nvars(3));
    assert_eq!(d.to_poly(), p);
}

#[test]
fn rk1_examples() {
    let p5 = chain_of_products(3, 5);
    let c = rk1_quadratic(&p5, None).unwrap();
    assert_eq!(c.value, 3);
    assert!(c.is_exact());
    c.verify(&p5, None).unwrap();

    let p3 = poly("x1*x2", 3);
    let c = rk1_quadratic(&p3, None).unwrap();
    assert_eq!(c.value, 1);
    assert!(c.is_exact());

    let z = MultiPoly::zero(f(5), 3);
    let c = rk1_quadratic(&z, None).unwrap();
    assert_eq!(c.value, 0);
    assert!(c.is_exact());
}

#[test]
fn rk1_absorbs_affine_parts() {
    // (x1 + 1)(x2 + 2) expands to a quadratic with a full affine tail
    let p = poly("(x1 + 1)*(x2 + 2)", 7);
    let c = rk1_quadratic(&p, None).unwrap();
    assert_eq!(c.value, 1);
    c.verify(&p, None).unwrap();

    let p = poly("x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + 3*x6 + 2", 7);
    let c = rk1_quadratic(&p, None).unwrap();
    c.verify(&p, None).unwrap();
}

#[test]
fn rk1_relative_to_binary_alphabet() {
    let bin = Alphabet::new(f(5), &[0, 1]).unwrap();
    let p = poly("x1^2 - x1 + x2^2 - x2", 5);
    let c = rk1_quadratic(&p, Some(&bin)).unwrap();
    assert_eq!(c.value, 0);
    assert!(c.is_exact());
    c.verify(&p, Some(&bin)).unwrap();
}

#[test]
fn brute_force_examples() {
    let p = poly("x1*x2", 3);
    let c = brute_force_rank(&p, 1, None, DEFAULT_RANK_BUDGET).unwrap();
    assert_eq!(c.value, 1);
    assert!(c.is_exact());
    c.verify(&p, None).unwrap();

    let p = poly("x1*x2*x3", 3);
    let c = brute_force_rank(&p, 1, None, DEFAULT_RANK_BUDGET).unwrap();
    assert_eq!(c.value, 1);
    assert_eq!(c.summands[0].len(), 3);
    c.verify(&p, None).unwrap();

    let bin = Alphabet::new(f(3), &[0, 1]).unwrap();
    let p = poly("x1^2 - x1", 3);
    let c = brute_force_rank(&p, 1, Some(&bin), DEFAULT_RANK_BUDGET).unwrap();
    assert_eq!(c.value, 0);
    assert_eq!(c.vanishing_part, Some(p.clone()));
    c.verify(&p, Some(&bin)).unwrap();
}

#[test]
fn brute_force_finds_nontrivial_minimum() {
    // x1*x2 + x1*x3 = x1*(x2 + x3): rank 1 although it has two monomials
    let p = poly("x1*x2 + x1*x3", 3);
    let c = brute_force_rank(&p, 1, None, DEFAULT_RANK_BUDGET).unwrap();
    assert_eq!(c.value, 1);
    c.verify(&p, None).unwrap();
    // x1*x2 + x3*x4 needs two products: its form has rank 4
    let p = poly("x1*x2 + x3*x4", 3);
    let c = brute_force_rank(&p, 1, None, DEFAULT_RANK_BUDGET).unwrap();
    assert_eq!(c.value, 2);
    assert!(c.is_exact());
}

#[test]
fn brute_force_degree_zero() {
    let bin = Alphabet::new(f(3), &[0, 1]).unwrap();
    let p = poly("x1^2 + x2", 3);
    let c = brute_force_rank(&p, 0, Some(&bin), DEFAULT_RANK_BUDGET).unwrap();
    // reduces to x1 + x2
    assert_eq!(c.value, 2);
    c.verify(&p, Some(&bin)).unwrap();
    let c = brute_force_rank(&p, 0, None, DEFAULT_RANK_BUDGET).unwrap();
    assert_eq!(c.value, 2);
}

#[test]
fn brute_force_budget_flags_upper_bound() {
    let p = poly("x1*x2 + x3*x4 + x5*x6", 3);
    let c = brute_force_rank(&p, 1, None, 10).unwrap();
    assert!(c.budget_exhausted);
    assert_eq!(c.kind, CertificateKind::UpperBound);
    c.verify(&p, None).unwrap();
}

#[test]
fn verify_rejects_tampering() {
    let p = poly("x1*x2 + x3", 5);
    let mut c = rk1_quadratic(&p, None).unwrap();
    c.summands.pop();
    c.value -= 1;
    assert!(c.verify(&p, None).is_err());
}

fn arb_quadratic(p: u32, n: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=2, n), 0..p), 0..8).prop_map(move |terms| {
        let field = PrimeField::new(p as u64).unwrap();
        MultiPoly::from_terms(
            field,
            n,
            terms
                .into_iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= 2)
                .map(|(e, c)| (Monomial::new(e), c)),
        )
    })
}

fn odd_prime_quadratic(n: usize) -> impl Strategy<Value = MultiPoly> {
    prop::sample::select(vec![3u32, 5, 7]).prop_flat_map(move |p| arb_quadratic(p, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonal_count_is_matrix_rank(q in odd_prime_quadratic(6)) {
        let d = diagonalize(&q).unwrap();
        prop_assert_eq!(d.to_poly(), q.clone());
        let (m, _) = q.quadratic_anatomy().unwrap();
        prop_assert_eq!(d.len(), matrix_rank(q.field(), &m).unwrap());
        let rows: Vec<Vec<u32>> = d.forms.iter().map(|l| l.linear.clone()).collect();
        prop_assert_eq!(crate::linalg::rank(q.field(), &rows), d.len());
    }

    #[test]
    fn rk1_sandwich(q in odd_prime_quadratic(6)) {
        let c = rk1_quadratic(&q, None).unwrap();
        c.verify(&q, None).unwrap();
        let pure = q.homogeneous_part(2);
        let (m, _) = pure.quadratic_anatomy().unwrap();
        let r = matrix_rank(q.field(), &m).unwrap();
        let cp = rk1_quadratic(&pure, None).unwrap();
        prop_assert!(r.div_ceil(2) <= cp.value);
        prop_assert!(r <= 2 * cp.value);
        prop_assert!(cp.value <= r.div_ceil(2) + 1);
    }

    #[test]
    fn rk1_with_alphabet_is_sound(
        (q, els) in prop::sample::select(vec![3u32, 5]).prop_flat_map(|p| {
            (arb_quadratic(p, 4), prop::sample::subsequence((0..p).collect::<Vec<_>>(), 1..=p as usize))
        })
    ) {
        let s = Alphabet::new(q.field(), &els).unwrap();
        let c = rk1_quadratic(&q, Some(&s)).unwrap();
        c.verify(&q, Some(&s)).unwrap();
        prop_assert!(c.lower_bound <= c.value);
    }

    #[test]
    fn oracle_agrees_with_pairing(q in arb_quadratic(3, 3)) {
        let exact = brute_force_rank(&q, 1, None, DEFAULT_RANK_BUDGET).unwrap();
        exact.verify(&q, None).unwrap();
        prop_assert!(exact.is_exact());
        let c = rk1_quadratic(&q, None).unwrap();
        prop_assert!(exact.value <= c.value);
        if c.is_exact() {
            prop_assert_eq!(exact.value, c.value);
        }
    }

    #[test]
    fn rank_monotonicity(
        (q, els) in arb_quadratic(3, 3).prop_flat_map(|q| {
            (Just(q), prop::sample::subsequence(vec![0u32, 1, 2], 1..=3))
        })
    ) {
        let s = Alphabet::new(q.field(), &els).unwrap();
        let rs = brute_force_rank(&q, 1, Some(&s), DEFAULT_RANK_BUDGET).unwrap();
        let r = brute_force_rank(&q, 1, None, DEFAULT_RANK_BUDGET).unwrap();
        rs.verify(&q, Some(&s)).unwrap();
        prop_assert!(rs.is_exact() && r.is_exact());
        prop_assert!(rs.value <= r.value);
        prop_assert!(r.value <= rk0(&q));
    }
}

#[test]
fn affine_view_roundtrip_in_certificates() {
    let l = AffineView::new(f(5), vec![1, 2], 3);
    let p = &l.to_poly() * &l.to_poly();
    let c = rk1_quadratic(&p, None).unwrap();
    assert_eq!(c.value, 1);
    c.verify(&p, None).unwrap();
}
