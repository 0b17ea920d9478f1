use serde::Serialize;

use super::{matrix_rank, RankCertificate};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::{AffineView, MultiPoly};

/// `Σ A_i·L_i² + remainder` with independent linear forms `L_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalForm {
    pub coeffs: Vec<u32>,
    pub forms: Vec<AffineView>,
    pub remainder: AffineView,
}

impl DiagonalForm {
    pub fn to_poly(&self) -> MultiPoly {
        let mut out = self.remainder.to_poly();
        for (&a, l) in self.coeffs.iter().zip(&self.forms) {
            let lp = l.to_poly();
            out = &out + &(&lp * &lp).scale(a);
        }
        out.with_nvars(self.remainder.nvars())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Congruent diagonalization of a symmetric matrix: returns `(A_i, l_i)` with
/// `xᵀMx = Σ A_i (l_i·x)²`, each `l_i` having leading coefficient 1.
pub fn diagonalize_matrix(f: PrimeField, m: &[Vec<u32>]) -> Result<Vec<(u32, Vec<u32>)>> {
    if f.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    let n = m.len();
    let mut m: Vec<Vec<u32>> = m.to_vec();
    let mut out = Vec::new();
    loop {
        // pivot direction w with wᵀMw ≠ 0
        let w: Vec<u32> = if let Some(i) = (0..n).find(|&i| m[i][i] != 0) {
            (0..n).map(|k| u32::from(k == i)).collect()
        } else if let Some((i, j)) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| m[i][j] != 0)
        {
            (0..n).map(|k| u32::from(k == i || k == j)).collect()
        } else {
            break;
        };
        let u: Vec<u32> = (0..n)
            .map(|i| (0..n).fold(0, |acc, j| f.add(acc, f.mul(m[i][j], w[j]))))
            .collect();
        let c = w.iter().zip(&u).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
        debug_assert_ne!(c, 0);
        let c_inv = f.inv(c).expect("pivot is non-zero");
        for i in 0..n {
            for j in 0..n {
                let t = f.mul(f.mul(u[i], u[j]), c_inv);
                m[i][j] = f.sub(m[i][j], t);
            }
        }
        let lead = *u.iter().find(|&&x| x != 0).expect("u ≠ 0 since c ≠ 0");
        let lead_inv = f.inv(lead).expect("non-zero");
        let l: Vec<u32> = u.iter().map(|&x| f.mul(x, lead_inv)).collect();
        out.push((f.mul(f.mul(lead, lead), c_inv), l));
    }
    Ok(out)
}

/// Diagonalizes the quadratic part of a polynomial of degree at most two.
pub fn diagonalize(p: &MultiPoly) -> Result<DiagonalForm> {
    let f = p.field();
    let (m, affine) = p.quadratic_anatomy()?;
    let pairs = diagonalize_matrix(f, &m)?;
    let (coeffs, forms) = pairs
        .into_iter()
        .map(|(a, l)| (a, AffineView::new(f, l, 0)))
        .unzip();
    Ok(DiagonalForm {
        coeffs,
        forms,
        remainder: affine,
    })
}

#[derive(Debug, Clone)]
enum Piece {
    /// `a·L²`
    Square(u32, AffineView),
    /// `a·L·M`
    Product(u32, AffineView, AffineView),
}

/// Pairs `A·L² + B·M²` into `A(L − cM)(L + cM)` when `−B/A = c²`.
fn pair_squares(f: PrimeField, pool: Vec<(u32, AffineView)>, products: &mut Vec<Piece>) -> Vec<(u32, AffineView)> {
    let mut used = vec![false; pool.len()];
    let mut left = Vec::new();
    for i in 0..pool.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (a, l) = &pool[i];
        let partner = (i + 1..pool.len()).find_map(|j| {
            if used[j] {
                return None;
            }
            let ratio = f.neg(f.div(pool[j].0, *a));
            f.sqrt(ratio).map(|c| (j, c))
        });
        match partner {
            Some((j, c)) => {
                used[j] = true;
                let m = &pool[j].1;
                products.push(Piece::Product(*a, l.axpy(f.neg(c), m), l.axpy(c, m)));
            }
            None => left.push((*a, l.clone())),
        }
    }
    left
}

/// Rewrites three pairwise-unpairable squares as one product plus one square.
fn split_ternary(f: PrimeField, three: &[(u32, AffineView)]) -> (Piece, (u32, AffineView)) {
    let a: Vec<u32> = three.iter().map(|t| t.0).collect();
    let dot = |x: &[u32], y: &[u32]| (0..3).fold(0, |acc, i| f.add(acc, f.mul(f.mul(a[i], x[i]), y[i])));
    // isotropic z with z_3 = 1; one exists since the form is isotropic and
    // a zero with z_3 = 0 would make the first two squares pairable
    let z = f
        .elements()
        .find_map(|z1| {
            let t = f.neg(f.div(f.add(a[2], f.mul(a[0], f.mul(z1, z1))), a[1]));
            f.sqrt(t).map(|z2| vec![z1, z2, 1])
        })
        .expect("ternary forms over F_p are isotropic");
    let mut w = vec![0, 0, f.inv(a[2]).expect("non-zero")];
    let half_qw = f.div(dot(&w, &w), 2);
    for i in 0..3 {
        w[i] = f.sub(w[i], f.mul(half_qw, z[i]));
    }
    let dz: Vec<u32> = (0..3).map(|i| f.mul(a[i], z[i])).collect();
    let dw: Vec<u32> = (0..3).map(|i| f.mul(a[i], w[i])).collect();
    let u3 = vec![
        f.sub(f.mul(dz[1], dw[2]), f.mul(dz[2], dw[1])),
        f.sub(f.mul(dz[2], dw[0]), f.mul(dz[0], dw[2])),
        f.sub(f.mul(dz[0], dw[1]), f.mul(dz[1], dw[0])),
    ];
    let q_u3 = dot(&u3, &u3);
    let combine = |v: &[u32]| -> AffineView {
        let n = three[0].1.nvars();
        (0..3).fold(AffineView::zero(f, n), |acc, i| acc.axpy(f.mul(a[i], v[i]), &three[i].1))
    };
    let alpha = combine(&z);
    let beta = combine(&w);
    let gamma = combine(&u3);
    let lead = *gamma.linear.iter().find(|&&x| x != 0).expect("γ ≠ 0");
    let gamma_n = gamma.scale(f.inv(lead).expect("non-zero"));
    let coef = f.div(f.mul(lead, lead), q_u3);
    (Piece::Product(2, alpha, beta), (coef, gamma_n))
}

/// Summands for `P` of degree ≤ 2: squares paired into products, the affine
/// remainder absorbed into shifted factors where possible.
fn pairing_summands(p: &MultiPoly) -> Result<(Vec<Vec<MultiPoly>>, usize)> {
    let f = p.field();
    let n = p.nvars();
    let diag = diagonalize(p)?;
    let r = diag.len();
    let mut pool: Vec<(u32, AffineView)> = diag.coeffs.iter().copied().zip(diag.forms.iter().cloned()).collect();
    let mut pieces = Vec::new();
    loop {
        pool = pair_squares(f, pool, &mut pieces);
        if pool.len() < 3 {
            break;
        }
        let rest = pool.split_off(3);
        let (prod, sq) = split_ternary(f, &pool);
        pieces.push(prod);
        pool = rest;
        pool.push(sq);
    }
    pieces.extend(pool.into_iter().map(|(a, l)| Piece::Square(a, l)));

    // absorb the linear remainder into the factors
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for piece in &pieces {
        match piece {
            Piece::Square(_, l) => rows.push(l.linear.clone()),
            Piece::Product(_, l, m) => {
                rows.push(l.linear.clone());
                rows.push(m.linear.clone());
            }
        }
    }
    let rem = diag.remainder.clone().resized(n);
    let mut extra: Vec<Vec<MultiPoly>> = Vec::new();
    match crate::linalg::solve_combination(f, &rows, &rem.linear) {
        Some(coeffs) => {
            let mut leftover = rem.constant;
            let mut k = 0;
            for piece in pieces.iter_mut() {
                match piece {
                    Piece::Square(a, l) => {
                        let t = f.div(coeffs[k], f.mul(2, *a));
                        k += 1;
                        *l = l.add_constant(t);
                        leftover = f.sub(leftover, f.mul(*a, f.mul(t, t)));
                    }
                    Piece::Product(a, l, m) => {
                        let (lam, mu) = (coeffs[k], coeffs[k + 1]);
                        k += 2;
                        let t = f.div(lam, *a);
                        let s = f.div(mu, *a);
                        *l = l.add_constant(s);
                        *m = m.add_constant(t);
                        leftover = f.sub(leftover, f.mul(*a, f.mul(s, t)));
                    }
                }
            }
            if leftover != 0 {
                // a·L² + c = a(L − σ)(L + σ) when −c/a = σ²
                let slot = pieces.iter().position(|piece| match piece {
                    Piece::Square(a, _) => f.sqrt(f.neg(f.div(leftover, *a))).is_some(),
                    Piece::Product(..) => false,
                });
                match slot {
                    Some(i) => {
                        if let Piece::Square(a, l) = pieces[i].clone() {
                            let sigma = f.sqrt(f.neg(f.div(leftover, a))).expect("checked");
                            pieces[i] = Piece::Product(a, l.add_constant(f.neg(sigma)), l.add_constant(sigma));
                        }
                    }
                    None => extra.push(vec![MultiPoly::constant(f, n, leftover)]),
                }
            }
        }
        None => extra.push(vec![rem.to_poly()]),
    }

    let mut summands: Vec<Vec<MultiPoly>> = pieces
        .into_iter()
        .map(|piece| match piece {
            Piece::Square(a, l) => vec![l.scale(a).to_poly(), l.to_poly()],
            Piece::Product(a, l, m) => vec![l.scale(a).to_poly(), m.to_poly()],
        })
        .collect();
    summands.extend(extra);
    Ok((summands, r))
}

/// Degree-1 rank certificate for a polynomial of degree at most two.
///
/// With an alphabet, both `P` and its reduction are certified and the shorter
/// one is kept; the difference becomes the vanishing part.
pub fn rk1_quadratic(p: &MultiPoly, s: Option<&Alphabet>) -> Result<RankCertificate> {
    let f = p.field();
    if f.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    let (m, _) = p.quadratic_anatomy()?;
    let r = matrix_rank(f, &m)?;
    let (mut best, _) = pairing_summands(p)?;
    if let Some(s) = s {
        let red = s.reduce(p);
        if &red != p {
            let (alt, _) = pairing_summands(&red)?;
            if alt.len() < best.len() {
                best = alt;
            }
        }
    }
    let lower = match s {
        Some(s) if s.size() <= 2 => usize::from(!s.vanishes_on(p)),
        _ => r.div_ceil(2).max(usize::from(!p.is_zero())),
    };
    Ok(RankCertificate::build(p, 1, best, s, lower))
}
