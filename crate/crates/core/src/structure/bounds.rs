use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct BoundConfig {
    pub e: usize,
    /// Cap on distinct descriptions evaluated.
    pub max_evaluations: u64,
}

impl BoundConfig {
    pub fn new(e: usize) -> Self {
        BoundConfig {
            e,
            max_evaluations: 1_000_000,
        }
    }
}

/// Odometer step over `[0, w]^len`.
fn advance(u: &mut [usize], w: usize) -> bool {
    for x in u.iter_mut().rev() {
        if *x < w {
            *x += 1;
            return true;
        }
        *x = 0;
    }
    false
}

struct Recursion<'a> {
    v: &'a dyn Fn(&[usize]) -> BigUint,
    w: &'a dyn Fn(&[usize]) -> usize,
    e: usize,
    memo: HashMap<Vec<usize>, BigUint>,
    max: u64,
}

impl Recursion<'_> {
    fn eval(&mut self, d: &[usize]) -> Result<BigUint> {
        if let Some(b) = self.memo.get(d) {
            return Ok(b.clone());
        }
        if self.memo.len() as u64 >= self.max {
            return Err(Error::budget("bound recursion states", self.memo.len() as u128 + 1, self.max as u128));
        }
        let top = (self.e + 1..d.len()).rev().find(|&m| d[m] != 0);
        let out = match top {
            None => (self.v)(d),
            Some(m) => {
                let w = (self.w)(d);
                let mut u = vec![0usize; m];
                let mut best = BigUint::zero();
                loop {
                    let mut next = d.to_vec();
                    for i in 0..m {
                        next[i] += u[i];
                    }
                    next[m] -= 1;
                    let b = self.eval(&next)?;
                    if b > best {
                        best = b;
                    }
                    if !advance(&mut u, w) {
                        break;
                    }
                }
                best
            }
        };
        self.memo.insert(d.to_vec(), out.clone());
        Ok(out)
    }
}

/// `B(D)`: `V(D)` when `D` has no mass above `e`, otherwise the maximum of
/// `B(D_0+u_0, …, D_{m−1}+u_{m−1}, D_m−1, 0, …)` over `0 ≤ u_i ≤ W(D)`, with
/// `m` the top non-zero index.
pub fn bound_b(
    v: &dyn Fn(&[usize]) -> BigUint,
    w: &dyn Fn(&[usize]) -> usize,
    d: &[usize],
    cfg: BoundConfig,
) -> Result<BigUint> {
    if cfg.e >= d.len() {
        return Err(Error::Invalid(format!("e = {} needs a description longer than {}", cfg.e, d.len())));
    }
    let mut rec = Recursion {
        v,
        w,
        e: cfg.e,
        memo: HashMap::new(),
        max: cfg.max_evaluations,
    };
    rec.eval(d)
}

/// `(C_pre, C)` with `C_pre = Σ_{0≤v≤d} Ψ^v` and `C = p^{C_pre}`.
pub fn constants(psi: &BigUint, p: u64, d: u32) -> Result<(BigUint, BigUint)> {
    if psi.is_zero() {
        return Err(Error::Invalid("Ψ must be at least 1".into()));
    }
    let mut c_pre = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..=d {
        c_pre += &power;
        power *= psi;
    }
    const MAX_EXPONENT: u32 = 1 << 20;
    let exp = c_pre
        .to_u32()
        .filter(|&x| x <= MAX_EXPONENT)
        .ok_or_else(|| Error::budget("exponent of C", c_pre.to_u128().unwrap_or(u128::MAX), MAX_EXPONENT as u128))?;
    let c = BigUint::from(p).pow(exp);
    Ok((c_pre, c))
}
