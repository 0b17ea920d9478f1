//! Small shared helpers: rationals in reports and odometers over `F_p^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serializer;

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Serializes a rational as `"a/b"` (or `"a"` when integral).
pub fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_opt_ratio<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Advances `v` to the next vector of `{0..base-1}^k` in lexicographic
/// order (last coordinate fastest). Returns false after the last one.
pub fn next_vector(v: &mut [u32], base: u32) -> bool {
    for slot in v.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// `base^k`, or `None` on overflow.
pub fn checked_power(base: u64, k: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}
