//! Natural logarithms of exact quantities too large for `f64`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// `ln u`; `-inf` for zero.
pub fn ln_biguint(u: &BigUint) -> f64 {
    if u.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = u.bits();
    if bits <= 1000 {
        return u.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (u >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln q` for `q >= 0`; `-inf` for zero.
pub fn ln_rational(q: &BigRational) -> f64 {
    assert!(!q.is_negative(), "logarithm of a negative number");
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_biguint(q.numer().magnitude()) - ln_biguint(q.denom().magnitude())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_powers() {
        let u = BigUint::from(3u32).pow(2000);
        assert!((ln_biguint(&u) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        let q = BigRational::new(BigUint::from(2u32).pow(1500).into(), u.into());
        assert!((ln_rational(&q) - (1500.0 * 2f64.ln() - 2000.0 * 3f64.ln())).abs() < 1e-9);
        assert_eq!(ln_rational(&BigRational::zero()), f64::NEG_INFINITY);
    }
}
