//! High-precision `arctan` enclosure used to measure truncation error below
//! the double-precision noise floor.
//!
//! Uses Euler's accelerated series
//! `arctan(x) = Σ_k (2^{2k} (k!)² / (2k+1)!) x^{2k+1} / (1+x²)^{k+1}`,
//! which shares nothing with the expansions under test. Arguments with
//! `|x| > 1` are reduced with `arctan(x) = ±π/2 - arctan(1/x)`, where
//! `π/2 = 2 arctan(1)`.
//!
//! Arithmetic is fixed point: values are big integers scaled by `2^bits`,
//! every division truncates, and the accumulated truncation is returned as
//! the enclosure radius.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `value - radius <= arctan(x) <= value + radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub value: BigRational,
    pub radius: BigRational,
}

struct Fixed {
    value: BigInt,
    /// Error bound in units of `2^-bits`.
    err_ulps: u64,
}

/// Euler series for `0 <= p/q <= 1`.
fn euler_fixed(p: &BigInt, q: &BigInt, bits: u32) -> Fixed {
    let one = BigInt::one() << bits;
    if p.is_zero() {
        return Fixed { value: BigInt::zero(), err_ulps: 0 };
    }
    let p2 = p * p;
    let s = &p2 + q * q;
    // T_0 = x/(1+x²) = pq/(p²+q²); T_{k+1} = T_k (2k+2)/(2k+3) · p²/(p²+q²)
    let mut term = &one * p * q / &s;
    let mut sum = term.clone();
    let mut k: u64 = 0;
    while !term.is_zero() {
        term = term * BigInt::from(2 * k + 2) * &p2 / (BigInt::from(2 * k + 3) * &s);
        sum += &term;
        k += 1;
    }
    // Ratio of consecutive terms is below 1/2 for |x| <= 1, so the inherited
    // error of each term stays under 2 ulps; the tail after the first zero
    // term is under 3 more.
    Fixed { value: sum, err_ulps: 2 * (k + 1) + 3 }
}

/// Enclosure of `arctan(x)` with radius about `2^-bits` times the term count.
pub fn arctan_enclosure(x: &BigRational, bits: u32) -> Enclosure {
    let scale = BigRational::from_integer(BigInt::one() << bits);
    let negative = x.is_negative();
    let ax = x.abs();
    let (p, q) = (ax.numer().clone(), ax.denom().clone());

    let fixed = if p <= q {
        euler_fixed(&p, &q, bits)
    } else {
        let quarter_pi = euler_fixed(&BigInt::one(), &BigInt::one(), bits);
        let recip = euler_fixed(&q, &p, bits);
        Fixed {
            value: (quarter_pi.value << 1) - recip.value,
            err_ulps: 2 * quarter_pi.err_ulps + recip.err_ulps,
        }
    };

    let value = BigRational::from_integer(fixed.value) / &scale;
    Enclosure {
        value: if negative { -value } else { value },
        radius: BigRational::from_integer(fixed.err_ulps.into()) / scale,
    }
}
