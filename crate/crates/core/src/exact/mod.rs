//! Rounding-free versions of the term and derivative identities.
//!
//! Every quantity here is a [`BigRational`] or a [`GaussianRational`], so two
//! sides of an identity either compare equal or the implementation is wrong.
//! Binomials come from big integers and have no row limit.

mod gaussian;
pub mod reference;

pub use gaussian::GaussianRational;
pub use num_rational::BigRational;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn check_order(m: u32) -> Result<()> {
    crate::kernel::check_order(m)
}

/// `C(m, k)` as a big integer (multiplicative formula); 0 when `k > m`.
pub fn exact_binom(m: u32, k: u32) -> BigInt {
    if k > m {
        return BigInt::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    acc
}

/// `(-1)^n` as a rational.
fn alt(n: u32) -> BigRational {
    if n.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

fn rpow(x: &BigRational, exp: u32) -> BigRational {
    num_traits::pow(x.clone(), exp as usize)
}

fn int(n: u32) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Exact rational value of a finite `f64` (every double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("argument {x} is not finite")))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `x + i·y` for rational `x`, `y`.
fn gauss(re: &BigRational, im: BigRational) -> GaussianRational {
    GaussianRational::new(re.clone(), im)
}

/// Σ_{n=1..m} (-1)^n x^{m-(2n-1)} C(m, 2n-1): numerator of the real part.
fn odd_sum(x: &BigRational, m: u32) -> BigRational {
    let mut acc = BigRational::zero();
    for n in 1..=m {
        let j = 2 * n - 1;
        if j > m {
            continue;
        }
        acc += alt(n) * rpow(x, m - j) * BigRational::from_integer(exact_binom(m, j));
    }
    acc
}

/// Σ_{n=1..m} (-1)^n x^{m-2(n-1)} C(m, 2(n-1)): numerator of the imaginary part.
fn even_sum(x: &BigRational, m: u32) -> BigRational {
    let mut acc = BigRational::zero();
    for n in 1..=m {
        let j = 2 * (n - 1);
        if j > m {
            continue;
        }
        acc += alt(n) * rpow(x, m - j) * BigRational::from_integer(exact_binom(m, j));
    }
    acc
}

/// Binomial-sum form of `-i / (x + i)^m`.
pub fn exact_decompose(x: &BigRational, m: u32) -> Result<GaussianRational> {
    check_order(m)?;
    let den = rpow(&(BigRational::one() + x * x), m);
    Ok(GaussianRational::new(odd_sum(x, m) / &den, even_sum(x, m) / &den))
}

/// `-i / (x + i)^m` by Gaussian exponentiation and division.
pub fn direct_inverse_power(x: &BigRational, m: u32) -> Result<GaussianRational> {
    check_order(m)?;
    let base = gauss(x, BigRational::one()).pow(m);
    Ok(&-&GaussianRational::i() / &base)
}

/// m-th outer term of the real rational expansion, exactly.
pub fn exact_real_term(x: &BigRational, m: u32) -> Result<BigRational> {
    check_order(m)?;
    let k = 2 * m - 1;
    let half = x / int(2);
    let den = rpow(&(BigRational::one() + &half * &half), k) * int(k);
    let mut acc = BigRational::zero();
    for n in 1..=k {
        let j = 2 * n - 1;
        if j > k {
            continue;
        }
        acc += alt(n) * rpow(&half, 2 * k - j) * BigRational::from_integer(exact_binom(k, j));
    }
    Ok(-(int(2) * acc) / den)
}

/// `i/(2m-1) · (1/(1+2i/x)^{2m-1} - 1/(1-2i/x)^{2m-1})` in Gaussian-rational
/// arithmetic. The imaginary part of the result is zero whenever the
/// implementation is right.
pub fn exact_complex_term(x: &BigRational, m: u32) -> Result<GaussianRational> {
    check_order(m)?;
    if x.is_zero() {
        return Err(Error::Domain(
            "complex-pair term is undefined at x = 0 (division by zero in 2i/x)".into(),
        ));
    }
    let k = 2 * m - 1;
    let w = int(2) / x;
    let one = BigRational::one();
    let plus = gauss(&one, w.clone()).pow(k).inv().expect("1 + 2i/x is nonzero");
    let minus = gauss(&one, -w).pow(k).inv().expect("1 - 2i/x is nonzero");
    let diff = &plus - &minus;
    Ok((&GaussianRational::i() * &diff).scale(&(one / int(k))))
}

/// Exact check that the complex-pair term equals the real rational term.
pub fn verify_term_identity(x: &BigRational, m: u32) -> Result<bool> {
    let c = exact_complex_term(x, m)?;
    let r = exact_real_term(x, m)?;
    Ok(c.im.is_zero() && c.re == r)
}

/// Exact check that `(1/i)(1/(x+i)^m - 1/(x-i)^m)` equals
/// `2 Σ (-1)^n x^{m-(2n-1)} C(m, 2n-1) / (1+x²)^m`.
pub fn verify_derivative_identity(x: &BigRational, m: u32) -> Result<bool> {
    check_order(m)?;
    let one = BigRational::one();
    let plus = gauss(x, one.clone()).pow(m).inv().expect("x + i is nonzero");
    let minus = gauss(x, -one.clone()).pow(m).inv().expect("x - i is nonzero");
    let lhs = (&plus - &minus).checked_div(&GaussianRational::i()).expect("i is nonzero");
    let den = rpow(&(one + x * x), m);
    let rhs = int(2) * odd_sum(x, m) / den;
    Ok(lhs.im.is_zero() && lhs.re == rhs)
}

/// Exact check that the binomial decomposition equals `-i / (x + i)^m`.
pub fn verify_decomposition(x: &BigRational, m: u32) -> Result<bool> {
    Ok(exact_decompose(x, m)? == direct_inverse_power(x, m)?)
}

/// m-th derivative of `arctan` at rational `x`, via the real binomial sum.
pub fn exact_derivative(x: &BigRational, m: u32) -> Result<BigRational> {
    check_order(m)?;
    let fact: BigInt = (1..m).map(BigInt::from).product();
    let den = rpow(&(BigRational::one() + x * x), m);
    Ok(alt(m) * BigRational::from_integer(fact) * odd_sum(x, m) / den)
}

/// `Σ_{m=1..terms}` of [`exact_real_term`].
pub fn exact_partial_sum(x: &BigRational, terms: u32) -> Result<BigRational> {
    if terms == 0 {
        return Err(Error::InvalidArgument("number of terms must be at least 1".into()));
    }
    let mut acc = BigRational::zero();
    for m in 1..=terms {
        acc += exact_real_term(x, m)?;
    }
    Ok(acc)
}

/// The fixed rational grids the identity suites run over.
pub mod grids {
    use super::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Arguments for the complex-pair / real-term identity.
    pub fn term_identity() -> Vec<BigRational> {
        vec![q(1, 1), q(1, 2), q(3, 7), q(10, 1), q(-2, 5)]
    }

    /// Arguments for the derivative identity.
    pub fn derivative_identity() -> Vec<BigRational> {
        vec![q(0, 1), q(1, 2), q(-5, 3), q(7, 1)]
    }

    /// Arguments for the decomposition identity: union of the two grids above.
    pub fn decomposition() -> Vec<BigRational> {
        let mut all = term_identity();
        for x in derivative_identity() {
            if !all.contains(&x) {
                all.push(x);
            }
        }
        all
    }
}
