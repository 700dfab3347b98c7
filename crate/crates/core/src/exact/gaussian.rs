use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `re + i·im` with exact rational components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

#[inline]
pub(crate) fn debug_check(q: &BigRational) {
    debug_assert!(q.denom().is_positive(), "non-positive denominator in {q}");
    debug_assert!(
        q.numer().gcd(q.denom()) == BigInt::one() || q.numer().is_zero(),
        "unreduced rational {q}"
    );
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        debug_check(&re);
        debug_check(&im);
        Self { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn zero() -> Self {
        Self::from_integers(0, 0)
    }

    pub fn one() -> Self {
        Self::from_integers(1, 0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::from_integers(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    /// Multiplicative inverse via `conj(z) / |z|²`; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    /// `self^exp` by repeated squaring.
    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, -self.im.clone())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

/// Panics on division by zero, like the primitive numeric types.
impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: Self) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero Gaussian rational")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: Self) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn gauss() -> impl Strategy<Value = GaussianRational> {
        (-20i64..20, 1i64..12, -20i64..20, 1i64..12)
            .prop_map(|(a, b, c, d)| GaussianRational::new(q(a, b), q(c, d)))
    }

    #[test]
    fn unit_and_conjugation() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_integers(-1, 0));
        let z = GaussianRational::new(q(3, 7), q(-2, 5));
        assert_eq!(z.conj().re, z.re);
        assert_eq!(z.conj().im, -z.im.clone());
        assert!((&z * &z.conj()).is_real());
    }

    #[test]
    fn small_powers() {
        let z = GaussianRational::from_integers(1, 1);
        assert_eq!(z.pow(2), GaussianRational::from_integers(0, 2));
        assert_eq!(z.pow(0), GaussianRational::one());
        // -i / (1+i)^2 = -1/2
        let v = &-&GaussianRational::i() / &z.pow(2);
        assert_eq!(v, GaussianRational::from_real(q(-1, 2)));
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(GaussianRational::zero().inv().is_none());
        assert!(GaussianRational::one().checked_div(&GaussianRational::zero()).is_none());
    }

    #[test]
    fn display() {
        assert_eq!(GaussianRational::new(q(1, 2), q(-3, 4)).to_string(), "1/2 - 3/4i");
        assert_eq!(GaussianRational::from_integers(2, 5).to_string(), "2 + 5i");
    }

    proptest! {
        #[test]
        fn field_axioms(a in gauss(), b in gauss(), c in gauss()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
                prop_assert_eq!(&(&b / &a) * &a, b.clone());
            }
        }

        #[test]
        fn components_stay_reduced(a in gauss(), b in gauss()) {
            for z in [&a * &b, &a + &b, a.pow(3)] {
                for part in [&z.re, &z.im] {
                    prop_assert!(part.denom().is_positive());
                    prop_assert!(part.numer().is_zero() || part.numer().gcd(part.denom()).is_one());
                }
            }
        }
    }
}
