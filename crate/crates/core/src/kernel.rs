//! Term-level building blocks shared by every evaluator.
//!
//! Everything here is binary64. The binomial coefficients come from a
//! lazily grown Pascal triangle of `u64`; rows past [`MAX_BINOMIAL_ROW`]
//! are refused, and callers that need larger rows must go through
//! [`crate::exact`].

use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest Pascal row served by [`BinomialTable`].
pub const MAX_BINOMIAL_ROW: u32 = 61;

/// Pascal triangle of `u64` coefficients, grown on demand.
///
/// `rows[m][k] = C(m, k)` for `0 <= k <= m`. Growth happens under a write
/// lock, so a single table can be shared between threads.
#[derive(Debug, Default)]
pub struct BinomialTable {
    rows: RwLock<Vec<Vec<u64>>>,
}

impl BinomialTable {
    pub const fn new() -> Self {
        Self {
            rows: RwLock::new(Vec::new()),
        }
    }

    /// Process-wide table used by the free functions in this module.
    pub fn global() -> &'static BinomialTable {
        static TABLE: BinomialTable = BinomialTable::new();
        &TABLE
    }

    /// Largest row computed so far, if any.
    pub fn max_m(&self) -> Option<u32> {
        let rows = self.rows.read().unwrap_or_else(|e| e.into_inner());
        (rows.len() as u32).checked_sub(1)
    }

    /// `C(m, k)`, or 0 when `k > m`.
    pub fn get(&self, m: u32, k: u32) -> Result<u64> {
        if k > m {
            return Ok(0);
        }
        self.ensure_row(m)?;
        let rows = self.rows.read().unwrap_or_else(|e| e.into_inner());
        Ok(rows[m as usize][k as usize])
    }

    /// Copy of row `m`.
    pub fn row(&self, m: u32) -> Result<Vec<u64>> {
        self.ensure_row(m)?;
        let rows = self.rows.read().unwrap_or_else(|e| e.into_inner());
        Ok(rows[m as usize].clone())
    }

    fn ensure_row(&self, m: u32) -> Result<()> {
        if m > MAX_BINOMIAL_ROW {
            return Err(Error::Overflow(format!(
                "binomial row {m} exceeds the 64-bit table limit ({MAX_BINOMIAL_ROW}); \
                 use the exact module"
            )));
        }
        {
            let rows = self.rows.read().unwrap_or_else(|e| e.into_inner());
            if rows.len() > m as usize {
                return Ok(());
            }
        }
        let mut rows = self.rows.write().unwrap_or_else(|e| e.into_inner());
        while rows.len() <= m as usize {
            let next = match rows.last() {
                None => vec![1],
                Some(prev) => {
                    let mut row = Vec::with_capacity(prev.len() + 1);
                    row.push(1);
                    for k in 1..prev.len() {
                        let v = prev[k - 1].checked_add(prev[k]).ok_or_else(|| {
                            Error::Overflow(format!("C({}, {k}) overflows u64", prev.len()))
                        })?;
                        row.push(v);
                    }
                    row.push(1);
                    row
                }
            };
            rows.push(next);
        }
        Ok(())
    }
}

/// `C(m, k)` from the shared table; 0 when `k > m`.
pub fn binom(m: u32, k: u32) -> Result<u64> {
    BinomialTable::global().get(m, k)
}

/// `base^exp` by repeated squaring.
pub fn powi(base: f64, exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        e >>= 1;
        if e > 0 {
            b *= b;
        }
    }
    acc
}

/// Complex `base^exp` by repeated squaring.
pub fn cpowi(base: Complex64, exp: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        e >>= 1;
        if e > 0 {
            b = b * b;
        }
    }
    acc
}

/// Tolerance, in machine epsilons relative to the real part, on the
/// imaginary residue the complex evaluators are allowed to discard.
pub const RESIDUE_EPS: f64 = 8.0;

pub(crate) fn residue_ok(re: f64, im: f64) -> bool {
    im.abs() <= RESIDUE_EPS * f64::EPSILON * re.abs()
}

pub(crate) fn check_order(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("order m must be at least 1".into()));
    }
    Ok(())
}

/// Real and imaginary parts of `-i / (x + i)^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub re: f64,
    pub im: f64,
}

impl Decomposition {
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `Σ_{n=1..m} (-1)^n x^{m-(2n-1)} C(m, 2n-1)`, the numerator of the real part.
fn odd_binomial_sum(x: f64, m: u32) -> Result<f64> {
    let mut acc = 0.0;
    for n in 1..=m {
        let j = 2 * n - 1;
        if j > m {
            continue;
        }
        let c = binom(m, j)? as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * powi(x, m - j) * c;
    }
    Ok(acc)
}

/// `Σ_{n=1..m} (-1)^n x^{m-2(n-1)} C(m, 2(n-1))`, the numerator of the imaginary part.
fn even_binomial_sum(x: f64, m: u32) -> Result<f64> {
    let mut acc = 0.0;
    for n in 1..=m {
        let j = 2 * (n - 1);
        if j > m {
            continue;
        }
        let c = binom(m, j)? as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * powi(x, m - j) * c;
    }
    Ok(acc)
}

/// Splits `-i / (x + i)^m` into real and imaginary parts using two binomial
/// sums over the same index; no complex arithmetic is involved.
pub fn decompose_inverse_power(x: f64, m: u32) -> Result<Decomposition> {
    check_order(m)?;
    let den = powi(1.0 + x * x, m);
    Ok(Decomposition {
        re: odd_binomial_sum(x, m)? / den,
        im: even_binomial_sum(x, m)? / den,
    })
}

/// `-(-i / (x - i)^m)`: same real part as [`decompose_inverse_power`], imaginary
/// part negated.
pub fn decompose_inverse_power_conjugate(x: f64, m: u32) -> Result<Decomposition> {
    let d = decompose_inverse_power(x, m)?;
    Ok(Decomposition { re: d.re, im: -d.im })
}

/// `(1/i) (1/(x+i)^m - 1/(x-i)^m)`, evaluated as twice the real-part sum.
pub fn imaginary_difference(x: f64, m: u32) -> Result<f64> {
    check_order(m)?;
    let den = powi(1.0 + x * x, m);
    Ok(2.0 * (odd_binomial_sum(x, m)? / den))
}

/// m-th outer term of the real rational expansion:
///
/// `t_m(x) = -2/(2m-1) Σ_{n=1..2m-1} (-1)^n C(2m-1, 2n-1) (x/2)^{2(2m-n)-1} / (1 + x²/4)^{2m-1}`.
///
/// For `|x/2| >= 1` the power ratio is rewritten as `((x/2)²/(1+x²/4))^k (x/2)^{-j}`
/// so that neither factor overflows.
pub fn real_series_term(x: f64, m: u32) -> Result<f64> {
    check_order(m)?;
    let k = 2 * m - 1;
    let u = x / 2.0;
    let den = 1.0 + u * u;

    let mut acc = 0.0;
    if u.abs() < 1.0 {
        for n in 1..=k {
            let j = 2 * n - 1;
            if j > k {
                continue;
            }
            let c = binom(k, j)? as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * powi(u, 2 * k - j) * c;
        }
        Ok(-2.0 * acc / (k as f64 * powi(den, k)))
    } else {
        let scale = powi(u * u / den, k);
        for n in 1..=k {
            let j = 2 * n - 1;
            if j > k {
                continue;
            }
            let c = binom(k, j)? as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * c / powi(u, j);
        }
        Ok(-2.0 * scale * acc / k as f64)
    }
}

/// m-th summand of the complex-pair expansion,
/// `i/(2m-1) (1/(1+2i/x)^{2m-1} - 1/(1-2i/x)^{2m-1})`, evaluated in complex
/// arithmetic. The result is real; the imaginary residue is rounding noise
/// and is dropped.
pub fn complex_series_term(x: f64, m: u32) -> Result<f64> {
    check_order(m)?;
    if x == 0.0 {
        return Err(Error::Domain(
            "complex-pair term is undefined at x = 0 (division by zero in 2i/x)".into(),
        ));
    }
    let k = 2 * m - 1;
    let w = 2.0 / x;
    let plus = cpowi(Complex64::new(1.0, w).inv(), k);
    let minus = cpowi(Complex64::new(1.0, -w).inv(), k);
    let diff = plus - minus;
    // i * (a + ib) = -b + ia
    let re = -diff.im / k as f64;
    let im = diff.re / k as f64;
    debug_assert!(residue_ok(re, im), "imaginary residue {im} vs real {re}");
    Ok(re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct_inverse_power(x: f64, m: u32) -> Complex64 {
        let z = Complex64::new(x, 1.0).powu(m);
        Complex64::new(0.0, -1.0) / z
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(1, 1).unwrap(), 1);
        assert_eq!(binom(5, 2).unwrap(), 10);
        assert_eq!(binom(3, 5).unwrap(), 0);
        assert_eq!(binom(0, 0).unwrap(), 1);
        assert_eq!(binom(61, 30).unwrap(), 232_714_176_627_630_544);
    }

    #[test]
    fn binom_rejects_rows_past_limit() {
        assert!(matches!(binom(62, 31), Err(Error::Overflow(_))));
        assert!(matches!(binom(62, 1), Err(Error::Overflow(_))));
        // k > m is zero whatever the row
        assert_eq!(binom(62, 63).unwrap(), 0);
    }

    #[test]
    fn table_rows_obey_pascal_and_symmetry() {
        let table = BinomialTable::new();
        assert_eq!(table.max_m(), None);
        let last = table.row(MAX_BINOMIAL_ROW).unwrap();
        assert_eq!(table.max_m(), Some(MAX_BINOMIAL_ROW));
        assert_eq!(last.len(), MAX_BINOMIAL_ROW as usize + 1);
        for m in 0..=MAX_BINOMIAL_ROW {
            let row = table.row(m).unwrap();
            assert_eq!(row[0], 1);
            assert_eq!(row[m as usize], 1);
            for k in 0..=m as usize {
                assert_eq!(row[k], row[m as usize - k]);
                if k > 0 && k < m as usize {
                    let prev = table.row(m - 1).unwrap();
                    assert_eq!(row[k], prev[k - 1] + prev[k]);
                }
            }
        }
    }

    #[test]
    fn table_grows_safely_from_many_threads() {
        let table = BinomialTable::new();
        std::thread::scope(|s| {
            for t in 0..8u32 {
                let table = &table;
                s.spawn(move || {
                    for m in (t..=MAX_BINOMIAL_ROW).rev() {
                        table.get(m, m / 2).unwrap();
                    }
                });
            }
        });
        assert_eq!(table.get(40, 20).unwrap(), 137_846_528_820);
    }

    #[test]
    fn powi_matches_known_powers() {
        assert_eq!(powi(2.0, 10), 1024.0);
        assert_eq!(powi(-0.5, 3), -0.125);
        assert_eq!(powi(7.0, 0), 1.0);
    }

    #[test]
    fn decompose_small_cases() {
        let d = decompose_inverse_power(0.0, 1).unwrap();
        assert_eq!((d.re, d.im), (-1.0, 0.0));
        let d = decompose_inverse_power(1.0, 1).unwrap();
        assert_eq!((d.re, d.im), (-0.5, -0.5));
        let c = decompose_inverse_power_conjugate(0.0, 1).unwrap();
        assert_eq!(c.re, -1.0);
        assert_eq!(c.im, 0.0);
        let c = decompose_inverse_power_conjugate(1.0, 1).unwrap();
        assert_eq!((c.re, c.im), (-0.5, 0.5));
    }

    #[test]
    fn decompose_matches_direct_complex_cube() {
        let d = decompose_inverse_power(2.0, 3).unwrap();
        let z = direct_inverse_power(2.0, 3);
        assert!(rel_close(d.re, z.re, 1e-14));
        assert!(rel_close(d.im, z.im, 1e-14));

        let c = decompose_inverse_power_conjugate(2.0, 3).unwrap();
        let zc = -(Complex64::new(0.0, -1.0) / Complex64::new(2.0, -1.0).powu(3));
        assert!(rel_close(c.re, zc.re, 1e-14));
        assert!(rel_close(c.im, zc.im, 1e-14));
    }

    #[test]
    fn imaginary_difference_cases() {
        assert_eq!(imaginary_difference(0.0, 1).unwrap(), -2.0);
        assert_eq!(imaginary_difference(1.0, 1).unwrap(), -1.0);
        let i = Complex64::new(0.0, 1.0);
        let oracle = (Complex64::new(3.0, 1.0).powu(4).inv()
            - Complex64::new(3.0, -1.0).powu(4).inv())
            / i;
        assert!(rel_close(imaginary_difference(3.0, 4).unwrap(), oracle.re, 1e-13));
        assert!(oracle.im.abs() < 1e-18);
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(matches!(decompose_inverse_power(1.0, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(real_series_term(1.0, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(complex_series_term(1.0, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn real_term_cases() {
        assert_eq!(real_series_term(0.0, 1).unwrap(), 0.0);
        assert_eq!(real_series_term(0.0, 7).unwrap(), 0.0);
        assert!((real_series_term(1.0, 1).unwrap() - 0.8).abs() < 1e-16);
        // i (1/3) (1/(1+i)^3 - 1/(1-i)^3) at x = 2
        let i = Complex64::new(0.0, 1.0);
        let oracle = i / 3.0
            * (Complex64::new(1.0, 1.0).powu(3).inv() - Complex64::new(1.0, -1.0).powu(3).inv());
        assert!(rel_close(real_series_term(2.0, 2).unwrap(), oracle.re, 1e-14));
    }

    #[test]
    fn real_term_row_limit() {
        assert!(real_series_term(1.0, 31).is_ok());
        assert!(matches!(real_series_term(1.0, 32), Err(Error::Overflow(_))));
    }

    #[test]
    fn complex_term_cases() {
        assert!((complex_series_term(1.0, 1).unwrap() - 0.8).abs() <= 1e-15);
        let r = real_series_term(1.0, 2).unwrap();
        assert!(rel_close(complex_series_term(1.0, 2).unwrap(), r, 1e-15));
        assert!(matches!(complex_series_term(0.0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn large_arguments_stay_finite() {
        for m in [1, 10, 31] {
            let r = real_series_term(1e4, m).unwrap();
            let c = complex_series_term(1e4, m).unwrap();
            assert!(r.is_finite());
            assert!((r - c).abs() <= 1e-12 * r.abs().max(1.0), "m={m}: {r} vs {c}");
        }
    }

    const GRID: [f64; 10] = [-7.5, -3.0, -1.0, -0.3, 0.0, 0.2, 0.5, 1.0, 2.0, 4.25];

    #[test]
    fn decomposition_grid_matches_complex_oracle() {
        for &x in &GRID {
            for m in 1..=12 {
                let d = decompose_inverse_power(x, m).unwrap();
                let z = direct_inverse_power(x, m);
                let scale = z.norm();
                // componentwise relative to the modulus, zero components are exact
                assert!((d.re - z.re).abs() <= 1e-12 * scale, "re x={x} m={m}");
                assert!((d.im - z.im).abs() <= 1e-12 * scale, "im x={x} m={m}");

                let c = decompose_inverse_power_conjugate(x, m).unwrap();
                assert_eq!(c.re.to_bits(), d.re.to_bits());
                assert_eq!(c.im, -d.im);

                let i = Complex64::new(0.0, 1.0);
                let oracle = (Complex64::new(x, 1.0).powu(m).inv()
                    - Complex64::new(x, -1.0).powu(m).inv())
                    / i;
                let diff = imaginary_difference(x, m).unwrap();
                assert_eq!(diff, 2.0 * d.re);
                assert!((diff - oracle.re).abs() <= 1e-12 * scale * 2.0, "diff x={x} m={m}");
            }
        }
    }

    #[test]
    fn term_forms_agree_on_grid() {
        for &x in GRID.iter().filter(|x| **x != 0.0) {
            for m in 1..=10 {
                let r = real_series_term(x, m).unwrap();
                let c = complex_series_term(x, m).unwrap();
                assert!((r - c).abs() <= 1e-13 * r.abs().max(1.0), "x={x} m={m}: {r} vs {c}");
            }
        }
    }

    proptest! {
        #[test]
        fn real_term_is_odd(x in -50.0f64..50.0, m in 1u32..=31) {
            let a = real_series_term(x, m).unwrap();
            let b = real_series_term(-x, m).unwrap();
            prop_assert_eq!(a, -b);
        }

        #[test]
        fn binom_matches_multiplicative_formula(m in 0u32..=61, k in 0u32..=70) {
            let expected = if k > m {
                0u128
            } else {
                let k = k.min(m - k) as u128;
                let mut acc = 1u128;
                for i in 0..k {
                    acc = acc * (m as u128 - i) / (i + 1);
                }
                acc
            };
            prop_assert_eq!(binom(m, k).unwrap() as u128, expected);
        }
    }
}
