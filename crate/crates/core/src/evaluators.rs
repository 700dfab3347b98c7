//! Truncated arctangent series and m-th derivatives of `arctan` in `f64`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, binom, cpowi, powi};

/// Which of the two equivalent expansions to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Form {
    /// Real rational double sum, no complex numbers.
    RealRational,
    /// Powers of `1 ± 2i/x` in complex arithmetic.
    ComplexPair,
}

impl Form {
    pub fn term(self, x: f64, m: u32) -> Result<f64> {
        match self {
            Form::RealRational => kernel::real_series_term(x, m),
            Form::ComplexPair => kernel::complex_series_term(x, m),
        }
    }
}

/// One truncated-series evaluation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub x: f64,
    /// Number of outer terms; the outer index runs over `1..=terms`.
    pub terms: u32,
    pub form: Form,
    /// Return exactly 0 at `x = 0` instead of evaluating the terms.
    pub zero_shortcut: bool,
}

impl SeriesConfig {
    pub fn new(x: f64, terms: u32, form: Form) -> Result<Self> {
        let cfg = Self {
            x,
            terms,
            form,
            zero_shortcut: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn without_zero_shortcut(mut self) -> Self {
        self.zero_shortcut = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms == 0 {
            return Err(Error::InvalidArgument("number of terms must be at least 1".into()));
        }
        if !self.x.is_finite() {
            return Err(Error::Domain(format!("argument {} is not finite", self.x)));
        }
        if self.form == Form::ComplexPair && self.x == 0.0 && !self.zero_shortcut {
            return Err(Error::Domain(
                "complex-pair form is undefined at x = 0 (division by zero in 2i/x)".into(),
            ));
        }
        Ok(())
    }
}

/// Partial sum `Σ_{m=1..terms} t_m(x)` accumulated left to right.
pub fn arctan_series(cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.x == 0.0 && cfg.zero_shortcut {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for m in 1..=cfg.terms {
        acc += cfg.form.term(cfg.x, m)?;
    }
    Ok(acc)
}

/// Highest derivative order accepted; `(m-1)!` overflows `f64` shortly after.
pub const MAX_DERIV_ORDER: u32 = 170;

/// `(m-1)!` as an iterated `f64` product.
fn factorial_prev(m: u32) -> Result<f64> {
    kernel::check_order(m)?;
    if m > MAX_DERIV_ORDER {
        return Err(Error::Overflow(format!(
            "({m}-1)! is outside the double range; derivative order must be <= {MAX_DERIV_ORDER}"
        )));
    }
    Ok((1..m).fold(1.0, |acc, k| acc * k as f64))
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument {x} is not finite")))
    }
}

/// `d^m/dx^m arctan(x) = (-1)^m (m-1)!/(2i) (1/(x+i)^m - 1/(x-i)^m)` in complex
/// arithmetic.
pub fn arctan_deriv_complex(x: f64, m: u32) -> Result<f64> {
    check_finite(x)?;
    let fact = factorial_prev(m)?;
    let plus = cpowi(Complex64::new(x, 1.0), m).inv();
    let minus = cpowi(Complex64::new(x, -1.0), m).inv();
    let diff = plus - minus;
    // (a + ib) / (2i) = b/2 - i a/2
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let re = sign * fact * (diff.im / 2.0);
    let im = -sign * fact * (diff.re / 2.0);
    debug_assert!(kernel::residue_ok(re, im), "imaginary residue {im} vs real {re}");
    Ok(re)
}

/// `d^m/dx^m arctan(x) = (m-1)! Σ_{n=1..m} (-1)^{m+n} x^{m-(2n-1)} C(m, 2n-1) / (1+x²)^m`.
pub fn arctan_deriv_rational(x: f64, m: u32) -> Result<f64> {
    check_finite(x)?;
    let fact = factorial_prev(m)?;
    let mut acc = 0.0;
    for n in 1..=m {
        let j = 2 * n - 1;
        if j > m {
            continue;
        }
        let sign = if (m + n).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * powi(x, m - j) * binom(m, j)? as f64;
    }
    Ok(fact * (acc / powi(1.0 + x * x, m)))
}

/// Signum with `sgn(0) = 1`.
fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `sgn^{m-1}(-x) (m-1)! / (1+x²)^{m/2} · sin(m · asin(1/sqrt(1+x²)))`.
///
/// The signum factor is what makes the formula valid for negative `x`.
pub fn arctan_deriv_trig(x: f64, m: u32) -> Result<f64> {
    check_finite(x)?;
    let fact = factorial_prev(m)?;
    let s = if (m - 1).is_multiple_of(2) { 1.0 } else { sgn(-x) };
    let root = (1.0 + x * x).sqrt();
    let angle = (1.0 / root).asin();
    Ok(s * fact / powi(root, m) * (m as f64 * angle).sin())
}

/// Central-difference coefficients for orders 1..=4, offsets centred on zero.
const STENCILS: [&[f64]; 4] = [
    &[-0.5, 0.0, 0.5],
    &[1.0, -2.0, 1.0],
    &[-0.5, 1.0, 0.0, -1.0, 0.5],
    &[1.0, -4.0, 6.0, -4.0, 1.0],
];

/// Default stencil spacing, `eps^(1/(m+2))` scaled by `max(1, |x|)`.
pub fn default_fd_step(x: f64, m: u32) -> f64 {
    f64::EPSILON.powf(1.0 / (m as f64 + 2.0)) * x.abs().max(1.0)
}

/// m-th central difference of the standard-library `atan` at spacing `h`.
pub fn finite_difference_deriv(x: f64, m: u32, h: f64) -> Result<f64> {
    if !(1..=4).contains(&m) {
        return Err(Error::Domain(format!(
            "finite-difference stencils exist for orders 1..=4, got {m}"
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    check_finite(x)?;
    let coeffs = STENCILS[m as usize - 1];
    let half = (coeffs.len() / 2) as f64;
    let mut acc = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            acc += c * (x + (i as f64 - half) * h).atan();
        }
    }
    Ok(acc / powi(h, m))
}
