//! Convergence measurement, a truncation-error bound, and pi demonstrations.
//!
//! # Truncation bound
//!
//! Write `z = x/(x + 2i)`, so `1/(1 ± 2i/x) = z, conj(z)` and `|z| = q` with
//! `q = |x| / sqrt(x² + 4)`. The m-th summand is
//! `i (z^k - conj(z)^k) / k = -2 Im(z^k) / k` with `k = 2m - 1`, hence
//! `|t_m| <= 2 q^k / k`. Summing the tail after `M` terms,
//!
//! ```text
//! |R_M| <= Σ_{m>M} 2 q^{2m-1}/(2m-1)
//!       <= 2 q^{2M+1}/(2M+1) · Σ_{j>=0} q^{2j}
//!        = 2 q^{2M+1} / ((2M+1)(1 - q²)).
//! ```
//!
//! The tail decays geometrically by `q² = x²/(x²+4)` per term, but the phase
//! `k·arg(z)` makes individual terms (and errors) oscillate around that
//! envelope rather than follow it step by step.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluators::{arctan_series, Form, SeriesConfig};
use crate::exact::{self, reference};

/// Errors below this are dominated by double rounding; ratios are not formed.
pub const NOISE_FLOOR: f64 = 1e-15;

/// Largest decimal-digit target tracked in [`ConvergenceReport::m_to_target`].
pub const MAX_DIGIT_TARGET: u32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEntry {
    #[serde(rename = "M")]
    pub m: u32,
    pub partial_sum: f64,
    pub abs_error: f64,
    pub error_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub x: f64,
    pub form: Form,
    /// Ordered by strictly increasing `m`.
    pub entries: Vec<ConvergenceEntry>,
    /// `x² / (x² + 4)`.
    pub predicted_ratio: f64,
    /// Digits `d` mapped to the smallest `M` with `abs_error <= 10^-d`.
    pub m_to_target: BTreeMap<u32, u32>,
    /// Outer terms evaluated.
    pub term_evaluations: u64,
    /// Inner binomial products evaluated (RealRational only; 0 otherwise).
    pub inner_evaluations: u64,
}

impl ConvergenceReport {
    /// Geometric mean of the per-step error decay between the first entry at
    /// or after `from_m` and the last entry above the noise floor.
    pub fn mean_error_ratio(&self, from_m: u32) -> Option<f64> {
        let usable: Vec<_> = self
            .entries
            .iter()
            .filter(|e| e.m >= from_m && e.abs_error >= NOISE_FLOOR)
            .collect();
        let (first, last) = (usable.first()?, usable.last()?);
        if last.m == first.m {
            return None;
        }
        Some((last.abs_error / first.abs_error).powf(1.0 / (last.m - first.m) as f64))
    }
}

/// `x² / (x² + 4)`, the squared modulus of `x/(x + 2i)`.
pub fn predicted_ratio(x: f64) -> f64 {
    let x2 = x * x;
    x2 / (x2 + 4.0)
}

/// Partial sums for `M = 1..=m_max`, built incrementally in the same order as
/// [`arctan_series`] so every partial sum matches it bit for bit.
pub fn convergence_study(x: f64, m_max: u32, form: Form) -> Result<ConvergenceReport> {
    if m_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "convergence study needs at least 2 terms, got {m_max}"
        )));
    }
    SeriesConfig::new(x, m_max, form)?;
    let reference = x.atan();

    let mut entries: Vec<ConvergenceEntry> = Vec::with_capacity(m_max as usize);
    let mut m_to_target = BTreeMap::new();
    let mut term_evaluations = 0;
    let mut inner_evaluations = 0;
    let mut acc = 0.0;
    for m in 1..=m_max {
        if x != 0.0 {
            acc += form.term(x, m)?;
            term_evaluations += 1;
            if form == Form::RealRational {
                inner_evaluations += m as u64;
            }
        }
        let abs_error = (acc - reference).abs();
        let error_ratio = entries
            .last()
            .filter(|prev| prev.abs_error >= NOISE_FLOOR)
            .map(|prev| abs_error / prev.abs_error);
        for d in 1..=MAX_DIGIT_TARGET {
            if abs_error <= 10f64.powi(-(d as i32)) {
                m_to_target.entry(d).or_insert(m);
            }
        }
        entries.push(ConvergenceEntry {
            m,
            partial_sum: acc,
            abs_error,
            error_ratio,
        });
    }

    Ok(ConvergenceReport {
        x,
        form,
        entries,
        predicted_ratio: predicted_ratio(x),
        m_to_target,
        term_evaluations,
        inner_evaluations,
    })
}

/// Independent studies for several arguments, run on scoped threads; the
/// output order follows `xs`.
pub fn convergence_studies(xs: &[f64], m_max: u32, form: Form) -> Result<Vec<ConvergenceReport>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = xs
            .iter()
            .map(|&x| s.spawn(move || convergence_study(x, m_max, form)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence study panicked"))
            .collect()
    })
}

/// Upper bound on `|arctan(x) - Σ_{m=1..M} t_m(x)|`:
/// `2 q^{2M+1} / ((2M+1)(1 - q²))` with `q = |x| / sqrt(x² + 4)`.
pub fn truncation_error_bound(x: f64, terms: u32) -> f64 {
    let x2 = x * x;
    let q = x.abs() / (x2 + 4.0).sqrt();
    let k = 2 * terms + 1;
    let one_minus_q2 = 4.0 / (x2 + 4.0);
    2.0 * crate::kernel::powi(q, k) / (k as f64 * one_minus_q2)
}

/// Truncation error measured without double rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationMeasurement {
    /// `|arctan(x) - S_M|` rounded to nearest.
    pub estimate: f64,
    /// A double no smaller than the true `|arctan(x) - S_M|`.
    pub upper: f64,
}

/// Bits of the fixed-point `arctan` enclosure used by
/// [`measured_truncation_error`].
pub const REFERENCE_BITS: u32 = 640;

/// Measures the truncation error of the `M`-term real rational partial sum at
/// the exact value of `x`: the partial sum is summed in rationals and compared
/// with a high-precision `arctan` enclosure, so the result is free of the
/// double-precision noise floor.
pub fn measured_truncation_error(x: f64, terms: u32) -> Result<TruncationMeasurement> {
    let xq = exact::rational_from_f64(x)?;
    let partial = exact::exact_partial_sum(&xq, terms)?;
    let enclosure = reference::arctan_enclosure(&xq, REFERENCE_BITS);
    let diff = (&enclosure.value - &partial).abs();
    let upper_q = &diff + &enclosure.radius;
    let mut upper = exact::rational_to_f64(&upper_q);
    if exact::rational_from_f64(upper)? < upper_q {
        upper = upper.next_up();
    }
    Ok(TruncationMeasurement {
        estimate: exact::rational_to_f64(&diff),
        upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PiScheme {
    /// `π = 4 arctan(1)`.
    DirectX1,
    /// `π = 16 arctan(1/5) - 4 arctan(1/239)`.
    Machin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiResult {
    pub scheme: PiScheme,
    #[serde(rename = "M")]
    pub terms: u32,
    pub value: f64,
    /// `|value - π|` against `std::f64::consts::PI`.
    pub abs_error: f64,
}

pub fn compute_pi(scheme: PiScheme, terms: u32) -> Result<PiResult> {
    let series = |x: f64| arctan_series(&SeriesConfig::new(x, terms, Form::RealRational)?);
    let value = match scheme {
        PiScheme::DirectX1 => 4.0 * series(1.0)?,
        PiScheme::Machin => 16.0 * series(1.0 / 5.0)? - 4.0 * series(1.0 / 239.0)?,
    };
    Ok(PiResult {
        scheme,
        terms,
        value,
        abs_error: (value - std::f64::consts::PI).abs(),
    })
}
