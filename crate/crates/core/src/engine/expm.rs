//! Dense matrix exponential by scaling and squaring.
//!
//! The core works with `φ(A) = e^A - I` rather than `e^A` itself. With
//! `E = e^{A/2} - I` we have `e^A - I = E·E + 2E`, so the squaring phase never
//! forms `I + small` and `e^{λD} - I` keeps full relative accuracy even for
//! tiny `λ`. The scaled matrix has 1-norm at most 1/2, where the truncated
//! Taylor series converges in a handful of terms.

use crate::engine::EngineError;
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Upper bound on the 1-norm of the scaled matrix fed to the series.
const SCALED_NORM_BOUND: f64 = 0.5;
/// Hard cap on series terms; with norm <= 1/2 the terms fall below `1e-30`
/// well before this.
const MAX_TAYLOR_TERMS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpOptions<T> {
    /// Relative size of the last series term kept.
    pub taylor_tolerance: T,
    /// Maximum number of halvings; larger norms are reported as overflow.
    pub max_scaling_squarings: u32,
}

impl<T: Scalar> Default for ExpOptions<T> {
    fn default() -> Self {
        Self {
            taylor_tolerance: T::lit(1e-13),
            max_scaling_squarings: 32,
        }
    }
}

impl<T: Scalar> ExpOptions<T> {
    pub fn new(taylor_tolerance: T, max_scaling_squarings: u32) -> Result<Self, EngineError> {
        if !(taylor_tolerance > T::zero() && taylor_tolerance <= T::lit(1e-6)) {
            return Err(EngineError::InvalidParameter {
                name: "taylor_tolerance",
                value: taylor_tolerance.to_string(),
                reason: "must lie in (0, 1e-6]",
            });
        }
        Ok(Self {
            taylor_tolerance,
            max_scaling_squarings,
        })
    }
}

/// `e^m - I`.
pub fn matrix_exp_minus_identity<T: Scalar>(
    m: &DenseMatrix<T>,
    opts: &ExpOptions<T>,
) -> Result<DenseMatrix<T>, EngineError> {
    let n = m.dim()?;
    if !m.is_finite() {
        return Err(EngineError::NonFinite);
    }
    if n == 0 {
        return Ok(m.clone());
    }

    let norm = m.norm_one();
    let bound = T::lit(SCALED_NORM_BOUND);
    let two = T::lit(2.0);
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > bound {
        scaled_norm = scaled_norm / two;
        squarings += 1;
        if squarings > opts.max_scaling_squarings {
            return Err(EngineError::Overflow(format!(
                "1-norm {norm} needs more than {} squarings",
                opts.max_scaling_squarings
            )));
        }
    }
    let scaled = m.scale(two.powi(-(squarings as i32)));

    // Truncation error is amplified roughly twofold by each squaring.
    let tolerance = (opts.taylor_tolerance * two.powi(-(squarings as i32))).max(T::epsilon());
    let mut term = scaled.clone();
    let mut sum = scaled.clone();
    for k in 2..=MAX_TAYLOR_TERMS {
        term = term.matmul(&scaled)?.scale(T::one() / T::from_usize_lossy(k));
        sum = sum.add(&term)?;
        if term.norm_one() <= tolerance * sum.norm_one() {
            break;
        }
    }

    for _ in 0..squarings {
        sum = sum.matmul(&sum)?.add(&sum.scale(two))?;
        if !sum.is_finite() {
            return Err(EngineError::Overflow(format!(
                "entries exceed the representable range (1-norm {norm})"
            )));
        }
    }
    Ok(sum)
}

/// `e^m` via scaling and squaring with a truncated Taylor core.
pub fn matrix_exponential<T: Scalar>(
    m: &DenseMatrix<T>,
    opts: &ExpOptions<T>,
) -> Result<DenseMatrix<T>, EngineError> {
    Ok(matrix_exp_minus_identity(m, opts)?.shift_diagonal(T::one()))
}
