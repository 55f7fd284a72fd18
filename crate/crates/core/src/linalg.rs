//! Dense matrix exponential by scaling and squaring with a truncated Taylor
//! series. Shared by the population propagator and the Liouville-space
//! oracles.

use ndarray::{Array2, LinalgScalar, ScalarOperand};
use num_complex::Complex64;

pub trait ExpmScalar: LinalgScalar + ScalarOperand + Send + Sync {
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
    fn is_finite_value(self) -> bool;
}

impl ExpmScalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl ExpmScalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1<T: ExpmScalar>(a: &Array2<T>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

const SCALED_NORM_TARGET: f64 = 0.5;
const MAX_TAYLOR_TERMS: usize = 40;

/// exp(A) for a square matrix. Returns `None` if the input or the result
/// contains non-finite entries.
pub fn expm<T: ExpmScalar>(a: &Array2<T>) -> Option<Array2<T>> {
    let (n, m) = a.dim();
    assert_eq!(n, m, "expm requires a square matrix");
    if a.iter().any(|x| !x.is_finite_value()) {
        return None;
    }
    let norm = norm1(a);
    let squarings = if norm > SCALED_NORM_TARGET {
        (norm / SCALED_NORM_TARGET).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * T::from_real(0.5f64.powi(squarings));

    let mut result = Array2::<T>::eye(n);
    let mut term = Array2::<T>::eye(n);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = term.dot(&scaled) * T::from_real(1.0 / k as f64);
        result = result + &term;
        if norm1(&term) <= f64::EPSILON * 1e-3 * norm1(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    if result.iter().all(|x| x.is_finite_value()) {
        Some(result)
    } else {
        None
    }
}

/// exp(A) for a real matrix with non-negative off-diagonal entries (a rate
/// generator). Each scaled factor is evaluated as e^{-s} exp(B + sI) with
/// B + sI entrywise non-negative, so no cancellation occurs and small
/// entries keep full relative accuracy through the squarings. When every
/// column of A sums to zero the result is column-stochastic, and columns are
/// renormalised after each squaring to keep it so.
pub fn expm_metzler(a: &Array2<f64>) -> Option<Array2<f64>> {
    let (n, m) = a.dim();
    assert_eq!(n, m, "expm requires a square matrix");
    if a.iter().any(|x| !x.is_finite()) {
        return None;
    }
    debug_assert!(a.indexed_iter().all(|((i, j), &x)| i == j || x >= 0.0));
    let norm = norm1(a);
    let conserving = a.columns().into_iter().all(|c| c.sum().abs() <= 1e-12 * norm);
    let squarings = if norm > SCALED_NORM_TARGET {
        (norm / SCALED_NORM_TARGET).log2().ceil() as i32
    } else {
        0
    };
    let mut b = a * 0.5f64.powi(squarings);
    let shift = b.diag().iter().fold(0.0f64, |s, &d| s.max(-d));
    for i in 0..n {
        b[[i, i]] += shift;
    }

    let mut result = Array2::<f64>::eye(n);
    let mut term = Array2::<f64>::eye(n);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = term.dot(&b) / k as f64;
        result += &term;
        if norm1(&term) <= f64::EPSILON * 1e-3 * norm1(&result) {
            break;
        }
    }
    result *= (-shift).exp();
    let normalise = |m: &mut Array2<f64>| {
        if conserving {
            for mut c in m.columns_mut() {
                let total = c.sum();
                c /= total;
            }
        }
    };
    normalise(&mut result);
    for _ in 0..squarings {
        result = result.dot(&result);
        normalise(&mut result);
    }
    if result.iter().all(|x| x.is_finite()) {
        Some(result)
    } else {
        None
    }
}
