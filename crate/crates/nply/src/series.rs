//! Truncated complex power-series arithmetic.
//!
//! A [`ComplexSeries`] holds the Taylor coefficients `c_0..c_N` of an analytic
//! function at the origin, truncated at a fixed order `N`. Every operation
//! truncates at the common order; no automatic order growth.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default truncation order used throughout the toolkit.
pub const DEFAULT_ORDER: usize = 64;

/// Tolerance used by the normalization predicate (`c_0 = 0`, `c_1 = 1`).
pub const NORMALIZED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("coefficient at index {0} is not finite")]
    NonFiniteCoefficient(usize),
    #[error("weight at position {0} is not finite")]
    NonFiniteWeight(usize),
    #[error("series orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("linear combination needs at least one term")]
    EmptyCombination,
    #[error("constant term must vanish, got {0}")]
    NonzeroConstantTerm(Complex64),
    #[error("cannot divide by vanishing coefficient at index {0}")]
    DivideByZeroCoefficient(usize),
    #[error("coefficient list length {len} does not match order {order} (want order + 1)")]
    CoefficientCount { order: usize, len: usize },
}

/// Mirror-map applied to the argument (and coefficients) of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reflection {
    /// `f(z) -> f(-z)`: coefficient rule `c_k -> (-1)^k c_k`.
    NegateArg,
    /// `f(z) -> conj(f(conj z))`: coefficient rule `c_k -> conj(c_k)`.
    ConjArg,
    /// `f(z) -> conj(f(-conj z))`: coefficient rule `c_k -> (-1)^k conj(c_k)`.
    ConjNegateArg,
}

/// A Taylor expansion `c_0 + c_1 z + ... + c_N z^N` with complex coefficients.
///
/// Immutable after construction; all operations return new values. Binary
/// operations that carry no error contract panic on mismatched orders, which
/// indicates a caller bug (validated inputs always share an order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct ComplexSeries {
    coeffs: Vec<Complex64>,
}

/// Wire form of a series: `{"order": N, "coeffs": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<(f64, f64)>,
}

impl TryFrom<SeriesRepr> for ComplexSeries {
    type Error = SeriesError;

    fn try_from(repr: SeriesRepr) -> Result<Self, SeriesError> {
        if repr.coeffs.len() != repr.order.wrapping_add(1) {
            return Err(SeriesError::CoefficientCount {
                order: repr.order,
                len: repr.coeffs.len(),
            });
        }
        ComplexSeries::new(
            repr.coeffs
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexSeries> for SeriesRepr {
    fn from(s: ComplexSeries) -> SeriesRepr {
        SeriesRepr {
            order: s.order(),
            coeffs: s.coeffs.iter().map(|c| (c.re, c.im)).collect(),
        }
    }
}

impl ComplexSeries {
    /// Builds a series from coefficients `c_0..c_N`; the order is `len - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coeffs.len() < 3 {
            return Err(SeriesError::OrderTooSmall(coeffs.len().saturating_sub(1)));
        }
        for (k, c) in coeffs.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(SeriesError::NonFiniteCoefficient(k));
            }
        }
        Ok(ComplexSeries { coeffs })
    }

    /// Builds a series of the given order from a coefficient function.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        assert!(order >= 2, "series order must be at least 2");
        ComplexSeries {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    /// The zero series of the given order.
    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| Complex64::ZERO)
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        Self::from_fn(order, |k| if k == 0 { Complex64::ONE } else { Complex64::ZERO })
    }

    /// The identity series `z`.
    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |k| if k == 1 { Complex64::ONE } else { Complex64::ZERO })
    }

    /// The truncation of `z/(1-z)`: all coefficients 1 from index 1.
    pub fn geometric(order: usize) -> Self {
        Self::from_fn(order, |k| if k == 0 { Complex64::ZERO } else { Complex64::ONE })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `c_k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::ZERO)
    }

    /// Whether the series is a member of the normalized class (`c_0 = 0`, `c_1 = 1`).
    pub fn is_normalized(&self) -> bool {
        self.coeff(0).norm() <= NORMALIZED_TOL && (self.coeff(1) - Complex64::ONE).norm() <= NORMALIZED_TOL
    }

    /// Whether every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Returns a copy truncated or zero-extended to the given order.
    pub fn resized(&self, order: usize) -> Self {
        Self::from_fn(order, |k| self.coeff(k))
    }

    fn assert_same_order(&self, other: &Self) {
        assert_eq!(
            self.order(),
            other.order(),
            "series orders differ: {} vs {}",
            self.order(),
            other.order()
        );
    }

    /// Coefficientwise weighted sum `sum_k w_k f_k`.
    pub fn linear_combine(terms: &[(f64, &ComplexSeries)]) -> Result<Self, SeriesError> {
        let (first_w, first) = terms.first().ok_or(SeriesError::EmptyCombination)?;
        let order = first.order();
        if !first_w.is_finite() {
            return Err(SeriesError::NonFiniteWeight(0));
        }
        for (i, (w, s)) in terms.iter().enumerate().skip(1) {
            if !w.is_finite() {
                return Err(SeriesError::NonFiniteWeight(i));
            }
            if s.order() != order {
                return Err(SeriesError::OrderMismatch(order, s.order()));
            }
        }
        Ok(Self::from_fn(order, |k| {
            terms.iter().map(|(w, s)| s.coeffs[k] * *w).sum()
        }))
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_order(other);
        Self::from_fn(self.order(), |k| self.coeffs[k] + other.coeffs[k])
    }

    /// Coefficientwise difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_order(other);
        Self::from_fn(self.order(), |k| self.coeffs[k] - other.coeffs[k])
    }

    /// Multiplies every coefficient by a complex scalar.
    pub fn scalar_mul(&self, s: Complex64) -> Self {
        Self::from_fn(self.order(), |k| self.coeffs[k] * s)
    }

    /// Subtracts a constant from the series (shifts `c_0`).
    pub fn sub_constant(&self, c: Complex64) -> Self {
        Self::from_fn(self.order(), |k| if k == 0 { self.coeffs[0] - c } else { self.coeffs[k] })
    }

    /// Multiplication by `z`: shifts coefficients up one index, dropping `c_N`.
    pub fn mul_z(&self) -> Self {
        Self::from_fn(self.order(), |k| if k == 0 { Complex64::ZERO } else { self.coeffs[k - 1] })
    }

    /// Division by `z`: shifts coefficients down one index, requires `c_0 = 0`.
    /// The top coefficient of the result is zero (unknown past truncation).
    pub fn div_z(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != Complex64::ZERO {
            return Err(SeriesError::NonzeroConstantTerm(self.coeffs[0]));
        }
        Ok(Self::from_fn(self.order(), |k| self.coeff(k + 1)))
    }

    /// Truncated Cauchy product: coefficient `k` is `sum_{i+j=k} f_i g_j`.
    pub fn cauchy_product(&self, other: &Self) -> Self {
        self.assert_same_order(other);
        let n = self.order();
        let mut out = vec![Complex64::ZERO; n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::ZERO {
                continue;
            }
            for (j, b) in other.coeffs[..=(n - i)].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexSeries { coeffs: out }
    }

    /// The theta operator `z f'(z)`: coefficient rule `c_k -> k c_k`.
    pub fn z_derivative(&self) -> Self {
        Self::from_fn(self.order(), |k| self.coeffs[k] * k as f64)
    }

    /// `integral_0^z f(t)/t dt`: coefficient rule `c_k -> c_k / k`; inverse of
    /// [`z_derivative`](Self::z_derivative). Requires `c_0 = 0`.
    pub fn integrate_div_z(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != Complex64::ZERO {
            return Err(SeriesError::NonzeroConstantTerm(self.coeffs[0]));
        }
        Ok(Self::from_fn(self.order(), |k| {
            if k == 0 {
                Complex64::ZERO
            } else {
                self.coeffs[k] / k as f64
            }
        }))
    }

    /// Plain derivative `f'`; the top coefficient of the result is zero
    /// because `c_{N+1}` lies past the truncation order.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        Self::from_fn(n, |k| {
            if k == n {
                Complex64::ZERO
            } else {
                self.coeffs[k + 1] * (k + 1) as f64
            }
        })
    }

    /// `integral_0^z f(t) dt`: coefficient `k` of the result is `c_{k-1}/k`.
    pub fn integrate(&self) -> Self {
        Self::from_fn(self.order(), |k| {
            if k == 0 {
                Complex64::ZERO
            } else {
                self.coeffs[k - 1] / k as f64
            }
        })
    }

    /// Taylor coefficients of `outer(inner(z))` via Horner-on-series.
    /// Requires `inner(0) = 0` so that the composition truncates exactly.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.assert_same_order(inner);
        if inner.coeffs[0] != Complex64::ZERO {
            return Err(SeriesError::NonzeroConstantTerm(inner.coeffs[0]));
        }
        let n = self.order();
        let mut acc = Self::from_fn(n, |k| if k == 0 { self.coeffs[n] } else { Complex64::ZERO });
        for k in (0..n).rev() {
            acc = acc.cauchy_product(inner);
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    /// Taylor series of `exp(p)` for `p(0) = 0`, via the recurrence
    /// `k E_k = sum_{j=1}^{k} j p_j E_{k-j}` (from `E' = p' E`, `E(0) = 1`).
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != Complex64::ZERO {
            return Err(SeriesError::NonzeroConstantTerm(self.coeffs[0]));
        }
        let n = self.order();
        let mut out = vec![Complex64::ZERO; n + 1];
        out[0] = Complex64::ONE;
        for k in 1..=n {
            let mut acc = Complex64::ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * j as f64 * out[k - j];
            }
            out[k] = acc / k as f64;
        }
        Ok(ComplexSeries { coeffs: out })
    }

    /// Hadamard (coefficientwise) product: `c_k = f_k g_k`.
    pub fn hadamard(&self, other: &Self) -> Self {
        self.assert_same_order(other);
        Self::from_fn(self.order(), |k| self.coeffs[k] * other.coeffs[k])
    }

    /// Coefficientwise quotient `c_k = f_k / g_k`; indices where both vanish
    /// yield zero, a vanishing `g_k` under a nonzero `f_k` is an error.
    pub fn deconvolve(&self, other: &Self) -> Result<Self, SeriesError> {
        self.assert_same_order(other);
        let mut out = vec![Complex64::ZERO; self.order() + 1];
        for k in 0..=self.order() {
            if other.coeffs[k] == Complex64::ZERO {
                if self.coeffs[k] != Complex64::ZERO {
                    return Err(SeriesError::DivideByZeroCoefficient(k));
                }
            } else {
                out[k] = self.coeffs[k] / other.coeffs[k];
            }
        }
        Ok(ComplexSeries { coeffs: out })
    }

    /// Keeps coefficients with index `k = 1 (mod n)` (and `k` odd when
    /// `odd_only`), zeroing the rest. Equals the root-of-unity average
    /// `(1/n) sum_j e^{-2 pi i j / n} f(e^{2 pi i j / n} z)` coefficientwise.
    pub fn project_residue(&self, n: usize, odd_only: bool) -> Self {
        assert!(n >= 1, "projection modulus must be at least 1");
        Self::from_fn(self.order(), |k| {
            if k % n == 1 % n && (!odd_only || k % 2 == 1) {
                self.coeffs[k]
            } else {
                Complex64::ZERO
            }
        })
    }

    /// Applies a mirror map to the series; see [`Reflection`].
    pub fn reflect(&self, mode: Reflection) -> Self {
        Self::from_fn(self.order(), |k| {
            let c = self.coeffs[k];
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            match mode {
                Reflection::NegateArg => c * sign,
                Reflection::ConjArg => c.conj(),
                Reflection::ConjNegateArg => c.conj() * sign,
            }
        })
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Values at the `m` equispaced points `r e^{2 pi i j / m}`, `j = 0..m-1`.
    pub fn evaluate_on_circle(&self, r: f64, m: usize) -> Vec<Complex64> {
        assert!(m >= 8, "need at least 8 circle samples");
        (0..m).map(|j| self.evaluate(circle_point(r, j, m))).collect()
    }
}

/// The sample point `r e^{2 pi i j / m}`.
pub fn circle_point(r: f64, j: usize, m: usize) -> Complex64 {
    let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
    Complex64::from_polar(r, theta)
}
