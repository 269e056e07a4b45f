//! Structural operators: weighted tuple combination, n-ply symmetrization,
//! point-symmetry part extractors, Alexander transforms, and the generalized
//! Koebe series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{ComplexSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("tuple needs at least one member")]
    EmptyTuple,
    #[error("tuple has {members} members but {weights} weights")]
    WeightCount { members: usize, weights: usize },
    #[error("weight at position {0} is negative or not finite")]
    InvalidWeight(usize),
    #[error("weights sum to {0}, expected 1 within 1e-12")]
    WeightSum(f64),
    #[error("member {0} is not normalized (c_0 = 0, c_1 = 1)")]
    NotNormalized(usize),
    #[error("member orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("projection modulus must be at least 1")]
    ZeroModulus,
    #[error("koebe parameter must satisfy alpha < 1, got {0}")]
    KoebeAlpha(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Which point-symmetry part of an n-ply series a class denominator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartKind {
    /// The n-ply series itself.
    Plain,
    /// `(F_n(z) - F_n(-z))/2`: keeps odd-index coefficients.
    Symmetric,
    /// `(F_n(z) + conj F_n(conj z))/2`: real parts of all coefficients.
    Conjugate,
    /// `(F_n(z) - conj F_n(-conj z))/2`: real parts at odd indices,
    /// imaginary parts (times i) at even indices.
    SymmetricConjugate,
}

impl PartKind {
    pub const ALL: [PartKind; 4] = [
        PartKind::Plain,
        PartKind::Symmetric,
        PartKind::Conjugate,
        PartKind::SymmetricConjugate,
    ];

    /// Conjugate-type parts are only meaningful against targets symmetric in
    /// the real axis.
    pub fn needs_real_symmetric_target(self) -> bool {
        matches!(self, PartKind::Conjugate | PartKind::SymmetricConjugate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlexanderDirection {
    /// `f -> z f'` (convex-type to starlike-type).
    Forward,
    /// `f -> integral f(t)/t dt` (starlike-type to convex-type).
    Inverse,
}

/// An element of the class `A^m`: `m` normalized series with convex weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TupleRepr", into = "TupleRepr")]
pub struct TupleSystem {
    members: Vec<ComplexSeries>,
    weights: Vec<f64>,
}

/// Wire form of a tuple: `{"weights": [...], "members": [<series>, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TupleRepr {
    weights: Vec<f64>,
    members: Vec<ComplexSeries>,
}

impl TryFrom<TupleRepr> for TupleSystem {
    type Error = OperatorError;

    fn try_from(repr: TupleRepr) -> Result<Self, OperatorError> {
        TupleSystem::new(repr.members, repr.weights)
    }
}

impl From<TupleSystem> for TupleRepr {
    fn from(t: TupleSystem) -> TupleRepr {
        TupleRepr { weights: t.weights, members: t.members }
    }
}

impl TupleSystem {
    /// Validates the class-A^m invariants: at least one member, all members
    /// normalized and of one order, weights non-negative summing to 1.
    pub fn new(members: Vec<ComplexSeries>, weights: Vec<f64>) -> Result<Self, OperatorError> {
        if members.is_empty() {
            return Err(OperatorError::EmptyTuple);
        }
        if members.len() != weights.len() {
            return Err(OperatorError::WeightCount {
                members: members.len(),
                weights: weights.len(),
            });
        }
        let order = members[0].order();
        for (k, f) in members.iter().enumerate() {
            if f.order() != order {
                return Err(OperatorError::OrderMismatch(order, f.order()));
            }
            if !f.is_normalized() {
                return Err(OperatorError::NotNormalized(k));
            }
        }
        let mut sum = 0.0;
        for (k, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(OperatorError::InvalidWeight(k));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(OperatorError::WeightSum(sum));
        }
        Ok(TupleSystem { members, weights })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn order(&self) -> usize {
        self.members[0].order()
    }

    pub fn members(&self) -> &[ComplexSeries] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_real(&self) -> bool {
        self.members.iter().all(|f| f.is_real())
    }

    /// Rebuilds the tuple with each member replaced by `map(member)`.
    /// The result is re-validated.
    pub fn map_members(
        &self,
        mut map: impl FnMut(&ComplexSeries) -> Result<ComplexSeries, OperatorError>,
    ) -> Result<TupleSystem, OperatorError> {
        let members = self
            .members
            .iter()
            .map(|f| map(f))
            .collect::<Result<Vec<_>, _>>()?;
        TupleSystem::new(members, self.weights.clone())
    }
}

/// The weighted combination `F = sum_k alpha_k f_k`.
pub fn build_f(t: &TupleSystem) -> ComplexSeries {
    let terms: Vec<(f64, &ComplexSeries)> = t
        .weights()
        .iter()
        .copied()
        .zip(t.members())
        .collect();
    ComplexSeries::linear_combine(&terms).expect("validated tuple")
}

/// The n-ply points function `F_n`: projection of `F` onto Taylor indices
/// `k = 1 (mod n)`; satisfies `F_n(eps^j z) = eps^j F_n(z)`.
pub fn nply(f: &ComplexSeries, n: usize) -> Result<ComplexSeries, OperatorError> {
    if n == 0 {
        return Err(OperatorError::ZeroModulus);
    }
    Ok(f.project_residue(n, false))
}

/// Extracts the point-symmetry part of an n-ply series by coefficient rules.
pub fn part(f_n: &ComplexSeries, kind: PartKind) -> ComplexSeries {
    match kind {
        PartKind::Plain => f_n.clone(),
        PartKind::Symmetric => ComplexSeries::from_fn(f_n.order(), |k| {
            if k % 2 == 1 { f_n.coeff(k) } else { Complex64::ZERO }
        }),
        PartKind::Conjugate => {
            ComplexSeries::from_fn(f_n.order(), |k| Complex64::new(f_n.coeff(k).re, 0.0))
        }
        PartKind::SymmetricConjugate => ComplexSeries::from_fn(f_n.order(), |k| {
            let c = f_n.coeff(k);
            if k % 2 == 1 {
                Complex64::new(c.re, 0.0)
            } else {
                Complex64::new(0.0, c.im)
            }
        }),
    }
}

/// The Alexander transform linking convex-type and starlike-type classes.
pub fn alexander(f: &ComplexSeries, direction: AlexanderDirection) -> Result<ComplexSeries, OperatorError> {
    match direction {
        AlexanderDirection::Forward => Ok(f.z_derivative()),
        AlexanderDirection::Inverse => Ok(f.integrate_div_z()?),
    }
}

/// The generalized Koebe series `z/(1-z)^{2-2 alpha}` with coefficients
/// `c_k = (2-2 alpha)_{k-1} / (k-1)!`, built by the rising-factorial
/// recurrence `c_{k+1} = c_k (2 - 2 alpha + k - 1) / k`.
pub fn koebe(alpha: f64, order: usize) -> Result<ComplexSeries, OperatorError> {
    if !alpha.is_finite() || alpha >= 1.0 {
        return Err(OperatorError::KoebeAlpha(alpha));
    }
    let beta = 2.0 - 2.0 * alpha;
    let mut coeffs = vec![Complex64::ZERO; order + 1];
    let mut c = 1.0;
    coeffs[1] = Complex64::ONE;
    for k in 1..order {
        // multiply before dividing: keeps the integer coefficients of the
        // classical case (beta = 2) exact
        c = c * (beta + (k - 1) as f64) / k as f64;
        coeffs[k + 1] = Complex64::new(c, 0.0);
    }
    Ok(ComplexSeries::new(coeffs)?)
}
