//! Membership predicates for the starlike/convex point-symmetry classes and
//! the prestarlike class, decided by signed subordination margins of formal
//! quotient series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{self, AlexanderDirection, OperatorError, PartKind, TupleSystem};
use crate::series::{circle_point, ComplexSeries, SeriesError, DEFAULT_ORDER};
use crate::targets::{ConvexTarget, TargetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("class {0} has no tuple membership predicate")]
    NotATupleClass(ClassId),
    #[error("class {0} requires a target symmetric in the real axis")]
    TargetNotRealSymmetric(ClassId),
    #[error("convolution kernel g must be normalized (c_0 = 0, c_1 = 1)")]
    KernelNotNormalized,
    #[error("kernel order {kernel} does not match tuple order {tuple}")]
    KernelOrderMismatch { kernel: usize, tuple: usize },
    #[error("quotient numerator and denominator must both vanish at 0 or both not")]
    QuotientPrecondition,
    #[error("denominator leading coefficient vanishes at index {0}")]
    DegenerateDenominator(usize),
    #[error("quotient at 0 is {0}, expected 1 within 1e-10")]
    QuotientNotUnitAtZero(Complex64),
    #[error("series must be normalized (c_0 = 0, c_1 = 1)")]
    NotNormalized,
    #[error("prestarlike order must satisfy alpha <= 1, got {0}")]
    PrestarlikeAlpha(f64),
    #[error("probe radius {0} must lie in (0, 1)")]
    ProbeRadius(f64),
    #[error("probe needs at least 8 samples per circle, got {0}")]
    ProbeSamples(usize),
    #[error("probe needs at least one radius")]
    NoProbeRadii,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Target(#[from] TargetError),
}

/// Identifier of a function class tested by this toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassId {
    #[serde(rename = "ST_nm")]
    StNm,
    #[serde(rename = "CV_nm")]
    CvNm,
    #[serde(rename = "STS_nm")]
    StsNm,
    #[serde(rename = "CVS_nm")]
    CvsNm,
    #[serde(rename = "STC_nm")]
    StcNm,
    #[serde(rename = "CVC_nm")]
    CvcNm,
    #[serde(rename = "STSC_nm")]
    StscNm,
    #[serde(rename = "CVSC_nm")]
    CvscNm,
    #[serde(rename = "prestarlike")]
    Prestarlike,
    #[serde(rename = "close_to_convex")]
    CloseToConvex,
}

impl ClassId {
    pub const ALL: [ClassId; 10] = [
        ClassId::StNm,
        ClassId::CvNm,
        ClassId::StsNm,
        ClassId::CvsNm,
        ClassId::StcNm,
        ClassId::CvcNm,
        ClassId::StscNm,
        ClassId::CvscNm,
        ClassId::Prestarlike,
        ClassId::CloseToConvex,
    ];

    /// The eight classes decided by [`membership`].
    pub const TUPLE_CLASSES: [ClassId; 8] = [
        ClassId::StNm,
        ClassId::CvNm,
        ClassId::StsNm,
        ClassId::CvsNm,
        ClassId::StcNm,
        ClassId::CvcNm,
        ClassId::StscNm,
        ClassId::CvscNm,
    ];

    /// The denominator part extractor for a tuple class.
    pub fn part_kind(self) -> Option<PartKind> {
        match self {
            ClassId::StNm | ClassId::CvNm => Some(PartKind::Plain),
            ClassId::StsNm | ClassId::CvsNm => Some(PartKind::Symmetric),
            ClassId::StcNm | ClassId::CvcNm => Some(PartKind::Conjugate),
            ClassId::StscNm | ClassId::CvscNm => Some(PartKind::SymmetricConjugate),
            ClassId::Prestarlike | ClassId::CloseToConvex => None,
        }
    }

    /// Convex-type classes test `(z f')' / denominator'`; they reduce to the
    /// starlike-type test of the componentwise `z f'` tuple.
    pub fn is_convex_family(self) -> bool {
        matches!(self, ClassId::CvNm | ClassId::CvsNm | ClassId::CvcNm | ClassId::CvscNm)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassId::StNm => "ST_nm",
            ClassId::CvNm => "CV_nm",
            ClassId::StsNm => "STS_nm",
            ClassId::CvsNm => "CVS_nm",
            ClassId::StcNm => "STC_nm",
            ClassId::CvcNm => "CVC_nm",
            ClassId::StscNm => "STSC_nm",
            ClassId::CvscNm => "CVSC_nm",
            ClassId::Prestarlike => "prestarlike",
            ClassId::CloseToConvex => "close_to_convex",
        }
    }
}

impl std::fmt::Display for ClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ClassId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown class id {s:?}"))
    }
}

/// Where and how finely the subordination quotients are probed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    /// Truncation order used when the caller materializes series.
    pub order: usize,
    /// Probe circle radii, strictly inside the unit disc.
    pub radii: Vec<f64>,
    /// Samples per probe circle.
    pub samples: usize,
    /// Three-valued verdict tolerance.
    pub tol_accept: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            order: DEFAULT_ORDER,
            radii: vec![0.5, 0.8, 0.95],
            samples: 720,
            tol_accept: 1e-8,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<(), ClassError> {
        if self.radii.is_empty() {
            return Err(ClassError::NoProbeRadii);
        }
        for &r in &self.radii {
            if !r.is_finite() || r <= 0.0 || r >= 1.0 {
                return Err(ClassError::ProbeRadius(r));
            }
        }
        if self.samples < 8 {
            return Err(ClassError::ProbeSamples(self.samples));
        }
        Ok(())
    }
}

/// Outcome of one class test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Member,
    NonMember,
    Boundary,
}

/// Signed subordination margin and the sample attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub class_id: ClassId,
    pub margin: f64,
    #[serde(with = "crate::complex_pair")]
    pub worst_z: Complex64,
    #[serde(with = "crate::complex_pair")]
    pub worst_value: Complex64,
    pub decided: Decision,
}

impl MembershipVerdict {
    fn from_scan(class_id: ClassId, scan: MarginScan, tol_accept: f64) -> Self {
        let decided = if scan.margin > tol_accept {
            Decision::Member
        } else if scan.margin < -tol_accept {
            Decision::NonMember
        } else {
            Decision::Boundary
        };
        MembershipVerdict {
            class_id,
            margin: scan.margin,
            worst_z: scan.worst_z,
            worst_value: scan.worst_value,
            decided,
        }
    }
}

/// Minimum observed margin over a probe grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MarginScan {
    pub margin: f64,
    pub worst_z: Complex64,
    pub worst_value: Complex64,
}

impl MarginScan {
    fn empty() -> Self {
        MarginScan {
            margin: f64::INFINITY,
            worst_z: Complex64::ZERO,
            worst_value: Complex64::ZERO,
        }
    }

    fn merge(&mut self, other: MarginScan) {
        if other.margin < self.margin {
            *self = other;
        }
    }
}

/// Scans a quotient series over the probe circles against a margin function.
fn scan_values(
    q: &ComplexSeries,
    cfg: &ProbeConfig,
    mut margin_of: impl FnMut(Complex64) -> f64,
) -> MarginScan {
    let mut scan = MarginScan::empty();
    for &r in &cfg.radii {
        for j in 0..cfg.samples {
            let z = circle_point(r, j, cfg.samples);
            let v = q.evaluate(z);
            let m = margin_of(v);
            if m < scan.margin {
                scan = MarginScan { margin: m, worst_z: z, worst_value: v };
            }
        }
    }
    scan
}

fn scan_against_target(q: &ComplexSeries, h: &ConvexTarget, cfg: &ProbeConfig) -> MarginScan {
    scan_values(q, cfg, |v| h.margin(v))
}

fn check_unit_at_zero(q: &ComplexSeries) -> Result<(), ClassError> {
    let q0 = q.coeff(0);
    if (q0 - Complex64::ONE).norm() > 1e-10 {
        return Err(ClassError::QuotientNotUnitAtZero(q0));
    }
    Ok(())
}

/// Formal power-series quotient `q` with `q * den = num` through the shared
/// truncation order.
///
/// Starlike-type quotients have `num(0) = den(0) = 0` with `den_1 != 0`; the
/// shared zero at the origin is removed exactly and the top coefficient of
/// `q` is zero (it is not determined by order-N data). Convex-type quotients
/// have `den(0) != 0` and are determined through the full order.
pub fn quotient_series(num: &ComplexSeries, den: &ComplexSeries) -> Result<ComplexSeries, ClassError> {
    if num.order() != den.order() {
        return Err(ClassError::Series(SeriesError::OrderMismatch(
            num.order(),
            den.order(),
        )));
    }
    let n = num.order();
    if den.coeff(0) == Complex64::ZERO {
        if num.coeff(0) != Complex64::ZERO {
            return Err(ClassError::QuotientPrecondition);
        }
        if den.coeff(1) == Complex64::ZERO {
            return Err(ClassError::DegenerateDenominator(1));
        }
        let mut q = vec![Complex64::ZERO; n + 1];
        // divide the shifted series a_k = num_{k+1}, b_k = den_{k+1}
        for k in 0..n {
            let mut acc = num.coeff(k + 1);
            for j in 0..k {
                acc -= q[j] * den.coeff(k - j + 1);
            }
            q[k] = acc / den.coeff(1);
        }
        Ok(ComplexSeries::new(q)?)
    } else {
        let mut q = vec![Complex64::ZERO; n + 1];
        for k in 0..=n {
            let mut acc = num.coeff(k);
            for j in 0..k {
                acc -= q[j] * den.coeff(k - j);
            }
            q[k] = acc / den.coeff(0);
        }
        Ok(ComplexSeries::new(q)?)
    }
}

/// The per-component formal quotient series of a tuple class: for
/// starlike-type classes `z f_k' / part(F_n)`, and for convex-type classes
/// the same quotient on the componentwise `z f'` tuple (the two agree as
/// formal series after multiplying numerator and denominator by `z`).
///
/// When `g` is given, each member is first replaced by `f_k * g` (Hadamard).
pub fn class_quotients(
    t: &TupleSystem,
    n: usize,
    class_id: ClassId,
    g: Option<&ComplexSeries>,
) -> Result<Vec<ComplexSeries>, ClassError> {
    let kind = class_id.part_kind().ok_or(ClassError::NotATupleClass(class_id))?;
    let mut tuple = t.clone();
    if let Some(g) = g {
        if g.order() != t.order() {
            return Err(ClassError::KernelOrderMismatch { kernel: g.order(), tuple: t.order() });
        }
        if !g.is_normalized() {
            return Err(ClassError::KernelNotNormalized);
        }
        tuple = tuple.map_members(|f| Ok(f.hadamard(g)))?;
    }
    if class_id.is_convex_family() {
        tuple = tuple.map_members(|f| Ok(f.z_derivative()))?;
    }
    let f_series = operators::build_f(&tuple);
    let f_n = operators::nply(&f_series, n)?;
    let den = operators::part(&f_n, kind);
    tuple
        .members()
        .iter()
        .map(|f| quotient_series(&f.z_derivative(), &den))
        .collect()
}

/// Decides membership of a tuple in one of the eight subordination classes.
pub fn membership(
    t: &TupleSystem,
    n: usize,
    class_id: ClassId,
    h: &ConvexTarget,
    g: Option<&ComplexSeries>,
    cfg: &ProbeConfig,
) -> Result<MembershipVerdict, ClassError> {
    cfg.validate()?;
    if let Some(kind) = class_id.part_kind() {
        if kind.needs_real_symmetric_target() && !h.real_symmetric() {
            return Err(ClassError::TargetNotRealSymmetric(class_id));
        }
    }
    let quotients = class_quotients(t, n, class_id, g)?;
    let mut scan = MarginScan::empty();
    for q in &quotients {
        check_unit_at_zero(q)?;
        scan.merge(scan_against_target(q, h, cfg));
    }
    Ok(MembershipVerdict::from_scan(class_id, scan, cfg.tol_accept))
}

/// Classical `ST(h)` test of a single normalized function: `z f'/f < h`.
pub fn st_check(
    f: &ComplexSeries,
    h: &ConvexTarget,
    cfg: &ProbeConfig,
) -> Result<MembershipVerdict, ClassError> {
    cfg.validate()?;
    if !f.is_normalized() {
        return Err(ClassError::NotNormalized);
    }
    let q = quotient_series(&f.z_derivative(), f)?;
    check_unit_at_zero(&q)?;
    let scan = scan_against_target(&q, h, cfg);
    Ok(MembershipVerdict::from_scan(ClassId::StNm, scan, cfg.tol_accept))
}

/// Prestarlike test: for `alpha < 1`, `f * k_alpha` must be starlike of
/// order `alpha`; for `alpha = 1`, `Re(f(z)/z) > 1/2`.
pub fn prestarlike_test(
    phi: &ComplexSeries,
    alpha: f64,
    cfg: &ProbeConfig,
) -> Result<MembershipVerdict, ClassError> {
    cfg.validate()?;
    if !phi.is_normalized() {
        return Err(ClassError::NotNormalized);
    }
    if !alpha.is_finite() || alpha > 1.0 {
        return Err(ClassError::PrestarlikeAlpha(alpha));
    }
    if alpha == 1.0 {
        let shifted = ComplexSeries::from_fn(phi.order(), |k| phi.coeff(k + 1));
        check_unit_at_zero(&shifted)?;
        let scan = scan_values(&shifted, cfg, |v| v.re - 0.5);
        return Ok(MembershipVerdict::from_scan(ClassId::Prestarlike, scan, cfg.tol_accept));
    }
    let kernel = operators::koebe(alpha, phi.order())?;
    let s = phi.hadamard(&kernel);
    let target = if alpha >= 0.0 {
        ConvexTarget::half_plane(alpha)?
    } else {
        // orders below 0 still test Re > alpha; the half-plane constructor
        // only covers [0, 1), so scan directly
        let q = quotient_series(&s.z_derivative(), &s)?;
        check_unit_at_zero(&q)?;
        let scan = scan_values(&q, cfg, |v| v.re - alpha);
        return Ok(MembershipVerdict::from_scan(ClassId::Prestarlike, scan, cfg.tol_accept));
    };
    let q = quotient_series(&s.z_derivative(), &s)?;
    check_unit_at_zero(&q)?;
    let scan = scan_against_target(&q, &target, cfg);
    Ok(MembershipVerdict::from_scan(ClassId::Prestarlike, scan, cfg.tol_accept))
}

/// Close-to-convexity with an explicit starlike witness: checks both that the
/// witness lies in `ST(h_w)` and that `Re(z f' / witness) > 0` on the probe
/// grid; the margin is the smaller of the two.
pub fn close_to_convex_check(
    f: &ComplexSeries,
    witness: &ComplexSeries,
    h_w: &ConvexTarget,
    cfg: &ProbeConfig,
) -> Result<MembershipVerdict, ClassError> {
    cfg.validate()?;
    if !witness.is_normalized() {
        return Err(ClassError::NotNormalized);
    }
    let witness_verdict = st_check(witness, h_w, cfg)?;
    let q = quotient_series(&f.z_derivative(), witness)?;
    check_unit_at_zero(&q)?;
    let mut scan = scan_values(&q, cfg, |v| v.re);
    scan.merge(MarginScan {
        margin: witness_verdict.margin,
        worst_z: witness_verdict.worst_z,
        worst_value: witness_verdict.worst_value,
    });
    Ok(MembershipVerdict::from_scan(ClassId::CloseToConvex, scan, cfg.tol_accept))
}

/// Componentwise Alexander transform of a tuple.
pub fn alexander_tuple(t: &TupleSystem, direction: AlexanderDirection) -> Result<TupleSystem, ClassError> {
    Ok(t.map_members(|f| operators::alexander(f, direction))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::koebe;

    fn series(coeffs: &[(f64, f64)]) -> ComplexSeries {
        ComplexSeries::new(coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap()
    }

    fn close(a: &ComplexSeries, b: &ComplexSeries, tol: f64) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn h(alpha: f64) -> ConvexTarget {
        ConvexTarget::half_plane(alpha).unwrap()
    }

    fn single(f: &ComplexSeries) -> TupleSystem {
        TupleSystem::new(vec![f.clone()], vec![1.0]).unwrap()
    }

    #[test]
    fn quotient_examples() {
        let f = series(&[(0.0, 0.0), (1.0, 0.0), (0.5, -0.3), (0.2, 0.1)]);
        let q = quotient_series(&f, &f).unwrap();
        assert!(close(&q.resized(2), &ComplexSeries::one(2), 1e-14));

        // z k_0' / k_0 = h_0 = (1+z)/(1-z), binomial oracle
        let k0 = koebe(0.0, 32).unwrap();
        let q = quotient_series(&k0.z_derivative(), &k0).unwrap();
        for k in 0..32 {
            let expect = if k == 0 { 1.0 } else { 2.0 };
            assert!((q.coeff(k) - Complex64::new(expect, 0.0)).norm() < 1e-10, "index {k}");
        }

        // long-division oracle: (z + 2z^2)/(z + z^2) = 1 + z - z^2 + z^3 - ...
        let num = series(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let den = series(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let q = quotient_series(&num, &den).unwrap();
        let expect = [1.0, 1.0, -1.0, 1.0, -1.0, 1.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((q.coeff(k).re - e).abs() < 1e-14, "index {k}");
        }
    }

    #[test]
    fn quotient_error_paths() {
        let f = series(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let zero_lead = series(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(
            quotient_series(&f, &zero_lead),
            Err(ClassError::DegenerateDenominator(1))
        ));
        let c = ComplexSeries::one(2);
        assert!(matches!(quotient_series(&c, &f), Err(ClassError::QuotientPrecondition)));
    }

    #[test]
    fn quotient_convex_branch() {
        // num and den with nonzero constant terms divide through full order
        let num = series(&[(1.0, 0.0), (1.8, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let den = series(&[(1.0, 0.0), (0.9, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let q = quotient_series(&num, &den).unwrap();
        // (1 + 1.8z)/(1 + 0.9z) = 1 + 0.9z - 0.81z^2 + 0.729z^3 - ...
        assert!((q.coeff(1).re - 0.9).abs() < 1e-14);
        assert!((q.coeff(2).re + 0.81).abs() < 1e-14);
        assert!((q.coeff(3).re - 0.729).abs() < 1e-14);
    }

    #[test]
    fn membership_identity_function() {
        // f = z: quotient is constant 1, margin 1 - alpha
        let z = ComplexSeries::identity(DEFAULT_ORDER);
        for &alpha in &[0.0, 0.25, 0.5] {
            let v = membership(&single(&z), 1, ClassId::StNm, &h(alpha), None, &ProbeConfig::default())
                .unwrap();
            assert!((v.margin - (1.0 - alpha)).abs() < 1e-12);
            assert_eq!(v.decided, Decision::Member);
        }
    }

    #[test]
    fn membership_koebe_margin_matches_closed_form() {
        // quotient of k_0 is h_0 itself; at r = 0.95 the margin approaches
        // Re h_0(-0.95) = (1-0.95)/(1+0.95) as the order grows
        let k0 = koebe(0.0, 256).unwrap();
        let v = membership(&single(&k0), 1, ClassId::StNm, &h(0.0), None, &ProbeConfig {
            order: 256,
            ..ProbeConfig::default()
        })
        .unwrap();
        let closed = (1.0 - 0.95) / (1.0 + 0.95);
        assert!((v.margin - closed).abs() < 1e-4, "margin {} vs {}", v.margin, closed);
        assert_eq!(v.decided, Decision::Member);

        // the extremal function sits within the truncation band of the
        // boundary at the default desk order: the margin is small either way
        let k0 = koebe(0.0, DEFAULT_ORDER).unwrap();
        let v = membership(&single(&k0), 1, ClassId::StNm, &h(0.0), None, &ProbeConfig::default())
            .unwrap();
        assert!(v.margin.abs() < 0.05, "margin {}", v.margin);
    }

    #[test]
    fn membership_negative_control() {
        // z + 0.9 z^2: quotient (1 + 1.8z)/(1 + 0.9z) has Re < 0 at z = -0.95
        let f = ComplexSeries::from_fn(DEFAULT_ORDER, |k| match k {
            1 => Complex64::ONE,
            2 => Complex64::new(0.9, 0.0),
            _ => Complex64::ZERO,
        });
        let v = membership(&single(&f), 1, ClassId::StNm, &h(0.0), None, &ProbeConfig::default())
            .unwrap();
        assert!(v.margin < -0.5, "margin {}", v.margin);
        assert_eq!(v.decided, Decision::NonMember);
        // the closed-form minimum: (1 - 1.71)/(1 - 0.855); the quotient tail
        // contributes ~3e-4 at this order
        let expect = (1.0 - 1.71) / (1.0 - 0.855);
        assert!((v.margin - expect).abs() < 1e-3, "margin {}", v.margin);
        assert!((v.worst_z - Complex64::new(-0.95, 0.0)).norm() < 0.02);
    }

    #[test]
    fn conjugate_class_needs_symmetric_target() {
        let z = ComplexSeries::identity(16);
        // a slightly perturbed disc with complex coefficients: convex but not
        // symmetric in the real axis
        let skew = ComplexSeries::from_fn(16, |k| match k {
            0 => Complex64::ONE,
            1 => Complex64::new(0.0, 0.5),
            2 => Complex64::new(0.02, 0.01),
            _ => Complex64::ZERO,
        });
        let target = ConvexTarget::sampled(skew, 0.9, 256).unwrap();
        assert!(!target.real_symmetric());
        let err = membership(&single(&z.resized(16)), 1, ClassId::StcNm, &target, None, &ProbeConfig::default());
        assert!(matches!(err, Err(ClassError::TargetNotRealSymmetric(_))));
    }

    #[test]
    fn real_tuples_collapse_conjugate_classes() {
        // for real coefficients the conjugate part is the identity, so STC
        // margins equal ST margins exactly, and STSC equals STS
        let f = ComplexSeries::from_fn(32, |k| match k {
            1 => Complex64::ONE,
            2 => Complex64::new(0.21, 0.0),
            3 => Complex64::new(-0.07, 0.0),
            _ => Complex64::ZERO,
        });
        let g = ComplexSeries::from_fn(32, |k| match k {
            1 => Complex64::ONE,
            3 => Complex64::new(0.12, 0.0),
            _ => Complex64::ZERO,
        });
        let t = TupleSystem::new(vec![f, g], vec![0.4, 0.6]).unwrap();
        let cfg = ProbeConfig::default();
        for n in 1..=3 {
            let st = membership(&t, n, ClassId::StNm, &h(0.0), None, &cfg).unwrap();
            let stc = membership(&t, n, ClassId::StcNm, &h(0.0), None, &cfg).unwrap();
            assert_eq!(st.margin, stc.margin);
            let sts = membership(&t, n, ClassId::StsNm, &h(0.0), None, &cfg).unwrap();
            let stsc = membership(&t, n, ClassId::StscNm, &h(0.0), None, &cfg).unwrap();
            assert_eq!(sts.margin, stsc.margin);
        }
    }

    #[test]
    fn geometric_kernel_reduction_is_exact() {
        // convolving with z/(1-z) is the identity, so quotients agree
        // coefficient-exactly with the kernel-free ones
        let f = series(&[(0.0, 0.0), (1.0, 0.0), (0.3, 0.2), (-0.1, 0.05), (0.0, 0.0)]);
        let t = single(&f);
        let geo = ComplexSeries::geometric(4);
        for class in [ClassId::StNm, ClassId::CvNm, ClassId::StsNm] {
            let plain = class_quotients(&t, 2, class, None).unwrap();
            let with_g = class_quotients(&t, 2, class, Some(&geo)).unwrap();
            for (a, b) in plain.iter().zip(&with_g) {
                assert!(close(a, b, 0.0));
            }
        }
    }

    #[test]
    fn theta_kernel_turns_st_into_cv() {
        // ST_nm(z/(1-z)^2, h) = CV_nm(h): the Koebe kernel is the theta kernel
        let f = series(&[(0.0, 0.0), (1.0, 0.0), (0.15, 0.1), (0.08, -0.12), (0.0, 0.0)]);
        let t = single(&f);
        let theta_kernel = koebe(0.0, 4).unwrap();
        let st_side = class_quotients(&t, 2, ClassId::StNm, Some(&theta_kernel)).unwrap();
        let cv_side = class_quotients(&t, 2, ClassId::CvNm, None).unwrap();
        for (a, b) in st_side.iter().zip(&cv_side) {
            assert!(close(a, b, 0.0));
        }
    }

    #[test]
    fn alexander_links_cv_and_st_margins() {
        let f = series(&[(0.0, 0.0), (1.0, 0.0), (0.1, 0.05), (0.02, -0.03), (0.0, 0.0)]);
        let g = series(&[(0.0, 0.0), (1.0, 0.0), (-0.04, 0.08), (0.05, 0.0), (0.01, 0.0)]);
        let t = TupleSystem::new(vec![f, g], vec![0.5, 0.5]).unwrap();
        let forward = alexander_tuple(&t, AlexanderDirection::Forward).unwrap();
        let cfg = ProbeConfig::default();
        for (cv_class, st_class) in [
            (ClassId::CvNm, ClassId::StNm),
            (ClassId::CvsNm, ClassId::StsNm),
        ] {
            let cv = membership(&t, 2, cv_class, &h(0.25), None, &cfg).unwrap();
            let st = membership(&forward, 2, st_class, &h(0.25), None, &cfg).unwrap();
            assert!((cv.margin - st.margin).abs() < 1e-10);
        }
    }

    #[test]
    fn single_member_reduces_to_classical_quotient() {
        let f = series(&[(0.0, 0.0), (1.0, 0.0), (0.2, 0.3), (-0.15, 0.0), (0.04, 0.02)]);
        let qs = class_quotients(&single(&f), 1, ClassId::StNm, None).unwrap();
        let classical = quotient_series(&f.z_derivative(), &f).unwrap();
        assert!(close(&qs[0], &classical, 0.0));
    }

    #[test]
    fn prestarlike_examples() {
        let cfg = ProbeConfig::default();

        // z/(1-z) is convex, hence prestarlike of order 0; its margin matches
        // the h_0(-r) closed form at high order
        let geo = ComplexSeries::geometric(256);
        let v = prestarlike_test(&geo, 0.0, &cfg).unwrap();
        assert_eq!(v.decided, Decision::Member);
        let closed = (1.0 - 0.95) / (1.0 + 0.95);
        assert!((v.margin - closed).abs() < 1e-4, "margin {}", v.margin);

        // z is prestarlike of every order
        let z = ComplexSeries::identity(DEFAULT_ORDER);
        for &alpha in &[0.0, 0.5, 1.0] {
            let v = prestarlike_test(&z, alpha, &cfg).unwrap();
            assert_eq!(v.decided, Decision::Member, "alpha {alpha}");
        }
        let v1 = prestarlike_test(&z, 1.0, &cfg).unwrap();
        assert!((v1.margin - 0.5).abs() < 1e-12);

        // z + 0.3 z^2 is not prestarlike of order 0 (not convex)
        let f = ComplexSeries::from_fn(DEFAULT_ORDER, |k| match k {
            1 => Complex64::ONE,
            2 => Complex64::new(0.3, 0.0),
            _ => Complex64::ZERO,
        });
        let v = prestarlike_test(&f, 0.0, &cfg).unwrap();
        assert!(v.margin < -0.05, "margin {}", v.margin);
        assert_eq!(v.decided, Decision::NonMember);
        let expect = (1.0 - 1.14) / (1.0 - 0.57);
        assert!((v.margin - expect).abs() < 1e-6);
    }

    #[test]
    fn close_to_convex_examples() {
        let cfg = ProbeConfig::default();
        let z = ComplexSeries::identity(DEFAULT_ORDER);
        let v = close_to_convex_check(&z, &z, &h(0.0), &cfg).unwrap();
        assert!((v.margin - 1.0).abs() < 1e-12);

        // the extremal pair needs a higher order for the quotient partial
        // sums to settle on the member side at r = 0.95
        let k0 = koebe(0.0, 256).unwrap();
        let v = close_to_convex_check(&k0, &k0, &h(0.0), &cfg).unwrap();
        assert!(v.margin > 0.0);
        assert_eq!(v.decided, Decision::Member);

        let f = ComplexSeries::from_fn(DEFAULT_ORDER, |k| match k {
            1 => Complex64::ONE,
            2 => Complex64::new(0.9, 0.0),
            _ => Complex64::ZERO,
        });
        let v = close_to_convex_check(&f, &z, &h(0.0), &cfg).unwrap();
        assert!((v.margin - (1.0 - 1.8 * 0.95)).abs() < 1e-12, "margin {}", v.margin);
        assert_eq!(v.decided, Decision::NonMember);
    }

    #[test]
    fn verdict_serialization_shape() {
        let v = MembershipVerdict {
            class_id: ClassId::StNm,
            margin: 0.25,
            worst_z: Complex64::new(-0.95, 0.0),
            worst_value: Complex64::new(0.1, -0.2),
            decided: Decision::Member,
        };
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"class_id\":\"ST_nm\""));
        assert!(json.contains("\"worst_z\":[-0.95,0.0]"));
        assert!(json.contains("\"decided\":\"member\""));
        let back: MembershipVerdict = serde_json::from_str(&json).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn probe_config_validation() {
        let mut cfg = ProbeConfig::default();
        cfg.radii = vec![1.0];
        assert!(cfg.validate().is_err());
        cfg.radii = vec![0.5];
        cfg.samples = 4;
        assert!(cfg.validate().is_err());
    }
}
