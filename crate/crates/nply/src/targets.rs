//! Convex univalent target regions and signed containment margins.
//!
//! A target represents the convex univalent map `h` with `h(0) = 1` that the
//! subordination quotients are tested against. The half-plane variant covers
//! `h_alpha(z) = (1 + (1 - 2 alpha) z)/(1 - z)`; the sampled variant covers a
//! general convex `h` through a dense boundary polygon.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::ComplexSeries;

/// Boundary discretization cap for sampled targets; rejects inputs that would
/// force pathological allocations.
pub const MAX_BOUNDARY_SAMPLES: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TargetError {
    #[error("half-plane order must lie in [0, 1), got {0}")]
    AlphaRange(f64),
    #[error("sampling radius must lie in (0, 1), got {0}")]
    RhoRange(f64),
    #[error("boundary sample count must lie in [8, {MAX_BOUNDARY_SAMPLES}], got {0}")]
    SampleCount(usize),
    #[error("target must satisfy h(0) = 1, got {0}")]
    NotUnitAtOrigin(Complex64),
    #[error("boundary polygon is degenerate (fewer than 3 distinct vertices)")]
    DegeneratePolygon,
    #[error("boundary polygon is not convex (sign flip at vertex {0})")]
    NotConvex(usize),
    #[error("boundary polygon is not convex (total turning {0:.3} turns, expected 1)")]
    BadTurning(f64),
    #[error("boundary polygon does not wind once around h(0) (winding {0:.3})")]
    BadWinding(f64),
    #[error("unknown target spec {0:?}; expected halfplane:<alpha> or sampled:<path>")]
    BadSpecSyntax(String),
}

/// A convex polygon with counter-clockwise vertices and precomputed edge
/// frames, used both for sampled target boundaries and convex-hull margins.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Complex64>,
    // per edge: base vertex and unit direction
    edges: Vec<(Complex64, Complex64)>,
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

impl ConvexPolygon {
    /// Validates convexity (no negative turns beyond rounding) and builds the
    /// edge cache. Consecutive duplicate points are dropped.
    pub fn new(points: &[Complex64]) -> Result<Self, TargetError> {
        let mut vertices: Vec<Complex64> = Vec::with_capacity(points.len());
        for &p in points {
            if vertices.last().map_or(true, |&q| q != p) {
                vertices.push(p);
            }
        }
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(TargetError::DegeneratePolygon);
        }
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        let tol = 1e-12 * scale * scale;
        let m = vertices.len();
        let mut turning = 0.0;
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            let c = vertices[(i + 2) % m];
            let (e1, e2) = (b - a, c - b);
            if cross(e1, e2) < -tol {
                return Err(TargetError::NotConvex(i));
            }
            turning += (e2 * e1.conj()).arg();
        }
        // all-left-turn curves can still wrap the tangent twice; a convex
        // boundary turns through exactly one full revolution
        let turns = turning / (2.0 * std::f64::consts::PI);
        if (turns - 1.0).abs() > 1e-6 {
            return Err(TargetError::BadTurning(turns));
        }
        let edges = (0..m)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % m];
                (a, (b - a) / (b - a).norm())
            })
            .collect();
        Ok(ConvexPolygon { vertices, edges })
    }

    /// Convex hull of a point cloud (monotone chain), counter-clockwise.
    pub fn hull(points: &[Complex64]) -> Result<Self, TargetError> {
        let mut pts: Vec<Complex64> = points.to_vec();
        pts.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite points"));
        pts.dedup();
        if pts.len() < 3 {
            return Err(TargetError::DegeneratePolygon);
        }
        let mut lower: Vec<Complex64> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 1]) <= 0.0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Complex64> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 1]) <= 0.0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self::new(&lower)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    /// Signed distance from `w` to the region: the minimum over edges of the
    /// inward signed distance, positive inside. Exact for convex regions.
    pub fn signed_margin(&self, w: Complex64) -> f64 {
        self.edges
            .iter()
            .map(|&(a, dir)| cross(dir, w - a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Total turning of the polygon around `w`, in full turns.
    fn winding_around(&self, w: Complex64) -> f64 {
        let m = self.vertices.len();
        let mut total = 0.0;
        for i in 0..m {
            let a = self.vertices[i] - w;
            let b = self.vertices[(i + 1) % m] - w;
            total += (b * a.conj()).arg();
        }
        total / (2.0 * std::f64::consts::PI)
    }
}

/// The convex univalent target `h` with `h(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexTarget {
    HalfPlane {
        alpha: f64,
    },
    Sampled {
        series: ComplexSeries,
        rho: f64,
        samples: usize,
        polygon: ConvexPolygon,
        real_symmetric: bool,
    },
}

/// Wire form of a target:
/// `{"kind":"half_plane","alpha":0.25}` or
/// `{"kind":"sampled","series":<series>,"rho":0.999,"M":2048}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    HalfPlane { alpha: f64 },
    Sampled {
        series: ComplexSeries,
        rho: f64,
        #[serde(rename = "M")]
        samples: usize,
    },
}

impl TargetSpec {
    /// Builds the runtime target, validating every invariant.
    pub fn resolve(&self) -> Result<ConvexTarget, TargetError> {
        match self {
            TargetSpec::HalfPlane { alpha } => ConvexTarget::half_plane(*alpha),
            TargetSpec::Sampled { series, rho, samples } => {
                ConvexTarget::sampled(series.clone(), *rho, *samples)
            }
        }
    }
}

impl ConvexTarget {
    /// The half-plane target `h_alpha`, `0 <= alpha < 1`.
    pub fn half_plane(alpha: f64) -> Result<Self, TargetError> {
        if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
            return Err(TargetError::AlphaRange(alpha));
        }
        Ok(ConvexTarget::HalfPlane { alpha })
    }

    /// A sampled target from the truncated series of `h`, discretized as the
    /// boundary polygon `h(rho e^{i theta_j})`, `j = 0..M-1`.
    pub fn sampled(series: ComplexSeries, rho: f64, samples: usize) -> Result<Self, TargetError> {
        if !rho.is_finite() || !(0.0..1.0).contains(&rho) || rho == 0.0 {
            return Err(TargetError::RhoRange(rho));
        }
        if !(8..=MAX_BOUNDARY_SAMPLES).contains(&samples) {
            return Err(TargetError::SampleCount(samples));
        }
        let origin = series.coeff(0);
        if (origin - Complex64::ONE).norm() > 1e-9 {
            return Err(TargetError::NotUnitAtOrigin(origin));
        }
        let boundary = series.evaluate_on_circle(rho, samples);
        let polygon = ConvexPolygon::new(&boundary)?;
        let winding = polygon.winding_around(origin);
        if (winding - 1.0).abs() > 1e-6 {
            return Err(TargetError::BadWinding(winding));
        }
        let real_symmetric = series.is_real();
        Ok(ConvexTarget::Sampled { series, rho, samples, polygon, real_symmetric })
    }

    /// Whether `h(conj z) = conj(h(z))`.
    pub fn real_symmetric(&self) -> bool {
        match self {
            ConvexTarget::HalfPlane { .. } => true,
            ConvexTarget::Sampled { real_symmetric, .. } => *real_symmetric,
        }
    }

    /// Signed containment margin of `w` in `h(D)`: positive inside.
    ///
    /// Half-plane: `Re(w) - alpha`. Sampled: inward signed distance to the
    /// boundary polygon.
    pub fn margin(&self, w: Complex64) -> f64 {
        match self {
            ConvexTarget::HalfPlane { alpha } => w.re - alpha,
            ConvexTarget::Sampled { polygon, .. } => polygon.signed_margin(w),
        }
    }

    /// Taylor series of `h` truncated at the given order. For `h_alpha`:
    /// `c_0 = 1`, `c_k = 2 (1 - alpha)` for `k >= 1`.
    pub fn series_of(&self, order: usize) -> ComplexSeries {
        match self {
            ConvexTarget::HalfPlane { alpha } => ComplexSeries::from_fn(order, |k| {
                if k == 0 {
                    Complex64::ONE
                } else {
                    Complex64::new(2.0 * (1.0 - alpha), 0.0)
                }
            }),
            ConvexTarget::Sampled { series, .. } => series.resized(order),
        }
    }

    /// The wire-format spec this target was built from.
    pub fn spec(&self) -> TargetSpec {
        match self {
            ConvexTarget::HalfPlane { alpha } => TargetSpec::HalfPlane { alpha: *alpha },
            ConvexTarget::Sampled { series, rho, samples, .. } => TargetSpec::Sampled {
                series: series.clone(),
                rho: *rho,
                samples: *samples,
            },
        }
    }
}

/// Parses the command-line target mini-grammar: `halfplane:<alpha>` or
/// `sampled:<path>`. Path resolution is left to the caller.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetArg {
    HalfPlane(f64),
    SampledFromFile(String),
}

pub fn parse_target_arg(spec: &str) -> Result<TargetArg, TargetError> {
    if let Some(rest) = spec.strip_prefix("halfplane:") {
        let alpha: f64 = rest
            .parse()
            .map_err(|_| TargetError::BadSpecSyntax(spec.to_string()))?;
        if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
            return Err(TargetError::AlphaRange(alpha));
        }
        Ok(TargetArg::HalfPlane(alpha))
    } else if let Some(path) = spec.strip_prefix("sampled:") {
        if path.is_empty() {
            return Err(TargetError::BadSpecSyntax(spec.to_string()));
        }
        Ok(TargetArg::SampledFromFile(path.to_string()))
    } else {
        Err(TargetError::BadSpecSyntax(spec.to_string()))
    }
}

/// Closed form of the half-plane map `h_alpha(z) = (1 + (1-2 alpha) z)/(1 - z)`.
pub fn half_plane_map(alpha: f64, z: Complex64) -> Complex64 {
    (Complex64::ONE + z * (1.0 - 2.0 * alpha)) / (Complex64::ONE - z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::circle_point;

    #[test]
    fn half_plane_margins() {
        let t = ConvexTarget::half_plane(0.0).unwrap();
        assert_eq!(t.margin(Complex64::ONE), 1.0);

        let t5 = ConvexTarget::half_plane(0.5).unwrap();
        assert_eq!(t5.margin(Complex64::new(0.5, 3.0)), 0.0);

        assert!(ConvexTarget::half_plane(1.0).is_err());
        assert!(ConvexTarget::half_plane(-0.1).is_err());
    }

    #[test]
    fn half_plane_series_matches_geometric_expansion() {
        // h_alpha = 1 + 2(1-alpha) sum_{k>=1} z^k; oracle by expanding
        // (1 + (1-2a)z) * sum z^k term by term
        for &alpha in &[0.0, 0.5, 0.99] {
            let t = ConvexTarget::half_plane(alpha).unwrap();
            let s = t.series_of(16);
            for k in 1..=16usize {
                // geometric expansion: coefficient = 1 + (1 - 2 alpha)
                let expect = 1.0 + (1.0 - 2.0 * alpha);
                assert!((s.coeff(k).re - expect).abs() < 1e-15, "alpha {alpha} k {k}");
            }
            assert_eq!(s.coeff(0), Complex64::ONE);
            // series evaluation matches the closed form at a moderate radius,
            // once the order makes the tail negligible there
            let long = t.series_of(96);
            let z = Complex64::new(-0.4, 0.2);
            assert!((long.evaluate(z) - half_plane_map(alpha, z)).norm() < 1e-9);
        }
    }

    #[test]
    fn half_plane_boundary_approach() {
        // margin of h_alpha(z) is positive on the disc and small near z = -0.999
        for &alpha in &[0.0, 0.25, 0.5] {
            let t = ConvexTarget::half_plane(alpha).unwrap();
            for j in 0..64 {
                let z = circle_point(0.9, j, 64);
                assert!(t.margin(half_plane_map(alpha, z)) > 0.0);
            }
            let near = t.margin(half_plane_map(alpha, Complex64::new(-0.999, 0.0)));
            assert!(near > 0.0 && near < 1e-2);
        }
    }

    fn sampled_from_half_plane(alpha: f64, order: usize, rho: f64, m: usize) -> ConvexTarget {
        let series = ConvexTarget::half_plane(alpha).unwrap().series_of(order);
        ConvexTarget::sampled(series, rho, m).unwrap()
    }

    #[test]
    fn sampled_target_agrees_with_half_plane() {
        // discretized h_0 at rho = 0.999: near the shared boundary the two
        // margins agree within 2 (1 - rho) |h'| taken at the boundary point
        // nearest the test value. The series order must be large enough that
        // the coefficient tail is negligible at rho.
        let rho = 0.999;
        let samples = 1024;
        let t = sampled_from_half_plane(0.0, 16384, rho, samples);
        let exact = ConvexTarget::half_plane(0.0).unwrap();

        let w = Complex64::ONE;
        let m_sampled = t.margin(w);
        assert!(m_sampled > 0.0);
        assert!((m_sampled - exact.margin(w)).abs() < 2e-3);

        let vertices = match &t {
            ConvexTarget::Sampled { polygon, .. } => polygon.vertices().to_vec(),
            _ => unreachable!(),
        };
        for j in 0..32 {
            let z = circle_point(0.7, j, 32);
            let w = half_plane_map(0.0, z);
            if exact.margin(w) < 0.05 {
                continue;
            }
            // local derivative bound at the nearest sampled boundary point
            let nearest = vertices
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (*a - w).norm().partial_cmp(&(*b - w).norm()).unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            let zeta = circle_point(rho, nearest, samples);
            let h_prime = 2.0 / (Complex64::ONE - zeta).norm_sqr();
            let bound = (2.0 * (1.0 - rho) * h_prime).max(1e-4);
            let diff = (t.margin(w) - exact.margin(w)).abs();
            assert!(diff <= bound, "point {w}: diff {diff} bound {bound}");
        }
    }

    #[test]
    fn sampled_target_rejects_outside_points() {
        let t = sampled_from_half_plane(0.25, 8192, 0.999, 1024);
        assert!(t.margin(Complex64::new(0.0, 0.0)) < 0.0);
        assert!(t.margin(Complex64::new(-1.0, 0.5)) < -1.0);
    }

    #[test]
    fn sampled_margin_is_conjugation_symmetric() {
        let t = sampled_from_half_plane(0.25, 2048, 0.99, 1024);
        assert!(t.real_symmetric());
        for j in 0..16 {
            let w = Complex64::new(1.2, 0.0) + circle_point(0.4, j, 16);
            assert!((t.margin(w) - t.margin(w.conj())).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_validation_errors() {
        let good = ConvexTarget::half_plane(0.0).unwrap().series_of(64);
        assert!(matches!(
            ConvexTarget::sampled(good.clone(), 1.0, 256),
            Err(TargetError::RhoRange(_))
        ));
        assert!(matches!(
            ConvexTarget::sampled(good.clone(), 0.9, 4),
            Err(TargetError::SampleCount(4))
        ));

        // h(0) != 1 rejected
        let shifted = ComplexSeries::from_fn(8, |k| {
            if k == 0 { Complex64::new(2.0, 0.0) } else { Complex64::ONE }
        });
        assert!(matches!(
            ConvexTarget::sampled(shifted, 0.9, 64),
            Err(TargetError::NotUnitAtOrigin(_))
        ));

        // a non-convex image curve is rejected: 1 + z + z^2 at large radius
        // maps circles onto a limacon with an inner loop
        let limacon = ComplexSeries::from_fn(8, |k| {
            if k <= 2 { Complex64::ONE } else { Complex64::ZERO }
        });
        assert!(ConvexTarget::sampled(limacon, 0.95, 512).is_err());
    }

    #[test]
    fn hull_of_point_cloud() {
        let pts = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.5, 0.5),
            Complex64::new(0.25, 0.75),
        ];
        let hull = ConvexPolygon::hull(&pts).unwrap();
        assert_eq!(hull.vertices().len(), 4);
        assert!(hull.signed_margin(Complex64::new(0.5, 0.5)) > 0.49);
        assert!(hull.signed_margin(Complex64::new(2.0, 0.5)) < -0.99);

        let degenerate = [Complex64::ZERO, Complex64::ONE];
        assert!(ConvexPolygon::hull(&degenerate).is_err());
    }

    #[test]
    fn target_spec_parsing() {
        assert_eq!(parse_target_arg("halfplane:0.25").unwrap(), TargetArg::HalfPlane(0.25));
        assert_eq!(
            parse_target_arg("sampled:t.json").unwrap(),
            TargetArg::SampledFromFile("t.json".into())
        );
        assert!(parse_target_arg("halfplane:1.5").is_err());
        assert!(parse_target_arg("halfplane:nope").is_err());
        assert!(parse_target_arg("disc:0.5").is_err());
        assert!(parse_target_arg("sampled:").is_err());
    }

    #[test]
    fn target_spec_json_roundtrip() {
        let spec = TargetSpec::HalfPlane { alpha: 0.25 };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("half_plane"));
        let back: TargetSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
        assert!(back.resolve().is_ok());

        let sampled = r#"{"kind":"sampled","series":{"order":2,"coeffs":[[1,0],[0.5,0],[0,0]]},"rho":0.9,"M":64}"#;
        let spec: TargetSpec = serde_json::from_str(sampled).unwrap();
        assert!(spec.resolve().is_ok());
    }
}
