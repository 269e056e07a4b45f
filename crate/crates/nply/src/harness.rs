//! Randomized verification harness: maps each catalogued inclusion,
//! containment, and convolution statement to a seeded margin check with
//! reproducible failure reporting.
//!
//! Every trial first re-verifies the generated hypothesis certificate before
//! testing the conclusion, so a negative conclusion margin indicts the
//! statement under test rather than the sampler.

use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{
    class_quotients, close_to_convex_check, membership, prestarlike_test, quotient_series,
    st_check, ClassError, ClassId, Decision, ProbeConfig,
};
use crate::generators::{
    self, derive_seed, mm_pair_with, prestarlike_member, schur_series, st_member, tuple_member,
    GenConfig, GenError,
};
use crate::operators::{
    alexander, build_f, koebe, nply, part, AlexanderDirection, OperatorError, PartKind,
    TupleSystem,
};
use crate::series::{circle_point, ComplexSeries, Reflection, SeriesError};
use crate::targets::{ConvexPolygon, ConvexTarget, TargetError, TargetSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("the parameter grid is empty")]
    EmptyGrid,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("failed to write report {path}: {source}")]
    Report {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Identifier of one verifiable statement. The section-positional ids are
/// part of the command-line and report interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum TheoremId {
    /// Convolution quotients of prestarlike/starlike pairs stay in the
    /// convex hull of the multiplier's values.
    T1_1,
    /// If `Re(zS'/S) > 0` and `T'/S' < h` then `T/S < h`.
    T1_2,
    /// Components of starlike tuples are close-to-convex; the n-ply
    /// combination is starlike.
    T2_2,
    /// Convex-type tuples are starlike-type tuples.
    T2_3,
    /// Tuple classes are closed under convolution with prestarlike functions.
    T2_4,
    /// Odd parts of symmetric-point tuples form starlike tuples.
    T3_1,
    /// The odd part of the n-ply combination is starlike.
    T3_2,
    /// Convex-symmetric tuples are starlike-symmetric tuples.
    T3_3,
    /// Symmetric-point classes are closed under prestarlike convolution.
    T3_4,
    /// Conjugate parts of conjugate-point tuples form starlike tuples.
    T4_1,
    /// The conjugate part of the n-ply combination is starlike.
    T4_2,
    /// Convex-conjugate tuples are starlike-conjugate tuples.
    T4_3,
    /// Conjugate-point classes are closed under convolution with
    /// real-coefficient prestarlike functions.
    T4_4,
    /// Symmetric-conjugate parts of tuples form starlike tuples.
    T5_1,
    /// The symmetric-conjugate part of the n-ply combination is starlike.
    T5_2,
    /// Convex symmetric-conjugate tuples are starlike symmetric-conjugate
    /// tuples.
    T5_3,
    /// Symmetric-conjugate classes are closed under convolution with
    /// real-coefficient prestarlike functions.
    T5_4,
    /// Coefficient-exact kernel and parameter reductions.
    IDENTITIES,
}

impl TheoremId {
    pub const ALL: [TheoremId; 18] = [
        TheoremId::T1_1,
        TheoremId::T1_2,
        TheoremId::T2_2,
        TheoremId::T2_3,
        TheoremId::T2_4,
        TheoremId::T3_1,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T4_1,
        TheoremId::T4_2,
        TheoremId::T4_3,
        TheoremId::T4_4,
        TheoremId::T5_1,
        TheoremId::T5_2,
        TheoremId::T5_3,
        TheoremId::T5_4,
        TheoremId::IDENTITIES,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T1_1 => "T1_1",
            TheoremId::T1_2 => "T1_2",
            TheoremId::T2_2 => "T2_2",
            TheoremId::T2_3 => "T2_3",
            TheoremId::T2_4 => "T2_4",
            TheoremId::T3_1 => "T3_1",
            TheoremId::T3_2 => "T3_2",
            TheoremId::T3_3 => "T3_3",
            TheoremId::T3_4 => "T3_4",
            TheoremId::T4_1 => "T4_1",
            TheoremId::T4_2 => "T4_2",
            TheoremId::T4_3 => "T4_3",
            TheoremId::T4_4 => "T4_4",
            TheoremId::T5_1 => "T5_1",
            TheoremId::T5_2 => "T5_2",
            TheoremId::T5_3 => "T5_3",
            TheoremId::T5_4 => "T5_4",
            TheoremId::IDENTITIES => "IDENTITIES",
        }
    }

    /// The point-symmetry family exercised by this statement.
    pub fn family(self) -> PartKind {
        match self {
            TheoremId::T3_1 | TheoremId::T3_2 | TheoremId::T3_3 | TheoremId::T3_4 => {
                PartKind::Symmetric
            }
            TheoremId::T4_1 | TheoremId::T4_2 | TheoremId::T4_3 | TheoremId::T4_4 => {
                PartKind::Conjugate
            }
            TheoremId::T5_1 | TheoremId::T5_2 | TheoremId::T5_3 | TheoremId::T5_4 => {
                PartKind::SymmetricConjugate
            }
            _ => PartKind::Plain,
        }
    }

    /// Margin tolerance below which a trial counts as a failure. Hull
    /// containment allows for the inner discretization of the sampled hull.
    pub fn failure_tol(self, probe: &ProbeConfig) -> f64 {
        match self {
            TheoremId::T1_1 => 1e-6,
            _ => probe.tol_accept,
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown theorem id {s:?}"))
    }
}

fn st_class_of(family: PartKind) -> ClassId {
    match family {
        PartKind::Plain => ClassId::StNm,
        PartKind::Symmetric => ClassId::StsNm,
        PartKind::Conjugate => ClassId::StcNm,
        PartKind::SymmetricConjugate => ClassId::StscNm,
    }
}

fn cv_class_of(family: PartKind) -> ClassId {
    match family {
        PartKind::Plain => ClassId::CvNm,
        PartKind::Symmetric => ClassId::CvsNm,
        PartKind::Conjugate => ClassId::CvcNm,
        PartKind::SymmetricConjugate => ClassId::CvscNm,
    }
}

/// One cell of the verification grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub m: usize,
    pub weights: Vec<f64>,
    pub target: TargetSpec,
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub grid: Vec<GridPoint>,
    pub master_seed: u64,
    pub gen: GenConfig,
    pub probe: ProbeConfig,
    /// Test hook: forces the given trial to run on a corrupted tuple so the
    /// failure-reporting path can be exercised end to end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_corrupt_trial: Option<usize>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            grid: default_grid(),
            master_seed: 0,
            gen: GenConfig { order: 128, ..GenConfig::default() },
            probe: ProbeConfig { order: 128, ..ProbeConfig::default() },
            inject_corrupt_trial: None,
        }
    }
}

/// The default verification grid: `n, m` over 1..3, half-plane targets of
/// order 0, 1/4, 1/2, equal weights plus an uneven-weight variant.
pub fn default_grid() -> Vec<GridPoint> {
    let mut grid = Vec::new();
    for n in 1..=3usize {
        for m in 1..=3usize {
            for alpha in [0.0, 0.25, 0.5] {
                grid.push(GridPoint {
                    n,
                    m,
                    weights: vec![1.0 / m as f64; m],
                    target: TargetSpec::HalfPlane { alpha },
                });
            }
        }
    }
    for m in 2..=3usize {
        let total: f64 = (1..=m).map(|k| k as f64).sum();
        grid.push(GridPoint {
            n: 2,
            m,
            weights: (1..=m).map(|k| k as f64 / total).collect(),
            target: TargetSpec::HalfPlane { alpha: 0.25 },
        });
    }
    grid
}

/// Serializes possibly-infinite margins: finite numbers pass through, the
/// exact-check sentinel becomes the string `"inf"`.
mod margin_repr {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Sentinel(String),
    }

    pub fn serialize<S: Serializer>(m: &f64, s: S) -> Result<S::Ok, S::Error> {
        if m.is_finite() {
            Repr::Finite(*m).serialize(s)
        } else {
            Repr::Sentinel(if *m > 0.0 { "inf" } else { "-inf" }.to_string()).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Finite(v) => v,
            Repr::Sentinel(s) if s == "inf" => f64::INFINITY,
            Repr::Sentinel(_) => f64::NEG_INFINITY,
        })
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            struct One(f64);
            impl serde::Serialize for One {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    super::serialize(&self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for &m in v {
                seq.serialize_element(&One(m))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            struct One(f64);
            impl<'de> Deserialize<'de> for One {
                fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                    super::deserialize(d).map(One)
                }
            }
            Ok(Vec::<One>::deserialize(d)?.into_iter().map(|o| o.0).collect())
        }
    }
}

/// Outcome of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub weights: Vec<f64>,
    #[serde(with = "margin_repr")]
    pub margin: f64,
    pub decided: Decision,
    /// Named secondary margins: hypothesis re-verification and
    /// statement-specific variants.
    pub aux: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub seed: u64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenFailureRecord {
    pub trial: usize,
    pub seed: u64,
    pub reason: String,
}

/// Aggregated result of verifying one statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub theorem_id: TheoremId,
    pub trials: usize,
    pub params: VerifyParams,
    #[serde(with = "margin_repr::vec")]
    pub margins: Vec<f64>,
    #[serde(with = "margin_repr")]
    pub min_margin: f64,
    #[serde(with = "margin_repr")]
    pub median_margin: f64,
    pub failures: Vec<FailureRecord>,
    pub gen_failures: Vec<GenFailureRecord>,
    pub runtime_ms: u64,
    pub records: Vec<TrialRecord>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct TrialOutcome {
    margin: f64,
    aux: Vec<(String, f64)>,
}

enum TrialError {
    /// Sampler could not produce a certified hypothesis; reported, not fatal.
    Generation(String),
    Fatal(HarnessError),
}

impl From<GenError> for TrialError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::ResampleBudgetExhausted | GenError::RecursionDiverged(_) => {
                TrialError::Generation(e.to_string())
            }
            other => TrialError::Fatal(other.into()),
        }
    }
}

impl From<ClassError> for TrialError {
    fn from(e: ClassError) -> Self {
        TrialError::Fatal(e.into())
    }
}

impl From<OperatorError> for TrialError {
    fn from(e: OperatorError) -> Self {
        TrialError::Fatal(e.into())
    }
}

impl From<SeriesError> for TrialError {
    fn from(e: SeriesError) -> Self {
        TrialError::Fatal(e.into())
    }
}

impl From<TargetError> for TrialError {
    fn from(e: TargetError) -> Self {
        TrialError::Fatal(e.into())
    }
}

/// Runs `trials` seeded checks of one statement over the parameter grid.
pub fn verify(
    theorem: TheoremId,
    trials: usize,
    params: &VerifyParams,
) -> Result<TrialReport, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    if params.grid.is_empty() {
        return Err(HarnessError::EmptyGrid);
    }
    let start = Instant::now();
    let theorem_index = TheoremId::ALL.iter().position(|t| *t == theorem).unwrap() as u64;
    let stream = derive_seed(params.master_seed, theorem_index);

    let mut records = Vec::with_capacity(trials);
    let mut gen_failures = Vec::new();
    let tol = theorem.failure_tol(&params.probe);

    for trial in 0..trials {
        let seed = derive_seed(stream, trial as u64);
        let gp = &params.grid[trial % params.grid.len()];
        let target = gp.target.resolve()?;
        let family = theorem.family();
        let gen = GenConfig {
            order: params.gen.order,
            blaschke_degree: params.gen.blaschke_degree,
            seed,
            real_only: params.gen.real_only || family.needs_real_symmetric_target(),
        };

        let outcome = if params.inject_corrupt_trial == Some(trial) {
            corrupted_trial(gp, &target, &params.probe).map_err(TrialError::from)
        } else {
            run_check(theorem, gp, &target, &gen, &params.probe)
        };

        match outcome {
            Ok(out) => {
                let decided = if out.margin > params.probe.tol_accept {
                    Decision::Member
                } else if out.margin < -params.probe.tol_accept {
                    Decision::NonMember
                } else {
                    Decision::Boundary
                };
                records.push(TrialRecord {
                    trial,
                    seed,
                    n: gp.n,
                    m: gp.m,
                    weights: gp.weights.clone(),
                    margin: out.margin,
                    decided,
                    aux: out.aux,
                });
            }
            Err(TrialError::Generation(reason)) => {
                gen_failures.push(GenFailureRecord { trial, seed, reason });
            }
            Err(TrialError::Fatal(e)) => return Err(e),
        }
    }

    let margins: Vec<f64> = records.iter().map(|r| r.margin).collect();
    let failures: Vec<FailureRecord> = records
        .iter()
        .filter(|r| r.margin < -tol)
        .map(|r| FailureRecord { trial: r.trial, seed: r.seed, margin: r.margin })
        .collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let median_margin = median(&margins);

    Ok(TrialReport {
        theorem_id: theorem,
        trials,
        params: params.clone(),
        margins,
        min_margin,
        median_margin,
        failures,
        gen_failures,
        runtime_ms: start.elapsed().as_millis() as u64,
        records,
    })
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::INFINITY;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("margins are not NaN"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Test-hook path: a tuple with a known non-member component, bypassing
/// hypothesis re-verification so the failure surfaces in the report.
fn corrupted_trial(
    gp: &GridPoint,
    target: &ConvexTarget,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, ClassError> {
    let order = probe.order.max(8);
    let bad = ComplexSeries::from_fn(order, |k| match k {
        1 => Complex64::ONE,
        2 => Complex64::new(0.9, 0.0),
        _ => Complex64::ZERO,
    });
    let tuple = TupleSystem::new(vec![bad], vec![1.0]).map_err(ClassError::from)?;
    let v = membership(&tuple, gp.n, ClassId::StNm, target, None, probe)?;
    Ok(TrialOutcome { margin: v.margin, aux: vec![("injected".into(), 1.0)] })
}

fn hypothesis(
    aux: &mut Vec<(String, f64)>,
    name: &str,
    margin: f64,
) -> Result<(), TrialError> {
    aux.push((format!("hyp_{name}"), margin));
    if margin <= 0.0 {
        return Err(TrialError::Generation(format!(
            "hypothesis re-verification failed: {name} margin {margin}"
        )));
    }
    Ok(())
}

fn run_check(
    theorem: TheoremId,
    gp: &GridPoint,
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    match theorem {
        TheoremId::T1_1 => check_hull_containment(gp, target, gen, probe),
        TheoremId::T1_2 => check_quotient_subordination(target, gen, probe),
        TheoremId::T2_2 => check_close_to_convex(gp, target, gen, probe),
        TheoremId::T2_3 | TheoremId::T3_3 | TheoremId::T4_3 | TheoremId::T5_3 => {
            check_cv_in_st(theorem.family(), gp, target, gen, probe)
        }
        TheoremId::T3_1 | TheoremId::T4_1 | TheoremId::T5_1 => {
            check_part_tuple(theorem.family(), gp, target, gen, probe)
        }
        TheoremId::T3_2 | TheoremId::T4_2 | TheoremId::T5_2 => {
            check_part_starlike(theorem.family(), gp, target, gen, probe)
        }
        TheoremId::T2_4 | TheoremId::T3_4 | TheoremId::T4_4 | TheoremId::T5_4 => {
            check_convolution_closure(theorem.family(), gp, target, gen, probe)
        }
        TheoremId::IDENTITIES => check_identities(gp, gen),
    }
}

/// Lower bound of `Re h` over the target region, the admissible prestarlike
/// order for convolution statements.
fn prestarlike_bound(target: &ConvexTarget) -> f64 {
    match target {
        ConvexTarget::HalfPlane { alpha } => *alpha,
        ConvexTarget::Sampled { polygon, .. } => polygon
            .vertices()
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min)
            .clamp(0.0, 0.99),
    }
}

fn check_hull_containment(
    gp: &GridPoint,
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    let order = gen.order;
    let alpha = prestarlike_bound(target);
    let mut aux = Vec::new();

    let phi = prestarlike_member(alpha, &GenConfig { seed: derive_seed(gen.seed, 1), ..gen.clone() })?;
    let alpha_target = ConvexTarget::half_plane(alpha)?;
    let w_f = generators::random_schur(&GenConfig { seed: derive_seed(gen.seed, 2), ..gen.clone() })?;
    let f = st_member(&alpha_target, &w_f, order)?;
    let w_h = generators::random_schur(&GenConfig { seed: derive_seed(gen.seed, 3), ..gen.clone() })?;
    let multiplier = target.series_of(order).compose(&w_h)?;

    hypothesis(&mut aux, "prestarlike", prestarlike_test(&phi, alpha, probe)?.margin)?;
    hypothesis(&mut aux, "starlike", st_check(&f, &alpha_target, probe)?.margin)?;

    let num = phi.hadamard(&multiplier.cauchy_product(&f));
    let den = phi.hadamard(&f);
    let quotient = quotient_series(&num, &den)?;

    let r_hull = probe.radii.iter().copied().fold(0.0, f64::max);
    let hull_samples = multiplier.evaluate_on_circle(r_hull, probe.samples.max(720));
    let hull = ConvexPolygon::hull(&hull_samples)?;

    let mut margin = f64::INFINITY;
    for &r in &probe.radii {
        for j in 0..probe.samples {
            let v = quotient.evaluate(circle_point(r, j, probe.samples));
            margin = margin.min(hull.signed_margin(v));
        }
    }
    aux.push(("weights_m".into(), gp.weights.len() as f64));
    Ok(TrialOutcome { margin, aux })
}

fn check_quotient_subordination(
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    let mut rng = ChaCha8Rng::seed_from_u64(gen.seed);
    let alpha = rng.random::<f64>() * 0.9;
    let w_s = schur_series(&mut rng, gen);
    let w_t = schur_series(&mut rng, gen);
    let (s, t) = mm_pair_with(target, alpha, &w_s, &w_t, gen.order)?;
    let mut aux = Vec::new();

    hypothesis(
        &mut aux,
        "s_starlike",
        st_check(&s, &ConvexTarget::half_plane(0.0)?, probe)?.margin,
    )?;
    let derivative_ratio = quotient_series(&t.z_derivative(), &s.z_derivative())?;
    hypothesis(
        &mut aux,
        "derivative_subordinate",
        scan_margin(&derivative_ratio, target, probe),
    )?;

    let ratio = quotient_series(&t, &s)?;
    let margin = scan_margin(&ratio, target, probe);
    Ok(TrialOutcome { margin, aux })
}

fn scan_margin(q: &ComplexSeries, target: &ConvexTarget, probe: &ProbeConfig) -> f64 {
    let mut margin = f64::INFINITY;
    for &r in &probe.radii {
        for j in 0..probe.samples {
            let v = q.evaluate(circle_point(r, j, probe.samples));
            margin = margin.min(target.margin(v));
        }
    }
    margin
}

fn check_close_to_convex(
    gp: &GridPoint,
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    let (tuple, _) = tuple_member(target, gp.n, gp.m, &gp.weights, PartKind::Plain, gen)?;
    let mut aux = Vec::new();
    hypothesis(
        &mut aux,
        "st_tuple",
        membership(&tuple, gp.n, ClassId::StNm, target, None, probe)?.margin,
    )?;

    let f_n = nply(&build_f(&tuple), gp.n)?;
    let starlike = st_check(&f_n, target, probe)?;
    let mut margin = starlike.margin;
    aux.push(("fn_starlike".into(), starlike.margin));

    for f in tuple.members() {
        let v = close_to_convex_check(f, &f_n, target, probe)?;
        margin = margin.min(v.margin);
    }
    Ok(TrialOutcome { margin, aux })
}

fn check_cv_in_st(
    family: PartKind,
    gp: &GridPoint,
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    let (st_tuple, _) = tuple_member(target, gp.n, gp.m, &gp.weights, family, gen)?;
    let cv_tuple = st_tuple.map_members(|f| alexander(f, AlexanderDirection::Inverse))?;
    let mut aux = Vec::new();
    hypothesis(
        &mut aux,
        "cv_tuple",
        membership(&cv_tuple, gp.n, cv_class_of(family), target, None, probe)?.margin,
    )?;
    let v = membership(&cv_tuple, gp.n, st_class_of(family), target, None, probe)?;
    Ok(TrialOutcome { margin: v.margin, aux })
}

fn check_part_tuple(
    family: PartKind,
    gp: &GridPoint,
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    let (tuple, _) = tuple_member(target, gp.n, gp.m, &gp.weights, family, gen)?;
    let mut aux = Vec::new();
    hypothesis(
        &mut aux,
        "family_tuple",
        membership(&tuple, gp.n, st_class_of(family), target, None, probe)?.margin,
    )?;
    let parts = tuple.map_members(|f| Ok(part(f, family)))?;
    let v = membership(&parts, gp.n, ClassId::StNm, target, None, probe)?;
    Ok(TrialOutcome { margin: v.margin, aux })
}

fn check_part_starlike(
    family: PartKind,
    gp: &GridPoint,
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    let (tuple, _) = tuple_member(target, gp.n, gp.m, &gp.weights, family, gen)?;
    let mut aux = Vec::new();
    hypothesis(
        &mut aux,
        "family_tuple",
        membership(&tuple, gp.n, st_class_of(family), target, None, probe)?.margin,
    )?;
    let g_n = part(&nply(&build_f(&tuple), gp.n)?, family);
    let v = st_check(&g_n, target, probe)?;
    Ok(TrialOutcome { margin: v.margin, aux })
}

fn check_convolution_closure(
    family: PartKind,
    gp: &GridPoint,
    target: &ConvexTarget,
    gen: &GenConfig,
    probe: &ProbeConfig,
) -> Result<TrialOutcome, TrialError> {
    let (tuple, _) = tuple_member(target, gp.n, gp.m, &gp.weights, family, gen)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(gen.seed, 4));
    let alpha_pre = rng.random::<f64>() * prestarlike_bound(target);
    let phi = prestarlike_member(
        alpha_pre,
        &GenConfig { seed: derive_seed(gen.seed, 5), ..gen.clone() },
    )?;

    let mut aux = Vec::new();
    aux.push(("alpha_pre".into(), alpha_pre));
    hypothesis(
        &mut aux,
        "family_tuple",
        membership(&tuple, gp.n, st_class_of(family), target, None, probe)?.margin,
    )?;
    hypothesis(&mut aux, "prestarlike", prestarlike_test(&phi, alpha_pre, probe)?.margin)?;

    // starlike-type closure
    let convolved = tuple.map_members(|f| Ok(f.hadamard(&phi)))?;
    let st_margin = membership(&convolved, gp.n, st_class_of(family), target, None, probe)?.margin;
    aux.push(("st_closure".into(), st_margin));
    // the half-plane margin of the same quotients (the weaker containment)
    let halfplane_margin = {
        let hp = ConvexTarget::half_plane(alpha_pre)?;
        membership(&convolved, gp.n, st_class_of(family), &hp, None, probe)?.margin
    };
    aux.push(("st_closure_halfplane".into(), halfplane_margin));

    // kernel variant: a tuple in the (g, h)-class, convolved, tested with g
    let beta = rng.random::<f64>() * 0.9;
    let kernel = alexander(&koebe(beta, gen.order)?, AlexanderDirection::Inverse)?;
    let deconvolved = tuple.map_members(|f| Ok(f.deconvolve(&kernel)?))?;
    let deconv_convolved = deconvolved.map_members(|f| Ok(f.hadamard(&phi)))?;
    let gh_margin = membership(
        &deconv_convolved,
        gp.n,
        st_class_of(family),
        target,
        Some(&kernel),
        probe,
    )?
    .margin;
    aux.push(("gh_closure".into(), gh_margin));

    // convex-type closure via the componentwise inverse transform
    let cv_tuple = tuple.map_members(|f| alexander(f, AlexanderDirection::Inverse))?;
    let cv_convolved = cv_tuple.map_members(|f| Ok(f.hadamard(&phi)))?;
    let cv_margin = membership(&cv_convolved, gp.n, cv_class_of(family), target, None, probe)?.margin;
    aux.push(("cv_closure".into(), cv_margin));

    let margin = st_margin.min(gh_margin).min(cv_margin);
    Ok(TrialOutcome { margin, aux })
}

/// Coefficient-exact kernel and parameter reductions, checked on random
/// normalized inputs. Exact passes report the positive-infinity sentinel.
fn check_identities(gp: &GridPoint, gen: &GenConfig) -> Result<TrialOutcome, TrialError> {
    let order = gen.order;
    let mut rng = ChaCha8Rng::seed_from_u64(gen.seed);
    let mut mismatches = 0usize;
    let mut worst: f64 = 0.0;

    let random_member = |rng: &mut ChaCha8Rng| {
        ComplexSeries::from_fn(order, |k| match k {
            0 => Complex64::ZERO,
            1 => Complex64::ONE,
            _ => {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    * 0.5f64.powi(k as i32)
            }
        })
    };

    let members: Vec<ComplexSeries> = (0..gp.m).map(|_| random_member(&mut rng)).collect();
    let tuple = TupleSystem::new(members, gp.weights.clone())?;
    let f = &tuple.members()[0];

    let mut check_index = 0usize;
    let mut first_bad: Option<usize> = None;
    let mut check = |lhs: &ComplexSeries, rhs: &ComplexSeries, tol: f64| {
        let diff = lhs
            .coeffs()
            .iter()
            .zip(rhs.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
        if diff > tol {
            mismatches += 1;
            first_bad.get_or_insert(check_index);
        }
        check_index += 1;
    };

    // unit and theta convolution kernels
    let geo = ComplexSeries::geometric(order);
    check(&f.hadamard(&geo), f, 0.0);
    check(&f.hadamard(&geo.z_derivative()), &f.z_derivative(), 0.0);

    // convolving with z/(1-z) leaves every class quotient unchanged
    for class in [st_class_of(PartKind::Plain), ClassId::StsNm, ClassId::CvNm] {
        let plain = class_quotients(&tuple, gp.n, class, None)?;
        let with_unit = class_quotients(&tuple, gp.n, class, Some(&geo))?;
        for (a, b) in plain.iter().zip(&with_unit) {
            check(a, b, 0.0);
        }
    }

    // the theta kernel z/(1-z)^2 turns the starlike test into the convex test
    let theta_kernel = koebe(0.0, order)?;
    let st_side = class_quotients(&tuple, gp.n, ClassId::StNm, Some(&theta_kernel))?;
    let cv_side = class_quotients(&tuple, gp.n, ClassId::CvNm, None)?;
    for (a, b) in st_side.iter().zip(&cv_side) {
        check(a, b, 0.0);
    }

    // componentwise forward transform links the convex and starlike classes
    let forward = tuple.map_members(|g| alexander(g, AlexanderDirection::Forward))?;
    for (cv_class, st_class) in [(ClassId::CvNm, ClassId::StNm), (ClassId::CvsNm, ClassId::StsNm)] {
        let lhs = class_quotients(&tuple, gp.n, cv_class, None)?;
        let rhs = class_quotients(&forward, gp.n, st_class, None)?;
        for (a, b) in lhs.iter().zip(&rhs) {
            check(a, b, 0.0);
        }
    }

    // single-member reduction: the class quotient is the classical z f'/f
    let single = TupleSystem::new(vec![f.clone()], vec![1.0])?;
    let reduced = class_quotients(&single, 1, ClassId::StNm, None)?;
    let classical = quotient_series(&f.z_derivative(), f)?;
    check(&reduced[0], &classical, 0.0);

    // single-member family quotients against the directly-built denominators
    let f_n = nply(f, gp.n)?;
    let direct_sym = f_n.sub(&f_n.reflect(Reflection::NegateArg)).scalar_mul(0.5.into());
    check(
        &class_quotients(&single, gp.n, ClassId::StsNm, None)?[0],
        &quotient_series(&f.z_derivative(), &direct_sym)?,
        0.0,
    );
    let direct_conj = f_n.add(&f_n.reflect(Reflection::ConjArg)).scalar_mul(0.5.into());
    check(
        &class_quotients(&single, gp.n, ClassId::StcNm, None)?[0],
        &quotient_series(&f.z_derivative(), &direct_conj)?,
        0.0,
    );
    let direct_sc = f_n.sub(&f_n.reflect(Reflection::ConjNegateArg)).scalar_mul(0.5.into());
    check(
        &class_quotients(&single, gp.n, ClassId::StscNm, None)?[0],
        &quotient_series(&f.z_derivative(), &direct_sc)?,
        0.0,
    );

    let margin = if mismatches == 0 { f64::INFINITY } else { f64::NEG_INFINITY };
    let mut aux = vec![("mismatches".into(), mismatches as f64), ("worst_diff".into(), worst)];
    if let Some(idx) = first_bad {
        aux.push(("first_bad_check".into(), idx as f64));
    }
    Ok(TrialOutcome { margin, aux })
}

/// Suite configuration: which statements to run, over which grid, with which
/// seeds and output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub theorems: Vec<TheoremId>,
    pub trials: usize,
    pub grid: Vec<GridPoint>,
    pub master_seed: u64,
    pub gen: GenConfig,
    pub probe: ProbeConfig,
    pub out_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inject_corrupt_trial: Option<InjectSpec>,
}

/// Test hook carried by the suite config; see [`VerifyParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectSpec {
    pub theorem: TheoremId,
    pub trial: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            theorems: TheoremId::ALL.to_vec(),
            trials: 100,
            grid: default_grid(),
            master_seed: 0,
            gen: GenConfig { order: 128, ..GenConfig::default() },
            probe: ProbeConfig { order: 128, ..ProbeConfig::default() },
            out_dir: None,
            inject_corrupt_trial: None,
        }
    }
}

/// Runs every configured statement; writes one JSON report per statement and
/// a combined CSV when an output directory is set.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<TrialReport>, HarnessError> {
    let mut reports = Vec::with_capacity(config.theorems.len());
    for &theorem in &config.theorems {
        let inject = config
            .inject_corrupt_trial
            .as_ref()
            .filter(|i| i.theorem == theorem)
            .map(|i| i.trial);
        let params = VerifyParams {
            grid: config.grid.clone(),
            master_seed: config.master_seed,
            gen: config.gen.clone(),
            probe: config.probe.clone(),
            inject_corrupt_trial: inject,
        };
        reports.push(verify(theorem, config.trials, &params)?);
    }
    if let Some(dir) = &config.out_dir {
        write_reports(&reports, Path::new(dir))?;
    }
    Ok(reports)
}

/// Writes `report_<id>.json` per statement plus the combined `suite.csv`.
pub fn write_reports(reports: &[TrialReport], dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Report {
        path: dir.display().to_string(),
        source,
    })?;
    for report in reports {
        let path = dir.join(format!("report_{}.json", report.theorem_id));
        let mut body = serde_json::to_string_pretty(report)?;
        body.push('\n');
        fs::write(&path, body).map_err(|source| HarnessError::Report {
            path: path.display().to_string(),
            source,
        })?;
    }
    let csv_path = dir.join("suite.csv");
    let mut csv = String::from("theorem_id,trial,seed,n,m,alpha_spec,margin,decided\n");
    for report in reports {
        for r in &report.records {
            let weights = r
                .weights
                .iter()
                .map(|w| format!("{w}"))
                .collect::<Vec<_>>()
                .join(",");
            csv.push_str(&format!(
                "{},{},{},{},{},\"{}\",{},{}\n",
                report.theorem_id,
                r.trial,
                r.seed,
                r.n,
                r.m,
                weights,
                r.margin,
                match r.decided {
                    Decision::Member => "member",
                    Decision::NonMember => "non_member",
                    Decision::Boundary => "boundary",
                }
            ));
        }
    }
    fs::write(&csv_path, csv).map_err(|source| HarnessError::Report {
        path: csv_path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_params(seed: u64) -> VerifyParams {
        VerifyParams {
            grid: vec![GridPoint {
                n: 2,
                m: 2,
                weights: vec![0.5, 0.5],
                target: TargetSpec::HalfPlane { alpha: 0.25 },
            }],
            master_seed: seed,
            gen: GenConfig { order: 96, blaschke_degree: 3, seed: 0, real_only: false },
            probe: ProbeConfig { order: 96, ..ProbeConfig::default() },
            inject_corrupt_trial: None,
        }
    }

    #[test]
    fn every_statement_is_dispatched() {
        // one trial per id; the dispatch table must cover the whole catalogue
        for theorem in TheoremId::ALL {
            let report = verify(theorem, 1, &quick_params(42)).unwrap();
            assert_eq!(report.trials, 1);
            assert!(
                report.gen_failures.len() + report.records.len() == 1,
                "{theorem}: no outcome recorded"
            );
            if let Some(r) = report.records.first() {
                assert!(r.margin > 0.0, "{theorem}: margin {}", r.margin);
            }
        }
    }

    #[test]
    fn fixed_seed_single_trial_t2_3() {
        let report = verify(TheoremId::T2_3, 1, &quick_params(42)).unwrap();
        assert!(report.passed());
        assert!(report.min_margin > 0.0);
    }

    #[test]
    fn t1_2_with_degenerate_witness_matches_distance() {
        // w_t = 0 forces T = S, so the quotient is constantly 1 and the
        // margin is the distance from 1 to the boundary, 1 - alpha
        let order = 64;
        let target = ConvexTarget::half_plane(0.25).unwrap();
        let (s, t) = mm_pair_with(
            &target,
            0.4,
            &ComplexSeries::identity(order),
            &ComplexSeries::zero(order),
            order,
        )
        .unwrap();
        let ratio = quotient_series(&t, &s).unwrap();
        let probe = ProbeConfig::default();
        let margin = scan_margin(&ratio, &target, &probe);
        assert!((margin - 0.75).abs() < 1e-9, "margin {margin}");
    }

    #[test]
    fn reports_are_deterministic() {
        let a = verify(TheoremId::T3_1, 3, &quick_params(7)).unwrap();
        let b = verify(TheoremId::T3_1, 3, &quick_params(7)).unwrap();
        assert_eq!(a.margins, b.margins);
        let c = verify(TheoremId::T3_1, 3, &quick_params(8)).unwrap();
        assert_ne!(a.margins, c.margins);
    }

    #[test]
    fn injected_corruption_is_reported() {
        let mut params = quick_params(5);
        params.inject_corrupt_trial = Some(1);
        let report = verify(TheoremId::T2_3, 3, &params).unwrap();
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].trial, 1);
        assert!(report.failures[0].margin < -0.5);
        assert!(!report.passed());
    }

    #[test]
    fn identities_report_exact_sentinel() {
        let report = verify(TheoremId::IDENTITIES, 2, &quick_params(3)).unwrap();
        assert!(report.passed());
        assert_eq!(report.min_margin, f64::INFINITY);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"min_margin\":\"inf\""));
        let back: TrialReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.min_margin, f64::INFINITY);
    }

    #[test]
    fn suite_runs_and_writes_reports() {
        let dir = tempfile::tempdir().unwrap();
        let config = SuiteConfig {
            theorems: vec![TheoremId::T2_3, TheoremId::IDENTITIES],
            trials: 2,
            grid: quick_params(0).grid,
            master_seed: 1,
            gen: GenConfig { order: 96, blaschke_degree: 3, seed: 0, real_only: false },
            probe: ProbeConfig { order: 96, ..ProbeConfig::default() },
            out_dir: Some(dir.path().display().to_string()),
            inject_corrupt_trial: None,
        };
        let reports = run_suite(&config).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| r.passed()));
        assert!(dir.path().join("report_T2_3.json").exists());
        assert!(dir.path().join("report_IDENTITIES.json").exists());
        let csv = fs::read_to_string(dir.path().join("suite.csv")).unwrap();
        assert!(csv.starts_with("theorem_id,trial,seed,n,m,alpha_spec,margin,decided"));
        assert!(csv.contains("T2_3,0,"));
    }

    #[test]
    fn empty_theorem_list_is_a_valid_suite() {
        let config = SuiteConfig {
            theorems: vec![],
            trials: 1,
            ..SuiteConfig::default()
        };
        let reports = run_suite(&config).unwrap();
        assert!(reports.is_empty());
    }

    #[test]
    fn median_of_margins() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[]), f64::INFINITY);
    }
}
