//! Constructive, certified samplers for every hypothesis class the theorems
//! quantify over.
//!
//! Starlike members come from the structural formula
//! `f = z exp(integral (h(w(t)) - 1)/t dt)` with a Blaschke-product Schwarz
//! witness `w`, which satisfies `z f'/f = h(w(z))` exactly as a formal
//! series. Tuple members solve a projection-consistent recursion for the
//! class denominator so the subordination certificate is exact by
//! construction rather than found by rejection.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{self, ClassError, ClassId, Decision, ProbeConfig};
use crate::operators::{self, OperatorError, PartKind, TupleSystem};
use crate::series::{ComplexSeries, SeriesError, DEFAULT_ORDER};
use crate::targets::{ConvexTarget, TargetError};

/// Cap on the coefficient magnitude of the denominator recursion; beyond it
/// the draw is declared divergent and resampled.
const RECURSION_BLOWUP: f64 = 1e12;

/// Bounded retries per trial before a generation failure is reported.
pub const MAX_RESAMPLE_ATTEMPTS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("blaschke degree {0} exceeds the cap of 8")]
    DegreeTooLarge(usize),
    #[error("weights are not a convex combination")]
    BadWeights,
    #[error("conjugate-family generation requires real_only parameters")]
    NeedsRealParameters,
    #[error("denominator recursion diverged (|s_{0}| > 1e12)")]
    RecursionDiverged(usize),
    #[error("resample budget of {MAX_RESAMPLE_ATTEMPTS} attempts exhausted")]
    ResampleBudgetExhausted,
    #[error("perturbation rejected: membership margin fell below tolerance")]
    PerturbationRejected,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Target(#[from] TargetError),
}

/// Seeded configuration for the samplers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    /// Truncation order of generated series.
    pub order: usize,
    /// Number of Blaschke factors in the Schwarz witness, at most 8.
    pub blaschke_degree: usize,
    /// Master seed; identical configs reproduce identical coefficients.
    pub seed: u64,
    /// Restrict all random parameters to the real axis.
    pub real_only: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            order: DEFAULT_ORDER,
            blaschke_degree: 4,
            seed: 0,
            real_only: false,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.blaschke_degree > 8 {
            return Err(GenError::DegreeTooLarge(self.blaschke_degree));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// The same configuration with a per-trial derived seed.
    pub fn with_trial_seed(&self, master: u64, trial: u64) -> GenConfig {
        GenConfig { seed: derive_seed(master, trial), ..self.clone() }
    }
}

/// Schedule-independent per-trial seed derivation (splitmix64 over the
/// master seed and trial index).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut x = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws a Schwarz function `w(z) = eta z prod (a_i - z)/(1 - conj(a_i) z)`
/// with `|eta| = 1` and `|a_i| <= 0.8`, as its Taylor series. Satisfies
/// `w(0) = 0` and `|w| < 1` on the open disc.
pub fn random_schur(cfg: &GenConfig) -> Result<ComplexSeries, GenError> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    Ok(schur_series(&mut rng, cfg))
}

/// Draws the witness from an already-running stream.
pub(crate) fn schur_series(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> ComplexSeries {
    let eta = if cfg.real_only {
        if rng.random::<f64>() < 0.5 { -Complex64::ONE } else { Complex64::ONE }
    } else {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.random::<f64>())
    };
    let zeros: Vec<Complex64> = (0..cfg.blaschke_degree)
        .map(|_| {
            if cfg.real_only {
                Complex64::new(rng.random_range(-0.8..0.8), 0.0)
            } else {
                // uniform on the disc of radius 0.8
                let r = 0.8 * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, 2.0 * std::f64::consts::PI * rng.random::<f64>())
            }
        })
        .collect();
    blaschke_series(eta, &zeros, cfg.order)
}

/// Taylor series of `eta z prod (a_i - z)/(1 - conj(a_i) z)`.
pub fn blaschke_series(eta: Complex64, zeros: &[Complex64], order: usize) -> ComplexSeries {
    let mut w = ComplexSeries::identity(order).scalar_mul(eta);
    for &a in zeros {
        // multiply by (a - z)
        let lin = ComplexSeries::from_fn(order, |k| match k {
            0 => a,
            1 => -Complex64::ONE,
            _ => Complex64::ZERO,
        });
        w = w.cauchy_product(&lin);
        // multiply by 1/(1 - conj(a) z) = sum conj(a)^k z^k
        let ac = a.conj();
        let geo = ComplexSeries::from_fn(order, |k| ac.powu(k as u32));
        w = w.cauchy_product(&geo);
    }
    w
}

/// A certified member of `ST(h)` with Schwarz witness `w`:
/// `f = z exp(integral (h(w(t)) - 1)/t dt)`, so `z f'/f = h(w(z))` exactly.
pub fn st_member(h: &ConvexTarget, w: &ComplexSeries, order: usize) -> Result<ComplexSeries, GenError> {
    let h_series = h.series_of(order);
    let p = h_series.compose(&w.resized(order))?;
    let g = p.sub_constant(Complex64::ONE).integrate_div_z()?;
    Ok(g.exp()?.mul_z())
}

/// The index set a family's denominator is supported on.
fn family_indices(kind: PartKind, n: usize, k: usize) -> bool {
    let in_nply = k % n == 1 % n && k >= 1;
    match kind {
        PartKind::Plain | PartKind::Conjugate => in_nply,
        PartKind::Symmetric | PartKind::SymmetricConjugate => in_nply && k % 2 == 1,
    }
}

/// Solves the projection-consistent recursion for the denominator `S`
/// supported on the family index set: `s_1 = 1` and, for `t` in the set,
/// `s_t = (1/(t-1)) sum_{j in set, j < t} Q_{t-j} s_j`.
fn solve_denominator(
    q_mix: &ComplexSeries,
    kind: PartKind,
    n: usize,
) -> Result<ComplexSeries, GenError> {
    let order = q_mix.order();
    let mut s = vec![Complex64::ZERO; order + 1];
    s[1] = Complex64::ONE;
    for t in 2..=order {
        if !family_indices(kind, n, t) {
            continue;
        }
        let mut acc = Complex64::ZERO;
        for j in 1..t {
            if family_indices(kind, n, j) && s[j] != Complex64::ZERO {
                acc += q_mix.coeff(t - j) * s[j];
            }
        }
        let val = acc / (t - 1) as f64;
        if val.norm() > RECURSION_BLOWUP {
            return Err(GenError::RecursionDiverged(t));
        }
        s[t] = val;
    }
    Ok(ComplexSeries::new(s)?)
}

/// A certified member tuple of the family's starlike class, together with
/// the denominator series `S` it subordinates against.
///
/// Each component satisfies `z f_k' / S = h(w_k(z))` exactly as a formal
/// series, and `S` equals the class denominator rebuilt from the tuple
/// (`F_n` for plain, the odd part of `F_n` for symmetric; conjugate families
/// use real parameters, which collapse their part extractors onto these).
pub fn tuple_member(
    h: &ConvexTarget,
    n: usize,
    m: usize,
    weights: &[f64],
    family: PartKind,
    cfg: &GenConfig,
) -> Result<(TupleSystem, ComplexSeries), GenError> {
    cfg.validate()?;
    if family.needs_real_symmetric_target() && !cfg.real_only {
        return Err(GenError::NeedsRealParameters);
    }
    if weights.len() != m || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(GenError::BadWeights);
    }
    let mut rng = cfg.rng();
    let h_series = h.series_of(cfg.order);
    let mut attempts = 0;
    loop {
        attempts += 1;
        match try_tuple_draw(&h_series, n, m, weights, family, cfg, &mut rng) {
            Ok(result) => return Ok(result),
            Err(GenError::RecursionDiverged(_)) if attempts < MAX_RESAMPLE_ATTEMPTS => continue,
            Err(GenError::RecursionDiverged(_)) => return Err(GenError::ResampleBudgetExhausted),
            Err(e) => return Err(e),
        }
    }
}

fn try_tuple_draw(
    h_series: &ComplexSeries,
    n: usize,
    m: usize,
    weights: &[f64],
    family: PartKind,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(TupleSystem, ComplexSeries), GenError> {
    let quotients: Vec<ComplexSeries> = (0..m)
        .map(|_| {
            let w = schur_series(rng, cfg);
            h_series.compose(&w)
        })
        .collect::<Result<_, _>>()?;
    let terms: Vec<(f64, &ComplexSeries)> = weights.iter().copied().zip(&quotients).collect();
    let q_mix = ComplexSeries::linear_combine(&terms)?;
    let s = solve_denominator(&q_mix, family, n)?;
    let members = quotients
        .iter()
        .map(|q| Ok(q.cauchy_product(&s).integrate_div_z()?))
        .collect::<Result<Vec<_>, GenError>>()?;
    let tuple = TupleSystem::new(members, weights.to_vec())?;
    Ok((tuple, s))
}

/// A certified prestarlike function of order `alpha`: the deconvolution of a
/// certified `ST(h_alpha)` member by the generalized Koebe series.
pub fn prestarlike_member(alpha: f64, cfg: &GenConfig) -> Result<ComplexSeries, GenError> {
    cfg.validate()?;
    let target = ConvexTarget::half_plane(alpha)?;
    let w = random_schur(cfg)?;
    let s = st_member(&target, &w, cfg.order)?;
    let kernel = operators::koebe(alpha, cfg.order)?;
    Ok(s.deconvolve(&kernel)?)
}

/// A pair `(S, T)` with `Re(z S'/S) > 0, T(0) = S(0) = 0`, and
/// `T'/S'` subordinate to `h` by construction.
pub fn mm_pair(h: &ConvexTarget, cfg: &GenConfig) -> Result<(ComplexSeries, ComplexSeries), GenError> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    let alpha = rng.random::<f64>();
    let w_s = schur_series(&mut rng, cfg);
    let w_t = schur_series(&mut rng, cfg);
    mm_pair_with(h, alpha, &w_s, &w_t, cfg.order)
}

/// Deterministic core of [`mm_pair`]: `S` is the `ST(h_alpha)` member with
/// witness `w_s`, and `T = integral S'(t) h(w_t(t)) dt`.
pub fn mm_pair_with(
    h: &ConvexTarget,
    alpha: f64,
    w_s: &ComplexSeries,
    w_t: &ComplexSeries,
    order: usize,
) -> Result<(ComplexSeries, ComplexSeries), GenError> {
    let s = st_member(&ConvexTarget::half_plane(alpha)?, w_s, order)?;
    let h_of_w = h.series_of(order).compose(&w_t.resized(order))?;
    let t = s.derivative().cauchy_product(&h_of_w).integrate();
    Ok((s, t))
}

/// Generic complex members of the conjugate-point classes, obtained by
/// perturbing a real member and re-verifying the membership predicate.
/// Coefficients from index 2 on receive a complex perturbation scaled to a
/// fraction of the current margin; the result is rejected (and retried with
/// a smaller scale) until the verdict stays a member.
pub fn perturb_tuple(
    t: &TupleSystem,
    n: usize,
    class_id: ClassId,
    h: &ConvexTarget,
    cfg: &ProbeConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TupleSystem, GenError> {
    let base = classes::membership(t, n, class_id, h, None, cfg)?;
    if base.decided != Decision::Member {
        return Err(GenError::PerturbationRejected);
    }
    let mut scale = base.margin / 20.0;
    for _ in 0..MAX_RESAMPLE_ATTEMPTS {
        let members: Vec<ComplexSeries> = t
            .members()
            .iter()
            .map(|f| {
                ComplexSeries::from_fn(f.order(), |k| {
                    if k < 2 {
                        f.coeff(k)
                    } else {
                        f.coeff(k)
                            + Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                                * scale
                                * 0.5f64.powi(k as i32 - 2)
                    }
                })
            })
            .collect();
        let perturbed = TupleSystem::new(members, t.weights().to_vec())?;
        let verdict = classes::membership(&perturbed, n, class_id, h, None, cfg)?;
        if verdict.decided == Decision::Member {
            return Ok(perturbed);
        }
        scale *= 0.5;
    }
    Err(GenError::PerturbationRejected)
}
