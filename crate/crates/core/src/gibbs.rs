//! Gibbs samplers for the rank likelihood.
//!
//! The chain state holds the latent scores in sorted order, so the
//! constraint "latent scores reproduce the observed ranks" reduces to each
//! score lying strictly between its neighbours. One iteration is
//!
//! 1. [`ChainState::sweep_q`]: single-site truncated-normal updates of the
//!    sorted scores, in ascending order;
//!
//!    When [`ChainConfig::group_moves`] is set, [`ChainState::sweep_group`]
//!    follows: a joint rescaling and shift of all scores and the class 0 and
//!    class 2 parameters, drawn from its exact conditional;
//! 2. [`ChainState::sweep_params`]: conjugate updates of `(mu1, sigma1)` and
//!    `(mu2, sigma2)` from the scores currently assigned to classes 0 and 2;
//! 3. only when some labels are unverified, [`ChainState::sweep_lambda`]
//!    (Dirichlet prevalence update) and [`ChainState::sweep_labels`]
//!    (categorical re-imputation of the unverified labels).
//!
//! [`run_chain`] drives the full sampler; [`run_chain_verified`] is the
//! simpler sampler for fully verified data, kept separate so the reduction
//! between the two can be checked.

use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{
    categorical_unnormalized, chain_rng, normal_ln_pdf_unchecked, sample_dirichlet,
    sample_inverse_gamma, sample_truncated_normal, ChainRng, Interval,
};
use crate::error::{Error, Result};
use crate::rank::{Label, RankedData};
use crate::trinormal::{vus, youden_index, SurfaceParams, TrinormalParams, YoudenIndex};

/// Sampler settings. `iterations` counts burn-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub dirichlet_alpha: [f64; 3],
    pub init: TrinormalParams,
    /// Evaluate the Youden index on every kept draw.
    pub compute_youden: bool,
    /// Record burn-in iterations as well, for trace export.
    pub keep_burn_in: bool,
    /// Add the scale and shift move after the score sweep. Single-site
    /// score updates alone move the overall scale of the scores very
    /// slowly; the move leaves the posterior unchanged.
    pub group_moves: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            iterations: 10_000,
            burn_in: 2_000,
            thin: 1,
            seed: 0,
            dirichlet_alpha: [1.0, 1.0, 1.0],
            init: TrinormalParams::default(),
            compute_youden: false,
            keep_burn_in: false,
            group_moves: true,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::config("iterations", "must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::config(
                "burn_in",
                format!("must be below iterations ({})", self.iterations),
            ));
        }
        if self.thin == 0 {
            return Err(Error::config("thin", "must be at least 1"));
        }
        if self.dirichlet_alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::config("dirichlet_alpha", "entries must be finite and nonnegative"));
        }
        self.init
            .validate()
            .map_err(|e| Error::config("init", e.to_string()))
    }

    /// Number of kept draws.
    pub fn n_kept(&self) -> usize {
        (self.iterations - self.burn_in).div_ceil(self.thin)
    }
}

/// Times a class had fewer than two members (or no spread) and its
/// parameters were carried over unchanged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SkipCounts {
    pub class0: usize,
    pub class2: usize,
}

/// Mutable state of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    /// Latent scores in ascending order.
    pub q_sorted: Vec<f64>,
    /// Class (0, 1, 2) of each sorted position; observed labels are never
    /// overwritten.
    pub d_aug: Vec<u8>,
    pub params: TrinormalParams,
    pub lambda: [f64; 3],
    /// Sorted positions whose label is unverified.
    pub unverified: Vec<usize>,
    pub skips: SkipCounts,
}

fn class_counts(d: &[u8]) -> [usize; 3] {
    let mut c = [0; 3];
    for &k in d {
        c[k as usize] += 1;
    }
    c
}

fn observed_counts(rd: &RankedData) -> [usize; 3] {
    let mut c = [0; 3];
    for l in &rd.l_sorted {
        if let Some(k) = l.class() {
            c[k] += 1;
        }
    }
    c
}

/// Prior concentration usable for a Dirichlet draw: zero entries are only
/// allowed for classes that are observed.
fn init_concentration(alpha: [f64; 3], observed: [usize; 3]) -> Result<[f64; 3]> {
    let mut conc = alpha;
    if alpha.contains(&0.0) {
        for k in 0..3 {
            conc[k] += observed[k] as f64;
        }
    }
    if let Some(k) = (0..3).find(|&k| conc[k] <= 0.0) {
        return Err(Error::InfeasibleInit(format!(
            "class {k} is never observed and its prior weight is zero"
        )));
    }
    Ok(conc)
}

/// Draws sorted initial scores: one draw per position from the normal of
/// its class, then sorted so the rank constraint holds.
fn initial_scores<R: Rng + ?Sized>(
    rng: &mut R,
    d_aug: &[u8],
    params: &TrinormalParams,
) -> Vec<f64> {
    let mut q: Vec<f64> = d_aug
        .iter()
        .map(|&k| {
            let (m, s) = params.class_location_scale(k as usize);
            m + s * rng.sample::<f64, _>(rand_distr::StandardNormal)
        })
        .collect();
    q.sort_by(f64::total_cmp);
    for k in 1..q.len() {
        if q[k] <= q[k - 1] {
            q[k] = q[k - 1].next_up();
        }
    }
    q
}

/// Initializes a chain: imputes unverified labels from a prevalence vector
/// drawn from the Dirichlet prior, then draws sorted initial scores. With
/// no unverified labels the imputation consumes no randomness.
pub fn init_chain<R: Rng + ?Sized>(rd: &RankedData, cfg: &ChainConfig, rng: &mut R) -> Result<ChainState> {
    if rd.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 subjects, got {}",
            rd.len()
        )));
    }
    let observed = observed_counts(rd);
    let unverified: Vec<usize> = rd
        .l_sorted
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == Label::Unverified)
        .map(|(k, _)| k)
        .collect();

    let mut d_aug: Vec<u8> = rd.l_sorted.iter().map(|l| l.class().unwrap_or(0) as u8).collect();
    let lambda = if unverified.is_empty() {
        if let Some(k) = (0..3).find(|&k| observed[k] == 0) {
            return Err(Error::InsufficientData(format!(
                "no subject with label {k}"
            )));
        }
        posterior_mean_lambda(cfg.dirichlet_alpha, observed)
    } else {
        let conc = init_concentration(cfg.dirichlet_alpha, observed)?;
        let lambda = sample_dirichlet(rng, conc)?;
        for &k in &unverified {
            d_aug[k] = categorical_unnormalized(rng, &lambda, 1.0) as u8;
        }
        lambda
    };

    let q_sorted = initial_scores(rng, &d_aug, &cfg.init);
    Ok(ChainState {
        q_sorted,
        d_aug,
        params: cfg.init,
        lambda,
        unverified,
        skips: SkipCounts::default(),
    })
}

fn posterior_mean_lambda(alpha: [f64; 3], counts: [usize; 3]) -> [f64; 3] {
    let w = [
        alpha[0] + counts[0] as f64,
        alpha[1] + counts[1] as f64,
        alpha[2] + counts[2] as f64,
    ];
    let t: f64 = w.iter().sum();
    [w[0] / t, w[1] / t, 1.0 - w[0] / t - w[1] / t]
}

/// Sample mean and sum of squared deviations.
fn mean_and_ss(values: impl Iterator<Item = f64> + Clone) -> (usize, f64, f64) {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return (0, 0.0, 0.0);
    }
    let mean = sum / n as f64;
    let ss = values.map(|v| (v - mean) * (v - mean)).sum();
    (n, mean, ss)
}

impl ChainState {
    /// Updates every sorted score from its truncated-normal full
    /// conditional, in ascending order. The left neighbour has already been
    /// updated in this sweep; the right one has not.
    pub fn sweep_q<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let n = self.q_sorted.len();
        for k in 0..n {
            let lo = if k == 0 { f64::NEG_INFINITY } else { self.q_sorted[k - 1] };
            let hi = if k + 1 == n { f64::INFINITY } else { self.q_sorted[k + 1] };
            let (m, s) = self.params.class_location_scale(self.d_aug[k] as usize);
            self.q_sorted[k] = sample_truncated_normal(rng, m, s, Interval { lo, hi }).map_err(|e| match e {
                Error::Degenerate { lo, hi, .. } => Error::Degenerate { lo, hi, index: Some(k) },
                other => other,
            })?;
        }
        debug_assert!(self.q_sorted.windows(2).all(|w| w[0] < w[1]));
        Ok(())
    }

    /// Generalized Gibbs move along the affine group acting on
    /// `(scores, mu1, sigma1, mu2, sigma2)`.
    ///
    /// Scaling everything by `s` leaves the class 0 and class 2 terms
    /// invariant up to Jacobians, so with Haar measure `ds / s` the
    /// conditional of `s` depends only on the class 1 scores:
    /// `s^2 ~ Gamma(n1 / 2 + 1, rate = S1 / 2)`, `S1` their sum of squares.
    /// Shifting by `t` gives `t ~ N(-mean1, 1 / n1)` truncated so that the
    /// shifted means keep their signs. Skipped when no score is assigned to
    /// class 1.
    pub fn sweep_group<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let ones = self
            .q_sorted
            .iter()
            .zip(&self.d_aug)
            .filter(|(_, &d)| d == 1)
            .map(|(q, _)| *q);
        let (n1, sum1, ss1) = ones.fold((0usize, 0.0, 0.0), |(n, s, ss), q| (n + 1, s + q, ss + q * q));
        if n1 == 0 || ss1.is_nan() || ss1 <= 0.0 {
            return Ok(());
        }
        let shape = 0.5 * n1 as f64 + 1.0;
        let v = rand_distr::Gamma::new(shape, 2.0 / ss1)
            .map_err(|e| Error::domain(e.to_string()))?
            .sample(rng);
        let scale = v.sqrt();
        let mean1 = if self.transform_scores(scale, 0.0) { scale * sum1 } else { sum1 } / n1 as f64;
        let iv = Interval { lo: -self.params.mu2, hi: -self.params.mu1 };
        match sample_truncated_normal(rng, -mean1, (1.0 / n1 as f64).sqrt(), iv) {
            Ok(t) => {
                self.transform_scores(1.0, t);
            }
            Err(Error::Degenerate { .. }) => {}
            Err(e) => return Err(e),
        }
        Ok(())
    }

    /// Applies `q -> s q + t` to every score and the matching map to the
    /// class 0 and class 2 parameters. Left untouched if rounding would
    /// break the strict ordering or a sign constraint.
    fn transform_scores(&mut self, s: f64, t: f64) -> bool {
        let q: Vec<f64> = self.q_sorted.iter().map(|&x| s * x + t).collect();
        let p = TrinormalParams {
            mu1: s * self.params.mu1 + t,
            sigma1: s * self.params.sigma1,
            mu2: s * self.params.mu2 + t,
            sigma2: s * self.params.sigma2,
        };
        if q.windows(2).all(|w| w[0] < w[1]) && q.iter().all(|x| x.is_finite()) && p.validate().is_ok() {
            self.q_sorted = q;
            self.params = p;
            true
        } else {
            false
        }
    }

    /// Conjugate update of the class 0 and class 2 parameters.
    ///
    /// For each class, `sigma^2` is drawn from `IG((n - 1)/2, SS/2)`, where
    /// `SS` is the sum of squared deviations of the class scores, and then
    /// `mu` from the normal `N(mean, sigma^2 / n)` truncated to the sign
    /// constraint. A class with `n < 2` or zero spread keeps its previous
    /// values and is counted in [`SkipCounts`].
    pub fn sweep_params<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        for class in [0u8, 2u8] {
            let scores = self
                .q_sorted
                .iter()
                .zip(&self.d_aug)
                .filter(move |(_, &d)| d == class)
                .map(|(q, _)| *q);
            let (n, mean, ss) = mean_and_ss(scores);
            if n < 2 || ss.is_nan() || ss <= 0.0 {
                match class {
                    0 => self.skips.class0 += 1,
                    _ => self.skips.class2 += 1,
                }
                continue;
            }
            let var = sample_inverse_gamma(rng, 0.5 * (n as f64 - 1.0), 0.5 * ss)?;
            let sigma = var.sqrt();
            let sd_mean = (var / n as f64).sqrt();
            let iv = if class == 0 {
                Interval { lo: f64::NEG_INFINITY, hi: 0.0 }
            } else {
                Interval { lo: 0.0, hi: f64::INFINITY }
            };
            let mu = sample_truncated_normal(rng, mean, sd_mean, iv)?;
            if class == 0 {
                self.params.mu1 = mu;
                self.params.sigma1 = sigma;
            } else {
                self.params.mu2 = mu;
                self.params.sigma2 = sigma;
            }
        }
        Ok(())
    }

    /// Draws the prevalences from `Dir(alpha + class counts)`.
    pub fn sweep_lambda<R: Rng + ?Sized>(&mut self, alpha: [f64; 3], rng: &mut R) -> Result<()> {
        let c = class_counts(&self.d_aug);
        let conc = [alpha[0] + c[0] as f64, alpha[1] + c[1] as f64, alpha[2] + c[2] as f64];
        self.lambda = sample_dirichlet(rng, conc)?;
        Ok(())
    }

    /// Re-imputes unverified labels with probabilities proportional to
    /// `lambda_k * phi_k(q)`, computed in log space.
    pub fn sweep_labels<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let ln_lambda = self.lambda.map(f64::ln);
        let loc = [
            self.params.class_location_scale(0),
            self.params.class_location_scale(1),
            self.params.class_location_scale(2),
        ];
        for &k in &self.unverified {
            let q = self.q_sorted[k];
            let p = label_probabilities(q, &ln_lambda, &loc).ok_or_else(|| {
                Error::domain(format!("all class densities vanish at sorted position {k}"))
            })?;
            self.d_aug[k] = categorical_unnormalized(rng, &p, p.iter().sum()) as u8;
        }
        Ok(())
    }

    fn record(&self, iter: usize, youden: bool) -> Draw {
        let surface = self.params.to_surface_params();
        Draw {
            iter,
            params: self.params,
            surface,
            lambda: self.lambda,
            vus: vus(&surface),
            youden: youden.then(|| youden_index(&self.params)),
        }
    }
}

/// Normalized class probabilities for a latent score `q`, or `None` if all
/// three terms are zero.
pub fn label_probabilities(q: f64, ln_lambda: &[f64; 3], loc: &[(f64, f64); 3]) -> Option<[f64; 3]> {
    let lp: [f64; 3] = std::array::from_fn(|d| ln_lambda[d] + normal_ln_pdf_unchecked(q, loc[d].0, loc[d].1));
    let max = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return None;
    }
    let w = lp.map(|v| (v - max).exp());
    let total: f64 = w.iter().sum();
    Some(w.map(|v| v / total))
}

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Draw {
    pub iter: usize,
    pub params: TrinormalParams,
    pub surface: SurfaceParams,
    pub lambda: [f64; 3],
    pub vus: f64,
    pub youden: Option<YoudenIndex>,
}

/// Output of one or more chains.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PosteriorDraws {
    /// Kept draws, after burn-in and thinning.
    pub draws: Vec<Draw>,
    /// Burn-in iterations (thinned), populated when `keep_burn_in` is set.
    pub burn_in: Vec<Draw>,
    pub skips: SkipCounts,
    pub n_unverified: usize,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Pools the kept draws of several chains; burn-in rows are dropped.
    pub fn concat(chains: Vec<PosteriorDraws>) -> PosteriorDraws {
        let mut out = PosteriorDraws::default();
        for c in chains {
            out.draws.extend(c.draws);
            out.skips.class0 += c.skips.class0;
            out.skips.class2 += c.skips.class2;
            out.n_unverified = c.n_unverified;
        }
        out
    }
}

/// Main and auxiliary generators of chain `index`.
fn chain_rngs(seed: u64, index: u64) -> (ChainRng, ChainRng) {
    (chain_rng(seed, 2 * index), chain_rng(seed, 2 * index + 1))
}

fn record_iteration(out: &mut PosteriorDraws, state: &ChainState, cfg: &ChainConfig, t: usize) {
    if t < cfg.burn_in {
        if cfg.keep_burn_in && t.is_multiple_of(cfg.thin) {
            out.burn_in.push(state.record(t, false));
        }
    } else if (t - cfg.burn_in).is_multiple_of(cfg.thin) {
        out.draws.push(state.record(t, cfg.compute_youden));
    }
}

/// Runs chain 0 of the sampler with label augmentation.
pub fn run_chain(rd: &RankedData, cfg: &ChainConfig) -> Result<PosteriorDraws> {
    run_chain_indexed(rd, cfg, 0)
}

/// Runs chain `index` of the sampler with label augmentation.
///
/// With no unverified labels the prevalence and label sweeps are skipped and
/// the main generator sees exactly the draws of [`run_chain_verified`].
/// The recorded prevalences then come from `Dir(alpha + counts)` on a
/// separate generator stream.
pub fn run_chain_indexed(rd: &RankedData, cfg: &ChainConfig, index: u64) -> Result<PosteriorDraws> {
    cfg.validate()?;
    let (mut rng, mut aux) = chain_rngs(cfg.seed, index);
    let mut state = init_chain(rd, cfg, &mut rng)?;
    let augment = !state.unverified.is_empty();
    let counts = observed_counts(rd);
    let mut out = PosteriorDraws {
        n_unverified: state.unverified.len(),
        ..Default::default()
    };
    out.draws.reserve(cfg.n_kept());

    for t in 0..cfg.iterations {
        state.sweep_q(&mut rng)?;
        if cfg.group_moves {
            state.sweep_group(&mut rng)?;
        }
        state.sweep_params(&mut rng)?;
        if augment {
            state.sweep_lambda(cfg.dirichlet_alpha, &mut rng)?;
            state.sweep_labels(&mut rng)?;
        } else {
            state.lambda = verified_lambda(cfg.dirichlet_alpha, counts, &mut aux)?;
        }
        record_iteration(&mut out, &state, cfg, t);
    }
    out.skips = state.skips;
    Ok(out)
}

fn verified_lambda(alpha: [f64; 3], counts: [usize; 3], aux: &mut ChainRng) -> Result<[f64; 3]> {
    sample_dirichlet(
        aux,
        [alpha[0] + counts[0] as f64, alpha[1] + counts[1] as f64, alpha[2] + counts[2] as f64],
    )
}

/// Sampler for fully verified data: score sweep and parameter sweep only.
pub fn run_chain_verified(rd: &RankedData, cfg: &ChainConfig) -> Result<PosteriorDraws> {
    cfg.validate()?;
    if rd.has_unverified() {
        return Err(Error::domain("data contain unverified labels"));
    }
    let counts = observed_counts(rd);
    if let Some(k) = (0..3).find(|&k| counts[k] == 0) {
        return Err(Error::InsufficientData(format!("no subject with label {k}")));
    }
    let (mut rng, mut aux) = chain_rngs(cfg.seed, 0);
    let d: Vec<u8> = rd.l_sorted.iter().map(|l| l.class().unwrap() as u8).collect();
    let mut state = ChainState {
        q_sorted: initial_scores(&mut rng, &d, &cfg.init),
        d_aug: d,
        params: cfg.init,
        lambda: posterior_mean_lambda(cfg.dirichlet_alpha, counts),
        unverified: Vec::new(),
        skips: SkipCounts::default(),
    };
    let mut out = PosteriorDraws::default();
    for t in 0..cfg.iterations {
        state.sweep_q(&mut rng)?;
        if cfg.group_moves {
            state.sweep_group(&mut rng)?;
        }
        state.sweep_params(&mut rng)?;
        state.lambda = verified_lambda(cfg.dirichlet_alpha, counts, &mut aux)?;
        record_iteration(&mut out, &state, cfg, t);
    }
    out.skips = state.skips;
    Ok(out)
}

/// Runs `chains` independent chains in parallel (chain `k` on its own
/// generator streams) and returns them in chain order.
pub fn run_chains(rd: &RankedData, cfg: &ChainConfig, chains: usize) -> Result<Vec<PosteriorDraws>> {
    if chains == 0 {
        return Err(Error::config("chains", "must be at least 1"));
    }
    (0..chains as u64)
        .into_par_iter()
        .map(|k| run_chain_indexed(rd, cfg, k))
        .collect()
}

/// Mean, standard deviation and equal-tailed 95% interval of one quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantitySummary {
    pub mean: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Linear-interpolation percentile (`p` in `[0, 1]`) of sorted data.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl QuantitySummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("cannot summarize an empty sample"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(QuantitySummary {
            mean,
            sd,
            ci_lower: percentile_sorted(&sorted, 0.025),
            ci_upper: percentile_sorted(&sorted, 0.975),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub n_draws: usize,
    pub mu1: QuantitySummary,
    pub sigma1: QuantitySummary,
    pub mu2: QuantitySummary,
    pub sigma2: QuantitySummary,
    pub a: QuantitySummary,
    pub b: QuantitySummary,
    pub c: QuantitySummary,
    pub d: QuantitySummary,
    pub lambda0: QuantitySummary,
    pub lambda1: QuantitySummary,
    pub lambda2: QuantitySummary,
    pub vus: QuantitySummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub youden: Option<QuantitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub youden_c1: Option<QuantitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub youden_c2: Option<QuantitySummary>,
}

impl PosteriorSummary {
    /// Posterior-mean surface parameters.
    pub fn surface_mean(&self) -> SurfaceParams {
        SurfaceParams {
            a: self.a.mean,
            b: self.b.mean,
            c: self.c.mean,
            d: self.d.mean,
        }
    }
}

pub fn summarize(draws: &PosteriorDraws) -> Result<PosteriorSummary> {
    let d = &draws.draws;
    if d.is_empty() {
        return Err(Error::domain("no posterior draws to summarize"));
    }
    let q = |f: &dyn Fn(&Draw) -> f64| QuantitySummary::from_values(&d.iter().map(f).collect::<Vec<_>>());
    let youden = |f: &dyn Fn(&YoudenIndex) -> f64| -> Result<Option<QuantitySummary>> {
        let v: Option<Vec<f64>> = d.iter().map(|x| x.youden.as_ref().map(f)).collect();
        v.map(|v| QuantitySummary::from_values(&v)).transpose()
    };
    Ok(PosteriorSummary {
        n_draws: d.len(),
        mu1: q(&|x| x.params.mu1)?,
        sigma1: q(&|x| x.params.sigma1)?,
        mu2: q(&|x| x.params.mu2)?,
        sigma2: q(&|x| x.params.sigma2)?,
        a: q(&|x| x.surface.a)?,
        b: q(&|x| x.surface.b)?,
        c: q(&|x| x.surface.c)?,
        d: q(&|x| x.surface.d)?,
        lambda0: q(&|x| x.lambda[0])?,
        lambda1: q(&|x| x.lambda[1])?,
        lambda2: q(&|x| x.lambda[2])?,
        vus: q(&|x| x.vus)?,
        youden: youden(&|y| y.yi)?,
        youden_c1: youden(&|y| y.c1)?,
        youden_c2: youden(&|y| y.c2)?,
    })
}
