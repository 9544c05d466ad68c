//! Synthetic data generation, verification mechanisms and replicated
//! simulation studies.
//!
//! Latent scores are drawn per class, then mapped to the raw scale with a
//! strictly increasing transform, so the latent scores are the true
//! normalizing transform of the raw data. Verification mechanisms turn some
//! labels into [`Label::Unverified`]; measurements are never altered.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::dist::{chain_rng, std_normal_cdf};
use crate::error::{Error, Result};
use crate::gibbs::{run_chain, summarize, ChainConfig};
use crate::rank::{compute_ranks, Dataset, Label};
use crate::trinormal::{gauss_legendre, vus, SurfaceParams, TrinormalParams};

/// Class-conditional distribution of the latent scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatentModel {
    Trinormal {
        mu1: f64,
        sigma1: f64,
        mu2: f64,
        sigma2: f64,
    },
    /// `Beta(shape[k][0], shape[k][1])` for class `k`.
    Beta { shapes: [[f64; 2]; 3] },
}

impl LatentModel {
    pub fn trinormal(p: TrinormalParams) -> Self {
        LatentModel::Trinormal {
            mu1: p.mu1,
            sigma1: p.sigma1,
            mu2: p.mu2,
            sigma2: p.sigma2,
        }
    }

    pub fn truth(&self) -> Option<TrinormalParams> {
        match *self {
            LatentModel::Trinormal { mu1, sigma1, mu2, sigma2 } => Some(TrinormalParams { mu1, sigma1, mu2, sigma2 }),
            LatentModel::Beta { .. } => None,
        }
    }

    /// Population VUS of the latent model.
    pub fn true_vus(&self) -> f64 {
        match self {
            LatentModel::Trinormal { .. } => vus(&self.truth().unwrap().to_surface_params()),
            LatentModel::Beta { shapes } => beta_vus(shapes),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            LatentModel::Trinormal { .. } => self
                .truth()
                .unwrap()
                .validate()
                .map_err(|e| Error::config("latent", e.to_string())),
            LatentModel::Beta { shapes } => {
                if shapes.iter().flatten().all(|v| v.is_finite() && *v > 0.0) {
                    Ok(())
                } else {
                    Err(Error::config("latent.shapes", "beta shapes must be positive"))
                }
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, class: usize, rng: &mut R) -> Result<f64> {
        match self {
            LatentModel::Trinormal { .. } => {
                let (m, s) = self.truth().unwrap().class_location_scale(class);
                Ok(m + s * rng.sample::<f64, _>(StandardNormal))
            }
            LatentModel::Beta { shapes } => {
                let [a, b] = shapes[class];
                let beta = Beta::new(a, b).map_err(|e| Error::domain(e.to_string()))?;
                Ok(beta.sample(rng))
            }
        }
    }
}

/// `P(X0 < X1 < X2)` for independent beta classes, by composite
/// Gauss-Legendre integration of `F0(y) (1 - F2(y)) f1(y)` on `(0, 1)`.
pub fn beta_vus(shapes: &[[f64; 2]; 3]) -> f64 {
    let [a1, b1] = shapes[1];
    let ln_norm = libm::lgamma(a1 + b1) - libm::lgamma(a1) - libm::lgamma(b1);
    let rule = gauss_legendre(20);
    let panels = 200;
    let w = 1.0 / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * w;
        for &(x, wt) in &rule {
            let y = mid + 0.5 * w * x;
            let f1 = (ln_norm + (a1 - 1.0) * y.ln() + (b1 - 1.0) * (1.0 - y).ln()).exp();
            let f0 = beta_reg(shapes[0][0], shapes[0][1], y);
            let s2 = 1.0 - beta_reg(shapes[2][0], shapes[2][1], y);
            acc += 0.5 * w * wt * f0 * s2 * f1;
        }
    }
    acc
}

/// Strictly increasing map from latent scores to raw measurements.
#[derive(Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Identity,
    /// Raw data are `exp(latent)`; the normalizing transform is `log`.
    Exp,
    /// Raw data are `1 / (1 + exp(-latent))`; the normalizing transform is
    /// `logit`.
    InvLogit,
    #[serde(skip)]
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => f.write_str("Identity"),
            Transform::Exp => f.write_str("Exp"),
            Transform::InvLogit => f.write_str("InvLogit"),
            Transform::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PartialEq for Transform {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Transform::Custom(a), Transform::Custom(b)) => Arc::ptr_eq(a, b),
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }
}

impl Transform {
    pub fn apply(&self, latent: f64) -> f64 {
        match self {
            Transform::Identity => latent,
            Transform::Exp => latent.exp(),
            Transform::InvLogit => 1.0 / (1.0 + (-latent).exp()),
            Transform::Custom(f) => f(latent),
        }
    }
}

/// Scale on which a probit verification link is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkScale {
    #[default]
    Latent,
    Raw,
}

/// A single verification mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mechanism {
    /// Subjects above the `ceil(p1 N)`-th order statistic are always
    /// verified; the rest with probability `p2`.
    Threshold { p1: f64, p2: f64 },
    /// Verified with probability `Phi(alpha + beta * value)`.
    Probit {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        scale: LinkScale,
    },
}

impl Mechanism {
    fn validate(&self, key: &str) -> Result<()> {
        match *self {
            Mechanism::Threshold { p1, p2 } => {
                if !(p1 > 0.0 && p1 <= 1.0) {
                    return Err(Error::config(format!("{key}.p1"), "must lie in (0, 1]"));
                }
                if !(p2 > 0.0 && p2 <= 1.0) {
                    return Err(Error::config(format!("{key}.p2"), "must lie in (0, 1]"));
                }
            }
            Mechanism::Probit { alpha, beta, .. } => {
                if !alpha.is_finite() {
                    return Err(Error::config(format!("{key}.alpha"), "must be finite"));
                }
                if !(beta.is_finite() && beta > 0.0) {
                    return Err(Error::config(format!("{key}.beta"), "must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// How gold-standard verification is assigned.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Missingness {
    #[default]
    None,
    Threshold {
        p1: f64,
        p2: f64,
    },
    Probit {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        scale: LinkScale,
    },
    /// Class-specific mechanisms; verification depends on the true class.
    NonMar { classes: [Mechanism; 3] },
}

impl Missingness {
    fn validate(&self) -> Result<()> {
        match self {
            Missingness::None => Ok(()),
            Missingness::Threshold { p1, p2 } => {
                Mechanism::Threshold { p1: *p1, p2: *p2 }.validate("missingness")
            }
            Missingness::Probit { alpha, beta, scale } => Mechanism::Probit {
                alpha: *alpha,
                beta: *beta,
                scale: *scale,
            }
            .validate("missingness"),
            Missingness::NonMar { classes } => {
                for (k, m) in classes.iter().enumerate() {
                    m.validate(&format!("missingness.classes[{k}]"))?;
                }
                Ok(())
            }
        }
    }
}

/// One simulation design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub group_sizes: [usize; 3],
    pub latent: LatentModel,
    #[serde(default)]
    pub transform: Transform,
    #[serde(default)]
    pub missingness: Missingness,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_replicates() -> usize {
    20
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        if self.group_sizes.contains(&0) {
            return Err(Error::config("group_sizes", "every class needs at least one subject"));
        }
        if self.group_sizes.iter().sum::<usize>() < 3 {
            return Err(Error::config("group_sizes", "need at least 3 subjects"));
        }
        self.latent.validate()?;
        self.missingness.validate()
    }
}

/// A generated dataset together with everything needed to score it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub data: Dataset,
    /// Latent scores, aligned with `data.s`.
    pub latent: Vec<f64>,
    /// True class of every subject.
    pub true_labels: Vec<Label>,
    pub truth: Option<TrinormalParams>,
    pub true_vus: f64,
}

impl SimulatedData {
    /// Fraction of subjects with a verified label.
    pub fn verified_fraction(&self) -> f64 {
        verified_fraction(&self.data)
    }
}

pub fn verified_fraction(d: &Dataset) -> f64 {
    1.0 - d.n_unverified() as f64 / d.len() as f64
}

/// Draws one dataset from `sc`.
///
/// Subjects are laid out class by class. Raw measurements are the latent
/// scores passed through `sc.transform`; an error is returned if the
/// transform fails to be strictly increasing on the drawn sample.
pub fn generate_dataset<R: Rng + ?Sized>(sc: &Scenario, rng: &mut R) -> Result<SimulatedData> {
    sc.validate()?;
    let n: usize = sc.group_sizes.iter().sum();
    let mut latent = Vec::with_capacity(n);
    let mut true_labels = Vec::with_capacity(n);
    for (k, &nk) in sc.group_sizes.iter().enumerate() {
        for _ in 0..nk {
            latent.push(sc.latent.sample(k, rng)?);
            true_labels.push(Label::from_class(k));
        }
    }
    let raw: Vec<f64> = latent.iter().map(|&q| sc.transform.apply(q)).collect();
    check_strictly_increasing(&latent, &raw)?;

    let full = Dataset::new(raw, true_labels.clone())?;
    let data = match &sc.missingness {
        Missingness::None => full,
        Missingness::Threshold { p1, p2 } => apply_threshold_missingness(&full, *p1, *p2, rng)?,
        Missingness::Probit { alpha, beta, scale } => {
            let values = match scale {
                LinkScale::Latent => latent.as_slice(),
                LinkScale::Raw => full.s.as_slice(),
            };
            apply_probit_missingness(&full, values, *alpha, *beta, rng)?
        }
        Missingness::NonMar { classes } => apply_non_mar_missingness(&full, &latent, &true_labels, classes, rng)?,
    };
    Ok(SimulatedData {
        data,
        latent,
        true_labels,
        truth: sc.latent.truth(),
        true_vus: sc.latent.true_vus(),
    })
}

fn check_strictly_increasing(latent: &[f64], raw: &[f64]) -> Result<()> {
    let mut idx: Vec<usize> = (0..latent.len()).collect();
    idx.sort_by(|&i, &j| latent[i].total_cmp(&latent[j]));
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        if !raw[i].is_finite() || !raw[j].is_finite() {
            return Err(Error::domain("transform produced a non-finite measurement"));
        }
        if latent[i] < latent[j] && raw[i] >= raw[j] {
            return Err(Error::domain(format!(
                "transform is not strictly increasing on the sample: {} -> {}, {} -> {}",
                latent[i], raw[i], latent[j], raw[j]
            )));
        }
    }
    Ok(())
}

/// Value of the `ceil(p1 * n)`-th smallest entry (1-based, clamped to
/// `1..=n`).
fn order_statistic(values: &[f64], p1: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = ((p1 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

fn mask<R: Rng + ?Sized>(d: &Dataset, rng: &mut R, prob: impl Fn(usize) -> f64) -> Dataset {
    let l = d
        .l
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let p = prob(i);
            if p >= 1.0 || rng.random::<f64>() < p {
                l
            } else {
                Label::Unverified
            }
        })
        .collect();
    Dataset { s: d.s.clone(), l }
}

/// Threshold verification on the raw measurements: subjects above the
/// `ceil(p1 N)`-th order statistic are always verified, the others with
/// probability `p2`.
pub fn apply_threshold_missingness<R: Rng + ?Sized>(d: &Dataset, p1: f64, p2: f64, rng: &mut R) -> Result<Dataset> {
    Mechanism::Threshold { p1, p2 }.validate("threshold")?;
    let cut = order_statistic(&d.s, p1);
    Ok(mask(d, rng, |i| if d.s[i] > cut { 1.0 } else { p2 }))
}

/// Probit verification: subject `i` is verified with probability
/// `Phi(alpha + beta * values[i])`.
pub fn apply_probit_missingness<R: Rng + ?Sized>(
    d: &Dataset,
    values: &[f64],
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Result<Dataset> {
    Mechanism::Probit { alpha, beta, scale: LinkScale::Latent }.validate("probit")?;
    if values.len() != d.len() {
        return Err(Error::domain("probit values must align with the dataset"));
    }
    Ok(mask(d, rng, |i| std_normal_cdf(alpha + beta * values[i])))
}

/// Class-dependent verification. Subject `i` of true class `k` is verified
/// according to `mechanisms[k]`; a threshold mechanism uses the order
/// statistic of class `k`'s own latent scores.
pub fn apply_non_mar_missingness<R: Rng + ?Sized>(
    d: &Dataset,
    latent: &[f64],
    true_labels: &[Label],
    mechanisms: &[Mechanism; 3],
    rng: &mut R,
) -> Result<Dataset> {
    if latent.len() != d.len() || true_labels.len() != d.len() {
        return Err(Error::domain("latent scores and true labels must align with the dataset"));
    }
    for (k, m) in mechanisms.iter().enumerate() {
        m.validate(&format!("classes[{k}]"))?;
    }
    let mut cuts = [f64::INFINITY; 3];
    for (k, m) in mechanisms.iter().enumerate() {
        if let Mechanism::Threshold { p1, .. } = m {
            let vals: Vec<f64> = (0..d.len())
                .filter(|&i| true_labels[i].class() == Some(k))
                .map(|i| latent[i])
                .collect();
            if !vals.is_empty() {
                cuts[k] = order_statistic(&vals, *p1);
            }
        }
    }
    let mut probs = Vec::with_capacity(d.len());
    for ((&q, &raw), t) in latent.iter().zip(&d.s).zip(true_labels) {
        let k = t
            .class()
            .ok_or_else(|| Error::domain("true labels must all be verified classes"))?;
        probs.push(match mechanisms[k] {
            Mechanism::Threshold { p2, .. } => {
                if q > cuts[k] {
                    1.0
                } else {
                    p2
                }
            }
            Mechanism::Probit { alpha, beta, scale } => {
                let v = match scale {
                    LinkScale::Latent => q,
                    LinkScale::Raw => raw,
                };
                std_normal_cdf(alpha + beta * v)
            }
        });
    }
    Ok(mask(d, rng, |i| probs[i]))
}

/// Point estimates produced for one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimates {
    pub surface: SurfaceParams,
    pub vus: f64,
}

/// Bias and MSE of one estimand over the successful replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimandReport {
    pub estimand: String,
    pub bias: f64,
    pub bias_mcse: f64,
    pub mse: f64,
    pub mse_mcse: f64,
    pub replicates: usize,
    pub failures: usize,
}

impl EstimandReport {
    fn from_errors(name: &str, errors: &[f64], failures: usize) -> Self {
        let r = errors.len();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let mcse = |v: &[f64], m: f64| {
            if v.len() < 2 {
                f64::NAN
            } else {
                (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
                    / (v.len() as f64).sqrt()
            }
        };
        if r == 0 {
            return EstimandReport {
                estimand: name.to_string(),
                bias: f64::NAN,
                bias_mcse: f64::NAN,
                mse: f64::NAN,
                mse_mcse: f64::NAN,
                replicates: 0,
                failures,
            };
        }
        let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
        let bias = mean(errors);
        let mse = mean(&sq);
        EstimandReport {
            estimand: name.to_string(),
            bias,
            bias_mcse: mcse(errors, bias),
            mse,
            mse_mcse: mcse(&sq, mse),
            replicates: r,
            failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub rows: Vec<EstimandReport>,
    pub replicates: usize,
    pub failures: usize,
    /// Error messages of failed replicates, by replicate index.
    pub failure_messages: Vec<(usize, String)>,
    /// Mean verified fraction across generated datasets.
    pub mean_verified_fraction: f64,
}

impl StudyReport {
    pub fn row(&self, estimand: &str) -> Option<&EstimandReport> {
        self.rows.iter().find(|r| r.estimand == estimand)
    }
}

/// Seed of the sampler for replicate `r`.
pub fn replicate_chain_seed(seed: u64, r: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (r as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `sc.replicates` replicates in parallel with a caller-supplied
/// estimator. Replicate `r` draws its data from stream `r` of `sc.seed`
/// and passes `replicate_chain_seed(sc.seed, r)` to the estimator.
/// Aggregation happens in replicate order.
pub fn run_study_with<F>(sc: &Scenario, estimator: F) -> Result<StudyReport>
where
    F: Fn(&SimulatedData, u64) -> Result<Estimates> + Sync,
{
    sc.validate()?;
    let outcomes: Vec<(Result<Estimates>, Option<SimulatedData>)> = (0..sc.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = chain_rng(sc.seed, r as u64);
            match generate_dataset(sc, &mut rng) {
                Ok(sim) => (estimator(&sim, replicate_chain_seed(sc.seed, r)), Some(sim)),
                Err(e) => (Err(e), None),
            }
        })
        .collect();

    let truth_surface = sc.latent.truth().map(|p| p.to_surface_params());
    let true_vus = sc.latent.true_vus();
    let mut errs: [Vec<f64>; 5] = Default::default();
    let mut failure_messages = Vec::new();
    let mut verified = Vec::new();
    for (r, (est, sim)) in outcomes.into_iter().enumerate() {
        if let Some(sim) = &sim {
            verified.push(sim.verified_fraction());
        }
        match est {
            Ok(e) => {
                if let Some(t) = truth_surface {
                    errs[0].push(e.surface.a - t.a);
                    errs[1].push(e.surface.b - t.b);
                    errs[2].push(e.surface.c - t.c);
                    errs[3].push(e.surface.d - t.d);
                }
                errs[4].push(e.vus - true_vus);
            }
            Err(e) => failure_messages.push((r, e.to_string())),
        }
    }
    let failures = failure_messages.len();
    let names = ["a", "b", "c", "d", "vus"];
    let rows = names
        .iter()
        .zip(&errs)
        .filter(|(name, _)| truth_surface.is_some() || **name == "vus")
        .map(|(name, e)| EstimandReport::from_errors(name, e, failures))
        .collect();
    Ok(StudyReport {
        rows,
        replicates: sc.replicates,
        failures,
        failure_messages,
        mean_verified_fraction: verified.iter().sum::<f64>() / verified.len().max(1) as f64,
    })
}

/// Posterior-mean estimates from one chain of the rank-likelihood sampler.
pub fn fit_posterior_means(sim: &SimulatedData, cfg: &ChainConfig, seed: u64) -> Result<Estimates> {
    let mut tie_rng = chain_rng(seed, u64::MAX);
    let rd = compute_ranks(&sim.data, &mut tie_rng)?;
    let cfg = ChainConfig { seed, ..cfg.clone() };
    let draws = run_chain(&rd, &cfg)?;
    let s = summarize(&draws)?;
    Ok(Estimates {
        surface: s.surface_mean(),
        vus: s.vus.mean,
    })
}

/// Replicated study with the rank-likelihood sampler as the estimator.
pub fn run_study(sc: &Scenario, cfg: &ChainConfig) -> Result<StudyReport> {
    cfg.validate()?;
    run_study_with(sc, |sim, seed| fit_posterior_means(sim, cfg, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::empirical_vus;

    fn reference_design() -> TrinormalParams {
        TrinormalParams::new(-1.8, 1.5, 2.0, 2.0).unwrap()
    }

    fn scenario(n: usize, missingness: Missingness) -> Scenario {
        Scenario {
            group_sizes: [n, n, n],
            latent: LatentModel::trinormal(reference_design()),
            transform: Transform::Exp,
            missingness,
            replicates: 1,
            seed: 7,
        }
    }

    #[test]
    fn generates_labelled_rows() {
        let sim = generate_dataset(&scenario(50, Missingness::None), &mut chain_rng(1, 0)).unwrap();
        assert_eq!(sim.data.len(), 150);
        assert_eq!(sim.data.n_unverified(), 0);
        assert_eq!(sim.data.label_counts(), [50, 50, 50, 0]);
        for (s, q) in sim.data.s.iter().zip(&sim.latent) {
            assert_eq!(*s, q.exp());
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let sc = scenario(40, Missingness::Threshold { p1: 0.8, p2: 0.4 });
        let a = generate_dataset(&sc, &mut chain_rng(3, 0)).unwrap();
        let b = generate_dataset(&sc, &mut chain_rng(3, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_monotone_transform_rejected() {
        let mut sc = scenario(20, Missingness::None);
        sc.transform = Transform::Custom(Arc::new(|x: f64| x * x));
        assert!(matches!(generate_dataset(&sc, &mut chain_rng(1, 0)), Err(Error::Domain(_))));
        sc.transform = Transform::Custom(Arc::new(|x: f64| x.powi(3)));
        assert!(generate_dataset(&sc, &mut chain_rng(1, 0)).is_ok());
    }

    #[test]
    fn beta_vus_value() {
        let shapes = [[3.0, 5.0], [2.0, 2.0], [5.0, 3.0]];
        assert!((beta_vus(&shapes) - 0.35815).abs() < 1e-5);
        // Identical classes.
        assert!((beta_vus(&[[2.0, 3.0]; 3]) - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn beta_groups_empirical_vus() {
        let sc = Scenario {
            group_sizes: [3000, 3000, 3000],
            latent: LatentModel::Beta { shapes: [[3.0, 5.0], [2.0, 2.0], [5.0, 3.0]] },
            transform: Transform::Identity,
            missingness: Missingness::None,
            replicates: 1,
            seed: 1,
        };
        let sim = generate_dataset(&sc, &mut chain_rng(11, 0)).unwrap();
        let v = empirical_vus(&sim.data.class_values(0), &sim.data.class_values(1), &sim.data.class_values(2)).unwrap();
        // Conservative SE bound for a U-statistic of size n: sqrt(v(1-v)/n).
        let se = (0.358 * 0.642 / 3000.0f64).sqrt();
        assert!((v - 0.35815).abs() < 3.0 * se, "{v}");
    }

    #[test]
    fn threshold_rates() {
        let d = generate_dataset(&scenario(200, Missingness::None), &mut chain_rng(2, 0)).unwrap().data;
        let mut rng = chain_rng(5, 0);
        assert_eq!(apply_threshold_missingness(&d, 0.8, 1.0, &mut rng).unwrap().n_unverified(), 0);

        let reps = 200;
        let mut acc = 0.0;
        for _ in 0..reps {
            let m = apply_threshold_missingness(&d, 0.8, 0.4, &mut rng).unwrap();
            assert_eq!(m.s, d.s);
            // Everyone above the 480th order statistic is verified.
            let cut = order_statistic(&d.s, 0.8);
            for (s, l) in m.s.iter().zip(&m.l) {
                if *s > cut {
                    assert_ne!(*l, Label::Unverified);
                }
            }
            acc += verified_fraction(&m);
        }
        assert!((acc / reps as f64 - 0.52).abs() < 0.005);

        let mut acc = 0.0;
        for _ in 0..reps {
            acc += verified_fraction(&apply_threshold_missingness(&d, 1.0, 0.5, &mut rng).unwrap());
        }
        assert!((acc / reps as f64 - 0.5).abs() < 0.01);
        assert!(apply_threshold_missingness(&d, 0.0, 0.5, &mut rng).is_err());
        assert!(apply_threshold_missingness(&d, 0.5, 1.5, &mut rng).is_err());
    }

    #[test]
    fn probit_rates() {
        // Closed form: E[Phi(alpha + beta Q)] = Phi((alpha + beta mu) / sqrt(1 + beta^2 sigma^2)).
        let p = reference_design();
        let expect: f64 = (0..3)
            .map(|k| {
                let (m, s) = p.class_location_scale(k);
                std_normal_cdf((0.106 + m) / (1.0 + s * s).sqrt())
            })
            .sum::<f64>()
            / 3.0;
        assert!((expect - 0.52).abs() < 0.011);
        let sc = scenario(200, Missingness::Probit { alpha: 0.106, beta: 1.0, scale: LinkScale::Latent });
        let reps = 100;
        let mut acc = 0.0;
        for r in 0..reps {
            acc += generate_dataset(&sc, &mut chain_rng(9, r)).unwrap().verified_fraction();
        }
        let se = (expect * (1.0 - expect) / (600.0 * reps as f64)).sqrt();
        assert!((acc / reps as f64 - expect).abs() < 4.0 * se + 0.002);

        let d = generate_dataset(&scenario(50, Missingness::None), &mut chain_rng(2, 0)).unwrap();
        let mut rng = chain_rng(0, 0);
        let all = apply_probit_missingness(&d.data, &d.latent, 40.0, 1.0, &mut rng).unwrap();
        assert_eq!(all.n_unverified(), 0);
        let mut acc = 0.0;
        for _ in 0..200 {
            acc += verified_fraction(&apply_probit_missingness(&d.data, &d.latent, 0.0, 1e-9, &mut rng).unwrap());
        }
        assert!((acc / 200.0 - 0.5).abs() < 0.01);
        assert!(apply_probit_missingness(&d.data, &d.latent, 0.0, 0.0, &mut rng).is_err());
    }

    fn per_class_missing_rates(mechs: [Mechanism; 3], reps: u64) -> [f64; 3] {
        let sc = scenario(200, Missingness::NonMar { classes: mechs });
        let mut missing = [0usize; 3];
        let mut total = [0usize; 3];
        for r in 0..reps {
            let sim = generate_dataset(&sc, &mut chain_rng(21, r)).unwrap();
            for (l, t) in sim.data.l.iter().zip(&sim.true_labels) {
                let k = t.class().unwrap();
                total[k] += 1;
                if *l == Label::Unverified {
                    missing[k] += 1;
                }
            }
        }
        std::array::from_fn(|k| missing[k] as f64 / total[k] as f64)
    }

    #[test]
    fn non_mar_threshold_rates() {
        let rates = per_class_missing_rates(
            [
                Mechanism::Threshold { p1: 0.8, p2: 0.1 },
                Mechanism::Threshold { p1: 0.6, p2: 0.2 },
                Mechanism::Threshold { p1: 0.4, p2: 0.4 },
            ],
            100,
        );
        for (r, t) in rates.iter().zip([0.72, 0.48, 0.24]) {
            assert!((r - t).abs() < 0.01, "{rates:?}");
        }
    }

    #[test]
    fn non_mar_identical_mechanisms_reduce_to_mar() {
        // Same probit link in every class: per-class rates follow the
        // class score distributions only, as under the MAR probit model.
        let m = Mechanism::Probit { alpha: 0.106, beta: 1.0, scale: LinkScale::Latent };
        let rates = per_class_missing_rates([m; 3], 50);
        let p = reference_design();
        for (k, r) in rates.iter().enumerate() {
            let (mu, s) = p.class_location_scale(k);
            let expect = 1.0 - std_normal_cdf((0.106 + mu) / (1.0 + s * s).sqrt());
            assert!((r - expect).abs() < 0.02, "{k}: {r} vs {expect}");
        }
    }

    #[test]
    fn scenario_validation() {
        let mut sc = scenario(10, Missingness::None);
        sc.replicates = 0;
        assert!(matches!(sc.validate(), Err(Error::Config { key, .. }) if key == "replicates"));
        let sc = scenario(10, Missingness::Probit { alpha: 0.0, beta: -1.0, scale: LinkScale::Latent });
        assert!(sc.validate().is_err());
    }

    #[test]
    fn study_harness_with_exact_estimator() {
        let mut sc = scenario(10, Missingness::None);
        sc.replicates = 5;
        let t = reference_design();
        let rep = run_study_with(&sc, |_, _| {
            Ok(Estimates { surface: t.to_surface_params(), vus: vus(&t.to_surface_params()) })
        })
        .unwrap();
        assert_eq!(rep.rows.len(), 5);
        for row in &rep.rows {
            assert_eq!(row.bias, 0.0);
            assert_eq!(row.mse, 0.0);
            assert_eq!(row.replicates, 5);
        }
    }

    #[test]
    fn study_single_replicate_and_failures() {
        let mut sc = scenario(10, Missingness::None);
        sc.replicates = 1;
        let rep = run_study_with(&sc, |sim, _| {
            Ok(Estimates { surface: sim.truth.unwrap().to_surface_params(), vus: sim.true_vus + 0.1 })
        })
        .unwrap();
        let v = rep.row("vus").unwrap();
        assert!((v.bias - 0.1).abs() < 1e-12);
        assert!((v.mse - 0.01).abs() < 1e-12);
        assert!(v.bias_mcse.is_nan());

        sc.replicates = 4;
        let rep = run_study_with(&sc, |sim, seed| {
            if seed % 2 == 0 {
                Err(Error::domain("synthetic failure"))
            } else {
                Ok(Estimates { surface: sim.truth.unwrap().to_surface_params(), vus: sim.true_vus })
            }
        })
        .unwrap();
        assert_eq!(rep.failures + rep.row("vus").unwrap().replicates, 4);
    }

    #[test]
    fn study_mse_dominates_bias() {
        let mut sc = scenario(10, Missingness::None);
        sc.replicates = 7;
        let rep = run_study_with(&sc, |sim, seed| {
            let noise = (seed % 1000) as f64 / 1e4;
            Ok(Estimates { surface: sim.truth.unwrap().to_surface_params(), vus: sim.true_vus + noise })
        })
        .unwrap();
        for r in &rep.rows {
            let n = r.replicates as f64;
            assert!(r.mse + 1e-15 >= r.bias * r.bias * (1.0 - 1.0 / n));
        }
    }

    #[test]
    fn beta_study_reports_vus_only() {
        let sc = Scenario {
            group_sizes: [20, 20, 20],
            latent: LatentModel::Beta { shapes: [[3.0, 5.0], [2.0, 2.0], [5.0, 3.0]] },
            transform: Transform::Identity,
            missingness: Missingness::Probit { alpha: 0.01, beta: 0.07, scale: LinkScale::Raw },
            replicates: 2,
            seed: 3,
        };
        let rep = run_study_with(&sc, |sim, _| {
            Ok(Estimates { surface: reference_design().to_surface_params(), vus: sim.true_vus })
        })
        .unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.rows[0].estimand, "vus");
    }

    #[test]
    fn small_brl_study_runs() {
        let mut sc = scenario(30, Missingness::Threshold { p1: 0.8, p2: 0.4 });
        sc.replicates = 2;
        let cfg = ChainConfig { iterations: 200, burn_in: 50, ..Default::default() };
        let rep = run_study(&sc, &cfg).unwrap();
        assert_eq!(rep.failures, 0);
        assert_eq!(rep.row("vus").unwrap().replicates, 2);
    }
}
