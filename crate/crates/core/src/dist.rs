//! Scalar distribution primitives.
//!
//! Every sampler here takes an explicit RNG handle and is a deterministic
//! function of the generator state and its arguments. Normal tail
//! probabilities are computed through `erfc`, so both `cdf` for very negative
//! arguments and the survival function for very positive ones keep full
//! relative precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// Generator owned by a single chain or replicate.
pub type ChainRng = ChaCha8Rng;

/// Builds the generator for `(seed, stream)`.
///
/// Streams of one seed are independent, so chain `k` of a fit or replicate
/// `r` of a study each get their own stream.
pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Open or half-open real interval with possibly infinite ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::domain(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub const fn unbounded() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains_strictly(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("sigma must be positive, got {sigma}")))
    }
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function. Accepts infinite arguments.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - cdf(z)`, accurate for large `z`.
#[inline]
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Log density of `N(mu, sigma^2)` at `x`.
#[inline]
pub fn normal_ln_pdf_unchecked(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    -0.5 * z * z - sigma.ln() - LN_SQRT_2PI
}

pub fn normal_pdf(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    check_finite("x", x)?;
    check_finite("mu", mu)?;
    check_sigma(sigma)?;
    Ok(std_normal_pdf((x - mu) / sigma) / sigma)
}

pub fn normal_cdf(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    check_finite("x", x)?;
    check_finite("mu", mu)?;
    check_sigma(sigma)?;
    Ok(std_normal_cdf((x - mu) / sigma))
}

/// Lower-tail rational approximation (Acklam), relative error about 1e-9.
fn quantile_initial(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `p <= 0.5` only; refined with two Halley steps on the lower-tail cdf,
/// which keeps relative precision down to subnormal `p`.
fn quantile_lower(p: f64) -> f64 {
    let mut x = quantile_initial(p);
    for _ in 0..2 {
        let pdf = std_normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let r = (std_normal_cdf(x) - p) / pdf;
        x -= r / (1.0 + 0.5 * x * r);
    }
    x
}

/// Standard normal quantile function on `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("quantile requires 0 < p < 1, got {p}")));
    }
    Ok(std_normal_quantile(p))
}

/// Unchecked quantile: returns `-inf` at 0 and `+inf` at 1.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else if p == 0.5 {
        0.0
    } else if p < 0.5 {
        quantile_lower(p)
    } else {
        // 1 - p is exact for p >= 0.5.
        -quantile_lower(1.0 - p)
    }
}

/// Width at which Robert's uniform proposal beats the exponential one for a
/// one-sided interval starting at `a >= 0`.
fn uniform_width_threshold(a: f64) -> f64 {
    let s = (a * a + 4.0).sqrt();
    2.0 / (a + s) * ((a * a - a * s) / 4.0 + 0.5).exp()
}

/// Uniform-proposal rejection on `[a, b]` (finite).
fn std_tn_uniform<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    // Mode of the density restricted to [a, b].
    let m = if a > 0.0 {
        a
    } else if b < 0.0 {
        b
    } else {
        0.0
    };
    loop {
        let z = a + (b - a) * rng.random::<f64>();
        let log_accept = 0.5 * (m * m - z * z);
        if rng.random::<f64>().ln() <= log_accept {
            return z;
        }
    }
}

/// Translated-exponential rejection on `[a, b]`, `a >= 0`, `b` possibly +inf.
fn std_tn_exponential<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        // 1 - u lies in (0, 1], so the log is finite.
        let e = -(1.0 - rng.random::<f64>()).ln() / rate;
        let z = a + e;
        if z > b {
            continue;
        }
        let d = z - rate;
        if rng.random::<f64>().ln() <= -0.5 * d * d {
            return z;
        }
    }
}

/// Draws `Z ~ N(0, 1)` conditioned on `a <= Z <= b`.
fn std_truncated_normal<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::INFINITY {
        return rng.sample(StandardNormal);
    }
    if a >= 0.0 {
        if b.is_finite() && b - a <= uniform_width_threshold(a) {
            std_tn_uniform(rng, a, b)
        } else {
            std_tn_exponential(rng, a, b)
        }
    } else if b <= 0.0 {
        -std_truncated_normal(rng, -b, -a)
    } else if b - a < 2.506_628_274_631_000_5 {
        // Interval straddles the mode and is narrow: uniform acceptance is at
        // least exp(-width^2 / 2) relative to the flat envelope.
        std_tn_uniform(rng, a, b)
    } else {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if a <= z && z <= b {
                return z;
            }
        }
    }
}

const MAX_ROUNDING_RETRIES: usize = 10_000;

/// Draws from `N(mu, sigma^2)` conditioned on the open interval `iv`.
///
/// The interval is standardized and the algorithm chosen from its position
/// relative to the mode: plain normal rejection for wide intervals around
/// the mode, uniform rejection for narrow ones, and an exponential envelope
/// for tails, so intervals many standard deviations out cost O(1) draws.
/// Returned values are strictly inside `iv`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    rng: &mut R,
    mu: f64,
    sigma: f64,
    iv: Interval,
) -> Result<f64> {
    check_finite("mu", mu)?;
    check_sigma(sigma)?;
    let Interval { lo, hi } = iv;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::domain(format!("invalid interval ({lo}, {hi})")));
    }
    // No representable value strictly between the ends.
    if lo.next_up() >= hi {
        return Err(Error::Degenerate { lo, hi, index: None });
    }
    let a = (lo - mu) / sigma;
    let b = (hi - mu) / sigma;

    if a.is_nan() || b.is_nan() || b - a < 1e-8 || a >= b {
        // The density is flat to within 1e-8 across the interval; sample on
        // the original scale so rounding of mu + sigma * z cannot pin the
        // draw to an endpoint.
        let m = if lo > mu {
            lo
        } else if hi < mu {
            hi
        } else {
            mu
        };
        for _ in 0..MAX_ROUNDING_RETRIES {
            let x = lo + (hi - lo) * rng.random::<f64>();
            if !iv.contains_strictly(x) {
                continue;
            }
            let zx = (x - mu) / sigma;
            let zm = (m - mu) / sigma;
            if rng.random::<f64>().ln() <= 0.5 * (zm * zm - zx * zx) {
                return Ok(x);
            }
        }
        return Err(Error::Degenerate { lo, hi, index: None });
    }

    for _ in 0..MAX_ROUNDING_RETRIES {
        let z = std_truncated_normal(rng, a, b);
        let x = mu + sigma * z;
        if iv.contains_strictly(x) {
            return Ok(x);
        }
    }
    Err(Error::Degenerate { lo, hi, index: None })
}

/// Draws from the inverse gamma distribution with density proportional to
/// `x^(-shape-1) exp(-scale / x)`; the reciprocal is `Gamma(shape, rate = scale)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Result<f64> {
    if !(shape.is_finite() && shape > 0.0 && scale.is_finite() && scale > 0.0) {
        return Err(Error::domain(format!(
            "inverse gamma requires shape > 0 and scale > 0, got ({shape}, {scale})"
        )));
    }
    let gamma = Gamma::new(shape, 1.0).map_err(|e| Error::domain(e.to_string()))?;
    loop {
        let x = scale / gamma.sample(rng);
        if x.is_finite() && x > 0.0 {
            return Ok(x);
        }
    }
}

/// Draws a point on the 3-simplex from `Dir(alpha)` via normalized gammas.
pub fn sample_dirichlet<R: Rng + ?Sized>(rng: &mut R, alpha: [f64; 3]) -> Result<[f64; 3]> {
    if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::domain(format!(
            "Dirichlet concentration must be positive, got {alpha:?}"
        )));
    }
    let gammas = [
        Gamma::new(alpha[0], 1.0).map_err(|e| Error::domain(e.to_string()))?,
        Gamma::new(alpha[1], 1.0).map_err(|e| Error::domain(e.to_string()))?,
        Gamma::new(alpha[2], 1.0).map_err(|e| Error::domain(e.to_string()))?,
    ];
    loop {
        let g = [
            gammas[0].sample(rng),
            gammas[1].sample(rng),
            gammas[2].sample(rng),
        ];
        let total: f64 = g.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            continue;
        }
        let x0 = g[0] / total;
        let x1 = g[1] / total;
        // Close the simplex on the last coordinate; it can only go negative
        // by rounding, in which case redraw.
        let x2 = 1.0 - x0 - x1;
        if x2 >= 0.0 {
            return Ok([x0, x1, x2]);
        }
    }
}

/// Draws a category index with probabilities `probs` (renormalized).
pub fn sample_multinomial_index<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> Result<usize> {
    if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::domain("probabilities must be finite and nonnegative"));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(Error::domain("all probabilities are zero"));
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
    }
    Ok(categorical_unnormalized(rng, probs, total))
}

/// Inverse-cdf draw from nonnegative weights with known positive `total`.
pub(crate) fn categorical_unnormalized<R: Rng + ?Sized>(rng: &mut R, w: &[f64], total: f64) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            last_positive = i;
            acc += wi;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}
