//! Trinormal ROC surface geometry.
//!
//! Class 0 scores are `N(mu1, sigma1^2)` with `mu1 < 0`, class 1 scores are
//! standard normal and class 2 scores are `N(mu2, sigma2^2)` with `mu2 > 0`.
//! The surface is driven by `(a, b, c, d) = (1/sigma1, mu1/sigma1, 1/sigma2,
//! mu2/sigma2)`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dist::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrinormalParams {
    pub mu1: f64,
    pub sigma1: f64,
    pub mu2: f64,
    pub sigma2: f64,
}

impl TrinormalParams {
    pub fn new(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<Self> {
        let p = TrinormalParams {
            mu1,
            sigma1,
            mu2,
            sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.mu1.is_finite()
            && self.mu2.is_finite()
            && self.mu1 < 0.0
            && self.mu2 > 0.0
            && self.sigma1.is_finite()
            && self.sigma2.is_finite()
            && self.sigma1 > 0.0
            && self.sigma2 > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "trinormal parameters need mu1 < 0, mu2 > 0 and positive sigmas, got {self:?}"
            )))
        }
    }

    /// Location and scale of class `k` (0, 1 or 2) on the latent scale.
    #[inline]
    pub fn class_location_scale(&self, k: usize) -> (f64, f64) {
        match k {
            0 => (self.mu1, self.sigma1),
            1 => (0.0, 1.0),
            _ => (self.mu2, self.sigma2),
        }
    }

    pub fn to_surface_params(&self) -> SurfaceParams {
        SurfaceParams {
            a: 1.0 / self.sigma1,
            b: self.mu1 / self.sigma1,
            c: 1.0 / self.sigma2,
            d: self.mu2 / self.sigma2,
        }
    }
}

impl Default for TrinormalParams {
    fn default() -> Self {
        TrinormalParams {
            mu1: -1.0,
            sigma1: 1.0,
            mu2: 1.0,
            sigma2: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SurfaceParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && c.is_finite() && c > 0.0 && b.is_finite() && d.is_finite()) {
            return Err(Error::domain(format!(
                "surface parameters need a > 0, c > 0 and finite b, d, got ({a}, {b}, {c}, {d})"
            )));
        }
        Ok(SurfaceParams { a, b, c, d })
    }

    /// Inverse of [`TrinormalParams::to_surface_params`]. Fails unless
    /// `b < 0 < d`.
    pub fn to_trinormal(&self) -> Result<TrinormalParams> {
        TrinormalParams::new(self.b / self.a, 1.0 / self.a, self.d / self.c, 1.0 / self.c)
    }
}

pub fn to_surface_params(p: &TrinormalParams) -> SurfaceParams {
    p.to_surface_params()
}

/// Height of the ROC surface at `(x, y)`.
///
/// Both arguments may sit on the closed unit square; boundary values follow
/// the limits of the inner quantiles (`Phi^-1(0) = -inf`).
pub fn surface_height(sp: &SurfaceParams, x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(Error::domain(format!("surface point ({x}, {y}) outside the unit square")));
    }
    Ok(surface_height_unchecked(sp, x, y))
}

fn surface_height_unchecked(sp: &SurfaceParams, x: f64, y: f64) -> f64 {
    let upper = std_normal_cdf((std_normal_quantile(1.0 - y) + sp.d) / sp.c);
    let lower = std_normal_cdf((std_normal_quantile(x) + sp.b) / sp.a);
    (upper - lower).max(0.0)
}

const VUS_LOWER: f64 = -12.0;
const VUS_UPPER: f64 = 12.0;
const VUS_PANELS: usize = 48;
const GL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    out
}

/// Composite rule on `[VUS_LOWER, VUS_UPPER]` with the standard normal
/// density folded into the weights.
fn vus_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let base = gauss_legendre(GL_ORDER);
        let width = (VUS_UPPER - VUS_LOWER) / VUS_PANELS as f64;
        let mut rule = Vec::with_capacity(VUS_PANELS * GL_ORDER);
        for p in 0..VUS_PANELS {
            let mid = VUS_LOWER + (p as f64 + 0.5) * width;
            for &(x, w) in &base {
                let s = mid + 0.5 * width * x;
                rule.push((s, 0.5 * width * w * std_normal_pdf(s)));
            }
        }
        rule
    })
}

/// Volume under the ROC surface, `P(X0 < X1 < X2)`.
///
/// Evaluates `int Phi(a s - b) Phi(d - c s) phi(s) ds` with a 48-panel,
/// 16-point composite Gauss-Legendre rule on `[-12, 12]`; the mass of
/// `phi` outside that range is below 1e-32.
pub fn vus(sp: &SurfaceParams) -> f64 {
    let SurfaceParams { a, b, c, d } = *sp;
    let v: f64 = vus_rule()
        .iter()
        .map(|&(s, w)| w * std_normal_cdf(a * s - b) * std_normal_cdf(d - c * s))
        .sum();
    v.clamp(0.0, 1.0)
}

/// The three true class fractions at thresholds `c1 < c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TcfTriple {
    pub tcf1: f64,
    pub tcf2: f64,
    pub tcf3: f64,
}

impl TcfTriple {
    pub fn sum(&self) -> f64 {
        self.tcf1 + self.tcf2 + self.tcf3
    }
}

/// True class fractions of the rule "class 0 below `c1`, class 2 above
/// `c2`". Infinite thresholds are allowed.
pub fn tcf(p: &TrinormalParams, c1: f64, c2: f64) -> Result<TcfTriple> {
    if c1.is_nan() || c2.is_nan() || c1 >= c2 {
        return Err(Error::domain(format!("thresholds need c1 < c2, got ({c1}, {c2})")));
    }
    let f0 = |c: f64| std_normal_cdf((c - p.mu1) / p.sigma1);
    let f2_sf = |c: f64| crate::dist::std_normal_sf((c - p.mu2) / p.sigma2);
    Ok(TcfTriple {
        tcf1: f0(c1),
        tcf2: std_normal_cdf(c2) - std_normal_cdf(c1),
        tcf3: f2_sf(c2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoudenIndex {
    /// `max (tcf1 + tcf2 + tcf3) - 1`.
    pub yi: f64,
    pub c1: f64,
    pub c2: f64,
}

const YOUDEN_GRID_STEP: f64 = 0.01;
const YOUDEN_TOL: f64 = 1e-6;

/// Maximizes `f` on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Three-class Youden index of the trinormal model.
///
/// The objective splits as `J(c1, c2) = [F0(c1) - F1(c1)] + [F1(c2) -
/// F2(c2)]`. A grid with step 0.01 on `[mu1 - 5 sigma1, mu2 + 5 sigma2]`
/// is searched exhaustively over all pairs `c1 <= c2` (a suffix maximum of
/// the second term makes this linear in the grid size), then each threshold
/// is refined by golden-section search to 1e-6.
pub fn youden_index(p: &TrinormalParams) -> YoudenIndex {
    let first = |c: f64| std_normal_cdf((c - p.mu1) / p.sigma1) - std_normal_cdf(c);
    let second = |c: f64| std_normal_cdf(c) - std_normal_cdf((c - p.mu2) / p.sigma2);

    let lo = p.mu1 - 5.0 * p.sigma1;
    let hi = p.mu2 + 5.0 * p.sigma2;
    let steps = ((hi - lo) / YOUDEN_GRID_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| lo + k as f64 * YOUDEN_GRID_STEP).collect();
    let f: Vec<f64> = grid.iter().map(|&c| first(c)).collect();
    let g: Vec<f64> = grid.iter().map(|&c| second(c)).collect();

    // suffix[k] = argmax_{j >= k} g[j]
    let mut suffix = vec![0usize; grid.len()];
    let mut best = grid.len() - 1;
    for k in (0..grid.len()).rev() {
        if g[k] >= g[best] {
            best = k;
        }
        suffix[k] = best;
    }
    let (mut i1, mut best_val) = (0usize, f64::NEG_INFINITY);
    for k in 0..grid.len() {
        let v = f[k] + g[suffix[k]];
        if v > best_val {
            best_val = v;
            i1 = k;
        }
    }
    let mut c1 = grid[i1];
    let mut c2 = grid[suffix[i1]];

    let h = YOUDEN_GRID_STEP;
    for _ in 0..20 {
        let new_c1 = golden_max(first, c1 - h, (c1 + h).min(c2), YOUDEN_TOL);
        let new_c2 = golden_max(second, (c2 - h).max(new_c1), c2 + h, YOUDEN_TOL);
        let moved = (new_c1 - c1).abs().max((new_c2 - c2).abs());
        c1 = new_c1;
        c2 = new_c2;
        if moved < 1e-9 {
            break;
        }
    }
    let refined = first(c1) + second(c2);
    // Never report worse than the grid optimum.
    if refined < best_val {
        c1 = grid[i1];
        c2 = grid[suffix[i1]];
    }
    YoudenIndex {
        yi: first(c1) + second(c2),
        c1,
        c2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// `n x n` lattice of cell midpoints `((i + 0.5)/n, (j + 0.5)/n)`, row-major
/// in `x` then `y`.
pub fn surface_grid(sp: &SurfaceParams, n: usize) -> Result<Vec<SurfacePoint>> {
    if n < 2 {
        return Err(Error::domain(format!("surface grid needs n >= 2, got {n}")));
    }
    let coord = |i: usize| (i as f64 + 0.5) / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (coord(i), coord(j));
            out.push(SurfacePoint {
                x,
                y,
                z: surface_height_unchecked(sp, x, y),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{chain_rng, std_normal_sf};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn reference_design() -> TrinormalParams {
        TrinormalParams::new(-1.8, 1.5, 2.0, 2.0).unwrap()
    }

    #[test]
    fn surface_params_map() {
        let sp = reference_design().to_surface_params();
        assert!((sp.a - 0.667).abs() < 1e-3);
        assert!((sp.b + 1.2).abs() < 1e-12);
        assert!((sp.c - 0.5).abs() < 1e-12);
        assert!((sp.d - 1.0).abs() < 1e-12);

        let sp = TrinormalParams::new(-2.3, 1.0, 2.0, 1.0).unwrap().to_surface_params();
        assert_eq!(sp, SurfaceParams { a: 1.0, b: -2.3, c: 1.0, d: 2.0 });
        let sp = TrinormalParams::new(-1.0, 1.0, 1.0, 1.0).unwrap().to_surface_params();
        assert_eq!(sp, SurfaceParams { a: 1.0, b: -1.0, c: 1.0, d: 1.0 });
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(TrinormalParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(TrinormalParams::new(-1.0, 1.0, -1.0, 1.0).is_err());
        assert!(TrinormalParams::new(-1.0, 0.0, 1.0, 1.0).is_err());
        assert!(SurfaceParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(SurfaceParams::new(1.0, 1.0, 1.0, 1.0).unwrap().to_trinormal().is_err());
    }

    #[test]
    fn surface_height_identity_case() {
        let sp = SurfaceParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!((surface_height(&sp, 0.2, 0.3).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(surface_height(&sp, 0.6, 0.6).unwrap(), 0.0);
        assert!(surface_height(&sp, -0.1, 0.5).is_err());
        assert!(surface_height(&sp, 0.5, 1.5).is_err());
    }

    #[test]
    fn surface_height_boundaries() {
        let sp = reference_design().to_surface_params();
        assert_eq!(surface_height(&sp, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(surface_height(&sp, 1.0, 0.3).unwrap(), 0.0);
        assert_eq!(surface_height(&sp, 0.4, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn surface_height_matches_direct_formula() {
        // Independent evaluation: quantiles from statrs, cdf from statrs.
        use statrs::distribution::{ContinuousCDF, Normal};
        let n = Normal::new(0.0, 1.0).unwrap();
        let sp = SurfaceParams::new(0.667, -1.2, 0.5, 1.0).unwrap();
        let (x, y) = (0.1, 0.1);
        let expect = (n.cdf((n.inverse_cdf(1.0 - y) + sp.d) / sp.c)
            - n.cdf((n.inverse_cdf(x) + sp.b) / sp.a))
            .max(0.0);
        let got = surface_height(&sp, x, y).unwrap();
        assert!(got > 0.0 && got < 1.0);
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(GL_ORDER);
        let wsum: f64 = rule.iter().map(|r| r.1).sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // int_{-1}^{1} x^30 dx = 2/31
        let v: f64 = rule.iter().map(|&(x, w)| w * x.powi(30)).sum();
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn vus_golden_values() {
        let v = vus(&SurfaceParams::new(1.0, 0.0, 1.0, 0.0).unwrap());
        assert!((v - 1.0 / 6.0).abs() < 1e-8);
        let v = vus(&SurfaceParams::new(0.667, -1.2, 0.5, 1.0).unwrap());
        assert!((v - 0.671).abs() < 1e-3, "{v}");
        let v = vus(&SurfaceParams::new(1.0, -2.3, 1.0, 2.0).unwrap());
        assert!((v - 0.870).abs() < 1e-3, "{v}");
    }

    #[test]
    fn vus_matches_fine_trapezoid() {
        // Independent route: trapezoid rule with step 1e-4 on [-14, 14].
        for sp in [
            SurfaceParams::new(0.667, -1.2, 0.5, 1.0).unwrap(),
            SurfaceParams::new(4.0, -3.0, 0.3, 0.2).unwrap(),
            SurfaceParams::new(12.0, -1.0, 8.0, 2.0).unwrap(),
        ] {
            let h = 1e-4;
            let n = (28.0 / h) as usize;
            let mut acc = 0.0;
            for k in 0..=n {
                let s = -14.0 + k as f64 * h;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                acc += w * std_normal_cdf(sp.a * s - sp.b) * std_normal_sf(sp.c * s - sp.d) * std_normal_pdf(s);
            }
            let oracle = acc * h;
            assert!((vus(&sp) - oracle).abs() < 1e-8, "{sp:?}: {} vs {oracle}", vus(&sp));
        }
    }

    #[test]
    fn vus_against_monte_carlo() {
        let mut rng = chain_rng(77, 0);
        let p = reference_design();
        let n = 200_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let x0 = p.mu1 + p.sigma1 * rng.sample::<f64, _>(StandardNormal);
            let x1: f64 = rng.sample(StandardNormal);
            let x2 = p.mu2 + p.sigma2 * rng.sample::<f64, _>(StandardNormal);
            if x0 < x1 && x1 < x2 {
                hits += 1;
            }
        }
        let v = vus(&p.to_surface_params());
        let f = hits as f64 / n as f64;
        let se = (v * (1.0 - v) / n as f64).sqrt();
        assert!((f - v).abs() < 3.0 * se);
    }

    #[test]
    fn tcf_values() {
        let p = reference_design();
        let t = tcf(&p, -0.9, 1.0).unwrap();
        use statrs::distribution::{ContinuousCDF, Normal};
        let n0 = Normal::new(-1.8, 1.5).unwrap();
        let n1 = Normal::new(0.0, 1.0).unwrap();
        let n2 = Normal::new(2.0, 2.0).unwrap();
        // statrs' erf is accurate to about 1e-11 only.
        assert!((t.tcf1 - n0.cdf(-0.9)).abs() < 1e-9);
        assert!((t.tcf2 - (n1.cdf(1.0) - n1.cdf(-0.9))).abs() < 1e-9);
        assert!((t.tcf3 - (1.0 - n2.cdf(1.0))).abs() < 1e-9);
        // Double-precision reference values.
        assert!((t.tcf1 - 0.7257468822499265).abs() < 1e-15);
        assert!((t.tcf2 - 0.6572846207217835).abs() < 1e-15);
        assert!((t.tcf3 - 0.6914624612740131).abs() < 1e-15);

        let t = tcf(&p, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!((t.tcf1, t.tcf2, t.tcf3), (0.0, 1.0, 0.0));
        assert!(tcf(&p, 1.0, 1.0).is_err());
        assert!(tcf(&p, 2.0, 1.0).is_err());
    }

    #[test]
    fn tcf_sum_is_one_for_identical_classes() {
        // Limit of identical classes: all three distributions N(0, 1).
        let p = TrinormalParams::new(-1e-300, 1.0, 1e-300, 1.0).unwrap();
        for (c1, c2) in [(-1.0, 0.5), (-3.0, 2.0), (0.1, 0.2)] {
            let t = tcf(&p, c1, c2).unwrap();
            assert!((t.sum() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn youden_identical_classes_is_zero() {
        let p = TrinormalParams::new(-1e-12, 1.0, 1e-12, 1.0).unwrap();
        let y = youden_index(&p);
        assert!(y.yi.abs() < 1e-10, "{y:?}");
    }

    #[test]
    fn youden_matches_fine_grid_and_closed_form() {
        let p = TrinormalParams::new(-2.3, 1.0, 2.0, 1.0).unwrap();
        let y = youden_index(&p);
        // Equal variances: the optimal thresholds are the density crossings,
        // midway between adjacent class means.
        assert!((y.c1 - (-1.15)).abs() < 1e-5, "{y:?}");
        assert!((y.c2 - 1.0).abs() < 1e-5, "{y:?}");

        // Exhaustive 2-D search at step 1e-4 in a window around the optimum.
        let j = |c1: f64, c2: f64| tcf(&p, c1, c2).unwrap().sum() - 1.0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let c1 = -1.2 + i as f64 * 1e-4;
            for k in 0..=1000 {
                let c2 = 0.95 + k as f64 * 1e-4;
                best = best.max(j(c1, c2));
            }
        }
        assert!((y.yi - best).abs() < 1e-8, "{} vs {best}", y.yi);
    }

    #[test]
    fn youden_unequal_variances_beats_grid() {
        let p = reference_design();
        let y = youden_index(&p);
        assert!(y.c1 < y.c2);
        let direct = tcf(&p, y.c1, y.c2).unwrap().sum() - 1.0;
        assert!((direct - y.yi).abs() < 1e-12);
        let mut best = f64::NEG_INFINITY;
        let mut c1 = -6.0;
        while c1 < 4.0 {
            let mut c2 = c1 + 0.005;
            while c2 < 8.0 {
                best = best.max(tcf(&p, c1, c2).unwrap().sum() - 1.0);
                c2 += 0.005;
            }
            c1 += 0.005;
        }
        assert!(y.yi >= best - 1e-9);
    }

    #[test]
    fn surface_grid_shape_and_values() {
        let sp = SurfaceParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(surface_grid(&sp, 2).unwrap().len(), 4);
        assert!(surface_grid(&sp, 1).is_err());
        for pt in surface_grid(&sp, 25).unwrap() {
            assert!((pt.z - (1.0 - pt.x - pt.y).max(0.0)).abs() < 1e-12);
        }
        let sp = reference_design().to_surface_params();
        assert!(surface_grid(&sp, 30).unwrap().iter().all(|p| (0.0..=1.0).contains(&p.z)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn surface() -> impl Strategy<Value = SurfaceParams> {
            (0.2f64..4.0, -4.0f64..-0.01, 0.2f64..4.0, 0.01f64..4.0)
                .prop_map(|(a, b, c, d)| SurfaceParams { a, b, c, d })
        }

        proptest! {
            #[test]
            fn vus_in_unit_interval(sp in surface()) {
                let v = vus(&sp);
                prop_assert!(v > 0.0 && v < 1.0);
            }

            #[test]
            fn vus_monotone_in_b_and_d(sp in surface(), delta in 0.05f64..1.0) {
                let up_d = SurfaceParams { d: sp.d + delta, ..sp };
                let down_b = SurfaceParams { b: sp.b - delta, ..sp };
                prop_assert!(vus(&up_d) > vus(&sp));
                prop_assert!(vus(&down_b) > vus(&sp));
            }

            #[test]
            fn surface_nonincreasing(sp in surface(), x in 0.01f64..0.98, y in 0.01f64..0.98, dx in 0.0f64..0.01) {
                let z = surface_height(&sp, x, y).unwrap();
                prop_assert!(surface_height(&sp, x + dx, y).unwrap() <= z + 1e-15);
                prop_assert!(surface_height(&sp, x, y + dx).unwrap() <= z + 1e-15);
            }

            #[test]
            fn parameter_maps_invert(mu1 in -5.0f64..-0.01, s1 in 0.1f64..5.0, mu2 in 0.01f64..5.0, s2 in 0.1f64..5.0) {
                let p = TrinormalParams::new(mu1, s1, mu2, s2).unwrap();
                let back = p.to_surface_params().to_trinormal().unwrap();
                prop_assert!((back.mu1 - mu1).abs() < 1e-12);
                prop_assert!((back.sigma1 - s1).abs() < 1e-12);
                prop_assert!((back.mu2 - mu2).abs() < 1e-12);
                prop_assert!((back.sigma2 - s2).abs() < 1e-12);
            }
        }
    }
}
