//! Nonparametric reference estimators: the triple U-statistic VUS and
//! empirical true class fractions.

use crate::error::{Error, Result};
use crate::trinormal::TcfTriple;

fn check_groups(x: &[f64], y: &[f64], z: &[f64]) -> Result<()> {
    if x.is_empty() || y.is_empty() || z.is_empty() {
        return Err(Error::domain(format!(
            "empirical estimators need three nonempty groups, got sizes ({}, {}, {})",
            x.len(),
            y.len(),
            z.len()
        )));
    }
    if x.iter().chain(y).chain(z).any(|v| v.is_nan()) {
        return Err(Error::domain("measurements contain NaN"));
    }
    Ok(())
}

/// Number of ordered triples `x_i < y_j < z_k`, ties counting as failures.
///
/// Sorts `x` and `z` once, then counts for each `y_j` the `x` below it and
/// the `z` above it by binary search.
pub fn ordered_triple_count(x: &[f64], y: &[f64], z: &[f64]) -> u128 {
    let mut xs = x.to_vec();
    let mut zs = z.to_vec();
    xs.sort_by(f64::total_cmp);
    zs.sort_by(f64::total_cmp);
    y.iter()
        .map(|&yj| {
            let below = xs.partition_point(|&v| v < yj) as u128;
            let above = (zs.len() - zs.partition_point(|&v| v <= yj)) as u128;
            below * above
        })
        .sum()
}

/// Empirical VUS: the fraction of triples with `x_i < y_j < z_k`.
pub fn empirical_vus(x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    check_groups(x, y, z)?;
    let total = x.len() as f64 * y.len() as f64 * z.len() as f64;
    Ok(ordered_triple_count(x, y, z) as f64 / total)
}

/// Empirical TCFs of the rule "class 0 if `<= c1`, class 2 if `> c2`".
pub fn empirical_tcf(x: &[f64], y: &[f64], z: &[f64], c1: f64, c2: f64) -> Result<TcfTriple> {
    check_groups(x, y, z)?;
    if c1.is_nan() || c2.is_nan() || c1 >= c2 {
        return Err(Error::domain(format!("thresholds need c1 < c2, got ({c1}, {c2})")));
    }
    let frac = |v: &[f64], pred: &dyn Fn(f64) -> bool| {
        v.iter().filter(|&&s| pred(s)).count() as f64 / v.len() as f64
    };
    Ok(TcfTriple {
        tcf1: frac(x, &|s| s <= c1),
        tcf2: frac(y, &|s| c1 < s && s <= c2),
        tcf3: frac(z, &|s| s > c2),
    })
}
