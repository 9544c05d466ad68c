//! Ranks, order statistics and the latent-score bounds of the rank
//! likelihood.
//!
//! The set of latent vectors consistent with the observed ranks and labels is
//! a product of intervals once the scores are put in sorted order: each
//! sorted score lies strictly between its two neighbours. [`neighbor_bounds`]
//! returns that interval.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::Interval;
use crate::error::{Error, Result};

/// Observed label of a subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Healthy,
    Intermediate,
    Severe,
    /// Disease status not verified by the gold standard.
    Unverified,
}

impl Label {
    pub fn from_code(code: u8) -> Option<Label> {
        match code {
            0 => Some(Label::Healthy),
            1 => Some(Label::Intermediate),
            2 => Some(Label::Severe),
            3 => Some(Label::Unverified),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Label::Healthy => 0,
            Label::Intermediate => 1,
            Label::Severe => 2,
            Label::Unverified => 3,
        }
    }

    /// Class index 0..=2, or `None` when unverified.
    pub fn class(self) -> Option<usize> {
        match self {
            Label::Unverified => None,
            l => Some(l.code() as usize),
        }
    }

    pub fn from_class(k: usize) -> Label {
        match k {
            0 => Label::Healthy,
            1 => Label::Intermediate,
            _ => Label::Severe,
        }
    }
}

/// Raw measurements with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub s: Vec<f64>,
    pub l: Vec<Label>,
}

impl Dataset {
    /// Validates lengths, finiteness and `N >= 3`. Class coverage is
    /// checked separately by [`Dataset::check_classes_observed`], since
    /// simulation code builds intermediate datasets that may miss a class.
    pub fn new(s: Vec<f64>, l: Vec<Label>) -> Result<Self> {
        if s.len() != l.len() {
            return Err(Error::domain(format!(
                "{} measurements but {} labels",
                s.len(),
                l.len()
            )));
        }
        if s.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "need at least 3 subjects, got {}",
                s.len()
            )));
        }
        if let Some(i) = s.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("measurement {i} is not finite")));
        }
        Ok(Dataset { s, l })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Counts of labels 0, 1, 2 and 3.
    pub fn label_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for l in &self.l {
            c[l.code() as usize] += 1;
        }
        c
    }

    pub fn n_unverified(&self) -> usize {
        self.label_counts()[3]
    }

    /// Fails unless every class has at least one verified subject.
    pub fn check_classes_observed(&self) -> Result<()> {
        let c = self.label_counts();
        for (k, &n) in c[..3].iter().enumerate() {
            if n == 0 {
                return Err(Error::InsufficientData(format!(
                    "no verified subject with label {k}"
                )));
            }
        }
        Ok(())
    }

    /// Measurements of verified class `k`.
    pub fn class_values(&self, k: usize) -> Vec<f64> {
        self.s
            .iter()
            .zip(&self.l)
            .filter(|(_, l)| l.class() == Some(k))
            .map(|(s, _)| *s)
            .collect()
    }

    /// Applies `h` to every measurement, keeping labels.
    pub fn map_measurements(&self, h: impl Fn(f64) -> f64) -> Dataset {
        Dataset {
            s: self.s.iter().map(|&v| h(v)).collect(),
            l: self.l.clone(),
        }
    }
}

/// Sorting permutation of a dataset with labels carried along.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedData {
    /// `order[k]` is the subject holding the `k`-th smallest measurement.
    pub order: Vec<usize>,
    /// `rank[i]` is the 0-based position of subject `i` in sorted order.
    pub rank: Vec<usize>,
    /// Labels in sorted order.
    pub l_sorted: Vec<Label>,
    /// Random keys used to order tied measurements; empty when there were
    /// no ties. `tie_keys[i]` belongs to subject `i`.
    pub tie_keys: Vec<u64>,
    /// Number of subjects sharing their measurement with another subject.
    pub n_tied: usize,
}

impl RankedData {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn has_unverified(&self) -> bool {
        self.l_sorted.contains(&Label::Unverified)
    }

    /// 1-based ranks, the usual statistical convention.
    pub fn ranks_one_based(&self) -> Vec<usize> {
        self.rank.iter().map(|r| r + 1).collect()
    }
}

/// Ranks the measurements of `d`.
///
/// Exact ties are broken uniformly at random: each subject receives a
/// random 64-bit key from `rng` and tied measurements are ordered by key
/// (then by index). Keys are drawn only when a tie exists, so tie-free data
/// leaves `rng` untouched.
pub fn compute_ranks<R: Rng + ?Sized>(d: &Dataset, rng: &mut R) -> Result<RankedData> {
    let n = d.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 subjects, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d.s[i].total_cmp(&d.s[j]).then(i.cmp(&j)));

    let n_tied = count_tied(&order, &d.s);
    let mut tie_keys = Vec::new();
    if n_tied > 0 {
        tie_keys = (0..n).map(|_| rng.random::<u64>()).collect();
        order.sort_by(|&i, &j| {
            d.s[i]
                .total_cmp(&d.s[j])
                .then(tie_keys[i].cmp(&tie_keys[j]))
                .then(i.cmp(&j))
        });
    }

    let mut rank = vec![0; n];
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k;
    }
    let l_sorted = order.iter().map(|&i| d.l[i]).collect();
    Ok(RankedData {
        order,
        rank,
        l_sorted,
        tie_keys,
        n_tied,
    })
}

fn count_tied(order: &[usize], s: &[f64]) -> usize {
    let mut tied = 0;
    let mut k = 0;
    while k < order.len() {
        let mut j = k + 1;
        while j < order.len() && s[order[j]] == s[order[k]] {
            j += 1;
        }
        if j - k > 1 {
            tied += j - k;
        }
        k = j;
    }
    tied
}

/// Interval `(qs[k-1], qs[k+1])` with infinite ends at the boundaries.
pub fn neighbor_bounds(qs: &[f64], k: usize) -> Result<Interval> {
    if k >= qs.len() {
        return Err(Error::domain(format!(
            "index {k} out of range for {} scores",
            qs.len()
        )));
    }
    Ok(Interval {
        lo: if k == 0 { f64::NEG_INFINITY } else { qs[k - 1] },
        hi: qs.get(k + 1).copied().unwrap_or(f64::INFINITY),
    })
}

/// Whether ranking `h(d)` gives the same permutation as ranking `d`, with the
/// same tie-breaking seed.
pub fn rank_invariance_check(d: &Dataset, h: impl Fn(f64) -> f64, tie_seed: u64) -> Result<bool> {
    let mapped = d.map_measurements(h);
    if mapped.s.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("transform produced non-finite values"));
    }
    let a = compute_ranks(d, &mut crate::dist::chain_rng(tie_seed, 0))?;
    let b = compute_ranks(&mapped, &mut crate::dist::chain_rng(tie_seed, 0))?;
    Ok(a.order == b.order)
}
