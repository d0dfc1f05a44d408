use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{domain, EvalError};
use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappa<T> {
    pub kappa: T,
    pub observed_agreement: T,
    pub expected_agreement: T,
    /// Chance agreement was 1, so kappa is fixed by convention.
    pub degenerate: bool,
}

/// Cohen's kappa `(p_o − p_e) / (1 − p_e)` for two raters over the same items.
pub fn cohens_kappa<T: Scalar, C: Ord>(ratings_a: &[C], ratings_b: &[C]) -> Result<Kappa<T>, EvalError> {
    if ratings_a.len() != ratings_b.len() {
        return Err(domain(format!(
            "rating vectors differ in length ({} vs {})",
            ratings_a.len(),
            ratings_b.len()
        )));
    }
    if ratings_a.is_empty() {
        return Err(domain("kappa needs at least one rated item"));
    }
    let n = T::from_count(ratings_a.len());
    let mut marginals: BTreeMap<&C, (usize, usize)> = BTreeMap::new();
    let mut agreements = 0;
    for (a, b) in ratings_a.iter().zip(ratings_b) {
        marginals.entry(a).or_default().0 += 1;
        marginals.entry(b).or_default().1 += 1;
        if a == b {
            agreements += 1;
        }
    }
    let observed = T::from_count(agreements) / n;
    let expected = marginals.values().fold(T::zero(), |acc, &(ca, cb)| {
        acc + (T::from_count(ca) / n) * (T::from_count(cb) / n)
    });
    if expected == T::one() {
        return Ok(Kappa {
            kappa: if observed == T::one() { T::one() } else { T::zero() },
            observed_agreement: observed,
            expected_agreement: expected,
            degenerate: true,
        });
    }
    Ok(Kappa {
        kappa: (observed - expected) / (T::one() - expected),
        observed_agreement: observed,
        expected_agreement: expected,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectMagnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffsDelta<T> {
    pub delta: T,
    pub magnitude: EffectMagnitude,
}

/// `(#{x > y} − #{x < y}) / (n₁·n₂)` over all cross pairs.
pub fn cliffs_delta<T: Scalar, V: PartialOrd>(
    sample_x: &[V],
    sample_y: &[V],
) -> Result<CliffsDelta<T>, EvalError> {
    if sample_x.is_empty() || sample_y.is_empty() {
        return Err(domain("cliff's delta needs two non-empty samples"));
    }
    let (mut greater, mut less) = (0usize, 0usize);
    for x in sample_x {
        for y in sample_y {
            if x > y {
                greater += 1;
            } else if x < y {
                less += 1;
            }
        }
    }
    let pairs = T::from_count(sample_x.len() * sample_y.len());
    let delta = (T::from_count(greater) - T::from_count(less)) / pairs;
    let size = delta.magnitude();
    let band = |v: f64| T::from_f64(v).expect("threshold representable");
    let magnitude = if size < band(0.147) {
        EffectMagnitude::Negligible
    } else if size < band(0.33) {
        EffectMagnitude::Small
    } else if size < band(0.474) {
        EffectMagnitude::Medium
    } else {
        EffectMagnitude::Large
    };
    Ok(CliffsDelta { delta, magnitude })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney<T> {
    /// Rank-sum statistic of the first sample.
    pub u: T,
    /// Statistic of the second sample; `u + u_other = n₁·n₂`.
    pub u_other: T,
    pub z: T,
    /// Two-sided, normal approximation with tie correction and continuity
    /// correction.
    pub p_value: T,
}

/// Mann-Whitney U test with midranks for ties.
pub fn mann_whitney_u<T: Real>(sample_x: &[T], sample_y: &[T]) -> Result<MannWhitney<T>, EvalError> {
    if sample_x.is_empty() || sample_y.is_empty() {
        return Err(domain("mann-whitney needs two non-empty samples"));
    }
    if sample_x.iter().chain(sample_y).any(|v| v.is_nan()) {
        return Err(domain("mann-whitney samples contain NaN"));
    }
    let (n1, n2) = (sample_x.len(), sample_y.len());
    let mut pooled: Vec<(T, bool)> = sample_x
        .iter()
        .map(|&v| (v, true))
        .chain(sample_y.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("no NaN"));

    let mut rank_sum_x = T::zero();
    let mut tie_term = T::zero();
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start;
        while end + 1 < pooled.len() && pooled[end + 1].0 == pooled[start].0 {
            end += 1;
        }
        // ranks start..=end (0-based) share the midrank
        let midrank = T::from_count(start + end + 2).half();
        let in_x = pooled[start..=end].iter().filter(|p| p.1).count();
        rank_sum_x = rank_sum_x + midrank * T::from_count(in_x);
        let t = T::from_count(end - start + 1);
        tie_term = tie_term + t * t * t - t;
        start = end + 1;
    }

    let (fn1, fn2) = (T::from_count(n1), T::from_count(n2));
    let u = rank_sum_x - fn1 * (fn1 + T::one()).half();
    let u_other = fn1 * fn2 - u;
    let mean = fn1 * fn2 / T::two();
    let n = fn1 + fn2;
    let twelve = T::from_count(12);
    let variance = if n > T::one() {
        fn1 * fn2 / twelve * ((n + T::one()) - tie_term / (n * (n - T::one())))
    } else {
        T::zero()
    };
    if !(variance > T::zero()) {
        return Ok(MannWhitney {
            u,
            u_other,
            z: T::zero(),
            p_value: T::one(),
        });
    }
    let shifted = ((u - mean).abs() - T::one().half()).max(T::zero());
    let z = shifted / variance.sqrt();
    let p = statrs::function::erf::erfc(z.to_f64_lossy() / std::f64::consts::SQRT_2);
    Ok(MannWhitney {
        u,
        u_other,
        z,
        p_value: T::from_f64(p.min(1.0)).expect("p representable"),
    })
}
